use super::*;
use crate::groups::CarnotAlgebra;
use crate::linalg::Covector;

fn minkowski(x1: [f64; 2]) -> ProblemInstance {
    ProblemInstance::new(
        GroupModel::Abelian { dim: 2 },
        ConeSpec::standard_lorentz(1),
        AntinormSpec::standard_lorentz(1),
        GroupPoint::new([0.0, 0.0]),
        GroupPoint::new(x1),
        DEFAULT_SEGMENTS,
    )
    .unwrap()
}

fn heisenberg(x1: [f64; 3]) -> ProblemInstance {
    ProblemInstance::new(
        GroupModel::carnot(CarnotAlgebra::lorentz_step_two(1)),
        ConeSpec::standard_lorentz(1),
        AntinormSpec::standard_lorentz(1),
        GroupPoint::new([0.0, 0.0, 0.0]),
        GroupPoint::new(x1),
        DEFAULT_SEGMENTS,
    )
    .unwrap()
}

#[test]
fn minkowski_longest_path_is_the_straight_line() {
    let report = solve_longest(&minkowski([5.0, 3.0]), &SolveOptions::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Solved);
    assert!((report.objective.finite().unwrap() - 4.0).abs() < 4e-3);
    // Every optimal control is parallel to the displacement.
    for u in report.control.values() {
        assert!((3.0 * u[0] - 5.0 * u[1]).abs() < 1e-3 * u.norm());
    }
    assert_eq!(report.trajectory.points.len(), DEFAULT_SEGMENTS + 1);
}

#[test]
fn spacelike_endpoint_has_no_admissible_path() {
    let report = solve_longest(&minkowski([5.0, 7.0]), &SolveOptions::default()).unwrap();
    assert_eq!(report.status, SolveStatus::NoAdmissiblePath);
    assert!(report.objective.is_neg_inf());
}

#[test]
fn heisenberg_constant_control_attains_the_bound() {
    let prob = heisenberg([3.0, 0.0, 0.0]);
    let report = solve_longest(&prob, &SolveOptions::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Solved);
    assert!((report.objective.finite().unwrap() - 3.0).abs() < 1e-3);
}

#[test]
fn heisenberg_with_area_stays_below_the_bound() {
    let prob = heisenberg([3.0, 0.5, 0.4]);
    let bound = abelianized_upper_bound(&prob).unwrap().finite().unwrap();
    let report = solve_longest(&prob, &SolveOptions::default()).unwrap();
    assert!(matches!(report.status, SolveStatus::Solved | SolveStatus::MaxIterations));
    assert!(report.endpoint_residual <= 1e-6);
    let objective = report.objective.finite().unwrap();
    assert!(objective <= bound + 1e-9, "{objective} > {bound}");
    assert!(objective > 0.5 * bound);
    let best: Vec<f64> = report.history.iter().filter_map(|h| h.best_feasible).collect();
    assert!(best.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn bounds_and_closed_forms() {
    let model = GroupModel::Abelian { dim: 2 };
    let cone = ConeSpec::standard_lorentz(1);
    let nu = AntinormSpec::standard_lorentz(1);
    let origin = GroupPoint::new([0.0, 0.0]);
    let value = |x: [f64; 2]| abelian_closed_form(&model, &nu, &cone, &origin, &GroupPoint::new(x)).unwrap();
    assert!((value([5.0, 3.0]).finite().unwrap() - 4.0).abs() < 1e-15);
    assert_eq!(value([1.0, 1.0]).finite(), Some(0.0));
    assert!(value([1.0, 2.0]).is_neg_inf());
    assert!(abelian_closed_form(&GroupModel::heisenberg(), &nu, &cone, &origin, &origin).is_err());

    for c in [0.0, 1.5, -7.0] {
        let bound = abelianized_upper_bound(&heisenberg([5.0, 3.0, c])).unwrap();
        assert!((bound.finite().unwrap() - 4.0).abs() < 1e-14);
    }
    assert!(abelianized_upper_bound(&heisenberg([1.0, 3.0, 0.0])).unwrap().is_neg_inf());
}

#[test]
fn reparametrized_solve_matches() {
    let prob = minkowski([5.0, 3.0]);
    let form = TimeForm::left_invariant(&prob.model, Covector::new(vec![1.0, 0.0])).unwrap();
    let report = solve_reparametrized(&prob, &form, &SolveOptions::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Solved);
    assert!((report.objective.finite().unwrap() - 4.0).abs() < 4e-3);
    assert!((report.trajectory.times.last().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn hyperbolic_constant_control_is_found() {
    let mut form = nalgebra::DMatrix::from_diagonal_element(2, 2, -1.0);
    form[(1, 1)] = 1.0;
    let cone = ConeSpec::lorentz(form.clone(), Covector::new(vec![0.0, 1.0])).unwrap();
    let prob = ProblemInstance::new(
        GroupModel::Hyperbolic,
        cone,
        AntinormSpec::LorentzSqrt { form },
        GroupPoint::new([0.0, 1.0]),
        GroupPoint::new([1.0, 4.0]),
        20,
    )
    .unwrap();
    let report = solve_longest(&prob, &SolveOptions::default()).unwrap();
    assert_ne!(report.status, SolveStatus::NoAdmissiblePath);
    assert!(report.endpoint_residual <= 1e-6);
    let beta = 4f64.ln();
    let alpha = beta / 3.0;
    // The one-parameter subgroup is admissible, so the optimum is at least its length.
    assert!(report.objective.finite().unwrap() >= (beta * beta - alpha * alpha).sqrt() - 1e-6);
}

#[test]
fn hyperbolicity_desk_on_the_minkowski_diamond() {
    let prob = minkowski([5.0, 3.0]);
    let tau = prob.cone.find_time_covector().unwrap().covector;
    let form = TimeForm::left_invariant(&prob.model, tau).unwrap();
    let report = check_hyperbolicity_desk(&prob, &form, 2000, 0).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!((report.radius - 5.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!(report.in_band > 0);
}

#[test]
fn heisenberg_band_bounds_the_first_coordinate() {
    let prob = heisenberg([3.0, 0.0, 0.0]);
    let form = TimeForm::left_invariant(&prob.model, Covector::new(vec![1.0, 0.0])).unwrap();
    let report = check_hyperbolicity_desk(&prob, &form, 2000, 1).unwrap();
    assert!(report.passed());
    for p in reachability_sample(&prob.model, &prob.cone, &prob.x0, 500, 1).unwrap() {
        assert!(prob.cone.contains(&Vector::from([p.coords[0], p.coords[1]]), 1e-9).unwrap());
        if form.potential(&p).unwrap() <= 3.0 {
            assert!(p.coords[0] <= 3.0);
        }
    }
}

#[test]
fn not_exact_forms_are_refused() {
    let prob = heisenberg([3.0, 0.0, 0.0]);
    let form = TimeForm::left_invariant(&prob.model, Covector::new(vec![1.0, 0.0, 1.0])).unwrap();
    assert!(matches!(check_hyperbolicity_desk(&prob, &form, 10, 0), Err(Error::NotExact(_))));
    assert!(matches!(solve_reparametrized(&prob, &form, &SolveOptions::default()), Err(Error::NotExact(_))));
}

#[test]
fn invalid_instances_are_rejected() {
    let line = ConeSpec::polyhedral(vec![Vector::from([1.0, 0.0]), Vector::from([-1.0, 0.0])]).unwrap();
    let r = ProblemInstance::new(
        GroupModel::Abelian { dim: 2 },
        line,
        AntinormSpec::Zero,
        GroupPoint::new([0.0, 0.0]),
        GroupPoint::new([1.0, 0.0]),
        4,
    );
    assert!(matches!(r, Err(Error::NotPointed)));
    let r = ProblemInstance::new(
        GroupModel::Hyperbolic,
        ConeSpec::standard_lorentz(1),
        AntinormSpec::Zero,
        GroupPoint::new([0.0, 1.0]),
        GroupPoint::new([0.0, -1.0]),
        4,
    );
    assert!(matches!(r, Err(Error::InvalidPoint(_))));
}
