mod common;

use common::*;
use proptest::prelude::*;
use sublorentz::cones::{AntinormSpec, ConeSpec};
use sublorentz::dynamics::{admissibility_check, integrate, oriented_area, sl_length, ControlSignal};
use sublorentz::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use sublorentz::timeform::TimeForm;
use sublorentz::{Covector, Vector};

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn controls(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(coords(m), 1..12)
}

/// Controls inside the standard Lorentz cone of `R^{1,r}`.
fn timelike_controls(r: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec((0.1..3.0f64, coords(r), 0.0..1.0f64), 1..12).prop_map(|rows| {
        rows.into_iter()
            .map(|(t, x, rho)| {
                let n = x.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-9);
                let mut v = vec![t];
                v.extend(x.iter().map(|a| a * rho * t / n));
                v
            })
            .collect()
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lorentz_membership_matches_the_inequality(v in coords(3)) {
        let cone = ConeSpec::standard_lorentz(2);
        let inside = v[0] >= (v[1] * v[1] + v[2] * v[2]).sqrt();
        let margin = (v[0] - (v[1] * v[1] + v[2] * v[2]).sqrt()).abs();
        prop_assume!(margin > 1e-6);
        prop_assert_eq!(cone.contains(&Vector::new(v), 1e-9).unwrap(), inside);
    }

    #[test]
    fn planar_polyhedral_membership_matches_cross_products(a in 0.1..1.4f64, b in 0.1..1.4f64, v in coords(2)) {
        // Generators at angles +a and -b from the t axis.
        let g1 = [a.cos(), a.sin()];
        let g2 = [b.cos(), -b.sin()];
        let cone = ConeSpec::polyhedral(vectors(&[g1.to_vec(), g2.to_vec()])).unwrap();
        let cross = |p: [f64; 2], q: &[f64]| p[0] * q[1] - p[1] * q[0];
        let left = cross(g2, &v);
        let right = -cross(g1, &v);
        prop_assume!(left.abs() > 1e-6 && right.abs() > 1e-6);
        prop_assert_eq!(cone.contains(&Vector::new(v), 1e-9).unwrap(), left > 0.0 && right > 0.0);
    }

    #[test]
    fn conic_combinations_stay_in_polyhedral_cones(w in prop::collection::vec(0.0..2.0f64, 4)) {
        let gens = vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![1.0, -1.0, 0.0], vec![2.0, 0.0, -1.0]];
        let cone = ConeSpec::polyhedral(vectors(&gens)).unwrap();
        let v: Vec<f64> = (0..3).map(|i| gens.iter().zip(&w).map(|(g, c)| c * g[i]).sum()).collect();
        prop_assert!(cone.contains(&Vector::new(v), 1e-9).unwrap());
    }

    #[test]
    fn lorentz_antinorm_is_homogeneous_and_superadditive(u in timelike_controls(2), lambda in 0.01..100.0f64) {
        let nu = AntinormSpec::standard_lorentz(2);
        let cone = ConeSpec::standard_lorentz(2);
        let a = Vector::new(u[0].clone());
        let value = |v: &Vector| nu.eval(&cone, v).unwrap().to_f64();
        prop_assert!((value(&a.scale(lambda)) - lambda * value(&a)).abs() <= 1e-9 * (1.0 + lambda * value(&a)));
        prop_assert!((value(&a) - minkowski_length(a.as_slice()).unwrap()).abs() < 1e-12);
        // Reverse triangle inequality over the whole polygon.
        let sum = u.iter().fold(Vector::zeros(3), |acc, v| &acc + &Vector::new(v.clone()));
        let parts: f64 = u.iter().map(|v| value(&Vector::new(v.clone()))).sum();
        prop_assert!(value(&sum) >= parts - 1e-9 * (1.0 + parts));
    }

    #[test]
    fn spacelike_vectors_have_minus_infinite_length(x in 0.1..3.0f64, t in -3.0..3.0f64) {
        prop_assume!(t.abs() < x * 0.99);
        let nu = AntinormSpec::standard_lorentz(1);
        prop_assert!(nu.eval(&ConeSpec::standard_lorentz(1), &Vector::from([t, x])).unwrap().is_neg_inf());
    }

    #[test]
    fn group_products_are_associative(a in coords(4), b in coords(4), c in coords(4)) {
        for model in [GroupModel::carnot(CarnotAlgebra::filiform(3)), GroupModel::Abelian { dim: 4 }] {
            let (a, b, c) = (GroupPoint::new(a.clone()), GroupPoint::new(b.clone()), GroupPoint::new(c.clone()));
            let left = model.mul(&model.mul(&a, &b).unwrap(), &c).unwrap();
            let right = model.mul(&a, &model.mul(&b, &c).unwrap()).unwrap();
            prop_assert!(close(left.coords.as_slice(), right.coords.as_slice(), 1e-9));
            let e = model.mul(&a, &model.inv(&a).unwrap()).unwrap();
            prop_assert!(e.coords.norm() < 1e-9 * (1.0 + a.coords.norm().powi(3)));
        }
        let model = GroupModel::carnot(CarnotAlgebra::filiform(4));
        let (a, b, c) = (GroupPoint::new(pad(&a, 5)), GroupPoint::new(pad(&b, 5)), GroupPoint::new(pad(&c, 5)));
        let left = model.mul(&model.mul(&a, &b).unwrap(), &c).unwrap();
        let right = model.mul(&a, &model.mul(&b, &c).unwrap()).unwrap();
        prop_assert!(close(left.coords.as_slice(), right.coords.as_slice(), 1e-8));
    }

    #[test]
    fn heisenberg_law_in_exponential_coordinates(a in coords(3), b in coords(3)) {
        let model = GroupModel::heisenberg();
        let p = model.mul(&GroupPoint::new(a.clone()), &GroupPoint::new(b.clone())).unwrap();
        let expected = [a[0] + b[0], a[1] + b[1], a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0])];
        prop_assert!(close(p.coords.as_slice(), &expected, 1e-12));
        let round = model.exp(&model.log(&p).unwrap()).unwrap();
        prop_assert!(close(round.coords.as_slice(), p.coords.as_slice(), 1e-12));
    }

    #[test]
    fn hyperbolic_law(x in -3.0..3.0f64, y in 0.1..5.0f64, x2 in -3.0..3.0f64, y2 in 0.1..5.0f64) {
        let model = GroupModel::Hyperbolic;
        let p = model.mul(&GroupPoint::new([x, y]), &GroupPoint::new([x2, y2])).unwrap();
        prop_assert!(close(p.coords.as_slice(), &[x + y * x2, y * y2], 1e-12));
    }

    #[test]
    fn step_two_paths_match_the_reference_integrators(u in controls(3)) {
        let model = GroupModel::carnot(CarnotAlgebra::lorentz_step_two(2));
        let n = u.len();
        let traj = integrate(&model, &model.identity(), &ControlSignal::new(vectors(&u)).unwrap()).unwrap();
        let exact = step_two_path(&u, 1.0 / n as f64);
        for (p, q) in traj.points.iter().zip(&exact) {
            prop_assert!(close(p.coords.as_slice(), q, 1e-12));
        }
        let rk4 = step_two_rk4(&u, 1.0 / n as f64, 4);
        prop_assert!(close(traj.end().coords.as_slice(), &rk4, 1e-10));
        for i in 1..=2 {
            let planar: Vec<Vec<f64>> = exact.iter().map(|p| p[..3].to_vec()).collect();
            let area = shoelace(&planar, i);
            prop_assert!((oriented_area(&traj, i).unwrap() - area).abs() < 1e-10);
            prop_assert!((traj.end().coords[2 + i] - area).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_preserves_endpoint_and_length(u in timelike_controls(1)) {
        let model = GroupModel::heisenberg();
        let nu = AntinormSpec::standard_lorentz(1);
        let cone = ConeSpec::standard_lorentz(1);
        let coarse = ControlSignal::new(vectors(&u)).unwrap();
        let fine = coarse.refined();
        prop_assert_eq!(fine.segments(), 2 * coarse.segments());
        let a = integrate(&model, &model.identity(), &coarse).unwrap();
        let b = integrate(&model, &model.identity(), &fine).unwrap();
        prop_assert!(close(a.end().coords.as_slice(), b.end().coords.as_slice(), 1e-12));
        let la = sl_length(&nu, &cone, &coarse).unwrap().to_f64();
        let lb = sl_length(&nu, &cone, &fine).unwrap().to_f64();
        prop_assert!((la - lb).abs() < 1e-12 * (1.0 + la));
        let direct: f64 = u.iter().map(|v| minkowski_length(v).unwrap()).sum::<f64>() / u.len() as f64;
        prop_assert!((la - direct).abs() < 1e-12 * (1.0 + la));
        prop_assert!(admissibility_check(&cone, &coarse, 1e-9).unwrap().passed());
    }

    #[test]
    fn admissible_first_layers_stay_in_the_cone(u in timelike_controls(1)) {
        let model = GroupModel::heisenberg();
        let traj = integrate(&model, &model.identity(), &ControlSignal::new(vectors(&u)).unwrap()).unwrap();
        for p in &traj.points[1..] {
            prop_assert!(minkowski_length(&p.coords.as_slice()[..2]).is_some());
        }
    }

    #[test]
    fn hyperbolic_potential_is_path_independent(u in prop::collection::vec(coords(2), 1..10), b in 0.1..3.0f64) {
        let model = GroupModel::Hyperbolic;
        let x0 = GroupPoint::new([0.5, 2.0]);
        let traj = integrate(&model, &x0, &ControlSignal::new(vectors(&u)).unwrap()).unwrap();
        let form = TimeForm::hyperbolic(0.0, b).unwrap();
        let integral = form.line_integral(&traj).unwrap();
        let expected = b * (traj.end().coords[1] / x0.coords[1]).ln();
        prop_assert!((integral - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        // y-component: d(ln y) is the second control coordinate.
        let direct: f64 = u.iter().map(|v| v[1]).sum::<f64>() / u.len() as f64;
        prop_assert!((expected - b * direct).abs() < 1e-9 * (1.0 + expected.abs()));
    }

    #[test]
    fn left_invariant_forms_are_closed_on_abelian_groups(tau in coords(3), p in coords(3), v in coords(3), w in coords(3)) {
        let model = GroupModel::Abelian { dim: 3 };
        let form = TimeForm::left_invariant(&model, Covector::new(tau)).unwrap();
        let d = form.exterior_derivative_fd(&GroupPoint::new(p), &Vector::new(v), &Vector::new(w), 1e-3).unwrap();
        prop_assert!(d.abs() < 1e-9);
    }
}

fn pad(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n, 0.5);
    out
}
