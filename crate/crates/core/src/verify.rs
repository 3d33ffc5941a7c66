//! A runtime invariant suite over all modules, summarized per invariant.

use rand::Rng;

use crate::cones::{check_antinorm_axioms, check_axioms_with, AntinormSpec, ConeSpec};
use crate::dynamics::{integrate, oriented_area, ControlSignal};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use crate::linalg::{Covector, Vector};
use crate::presets::{Preset, PRESET_NAMES};
use crate::sampling::{rng_from_seed, standard_normal, SeededRng};
use crate::solver::{
    abelian_closed_form, abelianized_upper_bound, check_hyperbolicity_desk, solve_longest, ProblemInstance,
    SolveOptions, SolveStatus,
};
use crate::timeform::{check_growth_condition, TimeForm};

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResult {
    pub module: &'static str,
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
}

impl InvariantResult {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub results: Vec<InvariantResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(InvariantResult::ok)
    }
}

struct Suite {
    results: Vec<InvariantResult>,
}

impl Suite {
    fn record<I: IntoIterator<Item = bool>>(&mut self, module: &'static str, name: &'static str, outcomes: I) {
        let (mut trials, mut passed) = (0, 0);
        for ok in outcomes {
            trials += 1;
            passed += usize::from(ok);
        }
        self.results.push(InvariantResult { module, name, trials, passed });
    }
}

fn random_vector(rng: &mut SeededRng, dim: usize) -> Vector {
    Vector::new((0..dim).map(|_| standard_normal(rng)).collect())
}

fn random_control(rng: &mut SeededRng, cone: &ConeSpec, max_segments: usize) -> Result<ControlSignal> {
    let n = rng.gen_range(1..=max_segments);
    ControlSignal::new((0..n).map(|_| cone.sample(rng, false)).collect())
}

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Runs every invariant with a fixed sample budget. Deterministic given `seed`.
pub fn run_invariant_suite(seed: u64) -> Result<SuiteReport> {
    let mut suite = Suite { results: Vec::new() };
    let mut rng = rng_from_seed(seed);
    cone_invariants(&mut suite, &mut rng, seed)?;
    group_invariants(&mut suite, &mut rng)?;
    timeform_invariants(&mut suite, &mut rng, seed)?;
    dynamics_invariants(&mut suite, &mut rng)?;
    solver_invariants(&mut suite, &mut rng, seed)?;
    Ok(SuiteReport { seed, results: suite.results })
}

fn cone_invariants(suite: &mut Suite, rng: &mut SeededRng, seed: u64) -> Result<()> {
    let lorentz = ConeSpec::standard_lorentz(2);
    let report = check_antinorm_axioms(&AntinormSpec::standard_lorentz(2), &lorentz, 2000, seed)?;
    suite.record("cones", "lorentz antinorm axioms", [report.passed()]);

    let wedge = ConeSpec::polyhedral(vec![Vector::from([1.0, 1.0]), Vector::from([1.0, -1.0])])?;
    let family = AntinormSpec::min_of_linear(vec![Covector::new(vec![1.0, 1.0]), Covector::new(vec![1.0, -1.0])])?;
    let report = check_antinorm_axioms(&family, &wedge, 2000, seed)?;
    suite.record("cones", "min-of-linear antinorm axioms", [report.passed()]);

    let euclidean = check_axioms_with(&ConeSpec::standard_lorentz(1), 500, seed, |v| ExtReal::Finite(v.norm()))?;
    suite.record("cones", "euclidean candidate rejected", [euclidean.first_counterexample.is_some()]);

    let mut outcomes = Vec::new();
    for _ in 0..50 {
        // A random pointed cone: generators in the open upper half plane.
        let k = rng.gen_range(1..=5);
        let gens: Vec<Vector> = (0..k)
            .map(|_| {
                let angle = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
                Vector::from([angle.cos(), angle.sin(), rng.gen_range(-0.5..0.5)])
            })
            .collect();
        let cone = ConeSpec::polyhedral(gens.clone())?;
        let ok = match cone.find_time_covector() {
            Ok(t) => t.margin > 1e-12 && gens.iter().all(|g| t.covector.apply(g) > 0.0),
            Err(_) => false,
        };
        outcomes.push(ok);
    }
    suite.record("cones", "time covector positive on generators", outcomes);

    let outcomes: Vec<bool> = (0..1000)
        .map(|_| {
            let v = random_vector(rng, 3);
            let direct = v[0] >= (v[1] * v[1] + v[2] * v[2]).sqrt();
            let boundary = (v[0] - (v[1] * v[1] + v[2] * v[2]).sqrt()).abs() < 1e-6 * v.norm();
            boundary || lorentz.contains(&v, 1e-9).unwrap_or(!direct) == direct
        })
        .collect();
    suite.record("cones", "lorentz membership matches sign test", outcomes);
    Ok(())
}

fn group_invariants(suite: &mut Suite, rng: &mut SeededRng) -> Result<()> {
    let models = [
        GroupModel::heisenberg(),
        GroupModel::carnot(CarnotAlgebra::lorentz_step_two(2)),
        GroupModel::carnot(CarnotAlgebra::filiform(4)),
    ];
    let mut outcomes = Vec::new();
    for model in &models {
        for _ in 0..50 {
            let [a, b, c] = [0, 1, 2].map(|_| GroupPoint::new(random_vector(rng, model.dim())));
            let left = model.mul(&model.mul(&a, &b)?, &c)?;
            let right = model.mul(&a, &model.mul(&b, &c)?)?;
            outcomes.push(close(&left.coords, &right.coords, 1e-12));
        }
    }
    for _ in 0..50 {
        let p = |rng: &mut SeededRng| GroupPoint::new([standard_normal(rng), standard_normal(rng).exp()]);
        let (a, b, c) = (p(rng), p(rng), p(rng));
        let g = GroupModel::Hyperbolic;
        let left = g.mul(&g.mul(&a, &b)?, &c)?;
        let right = g.mul(&a, &g.mul(&b, &c)?)?;
        outcomes.push(close(&left.coords, &right.coords, 1e-12));
    }
    suite.record("groups", "associativity", outcomes);

    let heis = CarnotAlgebra::lorentz_step_two(2);
    let outcomes: Vec<bool> = (0..100)
        .map(|_| {
            let (a, b) = (random_vector(rng, 5), random_vector(rng, 5));
            let expected = &(&a + &b) + &heis.bracket(&a, &b).scale(0.5);
            heis.bch(&a, &b).map(|c| close(&c, &expected, 1e-14)).unwrap_or(false)
        })
        .collect();
    suite.record("groups", "step-two product is a + b + [a,b]/2", outcomes);

    let mut outcomes = Vec::new();
    for model in models.iter().chain([&GroupModel::Hyperbolic]) {
        for _ in 0..50 {
            let xi = random_vector(rng, model.dim());
            let p = model.exp(&xi)?;
            outcomes.push(close(&model.log(&p)?, &xi, 1e-12));
            let v = random_vector(rng, model.dim());
            outcomes.push(close(&model.pull_back(&p, &model.push_forward(&p, &v)?)?, &v, 1e-12));
        }
    }
    suite.record("groups", "exp/log and translation round trips", outcomes);
    Ok(())
}

fn timeform_invariants(suite: &mut Suite, rng: &mut SeededRng, seed: u64) -> Result<()> {
    let curved = TimeForm::hyperbolic(1.0, 0.0)?;
    let flat = TimeForm::hyperbolic(0.0, 1.0)?;
    let (e1, e2) = (Vector::from([1.0, 0.0]), Vector::from([0.0, 1.0]));
    let mut outcomes = Vec::new();
    for _ in 0..20 {
        let y = rng.gen_range(0.5..3.0);
        let p = GroupPoint::new([rng.gen_range(-2.0..2.0), y]);
        let d = curved.exterior_derivative_fd(&p, &e1, &e2, 1e-3)?;
        outcomes.push((d - 1.0 / (y * y)).abs() <= 1e-4);
        outcomes.push(flat.exterior_derivative_fd(&p, &e1, &e2, 1e-3)?.abs() <= 1e-8);
    }
    suite.record("timeform", "closedness of (a dx + b dy)/y", outcomes);

    let model = GroupModel::carnot(CarnotAlgebra::lorentz_step_two(2));
    let cone = ConeSpec::standard_lorentz(2);
    let form = TimeForm::left_invariant(&model, Covector::new(vec![1.0, 0.2, -0.1]))?;
    let mut outcomes = Vec::new();
    for _ in 0..100 {
        let u = random_control(rng, &cone, 8)?;
        let traj = integrate(&model, &model.identity(), &u)?;
        let s = form.line_integral(&traj)?;
        outcomes.push((s - form.potential(traj.end())?).abs() <= 1e-8 * (1.0 + s.abs()));
    }
    suite.record("timeform", "line integral equals potential", outcomes);

    let mut outcomes = Vec::new();
    for name in PRESET_NAMES {
        let preset = Preset::by_name(name)?;
        let metric = preset.model.natural_metric();
        outcomes.push(check_growth_condition(&preset.form, &preset.cone, &metric, 256, seed)?.passed());
    }
    suite.record("timeform", "growth condition on presets", outcomes);
    Ok(())
}

fn dynamics_invariants(suite: &mut Suite, rng: &mut SeededRng) -> Result<()> {
    let mut stokes = Vec::new();
    let mut inclusion = Vec::new();
    let mut refinement = Vec::new();
    for r in [1, 2] {
        let model = GroupModel::carnot(CarnotAlgebra::lorentz_step_two(r));
        let cone = ConeSpec::standard_lorentz(r);
        for _ in 0..100 {
            let u = random_control(rng, &cone, 8)?;
            let traj = integrate(&model, &model.identity(), &u)?;
            let end = &traj.end().coords;
            for i in 1..=r {
                let area = oriented_area(&traj, i)?;
                stokes.push((end[r + i] - area).abs() <= 1e-8 * (1.0 + area.abs()));
            }
            let first = Vector::new(end.as_slice()[..=r].to_vec());
            inclusion.push(close(&first, &u.displacement(), 1e-12));
            let fine = integrate(&model, &model.identity(), &u.refined())?;
            refinement.push(close(&fine.end().coords, end, 1e-12));
        }
    }
    suite.record("dynamics", "second layer equals oriented area", stokes);
    suite.record("dynamics", "first layer equals control average", inclusion);
    suite.record("dynamics", "refinement leaves endpoint unchanged", refinement);

    let model = GroupModel::carnot(CarnotAlgebra::lorentz_step_two(2));
    let cone = ConeSpec::standard_lorentz(2);
    let mut outcomes = Vec::new();
    for _ in 0..20 {
        let u = random_control(rng, &cone, 8)?;
        let exact = integrate(&model, &model.identity(), &u)?;
        outcomes.push(close(&rk4_step_two(2, &u, 64), &exact.end().coords, 1e-8));
    }
    suite.record("dynamics", "exact steps agree with RK4", outcomes);
    Ok(())
}

/// RK4 on `x' = u`, `y_i' = (x0 u_i - x_i u0) / 2` with `substeps` per segment.
fn rk4_step_two(r: usize, u: &ControlSignal, substeps: usize) -> Vector {
    let rhs = |s: &[f64], c: &Vector| -> Vec<f64> {
        let mut d = vec![0.0; 2 * r + 1];
        d[..=r].copy_from_slice(c.as_slice());
        for i in 1..=r {
            d[r + i] = 0.5 * (s[0] * c[i] - s[i] * c[0]);
        }
        d
    };
    let mut s = vec![0.0; 2 * r + 1];
    let h = u.step() / substeps as f64;
    for c in u.values() {
        for _ in 0..substeps {
            let add = |a: &[f64], b: &[f64], t: f64| a.iter().zip(b).map(|(x, y)| x + t * y).collect::<Vec<_>>();
            let k1 = rhs(&s, c);
            let k2 = rhs(&add(&s, &k1, h / 2.0), c);
            let k3 = rhs(&add(&s, &k2, h / 2.0), c);
            let k4 = rhs(&add(&s, &k3, h), c);
            for j in 0..s.len() {
                s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
    }
    Vector::new(s)
}

fn solver_invariants(suite: &mut Suite, rng: &mut SeededRng, seed: u64) -> Result<()> {
    let opts = SolveOptions { restarts: 3, seed, ..SolveOptions::default() };
    let mink = Preset::by_name("minkowski11")?;
    let mut oracle = Vec::new();
    let mut feasible = Vec::new();
    for _ in 0..5 {
        let t = rng.gen_range(1.0..6.0);
        let x = rng.gen_range(-0.8..0.8) * t;
        let x1 = GroupPoint::new([t, x]);
        let prob = ProblemInstance::new(
            mink.model.clone(),
            mink.cone.clone(),
            mink.nu.clone(),
            mink.x0.clone(),
            x1.clone(),
            50,
        )?;
        let report = solve_longest(&prob, &opts)?;
        let exact = abelian_closed_form(&prob.model, &prob.nu, &prob.cone, &prob.x0, &x1)?.to_f64();
        oracle.push((report.objective.to_f64() - exact).abs() <= 1e-3 * exact);
        feasible.push(report.status == SolveStatus::Solved && report.endpoint_residual <= opts.tol);
    }
    suite.record("solver", "abelian oracle agreement", oracle);

    let heis = Preset::by_name("heisenberg-sl")?;
    let mut dominance = Vec::new();
    for _ in 0..5 {
        let u = random_control(rng, &heis.cone, 4)?;
        let x1 = integrate(&heis.model, &heis.x0, &u)?.end().clone();
        let prob =
            ProblemInstance::new(heis.model.clone(), heis.cone.clone(), heis.nu.clone(), heis.x0.clone(), x1, 30)?;
        let report = solve_longest(&prob, &opts)?;
        let bound = abelianized_upper_bound(&prob)?;
        dominance.push(report.objective <= ExtReal::Finite(bound.to_f64() + 1e-9));
        feasible.push(report.status != SolveStatus::NoAdmissiblePath && report.endpoint_residual <= opts.tol);
    }
    suite.record("solver", "abelianized bound dominance", dominance);
    suite.record("solver", "reported paths are feasible", feasible);

    let mut outcomes = Vec::new();
    for preset in [&mink, &heis] {
        outcomes.push(check_hyperbolicity_desk(&preset.problem()?, &preset.form, 2000, seed)?.passed());
    }
    suite.record("solver", "potential increases and band stays bounded", outcomes);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let report = run_invariant_suite(0).unwrap();
        let failing: Vec<_> = report.results.iter().filter(|r| !r.ok()).collect();
        assert!(failing.is_empty(), "{failing:?}");
        assert_eq!(report, run_invariant_suite(0).unwrap());
    }
}
