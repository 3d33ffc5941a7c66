//! Longest paths by direct transcription.
//!
//! Controls are piecewise constant on `N` uniform segments and live in
//! cone coordinates where projection is closed-form. The endpoint
//! constraint is handled by an augmented Lagrangian; inner iterations are
//! spectral projected gradient steps with a nonmonotone line search, and
//! every run ends with a Gauss-Newton pass that drives the endpoint
//! residual to rounding level.

mod diagnostics;
mod params;

use nalgebra::{DMatrix, DVector};

use crate::cones::{AntinormSpec, ConeSpec};
use crate::dynamics::{endpoint_sensitivities, integrate, sl_length, ControlSignal, Trajectory};
use crate::error::{check_dim, Error, Result};
use crate::extreal::ExtReal;
use crate::groups::{GroupModel, GroupPoint};
use crate::linalg::Vector;
use crate::sampling::{rng_from_seed, SeededRng};
use crate::timeform::TimeForm;

pub use diagnostics::{check_hyperbolicity_desk, reachability_sample, sample_admissible_paths, HyperbolicityReport};
use params::AffineParam;

pub const DEFAULT_SEGMENTS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub model: GroupModel,
    /// Cone at the identity, in control coordinates.
    pub cone: ConeSpec,
    pub nu: AntinormSpec,
    pub x0: GroupPoint,
    pub x1: GroupPoint,
    pub segments: usize,
}

impl ProblemInstance {
    pub fn new(
        model: GroupModel,
        cone: ConeSpec,
        nu: AntinormSpec,
        x0: GroupPoint,
        x1: GroupPoint,
        segments: usize,
    ) -> Result<Self> {
        check_dim(model.control_dim(), cone.dim())?;
        if let Some(d) = nu.dim() {
            check_dim(cone.dim(), d)?;
        }
        model.validate(&x0)?;
        model.validate(&x1)?;
        if segments == 0 {
            return Err(Error::InvalidArgument("segment count must be at least 1".into()));
        }
        if !cone.is_pointed() {
            return Err(Error::NotPointed);
        }
        Ok(ProblemInstance { model, cone, nu, x0, x1, segments })
    }

    /// `x0^{-1} x1`: by left invariance every problem starts at the identity.
    pub fn relative_target(&self) -> Result<GroupPoint> {
        self.model.mul(&self.model.inv(&self.x0)?, &self.x1)
    }

    /// The part of `log(x0^{-1} x1)` that a constant control can account
    /// for: the first layer on Carnot groups, everything otherwise.
    pub fn abelianized_displacement(&self) -> Result<Vector> {
        let xi = self.model.log(&self.relative_target()?)?;
        Ok(match self.model.algebra() {
            Some(algebra) => algebra.first_layer_coords(&xi),
            None => xi,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-6, max_iter: 500, restarts: 8, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    NoAdmissiblePath,
    /// A feasible path was found but the iteration budget ran out first.
    MaxIterations,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::NoAdmissiblePath => "no_admissible_path",
            SolveStatus::MaxIterations => "max_iterations",
        }
    }
}

/// One outer iteration of the winning restart.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
    /// Best objective among feasible iterates so far.
    pub best_feasible: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: ExtReal,
    pub control: ControlSignal,
    pub trajectory: Trajectory,
    pub endpoint_residual: f64,
    pub iterations: usize,
    pub history: Vec<HistoryRecord>,
    /// Index of the start that produced the result (0 is the constant control).
    pub restart: Option<usize>,
    pub seed: u64,
}

/// `|log(end^{-1} x1)|`; on the hyperbolic plane `|(dx, d ln y)|`.
pub fn endpoint_residual(model: &GroupModel, end: &GroupPoint, x1: &GroupPoint) -> Result<f64> {
    match model {
        GroupModel::Hyperbolic => Ok((&model.chart(x1) - &model.chart(end)).norm()),
        _ => Ok(model.log(&model.mul(&model.inv(end)?, x1)?)?.norm()),
    }
}

/// `nu(x1 - x0)`: the exact distance on an abelian group.
pub fn abelian_closed_form(
    model: &GroupModel,
    nu: &AntinormSpec,
    cone: &ConeSpec,
    x0: &GroupPoint,
    x1: &GroupPoint,
) -> Result<ExtReal> {
    if !matches!(model, GroupModel::Abelian { .. }) {
        return Err(Error::WrongModel("closed form needs an abelian model".into()));
    }
    model.validate(x0)?;
    model.validate(x1)?;
    nu.eval(cone, &(&x1.coords - &x0.coords))
}

/// `nu` of the first layer of `log(x0^{-1} x1)`. Dominates every admissible
/// objective on Carnot (and abelian) groups; `-inf` certifies that no
/// admissible path exists.
pub fn abelianized_upper_bound(prob: &ProblemInstance) -> Result<ExtReal> {
    if matches!(prob.model, GroupModel::Hyperbolic) {
        return Err(Error::WrongModel("the abelianized bound needs a Carnot model".into()));
    }
    prob.nu.eval(&prob.cone, &prob.abelianized_displacement()?)
}

/// The transcribed problem: objective `sum h nu(u_k)` and endpoint residual
/// `chart(prod exp(h u_k)) - chart(x0^{-1} x1)`, with analytic derivatives.
#[derive(Debug, Clone)]
pub struct Transcription {
    model: GroupModel,
    nu: AntinormSpec,
    target: Vector,
    horizon: f64,
    segments: usize,
}

impl Transcription {
    pub fn new(prob: &ProblemInstance, horizon: f64) -> Result<Self> {
        Ok(Transcription {
            model: prob.model.clone(),
            nu: prob.nu.clone(),
            target: prob.model.chart(&prob.relative_target()?),
            horizon,
            segments: prob.segments,
        })
    }

    fn signal(&self, u: &[Vector]) -> Result<ControlSignal> {
        check_dim(self.segments, u.len())?;
        ControlSignal::with_horizon(u.to_vec(), self.horizon)
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.segments as f64
    }

    /// Objective with `nu` evaluated by its formula (controls assumed in the cone).
    pub fn objective(&self, u: &[Vector]) -> f64 {
        u.iter().map(|uk| self.step() * self.nu.value_on_cone(uk)).sum()
    }

    /// Per-segment (super)gradient of the objective.
    pub fn objective_gradient(&self, u: &[Vector]) -> Vec<Vector> {
        u.iter().map(|uk| ascent_direction(&self.nu, uk).scale(self.step())).collect()
    }

    pub fn residual(&self, u: &[Vector]) -> Result<Vector> {
        let signal = self.signal(u)?;
        let traj = integrate(&self.model, &self.model.identity(), &signal)?;
        Ok(&self.model.chart(traj.end()) - &self.target)
    }

    /// Residual and its Jacobian with respect to each segment's control.
    pub fn residual_jacobian(&self, u: &[Vector]) -> Result<(Vector, Vec<DMatrix<f64>>)> {
        let (end, jac) = endpoint_sensitivities(&self.model, &self.signal(u)?)?;
        Ok((&self.model.chart(&end) - &self.target, jac))
    }
}

/// Supergradient of `nu`, with the Lorentz gradient capped near the light cone.
fn ascent_direction(nu: &AntinormSpec, u: &Vector) -> Vector {
    match nu {
        AntinormSpec::LorentzSqrt { form } => {
            let gu = Vector::from_dvector(&(form * u.to_dvector()));
            let floor = 1e-8 * u.norm().max(f64::MIN_POSITIVE);
            gu.scale(1.0 / nu.value_on_cone(u).max(floor))
        }
        _ => nu.supergradient(u).unwrap_or_else(|| Vector::zeros(u.dim())),
    }
}

/// Longest path between `x0` and `x1` over the time interval `[0, 1]`.
pub fn solve_longest(prob: &ProblemInstance, opts: &SolveOptions) -> Result<SolveReport> {
    let param = AffineParam::for_cone(&prob.cone)?;
    solve_with(prob, &param, 1.0, opts)
}

/// The same problem posed in the time parameter: controls on the unit
/// section `tau = 1` over the fixed horizon `s1 = T(x0^{-1} x1)`.
pub fn solve_reparametrized(prob: &ProblemInstance, form: &TimeForm, opts: &SolveOptions) -> Result<SolveReport> {
    if form.model() != prob.model {
        return Err(Error::WrongModel("time form and problem live on different models".into()));
    }
    let s1 = form.potential(&prob.relative_target()?)?;
    let param = AffineParam::for_section(&prob.cone, &form.on_controls())?;
    if s1 <= 0.0 {
        return Ok(unreachable_report(prob, 1.0, opts, &prob.abelianized_displacement()?)?);
    }
    solve_with(prob, &param, s1, opts)
}

fn unreachable_report(prob: &ProblemInstance, horizon: f64, opts: &SolveOptions, xi: &Vector) -> Result<SolveReport> {
    let control = ControlSignal::with_horizon(vec![xi.scale(1.0 / horizon); prob.segments], horizon)?;
    let trajectory = integrate(&prob.model, &prob.x0, &control)?;
    let endpoint_residual = endpoint_residual(&prob.model, trajectory.end(), &prob.x1)?;
    Ok(SolveReport {
        status: SolveStatus::NoAdmissiblePath,
        objective: ExtReal::NegInf,
        control,
        trajectory,
        endpoint_residual,
        iterations: 0,
        history: Vec::new(),
        restart: None,
        seed: opts.seed,
    })
}

struct Candidate {
    p: Vec<f64>,
    objective: f64,
    residual: f64,
    converged: bool,
    iterations: usize,
    history: Vec<HistoryRecord>,
    restart: usize,
}

fn solve_with(prob: &ProblemInstance, param: &AffineParam, horizon: f64, opts: &SolveOptions) -> Result<SolveReport> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 || opts.restarts == 0 {
        return Err(Error::InvalidArgument("tol, max_iter and restarts must be positive".into()));
    }
    let xi = prob.abelianized_displacement()?;
    let carnot_like = !matches!(prob.model, GroupModel::Hyperbolic);
    if carnot_like && !prob.cone.contains(&xi, crate::cones::DEFAULT_TOL)? {
        return unreachable_report(prob, horizon, opts, &xi);
    }

    let run = Run::new(prob, param, horizon, opts)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut candidates = Vec::with_capacity(opts.restarts);
    for restart in 0..opts.restarts {
        let start = if restart == 0 {
            run.constant_start(&xi.scale(1.0 / horizon))
        } else {
            Some(run.random_start(&mut rng, &xi))
        };
        if let Some(p0) = start {
            candidates.push(run.optimize(p0, restart)?);
        }
    }

    let feasible = |c: &Candidate| c.residual <= opts.tol;
    let best = candidates
        .iter()
        .filter(|c| feasible(c))
        .min_by(|a, b| {
            b.objective.total_cmp(&a.objective).then(a.residual.total_cmp(&b.residual)).then(a.restart.cmp(&b.restart))
        })
        .or_else(|| candidates.iter().min_by(|a, b| a.residual.total_cmp(&b.residual).then(a.restart.cmp(&b.restart))));
    let Some(best) = best else {
        return unreachable_report(prob, horizon, opts, &xi);
    };

    let control = ControlSignal::with_horizon(run.controls(&best.p), horizon)?;
    let mut trajectory = integrate(&prob.model, &prob.x0, &control)?;
    trajectory.attach_objective(&prob.nu, &prob.cone)?;
    let endpoint_residual = endpoint_residual(&prob.model, trajectory.end(), &prob.x1)?;
    let solved = feasible(best);
    let status = match (solved, best.converged) {
        (false, _) => SolveStatus::NoAdmissiblePath,
        (true, true) => SolveStatus::Solved,
        (true, false) => SolveStatus::MaxIterations,
    };
    let objective = if solved { sl_length(&prob.nu, &prob.cone, &control)? } else { ExtReal::NegInf };
    Ok(SolveReport {
        status,
        objective,
        control,
        trajectory,
        endpoint_residual,
        iterations: best.iterations,
        history: best.history.clone(),
        restart: Some(best.restart),
        seed: opts.seed,
    })
}

const INNER_ITERATIONS: usize = 60;
const NONMONOTONE_MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;

/// State shared by the restarts of one solve.
struct Run<'a> {
    prob: &'a ProblemInstance,
    param: &'a AffineParam,
    tr: Transcription,
    q: usize,
    tol: f64,
    max_iter: usize,
    nudge: bool,
}

impl<'a> Run<'a> {
    fn new(prob: &'a ProblemInstance, param: &'a AffineParam, horizon: f64, opts: &SolveOptions) -> Result<Self> {
        Ok(Run {
            prob,
            param,
            tr: Transcription::new(prob, horizon)?,
            q: param.param_dim(),
            tol: opts.tol,
            max_iter: opts.max_iter,
            nudge: matches!(prob.nu, AntinormSpec::LorentzSqrt { .. }),
        })
    }

    fn n(&self) -> usize {
        self.prob.segments
    }

    fn controls(&self, p: &[f64]) -> Vec<Vector> {
        p.chunks(self.q.max(1)).take(self.n()).map(|b| self.param.control(b)).collect()
    }

    fn blocks_mut<'p>(&self, p: &'p mut [f64]) -> impl Iterator<Item = &'p mut [f64]> {
        p.chunks_mut(self.q.max(1))
    }

    fn project(&self, p: &mut [f64]) {
        if self.q == 0 {
            return;
        }
        let set = &self.param.set;
        self.blocks_mut(p).for_each(|b| set.project(b));
    }

    fn constant_start(&self, u: &Vector) -> Option<Vec<f64>> {
        let block = self.param.coordinates(u, 1e-9)?;
        Some(block.iter().copied().cycle().take(self.q * self.n()).collect())
    }

    fn random_start(&self, rng: &mut SeededRng, xi: &Vector) -> Vec<f64> {
        let mut p: Vec<f64> = (0..self.n()).flat_map(|_| self.param.set.sample(rng)).collect();
        if matches!(self.param.set, params::ParamSet::Orthant(_) | params::ParamSet::SecondOrder(_)) {
            // Match the average speed to the displacement.
            let mean: f64 = self.controls(&p).iter().map(Vector::norm).sum::<f64>() / self.n() as f64;
            let want = xi.norm() / self.tr.horizon;
            if mean > 0.0 && want > 0.0 {
                p.iter_mut().for_each(|x| *x *= want / mean);
            }
        }
        p
    }

    fn objective(&self, p: &[f64]) -> f64 {
        self.tr.objective(&self.controls(p))
    }

    fn residual(&self, p: &[f64]) -> Result<Vector> {
        self.tr.residual(&self.controls(p))
    }

    /// Reported residual of the full path from `x0`.
    fn report_residual(&self, p: &[f64]) -> Result<f64> {
        let signal = ControlSignal::with_horizon(self.controls(p), self.tr.horizon)?;
        let traj = integrate(&self.prob.model, &self.prob.x0, &signal)?;
        endpoint_residual(&self.prob.model, traj.end(), &self.prob.x1)
    }

    fn lagrangian(&self, p: &[f64], lambda: &DVector<f64>, mu: f64) -> Result<f64> {
        let r = self.residual(p)?.to_dvector();
        Ok(self.objective(p) - lambda.dot(&r) - 0.5 * mu * r.norm_squared())
    }

    fn lagrangian_gradient(&self, p: &[f64], lambda: &DVector<f64>, mu: f64) -> Result<(f64, Vec<f64>)> {
        let u = self.controls(p);
        let (r, jac) = self.tr.residual_jacobian(&u)?;
        let r = r.to_dvector();
        let weight = lambda + &r * mu;
        let gf = self.tr.objective_gradient(&u);
        let mut g = Vec::with_capacity(p.len());
        for k in 0..self.n() {
            let gu = gf[k].to_dvector() - jac[k].transpose() * &weight;
            g.extend(self.param.pullback(&gu).iter());
        }
        let value = self.tr.objective(&u) - lambda.dot(&r) - 0.5 * mu * r.norm_squared();
        Ok((value, g))
    }

    /// Jacobian of the residual with respect to all parameters.
    fn residual_jacobian_params(&self, p: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let (r, jac) = self.tr.residual_jacobian(&self.controls(p))?;
        let d = r.dim();
        let mut full = DMatrix::zeros(d, p.len());
        for (k, jk) in jac.iter().enumerate() {
            let block = jk * &self.param.matrix;
            full.view_mut((0, k * self.q), (d, self.q)).copy_from(&block);
        }
        Ok((r.to_dvector(), full))
    }

    /// Least-squares multipliers `argmin |grad f - J^T lambda|` over the
    /// parameters that are free (off the boundary of their set).
    fn multiplier_estimate(&self, p: &[f64]) -> Result<Option<DVector<f64>>> {
        let u = self.controls(p);
        let (_, j) = self.residual_jacobian_params(p)?;
        let mut gf = Vec::with_capacity(p.len());
        for (k, g) in self.tr.objective_gradient(&u).iter().enumerate() {
            let free = self.param.set.depth(&p[k * self.q..(k + 1) * self.q]) > 1e-6;
            let block = self.param.pullback(&g.to_dvector());
            gf.extend(block.iter().map(|x| if free { *x } else { 0.0 }));
        }
        let gf = DVector::from_vec(gf);
        let jjt = &j * j.transpose();
        Ok(jjt.cholesky().map(|c| c.solve(&(&j * gf))))
    }

    /// Minimum-norm Gauss-Newton steps on the endpoint residual.
    fn polish(&self, p: &mut Vec<f64>) -> Result<()> {
        if self.q == 0 {
            return Ok(());
        }
        let target_scale = 1.0 + self.tr.target.norm();
        for _ in 0..40 {
            let (r, j) = self.residual_jacobian_params(p)?;
            let norm = r.norm();
            if norm <= 1e-14 * target_scale {
                break;
            }
            let jjt = &j * j.transpose() + DMatrix::identity(r.len(), r.len()) * (1e-14 * (1.0 + j.norm_squared()));
            let Some(chol) = jjt.cholesky() else { break };
            let step = j.transpose() * chol.solve(&r);
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
                self.project(&mut trial);
                if self.residual(&trial)?.norm() < norm {
                    *p = trial;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Ok(())
    }

    /// Keeps every block at least `eps^2 / 2` deep inside its set, so that
    /// `nu(u) / |u|` stays of order `eps` and the gradient of `nu` finite.
    fn nudge(&self, p: &mut [f64], eps: f64) {
        if !self.nudge || self.q == 0 {
            return;
        }
        let set = &self.param.set;
        self.blocks_mut(p).for_each(|b| set.nudge(b, 0.5 * eps * eps));
    }

    fn inner(&self, p: &mut Vec<f64>, lambda: &DVector<f64>, mu: f64) -> Result<()> {
        let (mut value, mut g) = self.lagrangian_gradient(p, lambda, mu)?;
        let scale = p.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if gmax == 0.0 {
            return Ok(());
        }
        let mut alpha = 0.1 * scale / gmax;
        let mut memory = vec![value];
        for _ in 0..INNER_ITERATIONS {
            let mut target: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + alpha * b).collect();
            self.project(&mut target);
            let d: Vec<f64> = target.iter().zip(p.iter()).map(|(a, b)| a - b).collect();
            let dmax = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if dmax <= 1e-12 * scale {
                break;
            }
            let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let reference = memory.iter().copied().fold(f64::INFINITY, f64::min);
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial: Vec<f64> = p.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let v = self.lagrangian(&trial, lambda, mu)?;
                if v >= reference + ARMIJO * t * slope {
                    accepted = Some(trial);
                    break;
                }
                t *= 0.5;
            }
            let Some(next) = accepted else { break };
            let (next_value, next_g) = self.lagrangian_gradient(&next, lambda, mu)?;
            let s: Vec<f64> = next.iter().zip(p.iter()).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(next_g.iter().zip(&g)).map(|(si, (a, b))| si * (a - b)).sum();
            let ss: f64 = s.iter().map(|x| x * x).sum();
            alpha = if sy < 0.0 { (ss / -sy).clamp(1e-12, 1e12) } else { 1e3 * scale / gmax.max(1e-300) };
            let improvement = next_value - value;
            *p = next;
            value = next_value;
            g = next_g;
            memory.push(value);
            if memory.len() > NONMONOTONE_MEMORY {
                memory.remove(0);
            }
            if improvement.abs() <= 1e-15 * value.abs().max(1.0) {
                break;
            }
        }
        Ok(())
    }

    fn optimize(&self, mut p: Vec<f64>, restart: usize) -> Result<Candidate> {
        self.project(&mut p);
        self.polish(&mut p)?;
        let d = self.tr.target.dim();
        let mut lambda = DVector::zeros(d);
        let mut mu = 10.0;
        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        let mut history = Vec::new();
        let mut previous_norm = f64::INFINITY;
        let mut previous_objective = f64::NAN;
        let mut quiet = 0;
        let mut converged = false;
        let mut iterations = 0;

        let consider = |p: &[f64], objective: f64, residual: f64, best: &mut Option<(f64, f64, Vec<f64>)>| {
            if residual <= self.tol && best.as_ref().is_none_or(|(b, _, _)| objective > *b) {
                *best = Some((objective, residual, p.to_vec()));
            }
        };
        let start_residual = self.report_residual(&p)?;
        consider(&p, self.objective(&p), start_residual, &mut best);

        for k in 1..=self.max_iter {
            iterations = k;
            self.nudge(&mut p, 0.1 / k as f64);
            self.inner(&mut p, &lambda, mu)?;
            let r = self.residual(&p)?.to_dvector();
            lambda += &r * mu;
            let norm = r.norm();
            if norm > 0.25 * previous_norm && norm > self.tol {
                mu = (mu * 10.0).min(1e4);
            }
            previous_norm = norm;
            self.polish(&mut p)?;
            if let Some(estimate) = self.multiplier_estimate(&p)? {
                lambda = estimate;
            }
            let objective = self.objective(&p);
            let residual = self.report_residual(&p)?;
            consider(&p, objective, residual, &mut best);
            history.push(HistoryRecord {
                iteration: k,
                objective,
                residual,
                best_feasible: best.as_ref().map(|b| b.0),
            });
            let stable = (objective - previous_objective).abs() <= 1e-7 * objective.abs().max(1.0);
            quiet = if residual <= self.tol && stable { quiet + 1 } else { 0 };
            previous_objective = objective;
            if quiet >= 2 {
                converged = true;
                break;
            }
        }

        self.polish(&mut p)?;
        let residual = self.report_residual(&p)?;
        consider(&p, self.objective(&p), residual, &mut best);
        let (p, objective, residual) = match best {
            Some((objective, residual, p)) => (p, objective, residual),
            None => {
                let objective = self.objective(&p);
                (p, objective, residual)
            }
        };
        Ok(Candidate { p, objective, residual, converged, iterations, history, restart })
    }
}

#[cfg(test)]
mod tests;
