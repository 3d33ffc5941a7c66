//! Sampled reachable sets and desk checks of global hyperbolicity.

use rand::Rng;

use super::ProblemInstance;
use crate::cones::ConeSpec;
use crate::dynamics::{integrate, ControlSignal, Trajectory};
use crate::error::{check_dim, Result};
use crate::groups::{GroupModel, GroupPoint};
use crate::sampling::rng_from_seed;
use crate::timeform::{TimeForm, UnitTimeSection};

const MAX_SAMPLED_SEGMENTS: usize = 8;

/// Random admissible paths from `x0`: 1 to 8 segments over `[0, 1]`, cone
/// samples with log-uniform magnitudes. Deterministic given `seed`.
pub fn sample_admissible_paths(
    model: &GroupModel,
    cone: &ConeSpec,
    x0: &GroupPoint,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    check_dim(model.control_dim(), cone.dim())?;
    model.validate(x0)?;
    let mut rng = rng_from_seed(seed);
    let mut paths = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let segments = rng.gen_range(1..=MAX_SAMPLED_SEGMENTS);
        let values = (0..segments).map(|_| cone.sample(&mut rng, false)).collect();
        paths.push(integrate(model, x0, &ControlSignal::new(values)?)?);
    }
    Ok(paths)
}

/// Endpoints of [`sample_admissible_paths`]: a point cloud in the
/// reachable set of `x0`.
pub fn reachability_sample(
    model: &GroupModel,
    cone: &ConeSpec,
    x0: &GroupPoint,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<GroupPoint>> {
    Ok(sample_admissible_paths(model, cone, x0, n_samples, seed)?.into_iter().map(|t| t.end().clone()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicityReport {
    pub samples: usize,
    /// Paths of positive time duration along which the potential failed to
    /// increase strictly (each would close up into a loop if continued).
    pub non_increasing: usize,
    /// `T(x1) - T(x0)`.
    pub potential_gap: f64,
    /// `sup |xi|` over the unit time section at `x0`.
    pub section_sup: f64,
    /// Bound on the length of any admissible path from `x0` that stays
    /// below `T(x1)`: `potential_gap * section_sup`.
    pub radius: f64,
    /// Samples ending in the band `T(x0) <= T <= T(x1)`.
    pub in_band: usize,
    /// Longest metric length among in-band samples.
    pub max_in_band_length: f64,
    /// In-band samples longer than `radius`.
    pub radius_violations: usize,
}

impl HyperbolicityReport {
    pub fn passed(&self) -> bool {
        self.non_increasing == 0 && self.radius_violations == 0 && self.radius.is_finite()
    }
}

/// Samples admissible paths from `x0` and checks that the potential of the
/// exact form strictly increases along them, and that those ending below
/// `T(x1)` stay within the radius forced by the unit time section.
pub fn check_hyperbolicity_desk(
    prob: &ProblemInstance,
    form: &TimeForm,
    n_samples: usize,
    seed: u64,
) -> Result<HyperbolicityReport> {
    let model = &prob.model;
    let t0 = form.potential(&prob.x0)?;
    let t1 = form.potential(&prob.x1)?;
    let metric = model.natural_metric();
    let section = UnitTimeSection::new(prob.cone.clone(), form.clone(), prob.x0.clone())?;
    let section_sup = section.sup_norm(&metric, 256, seed)?;
    let potential_gap = t1 - t0;
    let radius = potential_gap.max(0.0) * section_sup;

    let mut report = HyperbolicityReport {
        samples: n_samples,
        non_increasing: 0,
        potential_gap,
        section_sup,
        radius,
        in_band: 0,
        max_in_band_length: 0.0,
        radius_violations: 0,
    };
    for traj in sample_admissible_paths(model, &prob.cone, &prob.x0, n_samples, seed)? {
        let duration = form.line_integral(&traj)?;
        let end_potential = form.potential(traj.end())?;
        if duration > 1e-12 && end_potential <= t0 {
            report.non_increasing += 1;
        }
        if end_potential >= t0 && end_potential <= t1 {
            report.in_band += 1;
            let length = metric_length(model, &metric, &traj)?;
            report.max_in_band_length = report.max_in_band_length.max(length);
            if length > radius * (1.0 + 1e-12) + 1e-12 {
                report.radius_violations += 1;
            }
        }
    }
    Ok(report)
}

/// Length of a piecewise-constant path in a left-invariant metric.
fn metric_length(model: &GroupModel, metric: &crate::groups::RiemannianMetric, traj: &Trajectory) -> Result<f64> {
    let mut length = 0.0;
    for (k, u) in traj.controls.iter().enumerate() {
        let p = &traj.points[k];
        let v = model.push_forward(p, &model.embed_control(u)?)?;
        length += (traj.times[k + 1] - traj.times[k]) * metric.norm(model, p, &v)?;
    }
    Ok(length)
}
