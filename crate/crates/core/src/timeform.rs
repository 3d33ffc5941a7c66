//! Time forms: 1-forms positive on the cone field, their potentials,
//! growth/boundedness diagnostics and the time reparametrization of paths.

use crate::cones::ConeSpec;
use crate::dynamics::Trajectory;
use crate::error::{check_dim, Error, Result};
use crate::groups::{GroupModel, GroupPoint, RiemannianMetric};
use crate::linalg::{Covector, Vector};

/// Relative size below which a coefficient counts as zero for exactness.
const EXACTNESS_TOL: f64 = 1e-12;
/// Rates below this stall the time reparametrization.
pub const STALL_THRESHOLD: f64 = 1e-10;
/// Extra margin applied when a growth constant has to be rescaled below 1.
pub const GROWTH_MARGIN: f64 = 0.05;
/// Midpoint subsamples per segment for forms that are not left-invariant.
const QUADRATURE_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum TimeForm {
    /// `tau_x = tau0 ∘ (L_x)_*^{-1}`, with `tau0` a covector on the full algebra.
    LeftInvariant { tau0: Covector, model: GroupModel },
    /// `(a dx + b dy) / y` on the hyperbolic plane.
    HyperbolicAB { a: f64, b: f64 },
}

impl TimeForm {
    /// Left-invariant form from a covector at the identity. On Carnot groups
    /// a covector on the first layer is extended by zero.
    pub fn left_invariant(model: &GroupModel, tau0: Covector) -> Result<Self> {
        let tau0 = if tau0.dim() == model.control_dim() && tau0.dim() != model.dim() {
            let mut full = tau0.as_slice().to_vec();
            full.resize(model.dim(), 0.0);
            Covector::new(full)
        } else {
            tau0
        };
        check_dim(model.dim(), tau0.dim())?;
        Ok(TimeForm::LeftInvariant { tau0, model: model.clone() })
    }

    pub fn hyperbolic(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument("time form coefficients must be finite".into()));
        }
        Ok(TimeForm::HyperbolicAB { a, b })
    }

    pub fn model(&self) -> GroupModel {
        match self {
            TimeForm::LeftInvariant { model, .. } => model.clone(),
            TimeForm::HyperbolicAB { .. } => GroupModel::Hyperbolic,
        }
    }

    /// The form at the identity, as a covector on the full tangent space.
    pub fn at_identity(&self) -> Covector {
        match self {
            TimeForm::LeftInvariant { tau0, .. } => tau0.clone(),
            TimeForm::HyperbolicAB { a, b } => Covector::new(vec![*a, *b]),
        }
    }

    /// Restriction of the form at the identity to control directions.
    pub fn on_controls(&self) -> Covector {
        let full = self.at_identity();
        let m = self.model().control_dim();
        Covector::new(full.as_slice()[..m].to_vec())
    }

    /// `tau_p(v)` for a tangent vector `v` at `p` in model coordinates.
    pub fn evaluate(&self, p: &GroupPoint, v: &Vector) -> Result<f64> {
        match self {
            TimeForm::LeftInvariant { tau0, model } => Ok(tau0.apply(&model.pull_back(p, v)?)),
            TimeForm::HyperbolicAB { a, b } => {
                GroupModel::Hyperbolic.validate(p)?;
                check_dim(2, v.dim())?;
                Ok((a * v[0] + b * v[1]) / p.coords[1])
            }
        }
    }

    /// `d tau(v, w)` at `p` by central differences of `v(tau(w)) - w(tau(v))`
    /// with `v, w` held constant in coordinates.
    pub fn exterior_derivative_fd(&self, p: &GroupPoint, v: &Vector, w: &Vector, h: f64) -> Result<f64> {
        let model = self.model();
        model.validate(p)?;
        check_dim(model.dim(), v.dim())?;
        check_dim(model.dim(), w.dim())?;
        let shifted = |dir: &Vector, s: f64| -> Result<GroupPoint> {
            let mut c = p.coords.clone();
            c.axpy(s, dir);
            let q = GroupPoint::new(c);
            model
                .validate(&q)
                .map_err(|_| Error::InvalidPoint("finite-difference stencil leaves the domain".into()))?;
            Ok(q)
        };
        let dv_tau_w = (self.evaluate(&shifted(v, h)?, w)? - self.evaluate(&shifted(v, -h)?, w)?) / (2.0 * h);
        let dw_tau_v = (self.evaluate(&shifted(w, h)?, v)? - self.evaluate(&shifted(w, -h)?, v)?) / (2.0 * h);
        Ok(dv_tau_w - dw_tau_v)
    }

    /// `Ok(())` if the form is exact, otherwise the reason it is not.
    pub fn exactness(&self) -> std::result::Result<(), String> {
        let small = |x: f64, scale: f64| x.abs() <= EXACTNESS_TOL * scale.max(1.0);
        match self {
            TimeForm::HyperbolicAB { a, b } => {
                if small(*a, b.abs()) {
                    Ok(())
                } else {
                    Err(format!("d tau = {a}/y^2 dx^dy is not zero"))
                }
            }
            TimeForm::LeftInvariant { tau0, model } => match model {
                GroupModel::Abelian { .. } => Ok(()),
                GroupModel::Hyperbolic => TimeForm::HyperbolicAB { a: tau0[0], b: tau0[1] }.exactness(),
                GroupModel::Carnot { algebra } => {
                    let m = algebra.first_layer_dim();
                    let scale = tau0.norm();
                    match tau0.as_slice()[m..].iter().position(|c| !small(*c, scale)) {
                        None => Ok(()),
                        Some(i) => Err(format!("tau0 is nonzero on the higher-layer direction {}", m + i)),
                    }
                }
            },
        }
    }

    /// Potential `T` with `dT = tau` and `T(identity) = 0`.
    pub fn potential(&self, p: &GroupPoint) -> Result<f64> {
        self.exactness().map_err(Error::NotExact)?;
        let model = self.model();
        model.validate(p)?;
        match (self, &model) {
            (TimeForm::HyperbolicAB { b, .. }, _) => Ok(b * p.coords[1].ln()),
            (TimeForm::LeftInvariant { tau0, .. }, GroupModel::Hyperbolic) => Ok(tau0[1] * p.coords[1].ln()),
            // On Carnot groups `exp^{-1}` is the identity in exponential
            // coordinates and `tau0` sees only the first layer.
            (TimeForm::LeftInvariant { tau0, .. }, _) => Ok(tau0.apply(&p.coords)),
        }
    }

    /// `int tau(x') dt` along the path, segment by segment.
    pub fn segment_rates(&self, traj: &Trajectory) -> Result<Vec<f64>> {
        if traj.model != self.model() {
            return Err(Error::WrongModel("trajectory and time form live on different models".into()));
        }
        let model = &traj.model;
        let mut rates = Vec::with_capacity(traj.segments());
        for (k, u) in traj.controls.iter().enumerate() {
            let xi = model.embed_control(u)?;
            let rate = match self {
                TimeForm::LeftInvariant { tau0, .. } => tau0.apply(&xi),
                TimeForm::HyperbolicAB { .. } => {
                    let h = traj.times[k + 1] - traj.times[k];
                    let mut acc = 0.0;
                    for j in 0..QUADRATURE_NODES {
                        let t = (j as f64 + 0.5) / QUADRATURE_NODES as f64 * h;
                        let x = model.exp_step(&traj.points[k], &xi, t)?;
                        acc += self.evaluate(&x, &model.push_forward(&x, &xi)?)?;
                    }
                    acc / QUADRATURE_NODES as f64
                }
            };
            rates.push(rate);
        }
        Ok(rates)
    }

    pub fn line_integral(&self, traj: &Trajectory) -> Result<f64> {
        let rates = self.segment_rates(traj)?;
        Ok(rates.iter().enumerate().map(|(k, r)| r * (traj.times[k + 1] - traj.times[k])).sum())
    }
}

/// The same path run at unit speed in the time form.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparametrization {
    pub trajectory: Trajectory,
    pub s1: f64,
}

/// Re-times the path by `s(t) = int_0^t tau(x')`; controls are divided by
/// the segment rate so that `tau(x') = 1` afterwards.
pub fn reparametrize(traj: &Trajectory, form: &TimeForm) -> Result<Reparametrization> {
    let rates = form.segment_rates(traj)?;
    let mut times = vec![traj.times[0]];
    let mut controls = Vec::with_capacity(rates.len());
    for (k, rate) in rates.iter().enumerate() {
        if *rate < STALL_THRESHOLD {
            return Err(Error::StalledParameter { segment: k, value: *rate });
        }
        let h = traj.times[k + 1] - traj.times[k];
        times.push(times[k] + h * rate);
        controls.push(traj.controls[k].scale(1.0 / rate));
    }
    let s1 = times.last().expect("non-empty") - times[0];
    let trajectory = Trajectory { model: traj.model.clone(), times, points: traj.points.clone(), controls, z: None };
    Ok(Reparametrization { trajectory, s1 })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthStatus {
    Holds,
    /// Holds once the metric is scaled by `factor`.
    HoldsAfterScaling {
        factor: f64,
    },
    /// The form is not positive on this cone direction.
    Fails {
        direction: Vector,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `max |xi| / tau(xi)` over the cone at the identity.
    pub rho: f64,
    pub status: GrowthStatus,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        !matches!(self.status, GrowthStatus::Fails { .. })
    }
}

/// Whether `tau(xi) > |xi|` on the cone at the identity, possibly after
/// rescaling the metric by `rho (1 + margin)`. Exact on polyhedral cones and
/// Lorentz cones with `r <= 2` (up to the angular grid); sampled otherwise.
pub fn check_growth_condition(
    form: &TimeForm,
    cone: &ConeSpec,
    metric: &RiemannianMetric,
    samples: usize,
    seed: u64,
) -> Result<GrowthReport> {
    let model = form.model();
    let tau = form.on_controls();
    check_dim(tau.dim(), cone.dim())?;
    if let Err(direction) = cone.check_strictly_positive(&tau)? {
        return Ok(GrowthReport { rho: f64::INFINITY, status: GrowthStatus::Fails { direction } });
    }
    let id = model.identity();
    let mut rho: f64 = 0.0;
    for d in cone.extreme_directions(samples, seed) {
        let t = tau.apply(&d);
        if t <= 0.0 {
            return Ok(GrowthReport { rho: f64::INFINITY, status: GrowthStatus::Fails { direction: d } });
        }
        rho = rho.max(metric.norm(&model, &id, &model.embed_control(&d)?)? / t);
    }
    let status = if rho < 1.0 {
        GrowthStatus::Holds
    } else {
        GrowthStatus::HoldsAfterScaling { factor: rho * (1.0 + GROWTH_MARGIN) }
    };
    Ok(GrowthReport { rho, status })
}

/// `{xi in C_x : tau_x(xi) = 1}` where `C_x` is the cone (given at the
/// identity in control coordinates) carried to `base` by left translation.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTimeSection {
    pub cone: ConeSpec,
    pub form: TimeForm,
    pub base: GroupPoint,
}

impl UnitTimeSection {
    pub fn new(cone: ConeSpec, form: TimeForm, base: GroupPoint) -> Result<Self> {
        let model = form.model();
        model.validate(&base)?;
        check_dim(model.control_dim(), cone.dim())?;
        Ok(UnitTimeSection { cone, form, base })
    }

    /// `sup |xi|` over the section; `Unbounded` with a witness direction if
    /// the form does not stay positive on the cone.
    pub fn sup_norm(&self, metric: &RiemannianMetric, samples: usize, seed: u64) -> Result<f64> {
        let model = self.form.model();
        let lift = |d: &Vector| -> Result<Vector> { model.push_forward(&self.base, &model.embed_control(d)?) };
        let mut directions = match self.cone.check_strictly_positive(&self.form.on_controls())? {
            Ok(()) => Vec::new(),
            Err(direction) if self.form.evaluate(&self.base, &lift(&direction)?)? <= 0.0 => {
                return Err(Error::Unbounded { direction });
            }
            Err(direction) => vec![direction],
        };
        directions.extend(self.cone.extreme_directions(samples, seed));
        let mut sup: f64 = 0.0;
        for d in directions {
            let xi = lift(&d)?;
            let t = self.form.evaluate(&self.base, &xi)?;
            if t <= 0.0 {
                return Err(Error::Unbounded { direction: d });
            }
            sup = sup.max(metric.norm(&model, &self.base, &xi)? / t);
        }
        Ok(sup)
    }
}
