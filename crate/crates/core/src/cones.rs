//! Closed pointed convex cones, antinorms on them, and the time covectors
//! that separate a cone from the hyperplane through its apex.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{Covector, Vector};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::sampling::{log_uniform, rng_from_seed, unit_sphere};

/// Default relative membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The future nappe `{g(v,v) >= 0, nappe(v) >= 0}` of a form of signature `(1, r)`.
///
/// The cone keeps an orthonormalizing frame `M` with `g(Mw, Mw) = w0^2 - |w'|^2`
/// and `nappe(M e0) > 0`, so that every computation can happen in the
/// standard coordinates `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzCone {
    form: DMatrix<f64>,
    nappe: Covector,
    frame: DMatrix<f64>,
    frame_inv: DMatrix<f64>,
}

impl LorentzCone {
    pub fn new(form: DMatrix<f64>, nappe: Covector) -> Result<Self> {
        let n = form.nrows();
        if n == 0 || form.ncols() != n {
            return Err(Error::InvalidCone("Lorentz form must be a non-empty square matrix".into()));
        }
        check_dim(n, nappe.dim())?;
        if !form.iter().all(|x| x.is_finite()) || !nappe.as_slice().iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidCone("Lorentz form has non-finite entries".into()));
        }
        let scale = form.amax();
        if (&form - form.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidCone("Lorentz form is not symmetric".into()));
        }

        let (values, vectors) = if is_diagonal(&form) {
            (form.diagonal(), DMatrix::identity(n, n))
        } else {
            let eig = SymmetricEigen::new(form.clone());
            (eig.eigenvalues, eig.eigenvectors)
        };
        let positive: Vec<usize> = (0..n).filter(|&i| values[i] > 1e-12 * scale).collect();
        let negative = (0..n).filter(|&i| values[i] < -1e-12 * scale).count();
        if positive.len() != 1 || negative != n - 1 {
            return Err(Error::InvalidCone(format!(
                "form must have signature (1, {}), eigenvalues are {:?}",
                n - 1,
                values.as_slice()
            )));
        }
        let p = positive[0];
        let mut frame = DMatrix::zeros(n, n);
        frame.set_column(0, &(vectors.column(p) / values[p].sqrt()));
        let mut col = 1;
        for i in (0..n).filter(|&i| i != p) {
            frame.set_column(col, &(vectors.column(i) / (-values[i]).sqrt()));
            col += 1;
        }
        let time_axis = Vector::from_dvector(&frame.column(0).into_owned());
        if nappe.apply(&time_axis) < 0.0 {
            frame.set_column(0, &(-frame.column(0)));
        }
        let c = nappe.pullback(&frame);
        let spatial = c.as_slice()[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if c[0] <= spatial * (1.0 + 1e-12) + 1e-14 * c.norm() {
            return Err(Error::InvalidCone("nappe selector is not strictly positive on the selected nappe".into()));
        }
        let frame_inv =
            frame.clone().try_inverse().ok_or_else(|| Error::InvalidCone("degenerate Lorentz frame".into()))?;
        Ok(LorentzCone { form, nappe, frame, frame_inv })
    }

    /// `x0 >= |(x1, ..., xr)|` in `R^{1,r}`.
    pub fn standard(r: usize) -> Self {
        let mut form = DMatrix::from_diagonal_element(r + 1, r + 1, -1.0);
        form[(0, 0)] = 1.0;
        LorentzCone::new(form, Covector::basis(r + 1, 0)).expect("standard Lorentz cone is valid")
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn nappe_selector(&self) -> &Covector {
        &self.nappe
    }

    /// Columns map standard Lorentz coordinates to the ambient basis.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn quadratic(&self, v: &Vector) -> f64 {
        let d = v.to_dvector();
        (d.transpose() * &self.form * &d)[(0, 0)]
    }

    fn from_standard(&self, w: &Vector) -> Vector {
        Vector::from_dvector(&(&self.frame * w.to_dvector()))
    }

    fn spatial_dim(&self) -> usize {
        self.form.nrows() - 1
    }
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

/// An invertible linear map together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    map: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(map: DMatrix<f64>) -> Result<Self> {
        if map.nrows() != map.ncols() {
            return Err(Error::InvalidCone("linear image map must be square".into()));
        }
        let inverse = map
            .clone()
            .try_inverse()
            .filter(|inv| inv.iter().all(|x| x.is_finite()))
            .ok_or_else(|| Error::InvalidCone("linear image map is singular".into()))?;
        Ok(LinearMap { map, inverse })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.map
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        Vector::from_dvector(&(&self.map * v.to_dvector()))
    }

    pub fn apply_inverse(&self, v: &Vector) -> Vector {
        Vector::from_dvector(&(&self.inverse * v.to_dvector()))
    }
}

/// A closed pointed convex cone in a model vector space.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// Nonnegative combinations of finitely many generators.
    Polyhedral {
        generators: Vec<Vector>,
    },
    Lorentz(LorentzCone),
    /// `map(base)`, the fiberwise-linear construction of state-dependent cones.
    LinearImage {
        base: Box<ConeSpec>,
        map: LinearMap,
    },
}

/// A covector strictly positive on a cone, with its worst normalized value.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeCovector {
    pub covector: Covector,
    /// `min tau(g) / (|tau| |g|)` over the cone's extreme directions.
    pub margin: f64,
}

impl ConeSpec {
    pub fn polyhedral(generators: Vec<Vector>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidCone("polyhedral cone needs at least one generator".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::InvalidCone("generators must have positive dimension".into()));
        }
        for g in &generators {
            check_dim(dim, g.dim())?;
            if !g.is_finite() {
                return Err(Error::InvalidCone("generator has non-finite entries".into()));
            }
            if g.norm() == 0.0 {
                return Err(Error::InvalidCone("zero generator".into()));
            }
        }
        Ok(ConeSpec::Polyhedral { generators })
    }

    pub fn lorentz(form: DMatrix<f64>, nappe: Covector) -> Result<Self> {
        Ok(ConeSpec::Lorentz(LorentzCone::new(form, nappe)?))
    }

    pub fn standard_lorentz(r: usize) -> Self {
        ConeSpec::Lorentz(LorentzCone::standard(r))
    }

    pub fn linear_image(base: ConeSpec, map: DMatrix<f64>) -> Result<Self> {
        check_dim(base.dim(), map.ncols())?;
        Ok(ConeSpec::LinearImage { base: Box::new(base), map: LinearMap::new(map)? })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Polyhedral { generators } => generators[0].dim(),
            ConeSpec::Lorentz(l) => l.form.nrows(),
            ConeSpec::LinearImage { map, .. } => map.map.nrows(),
        }
    }

    /// Membership up to a tolerance relative to `|v|`.
    pub fn contains(&self, v: &Vector, tol: f64) -> Result<bool> {
        check_dim(self.dim(), v.dim())?;
        let scale = v.norm();
        if scale == 0.0 {
            return Ok(true);
        }
        Ok(match self {
            ConeSpec::Polyhedral { generators } => {
                let (_, residual) = decompose(generators, v);
                residual <= tol * scale
            }
            ConeSpec::Lorentz(l) => {
                let g_scale = l.form.amax().max(f64::MIN_POSITIVE);
                l.quadratic(v) >= -tol * scale * scale * g_scale && l.nappe.apply(v) >= -tol * scale * l.nappe.norm()
            }
            ConeSpec::LinearImage { base, map } => base.contains(&map.apply_inverse(v), tol)?,
        })
    }

    /// Nonnegative generator weights reproducing `v`, when `v` is in a
    /// polyhedral cone (up to `tol` relative).
    pub fn generator_weights(&self, v: &Vector, tol: f64) -> Option<Vec<f64>> {
        match self {
            ConeSpec::Polyhedral { generators } => {
                let (w, residual) = decompose(generators, v);
                (residual <= tol * v.norm().max(f64::MIN_POSITIVE)).then_some(w)
            }
            _ => None,
        }
    }

    /// True iff the cone contains no line.
    pub fn is_pointed(&self) -> bool {
        match self {
            ConeSpec::Polyhedral { generators } => {
                let units: Vec<Vector> = normalized(generators);
                let m = units.len();
                let mut lp = LinearProgram::maximize(vec![1.0; m]);
                for row in 0..units[0].dim() {
                    lp.constraint(units.iter().map(|g| g[row]).collect(), Relation::Eq, 0.0);
                }
                lp.constraint(vec![1.0; m], Relation::Le, 1.0);
                match lp.solve() {
                    LpOutcome::Optimal { value, .. } => value <= 1e-9,
                    _ => true,
                }
            }
            ConeSpec::Lorentz(_) => true,
            ConeSpec::LinearImage { base, .. } => base.is_pointed(),
        }
    }

    /// A covector in the interior of the polar cone: strictly positive on
    /// every nonzero element of the cone.
    pub fn find_time_covector(&self) -> Result<TimeCovector> {
        if !self.is_pointed() {
            return Err(Error::NotPointed);
        }
        let covector = match self {
            ConeSpec::Polyhedral { generators } => {
                // max t  s.t.  (p - q).g_j >= t,  0 <= p, q <= 1
                let units = normalized(generators);
                let n = self.dim();
                let mut objective = vec![0.0; 2 * n + 1];
                objective[2 * n] = 1.0;
                let mut lp = LinearProgram::maximize(objective);
                for g in &units {
                    let mut row = vec![0.0; 2 * n + 1];
                    for i in 0..n {
                        row[i] = g[i];
                        row[n + i] = -g[i];
                    }
                    row[2 * n] = -1.0;
                    lp.constraint(row, Relation::Ge, 0.0);
                }
                for i in 0..2 * n {
                    let mut row = vec![0.0; 2 * n + 1];
                    row[i] = 1.0;
                    lp.constraint(row, Relation::Le, 1.0);
                }
                match lp.solve() {
                    LpOutcome::Optimal { x, value } if value > 1e-12 => {
                        Covector::new((0..n).map(|i| x[i] - x[n + i]).collect())
                    }
                    _ => return Err(Error::NotPointed),
                }
            }
            ConeSpec::Lorentz(l) => l.nappe.clone(),
            ConeSpec::LinearImage { base, map } => {
                let tau = base.find_time_covector()?.covector;
                tau.pullback(&map.inverse)
            }
        };
        let margin = self
            .extreme_directions(256, 0)
            .iter()
            .map(|d| covector.apply(d) / (covector.norm() * d.norm()))
            .fold(f64::INFINITY, f64::min);
        Ok(TimeCovector { covector, margin })
    }

    /// Checks `tau > 0` on the cone minus the apex; on failure returns a
    /// nonzero cone direction where `tau <= 0` (up to a `1e-12` relative band).
    pub fn check_strictly_positive(&self, tau: &Covector) -> Result<std::result::Result<(), Vector>> {
        check_dim(self.dim(), tau.dim())?;
        Ok(match self {
            ConeSpec::Polyhedral { generators } => {
                match generators.iter().find(|g| tau.apply(g) <= 1e-12 * g.norm() * tau.norm()) {
                    Some(g) => Err(g.clone()),
                    None => Ok(()),
                }
            }
            ConeSpec::Lorentz(l) => {
                let c = tau.pullback(&l.frame);
                let spatial: Vec<f64> = c.as_slice()[1..].to_vec();
                let s = spatial.iter().map(|x| x * x).sum::<f64>().sqrt();
                if c[0] > s + 1e-12 * c.norm() {
                    Ok(())
                } else {
                    let mut w = vec![1.0];
                    if s > 0.0 {
                        w.extend(spatial.iter().map(|x| -x / s));
                    } else {
                        w.extend((0..spatial.len()).map(|i| if i == 0 { 1.0 } else { 0.0 }));
                    }
                    Err(l.from_standard(&Vector::new(w)))
                }
            }
            ConeSpec::LinearImage { base, map } => {
                base.check_strictly_positive(&tau.pullback(&map.map))?.map_err(|d| map.apply(&d))
            }
        })
    }

    /// Directions whose conic hull is the cone: the generators of a
    /// polyhedral cone, exactly; boundary rays of a Lorentz cone, exactly
    /// when `r <= 1`, otherwise `samples` of them.
    pub fn extreme_directions(&self, samples: usize, seed: u64) -> Vec<Vector> {
        match self {
            ConeSpec::Polyhedral { generators } => generators.clone(),
            ConeSpec::Lorentz(l) => {
                let r = l.spatial_dim();
                let spatial: Vec<Vec<f64>> = match r {
                    0 => vec![vec![]],
                    1 => vec![vec![1.0], vec![-1.0]],
                    2 => (0..samples.max(4))
                        .map(|j| {
                            let a = std::f64::consts::TAU * j as f64 / samples.max(4) as f64;
                            vec![a.cos(), a.sin()]
                        })
                        .collect(),
                    _ => {
                        let mut rng = rng_from_seed(seed);
                        (0..samples.max(2 * r)).map(|_| unit_sphere(&mut rng, r)).collect()
                    }
                };
                spatial
                    .into_iter()
                    .map(|s| {
                        let mut w = vec![1.0];
                        w.extend(s);
                        l.from_standard(&Vector::new(w))
                    })
                    .collect()
            }
            ConeSpec::LinearImage { base, map } => {
                base.extreme_directions(samples, seed).iter().map(|d| map.apply(d)).collect()
            }
        }
    }

    /// A random element of the cone. With `interior`, the sample lies in the
    /// relative interior, away from the boundary.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, interior: bool) -> Vector {
        let scale = log_uniform(rng, 0.1, 10.0);
        let raw = match self {
            ConeSpec::Polyhedral { generators } => {
                let mut weights: Vec<f64> = generators
                    .iter()
                    .map(|_| {
                        if interior {
                            rng.gen_range(0.1..1.0)
                        } else if rng.gen_bool(0.25) {
                            0.0
                        } else {
                            rng.gen_range(0.0..1.0)
                        }
                    })
                    .collect();
                if weights.iter().all(|&w| w == 0.0) {
                    let j = rng.gen_range(0..weights.len());
                    weights[j] = 1.0;
                }
                let mut v = Vector::zeros(self.dim());
                for (w, g) in weights.iter().zip(generators) {
                    v.axpy(*w, &g.scale(1.0 / g.norm()));
                }
                v
            }
            ConeSpec::Lorentz(l) => {
                let r = l.spatial_dim();
                let rho = if interior {
                    rng.gen_range(0.0..0.9)
                } else if rng.gen_bool(0.2) {
                    1.0
                } else {
                    rng.gen_range(0.0..1.0)
                };
                let mut w = vec![1.0];
                w.extend(unit_sphere(rng, r).into_iter().map(|x| rho * x));
                l.from_standard(&Vector::new(w))
            }
            ConeSpec::LinearImage { base, map } => map.apply(&base.sample(rng, interior)),
        };
        raw.scale(scale / raw.norm().max(f64::MIN_POSITIVE))
    }
}

fn normalized(generators: &[Vector]) -> Vec<Vector> {
    generators.iter().filter(|g| g.norm() > 0.0).map(|g| g.scale(1.0 / g.norm())).collect()
}

/// `min |G lambda - v|_1` over `lambda >= 0`; returns the weights and the residual.
fn decompose(generators: &[Vector], v: &Vector) -> (Vec<f64>, f64) {
    let m = generators.len();
    let n = v.dim();
    let mut objective = vec![0.0; m + 2 * n];
    for c in objective.iter_mut().skip(m) {
        *c = 1.0;
    }
    let mut lp = LinearProgram::minimize(objective);
    for i in 0..n {
        let mut row = vec![0.0; m + 2 * n];
        for (j, g) in generators.iter().enumerate() {
            row[j] = g[i];
        }
        row[m + i] = 1.0;
        row[m + n + i] = -1.0;
        lp.constraint(row, Relation::Eq, v[i]);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => (x[..m].to_vec(), value),
        _ => (vec![0.0; m], f64::INFINITY),
    }
}

/// A concave, positively homogeneous length functional on a cone.
#[derive(Debug, Clone, PartialEq)]
pub enum AntinormSpec {
    /// `sqrt(g(v, v))` for a form of signature `(1, r)`.
    LorentzSqrt {
        form: DMatrix<f64>,
    },
    /// Pointwise minimum of linear functionals. Not validated on
    /// construction; run [`check_antinorm_axioms`] on untrusted families.
    MinOfLinear {
        family: Vec<Covector>,
    },
    Zero,
}

impl AntinormSpec {
    pub fn standard_lorentz(r: usize) -> Self {
        AntinormSpec::LorentzSqrt { form: LorentzCone::standard(r).form.clone() }
    }

    pub fn min_of_linear(family: Vec<Covector>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidArgument("MinOfLinear needs at least one covector".into()));
        }
        let d = family[0].dim();
        for c in &family {
            check_dim(d, c.dim())?;
        }
        Ok(AntinormSpec::MinOfLinear { family })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            AntinormSpec::LorentzSqrt { form } => Some(form.nrows()),
            AntinormSpec::MinOfLinear { family } => family.first().map(Covector::dim),
            AntinormSpec::Zero => None,
        }
    }

    /// `nu(v)`, with `-inf` off the cone.
    pub fn eval(&self, cone: &ConeSpec, v: &Vector) -> Result<ExtReal> {
        check_dim(cone.dim(), v.dim())?;
        if let Some(d) = self.dim() {
            check_dim(d, v.dim())?;
        }
        if !cone.contains(v, DEFAULT_TOL)? {
            return Ok(ExtReal::NegInf);
        }
        Ok(ExtReal::Finite(self.value_on_cone(v)))
    }

    /// Value of the functional formula, assuming `v` is in the cone.
    pub fn value_on_cone(&self, v: &Vector) -> f64 {
        match self {
            AntinormSpec::LorentzSqrt { form } => {
                let n = v.dim();
                let (mut q, mut magnitude) = (0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let t = form[(i, j)] * v[i] * v[j];
                        q += t;
                        magnitude += t.abs();
                    }
                }
                // Below the rounding bound of the sum the vector is lightlike.
                if q <= 8.0 * n as f64 * f64::EPSILON * magnitude {
                    0.0
                } else {
                    q.sqrt()
                }
            }
            AntinormSpec::MinOfLinear { family } => {
                let m = family.iter().map(|c| c.apply(v)).fold(f64::INFINITY, f64::min);
                let band = DEFAULT_TOL * v.norm() * family.iter().map(Covector::norm).fold(0.0, f64::max);
                if m < 0.0 && m >= -band {
                    0.0
                } else {
                    m
                }
            }
            AntinormSpec::Zero => 0.0,
        }
    }

    /// A supergradient at an interior point of the cone, or `None` where the
    /// functional is not differentiable with finite slope (lightlike vectors
    /// of a Lorentz antinorm).
    pub fn supergradient(&self, v: &Vector) -> Option<Vector> {
        match self {
            AntinormSpec::LorentzSqrt { form } => {
                let nu = self.value_on_cone(v);
                if nu <= 1e-300 {
                    return None;
                }
                Some(Vector::from_dvector(&(form * v.to_dvector() / nu)))
            }
            AntinormSpec::MinOfLinear { family } => {
                let best = family.iter().min_by(|a, b| a.apply(v).total_cmp(&b.apply(v))).expect("non-empty family");
                Some(Vector::new(best.as_slice().to_vec()))
            }
            AntinormSpec::Zero => Some(Vector::zeros(v.dim())),
        }
    }
}

/// The first failing sample of an axiom check.
#[derive(Debug, Clone, PartialEq)]
pub enum Counterexample {
    Homogeneity { xi: Vector, lambda: f64, scaled_value: ExtReal, expected: ExtReal },
    Superadditivity { xi: Vector, zeta: Vector, sum_value: ExtReal, parts_value: ExtReal },
    Negative { xi: Vector, value: ExtReal },
    InteriorNotPositive { xi: Vector, value: ExtReal },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub samples: usize,
    pub homogeneity_violations: usize,
    pub superadditivity_violations: usize,
    pub nonnegativity_violations: usize,
    pub interior_positivity_violations: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.homogeneity_violations == 0
            && self.superadditivity_violations == 0
            && self.nonnegativity_violations == 0
            && self.interior_positivity_violations == 0
    }
}

/// Sample-level check of the antinorm axioms for `nu` on `cone`.
pub fn check_antinorm_axioms(
    nu: &AntinormSpec,
    cone: &ConeSpec,
    sample_count: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if let Some(d) = nu.dim() {
        check_dim(cone.dim(), d)?;
    }
    check_axioms_with(cone, sample_count, seed, |v| nu.eval(cone, v).expect("dimensions checked above"))
}

/// Axiom check for an arbitrary candidate functional; used to vet
/// candidates that are not [`AntinormSpec`] values.
pub fn check_axioms_with<F>(cone: &ConeSpec, sample_count: usize, seed: u64, candidate: F) -> Result<AxiomReport>
where
    F: Fn(&Vector) -> ExtReal,
{
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport {
        samples: sample_count,
        homogeneity_violations: 0,
        superadditivity_violations: 0,
        nonnegativity_violations: 0,
        interior_positivity_violations: 0,
        first_counterexample: None,
    };
    let record = |report: &mut AxiomReport, c: Counterexample| {
        if report.first_counterexample.is_none() {
            report.first_counterexample = Some(c);
        }
    };
    let mut interior = Vec::with_capacity(sample_count);

    for _ in 0..sample_count {
        let xi = cone.sample(&mut rng, false);
        let zeta = cone.sample(&mut rng, false);
        let lambda = log_uniform(&mut rng, 1e-2, 1e2);
        let a = candidate(&xi);
        let b = candidate(&zeta);

        if !matches!(a, ExtReal::Finite(x) if x >= -1e-12) {
            report.nonnegativity_violations += 1;
            record(&mut report, Counterexample::Negative { xi: xi.clone(), value: a });
        }

        let scaled = candidate(&xi.scale(lambda));
        let expected = a.scale(lambda);
        let homogeneous = match (scaled, expected) {
            (ExtReal::Finite(s), ExtReal::Finite(e)) => (s - e).abs() <= 1e-9 * e.abs().max(1.0),
            (ExtReal::NegInf, ExtReal::NegInf) => true,
            _ => false,
        };
        if !homogeneous {
            report.homogeneity_violations += 1;
            record(&mut report, Counterexample::Homogeneity { xi: xi.clone(), lambda, scaled_value: scaled, expected });
        }

        let sum = candidate(&(&xi + &zeta));
        let parts = a + b;
        let superadditive = match (sum, parts) {
            (_, ExtReal::NegInf) => true,
            (ExtReal::Finite(s), ExtReal::Finite(p)) => s >= p - 1e-9,
            (ExtReal::NegInf, ExtReal::Finite(_)) => false,
        };
        if !superadditive {
            report.superadditivity_violations += 1;
            record(&mut report, Counterexample::Superadditivity { xi, zeta, sum_value: sum, parts_value: parts });
        }

        let r = cone.sample(&mut rng, true);
        let value = candidate(&r);
        interior.push((r, value));
    }

    let identically_zero = interior.iter().all(|(_, v)| matches!(v, ExtReal::Finite(x) if x.abs() <= 1e-12));
    if !identically_zero {
        for (r, value) in interior {
            if !matches!(value, ExtReal::Finite(x) if x > 1e-12) {
                report.interior_positivity_violations += 1;
                record(&mut report, Counterexample::InteriorNotPositive { xi: r, value });
            }
        }
    }
    Ok(report)
}
