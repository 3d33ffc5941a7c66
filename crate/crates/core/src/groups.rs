//! Computable group models: abelian `R^n`, the hyperbolic plane as the
//! affine group `R x| R_+`, and Carnot groups in exponential coordinates.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{rank, Vector};

/// Largest nilpotency step the BCH product is implemented for.
pub const MAX_STEP: usize = 4;

const JACOBI_TOL: f64 = 1e-12;

/// A stratified nilpotent Lie algebra `g_1 + ... + g_s` given by structure
/// constants in a basis adapted to the grading.
#[derive(Debug, Clone, PartialEq)]
pub struct CarnotAlgebra {
    layer_dims: Vec<usize>,
    layer_of: Vec<usize>,
    /// Nonzero `(i, j, k, c)`: `[e_i, e_j]` has coefficient `c` on `e_k`.
    /// Both orderings of each pair are stored.
    entries: Vec<(usize, usize, usize, f64)>,
}

impl CarnotAlgebra {
    /// Builds and validates an algebra from bracket entries `[e_i, e_j] ∋ c e_k`.
    /// Antisymmetric partners are implied; giving both orderings is allowed if
    /// they agree.
    pub fn new(layer_dims: Vec<usize>, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        if layer_dims.is_empty() || layer_dims.contains(&0) {
            return Err(Error::InvalidAlgebra("layer dimensions must be positive".into()));
        }
        let dim: usize = layer_dims.iter().sum();
        let layer_of: Vec<usize> =
            layer_dims.iter().enumerate().flat_map(|(l, &d)| std::iter::repeat_n(l + 1, d)).collect();
        let step = layer_dims.len();

        let mut dense = vec![0.0; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for &(i, j, k, c) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!("bracket index out of range in ({i}, {j}, {k})")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidAlgebra(format!("non-finite coefficient for [e{i}, e{j}]")));
            }
            if c == 0.0 {
                continue;
            }
            if i == j {
                return Err(Error::InvalidAlgebra(format!("[e{i}, e{i}] must vanish")));
            }
            if layer_of[k] != layer_of[i] + layer_of[j] {
                return Err(Error::InvalidAlgebra(format!(
                    "[e{i}, e{j}] -> e{k} breaks the grading (layers {} + {} != {})",
                    layer_of[i], layer_of[j], layer_of[k]
                )));
            }
            for (p, q, s) in [(i, j, c), (j, i, -c)] {
                let slot = &mut dense[idx(p, q, k)];
                if *slot != 0.0 && (*slot - s).abs() > 1e-15 * s.abs() {
                    return Err(Error::InvalidAlgebra(format!("conflicting entries for [e{p}, e{q}] on e{k}")));
                }
                *slot = s;
            }
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = dense[idx(i, j, k)];
                    if c != 0.0 {
                        entries.push((i, j, k, c));
                    }
                }
            }
        }
        let algebra = CarnotAlgebra { layer_dims, layer_of, entries };

        let basis: Vec<Vector> = (0..dim).map(|i| Vector::basis(dim, i)).collect();
        for a in 0..dim {
            for b in a + 1..dim {
                for c in b + 1..dim {
                    let (x, y, z) = (&basis[a], &basis[b], &basis[c]);
                    let j1 = algebra.bracket(x, &algebra.bracket(y, z));
                    let j2 = algebra.bracket(y, &algebra.bracket(z, x));
                    let j3 = algebra.bracket(z, &algebra.bracket(x, y));
                    let total = &(&j1 + &j2) + &j3;
                    if total.iter().any(|v| v.abs() > JACOBI_TOL) {
                        return Err(Error::InvalidAlgebra(format!("Jacobi identity fails on (e{a}, e{b}, e{c})")));
                    }
                }
            }
        }

        for layer in 2..=step {
            let rows: Vec<Vec<f64>> = algebra
                .layer_range(1)
                .flat_map(|a| algebra.layer_range(layer - 1).map(move |b| (a, b)))
                .map(|(a, b)| {
                    let br = algebra.bracket(&basis[a], &basis[b]);
                    algebra.layer_range(layer).map(|k| br[k]).collect()
                })
                .collect();
            if rank(&rows, 1e-12) != algebra.layer_dims[layer - 1] {
                return Err(Error::InvalidAlgebra(format!("[g_1, g_{}] does not span g_{}", layer - 1, layer)));
            }
        }
        Ok(algebra)
    }

    /// `R^n` as a step-1 algebra.
    pub fn abelian(n: usize) -> Self {
        CarnotAlgebra::new(vec![n], &[]).expect("abelian algebra is valid")
    }

    /// The step-2 algebra `g_1 = R^{1,r}`, `g_2 = t ∧ s` with
    /// `[a, b]_i = a_0 b_i - b_0 a_i`. Basis: `e_0, ..., e_r, y_1, ..., y_r`.
    pub fn lorentz_step_two(r: usize) -> Self {
        let entries: Vec<_> = (1..=r).map(|i| (0, i, r + i, 1.0)).collect();
        CarnotAlgebra::new(vec![r + 1, r], &entries).expect("step-two algebra is valid")
    }

    /// Heisenberg algebra `[e_0, e_1] = y`.
    pub fn heisenberg() -> Self {
        CarnotAlgebra::lorentz_step_two(1)
    }

    /// The filiform algebra `[e_0, e_i] = e_{i+1}` of the given step (basis
    /// `e_0, e_1` in the first layer, one basis vector per higher layer).
    pub fn filiform(step: usize) -> Self {
        let mut dims = vec![2];
        dims.extend(std::iter::repeat_n(1, step.saturating_sub(1)));
        let entries: Vec<_> = (1..step).map(|i| (0, i, i + 1, 1.0)).collect();
        CarnotAlgebra::new(dims, &entries).expect("filiform algebra is valid")
    }

    /// Parses the textual structure-constant format:
    ///
    /// ```text
    /// # comment
    /// layers 2 1
    /// 0 1 2 1.0
    /// ```
    ///
    /// Each entry line `i j k c` means `[e_i, e_j]` has coefficient `c` on `e_k`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut layers: Option<Vec<usize>> = None;
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            if layers.is_none() {
                let rest = line
                    .strip_prefix("layers")
                    .ok_or_else(|| parse_err("expected header line `layers d1 d2 ...`".into()))?;
                let dims = rest
                    .trim_start_matches(':')
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| parse_err(format!("bad layer dimension `{t}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if dims.is_empty() {
                    return Err(parse_err("header lists no layers".into()));
                }
                layers = Some(dims);
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 {
                return Err(parse_err(format!("expected `i j k coeff`, found {} fields", tokens.len())));
            }
            let index = |t: &str| t.parse::<usize>().map_err(|e| parse_err(format!("bad index `{t}`: {e}")));
            let coeff =
                tokens[3].parse::<f64>().map_err(|e| parse_err(format!("bad coefficient `{}`: {e}", tokens[3])))?;
            entries.push((index(tokens[0])?, index(tokens[1])?, index(tokens[2])?, coeff));
        }
        let layers = layers.ok_or(Error::Parse { line: 0, message: "missing `layers` header".into() })?;
        CarnotAlgebra::new(layers, &entries)
    }

    pub fn dim(&self) -> usize {
        self.layer_of.len()
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Basis indices of layer `l` (1-based).
    pub fn layer_range(&self, l: usize) -> std::ops::Range<usize> {
        let start: usize = self.layer_dims[..l - 1].iter().sum();
        start..start + self.layer_dims[l - 1]
    }

    pub fn first_layer_dim(&self) -> usize {
        self.layer_dims[0]
    }

    /// Nonzero structure constants, both orderings of each pair.
    pub fn structure_constants(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn bracket(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for &(i, j, k, c) in &self.entries {
            out[k] += c * a[i] * b[j];
        }
        out
    }

    /// `log(exp(a) exp(b))`, exact for step at most 4.
    pub fn bch(&self, a: &Vector, b: &Vector) -> Result<Vector> {
        check_dim(self.dim(), a.dim())?;
        check_dim(self.dim(), b.dim())?;
        let s = self.step();
        if s > MAX_STEP {
            return Err(Error::UnsupportedStep(s));
        }
        let mut z = a + b;
        if s >= 2 {
            let ab = self.bracket(a, b);
            z.axpy(0.5, &ab);
            if s >= 3 {
                let a_ab = self.bracket(a, &ab);
                z.axpy(1.0 / 12.0, &a_ab);
                z.axpy(-1.0 / 12.0, &self.bracket(b, &ab));
                if s >= 4 {
                    z.axpy(-1.0 / 24.0, &self.bracket(b, &a_ab));
                }
            }
        }
        Ok(z)
    }

    /// Directional derivative of [`CarnotAlgebra::bch`] at `(a, b)` along `(da, db)`.
    pub fn bch_derivative(&self, a: &Vector, b: &Vector, da: &Vector, db: &Vector) -> Result<Vector> {
        let s = self.step();
        if s > MAX_STEP {
            return Err(Error::UnsupportedStep(s));
        }
        let mut dz = da + db;
        if s >= 2 {
            let ab = self.bracket(a, b);
            let dab = &self.bracket(da, b) + &self.bracket(a, db);
            dz.axpy(0.5, &dab);
            if s >= 3 {
                let a_ab = self.bracket(a, &ab);
                let d_a_ab = &self.bracket(da, &ab) + &self.bracket(a, &dab);
                dz.axpy(1.0 / 12.0, &d_a_ab);
                dz.axpy(-1.0 / 12.0, &(&self.bracket(db, &ab) + &self.bracket(b, &dab)));
                if s >= 4 {
                    let d = &self.bracket(db, &a_ab) + &self.bracket(b, &d_a_ab);
                    dz.axpy(-1.0 / 24.0, &d);
                }
            }
        }
        Ok(dz)
    }

    /// Projection onto `g_1` along `[g, g]`, as a full algebra vector.
    pub fn first_layer_projection(&self, xi: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for i in self.layer_range(1) {
            out[i] = xi[i];
        }
        out
    }

    /// The `g_1` coordinates of `xi`.
    pub fn first_layer_coords(&self, xi: &Vector) -> Vector {
        Vector::from(&xi.as_slice()[self.layer_range(1)])
    }

    /// Pads a `g_1` vector with zeros in the higher layers.
    pub fn embed_first_layer(&self, u: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for i in 0..u.dim() {
            out[i] = u[i];
        }
        out
    }

    /// `u + 1/2 [xi, u] + 1/12 [xi, [xi, u]]`: the velocity in exponential
    /// coordinates of `t -> exp(xi) exp(t u)` at `t = 0`.
    fn left_translation_differential(&self, xi: &Vector, u: &Vector) -> Vector {
        let mut out = u.clone();
        let ad1 = self.bracket(xi, u);
        out.axpy(0.5, &ad1);
        out.axpy(1.0 / 12.0, &self.bracket(xi, &ad1));
        out
    }

    /// Inverse of [`Self::left_translation_differential`]:
    /// `v - 1/2 ad v + 1/6 ad^2 v - 1/24 ad^3 v`.
    fn left_translation_codifferential(&self, xi: &Vector, v: &Vector) -> Vector {
        let ad1 = self.bracket(xi, v);
        let ad2 = self.bracket(xi, &ad1);
        let ad3 = self.bracket(xi, &ad2);
        let mut out = v.clone();
        out.axpy(-0.5, &ad1);
        out.axpy(1.0 / 6.0, &ad2);
        out.axpy(-1.0 / 24.0, &ad3);
        out
    }
}

/// A point of a group model. Abelian and Carnot points are stored in
/// exponential coordinates; hyperbolic points as `(x, y)` with `y > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub coords: Vector,
}

impl GroupPoint {
    pub fn new(coords: impl Into<Vector>) -> Self {
        GroupPoint { coords: coords.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupModel {
    Abelian {
        dim: usize,
    },
    /// `(x1, y1) (x2, y2) = (x1 + y1 x2, y1 y2)`, identity `(0, 1)`.
    Hyperbolic,
    Carnot {
        algebra: Arc<CarnotAlgebra>,
    },
}

/// `expm1(z) / z`, continuous at 0.
fn exprel(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

impl GroupModel {
    pub fn carnot(algebra: CarnotAlgebra) -> Self {
        GroupModel::Carnot { algebra: Arc::new(algebra) }
    }

    pub fn heisenberg() -> Self {
        GroupModel::carnot(CarnotAlgebra::heisenberg())
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupModel::Abelian { dim } => *dim,
            GroupModel::Hyperbolic => 2,
            GroupModel::Carnot { algebra } => algebra.dim(),
        }
    }

    /// Dimension of the control space: `g_1` for Carnot groups, the full
    /// tangent space otherwise.
    pub fn control_dim(&self) -> usize {
        match self {
            GroupModel::Carnot { algebra } => algebra.first_layer_dim(),
            _ => self.dim(),
        }
    }

    pub fn algebra(&self) -> Option<&CarnotAlgebra> {
        match self {
            GroupModel::Carnot { algebra } => Some(algebra),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupPoint {
        match self {
            GroupModel::Hyperbolic => GroupPoint::new([0.0, 1.0]),
            _ => GroupPoint::new(Vector::zeros(self.dim())),
        }
    }

    pub fn validate(&self, p: &GroupPoint) -> Result<()> {
        check_dim(self.dim(), p.coords.dim())?;
        if !p.coords.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {:?}", p.coords)));
        }
        if matches!(self, GroupModel::Hyperbolic) && p.coords[1] <= 0.0 {
            return Err(Error::InvalidPoint(format!("hyperbolic y must be positive, got {}", p.coords[1])));
        }
        Ok(())
    }

    pub fn mul(&self, p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(match self {
            GroupModel::Abelian { .. } => GroupPoint::new(&p.coords + &q.coords),
            GroupModel::Hyperbolic => {
                let (x1, y1) = (p.coords[0], p.coords[1]);
                let (x2, y2) = (q.coords[0], q.coords[1]);
                GroupPoint::new([x1 + y1 * x2, y1 * y2])
            }
            GroupModel::Carnot { algebra } => GroupPoint::new(algebra.bch(&p.coords, &q.coords)?),
        })
    }

    pub fn inv(&self, p: &GroupPoint) -> Result<GroupPoint> {
        self.validate(p)?;
        Ok(match self {
            GroupModel::Hyperbolic => {
                let (x, y) = (p.coords[0], p.coords[1]);
                GroupPoint::new([-x / y, 1.0 / y])
            }
            _ => GroupPoint::new(-&p.coords),
        })
    }

    /// `exp(xi)` for a full tangent vector at the identity.
    pub fn exp(&self, xi: &Vector) -> Result<GroupPoint> {
        check_dim(self.dim(), xi.dim())?;
        Ok(match self {
            GroupModel::Hyperbolic => {
                let (alpha, beta) = (xi[0], xi[1]);
                GroupPoint::new([alpha * exprel(beta), beta.exp()])
            }
            _ => GroupPoint::new(xi.clone()),
        })
    }

    /// Inverse of [`GroupModel::exp`].
    pub fn log(&self, p: &GroupPoint) -> Result<Vector> {
        self.validate(p)?;
        Ok(match self {
            GroupModel::Hyperbolic => {
                let beta = p.coords[1].ln();
                Vector::from([p.coords[0] / exprel(beta), beta])
            }
            _ => p.coords.clone(),
        })
    }

    /// Global chart used for residuals and endpoint sensitivities:
    /// `(x, ln y)` on the hyperbolic plane, exponential coordinates otherwise.
    pub fn chart(&self, p: &GroupPoint) -> Vector {
        match self {
            GroupModel::Hyperbolic => Vector::from([p.coords[0], p.coords[1].ln()]),
            _ => p.coords.clone(),
        }
    }

    /// Lifts a control (a `g_1` vector for Carnot groups) to a full tangent
    /// vector at the identity.
    pub fn embed_control(&self, u: &Vector) -> Result<Vector> {
        check_dim(self.control_dim(), u.dim())?;
        Ok(match self {
            GroupModel::Carnot { algebra } => algebra.embed_first_layer(u),
            _ => u.clone(),
        })
    }

    /// `p · exp(h u)` for a full tangent vector `u` at the identity.
    pub fn exp_step(&self, p: &GroupPoint, u: &Vector, h: f64) -> Result<GroupPoint> {
        self.validate(p)?;
        check_dim(self.dim(), u.dim())?;
        match self {
            GroupModel::Abelian { .. } => {
                let mut c = p.coords.clone();
                c.axpy(h, u);
                Ok(GroupPoint::new(c))
            }
            _ => self.mul(p, &self.exp(&u.scale(h))?),
        }
    }

    /// Left-translation differential: the tangent vector at `p` of
    /// `t -> p · exp(t u)`, written in the model's coordinates.
    pub fn push_forward(&self, p: &GroupPoint, u: &Vector) -> Result<Vector> {
        self.validate(p)?;
        check_dim(self.dim(), u.dim())?;
        Ok(match self {
            GroupModel::Abelian { .. } => u.clone(),
            GroupModel::Hyperbolic => u.scale(p.coords[1]),
            GroupModel::Carnot { algebra } => algebra.left_translation_differential(&p.coords, u),
        })
    }

    /// Inverse of [`GroupModel::push_forward`]: pulls a tangent vector at `p`
    /// back to the identity.
    pub fn pull_back(&self, p: &GroupPoint, v: &Vector) -> Result<Vector> {
        self.validate(p)?;
        check_dim(self.dim(), v.dim())?;
        Ok(match self {
            GroupModel::Abelian { .. } => v.clone(),
            GroupModel::Hyperbolic => v.scale(1.0 / p.coords[1]),
            GroupModel::Carnot { algebra } => algebra.left_translation_codifferential(&p.coords, v),
        })
    }

    /// The invariant metric this crate uses by default for the model.
    pub fn natural_metric(&self) -> RiemannianMetric {
        match self {
            GroupModel::Abelian { .. } => RiemannianMetric::Euclidean,
            GroupModel::Hyperbolic => RiemannianMetric::Lobachevsky,
            GroupModel::Carnot { algebra } => {
                RiemannianMetric::LeftInvariantQuadratic { form: DMatrix::identity(algebra.dim(), algebra.dim()) }
            }
        }
    }
}

/// Auxiliary Riemannian metrics for growth and boundedness diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum RiemannianMetric {
    /// Euclidean in the model coordinates.
    Euclidean,
    /// `(dx^2 + dy^2) / y^2` on the hyperbolic plane.
    Lobachevsky,
    /// A positive definite form at the identity spread by left translations.
    LeftInvariantQuadratic { form: DMatrix<f64> },
}

impl RiemannianMetric {
    pub fn left_invariant(form: DMatrix<f64>) -> Result<Self> {
        if form.nrows() != form.ncols() || (&form - form.transpose()).amax() > 1e-12 * form.amax() {
            return Err(Error::InvalidArgument("metric form must be square and symmetric".into()));
        }
        if form.clone().cholesky().is_none() {
            return Err(Error::InvalidArgument("metric form must be positive definite".into()));
        }
        Ok(RiemannianMetric::LeftInvariantQuadratic { form })
    }

    /// `|v|` for a tangent vector `v` at `p`.
    pub fn norm(&self, model: &GroupModel, p: &GroupPoint, v: &Vector) -> Result<f64> {
        model.validate(p)?;
        check_dim(model.dim(), v.dim())?;
        match self {
            RiemannianMetric::Euclidean => Ok(v.norm()),
            RiemannianMetric::Lobachevsky => match model {
                GroupModel::Hyperbolic => Ok(v.norm() / p.coords[1]),
                _ => Err(Error::WrongModel("the Lobachevsky metric lives on the hyperbolic model".into())),
            },
            RiemannianMetric::LeftInvariantQuadratic { form } => {
                check_dim(form.nrows(), v.dim())?;
                let u = model.pull_back(p, v)?.to_dvector();
                Ok((u.transpose() * form * &u)[(0, 0)].max(0.0).sqrt())
            }
        }
    }
}
