//! Affine coordinates `u = A p + b` on a cone, or on its unit time section,
//! in which the feasible set of `p` has a closed-form projection.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::cones::ConeSpec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Covector, Vector};
use crate::sampling::unit_sphere;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ParamSet {
    Orthant(usize),
    /// `p0 >= |(p1, ..)|`.
    SecondOrder(usize),
    Ball {
        dim: usize,
        radius: f64,
    },
    /// Probability simplex.
    Simplex(usize),
}

impl ParamSet {
    pub(crate) fn dim(&self) -> usize {
        match self {
            ParamSet::Orthant(n) | ParamSet::SecondOrder(n) | ParamSet::Simplex(n) => *n,
            ParamSet::Ball { dim, .. } => *dim,
        }
    }

    pub(crate) fn project(&self, p: &mut [f64]) {
        match self {
            ParamSet::Orthant(_) => p.iter_mut().for_each(|x| *x = x.max(0.0)),
            ParamSet::SecondOrder(_) => {
                let t = p[0];
                let s = p[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if s <= t {
                    return;
                }
                if s <= -t {
                    p.iter_mut().for_each(|x| *x = 0.0);
                    return;
                }
                let a = 0.5 * (t + s);
                p[0] = a;
                p[1..].iter_mut().for_each(|x| *x *= a / s);
            }
            ParamSet::Ball { radius, .. } => {
                let s = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if s > *radius {
                    p.iter_mut().for_each(|x| *x *= radius / s);
                }
            }
            ParamSet::Simplex(n) => {
                let mut sorted = p.to_vec();
                sorted.sort_by(|a, b| b.total_cmp(a));
                let mut cumulative = 0.0;
                let mut theta = 0.0;
                for (i, v) in sorted.iter().enumerate() {
                    cumulative += v;
                    let candidate = (cumulative - 1.0) / (i + 1) as f64;
                    if v - candidate > 0.0 {
                        theta = candidate;
                    }
                }
                debug_assert_eq!(p.len(), *n);
                p.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
            }
        }
    }

    /// Relative distance of a feasible `p` from the boundary of the set.
    pub(crate) fn depth(&self, p: &[f64]) -> f64 {
        match self {
            ParamSet::Orthant(_) | ParamSet::Simplex(_) => {
                let total: f64 = p.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
                p.iter().copied().fold(f64::INFINITY, f64::min) / total
            }
            ParamSet::SecondOrder(_) => {
                let s = p[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                (p[0] - s) / p[0].abs().max(f64::MIN_POSITIVE)
            }
            ParamSet::Ball { radius, .. } => 1.0 - p.iter().map(|x| x * x).sum::<f64>().sqrt() / radius,
        }
    }

    /// Moves a feasible `p` inward until its depth is at least `depth`.
    pub(crate) fn nudge(&self, p: &mut [f64], depth: f64) {
        let current = self.depth(p);
        if current >= depth || p.is_empty() {
            return;
        }
        match self {
            ParamSet::Orthant(n) | ParamSet::Simplex(n) => {
                let total: f64 = p.iter().sum();
                let mean = total / *n as f64;
                let min = p.iter().copied().fold(f64::INFINITY, f64::min);
                if mean - min > 0.0 {
                    let t = ((depth * total - min) / (mean - min)).clamp(0.0, 1.0);
                    p.iter_mut().for_each(|x| *x = (1.0 - t) * *x + t * mean);
                }
            }
            ParamSet::SecondOrder(_) => {
                let s = p[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if s > 0.0 && p[0] > 0.0 {
                    let factor = (1.0 - depth) * p[0] / s;
                    p[1..].iter_mut().for_each(|x| *x *= factor);
                }
            }
            ParamSet::Ball { radius, .. } => {
                let s = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if s > 0.0 {
                    let factor = (1.0 - depth) * radius / s;
                    p.iter_mut().for_each(|x| *x *= factor);
                }
            }
        }
    }

    /// A random interior point of unit scale.
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let in_ball = |rng: &mut R, dim: usize, radius: f64| -> Vec<f64> {
            if dim == 0 {
                return Vec::new();
            }
            let r = radius * 0.95 * rng.gen::<f64>().powf(1.0 / dim as f64);
            unit_sphere(rng, dim).iter().map(|x| x * r).collect()
        };
        let exponentials =
            |rng: &mut R, n: usize| -> Vec<f64> { (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-3).collect() };
        match self {
            ParamSet::Orthant(n) => exponentials(rng, *n),
            ParamSet::SecondOrder(n) => {
                let mut p = vec![1.0];
                p.extend(in_ball(rng, n - 1, 1.0));
                p
            }
            ParamSet::Ball { dim, radius } => in_ball(rng, *dim, *radius),
            ParamSet::Simplex(n) => {
                let e = exponentials(rng, *n);
                let total: f64 = e.iter().sum();
                e.iter().map(|x| x / total).collect()
            }
        }
    }
}

/// A cone reduced to generators or to a linear image of the standard
/// Lorentz cone `{w0 >= |w'|}`.
enum Flat {
    Generators(Vec<Vector>),
    Lorentz(DMatrix<f64>),
}

fn flatten(cone: &ConeSpec) -> Flat {
    match cone {
        ConeSpec::Polyhedral { generators } => Flat::Generators(generators.clone()),
        ConeSpec::Lorentz(l) => Flat::Lorentz(l.frame().clone()),
        ConeSpec::LinearImage { base, map } => match flatten(base) {
            Flat::Generators(g) => Flat::Generators(g.iter().map(|v| map.apply(v)).collect()),
            Flat::Lorentz(t) => Flat::Lorentz(map.matrix() * t),
        },
    }
}

#[derive(Debug, Clone)]
enum Inverse {
    /// Generator weights times per-generator scales.
    Weights { cone: ConeSpec, scales: Vec<f64> },
    /// `p = M u`, optionally dropping the first component.
    Linear { matrix: DMatrix<f64>, drop_first: bool },
}

#[derive(Debug, Clone)]
pub(crate) struct AffineParam {
    pub(crate) matrix: DMatrix<f64>,
    pub(crate) offset: DVector<f64>,
    pub(crate) set: ParamSet,
    inverse: Inverse,
}

impl AffineParam {
    /// Coordinates on the whole cone.
    pub(crate) fn for_cone(cone: &ConeSpec) -> Result<Self> {
        let n = cone.dim();
        Ok(match flatten(cone) {
            Flat::Generators(g) => AffineParam {
                matrix: columns(&g),
                offset: DVector::zeros(n),
                set: ParamSet::Orthant(g.len()),
                inverse: Inverse::Weights { cone: ConeSpec::polyhedral(g.clone())?, scales: vec![1.0; g.len()] },
            },
            Flat::Lorentz(t) => {
                let inv = invert(&t)?;
                AffineParam {
                    offset: DVector::zeros(n),
                    set: ParamSet::SecondOrder(n),
                    inverse: Inverse::Linear { matrix: inv, drop_first: false },
                    matrix: t,
                }
            }
        })
    }

    /// Coordinates on `{u in cone : tau(u) = 1}`; `Unbounded` with a witness
    /// if `tau` is not strictly positive on the cone.
    pub(crate) fn for_section(cone: &ConeSpec, tau: &Covector) -> Result<Self> {
        check_dim(cone.dim(), tau.dim())?;
        let n = cone.dim();
        Ok(match flatten(cone) {
            Flat::Generators(g) => {
                let scales: Vec<f64> = g.iter().map(|v| tau.apply(v)).collect();
                if let Some(i) = scales.iter().position(|s| *s <= 0.0) {
                    return Err(Error::Unbounded { direction: g[i].clone() });
                }
                let scaled: Vec<Vector> = g.iter().zip(&scales).map(|(v, s)| v.scale(1.0 / s)).collect();
                AffineParam {
                    matrix: columns(&scaled),
                    offset: DVector::zeros(n),
                    set: ParamSet::Simplex(g.len()),
                    inverse: Inverse::Weights { cone: ConeSpec::polyhedral(g)?, scales },
                }
            }
            Flat::Lorentz(t) => {
                let sigma = t.transpose() * tau.to_dvector();
                let spatial = sigma.rows(1, n - 1).norm();
                if sigma[0] <= spatial * (1.0 + 1e-12) {
                    let mut w = DVector::zeros(n);
                    w[0] = 1.0;
                    if spatial > 0.0 {
                        for i in 1..n {
                            w[i] = -sigma[i] / spatial;
                        }
                    }
                    return Err(Error::Unbounded { direction: Vector::from_dvector(&(&t * w)) });
                }
                let kappa = (sigma[0] * sigma[0] - spatial * spatial).sqrt();
                let boost = boost_to(&DVector::from_iterator(
                    n,
                    (0..n).map(|i| if i == 0 { sigma[0] / kappa } else { -sigma[i] / kappa }),
                ));
                let full = &t * &boost;
                let mut eta = DMatrix::from_diagonal_element(n, n, -1.0);
                eta[(0, 0)] = 1.0;
                let boost_inv = &eta * boost.transpose() * &eta;
                AffineParam {
                    matrix: full.columns(1, n - 1).into_owned(),
                    offset: full.column(0) / kappa,
                    set: ParamSet::Ball { dim: n - 1, radius: 1.0 / kappa },
                    inverse: Inverse::Linear { matrix: boost_inv * invert(&t)?, drop_first: true },
                }
            }
        })
    }

    pub(crate) fn param_dim(&self) -> usize {
        self.set.dim()
    }

    pub(crate) fn control(&self, p: &[f64]) -> Vector {
        let v = &self.matrix * DVector::from_column_slice(p) + &self.offset;
        Vector::from_dvector(&v)
    }

    /// `A^T g`.
    pub(crate) fn pullback(&self, g: &DVector<f64>) -> DVector<f64> {
        self.matrix.transpose() * g
    }

    /// Coordinates of a control in the parametrized set, if it lies there.
    pub(crate) fn coordinates(&self, u: &Vector, tol: f64) -> Option<Vec<f64>> {
        let p = match &self.inverse {
            Inverse::Weights { cone, scales } => {
                let w = cone.generator_weights(u, tol)?;
                w.iter().zip(scales).map(|(a, s)| a * s).collect()
            }
            Inverse::Linear { matrix, drop_first } => {
                let v = matrix * u.to_dvector();
                let skip = usize::from(*drop_first);
                v.iter().skip(skip).copied().collect::<Vec<f64>>()
            }
        };
        let mut projected = p.clone();
        self.set.project(&mut projected);
        let gap = p.iter().zip(&projected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = p.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if gap > 1e-7 * scale {
            return None;
        }
        let back = self.control(&projected);
        ((&back - u).norm() <= 1e-7 * u.norm().max(1.0)).then_some(projected)
    }
}

fn columns(vectors: &[Vector]) -> DMatrix<f64> {
    let n = vectors[0].dim();
    DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or_else(|| Error::InvalidCone("degenerate cone frame".into()))
}

/// The Lorentz boost of `R^{1,r}` taking `e0` to the unit future vector `t`.
fn boost_to(t: &DVector<f64>) -> DMatrix<f64> {
    let n = t.len();
    let gamma = t[0];
    let mut b = DMatrix::identity(n, n);
    b[(0, 0)] = gamma;
    let spatial_sq: f64 = t.rows(1, n - 1).norm_squared();
    for i in 1..n {
        b[(0, i)] = t[i];
        b[(i, 0)] = t[i];
        if spatial_sq > 0.0 {
            for j in 1..n {
                b[(i, j)] += (gamma - 1.0) * t[i] * t[j] / spatial_sq;
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn projections_land_in_their_sets() {
        let mut p = vec![1.0, 3.0, 0.0];
        ParamSet::SecondOrder(3).project(&mut p);
        assert!((p[0] - 2.0).abs() < 1e-15 && (p[1] - 2.0).abs() < 1e-15);
        let mut q = vec![0.5, 0.8, -0.3];
        ParamSet::Simplex(3).project(&mut q);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15 && q.iter().all(|x| *x >= 0.0));
        let mut b = vec![3.0, 4.0];
        ParamSet::Ball { dim: 2, radius: 1.0 }.project(&mut b);
        assert!((b[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn boost_preserves_the_form() {
        let t = DVector::from_vec(vec![2f64.sqrt(), 0.6, 0.8]);
        let b = boost_to(&t);
        let mut eta = DMatrix::from_diagonal_element(3, 3, -1.0);
        eta[(0, 0)] = 1.0;
        assert!((b.transpose() * &eta * &b - &eta).amax() < 1e-14);
        assert!((b.column(0) - &t).amax() < 1e-15);
    }

    #[test]
    fn section_coordinates_have_unit_time() {
        let mut rng = rng_from_seed(3);
        let tau = Covector::new(vec![1.0, 0.4, -0.2]);
        let cone = ConeSpec::standard_lorentz(2);
        let param = AffineParam::for_section(&cone, &tau).unwrap();
        for _ in 0..50 {
            let p = param.set.sample(&mut rng);
            let u = param.control(&p);
            assert!((tau.apply(&u) - 1.0).abs() < 1e-12);
            assert!(cone.contains(&u, 1e-12).unwrap());
            let back = param.coordinates(&u, 1e-9).unwrap();
            assert!(back.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-10));
        }
        let tangent = Covector::new(vec![1.0, 1.0, 0.0]);
        assert!(matches!(AffineParam::for_section(&cone, &tangent), Err(Error::Unbounded { .. })));
    }

    #[test]
    fn cone_coordinates_round_trip() {
        let wedge = ConeSpec::polyhedral(vec![Vector::from([1.0, 1.0]), Vector::from([1.0, -1.0])]).unwrap();
        let image =
            ConeSpec::linear_image(ConeSpec::standard_lorentz(1), DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]))
                .unwrap();
        for cone in [wedge, image] {
            let param = AffineParam::for_cone(&cone).unwrap();
            let mut rng = rng_from_seed(1);
            for _ in 0..20 {
                let p = param.set.sample(&mut rng);
                let u = param.control(&p);
                assert!(cone.contains(&u, 1e-12).unwrap());
                let back = param.coordinates(&u, 1e-9).unwrap();
                assert!((&param.control(&back) - &u).norm() < 1e-10);
            }
            assert!(param.coordinates(&Vector::from([0.0, 1.0]), 1e-9).is_none());
        }
    }
}
