//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the solver or the group implementation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublorentz::cones::{AntinormSpec, ConeSpec};
use sublorentz::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use sublorentz::solver::ProblemInstance;
use sublorentz::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `sqrt(t^2 - |x|^2)` on the future cone, `None` off it.
pub fn minkowski_length(v: &[f64]) -> Option<f64> {
    let s2: f64 = v[1..].iter().map(|x| x * x).sum();
    let q = v[0] * v[0] - s2;
    if v[0] < 0.0 || q < -1e-12 * v[0] * v[0] {
        None
    } else {
        Some(q.max(0.0).sqrt())
    }
}

/// A random future-timelike vector with `|x| <= slope * t`.
pub fn timelike<R: Rng>(rng: &mut R, r: usize, slope: f64) -> Vec<f64> {
    let t = rng.gen_range(0.5..3.0);
    let mut x: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
    let rho = rng.gen_range(0.0..slope);
    x.iter_mut().for_each(|a| *a *= rho * t / n);
    let mut v = vec![t];
    v.extend(x);
    v
}

pub fn minkowski_problem(x1: &[f64], segments: usize) -> ProblemInstance {
    let r = x1.len() - 1;
    ProblemInstance::new(
        GroupModel::Abelian { dim: r + 1 },
        ConeSpec::standard_lorentz(r),
        AntinormSpec::standard_lorentz(r),
        GroupPoint::new(vec![0.0; r + 1]),
        GroupPoint::new(x1.to_vec()),
        segments,
    )
    .unwrap()
}

pub fn heisenberg_problem(x1: &[f64], segments: usize) -> ProblemInstance {
    ProblemInstance::new(
        GroupModel::carnot(CarnotAlgebra::lorentz_step_two(1)),
        ConeSpec::standard_lorentz(1),
        AntinormSpec::standard_lorentz(1),
        GroupPoint::new([0.0, 0.0, 0.0]),
        GroupPoint::new(x1.to_vec()),
        segments,
    )
    .unwrap()
}

/// Piecewise-constant path on the step-two group over `R^{1,r}` in
/// exponential coordinates: the first layer is the running sum, and
/// `y_i' = (x_0 u_i - x_i u_0) / 2` integrates exactly on each segment.
pub fn step_two_path(controls: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let m = controls[0].len();
    let r = m - 1;
    let mut p = vec![0.0; m + r];
    let mut out = vec![p.clone()];
    for u in controls {
        for i in 1..=r {
            p[m + i - 1] += 0.5 * h * (p[0] * u[i] - p[i] * u[0]);
        }
        for j in 0..m {
            p[j] += h * u[j];
        }
        out.push(p.clone());
    }
    out
}

/// Same system by classical RK4 on a fine grid, as a check on the exact
/// segment formula.
pub fn step_two_rk4(controls: &[Vec<f64>], h: f64, substeps: usize) -> Vec<f64> {
    let m = controls[0].len();
    let r = m - 1;
    let field = |p: &[f64], u: &[f64]| -> Vec<f64> {
        let mut d = vec![0.0; m + r];
        d[..m].copy_from_slice(u);
        for i in 1..=r {
            d[m + i - 1] = 0.5 * (p[0] * u[i] - p[i] * u[0]);
        }
        d
    };
    let dt = h / substeps as f64;
    let mut p = vec![0.0; m + r];
    for u in controls {
        for _ in 0..substeps {
            let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
            let k1 = field(&p, u);
            let k2 = field(&axpy(&p, dt / 2.0, &k1), u);
            let k3 = field(&axpy(&p, dt / 2.0, &k2), u);
            let k4 = field(&axpy(&p, dt, &k3), u);
            for j in 0..p.len() {
                p[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
    }
    p
}

/// Signed area of the closed polygon traced in the `(x_0, x_i)` plane.
pub fn shoelace(points: &[Vec<f64>], i: usize) -> f64 {
    let n = points.len();
    (0..n)
        .map(|k| {
            let (p, q) = (&points[k], &points[(k + 1) % n]);
            p[0] * q[i] - p[i] * q[0]
        })
        .sum::<f64>()
        / 2.0
}

/// `max |g| / tau(g)` over the generators: the sup norm on the unit time
/// section of a polyhedral cone is attained at a vertex `g / tau(g)`.
pub fn vertex_sup(generators: &[Vec<f64>], tau: &[f64]) -> f64 {
    generators
        .iter()
        .map(|g| {
            let t: f64 = g.iter().zip(tau).map(|(a, b)| a * b).sum();
            assert!(t > 0.0);
            g.iter().map(|x| x * x).sum::<f64>().sqrt() / t
        })
        .fold(0.0, f64::max)
}

pub fn vectors(rows: &[Vec<f64>]) -> Vec<Vector> {
    rows.iter().map(|r| Vector::new(r.clone())).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
