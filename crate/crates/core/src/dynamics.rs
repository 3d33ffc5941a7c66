//! Admissible paths driven by piecewise-constant controls, their exact
//! integration on the group models, and the sub-Lorentzian length.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::cones::{AntinormSpec, ConeSpec};
use crate::error::{check_dim, Error, Result};
use crate::extreal::ExtReal;
use crate::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use crate::linalg::Vector;

/// Piecewise-constant control on a uniform grid over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    values: Vec<Vector>,
    horizon: f64,
}

impl ControlSignal {
    pub fn new(values: Vec<Vector>) -> Result<Self> {
        ControlSignal::with_horizon(values, 1.0)
    }

    pub fn with_horizon(values: Vec<Vector>, horizon: f64) -> Result<Self> {
        let first =
            values.first().ok_or_else(|| Error::InvalidArgument("control signal needs at least one segment".into()))?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        for v in &values {
            check_dim(first.dim(), v.dim())?;
            if !v.is_finite() {
                return Err(Error::InvalidArgument("control values must be finite".into()));
            }
        }
        Ok(ControlSignal { values, horizon })
    }

    /// A single segment repeated `n` times.
    pub fn constant(u: Vector, n: usize) -> Result<Self> {
        ControlSignal::new(vec![u; n])
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn segments(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.values.len() as f64
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    /// `sum h u_k`.
    pub fn displacement(&self) -> Vector {
        let mut d = Vector::zeros(self.dim());
        for u in &self.values {
            d.axpy(self.step(), u);
        }
        d
    }

    /// Splits every segment in two; the path is unchanged.
    pub fn refined(&self) -> ControlSignal {
        let values = self.values.iter().flat_map(|u| [u.clone(), u.clone()]).collect();
        ControlSignal { values, horizon: self.horizon }
    }
}

/// A path sampled at the nodes of its control grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: GroupModel,
    pub times: Vec<f64>,
    pub points: Vec<GroupPoint>,
    /// Control of each segment, in control coordinates.
    pub controls: Vec<Vector>,
    /// Accumulated objective at each node, when attached.
    pub z: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn start(&self) -> &GroupPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &GroupPoint {
        self.points.last().expect("trajectory has at least one node")
    }

    pub fn segments(&self) -> usize {
        self.controls.len()
    }

    /// Attaches the running objective `z(t_k) = sum_{j<k} h_j nu(u_j)`; returns
    /// the total, `-inf` if some segment leaves the cone (then no track is kept).
    pub fn attach_objective(&mut self, nu: &AntinormSpec, cone: &ConeSpec) -> Result<ExtReal> {
        let mut z = vec![0.0];
        let mut total = ExtReal::ZERO;
        for (k, u) in self.controls.iter().enumerate() {
            let h = self.times[k + 1] - self.times[k];
            total += nu.eval(cone, u)?.scale(h);
            if let ExtReal::Finite(t) = total {
                z.push(t);
            }
        }
        self.z = if total.is_neg_inf() { None } else { Some(z) };
        Ok(total)
    }

    /// CSV with columns `t, c0, ..., c{n-1}, z`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.model.dim();
        let mut out = String::from("t");
        for i in 0..n {
            let _ = write!(out, ",c{i}");
        }
        out.push_str(",z\n");
        for (k, (t, p)) in self.times.iter().zip(&self.points).enumerate() {
            let _ = write!(out, "{t:.16e}");
            for c in p.coords.iter() {
                let _ = write!(out, ",{c:.16e}");
            }
            out.push(',');
            if let Some(z) = self.z.as_ref().and_then(|z| z.get(k)) {
                let _ = write!(out, "{z:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Exact integration of `x' = x_* u` for piecewise-constant `u`.
pub fn integrate(model: &GroupModel, x0: &GroupPoint, u: &ControlSignal) -> Result<Trajectory> {
    model.validate(x0)?;
    check_dim(model.control_dim(), u.dim())?;
    let h = u.step();
    let mut points = Vec::with_capacity(u.segments() + 1);
    points.push(x0.clone());
    for uk in u.values() {
        let next = model.exp_step(points.last().expect("non-empty"), &model.embed_control(uk)?, h)?;
        points.push(next);
    }
    let times = (0..=u.segments()).map(|k| k as f64 * h).collect();
    Ok(Trajectory { model: model.clone(), times, points, controls: u.values().to_vec(), z: None })
}

/// `sum h nu(u_k)`; `-inf` if any segment's control is outside the cone.
pub fn sl_length(nu: &AntinormSpec, cone: &ConeSpec, u: &ControlSignal) -> Result<ExtReal> {
    let h = u.step();
    let mut total = ExtReal::ZERO;
    for uk in u.values() {
        total += nu.eval(cone, uk)?.scale(h);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub segments: usize,
    /// Indices of segments whose control is outside the cone.
    pub violations: Vec<usize>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn admissibility_check(cone: &ConeSpec, u: &ControlSignal, tol: f64) -> Result<AdmissibilityReport> {
    let mut violations = Vec::new();
    for (k, uk) in u.values().iter().enumerate() {
        if !cone.contains(uk, tol)? {
            violations.push(k);
        }
    }
    Ok(AdmissibilityReport { segments: u.segments(), violations })
}

/// Spatial dimension `r` if `algebra` is the step-two algebra over `R^{1,r}`.
fn step_two_rank(algebra: &CarnotAlgebra) -> Option<usize> {
    match algebra.layer_dims() {
        [a, r] if *a == r + 1 && *algebra == CarnotAlgebra::lorentz_step_two(*r) => Some(*r),
        _ => None,
    }
}

/// Signed area enclosed by the projection of the path onto the
/// `(x_0, x_i)` plane followed by the chord back to its start (shoelace).
pub fn oriented_area(traj: &Trajectory, i: usize) -> Result<f64> {
    let r = traj
        .model
        .algebra()
        .and_then(step_two_rank)
        .ok_or_else(|| Error::WrongModel("oriented area needs the step-two group over R^{1,r}".into()))?;
    if i == 0 || i > r {
        return Err(Error::InvalidArgument(format!("coordinate index {i} not in 1..={r}")));
    }
    let n = traj.points.len();
    let mut twice = 0.0;
    for k in 0..n {
        let p = &traj.points[k].coords;
        let q = &traj.points[(k + 1) % n].coords;
        twice += p[0] * q[i] - p[i] * q[0];
    }
    Ok(0.5 * twice)
}

/// Endpoint of the path from the identity, and the Jacobian of its chart
/// coordinates with respect to each segment's control (`dim x control_dim`).
pub fn endpoint_sensitivities(model: &GroupModel, u: &ControlSignal) -> Result<(GroupPoint, Vec<DMatrix<f64>>)> {
    check_dim(model.control_dim(), u.dim())?;
    let n = u.segments();
    let h = u.step();
    let m = model.control_dim();
    let d = model.dim();
    let steps: Vec<GroupPoint> =
        u.values().iter().map(|uk| model.exp(&model.embed_control(uk)?.scale(h))).collect::<Result<_>>()?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(model.identity());
    for s in &steps {
        prefix.push(model.mul(prefix.last().expect("non-empty"), s)?);
    }
    let mut suffix = vec![model.identity(); n + 1];
    for k in (0..n).rev() {
        suffix[k] = model.mul(&steps[k], &suffix[k + 1])?;
    }
    let endpoint = prefix[n].clone();

    let mut jac = Vec::with_capacity(n);
    for k in 0..n {
        let mut jk = DMatrix::zeros(d, m);
        match model {
            GroupModel::Abelian { .. } => {
                for j in 0..m {
                    jk[(j, j)] = h;
                }
            }
            GroupModel::Carnot { algebra } => {
                let hu = model.embed_control(&u.values()[k])?.scale(h);
                let zero = Vector::zeros(d);
                for j in 0..m {
                    let dir = Vector::basis(d, j).scale(h);
                    let dp = algebra.bch_derivative(&prefix[k].coords, &hu, &zero, &dir)?;
                    let de = algebra.bch_derivative(&prefix[k + 1].coords, &suffix[k + 1].coords, &dp, &zero)?;
                    for row in 0..d {
                        jk[(row, j)] = de[row];
                    }
                }
            }
            GroupModel::Hyperbolic => {
                let (alpha, beta) = (u.values()[k][0], u.values()[k][1]);
                let ya = prefix[k].coords[1];
                let xb = suffix[k + 1].coords[0];
                let hb = h * beta;
                let g = h * exprel(hb);
                let dg = if hb.abs() < 1e-5 {
                    h * h * (0.5 + hb / 3.0 + hb * hb / 8.0)
                } else {
                    (h * hb.exp() * beta - hb.exp_m1()) / (beta * beta)
                };
                jk[(0, 0)] = ya * g;
                jk[(0, 1)] = ya * alpha * dg + ya * xb * h * hb.exp();
                jk[(1, 0)] = 0.0;
                jk[(1, 1)] = h;
            }
        }
        jac.push(jk);
    }
    Ok((endpoint, jac))
}

fn exprel(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_path(first: [f64; 2], second: [f64; 2]) -> Trajectory {
        let u = ControlSignal::new(vec![Vector::from(first), Vector::from(second)]).unwrap();
        let g = GroupModel::heisenberg();
        integrate(&g, &g.identity(), &u).unwrap()
    }

    #[test]
    fn constant_control_reaches_exp() {
        let g = GroupModel::heisenberg();
        let u = ControlSignal::constant(Vector::from([2.0, 1.0]), 7).unwrap();
        let traj = integrate(&g, &g.identity(), &u).unwrap();
        let end = &traj.end().coords;
        assert!((end[0] - 2.0).abs() < 1e-14 && (end[1] - 1.0).abs() < 1e-14 && end[2].abs() < 1e-14);
        assert_eq!(traj.times.len(), 8);
    }

    #[test]
    fn l_path_area_and_second_layer() {
        let traj = l_path([1.0, 0.0], [0.0, 1.0]);
        assert!((traj.end().coords[2] - 0.125).abs() < 1e-15);
        assert!((oriented_area(&traj, 1).unwrap() - 0.125).abs() < 1e-15);
        let reversed = l_path([0.0, 1.0], [1.0, 0.0]);
        assert!((oriented_area(&reversed, 1).unwrap() + 0.125).abs() < 1e-15);
        let straight = l_path([1.0, 0.5], [1.0, 0.5]);
        assert_eq!(oriented_area(&straight, 1).unwrap(), 0.0);
    }

    #[test]
    fn oriented_area_rejects_other_models() {
        let g = GroupModel::Abelian { dim: 2 };
        let u = ControlSignal::constant(Vector::from([1.0, 0.0]), 2).unwrap();
        let traj = integrate(&g, &g.identity(), &u).unwrap();
        assert!(matches!(oriented_area(&traj, 1), Err(Error::WrongModel(_))));
        assert!(oriented_area(&l_path([1.0, 0.0], [0.0, 1.0]), 2).is_err());
    }

    #[test]
    fn abelian_endpoint_is_sum_of_steps() {
        let g = GroupModel::Abelian { dim: 2 };
        let u = ControlSignal::new(vec![Vector::from([1.0, 0.5]), Vector::from([3.0, -0.5])]).unwrap();
        let x0 = GroupPoint::new([1.0, 1.0]);
        let traj = integrate(&g, &x0, &u).unwrap();
        assert_eq!(traj.end().coords, Vector::from([3.0, 1.0]));
    }

    #[test]
    fn integrate_checks_control_dimension() {
        let g = GroupModel::heisenberg();
        let u = ControlSignal::constant(Vector::from([1.0, 0.0, 0.0]), 2).unwrap();
        assert!(matches!(integrate(&g, &g.identity(), &u), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn length_examples() {
        let cone = ConeSpec::standard_lorentz(1);
        let nu = AntinormSpec::standard_lorentz(1);
        let u = ControlSignal::constant(Vector::from([5.0, 3.0]), 3).unwrap();
        assert!((sl_length(&nu, &cone, &u).unwrap().finite().unwrap() - 4.0).abs() < 1e-14);
        let twin = ControlSignal::new(vec![Vector::from([1.0, 0.6]), Vector::from([1.0, -0.6])]).unwrap();
        assert!((sl_length(&nu, &cone, &twin).unwrap().finite().unwrap() - 0.8).abs() < 1e-14);
        let off = ControlSignal::new(vec![Vector::from([1.0, 0.0]), Vector::from([1.0, 2.0])]).unwrap();
        assert!(sl_length(&nu, &cone, &off).unwrap().is_neg_inf());
    }

    #[test]
    fn admissibility_examples() {
        let cone = ConeSpec::standard_lorentz(1);
        let ok = ControlSignal::new(vec![Vector::from([1.0, 0.0]), Vector::from([1.0, 1.0])]).unwrap();
        assert!(admissibility_check(&cone, &ok, 1e-9).unwrap().passed());
        let bad = ControlSignal::new(vec![Vector::from([1.0, 0.0]), Vector::from([1.0, 3.0])]).unwrap();
        assert_eq!(admissibility_check(&cone, &bad, 1e-9).unwrap().violations, vec![1]);
    }

    #[test]
    fn objective_track_is_monotone_and_csv_has_one_row_per_node() {
        let cone = ConeSpec::standard_lorentz(1);
        let nu = AntinormSpec::standard_lorentz(1);
        let mut traj = l_path([1.0, 0.2], [1.0, -0.3]);
        let total = traj.attach_objective(&nu, &cone).unwrap();
        let z = traj.z.clone().unwrap();
        assert!(z.windows(2).all(|w| w[1] >= w[0]));
        assert!((z[2] - total.finite().unwrap()).abs() < 1e-15);
        let csv = traj.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().next().unwrap(), "t,c0,c1,c2,z");
        assert!(csv.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));
    }

    #[test]
    fn sensitivities_match_finite_differences_on_all_models() {
        let cases = [
            (GroupModel::Abelian { dim: 2 }, vec![[1.0, 0.2], [0.5, -0.1], [0.3, 0.3]]),
            (GroupModel::Hyperbolic, vec![[0.4, 0.7], [-0.3, 1e-7], [0.9, -0.5]]),
            (GroupModel::carnot(CarnotAlgebra::filiform(4)), vec![[0.4, 0.7], [-0.3, 0.2], [0.9, -0.5]]),
        ];
        for (model, raw) in cases {
            let values: Vec<Vector> = raw.iter().map(|r| Vector::from(*r)).collect();
            let u = ControlSignal::new(values.clone()).unwrap();
            let (_, jac) = endpoint_sensitivities(&model, &u).unwrap();
            let h = 1e-6;
            for k in 0..values.len() {
                for j in 0..2 {
                    let shifted = |s: f64| {
                        let mut vals = values.clone();
                        vals[k][j] += s;
                        let traj = integrate(&model, &model.identity(), &ControlSignal::new(vals).unwrap()).unwrap();
                        model.chart(traj.end())
                    };
                    let fd = (&shifted(h) - &shifted(-h)).scale(0.5 / h);
                    for row in 0..model.dim() {
                        assert!((fd[row] - jac[k][(row, j)]).abs() < 1e-8, "{model:?} k={k} j={j} row={row}");
                    }
                }
            }
        }
    }
}
