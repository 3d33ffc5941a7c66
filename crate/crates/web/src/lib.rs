//! Three operations for the static demo page in `www/`: a longest path on
//! a preset, a sampled reachable set, and the `d tau` field of the
//! hyperbolic time form. All results cross the boundary as flat `f64`
//! arrays.

use sublorentz::groups::GroupPoint;
use sublorentz::presets::Preset;
use sublorentz::solver::{abelianized_upper_bound, reachability_sample, solve_longest, ProblemInstance, SolveOptions};
use sublorentz::timeform::TimeForm;
use sublorentz::Vector;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct PathResult {
    status: String,
    objective: f64,
    bound: f64,
    residual: f64,
    iterations: usize,
    dim: usize,
    points: Vec<f64>,
}

#[wasm_bindgen]
impl PathResult {
    #[wasm_bindgen(getter)]
    pub fn status(&self) -> String {
        self.status.clone()
    }

    /// `-Infinity` when no admissible path exists.
    #[wasm_bindgen(getter)]
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Abelianized upper bound; `NaN` on the hyperbolic plane.
    #[wasm_bindgen(getter)]
    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Coordinates per point.
    #[wasm_bindgen(getter)]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major `(segments + 1) x dim` trajectory.
    #[wasm_bindgen(getter)]
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }
}

fn preset(name: &str) -> Result<Preset, JsError> {
    Preset::by_name(name).map_err(|e| JsError::new(&e.to_string()))
}

fn js(e: sublorentz::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Longest path on a preset from its start point to `x1`.
#[wasm_bindgen]
pub fn longest_path(name: &str, x1: &[f64], segments: usize, restarts: usize) -> Result<PathResult, JsError> {
    let p = preset(name)?;
    let prob = ProblemInstance::new(p.model.clone(), p.cone, p.nu, p.x0, GroupPoint::new(x1.to_vec()), segments.max(1))
        .map_err(js)?;
    let opts = SolveOptions { restarts, ..SolveOptions::default() };
    let report = solve_longest(&prob, &opts).map_err(js)?;
    let bound = abelianized_upper_bound(&prob).map(|b| b.to_f64()).unwrap_or(f64::NAN);
    Ok(PathResult {
        status: report.status.as_str().to_string(),
        objective: report.objective.to_f64(),
        bound,
        residual: report.endpoint_residual,
        iterations: report.iterations,
        dim: p.model.dim(),
        points: report.trajectory.points.iter().flat_map(|q| q.coords.iter().copied()).collect(),
    })
}

/// Endpoints of `n` random admissible paths from the preset's start point,
/// row-major `n x dim`.
#[wasm_bindgen]
pub fn reachable_cloud(name: &str, n: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    let p = preset(name)?;
    let cloud = reachability_sample(&p.model, &p.cone, &p.x0, n, u64::from(seed)).map_err(js)?;
    Ok(cloud.iter().flat_map(|q| q.coords.iter().copied()).collect())
}

/// `d tau(e_x, e_y)` for `tau = (a dx + b dy) / y` on an `nx x ny` grid over
/// `[x_min, x_max] x [y_min, y_max]`, row by row from `y_min`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn dtau_field(
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    h: f64,
) -> Result<Vec<f64>, JsError> {
    if !(y_min > 0.0 && y_max > y_min && x_max > x_min && nx >= 2 && ny >= 2) {
        return Err(JsError::new("grid must lie in the upper half plane with at least 2 x 2 nodes"));
    }
    let form = TimeForm::hyperbolic(a, b).map_err(js)?;
    let (ex, ey) = (Vector::from([1.0, 0.0]), Vector::from([0.0, 1.0]));
    let step = h.min(0.5 * y_min);
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y_min + (y_max - y_min) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = x_min + (x_max - x_min) * i as f64 / (nx - 1) as f64;
            out.push(form.exterior_derivative_fd(&GroupPoint::new([x, y]), &ex, &ey, step).map_err(js)?);
        }
    }
    Ok(out)
}
