//! The five subcommands. Each returns a human summary, a pass flag and the
//! files to write; nothing here touches the filesystem.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sublorentz::cones::{check_antinorm_axioms, Counterexample};
use sublorentz::groups::{GroupModel, GroupPoint};
use sublorentz::solver::{
    abelian_closed_form, abelianized_upper_bound, reachability_sample, sample_admissible_paths, solve_longest,
    solve_reparametrized, SolveReport, SolveStatus,
};
use sublorentz::timeform::{check_growth_condition, GrowthStatus, UnitTimeSection};
use sublorentz::verify::run_invariant_suite;
use sublorentz::{ExtReal, Vector};

use crate::config::{Config, ConfigError, Parametrization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    CheckStructure,
    CheckTimeform,
    Reach,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::CheckStructure => "check-structure",
            Command::CheckTimeform => "check-timeform",
            Command::Reach => "reach",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Library(sublorentz::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<sublorentz::Error> for RunError {
    fn from(e: sublorentz::Error) -> Self {
        RunError::Library(e)
    }
}

pub fn run(command: Command, cfg: &Config, seed: u64) -> Result<Outcome, RunError> {
    match command {
        Command::Solve => solve(cfg, seed),
        Command::CheckStructure => check_structure(cfg, seed),
        Command::CheckTimeform => check_timeform(cfg, seed),
        Command::Reach => reach(cfg, seed),
        Command::Verify => verify(seed),
    }
}

/// JSON has no infinities; they are written as strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn ext(x: ExtReal) -> Value {
    num(x.to_f64())
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn header(command: Command, cfg: &Config, seed: u64) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command.name()));
    m.insert("preset".into(), json!(cfg.preset));
    m.insert("seed".into(), json!(seed));
    m
}

fn solve(cfg: &Config, seed: u64) -> Result<Outcome, RunError> {
    let prob = cfg.problem()?;
    let opts = sublorentz::solver::SolveOptions { seed, ..cfg.solver.clone() };
    let mut report: SolveReport = match cfg.parametrization {
        Parametrization::Time => solve_longest(&prob, &opts)?,
        Parametrization::Potential => solve_reparametrized(&prob, &cfg.form, &opts)?,
    };
    report.trajectory.attach_objective(&prob.nu, &prob.cone)?;

    let bound = match prob.model {
        GroupModel::Hyperbolic => None,
        _ => Some(abelianized_upper_bound(&prob)?),
    };
    let oracle = match prob.model {
        GroupModel::Abelian { .. } => Some(abelian_closed_form(&prob.model, &prob.nu, &prob.cone, &prob.x0, &prob.x1)?),
        _ => None,
    };

    let mut history = String::from("iteration,objective,residual,best_feasible\n");
    for h in &report.history {
        let best = h.best_feasible.map(|b| format!("{b:.16e}")).unwrap_or_default();
        let _ = writeln!(history, "{},{:.16e},{:.16e},{best}", h.iteration, h.objective, h.residual);
    }

    let mut record = header(Command::Solve, cfg, seed);
    record.insert("status".into(), json!(report.status.as_str()));
    record.insert("objective".into(), ext(report.objective));
    record.insert("endpoint_residual".into(), num(report.endpoint_residual));
    record.insert("tol".into(), num(opts.tol));
    record.insert("iterations".into(), json!(report.iterations));
    record.insert("restart".into(), json!(report.restart));
    record.insert("restarts".into(), json!(opts.restarts));
    record.insert("segments".into(), json!(prob.segments));
    record.insert(
        "parametrization".into(),
        json!(match cfg.parametrization {
            Parametrization::Time => "time",
            Parametrization::Potential => "potential",
        }),
    );
    record.insert("horizon".into(), num(report.control.horizon()));
    record.insert("x0".into(), json!(prob.x0.coords.as_slice()));
    record.insert("x1".into(), json!(prob.x1.coords.as_slice()));
    record.insert("endpoint".into(), json!(report.trajectory.end().coords.as_slice()));
    record.insert("abelianized_bound".into(), bound.map_or(Value::Null, ext));
    record.insert("abelian_closed_form".into(), oracle.map_or(Value::Null, ext));

    let mut summary = format!(
        "solve: {} objective {} residual {:.3e} after {} iterations (seed {seed})",
        report.status.as_str(),
        fmt_ext(report.objective),
        report.endpoint_residual,
        report.iterations
    );
    if let Some(b) = bound {
        let _ = write!(summary, "\n  abelianized upper bound {}", fmt_ext(b));
    }
    if let Some(o) = oracle {
        let _ = write!(summary, "\n  abelian closed form {}", fmt_ext(o));
    }
    Ok(Outcome {
        passed: report.status == SolveStatus::Solved,
        summary,
        files: vec![
            ("trajectory.csv".into(), report.trajectory.to_csv()),
            ("history.csv".into(), history),
            ("report.json".into(), to_json(&Value::Object(record))),
        ],
    })
}

fn fmt_ext(x: ExtReal) -> String {
    match x.finite() {
        Some(v) => format!("{v:.6}"),
        None => "-inf".into(),
    }
}

fn counterexample_json(c: &Option<Counterexample>) -> Value {
    let v = |x: &Vector| json!(x.as_slice());
    match c {
        None => Value::Null,
        Some(Counterexample::Homogeneity { xi, lambda, scaled_value, expected }) => json!({
            "axiom": "homogeneity", "xi": v(xi), "lambda": lambda,
            "scaled_value": ext(*scaled_value), "expected": ext(*expected),
        }),
        Some(Counterexample::Superadditivity { xi, zeta, sum_value, parts_value }) => json!({
            "axiom": "superadditivity", "xi": v(xi), "zeta": v(zeta),
            "sum_value": ext(*sum_value), "parts_value": ext(*parts_value),
        }),
        Some(Counterexample::Negative { xi, value }) => {
            json!({"axiom": "nonnegativity", "xi": v(xi), "value": ext(*value)})
        }
        Some(Counterexample::InteriorNotPositive { xi, value }) => {
            json!({"axiom": "interior_positivity", "xi": v(xi), "value": ext(*value)})
        }
    }
}

fn check_structure(cfg: &Config, seed: u64) -> Result<Outcome, RunError> {
    let cone = &cfg.cone;
    let pointed = cone.is_pointed();
    let time = cone.find_time_covector().ok();
    let section = match &time {
        Some(_) => {
            let section = UnitTimeSection::new(cone.clone(), cfg.form.clone(), cfg.model.identity())?;
            section.sup_norm(&cfg.model.natural_metric(), cfg.checks.growth_samples, seed).ok()
        }
        None => None,
    };
    let axioms = check_antinorm_axioms(&cfg.nu, cone, cfg.checks.axiom_samples, seed)?;

    let mut record = header(Command::CheckStructure, cfg, seed);
    record.insert(
        "cone".into(),
        json!({
            "dim": cone.dim(),
            "pointed": pointed,
            "time_covector": time.as_ref().map(|t| t.covector.as_slice().to_vec()),
            "time_margin": time.as_ref().map(|t| num(t.margin)),
            "unit_time_section_sup": section.map_or(json!("unbounded"), num),
        }),
    );
    record.insert(
        "antinorm".into(),
        json!({
            "samples": axioms.samples,
            "homogeneity_violations": axioms.homogeneity_violations,
            "superadditivity_violations": axioms.superadditivity_violations,
            "nonnegativity_violations": axioms.nonnegativity_violations,
            "interior_positivity_violations": axioms.interior_positivity_violations,
            "first_counterexample": counterexample_json(&axioms.first_counterexample),
            "passed": axioms.passed(),
        }),
    );
    let passed = pointed && time.is_some() && section.is_some() && axioms.passed();
    record.insert("passed".into(), json!(passed));

    let mut summary = format!("check-structure: {} (seed {seed})", if passed { "PASS" } else { "FAIL" });
    let _ = write!(
        summary,
        "\n  cone: pointed {pointed}, time covector {}, section sup {}",
        time.as_ref().map_or("none".into(), |t| format!("{:?} (margin {:.3e})", t.covector, t.margin)),
        section.map_or("unbounded".into(), |s| format!("{s:.6}"))
    );
    let _ = write!(
        summary,
        "\n  antinorm: {} samples, violations: homogeneity {}, superadditivity {}, nonnegativity {}, interior {}",
        axioms.samples,
        axioms.homogeneity_violations,
        axioms.superadditivity_violations,
        axioms.nonnegativity_violations,
        axioms.interior_positivity_violations
    );
    Ok(Outcome { passed, summary, files: vec![("structure.json".into(), to_json(&Value::Object(record)))] })
}

/// Random points for the finite-difference stencil, inside the domain.
fn sample_points(model: &GroupModel, n: usize, rng: &mut ChaCha8Rng) -> Vec<GroupPoint> {
    (0..n)
        .map(|_| match model {
            GroupModel::Hyperbolic => GroupPoint::new([rng.gen_range(-2.0..2.0), rng.gen_range(0.25..4.0)]),
            _ => GroupPoint::new((0..model.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<f64>>()),
        })
        .collect()
}

const CLOSED_TOL: f64 = 1e-6;
const POTENTIAL_TOL: f64 = 1e-8;

fn check_timeform(cfg: &Config, seed: u64) -> Result<Outcome, RunError> {
    let form = &cfg.form;
    let model = form.model();
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Closedness: every coordinate pair at every sampled point.
    let mut max_dtau: f64 = 0.0;
    let mut samples = Vec::new();
    for p in sample_points(&model, cfg.checks.fd_points, &mut rng) {
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                let v =
                    form.exterior_derivative_fd(&p, &Vector::basis(d, i), &Vector::basis(d, j), cfg.checks.fd_step)?;
                worst = worst.max(v.abs());
            }
        }
        max_dtau = max_dtau.max(worst);
        samples.push(json!({"point": p.coords.as_slice(), "max_abs_dtau": num(worst)}));
    }
    let closed = max_dtau <= CLOSED_TOL;
    let exact = form.exactness();

    let growth = check_growth_condition(form, &cfg.cone, &model.natural_metric(), cfg.checks.growth_samples, seed)?;
    let growth_json = match &growth.status {
        GrowthStatus::Holds => json!({"status": "holds", "rho": num(growth.rho)}),
        GrowthStatus::HoldsAfterScaling { factor } => {
            json!({"status": "holds_after_scaling", "rho": num(growth.rho), "factor": num(*factor)})
        }
        GrowthStatus::Fails { direction } => json!({"status": "fails", "direction": direction.as_slice()}),
    };

    // Potential consistency: int tau along sampled paths vs T(end) - T(start).
    let potential = if exact.is_ok() && growth.passed() {
        let t0 = form.potential(&cfg.x0)?;
        let mut worst: f64 = 0.0;
        for traj in sample_admissible_paths(&model, &cfg.cone, &cfg.x0, cfg.checks.paths, seed)? {
            let integral = form.line_integral(&traj)?;
            let gap = form.potential(traj.end())? - t0;
            worst = worst.max((integral - gap).abs() / gap.abs().max(1.0));
        }
        Some(worst)
    } else {
        None
    };
    let consistent = potential.is_some_and(|w| w <= POTENTIAL_TOL);
    let passed = closed && exact.is_ok() && growth.passed() && consistent;

    let mut record = header(Command::CheckTimeform, cfg, seed);
    record.insert(
        "closedness".into(),
        json!({
            "fd_step": cfg.checks.fd_step,
            "max_abs_dtau": num(max_dtau),
            "closed": closed,
            "exact": exact.is_ok(),
            "reason": exact.as_ref().err(),
            "points": samples,
        }),
    );
    record.insert("growth".into(), growth_json);
    record.insert(
        "potential".into(),
        json!({
            "paths": cfg.checks.paths,
            "max_relative_mismatch": potential.map(num),
            "consistent": consistent,
        }),
    );
    record.insert("passed".into(), json!(passed));

    let mut summary = format!("check-timeform: {} (seed {seed})", if passed { "PASS" } else { "FAIL" });
    let _ = write!(
        summary,
        "\n  closedness: max |d tau| {max_dtau:.3e} over {} points -> {}",
        cfg.checks.fd_points,
        if closed { "closed" } else { "not closed" }
    );
    if let Err(reason) = &exact {
        let _ = write!(summary, " ({reason})");
    }
    let _ = write!(
        summary,
        "\n  growth: {}",
        match &growth.status {
            GrowthStatus::Holds => format!("holds (rho {:.4})", growth.rho),
            GrowthStatus::HoldsAfterScaling { factor } => format!("holds after scaling the metric by {factor:.4}"),
            GrowthStatus::Fails { direction } => format!("fails on {direction:?}"),
        }
    );
    let _ = write!(
        summary,
        "\n  potential: {}",
        potential.map_or("skipped (no potential)".into(), |w| format!(
            "max mismatch {w:.3e} over {} paths",
            cfg.checks.paths
        ))
    );
    Ok(Outcome { passed, summary, files: vec![("timeform.json".into(), to_json(&Value::Object(record)))] })
}

fn reach(cfg: &Config, seed: u64) -> Result<Outcome, RunError> {
    let model = &cfg.model;
    let cloud = reachability_sample(model, &cfg.cone, &cfg.x0, cfg.reach_samples, seed)?;
    let t0 = cfg.form.potential(&cfg.x0).ok();
    let mut csv = String::new();
    for i in 0..model.dim() {
        let _ = write!(csv, "{}c{i}", if i == 0 { "" } else { "," });
    }
    csv.push_str(if t0.is_some() { ",T\n" } else { "\n" });
    let mut below = 0;
    for p in &cloud {
        let row: Vec<String> = p.coords.iter().map(|c| format!("{c:.16e}")).collect();
        csv.push_str(&row.join(","));
        if let Some(t0) = t0 {
            let t = cfg.form.potential(p)?;
            if t < t0 - 1e-9 * t0.abs().max(1.0) {
                below += 1;
            }
            let _ = write!(csv, ",{t:.16e}");
        }
        csv.push('\n');
    }
    let passed = below == 0;
    let mut record = header(Command::Reach, cfg, seed);
    record.insert("samples".into(), json!(cloud.len()));
    record.insert("x0".into(), json!(cfg.x0.coords.as_slice()));
    record.insert("potential_column".into(), json!(t0.is_some()));
    record.insert("below_start_potential".into(), json!(below));
    record.insert("passed".into(), json!(passed));
    let summary = format!(
        "reach: {} samples from {:?} (seed {seed}); {}",
        cloud.len(),
        cfg.x0.coords,
        match t0 {
            Some(_) => format!("{below} below the starting potential"),
            None => "form not exact, no potential column".into(),
        }
    );
    Ok(Outcome {
        passed,
        summary,
        files: vec![("cloud.csv".into(), csv), ("report.json".into(), to_json(&Value::Object(record)))],
    })
}

fn verify(seed: u64) -> Result<Outcome, RunError> {
    let suite = run_invariant_suite(seed)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &suite.results {
        let _ = writeln!(
            text,
            "{} {}/{} {}/{}",
            if r.ok() { "PASS" } else { "FAIL" },
            r.passed,
            r.trials,
            r.module,
            r.name
        );
        rows.push(json!({"module": r.module, "name": r.name, "trials": r.trials, "passed": r.passed, "ok": r.ok()}));
    }
    let failed = suite.results.iter().filter(|r| !r.ok()).count();
    let _ = write!(text, "{} invariants, {failed} failed (seed {seed})", suite.results.len());
    let record = json!({"command": "verify", "seed": seed, "passed": suite.passed(), "invariants": rows});
    Ok(Outcome {
        passed: suite.passed(),
        summary: text.clone(),
        files: vec![("verify.txt".into(), text + "\n"), ("verify.json".into(), to_json(&record))],
    })
}
