//! Problem configuration: a versioned TOML document, optionally starting
//! from a built-in preset, with every section overriding one component.
//! Unknown keys are errors.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Deserialize;
use sublorentz::cones::{AntinormSpec, ConeSpec};
use sublorentz::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use sublorentz::presets::Preset;
use sublorentz::solver::{ProblemInstance, SolveOptions, DEFAULT_SEGMENTS};
use sublorentz::timeform::TimeForm;
use sublorentz::{Covector, Error, Vector};
use toml::Spanned;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{} (line {line}): {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: Spanned<u32>,
    preset: Option<Spanned<String>>,
    model: Option<Spanned<ModelSection>>,
    cone: Option<Spanned<ConeSection>>,
    antinorm: Option<Spanned<AntinormSection>>,
    timeform: Option<Spanned<TimeFormSection>>,
    endpoints: Option<EndpointsSection>,
    solver: Option<Spanned<SolverSection>>,
    checks: Option<ChecksSection>,
    reach: Option<ReachSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ModelSection {
    Abelian {
        dim: usize,
    },
    Hyperbolic {},
    Heisenberg {},
    StepTwo {
        r: usize,
    },
    Filiform {
        step: usize,
    },
    /// Structure constants read from a file, relative to the config.
    Carnot {
        structure: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ConeSection {
    /// Either `r` for the standard cone of `R^{1,r}`, or a `form` of
    /// signature (1, r) together with a covector `nappe` picking the future.
    Lorentz {
        r: Option<usize>,
        form: Option<Vec<Vec<f64>>>,
        nappe: Option<Vec<f64>>,
    },
    Polyhedral {
        generators: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum AntinormSection {
    /// Defaults to the cone's own form.
    Lorentz {
        form: Option<Vec<Vec<f64>>>,
    },
    MinOfLinear {
        family: Vec<Vec<f64>>,
    },
    Zero {},
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeFormSection {
    a: Option<f64>,
    b: Option<f64>,
    tau0: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointsSection {
    x0: Option<Spanned<Vec<f64>>>,
    x1: Option<Spanned<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    segments: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    parametrization: Option<Parametrization>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    /// Controls over `t in [0, 1]`.
    Time,
    /// Unit-time controls over `s in [0, T(x1) - T(x0)]`.
    Potential,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChecksSection {
    axiom_samples: Option<usize>,
    fd_points: Option<usize>,
    fd_step: Option<f64>,
    growth_samples: Option<usize>,
    paths: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReachSection {
    samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checks {
    pub axiom_samples: usize,
    pub fd_points: usize,
    pub fd_step: f64,
    pub growth_samples: usize,
    pub paths: usize,
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub preset: Option<String>,
    pub model: GroupModel,
    pub cone: ConeSpec,
    pub nu: AntinormSpec,
    pub form: TimeForm,
    pub x0: GroupPoint,
    pub x1: GroupPoint,
    pub segments: usize,
    pub solver: SolveOptions,
    pub parametrization: Parametrization,
    pub checks: Checks,
    pub reach_samples: usize,
    pub out_dir: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            field: path.display().to_string(),
            line: None,
            message: format!("cannot read config: {e}"),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Config::parse(&text, base)
    }

    /// Parses `text`; relative paths inside resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Config, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            field: "config".into(),
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        Resolver { text, base_dir }.resolve(raw)
    }

    pub fn problem(&self) -> Result<ProblemInstance, ConfigError> {
        ProblemInstance::new(
            self.model.clone(),
            self.cone.clone(),
            self.nu.clone(),
            self.x0.clone(),
            self.x1.clone(),
            self.segments,
        )
        .map_err(|e| {
            let field = match e {
                Error::NotPointed | Error::InvalidCone(_) => "cone",
                Error::InvalidPoint(_) => "endpoints",
                _ => "config",
            };
            ConfigError { field: field.into(), line: None, message: e.to_string() }
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Resolver<'a> {
    text: &'a str,
    base_dir: &'a Path,
}

impl Resolver<'_> {
    fn err<T>(
        &self,
        field: &str,
        span: Option<std::ops::Range<usize>>,
        message: impl fmt::Display,
    ) -> Result<T, ConfigError> {
        Err(ConfigError {
            field: field.into(),
            line: span.map(|s| line_of(self.text, s.start)),
            message: message.to_string(),
        })
    }

    fn resolve(&self, raw: RawConfig) -> Result<Config, ConfigError> {
        if *raw.version.get_ref() != CONFIG_VERSION {
            return self.err(
                "version",
                Some(raw.version.span()),
                format!("unsupported version {}, expected {CONFIG_VERSION}", raw.version.get_ref()),
            );
        }
        let preset = match &raw.preset {
            Some(name) => match Preset::by_name(name.get_ref()) {
                Ok(p) => Some(p),
                Err(e) => return self.err("preset", Some(name.span()), e),
            },
            None => None,
        };

        let model = match &raw.model {
            Some(section) => self.model(section)?,
            None => match &preset {
                Some(p) => p.model.clone(),
                None => return self.err("model", None, "missing: give a preset or a [model] section"),
            },
        };
        let m = model.control_dim();

        let cone = match &raw.cone {
            Some(section) => self.cone(section)?,
            None => match &preset {
                Some(p) if raw.model.is_none() => p.cone.clone(),
                _ => ConeSpec::standard_lorentz(m.saturating_sub(1)),
            },
        };
        if cone.dim() != m {
            let span = raw.cone.as_ref().map(Spanned::span);
            return self.err("cone", span, format!("cone lives in dimension {}, controls in {m}", cone.dim()));
        }

        let nu = match &raw.antinorm {
            Some(section) => self.antinorm(section, &cone)?,
            None => match &preset {
                Some(p) if raw.model.is_none() && raw.cone.is_none() => p.nu.clone(),
                _ => lorentz_antinorm_for(&cone),
            },
        };
        if let Some(d) = nu.dim() {
            if d != m {
                let span = raw.antinorm.as_ref().map(Spanned::span);
                return self.err("antinorm", span, format!("antinorm lives in dimension {d}, controls in {m}"));
            }
        }

        let preset_form = preset.as_ref().filter(|p| p.model == model).map(|p| p.form.clone());
        let form = self.form(raw.timeform.as_ref(), &model, &cone, preset_form)?;

        let (x0, x1) = self.endpoints(raw.endpoints.as_ref(), &model, preset.as_ref())?;

        let solver = raw.solver.as_ref().map(|s| s.get_ref());
        let defaults = SolveOptions::default();
        let segments = solver.and_then(|s| s.segments).unwrap_or(DEFAULT_SEGMENTS);
        let opts = SolveOptions {
            tol: solver.and_then(|s| s.tol).unwrap_or(defaults.tol),
            max_iter: solver.and_then(|s| s.max_iter).unwrap_or(defaults.max_iter),
            restarts: solver.and_then(|s| s.restarts).unwrap_or(defaults.restarts),
            seed: solver.and_then(|s| s.seed).unwrap_or(defaults.seed),
        };
        let solver_span = raw.solver.as_ref().map(Spanned::span);
        if segments == 0 {
            return self.err("solver.segments", solver_span, "must be at least 1");
        }
        if !(opts.tol > 0.0 && opts.tol.is_finite()) {
            return self.err("solver.tol", solver_span, "must be positive");
        }
        if opts.max_iter == 0 {
            return self.err("solver.max_iter", solver_span, "must be at least 1");
        }

        let checks = raw.checks.as_ref();
        let checks = Checks {
            axiom_samples: checks.and_then(|c| c.axiom_samples).unwrap_or(10_000),
            fd_points: checks.and_then(|c| c.fd_points).unwrap_or(20),
            fd_step: checks.and_then(|c| c.fd_step).unwrap_or(1e-3),
            growth_samples: checks.and_then(|c| c.growth_samples).unwrap_or(256),
            paths: checks.and_then(|c| c.paths).unwrap_or(1_000),
        };
        if checks.axiom_samples == 0 || !(checks.fd_step > 0.0) {
            return self.err("checks", None, "axiom_samples and fd_step must be positive");
        }

        Ok(Config {
            preset: preset.map(|p| p.name.to_string()),
            model,
            cone,
            nu,
            form,
            x0,
            x1,
            segments,
            solver: opts,
            parametrization: solver.and_then(|s| s.parametrization).unwrap_or(Parametrization::Time),
            checks,
            reach_samples: raw.reach.and_then(|r| r.samples).unwrap_or(1_000),
            out_dir: raw.output.and_then(|o| o.dir).map(|d| self.base_dir.join(d)),
        })
    }

    fn model(&self, section: &Spanned<ModelSection>) -> Result<GroupModel, ConfigError> {
        let span = Some(section.span());
        Ok(match section.get_ref() {
            ModelSection::Abelian { dim } if *dim >= 1 => GroupModel::Abelian { dim: *dim },
            ModelSection::Abelian { .. } => return self.err("model.dim", span, "must be at least 1"),
            ModelSection::Hyperbolic {} => GroupModel::Hyperbolic,
            ModelSection::Heisenberg {} => GroupModel::heisenberg(),
            ModelSection::StepTwo { r } if *r >= 1 => GroupModel::carnot(CarnotAlgebra::lorentz_step_two(*r)),
            ModelSection::StepTwo { .. } => return self.err("model.r", span, "must be at least 1"),
            ModelSection::Filiform { step } if (2..=4).contains(step) => {
                GroupModel::carnot(CarnotAlgebra::filiform(*step))
            }
            ModelSection::Filiform { .. } => return self.err("model.step", span, "must be 2, 3 or 4"),
            ModelSection::Carnot { structure } => {
                let path = self.base_dir.join(structure);
                let text = match std::fs::read_to_string(&path) {
                    Ok(t) => t,
                    Err(e) => return self.err("model.structure", span, format!("cannot read {}: {e}", path.display())),
                };
                match CarnotAlgebra::parse(&text) {
                    Ok(a) => GroupModel::carnot(a),
                    Err(e) => return self.err("model.structure", span, format!("{}: {e}", path.display())),
                }
            }
        })
    }

    fn cone(&self, section: &Spanned<ConeSection>) -> Result<ConeSpec, ConfigError> {
        let span = Some(section.span());
        let result = match section.get_ref() {
            ConeSection::Lorentz { r: Some(r), form: None, nappe: None } => Ok(ConeSpec::standard_lorentz(*r)),
            ConeSection::Lorentz { r: None, form: Some(form), nappe: Some(nappe) } => match matrix(form) {
                Some(form) => ConeSpec::lorentz(form, Covector::new(nappe.clone())),
                None => return self.err("cone.form", span, "must be a non-empty square matrix"),
            },
            ConeSection::Lorentz { .. } => {
                return self.err("cone", span, "a Lorentz cone needs either `r`, or both `form` and `nappe`")
            }
            ConeSection::Polyhedral { generators } => {
                ConeSpec::polyhedral(generators.iter().map(|g| Vector::new(g.clone())).collect())
            }
        };
        result.or_else(|e| self.err("cone", span, e))
    }

    fn antinorm(&self, section: &Spanned<AntinormSection>, cone: &ConeSpec) -> Result<AntinormSpec, ConfigError> {
        let span = Some(section.span());
        match section.get_ref() {
            AntinormSection::Lorentz { form: None } => match cone {
                ConeSpec::Lorentz(_) => Ok(lorentz_antinorm_for(cone)),
                _ => self.err("antinorm.form", span, "required unless the cone is a Lorentz cone"),
            },
            AntinormSection::Lorentz { form: Some(form) } => match matrix(form) {
                Some(form) => Ok(AntinormSpec::LorentzSqrt { form }),
                None => self.err("antinorm.form", span, "must be a non-empty square matrix"),
            },
            AntinormSection::MinOfLinear { family } => {
                AntinormSpec::min_of_linear(family.iter().map(|c| Covector::new(c.clone())).collect())
                    .or_else(|e| self.err("antinorm.family", span, e))
            }
            AntinormSection::Zero {} => Ok(AntinormSpec::Zero),
        }
    }

    fn form(
        &self,
        section: Option<&Spanned<TimeFormSection>>,
        model: &GroupModel,
        cone: &ConeSpec,
        preset: Option<TimeForm>,
    ) -> Result<TimeForm, ConfigError> {
        let span = section.map(Spanned::span);
        let fields = section.map(Spanned::get_ref);
        if let GroupModel::Hyperbolic = model {
            if fields.is_some_and(|f| f.tau0.is_some()) {
                return self.err("timeform.tau0", span, "the hyperbolic model takes `a` and `b`");
            }
            let (a0, b0) = match preset {
                Some(TimeForm::HyperbolicAB { a, b }) => (a, b),
                _ => (0.0, 1.0),
            };
            let a = fields.and_then(|f| f.a).unwrap_or(a0);
            let b = fields.and_then(|f| f.b).unwrap_or(b0);
            return TimeForm::hyperbolic(a, b).or_else(|e| self.err("timeform", span, e));
        }
        if fields.is_some_and(|f| f.a.is_some() || f.b.is_some()) {
            return self.err("timeform", span, "`a` and `b` apply to the hyperbolic model only; use `tau0`");
        }
        match fields.and_then(|f| f.tau0.clone()) {
            Some(tau0) => {
                TimeForm::left_invariant(model, Covector::new(tau0)).or_else(|e| self.err("timeform.tau0", span, e))
            }
            None => match preset {
                Some(form) => Ok(form),
                None => {
                    let tau = cone.find_time_covector().map_err(|e| ConfigError {
                        field: "cone".into(),
                        line: None,
                        message: format!("no time covector: {e}"),
                    })?;
                    TimeForm::left_invariant(model, tau.covector).or_else(|e| self.err("timeform", span, e))
                }
            },
        }
    }

    fn endpoints(
        &self,
        section: Option<&EndpointsSection>,
        model: &GroupModel,
        preset: Option<&Preset>,
    ) -> Result<(GroupPoint, GroupPoint), ConfigError> {
        let preset = preset.filter(|p| &p.model == model);
        let point = |name: &str, given: Option<&Spanned<Vec<f64>>>, fallback: Option<GroupPoint>| {
            let field = format!("endpoints.{name}");
            let (p, span) = match given {
                Some(v) => (GroupPoint::new(v.get_ref().clone()), Some(v.span())),
                None => match fallback {
                    Some(p) => (p, None),
                    None => return self.err(&field, None, "missing"),
                },
            };
            match model.validate(&p) {
                Ok(()) => Ok(p),
                Err(e) => self.err(&field, span, e),
            }
        };
        let x0 = point(
            "x0",
            section.and_then(|s| s.x0.as_ref()),
            Some(preset.map_or_else(|| model.identity(), |p| p.x0.clone())),
        )?;
        let x1 = point("x1", section.and_then(|s| s.x1.as_ref()), preset.map(|p| p.x1.clone()))?;
        Ok((x0, x1))
    }
}

fn matrix(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `sqrt(g(v, v))` with the cone's own form, or the standard one.
fn lorentz_antinorm_for(cone: &ConeSpec) -> AntinormSpec {
    match cone {
        ConeSpec::Lorentz(l) => AntinormSpec::LorentzSqrt { form: l.form().clone() },
        _ => AntinormSpec::standard_lorentz(cone.dim().saturating_sub(1)),
    }
}
