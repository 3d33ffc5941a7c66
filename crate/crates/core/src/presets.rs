//! The three concrete settings: Minkowski plane, hyperbolic plane, and the
//! sub-Lorentzian Heisenberg group.

use nalgebra::DMatrix;

use crate::cones::{AntinormSpec, ConeSpec};
use crate::error::{Error, Result};
use crate::groups::{CarnotAlgebra, GroupModel, GroupPoint};
use crate::linalg::Covector;
use crate::solver::{ProblemInstance, DEFAULT_SEGMENTS};
use crate::timeform::TimeForm;

pub const PRESET_NAMES: [&str; 3] = ["minkowski11", "hyperbolic", "heisenberg-sl"];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub model: GroupModel,
    pub cone: ConeSpec,
    pub nu: AntinormSpec,
    pub form: TimeForm,
    pub x0: GroupPoint,
    pub x1: GroupPoint,
}

impl Preset {
    pub fn by_name(name: &str) -> Result<Preset> {
        match name {
            "minkowski11" => Ok(minkowski11()),
            "hyperbolic" => Ok(hyperbolic()),
            "heisenberg-sl" => Ok(heisenberg_sl()),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset {other:?}, expected one of {}",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    pub fn problem(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(
            self.model.clone(),
            self.cone.clone(),
            self.nu.clone(),
            self.x0.clone(),
            self.x1.clone(),
            DEFAULT_SEGMENTS,
        )
    }
}

/// `R^{1,1}` with `nu = sqrt(t^2 - x^2)`, from the origin to `(5, 3)`.
pub fn minkowski11() -> Preset {
    let model = GroupModel::Abelian { dim: 2 };
    Preset {
        name: "minkowski11",
        form: TimeForm::left_invariant(&model, Covector::new(vec![1.0, 0.0])).expect("dimensions match"),
        model,
        cone: ConeSpec::standard_lorentz(1),
        nu: AntinormSpec::standard_lorentz(1),
        x0: GroupPoint::new([0.0, 0.0]),
        x1: GroupPoint::new([5.0, 3.0]),
    }
}

/// The hyperbolic plane with the vertical direction timelike at the
/// identity, `tau = 2 dy / y`, from `(0, 1)` to `(1, 4)`.
pub fn hyperbolic() -> Preset {
    let form = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]));
    Preset {
        name: "hyperbolic",
        model: GroupModel::Hyperbolic,
        cone: ConeSpec::lorentz(form.clone(), Covector::new(vec![0.0, 1.0])).expect("valid Lorentz form"),
        nu: AntinormSpec::LorentzSqrt { form },
        form: TimeForm::HyperbolicAB { a: 0.0, b: 2.0 },
        x0: GroupPoint::new([0.0, 1.0]),
        x1: GroupPoint::new([1.0, 4.0]),
    }
}

/// The step-two group over `R^{1,1}` (the Heisenberg group) with the Lorentz
/// cone on the first layer, from the identity to `exp(3 e0)`.
pub fn heisenberg_sl() -> Preset {
    let model = GroupModel::carnot(CarnotAlgebra::lorentz_step_two(1));
    Preset {
        name: "heisenberg-sl",
        form: TimeForm::left_invariant(&model, Covector::new(vec![1.0, 0.0])).expect("dimensions match"),
        model,
        cone: ConeSpec::standard_lorentz(1),
        nu: AntinormSpec::standard_lorentz(1),
        x0: GroupPoint::new([0.0, 0.0, 0.0]),
        x1: GroupPoint::new([3.0, 0.0, 0.0]),
    }
}
