//! Reals extended by `-inf`, the value an antinorm takes off its cone.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

/// A real number or negative infinity.
///
/// Arithmetic is total: `-inf` absorbs addition and is preserved by
/// multiplication with positive scalars. Scaling by a non-positive factor
/// is not defined for `-inf` and is rejected by [`ExtReal::scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::NegInf => None,
        }
    }

    /// Lossy conversion for plotting and serialization.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }

    /// Multiplies by `lambda > 0`.
    pub fn scale(self, lambda: f64) -> ExtReal {
        assert!(lambda > 0.0, "ExtReal::scale needs a positive factor");
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(lambda * x),
            ExtReal::NegInf => ExtReal::NegInf,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::Finite(x)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInf,
        }
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        *self = *self + rhs;
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Some(Ordering::Equal),
            (ExtReal::NegInf, ExtReal::Finite(_)) => Some(Ordering::Less),
            (ExtReal::Finite(_), ExtReal::NegInf) => Some(Ordering::Greater),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::NegInf => write!(f, "-inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_absorbs_addition() {
        assert_eq!(ExtReal::NegInf + ExtReal::Finite(3.0), ExtReal::NegInf);
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::Finite(2.0), ExtReal::Finite(3.0));
        let mut acc = ExtReal::ZERO;
        acc += ExtReal::NegInf;
        acc += ExtReal::Finite(5.0);
        assert!(acc.is_neg_inf());
    }

    #[test]
    fn ordering_puts_neg_inf_below_everything() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(2.0) > ExtReal::Finite(1.0));
        assert_eq!(ExtReal::NegInf.max(ExtReal::Finite(0.0)), ExtReal::Finite(0.0));
    }

    #[test]
    fn positive_scaling_preserves_neg_inf() {
        assert!(ExtReal::NegInf.scale(2.0).is_neg_inf());
        assert_eq!(ExtReal::Finite(1.5).scale(2.0), ExtReal::Finite(3.0));
    }

    #[test]
    #[should_panic]
    fn non_positive_scaling_is_rejected() {
        let _ = ExtReal::NegInf.scale(0.0);
    }
}
