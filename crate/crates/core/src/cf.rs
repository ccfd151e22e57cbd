//! Certainty factors and the four ways they combine.

use core::fmt;

/// Degree of belief in `[0, 1]`: `0` is definitely false, `1` definitely true.
///
/// The constructor is the only way in, so a value outside the unit interval
/// (or a NaN) can never reach a rule, an answer, or a trace.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct CertaintyFactor(f64);

/// Returned when a number is not a valid certainty factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfRangeError(pub f64);

impl fmt::Display for CfRangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certainty factor {} is outside [0, 1]", self.0)
    }
}

impl core::error::Error for CfRangeError {}

impl CertaintyFactor {
    pub const FALSE: CertaintyFactor = CertaintyFactor(0.0);
    pub const TRUE: CertaintyFactor = CertaintyFactor(1.0);

    pub fn new(value: f64) -> Result<Self, CfRangeError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            // normalizes -0.0
            Ok(CertaintyFactor(value + 0.0))
        } else {
            Err(CfRangeError(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CertaintyFactor {
    type Error = CfRangeError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        CertaintyFactor::new(value)
    }
}

impl From<CertaintyFactor> for f64 {
    fn from(cf: CertaintyFactor) -> f64 {
        cf.0
    }
}

impl fmt::Display for CertaintyFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Confidence in a rule's conclusion: `rule_cf * premise_cf`.
#[inline]
pub fn cf_rule(rule_cf: CertaintyFactor, premise_cf: CertaintyFactor) -> CertaintyFactor {
    CertaintyFactor(rule_cf.0 * premise_cf.0)
}

/// Conjunction: the weakest child.
///
/// # Panics
///
/// Panics on an empty slice; a conjunction always has at least one child.
pub fn cf_all(children: &[CertaintyFactor]) -> CertaintyFactor {
    assert!(!children.is_empty(), "cf_all needs at least one child");
    children
        .iter()
        .copied()
        .fold(CertaintyFactor::TRUE, |acc, c| if c.0 < acc.0 { c } else { acc })
}

/// Disjunction: the strongest child.
///
/// # Panics
///
/// Panics on an empty slice.
pub fn cf_any(children: &[CertaintyFactor]) -> CertaintyFactor {
    assert!(!children.is_empty(), "cf_any needs at least one child");
    children
        .iter()
        .copied()
        .fold(CertaintyFactor::FALSE, |acc, c| if c.0 > acc.0 { c } else { acc })
}

/// Accumulates two independent pieces of positive evidence for the same
/// conclusion: `a + b * (1 - a)`.
#[inline]
pub fn cf_parallel(a: CertaintyFactor, b: CertaintyFactor) -> CertaintyFactor {
    let v = a.0 + b.0 * (1.0 - a.0);
    // rounding can overshoot by one ulp
    CertaintyFactor(v.clamp(0.0, 1.0))
}
