//! Singular-limit knobs: the Mach-number parameter ε, the Reynolds/Péclet
//! exponents, and the data-regularization width η.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScalingError {
    #[error("eps = {0} must be positive and finite")]
    BadEps(f64),
    #[error("exponent constraint violated: need b > 0 and 0 < a < 10/3, got a = {a}, b = {b}")]
    ExponentConstraint { a: f64, b: f64 },
    #[error("regularization width eta = {0} must be positive")]
    BadEta(f64),
}

/// ε (Mach), a (Reynolds exponent: Re ~ ε^{-a}), b (Péclet exponent:
/// Pe ~ ε^{-b}) and the regularization width η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingParams {
    pub eps: f64,
    pub a_exp: f64,
    pub b_exp: f64,
    pub eta: f64,
}

impl ScalingParams {
    pub fn new(eps: f64, a_exp: f64, b_exp: f64, eta: f64) -> Result<Self, ScalingError> {
        let p = Self {
            eps,
            a_exp,
            b_exp,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Enforces ε > 0, η > 0 and the exponent window b > 0, 0 < a < 10/3.
    pub fn validate(&self) -> Result<(), ScalingError> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(ScalingError::BadEps(self.eps));
        }
        if !(self.b_exp > 0.0) || !(self.a_exp > 0.0) || !(self.a_exp < 10.0 / 3.0) {
            return Err(ScalingError::ExponentConstraint {
                a: self.a_exp,
                b: self.b_exp,
            });
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(ScalingError::BadEta(self.eta));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_window_is_enforced() {
        assert!(ScalingParams::new(0.1, 1.0, 1.0, 0.05).is_ok());
        assert!(matches!(
            ScalingParams::new(0.1, 4.0, 1.0, 0.05),
            Err(ScalingError::ExponentConstraint { .. })
        ));
        assert!(matches!(
            ScalingParams::new(0.1, 1.0, 0.0, 0.05),
            Err(ScalingError::ExponentConstraint { .. })
        ));
        assert!(matches!(
            ScalingParams::new(0.1, 1.0, -1.0, 0.05),
            Err(ScalingError::ExponentConstraint { .. })
        ));
        assert!(ScalingParams::new(0.1, 3.3, 0.1, 0.05).is_ok());
        assert!(matches!(
            ScalingParams::new(-0.1, 1.0, 1.0, 0.05),
            Err(ScalingError::BadEps(_))
        ));
        assert!(matches!(
            ScalingParams::new(0.1, 1.0, 1.0, 0.0),
            Err(ScalingError::BadEta(_))
        ));
    }
}
