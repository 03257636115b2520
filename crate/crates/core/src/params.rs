//! Leslie viscosity coefficients and the structural conditions they must meet.
//!
//! A coefficient set is the six viscosities `mu1..mu6`; the two director
//! coefficients `lambda1 = mu2 - mu3` and `lambda2 = mu5 - mu6` are always
//! derived on construction and never set independently.

use crate::error::{Error, Result};

pub const DEFAULT_PARODI_TOL: f64 = 1e-12;
pub const DEFAULT_COND_TOL: f64 = 1e-12;

/// Below this value a non-negative alignment weight is accepted but logged.
pub const WEAK_WEIGHT_WARN: f64 = 1e-10;

pub fn derive_lambdas(mu2: f64, mu3: f64, mu5: f64, mu6: f64) -> Result<(f64, f64)> {
    for (name, v) in [("mu2", mu2), ("mu3", mu3), ("mu5", mu5), ("mu6", mu6)] {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{name} is not finite ({v})")));
        }
    }
    Ok((mu2 - mu3, mu5 - mu6))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeslieCoefficients {
    mu: [f64; 6],
    lambda1: f64,
    lambda2: f64,
}

impl LeslieCoefficients {
    pub fn new(mu: [f64; 6]) -> Result<Self> {
        if let Some((i, v)) = mu.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("mu{} is not finite ({v})", i + 1)));
        }
        let (lambda1, lambda2) = derive_lambdas(mu[1], mu[2], mu[4], mu[5])?;
        Ok(Self { mu, lambda1, lambda2 })
    }

    /// Pure Newtonian fluid with viscosity `mu4` and a director relaxation
    /// coefficient `lambda1 = -1`. Parodi's relation holds since
    /// `mu2 + mu3 = 0 = mu6 - mu5`.
    pub fn newtonian(mu4: f64) -> Result<Self> {
        Self::new([0.0, -0.5, 0.5, mu4, 0.0, 0.0])
    }

    pub fn mu(&self) -> [f64; 6] {
        self.mu
    }
    pub fn mu1(&self) -> f64 {
        self.mu[0]
    }
    pub fn mu2(&self) -> f64 {
        self.mu[1]
    }
    pub fn mu3(&self) -> f64 {
        self.mu[2]
    }
    pub fn mu4(&self) -> f64 {
        self.mu[3]
    }
    pub fn mu5(&self) -> f64 {
        self.mu[4]
    }
    pub fn mu6(&self) -> f64 {
        self.mu[5]
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `lambda2 / lambda1`, the director tumbling ratio.
    pub fn tumbling_ratio(&self) -> f64 {
        self.lambda2 / self.lambda1
    }

    /// `1 / |lambda1|`, the director relaxation rate.
    pub fn relaxation_rate(&self) -> f64 {
        1.0 / self.lambda1.abs()
    }

    /// Weight of `|A : d⊗d|^2` in the energy balance: `mu1 - lambda2^2 / lambda1`.
    pub fn alignment_weight_1(&self) -> f64 {
        self.mu1() - self.lambda2 * self.lambda2 / self.lambda1
    }

    /// Weight of `|A d|^2` in the energy balance: `mu5 + mu6 + lambda2^2 / lambda1`.
    pub fn alignment_weight_2(&self) -> f64 {
        self.mu5() + self.mu6() + self.lambda2 * self.lambda2 / self.lambda1
    }

    /// Errors unless `lambda1 < 0`; every director formula divides by it.
    pub fn require_dissipative_director(&self) -> Result<()> {
        if self.lambda1 < 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidCoefficients(format!(
                "lambda1 = mu2 - mu3 = {} must be negative",
                self.lambda1
            )))
        }
    }

    pub fn validate(&self, parodi_tol: f64, cond_tol: f64) -> ValidationReport {
        validate(self, parodi_tol, cond_tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub parodi_ok: bool,
    pub lambda1_negative: bool,
    pub alignment_nonneg: bool,
    pub viscosity_positive: bool,
    pub stretching_ok: bool,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.parodi_ok
            && self.lambda1_negative
            && self.alignment_nonneg
            && self.viscosity_positive
            && self.stretching_ok
    }
}

pub fn validate(coeffs: &LeslieCoefficients, parodi_tol: f64, cond_tol: f64) -> ValidationReport {
    let mut messages = Vec::new();

    let parodi_gap = (coeffs.mu2() + coeffs.mu3()) - (coeffs.mu6() - coeffs.mu5());
    let parodi_ok = parodi_gap.abs() <= parodi_tol;
    if !parodi_ok {
        messages.push(format!(
            "Parodi relation mu2 + mu3 = mu6 - mu5 violated: {} vs {} (gap {parodi_gap:.3e})",
            coeffs.mu2() + coeffs.mu3(),
            coeffs.mu6() - coeffs.mu5()
        ));
    }

    let lambda1_negative = coeffs.lambda1() < 0.0;
    if !lambda1_negative {
        messages.push(format!("lambda1 = mu2 - mu3 = {} must be negative", coeffs.lambda1()));
    }

    let viscosity_positive = coeffs.mu4() > 0.0;
    if !viscosity_positive {
        messages.push(format!("mu4 = {} must be positive", coeffs.mu4()));
    }

    // The two weights involve lambda2^2 / lambda1; with lambda1 >= 0 they are
    // meaningless, so both are reported as failing.
    let (alignment_nonneg, stretching_ok) = if lambda1_negative {
        let w1 = coeffs.alignment_weight_1();
        let w2 = coeffs.alignment_weight_2();
        let a = w1 >= -cond_tol;
        let s = w2 >= -cond_tol;
        if !a {
            messages.push(format!("mu1 - lambda2^2/lambda1 = {w1:.6e} must be non-negative"));
        } else if w1 < WEAK_WEIGHT_WARN {
            log::warn!("alignment weight mu1 - lambda2^2/lambda1 = {w1:.3e} is at the boundary");
        }
        if !s {
            messages.push(format!(
                "mu5 + mu6 = {} must be >= -lambda2^2/lambda1 = {} (slack {w2:.3e})",
                coeffs.mu5() + coeffs.mu6(),
                -coeffs.lambda2() * coeffs.lambda2() / coeffs.lambda1()
            ));
        } else if w2 < WEAK_WEIGHT_WARN {
            log::warn!("stretching weight mu5 + mu6 + lambda2^2/lambda1 = {w2:.3e} is at the boundary");
        }
        (a, s)
    } else {
        (false, false)
    };

    ValidationReport {
        parodi_ok,
        lambda1_negative,
        alignment_nonneg,
        viscosity_positive,
        stretching_ok,
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coeffs(mu: [f64; 6]) -> LeslieCoefficients {
        LeslieCoefficients::new(mu).unwrap()
    }

    #[test]
    fn derive_lambdas_examples() {
        assert_eq!(derive_lambdas(-2.0, 1.0, 1.0, 0.0).unwrap(), (-3.0, 1.0));
        assert_eq!(derive_lambdas(-1.0, 1.0, 0.5, 0.5).unwrap(), (-2.0, 0.0));
        let (l1, _) = derive_lambdas(0.7, 0.7, 3.0, -1.0).unwrap();
        assert_eq!(l1, 0.0);
        assert!(derive_lambdas(f64::NAN, 1.0, 0.0, 0.0).is_err());
        assert!(derive_lambdas(1.0, 1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn reference_set_is_valid() {
        let c = coeffs([0.0, -2.0, 1.0, 4.0, 1.0, 0.0]);
        assert_eq!(c.lambda1(), -3.0);
        assert_eq!(c.lambda2(), 1.0);
        assert!((c.alignment_weight_1() - 1.0 / 3.0).abs() < 1e-15);
        let r = c.validate(DEFAULT_PARODI_TOL, DEFAULT_COND_TOL);
        assert!(r.is_valid(), "{:?}", r.messages);
        assert!(r.messages.is_empty());
    }

    #[test]
    fn parodi_violation_flagged() {
        let r = coeffs([0.0, -1.0, 1.0, 1.0, 1.0, -1.0]).validate(1e-12, 1e-12);
        assert!(!r.parodi_ok);
        assert!(!r.is_valid());
        assert!(r.messages.iter().any(|m| m.contains("Parodi")));
    }

    #[test]
    fn zero_mu4_flagged() {
        let r = coeffs([0.0, -1.0, 1.0, 0.0, 0.5, 0.5]).validate(1e-12, 1e-12);
        assert!(!r.viscosity_positive);
        assert!(r.parodi_ok && r.lambda1_negative && r.alignment_nonneg && r.stretching_ok);
        assert!(!r.is_valid());
    }

    #[test]
    fn zero_lambda1_rejected() {
        let c = coeffs([0.0, 1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(c.lambda1(), 0.0);
        assert!(!c.validate(1e-12, 1e-12).lambda1_negative);
        assert!(c.require_dissipative_director().is_err());
    }

    #[test]
    fn boundary_weights_accepted() {
        // lambda1 = -3, lambda2 = 1: mu1 = -1/3 puts w1 exactly on zero.
        let c = coeffs([-1.0 / 3.0, -2.0, 1.0, 4.0, 1.0, 0.0]);
        assert!(c.alignment_weight_1().abs() < 1e-15);
        assert!(c.validate(1e-12, 1e-12).is_valid());
    }

    proptest! {
        #[test]
        fn lambdas_are_linear(
            mu in proptest::array::uniform4(-10.0f64..10.0),
            a in -5.0f64..5.0,
        ) {
            let (l1, l2) = derive_lambdas(mu[0], mu[1], mu[2], mu[3]).unwrap();
            let (s1, s2) = derive_lambdas(a * mu[0], a * mu[1], a * mu[2], a * mu[3]).unwrap();
            prop_assert!((s1 - a * l1).abs() <= 1e-12 * (1.0 + s1.abs()));
            prop_assert!((s2 - a * l2).abs() <= 1e-12 * (1.0 + s2.abs()));
        }

        #[test]
        fn valid_sets_have_nonneg_weights(
            l1 in -5.0f64..-0.1,
            l2 in -3.0f64..3.0,
            w1 in 0.0f64..3.0,
            w2 in 0.0f64..3.0,
            mu4 in 0.1f64..5.0,
        ) {
            // Build a set from (lambda1, lambda2, w1, w2) so Parodi holds by construction.
            let mu2 = 0.5 * (l1 - l2);
            let mu3 = -0.5 * (l1 + l2);
            let mu1 = w1 + l2 * l2 / l1;
            let s = w2 - l2 * l2 / l1; // mu5 + mu6
            let mu5 = 0.5 * (s + l2);
            let mu6 = 0.5 * (s - l2);
            let c = LeslieCoefficients::new([mu1, mu2, mu3, mu4, mu5, mu6]).unwrap();
            let r = c.validate(1e-9, 1e-12);
            prop_assert!(r.parodi_ok && r.lambda1_negative);
            if r.is_valid() {
                prop_assert!(c.alignment_weight_1() >= -1e-12);
                prop_assert!(c.alignment_weight_2() >= -1e-12);
            }
        }
    }
}
