use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use libm::lgamma as ln_gamma;

use crate::bodies::ConvexBody;

/// Relative slack for inequality checks evaluated in floating point.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// One evaluated inequality `lhs <= rhs`.
///
/// `implied_constant` is the smallest constant that would make the stated
/// inequality hold on this instance; `exact` marks checks decided in
/// rational arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub implied_constant: f64,
    pub pass: bool,
    pub exact: bool,
    pub context: Map<String, Value>,
}

impl InequalityReport {
    /// Float comparison `lhs <= rhs` with [`FLOAT_REL_TOL`].
    pub fn float(name: &str, lhs: f64, rhs: f64, implied_constant: f64) -> Self {
        let pass = float_le(lhs, rhs);
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            implied_constant,
            pass,
            exact: false,
            context: Map::new(),
        }
    }

    /// A check already decided exactly.
    pub fn decided(name: &str, lhs: f64, rhs: f64, implied_constant: f64, pass: bool) -> Self {
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            implied_constant,
            pass,
            exact: true,
            context: Map::new(),
        }
    }

    pub(crate) fn inexact(mut self) -> Self {
        self.exact = false;
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    pub fn with_body(self, body: &ConvexBody) -> Self {
        self.with("body", crate::bodies::json::short_label(body)).with("body_fingerprint", body.fingerprint())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub(crate) fn float_le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs || (lhs - rhs) <= FLOAT_REL_TOL * lhs.abs().max(rhs.abs())
}

/// Envelope constants taken from the proofs; all overridable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstants {
    /// Discrete Borell constant (numeric value of the proof's `4(K₀+1)`, rounded up).
    pub borell: f64,
    /// Upper mean-width constant.
    pub meanwidth_upper: f64,
    /// Lower mean-width constant `(1 − e^{−1/4})/2`.
    pub meanwidth_lower: f64,
    /// The `C` in the lower mean-width precondition, twice [`Self::borell`] by default.
    pub lower_scale: f64,
}

impl Default for ReferenceConstants {
    fn default() -> Self {
        ReferenceConstants {
            borell: 16.0,
            meanwidth_upper: 3.0 * std::f64::consts::E,
            meanwidth_lower: (1.0 - (-0.25f64).exp()) / 2.0,
            lower_scale: 32.0,
        }
    }
}

/// `sup_{q>=1} 2Γ(1+q)^{1/q}/(q log 2)`, the constant inside the discrete Borell proof.
pub fn borell_proof_constant() -> f64 {
    let f = |q: f64| 2.0 * (ln_gamma(1.0 + q) / q).exp() / (q * std::f64::consts::LN_2);
    let k0 = (0..=49_000).map(|i| f(1.0 + i as f64 * 1e-3)).fold(f64::MIN, f64::max);
    4.0 * (k0 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proof_constant_below_reference() {
        let c = borell_proof_constant();
        assert!((c - 15.54).abs() < 0.01, "{c}");
        assert!(c <= ReferenceConstants::default().borell);
    }

    #[test]
    fn float_comparison_tolerates_roundoff_only() {
        assert!(float_le(1.0, 1.0));
        assert!(float_le(1.0 + 1e-12, 1.0));
        assert!(!float_le(1.0 + 1e-6, 1.0));
    }
}
