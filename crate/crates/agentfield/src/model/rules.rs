//! Contact-catalysed type-change rules.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One second-order reaction: an agent of type `subject` in contact with an
/// agent of type `catalyst` becomes `product` at `rate` per qualifying
/// contact. The catalyst never changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRule {
    pub subject: usize,
    pub catalyst: usize,
    pub product: usize,
    pub rate: f64,
    /// Net change of the per-type counts when the rule fires:
    /// `nu[subject] = -1`, `nu[product] = +1`, zero elsewhere.
    pub nu: Vec<i32>,
}

impl InteractionRule {
    pub fn validate(&self, n_types: usize) -> Result<()> {
        for (name, idx) in [
            ("subject", self.subject),
            ("catalyst", self.catalyst),
            ("product", self.product),
        ] {
            if idx >= n_types {
                return Err(Error::Config(format!(
                    "rule {name} index {idx} out of range for {n_types} types"
                )));
            }
        }
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::Config(format!("rule rate must be >= 0, got {}", self.rate)));
        }
        if self.nu.len() != n_types {
            return Err(Error::Config(format!(
                "rule stoichiometry has {} entries for {} types",
                self.nu.len(),
                n_types
            )));
        }
        Ok(())
    }
}

/// Build a rule and its stoichiometry vector.
pub fn build_rule(
    subject: usize,
    catalyst: usize,
    product: usize,
    rate: f64,
    n_types: usize,
) -> Result<InteractionRule> {
    let mut nu = vec![0i32; n_types];
    if subject >= n_types || catalyst >= n_types || product >= n_types {
        return Err(Error::Config(format!(
            "rule indices ({subject}, {catalyst}, {product}) out of range for {n_types} types"
        )));
    }
    nu[subject] -= 1;
    nu[product] += 1;
    let rule = InteractionRule { subject, catalyst, product, rate, nu };
    rule.validate(n_types)?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adoption_rule_stoichiometry() {
        // subject 0 + catalyst 1 -> two of type 1
        let r = build_rule(0, 1, 1, 0.1, 2).unwrap();
        assert_eq!(r.nu, vec![-1, 1]);
        assert_eq!(r.rate, 0.1);
    }

    #[test]
    fn three_type_rule_stoichiometry() {
        let r = build_rule(2, 0, 1, 0.5, 3).unwrap();
        assert_eq!(r.nu, vec![0, 1, -1]);
    }

    #[test]
    fn self_product_is_a_no_op_rule() {
        let r = build_rule(1, 0, 1, 0.3, 2).unwrap();
        assert_eq!(r.nu, vec![0, 0]);
    }

    #[test]
    fn invalid_rules_rejected() {
        assert!(build_rule(2, 1, 1, 0.1, 2).is_err());
        assert!(build_rule(0, 2, 1, 0.1, 2).is_err());
        assert!(build_rule(0, 1, 2, 0.1, 2).is_err());
        let mut r = build_rule(0, 1, 1, 0.1, 2).unwrap();
        r.rate = -0.1;
        assert!(r.validate(2).is_err());
        r.rate = f64::NAN;
        assert!(r.validate(2).is_err());
    }
}
