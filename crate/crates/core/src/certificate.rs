//! Machine-readable verdicts, serialized as deterministic JSON (map keys
//! sorted, exact rationals rendered as `p/q` strings).

use serde_json::{json, Value};

use crate::cyclotomic::CyclotomicElement;
use crate::galois::GroupMode;
use crate::rational::Rational;

pub(crate) fn mode_label(mode: GroupMode) -> &'static str {
    match mode {
        GroupMode::Full => "full",
        GroupMode::RealQuotient => "real-quotient",
    }
}

pub(crate) fn element_json(x: &CyclotomicElement) -> Value {
    let coords: Vec<Value> =
        x.coords().iter().map(|c| Value::String(c.to_string())).collect();
    json!({ "level": x.level(), "coords": coords })
}

/// Verdict of both normality tests on one subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupVerdict {
    /// canonical representatives, sorted
    pub subgroup: Vec<u64>,
    pub character_sums_nonzero: bool,
    pub determinant_nonzero: bool,
    /// indices into the subgroup's canonical character list
    pub vanishing_characters: Vec<usize>,
}

impl SubgroupVerdict {
    pub fn passed(&self) -> bool {
        self.character_sums_nonzero && self.determinant_nonzero
    }

    fn to_json(&self) -> Value {
        json!({
            "elements": self.subgroup,
            "character_sums_nonzero": self.character_sums_nonzero,
            "determinant_nonzero": self.determinant_nonzero,
            "vanishing_characters": self.vanishing_characters,
        })
    }
}

/// Per-(level, mode, element, exponent) record of the complete-normality
/// verification: one verdict per subgroup, plus the overall conclusion,
/// which holds iff every subgroup passes both tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityCertificate {
    level: u64,
    mode: GroupMode,
    element: CyclotomicElement,
    exponent: u64,
    subgroups: Vec<SubgroupVerdict>,
    completely_normal: bool,
}

impl NormalityCertificate {
    pub(crate) fn new(
        level: u64,
        mode: GroupMode,
        element: CyclotomicElement,
        exponent: u64,
        subgroups: Vec<SubgroupVerdict>,
    ) -> Self {
        let completely_normal = subgroups.iter().all(SubgroupVerdict::passed);
        NormalityCertificate { level, mode, element, exponent, subgroups, completely_normal }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn mode(&self) -> GroupMode {
        self.mode
    }

    /// The element that was tested (already raised to `exponent`).
    pub fn element(&self) -> &CyclotomicElement {
        &self.element
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn subgroups(&self) -> &[SubgroupVerdict] {
        &self.subgroups
    }

    pub fn completely_normal(&self) -> bool {
        self.completely_normal
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "mode": mode_label(self.mode),
            "exponent": self.exponent,
            "element": element_json(&self.element),
            "subgroups": self.subgroups.iter().map(SubgroupVerdict::to_json).collect::<Vec<_>>(),
            "completely_normal": self.completely_normal,
        })
    }
}

/// Verdict of the valuation test on one subgroup of the (cyclic, additive)
/// Galois group of the discriminant-quotient function field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationVerdict {
    /// shear parameters t, sorted, identity 0 included
    pub subgroup: Vec<u64>,
    /// ord(x^sigma_t) - ord(x) for each nonidentity t, listed in subgroup
    /// order; identity normality needs every gap strictly positive
    pub order_gaps: Vec<Rational>,
    pub identity_dominates: bool,
}

impl ValuationVerdict {
    pub fn passed(&self) -> bool {
        self.identity_dominates
    }

    fn to_json(&self) -> Value {
        json!({
            "elements": self.subgroup,
            "order_gaps": self.order_gaps.iter().map(|g| Value::String(g.to_string())).collect::<Vec<_>>(),
            "identity_dominates": self.identity_dominates,
        })
    }
}

/// Verification record for the discriminant quotient at one level: the
/// exponent sums driving the valuation criterion, the observed q-order of
/// the quotient itself, and one valuation verdict per subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularCertificate {
    level: u64,
    truncation: Rational,
    series_order: Rational,
    exponent_sums: Vec<(u64, Rational)>,
    subgroups: Vec<ValuationVerdict>,
    completely_normal: bool,
}

impl ModularCertificate {
    pub(crate) fn new(
        level: u64,
        truncation: Rational,
        series_order: Rational,
        exponent_sums: Vec<(u64, Rational)>,
        subgroups: Vec<ValuationVerdict>,
    ) -> Self {
        let completely_normal = subgroups.iter().all(ValuationVerdict::passed);
        ModularCertificate {
            level,
            truncation,
            series_order,
            exponent_sums,
            subgroups,
            completely_normal,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn truncation(&self) -> &Rational {
        &self.truncation
    }

    /// q-order of the expanded quotient (cross-checked against 1 - level).
    pub fn series_order(&self) -> &Rational {
        &self.series_order
    }

    /// (t, S(level, t)) for t = 1 .. level-1.
    pub fn exponent_sums(&self) -> &[(u64, Rational)] {
        &self.exponent_sums
    }

    pub fn subgroups(&self) -> &[ValuationVerdict] {
        &self.subgroups
    }

    pub fn completely_normal(&self) -> bool {
        self.completely_normal
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "mode": "modular",
            "truncation": self.truncation.to_string(),
            "series_order": self.series_order.to_string(),
            "exponent_sums": self.exponent_sums.iter()
                .map(|(t, s)| json!({ "t": t, "sum": s.to_string() }))
                .collect::<Vec<_>>(),
            "subgroups": self.subgroups.iter().map(ValuationVerdict::to_json).collect::<Vec<_>>(),
            "completely_normal": self.completely_normal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn json_is_deterministic_and_sorted() {
        let cert = NormalityCertificate::new(
            5,
            GroupMode::RealQuotient,
            CyclotomicElement::one(5),
            1,
            vec![SubgroupVerdict {
                subgroup: vec![1, 2],
                character_sums_nonzero: false,
                determinant_nonzero: false,
                vanishing_characters: vec![1],
            }],
        );
        assert!(!cert.completely_normal());
        let s = serde_json::to_string(&cert.to_json()).unwrap();
        // keys serialize in sorted order; repeated runs are byte-identical
        assert!(s.starts_with("{\"completely_normal\":false,"));
        assert_eq!(s, serde_json::to_string(&cert.to_json()).unwrap());
    }

    #[test]
    fn modular_json_shape() {
        let cert = ModularCertificate::new(
            2,
            rat(40, 1),
            rat(-1, 1),
            vec![(1, rat(-3, 1))],
            vec![ValuationVerdict {
                subgroup: vec![0, 1],
                order_gaps: vec![rat(3, 2)],
                identity_dominates: true,
            }],
        );
        assert!(cert.completely_normal());
        let s = serde_json::to_string(&cert.to_json()).unwrap();
        assert!(s.contains("\"mode\":\"modular\""));
        assert!(s.contains("\"order_gaps\":[\"3/2\"]"));
        assert!(s.contains("\"sum\":\"-3\""));
        assert_eq!(s, serde_json::to_string(&cert.to_json()).unwrap());
    }
}
