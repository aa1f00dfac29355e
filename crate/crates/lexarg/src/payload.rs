//! JSON shapes shared by the session log, `check` and the HTTP service.
//!
//! Rationals travel as decimal-string numerator and denominator plus a
//! two-digit display string, so no value passes through a float.

use lexarg_core::blaf::{BlafCase, CaseError};
use lexarg_core::constraint::Provenance;
use lexarg_core::explain::{Explanation, Reason, VerdictExplanation};
use lexarg_core::rational::{format_two_digits, parse_rational, Rational};
use serde::{Deserialize, Serialize};

use crate::table::{BeliefRow, BeliefTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPayload {
    pub num: String,
    pub den: String,
    pub display: String,
}

impl RationalPayload {
    pub fn new(value: &Rational) -> Self {
        RationalPayload {
            num: value.numer().to_string(),
            den: value.denom().to_string(),
            display: format_two_digits(value),
        }
    }

    pub fn value(&self) -> Option<Rational> {
        parse_rational(&format!("{}/{}", self.num, self.den)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefPayload {
    pub argument: String,
    pub lower: RationalPayload,
    pub upper: RationalPayload,
    /// Table cell as printed by `solve`.
    pub cell: String,
    pub constrained: bool,
}

impl BeliefPayload {
    pub fn new(row: &BeliefRow) -> Self {
        BeliefPayload {
            argument: row.argument.clone(),
            lower: RationalPayload::new(&row.lower),
            upper: RationalPayload::new(&row.upper),
            cell: row.cell(false),
            constrained: row.constrained,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefsPayload {
    /// Upper bound on `Innocence`; absent outside the legal framework.
    pub innocence: Option<RationalPayload>,
    pub beliefs: Vec<BeliefPayload>,
}

impl BeliefsPayload {
    pub fn new(table: &BeliefTable) -> Self {
        let innocence = table.rows.iter().find(|r| r.scalar).map(|r| RationalPayload::new(&r.upper));
        BeliefsPayload { innocence, beliefs: table.rows.iter().map(BeliefPayload::new).collect() }
    }
}

/// Why a state has no beliefs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictPayload {
    pub message: String,
    /// Ids of the assumptions in the conflict.
    pub assumptions: Vec<String>,
    /// Every constraint in the conflict, such as `IE` or `assumption a2`.
    pub constraints: Vec<String>,
}

impl ConflictPayload {
    pub fn new(conflict: &[Provenance]) -> Self {
        let assumptions = conflict
            .iter()
            .filter_map(|p| match p {
                Provenance::Assumption(id) => Some(id.clone()),
                _ => None,
            })
            .collect();
        ConflictPayload {
            message: CaseError::Unsatisfiable { conflict: conflict.to_vec() }.to_string(),
            assumptions,
            constraints: conflict.iter().map(ToString::to_string).collect(),
        }
    }

    /// `conflicting assumptions: a1 (p(T3) >= 0.7), a2 (p(E1) = 1)`.
    pub fn describe(&self, case: &BlafCase) -> String {
        if self.assumptions.is_empty() {
            return format!("constraints are unsatisfiable without any assumption: {}", self.constraints.join(", "));
        }
        let named: Vec<String> = self
            .assumptions
            .iter()
            .map(|id| match case.assumption(id) {
                Some(a) => format!("{id} ({})", a.text),
                None => id.clone(),
            })
            .collect();
        format!("unsatisfiable; conflicting assumptions: {}", named.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonPayload {
    pub kind: String,
    pub arguments: Vec<String>,
    pub induced: RationalPayload,
    pub provenance: Vec<String>,
    pub label: String,
    pub details: Vec<ExplanationPayload>,
}

impl ReasonPayload {
    pub fn new(r: &Reason) -> Self {
        ReasonPayload {
            kind: r.kind.as_str().to_string(),
            arguments: r.arguments.iter().map(|a| a.as_str().to_string()).collect(),
            induced: RationalPayload::new(&r.induced),
            provenance: r.provenance.iter().map(ToString::to_string).collect(),
            label: r.label.clone(),
            details: r.details.iter().map(ExplanationPayload::new).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationPayload {
    pub argument: String,
    pub bound: String,
    pub value: RationalPayload,
    pub note: Option<String>,
    pub narrative: String,
    pub reasons: Vec<ReasonPayload>,
}

impl ExplanationPayload {
    pub fn new(e: &Explanation) -> Self {
        ExplanationPayload {
            argument: e.subject.as_str().to_string(),
            bound: e.bound.as_str().to_string(),
            value: RationalPayload::new(&e.value),
            note: e.note.map(|n| n.as_str().to_string()),
            narrative: e.narrative(),
            reasons: e.reasons.iter().map(ReasonPayload::new).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictPayload {
    pub class: String,
    pub threshold: RationalPayload,
    pub einc_lower: RationalPayload,
    pub eex_lower: RationalPayload,
    pub narrative: String,
    pub explanation: Option<ExplanationPayload>,
}

impl VerdictPayload {
    pub fn new(v: &VerdictExplanation) -> Self {
        VerdictPayload {
            class: v.class.kind.as_str().to_string(),
            threshold: RationalPayload::new(&v.class.threshold),
            einc_lower: RationalPayload::new(&v.einc_lower),
            eex_lower: RationalPayload::new(&v.eex_lower),
            narrative: v.narrative(),
            explanation: v.explanation.as_ref().map(ExplanationPayload::new),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionPayload {
    pub id: String,
    pub constraint: String,
    /// Canonical `<=` forms.
    pub canonical: Vec<String>,
}

impl AssumptionPayload {
    pub fn new(a: &lexarg_core::blaf::Assumption) -> Self {
        AssumptionPayload {
            id: a.id.clone(),
            constraint: a.text.clone(),
            canonical: a.constraints.iter().map(lexarg_core::dsl::print_constraint).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lexarg_core::rational::ratio;

    #[test]
    fn rationals_round_trip() {
        let p = RationalPayload::new(&ratio(8, 9));
        assert_eq!((p.num.as_str(), p.den.as_str(), p.display.as_str()), ("8", "9", "0.89"));
        assert_eq!(p.value(), Some(ratio(8, 9)));
        let json = serde_json::to_string(&RationalPayload::new(&ratio(-1, 10))).unwrap();
        assert_eq!(json, r#"{"num":"-1","den":"10","display":"-0.1"}"#);
    }
}
