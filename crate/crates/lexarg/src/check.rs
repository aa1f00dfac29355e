//! `check`: scheme validation, the inequalities every legal case satisfies,
//! and agreement with the possible-world oracle.

use lexarg_core::blaf::{BlafCase, CaseError};
use lexarg_core::oracle::{oracle_entail_all, OracleError};
use serde::{Deserialize, Serialize};

use crate::payload::{ConflictPayload, RationalPayload};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub label: String,
    pub lhs: RationalPayload,
    pub rhs: RationalPayload,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub argument: String,
    pub marginal: [RationalPayload; 2],
    pub oracle: [RationalPayload; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum OracleReport {
    Agree {
        arguments: usize,
    },
    Disagree {
        mismatches: Vec<Mismatch>,
    },
    /// One side found the constraints satisfiable, the other did not.
    Satisfiability {
        marginal: bool,
        oracle: bool,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub arguments: usize,
    pub constraints: usize,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<ConflictPayload>,
    pub inequalities: Vec<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

impl CheckReport {
    /// One line per failed check.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .inequalities
            .iter()
            .filter(|i| !i.holds)
            .map(|i| format!("violated: {} ({} > {})", i.label, i.lhs.display, i.rhs.display))
            .collect();
        if let Some(c) = &self.conflict {
            out.push(c.message.clone());
        }
        if let Some(OracleReport::Satisfiability { marginal, oracle }) = &self.oracle {
            out.push(format!("satisfiability differs: marginal {marginal}, worlds {oracle}"));
        }
        if let Some(OracleReport::Disagree { mismatches }) = &self.oracle {
            for m in mismatches {
                out.push(format!(
                    "oracle disagrees on {}: marginal [{}/{}, {}/{}], worlds [{}/{}, {}/{}]",
                    m.argument,
                    m.marginal[0].num,
                    m.marginal[0].den,
                    m.marginal[1].num,
                    m.marginal[1].den,
                    m.oracle[0].num,
                    m.oracle[0].den,
                    m.oracle[1].num,
                    m.oracle[1].den,
                ));
            }
        }
        out
    }
}

/// Runs every check on an already validated case.
pub fn check(case: &BlafCase, with_oracle: bool) -> Result<CheckReport, CaseError> {
    let cs = case.constraints();
    let mut report = CheckReport {
        passed: true,
        arguments: case.graph().len(),
        constraints: cs.len(),
        warnings: case.warnings().to_vec(),
        conflict: None,
        inequalities: Vec::new(),
        oracle: None,
    };
    let bounds = match case.solve() {
        Ok(b) => Some(b),
        Err(CaseError::Unsatisfiable { conflict }) => {
            report.conflict = Some(ConflictPayload::new(&conflict));
            None
        }
        Err(e) => return Err(e),
    };
    if let (Some(b), true) = (&bounds, case.is_legal()) {
        report.inequalities = case
            .check_scheme_inequalities(b)?
            .into_iter()
            .map(|c| InequalityReport {
                label: c.label,
                lhs: RationalPayload::new(&c.lhs),
                rhs: RationalPayload::new(&c.rhs),
                holds: c.holds,
            })
            .collect();
    }
    if with_oracle {
        report.oracle = Some(match (oracle_entail_all(case.graph(), &cs), &bounds) {
            (Err(OracleError::TooLarge { arguments, limit }), _) => {
                OracleReport::Skipped { reason: format!("{arguments} arguments exceed the oracle limit of {limit}") }
            }
            (Err(OracleError::Unsatisfiable), None) => OracleReport::Agree { arguments: case.graph().len() },
            (Ok(_), None) => OracleReport::Satisfiability { marginal: false, oracle: true },
            (Err(OracleError::Unsatisfiable), Some(_)) => {
                OracleReport::Satisfiability { marginal: true, oracle: false }
            }
            (Err(e), _) => OracleReport::Skipped { reason: e.to_string() },
            (Ok(worlds), Some(marginal)) => {
                let mismatches: Vec<Mismatch> = marginal
                    .iter()
                    .zip(worlds.iter())
                    .filter(|((_, m), (_, w))| m != w)
                    .map(|((arg, m), (_, w))| Mismatch {
                        argument: arg.as_str().to_string(),
                        marginal: [RationalPayload::new(&m.lower), RationalPayload::new(&m.upper)],
                        oracle: [RationalPayload::new(&w.lower), RationalPayload::new(&w.upper)],
                    })
                    .collect();
                if mismatches.is_empty() {
                    OracleReport::Agree { arguments: case.graph().len() }
                } else {
                    OracleReport::Disagree { mismatches }
                }
            }
        });
    }
    report.passed = report.conflict.is_none()
        && report.inequalities.iter().all(|i| i.holds)
        && !matches!(report.oracle, Some(OracleReport::Disagree { .. } | OracleReport::Satisfiability { .. }));
    Ok(report)
}
