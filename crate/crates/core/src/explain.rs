//! Verdict classification and explanations of solved bounds.
//!
//! Explanations are read off the solved bounds and the constraint
//! provenance. A lower bound on `a` is traced to supporters (`w·lower(s)`),
//! collective groups (`Σ wᵢ·lower(mᵢ)`) and assumptions. An upper bound is
//! traced to attackers (ceiling `1 - |w|·lower(t)`), supported children
//! (ceiling `upper(b)/w`), the IE/EE chain through `Innocence`, and
//! assumptions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::blaf::{BlafCase, EEX, EINC, INNOCENCE};
use crate::constraint::{LinearAtomicConstraint, Provenance};
use crate::epistemic::BeliefBounds;
use crate::graph::{ArgumentId, GraphError};
use crate::rational::{format_two_digits, one, ratio, zero, Rational};

pub fn default_threshold() -> Rational {
    ratio(3, 4)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("threshold {0} must lie strictly between 1/2 and 1")]
    ThresholdOutOfRange(String),
    #[error("verdicts need Innocence, Einc and Eex")]
    NotLegal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    LackOfEvidence,
    InnocentByExculpatory,
    GuiltyByInculpatory,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::LackOfEvidence => "lack-of-evidence",
            VerdictKind::InnocentByExculpatory => "innocent-by-exculpatory",
            VerdictKind::GuiltyByInculpatory => "guilty-by-inculpatory",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictClass {
    pub kind: VerdictKind,
    pub threshold: Rational,
}

/// `lower(Eex) > 1/2` is innocent by exculpatory evidence, otherwise
/// `lower(Einc) > threshold` is guilty, otherwise lack of evidence.
pub fn classify(bounds: &BeliefBounds, threshold: &Rational) -> Result<VerdictClass, ExplainError> {
    if *threshold <= ratio(1, 2) || *threshold >= one() {
        return Err(ExplainError::ThresholdOutOfRange(crate::rational::format_exact(threshold)));
    }
    let einc = bounds.lower(EINC).ok_or(ExplainError::NotLegal)?;
    let eex = bounds.lower(EEX).ok_or(ExplainError::NotLegal)?;
    let kind = if *eex > ratio(1, 2) {
        VerdictKind::InnocentByExculpatory
    } else if einc > threshold {
        VerdictKind::GuiltyByInculpatory
    } else {
        VerdictKind::LackOfEvidence
    };
    Ok(VerdictClass { kind, threshold: threshold.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Bound::Lower => "≥",
            Bound::Upper => "≤",
        }
    }
}

impl core::str::FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lower" => Ok(Bound::Lower),
            "upper" => Ok(Bound::Upper),
            other => Err(format!("unknown bound `{other}` (expected lower or upper)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReasonKind {
    Supporter,
    Attacker,
    SupportedChild,
    CsGroup,
    MetaChain,
    Assumption,
}

impl ReasonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonKind::Supporter => "supporter",
            ReasonKind::Attacker => "attacker",
            ReasonKind::SupportedChild => "supported-child",
            ReasonKind::CsGroup => "cs-group",
            ReasonKind::MetaChain => "meta-chain",
            ReasonKind::Assumption => "assumption",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Note {
    /// Lower bound 0 or upper bound 1.
    Trivial,
    /// Upper bound of a collective-group member.
    Unavailable,
    /// Already being explained further up the tree.
    Cycle,
    /// No rule accounts for the bound.
    Unexplained,
}

impl Note {
    pub fn as_str(self) -> &'static str {
        match self {
            Note::Trivial => "trivial",
            Note::Unavailable => "unavailable",
            Note::Cycle => "cycle",
            Note::Unexplained => "unexplained",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reason {
    pub kind: ReasonKind,
    pub arguments: Vec<ArgumentId>,
    /// Bound this reason alone forces on the subject.
    pub induced: Rational,
    pub provenance: Vec<Provenance>,
    /// Short rendering such as `T2 (≥ 0.7)`.
    pub label: String,
    pub details: Vec<Explanation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub subject: ArgumentId,
    pub bound: Bound,
    pub value: Rational,
    pub reasons: Vec<Reason>,
    pub note: Option<Note>,
}

impl Explanation {
    /// `Eex ≥ 0.7 via T2 (≥ 0.7) via T3 (≥ 0.7)`.
    pub fn narrative(&self) -> String {
        render(self, usize::MAX)
    }

    /// Every explanation in the tree, this one first.
    pub fn walk(&self) -> Vec<&Explanation> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let e = out[i];
            for r in &e.reasons {
                out.extend(r.details.iter());
            }
            i += 1;
        }
        out
    }
}

fn headline(e: &Explanation) -> String {
    let mut s = format!("{} {} {}", e.subject, e.bound.symbol(), format_two_digits(&e.value));
    match e.note {
        Some(Note::Trivial) => s.push_str(&format!(": trivial {} bound", e.bound.as_str())),
        Some(Note::Unavailable) => s.push_str(": explanation unavailable: collective-support interaction"),
        Some(Note::Cycle) => s.push_str(" (cycle)"),
        Some(Note::Unexplained) => s.push_str(": no direct reason"),
        None => {}
    }
    s
}

fn chain(e: &Explanation, depth: usize) -> String {
    if depth == 0 || e.reasons.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = e
        .reasons
        .iter()
        .map(|r| {
            let mut s = r.label.clone();
            if r.details.len() == 1 {
                let d = &r.details[0];
                if d.note == Some(Note::Cycle) {
                    s.push_str(" (cycle)");
                } else {
                    s.push_str(&chain(d, depth - 1));
                }
            } else {
                let inner: Vec<String> = r
                    .details
                    .iter()
                    .filter(|d| !d.reasons.is_empty() && depth > 1)
                    .map(|d| format!("{}{}", d.subject, chain(d, depth - 1)))
                    .collect();
                if !inner.is_empty() {
                    s.push_str(&format!(" {{{}}}", inner.join("; ")));
                }
            }
            s
        })
        .collect();
    if parts.len() == 1 {
        format!(" via {}", parts[0])
    } else {
        format!(" via [{}]", parts.join("; "))
    }
}

/// Renders `e` down to `depth` levels of reasons.
pub fn render(e: &Explanation, depth: usize) -> String {
    format!("{}{}", headline(e), chain(e, depth))
}

/// Classification plus the explanation of the bound that decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictExplanation {
    pub class: VerdictClass,
    pub einc_lower: Rational,
    pub eex_lower: Rational,
    pub explanation: Option<Explanation>,
}

impl VerdictExplanation {
    pub fn narrative(&self) -> String {
        let tail = |label: &str, e: &Explanation| format!("{label} ({}){}", headline(e), chain(e, usize::MAX));
        match (&self.class.kind, &self.explanation) {
            (VerdictKind::InnocentByExculpatory, Some(e)) => format!("innocent: {}", tail("exculpatory evidence", e)),
            (VerdictKind::GuiltyByInculpatory, Some(e)) => format!("not innocent: {}", tail("inculpatory evidence", e)),
            _ => format!(
                "innocent: lack of evidence (Einc ≥ {}, Eex ≥ {})",
                format_two_digits(&self.einc_lower),
                format_two_digits(&self.eex_lower)
            ),
        }
    }
}

pub fn explain_verdict(
    case: &BlafCase,
    bounds: &BeliefBounds,
    threshold: &Rational,
    depth: usize,
) -> Result<VerdictExplanation, ExplainError> {
    let class = classify(bounds, threshold)?;
    let explanation = match class.kind {
        VerdictKind::InnocentByExculpatory => Some(explain(case, bounds, EEX, Bound::Lower, depth)?),
        VerdictKind::GuiltyByInculpatory => Some(explain(case, bounds, EINC, Bound::Lower, depth)?),
        VerdictKind::LackOfEvidence => None,
    };
    Ok(VerdictExplanation {
        einc_lower: bounds.lower(EINC).cloned().unwrap_or_else(zero),
        eex_lower: bounds.lower(EEX).cloned().unwrap_or_else(zero),
        class,
        explanation,
    })
}

/// Explains one bound of `arg`. `depth` 0 gives the bound alone; each further
/// level explains the arguments named by the reasons.
pub fn explain(
    case: &BlafCase,
    bounds: &BeliefBounds,
    arg: &str,
    bound: Bound,
    depth: usize,
) -> Result<Explanation, ExplainError> {
    let pos = case.graph().position(arg)?;
    let subject = case.graph().argument(pos).clone();
    let mut visiting = BTreeSet::new();
    Ok(Explainer { case, bounds }.explain(&subject, bound, depth, &mut visiting))
}

/// Every candidate reason for the bound, before selection. Exposed for
/// soundness checks.
pub fn candidate_reasons(
    case: &BlafCase,
    bounds: &BeliefBounds,
    arg: &str,
    bound: Bound,
) -> Result<Vec<Reason>, ExplainError> {
    let pos = case.graph().position(arg)?;
    let subject = case.graph().argument(pos).clone();
    let ex = Explainer { case, bounds };
    Ok(match bound {
        Bound::Lower => ex.lower_candidates(&subject),
        Bound::Upper => ex.upper_candidates(&subject).0,
    })
}

struct Explainer<'a> {
    case: &'a BlafCase,
    bounds: &'a BeliefBounds,
}

fn two(r: &Rational) -> String {
    format_two_digits(r)
}

fn weighted(name: &ArgumentId, symbol: &str, value: &Rational, w: &Rational) -> String {
    if w.abs().is_one() {
        format!("{name} ({symbol} {})", two(value))
    } else {
        format!("{name} ({symbol} {}, weight {})", two(value), two(&w.abs()))
    }
}

impl Explainer<'_> {
    fn lower(&self, a: &str) -> Rational {
        self.bounds.lower(a).cloned().unwrap_or_else(zero)
    }

    fn upper(&self, a: &str) -> Rational {
        self.bounds.upper(a).cloned().unwrap_or_else(one)
    }

    fn value(&self, a: &str, bound: Bound) -> Rational {
        match bound {
            Bound::Lower => self.lower(a),
            Bound::Upper => self.upper(a),
        }
    }

    fn explain(
        &self,
        subject: &ArgumentId,
        bound: Bound,
        depth: usize,
        visiting: &mut BTreeSet<(ArgumentId, Bound)>,
    ) -> Explanation {
        let value = self.value(subject.as_str(), bound);
        let mut e = Explanation { subject: subject.clone(), bound, value, reasons: Vec::new(), note: None };
        let trivial = match bound {
            Bound::Lower => e.value.is_zero(),
            Bound::Upper => e.value.is_one(),
        };
        if trivial {
            e.note = Some(Note::Trivial);
            return e;
        }
        if visiting.contains(&(subject.clone(), bound)) {
            e.note = Some(Note::Cycle);
            return e;
        }
        let reasons = match bound {
            Bound::Lower => select_lower(self.lower_candidates(subject)),
            Bound::Upper => {
                let (candidates, unavailable) = self.upper_candidates(subject);
                if unavailable && candidates.iter().all(|r| r.induced > e.value) {
                    e.note = Some(Note::Unavailable);
                    return e;
                }
                select_upper(candidates)
            }
        };
        if reasons.is_empty() {
            e.note = Some(Note::Unexplained);
            return e;
        }
        if depth == 0 {
            return e;
        }
        visiting.insert((subject.clone(), bound));
        e.reasons = reasons
            .into_iter()
            .map(|mut r| {
                if depth > 1 {
                    r.details =
                        self.followups(&r).into_iter().map(|(a, b)| self.explain(&a, b, depth - 1, visiting)).collect();
                }
                r
            })
            .collect();
        visiting.remove(&(subject.clone(), bound));
        e
    }

    /// Which bounds of which arguments a reason depends on.
    fn followups(&self, r: &Reason) -> Vec<(ArgumentId, Bound)> {
        match r.kind {
            ReasonKind::Supporter | ReasonKind::Attacker => vec![(r.arguments[0].clone(), Bound::Lower)],
            ReasonKind::CsGroup => r
                .arguments
                .iter()
                .filter(|m| self.lower(m.as_str()).is_positive())
                .map(|m| (m.clone(), Bound::Lower))
                .collect(),
            ReasonKind::SupportedChild => vec![(r.arguments[0].clone(), Bound::Upper)],
            // [Innocence, other]: the bound on Innocence comes from `other`'s lower bound.
            ReasonKind::MetaChain => vec![(r.arguments[1].clone(), Bound::Lower)],
            ReasonKind::Assumption => Vec::new(),
        }
    }

    fn lower_candidates(&self, subject: &ArgumentId) -> Vec<Reason> {
        let graph = self.case.graph();
        let legal = self.case.is_legal();
        let mut out = Vec::new();
        for edge in graph.incoming(subject.as_str()).expect("subject is in the graph") {
            if !edge.is_support() || self.case.in_group(edge.source.as_str(), subject.as_str()) {
                continue;
            }
            let s = &edge.source;
            let lower = self.lower(s.as_str());
            let provenance = if legal && subject.as_str() == INNOCENCE {
                Provenance::Exculpatory
            } else {
                Provenance::Support { source: s.clone(), target: subject.clone() }
            };
            out.push(Reason {
                kind: ReasonKind::Supporter,
                arguments: vec![s.clone()],
                induced: &edge.weight * &lower,
                provenance: vec![provenance],
                label: weighted(s, "≥", &lower, &edge.weight),
                details: Vec::new(),
            });
        }
        for group in self.case.groups().iter().filter(|g| g.target == *subject) {
            let mut induced = zero();
            let mut parts = Vec::new();
            for (m, w) in &group.members {
                let lower = self.lower(m.as_str());
                induced += w * &lower;
                parts.push(weighted(m, "≥", &lower, w));
            }
            out.push(Reason {
                kind: ReasonKind::CsGroup,
                arguments: group.members.iter().map(|(m, _)| m.clone()).collect(),
                induced,
                provenance: vec![Provenance::Collective { target: subject.clone() }],
                label: format!("jointly {{{}}}", parts.join(" + ")),
                details: Vec::new(),
            });
        }
        out.extend(self.assumption_reasons(subject, Bound::Lower));
        out
    }

    /// Candidates plus whether the subject is a collective-group member.
    fn upper_candidates(&self, subject: &ArgumentId) -> (Vec<Reason>, bool) {
        let graph = self.case.graph();
        let legal = self.case.is_legal();
        let name = subject.as_str();
        let mut out = Vec::new();
        for edge in graph.incoming(name).expect("subject is in the graph") {
            if !edge.is_attack() {
                continue;
            }
            let t = &edge.source;
            let lower = self.lower(t.as_str());
            let provenance = if legal && name == INNOCENCE {
                Provenance::Inculpatory
            } else {
                Provenance::Attack { source: t.clone(), target: subject.clone() }
            };
            out.push(Reason {
                kind: ReasonKind::Attacker,
                arguments: vec![t.clone()],
                induced: one() - edge.weight.abs() * &lower,
                provenance: vec![provenance],
                label: format!("attacked by {}", weighted(t, "≥", &lower, &edge.weight)),
                details: Vec::new(),
            });
        }
        for edge in graph.outgoing(name).expect("subject is in the graph") {
            if !edge.is_support() || self.case.in_group(name, edge.target.as_str()) {
                continue;
            }
            let b = &edge.target;
            let upper = self.upper(b.as_str());
            let ceiling = core::cmp::min(one(), &upper / &edge.weight);
            if legal && b.as_str() == INNOCENCE {
                let einc = ArgumentId::new(EINC).expect("valid identifier");
                out.push(Reason {
                    kind: ReasonKind::MetaChain,
                    arguments: vec![b.clone(), einc.clone()],
                    induced: ceiling,
                    provenance: vec![Provenance::Exculpatory, Provenance::Inculpatory],
                    label: format!("Innocence (≤ {}) from Einc (≥ {})", two(&upper), two(&self.lower(EINC))),
                    details: Vec::new(),
                });
            } else {
                out.push(Reason {
                    kind: ReasonKind::SupportedChild,
                    arguments: vec![b.clone()],
                    induced: ceiling,
                    provenance: vec![Provenance::Support { source: subject.clone(), target: b.clone() }],
                    label: format!("supports {}", weighted(b, "≤", &upper, &edge.weight)),
                    details: Vec::new(),
                });
            }
        }
        if legal && name == EINC {
            let inn = ArgumentId::new(INNOCENCE).expect("valid identifier");
            let eex = ArgumentId::new(EEX).expect("valid identifier");
            let lower = self.lower(INNOCENCE);
            out.push(Reason {
                kind: ReasonKind::MetaChain,
                arguments: vec![inn, eex],
                induced: one() - &lower,
                provenance: vec![Provenance::Inculpatory, Provenance::Exculpatory],
                label: format!("Innocence (≥ {}) from Eex (≥ {})", two(&lower), two(&self.lower(EEX))),
                details: Vec::new(),
            });
        }
        out.extend(self.assumption_reasons(subject, Bound::Upper));
        let member = self.case.groups_with_member(name).next().is_some();
        (out, member)
    }

    /// Bounds forced on `subject` by single assumption constraints, with the
    /// other arguments at their solved bounds.
    fn assumption_reasons(&self, subject: &ArgumentId, bound: Bound) -> Vec<Reason> {
        let mut out = Vec::new();
        for a in self.case.assumptions() {
            let mut best: Option<Rational> = None;
            for c in &a.constraints {
                if let Some(v) = self.implied(c, subject, bound) {
                    best = Some(match (best, bound) {
                        (None, _) => v,
                        (Some(b), Bound::Lower) => core::cmp::max(b, v),
                        (Some(b), Bound::Upper) => core::cmp::min(b, v),
                    });
                }
            }
            let Some(induced) = best else { continue };
            let nontrivial = match bound {
                Bound::Lower => induced.is_positive(),
                Bound::Upper => induced < one(),
            };
            if nontrivial {
                out.push(Reason {
                    kind: ReasonKind::Assumption,
                    arguments: vec![subject.clone()],
                    induced,
                    provenance: vec![Provenance::Assumption(a.id.clone())],
                    label: format!("assumption {} ({})", a.id, a.text.trim()),
                    details: Vec::new(),
                });
            }
        }
        out
    }

    fn implied(&self, c: &LinearAtomicConstraint, subject: &ArgumentId, bound: Bound) -> Option<Rational> {
        let coeff = c.coefficient(subject.as_str())?;
        let wanted = match bound {
            Bound::Lower => coeff.is_negative(),
            Bound::Upper => coeff.is_positive(),
        };
        if !wanted {
            return None;
        }
        // Σ_{j≠a} a_j·x_j at its minimum over the solved box.
        let mut rest = zero();
        for (arg, a) in c.terms() {
            if arg == subject {
                continue;
            }
            rest += if a.is_positive() { a * self.lower(arg.as_str()) } else { a * self.upper(arg.as_str()) };
        }
        let v = (c.bound() - rest) / coeff;
        Some(match bound {
            Bound::Lower => core::cmp::max(zero(), v),
            Bound::Upper => core::cmp::min(one(), v),
        })
    }
}

fn sort_key(r: &Reason) -> (u8, &[ArgumentId]) {
    (u8::from(r.kind == ReasonKind::Assumption), &r.arguments)
}

/// Structural reasons reaching the largest induced bound, plus every
/// assumption reason.
fn select_lower(candidates: Vec<Reason>) -> Vec<Reason> {
    let best = candidates
        .iter()
        .filter(|r| r.kind != ReasonKind::Assumption)
        .map(|r| r.induced.clone())
        .max()
        .filter(Signed::is_positive);
    let mut out: Vec<Reason> = candidates
        .into_iter()
        .filter(|r| r.kind == ReasonKind::Assumption || Some(&r.induced) == best.as_ref())
        .collect();
    out.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    out
}

/// Attacker-type ceilings (`1 - L`) against child-type ceilings (`U`): the
/// smaller side is reported, both when equal.
fn select_upper(candidates: Vec<Reason>) -> Vec<Reason> {
    let is_attack_side = |r: &Reason| {
        r.kind == ReasonKind::Attacker
            || (r.kind == ReasonKind::MetaChain && r.provenance[0] == Provenance::Inculpatory)
    };
    let structural = |r: &Reason| r.kind != ReasonKind::Assumption;
    let attack = candidates.iter().filter(|r| is_attack_side(r)).map(|r| r.induced.clone()).min();
    let child = candidates.iter().filter(|r| structural(r) && !is_attack_side(r)).map(|r| r.induced.clone()).min();
    let best = match (attack, child) {
        (Some(a), Some(c)) => Some(core::cmp::min(a, c)),
        (a, c) => a.or(c),
    }
    .filter(|v| *v < one());
    let mut out: Vec<Reason> = candidates
        .into_iter()
        .filter(|r| r.kind == ReasonKind::Assumption || (structural(r) && Some(&r.induced) == best.as_ref()))
        .collect();
    out.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaf::{BlafBuilder, Role};
    use crate::rational::int;

    fn example1() -> BlafCase {
        BlafBuilder::legal()
            .argument("T1", Role::SubHypothesis)
            .argument("T2", Role::SubHypothesis)
            .argument("T3", Role::SubHypothesis)
            .argument("E1", Role::Evidence)
            .edge("T1", EINC, ratio(9, 10))
            .edge("E1", EINC, int(1))
            .edge("T2", EEX, int(1))
            .edge("T3", "T2", int(1))
            .build()
            .unwrap()
    }

    #[test]
    fn verdict_classes() {
        let t = default_threshold();
        let case = example1();
        let b1 = case.solve().unwrap();
        assert_eq!(classify(&b1, &t).unwrap().kind, VerdictKind::LackOfEvidence);
        let (c2, _) = case.assume("p(T3) >= 0.7").unwrap();
        let b2 = c2.solve().unwrap();
        assert_eq!(classify(&b2, &t).unwrap().kind, VerdictKind::InnocentByExculpatory);
        let (c3, _) = case.assume("p(E1) >= 0.9").unwrap();
        let b3 = c3.solve().unwrap();
        assert_eq!(classify(&b3, &t).unwrap().kind, VerdictKind::GuiltyByInculpatory);
        assert!(classify(&b3, &ratio(1, 2)).is_err());
        assert!(classify(&b3, &int(1)).is_err());
    }

    #[test]
    fn exculpatory_chain() {
        let (case, _) = example1().assume("p(T3) >= 0.7").unwrap();
        let b = case.solve().unwrap();
        let v = explain_verdict(&case, &b, &default_threshold(), 2).unwrap();
        assert_eq!(v.narrative(), "innocent: exculpatory evidence (Eex ≥ 0.7) via T2 (≥ 0.7) via T3 (≥ 0.7)");
        let v = explain_verdict(&case, &b, &default_threshold(), 0).unwrap();
        assert_eq!(v.narrative(), "innocent: exculpatory evidence (Eex ≥ 0.7)");
        let e = explain(&case, &b, "T3", Bound::Lower, 1).unwrap();
        assert_eq!(e.narrative(), "T3 ≥ 0.7 via assumption a1 (p(T3) >= 0.7)");
    }

    #[test]
    fn upper_bound_through_innocence() {
        let (case, _) = example1().assume("p(T3) >= 0.7").unwrap();
        let b = case.solve().unwrap();
        let e = explain(&case, &b, EINC, Bound::Upper, 2).unwrap();
        assert_eq!(e.reasons.len(), 1);
        assert_eq!(e.reasons[0].kind, ReasonKind::MetaChain);
        assert_eq!(e.reasons[0].induced, ratio(3, 10));
        assert_eq!(e.narrative(), "Einc ≤ 0.3 via Innocence (≥ 0.7) from Eex (≥ 0.7) via T2 (≥ 0.7)");
        let e = explain(&case, &b, "T1", Bound::Upper, 1).unwrap();
        assert_eq!(e.narrative(), "T1 ≤ 0.33 via supports Einc (≤ 0.3, weight 0.9)");
    }

    #[test]
    fn trivial_bounds_and_depth_zero() {
        let case = example1();
        let b = case.solve().unwrap();
        let e = explain(&case, &b, "T1", Bound::Lower, 3).unwrap();
        assert_eq!(e.note, Some(Note::Trivial));
        assert_eq!(e.narrative(), "T1 ≥ 0: trivial lower bound");
        let e = explain(&case, &b, "T1", Bound::Upper, 3).unwrap();
        assert_eq!(e.narrative(), "T1 ≤ 1: trivial upper bound");
        let (case, _) = case.assume("p(T3) >= 0.7").unwrap();
        let b = case.solve().unwrap();
        let e = explain(&case, &b, EEX, Bound::Lower, 0).unwrap();
        assert!(e.reasons.is_empty());
        assert_eq!(e.narrative(), "Eex ≥ 0.7");
    }

    #[test]
    fn self_support_cycle_terminates() {
        let case = BlafBuilder::plain().argument("A", Role::Evidence).edge("A", "A", int(1)).build().unwrap();
        let (case, _) = case.assume("p(A) >= 0.5").unwrap();
        let b = case.solve().unwrap();
        let e = explain(&case, &b, "A", Bound::Lower, 5).unwrap();
        assert_eq!(e.narrative(), "A ≥ 0.5 via [A (≥ 0.5) (cycle); assumption a1 (p(A) >= 0.5)]");
    }
}
