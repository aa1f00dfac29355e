//! Linear atomic constraints over argument probabilities.
//!
//! Every constraint is kept in the canonical form `Σ aᵢ·p(Aᵢ) <= b` with no
//! zero coefficients. The scheme generators below give attack, support and
//! collective-support edges their meaning.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::graph::{ArgGraph, ArgumentId, Edge, GraphError};
use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("edge {from} -> {to} is not an attack (weight must be negative)")]
    NotAttack { from: String, to: String },
    #[error("edge {from} -> {to} is not a support (weight must be positive)")]
    NotSupport { from: String, to: String },
    #[error("collective support into {target} has no members")]
    EmptyGroup { target: String },
    #[error("collective support weight of {member} into {target} must be positive")]
    NonPositiveWeight { member: String, target: String },
    #[error("collective support weights into {target} sum to {sum}, which exceeds 1")]
    WeightSumExceedsOne { target: String, sum: String },
}

/// `Σ terms[A]·p(A) <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearAtomicConstraint {
    terms: BTreeMap<ArgumentId, Rational>,
    bound: Rational,
}

impl LinearAtomicConstraint {
    /// Builds a constraint, summing repeated arguments and dropping zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (ArgumentId, Rational)>, bound: Rational) -> Self {
        let mut map: BTreeMap<ArgumentId, Rational> = BTreeMap::new();
        for (arg, coeff) in terms {
            *map.entry(arg).or_insert_with(zero) += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        LinearAtomicConstraint { terms: map, bound }
    }

    /// Moves everything in `lhs_const + Σ lhs <= rhs_const + Σ rhs` into canonical form.
    pub fn canonicalize(
        lhs_const: Rational,
        lhs_terms: impl IntoIterator<Item = (ArgumentId, Rational)>,
        rhs_const: Rational,
        rhs_terms: impl IntoIterator<Item = (ArgumentId, Rational)>,
    ) -> Self {
        let terms = lhs_terms.into_iter().chain(rhs_terms.into_iter().map(|(a, c)| (a, -c)));
        Self::new(terms, rhs_const - lhs_const)
    }

    pub fn terms(&self) -> &BTreeMap<ArgumentId, Rational> {
        &self.terms
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn coefficient(&self, arg: &str) -> Option<&Rational> {
        self.terms.get(arg)
    }

    pub fn arguments(&self) -> impl Iterator<Item = &ArgumentId> {
        self.terms.keys()
    }

    /// Whether the constraint holds for the given argument probabilities.
    pub fn holds(&self, probability: impl Fn(&ArgumentId) -> Rational) -> bool {
        let lhs = self.terms.iter().fold(zero(), |acc, (a, c)| acc + c * probability(a));
        lhs <= self.bound
    }

    /// For a single-argument constraint `c·p(A) <= b`, the implied bound on `p(A)`:
    /// an upper bound `b/c` when `c > 0`, a lower bound when `c < 0`.
    pub fn as_simple_bound(&self) -> Option<(&ArgumentId, SimpleBound)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (arg, coeff) = self.terms.iter().next()?;
        let value = &self.bound / coeff;
        Some(if coeff.is_positive() { (arg, SimpleBound::AtMost(value)) } else { (arg, SimpleBound::AtLeast(value)) })
    }

    /// Checks that every mentioned argument exists in `graph`.
    pub fn validate(&self, graph: &ArgGraph) -> Result<(), GraphError> {
        for arg in self.terms.keys() {
            graph.position(arg.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleBound {
    AtLeast(Rational),
    AtMost(Rational),
}

impl fmt::Display for LinearAtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print_constraint(self))
    }
}

/// Where a constraint came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    /// `p(Innocence) <= 1 - p(Einc)`.
    Inculpatory,
    /// `p(Eex) <= p(Innocence)`.
    Exculpatory,
    Support {
        source: ArgumentId,
        target: ArgumentId,
    },
    Attack {
        source: ArgumentId,
        target: ArgumentId,
    },
    Collective {
        target: ArgumentId,
    },
    /// A user assumption with its stable id.
    Assumption(String),
}

impl Provenance {
    pub fn is_assumption(&self) -> bool {
        matches!(self, Provenance::Assumption(_))
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Inculpatory => f.write_str("IE"),
            Provenance::Exculpatory => f.write_str("EE"),
            Provenance::Support { source, target } => write!(f, "SE({source}->{target})"),
            Provenance::Attack { source, target } => write!(f, "ATT({source}->{target})"),
            Provenance::Collective { target } => write!(f, "CS(->{target})"),
            Provenance::Assumption(id) => write!(f, "assumption {id}"),
        }
    }
}

/// Constraints paired with their provenance, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    entries: Vec<(LinearAtomicConstraint, Provenance)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, constraint: LinearAtomicConstraint, provenance: Provenance) {
        self.entries.push((constraint, provenance));
    }

    pub fn extend(&mut self, other: &ConstraintSet) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LinearAtomicConstraint, &Provenance)> {
        self.entries.iter().map(|(c, p)| (c, p))
    }

    pub fn get(&self, index: usize) -> Option<(&LinearAtomicConstraint, &Provenance)> {
        self.entries.get(index).map(|(c, p)| (c, p))
    }

    pub fn constraints(&self) -> impl Iterator<Item = &LinearAtomicConstraint> {
        self.entries.iter().map(|(c, _)| c)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&LinearAtomicConstraint, &Provenance) -> bool) {
        self.entries.retain(|(c, p)| keep(c, p));
    }

    pub fn validate(&self, graph: &ArgGraph) -> Result<(), GraphError> {
        self.constraints().try_for_each(|c| c.validate(graph))
    }
}

impl FromIterator<(LinearAtomicConstraint, Provenance)> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = (LinearAtomicConstraint, Provenance)>>(iter: I) -> Self {
        ConstraintSet { entries: iter.into_iter().collect() }
    }
}

/// Weighted coherence for an attack `A -> B` with `w < 0`: `p(B) <= 1 + w·p(A)`.
pub fn gen_attack(edge: &Edge) -> Result<LinearAtomicConstraint, ConstraintError> {
    if !edge.is_attack() {
        return Err(ConstraintError::NotAttack { from: edge.source.as_str().into(), to: edge.target.as_str().into() });
    }
    Ok(LinearAtomicConstraint::new([(edge.source.clone(), -edge.weight.clone()), (edge.target.clone(), one())], one()))
}

/// Support `E -> H` with `w > 0`: `w·p(E) <= p(H)`.
pub fn gen_support(edge: &Edge) -> Result<LinearAtomicConstraint, ConstraintError> {
    if !edge.is_support() {
        return Err(ConstraintError::NotSupport { from: edge.source.as_str().into(), to: edge.target.as_str().into() });
    }
    Ok(LinearAtomicConstraint::new([(edge.source.clone(), edge.weight.clone()), (edge.target.clone(), -one())], zero()))
}

/// Collective support `Σ wᵢ·p(Aᵢ) <= p(B)`, with every `wᵢ > 0` and `Σ wᵢ <= 1`.
pub fn gen_collective_support(
    group: &[(ArgumentId, Rational)],
    target: &ArgumentId,
) -> Result<LinearAtomicConstraint, ConstraintError> {
    if group.is_empty() {
        return Err(ConstraintError::EmptyGroup { target: target.as_str().into() });
    }
    let mut sum = zero();
    for (member, weight) in group {
        if !weight.is_positive() {
            return Err(ConstraintError::NonPositiveWeight {
                member: member.as_str().into(),
                target: target.as_str().into(),
            });
        }
        sum += weight;
    }
    if sum > one() {
        return Err(ConstraintError::WeightSumExceedsOne {
            target: target.as_str().into(),
            sum: crate::rational::format_exact(&sum),
        });
    }
    let terms = group.iter().cloned().chain(core::iter::once((target.clone(), -one())));
    Ok(LinearAtomicConstraint::new(terms, zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn id(s: &str) -> ArgumentId {
        ArgumentId::new(s).unwrap()
    }

    fn edge(s: &str, t: &str, w: Rational) -> Edge {
        Edge { source: id(s), target: id(t), weight: w }
    }

    #[test]
    fn coherence_canonicalizes() {
        // 0 + 1·p(A) <= 1 + (-1)·p(B)
        let c = LinearAtomicConstraint::canonicalize(int(0), [(id("A"), int(1))], int(1), [(id("B"), int(-1))]);
        assert_eq!(c, LinearAtomicConstraint::new([(id("A"), int(1)), (id("B"), int(1))], int(1)));
    }

    #[test]
    fn empty_and_cancelled_terms() {
        let c = LinearAtomicConstraint::canonicalize(int(0), [], int(0), []);
        assert!(c.terms().is_empty());
        assert_eq!(c.bound(), &int(0));
        let c = LinearAtomicConstraint::canonicalize(int(0), [(id("A"), int(1))], int(1), [(id("A"), int(1))]);
        assert!(c.terms().is_empty());
        assert_eq!(c.bound(), &int(1));
    }

    #[test]
    fn attack_constraint() {
        let c = gen_attack(&edge("B", "C", int(-1))).unwrap();
        assert_eq!(c, LinearAtomicConstraint::new([(id("B"), int(1)), (id("C"), int(1))], int(1)));
        let c = gen_attack(&edge("A", "B", ratio(-1, 2))).unwrap();
        assert_eq!(c, LinearAtomicConstraint::new([(id("A"), ratio(1, 2)), (id("B"), int(1))], int(1)));
        assert!(matches!(gen_attack(&edge("A", "B", int(1))), Err(ConstraintError::NotAttack { .. })));
    }

    #[test]
    fn support_constraint() {
        let c = gen_support(&edge("A", "B", int(1))).unwrap();
        assert_eq!(c, LinearAtomicConstraint::new([(id("A"), int(1)), (id("B"), int(-1))], int(0)));
        let c = gen_support(&edge("T1", "Einc", ratio(9, 10))).unwrap();
        assert_eq!(c.coefficient("T1"), Some(&ratio(9, 10)));
        assert_eq!(c.coefficient("Einc"), Some(&int(-1)));
        assert!(matches!(gen_support(&edge("A", "B", int(-1))), Err(ConstraintError::NotSupport { .. })));
    }

    #[test]
    fn collective_support_constraint() {
        let c = gen_collective_support(&[(id("Motive"), ratio(2, 5)), (id("Opportunity"), ratio(2, 5))], &id("Ec"))
            .unwrap();
        assert_eq!(
            c,
            LinearAtomicConstraint::new(
                [(id("Motive"), ratio(2, 5)), (id("Opportunity"), ratio(2, 5)), (id("Ec"), int(-1))],
                int(0)
            )
        );
        let err = gen_collective_support(&[(id("A"), ratio(3, 5)), (id("B"), ratio(3, 5))], &id("C"));
        assert!(matches!(err, Err(ConstraintError::WeightSumExceedsOne { .. })));
        let err = gen_collective_support(&[(id("A"), int(0))], &id("C"));
        assert!(matches!(err, Err(ConstraintError::NonPositiveWeight { .. })));
    }

    #[test]
    fn singleton_group_matches_plain_support() {
        let w = ratio(3, 7);
        let cs = gen_collective_support(&[(id("A"), w.clone())], &id("B")).unwrap();
        assert_eq!(cs, gen_support(&edge("A", "B", w)).unwrap());
    }

    #[test]
    fn simple_bounds() {
        let c = LinearAtomicConstraint::new([(id("T3"), int(-1))], ratio(-7, 10));
        assert_eq!(c.as_simple_bound(), Some((&id("T3"), SimpleBound::AtLeast(ratio(7, 10)))));
        let c = LinearAtomicConstraint::new([(id("A"), int(2))], int(1));
        assert_eq!(c.as_simple_bound(), Some((&id("A"), SimpleBound::AtMost(ratio(1, 2)))));
    }
}
