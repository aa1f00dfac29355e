//! Satisfiability and entailment for linear atomic constraints.
//!
//! Constraints only mention marginals `p(A)`, and every point of `[0, 1]ⁿ` is
//! the marginal vector of some distribution over possible worlds (see
//! [`crate::oracle::realize`]). Both problems therefore reduce to an LP with
//! one variable per argument instead of one per world.

use alloc::vec::Vec;

use num_traits::Signed;

use crate::certify::Certifier;
use crate::constraint::ConstraintSet;
use crate::graph::{ArgGraph, ArgumentId, GraphError};
use crate::lp::{LpProblem, Sense, Simplex};
use crate::rational::{one, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// `conflict` lists positions in the constraint set.
    #[error("constraints are unsatisfiable")]
    Unsatisfiable { conflict: Vec<usize> },
}

/// Closed interval `[lower, upper]` within `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: Rational,
    pub upper: Rational,
}

impl Interval {
    pub fn new(lower: Rational, upper: Rational) -> Self {
        Interval { lower, upper }
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn is_well_formed(&self) -> bool {
        !self.lower.is_negative() && self.lower <= self.upper && self.upper <= one()
    }
}

/// Entailed interval for every argument, in graph order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefBounds {
    entries: Vec<(ArgumentId, Interval)>,
}

impl BeliefBounds {
    pub fn new(entries: Vec<(ArgumentId, Interval)>) -> Self {
        BeliefBounds { entries }
    }

    pub fn get(&self, arg: &str) -> Option<&Interval> {
        self.entries.iter().find(|(a, _)| a.as_str() == arg).map(|(_, i)| i)
    }

    pub fn lower(&self, arg: &str) -> Option<&Rational> {
        self.get(arg).map(|i| &i.lower)
    }

    pub fn upper(&self, arg: &str) -> Option<&Rational> {
        self.get(arg).map(|i| &i.upper)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ArgumentId, &Interval)> {
        self.entries.iter().map(|(a, i)| (a, i))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    /// Marginals `p(A)` in graph order that satisfy every constraint.
    Satisfiable {
        witness: Vec<Rational>,
    },
    Unsatisfiable {
        conflict: Vec<usize>,
    },
}

impl Satisfiability {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, Satisfiability::Satisfiable { .. })
    }
}

/// One LP variable per argument (graph order), one row per constraint.
pub fn marginal_problem(graph: &ArgGraph, cs: &ConstraintSet) -> Result<LpProblem, GraphError> {
    let mut lp = LpProblem::new(graph.len());
    for c in cs.constraints() {
        let mut coeffs = Vec::with_capacity(c.terms().len());
        for (arg, coeff) in c.terms() {
            coeffs.push((graph.position(arg.as_str())?, coeff.clone()));
        }
        lp.add_row(coeffs, c.bound().clone()).expect("positions come from the graph");
    }
    Ok(lp)
}

pub fn satisfiable(graph: &ArgGraph, cs: &ConstraintSet) -> Result<Satisfiability, GraphError> {
    let lp = marginal_problem(graph, cs)?;
    Ok(match crate::lp::feasible(&lp) {
        crate::lp::LpOutcome::Feasible { witness } => Satisfiability::Satisfiable { witness },
        crate::lp::LpOutcome::Infeasible { conflict } => Satisfiability::Unsatisfiable { conflict },
    })
}

fn feasible_simplex(lp: &LpProblem) -> Result<Simplex, SolveError> {
    let mut simplex = Simplex::new(lp);
    match simplex.check() {
        Ok(()) => Ok(simplex),
        Err(conflict) => Err(SolveError::Unsatisfiable { conflict: crate::lp::shrink_conflict(lp, conflict) }),
    }
}

/// Exact `[min p(a), max p(a)]` over all distributions satisfying `cs`.
pub fn entail(graph: &ArgGraph, cs: &ConstraintSet, arg: &str) -> Result<Interval, SolveError> {
    let var = graph.position(arg)?;
    let lp = marginal_problem(graph, cs)?;
    let mut solver = Solver::new(&lp)?;
    Ok(solver.interval(var))
}

/// [`entail`] for every argument, sharing one feasible basis and one set of
/// propagated bounds across all `2·n` optimisations.
pub fn entail_all(graph: &ArgGraph, cs: &ConstraintSet) -> Result<BeliefBounds, SolveError> {
    let lp = marginal_problem(graph, cs)?;
    let mut solver = Solver::new(&lp)?;
    let entries = graph.arguments().iter().enumerate().map(|(var, arg)| (arg.clone(), solver.interval(var))).collect();
    Ok(BeliefBounds { entries })
}

/// Certified bounds where a witness reaches them, the simplex elsewhere.
struct Solver<'a> {
    simplex: Simplex,
    certifier: Option<Certifier<'a>>,
    base: Vec<Rational>,
    corner: Option<Vec<Rational>>,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LpProblem) -> Result<Self, SolveError> {
        let simplex = feasible_simplex(lp)?;
        let base = simplex.witness();
        let certifier = Certifier::new(lp);
        let corner = certifier.as_ref().and_then(Certifier::lower_corner);
        Ok(Solver { simplex, certifier, base, corner })
    }

    fn interval(&mut self, var: usize) -> Interval {
        let lower = self
            .certified_lower(var)
            .unwrap_or_else(|| self.simplex.optimize(var, Sense::Minimize).expect("feasible and bounded"));
        let upper = self
            .certified_upper(var)
            .unwrap_or_else(|| self.simplex.optimize(var, Sense::Maximize).expect("feasible and bounded"));
        Interval { lower, upper }
    }

    fn certified_lower(&mut self, var: usize) -> Option<Rational> {
        let c = self.certifier.as_ref()?;
        let target = c.lower(var).clone();
        if self.corner.is_some() || c.reach(&mut self.base, var, &target) {
            return Some(target);
        }
        None
    }

    fn certified_upper(&mut self, var: usize) -> Option<Rational> {
        let c = self.certifier.as_ref()?;
        let target = c.upper(var).clone();
        let point = self.corner.as_mut().unwrap_or(&mut self.base);
        c.reach(point, var, &target).then_some(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{gen_attack, gen_support, Provenance};
    use crate::dsl::parse_constraint;
    use crate::rational::{int, ratio};

    fn three_node() -> (ArgGraph, ConstraintSet) {
        let mut g = ArgGraph::new();
        for a in ["A", "B", "C"] {
            g.add_argument(a).unwrap();
        }
        g.add_edge("A", "B", int(1)).unwrap();
        g.add_edge("B", "C", int(-1)).unwrap();
        let mut cs = ConstraintSet::new();
        let ab = g.edge("A", "B").unwrap().clone();
        let bc = g.edge("B", "C").unwrap().clone();
        cs.push(gen_support(&ab).unwrap(), Provenance::Support { source: ab.source, target: ab.target });
        cs.push(gen_attack(&bc).unwrap(), Provenance::Attack { source: bc.source, target: bc.target });
        for c in parse_constraint("0.5 <= p(C)").unwrap() {
            cs.push(c, Provenance::Assumption("c".into()));
        }
        (g, cs)
    }

    #[test]
    fn worked_example() {
        let (g, cs) = three_node();
        assert!(satisfiable(&g, &cs).unwrap().is_satisfiable());
        let bounds = entail_all(&g, &cs).unwrap();
        assert_eq!(bounds.get("A"), Some(&Interval::new(int(0), ratio(1, 2))));
        assert_eq!(bounds.get("B"), Some(&Interval::new(int(0), ratio(1, 2))));
        assert_eq!(bounds.get("C"), Some(&Interval::new(ratio(1, 2), int(1))));
        assert_eq!(entail(&g, &cs, "C").unwrap(), Interval::new(ratio(1, 2), int(1)));
    }

    #[test]
    fn accepting_a_breaks_the_example() {
        let (g, mut cs) = three_node();
        for c in parse_constraint("p(A) >= 1").unwrap() {
            cs.push(c, Provenance::Assumption("d".into()));
        }
        match satisfiable(&g, &cs).unwrap() {
            Satisfiability::Unsatisfiable { conflict } => assert_eq!(conflict, alloc::vec![0, 1, 2, 3]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(entail_all(&g, &cs), Err(SolveError::Unsatisfiable { .. })));
    }

    #[test]
    fn empty_constraints() {
        let (g, _) = three_node();
        let cs = ConstraintSet::new();
        assert!(satisfiable(&g, &cs).unwrap().is_satisfiable());
        for (_, i) in entail_all(&g, &cs).unwrap().iter() {
            assert_eq!(i, &Interval::new(int(0), int(1)));
        }
    }

    #[test]
    fn unknown_arguments_are_reported() {
        let (g, mut cs) = three_node();
        for c in parse_constraint("p(Z) >= 1").unwrap() {
            cs.push(c, Provenance::Assumption("z".into()));
        }
        assert!(matches!(satisfiable(&g, &cs), Err(GraphError::UnknownArgument(_))));
        assert!(matches!(entail(&g, &ConstraintSet::new(), "Z"), Err(SolveError::Graph(_))));
    }
}
