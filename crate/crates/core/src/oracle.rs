//! Reference semantics over possible worlds.
//!
//! A probability function assigns mass to every subset of arguments, and
//! `p(A)` is the mass of the worlds containing `A`. The functions here solve
//! that exponential LP directly, one variable per world, without going
//! through the marginal reduction used by [`crate::epistemic`]. They exist to
//! check the reduction on small graphs.
//!
//! The world LP is solved by a dense revised simplex with an explicit basis
//! inverse and column generation: the column with the most negative reduced
//! cost is found by choosing, argument by argument, whether to include it in
//! the world. Ties in the ratio test follow the lexicographic rule, which
//! rules out cycling.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::constraint::ConstraintSet;
use crate::epistemic::{BeliefBounds, Interval};
use crate::graph::{ArgGraph, GraphError};
use crate::rational::{one, zero, Rational};

/// Largest graph accepted by the world-LP oracle.
pub const MAX_ORACLE_ARGUMENTS: usize = 16;
/// Largest graph [`realize`] will expand into explicit worlds.
pub const MAX_REALIZE_ARGUMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{arguments} arguments exceed the oracle limit of {limit}")]
    TooLarge { arguments: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("marginal {index} lies outside [0, 1]")]
    MarginalOutOfRange { index: usize },
    #[error("constraints are unsatisfiable")]
    Unsatisfiable,
}

/// Probabilities of possible worlds, keyed by bitmask (bit `i` set when the
/// `i`-th argument is accepted). Worlds with probability zero are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldDistribution {
    arguments: usize,
    worlds: BTreeMap<u32, Rational>,
}

impl WorldDistribution {
    pub fn arguments(&self) -> usize {
        self.arguments
    }

    pub fn probability(&self, world: u32) -> Rational {
        self.worlds.get(&world).cloned().unwrap_or_else(zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.worlds.iter().map(|(w, p)| (*w, p))
    }

    pub fn total(&self) -> Rational {
        self.worlds.values().fold(zero(), |acc, p| acc + p)
    }

    /// `P(A_index) = Σ_{ω ∋ A} P(ω)`.
    pub fn marginal(&self, index: usize) -> Rational {
        self.worlds.iter().filter(|(w, _)| *w & (1 << index) != 0).fold(zero(), |acc, (_, p)| acc + p)
    }
}

/// The product distribution whose marginals are exactly `marginals`.
pub fn realize(marginals: &[Rational]) -> Result<WorldDistribution, OracleError> {
    if marginals.len() > MAX_REALIZE_ARGUMENTS {
        return Err(OracleError::TooLarge { arguments: marginals.len(), limit: MAX_REALIZE_ARGUMENTS });
    }
    if let Some(index) = marginals.iter().position(|m| m.is_negative() || *m > one()) {
        return Err(OracleError::MarginalOutOfRange { index });
    }
    let mut worlds = BTreeMap::new();
    worlds.insert(0u32, one());
    for (i, m) in marginals.iter().enumerate() {
        let mut next = BTreeMap::new();
        for (w, p) in worlds {
            let with = &p * m;
            let without = p * (one() - m);
            if !with.is_zero() {
                next.insert(w | (1 << i), with);
            }
            if !without.is_zero() {
                next.insert(w, without);
            }
        }
        worlds = next;
    }
    Ok(WorldDistribution { arguments: marginals.len(), worlds })
}

pub fn oracle_satisfiable(graph: &ArgGraph, cs: &ConstraintSet) -> Result<bool, OracleError> {
    let mut lp = WorldLp::new(graph, cs)?;
    Ok(lp.phase_one())
}

pub fn oracle_entail(graph: &ArgGraph, cs: &ConstraintSet, arg: &str) -> Result<Interval, OracleError> {
    let target = graph.position(arg)?;
    let mut lp = WorldLp::new(graph, cs)?;
    if !lp.phase_one() {
        return Err(OracleError::Unsatisfiable);
    }
    Ok(lp.interval(target))
}

pub fn oracle_entail_all(graph: &ArgGraph, cs: &ConstraintSet) -> Result<BeliefBounds, OracleError> {
    let mut lp = WorldLp::new(graph, cs)?;
    if !lp.phase_one() {
        return Err(OracleError::Unsatisfiable);
    }
    let entries = graph.arguments().iter().enumerate().map(|(i, a)| (a.clone(), lp.interval(i))).collect();
    Ok(BeliefBounds::new(entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Slack(usize),
    World(u32),
    Artificial(usize),
}

#[derive(Debug, Clone, Copy)]
enum Objective {
    Artificials,
    Minimize(usize),
    Maximize(usize),
}

/// Rows `σᵢ·(Σ_ω gᵢ(ω)·q_ω + sᵢ) = σᵢ·bᵢ` for each constraint plus
/// `Σ_ω q_ω = 1`, with `σᵢ` chosen so every right-hand side is nonnegative.
struct WorldLp {
    n: usize,
    /// Dense constraint coefficients `a[i][A]`.
    coeffs: Vec<Vec<Rational>>,
    negated: Vec<bool>,
    basis: Vec<Column>,
    binv: Vec<Vec<Rational>>,
    lex: Vec<Vec<Rational>>,
    x: Vec<Rational>,
}

fn identity(size: usize) -> Vec<Vec<Rational>> {
    (0..size).map(|r| (0..size).map(|c| if r == c { one() } else { zero() }).collect()).collect()
}

impl WorldLp {
    fn new(graph: &ArgGraph, cs: &ConstraintSet) -> Result<Self, OracleError> {
        let n = graph.len();
        if n > MAX_ORACLE_ARGUMENTS {
            return Err(OracleError::TooLarge { arguments: n, limit: MAX_ORACLE_ARGUMENTS });
        }
        let m = cs.len();
        let mut coeffs = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m + 1);
        let mut x = Vec::with_capacity(m + 1);
        for (i, c) in cs.constraints().enumerate() {
            let mut row = vec![zero(); n];
            for (arg, coeff) in c.terms() {
                row[graph.position(arg.as_str())?] = coeff.clone();
            }
            coeffs.push(row);
            let neg = c.bound().is_negative();
            negated.push(neg);
            basis.push(if neg { Column::Artificial(i) } else { Column::Slack(i) });
            x.push(c.bound().abs());
        }
        basis.push(Column::Artificial(m));
        x.push(one());
        Ok(WorldLp { n, coeffs, negated, basis, binv: identity(m + 1), lex: identity(m + 1), x })
    }

    fn m(&self) -> usize {
        self.coeffs.len()
    }

    fn sigma(&self, i: usize) -> Rational {
        if self.negated[i] {
            -one()
        } else {
            one()
        }
    }

    fn column(&self, col: Column) -> Vec<Rational> {
        let m = self.m();
        let mut v = vec![zero(); m + 1];
        match col {
            Column::Slack(i) => v[i] = self.sigma(i),
            Column::Artificial(i) => v[i] = one(),
            Column::World(w) => {
                for (i, row) in self.coeffs.iter().enumerate() {
                    let g = (0..self.n).filter(|a| w & (1 << a) != 0).fold(zero(), |acc, a| acc + &row[a]);
                    v[i] = if self.negated[i] { -g } else { g };
                }
                v[m] = one();
            }
        }
        v
    }

    fn cost(objective: Objective, col: Column) -> Rational {
        match (objective, col) {
            (Objective::Artificials, Column::Artificial(_)) => one(),
            (Objective::Minimize(t), Column::World(w)) if w & (1 << t) != 0 => one(),
            (Objective::Maximize(t), Column::World(w)) if w & (1 << t) != 0 => -one(),
            _ => zero(),
        }
    }

    /// Per-argument cost for building the cheapest world.
    fn argument_cost(objective: Objective, a: usize) -> Rational {
        match objective {
            Objective::Minimize(t) if t == a => one(),
            Objective::Maximize(t) if t == a => -one(),
            _ => zero(),
        }
    }

    fn value(&self, objective: Objective) -> Rational {
        self.basis.iter().zip(&self.x).fold(zero(), |acc, (c, x)| acc + Self::cost(objective, *c) * x)
    }

    fn apply(&self, d: &mut [Rational], col: Column) {
        let a = self.column(col);
        for (r, out) in d.iter_mut().enumerate() {
            let mut sum = zero();
            for (b, v) in self.binv[r].iter().zip(&a) {
                if !b.is_zero() && !v.is_zero() {
                    sum += b * v;
                }
            }
            *out = sum;
        }
    }

    /// Column with the most negative reduced cost, if any.
    fn price(&self, objective: Objective) -> Option<Column> {
        let m = self.m();
        let size = m + 1;
        let mut duals = vec![zero(); size];
        for (r, c) in self.basis.iter().enumerate() {
            let cost = Self::cost(objective, *c);
            if cost.is_zero() {
                continue;
            }
            for (d, b) in duals.iter_mut().zip(&self.binv[r]) {
                if !b.is_zero() {
                    *d += &cost * b;
                }
            }
        }
        let mut best: Option<(Rational, Column)> = None;
        for (i, dual) in duals.iter().enumerate().take(m) {
            if self.basis.contains(&Column::Slack(i)) {
                continue;
            }
            let rc = -(dual * self.sigma(i));
            if rc.is_negative() && best.as_ref().is_none_or(|(b, _)| rc < *b) {
                best = Some((rc, Column::Slack(i)));
            }
        }
        let mut world = 0u32;
        let mut rc = -duals[m].clone();
        for a in 0..self.n {
            let mut u = zero();
            for (i, dual) in duals.iter().enumerate().take(m) {
                if !dual.is_zero() && !self.coeffs[i][a].is_zero() {
                    let term = dual * &self.coeffs[i][a];
                    if self.negated[i] {
                        u -= term;
                    } else {
                        u += term;
                    }
                }
            }
            let delta = Self::argument_cost(objective, a) - u;
            if delta.is_negative() {
                world |= 1 << a;
                rc += delta;
            }
        }
        if rc.is_negative() && best.as_ref().is_none_or(|(b, _)| rc < *b) {
            best = Some((rc, Column::World(world)));
        }
        best.map(|(_, c)| c)
    }

    fn pivot(&mut self, row: usize, d: &[Rational], entering: Column) {
        let p = d[row].clone();
        for v in self.binv[row].iter_mut().chain(self.lex[row].iter_mut()) {
            *v /= &p;
        }
        self.x[row] /= &p;
        let (binv_r, lex_r, x_r) = (self.binv[row].clone(), self.lex[row].clone(), self.x[row].clone());
        for (k, f) in d.iter().enumerate() {
            if k == row || f.is_zero() {
                continue;
            }
            for (v, r) in self.binv[k].iter_mut().zip(&binv_r) {
                if !r.is_zero() {
                    *v -= f * r;
                }
            }
            for (v, r) in self.lex[k].iter_mut().zip(&lex_r) {
                if !r.is_zero() {
                    *v -= f * r;
                }
            }
            self.x[k] -= f * &x_r;
        }
        self.basis[row] = entering;
    }

    /// Lexicographic minimum ratio over rows with positive pivot entries.
    fn leaving_row(&self, d: &[Rational]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for r in 0..d.len() {
            if !d[r].is_positive() {
                continue;
            }
            best = match best {
                None => Some(r),
                Some(b) => {
                    let key = |row: usize| {
                        core::iter::once(&self.x[row]).chain(self.lex[row].iter()).map(move |v| v / &d[row])
                    };
                    if key(r).lt(key(b)) {
                        Some(r)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    fn run(&mut self, objective: Objective) {
        self.lex = identity(self.m() + 1);
        let mut d = vec![zero(); self.m() + 1];
        while let Some(entering) = self.price(objective) {
            self.apply(&mut d, entering);
            let row = self.leaving_row(&d).expect("world LP is bounded");
            self.pivot(row, &d, entering);
        }
    }

    /// Finds a feasible basis; false when none exists.
    fn phase_one(&mut self) -> bool {
        self.run(Objective::Artificials);
        if !self.value(Objective::Artificials).is_zero() {
            return false;
        }
        // Swap zero-valued artificials for real columns where the row allows it.
        let m = self.m();
        for r in 0..=m {
            if !matches!(self.basis[r], Column::Artificial(_)) {
                continue;
            }
            let offset = self.binv[r][m].clone();
            let per_argument: Vec<Rational> = (0..self.n)
                .map(|a| (0..m).fold(zero(), |acc, i| acc + &self.binv[r][i] * self.sigma(i) * &self.coeffs[i][a]))
                .collect();
            let candidate = if !offset.is_zero() {
                Some(Column::World(0))
            } else if let Some(a) = per_argument.iter().position(|v| !v.is_zero()) {
                Some(Column::World(1 << a))
            } else {
                (0..m)
                    .find(|&i| !self.binv[r][i].is_zero() && !self.basis.contains(&Column::Slack(i)))
                    .map(Column::Slack)
            };
            if let Some(col) = candidate {
                let mut d = vec![zero(); m + 1];
                self.apply(&mut d, col);
                debug_assert!(!d[r].is_zero());
                self.pivot(r, &d, col);
            }
        }
        true
    }

    fn interval(&mut self, target: usize) -> Interval {
        self.run(Objective::Minimize(target));
        let lower = self.value(Objective::Minimize(target));
        self.run(Objective::Maximize(target));
        let upper = -self.value(Objective::Maximize(target));
        debug_assert!(self.x.iter().all(|v| !v.is_negative()));
        debug_assert!(self.basis_total().is_one());
        Interval::new(lower, upper)
    }

    fn basis_total(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.x)
            .filter(|(c, _)| matches!(c, Column::World(_)))
            .fold(zero(), |acc, (_, x)| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{gen_attack, gen_support, Provenance};
    use crate::dsl::parse_constraint;
    use crate::rational::{int, ratio};

    fn three_node(extra: &[&str]) -> (ArgGraph, ConstraintSet) {
        let mut g = ArgGraph::new();
        for a in ["A", "B", "C"] {
            g.add_argument(a).unwrap();
        }
        g.add_edge("A", "B", int(1)).unwrap();
        g.add_edge("B", "C", int(-1)).unwrap();
        let mut cs = ConstraintSet::new();
        cs.push(gen_support(g.edge("A", "B").unwrap()).unwrap(), Provenance::Inculpatory);
        cs.push(gen_attack(g.edge("B", "C").unwrap()).unwrap(), Provenance::Inculpatory);
        for text in core::iter::once(&"0.5 <= p(C)").chain(extra) {
            for c in parse_constraint(text).unwrap() {
                cs.push(c, Provenance::Assumption("x".into()));
            }
        }
        (g, cs)
    }

    #[test]
    fn worked_example_over_worlds() {
        let (g, cs) = three_node(&[]);
        assert!(oracle_satisfiable(&g, &cs).unwrap());
        let b = oracle_entail_all(&g, &cs).unwrap();
        assert_eq!(b.get("A"), Some(&Interval::new(int(0), ratio(1, 2))));
        assert_eq!(b.get("B"), Some(&Interval::new(int(0), ratio(1, 2))));
        assert_eq!(b.get("C"), Some(&Interval::new(ratio(1, 2), int(1))));
        let (g, cs) = three_node(&["p(A) >= 1"]);
        assert!(!oracle_satisfiable(&g, &cs).unwrap());
        assert_eq!(oracle_entail(&g, &cs, "A"), Err(OracleError::Unsatisfiable));
    }

    #[test]
    fn single_unconstrained_argument() {
        let mut g = ArgGraph::new();
        g.add_argument("A").unwrap();
        let i = oracle_entail(&g, &ConstraintSet::new(), "A").unwrap();
        assert_eq!(i, Interval::new(int(0), int(1)));
    }

    #[test]
    fn size_guard() {
        let mut g = ArgGraph::new();
        for i in 0..=MAX_ORACLE_ARGUMENTS {
            g.add_argument(&alloc::format!("A{i}")).unwrap();
        }
        assert!(matches!(oracle_satisfiable(&g, &ConstraintSet::new()), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn realize_small_vectors() {
        let d = realize(&[int(1), int(0)]).unwrap();
        assert_eq!(d.probability(0b01), int(1));
        assert_eq!(d.iter().count(), 1);

        let d = realize(&[ratio(1, 2)]).unwrap();
        assert_eq!(d.probability(0b0), ratio(1, 2));
        assert_eq!(d.probability(0b1), ratio(1, 2));

        // Product weights multiplied out by hand: each of the four worlds gets 1/2·1/2.
        let d = realize(&[ratio(1, 2), ratio(1, 2)]).unwrap();
        for w in 0..4 {
            assert_eq!(d.probability(w), ratio(1, 4));
        }
        assert_eq!(d.marginal(0), ratio(1, 2));
        assert_eq!(d.marginal(1), ratio(1, 2));
        assert_eq!(d.total(), int(1));

        assert_eq!(realize(&[ratio(3, 2)]), Err(OracleError::MarginalOutOfRange { index: 0 }));
    }
}
