//! Exact linear programming over the unit box.
//!
//! Problems have `n` variables, each bounded to `[0, 1]`, and rows
//! `Σ aᵢ·xᵢ <= b`. The solver is a sparse tableau simplex in the style used by
//! SMT arithmetic solvers: every row gets a slack variable `sᵢ = Σ aᵢ·xᵢ`
//! bounded above by `b`, bound violations of basic variables are repaired by
//! pivoting, and both repair and optimisation follow Bland's smallest-index
//! rule, so the pivot sequence is deterministic and terminates.
//!
//! A [`Simplex`] can be optimised repeatedly. Every optimisation starts from
//! the basis left by the previous one, which is still feasible.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("problem is infeasible (conflicting rows {conflict:?})")]
    Infeasible { conflict: Vec<usize> },
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub bound: Rational,
}

/// `Σ aᵢ·xᵢ <= b` rows over variables in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpProblem {
    num_vars: usize,
    rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem { num_vars, rows: Vec::new() }
    }

    /// Adds a row and returns its index. Repeated variables are summed.
    pub fn add_row(
        &mut self,
        coeffs: impl IntoIterator<Item = (usize, Rational)>,
        bound: Rational,
    ) -> Result<usize, LpError> {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (index, c) in coeffs {
            if index >= self.num_vars {
                return Err(LpError::VariableOutOfRange { index, num_vars: self.num_vars });
            }
            *merged.entry(index).or_insert_with(zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        self.rows.push(LpRow { coeffs: merged.into_iter().collect(), bound });
        Ok(self.rows.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    /// The same problem restricted to the given rows (in the given order).
    pub fn subproblem(&self, rows: &[usize]) -> LpProblem {
        LpProblem { num_vars: self.num_vars, rows: rows.iter().map(|&r| self.rows[r].clone()).collect() }
    }

    /// Whether `point` lies in the box and satisfies every row exactly.
    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars
            && point.iter().all(|x| !x.is_negative() && *x <= one())
            && self.rows.iter().all(|row| {
                let lhs = row.coeffs.iter().fold(zero(), |acc, (i, c)| acc + c * &point[*i]);
                lhs <= row.bound
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible {
        witness: Vec<Rational>,
    },
    /// Rows that are infeasible together; greedily shrunk until dropping any
    /// single one of them makes the rest feasible.
    Infeasible {
        conflict: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub witness: Vec<Rational>,
}

pub fn feasible(problem: &LpProblem) -> LpOutcome {
    let mut simplex = Simplex::new(problem);
    match simplex.check() {
        Ok(()) => LpOutcome::Feasible { witness: simplex.witness() },
        Err(conflict) => LpOutcome::Infeasible { conflict: shrink_conflict(problem, conflict) },
    }
}

pub fn optimize(problem: &LpProblem, var: usize, sense: Sense) -> Result<Optimum, LpError> {
    let mut simplex = Simplex::new(problem);
    simplex.check().map_err(|conflict| LpError::Infeasible { conflict: shrink_conflict(problem, conflict) })?;
    let value = simplex.optimize(var, sense)?;
    Ok(Optimum { value, witness: simplex.witness() })
}

/// Deletion filter: drops every row whose removal keeps the subset infeasible.
pub fn shrink_conflict(problem: &LpProblem, conflict: Vec<usize>) -> Vec<usize> {
    let mut core = conflict;
    core.sort_unstable();
    core.dedup();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if Simplex::new(&problem.subproblem(&trial)).check().is_err() {
            core = trial;
        } else {
            i += 1;
        }
    }
    core
}

type Row = BTreeMap<usize, Rational>;

/// Incremental exact simplex over one [`LpProblem`].
///
/// Variables `0..n` are the problem variables, `n..n+m` the row slacks.
#[derive(Debug, Clone)]
pub struct Simplex {
    num_vars: usize,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    value: Vec<Rational>,
    /// `rows[b]` expresses basic variable `b` over nonbasic variables.
    rows: Vec<Option<Row>>,
    /// `cols[j]`: basic variables whose row mentions nonbasic `j`.
    cols: Vec<BTreeSet<usize>>,
    /// Basic variables whose value changed since they were last checked.
    dirty: BTreeSet<usize>,
    checked: bool,
    pivots: usize,
}

impl Simplex {
    pub fn new(problem: &LpProblem) -> Self {
        let n = problem.num_vars;
        let total = n + problem.rows.len();
        let mut lower = vec![Some(zero()); n];
        let mut upper = vec![Some(one()); n];
        let mut rows = vec![None; n];
        let mut cols = vec![BTreeSet::new(); total];
        let mut dirty = BTreeSet::new();
        for (i, row) in problem.rows.iter().enumerate() {
            let slack = n + i;
            lower.push(None);
            upper.push(Some(row.bound.clone()));
            for (j, _) in &row.coeffs {
                cols[*j].insert(slack);
            }
            rows.push(Some(row.coeffs.iter().cloned().collect()));
            dirty.insert(slack);
        }
        Simplex { num_vars: n, lower, upper, value: vec![zero(); total], rows, cols, dirty, checked: false, pivots: 0 }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of pivots performed so far.
    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Current values of the problem variables.
    pub fn witness(&self) -> Vec<Rational> {
        self.value[..self.num_vars].to_vec()
    }

    fn below_lower(&self, v: usize) -> bool {
        matches!(&self.lower[v], Some(l) if self.value[v] < *l)
    }

    fn above_upper(&self, v: usize) -> bool {
        matches!(&self.upper[v], Some(u) if self.value[v] > *u)
    }

    fn can_increase(&self, v: usize) -> bool {
        !matches!(&self.upper[v], Some(u) if self.value[v] >= *u)
    }

    fn can_decrease(&self, v: usize) -> bool {
        !matches!(&self.lower[v], Some(l) if self.value[v] <= *l)
    }

    /// Repairs bound violations. On failure returns the indices of rows whose
    /// bounds, together with the unit box, cannot hold simultaneously.
    pub fn check(&mut self) -> Result<(), Vec<usize>> {
        while let Some(b) = self.dirty.pop_first() {
            if self.rows[b].is_none() {
                continue;
            }
            let increase = if self.below_lower(b) {
                true
            } else if self.above_upper(b) {
                false
            } else {
                continue;
            };
            let row = self.rows[b].as_ref().expect("basic");
            let entering = row.iter().find_map(|(&j, a)| {
                let up = a.is_positive() == increase;
                let movable = if up { self.can_increase(j) } else { self.can_decrease(j) };
                movable.then_some(j)
            });
            match entering {
                Some(j) => {
                    let target = if increase { &self.lower[b] } else { &self.upper[b] };
                    let target = target.clone().expect("violated bound exists");
                    self.pivot_and_update(b, j, target);
                }
                None => {
                    self.dirty.insert(b);
                    let mut conflict: Vec<usize> = core::iter::once(b)
                        .chain(row.keys().copied())
                        .filter(|&v| v >= self.num_vars)
                        .map(|v| v - self.num_vars)
                        .collect();
                    conflict.sort_unstable();
                    return Err(conflict);
                }
            }
        }
        self.checked = true;
        Ok(())
    }

    /// Optimises one problem variable from the current feasible basis.
    pub fn optimize(&mut self, var: usize, sense: Sense) -> Result<Rational, LpError> {
        if var >= self.num_vars {
            return Err(LpError::VariableOutOfRange { index: var, num_vars: self.num_vars });
        }
        if !self.checked {
            self.check().map_err(|conflict| LpError::Infeasible { conflict })?;
        }
        let maximize = sense == Sense::Maximize;
        loop {
            // Objective over nonbasic variables, oriented so larger is better.
            let entering = match &self.rows[var] {
                None => {
                    let movable = if maximize { self.can_increase(var) } else { self.can_decrease(var) };
                    movable.then_some((var, maximize))
                }
                Some(row) => row.iter().find_map(|(&j, a)| {
                    let up = a.is_positive() == maximize;
                    let movable = if up { self.can_increase(j) } else { self.can_decrease(j) };
                    movable.then_some((j, up))
                }),
            };
            let Some((j, up)) = entering else {
                return Ok(self.value[var].clone());
            };

            // Ratio test, ties broken by smallest variable index.
            let mut best: Option<(Rational, usize)> = None;
            let mut consider = |ratio: Rational, v: usize| {
                let better = match &best {
                    None => true,
                    Some((r, w)) => ratio < *r || (ratio == *r && v < *w),
                };
                if better {
                    best = Some((ratio, v));
                }
            };
            let own = if up { &self.upper[j] } else { &self.lower[j] };
            if let Some(bound) = own {
                consider((bound - &self.value[j]).abs(), j);
            }
            for &k in &self.cols[j] {
                let a = &self.rows[k].as_ref().expect("basic")[&j];
                let rises = a.is_positive() == up;
                let limit = if rises { &self.upper[k] } else { &self.lower[k] };
                if let Some(bound) = limit {
                    consider((bound - &self.value[k]).abs() / a.abs(), k);
                }
            }
            let Some((step, leaving)) = best else {
                return Err(LpError::Unbounded);
            };
            if leaving == j {
                let target = if up { &self.value[j] + &step } else { &self.value[j] - &step };
                self.update(j, target);
            } else {
                let a = &self.rows[leaving].as_ref().expect("basic")[&j];
                let rises = a.is_positive() == up;
                let target = if rises { &self.upper[leaving] } else { &self.lower[leaving] };
                let target = target.clone().expect("limiting bound");
                self.pivot_and_update(leaving, j, target);
            }
        }
    }

    /// Moves nonbasic `j` to `target`, adjusting every dependent basic variable.
    fn update(&mut self, j: usize, target: Rational) {
        let delta = &target - &self.value[j];
        for &k in &self.cols[j] {
            let a = &self.rows[k].as_ref().expect("basic")[&j];
            self.value[k] += a * &delta;
            self.dirty.insert(k);
        }
        self.value[j] = target;
    }

    /// Sets basic `b` to `target` by moving nonbasic `e`, then swaps them.
    fn pivot_and_update(&mut self, b: usize, e: usize, target: Rational) {
        let a = self.rows[b].as_ref().expect("basic")[&e].clone();
        let theta = (&target - &self.value[b]) / &a;
        self.value[b] = target;
        self.value[e] += &theta;
        for &k in &self.cols[e] {
            if k != b {
                let c = &self.rows[k].as_ref().expect("basic")[&e];
                self.value[k] += c * &theta;
                self.dirty.insert(k);
            }
        }
        self.pivot(b, e);
        self.dirty.insert(e);
    }

    fn pivot(&mut self, b: usize, e: usize) {
        self.pivots += 1;
        let mut row_b = self.rows[b].take().expect("basic");
        let a = row_b.remove(&e).expect("pivot element");
        for j in row_b.keys() {
            self.cols[*j].remove(&b);
        }
        self.cols[e].remove(&b);
        // x_b = a·x_e + Σ r_j·x_j  ⇒  x_e = x_b/a − Σ (r_j/a)·x_j
        let inv = one() / &a;
        let mut row_e: Row = row_b.into_iter().map(|(j, r)| (j, -(r * &inv))).collect();
        row_e.insert(b, inv);

        let users = core::mem::take(&mut self.cols[e]);
        for &k in &users {
            let row_k = self.rows[k].as_mut().expect("basic");
            let c = row_k.remove(&e).expect("column index is consistent");
            for (&j, v) in &row_e {
                let entry = row_k.entry(j).or_insert_with(zero);
                *entry += &c * v;
                if entry.is_zero() {
                    row_k.remove(&j);
                    self.cols[j].remove(&k);
                } else {
                    self.cols[j].insert(k);
                }
            }
        }
        for &j in row_e.keys() {
            self.cols[j].insert(e);
        }
        self.rows[e] = Some(row_e);
    }
}
