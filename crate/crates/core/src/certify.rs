//! Optimal values certified without pivoting.
//!
//! Bound propagation over the rows gives an interval `[lo, hi]` for every
//! variable that contains every feasible point. If a feasible point is found
//! with `x_v = lo_v`, then `lo_v` is the exact minimum, and likewise for the
//! maximum. Points are built by moving one variable to its propagated bound
//! and greedily repairing the rows this breaks; the result is checked with
//! exact arithmetic before it is trusted. When no point is found the caller
//! falls back to the simplex.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::lp::LpProblem;
use crate::rational::{one, zero, Rational};

/// Propagation rounds per variable before its bounds are left as they are.
const TIGHTENINGS_PER_VARIABLE: usize = 64;

/// Row adjacency and propagated bounds for one problem.
pub struct Certifier<'a> {
    problem: &'a LpProblem,
    var_rows: Vec<Vec<usize>>,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl<'a> Certifier<'a> {
    /// `None` when propagation alone proves the problem infeasible.
    pub fn new(problem: &'a LpProblem) -> Option<Self> {
        let n = problem.num_vars();
        let mut var_rows = vec![Vec::new(); n];
        for (r, row) in problem.rows().iter().enumerate() {
            for (j, _) in &row.coeffs {
                var_rows[*j].push(r);
            }
        }
        let mut c = Certifier { problem, var_rows, lo: vec![zero(); n], hi: vec![one(); n] };
        c.propagate().then_some(c)
    }

    pub fn lower(&self, var: usize) -> &Rational {
        &self.lo[var]
    }

    pub fn upper(&self, var: usize) -> &Rational {
        &self.hi[var]
    }

    fn propagate(&mut self) -> bool {
        let rows = self.problem.rows();
        let mut updates = vec![0usize; self.lo.len()];
        let mut queue: BTreeSet<usize> = (0..rows.len()).collect();
        while let Some(r) = queue.pop_first() {
            let row = &rows[r];
            let mut min_activity = zero();
            for (j, a) in &row.coeffs {
                min_activity += if a.is_positive() { a * &self.lo[*j] } else { a * &self.hi[*j] };
            }
            if row.coeffs.is_empty() && row.bound.is_negative() {
                return false;
            }
            for (j, a) in &row.coeffs {
                let own = if a.is_positive() { a * &self.lo[*j] } else { a * &self.hi[*j] };
                let limit = (&row.bound - (&min_activity - own)) / a;
                let changed = if a.is_positive() {
                    if limit < self.hi[*j] {
                        self.hi[*j] = limit;
                        true
                    } else {
                        false
                    }
                } else if limit > self.lo[*j] {
                    self.lo[*j] = limit;
                    true
                } else {
                    false
                };
                if self.lo[*j] > self.hi[*j] {
                    return false;
                }
                if changed && updates[*j] < TIGHTENINGS_PER_VARIABLE {
                    updates[*j] += 1;
                    queue.extend(self.var_rows[*j].iter().copied().filter(|&q| q != r));
                }
            }
        }
        true
    }

    fn activity(&self, row: usize, x: &[Rational]) -> Rational {
        self.problem.rows()[row].coeffs.iter().fold(zero(), |acc, (j, a)| acc + a * &x[*j])
    }

    /// Whether the point made of all lower bounds is feasible.
    pub fn lower_corner(&self) -> Option<Vec<Rational>> {
        let x = self.lo.clone();
        (0..self.problem.rows().len()).all(|r| self.activity(r, &x) <= self.problem.rows()[r].bound).then_some(x)
    }

    /// Moves `var` of the feasible point `base` to `target` and repairs the
    /// rows that breaks, keeping `var` fixed. A variable moved up is never
    /// moved down in the same repair, and vice versa. Returns whether a feasible
    /// point was reached. On success `base` becomes that point, otherwise it
    /// is left unchanged.
    pub fn reach(&self, base: &mut [Rational], var: usize, target: &Rational) -> bool {
        if &base[var] == target {
            return true;
        }
        let rows = self.problem.rows();
        let mut undo: Vec<(usize, Rational)> = Vec::new();
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        let mut queue: BTreeSet<usize> = BTreeSet::new();
        let mut raised: BTreeMap<usize, bool> = BTreeMap::new();
        let mut budget = 8 * (rows.len() + base.len()) + 64;

        undo.push((var, core::mem::replace(&mut base[var], target.clone())));
        queue.extend(self.var_rows[var].iter().copied());
        let mut ok = true;
        'repair: while let Some(r) = queue.pop_first() {
            touched.insert(r);
            let mut excess = self.activity(r, base) - &rows[r].bound;
            if !excess.is_positive() {
                continue;
            }
            if budget == 0 {
                ok = false;
                break;
            }
            budget -= 1;
            for (j, a) in &rows[r].coeffs {
                let j = *j;
                if j == var || raised.get(&j) == Some(&a.is_positive()) {
                    continue;
                }
                let room = if a.is_positive() { &base[j] - &self.lo[j] } else { &self.hi[j] - &base[j] };
                if !room.is_positive() {
                    continue;
                }
                let step = core::cmp::min(&excess / a.abs(), room);
                let moved = if a.is_positive() { &base[j] - &step } else { &base[j] + &step };
                excess -= a.abs() * &step;
                raised.insert(j, !a.is_positive());
                undo.push((j, core::mem::replace(&mut base[j], moved)));
                queue.extend(self.var_rows[j].iter().copied().filter(|&q| q != r));
                touched.extend(self.var_rows[j].iter().copied());
                if !excess.is_positive() {
                    continue 'repair;
                }
            }
            ok = false;
            break;
        }
        if ok {
            ok = touched.iter().all(|&r| self.activity(r, base) <= rows[r].bound)
                && undo.iter().all(|(j, _)| !base[*j].is_negative() && base[*j] <= one());
        }
        if !ok {
            for (j, old) in undo.into_iter().rev() {
                base[j] = old;
            }
        }
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn propagation_on_three_nodes() {
        let mut p = LpProblem::new(3);
        p.add_row([(0, int(1)), (1, int(-1))], int(0)).unwrap();
        p.add_row([(1, int(1)), (2, int(1))], int(1)).unwrap();
        p.add_row([(2, int(-1))], ratio(-1, 2)).unwrap();
        let c = Certifier::new(&p).unwrap();
        assert_eq!((c.lower(2), c.upper(2)), (&ratio(1, 2), &int(1)));
        assert_eq!((c.lower(1), c.upper(1)), (&int(0), &ratio(1, 2)));
        assert_eq!((c.lower(0), c.upper(0)), (&int(0), &ratio(1, 2)));
        let mut base = c.lower_corner().unwrap();
        assert!(c.reach(&mut base, 0, &ratio(1, 2)));
        assert_eq!(base, vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn detects_simple_infeasibility() {
        let mut p = LpProblem::new(1);
        p.add_row([(0, int(1))], ratio(1, 2)).unwrap();
        p.add_row([(0, int(-1))], int(-1)).unwrap();
        assert!(Certifier::new(&p).is_none());
    }

    #[test]
    fn loose_bounds_are_not_reached() {
        // x + y >= 1 and x = y: propagation leaves x in [0, 1], yet x >= 1/2.
        let mut p = LpProblem::new(2);
        p.add_row([(0, int(-1)), (1, int(-1))], int(-1)).unwrap();
        p.add_row([(0, int(1)), (1, int(-1))], int(0)).unwrap();
        p.add_row([(0, int(-1)), (1, int(1))], int(0)).unwrap();
        let c = Certifier::new(&p).unwrap();
        assert_eq!(c.lower(0), &int(0));
        assert!(c.lower_corner().is_none());
        let mut base = vec![int(1), int(1)];
        assert!(!c.reach(&mut base, 0, &int(0)));
        assert_eq!(base, vec![int(1), int(1)]);
    }
}
