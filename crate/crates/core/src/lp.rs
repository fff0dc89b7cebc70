//! Exact primal Delsarte linear program.
//!
//! A dense tableau simplex over `BigRational` with Bland's rule, so there are
//! no tolerances and degenerate pivots cannot cycle.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::params::{RadialFunction, SchemeParameters};

/// Largest diameter accepted by [`DelsarteLpInstance`].
pub const MAX_LP_DIAMETER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("minimum distance {d} outside [1, {n}]")]
    Domain { d: usize, n: usize },
    #[error("diameter {n} exceeds the dense simplex cap {max}")]
    TooLarge { n: usize, max: usize },
    #[error("linear program has {rows} rows but {bounds} right-hand sides")]
    Shape { rows: usize, bounds: usize },
    #[error("Delsarte program reported {0:?}, which is impossible for a valid scheme")]
    Unexpected(LpStatus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

/// `maximize c.x subject to A x <= b, x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<BigRational>,
    pub rows: Vec<Vec<BigRational>>,
    pub bounds: Vec<BigRational>,
}

/// Result of [`LinearProgram::maximize`]. `value` and `point` are only
/// meaningful when `status` is optimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexOutcome {
    pub status: LpStatus,
    pub value: BigRational,
    pub point: Vec<BigRational>,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    costs: Vec<BigRational>,
    value: BigRational,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry /= &pivot;
        }
        self.rhs[row] /= &pivot;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (entry, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.costs[col].is_zero() {
            let factor = self.costs[col].clone();
            for (entry, p) in self.costs.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &factor * p;
                }
            }
            self.value += &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Bland's rule: smallest improving column, ties in the ratio test go
    /// to the smallest basic index. Returns false when unbounded.
    fn run(&mut self) -> bool {
        loop {
            let Some(col) = self.costs.iter().position(|c| c.is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][col];
                let better = match &best {
                    None => true,
                    Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<BigRational>, rows: Vec<Vec<BigRational>>, bounds: Vec<BigRational>) -> Self {
        Self { objective, rows, bounds }
    }

    /// Same program with the constraints reordered: row `i` of the result is
    /// row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        Self {
            objective: self.objective.clone(),
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
            bounds: order.iter().map(|&i| self.bounds[i].clone()).collect(),
        }
    }

    pub fn maximize(&self) -> Result<SimplexOutcome, LpError> {
        if self.rows.len() != self.bounds.len() {
            return Err(LpError::Shape { rows: self.rows.len(), bounds: self.bounds.len() });
        }
        let vars = self.objective.len();
        let constraints = self.rows.len();
        // Columns: 0 = auxiliary, 1..=vars = decision variables, then slacks.
        let width = 1 + vars + constraints;
        let mut rows = Vec::with_capacity(constraints);
        for (i, row) in self.rows.iter().enumerate() {
            let mut full = vec![BigRational::zero(); width];
            full[0] = -BigRational::one();
            for (j, a) in row.iter().enumerate() {
                full[1 + j] = a.clone();
            }
            full[1 + vars + i] = BigRational::one();
            rows.push(full);
        }
        let mut tableau = Tableau {
            rows,
            rhs: self.bounds.clone(),
            basis: (0..constraints).map(|i| 1 + vars + i).collect(),
            costs: vec![BigRational::zero(); width],
            value: BigRational::zero(),
        };

        // Phase one: maximise -x0 after one forced pivot makes the
        // dictionary feasible.
        let most_negative = (0..constraints).filter(|&i| tableau.rhs[i].is_negative()).min_by(|&a, &b| {
            tableau.rhs[a].cmp(&tableau.rhs[b]).then(a.cmp(&b))
        });
        if let Some(row) = most_negative {
            tableau.costs[0] = -BigRational::one();
            tableau.pivot(row, 0);
            tableau.run();
            if tableau.value.is_negative() {
                return Ok(SimplexOutcome { status: LpStatus::Infeasible, value: BigRational::zero(), point: vec![] });
            }
            if let Some(row) = tableau.basis.iter().position(|&b| b == 0) {
                if let Some(col) = (1..width).find(|&c| !tableau.rows[row][c].is_zero()) {
                    tableau.pivot(row, col);
                }
            }
        }
        // Drop the auxiliary column and price out the real objective.
        for row in tableau.rows.iter_mut() {
            row[0] = BigRational::zero();
        }
        let mut costs = vec![BigRational::zero(); width];
        for (j, c) in self.objective.iter().enumerate() {
            costs[1 + j] = c.clone();
        }
        let mut value = BigRational::zero();
        for (i, &b) in tableau.basis.iter().enumerate() {
            if costs[b].is_zero() {
                continue;
            }
            let cb = costs[b].clone();
            value += &cb * &tableau.rhs[i];
            for (cost, entry) in costs.iter_mut().zip(&tableau.rows[i]) {
                if !entry.is_zero() {
                    *cost -= &cb * entry;
                }
            }
        }
        tableau.costs = costs;
        tableau.value = value;

        if !tableau.run() {
            return Ok(SimplexOutcome { status: LpStatus::Unbounded, value: BigRational::zero(), point: vec![] });
        }
        let mut point = vec![BigRational::zero(); vars];
        for (i, &b) in tableau.basis.iter().enumerate() {
            if (1..=vars).contains(&b) {
                point[b - 1] = tableau.rhs[i].clone();
            }
        }
        Ok(SimplexOutcome { status: LpStatus::Optimal, value: tableau.value, point })
    }
}

/// The Delsarte program for codes of minimum distance `d`:
/// maximise `sum_t u(t)` with `u(0) = 1`, `u(t) = 0` on `[1, d)`,
/// `u(t) >= 0` and `sum_t u(t) q_i(t) >= 0` for every `i`.
#[derive(Debug, Clone)]
pub struct DelsarteLpInstance<'a> {
    params: &'a SchemeParameters,
    d: usize,
}

/// Optimum of a Delsarte program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: BigRational,
    pub u: RadialFunction,
    pub status: LpStatus,
}

impl<'a> DelsarteLpInstance<'a> {
    pub fn new(params: &'a SchemeParameters, d: usize) -> Result<Self, LpError> {
        let n = params.n();
        if n > MAX_LP_DIAMETER {
            return Err(LpError::TooLarge { n, max: MAX_LP_DIAMETER });
        }
        if d == 0 || d > n {
            return Err(LpError::Domain { d, n });
        }
        Ok(Self { params, d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The free variables are `u(d), ..., u(n)`; constraint `i` reads
    /// `-sum_t q_i(t) u(t) <= q_i(0)`.
    pub fn program(&self) -> LinearProgram {
        let n = self.params.n();
        let objective = vec![BigRational::one(); n + 1 - self.d];
        let rows = (0..=n).map(|i| (self.d..=n).map(|t| -self.params.q(i, t)).collect()).collect();
        let bounds = (0..=n).map(|i| self.params.q(i, 0).clone()).collect();
        LinearProgram::new(objective, rows, bounds)
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.solve_program(&self.program())
    }

    /// Solve a (possibly row-permuted) copy of [`Self::program`].
    pub fn solve_program(&self, program: &LinearProgram) -> Result<LpSolution, LpError> {
        let outcome = program.maximize()?;
        if outcome.status != LpStatus::Optimal {
            return Err(LpError::Unexpected(outcome.status));
        }
        let mut u = vec![BigRational::zero(); self.params.n() + 1];
        u[0] = BigRational::one();
        for (offset, value) in outcome.point.into_iter().enumerate() {
            u[self.d + offset] = value;
        }
        Ok(LpSolution { value: outcome.value + BigRational::one(), u: RadialFunction::new(u), status: LpStatus::Optimal })
    }
}

/// `A_LP(n, d)` for the given scheme.
pub fn solve_primal(params: &SchemeParameters, d: usize) -> Result<LpSolution, LpError> {
    DelsarteLpInstance::new(params, d)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ratio, rational};
    use crate::params::{hamming_parameters, johnson_parameters};

    fn r(values: &[i64]) -> Vec<BigRational> {
        values.iter().map(|&v| rational(v)).collect()
    }

    #[test]
    fn textbook_programs() {
        // maximise 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
        let lp = LinearProgram::new(r(&[3, 2]), vec![r(&[1, 1]), r(&[1, 3]), r(&[1, 0])], r(&[4, 6, 3]));
        let out = lp.maximize().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, rational(11));
        assert_eq!(out.point, r(&[3, 1]));

        let unbounded = LinearProgram::new(r(&[1, 0]), vec![r(&[-1, 1])], r(&[1]));
        assert_eq!(unbounded.maximize().unwrap().status, LpStatus::Unbounded);

        // x >= 2 written as -x <= -2, together with x <= 1
        let infeasible = LinearProgram::new(r(&[1]), vec![r(&[-1]), r(&[1])], r(&[-2, 1]));
        assert_eq!(infeasible.maximize().unwrap().status, LpStatus::Infeasible);

        // needs phase one: maximise x s.t. -x <= -1, x <= 5/2
        let shifted = LinearProgram::new(r(&[1]), vec![r(&[-1]), r(&[1])], vec![rational(-1), ratio(5, 2)]);
        let out = shifted.maximize().unwrap();
        assert_eq!((out.status, out.value), (LpStatus::Optimal, ratio(5, 2)));
    }

    #[test]
    fn hamming_7_3() {
        let params = hamming_parameters(7, 2).unwrap();
        let solution = solve_primal(&params, 3).unwrap();
        assert_eq!(solution.value, rational(16));
        assert_eq!(solution.u[0], rational(1));
        assert!(solution.u[1].is_zero() && solution.u[2].is_zero());
    }

    #[test]
    fn d_one_gives_whole_space() {
        for params in [hamming_parameters(5, 2).unwrap(), hamming_parameters(4, 3).unwrap(), johnson_parameters(7, 3).unwrap()]
        {
            assert_eq!(solve_primal(&params, 1).unwrap().value, params.size_rational());
        }
    }

    #[test]
    fn domain_contract() {
        let params = hamming_parameters(6, 2).unwrap();
        assert!(matches!(solve_primal(&params, 0), Err(LpError::Domain { .. })));
        assert!(matches!(solve_primal(&params, 7), Err(LpError::Domain { .. })));
        assert!(solve_primal(&params, 6).is_ok());
        let big = hamming_parameters(65, 2).unwrap();
        assert!(matches!(solve_primal(&big, 3), Err(LpError::TooLarge { .. })));
    }

    #[test]
    fn optimum_is_feasible_and_row_order_invariant() {
        let params = hamming_parameters(9, 2).unwrap();
        let instance = DelsarteLpInstance::new(&params, 4).unwrap();
        let base = instance.solve().unwrap();
        for i in 0..=9 {
            let total: BigRational = (0..=9).map(|t| &base.u[t] * params.q(i, t)).sum();
            assert!(!total.is_negative());
        }
        let order: Vec<usize> = (0..=9).rev().collect();
        let permuted = instance.solve_program(&instance.program().permute_rows(&order)).unwrap();
        assert_eq!(permuted.value, base.value);
    }
}
