//! Thin wrapper over `microlp` that polishes the returned vertex.
//!
//! The simplex solver carries round-off through its factorization updates and
//! occasionally returns vertices that miss equality constraints by ~1e-6. The
//! polish step keeps the basis the solver found but recomputes its values
//! exactly: variables at a bound are pinned there, and the remaining ones are
//! solved from the active constraints by a dense QR factorization.

use microlp::{OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

pub(crate) use microlp::ComparisonOp;

use crate::error::{Error, Result};
use crate::lfd::SolverStatus;

pub(crate) type Var = usize;

struct Row {
    terms: Vec<(Var, f64)>,
    op: ComparisonOp,
    rhs: f64,
}

/// A minimization LP with bounded variables.
#[derive(Default)]
pub(crate) struct LinearProgram {
    cost: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<Row>,
}

pub(crate) struct LpSolution {
    x: Vec<f64>,
    pub(crate) objective: f64,
}

impl LpSolution {
    pub(crate) fn value(&self, v: Var) -> f64 {
        self.x[v]
    }
}

/// Pinning thresholds tried in order; the first that yields a consistent,
/// feasible vertex wins.
const PIN_THRESHOLDS: [f64; 4] = [1e-10, 1e-8, 1e-6, 1e-5];

impl LinearProgram {
    pub(crate) fn add_var(&mut self, cost: f64, bounds: (f64, f64)) -> Var {
        self.cost.push(cost);
        self.bounds.push(bounds);
        self.cost.len() - 1
    }

    pub(crate) fn add_constraint(&mut self, terms: &[(Var, f64)], op: ComparisonOp, rhs: f64) {
        self.rows.push(Row {
            terms: terms.to_vec(),
            op,
            rhs,
        });
    }

    /// Solves, polishes, and on a vertex that cannot be polished (or a solver
    /// breakdown) retries with reversed variable and constraint order, which
    /// changes the pivot sequence. Falls back to the least-violating raw
    /// solution.
    pub(crate) fn solve(&self) -> Result<LpSolution> {
        let mut fallback: Option<(f64, Vec<f64>)> = None;
        let mut last_error = None;
        for (reverse_vars, reverse_rows) in [(false, false), (true, true), (false, true), (true, false)] {
            let raw = match self.solve_raw(reverse_vars, reverse_rows) {
                Ok(raw) => raw,
                Err(
                    e @ Error::Solver {
                        status: SolverStatus::Infeasible,
                        ..
                    },
                ) => return Err(e),
                Err(e) => {
                    last_error = Some(e);
                    continue;
                }
            };
            let raw_objective = self.objective(&raw);
            for thr in PIN_THRESHOLDS {
                if let Some(x) = self.polish(&raw, thr) {
                    let objective = self.objective(&x);
                    if objective <= raw_objective + 1e-6 * raw_objective.abs().max(1.0) {
                        return Ok(LpSolution { x, objective });
                    }
                }
            }
            let violation = self.max_violation(&raw);
            if fallback.as_ref().is_none_or(|(v, _)| violation < *v) {
                fallback = Some((violation, raw));
            }
        }
        let Some((_, x)) = fallback else {
            return Err(last_error.expect("every attempt failed with an error"));
        };
        let objective = self.objective(&x);
        Ok(LpSolution { x, objective })
    }

    fn solve_raw(&self, reverse_vars: bool, reverse_rows: bool) -> Result<Vec<f64>> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let n = self.cost.len();
        let order: Vec<usize> = if reverse_vars {
            (0..n).rev().collect()
        } else {
            (0..n).collect()
        };
        let mut vars = vec![None; n];
        for &j in &order {
            vars[j] = Some(problem.add_var(self.cost[j], self.bounds[j]));
        }
        let vars: Vec<_> = vars.into_iter().map(|v| v.expect("every variable added")).collect();
        let rows: Box<dyn Iterator<Item = &Row>> = if reverse_rows {
            Box::new(self.rows.iter().rev())
        } else {
            Box::new(self.rows.iter())
        };
        for row in rows {
            let terms: Vec<_> = row.terms.iter().map(|&(v, a)| (vars[v], a)).collect();
            problem.add_constraint(terms.as_slice(), row.op, row.rhs);
        }
        let solution = problem
            .solve()
            .map_err(|e| Error::Solver {
                status: match e {
                    microlp::Error::Infeasible => SolverStatus::Infeasible,
                    _ => SolverStatus::NumericalFailure,
                },
                detail: e.to_string(),
            })?
            .into_solution()
            .map_err(|interrupted| Error::Solver {
                status: SolverStatus::NumericalFailure,
                detail: format!("solve interrupted: {:?}", interrupted.termination_reason()),
            })?;
        Ok(vars.iter().map(|&v| solution.var_value(v)).collect())
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn row_value(row: &Row, x: &[f64]) -> f64 {
        row.terms.iter().map(|&(v, a)| a * x[v]).sum()
    }

    fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        for row in &self.rows {
            let lhs = Self::row_value(row, x);
            let gap = match row.op {
                ComparisonOp::Eq => (lhs - row.rhs).abs(),
                ComparisonOp::Le => lhs - row.rhs,
                ComparisonOp::Ge => row.rhs - lhs,
            };
            worst = worst.max(gap);
        }
        worst
    }

    fn polish(&self, raw: &[f64], thr: f64) -> Option<Vec<f64>> {
        let mut x = raw.to_vec();
        let mut free = Vec::new();
        let mut column_of = vec![usize::MAX; x.len()];
        for (j, (v, &(lo, hi))) in x.iter_mut().zip(&self.bounds).enumerate() {
            if (*v - lo).abs() <= thr {
                *v = lo;
            } else if hi.is_finite() && (*v - hi).abs() <= thr {
                *v = hi;
            } else {
                column_of[j] = free.len();
                free.push(j);
            }
        }

        let active: Vec<&Row> = self
            .rows
            .iter()
            .filter(|row| {
                let scale = row.terms.iter().fold(1.0f64, |s, &(_, a)| s.max(a.abs()));
                matches!(row.op, ComparisonOp::Eq) || (Self::row_value(row, raw) - row.rhs).abs() <= thr * scale
            })
            .collect();

        if !free.is_empty() {
            if active.len() < free.len() {
                return None;
            }
            let mut a = DMatrix::<f64>::zeros(active.len(), free.len());
            let mut b = DVector::zeros(active.len());
            for (r, row) in active.iter().enumerate() {
                b[r] = row.rhs;
                for &(v, coef) in &row.terms {
                    match column_of[v] {
                        usize::MAX => b[r] -= coef * x[v],
                        c => a[(r, c)] += coef,
                    }
                }
            }
            let qr = a.clone().qr();
            let r = qr.r();
            let diag_max = r.diagonal().amax();
            if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * diag_max) {
                return None;
            }
            let mut qtb = b.clone();
            qr.q_tr_mul(&mut qtb);
            let y = r.solve_upper_triangular(&qtb.rows(0, free.len()).into_owned())?;
            if (&a * &y - &b).amax() > 1e-11 * b.amax().max(1.0) {
                return None;
            }
            for (c, &j) in free.iter().enumerate() {
                x[j] = y[c];
            }
        }

        let (lo, hi): (Vec<f64>, Vec<f64>) = self.bounds.iter().copied().unzip();
        for ((v, l), h) in x.iter_mut().zip(&lo).zip(&hi) {
            if *v < *l && *v > l - 1e-12 {
                *v = *l;
            }
            if *v > *h && *v < h + 1e-12 {
                *v = *h;
            }
        }
        (self.max_violation(&x) <= 1e-11).then_some(x)
    }
}
