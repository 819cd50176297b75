//! Least favorable distributions on the empirical support.
//!
//! [`solve_lfd`] solves
//!
//! ```text
//! min  Σ_i max_m p_m^i
//! s.t. Σ_{i,j} γ_m^{ij} c(ξ^i, ξ^j) ≤ ϑ_m
//!      Σ_i γ_m^{ij} = P̂_m(ξ^j),   Σ_j γ_m^{ij} = p_m^i,   γ_m ≥ 0
//! ```
//!
//! as a linear program, replacing each `max_m p_m^i` by an epigraph variable
//! `t_i ≥ p_m^i`. Rows of `γ_m` index the LFD support and columns the empirical
//! support, so `p_m` is the row-sum of `γ_m` and is not a separate variable.
//! Columns outside the support of `P̂_m` are forced to zero and are omitted.
//!
//! [`solve_lipschitz`] solves the Lipschitz-regularized classification LP over
//! the same support. Its optimal value coincides with the minimax risk, which
//! [`duality_report`] checks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::domain::{max_mass_sum, ClassifierAssignment, CostMatrix, EmpiricalDistribution, TieRule, SIMPLEX_TOL};
use crate::error::{Error, Result};
use crate::lp::{ComparisonOp, LinearProgram, Var};

/// Constraint violation tolerated in returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Relative gap tolerated between the LP objective and the recomputed one.
pub const OPTIMALITY_TOL: f64 = 1e-7;
/// Weight on Σ_m L_m that selects a minimal-Lipschitz optimizer.
pub const LIPSCHITZ_TIE_BREAK: f64 = 1e-7;

/// Per-class Wasserstein radii ϑ_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadiusVector(Vec<f64>);

impl RadiusVector {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::param("radii", "no radii given"));
        }
        if let Some(r) = radii.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::param("radii", format!("{r} is not a finite nonnegative radius")));
        }
        Ok(Self(radii))
    }

    /// The same radius for every class.
    pub fn uniform(class_count: usize, radius: f64) -> Result<Self> {
        Self::new(vec![radius; class_count])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for RadiusVector {
    type Output = f64;

    fn index(&self, m: usize) -> &f64 {
        &self.0[m]
    }
}

/// Joint distribution γ_m: rows index the LFD support, columns the empirical
/// support.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    plan: DMatrix<f64>,
}

impl TransportPlan {
    pub fn new(plan: DMatrix<f64>) -> Result<Self> {
        if plan.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Shape("transport plan has a negative entry".into()));
        }
        Ok(Self { plan })
    }

    /// The plan that leaves every unit of mass where it is.
    pub fn diagonal(dist: &EmpiricalDistribution) -> Self {
        Self {
            plan: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(dist.mass())),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.plan
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.plan.row_iter().map(|r| r.sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.plan.column_iter().map(|c| c.sum()).collect()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.plan * factor)
    }
}

/// Σ_{i,j} γ^{ij} c(ξ^i, ξ^j).
pub fn transport_cost(plan: &TransportPlan, cost: &CostMatrix) -> Result<f64> {
    if plan.plan.shape() != (cost.n(), cost.n()) {
        return Err(Error::Shape(format!(
            "plan is {:?}, cost is {}x{}",
            plan.plan.shape(),
            cost.n(),
            cost.n()
        )));
    }
    Ok(plan.plan.component_mul(cost.matrix()).sum())
}

/// Wasserstein-1 distance between two distributions on the same support by
/// solving the transportation LP directly. Returns the optimal value and plan
/// (rows index `p`, columns index `q`).
pub fn optimal_transport(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
    cost: &CostMatrix,
) -> Result<(f64, TransportPlan)> {
    let n = cost.n();
    if p.len() != n || q.len() != n {
        return Err(Error::Shape("distributions and cost disagree on n".into()));
    }
    let mut problem = LinearProgram::default();
    let vars: Vec<Vec<Var>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| problem.add_var(cost.get(i, j), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for i in 0..n {
        let row: Vec<(Var, f64)> = (0..n).map(|j| (vars[i][j], 1.0)).collect();
        problem.add_constraint(row.as_slice(), ComparisonOp::Eq, p[i]);
    }
    for j in 0..n {
        let col: Vec<(Var, f64)> = (0..n).map(|i| (vars[i][j], 1.0)).collect();
        problem.add_constraint(col.as_slice(), ComparisonOp::Eq, q[j]);
    }
    let solution = problem.solve()?;
    let plan = DMatrix::from_fn(n, n, |i, j| solution.value(vars[i][j]).max(0.0));
    Ok((solution.objective, TransportPlan { plan }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LfdSolution {
    /// The least favorable distributions p_m.
    pub lfds: Vec<EmpiricalDistribution>,
    pub plans: Vec<TransportPlan>,
    /// Σ_i max_m p_m^i.
    pub objective: f64,
    /// M − objective.
    pub minimax_risk: f64,
    /// Realized transport cost per class.
    pub spend: Vec<f64>,
    pub status: SolverStatus,
    /// Why the status is not optimal, if it isn't.
    pub diagnostics: Option<String>,
}

impl LfdSolution {
    pub fn class_count(&self) -> usize {
        self.lfds.len()
    }
}

fn check_inputs(cost: &CostMatrix, empirical: &[EmpiricalDistribution], radii: &RadiusVector) -> Result<()> {
    if empirical.len() < 2 {
        return Err(Error::param(
            "classes",
            format!("need at least 2 classes, got {}", empirical.len()),
        ));
    }
    if radii.len() != empirical.len() {
        return Err(Error::Shape(format!(
            "{} radii for {} classes",
            radii.len(),
            empirical.len()
        )));
    }
    if let Some(m) = empirical.iter().position(|d| d.len() != cost.n()) {
        return Err(Error::Shape(format!(
            "class {m} distribution has {} points, cost matrix has {}",
            empirical[m].len(),
            cost.n()
        )));
    }
    Ok(())
}

/// Solves the least-favorable-distribution program.
///
/// A returned solution whose recomputed constraints or objective miss the
/// tolerances carries [`SolverStatus::NumericalFailure`] and a diagnostic.
pub fn solve_lfd(cost: &CostMatrix, empirical: &[EmpiricalDistribution], radii: &RadiusVector) -> Result<LfdSolution> {
    check_inputs(cost, empirical, radii)?;
    let n = cost.n();
    let class_count = empirical.len();

    let mut problem = LinearProgram::default();
    let epigraph: Vec<Var> = (0..n).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();

    // gamma[m] holds (row i, column j, variable) for columns in supp(P̂_m).
    let mut gamma: Vec<Vec<(usize, usize, Var)>> = Vec::with_capacity(class_count);
    for dist in empirical {
        let mut vars = Vec::new();
        for j in dist.support() {
            for i in 0..n {
                vars.push((i, j, problem.add_var(0.0, (0.0, f64::INFINITY))));
            }
        }
        gamma.push(vars);
    }

    for (m, dist) in empirical.iter().enumerate() {
        for j in dist.support() {
            let column: Vec<(Var, f64)> = gamma[m]
                .iter()
                .filter(|(_, jj, _)| *jj == j)
                .map(|&(_, _, v)| (v, 1.0))
                .collect();
            problem.add_constraint(column.as_slice(), ComparisonOp::Eq, dist[j]);
        }

        let budget: Vec<(Var, f64)> = gamma[m]
            .iter()
            .filter(|(i, j, _)| cost.get(*i, *j) > 0.0)
            .map(|&(i, j, v)| (v, cost.get(i, j)))
            .collect();
        if !budget.is_empty() {
            problem.add_constraint(budget.as_slice(), ComparisonOp::Le, radii[m]);
        }

        for (i, &t) in epigraph.iter().enumerate() {
            let mut row: Vec<(Var, f64)> = gamma[m]
                .iter()
                .filter(|(ii, _, _)| *ii == i)
                .map(|&(_, _, v)| (v, 1.0))
                .collect();
            row.push((t, -1.0));
            problem.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
        }
    }

    let solution = problem.solve()?;
    let lp_objective = solution.objective;

    let mut problems = Vec::new();
    let mut plans = Vec::with_capacity(class_count);
    let mut lfds = Vec::with_capacity(class_count);
    let mut spend = Vec::with_capacity(class_count);
    for (m, vars) in gamma.iter().enumerate() {
        let mut plan = DMatrix::zeros(n, n);
        for &(i, j, v) in vars {
            let value = solution.value(v);
            if value < -FEASIBILITY_TOL {
                problems.push(format!("class {m}: gamma[{i},{j}] = {value:e}"));
            }
            plan[(i, j)] = value.max(0.0);
        }
        let plan = TransportPlan { plan };

        for (j, s) in plan.column_sums().into_iter().enumerate() {
            if (s - empirical[m][j]).abs() > FEASIBILITY_TOL {
                problems.push(format!(
                    "class {m}: column {j} sums to {s}, expected {}",
                    empirical[m][j]
                ));
            }
        }
        let moved = transport_cost(&plan, cost)?;
        if moved > radii[m] + FEASIBILITY_TOL {
            problems.push(format!("class {m}: transport cost {moved} exceeds radius {}", radii[m]));
        }

        // Column sums are each within FEASIBILITY_TOL, so the total mass may
        // drift by up to n times that; renormalize within that band.
        let rows = plan.row_sums();
        let total: f64 = rows.iter().sum();
        if (total - 1.0).abs() > n as f64 * FEASIBILITY_TOL {
            problems.push(format!("class {m}: LFD mass sums to {total}"));
        }
        let lfd = EmpiricalDistribution::new(rows.iter().map(|r| r / total).collect())?;
        plans.push(plan);
        lfds.push(lfd);
        spend.push(moved);
    }

    let objective = max_mass_sum(&lfds)?;
    if (objective - lp_objective).abs() > OPTIMALITY_TOL * objective.abs().max(1.0) {
        problems.push(format!(
            "recomputed objective {objective} differs from LP objective {lp_objective}"
        ));
    }
    let (status, diagnostics) = if problems.is_empty() {
        (SolverStatus::Optimal, None)
    } else {
        (SolverStatus::NumericalFailure, Some(problems.join("; ")))
    };

    Ok(LfdSolution {
        lfds,
        plans,
        objective,
        minimax_risk: class_count as f64 - objective,
        spend,
        status,
        diagnostics,
    })
}

/// The minimax classifier on the support: argmax of the LFDs, uniform over
/// ties. Its [`ClassifierAssignment::decisions`] break ties to the lowest class.
pub fn optimal_classifier(sol: &LfdSolution) -> Result<ClassifierAssignment> {
    if sol.status != SolverStatus::Optimal {
        return Err(Error::Solver {
            status: sol.status,
            detail: sol
                .diagnostics
                .clone()
                .unwrap_or_else(|| "solution is not optimal".into()),
        });
    }
    ClassifierAssignment::argmax_of(&sol.lfds, TieRule::Uniform)
}

#[derive(Debug, Clone)]
pub struct LipschitzSolution {
    pub pi: ClassifierAssignment,
    /// Lipschitz constants L_m of each class component.
    pub lip_norms: Vec<f64>,
    /// Empirical risk plus Σ_m ϑ_m L_m, without the tie-break term.
    pub value: f64,
}

impl LipschitzSolution {
    /// Largest violation of |π_m(ξ^i) − π_m(ξ^j)| ≤ L_m c(ξ^i, ξ^j).
    pub fn max_lipschitz_violation(&self, cost: &CostMatrix) -> f64 {
        let n = self.pi.n();
        let mut worst = 0.0f64;
        for (m, &l) in self.lip_norms.iter().enumerate() {
            for i in 0..n {
                for j in (i + 1)..n {
                    let gap = (self.pi.get(i, m) - self.pi.get(j, m)).abs() - l * cost.get(i, j);
                    worst = worst.max(gap);
                }
            }
        }
        worst
    }
}

/// Solves the Lipschitz-regularized classification LP
///
/// ```text
/// min Σ_m [ Σ_i P̂_m(ξ^i)(1 − π_m(ξ^i)) + ϑ_m L_m ] + ε Σ_m L_m
/// s.t. π(ξ^i) ∈ Δ_M,  |π_m(ξ^i) − π_m(ξ^j)| ≤ L_m c(ξ^i, ξ^j)
/// ```
///
/// with ε = [`LIPSCHITZ_TIE_BREAK`].
pub fn solve_lipschitz(
    cost: &CostMatrix,
    empirical: &[EmpiricalDistribution],
    radii: &RadiusVector,
) -> Result<LipschitzSolution> {
    check_inputs(cost, empirical, radii)?;
    let n = cost.n();
    let class_count = empirical.len();

    let mut problem = LinearProgram::default();
    let pi: Vec<Vec<Var>> = (0..n)
        .map(|i| empirical.iter().map(|d| problem.add_var(-d[i], (0.0, 1.0))).collect())
        .collect();
    let lip: Vec<Var> = (0..class_count)
        .map(|m| problem.add_var(radii[m] + LIPSCHITZ_TIE_BREAK, (0.0, f64::INFINITY)))
        .collect();

    for row in &pi {
        let terms: Vec<(Var, f64)> = row.iter().map(|&v| (v, 1.0)).collect();
        problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, 1.0);
    }
    for m in 0..class_count {
        for i in 0..n {
            for j in (i + 1)..n {
                let c = cost.get(i, j);
                problem.add_constraint(
                    &[(pi[i][m], 1.0), (pi[j][m], -1.0), (lip[m], -c)],
                    ComparisonOp::Le,
                    0.0,
                );
                problem.add_constraint(
                    &[(pi[i][m], -1.0), (pi[j][m], 1.0), (lip[m], -c)],
                    ComparisonOp::Le,
                    0.0,
                );
            }
        }
    }

    let solution = problem.solve()?;

    let mut probs = DMatrix::zeros(n, class_count);
    for (i, row) in pi.iter().enumerate() {
        for (m, &v) in row.iter().enumerate() {
            probs[(i, m)] = solution.value(v).clamp(0.0, 1.0);
        }
        let total: f64 = probs.row(i).sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Solver {
                status: SolverStatus::NumericalFailure,
                detail: format!("classifier row {i} sums to {total}"),
            });
        }
        probs.row_mut(i).scale_mut(1.0 / total);
    }
    let pi = ClassifierAssignment::new(probs)?;
    let lip_norms: Vec<f64> = lip.iter().map(|&v| solution.value(v).max(0.0)).collect();

    let value =
        crate::domain::risk(&pi, empirical)? + lip_norms.iter().zip(radii.as_slice()).map(|(l, r)| l * r).sum::<f64>();

    Ok(LipschitzSolution { pi, lip_norms, value })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityReport {
    pub lfd_value: f64,
    pub lip_value: f64,
    pub gap: f64,
    pub lip_norms: Vec<f64>,
    /// L_m ≤ 1/ϑ_m + 1e-6 for every class with ϑ_m > 0.
    pub lambda_bound_ok: bool,
}

/// Solves both programs and compares their values.
pub fn duality_report(
    cost: &CostMatrix,
    empirical: &[EmpiricalDistribution],
    radii: &RadiusVector,
) -> Result<DualityReport> {
    let lfd = solve_lfd(cost, empirical, radii)?;
    if lfd.status != SolverStatus::Optimal {
        return Err(Error::Solver {
            status: lfd.status,
            detail: lfd.diagnostics.unwrap_or_default(),
        });
    }
    let lip = solve_lipschitz(cost, empirical, radii)?;
    let lambda_bound_ok = lip
        .lip_norms
        .iter()
        .zip(radii.as_slice())
        .filter(|(_, &r)| r > 0.0)
        .all(|(&l, &r)| l <= 1.0 / r + 1e-6);
    Ok(DualityReport {
        lfd_value: lfd.minimax_risk,
        lip_value: lip.value,
        gap: (lfd.minimax_risk - lip.value).abs(),
        lip_norms: lip.lip_norms,
        lambda_bound_ok,
    })
}
