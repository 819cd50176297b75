//! Brute-force oracles for tiny instances.
//!
//! None of these touch the LP solver: exact Wasserstein distances come from
//! enumerating the bases of the transportation polytope, the LFD objective from
//! a grid over products of simplices, and the Bayes risk from enumerating
//! assignments.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{euclidean_cost, CostMatrix, Dataset, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::lfd::{solve_lfd, RadiusVector, SolverStatus};

/// Largest support handled by [`wasserstein_exact_small`].
pub const MAX_EXACT_N: usize = 4;
/// Largest support handled by [`exhaustive_classifier_risk`].
pub const MAX_ENUM_N: usize = 6;

/// Simplex grid used by [`brute_force_lfd`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: f64,
    pub max_n: usize,
    pub max_m: usize,
}

impl GridSpec {
    pub fn new(resolution: f64) -> Result<Self> {
        let steps = (1.0 / resolution).round();
        if resolution.is_nan() || resolution <= 0.0 || steps < 1.0 || (steps * resolution - 1.0).abs() > 1e-12 {
            return Err(Error::param(
                "grid-step",
                format!("{resolution} does not divide 1 evenly"),
            ));
        }
        Ok(Self {
            resolution,
            max_n: MAX_EXACT_N,
            max_m: 3,
        })
    }

    /// 0.01 for two points and two classes, 0.05 otherwise.
    pub fn default_for(n: usize, class_count: usize) -> Self {
        let step = if n <= 2 && class_count <= 2 { 0.01 } else { 0.05 };
        Self::new(step).expect("built-in resolutions divide 1")
    }

    pub fn steps(&self) -> usize {
        (1.0 / self.resolution).round() as usize
    }

    /// The guaranteed distance between the grid optimum and the true optimum.
    pub fn error_bound(&self, n: usize, class_count: usize) -> f64 {
        class_count as f64 * n as f64 * self.resolution
    }
}

/// A nonsingular basis of the transportation constraints: row sums for all
/// rows, column sums for all but the last column.
struct Basis {
    cells: Vec<(usize, usize)>,
    inverse: DMatrix<f64>,
}

fn bases(n: usize) -> &'static [Basis] {
    static CACHE: [OnceLock<Vec<Basis>>; MAX_EXACT_N + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    CACHE[n].get_or_init(|| enumerate_bases(n))
}

fn enumerate_bases(n: usize) -> Vec<Basis> {
    let size = 2 * n - 1;
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(size);
    fn recurse(
        start: usize,
        size: usize,
        n: usize,
        cells: &[(usize, usize)],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Basis>,
    ) {
        if chosen.len() == size {
            let mut b = DMatrix::<f64>::zeros(size, size);
            for (col, &c) in chosen.iter().enumerate() {
                let (i, j) = cells[c];
                b[(i, col)] = 1.0;
                if j + 1 < n {
                    b[(n + j, col)] = 1.0;
                }
            }
            // Totally unimodular: det is 0 or ±1 and the inverse is integral.
            if b.determinant().abs() > 0.5 {
                let inverse = b.try_inverse().expect("unit determinant").map(f64::round);
                out.push(Basis {
                    cells: chosen.iter().map(|&c| cells[c]).collect(),
                    inverse,
                });
            }
            return;
        }
        for c in start..cells.len() {
            if cells.len() - c < size - chosen.len() {
                break;
            }
            chosen.push(c);
            recurse(c + 1, size, n, cells, chosen, out);
            chosen.pop();
        }
    }
    recurse(0, size, n, &cells, &mut chosen, &mut out);
    out
}

/// Exact Wasserstein-1 distance between `p` and `q` on at most four points.
///
/// Two points use the closed form |p_1 − q_1|·c_12; larger supports take the
/// cheapest basic feasible solution over all bases of the transportation
/// polytope.
pub fn wasserstein_exact_small(p: &EmpiricalDistribution, q: &EmpiricalDistribution, cost: &CostMatrix) -> Result<f64> {
    let n = cost.n();
    if p.len() != n || q.len() != n {
        return Err(Error::Shape("distributions and cost disagree on n".into()));
    }
    if n > MAX_EXACT_N {
        return Err(Error::TooLarge(format!("n = {n} > {MAX_EXACT_N}")));
    }
    Ok(exact_w1(p.mass(), q.mass(), cost))
}

fn exact_w1(p: &[f64], q: &[f64], cost: &CostMatrix) -> f64 {
    let n = p.len();
    match n {
        1 => 0.0,
        2 => (p[0] - q[0]).abs() * cost.get(0, 1),
        _ => {
            let mut rhs = Vec::with_capacity(2 * n - 1);
            rhs.extend_from_slice(p);
            rhs.extend_from_slice(&q[..n - 1]);
            let mut best = f64::INFINITY;
            for basis in bases(n) {
                let mut total = 0.0;
                let mut feasible = true;
                for (r, &(i, j)) in basis.cells.iter().enumerate() {
                    let x: f64 = (0..rhs.len()).map(|c| basis.inverse[(r, c)] * rhs[c]).sum();
                    if x < -1e-12 {
                        feasible = false;
                        break;
                    }
                    total += x.max(0.0) * cost.get(i, j);
                }
                if feasible && total < best {
                    best = total;
                }
            }
            best
        }
    }
}

/// All points of the simplex in `n` coordinates with entries `k/steps`.
fn simplex_grid(n: usize, steps: usize) -> Vec<Vec<f64>> {
    fn recurse(n: usize, left: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            recurse(n, left - k, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    recurse(n, steps, steps, &mut Vec::with_capacity(n), &mut out);
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteForceLfd {
    pub objective: f64,
    /// The grid point (one distribution per class) attaining `objective`.
    pub certificate: Vec<Vec<f64>>,
    pub grid_points_checked: usize,
}

/// Minimizes Σ_i max_m p_m^i over grid distributions within the Wasserstein
/// radii of the empirical ones.
pub fn brute_force_lfd(
    cost: &CostMatrix,
    empirical: &[EmpiricalDistribution],
    radii: &RadiusVector,
    grid: &GridSpec,
) -> Result<BruteForceLfd> {
    let n = cost.n();
    let class_count = empirical.len();
    if n > grid.max_n || class_count > grid.max_m {
        return Err(Error::TooLarge(format!(
            "n = {n}, M = {class_count}; grid oracle handles n ≤ {}, M ≤ {}",
            grid.max_n, grid.max_m
        )));
    }
    if radii.len() != class_count || empirical.iter().any(|d| d.len() != n) {
        return Err(Error::Shape("radii, distributions and cost disagree".into()));
    }

    let points = simplex_grid(n, grid.steps());
    let feasible: Vec<Vec<&Vec<f64>>> = empirical
        .iter()
        .zip(radii.as_slice())
        .map(|(emp, &r)| {
            points
                .par_iter()
                .filter(|p| exact_w1(p, emp.mass(), cost) <= r + 1e-12)
                .collect()
        })
        .collect();
    if let Some(m) = feasible.iter().position(|f| f.is_empty()) {
        return Err(Error::Solver {
            status: SolverStatus::Infeasible,
            detail: format!("no grid point within radius of class {m}"),
        });
    }

    // floor[l][i]: the smallest p^i any class from l onward must still reach.
    let mut floor = vec![vec![0.0f64; n]; class_count + 1];
    for l in (0..class_count).rev() {
        for i in 0..n {
            let low = feasible[l].iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            floor[l][i] = floor[l + 1][i].max(low);
        }
    }

    // Nonnegative floats order like their bit patterns.
    let best = AtomicU64::new(f64::INFINITY.to_bits());
    let winner = feasible[0]
        .par_iter()
        .filter_map(|first| {
            let mut running = (*first).clone();
            let mut chosen = vec![*first];
            let mut local: Option<(f64, Vec<Vec<f64>>)> = None;
            search(1, &feasible, &floor, &mut running, &mut chosen, &best, &mut local);
            local
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("feasible sets are non-empty");

    Ok(BruteForceLfd {
        objective: winner.0,
        certificate: winner.1,
        grid_points_checked: feasible.iter().map(Vec::len).product(),
    })
}

fn search<'a>(
    level: usize,
    feasible: &[Vec<&'a Vec<f64>>],
    floor: &[Vec<f64>],
    running: &mut Vec<f64>,
    chosen: &mut Vec<&'a Vec<f64>>,
    best: &AtomicU64,
    local: &mut Option<(f64, Vec<Vec<f64>>)>,
) {
    let bound: f64 = running.iter().zip(&floor[level]).map(|(r, f)| r.max(*f)).sum();
    if bound > f64::from_bits(best.load(Ordering::Relaxed)) + 1e-15 {
        return;
    }
    if level == feasible.len() {
        let value: f64 = running.iter().sum();
        if local.as_ref().is_none_or(|(v, _)| value < *v) {
            *local = Some((value, chosen.iter().map(|p| (*p).clone()).collect()));
        }
        best.fetch_min(value.to_bits(), Ordering::Relaxed);
        return;
    }
    let saved = running.clone();
    for p in &feasible[level] {
        for (r, v) in running.iter_mut().zip(p.iter()) {
            *r = r.max(*v);
        }
        chosen.push(p);
        search(level + 1, feasible, floor, running, chosen, best, local);
        chosen.pop();
        running.copy_from_slice(&saved);
    }
}

/// Minimal total error probability over enumerated classifiers.
///
/// With `deterministic_only` the M^n hard assignments are enumerated;
/// otherwise every point may also split its mass uniformly over any non-empty
/// subset of classes.
pub fn exhaustive_classifier_risk(dists: &[EmpiricalDistribution], deterministic_only: bool) -> Result<f64> {
    let class_count = dists.len();
    let n = dists.first().map_or(0, |d| d.len());
    if class_count == 0 || n == 0 || dists.iter().any(|d| d.len() != n) {
        return Err(Error::Shape("distributions must share a non-empty support".into()));
    }
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge(format!("n = {n} > {MAX_ENUM_N}")));
    }

    // Candidate rows: (class, weight) lists.
    let mut rows: Vec<Vec<(usize, f64)>> = (0..class_count).map(|m| vec![(m, 1.0)]).collect();
    if !deterministic_only {
        for mask in 1u32..(1 << class_count) {
            if mask.count_ones() > 1 {
                let w = 1.0 / f64::from(mask.count_ones());
                rows.push(
                    (0..class_count)
                        .filter(|m| mask & (1 << m) != 0)
                        .map(|m| (m, w))
                        .collect(),
                );
            }
        }
    }

    // Per-point error of each candidate row: Σ_m P_m(i) (1 − π_m(i)).
    let errors: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            rows.iter()
                .map(|row| {
                    (0..class_count)
                        .map(|m| {
                            let pi = row.iter().find(|(c, _)| *c == m).map_or(0.0, |(_, w)| *w);
                            dists[m][i] * (1.0 - pi)
                        })
                        .sum()
                })
                .collect()
        })
        .collect();

    let choices = rows.len();
    let total = choices.pow(n as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut c = code;
        let mut value = 0.0;
        for point_errors in &errors {
            value += point_errors[c % choices];
            c /= choices;
        }
        best = best.min(value);
    }
    Ok(best)
}

/// One tiny problem of the built-in oracle suite.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub name: String,
    pub dataset: Dataset,
    pub radii: RadiusVector,
}

/// Seeded tiny instances with n ≤ 4 and M ≤ 3. Class sizes are 1, 2 or 4 so
/// that every empirical mass is a multiple of 0.05.
pub fn tiny_suite(seed: u64) -> Vec<TinyInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layouts: [&[usize]; 5] = [&[0, 1], &[0, 0, 1], &[0, 1, 2], &[0, 0, 1, 1], &[0, 0, 1, 2]];
    let radius_choices = [0.0, 0.05, 0.1, 0.2, 0.35, 0.5];
    let mut out = Vec::new();
    for layout in layouts {
        let class_count = layout.iter().max().unwrap() + 1;
        for rep in 0..4 {
            let features: Vec<Vec<f64>> = layout
                .iter()
                .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
                .collect();
            let dataset = Dataset::from_parts(features, layout.to_vec()).expect("valid tiny dataset");
            let radii: Vec<f64> = if rep == 3 {
                vec![2.0; class_count]
            } else {
                (0..class_count)
                    .map(|_| radius_choices[rng.random_range(0..radius_choices.len())])
                    .collect()
            };
            out.push(TinyInstance {
                name: format!("n{}_m{}_{}", layout.len(), class_count, rep),
                dataset,
                radii: RadiusVector::new(radii).expect("nonnegative radii"),
            });
        }
    }
    out
}

/// One line of the oracle table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleCheck {
    pub instance: String,
    pub check: String,
    pub solver: f64,
    pub oracle: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Runs the LP solver against the grid oracle and the closed-form risk against
/// exhaustive enumeration on every instance of [`tiny_suite`].
pub fn run_suite(seed: u64, resolution: Option<f64>) -> Result<Vec<OracleCheck>> {
    let mut rows = Vec::new();
    for inst in tiny_suite(seed) {
        let n = inst.dataset.len();
        let class_count = inst.dataset.class_count();
        let grid = match resolution {
            Some(r) => GridSpec::new(r)?,
            None => GridSpec::default_for(n, class_count),
        };
        let cost = euclidean_cost(&inst.dataset)?;
        let emp = crate::domain::empirical_distributions(&inst.dataset)?;

        let sol = solve_lfd(&cost, &emp, &inst.radii)?;
        let brute = brute_force_lfd(&cost, &emp, &inst.radii, &grid)?;
        let tolerance = grid.error_bound(n, class_count);
        rows.push(OracleCheck {
            instance: inst.name.clone(),
            check: "lfd_objective_vs_grid".into(),
            solver: sol.objective,
            oracle: brute.objective,
            tolerance,
            passed: sol.status == SolverStatus::Optimal
                && (sol.objective - brute.objective).abs() <= tolerance
                && sol.objective <= brute.objective + 1e-9,
        });

        let (closed, _) = crate::domain::minimal_risk(&sol.lfds)?;
        let enumerated = exhaustive_classifier_risk(&sol.lfds, true)?;
        rows.push(OracleCheck {
            instance: inst.name,
            check: "minimal_risk_vs_enumeration".into(),
            solver: closed,
            oracle: enumerated,
            tolerance: 1e-12,
            passed: (closed - enumerated).abs() <= 1e-12,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::minimal_risk;
    use crate::lfd::optimal_transport;
    use approx::assert_abs_diff_eq;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    fn unit_pair() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (CostMatrix, EmpiricalDistribution, EmpiricalDistribution) {
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random(), rng.random()]).collect();
        let ds = Dataset::from_parts(pts, vec![0; n]).unwrap();
        let mut draw = || {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            dist(&raw.iter().map(|v| v / s).collect::<Vec<_>>())
        };
        let p = draw();
        let q = draw();
        (euclidean_cost(&ds).unwrap(), p, q)
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(0.05).is_ok());
        assert!(GridSpec::new(0.01).is_ok());
        assert!(GridSpec::new(0.3).is_err());
        assert!(GridSpec::new(0.0).is_err());
        assert_eq!(GridSpec::new(0.05).unwrap().steps(), 20);
    }

    #[test]
    fn basis_counts_match_spanning_trees() {
        // K_{n,n} has n^(2(n-1)) spanning trees, one per basis.
        assert_eq!(bases(2).len(), 4);
        assert_eq!(bases(3).len(), 81);
        assert_eq!(bases(4).len(), 4096);
    }

    #[test]
    fn wasserstein_identity_closed_form_and_symmetry() {
        let c = unit_pair();
        let p = dist(&[1.0, 0.0]);
        assert_eq!(wasserstein_exact_small(&p, &p, &c).unwrap(), 0.0);
        let q = dist(&[0.75, 0.25]);
        assert_abs_diff_eq!(wasserstein_exact_small(&p, &q, &c).unwrap(), 0.25, epsilon = 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            for _ in 0..10 {
                let (c, p, q) = random_instance(&mut rng, n);
                let pq = wasserstein_exact_small(&p, &q, &c).unwrap();
                let qp = wasserstein_exact_small(&q, &p, &c).unwrap();
                assert_abs_diff_eq!(pq, qp, epsilon = 1e-12);
                assert_abs_diff_eq!(wasserstein_exact_small(&p, &p, &c).unwrap(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wasserstein_matches_transport_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..15 {
                let (c, p, q) = random_instance(&mut rng, n);
                let exact = wasserstein_exact_small(&p, &q, &c).unwrap();
                let (lp, plan) = optimal_transport(&p, &q, &c).unwrap();
                let realized = crate::lfd::transport_cost(&plan, &c).unwrap();
                assert_abs_diff_eq!(exact, realized, epsilon = 1e-9);
                assert_abs_diff_eq!(exact, lp, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn wasserstein_rejects_large_support() {
        let ds = Dataset::from_parts((0..5).map(|i| vec![i as f64]).collect(), vec![0; 5]).unwrap();
        let c = euclidean_cost(&ds).unwrap();
        let p = EmpiricalDistribution::point_mass(5, 0);
        assert!(matches!(wasserstein_exact_small(&p, &p, &c), Err(Error::TooLarge(_))));
    }

    #[test]
    fn brute_force_examples() {
        let c = unit_pair();
        let emp = [dist(&[1.0, 0.0]), dist(&[0.0, 1.0])];
        let grid = GridSpec::new(0.01).unwrap();

        let zero = brute_force_lfd(&c, &emp, &RadiusVector::uniform(2, 0.0).unwrap(), &grid).unwrap();
        assert_eq!(zero.objective, 2.0);

        let showcase = brute_force_lfd(&c, &emp, &RadiusVector::uniform(2, 0.25).unwrap(), &grid).unwrap();
        assert!((showcase.objective - 1.5).abs() <= 0.04);

        let saturated = brute_force_lfd(&c, &emp, &RadiusVector::uniform(2, 1.0).unwrap(), &grid).unwrap();
        assert!((saturated.objective - 1.0).abs() <= grid.error_bound(2, 2));
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let ds = Dataset::from_parts((0..5).map(|i| vec![i as f64]).collect(), vec![0, 0, 1, 1, 1]).unwrap();
        let c = euclidean_cost(&ds).unwrap();
        let emp = crate::domain::empirical_distributions(&ds).unwrap();
        let r = RadiusVector::uniform(2, 0.1).unwrap();
        assert!(matches!(
            brute_force_lfd(&c, &emp, &r, &GridSpec::new(0.05).unwrap()),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn enumeration_examples() {
        let disjoint = [dist(&[0.5, 0.5, 0.0]), dist(&[0.0, 0.0, 1.0])];
        assert_eq!(exhaustive_classifier_risk(&disjoint, true).unwrap(), 0.0);
        let same = [dist(&[0.25, 0.75]), dist(&[0.25, 0.75])];
        assert_abs_diff_eq!(exhaustive_classifier_risk(&same, true).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(exhaustive_classifier_risk(&same, false).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn enumeration_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(1..=6);
            let m = rng.random_range(2..=3);
            let dists: Vec<_> = (0..m)
                .map(|_| {
                    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                    let s: f64 = raw.iter().sum();
                    dist(&raw.iter().map(|v| v / s).collect::<Vec<_>>())
                })
                .collect();
            let (closed, _) = minimal_risk(&dists).unwrap();
            assert_abs_diff_eq!(
                exhaustive_classifier_risk(&dists, true).unwrap(),
                closed,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                exhaustive_classifier_risk(&dists, false).unwrap(),
                closed,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn suite_masses_are_grid_multiples() {
        for inst in tiny_suite(1) {
            for d in crate::domain::empirical_distributions(&inst.dataset).unwrap() {
                for &v in d.mass() {
                    assert!((v * 20.0 - (v * 20.0).round()).abs() < 1e-12);
                }
            }
        }
    }
}
