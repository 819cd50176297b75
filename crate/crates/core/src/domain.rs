//! Samples, ground costs, empirical distributions and the risk functionals.
//!
//! Class labels are 0-based indices `0..class_count` throughout the library.
//! Text formats and reports shift them to 1-based at the boundary.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on simplex sums.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Relative gap below which two class masses are treated as a tie.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: usize) -> Self {
        Self { features, label }
    }
}

/// An ordered collection of labeled samples sharing one feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    class_count: usize,
    dim: usize,
}

impl Dataset {
    /// Validates dimensions, finiteness and label range.
    pub fn new(samples: Vec<LabeledSample>, class_count: usize) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyDataset)?;
        let dim = first.features.len();
        for (index, s) in samples.iter().enumerate() {
            if s.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: s.features.len(),
                });
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { index });
            }
            if s.label >= class_count {
                return Err(Error::LabelOutOfRange {
                    index,
                    label: s.label,
                    class_count,
                });
            }
        }
        Ok(Self {
            samples,
            class_count,
            dim,
        })
    }

    /// Builds a dataset from parallel feature rows and labels, inferring the
    /// class count as `max(label) + 1`.
    pub fn from_parts(features: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let class_count = labels.iter().max().map_or(0, |m| m + 1);
        let samples = features
            .into_iter()
            .zip(labels)
            .map(|(f, l)| LabeledSample::new(f, l))
            .collect();
        Self::new(samples, class_count)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.samples[i].features
    }

    pub fn label(&self, i: usize) -> usize {
        self.samples[i].label
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.samples.iter().map(|s| s.label)
    }

    /// Indices of the samples carrying `class`, in dataset order.
    pub fn class_members(&self, class: usize) -> Vec<usize> {
        self.labels()
            .enumerate()
            .filter(|&(_, l)| l == class)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for l in self.labels() {
            sizes[l] += 1;
        }
        sizes
    }

    /// Samples at `indices`, in the given order, keeping the class count.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        Self::new(samples, self.class_count)
    }

    /// Fails with [`Error::EmptyClass`] naming the first class without samples.
    pub fn require_all_classes(&self) -> Result<()> {
        match self.class_sizes().iter().position(|&s| s == 0) {
            Some(class) => Err(Error::EmptyClass { class }),
            None => Ok(()),
        }
    }

    /// Checks that a query vector has this dataset's dimension.
    pub fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.dim,
                found: query.len(),
            });
        }
        Ok(())
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise ground costs on the empirical support.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: DMatrix<f64>,
}

impl CostMatrix {
    /// Accepts a square, nonnegative, symmetric matrix with zero diagonal.
    /// The triangle inequality is not required; see [`CostMatrix::is_metric`].
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::Shape(format!(
                "cost matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if entries[(i, i)] != 0.0 {
                return Err(Error::Shape(format!("cost diagonal entry {i} is nonzero")));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Shape(format!("cost entry ({i},{j}) = {v}")));
                }
                if v != entries[(j, i)] {
                    return Err(Error::Shape(format!("cost entry ({i},{j}) not symmetric")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("cost rows must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn max(&self) -> f64 {
        self.entries.max()
    }

    /// True if every triple satisfies the triangle inequality (up to 1e-12).
    pub fn is_metric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.get(i, j) <= self.get(i, k) + self.get(k, j) + 1e-12)))
    }
}

/// ℓ2 distances between every pair of samples.
pub fn euclidean_cost(dataset: &Dataset) -> Result<CostMatrix> {
    let n = dataset.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean_distance(dataset.features(i), dataset.features(j));
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    CostMatrix::new(m)
}

/// Probability mass over the n support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmpiricalDistribution {
    mass: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Rejects negative or non-finite entries and sums farther than
    /// [`SIMPLEX_TOL`] from one. Accepted vectors are renormalized.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty mass vector".into()));
        }
        if let Some(i) = mass.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} = {} is not a nonnegative number",
                mass[i]
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        let mass = if total == 1.0 {
            mass
        } else {
            mass.into_iter().map(|v| v / total).collect()
        };
        Ok(Self { mass })
    }

    pub fn point_mass(n: usize, i: usize) -> Self {
        let mut mass = vec![0.0; n];
        mass[i] = 1.0;
        Self { mass }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(i, _)| i)
    }
}

impl std::ops::Index<usize> for EmpiricalDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.mass[i]
    }
}

/// Per-class empirical distributions: class m puts mass 1/n_m on each of its
/// samples.
pub fn empirical_distributions(dataset: &Dataset) -> Result<Vec<EmpiricalDistribution>> {
    let n = dataset.len();
    (0..dataset.class_count())
        .map(|class| {
            let members = dataset.class_members(class);
            if members.is_empty() {
                return Err(Error::EmptyClass { class });
            }
            let w = 1.0 / members.len() as f64;
            let mut mass = vec![0.0; n];
            for i in members {
                mass[i] = w;
            }
            Ok(EmpiricalDistribution { mass })
        })
        .collect()
}

/// How mass is split over a set of tied argmax classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    LowestIndex,
    Uniform,
}

/// A randomized classifier on the support: row i is a distribution over classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierAssignment {
    probs: DMatrix<f64>,
}

impl ClassifierAssignment {
    pub fn new(probs: DMatrix<f64>) -> Result<Self> {
        if probs.nrows() == 0 || probs.ncols() == 0 {
            return Err(Error::Shape("classifier assignment is empty".into()));
        }
        for (i, row) in probs.row_iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidDistribution(format!("row {i} has a negative entry")));
            }
            let total: f64 = row.sum();
            if (total - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidDistribution(format!("row {i} sums to {total}")));
            }
        }
        Ok(Self { probs })
    }

    /// Deterministic assignment from per-point decisions.
    pub fn from_decisions(decisions: &[usize], class_count: usize) -> Result<Self> {
        let mut probs = DMatrix::zeros(decisions.len(), class_count);
        for (i, &c) in decisions.iter().enumerate() {
            if c >= class_count {
                return Err(Error::LabelOutOfRange {
                    index: i,
                    label: c,
                    class_count,
                });
            }
            probs[(i, c)] = 1.0;
        }
        Self::new(probs)
    }

    /// The constant classifier π_m ≡ 1/M.
    pub fn uniform(n: usize, class_count: usize) -> Self {
        Self {
            probs: DMatrix::from_element(n, class_count, 1.0 / class_count as f64),
        }
    }

    /// Puts each point's mass on the argmax of `dists[·][i]`.
    pub fn argmax_of(dists: &[EmpiricalDistribution], tie: TieRule) -> Result<Self> {
        let n = check_dists(dists)?;
        let m = dists.len();
        let mut probs = DMatrix::zeros(n, m);
        for i in 0..n {
            let column: Vec<f64> = dists.iter().map(|d| d[i]).collect();
            let ties = argmax_set(&column);
            match tie {
                TieRule::LowestIndex => probs[(i, ties[0])] = 1.0,
                TieRule::Uniform => {
                    let w = 1.0 / ties.len() as f64;
                    for &c in &ties {
                        probs[(i, c)] = w;
                    }
                }
            }
        }
        Ok(Self { probs })
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if self.probs.shape() != other.probs.shape() {
            return Err(Error::Shape("assignments differ in shape".into()));
        }
        Self::new(&self.probs * alpha + &other.probs * (1.0 - alpha))
    }

    pub fn n(&self) -> usize {
        self.probs.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.probs.ncols()
    }

    pub fn get(&self, i: usize, class: usize) -> f64 {
        self.probs[(i, class)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.probs
    }

    /// Lowest-index most probable class per point.
    pub fn decisions(&self) -> Vec<usize> {
        self.probs
            .row_iter()
            .map(|row| argmax_set(&row.iter().copied().collect::<Vec<_>>())[0])
            .collect()
    }
}

/// All indices within a relative [`TIE_TOL`] of the maximum, ascending.
pub fn argmax_set(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = best - TIE_TOL * best.abs();
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= floor)
        .map(|(i, _)| i)
        .collect()
}

fn check_dists(dists: &[EmpiricalDistribution]) -> Result<usize> {
    let first = dists
        .first()
        .ok_or_else(|| Error::Shape("no distributions given".into()))?;
    let n = first.len();
    if let Some(m) = dists.iter().position(|d| d.len() != n) {
        return Err(Error::Shape(format!(
            "distribution {m} has {} points, expected {n}",
            dists[m].len()
        )));
    }
    Ok(n)
}

/// Total error probability Σ_m Σ_i P_m(ξ^i)·(1 − π_m(ξ^i)).
pub fn risk(pi: &ClassifierAssignment, dists: &[EmpiricalDistribution]) -> Result<f64> {
    let n = check_dists(dists)?;
    if pi.n() != n || pi.class_count() != dists.len() {
        return Err(Error::Shape(format!(
            "classifier is {}x{}, distributions are {}x{}",
            pi.n(),
            pi.class_count(),
            dists.len(),
            n
        )));
    }
    Ok(dists
        .iter()
        .enumerate()
        .map(|(m, d)| {
            d.mass()
                .iter()
                .enumerate()
                .map(|(i, p)| p * (1.0 - pi.get(i, m)))
                .sum::<f64>()
        })
        .sum())
}

/// Σ_i max_m P_m(ξ^i), the quantity the least-favorable program minimizes.
pub fn max_mass_sum(dists: &[EmpiricalDistribution]) -> Result<f64> {
    let n = check_dists(dists)?;
    Ok((0..n)
        .map(|i| dists.iter().map(|d| d[i]).fold(f64::NEG_INFINITY, f64::max))
        .sum())
}

/// Closed-form Bayes risk M − Σ_i max_m P_m(ξ^i) and a classifier attaining
/// it (uniform over tied argmax classes).
pub fn minimal_risk(dists: &[EmpiricalDistribution]) -> Result<(f64, ClassifierAssignment)> {
    let value = dists.len() as f64 - max_mass_sum(dists)?;
    let pi = ClassifierAssignment::argmax_of(dists, TieRule::Uniform)?;
    Ok((value, pi))
}

/// Σ_i Σ_m (max_m' P_m'(ξ^i) − P_m(ξ^i)).
pub fn total_margin(dists: &[EmpiricalDistribution]) -> Result<f64> {
    let n = check_dists(dists)?;
    Ok((0..n)
        .map(|i| {
            let top = dists.iter().map(|d| d[i]).fold(f64::NEG_INFINITY, f64::max);
            dists.iter().map(|d| top - d[i]).sum::<f64>()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    fn ds(points: &[(&[f64], usize)]) -> Dataset {
        Dataset::from_parts(
            points.iter().map(|(f, _)| f.to_vec()).collect(),
            points.iter().map(|(_, l)| *l).collect(),
        )
        .unwrap()
    }

    #[test]
    fn pythagorean_pair() {
        let d = ds(&[(&[0.0, 0.0], 0), (&[3.0, 4.0], 1)]);
        let c = euclidean_cost(&d).unwrap();
        assert_eq!(c.get(0, 1), 5.0);
        assert_eq!(c.get(1, 0), 5.0);
        assert_eq!(c.get(0, 0), 0.0);
        assert_eq!(c.get(1, 1), 0.0);
    }

    #[test]
    fn three_points_match_hand_formula() {
        let pts = [[0.3, -1.2], [2.5, 0.7], [-0.4, 0.1]];
        let d = ds(&[(&pts[0], 0), (&pts[1], 0), (&pts[2], 1)]);
        let c = euclidean_cost(&d).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                assert_abs_diff_eq!(c.get(i, j), (dx * dx + dy * dy).sqrt(), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch_names_sample() {
        let err = Dataset::from_parts(vec![vec![0.0, 1.0], vec![1.0, 2.0], vec![3.0]], vec![0, 1, 0]).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                index: 2,
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn rejects_non_finite_features() {
        let err = Dataset::from_parts(vec![vec![f64::NAN]], vec![0]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteFeature { index: 0 }));
    }

    #[test]
    fn empirical_uniform_over_members() {
        let d = ds(&[(&[0.0], 0), (&[1.0], 0), (&[2.0], 1), (&[3.0], 1)]);
        let e = empirical_distributions(&d).unwrap();
        assert_eq!(e[0].mass(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(e[1].mass(), &[0.0, 0.0, 0.5, 0.5]);

        let single = ds(&[(&[0.0], 0)]);
        assert_eq!(empirical_distributions(&single).unwrap()[0].mass(), &[1.0]);

        let d = ds(&[(&[0.0], 0), (&[1.0], 1), (&[2.0], 1), (&[3.0], 1)]);
        let e = empirical_distributions(&d).unwrap();
        for &p in &e[1].mass()[1..4] {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn empty_class_is_named() {
        let d = Dataset::new(
            vec![LabeledSample::new(vec![0.0], 0), LabeledSample::new(vec![1.0], 2)],
            3,
        )
        .unwrap();
        assert!(matches!(
            empirical_distributions(&d),
            Err(Error::EmptyClass { class: 1 })
        ));
    }

    #[test]
    fn distribution_tolerance() {
        assert!(EmpiricalDistribution::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(EmpiricalDistribution::new(vec![0.5, 0.51]).is_err());
        assert!(EmpiricalDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn cost_matrix_validation() {
        assert!(CostMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        let c = CostMatrix::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        assert!(!c.is_metric());
    }

    #[test]
    fn risk_zero_for_perfect_classifier() {
        let dists = [dist(&[0.5, 0.5, 0.0]), dist(&[0.0, 0.0, 1.0])];
        let pi = ClassifierAssignment::from_decisions(&[0, 0, 1], 2).unwrap();
        assert_eq!(risk(&pi, &dists).unwrap(), 0.0);
    }

    #[test]
    fn uniform_classifier_risk_is_m_minus_one() {
        let dists = [dist(&[0.2, 0.3, 0.5]), dist(&[0.0, 1.0, 0.0]), dist(&[0.6, 0.2, 0.2])];
        let pi = ClassifierAssignment::uniform(3, 3);
        assert_abs_diff_eq!(risk(&pi, &dists).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn two_point_lfd_risk() {
        let lfds = [dist(&[0.75, 0.25]), dist(&[0.25, 0.75])];
        let pi = ClassifierAssignment::from_decisions(&[0, 1], 2).unwrap();
        assert_abs_diff_eq!(risk(&pi, &lfds).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn risk_shape_mismatch() {
        let dists = [dist(&[1.0, 0.0]), dist(&[0.0, 1.0])];
        let pi = ClassifierAssignment::uniform(3, 2);
        assert!(matches!(risk(&pi, &dists), Err(Error::Shape(_))));
    }

    #[test]
    fn minimal_risk_examples() {
        let (v, pi) = minimal_risk(&[dist(&[1.0, 0.0]), dist(&[0.0, 1.0])]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(pi.decisions(), vec![0, 1]);
        assert_eq!(pi.matrix(), &DMatrix::identity(2, 2));

        let (v, pi) = minimal_risk(&[dist(&[0.5, 0.5]), dist(&[0.5, 0.5])]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(pi.get(0, 0), 0.5);
        assert_eq!(pi.decisions(), vec![0, 0]);

        let (v, _) = minimal_risk(&[dist(&[0.75, 0.25]), dist(&[0.25, 0.75])]).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
    }

    fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-3;
            let mut out: Vec<f64> = v.iter().map(|x| (x + 1e-3 / v.len() as f64) / s).collect();
            let t: f64 = out.iter().sum();
            out.iter_mut().for_each(|x| *x /= t);
            out
        })
    }

    type Instance = (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

    fn instance() -> impl Strategy<Value = Instance> {
        (2usize..6, 2usize..4).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(simplex(n), m),
                prop::collection::vec(simplex(m), n),
                prop::collection::vec(simplex(m), n),
            )
        })
    }

    fn assignment(rows: &[Vec<f64>]) -> ClassifierAssignment {
        let n = rows.len();
        let m = rows[0].len();
        ClassifierAssignment::new(DMatrix::from_fn(n, m, |i, j| rows[i][j])).unwrap()
    }

    proptest! {
        #[test]
        fn minimal_risk_lower_bounds_every_classifier((d, p, _) in instance()) {
            let dists: Vec<_> = d.iter().map(|v| dist(v)).collect();
            let (best, pi_star) = minimal_risk(&dists).unwrap();
            let pi = assignment(&p);
            prop_assert!(best <= risk(&pi, &dists).unwrap() + 1e-12);
            prop_assert!((risk(&pi_star, &dists).unwrap() - best).abs() < 1e-12);
            prop_assert!(best >= -1e-12 && best <= dists.len() as f64 - 1.0 + 1e-12);
        }

        #[test]
        fn minimal_risk_matches_direct_formula((d, _, _) in instance()) {
            let dists: Vec<_> = d.iter().map(|v| dist(v)).collect();
            let m = d.len() as f64;
            let n = d[0].len();
            let mut direct = m;
            for i in 0..n {
                let mut top = 0.0f64;
                for row in &d {
                    top = top.max(row[i]);
                }
                direct -= top;
            }
            prop_assert!((minimal_risk(&dists).unwrap().0 - direct).abs() < 1e-12);
        }

        #[test]
        fn risk_is_affine((d, p, q) in instance(), alpha in 0.0f64..1.0) {
            let dists: Vec<_> = d.iter().map(|v| dist(v)).collect();
            let a = assignment(&p);
            let b = assignment(&q);
            let mixed = risk(&a.mix(&b, alpha).unwrap(), &dists).unwrap();
            let combo = alpha * risk(&a, &dists).unwrap() + (1.0 - alpha) * risk(&b, &dists).unwrap();
            prop_assert!((mixed - combo).abs() < 1e-12);
        }

        #[test]
        fn total_margin_identity((d, _, _) in instance()) {
            let dists: Vec<_> = d.iter().map(|v| dist(v)).collect();
            let m = d.len() as f64;
            let lhs = total_margin(&dists).unwrap();
            let rhs = m * max_mass_sum(&dists).unwrap() - m;
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
