//! Query-time decision rules.
//!
//! Every rule produces a [`VoteVector`]; [`classify`] turns votes into a class
//! with ties going to the lowest class index. Neighbor ties are broken by
//! ascending training index.

use serde::{Deserialize, Serialize};

use crate::domain::{argmax_set, euclidean_distance, Dataset, EmpiricalDistribution};
use crate::error::{Error, Result};

/// Per-class votes for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoteVector(Vec<f64>);

impl VoteVector {
    pub fn new(votes: Vec<f64>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::Shape("empty vote vector".into()));
        }
        if let Some(v) = votes.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::param("votes", format!("{v} is not a finite nonnegative vote")));
        }
        Ok(Self(votes))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// The class with the most votes, lowest index on ties.
pub fn classify(votes: &VoteVector) -> usize {
    argmax_set(votes.as_slice())[0]
}

/// How training samples weigh into the k-NN vote.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    /// w_m(ξ, ξ^i) = P*_m(ξ^i): one probability row per class over the
    /// training samples.
    Lfd(Vec<EmpiricalDistribution>),
    /// w_m(ξ, ξ^i) = 1{y^i = m}.
    Vanilla,
    /// w_m(ξ, ξ^i) = 1{y^i = m} / c(ξ, ξ^i).
    InverseDistance,
}

impl WeightScheme {
    pub fn votes(&self, query: &[f64], train: &Dataset, k: usize) -> Result<VoteVector> {
        match self {
            WeightScheme::Lfd(weights) => drknn_votes(query, train, weights, k),
            WeightScheme::Vanilla => vanilla_knn_votes(query, train, k),
            WeightScheme::InverseDistance => inverse_distance_votes(query, train, k),
        }
    }
}

/// Training indices sorted by nondecreasing `cost_fn(query, ξ^i)`, ties by index.
pub fn neighbor_order<F>(query: &[f64], train: &Dataset, cost_fn: F) -> Result<Vec<usize>>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    train.check_query(query)?;
    let dist: Vec<f64> = (0..train.len()).map(|i| cost_fn(query, train.features(i))).collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    // Stable sort keeps ascending index within equal distances.
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    Ok(order)
}

fn euclidean_order(query: &[f64], train: &Dataset) -> Result<Vec<usize>> {
    neighbor_order(query, train, euclidean_distance)
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 || k > available {
        return Err(Error::param("k", format!("{k} is outside 1..={available}")));
    }
    Ok(())
}

fn check_weights(weights: &[EmpiricalDistribution], n: usize) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Shape("no class weights".into()));
    }
    if let Some(m) = weights.iter().position(|w| w.len() != n) {
        return Err(Error::Shape(format!(
            "weights for class {m} cover {} samples, training set has {n}",
            weights[m].len()
        )));
    }
    Ok(())
}

fn average_columns(weights: &[EmpiricalDistribution], neighbors: &[usize]) -> Result<VoteVector> {
    let k = neighbors.len() as f64;
    VoteVector::new(
        weights
            .iter()
            .map(|w| neighbors.iter().map(|&i| w[i]).sum::<f64>() / k)
            .collect(),
    )
}

/// Dr.k-NN votes: the average LFD mass of the k nearest training samples.
pub fn drknn_votes(
    query: &[f64],
    train: &Dataset,
    lfd_weights: &[EmpiricalDistribution],
    k: usize,
) -> Result<VoteVector> {
    check_weights(lfd_weights, train.len())?;
    check_k(k, train.len())?;
    let order = euclidean_order(query, train)?;
    average_columns(lfd_weights, &order[..k])
}

/// Majority votes of the k nearest labels, normalized by k.
pub fn vanilla_knn_votes(query: &[f64], train: &Dataset, k: usize) -> Result<VoteVector> {
    check_k(k, train.len())?;
    let order = euclidean_order(query, train)?;
    let mut votes = vec![0.0; train.class_count()];
    for &i in &order[..k] {
        votes[train.label(i)] += 1.0;
    }
    votes.iter_mut().for_each(|v| *v /= k as f64);
    VoteVector::new(votes)
}

/// Distance-weighted votes Σ 1{y = m} / c(query, ξ).
///
/// A neighbor at distance zero wins outright: the result is one-hot on its
/// label (the lowest-index such neighbor if there are several).
pub fn inverse_distance_votes(query: &[f64], train: &Dataset, k: usize) -> Result<VoteVector> {
    check_k(k, train.len())?;
    let order = euclidean_order(query, train)?;
    let mut votes = vec![0.0; train.class_count()];
    for &i in &order[..k] {
        let d = euclidean_distance(query, train.features(i));
        if d == 0.0 {
            let mut one_hot = vec![0.0; train.class_count()];
            one_hot[train.label(i)] = 1.0;
            return VoteVector::new(one_hot);
        }
        votes[train.label(i)] += 1.0 / d;
    }
    VoteVector::new(votes)
}

fn check_bandwidth(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param("bandwidth", format!("{h} is not a positive bandwidth")));
    }
    Ok(())
}

/// Gaussian-kernel smoothing of the LFD weights,
/// Σ_i P*_m(ξ^i) κ_h(query − ξ^i) with κ_h(x) = (2πh)^{−d/2} exp(−‖x‖²/(2h)).
///
/// Small bandwidths underflow to all-zero votes; use [`kernel_votes_stable`]
/// for decisions.
pub fn kernel_votes(
    query: &[f64],
    train: &Dataset,
    lfd_weights: &[EmpiricalDistribution],
    h: f64,
) -> Result<VoteVector> {
    check_bandwidth(h)?;
    check_weights(lfd_weights, train.len())?;
    train.check_query(query)?;
    let norm = (2.0 * std::f64::consts::PI * h).powf(-(train.dim() as f64) / 2.0);
    let kernel: Vec<f64> = (0..train.len())
        .map(|i| {
            let sq = euclidean_distance(query, train.features(i)).powi(2);
            norm * (-sq / (2.0 * h)).exp()
        })
        .collect();
    VoteVector::new(
        lfd_weights
            .iter()
            .map(|w| w.mass().iter().zip(&kernel).map(|(p, k)| p * k).sum())
            .collect(),
    )
}

/// [`kernel_votes`] without the normalization constant and rescaled by
/// exp(d_min²/(2h)), d_min the distance to the nearest training sample. Both
/// factors are positive and shared by all classes, so the argmax is unchanged
/// while the nearest sample always contributes with kernel weight 1.
pub fn kernel_votes_stable(
    query: &[f64],
    train: &Dataset,
    lfd_weights: &[EmpiricalDistribution],
    h: f64,
) -> Result<VoteVector> {
    check_bandwidth(h)?;
    check_weights(lfd_weights, train.len())?;
    train.check_query(query)?;
    let sq: Vec<f64> = (0..train.len())
        .map(|i| euclidean_distance(query, train.features(i)).powi(2))
        .collect();
    let nearest = sq.iter().copied().fold(f64::INFINITY, f64::min);
    let kernel: Vec<f64> = sq.iter().map(|s| (-(s - nearest) / (2.0 * h)).exp()).collect();
    VoteVector::new(
        lfd_weights
            .iter()
            .map(|w| w.mass().iter().zip(&kernel).map(|(p, k)| p * k).sum())
            .collect(),
    )
}

/// Entropy (nats) of training sample `i`'s normalized weight column; zero for
/// an all-zero column.
pub fn sample_entropy(lfd_weights: &[EmpiricalDistribution], i: usize) -> f64 {
    let column: Vec<f64> = lfd_weights.iter().map(|w| w[i]).collect();
    let total: f64 = column.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -column
        .iter()
        .map(|&p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Training samples whose min-max normalized entropy reaches `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSet {
    pub kept_indices: Vec<usize>,
    pub tau: f64,
    pub normalized_entropy: Vec<f64>,
}

impl TruncatedSet {
    pub fn len(&self) -> usize {
        self.kept_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept_indices.is_empty()
    }

    pub fn kept_fraction(&self) -> f64 {
        self.kept_indices.len() as f64 / self.normalized_entropy.len() as f64
    }
}

/// Keeps `{i : (H(ξ^i) − H_min)/(H_max − H_min) ≥ tau}`. When all entropies
/// coincide every normalized entropy is 1 and all samples are kept.
pub fn truncate(lfd_weights: &[EmpiricalDistribution], tau: f64) -> Result<TruncatedSet> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::param("tau", format!("{tau} is outside [0, 1]")));
    }
    let n = lfd_weights.first().map_or(0, |w| w.len());
    check_weights(lfd_weights, n)?;
    let entropy: Vec<f64> = (0..n).map(|i| sample_entropy(lfd_weights, i)).collect();
    let lo = entropy.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = entropy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let normalized_entropy: Vec<f64> = if hi > lo {
        entropy.iter().map(|h| (h - lo) / (hi - lo)).collect()
    } else {
        vec![1.0; n]
    };
    let kept_indices = normalized_entropy
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= tau)
        .map(|(i, _)| i)
        .collect();
    Ok(TruncatedSet {
        kept_indices,
        tau,
        normalized_entropy,
    })
}

/// Dr.k-NN restricted to the kept training samples.
pub fn truncated_drknn_votes(
    query: &[f64],
    train: &Dataset,
    lfd_weights: &[EmpiricalDistribution],
    k: usize,
    truncated: &TruncatedSet,
) -> Result<VoteVector> {
    check_weights(lfd_weights, train.len())?;
    if truncated.normalized_entropy.len() != train.len() {
        return Err(Error::Shape(format!(
            "truncation covers {} samples, training set has {}",
            truncated.normalized_entropy.len(),
            train.len()
        )));
    }
    check_k(k, truncated.len())?;
    let mut kept = vec![false; train.len()];
    for &i in &truncated.kept_indices {
        kept[i] = true;
    }
    let neighbors: Vec<usize> = euclidean_order(query, train)?
        .into_iter()
        .filter(|&i| kept[i])
        .take(k)
        .collect();
    average_columns(lfd_weights, &neighbors)
}
