//! Few-shot episodes, accuracy, radius cross-validation and paired sweeps.
//!
//! An episode draws M classes from a source dataset, K training samples per
//! class and a disjoint set of queries. Randomness comes from ChaCha8 streams:
//! episode `t` of a run with root seed `s` uses `ChaCha8Rng::seed_from_u64(s)`
//! with stream `t`, so episodes are reproducible across platforms and
//! independent of how many worker threads evaluate them.

use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{
    classify, drknn_votes, inverse_distance_votes, kernel_votes_stable, truncate, truncated_drknn_votes,
    vanilla_knn_votes, TruncatedSet,
};
use crate::domain::{empirical_distributions, euclidean_cost, Dataset, EmpiricalDistribution, LabeledSample};
use crate::embedding::{fit_pca, fit_svd, transform, EmbeddingKind, LinearEmbedding, Standardizer};
use crate::error::{Error, Result};
use crate::lfd::{solve_lfd, RadiusVector, SolverStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub class_count: usize,
    pub shots: usize,
    /// Total queries, split as evenly as possible across the M classes.
    pub query_count: usize,
    pub seed: u64,
}

impl EpisodeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.class_count < 2 {
            return Err(Error::param("classes", "need at least 2 classes"));
        }
        if self.shots == 0 {
            return Err(Error::param("shots", "need at least 1 sample per class"));
        }
        if self.query_count == 0 {
            return Err(Error::param("queries", "need at least 1 query"));
        }
        Ok(())
    }

    fn queries_for(&self, slot: usize) -> usize {
        self.query_count / self.class_count + usize::from(slot < self.query_count % self.class_count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub ordinal: u64,
    pub train: Dataset,
    pub queries: Dataset,
    /// Source class of each episode label.
    pub classes: Vec<usize>,
    pub train_indices: Vec<usize>,
    pub query_indices: Vec<usize>,
    /// Seed for any randomness the classifier itself needs.
    pub classifier_seed: u64,
}

pub fn episode_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

pub fn sample_episode(source: &Dataset, spec: &EpisodeSpec) -> Result<Episode> {
    sample_episode_at(source, spec, 0)
}

/// Episode `ordinal` of the run rooted at `spec.seed`.
pub fn sample_episode_at(source: &Dataset, spec: &EpisodeSpec, ordinal: u64) -> Result<Episode> {
    spec.validate()?;
    let available: Vec<usize> = (0..source.class_count())
        .filter(|&c| !source.class_members(c).is_empty())
        .collect();
    if available.len() < spec.class_count {
        return Err(Error::param(
            "classes",
            format!(
                "source has {} populated classes, episode needs {}",
                available.len(),
                spec.class_count
            ),
        ));
    }

    let mut rng = episode_rng(spec.seed, ordinal);
    let classes: Vec<usize> = available.choose_multiple(&mut rng, spec.class_count).copied().collect();

    let (mut train, mut queries) = (Vec::new(), Vec::new());
    let (mut train_indices, mut query_indices) = (Vec::new(), Vec::new());
    for (slot, &class) in classes.iter().enumerate() {
        let mut members = source.class_members(class);
        let required = spec.shots + spec.queries_for(slot);
        if members.len() < required {
            return Err(Error::InsufficientSamples {
                class,
                available: members.len(),
                required,
            });
        }
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().take(required).enumerate() {
            let sample = LabeledSample::new(source.features(i).to_vec(), slot);
            if j < spec.shots {
                train.push(sample);
                train_indices.push(i);
            } else {
                queries.push(sample);
                query_indices.push(i);
            }
        }
    }
    let classifier_seed = rng.next_u64();
    Ok(Episode {
        ordinal,
        train: Dataset::new(train, spec.class_count)?,
        queries: Dataset::new(queries, spec.class_count)?,
        classes,
        train_indices,
        query_indices,
        classifier_seed,
    })
}

/// Uncertainty radii for LFD-based classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusChoice {
    /// One radius for every class, or one per class.
    Fixed(Vec<f64>),
    /// Stratified k-fold selection over a grid of radius vectors (each a
    /// scalar or per-class).
    CrossValidated { grid: Vec<Vec<f64>>, folds: usize },
}

impl RadiusChoice {
    pub fn fixed(radius: f64) -> Self {
        RadiusChoice::Fixed(vec![radius])
    }

    /// Scalar grid {0, 0.1, …, 1.0} with 5 folds.
    pub fn default_cv() -> Self {
        RadiusChoice::CrossValidated {
            grid: (0..=10).map(|i| vec![i as f64 / 10.0]).collect(),
            folds: 5,
        }
    }
}

fn radius_vector(radii: &[f64], class_count: usize) -> Result<RadiusVector> {
    match radii {
        [r] => RadiusVector::uniform(class_count, *r),
        _ if radii.len() == class_count => RadiusVector::new(radii.to_vec()),
        _ => Err(Error::param(
            "radii",
            format!("{} radii given for {class_count} classes", radii.len()),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ClassifierConfig {
    DrKnn {
        k: usize,
        radius: RadiusChoice,
    },
    Vanilla {
        k: usize,
    },
    InverseDistance {
        k: usize,
    },
    /// Gaussian-kernel smoothing of the LFD weights.
    Kernel {
        bandwidth: f64,
        radius: RadiusChoice,
    },
    /// Dr.k-NN over the samples kept at truncation level `tau`. If fewer than
    /// `k` samples survive, all survivors vote.
    Truncated {
        k: usize,
        tau: f64,
        radius: RadiusChoice,
    },
    UniformRandom,
    /// Always answers `class` (0-based).
    Constant {
        class: usize,
    },
}

impl ClassifierConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ClassifierConfig::DrKnn { .. } => "drknn",
            ClassifierConfig::Vanilla { .. } => "vanilla_knn",
            ClassifierConfig::InverseDistance { .. } => "inverse_distance_knn",
            ClassifierConfig::Kernel { .. } => "kernel_smoothing",
            ClassifierConfig::Truncated { .. } => "truncated_drknn",
            ClassifierConfig::UniformRandom => "uniform_random",
            ClassifierConfig::Constant { .. } => "constant",
        }
    }

    fn radius(&self) -> Option<&RadiusChoice> {
        match self {
            ClassifierConfig::DrKnn { radius, .. }
            | ClassifierConfig::Kernel { radius, .. }
            | ClassifierConfig::Truncated { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

/// Optional feature map fitted on each episode's training set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub kind: Option<EmbeddingKind>,
    pub rank: usize,
    /// z-score features (fitted on the training set) before any projection.
    pub standardize: bool,
}

impl std::str::FromStr for EmbeddingConfig {
    type Err = Error;

    /// `none`, `pca:R` or `svd:R`, optionally followed by `+std`.
    fn from_str(s: &str) -> Result<Self> {
        let (body, standardize) = match s.strip_suffix("+std") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let bad = || {
            Error::param(
                "embedding",
                format!("`{s}` is not none, pca:R or svd:R (optionally +std)"),
            )
        };
        let (kind, rank) = match body.split_once(':') {
            None if body == "none" => (None, 0),
            None => return Err(bad()),
            Some((kind, rank)) => {
                let kind = match kind {
                    "pca" => EmbeddingKind::Pca,
                    "svd" => EmbeddingKind::Svd,
                    _ => return Err(bad()),
                };
                let rank: usize = rank.parse().map_err(|_| bad())?;
                if rank == 0 {
                    return Err(bad());
                }
                (Some(kind), rank)
            }
        };
        Ok(Self {
            kind,
            rank,
            standardize,
        })
    }
}

impl std::fmt::Display for EmbeddingConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            None => write!(f, "none")?,
            Some(EmbeddingKind::Pca) => write!(f, "pca:{}", self.rank)?,
            Some(EmbeddingKind::Svd) => write!(f, "svd:{}", self.rank)?,
        }
        if self.standardize {
            write!(f, "+std")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct FeatureMap {
    standardizer: Option<Standardizer>,
    embedding: Option<LinearEmbedding>,
}

impl FeatureMap {
    fn fit(config: &EmbeddingConfig, train: &Dataset) -> Result<(Self, Dataset)> {
        let standardizer = config.standardize.then(|| Standardizer::fit(train));
        let scaled = match &standardizer {
            Some(s) => s.transform(train)?,
            None => train.clone(),
        };
        let embedding = match config.kind {
            None => None,
            Some(EmbeddingKind::Pca) => Some(fit_pca(&scaled, config.rank)?),
            Some(EmbeddingKind::Svd) => Some(fit_svd(&scaled, config.rank)?),
        };
        let mapped = match &embedding {
            Some(e) => transform(e, &scaled)?,
            None => scaled,
        };
        Ok((
            Self {
                standardizer,
                embedding,
            },
            mapped,
        ))
    }

    fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let scaled = match &self.standardizer {
            Some(s) => s.transform(data)?,
            None => data.clone(),
        };
        match &self.embedding {
            Some(e) => transform(e, &scaled),
            None => Ok(scaled),
        }
    }
}

/// Least favorable distributions of `train` at the given radii, as weights.
pub fn lfd_weights(train: &Dataset, radii: &RadiusVector) -> Result<Vec<EmpiricalDistribution>> {
    let sol = solve_lfd(&euclidean_cost(train)?, &empirical_distributions(train)?, radii)?;
    if sol.status != SolverStatus::Optimal {
        return Err(Error::Solver {
            status: sol.status,
            detail: sol.diagnostics.unwrap_or_default(),
        });
    }
    Ok(sol.lfds)
}

/// Stratified fold assignment: the j-th member (in index order) of every
/// class goes to fold j mod `folds`.
pub fn stratified_folds(train: &Dataset, folds: usize) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::param("folds", "need at least 2 folds"));
    }
    let mut fold_of = vec![0; train.len()];
    for class in 0..train.class_count() {
        let members = train.class_members(class);
        if members.len() < 2 {
            return Err(Error::param(
                "folds",
                format!(
                    "class {class} has {} training samples; every fold must keep all classes",
                    members.len()
                ),
            ));
        }
        for (j, i) in members.into_iter().enumerate() {
            fold_of[i] = j % folds;
        }
    }
    Ok(fold_of)
}

/// The grid element with the best mean held-out Dr.k-NN accuracy. Ties go to
/// the lexicographically smallest radius vector. Within a fold `k` is capped
/// at the fold's training size.
pub fn cross_validate_radius(train: &Dataset, grid: &[RadiusVector], folds: usize, k: usize) -> Result<RadiusVector> {
    if grid.is_empty() {
        return Err(Error::param("radii", "cross-validation grid is empty"));
    }
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    let fold_of = stratified_folds(train, folds)?;
    let splits: Vec<(Dataset, Dataset)> = (0..folds)
        .filter(|f| fold_of.contains(f))
        .map(|f| {
            let (held, kept): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| fold_of[i] == f);
            Ok((train.subset(&kept)?, train.subset(&held)?))
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<&RadiusVector> = grid.iter().collect();
    order.sort_by(|a, b| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut best: Option<(f64, &RadiusVector)> = None;
    for radii in order {
        let mut total = 0.0;
        for (fit, held) in &splits {
            let weights = lfd_weights(fit, radii)?;
            let kk = k.min(fit.len());
            let mut correct = 0;
            for s in held.samples() {
                if classify(&drknn_votes(&s.features, fit, &weights, kk)?) == s.label {
                    correct += 1;
                }
            }
            total += correct as f64 / held.len() as f64;
        }
        let score = total / splits.len() as f64;
        if best.is_none_or(|(b, _)| score > b + 1e-12) {
            best = Some((score, radii));
        }
    }
    Ok(best.expect("grid is non-empty").1.clone())
}

/// A classifier fitted to one training set.
#[derive(Debug, Clone)]
pub struct Fitted {
    config: ClassifierConfig,
    features: FeatureMap,
    train: Dataset,
    weights: Option<Vec<EmpiricalDistribution>>,
    pub radius: Option<RadiusVector>,
    pub truncated: Option<TruncatedSet>,
    rng: ChaCha8Rng,
}

pub fn fit(config: &ClassifierConfig, embedding: &EmbeddingConfig, train: &Dataset, seed: u64) -> Result<Fitted> {
    train.require_all_classes()?;
    let (features, mapped) = FeatureMap::fit(embedding, train)?;
    let m = mapped.class_count();
    let radius = match config.radius() {
        None => None,
        Some(RadiusChoice::Fixed(r)) => Some(radius_vector(r, m)?),
        Some(RadiusChoice::CrossValidated { grid, folds }) => {
            let grid = grid.iter().map(|r| radius_vector(r, m)).collect::<Result<Vec<_>>>()?;
            let k = match config {
                ClassifierConfig::DrKnn { k, .. } | ClassifierConfig::Truncated { k, .. } => *k,
                _ => 1,
            };
            Some(cross_validate_radius(&mapped, &grid, *folds, k)?)
        }
    };
    let weights = radius.as_ref().map(|r| lfd_weights(&mapped, r)).transpose()?;
    let truncated = match (config, &weights) {
        (ClassifierConfig::Truncated { tau, .. }, Some(w)) => Some(truncate(w, *tau)?),
        _ => None,
    };
    match config {
        ClassifierConfig::DrKnn { k, .. }
        | ClassifierConfig::Vanilla { k }
        | ClassifierConfig::InverseDistance { k } => {
            if *k == 0 || *k > mapped.len() {
                return Err(Error::param("k", format!("{k} is outside 1..={}", mapped.len())));
            }
        }
        ClassifierConfig::Truncated { k: 0, .. } => return Err(Error::param("k", "must be at least 1")),
        ClassifierConfig::Constant { class } if *class >= m => {
            return Err(Error::param("class", format!("{class} is outside 0..{m}")));
        }
        _ => {}
    }
    Ok(Fitted {
        config: config.clone(),
        features,
        train: mapped,
        weights,
        radius,
        truncated,
        rng: ChaCha8Rng::seed_from_u64(seed),
    })
}

impl Fitted {
    pub fn class_count(&self) -> usize {
        self.train.class_count()
    }

    pub fn lfd_weights(&self) -> Option<&[EmpiricalDistribution]> {
        self.weights.as_deref()
    }

    /// Predicted class of every sample in `queries` (labels are ignored).
    pub fn predict(&mut self, queries: &Dataset) -> Result<Vec<usize>> {
        let mapped = self.features.apply(queries)?;
        mapped.samples().iter().map(|s| self.predict_one(&s.features)).collect()
    }

    fn predict_one(&mut self, x: &[f64]) -> Result<usize> {
        let train = &self.train;
        let w = || self.weights.as_deref().expect("LFD classifiers carry weights");
        let votes = match &self.config {
            ClassifierConfig::DrKnn { k, .. } => drknn_votes(x, train, w(), *k)?,
            ClassifierConfig::Vanilla { k } => vanilla_knn_votes(x, train, *k)?,
            ClassifierConfig::InverseDistance { k } => inverse_distance_votes(x, train, *k)?,
            ClassifierConfig::Kernel { bandwidth, .. } => kernel_votes_stable(x, train, w(), *bandwidth)?,
            ClassifierConfig::Truncated { k, .. } => {
                let kept = self.truncated.as_ref().expect("truncation computed at fit");
                truncated_drknn_votes(x, train, w(), (*k).min(kept.len()), kept)?
            }
            ClassifierConfig::UniformRandom => {
                train.check_query(x)?;
                return Ok(self.rng.random_range(0..train.class_count()));
            }
            ClassifierConfig::Constant { class } => {
                train.check_query(x)?;
                return Ok(*class);
            }
        };
        Ok(classify(&votes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub accuracy: f64,
    pub radius: Option<Vec<f64>>,
    pub kept: Option<usize>,
    pub seconds: f64,
}

/// Fraction of the episode's queries classified correctly.
pub fn evaluate(config: &ClassifierConfig, embedding: &EmbeddingConfig, episode: &Episode) -> Result<EpisodeResult> {
    let start = Instant::now();
    let mut fitted = fit(config, embedding, &episode.train, episode.classifier_seed)?;
    let predictions = fitted.predict(&episode.queries)?;
    let correct = predictions
        .iter()
        .zip(episode.queries.labels())
        .filter(|(p, y)| **p == *y)
        .count();
    Ok(EpisodeResult {
        accuracy: correct as f64 / predictions.len() as f64,
        radius: fitted.radius.map(|r| r.as_slice().to_vec()),
        kept: fitted.truncated.map(|t| t.len()),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Episode sampling plus the worker-pool size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub episode: EpisodeSpec,
    pub episodes: usize,
    pub embedding: EmbeddingConfig,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub config: ClassifierConfig,
    pub embedding: String,
    pub episodes: usize,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for one episode.
    pub std: f64,
    /// Radii used per episode, for LFD-based classifiers.
    pub radii: Option<Vec<Vec<f64>>>,
    /// Kept-set size per episode, for truncated Dr.k-NN.
    pub kept: Option<Vec<usize>>,
    pub seconds_per_episode: Vec<f64>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

impl EvalReport {
    fn from_results(config: &ClassifierConfig, embedding: &EmbeddingConfig, results: Vec<EpisodeResult>) -> Self {
        let accuracies: Vec<f64> = results.iter().map(|r| r.accuracy).collect();
        let (mean, std) = mean_std(&accuracies);
        let radii = results.iter().map(|r| r.radius.clone()).collect::<Option<Vec<_>>>();
        let kept = results.iter().map(|r| r.kept).collect::<Option<Vec<_>>>();
        Self {
            classifier: config.id().to_string(),
            config: config.clone(),
            embedding: embedding.to_string(),
            episodes: results.len(),
            accuracies,
            mean,
            std,
            radii,
            kept,
            seconds_per_episode: results.iter().map(|r| r.seconds).collect(),
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::param("jobs", e.to_string()))
}

/// Evaluates every classifier on the same episodes; one report per classifier,
/// in input order.
pub fn compare(source: &Dataset, protocol: &Protocol, classifiers: &[ClassifierConfig]) -> Result<Vec<EvalReport>> {
    protocol.episode.validate()?;
    if protocol.episodes == 0 {
        return Err(Error::param("episodes", "need at least 1 episode"));
    }
    if classifiers.is_empty() {
        return Err(Error::param("method", "no classifiers to evaluate"));
    }
    let per_episode: Vec<Vec<EpisodeResult>> = pool(protocol.jobs)?.install(|| {
        (0..protocol.episodes as u64)
            .into_par_iter()
            .map(|t| {
                let episode = sample_episode_at(source, &protocol.episode, t)?;
                classifiers
                    .iter()
                    .map(|c| evaluate(c, &protocol.embedding, &episode))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(classifiers
        .iter()
        .enumerate()
        .map(|(c, config)| {
            let results = per_episode.iter().map(|row| row[c].clone()).collect();
            EvalReport::from_results(config, &protocol.embedding, results)
        })
        .collect())
}

pub fn run(source: &Dataset, protocol: &Protocol, classifier: &ClassifierConfig) -> Result<EvalReport> {
    Ok(compare(source, protocol, std::slice::from_ref(classifier))?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    K,
    Bandwidth,
    Radius,
    Tau,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(SweepParameter::K),
            "bandwidth" => Ok(SweepParameter::Bandwidth),
            "radius" => Ok(SweepParameter::Radius),
            "tau" => Ok(SweepParameter::Tau),
            _ => Err(Error::param(
                "param",
                format!("`{s}` is not one of k, bandwidth, radius, tau"),
            )),
        }
    }
}

/// `base` with `parameter` set to `value`.
pub fn with_parameter(base: &ClassifierConfig, parameter: SweepParameter, value: f64) -> Result<ClassifierConfig> {
    let mut config = base.clone();
    let mismatch = || {
        Error::param(
            "param",
            format!("{parameter:?} does not apply to {}", base.id()).to_lowercase(),
        )
    };
    match (parameter, &mut config) {
        (SweepParameter::K, ClassifierConfig::DrKnn { k, .. })
        | (SweepParameter::K, ClassifierConfig::Vanilla { k })
        | (SweepParameter::K, ClassifierConfig::InverseDistance { k })
        | (SweepParameter::K, ClassifierConfig::Truncated { k, .. }) => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::param("k", format!("{value} is not a positive integer")));
            }
            *k = value as usize;
        }
        (SweepParameter::Bandwidth, ClassifierConfig::Kernel { bandwidth, .. }) => *bandwidth = value,
        (SweepParameter::Tau, ClassifierConfig::Truncated { tau, .. }) => *tau = value,
        (SweepParameter::Radius, ClassifierConfig::DrKnn { radius, .. })
        | (SweepParameter::Radius, ClassifierConfig::Kernel { radius, .. })
        | (SweepParameter::Radius, ClassifierConfig::Truncated { radius, .. }) => *radius = RadiusChoice::fixed(value),
        _ => return Err(mismatch()),
    }
    Ok(config)
}

/// One report per value, all on the same episodes.
pub fn sweep(
    source: &Dataset,
    protocol: &Protocol,
    base: &ClassifierConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<EvalReport>> {
    if values.is_empty() {
        return Err(Error::param("values", "sweep needs at least one value"));
    }
    let configs = values
        .iter()
        .map(|&v| with_parameter(base, parameter, v))
        .collect::<Result<Vec<_>>>()?;
    compare(source, protocol, &configs)
}
