//! Fixed linear feature maps for the PCA+k-NN and SVD+k-NN baselines.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, LabeledSample};
use crate::error::{Error, Result};

/// Scatter eigenvalues below this fraction of the largest are treated as zero
/// (singular values below ~1e-5 of the largest).
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Pca,
    Svd,
}

/// `x ↦ projectionᵀ (x − mean)` with orthonormal projection columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEmbedding {
    pub kind: EmbeddingKind,
    pub mean: DVector<f64>,
    /// d×r, orthonormal columns ordered by decreasing variance.
    pub projection: DMatrix<f64>,
    pub variance_explained: Vec<f64>,
    /// Fewer than the requested components were available.
    pub rank_deficient: bool,
}

fn data_matrix(train: &Dataset) -> DMatrix<f64> {
    DMatrix::from_fn(train.len(), train.dim(), |i, j| train.features(i)[j])
}

fn fit(train: &Dataset, r: usize, kind: EmbeddingKind) -> Result<LinearEmbedding> {
    let (n, d) = (train.len(), train.dim());
    if r == 0 || r > n.min(d) {
        return Err(Error::param(
            "embedding",
            format!("r = {r} is outside 1..={}", n.min(d)),
        ));
    }
    let mut x = data_matrix(train);
    let mean = match kind {
        EmbeddingKind::Pca => x.row_mean().transpose(),
        EmbeddingKind::Svd => DVector::zeros(d),
    };
    for mut row in x.row_iter_mut() {
        row -= mean.transpose();
    }

    // Eigenvectors of the d×d scatter matrix XᵀX are the right singular
    // vectors of X. nalgebra's SVD mis-converges on some small inputs; the
    // symmetric eigensolver does not.
    let eig = (x.transpose() * &x).symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let top = eig.eigenvalues[order[0]];
    let rank = order
        .iter()
        .take_while(|&&k| top > 0.0 && eig.eigenvalues[k] > RANK_TOL * top)
        .count();
    if rank == 0 {
        return Err(Error::param("embedding", "training data has no variance to project"));
    }
    let kept = r.min(rank);

    let denom = (n.max(2) - 1) as f64;
    let mut projection = DMatrix::zeros(d, kept);
    let mut variance_explained = Vec::with_capacity(kept);
    for (c, &k) in order.iter().take(kept).enumerate() {
        let mut column = eig.eigenvectors.column(k).normalize();
        let pivot = column
            .iter()
            .copied()
            .fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if pivot < 0.0 {
            column.neg_mut();
        }
        projection.set_column(c, &column);
        variance_explained.push(eig.eigenvalues[k] / denom);
    }

    Ok(LinearEmbedding {
        kind,
        mean,
        projection,
        variance_explained,
        rank_deficient: kept < r,
    })
}

/// Top-r principal directions of the mean-centered training features.
pub fn fit_pca(train: &Dataset, r: usize) -> Result<LinearEmbedding> {
    fit(train, r, EmbeddingKind::Pca)
}

/// Top-r right singular vectors of the uncentered feature matrix.
pub fn fit_svd(train: &Dataset, r: usize) -> Result<LinearEmbedding> {
    fit(train, r, EmbeddingKind::Svd)
}

impl LinearEmbedding {
    pub fn input_dim(&self) -> usize {
        self.projection.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.projection.ncols()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let centered = DVector::from_column_slice(x) - &self.mean;
        Ok((self.projection.transpose() * centered).iter().copied().collect())
    }

    /// `mean + projection · z`, the point in input space a projection came from.
    pub fn unproject(&self, z: &[f64]) -> Vec<f64> {
        (&self.projection * DVector::from_column_slice(z) + &self.mean)
            .iter()
            .copied()
            .collect()
    }

    /// Writes the embedding as labeled row-major matrix blocks.
    pub fn to_text(&self) -> String {
        let mut out = String::from("drknn-embedding 1\n");
        let kind = match self.kind {
            EmbeddingKind::Pca => "pca",
            EmbeddingKind::Svd => "svd",
        };
        writeln!(out, "kind {kind}").unwrap();
        writeln!(out, "rank_deficient {}", self.rank_deficient).unwrap();
        write_block(&mut out, "mean", 1, self.mean.len(), |_, j| self.mean[j]);
        write_block(&mut out, "projection", self.input_dim(), self.output_dim(), |i, j| {
            self.projection[(i, j)]
        });
        write_block(
            &mut out,
            "variance_explained",
            1,
            self.variance_explained.len(),
            |_, j| self.variance_explained[j],
        );
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                reason: format!("unexpected end of input, expected {what}"),
            })
        };

        let (line, header) = next("header")?;
        if header != "drknn-embedding 1" {
            return Err(Error::Parse {
                line,
                reason: format!("unknown header `{header}`"),
            });
        }
        let (line, kind) = next("kind")?;
        let kind = match kind {
            "kind pca" => EmbeddingKind::Pca,
            "kind svd" => EmbeddingKind::Svd,
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("bad kind line `{other}`"),
                })
            }
        };
        let (line, flag) = next("rank_deficient")?;
        let rank_deficient = match flag {
            "rank_deficient true" => true,
            "rank_deficient false" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("bad flag line `{other}`"),
                })
            }
        };

        let mut read_block = |name: &str| -> Result<DMatrix<f64>> {
            let (line, head) = next(name)?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            let [tag, block, rows, cols] = parts.as_slice() else {
                return Err(Error::Parse {
                    line,
                    reason: format!("bad block header `{head}`"),
                });
            };
            if *tag != "matrix" || *block != name {
                return Err(Error::Parse {
                    line,
                    reason: format!("expected matrix {name}, found `{head}`"),
                });
            }
            let dims = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    reason: e.to_string(),
                })
            };
            let (rows, cols) = (dims(rows)?, dims(cols)?);
            let mut m = DMatrix::zeros(rows, cols);
            for i in 0..rows {
                let (line, row) = next(name)?;
                let values: Vec<f64> = row
                    .split_whitespace()
                    .map(|v| {
                        v.parse::<f64>().map_err(|e| Error::Parse {
                            line,
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<_>>()?;
                if values.len() != cols {
                    return Err(Error::Parse {
                        line,
                        reason: format!("expected {cols} values, found {}", values.len()),
                    });
                }
                for (j, v) in values.into_iter().enumerate() {
                    m[(i, j)] = v;
                }
            }
            Ok(m)
        };

        let mean = read_block("mean")?;
        let projection = read_block("projection")?;
        let variance = read_block("variance_explained")?;
        if mean.ncols() != projection.nrows() || variance.ncols() != projection.ncols() {
            return Err(Error::Shape("embedding blocks disagree on dimensions".into()));
        }
        Ok(Self {
            kind,
            mean: mean.row(0).transpose(),
            projection,
            variance_explained: variance.row(0).iter().copied().collect(),
            rank_deficient,
        })
    }
}

fn write_block(out: &mut String, name: &str, rows: usize, cols: usize, value: impl Fn(usize, usize) -> f64) {
    writeln!(out, "matrix {name} {rows} {cols}").unwrap();
    for i in 0..rows {
        let row: Vec<String> = (0..cols).map(|j| format!("{:?}", value(i, j))).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

/// Projects every sample; labels pass through unchanged.
pub fn transform(emb: &LinearEmbedding, samples: &Dataset) -> Result<Dataset> {
    if samples.dim() != emb.input_dim() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: emb.input_dim(),
            found: samples.dim(),
        });
    }
    let projected = samples
        .samples()
        .iter()
        .map(|s| Ok(LabeledSample::new(emb.project(&s.features)?, s.label)))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(projected, samples.class_count())
}

/// Per-feature z-scoring fitted on a training set. Constant features are only
/// centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &Dataset) -> Self {
        let n = train.len() as f64;
        let d = train.dim();
        let mut mean = vec![0.0; d];
        for s in train.samples() {
            for (m, v) in mean.iter_mut().zip(&s.features) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for s in train.samples() {
            for ((acc, v), m) in scale.iter_mut().zip(&s.features).zip(&mean) {
                *acc += (v - m).powi(2);
            }
        }
        let denom = (train.len().max(2) - 1) as f64;
        for s in scale.iter_mut() {
            let sd = (*s / denom).sqrt();
            *s = if sd > 0.0 { sd } else { 1.0 };
        }
        Self { mean, scale }
    }

    pub fn transform(&self, samples: &Dataset) -> Result<Dataset> {
        if samples.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.mean.len(),
                found: samples.dim(),
            });
        }
        let out = samples
            .samples()
            .iter()
            .map(|s| {
                let f = s
                    .features
                    .iter()
                    .zip(&self.mean)
                    .zip(&self.scale)
                    .map(|((v, m), sd)| (v - m) / sd)
                    .collect();
                LabeledSample::new(f, s.label)
            })
            .collect();
        Dataset::new(out, samples.class_count())
    }
}
