//! Dataset files and the bundled synthetic benchmark.
//!
//! The file format is one sample per line: real features followed by a
//! 1-based integer label in the last column. Fields are separated by commas,
//! semicolons, tabs or runs of spaces. Blank lines and `#` comments are
//! skipped, and a first row that does not parse as numbers is taken as a
//! header.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::{Dataset, LabeledSample};
use crate::error::{Error, Result};

fn fields(line: &str) -> Vec<&str> {
    let sep = [',', ';', '\t'].into_iter().find(|c| line.contains(*c));
    match sep {
        Some(c) => line.split(c).map(str::trim).collect(),
        None => line.split_whitespace().collect(),
    }
}

fn parse_label(field: &str, line: usize) -> Result<usize> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("label `{field}` is not a number"),
    })?;
    if value.fract() != 0.0 || value < 1.0 {
        return Err(Error::Parse {
            line,
            reason: format!("label `{field}` is not a positive integer"),
        });
    }
    Ok(value as usize - 1)
}

/// Parses dataset text. Errors carry the 1-based line and column.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut width = None;
    for (line_no, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = fields(line);
        let numeric = row.iter().all(|f| f.parse::<f64>().is_ok());
        if !numeric && samples.is_empty() && width.is_none() {
            // Header row: remember its width so data rows are checked against it.
            width = Some(row.len());
            continue;
        }
        if row.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                reason: "need at least one feature and a label".into(),
            });
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected {w} columns, found {}", row.len()),
                });
            }
        }
        width = Some(row.len());

        let (label, features) = row.split_last().expect("row has at least two fields");
        let features = features
            .iter()
            .enumerate()
            .map(|(col, f)| {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("column {}: `{f}` is not a number", col + 1),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("column {}: non-finite value `{f}`", col + 1),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        samples.push(LabeledSample::new(features, parse_label(label, line_no)?));
    }
    let class_count = samples.iter().map(|s| s.label + 1).max().ok_or(Error::EmptyDataset)?;
    Dataset::new(samples, class_count)
}

/// Parses query points for a model trained on `dim` features. Rows with
/// `dim + 1` columns carry a label; rows with `dim` columns do not. Returns the
/// queries (label 0 when unlabeled) and whether labels were present.
pub fn parse_queries(text: &str, dim: usize, class_count: usize) -> Result<(Dataset, bool)> {
    let first = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .find(|l| fields(l).iter().all(|f| f.parse::<f64>().is_ok()))
        .ok_or(Error::EmptyDataset)?;
    let width = fields(first).len();
    if width == dim + 1 {
        let d = parse_dataset(text)?;
        if d.class_count() > class_count {
            return Err(Error::param(
                "query-file",
                format!(
                    "labels go up to {}, the training set has {class_count} classes",
                    d.class_count()
                ),
            ));
        }
        let samples = d.samples().to_vec();
        return Ok((Dataset::new(samples, class_count)?, true));
    }
    if width != dim {
        return Err(Error::param(
            "query-file",
            format!("rows have {width} columns, expected {dim} features (plus an optional label)"),
        ));
    }
    // Append a dummy label column and reuse the dataset parser.
    let labeled: String = text
        .lines()
        .map(|l| {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                format!("{l}\n")
            } else {
                let sep = if t.contains(',') { "," } else { " " };
                format!("{t}{sep}1\n")
            }
        })
        .collect();
    let d = parse_dataset(&labeled)?;
    let samples = d.samples().to_vec();
    Ok((Dataset::new(samples, class_count)?, false))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_dataset(&read_text(path.as_ref())?)
}

/// `read_to_string` whose error names the file.
pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

/// Comma-separated text with 1-based labels; floats round-trip exactly.
pub fn format_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();
    for s in dataset.samples() {
        for v in &s.features {
            write!(out, "{v:?},").unwrap();
        }
        writeln!(out, "{}", s.label + 1).unwrap();
    }
    out
}

/// Datasets shipped with the crate, addressable from the command line as
/// `builtin:<name>`.
pub const BUNDLED: [(&str, &str); 3] = [
    ("two_point", include_str!("../data/two_point.csv")),
    ("six_point", include_str!("../data/six_point.csv")),
    ("gaussian_noisy", include_str!("../data/gaussian_noisy.csv")),
];

pub fn bundled(name: &str) -> Result<Dataset> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::param("dataset", format!("no bundled dataset named `{name}`")))?;
    parse_dataset(text)
}

/// Loads `builtin:<name>` from the bundled set, anything else from disk.
pub fn resolve_dataset(spec: &str) -> Result<Dataset> {
    match spec.strip_prefix("builtin:") {
        Some(name) => bundled(name),
        None => load_dataset(spec),
    }
}

/// Isotropic Gaussian classes with symmetric label noise.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub classes: usize,
    pub per_class: usize,
    pub dim: usize,
    /// Distance between neighboring class means.
    pub separation: f64,
    /// Probability that a label is replaced by a different class, uniformly.
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            classes: 2,
            per_class: 200,
            dim: 2,
            separation: 2.0,
            label_noise: 0.2,
            seed: 7,
        }
    }
}

/// Class means sit on a regular polygon in the first two coordinates (two
/// classes: ±separation/2 on the first axis); all classes have identity
/// covariance. Samples are laid out class by class, so which rows exist does
/// not depend on the noise draw.
pub fn gaussian_classes(spec: &GaussianSpec) -> Result<Dataset> {
    if spec.classes < 2 || spec.per_class == 0 || spec.dim < 2 {
        return Err(Error::param(
            "gaussian",
            "need ≥ 2 classes, ≥ 1 sample per class and dim ≥ 2",
        ));
    }
    if !(0.0..1.0).contains(&spec.label_noise) || spec.separation.is_nan() || spec.separation < 0.0 {
        return Err(Error::param(
            "gaussian",
            "label_noise must be in [0, 1) and separation ≥ 0",
        ));
    }
    let m = spec.classes as f64;
    let radius = spec.separation / (2.0 * (std::f64::consts::PI / m).sin());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(spec.classes * spec.per_class);
    for class in 0..spec.classes {
        let angle = 2.0 * std::f64::consts::PI * class as f64 / m + std::f64::consts::PI;
        for _ in 0..spec.per_class {
            let mut x: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
            x[0] += radius * angle.cos();
            x[1] += radius * angle.sin();
            let label = if rng.random::<f64>() < spec.label_noise {
                (class + rng.random_range(1..spec.classes)) % spec.classes
            } else {
                class
            };
            samples.push(LabeledSample::new(x, label));
        }
    }
    Dataset::new(samples, spec.classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWIN: &str = "0.5,1.0,1\n-1.5,2.0,2\n3.0,0.25,1\n1.0,-1.0,2\n";

    #[test]
    fn four_rows_three_columns() {
        let d = parse_dataset(TWIN).unwrap();
        assert_eq!((d.len(), d.dim(), d.class_count()), (4, 2, 2));
        assert_eq!(d.labels().collect::<Vec<_>>(), vec![0, 1, 0, 1]);
        assert_eq!(d.features(1), &[-1.5, 2.0]);
    }

    #[test]
    fn header_is_skipped() {
        let with_header = format!("x,y,label\n{TWIN}");
        assert_eq!(parse_dataset(&with_header).unwrap(), parse_dataset(TWIN).unwrap());
    }

    #[test]
    fn bad_feature_cites_line() {
        let err = parse_dataset("1,2,1\n3,4,2\n5,oops,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("column 2"));
    }

    #[test]
    fn rejects_non_finite_and_bad_labels() {
        assert!(matches!(
            parse_dataset("1,2,1\nNaN,4,2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_dataset("1,inf,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dataset("1,2,0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dataset("1,2,1.5\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_dataset("1,2,1\n3,2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_dataset("a,b\n"), Err(Error::EmptyDataset)));
    }

    #[test]
    fn queries_with_and_without_labels() {
        let (q, labeled) = parse_queries("0.5,1.0,2\n1,1,1\n", 2, 2).unwrap();
        assert!(labeled);
        assert_eq!(q.label(0), 1);
        let (q, labeled) = parse_queries("x,y\n0.5,1.0\n1,1\n", 2, 3).unwrap();
        assert!(!labeled);
        assert_eq!((q.len(), q.dim(), q.class_count()), (2, 2, 3));
        assert!(parse_queries("1,2,3,4\n", 2, 2).is_err());
        assert!(parse_queries("1,2,3\n", 2, 2).is_err());
    }

    #[test]
    fn whitespace_and_comments() {
        let d = parse_dataset("# toy\n0.5 1.0 1\n\n-1.5\t2.0\t2\n").unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn format_round_trips() {
        let d = gaussian_classes(&GaussianSpec {
            per_class: 5,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(parse_dataset(&format_dataset(&d)).unwrap(), d);
    }

    #[test]
    fn bundled_sets_parse() {
        let two = bundled("two_point").unwrap();
        assert_eq!((two.len(), two.class_count()), (2, 2));
        let six = bundled("six_point").unwrap();
        assert_eq!((six.len(), six.class_count()), (6, 2));
        assert!(bundled("nope").is_err());
    }

    #[test]
    fn bundled_gaussian_matches_generator() {
        let regenerated = gaussian_classes(&GaussianSpec::default()).unwrap();
        let shipped = bundled("gaussian_noisy").unwrap();
        assert_eq!(shipped.len(), regenerated.len());
        for i in 0..shipped.len() {
            assert_eq!(shipped.label(i), regenerated.label(i));
            for (a, b) in shipped.features(i).iter().zip(regenerated.features(i)) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_geometry_and_noise() {
        let spec = GaussianSpec {
            per_class: 4000,
            label_noise: 0.2,
            separation: 3.0,
            ..Default::default()
        };
        let d = gaussian_classes(&spec).unwrap();
        let n = spec.per_class as f64;
        let mean0: f64 = (0..spec.per_class).map(|i| d.features(i)[0]).sum::<f64>() / n;
        let mean1: f64 = (spec.per_class..2 * spec.per_class)
            .map(|i| d.features(i)[0])
            .sum::<f64>()
            / n;
        assert!(
            (mean0 + 1.5).abs() < 0.1 && (mean1 - 1.5).abs() < 0.1,
            "{mean0} {mean1}"
        );
        let flipped = (0..spec.per_class).filter(|&i| d.label(i) != 0).count() as f64 / n;
        // 3σ of a binomial proportion at p = 0.2.
        assert!((flipped - 0.2).abs() < 3.0 * (0.16 / n).sqrt(), "{flipped}");
    }

    #[test]
    fn gaussian_is_seeded() {
        let spec = GaussianSpec {
            per_class: 10,
            ..Default::default()
        };
        assert_eq!(gaussian_classes(&spec).unwrap(), gaussian_classes(&spec).unwrap());
        let other = GaussianSpec {
            seed: 8,
            ..spec.clone()
        };
        assert_ne!(gaussian_classes(&spec).unwrap(), gaussian_classes(&other).unwrap());
    }
}
