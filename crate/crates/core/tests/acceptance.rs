//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Benchmark settings (dataset, seeds, episode counts) are fixed up front and
//! are the same ones the README documents; they are not tuned to the outcome.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use drknn::classifiers::{classify, drknn_votes};
use drknn::data::bundled;
use drknn::domain::{
    empirical_distributions, euclidean_cost, minimal_risk, risk, ClassifierAssignment, Dataset, EmpiricalDistribution,
};
use drknn::eval::{
    compare, mean_std, sweep, ClassifierConfig, EmbeddingConfig, EpisodeSpec, EvalReport, Protocol, RadiusChoice,
    SweepParameter,
};
use drknn::lfd::{duality_report, solve_lfd, RadiusVector, SolverStatus};
use drknn::report::validate;
use drknn::verify::{brute_force_lfd, exhaustive_classifier_risk, run_suite, GridSpec};

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// n points in the unit square, M classes, every class non-empty.
fn random_dataset(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Dataset {
    let features = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let labels = (0..n)
        .map(|i| if i < classes { i } else { rng.random_range(0..classes) })
        .collect();
    Dataset::from_parts(features, labels).unwrap()
}

fn random_shape(rng: &mut ChaCha8Rng, max_n: usize) -> (usize, usize) {
    let classes = rng.random_range(2..=3);
    (rng.random_range(classes..=max_n), classes)
}

fn max_pairwise_distance(data: &Dataset) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..data.len() {
        for j in 0..data.len() {
            let d: f64 = data
                .features(i)
                .iter()
                .zip(data.features(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(d);
        }
    }
    worst
}

fn two_point_showcase() -> Outcome {
    let data = bundled("two_point").map_err(err)?;
    let cost = euclidean_cost(&data).map_err(err)?;
    let emp = empirical_distributions(&data).map_err(err)?;
    let radii = RadiusVector::uniform(2, 0.25).map_err(err)?;
    let start = Instant::now();
    let sol = solve_lfd(&cost, &emp, &radii).map_err(err)?;
    let seconds = start.elapsed().as_secs_f64();
    let grid = GridSpec::new(0.01).map_err(err)?;
    let brute = brute_force_lfd(&cost, &emp, &radii, &grid).map_err(err)?;

    let expected = [[0.75, 0.25], [0.25, 0.75]];
    let lfd_err = sol
        .lfds
        .iter()
        .zip(expected)
        .flat_map(|(d, e)| d.mass().iter().zip(e).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0f64, f64::max);
    let ok = sol.status == SolverStatus::Optimal
        && (sol.objective - 1.5).abs() <= 1e-6
        && (sol.minimax_risk - 0.5).abs() <= 1e-6
        && lfd_err <= 1e-6
        && (brute.objective - sol.objective).abs() <= 1e-6
        && seconds < 1.0;
    Ok((
        ok,
        format!(
            "objective {:.9}, risk {:.9}, max LFD error {lfd_err:.1e}, grid oracle {:.9}, {seconds:.4}s",
            sol.objective, sol.minimax_risk, brute.objective
        ),
    ))
}

fn zero_radius() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_mass = 0.0f64;
    let mut worst_obj = 0.0f64;
    for _ in 0..20 {
        let (n, classes) = random_shape(&mut rng, 10);
        let data = random_dataset(&mut rng, n, classes);
        let sizes: Vec<usize> = (0..classes)
            .map(|m| data.labels().filter(|&y| y == m).count())
            .collect();
        let empirical: Vec<Vec<f64>> = (0..classes)
            .map(|m| {
                (0..n)
                    .map(|i| if data.label(i) == m { 1.0 / sizes[m] as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        let expected_obj: f64 = (0..n)
            .map(|i| (0..classes).map(|m| empirical[m][i]).fold(0.0, f64::max))
            .sum();

        let cost = euclidean_cost(&data).map_err(err)?;
        let emp = empirical_distributions(&data).map_err(err)?;
        let sol = solve_lfd(&cost, &emp, &RadiusVector::uniform(classes, 0.0).map_err(err)?).map_err(err)?;
        if sol.status != SolverStatus::Optimal {
            return Ok((false, format!("solver status {}", sol.status)));
        }
        for (d, e) in sol.lfds.iter().zip(&empirical) {
            for (a, b) in d.mass().iter().zip(e) {
                worst_mass = worst_mass.max((a - b).abs());
            }
        }
        worst_obj = worst_obj.max((sol.objective - expected_obj).abs());
    }
    Ok((
        worst_mass <= 1e-8 && worst_obj <= 1e-8,
        format!("20 instances, max LFD deviation {worst_mass:.1e}, max objective deviation {worst_obj:.1e}"),
    ))
}

fn saturation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_obj = 0.0f64;
    let mut worst_risk = 0.0f64;
    for _ in 0..20 {
        let (n, classes) = random_shape(&mut rng, 10);
        let data = random_dataset(&mut rng, n, classes);
        let radius = max_pairwise_distance(&data);
        let cost = euclidean_cost(&data).map_err(err)?;
        let emp = empirical_distributions(&data).map_err(err)?;
        let sol = solve_lfd(&cost, &emp, &RadiusVector::uniform(classes, radius).map_err(err)?).map_err(err)?;
        if sol.status != SolverStatus::Optimal {
            return Ok((false, format!("solver status {}", sol.status)));
        }
        worst_obj = worst_obj.max((sol.objective - 1.0).abs());
        worst_risk = worst_risk.max((sol.minimax_risk - (classes as f64 - 1.0)).abs());
    }
    Ok((
        worst_obj <= 1e-7 && worst_risk <= 1e-7,
        format!("20 instances at radius = max cost, max |objective − 1| {worst_obj:.1e}, max |risk − (M−1)| {worst_risk:.1e}"),
    ))
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = [0.0, 0.05, 0.1, 0.25, 0.5];
    let mut worst_drop = 0.0f64;
    for _ in 0..20 {
        let (n, classes) = random_shape(&mut rng, 10);
        let data = random_dataset(&mut rng, n, classes);
        let cost = euclidean_cost(&data).map_err(err)?;
        let emp = empirical_distributions(&data).map_err(err)?;
        let mut previous = f64::NEG_INFINITY;
        for r in grid {
            let sol = solve_lfd(&cost, &emp, &RadiusVector::uniform(classes, r).map_err(err)?).map_err(err)?;
            if sol.status != SolverStatus::Optimal {
                return Ok((false, format!("solver status {}", sol.status)));
            }
            worst_drop = worst_drop.max(previous - sol.minimax_risk);
            previous = sol.minimax_risk;
        }
    }
    Ok((
        worst_drop <= 1e-8,
        format!(
            "20 instances × radii {grid:?}, largest decrease {:.1e}",
            worst_drop.max(0.0)
        ),
    ))
}

fn strong_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let choices = [0.05, 0.2, 0.5];
    let mut worst_gap = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (n, classes) = random_shape(&mut rng, 8);
        let data = random_dataset(&mut rng, n, classes);
        let radii: Vec<f64> = (0..classes)
            .map(|_| choices[rng.random_range(0..choices.len())])
            .collect();
        let cost = euclidean_cost(&data).map_err(err)?;
        let emp = empirical_distributions(&data).map_err(err)?;
        let report = duality_report(&cost, &emp, &RadiusVector::new(radii.clone()).map_err(err)?).map_err(err)?;
        worst_gap = worst_gap.max((report.lfd_value - report.lip_value).abs());
        for (l, r) in report.lip_norms.iter().zip(&radii) {
            worst_excess = worst_excess.max(l - 1.0 / r);
        }
    }
    Ok((
        worst_gap <= 1e-6 && worst_excess <= 1e-6,
        format!("20 instances, max |gap| {worst_gap:.1e}, max L_m − 1/ϑ_m {worst_excess:.3}"),
    ))
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> EmpiricalDistribution {
    // Small integer weights make exact ties between classes common.
    let raw: Vec<f64> = loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
        if raw.iter().sum::<f64>() > 0.0 {
            break raw;
        }
    };
    let total: f64 = raw.iter().sum();
    EmpiricalDistribution::new(raw.iter().map(|v| v / total).collect()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let resolution = 0.05;
    let checks = run_suite(0, Some(resolution)).map_err(err)?;
    let mut grid_cases = 0;
    let mut worst_ratio = 0.0f64;
    for c in checks.iter().filter(|c| c.check == "lfd_objective_vs_grid") {
        let (n, classes) = parse_instance_name(&c.instance).ok_or_else(|| format!("bad name {}", c.instance))?;
        let bound = (classes * n) as f64 * resolution;
        worst_ratio = worst_ratio.max((c.solver - c.oracle).abs() / bound);
        grid_cases += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_enum = 0.0f64;
    for _ in 0..50 {
        let classes = rng.random_range(2..=3);
        let n = rng.random_range(1..=4);
        let dists: Vec<_> = (0..classes).map(|_| random_distribution(&mut rng, n)).collect();
        let (closed, _) = minimal_risk(&dists).map_err(err)?;
        let enumerated = exhaustive_classifier_risk(&dists, false).map_err(err)?;
        worst_enum = worst_enum.max((closed - enumerated).abs());
    }
    Ok((
        grid_cases > 0 && worst_ratio <= 1.0 && worst_enum <= 1e-12,
        format!(
            "{grid_cases} suite instances, worst |LP − grid| / (M·n·0.05) = {worst_ratio:.3}; 50 enumeration instances, max deviation {worst_enum:.1e}"
        ),
    ))
}

/// Suite instance names look like `n4_m3_2`.
fn parse_instance_name(name: &str) -> Option<(usize, usize)> {
    let mut parts = name.split('_');
    let n = parts.next()?.strip_prefix('n')?.parse().ok()?;
    let m = parts.next()?.strip_prefix('m')?.parse().ok()?;
    Some((n, m))
}

fn attainment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (n, classes) = random_shape(&mut rng, 10);
        let data = random_dataset(&mut rng, n, classes);
        let radius = [0.0, 0.1, 0.3][rng.random_range(0..3)];
        let cost = euclidean_cost(&data).map_err(err)?;
        let emp = empirical_distributions(&data).map_err(err)?;
        let sol = solve_lfd(&cost, &emp, &RadiusVector::uniform(classes, radius).map_err(err)?).map_err(err)?;
        if sol.status != SolverStatus::Optimal {
            return Ok((false, format!("solver status {}", sol.status)));
        }
        let decisions = (0..n)
            .map(|i| drknn_votes(data.features(i), &data, &sol.lfds, 1).map(|v| classify(&v)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let pi = ClassifierAssignment::from_decisions(&decisions, classes).map_err(err)?;
        let achieved = risk(&pi, &sol.lfds).map_err(err)?;
        worst = worst.max((achieved - sol.minimax_risk).abs());
    }
    Ok((
        worst <= 1e-8,
        format!("20 instances, max |risk(Dr.1-NN) − minimax risk| {worst:.1e}"),
    ))
}

fn benchmark() -> Dataset {
    bundled("gaussian_noisy").expect("bundled benchmark parses")
}

fn protocol(shots: usize, episodes: usize) -> Protocol {
    Protocol {
        episode: EpisodeSpec {
            class_count: 2,
            shots,
            query_count: 100,
            seed: 0,
        },
        episodes,
        embedding: EmbeddingConfig::default(),
        jobs: 0,
    }
}

fn cv_drknn(k: usize) -> ClassifierConfig {
    ClassifierConfig::DrKnn {
        k,
        radius: RadiusChoice::default_cv(),
    }
}

fn random_baseline() -> Outcome {
    let p = protocol(5, 50);
    let reports = compare(&benchmark(), &p, &[ClassifierConfig::UniformRandom]).map_err(err)?;
    let mean = reports[0].mean;
    let sigma = (0.5 * 0.5 / (p.episodes * p.episode.query_count) as f64).sqrt();
    Ok((
        (mean - 0.5).abs() <= 3.0 * sigma,
        format!(
            "mean accuracy {mean:.4} over 50 episodes, |mean − 1/2| = {:.2}σ",
            (mean - 0.5).abs() / sigma
        ),
    ))
}

fn desk_benefit(reports: &[EvalReport]) -> Outcome {
    let (dr, vanilla) = (&reports[0], &reports[1]);
    let diffs: Vec<f64> = dr
        .accuracies
        .iter()
        .zip(&vanilla.accuracies)
        .map(|(a, b)| a - b)
        .collect();
    let (mean_diff, std_diff) = mean_std(&diffs);
    Ok((
        dr.mean >= vanilla.mean - 0.01,
        format!(
            "Dr.k-NN {:.4} ± {:.4} vs vanilla 5-NN {:.4} ± {:.4}; paired difference {mean_diff:+.4} (sd {std_diff:.4})",
            dr.mean, dr.std, vanilla.mean, vanilla.std
        ),
    ))
}

fn k_sweep() -> Outcome {
    let values: Vec<f64> = (1..=8).map(f64::from).collect();
    let p = protocol(5, 30);
    let reports = sweep(&benchmark(), &p, &cv_drknn(1), SweepParameter::K, &values).map_err(err)?;
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("k_sweep.csv");
    let mut table = String::from("k,episode,accuracy\n");
    let mut consistent = reports.len() == values.len();
    for (r, k) in reports.iter().zip(&values) {
        let (mean, std) = mean_std(&r.accuracies);
        consistent &= r.accuracies.len() == p.episodes
            && r.accuracies.iter().all(|a| (0.0..=1.0).contains(a))
            && (mean - r.mean).abs() <= 1e-12
            && (std - r.std).abs() <= 1e-12;
        for (t, a) in r.accuracies.iter().enumerate() {
            table.push_str(&format!("{k},{t},{a}\n"));
        }
    }
    std::fs::write(&path, table).map_err(err)?;
    let means: Vec<f64> = reports.iter().map(|r| r.mean).collect();
    let range =
        means.iter().copied().fold(f64::NEG_INFINITY, f64::max) - means.iter().copied().fold(f64::INFINITY, f64::min);
    let listed: Vec<String> = means.iter().map(|m| format!("{m:.3}")).collect();
    Ok((
        consistent,
        format!(
            "means for k=1..8: [{}], max − min = {range:.4}; table at {}",
            listed.join(", "),
            path.display()
        ),
    ))
}

fn truncation() -> Outcome {
    let shots = 25;
    let p = protocol(shots, 30);
    let configs = [
        cv_drknn(5),
        ClassifierConfig::Truncated {
            k: 5,
            tau: 0.9,
            radius: RadiusChoice::default_cv(),
        },
    ];
    let reports = compare(&benchmark(), &p, &configs).map_err(err)?;
    let kept = reports[1].kept.as_ref().ok_or("truncated report lacks kept sizes")?;
    let fraction = kept.iter().sum::<usize>() as f64 / (kept.len() * 2 * shots) as f64;
    let drop = reports[0].mean - reports[1].mean;
    Ok((
        fraction <= 0.5 && drop <= 0.05,
        format!(
            "K={shots}: kept fraction {fraction:.3}, accuracy {:.4} → {:.4} (drop {drop:.4})",
            reports[0].mean, reports[1].mean
        ),
    ))
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_drknn"))
        .args(args)
        .output()
        .map_err(err)?;
    if !out.status.success() {
        return Err(format!(
            "`drknn {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let report: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    validate(&report).map_err(err)?;
    Ok(report)
}

fn cli_contract(benchmark_reports: &[EvalReport]) -> Outcome {
    let lfd = run_cli(&["lfd", "--dataset", "builtin:two_point", "--radii", "0.25", "--duality"])?;
    let objective = lfd["result"]["objective"].as_f64().unwrap_or(f64::NAN);
    let risk = lfd["result"]["minimax_risk"].as_f64().unwrap_or(f64::NAN);

    let eval = run_cli(&[
        "eval",
        "--dataset",
        "builtin:gaussian_noisy",
        "--method",
        "drknn,vanilla",
        "--classes",
        "2",
        "--shots",
        "5",
        "--k",
        "5",
        "--episodes",
        "30",
        "--seed",
        "0",
    ])?;
    let means: Vec<f64> = eval["result"]["reports"]
        .as_array()
        .map(|rs| rs.iter().filter_map(|r| r["mean"].as_f64()).collect())
        .unwrap_or_default();
    let expected: Vec<f64> = benchmark_reports.iter().map(|r| r.mean).collect();

    let verify = run_cli(&["verify"])?;
    let all_passed = verify["result"]["all_passed"].as_bool() == Some(true);

    let ok = (objective - 1.5).abs() <= 1e-6 && (risk - 0.5).abs() <= 1e-6 && means == expected && all_passed;
    Ok((
        ok,
        format!("lfd objective {objective:.9} risk {risk:.9}; eval means {means:?} (library {expected:?}); verify all passed: {all_passed}"),
    ))
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {id:2} {:4} {name}: {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
    };

    report(1, "two-point showcase", two_point_showcase());
    report(2, "zero-radius reduction", zero_radius());
    report(3, "saturation", saturation());
    report(4, "monotonicity", monotonicity());
    report(5, "strong duality and λ bound", strong_duality());
    report(6, "oracle equivalence", oracle_equivalence());
    report(7, "Dr.1-NN attains the minimax risk", attainment());
    report(8, "random baseline", random_baseline());

    let benchmark_reports = compare(
        &benchmark(),
        &protocol(5, 30),
        &[cv_drknn(5), ClassifierConfig::Vanilla { k: 5 }],
    );
    match &benchmark_reports {
        Ok(reports) => {
            report(9, "desk-scale benefit", desk_benefit(reports));
            if let Some(radii) = &reports[0].radii {
                let positive = radii.iter().filter(|r| r.iter().any(|&v| v > 0.0)).count();
                println!(
                    "info         cross-validation picked a positive radius in {positive}/{} episodes",
                    radii.len()
                );
            }
        }
        Err(e) => report(9, "desk-scale benefit", Err(err(e))),
    }
    report(10, "k sweep", k_sweep());
    report(11, "truncation economy", truncation());
    match &benchmark_reports {
        Ok(reports) => report(12, "CLI contract", cli_contract(reports)),
        Err(e) => report(12, "CLI contract", Err(err(e))),
    }

    println!(
        "acceptance: {} of 12 criteria passed in {:.1}s",
        12 - failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
