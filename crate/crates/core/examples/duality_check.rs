//! Solves the LFD program and the Lipschitz-regularized risk program on random
//! instances and prints the duality gap and the Lipschitz bound.

use drknn::domain::{empirical_distributions, euclidean_cost, Dataset};
use drknn::lfd::{duality_report, RadiusVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), drknn::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!(
        "{:>3} {:>2} {:>6} {:>10} {:>10} {:>9}  L_m",
        "n", "M", "radius", "lfd", "lipschitz", "gap"
    );
    for _ in 0..10 {
        let classes = rng.random_range(2..=3);
        let n = rng.random_range(classes..=8);
        let features = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        let labels = (0..n)
            .map(|i| if i < classes { i } else { rng.random_range(0..classes) })
            .collect();
        let data = Dataset::from_parts(features, labels)?;
        let radius = [0.05, 0.2, 0.5][rng.random_range(0..3)];

        let r = duality_report(
            &euclidean_cost(&data)?,
            &empirical_distributions(&data)?,
            &RadiusVector::uniform(classes, radius)?,
        )?;
        let norms: Vec<String> = r.lip_norms.iter().map(|l| format!("{l:.3}")).collect();
        println!(
            "{n:>3} {classes:>2} {radius:>6} {:>10.6} {:>10.6} {:>9.1e}  {} (bound {:.1}{})",
            r.lfd_value,
            r.lip_value,
            r.gap,
            norms.join(" "),
            1.0 / radius,
            if r.lambda_bound_ok { "" } else { ", VIOLATED" }
        );
    }
    Ok(())
}
