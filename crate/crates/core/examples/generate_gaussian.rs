//! Writes the seeded two-Gaussian benchmark with 20% label noise.
//!
//!     cargo run --example generate_gaussian -- [per_class] [seed] > data/gaussian_noisy.csv

use drknn::data::{format_dataset, gaussian_classes, GaussianSpec};

fn main() -> drknn::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut spec = GaussianSpec::default();
    if let Some(n) = args.next() {
        spec.per_class = n.parse().expect("per_class must be an integer");
    }
    if let Some(s) = args.next() {
        spec.seed = s.parse().expect("seed must be an integer");
    }
    let dataset = gaussian_classes(&spec)?;
    println!(
        "# {} classes x {} samples, dim {}, separation {}, label noise {}, seed {}",
        spec.classes, spec.per_class, spec.dim, spec.separation, spec.label_noise, spec.seed
    );
    let header: Vec<String> = (1..=spec.dim).map(|j| format!("x{j}")).collect();
    println!("{},label", header.join(","));
    print!("{}", format_dataset(&dataset));
    Ok(())
}
