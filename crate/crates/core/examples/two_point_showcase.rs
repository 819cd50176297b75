//! Least favorable distributions of the two-point problem: one sample per
//! class, unit distance apart, radius 0.25.

use drknn::data::bundled;
use drknn::domain::{empirical_distributions, euclidean_cost};
use drknn::lfd::{optimal_classifier, solve_lfd, RadiusVector};

fn main() -> Result<(), drknn::Error> {
    let data = bundled("two_point")?;
    let cost = euclidean_cost(&data)?;
    let empirical = empirical_distributions(&data)?;
    let radius: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(0.25), |s| s.parse())
        .expect("radius is a number");

    let sol = solve_lfd(&cost, &empirical, &RadiusVector::uniform(2, radius)?)?;
    println!("radius {radius}: status {}", sol.status);
    for (m, p) in sol.lfds.iter().enumerate() {
        println!(
            "  class {} LFD {:?}, transport cost {:.4}",
            m + 1,
            p.mass(),
            sol.spend[m]
        );
    }
    println!("  objective {:.6}, minimax risk {:.6}", sol.objective, sol.minimax_risk);
    let decisions: Vec<usize> = optimal_classifier(&sol)?.decisions().iter().map(|c| c + 1).collect();
    println!("  minimax decisions on the support: {decisions:?}");
    Ok(())
}
