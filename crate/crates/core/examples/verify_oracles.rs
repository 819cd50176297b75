//! The LP solver against brute-force oracles on the tiny instance suite.

use drknn::verify::run_suite;

fn main() -> Result<(), drknn::Error> {
    let resolution = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("resolution is a number"));
    let checks = run_suite(0, resolution)?;
    for c in &checks {
        println!(
            "{} {:10} {:28} {:.6} vs {:.6} (tol {:.0e})",
            if c.passed { "ok  " } else { "FAIL" },
            c.instance,
            c.check,
            c.solver,
            c.oracle,
            c.tolerance
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
    Ok(())
}
