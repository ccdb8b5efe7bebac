//! Score above the classical value forces Bob's guessing error ε up:
//! score − ω_c ≤ C_G √ε. Prints the full report for the optimal CHSH strategy.

use nlcert::certify::{theorem_gap_check, CheckOptions};
use nlcert::games::chsh;
use nlcert::io::to_canonical_string;
use nlcert::strategies::chsh_optimal_strategy;

fn main() -> nlcert::Result<()> {
    let report = theorem_gap_check(&chsh(), &chsh_optimal_strategy(), &CheckOptions::default())?;
    println!(
        "gap {:.5} <= C_G sqrt(eps) = {:.5}: {}",
        report.theorem_gap, report.theorem_bound, report.theorem_bound_holds
    );
    print!("{}", to_canonical_string(&report)?);
    Ok(())
}
