//! Seeded randomized sweeps of all three bound checks, then the disturbance
//! sweep again with its bound halved to show the checker does catch failures.

use nlcert::sweep::{run_sweep, Check, SweepConfig};

fn main() -> nlcert::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for check in [Check::Disturbance, Check::Declassical, Check::Theorem] {
        println!("{}", run_sweep(&SweepConfig::new(check, trials, 2024))?);
    }
    let mut halved = SweepConfig::new(Check::Disturbance, trials, 2024);
    halved.rhs_scale = 0.5;
    let s = run_sweep(&halved)?;
    println!("halved bound -> {} counterexamples", s.failed);
    Ok(())
}
