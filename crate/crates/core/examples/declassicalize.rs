//! Copy Alice's answers for both inputs into classical registers. The result
//! is a classical correlation, so its CHSH score drops to at most 3/4, yet it
//! stays close to the quantum one when Bob can predict Alice well.

use nlcert::certify::{declassicalize, CheckOptions};
use nlcert::games::{chsh, score, Alphabets};
use nlcert::random::{perturbed_chsh_strategy, random_strategy, trial_rng};
use nlcert::strategies::{achieved_correlation, chsh_optimal_strategy, projectivize};

fn main() -> nlcert::Result<()> {
    let game = chsh();
    let opts = CheckOptions::default();
    let s = chsh_optimal_strategy();
    let d = declassicalize(&game, &s, &opts)?;
    println!(
        "optimal: score {:.6} -> {:.6}, distance {:.6} <= bound {:.6}",
        score(&game, &achieved_correlation(&s)?)?,
        d.pbar_score,
        d.distance,
        d.bound
    );

    let noisy = perturbed_chsh_strategy(&mut trial_rng(7, 0))?;
    let d = declassicalize(&game, &noisy, &opts)?;
    println!(
        "noisy: distance {:.6} <= bound {:.6}, declassicalized score {:.6}",
        d.distance, d.bound, d.pbar_score
    );

    // General POVMs must be dilated first.
    let povm = random_strategy(Alphabets::binary(), 2, 2, false, &mut trial_rng(7, 1))?;
    let dilated = projectivize(&povm)?;
    let d = declassicalize(&game, &dilated, &opts)?;
    println!(
        "POVM strategy (Alice dimension {} -> {}): distance {:.6} <= bound {:.6}",
        povm.dim_alice(),
        dilated.dim_alice(),
        d.distance,
        d.bound
    );
    Ok(())
}
