//! Dilating general POVMs to projective measurements leaves the correlation
//! unchanged.

use nlcert::random::{random_strategy, trial_rng};
use nlcert::games::Alphabets;
use nlcert::strategies::{achieved_correlation, projectivize};

fn main() -> nlcert::Result<()> {
    let s = random_strategy(Alphabets::binary(), 2, 2, false, &mut trial_rng(3, 0))?;
    let p = projectivize(&s)?;
    let before = achieved_correlation(&s)?;
    let after = achieved_correlation(&p)?;
    println!(
        "Alice: dimension {} -> {}, projective {} -> {}; max correlation change {:.2e}",
        s.dim_alice(),
        p.dim_alice(),
        s.alice().is_projective(),
        p.alice().is_projective(),
        before.as_slice().iter().zip(after.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    );
    Ok(())
}
