//! Upper bound on Bob's chance to guess Alice's answer, as a function of the
//! observed CHSH score, in both conventions.

use nlcert::certify::{guess_bound, GuessBoundMode};
use nlcert::games::chsh;

fn main() -> nlcert::Result<()> {
    let game = chsh();
    let top = std::f64::consts::FRAC_PI_8.cos().powi(2);
    println!("{:>8} {:>10} {:>10}", "score", "theorem", "literal");
    for k in 0..=5 {
        let w = 0.75 + (top - 0.75) * k as f64 / 5.0;
        println!(
            "{w:>8.5} {:>10.6} {:>10.6}",
            guess_bound(&game, w, GuessBoundMode::Theorem)?,
            guess_bound(&game, w, GuessBoundMode::Literal)?
        );
    }
    Ok(())
}
