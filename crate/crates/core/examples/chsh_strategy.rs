//! The optimal qubit strategy for CHSH: its correlation, score, and the
//! no-signaling check, next to the PR box which scores 1.

use nlcert::games::{chsh, is_nonsignaling, pr_box, score};
use nlcert::strategies::{achieved_correlation, chsh_optimal_strategy};

fn main() -> nlcert::Result<()> {
    let game = chsh();
    let p = achieved_correlation(&chsh_optimal_strategy())?;
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let row: Vec<String> = (0..2)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .map(|(x, y)| format!("p({x}{y}|{a}{b}) = {:.4}", p.p(a, b, x, y)))
            .collect();
        println!("{}", row.join("  "));
    }
    println!("score = {:.10} (cos^2(pi/8) = {:.10})", score(&game, &p)?, std::f64::consts::FRAC_PI_8.cos().powi(2));
    println!("no-signaling violation = {:.2e}", is_nonsignaling(&p, 1e-9).max_violation);

    let pr = pr_box();
    println!("PR box: score = {}, no-signaling = {}", score(&game, &pr)?, is_nonsignaling(&pr, 1e-12).holds);
    Ok(())
}
