//! Load the bundled fixtures and write them back in canonical form.

use std::path::Path;

use nlcert::io::{load_correlation, load_game, load_strategy, to_canonical_string, GameFile};

fn main() -> nlcert::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let game = load_game(&dir.join("chsh.json"))?;
    let strategy = load_strategy(&dir.join("chsh_opt.json"))?;
    let pr = load_correlation(&dir.join("pr_box.json"))?;
    println!(
        "game {:?}; strategy dimensions {}x{}; PR box p(00|00) = {}",
        game.sizes(),
        strategy.strategy.dim_alice(),
        strategy.strategy.dim_bob(),
        pr.p(0, 0, 0, 0)
    );
    let text = to_canonical_string(&GameFile::from_game(&game))?;
    let original = std::fs::read_to_string(dir.join("chsh.json"))?;
    println!("canonical round trip identical: {}", text == original);
    Ok(())
}
