//! Classical value of CHSH and of a random 3-input game by exhaustive search
//! over deterministic strategies.

use nlcert::games::{chsh, classical_value, Alphabets};
use nlcert::random::{random_game, trial_rng};

fn main() -> nlcert::Result<()> {
    let v = classical_value(&chsh())?;
    println!("CHSH: omega_c = {} with alice {:?}, bob {:?}", v.value, v.alice, v.bob);

    let g = random_game(Alphabets::new(3, 3, 2, 2)?, &mut trial_rng(1, 0));
    let v = classical_value(&g)?;
    println!("random 3x3 game: omega_c = {:.6} with alice {:?}, bob {:?}", v.value, v.alice, v.bob);
    Ok(())
}
