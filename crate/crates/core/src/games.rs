//! Finite two-player games, correlations, scoring and the classical value.
//!
//! Inputs and outputs are indices `0..n`. Arrays are stored flat in
//! row-major order: `q[a][b]`, `H[a][b][x][y]`, `p[a][b][x][y]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{
    CORRELATION_NEGATIVITY_TOL, CORRELATION_NORMALIZATION_TOL, ENUMERATION_BUDGET,
    GAME_NORMALIZATION_TOL,
};

/// Alphabet sizes |A|, |B| (inputs) and |X|, |Y| (outputs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabets {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
}

impl Alphabets {
    pub fn new(a: usize, b: usize, x: usize, y: usize) -> Result<Self> {
        if a == 0 || b == 0 || x == 0 || y == 0 {
            return Err(Error::Shape(format!(
                "alphabet sizes must be positive, got ({a}, {b}, {x}, {y})"
            )));
        }
        Ok(Self { a, b, x, y })
    }

    pub const fn binary() -> Self {
        Self { a: 2, b: 2, x: 2, y: 2 }
    }

    pub fn inputs(&self) -> usize {
        self.a * self.b
    }

    pub fn len(&self) -> usize {
        self.a * self.b * self.x * self.y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.b + b) * self.x + x) * self.y + y
    }
}

/// A game `G = (q, H)`: input distribution and scoring function.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    sizes: Alphabets,
    q: Vec<f64>,
    h: Vec<f64>,
}

impl Game {
    /// `q` is indexed `[a·|B| + b]`, `h` by [`Alphabets::index`].
    pub fn new(sizes: Alphabets, q: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if q.len() != sizes.inputs() || h.len() != sizes.len() {
            return Err(Error::Shape(format!(
                "game arrays have {} and {} entries, alphabets {:?} need {} and {}",
                q.len(),
                h.len(),
                sizes,
                sizes.inputs(),
                sizes.len()
            )));
        }
        if let Some(v) = q.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidGame(format!("input probability {v} is negative")));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > GAME_NORMALIZATION_TOL {
            return Err(Error::InvalidGame(format!(
                "input distribution sums to {total}, expected 1"
            )));
        }
        if let Some(v) = h.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidGame(format!("score {v} lies outside [0, 1]")));
        }
        Ok(Self { sizes, q, h })
    }

    pub fn sizes(&self) -> Alphabets {
        self.sizes
    }

    pub fn q(&self, a: usize, b: usize) -> f64 {
        self.q[a * self.sizes.b + b]
    }

    pub fn h(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.h[self.sizes.index(a, b, x, y)]
    }

    pub fn q_flat(&self) -> &[f64] {
        &self.q
    }

    pub fn h_flat(&self) -> &[f64] {
        &self.h
    }

    /// q(a) = Σ_b q(a, b).
    pub fn q_alice(&self, a: usize) -> f64 {
        (0..self.sizes.b).map(|b| self.q(a, b)).sum()
    }

    /// q(b) = Σ_a q(a, b).
    pub fn q_bob(&self, b: usize) -> f64 {
        (0..self.sizes.a).map(|a| self.q(a, b)).sum()
    }

    pub fn complete_support(&self) -> bool {
        self.q.iter().all(|&v| v > 0.0)
    }

    /// First input pair with zero probability, if any.
    pub fn require_complete_support(&self) -> Result<()> {
        for a in 0..self.sizes.a {
            for b in 0..self.sizes.b {
                let value = self.q(a, b);
                if value <= 0.0 {
                    return Err(Error::IncompleteSupport { a, b, value });
                }
            }
        }
        Ok(())
    }

    /// Whether q(a, b) = 1/(|A||B|) for all inputs.
    pub fn has_uniform_inputs(&self) -> bool {
        let u = 1.0 / self.sizes.inputs() as f64;
        self.q.iter().all(|&v| (v - u).abs() <= GAME_NORMALIZATION_TOL)
    }
}

/// Conditional output distribution `p[a][b][x][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    sizes: Alphabets,
    p: Vec<f64>,
}

impl Correlation {
    pub fn new(sizes: Alphabets, p: Vec<f64>) -> Result<Self> {
        if p.len() != sizes.len() {
            return Err(Error::Shape(format!(
                "correlation has {} entries, alphabets {:?} need {}",
                p.len(),
                sizes,
                sizes.len()
            )));
        }
        if let Some(v) = p
            .iter()
            .find(|v| !v.is_finite() || **v < -CORRELATION_NEGATIVITY_TOL)
        {
            return Err(Error::InvalidCorrelation(format!("entry {v} is negative")));
        }
        let c = Self { sizes, p };
        for a in 0..sizes.a {
            for b in 0..sizes.b {
                let total = c.block(a, b).iter().sum::<f64>();
                if (total - 1.0).abs() > CORRELATION_NORMALIZATION_TOL {
                    return Err(Error::InvalidCorrelation(format!(
                        "outputs for inputs ({a}, {b}) sum to {total}"
                    )));
                }
            }
        }
        Ok(c)
    }

    /// Correlation where Alice answers `alice[a]` and Bob answers `bob[b]` with certainty.
    pub fn deterministic(sizes: Alphabets, alice: &[usize], bob: &[usize]) -> Result<Self> {
        if alice.len() != sizes.a || bob.len() != sizes.b {
            return Err(Error::Shape("deterministic strategy length mismatch".into()));
        }
        if alice.iter().any(|&x| x >= sizes.x) || bob.iter().any(|&y| y >= sizes.y) {
            return Err(Error::Shape("deterministic answer out of range".into()));
        }
        let mut p = vec![0.0; sizes.len()];
        for a in 0..sizes.a {
            for b in 0..sizes.b {
                p[sizes.index(a, b, alice[a], bob[b])] = 1.0;
            }
        }
        Self::new(sizes, p)
    }

    pub fn sizes(&self) -> Alphabets {
        self.sizes
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.sizes.index(a, b, x, y)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    fn block(&self, a: usize, b: usize) -> &[f64] {
        let start = self.sizes.index(a, b, 0, 0);
        &self.p[start..start + self.sizes.x * self.sizes.y]
    }

    /// Σ_y p_ab^xy.
    pub fn alice_given(&self, a: usize, b: usize, x: usize) -> f64 {
        (0..self.sizes.y).map(|y| self.p(a, b, x, y)).sum()
    }

    /// Σ_x p_ab^xy.
    pub fn bob_given(&self, a: usize, b: usize, y: usize) -> f64 {
        (0..self.sizes.x).map(|x| self.p(a, b, x, y)).sum()
    }

    /// (1/(|A||B|)) Σ_abxy |p − p'|.
    pub fn average_l1_distance(&self, other: &Self) -> Result<f64> {
        if self.sizes != other.sizes {
            return Err(Error::Mismatch(format!(
                "correlations over {:?} and {:?}",
                self.sizes, other.sizes
            )));
        }
        let total: f64 = self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).sum();
        Ok(total / self.sizes.inputs() as f64)
    }
}

/// Expected score Σ_abxy q(a,b) H(a,b,x,y) p_ab^xy.
pub fn score(g: &Game, c: &Correlation) -> Result<f64> {
    if g.sizes != c.sizes {
        return Err(Error::Mismatch(format!(
            "game alphabets {:?} vs correlation alphabets {:?}",
            g.sizes, c.sizes
        )));
    }
    let s = g.sizes;
    let mut total = 0.0;
    for a in 0..s.a {
        for b in 0..s.b {
            let w = g.q(a, b);
            for x in 0..s.x {
                for y in 0..s.y {
                    let i = s.index(a, b, x, y);
                    total += w * g.h[i] * c.p[i];
                }
            }
        }
    }
    Ok(total)
}

/// One-party marginals, each averaged over the other party's input.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    /// `alice[a·|X| + x]` = p_a^x.
    pub alice: Vec<f64>,
    /// `bob[b·|Y| + y]` = p_b^y.
    pub bob: Vec<f64>,
}

impl Marginals {
    pub fn alice(&self, n_x: usize, a: usize, x: usize) -> f64 {
        self.alice[a * n_x + x]
    }

    pub fn bob(&self, n_y: usize, b: usize, y: usize) -> f64 {
        self.bob[b * n_y + y]
    }
}

pub fn marginals(c: &Correlation) -> Marginals {
    let s = c.sizes;
    let mut alice = vec![0.0; s.a * s.x];
    let mut bob = vec![0.0; s.b * s.y];
    for a in 0..s.a {
        for x in 0..s.x {
            let sum: f64 = (0..s.b).map(|b| c.alice_given(a, b, x)).sum();
            alice[a * s.x + x] = sum / s.b as f64;
        }
    }
    for b in 0..s.b {
        for y in 0..s.y {
            let sum: f64 = (0..s.a).map(|a| c.bob_given(a, b, y)).sum();
            bob[b * s.y + y] = sum / s.a as f64;
        }
    }
    Marginals { alice, bob }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonSignaling {
    pub holds: bool,
    pub max_violation: f64,
}

/// Checks that each party's marginal is independent of the other's input.
pub fn is_nonsignaling(c: &Correlation, tol: f64) -> NonSignaling {
    let s = c.sizes;
    let mut worst: f64 = 0.0;
    for a in 0..s.a {
        for x in 0..s.x {
            let reference = c.alice_given(a, 0, x);
            for b in 1..s.b {
                worst = worst.max((c.alice_given(a, b, x) - reference).abs());
            }
        }
    }
    for b in 0..s.b {
        for y in 0..s.y {
            let reference = c.bob_given(0, b, y);
            for a in 1..s.a {
                worst = worst.max((c.bob_given(a, b, y) - reference).abs());
            }
        }
    }
    // Pairwise differences are bounded by twice the deviation from the first
    // column; recompute exactly only when that could matter.
    if worst > tol / 2.0 {
        worst = exact_signaling(c);
    }
    NonSignaling {
        holds: worst <= tol,
        max_violation: worst,
    }
}

fn exact_signaling(c: &Correlation) -> f64 {
    let s = c.sizes;
    let mut worst: f64 = 0.0;
    for a in 0..s.a {
        for x in 0..s.x {
            let vals: Vec<f64> = (0..s.b).map(|b| c.alice_given(a, b, x)).collect();
            worst = worst.max(spread(&vals));
        }
    }
    for b in 0..s.b {
        for y in 0..s.y {
            let vals: Vec<f64> = (0..s.a).map(|a| c.bob_given(a, b, y)).collect();
            worst = worst.max(spread(&vals));
        }
    }
    worst
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Optimal deterministic strategy pair and its score.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalValue {
    pub value: f64,
    /// Alice's answer for each input.
    pub alice: Vec<usize>,
    /// Bob's answer for each input.
    pub bob: Vec<usize>,
}

/// Exact classical value by enumerating deterministic strategies.
///
/// For each Alice function the best Bob answer is chosen independently per
/// input `b`, taking the smallest answer among ties; Alice functions are
/// visited in lexicographic order and only a strict improvement replaces the
/// incumbent, so the returned pair is the lexicographically smallest maximizer.
pub fn classical_value(g: &Game) -> Result<ClassicalValue> {
    classical_value_with_budget(g, ENUMERATION_BUDGET)
}

pub fn classical_value_with_budget(g: &Game, budget: u128) -> Result<ClassicalValue> {
    let s = g.sizes;
    let required = checked_pow(s.x, s.a)
        .and_then(|fa| checked_pow(s.y, s.b).and_then(|fb| fa.checked_mul(fb)))
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::EnumerationBudget { required, budget });
    }
    let n_alice = checked_pow(s.x, s.a).unwrap_or(u128::MAX) as usize;

    let mut best: Option<ClassicalValue> = None;
    let mut alice = vec![0usize; s.a];
    let mut bob = vec![0usize; s.b];
    for f in 0..n_alice {
        decode(f, s.x, &mut alice);
        let mut value = 0.0;
        for (b, slot) in bob.iter_mut().enumerate() {
            let mut best_y = 0;
            let mut best_v = f64::NEG_INFINITY;
            for y in 0..s.y {
                let v: f64 = (0..s.a).map(|a| g.q(a, b) * g.h(a, b, alice[a], y)).sum();
                if v > best_v {
                    best_v = v;
                    best_y = y;
                }
            }
            *slot = best_y;
            value += best_v;
        }
        if best.as_ref().is_none_or(|cv| value > cv.value) {
            best = Some(ClassicalValue {
                value,
                alice: alice.clone(),
                bob: bob.clone(),
            });
        }
    }
    Ok(best.expect("at least one deterministic strategy"))
}

/// Writes the base-`radix` digits of `index` into `out`, most significant first.
fn decode(mut index: usize, radix: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base as u128))
}

/// CHSH: uniform inputs, win iff x ⊕ y = a ∧ b.
pub fn chsh() -> Game {
    let sizes = Alphabets::binary();
    let mut h = vec![0.0; sizes.len()];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if (x ^ y) == (a & b) {
                        h[sizes.index(a, b, x, y)] = 1.0;
                    }
                }
            }
        }
    }
    Game::new(sizes, vec![0.25; 4], h).expect("CHSH is a valid game")
}

/// The PR box: uniformly random outputs satisfying x ⊕ y = a ∧ b.
pub fn pr_box() -> Correlation {
    let sizes = Alphabets::binary();
    let mut p = vec![0.0; sizes.len()];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if (x ^ y) == (a & b) {
                        p[sizes.index(a, b, x, y)] = 0.5;
                    }
                }
            }
        }
    }
    Correlation::new(sizes, p).expect("PR box is a valid correlation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_game(value: f64) -> Game {
        let s = Alphabets::binary();
        Game::new(s, vec![0.25; 4], vec![value; s.len()]).unwrap()
    }

    #[test]
    fn chsh_basics() {
        let g = chsh();
        assert!(g.complete_support());
        assert!(g.has_uniform_inputs());
        assert_eq!(score(&g, &pr_box()).unwrap(), 1.0);
        let zeros = Correlation::deterministic(Alphabets::binary(), &[0, 0], &[0, 0]).unwrap();
        assert_eq!(score(&g, &zeros).unwrap(), 0.75);
    }

    #[test]
    fn chsh_classical_value_against_full_enumeration() {
        // Oracle: score every one of the 16 deterministic pairs directly.
        let g = chsh();
        let mut best = f64::NEG_INFINITY;
        for f in 0..4usize {
            for h in 0..4usize {
                let alice = [f >> 1 & 1, f & 1];
                let bob = [h >> 1 & 1, h & 1];
                let c = Correlation::deterministic(g.sizes(), &alice, &bob).unwrap();
                best = best.max(score(&g, &c).unwrap());
            }
        }
        assert_eq!(best, 0.75);
        let cv = classical_value(&g).unwrap();
        assert_eq!(cv.value, 0.75);
        // Lexicographically smallest maximizer is the all-zeros pair.
        assert_eq!((cv.alice, cv.bob), (vec![0, 0], vec![0, 0]));
    }

    #[test]
    fn constant_games() {
        assert_eq!(classical_value(&constant_game(1.0)).unwrap().value, 1.0);
        assert_eq!(classical_value(&constant_game(0.0)).unwrap().value, 0.0);
    }

    #[test]
    fn enumeration_budget() {
        let s = Alphabets::new(30, 1, 2, 2).unwrap();
        let mut q = vec![0.0; 30];
        q[0] = 1.0;
        let g = Game::new(s, q, vec![0.5; s.len()]).unwrap();
        assert!(matches!(
            classical_value(&g),
            Err(Error::EnumerationBudget { .. })
        ));
        assert!(!g.complete_support());
        assert!(matches!(
            g.require_complete_support(),
            Err(Error::IncompleteSupport { a: 1, b: 0, .. })
        ));
    }

    #[test]
    fn game_validation() {
        let s = Alphabets::binary();
        assert!(Game::new(s, vec![0.5, 0.5, 0.5, -0.5], vec![0.0; 16]).is_err());
        assert!(Game::new(s, vec![0.25; 4], vec![1.5; 16]).is_err());
        assert!(Game::new(s, vec![0.3; 4], vec![0.0; 16]).is_err());
        assert!(Game::new(s, vec![0.25; 3], vec![0.0; 16]).is_err());
        assert!(Alphabets::new(0, 1, 1, 1).is_err());
    }

    #[test]
    fn correlation_validation() {
        let s = Alphabets::binary();
        assert!(Correlation::new(s, vec![0.25; 16]).is_ok());
        assert!(Correlation::new(s, vec![0.3; 16]).is_err());
        let mut p = vec![0.25; 16];
        p[0] = -0.25;
        p[1] = 0.75;
        assert!(Correlation::new(s, p).is_err());
    }

    #[test]
    fn pr_box_marginals_uniform() {
        let m = marginals(&pr_box());
        assert!(m.alice.iter().chain(&m.bob).all(|&v| v == 0.5));
        let ns = is_nonsignaling(&pr_box(), 1e-9);
        assert!(ns.holds);
        assert_eq!(ns.max_violation, 0.0);
    }

    #[test]
    fn deterministic_marginals() {
        let c = Correlation::deterministic(Alphabets::binary(), &[0, 0], &[0, 0]).unwrap();
        let m = marginals(&c);
        assert_eq!(m.alice(2, 0, 0), 1.0);
        assert_eq!(m.alice(2, 1, 0), 1.0);
        assert_eq!(m.bob(2, 1, 1), 0.0);
    }

    #[test]
    fn product_correlation_marginals() {
        let s = Alphabets::new(2, 3, 2, 2).unwrap();
        let u = [[0.3, 0.7], [0.9, 0.1]];
        let v = [[0.5, 0.5], [0.2, 0.8], [1.0, 0.0]];
        let mut p = vec![0.0; s.len()];
        for a in 0..2 {
            for b in 0..3 {
                for x in 0..2 {
                    for y in 0..2 {
                        p[s.index(a, b, x, y)] = u[a][x] * v[b][y];
                    }
                }
            }
        }
        let m = marginals(&Correlation::new(s, p).unwrap());
        for a in 0..2 {
            for x in 0..2 {
                assert!((m.alice(2, a, x) - u[a][x]).abs() < 1e-15);
            }
        }
        for b in 0..3 {
            for y in 0..2 {
                assert!((m.bob(2, b, y) - v[b][y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn signaling_counterexample() {
        // Alice outputs b: her marginal flips with Bob's input.
        let s = Alphabets::binary();
        let mut p = vec![0.0; 16];
        for a in 0..2 {
            for b in 0..2 {
                p[s.index(a, b, b, 0)] = 1.0;
            }
        }
        let ns = is_nonsignaling(&Correlation::new(s, p).unwrap(), 1e-9);
        assert!(!ns.holds);
        assert_eq!(ns.max_violation, 1.0);
    }

    #[test]
    fn l1_distance() {
        let s = Alphabets::binary();
        let zeros = Correlation::deterministic(s, &[0, 0], &[0, 0]).unwrap();
        let ones = Correlation::deterministic(s, &[1, 1], &[1, 1]).unwrap();
        assert_eq!(zeros.average_l1_distance(&ones).unwrap(), 2.0);
        assert_eq!(zeros.average_l1_distance(&zeros).unwrap(), 0.0);
    }
}
