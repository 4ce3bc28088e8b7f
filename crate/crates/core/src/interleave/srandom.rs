use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Interleaver;
use crate::error::{domain, Error, Result};

/// True when every pair of inputs at most `s` apart maps at least `s` apart.
pub fn satisfies_s_constraint(pi: &Interleaver, s: usize) -> bool {
    let n = pi.len();
    (0..n).all(|i| {
        (i + 1..n.min(i + s + 1)).all(|k| pi.get(i).abs_diff(pi.get(k)) >= s)
    })
}

/// S-random interleaver by sequential draw-and-test.
///
/// Each position takes the first value from a shuffled pool of unused values
/// that lies at least `s` away from the previous `s` placed values. A dead
/// end reshuffles and restarts; after `max_attempts` restarts construction
/// fails. Deterministic given `seed`.
pub fn generate_s_random(n: usize, s: usize, seed: u64, max_attempts: usize) -> Result<Interleaver> {
    if n == 0 {
        return domain("interleaver length must be positive");
    }
    if max_attempts == 0 {
        return domain("max_attempts must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut placed: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..max_attempts {
        pool.clear();
        pool.extend(0..n);
        pool.shuffle(&mut rng);
        placed.clear();
        while !pool.is_empty() {
            let lo = placed.len().saturating_sub(s);
            let recent = &placed[lo..];
            let pick = pool
                .iter()
                .position(|&c| recent.iter().all(|&p| p.abs_diff(c) >= s));
            match pick {
                Some(idx) => placed.push(pool.swap_remove(idx)),
                None => break,
            }
        }
        if placed.len() == n {
            return Interleaver::new(std::mem::take(&mut placed));
        }
    }
    Err(Error::ConstructionFailed {
        attempts: max_attempts,
    })
}
