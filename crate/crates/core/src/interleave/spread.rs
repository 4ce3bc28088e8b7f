use rayon::prelude::*;

use super::Interleaver;

#[inline]
fn pair_spread(pi: &Interleaver, i: usize, j: usize) -> usize {
    j.abs_diff(i) + pi.get(j).abs_diff(pi.get(i))
}

/// Spread factor `D = min_{i != j} |i - j| + |pi(i) - pi(j)|`.
///
/// Pairs with `|i - j| >= D` cannot lower the minimum, so the inner scan
/// stops at the current best distance.
pub fn spread_factor(pi: &Interleaver) -> usize {
    let n = pi.len();
    let mut best = usize::MAX;
    for i in 0..n {
        let end = n.min(i.saturating_add(best));
        for j in i + 1..end {
            let d = pair_spread(pi, i, j);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// All-pairs reference for [`spread_factor`]. O(N^2), split across threads.
pub fn spread_factor_exhaustive(pi: &Interleaver) -> usize {
    let n = pi.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| pair_spread(pi, i, j))
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(usize::MAX)
}

/// Upper bound `sqrt(2N)` on the spread factor of any length-N interleaver.
pub fn spread_upper_bound(n: usize) -> f64 {
    (2.0 * n as f64).sqrt()
}
