//! Integer arithmetic over Z_N: gcd, factorization, divisors, modular products.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{domain, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    let g = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    a / g * b
}

/// `a * b mod n` without overflow for any `u64` operands.
#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

/// Prime factorization of a positive integer, stored as prime -> exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    value: u64,
    exponents: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn exponents(&self) -> &BTreeMap<u64, u32> {
        &self.exponents
    }

    /// Exponent of `p` in the factorization; zero when `p` does not divide the value.
    pub fn exponent(&self, p: u64) -> u32 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    pub fn is_prime(&self) -> bool {
        self.exponents.len() == 1 && self.exponents.values().all(|&e| e == 1)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn divisor_count(&self) -> usize {
        self.exponents.values().map(|&e| e as usize + 1).product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for (&p, &e) in &self.exponents {
            let base = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(base.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.exponents {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Trial-division factorization. Interleaver lengths are small, so this is
/// plenty fast.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return domain(format!("cannot factorize {n}: need n >= 2"));
    }
    let mut exponents = BTreeMap::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        while rest % p == 0 {
            *exponents.entry(p).or_insert(0) += 1;
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        *exponents.entry(rest).or_insert(0) += 1;
    }
    Ok(Factorization { value: n, exponents })
}

/// Divisors of `n` (n >= 1) in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![1];
    }
    factorize(n).map(|f| f.divisors()).unwrap_or_default()
}
