//! Polynomials over the integer ring Z_N without constant term, and the
//! permutation-polynomial machinery built on them.
//!
//! A [`PolySpec`] stores `f(x) = f_1 x + f_2 x^2 + ... + f_K x^K (mod N)`.
//! Quadratic polynomials get a closed-form permutation test
//! ([`is_quadratic_pp`]); every other degree is tested by materializing the
//! map ([`is_pp_general`]). Permutation polynomials over Z_N form a finite
//! group under composition, which is how [`inverse`] finds the deinterleaver.

use std::fmt;

use serde::Serialize;

use crate::arith::{add_mod, factorize, gcd, lcm, mul_mod, Factorization};
use crate::error::{domain, Error, Result};
use crate::interleave::Interleaver;

/// Composition refuses to build polynomials with more terms than this.
pub const MAX_COMPOSE_DEGREE: usize = 1024;

/// Quadratic inverse search is only attempted up to this modulus.
pub const QUADRATIC_SEARCH_LIMIT: u64 = 1 << 20;

/// Coefficients `(f_1, ..., f_K)` of a polynomial over Z_N with no constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PolySpec {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl PolySpec {
    /// Builds a polynomial from `(f_1, ..., f_K)`. Every coefficient must
    /// already be reduced below the modulus.
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Result<Self> {
        if modulus < 2 {
            return domain(format!("modulus {modulus} must be >= 2"));
        }
        if coeffs.is_empty() {
            return domain("polynomial needs at least one coefficient");
        }
        if let Some((i, c)) = coeffs.iter().enumerate().find(|(_, &c)| c >= modulus) {
            return domain(format!(
                "coefficient f_{} = {c} out of range for modulus {modulus}",
                i + 1
            ));
        }
        Ok(Self { modulus, coeffs })
    }

    /// Like [`PolySpec::new`] but reduces coefficients mod N first.
    pub fn reduced(modulus: u64, coeffs: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus < 2 {
            return domain(format!("modulus {modulus} must be >= 2"));
        }
        Self::new(modulus, coeffs.into_iter().map(|c| c % modulus).collect())
    }

    pub fn quadratic(modulus: u64, f1: u64, f2: u64) -> Result<Self> {
        Self::new(modulus, vec![f1, f2])
    }

    pub fn linear(modulus: u64, f1: u64) -> Result<Self> {
        Self::new(modulus, vec![f1])
    }

    pub fn identity(modulus: u64) -> Result<Self> {
        Self::new(modulus, vec![1])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `(f_1, ..., f_K)`; index 0 holds the linear coefficient.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero for `i == 0` or beyond the declared degree).
    pub fn coeff(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.coeffs.get(i - 1).copied().unwrap_or(0)
        }
    }

    pub fn declared_degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the highest non-zero coefficient, or 0 for the zero polynomial.
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1)
    }

    /// Drops trailing zero coefficients (keeping at least one).
    pub fn trimmed(&self) -> Self {
        let deg = self.effective_degree().max(1);
        Self {
            modulus: self.modulus,
            coeffs: self.coeffs[..deg].to_vec(),
        }
    }

    /// Returns `(f_1, f_2)` when the effective degree is at most two.
    pub fn as_quadratic(&self) -> Option<(u64, u64)> {
        (self.effective_degree() <= 2).then(|| (self.coeff(1), self.coeff(2)))
    }

    /// Evaluation without range checking; `x` may be any integer.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: u64) -> u64 {
        let n = self.modulus;
        let x = x % n;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = mul_mod(add_mod(acc, c, n), x, n);
        }
        acc
    }
}

impl fmt::Display for PolySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            wrote = true;
            match i + 1 {
                1 => write!(f, "{c}x")?,
                k => write!(f, "{c}x^{k}")?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " (mod {})", self.modulus)
    }
}

/// `f(x) mod N` for `0 <= x < N`.
pub fn evaluate(spec: &PolySpec, x: u64) -> Result<u64> {
    if x >= spec.modulus {
        return domain(format!("x = {x} out of range for modulus {}", spec.modulus));
    }
    Ok(spec.eval_unchecked(x))
}

/// Which branch of the quadratic permutation criterion applies to a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParityCase {
    /// N odd or divisible by 4.
    Case1,
    /// N even but not divisible by 4.
    Case2,
}

impl ParityCase {
    pub fn of(factorization: &Factorization) -> Self {
        if factorization.exponent(2) == 1 {
            ParityCase::Case2
        } else {
            ParityCase::Case1
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ParityCase::Case1 => 1,
            ParityCase::Case2 => 2,
        }
    }
}

/// Closed-form test whether `f1 x + f2 x^2 (mod N)` permutes Z_N.
///
/// `f2 = 0` falls out of the same conditions as the linear test
/// `gcd(f1, N) = 1`, since every prime divides zero.
pub fn is_quadratic_pp(n: u64, f1: u64, f2: u64) -> Result<bool> {
    if n < 2 {
        return domain(format!("modulus {n} must be >= 2"));
    }
    if f1 >= n || f2 >= n {
        return domain(format!("coefficients ({f1}, {f2}) out of range for modulus {n}"));
    }
    let fact = factorize(n)?;
    Ok(quadratic_pp_with(&fact, f1, f2))
}

/// [`is_quadratic_pp`] against a precomputed factorization of N.
pub fn quadratic_pp_with(fact: &Factorization, f1: u64, f2: u64) -> bool {
    let n = fact.value();
    match ParityCase::of(fact) {
        ParityCase::Case1 => gcd(f1, n) == 1 && fact.primes().all(|p| f2 % p == 0),
        ParityCase::Case2 => {
            (f1 + f2) % 2 == 1
                && gcd(f1, n / 2) == 1
                && fact.primes().filter(|&p| p != 2).all(|p| f2 % p == 0)
        }
    }
}

/// Exhaustive permutation test: evaluates `f` on all of Z_N.
pub fn is_pp_general(spec: &PolySpec) -> bool {
    first_collision(spec).is_none()
}

fn first_collision(spec: &PolySpec) -> Option<(u64, u64, u64)> {
    let n = spec.modulus as usize;
    let mut owner = vec![u64::MAX; n];
    for x in 0..spec.modulus {
        let y = spec.eval_unchecked(x);
        let slot = &mut owner[y as usize];
        if *slot != u64::MAX {
            return Some((*slot, x, y));
        }
        *slot = x;
    }
    None
}

/// Materializes `pi[x] = f(x)` for all `x`, rejecting non-permutations.
pub fn materialize(spec: &PolySpec) -> Result<Interleaver> {
    if let Some((first, second, value)) = first_collision(spec) {
        return Err(Error::NotPermutation { first, second, value });
    }
    let map = (0..spec.modulus)
        .map(|x| spec.eval_unchecked(x) as usize)
        .collect();
    Interleaver::new(map)
}

// Polynomials below are dense coefficient vectors with index = power,
// including the (always zero) constant term.

fn poly_mul(a: &[u64], b: &[u64], n: u64) -> Vec<u64> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let n128 = n as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % n128;
            }
        }
    }
    let mut out: Vec<u64> = out.into_iter().map(|c| c as u64).collect();
    trim_dense(&mut out);
    out
}

fn trim_dense(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn dense(spec: &PolySpec) -> Vec<u64> {
    let mut d = Vec::with_capacity(spec.coeffs.len() + 1);
    d.push(0);
    d.extend_from_slice(&spec.coeffs);
    trim_dense(&mut d);
    d
}

fn from_dense(modulus: u64, mut d: Vec<u64>) -> PolySpec {
    trim_dense(&mut d);
    let coeffs = if d.len() <= 1 { vec![0] } else { d.split_off(1) };
    PolySpec { modulus, coeffs }
}

/// Coefficients of `a(b(x)) mod N`.
///
/// Coefficients are reduced mod N and trailing zeros dropped; powers of
/// `x` are never folded together, so only functional equality with the
/// composite map is guaranteed.
pub fn compose(a: &PolySpec, b: &PolySpec) -> Result<PolySpec> {
    if a.modulus != b.modulus {
        return domain(format!(
            "modulus mismatch: {} vs {}",
            a.modulus, b.modulus
        ));
    }
    let n = a.modulus;
    let a_dense = dense(a);
    let b_dense = dense(b);
    let bound = (a_dense.len() - 1) * (b_dense.len() - 1);
    if bound > MAX_COMPOSE_DEGREE {
        return Err(Error::DegreeLimit {
            degree: bound,
            limit: MAX_COMPOSE_DEGREE,
        });
    }
    // Horner in the outer polynomial: ((a_K b + a_{K-1}) b + ...) b + a_0.
    let mut acc = vec![*a_dense.last().unwrap()];
    for &c in a_dense.iter().rev().skip(1) {
        acc = poly_mul(&acc, &b_dense, n);
        acc[0] = add_mod(acc[0], c, n);
    }
    Ok(from_dense(n, acc))
}

/// Order of the permutation in the symmetric group (lcm of its cycle lengths).
pub fn permutation_order(pi: &Interleaver) -> u128 {
    let n = pi.len();
    let mut seen = vec![false; n];
    let mut order = 1u128;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u128;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = pi.get(x);
            len += 1;
        }
        order = lcm(order, len);
    }
    order
}

/// `f` composed with itself `k >= 1` times, by repeated squaring.
pub fn compose_power(f: &PolySpec, mut k: u128) -> Result<PolySpec> {
    if k == 0 {
        return PolySpec::identity(f.modulus);
    }
    let mut result: Option<PolySpec> = None;
    let mut base = f.trimmed();
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => compose(&r, &base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = compose(&base, &base)?;
    }
    Ok(result.expect("k >= 1"))
}

/// The inverse obtained purely from the group structure: `f` composed with
/// itself `ord(f) - 1` times. May have higher degree than `f`.
pub fn inverse_by_composition(spec: &PolySpec) -> Result<PolySpec> {
    let pi = materialize(spec).map_err(not_pp)?;
    let order = permutation_order(&pi);
    let g = if order == 1 {
        spec.trimmed()
    } else {
        compose_power(spec, order - 1)?
    };
    debug_assert!((0..spec.modulus).all(|x| g.eval_unchecked(pi.get(x as usize) as u64) == x));
    Ok(g)
}

fn not_pp(e: Error) -> Error {
    match e {
        Error::NotPermutation { first, second, value } => Error::Domain(format!(
            "not a permutation polynomial: f({first}) = f({second}) = {value}"
        )),
        other => other,
    }
}

/// Every `(g1, g2)` with `g(f(x)) = x` on all of Z_N, where
/// `g(y) = g1 y + g2 y^2`, sorted by `(g2, g1)`.
pub fn quadratic_inverses(spec: &PolySpec) -> Result<Vec<(u64, u64)>> {
    let n = spec.modulus;
    if n > QUADRATIC_SEARCH_LIMIT {
        return domain(format!("modulus {n} exceeds quadratic search limit"));
    }
    let pi = materialize(spec).map_err(not_pp)?;
    let inv = pi.inverse();
    let is_inverse = |g1: u64, g2: u64| {
        (0..n as usize).all(|x| {
            let y = pi.get(x) as u64;
            add_mod(mul_mod(g1, y, n), mul_mod(g2, mul_mod(y, y, n), n), n) == x as u64
        })
    };
    let mut found = Vec::new();
    if n < 3 {
        for g2 in 0..n {
            for g1 in 0..n {
                if is_inverse(g1, g2) {
                    found.push((g1, g2));
                }
            }
        }
        return Ok(found);
    }
    // g(1) = g1 + g2 and g(2) = 2 g1 + 4 g2 pin g2 up to 2 g2 ≡ c.
    let at1 = inv.get(1) as u64;
    let at2 = inv.get(2) as u64;
    let c = (at2 + 2 * n - 2 * at1) % n;
    for g2 in 0..n {
        if (2 * g2) % n != c {
            continue;
        }
        let g1 = (at1 + n - g2) % n;
        if is_inverse(g1, g2) {
            found.push((g1, g2));
        }
    }
    Ok(found)
}

/// Inverse permutation polynomial, preferring the lowest-degree form.
///
/// The group-composition inverse is always computed. When the modulus
/// permits, a linear or quadratic functional match is returned instead
/// (smallest `g2` first).
pub fn inverse(spec: &PolySpec) -> Result<PolySpec> {
    let composite = match inverse_by_composition(spec) {
        Ok(g) => Some(g),
        Err(Error::DegreeLimit { .. }) => None,
        Err(e) => return Err(e),
    };
    if spec.modulus <= QUADRATIC_SEARCH_LIMIT {
        if let Some(&(g1, g2)) = quadratic_inverses(spec)?.first() {
            return PolySpec::quadratic(spec.modulus, g1, g2).map(|g| g.trimmed());
        }
    }
    match composite {
        Some(g) => Ok(g),
        None => inverse_via_odd_half(spec),
    }
}

/// For `N = 2M` with `M` odd, every polynomial function on Z_2 is linear, so
/// an inverse over Z_M lifts to Z_N by fixing each coefficient's parity:
/// odd for `x`, even above.
fn inverse_via_odd_half(spec: &PolySpec) -> Result<PolySpec> {
    let n = spec.modulus;
    if n % 4 != 2 || n < 6 {
        return Err(Error::Domain(
            "inverse exceeds the composition degree limit and has no quadratic form".into(),
        ));
    }
    let m = n / 2;
    let half = PolySpec::reduced(m, spec.coeffs().iter().copied())?;
    let g = inverse_by_composition(&half)?;
    let coeffs = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| if c % 2 == u64::from(i == 0) { c } else { c + m })
        .collect();
    Ok(PolySpec::new(n, coeffs)?.trimmed())
}

/// Number of quadratic permutation polynomials with `f2 != 0`.
pub fn count_quadratic_pps(n: u64) -> Result<u64> {
    let fact = factorize(n)?;
    let case = ParityCase::of(&fact);
    // f1 constraint and f2 constraint are independent apart from the
    // parity coupling in case 2, so count each side split by parity.
    let (f1_mod, f2_step) = match case {
        ParityCase::Case1 => (n, fact.radical()),
        ParityCase::Case2 => (n / 2, fact.radical() / 2),
    };
    let mut f1_parity = [0u64; 2];
    for f1 in 0..n {
        if gcd(f1, f1_mod) == 1 {
            f1_parity[(f1 % 2) as usize] += 1;
        }
    }
    let mut f2_parity = [0u64; 2];
    let mut f2 = f2_step;
    while f2 < n {
        f2_parity[(f2 % 2) as usize] += 1;
        f2 += f2_step;
    }
    Ok(match case {
        ParityCase::Case1 => (f1_parity[0] + f1_parity[1]) * (f2_parity[0] + f2_parity[1]),
        ParityCase::Case2 => f1_parity[0] * f2_parity[1] + f1_parity[1] * f2_parity[0],
    })
}

/// All `(f1, f2)` quadratic permutation pairs with `f2 != 0`, ordered by
/// `f2` then `f1`.
pub fn enumerate_quadratic_pps(n: u64) -> Result<impl Iterator<Item = (u64, u64)>> {
    let fact = factorize(n)?;
    Ok((1..n).flat_map(move |f2| {
        let fact = fact.clone();
        (0..n)
            .filter(move |&f1| quadratic_pp_with(&fact, f1, f2))
            .map(move |f1| (f1, f2))
    }))
}
