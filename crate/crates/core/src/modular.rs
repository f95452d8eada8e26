//! Integer arithmetic modulo squarefree moduli.
//!
//! Factorization is trial division up to 2^24 followed by a deterministic
//! Miller-Rabin check on the cofactor, which settles every modulus below
//! 2^48. Products go through 128-bit intermediates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`factor_squarefree`].
pub const MAX_MODULUS: u64 = 1 << 48;
const TRIAL_LIMIT: u64 = 1 << 24;

/// A squarefree integer `q >= 2` together with its distinct prime factors in
/// increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquarefreeModulus {
    q: u64,
    primes: Vec<u64>,
}

impl SquarefreeModulus {
    pub fn new(q: u64) -> Result<Self> {
        factor_squarefree(q)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    pub fn euler_phi(&self) -> u64 {
        self.primes.iter().map(|p| p - 1).product()
    }

    pub fn is_unit(&self, n: i64) -> bool {
        gcd(n.unsigned_abs(), self.q) == 1
    }
}

/// CRT coordinates `residues[j] = n mod p_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueVector(pub Vec<u64>);

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` with multiplicities, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn factor_squarefree(q: u64) -> Result<SquarefreeModulus> {
    if q < 2 {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: q,
            limit: MAX_MODULUS,
        });
    }
    if q > MAX_MODULUS {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: q,
            limit: MAX_MODULUS,
        });
    }
    let mut primes = Vec::new();
    let mut rest = q;
    let mut p = 2u64;
    while p < TRIAL_LIMIT && p * p <= rest {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return Err(Error::NotSquarefree(q, p));
            }
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        // Below 2^48 a cofactor free of primes < 2^24 is itself prime.
        debug_assert!(is_prime(rest));
        if primes.last() == Some(&rest) {
            return Err(Error::NotSquarefree(q, rest));
        }
        primes.push(rest);
    }
    Ok(SquarefreeModulus { q, primes })
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 2 && factor_squarefree(n).is_ok()
}

pub fn crt_split(n: i64, m: &SquarefreeModulus) -> ResidueVector {
    ResidueVector(
        m.primes
            .iter()
            .map(|&p| n.rem_euclid(p as i64) as u64)
            .collect(),
    )
}

/// Inverse of [`crt_split`]: the unique `n` in `[0, q)` with the given residues.
pub fn crt_combine(r: &ResidueVector, m: &SquarefreeModulus) -> u64 {
    let q = m.q;
    let mut acc = 0u64;
    for (&res, &p) in r.0.iter().zip(&m.primes) {
        let cofactor = q / p;
        let inv = mod_inverse((cofactor % p) as i64, p).expect("distinct primes are coprime");
        let term = mod_mul(mod_mul(res % p, inv, p), cofactor, q);
        acc = (acc + term) % q;
    }
    acc
}

/// `a^{-1} mod m` in `[1, m)` (or `0` when `m = 1`).
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::NotInvertible(a.unsigned_abs(), m));
    }
    let a_red = a.rem_euclid(m as i64) as i128;
    let (mut old_r, mut r) = (a_red, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible(a_red as u64, m));
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Number of divisors of a squarefree modulus, `2^k`.
pub fn divisor_count(m: &SquarefreeModulus) -> u64 {
    1u64 << m.primes.len()
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert_eq!(factor_squarefree(30).unwrap().primes(), &[2, 3, 5]);
        assert_eq!(factor_squarefree(7).unwrap().primes(), &[7]);
        assert_eq!(factor_squarefree(12), Err(Error::NotSquarefree(12, 2)));
        assert!(matches!(factor_squarefree(1), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            factor_squarefree(MAX_MODULUS + 1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn large_prime_cofactor() {
        // 2^31 - 1 is prime; the product with 3 is squarefree.
        let m = factor_squarefree(3 * 2147483647).unwrap();
        assert_eq!(m.primes(), &[3, 2147483647]);
        let big = 1_000_003u64 * 1_000_003;
        assert_eq!(factor_squarefree(big), Err(Error::NotSquarefree(big, 1_000_003)));
    }

    #[test]
    fn crt_examples() {
        let m = factor_squarefree(30).unwrap();
        assert_eq!(crt_split(23, &m), ResidueVector(vec![1, 2, 3]));
        assert_eq!(crt_split(0, &m), ResidueVector(vec![0, 0, 0]));
        assert_eq!(crt_combine(&ResidueVector(vec![1, 2, 3]), &m), 23);
        assert_eq!(crt_split(-7, &m), crt_split(23, &m));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7), Ok(5));
        assert_eq!(mod_inverse(1, 11), Ok(1));
        assert_eq!(mod_inverse(2, 4), Err(Error::NotInvertible(2, 4)));
        assert_eq!(mod_inverse(-1, 7), Ok(6));
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(&factor_squarefree(30).unwrap()), 8);
        assert_eq!(divisor_count(&factor_squarefree(7).unwrap()), 2);
        assert_eq!(divisor_count(&factor_squarefree(210).unwrap()), 16);
    }

    #[test]
    fn crt_roundtrip_exhaustive() {
        for q in 2..=10_000u64 {
            let Ok(m) = factor_squarefree(q) else { continue };
            for n in 0..q {
                assert_eq!(crt_combine(&crt_split(n as i64, &m), &m), n);
            }
        }
    }

    #[test]
    fn inverse_exhaustive() {
        for m in 2..=1000u64 {
            for a in 1..m {
                if gcd(a, m) == 1 {
                    let inv = mod_inverse(a as i64, m).unwrap();
                    assert!((1..m).contains(&inv));
                    assert_eq!(mod_mul(a, inv, m), 1);
                } else {
                    assert!(mod_inverse(a as i64, m).is_err());
                }
            }
        }
    }

    #[test]
    fn squarefree_rejection_exhaustive() {
        for q in 2..=10_000u64 {
            let has_square = (2..=100u64).any(|p| q % (p * p) == 0);
            assert_eq!(factor_squarefree(q).is_ok(), !has_square, "q = {q}");
        }
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(20_000);
        let from_mr: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, from_mr);
    }
}
