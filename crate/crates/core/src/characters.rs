//! Dirichlet characters modulo primes and squarefree composites.
//!
//! A character mod `p` is stored as a discrete-log table for the smallest
//! primitive root `g` together with an index `t`, so that
//! `chi(n) = exp(2 pi i t log_g(n) / (p - 1))`. Characters mod squarefree `q`
//! are products of one such component per prime factor.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modular::{factorize, gcd, is_prime, lcm, mod_pow, SquarefreeModulus};

pub const MAX_CHARACTER_PRIME: u64 = 1 << 24;
pub const MAX_ENUMERATION_MODULUS: u64 = 100_000;

/// Sentinel stored in log tables at residue 0.
pub const NO_LOG: u32 = u32::MAX;

/// `exp(2 pi i num / den)`, reducing the fraction exactly before going to floats.
#[inline]
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let k = num % den;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * k == den {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * k == den {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * den {
        return Complex64::new(0.0, -1.0);
    }
    let x = if 2 * k > den {
        -((den - k) as f64) / den as f64
    } else {
        k as f64 / den as f64
    };
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `exp(2 pi i x)` for real `x`, reduced to `[-1/2, 1/2)` first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let y = x - x.round();
    let (s, c) = (std::f64::consts::TAU * y).sin_cos();
    Complex64::new(c, s)
}

pub fn find_primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_CHARACTER_PRIME {
        return Err(Error::OutOfRange {
            what: "character prime",
            value: p,
            limit: MAX_CHARACTER_PRIME,
        });
    }
    if p == 2 {
        return Ok(1);
    }
    let order = p - 1;
    let factors = factorize(order);
    (2..p)
        .find(|&g| factors.iter().all(|&(l, _)| mod_pow(g, order / l, p) != 1))
        .ok_or(Error::NotPrime(p))
}

#[derive(Debug)]
struct LogTable {
    p: u64,
    g: u64,
    logs: Vec<u32>,
}

impl LogTable {
    fn build(p: u64) -> Result<Arc<Self>> {
        let g = find_primitive_root(p)?;
        let mut logs = vec![NO_LOG; p as usize];
        let mut x = 1u64;
        for k in 0..(p - 1) {
            logs[x as usize] = k as u32;
            x = x * g % p;
        }
        Ok(Arc::new(LogTable { p, g, logs }))
    }
}

/// A multiplicative character modulo a prime.
#[derive(Debug, Clone)]
pub struct PrimeCharacter {
    table: Arc<LogTable>,
    t: u64,
}

impl Serialize for PrimeCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PrimeCharacter", 3)?;
        st.serialize_field("p", &self.table.p)?;
        st.serialize_field("g", &self.table.g)?;
        st.serialize_field("t", &self.t)?;
        st.end()
    }
}

impl PartialEq for PrimeCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.table.p == other.table.p && self.t == other.t
    }
}

impl PrimeCharacter {
    pub fn p(&self) -> u64 {
        self.table.p
    }

    /// The primitive root the log table is built on.
    pub fn g(&self) -> u64 {
        self.table.g
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Order of the unit group, `p - 1`.
    pub fn group_order(&self) -> u64 {
        self.table.p - 1
    }

    pub fn is_principal(&self) -> bool {
        self.t == 0
    }

    /// Order of the character, `(p - 1) / gcd(t, p - 1)`.
    pub fn order(&self) -> u64 {
        let m = self.group_order();
        m / gcd(self.t, m)
    }

    /// Log table indexed by residue; [`NO_LOG`] at 0.
    pub fn logs(&self) -> &[u32] {
        &self.table.logs
    }

    #[inline]
    pub fn log(&self, n: i64) -> Option<u64> {
        let r = n.rem_euclid(self.table.p as i64) as usize;
        match self.table.logs[r] {
            NO_LOG => None,
            k => Some(k as u64),
        }
    }

    /// `chi(g^e)`.
    #[inline]
    pub fn value_at_log(&self, e: u64) -> Complex64 {
        let m = self.group_order();
        unit_root((self.t % m) * (e % m) % m, m)
    }

    #[inline]
    pub fn value(&self, n: i64) -> Complex64 {
        match self.log(n) {
            Some(k) => self.value_at_log(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// The character with index `t` sharing this log table.
    pub fn with_index(&self, t: u64) -> Result<Self> {
        if t >= self.group_order() {
            return Err(Error::IndexOutOfRange {
                index: t,
                modulus: self.p(),
            });
        }
        Ok(PrimeCharacter {
            table: self.table.clone(),
            t,
        })
    }
}

pub fn build_prime_character(p: u64, t: u64) -> Result<PrimeCharacter> {
    let table = LogTable::build(p)?;
    if t >= p - 1 {
        return Err(Error::IndexOutOfRange { index: t, modulus: p });
    }
    Ok(PrimeCharacter { table, t })
}

/// A character modulo a squarefree integer, as a product of prime components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletCharacter {
    modulus: SquarefreeModulus,
    components: Vec<PrimeCharacter>,
}

impl DirichletCharacter {
    pub fn from_components(components: Vec<PrimeCharacter>) -> Result<Self> {
        let q = components
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.p()))
            .ok_or(Error::Overflow("character modulus"))?;
        let modulus = SquarefreeModulus::new(q)?;
        let mut components = components;
        components.sort_by_key(|c| c.p());
        Ok(DirichletCharacter {
            modulus,
            components,
        })
    }

    pub fn modulus(&self) -> &SquarefreeModulus {
        &self.modulus
    }

    pub fn q(&self) -> u64 {
        self.modulus.q()
    }

    pub fn components(&self) -> &[PrimeCharacter] {
        &self.components
    }

    pub fn indices(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.t).collect()
    }

    /// Primitive iff every component is non-principal.
    pub fn is_primitive(&self) -> bool {
        self.components.iter().all(|c| !c.is_principal())
    }

    pub fn is_principal(&self) -> bool {
        self.components.iter().all(|c| c.is_principal())
    }

    /// Least `k` with `chi^k` principal.
    pub fn order(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| lcm(acc, c.order()))
    }

    /// Per-component discrete logs of `n`, or `None` when `gcd(n, q) > 1`.
    pub fn logs_of(&self, n: i64) -> Option<Vec<u64>> {
        self.components.iter().map(|c| c.log(n)).collect()
    }

    /// `chi` evaluated from per-component exponents `e_j` (taken mod `p_j - 1`).
    pub fn value_at_logs(&self, exps: &[u64]) -> Complex64 {
        if self.components.len() == 1 {
            return self.components[0].value_at_log(exps[0]);
        }
        let mut frac = 0.0f64;
        for (c, &e) in self.components.iter().zip(exps) {
            let m = c.group_order();
            frac += ((c.t % m) * (e % m) % m) as f64 / m as f64;
        }
        crate::characters::e(frac)
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.logs_of(n) {
            Some(exps) => self.value_at_logs(&exps),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// All values on `[0, q)`.
    pub fn table(&self) -> Vec<Complex64> {
        (0..self.q() as i64).map(|n| self.value(n)).collect()
    }
}

pub fn char_eval(chi: &DirichletCharacter, n: i64) -> Complex64 {
    chi.value(n)
}

pub fn crt_character(m: &SquarefreeModulus, indices: &[u64]) -> Result<DirichletCharacter> {
    if indices.len() != m.omega() {
        return Err(Error::ArityMismatch {
            expected: m.omega(),
            got: indices.len(),
        });
    }
    let components = m
        .primes()
        .iter()
        .zip(indices)
        .map(|(&p, &t)| build_prime_character(p, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DirichletCharacter {
        modulus: m.clone(),
        components,
    })
}

/// Every primitive character mod `q`, in lexicographic order of index tuples.
/// Empty when `2 | q`.
pub fn enumerate_primitive_characters(m: &SquarefreeModulus) -> Result<Vec<DirichletCharacter>> {
    if m.q() > MAX_ENUMERATION_MODULUS {
        return Err(Error::TooLarge(format!(
            "character enumeration modulus {}",
            m.q()
        )));
    }
    if m.primes().contains(&2) {
        return Ok(Vec::new());
    }
    let bases = m
        .primes()
        .iter()
        .map(|&p| build_prime_character(p, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut idx: Vec<u64> = vec![1; bases.len()];
    loop {
        let components = bases
            .iter()
            .zip(&idx)
            .map(|(b, &t)| b.with_index(t))
            .collect::<Result<Vec<_>>>()?;
        out.push(DirichletCharacter {
            modulus: m.clone(),
            components,
        });
        // odometer over t_j in [1, p_j - 1)
        let mut j = bases.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < bases[j].group_order() {
                break;
            }
            idx[j] = 1;
        }
    }
}

/// One non-principal character mod `p` for each possible order `m > 1`
/// (`m | p - 1`), namely the one with index `(p - 1) / m`.
pub fn characters_by_order(p: u64) -> Result<Vec<PrimeCharacter>> {
    let base = build_prime_character(p, 0)?;
    let n = p - 1;
    (2..=n)
        .filter(|m| n.is_multiple_of(*m))
        .map(|m| base.with_index(n / m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::factor_squarefree;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(find_primitive_root(5), Ok(2));
        assert_eq!(find_primitive_root(7), Ok(3));
        assert_eq!(find_primitive_root(2), Ok(1));
        assert_eq!(find_primitive_root(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn primitive_root_is_smallest_by_brute_force() {
        for p in crate::modular::primes_up_to(400).into_iter().skip(1) {
            let brute = (2..p)
                .find(|&g| {
                    let mut x = 1;
                    (1..p).filter(|_| {
                        x = x * g % p;
                        x == 1
                    })
                    .count()
                        == 1
                })
                .unwrap();
            assert_eq!(find_primitive_root(p).unwrap(), brute, "p = {p}");
        }
    }

    #[test]
    fn legendre_mod_5() {
        let chi = build_prime_character(5, 2).unwrap();
        let squares: Vec<i64> = (1..5).map(|x: i64| x * x % 5).collect();
        for n in 1..5 {
            let expected = if squares.contains(&n) { 1.0 } else { -1.0 };
            assert!(close(chi.value(n), Complex64::new(expected, 0.0)), "n = {n}");
        }
        assert_eq!(chi.value(0), Complex64::new(0.0, 0.0));
        assert_eq!(chi.order(), 2);
    }

    #[test]
    fn principal_and_order_six() {
        let chi0 = build_prime_character(5, 0).unwrap();
        for n in 1..5 {
            assert_eq!(chi0.value(n), Complex64::new(1.0, 0.0));
        }
        let chi = build_prime_character(7, 1).unwrap();
        assert!(close(chi.value(3), unit_root(1, 6)));
        assert_eq!(chi.order(), 6);
        assert!(matches!(
            build_prime_character(7, 6),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            build_prime_character(2, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn dirichlet_eval_examples() {
        let m = factor_squarefree(15).unwrap();
        let chi = crt_character(&m, &[1, 1]).unwrap();
        assert!(chi.is_primitive());
        assert_eq!(char_eval(&chi, 1), Complex64::new(1.0, 0.0));
        assert_eq!(char_eval(&chi, 5), Complex64::new(0.0, 0.0));
        let induced = crt_character(&m, &[0, 1]).unwrap();
        assert!(!induced.is_primitive());
        for n in 0..15 {
            let prod = chi.components()[0].value(n) * chi.components()[1].value(n);
            assert!(close(chi.value(n), prod));
        }
        assert!(crt_character(&m, &[1]).is_err());
    }

    #[test]
    fn primitive_enumeration_counts() {
        let count = |q| enumerate_primitive_characters(&factor_squarefree(q).unwrap()).unwrap().len();
        assert_eq!(count(5), 3);
        assert_eq!(count(15), 3);
        assert_eq!(count(6), 0);
        assert_eq!(count(105), 3 * 5);
        assert!(enumerate_primitive_characters(&factor_squarefree(100_003).unwrap()).is_err());
    }

    #[test]
    fn order_of_product_character() {
        let m = factor_squarefree(35).unwrap();
        let chi = crt_character(&m, &[2, 3]).unwrap();
        // components of order 5/gcd(2,4)=2 and 6/gcd(3,6)=2
        assert_eq!(chi.order(), 2);
        let ord = chi.order();
        for n in 0..35 {
            let v = chi.value(n);
            if v.norm() > 0.5 {
                assert!(close(v.powu(ord as u32), Complex64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn order_classes() {
        let chars = characters_by_order(13).unwrap();
        let orders: Vec<u64> = chars.iter().map(|c| c.order()).collect();
        assert_eq!(orders, vec![2, 3, 4, 6, 12]);
    }

    #[test]
    fn unit_root_special_angles() {
        assert_eq!(unit_root(0, 7), Complex64::new(1.0, 0.0));
        assert_eq!(unit_root(2, 4), Complex64::new(-1.0, 0.0));
        assert!(close(unit_root(5, 6), Complex64::from_polar(1.0, -std::f64::consts::PI / 3.0)));
    }
}
