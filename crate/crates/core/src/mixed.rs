//! Evaluators for every sum shape: one-dimensional mixed sums, finite-field
//! box sums, multi-character box sums, linear-form sums and the complete
//! rational character sums behind the mean value estimates.
//!
//! `chi` of a ratio `num / den` is `chi(num) * conj(chi(den))`, and any `lambda`
//! for which some linear factor is a non-unit contributes 0. For squarefree
//! moduli this convention makes complete sums factor over the primes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{e, DirichletCharacter, PrimeCharacter};
use crate::error::{Error, Result};
use crate::field::FieldCharacter;
use crate::modular::gcd;
use crate::poly::RealPolynomial;
use crate::reduce::{det_sum, try_det_sum};

/// Upper limit on the number of terms of any evaluated sum.
pub const MAX_TERMS: u64 = 1 << 32;

/// `n` integer linear forms in `n` variables, `L_i(x) = sum_j matrix[i][j] x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    matrix: Vec<Vec<i64>>,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidConfig("empty linear system".into()));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::ArityMismatch {
                expected: n,
                got: row.len(),
            });
        }
        Ok(LinearSystem { matrix })
    }

    pub fn identity(n: usize) -> Self {
        LinearSystem {
            matrix: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        let n = self.n();
        let mut a: Vec<Vec<i128>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Ok when the forms are linearly independent modulo `q`.
    pub fn check_independent_mod(&self, q: u64) -> Result<()> {
        let det = self.determinant().rem_euclid(q as i128) as u64;
        if gcd(det, q) == 1 {
            Ok(())
        } else {
            Err(Error::SingularSystem(q))
        }
    }

    pub fn eval(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `prod_i L_i(x)` reduced mod `q`.
    pub fn product_mod(&self, x: &[i64], q: u64) -> i64 {
        let q = q as i128;
        self.matrix.iter().fold(1i128, |acc, row| {
            let l: i128 = row.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum();
            acc * l.rem_euclid(q) % q
        }) as i64
    }
}

/// A `2r`-tuple `(v_1, ..., v_2r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleSpec {
    pub r: usize,
    pub v: Vec<u64>,
}

impl TupleSpec {
    pub fn new(r: usize, v: Vec<u64>) -> Result<Self> {
        if r == 0 || v.len() != 2 * r {
            return Err(Error::ArityMismatch {
                expected: 2 * r,
                got: v.len(),
            });
        }
        Ok(TupleSpec { r, v })
    }

    pub fn numerator(&self) -> &[u64] {
        &self.v[..self.r]
    }

    pub fn denominator(&self) -> &[u64] {
        &self.v[self.r..]
    }

    pub fn distinct_count(&self) -> usize {
        let mut s = self.v.clone();
        s.sort_unstable();
        s.dedup();
        s.len()
    }

    /// Member of the "at least r + 1 distinct entries" part of a solution set.
    pub fn is_generic(&self) -> bool {
        self.distinct_count() > self.r
    }
}

/// Mixed-radix decoding of `idx` into a point of `prod_i (lo_i, lo_i + len_i]`.
fn box_point(mut idx: u64, lows: &[i64], lens: &[u64], out: &mut [i64]) {
    for ((o, &lo), &len) in out.iter_mut().zip(lows).zip(lens) {
        *o = lo + 1 + (idx % len) as i64;
        idx /= len;
    }
}

fn box_size(lens: &[u64]) -> Result<u64> {
    lens.iter()
        .try_fold(1u64, |acc, &l| acc.checked_mul(l))
        .filter(|&t| t <= MAX_TERMS)
        .ok_or_else(|| Error::TooLarge("box exceeds 2^32 terms".into()))
}

fn check_nvars(f: &RealPolynomial, n: usize) -> Result<()> {
    if f.nvars() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: f.nvars(),
        });
    }
    Ok(())
}

/// `sum_{M < n <= M + N} chi(n) e(F(n))`.
pub fn mixed_sum(chi: &DirichletCharacter, f: &RealPolynomial, m: i64, n: u64) -> Result<Complex64> {
    check_nvars(f, 1)?;
    if n > MAX_TERMS {
        return Err(Error::TooLarge(format!("{n} terms")));
    }
    try_det_sum(n, |i| {
        let x = m + 1 + i as i64;
        let c = chi.value(x);
        if c.re == 0.0 && c.im == 0.0 {
            return Ok(c);
        }
        Ok(c * f.eval_phase(&[x])?)
    })
}

/// `sum_{x in B} chi(x) e(F(x))` over the box `B = {sum h_i omega_i : 1 <= h_i <= H}`.
pub fn box_mixed_sum(chi: &FieldCharacter, f: &RealPolynomial, h: u64) -> Result<Complex64> {
    let spec = chi.spec();
    check_nvars(f, spec.n())?;
    if h >= spec.q() {
        return Err(Error::BoxTooLarge { h, q: spec.q() });
    }
    let n = spec.n();
    let lens = vec![h; n];
    let lows = vec![0i64; n];
    let total = box_size(&lens)?;
    try_det_sum(total, |i| {
        let mut pt = vec![0i64; n];
        box_point(i, &lows, &lens, &mut pt);
        let coords: Vec<u64> = pt.iter().map(|&c| c as u64).collect();
        let code = spec.encode(&spec.from_coordinates(&coords));
        Ok(chi.value_code(code) * f.eval_phase(&pt)?)
    })
}

/// `sum_{M_i < h_i <= M_i + H_i} prod_i chi_i(h_i) e(F(h))`.
pub fn multi_char_mixed_sum(
    chis: &[DirichletCharacter],
    f: &RealPolynomial,
    ms: &[i64],
    hs: &[u64],
) -> Result<Complex64> {
    let n = chis.len();
    if ms.len() != n || hs.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: ms.len().min(hs.len()),
        });
    }
    check_nvars(f, n)?;
    let total = box_size(hs)?;
    try_det_sum(total, |i| {
        let mut pt = vec![0i64; n];
        box_point(i, ms, hs, &mut pt);
        let mut c = Complex64::new(1.0, 0.0);
        for (chi, &x) in chis.iter().zip(&pt) {
            c *= chi.value(x);
            if c.re == 0.0 && c.im == 0.0 {
                return Ok(c);
            }
        }
        Ok(c * f.eval_phase(&pt)?)
    })
}

/// `sum_{1 <= h_i <= H} chi(prod_j L_j(h)) e(F(h))`.
pub fn linear_forms_mixed_sum(
    chi: &DirichletCharacter,
    l: &LinearSystem,
    f: &RealPolynomial,
    h: u64,
) -> Result<Complex64> {
    let q = chi.q();
    l.check_independent_mod(q)?;
    let n = l.n();
    check_nvars(f, n)?;
    if h > q {
        return Err(Error::HypothesisViolated(format!("H = {h} exceeds q = {q}")));
    }
    let lens = vec![h; n];
    let lows = vec![0i64; n];
    let total = box_size(&lens)?;
    try_det_sum(total, |i| {
        let mut pt = vec![0i64; n];
        box_point(i, &lows, &lens, &mut pt);
        let c = chi.value(l.product_mod(&pt, q));
        if c.re == 0.0 && c.im == 0.0 {
            return Ok(c);
        }
        Ok(c * f.eval_phase(&pt)?)
    })
}

/// `A_i(v) = prod_{j != i} (v_i - v_j)` for `1 <= i <= 2r`.
///
/// Panics if `i` is out of range or the product overflows `i128`.
pub fn difference_product(spec: &TupleSpec, i: usize) -> i128 {
    assert!((1..=spec.v.len()).contains(&i), "index {i} outside 1..={}", spec.v.len());
    let i = i - 1;
    let vi = spec.v[i] as i128;
    spec.v
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(1i128, |acc, (_, &vj)| {
            acc.checked_mul(vi - vj as i128)
                .expect("difference product overflows i128")
        })
}

/// `gcd(q, A_i(v))`, computed modulo `q` so it never overflows.
pub fn difference_product_gcd(spec: &TupleSpec, i: usize, q: u64) -> u64 {
    assert!((1..=spec.v.len()).contains(&i), "index {i} outside 1..={}", spec.v.len());
    let i = i - 1;
    let qi = q as i128;
    let vi = spec.v[i] as i128;
    let a = spec
        .v
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(1i128, |acc, (_, &vj)| acc * (vi - vj as i128).rem_euclid(qi) % qi);
    gcd(a as u64, q)
}

/// Complete sum mod `p` for one prime component.
pub fn prime_complete_sum(chi: &PrimeCharacter, spec: &TupleSpec) -> Complex64 {
    let p = chi.p();
    let m = chi.group_order();
    let logs = chi.logs();
    let num: Vec<u64> = spec.numerator().iter().map(|v| v % p).collect();
    let den: Vec<u64> = spec.denominator().iter().map(|v| v % p).collect();
    det_sum(p, |lam| {
        let mut ex = 0u64;
        for &v in &num {
            let l = logs[((lam + v) % p) as usize];
            if l == crate::characters::NO_LOG {
                return Complex64::new(0.0, 0.0);
            }
            ex += l as u64;
        }
        for &v in &den {
            let l = logs[((lam + v) % p) as usize];
            if l == crate::characters::NO_LOG {
                return Complex64::new(0.0, 0.0);
            }
            ex += m - l as u64;
        }
        chi.value_at_log(ex % m)
    })
}

/// `sum_{lambda = 1}^{q} chi((lambda + v_1)...(lambda + v_r) / ((lambda + v_{r+1})...(lambda + v_2r)))`,
/// evaluated directly over all `lambda`.
pub fn complete_rational_char_sum(chi: &DirichletCharacter, spec: &TupleSpec) -> Complex64 {
    let q = chi.q();
    let comps = chi.components();
    det_sum(q, |i| {
        let lam = i + 1;
        let mut frac = 0.0f64;
        for c in comps {
            let p = c.p();
            let m = c.group_order();
            let logs = c.logs();
            let mut ex = 0u64;
            for (k, &v) in spec.v.iter().enumerate() {
                let l = logs[((lam + v) % p) as usize];
                if l == crate::characters::NO_LOG {
                    return Complex64::new(0.0, 0.0);
                }
                ex += if k < spec.r { l as u64 } else { m - l as u64 };
            }
            frac += ((c.t() % m) * (ex % m) % m) as f64 / m as f64;
        }
        e(frac)
    })
}

/// The same sum as [`complete_rational_char_sum`], computed as the product
/// of the per-prime complete sums.
pub fn complete_rational_char_sum_crt(chi: &DirichletCharacter, spec: &TupleSpec) -> Complex64 {
    chi.components()
        .iter()
        .map(|c| prime_complete_sum(c, spec))
        .product()
}

/// Complete sum over GF(q^n) with `v_k` embedded in the prime subfield.
pub fn field_complete_sum(chi: &FieldCharacter, spec: &TupleSpec) -> Complex64 {
    let f = chi.spec();
    let m = f.size() - 1;
    let shifts: Vec<u64> = spec
        .v
        .iter()
        .map(|&v| f.encode(&f.from_int((v % f.q()) as i64)))
        .collect();
    det_sum(f.size(), |lam| {
        let mut ex = 0u64;
        for (k, &s) in shifts.iter().enumerate() {
            match f.log_code(f.add_codes(lam, s)) {
                None => return Complex64::new(0.0, 0.0),
                Some(l) => ex += if k < spec.r { l } else { m - l },
            }
        }
        chi.value_at_log(ex % m)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{build_prime_character, crt_character, enumerate_primitive_characters};
    use crate::field::build_field;
    use crate::modular::factor_squarefree;
    use std::sync::Arc;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn legendre5() -> DirichletCharacter {
        DirichletCharacter::from_components(vec![build_prime_character(5, 2).unwrap()]).unwrap()
    }

    #[test]
    fn mixed_sum_examples() {
        let chi = legendre5();
        let zero = RealPolynomial::zero(1);
        assert!(mixed_sum(&chi, &zero, 0, 5).unwrap().norm() < 1e-12);
        assert!(mixed_sum(&chi, &zero, 0, 2).unwrap().norm() < 1e-12);
        assert_eq!(mixed_sum(&chi, &zero, 0, 0).unwrap(), Complex64::new(0.0, 0.0));
        let f = RealPolynomial::univariate(&[0.0, 0.1, 0.37]).unwrap();
        let single = mixed_sum(&chi, &f, 6, 1).unwrap();
        assert!(close(single, chi.value(7) * f.eval_phase(&[7]).unwrap(), 1e-15));
        assert!(mixed_sum(&chi, &RealPolynomial::zero(2), 0, 3).is_err());
    }

    #[test]
    fn mixed_sum_is_additive_in_range() {
        let m = factor_squarefree(35).unwrap();
        let chi = crt_character(&m, &[3, 2]).unwrap();
        let f = RealPolynomial::univariate(&[0.0, 0.123, 0.0456]).unwrap();
        let whole = mixed_sum(&chi, &f, -4, 60).unwrap();
        let parts = mixed_sum(&chi, &f, -4, 23).unwrap() + mixed_sum(&chi, &f, 19, 37).unwrap();
        assert!(close(whole, parts, 1e-9));
    }

    #[test]
    fn box_sum_matches_re_enumeration() {
        let spec = Arc::new(build_field(3, 2).unwrap());
        let chi = FieldCharacter::new(spec.clone(), 3).unwrap();
        let f = RealPolynomial::zero(2);
        let s = box_mixed_sum(&chi, &f, 2).unwrap();
        let mut brute = Complex64::new(0.0, 0.0);
        for h1 in 1..=2u64 {
            for h2 in 1..=2u64 {
                let x = spec.add(&spec.from_int(h1 as i64), &spec.mul(&spec.from_int(h2 as i64), &spec.element(&[0, 1]).unwrap()));
                brute += chi.value(&x);
            }
        }
        assert!(close(s, brute, 1e-12));
        let one = box_mixed_sum(&chi, &f, 1).unwrap();
        assert!(close(one, chi.value(&spec.from_coordinates(&[1, 1])), 1e-15));
        assert!(matches!(box_mixed_sum(&chi, &f, 3), Err(Error::BoxTooLarge { .. })));
    }

    #[test]
    fn multi_char_sum_cases() {
        let c5 = DirichletCharacter::from_components(vec![build_prime_character(5, 1).unwrap()]).unwrap();
        let c7 = DirichletCharacter::from_components(vec![build_prime_character(7, 2).unwrap()]).unwrap();
        let zero = RealPolynomial::zero(2);
        let full = multi_char_mixed_sum(&[c5.clone(), c7.clone()], &zero, &[0, 0], &[5, 7]).unwrap();
        assert!(full.norm() < 1e-12);
        let small = multi_char_mixed_sum(&[c5.clone(), c7.clone()], &zero, &[0, 0], &[2, 2]).unwrap();
        let brute: Complex64 = (1..=2)
            .flat_map(|a| (1..=2).map(move |b| (a, b)))
            .map(|(a, b)| c5.value(a) * c7.value(b))
            .sum();
        assert!(close(small, brute, 1e-12));
        let f1 = RealPolynomial::univariate(&[0.0, 0.3, 0.2]).unwrap();
        let one_dim = multi_char_mixed_sum(std::slice::from_ref(&c7), &f1, &[3], &[9]).unwrap();
        assert!(close(one_dim, mixed_sum(&c7, &f1, 3, 9).unwrap(), 1e-12));
    }

    #[test]
    fn linear_forms_cases() {
        let chi = DirichletCharacter::from_components(vec![build_prime_character(7, 1).unwrap()]).unwrap();
        let f1 = RealPolynomial::univariate(&[0.0, 0.2, 0.05]).unwrap();
        let id1 = LinearSystem::identity(1);
        let a = linear_forms_mixed_sum(&chi, &id1, &f1, 6).unwrap();
        assert!(close(a, mixed_sum(&chi, &f1, 0, 6).unwrap(), 1e-12));
        let id2 = LinearSystem::identity(2);
        let zero = RealPolynomial::zero(2);
        let s = linear_forms_mixed_sum(&chi, &id2, &zero, 2).unwrap();
        let brute: Complex64 = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .iter()
            .map(|&(x, y)| chi.value(x * y))
            .sum();
        assert!(close(s, brute, 1e-12));
        let sing = LinearSystem::new(vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(linear_forms_mixed_sum(&chi, &sing, &zero, 2), Err(Error::SingularSystem(7)));
        // a form vanishing mod 7 kills the term: L = (x + 6y) vanishes at (1,1)
        let l = LinearSystem::new(vec![vec![1, 6], vec![0, 1]]).unwrap();
        assert_eq!(chi.value(l.product_mod(&[1, 1], 7)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn determinants() {
        assert_eq!(LinearSystem::identity(3).determinant(), 1);
        let l = LinearSystem::new(vec![vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]).unwrap();
        assert_eq!(l.determinant(), 6);
        let l = LinearSystem::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(l.determinant(), -1);
    }

    #[test]
    fn difference_products() {
        let t = TupleSpec::new(2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(difference_product(&t, 1), -6);
        let t = TupleSpec::new(1, vec![2, 5]).unwrap();
        assert_eq!(difference_product(&t, 1), -3);
        let t = TupleSpec::new(2, vec![1, 3, 3, 4]).unwrap();
        assert_eq!(difference_product(&t, 2), 0);
        assert_eq!(difference_product(&t, 3), 0);
        assert_eq!(difference_product_gcd(&t, 1, 7), 1);
        assert_eq!(difference_product_gcd(&t, 2, 7), 7);
        // (1-3)(1-3)(1-4) = -12, shares 3 with 15
        assert_eq!(difference_product_gcd(&t, 1, 15), 3);
        assert!(TupleSpec::new(2, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn complete_sum_examples() {
        let m = factor_squarefree(15).unwrap();
        let chi = crt_character(&m, &[1, 2]).unwrap();
        let diag = TupleSpec::new(2, vec![4, 9, 9, 4]).unwrap();
        let units = (1..=15).filter(|l| gcd(l + 4, 15) == 1 && gcd(l + 9, 15) == 1).count();
        assert!(close(complete_rational_char_sum(&chi, &diag), Complex64::new(units as f64, 0.0), 1e-12));

        // Legendre mod 7 with r = 1, v = (1, 2): brute force over lambda = 1..7
        let leg7 = DirichletCharacter::from_components(vec![build_prime_character(7, 3).unwrap()]).unwrap();
        let t = TupleSpec::new(1, vec![1, 2]).unwrap();
        let brute: Complex64 = (1..=7i64)
            .map(|l| leg7.value(l + 1) * leg7.value(l + 2).conj())
            .sum();
        let s = complete_rational_char_sum(&leg7, &t);
        assert!(close(s, brute, 1e-12));
        assert!(close(s, Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn crt_factorization_of_complete_sums() {
        for q in [15u64, 21, 35, 105] {
            let m = factor_squarefree(q).unwrap();
            for chi in enumerate_primitive_characters(&m).unwrap().iter().take(4) {
                for v in [vec![1, 2, 3, 4], vec![1, 1, 2, 5], vec![3, 7, 7, 3]] {
                    let t = TupleSpec::new(2, v).unwrap();
                    let direct = complete_rational_char_sum(chi, &t);
                    let crt = complete_rational_char_sum_crt(chi, &t);
                    assert!(close(direct, crt, 1e-9), "q={q}");
                    assert!(direct.norm() <= q as f64 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn field_complete_sum_diagonal() {
        let spec = Arc::new(build_field(3, 2).unwrap());
        let chi = FieldCharacter::new(spec, 2).unwrap();
        let t = TupleSpec::new(1, vec![1, 1]).unwrap();
        assert!(close(field_complete_sum(&chi, &t), Complex64::new(8.0, 0.0), 1e-12));
    }
}
