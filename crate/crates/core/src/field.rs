//! Arithmetic in GF(q^n) with an explicit polynomial model.
//!
//! Elements are coefficient vectors in the power basis `1, x, ..., x^{n-1}`
//! modulo the lexicographically smallest monic irreducible polynomial of
//! degree `n`. Each element also has an integer code `sum c_i q^i`, which
//! indexes the exponential and discrete-log tables built at construction.
//! A separate basis `omega_1, ..., omega_n` (the power basis unless replaced)
//! defines the box coordinates.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::characters::{unit_root, NO_LOG};
use crate::error::{Error, Result};
use crate::modular::{factorize, is_prime, mod_inverse};
use crate::poly::RealPolynomial;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

// --- dense polynomials over F_q, low degree first -------------------------

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + q - y) % q
        })
        .collect();
    trim(out)
}

/// Remainder of `a` modulo a non-zero `f`.
fn poly_rem(a: &[u64], f: &[u64], q: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = mod_inverse(f[df] as i64, q).expect("non-zero leading coefficient");
    while r.len() > df {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % q;
        let shift = dr - df;
        for (i, &fc) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + q - c * fc % q) % q;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % q;
        }
    }
    poly_rem(&prod, f, q)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], q: u64) -> Vec<u64> {
    let mut acc = poly_rem(&[1], f, q);
    let mut b = poly_rem(base, f, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, q);
        }
        b = poly_mulmod(&b, &b, f, q);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, q);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test: `f` of degree `n` is irreducible over F_q iff
/// `x^{q^n} = x (mod f)` and `gcd(x^{q^{n/l}} - x, f) = 1` for every prime `l | n`.
pub fn is_irreducible(f: &[u64], q: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let n = (f.len() - 1) as u64;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    // x^{q^k} mod f for k = 1..=n by repeated Frobenius
    let mut frob = Vec::with_capacity(n as usize + 1);
    frob.push(poly_rem(&x, &f, q));
    for k in 1..=n as usize {
        let prev = frob[k - 1].clone();
        frob.push(poly_powmod(&prev, q, &f, q));
    }
    if !poly_sub(&frob[n as usize], &x, q).is_empty() {
        return false;
    }
    factorize(n).into_iter().all(|(l, _)| {
        let h = poly_sub(&frob[(n / l) as usize], &x, q);
        poly_gcd(&h, &f, q).len() == 1
    })
}

/// Invertible `n x n` matrix over F_q, inverse by Gauss-Jordan elimination.
fn invert_matrix(m: &[Vec<u64>], q: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<u64> = row.iter().map(|x| x % q).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = mod_inverse(a[col][col] as i64, q).ok()?;
        for x in a[col].iter_mut() {
            *x = *x * inv % q;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let c = a[r][col];
                for k in 0..2 * n {
                    a[r][k] = (a[r][k] + q - c * a[col][k] % q) % q;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A concrete model of GF(q^n).
#[derive(Debug, Clone)]
pub struct FieldSpec {
    q: u64,
    n: usize,
    size: u64,
    modpoly: Vec<u64>,
    generator: FieldElement,
    exp: Vec<u32>,
    dlog: Vec<u32>,
    basis: Vec<Vec<u64>>,
    basis_inv: Vec<Vec<u64>>,
}

/// What a report records about a field.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FieldSummary {
    pub q: u64,
    pub n: usize,
    pub modpoly: Vec<u64>,
    pub generator: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
}

pub fn build_field(q: u64, n: usize) -> Result<FieldSpec> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("extension degree must be at least 1".into()));
    }
    let size = (0..n)
        .try_fold(1u64, |acc, _| acc.checked_mul(q).filter(|&s| s <= MAX_FIELD_SIZE))
        .ok_or_else(|| Error::TooLarge(format!("GF({q}^{n})")))?;

    let lower_count = size; // monic: q^n choices for the lower coefficients
    let modpoly = (0..lower_count)
        .map(|code| {
            let mut f = decode_digits(code, q, n);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, q))
        .expect("irreducible polynomials exist in every degree");

    let order = size - 1;
    let order_factors = factorize(order);
    let generator_code = (1..size)
        .find(|&code| {
            let g = decode_digits(code, q, n);
            order_factors
                .iter()
                .all(|&(l, _)| trim(poly_powmod(&g, order / l, &modpoly, q)) != vec![1])
        })
        .expect("the multiplicative group is cyclic");
    let gen = decode_digits(generator_code, q, n);

    let mut exp = vec![0u32; order as usize];
    let mut dlog = vec![NO_LOG; size as usize];
    let mut x = vec![1u64];
    for k in 0..order {
        let code = encode_digits(&x, q);
        exp[k as usize] = code as u32;
        dlog[code as usize] = k as u32;
        x = poly_mulmod(&x, &gen, &modpoly, q);
    }

    let identity: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    Ok(FieldSpec {
        q,
        n,
        size,
        modpoly,
        generator: FieldElement { coeffs: gen },
        exp,
        dlog,
        basis: identity.clone(),
        basis_inv: identity,
    })
}

fn decode_digits(mut code: u64, q: u64, n: usize) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = code % q;
            code /= q;
            d
        })
        .collect()
}

fn encode_digits(c: &[u64], q: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &d| acc * q + d)
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of elements, `q^n`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modpoly(&self) -> &[u64] {
        &self.modpoly
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    /// Rows are `omega_i` in power-basis coordinates.
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            q: self.q,
            n: self.n,
            modpoly: self.modpoly.clone(),
            generator: self.generator.coeffs.clone(),
            basis: self.basis.clone(),
        }
    }

    /// Replaces the coordinate basis; rows of `rows` are the new `omega_i`
    /// in power-basis coordinates and must be invertible over F_q.
    pub fn with_basis(mut self, rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: rows.len(),
            });
        }
        let rows: Vec<Vec<u64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x % self.q).collect())
            .collect();
        let inv = invert_matrix(&rows, self.q).ok_or(Error::SingularSystem(self.q))?;
        self.basis = rows;
        self.basis_inv = inv;
        Ok(self)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut c = vec![0; self.n];
        c[0] = v.rem_euclid(self.q as i64) as u64;
        FieldElement { coeffs: c }
    }

    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: coeffs.len(),
            });
        }
        Ok(FieldElement {
            coeffs: coeffs.iter().map(|c| c % self.q).collect(),
        })
    }

    pub fn encode(&self, x: &FieldElement) -> u64 {
        encode_digits(&x.coeffs, self.q)
    }

    pub fn decode(&self, code: u64) -> FieldElement {
        FieldElement {
            coeffs: decode_digits(code, self.q, self.n),
        }
    }

    /// Discrete log of a non-zero element code.
    #[inline]
    pub fn log_code(&self, code: u64) -> Option<u64> {
        match self.dlog[code as usize] {
            NO_LOG => None,
            k => Some(k as u64),
        }
    }

    pub fn log(&self, x: &FieldElement) -> Option<u64> {
        self.log_code(self.encode(x))
    }

    #[inline]
    pub fn exp_code(&self, k: u64) -> u64 {
        self.exp[(k % (self.size - 1)) as usize] as u64
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.q)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|x| (self.q - x) % self.q).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    /// Code of `a + b` given codes.
    #[inline]
    pub fn add_codes(&self, mut a: u64, mut b: u64) -> u64 {
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.n {
            out += ((a % self.q + b % self.q) % self.q) * place;
            a /= self.q;
            b /= self.q;
            place *= self.q;
        }
        out
    }

    #[inline]
    pub fn mul_codes(&self, a: u64, b: u64) -> u64 {
        match (self.log_code(a), self.log_code(b)) {
            (Some(x), Some(y)) => self.exp_code(x + y),
            _ => 0,
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.decode(self.mul_codes(self.encode(a), self.encode(b)))
    }

    /// Multiplication straight from the polynomial model, bypassing the tables.
    pub fn mul_poly(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut c = poly_mulmod(&a.coeffs, &b.coeffs, &self.modpoly, self.q);
        c.resize(self.n, 0);
        FieldElement { coeffs: c }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        let k = self.log(a).ok_or(Error::DivisionByZero)?;
        let order = self.size - 1;
        Ok(self.decode(self.exp_code((order - k) % order)))
    }

    pub fn pow(&self, a: &FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        match self.log(a) {
            None => self.zero(),
            Some(k) => {
                let order = (self.size - 1) as u128;
                let idx = (k as u128 * e as u128 % order) as u64;
                self.decode(self.exp_code(idx))
            }
        }
    }

    /// Coordinates `h` with `x = sum h_i omega_i`.
    pub fn coordinates(&self, x: &FieldElement) -> Vec<u64> {
        (0..self.n)
            .map(|j| {
                (0..self.n).fold(0u64, |acc, i| {
                    (acc + x.coeffs[i] * self.basis_inv[i][j]) % self.q
                })
            })
            .collect()
    }

    /// `sum h_i omega_i`.
    pub fn from_coordinates(&self, h: &[u64]) -> FieldElement {
        let coeffs = (0..self.n)
            .map(|j| {
                h.iter()
                    .zip(&self.basis)
                    .fold(0u64, |acc, (&hi, row)| (acc + (hi % self.q) * row[j]) % self.q)
            })
            .collect();
        FieldElement { coeffs }
    }
}

pub fn fadd(spec: &FieldSpec, a: &FieldElement, b: &FieldElement) -> FieldElement {
    spec.add(a, b)
}

pub fn fmul(spec: &FieldSpec, a: &FieldElement, b: &FieldElement) -> FieldElement {
    spec.mul(a, b)
}

pub fn finv(spec: &FieldSpec, a: &FieldElement) -> Result<FieldElement> {
    spec.inv(a)
}

/// Absolute trace `x + x^q + ... + x^{q^{n-1}}`, as an element of `[0, q)`.
pub fn trace(spec: &FieldSpec, x: &FieldElement) -> u64 {
    let mut acc = spec.zero();
    let mut y = x.clone();
    for _ in 0..spec.n {
        acc = spec.add(&acc, &y);
        y = spec.pow(&y, spec.q);
    }
    debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
    acc.coeffs[0]
}

/// `psi_a(x) = exp(2 pi i Tr(a x) / q)`.
pub fn additive_char(spec: &FieldSpec, a: &FieldElement, x: &FieldElement) -> Complex64 {
    unit_root(trace(spec, &spec.mul(a, x)), spec.q)
}

/// A point of a box: coordinates in `[1, H]^n` and the element's code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxPoint {
    pub coords: Vec<u64>,
    pub code: u64,
}

/// The `H^n` points with coordinates in `[1, H]`, first coordinate varying fastest.
pub fn box_points(spec: &FieldSpec, h: u64) -> Result<Vec<BoxPoint>> {
    if h >= spec.q {
        return Err(Error::BoxTooLarge { h, q: spec.q });
    }
    if h == 0 {
        return Ok(Vec::new());
    }
    let total = h.pow(spec.n as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut coords = vec![1u64; spec.n];
    for _ in 0..total {
        let code = spec.encode(&spec.from_coordinates(&coords));
        out.push(BoxPoint {
            coords: coords.clone(),
            code,
        });
        for c in coords.iter_mut() {
            *c += 1;
            if *c <= h {
                break;
            }
            *c = 1;
        }
    }
    Ok(out)
}

pub fn box_elements(spec: &FieldSpec, h: u64) -> Result<Vec<FieldElement>> {
    Ok(box_points(spec, h)?
        .into_iter()
        .map(|p| spec.decode(p.code))
        .collect())
}

/// `F(h_1, ..., h_n)` mod 1 where `h` are the coordinates of `x`.
pub fn poly_on_field(spec: &FieldSpec, f: &RealPolynomial, x: &FieldElement) -> Result<f64> {
    if f.nvars() != spec.n {
        return Err(Error::ArityMismatch {
            expected: spec.n,
            got: f.nvars(),
        });
    }
    let h: Vec<i64> = spec.coordinates(x).into_iter().map(|c| c as i64).collect();
    f.eval_frac(&h)
}

/// A multiplicative character of GF(q^n).
#[derive(Debug, Clone)]
pub struct FieldCharacter {
    spec: Arc<FieldSpec>,
    t: u64,
}

impl FieldCharacter {
    pub fn new(spec: Arc<FieldSpec>, t: u64) -> Result<Self> {
        if t >= spec.size - 1 {
            return Err(Error::IndexOutOfRange {
                index: t,
                modulus: spec.size,
            });
        }
        Ok(FieldCharacter { spec, t })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn is_trivial(&self) -> bool {
        self.t == 0
    }

    /// `chi(g^k)`.
    #[inline]
    pub fn value_at_log(&self, k: u64) -> Complex64 {
        let m = self.spec.size - 1;
        unit_root(((self.t as u128 * k as u128) % m as u128) as u64, m)
    }

    #[inline]
    pub fn value_code(&self, code: u64) -> Complex64 {
        match self.spec.log_code(code) {
            Some(k) => self.value_at_log(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn value(&self, x: &FieldElement) -> Complex64 {
        self.value_code(self.spec.encode(x))
    }
}
