//! Vinogradov system counts `J_{r,d}(V)` and exact double mean values `W`.
//!
//! `W` is never integrated numerically on the main path: expanding the
//! `2r`-th power turns each `alpha`-integral into the indicator of a
//! Vinogradov solution, leaving a sum of complete character sums over the
//! solution set. [`quadrature_w_reference`] integrates directly and exists
//! only as an independent check for `d = 1`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{unit_root, DirichletCharacter};
use crate::error::{Error, Result};
use crate::field::FieldCharacter;
use crate::mixed::{
    complete_rational_char_sum, field_complete_sum, prime_complete_sum, TupleSpec,
};
use crate::reduce::det_sum;

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;
pub const MAX_SOLUTIONS: u64 = 10_000_000;
pub const MIN_QUADRATURE_GRID: u64 = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VinogradovParams {
    pub r: u32,
    pub d: u32,
    pub v: u64,
    #[serde(default = "default_budget")]
    pub budget: u128,
}

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

impl VinogradovParams {
    pub fn new(r: u32, d: u32, v: u64) -> Result<Self> {
        for (what, x) in [("r", r as u64), ("d", d as u64), ("V", v)] {
            if x == 0 {
                return Err(Error::OutOfRange {
                    what,
                    value: 0,
                    limit: 1,
                });
            }
        }
        if v > u32::MAX as u64 {
            return Err(Error::TooLarge(format!("V = {v}")));
        }
        Ok(VinogradovParams {
            r,
            d,
            v,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    /// `D = d(d+1)/2`.
    pub fn big_d(&self) -> u32 {
        self.d * (self.d + 1) / 2
    }

    /// Number of ordered `r`-tuples, `V^r`, or `None` past `u128`.
    fn half_count(&self) -> Option<u128> {
        (self.v as u128).checked_pow(self.r)
    }
}

/// Power sums `(sum v_j, sum v_j^2, ..., sum v_j^d)` of one half of a tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerSumKey {
    pub sums: Vec<u128>,
}

impl PowerSumKey {
    pub fn of(values: &[u64], d: u32) -> Result<Self> {
        let mut sums = vec![0u128; d as usize];
        for &v in values {
            let mut p = 1u128;
            for s in sums.iter_mut() {
                p = p.checked_mul(v as u128).ok_or(Error::Overflow("power sum"))?;
                *s = s.checked_add(p).ok_or(Error::Overflow("power sum"))?;
            }
        }
        Ok(PowerSumKey { sums })
    }
}

fn check_budget(needed: Option<u128>, budget: u128) -> Result<u128> {
    match needed {
        Some(n) if n <= budget => Ok(n),
        Some(n) => Err(Error::BudgetExceeded { needed: n, budget }),
        None => Err(Error::BudgetExceeded {
            needed: u128::MAX,
            budget,
        }),
    }
}

/// Writes the `idx`-th `r`-tuple in lexicographic order (entries in `1..=V`).
fn decode_half(mut idx: u64, v: u64, out: &mut [u64]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % v + 1;
        idx /= v;
    }
}

/// Flat table of the power-sum keys of all `V^r` ordered halves.
fn half_keys(p: &VinogradovParams) -> Result<Vec<u128>> {
    let n = p.half_count().expect("checked by caller") as u64;
    let d = p.d as usize;
    let r = p.r as usize;
    let rows: Result<Vec<Vec<u128>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t = vec![0u64; r];
            decode_half(i, p.v, &mut t);
            Ok(PowerSumKey::of(&t, p.d)?.sums)
        })
        .collect();
    let mut flat = Vec::with_capacity(n as usize * d);
    for row in rows? {
        flat.extend(row);
    }
    Ok(flat)
}

/// `J_{r,d}(V)` by comparing every pair of halves (`V^{2r}` comparisons).
pub fn vinogradov_count_naive(p: &VinogradovParams) -> Result<u64> {
    let half = check_budget(p.half_count(), p.budget)?;
    check_budget(half.checked_mul(half), p.budget)?;
    let keys = half_keys(p)?;
    let d = p.d as usize;
    let n = half as usize;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let a = &keys[i * d..(i + 1) * d];
            (0..n).filter(|&j| &keys[j * d..(j + 1) * d] == a).count() as u64
        })
        .sum())
}

/// Multiplicity of each power-sum key among ordered `r`-tuples, built from
/// nondecreasing tuples weighted by their number of orderings.
fn key_multiplicities(p: &VinogradovParams) -> Result<HashMap<PowerSumKey, u64>> {
    let r = p.r as usize;
    let mut fact = vec![1u64; r + 1];
    for k in 1..=r {
        fact[k] = fact[k - 1]
            .checked_mul(k as u64)
            .ok_or(Error::Overflow("factorial"))?;
    }
    let mut map: HashMap<PowerSumKey, u64> = HashMap::new();
    let mut t = vec![1u64; r];
    loop {
        let mut weight = fact[r];
        let mut run = 1usize;
        for k in 1..=r {
            if k < r && t[k] == t[k - 1] {
                run += 1;
            } else {
                weight /= fact[run];
                run = 1;
            }
        }
        let key = PowerSumKey::of(&t, p.d)?;
        let slot = map.entry(key).or_insert(0);
        *slot = slot.checked_add(weight).ok_or(Error::Overflow("multiplicity"))?;

        // next nondecreasing tuple
        let mut k = r;
        while k > 0 && t[k - 1] == p.v {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        let next = t[k - 1] + 1;
        for slot in &mut t[k - 1..] {
            *slot = next;
        }
    }
    Ok(map)
}

/// `J_{r,d}(V) = sum over keys of m^2`.
pub fn vinogradov_count_mitm(p: &VinogradovParams) -> Result<u64> {
    check_budget(
        p.half_count().and_then(|h| h.checked_mul(p.r as u128)),
        p.budget,
    )?;
    let map = key_multiplicities(p)?;
    let mut keys: Vec<_> = map.into_iter().collect();
    keys.sort_unstable();
    keys.iter().try_fold(0u64, |acc, (_, m)| {
        m.checked_mul(*m)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or(Error::Overflow("J count"))
    })
}

/// `J_0 = 1` by convention; otherwise [`vinogradov_count_mitm`].
pub fn vinogradov_count(r: u32, d: u32, v: u64, budget: u128) -> Result<u64> {
    if r == 0 {
        return Ok(1);
    }
    vinogradov_count_mitm(&VinogradovParams::new(r, d, v)?.with_budget(budget))
}

/// All solutions of a Vinogradov system in lexicographic order, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub params: VinogradovParams,
    data: Vec<u64>,
    generic: usize,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.data.len() / (2 * self.params.r as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks_exact(2 * self.params.r as usize)
    }

    pub fn tuple(&self, i: usize) -> TupleSpec {
        let w = 2 * self.params.r as usize;
        TupleSpec {
            r: self.params.r as usize,
            v: self.data[i * w..(i + 1) * w].to_vec(),
        }
    }

    pub fn tuples(&self) -> impl Iterator<Item = TupleSpec> + '_ {
        (0..self.len()).map(|i| self.tuple(i))
    }

    /// Size of the part with at least `r + 1` distinct entries.
    pub fn generic_count(&self) -> usize {
        self.generic
    }

    /// Size of the part with at most `r` distinct entries.
    pub fn degenerate_count(&self) -> usize {
        self.len() - self.generic
    }

    pub fn generic(&self) -> impl Iterator<Item = &[u64]> {
        let r = self.params.r as usize;
        self.iter().filter(move |t| distinct(t) > r)
    }

    pub fn degenerate(&self) -> impl Iterator<Item = &[u64]> {
        let r = self.params.r as usize;
        self.iter().filter(move |t| distinct(t) <= r)
    }
}

fn distinct(t: &[u64]) -> usize {
    let mut s = t.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

pub fn iterate_solutions(p: &VinogradovParams) -> Result<SolutionSet> {
    let half = check_budget(
        p.half_count().and_then(|h| h.checked_mul(p.r as u128)),
        p.budget,
    )? as u64
        / p.r as u64;
    let keys = half_keys(p)?;
    let d = p.d as usize;
    let r = p.r as usize;
    let mut groups: HashMap<&[u128], Vec<u64>> = HashMap::new();
    for i in 0..half {
        groups
            .entry(&keys[i as usize * d..(i as usize + 1) * d])
            .or_default()
            .push(i);
    }
    let total: u64 = groups.values().map(|g| (g.len() as u64).pow(2)).sum();
    if total > MAX_SOLUTIONS {
        return Err(Error::BudgetExceeded {
            needed: total as u128,
            budget: MAX_SOLUTIONS as u128,
        });
    }
    let mut data = Vec::with_capacity(total as usize * 2 * r);
    let mut a = vec![0u64; r];
    let mut b = vec![0u64; r];
    let mut generic = 0;
    for i in 0..half {
        decode_half(i, p.v, &mut a);
        for &j in &groups[&keys[i as usize * d..(i as usize + 1) * d]] {
            decode_half(j, p.v, &mut b);
            let start = data.len();
            data.extend_from_slice(&a);
            data.extend_from_slice(&b);
            if distinct(&data[start..]) > r {
                generic += 1;
            }
        }
    }
    Ok(SolutionSet {
        params: *p,
        data,
        generic,
    })
}

/// The character data a double mean value is taken against.
#[derive(Debug, Clone, Copy)]
pub enum MeanValueTarget<'a> {
    Squarefree(&'a DirichletCharacter),
    MultiChar(&'a [DirichletCharacter]),
    Field(&'a FieldCharacter),
}

impl MeanValueTarget<'_> {
    /// Number of `lambda` in the complete sums.
    pub fn lambda_count(&self) -> u64 {
        match self {
            MeanValueTarget::Squarefree(c) => c.q(),
            MeanValueTarget::MultiChar(cs) => cs.iter().map(|c| c.q()).product(),
            MeanValueTarget::Field(c) => c.spec().size(),
        }
    }

    fn complete_sum(&self, spec: &TupleSpec) -> Complex64 {
        match self {
            MeanValueTarget::Squarefree(c) => complete_rational_char_sum(c, spec),
            MeanValueTarget::MultiChar(cs) => cs
                .iter()
                .flat_map(|c| c.components())
                .map(|pc| prime_complete_sum(pc, spec))
                .product(),
            MeanValueTarget::Field(c) => field_complete_sum(c, spec),
        }
    }
}

fn check_weights(beta: &[Complex64], v: u64) -> Result<()> {
    if beta.len() as u64 != v {
        return Err(Error::ArityMismatch {
            expected: v as usize,
            got: beta.len(),
        });
    }
    if let Some(b) = beta.iter().find(|b| !(b.norm() <= 1.0 + 1e-12)) {
        return Err(Error::InvalidConfig(format!("weight {b} exceeds 1 in modulus")));
    }
    Ok(())
}

/// Complete sums are invariant under a common shift of all `v` (for every
/// target) and under permutations within each half.
pub(crate) fn canonical_key(t: &[u64], r: usize) -> Vec<u64> {
    let lo = *t.iter().min().unwrap_or(&0);
    let mut num: Vec<u64> = t[..r].iter().map(|x| x - lo).collect();
    let mut den: Vec<u64> = t[r..].iter().map(|x| x - lo).collect();
    num.sort_unstable();
    den.sort_unstable();
    num.extend(den);
    num
}

/// `W` as a complex number; the imaginary part is rounding residue.
pub fn exact_w_complex(
    target: MeanValueTarget<'_>,
    beta: &[Complex64],
    p: &VinogradovParams,
) -> Result<Complex64> {
    check_weights(beta, p.v)?;
    if let MeanValueTarget::MultiChar(cs) = target {
        if let Some(c) = cs.iter().find(|c| p.v > c.q()) {
            return Err(Error::RangeViolation { v: p.v, q: c.q() });
        }
    }
    exact_w_over(target, beta, &iterate_solutions(p)?)
}

/// [`exact_w_complex`] over a precomputed solution set.
pub fn exact_w_over(
    target: MeanValueTarget<'_>,
    beta: &[Complex64],
    sols: &SolutionSet,
) -> Result<Complex64> {
    let p = &sols.params;
    check_weights(beta, p.v)?;
    if let MeanValueTarget::MultiChar(cs) = target {
        if let Some(c) = cs.iter().find(|c| p.v > c.q()) {
            return Err(Error::RangeViolation { v: p.v, q: c.q() });
        }
    }
    let r = p.r as usize;
    let mut cache: HashMap<Vec<u64>, Complex64> = HashMap::new();
    let mut sums = Vec::with_capacity(sols.len());
    for t in sols.iter() {
        let key = canonical_key(t, r);
        let s = *cache.entry(key).or_insert_with_key(|k| {
            target.complete_sum(&TupleSpec {
                r,
                v: k.iter().map(|x| x + 1).collect(),
            })
        });
        sums.push(s);
    }
    Ok(det_sum(sols.len() as u64, |i| {
        let t = &sols.data[i as usize * 2 * r..(i as usize + 1) * 2 * r];
        let mut c = Complex64::new(1.0, 0.0);
        for &v in &t[..r] {
            c *= beta[v as usize - 1];
        }
        for &v in &t[r..] {
            c *= beta[v as usize - 1].conj();
        }
        c * sums[i as usize]
    }))
}

pub fn exact_w_squarefree(
    chi: &DirichletCharacter,
    beta: &[Complex64],
    p: &VinogradovParams,
) -> Result<f64> {
    Ok(exact_w_complex(MeanValueTarget::Squarefree(chi), beta, p)?.re)
}

pub fn exact_w_multichar(
    chis: &[DirichletCharacter],
    beta: &[Complex64],
    p: &VinogradovParams,
) -> Result<f64> {
    Ok(exact_w_complex(MeanValueTarget::MultiChar(chis), beta, p)?.re)
}

pub fn exact_w_field(chi: &FieldCharacter, beta: &[Complex64], p: &VinogradovParams) -> Result<f64> {
    Ok(exact_w_complex(MeanValueTarget::Field(chi), beta, p)?.re)
}

/// Rectangle-rule integration of the defining `alpha`-integral (`d = 1`).
///
/// The integrand is a trigonometric polynomial in `alpha` of degree at most
/// `r(V - 1)`, so the rule is exact up to rounding once `grid > r(V - 1)`.
pub fn quadrature_w_reference(
    target: MeanValueTarget<'_>,
    beta: &[Complex64],
    p: &VinogradovParams,
    grid: u64,
) -> Result<f64> {
    if p.d != 1 {
        return Err(Error::UnsupportedDegree(p.d));
    }
    if grid < MIN_QUADRATURE_GRID {
        return Err(Error::InvalidConfig(format!(
            "quadrature grid {grid} below {MIN_QUADRATURE_GRID}"
        )));
    }
    check_weights(beta, p.v)?;
    let v = p.v as usize;
    // coeff[l * V + (v - 1)] = beta_v * chi(lambda_l + v)
    let coeff: Vec<Complex64> = match target {
        MeanValueTarget::Squarefree(c) => (1..=c.q() as i64)
            .flat_map(|l| (1..=v as i64).map(move |x| c.value(l + x) * beta[x as usize - 1]))
            .collect(),
        MeanValueTarget::MultiChar(cs) => {
            let qs: Vec<u64> = cs.iter().map(|c| c.q()).collect();
            let total: u64 = qs.iter().product();
            let mut out = Vec::with_capacity(total as usize * v);
            for mut idx in 0..total {
                let mut lam = Vec::with_capacity(qs.len());
                for &q in &qs {
                    lam.push((idx % q + 1) as i64);
                    idx /= q;
                }
                for x in 1..=v as i64 {
                    let val: Complex64 = cs.iter().zip(&lam).map(|(c, &l)| c.value(l + x)).product();
                    out.push(val * beta[x as usize - 1]);
                }
            }
            out
        }
        MeanValueTarget::Field(c) => {
            let f = c.spec();
            (0..f.size())
                .flat_map(|l| {
                    (1..=v as u64).map(move |x| {
                        let s = f.encode(&f.from_int((x % f.q()) as i64));
                        c.value_code(f.add_codes(l, s)) * beta[x as usize - 1]
                    })
                })
                .collect()
        }
    };
    let lambdas = (coeff.len() / v) as u64;
    let two_r = 2 * p.r as i32;
    // twiddle[g * V + x] = e(g (x + 1) / grid)
    let twiddle: Vec<Complex64> = (0..grid)
        .flat_map(|g| (1..=v as u64).map(move |x| unit_root(g * x % grid, grid)))
        .collect();
    let total = det_sum(grid * lambdas, |k| {
        let g = (k / lambdas) as usize;
        let l = (k % lambdas) as usize;
        let tw = &twiddle[g * v..(g + 1) * v];
        let mut s = Complex64::new(0.0, 0.0);
        for x in 0..v {
            s += coeff[l * v + x] * tw[x];
        }
        Complex64::new(s.norm_sqr().powi(two_r / 2), 0.0)
    });
    Ok(total.re / grid as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaKind {
    L3,
    L4,
    L5,
    L6,
}

/// Inputs to a mean value bound. `q` is the size of the complete-sum
/// domain: `q` for L3 to L5 and `q^n` for L6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaInputs {
    pub q: f64,
    pub v: u64,
    pub r: u32,
    pub d: u32,
    pub s: u32,
    /// `J_{r,d}(V)`.
    pub j: Option<u64>,
    /// `J_{r-s-1,d}(V)` (L4 only; taken as 1 when `r = s + 1`).
    pub j_reduced: Option<u64>,
}

/// Main term of the bound, without the `q^{o(1)}` factor.
pub fn lemma_rhs(kind: LemmaKind, x: &LemmaInputs) -> Result<f64> {
    let vr = (x.v as f64).powi(x.r as i32);
    let sq = x.q.sqrt();
    let j = || x.j.map(|j| j as f64).ok_or(Error::MissingCount("J_{r,d}(V)"));
    Ok(match kind {
        LemmaKind::L3 => x.q * vr + sq * j()?.sqrt() * vr,
        LemmaKind::L4 => {
            if x.r < x.s + 1 {
                return Err(Error::InvalidConfig(format!("r = {} < s + 1 = {}", x.r, x.s + 1)));
            }
            let jr = if x.r == x.s + 1 {
                1.0
            } else {
                x.j_reduced
                    .ok_or(Error::MissingCount("J_{r-s-1,d}(V)"))? as f64
            };
            x.q * vr + sq * jr * (x.v as f64).powi(2 * x.s as i32 + 2)
        }
        LemmaKind::L5 | LemmaKind::L6 => x.q * vr + sq * j()?,
    })
}

/// `phi_i(v)` from `1 = phi_i(v) * integral_{-delta}^{delta} e(x v^i) dx` with
/// `delta = 1 / (4 V^i)`; the integral is `sin(2 pi delta v^i) / (pi v^i)`.
pub fn phi_value(i: u32, v: u64, big_v: u64) -> f64 {
    let vi = (v as f64).powi(i as i32);
    let ratio = (v as f64 / big_v as f64).powi(i as i32);
    std::f64::consts::PI * vi / (std::f64::consts::FRAC_PI_2 * ratio).sin()
}

/// `beta_v = prod_{i <= d} phi_i(v)`, scaled so the largest weight is 1.
pub fn phi_product_weights(big_v: u64, d: u32) -> Vec<Complex64> {
    let raw: Vec<f64> = (1..=big_v)
        .map(|v| (1..=d).map(|i| phi_value(i, v, big_v)).product())
        .collect();
    let max = raw.iter().cloned().fold(0.0, f64::max);
    raw.into_iter().map(|w| Complex64::new(w / max, 0.0)).collect()
}

pub fn unit_weights(v: u64) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); v as usize]
}
