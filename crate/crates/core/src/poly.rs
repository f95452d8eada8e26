//! Real-coefficient phase polynomials `F(h_1, ..., h_n)`, evaluated mod 1.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::e;
use crate::error::{Error, Result};
use crate::reduce::sum_f64;

/// Terms whose magnitude exceeds this lose their fractional part in `f64`.
pub const PHASE_MAGNITUDE_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct RealPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<Term>,
}

impl TryFrom<PolyRepr> for RealPolynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        RealPolynomial::from_terms(r.nvars, r.terms.into_iter().map(|t| (t.exponents, t.coeff)))
    }
}

impl From<RealPolynomial> for PolyRepr {
    fn from(p: RealPolynomial) -> Self {
        PolyRepr {
            nvars: p.nvars,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coeff)| Term { exponents, coeff })
                .collect(),
        }
    }
}

impl RealPolynomial {
    pub fn zero(nvars: usize) -> Self {
        RealPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `(exponent multi-index, coefficient)` pairs; repeated
    /// multi-indices are added together.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        if nvars == 0 {
            return Err(Error::InvalidConfig("polynomial needs at least one variable".into()));
        }
        let mut map = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite coefficient {c}")));
            }
            *map.entry(exps).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(RealPolynomial { nvars, terms: map })
    }

    /// `coeffs[k]` multiplies `x^k`.
    pub fn univariate(coeffs: &[f64]) -> Result<Self> {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (vec![k as u32], c)),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, &c)| (e.clone(), c)),
        )
    }

    /// `F(point) mod 1` in `[0, 1)`, each monomial reduced mod 1 before the
    /// (compensated) accumulation.
    pub fn eval_frac(&self, point: &[i64]) -> Result<f64> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (exps, &c) in &self.terms {
            let mut m: i128 = 1;
            for (&x, &k) in point.iter().zip(exps) {
                for _ in 0..k {
                    m = m
                        .checked_mul(x as i128)
                        .ok_or(Error::PrecisionOverflow(f64::INFINITY))?;
                }
            }
            let mag = c.abs() * (m as f64).abs();
            if mag > PHASE_MAGNITUDE_LIMIT {
                return Err(Error::PrecisionOverflow(mag));
            }
            let frac_c = c - c.floor();
            let t = frac_c * m as f64;
            parts.push(t - t.floor());
        }
        let s = sum_f64(parts);
        Ok(s - s.floor())
    }

    /// `exp(2 pi i F(point))`.
    pub fn eval_phase(&self, point: &[i64]) -> Result<Complex64> {
        Ok(e(self.eval_frac(point)?))
    }
}

pub fn eval_phase(f: &RealPolynomial, point: &[i64]) -> Result<Complex64> {
    f.eval_phase(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn phase_examples() {
        let zero = RealPolynomial::zero(1);
        assert_eq!(zero.eval_phase(&[17]).unwrap(), Complex64::new(1.0, 0.0));
        let half = RealPolynomial::univariate(&[0.0, 0.5]).unwrap();
        assert!(close(half.eval_phase(&[3]).unwrap(), Complex64::new(-1.0, 0.0)));
        let ident = RealPolynomial::univariate(&[0.0, 1.0]).unwrap();
        for x in -50..50 {
            assert_eq!(ident.eval_frac(&[x]).unwrap(), 0.0);
        }
    }

    #[test]
    fn degree_and_arity() {
        let f = RealPolynomial::from_terms(2, [(vec![2, 1], 0.3), (vec![1, 0], 0.1)]).unwrap();
        assert_eq!(f.degree(), 3);
        assert!(matches!(f.eval_frac(&[1]), Err(Error::ArityMismatch { .. })));
        assert!(RealPolynomial::from_terms(2, [(vec![1], 0.3)]).is_err());
        assert!(RealPolynomial::from_terms(1, [(vec![1], f64::NAN)]).is_err());
    }

    #[test]
    fn precision_guard() {
        let f = RealPolynomial::univariate(&[0.0, 0.0, 0.5]).unwrap();
        assert!(f.eval_frac(&[1 << 20]).is_ok());
        assert!(matches!(f.eval_frac(&[1 << 27]), Err(Error::PrecisionOverflow(_))));
    }

    #[test]
    fn serde_roundtrip() {
        let f = RealPolynomial::from_terms(2, [(vec![2, 0], 0.3), (vec![1, 1], 0.25)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: RealPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn negative_coefficients_reduce_into_unit_interval() {
        let f = RealPolynomial::univariate(&[0.0, -0.25]).unwrap();
        assert!((f.eval_frac(&[1]).unwrap() - 0.75).abs() < 1e-15);
        assert!((f.eval_frac(&[-3]).unwrap() - 0.75).abs() < 1e-15);
    }
}
