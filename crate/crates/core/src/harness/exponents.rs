//! Exponents of the competing bounds for `sum chi(n) e(F(n))`, as functions
//! of `N`, `q`, `d`, `r` and `delta` where `N = q^{1/4 + delta}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `D = d(d+1)/2`.
pub fn big_d(d: u32) -> u32 {
    d * (d + 1) / 2
}

/// Chang: `|S| << N q^{-eps}` with `eps = delta^2 / (4 (1 + 2 delta)(2 + (d+1)^2))`.
pub fn chang_epsilon(delta: f64, d: u32) -> f64 {
    let d1 = (d + 1) as f64;
    delta * delta / (4.0 * (1.0 + 2.0 * delta) * (2.0 + d1 * d1))
}

/// Chang's box version over `GF(q^n)`.
pub fn chang_box_epsilon(delta: f64, d: u32, n: u32) -> f64 {
    let d1 = (d + 1) as f64;
    delta * delta * n as f64 / (4.0 * (1.0 + 2.0 * delta) * (2.0 * n as f64 + d1 * d1))
}

/// Heath-Brown-Pierce: `|S| <= N^{1-1/r} q^{(r+1-D) / (4r(r-D))}`.
pub fn hbp_exponent(r: u32, d: u32) -> Result<f64> {
    let dd = big_d(d);
    if r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    let (r, dd) = (r as f64, dd as f64);
    Ok((r + 1.0 - dd) / (4.0 * r * (r - dd)))
}

/// Small-`delta` behaviour of the saving in the Heath-Brown-Pierce bound.
pub fn hbp_asymptotic_epsilon(delta: f64, d: u32) -> f64 {
    let x = 2.0 * delta / (1.0 + (1.0 + 2.0 * (d * (d + 1)) as f64 * delta).sqrt());
    x * x
}

/// Squarefree bound: `q^{1/(4r) + D/(8r(r-D/2)) + 1/(4r(r-D/2))}`.
pub fn thm1_exponent(r: u32, d: u32) -> Result<f64> {
    let dd = big_d(d);
    if 2 * r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    let (r, dd) = (r as f64, dd as f64);
    let h = r - dd / 2.0;
    Ok(1.0 / (4.0 * r) + dd / (8.0 * r * h) + 1.0 / (4.0 * r * h))
}

/// Few-prime-factor squarefree bound; same exponent as [`hbp_exponent`].
pub fn thm2_exponent(r: u32, d: u32) -> Result<f64> {
    hbp_exponent(r, d)
}

/// Box bounds in `GF(q^n)` and for linear forms: `q^{n(r-D+1)/(4r(r-D))}`.
pub fn field_box_exponent(r: u32, d: u32, n: u32) -> Result<f64> {
    Ok(n as f64 * hbp_exponent(r, d)?)
}

/// Multi-character bound: `q^{(r-D+n)/(4r(r-D))}` with `q = prod q_i`.
pub fn multichar_exponent(r: u32, d: u32, n: u32) -> Result<f64> {
    let dd = big_d(d);
    if r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    let (r, dd) = (r as f64, dd as f64);
    Ok((r - dd + n as f64) / (4.0 * r * (r - dd)))
}

/// Largest `N` allowed by the squarefree bound: `q^{1/2 + 1/(4(r-D/2))}`.
pub fn thm1_length_limit(q: u64, r: u32, d: u32) -> Result<f64> {
    let dd = big_d(d);
    if 2 * r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    Ok((q as f64).powf(0.5 + 1.0 / (4.0 * (r as f64 - dd as f64 / 2.0))))
}

/// Largest `N` allowed by the few-prime-factor bound: `q^{1/2 + 1/(4(r-D))}`.
pub fn thm2_length_limit(q: u64, r: u32, d: u32) -> Result<f64> {
    let dd = big_d(d);
    if r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    Ok((q as f64).powf(0.5 + 1.0 / (4.0 * (r - dd) as f64)))
}

/// Savings `s` in `|S| <= N q^{-s}` for each bound at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub n: f64,
    pub q: f64,
    pub d: u32,
    pub r: u32,
    pub delta: f64,
    pub chang_epsilon: f64,
    pub hbp_q_exponent: f64,
    pub hbp_saving: f64,
    pub hbp_asymptotic_epsilon: f64,
    pub thm1_q_exponent: f64,
    pub thm1_saving: f64,
    pub thm2_q_exponent: f64,
    pub thm2_saving: f64,
}

/// For a bound `N^{1-1/r} q^e` the saving is `log_q(N) / r - e`.
pub fn compare_exponents(n: f64, q: f64, d: u32, r: u32, delta: f64) -> Result<ExponentTable> {
    let hbp = hbp_exponent(r, d)?;
    let t1 = thm1_exponent(r, d)?;
    let t2 = thm2_exponent(r, d)?;
    let lq = n.ln() / q.ln() / r as f64;
    Ok(ExponentTable {
        n,
        q,
        d,
        r,
        delta,
        chang_epsilon: chang_epsilon(delta, d),
        hbp_q_exponent: hbp,
        hbp_saving: lq - hbp,
        hbp_asymptotic_epsilon: hbp_asymptotic_epsilon(delta, d),
        thm1_q_exponent: t1,
        thm1_saving: lq - t1,
        thm2_q_exponent: t2,
        thm2_saving: lq - t2,
    })
}
