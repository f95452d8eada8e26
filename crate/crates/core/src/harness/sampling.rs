//! Seeded instance generation. All randomness flows from one SplitMix64
//! stream per campaign, consumed in instance order before any parallel work.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::config::CampaignConfig;
use crate::characters::{build_prime_character, enumerate_primitive_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::mixed::LinearSystem;
use crate::modular::{factor_squarefree, is_prime, SquarefreeModulus};
use crate::poly::RealPolynomial;

pub const MIN_LEADING: f64 = 1e-3;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Exponent vectors of total degree `1..=d` in `nvars` variables, graded
/// and then reverse-lexicographic, so `x_1^d` comes last.
pub fn monomials(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(nvars, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 1..=d {
        rec(nvars, deg, &mut Vec::new(), &mut out);
    }
    out
}

/// Uniform `[0, 1)` coefficient on every monomial of degree `1..=d`; the
/// coefficient of `x_1^d` is redrawn until it is at least `1e-3`.
pub fn random_phase(rng: &mut SplitMix64, nvars: usize, d: u32) -> RealPolynomial {
    let mons = monomials(nvars, d);
    let mut lead = vec![0u32; nvars];
    lead[0] = d;
    let terms: Vec<(Vec<u32>, f64)> = mons
        .into_iter()
        .map(|m| {
            let mut c: f64 = rng.random();
            if m == lead {
                while c < MIN_LEADING {
                    c = rng.random();
                }
            }
            (m, c)
        })
        .collect();
    RealPolynomial::from_terms(nvars, terms).expect("finite coefficients")
}

pub fn phase_or_random(cfg: &CampaignConfig, rng: &mut SplitMix64, nvars: usize) -> RealPolynomial {
    match &cfg.phase {
        Some(p) => p.clone(),
        None => random_phase(rng, nvars, cfg.d),
    }
}

/// Candidate moduli: the explicit list, else `q_min..=q_max`, filtered.
pub fn moduli(cfg: &CampaignConfig, keep: impl Fn(u64) -> bool) -> Vec<u64> {
    match &cfg.moduli {
        Some(list) => list.iter().copied().filter(|&q| keep(q)).collect(),
        None => (cfg.q_min.max(2)..=cfg.q_max).filter(|&q| keep(q)).collect(),
    }
}

/// Squarefree moduli carrying primitive characters (odd, squarefree).
pub fn primitive_moduli(cfg: &CampaignConfig) -> Vec<SquarefreeModulus> {
    moduli(cfg, |q| q % 2 == 1 && q > 1)
        .into_iter()
        .filter_map(|q| factor_squarefree(q).ok())
        .collect()
}

pub fn primes(cfg: &CampaignConfig) -> Vec<u64> {
    moduli(cfg, is_prime)
}

/// `samples` distinct items in their original order (all when 0 or too few).
pub fn choose<T: Clone>(rng: &mut SplitMix64, items: &[T], samples: u32) -> Vec<T> {
    if samples == 0 || samples as usize >= items.len() {
        return items.to_vec();
    }
    let mut idx = sample(rng, items.len(), samples as usize).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

pub fn primitive_characters(
    rng: &mut SplitMix64,
    m: &SquarefreeModulus,
    samples: u32,
) -> Result<Vec<DirichletCharacter>> {
    Ok(choose(rng, &enumerate_primitive_characters(m)?, samples))
}

/// Non-principal characters mod a prime, `samples` distinct indices.
pub fn nonprincipal_characters(rng: &mut SplitMix64, p: u64, samples: u32) -> Result<Vec<DirichletCharacter>> {
    if p == 2 {
        return Ok(Vec::new());
    }
    let ts: Vec<u64> = (1..p - 1).collect();
    choose(rng, &ts, samples)
        .into_iter()
        .map(|t| DirichletCharacter::from_components(vec![build_prime_character(p, t)?]))
        .collect()
}

/// Random integer `n x n` system with entries in `[-3, 3]`, independent mod `q`.
pub fn random_linear_system(rng: &mut SplitMix64, n: usize, q: u64) -> Result<LinearSystem> {
    for _ in 0..1000 {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect())
            .collect();
        let l = LinearSystem::new(m)?;
        if l.check_independent_mod(q).is_ok() {
            return Ok(l);
        }
    }
    Err(Error::SingularSystem(q))
}
