//! Campaigns for the five mixed-sum bounds: each instance records `|S|`,
//! the main term of the bound, their ratio and the term count.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{CampaignConfig, Target};
use super::exponents::{
    big_d, field_box_exponent, multichar_exponent, thm1_exponent, thm1_length_limit,
    thm2_exponent, thm2_length_limit,
};
use super::report::{Record, VerificationReport};
use super::sampling::{self, phase_or_random};
use crate::characters::{e, DirichletCharacter};
use crate::energy::{cong_energy, EnergyMethod};
use crate::error::{Error, Result};
use crate::field::{build_field, FieldCharacter, FieldSpec};
use crate::mean_values::{exact_w_squarefree, phi_product_weights, VinogradovParams};
use crate::mixed::{box_mixed_sum, linear_forms_mixed_sum, mixed_sum, multi_char_mixed_sum, LinearSystem};
use crate::modular::{gcd, mod_inverse, SquarefreeModulus};
use crate::poly::RealPolynomial;

/// `r` for a theorem target: the configured value, else the least admissible.
fn theorem_r(cfg: &CampaignConfig) -> Result<u32> {
    let r_d = cfg
        .r_d
        .ok_or_else(|| Error::InvalidConfig("r_d is required".into()))?;
    let least = match cfg.target {
        Target::Thm2 => r_d + thm2_s(cfg)? + 1,
        _ => r_d,
    };
    let r = cfg.r.unwrap_or(least);
    if r < least && !cfg.override_hypotheses {
        return Err(Error::HypothesisViolated(format!("r = {r} below the admissible {least}")));
    }
    Ok(r)
}

fn thm2_s(cfg: &CampaignConfig) -> Result<u32> {
    cfg.s
        .ok_or_else(|| Error::InvalidConfig("thm2 needs s (bound on the number of prime factors)".into()))
}

fn chi_json(chi: &DirichletCharacter) -> Value {
    json!({ "q": chi.q(), "indices": chi.indices() })
}

fn base_notes(cfg: &CampaignConfig, r: u32) -> Vec<String> {
    vec![
        format!("r_d = {} (configuration input), r = {r}, D = {}", cfg.r_d.unwrap_or(0), big_d(cfg.d)),
        "pass requires |S| <= #terms on every instance and, when set, max ratio <= threshold".into(),
    ]
}

fn interval_length(cfg: &CampaignConfig, limit: f64) -> Result<u64> {
    let cap = limit.floor().max(1.0) as u64;
    match cfg.length {
        Some(n) if n as f64 > limit && !cfg.override_hypotheses => Err(Error::HypothesisViolated(format!(
            "N = {n} exceeds the admissible {limit:.3}"
        ))),
        Some(n) => Ok(n),
        None => Ok(cap),
    }
}

struct IntervalInstance {
    q: u64,
    chi: DirichletCharacter,
    f: RealPolynomial,
    m: i64,
    n: u64,
}

fn interval_instances(cfg: &CampaignConfig, r: u32, mods: &[SquarefreeModulus]) -> Result<Vec<IntervalInstance>> {
    let mut rng = sampling::rng(cfg.seed);
    let mut out = Vec::new();
    for m in mods {
        let q = m.q();
        let limit = match cfg.target {
            Target::Thm1 => thm1_length_limit(q, r, cfg.d)?,
            _ => thm2_length_limit(q, r, cfg.d)?,
        };
        let n = interval_length(cfg, limit)?;
        for chi in sampling::primitive_characters(&mut rng, m, cfg.samples)? {
            let f = phase_or_random(cfg, &mut rng, 1);
            let start = rng.random_range(0..q) as i64;
            out.push(IntervalInstance { q, chi, f, m: start, n });
        }
    }
    Ok(out)
}

/// Intermediate quantities of the smoothing argument for an interval sum:
/// `U`, `V`, statistics of `I(lambda)`, the smoothed sum `W` maximised over
/// an `alpha` grid and the mean value `W_1` with `phi` weights.
fn interval_diagnostics(cfg: &CampaignConfig, inst: &IntervalInstance, r: u32) -> BTreeMap<String, Value> {
    let q = inst.q;
    let dd = big_d(cfg.d) as f64;
    let span = match cfg.target {
        Target::Thm1 => r as f64 - dd / 2.0,
        _ => r as f64 - dd,
    };
    let scale = (q as f64).powf(1.0 / (2.0 * span));
    let u = (inst.n as f64 / scale).floor() as u64;
    let v = scale.floor().max(1.0) as u64;
    let units: Vec<u64> = (1..=u).filter(|&x| gcd(x, q) == 1).collect();
    let mut out = BTreeMap::new();
    out.insert("U".into(), json!(u));
    out.insert("V".into(), json!(v));
    out.insert("units".into(), json!(units.len()));

    let lo = inst.m - inst.n as i64;
    let mut counts = vec![0u64; q as usize];
    for k in 1..=2 * inst.n as i64 {
        let n = (lo + k).rem_euclid(q as i64);
        for &x in &units {
            let inv = mod_inverse(x as i64, q).expect("unit");
            counts[((n as u128 * inv as u128) % q as u128) as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let squares: u64 = counts.iter().map(|c| c * c).sum();
    out.insert("I_sum".into(), json!(total));
    out.insert("I_sum_squares".into(), json!(squares));
    out.insert("I_max".into(), json!(counts.iter().max().copied().unwrap_or(0)));
    out.insert("I_support".into(), json!(counts.iter().filter(|&&c| c > 0).count()));
    if u > 0 {
        let energy = cong_energy(q, lo, 2 * inst.n, u, EnergyMethod::Hashed, true).ok();
        out.insert("energy".into(), json!(energy));
        out.insert("I_squares_match_energy".into(), json!(energy == Some(squares)));

        // W(alpha) = sum_n sum_u |sum_v chi(n + uv) e(F(n + uv)) e(alpha v)|
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for k in 1..=2 * inst.n as i64 {
            for &x in &units {
                rows.push(
                    (1..=v as i64)
                        .map(|t| {
                            let at = lo + k + x as i64 * t;
                            inst.chi.value(at) * inst.f.eval_phase(&[at]).unwrap_or(Complex64::new(0.0, 0.0))
                        })
                        .collect(),
                );
            }
        }
        let grid = cfg.grid.max(1);
        let (mut best, mut best_alpha) = (0.0f64, 0.0f64);
        for g in 0..grid {
            let alpha = g as f64 / grid as f64;
            let tw: Vec<Complex64> = (1..=v).map(|t| e(alpha * t as f64)).collect();
            let w: f64 = rows
                .iter()
                .map(|row| row.iter().zip(&tw).map(|(a, b)| a * b).sum::<Complex64>().norm())
                .sum();
            if w > best {
                best = w;
                best_alpha = alpha;
            }
        }
        out.insert("W".into(), json!(best));
        out.insert("W_alpha".into(), json!(best_alpha));
        out.insert(
            "smoothed_bound".into(),
            json!((inst.n as f64).ln() * best / (units.len() as f64 * v as f64)),
        );
    }
    let w1 = VinogradovParams::new(r, cfg.d, v)
        .map(|p| p.with_budget(cfg.budget))
        .and_then(|p| exact_w_squarefree(&inst.chi, &phi_product_weights(v, cfg.d), &p));
    match w1 {
        Ok(w) => out.insert("W1".into(), json!(w)),
        Err(e) => out.insert("W1".into(), json!(e.to_string())),
    };
    out
}

fn verify_interval(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let r = theorem_r(cfg)?;
    let exponent = match cfg.target {
        Target::Thm1 => thm1_exponent(r, cfg.d)?,
        _ => thm2_exponent(r, cfg.d)?,
    };
    let mut notes = base_notes(cfg, r);
    let mut mods = sampling::primitive_moduli(cfg);
    if cfg.target == Target::Thm2 {
        let s = thm2_s(cfg)?;
        let before = mods.len();
        mods.retain(|m| m.omega() as u32 <= s);
        notes.push(format!("s = {s}; {} moduli with more than s prime factors skipped", before - mods.len()));
    }
    let instances = interval_instances(cfg, r, &mods)?;
    let records: Result<Vec<Record>> = instances
        .par_iter()
        .map(|inst| {
            let s = mixed_sum(&inst.chi, &inst.f, inst.m, inst.n)?;
            let main = (inst.n as f64).powf(1.0 - 1.0 / r as f64) * (inst.q as f64).powf(exponent);
            let mut rec = Record::new(cfg.target.name(), s.norm(), cfg.scale(main, inst.q as f64))
                .param("q", inst.q)
                .param("chi", chi_json(&inst.chi))
                .param("phase", &inst.f)
                .param("M", inst.m)
                .param("N", inst.n)
                .param("r", r)
                .terms(inst.n as f64);
            if cfg.diagnostics {
                rec.diagnostics = Some(interval_diagnostics(cfg, inst, r));
            }
            Ok(rec)
        })
        .collect();
    Ok(VerificationReport::assemble(cfg.clone(), records?, notes))
}

fn basis_for(cfg: &CampaignConfig, spec: FieldSpec) -> Result<FieldSpec> {
    match &cfg.basis {
        Some(rows) => spec.with_basis(rows.clone()),
        None => Ok(spec),
    }
}

fn box_side(cfg: &CampaignConfig, q: u64) -> Result<u64> {
    let root = (q as f64).sqrt().floor() as u64;
    match cfg.h {
        Some(h) if h * h > q && !cfg.override_hypotheses => Err(Error::HypothesisViolated(format!(
            "H = {h} exceeds sqrt({q})"
        ))),
        Some(h) => Ok(h),
        None => Ok(root.max(1)),
    }
}

fn verify_field_box(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let r = theorem_r(cfg)?;
    let exponent = field_box_exponent(r, cfg.d, cfg.n as u32)?;
    let mut notes = base_notes(cfg, r);
    let mut rng = sampling::rng(cfg.seed);
    let mut instances: Vec<(Arc<FieldSpec>, FieldCharacter, RealPolynomial, u64)> = Vec::new();
    for p in sampling::primes(cfg) {
        let size = (p as u128).pow(cfg.n as u32);
        if size > cfg.field_max as u128 {
            continue;
        }
        let spec = Arc::new(basis_for(cfg, build_field(p, cfg.n)?)?);
        let h = box_side(cfg, p)?;
        let order = spec.size() - 1;
        let ts: Vec<u64> = (1..order).collect();
        for t in sampling::choose(&mut rng, &ts, cfg.samples) {
            let chi = FieldCharacter::new(spec.clone(), t)?;
            let f = phase_or_random(cfg, &mut rng, cfg.n);
            instances.push((spec.clone(), chi, f, h));
        }
    }
    notes.push(format!("fields limited to q^n <= {}", cfg.field_max));
    notes.push(match &cfg.basis {
        Some(b) => format!("basis rows (power-basis coordinates): {b:?}"),
        None => "basis: power basis 1, x, ..., x^(n-1)".into(),
    });
    let records: Result<Vec<Record>> = instances
        .par_iter()
        .map(|(spec, chi, f, h)| {
            let s = box_mixed_sum(chi, f, *h)?;
            let terms = (*h as f64).powi(cfg.n as i32);
            let main = terms.powf(1.0 - 1.0 / r as f64) * (spec.q() as f64).powf(exponent);
            Ok(Record::new("thm3", s.norm(), cfg.scale(main, spec.q() as f64))
                .param("field", spec.summary())
                .param("t", chi.t())
                .param("phase", f)
                .param("H", h)
                .param("r", r)
                .terms(terms))
        })
        .collect();
    Ok(VerificationReport::assemble(cfg.clone(), records?, notes))
}

/// Nondecreasing `n`-tuples from `items`.
fn multisets(items: &[u64], n: usize) -> Vec<Vec<u64>> {
    fn rec(items: &[u64], n: usize, from: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            cur.push(items[i]);
            rec(items, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, n, 0, &mut Vec::new(), &mut out);
    out
}

struct MultiInstance {
    chis: Vec<DirichletCharacter>,
    f: RealPolynomial,
    ms: Vec<i64>,
    hs: Vec<u64>,
}

fn verify_multichar(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let r = theorem_r(cfg)?;
    let dd = big_d(cfg.d);
    if r <= dd {
        return Err(Error::DegenerateDenominator { r, big_d: dd });
    }
    let exponent = multichar_exponent(r, cfg.d, cfg.n as u32)?;
    let gap = (r - dd) as f64;
    let mut notes = base_notes(cfg, r);
    let mut rng = sampling::rng(cfg.seed);
    let mut instances = Vec::new();
    let mut skipped = 0usize;
    for tuple in multisets(&sampling::primes(cfg), cfg.n) {
        let q: f64 = tuple.iter().map(|&p| p as f64).product();
        let lower = q.powf(1.0 / (2.0 * gap));
        let mut hs = Vec::with_capacity(tuple.len());
        let mut ok = true;
        for &p in &tuple {
            let upper = (p as f64).powf(0.5 + 1.0 / (4.0 * gap));
            let h = cfg.h.unwrap_or(upper.floor() as u64).max(1);
            ok &= p as f64 > lower && h as f64 >= lower && h as f64 <= upper;
            hs.push(h);
        }
        if !ok && !cfg.override_hypotheses {
            skipped += 1;
            continue;
        }
        for _ in 0..cfg.samples.max(1) {
            let mut chis = Vec::with_capacity(tuple.len());
            let mut ms = Vec::with_capacity(tuple.len());
            for &p in &tuple {
                chis.extend(sampling::nonprincipal_characters(&mut rng, p, 1)?);
                ms.push(rng.random_range(0..p) as i64);
            }
            if chis.len() != tuple.len() {
                continue;
            }
            let f = phase_or_random(cfg, &mut rng, cfg.n);
            instances.push(MultiInstance { chis, f, ms, hs: hs.clone() });
        }
    }
    notes.push(format!("{skipped} prime tuples outside the admissible box sizes skipped"));
    if instances.is_empty() && skipped > 0 {
        return Err(Error::HypothesisViolated("no admissible prime tuple in range".into()));
    }
    let records: Result<Vec<Record>> = instances
        .par_iter()
        .map(|inst| {
            let s = multi_char_mixed_sum(&inst.chis, &inst.f, &inst.ms, &inst.hs)?;
            let q: f64 = inst.chis.iter().map(|c| c.q() as f64).product();
            let terms: f64 = inst.hs.iter().map(|&h| h as f64).product();
            let main = terms.powf(1.0 - 1.0 / r as f64) * q.powf(exponent);
            Ok(Record::new("thm4", s.norm(), cfg.scale(main, q))
                .param("chis", inst.chis.iter().map(chi_json).collect::<Vec<_>>())
                .param("phase", &inst.f)
                .param("M", &inst.ms)
                .param("H", &inst.hs)
                .param("r", r)
                .terms(terms))
        })
        .collect();
    Ok(VerificationReport::assemble(cfg.clone(), records?, notes))
}

fn verify_linear_forms(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let r = theorem_r(cfg)?;
    let exponent = field_box_exponent(r, cfg.d, cfg.n as u32)?;
    let mut notes = base_notes(cfg, r);
    notes.push("box coordinates run over 1 <= h_i <= H".into());
    let mut rng = sampling::rng(cfg.seed);
    let mut instances: Vec<(DirichletCharacter, LinearSystem, RealPolynomial, u64)> = Vec::new();
    for p in sampling::primes(cfg).into_iter().filter(|&p| p > 2) {
        let h = box_side(cfg, p)?;
        for chi in sampling::nonprincipal_characters(&mut rng, p, cfg.samples)? {
            let l = sampling::random_linear_system(&mut rng, cfg.n, p)?;
            let f = phase_or_random(cfg, &mut rng, cfg.n);
            instances.push((chi, l, f, h));
        }
    }
    let records: Result<Vec<Record>> = instances
        .par_iter()
        .map(|(chi, l, f, h)| {
            let s = linear_forms_mixed_sum(chi, l, f, *h)?;
            let terms = (*h as f64).powi(cfg.n as i32);
            let q = chi.q() as f64;
            let main = terms.powf(1.0 - 1.0 / r as f64) * q.powf(exponent);
            Ok(Record::new("thm5", s.norm(), cfg.scale(main, q))
                .param("chi", chi_json(chi))
                .param("L", l.matrix())
                .param("phase", f)
                .param("H", h)
                .param("r", r)
                .terms(terms))
        })
        .collect();
    Ok(VerificationReport::assemble(cfg.clone(), records?, notes))
}

pub fn verify_theorem(cfg: &CampaignConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    match cfg.target {
        Target::Thm1 | Target::Thm2 => verify_interval(cfg),
        Target::Thm3 => verify_field_box(cfg),
        Target::Thm4 => verify_multichar(cfg),
        Target::Thm5 => verify_linear_forms(cfg),
        t => Err(Error::InvalidConfig(format!("{} is not a theorem target", t.name()))),
    }
}
