//! Multiplicative energies: the number of quadruples with `a b = c d` for
//! intervals times units mod `q`, boxes in `GF(q^n)`, and boxes under a
//! system of linear forms.
//!
//! Each energy has a naive quadruple enumeration and a hashed count
//! `sum_c m_c^2` over product multiplicities. Size hypotheses are checked
//! unless `override_hypotheses` is set.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{box_points, FieldSpec};
use crate::mixed::LinearSystem;
use crate::modular::gcd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMethod {
    Naive,
    Hashed,
}

/// One energy problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum EnergyInstance {
    Congruence { q: u64, m: i64, n: u64, u: u64 },
    FieldBox { q: u64, n: usize, h: u64, u: u64 },
    LinearForms { q: u64, l: LinearSystem, h: u64, u: u64 },
}

impl EnergyInstance {
    pub fn count(&self, method: EnergyMethod, override_hypotheses: bool) -> Result<u64> {
        match self {
            EnergyInstance::Congruence { q, m, n, u } => {
                cong_energy(*q, *m, *n, *u, method, override_hypotheses)
            }
            EnergyInstance::FieldBox { q, n, h, u } => {
                let spec = crate::field::build_field(*q, *n)?;
                ff_box_energy(&spec, *h, *u, method, override_hypotheses)
            }
            EnergyInstance::LinearForms { q, l, h, u } => {
                linear_forms_energy(*q, l, *h, *u, method, override_hypotheses)
            }
        }
    }
}

fn sum_of_squares<K: Hash + Eq, I: IntoIterator<Item = K>>(keys: I) -> u64 {
    let mut m: HashMap<K, u64> = HashMap::new();
    for k in keys {
        *m.entry(k).or_insert(0) += 1;
    }
    m.values().map(|c| c * c).sum()
}

fn pairs_budget(len: usize) -> Result<()> {
    let needed = (len as u128) * (len as u128);
    if needed > 1u128 << 40 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: 1 << 40,
        });
    }
    Ok(())
}

fn check_sqrt_bound(h: u64, u: u64, q: u64) -> Result<()> {
    if (h as u128).pow(2) > q as u128 || (u as u128).pow(2) > q as u128 {
        return Err(Error::HypothesisViolated(format!(
            "H = {h}, U = {u} must not exceed sqrt({q})"
        )));
    }
    Ok(())
}

/// `#{n_1 u_1 = n_2 u_2 (mod q) : M < n_i <= M + N, 1 <= u_i <= U, (u_i, q) = 1}`.
pub fn cong_energy(
    q: u64,
    m: i64,
    n: u64,
    u: u64,
    method: EnergyMethod,
    override_hypotheses: bool,
) -> Result<u64> {
    if q < 2 {
        return Err(Error::OutOfRange {
            what: "q",
            value: q,
            limit: 2,
        });
    }
    if !override_hypotheses && (n as u128) * (u as u128) > q as u128 {
        return Err(Error::HypothesisViolated(format!("N U = {} exceeds q = {q}", n as u128 * u as u128)));
    }
    let units: Vec<u64> = (1..=u).filter(|&x| gcd(x, q) == 1).collect();
    let ns: Vec<u64> = (1..=n)
        .map(|k| (m as i128 + k as i128).rem_euclid(q as i128) as u64)
        .collect();
    let prod = |a: u64, b: u64| ((a as u128 * b as u128) % q as u128) as u64;
    match method {
        EnergyMethod::Hashed => Ok(sum_of_squares(
            ns.iter().flat_map(|&a| units.iter().map(move |&b| prod(a, b))),
        )),
        EnergyMethod::Naive => {
            pairs_budget(ns.len() * units.len())?;
            let mut count = 0u64;
            for &n1 in &ns {
                for &u1 in &units {
                    let left = prod(n1, u1);
                    for &n2 in &ns {
                        for &u2 in &units {
                            if prod(n2, u2) == left {
                                count += 1;
                            }
                        }
                    }
                }
            }
            Ok(count)
        }
    }
}

/// `#{x_1 x_2 = x_3 x_4 : x_1, x_3 in B(H), x_2, x_4 in B(U)}` in `GF(q^n)`.
///
/// The hashed count keys products by discrete logarithm; the naive count
/// multiplies polynomials directly.
pub fn ff_box_energy(
    spec: &FieldSpec,
    h: u64,
    u: u64,
    method: EnergyMethod,
    override_hypotheses: bool,
) -> Result<u64> {
    if !override_hypotheses {
        check_sqrt_bound(h, u, spec.q())?;
    }
    let bh = box_points(spec, h)?;
    let bu = box_points(spec, u)?;
    match method {
        EnergyMethod::Hashed => {
            let order = spec.size() - 1;
            Ok(sum_of_squares(bh.iter().flat_map(|a| {
                bu.iter().map(move |b| match (spec.log_code(a.code), spec.log_code(b.code)) {
                    (Some(x), Some(y)) => Some((x + y) % order),
                    _ => None,
                })
            })))
        }
        EnergyMethod::Naive => {
            pairs_budget(bh.len() * bu.len())?;
            let eh: Vec<_> = bh.iter().map(|p| spec.decode(p.code)).collect();
            let eu: Vec<_> = bu.iter().map(|p| spec.decode(p.code)).collect();
            let prods: Vec<_> = eh
                .iter()
                .flat_map(|a| eu.iter().map(move |b| spec.mul_poly(a, b)))
                .collect();
            let mut count = 0u64;
            for x in &prods {
                count += prods.iter().filter(|y| *y == x).count() as u64;
            }
            Ok(count)
        }
    }
}

/// `#{L_i(x_1) L_i(x_2) = L_i(x_3) L_i(x_4) (mod q) for all i}` with
/// `x_1, x_3 in [1, H]^n` and `x_2, x_4 in [1, U]^n`.
pub fn linear_forms_energy(
    q: u64,
    l: &LinearSystem,
    h: u64,
    u: u64,
    method: EnergyMethod,
    override_hypotheses: bool,
) -> Result<u64> {
    l.check_independent_mod(q)?;
    if !override_hypotheses {
        check_sqrt_bound(h, u, q)?;
    }
    let n = l.n();
    let forms = |side: u64| -> Result<Vec<Vec<u64>>> {
        let total = side
            .checked_pow(n as u32)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::TooLarge(format!("box [1,{side}]^{n}")))?;
        Ok((0..total)
            .map(|mut idx| {
                let x: Vec<i64> = (0..n)
                    .map(|_| {
                        let c = (idx % side + 1) as i64;
                        idx /= side;
                        c
                    })
                    .collect();
                l.eval(&x)
                    .into_iter()
                    .map(|v| v.rem_euclid(q as i64) as u64)
                    .collect()
            })
            .collect())
    };
    let lh = forms(h)?;
    let lu = forms(u)?;
    let prod = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((x as u128 * y as u128) % q as u128) as u64)
            .collect()
    };
    match method {
        EnergyMethod::Hashed => Ok(sum_of_squares(
            lh.iter().flat_map(|a| lu.iter().map(move |b| prod(a, b))),
        )),
        EnergyMethod::Naive => {
            pairs_budget(lh.len() * lu.len())?;
            let mut count = 0u64;
            for x1 in &lh {
                for x2 in &lu {
                    for x3 in &lh {
                        for x4 in &lu {
                            if (0..n).all(|i| {
                                (x1[i] as u128 * x2[i] as u128) % q as u128
                                    == (x3[i] as u128 * x4[i] as u128) % q as u128
                            }) {
                                count += 1;
                            }
                        }
                    }
                }
            }
            Ok(count)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use EnergyMethod::*;

    #[test]
    fn congruence_examples() {
        assert_eq!(cong_energy(5, 0, 2, 2, Hashed, false).unwrap(), 6);
        assert_eq!(cong_energy(5, 0, 2, 2, Naive, false).unwrap(), 6);
        for q in [7u64, 30, 101] {
            assert_eq!(cong_energy(q, 3, 5, 1, Hashed, false).unwrap(), 5);
        }
        assert!(matches!(cong_energy(10, 0, 4, 3, Hashed, false), Err(Error::HypothesisViolated(_))));
        assert!(cong_energy(10, 0, 4, 3, Hashed, true).is_ok());
    }

    #[test]
    fn congruence_methods_agree() {
        for q in [30u64, 77, 101, 210] {
            for (m, n, u) in [(0i64, 5u64, 4u64), (17, 9, 3), (-4, 6, 6)] {
                let a = cong_energy(q, m, n, u, Hashed, true).unwrap();
                let b = cong_energy(q, m, n, u, Naive, true).unwrap();
                assert_eq!(a, b);
                let units = (1..=u).filter(|&x| gcd(x, q) == 1).count() as u64;
                assert!(a >= n * units);
            }
        }
    }

    #[test]
    fn field_box_cases() {
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(ff_box_energy(&f9, 1, 1, Hashed, false).unwrap(), 1);
        assert!(ff_box_energy(&f9, 2, 1, Hashed, false).is_err());
        let f25 = build_field(5, 2).unwrap();
        let a = ff_box_energy(&f25, 2, 2, Hashed, false).unwrap();
        assert_eq!(a, ff_box_energy(&f25, 2, 2, Naive, false).unwrap());
        assert!(a >= 16);
        let f125 = build_field(5, 3).unwrap();
        let a = ff_box_energy(&f125, 3, 2, Hashed, true).unwrap();
        assert_eq!(a, ff_box_energy(&f125, 3, 2, Naive, true).unwrap());
        assert!(a >= 6u64.pow(3));
    }

    #[test]
    fn linear_forms_cases() {
        let id = LinearSystem::identity(1);
        let direct = (1..=3u64)
            .flat_map(|a| (1..=3u64).map(move |b| (a * b) % 11))
            .collect::<Vec<_>>();
        let brute = direct.iter().map(|x| direct.iter().filter(|y| *y == x).count() as u64).sum::<u64>();
        assert_eq!(linear_forms_energy(11, &id, 3, 3, Hashed, false).unwrap(), brute);
        assert_eq!(linear_forms_energy(7, &LinearSystem::identity(2), 1, 1, Naive, false).unwrap(), 1);
        let l = LinearSystem::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let a = linear_forms_energy(7, &l, 2, 2, Hashed, false).unwrap();
        assert_eq!(a, linear_forms_energy(7, &l, 2, 2, Naive, false).unwrap());
        assert!(a >= 16);
        let sing = LinearSystem::new(vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(linear_forms_energy(7, &sing, 2, 2, Hashed, false), Err(Error::SingularSystem(7)));
    }

    #[test]
    fn diagonal_system_factorizes() {
        let l = LinearSystem::new(vec![vec![2, 0], vec![0, 3]]).unwrap();
        let two = linear_forms_energy(13, &l, 3, 2, Hashed, false).unwrap();
        let one_a = linear_forms_energy(13, &LinearSystem::new(vec![vec![2]]).unwrap(), 3, 2, Hashed, false).unwrap();
        let one_b = linear_forms_energy(13, &LinearSystem::new(vec![vec![3]]).unwrap(), 3, 2, Hashed, false).unwrap();
        assert_eq!(two, one_a * one_b);
    }

    #[test]
    fn instance_dispatch() {
        let inst = EnergyInstance::Congruence { q: 5, m: 0, n: 2, u: 2 };
        assert_eq!(inst.count(Hashed, false).unwrap(), 6);
        let json = serde_json::to_string(&inst).unwrap();
        assert!(json.contains("\"variant\":\"congruence\""));
    }
}
