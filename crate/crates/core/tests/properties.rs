use charsum_core::characters::crt_character;
use charsum_core::energy::{cong_energy, linear_forms_energy, EnergyMethod};
use charsum_core::harness::cache::JCache;
use charsum_core::harness::{self, CampaignConfig, Target};
use charsum_core::mean_values::{vinogradov_count_mitm, VinogradovParams};
use charsum_core::mixed::{
    complete_rational_char_sum, complete_rational_char_sum_crt, mixed_sum, LinearSystem, TupleSpec,
};
use charsum_core::modular::{crt_combine, crt_split, factor_squarefree, is_squarefree};
use charsum_core::poly::RealPolynomial;
use num_complex::Complex64;
use proptest::prelude::*;

fn squarefree() -> impl Strategy<Value = u64> {
    (3u64..400).prop_filter("squarefree", |&q| is_squarefree(q))
}

/// A squarefree modulus with an arbitrary character index tuple.
fn character() -> impl Strategy<Value = (u64, Vec<u64>)> {
    squarefree().prop_flat_map(|q| {
        let primes = factor_squarefree(q).unwrap().primes().to_vec();
        let idx: Vec<_> = primes.iter().map(|&p| 0..(p - 1).max(1)).collect();
        (Just(q), idx)
    })
}

fn near(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crt_roundtrip(q in squarefree(), n in -100_000i64..100_000) {
        let m = factor_squarefree(q).unwrap();
        prop_assert_eq!(crt_combine(&crt_split(n, &m), &m), n.rem_euclid(q as i64) as u64);
    }

    #[test]
    fn characters_are_multiplicative((q, idx) in character(), a in -5000i64..5000, b in -5000i64..5000) {
        let m = factor_squarefree(q).unwrap();
        let chi = crt_character(&m, &idx).unwrap();
        prop_assert!(near(chi.value(a) * chi.value(b), chi.value(a * b), 1e-9));
        prop_assert!(near(chi.value(a), chi.value(a + q as i64), 1e-12));
    }

    #[test]
    fn mixed_sums_split_over_intervals(
        (q, idx) in character(),
        c1 in 0.0f64..1.0,
        c2 in 0.0f64..1.0,
        m in -200i64..200,
        n1 in 0u64..150,
        n2 in 0u64..150,
    ) {
        let chi = crt_character(&factor_squarefree(q).unwrap(), &idx).unwrap();
        let f = RealPolynomial::univariate(&[0.0, c1, c2]).unwrap();
        let whole = mixed_sum(&chi, &f, m, n1 + n2).unwrap();
        let parts = mixed_sum(&chi, &f, m, n1).unwrap() + mixed_sum(&chi, &f, m + n1 as i64, n2).unwrap();
        prop_assert!(near(whole, parts, 1e-9));
        prop_assert!(whole.norm() <= (n1 + n2) as f64 + 1e-9);
    }

    #[test]
    fn integer_phases_are_periodic(
        (q, idx) in character(),
        a in -5i64..5,
        b in -5i64..5,
        m in -100i64..100,
        n in 1u64..100,
    ) {
        let chi = crt_character(&factor_squarefree(q).unwrap(), &idx).unwrap();
        let f = RealPolynomial::univariate(&[0.0, a as f64, b as f64]).unwrap();
        let s = mixed_sum(&chi, &f, m, n).unwrap();
        let shifted = mixed_sum(&chi, &f, m + q as i64, n).unwrap();
        prop_assert!(near(s, shifted, 1e-9));
        let plain: Complex64 = (1..=n as i64).map(|k| chi.value(m + k)).sum();
        prop_assert!(near(s, plain, 1e-9));
    }

    #[test]
    fn complete_sums_respect_symmetries(
        (q, idx) in character().prop_filter("small", |(q, _)| *q < 120),
        v in proptest::collection::vec(1u64..12, 4),
        shift in 0u64..20,
    ) {
        let chi = crt_character(&factor_squarefree(q).unwrap(), &idx).unwrap();
        let base = complete_rational_char_sum(&chi, &TupleSpec::new(2, v.clone()).unwrap());
        let swapped = TupleSpec::new(2, vec![v[1], v[0], v[3], v[2]]).unwrap();
        prop_assert!(near(base, complete_rational_char_sum(&chi, &swapped), 1e-8));
        let moved = TupleSpec::new(2, v.iter().map(|x| x + shift).collect()).unwrap();
        prop_assert!(near(base, complete_rational_char_sum(&chi, &moved), 1e-8));
        let spec = TupleSpec::new(2, v).unwrap();
        prop_assert!(near(base, complete_rational_char_sum_crt(&chi, &spec), 1e-8));
    }

    #[test]
    fn vinogradov_counts_are_bounded(r in 1u32..4, d in 1u32..4, v in 1u64..9) {
        let j = vinogradov_count_mitm(&VinogradovParams::new(r, d, v).unwrap()).unwrap();
        prop_assert!(j >= v.pow(r) && j <= v.pow(2 * r));
        let next = vinogradov_count_mitm(&VinogradovParams::new(r, d, v + 1).unwrap()).unwrap();
        prop_assert!(next >= j);
    }

    #[test]
    fn energy_routes_agree(q in 2u64..200, m in -50i64..50, n in 1u64..20, u in 1u64..6) {
        prop_assume!(n * u <= q);
        let a = cong_energy(q, m, n, u, EnergyMethod::Hashed, false).unwrap();
        let b = cong_energy(q, m, n, u, EnergyMethod::Naive, false).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn linear_form_routes_agree(
        p in prop::sample::select(vec![11u64, 13, 17, 19, 23, 29, 31, 37]),
        entries in proptest::collection::vec(-4i64..5, 4),
        h in 1u64..4,
        u in 1u64..4,
    ) {
        let l = LinearSystem::new(vec![entries[..2].to_vec(), entries[2..].to_vec()]).unwrap();
        prop_assume!(l.check_independent_mod(p).is_ok());
        let a = linear_forms_energy(p, &l, h, u, EnergyMethod::Hashed, false).unwrap();
        let b = linear_forms_energy(p, &l, h, u, EnergyMethod::Naive, false).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a >= (h * u).pow(2));
    }

    #[test]
    fn cache_bytes_roundtrip(entries in proptest::collection::vec((1u32..6, 1u32..6, 1u32..100, any::<u64>()), 0..20)) {
        let mut c = JCache::new();
        for (r, d, v, n) in entries {
            c.insert(r, d, v, n);
        }
        prop_assert_eq!(JCache::from_bytes(&c.to_bytes()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), threads in 1usize..4) {
        let mut cfg = CampaignConfig::new(Target::Thm3);
        cfg.q_max = 40;
        cfg.r_d = Some(4);
        cfg.seed = seed;
        let a = harness::verify(&cfg).unwrap();
        cfg.threads = Some(threads);
        let b = harness::verify(&cfg).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        let max = a.records.iter().filter_map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(a.aggregate.max_ratio, Some(max));
        prop_assert!(a.records.iter().all(|r| r.sanity));
    }
}
