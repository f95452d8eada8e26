use charsum_core::characters::crt_character;
use charsum_core::error::Error;
use charsum_core::harness::{self, CampaignConfig, Target};
use charsum_core::modular::factor_squarefree;
use charsum_core::poly::RealPolynomial;
use num_complex::Complex64;

fn thm1_at_15(phase: &[f64]) -> harness::VerificationReport {
    let mut cfg = CampaignConfig::new(Target::Thm1);
    cfg.moduli = Some(vec![15]);
    cfg.samples = 0;
    cfg.d = 2;
    cfg.r_d = Some(4);
    cfg.phase = Some(RealPolynomial::univariate(phase).unwrap());
    harness::verify(&cfg).unwrap()
}

#[test]
fn thm1_covers_every_primitive_character_mod_15() {
    let rep = thm1_at_15(&[0.0, 0.0, 0.3]);
    assert_eq!(rep.records.len(), 3);
    assert!(rep.aggregate.max_ratio.unwrap().is_finite());
    for r in &rep.records {
        assert!(r.lhs <= r.terms.unwrap());
    }
}

#[test]
fn integer_phase_gives_pure_character_sum() {
    let rep = thm1_at_15(&[0.0, 2.0, 1.0]);
    let m = factor_squarefree(15).unwrap();
    for r in &rep.records {
        let idx: Vec<u64> = serde_json::from_value(r.params["chi"]["indices"].clone()).unwrap();
        let chi = crt_character(&m, &idx).unwrap();
        let start = r.params["M"].as_i64().unwrap();
        let n = r.params["N"].as_i64().unwrap();
        let plain: Complex64 = (1..=n).map(|k| chi.value(start + k)).sum();
        assert!((plain.norm() - r.lhs).abs() < 1e-9);
    }
}

#[test]
fn thm1_rejects_long_intervals() {
    let mut cfg = CampaignConfig::new(Target::Thm1);
    cfg.moduli = Some(vec![15]);
    cfg.r_d = Some(4);
    cfg.length = Some(15);
    assert!(matches!(harness::verify(&cfg), Err(Error::HypothesisViolated(_))));
    cfg.override_hypotheses = true;
    assert!(harness::verify(&cfg).is_ok());
}

#[test]
fn smoothing_sweep_over_32_seeds() {
    let mut cfg = CampaignConfig::new(Target::Smoothing);
    cfg.samples = 32;
    cfg.n = 1;
    cfg.length = Some(16);
    cfg.grid = 256;
    let rep = harness::verify(&cfg).unwrap();
    assert_eq!(rep.records.len(), 32);
    assert!(rep.aggregate.max_ratio.unwrap().is_finite());
    assert!(rep.pass);
    let again = harness::verify(&cfg).unwrap();
    assert_eq!(rep.to_json(), again.to_json());
}

#[test]
fn weil_records_worst_tuple() {
    let mut cfg = CampaignConfig::new(Target::Weil);
    cfg.moduli = Some(vec![7]);
    let rep = harness::verify(&cfg).unwrap();
    assert!(rep.pass);
    // orders 2, 3 and 6
    assert_eq!(rep.records.len(), 3);
    for r in &rep.records {
        let t: Vec<u64> = serde_json::from_value(r.params["tuple"].clone()).unwrap();
        assert_eq!(t.len(), 4);
        let mut d = t.clone();
        d.sort();
        d.dedup();
        assert!(d.len() >= 3);
    }
    cfg.moduli = Some(vec![103]);
    assert!(harness::verify(&cfg).is_err());
}

#[test]
fn phi_and_compare_campaigns() {
    let mut cfg = CampaignConfig::new(Target::Phi);
    cfg.d = 6;
    cfg.v_max = Some(10_000);
    let rep = harness::verify(&cfg).unwrap();
    assert!(rep.pass, "{:?}", rep.records);
    assert_eq!(rep.records.len(), 6);

    let mut cfg = CampaignConfig::new(Target::Compare);
    cfg.r_d = Some(3);
    assert!(matches!(harness::verify(&cfg), Err(Error::DegenerateDenominator { .. })));
    cfg.r_d = Some(5);
    assert!(harness::verify(&cfg).unwrap().pass);
}

#[test]
fn lemma4_requires_r_above_s() {
    let mut cfg = CampaignConfig::new(Target::Lemma4);
    cfg.s = Some(2);
    cfg.r = Some(2);
    assert!(matches!(harness::verify(&cfg), Err(Error::HypothesisViolated(_))));
}

#[test]
fn energy_lemma_campaigns_pass() {
    for t in [Target::Lemma7, Target::Lemma8, Target::Lemma9] {
        let mut cfg = CampaignConfig::new(t);
        cfg.q_max = 60;
        let rep = harness::verify(&cfg).unwrap();
        assert!(rep.pass && !rep.records.is_empty(), "{}", t.name());
    }
}
