use serde::{Deserialize, Serialize};

use crate::energy::EnergyMethod;
use crate::error::{Error, Result};
use crate::mean_values::DEFAULT_BUDGET;
use crate::poly::RealPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma7,
    Lemma8,
    Lemma9,
    Weil,
    Smoothing,
    Phi,
    Compare,
}

impl Target {
    pub const ALL: [Target; 18] = [
        Target::Thm1,
        Target::Thm2,
        Target::Thm3,
        Target::Thm4,
        Target::Thm5,
        Target::Lemma1,
        Target::Lemma2,
        Target::Lemma3,
        Target::Lemma4,
        Target::Lemma5,
        Target::Lemma6,
        Target::Lemma7,
        Target::Lemma8,
        Target::Lemma9,
        Target::Weil,
        Target::Smoothing,
        Target::Phi,
        Target::Compare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Thm1 => "thm1",
            Target::Thm2 => "thm2",
            Target::Thm3 => "thm3",
            Target::Thm4 => "thm4",
            Target::Thm5 => "thm5",
            Target::Lemma1 => "lemma1",
            Target::Lemma2 => "lemma2",
            Target::Lemma3 => "lemma3",
            Target::Lemma4 => "lemma4",
            Target::Lemma5 => "lemma5",
            Target::Lemma6 => "lemma6",
            Target::Lemma7 => "lemma7",
            Target::Lemma8 => "lemma8",
            Target::Lemma9 => "lemma9",
            Target::Weil => "weil",
            Target::Smoothing => "smoothing",
            Target::Phi => "phi",
            Target::Compare => "compare",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown target {s:?}")))
    }

    pub fn is_theorem(&self) -> bool {
        matches!(
            self,
            Target::Thm1 | Target::Thm2 | Target::Thm3 | Target::Thm4 | Target::Thm5
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `beta_v = 1`.
    Unit,
    /// `beta_v = prod_i phi_i(v)`, scaled to maximum 1.
    Phi,
}

/// Everything that determines a campaign. Identical configs produce
/// identical report bytes; `threads` only affects speed and is not echoed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub target: Target,
    /// Modulus (or prime) range swept when `moduli` is absent.
    pub q_min: u64,
    pub q_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<u64>>,
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    /// Admissible Vinogradov exponent; required by the theorem targets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    /// Dimension for box, multi-character and linear-form targets.
    pub n: usize,
    /// Characters (or random functions) per modulus; 0 means all.
    pub samples: u32,
    pub seed: u64,
    /// RHS is multiplied by `constant * q^slack`.
    pub slack: f64,
    pub constant: f64,
    /// Calibrated upper limit for the maximal ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub override_hypotheses: bool,
    pub budget: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_max: Option<u64>,
    /// Interval length for the one-dimensional sums.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<u64>,
    /// Box side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<RealPolynomial>,
    /// Rows give `omega_i` in power-basis coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<u64>>>,
    pub weights: WeightKind,
    /// Equispaced points for maxima over `alpha`.
    pub grid: u64,
    /// Largest field size in field sweeps.
    pub field_max: u64,
    pub delta: f64,
    pub energy_method: EnergyMethod,
    pub diagnostics: bool,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            target: Target::Thm1,
            q_min: 3,
            q_max: 100,
            moduli: None,
            d: 2,
            r: None,
            r_d: None,
            s: None,
            n: 2,
            samples: 1,
            seed: 0,
            slack: 0.0,
            constant: 1.0,
            threshold: None,
            override_hypotheses: false,
            budget: DEFAULT_BUDGET,
            v_max: None,
            length: None,
            h: None,
            u: None,
            phase: None,
            basis: None,
            weights: WeightKind::Unit,
            grid: 1024,
            field_max: 4096,
            delta: 0.05,
            energy_method: EnergyMethod::Hashed,
            diagnostics: false,
            threads: None,
        }
    }
}

impl CampaignConfig {
    pub fn new(target: Target) -> Self {
        CampaignConfig {
            target,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_min > self.q_max && self.moduli.is_none() {
            return Err(Error::InvalidConfig(format!(
                "q_min {} exceeds q_max {}",
                self.q_min, self.q_max
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidConfig("d must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if !(self.slack >= 0.0) || !(self.constant > 0.0) {
            return Err(Error::InvalidConfig("slack must be >= 0 and constant > 0".into()));
        }
        if self.target.is_theorem() && self.r_d.is_none() {
            return Err(Error::InvalidConfig(format!(
                "{} needs r_d (no default is assumed)",
                self.target.name()
            )));
        }
        if let Some(p) = &self.phase {
            let want = match self.target {
                Target::Thm1 | Target::Thm2 => 1,
                _ => self.n,
            };
            if self.target.is_theorem() && p.nvars() != want {
                return Err(Error::ArityMismatch {
                    expected: want,
                    got: p.nvars(),
                });
            }
        }
        Ok(())
    }

    /// `RHS * constant * q^slack`.
    pub fn scale(&self, rhs: f64, q: f64) -> f64 {
        rhs * self.constant * q.powf(self.slack)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: CampaignConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_roundtrip() {
        for t in Target::ALL {
            assert_eq!(Target::parse(t.name()).unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.name()));
        }
        assert!(Target::parse("thm9").is_err());
    }

    #[test]
    fn theorems_need_r_d() {
        let mut c = CampaignConfig::new(Target::Thm1);
        assert!(c.validate().is_err());
        c.r_d = Some(4);
        assert!(c.validate().is_ok());
        assert!(CampaignConfig::new(Target::Weil).validate().is_ok());
    }

    #[test]
    fn threads_not_serialized() {
        let mut c = CampaignConfig::new(Target::Phi);
        c.threads = Some(8);
        let s = serde_json::to_string(&c).unwrap();
        assert!(!s.contains("threads"));
        let back = CampaignConfig::from_json(&s).unwrap();
        assert_eq!(back.threads, None);
        assert!(CampaignConfig::from_json(r#"{"target":"phi","bogus":1}"#).is_err());
    }
}
