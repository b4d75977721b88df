//! Experiment configuration: the on-disk format, validation, and density
//! resolution.
//!
//! A config file is TOML with scalar keys plus optional `[[gate]]` blocks.
//! Exactly one of `p`, `c`, `target_m` fixes the edge density: `p`
//! directly, `c` as a multiple of the first-moment threshold p*, and
//! `target_m` by solving E[Z] = target exactly. Everything downstream
//! (plug-in scale c_n, truncated law, expected count) is derived here once
//! so the runners agree on parameters.
//!
//! Round-tripping is part of the contract: `to_toml` followed by
//! `from_toml` reproduces the struct exactly, which is what makes a
//! summary's embedded config a faithful replay recipe.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use hamlaw_core::theory::{self, LimitLaw};
use hamlaw_core::{Error, Params, Result};

/// Hard ceiling on the truncation depth K. Y(P_k) costs grow quickly with
/// k and every A_k beyond the stabilization point is redundant anyway.
pub const K_MAX: usize = 8;

/// Default ceiling for cycle enumeration inside the oracle suite.
pub const DEFAULT_ENUM_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Concentration,
    Lognormal,
    Poisson,
    Clt,
    OracleSuite,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::Lognormal => "lognormal",
            ExperimentKind::Poisson => "poisson",
            ExperimentKind::Clt => "clt",
            ExperimentKind::OracleSuite => "oracle-suite",
        }
    }
}

/// Which measure the clt experiment samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Null,
    Planted,
    PlantedPair,
}

/// An extra acceptance window from the config file, checked against the
/// named summary metric. Built-in gates always run; these come on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_m: Option<f64>,
    /// Truncation depth K. Defaults to min(floor(ln n), K_MAX), the same
    /// cutoff the Y statistic's definition uses; an explicit value may go
    /// up to K_MAX.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub trials: usize,
    /// Root seed. TOML integers are signed 64-bit, so a config file can
    /// express seeds up to 2^63 - 1; the --seed override takes any u64.
    pub seed: u64,
    /// Worker threads for the trial loop. 0 or absent means one per core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// clt only: which measure to sample. Defaults to null.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    /// clt planted-pair only: exact number of shared edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_t: Option<usize>,
    /// poisson only: also run the sample-then-thin pipeline and compare.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_stage: Option<bool>,
    /// Enumeration ceiling for oracle-suite scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, rename = "gate", skip_serializing_if = "Vec::is_empty")]
    pub gates: Vec<GateSpec>,
}

/// Everything the runners need, derived once from a validated config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: Params,
    /// Truncation depth actually in effect.
    pub k: usize,
    /// Plug-in threshold scale c_n with p = c_n * p*(n).
    pub c_n: f64,
    /// Exact E[Z] rounded to f64.
    pub e_z: f64,
    /// Poisson mode target, when density came from target_m.
    pub target_m: Option<f64>,
    /// Truncated limit law at the plug-in scale. Present for ell = 2 when
    /// the variance series converges (c_n e^s > 1), absent otherwise.
    pub law: Option<LimitLaw>,
    pub model: ModelKind,
    pub overlap_t: Option<usize>,
    pub two_stage: bool,
    pub enum_cap: usize,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config parse: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(format!("config serialize: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Validate the field combination and derive the run parameters.
    pub fn resolve(&self) -> Result<Resolved> {
        let densities =
            [self.p.is_some(), self.c.is_some(), self.target_m.is_some()].iter().filter(|b| **b).count();
        if densities != 1 {
            return Err(Error::InvalidParams(format!(
                "exactly one of p, c, target_m must be set (found {densities})"
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be positive".into()));
        }
        let enum_cap = self.enum_cap.unwrap_or(DEFAULT_ENUM_CAP);
        if enum_cap == 0 {
            return Err(Error::InvalidParams("enum_cap must be positive".into()));
        }

        let p = if let Some(p) = self.p {
            p
        } else if let Some(c) = self.c {
            if c <= 0.0 {
                return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
            }
            theory::p_star(self.n, self.r, self.ell, c)?
        } else {
            let target = self.target_m.expect("checked above");
            if target <= 0.0 {
                return Err(Error::InvalidParams(format!("target_m must be positive, got {target}")));
            }
            theory::p_for_expectation(self.n, self.r, self.ell, target)?
        };
        let params = Params::new(self.n, self.r, self.ell, p)?;

        let k = match self.k {
            Some(k) => {
                if k == 0 || k > K_MAX {
                    return Err(Error::InvalidParams(format!("k must be in 1..={K_MAX}, got {k}")));
                }
                k
            }
            None => ((self.n as f64).ln().floor() as usize).clamp(1, K_MAX),
        };

        let c_n = theory::plugin_scale(self.n, self.r, self.ell, p)?;
        let (_, e_z) = theory::expected_z(self.n, self.r, self.ell, p)?;
        let law = if self.ell == 2 { theory::limit_law(self.r, self.ell, c_n, k).ok() } else { None };

        let model = self.model.unwrap_or(ModelKind::Null);
        match self.experiment {
            ExperimentKind::Concentration => {
                if self.ell < 3 {
                    return Err(Error::InvalidParams(
                        "concentration studies the ell >= 3 regime; use lognormal for ell = 2".into(),
                    ));
                }
            }
            ExperimentKind::Lognormal => {
                if self.ell != 2 {
                    return Err(Error::InvalidParams(
                        "lognormal studies the ell = 2 regime; use concentration for ell >= 3".into(),
                    ));
                }
                if law.is_none() {
                    return Err(Error::InvalidParams(format!(
                        "no truncated law at c_n = {c_n:.4}: need c_n e^s > 1 for the variance series"
                    )));
                }
            }
            ExperimentKind::Poisson => {
                if self.target_m.is_none() {
                    return Err(Error::InvalidParams(
                        "poisson requires the target_m density mode".into(),
                    ));
                }
                if self.ell == 2 && law.is_none() {
                    return Err(Error::InvalidParams(format!(
                        "no mixture reference at c_n = {c_n:.4}: need c_n e^s > 1"
                    )));
                }
            }
            ExperimentKind::Clt | ExperimentKind::OracleSuite => {}
        }
        if self.model.is_some() && self.experiment != ExperimentKind::Clt {
            return Err(Error::InvalidParams("model is a clt-only field".into()));
        }
        if model == ModelKind::PlantedPair {
            match self.overlap_t {
                None => {
                    return Err(Error::InvalidParams(
                        "planted-pair requires overlap_t (shared edge count)".into(),
                    ))
                }
                Some(t) => {
                    if t == 0 || t >= params.m_edges() {
                        return Err(Error::InvalidParams(format!(
                            "overlap_t must be in 1..m_edges = {}, got {t}",
                            params.m_edges()
                        )));
                    }
                }
            }
        } else if self.overlap_t.is_some() {
            return Err(Error::InvalidParams("overlap_t only applies to the planted-pair model".into()));
        }
        if self.two_stage.is_some() && self.experiment != ExperimentKind::Poisson {
            return Err(Error::InvalidParams("two_stage is a poisson-only field".into()));
        }

        Ok(Resolved {
            params,
            k,
            c_n,
            e_z,
            target_m: self.target_m,
            law,
            model,
            overlap_t: self.overlap_t,
            two_stage: self.two_stage.unwrap_or(false),
            enum_cap,
            workers: self.workers.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(experiment: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            n: 20,
            r: 3,
            ell: 2,
            p: None,
            c: Some(1.3),
            target_m: None,
            k: Some(6),
            trials: 10,
            seed: 7,
            workers: None,
            model: None,
            overlap_t: None,
            two_stage: None,
            enum_cap: None,
            out_dir: None,
            gates: vec![],
        }
    }

    #[test]
    fn toml_round_trip_is_lossless() {
        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.out_dir = Some(PathBuf::from("runs/demo"));
        cfg.gates = vec![GateSpec { name: "mean_ratio".into(), lo: 0.9, hi: 1.1 }];
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn round_trip_preserves_awkward_floats() {
        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.c = Some(1.3000000000000007);
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn exactly_one_density_is_enforced() {
        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.p = Some(0.3);
        assert!(cfg.resolve().is_err());
        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.c = None;
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn truncation_defaults_to_log_n() {
        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.k = None;
        // ln 20 = 2.99..., so the default truncates at 2.
        assert_eq!(cfg.resolve().unwrap().k, 2);
        cfg.k = Some(9);
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn experiment_field_compatibility() {
        let mut cfg = base(ExperimentKind::Concentration);
        assert!(cfg.resolve().is_err(), "concentration wants ell >= 3");
        cfg.ell = 3;
        cfg.r = 4;
        cfg.n = 12;
        cfg.c = None;
        cfg.target_m = Some(50.0);
        cfg.k = Some(4);
        assert!(cfg.resolve().is_ok());

        let mut cfg = base(ExperimentKind::Clt);
        cfg.model = Some(ModelKind::PlantedPair);
        assert!(cfg.resolve().is_err(), "pair model needs overlap_t");
        cfg.overlap_t = Some(2);
        assert!(cfg.resolve().is_ok());

        let mut cfg = base(ExperimentKind::Lognormal);
        cfg.two_stage = Some(true);
        assert!(cfg.resolve().is_err(), "two_stage is poisson-only");
    }

    #[test]
    fn density_modes_agree_with_theory() {
        let mut cfg = base(ExperimentKind::Poisson);
        cfg.c = None;
        cfg.target_m = Some(2.0);
        let resolved = cfg.resolve().unwrap();
        let (_, ez) = theory::expected_z(20, 3, 2, resolved.params.p).unwrap();
        assert!((ez - 2.0).abs() < 1e-9, "target_m solves E[Z] = 2, got {ez}");
        assert!(resolved.law.is_some(), "mixture reference exists at this density");
    }
}
