//! Run configuration: a TOML file with dotted sections.
//!
//! ```toml
//! preset = "transport"          # or an inline [scenario] table
//!
//! [numerics]
//! n = 8
//! n_list = [4, 8, 16, 32]
//! probes = [0.5, 1.0]
//! seed = 0
//! samples = 100
//!
//! [outputs]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mdelab::presets::{atoms_to_measure, preset, ScenarioSpec, PRESET_NAMES};
use mdelab::{DiscreteMeasure, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub scenario: Option<ScenarioSpec>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub continuity: ContinuityConfig,
    #[serde(default)]
    pub residual: ResidualConfig,
    #[serde(default)]
    pub converge: ConvergeConfig,
    #[serde(default)]
    pub certify: CertifyConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub n: u32,
    pub n_list: Vec<u32>,
    /// empty means the final time (converge) or every mesh time (continuity)
    pub probes: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub intermediate_samples: usize,
    pub sequential: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            n: 8,
            n_list: vec![4, 8, 16, 32],
            probes: Vec::new(),
            seed: 0,
            samples: 100,
            intermediate_samples: 0,
            sequential: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuityConfig {
    /// perturbed initial atoms; defaults to `mu0` shifted by `shift` along x0
    pub nu0: Option<Vec<Vec<f64>>>,
    pub shift: f64,
    /// allowed relative excess over the constant fitted at the coarser N
    pub max_excess: f64,
}

impl Default for ContinuityConfig {
    fn default() -> Self {
        ContinuityConfig { nu0: None, shift: 0.1, max_excess: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    /// evaluation time; defaults to the horizon
    pub t: Option<f64>,
    /// test function center and radius; default bump covers the a priori support
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub ratio_band: [f64; 2],
}

impl Default for ResidualConfig {
    fn default() -> Self {
        ResidualConfig { t: None, center: None, radius: None, ratio_band: [0.3, 0.8] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeConfig {
    /// observed orders must lie in this band when set
    pub order_band: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    pub max_atoms: usize,
    pub half_width: f64,
    pub tau_max: f64,
    /// also audit the a priori bounds on a trajectory at `numerics.n`
    pub trajectory: bool,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { max_atoms: 8, half_width: 2.0, tau_max: 1.0, trajectory: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    pub trajectory: bool,
    pub diagnostics: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { dir: PathBuf::from("out"), trajectory: true, diagnostics: true }
    }
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
            anyhow::anyhow!("config error at line {line}: {}", e.message())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_preset(name: &str) -> RunConfig {
        RunConfig { preset: Some(name.to_string()), ..RunConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.preset, &self.scenario) {
            (Some(_), Some(_)) => bail!("give either `preset` or a [scenario] table, not both"),
            (None, None) => bail!("no scenario: set `preset` or add a [scenario] table"),
            _ => {}
        }
        if let Some(name) = &self.preset {
            if preset(name).is_none() {
                bail!("unknown preset {name:?}; known: {}", PRESET_NAMES.join(", "));
            }
        }
        if self.numerics.n == 0 {
            bail!("numerics.n must be positive");
        }
        let list = &self.numerics.n_list;
        if list.is_empty() || list[0] == 0 || list.windows(2).any(|w| w[0] >= w[1]) {
            bail!("numerics.n_list must be strictly ascending positive integers, got {list:?}");
        }
        let [lo, hi] = self.residual.ratio_band;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            bail!("residual.ratio_band must be [low, high], got [{lo}, {hi}]");
        }
        Ok(())
    }

    pub fn spec(&self) -> ScenarioSpec {
        match (&self.preset, &self.scenario) {
            (Some(name), _) => preset(name).expect("validated preset"),
            (None, Some(spec)) => spec.clone(),
            (None, None) => unreachable!("validated config"),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(self.spec().build()?)
    }

    /// The perturbed initial datum for the continuity experiment.
    pub fn continuity_nu0(&self, scenario: &Scenario) -> Result<DiscreteMeasure> {
        let dim = scenario.dim();
        if let Some(rows) = &self.continuity.nu0 {
            return Ok(atoms_to_measure(dim, rows)?);
        }
        let shift = self.continuity.shift;
        Ok(scenario.mu0.push_forward(dim, |x| {
            let mut y = x.to_vec();
            y[0] += shift;
            y
        })?)
    }

    /// The resolved configuration, written next to the outputs.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_defaults() {
        let cfg = RunConfig::parse("preset = \"decay\"\n").unwrap();
        assert_eq!(cfg.numerics, Numerics::default());
        assert_eq!(cfg.scenario().unwrap().name, "decay");
    }

    #[test]
    fn inline_scenario() {
        let text = r#"
[scenario]
name = "custom"
horizon = 0.5
mu0 = [[0, 1], [0.5, 0.25]]
mvf.kind = "lipschitz_field"
mvf.a = -1
growth.kind = "mass_coupled"
growth.kappa = 2
source.kind = "fixed"
source.atoms = [[1.0, 0.1]]

[numerics]
n_list = [2, 4]
"#;
        let cfg = RunConfig::parse(text).unwrap();
        let s = cfg.scenario().unwrap();
        assert_eq!(s.horizon, 0.5);
        assert_eq!(s.mu0.len(), 2);
        assert_eq!(s.growth.bound(), 2.0);
        let again = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = RunConfig::parse("preset = \"decay\"\n\n[numerics]\nn = \"eight\"\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = RunConfig::parse("preset = \"decay\"\n[numerics]\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_bad_lists_and_names() {
        assert!(RunConfig::parse("preset = \"decay\"\n[numerics]\nn_list = [8, 4]\n").is_err());
        assert!(RunConfig::parse("preset = \"nope\"\n").is_err());
        assert!(RunConfig::parse("[numerics]\nn = 4\n").is_err());
    }

    #[test]
    fn default_perturbation_shifts_first_coordinate() {
        let cfg = RunConfig::from_preset("drift_2d");
        let s = cfg.scenario().unwrap();
        let nu0 = cfg.continuity_nu0(&s).unwrap();
        assert_eq!(nu0.location(0)[0], s.mu0.location(0)[0] + 0.1);
        assert_eq!(nu0.location(0)[1], s.mu0.location(0)[1]);
    }
}
