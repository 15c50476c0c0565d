//! Experiment configuration: a [`RunConfig`] plus per-command knobs.

use std::path::Path;

use lcrit_core::clt::{CLTRectangle, ExpansionTerm};
use lcrit_core::RunConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscrepancyKnobs {
    /// Permutation replicates behind the noise floor.
    pub reps: usize,
    /// Heights visited by `sweep`.
    pub heights: Vec<f64>,
}

impl Default for DiscrepancyKnobs {
    fn default() -> Self {
        Self { reps: 16, heights: vec![1e3, 1e4, 1e5] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharFnKnobs {
    pub grid_n: usize,
    #[serde(rename = "M")]
    pub radius: f64,
}

impl Default for CharFnKnobs {
    fn default() -> Self {
        Self { grid_n: 9, radius: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentKnobs {
    pub k: Vec<u32>,
    pub sigmas: Vec<f64>,
    /// Falls back to `n_rand`.
    pub n_samples: Option<usize>,
}

impl Default for MomentKnobs {
    fn default() -> Self {
        Self { k: vec![1, 2], sigmas: vec![0.55, 0.6, 0.75], n_samples: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecondMomentKnobs {
    #[serde(rename = "Y")]
    pub ys: Vec<f64>,
    /// Falls back to `sigma_T`.
    pub sigma: Option<f64>,
    /// When set, each gap must stay below this multiple of the analytic tail.
    pub max_tail_ratio: Option<f64>,
    /// Prime powers summed explicitly in the analytic tail.
    pub tail_limit: u64,
}

impl Default for SecondMomentKnobs {
    fn default() -> Self {
        Self { ys: vec![1e2, 1e3, 1e4], sigma: None, max_tail_ratio: None, tail_limit: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CltKnobs {
    /// Draw exact `e^{-pi u^2}` samples instead of running the random model.
    pub synthetic: bool,
    /// Falls back to `1.63/sqrt(n)`.
    pub ks_tolerance: Option<f64>,
    pub boxes: Vec<CLTRectangle>,
    /// Higher-order `b_{k,l}`; boxes are also evaluated with these when given.
    pub coefficients: Vec<ExpansionTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsCheckKnobs {
    pub batch: usize,
    pub fourier_instances: usize,
    pub fourier_points: usize,
}

impl Default for BsCheckKnobs {
    fn default() -> Self {
        Self { batch: 10_000, fourier_instances: 20, fourier_points: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    pub format: Format,
    /// Output directory; `--out` wins when given.
    pub out_dir: Option<String>,
    pub discrepancy: DiscrepancyKnobs,
    pub charfn: CharFnKnobs,
    pub moments: MomentKnobs,
    pub secondmoment: SecondMomentKnobs,
    pub clt: CltKnobs,
    pub bs_check: BsCheckKnobs,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text, path.extension().is_some_and(|e| e == "json"))
    }

    pub fn parse(text: &str, json: bool) -> Result<Self, String> {
        if json {
            serde_json::from_str(text).map_err(|e| e.to_string())
        } else {
            toml::from_str(text).map_err(|e| e.to_string())
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form; field order is fixed by the struct.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
