//! Run configuration: JSON file merged with command-line flags.

use bubble_tower::acceptance::Profile;
use bubble_tower::geometry::CatalogEntry;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Heights of the tower, or `"auto"` for the reduced-energy maximiser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Heights {
    Values(Vec<f64>),
    Keyword(String),
}

impl Heights {
    pub fn parse(s: &str) -> Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(Heights::Keyword("auto".into()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad height {t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Heights::Values)
    }
}

/// A catalog key or an inline entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ManifoldRef {
    Key(String),
    Inline(Box<CatalogEntry>),
}

/// Every recognised setting. Absent fields take per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Heights>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_decade: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<ManifoldRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(self, top; dim, k, d, ell, eps, eps_lo, eps_hi, per_decade, r0, rel_tol, fd_step,
                 weyl_sq, manifold, catalog, samples, seed, tol, profile)
    }
}
