//! Named manifolds with sampling parameters, read from JSON.

use super::{ManifoldSpec, Warping};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Coordinate maps offered for symmetry checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Isometry {
    /// `u -> 2p - u`; on graph charts of spheres centred at `p = 0` this is
    /// `(x_1, ..., x_n, x_{n+1}) -> (-x_1, ..., -x_n, x_{n+1})`.
    Negate,
    /// `u -> -(u + strength u_2 e_1)` about `p`, not an isometry for `strength != 0`.
    Shear { strength: f64 },
}

impl Isometry {
    pub fn apply(&self, p: &[f64], u: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = u.iter().zip(p).map(|(x, c)| 2.0 * c - x).collect();
        if let Isometry::Shear { strength } = *self {
            if u.len() >= 2 {
                out[0] -= strength * (u[1] - p[1]);
            }
        }
        out
    }
}

/// Largest `|W|^2` read as zero.
pub const FLAT_WEYL_TOL: f64 = 1e-6;
/// Smallest `|W|^2` read as non-zero. Values in between fail every expectation.
pub const NONZERO_WEYL: f64 = 1e-3;

/// Expected behaviour of `|W|^2` over the sample points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeylExpectation {
    /// Zero at every sample.
    Vanishing,
    /// Non-zero at every sample.
    NonVanishing,
    /// Non-zero at some sample.
    NonFlat,
}

impl WeylExpectation {
    /// Whether sampled values in `[min, max]` meet the expectation.
    pub fn holds(self, min: f64, max: f64, flat_tol: f64) -> bool {
        match self {
            WeylExpectation::Vanishing => max <= flat_tol,
            WeylExpectation::NonVanishing => min >= NONZERO_WEYL,
            WeylExpectation::NonFlat => max >= NONZERO_WEYL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub description: String,
    pub spec: ManifoldSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<WeylExpectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isometry: Option<Isometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vec<f64>>,
}

fn default_samples() -> usize {
    20
}

pub type Catalog = BTreeMap<String, CatalogEntry>;

pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let cat: Catalog = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    for (name, entry) in &cat {
        entry.spec.validate().map_err(|e| Error::Invalid(format!("catalog entry {name}: {e}")))?;
    }
    Ok(cat)
}

fn entry(description: &str, spec: ManifoldSpec, seed: u64, expect: Option<WeylExpectation>) -> CatalogEntry {
    CatalogEntry { description: description.into(), spec, samples: 20, seed, expect, isometry: None, fixed_point: None }
}

/// The manifolds used by the acceptance suite.
pub fn builtin_catalog() -> Catalog {
    use ManifoldSpec as M;
    use WeylExpectation::*;
    let s = M::sphere;
    let g = M::sphere_graph;
    let mut cat = Catalog::new();
    cat.insert("s7".into(), entry("round unit S^7", s(7), 7, Some(Vanishing)));
    cat.insert("s1xs6".into(), entry("S^1 x S^6", M::product(s(1), s(6)), 16, Some(Vanishing)));
    cat.insert("s3xs4".into(), entry("S^3 x S^4", M::product(s(3), s(4)), 34, Some(NonVanishing)));
    cat.insert("s2xs5".into(), entry("S^2 x S^5", M::product(s(2), s(5)), 25, Some(NonVanishing)));
    cat.insert("s2xs2".into(), entry("S^2 x S^2", M::product(s(2), s(2)), 22, Some(NonVanishing)));
    cat.insert(
        "ellipsoid4".into(),
        entry(
            "ellipsoid in R^5 with semi-axes (1, 1.5, 2, 1, 1)",
            M::Ellipsoid { semi_axes: vec![1.0, 1.5, 2.0, 1.0, 1.0] },
            4,
            Some(NonFlat),
        ),
    );
    cat.insert(
        "interval_warped_s4".into(),
        entry(
            "interval x_f S^4 with f = 2 + cos t",
            M::warped(M::Flat { dim: 1, lo: -3.0, hi: 3.0 }, s(4), Warping::Cosine { offset: 2.0, amplitude: 1.0 }),
            5,
            Some(Vanishing),
        ),
    );
    let mut sphere_sym = entry("lower hemisphere of S^7 as a graph", g(7), 70, Some(Vanishing));
    sphere_sym.isometry = Some(Isometry::Negate);
    sphere_sym.fixed_point = Some(vec![0.0; 7]);
    cat.insert("s7_graph".into(), sphere_sym);
    let mut prod_sym = entry("S^2 x S^5 in graph charts", M::product(g(2), g(5)), 52, Some(NonVanishing));
    prod_sym.isometry = Some(Isometry::Negate);
    prod_sym.fixed_point = Some(vec![0.0; 7]);
    cat.insert("s2xs5_graph".into(), prod_sym);
    let mut shear = entry("S^2 graph chart with a sheared point reflection", g(2), 2, None);
    shear.isometry = Some(Isometry::Shear { strength: 0.3 });
    shear.fixed_point = Some(vec![0.0; 2]);
    cat.insert("s2_shear".into(), shear);
    cat
}
