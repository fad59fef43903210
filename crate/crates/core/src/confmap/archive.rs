use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{AnnulusMap, MapError, MapKind, ScParams};

type C64 = Complex<f64>;

/// Plain-text (TOML) archive of a solved map. Every float is written in its
/// shortest round-trip form, so save → load → save is bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapArchive {
    /// `"strip"` or `"schwarz"`.
    pub kind: String,
    pub rho: f64,
    pub rotation: f64,
    pub junction: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sc: Option<ScSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScSection {
    pub q: f64,
    pub k_trunc: usize,
    pub outer_angles: Vec<f64>,
    pub inner_angles: Vec<f64>,
    pub beta_outer: Vec<f64>,
    pub beta_inner: Vec<f64>,
    pub scale: [f64; 2],
    pub base: [f64; 2],
    pub vertex_residual: f64,
}

impl MapArchive {
    pub fn from_map(map: &AnnulusMap) -> Self {
        let (a, b) = map.junction();
        let sc = match map.kind() {
            MapKind::Strip { .. } => None,
            MapKind::Schwarz(m) => {
                let p = m.params();
                Some(ScSection {
                    q: p.q,
                    k_trunc: p.k_trunc,
                    outer_angles: p.outer_angles.clone(),
                    inner_angles: p.inner_angles.clone(),
                    beta_outer: p.beta_outer.clone(),
                    beta_inner: p.beta_inner.clone(),
                    scale: [p.scale.re, p.scale.im],
                    base: [p.base.re, p.base.im],
                    vertex_residual: p.vertex_residual,
                })
            }
        };
        let kind = if sc.is_some() { "schwarz" } else { "strip" }.to_string();
        Self { kind, rho: map.rho(), rotation: map.rotation(), junction: [a, b], sc }
    }

    pub fn to_map(&self) -> Result<AnnulusMap, MapError> {
        let (a, b) = (self.junction[0], self.junction[1]);
        let map = match (self.kind.as_str(), &self.sc) {
            ("strip", None) => AnnulusMap::strip(a, b)?,
            ("schwarz", Some(s)) => {
                let mut p = ScParams::new(
                    s.outer_angles.clone(),
                    s.inner_angles.clone(),
                    s.beta_outer.clone(),
                    s.beta_inner.clone(),
                    s.q,
                    (a, b),
                );
                p.base = C64::new(s.base[0], s.base[1]);
                p.vertex_residual = s.vertex_residual;
                let m = AnnulusMap::from_sc(p)?;
                let got = m.sc_map().map(|m| m.params().scale).unwrap_or_default();
                if (got - C64::new(s.scale[0], s.scale[1])).norm() > 1e-10 * got.norm() {
                    return Err(MapError::Archive(format!("stored scale constant disagrees with recomputed {got}")));
                }
                m
            }
            (k, _) => return Err(MapError::Archive(format!("unknown or inconsistent map kind '{k}'"))),
        };
        if (map.rho() - self.rho).abs() > 1e-12 * self.rho {
            return Err(MapError::Archive(format!("stored ρ = {} disagrees with {}", self.rho, map.rho())));
        }
        Ok(map.with_rotation(self.rotation))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("archive serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, MapError> {
        toml::from_str(text).map_err(|e| MapError::Archive(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), MapError> {
        std::fs::write(path, self.to_toml_string()).map_err(|e| MapError::Archive(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, MapError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| MapError::Archive(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}
