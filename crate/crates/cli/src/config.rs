//! Run configuration: JSON schema with defaults reproducing the reference
//! machine setup, and conversion into the core types.

use harmonic_mortar::geometry::AnnulusGeometry;
use harmonic_mortar::infsup::{DiscretizationParams, OrderRule, Scope, SweepSpec};
use harmonic_mortar::spline::{AngularSector, ScalarField, SourceSpec, VectorField, VectorSector};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub discretization: DiscretizationConfig,
    pub multiplier: MultiplierConfig,
    pub sources: SourcesConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Inner Dirichlet radius of the rotor ring, metres.
    pub r_shaft: f64,
    /// Interface radius, metres.
    pub r_gamma: f64,
    /// Outer Dirichlet radius of the stator ring, metres.
    pub r_outer: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { r_shaft: 0.02, r_gamma: 0.0447, r_outer: 0.0675 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationConfig {
    /// Interface spans of the stator mesh at refinement level 1.
    pub stator_n_theta: usize,
    /// Interface spans of the rotor mesh at level 1 (default: same as
    /// stator; the meshes may be non-matching).
    pub rotor_n_theta: Option<usize>,
    /// Radial spans at level 1 (default: near-isotropic choice).
    pub n_r: Option<usize>,
    /// Spline degree for solves.
    pub degree: usize,
    /// Degrees for inf-sup and convergence sweeps (default: `[degree]`).
    pub degrees: Option<Vec<usize>>,
    /// Refinement levels for sweeps; level 1 is the base mesh and each
    /// level doubles both directions.
    pub levels: Vec<usize>,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig {
            stator_n_theta: 144,
            rotor_n_theta: None,
            n_r: None,
            degree: 1,
            degrees: None,
            levels: vec![1, 2, 3, 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScopeConfig {
    #[default]
    Stator,
    Full,
}

impl From<ScopeConfig> for Scope {
    fn from(s: ScopeConfig) -> Scope {
        match s {
            ScopeConfig::Stator => Scope::StatorOnly,
            ScopeConfig::Full => Scope::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierConfig {
    /// Harmonic order scalings `N = ⌊c·n⌋` (one sweep row per value).
    pub c_values: Vec<f64>,
    /// Explicit harmonic orders; appended after the scaled rows.
    pub orders: Vec<usize>,
    /// Harmonic order used by `solve` (default `⌊c_values[0]·n⌋`).
    pub solve_order: Option<usize>,
    pub scope: ScopeConfig,
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        MultiplierConfig {
            c_values: vec![0.25, 1.0 / 3.0, 0.375, 0.5],
            orders: Vec::new(),
            solve_order: None,
            scope: ScopeConfig::Stator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnetSectorConfig {
    pub start: f64,
    pub end: f64,
    /// Cartesian magnetization components (A/m), rotor frame.
    pub m: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourcesConfig {
    /// Uniform source current density (A/m²) when no sectors are given.
    pub js_constant: f64,
    /// Piecewise-constant source current sectors (stator frame on the
    /// stator, rotor frame on the rotor).
    pub js_sectors: Vec<SectorConfig>,
    /// Magnet sectors on the rotor (rotor frame).
    pub magnet_sectors: Vec<MagnetSectorConfig>,
    /// Uniform reluctivity (m/H) when no sectors are given.
    pub nu_constant: f64,
    /// Piecewise-constant reluctivity sectors.
    pub nu_sectors: Vec<SectorConfig>,
    /// Declared reluctivity bounds (default: derived from the values).
    pub nu_bounds: Option<[f64; 2]>,
    /// Rotor angle in radians for a single solve.
    pub rotor_angle: f64,
    /// Rotor angles for a rotation sweep (overrides `rotor_angle`).
    pub rotor_angles: Vec<f64>,
}

impl Default for SourcesConfig {
    fn default() -> Self {
        SourcesConfig {
            js_constant: 0.0,
            js_sectors: Vec::new(),
            magnet_sectors: Vec::new(),
            nu_constant: 1.0,
            nu_sectors: Vec::new(),
            nu_bounds: None,
            rotor_angle: 0.0,
            rotor_angles: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV output path (commands may also take `--out`).
    pub csv: Option<PathBuf>,
    /// Significant digits for β values in human-readable tables.
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { csv: None, precision: 6 }
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.geometry()?;
        let d = &self.discretization;
        if d.stator_n_theta < 3 {
            anyhow::bail!("stator_n_theta must be at least 3");
        }
        if d.degree < 1 || d.degrees.iter().flatten().any(|&k| k < 1) {
            anyhow::bail!("spline degrees must be at least 1");
        }
        if d.levels.is_empty() || d.levels.iter().any(|&l| l < 1) {
            anyhow::bail!("levels must be a nonempty list of indices >= 1");
        }
        if self.multiplier.c_values.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            anyhow::bail!("c values must lie in [0, 1]");
        }
        if self.multiplier.c_values.is_empty() && self.multiplier.orders.is_empty() {
            anyhow::bail!("multiplier block needs c_values or orders");
        }
        let (lo, hi) = self.nu_bounds();
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            anyhow::bail!("reluctivity bounds must satisfy 0 < lo <= hi < inf");
        }
        Ok(())
    }

    pub fn geometry(&self) -> anyhow::Result<AnnulusGeometry> {
        let g = &self.geometry;
        Ok(AnnulusGeometry::new(g.r_shaft, g.r_gamma, g.r_outer)?)
    }

    pub fn discretization_params(&self) -> DiscretizationParams {
        DiscretizationParams {
            base_n_theta: self.discretization.stator_n_theta,
            base_n_r: self.discretization.n_r,
            rotor_base_n_theta: self.discretization.rotor_n_theta,
        }
    }

    pub fn sweep_degrees(&self) -> Vec<usize> {
        self.discretization
            .degrees
            .clone()
            .unwrap_or_else(|| vec![self.discretization.degree])
    }

    pub fn sweep_spec(&self, scope_override: Option<Scope>) -> SweepSpec {
        let mut orders: Vec<OrderRule> =
            self.multiplier.c_values.iter().map(|&c| OrderRule::Scaling(c)).collect();
        orders.extend(self.multiplier.orders.iter().map(|&n| OrderRule::Explicit(n)));
        SweepSpec {
            params: self.discretization_params(),
            levels: self.discretization.levels.clone(),
            degrees: self.sweep_degrees(),
            orders,
            scope: scope_override.unwrap_or_else(|| self.multiplier.scope.into()),
        }
    }

    fn nu_bounds(&self) -> (f64, f64) {
        if let Some([lo, hi]) = self.sources.nu_bounds {
            return (lo, hi);
        }
        let mut lo = self.sources.nu_constant;
        let mut hi = self.sources.nu_constant;
        for s in &self.sources.nu_sectors {
            lo = lo.min(s.value);
            hi = hi.max(s.value);
        }
        (lo, hi)
    }

    pub fn source_spec(&self) -> anyhow::Result<SourceSpec> {
        let s = &self.sources;
        let js = if s.js_sectors.is_empty() {
            ScalarField::Constant(s.js_constant)
        } else {
            ScalarField::Sectors(
                s.js_sectors
                    .iter()
                    .map(|c| AngularSector { start: c.start, end: c.end, value: c.value })
                    .collect(),
            )
        };
        let m = if s.magnet_sectors.is_empty() {
            VectorField::zero()
        } else {
            VectorField::Sectors(
                s.magnet_sectors
                    .iter()
                    .map(|c| VectorSector { start: c.start, end: c.end, value: c.m })
                    .collect(),
            )
        };
        let nu = if s.nu_sectors.is_empty() {
            ScalarField::Constant(s.nu_constant)
        } else {
            ScalarField::Sectors(
                s.nu_sectors
                    .iter()
                    .map(|c| AngularSector { start: c.start, end: c.end, value: c.value })
                    .collect(),
            )
        };
        let (lo, hi) = self.nu_bounds();
        Ok(SourceSpec::new(js, m, nu, lo, hi)?)
    }

    /// Harmonic order used by the `solve` command.
    pub fn solve_order(&self) -> usize {
        if let Some(n) = self.multiplier.solve_order {
            return n;
        }
        let n = self.discretization.stator_n_theta;
        let c = self.multiplier.c_values.first().copied().unwrap_or(0.25);
        (c * n as f64).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_reference_setup() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let geom = cfg.geometry().unwrap();
        assert_eq!(geom.r_gamma, 0.0447);
        assert_eq!(geom.r_outer, 0.0675);
        assert_eq!(cfg.discretization.stator_n_theta, 144);
        assert_eq!(cfg.discretization.levels, vec![1, 2, 3, 4]);
        assert_eq!(cfg.multiplier.c_values.len(), 4);
    }

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = RunConfig::default();
        cfg.sources.magnet_sectors.push(MagnetSectorConfig {
            start: 0.0,
            end: 1.0,
            m: [1.0, -2.0],
        });
        cfg.discretization.degrees = Some(vec![2, 3]);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = RunConfig::default();
        cfg.geometry.r_gamma = 0.1; // outside [r_shaft, r_outer]
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.discretization.degree = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.sources.nu_bounds = Some([0.0, 1.0]);
        assert!(cfg.validate().is_err());

        let unknown = r#"{"geometry": {"r_shaft": 0.02}, "unknown_block": 1}"#;
        assert!(serde_json::from_str::<RunConfig>(unknown).is_err());
    }
}
