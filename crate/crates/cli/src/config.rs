//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pixent::optics::{GaussianBeam, JtmaParams, OpticalElement, QuadratureSpec, SincConvention};

use crate::failure::{Failure, ResultExt};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    #[serde(default)]
    pub jtma: JtmaConfig,
    #[serde(default)]
    pub layout: LayoutConfig,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub simulate: SimulateConfig,
    pub hologram: Option<HologramConfig>,
    pub beam: Option<BeamConfig>,
}

/// JTMA widths in units of inverse length. A missing `sigma_c` means no
/// collection filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JtmaConfig {
    pub sigma_p: f64,
    pub sigma_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_c: Option<f64>,
    #[serde(default)]
    pub sinc: SincConvention,
}

impl Default for JtmaConfig {
    fn default() -> Self {
        JtmaConfig {
            sigma_p: 0.02,
            sigma_s: 1.0,
            sigma_c: None,
            sinc: SincConvention::default(),
        }
    }
}

impl JtmaConfig {
    pub fn params(&self) -> Result<JtmaParams, Failure> {
        let p = JtmaParams::new(self.sigma_p, self.sigma_s, self.sigma_c.unwrap_or(f64::INFINITY))
            .data("jtma section")?;
        Ok(p.with_sinc(self.sinc))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutConfig {
    pub d: usize,
    pub enclosing_radius: f64,
    /// Edge gap between pixels as a fraction of the uniform radius.
    pub gap_fraction: f64,
    pub optimize: bool,
    pub tolerance: f64,
    /// Existing layout file to use instead of packing a new one.
    pub file: Option<PathBuf>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            d: 7,
            enclosing_radius: 0.6,
            gap_fraction: 0.1,
            optimize: true,
            tolerance: 0.01,
            file: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub total_pairs: u64,
    /// Weight of white noise mixed into the simulated state.
    pub noise: f64,
    pub bases: Vec<String>,
    pub acquisition_time: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            total_pairs: 1_000_000,
            noise: 0.0,
            bases: vec!["wf:0".into(), "wf:1".into()],
            acquisition_time: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HologramConfig {
    pub basis: String,
    pub vector: usize,
    pub width: usize,
    pub height: usize,
    pub grating_period: f64,
}

impl Default for HologramConfig {
    fn default() -> Self {
        HologramConfig {
            basis: "wf:0".into(),
            vector: 0,
            width: 512,
            height: 512,
            grating_period: 8.0,
        }
    }
}

/// Either a named preset or an explicit beam and element list.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub preset: Option<String>,
    pub waist_um: Option<f64>,
    #[serde(default)]
    pub waist_position_mm: f64,
    pub wavelength_nm: Option<f64>,
    #[serde(default)]
    pub elements: Vec<OpticalElement>,
}

impl BeamConfig {
    pub fn beam(&self) -> Result<GaussianBeam, Failure> {
        match (self.waist_um, self.wavelength_nm) {
            (Some(w), Some(l)) => GaussianBeam::new(w, self.waist_position_mm, l).data("beam section"),
            _ => Err(Failure::usage("beam section needs waist_um and wavelength_nm, or a preset")),
        }
    }
}

pub fn load(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).data(format!("reading {}", path.display()))?;
    let mut config: Config = toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if let Some(file) = &config.layout.file {
        if file.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            config.layout.file = Some(base.join(file));
        }
    }
    Ok(config)
}
