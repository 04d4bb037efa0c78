//! Paraxial Gaussian-beam propagation with the complex beam parameter
//! `q = z + i·z_R` and ABCD matrices.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    pub waist_um: f64,
    /// Signed distance from the current reference plane to the waist;
    /// positive when the waist lies downstream.
    pub waist_position_mm: f64,
    pub wavelength_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    Space { distance_mm: f64 },
    ThinLens { focal_mm: f64 },
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalElement::Space { distance_mm } => write!(f, "space {distance_mm} mm"),
            OpticalElement::ThinLens { focal_mm } => write!(f, "lens f={focal_mm} mm"),
        }
    }
}

impl OpticalElement {
    fn abcd(&self) -> Result<[f64; 4]> {
        match *self {
            OpticalElement::Space { distance_mm } => {
                if !(distance_mm >= 0.0 && distance_mm.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "propagation distance must be non-negative, got {distance_mm}"
                    )));
                }
                Ok([1.0, distance_mm, 0.0, 1.0])
            }
            OpticalElement::ThinLens { focal_mm } => {
                if focal_mm == 0.0 || !focal_mm.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "focal length must be finite and nonzero, got {focal_mm}"
                    )));
                }
                Ok([1.0, 0.0, -1.0 / focal_mm, 1.0])
            }
        }
    }
}

impl GaussianBeam {
    pub fn new(waist_um: f64, waist_position_mm: f64, wavelength_nm: f64) -> Result<Self> {
        if !(waist_um > 0.0 && wavelength_nm > 0.0) || !waist_position_mm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beam needs positive waist and wavelength, got w0={waist_um} um, lambda={wavelength_nm} nm"
            )));
        }
        Ok(GaussianBeam {
            waist_um,
            waist_position_mm,
            wavelength_nm,
        })
    }

    fn wavelength_mm(&self) -> f64 {
        self.wavelength_nm * 1e-6
    }

    pub fn rayleigh_range_mm(&self) -> f64 {
        let w = self.waist_um * 1e-3;
        PI * w * w / self.wavelength_mm()
    }

    /// Beam radius (1/e² intensity) at the reference plane.
    pub fn radius_at_plane_um(&self) -> f64 {
        let z = self.waist_position_mm / self.rayleigh_range_mm();
        self.waist_um * (1.0 + z * z).sqrt()
    }

    fn q(&self) -> Complex64 {
        Complex64::new(-self.waist_position_mm, self.rayleigh_range_mm())
    }

    fn from_q(q: Complex64, wavelength_nm: f64) -> Result<Self> {
        if !(q.re.is_finite() && q.im.is_finite()) || q.im <= 0.0 {
            return Err(Error::DegenerateOptics(format!(
                "beam parameter q = {q} has no finite waist"
            )));
        }
        let lambda_mm = wavelength_nm * 1e-6;
        let w_mm = (q.im * lambda_mm / PI).sqrt();
        Ok(GaussianBeam {
            waist_um: w_mm * 1e3,
            waist_position_mm: -q.re,
            wavelength_nm,
        })
    }

    fn apply(&self, element: &OpticalElement) -> Result<Self> {
        let [a, b, c, d] = element.abcd()?;
        let q = self.q();
        let denom = q * c + d;
        if denom.norm() == 0.0 {
            return Err(Error::DegenerateOptics(format!(
                "{element} maps the beam to a waist at infinity"
            )));
        }
        Self::from_q((q * a + b) / denom, self.wavelength_nm)
    }
}

/// Beam after each element in turn.
pub fn trace(beam: &GaussianBeam, elements: &[OpticalElement]) -> Result<Vec<GaussianBeam>> {
    let mut out = Vec::with_capacity(elements.len());
    let mut current = *beam;
    for e in elements {
        current = current.apply(e)?;
        out.push(current);
    }
    Ok(out)
}

/// Output beam of the whole element sequence; the returned waist position is
/// relative to the plane after the last element.
pub fn propagate(beam: &GaussianBeam, elements: &[OpticalElement]) -> Result<GaussianBeam> {
    Ok(trace(beam, elements)?.pop().unwrap_or(*beam))
}

/// Reconstructed design setups for the pump telescope, the crystal-to-SLM
/// Fourier lens and the intensity-flattening telescope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamPreset {
    PumpTelescope,
    CrystalToSlm,
    FlatteningTelescope,
}

impl BeamPreset {
    pub const ALL: [BeamPreset; 3] = [
        BeamPreset::PumpTelescope,
        BeamPreset::CrystalToSlm,
        BeamPreset::FlatteningTelescope,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BeamPreset::PumpTelescope => "pump",
            BeamPreset::CrystalToSlm => "slm",
            BeamPreset::FlatteningTelescope => "ift",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Expected output waist in µm for the preset.
    pub fn expected_waist_um(&self) -> f64 {
        match self {
            BeamPreset::PumpTelescope => 188.0,
            BeamPreset::CrystalToSlm => 343.0,
            BeamPreset::FlatteningTelescope => 3723.0,
        }
    }

    /// Input beam and element list. Each input waist is placed in the front
    /// focal plane of the first lens.
    pub fn setup(&self) -> (GaussianBeam, Vec<OpticalElement>) {
        use OpticalElement::*;
        match self {
            BeamPreset::PumpTelescope => (
                GaussianBeam::new(950.0, 0.0, 405.0).unwrap(),
                vec![
                    Space { distance_mm: 250.0 },
                    ThinLens { focal_mm: 250.0 },
                    Space { distance_mm: 300.0 },
                    ThinLens { focal_mm: 50.0 },
                ],
            ),
            BeamPreset::CrystalToSlm => (
                GaussianBeam::new(188.0, 0.0, 810.0).unwrap(),
                vec![
                    Space { distance_mm: 250.0 },
                    ThinLens { focal_mm: 250.0 },
                    Space { distance_mm: 250.0 },
                ],
            ),
            BeamPreset::FlatteningTelescope => (
                GaussianBeam::new(1117.0, 0.0, 810.0).unwrap(),
                vec![
                    Space { distance_mm: 150.0 },
                    ThinLens { focal_mm: 150.0 },
                    Space { distance_mm: 650.0 },
                    ThinLens { focal_mm: 500.0 },
                ],
            ),
        }
    }
}
