use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the transverse momentum plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TransverseMomentum {
    pub kx: f64,
    pub ky: f64,
}

impl TransverseMomentum {
    pub const ZERO: TransverseMomentum = TransverseMomentum { kx: 0.0, ky: 0.0 };

    pub const fn new(kx: f64, ky: f64) -> Self {
        TransverseMomentum { kx, ky }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        TransverseMomentum::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.kx * self.kx + self.ky * self.ky
    }

    pub fn norm(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    pub fn angle(&self) -> f64 {
        self.ky.atan2(self.kx)
    }

    pub fn is_finite(&self) -> bool {
        self.kx.is_finite() && self.ky.is_finite()
    }
}

impl Add for TransverseMomentum {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        TransverseMomentum::new(self.kx + o.kx, self.ky + o.ky)
    }
}

impl Sub for TransverseMomentum {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        TransverseMomentum::new(self.kx - o.kx, self.ky - o.ky)
    }
}

impl Neg for TransverseMomentum {
    type Output = Self;
    fn neg(self) -> Self {
        TransverseMomentum::new(-self.kx, -self.ky)
    }
}

impl Mul<f64> for TransverseMomentum {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        TransverseMomentum::new(self.kx * s, self.ky * s)
    }
}

/// How the phase-matching sinc is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SincConvention {
    /// Use `sin(πx)/(πx)` instead of `sin(x)/x`.
    #[serde(default)]
    pub normalized: bool,
    /// Scale the argument `|ks−ki|²/σ_S²` by ¼.
    #[serde(default)]
    pub quarter_argument: bool,
}

impl SincConvention {
    pub fn eval(&self, x: f64) -> f64 {
        let x = if self.quarter_argument { 0.25 * x } else { x };
        let x = if self.normalized { PI * x } else { x };
        if x.abs() < 1e-8 {
            1.0 - x * x / 6.0
        } else {
            x.sin() / x
        }
    }
}

/// Widths of the joint transverse momentum amplitude. `sigma_c` may be
/// infinite to switch off the collection filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JtmaParams {
    pub sigma_p: f64,
    pub sigma_s: f64,
    pub sigma_c: f64,
    #[serde(default)]
    pub sinc: SincConvention,
}

impl JtmaParams {
    pub fn new(sigma_p: f64, sigma_s: f64, sigma_c: f64) -> Result<Self> {
        let p = JtmaParams {
            sigma_p,
            sigma_s,
            sigma_c,
            sinc: SincConvention::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_sinc(mut self, sinc: SincConvention) -> Self {
        self.sinc = sinc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma_p > 0.0
            && self.sigma_p.is_finite()
            && self.sigma_s > 0.0
            && self.sigma_s.is_finite()
            && self.sigma_c > 0.0
            && !self.sigma_c.is_nan();
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "JTMA widths must be positive: sigma_p={}, sigma_s={}, sigma_c={}",
                self.sigma_p, self.sigma_s, self.sigma_c
            )));
        }
        if self.sigma_p >= self.sigma_s {
            return Err(Error::InvalidParameter(format!(
                "sigma_p ({}) must be smaller than sigma_s ({}) for a correlated state",
                self.sigma_p, self.sigma_s
            )));
        }
        Ok(())
    }

    /// `exp(−½ρ²/σ_P²)` as a function of `ρ = |ks+ki|`.
    pub(crate) fn pump_factor(&self, sum_sqr: f64) -> f64 {
        (-0.5 * sum_sqr / (self.sigma_p * self.sigma_p)).exp()
    }

    pub(crate) fn phase_matching(&self, diff_sqr: f64) -> f64 {
        self.sinc.eval(diff_sqr / (self.sigma_s * self.sigma_s))
    }

    /// `1/σ_C²`, zero without a collection filter.
    pub(crate) fn inv_sigma_c_sqr(&self) -> f64 {
        if self.sigma_c.is_infinite() {
            0.0
        } else {
            1.0 / (self.sigma_c * self.sigma_c)
        }
    }
}

pub fn jtma_amplitude(ks: TransverseMomentum, ki: TransverseMomentum, p: &JtmaParams) -> f64 {
    p.pump_factor((ks + ki).norm_sqr()) * p.phase_matching((ks - ki).norm_sqr())
}

/// JTMA seen through single-mode collection with a Gaussian acceptance of
/// width `σ_C` on each arm.
pub fn collected_jtma(ks: TransverseMomentum, ki: TransverseMomentum, p: &JtmaParams) -> f64 {
    let c = p.inv_sigma_c_sqr();
    (-0.5 * (ks.norm_sqr() + ki.norm_sqr()) * c).exp() * jtma_amplitude(ks, ki, p)
}
