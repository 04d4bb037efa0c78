//! Coincidence probabilities and pixel-pair amplitudes.
//!
//! Two routes are provided. [`coincidence_probability`] integrates arbitrary
//! holograms by product Gauss–Legendre rules over their support. The pixel
//! route behind [`amplitude_matrix`] changes variables to `u = ks+ki`,
//! `v = ks−ki`; the JTMA then factorizes into a radial function of `|u|` and
//! one of `|v|`, and the region allowed by two pixel discs becomes, for each
//! `u`, the lens-shaped intersection of two discs in the `v` plane. The
//! angular part of that inner integral is done exactly, which keeps narrow
//! pump widths cheap.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jtma::{collected_jtma, JtmaParams, TransverseMomentum};
use crate::basis_design::PixelLayout;
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Relative change allowed when the quadrature order is doubled.
pub const CONVERGENCE_TOL: f64 = 0.01;

/// Entries smaller than this fraction of the largest entry are exempt from
/// the relative convergence test.
pub const CONVERGENCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per axis (radial, and per angular half-turn).
    pub order: usize,
    /// Half-width of the square box used for holograms without compact
    /// support, in units of `max(σ_S, layout radius)`.
    #[serde(default = "default_box_sigmas")]
    pub box_sigmas: f64,
}

fn default_box_sigmas() -> f64 {
    5.0
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 16,
            box_sigmas: default_box_sigmas(),
        }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize) -> Result<Self> {
        let q = QuadratureSpec {
            order,
            ..Default::default()
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 8 {
            return Err(Error::InvalidParameter(format!(
                "quadrature order must be at least 8, got {}",
                self.order
            )));
        }
        if !(self.box_sigmas >= 5.0) {
            return Err(Error::InvalidParameter(format!(
                "integration box must cover at least 5 sigma, got {}",
                self.box_sigmas
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            order: self.order * 2,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: TransverseMomentum,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: TransverseMomentum, radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn contains(&self, k: TransverseMomentum) -> bool {
        (k - self.center).norm_sqr() <= self.radius * self.radius
    }

    pub fn mirrored(&self) -> Self {
        Disc::new(-self.center, self.radius)
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
struct Rule(Vec<(f64, f64)>);

impl Rule {
    fn new(order: usize) -> Self {
        let n = NonZeroUsize::new(order.max(2)).unwrap();
        let gl = GaussLegendre::new(n);
        Rule(gl.as_node_weight_pairs().to_vec())
    }

    fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * self.0.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
    }

    /// Integral over `[a, b]` after `x = mid − half·cos t`; absorbs square-root
    /// behaviour at both ends.
    fn integrate_cos(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.integrate(0.0, PI, |t| f(mid - half * t.cos()) * half * t.sin())
    }
}

/// Part of the circle `|x| = ρ` inside a disc.
#[derive(Debug, Clone, Copy)]
enum Arc {
    Empty,
    Full,
    Partial { mid: f64, half: f64 },
}

impl Arc {
    fn of_circle_in(rho: f64, disc: &Disc) -> Arc {
        let a = disc.center.norm();
        let r = disc.radius;
        if rho + a <= r {
            return Arc::Full;
        }
        if (rho - a).abs() >= r || rho == 0.0 || a == 0.0 {
            return Arc::Empty;
        }
        let cos = ((rho * rho + a * a - r * r) / (2.0 * rho * a)).clamp(-1.0, 1.0);
        Arc::Partial {
            mid: disc.center.angle(),
            half: cos.acos(),
        }
    }

    fn measure(&self) -> f64 {
        match *self {
            Arc::Empty => 0.0,
            Arc::Full => TWO_PI,
            Arc::Partial { half, .. } => 2.0 * half,
        }
    }

    fn overlap(&self, other: &Arc) -> f64 {
        match (*self, *other) {
            (Arc::Empty, _) | (_, Arc::Empty) => 0.0,
            (Arc::Full, x) | (x, Arc::Full) => x.measure(),
            (Arc::Partial { mid: m1, half: h1 }, Arc::Partial { mid: m2, half: h2 }) => {
                let delta = (m2 - m1).rem_euclid(TWO_PI);
                let ov = |x: f64| (h1.min(x + h2) - (-h1).max(x - h2)).max(0.0);
                (ov(delta) + ov(delta - TWO_PI)).min(2.0 * h1.min(h2))
            }
        }
    }
}

/// Radii of the points where the boundaries of two discs cross.
fn crossing_radii(a: &Disc, b: &Disc) -> Vec<f64> {
    let sep = b.center - a.center;
    let d = sep.norm();
    if d == 0.0 || d >= a.radius + b.radius || d <= (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    let h = (a.radius * a.radius - along * along).max(0.0).sqrt();
    let unit = sep * (1.0 / d);
    let perp = TransverseMomentum::new(-unit.ky, unit.kx);
    let foot = a.center + unit * along;
    vec![(foot + perp * h).norm(), (foot - perp * h).norm()]
}

/// Sorted breakpoints of `[lo, hi]` at which radial integrands over disc
/// intersections lose smoothness.
fn radial_segments(lo: f64, hi: f64, discs: &[&Disc], extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for disc in discs {
        let a = disc.center.norm();
        pts.extend([a - disc.radius, disc.radius - a, a + disc.radius]);
    }
    pts.extend_from_slice(extra);
    let span = hi - lo;
    pts.retain(|&p| p >= lo && p <= hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * span.max(1e-300));
    pts
}

/// `∫ h(|v|) d²v` over the intersection of two discs.
fn lens_integral(c1: &Disc, c2: &Disc, h: &impl Fn(f64) -> f64, rule: &Rule) -> f64 {
    if (c1.center - c2.center).norm() >= c1.radius + c2.radius {
        return 0.0;
    }
    let (a1, a2) = (c1.center.norm(), c2.center.norm());
    let lo = 0f64.max(a1 - c1.radius).max(a2 - c2.radius);
    let hi = (a1 + c1.radius).min(a2 + c2.radius);
    if hi <= lo {
        return 0.0;
    }
    let pts = radial_segments(lo, hi, &[c1, c2], &crossing_radii(c1, c2));
    pts.windows(2)
        .map(|w| {
            rule.integrate_cos(w[0], w[1], |rho| {
                let theta = Arc::of_circle_in(rho, c1).overlap(&Arc::of_circle_in(rho, c2));
                h(rho) * rho * theta
            })
        })
        .sum()
}

/// `∫_{signal} d²ks ∫_{idler} d²ki G(ks, ki)` for two pixel discs given in
/// momentum coordinates.
pub fn pair_amplitude(signal: &Disc, idler: &Disc, p: &JtmaParams, order: usize) -> f64 {
    pair_amplitude_with(signal, idler, p, &Rule::new(order))
}

fn pair_amplitude_with(signal: &Disc, idler: &Disc, p: &JtmaParams, rule: &Rule) -> f64 {
    let c = p.inv_sigma_c_sqr();
    let inv_p = 1.0 / (p.sigma_p * p.sigma_p);
    // |ks|² + |ki|² = (|u|² + |v|²)/2
    let outer_decay = 0.5 * inv_p + 0.25 * c;
    let w = |rho: f64| (-rho * rho * outer_decay).exp();
    let h = |rho: f64| p.phase_matching(rho * rho) * (-0.25 * rho * rho * c).exp();

    let sum_region = Disc::new(signal.center + idler.center, signal.radius + idler.radius);
    let cutoff = (40.0 / outer_decay).sqrt();
    let a = sum_region.center.norm();
    let lo = 0f64.max(a - sum_region.radius);
    let hi = cutoff.min(a + sum_region.radius);
    if hi <= lo {
        return 0.0;
    }

    let inner = |u: TransverseMomentum| {
        let c1 = Disc::new(signal.center * 2.0 - u, 2.0 * signal.radius);
        let c2 = Disc::new(u - idler.center * 2.0, 2.0 * idler.radius);
        lens_integral(&c1, &c2, &h, rule)
    };

    let full_turn = |f: &dyn Fn(f64) -> f64| rule.integrate(0.0, PI, f) + rule.integrate(PI, TWO_PI, f);
    let total: f64 = if cutoff >= a + sum_region.radius {
        // The pump cutoff does not clip the sum region: integrate in polar
        // coordinates about its centre, where the only interior kink is the
        // circle on which one pixel image starts to contain the other.
        let centre = sum_region.center;
        let kink = (signal.radius - idler.radius).abs();
        let mut pts = vec![0.0, sum_region.radius];
        if kink > 0.0 {
            pts.insert(1, kink);
        }
        pts.windows(2)
            .map(|seg| {
                rule.integrate_cos(seg[0], seg[1], |rho| {
                    rho * full_turn(&|t| {
                        let u = centre + TransverseMomentum::polar(rho, t);
                        w(u.norm()) * inner(u)
                    })
                })
            })
            .sum()
    } else {
        let pts = radial_segments(lo, hi, &[&sum_region], &[]);
        pts.windows(2)
            .map(|seg| {
                rule.integrate_cos(seg[0], seg[1], |rho| {
                    let angular = match Arc::of_circle_in(rho, &sum_region) {
                        Arc::Empty => 0.0,
                        Arc::Full => full_turn(&|t| inner(TransverseMomentum::polar(rho, t))),
                        Arc::Partial { mid, half } => rule.integrate_cos(mid - half, mid + half, |t| {
                            inner(TransverseMomentum::polar(rho, t))
                        }),
                    };
                    w(rho) * rho * angular
                })
            })
            .sum()
    };
    // d²ks d²ki = ¼ d²u d²v
    0.25 * total
}

/// Pixel-basis amplitude matrix with its convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    /// `A[m][n]` for signal pixel `m` and idler pixel `n`.
    pub values: DMatrix<Complex64>,
    /// Largest relative change of a significant entry when the order doubles.
    pub max_relative_change: f64,
    pub converged: bool,
}

impl AmplitudeMatrix {
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Diagonal count rates `|A[m][m]|²`.
    pub fn diagonal_rates(&self) -> Vec<f64> {
        (0..self.dim()).map(|m| self.values[(m, m)].norm_sqr()).collect()
    }

    pub fn into_result(self) -> Result<DMatrix<Complex64>> {
        if self.converged {
            Ok(self.values)
        } else {
            Err(Error::NotConverged(format!(
                "amplitude matrix changed by {:.3}% on doubling the quadrature order",
                100.0 * self.max_relative_change
            )))
        }
    }
}

/// `A[m][n] = ∫∫ P_m(ks) P̃_n(ki) G(ks, ki)`, where `P_m` is the signal pixel
/// disc and `P̃_n` the idler pixel disc reflected through the origin (the
/// idler image is inverted relative to the signal). Each entry is evaluated
/// at `q.order` and twice that; the finer value is returned.
pub fn amplitude_matrix(
    layout: &PixelLayout,
    p: &JtmaParams,
    q: &QuadratureSpec,
) -> Result<AmplitudeMatrix> {
    p.validate()?;
    q.validate()?;
    layout.validate()?;
    let d = layout.d();
    let signal = layout.discs();
    let idler = layout.mirrored().discs();
    let coarse = Rule::new(q.order);
    let fine = Rule::new(2 * q.order);
    let pairs: Vec<(f64, f64)> = (0..d * d)
        .into_par_iter()
        .map(|idx| {
            let (m, n) = (idx / d, idx % d);
            (
                pair_amplitude_with(&signal[m], &idler[n], p, &coarse),
                pair_amplitude_with(&signal[m], &idler[n], p, &fine),
            )
        })
        .collect();
    let scale = pairs.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
    let max_relative_change = pairs
        .iter()
        .filter(|(_, f)| f.abs() > CONVERGENCE_FLOOR * scale)
        .map(|(c, f)| ((f - c) / f).abs())
        .fold(0.0, f64::max);
    let values = DMatrix::from_fn(d, d, |m, n| Complex64::new(pairs[m * d + n].1, 0.0));
    Ok(AmplitudeMatrix {
        values,
        max_relative_change,
        converged: max_relative_change < CONVERGENCE_TOL,
    })
}

/// Diagonal amplitude `A[m][m]` for one pixel disc paired with its mirror.
pub fn diagonal_amplitude(pixel: &Disc, p: &JtmaParams, order: usize) -> f64 {
    pair_amplitude(pixel, &pixel.mirrored(), p, order)
}

/// Region on which a hologram may be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Union of disjoint discs.
    Discs(Vec<Disc>),
    /// No compact support; integrate over a square box around the origin
    /// whose half-width is `box_sigmas·σ_S`.
    Unbounded,
}

/// Complex transmission of a phase-only (or on/off) mask in momentum space.
pub trait Hologram: Sync {
    fn value(&self, k: TransverseMomentum) -> Complex64;
    fn support(&self) -> Support;
}

/// Superposition of pixel indicators with complex weights of modulus ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelHologram {
    discs: Vec<Disc>,
    weights: Vec<Complex64>,
}

impl PixelHologram {
    pub fn new(discs: Vec<Disc>, weights: Vec<Complex64>) -> Result<Self> {
        if discs.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: discs.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| w.norm() > 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "hologram weight {w} exceeds unit modulus"
            )));
        }
        Ok(PixelHologram { discs, weights })
    }

    pub fn single(disc: Disc) -> Self {
        PixelHologram {
            discs: vec![disc],
            weights: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Mask on the signal arm over the layout pixels.
    pub fn signal(layout: &PixelLayout, weights: &[Complex64]) -> Result<Self> {
        Self::new(layout.discs(), weights.to_vec())
    }

    /// Mask on the idler arm; pixel discs are reflected through the origin.
    pub fn idler(layout: &PixelLayout, weights: &[Complex64]) -> Result<Self> {
        Self::new(layout.mirrored().discs(), weights.to_vec())
    }

    /// Same mask multiplied by a global phase factor.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let f = Complex64::from_polar(1.0, phase);
        PixelHologram {
            discs: self.discs.clone(),
            weights: self.weights.iter().map(|w| w * f).collect(),
        }
    }
}

impl Hologram for PixelHologram {
    fn value(&self, k: TransverseMomentum) -> Complex64 {
        self.discs
            .iter()
            .zip(&self.weights)
            .find(|(disc, _)| disc.contains(k))
            .map(|(_, w)| *w)
            .unwrap_or_default()
    }

    fn support(&self) -> Support {
        Support::Discs(
            self.discs
                .iter()
                .zip(&self.weights)
                .filter(|(_, w)| w.norm() > 0.0)
                .map(|(disc, _)| *disc)
                .collect(),
        )
    }
}

/// Hologram defined by an arbitrary function, clipped to unit modulus.
pub struct FnHologram<F>(pub F);

impl<F> Hologram for FnHologram<F>
where
    F: Fn(TransverseMomentum) -> Complex64 + Sync,
{
    fn value(&self, k: TransverseMomentum) -> Complex64 {
        let v = (self.0)(k);
        let n = v.norm();
        if n > 1.0 {
            v / n
        } else {
            v
        }
    }

    fn support(&self) -> Support {
        Support::Unbounded
    }
}

fn nodes(h: &dyn Hologram, half_width: f64, rule: &Rule) -> Vec<(TransverseMomentum, Complex64)> {
    let mut out = Vec::new();
    match h.support() {
        Support::Discs(discs) => {
            for disc in discs {
                let r = disc.radius;
                for &(x, wx) in &rule.0 {
                    let rho = 0.5 * r * (x + 1.0);
                    for half in [0.0, PI] {
                        for &(t, wt) in &rule.0 {
                            let theta = half + 0.5 * PI * (t + 1.0);
                            let k = disc.center + TransverseMomentum::polar(rho, theta);
                            let weight = 0.5 * r * wx * 0.5 * PI * wt * rho;
                            out.push((k, h.value(k) * weight));
                        }
                    }
                }
            }
        }
        Support::Unbounded => {
            for &(x, wx) in &rule.0 {
                for &(y, wy) in &rule.0 {
                    let k = TransverseMomentum::new(half_width * x, half_width * y);
                    out.push((k, h.value(k) * (half_width * half_width * wx * wy)));
                }
            }
        }
    }
    out.retain(|(_, v)| v.norm() > 0.0);
    out
}

fn coincidence_at(
    phi_s: &dyn Hologram,
    phi_i: &dyn Hologram,
    p: &JtmaParams,
    half_width: f64,
    order: usize,
) -> f64 {
    let rule = Rule::new(order);
    let s = nodes(phi_s, half_width, &rule);
    let i = nodes(phi_i, half_width, &rule);
    let amp: Complex64 = s
        .par_iter()
        .map(|&(ks, ws)| {
            i.iter()
                .map(|&(ki, wi)| ws * wi * collected_jtma(ks, ki, p))
                .sum::<Complex64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    amp.norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceEstimate {
    pub probability: f64,
    pub relative_change: f64,
    pub converged: bool,
}

/// `|∫d²ks ∫d²ki Φs(ks) Φi(ki) G(ks, ki)|²` by product Gauss–Legendre
/// quadrature, compared against the same rule at double order.
pub fn coincidence_probability(
    phi_s: &dyn Hologram,
    phi_i: &dyn Hologram,
    p: &JtmaParams,
    q: &QuadratureSpec,
) -> Result<CoincidenceEstimate> {
    p.validate()?;
    q.validate()?;
    let mut scale = p.sigma_s;
    for h in [phi_s, phi_i] {
        if let Support::Discs(discs) = h.support() {
            for disc in discs {
                scale = scale.max(disc.center.norm() + disc.radius);
            }
        }
    }
    let half_width = q.box_sigmas * scale;
    let coarse = coincidence_at(phi_s, phi_i, p, half_width, q.order);
    let fine = coincidence_at(phi_s, phi_i, p, half_width, 2 * q.order);
    let relative_change = if fine > 0.0 {
        ((fine - coarse) / fine).abs()
    } else if coarse == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CoincidenceEstimate {
        probability: fine,
        relative_change,
        converged: relative_change < CONVERGENCE_TOL,
    })
}
