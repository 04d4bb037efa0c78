//! Macro-pixel layouts in the momentum plane: circle packing inside an
//! aperture, per-ring radius equalization of the diagonal count rates, and
//! phase holograms for superpositions of pixels.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{diagonal_amplitude, Disc, JtmaParams, QuadratureSpec, TransverseMomentum};

const GEOM_TOL: f64 = 1e-9;

/// Circular pixels inside an enclosing aperture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayoutFile", into = "LayoutFile")]
pub struct PixelLayout {
    centers: Vec<TransverseMomentum>,
    radii: Vec<f64>,
    enclosing_radius: f64,
}

#[derive(Serialize, Deserialize)]
struct LayoutFile {
    d: usize,
    enclosing_radius: f64,
    pixels: Vec<PixelEntry>,
}

#[derive(Serialize, Deserialize)]
struct PixelEntry {
    kx: f64,
    ky: f64,
    radius: f64,
}

impl TryFrom<LayoutFile> for PixelLayout {
    type Error = Error;

    fn try_from(f: LayoutFile) -> Result<Self> {
        if f.d != f.pixels.len() {
            return Err(Error::DimensionMismatch {
                expected: f.d,
                got: f.pixels.len(),
            });
        }
        PixelLayout::new(
            f.pixels.iter().map(|p| TransverseMomentum::new(p.kx, p.ky)).collect(),
            f.pixels.iter().map(|p| p.radius).collect(),
            f.enclosing_radius,
        )
    }
}

impl From<PixelLayout> for LayoutFile {
    fn from(l: PixelLayout) -> Self {
        LayoutFile {
            d: l.d(),
            enclosing_radius: l.enclosing_radius,
            pixels: l
                .centers
                .iter()
                .zip(&l.radii)
                .map(|(c, &radius)| PixelEntry {
                    kx: c.kx,
                    ky: c.ky,
                    radius,
                })
                .collect(),
        }
    }
}

impl PixelLayout {
    pub fn new(centers: Vec<TransverseMomentum>, radii: Vec<f64>, enclosing_radius: f64) -> Result<Self> {
        let layout = PixelLayout {
            centers,
            radii,
            enclosing_radius,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.centers.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if self.radii.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.radii.len(),
            });
        }
        if !(self.enclosing_radius > 0.0 && self.enclosing_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "enclosing radius must be positive, got {}",
                self.enclosing_radius
            )));
        }
        let slack = GEOM_TOL * self.enclosing_radius;
        for (m, (c, &r)) in self.centers.iter().zip(&self.radii).enumerate() {
            if !(r > 0.0) || !c.is_finite() {
                return Err(Error::InvalidParameter(format!("pixel {m} has radius {r}")));
            }
            if c.norm() + r > self.enclosing_radius + slack {
                return Err(Error::InfeasibleLayout(format!(
                    "pixel {m} extends beyond the aperture"
                )));
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                let dist = (self.centers[i] - self.centers[j]).norm();
                if dist + slack < self.radii[i] + self.radii[j] {
                    return Err(Error::OverlappingPixels(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[TransverseMomentum] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn disc(&self, m: usize) -> Disc {
        Disc::new(self.centers[m], self.radii[m])
    }

    pub fn discs(&self) -> Vec<Disc> {
        (0..self.d()).map(|m| self.disc(m)).collect()
    }

    /// Layout reflected through the origin.
    pub fn mirrored(&self) -> PixelLayout {
        PixelLayout {
            centers: self.centers.iter().map(|&c| -c).collect(),
            radii: self.radii.clone(),
            enclosing_radius: self.enclosing_radius,
        }
    }

    /// Smallest distance between the edges of two pixels.
    pub fn min_gap(&self) -> f64 {
        let d = self.d();
        let mut gap = f64::INFINITY;
        for i in 0..d {
            for j in i + 1..d {
                gap = gap.min((self.centers[i] - self.centers[j]).norm() - self.radii[i] - self.radii[j]);
            }
        }
        gap
    }

    /// Pixel indices grouped by distance from the origin, innermost first.
    pub fn rings(&self) -> Vec<Vec<usize>> {
        let tol = 1e-6 * self.enclosing_radius;
        let mut order: Vec<usize> = (0..self.d()).collect();
        order.sort_by(|&a, &b| {
            self.centers[a]
                .norm()
                .partial_cmp(&self.centers[b].norm())
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut rings: Vec<Vec<usize>> = Vec::new();
        for m in order {
            let r = self.centers[m].norm();
            match rings.last_mut() {
                Some(ring) if (self.centers[ring[0]].norm() - r).abs() <= tol => ring.push(m),
                _ => rings.push(vec![m]),
            }
        }
        for ring in &mut rings {
            ring.sort_unstable();
        }
        rings
    }
}

/// `Some(K)` when `d = 3K(K+1) + 1`, a centred hexagonal number.
fn hex_rings(d: usize) -> Option<usize> {
    let mut k = 0;
    while 3 * k * (k + 1) + 1 < d {
        k += 1;
    }
    (3 * k * (k + 1) + 1 == d).then_some(k)
}

fn check_packing_args(d: usize, enclosing_radius: f64, min_gap: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(enclosing_radius > 0.0 && enclosing_radius.is_finite()) || !(min_gap >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need positive aperture and non-negative gap, got R={enclosing_radius}, gap={min_gap}"
        )));
    }
    Ok(())
}

/// Places `d` equal pixels in the aperture with at least `min_gap` between
/// neighbouring edges, maximizing the common radius. Centred hexagonal `d`
/// use concentric rings of 6, 12, 18, … pixels; other `d` use a
/// deterministic relaxation.
pub fn pack_pixels(d: usize, enclosing_radius: f64, min_gap: f64) -> Result<PixelLayout> {
    check_packing_args(d, enclosing_radius, min_gap)?;
    if d == 1 {
        return PixelLayout::new(vec![TransverseMomentum::ZERO], vec![enclosing_radius], enclosing_radius);
    }
    let (centers, r) = match hex_rings(d) {
        Some(rings) => {
            let r = (enclosing_radius - rings as f64 * min_gap) / (2 * rings + 1) as f64;
            let mut centers = vec![TransverseMomentum::ZERO];
            for k in 1..=rings {
                let a = k as f64 * (2.0 * r + min_gap);
                let n = 6 * k;
                centers.extend((0..n).map(|j| TransverseMomentum::polar(a, 2.0 * PI * j as f64 / n as f64)));
            }
            (centers, r)
        }
        None => {
            let (points, spread) = spread_points(d);
            // centres at (R − r)·p need spacing 2r + gap
            let r = (enclosing_radius * spread - min_gap) / (spread + 2.0);
            let scale = enclosing_radius - r;
            (points.into_iter().map(|p| p * scale).collect(), r)
        }
    };
    if !(r > 0.0) {
        return Err(Error::InfeasibleLayout(format!(
            "{d} pixels with gap {min_gap} do not fit in radius {enclosing_radius}"
        )));
    }
    let layout = PixelLayout::new(centers, vec![r; d], enclosing_radius)?;
    Ok(layout)
}

/// Packs pixels with the edge gap set to `fraction` of the resulting radius.
pub fn pack_pixels_relative_gap(d: usize, enclosing_radius: f64, fraction: f64) -> Result<PixelLayout> {
    check_packing_args(d, enclosing_radius, fraction)?;
    let mut gap = 0.0;
    let mut layout = pack_pixels(d, enclosing_radius, gap)?;
    for _ in 0..50 {
        let next = fraction * layout.radii[0];
        if (next - gap).abs() <= 1e-12 * enclosing_radius {
            break;
        }
        gap = next;
        layout = pack_pixels(d, enclosing_radius, gap)?;
    }
    Ok(layout)
}

fn min_distance(points: &[TransverseMomentum]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    best
}

/// Spreads `d ≥ 2` points in the unit disc to maximize their smallest
/// pairwise distance. Starts from a sunflower spiral and repeatedly pushes
/// apart every pair closer than a slowly rising target.
fn spread_points(d: usize) -> (Vec<TransverseMomentum>, f64) {
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut pts: Vec<TransverseMomentum> = (0..d)
        .map(|i| TransverseMomentum::polar(((i as f64 + 0.5) / d as f64).sqrt(), i as f64 * golden))
        .collect();
    let mut best = (pts.clone(), min_distance(&pts));
    for it in 0..3000 {
        let target = min_distance(&pts) * (1.0 + 0.02 * (-(it as f64) / 400.0).exp());
        for i in 0..d {
            for j in i + 1..d {
                let sep = pts[j] - pts[i];
                let dist = sep.norm();
                if dist < target {
                    let dir = if dist > 0.0 {
                        sep * (1.0 / dist)
                    } else {
                        TransverseMomentum::polar(1.0, i as f64)
                    };
                    let shift = dir * (0.5 * (target - dist));
                    pts[i] = pts[i] - shift;
                    pts[j] = pts[j] + shift;
                }
            }
        }
        for p in &mut pts {
            let n = p.norm();
            if n > 1.0 {
                *p = *p * (1.0 / n);
            }
        }
        let md = min_distance(&pts);
        if md > best.1 {
            best = (pts.clone(), md);
        }
    }
    best
}

/// Result of radius equalization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedLayout {
    pub layout: PixelLayout,
    /// Diagonal rate `|A[m][m]|²` per pixel after optimization.
    pub rates: Vec<f64>,
}

impl OptimizedLayout {
    /// `max / min` of the diagonal rates.
    pub fn rate_spread(&self) -> f64 {
        let max = self.rates.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.rates.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

const BISECTION_CAP: usize = 80;

/// Shrinks the pixels of each inner ring until its diagonal count rate
/// matches the outermost ring within `tol` (relative). Outer pixels keep
/// their radius.
pub fn optimize_radii(
    layout: &PixelLayout,
    p: &JtmaParams,
    q: &QuadratureSpec,
    tol: f64,
) -> Result<OptimizedLayout> {
    layout.validate()?;
    p.validate()?;
    q.validate()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let order = q.order;
    let rate = |center: TransverseMomentum, radius: f64| {
        diagonal_amplitude(&Disc::new(center, radius), p, order).powi(2)
    };
    let rings = layout.rings();
    let (outer, inner) = rings.split_last().expect("layout has pixels");
    let outer_rates: Vec<f64> = outer.iter().map(|&m| rate(layout.centers[m], layout.radii[m])).collect();
    let target = outer_rates.iter().sum::<f64>() / outer_rates.len() as f64;

    let new_radii: Vec<Result<f64>> = inner
        .par_iter()
        .map(|ring| {
            let m = ring[0];
            let center = layout.centers[m];
            let r_max = ring.iter().map(|&i| layout.radii[i]).fold(f64::MAX, f64::min);
            let at_max = rate(center, r_max);
            if at_max <= target * (1.0 + tol) {
                if at_max < target * (1.0 - tol) {
                    return Err(Error::InfeasibleLayout(format!(
                        "ring at |k| = {:.4} reaches only {:.4} of the outer rate at its largest radius",
                        center.norm(),
                        at_max / target
                    )));
                }
                return Ok(r_max);
            }
            let (mut lo, mut hi) = (0.0, r_max);
            for _ in 0..BISECTION_CAP {
                let mid = 0.5 * (lo + hi);
                let value = rate(center, mid);
                if (value / target - 1.0).abs() <= 0.25 * tol {
                    return Ok(mid);
                }
                if value > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Err(Error::NotConverged(format!(
                "radius bisection for ring at |k| = {:.4}",
                center.norm()
            )))
        })
        .collect();

    let mut radii = layout.radii.clone();
    for (ring, r) in inner.iter().zip(new_radii) {
        let r = r?;
        for &m in ring {
            radii[m] = radii[m].min(r);
        }
    }
    let out = PixelLayout::new(layout.centers.clone(), radii, layout.enclosing_radius)?;
    let rates = (0..out.d())
        .into_par_iter()
        .map(|m| rate(out.centers[m], out.radii[m]))
        .collect();
    Ok(OptimizedLayout { layout: out, rates })
}

/// Raster of grating phases in `[0, 2π)`; `None` marks switched-off
/// SLM pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Option<f64>>,
}

impl PhaseMask {
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.values[y * self.width + x]
    }

    /// Binary 8-bit PGM; phase maps linearly onto 0–255 and off pixels are 0.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.values.iter().map(|v| match v {
            Some(phase) => ((phase / (2.0 * PI)) * 255.0).round().clamp(0.0, 255.0) as u8,
            None => 0,
        }));
        out
    }
}

/// Maps raster pixels onto the square enclosing the aperture.
fn raster_to_momentum(layout: &PixelLayout, width: usize, height: usize) -> impl Fn(usize, usize) -> TransverseMomentum {
    let scale = 2.0 * layout.enclosing_radius / width.min(height) as f64;
    let (cx, cy) = (0.5 * width as f64, 0.5 * height as f64);
    move |x, y| TransverseMomentum::new((x as f64 + 0.5 - cx) * scale, (cy - y as f64 - 0.5) * scale)
}

/// Blazed-grating hologram that prepares `state` over the layout pixels.
/// Each pixel with a nonzero coefficient shows a grating shifted by the
/// coefficient's phase; everything else is off.
pub fn render_hologram(
    layout: &PixelLayout,
    state: &[Complex64],
    width: usize,
    height: usize,
    grating_period: f64,
) -> Result<PhaseMask> {
    layout.validate()?;
    if state.len() != layout.d() {
        return Err(Error::DimensionMismatch {
            expected: layout.d(),
            got: state.len(),
        });
    }
    let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized(norm));
    }
    if !(grating_period >= 4.0) {
        return Err(Error::InvalidParameter(format!(
            "grating period of {grating_period} pixels is below 4 samples"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter("empty raster".into()));
    }
    let to_k = raster_to_momentum(layout, width, height);
    let discs = layout.discs();
    let values = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x, y)))
        .map(|(x, y)| {
            let k = to_k(x, y);
            let m = discs.iter().position(|disc| disc.contains(k))?;
            let c = state[m];
            (c.norm() > 1e-12)
                .then(|| (2.0 * PI * x as f64 / grating_period + c.arg()).rem_euclid(2.0 * PI))
        })
        .collect();
    Ok(PhaseMask { width, height, values })
}

/// SVG drawing of the layout; pixels are coloured by the phase of the
/// matching entry of `state` when given.
pub fn layout_svg(layout: &PixelLayout, state: Option<&[Complex64]>) -> String {
    let size = 400.0;
    let s = 0.48 * size / layout.enclosing_radius;
    let c = 0.5 * size;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="black"/>"#);
    let _ = writeln!(
        out,
        r##"<circle cx="{c}" cy="{c}" r="{:.2}" fill="none" stroke="#666" stroke-dasharray="4 3"/>"##,
        layout.enclosing_radius * s
    );
    for m in 0..layout.d() {
        let k = layout.centers[m];
        let fill = match state.map(|st| st[m]) {
            Some(z) if z.norm() <= 1e-12 => "#222".to_string(),
            Some(z) => format!("hsl({:.1},80%,55%)", z.arg().rem_euclid(2.0 * PI).to_degrees()),
            None => "#ccc".to_string(),
        };
        let (x, y) = (c + k.kx * s, c - k.ky * s);
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{fill}"/>"#,
            layout.radii[m] * s
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle" fill="black">{m}</text>"#,
            y + 3.5
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::WfBasis;

    fn assert_valid(l: &PixelLayout) {
        l.validate().unwrap();
    }

    #[test]
    fn hex_numbers() {
        assert_eq!(hex_rings(1), Some(0));
        assert_eq!(hex_rings(7), Some(1));
        assert_eq!(hex_rings(19), Some(2));
        assert_eq!(hex_rings(37), Some(3));
        for d in [2, 5, 8, 18, 20, 31, 36, 97] {
            assert_eq!(hex_rings(d), None, "{d}");
        }
    }

    #[test]
    fn single_pixel_fills_aperture() {
        let l = pack_pixels(1, 2.5, 0.1).unwrap();
        assert_eq!(l.d(), 1);
        assert_eq!(l.centers()[0], TransverseMomentum::ZERO);
        assert_eq!(l.radii()[0], 2.5);
    }

    #[test]
    fn seven_pixels_form_a_hexagon() {
        let l = pack_pixels(7, 1.0, 0.05).unwrap();
        assert_valid(&l);
        let rings = l.rings();
        assert_eq!(rings.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 6]);
        let mut angles: Vec<f64> = rings[1]
            .iter()
            .map(|&m| l.centers()[m].angle().rem_euclid(2.0 * PI).to_degrees())
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, a) in angles.iter().enumerate() {
            assert!((a - 60.0 * i as f64).abs() < 1e-9);
        }
        assert!((l.min_gap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn nineteen_pixels_form_two_rings() {
        let l = pack_pixels(19, 1.0, 0.02).unwrap();
        assert_valid(&l);
        let sizes: Vec<usize> = l.rings().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 6, 12]);
    }

    #[test]
    fn relaxation_packings_are_valid_and_reasonable() {
        for d in [2, 3, 4, 5, 11, 13, 23, 31] {
            let l = pack_pixels(d, 1.0, 0.01).unwrap();
            assert_valid(&l);
            assert!(l.min_gap() >= 0.01 - 1e-9);
            // area fraction well above a loose random-packing level
            let fill = d as f64 * l.radii()[0].powi(2);
            assert!(fill > 0.45, "d={d}: fill {fill}");
        }
        // two and three pixels reach the known optimum
        let r2 = pack_pixels(2, 1.0, 0.0).unwrap().radii()[0];
        assert!((r2 - 0.5).abs() < 1e-6);
        let r3 = pack_pixels(3, 1.0, 0.0).unwrap().radii()[0];
        let s3 = 3f64.sqrt();
        assert!((r3 - s3 / (s3 + 2.0)).abs() < 1e-4);
    }

    #[test]
    fn packing_is_deterministic() {
        assert_eq!(pack_pixels(11, 1.0, 0.02).unwrap(), pack_pixels(11, 1.0, 0.02).unwrap());
    }

    #[test]
    fn infeasible_packing_reported() {
        assert!(matches!(pack_pixels(19, 1.0, 0.6), Err(Error::InfeasibleLayout(_))));
        assert!(pack_pixels(0, 1.0, 0.0).is_err());
    }

    #[test]
    fn relative_gap_converges() {
        let l = pack_pixels_relative_gap(7, 1.0, 0.1).unwrap();
        let r = l.radii()[0];
        assert!((r - 1.0 / 3.1).abs() < 1e-9);
        assert!((l.min_gap() - 0.1 * r).abs() < 1e-9);
    }

    #[test]
    fn overlapping_layout_rejected() {
        let c = vec![TransverseMomentum::new(0.0, 0.0), TransverseMomentum::new(0.3, 0.0)];
        assert!(matches!(
            PixelLayout::new(c, vec![0.2, 0.2], 1.0),
            Err(Error::OverlappingPixels(0, 1))
        ));
    }

    #[test]
    fn layout_serde_round_trip() {
        let l = pack_pixels(7, 1.0, 0.05).unwrap();
        let json = serde_json::to_string(&l).unwrap();
        let back: PixelLayout = serde_json::from_str(&json).unwrap();
        assert_eq!(l, back);
        let bad = json.replace("\"d\":7", "\"d\":6");
        assert!(serde_json::from_str::<PixelLayout>(&bad).is_err());
    }

    fn preset(sigma_s: f64) -> JtmaParams {
        JtmaParams::new(sigma_s / 50.0, sigma_s, f64::INFINITY).unwrap()
    }

    #[test]
    fn optimize_shrinks_central_pixel() {
        let p = preset(1.0);
        let l = pack_pixels_relative_gap(7, 0.6, 0.1).unwrap();
        let q = QuadratureSpec::new(12).unwrap();
        let out = optimize_radii(&l, &p, &q, 0.01).unwrap();
        assert_valid(&out.layout);
        let r = out.layout.radii();
        assert!(r[0] <= r[1]);
        assert_eq!(r[1..], l.radii()[1..]);
        assert!(out.rate_spread() <= 1.01, "{}", out.rate_spread());
    }

    #[test]
    fn flat_jtma_leaves_radii_unchanged() {
        let p = JtmaParams::new(1e-2, 1e6, f64::INFINITY).unwrap();
        let l = pack_pixels_relative_gap(7, 0.6, 0.1).unwrap();
        let out = optimize_radii(&l, &p, &QuadratureSpec::new(12).unwrap(), 0.01).unwrap();
        for (a, b) in out.layout.radii().iter().zip(l.radii()) {
            assert!((a / b - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn single_pixel_optimization_is_identity() {
        let l = pack_pixels(1, 0.5, 0.0).unwrap();
        let out = optimize_radii(&l, &preset(1.0), &QuadratureSpec::default(), 0.01).unwrap();
        assert_eq!(out.layout, l);
    }

    #[test]
    fn standard_state_lights_one_pixel() {
        let l = pack_pixels(7, 1.0, 0.1).unwrap();
        let mut state = vec![Complex64::new(0.0, 0.0); 7];
        state[3] = Complex64::new(1.0, 0.0);
        let mask = render_hologram(&l, &state, 120, 100, 8.0).unwrap();
        let to_k = raster_to_momentum(&l, 120, 100);
        for y in 0..100 {
            for x in 0..120 {
                let k = to_k(x, y);
                let lit = mask.get(x, y).is_some();
                assert_eq!(lit, l.disc(3).contains(k));
            }
        }
    }

    #[test]
    fn wf_state_phases_follow_quadratic_form() {
        let d = 19;
        let l = pack_pixels(d, 1.0, 0.05).unwrap();
        let (k, j) = (4, 7);
        let v = WfBasis::new(d, k).unwrap().vector(j).unwrap();
        let period = 10.0;
        let mask = render_hologram(&l, v.components(), 200, 200, period).unwrap();
        let to_k = raster_to_momentum(&l, 200, 200);
        let mut seen = vec![false; d];
        for y in 0..200 {
            for x in 0..200 {
                let Some(phase) = mask.get(x, y) else { continue };
                let m = (0..d).find(|&m| l.disc(m).contains(to_k(x, y))).unwrap();
                seen[m] = true;
                let shift = ((j * m + k * m * m) % d) as f64 * 2.0 * PI / d as f64;
                let expected = (2.0 * PI * x as f64 / period + shift).rem_euclid(2.0 * PI);
                let diff = (phase - expected).rem_euclid(2.0 * PI);
                assert!(diff.min(2.0 * PI - diff) < 1e-9);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn uniform_state_has_no_relative_shift() {
        let d = 7;
        let l = pack_pixels(d, 1.0, 0.1).unwrap();
        let v = WfBasis::new(d, 0).unwrap().vector(0).unwrap();
        let mask = render_hologram(&l, v.components(), 64, 64, 4.0).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                if let Some(phase) = mask.get(x, y) {
                    let expected = (2.0 * PI * x as f64 / 4.0).rem_euclid(2.0 * PI);
                    let diff = (phase - expected).rem_euclid(2.0 * PI);
                    assert!(diff.min(2.0 * PI - diff) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn hologram_errors() {
        let l = pack_pixels(7, 1.0, 0.1).unwrap();
        let v = WfBasis::new(7, 0).unwrap().vector(0).unwrap();
        assert!(render_hologram(&l, v.components(), 64, 64, 3.0).is_err());
        assert!(render_hologram(&l, &v.components()[..6], 64, 64, 8.0).is_err());
        let unnorm = vec![Complex64::new(1.0, 0.0); 7];
        assert!(matches!(render_hologram(&l, &unnorm, 64, 64, 8.0), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn pgm_header_and_size() {
        let l = pack_pixels(7, 1.0, 0.1).unwrap();
        let v = WfBasis::new(7, 1).unwrap().vector(2).unwrap();
        let mask = render_hologram(&l, v.components(), 30, 20, 5.0).unwrap();
        let pgm = mask.to_pgm();
        let header = b"P5\n30 20\n255\n";
        assert!(pgm.starts_with(header));
        assert_eq!(pgm.len(), header.len() + 600);
        assert_eq!(pgm[header.len()], 0);
        let svg = layout_svg(&l, Some(v.components()));
        assert_eq!(svg.matches("<circle").count(), 8);
    }
}
