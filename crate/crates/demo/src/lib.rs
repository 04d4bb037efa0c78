//! Browser demo: pixel layouts with basis-state phases, JTMA slices and
//! certification of noisy maximally entangled states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use pixent::basis_design::{layout_svg, optimize_radii, pack_pixels_relative_gap};
use pixent::mub::BasisLabel;
use pixent::optics::{jtma_amplitude, JtmaParams, QuadratureSpec, TransverseMomentum};
use pixent::plot::heatmap_svg;
use pixent::state::{apply_isotropic_noise, outcome_probabilities, MeasurementSetting, TwoQuditState};
use pixent::witness::{certify_dimension, eof_bound, fidelity_lower_bound_two_wf, TargetState};

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn basis_coefficients(d: usize, basis: &str, vector: usize) -> Result<Vec<Complex64>, JsValue> {
    let label: BasisLabel = basis.parse().map_err(js_err)?;
    let vectors = label.vectors(d).map_err(js_err)?;
    let v = vectors
        .get(vector)
        .ok_or_else(|| js_err(format!("vector {vector} out of range for d = {d}")))?;
    Ok(v.components().to_vec())
}

/// SVG of a packed layout with pixels coloured by the phases of one basis
/// vector (`basis` is `standard` or `wf:k`). With `optimize` the inner radii
/// are equalized against a narrow-pump JTMA first.
#[wasm_bindgen]
pub fn layout_with_state(
    d: usize,
    gap_fraction: f64,
    optimize: bool,
    basis: &str,
    vector: usize,
) -> Result<String, JsValue> {
    let mut layout = pack_pixels_relative_gap(d, 0.6, gap_fraction).map_err(js_err)?;
    if optimize {
        let p = JtmaParams::new(0.02, 1.0, f64::INFINITY).map_err(js_err)?;
        let q = QuadratureSpec::new(8).map_err(js_err)?;
        layout = optimize_radii(&layout, &p, &q, 0.01).map_err(js_err)?.layout;
    }
    let state = basis_coefficients(d, basis, vector)?;
    Ok(layout_svg(&layout, Some(&state)))
}

/// Heatmap of `|F(ks, ki)|` along the x axes of both momenta, on a
/// `size × size` grid spanning `±2σ_S`.
#[wasm_bindgen]
pub fn jtma_slice(sigma_p: f64, sigma_s: f64, size: usize) -> Result<String, JsValue> {
    let p = JtmaParams::new(sigma_p, sigma_s, f64::INFINITY).map_err(js_err)?;
    let n = size.clamp(8, 200);
    let k = |i: usize| TransverseMomentum::new(2.0 * sigma_s * (2.0 * i as f64 / (n - 1) as f64 - 1.0), 0.0);
    let values = DMatrix::from_fn(n, n, |i, j| jtma_amplitude(k(i), k(j), &p).abs());
    Ok(heatmap_svg(&values, "|F| for signal x (rows) and idler x (columns)"))
}

#[derive(Serialize)]
struct Certification {
    fidelity: f64,
    bound: f64,
    d_ent: usize,
    eof: f64,
    eof_max: f64,
}

/// Two-WF certification of the maximally entangled state of dimension `d`
/// mixed with white noise of weight `noise`; returns JSON.
#[wasm_bindgen]
pub fn certify_isotropic(d: usize, noise: f64) -> Result<String, JsValue> {
    let state = TwoQuditState::maximally_entangled(d).map_err(js_err)?;
    let state = apply_isotropic_noise(&state, noise).map_err(js_err)?;
    let probs = |k| outcome_probabilities(&state, &MeasurementSetting::wf(k)).map_err(js_err);
    let (p0, p1) = (probs(0)?, probs(1)?);
    let bound = fidelity_lower_bound_two_wf(&p0, &p1, 0, 1, d).map_err(js_err)?.value;
    let target = TargetState::maximally_entangled(d).map_err(js_err)?;
    let dd = (d * d) as f64;
    let result = Certification {
        fidelity: 1.0 - noise + noise / dd,
        bound,
        d_ent: certify_dimension(bound, &target),
        eof: eof_bound(&p0, &p1, d).map_err(js_err)?.value,
        eof_max: (d as f64).log2(),
    };
    serde_json::to_string(&result).map_err(js_err)
}
