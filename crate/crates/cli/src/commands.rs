use std::fs::{self, File};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use pixent::basis_design::{layout_svg, optimize_radii, pack_pixels_relative_gap, render_hologram, PixelLayout};
use pixent::mub::BasisLabel;
use pixent::optics::{amplitude_matrix, trace, BeamPreset, GaussianBeam, OpticalElement, QuadratureSpec};
use pixent::plot::heatmap_svg;
use pixent::state::{
    apply_isotropic_noise, outcome_probabilities, pure_state_from_amplitudes, simulate_counts, CountMatrix,
};
use pixent::witness::{certify_counts, CertificationReport};

use crate::config::{self, Config};
use crate::failure::{Failure, ResultExt};
use crate::manifest::{parse_bases, setting_stem, Manifest, ModelInfo, SettingEntry};

fn create_dir(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out).data(format!("creating {}", out.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents).data(format!("writing {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).data("serializing")?;
    write(path, text + "\n")
}

fn dimension(config: &Config, d: Option<usize>) -> Result<usize, Failure> {
    let d = d.unwrap_or(config.layout.d);
    if d == 0 {
        return Err(Failure::usage("dimension must be at least 1"));
    }
    Ok(d)
}

/// Layout from the configured file, or packed (and optimized) afresh. Also
/// returns the optimized diagonal rates when available.
fn build_layout(config: &Config, d: usize) -> Result<(PixelLayout, Option<Vec<f64>>), Failure> {
    let lc = &config.layout;
    if let Some(path) = &lc.file {
        let file = File::open(path).data(format!("opening {}", path.display()))?;
        let layout: PixelLayout = serde_json::from_reader(file).data(format!("parsing {}", path.display()))?;
        if layout.d() != d {
            return Err(Failure::data(format!(
                "{} holds {} pixels, expected {d}",
                path.display(),
                layout.d()
            )));
        }
        return Ok((layout, None));
    }
    let layout = pack_pixels_relative_gap(d, lc.enclosing_radius, lc.gap_fraction).data("packing pixels")?;
    if !lc.optimize {
        return Ok((layout, None));
    }
    let p = config.jtma.params()?;
    let q: QuadratureSpec = config.quadrature;
    let optimized = optimize_radii(&layout, &p, &q, lc.tolerance).data("optimizing radii")?;
    Ok((optimized.layout, Some(optimized.rates)))
}

pub fn design(config_path: Option<&Path>, out: &Path, d: Option<usize>) -> Result<(), Failure> {
    let config = config::load(config_path)?;
    let d = dimension(&config, d)?;
    let (layout, rates) = build_layout(&config, d)?;
    create_dir(out)?;
    write_json(&out.join("layout.json"), &layout)?;

    let hologram_state = match &config.hologram {
        Some(h) => {
            let label: BasisLabel = h.basis.parse().data("hologram basis")?;
            let vectors = label.vectors(d).data("hologram basis")?;
            let v = vectors
                .get(h.vector)
                .ok_or_else(|| Failure::data(format!("hologram vector {} out of range for d = {d}", h.vector)))?;
            let coefficients = v.components().to_vec();
            let mask = render_hologram(&layout, &coefficients, h.width, h.height, h.grating_period)
                .data("rendering hologram")?;
            write(&out.join("hologram.pgm"), mask.to_pgm())?;
            Some(coefficients)
        }
        None => None,
    };
    write(&out.join("layout.svg"), layout_svg(&layout, hologram_state.as_deref()))?;

    println!("{d} pixels in radius {:.4}", layout.enclosing_radius());
    for (m, (c, r)) in layout.centers().iter().zip(layout.radii()).enumerate() {
        print!("  pixel {m:>3}  centre ({:>8.4}, {:>8.4})  radius {:.5}", c.kx, c.ky, r);
        if let Some(rates) = &rates {
            print!("  rate {:.4e}", rates[m]);
        }
        println!();
    }
    if let Some(rates) = &rates {
        let max = rates.iter().cloned().fold(f64::MIN, f64::max);
        let min = rates.iter().cloned().fold(f64::MAX, f64::min);
        println!("diagonal rate spread {:.3}%", 100.0 * (max / min - 1.0));
    }
    Ok(())
}

pub struct SimulateOverrides {
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub bases: Option<String>,
    pub pairs: Option<u64>,
    pub noise: Option<f64>,
}

fn phi_plus(d: usize) -> DVector<Complex64> {
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    DVector::from_fn(d * d, |i, _| if i / d == i % d { a } else { Complex64::new(0.0, 0.0) })
}

pub fn simulate(config_path: Option<&Path>, out: &Path, o: SimulateOverrides) -> Result<(), Failure> {
    let config = config::load(config_path)?;
    let d = dimension(&config, o.d)?;
    let seed = o.seed.or(config.seed).unwrap_or(0);
    let settings = match &o.bases {
        Some(list) => parse_bases(list)?,
        None => parse_bases(&config.simulate.bases.join(","))?,
    };
    if settings.is_empty() {
        return Err(Failure::usage("no bases to simulate"));
    }
    let total_pairs = o.pairs.unwrap_or(config.simulate.total_pairs);
    let noise = o.noise.unwrap_or(config.simulate.noise);

    let (layout, _) = build_layout(&config, d)?;
    let p = config.jtma.params()?;
    let amplitudes = amplitude_matrix(&layout, &p, &config.quadrature)
        .data("pair amplitudes")?
        .into_result()
        .data("pair amplitudes")?;
    let mut state = pure_state_from_amplitudes(&amplitudes).data("pixel state")?;
    if noise > 0.0 {
        state = apply_isotropic_noise(&state, noise).data("noise")?;
    }
    let fidelity = state.overlap(&phi_plus(d)).data("fidelity")?;

    create_dir(out)?;
    write_json(&out.join("layout.json"), &layout)?;
    let mut entries = Vec::with_capacity(settings.len());
    for (i, setting) in settings.iter().enumerate() {
        let probs = outcome_probabilities(&state, setting).data(format!("probabilities for {setting}"))?;
        let counts = simulate_counts(&probs, *setting, total_pairs, seed.wrapping_add(i as u64))
            .data(format!("counts for {setting}"))?;
        let file = PathBuf::from(format!("counts_{}.csv", setting_stem(setting)));
        let path = out.join(&file);
        counts
            .write_csv(File::create(&path).data(format!("creating {}", path.display()))?)
            .data(format!("writing {}", path.display()))?;
        entries.push(SettingEntry {
            basis_a: setting.basis_a,
            basis_b: setting.basis_b,
            conjugate_b: setting.conjugate_b,
            file,
            acquisition_time: config.simulate.acquisition_time,
        });
    }
    let manifest = Manifest {
        d,
        layout: Some("layout.json".into()),
        seed: Some(seed),
        jtma: Some(config.jtma),
        model: Some(ModelInfo {
            total_pairs,
            noise,
            fidelity,
        }),
        settings: entries,
    };
    manifest.write(&out.join("manifest.json"))?;
    println!(
        "simulated {} settings at d = {d}; model fidelity {fidelity:.6}; written to {}",
        settings.len(),
        out.display()
    );
    Ok(())
}

fn normalized(c: &CountMatrix) -> DMatrix<f64> {
    let total = c.total().max(1) as f64;
    c.counts().map(|n| n as f64 / total)
}

pub fn certify(
    manifest_path: &Path,
    out: Option<&Path>,
    resamples: usize,
    seed: Option<u64>,
    bases: Option<&str>,
) -> Result<(), Failure> {
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut counts = manifest.load_counts(base)?;
    if let Some(list) = bases {
        let wanted = parse_bases(list)?;
        counts.retain(|c| wanted.contains(&c.setting));
        if counts.len() != wanted.len() {
            return Err(Failure::data(format!("manifest lacks some of the requested bases {list}")));
        }
    }
    if resamples == 1 {
        return Err(Failure::usage("--resamples must be 0 (off) or at least 2"));
    }
    let seed = seed.or(manifest.seed).unwrap_or(0);
    let report = certify_counts(&counts, resamples, seed).data("certification")?;

    let out = out.unwrap_or(base);
    create_dir(out)?;
    write_json(&out.join("report.json"), &report)?;
    let text = report.to_text();
    write(&out.join("report.txt"), &text)?;
    for c in &counts {
        let stem = setting_stem(&c.setting);
        write(
            &out.join(format!("heatmap_{stem}.svg")),
            heatmap_svg(&normalized(c), &format!("{} ({} counts)", c.setting, c.total())),
        )?;
    }
    print!("{text}");
    Ok(())
}

pub fn report(path: &Path, json: bool) -> Result<(), Failure> {
    let path = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let file = File::open(&path).data(format!("opening {}", path.display()))?;
    let report: CertificationReport = serde_json::from_reader(file).data(format!("parsing {}", path.display()))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).data("serializing")?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn element_name(e: &OpticalElement) -> String {
    match e {
        OpticalElement::Space { distance_mm } => format!("space {distance_mm} mm"),
        OpticalElement::ThinLens { focal_mm } => format!("lens f = {focal_mm} mm"),
    }
}

fn print_trace(title: &str, beam: &GaussianBeam, elements: &[OpticalElement]) -> Result<GaussianBeam, Failure> {
    let steps = trace(beam, elements).data(title)?;
    println!("{title}");
    println!("  {:<22} {:>12} {:>14}", "after", "waist (um)", "position (mm)");
    println!("  {:<22} {:>12.1} {:>14.2}", "input", beam.waist_um, beam.waist_position_mm);
    for (e, b) in elements.iter().zip(&steps) {
        println!("  {:<22} {:>12.1} {:>14.2}", element_name(e), b.waist_um, b.waist_position_mm);
    }
    Ok(steps.last().copied().unwrap_or(*beam))
}

pub fn beam(preset: Option<&str>, config_path: Option<&Path>) -> Result<(), Failure> {
    let from_config = match config_path {
        Some(p) => config::load(Some(p))?.beam,
        None => None,
    };
    let preset_name = preset.map(str::to_string).or_else(|| from_config.as_ref().and_then(|b| b.preset.clone()));
    let presets: Vec<BeamPreset> = match (&preset_name, &from_config) {
        (Some(name), _) => vec![BeamPreset::from_name(name)
            .ok_or_else(|| Failure::usage(format!("unknown preset {name:?}; expected pump, slm or ift")))?],
        (None, Some(b)) => {
            print_trace("configured beam", &b.beam()?, &b.elements)?;
            return Ok(());
        }
        (None, None) => BeamPreset::ALL.to_vec(),
    };
    for p in presets {
        let (beam, elements) = p.setup();
        let last = print_trace(p.name(), &beam, &elements)?;
        println!(
            "  output waist {:.1} um, expected {:.0} um ({:+.2}%)",
            last.waist_um,
            p.expected_waist_um(),
            100.0 * (last.waist_um / p.expected_waist_um() - 1.0)
        );
    }
    Ok(())
}
