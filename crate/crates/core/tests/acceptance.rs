//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use pixent::basis_design::{optimize_radii, pack_pixels_relative_gap};
use pixent::mub::{
    coeff_c_standard, coeff_c_two_wf, verify_mutually_unbiased, wf_overlap_coeff, BasisVector, WfBasis,
};
use pixent::numtheory::{gauss_sum_closed, gauss_sum_direct, gcd, gen_gauss_sum, is_prime};
use pixent::optics::{amplitude_matrix, propagate, BeamPreset, JtmaParams, QuadratureSpec};
use pixent::state::{
    apply_isotropic_noise, counts_to_probs, outcome_probabilities, pure_state_from_amplitudes, simulate_counts,
    CountMatrix, MeasurementSetting, TwoQuditState,
};
use pixent::stats::poisson_bootstrap;
use pixent::witness::{
    certify_dimension, eof_bound, fidelity_exact_all_mubs, fidelity_lower_bound_two_wf, schmidt_threshold,
    TargetState,
};

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn phi_plus(d: usize) -> DVector<Complex64> {
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    DVector::from_fn(d * d, |idx, _| if idx / d == idx % d { amp } else { Complex64::new(0.0, 0.0) })
}

/// Random two-qudit density matrix. Cycles through Ginibre states of random
/// rank, perturbations of `|Φ⁺⟩`, and such perturbations mixed with Ginibre
/// noise, so that both loose and nearly tight bounds are exercised.
fn random_state(d: usize, index: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let dd = d * d;
    let ginibre = |rng: &mut ChaCha8Rng| {
        let rank = rng.gen_range(1..=dd);
        let g = DMatrix::from_fn(dd, rank, |_, _| complex_normal(rng));
        let rho = &g * g.adjoint();
        let tr = rho.trace();
        rho / tr
    };
    let near_phi = |rng: &mut ChaCha8Rng| {
        let eps: f64 = rng.gen_range(0.0..0.5);
        let noise = DVector::from_fn(dd, |_, _| complex_normal(rng));
        let v = phi_plus(d) + noise.normalize() * Complex64::new(eps, 0.0);
        let v = v.normalize();
        &v * v.adjoint()
    };
    match index % 3 {
        0 => ginibre(rng),
        1 => near_phi(rng),
        _ => {
            let t: f64 = rng.gen_range(0.0..1.0);
            near_phi(rng) * Complex64::new(t, 0.0) + ginibre(rng) * Complex64::new(1.0 - t, 0.0)
        }
    }
}

fn brute_force_fidelity(rho: &DMatrix<Complex64>, d: usize) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rho[(i * d + i, j * d + j)];
        }
    }
    acc.re / d as f64
}

fn wf_probabilities(state: &TwoQuditState, d: usize) -> Vec<DMatrix<f64>> {
    (0..d)
        .map(|k| outcome_probabilities(state, &MeasurementSetting::wf(k)).unwrap())
        .collect()
}

fn table_one() -> Outcome {
    let fidelities = [0.982, 0.975, 0.964, 0.939, 0.941, 0.943, 0.944];
    let dims = [3, 5, 7, 11, 13, 17, 19];
    let expected = [3, 5, 7, 11, 13, 17, 18];
    let got: Vec<usize> = fidelities
        .iter()
        .zip(dims)
        .map(|(&f, d)| certify_dimension(f, &TargetState::maximally_entangled(d).unwrap()))
        .collect();
    Outcome::new(got == expected, format!("d_ent = {got:?}"))
}

fn table_two() -> Outcome {
    let cases = [
        (0.93, 19, 18),
        (0.92, 23, 22),
        (0.90, 29, 27),
        (0.92, 31, 29),
        (0.84, 37, 32),
        (0.73, 51, 38),
        (0.56, 97, 55),
    ];
    let got: Vec<usize> = cases
        .iter()
        .map(|&(f, d, _)| certify_dimension(f, &TargetState::maximally_entangled(d).unwrap()))
        .collect();
    let want: Vec<usize> = cases.iter().map(|c| c.2).collect();
    let b = schmidt_threshold(&TargetState::maximally_entangled(97).unwrap(), 54);
    let pass = got == want && (b - 0.5567).abs() <= 1e-4;
    Outcome::new(pass, format!("d_ent = {got:?}, B(97, 54) = {b:.6}"))
}

fn witness_soundness() -> Outcome {
    const STATES: usize = 1000;
    let mut details = Vec::new();
    let mut violations = 0usize;
    let mut checks = 0usize;
    for d in [3usize, 5, 7, 11] {
        let per_state: Vec<(usize, usize, f64)> = (0..STATES)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64);
                rng.set_stream(i as u64);
                let rho = random_state(d, i, &mut rng);
                let truth = brute_force_fidelity(&rho, d);
                let state = TwoQuditState::mixed(d, rho).unwrap();
                let probs = wf_probabilities(&state, d);
                let (mut bad, mut n, mut worst) = (0, 0, f64::NEG_INFINITY);
                for k in 0..d {
                    for kp in (0..d).filter(|&kp| kp != k) {
                        let bound = fidelity_lower_bound_two_wf(&probs[k], &probs[kp], k, kp, d).unwrap().value;
                        n += 1;
                        worst = worst.max(bound - truth);
                        if bound > truth + 1e-10 {
                            bad += 1;
                        }
                    }
                }
                (bad, n, worst)
            })
            .collect();
        let bad: usize = per_state.iter().map(|x| x.0).sum();
        checks += per_state.iter().map(|x| x.1).sum::<usize>();
        violations += bad;
        let worst = per_state.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max);
        details.push(format!("d={d}: max(bound - F) = {worst:.2e}"));
    }
    Outcome::new(
        violations == 0,
        format!("{violations} violations in {checks} bounds; {}", details.join(", ")),
    )
}

fn exact_fidelity_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [3usize, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(77 + d as u64);
        for i in 0..200 {
            let rho = random_state(d, i, &mut rng);
            let truth = brute_force_fidelity(&rho, d);
            let state = TwoQuditState::mixed(d, rho).unwrap();
            let std = outcome_probabilities(&state, &MeasurementSetting::standard()).unwrap();
            let exact = fidelity_exact_all_mubs(&std, &wf_probabilities(&state, d), d).unwrap().value;
            worst = worst.max((exact - truth).abs());
        }
    }
    Outcome::new(worst <= 1e-10, format!("max |F_exact - F| = {worst:.2e} over 400 states"))
}

fn direct_gen_gauss(a: i64, b: i64, c: i64) -> Complex64 {
    (0..c)
        .map(|n| Complex64::from_polar(1.0, 2.0 * PI * ((a * n * n + b * n).rem_euclid(c)) as f64 / c as f64))
        .sum()
}

fn gauss_and_coefficients() -> Outcome {
    let odd: Vec<i64> = (3..=31).step_by(2).collect();
    let gauss_err = odd
        .par_iter()
        .map(|&d| {
            let mut worst: f64 = 0.0;
            for a in (1..d).filter(|&a| gcd(a, d) == 1) {
                worst = worst.max((gauss_sum_closed(a, d).unwrap() - gauss_sum_direct(a, d).unwrap()).norm());
                for b in 0..d {
                    worst = worst.max((gen_gauss_sum(a, b, d).unwrap() - direct_gen_gauss(a, b, d)).norm());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    // The two-WF coefficient depends on k and k′ only through k′ − k, so
    // every coprime difference is covered with k = 0.
    let pairs: Vec<(usize, usize)> = odd
        .iter()
        .flat_map(|&d| (1..d).filter(move |&a| gcd(a, d) == 1).map(move |a| (d as usize, a as usize)))
        .collect();
    let coeff_err = pairs
        .par_iter()
        .map(|&(d, a)| {
            let c = DMatrix::from_fn(d, d, |j, m| wf_overlap_coeff(j, m, 0, a, d));
            let mut worst: f64 = 0.0;
            for m in 0..d {
                for n in 0..d {
                    for mp in 0..d {
                        for np in 0..d {
                            let direct: Complex64 =
                                (0..d).map(|j| c[(j, mp)].conj() * c[(j, np)] * c[(j, m)] * c[(j, n)].conj()).sum();
                            let closed = coeff_c_two_wf(m, n, mp, np, 0, a, d).unwrap();
                            worst = worst.max((closed - direct).norm());
                        }
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let mut modulus_err: f64 = 0.0;
    for d in [3usize, 5, 7] {
        for k in 0..d {
            for kp in (0..d).filter(|&kp| kp != k) {
                for m in 0..d {
                    for n in 0..d {
                        for mp in 0..d {
                            for np in 0..d {
                                let two = coeff_c_two_wf(m, n, mp, np, k, kp, d).unwrap().norm();
                                let one = coeff_c_standard(m, n, mp, np, k, d).norm();
                                modulus_err = modulus_err.max((two - one).abs());
                            }
                        }
                    }
                }
            }
        }
    }
    let pass = gauss_err <= 1e-9 && coeff_err <= 1e-9 && modulus_err <= 1e-9;
    Outcome::new(
        pass,
        format!("gauss {gauss_err:.1e}, two-WF coefficient {coeff_err:.1e}, modulus {modulus_err:.1e}"),
    )
}

fn mub_completeness() -> Outcome {
    let mut failures = Vec::new();
    let primes: Vec<usize> = (3..=31).filter(|&d| is_prime(d as u64)).collect();
    for &d in &primes {
        let mut bases = vec![(0..d).map(|m| BasisVector::standard(d, m)).collect::<Vec<_>>()];
        bases.extend((0..d).map(|k| WfBasis::new(d, k).unwrap().vectors()));
        for i in 0..bases.len() {
            for j in i + 1..bases.len() {
                if !verify_mutually_unbiased(&bases[i], &bases[j], 1e-10).unwrap() {
                    failures.push(format!("d={d} ({i},{j})"));
                }
            }
        }
    }
    let w0 = WfBasis::new(51, 0).unwrap().vectors();
    let w1 = WfBasis::new(51, 1).unwrap().vectors();
    if !verify_mutually_unbiased(&w0, &w1, 1e-10).unwrap() {
        failures.push("d=51 (wf0,wf1)".into());
    }
    Outcome::new(
        failures.is_empty(),
        format!("primes {primes:?} and d=51; failures: {failures:?}"),
    )
}

fn beam_presets() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for preset in BeamPreset::ALL {
        let (beam, elements) = preset.setup();
        let out = propagate(&beam, &elements).unwrap();
        let rel = (out.waist_um / preset.expected_waist_um() - 1.0).abs();
        pass &= rel <= 0.02;
        parts.push(format!("{} {:.1} um ({:.2}%)", preset.name(), out.waist_um, 100.0 * rel));
    }
    Outcome::new(pass, parts.join(", "))
}

fn end_to_end() -> Outcome {
    let d = 7;
    let p = JtmaParams::new(1.0 / 50.0, 1.0, f64::INFINITY).unwrap();
    let q = QuadratureSpec::new(16).unwrap();
    let layout = pack_pixels_relative_gap(d, 0.6, 0.1).unwrap();
    let optimized = optimize_radii(&layout, &p, &q, 0.01).unwrap();
    let amplitudes = amplitude_matrix(&optimized.layout, &p, &q).unwrap();
    let converged = amplitudes.converged;
    let state = pure_state_from_amplitudes(&amplitudes.values).unwrap();
    let p0 = outcome_probabilities(&state, &MeasurementSetting::wf(0)).unwrap();
    let p1 = outcome_probabilities(&state, &MeasurementSetting::wf(1)).unwrap();
    let bound = fidelity_lower_bound_two_wf(&p0, &p1, 0, 1, d).unwrap().value;
    let d_ent = certify_dimension(bound, &TargetState::maximally_entangled(d).unwrap());
    let spread = optimized.rate_spread() - 1.0;
    let pass = converged && bound >= 0.99 && d_ent == d && spread <= 0.01;
    Outcome::new(
        pass,
        format!("bound {bound:.6}, d_ent {d_ent}, rate spread {:.3}%, quadrature converged {converged}", 100.0 * spread),
    )
}

fn isotropic_eof_closed_form(d: usize, noise: f64) -> f64 {
    let df = d as f64;
    let on = (1.0 - noise) / df + noise / (df * df);
    let off = noise / (df * df);
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    let joint = df * h(on) + (df * df - df) * h(off);
    let conditional = joint - df.log2();
    df.log2() - 2.0 * conditional
}

fn eof_properties() -> Outcome {
    let d = 7;
    let ideal = TwoQuditState::maximally_entangled(d).unwrap();
    let w = |s: &TwoQuditState, k| outcome_probabilities(s, &MeasurementSetting::wf(k)).unwrap();
    let e_ideal = eof_bound(&w(&ideal, 0), &w(&ideal, 1), d).unwrap().value;
    let mixed = TwoQuditState::maximally_mixed(d).unwrap();
    let e_mixed = eof_bound(&w(&mixed, 0), &w(&mixed, 1), d).unwrap();
    let noisy = apply_isotropic_noise(&ideal, 0.1).unwrap();
    let e_noisy = eof_bound(&w(&noisy, 0), &w(&noisy, 1), d).unwrap().value;
    let fixture = isotropic_eof_closed_form(d, 0.1);
    let ideal_ok = (e_ideal - (d as f64).log2()).abs() <= 1e-12;
    let mixed_ok = e_mixed.value == 0.0 && e_mixed.raw < 0.0;
    let noisy_ok = (e_noisy - fixture).abs() <= 1e-9;
    Outcome::new(
        ideal_ok && mixed_ok && noisy_ok,
        format!(
            "ideal {e_ideal:.12}, mixed {} (raw {:.4}), isotropic p=0.1 {e_noisy:.10} vs {fixture:.10}",
            e_mixed.value, e_mixed.raw
        ),
    )
}

fn bootstrap_sanity() -> Outcome {
    let d = 5;
    let state = apply_isotropic_noise(&TwoQuditState::maximally_entangled(d).unwrap(), 0.2).unwrap();
    let settings = [MeasurementSetting::wf(0), MeasurementSetting::wf(1)];
    let counts = |total: u64| -> Vec<CountMatrix> {
        settings
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let probs = outcome_probabilities(&state, s).unwrap();
                simulate_counts(&probs, *s, total, 40 + i as u64).unwrap()
            })
            .collect()
    };
    let estimator = |c: &[CountMatrix]| {
        let p0 = counts_to_probs(&c[0])?;
        let p1 = counts_to_probs(&c[1])?;
        fidelity_lower_bound_two_wf(&p0, &p1, 0, 1, d).map(|f| f.value)
    };
    let n = 20_000;
    let small = poisson_bootstrap(&counts(n), estimator, 1000, 3).unwrap();
    let large = poisson_bootstrap(&counts(100 * n), estimator, 1000, 3).unwrap();
    let ratio = small.std / large.std;
    let scaling_ok = (ratio / 10.0 - 1.0).abs() <= 0.15;
    let again = poisson_bootstrap(&counts(n), estimator, 1000, 3).unwrap();
    let deterministic = again.mean.to_bits() == small.mean.to_bits() && again.std.to_bits() == small.std.to_bits();
    Outcome::new(
        scaling_ok && deterministic,
        format!(
            "std {:.3e} at N={n}, {:.3e} at 100N, ratio {ratio:.3} (ideal 10), bitwise repeat {deterministic}",
            small.std, large.std
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("certification arithmetic, first table", table_one, Duration::from_secs(1)),
        ("certification arithmetic, second table", table_two, Duration::from_secs(1)),
        ("two-WF witness soundness", witness_soundness, Duration::from_secs(300)),
        ("exact all-MUB fidelity identity", exact_fidelity_identity, Duration::from_secs(60)),
        ("Gauss sums and coefficient identities", gauss_and_coefficients, Duration::from_secs(60)),
        ("MUB completeness", mub_completeness, Duration::from_secs(60)),
        ("beam presets", beam_presets, Duration::from_secs(1)),
        ("end-to-end d = 7", end_to_end, Duration::from_secs(600)),
        ("EoF properties", eof_properties, Duration::from_secs(1)),
        ("bootstrap sanity", bootstrap_sanity, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.2?} of {:?}) {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            elapsed,
            budget,
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
