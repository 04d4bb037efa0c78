//! Fidelity witnesses for the maximally entangled state, Schmidt-number
//! thresholds and an entropic bound on the entanglement of formation, all
//! evaluated from outcome probabilities in mutually unbiased bases.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::{check_wf_pair, BasisLabel};
use crate::numtheory::is_prime;
use crate::state::{counts_to_probs, CountMatrix};
use crate::stats::{poisson_bootstrap, BootstrapResult};

const NORM_TOL: f64 = 1e-9;

/// Margin applied to the strict comparison `F > B_r`.
pub const THRESHOLD_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub value: f64,
    pub kind: FidelityKind,
    pub bases_used: Vec<BasisLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn check_probs(p: &DMatrix<f64>, d: usize) -> Result<()> {
    if p.nrows() != d || p.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.nrows().max(p.ncols()),
        });
    }
    if let Some(&x) = p.iter().find(|&&x| !(x >= -NORM_TOL)) {
        return Err(Error::NegativeProbability(x));
    }
    let total = p.sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized(total));
    }
    Ok(())
}

/// `(1/d)·Σ_m P[m][m]`.
pub fn f1(probs: &DMatrix<f64>) -> f64 {
    probs.trace() / probs.nrows() as f64
}

/// `Σ γ̃·√(P[m′][n′]·P[m][n])` over `m ≠ m′, m ≠ n, n ≠ n′, n′ ≠ m′`.
/// Only `n′ = n + m′ − m (mod d)` has nonzero `γ̃ = 1/d`, and for those the
/// last two constraints repeat the first two.
pub fn cross_term(probs: &DMatrix<f64>) -> f64 {
    let d = probs.nrows();
    let sqrt = probs.map(|x| x.max(0.0).sqrt());
    let per_m: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|m| {
            let mut acc = 0.0;
            for n in (0..d).filter(|&n| n != m) {
                let s_mn = sqrt[(m, n)];
                if s_mn == 0.0 {
                    continue;
                }
                for mp in (0..d).filter(|&mp| mp != m) {
                    let np = (n + mp + d - m) % d;
                    acc += sqrt[(mp, np)] * s_mn;
                }
            }
            acc
        })
        .collect();
    per_m.iter().sum::<f64>() / d as f64
}

/// Lower bound built from the diagonal and cross terms of `first` and the
/// diagonal of `second`.
fn witness_value(first: &DMatrix<f64>, second: &DMatrix<f64>) -> f64 {
    let d = first.nrows() as f64;
    f1(first) + second.trace() - 1.0 / d - cross_term(first)
}

/// Fidelity lower bound from two Wootters–Fields bases `k` (diagonal and
/// cross terms) and `k′` (diagonal only).
pub fn fidelity_lower_bound_two_wf(
    probs_k: &DMatrix<f64>,
    probs_k_prime: &DMatrix<f64>,
    k: usize,
    k_prime: usize,
    d: usize,
) -> Result<FidelityResult> {
    let composite = check_wf_pair(k, k_prime, d)?;
    check_probs(probs_k, d)?;
    check_probs(probs_k_prime, d)?;
    let mut warnings = Vec::new();
    if composite {
        warnings.push(format!("dimension {d} is not prime; only this pair of bases is unbiased"));
    }
    Ok(FidelityResult {
        value: witness_value(probs_k, probs_k_prime),
        kind: FidelityKind::LowerBound,
        bases_used: vec![BasisLabel::Wf(k), BasisLabel::Wf(k_prime)],
        warnings,
    })
}

/// Fidelity lower bound from the standard basis and WF basis `k`; the larger
/// of the two orientations (either basis supplying the cross terms).
pub fn fidelity_lower_bound_standard_wf(
    probs_std: &DMatrix<f64>,
    probs_k: &DMatrix<f64>,
    k: usize,
    d: usize,
) -> Result<FidelityResult> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidBasisPair {
            k,
            k_prime: k,
            d,
            reason: "dimension must be odd and at least 3",
        });
    }
    if k >= d {
        return Err(Error::IndexOutOfRange { index: k, d });
    }
    check_probs(probs_std, d)?;
    check_probs(probs_k, d)?;
    let value = witness_value(probs_std, probs_k).max(witness_value(probs_k, probs_std));
    Ok(FidelityResult {
        value,
        kind: FidelityKind::LowerBound,
        bases_used: vec![BasisLabel::Standard, BasisLabel::Wf(k)],
        warnings: Vec::new(),
    })
}

/// Exact fidelity from the standard basis and all `d` WF bases (`probs_wf[k]`
/// for `k = 0..d`); the cross terms cancel in the sum over `k`.
pub fn fidelity_exact_all_mubs(
    probs_std: &DMatrix<f64>,
    probs_wf: &[DMatrix<f64>],
    d: usize,
) -> Result<FidelityResult> {
    if !is_prime(d as u64) || d == 2 {
        return Err(Error::NotPrime(d));
    }
    if probs_wf.len() != d {
        return Err(Error::IncompleteBases(format!(
            "need all {d} WF bases, got {}",
            probs_wf.len()
        )));
    }
    check_probs(probs_std, d)?;
    for p in probs_wf {
        check_probs(p, d)?;
    }
    let diagonal: f64 = probs_wf.iter().map(|p| p.trace()).sum();
    let mut bases_used = vec![BasisLabel::Standard];
    bases_used.extend((0..d).map(BasisLabel::Wf));
    Ok(FidelityResult {
        value: f1(probs_std) + (diagonal - 1.0) / d as f64,
        kind: FidelityKind::Exact,
        bases_used,
        warnings: Vec::new(),
    })
}

/// Target `Σ_n λ_n |nn⟩` with Schmidt coefficients kept in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    schmidt: Vec<f64>,
}

impl TargetState {
    pub fn new(mut schmidt: Vec<f64>) -> Result<Self> {
        if schmidt.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&x) = schmidt.iter().find(|&&x| !(x >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative Schmidt coefficient {x}")));
        }
        let norm: f64 = schmidt.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm));
        }
        schmidt.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(TargetState { schmidt })
    }

    pub fn maximally_entangled(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(TargetState {
            schmidt: vec![1.0 / (d as f64).sqrt(); d],
        })
    }

    pub fn d(&self) -> usize {
        self.schmidt.len()
    }

    pub fn schmidt_coefficients(&self) -> &[f64] {
        &self.schmidt
    }
}

/// `B_r`: sum of the `r` largest squared Schmidt coefficients.
pub fn schmidt_threshold(target: &TargetState, r: usize) -> f64 {
    target.schmidt.iter().take(r).map(|x| x * x).sum()
}

/// Largest `r + 1` with `F > B_r`, within `[1, d]`.
pub fn certify_dimension(fidelity: f64, target: &TargetState) -> usize {
    let d = target.d();
    (0..d)
        .rev()
        .find(|&r| fidelity > schmidt_threshold(target, r) + THRESHOLD_MARGIN)
        .map_or(1, |r| r + 1)
        .clamp(1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EofBound {
    /// `max(0, raw)` in ebits.
    pub value: f64,
    pub raw: f64,
}

fn shannon(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// `H(joint) − H(row marginal)`, where the row marginal sums over the second
/// index.
pub fn conditional_entropy(probs: &DMatrix<f64>) -> f64 {
    let marginal = (0..probs.nrows()).map(|j| probs.row(j).sum());
    shannon(probs.iter().copied()) - shannon(marginal)
}

fn eof_from(h1: f64, h2: f64, d: usize) -> EofBound {
    let raw = (d as f64).log2() - h1 - h2;
    EofBound { value: raw.max(0.0), raw }
}

/// `log₂d − H(1) − H(2)` with conditional entropies conditioned on the
/// first index of each probability matrix.
pub fn eof_bound(probs_1: &DMatrix<f64>, probs_2: &DMatrix<f64>, d: usize) -> Result<EofBound> {
    check_probs(probs_1, d)?;
    check_probs(probs_2, d)?;
    Ok(eof_from(conditional_entropy(probs_1), conditional_entropy(probs_2), d))
}

/// Same bound with the roles of the two arms exchanged.
pub fn eof_bound_transposed(probs_1: &DMatrix<f64>, probs_2: &DMatrix<f64>, d: usize) -> Result<EofBound> {
    check_probs(probs_1, d)?;
    check_probs(probs_2, d)?;
    Ok(eof_from(
        conditional_entropy(&probs_1.transpose()),
        conditional_entropy(&probs_2.transpose()),
        d,
    ))
}

/// Which witness a set of measurement settings supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum WitnessPlan {
    /// Standard basis plus every WF basis; indices into the count list.
    AllMubs { standard: usize, wf: Vec<usize> },
    TwoWf { k: usize, k_prime: usize, first: usize, second: usize },
    StandardWf { k: usize, standard: usize, wf: usize },
}

impl WitnessPlan {
    /// Picks the strongest witness the data allows: exact fidelity when all
    /// `d + 1` bases are present (prime `d`), otherwise the first valid pair
    /// of WF bases, otherwise the standard basis with one WF basis.
    pub fn choose(counts: &[CountMatrix]) -> Result<Self> {
        let d = common_dimension(counts)?;
        let mut standard = None;
        let mut wf: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, c) in counts.iter().enumerate() {
            if c.setting.is_matched_standard() {
                if standard.replace(i).is_some() {
                    return Err(Error::InvalidParameter("standard basis listed twice".into()));
                }
            } else if let Some(k) = c.setting.matched_wf() {
                if k >= d {
                    return Err(Error::IndexOutOfRange { index: k, d });
                }
                if wf.insert(k, i).is_some() {
                    return Err(Error::InvalidParameter(format!("WF basis {k} listed twice")));
                }
            }
        }
        if let Some(s) = standard {
            if d > 2 && is_prime(d as u64) && wf.len() == d {
                return Ok(WitnessPlan::AllMubs {
                    standard: s,
                    wf: wf.values().copied().collect(),
                });
            }
        }
        let ks: Vec<usize> = wf.keys().copied().collect();
        for (a, &k) in ks.iter().enumerate() {
            for &kp in &ks[a + 1..] {
                if check_wf_pair(k, kp, d).is_ok() {
                    return Ok(WitnessPlan::TwoWf {
                        k,
                        k_prime: kp,
                        first: wf[&k],
                        second: wf[&kp],
                    });
                }
            }
        }
        if let (Some(s), Some((&k, &i))) = (standard, wf.iter().next()) {
            if d >= 3 && d % 2 == 1 {
                return Ok(WitnessPlan::StandardWf { k, standard: s, wf: i });
            }
        }
        Err(Error::IncompleteBases(
            "need at least two mutually unbiased settings (matched bases, conjugated on arm B)".into(),
        ))
    }

    /// Fidelity and EoF bound from probability matrices aligned with the
    /// count list the plan was chosen for.
    pub fn evaluate(&self, probs: &[DMatrix<f64>]) -> Result<(FidelityResult, EofBound)> {
        let d = probs.first().map(|p| p.nrows()).ok_or(Error::EmptyCounts)?;
        match self {
            WitnessPlan::AllMubs { standard, wf } => {
                let wf_probs: Vec<DMatrix<f64>> = wf.iter().map(|&i| probs[i].clone()).collect();
                let fid = fidelity_exact_all_mubs(&probs[*standard], &wf_probs, d)?;
                let eof = eof_bound(&probs[*standard], &wf_probs[0], d)?;
                Ok((fid, eof))
            }
            &WitnessPlan::TwoWf { k, k_prime, first, second } => {
                let a = fidelity_lower_bound_two_wf(&probs[first], &probs[second], k, k_prime, d)?;
                let b = fidelity_lower_bound_two_wf(&probs[second], &probs[first], k_prime, k, d)?;
                let fid = if b.value > a.value { b } else { a };
                Ok((fid, eof_bound(&probs[first], &probs[second], d)?))
            }
            &WitnessPlan::StandardWf { k, standard, wf } => Ok((
                fidelity_lower_bound_standard_wf(&probs[standard], &probs[wf], k, d)?,
                eof_bound(&probs[standard], &probs[wf], d)?,
            )),
        }
    }

    pub fn evaluate_counts(&self, counts: &[CountMatrix]) -> Result<(FidelityResult, EofBound)> {
        let probs = counts.iter().map(counts_to_probs).collect::<Result<Vec<_>>>()?;
        self.evaluate(&probs)
    }
}

fn common_dimension(counts: &[CountMatrix]) -> Result<usize> {
    let d = counts.first().ok_or_else(|| Error::IncompleteBases("no count matrices".into()))?.d();
    if let Some(c) = counts.iter().find(|c| c.d() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: c.d(),
        });
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainties {
    pub fidelity: BootstrapResult,
    pub eof: BootstrapResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub d: usize,
    pub plan: WitnessPlan,
    pub fidelity: FidelityResult,
    pub d_ent: usize,
    /// `d_ent` at fidelity minus and plus one standard deviation.
    pub d_ent_interval: Option<(usize, usize)>,
    pub eof_bound: EofBound,
    pub uncertainties: Option<Uncertainties>,
}

/// Runs the chosen witness on the counts, certifies the Schmidt number
/// against the maximally entangled target, and attaches Poisson bootstrap
/// uncertainties when `resamples ≥ 2`.
pub fn certify_counts(counts: &[CountMatrix], resamples: usize, seed: u64) -> Result<CertificationReport> {
    let plan = WitnessPlan::choose(counts)?;
    let d = counts[0].d();
    let (fidelity, eof_bound) = plan.evaluate_counts(counts)?;
    let target = TargetState::maximally_entangled(d)?;
    let d_ent = certify_dimension(fidelity.value, &target);
    let uncertainties = if resamples >= 2 {
        let fid = poisson_bootstrap(counts, |c| plan.evaluate_counts(c).map(|r| r.0.value), resamples, seed)?;
        let eof = poisson_bootstrap(counts, |c| plan.evaluate_counts(c).map(|r| r.1.value), resamples, seed)?;
        Some(Uncertainties { fidelity: fid, eof })
    } else {
        None
    };
    let d_ent_interval = uncertainties.map(|u| {
        (
            certify_dimension(fidelity.value - u.fidelity.std, &target),
            certify_dimension(fidelity.value + u.fidelity.std, &target),
        )
    });
    Ok(CertificationReport {
        d,
        plan,
        fidelity,
        d_ent,
        d_ent_interval,
        eof_bound,
        uncertainties,
    })
}

impl CertificationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.fidelity.kind {
            FidelityKind::Exact => "exact fidelity",
            FidelityKind::LowerBound => "fidelity lower bound",
        };
        let bases: Vec<String> = self.fidelity.bases_used.iter().map(|b| b.to_string()).collect();
        out.push_str(&format!("dimension            {}\n", self.d));
        out.push_str(&format!("bases                {}\n", bases.join(", ")));
        match &self.uncertainties {
            Some(u) => {
                out.push_str(&format!("{kind:<20} {:.4} +/- {:.4}\n", self.fidelity.value, u.fidelity.std));
                out.push_str(&format!(
                    "EoF bound (ebits)    {:.4} +/- {:.4}  (raw {:.4}, max {:.4})\n",
                    self.eof_bound.value,
                    u.eof.std,
                    self.eof_bound.raw,
                    (self.d as f64).log2()
                ));
            }
            None => {
                out.push_str(&format!("{kind:<20} {:.4}\n", self.fidelity.value));
                out.push_str(&format!(
                    "EoF bound (ebits)    {:.4}  (raw {:.4}, max {:.4})\n",
                    self.eof_bound.value,
                    self.eof_bound.raw,
                    (self.d as f64).log2()
                ));
            }
        }
        out.push_str(&format!("certified d_ent      {}", self.d_ent));
        if let Some((lo, hi)) = self.d_ent_interval {
            out.push_str(&format!("  (range {lo}..{hi} within one sigma)"));
        }
        out.push('\n');
        for w in &self.fidelity.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}
