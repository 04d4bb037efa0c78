//! Wootters–Fields bases and the coefficients that govern the witness cross
//! terms.
//!
//! A WF basis vector is `|j̃_k⟩ = d^{-1/2} Σ_m ω^{jm + km²} |m⟩` with
//! `ω = exp(2πi/d)`. For odd prime `d` the `d` WF bases together with the
//! standard basis form a complete set of mutually unbiased bases.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{gcd, is_prime, psi, UnitComplex};

/// `ω^exponent` for `ω = exp(2πi/d)`.
fn omega(exponent: i64, d: usize) -> Complex64 {
    UnitComplex::root_of_unity(exponent, d as u64).value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WfBasis {
    d: usize,
    k: usize,
}

impl WfBasis {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if k >= d {
            return Err(Error::IndexOutOfRange { index: k, d });
        }
        Ok(WfBasis { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The `j`-th vector of this basis.
    pub fn vector(&self, j: usize) -> Result<BasisVector> {
        wf_vector(*self, j)
    }

    pub fn vectors(&self) -> Vec<BasisVector> {
        (0..self.d)
            .map(|j| wf_vector(*self, j).expect("j < d"))
            .collect()
    }

    /// The basis as a unitary matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.d;
        let norm = 1.0 / (d as f64).sqrt();
        DMatrix::from_fn(d, d, |m, j| {
            let (m, j, k) = (m as i64, j as i64, self.k as i64);
            let e = (j * m + k * ((m * m) % d as i64)) % d as i64;
            omega(e, d) * norm
        })
    }
}

/// A normalised state vector of a single qudit in the standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector(Vec<Complex64>);

impl BasisVector {
    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise complex conjugate (w.r.t. the standard basis).
    pub fn conj(&self) -> BasisVector {
        BasisVector(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn standard(d: usize, m: usize) -> BasisVector {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[m] = Complex64::new(1.0, 0.0);
        BasisVector(v)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &BasisVector) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl From<Vec<Complex64>> for BasisVector {
    fn from(v: Vec<Complex64>) -> Self {
        BasisVector(v)
    }
}

pub fn wf_vector(basis: WfBasis, j: usize) -> Result<BasisVector> {
    let d = basis.d;
    if j >= d {
        return Err(Error::IndexOutOfRange { index: j, d });
    }
    let norm = 1.0 / (d as f64).sqrt();
    let (j, k, di) = (j as i64, basis.k as i64, d as i64);
    Ok(BasisVector(
        (0..di)
            .map(|m| omega((j * m + k * ((m * m) % di)) % di, d) * norm)
            .collect(),
    ))
}

/// Basis label for one measurement arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    Standard,
    Wf(usize),
}

impl BasisLabel {
    /// Basis vectors as columns of a unitary matrix.
    pub fn matrix(&self, d: usize) -> Result<DMatrix<Complex64>> {
        match *self {
            BasisLabel::Standard => Ok(DMatrix::identity(d, d)),
            BasisLabel::Wf(k) => Ok(WfBasis::new(d, k)?.matrix()),
        }
    }

    pub fn vectors(&self, d: usize) -> Result<Vec<BasisVector>> {
        match *self {
            BasisLabel::Standard => Ok((0..d).map(|m| BasisVector::standard(d, m)).collect()),
            BasisLabel::Wf(k) => Ok(WfBasis::new(d, k)?.vectors()),
        }
    }

    pub fn wf_index(&self) -> Option<usize> {
        match *self {
            BasisLabel::Wf(k) => Some(k),
            BasisLabel::Standard => None,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Standard => write!(f, "standard"),
            BasisLabel::Wf(k) => write!(f, "wf:k={k}"),
        }
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    /// Accepts `standard`, `wf:k=3` and the short form `wf:3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("standard") || s.eq_ignore_ascii_case("std") {
            return Ok(BasisLabel::Standard);
        }
        let rest = s
            .strip_prefix("wf:")
            .ok_or_else(|| Error::Parse(format!("unknown basis label {s:?}")))?;
        let rest = rest.strip_prefix("k=").unwrap_or(rest);
        rest.parse::<usize>()
            .map(BasisLabel::Wf)
            .map_err(|_| Error::Parse(format!("bad WF index in {s:?}")))
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `γ̃_{mnm′n′}`: `1/d` when `m − m′ − n + n′ ≡ 0 (mod d)`, else 0.
pub fn gamma_tilde(m: usize, n: usize, m_p: usize, n_p: usize, d: usize) -> f64 {
    let s = m as i64 - m_p as i64 - n as i64 + n_p as i64;
    if s.rem_euclid(d as i64) == 0 {
        1.0 / d as f64
    } else {
        0.0
    }
}

/// `c_{mnm′n′} = Σ_j ω^{j(m−m′−n+n′) + k(m²−m′²−n²+n′²)}` by direct summation.
pub fn coeff_c_standard(m: usize, n: usize, m_p: usize, n_p: usize, k: usize, d: usize) -> Complex64 {
    let di = d as i64;
    let (m, n, m_p, n_p, k) = (m as i64, n as i64, m_p as i64, n_p as i64, k as i64);
    let lin = (m - m_p - n + n_p).rem_euclid(di);
    let quad = (m * m - m_p * m_p - n * n + n_p * n_p).rem_euclid(di);
    (0..di)
        .map(|j| omega((j * lin + k * quad) % di, d))
        .sum()
}

/// Checks that `(k, k′)` are usable as a pair of WF bases in dimension `d`:
/// `d` odd, `k ≠ k′`, and `gcd(k′ − k, d) = 1`. Returns `true` when `d` is
/// not prime, where the pair is still mutually unbiased but the full WF set
/// is not.
pub fn check_wf_pair(k: usize, k_prime: usize, d: usize) -> Result<bool> {
    let invalid = |reason| Error::InvalidBasisPair {
        k,
        k_prime,
        d,
        reason,
    };
    if d < 3 || d.is_multiple_of(2) {
        return Err(invalid("dimension must be odd and at least 3"));
    }
    if k >= d || k_prime >= d {
        return Err(invalid("basis index out of range"));
    }
    if k == k_prime {
        return Err(invalid("bases must differ"));
    }
    let a = (k_prime as i64 - k as i64).rem_euclid(d as i64);
    if gcd(a, d as i64) != 1 {
        return Err(invalid("k' - k must be coprime to d"));
    }
    Ok(!is_prime(d as u64))
}

/// Cross-term coefficient between two WF bases in closed form:
/// `ω^{ψ(k′−k)(m′²−m²−n′²+n²)} Σ_j ω^{2ψ(k′−k)·j(m−m′−n+n′)}`, where the
/// sum is `d` when `m − m′ − n + n′ ≡ 0` and vanishes otherwise.
pub fn coeff_c_two_wf(
    m: usize,
    n: usize,
    m_p: usize,
    n_p: usize,
    k: usize,
    k_prime: usize,
    d: usize,
) -> Result<Complex64> {
    check_wf_pair(k, k_prime, d)?;
    let di = d as i64;
    let a = (k_prime as i64 - k as i64).rem_euclid(di);
    let p = psi(a, di)?;
    let (m, n, m_p, n_p) = (m as i64, n as i64, m_p as i64, n_p as i64);
    let quad = (m_p * m_p - m * m - n_p * n_p + n * n).rem_euclid(di);
    let lin = (m - m_p - n + n_p).rem_euclid(di);
    if lin != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(omega(p * quad % di, d) * d as f64)
}

/// `c_{mn} = d^{-1/2} Σ_p ω^{p(m−n) + p²(k′−k)}`, the scaled overlap between
/// conjugated vectors of WF bases `k` and `k′`, by direct summation.
pub fn wf_overlap_coeff(m: usize, n: usize, k: usize, k_prime: usize, d: usize) -> Complex64 {
    let di = d as i64;
    let lin = (m as i64 - n as i64).rem_euclid(di);
    let a = (k_prime as i64 - k as i64).rem_euclid(di);
    let sum: Complex64 = (0..di).map(|p| omega((p * lin + a * ((p * p) % di)) % di, d)).sum();
    sum / (d as f64).sqrt()
}

/// Two-WF cross-term coefficient as the four-factor sum
/// `Σ_j c*_{jm′} c_{jn′} c_{jm} c*_{jn}` over [`wf_overlap_coeff`].
pub fn coeff_c_two_wf_direct(
    m: usize,
    n: usize,
    m_p: usize,
    n_p: usize,
    k: usize,
    k_prime: usize,
    d: usize,
) -> Complex64 {
    let c = |a, b| wf_overlap_coeff(a, b, k, k_prime, d);
    (0..d)
        .map(|j| c(j, m_p).conj() * c(j, n_p) * c(j, m) * c(j, n).conj())
        .sum()
}

/// True iff both bases are orthonormal and every cross overlap has modulus
/// `1/√d` within `tol`.
pub fn verify_mutually_unbiased(a: &[BasisVector], b: &[BasisVector], tol: f64) -> Result<bool> {
    let d = a.len();
    if b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.len(),
        });
    }
    if let Some(v) = a.iter().chain(b).find(|v| v.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.dim(),
        });
    }
    let orthonormal = |basis: &[BasisVector]| {
        basis.iter().enumerate().all(|(i, u)| {
            basis.iter().enumerate().all(|(j, v)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (u.inner(v) - Complex64::new(target, 0.0)).norm() <= tol
            })
        })
    };
    if !orthonormal(a) || !orthonormal(b) {
        return Ok(false);
    }
    let target = 1.0 / (d as f64).sqrt();
    Ok(a
        .iter()
        .all(|u| b.iter().all(|v| (u.inner(v).norm() - target).abs() <= tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::UnitComplex;

    #[test]
    fn wf_vector_examples() {
        for d in [2, 3, 5, 8] {
            let v = wf_vector(WfBasis::new(d, 0).unwrap(), 0).unwrap();
            for c in v.components() {
                assert!((c - Complex64::new(1.0 / (d as f64).sqrt(), 0.0)).norm() < 1e-14);
            }
        }
        let v = wf_vector(WfBasis::new(3, 1).unwrap(), 1).unwrap();
        let w2 = UnitComplex::root_of_unity(2, 3).value();
        let s = 1.0 / 3f64.sqrt();
        let expected = [Complex64::new(s, 0.0), w2 * s, Complex64::new(s, 0.0)];
        for (a, b) in v.components().iter().zip(expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn wf_vector_normalized_and_out_of_range() {
        let b = WfBasis::new(97, 13).unwrap();
        for j in [0, 50, 96] {
            let v = b.vector(j).unwrap();
            let n: f64 = v.components().iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!(matches!(b.vector(97), Err(Error::IndexOutOfRange { .. })));
        assert!(WfBasis::new(5, 5).is_err());
        assert!(WfBasis::new(1, 0).is_err());
    }

    #[test]
    fn overlaps_between_k0_and_k1_in_d5() {
        let b0 = WfBasis::new(5, 0).unwrap();
        let b1 = WfBasis::new(5, 1).unwrap();
        for j in 0..5 {
            for jp in 0..5 {
                let ov = b0.vector(j).unwrap().inner(&b1.vector(jp).unwrap());
                assert!((ov.norm() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_tilde_examples() {
        assert_eq!(gamma_tilde(1, 2, 3, 4, 7), 1.0 / 7.0);
        assert_eq!(gamma_tilde(1, 2, 3, 5, 7), 0.0);
        assert_eq!(gamma_tilde(0, 1, 1, 2, 5), 1.0 / 5.0);
    }

    #[test]
    fn coeff_c_standard_examples() {
        assert!((coeff_c_standard(1, 2, 3, 4, 0, 7) - Complex64::new(7.0, 0.0)).norm() < 1e-12);
        assert!(coeff_c_standard(1, 2, 3, 5, 0, 7).norm() < 1e-12);
        for d in [3usize, 5, 7] {
            for k in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        for mp in 0..d {
                            for np in 0..d {
                                let c = coeff_c_standard(m, n, mp, np, k, d);
                                let g = gamma_tilde(m, n, mp, np, d);
                                let expected = d as f64 * d as f64 * g;
                                assert!((c.norm() - expected).abs() < 1e-9);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coeff_c_two_wf_example() {
        // ψ(1, 7) = 2, so the prefactor exponent is 2·(9 − 1 − 16 + 4) = −8.
        let c = coeff_c_two_wf(1, 2, 3, 4, 0, 1, 7).unwrap();
        let expected = UnitComplex::root_of_unity(-8, 7).value() * 7.0;
        assert!((c - expected).norm() < 1e-12);
        assert!(coeff_c_two_wf(0, 1, 0, 1, 0, 0, 7).is_err());
        assert!(coeff_c_two_wf(0, 1, 0, 1, 0, 3, 9).is_err());
        // m − m′ − n + n′ = 1 → vanishing sum
        assert!(coeff_c_two_wf(1, 0, 0, 0, 0, 1, 5).unwrap().norm() < 1e-12);
    }

    #[test]
    fn pair_check_flags_non_prime() {
        assert!(!check_wf_pair(0, 1, 7).unwrap());
        assert!(check_wf_pair(0, 1, 51).unwrap());
        assert!(check_wf_pair(0, 3, 51).is_err());
        assert!(check_wf_pair(0, 1, 6).is_err());
    }

    #[test]
    fn unbiasedness_examples() {
        let d = 5;
        let b0 = WfBasis::new(d, 0).unwrap().vectors();
        let b1 = WfBasis::new(d, 1).unwrap().vectors();
        assert!(verify_mutually_unbiased(&b0, &b1, 1e-10).unwrap());
        assert!(!verify_mutually_unbiased(&b0, &b0, 1e-10).unwrap());
        let std7 = BasisLabel::Standard.vectors(7).unwrap();
        let wf7 = BasisLabel::Wf(0).vectors(7).unwrap();
        assert!(verify_mutually_unbiased(&std7, &wf7, 1e-10).unwrap());
        assert!(verify_mutually_unbiased(&std7, &b0, 1e-10).is_err());
    }

    #[test]
    fn basis_label_round_trip() {
        for s in ["standard", "wf:k=0", "wf:k=17"] {
            let l: BasisLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("wf:3".parse::<BasisLabel>().unwrap(), BasisLabel::Wf(3));
        assert!("wf:x".parse::<BasisLabel>().is_err());
        assert!("fourier".parse::<BasisLabel>().is_err());
    }

    #[test]
    fn two_wf_closed_form_matches_product_sum() {
        for d in [3usize, 5] {
            for (k, kp) in [(0, 1), (1, 3), (2, 0)] {
                if kp >= d {
                    continue;
                }
                for idx in 0..d.pow(4) {
                    let (m, n, mp, np) = (idx % d, idx / d % d, idx / d / d % d, idx / d / d / d);
                    let closed = coeff_c_two_wf(m, n, mp, np, k, kp, d).unwrap();
                    let direct = coeff_c_two_wf_direct(m, n, mp, np, k, kp, d);
                    assert!((closed - direct).norm() < 1e-9);
                    assert!((closed.norm() - coeff_c_standard(m, n, mp, np, k, d).norm()).abs() < 1e-9);
                }
            }
        }
    }
}
