//! Two-qudit states, their outcome statistics in pairs of local bases, and
//! coincidence-count matrices.

use std::fmt;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::BasisLabel;

/// Largest dimension for which a dense density matrix is stored.
pub const MAX_MIXED_DIM: usize = 31;

const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Coefficients `c[m·d + n]` of `|m⟩|n⟩`.
    Pure(DVector<Complex64>),
    /// Dense `d²×d²` density matrix.
    Mixed(DMatrix<Complex64>),
    /// `(1−noise)·|ψ⟩⟨ψ| + noise·I/d²`.
    Isotropic { pure: DVector<Complex64>, noise: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQuditState {
    d: usize,
    repr: Representation,
}

fn check_normalized(v: &DVector<Complex64>) -> Result<()> {
    let n = v.norm_squared();
    if (n - 1.0).abs() > STATE_TOL {
        return Err(Error::Unnormalized(n));
    }
    Ok(())
}

impl TwoQuditState {
    pub fn pure(d: usize, coefficients: DVector<Complex64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        if coefficients.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: coefficients.len(),
            });
        }
        check_normalized(&coefficients)?;
        Ok(TwoQuditState {
            d,
            repr: Representation::Pure(coefficients),
        })
    }

    pub fn mixed(d: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        if d == 0 || d > MAX_MIXED_DIM {
            return Err(Error::InvalidDimension(d));
        }
        if rho.nrows() != d * d || rho.ncols() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: rho.nrows(),
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Unnormalized(tr.re));
        }
        if (&rho - rho.adjoint()).camax() > STATE_TOL {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        Ok(TwoQuditState {
            d,
            repr: Representation::Mixed(rho),
        })
    }

    /// `(1/√d) Σ_m |m⟩|m⟩`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        let a = 1.0 / (d as f64).sqrt();
        let v = DVector::from_fn(d * d, |idx, _| {
            if idx / d == idx % d {
                Complex64::new(a, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::pure(d, v)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        apply_isotropic_noise(&Self::maximally_entangled(d)?, 1.0)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        let dd = self.d * self.d;
        let projector = |v: &DVector<Complex64>| v * v.adjoint();
        match &self.repr {
            Representation::Mixed(rho) => Ok(rho.clone()),
            _ if self.d > MAX_MIXED_DIM => Err(Error::InvalidDimension(self.d)),
            Representation::Pure(v) => Ok(projector(v)),
            Representation::Isotropic { pure, noise } => {
                let id = DMatrix::<Complex64>::identity(dd, dd) * Complex64::new(noise / dd as f64, 0.0);
                Ok(projector(pure) * Complex64::new(1.0 - noise, 0.0) + id)
            }
        }
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized two-qudit vector.
    pub fn overlap(&self, psi: &DVector<Complex64>) -> Result<f64> {
        let dd = self.d * self.d;
        if psi.len() != dd {
            return Err(Error::DimensionMismatch {
                expected: dd,
                got: psi.len(),
            });
        }
        Ok(match &self.repr {
            Representation::Pure(v) => psi.dotc(v).norm_sqr(),
            Representation::Isotropic { pure, noise } => {
                (1.0 - noise) * psi.dotc(pure).norm_sqr() + noise * psi.norm_squared() / dd as f64
            }
            Representation::Mixed(rho) => psi.dotc(&(rho * psi)).re,
        })
    }
}

/// Normalizes a pixel amplitude matrix into pure-state coefficients
/// `c[m·d+n] = A[m][n] / ‖A‖_F`.
pub fn pure_state_from_amplitudes(a: &DMatrix<Complex64>) -> Result<TwoQuditState> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.ncols(),
        });
    }
    let norm = a.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("amplitude matrix is zero".into()));
    }
    let v = DVector::from_fn(d * d, |idx, _| a[(idx / d, idx % d)] / norm);
    TwoQuditState::pure(d, v)
}

/// `(1−p)·ρ + p·I/d²`.
pub fn apply_isotropic_noise(s: &TwoQuditState, p: f64) -> Result<TwoQuditState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("noise level {p} outside [0, 1]")));
    }
    let d = s.d;
    let repr = match &s.repr {
        Representation::Pure(v) => Representation::Isotropic {
            pure: v.clone(),
            noise: p,
        },
        Representation::Isotropic { pure, noise } => Representation::Isotropic {
            pure: pure.clone(),
            noise: 1.0 - (1.0 - p) * (1.0 - noise),
        },
        Representation::Mixed(rho) => {
            let dd = d * d;
            let id = DMatrix::<Complex64>::identity(dd, dd) * Complex64::new(p / dd as f64, 0.0);
            Representation::Mixed(rho * Complex64::new(1.0 - p, 0.0) + id)
        }
    };
    Ok(TwoQuditState { d, repr })
}

/// Local bases measured on the two arms. When `conjugate_b` is set the
/// second arm projects onto the complex conjugates of its basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub basis_a: BasisLabel,
    pub basis_b: BasisLabel,
    pub conjugate_b: bool,
}

impl MeasurementSetting {
    pub fn new(basis_a: BasisLabel, basis_b: BasisLabel, conjugate_b: bool) -> Self {
        MeasurementSetting {
            basis_a,
            basis_b,
            conjugate_b,
        }
    }

    pub fn standard() -> Self {
        Self::new(BasisLabel::Standard, BasisLabel::Standard, false)
    }

    /// The same Wootters–Fields basis on both arms, conjugated on arm B.
    pub fn wf(k: usize) -> Self {
        Self::new(BasisLabel::Wf(k), BasisLabel::Wf(k), true)
    }

    /// Wootters–Fields index when both arms use the same basis with the
    /// conjugate on arm B; the standard basis counts as conjugate-invariant.
    pub fn matched_wf(&self) -> Option<usize> {
        match (self.basis_a, self.basis_b) {
            (BasisLabel::Wf(a), BasisLabel::Wf(b)) if a == b && self.conjugate_b => Some(a),
            _ => None,
        }
    }

    pub fn is_matched_standard(&self) -> bool {
        self.basis_a == BasisLabel::Standard && self.basis_b == BasisLabel::Standard
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.basis_a, self.basis_b)?;
        if self.conjugate_b {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// Probabilities `P[i][j] = ⟨a_i b_j|ρ|a_i b_j⟩` where `b_j` is conjugated
/// when the setting asks for it.
pub fn outcome_probabilities(s: &TwoQuditState, setting: &MeasurementSetting) -> Result<DMatrix<f64>> {
    let d = s.d;
    let u = setting.basis_a.matrix(d)?;
    let v = setting.basis_b.matrix(d)?;
    // columns are the vectors actually projected onto on arm B
    let b = if setting.conjugate_b { v.conjugate() } else { v };
    let pure_probs = |psi: &DVector<Complex64>| {
        let m = DMatrix::from_fn(d, d, |i, j| psi[i * d + j]);
        let amp = u.adjoint() * m * b.conjugate();
        amp.map(|z| z.norm_sqr())
    };
    let probs = match &s.repr {
        Representation::Pure(psi) => pure_probs(psi),
        Representation::Isotropic { pure, noise } => {
            pure_probs(pure).map(|x| (1.0 - noise) * x + noise / (d * d) as f64)
        }
        Representation::Mixed(rho) => mixed_probabilities(rho, &u, &b, d),
    };
    Ok(probs.map(|x| if x < 0.0 && x > -1e-12 { 0.0 } else { x }))
}

/// Diagonal of `(U⊗B)† ρ (U⊗B)` contracted one arm at a time, `O(d⁵)`.
fn mixed_probabilities(rho: &DMatrix<Complex64>, u: &DMatrix<Complex64>, b: &DMatrix<Complex64>, d: usize) -> DMatrix<f64> {
    let dd = d * d;
    // y[(row, i·d + n')] = Σ_m' ρ[row, m'·d + n'] u[m', i]
    let mut y = DMatrix::<Complex64>::zeros(dd, dd);
    for row in 0..dd {
        for i in 0..d {
            for np in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for mp in 0..d {
                    acc += rho[(row, mp * d + np)] * u[(mp, i)];
                }
                y[(row, i * d + np)] = acc;
            }
        }
    }
    // z[(row, i·d + j)] = Σ_n' y[(row, i·d + n')] b[n', j]
    let mut z = DMatrix::<Complex64>::zeros(dd, dd);
    for row in 0..dd {
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for np in 0..d {
                    acc += y[(row, i * d + np)] * b[(np, j)];
                }
                z[(row, i * d + j)] = acc;
            }
        }
    }
    DMatrix::from_fn(d, d, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..d {
            for n in 0..d {
                acc += (u[(m, i)] * b[(n, j)]).conj() * z[(m * d + n, i * d + j)];
            }
        }
        acc.re
    })
}

/// Coincidence counts for one measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    pub setting: MeasurementSetting,
    counts: DMatrix<u64>,
    /// Acquisition time in seconds, if known.
    pub acquisition_time: Option<f64>,
}

impl CountMatrix {
    pub fn new(setting: MeasurementSetting, counts: DMatrix<u64>) -> Result<Self> {
        if counts.nrows() != counts.ncols() || counts.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: counts.nrows(),
                got: counts.ncols(),
            });
        }
        Ok(CountMatrix {
            setting,
            counts,
            acquisition_time: None,
        })
    }

    pub fn d(&self) -> usize {
        self.counts.nrows()
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Same setting with different counts of the same shape.
    pub fn with_counts(&self, counts: DMatrix<u64>) -> Self {
        assert_eq!(counts.shape(), self.counts.shape());
        CountMatrix {
            counts,
            ..self.clone()
        }
    }

    /// Reads `d` comma-separated rows of `d` non-negative integers.
    pub fn read_csv<R: Read>(reader: R, setting: MeasurementSetting) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let row = record
                .iter()
                .map(|field| {
                    field
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("row {}: '{field}' is not a count", line + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let d = rows.len();
        if d == 0 {
            return Err(Error::Parse("count file has no rows".into()));
        }
        if let Some(row) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        Self::new(setting, DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for i in 0..self.d() {
            w.write_record(self.counts.row(i).iter().map(|c| c.to_string()))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_probabilities(probs: &DMatrix<f64>) -> Result<()> {
    if let Some(&x) = probs.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::NegativeProbability(x));
    }
    Ok(())
}

/// Poisson counts with means `total_pairs · probs[i][j]`, drawn in row-major
/// order from a generator seeded with `seed`.
pub fn simulate_counts(
    probs: &DMatrix<f64>,
    setting: MeasurementSetting,
    total_pairs: u64,
    seed: u64,
) -> Result<CountMatrix> {
    check_probabilities(probs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = probs.shape();
    let mut counts = DMatrix::<u64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            counts[(i, j)] = poisson(total_pairs as f64 * probs[(i, j)], &mut rng);
        }
    }
    CountMatrix::new(setting, counts)
}

pub(crate) fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Relative frequencies `N_ij / Σ N`.
pub fn counts_to_probs(c: &CountMatrix) -> Result<DMatrix<f64>> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok(c.counts.map(|n| n as f64 / total as f64))
}
