//! Integer and root-of-unity arithmetic behind the Wootters–Fields bases:
//! Jacobi symbols, the Gauss-sum phase `ε_d`, the modular inverse `ψ(a)` of
//! `4a`, and quadratic Gauss sums in direct and closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex number of unit modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitComplex(Complex64);

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex(Complex64::new(1.0, 0.0));
    pub const I: UnitComplex = UnitComplex(Complex64::new(0.0, 1.0));

    /// `exp(2πi·exponent/d)`, with the exponent reduced modulo `d` first so
    /// large exponents do not lose precision.
    pub fn root_of_unity(exponent: i64, d: u64) -> Self {
        let e = exponent.rem_euclid(d as i64) as f64;
        let theta = 2.0 * PI * e / d as f64;
        UnitComplex(Complex64::new(theta.cos(), theta.sin()))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

impl From<UnitComplex> for Complex64 {
    fn from(u: UnitComplex) -> Self {
        u.0
    }
}

fn check_odd_modulus(n: i64) -> Result<()> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::EvenOrNonPositiveModulus(n));
    }
    Ok(())
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> Result<i8> {
    check_odd_modulus(n)?;
    let mut a = a.rem_euclid(n) as u64;
    let mut n = n as u64;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            // (2/n) = -1 iff n ≡ 3, 5 (mod 8)
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// `ε_d`: 1 when `d ≡ 1 (mod 4)`, `i` when `d ≡ 3 (mod 4)`.
pub fn eps(d: i64) -> Result<UnitComplex> {
    check_odd_modulus(d)?;
    Ok(if d % 4 == 1 {
        UnitComplex::ONE
    } else {
        UnitComplex::I
    })
}

/// Modular inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// The unique `ψ ∈ [0, c)` with `4·ψ·a ≡ 1 (mod c)`.
pub fn psi(a: i64, c: i64) -> Result<i64> {
    check_odd_modulus(c)?;
    if c == 1 {
        return Ok(0);
    }
    let four_a = (4 * a.rem_euclid(c)).rem_euclid(c);
    mod_inverse(four_a, c).ok_or(Error::NotCoprime { a, modulus: c })
}

/// `Σ_{i<d} exp(2πi·a·i²/d)` summed term by term.
pub fn gauss_sum_direct(a: i64, d: i64) -> Result<Complex64> {
    check_odd_modulus(d)?;
    let a = a.rem_euclid(d);
    Ok((0..d)
        .map(|i| UnitComplex::root_of_unity(a * ((i * i) % d), d as u64).value())
        .sum())
}

/// Closed form `(a/d)·ε_d·√d` of the quadratic Gauss sum; requires
/// `gcd(a, d) = 1`.
pub fn gauss_sum_closed(a: i64, d: i64) -> Result<Complex64> {
    check_odd_modulus(d)?;
    if gcd(a, d) != 1 {
        return Err(Error::NotCoprime { a, modulus: d });
    }
    let symbol = jacobi(a, d)? as f64;
    Ok(eps(d)?.value() * symbol * (d as f64).sqrt())
}

/// Generalized quadratic Gauss sum `G(a, b, c) = Σ_n exp(2πi(an² + bn)/c)`
/// evaluated in closed form by completing the square:
/// `ε_c·√c·(a/c)·exp(−2πi·ψ(a)·b²/c)`.
pub fn gen_gauss_sum(a: i64, b: i64, c: i64) -> Result<Complex64> {
    check_odd_modulus(c)?;
    if gcd(a, c) != 1 {
        return Err(Error::NotCoprime { a, modulus: c });
    }
    let psi_a = psi(a, c)?;
    let b = b.rem_euclid(c);
    let exponent = -(psi_a * ((b * b) % c) % c);
    let phase = UnitComplex::root_of_unity(exponent, c as u64).value();
    Ok(gauss_sum_closed(a, c)? * phase)
}
