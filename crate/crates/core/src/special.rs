//! Scalar special functions used by every gamma ratio in the crate.
//!
//! Log-gamma uses the Lanczos approximation with g = 607/128 and fifteen
//! coefficients, plus the reflection formula left of Re z = 1/2. Bernoulli
//! numbers and Stirling numbers of the second kind are generated exactly
//! with big rationals once and cached as `f64`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{FoxError, Result};

/// Largest Bernoulli degree served from the exact cache.
pub const MAX_BERNOULLI_DEGREE: usize = 64;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Distance from a non-positive integer below which an argument counts as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// `ln|x|` together with the sign of `x`; `sign == 0.0` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                ln_abs: x.abs().ln(),
                sign: x.signum(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn recip(self) -> SignedLog {
        SignedLog {
            ln_abs: -self.ln_abs,
            sign: self.sign,
        }
    }

    pub fn value(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        SignedLog {
            ln_abs: self.ln_abs + other.ln_abs,
            sign: self.sign * other.sign,
        }
    }
}

/// Returns `Some(n)` when `x` lies within [`POLE_TOL`] of the non-positive integer `-n`.
pub fn nonpositive_integer(x: f64) -> Option<u64> {
    if x > POLE_TOL {
        return None;
    }
    let r = x.round();
    if (x - r).abs() <= POLE_TOL && r <= 0.0 {
        Some((-r) as u64)
    } else {
        None
    }
}

/// sin(pi x) with argument reduction, exact zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.trunc() {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln|Γ(x)|` and the sign of `Γ(x)` for real `x`.
pub fn ln_gamma_real(x: f64) -> Result<SignedLog> {
    if !x.is_finite() {
        return Err(FoxError::Domain(format!("non-finite gamma argument {x}")));
    }
    if nonpositive_integer(x).is_some() {
        return Err(FoxError::Pole(x));
    }
    if x >= 0.5 {
        return Ok(SignedLog {
            ln_abs: lanczos_ln_gamma(x),
            sign: 1.0,
        });
    }
    let s = sin_pi(x);
    let reflected = lanczos_ln_gamma(1.0 - x);
    Ok(SignedLog {
        ln_abs: LN_PI - s.abs().ln() - reflected,
        sign: s.signum(),
    })
}

/// `1/Γ(x)` in signed-log form; exactly zero at the poles of Γ.
pub fn ln_rgamma_real(x: f64) -> Result<SignedLog> {
    match ln_gamma_real(x) {
        Ok(v) => Ok(v.recip()),
        Err(FoxError::Pole(_)) => Ok(SignedLog::ZERO),
        Err(e) => Err(e),
    }
}

/// Γ(x) for real x.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma_real(x).map(|v| v.value())
}

/// 1/Γ(x) for real x (entire; zero at non-positive integers).
pub fn rgamma(x: f64) -> f64 {
    ln_rgamma_real(x).map(|v| v.value()).unwrap_or(f64::NAN)
}

fn lanczos_ln_gamma_complex(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += *c / (z + i as f64);
    }
    let t = z + (LANCZOS_G + 0.5);
    (z + 0.5) * t.ln() - t + acc.ln() + LN_SQRT_2PI
}

/// ln sin(pi z) without overflow for large |Im z| (determined modulo 2 pi i).
fn ln_sin_pi_complex(z: Complex64) -> Complex64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    let i = Complex64::i();
    if w.im > 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) i/2
        -i * w + Complex64::new(0.0, 0.5).ln() + (1.0 - (2.0 * i * w).exp()).ln()
    } else {
        i * w + Complex64::new(0.0, -0.5).ln() + (1.0 - (-2.0 * i * w).exp()).ln()
    }
}

/// Complex log-gamma.
///
/// Continuous in the half plane Re z >= 1/2; left of it the reflection
/// formula is used and the imaginary part is only fixed modulo 2 pi, which
/// is immaterial once the value is exponentiated.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(FoxError::Domain(format!("non-finite gamma argument {z}")));
    }
    if z.im.abs() <= POLE_TOL && nonpositive_integer(z.re).is_some() {
        return Err(FoxError::Pole(z.re));
    }
    if z.im == 0.0 {
        let v = ln_gamma_real(z.re)?;
        let im = if v.sign < 0.0 { PI } else { 0.0 };
        return Ok(Complex64::new(v.ln_abs, im));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln_gamma_complex(z))
    } else {
        Ok(LN_PI - ln_sin_pi_complex(z) - lanczos_ln_gamma_complex(1.0 - z))
    }
}

/// `ln(1/Γ(z))`; `None` when `z` is a pole of Γ (the reciprocal vanishes).
pub fn ln_rgamma(z: Complex64) -> Result<Option<Complex64>> {
    match ln_gamma(z) {
        Ok(v) => Ok(Some(-v)),
        Err(FoxError::Pole(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn bernoulli_numbers() -> &'static [BigRational] {
    static CACHE: OnceLock<Vec<BigRational>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n_max = MAX_BERNOULLI_DEGREE;
        let binom = binomial_table(n_max + 1);
        let mut b: Vec<BigRational> = Vec::with_capacity(n_max + 1);
        b.push(BigRational::one());
        for n in 1..=n_max {
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(BigInt::from(binom[n + 1][k].clone())) * bk;
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(n as u64 + 1)));
        }
        b
    })
}

fn binomial_table(n_max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = vec![BigUint::one(); n + 1];
        for k in 1..n {
            row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Bernoulli number B_n (convention B_1 = -1/2).
pub fn bernoulli_number(n: usize) -> Result<f64> {
    bernoulli_numbers()
        .get(n)
        .map(|b| b.to_f64().unwrap_or(f64::NAN))
        .ok_or(FoxError::Overflow(n))
}

/// Bernoulli polynomial B_n(a), from t e^{at}/(e^t - 1) = sum B_n(a) t^n/n!.
///
/// The argument is converted to the exact dyadic rational it represents and
/// the polynomial is evaluated exactly, so the only rounding is the final
/// conversion back to `f64`.
pub fn bernoulli_poly(n: usize, a: f64) -> Result<f64> {
    if n > MAX_BERNOULLI_DEGREE {
        return Err(FoxError::Overflow(n));
    }
    let a_exact = BigRational::from_float(a)
        .ok_or_else(|| FoxError::Domain(format!("non-finite Bernoulli argument {a}")))?;
    let b = bernoulli_numbers();
    let mut binom = BigInt::one();
    let mut acc = BigRational::zero();
    let mut powers = vec![BigRational::one(); n + 1];
    for i in 1..=n {
        powers[i] = &powers[i - 1] * &a_exact;
    }
    for k in 0..=n {
        acc += BigRational::from_integer(binom.clone()) * &b[k] * &powers[n - k];
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    Ok(acc.to_f64().unwrap_or(f64::NAN))
}

fn stirling2_table() -> &'static [Vec<f64>] {
    static CACHE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n_max = MAX_BERNOULLI_DEGREE;
        let mut exact: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for n in 1..=n_max {
            let prev = &exact[n - 1];
            let mut row = vec![BigUint::zero(); n + 1];
            for k in 1..=n {
                let carried = if k < prev.len() {
                    &prev[k] * BigUint::from(k as u64)
                } else {
                    BigUint::zero()
                };
                row[k] = carried + &prev[k - 1];
            }
            exact.push(row);
        }
        exact
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.to_f64().unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect()
    })
}

/// Stirling number of the second kind S(j, i).
pub fn stirling2(j: usize, i: usize) -> f64 {
    if i > j {
        return 0.0;
    }
    if let Some(row) = stirling2_table().get(j) {
        return row[i];
    }
    // beyond the cache: plain recurrence in floating point
    let mut row = vec![0.0; j + 1];
    row[0] = 1.0;
    for n in 1..=j {
        for k in (1..=n).rev() {
            row[k] = k as f64 * row[k] + row[k - 1];
        }
        row[0] = 0.0;
    }
    row[i]
}

/// `sum_{k>=0} k^j x^k / k!`, evaluated as `e^x` times the Touchard polynomial.
pub fn touchard_sum(j: usize, x: f64) -> f64 {
    let mut poly = 0.0;
    for i in (0..=j).rev() {
        poly = poly * x + stirling2(j, i);
    }
    x.exp() * poly
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn log_gamma_reference_points() {
        assert!((ln_gamma_real(0.5).unwrap().ln_abs - PI.sqrt().ln()).abs() < 1e-15);
        assert!((ln_gamma_real(5.0).unwrap().ln_abs - 24f64.ln()).abs() < 1e-14);
        assert!(ln_gamma_real(1.0).unwrap().ln_abs.abs() < 1e-15);
        assert!(ln_gamma_real(2.0).unwrap().ln_abs.abs() < 1e-15);
    }

    #[test]
    fn log_gamma_matches_factorials() {
        for n in 3..170u64 {
            let want = ln_factorial(n - 1);
            let got = ln_gamma_real(n as f64).unwrap().ln_abs;
            assert!(
                (got - want).abs() <= 1e-13 * want.abs(),
                "n={n} got={got} want={want}"
            );
        }
    }

    #[test]
    fn log_gamma_half_integers() {
        // Γ(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        for n in 1..80u64 {
            let want = ln_factorial(2 * n) + 0.5 * LN_PI - n as f64 * 4f64.ln() - ln_factorial(n);
            let got = ln_gamma_real(n as f64 + 0.5).unwrap().ln_abs;
            assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn negative_arguments_carry_sign() {
        // Γ(-1/2) = -2 sqrt(pi), Γ(-3/2) = 4 sqrt(pi)/3
        let g = ln_gamma_real(-0.5).unwrap();
        assert_eq!(g.sign, -1.0);
        assert!((g.value() + 2.0 * PI.sqrt()).abs() < 1e-14);
        let g = ln_gamma_real(-1.5).unwrap();
        assert_eq!(g.sign, 1.0);
        assert!((g.value() - 4.0 * PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn poles_are_errors_and_reciprocal_is_zero() {
        for x in [0.0, -1.0, -2.0, -17.0, -3.0 + 5e-13] {
            assert!(matches!(ln_gamma_real(x), Err(FoxError::Pole(_))), "x={x}");
            assert_eq!(rgamma(x), 0.0);
            assert!(ln_gamma(Complex64::new(x, 0.0)).is_err());
        }
        assert!(ln_gamma_real(-3.0 + 1e-9).is_ok());
    }

    #[test]
    fn complex_matches_real_axis() {
        for x in [0.3, 0.5, 1.7, 12.25, 150.0] {
            let c = ln_gamma(Complex64::new(x, 1e-300)).unwrap();
            let r = ln_gamma_real(x).unwrap().ln_abs;
            assert!((c.re - r).abs() < 1e-13 * r.abs().max(1.0));
        }
    }

    #[test]
    fn complex_gamma_known_modulus() {
        // |Γ(1/2 + iy)|^2 = pi / cosh(pi y)
        for y in [0.5, 3.0, 40.0, 500.0] {
            let v = ln_gamma(Complex64::new(0.5, y)).unwrap();
            let x = PI * y;
            let ln_cosh = x + (-2.0 * x).exp().ln_1p() - 2f64.ln();
            let want = 0.5 * (PI.ln() - ln_cosh);
            assert!((v.re - want).abs() < 1e-12 * want.abs().max(1.0), "y={y}");
        }
        // |Γ(iy)|^2 = pi / (y sinh(pi y)), reflection branch
        for y in [0.7, 9.0, 300.0] {
            let v = ln_gamma(Complex64::new(0.0, y)).unwrap();
            let x = PI * y;
            let ln_sinh = x + (-(-2.0 * x).exp()).ln_1p() - 2f64.ln();
            let want = 0.5 * (PI.ln() - y.ln() - ln_sinh);
            assert!((v.re - want).abs() < 1e-12 * want.abs().max(1.0), "y={y}");
        }
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli_poly(0, 0.3).unwrap(), 1.0);
        assert!((bernoulli_poly(1, 0.75).unwrap() - 0.25).abs() < 1e-16);
        let want = 0.25f64 * 0.25 - 0.25 + 1.0 / 6.0;
        assert!((bernoulli_poly(2, 0.25).unwrap() - want).abs() < 1e-16);
        assert!((bernoulli_number(12).unwrap() + 691.0 / 2730.0).abs() < 1e-16);
        assert!(matches!(
            bernoulli_poly(65, 0.5),
            Err(FoxError::Overflow(65))
        ));
        assert!(bernoulli_poly(64, 0.5).is_ok());
    }

    /// Taylor coefficients of t e^{at}/(e^t - 1) by truncated power-series division.
    fn generating_function_coeffs(a: f64, order: usize) -> Vec<f64> {
        let n = order + 1;
        let mut num = vec![0.0; n + 1];
        let mut fact = 1.0;
        for (k, c) in num.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *c = a.powi(k as i32) / fact;
        }
        // (e^t - 1)/t = sum t^k/(k+1)!
        let mut den = vec![0.0; n + 1];
        let mut fact = 1.0;
        for (k, c) in den.iter_mut().enumerate() {
            fact *= (k + 1) as f64;
            *c = 1.0 / fact;
        }
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut s = num[k];
            for j in 0..k {
                s -= q[j] * den[k - j];
            }
            q[k] = s / den[0];
        }
        q
    }

    #[test]
    fn bernoulli_matches_generating_function() {
        for a in [0.0, 0.25, 0.5, 1.0] {
            let coeffs = generating_function_coeffs(a, 8);
            let mut fact = 1.0;
            for (n, c) in coeffs.iter().enumerate().take(9) {
                if n > 0 {
                    fact *= n as f64;
                }
                let want = c * fact;
                let got = bernoulli_poly(n, a).unwrap();
                assert!(
                    (got - want).abs() < 1e-12,
                    "n={n} a={a} got={got} want={want}"
                );
            }
        }
    }

    fn brute_touchard(j: usize, x: f64) -> f64 {
        let mut term = 1.0; // x^k / k!
        let mut sum = if j == 0 { 1.0 } else { 0.0 };
        for k in 1..=200usize {
            term *= x / k as f64;
            sum += (k as f64).powi(j as i32) * term;
        }
        sum
    }

    #[test]
    fn touchard_examples() {
        assert!((touchard_sum(0, 1.3) - 1.3f64.exp()).abs() < 1e-14);
        assert!((touchard_sum(1, 2.0) - 2.0 * 2f64.exp()).abs() < 1e-13);
        assert!((touchard_sum(2, 1.0) - brute_touchard(2, 1.0)).abs() < 1e-14);
        assert!((touchard_sum(2, 1.0) - 2.0 * 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn touchard_matches_brute_force() {
        for j in 0..=6 {
            for x in [-5.0, -2.5, -0.3, 0.0, 0.7, 3.0, 5.0] {
                let want = brute_touchard(j, x);
                let got = touchard_sum(j, x);
                let scale = want.abs().max(f64::MIN_POSITIVE);
                // near-cancelling sums for negative x are compared against the term scale
                let term_scale = brute_touchard(j, x.abs()) * 1e-15;
                assert!(
                    (got - want).abs() <= 1e-12 * scale + term_scale,
                    "j={j} x={x} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn stirling_row_sums_are_bell_numbers() {
        let bell = [1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0];
        for (n, b) in bell.iter().enumerate() {
            let s: f64 = (0..=n).map(|i| stirling2(n, i)).sum();
            assert_eq!(s, *b);
        }
        assert_eq!(stirling2(70, 1), 1.0);
        assert_eq!(stirling2(70, 70), 1.0);
    }
}
