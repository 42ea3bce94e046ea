//! Direct summation of the Fox–Wright series and its named special cases.

use std::ops::Add;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FoxError, Result};
use crate::params::{
    classify_convergence, correction_coeffs, derive_constants, ln_gamma_ratio, Convergence,
    ParameterSet,
};
use crate::special::{self, touchard_sum, SignedLog};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 10_000;
/// Environment variable overriding [`DEFAULT_MAX_TERMS`].
pub const MAX_TERMS_ENV: &str = "FOXWRIGHT_MAX_TERMS";

/// Consecutive small terms required before the sum is declared converged.
const STOP_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalStatus {
    Converged,
    MaxTermsReached,
    OutsideDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult<T> {
    pub value: T,
    pub terms_used: usize,
    /// Magnitude of the last term relative to `|value|`.
    pub trunc_estimate: f64,
    pub status: EvalStatus,
}

impl<T> EvalResult<T> {
    pub fn is_converged(&self) -> bool {
        self.status == EvalStatus::Converged
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl SeriesConfig {
    pub fn with_tol(tol: f64) -> Self {
        SeriesConfig {
            tol,
            ..Self::default()
        }
    }

    /// Default configuration with the term cap taken from `FOXWRIGHT_MAX_TERMS` when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(cap) = std::env::var(MAX_TERMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|v| *v > 0)
        {
            cfg.max_terms = cap;
        }
        cfg
    }
}

/// Scalars the summation loop can accumulate.
pub trait SeriesScalar: Copy + Add<Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    /// `sign * exp(ln_abs) * phase^k` for the term at index `k`.
    fn term(magnitude: SignedLog, k: usize, ln_z: Self::LnArg) -> Self;
    type LnArg: Copy;
}

/// Real argument: `ln|z|` and whether `z < 0`.
#[derive(Debug, Clone, Copy)]
pub struct RealLn {
    ln_abs: f64,
    negative: bool,
}

impl SeriesScalar for f64 {
    type LnArg = RealLn;

    fn zero() -> Self {
        0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn term(coef: SignedLog, k: usize, z: RealLn) -> Self {
        if coef.is_zero() {
            return 0.0;
        }
        let sign = if z.negative && k % 2 == 1 {
            -coef.sign
        } else {
            coef.sign
        };
        sign * (coef.ln_abs + k as f64 * z.ln_abs).exp()
    }
}

impl SeriesScalar for Complex64 {
    type LnArg = Complex64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn term(coef: SignedLog, k: usize, ln_z: Complex64) -> Self {
        if coef.is_zero() {
            return Self::zero();
        }
        (ln_z * k as f64 + coef.ln_abs).exp() * coef.sign
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Geometric or faster decay: the last term bounds the tail.
    Adaptive,
    /// On the circle of convergence terms decay algebraically, `|t_k| ~ C k^-s`;
    /// the tail is estimated as `|t_k| k / (s - 1)`.
    Boundary,
    /// Exactly `n` terms, no stop rule.
    Fixed(usize),
}

/// Sums `sum_k c_k z^k` with `c_k` supplied in signed-log form.
///
/// Stops after three consecutive non-increasing terms whose tail estimate is
/// no larger than `tol * |partial sum|`.
fn sum_log_series<T, F>(
    mut coef: F,
    ln_z: T::LnArg,
    cfg: &SeriesConfig,
    mode: Mode,
) -> Result<EvalResult<T>>
where
    T: SeriesScalar,
    F: FnMut(usize) -> Result<SignedLog>,
{
    let mut sum = T::zero();
    let mut run = 0usize;
    let mut prev_mag = f64::INFINITY;
    let mut tail = 0.0;
    let cap = match mode {
        Mode::Fixed(n) => n,
        _ => cfg.max_terms,
    };
    for k in 0..cap {
        let t = T::term(coef(k)?, k, ln_z);
        let mag = t.magnitude();
        if !mag.is_finite() {
            return Err(FoxError::NonConvergent(format!("term {k} overflowed")));
        }
        sum = sum + t;
        tail = match mode {
            Mode::Boundary => algebraic_tail(mag, prev_mag, k),
            _ => mag,
        };
        if !matches!(mode, Mode::Fixed(_)) {
            if tail <= cfg.tol * sum.magnitude() && mag <= prev_mag {
                run += 1;
            } else {
                run = 0;
            }
            if run >= STOP_RUN {
                return Ok(EvalResult {
                    value: sum,
                    terms_used: k + 1,
                    trunc_estimate: relative(tail, sum.magnitude()),
                    status: EvalStatus::Converged,
                });
            }
        }
        prev_mag = mag;
    }
    Ok(EvalResult {
        value: sum,
        terms_used: cap,
        trunc_estimate: relative(tail, sum.magnitude()),
        status: if matches!(mode, Mode::Fixed(_)) {
            EvalStatus::Converged
        } else {
            EvalStatus::MaxTermsReached
        },
    })
}

fn algebraic_tail(mag: f64, prev_mag: f64, k: usize) -> f64 {
    if mag == 0.0 {
        return 0.0;
    }
    if k < 2 || !prev_mag.is_finite() || prev_mag == 0.0 {
        return f64::INFINITY;
    }
    let kf = k as f64;
    let s = -(mag / prev_mag).ln() / (kf / (kf - 1.0)).ln();
    if s <= 1.0 {
        f64::INFINITY
    } else {
        mag * kf / (s - 1.0)
    }
}

fn relative(term: f64, sum: f64) -> f64 {
    if term == 0.0 {
        0.0
    } else if sum == 0.0 {
        f64::INFINITY
    } else {
        term / sum
    }
}

fn check_domain(params: &ParameterSet, abs_z: f64) -> Result<Mode> {
    let c = derive_constants(params);
    let outside = |radius| Err(FoxError::OutsideDomain { z: abs_z, radius });
    match classify_convergence(params) {
        Convergence::EntirePlane => Ok(Mode::Adaptive),
        Convergence::Divergent => {
            if abs_z == 0.0 {
                Ok(Mode::Adaptive)
            } else {
                outside(0.0)
            }
        }
        class => {
            let on_boundary = (abs_z - c.rho).abs() <= 1e-12 * c.rho;
            if abs_z < c.rho && !on_boundary {
                Ok(Mode::Adaptive)
            } else if on_boundary && class == Convergence::BoundarySummable {
                Ok(Mode::Boundary)
            } else {
                outside(c.rho)
            }
        }
    }
}

/// Signed-log coefficient `ratio(k) / k!`.
fn fox_wright_coef(params: &ParameterSet, k: usize) -> Result<SignedLog> {
    let r = ln_gamma_ratio(params, k as f64)?;
    let ln_fact = special::ln_gamma_real(k as f64 + 1.0)?.ln_abs;
    Ok(r * SignedLog {
        ln_abs: -ln_fact,
        sign: 1.0,
    })
}

fn real_ln(z: f64) -> RealLn {
    RealLn {
        ln_abs: z.abs().ln(),
        negative: z < 0.0,
    }
}

fn at_origin<T: SeriesScalar>(value: T) -> EvalResult<T> {
    EvalResult {
        value,
        terms_used: 1,
        trunc_estimate: 0.0,
        status: EvalStatus::Converged,
    }
}

/// `pPsi_q` at a real argument.
pub fn fox_wright(params: &ParameterSet, z: f64, cfg: &SeriesConfig) -> Result<EvalResult<f64>> {
    let mode = check_domain(params, z.abs())?;
    if z == 0.0 {
        return Ok(at_origin(fox_wright_coef(params, 0)?.value()));
    }
    sum_log_series(|k| fox_wright_coef(params, k), real_ln(z), cfg, mode)
}

/// `pPsi_q` at a complex argument.
pub fn fox_wright_complex(
    params: &ParameterSet,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<EvalResult<Complex64>> {
    let mode = check_domain(params, z.norm())?;
    if z.norm() == 0.0 {
        let v = fox_wright_coef(params, 0)?.value();
        return Ok(at_origin(Complex64::new(v, 0.0)));
    }
    sum_log_series(|k| fox_wright_coef(params, k), z.ln(), cfg, mode)
}

/// Sum of exactly the first `n` terms; no stop rule.
pub fn fox_wright_partial(params: &ParameterSet, z: f64, n: usize) -> Result<f64> {
    if z == 0.0 {
        return fox_wright_coef(params, 0).map(|c| c.value());
    }
    let cfg = SeriesConfig::default();
    sum_log_series(
        |k| fox_wright_coef(params, k),
        real_ln(z),
        &cfg,
        Mode::Fixed(n),
    )
    .map(|r| r.value)
}

fn unit_scale_set(upper: &[f64], lower: &[f64]) -> Result<ParameterSet> {
    if upper.is_empty() && lower.is_empty() {
        // 0F0: a cancelling (1,1) pair keeps the set non-empty
        return ParameterSet::new([(1.0, 1.0)], [(1.0, 1.0)]);
    }
    ParameterSet::new(
        upper.iter().map(|a| (*a, 1.0)).collect::<Vec<_>>(),
        lower.iter().map(|b| (*b, 1.0)).collect::<Vec<_>>(),
    )
}

fn pfq_prefactor(upper: &[f64], lower: &[f64]) -> Result<f64> {
    for b in lower {
        if special::nonpositive_integer(*b).is_some() {
            return Err(FoxError::Domain(format!(
                "lower parameter {b} is a non-positive integer"
            )));
        }
    }
    let mut acc = SignedLog {
        ln_abs: 0.0,
        sign: 1.0,
    };
    for b in lower {
        acc = acc * special::ln_gamma_real(*b)?;
    }
    for a in upper {
        acc = acc * special::ln_gamma_real(*a)?.recip();
    }
    Ok(acc.value())
}

/// Generalized hypergeometric `pF_q` through its Fox–Wright normalization.
pub fn pfq(upper: &[f64], lower: &[f64], z: f64, cfg: &SeriesConfig) -> Result<EvalResult<f64>> {
    let pre = pfq_prefactor(upper, lower)?;
    let set = unit_scale_set(upper, lower)?;
    let mut r = fox_wright(&set, z, cfg)?;
    r.value *= pre;
    Ok(r)
}

pub fn pfq_complex(
    upper: &[f64],
    lower: &[f64],
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<EvalResult<Complex64>> {
    let pre = pfq_prefactor(upper, lower)?;
    let set = unit_scale_set(upper, lower)?;
    let mut r = fox_wright_complex(&set, z, cfg)?;
    r.value *= pre;
    Ok(r)
}

/// Wright function `W_{alpha,beta}(z) = 0Psi1[-; (beta, alpha) | z]`.
pub fn wright_w(alpha: f64, beta: f64, z: f64, cfg: &SeriesConfig) -> Result<EvalResult<f64>> {
    let set = ParameterSet::new(Vec::<(f64, f64)>::new(), [(beta, alpha)])?;
    fox_wright(&set, z, cfg)
}

/// Mittag-Leffler `E_{alpha,beta}(z) = 1Psi1[(1,1); (beta, alpha) | z]`.
pub fn mittag_leffler(
    alpha: f64,
    beta: f64,
    z: f64,
    cfg: &SeriesConfig,
) -> Result<EvalResult<f64>> {
    let set = ParameterSet::new([(1.0, 1.0)], [(beta, alpha)])?;
    fox_wright(&set, z, cfg)
}

pub fn mittag_leffler_complex(
    alpha: f64,
    beta: f64,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<EvalResult<Complex64>> {
    let set = ParameterSet::new([(1.0, 1.0)], [(beta, alpha)])?;
    fox_wright_complex(&set, z, cfg)
}

/// Four-parameter Wright function `sum z^k / (Γ(a + k mu1) Γ(b + k nu1))`.
///
/// Scales may be negative. Converges everywhere for `mu1 + nu1 > 0`; for
/// `mu1 + nu1 = 0` inside `|z| < |mu1|^mu1 |nu1|^nu1`, and on that circle when
/// `a + b > 2`.
pub fn four_param_wright(
    mu1: f64,
    a: f64,
    nu1: f64,
    b: f64,
    z: f64,
    cfg: &SeriesConfig,
) -> Result<EvalResult<f64>> {
    let order = mu1 + nu1;
    let mut mode = Mode::Adaptive;
    if order.abs() <= 1e-12 {
        let radius = mu1.abs().powf(mu1) * nu1.abs().powf(nu1);
        let on_boundary = (z.abs() - radius).abs() <= 1e-12 * radius;
        let inside = z.abs() < radius && !on_boundary;
        if !(inside || (on_boundary && a + b > 2.0)) {
            return Err(FoxError::OutsideDomain { z: z.abs(), radius });
        }
        if on_boundary {
            mode = Mode::Boundary;
        }
    } else if order < 0.0 && z != 0.0 {
        return Err(FoxError::OutsideDomain {
            z: z.abs(),
            radius: 0.0,
        });
    }
    let coef = |k: usize| -> Result<SignedLog> {
        let kf = k as f64;
        Ok(special::ln_rgamma_real(a + kf * mu1)? * special::ln_rgamma_real(b + kf * nu1)?)
    };
    if z == 0.0 {
        return Ok(at_origin(coef(0)?.value()));
    }
    sum_log_series(coef, real_ln(z), cfg, mode)
}

/// Atomic part `eta sum_k sum_j l_{m-j} k^j (R z)^k / k!` of the representation,
/// with `R = support_end`.
pub fn correction_series(params: &ParameterSet, m: usize, z: f64) -> Result<f64> {
    let c = derive_constants(params);
    let detected = c.require_m()?;
    if detected != m {
        return Err(FoxError::Hypothesis(format!(
            "requested m = {m} but mu = {} gives m = {detected}",
            c.mu
        )));
    }
    let l = correction_coeffs(params, m)?.l_seq;
    let x = c.support_end * z;
    let sum: f64 = (0..=m).map(|j| l[m - j] * touchard_sum(j, x)).sum();
    Ok(c.eta * sum)
}
