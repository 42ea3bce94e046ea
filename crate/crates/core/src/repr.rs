//! Integral representations of the Fox–Wright function and their numerical checks.

use serde::Serialize;

use crate::error::{FoxError, Result};
use crate::hfun::{HFunction, HfunEvalConfig};
use crate::params::{classify_convergence, derive_constants, Convergence, ParameterSet};
use crate::quad;
use crate::series::{self, fox_wright, EvalResult, EvalStatus, SeriesConfig};
use crate::special;

pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;
/// Lifted values switch from the series to the representation at this fraction of the radius.
pub const LIFTED_SERIES_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReprConfig {
    pub hfun: HfunEvalConfig,
    pub series: SeriesConfig,
    /// Threshold on `abs_err / (1 + |reference|)` for a "verified" verdict.
    pub verify_tol: f64,
}

impl Default for ReprConfig {
    fn default() -> Self {
        ReprConfig {
            hfun: HfunEvalConfig::default(),
            series: SeriesConfig::from_env(),
            verify_tol: DEFAULT_VERIFY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub params: String,
    pub z: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub verdict: String,
}

pub const VERIFIED: &str = "verified";
pub const MISMATCH: &str = "mismatch";

impl IdentityRecord {
    /// `lhs` is the quantity under test, `rhs` the reference.
    pub fn new(
        identity: &str,
        params: &ParameterSet,
        z: f64,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let ok = abs_err <= tol * (1.0 + rhs.abs());
        IdentityRecord {
            identity: identity.to_string(),
            params: params.canonical_json(),
            z,
            lhs,
            rhs,
            abs_err,
            rel_err: relative_error(abs_err, rhs),
            verdict: if ok { VERIFIED } else { MISMATCH }.to_string(),
        }
    }

    pub fn verified(&self) -> bool {
        self.verdict == VERIFIED
    }

    pub const CSV_HEADER: &'static str = "identity,params,z,lhs,rhs,abs_err,rel_err,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},\"{}\",{},{},{},{},{},{}",
            self.identity,
            self.params.replace('"', "\"\""),
            self.z,
            self.lhs,
            self.rhs,
            self.abs_err,
            self.rel_err,
            self.verdict
        )
    }
}

pub fn relative_error(abs_err: f64, reference: f64) -> f64 {
    if abs_err == 0.0 {
        0.0
    } else {
        abs_err / reference.abs()
    }
}

/// `η Γ(σ) (1 + R z)^{-σ}`: the atom's contribution to the lifted function at `-z`.
pub fn atom_stieltjes(eta: f64, support_end: f64, sigma: f64, z: f64) -> Result<f64> {
    let base = 1.0 + support_end * z;
    if base <= 0.0 {
        return Err(FoxError::Domain(format!(
            "1 + {support_end} z must be positive, got {base}"
        )));
    }
    Ok(eta * special::gamma(sigma)? * base.powf(-sigma))
}

/// Integral representation: `∫_0^R e^{zt} H(t) dt/t` plus the atomic correction series.
pub fn eval_via_representation(
    params: &ParameterSet,
    z: f64,
    cfg: &ReprConfig,
) -> Result<EvalResult<f64>> {
    let h = HFunction::new(params)?;
    eval_with(&h, z, cfg)
}

pub fn eval_with(h: &HFunction, z: f64, cfg: &ReprConfig) -> Result<EvalResult<f64>> {
    let q = h.integrate_weighted(0.0, |t| (z * t).exp(), &cfg.hfun)?;
    let atoms = series::correction_series(h.params(), h.m(), z)?;
    Ok(EvalResult {
        value: q.value + atoms,
        terms_used: q.evaluations,
        trunc_estimate: q.error,
        status: EvalStatus::Converged,
    })
}

fn require_m0(h: &HFunction) -> Result<()> {
    if h.m() != 0 {
        return Err(FoxError::Hypothesis(format!(
            "this representation needs mu = 0, got mu = -{}",
            h.m()
        )));
    }
    Ok(())
}

/// `Γ(σ) ∫_0^R H(t) dt / (t (1 + t z)^σ)`.
pub fn stieltjes_eval(
    params: &ParameterSet,
    sigma: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<EvalResult<f64>> {
    let h = HFunction::new(params)?;
    stieltjes_with(&h, sigma, 0.0, z, cfg)
}

/// `Γ(σ) ∫_0^R t^{δ-1} H(t) dt / (1 + t z)^σ`.
pub fn stieltjes_with(
    h: &HFunction,
    sigma: f64,
    delta: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<EvalResult<f64>> {
    require_m0(h)?;
    if !(sigma > 0.0) {
        return Err(FoxError::InvalidParameters(format!(
            "sigma = {sigma} must be positive"
        )));
    }
    let r = h.support_end();
    if 1.0 + r * z <= 0.0 {
        return Err(FoxError::Domain(format!(
            "1 + t z vanishes on (0, {r}) for z = {z}"
        )));
    }
    let q = h.integrate_weighted(delta, |t| (1.0 + t * z).powf(-sigma), &cfg.hfun)?;
    let g = special::gamma(sigma)?;
    Ok(EvalResult {
        value: g * q.value,
        terms_used: q.evaluations,
        trunc_estimate: g * q.error,
        status: EvalStatus::Converged,
    })
}

/// `p+1Psi_q[(σ,1), upper; lower | -z]`: series inside `0.9 ρ`, Stieltjes representation beyond.
pub fn lifted_at_neg(h: &HFunction, sigma: f64, z: f64, cfg: &ReprConfig) -> Result<f64> {
    let lifted = h.params().lifted(sigma)?;
    let rho = derive_constants(&lifted).rho;
    let use_series = match classify_convergence(&lifted) {
        Convergence::EntirePlane => true,
        Convergence::Divergent => false,
        _ => z.abs() < LIFTED_SERIES_FRACTION * rho,
    };
    if use_series {
        return fox_wright(&lifted, -z, &cfg.series).map(|r| r.value);
    }
    let c = h.constants();
    let reg = stieltjes_with(h, sigma, 0.0, z, cfg)?.value;
    Ok(reg + atom_stieltjes(c.eta, c.support_end, sigma, z)?)
}

/// Stieltjes form vs the lifted series minus the atom term.
pub fn stieltjes_identity(
    params: &ParameterSet,
    sigma: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<IdentityRecord> {
    let h = HFunction::new(params)?;
    let quad_side = stieltjes_with(&h, sigma, 0.0, z, cfg)?.value;
    let lifted = params.lifted(sigma)?;
    let series_side = fox_wright(&lifted, -z, &cfg.series)?.value;
    let c = h.constants();
    let rhs = series_side - atom_stieltjes(c.eta, c.support_end, sigma, z)?;
    Ok(IdentityRecord::new(
        "stieltjes",
        params,
        z,
        quad_side,
        rhs,
        cfg.verify_tol,
    ))
}

pub fn representation_identity(
    params: &ParameterSet,
    z: f64,
    cfg: &ReprConfig,
) -> Result<IdentityRecord> {
    let lhs = eval_via_representation(params, z, cfg)?.value;
    let rhs = fox_wright(params, z, &cfg.series)?.value;
    Ok(IdentityRecord::new(
        "representation",
        params,
        z,
        lhs,
        rhs,
        cfg.verify_tol,
    ))
}

/// `∫_0^∞ e^{-t} t^{λ-1} Psi(z t) dt` against the lifted series at `z`.
pub fn laplace_lift_check(
    params: &ParameterSet,
    lambda: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<IdentityRecord> {
    if !(lambda > 0.0) {
        return Err(FoxError::InvalidParameters(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    if classify_convergence(params) != Convergence::EntirePlane {
        return Err(FoxError::Hypothesis(
            "the Laplace lift needs an entire Fox–Wright function".into(),
        ));
    }
    let lifted = params.lifted(lambda)?;
    let rhs = fox_wright(&lifted, z, &cfg.series)?.value;
    let lhs = laplace_integral(params, lambda, z, &cfg.series)?;
    Ok(IdentityRecord::new(
        "laplace-lift",
        params,
        z,
        lhs,
        rhs,
        cfg.verify_tol,
    ))
}

fn laplace_integral(
    params: &ParameterSet,
    lambda: f64,
    z: f64,
    scfg: &SeriesConfig,
) -> Result<f64> {
    let failure = std::cell::Cell::new(None);
    let psi = |x: f64| -> f64 {
        match fox_wright(params, x, scfg) {
            Ok(r) => r.value,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let (abs_tol, rel_tol) = (1e-13, 1e-12);
    // [0, 1] with t = u^{1/λ}: dt t^{λ-1} = du / λ
    let head = quad::integrate(
        |u: f64| {
            let t = u.powf(1.0 / lambda);
            (-t).exp() * psi(z * t) / lambda
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    );
    let integrand = |t: f64| (-t).exp() * t.powf(lambda - 1.0) * psi(z * t);
    let mut total = head?.value;
    let mut a = 1.0;
    let mut small = 0;
    while small < 2 {
        let b = 2.0 * a;
        let piece = quad::integrate(integrand, a, b, abs_tol, rel_tol)?.value;
        total += piece;
        small = if piece.abs() <= 1e-16 * total.abs().max(1e-300) {
            small + 1
        } else {
            0
        };
        if b > 1e5 {
            return Err(FoxError::QuadratureFailure(format!(
                "Laplace integrand does not decay for z = {z}"
            )));
        }
        a = b;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteLaplaceReport {
    pub z: f64,
    /// `(e^{-2z} - e^{-z}) / √π`
    pub lhs_stated: f64,
    /// `(e^{-2z} - e^{-z/2}) / √π`
    pub lhs_derived: f64,
    /// `Psi(-z) - η e^{-R z}` from the series.
    pub series_branch: f64,
    /// `∫_0^R e^{-zt} H(t) dt/t`
    pub rhs: f64,
    pub stated_matches: bool,
    pub derived_matches: bool,
    pub series_matches: bool,
    /// The unique closed form (`stated` or `derived`) matching the quadrature, if any.
    pub verified_branch: Option<String>,
}

/// The four-parameter set with `μ1 = ν1 = a = 1/2`, `b = 1`.
pub fn finite_laplace_set() -> ParameterSet {
    ParameterSet::new([(1.0, 1.0)], [(0.5, 0.5), (1.0, 0.5)]).expect("valid set")
}

pub fn finite_laplace_identity(z: f64, cfg: &ReprConfig) -> Result<FiniteLaplaceReport> {
    let params = finite_laplace_set();
    let h = HFunction::new(&params)?;
    let c = h.constants();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let lhs_stated = ((-2.0 * z).exp() - (-z).exp()) / sqrt_pi;
    let lhs_derived = ((-2.0 * z).exp() - (-0.5 * z).exp()) / sqrt_pi;
    let series_branch =
        fox_wright(&params, -z, &cfg.series)?.value - c.eta * (-c.support_end * z).exp();
    let rhs = h
        .integrate_weighted(0.0, |t| (-z * t).exp(), &cfg.hfun)?
        .value;
    let tol = cfg.verify_tol;
    let near = |x: f64| (x - rhs).abs() <= tol * (1.0 + rhs.abs());
    let stated_matches = near(lhs_stated);
    let derived_matches = near(lhs_derived);
    let verified_branch = match (stated_matches, derived_matches) {
        (true, false) => Some("stated".to_string()),
        (false, true) => Some("derived".to_string()),
        _ => None,
    };
    Ok(FiniteLaplaceReport {
        z,
        lhs_stated,
        lhs_derived,
        series_branch,
        rhs,
        stated_matches,
        derived_matches,
        series_matches: near(series_branch),
        verified_branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourParamReport {
    pub m: usize,
    pub series: f64,
    pub representation: f64,
    pub record: IdentityRecord,
}

/// Four-parameter Wright function through the integral representation, for `μ1 + ν1 = 1` with
/// `a + b = 3/2` (μ = 0) or `a + b = 1/2` (μ = -1).
pub fn four_param_representation(
    mu1: f64,
    a: f64,
    nu1: f64,
    b: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<FourParamReport> {
    const TOL: f64 = 1e-9;
    if !(mu1 > 0.0 && nu1 > 0.0) {
        return Err(FoxError::Constraint(format!(
            "scales must be positive, got mu1 = {mu1}, nu1 = {nu1}"
        )));
    }
    let unit = (mu1 + nu1 - 1.0).abs() <= TOL;
    let m = if unit && (a + b - 1.5).abs() <= TOL {
        0
    } else if unit && (a + b - 0.5).abs() <= TOL {
        1
    } else {
        return Err(FoxError::Constraint(format!(
            "need mu1 + nu1 = 1 with a + b in {{3/2, 1/2}}; got mu1 + nu1 = {}, a + b = {}",
            mu1 + nu1,
            a + b
        )));
    };
    let params = ParameterSet::new([(1.0, 1.0)], [(a, mu1), (b, nu1)])?;
    let representation = eval_via_representation(&params, z, cfg)?.value;
    let series = series::four_param_wright(mu1, a, nu1, b, z, &cfg.series)?.value;
    let record = IdentityRecord::new(
        "four-parameter",
        &params,
        z,
        representation,
        series,
        cfg.verify_tol,
    );
    Ok(FourParamReport {
        m,
        series,
        representation,
        record,
    })
}
