//! Two-sided bounds, complete-monotonicity checks and the ratio-function scan.

use serde::Serialize;

use crate::error::{FoxError, Result};
use crate::hfun::{default_scan_grid, nonneg_scan_with, HFunction, NonnegReport};
use crate::params::{derive_constants, gamma_ratio, ParameterSet};
use crate::repr::{atom_stieltjes, lifted_at_neg, stieltjes_with, ReprConfig};
use crate::series::fox_wright;
use crate::special;

/// Interior points used for the `H ≥ 0` hypothesis scan.
pub const HYPOTHESIS_GRID: usize = 64;
/// `Ψ0` at or below this is treated as zero mass.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Slack allowed when comparing a bound against the value.
const COMPARE_TOL: f64 = 1e-12;
pub const MONOTONE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub psi0: f64,
    pub psi1: f64,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub hypothesis_nonneg: bool,
    /// Only true when the hypothesis holds and `lower ≤ value`.
    pub lower_ok: bool,
    /// Only true when the hypothesis holds and `value ≤ upper`.
    pub upper_ok: bool,
    pub lower_margin: f64,
    pub upper_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaBoundReport {
    pub sigma: f64,
    pub z: f64,
    pub lower: f64,
    pub value: f64,
    pub hypothesis_nonneg: bool,
    pub holds: bool,
    pub margin: f64,
    /// `Γ(σ) Ψ0^{1-σ} S1^σ` of the Jensen step.
    pub jensen_lhs: f64,
    /// Lifted value minus its atom term.
    pub jensen_rhs: f64,
    /// "le" for σ ≥ 1 (convex power), "ge" for σ < 1.
    pub jensen_direction: String,
    pub jensen_ok: bool,
}

/// Prepared bound computations for one `μ = 0` parameter set.
#[derive(Debug)]
pub struct InequalityLab {
    h: HFunction,
    cfg: ReprConfig,
    pub psi0: f64,
    pub psi1: f64,
    pub eta: f64,
    pub support_end: f64,
    pub scan: NonnegReport,
}

impl InequalityLab {
    pub fn new(params: &ParameterSet, cfg: &ReprConfig) -> Result<Self> {
        let h = HFunction::new(params)?;
        if h.m() != 0 {
            return Err(FoxError::Hypothesis(format!(
                "bounds need mu = 0, got mu = -{}",
                h.m()
            )));
        }
        let c = *h.constants();
        let psi0 = gamma_ratio(params, 0.0)? - c.eta;
        let psi1 = gamma_ratio(params, 1.0)? - c.eta * c.support_end;
        let grid = default_scan_grid(c.support_end, HYPOTHESIS_GRID);
        let scan = nonneg_scan_with(&h, &grid, &cfg.hfun)?;
        Ok(InequalityLab {
            h,
            cfg: *cfg,
            psi0,
            psi1,
            eta: c.eta,
            support_end: c.support_end,
            scan,
        })
    }

    pub fn hypothesis_nonneg(&self) -> bool {
        self.scan.nonneg
    }

    fn require_mass(&self) -> Result<()> {
        if self.psi0 <= DEGENERATE_TOL {
            return Err(FoxError::Degenerate(format!(
                "Psi0 = {} leaves no mass for the Jensen bound",
                self.psi0
            )));
        }
        Ok(())
    }

    fn report(&self, lower: f64, upper: f64, value: f64) -> BoundsReport {
        let slack = COMPARE_TOL * (1.0 + value.abs());
        let hyp = self.hypothesis_nonneg();
        BoundsReport {
            psi0: self.psi0,
            psi1: self.psi1,
            lower,
            upper,
            value,
            hypothesis_nonneg: hyp,
            lower_ok: hyp && lower <= value + slack,
            upper_ok: hyp && value <= upper + slack,
            lower_margin: value - lower,
            upper_margin: upper - value,
        }
    }

    /// Sandwich for `Psi(-z)`, `z ≥ 0`.
    pub fn km1(&self, z: f64) -> Result<BoundsReport> {
        self.require_mass()?;
        if z < 0.0 {
            return Err(FoxError::Domain(format!("z = {z} must be non-negative")));
        }
        let r = self.support_end;
        let ratio = self.psi1 / self.psi0;
        let atom = (-r * z).exp();
        let lower = self.psi0 * (-ratio * z).exp() + self.eta * atom;
        let upper = (self.psi0 - self.psi1 / r) + (self.eta + self.psi1 / r) * atom;
        let value = fox_wright(self.h.params(), -z, &self.cfg.series)?.value;
        Ok(self.report(lower, upper, value))
    }

    /// Sandwich for the λ-lifted function at `-z`.
    pub fn lifted(&self, lambda: f64, z: f64) -> Result<BoundsReport> {
        self.require_mass()?;
        if !(lambda > 0.0) || z < 0.0 {
            return Err(FoxError::Domain(format!(
                "need lambda > 0 and z >= 0, got lambda = {lambda}, z = {z}"
            )));
        }
        let r = self.support_end;
        let g = special::gamma(lambda)?;
        let ratio = self.psi1 / self.psi0;
        let kernel = (1.0 + r * z).powf(-lambda);
        let lower = self.eta * g * kernel + self.psi0 * g * (1.0 + ratio * z).powf(-lambda);
        let upper = g * (self.psi0 - self.psi1 / r) + g * (self.eta + self.psi1 / r) * kernel;
        let value = lifted_at_neg(&self.h, lambda, z, &self.cfg)?;
        Ok(self.report(lower, upper, value))
    }

    pub fn sigma_lower(&self, sigma: f64, z: f64) -> Result<SigmaBoundReport> {
        self.require_mass()?;
        if !(sigma > 0.0) || z < 0.0 {
            return Err(FoxError::Domain(format!(
                "need sigma > 0 and z >= 0, got sigma = {sigma}, z = {z}"
            )));
        }
        let g = special::gamma(sigma)?;
        let ratio = self.psi1 / self.psi0;
        let atom_sigma = atom_stieltjes(self.eta, self.support_end, sigma, z)?;
        let lower = g * self.psi0 * (1.0 + ratio * z).powf(-sigma) + atom_sigma;
        let value = lifted_at_neg(&self.h, sigma, z, &self.cfg)?;
        let s1 = lifted_at_neg(&self.h, 1.0, z, &self.cfg)?
            - atom_stieltjes(self.eta, self.support_end, 1.0, z)?;
        let jensen_lhs = g * self.psi0.powf(1.0 - sigma) * s1.max(0.0).powf(sigma);
        let jensen_rhs = value - atom_sigma;
        let slack = COMPARE_TOL * (1.0 + value.abs());
        let hyp = self.hypothesis_nonneg();
        let convex = sigma >= 1.0;
        let jensen_ok = hyp
            && if convex {
                jensen_lhs <= jensen_rhs + slack
            } else {
                jensen_lhs + slack >= jensen_rhs
            };
        Ok(SigmaBoundReport {
            sigma,
            z,
            lower,
            value,
            hypothesis_nonneg: hyp,
            holds: hyp && lower <= value + slack,
            margin: value - lower,
            jensen_lhs,
            jensen_rhs,
            jensen_direction: if convex { "le" } else { "ge" }.to_string(),
            jensen_ok,
        })
    }

    /// `F(σ, δ; z)` by the series route (i) and the quadrature route (ii).
    pub fn ratio_f(&self, sigma: f64, delta: f64, z: f64) -> Result<RatioF> {
        if !(sigma > 0.0) {
            return Err(FoxError::Domain(format!(
                "sigma = {sigma} must be positive"
            )));
        }
        if !(z > 0.0 && z < 1.0) {
            return Err(FoxError::Domain(format!("z = {z} must lie in (0, 1)")));
        }
        let params = self.h.params();
        let shifted = params.shifted(delta)?;
        let h_shift = HFunction::new(&shifted)?;
        let eta_shift = derive_constants(&shifted).eta;
        let r = self.support_end;
        let num_i =
            lifted_at_neg(&h_shift, sigma, z, &self.cfg)? - atom_stieltjes(eta_shift, r, sigma, z)?;
        let den_i =
            lifted_at_neg(&self.h, sigma, z, &self.cfg)? - atom_stieltjes(self.eta, r, sigma, z)?;
        let num_ii = stieltjes_with(&self.h, sigma, delta, z, &self.cfg)?.value;
        let den_ii = stieltjes_with(&self.h, sigma, 0.0, z, &self.cfg)?.value;
        for d in [den_i, den_ii] {
            if d.abs() < 1e-14 {
                return Err(FoxError::Division(d));
            }
        }
        let route_i = num_i / den_i;
        let route_ii = num_ii / den_ii;
        Ok(RatioF {
            z,
            route_i,
            route_ii,
            rel_diff: (route_i - route_ii).abs() / route_ii.abs(),
        })
    }

    pub fn ratio_f_scan(&self, sigma: f64, delta: f64, grid: &[f64]) -> Result<MonotoneReport> {
        let rows = grid
            .iter()
            .map(|&z| self.ratio_f(sigma, delta, z))
            .collect::<Result<Vec<_>>>()?;
        let increasing = delta > 0.0;
        let max_violation = rows
            .windows(2)
            .map(|w| {
                let step = w[1].route_i - w[0].route_i;
                if increasing {
                    -step
                } else {
                    step
                }
            })
            .fold(0.0, f64::max);
        let max_route_gap = rows.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
        Ok(MonotoneReport {
            sigma,
            delta,
            expected: if increasing {
                "increasing"
            } else {
                "decreasing"
            }
            .to_string(),
            max_violation,
            monotone: max_violation <= MONOTONE_TOL,
            max_route_gap,
            hypothesis_nonneg: self.hypothesis_nonneg(),
            rows,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioF {
    pub z: f64,
    pub route_i: f64,
    pub route_ii: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub sigma: f64,
    pub delta: f64,
    pub expected: String,
    /// Largest step against the expected direction (0 if none).
    pub max_violation: f64,
    pub monotone: bool,
    pub max_route_gap: f64,
    pub hypothesis_nonneg: bool,
    pub rows: Vec<RatioF>,
}

pub fn km1_bounds(params: &ParameterSet, z: f64, cfg: &ReprConfig) -> Result<BoundsReport> {
    InequalityLab::new(params, cfg)?.km1(z)
}

pub fn lifted_bounds(
    params: &ParameterSet,
    lambda: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<BoundsReport> {
    InequalityLab::new(params, cfg)?.lifted(lambda, z)
}

pub fn sigma_lower_bound(
    params: &ParameterSet,
    sigma: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<SigmaBoundReport> {
    InequalityLab::new(params, cfg)?.sigma_lower(sigma, z)
}

pub fn ratio_f(
    params: &ParameterSet,
    sigma: f64,
    delta: f64,
    z: f64,
    cfg: &ReprConfig,
) -> Result<RatioF> {
    InequalityLab::new(params, cfg)?.ratio_f(sigma, delta, z)
}

pub fn ratio_f_monotonicity_scan(
    params: &ParameterSet,
    sigma: f64,
    delta: f64,
    grid: &[f64],
    cfg: &ReprConfig,
) -> Result<MonotoneReport> {
    InequalityLab::new(params, cfg)?.ratio_f_scan(sigma, delta, grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmViolation {
    pub order: usize,
    pub x: f64,
    /// `(-1)^n Δ_h^n f(x) / h^n`
    pub signed_difference: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub orders_checked: usize,
    pub points: usize,
    pub first_violation: Option<CmViolation>,
    pub passed: bool,
}

pub const MAX_CM_ORDER: usize = 8;

/// Finite-difference test of `(-1)^n f^{(n)} ≥ 0` for `n = 0..=max_order`.
///
/// Order `n` uses the forward divided difference `Δ_h^n f(x) / h^n` and
/// accepts values down to `-1e-7 (2/h)^n max|f|`.
pub fn cm_check<F: Fn(f64) -> f64>(
    f: F,
    grid: &[f64],
    h: f64,
    max_order: usize,
) -> Result<CmReport> {
    if !(h > 0.0) || max_order > MAX_CM_ORDER {
        return Err(FoxError::InvalidParameters(format!(
            "need h > 0 and max_order <= {MAX_CM_ORDER}"
        )));
    }
    if grid.iter().any(|x| !(*x > 0.0)) {
        return Err(FoxError::Domain("grid must lie in (0, inf)".into()));
    }
    let samples: Vec<Vec<f64>> = grid
        .iter()
        .map(|&x| (0..=max_order).map(|j| f(x + j as f64 * h)).collect())
        .collect();
    let max_abs = samples
        .iter()
        .flatten()
        .fold(0.0, |a: f64, v| a.max(v.abs()));
    for order in 0..=max_order {
        let eps = 1e-7 * (2.0 / h).powi(order as i32) * max_abs;
        for (x, vals) in grid.iter().zip(&samples) {
            let mut diff = 0.0;
            let mut binom = 1.0;
            for (j, v) in vals.iter().enumerate().take(order + 1) {
                let sign = if (order - j) % 2 == 0 { 1.0 } else { -1.0 };
                diff += sign * binom * v;
                binom = binom * (order - j) as f64 / (j + 1) as f64;
            }
            let signed = if order % 2 == 0 { diff } else { -diff } / h.powi(order as i32);
            if signed < -eps {
                return Ok(CmReport {
                    orders_checked: order + 1,
                    points: grid.len(),
                    first_violation: Some(CmViolation {
                        order,
                        x: *x,
                        signed_difference: signed,
                        tolerance: eps,
                    }),
                    passed: false,
                });
            }
        }
    }
    Ok(CmReport {
        orders_checked: max_order + 1,
        points: grid.len(),
        first_violation: None,
        passed: true,
    })
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::named::*;

    fn cfg() -> ReprConfig {
        ReprConfig::default()
    }

    #[test]
    fn bounds_collapse_at_origin() {
        let lab = InequalityLab::new(&set_c(), &cfg()).unwrap();
        let g0 = gamma_ratio(&set_c(), 0.0).unwrap();
        let r = lab.km1(0.0).unwrap();
        for v in [r.lower, r.upper, r.value] {
            assert!((v - g0).abs() < 1e-12);
        }
        let r = lab.lifted(2.0, 0.0).unwrap();
        for v in [r.lower, r.upper, r.value] {
            assert!((v - g0).abs() < 1e-12);
        }
        let s = lab.sigma_lower(3.0, 0.0).unwrap();
        assert!((s.lower - 2.0 * g0).abs() < 1e-12 && (s.value - 2.0 * g0).abs() < 1e-12);
    }

    #[test]
    fn set_c_sandwich() {
        let lab = InequalityLab::new(&set_c(), &cfg()).unwrap();
        assert!(lab.hypothesis_nonneg());
        let r = lab.km1(1.0).unwrap();
        assert!(r.lower_ok && r.upper_ok, "{r:?}");
        let r = lab.lifted(1.0, 0.5).unwrap();
        assert!(r.lower_ok && r.upper_ok, "{r:?}");
        let s = lab.sigma_lower(0.5, 0.3).unwrap();
        assert!(s.holds && s.jensen_ok, "{s:?}");
    }

    #[test]
    fn psi_values_of_set_c() {
        let lab = InequalityLab::new(&set_c(), &cfg()).unwrap();
        let pi = std::f64::consts::PI;
        assert!((lab.psi0 - (pi / 2.0 - 1.0)).abs() < 1e-14);
        assert!((lab.psi1 - (4.0 / pi - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn set_a_is_degenerate() {
        assert!(matches!(
            km1_bounds(&set_a(), 1.0, &cfg()),
            Err(FoxError::Degenerate(_))
        ));
        assert!(matches!(
            km1_bounds(&set_b(), 1.0, &cfg()),
            Err(FoxError::Hypothesis(_))
        ));
    }

    #[test]
    fn ratio_routes_agree() {
        let lab = InequalityLab::new(&set_c(), &cfg()).unwrap();
        for (sigma, delta, z) in [(1.0, 1.0, 0.5), (2.0, -0.5, 0.2)] {
            let f = lab.ratio_f(sigma, delta, z).unwrap();
            assert!(f.rel_diff < 1e-6, "{f:?}");
        }
        let f = lab.ratio_f(1.0, 1e-9, 0.5).unwrap();
        assert!((f.route_i - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ratio_slope_is_a_negative_covariance() {
        // F(z) = E_p[t^δ] with p ∝ H(t) t^{-1} (1+tz)^{-σ}, so
        // dF/dz = -σ Cov_p(t^δ, t/(1+tz)) has the sign of -δ.
        let lab = InequalityLab::new(&set_c(), &cfg()).unwrap();
        for delta in [1.0, -0.5] {
            let lo = lab.ratio_f(1.0, delta, 0.3).unwrap().route_ii;
            let hi = lab.ratio_f(1.0, delta, 0.7).unwrap().route_ii;
            assert!((hi - lo) * delta < 0.0, "delta={delta}: {lo} -> {hi}");
        }
    }

    #[test]
    fn cm_examples() {
        let grid = log_grid(0.01, 10.0, 30);
        assert!(
            cm_check(|x: f64| (-x).exp(), &grid, 0.05, 6)
                .unwrap()
                .passed
        );
        assert!(
            cm_check(|x: f64| 1.0 / (1.0 + x), &grid, 0.05, 6)
                .unwrap()
                .passed
        );
        let r = cm_check(|x| x, &grid, 0.05, 6).unwrap();
        assert_eq!(r.first_violation.unwrap().order, 1);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let r = cm_check(
            |x: f64| ((-2.0 * x).exp() - (-0.5 * x).exp()) / sqrt_pi,
            &grid,
            0.05,
            6,
        )
        .unwrap();
        assert_eq!(r.first_violation.unwrap().order, 0);
        assert!(cm_check(|x| x, &[0.0], 0.1, 2).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 10.0, 30);
        assert_eq!(g.len(), 30);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[29] - 10.0).abs() < 1e-12);
    }
}
