//! One function per subcommand: each maps a grid to report rows and records
//! numerical failures per row instead of aborting.

use std::cell::Cell;

use foxwright::bounds::MONOTONE_TOL;
use foxwright::hfun::{atomic_moment, default_scan_grid, nonneg_scan_with};
use foxwright::repr::{atom_stieltjes, eval_with, stieltjes_with};
use foxwright::{
    cm_check, correction_series, derive_constants, fox_wright, gamma_ratio, laplace_lift_check,
    BoundsReport, EvalStatus, FoxError, HFunction, HfunEvalConfig, HfunMethod, IdentityRecord,
    InequalityLab, ParameterSet, ReprConfig, Row,
};

pub struct Context {
    params: ParameterSet,
    hash: String,
    cfg: ReprConfig,
}

impl Context {
    pub fn new(params: ParameterSet, tol: f64) -> Self {
        let cfg = ReprConfig {
            verify_tol: tol,
            ..ReprConfig::default()
        };
        Context {
            hash: params.params_hash(),
            params,
            cfg,
        }
    }

    fn error(&self, command: &str, z: f64, e: &FoxError) -> Row {
        Row::error(command, &self.hash, z, &e.to_string())
    }

    fn record(&self, command: &str, rec: &IdentityRecord) -> Row {
        Row::verdict(command, &self.hash, rec.z, &rec.verdict, rec.verified())
            .with_errors(rec.abs_err, rec.rel_err)
            .with_note(format!("lhs={} rhs={}", rec.lhs, rec.rhs))
    }

    /// Same row for every grid point when setup fails.
    fn error_rows(&self, command: &str, grid: &[f64], e: &FoxError) -> Vec<Row> {
        grid.iter().map(|&z| self.error(command, z, e)).collect()
    }
}

pub fn eval(ctx: &Context, grid: &[f64]) -> Vec<Row> {
    const CMD: &str = "eval";
    grid.iter()
        .map(|&z| match fox_wright(&ctx.params, z, &ctx.cfg.series) {
            Ok(r) => {
                let mut row = Row::value(CMD, &ctx.hash, z, r.value).with_note(format!(
                    "terms={} trunc={:e}",
                    r.terms_used, r.trunc_estimate
                ));
                if r.status != EvalStatus::Converged {
                    row.status = foxwright::RowStatus::Failed;
                }
                row
            }
            Err(e) => ctx.error(CMD, z, &e),
        })
        .collect()
}

pub fn hfun(ctx: &Context, grid: &[f64], method: HfunMethod) -> Vec<Row> {
    const CMD: &str = "hfun";
    let h = match HFunction::new(&ctx.params) {
        Ok(h) => h,
        Err(e) => return ctx.error_rows(CMD, grid, &e),
    };
    let cfg = HfunEvalConfig::with_method(method);
    grid.iter()
        .map(|&t| match h.value(t, &cfg) {
            Ok(r) => {
                let mut row = Row::value(CMD, &ctx.hash, t, r.value).with_note(format!(
                    "terms={} trunc={:e}",
                    r.terms_used, r.trunc_estimate
                ));
                if r.status != EvalStatus::Converged {
                    row.status = foxwright::RowStatus::Failed;
                }
                row
            }
            Err(e) => ctx.error(CMD, t, &e),
        })
        .collect()
}

pub fn moments(ctx: &Context, ks: &[f64]) -> Vec<Row> {
    const CMD: &str = "moments";
    let h = match HFunction::new(&ctx.params) {
        Ok(h) => h,
        Err(e) => return ctx.error_rows(CMD, ks, &e),
    };
    ks.iter()
        .map(|&k| {
            let parts = gamma_ratio(&ctx.params, k)
                .and_then(|g| h.moment(k, &ctx.cfg.hfun).map(|m| (g, m)));
            match parts {
                Ok((g, moment)) => {
                    let atomic = atomic_moment(&h, k);
                    let abs = (g - moment - atomic).abs();
                    let rel = abs / (1.0 + g.abs());
                    let ok = rel <= ctx.cfg.verify_tol;
                    let verdict = if ok { "verified" } else { "mismatch" };
                    Row::verdict(CMD, &ctx.hash, k, verdict, ok)
                        .with_errors(abs, rel)
                        .with_note(format!("gamma_ratio={g} moment={moment} atomic={atomic}"))
                }
                Err(e) => ctx.error(CMD, k, &e),
            }
        })
        .collect()
}

pub fn verify_representation(ctx: &Context, grid: &[f64]) -> Vec<Row> {
    const CMD: &str = "verify-representation";
    let h = match HFunction::new(&ctx.params) {
        Ok(h) => h,
        Err(e) => return ctx.error_rows(CMD, grid, &e),
    };
    grid.iter()
        .map(|&z| {
            let rec = eval_with(&h, z, &ctx.cfg).and_then(|lhs| {
                let rhs = fox_wright(&ctx.params, z, &ctx.cfg.series)?;
                Ok(IdentityRecord::new(
                    "representation",
                    &ctx.params,
                    z,
                    lhs.value,
                    rhs.value,
                    ctx.cfg.verify_tol,
                ))
            });
            match rec {
                Ok(rec) => ctx.record(CMD, &rec),
                Err(e) => ctx.error(CMD, z, &e),
            }
        })
        .collect()
}

pub fn verify_stieltjes(ctx: &Context, grid: &[f64], sigma: f64) -> Vec<Row> {
    const CMD: &str = "verify-stieltjes";
    let prepared = HFunction::new(&ctx.params)
        .and_then(|h| ctx.params.lifted(sigma).map(|lifted| (h, lifted)));
    let (h, lifted) = match prepared {
        Ok(p) => p,
        Err(e) => return ctx.error_rows(CMD, grid, &e),
    };
    let c = *h.constants();
    grid.iter()
        .map(|&z| {
            let rec = stieltjes_with(&h, sigma, 0.0, z, &ctx.cfg).and_then(|quad| {
                let series = fox_wright(&lifted, -z, &ctx.cfg.series)?.value;
                let rhs = series - atom_stieltjes(c.eta, c.support_end, sigma, z)?;
                Ok(IdentityRecord::new(
                    "stieltjes",
                    &ctx.params,
                    z,
                    quad.value,
                    rhs,
                    ctx.cfg.verify_tol,
                ))
            });
            match rec {
                Ok(rec) => ctx
                    .record(CMD, &rec)
                    .with_note(format!("sigma={sigma} lhs={} rhs={}", rec.lhs, rec.rhs)),
                Err(e) => ctx.error(CMD, z, &e),
            }
        })
        .collect()
}

pub fn verify_laplace(ctx: &Context, grid: &[f64], lambda: f64) -> Vec<Row> {
    const CMD: &str = "verify-laplace";
    grid.iter()
        .map(
            |&z| match laplace_lift_check(&ctx.params, lambda, z, &ctx.cfg) {
                Ok(rec) => ctx
                    .record(CMD, &rec)
                    .with_note(format!("lambda={lambda} lhs={} rhs={}", rec.lhs, rec.rhs)),
                Err(e) => ctx.error(CMD, z, &e),
            },
        )
        .collect()
}

fn bound_row(ctx: &Context, z: f64, label: &str, r: &BoundsReport) -> Row {
    let (verdict, ok) = if !r.hypothesis_nonneg {
        ("hypothesis-unmet", false)
    } else if r.lower_ok && r.upper_ok {
        ("holds", true)
    } else {
        ("violated", false)
    };
    Row::verdict("bounds", &ctx.hash, z, verdict, ok).with_note(format!(
        "{label}: lower={} value={} upper={}",
        r.lower, r.value, r.upper
    ))
}

pub fn bounds(ctx: &Context, grid: &[f64], lambda: Option<f64>, sigma: Option<f64>) -> Vec<Row> {
    const CMD: &str = "bounds";
    let lab = match InequalityLab::new(&ctx.params, &ctx.cfg) {
        Ok(lab) => lab,
        Err(e) => return ctx.error_rows(CMD, grid, &e),
    };
    let mut rows = Vec::new();
    for &z in grid {
        rows.push(match lab.km1(z) {
            Ok(r) => bound_row(ctx, z, "exponential", &r),
            Err(e) => ctx.error(CMD, z, &e),
        });
        if let Some(lambda) = lambda {
            rows.push(match lab.lifted(lambda, z) {
                Ok(r) => bound_row(ctx, z, &format!("lifted lambda={lambda}"), &r),
                Err(e) => ctx.error(CMD, z, &e),
            });
        }
        if let Some(sigma) = sigma {
            rows.push(match lab.sigma_lower(sigma, z) {
                Ok(r) => {
                    let (verdict, ok) = if !r.hypothesis_nonneg {
                        ("hypothesis-unmet", false)
                    } else if r.holds {
                        ("holds", true)
                    } else {
                        ("violated", false)
                    };
                    Row::verdict(CMD, &ctx.hash, z, verdict, ok).with_note(format!(
                        "sigma={sigma}: lower={} value={}",
                        r.lower, r.value
                    ))
                }
                Err(e) => ctx.error(CMD, z, &e),
            });
        }
    }
    rows
}

/// Checks `z ↦ Psi(-z) - (atomic series at -z)`, the Laplace transform of `H(t)/t`.
pub fn cm(ctx: &Context, grid: &[f64], h: f64, max_order: usize) -> Vec<Row> {
    const CMD: &str = "cm-check";
    let at = grid.first().copied().unwrap_or(0.0);
    let m = match derive_constants(&ctx.params).require_m() {
        Ok(m) => m,
        Err(e) => return vec![ctx.error(CMD, at, &e)],
    };
    let failure: Cell<Option<FoxError>> = Cell::new(None);
    let max_abs = Cell::new(0.0f64);
    let f = |x: f64| {
        let v = fox_wright(&ctx.params, -x, &ctx.cfg.series)
            .and_then(|r| Ok(r.value - correction_series(&ctx.params, m, -x)?));
        let v = v.unwrap_or_else(|e| {
            failure.set(Some(e));
            f64::NAN
        });
        max_abs.set(max_abs.get().max(v.abs()));
        v
    };
    let report = match cm_check(f, grid, h, max_order) {
        Ok(r) => r,
        Err(e) => return vec![ctx.error(CMD, at, &e)],
    };
    if let Some(e) = failure.take() {
        return vec![ctx.error(CMD, at, &e)];
    }
    let hypothesis = HFunction::new(&ctx.params)
        .and_then(|hf| {
            let grid = default_scan_grid(hf.support_end(), foxwright::bounds::HYPOTHESIS_GRID);
            nonneg_scan_with(&hf, &grid, &ctx.cfg.hfun)
        })
        .map(|s| s.nonneg.to_string())
        .unwrap_or_else(|e| format!("unavailable ({e})"));
    let row = match &report.first_violation {
        None => Row::verdict(CMD, &ctx.hash, at, "completely-monotone", true).with_note(format!(
            "orders 0..={} passed; max|f|={:e}; H>=0 scan {hypothesis}",
            report.orders_checked.saturating_sub(1),
            max_abs.get()
        )),
        Some(v) => Row::verdict(CMD, &ctx.hash, v.x, "violated", false).with_note(format!(
            "order {} signed difference {:e} below -{:e}; max|f|={:e}; H>=0 scan {hypothesis}",
            v.order,
            v.signed_difference,
            v.tolerance,
            max_abs.get()
        )),
    };
    vec![row]
}

pub fn ratio_scan(ctx: &Context, grid: &[f64], sigma: f64, delta: f64) -> Vec<Row> {
    const CMD: &str = "ratio-scan";
    let lab = match InequalityLab::new(&ctx.params, &ctx.cfg) {
        Ok(lab) => lab,
        Err(e) => return ctx.error_rows(CMD, grid, &e),
    };
    let expected = if delta > 0.0 {
        "increasing"
    } else {
        "decreasing"
    };
    let hypothesis = lab.hypothesis_nonneg();
    let mut prev: Option<f64> = None;
    grid.iter()
        .map(|&z| match lab.ratio_f(sigma, delta, z) {
            Ok(r) => {
                let step = prev.map_or(0.0, |p| r.route_i - p);
                let against = if delta > 0.0 { -step } else { step };
                prev = Some(r.route_i);
                let mut row = Row::value(CMD, &ctx.hash, z, r.route_i)
                    .with_errors((r.route_i - r.route_ii).abs(), r.rel_diff)
                    .with_note(format!(
                        "route_ii={} expected {expected}; H>=0 scan {hypothesis}",
                        r.route_ii
                    ));
                if against > MONOTONE_TOL || r.rel_diff > ctx.cfg.verify_tol || !hypothesis {
                    row.status = foxwright::RowStatus::Failed;
                }
                row
            }
            Err(e) => ctx.error(CMD, z, &e),
        })
        .collect()
}
