//! The representing density `H^{p,0}_{q,p}(t)` on `(0, R)` and its Mellin moments.
//!
//! Two independent evaluators are provided: the residue series over the
//! numerator gamma poles, and a Mellin–Barnes integral along a vertical line
//! with the large-`|s|` behaviour of the gamma ratio subtracted.

use std::cell::Cell;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FoxError, Result};
use crate::params::{
    correction_coeffs, derive_constants, gamma_ratio, ln_gamma_ratio_complex, DerivedConstants,
    ParameterSet,
};
use crate::quad::{self, gk15_panel, QuadResult};
use crate::series::{EvalResult, EvalStatus};
use crate::special::{self, SignedLog};

/// Poles closer than this are summed together by a Cauchy integral.
const CLUSTER_GAP: f64 = 1e-3;
/// Points on each cluster circle.
const CIRCLE_POINTS: usize = 64;
const MIN_SHELLS: usize = 4;
const STOP_SHELLS: usize = 3;
/// Extra asymptotic terms subtracted from the contour integrand.
const EXTRA_TERMS: usize = 8;
const MAX_CONTOUR_PANELS: usize = 4096;
/// `Auto` switches to the contour above this fraction of the support end.
pub const AUTO_SWITCH: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HfunMethod {
    ResidueSeries,
    RegularizedContour,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfunEvalConfig {
    pub method: HfunMethod,
    /// Abscissa `c` of the vertical contour; `None` picks `max(γ, 0) + 1`.
    pub contour_abscissa: Option<f64>,
    /// Fixed cutoff `T`; `None` extends the integral until the tail is negligible.
    pub contour_cutoff: Option<f64>,
    pub max_residue_terms: usize,
    pub tol: f64,
}

impl Default for HfunEvalConfig {
    fn default() -> Self {
        HfunEvalConfig {
            method: HfunMethod::Auto,
            contour_abscissa: None,
            contour_cutoff: None,
            max_residue_terms: 20_000,
            tol: 1e-12,
        }
    }
}

impl HfunEvalConfig {
    pub fn with_method(method: HfunMethod) -> Self {
        HfunEvalConfig {
            method,
            ..Self::default()
        }
    }

    fn validate(&self, gamma: f64) -> Result<()> {
        if let Some(c) = self.contour_abscissa {
            if !(c > gamma && c > 0.0) {
                return Err(FoxError::InvalidParameters(format!(
                    "contour abscissa {c} must exceed max(gamma, 0) = {}",
                    gamma.max(0.0)
                )));
            }
        }
        if let Some(t) = self.contour_cutoff {
            if !(t > 0.0) {
                return Err(FoxError::InvalidParameters(format!(
                    "contour cutoff {t} must be positive"
                )));
            }
        }
        if !(self.tol > 0.0) || self.max_residue_terms == 0 {
            return Err(FoxError::InvalidParameters(
                "tol and max_residue_terms must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum ResidueTerm {
    /// `coef * t^x`
    Simple { x: f64, coef: SignedLog },
    /// `exp(ln_scale) * t^x * sum_j c_j (ln t)^j`
    Cluster { x: f64, ln_scale: f64, c: Vec<f64> },
}

impl ResidueTerm {
    fn x(&self) -> f64 {
        match self {
            ResidueTerm::Simple { x, .. } | ResidueTerm::Cluster { x, .. } => *x,
        }
    }

    fn eval(&self, ln_t: f64) -> f64 {
        match self {
            ResidueTerm::Simple { x, coef } => {
                if coef.is_zero() {
                    0.0
                } else {
                    coef.sign * (coef.ln_abs + x * ln_t).exp()
                }
            }
            ResidueTerm::Cluster { x, ln_scale, c } => {
                let poly = c.iter().rev().fold(0.0, |acc, cj| acc * ln_t + cj);
                if poly == 0.0 {
                    0.0
                } else {
                    poly * (ln_scale + x * ln_t).exp()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pole {
    x: f64,
    ladder: usize,
    n: u64,
}

#[derive(Default)]
struct ResidueCache {
    terms: Vec<ResidueTerm>,
    /// Every cluster whose first pole lies at or below this is in `terms`.
    covered: f64,
    started: bool,
}

struct ContourGrid {
    c: f64,
    h: f64,
    /// (tau, kronrod weight, gauss weight, G(c + i tau)) per node, panel by panel.
    nodes: Vec<(f64, f64, f64, Complex64)>,
    /// `sup |G|` on each panel.
    panel_max: Vec<f64>,
}

/// Prepared evaluator for one parameter set.
pub struct HFunction {
    params: ParameterSet,
    consts: DerivedConstants,
    m: usize,
    /// `l_0, ..., l_{m + extra}`
    l: Vec<f64>,
    extra: usize,
    ln_r: f64,
    residues: Mutex<ResidueCache>,
    grid: Mutex<Option<ContourGrid>>,
}

impl std::fmt::Debug for HFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HFunction")
            .field("params", &self.params)
            .field("m", &self.m)
            .finish()
    }
}

impl HFunction {
    pub fn new(params: &ParameterSet) -> Result<Self> {
        if !params.is_balanced() {
            return Err(FoxError::Hypothesis(
                "sum of upper scales must equal sum of lower scales".into(),
            ));
        }
        let consts = derive_constants(params);
        let m = consts.require_m()?;
        let full = correction_coeffs(params, m + EXTRA_TERMS)?.l_seq;
        // drop subtraction terms once the divergent tail of l_r takes off
        let mut extra = 0;
        while extra < EXTRA_TERMS && full[m + extra + 1].abs() <= 1e6 {
            extra += 1;
        }
        let l = full[..=m + extra].to_vec();
        Ok(HFunction {
            params: params.clone(),
            ln_r: consts.support_end.ln(),
            consts,
            m,
            l,
            extra,
            residues: Mutex::new(ResidueCache::default()),
            grid: Mutex::new(None),
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.consts
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Right end `R` of the support.
    pub fn support_end(&self) -> f64 {
        self.consts.support_end
    }

    pub fn default_abscissa(&self) -> f64 {
        self.consts.gamma_abscissa.max(0.0) + 1.0
    }

    pub fn value(&self, t: f64, cfg: &HfunEvalConfig) -> Result<EvalResult<f64>> {
        self.eval(t, cfg, true)
    }

    fn eval(&self, t: f64, cfg: &HfunEvalConfig, cross_check: bool) -> Result<EvalResult<f64>> {
        cfg.validate(self.consts.gamma_abscissa)?;
        let r = self.consts.support_end;
        if !(t > 0.0 && t < r) {
            return Err(FoxError::OutsideDomain { z: t, radius: r });
        }
        match cfg.method {
            HfunMethod::ResidueSeries => self.residue_series(t, cfg),
            HfunMethod::RegularizedContour => self.contour(t, cfg),
            HfunMethod::Auto if t <= AUTO_SWITCH * r => self.residue_series(t, cfg),
            HfunMethod::Auto => {
                let mut out = self.contour(t, cfg)?;
                if cross_check {
                    if let Ok(res) = self.residue_series(t, cfg) {
                        if res.is_converged() {
                            let diff = (res.value - out.value).abs();
                            out.trunc_estimate = out.trunc_estimate.max(diff);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    // ---- residue series -------------------------------------------------

    fn shell_width(&self) -> f64 {
        self.params
            .upper()
            .iter()
            .map(|p| 1.0 / p.scale)
            .fold(0.0, f64::max)
    }

    fn poles_up_to(&self, limit: f64) -> Vec<Pole> {
        let mut poles = Vec::new();
        for (j, p) in self.params.upper().iter().enumerate() {
            let mut n = 0u64;
            loop {
                let x = (p.shift + n as f64) / p.scale;
                if x > limit {
                    break;
                }
                poles.push(Pole { x, ladder: j, n });
                n += 1;
            }
        }
        poles.sort_by(|a, b| a.x.total_cmp(&b.x));
        poles
    }

    fn extend_residues(&self, cache: &mut ResidueCache) -> Result<()> {
        let w = self.shell_width();
        let lower_bound = if cache.started {
            cache.covered
        } else {
            f64::NEG_INFINITY
        };
        let start = if cache.started {
            cache.covered
        } else {
            self.params.min_upper_ratio()
        };
        let upto = start + 16.0 * w;
        let poles = self.poles_up_to(upto + 1.0 + w);
        let mut i = 0;
        while i < poles.len() {
            let mut j = i + 1;
            while j < poles.len() && poles[j].x - poles[j - 1].x < CLUSTER_GAP {
                j += 1;
            }
            let first = poles[i].x;
            if first > lower_bound && first <= upto {
                let left = if i > 0 {
                    poles[i - 1].x
                } else {
                    f64::NEG_INFINITY
                };
                let right = poles.get(j).map_or(f64::INFINITY, |p| p.x);
                let term = if j - i == 1 {
                    self.simple_residue(poles[i])?
                } else {
                    self.cluster_residue(&poles[i..j], left, right)?
                };
                cache.terms.push(term);
            }
            i = j;
        }
        cache.covered = upto;
        cache.started = true;
        Ok(())
    }

    /// `(-1)^n / (n! A_j) * prod_{i != j} Γ(α_i - A_i x) / prod_k Γ(β_k - B_k x)`
    fn simple_residue(&self, pole: Pole) -> Result<ResidueTerm> {
        let x = pole.x;
        let own = self.params.upper()[pole.ladder];
        let mut coef = SignedLog {
            ln_abs: -special::ln_gamma_real(pole.n as f64 + 1.0)?.ln_abs - own.scale.ln(),
            sign: if pole.n.is_multiple_of(2) { 1.0 } else { -1.0 },
        };
        for b in self.params.lower() {
            coef = coef * special::ln_rgamma_real(b.shift - b.scale * x)?;
            if coef.is_zero() {
                return Ok(ResidueTerm::Simple { x, coef });
            }
        }
        for (i, a) in self.params.upper().iter().enumerate() {
            if i != pole.ladder {
                coef = coef * special::ln_gamma_real(a.shift - a.scale * x)?;
            }
        }
        Ok(ResidueTerm::Simple { x, coef })
    }

    /// Combined residue of nearby poles via the trapezoidal rule on a circle.
    fn cluster_residue(&self, members: &[Pole], left: f64, right: f64) -> Result<ResidueTerm> {
        let xc = members.iter().map(|p| p.x).sum::<f64>() / members.len() as f64;
        let spread = members.iter().map(|p| (p.x - xc).abs()).fold(0.0, f64::max);
        let nearest = (xc - left).min(right - xc);
        let radius = (0.5 * nearest).min(0.5);
        if spread >= 0.25 * radius {
            return Err(FoxError::PoleCollision(xc));
        }
        let sc = -xc;
        let order = members.len() + 6;
        let mut ln_g = Vec::with_capacity(CIRCLE_POINTS);
        for k in 0..CIRCLE_POINTS {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
            let e = Complex64::from_polar(1.0, theta);
            ln_g.push((e, ln_gamma_ratio_complex(&self.params, sc + e * radius)?));
        }
        let ln_scale = ln_g
            .iter()
            .filter_map(|(_, v)| v.map(|v| v.re))
            .fold(f64::NEG_INFINITY, f64::max);
        if ln_scale == f64::NEG_INFINITY {
            return Ok(ResidueTerm::Simple {
                x: xc,
                coef: SignedLog::ZERO,
            });
        }
        let mut c = Vec::with_capacity(order);
        let mut fact = 1.0;
        for j in 0..order {
            if j > 0 {
                fact *= j as f64;
            }
            // (1/2πi)∮ g (s - s_c)^j ds = mean of g r^{j+1} e^{i(j+1)θ}
            let mut acc = Complex64::new(0.0, 0.0);
            for (e, v) in &ln_g {
                if let Some(v) = v {
                    acc += (v - ln_scale).exp() * e.powu(j as u32 + 1);
                }
            }
            let moment = acc.re * radius.powi(j as i32 + 1) / CIRCLE_POINTS as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            c.push(sign * moment / fact);
        }
        Ok(ResidueTerm::Cluster { x: xc, ln_scale, c })
    }

    fn residue_series(&self, t: f64, cfg: &HfunEvalConfig) -> Result<EvalResult<f64>> {
        let ln_t = t.ln();
        let w = self.shell_width();
        let x0 = self.params.min_upper_ratio();
        let mut cache = self.residues.lock().unwrap_or_else(|e| e.into_inner());
        let mut partial: f64 = 0.0;
        let mut shell_sum: f64 = 0.0;
        let mut shell = 0usize;
        let mut shells_done = 0usize;
        let mut run = 0usize;
        let mut prev = f64::INFINITY;
        let mut max_shell: f64 = 0.0;
        let mut idx = 0usize;
        loop {
            if idx >= cfg.max_residue_terms {
                return Err(FoxError::NonConvergent(format!(
                    "residue series at t = {t} not converged after {idx} poles"
                )));
            }
            while idx >= cache.terms.len() {
                self.extend_residues(&mut cache)?;
            }
            let term = &cache.terms[idx];
            let this_shell = ((term.x() - x0) / w).floor().max(0.0) as usize;
            while this_shell > shell {
                partial += shell_sum;
                let mag = shell_sum.abs();
                max_shell = max_shell.max(mag);
                let small = mag <= cfg.tol * partial.abs().max(max_shell) && mag <= prev;
                run = if small { run + 1 } else { 0 };
                prev = mag;
                shell_sum = 0.0;
                shell += 1;
                shells_done += 1;
                if run >= STOP_SHELLS && shells_done >= MIN_SHELLS {
                    return Ok(EvalResult {
                        value: partial,
                        terms_used: idx,
                        trunc_estimate: mag,
                        status: EvalStatus::Converged,
                    });
                }
            }
            let v = term.eval(ln_t);
            if !v.is_finite() {
                return Err(FoxError::NonConvergent(format!(
                    "residue term at x = {} overflowed",
                    term.x()
                )));
            }
            shell_sum += v;
            idx += 1;
        }
    }

    // ---- regularized contour -------------------------------------------

    /// `ratio(s) R^{-s} - η Σ_{r ≤ m + extra} l_r s^{m - r}`
    fn regular_part(&self, s: Complex64) -> Result<Complex64> {
        let g = match ln_gamma_ratio_complex(&self.params, s)? {
            Some(ln) => (ln - s * self.ln_r).exp(),
            None => Complex64::new(0.0, 0.0),
        };
        let inv = s.inv();
        let mut pow = s.powu(self.m as u32);
        let mut sub = Complex64::new(0.0, 0.0);
        for lr in &self.l {
            sub += pow * lr;
            pow *= inv;
        }
        Ok(g - sub * self.consts.eta)
    }

    fn build_panels(&self, grid: &mut ContourGrid, upto_panels: usize) -> Result<()> {
        while grid.panel_max.len() < upto_panels {
            let a = grid.panel_max.len() as f64 * grid.h;
            let nodes = gk15_panel(a, a + grid.h);
            let gauss = gauss_weights_for_panel(grid.h);
            let mut sup: f64 = 0.0;
            for (k, (tau, wk)) in nodes.iter().enumerate() {
                let g = self.regular_part(Complex64::new(grid.c, *tau))?;
                sup = sup.max(g.norm());
                grid.nodes.push((*tau, *wk, gauss[k], g));
            }
            grid.panel_max.push(sup);
        }
        Ok(())
    }

    fn contour(&self, t: f64, cfg: &HfunEvalConfig) -> Result<EvalResult<f64>> {
        let l_big = (self.consts.support_end / t).ln();
        let c = cfg
            .contour_abscissa
            .unwrap_or_else(|| self.default_abscissa());
        let h = if l_big <= 2.0 { 1.0 } else { 2.0 / l_big };
        let pref = (c * l_big).exp() / std::f64::consts::PI;
        let target = cfg.tol / 10.0;
        let decay = (self.extra as f64).max(1.0);

        let mut cached = self.grid.lock().unwrap_or_else(|e| e.into_inner());
        let mut local;
        let grid: &mut ContourGrid = match cached.as_mut() {
            Some(g) if g.c == c && g.h == h => g,
            _ if h == 1.0 && cfg.contour_abscissa.is_none() => {
                *cached = Some(ContourGrid {
                    c,
                    h,
                    nodes: Vec::new(),
                    panel_max: Vec::new(),
                });
                cached.as_mut().expect("just set")
            }
            _ => {
                local = ContourGrid {
                    c,
                    h,
                    nodes: Vec::new(),
                    panel_max: Vec::new(),
                };
                &mut local
            }
        };

        let panels = match cfg.contour_cutoff {
            Some(cut) => {
                let n = (cut / h).ceil() as usize;
                self.build_panels(grid, n)?;
                n
            }
            None => {
                let mut n = 4usize.max((4.0 / h).ceil() as usize);
                loop {
                    self.build_panels(grid, n)?;
                    let tail_g = grid.panel_max[n - 2..n]
                        .iter()
                        .fold(0.0, |a: f64, b| a.max(*b));
                    let tail = pref * tail_g * (n as f64 * h) / decay;
                    if tail <= target {
                        break n;
                    }
                    // rounding floor of the subtraction reached: further panels add only noise
                    let earlier = grid.panel_max[n / 2 - 2..n / 2]
                        .iter()
                        .fold(0.0, |a: f64, b| a.max(*b));
                    if n >= 16 && tail_g >= 0.25 * earlier {
                        break n;
                    }
                    if n >= MAX_CONTOUR_PANELS {
                        return Err(FoxError::NonConvergent(format!(
                            "contour tail {tail:e} at t = {t} after {n} panels"
                        )));
                    }
                    n = (2 * n).min(MAX_CONTOUR_PANELS);
                }
            }
        };

        let phase = |tau: f64| Complex64::from_polar(1.0, tau * l_big);
        let mut kron: f64 = 0.0;
        let mut gauss: f64 = 0.0;
        for (tau, wk, wg, g) in &grid.nodes[..15 * panels] {
            let v = (g * phase(*tau)).re;
            kron += wk * v;
            gauss += wg * v;
        }
        let mut atoms = 0.0;
        let mut fact = 1.0;
        for (i, lr) in self.l[self.m + 1..].iter().enumerate() {
            if i > 0 {
                fact *= i as f64;
            }
            atoms += lr * l_big.powi(i as i32) / fact;
        }
        let last = grid.panel_max[panels - 1] * h;
        Ok(EvalResult {
            value: pref * kron + self.consts.eta * atoms,
            terms_used: panels,
            trunc_estimate: pref * ((kron - gauss).abs() + last),
            status: EvalStatus::Converged,
        })
    }

    // ---- moments -----------------------------------------------------------

    /// `∫_0^R t^{k-1} H(t) dt`.
    pub fn moment(&self, k: f64, cfg: &HfunEvalConfig) -> Result<f64> {
        self.integrate_weighted(k, |_| 1.0, cfg).map(|r| r.value)
    }

    /// `∫_0^R t^{k-1} w(t) H(t) dt` for a weight bounded near 0.
    pub fn integrate_weighted<W: Fn(f64) -> f64>(
        &self,
        k: f64,
        weight: W,
        cfg: &HfunEvalConfig,
    ) -> Result<QuadResult> {
        let a = self.params.min_upper_ratio();
        if !(k + a > 0.0) {
            return Err(FoxError::Domain(format!(
                "integral of order {k} diverges at 0 (needs k + {a} > 0)"
            )));
        }
        let r = self.consts.support_end;
        let half = 0.5 * r;
        let abs_tol = 1e-12;
        let rel_tol = 1e-11;
        let failure: Cell<Option<FoxError>> = Cell::new(None);
        let h = |t: f64| -> f64 {
            match self.eval(t, cfg, false) {
                Ok(v) => v.value,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let p = k + a;
        // t = (R/2) w^{1/p} absorbs the t^{k-1+a} endpoint behaviour
        let left = |w: f64| -> f64 {
            let t = half * w.powf(1.0 / p);
            if t < 1e-300 {
                return 0.0;
            }
            t.powf(k) * weight(t) * h(t) / (p * w)
        };
        let right = |t: f64| -> f64 { t.powf(k - 1.0) * weight(t) * h(t) };
        let run = || -> Result<QuadResult> {
            let lhs = quad::integrate(left, 0.0, 1.0, abs_tol, rel_tol)?;
            let rhs = quad::integrate_pieces(right, &[half, AUTO_SWITCH * r, r], abs_tol, rel_tol)?;
            Ok(QuadResult {
                value: lhs.value + rhs.value,
                error: lhs.error + rhs.error,
                evaluations: lhs.evaluations + rhs.evaluations,
            })
        };
        let out = run();
        if let Some(e) = failure.take() {
            return Err(e);
        }
        out
    }
}

fn gauss_weights_for_panel(h: f64) -> [f64; 15] {
    // gk15_panel orders nodes as (-x0, +x0, -x1, +x1, ..., centre); Gauss uses odd i
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let half = 0.5 * h;
    let mut out = [0.0; 15];
    for i in 0..7 {
        if i % 2 == 1 {
            out[2 * i] = half * WG[i / 2];
            out[2 * i + 1] = half * WG[i / 2];
        }
    }
    out[14] = half * WG[3];
    out
}

pub fn hfun_value(params: &ParameterSet, t: f64, cfg: &HfunEvalConfig) -> Result<EvalResult<f64>> {
    HFunction::new(params)?.value(t, cfg)
}

pub fn hfun_moment(params: &ParameterSet, k: f64, cfg: &HfunEvalConfig) -> Result<f64> {
    HFunction::new(params)?.moment(k, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub k: f64,
    pub gamma_ratio: f64,
    pub moment: f64,
    pub atomic: f64,
    pub abs_err: f64,
    /// `abs_err / (1 + |gamma_ratio|)`
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub max_rel_err: f64,
}

/// Atomic part `η R^k Σ_j l_{m-j} k^j` of the k-th moment.
pub fn atomic_moment(h: &HFunction, k: f64) -> f64 {
    let c = h.constants();
    let m = h.m();
    let poly: f64 = (0..=m).map(|j| h.l[m - j] * k.powi(j as i32)).sum();
    c.eta * c.support_end.powf(k) * poly
}

pub fn moment_identity_check(
    params: &ParameterSet,
    k_list: &[f64],
    cfg: &HfunEvalConfig,
) -> Result<MomentReport> {
    let h = HFunction::new(params)?;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let g = gamma_ratio(params, k)?;
        let moment = h.moment(k, cfg)?;
        let atomic = atomic_moment(&h, k);
        let abs_err = (g - moment - atomic).abs();
        rows.push(MomentRow {
            k,
            gamma_ratio: g,
            moment,
            atomic,
            abs_err,
            rel_err: abs_err / (1.0 + g.abs()),
        });
    }
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    Ok(MomentReport { rows, max_rel_err })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonnegReport {
    pub min_value: f64,
    pub min_location: f64,
    pub max_abs: f64,
    pub nonneg: bool,
}

pub fn hfun_nonneg_scan(
    params: &ParameterSet,
    grid: &[f64],
    cfg: &HfunEvalConfig,
) -> Result<NonnegReport> {
    let h = HFunction::new(params)?;
    nonneg_scan_with(&h, grid, cfg)
}

pub fn nonneg_scan_with(h: &HFunction, grid: &[f64], cfg: &HfunEvalConfig) -> Result<NonnegReport> {
    let mut min_value = f64::INFINITY;
    let mut min_location = f64::NAN;
    let mut max_abs: f64 = 0.0;
    for &t in grid {
        let v = h.eval(t, cfg, false)?.value;
        max_abs = max_abs.max(v.abs());
        if v < min_value {
            min_value = v;
            min_location = t;
        }
    }
    Ok(NonnegReport {
        min_value,
        min_location,
        max_abs,
        // values below the evaluation tolerance are rounding noise, not sign
        nonneg: min_value >= -(1e-9 * max_abs).max(cfg.tol),
    })
}

/// `n` interior points `R (i + 1/2) / n`.
pub fn default_scan_grid(support_end: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| support_end * (i as f64 + 0.5) / n as f64)
        .collect()
}
