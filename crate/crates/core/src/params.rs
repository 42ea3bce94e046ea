//! Fox–Wright parameter vectors and the constants derived from them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FoxError, Result};
use crate::special::{self, bernoulli_poly, SignedLog};

/// Absolute tolerance used to recognise `mu = -m`.
pub const MU_INTEGER_TOL: f64 = 1e-9;
/// Relative tolerance for the balance condition `sum A = sum B`.
pub const BALANCE_TOL: f64 = 1e-9;
/// Numerator poles are screened for `k` up to this index at construction.
pub const POLE_SCREEN_LIMIT: u32 = 10_000;

/// One gamma factor `Γ(shift + k * scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPair {
    pub shift: f64,
    pub scale: f64,
}

impl GammaPair {
    pub fn new(shift: f64, scale: f64) -> Self {
        GammaPair { shift, scale }
    }

    fn at(&self, k: f64) -> f64 {
        self.shift + k * self.scale
    }
}

impl From<(f64, f64)> for GammaPair {
    fn from((shift, scale): (f64, f64)) -> Self {
        GammaPair { shift, scale }
    }
}

/// The `(alpha_i, A_i)` and `(beta_j, B_j)` pairs of `pPsi_q`, in user order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSet {
    upper: Vec<GammaPair>,
    lower: Vec<GammaPair>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameterSet {
    upper: Vec<[f64; 2]>,
    lower: Vec<[f64; 2]>,
}

impl ParameterSet {
    pub fn new<U, L>(upper: U, lower: L) -> Result<Self>
    where
        U: IntoIterator,
        U::Item: Into<GammaPair>,
        L: IntoIterator,
        L::Item: Into<GammaPair>,
    {
        let set = ParameterSet {
            upper: upper.into_iter().map(Into::into).collect(),
            lower: lower.into_iter().map(Into::into).collect(),
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.upper.is_empty() && self.lower.is_empty() {
            return Err(FoxError::InvalidParameters(
                "upper and lower lists are both empty".into(),
            ));
        }
        for (side, pairs) in [("upper", &self.upper), ("lower", &self.lower)] {
            for (i, p) in pairs.iter().enumerate() {
                if !p.shift.is_finite() || !p.scale.is_finite() {
                    return Err(FoxError::InvalidParameters(format!(
                        "{side}[{i}] has a non-finite entry"
                    )));
                }
                if p.scale <= 0.0 {
                    return Err(FoxError::InvalidParameters(format!(
                        "{side}[{i}] scale {} is not strictly positive",
                        p.scale
                    )));
                }
            }
        }
        for (i, p) in self.upper.iter().enumerate() {
            if p.shift > special::POLE_TOL {
                continue;
            }
            for k in 0..=POLE_SCREEN_LIMIT {
                let arg = p.at(k as f64);
                if arg > special::POLE_TOL {
                    break;
                }
                if special::nonpositive_integer(arg).is_some() {
                    return Err(FoxError::InvalidParameters(format!(
                        "upper[{i}] = ({}, {}) puts a gamma pole at k = {k}",
                        p.shift, p.scale
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses `{"upper": [[alpha, A], ...], "lower": [[beta, B], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawParameterSet = serde_json::from_str(text)
            .map_err(|e| FoxError::InvalidParameters(format!("parameter JSON: {e}")))?;
        ParameterSet::new(
            raw.upper.iter().map(|p| (p[0], p[1])),
            raw.lower.iter().map(|p| (p[0], p[1])),
        )
    }

    /// Canonical JSON: sorted keys, shortest round-trip numbers, `-0` folded to `0`.
    pub fn canonical_json(&self) -> String {
        fn num(x: f64) -> String {
            if x == 0.0 {
                "0".to_string()
            } else {
                format!("{x}")
            }
        }
        fn list(pairs: &[GammaPair]) -> String {
            let items: Vec<String> = pairs
                .iter()
                .map(|p| format!("[{},{}]", num(p.shift), num(p.scale)))
                .collect();
            format!("[{}]", items.join(","))
        }
        format!(
            "{{\"lower\":{},\"upper\":{}}}",
            list(&self.lower),
            list(&self.upper)
        )
    }

    /// Stable content hash (first 16 hex digits of SHA-256 of the canonical JSON).
    pub fn params_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn upper(&self) -> &[GammaPair] {
        &self.upper
    }

    pub fn lower(&self) -> &[GammaPair] {
        &self.lower
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// Prepends the pair `(lambda, 1)` to the upper list.
    pub fn lifted(&self, lambda: f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(self.upper.len() + 1);
        upper.push(GammaPair::new(lambda, 1.0));
        upper.extend_from_slice(&self.upper);
        ParameterSet::new(upper, self.lower.clone())
    }

    /// Every shift moved by `delta` times its own scale.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let shift = |p: &GammaPair| GammaPair::new(p.shift + delta * p.scale, p.scale);
        ParameterSet::new(
            self.upper.iter().map(shift).collect::<Vec<_>>(),
            self.lower.iter().map(shift).collect::<Vec<_>>(),
        )
    }

    /// `min_j alpha_j / A_j` over upper pairs; `+inf` when there are none.
    pub fn min_upper_ratio(&self) -> f64 {
        self.upper
            .iter()
            .map(|p| p.shift / p.scale)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_balanced(&self) -> bool {
        let a: f64 = self.upper.iter().map(|p| p.scale).sum();
        let b: f64 = self.lower.iter().map(|p| p.scale).sum();
        (a - b).abs() <= BALANCE_TOL * a.abs().max(b.abs()).max(1.0)
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_json())
    }
}

/// Constants attached to a parameter set.
///
/// `rho` is the radius of convergence constant `prod A^-A prod B^B`. When
/// `sum A = sum B` the gamma ratio grows like `eta * support_end^k * k^m`,
/// so the representing measure lives on `(0, support_end)` with
/// `support_end = 1 / rho`, and its atom sits at `support_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub delta: f64,
    pub rho: f64,
    pub support_end: f64,
    pub mu: f64,
    pub eta: f64,
    pub gamma_abscissa: f64,
    pub m_order: Option<usize>,
}

impl DerivedConstants {
    /// Representation hypothesis `gamma >= 1`, reported only.
    pub fn gamma_ge_one(&self) -> bool {
        self.gamma_abscissa >= 1.0
    }

    pub fn require_m(&self) -> Result<usize> {
        self.m_order.ok_or_else(|| {
            FoxError::Hypothesis(format!("mu = {} is not a non-positive integer", self.mu))
        })
    }
}

pub fn derive_constants(params: &ParameterSet) -> DerivedConstants {
    let sum_a: f64 = params.upper.iter().map(|p| p.scale).sum();
    let sum_b: f64 = params.lower.iter().map(|p| p.scale).sum();
    let delta = sum_b - sum_a;

    let ln_rho: f64 = -params
        .upper
        .iter()
        .map(|p| p.scale * p.scale.ln())
        .sum::<f64>()
        + params
            .lower
            .iter()
            .map(|p| p.scale * p.scale.ln())
            .sum::<f64>();

    let p = params.p() as f64;
    let q = params.q() as f64;
    let mu = params.lower.iter().map(|p| p.shift).sum::<f64>()
        - params.upper.iter().map(|p| p.shift).sum::<f64>()
        + (p - q) / 2.0;

    let ln_eta = 0.5 * (p - q) * (2.0 * PI).ln()
        + params
            .upper
            .iter()
            .map(|p| (p.shift - 0.5) * p.scale.ln())
            .sum::<f64>()
        + params
            .lower
            .iter()
            .map(|p| (0.5 - p.shift) * p.scale.ln())
            .sum::<f64>();

    let gamma_abscissa = -params.min_upper_ratio();

    let m_round = (-mu).round();
    let m_order = if m_round >= 0.0 && (mu + m_round).abs() <= MU_INTEGER_TOL {
        Some(m_round as usize)
    } else {
        None
    };

    DerivedConstants {
        delta,
        rho: ln_rho.exp(),
        support_end: (-ln_rho).exp(),
        mu,
        eta: ln_eta.exp(),
        gamma_abscissa,
        m_order,
    }
}

/// Convergence class of the defining series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convergence {
    EntirePlane,
    /// `Delta = -1`: converges for `|z| < rho`.
    DiskOfRadiusRho,
    /// `Delta = -1` and `mu > 1/2`: also converges on `|z| = rho`.
    BoundarySummable,
    Divergent,
}

const DELTA_TOL: f64 = 1e-12;

pub fn classify_convergence(params: &ParameterSet) -> Convergence {
    let c = derive_constants(params);
    if (c.delta + 1.0).abs() <= DELTA_TOL {
        if c.mu > 0.5 {
            Convergence::BoundarySummable
        } else {
            Convergence::DiskOfRadiusRho
        }
    } else if c.delta > -1.0 {
        Convergence::EntirePlane
    } else {
        Convergence::Divergent
    }
}

/// `q_1..q_m` and `l_0..l_m` of the asymptotic expansion of the gamma ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionCoefficients {
    pub q_seq: Vec<f64>,
    pub l_seq: Vec<f64>,
}

impl CorrectionCoefficients {
    /// Largest deviation from `l_r = (1/r) sum q_n l_{r-n}`, plus `|l_0 - 1|`.
    pub fn recurrence_residual(&self) -> f64 {
        let mut worst = (self.l_seq[0] - 1.0).abs();
        for r in 1..self.l_seq.len() {
            let rhs: f64 = (1..=r)
                .map(|n| self.q_seq[n - 1] * self.l_seq[r - n])
                .sum::<f64>()
                / r as f64;
            worst = worst.max((self.l_seq[r] - rhs).abs());
        }
        worst
    }
}

pub fn correction_coeffs(params: &ParameterSet, m: usize) -> Result<CorrectionCoefficients> {
    let mut q_seq = Vec::with_capacity(m);
    for n in 1..=m {
        let mut acc = 0.0;
        for p in &params.upper {
            acc += bernoulli_poly(n + 1, p.shift)? / p.scale.powi(n as i32);
        }
        for p in &params.lower {
            acc -= bernoulli_poly(n + 1, p.shift)? / p.scale.powi(n as i32);
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        q_seq.push(sign * acc / (n + 1) as f64);
    }
    let mut l_seq = Vec::with_capacity(m + 1);
    l_seq.push(1.0);
    for r in 1..=m {
        let s: f64 = (1..=r).map(|n| q_seq[n - 1] * l_seq[r - n]).sum();
        l_seq.push(s / r as f64);
    }
    Ok(CorrectionCoefficients { q_seq, l_seq })
}

/// `prod Γ(alpha_i + k A_i) / prod Γ(beta_j + k B_j)` in signed-log form.
pub fn ln_gamma_ratio(params: &ParameterSet, k: f64) -> Result<SignedLog> {
    let mut acc = SignedLog {
        ln_abs: 0.0,
        sign: 1.0,
    };
    for p in &params.upper {
        acc = acc * special::ln_gamma_real(p.at(k))?;
    }
    for p in &params.lower {
        acc = acc * special::ln_rgamma_real(p.at(k))?;
    }
    Ok(acc)
}

pub fn gamma_ratio(params: &ParameterSet, k: f64) -> Result<f64> {
    ln_gamma_ratio(params, k).map(|v| v.value())
}

/// Complex log of the Mellin ratio `prod Γ(A_i s + alpha_i) / prod Γ(B_j s + beta_j)`.
///
/// `Ok(None)` means the ratio vanishes (a denominator pole).
pub fn ln_gamma_ratio_complex(params: &ParameterSet, s: Complex64) -> Result<Option<Complex64>> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &params.upper {
        acc += special::ln_gamma(s * p.scale + p.shift)?;
    }
    for p in &params.lower {
        match special::ln_rgamma(s * p.scale + p.shift)? {
            Some(v) => acc += v,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// Reference parameter sets used throughout the tests and the CLI examples.
pub mod named {
    use super::ParameterSet;

    /// `upper=[(1,1)]`, `lower=[(1/2,1/2),(1,1/2)]`: mu = 0, rho = 1/2.
    pub fn set_a() -> ParameterSet {
        ParameterSet::new([(1.0, 1.0)], [(0.5, 0.5), (1.0, 0.5)]).unwrap()
    }

    /// `upper=[(1,1)]`, `lower=[(1/4,1/2),(1/4,1/2)]`: mu = -1, rho = 1/2.
    pub fn set_b() -> ParameterSet {
        ParameterSet::new([(1.0, 1.0)], [(0.25, 0.5), (0.25, 0.5)]).unwrap()
    }

    /// `upper=[(1/2,1/2),(3/2,1/2)]`, `lower=[(1,1/2),(1,1/2)]`: mu = 0, rho = 1.
    pub fn set_c() -> ParameterSet {
        ParameterSet::new([(0.5, 0.5), (1.5, 0.5)], [(1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    /// `upper = lower = [(1,1)]`: the exponential.
    pub fn identity() -> ParameterSet {
        ParameterSet::new([(1.0, 1.0)], [(1.0, 1.0)]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn constants_of_set_a() {
        let c = derive_constants(&set_a());
        assert_eq!(c.delta, 0.0);
        assert!((c.rho - 0.5).abs() < 1e-15);
        assert!((c.support_end - 2.0).abs() < 1e-15);
        assert!(c.mu.abs() < 1e-15);
        assert!((c.eta - 1.0 / SQRT_PI).abs() < 1e-15);
        assert_eq!(c.gamma_abscissa, -1.0);
        assert_eq!(c.m_order, Some(0));
        // eta against the four-parameter closed form mu1^{1/2-a} nu1^{1/2-b} / sqrt(2 pi)
        let closed = 0.5f64.powf(0.0) * 0.5f64.powf(-0.5) / (2.0 * PI).sqrt();
        assert!((c.eta - closed).abs() < 1e-15);
    }

    #[test]
    fn constants_of_identity_and_set_b() {
        let c = derive_constants(&identity());
        assert_eq!(
            (c.delta, c.rho, c.mu, c.eta, c.gamma_abscissa),
            (0.0, 1.0, 0.0, 1.0, -1.0)
        );
        let c = derive_constants(&set_b());
        assert!((c.mu + 1.0).abs() < 1e-15);
        assert!((c.rho - 0.5).abs() < 1e-15);
        assert!((c.eta - 0.5 / SQRT_PI).abs() < 1e-15);
        assert_eq!(c.m_order, Some(1));
    }

    #[test]
    fn set_c_is_self_dual() {
        let c = derive_constants(&set_c());
        assert!((c.rho - 1.0).abs() < 1e-15);
        assert!((c.eta - 1.0).abs() < 1e-14);
        assert_eq!(c.m_order, Some(0));
    }

    #[test]
    fn empty_upper_gives_unbounded_gamma() {
        let w = ParameterSet::new(Vec::<(f64, f64)>::new(), [(1.0, 1.0)]).unwrap();
        assert_eq!(derive_constants(&w).gamma_abscissa, f64::NEG_INFINITY);
    }

    #[test]
    fn m_order_detection_tolerance() {
        let near = ParameterSet::new([(1.0, 1.0)], [(0.5 + 5e-10, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(derive_constants(&near).m_order, Some(0));
        let off = ParameterSet::new([(1.0, 1.0)], [(0.5 + 1e-8, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(derive_constants(&off).m_order, None);
        let positive = ParameterSet::new([(1.0, 1.0)], [(2.0, 1.0)]).unwrap();
        assert_eq!(derive_constants(&positive).m_order, None);
    }

    #[test]
    fn convergence_classes() {
        assert_eq!(classify_convergence(&set_a()), Convergence::EntirePlane);
        let disk = ParameterSet::new([(1.0, 2.0)], [(1.0, 1.0)]).unwrap();
        assert_eq!(classify_convergence(&disk), Convergence::DiskOfRadiusRho);
        let div = ParameterSet::new([(1.0, 3.0)], [(1.0, 1.0)]).unwrap();
        assert_eq!(classify_convergence(&div), Convergence::Divergent);
        // 2F1-like with mu = c - a - b + ... > 1/2 on the boundary
        let boundary = ParameterSet::new([(1.0, 1.0), (1.0, 1.0)], [(3.0, 1.0)]).unwrap();
        assert_eq!(
            classify_convergence(&boundary),
            Convergence::BoundarySummable
        );
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(ParameterSet::new(Vec::<(f64, f64)>::new(), Vec::<(f64, f64)>::new()).is_err());
        assert!(ParameterSet::new([(1.0, 0.0)], [(1.0, 1.0)]).is_err());
        assert!(ParameterSet::new([(1.0, 1.0)], [(1.0, -1.0)]).is_err());
        // Γ(-2 + k) has poles at k = 0, 1, 2
        assert!(ParameterSet::new([(-2.0, 1.0)], [(1.0, 1.0)]).is_err());
        // Γ(-1.5 + k/2) hits Γ(0) at k = 3
        assert!(ParameterSet::new([(-1.5, 0.5)], [(1.0, 1.0)]).is_err());
        assert!(ParameterSet::new([(-0.5, 1.0)], [(1.0, 1.0)]).is_ok());
    }

    #[test]
    fn correction_coefficients_examples() {
        let c = correction_coeffs(&set_a(), 0).unwrap();
        assert_eq!(c.l_seq, vec![1.0]);
        let c = correction_coeffs(&set_b(), 1).unwrap();
        assert!((c.l_seq[1] - 0.125).abs() < 1e-15);
        // closed form l1 = 1/12 - (6a^2-6a+1)/(12 mu) - (6b^2-6b+1)/(12 nu), a=b=1/4, mu=nu=1/2
        let (a, b, m1, n1) = (0.25f64, 0.25f64, 0.5f64, 0.5f64);
        let closed = 1.0 / 12.0
            - (6.0 * a * a - 6.0 * a + 1.0) / (12.0 * m1)
            - (6.0 * b * b - 6.0 * b + 1.0) / (12.0 * n1);
        assert!((c.l_seq[1] - closed).abs() < 1e-15);
        let c = correction_coeffs(&set_c(), 6).unwrap();
        assert!(c.recurrence_residual() < 1e-14);
    }

    #[test]
    fn identical_pairs_cancel() {
        let same = ParameterSet::new([(0.3, 0.7), (2.0, 1.3)], [(0.3, 0.7), (2.0, 1.3)]).unwrap();
        let c = correction_coeffs(&same, 5).unwrap();
        assert!(c.q_seq.iter().all(|q| *q == 0.0));
        assert!(c.l_seq[1..].iter().all(|l| *l == 0.0));
        for k in [0.0, 1.0, 7.5, 40.0] {
            assert!((gamma_ratio(&same, k).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn set_a_has_no_corrections() {
        // ratio(s) = 2^s / sqrt(pi) exactly, so every q_n vanishes
        let c = correction_coeffs(&set_a(), 10).unwrap();
        assert!(c.q_seq.iter().all(|q| q.abs() < 1e-12), "{:?}", c.q_seq);
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!((gamma_ratio(&set_a(), 0.0).unwrap() - 1.0 / SQRT_PI).abs() < 1e-15);
        assert!((gamma_ratio(&set_a(), 3.0).unwrap() - 8.0 / SQRT_PI).abs() < 1e-13);
        for k in [0.5, 1.5, 10.0, 100.0] {
            let want = 2f64.powf(k) / SQRT_PI;
            assert!((gamma_ratio(&set_a(), k).unwrap() / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_polynomial_part() {
        for (set, m) in [(set_a(), 0usize), (set_b(), 1)] {
            let c = derive_constants(&set);
            let l = correction_coeffs(&set, m).unwrap().l_seq;
            for (k, tol) in [(200.0f64, 0.02), (2000.0, 0.002)] {
                let poly: f64 = (0..=m).map(|j| l[m - j] * k.powi(j as i32)).sum();
                let ln_ratio = ln_gamma_ratio(&set, k).unwrap().ln_abs;
                let r = (ln_ratio - c.eta.ln() - k * c.support_end.ln() - poly.ln()).exp();
                assert!((r - 1.0).abs() < tol, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn appending_common_pair_keeps_constants() {
        let base = set_b();
        let mut upper = base.upper().to_vec();
        let mut lower = base.lower().to_vec();
        upper.push(GammaPair::new(0.7, 1.9));
        lower.push(GammaPair::new(0.7, 1.9));
        let ext = ParameterSet::new(upper, lower).unwrap();
        let (a, b) = (derive_constants(&base), derive_constants(&ext));
        assert!((a.rho - b.rho).abs() < 1e-15);
        assert!((a.mu - b.mu).abs() < 1e-15);
        assert!((a.eta / b.eta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_and_hash() {
        let text = r#"{"upper": [[1, 1]], "lower": [[0.5, 0.5], [1.0, 0.5]]}"#;
        let set = ParameterSet::from_json(text).unwrap();
        assert_eq!(set, set_a());
        assert_eq!(
            set.canonical_json(),
            r#"{"lower":[[0.5,0.5],[1,0.5]],"upper":[[1,1]]}"#
        );
        let reordered = r#"{"lower": [[0.50, 0.5], [1e0, 0.5]], "upper": [[1.0, 1]]}"#;
        assert_eq!(
            ParameterSet::from_json(reordered).unwrap().params_hash(),
            set.params_hash()
        );
        assert_eq!(set.params_hash().len(), 16);
        assert!(ParameterSet::from_json(r#"{"upper": [[1, 1]]}"#).is_err());
        assert!(ParameterSet::from_json(r#"{"upper": [], "lower": [], "x": 1}"#).is_err());
    }
}
