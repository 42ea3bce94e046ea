//! Adaptive Gauss–Kronrod quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FoxError, Result};

/// Kronrod 15-point abscissae on [-1, 1] (non-negative half, descending).
pub const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
pub const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss 7-point weights for the odd Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const MAX_DEPTH: u32 = 40;
const MAX_INTERVALS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One GK15 panel: (Kronrod value, |Kronrod - Gauss|).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// The 15 nodes and Kronrod weights of a panel `[a, b]`, for precomputed sums.
pub fn gk15_panel(a: f64, b: f64) -> [(f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 15];
    for i in 0..7 {
        out[2 * i] = (c - h * XGK[i], h * WGK[i]);
        out[2 * i + 1] = (c + h * XGK[i], h * WGK[i]);
    }
    out[14] = (c, h * WGK[7]);
    out
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive GK15 on `[a, b]`; stops once the summed error estimate is
/// at most `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(FoxError::QuadratureFailure(format!(
            "non-finite interval [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = v;
    let mut total_err = e;
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
        depth: 0,
    });
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(FoxError::QuadratureFailure(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= MAX_DEPTH || heap.len() >= MAX_INTERVALS {
            return Err(FoxError::QuadratureFailure(format!(
                "no convergence on [{a}, {b}]: error {total_err:e} near [{}, {}]",
                worst.a, worst.b
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        for (lo, hi, value, error) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
    }
    // re-sum to shed drift from the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Integrates over consecutive pieces `[p_0, p_1], [p_1, p_2], ...`.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    let mut acc = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    let n = points.len().saturating_sub(1).max(1) as f64;
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], abs_tol / n, rel_tol)?;
        acc.value += r.value;
        acc.error += r.error;
        acc.evaluations += r.evaluations;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
        let p: f64 = gk15_panel(0.0, 3.0).iter().map(|(_, w)| w).sum();
        assert!((p - 3.0).abs() < 1e-14);
    }

    #[test]
    fn polynomials_are_exact() {
        // Kronrod-15 integrates degree 22 exactly
        let (v, _) = gk15(&mut |x: f64| x.powi(20), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_singular() {
        let r = integrate(|x| x.sin(), 0.0, PI, 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        // endpoint singularities need depth; 40 halvings reach ~1e-6 here
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-6, 1e-6).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
        let r = integrate(|x| x.ln(), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn failure_is_reported() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10, 1e-10);
        assert!(matches!(r, Err(FoxError::QuadratureFailure(_))));
    }

    #[test]
    fn pieces() {
        let r = integrate_pieces(|x| (x - 1.0).abs(), &[0.0, 1.0, 3.0], 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.5).abs() < 1e-14);
    }
}
