//! The fundamental constant `p`: the positive real with `f(p/2) = 1`.
//!
//! `2p` is the period of the tangent and equals π. It is located as a root of
//! `t -> f(t) - 1` on `[1/2, 1]`, where `f` is strictly increasing, and is
//! cross-checked against the integral `∫_0^1 dt / (1 + t^2) = p/2`.

use num::complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::projective::lift;
use crate::series::LocalSolution;

/// Bracket width at which bisection hands over to Newton polishing.
const BISECTION_WIDTH: f64 = 1e-10;
/// Bracket for `p/2`.
const BRACKET: (f64, f64) = (0.5, 1.0);
/// Panel doublings allowed in the quadrature.
const MAX_REFINEMENTS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantError {
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("root bracket [{lo}, {hi}] failed validation: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    BracketInvalid { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("cannot shrink the root bracket below {width:e} (requested {requested:e})")]
    ToleranceUnreachable { width: f64, requested: f64 },
    #[error("quadrature did not reach {tol:e} after {panels} panels (last change {delta:e})")]
    QuadratureDiverged { tol: f64, panels: usize, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMethod {
    DuplicationRootfind,
    Quadrature,
}

impl ConstantMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantMethod::DuplicationRootfind => "duplication-rootfind",
            ConstantMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalConstant {
    /// The constant itself; `2p` is π.
    pub p: f64,
    /// Guaranteed width of the bracket around `p` at termination.
    pub tolerance: f64,
    pub method: ConstantMethod,
}

/// `f(t)` for real `t`, via the series and enough duplications.
pub fn real_tangent(local: &LocalSolution, t: f64) -> f64 {
    let lifted = lift(local, Complex64::new(t, 0.0));
    match lifted.pair.value() {
        Some(v) => v.re,
        None => f64::INFINITY,
    }
}

fn validate_tol(tol: f64) -> Result<(), ConstantError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ConstantError::InvalidTolerance(tol))
    }
}

/// Locates `p` to within `tol`.
///
/// Bisection on `g(t) = f(t) - 1` to width `1e-10`, Newton polish with
/// `g' = 1 + f^2`, then a sign check on a bracket of width `tol / 2` about the
/// polished root. If that check fails, bisection resumes down to `tol / 2`.
pub fn compute_p(local: &LocalSolution, tol: f64) -> Result<FundamentalConstant, ConstantError> {
    validate_tol(tol)?;
    let g = |t: f64| real_tangent(local, t) - 1.0;

    let (mut lo, mut hi) = BRACKET;
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(ConstantError::BracketInvalid { lo, hi, g_lo, g_hi });
    }

    let half_target = tol / 2.0;
    let bisect = |lo: &mut f64, hi: &mut f64, width: f64| -> Option<f64> {
        while *hi - *lo > width {
            let mid = 0.5 * (*lo + *hi);
            if mid <= *lo || mid >= *hi {
                break;
            }
            let gm = g(mid);
            if gm == 0.0 {
                return Some(mid);
            }
            if gm < 0.0 {
                *lo = mid;
            } else {
                *hi = mid;
            }
        }
        None
    };

    if let Some(root) = bisect(&mut lo, &mut hi, BISECTION_WIDTH.max(half_target)) {
        return Ok(duplication_constant(root, 0.0));
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let fx = real_tangent(local, x);
        let step = (fx - 1.0) / (1.0 + fx * fx);
        let next = (x - step).clamp(lo, hi);
        if next == x {
            break;
        }
        x = next;
    }

    let (a, b) = (x - 0.45 * half_target, x + 0.45 * half_target);
    if a >= lo && b <= hi && g(a) < 0.0 && g(b) > 0.0 {
        return Ok(duplication_constant(x, b - a));
    }

    if let Some(root) = bisect(&mut lo, &mut hi, half_target) {
        return Ok(duplication_constant(root, 0.0));
    }
    let width = hi - lo;
    if width > half_target {
        return Err(ConstantError::ToleranceUnreachable { width: 2.0 * width, requested: tol });
    }
    Ok(duplication_constant(0.5 * (lo + hi), width))
}

fn duplication_constant(half_p: f64, bracket_width: f64) -> FundamentalConstant {
    FundamentalConstant {
        p: 2.0 * half_p,
        tolerance: 2.0 * bracket_width,
        method: ConstantMethod::DuplicationRootfind,
    }
}

pub fn weierstrass_integrand(t: f64) -> f64 {
    1.0 / (1.0 + t * t)
}

/// Five-point Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre_5() -> ([f64; 5], [f64; 5]) {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    ([-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb])
}

fn composite_gauss(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_5();
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = lo + (k as f64 + 0.5) * h;
            nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// `∫_0^1 dt / (1 + t^2)` by composite Gauss-Legendre with panel doubling,
/// stopping once successive estimates differ by at most `tol`.
pub fn weierstrass_integral_halfp(tol: f64) -> Result<f64, ConstantError> {
    validate_tol(tol)?;
    let mut panels = 1;
    let mut prev = composite_gauss(weierstrass_integrand, 0.0, 1.0, panels);
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let next = composite_gauss(weierstrass_integrand, 0.0, 1.0, panels);
        delta = (next - prev).abs();
        if delta <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(ConstantError::QuadratureDiverged { tol, panels, delta })
}

/// `p` by quadrature alone, for cross-checking.
pub fn quadrature_constant(tol: f64) -> Result<FundamentalConstant, ConstantError> {
    let half = weierstrass_integral_halfp(tol / 2.0)?;
    Ok(FundamentalConstant {
        p: 2.0 * half,
        tolerance: tol,
        method: ConstantMethod::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SeriesEvalConfig;

    fn local() -> LocalSolution {
        LocalSolution::with_config(SeriesEvalConfig::default()).unwrap()
    }

    #[test]
    fn p_matches_host_half_pi() {
        let k = compute_p(&local(), 1e-14).unwrap();
        assert!((k.p - std::f64::consts::FRAC_PI_2).abs() <= 1e-14, "p = {}", k.p);
        assert!(k.tolerance <= 1e-14);
        assert_eq!(k.method, ConstantMethod::DuplicationRootfind);
        assert!(k.p > 1.0 && k.p < 1.65);
    }

    #[test]
    fn unit_value_at_half_p() {
        let l = local();
        let k = compute_p(&l, 1e-14).unwrap();
        assert!((real_tangent(&l, k.p / 2.0) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn below_root_at_three_quarters() {
        let l = local();
        assert!(real_tangent(&l, 0.75) - 1.0 < 0.0);
        // host tan(0.75) = 0.9315964599440725
        assert!((real_tangent(&l, 0.75) - 0.75f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn coarse_tolerance_still_brackets() {
        let k = compute_p(&local(), 1e-3).unwrap();
        assert!((k.p - std::f64::consts::FRAC_PI_2).abs() <= 1e-3);
    }

    #[test]
    fn bad_tolerances() {
        assert!(matches!(compute_p(&local(), 0.0), Err(ConstantError::InvalidTolerance(_))));
        assert!(matches!(compute_p(&local(), f64::NAN), Err(ConstantError::InvalidTolerance(_))));
        // Below float resolution: either the computed g hits zero exactly or
        // the bracket cannot shrink far enough.
        match compute_p(&local(), 1e-20) {
            Ok(k) => assert!(k.tolerance <= 1e-20),
            Err(e) => assert!(matches!(e, ConstantError::ToleranceUnreachable { .. })),
        }
        assert!(weierstrass_integral_halfp(-1.0).is_err());
    }

    #[test]
    fn integrand_endpoints() {
        assert_eq!(weierstrass_integrand(0.0), 1.0);
        assert_eq!(weierstrass_integrand(1.0), 0.5);
    }

    #[test]
    fn integral_is_quarter_pi() {
        let v = weierstrass_integral_halfp(1e-12).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() <= 1e-12);
    }

    #[test]
    fn routes_agree_without_oracle() {
        let k = compute_p(&local(), 1e-14).unwrap();
        let half = weierstrass_integral_halfp(1e-13).unwrap();
        assert!((2.0 * k.p - 4.0 * half).abs() <= 1e-12);
        assert!((k.p / 2.0 - half).abs() <= 2e-13);
        let q = quadrature_constant(1e-12).unwrap();
        assert!((q.p - k.p).abs() <= 1e-12);
    }

    #[test]
    fn gauss_rule_is_exact_on_degree_nine() {
        let v = composite_gauss(|t| t.powi(9), 0.0, 1.0, 1);
        assert!((v - 0.1).abs() < 1e-15);
    }
}
