//! Local solution of `w' = 1 + w^2`, `w(0) = 0` as a truncated power series.
//!
//! Two independent routes produce the Taylor coefficients at the origin:
//! Picard iteration `w <- z + ∫ w^2` on truncated series, and the
//! coefficient recurrence `(n+1) a_{n+1} = [n = 0] + Σ_{i+j=n} a_i a_j`.
//! Both run either in exact rationals or in `f64`.
//!
//! Point evaluation is restricted to a closed disc of radius `rho < 1/2`.
//! Since the solution maps the disc of radius 1/2 into the unit disc, the
//! Cauchy estimate gives `|a_n| <= 2^n`, and the truncation error on
//! `|z| <= rho` is at most `(2 rho)^(N+1) / (1 - 2 rho)`.

use num::complex::Complex64;
use num::{BigInt, BigRational, FromPrimitive, Num, One, Signed, ToPrimitive};
use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 128;

/// Default safe evaluation radius.
pub const DEFAULT_RHO: f64 = 0.375;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("evaluation radius must satisfy 0 < rho < 1/2, got {0}")]
    InvalidRadius(f64),
    #[error("coefficients of order {have} cannot serve a configuration of order {want}")]
    OrderMismatch { have: usize, want: usize },
    #[error("|z| = {modulus} exceeds the series radius {rho}")]
    OutsideRadius { modulus: f64, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
enum Coeffs {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Coefficients `a_0 ..= a_N` of the local solution at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoefficients {
    coeffs: Coeffs,
}

impl TaylorCoefficients {
    /// Highest retained degree `N`.
    pub fn order(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(c) => c.len(),
            Coeffs::Float(c) => c.len(),
        }
    }

    pub fn mode(&self) -> CoeffMode {
        match self.coeffs {
            Coeffs::Exact(_) => CoeffMode::Exact,
            Coeffs::Float(_) => CoeffMode::Float,
        }
    }

    /// The exact coefficients, if this is an exact-mode sequence.
    pub fn exact(&self) -> Option<&[BigRational]> {
        match &self.coeffs {
            Coeffs::Exact(c) => Some(c),
            Coeffs::Float(_) => None,
        }
    }

    /// Coefficient `a_n` as the nearest `f64`.
    pub fn value(&self, n: usize) -> f64 {
        match &self.coeffs {
            Coeffs::Exact(c) => c[n].to_f64().unwrap_or(f64::NAN),
            Coeffs::Float(c) => c[n],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.value(n)).collect()
    }

    /// Converts to float mode, rounding each exact coefficient once.
    pub fn to_float(&self) -> TaylorCoefficients {
        TaylorCoefficients {
            coeffs: Coeffs::Float(self.values()),
        }
    }
}

trait Scalar: Num + Clone + FromPrimitive {}
impl<T: Num + Clone + FromPrimitive> Scalar for T {}

fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("degree fits the scalar type")
}

/// Degree-`k` coefficient of `w^2`, pairing `w_i w_j` with `w_j w_i`.
fn square_coefficient<T: Scalar>(w: &[T], k: usize) -> T {
    let mut cross = T::zero();
    for i in 0..=k / 2 {
        let j = k - i;
        if i == j || j >= w.len() || w[i].is_zero() || w[j].is_zero() {
            continue;
        }
        cross = cross + w[i].clone() * w[j].clone();
    }
    let mut sum = cross * from_usize::<T>(2);
    if k.is_multiple_of(2) && k / 2 < w.len() {
        sum = sum + w[k / 2].clone() * w[k / 2].clone();
    }
    sum
}

/// Square of a truncated series, keeping degrees `0..len`.
fn truncated_square<T: Scalar>(w: &[T], len: usize) -> Vec<T> {
    (0..len).map(|k| square_coefficient(w, k)).collect()
}

fn picard_generic<T: Scalar>(order: usize) -> (Vec<T>, usize) {
    let mut w = vec![T::zero(); order + 1];
    let mut steps = 0;
    loop {
        let square = truncated_square(&w, order);
        let mut next = vec![T::zero(); order + 1];
        next[1] = T::one();
        for (m, c) in square.into_iter().enumerate() {
            next[m + 1] = next[m + 1].clone() + c / from_usize::<T>(m + 1);
        }
        steps += 1;
        if next == w {
            return (w, steps);
        }
        w = next;
    }
}

fn recurrence_generic<T: Scalar>(order: usize) -> Vec<T> {
    let mut a = vec![T::zero(); order + 1];
    a[1] = T::one();
    for n in 1..order {
        a[n + 1] = square_coefficient(&a[..=n], n) / from_usize::<T>(n + 1);
    }
    a
}

fn wrap(mode: CoeffMode, exact: impl FnOnce() -> Vec<BigRational>, float: impl FnOnce() -> Vec<f64>) -> TaylorCoefficients {
    let coeffs = match mode {
        CoeffMode::Exact => Coeffs::Exact(exact()),
        CoeffMode::Float => Coeffs::Float(float()),
    };
    TaylorCoefficients { coeffs }
}

/// Picard iteration from the zero series until two successive truncations
/// agree through degree `order`.
///
/// An iterate correct through degree `d` yields one correct through `d + 2`,
/// so the fixpoint is reached after at most `order / 2 + 2` steps.
pub fn picard_iterate(order: usize, mode: CoeffMode) -> Result<TaylorCoefficients, SeriesError> {
    picard_iterate_counted(order, mode).map(|(c, _)| c)
}

/// Like [`picard_iterate`], also returning the number of Picard steps taken
/// (including the final step that confirmed the fixpoint).
pub fn picard_iterate_counted(
    order: usize,
    mode: CoeffMode,
) -> Result<(TaylorCoefficients, usize), SeriesError> {
    if order == 0 {
        return Err(SeriesError::InvalidOrder(order));
    }
    let (coeffs, steps) = match mode {
        CoeffMode::Exact => {
            let (c, s) = picard_generic::<BigRational>(order);
            (Coeffs::Exact(c), s)
        }
        CoeffMode::Float => {
            let (c, s) = picard_generic::<f64>(order);
            (Coeffs::Float(c), s)
        }
    };
    let coeffs = TaylorCoefficients { coeffs };
    Ok((coeffs, steps))
}

/// Coefficients from the power-matching recurrence of the differential equation.
pub fn coefficient_recurrence(order: usize, mode: CoeffMode) -> Result<TaylorCoefficients, SeriesError> {
    if order == 0 {
        return Err(SeriesError::InvalidOrder(order));
    }
    Ok(wrap(
        mode,
        || recurrence_generic::<BigRational>(order),
        || recurrence_generic::<f64>(order),
    ))
}

/// `2^n` as an exact rational, for the Cauchy estimate.
pub fn cauchy_bound(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << n)
}

/// Returns the first index whose exact coefficient exceeds `2^n` in modulus.
pub fn first_cauchy_violation(coeffs: &[BigRational]) -> Option<usize> {
    coeffs
        .iter()
        .enumerate()
        .find(|(n, a)| a.abs() > cauchy_bound(*n))
        .map(|(n, _)| n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvalConfig {
    rho: f64,
    order: usize,
    tail_bound: f64,
}

impl SeriesEvalConfig {
    pub fn new(rho: f64, order: usize) -> Result<Self, SeriesError> {
        if order == 0 {
            return Err(SeriesError::InvalidOrder(order));
        }
        if !(rho > 0.0 && rho < 0.5) {
            return Err(SeriesError::InvalidRadius(rho));
        }
        let q = 2.0 * rho;
        let tail_bound = q.powi(order as i32 + 1) / (1.0 - q);
        Ok(Self { rho, order, tail_bound })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Upper bound on the truncation error anywhere in `|z| <= rho`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

impl Default for SeriesEvalConfig {
    fn default() -> Self {
        Self::new(DEFAULT_RHO, DEFAULT_ORDER).expect("default series configuration is valid")
    }
}

/// Float coefficients prepared for repeated evaluation.
///
/// Only the odd coefficients are stored; evaluation runs Horner in `u = z^2`
/// and multiplies by `z` at the end, so `f(-z) = -f(z)` holds bit for bit.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    odd: Vec<f64>,
    cfg: SeriesEvalConfig,
}

impl LocalSolution {
    pub fn new(coeffs: &TaylorCoefficients, cfg: SeriesEvalConfig) -> Result<Self, SeriesError> {
        if coeffs.order() < cfg.order() {
            return Err(SeriesError::OrderMismatch {
                have: coeffs.order(),
                want: cfg.order(),
            });
        }
        let odd = (1..=cfg.order()).step_by(2).map(|n| coeffs.value(n)).collect();
        Ok(Self { odd, cfg })
    }

    /// Builds the default local solution from exact coefficients.
    pub fn with_config(cfg: SeriesEvalConfig) -> Result<Self, SeriesError> {
        let coeffs = coefficient_recurrence(cfg.order(), CoeffMode::Exact)?;
        Self::new(&coeffs, cfg)
    }

    pub fn config(&self) -> &SeriesEvalConfig {
        &self.cfg
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, SeriesError> {
        let modulus = z.norm();
        if !(modulus <= self.cfg.rho) {
            return Err(SeriesError::OutsideRadius {
                modulus,
                rho: self.cfg.rho,
            });
        }
        let u = z * z;
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.odd.iter().rev() {
            acc = acc * u + a;
        }
        Ok(acc * z)
    }
}

/// One-shot evaluation of the truncated series at `z`.
pub fn eval_series(
    coeffs: &TaylorCoefficients,
    cfg: &SeriesEvalConfig,
    z: Complex64,
) -> Result<Complex64, SeriesError> {
    LocalSolution::new(coeffs, *cfg)?.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_picard_step_is_identity() {
        let c = picard_iterate(1, CoeffMode::Exact).unwrap();
        assert_eq!(c.exact().unwrap(), &[rat(0, 1), rat(1, 1)]);
    }

    #[test]
    fn low_order_coefficients() {
        // 3 a3 = a1 a1, 5 a5 = 2 a1 a3, 7 a7 = 2 a1 a5 + a3 a3, by hand.
        let c = picard_iterate(7, CoeffMode::Exact).unwrap();
        let a = c.exact().unwrap();
        assert_eq!(a[3], rat(1, 3));
        assert_eq!(a[5], rat(2, 15));
        assert_eq!(a[7], rat(17, 315));
        let r = coefficient_recurrence(3, CoeffMode::Exact).unwrap();
        assert_eq!(r.exact().unwrap()[3], rat(1, 3));
    }

    #[test]
    fn recurrence_order_one() {
        let r = coefficient_recurrence(1, CoeffMode::Exact).unwrap();
        assert_eq!(r.exact().unwrap(), &[rat(0, 1), rat(1, 1)]);
    }

    #[test]
    fn even_coefficients_vanish() {
        let r = coefficient_recurrence(6, CoeffMode::Exact).unwrap();
        let a = r.exact().unwrap();
        for n in [0, 2, 4, 6] {
            assert!(a[n].is_zero(), "a_{n} = {}", a[n]);
        }
    }

    #[test]
    fn order_zero_rejected() {
        assert_eq!(
            picard_iterate(0, CoeffMode::Exact),
            Err(SeriesError::InvalidOrder(0))
        );
        assert_eq!(
            coefficient_recurrence(0, CoeffMode::Float),
            Err(SeriesError::InvalidOrder(0))
        );
    }

    #[test]
    fn picard_step_count_is_linear() {
        // Each step fixes two more degrees, plus one step to confirm.
        for order in [1usize, 2, 3, 8, 33, 64, 100] {
            let (_, steps) = picard_iterate_counted(order, CoeffMode::Float).unwrap();
            let bound = order / 2 + 2;
            assert!(steps <= bound, "order {order}: {steps} steps > {bound}");
        }
    }

    #[test]
    fn float_routes_agree_to_one_ulp() {
        let p = picard_iterate(128, CoeffMode::Float).unwrap().values();
        let r = coefficient_recurrence(128, CoeffMode::Float).unwrap().values();
        for (n, (x, y)) in p.iter().zip(&r).enumerate() {
            let ulp = f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
            assert!((x - y).abs() <= ulp, "a_{n}: {x} vs {y}");
        }
    }

    #[test]
    fn exact_coefficients_are_reduced_and_bounded() {
        let r = coefficient_recurrence(64, CoeffMode::Exact).unwrap();
        let a = r.exact().unwrap();
        for q in a {
            assert!(num::Integer::gcd(q.numer(), q.denom()).is_one() || q.is_zero());
        }
        assert_eq!(first_cauchy_violation(a), None);
    }

    #[test]
    fn config_validation() {
        assert!(SeriesEvalConfig::new(0.5, 10).is_err());
        assert!(SeriesEvalConfig::new(0.0, 10).is_err());
        assert!(SeriesEvalConfig::new(f64::NAN, 10).is_err());
        assert!(SeriesEvalConfig::new(0.3, 0).is_err());
        let cfg = SeriesEvalConfig::default();
        let expected = 0.75f64.powi(129) / 0.25;
        assert!((cfg.tail_bound() - expected).abs() <= 1e-30);
        assert!(cfg.tail_bound() < 4e-16);
    }

    #[test]
    fn evaluation_against_host() {
        let local = LocalSolution::with_config(SeriesEvalConfig::default()).unwrap();
        assert_eq!(local.eval(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let x = local.eval(Complex64::new(0.25, 0.0)).unwrap();
        assert_eq!(x.im, 0.0);
        assert!((x.re - 0.25f64.tan()).abs() <= 2e-16);
        let y = local.eval(Complex64::new(0.0, 0.3)).unwrap();
        assert_eq!(y.re, 0.0);
        assert!((y.im - 0.3f64.tanh()).abs() <= 2e-16);
    }

    #[test]
    fn outside_radius_is_a_contract_error() {
        let local = LocalSolution::with_config(SeriesEvalConfig::default()).unwrap();
        let err = local.eval(Complex64::new(0.4, 0.0)).unwrap_err();
        assert!(matches!(err, SeriesError::OutsideRadius { .. }));
        assert!(local.eval(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn eval_series_checks_order() {
        let c = coefficient_recurrence(10, CoeffMode::Float).unwrap();
        let cfg = SeriesEvalConfig::new(0.3, 20).unwrap();
        assert!(matches!(
            eval_series(&c, &cfg, Complex64::new(0.1, 0.0)),
            Err(SeriesError::OrderMismatch { have: 10, want: 20 })
        ));
    }
}
