//! Global evaluation of the tangent by period reduction, halving into the
//! series disc and repeated duplication.
//!
//! The engine owns the float series coefficients and the constant `p`. It is
//! immutable after construction, so one instance can serve any number of
//! threads.

use std::sync::OnceLock;

use num::complex::Complex64;
use thiserror::Error;

use crate::constants::{compute_p, ConstantError, FundamentalConstant};
use crate::projective::{lift, ProjectivePair};
use crate::series::{LocalSolution, SeriesError, SeriesEvalConfig, DEFAULT_ORDER, DEFAULT_RHO};

/// A value is tagged as a pole when `|d| <= POLE_RATIO * |n|`.
pub const POLE_RATIO: f64 = 1e-12;
/// Relative scale of the lattice classification tolerance.
pub const CLASSIFY_EPS: f64 = 1e-9;
/// `addition_rhs` refuses denominators below this, relative to `max(1, |fa fz|)`.
pub const ADDITION_GUARD: f64 = 1e-12;
/// Outside `|Re z| <= SUPPORTED_RE`, `|Im z| <= SUPPORTED_IM` results are flagged.
pub const SUPPORTED_RE: f64 = 1e6;
pub const SUPPORTED_IM: f64 = 50.0;
/// Largest circle radius accepted by [`Engine::residue_at`].
pub const MAX_RESIDUE_RADIUS: f64 = 0.05;
pub const MIN_RESIDUE_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Constant(#[from] ConstantError),
    #[error("addition formula is ill-conditioned: |1 - f(a) f(z)| = {denominator:e}")]
    Conditioning { denominator: f64 },
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub order: usize,
    pub rho: f64,
    /// Tolerance used when locating `p`.
    pub p_tolerance: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            rho: DEFAULT_RHO,
            p_tolerance: 1e-14,
        }
    }
}

/// The lattice `pZ` split into its roles.
///
/// Even multiples are the zeros (and periods), odd multiples the poles, and
/// the half-odd multiples `(n + 1/2) p` carry the values `(-1)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Regular,
    ZeroPoint,
    PolePoint,
    /// `f = sign` here.
    UnitValuePoint(i8),
}

impl Lattice {
    pub fn new(p: f64) -> Self {
        Self { p }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn zero(&self, m: i64) -> f64 {
        2.0 * m as f64 * self.p
    }

    pub fn pole(&self, m: i64) -> f64 {
        (2 * m + 1) as f64 * self.p
    }

    pub fn half_odd(&self, n: i64) -> f64 {
        (n as f64 + 0.5) * self.p
    }

    /// Distance from `z` to the nearest odd multiple of `p`.
    pub fn distance_to_poles(&self, z: Complex64) -> f64 {
        let k = 2.0 * (z.re / (2.0 * self.p)).floor() + 1.0;
        (z - Complex64::new(k * self.p, 0.0)).norm()
    }

    pub fn classify(&self, z: Complex64) -> PointClass {
        let eps = CLASSIFY_EPS * z.norm().max(1.0);
        let j = (2.0 * z.re / self.p).round();
        if !j.is_finite() || j.abs() > 9.0e15 {
            return PointClass::Regular;
        }
        let candidate = Complex64::new(j * self.p / 2.0, 0.0);
        if (z - candidate).norm() > eps {
            return PointClass::Regular;
        }
        let j = j as i64;
        if j.rem_euclid(2) == 1 {
            let n = (j - 1).div_euclid(2);
            PointClass::UnitValuePoint(if n.rem_euclid(2) == 0 { 1 } else { -1 })
        } else if (j / 2).rem_euclid(2) == 0 {
            PointClass::ZeroPoint
        } else {
            PointClass::PolePoint
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    Finite,
    Pole,
}

/// A tangent value, total on the plane: finite, or a tagged pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOutcome {
    pair: ProjectivePair,
    value: Option<Complex64>,
}

impl EvalOutcome {
    fn from_pair(pair: ProjectivePair) -> Self {
        if pair.is_pole(POLE_RATIO) {
            Self { pair: pair.to_pole(), value: None }
        } else {
            Self { pair, value: pair.value() }
        }
    }

    pub fn kind(&self) -> EvalKind {
        if self.value.is_some() {
            EvalKind::Finite
        } else {
            EvalKind::Pole
        }
    }

    pub fn is_pole(&self) -> bool {
        self.value.is_none()
    }

    pub fn value(&self) -> Option<Complex64> {
        self.value
    }

    /// Always present; for a pole the denominator is exactly zero.
    pub fn pair(&self) -> ProjectivePair {
        self.pair
    }
}

/// How one evaluation reached the series disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionTrace {
    /// Number of `2p` periods subtracted.
    pub shifts: i64,
    pub halvings: u32,
    /// `(z - 2p shifts) / 2^halvings`, the point handed to the series.
    pub base_point: Complex64,
    /// Set outside the supported box or for non-finite input.
    pub low_confidence: bool,
}

#[derive(Debug, Clone)]
pub struct Engine {
    local: LocalSolution,
    constant: FundamentalConstant,
    lattice: Lattice,
}

static GLOBAL: OnceLock<Result<Engine, EngineError>> = OnceLock::new();

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self, EngineError> {
        let series_cfg = SeriesEvalConfig::new(cfg.rho, cfg.order)?;
        let local = LocalSolution::with_config(series_cfg)?;
        let constant = compute_p(&local, cfg.p_tolerance)?;
        Ok(Self {
            local,
            lattice: Lattice::new(constant.p),
            constant,
        })
    }

    /// A shared engine with the default configuration, built on first use.
    pub fn global() -> Result<&'static Engine, EngineError> {
        GLOBAL
            .get_or_init(|| Engine::new(EngineConfig::default()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn p(&self) -> f64 {
        self.constant.p
    }

    pub fn constant(&self) -> &FundamentalConstant {
        &self.constant
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn local(&self) -> &LocalSolution {
        &self.local
    }

    /// Shifts `z` by a multiple of `2p` so that `Re z' ∈ [-p, p)`.
    pub fn reduce_argument(&self, z: Complex64) -> (Complex64, i64) {
        let p = self.p();
        let period = 2.0 * p;
        if !z.re.is_finite() {
            return (z, 0);
        }
        let mut m = ((z.re + p) / period).floor();
        let shifted = |m: f64| Complex64::new(z.re - period * m, z.im);
        let mut reduced = shifted(m);
        if reduced.re < -p {
            m -= 1.0;
            reduced = shifted(m);
        } else if reduced.re >= p {
            m += 1.0;
            reduced = shifted(m);
        }
        (reduced, m as i64)
    }

    pub fn tan_eval(&self, z: Complex64) -> (EvalOutcome, ReductionTrace) {
        let (reduced, shifts) = self.reduce_argument(z);
        let lifted = lift(&self.local, reduced);
        let finite = z.re.is_finite() && z.im.is_finite();
        let trace = ReductionTrace {
            shifts,
            halvings: lifted.halvings,
            base_point: lifted.base_point,
            low_confidence: !finite || z.re.abs() > SUPPORTED_RE || z.im.abs() > SUPPORTED_IM,
        };
        let outcome = if finite {
            EvalOutcome::from_pair(lifted.pair)
        } else {
            EvalOutcome {
                pair: ProjectivePair::undefined(),
                value: Some(Complex64::new(f64::NAN, f64::NAN)),
            }
        };
        (outcome, trace)
    }

    pub fn tan(&self, z: Complex64) -> EvalOutcome {
        self.tan_eval(z).0
    }

    /// `f(z)` as a complex number; poles come back as complex infinity.
    pub fn tan_value(&self, z: Complex64) -> Complex64 {
        self.tan(z)
            .value()
            .unwrap_or(Complex64::new(f64::INFINITY, f64::INFINITY))
    }

    pub fn classify(&self, z: Complex64) -> PointClass {
        self.lattice.classify(z)
    }

    /// `(fa + fz) / (1 - fa fz)`.
    pub fn addition_rhs(fa: Complex64, fz: Complex64) -> Result<Complex64, EngineError> {
        let product = fa * fz;
        let denominator = Complex64::new(1.0, 0.0) - product;
        if !(denominator.norm() > ADDITION_GUARD * product.norm().max(1.0)) {
            return Err(EngineError::Conditioning {
                denominator: denominator.norm(),
            });
        }
        Ok((fa + fz) / denominator)
    }

    /// `e^{iθ}` built from the tangent at `θ/2`.
    pub fn cis(&self, theta: f64) -> Complex64 {
        self.tan(Complex64::new(theta / 2.0, 0.0)).pair().rotation()
    }

    /// Residue by the trapezoid rule on a circle about `pole`.
    pub fn residue_at(&self, pole: Complex64, radius: f64, points: usize) -> Result<Complex64, EngineError> {
        if self.classify(pole) != PointClass::PolePoint {
            return Err(EngineError::Domain(format!("{pole} is not an odd multiple of p")));
        }
        if !(radius > 0.0 && radius <= MAX_RESIDUE_RADIUS) {
            return Err(EngineError::Domain(format!(
                "radius must lie in (0, {MAX_RESIDUE_RADIUS}], got {radius}"
            )));
        }
        if points < MIN_RESIDUE_POINTS {
            return Err(EngineError::Domain(format!(
                "need at least {MIN_RESIDUE_POINTS} points, got {points}"
            )));
        }
        // (1/2πi) ∮ f dz = (1/N) Σ f(z_k) r ω_k with ω_k = e^{2πik/N}, 2π = 4p.
        let full_turn = 4.0 * self.p();
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..points {
            let omega = self.cis(full_turn * k as f64 / points as f64);
            let offset = omega * radius;
            let value = self.tan(pole + offset).value().ok_or_else(|| {
                EngineError::Domain(format!("contour passes through a pole at {}", pole + offset))
            })?;
            sum += value * offset;
        }
        Ok(sum / points as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> &'static Engine {
        Engine::global().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduction_examples() {
        let e = engine();
        let p = e.p();
        assert_eq!(e.reduce_argument(c(0.0, 0.0)), (c(0.0, 0.0), 0));
        assert_eq!(e.reduce_argument(c(2.0 * p, 0.0)), (c(0.0, 0.0), 1));
        assert_eq!(e.reduce_argument(c(p, 0.0)), (c(-p, 0.0), 1));
        let (r, m) = e.reduce_argument(c(-p, 3.0));
        assert_eq!((r, m), (c(-p, 3.0), 0));
    }

    #[test]
    fn reduction_stays_in_half_open_strip() {
        let e = engine();
        let p = e.p();
        for k in -400..400 {
            let x = k as f64 * 0.173;
            let (r, m) = e.reduce_argument(c(x, 1.0));
            assert!(r.re >= -p && r.re < p, "x = {x}: {r}");
            assert!((x - 2.0 * p * m as f64 - r.re).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_at_p() {
        let (out, trace) = engine().tan_eval(c(engine().p(), 0.0));
        assert_eq!(out.kind(), EvalKind::Pole);
        assert_eq!(out.pair().denominator(), c(0.0, 0.0));
        assert_eq!(trace.shifts, 1);
        assert!(!trace.low_confidence);
    }

    #[test]
    fn host_oracle_values() {
        let e = engine();
        let one = e.tan_value(c(1.0, 0.0));
        assert!((one - c(1.0f64.tan(), 0.0)).norm() <= 1e-14);
        let (out, trace) = e.tan_eval(c(0.0, 10.0));
        let v = out.value().unwrap();
        assert!((v - c(0.0, 10.0f64.tanh())).norm() <= 1e-15);
        assert_eq!(trace.halvings, 5);
        assert_eq!(trace.base_point, c(0.0, 10.0 / 32.0));
    }

    #[test]
    fn unit_values_on_half_odd_multiples() {
        let e = engine();
        for n in -8i64..=8 {
            let v = e.tan_value(c(e.lattice().half_odd(n), 0.0));
            let expected = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((v - c(expected, 0.0)).norm() <= 1e-10, "n = {n}: {v}");
        }
    }

    #[test]
    fn classification() {
        let e = engine();
        let p = e.p();
        assert_eq!(e.classify(c(0.0, 0.0)), PointClass::ZeroPoint);
        assert_eq!(e.classify(c(3.0 * p, 1e-20)), PointClass::PolePoint);
        assert_eq!(e.classify(c(-p, 0.0)), PointClass::PolePoint);
        assert_eq!(e.classify(c(p / 2.0, 0.0)), PointClass::UnitValuePoint(1));
        assert_eq!(e.classify(c(-p / 2.0, 0.0)), PointClass::UnitValuePoint(-1));
        assert_eq!(e.classify(c(1.5 * p, 0.0)), PointClass::UnitValuePoint(-1));
        assert_eq!(e.classify(c(4.0 * p, 0.0)), PointClass::ZeroPoint);
        assert_eq!(e.classify(c(1.0, 0.0)), PointClass::Regular);
        assert_eq!(e.classify(c(p, 1e-3)), PointClass::Regular);
    }

    #[test]
    fn addition_examples() {
        let q = 2f64.sqrt() - 1.0;
        let x = c(0.37, -0.2);
        assert_eq!(Engine::addition_rhs(x, c(0.0, 0.0)).unwrap(), x);
        let one = Engine::addition_rhs(c(q, 0.0), c(q, 0.0)).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);
        let r = 2f64.sqrt() + 1.0;
        let minus_one = Engine::addition_rhs(c(r, 0.0), c(r, 0.0)).unwrap();
        assert!((minus_one - c(-1.0, 0.0)).norm() < 1e-15);
        // f(p/2 + 3p/4) = f(5p/4) = -(sqrt 2 + 1)
        let v = Engine::addition_rhs(c(1.0, 0.0), c(r, 0.0)).unwrap();
        assert!((v - c(-r, 0.0)).norm() < 1e-14);
        assert!(matches!(
            Engine::addition_rhs(c(2.0, 0.0), c(0.5, 0.0)),
            Err(EngineError::Conditioning { .. })
        ));
    }

    #[test]
    fn residues_are_minus_one() {
        let e = engine();
        let p = e.p();
        for pole in [p, 3.0 * p, -p] {
            let r = e.residue_at(c(pole, 0.0), 0.01, 64).unwrap();
            assert!((r - c(-1.0, 0.0)).norm() <= 1e-8, "{pole}: {r}");
        }
    }

    #[test]
    fn residue_domain_errors() {
        let e = engine();
        let p = e.p();
        assert!(matches!(e.residue_at(c(2.0 * p, 0.0), 0.01, 64), Err(EngineError::Domain(_))));
        assert!(e.residue_at(c(p, 0.0), 0.06, 64).is_err());
        assert!(e.residue_at(c(p, 0.0), 0.0, 64).is_err());
        assert!(e.residue_at(c(p, 0.0), 0.01, 16).is_err());
    }

    #[test]
    fn cis_quarter_turns() {
        let e = engine();
        let p = e.p();
        assert!((e.cis(p) - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(e.cis(2.0 * p), c(-1.0, 0.0));
        assert_eq!(e.cis(0.0), c(1.0, 0.0));
    }

    #[test]
    fn low_confidence_outside_box() {
        let e = engine();
        assert!(e.tan_eval(c(2e6, 0.0)).1.low_confidence);
        assert!(e.tan_eval(c(0.0, 60.0)).1.low_confidence);
        assert!(!e.tan_eval(c(9.0e5, 40.0)).1.low_confidence);
        let (out, trace) = e.tan_eval(c(f64::NAN, 0.0));
        assert!(trace.low_confidence);
        assert!(out.value().unwrap().re.is_nan());
    }

    #[test]
    fn halving_count_bounded_in_box() {
        let e = engine();
        for &(x, y) in &[(10.0, 3.0), (-10.0, -3.0), (0.0, 3.0), (1.5, 0.0), (3.0, 50.0)] {
            let k = e.tan_eval(c(x, y)).1.halvings as f64;
            let bound = (f64::max(y.abs(), 1e-300) / 0.375).log2().ceil().max(0.0) + 3.0;
            assert!(k <= bound, "({x}, {y}): k = {k}");
        }
    }
}
