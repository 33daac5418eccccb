//! Seeded, tolerance-explicit checks of every property of the construction.
//!
//! Each check draws from its own ChaCha8 stream, selected by a hash of the
//! check name, so enabling or disabling one check never perturbs another.
//! Failures are data in the report, not errors.

use std::collections::{BTreeMap, BTreeSet};

use num::complex::Complex64;
use num::{BigRational, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constants::{real_tangent, weierstrass_integral_halfp};
use crate::engine::{Engine, PointClass};
use crate::json::serialize_f64;
use crate::series::{cauchy_bound, coefficient_recurrence, picard_iterate, CoeffMode, SeriesEvalConfig, DEFAULT_ORDER};

pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = FNV-1a-64(check name)";

/// Points closer than this to a pole are rejected by the samplers.
pub const POLE_EXCLUSION: f64 = 0.05;
/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;
/// Admissible pairs for the addition theorem keep `|1 - f(a) f(z)|` above this.
pub const ADDITION_MARGIN: f64 = 0.05;
const MAX_REJECTIONS_PER_SAMPLE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("sample box must be finite with min < max on both axes")]
    InvalidBox,
    #[error("no tolerance given for check `{0}`")]
    MissingTolerance(String),
    #[error("tolerance for `{name}` must be finite, got {value}")]
    InvalidTolerance { name: String, value: f64 },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

/// How a check's residual is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Largest residual must be `<=` the tolerance.
    AtMost,
    /// Smallest margin must be strictly `>` the tolerance.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBox {
    #[serde(serialize_with = "serialize_f64")]
    pub re_min: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub re_max: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub im_min: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub im_max: f64,
}

impl SampleBox {
    fn is_valid(&self) -> bool {
        [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        Self { re_min: -10.0, re_max: 10.0, im_min: -3.0, im_max: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub sample_box: SampleBox,
    pub tolerances: BTreeMap<String, f64>,
    pub disabled: BTreeSet<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 1000,
            sample_box: SampleBox::default(),
            tolerances: default_tolerances(),
            disabled: BTreeSet::new(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.samples == 0 {
            return Err(VerifyError::NoSamples);
        }
        if !self.sample_box.is_valid() {
            return Err(VerifyError::InvalidBox);
        }
        for check in CHECKS {
            match self.tolerances.get(check.name) {
                None => return Err(VerifyError::MissingTolerance(check.name.to_string())),
                Some(v) if !v.is_finite() => {
                    return Err(VerifyError::InvalidTolerance { name: check.name.to_string(), value: *v })
                }
                Some(_) => {}
            }
        }
        let known: BTreeSet<&str> = CHECKS.iter().map(|c| c.name).collect();
        for name in self.tolerances.keys().chain(&self.disabled) {
            if !known.contains(name.as_str()) {
                return Err(VerifyError::UnknownCheck(name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub comparison: Comparison,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    /// Largest residual for `at_most` checks, smallest margin for `above` checks.
    #[serde(serialize_with = "serialize_f64")]
    pub max_residual: f64,
    pub worst_point: Option<[crate::json::Float17; 2]>,
    pub samples_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub generator: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub sample_box: SampleBox,
    pub records: Vec<CheckRecord>,
    pub overall_pass: bool,
}

impl VerifyReport {
    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

struct Measured {
    residual: f64,
    worst: Option<Complex64>,
    samples: usize,
}

/// Running extreme of a residual, keeping the point where it occurred.
struct Tracker {
    comparison: Comparison,
    residual: f64,
    worst: Option<Complex64>,
    samples: usize,
}

impl Tracker {
    fn new(comparison: Comparison) -> Self {
        let residual = match comparison {
            Comparison::AtMost => f64::NEG_INFINITY,
            Comparison::Above => f64::INFINITY,
        };
        Self { comparison, residual, worst: None, samples: 0 }
    }

    fn record(&mut self, value: f64, at: Complex64) {
        self.samples += 1;
        if self.residual.is_nan() {
            return;
        }
        let worse = value.is_nan()
            || match self.comparison {
                Comparison::AtMost => value > self.residual,
                Comparison::Above => value < self.residual,
            };
        if worse || self.worst.is_none() {
            if worse {
                self.residual = value;
            }
            self.worst = Some(at);
        }
    }

    fn finish(self) -> Measured {
        Measured { residual: self.residual, worst: self.worst, samples: self.samples }
    }
}

struct Ctx<'a> {
    engine: &'a Engine,
    cfg: &'a VerifyConfig,
    exact: Vec<BigRational>,
}

impl Ctx<'_> {
    fn f(&self, z: Complex64) -> Complex64 {
        self.engine.tan_value(z)
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        let b = &self.cfg.sample_box;
        Complex64::new(rng.random_range(b.re_min..b.re_max), rng.random_range(b.im_min..b.im_max))
    }

    /// Uniform in the box, at least `POLE_EXCLUSION` from every pole.
    fn regular(&self, rng: &mut ChaCha8Rng) -> Option<Complex64> {
        self.uniform_where(rng, |_| true)
    }

    fn uniform_where(&self, rng: &mut ChaCha8Rng, accept: impl Fn(Complex64) -> bool) -> Option<Complex64> {
        (0..MAX_REJECTIONS_PER_SAMPLE).map(|_| self.uniform(rng)).find(|&z| self.is_regular(z) && accept(z))
    }

    fn is_regular(&self, z: Complex64) -> bool {
        self.engine.lattice().distance_to_poles(z) >= POLE_EXCLUSION
    }

    /// Uniform in a closed disc, by rejection from the enclosing square.
    fn disc(&self, rng: &mut ChaCha8Rng, center: Complex64, radius: f64) -> Complex64 {
        loop {
            let z = Complex64::new(rng.random_range(-radius..=radius), rng.random_range(-radius..=radius));
            if z.norm() <= radius {
                return center + z;
            }
        }
    }

    /// Runs `body` on `samples` regular points.
    fn sampled(
        &self,
        rng: &mut ChaCha8Rng,
        comparison: Comparison,
        mut body: impl FnMut(&mut ChaCha8Rng, &mut Tracker),
    ) -> Measured {
        let mut t = Tracker::new(comparison);
        let mut attempts = 0;
        while t.samples < self.cfg.samples && attempts < self.cfg.samples * MAX_REJECTIONS_PER_SAMPLE {
            attempts += 1;
            body(rng, &mut t);
        }
        t.finish()
    }
}

struct CheckDef {
    name: &'static str,
    comparison: Comparison,
    tolerance: f64,
    run: fn(&Ctx, &mut ChaCha8Rng) -> Measured,
}

use Comparison::{Above, AtMost};

const CHECKS: &[CheckDef] = &[
    // local series
    CheckDef { name: "picard_recurrence_agreement", comparison: AtMost, tolerance: 0.0, run: check_picard },
    CheckDef { name: "odd_coefficients", comparison: AtMost, tolerance: 0.0, run: check_odd_coefficients },
    CheckDef { name: "cauchy_coefficient_bound", comparison: AtMost, tolerance: 0.0, run: check_cauchy },
    CheckDef { name: "schwarz_bound", comparison: AtMost, tolerance: 1e-15, run: check_schwarz },
    CheckDef { name: "cubic_bound", comparison: AtMost, tolerance: 1e-15, run: check_cubic },
    CheckDef { name: "series_real_axis", comparison: AtMost, tolerance: 1e-15, run: check_series_real_axis },
    CheckDef { name: "series_imag_deviation", comparison: AtMost, tolerance: 3.1e-16, run: check_series_imag },
    // the constant p
    CheckDef { name: "pi_cross_check", comparison: AtMost, tolerance: 1e-12, run: check_pi },
    CheckDef { name: "unit_value_at_half_p", comparison: AtMost, tolerance: 1e-12, run: check_unit_value },
    CheckDef { name: "real_monotonicity", comparison: Above, tolerance: 0.0, run: check_real_monotonicity },
    CheckDef { name: "lower_bounds", comparison: Above, tolerance: 0.0, run: check_lower_bounds },
    // the global tangent
    CheckDef { name: "oddness", comparison: AtMost, tolerance: 1e-10, run: check_oddness },
    CheckDef { name: "conjugation", comparison: AtMost, tolerance: 1e-10, run: check_conjugation },
    CheckDef { name: "periodicity", comparison: AtMost, tolerance: 1e-10, run: check_periodicity },
    CheckDef { name: "partial_shift", comparison: AtMost, tolerance: 1e-10, run: check_partial_shift },
    CheckDef { name: "addition", comparison: AtMost, tolerance: 1e-9, run: check_addition },
    CheckDef { name: "ivp_derivative", comparison: AtMost, tolerance: 1e-7, run: check_derivative },
    CheckDef { name: "nonvalues", comparison: Above, tolerance: 1e-12, run: check_nonvalues },
    CheckDef { name: "real_axis_values", comparison: AtMost, tolerance: 1e-12, run: check_real_axis },
    CheckDef { name: "off_axis_nonreal", comparison: Above, tolerance: 0.0, run: check_off_axis },
    CheckDef { name: "lattice_zeros", comparison: AtMost, tolerance: 1e-10, run: check_lattice_zeros },
    CheckDef { name: "lattice_poles", comparison: AtMost, tolerance: 0.0, run: check_lattice_poles },
    CheckDef { name: "half_odd_values", comparison: AtMost, tolerance: 1e-10, run: check_half_odd },
    CheckDef { name: "residues", comparison: AtMost, tolerance: 1e-8, run: check_residues },
    CheckDef { name: "real_injectivity", comparison: Above, tolerance: 0.0, run: check_injectivity },
    // cosine, sine, exp
    CheckDef { name: "pythagorean", comparison: AtMost, tolerance: 1e-12, run: check_pythagorean },
    CheckDef { name: "trig_parity", comparison: AtMost, tolerance: 1e-10, run: check_trig_parity },
    CheckDef { name: "trig_period", comparison: AtMost, tolerance: 1e-10, run: check_trig_period },
    CheckDef { name: "trig_zero_sets", comparison: AtMost, tolerance: 1e-10, run: check_trig_zeros },
    CheckDef { name: "trig_addition", comparison: AtMost, tolerance: 1e-9, run: check_trig_addition },
    CheckDef { name: "trig_ode", comparison: AtMost, tolerance: 1e-7, run: check_trig_ode },
    CheckDef { name: "trig_initial_values", comparison: AtMost, tolerance: 0.0, run: check_trig_initial },
    CheckDef { name: "removable_cure", comparison: AtMost, tolerance: 0.0, run: check_removable_cure },
    CheckDef { name: "exp_functional", comparison: AtMost, tolerance: 1e-9, run: check_exp_functional },
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

/// Tolerances as pinned per check; the series imaginary-part bound takes
/// the rigorous tail bound of the default series configuration as its slack.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    let mut map: BTreeMap<String, f64> = CHECKS.iter().map(|c| (c.name.to_string(), c.tolerance)).collect();
    map.insert("series_imag_deviation".to_string(), SeriesEvalConfig::default().tail_bound());
    map
}

fn fnv1a(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn run_suite(engine: &Engine, cfg: &VerifyConfig) -> Result<VerifyReport, VerifyError> {
    cfg.validate()?;
    let exact = coefficient_recurrence(DEFAULT_ORDER, CoeffMode::Exact)
        .expect("default order is positive")
        .exact()
        .expect("exact mode")
        .to_vec();
    let ctx = Ctx { engine, cfg, exact };
    let records: Vec<CheckRecord> = CHECKS
        .par_iter()
        .filter(|c| !cfg.disabled.contains(c.name))
        .map(|check| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(fnv1a(check.name));
            let m = (check.run)(&ctx, &mut rng);
            let tolerance = cfg.tolerances[check.name];
            let within = match check.comparison {
                AtMost => m.residual <= tolerance,
                Above => m.residual > tolerance,
            };
            CheckRecord {
                name: check.name.to_string(),
                passed: within && m.samples > 0,
                comparison: check.comparison,
                tolerance,
                max_residual: m.residual,
                worst_point: m.worst.map(|z| [crate::json::Float17(z.re), crate::json::Float17(z.im)]),
                samples_used: m.samples,
            }
        })
        .collect();
    let overall_pass = records.iter().all(|r| r.passed);
    Ok(VerifyReport {
        generator: GENERATOR,
        seed: cfg.seed,
        samples: cfg.samples,
        sample_box: cfg.sample_box,
        records,
        overall_pass,
    })
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::INFINITY)
}

fn check_picard(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let picard = picard_iterate(DEFAULT_ORDER, CoeffMode::Exact).expect("default order is positive");
    let mismatches = picard.exact().unwrap().iter().zip(&ctx.exact).filter(|(a, b)| a != b).count();
    t.record(mismatches as f64, real(DEFAULT_ORDER as f64));
    t.samples = ctx.exact.len();
    t.finish()
}

fn check_odd_coefficients(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for (n, a) in ctx.exact.iter().enumerate().step_by(2) {
        t.record(ratio_to_f64(&a.abs()), real(n as f64));
    }
    t.finish()
}

fn check_cauchy(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for (n, a) in ctx.exact.iter().enumerate() {
        let excess = if a.abs() > cauchy_bound(n) {
            1.0
        } else {
            ratio_to_f64(&(a.abs() / cauchy_bound(n))) - 1.0
        };
        t.record(excess, real(n as f64));
    }
    t.finish()
}

/// `|f(z)| <= 2|z|` on `|z| <= 0.499`.
fn check_schwarz(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.disc(rng, real(0.0), 0.499);
        t.record(ctx.f(z).norm() - 2.0 * z.norm(), z);
    })
}

/// `|f(z) - z| <= 4|z|^3 / 3` on `|z| <= 0.499`.
fn check_cubic(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.disc(rng, real(0.0), 0.499);
        t.record((ctx.f(z) - z).norm() - 4.0 * z.norm().powi(3) / 3.0, z);
    })
}

fn check_series_real_axis(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let local = ctx.engine.local();
    let rho = local.config().rho();
    ctx.sampled(rng, AtMost, |rng, t| {
        let x = real(rng.random_range(-rho..=rho));
        t.record(local.eval(x).map(|v| v.im.abs()).unwrap_or(f64::NAN), x);
    })
}

/// `|Im f(z) - y| <= 4 (x^2 + y^2) |y|` in the series disc.
fn check_series_imag(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let local = ctx.engine.local();
    let rho = local.config().rho();
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.disc(rng, real(0.0), rho);
        let v = local.eval(z).map(|v| v.im).unwrap_or(f64::NAN);
        t.record((v - z.im).abs() - 4.0 * z.norm_sqr() * z.im.abs(), z);
    })
}

fn check_pi(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let half = weierstrass_integral_halfp(1e-13).unwrap_or(f64::NAN);
    t.record((2.0 * ctx.engine.p() - 4.0 * half).abs(), real(ctx.engine.p()));
    t.finish()
}

fn check_unit_value(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let z = real(ctx.engine.p() / 2.0);
    t.record((ctx.f(z) - 1.0).norm(), z);
    t.finish()
}

/// Smallest increment of `values` on an increasing grid.
fn min_increment(t: &mut Tracker, grid: &[f64], values: &[f64]) {
    for k in 1..values.len() {
        t.record(values[k] - values[k - 1], real(grid[k]));
    }
}

fn open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
}

fn check_real_monotonicity(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(Above);
    let grid = open_grid(-0.99, 0.99, ctx.cfg.samples);
    let values: Vec<f64> = grid.iter().map(|&x| real_tangent(ctx.engine.local(), x)).collect();
    min_increment(&mut t, &grid, &values);
    t.finish()
}

/// `f(t) - t - t^3/3 > 0` for `t` in `(0.05, 0.99)`; implies `f(t) > t`.
fn check_lower_bounds(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, Above, |rng, t| {
        let x = rng.random_range(0.05..0.99);
        let fx = real_tangent(ctx.engine.local(), x);
        t.record((fx - x - x * x * x / 3.0).min(fx - x), real(x));
    })
}

fn check_oddness(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let Some(z) = ctx.regular(rng) else { return };
        t.record((ctx.f(-z) + ctx.f(z)).norm(), z);
    })
}

fn check_conjugation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let Some(z) = ctx.regular(rng) else { return };
        t.record((ctx.f(z).conj() - ctx.f(z.conj())).norm(), z);
    })
}

fn check_periodicity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let period = 2.0 * ctx.engine.p();
    ctx.sampled(rng, AtMost, |rng, t| {
        let Some(z) = ctx.regular(rng) else { return };
        t.record((ctx.f(z + period) - ctx.f(z)).norm(), z);
    })
}

/// `f(z + 2p) = f(z)` on the disc of radius `p/2` about `-p/2`.
fn check_partial_shift(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let p = ctx.engine.p();
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.disc(rng, real(-p / 2.0), p / 2.0);
        if !ctx.is_regular(z) {
            return;
        }
        t.record((ctx.f(z + 2.0 * p) - ctx.f(z)).norm(), z);
    })
}

fn check_addition(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let (Some(a), Some(z)) = (ctx.regular(rng), ctx.regular(rng)) else { return };
        if !ctx.is_regular(a + z) {
            return;
        }
        let (fa, fz) = (ctx.f(a), ctx.f(z));
        if (1.0 - fa * fz).norm() < ADDITION_MARGIN {
            return;
        }
        let residual = match Engine::addition_rhs(fa, fz) {
            Ok(rhs) => (ctx.f(a + z) - rhs).norm(),
            Err(_) => f64::NAN,
        };
        t.record(residual, a);
    })
}

/// Central difference of `f` against `1 + f^2`, relative to `max(1, |1 + f^2|)`.
fn check_derivative(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let Some(z) = ctx.regular(rng) else { return };
        let slope = (ctx.f(z + FD_STEP) - ctx.f(z - FD_STEP)) / (2.0 * FD_STEP);
        let fz = ctx.f(z);
        let rhs = 1.0 + fz * fz;
        t.record((slope - rhs).norm() / rhs.norm().max(1.0), z);
    })
}

fn check_nonvalues(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, Above, |rng, t| {
        let Some(z) = ctx.regular(rng) else { return };
        t.record(ctx.engine.tan(z).pair().nonvalue_margin(), z);
    })
}

fn check_real_axis(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let b = ctx.cfg.sample_box;
    ctx.sampled(rng, AtMost, |rng, t| {
        let x = real(rng.random_range(b.re_min..b.re_max));
        if !ctx.is_regular(x) {
            return;
        }
        t.record(ctx.f(x).im.abs(), x);
    })
}

fn check_off_axis(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, Above, |rng, t| {
        let Some(z) = ctx.uniform_where(rng, |z| z.im.abs() >= 0.1) else { return };
        t.record(ctx.f(z).im.abs(), z);
    })
}

fn check_lattice_zeros(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for m in -4..=4 {
        let z = real(ctx.engine.lattice().zero(m));
        let residual = if ctx.engine.classify(z) == PointClass::ZeroPoint {
            ctx.f(z).norm()
        } else {
            f64::INFINITY
        };
        t.record(residual, z);
    }
    t.finish()
}

fn check_lattice_poles(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let mut misses = 0.0;
    let mut worst = None;
    for m in -4..=4 {
        let z = real(ctx.engine.lattice().pole(m));
        if !ctx.engine.tan(z).is_pole() || ctx.engine.classify(z) != PointClass::PolePoint {
            misses += 1.0;
            worst = Some(z);
        }
    }
    t.record(misses, worst.unwrap_or(real(ctx.engine.p())));
    t.samples = 9;
    t.finish()
}

fn check_half_odd(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for n in -8i64..=8 {
        let z = real(ctx.engine.lattice().half_odd(n));
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        t.record((ctx.f(z) - sign).norm(), z);
    }
    t.finish()
}

fn check_residues(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for m in [-2, -1, 0, 1] {
        let z = real(ctx.engine.lattice().pole(m));
        let residual = match ctx.engine.residue_at(z, 0.01, 64) {
            Ok(r) => (r + 1.0).norm(),
            Err(_) => f64::INFINITY,
        };
        t.record(residual, z);
    }
    t.finish()
}

fn check_injectivity(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(Above);
    let half = ctx.engine.p() / 2.0;
    let grid = open_grid(-half, half, ctx.cfg.samples);
    let values: Vec<f64> = grid.iter().map(|&x| ctx.f(real(x)).re).collect();
    min_increment(&mut t, &grid, &values);
    t.finish()
}

fn check_pythagorean(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.uniform(rng);
        let v = ctx.engine.cos_sin_eval(z);
        t.record((v.c * v.c + v.s * v.s - 1.0).norm(), z);
    })
}

fn check_trig_parity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.uniform(rng);
        let (u, v) = (ctx.engine.cos_sin_eval(z), ctx.engine.cos_sin_eval(-z));
        t.record((v.c - u.c).norm().max((v.s + u.s).norm()), z);
    })
}

fn check_trig_period(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let period = 4.0 * ctx.engine.p();
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.uniform(rng);
        let (u, v) = (ctx.engine.cos_sin_eval(z), ctx.engine.cos_sin_eval(z + period));
        t.record((v.c - u.c).norm().max((v.s - u.s).norm()), z);
    })
}

fn check_trig_zeros(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let lattice = ctx.engine.lattice();
    for m in -4..=4 {
        let pole = real(lattice.pole(m));
        t.record(ctx.engine.cos(pole).norm(), pole);
        let zero = real(lattice.zero(m));
        t.record(ctx.engine.sin(zero).norm(), zero);
    }
    t.finish()
}

fn check_trig_addition(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let (a, z) = (ctx.uniform(rng), ctx.uniform(rng));
        let (u, v, w) = (ctx.engine.cos_sin_eval(a), ctx.engine.cos_sin_eval(z), ctx.engine.cos_sin_eval(a + z));
        let rc = (w.c - (u.c * v.c - u.s * v.s)).norm();
        let rs = (w.s - (u.s * v.c + u.c * v.s)).norm();
        t.record(rc.max(rs), a);
    })
}

/// `c' = -s`, `s' = c` by central differences.
fn check_trig_ode(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    ctx.sampled(rng, AtMost, |rng, t| {
        let z = ctx.uniform(rng);
        let (plus, minus, here) = (
            ctx.engine.cos_sin_eval(z + FD_STEP),
            ctx.engine.cos_sin_eval(z - FD_STEP),
            ctx.engine.cos_sin_eval(z),
        );
        let dc = (plus.c - minus.c) / (2.0 * FD_STEP);
        let ds = (plus.s - minus.s) / (2.0 * FD_STEP);
        t.record((dc + here.s).norm().max((ds - here.c).norm()), z);
    })
}

fn check_trig_initial(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    let v = ctx.engine.cos_sin_eval(real(0.0));
    t.record((v.c - 1.0).norm() + v.s.norm(), real(0.0));
    t.finish()
}

/// `c = -1`, `s = 0` exactly at `2mp` with `m` odd.
fn check_removable_cure(ctx: &Ctx, _: &mut ChaCha8Rng) -> Measured {
    let mut t = Tracker::new(AtMost);
    for m in [-3, -1, 1, 3] {
        let z = real(ctx.engine.lattice().zero(m));
        let v = ctx.engine.cos_sin_eval(z);
        t.record((v.c + 1.0).norm() + v.s.norm(), z);
    }
    t.finish()
}

fn check_exp_functional(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Measured {
    let b = ctx.cfg.sample_box;
    let (lo, hi) = (b.re_min.max(-5.0), b.re_max.min(5.0));
    let mut t = Tracker::new(AtMost);
    if lo >= hi {
        return t.finish();
    }
    let draw = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(lo..=hi), rng.random_range(b.im_min..b.im_max));
    for _ in 0..ctx.cfg.samples {
        let (a, z) = (draw(rng), draw(rng));
        let product = ctx.engine.exp_eval(a) * ctx.engine.exp_eval(z);
        let residual = (ctx.engine.exp_eval(a + z) - product).norm() / product.norm();
        t.record(residual, a);
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: BTreeSet<_> = check_names().collect();
        assert_eq!(names.len(), CHECKS.len());
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = VerifyConfig { samples: 0, ..VerifyConfig::default() };
        assert_eq!(cfg.validate(), Err(VerifyError::NoSamples));
    }

    #[test]
    fn missing_tolerance_rejected() {
        let mut cfg = VerifyConfig::default();
        cfg.tolerances.remove("oddness");
        assert_eq!(cfg.validate(), Err(VerifyError::MissingTolerance("oddness".into())));
    }

    #[test]
    fn unknown_names_rejected() {
        let mut cfg = VerifyConfig::default();
        cfg.disabled.insert("no_such_check".into());
        assert!(matches!(cfg.validate(), Err(VerifyError::UnknownCheck(_))));
        let mut cfg = VerifyConfig::default();
        cfg.sample_box.re_max = cfg.sample_box.re_min;
        assert_eq!(cfg.validate(), Err(VerifyError::InvalidBox));
    }

    #[test]
    fn tracker_extremes() {
        let mut t = Tracker::new(AtMost);
        t.record(1.0, real(1.0));
        t.record(3.0, real(2.0));
        t.record(2.0, real(3.0));
        let m = t.finish();
        assert_eq!((m.residual, m.worst, m.samples), (3.0, Some(real(2.0)), 3));
        let mut t = Tracker::new(Above);
        t.record(1.0, real(1.0));
        t.record(f64::NAN, real(2.0));
        t.record(-5.0, real(3.0));
        assert!(t.finish().residual.is_nan());
    }

    #[test]
    fn stream_hash_is_fnv1a() {
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
