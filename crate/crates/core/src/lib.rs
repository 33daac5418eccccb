//! The complex tangent built from the initial value problem
//! `w' = 1 + w^2`, `w(0) = 0`: a local power series, extended to the whole
//! plane by period reduction and the duplication formula. Sine, cosine and
//! exp follow as rational functions of the half-angle tangent.
//!
//! ```
//! use num::complex::Complex64;
//! use tangent::Engine;
//!
//! let engine = Engine::global().unwrap();
//! let pi = 2.0 * engine.p();
//! assert!((pi - std::f64::consts::PI).abs() < 1e-14);
//! assert!(engine.tan(Complex64::new(engine.p(), 0.0)).is_pole());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod engine;
pub mod json;
pub mod literal;
pub mod projective;
pub mod series;
pub mod trig;
pub mod verify;

pub use constants::{compute_p, weierstrass_integral_halfp, ConstantError, FundamentalConstant};
pub use engine::{Engine, EngineConfig, EngineError, EvalKind, EvalOutcome, Lattice, PointClass, ReductionTrace};
pub use literal::{format_complex, parse_complex};
pub use projective::ProjectivePair;
pub use series::{
    coefficient_recurrence, eval_series, picard_iterate, CoeffMode, LocalSolution, SeriesError, SeriesEvalConfig,
    TaylorCoefficients,
};
pub use trig::TrigValue;
pub use verify::{run_suite, VerifyConfig, VerifyReport};
