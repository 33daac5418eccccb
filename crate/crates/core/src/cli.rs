//! Command-line front end.
//!
//! Exit codes: 0 success (a pole is an answer), 1 verification failure,
//! 2 usage or parse error, 3 internal numeric or I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use num::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Engine, EngineConfig, EngineError};
use crate::json::{float_literal, Float17};
use crate::literal::{parse_complex, ParseComplexError};
use crate::series::{coefficient_recurrence, CoeffMode};
use crate::verify::{run_suite, VerifyConfig, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const MAX_TABLE_ROWS: usize = 10_000_000;
const MAX_GRID_SIDE: usize = 16_384;
const MAX_EXACT_ORDER: usize = 2048;
const MAX_FLOAT_ORDER: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "tangent", version, about = "The complex tangent from w' = 1 + w^2, w(0) = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Func {
    Tan,
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Tan => "tan",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridFormat {
    Ppm,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print π = 2p with its error bound.
    Pi {
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
    },
    /// Evaluate one function at one complex point.
    Eval {
        #[arg(long = "fn", value_enum)]
        func: Func,
        /// Complex literal such as 1.5-2i.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex_arg)]
        z: Complex64,
        /// Output is always a single JSON object; accepted for symmetry.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate a function along the real axis.
    Table {
        #[arg(long = "fn", value_enum)]
        func: Func,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long, allow_hyphen_values = true)]
        step: f64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Sample a function on a rectangle; PPM domain coloring or CSV.
    Grid {
        #[arg(long = "fn", value_enum)]
        func: Func,
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = GridFormat::Ppm)]
        format: GridFormat,
    },
    /// Run the property suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
    /// Export Taylor coefficients at the origin as JSON.
    Coeffs {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        exact: bool,
    },
}

fn parse_complex_arg(s: &str) -> Result<Complex64, ParseComplexError> {
    parse_complex(s)
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Verify(_) => EXIT_USAGE,
            CliError::Engine(_) | CliError::Io(_) | CliError::Json(_) => EXIT_INTERNAL,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn engine() -> Result<Engine, CliError> {
    Ok(Engine::new(EngineConfig::default())?)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Pi { tol } => cmd_pi(tol, out),
        Command::Eval { func, z, json: _ } => cmd_eval(func, z, out),
        Command::Table { func, start, stop, step, format } => cmd_table(func, start, stop, step, format, out),
        Command::Grid { func, re_min, re_max, im_min, im_max, width, height, out: path, format } => {
            let spec = GridSpec { func, re_min, re_max, im_min, im_max, width, height };
            cmd_grid(spec, path, format, out)
        }
        Command::Verify { seed, samples, json } => cmd_verify(seed, samples, json, out),
        Command::Coeffs { order, exact } => cmd_coeffs(order, exact, out),
    }
}

fn cmd_pi(tol: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(usage(format!("--tol must be positive and finite, got {tol}")));
    }
    let engine = Engine::new(EngineConfig { p_tolerance: tol, ..EngineConfig::default() })?;
    let constant = engine.constant();
    #[derive(Serialize)]
    struct PiJson {
        pi: Float17,
        bound: Float17,
        method: &'static str,
    }
    let body = PiJson {
        pi: Float17(2.0 * constant.p),
        bound: Float17(2.0 * constant.tolerance),
        method: constant.method.as_str(),
    };
    writeln!(out, "{}", serde_json::to_string(&body)?)?;
    Ok(EXIT_OK)
}

/// A function value, or a pole (only the tangent has poles).
enum Sample {
    Finite(Complex64),
    Pole,
}

fn evaluate(engine: &Engine, func: Func, z: Complex64) -> Sample {
    match func {
        Func::Tan => match engine.tan(z).value() {
            Some(v) => Sample::Finite(v),
            None => Sample::Pole,
        },
        Func::Sin => Sample::Finite(engine.sin(z)),
        Func::Cos => Sample::Finite(engine.cos(z)),
        Func::Exp => Sample::Finite(engine.exp_eval(z)),
    }
}

#[derive(Serialize)]
struct EvalJson {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    re: Option<Float17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Float17>,
}

impl From<&Sample> for EvalJson {
    fn from(s: &Sample) -> Self {
        match s {
            Sample::Finite(v) => EvalJson { kind: "finite", re: Some(Float17(v.re)), im: Some(Float17(v.im)) },
            Sample::Pole => EvalJson { kind: "pole", re: None, im: None },
        }
    }
}

fn cmd_eval(func: Func, z: Complex64, out: &mut dyn Write) -> Result<i32, CliError> {
    let engine = engine()?;
    let sample = evaluate(&engine, func, z);
    writeln!(out, "{}", serde_json::to_string(&EvalJson::from(&sample))?)?;
    Ok(EXIT_OK)
}

/// `⌊(stop - start) / step⌋ + 1`, validated.
fn table_rows(start: f64, stop: f64, step: f64) -> Result<usize, CliError> {
    if ![start, stop, step].iter().all(|v| v.is_finite()) {
        return Err(usage("--start, --stop and --step must be finite"));
    }
    if !(step > 0.0) {
        return Err(usage("--step must be positive"));
    }
    if stop < start {
        return Err(usage("--stop must not be below --start"));
    }
    let span = ((stop - start) / step).floor();
    if !(span < MAX_TABLE_ROWS as f64) {
        return Err(usage(format!("table would exceed {MAX_TABLE_ROWS} rows")));
    }
    Ok(span as usize + 1)
}

fn csv_float(x: f64) -> String {
    float_literal(x).unwrap_or_default()
}

fn cmd_table(
    func: Func,
    start: f64,
    stop: f64,
    step: f64,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let rows = table_rows(start, stop, step)?;
    let engine = engine()?;
    let samples: Vec<(f64, Sample)> = (0..rows)
        .map(|k| {
            let x = start + k as f64 * step;
            (x, evaluate(&engine, func, Complex64::new(x, 0.0)))
        })
        .collect();
    match format {
        TableFormat::Csv => {
            writeln!(out, "x,kind,re,im")?;
            for (x, s) in &samples {
                match s {
                    Sample::Finite(v) => {
                        writeln!(out, "{},finite,{},{}", csv_float(*x), csv_float(v.re), csv_float(v.im))?
                    }
                    Sample::Pole => writeln!(out, "{},pole,,", csv_float(*x))?,
                }
            }
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                x: Float17,
                #[serde(flatten)]
                value: EvalJson,
            }
            let rows: Vec<Row> = samples.iter().map(|(x, s)| Row { x: Float17(*x), value: s.into() }).collect();
            #[derive(Serialize)]
            struct TableJson {
                #[serde(rename = "fn")]
                func: &'static str,
                rows: Vec<Row>,
            }
            let body = TableJson { func: func.name(), rows };
            writeln!(out, "{}", serde_json::to_string(&body)?)?;
        }
    }
    Ok(EXIT_OK)
}

struct GridSpec {
    func: Func,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    width: usize,
    height: usize,
}

impl GridSpec {
    fn validate(&self) -> Result<(), CliError> {
        let bounds = [self.re_min, self.re_max, self.im_min, self.im_max];
        if !bounds.iter().all(|v| v.is_finite()) {
            return Err(usage("grid bounds must be finite"));
        }
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(usage("grid needs --re-min < --re-max and --im-min < --im-max"));
        }
        if self.width == 0 || self.height == 0 || self.width > MAX_GRID_SIDE || self.height > MAX_GRID_SIDE {
            return Err(usage(format!("--width and --height must lie in 1..={MAX_GRID_SIDE}")));
        }
        Ok(())
    }

    /// Centre of pixel `(col, row)`; row 0 is the top edge (`im_max`).
    fn point(&self, col: usize, row: usize) -> Complex64 {
        let re = self.re_min + (self.re_max - self.re_min) * (col as f64 + 0.5) / self.width as f64;
        let im = self.im_max - (self.im_max - self.im_min) * (row as f64 + 0.5) / self.height as f64;
        Complex64::new(re, im)
    }
}

pub const PPM_MAPPING: &str = "hue = arg(f) / (2 pi) mod 1 with red at arg 0; saturation = 1; \
lightness = |f| / (1 + |f|); HSL to RGB; poles and non-finite values white; \
pixel (col,row) samples re = re_min + (re_max-re_min)(col+0.5)/width, im = im_max - (im_max-im_min)(row+0.5)/height";

/// HSL colour for one value, per [`PPM_MAPPING`].
pub fn domain_color(value: Option<Complex64>) -> [u8; 3] {
    let Some(v) = value.filter(|v| v.re.is_finite() && v.im.is_finite()) else {
        return [255, 255, 255];
    };
    let modulus = v.norm();
    let lightness = if modulus.is_finite() { modulus / (1.0 + modulus) } else { 1.0 };
    let hue = if v.is_zero() { 0.0 } else { (v.arg() / std::f64::consts::TAU).rem_euclid(1.0) };
    hsl_to_rgb(hue, 1.0, lightness)
}

fn hsl_to_rgb(hue: f64, saturation: f64, lightness: f64) -> [u8; 3] {
    let chroma = (1.0 - (2.0 * lightness - 1.0).abs()) * saturation;
    let h = hue * 6.0;
    let x = chroma * (1.0 - (h.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    let m = lightness - chroma / 2.0;
    let to_byte = |c: f64| ((c + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to_byte(r), to_byte(g), to_byte(b)]
}

fn cmd_grid(spec: GridSpec, path: PathBuf, format: GridFormat, out: &mut dyn Write) -> Result<i32, CliError> {
    spec.validate()?;
    let engine = engine()?;
    let rows: Vec<Vec<(Complex64, Sample)>> = (0..spec.height)
        .into_par_iter()
        .map(|row| {
            (0..spec.width)
                .map(|col| {
                    let z = spec.point(col, row);
                    (z, evaluate(&engine, spec.func, z))
                })
                .collect()
        })
        .collect();

    let mut file = BufWriter::new(File::create(&path)?);
    match format {
        GridFormat::Ppm => {
            write!(file, "P6\n# tangent grid fn={}\n# {}\n{} {}\n255\n", spec.func.name(), PPM_MAPPING, spec.width, spec.height)?;
            for (_, sample) in rows.iter().flatten() {
                let value = match sample {
                    Sample::Finite(v) => Some(*v),
                    Sample::Pole => None,
                };
                file.write_all(&domain_color(value))?;
            }
        }
        GridFormat::Csv => {
            writeln!(file, "re,im,abs,arg,kind")?;
            for (z, sample) in rows.iter().flatten() {
                match sample {
                    Sample::Finite(v) => writeln!(
                        file,
                        "{},{},{},{},finite",
                        csv_float(z.re),
                        csv_float(z.im),
                        csv_float(v.norm()),
                        csv_float(v.arg())
                    )?,
                    Sample::Pole => writeln!(file, "{},{},,,pole", csv_float(z.re), csv_float(z.im))?,
                }
            }
        }
    }
    file.flush()?;
    writeln!(out, "wrote {}x{} {} grid to {}", spec.width, spec.height, spec.func.name(), path.display())?;
    Ok(EXIT_OK)
}

fn cmd_verify(seed: u64, samples: usize, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = VerifyConfig { seed, samples, ..VerifyConfig::default() };
    cfg.validate()?;
    let engine = engine()?;
    let report = run_suite(&engine, &cfg)?;
    if json {
        writeln!(out, "{}", serde_json::to_string(&report)?)?;
    } else {
        for r in &report.records {
            writeln!(
                out,
                "{} {:<28} residual={:<24} tol={:e} samples={}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                format!("{:e}", r.max_residual),
                r.tolerance,
                r.samples_used
            )?;
        }
        writeln!(
            out,
            "overall: {} (seed {}, {} samples, {})",
            if report.overall_pass { "PASS" } else { "FAIL" },
            report.seed,
            report.samples,
            report.generator
        )?;
    }
    Ok(if report.overall_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_coeffs(order: usize, exact: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let limit = if exact { MAX_EXACT_ORDER } else { MAX_FLOAT_ORDER };
    if order == 0 || order > limit {
        return Err(usage(format!("--order must lie in 1..={limit}")));
    }
    let mode = if exact { CoeffMode::Exact } else { CoeffMode::Float };
    let coeffs = coefficient_recurrence(order, mode).map_err(EngineError::from)?;
    #[derive(Serialize)]
    #[serde(untagged)]
    enum CoeffJson {
        Exact { n: usize, numerator: String, denominator: String },
        Float { n: usize, value: Float17 },
    }
    let body: Vec<CoeffJson> = match coeffs.exact() {
        Some(exact) => exact
            .iter()
            .enumerate()
            .map(|(n, q)| CoeffJson::Exact { n, numerator: q.numer().to_string(), denominator: q.denom().to_string() })
            .collect(),
        None => coeffs
            .values()
            .into_iter()
            .enumerate()
            .map(|(n, v)| CoeffJson::Float { n, value: Float17(v) })
            .collect(),
    };
    writeln!(out, "{}", serde_json::to_string(&body)?)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_count_formula() {
        assert_eq!(table_rows(0.0, 1.0, 0.25).unwrap(), 5);
        assert_eq!(table_rows(0.0, 1.0, 0.3).unwrap(), 4);
        assert_eq!(table_rows(2.0, 2.0, 1.0).unwrap(), 1);
        // 0.3 / 0.1 rounds to 2.9999999999999996 in binary floating point
        assert_eq!(table_rows(0.0, 0.3, 0.1).unwrap(), 3);
        assert!(table_rows(1.0, 0.0, 0.1).is_err());
        assert!(table_rows(0.0, 1.0, 0.0).is_err());
        assert!(table_rows(0.0, 1e12, 1e-3).is_err());
    }

    #[test]
    fn colors() {
        assert_eq!(domain_color(None), [255, 255, 255]);
        assert_eq!(domain_color(Some(Complex64::new(0.0, 0.0))), [0, 0, 0]);
        assert_eq!(domain_color(Some(Complex64::new(1.0, 0.0))), [255, 0, 0]);
        let [r, g, b] = domain_color(Some(Complex64::new(-1e9, 0.0)));
        assert!(r == 255 && g == 255 && b == 255);
    }

    #[test]
    fn pixel_centres() {
        let spec = GridSpec { func: Func::Tan, re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0, width: 2, height: 2 };
        assert_eq!(spec.point(0, 0), Complex64::new(-0.5, 0.5));
        assert_eq!(spec.point(1, 1), Complex64::new(0.5, -0.5));
    }
}
