//! Complex literals of the form `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`.
//!
//! No whitespace is allowed. Parts are decimal floats with an optional
//! exponent; `inf` and `nan` are rejected.

use std::fmt;

use num::complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid complex literal {input:?}: {reason}")]
pub struct ParseComplexError {
    input: String,
    reason: &'static str,
}

fn fail(input: &str, reason: &'static str) -> ParseComplexError {
    ParseComplexError { input: input.to_string(), reason }
}

fn parse_real(s: &str, input: &str) -> Result<f64, ParseComplexError> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return Err(fail(input, "expected a decimal number"));
    }
    if !body.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return Err(fail(input, "unexpected character"));
    }
    let v: f64 = s.parse().map_err(|_| fail(input, "malformed number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(fail(input, "number out of range"))
    }
}

/// Imaginary coefficient; a bare sign stands for ±1.
fn parse_imag(s: &str, input: &str) -> Result<f64, ParseComplexError> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s, input),
    }
}

pub fn parse_complex(input: &str) -> Result<Complex64, ParseComplexError> {
    if input.is_empty() {
        return Err(fail(input, "empty"));
    }
    let Some(head) = input.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(input, input)?, 0.0));
    };
    // The real/imaginary split is the last sign not at the start and not
    // part of an exponent.
    let bytes = head.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(
            parse_real(&head[..k], input)?,
            parse_imag(&head[k..], input)?,
        )),
        None => Ok(Complex64::new(0.0, parse_imag(head, input)?)),
    }
}

/// Canonical `a+bi` / `a-bi` rendering; parses back to the same value.
pub struct ComplexLiteral(pub Complex64);

impl fmt::Display for ComplexLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.0;
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{}{}{}i", z.re, sign, z.im.abs())
    }
}

pub fn format_complex(z: Complex64) -> String {
    ComplexLiteral(z).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn accepted_forms() {
        assert_eq!(parse_complex("0+0i").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_complex("1.5707963267948966+0i").unwrap(), c(1.5707963267948966, 0.0));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), c(-1.5, -2.0));
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("-.5").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5E+2i").unwrap(), c(1e-3, 250.0));
        assert_eq!(parse_complex("-1e5i").unwrap(), c(0.0, -1e5));
    }

    #[test]
    fn rejected_forms() {
        for bad in ["", "1 + 2i", "inf", "nan+0i", "1+nani", "0x10", "1+2j", "++1", "1+2ii", "e5", "1e999"] {
            assert!(parse_complex(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_complex(c(0.0, 0.0)), "0+0i");
        assert_eq!(format_complex(c(1.5, -2.0)), "1.5-2i");
        assert_eq!(format_complex(c(-0.0, -0.0)), "-0-0i");
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(re in proptest::num::f64::NORMAL | proptest::num::f64::ZERO,
                                   im in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
            let z = c(re, im);
            let text = format_complex(z);
            let back = parse_complex(&text).unwrap();
            prop_assert_eq!(back.re.to_bits(), re.to_bits());
            prop_assert_eq!(back.im.to_bits(), im.to_bits());
            prop_assert_eq!(format_complex(back), text);
        }
    }
}
