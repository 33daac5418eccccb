//! Tangent values as projective pairs `(n, d)` meaning `n / d`.
//!
//! Duplication `w -> 2w / (1 - w^2)` becomes the polynomial map
//! `(n, d) -> (2nd, d^2 - n^2)`, which passes through `w = ±1` (giving a
//! pole, `d = 0`) and through poles (giving a zero) without special cases.

use num::complex::Complex64;

use crate::series::LocalSolution;

/// A pair `(n, d) != (0, 0)` standing for the value `n / d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePair {
    n: Complex64,
    d: Complex64,
}

impl ProjectivePair {
    /// Returns `None` for `(0, 0)` or non-finite components.
    pub fn new(n: Complex64, d: Complex64) -> Option<Self> {
        let finite = n.re.is_finite() && n.im.is_finite() && d.re.is_finite() && d.im.is_finite();
        if !finite || (n == Complex64::new(0.0, 0.0) && d == Complex64::new(0.0, 0.0)) {
            return None;
        }
        Some(Self { n, d })
    }

    /// The pair `(w, 1)`, normalized.
    pub fn from_value(w: Complex64) -> Self {
        Self { n: w, d: Complex64::new(1.0, 0.0) }.normalized()
    }

    /// A pair that carries NaN; only produced for non-finite inputs.
    pub(crate) fn undefined() -> Self {
        Self {
            n: Complex64::new(f64::NAN, f64::NAN),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn numerator(&self) -> Complex64 {
        self.n
    }

    pub fn denominator(&self) -> Complex64 {
        self.d
    }

    /// Scales so that `max(|n|, |d|) = 1`. Real pairs stay real.
    pub fn normalized(self) -> Self {
        let scale = self.n.norm().max(self.d.norm());
        if !(scale > 0.0) || !scale.is_finite() {
            return self;
        }
        Self { n: self.n / scale, d: self.d / scale }
    }

    /// One step of the duplication formula, normalized.
    pub fn duplicate(self) -> Self {
        let n = 2.0 * self.n * self.d;
        let d = self.d * self.d - self.n * self.n;
        Self { n, d }.normalized()
    }

    /// `n / d`, or `None` when `d = 0`.
    pub fn value(&self) -> Option<Complex64> {
        if self.d == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.n / self.d)
        }
    }

    /// Scale-free pole test `|d| <= ratio * |n|`.
    pub fn is_pole(&self, ratio: f64) -> bool {
        self.d.norm() <= ratio * self.n.norm()
    }

    /// The same point with the denominator snapped to zero.
    pub fn to_pole(self) -> Self {
        let m = self.n.norm();
        let n = if m > 0.0 { self.n / m } else { Complex64::new(1.0, 0.0) };
        Self { n, d: Complex64::new(0.0, 0.0) }
    }

    /// `|n^2 + d^2| / max(|n|, |d|)^2`; zero exactly when `n / d = ±i`.
    pub fn nonvalue_margin(&self) -> f64 {
        let scale = self.n.norm().max(self.d.norm());
        (self.n * self.n + self.d * self.d).norm() / (scale * scale)
    }

    /// `(d + i n) / (d - i n)`: the unit rotation by twice the angle whose
    /// tangent is `n / d`. A pole maps to `-1`.
    pub fn rotation(&self) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        (self.d + i * self.n) / (self.d - i * self.n)
    }
}

/// Result of carrying a point into the series disc and back out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifted {
    pub pair: ProjectivePair,
    pub halvings: u32,
    pub base_point: Complex64,
}

/// Halves `z` until it lies in the series disc, evaluates the series there
/// and duplicates back up once per halving.
///
/// Halving by two is exact in binary floating point, so the base point is
/// exactly `z / 2^k`. Non-finite input yields an undefined pair.
pub fn lift(local: &LocalSolution, z: Complex64) -> Lifted {
    let rho = local.config().rho();
    let mut base = z;
    let mut halvings = 0;
    while base.norm() > rho && halvings < 1100 {
        base *= 0.5;
        halvings += 1;
    }
    let pair = match local.eval(base) {
        Ok(w) => (0..halvings).fold(ProjectivePair::from_value(w), |acc, _| acc.duplicate()),
        Err(_) => ProjectivePair::undefined(),
    };
    Lifted { pair, halvings, base_point: base }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_pair_rejected() {
        assert!(ProjectivePair::new(c(0.0, 0.0), c(0.0, 0.0)).is_none());
        assert!(ProjectivePair::new(c(f64::NAN, 0.0), c(1.0, 0.0)).is_none());
    }

    #[test]
    fn zero_duplicates_to_zero() {
        let w = ProjectivePair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap().duplicate();
        assert_eq!(w.value(), Some(c(0.0, 0.0)));
    }

    #[test]
    fn unit_value_duplicates_to_pole() {
        let w = ProjectivePair::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap().duplicate();
        assert_eq!(w.numerator(), c(1.0, 0.0));
        assert_eq!(w.denominator(), c(0.0, 0.0));
        assert!(w.is_pole(1e-12));
        assert_eq!(w.value(), None);
        // and the pole duplicates to a zero
        let z = w.duplicate();
        assert_eq!(z.value(), Some(c(0.0, 0.0)));
    }

    #[test]
    fn quarter_value_duplicates_to_one() {
        let w = ProjectivePair::from_value(c(2f64.sqrt() - 1.0, 0.0)).duplicate();
        assert!((w.value().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normalization() {
        let w = ProjectivePair::new(c(3.0, 4.0), c(0.5, 0.0)).unwrap().normalized();
        assert!((w.numerator().norm() - 1.0).abs() < 1e-15);
        assert!((w.value().unwrap() - c(6.0, 8.0)).norm() < 1e-14);
    }

    #[test]
    fn nonvalue_margin_detects_i() {
        let w = ProjectivePair::from_value(c(0.0, 1.0));
        assert_eq!(w.nonvalue_margin(), 0.0);
        assert!(ProjectivePair::from_value(c(0.3, 0.2)).nonvalue_margin() > 0.5);
    }

    #[test]
    fn rotation_of_pole_is_minus_one() {
        let w = ProjectivePair::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(w.rotation(), c(-1.0, 0.0));
        assert_eq!(ProjectivePair::from_value(c(0.0, 0.0)).rotation(), c(1.0, 0.0));
    }
}
