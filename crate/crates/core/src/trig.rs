//! Cosine, sine and exp as rational functions of the half-angle tangent.
//!
//! With `n / d` the projective tangent at `z/2`,
//! `c = (d^2 - n^2) / (d^2 + n^2)` and `s = 2nd / (d^2 + n^2)`. Where `z/2`
//! is a pole the pair has `d = 0` and the formulas give `c = -1`, `s = 0`
//! directly. The denominator `d^2 + n^2` vanishes only at the nonvalues `±i`.

use num::complex::Complex64;

use crate::engine::Engine;

/// Above this `|Im z|`, cosine and sine are assembled from `z/2` by the
/// double-angle formulas; beyond it `n/d` sits too close to `±i` for the
/// direct formulas.
const TRIG_DIRECT_IM: f64 = 4.0;
/// Above this `|Re z|`, exp is assembled by repeated squaring.
const EXP_DIRECT_RE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigValue {
    pub c: Complex64,
    pub s: Complex64,
}

impl Engine {
    pub fn cos_sin_eval(&self, z: Complex64) -> TrigValue {
        if z.im.abs() > TRIG_DIRECT_IM && z.im.is_finite() {
            let half = self.cos_sin_eval(z * 0.5);
            return TrigValue {
                c: half.c * half.c - half.s * half.s,
                s: 2.0 * half.s * half.c,
            };
        }
        let pair = self.tan(z * 0.5).pair();
        let (n, d) = (pair.numerator(), pair.denominator());
        let den = d * d + n * n;
        TrigValue {
            c: (d * d - n * n) / den,
            s: 2.0 * n * d / den,
        }
    }

    pub fn cos(&self, z: Complex64) -> Complex64 {
        self.cos_sin_eval(z).c
    }

    pub fn sin(&self, z: Complex64) -> Complex64 {
        self.cos_sin_eval(z).s
    }

    /// `c(-iz) + i s(-iz)`.
    ///
    /// Evaluated as the rotation `(d + in) / (d - in)` of the tangent pair at
    /// `-iz/2`, which equals the sum above identically but avoids cancelling
    /// `c` against `s` when `Re z` is negative. Large `|Re z|` is halved first
    /// and the result squared back.
    pub fn exp_eval(&self, z: Complex64) -> Complex64 {
        let mut w = z;
        let mut halvings = 0;
        while w.re.abs() > EXP_DIRECT_RE && halvings < 1100 {
            w *= 0.5;
            halvings += 1;
        }
        let minus_i = Complex64::new(0.0, -1.0);
        let mut e = self.tan(minus_i * w * 0.5).pair().rotation();
        for _ in 0..halvings {
            e = e * e;
        }
        e
    }
}
