//! Double-double arithmetic (about 32 significant digits) and an
//! extended-precision Hurwitz zeta for the zeta-derivative oracles.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::special::{BERNOULLI_EVEN, EM_SHIFT, EM_TERMS};
use crate::error::{Error, Result};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const LN2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const E: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::E,
        lo: 1.445_646_891_729_250_2e-16,
    };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        DoubleDouble::from(num as f64) / DoubleDouble::from(den as f64)
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// `exp(self) - 1` for tiny arguments, by Taylor series.
    fn expm1_small(self) -> Self {
        let mut term = self;
        let mut sum = self;
        for n in 2..30 {
            term = term * self / DoubleDouble::from(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - DoubleDouble::LN2 * DoubleDouble::from(k);
        // e^r = (e^{r/1024})^1024, carried as expm1 to avoid cancellation
        let mut p = r.ldexp(-10).expm1_small();
        for _ in 0..10 {
            p = p.ldexp(1) + p.sqr();
        }
        (p + DoubleDouble::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of nonpositive double-double");
        let mut y = DoubleDouble::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DoubleDouble::ONE;
        }
        y
    }

    /// `self^p` for positive `self`.
    pub fn powf(self, p: DoubleDouble) -> Self {
        (p * self.ln()).exp()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * DoubleDouble::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

/// Extended-precision Hurwitz zeta and its `s`-derivative; same expansion
/// as [`super::hurwitz_zeta`] carried out in double-double arithmetic.
pub fn hurwitz_zeta_extended(
    s: DoubleDouble,
    a: DoubleDouble,
) -> Result<(DoubleDouble, DoubleDouble)> {
    if !(a.hi > 0.0 && a.to_f64() <= 1.0) {
        return Err(Error::input(format!(
            "Hurwitz parameter a = {} outside (0, 1]",
            a.to_f64()
        )));
    }
    if s.hi == 1.0 && s.lo == 0.0 {
        return Err(Error::Pole {
            s: 1.0,
            residue: 1.0,
        });
    }
    let one = DoubleDouble::ONE;
    let mut value = DoubleDouble::ZERO;
    let mut deriv = DoubleDouble::ZERO;
    for n in 0..EM_SHIFT {
        let x = DoubleDouble::from(n as f64) + a;
        let lx = x.ln();
        let p = (-(s * lx)).exp();
        value = value + p;
        deriv = deriv - lx * p;
    }
    let x = DoubleDouble::from(EM_SHIFT as f64) + a;
    let lx = x.ln();
    let xs = (-(s * lx)).exp();
    let x1s = x * xs;
    let sm1 = s - one;
    let half = DoubleDouble::from(0.5);
    value = value + x1s / sm1 + half * xs;
    deriv = deriv - lx * x1s / sm1 - x1s / (sm1 * sm1) - half * lx * xs;

    let mut poly = s;
    let mut dpoly = one;
    let mut fact = DoubleDouble::from(2.0);
    let mut xpow = xs / x;
    let x2 = x * x;
    for k in 1..=EM_TERMS {
        let (num, den) = BERNOULLI_EVEN[k - 1];
        let coeff = DoubleDouble::from_ratio(num, den) / fact;
        value = value + coeff * poly * xpow;
        deriv = deriv + coeff * (dpoly - lx * poly) * xpow;
        for shift in [2 * k - 1, 2 * k] {
            let f = s + DoubleDouble::from(shift as f64);
            dpoly = dpoly * f + poly;
            poly = poly * f;
        }
        fact = fact * DoubleDouble::from(((2 * k + 1) * (2 * k + 2)) as f64);
        xpow = xpow / x2;
    }
    Ok((value, deriv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1.0)
    }

    #[test]
    fn arithmetic_keeps_low_word() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0);
        assert!(close(back, DoubleDouble::ONE, 1e-31));
        let tiny = DoubleDouble::from(1e-20);
        let s = DoubleDouble::ONE + tiny - DoubleDouble::ONE;
        assert!(close(s, tiny, 1e-12));
    }

    #[test]
    fn exp_and_ln_constants() {
        assert!(close(DoubleDouble::ONE.exp(), DoubleDouble::E, 1e-31));
        assert!(close(
            DoubleDouble::from(2.0).ln(),
            DoubleDouble::LN2,
            1e-31
        ));
        let x = DoubleDouble::from(7.25);
        assert!(close(x.ln().exp(), x, 1e-30));
        let y = DoubleDouble::from(-3.5);
        assert!(close(y.exp().ln(), y, 1e-30));
    }

    #[test]
    fn extended_zeta_two() {
        let (v, _) = hurwitz_zeta_extended(DoubleDouble::from(2.0), DoubleDouble::ONE).unwrap();
        let pi2_6 = DoubleDouble::PI * DoubleDouble::PI / DoubleDouble::from(6.0);
        assert!(close(v, pi2_6, 1e-29), "{v:?} vs {pi2_6:?}");
    }

    #[test]
    fn extended_zeta_prime_zero() {
        let (v, d) = hurwitz_zeta_extended(DoubleDouble::ZERO, DoubleDouble::ONE).unwrap();
        assert!(close(v, DoubleDouble::from(-0.5), 1e-30));
        let two_pi = DoubleDouble::PI * DoubleDouble::from(2.0);
        let expected = -(two_pi.ln() * DoubleDouble::from(0.5));
        assert!(close(d, expected, 1e-29), "{d:?} vs {expected:?}");
    }

    #[test]
    fn agrees_with_double_path() {
        for &(s, a) in &[(0.0, 0.25), (2.5, 0.6), (-1.5, 0.9)] {
            let (v, d) = super::super::hurwitz_zeta(s, a).unwrap();
            let (ve, de) =
                hurwitz_zeta_extended(DoubleDouble::from(s), DoubleDouble::from(a)).unwrap();
            assert!((v - ve.to_f64()).abs() < 1e-12);
            assert!((d - de.to_f64()).abs() < 1e-12);
        }
    }
}
