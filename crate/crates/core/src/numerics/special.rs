//! Special functions used by the zeta engine and its oracles.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Number of Euler-Maclaurin correction terms.
pub const EM_TERMS: usize = 15;
/// Shift point of the Euler-Maclaurin expansion.
pub const EM_SHIFT: usize = 20;

/// Bernoulli numbers B_2, B_4, ..., B_32 as (numerator, denominator).
pub(crate) const BERNOULLI_EVEN: [(i64, i64); 16] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
    (-7709321041217, 510),
];

/// 1/Gamma(s), exactly zero at the nonpositive integers.
pub fn rgamma(s: f64) -> f64 {
    if s <= 0.0 && s == s.round() {
        0.0
    } else {
        1.0 / gamma(s)
    }
}

pub fn gamma_fn(s: f64) -> f64 {
    gamma(s)
}

/// Hurwitz zeta `sum_{n>=0} (n+a)^{-s}` and its derivative in `s`, by
/// Euler-Maclaurin summation shifted to `a + 20` with 15 Bernoulli
/// corrections.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::input(format!(
            "Hurwitz parameter a = {a} outside (0, 1]"
        )));
    }
    if !s.is_finite() {
        return Err(Error::input("non-finite s"));
    }
    if s == 1.0 {
        return Err(Error::Pole { s, residue: 1.0 });
    }

    // a shorter head limits cancellation against the growing tail for s < 0
    let shift = if s < -0.5 { 8 } else { EM_SHIFT };
    let mut value = 0.0;
    let mut deriv = 0.0;
    for n in 0..shift {
        let x = n as f64 + a;
        let lx = x.ln();
        let p = (-s * lx).exp();
        value += p;
        deriv -= lx * p;
    }

    let x = shift as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp(); // x^{-s}
    let x1s = x * xs; // x^{1-s}
    let sm1 = s - 1.0;
    value += x1s / sm1 + 0.5 * xs;
    deriv += -lx * x1s / sm1 - x1s / (sm1 * sm1) - 0.5 * lx * xs;

    // Correction k: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    let mut poly = s; // rising product, 2k-1 factors
    let mut dpoly = 1.0;
    let mut fact = 2.0; // (2k)!
    let mut xpow = xs / x; // x^{-s-1}
    for k in 1..=EM_TERMS {
        let (num, den) = BERNOULLI_EVEN[k - 1];
        let coeff = num as f64 / den as f64 / fact;
        value += coeff * poly * xpow;
        deriv += coeff * (dpoly - lx * poly) * xpow;

        // advance to k+1: multiply by (s+2k-1)(s+2k)
        for shift in [2 * k - 1, 2 * k] {
            let f = s + shift as f64;
            dpoly = dpoly * f + poly;
            poly *= f;
        }
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        xpow /= x * x;
    }
    Ok((value, deriv))
}

/// Riemann zeta and its derivative, as the Hurwitz function at a = 1.
pub fn riemann_zeta(s: f64) -> Result<(f64, f64)> {
    hurwitz_zeta(s, 1.0)
}
