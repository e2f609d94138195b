//! Heat traces and spectral zeta functions of exactly known Laplacian
//! spectra.
//!
//! The zeta function is continued by splitting the Mellin integral of the
//! heat trace at `t = epsilon`:
//!
//! ```text
//! zeta(s) = 1/Gamma(s) [ int_0^eps t^{s-1} (Tr - h) dt + int_eps^inf t^{s-1} (Tr - h) dt ]
//! ```
//!
//! On `[0, eps]` the trace is written in its image (Poisson-summed) form
//! `A t^{-N/2} (1 + exponentially small images)`. The leading power and the
//! kernel subtraction are integrated in closed form, which produces the pole
//! at `s = N/2` explicitly; the image terms and the large-`t` part are
//! entire in `s` and are integrated numerically.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, integrate, log_abs_det, rgamma, Matrix, EULER_GAMMA};

/// `exp(-LOG_CUTOFF)` is below the relative accuracy we care about.
const LOG_CUTOFF: f64 = 46.0;
const ZERO_OFFSET_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-14;

/// One symbolic eigenvalue family.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `{((2 pi j + offset) / length)^2 : j in Z}`, each with multiplicity
    /// `weight`. This is the spectrum of `-d^2/dx^2` on a circle of the given
    /// length acting on sections of a flat bundle with holonomy angle
    /// `offset`.
    Arithmetic {
        length: f64,
        offset: f64,
        weight: usize,
    },
    /// `{|2 pi v|^2 : v in dual lattice}`, each with multiplicity `weight`;
    /// `basis` rows generate the lattice of the flat torus `R^N / lattice`.
    Lattice { basis: Matrix, weight: usize },
}

impl Family {
    fn dimension(&self) -> usize {
        match self {
            Family::Arithmetic { .. } => 1,
            Family::Lattice { basis, .. } => basis.rows(),
        }
    }

    fn kernel_dim(&self) -> usize {
        match self {
            Family::Arithmetic { offset, weight, .. } => {
                if offset.abs() < ZERO_OFFSET_TOL || (2.0 * PI - offset).abs() < ZERO_OFFSET_TOL {
                    *weight
                } else {
                    0
                }
            }
            Family::Lattice { weight, .. } => *weight,
        }
    }

    /// Coefficient `A` of the leading small-`t` term `A t^{-N/2}`.
    fn leading_coefficient(&self) -> f64 {
        match self {
            Family::Arithmetic { length, weight, .. } => {
                *weight as f64 * length / (4.0 * PI).sqrt()
            }
            Family::Lattice { basis, weight } => {
                let vol = lattice_volume(basis);
                let n = basis.rows() as f64;
                *weight as f64 * vol / (4.0 * PI).powf(0.5 * n)
            }
        }
    }

    /// Image terms `(c, r^2)` of the Poisson-summed trace
    /// `t^{-N/2} sum c exp(-r^2 / 4t)` with `r^2 <= r2_max`, excluding the
    /// identity image.
    fn images(&self, r2_max: f64, max_terms: Option<usize>) -> Vec<(f64, f64)> {
        let a = self.leading_coefficient();
        match self {
            Family::Arithmetic { length, offset, .. } => {
                let mut kmax = (r2_max.sqrt() / length).floor() as usize;
                if let Some(cap) = max_terms {
                    kmax = kmax.min(cap);
                }
                (1..=kmax)
                    .map(|k| {
                        let kf = k as f64;
                        (2.0 * a * (kf * offset).cos(), kf * kf * length * length)
                    })
                    .collect()
            }
            Family::Lattice { basis, .. } => {
                let dual = dual_basis(basis);
                lattice_norms(basis, &dual, r2_max)
                    .into_iter()
                    .filter(|&r2| r2 > 0.0)
                    .map(|r2| (a, r2))
                    .collect()
            }
        }
    }

    /// Eigenvalues `<= cutoff` with multiplicities, including zero modes.
    fn eigenvalues_below(&self, cutoff: f64) -> Vec<(f64, f64)> {
        match self {
            Family::Arithmetic {
                length,
                offset,
                weight,
            } => {
                let w = *weight as f64;
                let reach = cutoff.max(0.0).sqrt() * length / (2.0 * PI);
                let center = -offset / (2.0 * PI);
                let lo = (center - reach).floor() as i64 - 1;
                let hi = (center + reach).ceil() as i64 + 1;
                (lo..=hi)
                    .filter_map(|j| {
                        let x = (2.0 * PI * j as f64 + offset) / length;
                        let lam = x * x;
                        (lam <= cutoff).then_some((lam, w))
                    })
                    .collect()
            }
            Family::Lattice { basis, weight } => {
                let dual = dual_basis(basis);
                let scale = 4.0 * PI * PI;
                lattice_norms(&dual, basis, cutoff / scale)
                    .into_iter()
                    .map(|n2| (scale * n2, *weight as f64))
                    .collect()
            }
        }
    }

    fn smallest_nonzero(&self) -> f64 {
        match self {
            Family::Arithmetic { length, offset, .. } => {
                let d = if self.kernel_dim() > 0 {
                    2.0 * PI
                } else {
                    offset.min(2.0 * PI - offset)
                };
                (d / length).powi(2)
            }
            Family::Lattice { basis, .. } => {
                let dual = dual_basis(basis);
                let scale = 4.0 * PI * PI;
                let mut r2 = dual.row(0).iter().map(|x| x * x).sum::<f64>();
                loop {
                    let found: Vec<f64> = lattice_norms(&dual, basis, r2)
                        .into_iter()
                        .filter(|&x| x > 0.0)
                        .collect();
                    if let Some(m) = found.into_iter().reduce(f64::min) {
                        return scale * m;
                    }
                    r2 *= 2.0;
                }
            }
        }
    }
}

pub(crate) fn lattice_volume(basis: &Matrix) -> f64 {
    log_abs_det(basis).map(f64::exp).unwrap_or(0.0)
}

/// Rows of `(B^{-1})^T`: the dual basis, `dual_i . b_j = delta_ij`.
pub(crate) fn dual_basis(basis: &Matrix) -> Matrix {
    let inv = nalgebra::DMatrix::from_row_slice(basis.rows(), basis.cols(), basis.as_slice())
        .try_inverse()
        .expect("lattice basis is nonsingular");
    let mut out = Matrix::zeros(basis.rows(), basis.cols());
    for i in 0..basis.rows() {
        for j in 0..basis.cols() {
            out[(i, j)] = inv[(j, i)];
        }
    }
    out
}

/// Squared norms of all vectors `sum n_i gen_i` (integer `n`) with squared
/// norm `<= r2_max`. `bound` is the dual of `gen`; `|n_i| <= |x| |bound_i|`.
fn lattice_norms(gen: &Matrix, bound: &Matrix, r2_max: f64) -> Vec<f64> {
    let n = gen.rows();
    let r = r2_max.max(0.0).sqrt();
    let limits: Vec<i64> = (0..n)
        .map(|i| {
            let b: f64 = bound.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            (r * b).floor() as i64
        })
        .collect();
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; n];
    fn rec(
        depth: usize,
        coeffs: &mut Vec<i64>,
        limits: &[i64],
        gen: &Matrix,
        r2_max: f64,
        out: &mut Vec<f64>,
    ) {
        if depth == limits.len() {
            let dim = gen.cols();
            let mut norm2 = 0.0;
            for c in 0..dim {
                let x: f64 = (0..limits.len())
                    .map(|i| coeffs[i] as f64 * gen[(i, c)])
                    .sum();
                norm2 += x * x;
            }
            if norm2 <= r2_max {
                out.push(norm2);
            }
            return;
        }
        for v in -limits[depth]..=limits[depth] {
            coeffs[depth] = v;
            rec(depth + 1, coeffs, limits, gen, r2_max, out);
        }
    }
    rec(0, &mut coeffs, &limits, gen, r2_max, &mut out);
    out
}

/// Laplacian spectrum of one form degree: symbolic families plus an optional
/// finite list of explicit eigenvalues. Zero eigenvalues are kernel and are
/// removed from zeta functions.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Spectrum {
    families: Vec<Family>,
    explicit: Vec<f64>,
}

impl Spectrum {
    pub fn new() -> Self {
        Spectrum::default()
    }

    pub fn arithmetic(length: f64, offset: f64, weight: usize) -> Result<Self> {
        Spectrum::new().with_family(Family::Arithmetic {
            length,
            offset,
            weight,
        })
    }

    pub fn with_family(mut self, family: Family) -> Result<Self> {
        let family = match family {
            Family::Arithmetic {
                length,
                offset,
                weight,
            } => {
                if !(length > 0.0 && length.is_finite()) {
                    return Err(Error::input(format!(
                        "circle length {length} must be positive"
                    )));
                }
                if !offset.is_finite() {
                    return Err(Error::input("non-finite holonomy offset"));
                }
                let mut offset = offset.rem_euclid(2.0 * PI);
                if (2.0 * PI - offset).abs() < ZERO_OFFSET_TOL {
                    offset = 0.0;
                }
                Family::Arithmetic {
                    length,
                    offset,
                    weight,
                }
            }
            Family::Lattice { basis, weight } => {
                if !basis.is_square() || basis.rows() == 0 || basis.rows() > 3 {
                    return Err(Error::input("lattice basis must be square of size 1 to 3"));
                }
                if log_abs_det(&basis).is_err() {
                    return Err(Error::input("lattice basis is singular"));
                }
                Family::Lattice { basis, weight }
            }
        };
        self.families.push(family);
        Ok(self)
    }

    /// Appends explicit eigenvalues (zeros count as kernel).
    pub fn with_eigenvalues(mut self, values: &[f64]) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::input(format!(
                "eigenvalue {bad} must be finite and nonnegative"
            )));
        }
        self.explicit.extend_from_slice(values);
        Ok(self)
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn explicit_eigenvalues(&self) -> &[f64] {
        &self.explicit
    }

    pub fn kernel_dim(&self) -> usize {
        self.families.iter().map(Family::kernel_dim).sum::<usize>()
            + self.explicit.iter().filter(|&&v| v == 0.0).count()
    }

    /// Smallest nonzero eigenvalue, if any.
    pub fn smallest_nonzero(&self) -> Option<f64> {
        self.families
            .iter()
            .map(Family::smallest_nonzero)
            .chain(self.explicit.iter().copied().filter(|&v| v > 0.0))
            .reduce(f64::min)
    }

    /// Eigenvalues `<= cutoff` with multiplicities.
    pub fn eigenvalues_below(&self, cutoff: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self
            .families
            .iter()
            .flat_map(|f| f.eigenvalues_below(cutoff))
            .chain(
                self.explicit
                    .iter()
                    .filter(|&&v| v <= cutoff)
                    .map(|&v| (v, 1.0)),
            )
            .collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    }

    /// Number of eigenvalues (with multiplicity) `<= cutoff`.
    pub fn counting_function(&self, cutoff: f64) -> f64 {
        self.eigenvalues_below(cutoff).iter().map(|e| e.1).sum()
    }

    /// Poles `(s0, residue)` of the zeta function, one per distinct `N/2`.
    pub fn poles(&self) -> Vec<(f64, f64)> {
        let mut poles: Vec<(f64, f64)> = Vec::new();
        for f in &self.families {
            let s0 = 0.5 * f.dimension() as f64;
            let res = f.leading_coefficient() / gamma_fn(s0);
            match poles.iter_mut().find(|p| (p.0 - s0).abs() < POLE_TOL) {
                Some(p) => p.1 += res,
                None => poles.push((s0, res)),
            }
        }
        poles
    }
}

/// Parameters of the Mellin split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinSplit {
    /// Split point of the `t` integral.
    pub epsilon: f64,
    /// Maximum number of circle images kept in the small-`t` expansion.
    pub theta_terms: usize,
    /// Initial panel count per geometric block of the quadrature.
    pub quadrature_panels: usize,
    /// Upper cutoff of the large-`t` integral; chosen from the spectral gap
    /// when `None`.
    pub t_max: Option<f64>,
}

impl Default for MellinSplit {
    fn default() -> Self {
        MellinSplit {
            epsilon: 1.0,
            theta_terms: 40,
            quadrature_panels: 2,
            t_max: None,
        }
    }
}

impl MellinSplit {
    pub fn with_epsilon(epsilon: f64) -> Self {
        MellinSplit {
            epsilon,
            ..MellinSplit::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::input(format!(
                "split point {} must be positive",
                self.epsilon
            )));
        }
        if self.theta_terms == 0 {
            return Err(Error::input("need at least one theta term"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaResult {
    pub s: f64,
    /// `zeta(s)`, or `zeta'(0)` for [`zeta_prime_zero`].
    pub value: f64,
    pub error_estimate: f64,
    /// All poles of the continued zeta function with their residues.
    pub pole_flags: Vec<(f64, f64)>,
}

/// Eigenvalue-side heat trace `sum_j exp(-t lambda_j)`, kernel included.
pub fn heat_trace(spec: &Spectrum, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::input(format!("heat trace needs t > 0, got {t}")));
    }
    let floor = spec
        .smallest_nonzero()
        .map_or(0.0, |m| if spec.kernel_dim() > 0 { 0.0 } else { m });
    let cutoff = floor + (LOG_CUTOFF - 4.0) / t;
    let mut terms: Vec<f64> = spec
        .eigenvalues_below(cutoff)
        .into_iter()
        .map(|(lam, mult)| mult * (-t * lam).exp())
        .collect();
    // add smallest first
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(terms.iter().sum())
}

/// Image-side (Poisson-summed) heat trace. Circle families use
/// `w L / sqrt(4 pi t) sum_k exp(-L^2 k^2 / 4t) cos(k offset)`, lattice
/// families `w vol / (4 pi t)^{N/2} sum_gamma exp(-|gamma|^2 / 4t)`.
pub fn theta_trace(spec: &Spectrum, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::input(format!("theta trace needs t > 0, got {t}")));
    }
    if spec.explicit.iter().any(|&v| v > 0.0) {
        return Err(Error::Unsupported(
            "explicit eigenvalues have no image-sum representation".into(),
        ));
    }
    let r2_max = 4.0 * t * LOG_CUTOFF;
    let mut total = spec.explicit.len() as f64;
    for f in &spec.families {
        let n = f.dimension() as f64;
        let a = f.leading_coefficient();
        let pref = t.powf(-0.5 * n);
        let mut images: Vec<f64> = f
            .images(r2_max, None)
            .into_iter()
            .map(|(c, r2)| c * (-r2 / (4.0 * t)).exp())
            .collect();
        images.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap());
        total += pref * (a + images.iter().sum::<f64>());
    }
    Ok(total)
}

/// `T` with `T^power exp(-rate (T - start)) / rate` negligible against the
/// value at `start`.
fn exponential_cutoff(start: f64, rate: f64, power: f64) -> f64 {
    let mut t = start + LOG_CUTOFF / rate;
    for _ in 0..200 {
        let log_ratio = power * (t / start).ln() - rate * (t - start);
        if log_ratio < -LOG_CUTOFF {
            break;
        }
        t += 4.0 / rate;
    }
    t
}

/// Integrates over `[a, b]` in geometrically growing blocks.
fn integrate_blocks<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        let q = integrate(&f, lo, hi, panels, QUAD_TOL);
        value += q.value;
        err += q.error_estimate;
        lo = hi;
    }
    (value, err)
}

/// Entire part `J(s)` of the split: numerically integrated image terms on
/// `[0, eps]` plus the large-`t` integral of `Tr - h`, for the families only.
fn entire_part(spec: &Spectrum, s: f64, split: &MellinSplit) -> (f64, f64) {
    let eps = split.epsilon;
    let mut value = 0.0;
    let mut err = 0.0;

    // Small t: with u = 1/t, int_{1/eps}^inf u^{N/2 - s - 1} sum c exp(-r^2 u / 4) du
    let r2_max = 4.0 * eps * (LOG_CUTOFF + 30.0);
    for f in &spec.families {
        let images = f.images(r2_max, Some(split.theta_terms));
        if images.is_empty() {
            continue;
        }
        let power = 0.5 * f.dimension() as f64 - s - 1.0;
        let rate = images.iter().map(|i| i.1).fold(f64::INFINITY, f64::min) / 4.0;
        let u0 = 1.0 / eps;
        let u_max = exponential_cutoff(u0, rate, power);
        let integrand = |u: f64| {
            let g: f64 = images.iter().map(|(c, r2)| c * (-r2 * u / 4.0).exp()).sum();
            u.powf(power) * g
        };
        let (v, e) = integrate_blocks(integrand, u0, u_max, split.quadrature_panels);
        value += v;
        err += e;
    }

    // Large t: int_eps^T t^{s-1} sum_{lambda > 0} m exp(-lambda t) dt
    let fam_only = Spectrum {
        families: spec.families.clone(),
        explicit: Vec::new(),
    };
    if let Some(gap) = fam_only.smallest_nonzero() {
        let cutoff = gap + (LOG_CUTOFF + 10.0) / eps;
        let eigs: Vec<(f64, f64)> = fam_only
            .eigenvalues_below(cutoff)
            .into_iter()
            .filter(|e| e.0 > 0.0)
            .collect();
        let t_max = split
            .t_max
            .unwrap_or_else(|| exponential_cutoff(eps, gap, s - 1.0));
        let integrand = |t: f64| {
            let tr: f64 = eigs.iter().map(|(lam, m)| m * (-lam * t).exp()).sum();
            t.powf(s - 1.0) * tr
        };
        let (v, e) = integrate_blocks(integrand, eps, t_max, split.quadrature_panels);
        value += v;
        err += e;
    }
    (value, err)
}

fn check_pole(spec: &Spectrum, s: f64) -> Result<Vec<(f64, f64)>> {
    let poles = spec.poles();
    if let Some(&(s0, residue)) = poles.iter().find(|p| (p.0 - s).abs() < POLE_TOL) {
        return Err(Error::Pole { s: s0, residue });
    }
    Ok(poles)
}

/// Analytically continued spectral zeta function `sum_{lambda > 0} lambda^{-s}`.
pub fn zeta_eval(spec: &Spectrum, s: f64, split: &MellinSplit) -> Result<ZetaResult> {
    split.validate()?;
    if !s.is_finite() {
        return Err(Error::input("non-finite s"));
    }
    let poles = check_pole(spec, s)?;
    let eps = split.epsilon;
    let (j, err) = entire_part(spec, s, split);
    let mut bracket = j;
    let mut kernel = 0.0;
    for f in &spec.families {
        let half_n = 0.5 * f.dimension() as f64;
        bracket += f.leading_coefficient() * eps.powf(s - half_n) / (s - half_n);
        kernel += f.kernel_dim() as f64;
    }
    let rg = rgamma(s);
    let mut value = -kernel * eps.powf(s) * rgamma(s + 1.0) + rg * bracket;
    value += spec
        .explicit
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v.powf(-s))
        .sum::<f64>();
    Ok(ZetaResult {
        s,
        value,
        error_estimate: rg.abs() * err,
        pole_flags: poles,
    })
}

/// `zeta'(0)` using `1/Gamma(s) = s + gamma s^2 + O(s^3)`:
/// `zeta'(0) = R(0) - h (ln eps + gamma)` with `R` the regular bracket.
pub fn zeta_prime_zero(spec: &Spectrum, split: &MellinSplit) -> Result<ZetaResult> {
    split.validate()?;
    let poles = check_pole(spec, 0.0)?;
    let eps = split.epsilon;
    let (j, err) = entire_part(spec, 0.0, split);
    let mut value = j;
    for f in &spec.families {
        let half_n = 0.5 * f.dimension() as f64;
        value -= f.leading_coefficient() * eps.powf(-half_n) / half_n;
        value -= f.kernel_dim() as f64 * (eps.ln() + EULER_GAMMA);
    }
    value -= spec
        .explicit
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v.ln())
        .sum::<f64>();
    Ok(ZetaResult {
        s: 0.0,
        value,
        error_estimate: err,
        pole_flags: poles,
    })
}

/// Zeta-regularised determinant `exp(-zeta'(0))` over the nonzero spectrum.
pub fn zeta_det(spec: &Spectrum, split: &MellinSplit) -> Result<f64> {
    Ok((-zeta_prime_zero(spec, split)?.value).exp())
}

/// Residue of the zeta function at `s0`, read off the closed-form power
/// terms: `A / Gamma(N/2)` at `s0 = N/2` and zero elsewhere.
pub fn residue_probe(spec: &Spectrum, s0: f64) -> f64 {
    spec.poles()
        .into_iter()
        .filter(|p| (p.0 - s0).abs() < POLE_TOL)
        .map(|p| p.1)
        .sum()
}

/// Closed forms for circle spectra via the Hurwitz zeta function.
pub mod closed_form {
    use std::f64::consts::PI;

    use crate::error::Result;
    use crate::numerics::{hurwitz_zeta, hurwitz_zeta_extended, DoubleDouble};

    /// `(zeta(s), zeta'(s))` for the family `((2 pi j + offset)/L)^2`, `j in Z`,
    /// weight `w`, zero mode removed.
    pub fn circle_zeta(length: f64, offset: f64, weight: usize, s: f64) -> Result<(f64, f64)> {
        let w = weight as f64;
        let a = offset.rem_euclid(2.0 * PI) / (2.0 * PI);
        let scale = (length / (2.0 * PI)).ln();
        let (h, dh) = if a.abs() < 1e-12 || (1.0 - a).abs() < 1e-12 {
            let (z, dz) = hurwitz_zeta(2.0 * s, 1.0)?;
            (2.0 * z, 2.0 * dz)
        } else {
            let (z1, d1) = hurwitz_zeta(2.0 * s, a)?;
            let (z2, d2) = hurwitz_zeta(2.0 * s, 1.0 - a)?;
            (z1 + z2, d1 + d2)
        };
        let p = (2.0 * s * scale).exp();
        Ok((w * p * h, w * p * (2.0 * scale * h + 2.0 * dh)))
    }

    /// `log det = -zeta'(0)` of the same family in double-double arithmetic.
    pub fn circle_log_det_extended(
        length: f64,
        offset: f64,
        weight: usize,
    ) -> Result<DoubleDouble> {
        let two_pi = DoubleDouble::PI * DoubleDouble::from(2.0);
        let w = DoubleDouble::from(weight as f64);
        let a = offset.rem_euclid(2.0 * PI) / (2.0 * PI);
        let scale = (DoubleDouble::from(length) / two_pi).ln();
        let zero = DoubleDouble::ZERO;
        let (h, dh) = if a.abs() < 1e-12 || (1.0 - a).abs() < 1e-12 {
            let (z, dz) = hurwitz_zeta_extended(zero, DoubleDouble::ONE)?;
            (z * DoubleDouble::from(2.0), dz * DoubleDouble::from(2.0))
        } else {
            let a_dd = DoubleDouble::from(offset.rem_euclid(2.0 * PI)) / two_pi;
            let (z1, d1) = hurwitz_zeta_extended(zero, a_dd)?;
            let (z2, d2) = hurwitz_zeta_extended(zero, DoubleDouble::ONE - a_dd)?;
            (z1 + z2, d1 + d2)
        };
        let two = DoubleDouble::from(2.0);
        let dz = w * (two * scale * h + two * dh);
        Ok(-dz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(length: f64, offset: f64, weight: usize) -> Spectrum {
        Spectrum::arithmetic(length, offset, weight).unwrap()
    }

    #[test]
    fn heat_trace_limits() {
        let untwisted = circle(1.0, 0.0, 1);
        assert!((heat_trace(&untwisted, 50.0).unwrap() - 1.0).abs() < 1e-15);
        let twisted = circle(1.0, PI, 2);
        assert!(heat_trace(&twisted, 50.0).unwrap() < 1e-100);
        assert!(heat_trace(&untwisted, 0.0).is_err());
        assert!(theta_trace(&untwisted, -1.0).is_err());
    }

    #[test]
    fn poisson_summation_small_cases() {
        let c = circle(1.0, 0.0, 1);
        let (a, b) = (heat_trace(&c, 0.1).unwrap(), theta_trace(&c, 0.1).unwrap());
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        let c = circle(1.0, PI, 2);
        let (a, b) = (
            heat_trace(&c, 0.05).unwrap(),
            theta_trace(&c, 0.05).unwrap(),
        );
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn theta_trace_small_t_is_leading_term() {
        let l = 2.0;
        let t = 1e-3;
        let c = circle(l, 0.0, 1);
        let lead = l / (4.0 * PI * t).sqrt();
        assert!((theta_trace(&c, t).unwrap() - lead).abs() < 1e-12 * lead);
    }

    #[test]
    fn explicit_eigenvalues_unsupported_in_theta_form() {
        let s = circle(1.0, 0.0, 1).with_eigenvalues(&[2.0]).unwrap();
        assert!(matches!(theta_trace(&s, 1.0), Err(Error::Unsupported(_))));
        assert!(Spectrum::new().with_eigenvalues(&[-1.0]).is_err());
    }

    #[test]
    fn zeta_two_on_standard_circle() {
        let c = circle(2.0 * PI, 0.0, 1);
        let z = zeta_eval(&c, 2.0, &MellinSplit::default()).unwrap();
        assert!((z.value - PI.powi(4) / 45.0).abs() < 1e-11, "{}", z.value);
        assert!((z.value - 2.164_646_4).abs() < 1e-7);
    }

    #[test]
    fn zeta_at_zero_is_minus_kernel() {
        let c = circle(2.0 * PI, 0.0, 1);
        let z = zeta_eval(&c, 0.0, &MellinSplit::default()).unwrap();
        assert!((z.value + 1.0).abs() < 1e-12);
        let t = circle(1.0, 2.0 * PI / 7.0, 2);
        assert!(
            zeta_eval(&t, 0.0, &MellinSplit::default())
                .unwrap()
                .value
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn pole_at_one_half() {
        let l = 3.0;
        let c = circle(l, 0.0, 1);
        match zeta_eval(&c, 0.5, &MellinSplit::default()) {
            Err(Error::Pole { s, residue }) => {
                assert_eq!(s, 0.5);
                assert!((residue - l / (2.0 * PI)).abs() < 1e-14);
            }
            other => panic!("expected pole, got {other:?}"),
        }
        assert!((residue_probe(&c, 0.5) - l / (2.0 * PI)).abs() < 1e-14);
        assert_eq!(residue_probe(&c, -1.0), 0.0);
    }

    #[test]
    fn determinants_of_circles() {
        let split = MellinSplit::default();
        let d = zeta_det(&circle(2.0 * PI, 0.0, 1), &split).unwrap();
        assert!((d - 4.0 * PI * PI).abs() < 1e-9 * d);
        let d = zeta_det(&circle(1.0, 0.0, 1), &split).unwrap();
        assert!((d - 1.0).abs() < 1e-10);
        let d = zeta_det(&circle(1.0, PI, 2), &split).unwrap();
        assert!((d - 16.0).abs() < 1e-9 * 16.0);
    }

    #[test]
    fn zero_modes_are_removed() {
        let split = MellinSplit::default();
        let c = circle(1.0, PI / 3.0, 2);
        let with_zero = c.clone().with_eigenvalues(&[0.0, 0.0]).unwrap();
        assert_eq!(with_zero.kernel_dim(), 2);
        let a = zeta_prime_zero(&c, &split).unwrap().value;
        let b = zeta_prime_zero(&with_zero, &split).unwrap().value;
        assert_eq!(a, b);
        let a = zeta_eval(&c, 1.7, &split).unwrap().value;
        let b = zeta_eval(&with_zero, 1.7, &split).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_eigenvalues_give_finite_determinant() {
        let s = Spectrum::new().with_eigenvalues(&[2.0, 3.0, 0.0]).unwrap();
        let d = zeta_det(&s, &MellinSplit::default()).unwrap();
        assert!((d - 6.0).abs() < 1e-14);
        let z = zeta_eval(&s, 1.0, &MellinSplit::default()).unwrap();
        assert!((z.value - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_hand_values() {
        let (z, dz) = closed_form::circle_zeta(2.0 * PI, 0.0, 1, 0.0).unwrap();
        assert!((z + 1.0).abs() < 1e-14);
        assert!((dz + 2.0 * (2.0 * PI).ln()).abs() < 1e-12);
        // theta = pi: zeta'(0) = -2 log(2 sin(pi/2)) per complex character
        let (_, dz) = closed_form::circle_zeta(1.0, PI, 1, 0.0).unwrap();
        assert!((dz + 2.0 * 2f64.ln()).abs() < 1e-12);
        let ld = closed_form::circle_log_det_extended(1.0, PI, 2).unwrap();
        assert!((ld.to_f64() - 16f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Spectrum::arithmetic(0.0, 0.0, 1).is_err());
        assert!(Spectrum::new()
            .with_family(Family::Lattice {
                basis: Matrix::zeros(2, 2),
                weight: 1
            })
            .is_err());
        let bad = MellinSplit {
            epsilon: 0.0,
            ..MellinSplit::default()
        };
        assert!(zeta_eval(&circle(1.0, 0.0, 1), 2.0, &bad).is_err());
    }
}
