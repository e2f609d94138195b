//! Ray-Singer analytic torsion from per-degree spectra and its comparison
//! with the Reidemeister torsion of the matching combinatorial model.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spaces::{circle_model, circle_spectrum, FormSpectra};
use crate::spectral::{zeta_prime_zero, MellinSplit, Spectrum};
use crate::topology::{barycentric_subdivide, twist};

/// `log T = 1/2 sum_q (-1)^q q zeta_q'(0)`, zero modes removed.
pub fn log_analytic_torsion(spectra: &[Spectrum], split: &MellinSplit) -> Result<f64> {
    let mut log_t = 0.0;
    for (q, spec) in spectra.iter().enumerate().skip(1) {
        let zp = zeta_prime_zero(spec, split)?.value;
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        log_t += 0.5 * sign * q as f64 * zp;
    }
    Ok(log_t)
}

pub fn analytic_torsion(spectra: &[Spectrum], split: &MellinSplit) -> Result<f64> {
    log_analytic_torsion(spectra, split).map(f64::exp)
}

fn is_trivial_angle(theta: f64) -> bool {
    let r = theta.rem_euclid(2.0 * PI);
    r.abs() < 1e-12 || (2.0 * PI - r).abs() < 1e-12
}

/// Largest pairwise difference of `log T` for the twisted circle over the
/// given lengths.
pub fn metric_independence_scan(theta: f64, lengths: &[f64], split: &MellinSplit) -> Result<f64> {
    if is_trivial_angle(theta) {
        return Err(Error::Precondition(format!(
            "holonomy angle {theta} gives a non-acyclic bundle"
        )));
    }
    let logs = lengths
        .iter()
        .map(|&l| log_analytic_torsion(&circle_spectrum(l, theta)?.degrees, split))
        .collect::<Result<Vec<f64>>>()?;
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if logs.is_empty() { 0.0 } else { max - min })
}

/// `log tau` of the rotation local system on the triangle, subdivided
/// `levels` times.
pub fn circle_reidemeister_log_torsion(theta: f64, levels: usize) -> Result<f64> {
    let (mut k, mut rho) = circle_model(3, theta)?;
    for _ in 0..levels {
        (k, rho) = barycentric_subdivide(&k, &rho)?;
    }
    Ok(twist(&k, &rho, 0)?.torsion_def(None)?.log_tau)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionComparison {
    pub p: u64,
    pub k: u64,
    pub theta: f64,
    pub subdivision_level: usize,
    pub length: f64,
    pub log_t_analytic: f64,
    pub log_tau_combinatorial: f64,
    pub gap: f64,
}

/// Compares the Reidemeister torsion of the subdivided circle model with the
/// analytic torsion of the unit circle, both with holonomy `2 pi k / p`.
pub fn cheeger_muller_check(p: u64, k: u64, subdivision_level: usize) -> Result<TorsionComparison> {
    cheeger_muller_check_with(p, k, subdivision_level, 1.0, &MellinSplit::default())
}

pub fn cheeger_muller_check_with(
    p: u64,
    k: u64,
    subdivision_level: usize,
    length: f64,
    split: &MellinSplit,
) -> Result<TorsionComparison> {
    if p < 2 {
        return Err(Error::input(format!("need p >= 2, got {p}")));
    }
    if k.is_multiple_of(p) {
        return Err(Error::Precondition(format!(
            "character k={k} is trivial mod p={p}; the circle bundle is not acyclic"
        )));
    }
    let theta = 2.0 * PI * (k % p) as f64 / p as f64;
    let log_tau = circle_reidemeister_log_torsion(theta, subdivision_level)?;
    let spectra: FormSpectra = circle_spectrum(length, theta)?;
    let log_t = log_analytic_torsion(&spectra.degrees, split)?;
    Ok(TorsionComparison {
        p,
        k,
        theta,
        subdivision_level,
        length,
        log_t_analytic: log_t,
        log_tau_combinatorial: log_tau,
        gap: (log_t - log_tau).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::spaces::torus_form_spectra;

    #[test]
    fn twisted_circle_analytic_torsion() {
        let split = MellinSplit::default();
        let theta = 2.0 * PI / 7.0;
        let t = analytic_torsion(&circle_spectrum(1.0, theta).unwrap().degrees, &split).unwrap();
        assert!((t - (2.0 * (PI / 7.0).sin()).powi(2)).abs() < 1e-10);
        let t = analytic_torsion(&circle_spectrum(1.0, PI).unwrap().degrees, &split).unwrap();
        assert!((t - 4.0).abs() < 1e-9);
    }

    #[test]
    fn flat_square_torus_has_unit_torsion() {
        let spectra = torus_form_spectra(&Matrix::identity(2)).unwrap();
        let log_t = log_analytic_torsion(&spectra.degrees, &MellinSplit::default()).unwrap();
        assert!(log_t.abs() < 1e-9);
    }

    #[test]
    fn metric_scan() {
        let split = MellinSplit::default();
        let d = metric_independence_scan(2.0 * PI / 7.0, &[0.5, 1.0, 2.0 * PI], &split).unwrap();
        assert!(d <= 1e-8, "{d}");
        let d = metric_independence_scan(PI, &[1.0, 3.0], &split).unwrap();
        assert!(d <= 1e-8, "{d}");
        assert!(matches!(
            metric_independence_scan(0.0, &[1.0], &split),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn comparison_on_the_circle() {
        let c = cheeger_muller_check(7, 1, 0).unwrap();
        assert!(c.gap <= 1e-6);
        assert!((c.log_tau_combinatorial.exp() - 0.753_020_4).abs() < 1e-7);
        let c = cheeger_muller_check(2, 1, 1).unwrap();
        assert!((c.log_t_analytic.exp() - 4.0).abs() < 1e-8);
        assert!(c.gap <= 1e-8);
        let c = cheeger_muller_check(5, 2, 0).unwrap();
        assert!((c.log_tau_combinatorial.exp() - 3.618_034).abs() < 1e-6);
        assert!(c.gap <= 1e-6);
        assert!(matches!(
            cheeger_muller_check(5, 5, 0),
            Err(Error::Precondition(_))
        ));
    }
}
