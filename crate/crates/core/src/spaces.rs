//! Worked examples: rotation local systems on circles, lens spaces as
//! twisted four-term complexes, and the Laplace spectra of flat circles and
//! tori.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::chain::{ChainComplex, TorsionMethod};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::spectral::{Family, Spectrum};
use crate::topology::{EdgeCocycle, SimplicialComplex};

/// The `m`-cycle graph carrying the rotation `R(theta)` on edge `(0, 1)` and
/// the identity elsewhere, with 2-dimensional fibers.
pub fn circle_model(m: usize, theta: f64) -> Result<(SimplicialComplex, EdgeCocycle)> {
    let k = SimplicialComplex::cycle(m)?;
    let mut edges: BTreeMap<(usize, usize), Matrix> = k
        .simplices(1)
        .iter()
        .map(|e| ((e[0], e[1]), Matrix::identity(2)))
        .collect();
    edges.insert((0, 1), Matrix::rotation(theta));
    let rho = EdgeCocycle::new(2, edges)?;
    Ok((k, rho))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn inverse_mod(q: u64, p: u64) -> Option<u64> {
    (1..p).find(|&x| (q * x) % p == 1)
}

/// Lens space `L(p, q)` together with a rotation character `k` of `Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LensModel {
    pub p: u64,
    pub q: u64,
    pub q_star: u64,
    /// Character index, reduced mod `p`; `k = 0` is the trivial character.
    pub k: u64,
}

impl LensModel {
    pub fn new(p: u64, q: u64, k: u64) -> Result<Self> {
        if p < 2 || q == 0 || q >= p {
            return Err(Error::input(format!(
                "lens space needs 0 < q < p, got p={p}, q={q}"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::input(format!("p={p} and q={q} are not coprime")));
        }
        let q_star = inverse_mod(q, p).expect("coprime q is invertible mod p");
        Ok(LensModel {
            p,
            q,
            q_star,
            k: k % p,
        })
    }

    fn angle(&self, multiple: u64) -> f64 {
        2.0 * PI * ((self.k * multiple) % self.p) as f64 / self.p as f64
    }

    /// Closed form `|zeta^k - 1|^2 |zeta^{k q*} - 1|^2`, `zeta = exp(2 pi i / p)`.
    pub fn torsion_closed_form(&self) -> f64 {
        let f = |phi: f64| 2.0 - 2.0 * phi.cos();
        f(self.angle(1)) * f(self.angle(self.q_star))
    }
}

/// Equivariant cellular chain complex of `S^3` with one free `Z_p`-orbit of
/// cells per dimension, evaluated under the rotation character:
/// `d1 = g - 1`, `d2 = sum_j g^j`, `d3 = g^{q*} - 1` with `g = R(2 pi k / p)`.
pub fn lens_complex(model: &LensModel) -> ChainComplex {
    let id = Matrix::identity(2);
    let d1 = Matrix::rotation(model.angle(1)).sub(&id);
    // sum of g^j over the group: p I for the trivial character, 0 otherwise
    let d2 = if model.k == 0 {
        id.scale(model.p as f64)
    } else {
        Matrix::zeros(2, 2)
    };
    let d3 = Matrix::rotation(model.angle(model.q_star)).sub(&id);
    ChainComplex::new(
        vec![2, 2, 2, 2],
        vec![d1, d2, d3],
        format!("L({},{}) k={}", model.p, model.q, model.k),
    )
    .expect("lens complex shapes are fixed")
}

/// Sorted torsion values of `L(p, q)` over the characters `k = 1..p-1`.
pub fn lens_torsion_multiset(p: u64, q: u64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(p as usize - 1);
    for k in 1..p {
        let c = lens_complex(&LensModel::new(p, q, k)?);
        out.push(c.torsion(TorsionMethod::Definition)?.tau);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Whether two sorted multisets differ anywhere by more than `tol`.
pub fn multisets_differ(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(x, y)| (x - y).abs() > tol)
}

/// Laplace spectra per form degree `0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSpectra {
    pub degrees: Vec<Spectrum>,
}

impl FormSpectra {
    pub fn dimension(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn kernel_dims(&self) -> Vec<usize> {
        self.degrees.iter().map(Spectrum::kernel_dim).collect()
    }
}

/// Spectra of the Hodge Laplacian on functions and 1-forms of a circle of
/// length `length` with coefficients in the flat bundle of holonomy angle
/// `theta`. For `theta = 0` this is the trivial line bundle; otherwise it is
/// the real rank-2 rotation bundle, whose spectrum is the family
/// `((2 pi j + theta)/L)^2` with weight 2. Degree 1 equals degree 0.
pub fn circle_spectrum(length: f64, theta: f64) -> Result<FormSpectra> {
    let reduced = theta.rem_euclid(2.0 * PI);
    let trivial = reduced.abs() < 1e-12 || (2.0 * PI - reduced).abs() < 1e-12;
    let weight = if trivial { 1 } else { 2 };
    let s = Spectrum::arithmetic(length, theta, weight)?;
    Ok(FormSpectra {
        degrees: vec![s.clone(), s],
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Spectrum of the Laplacian on `q`-forms of the flat torus `R^N / lattice`
/// (rows of `basis` generate the lattice), trivial coefficients.
pub fn torus_spectrum(basis: &Matrix, q: usize) -> Result<Spectrum> {
    let n = basis.rows();
    if q > n {
        return Err(Error::input(format!(
            "form degree {q} exceeds torus dimension {n}"
        )));
    }
    Spectrum::new().with_family(Family::Lattice {
        basis: basis.clone(),
        weight: binomial(n, q),
    })
}

pub fn torus_form_spectra(basis: &Matrix) -> Result<FormSpectra> {
    let degrees = (0..=basis.rows())
        .map(|q| torus_spectrum(basis, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormSpectra { degrees })
}

pub fn torus_volume(basis: &Matrix) -> f64 {
    crate::spectral::lattice_volume(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::twist;

    #[test]
    fn circle_model_basics() {
        let (k, rho) = circle_model(3, 0.0).unwrap();
        let c = twist(&k, &rho, 0).unwrap();
        assert_eq!(c.homology_dims().unwrap(), vec![2, 2]);
        let (k, rho) = circle_model(3, 2.0 * PI / 7.0).unwrap();
        let t = twist(&k, &rho, 0).unwrap().torsion_def(None).unwrap();
        assert!((t.tau - (2.0 * (PI / 7.0).sin()).powi(2)).abs() < 1e-12);
        assert!(circle_model(2, 1.0).is_err());
    }

    #[test]
    fn long_circle_has_same_torsion() {
        let (k, rho) = circle_model(50, 2.0 * PI / 7.0).unwrap();
        let t = twist(&k, &rho, 0).unwrap().torsion_def(None).unwrap();
        assert!((t.tau - 0.753_020_4).abs() < 1e-7);
        assert!((t.log_tau - ((2.0 * (PI / 7.0).sin()).powi(2)).ln()).abs() < 1e-9);
    }

    #[test]
    fn lens_model_validation() {
        assert!(LensModel::new(6, 2, 1).is_err());
        assert!(LensModel::new(7, 7, 1).is_err());
        assert!(LensModel::new(7, 0, 1).is_err());
        let m = LensModel::new(7, 2, 1).unwrap();
        assert_eq!(m.q_star, 4);
        assert_eq!(LensModel::new(7, 3, 9).unwrap().k, 2);
    }

    #[test]
    fn lens_torsion_values() {
        let t = lens_complex(&LensModel::new(7, 1, 1).unwrap())
            .torsion_def(None)
            .unwrap();
        let s = (2.0 * (PI / 7.0).sin()).powi(2);
        assert!((t.tau - s * s).abs() < 1e-12);
        assert!((t.tau - 0.567_039_8).abs() < 1e-7);

        let t = lens_complex(&LensModel::new(7, 2, 1).unwrap())
            .torsion_def(None)
            .unwrap();
        let expected = s * (2.0 * (4.0 * PI / 7.0).sin()).powi(2);
        assert!((t.tau - expected).abs() < 1e-12);
        assert!((t.tau - 2.862_936_660_457).abs() < 1e-11);
    }

    #[test]
    fn trivial_character_is_not_acyclic() {
        let c = lens_complex(&LensModel::new(7, 1, 0).unwrap());
        assert!(c.validate().is_ok());
        assert!(!c.is_acyclic().unwrap());
        assert!(matches!(c.torsion_laplacian(), Err(Error::Precondition(_))));
    }

    #[test]
    fn lens_multisets() {
        let a = lens_torsion_multiset(7, 1).unwrap();
        let b = lens_torsion_multiset(7, 2).unwrap();
        assert!(multisets_differ(&a, &b, 1e-9));
        assert!(!multisets_differ(
            &a,
            &lens_torsion_multiset(7, 1).unwrap(),
            1e-9
        ));
        let c = lens_torsion_multiset(5, 1).unwrap();
        let d = lens_torsion_multiset(5, 4).unwrap();
        assert!(!multisets_differ(&c, &d, 1e-9));
    }

    #[test]
    fn circle_spectra() {
        let s = circle_spectrum(2.0 * PI, 0.0).unwrap();
        assert_eq!(s.kernel_dims(), vec![1, 1]);
        assert_eq!(s.degrees[0], s.degrees[1]);
        let eigs = s.degrees[0].eigenvalues_below(9.5);
        let nonzero: Vec<f64> = eigs.iter().filter(|e| e.0 > 0.0).map(|e| e.0).collect();
        // j^2 for j = +-1, +-2, +-3: each value twice
        assert_eq!(nonzero.len(), 6);
        assert!((nonzero[0] - 1.0).abs() < 1e-12 && (nonzero[5] - 9.0).abs() < 1e-12);

        let s = circle_spectrum(1.0, PI).unwrap();
        assert_eq!(s.kernel_dims(), vec![0, 0]);
        assert!((s.degrees[0].smallest_nonzero().unwrap() - PI * PI).abs() < 1e-12);
        let s = circle_spectrum(1.0, 2.0 * PI / 7.0).unwrap();
        assert!(s.degrees[0].eigenvalues_below(1e-6).is_empty());
    }

    #[test]
    fn square_torus_spectrum() {
        let basis = Matrix::identity(2);
        let s0 = torus_spectrum(&basis, 0).unwrap();
        let four_pi2 = 4.0 * PI * PI;
        let eigs = s0.eigenvalues_below(four_pi2 * 2.0 + 1e-9);
        // (0,0), four of norm 1, four of norm 2
        assert_eq!(eigs.len(), 9);
        assert!((eigs[8].0 - 2.0 * four_pi2).abs() < 1e-9);
        let s1 = torus_spectrum(&basis, 1).unwrap();
        assert_eq!(s1.kernel_dim(), 2);
        assert!((torus_volume(&Matrix::diag(&[2.0, 3.0])) - 6.0).abs() < 1e-12);
        assert!(torus_spectrum(&Matrix::zeros(2, 2), 0).is_err());
        assert!(torus_spectrum(&basis, 3).is_err());
    }
}
