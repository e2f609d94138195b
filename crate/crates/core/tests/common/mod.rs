#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsionlab::numerics::{orthonormal_span, svd_rank};
use torsionlab::{ChainComplex, EdgeCocycle, Matrix, SimplicialComplex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-bound..bound))
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Random invertible matrix with entries in `[-3, 3]` and its inverse,
/// redrawn until reasonably conditioned.
fn invertible(rng: &mut impl Rng, n: usize) -> (Matrix, Matrix) {
    if n == 0 {
        return (Matrix::zeros(0, 0), Matrix::zeros(0, 0));
    }
    loop {
        let g = uniform_matrix(rng, n, n, 3.0);
        let r = svd_rank(&g, 1e-12).unwrap();
        if r.rank == n && r.largest_singular_value() < 1e3 * r.smallest_retained() {
            let inv = r.pinv_apply(&Matrix::identity(n));
            return (g, inv);
        }
    }
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let q = orthonormal_span(&uniform_matrix(rng, n, n, 1.0), 1e-9).unwrap();
        if q.cols() == n {
            return q;
        }
    }
}

/// Acyclic complex `d_q = G_{q-1} E_q G_q^{-1}` where `E_q` maps the first
/// `r_q` coordinates of `C_q` onto the last `r_q` coordinates of `C_{q-1}`.
pub fn random_acyclic(rng: &mut impl Rng, max_dim: usize) -> ChainComplex {
    let top = rng.random_range(1..=4usize);
    // ranks r_1..r_top, r_0 = r_{top+1} = 0, dims d_q = r_q + r_{q+1}
    let mut ranks = vec![0usize; top + 2];
    for q in 1..=top {
        loop {
            ranks[q] = rng.random_range(1..=max_dim / 2);
            if ranks[q] + ranks[q - 1] <= max_dim {
                break;
            }
        }
    }
    let dims: Vec<usize> = (0..=top).map(|q| ranks[q] + ranks[q + 1]).collect();
    let frames: Vec<(Matrix, Matrix)> = dims.iter().map(|&d| invertible(rng, d)).collect();
    let boundaries = (1..=top)
        .map(|q| {
            let mut e = Matrix::zeros(dims[q - 1], dims[q]);
            for i in 0..ranks[q] {
                e[(ranks[q - 1] + i, i)] = 1.0;
            }
            frames[q - 1].0.matmul(&e).matmul(&frames[q].1)
        })
        .collect();
    ChainComplex::new(dims, boundaries, "random").unwrap()
}

/// Random complex with prescribed Betti numbers, built like
/// [`random_acyclic`] with extra free cycles.
pub fn random_with_homology(rng: &mut impl Rng, betti: &[usize]) -> ChainComplex {
    let top = betti.len() - 1;
    let mut ranks = vec![0usize; top + 2];
    for r in ranks.iter_mut().take(top + 1).skip(1) {
        *r = rng.random_range(0..=2usize);
    }
    let dims: Vec<usize> = (0..=top)
        .map(|q| ranks[q] + ranks[q + 1] + betti[q])
        .collect();
    let frames: Vec<(Matrix, Matrix)> = dims.iter().map(|&d| invertible(rng, d)).collect();
    let boundaries = (1..=top)
        .map(|q| {
            let mut e = Matrix::zeros(dims[q - 1], dims[q]);
            for i in 0..ranks[q] {
                e[(ranks[q - 1] + i, i)] = 1.0;
            }
            frames[q - 1].0.matmul(&e).matmul(&frames[q].1)
        })
        .collect();
    ChainComplex::new(dims, boundaries, "random").unwrap()
}

/// Triangulated annulus with `m` columns, fiber `R^2`, holonomy `R(theta)`
/// on the edges crossing from the last column to the first.
pub fn twisted_annulus(m: usize, theta: f64) -> (SimplicialComplex, EdgeCocycle) {
    let v = |i: usize, l: usize| (i % m) + l * m;
    let mut triangles = Vec::new();
    for i in 0..m {
        let mut a = vec![v(i, 0), v(i + 1, 0), v(i, 1)];
        let mut b = vec![v(i + 1, 0), v(i + 1, 1), v(i, 1)];
        a.sort();
        b.sort();
        triangles.push(a);
        triangles.push(b);
    }
    let k = SimplicialComplex::from_maximal(&triangles).unwrap();
    let column = |x: usize| x % m;
    let edges: BTreeMap<(usize, usize), Matrix> = k
        .simplices(1)
        .iter()
        .map(|e| {
            let (ca, cb) = (column(e[0]), column(e[1]));
            let mat = if ca == m - 1 && cb == 0 {
                Matrix::rotation(theta)
            } else if ca == 0 && cb == m - 1 {
                Matrix::rotation(-theta)
            } else {
                Matrix::identity(2)
            };
            ((e[0], e[1]), mat)
        })
        .collect();
    (k, EdgeCocycle::new(2, edges).unwrap())
}

pub fn circle_tau(theta: f64) -> f64 {
    2.0 - 2.0 * theta.cos()
}

pub fn angle(k: u64, p: u64) -> f64 {
    2.0 * PI * k as f64 / p as f64
}
