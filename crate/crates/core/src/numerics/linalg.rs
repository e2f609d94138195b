use nalgebra::{DMatrix, SymmetricEigen, LU, SVD};

use super::Matrix;
use crate::error::{Error, Result};

/// Default relative rank threshold.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Rank, image and kernel of a matrix from its singular value decomposition.
///
/// `image_basis` is `rows x rank` with orthonormal columns spanning the
/// column space; `coimage_basis` is `cols x rank` spanning the row space;
/// `kernel_basis` is `cols x (cols - rank)`. `singular_values` lists all
/// `min(rows, cols)` values, nonincreasing.
#[derive(Clone, Debug)]
pub struct RankDecomposition {
    pub rank: usize,
    pub image_basis: Matrix,
    pub coimage_basis: Matrix,
    pub kernel_basis: Matrix,
    pub singular_values: Vec<f64>,
}

impl RankDecomposition {
    /// Minimum-norm least-squares solution of `m x = b` for each column of
    /// `b`, using only the retained singular triples.
    pub fn pinv_apply(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.rows(), self.image_basis.rows());
        // x = V_r diag(1/s) U_r^T b
        let mut coeffs = self.image_basis.transpose().matmul(b);
        for i in 0..self.rank {
            let inv = 1.0 / self.singular_values[i];
            for j in 0..coeffs.cols() {
                coeffs[(i, j)] *= inv;
            }
        }
        self.coimage_basis.matmul(&coeffs)
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Smallest retained singular value, or 0 when the rank is 0.
    pub fn smallest_retained(&self) -> f64 {
        if self.rank == 0 {
            0.0
        } else {
            self.singular_values[self.rank - 1]
        }
    }
}

/// Full SVD with singular values sorted in nonincreasing order.
/// Returns (U: rows x k, sigma: k, V: cols x cols) where k = min(rows, cols),
/// V is a complete orthonormal basis of the domain.
fn sorted_svd(m: &Matrix) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    // Pad with zero rows so that V comes out square.
    let padded = if rows < cols {
        let mut p = DMatrix::<f64>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(&m.to_na());
        p
    } else {
        m.to_na()
    };
    let svd = SVD::new(padded, true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());

    let k = rows.min(cols);
    let mut u_sorted = DMatrix::<f64>::zeros(rows, k);
    let mut v_sorted = DMatrix::<f64>::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(k);
    for (new, &old) in order.iter().enumerate() {
        for j in 0..cols {
            v_sorted[(j, new)] = vt[(old, j)];
        }
        if new < k {
            sigma.push(sv[old]);
            for i in 0..rows {
                u_sorted[(i, new)] = u[(i, old)];
            }
        }
    }
    (u_sorted, sigma, v_sorted)
}

/// Numerical rank with image and kernel bases. Singular values above
/// `rel_tol` times the largest one are retained.
pub fn svd_rank(m: &Matrix, rel_tol: f64) -> Result<RankDecomposition> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::input(format!(
            "rank tolerance {rel_tol} outside (0, 1)"
        )));
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(RankDecomposition {
            rank: 0,
            image_basis: Matrix::zeros(rows, 0),
            coimage_basis: Matrix::zeros(cols, 0),
            kernel_basis: Matrix::identity(cols),
            singular_values: Vec::new(),
        });
    }
    let (u, sigma, v) = sorted_svd(m);
    let threshold = rel_tol * sigma[0];
    let rank = sigma.iter().filter(|&&s| s > threshold).count();

    let image = Matrix::from_na(&u.columns(0, rank).into_owned());
    let coimage = Matrix::from_na(&v.columns(0, rank).into_owned());
    let kernel = Matrix::from_na(&v.columns(rank, cols - rank).into_owned());
    Ok(RankDecomposition {
        rank,
        image_basis: image,
        coimage_basis: coimage,
        kernel_basis: kernel,
        singular_values: sigma,
    })
}

/// `log |det m|` together with the 2-norm condition number.
pub fn log_abs_det_with_condition(m: &Matrix) -> Result<(f64, f64)> {
    if !m.is_square() {
        return Err(Error::input(format!(
            "determinant of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((0.0, 1.0));
    }
    let (_, sigma, _) = sorted_svd(m);
    let smax = sigma[0];
    let smin = sigma[n - 1];
    if smax == 0.0 || smin <= smax * f64::EPSILON * n as f64 {
        return Err(Error::Singular {
            smallest_singular_value: smin,
        });
    }
    let lu = LU::new(m.to_na());
    let u = lu.u();
    let log_det = (0..n).map(|i| u[(i, i)].abs().ln()).sum();
    Ok((log_det, smax / smin))
}

/// `log |det m|` via partial-pivoted LU.
pub fn log_abs_det(m: &Matrix) -> Result<f64> {
    log_abs_det_with_condition(m).map(|(v, _)| v)
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eig(m: &Matrix) -> Result<Vec<EigenPair>> {
    if !m.is_square() {
        return Err(Error::input("sym_eig needs a square matrix"));
    }
    let asym = m.sub(&m.transpose()).max_abs();
    if asym > 1e-12 * m.max_abs().max(1.0) {
        return Err(Error::input(format!(
            "matrix is not symmetric (defect {asym:e})"
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new(m.to_na());
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|i| EigenPair {
            value: eig.eigenvalues[i],
            vector: eig.eigenvectors.column(i).iter().copied().collect(),
        })
        .collect();
    pairs.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(pairs)
}

/// Orthonormal basis for the column span of `m` (rank decided at `rel_tol`).
pub fn orthonormal_span(m: &Matrix, rel_tol: f64) -> Result<Matrix> {
    Ok(svd_rank(m, rel_tol)?.image_basis)
}
