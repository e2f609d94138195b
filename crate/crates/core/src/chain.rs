//! Based finite chain complexes over the reals and their torsion.
//!
//! A complex `C_N -> C_{N-1} -> ... -> C_0` is stored as its dimensions and
//! the boundary matrices written in the preferred (standard unit) bases.
//! Torsion uses the convention
//!
//! ```text
//! log tau(C) = sum_q (-1)^q log |det (b_q, h_q, b~_{q-1}) / c_q|
//! ```
//!
//! so that the two-term complex `R --[c]--> R` has torsion `|c|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    log_abs_det_with_condition, svd_rank, sym_eig, Matrix, RankDecomposition, DEFAULT_RANK_TOL,
};

/// Relative tolerance for the chain condition.
pub const CHAIN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[i]` is the matrix of `d_{i+1} : C_{i+1} -> C_i`.
    boundaries: Vec<Matrix>,
    label: String,
}

/// Cycle representatives per degree; column `j` of `bases[q]` is the `j`-th
/// homology class in degree `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyBasis {
    pub bases: Vec<Matrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorsionMethod {
    Definition,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionValue {
    pub log_tau: f64,
    pub tau: f64,
    pub method: TorsionMethod,
    /// Worst condition number among the matrices whose determinants were taken.
    pub condition_report: f64,
}

impl TorsionValue {
    fn new(log_tau: f64, method: TorsionMethod, condition_report: f64) -> Self {
        TorsionValue {
            log_tau,
            tau: log_tau.exp(),
            method,
            condition_report,
        }
    }
}

/// Per-degree chain-condition defects, `defects[i]` for `d_{i+1} o d_{i+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainDiagnostic {
    pub defects: Vec<f64>,
}

impl ChainComplex {
    /// Checks shapes only; see [`ChainComplex::validate`] for the chain
    /// condition.
    pub fn new(
        dims: Vec<usize>,
        boundaries: Vec<Matrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::input("chain complex needs at least one degree"));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::input(format!(
                "{} degrees need {} boundary matrices, got {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.shape() != (dims[i], dims[i + 1]) {
                return Err(Error::input(format!(
                    "boundary d_{} has shape {:?}, expected {:?}",
                    i + 1,
                    b.shape(),
                    (dims[i], dims[i + 1])
                )));
            }
        }
        Ok(ChainComplex {
            dims,
            boundaries,
            label: label.into(),
        })
    }

    /// Two-term complex `R^n --[d]--> R^m` in degrees 1 and 0.
    pub fn two_term(d: Matrix, label: impl Into<String>) -> Result<Self> {
        ChainComplex::new(vec![d.rows(), d.cols()], vec![d], label)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn boundaries(&self) -> &[Matrix] {
        &self.boundaries
    }

    /// Matrix of `d_q : C_q -> C_{q-1}`, including the zero maps at both ends.
    pub fn boundary(&self, q: usize) -> Matrix {
        let n = self.top_degree();
        if q == 0 {
            Matrix::zeros(0, self.dims[0])
        } else if q > n {
            Matrix::zeros(if q == n + 1 { self.dims[n] } else { 0 }, 0)
        } else {
            self.boundaries[q - 1].clone()
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Checks `d_q o d_{q+1} = 0` to `1e-10 |d_q| |d_{q+1}|`.
    pub fn validate(&self) -> Result<ChainDiagnostic> {
        let mut defects = Vec::new();
        for i in 0..self.boundaries.len().saturating_sub(1) {
            let (lower, upper) = (&self.boundaries[i], &self.boundaries[i + 1]);
            let defect = lower.matmul(upper).max_abs();
            defects.push(defect);
            if defect > CHAIN_TOL * lower.norm() * upper.norm() {
                return Err(Error::Structural {
                    degree: i + 1,
                    defect,
                });
            }
        }
        Ok(ChainDiagnostic { defects })
    }

    fn rank_decompositions(&self) -> Result<Vec<RankDecomposition>> {
        (0..=self.top_degree() + 1)
            .map(|q| svd_rank(&self.boundary(q), DEFAULT_RANK_TOL))
            .collect()
    }

    /// `dim H_q = dim ker d_q - rank d_{q+1}`.
    pub fn homology_dims(&self) -> Result<Vec<usize>> {
        self.validate()?;
        let ranks = self.rank_decompositions()?;
        Ok((0..=self.top_degree())
            .map(|q| self.dims[q] - ranks[q].rank - ranks[q + 1].rank)
            .collect())
    }

    pub fn is_acyclic(&self) -> Result<bool> {
        Ok(self.homology_dims()?.iter().all(|&h| h == 0))
    }

    /// `-Laplacian_q = d_q^T d_q + d_{q+1} d_{q+1}^T` in the preferred inner
    /// product.
    pub fn laplacian(&self, q: usize) -> Matrix {
        let down = self.boundary(q);
        let up = self.boundary(q + 1);
        down.transpose()
            .matmul(&down)
            .add(&up.matmul(&up.transpose()))
    }

    /// Orthonormal bases of the harmonic chains `ker Laplacian_q`.
    pub fn harmonic_basis(&self) -> Result<HomologyBasis> {
        let hdims = self.homology_dims()?;
        let mut bases = Vec::with_capacity(hdims.len());
        for (q, &h) in hdims.iter().enumerate() {
            let pairs = sym_eig(&self.laplacian(q))?;
            let cols: Vec<Vec<f64>> = pairs.into_iter().take(h).map(|p| p.vector).collect();
            bases.push(Matrix::from_columns(self.dims[q], &cols));
        }
        Ok(HomologyBasis { bases })
    }

    /// Torsion by the definition with orthonormal auxiliary bases of the
    /// boundaries. With `h = None` the harmonic basis is used.
    pub fn torsion_def(&self, h: Option<&HomologyBasis>) -> Result<TorsionValue> {
        self.validate()?;
        let ranks = self.rank_decompositions()?;
        // b_q spans B_q = im d_{q+1}
        let b: Vec<Matrix> = (0..=self.top_degree())
            .map(|q| ranks[q + 1].image_basis.clone())
            .collect();
        let default_h;
        let h = match h {
            Some(h) => h,
            None => {
                default_h = self.harmonic_basis()?;
                &default_h
            }
        };
        self.torsion_with(&ranks, h, &b)
    }

    /// Torsion by the definition with caller-supplied auxiliary bases
    /// `b[q]` of the boundaries `B_q` (any bases, not necessarily
    /// orthonormal).
    pub fn torsion_def_with_bases(&self, h: &HomologyBasis, b: &[Matrix]) -> Result<TorsionValue> {
        self.validate()?;
        let ranks = self.rank_decompositions()?;
        self.torsion_with(&ranks, h, b)
    }

    fn torsion_with(
        &self,
        ranks: &[RankDecomposition],
        h: &HomologyBasis,
        b: &[Matrix],
    ) -> Result<TorsionValue> {
        let n = self.top_degree();
        if h.bases.len() != n + 1 {
            return Err(Error::input(format!(
                "homology basis has {} degrees, complex has {}",
                h.bases.len(),
                n + 1
            )));
        }
        if b.len() != n + 1 {
            return Err(Error::input("need one boundary basis per degree"));
        }
        let mut log_tau = 0.0;
        let mut worst_cond: f64 = 1.0;
        for q in 0..=n {
            let dq = self.dims[q];
            let down = &ranks[q];
            let bq = &b[q];
            if bq.rows() != dq || bq.cols() != ranks[q + 1].rank {
                return Err(Error::input(format!(
                    "boundary basis in degree {q} has shape {:?}, expected {:?}",
                    bq.shape(),
                    (dq, ranks[q + 1].rank)
                )));
            }
            let hq = &h.bases[q];
            if hq.rows() != dq {
                return Err(Error::input(format!(
                    "homology basis in degree {q} has {} rows, expected {dq}",
                    hq.rows()
                )));
            }
            let dmat = self.boundary(q);
            let cycle_defect = dmat.matmul(hq).max_abs();
            if cycle_defect > 1e-8 * (dmat.norm() * hq.norm()).max(1.0) {
                return Err(Error::input(format!(
                    "homology representatives in degree {q} are not cycles (defect {cycle_defect:e})"
                )));
            }
            // project onto Z_q = ker d_q
            let kernel = &down.kernel_basis;
            let h_lift = kernel.matmul(&kernel.transpose().matmul(hq));
            // minimum-norm lift of b_{q-1} through d_q
            let b_lift = if q == 0 {
                Matrix::zeros(dq, 0)
            } else {
                down.pinv_apply(&b[q - 1])
            };
            let assembled = bq.hstack(&h_lift).hstack(&b_lift);
            if assembled.cols() != dq {
                return Err(Error::input(format!(
                    "degree {q}: {} boundary + {} homology + {} lifted vectors do not form a basis of a {dq}-dimensional space",
                    bq.cols(),
                    hq.cols(),
                    b_lift.cols()
                )));
            }
            let (ld, cond) = log_abs_det_with_condition(&assembled).map_err(|e| match e {
                Error::Singular { .. } => Error::input(format!(
                    "homology basis does not span H_{q} (assembled basis is singular)"
                )),
                other => other,
            })?;
            worst_cond = worst_cond.max(cond);
            log_tau += if q % 2 == 0 { ld } else { -ld };
        }
        Ok(TorsionValue::new(
            log_tau,
            TorsionMethod::Definition,
            worst_cond,
        ))
    }

    /// Torsion of an acyclic complex from the determinants of its
    /// combinatorial Laplacians:
    /// `log tau = 1/2 sum_q (-1)^{q+1} q log det(-Laplacian_q)`.
    pub fn torsion_laplacian(&self) -> Result<TorsionValue> {
        let hd = self.homology_dims()?;
        if let Some(q) = hd.iter().position(|&h| h != 0) {
            return Err(Error::Precondition(format!(
                "Laplacian formula needs an acyclic complex; H_{q} has dimension {}",
                hd[q]
            )));
        }
        let mut log_tau = 0.0;
        let mut worst_cond: f64 = 1.0;
        for q in 1..=self.top_degree() {
            let (ld, cond) = self.laplacian_log_det(q)?;
            worst_cond = worst_cond.max(cond);
            let sign = if q % 2 == 0 { -1.0 } else { 1.0 };
            log_tau += 0.5 * sign * q as f64 * ld;
        }
        Ok(TorsionValue::new(
            log_tau,
            TorsionMethod::Laplacian,
            worst_cond,
        ))
    }

    /// `log det Laplacian_q` from the singular values of the stacked
    /// `[d_q; d_{q+1}^T]`, whose Gram matrix is the Laplacian; this avoids
    /// squaring the condition number. Returns the Laplacian's condition number.
    fn laplacian_log_det(&self, q: usize) -> Result<(f64, f64)> {
        let n = self.dims[q];
        if n == 0 {
            return Ok((0.0, 1.0));
        }
        let stacked = self
            .boundary(q)
            .transpose()
            .hstack(&self.boundary(q + 1))
            .transpose();
        let sv = svd_rank(&stacked, DEFAULT_RANK_TOL)?.singular_values;
        let (max, min) = (sv[0], sv.last().copied().unwrap_or(0.0));
        if sv.len() < n || min <= max * f64::EPSILON * n as f64 {
            return Err(Error::Singular {
                smallest_singular_value: if sv.len() < n { 0.0 } else { min },
            });
        }
        let log_det = 2.0 * sv.iter().map(|s| s.ln()).sum::<f64>();
        Ok((log_det, (max / min).powi(2)))
    }

    pub fn torsion(&self, method: TorsionMethod) -> Result<TorsionValue> {
        match method {
            TorsionMethod::Definition => self.torsion_def(None),
            TorsionMethod::Laplacian => self.torsion_laplacian(),
        }
    }

    /// Tensor product with boundary `d x 1 + (-1)^p 1 x d` and the tensor
    /// preferred bases; degree `n` is ordered by increasing `p` in `C_p x D_{n-p}`.
    pub fn tensor_product(&self, other: &ChainComplex) -> ChainComplex {
        let (n, m) = (self.top_degree(), other.top_degree());
        let top = n + m;
        let blocks = |deg: usize| -> Vec<(usize, usize, usize)> {
            // (p, q, offset)
            let mut out = Vec::new();
            let mut offset = 0;
            for p in 0..=n.min(deg) {
                let q = deg - p;
                if q > m {
                    continue;
                }
                out.push((p, q, offset));
                offset += self.dims[p] * other.dims[q];
            }
            out
        };
        let dims: Vec<usize> = (0..=top)
            .map(|deg| {
                blocks(deg)
                    .iter()
                    .map(|&(p, q, _)| self.dims[p] * other.dims[q])
                    .sum()
            })
            .collect();
        let mut boundaries = Vec::with_capacity(top);
        for deg in 1..=top {
            let mut mat = Matrix::zeros(dims[deg - 1], dims[deg]);
            let targets = blocks(deg - 1);
            let find =
                |p: usize, q: usize| targets.iter().find(|t| t.0 == p && t.1 == q).map(|t| t.2);
            for (p, q, col) in blocks(deg) {
                if p > 0 {
                    if let Some(row) = find(p - 1, q) {
                        let blk = self.boundary(p).kron(&Matrix::identity(other.dims[q]));
                        mat.add_block(row, col, &blk);
                    }
                }
                if q > 0 {
                    if let Some(row) = find(p, q - 1) {
                        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                        let blk = Matrix::identity(self.dims[p])
                            .kron(&other.boundary(q))
                            .scale(sign);
                        mat.add_block(row, col, &blk);
                    }
                }
            }
            boundaries.push(mat);
        }
        ChainComplex {
            dims,
            boundaries,
            label: format!("({}) x ({})", self.label, other.label),
        }
    }

    /// Dual complex: degree `q` is `C_{N-q}` with boundary the transpose of
    /// `d_{N-q+1}`.
    pub fn dual(&self) -> ChainComplex {
        let n = self.top_degree();
        let dims: Vec<usize> = (0..=n).map(|q| self.dims[n - q]).collect();
        let boundaries = (1..=n)
            .map(|q| self.boundaries[n - q].transpose())
            .collect();
        ChainComplex {
            dims,
            boundaries,
            label: format!("dual({})", self.label),
        }
    }
}
