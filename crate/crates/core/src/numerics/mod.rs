//! Dense linear algebra, special functions and quadrature.

mod extended;
mod linalg;
mod matrix;
mod quadrature;
mod special;

pub use extended::{hurwitz_zeta_extended, DoubleDouble};
pub use linalg::{
    log_abs_det, log_abs_det_with_condition, orthonormal_span, svd_rank, sym_eig, EigenPair,
    RankDecomposition, DEFAULT_RANK_TOL,
};
pub use matrix::Matrix;
pub use quadrature::{gauss_legendre, integrate, Quadrature};
pub use special::{gamma_fn, hurwitz_zeta, rgamma, riemann_zeta, EULER_GAMMA};
