//! Reidemeister torsion of based chain complexes and simplicial complexes with
//! flat orthogonal local systems, Ray-Singer analytic torsion of explicitly
//! known Laplacian spectra, and the numerical comparison between the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense linear algebra, special functions, quadrature.
//! * [`chain`]: based chain complexes and their torsion.
//! * [`topology`]: simplicial complexes, edge cocycles, twisting, subdivision.
//! * [`spaces`]: circles, lens spaces, circle and torus spectra.
//! * [`spectral`]: heat traces, spectral zeta functions, determinants.
//! * [`rs_torsion`]: analytic torsion and the combinatorial/analytic comparison.
//! * [`format`]: the JSON complex file used by the command line tool.

pub mod chain;
pub mod error;
pub mod format;
pub mod numerics;
pub mod rs_torsion;
pub mod spaces;
pub mod spectral;
pub mod topology;

pub use chain::{ChainComplex, HomologyBasis, TorsionMethod, TorsionValue};
pub use error::{Error, Result};
pub use format::ComplexFile;
pub use numerics::Matrix;
pub use rs_torsion::TorsionComparison;
pub use spaces::{FormSpectra, LensModel};
pub use spectral::{MellinSplit, Spectrum, ZetaResult};
pub use topology::{EdgeCocycle, SimplicialComplex};
