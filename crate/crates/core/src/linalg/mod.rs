//! Dense complex Hermitian linear algebra.

mod dilation;
mod eigen;
pub mod hexfloat;
mod matrix;
mod psd;
pub mod random;
mod svd;

pub use dilation::{polar, polar_dilation, Dilation, Polar};
pub use eigen::{eig_hermitian, eig_tol, SpectralDecomposition, MAX_SWEEPS};
pub use matrix::{CMatrix, ONE, ZERO};
pub(crate) use psd::mat_pow_matrix;
pub use psd::{is_psd, mat_pow, HermitianMatrix, PsdMatrix, PsdReport, PSD_SLACK, STRICT_FLOOR};
pub use svd::singular_values;
pub use random::{random_contraction, random_psd, random_unitary, RandomSpec, StreamRng};

/// Alias kept for call sites that read better with the operation name.
pub fn eig(h: &HermitianMatrix) -> crate::Result<SpectralDecomposition> {
    h.eig()
}
