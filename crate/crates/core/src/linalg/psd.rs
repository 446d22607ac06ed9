use serde::{Deserialize, Serialize};

use super::eigen::{eig_hermitian, SpectralDecomposition};
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Eigenvalues down to `-PSD_SLACK·‖X‖₂` are accepted as rounding noise.
pub const PSD_SLACK: f64 = 1e-12;
/// Negative powers need `λ_min ≥ STRICT_FLOOR·‖X‖₂`.
pub const STRICT_FLOOR: f64 = 1e-10;

/// Square complex matrix with exact Hermitian symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Symmetrizes `m` as `(m + m*)/2`.
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::Empty);
        }
        Ok(HermitianMatrix(m.hermitian_part()))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(&CMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        eig_hermitian(&self.0)
    }
}

/// Hermitian matrix whose spectrum passed the positivity check, together with
/// its cached eigendecomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdMatrix {
    base: HermitianMatrix,
    spectral: SpectralDecomposition,
}

impl PsdMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let spectral = h.eig()?;
        Self::checked(h, spectral)
    }

    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(&CMatrix::from_real_diagonal(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n)).expect("identity is positive")
    }

    /// Pairs a matrix with a decomposition already known to describe it.
    pub(crate) fn from_parts(base: CMatrix, spectral: SpectralDecomposition) -> Result<Self> {
        Self::checked(HermitianMatrix::new(&base)?, spectral)
    }

    fn checked(base: HermitianMatrix, spectral: SpectralDecomposition) -> Result<Self> {
        let norm = spectral.spectral_norm();
        let min_eig = spectral.min_eigenvalue();
        if min_eig < -PSD_SLACK * norm {
            return Err(Error::NotPsd { min_eig, norm });
        }
        Ok(PsdMatrix { base, spectral })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn min_eig(&self) -> f64 {
        self.spectral.min_eigenvalue()
    }

    pub fn norm(&self) -> f64 {
        self.spectral.spectral_norm()
    }

    pub fn condition_number(&self) -> f64 {
        self.norm() / self.min_eig()
    }

    pub fn strict_floor(&self) -> f64 {
        STRICT_FLOOR * self.norm()
    }

    /// Strictly positive in the sense required for negative powers.
    pub fn is_strictly_positive(&self) -> bool {
        self.min_eig() > 0.0 && self.min_eig() >= self.strict_floor()
    }

    pub fn scale(&self, factor: f64) -> Result<PsdMatrix> {
        if !(factor > 0.0) {
            return Err(Error::param(format!("scale factor must be positive, got {factor}")));
        }
        let spectral = SpectralDecomposition {
            eigenvalues: self.spectral.eigenvalues.iter().map(|l| l * factor).collect(),
            eigenvectors: self.spectral.eigenvectors.clone(),
        };
        Self::from_parts(self.matrix().scale(factor), spectral)
    }

    /// `λ·self + (1−λ)·other`.
    pub fn convex_combination(&self, other: &PsdMatrix, lambda: f64) -> Result<PsdMatrix> {
        PsdMatrix::from_matrix(&self.matrix().convex_combination(other.matrix(), lambda)?)
    }

    /// `diag(self, other)`; the decomposition is assembled blockwise.
    pub fn block_diag(&self, other: &PsdMatrix) -> PsdMatrix {
        let (n, m) = (self.dim(), other.dim());
        let vecs = self.spectral.eigenvectors.block_diag(&other.spectral.eigenvectors);
        let mut pairs: Vec<(f64, usize)> = self
            .spectral
            .eigenvalues
            .iter()
            .chain(&other.spectral.eigenvalues)
            .copied()
            .zip(0..n + m)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spectral = SpectralDecomposition {
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            eigenvectors: CMatrix::from_fn(n + m, n + m, |i, j| vecs[(i, pairs[j].1)]),
        };
        PsdMatrix::from_parts(self.matrix().block_diag(other.matrix()), spectral).expect("blocks are PSD")
    }
}

/// `X^r` through the cached spectral decomposition.
///
/// * `r = 0` returns the identity exactly.
/// * `r < 0` requires `λ_min ≥ STRICT_FLOOR·‖X‖₂`.
/// * `r > 0` non-integer clamps eigenvalues in `[−PSD_SLACK‖X‖₂, 0]` to zero and
///   uses `0^r = 0`.
pub fn mat_pow(x: &PsdMatrix, r: f64) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix(mat_pow_matrix(x, r)?))
}

pub(crate) fn mat_pow_matrix(x: &PsdMatrix, r: f64) -> Result<CMatrix> {
    if !r.is_finite() {
        return Err(Error::NonFinite(format!("exponent {r}")));
    }
    if r == 0.0 {
        return Ok(CMatrix::identity(x.dim()));
    }
    let min_eig = x.min_eig();
    if r < 0.0 && !x.is_strictly_positive() {
        return Err(Error::Domain {
            exponent: r,
            eigenvalue: min_eig,
            floor: x.strict_floor(),
        });
    }
    if r == 1.0 {
        return Ok(x.matrix().clone());
    }
    let integer = r.fract() == 0.0 && r.abs() < 64.0;
    Ok(if integer {
        let k = r as i32;
        x.spectral().map(|l| l.powi(k))
    } else {
        x.spectral().map(|l| if l <= 0.0 { 0.0 } else { l.powf(r) })
    })
}

/// Outcome of a positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eig: f64,
    pub norm: f64,
}

/// True iff `λ_min(H) ≥ −tol·max(1, ‖H‖₂)`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<PsdReport> {
    let d = h.eig()?;
    let norm = d.spectral_norm();
    let min_eig = d.min_eigenvalue();
    Ok(PsdReport {
        is_psd: min_eig >= -tol * norm.max(1.0),
        min_eig,
        norm,
    })
}
