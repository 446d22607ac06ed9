//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then annihilates the (now real) pivot with a plane rotation. The
//! combined transform is applied as `A ← J* A J` and accumulated into `V`.
//! Rotations are skipped when `|a_pq| ≤ ε·sqrt(|a_pp·a_qq|)`, which keeps small
//! eigenvalues of graded positive definite matrices accurate to high relative
//! precision.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) with the unitary matrix whose columns are the
/// matching eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in fl.iter().enumerate() {
                    if w != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                if i == j {
                    out[(i, i)] = Complex64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Largest |λ|.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// `‖V diag(λ) V* − H‖_F / ‖H‖_F` (absolute when `H = 0`).
    pub fn reconstruction_residual(&self, h: &CMatrix) -> f64 {
        let diff = (&self.reconstruct() - h).frobenius_norm();
        let norm = h.frobenius_norm();
        if norm > 0.0 {
            diff / norm
        } else {
            diff
        }
    }

    pub fn orthonormality_residual(&self) -> f64 {
        self.eigenvectors.unitarity_residual()
    }

    /// Same eigenvectors, eigenvalues shifted by `delta`.
    pub(crate) fn shifted(&self, delta: f64) -> Self {
        SpectralDecomposition {
            eigenvalues: self.eigenvalues.iter().map(|l| l + delta).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// Tolerance on reconstruction and orthonormality residuals for dimension `n`.
pub fn eig_tol(n: usize) -> f64 {
    1e-12 * n as f64
}

/// Eigendecomposition of a Hermitian matrix. Only the upper triangle's
/// Hermitian part is trusted; the input is symmetrized first.
pub fn eig_hermitian(h: &CMatrix) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    if n == 0 {
        return Err(Error::Empty);
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("eigensolver input".into()));
    }
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);

    let mut converged = n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let abs_g = g.norm();
                if abs_g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if abs_g <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, g, abs_g, app, aqq);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            off_diagonal: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, g: Complex64, abs_g: f64, app: f64, aqq: f64) {
    let n = a.rows();
    let phase = g / abs_g;
    let theta = (aqq - app) / (2.0 * abs_g);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    } else {
        0.0
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let conj_phase = phase.conj();
    // J = [[c, s], [-s·conj(phase), c·conj(phase)]]
    let j_qp = -conj_phase * s;
    let j_qq = conj_phase * c;

    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * c + y * j_qp;
        a[(k, q)] = x * s + y * j_qq;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = x * c + y * j_qp.conj();
        a[(q, k)] = x * s + y * j_qq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * abs_g, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * abs_g, 0.0);

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c + y * j_qp;
        v[(k, q)] = x * s + y * j_qq;
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{complex_gaussian, StreamRng};

    #[test]
    fn diagonal_input_is_sorted() {
        let d = eig_hermitian(&CMatrix::from_real_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 3.0]);
        let expected = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(d.eigenvectors, expected);
    }

    #[test]
    fn golden_ratio_matrix() {
        let h = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap();
        let d = eig_hermitian(&h).unwrap();
        let s5 = 5f64.sqrt();
        assert!((d.eigenvalues[0] - (3.0 - s5) / 2.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] - (3.0 + s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let h = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, 1.0),
            (1, 0) => Complex64::new(0.0, -1.0),
            _ => Complex64::new(1.0, 0.0),
        });
        let d = eig_hermitian(&h).unwrap();
        assert!(d.eigenvalues[0].abs() < 1e-15);
        assert!((d.eigenvalues[1] - 2.0).abs() < 1e-15);
        assert!(d.reconstruction_residual(&h) < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = StreamRng::new(17, 0);
        for n in 1..=8 {
            for _ in 0..20 {
                let g = complex_gaussian(&mut rng, n, n);
                let h = g.hermitian_part();
                let d = eig_hermitian(&h).unwrap();
                assert!(d.reconstruction_residual(&h) <= eig_tol(n), "n={n}");
                assert!(d.orthonormality_residual() <= eig_tol(n), "n={n}");
                assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            eig_hermitian(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn graded_matrix_keeps_small_eigenvalues() {
        // diag(1, 1e-12) rotated by a fixed real rotation.
        let (c, s) = (0.6f64, 0.8f64);
        let r = CMatrix::from_real_rows(&[&[c, -s], &[s, c]]).unwrap();
        let d = CMatrix::from_real_diagonal(&[1.0, 1e-12]);
        let h = &(&r * &d) * &r.adjoint();
        let e = eig_hermitian(&h).unwrap();
        assert!((e.eigenvalues[0] - 1e-12).abs() < 1e-12 * 1e-3);
    }
}
