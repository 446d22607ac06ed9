use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::eig_hermitian;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// `K = W |K|` with `W` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Polar {
    pub unitary: CMatrix,
    pub modulus: CMatrix,
    pub singular_values: Vec<f64>,
    /// Right singular vectors (columns), ordered like `singular_values`.
    right_vectors: CMatrix,
}

/// Polar decomposition through the eigendecomposition of `K*K`. For singular
/// `K` the unitary factor is completed on the kernel by Gram–Schmidt.
pub fn polar(k: &CMatrix) -> Result<Polar> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    let n = k.rows();
    let gram = (&k.adjoint() * k).hermitian_part();
    let d = eig_hermitian(&gram)?;
    // descending singular values
    let order: Vec<usize> = (0..n).rev().collect();
    let sigma: Vec<f64> = order.iter().map(|&i| d.eigenvalues[i].max(0.0).sqrt()).collect();
    let v = CMatrix::from_fn(n, n, |i, j| d.eigenvectors[(i, order[j])]);
    let cutoff = 1e-10 * sigma[0].max(f64::MIN_POSITIVE);
    let kv = k * &v;

    let mut u = CMatrix::zeros(n, n);
    let mut filled = 0;
    for j in 0..n {
        if sigma[j] > cutoff {
            for i in 0..n {
                u[(i, j)] = kv[(i, j)] / sigma[j];
            }
            filled += 1;
        }
    }
    // complete with standard basis vectors, then re-orthonormalize in order
    let mut candidates = (0..n).map(|e| {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        col[e] = Complex64::new(1.0, 0.0);
        col
    });
    let mut cols: Vec<Vec<Complex64>> = (0..filled).map(|j| (0..n).map(|i| u[(i, j)]).collect()).collect();
    orthonormalize(&mut cols);
    while cols.len() < n {
        let Some(mut c) = candidates.next() else {
            return Err(Error::Singular);
        };
        for q in &cols {
            let dot: Complex64 = q.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci -= qi * dot;
            }
        }
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            c.iter_mut().for_each(|z| *z /= norm);
            cols.push(c);
            orthonormalize(&mut cols);
        }
    }
    let u = CMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let unitary = &u * &v.adjoint();
    let modulus = scaled_projection(&v, &sigma);
    Ok(Polar {
        unitary,
        modulus,
        singular_values: sigma,
        right_vectors: v,
    })
}

fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        for _ in 0..2 {
            for k in 0..j {
                let dot: Complex64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let qk = cols[k].clone();
                for (cj, qi) in cols[j].iter_mut().zip(&qk) {
                    *cj -= qi * dot;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
}

/// `V diag(w) V*`.
fn scaled_projection(v: &CMatrix, w: &[f64]) -> CMatrix {
    let n = v.rows();
    CMatrix::from_fn(n, n, |i, j| {
        w.iter()
            .enumerate()
            .map(|(k, &wk)| v[(i, k)] * v[(j, k)].conj() * wk)
            .sum()
    })
}

impl Polar {
    /// `sqrt(I − |K|²)`, defined for contractions.
    pub fn defect(&self) -> CMatrix {
        let w: Vec<f64> = self.singular_values.iter().map(|s| (1.0 - s * s).max(0.0).sqrt()).collect();
        scaled_projection(&self.right_vectors, &w)
    }
}

/// Unitary dilation `[[K, W√(I−|K|²)], [−W√(I−|K|²), K]]` of a contraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dilation {
    pub unitary: CMatrix,
    /// The contraction placed in the corner (the input divided by `rescaled_by`).
    pub contraction: CMatrix,
    /// 1 when the input already satisfied `‖K‖₂ ≤ 1`.
    pub rescaled_by: f64,
}

pub fn polar_dilation(k: &CMatrix) -> Result<Dilation> {
    let p = polar(k)?;
    let norm = p.singular_values[0];
    let (contraction, p, rescaled_by) = if norm > 1.0 {
        let scaled = k.scale(1.0 / norm);
        let p = polar(&scaled)?;
        (scaled, p, norm)
    } else {
        (k.clone(), p, 1.0)
    };
    let off = &p.unitary * &p.defect();
    let unitary = CMatrix::from_blocks(&contraction, &off, &off.scale(-1.0), &contraction)?;
    Ok(Dilation {
        unitary,
        contraction,
        rescaled_by,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{complex_gaussian, random_contraction, RandomSpec, StreamRng};

    #[test]
    fn polar_factors_reconstruct() {
        let mut rng = StreamRng::new(4, 0);
        for n in 1..=5 {
            let k = complex_gaussian(&mut rng, n, n);
            let p = polar(&k).unwrap();
            assert!(p.unitary.unitarity_residual() < 1e-12);
            assert!((&(&p.unitary * &p.modulus) - &k).frobenius_norm() < 1e-12 * k.frobenius_norm());
        }
    }

    #[test]
    fn identity_dilates_block_diagonally() {
        let d = polar_dilation(&CMatrix::identity(3)).unwrap();
        assert!((&d.unitary - &CMatrix::identity(6)).frobenius_norm() < 1e-15);
        assert_eq!(d.rescaled_by, 1.0);
    }

    #[test]
    fn zero_dilates_to_off_diagonal_unitary() {
        let d = polar_dilation(&CMatrix::zeros(2, 2)).unwrap();
        assert!(d.unitary.unitarity_residual() < 1e-12);
        assert_eq!(d.unitary.block(0, 0, 2, 2), CMatrix::zeros(2, 2));
        let w = d.unitary.block(0, 2, 2, 2);
        assert!(w.unitarity_residual() < 1e-12);
        assert_eq!(d.unitary.block(2, 0, 2, 2), w.scale(-1.0));
    }

    #[test]
    fn random_contraction_dilation_is_unitary() {
        for seed in 0..50 {
            let k = random_contraction(&RandomSpec::new(seed, 3), 0.9).unwrap();
            let d = polar_dilation(&k).unwrap();
            assert!(d.unitary.unitarity_residual() <= 1e-10);
            assert_eq!(d.unitary.block(0, 0, 3, 3), k);
            assert_eq!(d.unitary.block(3, 3, 3, 3), k);
        }
    }

    #[test]
    fn large_input_is_rescaled() {
        let k = CMatrix::from_real_diagonal(&[4.0, 1.0]);
        let d = polar_dilation(&k).unwrap();
        assert!((d.rescaled_by - 4.0).abs() < 1e-12);
        assert!(d.unitary.unitarity_residual() <= 1e-10);
    }

    #[test]
    fn rank_deficient_contraction() {
        let k = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.0, 0.0]]).unwrap();
        let d = polar_dilation(&k).unwrap();
        assert!(d.unitary.unitarity_residual() <= 1e-10);
    }
}
