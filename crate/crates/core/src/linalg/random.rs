//! Seeded random matrices.
//!
//! All randomness comes from ChaCha8 keyed by a 64-bit seed; independent tasks
//! take independent ChaCha streams (`StreamRng::new(seed, stream)`), so results
//! never depend on scheduling or thread count.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_hermitian, SpectralDecomposition};
use super::matrix::CMatrix;
use super::psd::PsdMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_COND_CAP: f64 = 1e3;

/// Counter-based generator for one task.
#[derive(Clone, Debug)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        StreamRng(rng)
    }

    /// Child generator for sub-task `index`, derived from this generator's
    /// next output.
    pub fn split(&mut self, index: u64) -> StreamRng {
        let key = self.0.next_u64();
        StreamRng::new(key, index)
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

/// Parameters for drawing a random matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub dim: usize,
    pub cond_cap: f64,
}

impl RandomSpec {
    pub fn new(seed: u64, dim: usize) -> Self {
        RandomSpec {
            seed,
            dim,
            cond_cap: DEFAULT_COND_CAP,
        }
    }

    pub fn with_cond_cap(mut self, cond_cap: f64) -> Self {
        self.cond_cap = cond_cap;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("dim must be positive"));
        }
        if !(self.cond_cap > 1.0) {
            return Err(Error::param(format!("cond_cap must exceed 1, got {}", self.cond_cap)));
        }
        Ok(())
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::new(self.seed, 0)
    }
}

/// Standard complex Gaussian matrix, entries with E|z|² = 1.
pub fn complex_gaussian(rng: &mut StreamRng, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gaussian() * scale, rng.gaussian() * scale))
}

/// Modified Gram–Schmidt on the columns of a full-rank matrix. The implicit
/// triangular factor has a positive diagonal, which fixes the phases so a
/// Gaussian input yields a Haar-distributed result.
pub(crate) fn orthonormalize_columns(m: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..rows {
                    let qk = q[(i, k)];
                    q[(i, j)] -= qk * dot;
                }
            }
        }
        let norm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(Error::Singular);
        }
        for i in 0..rows {
            q[(i, j)] /= norm;
        }
    }
    Ok(q)
}

pub(crate) fn haar_unitary(rng: &mut StreamRng, n: usize) -> CMatrix {
    loop {
        let g = complex_gaussian(rng, n, n);
        if let Ok(u) = orthonormalize_columns(&g) {
            return u;
        }
    }
}

/// Haar-random isometry `C^cols → C^rows` (requires `rows ≥ cols`).
pub(crate) fn haar_isometry(rng: &mut StreamRng, rows: usize, cols: usize) -> CMatrix {
    loop {
        let g = complex_gaussian(rng, rows, cols);
        if let Ok(u) = orthonormalize_columns(&g) {
            return u;
        }
    }
}

/// Haar-distributed unitary of size `spec.dim`.
pub fn random_unitary(spec: &RandomSpec) -> Result<CMatrix> {
    spec.validate()?;
    Ok(haar_unitary(&mut spec.rng(), spec.dim))
}

/// `G G* + δ I` with `G` complex Gaussian and `δ ≥ 0` the smallest shift that
/// brings the condition number under `cond_cap`.
pub fn random_psd(spec: &RandomSpec) -> Result<PsdMatrix> {
    spec.validate()?;
    Ok(wishart_psd(&mut spec.rng(), spec.dim, spec.cond_cap))
}

pub(crate) fn wishart_psd(rng: &mut StreamRng, dim: usize, cond_cap: f64) -> PsdMatrix {
    loop {
        let g = complex_gaussian(rng, dim, dim);
        let gram = (&g * &g.adjoint()).hermitian_part();
        let Ok(decomp) = eig_hermitian(&gram) else {
            continue;
        };
        let (lo, hi) = (decomp.min_eigenvalue().max(0.0), decomp.max_eigenvalue());
        if !(hi > 0.0) {
            continue;
        }
        let delta = ((hi - cond_cap * lo) / (cond_cap - 1.0)).max(0.0);
        // nudge so the cap holds after rounding
        let delta = if delta > 0.0 { delta * (1.0 + 1e-9) } else { delta };
        let decomp = clamp_floor(decomp.shifted(delta), lo + delta);
        let base = (&gram + &CMatrix::identity(dim).scale(delta)).hermitian_part();
        if let Ok(x) = PsdMatrix::from_parts(base, decomp) {
            if x.min_eig() > 0.0 {
                return x;
            }
        }
    }
}

fn clamp_floor(mut d: SpectralDecomposition, floor: f64) -> SpectralDecomposition {
    for l in &mut d.eigenvalues {
        if *l < floor {
            *l = floor;
        }
    }
    d
}

/// `U diag(e^{u_i ln κ}) U*` with Haar `U` and `u_i` uniform on [0, 1]: a
/// spectrum spread log-uniformly across the whole allowed condition range.
pub(crate) fn log_spectrum_psd(rng: &mut StreamRng, dim: usize, cond_cap: f64) -> PsdMatrix {
    let u = haar_unitary(rng, dim);
    let ln_cap = cond_cap.ln();
    let mut eigs: Vec<f64> = (0..dim).map(|_| (rng.uniform() * ln_cap).exp()).collect();
    eigs.sort_by(f64::total_cmp);
    let decomp = SpectralDecomposition {
        eigenvalues: eigs,
        eigenvectors: u,
    };
    let base = decomp.reconstruct();
    PsdMatrix::from_parts(base, decomp).expect("positive spectrum by construction")
}

/// Random contraction with spectral norm exactly `norm` (in (0, 1]).
pub fn random_contraction(spec: &RandomSpec, norm: f64) -> Result<CMatrix> {
    spec.validate()?;
    if !(norm > 0.0 && norm <= 1.0) {
        return Err(Error::param(format!("contraction norm must lie in (0,1], got {norm}")));
    }
    let mut rng = spec.rng();
    let g = complex_gaussian(&mut rng, spec.dim, spec.dim);
    let gram = (&g.adjoint() * &g).hermitian_part();
    let s_max = eig_hermitian(&gram)?.max_eigenvalue().sqrt();
    Ok(g.scale(norm / s_max))
}
