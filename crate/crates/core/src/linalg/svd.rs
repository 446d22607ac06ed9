//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Pairs of columns are orthogonalized in place until every pair is
//! numerically orthogonal; the column norms are then the singular values.
//! Working on `G` directly rather than on `G*G` keeps singular values near
//! `ε·‖G‖` resolvable, where the squared spectrum would drown in rounding.

use num_complex::Complex64;

use super::eigen::MAX_SWEEPS;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Singular values of `g` in ascending order (`min(rows, cols)` of them).
pub fn singular_values(g: &CMatrix) -> Result<Vec<f64>> {
    if !g.is_finite() {
        return Err(Error::NonFinite("singular value input".into()));
    }
    // orthogonalize the shorter side so the count comes out right
    let mut w = if g.rows() < g.cols() { g.adjoint() } else { g.clone() };
    let (m, n) = (w.rows(), w.cols());
    let tol = f64::EPSILON * m as f64;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut a, mut b, mut c) = (0.0, 0.0, Complex64::new(0.0, 0.0));
                for k in 0..m {
                    let (x, y) = (w[(k, i)], w[(k, j)]);
                    a += x.norm_sqr();
                    b += y.norm_sqr();
                    c += x.conj() * y;
                }
                let cn = c.norm();
                if a == 0.0 || b == 0.0 || cn <= tol * (a * b).sqrt() {
                    continue;
                }
                worst = worst.max(cn / (a * b).sqrt());
                let phase = c / cn;
                let zeta = (b - a) / (2.0 * cn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for k in 0..m {
                    let x = w[(k, i)];
                    let y = w[(k, j)] * phase.conj();
                    w[(k, i)] = x * cs - y * sn;
                    w[(k, j)] = (x * sn + y * cs) * phase;
                }
            }
        }
        if worst == 0.0 {
            let mut sv: Vec<f64> = (0..n).map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
            sv.sort_by(f64::total_cmp);
            return Ok(sv);
        }
    }
    Err(Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        off_diagonal: worst,
    })
}
