//! Coordinate descent on the entries of a witness.

use num_complex::Complex64;

use super::Witness;
use crate::error::Result;
use crate::linalg::{CMatrix, PsdMatrix};

pub const MAX_PASSES: usize = 200;
const MIN_STEP: f64 = 1e-9;

/// Hermitian coordinate directions of an `n×n` matrix: diagonal entries, and
/// real/imaginary parts of each upper off-diagonal pair.
fn directions(n: usize) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push((i, i, false));
        for j in i + 1..n {
            out.push((i, j, false));
            out.push((i, j, true));
        }
    }
    out
}

fn perturb(m: &CMatrix, (i, j, imag): (usize, usize, bool), delta: f64) -> CMatrix {
    let mut out = m.clone();
    let z = if imag {
        Complex64::new(0.0, delta)
    } else {
        Complex64::new(delta, 0.0)
    };
    out[(i, j)] += z;
    if i != j {
        out[(j, i)] += z.conj();
    }
    out
}

fn admissible(m: &CMatrix, cap: f64) -> Option<PsdMatrix> {
    let x = PsdMatrix::from_matrix(m).ok()?;
    (x.is_strictly_positive() && x.condition_number() <= cap).then_some(x)
}

/// Shrinking-step coordinate descent on every argument entry of `w`, keeping
/// each argument strictly positive with condition number at most `cap`. The
/// step is relative to each matrix's norm and halves after a pass without
/// improvement. Stops after [`MAX_PASSES`] passes or once the margin is well
/// past `-tol_rel`.
pub(crate) fn coordinate_descent(mut w: Witness, cap: f64, tol_rel: f64) -> Result<Witness> {
    let n = w.dim();
    let dirs = directions(n);
    let goal = -(100.0 * tol_rel).max(1e-6);
    let arity = w.first.len();
    let mut first: Vec<PsdMatrix> = w.first.iter().map(PsdMatrix::from_matrix).collect::<Result<_>>()?;
    let mut second: Vec<PsdMatrix> = w.second.iter().map(PsdMatrix::from_matrix).collect::<Result<_>>()?;
    let mut margin = w
        .functional
        .margin(&w.fixed, &first, &second, w.lambda, w.direction)?;
    let mut step = 0.25;
    for _ in 0..MAX_PASSES {
        if margin < goal || step < MIN_STEP {
            break;
        }
        let mut improved = false;
        for slot in 0..2 * arity {
            for &dir in &dirs {
                for sign in [1.0, -1.0] {
                    let (side, k) = if slot < arity { (0, slot) } else { (1, slot - arity) };
                    let current = if side == 0 { &first[k] } else { &second[k] };
                    let delta = sign * step * current.norm();
                    let Some(candidate) = admissible(&perturb(current.matrix(), dir, delta), cap) else {
                        continue;
                    };
                    let (mut f, mut s) = (first.clone(), second.clone());
                    if side == 0 {
                        f[k] = candidate;
                    } else {
                        s[k] = candidate;
                    }
                    let Ok(m) = w.functional.margin(&w.fixed, &f, &s, w.lambda, w.direction) else {
                        continue;
                    };
                    if m < margin {
                        margin = m;
                        first = f;
                        second = s;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    w.first = first.iter().map(|x| x.matrix().clone()).collect();
    w.second = second.iter().map(|x| x.matrix().clone()).collect();
    w.margin = margin;
    w.refined = true;
    Ok(w)
}
