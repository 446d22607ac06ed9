//! Cross-checks between the equivalent formulations of joint convexity:
//! `Φ`, `Ψ_K` with unitary `K`, and the one-argument map `A ↦ Ψ_K(A,A)`.

use serde::{Deserialize, Serialize};

use super::{probe, ConvexityVerdict, Direction, Functional, ProbeConfig, Witness};
use crate::error::Result;
use crate::functionals::{phi, psi, ParamPoint};
use crate::linalg::{CMatrix, PsdMatrix, StreamRng};
use crate::probes::sample_psd;

/// A violation in one formulation mapped to another and re-evaluated there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub from: String,
    pub to: String,
    pub source_margin: f64,
    pub transferred_margin: f64,
    pub reproduced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub params: ParamPoint,
    pub direction: Direction,
    pub phi: ConvexityVerdict,
    /// `Ψ_I` probed with the same seed; must match `phi` bit for bit.
    pub psi_identity: ConvexityVerdict,
    pub psi_identity_bitwise: bool,
    pub psi_unitary: ConvexityVerdict,
    pub psi_diagonal: ConvexityVerdict,
    /// Largest relative deviation of `Ψ_S(diag(A,B), diag(A,B))`, `S` the block
    /// swap, from `Φ(A,B) + Φ(B,A)`.
    pub swap_embedding_residual: f64,
    /// Largest relative deviation of `Ψ_E(diag(A,B), diag(A,B))`, `E` the
    /// corner partial isometry `[[0,0],[I,0]]`, from `Φ(A,B)`.
    pub corner_embedding_residual: f64,
    pub transfers: Vec<TransferCheck>,
}

impl EquivalenceReport {
    /// Every attempted transfer reproduced its violation.
    pub fn consistent(&self) -> bool {
        self.psi_identity_bitwise && self.transfers.iter().all(|t| t.reproduced)
    }
}

fn swap_unitary(n: usize) -> CMatrix {
    let z = CMatrix::zeros(n, n);
    let i = CMatrix::identity(n);
    CMatrix::from_blocks(&z, &i, &i, &z).expect("square blocks")
}

fn corner_isometry(n: usize) -> CMatrix {
    let z = CMatrix::zeros(n, n);
    CMatrix::from_blocks(&z, &z, &CMatrix::identity(n), &z).expect("square blocks")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Residuals of the two block embeddings on `samples` random pairs.
pub(crate) fn embedding_residuals(params: &ParamPoint, dim: usize, samples: usize, seed: u64, cap: f64) -> Result<(f64, f64)> {
    let (swap, corner) = (swap_unitary(dim), corner_isometry(dim));
    let (mut worst_swap, mut worst_corner) = (0f64, 0f64);
    for i in 0..samples {
        let mut rng = StreamRng::new(seed, (1 << 40) + i as u64);
        let a = sample_psd(&mut rng, dim, cap);
        let b = sample_psd(&mut rng, dim, cap);
        let ab = a.block_diag(&b);
        let direct = phi(&a, &b, params)?;
        let reversed = phi(&b, &a, params)?;
        worst_swap = worst_swap.max(rel(psi(&swap, &ab, &ab, params)?, direct + reversed));
        worst_corner = worst_corner.max(rel(psi(&corner, &ab, &ab, params)?, direct));
    }
    Ok((worst_swap, worst_corner))
}

fn conjugated(u: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    Ok(&(&u.adjoint() * x) * u)
}

fn transfer(
    from: &str,
    to: &str,
    source: &Witness,
    target: Functional,
    fixed: Vec<CMatrix>,
    first: Vec<CMatrix>,
    second: Vec<CMatrix>,
    tol_rel: f64,
) -> Result<TransferCheck> {
    let w = Witness {
        functional: target,
        fixed,
        first,
        second,
        margin: f64::NAN,
        refined: false,
        ..source.clone()
    };
    let m = w.reevaluate()?;
    Ok(TransferCheck {
        from: from.into(),
        to: to.into(),
        source_margin: source.margin,
        transferred_margin: m,
        reproduced: m < -tol_rel / 2.0,
    })
}

/// Probes `Φ`, `Ψ_I`, `Ψ_U` (Haar `U` per trial) and `A ↦ Ψ_U(A,A)` with
/// the same configuration, checks the block embeddings, and maps every
/// violation found into the `Φ` formulation (or, for `Φ`, into the
/// one-argument map at doubled dimension) to confirm it persists.
pub fn probe_psi_equivalences(params: &ParamPoint, cfg: &ProbeConfig, direction: Direction) -> Result<EquivalenceReport> {
    cfg.validate()?;
    let n = cfg.dim;
    let phi_v = probe(&Functional::Trace { params: *params }, None, cfg, direction)?;
    let id = [CMatrix::identity(n)];
    let psi_id = probe(&Functional::Psi { params: *params }, Some(&id), cfg, direction)?;
    let bitwise = phi_v.worst_margin.to_bits() == psi_id.worst_margin.to_bits()
        && phi_v.witness.as_ref().map(|w| (&w.first, &w.second, w.trial))
            == psi_id.witness.as_ref().map(|w| (&w.first, &w.second, w.trial));
    let psi_u = probe(&Functional::Psi { params: *params }, None, cfg, direction)?;
    let psi_d = probe(&Functional::PsiDiagonal { params: *params }, None, cfg, direction)?;
    let (swap_res, corner_res) = embedding_residuals(params, n, 16, cfg.seed, cfg.cond_cap)?;

    let trace = Functional::Trace { params: *params };
    let mut transfers = Vec::new();
    if let Some(w) = psi_u.witness.as_ref().filter(|_| psi_u.violated) {
        let u = &w.fixed[0];
        let conj = |pair: &[CMatrix]| -> Result<Vec<CMatrix>> { Ok(vec![pair[0].clone(), conjugated(u, &pair[1])?]) };
        transfers.push(transfer("psi_unitary", "trace", w, trace.clone(), vec![], conj(&w.first)?, conj(&w.second)?, cfg.tol_rel)?);
    }
    if let Some(w) = psi_d.witness.as_ref().filter(|_| psi_d.violated) {
        let u = &w.fixed[0];
        let conj = |a: &CMatrix| -> Result<Vec<CMatrix>> { Ok(vec![a.clone(), conjugated(u, a)?]) };
        transfers.push(transfer("psi_diagonal", "trace", w, trace.clone(), vec![], conj(&w.first[0])?, conj(&w.second[0])?, cfg.tol_rel)?);
    }
    if let Some(w) = phi_v.witness.as_ref().filter(|_| phi_v.violated) {
        let embed = |pair: &[CMatrix]| -> Result<Vec<CMatrix>> {
            let (a, b) = (PsdMatrix::from_matrix(&pair[0])?, PsdMatrix::from_matrix(&pair[1])?);
            Ok(vec![a.block_diag(&b).matrix().clone()])
        };
        transfers.push(transfer(
            "trace",
            "psi_diagonal_corner",
            w,
            Functional::PsiDiagonal { params: *params },
            vec![corner_isometry(n)],
            embed(&w.first)?,
            embed(&w.second)?,
            cfg.tol_rel,
        )?);
    }
    Ok(EquivalenceReport {
        params: *params,
        direction,
        phi: phi_v,
        psi_identity: psi_id,
        psi_identity_bitwise: bitwise,
        psi_unitary: psi_u,
        psi_diagonal: psi_d,
        swap_embedding_residual: swap_res,
        corner_embedding_residual: corner_res,
        transfers,
    })
}
