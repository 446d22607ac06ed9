//! Randomized joint convexity/concavity tests with witness capture.
//!
//! Every probe draws pairs of argument tuples, evaluates the weighted gap
//! `λ f(X₁) + (1−λ) f(X₂) − f(λX₁ + (1−λ)X₂)` for each configured `λ`, and
//! keeps the tuple with the most negative normalized margin as a witness.
//! Trial `i` draws from its own ChaCha stream, so results depend only on the
//! configuration.

mod equivalence;
mod functional;
mod refine;
mod scan;

pub use equivalence::{probe_psi_equivalences, EquivalenceReport, TransferCheck};
pub use functional::{Direction, Functional};
pub use scan::{region_scan, GridSpec, RegionReport, ReportRow, ScanSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{ParamPoint, TripleParams};
use crate::linalg::random::{haar_unitary, log_spectrum_psd, wishart_psd, DEFAULT_COND_CAP};
use crate::linalg::{CMatrix, PsdMatrix, StreamRng};

/// Cap on the condition number used near degenerate exponents.
pub const NEAR_BOUNDARY_COND_CAP: f64 = 1e2;

/// Log-scale half-width of the random overall scaling applied to samples.
const SCALE_SPREAD: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub dim: usize,
    pub trials: usize,
    /// Convex-combination weights, each in (0, 1).
    pub lambdas: Vec<f64>,
    pub tol_rel: f64,
    pub seed: u64,
    pub cond_cap: f64,
    /// Run local refinement when sampling finds no violation.
    pub refine: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            dim: 2,
            trials: 1000,
            lambdas: vec![0.5],
            tol_rel: 1e-8,
            seed: 0,
            cond_cap: DEFAULT_COND_CAP,
            refine: false,
        }
    }
}

impl ProbeConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        ProbeConfig {
            dim,
            trials,
            seed,
            ..Default::default()
        }
    }

    pub fn with_lambdas(mut self, lambdas: &[f64]) -> Self {
        self.lambdas = lambdas.to_vec();
        self
    }

    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::param("probe dimension must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::param("at least one trial is required"));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::param("every lambda must lie strictly between 0 and 1"));
        }
        if !(self.tol_rel >= 0.0 && self.tol_rel.is_finite()) {
            return Err(Error::param("tol_rel must be finite and nonnegative"));
        }
        if !(self.cond_cap > 1.0 && self.cond_cap.is_finite()) {
            return Err(Error::param("cond_cap must exceed 1"));
        }
        Ok(())
    }
}

/// A concrete violation candidate, reproducible from its serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub functional: Functional,
    pub direction: Direction,
    /// Matrices held fixed by the functional (`K` for `Ψ_K`, `D` for the Epstein map).
    pub fixed: Vec<CMatrix>,
    pub first: Vec<CMatrix>,
    pub second: Vec<CMatrix>,
    pub lambda: f64,
    pub margin: f64,
    /// Index of the trial that produced the tuple (before refinement).
    pub trial: usize,
    pub refined: bool,
}

impl Witness {
    /// Rebuilds the arguments from the stored matrices and recomputes the margin.
    pub fn reevaluate(&self) -> Result<f64> {
        let first = to_psd(&self.first)?;
        let second = to_psd(&self.second)?;
        self.functional
            .margin(&self.fixed, &first, &second, self.lambda, self.direction)
    }

    /// Embeds the witness one dimension up by appending the same diagonal
    /// entry `pad` to every argument (and 1 to every fixed matrix). The extra
    /// block contributes equally to all three evaluations, so the gap is kept.
    pub fn padded(&self, pad: f64) -> Result<Witness> {
        if !(pad > 0.0) {
            return Err(Error::param("padding value must be positive"));
        }
        let grow = |ms: &[CMatrix], v: f64| ms.iter().map(|m| m.block_diag(&CMatrix::from_real_diagonal(&[v]))).collect();
        let mut w = Witness {
            fixed: grow(&self.fixed, 1.0),
            first: grow(&self.first, pad),
            second: grow(&self.second, pad),
            ..self.clone()
        };
        w.margin = w.reevaluate()?;
        Ok(w)
    }

    pub fn dim(&self) -> usize {
        self.first.first().map_or(0, |m| m.rows())
    }
}

fn to_psd(ms: &[CMatrix]) -> Result<Vec<PsdMatrix>> {
    ms.iter().map(PsdMatrix::from_matrix).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub violated: bool,
    /// Most negative normalized gap seen (after refinement, if it ran).
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    pub trials_run: usize,
    pub refined: bool,
}

pub(crate) fn sample_psd(rng: &mut StreamRng, dim: usize, cap: f64) -> PsdMatrix {
    let base = if rng.below(2) == 0 {
        wishart_psd(rng, dim, cap)
    } else {
        log_spectrum_psd(rng, dim, cap)
    };
    let c = rng.uniform_in(-SCALE_SPREAD, SCALE_SPREAD).exp();
    base.scale(c).expect("positive scale")
}

fn spread(rng: &mut StreamRng) -> f64 {
    rng.uniform_in(-SCALE_SPREAD, SCALE_SPREAD).exp()
}

/// Draws `(first, second)` argument tuples. Besides independent draws, a
/// fraction of trials share some arguments between the two points or make
/// the second point a rescaling of the first, which exposes failures along
/// single arguments and along rays.
fn draw_pair(rng: &mut StreamRng, arity: usize, dim: usize, cap: f64) -> (Vec<PsdMatrix>, Vec<PsdMatrix>) {
    let first: Vec<PsdMatrix> = (0..arity).map(|_| sample_psd(rng, dim, cap)).collect();
    let pattern = rng.below(4);
    let second = match pattern {
        // shared subset: a random nonempty proper subset (only for arity > 1)
        1 if arity > 1 => {
            let mask = 1 + rng.below((1 << arity) - 2);
            (0..arity)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        first[i].clone()
                    } else {
                        sample_psd(rng, dim, cap)
                    }
                })
                .collect()
        }
        // common ray
        2 => {
            let c = spread(rng);
            first.iter().map(|x| x.scale(c).expect("positive scale")).collect()
        }
        // independent rescalings of each argument
        3 => first.iter().map(|x| x.scale(spread(rng)).expect("positive scale")).collect(),
        _ => (0..arity).map(|_| sample_psd(rng, dim, cap)).collect(),
    };
    (first, second)
}

fn effective_cap(functional: &Functional, cfg: &ProbeConfig) -> f64 {
    let near = |p: f64, q: f64, s: f64| p.abs().min(q.abs()) < 0.1 || (s * (p + q) - 1.0).abs() < 1e-2;
    let tight = match functional {
        Functional::Trace { params } | Functional::Psi { params } | Functional::PsiDiagonal { params } => {
            near(params.p, params.q, params.s)
        }
        _ => false,
    };
    if tight {
        cfg.cond_cap.min(NEAR_BOUNDARY_COND_CAP)
    } else {
        cfg.cond_cap
    }
}

/// Generic probe. `fixed` overrides the matrices the functional holds fixed;
/// when `None`, functionals that need a unitary draw a Haar unitary per trial.
pub fn probe(functional: &Functional, fixed: Option<&[CMatrix]>, cfg: &ProbeConfig, direction: Direction) -> Result<ConvexityVerdict> {
    cfg.validate()?;
    functional.validate(fixed, cfg.dim)?;
    let arity = functional.arity();
    let dim = functional.arg_dim(cfg.dim);
    let cap = effective_cap(functional, cfg);

    let mut best: Option<Witness> = None;
    for trial in 0..cfg.trials {
        let mut rng = StreamRng::new(cfg.seed, trial as u64);
        let fixed_now: Vec<CMatrix> = match fixed {
            Some(f) => f.to_vec(),
            None => (0..functional.fixed_count()).map(|_| haar_unitary(&mut rng, dim)).collect(),
        };
        let (first, second) = draw_pair(&mut rng, arity, dim, cap);
        let margins = functional
            .margins(&fixed_now, &first, &second, &cfg.lambdas, direction)
            .map_err(|e| e.in_trial(trial))?;
        for (&lambda, &margin) in cfg.lambdas.iter().zip(&margins) {
            if best.as_ref().is_none_or(|b| margin < b.margin) {
                best = Some(Witness {
                    functional: functional.clone(),
                    direction,
                    fixed: fixed_now.clone(),
                    first: first.iter().map(|m| m.matrix().clone()).collect(),
                    second: second.iter().map(|m| m.matrix().clone()).collect(),
                    lambda,
                    margin,
                    trial,
                    refined: false,
                });
            }
        }
    }
    let mut witness = best.expect("at least one trial");
    let mut refined = false;
    if cfg.refine && !(witness.margin < -cfg.tol_rel) {
        witness = refine::coordinate_descent(witness, cap, cfg.tol_rel)?;
        refined = true;
    }
    Ok(ConvexityVerdict {
        violated: witness.margin < -cfg.tol_rel,
        worst_margin: witness.margin,
        witness: Some(witness),
        trials_run: cfg.trials,
        refined,
    })
}

/// Joint convexity (or concavity) of `(A,B) ↦ Φ_{p,q,s}(A,B)`.
pub fn probe_trace_convexity(params: &ParamPoint, cfg: &ProbeConfig, direction: Direction) -> Result<ConvexityVerdict> {
    probe(&Functional::Trace { params: *params }, None, cfg, direction)
}

/// Joint convexity of `Ψ_K`; a Haar-random unitary `K` is drawn per trial
/// unless one is given.
pub fn probe_psi_convexity(
    params: &ParamPoint,
    k: Option<&CMatrix>,
    cfg: &ProbeConfig,
    direction: Direction,
) -> Result<ConvexityVerdict> {
    let fixed = k.map(|k| vec![k.clone()]);
    probe(&Functional::Psi { params: *params }, fixed.as_deref(), cfg, direction)
}

/// Joint operator convexity of `(A,B) ↦ A^{q/2} B^p A^{q/2}`; the margin is
/// the extreme eigenvalue of the gap over the largest operator norm involved.
pub fn probe_operator_convexity(p: f64, q: f64, cfg: &ProbeConfig, direction: Direction) -> Result<ConvexityVerdict> {
    if p == 0.0 || q == 0.0 || !p.is_finite() || !q.is_finite() {
        return Err(Error::param("operator exponents must be finite and nonzero"));
    }
    probe(&Functional::Operator { p, q }, None, cfg, direction)
}

/// Joint convexity of `(A,B,C) ↦ Tr[A^{q/2} B^p A^{q/2} C^r]`.
pub fn probe_triple_convexity(t: &TripleParams, cfg: &ProbeConfig, direction: Direction) -> Result<ConvexityVerdict> {
    probe(&Functional::Triple { params: *t }, None, cfg, direction)
}

/// Concavity test of `A ↦ Tr[(D A^t D)^u]`.
pub fn epstein_probe(d: &PsdMatrix, t: f64, u: f64, cfg: &ProbeConfig) -> Result<ConvexityVerdict> {
    if t == 0.0 || u == 0.0 || !t.is_finite() || !u.is_finite() {
        return Err(Error::param("Epstein exponents must be finite and nonzero"));
    }
    let mut cfg = cfg.clone();
    cfg.dim = d.dim();
    probe(
        &Functional::Epstein { t, u },
        Some(&[d.matrix().clone()]),
        &cfg,
        Direction::Concave,
    )
}
