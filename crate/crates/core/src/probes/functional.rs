use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{psi, sandwich, sandwich_trace_power, triple_trace, ParamPoint, TripleParams};
use crate::linalg::{eig_hermitian, mat_pow_matrix, CMatrix, PsdMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Convex,
    Concave,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Convex => "convex",
            Direction::Concave => "concave",
        }
    }
}

/// The maps the probes know how to test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// `(A,B) ↦ Φ_{p,q,s}(A,B)`.
    Trace { params: ParamPoint },
    /// `(A,B) ↦ Ψ_{K,p,q,s}(A,B)`, `K` fixed.
    Psi { params: ParamPoint },
    /// `A ↦ Ψ_{K,p,q,s}(A,A)`, `K` fixed.
    PsiDiagonal { params: ParamPoint },
    /// `(A,B) ↦ A^{q/2} B^p A^{q/2}`, compared in the PSD order.
    Operator { p: f64, q: f64 },
    /// `(A,B,C) ↦ Tr[A^{q/2} B^p A^{q/2} C^r]`.
    Triple { params: TripleParams },
    /// `A ↦ Tr[(D A^t D)^u]`, `D` fixed.
    Epstein { t: f64, u: f64 },
}

enum Value {
    Scalar(f64),
    Matrix(CMatrix),
}

impl Functional {
    pub fn arity(&self) -> usize {
        match self {
            Functional::Trace { .. } | Functional::Psi { .. } | Functional::Operator { .. } => 2,
            Functional::Triple { .. } => 3,
            Functional::PsiDiagonal { .. } | Functional::Epstein { .. } => 1,
        }
    }

    /// Number of fixed matrices (`K` or `D`).
    pub fn fixed_count(&self) -> usize {
        match self {
            Functional::Psi { .. } | Functional::PsiDiagonal { .. } | Functional::Epstein { .. } => 1,
            _ => 0,
        }
    }

    pub(crate) fn arg_dim(&self, dim: usize) -> usize {
        dim
    }

    pub fn name(&self) -> &'static str {
        match self {
            Functional::Trace { .. } => "trace",
            Functional::Psi { .. } => "psi",
            Functional::PsiDiagonal { .. } => "psi_diagonal",
            Functional::Operator { .. } => "operator",
            Functional::Triple { .. } => "triple",
            Functional::Epstein { .. } => "epstein",
        }
    }

    pub(crate) fn validate(&self, fixed: Option<&[CMatrix]>, dim: usize) -> Result<()> {
        if let Some(f) = fixed {
            if f.len() != self.fixed_count() {
                return Err(Error::param(format!(
                    "{} expects {} fixed matrices, got {}",
                    self.name(),
                    self.fixed_count(),
                    f.len()
                )));
            }
            if let Some(m) = f.iter().find(|m| m.rows() != dim || m.cols() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.rows(),
                });
            }
        } else if matches!(self, Functional::Epstein { .. }) {
            return Err(Error::param("the Epstein map needs its matrix D"));
        }
        Ok(())
    }

    fn eval(&self, fixed: &[CMatrix], args: &[PsdMatrix]) -> Result<Value> {
        Ok(match self {
            Functional::Trace { params } => Value::Scalar(crate::functionals::phi(&args[0], &args[1], params)?),
            Functional::Psi { params } => Value::Scalar(psi(&fixed[0], &args[0], &args[1], params)?),
            Functional::PsiDiagonal { params } => Value::Scalar(psi(&fixed[0], &args[0], &args[0], params)?),
            Functional::Operator { p, q } => Value::Matrix(sandwich(&args[0], &args[1], *p, *q)?.into_matrix()),
            Functional::Triple { params } => Value::Scalar(triple_trace(&args[0], &args[1], &args[2], params)?),
            Functional::Epstein { t, u } => {
                let half = mat_pow_matrix(&args[0], *t / 2.0)?;
                Value::Scalar(sandwich_trace_power(&fixed[0], None, &half, *u)?)
            }
        })
    }

    /// Normalized margins for each `λ`; negative means the tested property fails.
    pub(crate) fn margins(
        &self,
        fixed: &[CMatrix],
        first: &[PsdMatrix],
        second: &[PsdMatrix],
        lambdas: &[f64],
        direction: Direction,
    ) -> Result<Vec<f64>> {
        let f1 = self.eval(fixed, first)?;
        let f2 = self.eval(fixed, second)?;
        let sign = match direction {
            Direction::Convex => 1.0,
            Direction::Concave => -1.0,
        };
        lambdas
            .iter()
            .map(|&lambda| {
                let mid: Vec<PsdMatrix> = first
                    .iter()
                    .zip(second)
                    .map(|(x, y)| x.convex_combination(y, lambda))
                    .collect::<Result<_>>()?;
                let fm = self.eval(fixed, &mid)?;
                gap_margin(&f1, &f2, &fm, lambda, sign)
            })
            .collect()
    }

    pub(crate) fn margin(
        &self,
        fixed: &[CMatrix],
        first: &[PsdMatrix],
        second: &[PsdMatrix],
        lambda: f64,
        direction: Direction,
    ) -> Result<f64> {
        Ok(self.margins(fixed, first, second, &[lambda], direction)?[0])
    }
}

fn gap_margin(f1: &Value, f2: &Value, fm: &Value, lambda: f64, sign: f64) -> Result<f64> {
    match (f1, f2, fm) {
        (Value::Scalar(a), Value::Scalar(b), Value::Scalar(m)) => {
            let gap = lambda * a + (1.0 - lambda) * b - m;
            let scale = 1f64.max(a.abs()).max(b.abs()).max(m.abs());
            let margin = sign * gap / scale;
            if !margin.is_finite() {
                return Err(Error::NonFinite("convexity margin".into()));
            }
            Ok(margin)
        }
        (Value::Matrix(a), Value::Matrix(b), Value::Matrix(m)) => {
            let gap = a.convex_combination(b, lambda)?.try_sub(m)?.scale(sign);
            let d = eig_hermitian(&gap)?;
            let norms = [a, b, m]
                .iter()
                .map(|x| eig_hermitian(x).map(|e| e.spectral_norm()))
                .collect::<Result<Vec<_>>>()?;
            let scale = norms.into_iter().fold(f64::MIN_POSITIVE, f64::max);
            Ok(d.min_eigenvalue() / scale)
        }
        _ => unreachable!("a functional always returns the same kind of value"),
    }
}
