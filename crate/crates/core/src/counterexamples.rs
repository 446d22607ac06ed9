//! Explicit constructions refuting operator convexity/concavity, and the
//! unitary-dilation limit that reduces `Ψ_K` for contractions `K` to
//! `Ψ_U` for unitaries `U` on a doubled space.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{psi, sandwich_trace_power, ParamPoint};
use crate::linalg::random::{haar_unitary, wishart_psd};
use crate::linalg::{eig_hermitian, mat_pow_matrix, polar_dilation, CMatrix, PsdMatrix, StreamRng, STRICT_FLOOR};
use crate::probes::{Direction, Functional, Witness};

/// Output of one construction. Negative `margin` means the inequality the
/// construction targets is violated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleResult {
    pub construction: String,
    pub margin: f64,
    /// Closed-form value the margin is compared against, when one exists.
    pub expected: Option<f64>,
    /// The `t` (or scale) at which the construction was evaluated.
    pub limit_parameter: Option<f64>,
    pub scalars: BTreeMap<String, f64>,
    /// Matrices and column vectors used, hex-encoded for exact replay.
    pub matrices: BTreeMap<String, CMatrix>,
    /// The construction recast as a probe witness.
    pub witness: Option<Witness>,
}

fn col(entries: &[f64]) -> CMatrix {
    CMatrix::column(&entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
}

fn as_vec(c: &CMatrix) -> Vec<Complex64> {
    c.as_slice().to_vec()
}

/// `⟨w| X^r |v⟩`.
fn pow_pairing(x: &PsdMatrix, r: f64, w: &CMatrix, v: &CMatrix) -> Result<Complex64> {
    Ok(mat_pow_matrix(x, r)?.sandwich_vectors(&as_vec(w), &as_vec(v)))
}

const WITNESS_MIN_T: f64 = 1e-4;

/// `(2^{2r−1} − 1)(2^r − 1)²`: the `t → 0` limit of the paired inequality.
pub fn lemma33_negative_r_limit(r: f64) -> f64 {
    (2f64.powf(2.0 * r - 1.0) - 1.0) * (2f64.powf(r) - 1.0).powi(2)
}

/// Pairs the would-be operator convexity inequality of `X ↦ X^r |v⟩⟨v| X^r`
/// at `X₁ = 2I`, `X₂ = t·diag(2,4)`, `v = (1,1)`, against `|w⟩⟨w|` with
/// `w = (2^r, −1)`:
/// `margin = ½|⟨w|X₁^r|v⟩|² + ½|⟨w|X₂^r|v⟩|² − |⟨w|X^r|v⟩|²`, `X = (X₁+X₂)/2`.
///
/// Pairings are formed before squaring, which keeps the evaluation accurate
/// for small `t` when `r ≥ −1`; for more negative `r`, rounding in the
/// `t^r`-sized pairing grows like `ε·t^r`.
pub fn lemma33_negative_r(r: f64, t: f64) -> Result<CounterexampleResult> {
    if !(r.is_finite() && r != 0.0 && r < 0.5) {
        return Err(Error::param(format!("r must lie in (-inf,0) or (0,1/2), got {r}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("t must be positive, got {t}")));
    }
    let x1 = PsdMatrix::from_real_diagonal(&[2.0, 2.0])?;
    let x2 = PsdMatrix::from_real_diagonal(&[2.0 * t, 4.0 * t])?;
    let x = x1.convex_combination(&x2, 0.5)?;
    let v = col(&[1.0, 1.0]);
    let w = col(&[2f64.powf(r), -1.0]);
    let a1 = pow_pairing(&x1, r, &w, &v)?.norm_sqr();
    let a2 = pow_pairing(&x2, r, &w, &v)?.norm_sqr();
    let am = pow_pairing(&x, r, &w, &v)?.norm_sqr();
    let margin = 0.5 * a1 + 0.5 * a2 - am;

    // The operator-form margin is normalized by ‖X₂^r Y X₂^r‖ ~ t^{2r}, so the
    // witness is taken at a moderate t where the gap is above rounding.
    let witness_t = t.max(WITNESS_MIN_T);
    let y = CMatrix::outer(&as_vec(&v));
    let witness = Witness {
        functional: Functional::Operator { p: 1.0, q: 2.0 * r },
        direction: Direction::Convex,
        fixed: vec![],
        first: vec![x1.matrix().clone(), y.clone()],
        second: vec![PsdMatrix::from_real_diagonal(&[2.0 * witness_t, 4.0 * witness_t])?.matrix().clone(), y],
        lambda: 0.5,
        margin: f64::NAN,
        trial: 0,
        refined: false,
    };
    let witness = with_margin(witness)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("r".into(), r);
    scalars.insert("t".into(), t);
    scalars.insert("witness_t".into(), witness_t);
    scalars.insert("rhs".into(), 0.5 * a1 + 0.5 * a2);
    scalars.insert("lhs".into(), am);
    let mut matrices = BTreeMap::new();
    matrices.insert("X1".into(), x1.matrix().clone());
    matrices.insert("X2".into(), x2.matrix().clone());
    matrices.insert("v".into(), v);
    matrices.insert("w".into(), w);
    Ok(CounterexampleResult {
        construction: "lemma33-neg".into(),
        margin,
        expected: Some(lemma33_negative_r_limit(r)),
        limit_parameter: Some(t),
        scalars,
        matrices,
        witness: Some(witness),
    })
}

fn with_margin(mut w: Witness) -> Result<Witness> {
    w.margin = w.reevaluate()?;
    Ok(w)
}

/// `(λ₊^{r−1} − λ₋^{r−1})/√5` with `λ± = (3 ± √5)/2`.
pub fn lemma33_mid_closed_form(r: f64) -> f64 {
    let s5 = 5f64.sqrt();
    let (lp, lm) = ((3.0 + s5) / 2.0, (3.0 - s5) / 2.0);
    (lp.powf(r - 1.0) - lm.powf(r - 1.0)) / s5
}

/// `X₁ = [[2,2],[2,2]]`, `X₂ = [[2,0],[0,0]]`, `v = (0,1)`, `w = (1,−1)`:
/// both endpoint pairings vanish while `⟨w|X^r|v⟩ ≠ 0` at the midpoint, so
/// `X ↦ |⟨w|X^r|v⟩|²` is not convex.
pub fn lemma33_mid_r(r: f64) -> Result<CounterexampleResult> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param(format!("r must lie in (0,1), got {r}")));
    }
    let x1 = PsdMatrix::from_real_rows(&[&[2.0, 2.0], &[2.0, 2.0]])?;
    let x2 = PsdMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]])?;
    let x = x1.convex_combination(&x2, 0.5)?;
    let v = col(&[0.0, 1.0]);
    let w = col(&[1.0, -1.0]);
    let eig = eig_hermitian(x.matrix())?;
    let direct = pow_pairing(&x, r, &w, &v)?;
    let closed = lemma33_mid_closed_form(r);
    let e1 = pow_pairing(&x1, r, &w, &v)?;
    let e2 = pow_pairing(&x2, r, &w, &v)?;
    let margin = 0.5 * e1.norm_sqr() + 0.5 * e2.norm_sqr() - direct.norm_sqr();

    let y = CMatrix::outer(&as_vec(&v));
    let witness = with_margin(Witness {
        functional: Functional::Operator { p: 1.0, q: 2.0 * r },
        direction: Direction::Convex,
        fixed: vec![],
        first: vec![x1.matrix().clone(), y.clone()],
        second: vec![x2.matrix().clone(), y],
        lambda: 0.5,
        margin: f64::NAN,
        trial: 0,
        refined: false,
    })?;

    let mut scalars = BTreeMap::new();
    scalars.insert("r".into(), r);
    scalars.insert("lambda_minus".into(), eig.eigenvalues[0]);
    scalars.insert("lambda_plus".into(), eig.eigenvalues[1]);
    scalars.insert("pairing_direct".into(), direct.re);
    scalars.insert("pairing_closed_form".into(), closed);
    scalars.insert("pairing_x1".into(), e1.norm());
    scalars.insert("pairing_x2".into(), e2.norm());
    let mut matrices = BTreeMap::new();
    matrices.insert("X1".into(), x1.matrix().clone());
    matrices.insert("X2".into(), x2.matrix().clone());
    matrices.insert("X".into(), x.matrix().clone());
    matrices.insert("v".into(), v);
    matrices.insert("w".into(), w);
    Ok(CounterexampleResult {
        construction: "lemma33-mid".into(),
        margin,
        expected: Some(-closed * closed),
        limit_parameter: None,
        scalars,
        matrices,
        witness: Some(witness),
    })
}

pub const BISECTION_STEPS: usize = 60;
pub const BISECTION_BRACKET: (f64, f64) = (1e-6, 1e6);

/// Concavity of `(A,B) ↦ A^{q/2}B^pA^{q/2}` with `A|v⟩ = 0` would force
/// `⟨v|B^{q/2}A^pB^{q/2}|v⟩ ≤ 2^{1−p−q}⟨v|B|v⟩^{p+q}`. The left side scales
/// like `c^q` and the right like `c^{p+q}` under `B → cB`, so the inequality
/// fails for all small enough `c`.
///
/// `margin` is right minus left at `B → scale·B`; `threshold` is the scale
/// below which it is negative, located by bisection in `log c` and also
/// reported in closed form.
pub fn concavity_homogeneity_refutation(p: f64, q: f64, scale: f64, dim: usize, seed: u64) -> Result<CounterexampleResult> {
    if !(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0 && p + q <= 1.0 + 1e-12) {
        return Err(Error::param(format!("need p, q in (0,1] with p+q <= 1, got ({p}, {q})")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param(format!("scale must be positive, got {scale}")));
    }
    if dim < 2 {
        return Err(Error::param("the construction needs dim >= 2"));
    }
    let mut rng = StreamRng::new(seed, 0);
    // A = U diag(0, a_2, ..., a_n) U*, with v = U e_1 spanning its kernel
    let u = haar_unitary(&mut rng, dim);
    let tail = wishart_psd(&mut rng, dim - 1, 1e2);
    let mut diag = vec![0.0];
    diag.extend_from_slice(&tail.spectral().eigenvalues);
    let a = PsdMatrix::from_matrix(&(&(&u * &CMatrix::from_real_diagonal(&diag)) * &u.adjoint()))?;
    let v: Vec<Complex64> = (0..dim).map(|i| u[(i, 0)]).collect();
    let b = wishart_psd(&mut rng, dim, 1e2);

    let ap = mat_pow_matrix(&a, p)?;
    let bq = mat_pow_matrix(&b, q / 2.0)?;
    let left_unit = (&(&bq * &ap) * &bq).sandwich_vectors(&v, &v).re;
    let bvv = b.matrix().sandwich_vectors(&v, &v).re;
    let right_unit = 2f64.powf(1.0 - p - q) * bvv.powf(p + q);
    let margin_at = |c: f64| right_unit * c.powf(p + q) - left_unit * c.powf(q);

    // closed form: margin(c) < 0  ⇔  c < (left/right)^{1/p}
    let closed = (left_unit / right_unit).powf(1.0 / p);
    let (mut lo, mut hi) = (BISECTION_BRACKET.0.ln(), BISECTION_BRACKET.1.ln());
    let bracketed = margin_at(lo.exp()) < 0.0 && margin_at(hi.exp()) > 0.0;
    if bracketed {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if margin_at(mid.exp()) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let threshold = bracketed.then(|| (0.5 * (lo + hi)).exp());

    // operator-concavity witness: (A, cB) and (cB, A) at λ = 1/2, c below threshold
    let witness_scale = threshold.unwrap_or(closed) * 0.25;
    let cb = b.scale(witness_scale)?;
    let witness = with_margin(Witness {
        functional: Functional::Operator { p, q },
        direction: Direction::Concave,
        fixed: vec![],
        first: vec![a.matrix().clone(), cb.matrix().clone()],
        second: vec![cb.matrix().clone(), a.matrix().clone()],
        lambda: 0.5,
        margin: f64::NAN,
        trial: 0,
        refined: false,
    })?;

    let mut scalars = BTreeMap::new();
    scalars.insert("p".into(), p);
    scalars.insert("q".into(), q);
    scalars.insert("scale".into(), scale);
    scalars.insert("lhs".into(), left_unit * scale.powf(q));
    scalars.insert("rhs".into(), right_unit * scale.powf(p + q));
    scalars.insert("threshold_closed_form".into(), closed);
    if let Some(t) = threshold {
        scalars.insert("threshold".into(), t);
    }
    scalars.insert("witness_scale".into(), witness_scale);
    let mut matrices = BTreeMap::new();
    matrices.insert("A".into(), a.matrix().clone());
    matrices.insert("B".into(), b.matrix().clone());
    matrices.insert("v".into(), CMatrix::column(&v));
    Ok(CounterexampleResult {
        construction: "homogeneity".into(),
        margin: margin_at(scale),
        expected: None,
        limit_parameter: Some(scale),
        scalars,
        matrices,
        witness: Some(witness),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationStep {
    pub t: f64,
    pub value: f64,
    pub gap_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub params: ParamPoint,
    /// `Ψ_K(A,B)` evaluated directly.
    pub direct: f64,
    pub steps: Vec<DilationStep>,
    pub final_gap_rel: f64,
    /// `|gap|` never increased along the schedule (beyond rounding).
    pub monotone: bool,
    /// Regularization standing in for the zero block of `ℬ`.
    pub epsilon: f64,
    pub unitary_residual: f64,
    /// `‖K‖₂` within `1e-3` of 1, where convergence can be slow.
    pub near_unit_norm: bool,
    pub matrices: BTreeMap<String, CMatrix>,
}

/// Decades `t = 10^{±k}` until `t^{−|q|·min(1,s)}` reaches `1e-12`, the
/// expected size of the neglected blocks.
pub fn default_schedule(params: &ParamPoint) -> Vec<f64> {
    let rate = params.q.abs() * params.s.min(1.0);
    let decades = ((12.0 / rate).ceil() as i32).clamp(4, 300);
    let sign = if params.q < 0.0 { 1 } else { -1 };
    (1..=decades).map(|k| 10f64.powi(sign * k)).collect()
}

/// Evaluates `Ψ_𝒰(𝒜_t, ℬ)` with `𝒰` the polar dilation of `K`,
/// `𝒜_t = diag(A, tI)`, `ℬ = diag(B, εI)`, `ε = 1e-10·‖B‖₂`, along the
/// schedule (`t → ∞` for `q < 0`, `t → 0` for `q > 0`), and compares with
/// `Ψ_K(A,B)`. Block powers are formed blockwise, so `t^{q/2}` and `ε^p`
/// enter exactly.
pub fn dilation_limit(k: &CMatrix, a: &PsdMatrix, b: &PsdMatrix, params: &ParamPoint, schedule: Option<&[f64]>) -> Result<DilationReport> {
    let n = a.dim();
    if b.dim() != n || k.rows() != n || k.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if b.dim() != n { b.dim() } else { k.rows() },
        });
    }
    if !(params.p > 0.0) {
        return Err(Error::param("the regularized zero block needs p > 0"));
    }
    let dil = polar_dilation(k)?;
    if dil.rescaled_by > 1.0 + 1e-12 {
        return Err(Error::param(format!("K must be a contraction, ‖K‖₂ = {}", dil.rescaled_by)));
    }
    let owned;
    let schedule = match schedule {
        Some(s) => s,
        None => {
            owned = default_schedule(params);
            &owned
        }
    };
    if schedule.is_empty() || schedule.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::param("schedule must be a nonempty list of positive values"));
    }
    let increasing = schedule.windows(2).all(|w| w[1] > w[0]);
    let decreasing = schedule.windows(2).all(|w| w[1] < w[0]);
    if (params.q < 0.0 && !increasing) || (params.q > 0.0 && !decreasing) {
        return Err(Error::param(if params.q < 0.0 {
            "for q < 0 the schedule must increase (t → ∞)"
        } else {
            "for q > 0 the schedule must decrease (t → 0)"
        }));
    }

    let direct = psi(k, a, b, params)?;
    let epsilon = STRICT_FLOOR * b.norm();
    // square root of diag(B^p, ε^p I)
    let bp = mat_pow_matrix(b, params.p / 2.0)?.block_diag(&CMatrix::identity(n).scale(epsilon.powf(params.p / 2.0)));
    let aq = mat_pow_matrix(a, params.q / 2.0)?;
    let mut steps = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let left = aq.block_diag(&CMatrix::identity(n).scale(t.powf(params.q / 2.0)));
        let value = sandwich_trace_power(&left, Some(&dil.unitary), &bp, params.s)?;
        steps.push(DilationStep {
            t,
            value,
            gap_rel: (value - direct).abs() / direct.abs().max(f64::MIN_POSITIVE),
        });
    }
    let floor = 1e-13;
    let monotone = steps.windows(2).all(|w| w[1].gap_rel <= w[0].gap_rel + floor);
    let mut matrices = BTreeMap::new();
    matrices.insert("K".into(), k.clone());
    matrices.insert("A".into(), a.matrix().clone());
    matrices.insert("B".into(), b.matrix().clone());
    matrices.insert("U".into(), dil.unitary.clone());
    Ok(DilationReport {
        params: *params,
        direct,
        final_gap_rel: steps.last().map(|s| s.gap_rel).unwrap_or(f64::NAN),
        steps,
        monotone,
        epsilon,
        unitary_residual: dil.unitary.unitarity_residual(),
        near_unit_norm: polar_norm(k)? > 1.0 - 1e-3,
        matrices,
    })
}

fn polar_norm(k: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(&(&k.adjoint() * k))?.max_eigenvalue().max(0.0).sqrt())
}
