//! Kraus-form quantum channels and data-processing checks for the α–z
//! Rényi divergences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::renyi_alpha_z;
use crate::linalg::random::{haar_isometry, haar_unitary};
use crate::linalg::{CMatrix, PsdMatrix, StreamRng};
use crate::probes::sample_psd;
use crate::report::{csv_field, csv_float, csv_header, to_json};

/// Allowed Frobenius residual of `Σ K_j* K_j − I`.
pub const TP_TOL: f64 = 1e-10;
/// Weight of `I/d` mixed into channel outputs before evaluating a divergence.
pub const OUTPUT_MIX: f64 = 1e-9;
/// `α` within this distance of 1 is rejected.
pub const ALPHA_GUARD: f64 = 1e-3;
const TRACE_ONE_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map `ρ ↦ Σ K_j ρ K_j*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty)?;
        let (rows, cols) = (first.rows(), first.cols());
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if let Some(k) = kraus.iter().find(|k| k.rows() != rows || k.cols() != cols) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: k.rows(),
            });
        }
        let ch = QuantumChannel { kraus };
        let res = ch.trace_preservation_residual();
        if !(res <= TP_TOL) {
            return Err(Error::param(format!("Kraus family is not trace preserving (residual {res:e})")));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMatrix::identity(dim)])
    }

    /// `ρ ↦ UρU*`.
    pub fn unitary(u: &CMatrix) -> Result<Self> {
        Self::new(vec![u.clone()])
    }

    /// `ρ ↦ Tr ρ · I/dim_out`, with Kraus operators `|i⟩⟨j|/√dim_out`.
    pub fn fully_depolarizing(dim_in: usize, dim_out: usize) -> Result<Self> {
        let w = (dim_out as f64).sqrt().recip();
        let mut kraus = Vec::with_capacity(dim_in * dim_out);
        for i in 0..dim_out {
            for j in 0..dim_in {
                kraus.push(CMatrix::from_fn(dim_out, dim_in, |a, b| {
                    if a == i && b == j {
                        num_complex::Complex64::new(w, 0.0)
                    } else {
                        num_complex::Complex64::new(0.0, 0.0)
                    }
                }));
            }
        }
        Self::new(kraus)
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].rows()
    }

    /// `‖Σ K_j* K_j − I‖_F`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let n = self.kraus[0].cols();
        let mut sum = CMatrix::zeros(n, n);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        (&sum - &CMatrix::identity(n)).frobenius_norm()
    }

    pub fn apply(&self, rho: &PsdMatrix) -> Result<PsdMatrix> {
        if rho.dim() != self.dim_in() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in(),
                got: rho.dim(),
            });
        }
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out = &out + &(&(k * rho.matrix()) * &k.adjoint());
        }
        PsdMatrix::from_matrix(&out)
    }
}

/// Channel from a Haar isometry `V: C^{dim_in} → C^{dim_out} ⊗ C^{env_dim}`,
/// with `K_j` the `j`-th `dim_out × dim_in` block of `V`.
pub fn random_channel(dim_in: usize, dim_out: usize, env_dim: usize, seed: u64) -> Result<QuantumChannel> {
    random_channel_from(&mut StreamRng::new(seed, 0), dim_in, dim_out, env_dim)
}

fn random_channel_from(rng: &mut StreamRng, dim_in: usize, dim_out: usize, env_dim: usize) -> Result<QuantumChannel> {
    if dim_in == 0 || dim_out == 0 || env_dim == 0 {
        return Err(Error::param("channel dimensions must be at least 1"));
    }
    if dim_out * env_dim < dim_in {
        return Err(Error::param(format!(
            "no isometry from dimension {dim_in} into {dim_out}·{env_dim}"
        )));
    }
    let v = haar_isometry(rng, dim_out * env_dim, dim_in);
    QuantumChannel::new((0..env_dim).map(|j| v.block(j * dim_out, 0, dim_out, dim_in)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiResult {
    pub alpha: f64,
    pub z: f64,
    pub d_before: f64,
    pub d_after: f64,
    /// `d_before − d_after`; negative means the divergence increased.
    pub margin: f64,
}

impl DpiResult {
    pub fn tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.d_before.abs())
    }

    pub fn violated(&self) -> bool {
        self.margin < -self.tolerance()
    }
}

fn check_trace_one(m: &PsdMatrix, name: &str) -> Result<()> {
    let tr = m.matrix().trace().re;
    if (tr - 1.0).abs() > TRACE_ONE_TOL {
        return Err(Error::param(format!("{name} must have unit trace, got {tr}")));
    }
    Ok(())
}

/// `(1−ε)ρ + ε·I/d`.
fn mix(m: &PsdMatrix) -> Result<PsdMatrix> {
    let d = m.dim();
    let mixed = m.matrix().convex_combination(&CMatrix::identity(d).scale(1.0 / d as f64), 1.0 - OUTPUT_MIX)?;
    PsdMatrix::from_matrix(&mixed)
}

/// Mixes both outputs identically, and only if one of them is not strictly
/// positive, so channels with full-rank outputs are evaluated unperturbed.
fn regularize_pair(r: PsdMatrix, s: PsdMatrix) -> Result<(PsdMatrix, PsdMatrix)> {
    if r.is_strictly_positive() && s.is_strictly_positive() {
        Ok((r, s))
    } else {
        Ok((mix(&r)?, mix(&s)?))
    }
}

/// `D_{α,z}(ρ‖σ) − D_{α,z}(ℰ(ρ)‖ℰ(σ))` for unit-trace inputs, any `α` away
/// from 1 and `z > 0`. Outputs that are not strictly positive are mixed with
/// `ε·I/d` (both of them, identically) first.
pub fn dpi_check_alpha_z(rho: &PsdMatrix, sigma: &PsdMatrix, alpha: f64, z: f64, ch: &QuantumChannel) -> Result<DpiResult> {
    if (alpha - 1.0).abs() < ALPHA_GUARD {
        return Err(Error::param(format!("alpha must satisfy |alpha-1| >= {ALPHA_GUARD}, got {alpha}")));
    }
    check_trace_one(rho, "rho")?;
    check_trace_one(sigma, "sigma")?;
    let d_before = renyi_alpha_z(rho, sigma, alpha, z)?;
    let (r, s) = regularize_pair(ch.apply(rho)?, ch.apply(sigma)?)?;
    let d_after = renyi_alpha_z(&r, &s, alpha, z)?;
    let margin = d_before - d_after;
    if !margin.is_finite() {
        return Err(Error::NonFinite(format!("DPI margin at alpha={alpha}, z={z}")));
    }
    Ok(DpiResult {
        alpha,
        z,
        d_before,
        d_after,
        margin,
    })
}

/// Data processing on the line `z = α/2`, `α ∈ (1, 2]`.
pub fn dpi_check(rho: &PsdMatrix, sigma: &PsdMatrix, alpha: f64, ch: &QuantumChannel) -> Result<DpiResult> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::param(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    dpi_check_alpha_z(rho, sigma, alpha, alpha / 2.0, ch)
}

const REGION_TOL: f64 = 1e-12;

/// Name of a known monotone region containing `(α, z)`, if any.
pub fn known_monotone_region(alpha: f64, z: f64) -> Option<&'static str> {
    let eq = |a: f64, b: f64| (a - b).abs() <= REGION_TOL * (1.0 + a.abs().max(b.abs()));
    let le = |a: f64, b: f64| a <= b + REGION_TOL * (1.0 + a.abs().max(b.abs()));
    if alpha > 1.0 && le(alpha, 2.0) && eq(z, alpha / 2.0) {
        Some("alpha-equals-2z")
    } else if alpha > 0.0 && le(alpha, 1.0) && le(alpha.max(1.0 - alpha), z) {
        Some("alpha-below-one")
    } else if le(1.0, alpha) && le(alpha, 2.0) && eq(z, 1.0) {
        Some("z-equals-one")
    } else if le(1.0, alpha) && eq(z, alpha) {
        Some("z-equals-alpha")
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiConfig {
    pub trials: usize,
    /// Inclusive range of input/output dimensions.
    pub dims: (usize, usize),
    pub max_env: usize,
    pub seed: u64,
    pub cond_cap: f64,
}

impl Default for DpiConfig {
    fn default() -> Self {
        DpiConfig {
            trials: 1000,
            dims: (2, 4),
            max_env: 4,
            seed: 0,
            cond_cap: 1e3,
        }
    }
}

impl DpiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.dims.0 == 0 || self.dims.0 > self.dims.1 {
            return Err(Error::param(format!("invalid dimension range {:?}", self.dims)));
        }
        if self.max_env == 0 {
            return Err(Error::param("max_env must be at least 1"));
        }
        if !(self.cond_cap >= 1.0) {
            return Err(Error::param("cond_cap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiRow {
    pub alpha: f64,
    pub z: f64,
    pub known_region: Option<String>,
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: Option<f64>,
    /// Largest `|margin|` seen under a random unitary channel.
    pub unitary_max_abs_margin: Option<f64>,
    pub worst: Option<DpiResult>,
    pub error: Option<String>,
}

impl DpiRow {
    pub fn forbidden_violation(&self) -> bool {
        self.known_region.is_some() && self.violations > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    pub config: DpiConfig,
    pub rows: Vec<DpiRow>,
}

pub const DPI_CSV_COLUMNS: [&str; 8] = [
    "alpha",
    "z",
    "trials",
    "violations",
    "worst_margin",
    "known_region",
    "unitary_max_abs_margin",
    "error",
];

impl DpiReport {
    pub fn has_forbidden_violation(&self) -> bool {
        self.rows.iter().any(DpiRow::forbidden_violation)
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_header("dpi-scan", &DPI_CSV_COLUMNS);
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
            let fields = [
                csv_float(r.alpha),
                csv_float(r.z),
                r.trials.to_string(),
                r.violations.to_string(),
                opt(r.worst_margin),
                r.known_region.clone().unwrap_or_default(),
                opt(r.unitary_max_abs_margin),
                csv_field(r.error.as_deref().unwrap_or("")),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

fn density(rng: &mut StreamRng, dim: usize, cap: f64) -> Result<PsdMatrix> {
    let m = sample_psd(rng, dim, cap);
    let tr = m.matrix().trace().re;
    m.scale(1.0 / tr)
}

fn scan_point(index: usize, alpha: f64, z: f64, cfg: &DpiConfig) -> DpiRow {
    let mut row = DpiRow {
        alpha,
        z,
        known_region: known_monotone_region(alpha, z).map(str::to_owned),
        trials: 0,
        violations: 0,
        worst_margin: None,
        unitary_max_abs_margin: None,
        worst: None,
        error: None,
    };
    let run = |row: &mut DpiRow| -> Result<()> {
        let (lo, hi) = cfg.dims;
        for trial in 0..cfg.trials {
            let mut rng = StreamRng::new(cfg.seed, ((index as u64) << 32) | trial as u64);
            let d_in = lo + rng.below(hi - lo + 1);
            let d_out = lo + rng.below(hi - lo + 1);
            let env = (1 + rng.below(cfg.max_env)).max(d_in.div_ceil(d_out));
            let rho = density(&mut rng, d_in, cfg.cond_cap)?;
            let sigma = density(&mut rng, d_in, cfg.cond_cap)?;
            let ch = random_channel_from(&mut rng, d_in, d_out, env)?;
            let res = dpi_check_alpha_z(&rho, &sigma, alpha, z, &ch).map_err(|e| e.in_trial(trial))?;
            row.trials += 1;
            if res.violated() {
                row.violations += 1;
            }
            if row.worst.is_none_or(|w| res.margin < w.margin) {
                row.worst = Some(res);
                row.worst_margin = Some(res.margin);
            }
            let u = QuantumChannel::unitary(&haar_unitary(&mut rng, d_in))?;
            let m = dpi_check_alpha_z(&rho, &sigma, alpha, z, &u).map_err(|e| e.in_trial(trial))?.margin.abs();
            row.unitary_max_abs_margin = Some(row.unitary_max_abs_margin.map_or(m, |x| x.max(m)));
        }
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

/// Random search for data-processing violations at every `(α, z)` of the
/// grid (α fastest-varying last). Rows carry the known monotone region, if
/// any; outside those regions they are exploratory.
pub fn dpi_scan(alphas: &[f64], zs: &[f64], cfg: &DpiConfig) -> Result<DpiReport> {
    cfg.validate()?;
    if let Some(x) = alphas.iter().chain(zs).find(|x| !x.is_finite()) {
        return Err(Error::param(format!("grid values must be finite, got {x}")));
    }
    let points: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| zs.iter().map(move |&z| (a, z))).collect();
    let rows = points
        .into_par_iter()
        .enumerate()
        .map(|(i, (a, z))| scan_point(i, a, z, cfg))
        .collect();
    Ok(DpiReport {
        config: cfg.clone(),
        rows,
    })
}
