//! Grid scans over `(p, q, s)` combining region verdicts with probe outcomes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{probe_trace_convexity, ConvexityVerdict, Direction, ProbeConfig};
use crate::error::Result;
use crate::functionals::ParamPoint;
use crate::regions::{classify_concavity, classify_convexity, Exponent, ExponentTriple, RegionStatus, RegionVerdict};
use crate::report::{csv_field, csv_header, csv_opt_float, to_json};

/// Cartesian grid; points are enumerated with `s` fastest, then `q`, then `p`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridSpec {
    pub p: Vec<Exponent>,
    pub q: Vec<Exponent>,
    pub s: Vec<Exponent>,
}

impl GridSpec {
    pub fn new(p: Vec<Exponent>, q: Vec<Exponent>, s: Vec<Exponent>) -> Self {
        GridSpec { p, q, s }
    }

    pub fn len(&self) -> usize {
        self.p.len() * self.q.len() * self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(Exponent, Exponent, Exponent)> {
        let mut out = Vec::with_capacity(self.len());
        for &p in &self.p {
            for &q in &self.q {
                for &s in &self.s {
                    out.push((p, q, s));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    /// Exponents exactly as entered (rationals stay rational).
    pub p: String,
    pub q: String,
    pub s: String,
    pub point: Option<ParamPoint>,
    pub convexity: Option<RegionVerdict>,
    pub concavity: Option<RegionVerdict>,
    pub convex_probe: Option<ConvexityVerdict>,
    pub concave_probe: Option<ConvexityVerdict>,
    pub error: Option<String>,
}

impl ReportRow {
    /// A proven property was contradicted by a probe.
    pub fn contradicts_proven(&self) -> bool {
        let hit = |v: &Option<RegionVerdict>, probe: &Option<ConvexityVerdict>| {
            matches!((v, probe), (Some(v), Some(p)) if v.status.is_proven_positive() && p.violated)
        };
        hit(&self.convexity, &self.convex_probe) || hit(&self.concavity, &self.concave_probe)
    }

    fn witness_ids(&self) -> String {
        let mut ids = Vec::new();
        if self.convex_probe.as_ref().is_some_and(|p| p.violated) {
            ids.push(format!("{}:convex", self.index));
        }
        if self.concave_probe.as_ref().is_some_and(|p| p.violated) {
            ids.push(format!("{}:concave", self.index));
        }
        ids.join(";")
    }
}

/// Counts over (point, side) pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub points: usize,
    pub errors: usize,
    /// Proven property with no violation, or proven failure with a witness.
    pub agreements: usize,
    /// Proven property with a violation: should never happen.
    pub violations: usize,
    /// Proven failure for which no witness was found within budget.
    pub inconclusive: usize,
    /// Sides whose status is open.
    pub exploratory: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub config: ProbeConfig,
    pub rows: Vec<ReportRow>,
    pub summary: ScanSummary,
}

pub const CSV_COLUMNS: [&str; 12] = [
    "index",
    "p",
    "q",
    "s",
    "status_convex",
    "status_concave",
    "margin_convex",
    "margin_concave",
    "violated_convex",
    "violated_concave",
    "witness_id",
    "error",
];

impl RegionReport {
    pub fn has_proven_violation(&self) -> bool {
        self.summary.violations > 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_header("region-scan", &CSV_COLUMNS);
        for r in &self.rows {
            let status = |v: &Option<RegionVerdict>| v.as_ref().map(|v| v.status.as_str()).unwrap_or("");
            let margin = |p: &Option<ConvexityVerdict>| csv_opt_float(p.as_ref().map(|p| p.worst_margin));
            let violated = |p: &Option<ConvexityVerdict>| p.as_ref().map(|p| p.violated.to_string()).unwrap_or_default();
            let fields = [
                r.index.to_string(),
                csv_field(&r.p),
                csv_field(&r.q),
                csv_field(&r.s),
                status(&r.convexity).to_string(),
                status(&r.concavity).to_string(),
                margin(&r.convex_probe),
                margin(&r.concave_probe),
                violated(&r.convex_probe),
                violated(&r.concave_probe),
                r.witness_ids(),
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

/// Per-point seed: distinct, reproducible streams for every grid index.
pub(crate) fn point_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn side(point: &ParamPoint, cfg: &ProbeConfig, verdict: &RegionVerdict, direction: Direction) -> Result<ConvexityVerdict> {
    let mut cfg = cfg.clone();
    cfg.refine = verdict.status.is_proven_negative();
    probe_trace_convexity(point, &cfg, direction)
}

fn scan_point(index: usize, (p, q, s): (Exponent, Exponent, Exponent), cfg: &ProbeConfig) -> ReportRow {
    let mut row = ReportRow {
        index,
        p: p.to_string(),
        q: q.to_string(),
        s: s.to_string(),
        point: None,
        convexity: None,
        concavity: None,
        convex_probe: None,
        concave_probe: None,
        error: None,
    };
    let triple = match ExponentTriple::new(p, q, s) {
        Ok(t) => t,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let point = triple.to_param_point();
    let cvx = classify_convexity(&triple);
    let ccv = classify_concavity(&triple);
    row.point = Some(point);
    let cfg = ProbeConfig {
        seed: point_seed(cfg.seed, index),
        ..cfg.clone()
    };
    match side(&point, &cfg, &cvx, Direction::Convex).and_then(|a| Ok((a, side(&point, &cfg, &ccv, Direction::Concave)?))) {
        Ok((a, b)) => {
            row.convex_probe = Some(a);
            row.concave_probe = Some(b);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.convexity = Some(cvx);
    row.concavity = Some(ccv);
    row
}

fn summarize(rows: &[ReportRow]) -> ScanSummary {
    let mut s = ScanSummary {
        points: rows.len(),
        ..Default::default()
    };
    for r in rows {
        if r.error.is_some() {
            s.errors += 1;
            continue;
        }
        for (v, p) in [(&r.convexity, &r.convex_probe), (&r.concavity, &r.concave_probe)] {
            let (Some(v), Some(p)) = (v, p) else { continue };
            match v.status {
                st if st.is_proven_positive() && p.violated => s.violations += 1,
                st if st.is_proven_positive() => s.agreements += 1,
                st if st.is_proven_negative() && p.violated => s.agreements += 1,
                st if st.is_proven_negative() => s.inconclusive += 1,
                RegionStatus::OpenConvexity => s.exploratory += 1,
                _ => unreachable!(),
            }
        }
    }
    s
}

/// Classifies and probes every grid point in both directions. Points are
/// processed in parallel on the current rayon pool; rows come back in grid
/// order. Local refinement runs only on sides whose status is a proven
/// failure. A point that cannot be evaluated keeps its error in the row.
pub fn region_scan(grid: &GridSpec, cfg: &ProbeConfig) -> Result<RegionReport> {
    cfg.validate()?;
    let rows: Vec<ReportRow> = grid
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(i, pt)| scan_point(i, pt, cfg))
        .collect();
    let summary = summarize(&rows);
    Ok(RegionReport {
        config: cfg.clone(),
        rows,
        summary,
    })
}
