use serde::Serialize;
use tcl_core::channels::{dpi_scan, DpiConfig};
use tcl_core::counterexamples::{
    concavity_homogeneity_refutation, dilation_limit, lemma33_mid_r, lemma33_negative_r, CounterexampleResult, DilationReport,
};
use tcl_core::functionals::{trace_power_variational, variational_objective, ParamPoint, TripleParams, VariationalMode};
use tcl_core::linalg::{random_contraction, random_psd, RandomSpec};
use tcl_core::probes::{
    epstein_probe, probe_operator_convexity, probe_psi_convexity, probe, probe_psi_equivalences, probe_trace_convexity,
    probe_triple_convexity, region_scan, ConvexityVerdict, Direction, Functional, GridSpec, ProbeConfig,
};
use tcl_core::regions::{classify, classify_operator_map, classify_triple, Classification, Exponent, ExponentTriple, RegionVerdict};
use tcl_core::report::{csv_field, csv_float, csv_header, csv_opt_float, to_json};

use crate::args::*;
use crate::Failure;

/// What a command produced: the rendered output and whether it found a
/// violation of something proven.
pub struct Outcome {
    pub body: String,
    pub violation: bool,
    /// One-line summary for stderr.
    pub summary: Option<String>,
}

impl Outcome {
    fn new(body: String) -> Self {
        Outcome {
            body,
            violation: false,
            summary: None,
        }
    }
}

pub struct Context<'a> {
    pub global: &'a GlobalOpts,
    pub seed: u64,
}

impl Context<'_> {
    fn probe_config(&self, lambdas: &str) -> Result<ProbeConfig, Failure> {
        let cfg = ProbeConfig {
            tol_rel: self.global.tol,
            ..ProbeConfig::new(self.global.dim, self.global.trials, self.seed)
        }
        .with_lambdas(&parse_list(lambdas)?);
        cfg.validate()?;
        Ok(cfg)
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<String, Failure> {
        Ok(to_json(value)?)
    }
}

/// Independent seed for the `k`-th derived draw.
fn derive(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("cannot parse number {x:?} in {s:?}"))))
        .collect()
}

/// `"a,b,c"` or `"lo:hi:n"` (n evenly spaced decimals).
fn parse_grid(s: &str) -> Result<Vec<Exponent>, Failure> {
    let usage = |m: String| Failure::Usage(m);
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(usage(format!("range must be lo:hi:n, got {s:?}")));
        };
        let lo = lo.parse::<Exponent>().map_err(|e| usage(e.to_string()))?.to_f64();
        let hi = hi.parse::<Exponent>().map_err(|e| usage(e.to_string()))?.to_f64();
        let n: usize = n.trim().parse().map_err(|_| usage(format!("bad point count in {s:?}")))?;
        if n == 0 {
            return Err(usage(format!("range {s:?} has no points")));
        }
        if n == 1 {
            return Ok(vec![Exponent::Decimal(lo)]);
        }
        return Ok((0..n).map(|i| Exponent::Decimal(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect());
    }
    s.split(',')
        .map(|x| x.parse::<Exponent>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn parse_float_grid(s: &str) -> Result<Vec<f64>, Failure> {
    Ok(parse_grid(s)?.into_iter().map(Exponent::to_f64).collect())
}

fn need<T: Copy>(x: Option<T>, name: &str, what: &str) -> Result<T, Failure> {
    x.ok_or_else(|| Failure::Usage(format!("--{name} is required for {what}")))
}

#[derive(Serialize)]
struct ClassifyOutput {
    map: MapKind,
    p: Exponent,
    q: Exponent,
    s: Option<Exponent>,
    r: Option<Exponent>,
    #[serde(flatten)]
    verdicts: Classification,
}

pub fn classify_cmd(ctx: &Context, a: &ClassifyArgs) -> Result<Outcome, Failure> {
    let verdicts = match a.map {
        MapKind::Trace => classify(&ExponentTriple::new(a.p, a.q, need(a.s, "s", "the trace map")?)?),
        MapKind::Operator => classify_operator_map(a.p, a.q)?,
        MapKind::Triple => classify_triple(a.p, a.q, need(a.r, "r", "the triple map")?)?,
    };
    let out = ClassifyOutput {
        map: a.map,
        p: a.p,
        q: a.q,
        s: a.s,
        r: a.r,
        verdicts,
    };
    let body = match ctx.global.format {
        Format::Json => ctx.json(&out)?,
        Format::Csv => {
            let cols = ["map", "p", "q", "s", "r", "status_convex", "tag_convex", "status_concave", "tag_concave"];
            let opt = |e: Option<Exponent>| e.map(|e| e.to_string()).unwrap_or_default();
            let v = &out.verdicts;
            let row = [
                format!("{:?}", a.map).to_lowercase(),
                a.p.to_string(),
                a.q.to_string(),
                opt(a.s),
                opt(a.r),
                v.convexity.status.as_str().into(),
                csv_field(&v.convexity.justification),
                v.concavity.status.as_str().into(),
                csv_field(&v.concavity.justification),
            ];
            format!("{}{}\n", csv_header("classify", &cols), row.join(","))
        }
    };
    Ok(Outcome::new(body))
}

pub fn scan_cmd(ctx: &Context, a: &ScanArgs) -> Result<Outcome, Failure> {
    let cfg = ctx.probe_config(&a.lambdas)?;
    let grid = GridSpec::new(parse_grid(&a.p_grid)?, parse_grid(&a.q_grid)?, parse_grid(&a.s_grid)?);
    let report = region_scan(&grid, &cfg)?;
    let s = report.summary;
    let body = match ctx.global.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome {
        body,
        violation: report.has_proven_violation(),
        summary: Some(format!(
            "points={} agreements={} violations={} inconclusive={} exploratory={} errors={}",
            s.points, s.agreements, s.violations, s.inconclusive, s.exploratory, s.errors
        )),
    })
}

#[derive(Serialize)]
struct ProbeOutput {
    functional: FunctionalKind,
    direction: Direction,
    region: Option<RegionVerdict>,
    verdict: ConvexityVerdict,
}

fn side(c: Classification, d: Direction) -> RegionVerdict {
    match d {
        Direction::Convex => c.convexity,
        Direction::Concave => c.concavity,
    }
}

pub fn probe_cmd(ctx: &Context, a: &ProbeArgs) -> Result<Outcome, Failure> {
    let cfg = ctx.probe_config(&a.lambdas)?.with_refine(a.refine);
    let dir = match a.direction {
        DirectionArg::Convex => Direction::Convex,
        DirectionArg::Concave => Direction::Concave,
    };
    let what = "this functional";
    let triple = || -> Result<ExponentTriple, Failure> {
        Ok(ExponentTriple::new(need(a.p, "p", what)?, need(a.q, "q", what)?, need(a.s, "s", what)?)?)
    };
    let (region, verdict) = match a.functional {
        FunctionalKind::Trace => {
            let t = triple()?;
            (Some(side(classify(&t), dir)), probe_trace_convexity(&t.to_param_point(), &cfg, dir)?)
        }
        FunctionalKind::Psi => {
            let t = triple()?;
            (Some(side(classify(&t), dir)), probe_psi_convexity(&t.to_param_point(), None, &cfg, dir)?)
        }
        FunctionalKind::PsiDiagonal => {
            let t = triple()?;
            let f = Functional::PsiDiagonal { params: t.to_param_point() };
            (Some(side(classify(&t), dir)), probe(&f, None, &cfg, dir)?)
        }
        FunctionalKind::Operator => {
            let (p, q) = (need(a.p, "p", what)?, need(a.q, "q", what)?);
            let c = classify_operator_map(p, q)?;
            (Some(side(c, dir)), probe_operator_convexity(p.to_f64(), q.to_f64(), &cfg, dir)?)
        }
        FunctionalKind::Triple => {
            let (p, q, r) = (need(a.p, "p", what)?, need(a.q, "q", what)?, need(a.r, "r", what)?);
            let c = classify_triple(p, q, r)?;
            let t = TripleParams::new(p.to_f64(), q.to_f64(), r.to_f64())?;
            (Some(side(c, dir)), probe_triple_convexity(&t, &cfg, dir)?)
        }
        FunctionalKind::Epstein => {
            if dir != Direction::Concave {
                return Err(Failure::Usage("the epstein probe tests concavity; use --direction concave".into()));
            }
            let d = random_psd(&RandomSpec::new(derive(ctx.seed, 0), ctx.global.dim))?;
            (None, epstein_probe(&d, need(a.t, "t", what)?, need(a.u, "u", what)?, &cfg)?)
        }
        FunctionalKind::Equivalence => {
            let t = triple()?;
            let report = probe_psi_equivalences(&t.to_param_point(), &cfg, dir)?;
            let consistent = report.consistent();
            let summary = format!(
                "consistent={consistent} swap_residual={:e} corner_residual={:e}",
                report.swap_embedding_residual, report.corner_embedding_residual
            );
            return Ok(Outcome {
                body: ctx.json(&report)?,
                violation: !consistent,
                summary: Some(summary),
            });
        }
    };
    let violation = verdict.violated && region.as_ref().is_some_and(|r| r.status.is_proven_positive());
    let out = ProbeOutput {
        functional: a.functional,
        direction: dir,
        region,
        verdict,
    };
    let body = match ctx.global.format {
        Format::Json => ctx.json(&out)?,
        Format::Csv => {
            let cols = ["functional", "direction", "status", "violated", "worst_margin", "trials_run", "refined"];
            let row = [
                format!("{:?}", out.functional).to_lowercase(),
                dir.as_str().into(),
                out.region.as_ref().map(|r| r.status.as_str()).unwrap_or("").into(),
                out.verdict.violated.to_string(),
                csv_float(out.verdict.worst_margin),
                out.verdict.trials_run.to_string(),
                out.verdict.refined.to_string(),
            ];
            format!("{}{}\n", csv_header("probe", &cols), row.join(","))
        }
    };
    Ok(Outcome {
        body,
        violation,
        summary: Some(format!("violated={} worst_margin={:e}", out.verdict.violated, out.verdict.worst_margin)),
    })
}

fn counterexample_csv(r: &CounterexampleResult) -> String {
    let mut out = csv_header("counterexample", &["key", "value"]);
    out.push_str(&format!("margin,{}\n", csv_float(r.margin)));
    out.push_str(&format!("expected,{}\n", csv_opt_float(r.expected)));
    out.push_str(&format!("limit_parameter,{}\n", csv_opt_float(r.limit_parameter)));
    for (k, v) in &r.scalars {
        out.push_str(&format!("{},{}\n", csv_field(k), csv_float(*v)));
    }
    out
}

fn dilation_csv(r: &DilationReport) -> String {
    let mut out = csv_header("dilation", &["t", "value", "direct", "gap_rel"]);
    for s in &r.steps {
        out.push_str(&format!("{},{},{},{}\n", csv_float(s.t), csv_float(s.value), csv_float(r.direct), csv_float(s.gap_rel)));
    }
    out
}

pub fn counterexample_cmd(ctx: &Context, c: &CounterexampleCmd) -> Result<Outcome, Failure> {
    let result = match *c {
        CounterexampleCmd::Lemma33Neg { r, t } => lemma33_negative_r(r, t)?,
        CounterexampleCmd::Lemma33Mid { r } => lemma33_mid_r(r)?,
        CounterexampleCmd::Homogeneity { p, q, scale } => concavity_homogeneity_refutation(p, q, scale, ctx.global.dim, ctx.seed)?,
        CounterexampleCmd::Dilation {
            p,
            q,
            s,
            k_norm,
            ref schedule,
        } => {
            let params = ParamPoint::new(p, q, s)?;
            let n = ctx.global.dim;
            let k = random_contraction(&RandomSpec::new(derive(ctx.seed, 0), n), k_norm)?;
            let a = random_psd(&RandomSpec::new(derive(ctx.seed, 1), n))?;
            let b = random_psd(&RandomSpec::new(derive(ctx.seed, 2), n))?;
            let schedule = schedule.as_deref().map(parse_list).transpose()?;
            let report = dilation_limit(&k, &a, &b, &params, schedule.as_deref())?;
            let summary = format!(
                "final_gap_rel={:e} monotone={} near_unit_norm={}",
                report.final_gap_rel, report.monotone, report.near_unit_norm
            );
            let body = match ctx.global.format {
                Format::Json => ctx.json(&report)?,
                Format::Csv => dilation_csv(&report),
            };
            return Ok(Outcome {
                body,
                violation: false,
                summary: Some(summary),
            });
        }
    };
    let witness = result.witness.as_ref().map(|w| w.margin);
    let body = match ctx.global.format {
        Format::Json => ctx.json(&result)?,
        Format::Csv => counterexample_csv(&result),
    };
    Ok(Outcome {
        body,
        violation: false,
        summary: Some(format!("margin={:e} witness_margin={}", result.margin, witness.map(|m| format!("{m:e}")).unwrap_or_default())),
    })
}

#[derive(Serialize)]
struct VariationalRow {
    index: usize,
    mode: VariationalMode,
    s: f64,
    trace_power: f64,
    certificate: f64,
    rel_error: f64,
    search_value: f64,
    /// Best `s·F(Z)` over the random feasible `Z`.
    best_random: Option<f64>,
    beaten: bool,
}

#[derive(Serialize)]
struct VariationalReport {
    dim: usize,
    seed: u64,
    rows: Vec<VariationalRow>,
    worst_rel_error: f64,
    beaten: usize,
}

const CERTIFICATE_TOL: f64 = 1e-10;

pub fn variational_cmd(ctx: &Context, a: &VariationalArgs) -> Result<Outcome, Failure> {
    use rayon::prelude::*;
    let mode = match a.mode {
        ModeArg::Sup => VariationalMode::Sup,
        ModeArg::Inf => VariationalMode::Inf,
    };
    if let Some(s) = a.s {
        let ok = match mode {
            VariationalMode::Sup => s > 1.0,
            VariationalMode::Inf => s > 0.0 && s < 1.0,
        };
        if !ok || !s.is_finite() {
            return Err(Failure::Usage(format!("s = {s} is outside the range of the {:?} formula", a.mode).to_lowercase()));
        }
    }
    let n = ctx.global.dim;
    let rows: Vec<VariationalRow> = (0..a.samples)
        .into_par_iter()
        .map(|i| -> Result<VariationalRow, Failure> {
            let base = derive(ctx.seed, i as u64);
            let x = random_psd(&RandomSpec::new(base, n))?;
            // s from its own stream so a fixed --s does not change the X draws
            let frac = (derive(base, 1) >> 11) as f64 / (1u64 << 53) as f64;
            let s = a.s.unwrap_or(match mode {
                VariationalMode::Sup => 1.05 + 2.95 * frac,
                VariationalMode::Inf => 0.05 + 0.9 * frac,
            });
            let res = trace_power_variational(&x, s, mode, a.steps)?;
            let mut best: Option<f64> = None;
            for j in 0..a.random_z {
                let z = random_psd(&RandomSpec::new(derive(base, 2 + j as u64), n))?;
                let scale = 0.25 + 4.0 * (derive(base, 1 << 20 | j as u64) >> 11) as f64 / (1u64 << 53) as f64;
                let v = s * variational_objective(&x, &z.scale(scale * res.trace_power / n as f64)?, s)?;
                best = Some(match (best, mode) {
                    (None, _) => v,
                    (Some(b), VariationalMode::Sup) => b.max(v),
                    (Some(b), VariationalMode::Inf) => b.min(v),
                });
            }
            let tol = CERTIFICATE_TOL * res.value.abs();
            let beats = |v: f64| match mode {
                VariationalMode::Sup => v > res.value + tol,
                VariationalMode::Inf => v < res.value - tol,
            };
            Ok(VariationalRow {
                index: i,
                mode,
                s,
                trace_power: res.trace_power,
                certificate: res.value,
                rel_error: (res.value - res.trace_power).abs() / res.trace_power.abs(),
                search_value: res.search_value,
                best_random: best,
                beaten: res.search_beats_certificate || best.is_some_and(beats),
            })
        })
        .collect::<Result<_, _>>()?;
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let beaten = rows.iter().filter(|r| r.beaten).count();
    let report = VariationalReport {
        dim: n,
        seed: ctx.seed,
        worst_rel_error: worst,
        beaten,
        rows,
    };
    let body = match ctx.global.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let cols = ["index", "mode", "s", "trace_power", "certificate", "rel_error", "search_value", "best_random", "beaten"];
            let mut out = csv_header("variational", &cols);
            for r in &report.rows {
                let row = [
                    r.index.to_string(),
                    format!("{:?}", r.mode).to_lowercase(),
                    csv_float(r.s),
                    csv_float(r.trace_power),
                    csv_float(r.certificate),
                    csv_float(r.rel_error),
                    csv_float(r.search_value),
                    csv_opt_float(r.best_random),
                    r.beaten.to_string(),
                ];
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
    };
    Ok(Outcome {
        body,
        violation: worst > CERTIFICATE_TOL || beaten > 0,
        summary: Some(format!("samples={} worst_rel_error={worst:e} beaten={beaten}", report.rows.len())),
    })
}

pub fn dpi_cmd(ctx: &Context, a: &DpiArgs) -> Result<Outcome, Failure> {
    let dims: Vec<&str> = a.dims.split(':').collect();
    let bad = || Failure::Usage(format!("--dims must be lo:hi, got {:?}", a.dims));
    let [lo, hi] = dims[..] else { return Err(bad()) };
    let dims = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    let cfg = DpiConfig {
        trials: ctx.global.trials,
        dims,
        max_env: a.max_env,
        seed: ctx.seed,
        ..Default::default()
    };
    let report = dpi_scan(&parse_float_grid(&a.alpha_grid)?, &parse_float_grid(&a.z_grid)?, &cfg)?;
    let known: Vec<_> = report.rows.iter().filter(|r| r.known_region.is_some()).collect();
    let summary = format!(
        "points={} known={} known_violations={} exploratory_violations={} errors={}",
        report.rows.len(),
        known.len(),
        known.iter().map(|r| r.violations).sum::<usize>(),
        report.rows.iter().filter(|r| r.known_region.is_none()).map(|r| r.violations).sum::<usize>(),
        report.rows.iter().filter(|r| r.error.is_some()).count(),
    );
    let body = match ctx.global.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome {
        body,
        violation: report.has_forbidden_violation(),
        summary: Some(summary),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("1/2,1,-3/2").unwrap();
        assert_eq!(g.len(), 3);
        assert!(g[0].is_exact());
        let r = parse_grid("0:1:5").unwrap();
        assert_eq!(r.iter().map(|e| e.to_f64()).collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_list("0.25, 0.5").is_ok());
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive(0, 1), derive(1, 0));
        assert_ne!(derive(5, 0), derive(5, 1));
    }
}
