//! The five subcommands. Each one computes its rows as a pure function of
//! the config, sorts them, and hands them to the writers.

use std::cmp::Ordering;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;
use sphere_ineq::em_certifier::{certify, em_upper_bound, find_p_star, m0, m1, CertificateReport};
use sphere_ineq::inequality_lab::{
    alt_trace_check, build_family, compare_constants, galerkin_rule, gn_check, minimal_degree, nonnegative_potential,
    random_field, theorem1_check, variational_step_check, ConstantsTable, Flavor, Mixing, SampleCache,
};
use sphere_ineq::par;
use sphere_ineq::spectral_series::{eval_i, eval_j, Params};
use sphere_ineq::sphere_basis::basis_len;

use crate::config::{Command, FlavorChoice, RunConfig};
use crate::error::Result;
use crate::output::{line_chart, write_all};

/// Result of a run: the files written and whether every contract held.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub ok: bool,
    pub summary: String,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    with_jobs(cfg.jobs, || match cfg.command {
        Command::Series => run_series(cfg),
        Command::Certify => run_certify(cfg),
        Command::Fig1 => run_fig1(cfg),
        Command::Harness => run_harness(cfg),
        Command::Constants => run_constants(cfg),
    })
}

#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T: Send>(_jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    f()
}

fn by_float(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub p: f64,
    pub m: f64,
    #[serde(rename = "I_lo")]
    pub i_lo: Option<f64>,
    #[serde(rename = "I_hi")]
    pub i_hi: Option<f64>,
    #[serde(rename = "J_lo")]
    pub j_lo: Option<f64>,
    #[serde(rename = "J_hi")]
    pub j_hi: Option<f64>,
    pub em_bound: Option<f64>,
    pub verdict: &'static str,
    pub error: String,
}

pub fn series_rows(cfg: &RunConfig) -> Vec<SeriesRow> {
    let cells: Vec<(f64, f64)> = cfg.p.iter().flat_map(|&p| cfg.m.iter().map(move |&m| (p, m))).collect();
    let mut rows = par::map(&cells, |&(p, m)| series_cell(p, m, cfg.tol));
    rows.sort_by(|a, b| by_float(a.p, b.p).then(by_float(a.m, b.m)));
    rows
}

fn series_cell(p: f64, m: f64, tol: f64) -> SeriesRow {
    let mut row = SeriesRow {
        p,
        m,
        i_lo: None,
        i_hi: None,
        j_lo: None,
        j_hi: None,
        em_bound: None,
        verdict: "error",
        error: String::new(),
    };
    let computed = Params::new(p, m).and_then(|params| {
        let i = eval_i(params, tol)?;
        let j = eval_j(params, tol)?;
        Ok((params, i, j))
    });
    match computed {
        Ok((params, i, j)) => {
            row.i_lo = Some(i.lo);
            row.i_hi = Some(i.hi);
            row.j_lo = Some(j.lo);
            row.j_hi = Some(j.hi);
            row.em_bound = if m > 0.0 { em_upper_bound(params).ok() } else { None };
            row.verdict = if i.hi < 1.0 && j.hi < 1.0 { "pass" } else { "fail" };
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

fn run_series(cfg: &RunConfig) -> Result<Outcome> {
    let rows = series_rows(cfg);
    let failed = rows.iter().filter(|r| r.verdict != "pass").count();
    let files = write_all(cfg, &rows, json!({ "cells": rows.len(), "not_passing": failed }), None)?;
    Ok(Outcome { files, ok: failed == 0, summary: format!("series: {} cells, {failed} not passing", rows.len()) })
}

pub fn certify_report(cfg: &RunConfig) -> Result<CertificateReport> {
    Ok(certify(&cfg.p, cfg.m_cap, cfg.tol)?)
}

fn run_certify(cfg: &RunConfig) -> Result<Outcome> {
    let report = certify_report(cfg)?;
    let failures = report.failures().count();
    let extra = json!({
        "claim": "verified on grid",
        "summary": report.summary,
        "p_star": report.p_star,
        "m_star": report.m_star,
        "failures": failures,
    });
    let files = write_all(cfg, &report.cells, extra, None)?;
    Ok(Outcome {
        files,
        ok: report.summary,
        summary: format!(
            "certify: {} cells, {failures} failing, summary {} (verified on grid)",
            report.cells.len(),
            report.summary
        ),
    })
}

pub const FIG1_POINTS: usize = 501;
pub const FIG1_RANGE: (f64, f64) = (2.0, 2.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub p: f64,
    pub m0: f64,
    pub m1: f64,
    pub diff: f64,
}

/// The sampled curve `m1(p) − m0(p)`, its root and the number of sign changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Data {
    pub rows: Vec<Fig1Row>,
    pub p_star: f64,
    pub sign_changes: usize,
}

pub fn fig1_data(cfg: &RunConfig) -> Result<Fig1Data> {
    let (a, b) = FIG1_RANGE;
    let rows = (0..FIG1_POINTS)
        .map(|i| {
            let p = if i + 1 == FIG1_POINTS { b } else { a + (b - a) * i as f64 / (FIG1_POINTS - 1) as f64 };
            let (lo, hi) = (m0(p)?, m1(p)?);
            Ok(Fig1Row { p, m0: lo, m1: hi, diff: hi - lo })
        })
        .collect::<Result<Vec<_>>>()?;
    let sign_changes = rows.windows(2).filter(|w| (w[0].diff < 0.0) != (w[1].diff < 0.0)).count();
    let p_star = find_p_star(cfg.tol.max(1e-12))?;
    Ok(Fig1Data { rows, p_star, sign_changes })
}

fn run_fig1(cfg: &RunConfig) -> Result<Outcome> {
    let data = fig1_data(cfg)?;
    let (first, last) = (data.rows[0].diff, data.rows[FIG1_POINTS - 1].diff);
    let ok = first < 0.0 && last > 0.0 && data.sign_changes == 1;
    let xs: Vec<f64> = data.rows.iter().map(|r| r.p).collect();
    let ys: Vec<f64> = data.rows.iter().map(|r| r.diff).collect();
    let label = format!("p* = {:.5}", data.p_star);
    let svg = line_chart(cfg, "m1(p) - m0(p)", &xs, &ys, Some((data.p_star, &label)));
    let extra = json!({ "p_star": data.p_star, "sign_changes": data.sign_changes });
    let files = write_all(cfg, &data.rows, extra, Some(svg))?;
    Ok(Outcome {
        files,
        ok,
        summary: format!("fig1: p* = {:.8}, {} sign change(s)", data.p_star, data.sign_changes),
    })
}

/// Degree of the random fields in the Gagliardo–Nirenberg rows.
pub const HARNESS_FIELD_DEGREE: usize = 8;
/// Galerkin truncation degree of the trace rows (dimension 48).
pub const HARNESS_TRACE_DEGREE: usize = 6;
const HARNESS_POTENTIAL_DEGREE: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessRow {
    pub kind: &'static str,
    pub flavor: Option<Flavor>,
    pub n: Option<usize>,
    pub m: Option<f64>,
    pub exponent: f64,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub quad_error: Option<f64>,
    pub holds: bool,
    pub error: String,
}

impl HarnessRow {
    fn new(kind: &'static str, flavor: Option<Flavor>, n: Option<usize>, m: Option<f64>, exponent: f64) -> Self {
        HarnessRow {
            kind,
            flavor,
            n,
            m,
            exponent,
            value: None,
            bound: None,
            margin: None,
            quad_error: None,
            holds: false,
            error: String::new(),
        }
    }

    fn fill(mut self, r: sphere_ineq::Result<(f64, f64, f64, bool)>) -> Self {
        match r {
            Ok((value, bound, quad_error, holds)) => {
                self.value = Some(value);
                self.bound = Some(bound);
                self.margin = Some((bound - value) / bound);
                self.quad_error = Some(quad_error);
                self.holds = holds;
            }
            Err(e) => self.error = e.to_string(),
        }
        self
    }

    fn key(&self) -> (&'static str, u8, usize, f64, f64) {
        let flavor = match self.flavor {
            None => 0,
            Some(Flavor::Scalar) => 1,
            Some(Flavor::VectorDivFree) => 2,
        };
        (self.kind, flavor, self.n.unwrap_or(0), self.m.unwrap_or(0.0), self.exponent)
    }
}

#[derive(Debug, Clone, Copy)]
enum HarnessCell {
    Theorem1 { flavor: Flavor, n: usize, m: f64, p: f64 },
    Gn { q: f64 },
    Trace { m: f64, r: f64 },
    Variational { n: usize, m: f64 },
}

pub fn harness_rows(cfg: &RunConfig) -> Vec<HarnessRow> {
    let flavors: &[Flavor] = match cfg.flavor {
        FlavorChoice::Scalar => &[Flavor::Scalar],
        FlavorChoice::Vector => &[Flavor::VectorDivFree],
        FlavorChoice::Both => &[Flavor::Scalar, Flavor::VectorDivFree],
    };
    let mut cells = Vec::new();
    for &flavor in flavors {
        for &n in &cfg.n {
            for &m in &cfg.m {
                for &p in &cfg.p {
                    cells.push(HarnessCell::Theorem1 { flavor, n, m, p });
                }
            }
        }
    }
    if flavors.contains(&Flavor::Scalar) {
        cells.extend(cfg.q.iter().map(|&q| HarnessCell::Gn { q }));
        for &m in &cfg.m {
            cells.extend(cfg.p.iter().filter(|p| **p > 1.0).map(|&r| HarnessCell::Trace { m, r }));
            let fits = |n: &&usize| **n < basis_len(HARNESS_TRACE_DEGREE);
            cells.extend(cfg.n.iter().filter(fits).map(|&n| HarnessCell::Variational { n, m }));
        }
    }
    let cache = SampleCache::new();
    let mut rows = par::map(&cells, |c| harness_cell(*c, cfg.seed, &cache));
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.key(), b.key());
        ka.0.cmp(kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.cmp(&kb.2))
            .then(by_float(ka.3, kb.3))
            .then(by_float(ka.4, kb.4))
    });
    rows
}

fn harness_cell(cell: HarnessCell, seed: u64, cache: &SampleCache) -> HarnessRow {
    match cell {
        HarnessCell::Theorem1 { flavor, n, m, p } => {
            HarnessRow::new("theorem1", Some(flavor), Some(n), Some(m), p).fill((|| {
                let f = build_family(m, n, flavor, Mixing::Seeded(seed), minimal_degree(n))?;
                let r = theorem1_check(&f, p, cache)?;
                Ok((r.value, 1.0, r.error, r.holds()))
            })())
        }
        HarnessCell::Gn { q } => {
            HarnessRow::new("gn", None, Some(HARNESS_FIELD_DEGREE), None, q).fill((|| {
                let c = random_field(seed, HARNESS_FIELD_DEGREE, true);
                let r = gn_check(&c, q, cache)?;
                let holds = if q == 2.0 { (r.value - 1.0).abs() <= 1e-12 } else { r.holds() };
                Ok((r.value, 1.0, r.error, holds))
            })())
        }
        HarnessCell::Trace { m, r } => {
            HarnessRow::new("alt_trace", Some(Flavor::Scalar), None, Some(m), r).fill((|| {
                let v = nonnegative_potential(seed, HARNESS_POTENTIAL_DEGREE)?;
                let rule = galerkin_rule(HARNESS_TRACE_DEGREE, v.max_degree)?;
                let t = alt_trace_check(m, r, &v, HARNESS_TRACE_DEGREE, &rule)?;
                Ok((t.lhs, t.rhs, 0.0, t.holds()))
            })())
        }
        HarnessCell::Variational { n, m } => {
            HarnessRow::new("variational", Some(Flavor::Scalar), Some(n), Some(m), 1.0).fill((|| {
                let v = nonnegative_potential(seed, HARNESS_POTENTIAL_DEGREE)?;
                let rule = galerkin_rule(HARNESS_TRACE_DEGREE, v.max_degree)?;
                let f = build_family(m, n, Flavor::Scalar, Mixing::Seeded(seed), minimal_degree(n))?;
                let (sum, eig) = variational_step_check(&f, &v, &rule, HARNESS_TRACE_DEGREE)?;
                Ok((sum, eig, 0.0, sum <= eig * (1.0 + 1e-8) + 1e-14))
            })())
        }
    }
}

fn run_harness(cfg: &RunConfig) -> Result<Outcome> {
    let rows = harness_rows(cfg);
    let failing = rows.iter().filter(|r| !r.holds).count();
    let files = write_all(cfg, &rows, json!({ "cells": rows.len(), "failing": failing }), None)?;
    Ok(Outcome { files, ok: failing == 0, summary: format!("harness: {} cells, {failing} failing", rows.len()) })
}

pub fn constants_rows(cfg: &RunConfig) -> Result<Vec<ConstantsTable>> {
    let mut rows = cfg.q.iter().map(|&q| compare_constants(q)).collect::<sphere_ineq::Result<Vec<_>>>()?;
    rows.sort_by(|a, b| by_float(a.q, b.q));
    Ok(rows)
}

fn run_constants(cfg: &RunConfig) -> Result<Outcome> {
    let rows = constants_rows(cfg)?;
    let ok = rows.iter().all(|r| r.comparison_holds);
    let files = write_all(cfg, &rows, json!({}), None)?;
    Ok(Outcome { files, ok, summary: format!("constants: {} exponents, comparisons hold: {ok}", rows.len()) })
}
