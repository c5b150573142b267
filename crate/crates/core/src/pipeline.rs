//! The end-to-end chain verify → select m → reduce → solve → σ → majorant →
//! dominance → fixed point → sector, with JSON reports for each stage.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exotic::ExoticSeries;
use crate::fexpr::{partial_sum, OdeExpression};
use crate::fuchsolve::{solve_coefficients, Solution};
use crate::majorant::{
    build_majorant, certified_radius, check_dominance, compute_sigma, estimate_m_bound, fixed_point_solve,
    m_bound_at, solve_majorant, DominanceReport, MBound, MajorantEquation, MajorantParams, MajorantSolution,
    Sigma,
};
use crate::reduction::{check_hypotheses, indicial_coeffs, reduce, select_m, HypothesisRecord, HypothesisReport, MChoice, ReducedEquation};
use crate::scalar::{Backend, Complex64, ComplexScalar};
use crate::sector::{convergence_diagnostic, sector_for_band, ConvergenceReport};

/// Picard iterations allowed per fixed-point check.
pub const FIXED_POINT_MAX_ITER: u32 = 200;
/// Relative agreement required between the fixed point and the majorant series.
pub const FIXED_POINT_TOL: f64 = 1e-8;
/// Number of `t0` values on the band circle used by the fixed-point check.
pub const FIXED_POINT_SAMPLES: usize = 5;
/// Grades of the majorant partial sum compared with the fixed point.
pub const FIXED_POINT_GRADES: u32 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub backend: Backend,
    pub trunc_k: u32,
    pub trunc_l: i64,
    pub sigma_caps: (u32, i64),
    pub params: MajorantParams,
    pub samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            backend: Backend::Exact,
            trunc_k: 12,
            trunc_l: 24,
            sigma_caps: (200, 200),
            params: MajorantParams::default(),
            samples: 8,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trunc_k < 1 || self.trunc_l < 0 {
            return Err(Error::Config("truncK must be at least 1 and truncL nonnegative".into()));
        }
        self.params.validate()
    }
}

/// Brings the equation and series to the configured backend and checks
/// that both agree on `η`.
pub fn prepare(f: &OdeExpression, phi: &ExoticSeries, cfg: &PipelineConfig) -> Result<ExoticSeries> {
    cfg.validate()?;
    let phi = phi.convert(cfg.backend);
    if let Some(e) = &f.eta {
        let declared = cfg.backend.rational(e);
        if declared != *phi.eta() {
            return Err(Error::Config(format!(
                "the equation declares eta = {e}, the series has eta = {}",
                phi.eta().to_strings()[0]
            )));
        }
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub is_solution_to_order: bool,
    pub hypothesis: HypothesisRecord,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.is_solution_to_order && self.hypothesis.satisfied
    }
}

pub fn verify_stage(f: &OdeExpression, phi: &ExoticSeries, cfg: &PipelineConfig) -> Result<HypothesisReport> {
    check_hypotheses(f, phi, cfg.trunc_k as i64, cfg.trunc_l)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MChoiceRecord {
    pub m: u32,
    pub m_min: u32,
    pub roots: Vec<[f64; 2]>,
    pub lattice_zeros: Vec<[i64; 2]>,
}

impl From<&MChoice> for MChoiceRecord {
    fn from(c: &MChoice) -> Self {
        let mut roots: Vec<[f64; 2]> = c.roots.iter().map(|z| [z.re, z.im]).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        MChoiceRecord {
            m: c.m,
            m_min: c.m_min,
            roots,
            lattice_zeros: c.lattice_zeros.iter().map(|h| [h.n, h.j]).collect(),
        }
    }
}

/// `select_m` followed by the reduction.
pub fn reduce_stage(f: &OdeExpression, phi: &ExoticSeries, report: &HypothesisReport) -> Result<(MChoice, ReducedEquation)> {
    report.require()?;
    let n = report.n.expect("satisfied hypotheses have an order N");
    let lcoeffs = indicial_coeffs(report)?;
    let choice = select_m(&lcoeffs, phi.eta(), n)?;
    let eq = reduce(f, phi, n, choice.m)?;
    Ok((choice, eq))
}

/// Grade-by-grade comparison of `ψ` with the tail `α_{k+m}` of the input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TailComparison {
    pub compared_grades: Vec<u32>,
    pub mismatched_grades: Vec<u32>,
    pub max_abs_diff: f64,
}

pub fn compare_tail(psi: &ExoticSeries, phi: &ExoticSeries, m: u32) -> TailComparison {
    let tol = psi.backend().zero_tol().sqrt();
    let mut out = TailComparison {
        compared_grades: Vec::new(),
        mismatched_grades: Vec::new(),
        max_abs_diff: 0.0,
    };
    let top = psi.trunc_k().finite().unwrap_or(0).max(0) as u32;
    for k in 1..=top {
        if !phi.trunc_k().covers((k + m) as i64) {
            break;
        }
        let (Some(c), Some(a)) = (psi.grade_or_zero(k), phi.grade_or_zero(k + m)) else {
            break;
        };
        let t = c.trunc().min(a.trunc());
        let (c, a) = (c.truncate(t), a.truncate(t));
        let d = c.max_abs_diff(&a);
        out.compared_grades.push(k);
        out.max_abs_diff = out.max_abs_diff.max(d);
        let same = if psi.backend().is_exact() { c == a } else { d <= tol };
        if !same {
            out.mismatched_grades.push(k);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveSummary {
    pub trunc_k: u32,
    pub trunc_l: i64,
    pub pole_orders: Vec<[i64; 2]>,
    pub deviations: Vec<(u32, i64)>,
    pub tail: TailComparison,
}

pub fn solve_summary(sol: &Solution, phi: &ExoticSeries, eq: &ReducedEquation, cfg: &PipelineConfig) -> SolveSummary {
    SolveSummary {
        trunc_k: cfg.trunc_k,
        trunc_l: cfg.trunc_l,
        pole_orders: sol.steps.iter().map(|s| [s.k as i64, s.nu_k]).collect(),
        deviations: sol.deviations.clone(),
        tail: compare_tail(&sol.psi, phi, eq.m),
    }
}

pub fn sigma_stage(eq: &ReducedEquation, cfg: &PipelineConfig) -> Result<Sigma> {
    let l: Vec<Complex64> = eq.lcoeffs.iter().map(ComplexScalar::to_c64).collect();
    compute_sigma(&l, eq.m, eq.r, eq.eta.to_c64().re, cfg.sigma_caps.0, cfg.sigma_caps.1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MajorantReport {
    pub sigma: f64,
    pub g: Vec<f64>,
    pub m_tilde_terms: usize,
    pub m_bound: MBound,
    pub radius: f64,
    pub dominance: DominanceReport,
}

pub struct MajorantRun {
    pub equation: MajorantEquation,
    pub solution: MajorantSolution,
    pub report: MajorantReport,
}

pub fn majorant_stage(eq: &ReducedEquation, sigma: f64, psi: &ExoticSeries, cfg: &PipelineConfig) -> Result<MajorantRun> {
    let me = build_majorant(eq, sigma, cfg.params.clone())?;
    let sol = solve_majorant(&me, cfg.trunc_k, cfg.trunc_l)?;
    let dominance = check_dominance(psi, &sol)?;
    let m_bound = estimate_m_bound(&me, cfg.params.tau, cfg.params.tau_prime)?;
    let radius = certified_radius(&cfg.params, m_bound.value);
    let report = MajorantReport {
        sigma,
        g: me.g.clone(),
        m_tilde_terms: me.m_tilde.len(),
        m_bound,
        radius,
        dominance,
    };
    Ok(MajorantRun {
        equation: me,
        solution: sol,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedPointCheck {
    pub t0: [f64; 2],
    pub x: [f64; 2],
    /// `None` when `t0` fails the nondegeneracy margin and was skipped.
    pub v: Option<[f64; 2]>,
    pub iterations: Option<u32>,
    pub partial_sum: [f64; 2],
    pub relative_error: Option<f64>,
    /// Bound on the right side at `|t| = |t0|`.
    pub m_bound_at_t0: f64,
    pub skipped: Option<String>,
}

/// Band circle `|t0| = sqrt(τ τ')`, sampled at equally spaced arguments.
pub fn band_points(params: &MajorantParams, n: usize) -> Vec<Complex64> {
    let r = (params.tau * params.tau_prime).sqrt();
    (0..n)
        .map(|j| Complex64::from_polar(r, TAU * j as f64 / n as f64))
        .collect()
}

/// Picard fixed point against the majorant partial sum at `x`.
pub fn fixed_point_check(
    me: &MajorantEquation,
    sol: &MajorantSolution,
    t0: Complex64,
    x: Complex64,
    grades: u32,
) -> Result<FixedPointCheck> {
    let s = sol.partial_sum(t0, x, grades);
    let mut out = FixedPointCheck {
        t0: [t0.re, t0.im],
        x: [x.re, x.im],
        v: None,
        iterations: None,
        partial_sum: [s.re, s.im],
        relative_error: None,
        m_bound_at_t0: m_bound_at(me, t0).value,
        skipped: None,
    };
    match fixed_point_solve(me, t0, x, FIXED_POINT_MAX_ITER) {
        Ok(fp) => {
            let v = fp.value();
            let scale = v.norm().max(s.norm());
            out.relative_error = Some(if scale == 0.0 { 0.0 } else { (v - s).norm() / scale });
            out.v = Some(fp.v);
            out.iterations = Some(fp.iterations);
        }
        Err(Error::Degenerate(msg)) => out.skipped = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SectorSummary {
    pub theta_min: f64,
    pub theta_max: f64,
    pub radius: f64,
    pub convergent: usize,
    pub divergent: usize,
    pub inconclusive: usize,
    pub max_q: f64,
    pub max_residual: Option<f64>,
}

impl From<&ConvergenceReport> for SectorSummary {
    fn from(r: &ConvergenceReport) -> Self {
        SectorSummary {
            theta_min: r.sector.theta_min,
            theta_max: r.sector.theta_max,
            radius: r.sector.radius,
            convergent: r.convergent,
            divergent: r.divergent,
            inconclusive: r.inconclusive,
            max_q: r.max_q,
            max_residual: r
                .points
                .iter()
                .filter_map(|p| p.residual)
                .reduce(f64::max),
        }
    }
}

/// `Φ_m + x^m ψ`.
pub fn reconstruct(phi: &ExoticSeries, m: u32, psi: &ExoticSeries) -> Result<ExoticSeries> {
    partial_sum(phi, m)?.add(&psi.shift_x(m as i64)?)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    pub mode: String,
    pub precision_bits: Option<u32>,
    pub trunc_k: u32,
    pub trunc_l: i64,
    pub inputs: BTreeMap<String, String>,
    pub verify: Option<VerifyReport>,
    pub m_choice: Option<MChoiceRecord>,
    pub reduced: Option<ReducedSummary>,
    pub solve: Option<SolveSummary>,
    pub sigma: Option<Sigma>,
    pub majorant: Option<MajorantReport>,
    pub fixed_point: Option<Vec<FixedPointCheck>>,
    pub sector: Option<SectorSummary>,
    pub artifacts: BTreeMap<String, String>,
    pub ok: bool,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReducedSummary {
    pub m: u32,
    pub r: i64,
    pub e: i64,
    #[serde(rename = "N")]
    pub n: u32,
    pub order: usize,
    pub m_terms: usize,
}

/// Stage outputs kept in memory, written out by [`write_artifacts`].
#[derive(Default)]
pub struct PipelineArtifacts {
    pub hypothesis: Option<HypothesisReport>,
    pub reduced: Option<ReducedEquation>,
    pub solution: Option<Solution>,
    pub majorant: Option<MajorantSolution>,
    pub sector: Option<ConvergenceReport>,
}

pub struct PipelineOutcome {
    pub report: PipelineReport,
    pub artifacts: PipelineArtifacts,
    /// The error that halted the pipeline, wrapped with its stage name.
    pub error: Option<Error>,
}

impl PipelineOutcome {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, Error::exit_code)
    }
}

/// Runs every stage in order, halting at the first failure.
pub fn run_pipeline(f: &OdeExpression, phi: &ExoticSeries, cfg: &PipelineConfig) -> PipelineOutcome {
    let mut report = PipelineReport {
        mode: cfg.backend.name().to_string(),
        precision_bits: cfg.backend.bits(),
        trunc_k: cfg.trunc_k,
        trunc_l: cfg.trunc_l,
        ..PipelineReport::default()
    };
    let mut artifacts = PipelineArtifacts::default();
    let result = run_stages(f, phi, cfg, &mut report, &mut artifacts);
    let error = result.err();
    if let Some(e) = &error {
        if let Error::Stage { stage, source } = e {
            report.failed_stage = Some(stage.to_string());
            report.error = Some(source.to_string());
        } else {
            report.error = Some(e.to_string());
        }
    }
    report.ok = error.is_none();
    PipelineOutcome {
        report,
        artifacts,
        error,
    }
}

fn run_stages(
    f: &OdeExpression,
    phi: &ExoticSeries,
    cfg: &PipelineConfig,
    report: &mut PipelineReport,
    art: &mut PipelineArtifacts,
) -> Result<()> {
    let phi = prepare(f, phi, cfg).map_err(|e| e.in_stage("config"))?;

    let hyp = verify_stage(f, &phi, cfg).map_err(|e| e.in_stage("verify"))?;
    report.verify = Some(VerifyReport {
        is_solution_to_order: hyp.is_solution,
        hypothesis: hyp.to_record(),
    });
    let checked = hyp.require().map_err(|e| e.in_stage("verify"));
    art.hypothesis = Some(hyp);
    checked?;
    let hyp = art.hypothesis.as_ref().expect("stored above");

    let (choice, eq) = reduce_stage(f, &phi, hyp).map_err(|e| e.in_stage("reduce"))?;
    report.m_choice = Some(MChoiceRecord::from(&choice));
    report.reduced = Some(ReducedSummary {
        m: eq.m,
        r: eq.r,
        e: eq.e,
        n: eq.n_x,
        order: eq.order(),
        m_terms: eq.m_series.terms().len(),
    });

    let sol = solve_coefficients(&eq, cfg.trunc_k, cfg.trunc_l).map_err(|e| e.in_stage("solve"))?;
    report.solve = Some(solve_summary(&sol, &phi, &eq, cfg));

    let sigma = sigma_stage(&eq, cfg).map_err(|e| e.in_stage("sigma"))?;
    report.sigma = Some(sigma.clone());

    let run = majorant_stage(&eq, sigma.sigma, &sol.psi, cfg).map_err(|e| e.in_stage("majorant"))?;
    report.majorant = Some(run.report.clone());
    if let Some((k, l)) = run.report.dominance.first_violation {
        art.reduced = Some(eq);
        art.solution = Some(sol);
        art.majorant = Some(run.solution);
        return Err(Error::Dominance { k, l }.in_stage("dominance"));
    }

    let x = Complex64::new(run.report.radius / 2.0, 0.0);
    let grades = FIXED_POINT_GRADES.min(cfg.trunc_k);
    let checks = band_points(&cfg.params, FIXED_POINT_SAMPLES)
        .into_iter()
        .map(|t0| fixed_point_check(&run.equation, &run.solution, t0, x, grades))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("fixedPoint"))?;
    let bad = checks
        .iter()
        .find(|c| c.relative_error.is_some_and(|r| r > FIXED_POINT_TOL))
        .map(|c| (c.t0, c.relative_error));
    report.fixed_point = Some(checks);
    if let Some((t0, err)) = bad {
        return Err(Error::Numerical(format!(
            "fixed point at t0 = {t0:?} differs from the majorant series by {err:?}"
        ))
        .in_stage("fixedPoint"));
    }

    let sector = sector_for_band(eq.eta.to_c64().re, cfg.params.tau, cfg.params.tau_prime, run.report.radius)
        .map_err(|e| e.in_stage("sector"))?;
    let y = reconstruct(&phi, eq.m, &sol.psi).map_err(|e| e.in_stage("sector"))?;
    let diag = convergence_diagnostic(&y, &sector, cfg.samples, Some(f)).map_err(|e| e.in_stage("sector"))?;
    report.sector = Some(SectorSummary::from(&diag));

    art.reduced = Some(eq);
    art.solution = Some(sol);
    art.majorant = Some(run.solution);
    art.sector = Some(diag);
    Ok(())
}

/// Serializes with sorted keys where maps occur and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes each available stage output into `dir` and records the relative
/// file names in the report.
pub fn write_artifacts(dir: &Path, outcome: &mut PipelineOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let art = &outcome.artifacts;
    let mut files: Vec<(&str, String)> = Vec::new();
    if let Some(h) = &art.hypothesis {
        files.push(("hypothesis.json", to_json(&h.to_record())?));
    }
    if let Some(eq) = &art.reduced {
        files.push(("reduced.json", to_json(&eq.to_record())?));
    }
    if let Some(sol) = &art.solution {
        files.push(("solution.json", to_json(&sol.psi.to_record())?));
    }
    if let Some(m) = &art.majorant {
        files.push(("majorant.json", to_json(m)?));
    }
    if let Some(s) = &art.sector {
        files.push(("sector.json", to_json(s)?));
    }
    for (name, text) in files {
        std::fs::write(dir.join(name), text)?;
        let stage = name.trim_end_matches(".json").to_string();
        outcome.report.artifacts.insert(stage, name.to_string());
    }
    outcome.report.artifacts.insert("report".into(), "pipeline.json".into());
    std::fs::write(dir.join("pipeline.json"), to_json(&outcome.report)?)?;
    Ok(())
}
