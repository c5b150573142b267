use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plotters::prelude::*;
use serde::Serialize;

use exoseries::corpus::CorpusProblem;
use exoseries::error::{Error, Result};
use exoseries::exotic::{ExoticRecord, ExoticSeries};
use exoseries::fexpr::{parse_ode_file, OdeExpression};
use exoseries::laurent::Trunc;
use exoseries::majorant::MajorantParams;
use exoseries::pipeline::{
    majorant_stage, prepare, reduce_stage, run_pipeline, sigma_stage, solve_summary, to_json, verify_stage,
    write_artifacts, MChoiceRecord, PipelineConfig, VerifyReport,
};
use exoseries::fuchsolve::solve_coefficients;
use exoseries::scalar::Backend;
use exoseries::sector::{point_diagnostic, sample_grid, sector_for_band, SectorSpec, Verdict};

#[derive(Parser)]
#[command(name = "exoseries", version, about = "Exotic formal series solutions of Euler-operator ODEs")]
struct Cli {
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value_t = Mode::Exact, global = true)]
    mode: Mode,
    /// Mantissa bits in float mode.
    #[arg(long, default_value_t = 128, global = true)]
    precision: u32,
    /// Number of x-grades.
    #[arg(long = "K", default_value_t = 12, global = true)]
    k: u32,
    /// Highest t-index per grade.
    #[arg(long = "L", default_value_t = 24, global = true)]
    l: i64,
    /// Directory for report files; reports go to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args, Clone)]
struct Input {
    /// Equation file (`eta = …`, `order = …`, `F = …`).
    #[arg(long)]
    ode: Option<PathBuf>,
    /// Exotic series file (JSON).
    #[arg(long)]
    series: Option<PathBuf>,
    /// A shipped problem: linear, riccati, riccati_violating, painleve3.
    #[arg(long, conflicts_with_all = ["ode", "series"])]
    corpus: Option<String>,
}

#[derive(Args, Clone)]
struct Band {
    /// Inner radius of the t-band
    #[arg(long, default_value_t = 0.3)]
    tau: f64,
    /// Outer radius of the t-band
    #[arg(long = "tau-prime", default_value_t = 0.45)]
    tau_prime: f64,
    /// Radius of the t-disc.
    #[arg(long, default_value_t = 0.9)]
    eps: f64,
    /// Radius of the x-disc used by the majorant bound
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Radius of the polydisc in the unknowns
    #[arg(long = "eps-n", default_value_t = 0.5)]
    eps_n: f64,
    /// Enumeration box for sigma, as `K_cap,L_cap`.
    #[arg(long = "sigma-cap", default_value = "200,200")]
    sigma_cap: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an equation file and print its normalized form.
    Parse {
        #[command(flatten)]
        input: Input,
    },
    /// Residual check and hypothesis report.
    Verify {
        #[command(flatten)]
        input: Input,
    },
    /// Choose the shift m and emit the reduced equation.
    Reduce {
        #[command(flatten)]
        input: Input,
    },
    /// Solve the coefficient recursion of the reduced equation.
    Solve {
        #[command(flatten)]
        input: Input,
    },
    /// Lattice minimum of |L|.
    Sigma {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        band: Band,
    },
    /// Majorant solution, dominance check, bound and certified radius.
    Majorant {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        band: Band,
    },
    /// Evaluate partial sums on a sector grid and write a CSV table.
    Evaluate {
        #[command(flatten)]
        input: Input,
        /// Lower sector angle; omit both angles to use the sector of the band
        #[arg(long = "theta-min")]
        theta_min: Option<f64>,
        /// Upper sector angle
        #[arg(long = "theta-max")]
        theta_max: Option<f64>,
        /// Sector radius
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        /// Grid size per axis.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// SVG file for a plot of the sample grid.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        band: Band,
    },
    /// Run every stage in order.
    Pipeline {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        band: Band,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn backend(cli: &Cli) -> Result<Backend> {
    match cli.mode {
        Mode::Exact => Ok(Backend::Exact),
        Mode::Float => Backend::float(cli.precision),
    }
}

fn config(cli: &Cli, band: Option<&Band>, samples: usize) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig {
        backend: backend(cli)?,
        trunc_k: cli.k,
        trunc_l: cli.l,
        samples,
        ..PipelineConfig::default()
    };
    if let Some(b) = band {
        cfg.params = MajorantParams {
            eps_t: b.eps,
            tau: b.tau,
            tau_prime: b.tau_prime,
            rho: b.rho,
            eps_n: b.eps_n,
        };
        let (kc, lc) = b
            .sigma_cap
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("--sigma-cap expects K,L, got {:?}", b.sigma_cap)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Config(format!("bad --sigma-cap entry {s:?}")))
        };
        cfg.sigma_caps = (parse(kc)?, parse(lc)? as i64);
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Loaded {
    f: OdeExpression,
    phi: Option<ExoticSeries>,
    labels: Vec<(String, String)>,
}

fn load(input: &Input, backend: Backend, need_series: bool) -> Result<Loaded> {
    if let Some(name) = &input.corpus {
        let p = CorpusProblem::by_name(name).ok_or_else(|| Error::Config(format!("unknown corpus problem {name:?}")))?;
        return Ok(Loaded {
            f: p.equation()?,
            phi: Some(p.solution(backend)?),
            labels: vec![("corpus".into(), name.clone())],
        });
    }
    let ode = input
        .ode
        .as_ref()
        .ok_or_else(|| Error::Config("an equation is required: pass --ode FILE or --corpus NAME".into()))?;
    let f = parse_ode_file(&fs::read_to_string(ode)?)?;
    let mut labels = vec![("ode".into(), ode.display().to_string())];
    let phi = match &input.series {
        Some(path) => {
            let rec: ExoticRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
            labels.push(("series".into(), path.display().to_string()));
            Some(ExoticSeries::from_record(&rec, backend)?)
        }
        None if need_series => return Err(Error::Config("a series is required: pass --series FILE".into())),
        None => None,
    };
    Ok(Loaded { f, phi, labels })
}

fn emit<T: Serialize>(cli: &Cli, name: &str, value: &T) -> Result<()> {
    let text = to_json(value)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ParseReport {
    order: usize,
    eta: Option<String>,
    y_degree: u32,
    expression: String,
    coefficients: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReduceReport {
    m_choice: MChoiceRecord,
    reduced: exoseries::reduction::ReducedRecord,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveReport {
    summary: exoseries::pipeline::SolveSummary,
    psi: ExoticRecord,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MajorantCliReport {
    sigma: f64,
    #[serde(rename = "Mbound")]
    m_bound: f64,
    tail_warning: bool,
    radius: f64,
    dominance: DominanceSummary,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DominanceSummary {
    ok: bool,
    worst_margin: f64,
    first_violation: Option<(u32, i64)>,
}

#[derive(Serialize)]
struct Row {
    x_re: f64,
    x_im: f64,
    value_re: f64,
    value_im: f64,
    q: f64,
    residual: Option<f64>,
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Parse { input } => {
            let loaded = load(input, Backend::Exact, false)?;
            let f = &loaded.f;
            let report = ParseReport {
                order: f.order,
                eta: f.eta.as_ref().map(|e| e.to_string()),
                y_degree: f.expr.y_degree(),
                expression: f.expr.to_string(),
                coefficients: f.coeffs.keys().cloned().collect(),
            };
            emit(cli, "parse.json", &report)?;
            Ok(0)
        }
        Command::Verify { input } => {
            let cfg = config(cli, None, 8)?;
            let loaded = load(input, cfg.backend, true)?;
            let phi = prepare(&loaded.f, loaded.phi.as_ref().expect("series loaded"), &cfg)?;
            let hyp = verify_stage(&loaded.f, &phi, &cfg)?;
            let report = VerifyReport {
                is_solution_to_order: hyp.is_solution,
                hypothesis: hyp.to_record(),
            };
            emit(cli, "verify.json", &report)?;
            Ok(match hyp.require() {
                Ok(()) => 0,
                Err(e) => e.exit_code(),
            })
        }
        Command::Reduce { input } => {
            let (cfg, f, phi) = staged(cli, input, None)?;
            let hyp = verify_stage(&f, &phi, &cfg)?;
            let (choice, eq) = reduce_stage(&f, &phi, &hyp)?;
            emit(
                cli,
                "reduced.json",
                &ReduceReport {
                    m_choice: MChoiceRecord::from(&choice),
                    reduced: eq.to_record(),
                },
            )?;
            Ok(0)
        }
        Command::Solve { input } => {
            let (cfg, f, phi) = staged(cli, input, None)?;
            let hyp = verify_stage(&f, &phi, &cfg)?;
            let (_, eq) = reduce_stage(&f, &phi, &hyp)?;
            let sol = solve_coefficients(&eq, cfg.trunc_k, cfg.trunc_l)?;
            emit(
                cli,
                "solution.json",
                &SolveReport {
                    summary: solve_summary(&sol, &phi, &eq, &cfg),
                    psi: sol.psi.to_record(),
                },
            )?;
            Ok(0)
        }
        Command::Sigma { input, band } => {
            let (cfg, f, phi) = staged(cli, input, Some(band))?;
            let hyp = verify_stage(&f, &phi, &cfg)?;
            let (_, eq) = reduce_stage(&f, &phi, &hyp)?;
            emit(cli, "sigma.json", &sigma_stage(&eq, &cfg)?)?;
            Ok(0)
        }
        Command::Majorant { input, band } => {
            let (cfg, f, phi) = staged(cli, input, Some(band))?;
            let hyp = verify_stage(&f, &phi, &cfg)?;
            let (_, eq) = reduce_stage(&f, &phi, &hyp)?;
            let sol = solve_coefficients(&eq, cfg.trunc_k, cfg.trunc_l)?;
            let sigma = sigma_stage(&eq, &cfg)?;
            let run = majorant_stage(&eq, sigma.sigma, &sol.psi, &cfg)?;
            let d = &run.report.dominance;
            emit(
                cli,
                "majorant.json",
                &MajorantCliReport {
                    sigma: sigma.sigma,
                    m_bound: run.report.m_bound.value,
                    tail_warning: run.report.m_bound.tail_warning,
                    radius: run.report.radius,
                    dominance: DominanceSummary {
                        ok: d.ok,
                        worst_margin: d.worst_margin,
                        first_violation: d.first_violation,
                    },
                },
            )?;
            Ok(if d.ok { 0 } else { 4 })
        }
        Command::Evaluate {
            input,
            theta_min,
            theta_max,
            radius,
            samples,
            plot,
            band,
        } => {
            let cfg = config(cli, Some(band), *samples)?;
            let loaded = load(input, cfg.backend, true)?;
            let phi = prepare(&loaded.f, loaded.phi.as_ref().expect("series loaded"), &cfg)?;
            let phi = phi.truncate(Trunc::At(cfg.trunc_k as i64), Trunc::Exact);
            let sector = match (theta_min, theta_max) {
                (Some(a), Some(b)) => SectorSpec::new(*a, *b, *radius)?,
                (None, None) => sector_for_band(phi.eta_f64(), band.tau, band.tau_prime, *radius)?,
                _ => return Err(Error::Config("give both --theta-min and --theta-max or neither".into())),
            };
            let mut rows = Vec::new();
            let mut verdicts = Vec::new();
            for x in sample_grid(&sector, *samples) {
                let d = point_diagnostic(&phi, x, Some(&loaded.f))?;
                rows.push(Row {
                    x_re: d.x[0],
                    x_im: d.x[1],
                    value_re: d.value[0],
                    value_im: d.value[1],
                    q: d.q,
                    residual: d.residual,
                });
                verdicts.push(d.verdict);
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
            }
            let table = String::from_utf8(w.into_inner().map_err(|e| Error::Internal(e.to_string()))?)
                .map_err(|e| Error::Internal(e.to_string()))?;
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("evaluate.csv"), table)?;
                }
                None => print!("{table}"),
            }
            if let Some(path) = plot {
                write_plot(path, &rows, &verdicts)?;
            }
            Ok(0)
        }
        Command::Pipeline { input, band, samples } => {
            let cfg = config(cli, Some(band), *samples)?;
            let loaded = load(input, cfg.backend, true)?;
            let mut outcome = run_pipeline(&loaded.f, loaded.phi.as_ref().expect("series loaded"), &cfg);
            outcome.report.inputs = loaded.labels.into_iter().collect();
            match &cli.out {
                Some(dir) => write_artifacts(dir, &mut outcome)?,
                None => print!("{}", to_json(&outcome.report)?),
            }
            if let Some(e) = &outcome.error {
                eprintln!("error: {e}");
            }
            Ok(outcome.exit_code())
        }
    }
}

fn staged(cli: &Cli, input: &Input, band: Option<&Band>) -> Result<(PipelineConfig, OdeExpression, ExoticSeries)> {
    let cfg = config(cli, band, 8)?;
    let loaded = load(input, cfg.backend, true)?;
    let phi = prepare(&loaded.f, loaded.phi.as_ref().expect("series loaded"), &cfg)?;
    Ok((cfg, loaded.f, phi))
}

fn write_plot(path: &Path, rows: &[Row], verdicts: &[Verdict]) -> Result<()> {
    let plot_err = |e: String| Error::Internal(format!("plot: {e}"));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        x0 = x0.min(r.x_re);
        x1 = x1.max(r.x_re);
        y0 = y0.min(r.x_im);
        y1 = y1.max(r.x_im);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let root = SVGBackend::new(path, (640, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("sample grid: blue convergent, red divergent, grey inconclusive", ("sans-serif", 16))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(50)
        .build_cartesian_2d(x0 - pad..x1 + pad, y0 - pad..y1 + pad)
        .map_err(|e| plot_err(e.to_string()))?;
    chart
        .configure_mesh()
        .x_desc("Re x")
        .y_desc("Im x")
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    chart
        .draw_series(rows.iter().zip(verdicts).map(|(r, v)| {
            let color = match v {
                Verdict::Convergent => BLUE,
                Verdict::Divergent => RED,
                Verdict::Inconclusive => RGBColor(128, 128, 128),
            };
            Circle::new((r.x_re, r.x_im), 4, color.filled())
        }))
        .map_err(|e| plot_err(e.to_string()))?;
    root.present().map_err(|e| plot_err(e.to_string()))?;
    Ok(())
}
