mod args;
mod output;
mod source;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qgraph_core::export::{self, fmt_g17};
use qgraph_core::walks::hitting_time_series;
use qgraph_core::{
    assemble_bond_system, coefficients_via_power_iteration, detect_peaks_with_floor,
    graph_amplitudes, sweep_transmission, sweep_with_resolution, taylor_coefficients,
    walk_stats_by_quadrature, Error,
};

use args::{Cli, Command, Format, HittingMethod, WalkMethod};

const THREADS_ENV: &str = "QGRAPH_THREADS";
const DEFAULT_SAMPLES: usize = 2001;

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("{THREADS_ENV}: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Transmit(a) => {
            let graph = source::load(&a.graph)?;
            if !(a.kl.is_finite() && a.kl > 0.0) {
                return Err(CliError::usage(format!("--kl must be positive, got {}", a.kl)));
            }
            let s = assemble_bond_system(&graph)?.scatter_with_limit(a.kl)?;
            let text = match a.output.format(Format::Csv) {
                Format::Csv => format!(
                    "{}\n{},{},{},{},{}\n",
                    export::SWEEP_CSV_HEADER,
                    fmt_g17(s.kl),
                    fmt_g17(s.t.re),
                    fmt_g17(s.t.im),
                    fmt_g17(s.transmission()),
                    fmt_g17(s.reflection())
                ),
                Format::Json => format!(
                    "{{\"kl\":{},\"re_t\":{},\"im_t\":{},\"re_r\":{},\"im_r\":{},\"t2\":{},\"r2\":{}}}\n",
                    fmt_g17(s.kl),
                    fmt_g17(s.t.re),
                    fmt_g17(s.t.im),
                    fmt_g17(s.r.re),
                    fmt_g17(s.r.im),
                    fmt_g17(s.transmission()),
                    fmt_g17(s.reflection())
                ),
            };
            output::emit(a.output.out.as_deref(), &text)?;
        }
        Command::Sweep(a) => {
            let graph = source::load(&a.graph)?;
            let sweep = match (a.samples, a.resolution) {
                (_, Some(res)) => sweep_with_resolution(&graph, a.kl_min, a.kl_max, res)?,
                (samples, None) => {
                    sweep_transmission(&graph, a.kl_min, a.kl_max, samples.unwrap_or(DEFAULT_SAMPLES))?
                }
            };
            let text = match a.output.format(Format::Csv) {
                Format::Csv => export::sweep_csv(&sweep),
                Format::Json => export::sweep_json(&sweep),
            };
            output::emit(a.output.out.as_deref(), &text)?;
        }
        Command::Walk(a) => {
            let graph = source::load(&a.graph)?;
            let series = match a.method {
                WalkMethod::Recurrence => taylor_coefficients(&graph_amplitudes(&graph)?.0, a.order)?,
                WalkMethod::Power => coefficients_via_power_iteration(&graph, a.order)?,
            };
            let text = match a.output.format(Format::Csv) {
                Format::Csv => export::walk_csv(&series),
                Format::Json => export::walk_json(&series),
            };
            output::emit(a.output.out.as_deref(), &text)?;
        }
        Command::Hitting(a) => {
            let graph = source::load(&a.graph)?;
            if !(a.tolerance.is_finite() && a.tolerance > 0.0) {
                return Err(CliError::usage(format!(
                    "--tolerance must be positive, got {}",
                    a.tolerance
                )));
            }
            let (t, _) = graph_amplitudes(&graph)?;
            let (stats, order) = match a.method {
                HittingMethod::Series => {
                    let (series, stats) = hitting_time_series(&t, a.tolerance)?;
                    (stats, Some(series.order()))
                }
                HittingMethod::Quadrature => (walk_stats_by_quadrature(&t)?, None),
            };
            let text = match a.output.format(Format::Csv) {
                Format::Csv => format!(
                    "p_out,hitting_time,order\n{},{},{}\n",
                    fmt_g17(stats.p_out),
                    fmt_g17(stats.hitting_time),
                    order.map(|m| m.to_string()).unwrap_or_default()
                ),
                Format::Json => format!(
                    "{{\"p_out\":{},\"hitting_time\":{},\"order\":{}}}\n",
                    fmt_g17(stats.p_out),
                    fmt_g17(stats.hitting_time),
                    order.map(|m| m.to_string()).unwrap_or_else(|| "null".into())
                ),
            };
            output::emit(a.output.out.as_deref(), &text)?;
        }
        Command::Peaks(a) => {
            let graph = source::load(&a.graph)?;
            if !(a.floor > 0.0 && a.floor < 1.0) {
                return Err(CliError::usage(format!("--floor must lie in (0, 1), got {}", a.floor)));
            }
            let sweep = sweep_with_resolution(&graph, a.kl_min, a.kl_max, a.resolution)?;
            let peaks = detect_peaks_with_floor(&sweep, a.floor, a.min_height)?;
            let text = match a.output.format(Format::Json) {
                Format::Csv => export::peaks_csv(&peaks),
                Format::Json => export::peaks_json(&peaks),
            };
            output::emit(a.output.out.as_deref(), &text)?;
        }
        Command::Validate(a) => {
            let graph = source::load(&a.graph)?;
            let report = graph.validate();
            if report.is_valid() {
                println!(
                    "valid: {} vertices, {} edges, {} leads",
                    graph.vertices().len(),
                    graph.edges().len(),
                    graph.leads().len()
                );
            } else {
                for v in &report.violations {
                    println!("invalid: {v}");
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
