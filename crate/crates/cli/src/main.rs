use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slocc::canonical::{acin_form_seeded, antisym_canonical, pair_matrix, schmidt, takagi};
use slocc::critical::{alpha_star_eigenspaces, record_from_terminal, ScanConfig};
use slocc::flow::flow_to_critical;
use slocc::statespace::StateDocument;
use slocc::{Error, FlowConfig, FlowTrace, PureState, Sector, SectorKind, SpectrumPoint};

mod demo;
mod report;

use demo::Demo;
use report::{ConfigEcho, FlowSummary, InputDescriptor, Report};

const EXIT_INPUT: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "slocc",
    version,
    about = "Classify SLOCC families of pure states by gradient flow of the momentum map"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Gradient-norm tolerance of the flow
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Flow step size (default 0.05; 0.1 for the four-qubit families)
    #[arg(long, global = true)]
    step: Option<f64>,

    #[arg(long = "max-iter", global = true, default_value_t = 200_000)]
    max_iter: usize,

    /// Seed for restart-based searches
    #[arg(long, global = true, default_value_t = 0xc0ffee)]
    seed: u64,

    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Flow a state to its critical orbit and report the family invariants
    Classify {
        path: PathBuf,
        /// Also write the terminal state as state JSON
        #[arg(long)]
        save_terminal: Option<PathBuf>,
    },
    /// Emit the flow trace as JSON lines
    Flow {
        path: PathBuf,
        #[arg(long)]
        save_terminal: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        record_every: usize,
    },
    /// Run a worked example: bipartite N | three-qubit | four-qubit-families |
    /// bosons N [L] | fermions N | dicke L
    Demo { name: String, args: Vec<String> },
    /// Eigenspaces of α* for a qubit spectrum point, one λ per party (fractions allowed)
    Eigenspaces {
        #[arg(long, default_value = "distinguishable")]
        sector: String,
        #[arg(long)]
        parties: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<String>,
    },
    /// Canonical form of a two-particle or three-qubit state
    NormalForm { path: PathBuf },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    NotConverged(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<demo::UnknownDemo> for CliError {
    fn from(e: demo::UnknownDemo) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(CliError::NotConverged(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONVERGENCE)
        }
    }
}

fn flow_config(cli: &Cli, default_step: f64, record_every: usize) -> Result<FlowConfig, CliError> {
    let cfg = FlowConfig {
        step_size: cli.step.unwrap_or(default_step),
        tolerance: cli.tol,
        max_iterations: cli.max_iter,
        record_every,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn scan_config(cli: &Cli) -> ScanConfig {
    ScanConfig { seed: cli.seed, ..ScanConfig::default() }
}

fn load_state(path: &Path) -> Result<PureState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(StateDocument::from_json(&text)?)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn save_terminal(path: Option<&PathBuf>, trace: &FlowTrace) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, StateDocument::to_json(&trace.terminal) + "\n")?;
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(header).expect("in-memory write");
    for r in rows {
        wr.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(wr.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Classify { path, save_terminal: save } => {
            let state = load_state(path)?;
            let cfg = flow_config(cli, 0.05, 10)?;
            let trace = flow_to_critical(&state, &cfg)?;
            save_terminal(save.as_ref(), &trace)?;
            let report = Report {
                input: InputDescriptor::new(&path.display().to_string(), &state),
                record: record_from_terminal(&state, &trace.terminal)?,
                flow: FlowSummary::from_trace(&trace),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: ConfigEcho { flow: cfg, seed: cli.seed },
            };
            let text = match cli.format {
                Format::Csv => csv_text(&Report::csv_header(), [report.csv_row()]),
                _ => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            };
            emit(cli, &text)
        }
        Command::Flow { path, save_terminal: save, record_every } => {
            let state = load_state(path)?;
            let cfg = flow_config(cli, 0.05, *record_every)?;
            let (trace, failure) = match flow_to_critical(&state, &cfg) {
                Ok(t) => (t, None),
                Err(Error::NotConverged { iterations, grad_norm, trace }) => {
                    let msg =
                        format!("flow did not converge after {iterations} iterations (gradient norm {grad_norm:e})");
                    (*trace, Some(CliError::NotConverged(msg)))
                }
                Err(e) => return Err(e.into()),
            };
            if trace.max_increase() > 1e-12 {
                eprintln!("warning: ‖μ‖² increased by {:e}; the step size is too large", trace.max_increase());
            }
            save_terminal(save.as_ref(), &trace)?;
            emit(cli, &trace.to_json_lines())?;
            failure.map_or(Ok(()), Err)
        }
        Command::Demo { name, args } => {
            let demo = Demo::parse(name, args)?;
            let default_step = if demo == Demo::FourQubitFamilies { 0.1 } else { 0.05 };
            let table = demo::run(demo, &flow_config(cli, default_step, 10)?, &scan_config(cli))?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&table).expect("table serializes") + "\n",
                Format::Csv => table.to_csv(),
                Format::Text => table.to_text(),
            };
            if !table.all_pass() {
                let n = table.rows.iter().filter(|r| !r.pass).count();
                eprintln!("note: {n} rows differ from the expected values");
            }
            emit(cli, &text)
        }
        Command::Eigenspaces { sector, parties, lambda } => {
            let kind: SectorKind = serde_json::from_value(serde_json::Value::String(sector.clone()))
                .map_err(|_| CliError::Input(format!("unknown sector kind {sector:?}")))?;
            let sector = Sector::new(kind, *parties, 2)?;
            let lambdas = lambda.iter().map(|s| parse_fraction(s)).collect::<Result<Vec<_>, _>>()?;
            let spaces = alpha_star_eigenspaces(&SpectrumPoint::qubit(sector, &lambdas)?)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(
                    &spaces
                        .iter()
                        .map(|r| serde_json::json!({"eigenvalue": r.eigenvalue, "multiplicity": r.multiplicity, "basis": r.labels()}))
                        .collect::<Vec<_>>(),
                )
                .expect("table serializes")
                    + "\n",
                _ => csv_text(
                    &["eigenvalue", "multiplicity", "basis"],
                    spaces.iter().map(|r| {
                        let labels: Vec<String> =
                            r.labels().iter().map(|l| l.iter().map(|d| d.to_string()).collect::<String>()).collect();
                        vec![r.eigenvalue.to_string(), r.multiplicity.to_string(), labels.join(" ")]
                    }),
                ),
            };
            emit(cli, &text)
        }
        Command::NormalForm { path } => {
            let state = load_state(path)?;
            let s = state.sector();
            let value = match (s.kind, s.parties) {
                (SectorKind::Distinguishable, 2) => serde_json::to_value(schmidt(&state)?),
                (SectorKind::Bosonic, 2) => serde_json::to_value(takagi(&pair_matrix(&state)?)?),
                (SectorKind::Fermionic, 2) => serde_json::to_value(antisym_canonical(&pair_matrix(&state)?)?),
                (SectorKind::Distinguishable, 3) if s.local_dim == 2 => {
                    serde_json::to_value(acin_form_seeded(&state, cli.seed)?)
                }
                _ => return Err(CliError::Input("normal forms cover two particles or three qubits".into())),
            }
            .expect("form serializes");
            emit(cli, &(serde_json::to_string_pretty(&value).expect("json") + "\n"))
        }
    }
}

fn parse_fraction(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Input(format!("cannot parse {s:?} as a number or fraction"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(parse_fraction("1/6").unwrap(), 1.0 / 6.0);
        assert_eq!(parse_fraction("0.25").unwrap(), 0.25);
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
