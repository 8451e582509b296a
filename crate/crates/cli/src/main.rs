use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hierarchy_solver::certify::{certify_trace, report_json};
use hierarchy_solver::config::{CaseName, EngineConfig, ExperimentConfig, Format, GridConfig, Problem};
use hierarchy_solver::solve::run;
use hierarchy_solver::sweep::{parse_sweep, sweep};
use hierarchy_solver::trace::Trace;
use hierarchy_solver::wells::{oracle_out, squarewell_table, two_level_out};

const EXIT_IO: u8 = 4;
const EXIT_CONFIG: u8 = 5;

#[derive(Parser)]
#[command(name = "hierarchy-solver", version, about = "Ground-state energies with certified bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the iteration and write a trace.
    Solve(RunArgs),
    /// Re-check the orderings in a trace and write a JSON report.
    Certify {
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare square-well energies from the root solve, engine, oracle and two-level model.
    Squarewell(RunArgs),
    /// Eigenvalues of the two-level model.
    Twolevel {
        #[arg(long)]
        e_inf: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu_sq: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Finite-difference reference energy.
    Oracle(RunArgs),
    /// Run a parameter sweep from a config file.
    Sweep {
        config: PathBuf,
        /// Output directory for traces and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Harmonic,
    SymQuartic,
    AsymQuartic,
    Squarewell,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "sym-quartic")]
    problem: Kind,
    #[arg(long, default_value_t = 2.0)]
    g: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Square-well depth parameter.
    #[arg(long, default_value_t = 10.0)]
    w: f64,
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = CaseName::A)]
    case: CaseName,
    #[arg(long, default_value_t = 400.0)]
    grid_density: f64,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long, default_value_t = EngineConfig::default().max_iter)]
    max_iter: usize,
    #[arg(long)]
    tol_e: Option<f64>,
    #[arg(long, default_value_t = EngineConfig::default().tol_f)]
    tol_f: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl RunArgs {
    fn config(&self, default_kind: Option<Kind>) -> ExperimentConfig {
        let kind = default_kind.unwrap_or(self.problem);
        let problem = match kind {
            Kind::Harmonic => Problem::Harmonic { g: self.g },
            Kind::SymQuartic => Problem::SymQuartic { g: self.g },
            Kind::AsymQuartic => Problem::AsymQuartic { g: self.g, lambda: self.lambda },
            Kind::Squarewell => Problem::Squarewell { w: self.w, mu: self.mu, alpha: self.alpha, beta: self.beta },
        };
        ExperimentConfig {
            problem,
            case: self.case,
            grid: GridConfig { density: self.grid_density, x_max: self.x_max },
            engine: EngineConfig { max_iter: self.max_iter, tol_e: self.tol_e, tol_f: self.tol_f },
            format: self.format,
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), ExitCode> {
    let res = match out {
        Some(p) => std::fs::write(p, body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    };
    res.map_err(|e| {
        eprintln!("error: cannot write output: {e}");
        ExitCode::from(EXIT_IO)
    })
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Solve(a) => {
            let cfg = a.config(None);
            match run(&cfg) {
                Ok(o) => {
                    if let Err(c) = emit(&a.out, &o.trace.render(cfg.format)) {
                        return c;
                    }
                    if o.status.exit_code() != 0 {
                        eprintln!("{}: {}", cfg.problem.label(), o.status.name());
                    }
                    ExitCode::from(o.status.exit_code() as u8)
                }
                Err(e) => fail(e.exit_code() as u8, e),
            }
        }
        Cmd::Certify { trace, out } => {
            let text = match std::fs::read_to_string(&trace) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_IO, format!("cannot read {}: {e}", trace.display())),
            };
            let t = match Trace::parse(&text) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_IO, e),
            };
            let report = certify_trace(&t);
            let mut body = serde_json::to_string_pretty(&report_json(&t, &report)).expect("report serializes");
            body.push('\n');
            if let Err(c) = emit(&out, &body) {
                return c;
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for f in report.failures() {
                    eprintln!("fail: {} at ({}, {}), margin {:e}", f.label, f.n, f.m, f.margin);
                }
                ExitCode::from(1)
            }
        }
        Cmd::Squarewell(a) => {
            let cfg = a.config(Some(Kind::Squarewell));
            match squarewell_table(&cfg) {
                Ok(t) => emit(&a.out, &t.render(cfg.format)).err().unwrap_or(ExitCode::SUCCESS),
                Err(e) => fail(e.exit_code() as u8, e),
            }
        }
        Cmd::Twolevel { e_inf, lambda, mu_sq, out, format } => {
            let cfg = ExperimentConfig {
                problem: Problem::TwoLevel { e_inf, lambda, mu_sq },
                case: CaseName::A,
                grid: GridConfig::default(),
                engine: EngineConfig::default(),
                format,
            };
            if let Err(e) = cfg.validate() {
                return fail(EXIT_CONFIG, e);
            }
            let body = two_level_out(e_inf, lambda, mu_sq).render(format, &cfg.hash());
            emit(&out, &body).err().unwrap_or(ExitCode::SUCCESS)
        }
        Cmd::Oracle(a) => {
            let cfg = a.config(None);
            match oracle_out(&cfg) {
                Ok(o) => emit(&a.out, &o.render(cfg.format)).err().unwrap_or(ExitCode::SUCCESS),
                Err(e) => fail(e.exit_code() as u8, e),
            }
        }
        Cmd::Sweep { config, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_IO, format!("cannot read {}: {e}", config.display())),
            };
            let s = match parse_sweep(&text) {
                Ok(s) => s,
                Err(e) => return fail(e.exit_code() as u8, e),
            };
            match sweep(&s, &out) {
                Ok(m) if m.failed() => {
                    for p in m.points.iter().filter(|p| p.exit_code != 0) {
                        eprintln!("point {} ({} = {}): {}", p.index, s.parameter, p.value, p.status);
                    }
                    ExitCode::from(1)
                }
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => fail(e.exit_code() as u8, e),
            }
        }
    }
}
