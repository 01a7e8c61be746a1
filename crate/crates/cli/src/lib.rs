//! `exchange` command-line front end: market files in, JSON reports out.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 residual failure,
//! 3 parse error, 4 validation error.

pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{cmd_generate, cmd_ratio, cmd_reproduce, cmd_solve, cmd_verify, cmd_witness, Family, RatioArgs, Suite};
pub use report::{Check, CheckClass, CliError, RunReport, EXIT_PARSE, EXIT_PASS, EXIT_RESIDUAL, EXIT_VALIDATION, EXIT_VERIFICATION};

#[derive(Debug, Parser)]
#[command(name = "exchange", version, about = "Exchange-economy equilibria and incentive ratios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a market file for its equilibria.
    Solve {
        market: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Lattice resolution for the Leontief and linear searches.
        #[arg(long, default_value_t = 11)]
        grid: usize,
    },
    /// Incentive ratio of one agent in a Cobb-Douglas market.
    Ratio {
        market: PathBuf,
        /// 1-based agent index.
        #[arg(long, default_value_t = 1)]
        agent: usize,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        refine: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed report instead of a search, e.g. `0.85,0.1,0.05`.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "truthful")]
        deviation: Option<Vec<f64>>,
        /// Evaluate the truthful report (ratio 1).
        #[arg(long)]
        truthful: bool,
    },
    /// Markets whose ratio diverges as the parameter shrinks.
    Witness {
        family: FamilyArg,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Leontief only; defaults to epsilon.
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated epsilons; overrides --epsilon.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sweep: Option<Vec<f64>>,
        /// Emit sweep rows as CSV instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Randomized verification suites.
    Verify {
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides each suite's default sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Optimizer lattice resolution for the bounds suite.
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Re-run the reference market and witness values.
    Reproduce,
    /// Print a random Cobb-Douglas market file.
    Generate {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        commodities: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        concentration: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Linear,
    Leontief,
    #[value(name = "cobb_douglas", alias = "cobb-douglas")]
    CobbDouglas,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Linear => Family::Linear,
            FamilyArg::Leontief => Family::Leontief,
            FamilyArg::CobbDouglas => Family::CobbDouglas,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Bounds,
    Budget,
    Oracle,
    Power,
    Facts,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::Budget => Suite::Budget,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Power => Suite::Power,
            SuiteArg::Facts => Suite::Facts,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn report(r: RunReport) -> Self {
        let stderr = r
            .failing()
            .map(|c| format!("FAIL {}: {} ({} {} ± {})\n", c.name, c.value, c.relation, c.target, c.tolerance))
            .collect();
        Output {
            code: r.exit_code,
            stdout: r.to_json() + "\n",
            stderr,
        }
    }

    fn error(e: CliError) -> Self {
        let doc = serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() });
        Output {
            code: e.exit_code(),
            stdout: serde_json::to_string_pretty(&doc).expect("serializes") + "\n",
            stderr: format!("{e}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.command {
        Command::Solve { market, tol, grid } => cmd_solve(&market, tol, grid).map(Output::report),
        Command::Ratio { market, agent, grid, refine, seed, deviation, truthful } => {
            let args = RatioArgs { agent, grid, refine, seed, deviation, truthful };
            cmd_ratio(&market, &args).map(Output::report)
        }
        Command::Witness { family, epsilon, delta, sweep, csv } => {
            let eps = sweep.unwrap_or_else(|| vec![epsilon]);
            cmd_witness(family.into(), &eps, delta).map(|w| {
                if csv {
                    Output {
                        code: w.report.exit_code,
                        stdout: commands::witness_csv(&w.rows),
                        stderr: String::new(),
                    }
                } else {
                    Output::report(w.report)
                }
            })
        }
        Command::Verify { suite, seed, samples, grid } => cmd_verify(suite.into(), seed, samples, grid).map(Output::report),
        Command::Reproduce => cmd_reproduce().map(Output::report),
        Command::Generate { agents, commodities, seed, concentration } => {
            cmd_generate(agents, commodities, seed, concentration).map(|text| Output {
                code: EXIT_PASS,
                stdout: text,
                stderr: String::new(),
            })
        }
    };
    result.unwrap_or_else(Output::error)
}
