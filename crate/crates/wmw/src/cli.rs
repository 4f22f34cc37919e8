//! Argument parsing and the three subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::ThreadPool;
use wmw_core::{run_tests, DfKind};

use crate::config::{default_battery, load_scenarios, parse_df, parse_test_list};
use crate::error::CliError;
use crate::input::read_two_samples;
use crate::report::{simulation_table, test_table, Format, Table};
use crate::runner::{build_pool, permutation_tests, run_scenario};
use crate::tables::plan;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "wmw", version, about = "Rank-based two-sample tests for the Mann-Whitney effect")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run tests on a group/value CSV file.
    Test {
        data: PathBuf,
        /// Comma-separated list, e.g. `wmw,bm,pm_logit` or `pm(df1)`.
        #[arg(long)]
        tests: Option<String>,
        #[arg(long, default_value = "df2")]
        df: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Also run studentized permutation tests with this many draws.
        #[arg(long)]
        n_perm: Option<u64>,
    },
    /// Run the scenarios of a TOML file.
    Simulate { config: PathBuf },
    /// Reproduce one of the simulation tables.
    Tables {
        /// t1, t2, perm1, perm2, app_var or power_p07.
        id: String,
        /// Fraction of the original replication counts, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        n_perm: Option<u64>,
    },
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let pool = build_pool(cli.common.threads)?;
    let table = match &cli.command {
        Command::Test {
            data,
            tests,
            df,
            alpha,
            n_perm,
        } => cmd_test(data, tests.as_deref(), df, *alpha, *n_perm, cli.common.seed, &pool)?,
        Command::Simulate { config } => cmd_simulate(config, cli.common.seed, &pool)?,
        Command::Tables { id, scale, n_perm } => plan(id, *scale, cli.common.seed, *n_perm)?.run(&pool)?,
    };
    emit(&table, cli.common.format, cli.common.output.as_ref())
}

fn emit(table: &Table, format: Format, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

pub fn cmd_test(
    data: &std::path::Path,
    tests: Option<&str>,
    df: &str,
    alpha: f64,
    n_perm: Option<u64>,
    seed: u64,
    pool: &ThreadPool,
) -> Result<Table, CliError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")));
    }
    let df: DfKind = parse_df(df)?;
    let kinds = match tests {
        Some(list) => parse_test_list(list, df)?,
        None => default_battery(df),
    };
    if kinds.is_empty() {
        return Err(CliError::Usage("--tests names no test".into()));
    }
    let samples = read_two_samples(data)?;
    let results = run_tests(&samples, &kinds)?;
    let perm = match n_perm {
        Some(n) => {
            let perm_kinds: Vec<_> = kinds.iter().copied().filter(|k| *k != wmw_core::TestKind::Wmw).collect();
            if perm_kinds.is_empty() {
                Some(Vec::new())
            } else {
                Some(permutation_tests(&samples, &perm_kinds, n, seed, pool)?)
            }
        }
        None => None,
    };
    Ok(test_table(&results, alpha, perm.as_deref()))
}

pub fn cmd_simulate(config: &std::path::Path, seed: u64, pool: &ThreadPool) -> Result<Table, CliError> {
    let scenarios = load_scenarios(config, seed)?;
    let summaries = scenarios
        .iter()
        .map(|sc| run_scenario(sc, pool))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(simulation_table(&summaries))
}
