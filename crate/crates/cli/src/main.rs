use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sieve_bounds::constants::{constants_report, ConstantsReport, HEADLINE};
use sieve_bounds::empirical::{
    compare_with, count_representations_with, exception_scan, sieve_primes, Convention, CountReport,
    PrimeTable, ASYMPTOTIC_MIN_N,
};
use sieve_bounds::part1::{default_schedule, init_tables, run_schedule, BootstrapSpec, IterationError, ScheduleStep};
use sieve_bounds::part2::{default_double_sieve_schedule, run_double_sieve, DoubleSieveContext, DoubleSieveReport};
use sieve_bounds::reference::{self, DeviationReport, LEVEL_TABLE_U, TOLERANCE};
use sieve_bounds::table::{build_kgrid, emit_rows, table_rows, BoundTable, CsvRow, DEFAULT_U_MAX, DEFAULT_U_STEP};

/// Published upper constant for D(N), used by `verify` without a report.
const PRINTED_GOLDBACH_UPPER: f64 = 6.916;
/// Published lower constant for D12(N).
const PRINTED_D12_LOWER: f64 = 2.27;

#[derive(Parser, Debug)]
#[command(name = "sieve-bounds", version, about = "Iterated weighted sieve bounds and Goldbach-type constants")]
struct Cli {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for tables and checkpoints.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the parallel fills.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct IterationArgs {
    /// Spacing of the u samples.
    #[arg(long)]
    u_step: Option<f64>,
    /// Caps the number of sweeps of every phase (0 leaves the initial table).
    #[arg(long)]
    sweeps: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs the first round and writes table1.csv, table2.csv, table3.csv.
    Tables(IterationArgs),
    /// Runs the double-sieve round and writes table4.csv, table5.csv.
    DoubleSieve {
        #[command(flatten)]
        iter: IterationArgs,
        /// First-round checkpoint to start from instead of recomputing it.
        #[arg(long)]
        seed: Option<PathBuf>,
    },
    /// Prints the headline constants as JSON.
    Constants {
        #[command(flatten)]
        iter: IterationArgs,
        /// Read constants off the first-round table only.
        #[arg(long)]
        part1_only: bool,
        /// Checkpoint to read constants from.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Seed value e^{-γ}·2F(0,2) to use with --table; defaults to the
        /// table's own value at (0, 2).
        #[arg(long)]
        seed_value: Option<f64>,
    },
    /// Brute-force representation counts and the exception scan.
    Verify {
        /// Even numbers to count representations for.
        #[arg(long = "N", value_delimiter = ',', num_args = 1..)]
        n: Vec<u64>,
        /// Scan even numbers up to X for Goldbach exceptions.
        #[arg(long)]
        exceptions: Option<u64>,
        /// Include n = 2 in the exception scan.
        #[arg(long)]
        literal: bool,
        /// Count each unordered pair once.
        #[arg(long)]
        unordered: bool,
        /// Constants report (JSON) to compare ratios with.
        #[arg(long)]
        constants: Option<PathBuf>,
        /// Binary prime-table cache, read if present and written otherwise.
        #[arg(long)]
        prime_cache: Option<PathBuf>,
    },
}

/// Configuration file. Every field is optional.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    n: Option<usize>,
    u_step: Option<f64>,
    u_max: Option<f64>,
    sweeps: Option<u32>,
    bootstrap: Option<BootstrapSpec>,
    schedule: Option<Vec<ScheduleStep>>,
    double_sieve_schedule: Option<Vec<ScheduleStep>>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    #[serde(rename = "N")]
    n_values: Option<Vec<u64>>,
    exceptions: Option<u64>,
}

/// Error that maps to a specific exit status.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Exit>() {
        return e.code;
    }
    match err.downcast_ref::<IterationError>() {
        Some(IterationError::NonFinite { .. } | IterationError::Ordering { .. }) => 2,
        _ => 1,
    }
}

struct Settings {
    grid_n: usize,
    u_step: f64,
    u_max: f64,
    sweeps: Option<u32>,
    bootstrap: BootstrapSpec,
    schedule: Vec<ScheduleStep>,
    double_sieve_schedule: Vec<ScheduleStep>,
    out: PathBuf,
}

impl Settings {
    fn new(cfg: &RunConfig, cli_out: Option<PathBuf>, iter: &IterationArgs) -> Result<Self> {
        let u_step = iter.u_step.or(cfg.u_step).unwrap_or(DEFAULT_U_STEP);
        let u_max = cfg.u_max.unwrap_or(DEFAULT_U_MAX);
        if !(u_step > 0.0 && u_step <= 0.1) {
            return Err(anyhow!("u-step {u_step} must lie in (0, 0.1]"));
        }
        if !(u_max >= 5.5 && u_max <= 50.0) {
            return Err(anyhow!("u_max {u_max} must lie in [5.5, 50]"));
        }
        let grid_n = cfg.n.unwrap_or(16);
        if !(4..=64).contains(&grid_n) {
            return Err(anyhow!("n = {grid_n} must lie in 4..=64"));
        }
        Ok(Settings {
            grid_n,
            u_step,
            u_max,
            sweeps: iter.sweeps.or(cfg.sweeps),
            bootstrap: cfg.bootstrap.clone().unwrap_or_default(),
            schedule: cfg.schedule.clone().unwrap_or_else(default_schedule),
            double_sieve_schedule: cfg.double_sieve_schedule.clone().unwrap_or_else(default_double_sieve_schedule),
            out: cli_out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    fn capped(&self, steps: &[ScheduleStep]) -> Vec<ScheduleStep> {
        let mut steps = steps.to_vec();
        if let Some(cap) = self.sweeps {
            steps.iter_mut().for_each(|s| s.sweep_cycles = s.sweep_cycles.min(cap));
        }
        steps
    }

    fn bootstrap(&self) -> BootstrapSpec {
        let mut b = self.bootstrap.clone();
        if let Some(cap) = self.sweeps {
            b.later_sweeps = b.later_sweeps.min(cap);
        }
        b
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let Some(path) = path else { return Ok(RunConfig::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_checkpoint(path: &Path) -> Result<BoundTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    BoundTable::from_json(&text).with_context(|| format!("malformed checkpoint {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn zero_row_csv(t: &BoundTable, printed: &[reference::URow]) -> String {
    // Printed u-values need not be samples (1.702 is not), so interpolate.
    let Some(l) = t.grid.level_of(0.0) else { return emit_rows(&[]) };
    let rows: Vec<CsvRow> = reference::zero_row_u(printed)
        .into_iter()
        .filter_map(|u| {
            let w_lower = t.try_lower(l, u).ok()?;
            Some(CsvRow { u, k: 0.0, w_upper: t.try_upper(l, u).ok(), w_lower })
        })
        .collect();
    emit_rows(&rows)
}

#[derive(Serialize)]
struct DeviationSummary {
    table: u8,
    cells: usize,
    within: usize,
    fraction_within: f64,
}

impl From<&DeviationReport> for DeviationSummary {
    fn from(r: &DeviationReport) -> Self {
        DeviationSummary { table: r.table, cells: r.cells, within: r.within, fraction_within: r.fraction_within() }
    }
}

/// First round: α = 2 phase plus bootstrap.
fn first_round(s: &Settings) -> Result<(BoundTable, BoundTable)> {
    let t0 = init_tables(build_kgrid(2.0, s.grid_n), s.u_step, s.u_max);
    let outcome = run_schedule(t0, &s.capped(&s.schedule), &s.bootstrap())?;
    for p in &outcome.phases {
        eprintln!("phase α = {}: {} sweeps, last change {:.3e}", p.alpha, p.sweeps, p.last_sweep_change);
    }
    Ok((outcome.first_phase, outcome.final_table))
}

fn double_sieve(s: &Settings, seed: BoundTable) -> Result<(DoubleSieveContext, DoubleSieveReport)> {
    let mut ctx = DoubleSieveContext::new(seed)?;
    if ctx.seed_deviation() > TOLERANCE {
        eprintln!(
            "seed value {:.6} differs from the published {:.6} by {:.3e}",
            ctx.seed_value,
            sieve_bounds::part2::REFERENCE_SEED_VALUE,
            ctx.seed_deviation()
        );
    }
    let report = run_double_sieve(&mut ctx, &s.capped(&s.double_sieve_schedule))?;
    eprintln!("double sieve: {} sweeps, last change {:.3e}", report.sweeps, report.last_sweep_change);
    Ok((ctx, report))
}

fn cmd_tables(s: &Settings) -> Result<()> {
    std::fs::create_dir_all(&s.out)?;
    let (first, last) = first_round(s)?;
    write(&s.path("table1.csv"), &emit_rows(&table_rows(&first, Some(&LEVEL_TABLE_U))))?;
    write(&s.path("table2.csv"), &emit_rows(&table_rows(&last, Some(&LEVEL_TABLE_U))))?;
    write(&s.path("table3.csv"), &zero_row_csv(&last, &reference::TABLE3))?;
    write(&s.path("part1.json"), &last.to_json())?;
    let reports = [
        reference::compare_levels(1, &reference::TABLE1, &first, TOLERANCE),
        reference::compare_levels(2, &reference::TABLE2, &last, TOLERANCE),
        reference::compare_zero_row(3, &reference::TABLE3, &last, TOLERANCE),
    ];
    write(&s.path("tables_deviation.json"), &serde_json::to_string_pretty(&reports)?)?;
    for r in &reports {
        print_json(&DeviationSummary::from(r))?;
    }
    Ok(())
}

fn cmd_double_sieve(s: &Settings, seed: Option<&Path>) -> Result<()> {
    std::fs::create_dir_all(&s.out)?;
    let seed = match seed {
        Some(p) => read_checkpoint(p)?,
        None => first_round(s)?.1,
    };
    let (ctx, report) = double_sieve(s, seed)?;
    let t = &ctx.working;
    write(&s.path("table4.csv"), &emit_rows(&table_rows(t, Some(&LEVEL_TABLE_U))))?;
    write(&s.path("table5.csv"), &zero_row_csv(t, &reference::TABLE5))?;
    write(&s.path("double_sieve.json"), &t.to_json())?;
    let reports = [
        reference::compare_levels(4, &reference::TABLE4, t, TOLERANCE),
        reference::compare_zero_row(5, &reference::TABLE5, t, TOLERANCE),
    ];
    write(&s.path("double_sieve_deviation.json"), &serde_json::to_string_pretty(&reports)?)?;
    print_json(&report)?;
    for r in &reports {
        print_json(&DeviationSummary::from(r))?;
    }
    Ok(())
}

fn table_seed_value(t: &BoundTable) -> Result<f64> {
    let i = t.index_of(2.0).ok_or_else(|| anyhow!("table has no sample at u = 2"))?;
    Ok(t.w_upper[0][i])
}

fn cmd_constants(s: &Settings, part1_only: bool, table: Option<&Path>, seed_value: Option<f64>) -> Result<()> {
    let (t, seed) = match table {
        Some(p) => {
            let t = read_checkpoint(p)?;
            let c = match seed_value {
                Some(c) => c,
                None => table_seed_value(&t)?,
            };
            (t, c)
        }
        None => {
            let first = first_round(s)?.1;
            if part1_only {
                let c = table_seed_value(&first)?;
                (first, c)
            } else {
                let (ctx, _) = double_sieve(s, first)?;
                (ctx.working, ctx.seed_value)
            }
        }
    };
    let report: ConstantsReport = constants_report(&t, seed)?;
    print_json(&report)?;
    let violations = report.invariant_violations();
    for v in &violations {
        eprintln!("invariant: {v}");
    }
    let failed = report.failed_checks(&HEADLINE);
    if !failed.is_empty() {
        return Err(Exit { code: 3, message: format!("headline checks failed: {}", failed.join(", ")) }.into());
    }
    if !violations.is_empty() {
        return Err(Exit { code: 2, message: violations.join("; ") }.into());
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyLine {
    #[serde(flatten)]
    counts: CountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<sieve_bounds::empirical::BoundVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    notice: Option<String>,
}

#[derive(Serialize)]
struct ExceptionLine {
    exceptions_up_to: u64,
    literal: bool,
    exceptions: Vec<u64>,
}

fn comparison_constants(path: Option<&Path>) -> Result<(f64, f64)> {
    let Some(path) = path else { return Ok((PRINTED_GOLDBACH_UPPER, PRINTED_D12_LOWER)) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let get = |key: &str| v.get(key).and_then(|x| x.as_f64()).ok_or_else(|| anyhow!("{} has no number {key}", path.display()));
    Ok((get("goldbach_upper")?, get("d12_lower")?))
}

fn prime_table(limit: u64, cache: Option<&Path>) -> Result<PrimeTable> {
    if let Some(path) = cache {
        if path.exists() {
            let t = PrimeTable::load(path)?;
            if t.limit >= limit {
                return Ok(t);
            }
        }
    }
    let t = sieve_primes(limit.max(2))?;
    if let Some(path) = cache {
        t.save(path)?;
    }
    Ok(t)
}

fn cmd_verify(
    ns: &[u64],
    exceptions: Option<u64>,
    literal: bool,
    unordered: bool,
    constants: Option<&Path>,
    cache: Option<&Path>,
) -> Result<()> {
    if ns.is_empty() && exceptions.is_none() {
        return Err(anyhow!("verify needs --N or --exceptions"));
    }
    let (gu, d12) = comparison_constants(constants)?;
    let limit = ns.iter().copied().chain(exceptions).max().unwrap_or(2);
    let primes = prime_table(limit, cache)?;
    let convention = if unordered { Convention::Unordered } else { Convention::Ordered };
    for &n in ns {
        let counts = count_representations_with(n, &primes, convention)?;
        let line = if n < ASYMPTOTIC_MIN_N {
            let notice = format!("ratios not compared: N below {ASYMPTOTIC_MIN_N}");
            eprintln!("N = {n}: {notice}");
            VerifyLine { counts, bounds: None, notice: Some(notice) }
        } else {
            VerifyLine { bounds: Some(compare_with(&counts, gu, d12)?), counts, notice: None }
        };
        print_json(&line)?;
    }
    if let Some(x) = exceptions {
        print_json(&ExceptionLine { exceptions_up_to: x, literal, exceptions: exception_scan(x, &primes, literal)? })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    if let Some(k) = cli.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Tables(iter) => cmd_tables(&Settings::new(&cfg, cli.out, &iter)?),
        Command::DoubleSieve { iter, seed } => cmd_double_sieve(&Settings::new(&cfg, cli.out, &iter)?, seed.as_deref()),
        Command::Constants { iter, part1_only, table, seed_value } => {
            cmd_constants(&Settings::new(&cfg, cli.out, &iter)?, part1_only, table.as_deref(), seed_value)
        }
        Command::Verify { n, exceptions, literal, unordered, constants, prime_cache } => {
            let ns = if n.is_empty() { cfg.n_values.clone().unwrap_or_default() } else { n };
            cmd_verify(&ns, exceptions.or(cfg.exceptions), literal, unordered, constants.as_deref(), prime_cache.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
