//! Command-line front end. `run_cli` returns the process exit code:
//! 0 landed, 1 error, 2 collided, 3 postponed, 4 timed out.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::batch::{baseline, run_batch, run_pair};
use crate::engine::{run, RunResult, SimParams, Terminal};
use crate::metrics::{delays, pair_row, BatchTable};
use crate::report::{report_csv, write_plot_data, write_report, ReportFormat};
use crate::scenario::{apply_overrides, default_pack, parse_scenario_file, Scenario, ScenarioErrors};

pub const EXIT_LANDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_COLLIDED: i32 = 2;
pub const EXIT_POSTPONED: i32 = 3;
pub const EXIT_TIMED_OUT: i32 = 4;

pub const PACK_DIR_ENV: &str = "UAMCAS_PACK_DIR";

#[derive(Debug, Parser)]
#[command(name = "uamcas", version, about = "Fast-time UAM collision avoidance simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        /// Also run without CAS and report both.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a pack with and without CAS.
    Batch {
        /// `default` or a directory of .scn files.
        #[arg(long, default_value = "default")]
        pack: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Write the built-in pack as scenario files.
    Pack {
        #[arg(long, default_value = "pack")]
        out: PathBuf,
    },
    /// Parse and check a scenario file without running it.
    Validate { scenario: PathBuf },
}

#[derive(Debug, Args)]
pub struct RunOpts {
    /// Time step, s.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub format: ReportFormat,
    /// File of `SET key value` lines applied to every scenario.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn print_errors(path: &Path, errs: &ScenarioErrors) {
    for e in &errs.0 {
        if e.line == 0 {
            eprintln!("{}: {}", path.display(), e.message);
        } else {
            eprintln!("{}:{}: {}", path.display(), e.line, e.message);
        }
    }
}

/// File-name-safe form of a scenario id.
fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn load(path: &Path, config: Option<&Path>) -> Result<Scenario, i32> {
    let mut sc = parse_scenario_file(path).map_err(|e| {
        print_errors(path, &e);
        EXIT_ERROR
    })?;
    if let Some(c) = config {
        let text = fs::read_to_string(c).map_err(|e| {
            eprintln!("{}: {e}", c.display());
            EXIT_ERROR
        })?;
        apply_overrides(&mut sc, &text).map_err(|e| {
            print_errors(c, &e);
            EXIT_ERROR
        })?;
    }
    sc.validate().map_err(|errs| {
        for e in errs {
            eprintln!("{}: {e}", path.display());
        }
        EXIT_ERROR
    })?;
    Ok(sc)
}

fn terminal_code(t: &Terminal) -> i32 {
    match t {
        Terminal::LandedAt(_) => EXIT_LANDED,
        Terminal::Collided => EXIT_COLLIDED,
        Terminal::PostponedOnGround => EXIT_POSTPONED,
        Terminal::TimedOut => EXIT_TIMED_OUT,
    }
}

fn write_trace(result: &RunResult, path: &Path) -> std::io::Result<()> {
    result.write_trace(fs::File::create(path)?)
}

fn io_fail(e: std::io::Error) -> i32 {
    eprintln!("write failed: {e}");
    EXIT_ERROR
}

fn cmd_run(path: &Path, compare: bool, opts: &RunOpts) -> Result<i32, i32> {
    let sc = load(path, opts.config.as_deref())?;
    fs::create_dir_all(&opts.out).map_err(io_fail)?;
    let stem = file_stem(&sc.id);
    let engine_fail = |e| {
        eprintln!("{}: {e}", sc.id);
        EXIT_ERROR
    };

    let (on, row) = if compare {
        let p = run_pair(&sc, opts.dt).map_err(|e| {
            eprintln!("{e}");
            EXIT_ERROR
        })?;
        write_trace(&p.without_cas, &opts.out.join(format!("{stem}_trace_cas_off.csv"))).map_err(io_fail)?;
        let row = pair_row(&p.report_with, Some(&p.report_without));
        (p.with_cas, row)
    } else {
        let params = SimParams { dt: opts.dt.unwrap_or(sc.sim.dt), ..sc.sim };
        let on = run(&sc, &params).map_err(engine_fail)?;
        let report = delays(&on, baseline(&sc));
        let row = pair_row(&report, None);
        (on, row)
    };
    write_trace(&on, &opts.out.join(format!("{stem}_trace.csv"))).map_err(io_fail)?;
    let table = BatchTable { mean_d_air: row.d_air.filter(|_| row.encounter), rows: vec![row] };
    write_report(&table, &opts.out, opts.format).map_err(io_fail)?;

    print!("{}", report_csv(&table));
    println!("terminal: {}", on.terminal.keyword());
    Ok(terminal_code(&on.terminal))
}

fn load_pack_dir(dir: &Path, config: Option<&Path>) -> Result<Vec<Scenario>, i32> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| {
            eprintln!("{}: {e}", dir.display());
            EXIT_ERROR
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    if files.is_empty() {
        eprintln!("{}: no .scn files", dir.display());
        return Err(EXIT_ERROR);
    }
    let mut out = Vec::new();
    let mut failed = false;
    for f in &files {
        match load(f, config) {
            Ok(sc) => out.push(sc),
            Err(_) => failed = true,
        }
    }
    if failed {
        Err(EXIT_ERROR)
    } else {
        Ok(out)
    }
}

fn resolve_pack(selector: &str, config: Option<&Path>) -> Result<Vec<Scenario>, i32> {
    if selector != "default" {
        return load_pack_dir(Path::new(selector), config);
    }
    if let Some(dir) = std::env::var_os(PACK_DIR_ENV) {
        return load_pack_dir(Path::new(&dir), config);
    }
    let mut scenarios = default_pack().scenarios;
    if let Some(c) = config {
        let text = fs::read_to_string(c).map_err(|e| {
            eprintln!("{}: {e}", c.display());
            EXIT_ERROR
        })?;
        for sc in &mut scenarios {
            apply_overrides(sc, &text).map_err(|e| {
                print_errors(c, &e);
                EXIT_ERROR
            })?;
        }
    }
    Ok(scenarios)
}

fn cmd_batch(selector: &str, opts: &RunOpts) -> Result<i32, i32> {
    let mut scenarios = resolve_pack(selector, opts.config.as_deref())?;
    scenarios.sort_by(|a, b| a.id.cmp(&b.id));
    let out = run_batch(&scenarios, opts.dt).map_err(|e| {
        eprintln!("{e}");
        EXIT_ERROR
    })?;

    let traces = opts.out.join("traces");
    fs::create_dir_all(&traces).map_err(io_fail)?;
    for p in &out.pairs {
        let stem = file_stem(&p.with_cas.scenario_id);
        write_trace(&p.with_cas, &traces.join(format!("{stem}_cas_on.csv"))).map_err(io_fail)?;
        write_trace(&p.without_cas, &traces.join(format!("{stem}_cas_off.csv"))).map_err(io_fail)?;
    }
    write_report(&out.table, &opts.out, opts.format).map_err(io_fail)?;
    write_plot_data(&out.table, &opts.out).map_err(io_fail)?;

    print!("{}", report_csv(&out.table));
    match out.table.mean_d_air {
        Some(m) => println!("mean D_A over airborne encounters: {m:.1} s"),
        None => println!("mean D_A over airborne encounters: n/a"),
    }
    Ok(EXIT_LANDED)
}

fn cmd_pack(out: &Path) -> Result<i32, i32> {
    let pack = default_pack();
    pack.write_to(out).map_err(io_fail)?;
    println!("wrote {} scenarios to {}", pack.scenarios.len(), out.display());
    Ok(EXIT_LANDED)
}

fn cmd_validate(path: &Path) -> Result<i32, i32> {
    load(path, None)?;
    println!("OK");
    Ok(EXIT_LANDED)
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_LANDED };
        }
    };
    if let Some(dt) = match &cli.command {
        Command::Run { opts, .. } | Command::Batch { opts, .. } => opts.dt,
        _ => None,
    } {
        if !(dt.is_finite() && dt > 0.0) {
            eprintln!("--dt must be positive, got {dt}");
            return EXIT_ERROR;
        }
    }
    let r = match &cli.command {
        Command::Run { scenario, compare, opts } => cmd_run(scenario, *compare, opts),
        Command::Batch { pack, opts } => cmd_batch(pack, opts),
        Command::Pack { out } => cmd_pack(out),
        Command::Validate { scenario } => cmd_validate(scenario),
    };
    r.unwrap_or_else(|code| code)
}
