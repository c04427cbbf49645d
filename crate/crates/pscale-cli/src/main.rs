//! `pscale`: design-space exploration for chiplet-grid photonic DNN
//! accelerators.
//!
//! Exit codes: 0 success, 1 I/O or data error, 2 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pscale_core::config::SweepConfig;
use pscale_core::metrics::{workload_utilization, Weighting};
use pscale_core::model::{cycle_model, EvalContext};
use pscale_core::optics::{fanout_loss_db, link_feasible, max_monolithic_mesh, mesh_loss_db};
use pscale_core::report;
use pscale_core::sweep::{run_sweep, SweepResult};
use pscale_core::topology::parse_grid;
use pscale_core::workload::presets;

const CONFIG_ENV: &str = "PSCALE_CONFIG";

#[derive(Parser)]
#[command(
    name = "pscale",
    version,
    about = "Photonic chiplet-grid accelerator simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map one workload onto one grid and print the per-layer table.
    Simulate {
        /// Workload: a layer CSV path or `preset:<name>`.
        #[arg(long)]
        workload: String,
        /// Total PE (chiplet) count.
        #[arg(long)]
        pe: u64,
        /// Grid aspect ratio, e.g. `16x32`; rows*cols must equal --pe.
        #[arg(long)]
        grid: String,
        /// Run config file (defaults to $PSCALE_CONFIG, then built-ins).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Force the cycle-stepping reference simulator.
        #[arg(long, hide = true)]
        oracle: bool,
    },
    /// Run the full sweep and write the report bundle.
    Sweep {
        /// Run config file (defaults to $PSCALE_CONFIG, then built-ins).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optical link-budget table and the largest feasible mesh.
    Feasibility {
        /// Largest mesh dimension to tabulate.
        #[arg(long, default_value_t = 64)]
        max_n: u64,
        /// Run config file (defaults to $PSCALE_CONFIG, then built-ins).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-derive summaries from a persisted sweep bundle.
    Report {
        /// Directory holding a sweep's report bundle.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Print the best-topology lines.
        #[arg(long)]
        best: bool,
        /// Print the scaling-efficiency lines.
        #[arg(long)]
        eta: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn data(msg: impl Into<String>) -> Self {
        CliError {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<pscale_core::Error> for CliError {
    fn from(e: pscale_core::Error) -> Self {
        CliError::data(e.to_string())
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe (e.g. `| head`) closes stdout.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pscale: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

/// Explicit --config, then $PSCALE_CONFIG, then built-in defaults.
fn load_config(explicit: Option<PathBuf>) -> Result<SweepConfig, CliError> {
    let path = explicit.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => Ok(SweepConfig::from_file(&p)?),
        None => Ok(SweepConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            workload,
            pe,
            grid,
            config,
            oracle,
        } => cmd_simulate(&workload, pe, &grid, config, oracle),
        Command::Sweep { config, out } => cmd_sweep(config, out),
        Command::Feasibility { max_n, config } => cmd_feasibility(max_n, config),
        Command::Report {
            input,
            format,
            best,
            eta,
        } => cmd_report(&input, format, best, eta),
    }
}

fn cmd_simulate(
    workload: &str,
    pe: u64,
    grid: &str,
    config: Option<PathBuf>,
    oracle: bool,
) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let topo = parse_grid(grid, cfg.tile_dim).map_err(|e| CliError::usage(e.to_string()))?;
    if topo.pe_count() != pe {
        return Err(CliError::usage(format!(
            "grid {grid} has {} PEs but --pe is {pe}",
            topo.pe_count()
        )));
    }
    let network = presets::load(workload)?;
    let model = cycle_model(if oracle { "reference" } else { &cfg.model })?;
    let ctx = EvalContext {
        interposer_delay: cfg.interposer_delay,
        buffers: cfg.buffers,
    };

    let mut reports = Vec::with_capacity(network.layers.len());
    for layer in &network.layers {
        reports.push(model.evaluate(layer, &topo, &ctx)?);
    }

    let name_width = reports
        .iter()
        .map(|r| r.layer.len())
        .chain(["layer".len(), "total".len()])
        .max()
        .unwrap_or(5);
    println!(
        "{} on {} ({} PEs, {}x{} lanes, model {})",
        network.name,
        topo.label(),
        pe,
        topo.pe_rows * topo.tile_dim,
        topo.pe_cols * topo.tile_dim,
        model.name(),
    );
    println!(
        "{:<name_width$} {:>8} {:>6} {:>7} {:>7} {:>12} {:>9} {:>12} {:>12} {:>12} {:>12}",
        "layer",
        "sr",
        "sc",
        "t",
        "folds",
        "cycles",
        "util",
        "ifmap_rd",
        "filter_rd",
        "psum_rd",
        "ofmap_wr",
    );
    for r in &reports {
        println!(
            "{:<name_width$} {:>8} {:>6} {:>7} {:>7} {:>12} {:>9} {:>12} {:>12} {:>12} {:>12}",
            r.layer,
            r.sr,
            r.sc,
            r.t,
            format!("{}x{}", r.row_folds, r.col_folds),
            r.cycles,
            report::fmt_ratio(r.utilization),
            r.traffic.ifmap_reads,
            r.traffic.filter_reads,
            r.traffic.psum_reads,
            r.traffic.ofmap_writes,
        );
    }
    let total_cycles: u64 = reports.iter().map(|r| r.cycles).sum();
    let traffic = pscale_core::memory::aggregate_traffic(
        &reports.iter().map(|r| r.traffic).collect::<Vec<_>>(),
    )?;
    let util = workload_utilization(&reports, Weighting::MacWeighted)?;
    println!(
        "{:<name_width$} {:>8} {:>6} {:>7} {:>7} {:>12} {:>9} {:>12} {:>12} {:>12} {:>12}",
        "total",
        "",
        "",
        "",
        "",
        total_cycles,
        report::fmt_ratio(util),
        traffic.ifmap_reads,
        traffic.filter_reads,
        traffic.psum_reads,
        traffic.ofmap_writes,
    );
    Ok(())
}

fn cmd_sweep(config: Option<PathBuf>, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = load_config(config)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    let result: SweepResult = run_sweep(&cfg)?;
    let paths = report::write_bundle(&result)?;
    print!("{}", report::best_lines(&result.workloads));
    print!(
        "{}",
        report::eta_lines(&result.workloads, cfg.wall_threshold)
    );
    println!(
        "wrote {} report files to {}",
        paths.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn cmd_feasibility(max_n: u64, config: Option<PathBuf>) -> Result<(), CliError> {
    if max_n < 1 {
        return Err(CliError::usage("--max-n must be >= 1"));
    }
    let cfg = load_config(config)?;
    let p = &cfg.optical;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>12} {:>12} {:>12} {:>9}",
        "n", "mesh_db", "fanout_db", "total_db", "feasible"
    );
    for n in 1..=max_n {
        let mesh = mesh_loss_db(n, p);
        let fanout = fanout_loss_db(n);
        let _ = writeln!(
            out,
            "{:>5} {:>12.3} {:>12.3} {:>12.3} {:>9}",
            n,
            mesh,
            fanout,
            mesh + fanout + p.margin_db,
            if link_feasible(n, p) { "yes" } else { "no" },
        );
    }
    print!("{out}");
    println!(
        "link budget {:.2} dB, margin {:.2} dB",
        p.link_budget_db, p.margin_db
    );
    match max_monolithic_mesh(p) {
        Ok(n) => println!("largest feasible monolithic mesh: {n}x{n}"),
        Err(e) => println!("largest feasible monolithic mesh: none ({e})"),
    }
    Ok(())
}

fn cmd_report(
    input: &std::path::Path,
    format: Format,
    best: bool,
    eta: bool,
) -> Result<(), CliError> {
    let (config, workloads) = report::rederive(input)?;
    if best {
        print!("{}", report::best_lines(&workloads));
    }
    if eta {
        print!("{}", report::eta_lines(&workloads, config.wall_threshold));
    }
    if !best && !eta {
        let result = SweepResult { config, workloads };
        match format {
            Format::Csv => print!("{}", report::render_summary_csv(&result)),
            Format::Json => println!("{}", report::render_summary_json(&result)?),
        }
    }
    Ok(())
}
