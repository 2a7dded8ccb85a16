//! Batch front end: configuration loading, command dispatch, report
//! emission. Exit codes: 0 success, 1 I/O failure, 2 validation failure,
//! 3 internal error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ghost_core::arch::{validate, ArchConfig, DeviceLibrary, PhotonicLimits};
use ghost_core::dse::{
    ablate, sweep_arch, sweep_device, SweepKind, SweepSpec, Workload,
};
use ghost_core::engine::{simulate, MemoryModel, SimReport};
use ghost_core::error::Error as CoreError;
use ghost_core::graph::{generate_graph, write_edge_list, write_feature_csv, GraphKind};
use ghost_core::photonics::{CrosstalkModel, MrDesign};

use config::ConfigFile;

#[derive(Parser)]
#[command(name = "ghost-sim", version, about = "Photonic GNN accelerator simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for generation commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, env = "GHOST_SIM_THREADS", default_value_t = 0)]
    threads: usize,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write the report (JSON + CSV).
    Simulate,
    /// MR-bank feasibility sweep (coherent or non-coherent).
    SweepDevice {
        /// Sweep kind when no config is given: coherent | noncoherent.
        #[arg(long, default_value = "coherent")]
        kind: String,
    },
    /// Grid search over [N, V, R_r, R_c, T_r].
    SweepArch,
    /// Orchestration-optimization ablation over the workload set.
    Ablate,
    /// Generate a synthetic graph (edge list + feature CSV).
    GenGraph {
        /// erdos_renyi | power_law | star | chain
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        /// Edge probability or power-law exponent.
        #[arg(long, default_value_t = 0.1)]
        param: f64,
        #[arg(long, default_value_t = 8)]
        feature_dim: usize,
        /// Output file prefix (default: <kind>_<n> under --out).
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Validate a configuration against structural and photonic limits.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // sweeps fan out over rayon; pool size is set once up front
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Map error kinds onto the exit-code contract.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            let _ = io;
            return 1;
        }
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::Io(_) => 1,
                CoreError::Validation(_) | CoreError::Parse { .. } | CoreError::Domain(_) => 2,
            };
        }
    }
    3
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    fs::create_dir_all(&cli.out)
        .map_err(|e| anyhow::anyhow!(std::io::Error::new(e.kind(), format!("{}: {e}", cli.out.display()))))?;
    match &cli.command {
        Command::Simulate => cmd_simulate(cli),
        Command::SweepDevice { kind } => cmd_sweep_device(cli, kind),
        Command::SweepArch => cmd_sweep_arch(cli),
        Command::Ablate => cmd_ablate(cli),
        Command::GenGraph {
            kind,
            n,
            param,
            feature_dim,
            prefix,
        } => cmd_gen_graph(cli, kind, *n, *param, *feature_dim, prefix.as_deref()),
        Command::Validate => cmd_validate(cli),
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<ConfigFile> {
    match &cli.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

/// Emit a machine-readable error report before failing a command.
fn write_error_report(out: &Path, err: &CoreError) {
    let violations: Vec<serde_json::Value> = match err {
        CoreError::Validation(list) => list
            .iter()
            .map(|v| serde_json::json!({"code": v.code, "detail": v.detail}))
            .collect(),
        _ => Vec::new(),
    };
    let report = serde_json::json!({
        "error": {
            "kind": match err {
                CoreError::Validation(_) => "validation",
                CoreError::Parse { .. } => "parse",
                CoreError::Domain(_) => "domain",
                CoreError::Io(_) => "io",
            },
            "message": err.to_string(),
            "violations": violations,
        }
    });
    let _ = fs::write(
        out.join("error.json"),
        serde_json::to_string_pretty(&report).unwrap_or_default(),
    );
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text)
        .map_err(|e| anyhow::anyhow!(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(())
}

/// Stamp a JSON report with a content hash over its other fields.
fn with_content_hash(mut value: serde_json::Value) -> serde_json::Value {
    let text = serde_json::to_string(&value).unwrap_or_default();
    let hash = format!("{:016x}", ghost_core::engine::fnv1a64(text.as_bytes()));
    if let Some(map) = value.as_object_mut() {
        map.insert("content_hash".to_string(), hash.into());
    }
    value
}

fn cmd_simulate(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let graph = cfg.resolve_graph(cli.config.as_deref())?;
    let model = cfg.resolve_model(cli.config.as_deref())?;
    let arch = cfg.resolve_arch(cli.config.as_deref())?;
    let dev = cfg.resolve_device(cli.config.as_deref())?;
    let mem = cfg.resolve_memory(cli.config.as_deref())?;
    let limits = cfg.resolve_limits(cli.config.as_deref())?;

    let report: SimReport = match simulate(&graph, &model, &arch, &dev, &mem, &limits) {
        Ok(r) => r,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    let json_path = cli.out.join("report.json");
    let csv_path = cli.out.join("report.csv");
    write_text(&json_path, &format!("{}\n", report.to_json_pretty()))?;
    write_text(
        &csv_path,
        &format!("{}\n{}\n", SimReport::csv_header(), report.to_csv_row()),
    )?;
    if !cli.quiet {
        println!(
            "simulated {} vertices / {} edges: {:.1} ns, {:.3e} J, {:.3} GOPS",
            report.num_vertices, report.num_edges, report.latency_total_ns, report.energy_total_j, report.gops
        );
        println!("wrote {} and {}", json_path.display(), csv_path.display());
    }
    Ok(())
}

fn cmd_sweep_device(cli: &Cli, kind_flag: &str) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let model: CrosstalkModel = cfg.resolve_calibration(cli.config.as_deref())?;
    let design: MrDesign = cfg.resolve_device(cli.config.as_deref())?.mr_design;
    let mut spec = cfg.sweep.clone().unwrap_or_default();
    if cfg.sweep.is_none() {
        spec.kind = match kind_flag {
            "coherent" => SweepKind::DeviceCoherent,
            "noncoherent" => SweepKind::DeviceNoncoherent,
            other => {
                let e = CoreError::validation("unknown-sweep-kind", other.to_string());
                write_error_report(&cli.out, &e);
                return Err(e.into());
            }
        };
        if spec.kind == SweepKind::DeviceNoncoherent {
            spec.wavelengths_nm = vec![1550.0];
        }
    }
    let result = match sweep_device(&spec, &design, &model) {
        Ok(r) => r,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    write_text(&cli.out.join("device_sweep.csv"), &result.to_csv())?;
    let summary = with_content_hash(serde_json::json!({
        "kind": result.kind,
        "snr_requirement_db": spec.snr_requirement_db,
        "summaries": result.summaries,
    }));
    write_text(
        &cli.out.join("device_sweep.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    if !cli.quiet {
        for s in &result.summaries {
            println!(
                "lambda {} nm: max {} MRs ({} wavelengths){}",
                s.lambda_nm,
                s.max_mrs,
                s.wavelengths,
                if s.saturated { " [saturated]" } else { "" }
            );
        }
    }
    Ok(())
}

fn cmd_sweep_arch(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let dev = cfg.resolve_device(cli.config.as_deref())?;
    let mem = cfg.resolve_memory(cli.config.as_deref())?;
    let limits = cfg.resolve_limits(cli.config.as_deref())?;
    let workloads: Vec<Workload> = cfg.resolve_workloads(cli.config.as_deref())?;
    let spec = cfg.sweep.clone().unwrap_or(SweepSpec {
        kind: SweepKind::Arch,
        ..SweepSpec::default()
    });
    let result = match sweep_arch(&spec, &workloads, &dev, &mem, &limits) {
        Ok(r) => r,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    write_text(&cli.out.join("arch_sweep.csv"), &result.to_csv())?;
    write_text(
        &cli.out.join("arch_sweep.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&with_content_hash(result.summary_json()))?
        ),
    )?;
    if !cli.quiet {
        if let Some(best) = result.best() {
            println!("best config {:?} with score {:e}", best.config, best.score);
        }
        println!(
            "{} ranked, {} infeasible",
            result.ranked.len(),
            result.infeasible.len()
        );
    }
    Ok(())
}

fn cmd_ablate(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let dev = cfg.resolve_device(cli.config.as_deref())?;
    let mem = cfg.resolve_memory(cli.config.as_deref())?;
    let limits = cfg.resolve_limits(cli.config.as_deref())?;
    let arch = cfg.resolve_arch_or_toy(cli.config.as_deref())?;
    let workloads: Vec<Workload> = cfg.resolve_workloads(cli.config.as_deref())?;
    let result = match ablate(&workloads, &dev, &mem, &arch, &limits) {
        Ok(r) => r,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    write_text(&cli.out.join("ablation.csv"), &result.to_csv())?;
    let report = with_content_hash(serde_json::json!({
        "config": arch,
        "rows": result.rows,
    }));
    write_text(
        &cli.out.join("ablation.json"),
        &format!("{}\n", serde_json::to_string_pretty(&report)?),
    )?;
    if !cli.quiet {
        println!("{} ablation rows written", result.rows.len());
    }
    Ok(())
}

fn cmd_gen_graph(
    cli: &Cli,
    kind: &str,
    n: usize,
    param: f64,
    feature_dim: usize,
    prefix: Option<&str>,
) -> anyhow::Result<()> {
    let kind_parsed = match GraphKind::parse(kind) {
        Ok(k) => k,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    let graph = match generate_graph(kind_parsed, n, param, feature_dim, cli.seed) {
        Ok(g) => g,
        Err(e) => {
            write_error_report(&cli.out, &e);
            return Err(e.into());
        }
    };
    let prefix = prefix.map(str::to_string).unwrap_or(format!("{kind}_{n}"));
    let edge_path = cli.out.join(format!("{prefix}.edges"));
    let mut edge_buf = Vec::new();
    write_edge_list(&graph, &mut edge_buf)?;
    write_text(&edge_path, std::str::from_utf8(&edge_buf)?)?;
    if feature_dim > 0 {
        let feat_path = cli.out.join(format!("{prefix}.features.csv"));
        let mut feat_buf = Vec::new();
        write_feature_csv(&graph, &mut feat_buf)?;
        write_text(&feat_path, std::str::from_utf8(&feat_buf)?)?;
    }
    if !cli.quiet {
        println!(
            "generated {kind} graph: {} vertices, {} edges -> {}",
            graph.num_vertices(),
            graph.num_edges(),
            edge_path.display()
        );
    }
    Ok(())
}

fn cmd_validate(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    let arch: ArchConfig = cfg.resolve_arch(cli.config.as_deref())?;
    let dev: DeviceLibrary = cfg.resolve_device(cli.config.as_deref())?;
    let mem: MemoryModel = cfg.resolve_memory(cli.config.as_deref())?;
    let limits: PhotonicLimits = cfg.resolve_limits(cli.config.as_deref())?;

    dev.check().map_err(|e| {
        write_error_report(&cli.out, &e);
        anyhow::Error::from(e)
    })?;
    let warnings = mem.warnings();
    match validate(&arch, &dev, &limits) {
        Ok(()) => {
            let report = with_content_hash(serde_json::json!({
                "ok": true,
                "config": arch,
                "limits": limits,
                "warnings": warnings,
            }));
            write_text(
                &cli.out.join("validate.json"),
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
            )?;
            if !cli.quiet {
                println!("ok: {:?} validates against limits {:?}", arch.as_vector(), limits);
                for w in &warnings {
                    println!("warning: {w}");
                }
            }
            Ok(())
        }
        Err(e) => {
            write_error_report(&cli.out, &e);
            if !cli.quiet {
                println!("invalid: {e}");
            }
            Err(e.into())
        }
    }
}
