//! Command-line front end: parses the subcommand, loads and validates the
//! experiment configuration, applies the `VESELOVA_SEED` override, runs the
//! experiment, and maps failures onto the documented exit codes
//! (1 usage, 2 numeric, 3 invariant violation).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use veselova_cli::config::{load_config, ExperimentConfig, Mode};
use veselova_cli::report::RunReport;
use veselova_cli::{run, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "veselova",
    version,
    about = "Simulation and verification laboratory for a rolling-without-twisting rigid body"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate trajectories (config modes: full, reduced, axi, cyl).
    Simulate(WithConfig),
    /// Run the invariant check battery for the configured body.
    Verify(WithConfig),
    /// Sample the energy-momentum image and write the steady-rotation rays.
    EmMap(WithConfig),
    /// Tag every sample of an axi or cyl run with its stratum.
    Strata(WithConfig),
    /// Count independent frequencies for a bundled scenario.
    Spectrum(WithConfig),
    /// Trace the spatial symmetry axis of reduced orbits (dimension 3).
    AxisTrace(WithConfig),
    /// Write the bundled example configurations.
    Presets(PresetsArgs),
}

#[derive(clap::Args)]
struct WithConfig {
    /// Path to the TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PresetsArgs {
    /// Directory to write the bundled configurations into.
    #[arg(long, default_value = "presets")]
    out_dir: PathBuf,
    /// List names and descriptions without writing files.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Presets(a) => presets(a),
        Cmd::Simulate(a) => run_with(
            a,
            "simulate",
            &[Mode::Full, Mode::Reduced, Mode::Axi, Mode::Cyl],
            false,
        ),
        Cmd::Strata(a) => run_with(a, "strata", &[Mode::Axi, Mode::Cyl], true),
        Cmd::Verify(a) => run_with(a, "verify", &[Mode::Verify], false),
        Cmd::EmMap(a) => run_with(a, "em-map", &[Mode::EmMap], false),
        Cmd::Spectrum(a) => run_with(a, "spectrum", &[Mode::Spectrum], false),
        Cmd::AxisTrace(a) => run_with(a, "axis-trace", &[Mode::AxisTrace], false),
    }
}

fn run_with(args: WithConfig, sub: &str, allowed: &[Mode], strata: bool) -> CliResult<()> {
    let mut cfg = load_config(&args.config)?;
    if !allowed.contains(&cfg.mode) {
        return Err(CliError::Usage(format!(
            "subcommand `{sub}` does not accept mode `{}`; allowed: {}",
            cfg.mode.name(),
            allowed
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join("|")
        )));
    }
    if let Some(dir) = args.out_dir {
        cfg.out_dir = dir;
    }
    apply_env_seed(&mut cfg)?;
    let outcome = if strata {
        run::run_strata(&cfg)?
    } else {
        run::run(&cfg)?
    };
    summarize(&outcome.report);
    println!("report {}", cfg.out_dir.join("report.json").display());
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn apply_env_seed(cfg: &mut ExperimentConfig) -> CliResult<()> {
    match std::env::var("VESELOVA_SEED") {
        Ok(s) => {
            let seed: u64 = s.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "VESELOVA_SEED: expected an unsigned integer, got `{s}`"
                ))
            })?;
            cfg.override_seed(seed);
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Usage(
            "VESELOVA_SEED: value is not valid unicode".into(),
        )),
    }
}

fn presets(args: PresetsArgs) -> CliResult<()> {
    if args.list {
        for p in veselova_cli::preset_configs::ALL {
            println!("{:<24} {}", p.name, p.describe);
        }
        return Ok(());
    }
    let written = veselova_cli::preset_configs::write_all(&args.out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn summarize(r: &RunReport) {
    println!(
        "mode {}  dimension {}  wall {:.3}s",
        r.mode, r.dimension, r.wall_time_s
    );
    for t in &r.trajectories {
        let mut line = format!(
            "traj {:03}  {}  energy drift {:.3e}",
            t.index, t.csv, t.energy_drift
        );
        if let Some(m) = t.momentum_drift {
            line.push_str(&format!("  momentum drift {m:.3e}"));
        }
        if let Some(f) = t.f_drift {
            line.push_str(&format!("  quartic drift {f:.3e}"));
        }
        if let Some(c) = t.max_constraint_residual {
            line.push_str(&format!("  constraint {c:.3e}"));
        }
        if !t.stratum_tags.is_empty() {
            line.push_str(&format!("  strata {}", t.stratum_tags.join(",")));
        }
        println!("{line}");
    }
    for c in &r.checks {
        println!(
            "CHECK {:<34} {}  value {:>12.5e}  bound {:.1e}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.threshold
        );
    }
    if let Some(s) = &r.spectrum {
        println!(
            "spectrum {}  base count {} (expected {})  base {:?}  near resonance {}",
            s.preset, s.base_count, s.expected_base_count, s.base, s.near_resonance
        );
    }
    for ray in &r.em_rays {
        println!(
            "ray plane ({}, {})  P/H slope {:.12e}",
            ray.plane.0, ray.plane.1, ray.coefficient
        );
    }
    if !r.stratum_tags.is_empty() {
        println!("strata visited: {}", r.stratum_tags.join(", "));
    }
}
