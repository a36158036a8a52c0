//! Command-line front end: single points, rate profiles, config-driven
//! sweeps, figure presets, and the laser-power estimate.
//!
//! Exit codes: 0 success, 1 config error, 2 numerical failure, 3 a sweep
//! finished but some rows failed.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rfsqueeze::prelude::*;
use rfsqueeze::sweep::{AxisParam, AxisTarget, Scale, SweepAxis, TOOL_VERSION};
use rfsqueeze::Error;

#[derive(Parser)]
#[command(name = "rfsqueeze", version = TOOL_VERSION, about = "Squeezing in the resonance fluorescence of a driven dot-cavity system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker-pool size for grid points (0 = all cores).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Solve with the full second-order generator instead of the
    /// effective one.
    #[arg(long)]
    full_me: bool,
    /// Force the phonon channels off regardless of the config.
    #[arg(long)]
    no_phonons: bool,
    /// Override the starting Fock truncation.
    #[arg(long)]
    truncation: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Phonon-induced rate profiles over a detuning grid.
    Rates {
        /// Parameter file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Detuning grid in meV: lo,hi,count.
        #[arg(long, default_value = "-2.0,2.0,81", allow_hyphen_values = true)]
        grid_mev: String,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Steady state and squeezing report for one parameter point.
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Config-driven parameter sweep.
    Sweep {
        /// Sweep file (JSON): params + axis (+ axis2, outputs).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// One of the built-in figure presets.
    Figure {
        /// fig1, fig2, fig3a, fig3b, fig4a, fig4b, fig5a or fig5b.
        id: String,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Laser power required for a Rabi frequency.
    Power {
        /// Rabi frequency in μeV.
        #[arg(long)]
        omega_uev: f64,
        /// Transition dipole moment in C·m.
        #[arg(long, default_value_t = 9.7e-29)]
        dipole_cm: f64,
        /// Beam spot area in μm².
        #[arg(long, default_value_t = 100.0)]
        spot_um2: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::UnknownFigure(_)
        | Error::Io(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Rates { config, grid_mev, run } => {
            let base = load_params(&config, &run)?;
            let (lo, hi, count) = parse_grid(&grid_mev)?;
            let spec = SweepSpec {
                base,
                axis1: SweepAxis {
                    targets: vec![
                        AxisTarget { param: AxisParam::DeltaXl, scale: Scale::Const(1.0) },
                        AxisTarget { param: AxisParam::DeltaCl, scale: Scale::Const(2.0) },
                    ],
                    values: rfsqueeze::sweep::linspace(lo * 1e3, hi * 1e3, count as usize),
                    label: "delta_xl".into(),
                },
                axis2: None,
                outputs: vec![
                    OutputField::RateSigmaPlus,
                    OutputField::RateSigmaMinus,
                    OutputField::RateSigmaPlusA,
                    OutputField::RateADagSigmaMinus,
                ],
            };
            run_and_emit(&spec, &run)
        }
        Command::Steady { config, run } => {
            let base = load_params(&config, &run)?;
            let spec = SweepSpec {
                base: base.clone(),
                axis1: SweepAxis::single(AxisParam::DeltaCl, vec![base.delta_cl_uev]),
                axis2: None,
                outputs: vec![
                    OutputField::Variance,
                    OutputField::Population,
                    OutputField::CoherenceSq,
                    OutputField::PhotonNumber,
                    OutputField::ThetaStar,
                    OutputField::SqueezingDb,
                    OutputField::NStar,
                ],
            };
            run_and_emit(&spec, &run)
        }
        Command::Sweep { config, run } => {
            let text = fs::read_to_string(&config)?;
            let mut spec = parse_sweep_json(&text)?;
            apply_overrides(&mut spec.base, &run);
            run_and_emit(&spec, &run)
        }
        Command::Figure { id, run } => {
            let figure: FigureId = id.parse()?;
            let mut spec = figure_preset(figure);
            apply_overrides(&mut spec.base, &run);
            run_and_emit(&spec, &run)
        }
        Command::Power { omega_uev, dipole_cm, spot_um2 } => {
            let rp = rabi_to_power(omega_uev, dipole_cm, spot_um2 * 1e-12)?;
            println!("field_v_per_m={:.6e}", rp.field_v_per_m);
            println!("intensity_w_per_m2={:.6e}", rp.intensity_w_per_m2);
            println!("power_w={:.6e}", rp.power_w);
            println!("power_mw={:.6e}", rp.power_w * 1e3);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_grid(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad grid component `{s}`: {e}")))
    };
    match parts.as_slice() {
        [lo, hi, count] => Ok((parse(lo)?, parse(hi)?, parse(count)?)),
        _ => Err(Error::Config(format!("grid must be lo,hi,count; got `{text}`"))),
    }
}

fn load_params(path: &PathBuf, run: &CommonRunArgs) -> Result<PhysicalParams> {
    let text = fs::read_to_string(path)?;
    let mut params = parse_params_json(&text)?;
    apply_overrides(&mut params, run);
    Ok(params)
}

fn apply_overrides(params: &mut PhysicalParams, run: &CommonRunArgs) {
    if run.no_phonons {
        params.phonons_enabled = false;
    }
    if let Some(n) = run.truncation {
        params.fock_truncation = n;
    }
}

fn run_and_emit(spec: &SweepSpec, run: &CommonRunArgs) -> Result<ExitCode> {
    let opts = RunOptions {
        threads: run.threads,
        path: if run.full_me { GeneratorPath::Full } else { GeneratorPath::Effective },
    };
    let table = run_sweep(spec, &opts)?;

    let mut buf: Vec<u8> = Vec::new();
    match run.format {
        Format::Csv => emit_csv(&table, &mut buf)?,
        Format::Json => emit_json(&table, &mut buf)?,
    }
    if run.out == "-" {
        std::io::stdout().write_all(&buf)?;
    } else {
        fs::write(&run.out, &buf)?;
    }

    let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the error column", table.rows.len());
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
