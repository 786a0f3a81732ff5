//! `qram-rr`: yield sweeps, resource tables, and circuit demos for
//! bucket-brigade qRAM with spare-based repair.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qram_rr::circuit::{AddressInput, QueryMode};
use qram_rr::cli::{cmd_circuit_demo, cmd_resource, cmd_verify, cmd_yield, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "qram-rr", version, about = "Fabrication-yield and circuit workbench for bucket-brigade qRAM with redundancy repair", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo yield sweep over (distance, size, spares, error rate);
    /// emits CSV and optionally an SVG chart.
    Yield(YieldArgs),
    /// Memory/peripheral physical-qubit counts and spare overheads.
    Resource(ResourceArgs),
    /// Build and run one query circuit, printing the gate listing and the
    /// comparison against the classical translation rule.
    CircuitDemo(CircuitDemoArgs),
    /// Exhaustive circuit-vs-oracle checks plus an MC-vs-analytic suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Load a `key = value` config file first; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the fully resolved configuration to this path.
    #[arg(long)]
    emit_config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Named grid preset: fig3b, fig6, fig7a..fig7e. Incompatible with
    /// explicit axis flags.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated code distances (odd, >= 3).
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<u32>>,
    /// Comma-separated logical-qubit counts.
    #[arg(long, value_delimiter = ',')]
    logical_counts: Option<Vec<u32>>,
    /// Comma-separated spare counts.
    #[arg(long, value_delimiter = ',')]
    spare_counts: Option<Vec<u32>>,
    /// Comma-separated fabrication error rates in [0, 1].
    #[arg(long, value_delimiter = ',')]
    error_rates: Option<Vec<f64>>,
    #[arg(long)]
    chips_per_rep: Option<u32>,
    #[arg(long)]
    reps: Option<u32>,
    /// Whether spares are fabricated (and can fail) like originals.
    #[arg(long)]
    spares_fallible: Option<bool>,
}

#[derive(Args)]
struct YieldArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Also render the sweep as an SVG chart at this path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ResourceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Named preset: table1 (the full reference grid).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    logical_counts: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    spare_counts: Option<Vec<u32>>,
}

#[derive(Args)]
struct CircuitDemoArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Address register width n (1..=3); the chip has 2^n original cells.
    #[arg(long)]
    address_bits: Option<u32>,
    /// Number of spare cells.
    #[arg(long)]
    spares: Option<u32>,
    /// Comma-separated faulty addresses in binary, e.g. `10,11`.
    #[arg(long, value_delimiter = ',')]
    faults: Option<Vec<String>>,
    /// Original cell contents as a bitstring, cell 0 first, e.g. `1011`.
    #[arg(long)]
    data: Option<String>,
    /// Spare cell contents as a bitstring, spare 0 first.
    #[arg(long)]
    spare_data: Option<String>,
    /// Query address in binary, or `uniform` for the full superposition.
    #[arg(long)]
    address: Option<String>,
    /// read | write
    #[arg(long)]
    mode: Option<String>,
    /// Data-in bit for writes.
    #[arg(long)]
    dq: Option<u8>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest address width to check exhaustively (0 empties the scope).
    #[arg(long)]
    max_address_bits: Option<u32>,
    /// Largest spare count to check exhaustively.
    #[arg(long)]
    max_spares: Option<u32>,
    #[arg(long)]
    spares_fallible: Option<bool>,
}

fn load_config(common: &CommonArgs, command: &str) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => RunConfig::default(),
    };
    cfg.command = command.to_string();
    if let Some(seed) = common.master_seed {
        cfg.master_seed = seed;
    }
    if common.out.is_some() {
        cfg.output = common.out.clone();
    }
    if common.emit_config.is_some() {
        cfg.emit_config = common.emit_config.clone();
    }
    Ok(cfg)
}

fn apply_sweep_args(cfg: &mut RunConfig, sweep: &SweepArgs) -> Result<(), CliError> {
    let axis_flags = sweep.distances.is_some()
        || sweep.logical_counts.is_some()
        || sweep.spare_counts.is_some()
        || sweep.error_rates.is_some();
    if sweep.preset.is_some() && axis_flags {
        return Err(CliError::Config(
            "--preset fixes the sweep axes; drop the axis flags or the preset".into(),
        ));
    }
    if let Some(p) = &sweep.preset {
        cfg.preset = Some(p.clone());
    } else if axis_flags {
        cfg.preset = None;
    }
    if let Some(v) = &sweep.distances {
        cfg.distances = v.clone();
    }
    if let Some(v) = &sweep.logical_counts {
        cfg.logical_counts = v.clone();
    }
    if let Some(v) = &sweep.spare_counts {
        cfg.spare_counts = v.clone();
    }
    if let Some(v) = &sweep.error_rates {
        cfg.error_rates = v.clone();
    }
    if let Some(v) = sweep.chips_per_rep {
        cfg.chips_per_rep = v;
    }
    if let Some(v) = sweep.reps {
        cfg.reps = v;
    }
    if let Some(v) = sweep.spares_fallible {
        cfg.spares_fallible = v;
    }
    Ok(())
}

fn parse_binary(text: &str, what: &str) -> Result<u64, CliError> {
    u64::from_str_radix(text, 2)
        .map_err(|_| CliError::Config(format!("{what} `{text}` is not a binary address")))
}

fn run() -> Result<String, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Yield(args) => {
            let mut cfg = load_config(&args.common, "yield")?;
            apply_sweep_args(&mut cfg, &args.sweep)?;
            if args.svg.is_some() {
                cfg.svg = args.svg.clone();
            }
            cmd_yield(&cfg)
        }
        Command::Resource(args) => {
            let mut cfg = load_config(&args.common, "resource")?;
            let axis_flags = args.distances.is_some()
                || args.logical_counts.is_some()
                || args.spare_counts.is_some();
            if args.preset.is_some() && axis_flags {
                return Err(CliError::Config(
                    "--preset fixes the grid; drop the axis flags or the preset".into(),
                ));
            }
            if let Some(p) = &args.preset {
                cfg.preset = Some(p.clone());
            } else if axis_flags {
                cfg.preset = None;
            }
            if let Some(v) = &args.distances {
                cfg.distances = v.clone();
            }
            if let Some(v) = &args.logical_counts {
                cfg.logical_counts = v.clone();
            }
            if let Some(v) = &args.spare_counts {
                cfg.spare_counts = v.clone();
            }
            cmd_resource(&cfg)
        }
        Command::CircuitDemo(args) => {
            let mut cfg = load_config(&args.common, "circuit-demo")?;
            if let Some(n) = args.address_bits {
                cfg.circuit.address_bits = n;
                // Resize default contents with the register.
                cfg.circuit.data = vec![false; 1 << n.min(3)];
            }
            if let Some(x) = args.spares {
                cfg.circuit.spares = x;
                cfg.circuit.spare_data = vec![false; x as usize];
            }
            if let Some(faults) = &args.faults {
                cfg.circuit.faults = faults
                    .iter()
                    .map(|f| parse_binary(f, "fault"))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(text) = &args.data {
                cfg.circuit.data = qram_rr::cli::config::parse_bits(text)
                    .ok_or_else(|| CliError::Config(format!("data `{text}` is not binary")))?;
            }
            if let Some(text) = &args.spare_data {
                cfg.circuit.spare_data =
                    qram_rr::cli::config::parse_bits(text).ok_or_else(|| {
                        CliError::Config(format!("spare_data `{text}` is not binary"))
                    })?;
            }
            if let Some(text) = &args.address {
                cfg.circuit.address = if text == "uniform" {
                    AddressInput::Uniform
                } else {
                    AddressInput::Basis(parse_binary(text, "address")?)
                };
            }
            if let Some(mode) = &args.mode {
                cfg.circuit.mode = match mode.as_str() {
                    "read" => QueryMode::Read,
                    "write" => QueryMode::Write,
                    other => {
                        return Err(CliError::Config(format!(
                            "mode `{other}` is neither read nor write"
                        )))
                    }
                };
            }
            if let Some(dq) = args.dq {
                cfg.circuit.dq = match dq {
                    0 => false,
                    1 => true,
                    other => {
                        return Err(CliError::Config(format!("dq must be 0 or 1, got {other}")))
                    }
                };
            }
            cmd_circuit_demo(&cfg)
        }
        Command::Verify(args) => {
            let mut cfg = load_config(&args.common, "verify")?;
            if let Some(n) = args.max_address_bits {
                cfg.verify_max_address_bits = n;
            }
            if let Some(x) = args.max_spares {
                cfg.verify_max_spares = x;
            }
            if let Some(v) = args.spares_fallible {
                cfg.spares_fallible = v;
            }
            cmd_verify(&cfg)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let CliError::Verify(report) = &err {
                print!("{report}");
            }
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
