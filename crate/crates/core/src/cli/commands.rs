//! The four commands. Each returns the text for stdout; files named in the
//! config are written as a side effect. Exit codes: 0 success, 2 config
//! error, 3 I/O error, 4 verification failure.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::circuit::{
    self, build_layout, build_query_circuit, run_prepared_query, AddressInput, QueryMode,
    QueryOutcome,
};
use crate::repair::{build_fat, DefectMap, FaultAddressTable, MemoryLocation};
use crate::resource::{self, ResourceRow};
use crate::yield_engine::{self, simulate_yield, ChipSpec, SweepGrid, YieldReport};

use super::config::RunConfig;
use super::{csv, presets, svg};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent configuration (exit 2).
    Config(String),
    /// Filesystem failure (exit 3).
    Io(String),
    /// Circuit-vs-oracle or MC-vs-oracle mismatch (exit 4); carries the
    /// full report text.
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Verify(_) => write!(f, "verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn emit_config_if_asked(cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(path) = &cfg.emit_config {
        write_file(path, &cfg.emit())?;
    }
    Ok(())
}

fn yield_grids(cfg: &RunConfig) -> Result<Vec<SweepGrid>, CliError> {
    match &cfg.preset {
        Some(name) => presets::yield_preset_grids(name, cfg).ok_or_else(|| {
            CliError::Config(format!(
                "unknown yield preset `{name}` (known: {})",
                presets::YIELD_PRESETS.join(", ")
            ))
        }),
        None => Ok(vec![SweepGrid {
            distances: cfg.distances.clone(),
            logical_counts: cfg.logical_counts.clone(),
            spare_counts: cfg.spare_counts.clone(),
            error_rates: cfg.error_rates.clone(),
            chips_per_rep: cfg.chips_per_rep,
            reps: cfg.reps,
            master_seed: cfg.master_seed,
            spares_fallible: cfg.spares_fallible,
        }]),
    }
}

/// Runs the configured sweep and emits the yield CSV (plus an optional
/// chart). Returns the CSV when no output path is set.
pub fn cmd_yield(cfg: &RunConfig) -> Result<String, CliError> {
    let grids = yield_grids(cfg)?;
    let mut rows: Vec<YieldReport> = Vec::new();
    let mut offset = 0u64;
    for grid in &grids {
        let mut batch = yield_engine::sweep_with_offset(grid, offset)
            .map_err(|e| CliError::Config(e.to_string()))?;
        offset += grid.num_points() as u64;
        rows.append(&mut batch);
    }

    let text = csv::yield_csv(&rows);
    if let Some(path) = &cfg.svg {
        write_file(path, &svg::render_chart(&rows))?;
    }
    emit_config_if_asked(cfg)?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => Ok(text),
    }
}

/// Emits the resource CSV for the configured grid (or the full reference
/// grid under `--preset table1`).
pub fn cmd_resource(cfg: &RunConfig) -> Result<String, CliError> {
    let rows: Vec<ResourceRow> = match cfg.preset.as_deref() {
        Some("table1") => resource::reference_grid(),
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown resource preset `{other}` (known: table1)"
            )))
        }
        None => {
            let mut rows = Vec::new();
            for &d in &cfg.distances {
                for &n in &cfg.logical_counts {
                    for &x in &cfg.spare_counts {
                        rows.push(ResourceRow {
                            distance: d,
                            num_logical: n,
                            num_spares: x,
                            breakdown: resource::overhead(d, n, x)
                                .map_err(|e| CliError::Config(e.to_string()))?,
                        });
                    }
                }
            }
            rows
        }
    };

    let text = csv::resource_csv(&rows);
    emit_config_if_asked(cfg)?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => Ok(text),
    }
}

fn bits_text(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Expected readout bit for one address under the classical rule.
fn oracle_bit(fat: &FaultAddressTable, memory: &[bool], cells: u32, address: u64) -> bool {
    match fat.translate(address) {
        MemoryLocation::Original(a) => memory[a as usize],
        MemoryLocation::Spare(s) => memory[(cells + s) as usize],
    }
}

fn demo_verdict(
    fat: &FaultAddressTable,
    memory: &[bool],
    cells: u32,
    mode: QueryMode,
    dq: bool,
    outcome: &QueryOutcome,
) -> Result<(), String> {
    for branch in &outcome.per_address {
        let want_flag = f64::from(u8::from(fat.translate(branch.address).is_spare()));
        if (branch.repaired - want_flag).abs() > 1e-9 {
            return Err(format!(
                "address {}: repair flag {} differs from oracle {}",
                branch.address, branch.repaired, want_flag
            ));
        }
        let want = match mode {
            QueryMode::Read => f64::from(u8::from(oracle_bit(fat, memory, cells, branch.address))),
            QueryMode::Write => 0.0,
        };
        if (branch.readout_one - want).abs() > 1e-9 {
            return Err(format!(
                "address {}: readout {} differs from oracle {}",
                branch.address, branch.readout_one, want
            ));
        }
    }
    if let (QueryMode::Write, Some(post)) = (mode, &outcome.post_memory) {
        let mut want = memory.to_vec();
        for branch in &outcome.per_address {
            let cell = match fat.translate(branch.address) {
                MemoryLocation::Original(a) => a as usize,
                MemoryLocation::Spare(s) => (cells + s) as usize,
            };
            want[cell] ^= dq;
        }
        if post != &want {
            return Err(format!(
                "post memory {} differs from oracle {}",
                bits_text(post),
                bits_text(&want)
            ));
        }
    }
    Ok(())
}

/// Builds the configured demo chip, prints layout / fault table / gate
/// listing / readout, and compares the circuit against the classical rule.
pub fn cmd_circuit_demo(cfg: &RunConfig) -> Result<String, CliError> {
    let demo = &cfg.circuit;
    let layout = build_layout(demo.address_bits, demo.spares)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let cells = layout.num_cells();

    let map = DefectMap::new(demo.address_bits, demo.faults.iter().copied(), [])
        .map_err(|e| CliError::Config(e.to_string()))?;
    let fat = build_fat(&map, demo.spares).map_err(|e| CliError::Config(e.to_string()))?;

    if demo.data.len() != cells as usize {
        return Err(CliError::Config(format!(
            "data holds {} bits, layout has {cells} original cells",
            demo.data.len()
        )));
    }
    if demo.spare_data.len() != demo.spares as usize {
        return Err(CliError::Config(format!(
            "spare_data holds {} bits, layout has {} spare cells",
            demo.spare_data.len(),
            demo.spares
        )));
    }
    let mut memory = demo.data.clone();
    memory.extend_from_slice(&demo.spare_data);

    let prepared =
        build_query_circuit(&layout, &fat).map_err(|e| CliError::Config(e.to_string()))?;
    let outcome = run_prepared_query(&prepared, &memory, demo.address, demo.mode, demo.dq)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut out = String::new();
    out.push_str(&layout.to_string());
    out.push_str("\nfault address table:\n");
    if fat.is_empty() {
        out.push_str("(empty)\n");
    } else {
        out.push_str(&fat.to_string());
    }
    out.push_str(&format!(
        "\ngate listing ({} gates):\n",
        prepared.circuit.len()
    ));
    out.push_str(&prepared.circuit.to_string());

    let address_text = match demo.address {
        AddressInput::Uniform => "uniform".to_string(),
        AddressInput::Basis(a) => {
            format!("{a:0width$b}", width = demo.address_bits as usize)
        }
    };
    let mode_text = match demo.mode {
        QueryMode::Read => "read",
        QueryMode::Write => "write",
    };
    out.push_str(&format!(
        "\nquery: address={address_text} mode={mode_text} dq={}\n",
        u8::from(demo.dq)
    ));
    out.push_str(&format!(
        "readout distribution: P(0)={:.6} P(1)={:.6}\n",
        outcome.readout_zero, outcome.readout_one
    ));
    for branch in &outcome.per_address {
        out.push_str(&format!(
            "  address {:0width$b}: p={:.6} readout1={:.6} repaired={:.6} -> {}\n",
            branch.address,
            branch.probability,
            branch.readout_one,
            branch.repaired,
            fat.translate(branch.address),
            width = demo.address_bits as usize,
        ));
    }
    if let Some(post) = &outcome.post_memory {
        out.push_str(&format!(
            "post memory: {} (originals) {} (spares)\n",
            bits_text(&post[..cells as usize]),
            bits_text(&post[cells as usize..])
        ));
    }

    let verdict = demo_verdict(&fat, &memory, cells, demo.mode, demo.dq, &outcome);
    let (bit, p) = if outcome.readout_one >= outcome.readout_zero {
        (1, outcome.readout_one)
    } else {
        (0, outcome.readout_zero)
    };
    match verdict {
        Ok(()) => {
            out.push_str(&format!("Readout={bit} p={p:.3}, MATCH\n"));
            emit_config_if_asked(cfg)?;
            match &cfg.output {
                Some(path) => {
                    write_file(path, &out)?;
                    Ok(format!("wrote report to {}\n", path.display()))
                }
                None => Ok(out),
            }
        }
        Err(why) => {
            out.push_str(&format!("Readout={bit} p={p:.3}, MISMATCH: {why}\n"));
            Err(CliError::Verify(out))
        }
    }
}

/// Exhaustive circuit checks over the configured scope plus a seeded
/// MC-vs-oracle spot suite. All-pass exits 0; any failure exits 4.
pub fn cmd_verify(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let mut checks = 0u32;
    let mut failures = 0u32;

    let max_n = cfg.verify_max_address_bits.min(3);
    let mut scope: Vec<(u32, u32)> = Vec::new();
    for n in 1..=max_n {
        for x in 0..=cfg.verify_max_spares.min(1 << n) {
            scope.push((n, x));
        }
    }
    if scope.is_empty() {
        out.push_str("WARN empty verification scope; vacuously passing the circuit suite\n");
    }

    for &(n, x) in &scope {
        match circuit::verify_against_classical(n, x) {
            Ok(report) => {
                checks += 1;
                out.push_str(&format!(
                    "PASS circuit n={n} X={x} fats={} cases={}\n",
                    report.fat_configurations, report.cases
                ));
            }
            Err(circuit::CircuitError::CapacityExceeded { required, max }) => {
                out.push_str(&format!(
                    "SKIP circuit n={n} X={x} (needs {required} qubits, cap {max})\n"
                ));
            }
            Err(circuit::CircuitError::VerificationFailed {
                cases,
                failures: f,
                first,
            }) => {
                checks += 1;
                failures += 1;
                out.push_str(&format!(
                    "FAIL circuit n={n} X={x} ({f}/{cases} cases): {first}\n"
                ));
            }
            Err(other) => return Err(CliError::Config(other.to_string())),
        }
    }

    // MC vs closed form, 10^4 chips per point, four-sigma band.
    let mc_points = [
        (3u32, 16u32, 0u32, 0.01),
        (3, 16, 1, 0.01),
        (3, 64, 2, 0.008),
        (5, 32, 0, 0.01),
    ];
    for (d, n, x, p) in mc_points {
        let spec = ChipSpec::new(n, x, d, p)
            .map_err(|e| CliError::Config(e.to_string()))?
            .with_spares_fallible(cfg.spares_fallible);
        let report = simulate_yield(&spec, 2000, 5, cfg.master_seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let diff = (report.yield_mean_pct - report.analytic_pct).abs();
        let band = 4.0 * report.mc_standard_error_pct();
        checks += 1;
        if diff <= band {
            out.push_str(&format!(
                "PASS mc d={d} N={n} X={x} p={p} |mc-analytic|={diff:.3} <= 4se={band:.3}\n"
            ));
        } else {
            failures += 1;
            out.push_str(&format!(
                "FAIL mc d={d} N={n} X={x} p={p} |mc-analytic|={diff:.3} > 4se={band:.3}\n"
            ));
        }
    }

    out.push_str(&format!(
        "summary: {}/{checks} checks passed\n",
        checks - failures
    ));
    emit_config_if_asked(cfg)?;
    if failures > 0 {
        Err(CliError::Verify(out))
    } else {
        Ok(out)
    }
}
