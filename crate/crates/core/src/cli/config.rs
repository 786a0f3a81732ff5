//! Run configuration: a line-oriented `key = value` text format with
//! `[section]` headers. Every key mirrors a field of [`RunConfig`]; command
//! line flags override file values. Emitting and re-parsing a config
//! reproduces the identical run.

use std::fmt;
use std::path::PathBuf;

use crate::circuit::{AddressInput, QueryMode};

/// Defaults match the reference experimental setup: 1,000 chips per
/// repetition, 10 repetitions, error rates 0.5%..1% in 0.1% steps.
pub const DEFAULT_CHIPS_PER_REP: u32 = 1000;
pub const DEFAULT_REPS: u32 = 10;
pub const DEFAULT_ERROR_RATES: [f64; 6] = [0.005, 0.006, 0.007, 0.008, 0.009, 0.01];
pub const DEFAULT_LOGICAL_COUNTS: [u32; 7] = [16, 32, 64, 128, 256, 512, 1024];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Circuit-demo inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDemoConfig {
    pub address_bits: u32,
    pub spares: u32,
    /// Faulty original addresses.
    pub faults: Vec<u64>,
    /// Original cell contents, cell 0 first.
    pub data: Vec<bool>,
    /// Spare cell contents, spare 0 first.
    pub spare_data: Vec<bool>,
    pub address: AddressInput,
    pub mode: QueryMode,
    pub dq: bool,
}

impl Default for CircuitDemoConfig {
    fn default() -> Self {
        Self {
            address_bits: 2,
            spares: 2,
            faults: Vec::new(),
            data: vec![false; 4],
            spare_data: vec![false; 2],
            address: AddressInput::Basis(0),
            mode: QueryMode::Read,
            dq: false,
        }
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub preset: Option<String>,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub emit_config: Option<PathBuf>,

    pub distances: Vec<u32>,
    pub logical_counts: Vec<u32>,
    pub spare_counts: Vec<u32>,
    pub error_rates: Vec<f64>,
    pub chips_per_rep: u32,
    pub reps: u32,
    pub spares_fallible: bool,

    pub circuit: CircuitDemoConfig,

    pub verify_max_address_bits: u32,
    pub verify_max_spares: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: "yield".to_string(),
            preset: None,
            master_seed: 1,
            output: None,
            svg: None,
            emit_config: None,
            distances: vec![3],
            logical_counts: DEFAULT_LOGICAL_COUNTS.to_vec(),
            spare_counts: vec![0],
            error_rates: DEFAULT_ERROR_RATES.to_vec(),
            chips_per_rep: DEFAULT_CHIPS_PER_REP,
            reps: DEFAULT_REPS,
            spares_fallible: true,
            circuit: CircuitDemoConfig::default(),
            verify_max_address_bits: 2,
            verify_max_spares: 2,
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl RunConfig {
    /// Serializes the full configuration; [`RunConfig::parse`] inverts this
    /// exactly. Floats are printed in round-trip form.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("# qram-rr run configuration\n");
        out.push_str("[run]\n");
        out.push_str(&format!("command = {}\n", self.command));
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset = {p}\n"));
        }
        out.push_str(&format!("master_seed = {}\n", self.master_seed));
        if let Some(p) = &self.output {
            out.push_str(&format!("output = {}\n", p.display()));
        }
        if let Some(p) = &self.svg {
            out.push_str(&format!("svg = {}\n", p.display()));
        }
        if let Some(p) = &self.emit_config {
            out.push_str(&format!("emit_config = {}\n", p.display()));
        }
        out.push_str("\n[sweep]\n");
        out.push_str(&format!("distances = {}\n", join(&self.distances)));
        out.push_str(&format!(
            "logical_counts = {}\n",
            join(&self.logical_counts)
        ));
        out.push_str(&format!("spare_counts = {}\n", join(&self.spare_counts)));
        out.push_str(&format!("error_rates = {}\n", join(&self.error_rates)));
        out.push_str(&format!("chips_per_rep = {}\n", self.chips_per_rep));
        out.push_str(&format!("reps = {}\n", self.reps));
        out.push_str(&format!("spares_fallible = {}\n", self.spares_fallible));
        out.push_str("\n[circuit]\n");
        out.push_str(&format!("address_bits = {}\n", self.circuit.address_bits));
        out.push_str(&format!("spares = {}\n", self.circuit.spares));
        let faults: Vec<String> = self
            .circuit
            .faults
            .iter()
            .map(|a| format!("{a:0width$b}", width = self.circuit.address_bits as usize))
            .collect();
        out.push_str(&format!("faults = {}\n", faults.join(",")));
        out.push_str(&format!("data = {}\n", bits_string(&self.circuit.data)));
        out.push_str(&format!(
            "spare_data = {}\n",
            bits_string(&self.circuit.spare_data)
        ));
        match self.circuit.address {
            AddressInput::Uniform => out.push_str("address = uniform\n"),
            AddressInput::Basis(a) => out.push_str(&format!(
                "address = {a:0width$b}\n",
                width = self.circuit.address_bits as usize
            )),
        }
        out.push_str(&format!(
            "mode = {}\n",
            match self.circuit.mode {
                QueryMode::Read => "read",
                QueryMode::Write => "write",
            }
        ));
        out.push_str(&format!("dq = {}\n", u8::from(self.circuit.dq)));
        out.push_str("\n[verify]\n");
        out.push_str(&format!(
            "max_address_bits = {}\n",
            self.verify_max_address_bits
        ));
        out.push_str(&format!("max_spares = {}\n", self.verify_max_spares));
        out
    }

    /// Parses the text form, applying keys over the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value)
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |what: &str| ConfigError(format!("bad {what} value `{value}`"));
        match (section, key) {
            ("run", "command") => self.command = value.to_string(),
            ("run", "preset") => self.preset = Some(value.to_string()),
            ("run", "master_seed") => {
                self.master_seed = value.parse().map_err(|_| bad("master_seed"))?
            }
            ("run", "output") => self.output = Some(PathBuf::from(value)),
            ("run", "svg") => self.svg = Some(PathBuf::from(value)),
            ("run", "emit_config") => self.emit_config = Some(PathBuf::from(value)),
            ("sweep", "distances") => {
                self.distances = parse_list(value).map_err(|_| bad("distances"))?
            }
            ("sweep", "logical_counts") => {
                self.logical_counts = parse_list(value).map_err(|_| bad("logical_counts"))?
            }
            ("sweep", "spare_counts") => {
                self.spare_counts = parse_list(value).map_err(|_| bad("spare_counts"))?
            }
            ("sweep", "error_rates") => {
                self.error_rates = parse_list(value).map_err(|_| bad("error_rates"))?
            }
            ("sweep", "chips_per_rep") => {
                self.chips_per_rep = value.parse().map_err(|_| bad("chips_per_rep"))?
            }
            ("sweep", "reps") => self.reps = value.parse().map_err(|_| bad("reps"))?,
            ("sweep", "spares_fallible") => {
                self.spares_fallible = value.parse().map_err(|_| bad("spares_fallible"))?
            }
            ("circuit", "address_bits") => {
                self.circuit.address_bits = value.parse().map_err(|_| bad("address_bits"))?
            }
            ("circuit", "spares") => {
                self.circuit.spares = value.parse().map_err(|_| bad("spares"))?
            }
            ("circuit", "faults") => {
                self.circuit.faults = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|s| u64::from_str_radix(s.trim(), 2))
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("faults"))?
                }
            }
            ("circuit", "data") => {
                self.circuit.data = parse_bits(value).ok_or_else(|| bad("data"))?
            }
            ("circuit", "spare_data") => {
                self.circuit.spare_data = parse_bits(value).ok_or_else(|| bad("spare_data"))?
            }
            ("circuit", "address") => {
                self.circuit.address = if value == "uniform" {
                    AddressInput::Uniform
                } else {
                    AddressInput::Basis(u64::from_str_radix(value, 2).map_err(|_| bad("address"))?)
                }
            }
            ("circuit", "mode") => {
                self.circuit.mode = match value {
                    "read" => QueryMode::Read,
                    "write" => QueryMode::Write,
                    _ => return Err(bad("mode")),
                }
            }
            ("circuit", "dq") => {
                self.circuit.dq = match value {
                    "0" | "false" => false,
                    "1" | "true" => true,
                    _ => return Err(bad("dq")),
                }
            }
            ("verify", "max_address_bits") => {
                self.verify_max_address_bits = value.parse().map_err(|_| bad("max_address_bits"))?
            }
            ("verify", "max_spares") => {
                self.verify_max_spares = value.parse().map_err(|_| bad("max_spares"))?
            }
            _ => {
                return Err(ConfigError(format!(
                    "unknown key `{key}` in section `[{section}]`"
                )))
            }
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, ()> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| ()))
        .collect()
}

/// "1011" -> [true, false, true, true]; leftmost character is index 0.
pub fn parse_bits(value: &str) -> Option<Vec<bool>> {
    value
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}
