//! The full query circuit: repair oracle, address routing, and read/write,
//! verified exhaustively against the classical translation rule.
//!
//! Register plan for `n` address bits (`N = 2ⁿ` cells) and `X` spares:
//! input address (n), spare address (n, absent when `X = 0`), repair flag,
//! original-enable ancilla (initialized |1⟩), `N - 1` original routing
//! nodes, the spare routing nodes, `N + X` memory cells, and the
//! data-in / read-write / readout trio.
//!
//! Routing trees are binary trees whose deepest nodes each select a *pair*
//! of cells; the last address (or spare-address) bit picks the member at
//! the read/write gates. The original tree holds all `2ⁿ - 1` vertices and
//! is enabled by the ancilla; the spare tree is enabled by the repair flag,
//! has one vertex per nonempty pair subtree (`X - 1` for the power-of-two
//! spare counts used throughout; single-spare layouts use the repair flag
//! itself as the leaf), and branches on the spare-address bits.
//!
//! Semantics on a basis address `a` with the spare register cleared:
//! the repair oracle leaves the input address intact, raises the repair
//! flag iff `a` is faulty, writes the matched spare's binary code into the
//! spare register, and drops the enable ancilla to NOT(flag). Routing then
//! lights exactly one leaf, and the read path XORs the routed cell into
//! the readout while the write path XORs data-in into the routed cell.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;

use crate::repair::{FaultAddressTable, MemoryLocation};
use crate::statevec::{Circuit, Control, Gate, QubitState, StatevecError, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    /// Address widths outside 1..=3 are not simulable within the qubit cap.
    AddressBitsOutOfRange(u32),
    /// More spares than original cells.
    TooManySpares {
        spares: u32,
        cells: u32,
    },
    /// The register plan does not fit in the simulator.
    CapacityExceeded {
        required: usize,
        max: usize,
    },
    /// Table incompatible with the layout.
    InvalidFat(String),
    /// Memory image length must be N + X.
    MemoryLength {
        expected: usize,
        got: usize,
    },
    AddressOutOfRange {
        address: u64,
        bits: u32,
    },
    Statevec(StatevecError),
    VerificationFailed {
        cases: u64,
        failures: u64,
        first: String,
    },
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::AddressBitsOutOfRange(n) => {
                write!(f, "address width {n} outside the supported range 1..=3")
            }
            CircuitError::TooManySpares { spares, cells } => {
                write!(f, "{spares} spares exceed the {cells} original cells")
            }
            CircuitError::CapacityExceeded { required, max } => {
                write!(f, "layout needs {required} qubits, simulator caps at {max}")
            }
            CircuitError::InvalidFat(msg) => write!(f, "invalid fault table: {msg}"),
            CircuitError::MemoryLength { expected, got } => {
                write!(f, "memory image has {got} bits, layout needs {expected}")
            }
            CircuitError::AddressOutOfRange { address, bits } => {
                write!(f, "address {address} does not fit in {bits} bits")
            }
            CircuitError::Statevec(e) => e.fmt(f),
            CircuitError::VerificationFailed {
                cases,
                failures,
                first,
            } => {
                write!(f, "{failures}/{cases} cases failed; first: {first}")
            }
        }
    }
}

impl std::error::Error for CircuitError {}

impl From<StatevecError> for CircuitError {
    fn from(e: StatevecError) -> Self {
        CircuitError::Statevec(e)
    }
}

/// Register map binding every functional unit to statevector indices.
#[derive(Debug, Clone, PartialEq)]
pub struct QramLayout {
    address_bits: u32,
    num_cells: u32,
    spare_count: u32,
    ia: Range<usize>,
    sa: Range<usize>,
    repair_flag: usize,
    original_enable: usize,
    original_nodes: Range<usize>,
    spare_nodes: Range<usize>,
    original_cells: Range<usize>,
    spare_cells: Range<usize>,
    data_in: usize,
    rw_select: usize,
    readout: usize,
    total_qubits: usize,
    /// Vertices per level of the pruned spare tree (empty when X <= 1).
    spare_level_counts: Vec<usize>,
}

fn ceil_log2(v: usize) -> u32 {
    debug_assert!(v >= 1);
    usize::BITS - (v - 1).leading_zeros().min(usize::BITS)
}

/// Lays out the registers for `address_bits` address qubits and
/// `spare_count` spares.
pub fn build_layout(address_bits: u32, spare_count: u32) -> Result<QramLayout, CircuitError> {
    if !(1..=3).contains(&address_bits) {
        return Err(CircuitError::AddressBitsOutOfRange(address_bits));
    }
    let num_cells = 1u32 << address_bits;
    if spare_count > num_cells {
        return Err(CircuitError::TooManySpares {
            spares: spare_count,
            cells: num_cells,
        });
    }

    // Spare-tree shape: one vertex per pair-prefix whose subtree holds a
    // spare; contiguous per level. Single-spare layouts skip the tree.
    let spare_level_counts: Vec<usize> = if spare_count <= 1 {
        Vec::new()
    } else {
        let pairs = spare_count.div_ceil(2) as usize;
        let depth = ceil_log2(pairs);
        (0..=depth)
            .map(|k| pairs.div_ceil(1 << (depth - k)))
            .collect()
    };
    let spare_nodes_len: usize = spare_level_counts.iter().sum();

    let n = address_bits as usize;
    let cells = num_cells as usize;
    let spares = spare_count as usize;
    let sa_len = if spare_count > 0 { n } else { 0 };

    let mut cursor = 0usize;
    let mut take = |len: usize| {
        let r = cursor..cursor + len;
        cursor += len;
        r
    };
    let ia = take(n);
    let sa = take(sa_len);
    let repair_flag = take(1).start;
    let original_enable = take(1).start;
    let original_nodes = take(cells - 1);
    let spare_nodes = take(spare_nodes_len);
    let original_cells = take(cells);
    let spare_cells = take(spares);
    let data_in = take(1).start;
    let rw_select = take(1).start;
    let readout = take(1).start;
    let total_qubits = cursor;

    if total_qubits > MAX_QUBITS {
        return Err(CircuitError::CapacityExceeded {
            required: total_qubits,
            max: MAX_QUBITS,
        });
    }

    Ok(QramLayout {
        address_bits,
        num_cells,
        spare_count,
        ia,
        sa,
        repair_flag,
        original_enable,
        original_nodes,
        spare_nodes,
        original_cells,
        spare_cells,
        data_in,
        rw_select,
        readout,
        total_qubits,
        spare_level_counts,
    })
}

impl QramLayout {
    pub fn address_bits(&self) -> u32 {
        self.address_bits
    }

    pub fn num_cells(&self) -> u32 {
        self.num_cells
    }

    pub fn spare_count(&self) -> u32 {
        self.spare_count
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn input_address(&self) -> Range<usize> {
        self.ia.clone()
    }

    pub fn spare_address(&self) -> Range<usize> {
        self.sa.clone()
    }

    pub fn repair_flag(&self) -> usize {
        self.repair_flag
    }

    pub fn original_enable(&self) -> usize {
        self.original_enable
    }

    pub fn original_nodes(&self) -> Range<usize> {
        self.original_nodes.clone()
    }

    pub fn spare_nodes(&self) -> Range<usize> {
        self.spare_nodes.clone()
    }

    pub fn original_cell(&self, index: u32) -> usize {
        self.original_cells.start + index as usize
    }

    pub fn spare_cell(&self, index: u32) -> usize {
        self.spare_cells.start + index as usize
    }

    pub fn data_in(&self) -> usize {
        self.data_in
    }

    pub fn rw_select(&self) -> usize {
        self.rw_select
    }

    pub fn readout(&self) -> usize {
        self.readout
    }

    fn ia_bit(&self, bit: u32) -> usize {
        self.ia.start + bit as usize
    }

    fn sa_bit(&self, bit: u32) -> usize {
        self.sa.start + bit as usize
    }

    /// Vertex of the original tree at `level` (0 = root) with the given
    /// address-prefix value.
    fn original_node(&self, level: u32, prefix: u32) -> usize {
        self.original_nodes.start + ((1usize << level) - 1) + prefix as usize
    }

    /// Deepest original-tree vertex selecting cell pair `pair`
    /// (cells `2·pair` and `2·pair + 1`).
    pub fn original_leaf(&self, pair: u32) -> usize {
        self.original_node(self.address_bits - 1, pair)
    }

    fn spare_node(&self, level: u32, prefix: u32) -> usize {
        let base: usize = self.spare_level_counts[..level as usize].iter().sum();
        self.spare_nodes.start + base + prefix as usize
    }

    /// Qubit whose |1⟩ routes spare pair `pair`: the deepest spare-tree
    /// vertex, or the repair flag itself for single-spare layouts.
    pub fn spare_leaf(&self, pair: u32) -> usize {
        if self.spare_level_counts.is_empty() {
            self.repair_flag
        } else {
            self.spare_node(self.spare_level_counts.len() as u32 - 1, pair)
        }
    }

    /// Memory-cell qubit for a translated location.
    pub fn cell_qubit(&self, location: MemoryLocation) -> usize {
        match location {
            MemoryLocation::Original(a) => self.original_cell(a as u32),
            MemoryLocation::Spare(s) => self.spare_cell(s),
        }
    }
}

impl fmt::Display for QramLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "registers ({} qubits):", self.total_qubits)?;
        let span = |r: &Range<usize>| {
            if r.is_empty() {
                "-".to_string()
            } else if r.len() == 1 {
                format!("q{}", r.start)
            } else {
                format!("q{}..q{}", r.start, r.end - 1)
            }
        };
        writeln!(f, "  input_address    {}", span(&self.ia))?;
        writeln!(f, "  spare_address    {}", span(&self.sa))?;
        writeln!(f, "  repair_flag      q{}", self.repair_flag)?;
        writeln!(f, "  original_enable  q{}", self.original_enable)?;
        writeln!(f, "  original_nodes   {}", span(&self.original_nodes))?;
        writeln!(f, "  spare_nodes      {}", span(&self.spare_nodes))?;
        writeln!(f, "  original_cells   {}", span(&self.original_cells))?;
        writeln!(f, "  spare_cells      {}", span(&self.spare_cells))?;
        writeln!(f, "  data_in          q{}", self.data_in)?;
        writeln!(f, "  rw_select        q{}", self.rw_select)?;
        writeln!(f, "  readout          q{}", self.readout)
    }
}

fn address_controls(layout: &QramLayout, address: u64) -> Vec<Control> {
    (0..layout.address_bits)
        .map(|b| {
            if address >> b & 1 == 1 {
                Control::positive(layout.ia_bit(b))
            } else {
                Control::negative(layout.ia_bit(b))
            }
        })
        .collect()
}

fn check_fat(layout: &QramLayout, fat: &FaultAddressTable) -> Result<(), CircuitError> {
    if fat.address_bits() != layout.address_bits {
        return Err(CircuitError::InvalidFat(format!(
            "table is {} bits wide, layout is {}",
            fat.address_bits(),
            layout.address_bits
        )));
    }
    if fat.len() > layout.spare_count as usize {
        return Err(CircuitError::InvalidFat(format!(
            "{} entries exceed the {} spares",
            fat.len(),
            layout.spare_count
        )));
    }
    if let Some(&(_, sa)) = fat
        .entries()
        .iter()
        .find(|&&(_, sa)| sa >= layout.spare_count)
    {
        return Err(CircuitError::InvalidFat(format!(
            "spare index {sa} out of range (spare count {})",
            layout.spare_count
        )));
    }
    Ok(())
}

/// Repair oracle: per faulty address, a multi-controlled flip of the repair
/// flag and of the set bits of the matched spare's code; then one CNOT
/// dropping the enable ancilla wherever the flag rose.
pub fn build_repair_subcircuit(
    layout: &QramLayout,
    fat: &FaultAddressTable,
) -> Result<Circuit, CircuitError> {
    check_fat(layout, fat)?;
    let mut circuit = Circuit::new(layout.total_qubits);
    for &(fa, spare) in fat.entries() {
        let controls = address_controls(layout, fa);
        circuit.mcx(controls.clone(), layout.repair_flag)?;
        for b in 0..layout.address_bits {
            if spare >> b & 1 == 1 {
                circuit.mcx(controls.clone(), layout.sa_bit(b))?;
            }
        }
    }
    circuit.mcx(
        vec![Control::positive(layout.repair_flag)],
        layout.original_enable,
    )?;
    Ok(circuit)
}

/// Routing cascade: parent-to-child Toffolis down both trees. The original
/// tree descends on input-address bits from the enable ancilla; the spare
/// tree descends on spare-address bits from the repair flag.
pub fn build_routing_subcircuit(layout: &QramLayout) -> Circuit {
    let mut circuit = Circuit::new(layout.total_qubits);
    let n = layout.address_bits;

    circuit
        .mcx(
            vec![Control::positive(layout.original_enable)],
            layout.original_node(0, 0),
        )
        .expect("layout indices are in range");
    for level in 0..n - 1 {
        for prefix in 0..1u32 << level {
            let parent = layout.original_node(level, prefix);
            // This edge consumes address bit n-1-level.
            let bit = layout.ia_bit(n - 1 - level);
            for b in 0..2u32 {
                let child = layout.original_node(level + 1, prefix << 1 | b);
                let bit_ctl = if b == 1 {
                    Control::positive(bit)
                } else {
                    Control::negative(bit)
                };
                circuit
                    .mcx(vec![Control::positive(parent), bit_ctl], child)
                    .expect("layout indices are in range");
            }
        }
    }

    if !layout.spare_level_counts.is_empty() {
        let depth = layout.spare_level_counts.len() as u32 - 1;
        circuit
            .mcx(
                vec![Control::positive(layout.repair_flag)],
                layout.spare_node(0, 0),
            )
            .expect("layout indices are in range");
        for level in 0..depth {
            for prefix in 0..layout.spare_level_counts[level as usize] as u32 {
                let parent = layout.spare_node(level, prefix);
                // Pair-index bit depth-1-level is spare-address bit depth-level.
                let bit = layout.sa_bit(depth - level);
                for b in 0..2u32 {
                    let child_prefix = prefix << 1 | b;
                    if (child_prefix as usize) < layout.spare_level_counts[level as usize + 1] {
                        let bit_ctl = if b == 1 {
                            Control::positive(bit)
                        } else {
                            Control::negative(bit)
                        };
                        circuit
                            .mcx(
                                vec![Control::positive(parent), bit_ctl],
                                layout.spare_node(level + 1, child_prefix),
                            )
                            .expect("layout indices are in range");
                    }
                }
            }
        }
    }
    circuit
}

/// Read/write gates, one pair per cell. Read: leaf ∧ cell ∧ ¬rw flips the
/// readout. Write: leaf ∧ rw ∧ data-in flips the cell (XOR semantics; a
/// plain "set to b" is the usual read-modify-write two-query idiom).
pub fn build_rw_subcircuit(layout: &QramLayout) -> Circuit {
    let mut circuit = Circuit::new(layout.total_qubits);
    let mut emit = |leaf: usize, low_bit: Option<Control>, cell: usize| {
        let mut read = vec![Control::positive(leaf)];
        let mut write = vec![Control::positive(leaf)];
        if let Some(ctl) = low_bit {
            read.push(ctl);
            write.push(ctl);
        }
        read.push(Control::positive(cell));
        read.push(Control::negative(layout.rw_select));
        circuit
            .mcx(read, layout.readout)
            .expect("layout indices are in range");
        write.push(Control::positive(layout.rw_select));
        write.push(Control::positive(layout.data_in));
        circuit
            .mcx(write, cell)
            .expect("layout indices are in range");
    };

    for cell in 0..layout.num_cells {
        let leaf = layout.original_leaf(cell >> 1);
        let low = layout.ia_bit(0);
        let ctl = if cell & 1 == 1 {
            Control::positive(low)
        } else {
            Control::negative(low)
        };
        emit(leaf, Some(ctl), layout.original_cell(cell));
    }
    for spare in 0..layout.spare_count {
        let leaf = layout.spare_leaf(spare >> 1);
        let low = layout.sa_bit(0);
        let ctl = if spare & 1 == 1 {
            Control::positive(low)
        } else {
            Control::negative(low)
        };
        emit(leaf, Some(ctl), layout.spare_cell(spare));
    }
    circuit
}

/// A composed repair + routing + read/write circuit, ready to run.
#[derive(Debug, Clone)]
pub struct QueryCircuit {
    pub layout: QramLayout,
    pub circuit: Circuit,
}

pub fn build_query_circuit(
    layout: &QramLayout,
    fat: &FaultAddressTable,
) -> Result<QueryCircuit, CircuitError> {
    let mut circuit = build_repair_subcircuit(layout, fat)?;
    circuit.extend(&build_routing_subcircuit(layout))?;
    circuit.extend(&build_rw_subcircuit(layout))?;
    Ok(QueryCircuit {
        layout: layout.clone(),
        circuit,
    })
}

/// Query address: one basis value or the uniform superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddressInput {
    Basis(u64),
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    Read,
    Write,
}

/// Readout and repair-flag statistics of one address branch.
#[derive(Debug, Clone, PartialEq)]
pub struct AddressReadout {
    pub address: u64,
    /// P(input address register = address).
    pub probability: f64,
    /// P(readout = 1 | that address).
    pub readout_one: f64,
    /// P(repair flag = 1 | that address).
    pub repaired: f64,
}

/// Result of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub readout_zero: f64,
    pub readout_one: f64,
    /// One entry per address branch with nonzero probability.
    pub per_address: Vec<AddressReadout>,
    /// Memory cells after the query, for basis-address runs (originals
    /// then spares).
    pub post_memory: Option<Vec<bool>>,
}

/// Builds the circuit for `fat` and runs one query.
///
/// `memory` holds the N original cells followed by the X spare cells; for a
/// faulty address to read back its intended data, the assigned spare cell
/// must have been loaded with that data beforehand.
pub fn run_query(
    layout: &QramLayout,
    memory: &[bool],
    fat: &FaultAddressTable,
    address: AddressInput,
    mode: QueryMode,
    data_in: bool,
) -> Result<QueryOutcome, CircuitError> {
    let prepared = build_query_circuit(layout, fat)?;
    run_prepared_query(&prepared, memory, address, mode, data_in)
}

/// Runs one query through an already-composed circuit.
pub fn run_prepared_query(
    prepared: &QueryCircuit,
    memory: &[bool],
    address: AddressInput,
    mode: QueryMode,
    data_in: bool,
) -> Result<QueryOutcome, CircuitError> {
    let layout = &prepared.layout;
    let expected = (layout.num_cells + layout.spare_count) as usize;
    if memory.len() != expected {
        return Err(CircuitError::MemoryLength {
            expected,
            got: memory.len(),
        });
    }
    if let AddressInput::Basis(a) = address {
        if a >> layout.address_bits != 0 {
            return Err(CircuitError::AddressOutOfRange {
                address: a,
                bits: layout.address_bits,
            });
        }
    }

    let mut init = 0u64;
    init |= 1 << layout.original_enable;
    if mode == QueryMode::Write {
        init |= 1 << layout.rw_select;
    }
    if data_in {
        init |= 1 << layout.data_in;
    }
    for (i, &bit) in memory.iter().enumerate() {
        if bit {
            let q = if i < layout.num_cells as usize {
                layout.original_cell(i as u32)
            } else {
                layout.spare_cell((i - layout.num_cells as usize) as u32)
            };
            init |= 1 << q;
        }
    }
    if let AddressInput::Basis(a) = address {
        for b in 0..layout.address_bits {
            if a >> b & 1 == 1 {
                init |= 1 << layout.ia_bit(b);
            }
        }
    }

    let mut state = QubitState::from_basis_index(layout.total_qubits, init)?;
    if address == AddressInput::Uniform {
        for b in 0..layout.address_bits {
            state.apply(&Gate::H {
                target: layout.ia_bit(b),
            })?;
        }
    }
    state.run(&prepared.circuit)?;

    let outcome = match address {
        AddressInput::Basis(a) => {
            // X/MCX-only evolution keeps a basis state a basis state;
            // everything reads off the surviving index.
            let idx = state
                .dominant_basis_index(1e-9)
                .expect("basis input must stay a basis state");
            let readout = idx >> layout.readout & 1 == 1;
            let repaired = idx >> layout.repair_flag & 1 == 1;
            let mut post = Vec::with_capacity(expected);
            for i in 0..layout.num_cells {
                post.push(idx >> layout.original_cell(i) & 1 == 1);
            }
            for s in 0..layout.spare_count {
                post.push(idx >> layout.spare_cell(s) & 1 == 1);
            }
            QueryOutcome {
                readout_zero: if readout { 0.0 } else { 1.0 },
                readout_one: if readout { 1.0 } else { 0.0 },
                per_address: vec![AddressReadout {
                    address: a,
                    probability: 1.0,
                    readout_one: if readout { 1.0 } else { 0.0 },
                    repaired: if repaired { 1.0 } else { 0.0 },
                }],
                post_memory: Some(post),
            }
        }
        AddressInput::Uniform => {
            let readout_one = state.marginal_probability(&[(layout.readout, true)])?;
            let readout_zero = state.marginal_probability(&[(layout.readout, false)])?;
            let mut per_address = Vec::new();
            for a in 0..u64::from(layout.num_cells) {
                let branch: Vec<(usize, bool)> = (0..layout.address_bits)
                    .map(|b| (layout.ia_bit(b), a >> b & 1 == 1))
                    .collect();
                let p = state.marginal_probability(&branch)?;
                if p <= 0.0 {
                    continue;
                }
                let mut with_read = branch.clone();
                with_read.push((layout.readout, true));
                let mut with_flag = branch.clone();
                with_flag.push((layout.repair_flag, true));
                per_address.push(AddressReadout {
                    address: a,
                    probability: p,
                    readout_one: state.marginal_probability(&with_read)? / p,
                    repaired: state.marginal_probability(&with_flag)? / p,
                });
            }
            QueryOutcome {
                readout_zero,
                readout_one,
                per_address,
                post_memory: None,
            }
        }
    };
    Ok(outcome)
}

/// Aggregate result of an exhaustive comparison run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub cases: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
}

/// Compares one prepared circuit against the classical rule over every
/// memory image, basis address, and mode (read, write-0, write-1).
pub fn verify_query_circuit(
    prepared: &QueryCircuit,
    fat: &FaultAddressTable,
) -> Result<VerifyOutcome, CircuitError> {
    let layout = &prepared.layout;
    let cells = (layout.num_cells + layout.spare_count) as usize;
    let num_images = 1u64 << cells;

    // (cases, failures, first counterexample with its case ordinal)
    type ImageOutcome = Result<(u64, u64, Option<(u64, String)>), CircuitError>;

    let modes = [
        (QueryMode::Read, false),
        (QueryMode::Write, false),
        (QueryMode::Write, true),
    ];
    let results: Vec<ImageOutcome> = (0..num_images)
        .into_par_iter()
        .map(|image| {
            let memory: Vec<bool> = (0..cells).map(|i| image >> i & 1 == 1).collect();
            let mut cases = 0u64;
            let mut failures = 0u64;
            let mut first: Option<(u64, String)> = None;
            for a in 0..u64::from(layout.num_cells) {
                for (mode_idx, &(mode, dq)) in modes.iter().enumerate() {
                    let ordinal = (image * u64::from(layout.num_cells) + a) * 3 + mode_idx as u64;
                    cases += 1;
                    let got =
                        run_prepared_query(prepared, &memory, AddressInput::Basis(a), mode, dq)?;
                    if let Some(msg) = check_case(layout, fat, &memory, a, mode, dq, &got) {
                        failures += 1;
                        if first.is_none() {
                            first = Some((ordinal, msg));
                        }
                    }
                }
            }
            Ok((cases, failures, first))
        })
        .collect();

    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut first: Option<(u64, String)> = None;
    for r in results {
        let (c, f, fc) = r?;
        cases += c;
        failures += f;
        if let Some((ord, msg)) = fc {
            if first.as_ref().is_none_or(|(best, _)| ord < *best) {
                first = Some((ord, msg));
            }
        }
    }
    Ok(VerifyOutcome {
        cases,
        failures,
        first_counterexample: first.map(|(_, m)| m),
    })
}

fn check_case(
    layout: &QramLayout,
    fat: &FaultAddressTable,
    memory: &[bool],
    address: u64,
    mode: QueryMode,
    data_in: bool,
    got: &QueryOutcome,
) -> Option<String> {
    let location = fat.translate(address);
    let cell = match location {
        MemoryLocation::Original(a) => a as usize,
        MemoryLocation::Spare(s) => layout.num_cells as usize + s as usize,
    };
    let describe = |what: &str| {
        let fat_text = fat
            .entries()
            .iter()
            .map(|(fa, sa)| format!("{fa:b}->S{sa}"))
            .collect::<Vec<_>>()
            .join(",");
        let mem_text: Vec<u8> = memory.iter().map(|&b| u8::from(b)).collect();
        let width = layout.address_bits as usize;
        Some(format!(
            "fat=[{fat_text}] mem={mem_text:?} address={address:0width$b} mode={mode:?} dq={data_in}: {what}"
        ))
    };

    let branch = &got.per_address[0];
    let want_flag = if location.is_spare() { 1.0 } else { 0.0 };
    if (branch.repaired - want_flag).abs() > 1e-9 {
        return describe(&format!("repair flag {} want {want_flag}", branch.repaired));
    }

    let mut want_memory: Vec<bool> = memory.to_vec();
    let want_readout = match mode {
        QueryMode::Read => f64::from(u8::from(memory[cell])),
        QueryMode::Write => {
            want_memory[cell] ^= data_in;
            0.0
        }
    };
    if (got.readout_one - want_readout).abs() > 1e-9 {
        return describe(&format!("readout {} want {want_readout}", got.readout_one));
    }
    if (branch.readout_one - want_readout).abs() > 1e-9 {
        return describe("conditional readout mismatch");
    }
    match &got.post_memory {
        Some(post) if *post == want_memory => None,
        Some(post) => describe(&format!(
            "post memory {:?} want {:?}",
            post.iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
            want_memory.iter().map(|&b| u8::from(b)).collect::<Vec<_>>()
        )),
        None => describe("missing post memory"),
    }
}

/// Report of a fully passed exhaustive verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub address_bits: u32,
    pub spare_count: u32,
    pub fat_configurations: u64,
    pub cases: u64,
}

/// Exhaustively checks the circuit against the classical rule for every
/// fault pattern with up to `spare_count` faults, every memory image,
/// every basis address, and every mode. Errors with the first
/// counterexample on any mismatch.
pub fn verify_against_classical(
    address_bits: u32,
    spare_count: u32,
) -> Result<VerifyReport, CircuitError> {
    let layout = build_layout(address_bits, spare_count)?;
    let cells = layout.num_cells();

    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut first: Option<String> = None;
    let mut fat_configurations = 0u64;

    // Every fault set of size <= X, as address bitmasks in ascending order.
    for mask in 0..1u32 << cells {
        if mask.count_ones() > spare_count {
            continue;
        }
        fat_configurations += 1;
        let faulty: Vec<u64> = (0..cells)
            .filter(|&a| mask >> a & 1 == 1)
            .map(u64::from)
            .collect();
        let entries: Vec<(u64, u32)> = faulty
            .iter()
            .enumerate()
            .map(|(i, &fa)| (fa, i as u32))
            .collect();
        let fat =
            FaultAddressTable::new(address_bits, entries).expect("canonical fault sets are valid");
        let prepared = build_query_circuit(&layout, &fat)?;
        let outcome = verify_query_circuit(&prepared, &fat)?;
        cases += outcome.cases;
        failures += outcome.failures;
        if first.is_none() {
            first = outcome.first_counterexample;
        }
    }

    if failures > 0 {
        return Err(CircuitError::VerificationFailed {
            cases,
            failures,
            first: first.unwrap_or_default(),
        });
    }
    Ok(VerifyReport {
        address_bits,
        spare_count,
        fat_configurations,
        cases,
    })
}
