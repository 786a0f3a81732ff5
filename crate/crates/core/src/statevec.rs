//! Dense statevector simulation of the X / H / multi-controlled-X gate set.
//!
//! Bit order: qubit 0 is the least significant bit of the amplitude index.
//! Bitstrings are written qubit-0 first, so `from_bits("10")` puts qubit 0
//! in |1⟩ and qubit 1 in |0⟩ (amplitude index 1).
//!
//! States are capped at [`MAX_QUBITS`] qubits (2²⁴ amplitudes). Gates are
//! applied in place; a state is owned by one execution context at a time.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

/// Hard cap on register width; keeps a state within 2²⁴ amplitudes.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum StatevecError {
    TooManyQubits {
        requested: usize,
        max: usize,
    },
    IndexOutOfRange {
        qubit: usize,
        num_qubits: usize,
    },
    /// A control qubit coincides with the gate target.
    ControlOnTarget {
        qubit: usize,
    },
    /// The same qubit appears twice in a control list.
    DuplicateControl {
        qubit: usize,
    },
    /// Amplitude vector length is not a power of two.
    BadAmplitudeCount(usize),
    /// Bitstrings may contain only '0' and '1'.
    BadBitstring(String),
    BasisIndexOutOfRange {
        index: u64,
        num_qubits: usize,
    },
}

impl fmt::Display for StatevecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatevecError::TooManyQubits { requested, max } => {
                write!(f, "{requested} qubits requested, max {max}")
            }
            StatevecError::IndexOutOfRange { qubit, num_qubits } => {
                write!(
                    f,
                    "qubit {qubit} out of range for a {num_qubits}-qubit state"
                )
            }
            StatevecError::ControlOnTarget { qubit } => {
                write!(f, "qubit {qubit} is both control and target")
            }
            StatevecError::DuplicateControl { qubit } => {
                write!(f, "qubit {qubit} listed twice as control")
            }
            StatevecError::BadAmplitudeCount(n) => {
                write!(f, "amplitude count {n} is not a power of two")
            }
            StatevecError::BadBitstring(s) => write!(f, "bitstring `{s}` has non-binary digits"),
            StatevecError::BasisIndexOutOfRange { index, num_qubits } => {
                write!(
                    f,
                    "basis index {index} out of range for {num_qubits} qubits"
                )
            }
        }
    }
}

impl std::error::Error for StatevecError {}

/// Control polarity: positive fires on |1⟩, negative on |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Negative,
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.polarity {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        };
        write!(f, "{sign}q{}", self.qubit)
    }
}

/// One gate: X and H are single-qubit; MCX flips the target where every
/// control matches its polarity.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X {
        target: usize,
    },
    H {
        target: usize,
    },
    Mcx {
        controls: Vec<Control>,
        target: usize,
    },
}

impl Gate {
    pub fn target(&self) -> usize {
        match self {
            Gate::X { target } | Gate::H { target } => *target,
            Gate::Mcx { target, .. } => *target,
        }
    }

    pub fn controls(&self) -> &[Control] {
        match self {
            Gate::Mcx { controls, .. } => controls,
            _ => &[],
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), StatevecError> {
        let check = |qubit: usize| {
            if qubit >= num_qubits {
                Err(StatevecError::IndexOutOfRange { qubit, num_qubits })
            } else {
                Ok(())
            }
        };
        check(self.target())?;
        let mut seen = 0u64;
        for c in self.controls() {
            check(c.qubit)?;
            if c.qubit == self.target() {
                return Err(StatevecError::ControlOnTarget { qubit: c.qubit });
            }
            if seen >> c.qubit & 1 == 1 {
                return Err(StatevecError::DuplicateControl { qubit: c.qubit });
            }
            seen |= 1 << c.qubit;
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X { target } => write!(f, "X q{target}"),
            Gate::H { target } => write!(f, "H q{target}"),
            Gate::Mcx { controls, target } => {
                write!(f, "MCX q{target} <-")?;
                for c in controls {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
        }
    }
}

/// An ordered gate list over a fixed register width. Gates are validated
/// as they are pushed, so a stored circuit always runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), StatevecError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn x(&mut self, target: usize) -> Result<(), StatevecError> {
        self.push(Gate::X { target })
    }

    pub fn h(&mut self, target: usize) -> Result<(), StatevecError> {
        self.push(Gate::H { target })
    }

    pub fn mcx(&mut self, controls: Vec<Control>, target: usize) -> Result<(), StatevecError> {
        self.push(Gate::Mcx { controls, target })
    }

    /// Appends every gate of `other` (same register width required).
    pub fn extend(&mut self, other: &Circuit) -> Result<(), StatevecError> {
        for g in other.gates() {
            self.push(g.clone())?;
        }
        Ok(())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Amplitude vector over 2^m basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl QubitState {
    /// All-zeros basis state |0…0⟩.
    pub fn zero(num_qubits: usize) -> Result<Self, StatevecError> {
        Self::from_basis_index(num_qubits, 0)
    }

    /// Basis state |index⟩.
    pub fn from_basis_index(num_qubits: usize, index: u64) -> Result<Self, StatevecError> {
        if num_qubits > MAX_QUBITS {
            return Err(StatevecError::TooManyQubits {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        if index >> num_qubits != 0 {
            return Err(StatevecError::BasisIndexOutOfRange { index, num_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Basis state from a bitstring written qubit-0 first; the empty string
    /// is the scalar state.
    pub fn from_bits(bits: &str) -> Result<Self, StatevecError> {
        if bits.len() > MAX_QUBITS {
            return Err(StatevecError::TooManyQubits {
                requested: bits.len(),
                max: MAX_QUBITS,
            });
        }
        let mut index = 0u64;
        for (qubit, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << qubit,
                _ => return Err(StatevecError::BadBitstring(bits.to_string())),
            }
        }
        Self::from_basis_index(bits.len(), index)
    }

    /// Wraps raw amplitudes; the caller owns normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StatevecError> {
        if !amps.len().is_power_of_two() {
            return Err(StatevecError::BadAmplitudeCount(amps.len()));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(StatevecError::TooManyQubits {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), StatevecError> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::X { target } => self.apply_x(*target),
            Gate::H { target } => self.apply_h(*target),
            Gate::Mcx { controls, target } => self.apply_mcx(controls, *target),
        }
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<(), StatevecError> {
        for gate in circuit.gates() {
            self.apply(gate)?;
        }
        Ok(())
    }

    fn apply_x(&mut self, target: usize) {
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    fn apply_h(&mut self, target: usize) {
        let tmask = 1usize << target;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & tmask == 0 {
                let a = self.amps[i];
                let b = self.amps[i | tmask];
                self.amps[i] = (a + b) * s;
                self.amps[i | tmask] = (a - b) * s;
            }
        }
    }

    /// Swaps the target pair only inside the subcube where every control
    /// matches its polarity: 2^(m-k-1) visits instead of a full scan. The
    /// subcube is walked with the carry trick — forcing the fixed bits to
    /// one before incrementing steps the free bits in O(1).
    fn apply_mcx(&mut self, controls: &[Control], target: usize) {
        let tmask = 1usize << target;
        let mut fixed = tmask;
        let mut pattern = 0usize;
        for c in controls {
            fixed |= 1 << c.qubit;
            if c.polarity == Polarity::Positive {
                pattern |= 1 << c.qubit;
            }
        }
        let full = (1usize << self.num_qubits) - 1;
        let free_mask = full & !fixed;
        let mut sub = 0usize;
        loop {
            let idx = sub | pattern;
            self.amps.swap(idx, idx | tmask);
            if sub == free_mask {
                break;
            }
            sub = ((sub | fixed) + 1) & free_mask;
        }
    }

    /// Probability that every assigned qubit reads the given value; exact
    /// sum over consistent basis states, no sampling.
    pub fn marginal_probability(&self, assignment: &[(usize, bool)]) -> Result<f64, StatevecError> {
        let mut mask = 0usize;
        let mut pattern = 0usize;
        for &(qubit, value) in assignment {
            if qubit >= self.num_qubits {
                return Err(StatevecError::IndexOutOfRange {
                    qubit,
                    num_qubits: self.num_qubits,
                });
            }
            mask |= 1 << qubit;
            if value {
                pattern |= 1 << qubit;
            }
        }
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == pattern)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// If the state is a single basis state (within `tol` of unit
    /// probability), returns its index. Scans for the first amplitude
    /// carrying more than half the probability; any state with a
    /// unit-probability entry has exactly one such amplitude.
    pub fn dominant_basis_index(&self, tol: f64) -> Option<u64> {
        let hit = self.amps.iter().position(|a| a.norm_sqr() > 0.5)?;
        ((self.amps[hit].norm_sqr() - 1.0).abs() <= tol).then_some(hit as u64)
    }

    /// Draws one basis state with probability |amplitude|², returned as a
    /// qubit-0-first bitstring. The state must be normalized.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        let norm = self.norm_sqr();
        assert!(
            (norm - 1.0).abs() <= 1e-9,
            "sampling requires a normalized state (norm² = {norm})"
        );
        let mut u: f64 = rng.gen();
        let mut drawn = self.amps.len() - 1;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if u < p {
                drawn = i;
                break;
            }
            u -= p;
        }
        (0..self.num_qubits)
            .map(|q| if drawn >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}
