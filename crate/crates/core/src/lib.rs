//! Yield and repair workbench for bucket-brigade qRAM built from
//! surface-code logical qubits.
//!
//! The pieces, bottom to top:
//!
//! - [`qec`] — per-patch fabrication-defect model (`2d² - 1` physical
//!   qubits, count-based defect predicate) with an exact binomial-tail
//!   oracle.
//! - [`yield_engine`] — seeded, thread-count-independent Monte-Carlo
//!   fabrication of whole chips with spare-based repair, swept over
//!   (distance, size, spares, error rate) grids, cross-checked against a
//!   closed-form yield.
//! - [`resource`] — memory/peripheral physical-qubit counts and spare
//!   overhead percentages.
//! - [`repair`] — fault-address table construction and the classical
//!   address-translation rule.
//! - [`statevec`] — a dense statevector simulator for X / H /
//!   multi-controlled-X.
//! - [`circuit`] — the repair + routing + read/write query circuit,
//!   verified exhaustively against [`repair`]'s translation rule.
//! - [`cli`] — commands, config files, CSV and SVG emission for the
//!   `qram-rr` binary.

pub mod circuit;
pub mod cli;
pub mod qec;
pub mod repair;
pub mod resource;
pub mod statevec;
pub mod yield_engine;
