//! Gate inherent fault (GIF-PO) test model.
//!
//! The crate is organised as a pipeline:
//!
//! * [`circuit`] parses word-level GNL netlists, validates them and
//!   decomposes every complex gate into a small primitive library.
//! * [`gif`] enumerates the sensitization classes of every primitive,
//!   reduces the design by constant and open propagation and duplicates the
//!   classes onto the primary outputs they reach.
//! * [`sim`] runs cycle-accurate good-machine simulation and records which
//!   GIF-PO points each cycle covers.
//! * [`stuckat`] is the gate-level single stuck-at fault simulator used as
//!   ground truth.
//! * [`synth`] lowers an elaborated design into several functionally
//!   equivalent gate netlists.
//! * [`tpg`] generates, selects and compacts test sets.
//! * [`workbench`] ties the flow together into persistent, hashed runs.

pub mod circuit;
pub mod gif;
pub mod logic;
pub mod sim;
pub mod stuckat;
pub mod synth;
pub mod tpg;
pub mod workbench;

pub use circuit::{elaborate, parse_circuit, Circuit, ElaboratedCircuit};
pub use gif::{build_universe, GifPoUniverse};
pub use sim::{run_coverage, CoverageDb, Stimulus};
pub use stuckat::{fault_simulate, GateNetlist};
