//! Single stuck-at fault model: gate netlists, fault simulation and
//! redundancy removal.

mod faultsim;
pub(crate) mod netlist;
mod redundancy;

pub use faultsim::{
    detection_sets, enumerate_stuckat, exhaustive_frames, fault_name, fault_simulate, fault_simulate_serial, FaultSimError,
    FaultSimResult, FaultStatus, StuckAtFault,
};
pub use netlist::{parse_netlist, print_netlist, GateNetlist, GateOp, Lit, NGate, NetRegister, C1_NETLIST, C2_NETLIST};
pub use redundancy::{
    exhaustive_compare, exhaustive_equivalence, remove_all_redundant, remove_redundant, tie, EquivError, RedundancyError, RedundancyReport,
    MAX_EQUIV_INPUTS,
};
