//! Gate inherent faults: per-primitive sensitization classes, design
//! reduction and the GIF-PO universe.

mod enumerate;
pub mod fpd;
mod reduce;
mod universe;

pub use enumerate::{enumerate_gifs, enumerate_tied, labels, minterm_string, sensitized, GifClass, GifFault};
pub use fpd::{apply_fpd, FalsePathDb, FpdEntry, FpdError, FpdReport};
pub use reduce::{propagate_constants, propagate_opens, reduce, Reduction, ReductionLog};
pub use universe::{build_universe, ClassRecord, GifPoPoint, GifPoUniverse, PointStatus};

use crate::circuit::{elaborate, Circuit, ElaboratedCircuit};

/// A reduced design together with its universe.
#[derive(Clone, Debug)]
pub struct Model {
    pub elab: ElaboratedCircuit,
    pub universe: GifPoUniverse,
    pub log: ReductionLog,
}

impl Model {
    pub fn new(c: &Circuit) -> Model {
        Model::from_elaborated(&elaborate(c))
    }

    pub fn from_elaborated(e: &ElaboratedCircuit) -> Model {
        let (elab, log) = reduce(e);
        let universe = build_universe(&elab);
        Model { elab, universe, log }
    }
}
