//! Parallel-pattern single stuck-at fault simulation with fault dropping.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::netlist::GateNetlist;
use crate::logic::{lane_mask, mask, pack_frames, LANES};
use crate::sim::{is_exhaustive, percent, Frame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StuckAtFault {
    pub net: usize,
    pub value: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultStatus {
    Detected,
    Undetected,
    /// Undetected under an exhaustive stimulus.
    Untestable,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FaultSimError {
    #[error("frame {cycle} has {got} bits, netlist has {want} primary inputs")]
    WidthMismatch { cycle: usize, got: usize, want: usize },
}

/// Both polarities for every net, sa0 first, in net order.
pub fn enumerate_stuckat(n: &GateNetlist) -> Vec<StuckAtFault> {
    (0..n.nets.len()).flat_map(|net| [false, true].map(|value| StuckAtFault { net, value })).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultSimResult {
    pub faults: Vec<StuckAtFault>,
    pub first_cycle: Vec<Option<u32>>,
    pub cycles: usize,
    pub exhaustive: bool,
}

impl FaultSimResult {
    pub fn detected(&self) -> usize {
        self.first_cycle.iter().filter(|c| c.is_some()).count()
    }

    pub fn undetected(&self) -> Vec<StuckAtFault> {
        self.faults.iter().zip(&self.first_cycle).filter(|(_, c)| c.is_none()).map(|(f, _)| *f).collect()
    }

    pub fn status(&self, i: usize) -> FaultStatus {
        match (self.first_cycle[i], self.exhaustive) {
            (Some(_), _) => FaultStatus::Detected,
            (None, true) => FaultStatus::Untestable,
            (None, false) => FaultStatus::Undetected,
        }
    }

    /// Coverage over all faults; untestable faults stay in the denominator.
    pub fn percent(&self) -> f64 {
        percent(self.detected(), self.faults.len())
    }

    pub fn curve(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.cycles];
        for c in self.first_cycle.iter().flatten() {
            hist[*c as usize] += 1;
        }
        hist.iter()
            .scan(0, |acc, h| {
                *acc += h;
                Some(*acc)
            })
            .collect()
    }

    pub fn curve_percent(&self) -> Vec<f64> {
        self.curve().into_iter().map(|c| percent(c, self.faults.len())).collect()
    }

    /// `cycle,detected` with cumulative counts.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("cycle,detected\n");
        for (c, d) in self.curve().iter().enumerate() {
            s.push_str(&format!("{c},{d}\n"));
        }
        s
    }

    pub fn to_json(&self, n: &GateNetlist) -> Value {
        json!({
            "netlist": n.name,
            "faults": self.faults.len(),
            "detected": self.detected(),
            "percent": self.percent(),
            "cycles": self.cycles,
            "exhaustive": self.exhaustive,
            "curve": self.curve(),
            "records": self.faults.iter().enumerate().map(|(i, f)| json!({
                "fault": fault_name(n, f),
                "status": self.status(i),
                "first_cycle": self.first_cycle[i],
            })).collect::<Vec<_>>(),
        })
    }
}

/// `net-v`, as in `d-1`.
pub fn fault_name(n: &GateNetlist, f: &StuckAtFault) -> String {
    format!("{}-{}", n.nets[f.net], f.value as u8)
}

fn check_width(n: &GateNetlist, frames: &[Frame]) -> Result<(), FaultSimError> {
    let want = n.pis().len();
    match frames.iter().position(|f| f.len() != want) {
        Some(cycle) => Err(FaultSimError::WidthMismatch { cycle, got: frames[cycle].len(), want }),
        None => Ok(()),
    }
}

struct Good {
    cells: crate::logic::CellNetlist,
    good: Vec<Vec<u64>>,
    valid: Vec<u64>,
}

impl Good {
    fn new(n: &GateNetlist, frames: &[Frame]) -> Good {
        let cells = n.to_cells();
        let blocks = pack_frames(frames, n.pis().len());
        let good = blocks
            .par_iter()
            .map(|pi| {
                let mut v = Vec::new();
                cells.eval_block(pi, &mut v);
                v
            })
            .collect();
        let valid = (0..blocks.len()).map(|b| lane_mask(frames.len() - b * LANES)).collect();
        Good { cells, good, valid }
    }

    fn site(&self, net: usize) -> Site {
        let cone = self.cells.cone(net);
        let support = self.cells.cone_support(net, &cone);
        let mut inside = FixedBitSet::with_capacity(self.cells.num_nets());
        inside.insert(net);
        for &c in &cone {
            inside.insert(self.cells.cells()[c].out);
        }
        let pos = self.cells.outputs().iter().copied().filter(|&p| inside.contains(p)).collect();
        Site { net, cone, support, pos }
    }

    /// Lanes of block `b` where the site stuck at `value` flips some PO.
    fn detect(&self, b: usize, s: &Site, value: bool, alt: &mut [u64]) -> u64 {
        let good = &self.good[b];
        let forced = mask(value);
        let act = (good[s.net] ^ forced) & self.valid[b];
        if act == 0 || s.pos.is_empty() {
            return 0;
        }
        self.cells.eval_cone(good, alt, s.net, forced, &s.cone, &s.support);
        s.pos.iter().fold(0u64, |acc, &po| acc | (good[po] ^ alt[po])) & act
    }
}

struct Site {
    net: usize,
    cone: Vec<usize>,
    support: Vec<usize>,
    /// POs the fault can reach.
    pos: Vec<usize>,
}

/// First detecting cycle of every fault.
pub fn fault_simulate(n: &GateNetlist, frames: &[Frame]) -> Result<FaultSimResult, FaultSimError> {
    check_width(n, frames)?;
    let faults = enumerate_stuckat(n);
    let g = Good::new(n, frames);
    let per_net: Vec<[Option<u32>; 2]> = (0..n.nets.len())
        .into_par_iter()
        .map(|net| {
            let site = g.site(net);
            let mut alt = vec![0u64; n.nets.len()];
            let mut res = [None, None];
            for (k, value) in [false, true].into_iter().enumerate() {
                for b in 0..g.good.len() {
                    let d = g.detect(b, &site, value, &mut alt);
                    if d != 0 {
                        res[k] = Some((b * LANES + d.trailing_zeros() as usize) as u32);
                        break;
                    }
                }
            }
            res
        })
        .collect();
    let first_cycle = faults.iter().map(|f| per_net[f.net][f.value as usize]).collect();
    Ok(FaultSimResult { faults, first_cycle, cycles: frames.len(), exhaustive: is_exhaustive(frames) })
}

/// Faults detected by each cycle, without dropping.
pub fn detection_sets(n: &GateNetlist, frames: &[Frame]) -> Result<Vec<FixedBitSet>, FaultSimError> {
    check_width(n, frames)?;
    let faults = enumerate_stuckat(n);
    let g = Good::new(n, frames);
    let mut sets = vec![FixedBitSet::with_capacity(faults.len()); frames.len()];
    let mut alt = vec![0u64; n.nets.len()];
    for net in 0..n.nets.len() {
        let site = g.site(net);
        for value in [false, true] {
            let fi = 2 * net + value as usize;
            for b in 0..g.good.len() {
                let mut d = g.detect(b, &site, value, &mut alt);
                while d != 0 {
                    let lane = d.trailing_zeros() as usize;
                    sets[b * LANES + lane].insert(fi);
                    d &= d - 1;
                }
            }
        }
    }
    Ok(sets)
}

/// Serial scalar fault simulator: every fault, every frame, full
/// re-evaluation. Reference for [`fault_simulate`].
pub fn fault_simulate_serial(n: &GateNetlist, frames: &[Frame]) -> Result<FaultSimResult, FaultSimError> {
    check_width(n, frames)?;
    let faults = enumerate_stuckat(n);
    let pis = n.pis();
    let pos = n.pos();
    let run = |frame: &[bool], fault: Option<StuckAtFault>| -> Vec<bool> {
        let mut v = vec![false; n.nets.len()];
        for (&p, &b) in pis.iter().zip(frame) {
            v[p] = b;
        }
        if let Some(f) = fault {
            v[f.net] = if pis.contains(&f.net) { f.value } else { v[f.net] };
        }
        for gate in &n.gates {
            v[gate.out] = match fault {
                Some(f) if f.net == gate.out => f.value,
                _ => super::netlist::eval_gate(gate, &v),
            };
        }
        pos.iter().map(|&p| v[p]).collect()
    };
    let first_cycle = faults
        .iter()
        .map(|&f| {
            frames.iter().position(|fr| run(fr, None) != run(fr, Some(f))).map(|c| c as u32)
        })
        .collect();
    Ok(FaultSimResult { faults, first_cycle, cycles: frames.len(), exhaustive: is_exhaustive(frames) })
}

/// All 2^n frames, first PI most significant.
pub fn exhaustive_frames(width: usize) -> Vec<Frame> {
    (0..1u64 << width).map(|k| (0..width).map(|i| (k >> (width - 1 - i)) & 1 == 1).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stuckat::netlist::{parse_netlist, C2_NETLIST};

    #[test]
    fn c2_exhaustive_matches_serial() {
        let n = parse_netlist(C2_NETLIST).unwrap();
        let frames = exhaustive_frames(3);
        let fast = fault_simulate(&n, &frames).unwrap();
        let slow = fault_simulate_serial(&n, &frames).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast.faults.len(), 14);
        assert!(fast.exhaustive);
        let sets = detection_sets(&n, &frames).unwrap();
        for (i, c) in fast.first_cycle.iter().enumerate() {
            assert_eq!(*c, sets.iter().position(|s| s.contains(i)).map(|c| c as u32));
        }
    }

    #[test]
    fn width_checked() {
        let n = parse_netlist(C2_NETLIST).unwrap();
        assert!(matches!(fault_simulate(&n, &[vec![true]]), Err(FaultSimError::WidthMismatch { .. })));
    }
}
