//! Coverage engine.
//!
//! Good values are simulated 64 cycles per word. For every gate output net
//! carrying classes, the net is complemented and only its fanout cone is
//! re-evaluated; a PO whose value flips observes the net in that lane.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::db::CoverageDb;
use super::stimulus::{Frame, Stimulus};
use super::SimError;
use crate::circuit::{evaluate_frame, ElaboratedCircuit, FrameValues, Pin};
use crate::gif::{apply_fpd, FalsePathDb, GifPoUniverse};
use crate::logic::{lane_mask, mask, pack_frames, CellNetlist, LANES};

struct NetTask {
    net: usize,
    classes: Vec<usize>,
    cone: Vec<usize>,
    support: Vec<usize>,
}

/// Precomputed good-machine values for a frame sequence.
pub struct Packed<'a> {
    e: &'a ElaboratedCircuit,
    u: &'a GifPoUniverse,
    cells: CellNetlist,
    tasks: Vec<NetTask>,
    good: Vec<Vec<u64>>,
    valid: Vec<u64>,
    cycles: usize,
}

impl<'a> Packed<'a> {
    pub fn new(e: &'a ElaboratedCircuit, u: &'a GifPoUniverse, frames: &[Frame]) -> Self {
        let cells = e.to_cells();
        let mut tasks: Vec<NetTask> = Vec::new();
        for (ci, c) in u.classes.iter().enumerate() {
            let net = e.gates[c.gate].outputs[c.go];
            match tasks.last_mut() {
                Some(t) if t.net == net => t.classes.push(ci),
                _ => tasks.push(NetTask { net, classes: vec![ci], cone: Vec::new(), support: Vec::new() }),
            }
        }
        for t in &mut tasks {
            t.cone = cells.cone(t.net);
            t.support = cells.cone_support(t.net, &t.cone);
        }
        let blocks = pack_frames(frames, e.pis.len());
        let good: Vec<Vec<u64>> = blocks
            .par_iter()
            .map(|pi| {
                let mut v = Vec::new();
                cells.eval_block(pi, &mut v);
                v
            })
            .collect();
        let valid = (0..blocks.len()).map(|b| lane_mask(frames.len() - b * LANES)).collect();
        Packed { e, u, cells, tasks, good, valid, cycles: frames.len() }
    }

    fn minterm_mask(&self, class: usize, good: &[u64]) -> u64 {
        let c = &self.u.classes[class];
        let g = &self.e.gates[c.gate];
        let n = g.inputs.len();
        let mut m = !0u64;
        for (p, pin) in g.inputs.iter().enumerate() {
            let w = match *pin {
                Pin::Net(net) => good[net],
                Pin::Const(b) => mask(b),
            };
            let bit = (c.minterm >> (n - 1 - p)) & 1 == 1;
            m &= if bit { w } else { !w };
        }
        m
    }

    /// Detection lanes of every point of `task` in block `b`.
    fn block_detections(&self, task: &NetTask, b: usize, alt: &mut Vec<u64>, skip: &FixedBitSet, out: &mut Vec<(usize, u64)>) {
        let good = &self.good[b];
        let matches: Vec<(usize, u64)> = task
            .classes
            .iter()
            .map(|&c| (c, self.minterm_mask(c, good) & self.valid[b]))
            .filter(|&(_, m)| m != 0)
            .collect();
        if matches.is_empty() {
            return;
        }
        alt.resize(good.len(), 0);
        let pos = &self.e.pos;
        // Every point's PO lies in the cone, so `alt` is valid there.
        self.cells.eval_cone(good, alt, task.net, !good[task.net], &task.cone, &task.support);
        for &(c, m) in &matches {
            for p in self.u.class_points[c].clone() {
                if skip.contains(p) {
                    continue;
                }
                let po = pos[self.u.points[p].po];
                let d = (good[po] ^ alt[po]) & m;
                if d != 0 {
                    out.push((p, d));
                }
            }
        }
    }

    fn po_value(&self, point: usize, cycle: usize) -> bool {
        let po = self.e.pos[self.u.points[point].po];
        (self.good[cycle / LANES][po] >> (cycle % LANES)) & 1 == 1
    }

    /// First detecting cycle of every point, with fault dropping.
    pub fn first_detections(&self, parallel: bool) -> Vec<(usize, u32, bool)> {
        let run = |t: &NetTask| {
            let total: usize = t.classes.iter().map(|&c| self.u.class_points[c].len()).sum();
            let mut done = FixedBitSet::with_capacity(self.u.len());
            let mut found = Vec::new();
            let mut alt = Vec::new();
            let mut hits = Vec::new();
            for b in 0..self.good.len() {
                if found.len() == total {
                    break;
                }
                hits.clear();
                self.block_detections(t, b, &mut alt, &done, &mut hits);
                for &(p, d) in &hits {
                    let cycle = b * LANES + d.trailing_zeros() as usize;
                    done.insert(p);
                    found.push((p, cycle as u32, self.po_value(p, cycle)));
                }
            }
            found
        };
        if parallel {
            self.tasks.par_iter().flat_map_iter(run).collect()
        } else {
            self.tasks.iter().flat_map(run).collect()
        }
    }

    /// For every cycle, the set of points it detects (no dropping).
    pub fn detection_sets(&self) -> Vec<FixedBitSet> {
        let none = FixedBitSet::with_capacity(self.u.len());
        let per_task: Vec<Vec<(usize, usize, u64)>> = self
            .tasks
            .par_iter()
            .map(|t| {
                let mut alt = Vec::new();
                let mut hits = Vec::new();
                let mut out = Vec::new();
                for b in 0..self.good.len() {
                    hits.clear();
                    self.block_detections(t, b, &mut alt, &none, &mut hits);
                    out.extend(hits.iter().map(|&(p, d)| (b, p, d)));
                }
                out
            })
            .collect();
        let mut sets = vec![FixedBitSet::with_capacity(self.u.len()); self.cycles];
        for (b, p, mut d) in per_task.into_iter().flatten() {
            while d != 0 {
                let lane = d.trailing_zeros() as usize;
                sets[b * LANES + lane].insert(p);
                d &= d - 1;
            }
        }
        sets
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CoverageOptions {
    pub parallel: bool,
    /// Under exhaustive stimulus, mark every still-open point unreachable.
    pub mark_unreachable: bool,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions { parallel: true, mark_unreachable: true }
    }
}

/// Whether `frames` contain every assignment of the PI bits.
pub fn is_exhaustive(frames: &[Frame]) -> bool {
    let Some(n) = frames.first().map(Vec::len) else {
        return false;
    };
    if n > 24 || frames.len() < 1 << n {
        return false;
    }
    let mut seen = FixedBitSet::with_capacity(1 << n);
    for f in frames {
        let idx = f.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i));
        seen.insert(idx);
    }
    seen.is_full()
}

fn finish(mut db: CoverageDb, frames: &[Frame], opts: CoverageOptions) -> CoverageDb {
    db.exhaustive = is_exhaustive(frames);
    if db.exhaustive && opts.mark_unreachable {
        for s in db.status.iter_mut() {
            if *s == crate::gif::PointStatus::Open {
                *s = crate::gif::PointStatus::UnreachableAuto;
            }
        }
    }
    db
}

/// Bit-packed coverage run over resolved frames.
pub fn run_coverage_frames(e: &ElaboratedCircuit, u: &GifPoUniverse, frames: &[Frame], opts: CoverageOptions) -> CoverageDb {
    let packed = Packed::new(e, u, frames);
    let mut db = CoverageDb::empty(u, frames.len());
    let mut found = packed.first_detections(opts.parallel);
    found.sort_unstable();
    for (p, c, a) in found {
        db.record(p, c, a);
    }
    finish(db, frames, opts)
}

/// Apply `fpd` (if any) to a copy of `u` and run the stimulus.
pub fn run_coverage(
    e: &ElaboratedCircuit,
    u: &GifPoUniverse,
    st: &Stimulus,
    fpd: Option<&FalsePathDb>,
) -> Result<CoverageDb, SimError> {
    let frames = st.frames(e)?;
    let mut u = u.clone();
    if let Some(f) = fpd {
        apply_fpd(e, &mut u, f, None);
    }
    Ok(run_coverage_frames(e, &u, &frames, CoverageOptions::default()))
}

fn eval_forced(e: &ElaboratedCircuit, frame: &[bool], net: usize, value: bool) -> Vec<bool> {
    let mut v = vec![false; e.nets.len()];
    for (&n, &b) in e.pis.iter().zip(frame) {
        v[n] = if n == net { value } else { b };
    }
    for g in &e.gates {
        let m = g.inputs.iter().fold(0u32, |m, p| {
            let b = match *p {
                Pin::Net(n) => v[n],
                Pin::Const(b) => b,
            };
            (m << 1) | b as u32
        });
        for (o, &n) in g.outputs.iter().enumerate() {
            v[n] = if n == net { value } else { g.kind.eval(m, o) };
        }
    }
    v
}

/// POs (indices into `e.pos`) observing `net` in frame `f`, by re-evaluating
/// the fanout cone with `net` complemented.
pub fn observability(e: &ElaboratedCircuit, f: &FrameValues, net: usize) -> Vec<usize> {
    observability_in(&e.to_cells(), e, f, net)
}

/// [`observability`] with the cell view of `e` built once by the caller.
pub fn observability_in(cells: &CellNetlist, e: &ElaboratedCircuit, f: &FrameValues, net: usize) -> Vec<usize> {
    let good: Vec<u64> = f.nets.iter().map(|&b| b as u64).collect();
    let mut alt = good.clone();
    let cone = cells.cone(net);
    cells.with_forced(&good, &mut alt, net, good[net] ^ 1, &cone, |v| {
        e.pos.iter().enumerate().filter(|&(_, &po)| (v[po] ^ good[po]) & 1 == 1).map(|(j, _)| j).collect()
    })
}

/// Oracle: simulate the whole frame twice with `net` forced to 0 and to 1.
pub fn observability_dual(e: &ElaboratedCircuit, frame: &[bool], net: usize) -> Vec<usize> {
    let v0 = eval_forced(e, frame, net, false);
    let v1 = eval_forced(e, frame, net, true);
    e.pos.iter().enumerate().filter(|&(_, &po)| v0[po] != v1[po]).map(|(j, _)| j).collect()
}

/// Points covered by one frame that are not yet in `covered`; updates
/// `covered` and returns `(point, fault-free PO value)`.
pub fn cover_cycle(e: &ElaboratedCircuit, u: &GifPoUniverse, f: &FrameValues, covered: &mut FixedBitSet) -> Vec<(usize, bool)> {
    let frame: Vec<bool> = e.pis.iter().map(|&n| f.nets[n]).collect();
    let mut out = Vec::new();
    let mut obs_cache: Option<(usize, Vec<usize>)> = None;
    for (ci, c) in u.classes.iter().enumerate() {
        if e.local_minterm(c.gate, &f.nets) != c.minterm {
            continue;
        }
        let net = e.gates[c.gate].outputs[c.go];
        if obs_cache.as_ref().is_none_or(|(n, _)| *n != net) {
            obs_cache = Some((net, observability_dual(e, &frame, net)));
        }
        let obs = &obs_cache.as_ref().unwrap().1;
        for p in u.class_points[ci].clone() {
            let j = u.points[p].po;
            if obs.contains(&j) && !covered.contains(p) {
                covered.insert(p);
                out.push((p, f.nets[e.pos[j]]));
            }
        }
    }
    out
}

/// Cycle-by-cycle scalar reference for the packed engine.
pub fn run_coverage_reference(e: &ElaboratedCircuit, u: &GifPoUniverse, frames: &[Frame], opts: CoverageOptions) -> CoverageDb {
    let mut db = CoverageDb::empty(u, frames.len());
    let mut covered = FixedBitSet::with_capacity(u.len());
    let n_in = e.num_input_bits();
    for (t, frame) in frames.iter().enumerate() {
        let f = evaluate_frame(e, &frame[..n_in], &frame[n_in..]);
        for (p, a) in cover_cycle(e, u, &f, &mut covered) {
            db.record(p, t as u32, a);
        }
    }
    finish(db, frames, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, library};
    use crate::gif::{build_universe, PointStatus};

    fn frames3(rows: &[[u8; 3]]) -> Vec<Frame> {
        rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect()
    }

    #[test]
    fn c1_ti_covers_everything() {
        let e = elaborate(&library::c1());
        let u = build_universe(&e);
        let f = frames3(&[[0, 1, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]]);
        let db = run_coverage_frames(&e, &u, &f, CoverageOptions::default());
        assert_eq!(db.covered(), 7);
        assert_eq!(db.curve().last(), Some(&7));
        assert_eq!(db, run_coverage_reference(&e, &u, &f, CoverageOptions::default()));
    }

    #[test]
    fn c1_cover_cycle_rows() {
        let e = elaborate(&library::c1());
        let u = build_universe(&e);
        let mut cov = FixedBitSet::with_capacity(u.len());
        let f = evaluate_frame(&e, &[false, true, false], &[]);
        let got: Vec<usize> = cover_cycle(&e, &u, &f, &mut cov).into_iter().map(|(p, _)| p).collect();
        // AND m=01 and XOR m=00
        assert_eq!(got, vec![0, 3]);
        assert!(cover_cycle(&e, &u, &f, &mut cov).is_empty());
        let mut cov = FixedBitSet::with_capacity(u.len());
        let f = evaluate_frame(&e, &[false, false, false], &[]);
        let got: Vec<usize> = cover_cycle(&e, &u, &f, &mut cov).into_iter().map(|(p, _)| p).collect();
        assert_eq!(got, vec![3]);
    }

    #[test]
    fn observability_examples() {
        let e = elaborate(&library::c1());
        let d = e.net_index("d").unwrap();
        let a = e.net_index("a").unwrap();
        let x = e.net_index("x").unwrap();
        let f = evaluate_frame(&e, &[false, true, false], &[]);
        assert_eq!(observability(&e, &f, d), vec![0]);
        let f = evaluate_frame(&e, &[false, false, false], &[]);
        assert!(observability(&e, &f, a).is_empty());
        assert_eq!(observability(&e, &f, x), vec![0]);
    }

    #[test]
    fn exhaustive_marks_unreachable() {
        // x = (a & b) | a: the AND output is masked whenever a = 1.
        let c = crate::circuit::parse_circuit(
            "circuit r\ninput a 1\ninput b 1\noutput x 1\nwire p 1\ngate and g1 p a b\ngate or g2 x p a\nend",
        )
        .unwrap();
        let e = elaborate(&c);
        let u = build_universe(&e);
        let f = frames3(&[]);
        assert!(!is_exhaustive(&f));
        let f: Vec<Frame> = (0..4).map(|m| vec![m & 2 != 0, m & 1 != 0]).collect();
        let db = run_coverage_frames(&e, &u, &f, CoverageOptions::default());
        assert!(db.exhaustive);
        assert!(db.status.iter().all(|s| *s != PointStatus::Open));
        assert_eq!(db.summary().unreachable_auto, 3);
        assert_eq!(db.percent(), 100.0);
    }
}
