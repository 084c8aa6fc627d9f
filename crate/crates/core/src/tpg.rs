//! Stimulus generation, contributing-cycle selection and compaction.

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{width_mask, ElaboratedCircuit};
use crate::gif::GifPoUniverse;
use crate::sim::{run_coverage_frames, CoverageOptions, Frame, Packed, SimError, Stimulus};
use crate::stuckat::{self, GateNetlist};

/// Widest design `gen_exhaustive` accepts, in PI plus state bits.
pub const MAX_EXHAUSTIVE_BITS: usize = 20;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TpgError {
    #[error("{0} input and state bits exceed the exhaustive limit of {MAX_EXHAUSTIVE_BITS}")]
    TooWide(usize),
    #[error("expected {want} weights, got {got}")]
    Weights { want: usize, got: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    FaultSim(#[from] stuckat::FaultSimError),
}

/// Stimulus columns: every input port, then every register.
fn columns(e: &ElaboratedCircuit) -> (Vec<String>, Vec<usize>) {
    let mut names = Vec::new();
    let mut widths = Vec::new();
    for p in &e.interface.inputs {
        names.push(p.name.clone());
        widths.push(p.bits.len());
    }
    for r in &e.interface.registers {
        names.push(r.inst.clone());
        widths.push(r.q.len());
    }
    (names, widths)
}

/// Every input (and register state) assignment in ascending order, the
/// first column most significant.
pub fn gen_exhaustive(e: &ElaboratedCircuit) -> Result<Stimulus, TpgError> {
    let (names, widths) = columns(e);
    let total: usize = widths.iter().sum();
    if total > MAX_EXHAUSTIVE_BITS {
        return Err(TpgError::TooWide(total));
    }
    let mut st = Stimulus::new(names);
    for k in 0..1u64 << total {
        let mut shift = total;
        let row = widths
            .iter()
            .map(|&w| {
                shift -= w;
                (k >> shift) & width_mask(w as u32)
            })
            .collect();
        st.push(row);
    }
    Ok(st)
}

/// `n` uniformly random cycles.
pub fn gen_random(e: &ElaboratedCircuit, n: usize, seed: u64) -> Stimulus {
    let (names, widths) = columns(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = Stimulus::new(names);
    for _ in 0..n {
        st.push(widths.iter().map(|&w| rng.random::<u64>() & width_mask(w as u32)).collect());
    }
    st
}

/// `n` random cycles where bit `i` (input bits, then state bits, LSB first
/// per column) is 1 with probability `weights[i]`.
pub fn gen_weighted(e: &ElaboratedCircuit, n: usize, seed: u64, weights: &[f64]) -> Result<Stimulus, TpgError> {
    let (names, widths) = columns(e);
    let total: usize = widths.iter().sum();
    if weights.len() != total {
        return Err(TpgError::Weights { want: total, got: weights.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = Stimulus::new(names);
    for _ in 0..n {
        let mut off = 0;
        let row = widths
            .iter()
            .map(|&w| {
                let v = (0..w).fold(0u64, |v, b| v | ((rng.random::<f64>() < weights[off + b]) as u64) << b);
                off += w;
                v
            })
            .collect();
        st.push(row);
    }
    Ok(st)
}

/// Walking-window patterns: every column is filled with all zeros or all
/// ones, then a `window`-bit slice ending at each bit position is
/// enumerated across all columns. Reaches long carry chains that uniform
/// random stimulus almost never exercises.
pub fn gen_window(e: &ElaboratedCircuit, window: usize) -> Stimulus {
    let (names, widths) = columns(e);
    let cols = widths.len();
    let max_w = widths.iter().copied().max().unwrap_or(0);
    let mut st = Stimulus::new(names);
    let mut seen = std::collections::HashSet::new();
    for fill in 0..1u64 << cols {
        for top in 0..max_w {
            let lo = (top + 1).saturating_sub(window);
            let span = top + 1 - lo;
            for assign in 0..1u64 << (span * cols) {
                let row: Vec<u64> = widths
                    .iter()
                    .enumerate()
                    .map(|(c, &w)| {
                        let m = width_mask(w as u32);
                        let mut v = if (fill >> c) & 1 == 1 { m } else { 0 };
                        for k in 0..span {
                            let bit = lo + k;
                            if bit < w {
                                let b = (assign >> (c * span + k)) & 1;
                                v = (v & !(1 << bit)) | (b << bit);
                            }
                        }
                        v
                    })
                    .collect();
                if seen.insert(row.clone()) {
                    st.push(row);
                }
            }
        }
    }
    st
}

/// Rewrite `st` so every register column holds its explicit state value,
/// which makes any subset of cycles self-contained.
pub fn materialize(e: &ElaboratedCircuit, st: &Stimulus) -> Result<Stimulus, TpgError> {
    let frames = st.frames(e)?;
    Ok(frames_to_stimulus(e, &frames))
}

fn frames_to_stimulus(e: &ElaboratedCircuit, frames: &[Frame]) -> Stimulus {
    let (names, widths) = columns(e);
    let mut st = Stimulus::new(names);
    for f in frames {
        let mut off = 0;
        let row = widths
            .iter()
            .map(|&w| {
                let v = (0..w).fold(0u64, |v, b| v | (f[off + b] as u64) << b);
                off += w;
                v
            })
            .collect();
        st.push(row);
    }
    st
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Gifpo,
    Stuckat,
}

/// Coverage target for compaction.
#[derive(Clone, Copy)]
pub enum Metric<'a> {
    GifPo(&'a GifPoUniverse),
    StuckAt(&'a GateNetlist),
}

impl Metric<'_> {
    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::GifPo(_) => MetricKind::Gifpo,
            Metric::StuckAt(_) => MetricKind::Stuckat,
        }
    }

    /// Items each frame detects, and the size of the metric's denominator.
    fn detection_sets(&self, e: &ElaboratedCircuit, frames: &[Frame]) -> Result<(Vec<FixedBitSet>, usize), TpgError> {
        match self {
            Metric::GifPo(u) => {
                let mut sets = Packed::new(e, u, frames).detection_sets();
                let mut live = FixedBitSet::with_capacity(u.len());
                for (p, s) in u.status.iter().enumerate() {
                    if !s.is_unreachable() {
                        live.insert(p);
                    }
                }
                for s in &mut sets {
                    s.intersect_with(&live);
                }
                Ok((sets, u.denominator()))
            }
            Metric::StuckAt(n) => {
                let sets = stuckat::detection_sets(n, frames)?;
                Ok((sets, 2 * n.nets.len()))
            }
        }
    }
}

/// Ordered subset of a source stimulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestSet {
    pub stimulus: Stimulus,
    /// Source cycle of every kept cycle.
    pub origin: Vec<usize>,
    pub metric: MetricKind,
    /// Percent of the metric covered by the kept cycles.
    pub coverage: f64,
}

impl TestSet {
    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }

    pub fn manifest(&self) -> Value {
        json!({
            "cycles": self.len(),
            "origin": self.origin,
            "metric": self.metric,
            "coverage": self.coverage,
        })
    }
}

/// Cycles of `st` that cover at least one new GIF-PO point, in order.
pub fn greedy_select(e: &ElaboratedCircuit, u: &GifPoUniverse, st: &Stimulus) -> Result<TestSet, TpgError> {
    let frames = st.frames(e)?;
    let db = run_coverage_frames(e, u, &frames, CoverageOptions { parallel: true, mark_unreachable: false });
    let keep = db.contributing_cycles();
    let full = frames_to_stimulus(e, &frames);
    Ok(TestSet { stimulus: full.select(&keep), origin: keep, metric: MetricKind::Gifpo, coverage: db.percent() })
}

/// Greedy set cover (largest new contribution first, earliest cycle on
/// ties) followed by reverse-order removal of cycles the rest make
/// redundant. Keeps the coverage `ts` reaches on `metric`; output follows
/// the order of `ts`.
pub fn compact(e: &ElaboratedCircuit, ts: &TestSet, metric: Metric<'_>) -> Result<TestSet, TpgError> {
    let frames = ts.stimulus.frames(e)?;
    let (sets, denom) = metric.detection_sets(e, &frames)?;
    let width = sets.first().map_or(0, FixedBitSet::len);
    let mut target = FixedBitSet::with_capacity(width);
    for s in &sets {
        target.union_with(s);
    }
    let mut covered = FixedBitSet::with_capacity(width);
    let mut chosen: Vec<usize> = Vec::new();
    while covered != target {
        let mut best = (0usize, usize::MAX);
        for (c, s) in sets.iter().enumerate() {
            let gain = s.difference(&covered).count();
            if gain > best.0 {
                best = (gain, c);
            }
        }
        covered.union_with(&sets[best.1]);
        chosen.push(best.1);
    }
    let mut keep = chosen.clone();
    for &c in chosen.iter().rev() {
        let mut rest = FixedBitSet::with_capacity(width);
        for &k in &keep {
            if k != c {
                rest.union_with(&sets[k]);
            }
        }
        if rest == target {
            keep.retain(|&k| k != c);
        }
    }
    keep.sort_unstable();
    Ok(TestSet {
        stimulus: ts.stimulus.select(&keep),
        origin: keep.iter().map(|&k| ts.origin[k]).collect(),
        metric: metric.kind(),
        coverage: crate::sim::percent(target.count_ones(..), denom),
    })
}

/// Wrap a whole stimulus as a test set.
pub fn test_set(e: &ElaboratedCircuit, st: &Stimulus, metric: Metric<'_>) -> Result<TestSet, TpgError> {
    let frames = st.frames(e)?;
    let (sets, denom) = metric.detection_sets(e, &frames)?;
    let mut all = FixedBitSet::with_capacity(sets.first().map_or(0, FixedBitSet::len));
    for s in &sets {
        all.union_with(s);
    }
    Ok(TestSet {
        stimulus: frames_to_stimulus(e, &frames),
        origin: (0..frames.len()).collect(),
        metric: metric.kind(),
        coverage: if frames.is_empty() { 0.0 } else { crate::sim::percent(all.count_ones(..), denom) },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Stim,
    Json,
}

/// Stimulus text or JSON manifest for a test set.
pub fn export(ts: &TestSet, format: ExportFormat) -> String {
    match format {
        ExportFormat::Stim => ts.stimulus.to_text(),
        ExportFormat::Json => serde_json::to_string_pretty(&ts.manifest()).expect("manifest serializes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, library};
    use crate::gif::Model;

    #[test]
    fn exhaustive_order() {
        let e = elaborate(&library::c1());
        let st = gen_exhaustive(&e).unwrap();
        assert_eq!(st.len(), 8);
        assert_eq!(st.cycles[2], vec![Some(0), Some(1), Some(0)]);
        let one = elaborate(&crate::circuit::parse_circuit("circuit t\ninput a 1\noutput x 1\ngate not g x a\nend").unwrap());
        assert_eq!(gen_exhaustive(&one).unwrap().len(), 2);
        let wide = elaborate(&library::by_name("add64").unwrap());
        assert_eq!(gen_exhaustive(&wide), Err(TpgError::TooWide(128)));
    }

    #[test]
    fn random_is_deterministic() {
        let e = elaborate(&library::c1());
        assert_eq!(gen_random(&e, 4, 1), gen_random(&e, 4, 1));
        assert_ne!(gen_random(&e, 16, 1), gen_random(&e, 16, 2));
        let ones = gen_weighted(&e, 5, 3, &[1.0; 3]).unwrap();
        assert!(ones.cycles.iter().all(|r| r.iter().all(|v| *v == Some(1))));
    }

    #[test]
    fn selection_keeps_coverage() {
        let m = Model::new(&library::c1());
        let st = gen_exhaustive(&m.elab).unwrap();
        let ts = greedy_select(&m.elab, &m.universe, &st).unwrap();
        assert_eq!(ts.coverage, 100.0);
        let again = greedy_select(&m.elab, &m.universe, &ts.stimulus).unwrap();
        assert_eq!(again.len(), ts.len());
        let rep = Stimulus::parse("inputs a b c\n1 1 0\n1 1 0\n1 1 0\n").unwrap();
        assert_eq!(greedy_select(&m.elab, &m.universe, &rep).unwrap().origin, vec![0]);
    }

    #[test]
    fn compaction_of_minimal_set_is_identity() {
        let m = Model::new(&library::c1());
        let st = gen_exhaustive(&m.elab).unwrap();
        let ts = greedy_select(&m.elab, &m.universe, &st).unwrap();
        let c = compact(&m.elab, &ts, Metric::GifPo(&m.universe)).unwrap();
        let cc = compact(&m.elab, &c, Metric::GifPo(&m.universe)).unwrap();
        assert_eq!(c.origin, cc.origin);
        assert_eq!(c.coverage, ts.coverage);
    }

    #[test]
    fn export_round_trips() {
        let m = Model::new(&library::c1());
        let st = Stimulus::parse("inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n").unwrap();
        let ts = test_set(&m.elab, &st, Metric::GifPo(&m.universe)).unwrap();
        assert_eq!(Stimulus::parse(&export(&ts, ExportFormat::Stim)).unwrap(), st);
        let empty = test_set(&m.elab, &Stimulus::new(st.columns.clone()), Metric::GifPo(&m.universe)).unwrap();
        let v: Value = serde_json::from_str(&export(&empty, ExportFormat::Json)).unwrap();
        assert_eq!(v["coverage"], 0.0);
    }

    #[test]
    fn window_reaches_full_adder_coverage() {
        let m = Model::new(&library::by_name("add64").unwrap());
        let st = gen_window(&m.elab, 2);
        let ts = greedy_select(&m.elab, &m.universe, &st).unwrap();
        assert_eq!(ts.coverage, 100.0);
    }
}
