use fixedbitset::FixedBitSet;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::ElaboratedCircuit;
use crate::gif::{minterm_string, GifPoUniverse, PointStatus};

/// Coverage of one stimulus over a universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageDb {
    pub status: Vec<PointStatus>,
    pub first_cycle: Vec<Option<u32>>,
    /// Fault-free PO value at the first detecting cycle.
    pub alpha_po: Vec<Option<bool>>,
    pub cycles: usize,
    /// Stimulus enumerated every PI assignment.
    pub exhaustive: bool,
    /// FPD-marked points the stimulus nevertheless covered.
    pub fpd_conflicts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub covered: usize,
    pub open: usize,
    pub unreachable: usize,
    pub unreachable_auto: usize,
    pub unreachable_fpd: usize,
    pub cycles: usize,
    pub percent: f64,
}

impl CoverageDb {
    /// Fresh database for `cycles` cycles, statuses taken from the universe.
    pub fn empty(u: &GifPoUniverse, cycles: usize) -> Self {
        CoverageDb {
            status: u.status.clone(),
            first_cycle: vec![None; u.len()],
            alpha_po: vec![None; u.len()],
            cycles,
            exhaustive: false,
            fpd_conflicts: Vec::new(),
        }
    }

    /// Record a detection; keeps the earliest cycle.
    pub fn record(&mut self, point: usize, cycle: u32, alpha: bool) {
        if self.status[point].is_unreachable() {
            if self.status[point] == PointStatus::UnreachableFpd && !self.fpd_conflicts.contains(&point) {
                self.fpd_conflicts.push(point);
                self.fpd_conflicts.sort_unstable();
            }
            return;
        }
        if self.first_cycle[point].is_none_or(|c| cycle < c) {
            self.first_cycle[point] = Some(cycle);
            self.alpha_po[point] = Some(alpha);
            self.status[point] = PointStatus::Covered;
        }
    }

    /// Union with a database over the same universe and stimulus.
    pub fn merge(&mut self, other: &CoverageDb) {
        assert_eq!(self.status.len(), other.status.len(), "universe mismatch");
        assert_eq!(self.cycles, other.cycles, "stimulus mismatch");
        for p in 0..self.status.len() {
            if let (Some(c), Some(a)) = (other.first_cycle[p], other.alpha_po[p]) {
                self.record(p, c, a);
            }
        }
        for &p in &other.fpd_conflicts {
            if !self.fpd_conflicts.contains(&p) {
                self.fpd_conflicts.push(p);
            }
        }
        self.fpd_conflicts.sort_unstable();
        self.exhaustive |= other.exhaustive;
    }

    pub fn covered(&self) -> usize {
        self.status.iter().filter(|s| **s == PointStatus::Covered).count()
    }

    pub fn covered_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.status.len());
        for (p, st) in self.status.iter().enumerate() {
            if *st == PointStatus::Covered {
                s.insert(p);
            }
        }
        s
    }

    pub fn summary(&self) -> Summary {
        let count = |k: PointStatus| self.status.iter().filter(|s| **s == k).count();
        let auto = count(PointStatus::UnreachableAuto);
        let fpd = count(PointStatus::UnreachableFpd);
        let covered = count(PointStatus::Covered);
        let total = self.status.len();
        let denom = total - auto - fpd;
        Summary {
            total,
            covered,
            open: count(PointStatus::Open),
            unreachable: auto + fpd,
            unreachable_auto: auto,
            unreachable_fpd: fpd,
            cycles: self.cycles,
            percent: percent(covered, denom),
        }
    }

    pub fn percent(&self) -> f64 {
        self.summary().percent
    }

    /// Cumulative covered count after each cycle.
    pub fn curve(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.cycles];
        for (p, c) in self.first_cycle.iter().enumerate() {
            if let Some(c) = c {
                if self.status[p] == PointStatus::Covered {
                    hist[*c as usize] += 1;
                }
            }
        }
        let mut acc = 0;
        hist.iter()
            .map(|h| {
                acc += h;
                acc
            })
            .collect()
    }

    /// Curve as percentages of the final denominator.
    pub fn curve_percent(&self) -> Vec<f64> {
        let s = self.summary();
        let denom = s.total - s.unreachable;
        self.curve().into_iter().map(|c| percent(c, denom)).collect()
    }

    /// Cycles that covered at least one new point, ascending.
    pub fn contributing_cycles(&self) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.cycles);
        for (p, c) in self.first_cycle.iter().enumerate() {
            if let (Some(c), PointStatus::Covered) = (c, self.status[p]) {
                seen.insert(*c as usize);
            }
        }
        seen.ones().collect()
    }

    /// Per-point record for reports and the HTTP service.
    pub fn point_json(&self, e: &ElaboratedCircuit, u: &GifPoUniverse, p: usize) -> Value {
        let pt = u.points[p];
        let c = &u.classes[pt.class];
        let g = &e.gates[c.gate];
        let src = &e.sources[g.source];
        json!({
            "id": p,
            "gate": g.name,
            "kind": g.kind.name(),
            "out": g.kind.outputs()[c.go],
            "minterm": minterm_string(c.minterm, g.kind.arity()),
            "alpha": c.alpha as u8,
            "members": c.members.iter().map(|&m| g.kind.pins()[m]).collect::<Vec<_>>(),
            "labels": c.labels,
            "po": e.po_names[pt.po],
            "status": self.status[p].as_str(),
            "first_cycle": self.first_cycle[p],
            "alpha_po": self.alpha_po[p].map(|a| a as u8),
            "source": { "inst": src.inst, "kind": src.kind, "line": src.line },
            "reason": u.fpd_reasons.get(&p),
        })
    }

    /// Full report: summary, every point and the curve.
    pub fn to_json(&self, e: &ElaboratedCircuit, u: &GifPoUniverse) -> Value {
        json!({
            "circuit": e.name,
            "summary": self.summary(),
            "exhaustive": self.exhaustive,
            "fpd_conflicts": self.fpd_conflicts,
            "points": (0..u.len()).map(|p| self.point_json(e, u, p)).collect::<Vec<_>>(),
            "curve": self.curve(),
        })
    }
}

pub fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        100.0
    } else {
        100.0 * n as f64 / d as f64
    }
}
