use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use super::enumerate::{enumerate_tied, labels, minterm_string};
use super::reduce::tied_pins;
use crate::circuit::ElaboratedCircuit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Open,
    Covered,
    UnreachableAuto,
    UnreachableFpd,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Open => "open",
            PointStatus::Covered => "covered",
            PointStatus::UnreachableAuto => "unreachable-auto",
            PointStatus::UnreachableFpd => "unreachable-fpd",
        }
    }

    pub fn is_unreachable(self) -> bool {
        matches!(self, PointStatus::UnreachableAuto | PointStatus::UnreachableFpd)
    }
}

/// A GIF class placed on a concrete gate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub gate: usize,
    pub go: usize,
    pub minterm: u32,
    pub alpha: bool,
    pub members: Vec<usize>,
    /// Display labels of the members, e.g. `A9`.
    pub labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GifPoPoint {
    pub class: usize,
    /// Index into the primary output list.
    pub po: usize,
}

/// Dense, deterministically ordered set of GIF-PO points: gate order, then
/// output, then minterm, then primary output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GifPoUniverse {
    pub classes: Vec<ClassRecord>,
    pub points: Vec<GifPoPoint>,
    /// Points of each class.
    pub class_points: Vec<Range<usize>>,
    /// Classes of each gate.
    pub gate_classes: Vec<Range<usize>>,
    /// Points observed at each primary output.
    pub po_points: Vec<Vec<usize>>,
    /// Only `Open`, `UnreachableAuto` or `UnreachableFpd`; coverage lives in
    /// the coverage database.
    pub status: Vec<PointStatus>,
    /// Reason recorded for each FPD-marked point.
    pub fpd_reasons: BTreeMap<usize, String>,
}

/// Build the universe of a reduced design. Classes whose output net reaches
/// no primary output contribute no points.
pub fn build_universe(e: &ElaboratedCircuit) -> GifPoUniverse {
    let reach = e.to_cells().output_reach();
    let mut classes = Vec::new();
    let mut points = Vec::new();
    let mut class_points = Vec::new();
    let mut gate_classes = Vec::new();
    let mut po_points = vec![Vec::new(); e.pos.len()];
    for (gi, g) in e.gates.iter().enumerate() {
        let start = classes.len();
        let cs = enumerate_tied(g.kind, &tied_pins(g));
        let ls = labels(g.kind, &cs);
        for (c, l) in cs.into_iter().zip(ls) {
            let r = &reach[g.outputs[c.go]];
            if r.is_clear() {
                continue;
            }
            let ci = classes.len();
            let p0 = points.len();
            for j in r.ones() {
                po_points[j].push(points.len());
                points.push(GifPoPoint { class: ci, po: j });
            }
            class_points.push(p0..points.len());
            classes.push(ClassRecord { gate: gi, go: c.go, minterm: c.minterm, alpha: c.alpha, members: c.members, labels: l });
        }
        gate_classes.push(start..classes.len());
    }
    let status = vec![PointStatus::Open; points.len()];
    GifPoUniverse { classes, points, class_points, gate_classes, po_points, status, fpd_reasons: BTreeMap::new() }
}

impl GifPoUniverse {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn unreachable(&self) -> usize {
        self.status.iter().filter(|s| s.is_unreachable()).count()
    }

    /// Coverage denominator: points not marked unreachable.
    pub fn denominator(&self) -> usize {
        self.len() - self.unreachable()
    }

    pub fn class_of(&self, point: usize) -> &ClassRecord {
        &self.classes[self.points[point].class]
    }

    /// Human-readable description of a point.
    pub fn describe(&self, e: &ElaboratedCircuit, point: usize) -> String {
        let p = self.points[point];
        let c = &self.classes[p.class];
        let g = &e.gates[c.gate];
        format!(
            "{}.{} m={} [{}] -> {}",
            g.name,
            g.kind.outputs()[c.go],
            minterm_string(c.minterm, g.kind.arity()),
            c.labels.join(","),
            e.po_names[p.po]
        )
    }

    /// Mark points unreachable after exhaustive stimulus left them open.
    pub fn mark_unreachable_auto(&mut self, points: impl IntoIterator<Item = usize>) -> usize {
        let mut n = 0;
        for p in points {
            if self.status[p] == PointStatus::Open {
                self.status[p] = PointStatus::UnreachableAuto;
                n += 1;
            }
        }
        n
    }
}
