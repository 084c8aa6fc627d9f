//! Bit-parallel evaluation of single-output cell networks.
//!
//! Both the elaborated RTL view and the gate-level netlists are compiled into
//! a [`CellNetlist`]: a topologically ordered list of single-output cells over
//! single-bit nets. Values are simulated 64 frames at a time, one frame per
//! bit lane of a `u64`.

use fixedbitset::FixedBitSet;

pub type NetId = usize;

pub const LANES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Net { net: NetId, inv: bool },
    Const(bool),
}

impl Operand {
    pub fn net(net: NetId) -> Self {
        Operand::Net { net, inv: false }
    }

    pub fn inverted(net: NetId) -> Self {
        Operand::Net { net, inv: true }
    }

    #[inline]
    fn value(self, values: &[u64]) -> u64 {
        match self {
            Operand::Net { net, inv } => values[net] ^ mask(inv),
            Operand::Const(b) => mask(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellOp {
    And,
    Or,
    Xor,
    /// Three-input majority.
    Maj,
    /// Operands `[sel, a, b]`, output `sel ? b : a`.
    Mux,
    Buf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub op: CellOp,
    pub ins: Vec<Operand>,
    pub out: NetId,
}

impl Cell {
    #[inline]
    pub fn eval(&self, values: &[u64]) -> u64 {
        let v = |i: usize| self.ins[i].value(values);
        match self.op {
            CellOp::And => self.ins.iter().fold(!0, |acc, o| acc & o.value(values)),
            CellOp::Or => self.ins.iter().fold(0, |acc, o| acc | o.value(values)),
            CellOp::Xor => self.ins.iter().fold(0, |acc, o| acc ^ o.value(values)),
            CellOp::Maj => {
                let (a, b, c) = (v(0), v(1), v(2));
                (a & b) | (a & c) | (b & c)
            }
            CellOp::Mux => {
                let s = v(0);
                (s & v(2)) | (!s & v(1))
            }
            CellOp::Buf => v(0),
        }
    }
}

#[inline]
pub fn mask(b: bool) -> u64 {
    if b {
        !0
    } else {
        0
    }
}

/// Lane mask with the low `n` lanes set.
#[inline]
pub fn lane_mask(n: usize) -> u64 {
    if n >= LANES {
        !0
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Debug)]
pub struct CellNetlist {
    num_nets: usize,
    cells: Vec<Cell>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    fanout: Vec<Vec<usize>>,
}

impl CellNetlist {
    /// Cells must already be in topological order.
    pub fn new(num_nets: usize, cells: Vec<Cell>, inputs: Vec<NetId>, outputs: Vec<NetId>) -> Self {
        let mut fanout = vec![Vec::new(); num_nets];
        for (idx, cell) in cells.iter().enumerate() {
            for op in &cell.ins {
                if let Operand::Net { net, .. } = *op {
                    if fanout[net].last() != Some(&idx) {
                        fanout[net].push(idx);
                    }
                }
            }
        }
        CellNetlist { num_nets, cells, inputs, outputs, fanout }
    }

    pub fn num_nets(&self) -> usize {
        self.num_nets
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    /// Evaluate one 64-lane block. `pi` holds one word per input net.
    pub fn eval_block(&self, pi: &[u64], values: &mut Vec<u64>) {
        values.clear();
        values.resize(self.num_nets, 0);
        for (&net, &w) in self.inputs.iter().zip(pi) {
            values[net] = w;
        }
        for cell in &self.cells {
            let out = cell.eval(values);
            values[cell.out] = out;
        }
    }

    /// Evaluate with one net held at `forced` (per lane). Full-circuit
    /// reference used by the oracles; the engines use [`Self::cone`].
    pub fn eval_block_forced(&self, pi: &[u64], net: NetId, forced: u64, values: &mut Vec<u64>) {
        values.clear();
        values.resize(self.num_nets, 0);
        for (&n, &w) in self.inputs.iter().zip(pi) {
            values[n] = w;
        }
        if self.inputs.contains(&net) {
            values[net] = forced;
        }
        for cell in &self.cells {
            let out = if cell.out == net { forced } else { cell.eval(values) };
            values[cell.out] = out;
        }
    }

    /// Cells in the transitive fanout of `net`, in topological order.
    pub fn cone(&self, net: NetId) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.cells.len());
        let mut stack: Vec<usize> = self.fanout[net].clone();
        while let Some(c) = stack.pop() {
            if seen.put(c) {
                continue;
            }
            stack.extend(self.fanout[self.cells[c].out].iter().copied());
        }
        seen.ones().collect()
    }

    /// Holds `net` at `forced`, re-evaluates `cone` into `alt` (which must
    /// equal `good` on entry) and calls `inspect` before restoring `alt`.
    pub fn with_forced<R>(
        &self,
        good: &[u64],
        alt: &mut [u64],
        net: NetId,
        forced: u64,
        cone: &[usize],
        inspect: impl FnOnce(&[u64]) -> R,
    ) -> R {
        alt[net] = forced;
        for &c in cone {
            let cell = &self.cells[c];
            let v = cell.eval(alt);
            alt[cell.out] = v;
        }
        let r = inspect(alt);
        alt[net] = good[net];
        for &c in cone {
            let out = self.cells[c].out;
            alt[out] = good[out];
        }
        r
    }

    /// Nets read by `cone` cells that neither `net` nor the cone drives.
    pub fn cone_support(&self, net: NetId, cone: &[usize]) -> Vec<NetId> {
        let mut driven = FixedBitSet::with_capacity(self.num_nets);
        driven.insert(net);
        for &c in cone {
            driven.insert(self.cells[c].out);
        }
        let mut seen = FixedBitSet::with_capacity(self.num_nets);
        let mut out = Vec::new();
        for &c in cone {
            for op in &self.cells[c].ins {
                if let Operand::Net { net: n, .. } = *op {
                    if !driven.contains(n) && !seen.put(n) {
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    /// Like [`Self::with_forced`] but touches only `net`, `support` and the
    /// cone outputs of `alt`, so `alt` can be reused across blocks. Only
    /// those entries are meaningful afterwards.
    pub fn eval_cone(&self, good: &[u64], alt: &mut [u64], net: NetId, forced: u64, cone: &[usize], support: &[NetId]) {
        for &n in support {
            alt[n] = good[n];
        }
        alt[net] = forced;
        for &c in cone {
            let cell = &self.cells[c];
            let v = cell.eval(alt);
            alt[cell.out] = v;
        }
    }

    /// For every net, the set of output positions (indices into
    /// [`Self::outputs`]) it structurally reaches.
    pub fn output_reach(&self) -> Vec<FixedBitSet> {
        let n_out = self.outputs.len();
        let mut reach = vec![FixedBitSet::with_capacity(n_out); self.num_nets];
        for (j, &po) in self.outputs.iter().enumerate() {
            reach[po].insert(j);
        }
        for cell in self.cells.iter().rev() {
            let r = reach[cell.out].clone();
            if r.is_clear() {
                continue;
            }
            for op in &cell.ins {
                if let Operand::Net { net, .. } = *op {
                    reach[net].union_with(&r);
                }
            }
        }
        reach
    }
}

/// Pack per-frame bit vectors into 64-lane blocks: `result[block][bit]`.
pub fn pack_frames(frames: &[Vec<bool>], width: usize) -> Vec<Vec<u64>> {
    frames
        .chunks(LANES)
        .map(|chunk| {
            let mut words = vec![0u64; width];
            for (lane, frame) in chunk.iter().enumerate() {
                for (bit, &v) in frame.iter().enumerate() {
                    if v {
                        words[bit] |= 1 << lane;
                    }
                }
            }
            words
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_and() -> CellNetlist {
        // d = a & b ; x = d ^ c
        let cells = vec![
            Cell { op: CellOp::And, ins: vec![Operand::net(0), Operand::net(1)], out: 3 },
            Cell { op: CellOp::Xor, ins: vec![Operand::net(3), Operand::net(2)], out: 4 },
        ];
        CellNetlist::new(5, cells, vec![0, 1, 2], vec![4])
    }

    #[test]
    fn eval_matches_truth_table() {
        let n = xor_and();
        let frames: Vec<Vec<bool>> = (0..8u32)
            .map(|m| vec![m & 4 != 0, m & 2 != 0, m & 1 != 0])
            .collect();
        let blocks = pack_frames(&frames, 3);
        let mut v = Vec::new();
        n.eval_block(&blocks[0], &mut v);
        for m in 0..8 {
            let (a, b, c) = (m & 4 != 0, m & 2 != 0, m & 1 != 0);
            assert_eq!((v[4] >> m) & 1 == 1, (a & b) ^ c);
        }
    }

    #[test]
    fn forced_cone_matches_full_forced_eval() {
        let n = xor_and();
        let blocks = pack_frames(&(0..8u32).map(|m| vec![m & 4 != 0, m & 2 != 0, m & 1 != 0]).collect::<Vec<_>>(), 3);
        let mut good = Vec::new();
        n.eval_block(&blocks[0], &mut good);
        let mut alt = good.clone();
        for net in 0..5 {
            let cone = n.cone(net);
            let flipped = !good[net];
            let got = n.with_forced(&good, &mut alt, net, flipped, &cone, |v| v[4]);
            let mut full = Vec::new();
            n.eval_block_forced(&blocks[0], net, flipped, &mut full);
            assert_eq!(got, full[4], "net {net}");
            assert_eq!(alt, good);
        }
    }

    #[test]
    fn reach_is_structural() {
        let n = xor_and();
        let r = n.output_reach();
        assert!(r.iter().all(|s| s.contains(0)));
    }

    #[test]
    fn mux_and_maj() {
        let cells = vec![
            Cell { op: CellOp::Mux, ins: vec![Operand::net(0), Operand::net(1), Operand::net(2)], out: 3 },
            Cell { op: CellOp::Maj, ins: vec![Operand::net(0), Operand::net(1), Operand::inverted(2)], out: 4 },
        ];
        let n = CellNetlist::new(5, cells, vec![0, 1, 2], vec![3, 4]);
        let blocks = pack_frames(&(0..8u32).map(|m| vec![m & 4 != 0, m & 2 != 0, m & 1 != 0]).collect::<Vec<_>>(), 3);
        let mut v = Vec::new();
        n.eval_block(&blocks[0], &mut v);
        for m in 0..8 {
            let (s, a, b) = (m & 4 != 0, m & 2 != 0, m & 1 != 0);
            assert_eq!((v[3] >> m) & 1 == 1, if s { b } else { a });
            let maj = (s as u8 + a as u8 + (!b) as u8) >= 2;
            assert_eq!((v[4] >> m) & 1 == 1, maj);
        }
    }
}
