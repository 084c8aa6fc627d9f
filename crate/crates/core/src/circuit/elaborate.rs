//! Decomposition of word-level gates into the primitive library.

use serde::Serialize;

use super::{Circuit, GateKind, PrimKind};
use crate::logic::{Cell, CellNetlist, Operand};

/// Connection of a primitive input pin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pin {
    Net(usize),
    Const(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimGate {
    pub name: String,
    pub kind: PrimKind,
    pub inputs: Vec<Pin>,
    /// One net per output of `kind`.
    pub outputs: Vec<usize>,
    /// Index into [`ElaboratedCircuit::sources`].
    pub source: usize,
}

/// Word-level statement a primitive came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceGate {
    pub inst: String,
    pub kind: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PortBits {
    pub name: String,
    /// Net per bit, LSB first.
    pub bits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterBits {
    pub inst: String,
    pub q: Vec<usize>,
    pub d: Vec<usize>,
    pub init: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interface {
    pub inputs: Vec<PortBits>,
    pub outputs: Vec<PortBits>,
    pub registers: Vec<RegisterBits>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElaboratedCircuit {
    pub name: String,
    pub nets: Vec<String>,
    /// Topologically ordered.
    pub gates: Vec<PrimGate>,
    /// Input port bits, then register q bits.
    pub pis: Vec<usize>,
    /// Output port bits, then register d bits. A net may appear more than once.
    pub pos: Vec<usize>,
    pub po_names: Vec<String>,
    pub pi_names: Vec<String>,
    pub interface: Interface,
    pub sources: Vec<SourceGate>,
}

/// Values of one combinational frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameValues {
    pub nets: Vec<bool>,
    pub outputs: Vec<bool>,
    pub state: Vec<bool>,
    pub next_state: Vec<bool>,
}

fn bit_name(name: &str, width: u32, i: u32) -> String {
    if width == 1 {
        name.to_string()
    } else {
        format!("{name}[{i}]")
    }
}

struct Emit {
    prims: Vec<(String, PrimKind, Vec<Pin>, Vec<usize>)>,
}

struct Elab<'a> {
    c: &'a Circuit,
    nets: Vec<String>,
    gates: Vec<PrimGate>,
    bits: Vec<Vec<usize>>,
    sources: Vec<SourceGate>,
    zero: Option<usize>,
}

impl Elab<'_> {
    fn net(&mut self, name: String) -> usize {
        self.nets.push(name);
        self.nets.len() - 1
    }

    fn out_net(&mut self, src: usize, i: u32) -> usize {
        let d = &self.c.nets[src];
        let name = bit_name(&d.name, d.width, i);
        self.net(name)
    }

    fn flush(&mut self, inst: &str, e: Emit, source: usize) {
        let single = e.prims.len() == 1;
        for (local, kind, inputs, outputs) in e.prims {
            let name = if single { inst.to_string() } else { format!("{inst}/{local}") };
            self.gates.push(PrimGate { name, kind, inputs, outputs, source });
        }
    }

    fn zero(&mut self) -> usize {
        if let Some(z) = self.zero {
            return z;
        }
        let n = self.net("$0".to_string());
        let src = self.sources.len();
        self.sources.push(SourceGate { inst: "$0".into(), kind: "const".into(), line: 0 });
        self.gates.push(PrimGate { name: "$0".into(), kind: PrimKind::Const0, inputs: vec![], outputs: vec![n], source: src });
        self.zero = Some(n);
        n
    }

    /// Balanced left-to-right reduction of `leaves` with a 2-input kind.
    /// The root drives `root`; internal nets are fresh.
    fn tree(&mut self, e: &mut Emit, inst: &str, tag: &str, kind: PrimKind, leaves: Vec<usize>, root: usize) {
        if leaves.len() == 1 {
            e.prims.push((tag.to_string(), PrimKind::Buf, vec![Pin::Net(leaves[0])], vec![root]));
            return;
        }
        let mut level = leaves;
        let mut k = 0;
        while level.len() > 1 {
            let is_root = level.len() == 2;
            let mut next = Vec::new();
            for ch in level.chunks(2) {
                if ch.len() == 1 {
                    next.push(ch[0]);
                    continue;
                }
                let out = if is_root { root } else { self.net(format!("{inst}/{tag}t{k}")) };
                e.prims.push((format!("{tag}t{k}"), kind, vec![Pin::Net(ch[0]), Pin::Net(ch[1])], vec![out]));
                k += 1;
                next.push(out);
            }
            level = next;
        }
        // Name the root node after the tag rather than its tree index.
        let last = e.prims.last_mut().unwrap();
        last.0 = tag.to_string();
    }

    /// Ripple adder over per-bit nets: HA at bit 0, then an FA chain.
    fn ripple(&mut self, e: &mut Emit, inst: &str, a: &[usize], b: &[usize], sum: &[usize], carry: Option<usize>) {
        let w = a.len();
        let mut c = 0;
        for i in 0..w {
            let co = if i + 1 == w {
                carry.unwrap_or_else(|| self.net(format!("{inst}/co")))
            } else {
                self.net(format!("{inst}/c{}", i + 1))
            };
            if i == 0 {
                e.prims.push(("ha0".into(), PrimKind::Ha, vec![Pin::Net(a[0]), Pin::Net(b[0])], vec![sum[0], co]));
            } else {
                e.prims.push((
                    format!("fa{i}"),
                    PrimKind::Fa,
                    vec![Pin::Net(c), Pin::Net(a[i]), Pin::Net(b[i])],
                    vec![sum[i], co],
                ));
            }
            c = co;
        }
    }

    fn gate(&mut self, gi: usize) {
        let g = &self.c.gates[gi];
        let inst = g.inst.clone();
        let kind = g.kind;
        let outs = g.outputs.clone();
        let ins = g.inputs.clone();
        let source = self.sources.len();
        self.sources.push(SourceGate { inst: inst.clone(), kind: kind.keyword().into(), line: g.line });
        let w = self.c.nets[outs[0]].width;
        let in_bits = |s: &Self, k: usize| s.bits[ins[k]].clone();
        let mut e = Emit { prims: Vec::new() };
        let mut out_bits: Vec<usize> = Vec::new();
        match kind {
            GateKind::Not | GateKind::Assign => {
                let a = in_bits(self, 0);
                let pk = if kind == GateKind::Not { PrimKind::Inv } else { PrimKind::Buf };
                for i in 0..w {
                    let o = self.out_net(outs[0], i);
                    e.prims.push((format!("b{i}"), pk, vec![Pin::Net(a[i as usize])], vec![o]));
                    out_bits.push(o);
                }
            }
            GateKind::And | GateKind::Or | GateKind::Xor => {
                let pk = match kind {
                    GateKind::And => PrimKind::And2,
                    GateKind::Or => PrimKind::Or2,
                    _ => PrimKind::Xor2,
                };
                let words: Vec<Vec<usize>> = (0..ins.len()).map(|k| in_bits(self, k)).collect();
                for i in 0..w {
                    let o = self.out_net(outs[0], i);
                    let leaves = words.iter().map(|wd| wd[i as usize]).collect();
                    self.tree(&mut e, &inst, &format!("b{i}"), pk, leaves, o);
                    out_bits.push(o);
                }
            }
            GateKind::RedAnd | GateKind::RedOr | GateKind::RedXor => {
                let pk = match kind {
                    GateKind::RedAnd => PrimKind::And2,
                    GateKind::RedOr => PrimKind::Or2,
                    _ => PrimKind::Xor2,
                };
                let o = self.out_net(outs[0], 0);
                let leaves = in_bits(self, 0);
                self.tree(&mut e, &inst, "r", pk, leaves, o);
                out_bits.push(o);
            }
            GateKind::Mux2 => {
                let s = in_bits(self, 0)[0];
                let (a, b) = (in_bits(self, 1), in_bits(self, 2));
                for i in 0..w as usize {
                    let o = self.out_net(outs[0], i as u32);
                    e.prims.push((format!("b{i}"), PrimKind::Mux2, vec![Pin::Net(s), Pin::Net(a[i]), Pin::Net(b[i])], vec![o]));
                    out_bits.push(o);
                }
            }
            GateKind::Eq => {
                let (a, b) = (in_bits(self, 0), in_bits(self, 1));
                let o = self.out_net(outs[0], 0);
                let mut leaves = Vec::new();
                for i in 0..a.len() {
                    let x = self.net(format!("{inst}/x{i}"));
                    e.prims.push((format!("x{i}"), PrimKind::Xor2, vec![Pin::Net(a[i]), Pin::Net(b[i])], vec![x]));
                    let n = if a.len() == 1 { o } else { self.net(format!("{inst}/n{i}")) };
                    e.prims.push((format!("n{i}"), PrimKind::Inv, vec![Pin::Net(x)], vec![n]));
                    leaves.push(n);
                }
                if leaves.len() > 1 {
                    self.tree(&mut e, &inst, "r", PrimKind::And2, leaves, o);
                }
                out_bits.push(o);
            }
            GateKind::Lt => {
                let (a, b) = (in_bits(self, 0), in_bits(self, 1));
                let n = a.len();
                let o = self.out_net(outs[0], 0);
                let na = self.net(format!("{inst}/na0"));
                e.prims.push(("na0".into(), PrimKind::Inv, vec![Pin::Net(a[0])], vec![na]));
                let mut lt = if n == 1 { o } else { self.net(format!("{inst}/lt0")) };
                e.prims.push(("lt0".into(), PrimKind::And2, vec![Pin::Net(na), Pin::Net(b[0])], vec![lt]));
                for i in 1..n {
                    let d = self.net(format!("{inst}/d{i}"));
                    e.prims.push((format!("d{i}"), PrimKind::Xor2, vec![Pin::Net(a[i]), Pin::Net(b[i])], vec![d]));
                    let next = if i + 1 == n { o } else { self.net(format!("{inst}/lt{i}")) };
                    e.prims.push((format!("lt{i}"), PrimKind::Mux2, vec![Pin::Net(d), Pin::Net(lt), Pin::Net(b[i])], vec![next]));
                    lt = next;
                }
                out_bits.push(o);
            }
            GateKind::Add => {
                let (a, b) = (in_bits(self, 0), in_bits(self, 1));
                let sum: Vec<usize> = (0..w).map(|i| self.out_net(outs[0], i)).collect();
                let carry = outs.get(1).map(|&co| self.out_net(co, 0));
                self.ripple(&mut e, &inst, &a, &b, &sum, carry);
                out_bits = sum;
                if let (Some(&co), Some(cn)) = (outs.get(1), carry) {
                    self.bits[co] = vec![cn];
                }
            }
            GateKind::Sub => {
                let (a, b) = (in_bits(self, 0), in_bits(self, 1));
                let mut na = Vec::new();
                for (i, &ai) in a.iter().enumerate() {
                    let n = self.net(format!("{inst}/na{i}"));
                    e.prims.push((format!("na{i}"), PrimKind::Inv, vec![Pin::Net(ai)], vec![n]));
                    na.push(n);
                }
                let raw: Vec<usize> = (0..w).map(|i| self.net(format!("{inst}/r{i}"))).collect();
                self.ripple(&mut e, &inst, &na, &b, &raw, None);
                for (i, &r) in raw.iter().enumerate() {
                    let o = self.out_net(outs[0], i as u32);
                    e.prims.push((format!("ns{i}"), PrimKind::Inv, vec![Pin::Net(r)], vec![o]));
                    out_bits.push(o);
                }
            }
            GateKind::Shl(k) => {
                let a = in_bits(self, 0);
                for i in 0..w {
                    out_bits.push(if i >= k { a[(i - k) as usize] } else { self.zero() });
                }
            }
            GateKind::Shr(k) => {
                let a = in_bits(self, 0);
                for i in 0..w {
                    out_bits.push(if (i as u64 + k as u64) < w as u64 { a[(i + k) as usize] } else { self.zero() });
                }
            }
            GateKind::Slice { lo } => {
                let a = in_bits(self, 0);
                out_bits = (0..w).map(|i| a[(lo + i) as usize]).collect();
            }
            GateKind::Concat => {
                for k in 0..ins.len() {
                    out_bits.extend(in_bits(self, k));
                }
            }
        }
        self.bits[outs[0]] = out_bits;
        self.flush(&inst, e, source);
    }
}

/// Decompose a circuit into primitives. Deterministic.
pub fn elaborate(c: &Circuit) -> ElaboratedCircuit {
    let mut el = Elab { c, nets: Vec::new(), gates: Vec::new(), bits: vec![Vec::new(); c.nets.len()], sources: Vec::new(), zero: None };
    let mut inputs = Vec::new();
    for p in c.inputs() {
        let d = &c.nets[p.net];
        let bits: Vec<usize> = (0..d.width).map(|i| el.out_net(p.net, i)).collect();
        el.bits[p.net] = bits.clone();
        inputs.push(PortBits { name: d.name.clone(), bits });
    }
    for r in &c.registers {
        let d = &c.nets[r.q];
        el.bits[r.q] = (0..d.width).map(|i| el.out_net(r.q, i)).collect();
    }
    for k in &c.consts {
        let d = &c.nets[k.net];
        let source = el.sources.len();
        el.sources.push(SourceGate { inst: d.name.clone(), kind: "const".into(), line: 0 });
        let mut e = Emit { prims: Vec::new() };
        let mut bits = Vec::new();
        for i in 0..d.width {
            let o = el.out_net(k.net, i);
            let kind = if (k.value >> i) & 1 == 1 { PrimKind::Const1 } else { PrimKind::Const0 };
            e.prims.push((format!("b{i}"), kind, vec![], vec![o]));
            bits.push(o);
        }
        el.bits[k.net] = bits;
        let name = d.name.clone();
        el.flush(&name, e, source);
    }
    for &gi in &c.order {
        el.gate(gi);
    }
    let mut outputs = Vec::new();
    let mut pos = Vec::new();
    let mut po_names = Vec::new();
    for p in c.outputs() {
        let d = &c.nets[p.net];
        let bits = el.bits[p.net].clone();
        for i in 0..d.width {
            po_names.push(bit_name(&d.name, d.width, i));
        }
        pos.extend(&bits);
        outputs.push(PortBits { name: d.name.clone(), bits });
    }
    let mut pis: Vec<usize> = inputs.iter().flat_map(|p| p.bits.iter().copied()).collect();
    let mut pi_names: Vec<String> = pis.iter().map(|&n| el.nets[n].clone()).collect();
    let mut registers = Vec::new();
    for r in &c.registers {
        let w = c.nets[r.q].width;
        let q = el.bits[r.q].clone();
        let d = el.bits[r.d].clone();
        pis.extend(&q);
        pi_names.extend(q.iter().map(|&n| el.nets[n].clone()));
        pos.extend(&d);
        for i in 0..w {
            po_names.push(bit_name(&format!("{}.d", r.inst), w, i));
        }
        registers.push(RegisterBits { inst: r.inst.clone(), q, d, init: r.init });
    }
    // Constants and the shared zero are created before any gate uses them,
    // but the zero may be created late; restore topological order.
    let gates = topo_sort(el.nets.len(), el.gates);
    ElaboratedCircuit {
        name: c.name.clone(),
        nets: el.nets,
        gates,
        pis,
        pos,
        po_names,
        pi_names,
        interface: Interface { inputs, outputs, registers },
        sources: el.sources,
    }
}

/// Stable topological sort of primitive gates (ties keep original order).
pub(crate) fn topo_sort(num_nets: usize, gates: Vec<PrimGate>) -> Vec<PrimGate> {
    let mut driver = vec![usize::MAX; num_nets];
    for (i, g) in gates.iter().enumerate() {
        for &o in &g.outputs {
            driver[o] = i;
        }
    }
    let n = gates.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for (i, g) in gates.iter().enumerate() {
        for p in &g.inputs {
            if let Pin::Net(net) = *p {
                let d = driver[net];
                if d != usize::MAX {
                    succ[d].push(i);
                    indeg[i] += 1;
                }
            }
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&i| indeg[i] == 0).map(std::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(i)) = ready.pop() {
        order.push(i);
        for &s in &succ[i] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(std::cmp::Reverse(s));
            }
        }
    }
    assert_eq!(order.len(), n, "primitive netlist has a cycle");
    let mut slots: Vec<Option<PrimGate>> = gates.into_iter().map(Some).collect();
    order.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

impl ElaboratedCircuit {
    pub fn num_state_bits(&self) -> usize {
        self.interface.registers.iter().map(|r| r.q.len()).sum()
    }

    pub fn num_input_bits(&self) -> usize {
        self.pis.len() - self.num_state_bits()
    }

    pub fn net_index(&self, name: &str) -> Option<usize> {
        self.nets.iter().position(|n| n == name)
    }

    pub fn gate_index(&self, name: &str) -> Option<usize> {
        self.gates.iter().position(|g| g.name == name)
    }

    /// Bit-parallel evaluation view (one cell per primitive output).
    pub fn to_cells(&self) -> CellNetlist {
        let mut cells = Vec::new();
        for g in &self.gates {
            let ins: Vec<Operand> = g
                .inputs
                .iter()
                .map(|p| match *p {
                    Pin::Net(n) => Operand::net(n),
                    Pin::Const(b) => Operand::Const(b),
                })
                .collect();
            for (o, &net) in g.outputs.iter().enumerate() {
                let (op, ops) = g.kind.cell(o, &ins);
                cells.push(Cell { op, ins: ops, out: net });
            }
        }
        CellNetlist::new(self.nets.len(), cells, self.pis.clone(), self.pos.clone())
    }

    /// Which gate drives each net (`None` for primary inputs).
    pub fn drivers(&self) -> Vec<Option<(usize, usize)>> {
        let mut d = vec![None; self.nets.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            for (o, &n) in g.outputs.iter().enumerate() {
                d[n] = Some((gi, o));
            }
        }
        d
    }

    /// Local minterm of gate `g` given net values.
    pub fn local_minterm(&self, g: usize, values: &[bool]) -> u32 {
        self.local_minterm_of(&self.gates[g], values)
    }
}

/// One combinational frame: `pi` holds input-port bits, `state` register bits.
pub fn evaluate_frame(e: &ElaboratedCircuit, pi: &[bool], state: &[bool]) -> FrameValues {
    assert_eq!(pi.len(), e.num_input_bits(), "input width mismatch");
    assert_eq!(state.len(), e.num_state_bits(), "state width mismatch");
    let mut v = vec![false; e.nets.len()];
    for (&n, &b) in e.pis.iter().zip(pi.iter().chain(state)) {
        v[n] = b;
    }
    for g in &e.gates {
        let m = e.local_minterm_of(g, &v);
        for (o, &n) in g.outputs.iter().enumerate() {
            v[n] = g.kind.eval(m, o);
        }
    }
    let n_out = e.pos.len() - e.num_state_bits();
    let outputs = e.pos[..n_out].iter().map(|&n| v[n]).collect();
    let next_state = e.pos[n_out..].iter().map(|&n| v[n]).collect();
    FrameValues { nets: v, outputs, state: state.to_vec(), next_state }
}

impl ElaboratedCircuit {
    fn local_minterm_of(&self, g: &PrimGate, values: &[bool]) -> u32 {
        g.inputs.iter().fold(0, |m, p| {
            let v = match *p {
                Pin::Net(n) => values[n],
                Pin::Const(b) => b,
            };
            (m << 1) | v as u32
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{library, parse_circuit};

    fn count(e: &ElaboratedCircuit, k: PrimKind) -> usize {
        e.gates.iter().filter(|g| g.kind == k).count()
    }

    #[test]
    fn add64_is_ha_plus_fa_chain() {
        let e = elaborate(&library::adder(64));
        assert_eq!(count(&e, PrimKind::Ha), 1);
        assert_eq!(count(&e, PrimKind::Fa), 63);
        assert_eq!(e.gates.len(), 64);
        let e1 = elaborate(&library::adder(1));
        assert_eq!(e1.gates.len(), 1);
        assert_eq!(e1.gates[0].kind, PrimKind::Ha);
    }

    #[test]
    fn mul8_structure() {
        let e = elaborate(&library::multiplier(8));
        assert_eq!(count(&e, PrimKind::And2), 64);
        assert_eq!(count(&e, PrimKind::Ha), 7);
        assert_eq!(count(&e, PrimKind::Fa), 49);
        assert_eq!(e.pos.len(), 16);
    }

    #[test]
    fn c1_frames() {
        let e = elaborate(&library::c1());
        let f = evaluate_frame(&e, &[true, true, false], &[]);
        assert!(f.nets[e.net_index("d").unwrap()]);
        assert_eq!(f.outputs, vec![true]);
        let f = evaluate_frame(&e, &[false, false, false], &[]);
        assert_eq!(f.outputs, vec![false]);
        assert_eq!(e.gates[0].name, "g1");
        assert_eq!(e.nets, vec!["a", "b", "c", "d", "x"]);
    }

    #[test]
    fn add4_wraps() {
        let e = elaborate(&library::adder(4));
        let bits = |v: u64| (0..4).map(move |i| (v >> i) & 1 == 1);
        let pi: Vec<bool> = bits(0xF).chain(bits(0x1)).collect();
        let f = evaluate_frame(&e, &pi, &[]);
        assert_eq!(f.outputs, vec![false; 4]);
    }

    #[test]
    fn every_kind_matches_word_semantics() {
        let src = "circuit k\ninput a 3\ninput b 3\ninput s 1\noutput o1 3\noutput o2 1\noutput o3 1\noutput o4 3\noutput o5 3\noutput o6 1\noutput o7 1\noutput o8 3\noutput o9 3\noutput o10 3\n\
            wire t 3\nwire u 6\nwire v 2\n\
            gate xor g1 t a b a\ngate mux2 g2 o1 s t b\ngate eq g3 o2 a b\ngate lt g4 o3 a b\ngate sub g5 o4 a b\n\
            gate shl g6 o5 a k=1\ngate ror g7 o6 a\ngate rxor g8 o7 b\ngate concat g9 u a b\ngate slice g10 v u lo=2\n\
            gate concat g11 o8 v s\ngate shr g12 o9 b k=2\ngate or g13 o10 a b\nend";
        let c = parse_circuit(src).unwrap();
        let e = elaborate(&c);
        for x in 0..(1u64 << 7) {
            let (a, b, s) = (x & 7, (x >> 3) & 7, x >> 6);
            let w = c.eval(&[a, b, s], &[]);
            let pi: Vec<bool> = (0..7).map(|i| (x >> i) & 1 == 1).collect();
            let f = evaluate_frame(&e, &pi, &[]);
            let mut expect = Vec::new();
            for (p, &val) in c.outputs().zip(&w.outputs) {
                for i in 0..c.nets[p.net].width {
                    expect.push((val >> i) & 1 == 1);
                }
            }
            assert_eq!(f.outputs, expect, "a={a} b={b} s={s}");
        }
    }
}
