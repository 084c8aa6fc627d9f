//! Gate-level netlists over AND/OR/XOR/INV/BUF/CONST with optionally
//! inverted input literals (`!net`).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::circuit::gnl::{diag, is_ident, tokenize};
use crate::circuit::{DiagCode, Diagnostic};
use crate::logic::{Cell, CellNetlist, CellOp, Operand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateOp {
    And,
    Or,
    Xor,
    Inv,
    Buf,
    Const0,
    Const1,
}

impl GateOp {
    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "and",
            GateOp::Or => "or",
            GateOp::Xor => "xor",
            GateOp::Inv => "inv",
            GateOp::Buf => "buf",
            GateOp::Const0 => "const0",
            GateOp::Const1 => "const1",
        }
    }

    fn from_name(s: &str) -> Option<GateOp> {
        Some(match s {
            "and" => GateOp::And,
            "or" => GateOp::Or,
            "xor" => GateOp::Xor,
            "inv" | "not" => GateOp::Inv,
            "buf" => GateOp::Buf,
            "const0" => GateOp::Const0,
            "const1" => GateOp::Const1,
            _ => return None,
        })
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            GateOp::And | GateOp::Or | GateOp::Xor => n >= 2,
            GateOp::Inv | GateOp::Buf => n == 1,
            GateOp::Const0 | GateOp::Const1 => n == 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lit {
    pub net: usize,
    pub inv: bool,
}

impl Lit {
    pub fn pos(net: usize) -> Lit {
        Lit { net, inv: false }
    }

    pub fn neg(net: usize) -> Lit {
        Lit { net, inv: true }
    }

    pub fn not(self) -> Lit {
        Lit { net: self.net, inv: !self.inv }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NGate {
    pub name: String,
    pub op: GateOp,
    pub ins: Vec<Lit>,
    pub out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetRegister {
    pub inst: String,
    pub q: usize,
    pub d: usize,
    pub init: bool,
}

/// Single-bit gate netlist. Frame PIs are the inputs followed by register
/// q nets; frame POs are the outputs followed by register d nets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateNetlist {
    pub name: String,
    pub nets: Vec<String>,
    /// Topologically ordered.
    pub gates: Vec<NGate>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub registers: Vec<NetRegister>,
}

impl GateNetlist {
    pub fn pis(&self) -> Vec<usize> {
        self.inputs.iter().copied().chain(self.registers.iter().map(|r| r.q)).collect()
    }

    pub fn pos(&self) -> Vec<usize> {
        self.outputs.iter().copied().chain(self.registers.iter().map(|r| r.d)).collect()
    }

    pub fn net_index(&self, name: &str) -> Option<usize> {
        self.nets.iter().position(|n| n == name)
    }

    pub fn to_cells(&self) -> CellNetlist {
        let cells = self
            .gates
            .iter()
            .map(|g| {
                let ops = |inv_all: bool| -> Vec<Operand> {
                    g.ins.iter().map(|l| Operand::Net { net: l.net, inv: l.inv ^ inv_all }).collect()
                };
                let (op, ins) = match g.op {
                    GateOp::And => (CellOp::And, ops(false)),
                    GateOp::Or => (CellOp::Or, ops(false)),
                    GateOp::Xor => (CellOp::Xor, ops(false)),
                    GateOp::Inv => (CellOp::Buf, ops(true)),
                    GateOp::Buf => (CellOp::Buf, ops(false)),
                    GateOp::Const0 => (CellOp::Buf, vec![Operand::Const(false)]),
                    GateOp::Const1 => (CellOp::Buf, vec![Operand::Const(true)]),
                };
                Cell { op, ins, out: g.out }
            })
            .collect();
        CellNetlist::new(self.nets.len(), cells, self.pis(), self.pos())
    }

    /// Evaluate one frame (scalar).
    pub fn eval(&self, frame: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.nets.len()];
        for (&n, &b) in self.pis().iter().zip(frame) {
            v[n] = b;
        }
        for g in &self.gates {
            v[g.out] = eval_gate(g, &v);
        }
        v
    }

    /// Gate counts by operator, for reports.
    pub fn stats(&self) -> HashMap<&'static str, usize> {
        let mut m = HashMap::new();
        for g in &self.gates {
            *m.entry(g.op.name()).or_insert(0) += 1;
        }
        m
    }
}

pub(crate) fn eval_gate(g: &NGate, v: &[bool]) -> bool {
    let lit = |l: &Lit| v[l.net] ^ l.inv;
    match g.op {
        GateOp::And => g.ins.iter().all(lit),
        GateOp::Or => g.ins.iter().any(lit),
        GateOp::Xor => g.ins.iter().fold(false, |a, l| a ^ lit(l)),
        GateOp::Inv => !lit(&g.ins[0]),
        GateOp::Buf => lit(&g.ins[0]),
        GateOp::Const0 => false,
        GateOp::Const1 => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sig {
    Const(bool),
    Lit(Lit),
}

pub(crate) enum Folded {
    Sig(Sig),
    Gate(GateOp, Vec<Lit>),
}

/// Fold constant inputs of a gate. `None` for constant gates.
pub(crate) fn fold(op: GateOp, ins: &[Sig]) -> Option<Folded> {
    let lits: Vec<Lit> = ins
        .iter()
        .filter_map(|s| match s {
            Sig::Lit(l) => Some(*l),
            Sig::Const(_) => None,
        })
        .collect();
    let consts = ins.iter().filter_map(|s| match s {
        Sig::Const(b) => Some(*b),
        Sig::Lit(_) => None,
    });
    let narrow = |lits: Vec<Lit>, op: GateOp, empty: bool| match lits.len() {
        0 => Folded::Sig(Sig::Const(empty)),
        1 => Folded::Sig(Sig::Lit(lits[0])),
        _ => Folded::Gate(op, lits),
    };
    Some(match op {
        GateOp::And => {
            if consts.clone().any(|b| !b) {
                Folded::Sig(Sig::Const(false))
            } else {
                narrow(lits, op, true)
            }
        }
        GateOp::Or => {
            if consts.clone().any(|b| b) {
                Folded::Sig(Sig::Const(true))
            } else {
                narrow(lits, op, false)
            }
        }
        GateOp::Xor => {
            let parity = consts.fold(false, |a, b| a ^ b);
            match lits.len() {
                0 => Folded::Sig(Sig::Const(parity)),
                1 => Folded::Sig(Sig::Lit(Lit { net: lits[0].net, inv: lits[0].inv ^ parity })),
                _ => {
                    let mut lits = lits;
                    lits[0].inv ^= parity;
                    Folded::Gate(op, lits)
                }
            }
        }
        GateOp::Inv => match ins[0] {
            Sig::Const(b) => Folded::Sig(Sig::Const(!b)),
            Sig::Lit(l) => Folded::Sig(Sig::Lit(l.not())),
        },
        GateOp::Buf => Folded::Sig(ins[0]),
        GateOp::Const0 | GateOp::Const1 => return None,
    })
}

/// Stable topological order; `None` if the gates form a cycle.
pub(crate) fn topo_order(num_nets: usize, gates: &[NGate]) -> Result<Vec<usize>, usize> {
    let mut driver = vec![usize::MAX; num_nets];
    for (i, g) in gates.iter().enumerate() {
        driver[g.out] = i;
    }
    let mut indeg = vec![0usize; gates.len()];
    let mut succ = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for l in &g.ins {
            let d = driver[l.net];
            if d != usize::MAX {
                succ[d].push(i);
                indeg[i] += 1;
            }
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..gates.len()).filter(|&i| indeg[i] == 0).map(std::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(std::cmp::Reverse(i)) = ready.pop() {
        order.push(i);
        for &s in &succ[i] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(std::cmp::Reverse(s));
            }
        }
    }
    if order.len() == gates.len() {
        Ok(order)
    } else {
        Err((0..gates.len()).find(|&i| indeg[i] > 0).unwrap())
    }
}

/// Parse the primitive GNL dialect: all nets 1 bit, `gate <op> <inst> <out>
/// <lit...>` with `!net` for inverted inputs.
pub fn parse_netlist(text: &str) -> Result<GateNetlist, Diagnostic> {
    let stmts = tokenize(text);
    let Some(first) = stmts.first() else {
        return Err(diag(DiagCode::Syntax, 1, 1, "empty netlist, expected `circuit <name>`"));
    };
    if first.toks[0].text != "circuit" || first.toks.len() != 2 {
        return Err(diag(DiagCode::Syntax, first.line, first.toks[0].col, "expected `circuit <name>`"));
    }
    let Some(end) = stmts.iter().position(|s| s.toks[0].text == "end") else {
        return Err(diag(DiagCode::Syntax, stmts.last().unwrap().line, 1, "missing `end`"));
    };
    if let Some(extra) = stmts.get(end + 1) {
        return Err(diag(DiagCode::Syntax, extra.line, 1, "statement after `end`"));
    }
    let mut nets: Vec<String> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut decl_line = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let body = &stmts[1..end];
    for s in body {
        let kw = s.toks[0];
        if !matches!(kw.text, "input" | "output" | "wire") {
            continue;
        }
        if s.toks.len() != 3 {
            return Err(diag(DiagCode::Syntax, s.line, kw.col, format!("expected `{} <net> 1`", kw.text)));
        }
        if s.toks[2].text != "1" {
            return Err(diag(DiagCode::WidthMismatch, s.line, s.toks[2].col, "gate-level nets must be 1 bit wide"));
        }
        let name = s.toks[1].text;
        if !is_ident(name) {
            return Err(diag(DiagCode::Syntax, s.line, s.toks[1].col, format!("invalid net name `{name}`")));
        }
        if by_name.contains_key(name) {
            return Err(diag(DiagCode::DuplicateName, s.line, s.toks[1].col, format!("net `{name}` already declared")));
        }
        by_name.insert(name.to_string(), nets.len());
        decl_line.push((s.line, s.toks[1].col));
        match kw.text {
            "input" => inputs.push(nets.len()),
            "output" => outputs.push(nets.len()),
            _ => {}
        }
        nets.push(name.to_string());
    }
    let mut driven = vec![false; nets.len()];
    for &i in &inputs {
        driven[i] = true;
    }
    let lookup = |t: crate::circuit::gnl::Tok<'_>, line: usize| {
        by_name
            .get(t.text)
            .copied()
            .ok_or_else(|| diag(DiagCode::UndeclaredNet, line, t.col, format!("undeclared net `{}`", t.text)))
    };
    let mut gates = Vec::new();
    let mut gate_pos = Vec::new();
    let mut registers = Vec::new();
    let mut insts: HashMap<String, usize> = HashMap::new();
    for s in body {
        let kw = s.toks[0];
        match kw.text {
            "input" | "output" | "wire" => {}
            "gate" => {
                if s.toks.len() < 4 {
                    return Err(diag(DiagCode::Syntax, s.line, kw.col, "expected `gate <op> <inst> <out> <in...>`"));
                }
                let Some(op) = GateOp::from_name(s.toks[1].text) else {
                    return Err(diag(DiagCode::UnknownKind, s.line, s.toks[1].col, format!("unknown gate kind `{}`", s.toks[1].text)));
                };
                let inst = s.toks[2];
                if insts.insert(inst.text.to_string(), s.line).is_some() {
                    return Err(diag(DiagCode::DuplicateName, s.line, inst.col, format!("instance `{}` already defined", inst.text)));
                }
                let out = lookup(s.toks[3], s.line)?;
                if driven[out] {
                    return Err(diag(DiagCode::MultipleDrivers, s.line, s.toks[3].col, format!("net `{}` has multiple drivers", nets[out])));
                }
                driven[out] = true;
                let mut ins = Vec::new();
                for t in &s.toks[4..] {
                    let (inv, name) = match t.text.strip_prefix('!') {
                        Some(r) => (true, r),
                        None => (false, t.text),
                    };
                    let net = lookup(crate::circuit::gnl::Tok { col: t.col, text: name }, s.line)?;
                    ins.push(Lit { net, inv });
                }
                if !op.arity_ok(ins.len()) {
                    return Err(diag(DiagCode::Syntax, s.line, s.toks[1].col, format!("wrong input count for `{}`", op.name())));
                }
                gates.push(NGate { name: inst.text.to_string(), op, ins, out });
                gate_pos.push((s.line, inst.col));
            }
            "dff" => {
                let mut init = false;
                let mut args = Vec::new();
                for t in &s.toks[1..] {
                    match t.text.strip_prefix("init=") {
                        Some("0x0" | "0") => init = false,
                        Some("0x1" | "1") => init = true,
                        Some(_) => return Err(diag(DiagCode::BadParameter, s.line, t.col, "init must be 0 or 1")),
                        None => args.push(*t),
                    }
                }
                if args.len() != 3 {
                    return Err(diag(DiagCode::Syntax, s.line, kw.col, "expected `dff <inst> <q> <d>`"));
                }
                let q = lookup(args[1], s.line)?;
                let d = lookup(args[2], s.line)?;
                if driven[q] {
                    return Err(diag(DiagCode::MultipleDrivers, s.line, args[1].col, format!("net `{}` has multiple drivers", nets[q])));
                }
                driven[q] = true;
                registers.push(NetRegister { inst: args[0].text.to_string(), q, d, init });
            }
            other => return Err(diag(DiagCode::Syntax, s.line, kw.col, format!("unknown statement `{other}`"))),
        }
    }
    if let Some(n) = driven.iter().position(|d| !d) {
        let (line, col) = decl_line[n];
        return Err(diag(DiagCode::UndrivenNet, line, col, format!("net `{}` has no driver", nets[n])));
    }
    let order = topo_order(nets.len(), &gates).map_err(|g| {
        let (line, col) = gate_pos[g];
        diag(DiagCode::CombinationalCycle, line, col, format!("gate `{}` is part of a combinational cycle", gates[g].name))
    })?;
    let mut slots: Vec<Option<NGate>> = gates.into_iter().map(Some).collect();
    let gates = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
    Ok(GateNetlist { name: first.toks[1].text.to_string(), nets, gates, inputs, outputs, registers })
}

pub fn print_netlist(n: &GateNetlist) -> String {
    let mut s = format!("circuit {}\n", n.name);
    let mut special = vec![false; n.nets.len()];
    for &i in &n.inputs {
        special[i] = true;
        let _ = writeln!(s, "input {} 1", n.nets[i]);
    }
    for &o in &n.outputs {
        special[o] = true;
        let _ = writeln!(s, "output {} 1", n.nets[o]);
    }
    for (i, name) in n.nets.iter().enumerate() {
        if !special[i] {
            let _ = writeln!(s, "wire {name} 1");
        }
    }
    for r in &n.registers {
        let _ = write!(s, "dff {} {} {}", r.inst, n.nets[r.q], n.nets[r.d]);
        if r.init {
            s.push_str(" init=1");
        }
        s.push('\n');
    }
    for g in &n.gates {
        let _ = write!(s, "gate {} {} {}", g.op.name(), g.name, n.nets[g.out]);
        for l in &g.ins {
            let _ = write!(s, " {}{}", if l.inv { "!" } else { "" }, n.nets[l.net]);
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

/// Gate-level form of the second example circuit:
/// `x' = (a & b & !c) | (!(a & b) & c)` with `f = a & b`.
pub const C2_NETLIST: &str = "circuit c2
input a 1
input b 1
input c 1
output x' 1
wire e 1
wire f 1
wire g 1
gate and g1 e a b !c
gate and g2 f a b
gate and g3 g !f c
gate or g4 x' e g
end
";

/// Gate-level form of the first example circuit.
pub const C1_NETLIST: &str = "circuit c1
input a 1
input b 1
input c 1
output x 1
wire d 1
gate and g1 d a b
gate xor g2 x d c
end
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let c1 = parse_netlist(C1_NETLIST).unwrap();
        assert_eq!(c1.nets.len(), 5);
        let c2 = parse_netlist(C2_NETLIST).unwrap();
        assert_eq!(c2.nets, vec!["a", "b", "c", "x'", "e", "f", "g"]);
        assert_eq!(print_netlist(&parse_netlist(&print_netlist(&c2)).unwrap()), print_netlist(&c2));
        for m in 0..8u32 {
            let f: Vec<bool> = (0..3).map(|i| (m >> (2 - i)) & 1 == 1).collect();
            assert_eq!(c1.eval(&f)[3], c2.eval(&f)[3]);
        }
    }

    #[test]
    fn rejects_bad_netlists() {
        let bad = [
            ("circuit t\ninput a 2\nend", DiagCode::WidthMismatch),
            ("circuit t\ninput a 1\noutput x 1\ngate nand g x a a\nend", DiagCode::UnknownKind),
            ("circuit t\ninput a 1\noutput x 1\ngate buf g x a\ngate inv h x a\nend", DiagCode::MultipleDrivers),
            ("circuit t\ninput a 1\noutput x 1\nend", DiagCode::UndrivenNet),
            ("circuit t\ninput a 1\noutput x 1\nwire y 1\ngate and g y a x\ngate buf h x y\nend", DiagCode::CombinationalCycle),
        ];
        for (t, code) in bad {
            assert_eq!(parse_netlist(t).unwrap_err().code, code, "{t}");
        }
    }

    #[test]
    fn gates_sorted_topologically() {
        let t = "circuit t\ninput a 1\noutput x 1\nwire y 1\ngate inv g2 x y\ngate buf g1 y a\nend";
        let n = parse_netlist(t).unwrap();
        assert_eq!(n.gates[0].name, "g1");
    }
}
