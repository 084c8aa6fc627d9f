//! GNL, the line-based netlist language.
//!
//! ```text
//! circuit c1
//! input a 1
//! input b 1
//! input c 1
//! output x 1
//! wire d 1
//! gate and g1 d a b
//! gate xor g2 x d c
//! end
//! ```
//!
//! Statements: `circuit`, `input`, `output`, `wire`, `const <net> <w> 0x<hex>`,
//! `dff <inst> <q> <d> [init=0x<hex>]`, `gate <kind> <inst> <out...> <in...>
//! [key=value]` and `end`. `#` starts a comment. `gate mul <inst> <p> <a> <b>`
//! is a macro expanding into an AND array and a row of carry-out adders.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use serde::Serialize;

use super::{width_mask, Circuit, ConstDecl, Direction, GateInstance, GateKind, NetDecl, Port, Register};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DiagCode {
    Syntax,
    UnknownKind,
    WidthMismatch,
    MultipleDrivers,
    CombinationalCycle,
    UndeclaredNet,
    UndrivenNet,
    DuplicateName,
    BadParameter,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "E001",
            DiagCode::UnknownKind => "E002",
            DiagCode::WidthMismatch => "E003",
            DiagCode::MultipleDrivers => "E004",
            DiagCode::CombinationalCycle => "E005",
            DiagCode::UndeclaredNet => "E006",
            DiagCode::UndrivenNet => "E007",
            DiagCode::DuplicateName => "E008",
            DiagCode::BadParameter => "E009",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: error[{}]: {}", self.line, self.col, self.code.as_str(), self.message)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tok<'a> {
    pub col: usize,
    pub text: &'a str,
}

pub(crate) struct Stmt<'a> {
    pub line: usize,
    pub toks: Vec<Tok<'a>>,
}

/// Split source into non-empty statements with 1-based line/column positions.
pub(crate) fn tokenize(text: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut toks = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    toks.push(Tok { col: s + 1, text: &body[s..pos] });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            toks.push(Tok { col: s + 1, text: &body[s..] });
        }
        if !toks.is_empty() {
            out.push(Stmt { line: i + 1, toks });
        }
    }
    out
}

pub(crate) fn diag(code: DiagCode, line: usize, col: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic { code, line, col, message: message.into() }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '/' | '$' | '\'' | '[' | ']' | '-'))
}

pub(crate) fn parse_hex(s: &str) -> Option<u64> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X"))?;
    u64::from_str_radix(digits, 16).ok()
}

fn parse_width(tok: Tok<'_>, line: usize) -> Result<u32, Diagnostic> {
    match tok.text.parse::<u32>() {
        Ok(w) if (1..=64).contains(&w) => Ok(w),
        _ => Err(diag(DiagCode::Syntax, line, tok.col, format!("invalid width `{}` (expected 1..=64)", tok.text))),
    }
}

fn kind_from_keyword(kw: &str) -> Option<GateKind> {
    Some(match kw {
        "not" => GateKind::Not,
        "and" => GateKind::And,
        "or" => GateKind::Or,
        "xor" => GateKind::Xor,
        "rand" => GateKind::RedAnd,
        "ror" => GateKind::RedOr,
        "rxor" => GateKind::RedXor,
        "mux2" => GateKind::Mux2,
        "eq" => GateKind::Eq,
        "lt" => GateKind::Lt,
        "add" => GateKind::Add,
        "sub" => GateKind::Sub,
        "shl" => GateKind::Shl(0),
        "shr" => GateKind::Shr(0),
        "assign" => GateKind::Assign,
        "slice" => GateKind::Slice { lo: 0 },
        "concat" => GateKind::Concat,
        _ => return None,
    })
}

#[derive(Clone, Copy)]
enum Driver {
    Input,
    Const,
    Register,
    Gate(usize),
}

struct Builder {
    nets: Vec<NetDecl>,
    by_name: HashMap<String, usize>,
    decl_pos: Vec<(usize, usize)>,
    ports: Vec<Port>,
    consts: Vec<ConstDecl>,
    registers: Vec<Register>,
    gates: Vec<GateInstance>,
    gate_pos: Vec<(usize, usize)>,
    drivers: Vec<Option<Driver>>,
    inst_names: HashMap<String, (usize, usize)>,
}

impl Builder {
    fn add_net(&mut self, name: &str, width: u32, line: usize, col: usize) -> Result<usize, Diagnostic> {
        if !is_ident(name) {
            return Err(diag(DiagCode::Syntax, line, col, format!("invalid net name `{name}`")));
        }
        if let Some(&prev) = self.by_name.get(name) {
            return Err(diag(
                DiagCode::DuplicateName,
                line,
                col,
                format!("net `{name}` already declared on line {}", self.decl_pos[prev].0),
            ));
        }
        let idx = self.nets.len();
        self.nets.push(NetDecl { name: name.to_string(), width });
        self.by_name.insert(name.to_string(), idx);
        self.decl_pos.push((line, col));
        self.drivers.push(None);
        Ok(idx)
    }

    fn lookup(&self, tok: Tok<'_>, line: usize) -> Result<usize, Diagnostic> {
        self.by_name
            .get(tok.text)
            .copied()
            .ok_or_else(|| diag(DiagCode::UndeclaredNet, line, tok.col, format!("undeclared net `{}`", tok.text)))
    }

    fn drive(&mut self, net: usize, d: Driver, line: usize, col: usize) -> Result<(), Diagnostic> {
        if self.drivers[net].is_some() {
            return Err(diag(
                DiagCode::MultipleDrivers,
                line,
                col,
                format!("net `{}` has multiple drivers", self.nets[net].name),
            ));
        }
        self.drivers[net] = Some(d);
        Ok(())
    }

    fn claim_inst(&mut self, inst: &str, line: usize, col: usize) -> Result<(), Diagnostic> {
        if !is_ident(inst) {
            return Err(diag(DiagCode::Syntax, line, col, format!("invalid instance name `{inst}`")));
        }
        if let Some(&(l, _)) = self.inst_names.get(inst) {
            return Err(diag(DiagCode::DuplicateName, line, col, format!("instance `{inst}` already defined on line {l}")));
        }
        self.inst_names.insert(inst.to_string(), (line, col));
        Ok(())
    }

    fn width(&self, net: usize) -> u32 {
        self.nets[net].width
    }

    fn check_widths(&self, kind: GateKind, outs: &[usize], ins: &[usize], line: usize, col: usize) -> Result<(), Diagnostic> {
        let w = |n: usize| self.width(n);
        let ow = w(outs[0]);
        let bad = |msg: String| Err(diag(DiagCode::WidthMismatch, line, col, msg));
        let all_eq = |ns: &[usize], target: u32| ns.iter().all(|&n| w(n) == target);
        match kind {
            GateKind::Not | GateKind::Assign | GateKind::Shl(_) | GateKind::Shr(_) => {
                if w(ins[0]) != ow {
                    return bad(format!("{} expects equal input/output widths, got {} and {}", kind.keyword(), w(ins[0]), ow));
                }
            }
            GateKind::And | GateKind::Or | GateKind::Xor => {
                if !all_eq(ins, ow) {
                    return bad(format!("{} inputs must all have the output width {ow}", kind.keyword()));
                }
            }
            GateKind::RedAnd | GateKind::RedOr | GateKind::RedXor => {
                if ow != 1 {
                    return bad(format!("{} output must be 1 bit, got {ow}", kind.keyword()));
                }
            }
            GateKind::Mux2 => {
                if w(ins[0]) != 1 {
                    return bad(format!("mux2 select must be 1 bit, got {}", w(ins[0])));
                }
                if w(ins[1]) != ow || w(ins[2]) != ow {
                    return bad(format!("mux2 data inputs must have the output width {ow}"));
                }
            }
            GateKind::Eq | GateKind::Lt => {
                if w(ins[0]) != w(ins[1]) {
                    return bad(format!("{} operands differ in width ({} vs {})", kind.keyword(), w(ins[0]), w(ins[1])));
                }
                if ow != 1 {
                    return bad(format!("{} output must be 1 bit, got {ow}", kind.keyword()));
                }
            }
            GateKind::Add | GateKind::Sub => {
                if !all_eq(ins, ow) {
                    return bad(format!("{} operands must have the sum width {ow}", kind.keyword()));
                }
                if outs.len() == 2 && w(outs[1]) != 1 {
                    return bad(format!("carry-out must be 1 bit, got {}", w(outs[1])));
                }
            }
            GateKind::Slice { lo } => {
                if lo + ow > w(ins[0]) {
                    return bad(format!("slice lo={lo} width {ow} exceeds input width {}", w(ins[0])));
                }
            }
            GateKind::Concat => {
                let total: u32 = ins.iter().map(|&n| w(n)).sum();
                if total != ow {
                    return bad(format!("concat inputs total {total} bits, output has {ow}"));
                }
            }
        }
        Ok(())
    }

    fn add_gate(
        &mut self,
        kind: GateKind,
        inst: &str,
        outs: Vec<usize>,
        ins: Vec<usize>,
        line: usize,
        col: usize,
    ) -> Result<(), Diagnostic> {
        self.claim_inst(inst, line, col)?;
        self.check_widths(kind, &outs, &ins, line, col)?;
        let gi = self.gates.len();
        for &o in &outs {
            self.drive(o, Driver::Gate(gi), line, col)?;
        }
        self.gates.push(GateInstance { inst: inst.to_string(), kind, outputs: outs, inputs: ins, line });
        self.gate_pos.push((line, col));
        Ok(())
    }

    fn fresh(&mut self, base: &str, width: u32, line: usize, col: usize) -> Result<usize, Diagnostic> {
        self.add_net(base, width, line, col)
    }

    fn add_const(&mut self, name: &str, width: u32, value: u64, line: usize, col: usize) -> Result<usize, Diagnostic> {
        let n = self.add_net(name, width, line, col)?;
        self.drive(n, Driver::Const, line, col)?;
        self.consts.push(ConstDecl { net: n, value });
        Ok(n)
    }

    /// N x N -> 2N array multiplier: AND partial products and N-1 ripple
    /// adders with carry-out, each adding one partial product row to the
    /// shifted running sum.
    fn expand_mul(&mut self, inst: &str, p: usize, a: usize, b: usize, line: usize, col: usize) -> Result<(), Diagnostic> {
        let n = self.width(a);
        if self.width(b) != n || self.width(p) != 2 * n || n > 32 {
            return Err(diag(
                DiagCode::WidthMismatch,
                line,
                col,
                format!("mul expects N-bit operands and a 2N-bit product (N <= 32), got {}x{} -> {}", n, self.width(b), self.width(p)),
            ));
        }
        self.claim_inst(inst, line, col)?;
        let mut pp = Vec::new();
        for i in 0..n {
            let bit = self.fresh(&format!("{inst}/b{i}"), 1, line, col)?;
            self.add_gate(GateKind::Slice { lo: i }, &format!("{inst}/sb{i}"), vec![bit], vec![b], line, col)?;
            let rep = self.fresh(&format!("{inst}/rb{i}"), n, line, col)?;
            self.add_gate(GateKind::Concat, &format!("{inst}/rep{i}"), vec![rep], vec![bit; n as usize], line, col)?;
            let row = self.fresh(&format!("{inst}/pp{i}"), n, line, col)?;
            self.add_gate(GateKind::And, &format!("{inst}/and{i}"), vec![row], vec![a, rep], line, col)?;
            pp.push(row);
        }
        let p0 = self.fresh(&format!("{inst}/p0"), 1, line, col)?;
        self.add_gate(GateKind::Slice { lo: 0 }, &format!("{inst}/sp0"), vec![p0], vec![pp[0]], line, col)?;
        let mut product_bits = vec![p0];
        if n == 1 {
            let zero = self.add_const(&format!("{inst}/zero"), 1, 0, line, col)?;
            product_bits.push(zero);
        } else {
            let zero = self.add_const(&format!("{inst}/zero"), 1, 0, line, col)?;
            let hi = self.fresh(&format!("{inst}/hi0"), n - 1, line, col)?;
            self.add_gate(GateKind::Slice { lo: 1 }, &format!("{inst}/shi0"), vec![hi], vec![pp[0]], line, col)?;
            let mut acc = self.fresh(&format!("{inst}/acc0"), n, line, col)?;
            self.add_gate(GateKind::Concat, &format!("{inst}/cat0"), vec![acc], vec![hi, zero], line, col)?;
            for i in 1..n {
                let s = self.fresh(&format!("{inst}/s{i}"), n, line, col)?;
                let co = self.fresh(&format!("{inst}/co{i}"), 1, line, col)?;
                self.add_gate(GateKind::Add, &format!("{inst}/add{i}"), vec![s, co], vec![pp[i as usize], acc], line, col)?;
                let low = self.fresh(&format!("{inst}/p{i}"), 1, line, col)?;
                self.add_gate(GateKind::Slice { lo: 0 }, &format!("{inst}/sp{i}"), vec![low], vec![s], line, col)?;
                product_bits.push(low);
                let hi = self.fresh(&format!("{inst}/hi{i}"), n - 1, line, col)?;
                self.add_gate(GateKind::Slice { lo: 1 }, &format!("{inst}/shi{i}"), vec![hi], vec![s], line, col)?;
                acc = self.fresh(&format!("{inst}/acc{i}"), n, line, col)?;
                self.add_gate(GateKind::Concat, &format!("{inst}/cat{i}"), vec![acc], vec![hi, co], line, col)?;
            }
            product_bits.push(acc);
        }
        self.add_gate(GateKind::Concat, inst_alias(inst).as_str(), vec![p], product_bits, line, col)
    }
}

fn inst_alias(inst: &str) -> String {
    format!("{inst}/out")
}

/// Parse and validate GNL source.
pub fn parse_circuit(text: &str) -> Result<Circuit, Diagnostic> {
    let stmts = tokenize(text);
    let Some(first) = stmts.first() else {
        return Err(diag(DiagCode::Syntax, 1, 1, "empty netlist, expected `circuit <name>`"));
    };
    if first.toks[0].text != "circuit" || first.toks.len() != 2 {
        return Err(diag(DiagCode::Syntax, first.line, first.toks[0].col, "expected `circuit <name>`"));
    }
    let name = first.toks[1].text.to_string();
    if !is_ident(&name) {
        return Err(diag(DiagCode::Syntax, first.line, first.toks[1].col, format!("invalid circuit name `{name}`")));
    }
    let end_idx = stmts.iter().position(|s| s.toks[0].text == "end");
    let Some(end_idx) = end_idx else {
        let last = stmts.last().unwrap();
        return Err(diag(DiagCode::Syntax, last.line, 1, "missing `end`"));
    };
    if stmts[end_idx].toks.len() != 1 {
        return Err(diag(DiagCode::Syntax, stmts[end_idx].line, stmts[end_idx].toks[1].col, "unexpected tokens after `end`"));
    }
    if let Some(extra) = stmts.get(end_idx + 1) {
        return Err(diag(DiagCode::Syntax, extra.line, extra.toks[0].col, "statement after `end`"));
    }
    let body = &stmts[1..end_idx];

    let mut b = Builder {
        nets: Vec::new(),
        by_name: HashMap::new(),
        decl_pos: Vec::new(),
        ports: Vec::new(),
        consts: Vec::new(),
        registers: Vec::new(),
        gates: Vec::new(),
        gate_pos: Vec::new(),
        drivers: Vec::new(),
        inst_names: HashMap::new(),
    };

    // Declarations first so gates may reference nets declared further down.
    for s in body {
        let kw = s.toks[0];
        match kw.text {
            "input" | "output" | "wire" => {
                if s.toks.len() != 3 {
                    return Err(diag(DiagCode::Syntax, s.line, kw.col, format!("expected `{} <net> <width>`", kw.text)));
                }
                let w = parse_width(s.toks[2], s.line)?;
                let n = b.add_net(s.toks[1].text, w, s.line, s.toks[1].col)?;
                match kw.text {
                    "input" => {
                        b.ports.push(Port { net: n, dir: Direction::Input });
                        b.drive(n, Driver::Input, s.line, kw.col)?;
                    }
                    "output" => b.ports.push(Port { net: n, dir: Direction::Output }),
                    _ => {}
                }
            }
            "const" => {
                if s.toks.len() != 4 {
                    return Err(diag(DiagCode::Syntax, s.line, kw.col, "expected `const <net> <width> 0x<hex>`"));
                }
                let w = parse_width(s.toks[2], s.line)?;
                let v = parse_hex(s.toks[3].text).ok_or_else(|| {
                    diag(DiagCode::Syntax, s.line, s.toks[3].col, format!("invalid hex literal `{}`", s.toks[3].text))
                })?;
                if v & !width_mask(w) != 0 {
                    return Err(diag(DiagCode::WidthMismatch, s.line, s.toks[3].col, format!("constant {} does not fit in {w} bits", s.toks[3].text)));
                }
                b.add_const(s.toks[1].text, w, v, s.line, s.toks[1].col)?;
            }
            "dff" | "gate" => {}
            "circuit" => return Err(diag(DiagCode::Syntax, s.line, kw.col, "nested `circuit`")),
            other => return Err(diag(DiagCode::Syntax, s.line, kw.col, format!("unknown statement `{other}`"))),
        }
    }

    for s in body {
        let kw = s.toks[0];
        match kw.text {
            "dff" => {
                let mut init = 0u64;
                let mut args = Vec::new();
                for t in &s.toks[1..] {
                    if let Some(v) = t.text.strip_prefix("init=") {
                        init = parse_hex(v)
                            .ok_or_else(|| diag(DiagCode::BadParameter, s.line, t.col, format!("invalid init value `{v}`")))?;
                    } else if t.text.contains('=') {
                        return Err(diag(DiagCode::BadParameter, s.line, t.col, format!("unknown dff parameter `{}`", t.text)));
                    } else {
                        args.push(*t);
                    }
                }
                if args.len() != 3 {
                    return Err(diag(DiagCode::Syntax, s.line, kw.col, "expected `dff <inst> <q> <d> [init=0x<hex>]`"));
                }
                b.claim_inst(args[0].text, s.line, args[0].col)?;
                let q = b.lookup(args[1], s.line)?;
                let d = b.lookup(args[2], s.line)?;
                if b.width(q) != b.width(d) {
                    return Err(diag(
                        DiagCode::WidthMismatch,
                        s.line,
                        args[2].col,
                        format!("dff q is {} bits but d is {} bits", b.width(q), b.width(d)),
                    ));
                }
                if init & !width_mask(b.width(q)) != 0 {
                    return Err(diag(DiagCode::WidthMismatch, s.line, kw.col, "dff init value does not fit"));
                }
                b.drive(q, Driver::Register, s.line, args[1].col)?;
                b.registers.push(Register { inst: args[0].text.to_string(), q, d, init });
            }
            "gate" => parse_gate(&mut b, s)?,
            _ => {}
        }
    }

    for (n, d) in b.drivers.iter().enumerate() {
        if d.is_none() {
            let (line, col) = b.decl_pos[n];
            return Err(diag(DiagCode::UndrivenNet, line, col, format!("net `{}` has no driver", b.nets[n].name)));
        }
    }

    let order = topo_order(&b)?;
    Ok(Circuit {
        name,
        nets: b.nets,
        ports: b.ports,
        consts: b.consts,
        registers: b.registers,
        gates: b.gates,
        order,
    })
}

fn parse_gate(b: &mut Builder, s: &Stmt<'_>) -> Result<(), Diagnostic> {
    let kw = s.toks[0];
    if s.toks.len() < 4 {
        return Err(diag(DiagCode::Syntax, s.line, kw.col, "expected `gate <kind> <inst> <out...> <in...>`"));
    }
    let kind_tok = s.toks[1];
    let inst_tok = s.toks[2];
    let mut params: Vec<(Tok<'_>, &str, &str)> = Vec::new();
    let mut nets = Vec::new();
    for t in &s.toks[3..] {
        if let Some((k, v)) = t.text.split_once('=') {
            params.push((*t, k, v));
        } else {
            nets.push(*t);
        }
    }
    if kind_tok.text == "mul" {
        if nets.len() != 3 || !params.is_empty() {
            return Err(diag(DiagCode::Syntax, s.line, kind_tok.col, "expected `gate mul <inst> <p> <a> <b>`"));
        }
        let p = b.lookup(nets[0], s.line)?;
        let a = b.lookup(nets[1], s.line)?;
        let bb = b.lookup(nets[2], s.line)?;
        return b.expand_mul(inst_tok.text, p, a, bb, s.line, inst_tok.col);
    }
    let Some(mut kind) = kind_from_keyword(kind_tok.text) else {
        return Err(diag(DiagCode::UnknownKind, s.line, kind_tok.col, format!("unknown gate kind `{}`", kind_tok.text)));
    };

    let mut take_param = |key: &str| -> Result<u32, Diagnostic> {
        let found = params.iter().position(|(_, k, _)| *k == key);
        match found {
            Some(i) => {
                let (t, _, v) = params.remove(i);
                v.parse::<u32>()
                    .map_err(|_| diag(DiagCode::BadParameter, s.line, t.col, format!("invalid value for `{key}`: `{v}`")))
            }
            None => Err(diag(DiagCode::BadParameter, s.line, kind_tok.col, format!("{} requires `{key}=<n>`", kind_tok.text))),
        }
    };
    match &mut kind {
        GateKind::Shl(k) | GateKind::Shr(k) => *k = take_param("k")?,
        GateKind::Slice { lo } => *lo = take_param("lo")?,
        _ => {}
    }
    if let Some((t, k, _)) = params.first() {
        return Err(diag(DiagCode::BadParameter, s.line, t.col, format!("unexpected parameter `{k}` for {}", kind_tok.text)));
    }

    let fixed_inputs = match kind {
        GateKind::Not
        | GateKind::RedAnd
        | GateKind::RedOr
        | GateKind::RedXor
        | GateKind::Shl(_)
        | GateKind::Shr(_)
        | GateKind::Assign
        | GateKind::Slice { .. } => Some(1),
        GateKind::Mux2 => Some(3),
        GateKind::Eq | GateKind::Lt | GateKind::Add | GateKind::Sub => Some(2),
        GateKind::And | GateKind::Or | GateKind::Xor | GateKind::Concat => None,
    };
    let n_out = match fixed_inputs {
        Some(k) => nets.len().saturating_sub(k),
        None => 1,
    };
    let max_out = if kind == GateKind::Add { 2 } else { 1 };
    let min_in = match kind {
        GateKind::And | GateKind::Or | GateKind::Xor => 2,
        _ => 1,
    };
    if n_out == 0 || n_out > max_out || nets.len() - n_out < min_in {
        return Err(diag(
            DiagCode::Syntax,
            s.line,
            kind_tok.col,
            format!("wrong number of nets for `{}` ({} given)", kind_tok.text, nets.len()),
        ));
    }
    let mut outs = Vec::new();
    for t in &nets[..n_out] {
        outs.push(b.lookup(*t, s.line)?);
    }
    let mut ins = Vec::new();
    for t in &nets[n_out..] {
        ins.push(b.lookup(*t, s.line)?);
    }
    b.add_gate(kind, inst_tok.text, outs, ins, s.line, inst_tok.col)
}

fn topo_order(b: &Builder) -> Result<Vec<usize>, Diagnostic> {
    let n = b.gates.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for (gi, g) in b.gates.iter().enumerate() {
        for &inp in &g.inputs {
            if let Some(Driver::Gate(src)) = b.drivers[inp] {
                succ[src].push(gi);
                indeg[gi] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&g| indeg[g] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(g)) = ready.pop() {
        order.push(g);
        for &s in &succ[g] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(Reverse(s));
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&g| indeg[g] > 0).unwrap();
        let (line, col) = b.gate_pos[stuck];
        return Err(diag(
            DiagCode::CombinationalCycle,
            line,
            col,
            format!("gate `{}` is part of a combinational cycle", b.gates[stuck].inst),
        ));
    }
    Ok(order)
}

/// Canonical GNL text. Macro-expanded gates are printed in expanded form, so
/// `parse(print(c)) == c` up to source line numbers.
pub fn print_circuit(c: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "circuit {}", c.name);
    let mut special = vec![false; c.nets.len()];
    for p in &c.ports {
        special[p.net] = true;
        let kw = match p.dir {
            Direction::Input => "input",
            Direction::Output => "output",
        };
        let _ = writeln!(out, "{kw} {} {}", c.nets[p.net].name, c.nets[p.net].width);
    }
    for k in &c.consts {
        special[k.net] = true;
    }
    for (i, n) in c.nets.iter().enumerate() {
        if !special[i] {
            let _ = writeln!(out, "wire {} {}", n.name, n.width);
        }
    }
    for k in &c.consts {
        let _ = writeln!(out, "const {} {} 0x{:x}", c.nets[k.net].name, c.nets[k.net].width, k.value);
    }
    for r in &c.registers {
        let _ = write!(out, "dff {} {} {}", r.inst, c.nets[r.q].name, c.nets[r.d].name);
        if r.init != 0 {
            let _ = write!(out, " init=0x{:x}", r.init);
        }
        out.push('\n');
    }
    for g in &c.gates {
        let _ = write!(out, "gate {} {}", g.kind.keyword(), g.inst);
        for &n in g.outputs.iter().chain(&g.inputs) {
            let _ = write!(out, " {}", c.nets[n].name);
        }
        match g.kind {
            GateKind::Shl(k) | GateKind::Shr(k) => {
                let _ = write!(out, " k={k}");
            }
            GateKind::Slice { lo } => {
                let _ = write!(out, " lo={lo}");
            }
            _ => {}
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const C1: &str = "circuit c1\ninput a 1\ninput b 1\ninput c 1\noutput x 1\nwire d 1\ngate and g1 d a b\ngate xor g2 x d c\nend\n";

    #[test]
    fn parses_c1() {
        let c = parse_circuit(C1).unwrap();
        assert_eq!(c.gates.len(), 2);
        assert_eq!(c.inputs().count(), 3);
        assert_eq!(c.outputs().count(), 1);
        assert_eq!(c.nets[c.outputs().next().unwrap().net].name, "x");
    }

    #[test]
    fn identity_circuit() {
        let c = parse_circuit("circuit id\ninput a 1\noutput x 1\ngate assign g1 x a\nend").unwrap();
        assert_eq!(c.gates.len(), 1);
        assert_eq!(c.eval(&[1], &[]).outputs, vec![1]);
    }

    fn code_of(text: &str) -> DiagCode {
        parse_circuit(text).unwrap_err().code
    }

    #[test]
    fn multiple_drivers() {
        let t = "circuit m\ninput a 1\ninput b 1\noutput x 1\ngate not g1 x a\ngate not g2 x b\nend";
        let e = parse_circuit(t).unwrap_err();
        assert_eq!(e.code, DiagCode::MultipleDrivers);
        assert_eq!(e.line, 6);
        assert!(e.message.contains("multiple drivers"));
    }

    #[test]
    fn distinct_diagnostic_codes() {
        assert_eq!(code_of("circuit s\ninput a\nend"), DiagCode::Syntax);
        assert_eq!(code_of("circuit s\ninput a 1\noutput x 1\ngate nand g x a a\nend"), DiagCode::UnknownKind);
        assert_eq!(code_of("circuit s\ninput a 2\noutput x 1\ngate not g x a\nend"), DiagCode::WidthMismatch);
        assert_eq!(
            code_of("circuit s\ninput a 1\noutput x 1\nwire y 1\ngate and g1 y a x\ngate and g2 x a y\nend"),
            DiagCode::CombinationalCycle
        );
        assert_eq!(code_of("circuit s\ninput a 1\noutput x 1\ngate not g x b\nend"), DiagCode::UndeclaredNet);
        assert_eq!(code_of("circuit s\ninput a 1\noutput x 1\nend"), DiagCode::UndrivenNet);
        assert_eq!(code_of("circuit s\ninput a 1\ninput a 1\nend"), DiagCode::DuplicateName);
        assert_eq!(code_of("circuit s\ninput a 2\noutput x 2\ngate shl g x a\nend"), DiagCode::BadParameter);
    }

    #[test]
    fn diagnostic_has_position() {
        let e = parse_circuit("circuit s\ninput a 1\noutput x 1\n  gate foo g x a\nend").unwrap_err();
        assert_eq!((e.line, e.col), (4, 8));
        assert_eq!(e.to_string(), "4:8: error[E002]: unknown gate kind `foo`");
    }

    #[test]
    fn register_breaks_cycles() {
        let t = "circuit cnt\ninput en 1\noutput q 2\nwire n 2\nwire e2 2\nconst one 2 0x1\ngate and ge e2 one one\ngate add g n q e2\ndff r q n\nend";
        let c = parse_circuit(t).unwrap();
        assert_eq!(c.registers.len(), 1);
        let f = c.eval(&[0], &[3]);
        assert_eq!(f.next_state, vec![0]);
    }

    #[test]
    fn print_parse_fixed_point() {
        let c = parse_circuit(C1).unwrap();
        let p1 = print_circuit(&c);
        let p2 = print_circuit(&parse_circuit(&p1).unwrap());
        assert_eq!(p1, p2);
    }

    #[test]
    fn mul_macro_expands() {
        let t = "circuit m\ninput a 3\ninput b 3\noutput p 6\ngate mul m0 p a b\nend";
        let c = parse_circuit(t).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                assert_eq!(c.eval(&[a, b], &[]).outputs[0], a * b);
            }
        }
        let printed = print_circuit(&c);
        assert!(!printed.contains("gate mul"));
        assert_eq!(print_circuit(&parse_circuit(&printed).unwrap()), printed);
    }

    #[test]
    fn add_with_carry_out() {
        let t = "circuit a\ninput a 4\ninput b 4\noutput s 4\noutput co 1\ngate add g s co a b\nend";
        let c = parse_circuit(t).unwrap();
        assert_eq!(c.eval(&[0xF, 0x1], &[]).outputs, vec![0, 1]);
    }
}
