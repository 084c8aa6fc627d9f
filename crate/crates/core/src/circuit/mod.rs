//! Word-level circuits ("complex gates"), the GNL text format and the
//! decomposition into primitive gates.

mod elaborate;
pub(crate) mod gnl;
pub mod library;
mod prim;

pub use elaborate::{
    elaborate, evaluate_frame, ElaboratedCircuit, FrameValues, Interface, Pin, PortBits, PrimGate, RegisterBits,
    SourceGate,
};
pub use gnl::{parse_circuit, print_circuit, DiagCode, Diagnostic};
pub use prim::PrimKind;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetDecl {
    pub name: String,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub net: usize,
    pub dir: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub net: usize,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub inst: String,
    pub q: usize,
    pub d: usize,
    pub init: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    And,
    Or,
    Xor,
    RedAnd,
    RedOr,
    RedXor,
    /// `sel ? b : a`
    Mux2,
    Eq,
    Lt,
    /// Sum output, with an optional 1-bit carry-out as second output.
    Add,
    Sub,
    Shl(u32),
    Shr(u32),
    Assign,
    Slice { lo: u32 },
    /// Inputs listed least significant first.
    Concat,
}

impl GateKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::RedAnd => "rand",
            GateKind::RedOr => "ror",
            GateKind::RedXor => "rxor",
            GateKind::Mux2 => "mux2",
            GateKind::Eq => "eq",
            GateKind::Lt => "lt",
            GateKind::Add => "add",
            GateKind::Sub => "sub",
            GateKind::Shl(_) => "shl",
            GateKind::Shr(_) => "shr",
            GateKind::Assign => "assign",
            GateKind::Slice { .. } => "slice",
            GateKind::Concat => "concat",
        }
    }

    /// Moves bits without computing anything; no primitives are generated.
    pub fn is_wiring(self) -> bool {
        matches!(self, GateKind::Shl(_) | GateKind::Shr(_) | GateKind::Slice { .. } | GateKind::Concat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateInstance {
    pub inst: String,
    pub kind: GateKind,
    pub outputs: Vec<usize>,
    pub inputs: Vec<usize>,
    /// 1-based source line of the statement (0 for generated gates).
    pub line: usize,
}

/// A validated word-level circuit. Immutable once built by [`parse_circuit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub name: String,
    pub nets: Vec<NetDecl>,
    pub ports: Vec<Port>,
    pub consts: Vec<ConstDecl>,
    pub registers: Vec<Register>,
    pub gates: Vec<GateInstance>,
    /// Gate indices in a combinational topological order.
    pub(crate) order: Vec<usize>,
}

/// Word values of one evaluated frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordFrame {
    pub nets: Vec<u64>,
    pub outputs: Vec<u64>,
    pub next_state: Vec<u64>,
}

pub(crate) fn width_mask(w: u32) -> u64 {
    if w >= 64 {
        !0
    } else {
        (1u64 << w) - 1
    }
}

impl Circuit {
    pub fn net_index(&self, name: &str) -> Option<usize> {
        self.nets.iter().position(|n| n.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::Output)
    }

    /// Primary input bits (input ports plus register state).
    pub fn pi_bits(&self) -> u32 {
        self.inputs().map(|p| self.nets[p.net].width).sum::<u32>() + self.state_bits()
    }

    pub fn state_bits(&self) -> u32 {
        self.registers.iter().map(|r| self.nets[r.q].width).sum()
    }

    /// Word-level reference semantics. `inputs` follows input port order,
    /// `state` follows register order.
    pub fn eval(&self, inputs: &[u64], state: &[u64]) -> WordFrame {
        let mut v = vec![0u64; self.nets.len()];
        for (p, &x) in self.inputs().zip(inputs) {
            v[p.net] = x & width_mask(self.nets[p.net].width);
        }
        for c in &self.consts {
            v[c.net] = c.value;
        }
        for (r, &s) in self.registers.iter().zip(state) {
            v[r.q] = s & width_mask(self.nets[r.q].width);
        }
        for &gi in &self.order {
            let g = &self.gates[gi];
            let ow = self.nets[g.outputs[0]].width;
            let m = width_mask(ow);
            let a = |i: usize| v[g.inputs[i]];
            let iw = |i: usize| self.nets[g.inputs[i]].width;
            let out = match g.kind {
                GateKind::Not => !a(0) & m,
                GateKind::And => g.inputs.iter().fold(m, |acc, &n| acc & v[n]),
                GateKind::Or => g.inputs.iter().fold(0, |acc, &n| acc | v[n]),
                GateKind::Xor => g.inputs.iter().fold(0, |acc, &n| acc ^ v[n]),
                GateKind::RedAnd => (a(0) == width_mask(iw(0))) as u64,
                GateKind::RedOr => (a(0) != 0) as u64,
                GateKind::RedXor => (a(0).count_ones() & 1) as u64,
                GateKind::Mux2 => {
                    if a(0) & 1 == 1 {
                        a(2)
                    } else {
                        a(1)
                    }
                }
                GateKind::Eq => (a(0) == a(1)) as u64,
                GateKind::Lt => (a(0) < a(1)) as u64,
                GateKind::Add => {
                    let full = a(0) as u128 + a(1) as u128;
                    if g.outputs.len() == 2 {
                        v[g.outputs[1]] = ((full >> ow) & 1) as u64;
                    }
                    (full as u64) & m
                }
                GateKind::Sub => a(0).wrapping_sub(a(1)) & m,
                GateKind::Shl(k) => {
                    if k >= 64 {
                        0
                    } else {
                        (a(0) << k) & m
                    }
                }
                GateKind::Shr(k) => {
                    if k >= 64 {
                        0
                    } else {
                        a(0) >> k
                    }
                }
                GateKind::Assign => a(0),
                GateKind::Slice { lo } => (a(0) >> lo) & m,
                GateKind::Concat => {
                    let mut acc = 0u64;
                    let mut off = 0;
                    for &n in &g.inputs {
                        if off < 64 {
                            acc |= v[n] << off;
                        }
                        off += self.nets[n].width;
                    }
                    acc & m
                }
            };
            v[g.outputs[0]] = out;
        }
        let outputs = self.outputs().map(|p| v[p.net]).collect();
        let next_state = self.registers.iter().map(|r| v[r.d]).collect();
        WordFrame { nets: v, outputs, next_state }
    }
}
