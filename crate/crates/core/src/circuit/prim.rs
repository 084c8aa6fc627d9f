use serde::Serialize;

use crate::logic::{CellOp, Operand};

/// Primitive gates of the elaborated view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimKind {
    Inv,
    Buf,
    And2,
    Or2,
    Xor2,
    /// Pins `(S, A, B)`, output `S ? B : A`.
    Mux2,
    /// Pins `(A, B)`, outputs `(S, CO)`.
    Ha,
    /// Pins `(CI, A, B)`, outputs `(S, CO)`.
    Fa,
    Const0,
    Const1,
}

impl PrimKind {
    pub const ALL: [PrimKind; 10] = [
        PrimKind::Inv,
        PrimKind::Buf,
        PrimKind::And2,
        PrimKind::Or2,
        PrimKind::Xor2,
        PrimKind::Mux2,
        PrimKind::Ha,
        PrimKind::Fa,
        PrimKind::Const0,
        PrimKind::Const1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimKind::Inv => "inv",
            PrimKind::Buf => "buf",
            PrimKind::And2 => "and2",
            PrimKind::Or2 => "or2",
            PrimKind::Xor2 => "xor2",
            PrimKind::Mux2 => "mux2",
            PrimKind::Ha => "ha",
            PrimKind::Fa => "fa",
            PrimKind::Const0 => "const0",
            PrimKind::Const1 => "const1",
        }
    }

    pub fn from_name(s: &str) -> Option<PrimKind> {
        PrimKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Input pin names, most significant minterm bit first.
    pub fn pins(self) -> &'static [&'static str] {
        match self {
            PrimKind::Inv | PrimKind::Buf => &["A"],
            PrimKind::And2 | PrimKind::Or2 | PrimKind::Xor2 | PrimKind::Ha => &["A", "B"],
            PrimKind::Mux2 => &["S", "A", "B"],
            PrimKind::Fa => &["CI", "A", "B"],
            PrimKind::Const0 | PrimKind::Const1 => &[],
        }
    }

    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            PrimKind::Ha | PrimKind::Fa => &["S", "CO"],
            _ => &["Y"],
        }
    }

    pub fn arity(self) -> usize {
        self.pins().len()
    }

    /// Output `out` at local minterm `m` (pin 0 is the MSB of `m`).
    pub fn eval(self, m: u32, out: usize) -> bool {
        let n = self.arity();
        let pin = |p: usize| (m >> (n - 1 - p)) & 1 == 1;
        match (self, out) {
            (PrimKind::Inv, 0) => !pin(0),
            (PrimKind::Buf, 0) => pin(0),
            (PrimKind::And2, 0) => pin(0) & pin(1),
            (PrimKind::Or2, 0) => pin(0) | pin(1),
            (PrimKind::Xor2, 0) => pin(0) ^ pin(1),
            (PrimKind::Mux2, 0) => {
                if pin(0) {
                    pin(2)
                } else {
                    pin(1)
                }
            }
            (PrimKind::Ha, 0) => pin(0) ^ pin(1),
            (PrimKind::Ha, 1) => pin(0) & pin(1),
            (PrimKind::Fa, 0) => pin(0) ^ pin(1) ^ pin(2),
            (PrimKind::Fa, 1) => (pin(0) as u8 + pin(1) as u8 + pin(2) as u8) >= 2,
            (PrimKind::Const0, 0) => false,
            (PrimKind::Const1, 0) => true,
            _ => panic!("{} has no output {out}", self.name()),
        }
    }

    /// Single-output cell implementing output `out` over the given operands.
    pub(crate) fn cell(self, out: usize, ins: &[Operand]) -> (CellOp, Vec<Operand>) {
        let flip = |o: Operand| match o {
            Operand::Net { net, inv } => Operand::Net { net, inv: !inv },
            Operand::Const(b) => Operand::Const(!b),
        };
        match (self, out) {
            (PrimKind::Inv, _) => (CellOp::Buf, vec![flip(ins[0])]),
            (PrimKind::Buf, _) => (CellOp::Buf, vec![ins[0]]),
            (PrimKind::And2, _) | (PrimKind::Ha, 1..) => (CellOp::And, ins.to_vec()),
            (PrimKind::Or2, _) => (CellOp::Or, ins.to_vec()),
            (PrimKind::Xor2, _) | (PrimKind::Ha, 0) | (PrimKind::Fa, 0) => (CellOp::Xor, ins.to_vec()),
            (PrimKind::Fa, _) => (CellOp::Maj, ins.to_vec()),
            (PrimKind::Mux2, _) => (CellOp::Mux, ins.to_vec()),
            (PrimKind::Const0, _) => (CellOp::Buf, vec![Operand::Const(false)]),
            (PrimKind::Const1, _) => (CellOp::Buf, vec![Operand::Const(true)]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Cell, CellNetlist};

    #[test]
    fn cells_match_truth_tables() {
        for kind in PrimKind::ALL {
            let n = kind.arity();
            let ins: Vec<Operand> = (0..n).map(Operand::net).collect();
            let cells: Vec<Cell> = (0..kind.outputs().len())
                .map(|o| {
                    let (op, ops) = kind.cell(o, &ins);
                    Cell { op, ins: ops, out: n + o }
                })
                .collect();
            let no = cells.len();
            let net = CellNetlist::new(n + no, cells, (0..n).collect(), (n..n + no).collect());
            for m in 0..(1u32 << n) {
                let pi: Vec<u64> = (0..n).map(|p| if (m >> (n - 1 - p)) & 1 == 1 { 1 } else { 0 }).collect();
                let mut v = Vec::new();
                net.eval_block(&pi, &mut v);
                for o in 0..no {
                    assert_eq!(v[n + o] & 1 == 1, kind.eval(m, o), "{} m={m} out={o}", kind.name());
                }
            }
        }
    }

    #[test]
    fn fa_pin_order() {
        // CI=0, A=1, B=1 -> S=0, CO=1
        assert!(!PrimKind::Fa.eval(0b011, 0));
        assert!(PrimKind::Fa.eval(0b011, 1));
        assert!(PrimKind::Mux2.eval(0b101, 0));
        assert!(!PrimKind::Mux2.eval(0b110, 0));
    }
}
