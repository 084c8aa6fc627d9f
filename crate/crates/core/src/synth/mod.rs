//! Lowering of elaborated circuits to functionally equivalent gate netlists
//! in several structural styles.

mod ao;
mod rewrite;

use std::collections::HashSet;
use std::fmt;

use crate::circuit::{ElaboratedCircuit, Pin, PrimKind};
use crate::stuckat::{exhaustive_compare, tie, GateNetlist, GateOp, Lit, NGate, NetRegister};
use crate::stuckat::netlist::{fold, Folded, Sig};

pub use rewrite::{RewriteRule, RULES};

/// Largest PO cone support accepted by [`SynthStyle::TwoLevel`].
pub const TWO_LEVEL_MAX_SUPPORT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SynthStyle {
    /// One small gate group per primitive, XOR kept as XOR.
    Ripple,
    /// Every PO cone expanded separately into AND-OR form over its inputs.
    TwoLevel,
    /// Every primitive as its own AND-OR tree.
    AoTree,
    /// Random local rewrites applied to the ripple netlist.
    Rewrite { seed: u64, steps: usize },
}

impl SynthStyle {
    pub fn prefix(self) -> &'static str {
        match self {
            SynthStyle::Ripple => "ripple",
            SynthStyle::TwoLevel => "two-level",
            SynthStyle::AoTree => "aotree",
            SynthStyle::Rewrite { .. } => "rewrite",
        }
    }

    /// `ripple`, `two-level`, `aotree`, `rewrite:<seed>:<steps>`.
    pub fn parse(s: &str) -> Option<SynthStyle> {
        Some(match s.to_ascii_lowercase().as_str() {
            "ripple" => SynthStyle::Ripple,
            "two-level" | "twolevel" => SynthStyle::TwoLevel,
            "aotree" => SynthStyle::AoTree,
            other => {
                let rest = other.strip_prefix("rewrite")?;
                let mut it = rest.split(':').skip(1);
                let seed = it.next().map_or(Some(0), |v| v.parse().ok())?;
                let steps = it.next().map_or(Some(16), |v| v.parse().ok())?;
                SynthStyle::Rewrite { seed, steps }
            }
        })
    }
}

impl fmt::Display for SynthStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthStyle::Rewrite { seed, steps } => write!(f, "rewrite:{seed}:{steps}"),
            s => f.write_str(s.prefix()),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("cone of `{po}` depends on {width} inputs, two-level limit is {TWO_LEVEL_MAX_SUPPORT}")]
    ConeTooWide { po: String, width: usize },
    #[error("internal: {0}")]
    Internal(String),
}

/// Netlist under construction. Gates whose inputs are constant fold away.
pub(crate) struct Builder {
    prefix: String,
    nets: Vec<String>,
    used: HashSet<String>,
    gates: Vec<NGate>,
}

impl Builder {
    fn new(prefix: &str) -> Builder {
        Builder { prefix: prefix.to_string(), nets: Vec::new(), used: HashSet::new(), gates: Vec::new() }
    }

    fn net(&mut self, name: &str) -> usize {
        let mut n = name.to_string();
        let mut k = 1;
        while self.used.contains(&n) {
            n = format!("{name}_dup{k}");
            k += 1;
        }
        self.used.insert(n.clone());
        self.nets.push(n);
        self.nets.len() - 1
    }

    /// Internal net name for a source gate.
    fn local(&self, gate: &str, local: &str) -> String {
        format!("{}/{}/{}", self.prefix, gate, local)
    }

    fn gate(&mut self, op: GateOp, ins: Vec<Sig>, out: &str) -> Sig {
        let folded = if ins.iter().any(|s| matches!(s, Sig::Const(_))) { fold(op, &ins) } else { None };
        let (op, lits) = match folded {
            Some(Folded::Sig(s)) => return s,
            Some(Folded::Gate(op, lits)) => (op, lits),
            None => (op, ins.iter().map(|s| lit_of(*s)).collect()),
        };
        let net = self.net(out);
        self.gates.push(NGate { name: self.nets[net].clone(), op, ins: lits, out: net });
        Sig::Lit(Lit::pos(net))
    }

    fn driven(&self) -> Vec<bool> {
        let mut d = vec![false; self.nets.len()];
        for g in &self.gates {
            d[g.out] = true;
        }
        d
    }

    /// Attach the interface of `e` given the signal of every elaborated net.
    fn finish(mut self, e: &ElaboratedCircuit, pis: &[usize], po_sig: &[Sig]) -> GateNetlist {
        let n_out: usize = e.interface.outputs.iter().map(|p| p.bits.len()).sum();
        let n_in = e.num_input_bits();
        let driven = self.driven();
        let mut taken: HashSet<usize> = HashSet::new();
        let mut po_nets = Vec::with_capacity(po_sig.len());
        for (j, &s) in po_sig.iter().enumerate() {
            let name = &e.po_names[j];
            let direct = match s {
                Sig::Lit(l) if !l.inv && (j >= n_out || (driven.get(l.net) == Some(&true) && !taken.contains(&l.net))) => {
                    Some(l.net)
                }
                _ => None,
            };
            let net = match direct {
                Some(n) => n,
                None => {
                    let (op, ins) = match s {
                        Sig::Const(false) => (GateOp::Const0, vec![]),
                        Sig::Const(true) => (GateOp::Const1, vec![]),
                        Sig::Lit(l) => (if l.inv { GateOp::Inv } else { GateOp::Buf }, vec![Lit::pos(l.net)]),
                    };
                    let net = self.net(name);
                    self.gates.push(NGate { name: self.nets[net].clone(), op, ins, out: net });
                    net
                }
            };
            if j < n_out {
                taken.insert(net);
            }
            po_nets.push(net);
        }
        let mut registers = Vec::new();
        let mut k = n_in;
        let mut d = n_out;
        for r in &e.interface.registers {
            for i in 0..r.q.len() {
                let inst = if r.q.len() == 1 { r.inst.clone() } else { format!("{}[{i}]", r.inst) };
                registers.push(NetRegister { inst, q: pis[k], d: po_nets[d], init: (r.init >> i) & 1 == 1 });
                k += 1;
                d += 1;
            }
        }
        let n = GateNetlist {
            name: e.name.clone(),
            nets: self.nets,
            gates: self.gates,
            inputs: pis[..n_in].to_vec(),
            outputs: po_nets[..n_out].to_vec(),
            registers,
        };
        tie(&n, &[])
    }
}

fn lit_of(s: Sig) -> Lit {
    match s {
        Sig::Lit(l) => l,
        Sig::Const(_) => unreachable!("constants are folded before use"),
    }
}

fn pin_sig(map: &[Option<Sig>], p: &Pin) -> Sig {
    match *p {
        Pin::Net(n) => map[n].expect("elaborated gates are topologically ordered"),
        Pin::Const(b) => Sig::Const(b),
    }
}

fn not(s: Sig) -> Sig {
    match s {
        Sig::Const(b) => Sig::Const(!b),
        Sig::Lit(l) => Sig::Lit(l.not()),
    }
}

/// PI nets of the builder, one per elaborated PI, plus the signal map.
fn start(b: &mut Builder, e: &ElaboratedCircuit) -> (Vec<usize>, Vec<Option<Sig>>) {
    let mut map = vec![None; e.nets.len()];
    let pis: Vec<usize> = e
        .pis
        .iter()
        .map(|&p| {
            let n = b.net(&e.nets[p]);
            map[p] = Some(Sig::Lit(Lit::pos(n)));
            n
        })
        .collect();
    (pis, map)
}

fn ripple(e: &ElaboratedCircuit) -> GateNetlist {
    let mut b = Builder::new("ripple");
    let (pis, mut map) = start(&mut b, e);
    for g in &e.gates {
        let ins: Vec<Sig> = g.inputs.iter().map(|p| pin_sig(&map, p)).collect();
        let out = |o: usize| e.nets[g.outputs[o]].clone();
        let outs: Vec<Sig> = match g.kind {
            PrimKind::Inv => vec![b.gate(GateOp::Inv, ins, &out(0))],
            PrimKind::Buf => vec![b.gate(GateOp::Buf, ins, &out(0))],
            PrimKind::And2 => vec![b.gate(GateOp::And, ins, &out(0))],
            PrimKind::Or2 => vec![b.gate(GateOp::Or, ins, &out(0))],
            PrimKind::Xor2 => vec![b.gate(GateOp::Xor, ins, &out(0))],
            PrimKind::Const0 => vec![Sig::Const(false)],
            PrimKind::Const1 => vec![Sig::Const(true)],
            PrimKind::Mux2 => {
                let (s, a, bb) = (ins[0], ins[1], ins[2]);
                let t0 = b.gate(GateOp::And, vec![not(s), a], &b.local(&g.name, "sa"));
                let t1 = b.gate(GateOp::And, vec![s, bb], &b.local(&g.name, "sb"));
                vec![b.gate(GateOp::Or, vec![t0, t1], &out(0))]
            }
            PrimKind::Ha => vec![
                b.gate(GateOp::Xor, ins.clone(), &out(0)),
                b.gate(GateOp::And, ins, &out(1)),
            ],
            PrimKind::Fa => {
                let (ci, a, bb) = (ins[0], ins[1], ins[2]);
                let t = b.gate(GateOp::Xor, vec![a, bb], &b.local(&g.name, "p"));
                let s = b.gate(GateOp::Xor, vec![t, ci], &out(0));
                let gg = b.gate(GateOp::And, vec![a, bb], &b.local(&g.name, "g"));
                let pc = b.gate(GateOp::And, vec![t, ci], &b.local(&g.name, "pc"));
                vec![s, b.gate(GateOp::Or, vec![gg, pc], &out(1))]
            }
        };
        for (o, s) in outs.into_iter().enumerate() {
            map[g.outputs[o]] = Some(s);
        }
    }
    let po: Vec<Sig> = e.pos.iter().map(|&p| map[p].expect("PO driven")).collect();
    b.finish(e, &pis, &po)
}

/// Lower `e` in the given style. Logic that reaches no PO is dropped.
pub fn lower(e: &ElaboratedCircuit, style: SynthStyle) -> Result<GateNetlist, SynthError> {
    match style {
        SynthStyle::Ripple => Ok(ripple(e)),
        SynthStyle::TwoLevel => ao::two_level(e),
        SynthStyle::AoTree => Ok(ao::aotree(e)),
        SynthStyle::Rewrite { seed, steps } => Ok(rewrite::rewrite(&ripple(e), seed, steps)?.0),
    }
}

/// The rewrite rules applied, in order, when lowering with
/// [`SynthStyle::Rewrite`].
pub fn rewrite_trace(e: &ElaboratedCircuit, seed: u64, steps: usize) -> Result<Vec<RewriteRule>, SynthError> {
    Ok(rewrite::rewrite(&ripple(e), seed, steps)?.1)
}

/// Source gate of a lowered net, recovered from its name.
pub fn origin<'a>(e: &'a ElaboratedCircuit, n: &GateNetlist, net: usize) -> Option<&'a str> {
    let name = &n.nets[net];
    if let Some(i) = e.net_index(name) {
        let drivers = e.drivers();
        return drivers[i].map(|(g, _)| e.gates[g].name.as_str());
    }
    let (_, rest) = name.split_once('/')?;
    let (gate, _) = rest.rsplit_once('/')?;
    e.gate_index(gate).map(|g| e.gates[g].name.as_str())
}

/// Rewrite steps used by [`variant_suite`]: enough to touch most gates.
fn suite_steps(e: &ElaboratedCircuit) -> usize {
    (e.gates.len() / 2).clamp(8, 64)
}

/// `k` distinct netlists equivalent to `e`, in the order ripple, two-level,
/// rewrite, aotree, then further rewrite seeds. Two-level is skipped when a
/// cone is too wide. Equivalence is checked exhaustively when the PI count
/// allows it.
pub fn variant_suite(e: &ElaboratedCircuit, k: usize, seed: u64) -> Result<Vec<(SynthStyle, GateNetlist)>, SynthError> {
    let steps = suite_steps(e);
    let mut order = vec![
        SynthStyle::Ripple,
        SynthStyle::TwoLevel,
        SynthStyle::Rewrite { seed, steps },
        SynthStyle::AoTree,
    ];
    order.extend((1..64).map(|i| SynthStyle::Rewrite { seed: seed.wrapping_add(i), steps }));
    let reference = e.to_cells();
    let mut out: Vec<(SynthStyle, GateNetlist)> = Vec::new();
    for style in order {
        if out.len() == k {
            break;
        }
        let n = match lower(e, style) {
            Ok(n) => n,
            Err(SynthError::ConeTooWide { .. }) => continue,
            Err(err) => return Err(err),
        };
        if out.iter().any(|(_, m)| *m == n) {
            continue;
        }
        if e.pis.len() <= crate::stuckat::MAX_EQUIV_INPUTS {
            match exhaustive_compare(&reference, &n.to_cells()) {
                Ok(None) => {}
                Ok(Some(cex)) => {
                    return Err(SynthError::Internal(format!("{style} differs from source at {cex:?}")))
                }
                Err(err) => return Err(SynthError::Internal(err.to_string())),
            }
        }
        out.push((style, n));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, library};
    use crate::stuckat::{exhaustive_equivalence, parse_netlist, C2_NETLIST};

    fn shape(n: &GateNetlist) -> Vec<(GateOp, Vec<(String, bool)>, String)> {
        n.gates
            .iter()
            .map(|g| (g.op, g.ins.iter().map(|l| (n.nets[l.net].clone(), l.inv)).collect(), n.nets[g.out].clone()))
            .collect()
    }

    #[test]
    fn two_level_c1_is_c2() {
        let e = elaborate(&library::c1());
        let n = lower(&e, SynthStyle::TwoLevel).unwrap();
        let c2 = parse_netlist(C2_NETLIST).unwrap();
        assert_eq!(n.gates.len(), 4);
        assert_eq!(exhaustive_equivalence(&n, &c2).unwrap(), None);
        let ops: Vec<(GateOp, Vec<bool>)> = n.gates.iter().map(|g| (g.op, g.ins.iter().map(|l| l.inv).collect())).collect();
        let want: Vec<(GateOp, Vec<bool>)> = c2.gates.iter().map(|g| (g.op, g.ins.iter().map(|l| l.inv).collect())).collect();
        assert_eq!(ops, want, "{:?}", shape(&n));
    }

    #[test]
    fn rewrite_zero_is_ripple() {
        for name in ["c1", "add4", "mux4", "b06"] {
            let e = elaborate(&library::by_name(name).unwrap());
            assert_eq!(lower(&e, SynthStyle::Rewrite { seed: 9, steps: 0 }).unwrap(), lower(&e, SynthStyle::Ripple).unwrap());
        }
    }

    #[test]
    fn every_style_is_equivalent() {
        for name in ["c1", "c2", "add2", "add4", "mux4", "mux8", "mul3", "b01", "b02", "b06"] {
            let e = elaborate(&library::by_name(name).unwrap());
            let cells = e.to_cells();
            for style in [
                SynthStyle::Ripple,
                SynthStyle::TwoLevel,
                SynthStyle::AoTree,
                SynthStyle::Rewrite { seed: 1, steps: 40 },
                SynthStyle::Rewrite { seed: 2, steps: 40 },
            ] {
                let n = lower(&e, style).unwrap();
                let text = crate::stuckat::print_netlist(&n);
                let back = parse_netlist(&text).unwrap();
                assert_eq!(crate::stuckat::print_netlist(&back), text, "{name} {style} print round trip");
                assert_eq!(exhaustive_compare(&cells, &n.to_cells()).unwrap(), None, "{name} {style}");
            }
        }
    }

    #[test]
    fn two_level_rejects_wide_cones() {
        let e = elaborate(&library::by_name("add64").unwrap());
        assert!(matches!(lower(&e, SynthStyle::TwoLevel), Err(SynthError::ConeTooWide { .. })));
    }

    #[test]
    fn suite_has_distinct_variants_and_duplication() {
        let e = elaborate(&library::c1());
        let s = variant_suite(&e, 3, 1).unwrap();
        let styles: Vec<&str> = s.iter().map(|(st, _)| st.prefix()).collect();
        assert_eq!(styles, ["ripple", "two-level", "rewrite"]);
        let e = elaborate(&library::by_name("add4").unwrap());
        let s = variant_suite(&e, 5, 1).unwrap();
        assert_eq!(s.len(), 5);
        let trace = rewrite_trace(&e, 1, suite_steps(&e)).unwrap();
        assert!(trace.contains(&RewriteRule::Duplicate));
    }

    #[test]
    fn style_names_parse() {
        for s in [SynthStyle::Ripple, SynthStyle::TwoLevel, SynthStyle::AoTree, SynthStyle::Rewrite { seed: 3, steps: 7 }] {
            assert_eq!(SynthStyle::parse(&s.to_string()), Some(s));
        }
    }
}
