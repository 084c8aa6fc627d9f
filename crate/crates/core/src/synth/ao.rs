//! AND-OR expansions: per primitive (AOTREE) and per PO cone (TWO-LEVEL).

use std::collections::{BTreeSet, HashMap};

use super::{pin_sig, start, Builder, SynthError, TWO_LEVEL_MAX_SUPPORT};
use crate::circuit::{ElaboratedCircuit, PrimKind};
use crate::stuckat::netlist::Sig;
use crate::stuckat::{GateNetlist, GateOp};

type Ref = (usize, bool);

enum Node {
    Leaf(Sig),
    Op { op: GateOp, kids: Vec<Ref>, owner: usize },
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
}

impl Arena {
    fn leaf(&mut self, s: Sig) -> Ref {
        self.nodes.push(Node::Leaf(s));
        (self.nodes.len() - 1, false)
    }

    fn op(&mut self, op: GateOp, kids: Vec<Ref>, owner: usize) -> Ref {
        self.nodes.push(Node::Op { op, kids, owner });
        (self.nodes.len() - 1, false)
    }

    /// AND-OR form of one primitive output.
    fn prim(&mut self, kind: PrimKind, out: usize, ins: &[Ref], owner: usize) -> Ref {
        let n = |r: Ref| (r.0, !r.1);
        let and = |a: &mut Arena, k: Vec<Ref>| a.op(GateOp::And, k, owner);
        let or = |a: &mut Arena, k: Vec<Ref>| a.op(GateOp::Or, k, owner);
        match (kind, out) {
            (PrimKind::Inv, _) => n(ins[0]),
            (PrimKind::Buf, _) => ins[0],
            (PrimKind::And2, _) | (PrimKind::Ha, 1) => and(self, ins.to_vec()),
            (PrimKind::Or2, _) => or(self, ins.to_vec()),
            (PrimKind::Xor2, _) | (PrimKind::Ha, _) => {
                let (x, y) = (ins[0], ins[1]);
                let t0 = and(self, vec![x, n(y)]);
                let t1 = and(self, vec![n(x), y]);
                or(self, vec![t0, t1])
            }
            (PrimKind::Mux2, _) => {
                let (s, a, b) = (ins[0], ins[1], ins[2]);
                let t0 = and(self, vec![n(s), a]);
                let t1 = and(self, vec![s, b]);
                or(self, vec![t0, t1])
            }
            (PrimKind::Fa, 0) => {
                let terms = (0..8u32)
                    .filter(|m| m.count_ones() % 2 == 1)
                    .map(|m| {
                        let lits = (0..3).map(|p| if (m >> (2 - p)) & 1 == 1 { ins[p] } else { n(ins[p]) }).collect();
                        and(self, lits)
                    })
                    .collect();
                or(self, terms)
            }
            (PrimKind::Fa, _) => {
                let (ci, a, b) = (ins[0], ins[1], ins[2]);
                let t0 = and(self, vec![a, b]);
                let t1 = and(self, vec![a, ci]);
                let t2 = and(self, vec![b, ci]);
                or(self, vec![t0, t1, t2])
            }
            (PrimKind::Const0, _) => self.leaf(Sig::Const(false)),
            (PrimKind::Const1, _) => self.leaf(Sig::Const(true)),
        }
    }

    /// Builder PI nets the node depends on.
    fn support(&self, r: Ref, out: &mut BTreeSet<usize>, seen: &mut Vec<bool>) {
        if seen[r.0] {
            return;
        }
        seen[r.0] = true;
        match &self.nodes[r.0] {
            Node::Leaf(Sig::Lit(l)) => {
                out.insert(l.net);
            }
            Node::Leaf(Sig::Const(_)) => {}
            Node::Op { kids, .. } => {
                for &k in kids {
                    self.support(k, out, seen);
                }
            }
        }
    }
}

struct Emitter<'a> {
    arena: &'a Arena,
    b: &'a mut Builder,
    memo: HashMap<usize, Sig>,
    /// Flatten same-operator children owned by other source gates too.
    cross: bool,
    names: &'a dyn Fn(usize) -> String,
}

impl Emitter<'_> {
    fn emit(&mut self, r: Ref) -> Sig {
        let s = match &self.arena.nodes[r.0] {
            Node::Leaf(s) => *s,
            Node::Op { .. } => self.build(r.0, None),
        };
        if r.1 {
            super::not(s)
        } else {
            s
        }
    }

    fn build(&mut self, node: usize, name: Option<String>) -> Sig {
        if let Some(s) = self.memo.get(&node) {
            return *s;
        }
        let Node::Op { op, .. } = &self.arena.nodes[node] else { unreachable!() };
        let mut ins = Vec::new();
        self.collect(node, *op, &mut ins);
        let name = name.unwrap_or_else(|| (self.names)(node));
        let s = self.b.gate(*op, ins, &name);
        self.memo.insert(node, s);
        s
    }

    fn collect(&mut self, node: usize, op: GateOp, out: &mut Vec<Sig>) {
        let Node::Op { kids, owner, .. } = &self.arena.nodes[node] else { unreachable!() };
        for &(k, inv) in kids {
            let splice = !inv
                && matches!(&self.arena.nodes[k], Node::Op { op: kop, owner: ko, .. } if *kop == op && (self.cross || ko == owner));
            if splice && !self.memo.contains_key(&k) {
                self.collect(k, op, out);
            } else {
                let s = self.emit((k, inv));
                out.push(s);
            }
        }
    }
}

/// Arena of every elaborated net plus the builder with its PIs.
fn expand(e: &ElaboratedCircuit, prefix: &str) -> (Builder, Vec<usize>, Arena, Vec<Ref>, Vec<usize>) {
    let mut b = Builder::new(prefix);
    let (pis, sigs) = start(&mut b, e);
    let mut arena = Arena::default();
    let mut refs: Vec<Option<Ref>> = vec![None; e.nets.len()];
    for &p in &e.pis {
        refs[p] = Some(arena.leaf(sigs[p].unwrap()));
    }
    let mut owner_of = Vec::new();
    for (gi, g) in e.gates.iter().enumerate() {
        let ins: Vec<Ref> = g
            .inputs
            .iter()
            .map(|p| match p {
                crate::circuit::Pin::Net(n) => refs[*n].expect("topological order"),
                c => arena.leaf(pin_sig(&[], c)),
            })
            .collect();
        for (o, &net) in g.outputs.iter().enumerate() {
            refs[net] = Some(arena.prim(g.kind, o, &ins, gi));
        }
    }
    for n in &arena.nodes {
        owner_of.push(match n {
            Node::Op { owner, .. } => *owner,
            Node::Leaf(_) => usize::MAX,
        });
    }
    let refs = refs.into_iter().map(|r| r.unwrap_or((usize::MAX, false))).collect();
    (b, pis, arena, refs, owner_of)
}

pub(super) fn aotree(e: &ElaboratedCircuit) -> GateNetlist {
    let (mut b, pis, arena, refs, owner) = expand(e, "aotree");
    let prefix = "aotree";
    let names = |node: usize| format!("{prefix}/{}/n{node}", e.gates[owner[node]].name);
    let mut em = Emitter { arena: &arena, b: &mut b, memo: HashMap::new(), cross: false, names: &names };
    for g in &e.gates {
        for &net in &g.outputs {
            let (node, _) = refs[net];
            if matches!(arena.nodes[node], Node::Op { .. }) && !em.memo.contains_key(&node) {
                em.build(node, Some(e.nets[net].clone()));
            }
        }
    }
    let po: Vec<Sig> = e.pos.iter().map(|&p| em.emit(refs[p])).collect();
    b.finish(e, &pis, &po)
}

pub(super) fn two_level(e: &ElaboratedCircuit) -> Result<GateNetlist, SynthError> {
    let (mut b, pis, arena, refs, owner) = expand(e, "two-level");
    for (j, &p) in e.pos.iter().enumerate() {
        let mut sup = BTreeSet::new();
        arena.support(refs[p], &mut sup, &mut vec![false; arena.nodes.len()]);
        if sup.len() > TWO_LEVEL_MAX_SUPPORT {
            return Err(SynthError::ConeTooWide { po: e.po_names[j].clone(), width: sup.len() });
        }
    }
    let mut po = Vec::with_capacity(e.pos.len());
    for (j, &p) in e.pos.iter().enumerate() {
        let names = |node: usize| format!("two-level/{}/n{node}_po{j}", e.gates[owner[node]].name);
        let mut em = Emitter { arena: &arena, b: &mut b, memo: HashMap::new(), cross: true, names: &names };
        let (node, inv) = refs[p];
        let s = match arena.nodes[node] {
            Node::Op { .. } if !inv => em.build(node, Some(e.po_names[j].clone())),
            _ => em.emit((node, inv)),
        };
        po.push(s);
    }
    Ok(b.finish(e, &pis, &po))
}
