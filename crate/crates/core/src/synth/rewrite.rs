//! Function-preserving local rewrites.
//!
//! | rule        | before                  | after                                  |
//! |-------------|-------------------------|----------------------------------------|
//! | `demorgan`  | `o = and(l..)`          | `t = or(!l..)`, `o = inv(t)` (dually)  |
//! | `split`     | `o = op(a, b, c..)`     | `t = op(a, b)`, `o = op(t, c..)`       |
//! | `merge`     | `t = op(a..)`, `o = op(t, c..)`, `t` read once | `o = op(a.., c..)` |
//! | `buffer`    | reader of `n`           | reader of `t = buf(n)`                 |
//! | `duplicate` | `o = f(..)` read by k ≥ 2 gates | some readers move to a copy `t = f(..)` |
//! | `xor`       | `o = xor(a, b)`         | `o = or(and(a, !b), and(!a, b))`       |
//!
//! Every application is checked against the replaced logic by a truth table
//! over its local support.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SynthError;
use crate::stuckat::netlist::{eval_gate, topo_order};
use crate::stuckat::{tie, GateNetlist, GateOp, Lit, NGate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RewriteRule {
    DeMorgan,
    Split,
    Merge,
    Buffer,
    Duplicate,
    XorExpand,
}

pub const RULES: [RewriteRule; 6] = [
    RewriteRule::DeMorgan,
    RewriteRule::Split,
    RewriteRule::Merge,
    RewriteRule::Buffer,
    RewriteRule::Duplicate,
    RewriteRule::XorExpand,
];

impl RewriteRule {
    pub fn name(self) -> &'static str {
        match self {
            RewriteRule::DeMorgan => "demorgan",
            RewriteRule::Split => "split",
            RewriteRule::Merge => "merge",
            RewriteRule::Buffer => "buffer",
            RewriteRule::Duplicate => "duplicate",
            RewriteRule::XorExpand => "xor",
        }
    }
}

struct Work {
    n: GateNetlist,
    po: Vec<bool>,
    step: usize,
}

impl Work {
    fn new_net(&mut self, gate: &str, tag: &str) -> usize {
        let base = format!("rewrite/{}/{tag}{}", gate.trim_start_matches("ripple/"), self.step);
        let mut name = base.clone();
        let mut k = 1;
        while self.n.nets.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.n.nets.push(name);
        self.po.push(false);
        self.n.nets.len() - 1
    }

    fn driver(&self) -> Vec<Option<usize>> {
        let mut d = vec![None; self.n.nets.len()];
        for (i, g) in self.n.gates.iter().enumerate() {
            d[g.out] = Some(i);
        }
        d
    }

    /// Gates reading each net (once per gate).
    fn readers(&self) -> Vec<Vec<usize>> {
        let mut r = vec![Vec::new(); self.n.nets.len()];
        for (i, g) in self.n.gates.iter().enumerate() {
            for l in &g.ins {
                if r[l.net].last() != Some(&i) {
                    r[l.net].push(i);
                }
            }
        }
        r
    }

    fn candidates(&self, rule: RewriteRule) -> Vec<usize> {
        let gates = &self.n.gates;
        match rule {
            RewriteRule::DeMorgan => (0..gates.len()).filter(|&i| matches!(gates[i].op, GateOp::And | GateOp::Or)).collect(),
            RewriteRule::Split => (0..gates.len())
                .filter(|&i| matches!(gates[i].op, GateOp::And | GateOp::Or | GateOp::Xor) && gates[i].ins.len() >= 3)
                .collect(),
            RewriteRule::Merge => {
                let driver = self.driver();
                let readers = self.readers();
                (0..gates.len())
                    .filter(|&i| {
                        let g = &gates[i];
                        matches!(g.op, GateOp::And | GateOp::Or | GateOp::Xor)
                            && g.ins.iter().any(|l| self.mergeable(g, *l, &driver, &readers))
                    })
                    .collect()
            }
            RewriteRule::Buffer => (0..gates.len()).filter(|&i| !gates[i].ins.is_empty()).collect(),
            RewriteRule::Duplicate => {
                let readers = self.readers();
                (0..gates.len()).filter(|&i| !gates[i].ins.is_empty() && readers[gates[i].out].len() >= 2).collect()
            }
            RewriteRule::XorExpand => (0..gates.len()).filter(|&i| gates[i].op == GateOp::Xor && gates[i].ins.len() == 2).collect(),
        }
    }

    fn mergeable(&self, g: &NGate, l: Lit, driver: &[Option<usize>], readers: &[Vec<usize>]) -> bool {
        let Some(d) = driver[l.net] else { return false };
        !l.inv
            && self.n.gates[d].op == g.op
            && !self.po[l.net]
            && readers[l.net].len() == 1
            && g.ins.iter().filter(|m| m.net == l.net).count() == 1
    }

    fn apply(&mut self, rule: RewriteRule, gi: usize, rng: &mut ChaCha8Rng) -> Result<(), SynthError> {
        let old = self.n.gates[gi].clone();
        let name = old.name.clone();
        let o = old.out;
        match rule {
            RewriteRule::DeMorgan => {
                let t = self.new_net(&name, "dm");
                let dual = if old.op == GateOp::And { GateOp::Or } else { GateOp::And };
                let inner = NGate { name: self.n.nets[t].clone(), op: dual, ins: old.ins.iter().map(|l| l.not()).collect(), out: t };
                let outer = NGate { name: name.clone(), op: GateOp::Inv, ins: vec![Lit::pos(t)], out: o };
                check(&[old], &[inner.clone(), outer.clone()], o, o)?;
                self.n.gates[gi] = outer;
                self.n.gates.push(inner);
            }
            RewriteRule::Split => {
                let t = self.new_net(&name, "sp");
                let k = rng.random_range(0..old.ins.len() - 1);
                let inner = NGate { name: self.n.nets[t].clone(), op: old.op, ins: old.ins[k..k + 2].to_vec(), out: t };
                let mut ins = old.ins.clone();
                ins.splice(k..k + 2, [Lit::pos(t)]);
                let outer = NGate { name: name.clone(), op: old.op, ins, out: o };
                check(&[old], &[inner.clone(), outer.clone()], o, o)?;
                self.n.gates[gi] = outer;
                self.n.gates.push(inner);
            }
            RewriteRule::Merge => {
                let driver = self.driver();
                let readers = self.readers();
                let opts: Vec<Lit> = old.ins.iter().copied().filter(|l| self.mergeable(&old, *l, &driver, &readers)).collect();
                let l = opts[rng.random_range(0..opts.len())];
                let di = driver[l.net].unwrap();
                let inner = self.n.gates[di].clone();
                let mut ins = Vec::new();
                for m in &old.ins {
                    if m.net == l.net {
                        ins.extend_from_slice(&inner.ins);
                    } else {
                        ins.push(*m);
                    }
                }
                let merged = NGate { name: name.clone(), op: old.op, ins, out: o };
                check(&[inner, old], &[merged.clone()], o, o)?;
                self.n.gates[gi] = merged;
                self.n.gates.remove(di);
            }
            RewriteRule::Buffer => {
                let src = old.ins[rng.random_range(0..old.ins.len())].net;
                let t = self.new_net(&name, "buf");
                let buf = NGate { name: self.n.nets[t].clone(), op: GateOp::Buf, ins: vec![Lit::pos(src)], out: t };
                check(&[], &[buf.clone()], src, t)?;
                for l in &mut self.n.gates[gi].ins {
                    if l.net == src {
                        l.net = t;
                    }
                }
                self.n.gates.push(buf);
            }
            RewriteRule::Duplicate => {
                let readers = self.readers()[o].clone();
                let t = self.new_net(&name, "dup");
                let copy = NGate { name: self.n.nets[t].clone(), op: old.op, ins: old.ins.clone(), out: t };
                check(&[old.clone()], &[copy.clone()], o, t)?;
                let max = if self.po[o] { readers.len() } else { readers.len() - 1 };
                let k = rng.random_range(1..=max);
                for &r in &readers[..k] {
                    for l in &mut self.n.gates[r].ins {
                        if l.net == o {
                            l.net = t;
                        }
                    }
                }
                self.n.gates.push(copy);
            }
            RewriteRule::XorExpand => {
                let (x, y) = (old.ins[0], old.ins[1]);
                let t0 = self.new_net(&name, "xa");
                let t1 = self.new_net(&name, "xb");
                let a0 = NGate { name: self.n.nets[t0].clone(), op: GateOp::And, ins: vec![x, y.not()], out: t0 };
                let a1 = NGate { name: self.n.nets[t1].clone(), op: GateOp::And, ins: vec![x.not(), y], out: t1 };
                let or = NGate { name: name.clone(), op: GateOp::Or, ins: vec![Lit::pos(t0), Lit::pos(t1)], out: o };
                check(&[old], &[a0.clone(), a1.clone(), or.clone()], o, o)?;
                self.n.gates[gi] = or;
                self.n.gates.push(a0);
                self.n.gates.push(a1);
            }
        }
        Ok(())
    }
}

/// Truth-table check that `new` computes at `new_out` what `old` computes
/// at `old_out` (an empty `old` means the net itself).
fn check(old: &[NGate], new: &[NGate], old_out: usize, new_out: usize) -> Result<(), SynthError> {
    let mut support: Vec<usize> = Vec::new();
    let driven: Vec<usize> = old.iter().chain(new).map(|g| g.out).collect();
    for g in old.iter().chain(new) {
        for l in &g.ins {
            if !driven.contains(&l.net) && !support.contains(&l.net) {
                support.push(l.net);
            }
        }
    }
    if old.is_empty() && !support.contains(&old_out) {
        support.push(old_out);
    }
    let eval = |gates: &[NGate], out: usize, m: u32| -> bool {
        let mut v: HashMap<usize, bool> = support.iter().enumerate().map(|(i, &n)| (n, (m >> i) & 1 == 1)).collect();
        let mut pending: Vec<&NGate> = gates.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|g| {
                if g.ins.iter().all(|l| v.contains_key(&l.net)) {
                    let mut dense = vec![false; g.ins.iter().map(|l| l.net).max().unwrap_or(0) + 1];
                    for l in &g.ins {
                        dense[l.net] = v[&l.net];
                    }
                    v.insert(g.out, eval_gate(g, &dense));
                    false
                } else {
                    true
                }
            });
            assert!(pending.len() < before, "local rewrite logic is acyclic");
        }
        v[&out]
    };
    for m in 0..1u32 << support.len() {
        if eval(old, old_out, m) != eval(new, new_out, m) {
            return Err(SynthError::Internal(format!("rewrite changed function at net {old_out}")));
        }
    }
    Ok(())
}

/// Apply `steps` rewrites to `base`. The first step prefers `duplicate`
/// so that every rewritten netlist carries duplicated logic when it can.
pub(super) fn rewrite(base: &GateNetlist, seed: u64, steps: usize) -> Result<(GateNetlist, Vec<RewriteRule>), SynthError> {
    if steps == 0 {
        return Ok((base.clone(), Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut po = vec![false; base.nets.len()];
    for p in base.pos() {
        po[p] = true;
    }
    let mut w = Work { n: base.clone(), po, step: 0 };
    let mut trace = Vec::new();
    for step in 0..steps {
        w.step = step;
        let mut order = RULES.to_vec();
        let first = rng.random_range(0..order.len());
        order.rotate_left(first);
        if step == 0 {
            order.retain(|r| *r != RewriteRule::Duplicate);
            order.insert(0, RewriteRule::Duplicate);
        }
        let mut applied = false;
        for rule in order {
            let cands = w.candidates(rule);
            if cands.is_empty() {
                continue;
            }
            let gi = cands[rng.random_range(0..cands.len())];
            w.apply(rule, gi, &mut rng)?;
            trace.push(rule);
            applied = true;
            break;
        }
        if !applied {
            break;
        }
    }
    let order = topo_order(w.n.nets.len(), &w.n.gates).map_err(|_| SynthError::Internal("rewrite created a cycle".into()))?;
    let mut slots: Vec<Option<NGate>> = std::mem::take(&mut w.n.gates).into_iter().map(Some).collect();
    w.n.gates = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
    Ok((tie(&w.n, &[]), trace))
}
