//! Exhaustive equivalence checking and redundant-net removal.

use serde::Serialize;

use super::faultsim::StuckAtFault;
use super::netlist::{fold, topo_order, Folded, GateNetlist, GateOp, Lit, NGate, Sig};
use crate::logic::{CellNetlist, LANES};

pub const MAX_EQUIV_INPUTS: usize = 24;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EquivError {
    #[error("interfaces differ: {0}")]
    Signature(String),
    #[error("{0} primary inputs exceed the exhaustive limit of {MAX_EQUIV_INPUTS}")]
    TooWide(usize),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RedundancyError {
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error("tying `{net}` to {value} changes behavior at input {counterexample:?}")]
    NotEquivalent { net: String, value: bool, counterexample: Vec<bool> },
}

/// Compare two cell netlists over every input assignment. Returns the first
/// differing assignment, first input most significant.
pub fn exhaustive_compare(a: &CellNetlist, b: &CellNetlist) -> Result<Option<Vec<bool>>, EquivError> {
    let n = a.inputs().len();
    if n != b.inputs().len() || a.outputs().len() != b.outputs().len() {
        return Err(EquivError::Signature(format!(
            "{}/{} vs {}/{} inputs/outputs",
            n,
            a.outputs().len(),
            b.inputs().len(),
            b.outputs().len()
        )));
    }
    if n > MAX_EQUIV_INPUTS {
        return Err(EquivError::TooWide(n));
    }
    let total = 1u64 << n;
    let (mut va, mut vb) = (Vec::new(), Vec::new());
    let mut base = 0u64;
    while base < total {
        let lanes = (total - base).min(LANES as u64);
        let pi: Vec<u64> = (0..n)
            .map(|i| {
                (0..lanes).fold(0u64, |w, l| w | ((((base + l) >> (n - 1 - i)) & 1) << l))
            })
            .collect();
        a.eval_block(&pi, &mut va);
        b.eval_block(&pi, &mut vb);
        let valid = crate::logic::lane_mask(lanes as usize);
        let diff = a
            .outputs()
            .iter()
            .zip(b.outputs())
            .fold(0u64, |acc, (&x, &y)| acc | (va[x] ^ vb[y])) & valid;
        if diff != 0 {
            let k = base + diff.trailing_zeros() as u64;
            return Ok(Some((0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect()));
        }
        base += lanes;
    }
    Ok(None)
}

pub fn exhaustive_equivalence(a: &GateNetlist, b: &GateNetlist) -> Result<Option<Vec<bool>>, EquivError> {
    exhaustive_compare(&a.to_cells(), &b.to_cells())
}

/// Tie the given nets to constants, fold constants, drop dead logic and
/// compact nets. PIs, POs and registers keep their positions.
pub fn tie(n: &GateNetlist, ties: &[(usize, bool)]) -> GateNetlist {
    let mut sig: Vec<Sig> = (0..n.nets.len()).map(|i| Sig::Lit(Lit::pos(i))).collect();
    let mut tied = vec![None; n.nets.len()];
    for &(net, v) in ties {
        tied[net] = Some(v);
        sig[net] = Sig::Const(v);
    }
    let po_set: Vec<bool> = {
        let mut s = vec![false; n.nets.len()];
        for p in n.pos() {
            s[p] = true;
        }
        s
    };
    let resolve = |sig: &[Sig], l: Lit| match sig[l.net] {
        Sig::Const(b) => Sig::Const(b ^ l.inv),
        Sig::Lit(r) => Sig::Lit(Lit { net: r.net, inv: r.inv ^ l.inv }),
    };
    let mut gates: Vec<NGate> = Vec::new();
    for g in &n.gates {
        if tied[g.out].is_some() {
            continue;
        }
        let ins: Vec<Sig> = g.ins.iter().map(|&l| resolve(&sig, l)).collect();
        let has_const = ins.iter().any(|s| matches!(s, Sig::Const(_)));
        let result = if has_const { fold(g.op, &ins) } else { None };
        match result {
            None => {
                let lits = ins
                    .iter()
                    .map(|s| match s {
                        Sig::Lit(l) => *l,
                        Sig::Const(_) => unreachable!(),
                    })
                    .collect();
                gates.push(NGate { name: g.name.clone(), op: g.op, ins: lits, out: g.out });
            }
            Some(Folded::Gate(op, lits)) => gates.push(NGate { name: g.name.clone(), op, ins: lits, out: g.out }),
            Some(Folded::Sig(s)) => {
                if po_set[g.out] {
                    let (op, ins) = match s {
                        Sig::Const(false) => (GateOp::Const0, vec![]),
                        Sig::Const(true) => (GateOp::Const1, vec![]),
                        Sig::Lit(l) => (if l.inv { GateOp::Inv } else { GateOp::Buf }, vec![Lit::pos(l.net)]),
                    };
                    gates.push(NGate { name: g.name.clone(), op, ins, out: g.out });
                } else {
                    sig[g.out] = s;
                }
            }
        }
    }
    // Tied nets that are POs or register inputs still need a driver.
    for p in n.pos() {
        if let Some(v) = tied[p] {
            if !n.pis().contains(&p) && !gates.iter().any(|g| g.out == p) {
                let name = format!("{}/tie", n.nets[p]);
                gates.push(NGate { name, op: if v { GateOp::Const1 } else { GateOp::Const0 }, ins: vec![], out: p });
            }
        }
    }
    compact(n, gates)
}

/// Drop gates that reach no PO and renumber nets.
fn compact(n: &GateNetlist, gates: Vec<NGate>) -> GateNetlist {
    let mut live = vec![false; n.nets.len()];
    for p in n.pos() {
        live[p] = true;
    }
    let mut keep = vec![false; gates.len()];
    for (i, g) in gates.iter().enumerate().rev() {
        if live[g.out] {
            keep[i] = true;
            for l in &g.ins {
                live[l.net] = true;
            }
        }
    }
    for p in n.pis() {
        live[p] = true;
    }
    let mut remap = vec![usize::MAX; n.nets.len()];
    let mut nets = Vec::new();
    for (i, name) in n.nets.iter().enumerate() {
        if live[i] {
            remap[i] = nets.len();
            nets.push(name.clone());
        }
    }
    let gates: Vec<NGate> = gates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(g, _)| NGate {
            name: g.name,
            op: g.op,
            ins: g.ins.iter().map(|l| Lit { net: remap[l.net], inv: l.inv }).collect(),
            out: remap[g.out],
        })
        .collect();
    let order = topo_order(nets.len(), &gates).expect("tying cannot create cycles");
    let mut slots: Vec<Option<NGate>> = gates.into_iter().map(Some).collect();
    let gates = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
    GateNetlist {
        name: n.name.clone(),
        nets,
        gates,
        inputs: n.inputs.iter().map(|&i| remap[i]).collect(),
        outputs: n.outputs.iter().map(|&i| remap[i]).collect(),
        registers: n
            .registers
            .iter()
            .map(|r| super::netlist::NetRegister { inst: r.inst.clone(), q: remap[r.q], d: remap[r.d], init: r.init })
            .collect(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    /// Nets tied, with the constant used.
    pub tied: Vec<(String, bool)>,
    /// Undetected faults whose tie was dropped because another tie
    /// already made it unnecessary.
    pub skipped: Vec<(String, bool)>,
    pub nets_before: usize,
    pub nets_after: usize,
    pub gates_before: usize,
    pub gates_after: usize,
}

/// Tie every net carrying an undetected fault to its stuck value and prove
/// the result equivalent. Ties are tried as one batch first; if the batch
/// is not equivalent they are applied one at a time, each verified.
pub fn remove_redundant(
    n: &GateNetlist,
    undetected: &[StuckAtFault],
) -> Result<(GateNetlist, RedundancyReport), RedundancyError> {
    let reference = n.to_cells();
    let mut ties: Vec<(usize, bool)> = Vec::new();
    for f in undetected {
        if !ties.iter().any(|t| t.0 == f.net) {
            ties.push((f.net, f.value));
        }
    }
    let mut report = RedundancyReport {
        nets_before: n.nets.len(),
        gates_before: n.gates.len(),
        ..Default::default()
    };
    let batch = tie(n, &ties);
    let out = if exhaustive_compare(&reference, &batch.to_cells())?.is_none() {
        report.tied = ties.iter().map(|&(net, v)| (n.nets[net].clone(), v)).collect();
        batch
    } else {
        let mut accepted: Vec<(usize, bool)> = Vec::new();
        for &(net, v) in &ties {
            let mut trial = accepted.clone();
            trial.push((net, v));
            let cand = tie(n, &trial);
            match exhaustive_compare(&reference, &cand.to_cells())? {
                None => accepted = trial,
                Some(_) => {
                    // Fine alone means a prior tie already absorbed it.
                    let alone = tie(n, &[(net, v)]);
                    if let Some(c) = exhaustive_compare(&reference, &alone.to_cells())? {
                        return Err(RedundancyError::NotEquivalent {
                            net: n.nets[net].clone(),
                            value: v,
                            counterexample: c,
                        });
                    }
                    report.skipped.push((n.nets[net].clone(), v));
                }
            }
        }
        report.tied = accepted.iter().map(|&(net, v)| (n.nets[net].clone(), v)).collect();
        tie(n, &accepted)
    };
    report.nets_after = out.nets.len();
    report.gates_after = out.gates.len();
    Ok((out, report))
}

/// Repeat exhaustive fault simulation and [`remove_redundant`] until no
/// tie changes the netlist. Returns the reduced netlist and one report per
/// pass that changed something.
pub fn remove_all_redundant(n: &GateNetlist) -> Result<(GateNetlist, Vec<RedundancyReport>), RedundancyError> {
    let width = n.pis().len();
    if width > MAX_EQUIV_INPUTS {
        return Err(EquivError::TooWide(width).into());
    }
    let frames = super::faultsim::exhaustive_frames(width);
    let mut cur = n.clone();
    let mut reports = Vec::new();
    loop {
        let und = super::faultsim::fault_simulate(&cur, &frames).expect("frames match the PIs").undetected();
        if und.is_empty() {
            break;
        }
        let (next, rep) = remove_redundant(&cur, &und)?;
        if next == cur {
            break;
        }
        cur = next;
        reports.push(rep);
    }
    Ok((cur, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stuckat::faultsim::{exhaustive_frames, fault_simulate};
    use crate::stuckat::netlist::{parse_netlist, C1_NETLIST};

    #[test]
    fn counterexample_is_msb_first() {
        let c1 = parse_netlist(C1_NETLIST).unwrap();
        let ao = parse_netlist(
            "circuit t\ninput a 1\ninput b 1\ninput c 1\noutput x 1\nwire d 1\ngate or g1 d a b\ngate xor g2 x d c\nend",
        )
        .unwrap();
        assert_eq!(exhaustive_equivalence(&c1, &ao).unwrap(), Some(vec![false, true, false]));
        assert_eq!(exhaustive_equivalence(&c1, &c1).unwrap(), None);
    }

    #[test]
    fn removes_masked_logic() {
        // y = a | (a & b): the AND is redundant.
        let n = parse_netlist(
            "circuit t\ninput a 1\ninput b 1\noutput y 1\nwire t 1\ngate and g1 t a b\ngate or g2 y a t\nend",
        )
        .unwrap();
        let r = fault_simulate(&n, &exhaustive_frames(2)).unwrap();
        let und = r.undetected();
        assert!(!und.is_empty());
        let (m, rep) = remove_redundant(&n, &und).unwrap();
        assert_eq!(exhaustive_equivalence(&n, &m).unwrap(), None);
        assert!(rep.gates_after < rep.gates_before);
        let r2 = fault_simulate(&m, &exhaustive_frames(2)).unwrap();
        // Only the now unused input `b` stays untestable.
        let b = m.net_index("b").unwrap();
        assert!(r2.undetected().iter().all(|f| f.net == b), "{:?}", r2.undetected());
        assert_eq!(m.gates.len(), 1);
    }

    #[test]
    fn rejects_testable_tie() {
        let n = parse_netlist(C1_NETLIST).unwrap();
        let err = remove_redundant(&n, &[StuckAtFault { net: 3, value: false }]).unwrap_err();
        assert!(matches!(err, RedundancyError::NotEquivalent { .. }));
    }
}
