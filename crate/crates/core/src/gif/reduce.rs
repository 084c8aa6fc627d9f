//! Constant (forward) and open (backward) propagation over an elaborated
//! design. Both passes preserve the function of every primary output.

use serde::Serialize;

use super::enumerate::enumerate_tied;
use crate::circuit::{ElaboratedCircuit, Pin, PrimGate, PrimKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub gate: String,
    pub action: String,
    pub classes_before: usize,
    pub classes_after: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionLog {
    pub entries: Vec<Reduction>,
}

impl ReductionLog {
    /// GIF classes removed by all logged reductions.
    pub fn removed_classes(&self) -> usize {
        self.entries.iter().map(|r| r.classes_before.saturating_sub(r.classes_after)).sum()
    }

    pub fn extend(&mut self, other: ReductionLog) {
        self.entries.extend(other.entries);
    }
}

pub(crate) fn tied_pins(g: &PrimGate) -> Vec<Option<bool>> {
    g.inputs
        .iter()
        .map(|p| match *p {
            Pin::Const(b) => Some(b),
            Pin::Net(_) => None,
        })
        .collect()
}

pub(crate) fn class_count(g: &PrimGate) -> usize {
    enumerate_tied(g.kind, &tied_pins(g)).len()
}

/// Truth table of output `out` over the free pins `free` (first free pin is
/// the MSB of the index).
fn residual(kind: PrimKind, inputs: &[Pin], free: &[usize], out: usize) -> Vec<bool> {
    let n = kind.arity();
    let k = free.len();
    (0..1u32 << k)
        .map(|fm| {
            let mut m = 0u32;
            for (p, pin) in inputs.iter().enumerate() {
                let bit = match *pin {
                    Pin::Const(b) => b,
                    Pin::Net(_) => {
                        let fi = free.iter().position(|&f| f == p).unwrap();
                        (fm >> (k - 1 - fi)) & 1 == 1
                    }
                };
                m |= (bit as u32) << (n - 1 - p);
            }
            kind.eval(m, out)
        })
        .collect()
}

/// Restrict a truth table over `free` to the pins it depends on.
fn support(table: &[bool], free: &[usize]) -> (Vec<usize>, Vec<bool>) {
    let k = free.len();
    let depends = |i: usize| {
        let bit = 1usize << (k - 1 - i);
        (0..table.len()).any(|m| table[m] != table[m ^ bit])
    };
    let keep: Vec<usize> = (0..k).filter(|&i| depends(i)).collect();
    let s = keep.len();
    let reduced = (0..1usize << s)
        .map(|sm| {
            let mut m = 0usize;
            for (j, &i) in keep.iter().enumerate() {
                if (sm >> (s - 1 - j)) & 1 == 1 {
                    m |= 1 << (k - 1 - i);
                }
            }
            table[m]
        })
        .collect();
    (keep.iter().map(|&i| free[i]).collect(), reduced)
}

const SINGLE: [PrimKind; 8] = [
    PrimKind::Const0,
    PrimKind::Const1,
    PrimKind::Buf,
    PrimKind::Inv,
    PrimKind::And2,
    PrimKind::Or2,
    PrimKind::Xor2,
    PrimKind::Mux2,
];

fn match_single(table: &[bool]) -> Option<PrimKind> {
    SINGLE.into_iter().find(|k| {
        let n = k.arity();
        table.len() == 1 << n && (0..1u32 << n).all(|m| k.eval(m, 0) == table[m as usize])
    })
}

/// Fold constant-driven pins into the gates that read them. A gate whose
/// residual function is a library primitive is rewritten to it; otherwise it
/// keeps its kind with tied pins.
pub fn propagate_constants(e: &ElaboratedCircuit) -> (ElaboratedCircuit, ReductionLog) {
    let mut is_po = vec![false; e.nets.len()];
    for &p in &e.pos {
        is_po[p] = true;
    }
    let mut constant: Vec<Option<bool>> = vec![None; e.nets.len()];
    let mut gates = Vec::with_capacity(e.gates.len());
    let mut log = ReductionLog::default();
    let const_gate = |g: &PrimGate, name: String, out: usize, v: bool| PrimGate {
        name,
        kind: if v { PrimKind::Const1 } else { PrimKind::Const0 },
        inputs: vec![],
        outputs: vec![out],
        source: g.source,
    };

    for g in &e.gates {
        if matches!(g.kind, PrimKind::Const0 | PrimKind::Const1) {
            let v = g.kind == PrimKind::Const1;
            constant[g.outputs[0]] = Some(v);
            if is_po[g.outputs[0]] {
                gates.push(g.clone());
            }
            continue;
        }
        let inputs: Vec<Pin> = g
            .inputs
            .iter()
            .map(|p| match *p {
                Pin::Net(n) => constant[n].map_or(*p, Pin::Const),
                c => c,
            })
            .collect();
        if inputs.iter().all(|p| matches!(p, Pin::Net(_))) {
            gates.push(g.clone());
            continue;
        }
        let before = class_count(g);
        let free: Vec<usize> = (0..inputs.len()).filter(|&p| matches!(inputs[p], Pin::Net(_))).collect();
        let n_out = g.kind.outputs().len();
        let per_out: Vec<(Vec<usize>, Option<PrimKind>)> = (0..n_out)
            .map(|o| {
                let (sup, table) = support(&residual(g.kind, &inputs, &free, o), &free);
                (sup, match_single(&table))
            })
            .collect();
        let mut replaced = Vec::new();
        if n_out == 1 {
            if let (sup, Some(k)) = &per_out[0] {
                replaced.push((g.name.clone(), *k, sup.clone(), g.outputs[0]));
            }
        } else {
            let ha_like = free.len() == 2
                && matches!(per_out[0], (ref s, Some(PrimKind::Xor2)) if *s == free)
                && matches!(per_out[1], (ref s, Some(PrimKind::And2)) if *s == free);
            if ha_like {
                gates.push(PrimGate {
                    name: g.name.clone(),
                    kind: PrimKind::Ha,
                    inputs: free.iter().map(|&p| inputs[p]).collect(),
                    outputs: g.outputs.clone(),
                    source: g.source,
                });
                log.entries.push(Reduction {
                    gate: g.name.clone(),
                    action: format!("{} -> ha", g.kind.name()),
                    classes_before: before,
                    classes_after: 7,
                });
                continue;
            }
            if per_out.iter().all(|(_, k)| k.is_some()) {
                for (o, (sup, k)) in per_out.iter().enumerate() {
                    let name = format!("{}/{}", g.name, g.kind.outputs()[o]);
                    replaced.push((name, k.unwrap(), sup.clone(), g.outputs[o]));
                }
            }
        }
        if replaced.is_empty() {
            let kept = PrimGate { inputs, ..g.clone() };
            let after = class_count(&kept);
            log.entries.push(Reduction {
                gate: g.name.clone(),
                action: format!("{} tied", g.kind.name()),
                classes_before: before,
                classes_after: after,
            });
            gates.push(kept);
            continue;
        }
        let mut after = 0;
        let mut kinds = Vec::new();
        for (name, k, sup, out) in replaced {
            kinds.push(k.name());
            if matches!(k, PrimKind::Const0 | PrimKind::Const1) {
                let v = k == PrimKind::Const1;
                constant[out] = Some(v);
                if is_po[out] {
                    gates.push(const_gate(g, name, out, v));
                }
                continue;
            }
            let ng = PrimGate { name, kind: k, inputs: sup.iter().map(|&p| inputs[p]).collect(), outputs: vec![out], source: g.source };
            after += class_count(&ng);
            gates.push(ng);
        }
        log.entries.push(Reduction {
            gate: g.name.clone(),
            action: format!("{} -> {}", g.kind.name(), kinds.join("+")),
            classes_before: before,
            classes_after: after,
        });
    }
    (ElaboratedCircuit { gates, ..e.clone() }, log)
}

/// Remove gates that reach no primary output and log outputs left open.
pub fn propagate_opens(e: &ElaboratedCircuit) -> (ElaboratedCircuit, ReductionLog) {
    let mut reaches = vec![false; e.nets.len()];
    for &p in &e.pos {
        reaches[p] = true;
    }
    let mut keep = vec![false; e.gates.len()];
    for (gi, g) in e.gates.iter().enumerate().rev() {
        if g.outputs.iter().any(|&o| reaches[o]) {
            keep[gi] = true;
            for p in &g.inputs {
                if let Pin::Net(n) = *p {
                    reaches[n] = true;
                }
            }
        }
    }
    let mut log = ReductionLog::default();
    let mut gates = Vec::new();
    for (gi, g) in e.gates.iter().enumerate() {
        let tied = tied_pins(g);
        let classes = enumerate_tied(g.kind, &tied);
        if !keep[gi] {
            log.entries.push(Reduction {
                gate: g.name.clone(),
                action: "removed".into(),
                classes_before: classes.len(),
                classes_after: 0,
            });
            continue;
        }
        let open: Vec<usize> = (0..g.outputs.len()).filter(|&o| !reaches[g.outputs[o]]).collect();
        if !open.is_empty() {
            let after = classes.iter().filter(|c| !open.contains(&c.go)).count();
            let names: Vec<&str> = open.iter().map(|&o| g.kind.outputs()[o]).collect();
            log.entries.push(Reduction {
                gate: g.name.clone(),
                action: format!("open {}", names.join(",")),
                classes_before: classes.len(),
                classes_after: after,
            });
        }
        gates.push(g.clone());
    }
    (ElaboratedCircuit { gates, ..e.clone() }, log)
}

/// Constant propagation followed by open propagation.
pub fn reduce(e: &ElaboratedCircuit) -> (ElaboratedCircuit, ReductionLog) {
    let (c, mut log) = propagate_constants(e);
    let (o, log2) = propagate_opens(&c);
    log.extend(log2);
    (o, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, evaluate_frame, library, parse_circuit};

    fn equivalent(a: &ElaboratedCircuit, b: &ElaboratedCircuit) -> bool {
        let n = a.num_input_bits();
        let s = a.num_state_bits();
        (0..1u32 << (n + s)).all(|x| {
            let bits: Vec<bool> = (0..n + s).map(|i| (x >> i) & 1 == 1).collect();
            evaluate_frame(a, &bits[..n], &bits[n..]).outputs == evaluate_frame(b, &bits[..n], &bits[n..]).outputs
        })
    }

    #[test]
    fn and_with_one_becomes_buffer() {
        let c = parse_circuit("circuit t\ninput a 1\noutput x 1\nconst one 1 0x1\ngate and g x a one\nend").unwrap();
        let e = elaborate(&c);
        let (r, log) = propagate_constants(&e);
        assert_eq!(r.gates.len(), 1);
        assert_eq!(r.gates[0].kind, PrimKind::Buf);
        assert_eq!(log.entries[0].classes_before, 3);
        assert_eq!(log.entries[0].classes_after, 2);
        assert!(equivalent(&e, &r));
    }

    #[test]
    fn xor_with_zero_becomes_buffer() {
        let c = parse_circuit("circuit t\ninput a 1\noutput x 1\nconst z 1 0x0\ngate xor g x a z\nend").unwrap();
        let (r, _) = propagate_constants(&elaborate(&c));
        assert_eq!(r.gates[0].kind, PrimKind::Buf);
    }

    #[test]
    fn no_constants_is_fixed_point() {
        let e = elaborate(&library::c1());
        let (r, log) = propagate_constants(&e);
        assert_eq!(r, e);
        assert!(log.entries.is_empty());
    }

    #[test]
    fn adder_final_carry_is_open() {
        let e = elaborate(&library::adder(4));
        let (r, log) = propagate_opens(&e);
        assert_eq!(r.gates.len(), e.gates.len());
        assert_eq!(log.entries.len(), 1);
        assert_eq!(log.entries[0].gate, "g/fa3");
        assert_eq!(log.removed_classes(), 6);
    }

    #[test]
    fn dangling_buffer_chain_removed() {
        let t = "circuit t\ninput a 1\noutput x 1\nwire p 1\nwire q 1\nwire r 1\ngate assign g0 x a\ngate assign g1 p a\ngate assign g2 q p\ngate assign g3 r q\nend";
        let (r, log) = propagate_opens(&elaborate(&parse_circuit(t).unwrap()));
        assert_eq!(r.gates.len(), 1);
        assert_eq!(log.entries.iter().filter(|e| e.action == "removed").count(), 3);
    }

    #[test]
    fn multiplier_reduction_is_safe() {
        let e = elaborate(&library::multiplier(3));
        let (r, log) = reduce(&e);
        assert!(log.entries.iter().any(|x| x.action == "fa -> ha"));
        assert!(equivalent(&e, &r));
    }

    #[test]
    fn sequential_reduction_is_safe() {
        for name in ["b01", "b02", "b06"] {
            let e = elaborate(&library::by_name(name).unwrap());
            let (r, _) = reduce(&e);
            assert!(equivalent(&e, &r), "{name}");
        }
    }
}
