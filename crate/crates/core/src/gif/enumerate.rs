use serde::Serialize;

use crate::circuit::PrimKind;

/// Sensitization class of one gate output at one local minterm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GifClass {
    pub go: usize,
    /// Local minterm over all input pins, pin 0 most significant.
    pub minterm: u32,
    pub alpha: bool,
    /// Input pins sensitized to `go` at `minterm`, ascending.
    pub members: Vec<usize>,
}

/// A single gate inherent fault `(gi, go, i, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GifFault {
    pub gi: usize,
    pub go: usize,
    pub i: u32,
    pub alpha: bool,
}

impl GifClass {
    pub fn faults(&self) -> impl Iterator<Item = GifFault> + '_ {
        self.members.iter().map(|&gi| GifFault { gi, go: self.go, i: self.minterm, alpha: self.alpha })
    }

    pub fn minterm_bits(&self, arity: usize) -> String {
        minterm_string(self.minterm, arity)
    }
}

pub fn minterm_string(m: u32, arity: usize) -> String {
    (0..arity).map(|p| if (m >> (arity - 1 - p)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Boolean difference of output `go` with respect to pin `gi` at minterm `m`.
pub fn sensitized(kind: PrimKind, gi: usize, go: usize, m: u32) -> bool {
    let n = kind.arity();
    let flipped = m ^ (1 << (n - 1 - gi));
    kind.eval(m, go) != kind.eval(flipped, go)
}

/// All classes of a primitive kind, ordered by output then minterm.
pub fn enumerate_gifs(kind: PrimKind) -> Vec<GifClass> {
    enumerate_tied(kind, &vec![None; kind.arity()])
}

/// Classes of a gate whose pins are partly tied to constants: only minterms
/// consistent with the ties are considered and tied pins are never members.
pub fn enumerate_tied(kind: PrimKind, tied: &[Option<bool>]) -> Vec<GifClass> {
    let n = kind.arity();
    assert_eq!(tied.len(), n);
    let mut out = Vec::new();
    for go in 0..kind.outputs().len() {
        for m in 0..(1u32 << n) {
            let consistent = tied
                .iter()
                .enumerate()
                .all(|(p, t)| t.is_none_or(|v| ((m >> (n - 1 - p)) & 1 == 1) == v));
            if !consistent {
                continue;
            }
            let members: Vec<usize> =
                (0..n).filter(|&p| tied[p].is_none() && sensitized(kind, p, go, m)).collect();
            if !members.is_empty() {
                out.push(GifClass { go, minterm: m, alpha: kind.eval(m, go), members });
            }
        }
    }
    out
}

/// Per-pin display labels such as `A9` or `C11`: each pin counts its own
/// appearances across the classes in order. `CI` is shown as `C`.
pub fn labels(kind: PrimKind, classes: &[GifClass]) -> Vec<Vec<String>> {
    let pins = kind.pins();
    let mut counters = vec![0usize; pins.len()];
    classes
        .iter()
        .map(|c| {
            c.members
                .iter()
                .map(|&p| {
                    counters[p] += 1;
                    format!("{}{}", &pins[p][..1], counters[p])
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(kind: PrimKind) -> Vec<(usize, String, bool, Vec<String>)> {
        let cs = enumerate_gifs(kind);
        let ls = labels(kind, &cs);
        cs.iter()
            .zip(ls)
            .map(|(c, l)| (c.go, c.minterm_bits(kind.arity()), c.alpha, l))
            .collect()
    }

    #[test]
    fn and2_classes() {
        let s = summary(PrimKind::And2);
        assert_eq!(
            s,
            vec![
                (0, "01".into(), false, vec!["A1".into()]),
                (0, "10".into(), false, vec!["B1".into()]),
                (0, "11".into(), true, vec!["A2".into(), "B2".into()]),
            ]
        );
    }

    #[test]
    fn constants_have_no_classes() {
        assert!(enumerate_gifs(PrimKind::Const0).is_empty());
        assert!(enumerate_gifs(PrimKind::Const1).is_empty());
        assert_eq!(enumerate_gifs(PrimKind::Inv).len(), 2);
    }

    #[test]
    fn tied_and_behaves_like_buffer() {
        let cs = enumerate_tied(PrimKind::And2, &[None, Some(true)]);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.members == vec![0]));
        assert!(enumerate_tied(PrimKind::And2, &[None, Some(false)]).is_empty());
    }

    #[test]
    fn mux2_classes() {
        let cs = enumerate_gifs(PrimKind::Mux2);
        // every minterm sensitizes the selected data pin
        assert_eq!(cs.len(), 8);
        let with_sel = cs.iter().filter(|c| c.members.contains(&0)).count();
        assert_eq!(with_sel, 4);
    }
}
