use std::fmt::Write as _;

use serde::Serialize;

use super::SimError;
use crate::circuit::{evaluate_frame, width_mask, ElaboratedCircuit};

/// Per-cycle port values.
///
/// ```text
/// inputs a b c
/// 0 1 0
/// 1 0 1
/// ```
///
/// Columns name input ports or register instances. A register column
/// overwrites the register state for that cycle; `-` keeps the carried state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stimulus {
    pub columns: Vec<String>,
    pub cycles: Vec<Vec<Option<u64>>>,
}

/// One evaluated cycle: the full PI vector (input bits, then state bits).
pub type Frame = Vec<bool>;

impl Stimulus {
    pub fn new(columns: Vec<String>) -> Self {
        Stimulus { columns, cycles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn push(&mut self, values: Vec<u64>) {
        self.cycles.push(values.into_iter().map(Some).collect());
    }

    pub fn parse(text: &str) -> Result<Stimulus, SimError> {
        let mut columns: Option<Vec<String>> = None;
        let mut cycles = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let Some(cols) = &columns else {
                if toks.next() != Some("inputs") {
                    return Err(SimError::Format { line: i + 1, message: "expected `inputs <port>...` header".into() });
                }
                let cols: Vec<String> = toks.map(str::to_string).collect();
                if cols.is_empty() {
                    return Err(SimError::Format { line: i + 1, message: "header names no columns".into() });
                }
                columns = Some(cols);
                continue;
            };
            let mut row = Vec::with_capacity(cols.len());
            for t in toks {
                if t == "-" {
                    row.push(None);
                    continue;
                }
                let digits = t.strip_prefix("0x").unwrap_or(t);
                let v = u64::from_str_radix(digits, 16)
                    .map_err(|_| SimError::Format { line: i + 1, message: format!("invalid hex value `{t}`") })?;
                row.push(Some(v));
            }
            if row.len() != cols.len() {
                return Err(SimError::Format {
                    line: i + 1,
                    message: format!("expected {} values, found {}", cols.len(), row.len()),
                });
            }
            cycles.push(row);
        }
        let Some(columns) = columns else {
            return Err(SimError::Format { line: 1, message: "empty stimulus".into() });
        };
        Ok(Stimulus { columns, cycles })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("inputs {}\n", self.columns.join(" "));
        for row in &self.cycles {
            let vals: Vec<String> = row.iter().map(|v| v.map_or("-".to_string(), |v| format!("{v:x}"))).collect();
            let _ = writeln!(s, "{}", vals.join(" "));
        }
        s
    }

    /// Keep the given cycles, in the given order.
    pub fn select(&self, cycles: &[usize]) -> Stimulus {
        Stimulus { columns: self.columns.clone(), cycles: cycles.iter().map(|&c| self.cycles[c].clone()).collect() }
    }

    /// Resolve to frames, carrying register state across cycles.
    pub fn frames(&self, e: &ElaboratedCircuit) -> Result<Vec<Frame>, SimError> {
        enum Col {
            Input(usize),
            Reg(usize),
        }
        let mut map = Vec::new();
        for c in &self.columns {
            if let Some(i) = e.interface.inputs.iter().position(|p| &p.name == c) {
                map.push(Col::Input(i));
            } else if let Some(r) = e.interface.registers.iter().position(|r| &r.inst == c) {
                map.push(Col::Reg(r));
            } else {
                return Err(SimError::UnknownColumn(c.clone()));
            }
        }
        for (i, p) in e.interface.inputs.iter().enumerate() {
            if !map.iter().any(|m| matches!(m, Col::Input(j) if *j == i)) {
                return Err(SimError::MissingInput(p.name.clone()));
            }
        }
        let in_off: Vec<usize> = e
            .interface
            .inputs
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.bits.len();
                Some(o)
            })
            .collect();
        let reg_off: Vec<usize> = e
            .interface
            .registers
            .iter()
            .scan(0, |acc, r| {
                let o = *acc;
                *acc += r.q.len();
                Some(o)
            })
            .collect();
        let n_in = e.num_input_bits();
        let n_st = e.num_state_bits();
        let mut state: Vec<bool> = Vec::with_capacity(n_st);
        for r in &e.interface.registers {
            state.extend((0..r.q.len()).map(|i| (r.init >> i) & 1 == 1));
        }
        let mut frames = Vec::with_capacity(self.cycles.len());
        for (ci, row) in self.cycles.iter().enumerate() {
            let mut pi = vec![false; n_in];
            for (k, (col, v)) in map.iter().zip(row).enumerate() {
                match (col, v) {
                    (Col::Input(i), Some(v)) => {
                        let w = e.interface.inputs[*i].bits.len();
                        if v & !width_mask(w as u32) != 0 {
                            return Err(SimError::ValueTooWide { cycle: ci, column: self.columns[k].clone() });
                        }
                        for b in 0..w {
                            pi[in_off[*i] + b] = (v >> b) & 1 == 1;
                        }
                    }
                    (Col::Input(i), None) => {
                        return Err(SimError::MissingValue { cycle: ci, column: e.interface.inputs[*i].name.clone() })
                    }
                    (Col::Reg(r), Some(v)) => {
                        let w = e.interface.registers[*r].q.len();
                        for b in 0..w {
                            state[reg_off[*r] + b] = (v >> b) & 1 == 1;
                        }
                    }
                    (Col::Reg(_), None) => {}
                }
            }
            let mut frame = pi;
            frame.extend_from_slice(&state);
            if n_st > 0 {
                state = evaluate_frame(e, &frame[..n_in], &frame[n_in..]).next_state;
            }
            frames.push(frame);
        }
        Ok(frames)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, library};

    #[test]
    fn round_trip() {
        let text = "inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n";
        let s = Stimulus::parse(text).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_text(), text);
    }

    #[test]
    fn errors() {
        assert!(Stimulus::parse("a b\n0 1").is_err());
        assert!(Stimulus::parse("inputs a b\n0").is_err());
        assert!(Stimulus::parse("inputs a\nzz").is_err());
        let e = elaborate(&library::c1());
        let s = Stimulus::parse("inputs a b\n0 1\n").unwrap();
        assert!(matches!(s.frames(&e), Err(SimError::MissingInput(_))));
        let s = Stimulus::parse("inputs a b c\n2 1 0\n").unwrap();
        assert!(matches!(s.frames(&e), Err(SimError::ValueTooWide { .. })));
    }

    #[test]
    fn register_state_carries_and_injects() {
        let e = elaborate(&library::by_name("b01").unwrap());
        let s = Stimulus::parse("inputs line1 line2 r\n1 0 -\n1 0 -\n0 0 6\n0 0 -\n").unwrap();
        let f = s.frames(&e).unwrap();
        let st = |k: usize| f[k][2..].iter().enumerate().map(|(i, &b)| (b as u64) << i).sum::<u64>();
        assert_eq!(st(0), 0);
        assert_eq!(st(1), 0);
        assert_eq!(st(2), 6);
    }
}
