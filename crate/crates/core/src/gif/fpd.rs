//! False path database: user-asserted unreachable GIF-PO points.
//!
//! ```text
//! # gifpo-fpd v1
//! unreachable gate=m/add1/fa* out=CO m=111 po=p[*] reason="tied carry" author="jd"
//! ```

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use wildmatch::WildMatch;

use super::enumerate::minterm_string;
use super::universe::{GifPoUniverse, PointStatus};
use crate::circuit::ElaboratedCircuit;

pub const FPD_HEADER: &str = "# gifpo-fpd v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpdEntry {
    /// Glob over gate names (`*` and `?`).
    pub gate: String,
    /// Output pin name, e.g. `Y`, `S`, `CO`.
    pub out: String,
    /// Local minterm as a binary string, pin 0 first.
    pub m: String,
    /// Glob over primary output names.
    pub po: String,
    #[serde(default)]
    pub reason: String,
    #[serde(default)]
    pub author: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FalsePathDb {
    pub entries: Vec<FpdEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
#[error("fpd line {line}: {message}")]
pub struct FpdError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FpdReport {
    /// Points newly marked, per entry.
    pub matched: Vec<Vec<usize>>,
    /// Entries that match no point.
    pub stale: Vec<usize>,
    /// (entry, point) pairs naming a covered point; those points stay covered.
    pub rejected: Vec<(usize, usize)>,
}

impl FpdReport {
    pub fn marked(&self) -> usize {
        self.matched.iter().map(Vec::len).sum()
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Split `key=value` fields; values may be double-quoted with `\"`, `\\`
/// and `\n` escapes.
fn fields(line: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut key = String::new();
        while let Some(&c) = chars.peek() {
            if c == '=' || c.is_whitespace() {
                break;
            }
            key.push(c);
            chars.next();
        }
        if chars.next() != Some('=') {
            return Err(format!("expected `key=value`, found `{key}`"));
        }
        let mut value = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            loop {
                match chars.next() {
                    None => return Err(format!("unterminated string for `{key}`")),
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some('n') => value.push('\n'),
                        Some(c @ ('"' | '\\')) => value.push(c),
                        _ => return Err("bad escape in string".into()),
                    },
                    Some(c) => value.push(c),
                }
            }
            if chars.peek().is_some_and(|c| !c.is_whitespace()) {
                return Err(format!("junk after string for `{key}`"));
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                value.push(c);
                chars.next();
            }
        }
        out.push((key, value));
    }
}

impl FpdEntry {
    pub fn validate(&self) -> Result<(), String> {
        if self.gate.is_empty() || self.po.is_empty() || self.out.is_empty() {
            return Err("gate, out and po must be non-empty".into());
        }
        if self.m.is_empty() || self.m.len() > 12 || !self.m.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("m must be a binary string, got `{}`", self.m));
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        format!(
            "unreachable gate={} out={} m={} po={} reason={} author={}",
            self.gate,
            self.out,
            self.m,
            self.po,
            quote(&self.reason),
            quote(&self.author)
        )
    }

    fn parse_line(text: &str) -> Result<FpdEntry, String> {
        let rest = text.strip_prefix("unreachable").filter(|r| r.starts_with(char::is_whitespace));
        let Some(rest) = rest else {
            return Err("expected `unreachable ...`".into());
        };
        let mut e = FpdEntry {
            gate: String::new(),
            out: String::new(),
            m: String::new(),
            po: String::new(),
            reason: String::new(),
            author: String::new(),
        };
        let mut seen = Vec::new();
        for (k, v) in fields(rest)? {
            if seen.contains(&k) {
                return Err(format!("duplicate field `{k}`"));
            }
            let slot = match k.as_str() {
                "gate" => &mut e.gate,
                "out" => &mut e.out,
                "m" => &mut e.m,
                "po" => &mut e.po,
                "reason" => &mut e.reason,
                "author" => &mut e.author,
                _ => return Err(format!("unknown field `{k}`")),
            };
            *slot = v;
            seen.push(k);
        }
        for req in ["gate", "out", "m", "po"] {
            if !seen.iter().any(|s| s == req) {
                return Err(format!("missing field `{req}`"));
            }
        }
        e.validate()?;
        Ok(e)
    }

    /// Universe points this entry names.
    pub fn matches(&self, e: &ElaboratedCircuit, u: &GifPoUniverse) -> Vec<usize> {
        let gate = WildMatch::new(&self.gate);
        let po = WildMatch::new(&self.po);
        let mut out = Vec::new();
        for (ci, c) in u.classes.iter().enumerate() {
            let g = &e.gates[c.gate];
            if g.kind.outputs()[c.go] != self.out
                || minterm_string(c.minterm, g.kind.arity()) != self.m
                || !gate.matches(&g.name)
            {
                continue;
            }
            for p in u.class_points[ci].clone() {
                if po.matches(&e.po_names[u.points[p].po]) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl FalsePathDb {
    pub fn parse(text: &str) -> Result<FalsePathDb, FpdError> {
        let mut entries = Vec::new();
        let mut saw_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if !saw_header && entries.is_empty() && line != FPD_HEADER && line.starts_with("# gifpo-fpd") {
                    return Err(FpdError { line: i + 1, message: format!("unsupported header `{line}`") });
                }
                saw_header |= line == FPD_HEADER;
                continue;
            }
            let e = FpdEntry::parse_line(line).map_err(|message| FpdError { line: i + 1, message })?;
            entries.push(e);
        }
        if !entries.is_empty() && !saw_header {
            return Err(FpdError { line: 1, message: format!("missing `{FPD_HEADER}` header") });
        }
        Ok(FalsePathDb { entries })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(FPD_HEADER);
        s.push('\n');
        for e in &self.entries {
            let _ = writeln!(s, "{}", e.to_line());
        }
        s
    }
}

/// Mark the points named by `fpd` as unreachable. Points in `covered` are
/// never marked; they are reported as rejected instead.
pub fn apply_fpd(
    e: &ElaboratedCircuit,
    u: &mut GifPoUniverse,
    fpd: &FalsePathDb,
    covered: Option<&FixedBitSet>,
) -> FpdReport {
    let mut report = FpdReport::default();
    for (ei, entry) in fpd.entries.iter().enumerate() {
        let hits = entry.matches(e, u);
        if hits.is_empty() {
            report.stale.push(ei);
        }
        let mut marked = Vec::new();
        for p in hits {
            if covered.is_some_and(|c| c.contains(p)) {
                report.rejected.push((ei, p));
                continue;
            }
            if u.status[p] == PointStatus::Open {
                u.status[p] = PointStatus::UnreachableFpd;
                u.fpd_reasons.insert(p, entry.reason.clone());
                marked.push(p);
            }
        }
        report.matched.push(marked);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elaborate, library};
    use crate::gif::build_universe;

    #[test]
    fn round_trip() {
        let text = "# gifpo-fpd v1\nunreachable gate=g1 out=Y m=01 po=x reason=\"a \\\"b\\\"\" author=\"me\"\n";
        let db = FalsePathDb::parse(text).unwrap();
        assert_eq!(db.entries[0].reason, "a \"b\"");
        assert_eq!(db.to_text(), text);
    }

    #[test]
    fn malformed_lines() {
        for bad in [
            "# gifpo-fpd v1\nunreachable gate=g1 out=Y po=x",
            "# gifpo-fpd v1\nunreachable gate=g1 out=Y m=2 po=x",
            "# gifpo-fpd v1\nreachable gate=g1 out=Y m=01 po=x",
            "# gifpo-fpd v1\nunreachable gate=g1 out=Y m=01 po=x reason=\"open",
            "unreachable gate=g1 out=Y m=01 po=x",
        ] {
            assert!(FalsePathDb::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(FalsePathDb::parse("# gifpo-fpd v1\n\nbad").unwrap_err().line, 3);
    }

    #[test]
    fn empty_fpd_is_noop() {
        let e = elaborate(&library::c1());
        let mut u = build_universe(&e);
        let before = u.clone();
        let r = apply_fpd(&e, &mut u, &FalsePathDb::default(), None);
        assert_eq!(u, before);
        assert_eq!(r.marked(), 0);
    }

    #[test]
    fn marks_and_guards() {
        let e = elaborate(&library::c1());
        let mut u = build_universe(&e);
        let db = FalsePathDb::parse("# gifpo-fpd v1\nunreachable gate=g* out=Y m=11 po=*\nunreachable gate=zz out=Y m=1 po=*\n").unwrap();
        let mut covered = FixedBitSet::with_capacity(u.len());
        covered.insert(6); // xor m=11
        let r = apply_fpd(&e, &mut u, &db, Some(&covered));
        assert_eq!(r.matched[0], vec![2]);
        assert_eq!(r.rejected, vec![(0, 6)]);
        assert_eq!(r.stale, vec![1]);
        assert_eq!(u.denominator(), 6);
    }
}
