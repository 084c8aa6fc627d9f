//! Bundled example circuits.

use super::{parse_circuit, Circuit};

pub const C1_GNL: &str = include_str!("../../circuits/c1.gnl");
pub const C2_GNL: &str = include_str!("../../circuits/c2.gnl");
pub const B01_GNL: &str = include_str!("../../circuits/b01.gnl");
pub const B02_GNL: &str = include_str!("../../circuits/b02.gnl");
pub const B06_GNL: &str = include_str!("../../circuits/b06.gnl");

fn parse(text: &str) -> Circuit {
    parse_circuit(text).expect("bundled circuit parses")
}

pub fn c1() -> Circuit {
    parse(C1_GNL)
}

pub fn c2() -> Circuit {
    parse(C2_GNL)
}

pub fn adder_gnl(n: u32) -> String {
    format!("circuit add{n}\ninput a {n}\ninput b {n}\noutput s {n}\ngate add g s a b\nend\n")
}

/// N-bit adder, sum only.
pub fn adder(n: u32) -> Circuit {
    parse(&adder_gnl(n))
}

pub fn multiplier_gnl(n: u32) -> String {
    format!("circuit mul{n}\ninput a {n}\ninput b {n}\noutput p {}\ngate mul m p a b\nend\n", 2 * n)
}

/// N x N array multiplier.
pub fn multiplier(n: u32) -> Circuit {
    parse(&multiplier_gnl(n))
}

/// 2^k-to-1 multiplexer tree over 1-bit data inputs.
pub fn mux_tree_gnl(k: u32) -> String {
    use std::fmt::Write;
    let n = 1u32 << k;
    let mut s = format!("circuit mux{n}\n");
    for i in 0..n {
        let _ = writeln!(s, "input d{i} 1");
    }
    let _ = writeln!(s, "input sel {k}");
    s.push_str("output y 1\n");
    for l in 0..k {
        let _ = writeln!(s, "wire s{l} 1");
        let _ = writeln!(s, "gate slice gs{l} s{l} sel lo={l}");
    }
    let mut level: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    for l in 0..k {
        let mut next = Vec::new();
        for (j, pair) in level.chunks(2).enumerate() {
            let out = if l + 1 == k { "y".to_string() } else { format!("m{l}_{j}") };
            if l + 1 != k {
                let _ = writeln!(s, "wire {out} 1");
            }
            let _ = writeln!(s, "gate mux2 gm{l}_{j} {out} s{l} {} {}", pair[0], pair[1]);
            next.push(out);
        }
        level = next;
    }
    s.push_str("end\n");
    s
}

pub fn mux_tree(k: u32) -> Circuit {
    parse(&mux_tree_gnl(k))
}

/// Resolve a bundled circuit by name: `c1`, `c2`, `add<N>`, `mul<N>`,
/// `mux<2^k>`, `b01`, `b02`, `b06`.
pub fn source(name: &str) -> Option<String> {
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|r| r.parse::<u32>().ok());
    Some(match name {
        "c1" => C1_GNL.to_string(),
        "c2" => C2_GNL.to_string(),
        "b01" => B01_GNL.to_string(),
        "b02" => B02_GNL.to_string(),
        "b06" => B06_GNL.to_string(),
        _ => {
            if let Some(n) = num("add").filter(|n| (1..=64).contains(n)) {
                adder_gnl(n)
            } else if let Some(n) = num("mul").filter(|n| (1..=32).contains(n)) {
                multiplier_gnl(n)
            } else if let Some(n) = num("mux").filter(|n| n.is_power_of_two() && (2..=256).contains(n)) {
                mux_tree_gnl(n.trailing_zeros())
            } else {
                return None;
            }
        }
    })
}

pub fn by_name(name: &str) -> Option<Circuit> {
    source(name).map(|s| parse(&s))
}

/// Names of the circuits shipped with the crate.
pub const BUNDLED: &[&str] = &[
    "c1", "c2", "add2", "add4", "add8", "add64", "mul3", "mul4", "mul8", "mux4", "mux8", "b01", "b02", "b06",
];
