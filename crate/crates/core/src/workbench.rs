//! Workspaces, run artifacts, report rows and the JSON views served to the
//! coverage UI.
//!
//! A workspace is a directory:
//!
//! ```text
//! design.gnl         circuit source
//! fpd.txt            false-path database, append-only
//! *.stim             stimuli
//! runs/<hash>/       manifest.json, coverage.json, curve.csv, stimulus.stim
//! runs/latest        hash of the most recent run
//! .gifpo.lock        held while a writer is active
//! ```

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use wildmatch::WildMatch;

use crate::circuit::{elaborate, parse_circuit, Circuit, Diagnostic, ElaboratedCircuit};
use crate::gif::{apply_fpd, fpd::FPD_HEADER, FalsePathDb, FpdEntry, FpdError, Model, PointStatus};
use crate::sim::{percent, run_coverage_frames, CoverageDb, CoverageOptions, SimError, Stimulus, Summary};
use crate::stuckat::{fault_simulate, remove_all_redundant, FaultSimResult, GateNetlist, RedundancyError, MAX_EQUIV_INPUTS};
use crate::synth::{lower, SynthError, SynthStyle};
use crate::tpg::{self, compact, greedy_select, Metric, TpgError};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum WorkbenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] Diagnostic),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("fpd line {}: {}", .0.line, .0.message)]
    Fpd(FpdError),
    #[error(transparent)]
    Tpg(#[from] TpgError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Redundancy(#[from] RedundancyError),
    #[error("workspace is locked ({0} exists)")]
    Locked(PathBuf),
    #[error("gifpo curve has {gif} cycles, stuck-at curve has {stuckat}")]
    CycleMismatch { gif: usize, stuckat: usize },
    #[error("{0}")]
    Invalid(String),
}

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, WorkbenchError> {
    r.map_err(|source| WorkbenchError::Io { path: path.to_path_buf(), source })
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Clone, Debug)]
pub struct Workspace {
    pub root: PathBuf,
}

/// Removes the lock file when dropped.
#[derive(Debug)]
pub struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

impl Workspace {
    /// Create a workspace around `design` (GNL text). Existing files other
    /// than `design.gnl` are left alone.
    pub fn init(root: impl Into<PathBuf>, design: &str) -> Result<Workspace, WorkbenchError> {
        parse_circuit(design)?;
        let ws = Workspace { root: root.into() };
        io(&ws.root, fs::create_dir_all(ws.root.join("runs")))?;
        io(&ws.design_path(), fs::write(ws.design_path(), design))?;
        if !ws.fpd_path().exists() {
            io(&ws.fpd_path(), fs::write(ws.fpd_path(), format!("{FPD_HEADER}\n")))?;
        }
        Ok(ws)
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Workspace, WorkbenchError> {
        let ws = Workspace { root: root.into() };
        if !ws.design_path().is_file() {
            return Err(WorkbenchError::Invalid(format!("{} has no design.gnl", ws.root.display())));
        }
        Ok(ws)
    }

    pub fn design_path(&self) -> PathBuf {
        self.root.join("design.gnl")
    }

    pub fn fpd_path(&self) -> PathBuf {
        self.root.join("fpd.txt")
    }

    pub fn runs_path(&self) -> PathBuf {
        self.root.join("runs")
    }

    pub fn design_text(&self) -> Result<String, WorkbenchError> {
        io(&self.design_path(), fs::read_to_string(self.design_path()))
    }

    pub fn circuit(&self) -> Result<Circuit, WorkbenchError> {
        Ok(parse_circuit(&self.design_text()?)?)
    }

    pub fn fpd_text(&self) -> Result<String, WorkbenchError> {
        match fs::read_to_string(self.fpd_path()) {
            Ok(t) => Ok(t),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
            Err(e) => io(&self.fpd_path(), Err(e)),
        }
    }

    pub fn fpd(&self) -> Result<FalsePathDb, WorkbenchError> {
        FalsePathDb::parse(&self.fpd_text()?).map_err(WorkbenchError::Fpd)
    }

    /// Append one entry; the file is never rewritten.
    pub fn append_fpd(&self, entry: &FpdEntry) -> Result<(), WorkbenchError> {
        entry.validate().map_err(WorkbenchError::Invalid)?;
        let path = self.fpd_path();
        let fresh = !path.exists();
        let mut f = io(&path, fs::OpenOptions::new().create(true).append(true).open(&path))?;
        if fresh {
            io(&path, writeln!(f, "{FPD_HEADER}"))?;
        }
        io(&path, writeln!(f, "{}", entry.to_line()))
    }

    pub fn lock(&self) -> Result<LockGuard, WorkbenchError> {
        let path = self.root.join(".gifpo.lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(LockGuard { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(WorkbenchError::Locked(path)),
            Err(e) => io(&path, Err(e)),
        }
    }

    /// Resolve a stimulus path relative to the workspace.
    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Run `stimulus`, persist the artifacts and return the session.
    pub fn run(&self, stimulus: &str, seeds: &[u64]) -> Result<Session, WorkbenchError> {
        let s = Session::compute(&self.design_text()?, &self.fpd_text()?, stimulus, seeds)?;
        s.persist(self)?;
        Ok(s)
    }

    /// The most recent persisted run, recomputed from its stimulus.
    pub fn latest(&self) -> Result<Option<Session>, WorkbenchError> {
        let latest = self.runs_path().join("latest");
        let Ok(hash) = fs::read_to_string(&latest) else { return Ok(None) };
        let dir = self.runs_path().join(hash.trim());
        let stim_path = dir.join("stimulus.stim");
        let stim = io(&stim_path, fs::read_to_string(&stim_path))?;
        let manifest_path = dir.join("manifest.json");
        let seeds: Vec<u64> = fs::read_to_string(&manifest_path)
            .ok()
            .and_then(|t| serde_json::from_str::<Value>(&t).ok())
            .and_then(|v| serde_json::from_value(v["seeds"].clone()).ok())
            .unwrap_or_default();
        Ok(Some(Session::compute(&self.design_text()?, &self.fpd_text()?, &stim, &seeds)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StuckAtSummary {
    pub style: String,
    /// Faults on the lowered netlist before redundancy removal.
    pub faults_initial: usize,
    /// Faults the full input space detects before removal; `None` when
    /// the design is too wide to enumerate.
    pub detectable_initial: Option<usize>,
    pub faults: usize,
    pub detected: usize,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub circuit: String,
    pub circuit_hash: String,
    pub stimulus_hash: String,
    pub fpd_hash: String,
    pub tool_version: String,
    pub seeds: Vec<u64>,
    pub started: u64,
    pub finished: u64,
    pub summary: Summary,
    pub stuckat: Vec<StuckAtSummary>,
}

impl RunManifest {
    /// Directory name under `runs/`.
    pub fn run_hash(&self) -> String {
        let all = format!("{}{}{}{}", self.circuit_hash, self.stimulus_hash, self.fpd_hash, self.tool_version);
        sha256_hex(all.as_bytes())[..16].to_string()
    }
}

/// Gate netlist for stuck-at comparison, reduced when the design is small
/// enough to prove redundancy exhaustively.
pub fn stuckat_netlist(e: &ElaboratedCircuit, style: SynthStyle) -> Result<(GateNetlist, StuckAtSummary), WorkbenchError> {
    let raw = lower(e, style)?;
    let faults_initial = 2 * raw.nets.len();
    let (n, detectable_initial) = if raw.pis().len() <= MAX_EQUIV_INPUTS {
        let frames = crate::stuckat::exhaustive_frames(raw.pis().len());
        let det = fault_simulate(&raw, &frames).expect("exhaustive frames fit").detected();
        (remove_all_redundant(&raw)?.0, Some(det))
    } else {
        (raw, None)
    };
    let summary = StuckAtSummary {
        style: style.to_string(),
        faults_initial,
        detectable_initial,
        faults: 2 * n.nets.len(),
        detected: 0,
        percent: 0.0,
    };
    Ok((n, summary))
}

/// Everything the service and the CLI report about one run.
#[derive(Clone, Debug)]
pub struct Session {
    pub source: String,
    pub raw: ElaboratedCircuit,
    pub model: Model,
    pub stimulus: Stimulus,
    pub db: CoverageDb,
    pub netlist: GateNetlist,
    pub faults: FaultSimResult,
    /// Faults the reduced netlist can detect at all (the stuck-at
    /// denominator).
    pub stuckat_denominator: usize,
    pub manifest: RunManifest,
}

impl Session {
    pub fn compute(design: &str, fpd_text: &str, stimulus: &str, seeds: &[u64]) -> Result<Session, WorkbenchError> {
        let started = unix_now();
        let circuit = parse_circuit(design)?;
        let fpd = FalsePathDb::parse(fpd_text).map_err(WorkbenchError::Fpd)?;
        let st = Stimulus::parse(stimulus)?;
        let raw = elaborate(&circuit);
        let mut model = Model::from_elaborated(&raw);
        apply_fpd(&model.elab, &mut model.universe, &fpd, None);
        let frames = st.frames(&model.elab)?;
        let db = run_coverage_frames(&model.elab, &model.universe, &frames, CoverageOptions::default());
        let (netlist, mut sa) = stuckat_netlist(&raw, SynthStyle::Ripple)?;
        let faults = fault_simulate(&netlist, &st.frames(&raw)?).map_err(|e| WorkbenchError::Invalid(e.to_string()))?;
        let stuckat_denominator = if netlist.pis().len() <= MAX_EQUIV_INPUTS {
            let ex = crate::stuckat::exhaustive_frames(netlist.pis().len());
            fault_simulate(&netlist, &ex).expect("exhaustive frames fit").detected()
        } else {
            faults.faults.len()
        };
        sa.detected = faults.detected();
        sa.percent = percent(sa.detected, stuckat_denominator);
        let manifest = RunManifest {
            circuit: circuit.name.clone(),
            circuit_hash: sha256_hex(design.as_bytes()),
            stimulus_hash: sha256_hex(stimulus.as_bytes()),
            fpd_hash: sha256_hex(fpd_text.as_bytes()),
            tool_version: TOOL_VERSION.to_string(),
            seeds: seeds.to_vec(),
            started,
            finished: unix_now(),
            summary: db.summary(),
            stuckat: vec![sa],
        };
        Ok(Session {
            source: design.to_string(),
            raw,
            model,
            stimulus: st,
            db,
            netlist,
            faults,
            stuckat_denominator,
            manifest,
        })
    }

    fn persist(&self, ws: &Workspace) -> Result<(), WorkbenchError> {
        let hash = self.manifest.run_hash();
        let dir = ws.runs_path().join(&hash);
        io(&dir, fs::create_dir_all(&dir))?;
        let write = |name: &str, body: String| {
            let p = dir.join(name);
            io(&p, fs::write(&p, body))
        };
        write("manifest.json", serde_json::to_string_pretty(&self.manifest).expect("manifest serializes"))?;
        write("coverage.json", serde_json::to_string(&self.db.to_json(&self.model.elab, &self.model.universe)).expect("json"))?;
        write("curve.csv", self.correlation()?.to_csv())?;
        write("stimulus.stim", self.stimulus.to_text())?;
        let latest = ws.runs_path().join("latest");
        io(&latest, fs::write(&latest, format!("{hash}\n")))
    }

    pub fn correlation(&self) -> Result<Correlation, WorkbenchError> {
        correlation_curve(&self.db, &self.faults, self.stuckat_denominator)
    }

    pub fn summary_json(&self) -> Value {
        let s = self.db.summary();
        json!({
            "circuit": self.manifest.circuit,
            "total": s.total,
            "covered": s.covered,
            "open": s.open,
            "unreachable": s.unreachable,
            "unreachable_auto": s.unreachable_auto,
            "unreachable_fpd": s.unreachable_fpd,
            "denominator": s.total - s.unreachable,
            "percent": s.percent,
            "cycles": s.cycles,
            "exhaustive": self.db.exhaustive,
            "fpd_conflicts": self.db.fpd_conflicts,
            "stuckat": {
                "faults": self.faults.faults.len(),
                "detected": self.faults.detected(),
                "denominator": self.stuckat_denominator,
                "percent": percent(self.faults.detected(), self.stuckat_denominator),
            },
            "run": self.manifest.run_hash(),
        })
    }

    /// Points filtered by status (`open`, `covered`, `unreachable`) and
    /// gate / PO globs, one page at a time.
    pub fn points_json(&self, q: &PointQuery) -> Result<Value, WorkbenchError> {
        let e = &self.model.elab;
        let u = &self.model.universe;
        let gate = q.gate.as_deref().map(WildMatch::new);
        let po = q.po.as_deref().map(WildMatch::new);
        let status = match q.status.as_deref() {
            None | Some("") | Some("all") => None,
            Some(s @ ("open" | "covered" | "unreachable")) => Some(s),
            Some(s) => return Err(WorkbenchError::Invalid(format!("unknown status `{s}`"))),
        };
        let per_page = q.per_page.unwrap_or(100).clamp(1, 1000);
        let page = q.page.unwrap_or(0);
        let hits: Vec<usize> = (0..u.len())
            .filter(|&p| {
                let st = self.db.status[p];
                let ok_status = match status {
                    None => true,
                    Some("open") => st == PointStatus::Open,
                    Some("covered") => st == PointStatus::Covered,
                    _ => st.is_unreachable(),
                };
                let pt = u.points[p];
                ok_status
                    && gate.as_ref().is_none_or(|g| g.matches(&e.gates[u.classes[pt.class].gate].name))
                    && po.as_ref().is_none_or(|m| m.matches(&e.po_names[pt.po]))
            })
            .collect();
        let rows: Vec<Value> =
            hits.iter().skip(page * per_page).take(per_page).map(|&p| self.db.point_json(e, u, p)).collect();
        Ok(json!({ "total": hits.len(), "page": page, "per_page": per_page, "points": rows }))
    }

    pub fn curve_json(&self) -> Result<Value, WorkbenchError> {
        let c = self.correlation()?;
        Ok(json!({
            "cycles": c.rows.len(),
            "gifpo_pct": c.rows.iter().map(|r| r.1).collect::<Vec<_>>(),
            "stuckat_pct": c.rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            "gifpo_new": self.db.curve().iter().scan(0, |prev, &v| { let d = v - *prev; *prev = v; Some(d) }).collect::<Vec<_>>(),
            "flat": c.flat_segments(),
        }))
    }

    /// Source lines of gates matching `gate` (glob), with the primitives
    /// each one became and their point counts.
    pub fn source_json(&self, gate: Option<&str>) -> Value {
        let e = &self.model.elab;
        let u = &self.model.universe;
        let lines: Vec<&str> = self.source.lines().collect();
        let pat = gate.map(WildMatch::new);
        let mut out = Vec::new();
        for (si, src) in e.sources.iter().enumerate() {
            let prims: Vec<usize> = (0..e.gates.len()).filter(|&g| e.gates[g].source == si).collect();
            let hit = pat.as_ref().is_none_or(|p| p.matches(&src.inst) || prims.iter().any(|&g| p.matches(&e.gates[g].name)));
            if !hit {
                continue;
            }
            out.push(json!({
                "inst": src.inst,
                "kind": src.kind,
                "line": src.line,
                "text": lines.get(src.line.wrapping_sub(1)).copied().unwrap_or(""),
                "primitives": prims.iter().map(|&g| {
                    let pts: usize = u.gate_classes[g].clone().map(|c| u.class_points[c].len()).sum();
                    json!({ "name": e.gates[g].name, "kind": e.gates[g].kind.name(), "points": pts })
                }).collect::<Vec<_>>(),
            }));
        }
        json!({ "gates": out })
    }

    /// Points an FPD entry would mark, validated against this run.
    pub fn fpd_targets(&self, entry: &FpdEntry) -> Result<Vec<usize>, FpdCheck> {
        entry.validate().map_err(FpdCheck::Malformed)?;
        let hits = entry.matches(&self.model.elab, &self.model.universe);
        if hits.is_empty() {
            return Err(FpdCheck::NoMatch);
        }
        let covered: Vec<usize> = hits.iter().copied().filter(|&p| self.db.status[p] == PointStatus::Covered).collect();
        if !covered.is_empty() {
            return Err(FpdCheck::Covered(covered));
        }
        Ok(hits)
    }

    /// Mark the entry's points unreachable in this session (after the entry
    /// has been appended to the workspace file).
    pub fn apply_entry(&mut self, entry: &FpdEntry) -> usize {
        let db = FalsePathDb { entries: vec![entry.clone()] };
        let covered = self.db.covered_set();
        let rep = apply_fpd(&self.model.elab, &mut self.model.universe, &db, Some(&covered));
        for &p in rep.matched.iter().flatten() {
            self.db.status[p] = PointStatus::UnreachableFpd;
        }
        self.manifest.summary = self.db.summary();
        rep.marked()
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum FpdCheck {
    Malformed(String),
    NoMatch,
    Covered(Vec<usize>),
}

#[derive(Clone, Debug, Default, serde::Deserialize)]
pub struct PointQuery {
    pub status: Option<String>,
    pub gate: Option<String>,
    pub po: Option<String>,
    pub page: Option<usize>,
    pub per_page: Option<usize>,
}

/// Paired cumulative coverage per cycle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlation {
    /// `(cycle, gifpo_pct, stuckat_pct)`.
    pub rows: Vec<(usize, f64, f64)>,
}

pub fn correlation_curve(gif: &CoverageDb, sa: &FaultSimResult, sa_denominator: usize) -> Result<Correlation, WorkbenchError> {
    if gif.cycles != sa.cycles {
        return Err(WorkbenchError::CycleMismatch { gif: gif.cycles, stuckat: sa.cycles });
    }
    let g = gif.curve_percent();
    let s: Vec<f64> = sa.curve().into_iter().map(|c| percent(c, sa_denominator)).collect();
    Ok(Correlation { rows: g.into_iter().zip(s).enumerate().map(|(c, (a, b))| (c, a, b)).collect() })
}

impl Correlation {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cycle,gifpo_pct,stuckat_pct\n");
        for (c, g, f) in &self.rows {
            s.push_str(&format!("{c},{g:.4},{f:.4}\n"));
        }
        s
    }

    /// Maximal runs of cycles adding nothing to either curve, as inclusive
    /// `(first, last)` ranges. Candidates for removal.
    pub fn flat_segments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = None;
        for i in 0..self.rows.len() {
            let flat = if i == 0 {
                self.rows[0].1 == 0.0 && self.rows[0].2 == 0.0
            } else {
                self.rows[i].1 == self.rows[i - 1].1 && self.rows[i].2 == self.rows[i - 1].2
            };
            match (flat, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, self.rows.len() - 1));
        }
        out
    }
}

/// One row of the coverage results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub circuit: String,
    pub gifpo: usize,
    pub redundant: usize,
    pub functional_cycles: usize,
    pub gifpo_cycles: usize,
    pub gifpo_pct: f64,
    pub stuckat: StuckAtSummary,
    /// Cycles left after compacting the GIF-PO selection on stuck-at.
    pub stuckat_cycles: usize,
}

impl ReportRow {
    pub fn header() -> &'static str {
        "circuit\tgifpo\tredundant\tfunctional\tgifpo_cycles\tgifpo_pct\tsa_faults_initial\tsa_detectable_initial\tsa_faults\tsa_detected\tsa_pct\tsa_cycles"
    }

    pub fn to_tsv(&self) -> String {
        let s = &self.stuckat;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.2}\t{}\t{}\t{}\t{}\t{:.2}\t{}",
            self.circuit,
            self.gifpo,
            self.redundant,
            self.functional_cycles,
            self.gifpo_cycles,
            self.gifpo_pct,
            s.faults_initial,
            s.detectable_initial.map_or("-".to_string(), |d| d.to_string()),
            s.faults,
            s.detected,
            s.percent,
            self.stuckat_cycles,
        )
    }
}

/// Full flow for one design: coverage of `st` (exhaustive when it fits,
/// otherwise walking-window patterns), contributing-cycle selection,
/// stuck-at check of the selection on `style`, compaction.
pub fn report(c: &Circuit, st: Option<&Stimulus>, fpd: Option<&FalsePathDb>, style: SynthStyle) -> Result<ReportRow, WorkbenchError> {
    let raw = elaborate(c);
    let mut model = Model::from_elaborated(&raw);
    if let Some(f) = fpd {
        apply_fpd(&model.elab, &mut model.universe, f, None);
    }
    let st = match st {
        Some(s) => s.clone(),
        None => match tpg::gen_exhaustive(&raw) {
            Ok(s) => s,
            Err(TpgError::TooWide(_)) => tpg::gen_window(&raw, 2),
            Err(e) => return Err(e.into()),
        },
    };
    let frames = st.frames(&model.elab)?;
    let db = run_coverage_frames(&model.elab, &model.universe, &frames, CoverageOptions::default());
    let sel = greedy_select(&model.elab, &model.universe, &st)?;
    let (netlist, mut sa) = stuckat_netlist(&raw, style)?;
    let sel_frames = sel.stimulus.frames(&raw)?;
    let r = fault_simulate(&netlist, &sel_frames).map_err(|e| WorkbenchError::Invalid(e.to_string()))?;
    sa.detected = r.detected();
    let denom = if netlist.pis().len() <= MAX_EQUIV_INPUTS {
        fault_simulate(&netlist, &crate::stuckat::exhaustive_frames(netlist.pis().len())).expect("fits").detected()
    } else {
        sa.faults
    };
    sa.percent = percent(sa.detected, denom);
    let compacted = compact(&raw, &sel, Metric::StuckAt(&netlist))?;
    let summary = db.summary();
    Ok(ReportRow {
        circuit: c.name.clone(),
        gifpo: summary.total,
        redundant: summary.unreachable,
        functional_cycles: st.len(),
        gifpo_cycles: sel.len(),
        gifpo_pct: summary.percent,
        stuckat: sa,
        stuckat_cycles: compacted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::library;

    const TI: &str = "inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n";

    #[test]
    fn c1_workspace_run() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::init(dir.path(), library::C1_GNL).unwrap();
        let s = ws.run(TI, &[]).unwrap();
        let v = s.summary_json();
        assert_eq!((v["total"].as_u64(), v["covered"].as_u64(), v["unreachable"].as_u64()), (Some(7), Some(7), Some(0)));
        let hash = s.manifest.run_hash();
        assert!(dir.path().join("runs").join(&hash).join("curve.csv").is_file());
        let again = ws.latest().unwrap().unwrap();
        assert_eq!(again.manifest.summary, s.manifest.summary);
        let c = s.correlation().unwrap();
        assert_eq!(c.rows.last().unwrap().1, 100.0);
        assert_eq!(c.rows.last().unwrap().2, 100.0);
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::init(dir.path(), library::C1_GNL).unwrap();
        let g = ws.lock().unwrap();
        assert!(matches!(ws.lock(), Err(WorkbenchError::Locked(_))));
        drop(g);
        ws.lock().unwrap();
    }

    #[test]
    fn flat_segments_found() {
        let c = Correlation { rows: vec![(0, 10.0, 5.0), (1, 10.0, 5.0), (2, 10.0, 5.0), (3, 20.0, 5.0), (4, 20.0, 5.0)] };
        assert_eq!(c.flat_segments(), vec![(1, 2), (4, 4)]);
        assert!(c.to_csv().starts_with("cycle,gifpo_pct,stuckat_pct\n0,"));
    }

    #[test]
    fn fpd_entry_checks() {
        let s = Session::compute(library::C1_GNL, "", "inputs a b c\n0 0 0\n", &[]).unwrap();
        let open = s.db.status.iter().position(|x| *x == PointStatus::Open).unwrap();
        let covered = s.db.status.iter().position(|x| *x == PointStatus::Covered).unwrap();
        let entry_for = |p: usize| {
            let u = &s.model.universe;
            let e = &s.model.elab;
            let c = u.class_of(p);
            let g = &e.gates[c.gate];
            FpdEntry {
                gate: g.name.clone(),
                out: g.kind.outputs()[c.go].to_string(),
                m: crate::gif::minterm_string(c.minterm, g.kind.arity()),
                po: e.po_names[u.points[p].po].clone(),
                reason: "test".into(),
                author: "t".into(),
            }
        };
        assert!(matches!(s.fpd_targets(&entry_for(covered)), Err(FpdCheck::Covered(_))));
        let mut s2 = s.clone();
        let e = entry_for(open);
        assert_eq!(s2.fpd_targets(&e).unwrap(), vec![open]);
        assert_eq!(s2.apply_entry(&e), 1);
        assert_eq!(s2.db.summary().unreachable_fpd, 1);
        let mut bad = e.clone();
        bad.gate = "nope".into();
        assert_eq!(s.fpd_targets(&bad), Err(FpdCheck::NoMatch));
    }
}
