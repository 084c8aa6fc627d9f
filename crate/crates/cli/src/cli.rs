//! Subcommands. Each one maps onto a single library operation.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use gifpo::circuit::{elaborate, library, parse_circuit, Circuit, ElaboratedCircuit, PrimKind};
use gifpo::gif::{enumerate_gifs, labels, minterm_string, FalsePathDb, Model};
use gifpo::sim::{run_coverage, Stimulus};
use gifpo::stuckat::{fault_simulate, parse_netlist, print_netlist, GateNetlist};
use gifpo::synth::{lower, SynthStyle};
use gifpo::tpg::{self, ExportFormat, Metric};
use gifpo::workbench::{self, stuckat_netlist, ReportRow, Workspace};

#[derive(Debug, Parser)]
#[command(name = "gifpo", version, about = "GIF-PO coverage, stuck-at correlation and test-set compaction")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Parse and validate a circuit.
    Parse { circuit: String },
    /// List GIF classes of a primitive, or the GIF-PO universe of a circuit.
    Gifs(GifsArgs),
    /// GIF-PO coverage of a stimulus.
    Cover(CoverArgs),
    /// Stuck-at fault simulation.
    Faultsim(FaultsimArgs),
    /// Lower a circuit to a primitive gate netlist.
    Synth(SynthArgs),
    /// Keep the cycles that add GIF-PO coverage.
    Select(SelectArgs),
    /// Shrink a test set without losing coverage.
    Compact(CompactArgs),
    /// Coverage table row and correlation curve.
    Report(ReportArgs),
    /// Test pattern generation.
    #[command(subcommand)]
    Tpg(TpgCmd),
    /// Create a workspace directory around a circuit.
    Init { dir: PathBuf, circuit: String },
    /// Run a stimulus in a workspace and store the artifacts.
    Run {
        dir: PathBuf,
        #[arg(long)]
        stim: PathBuf,
    },
    /// Serve a workspace over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GifsArgs {
    /// Circuit file or bundled name.
    pub circuit: Option<String>,
    /// Primitive kind (and2, xor2, ha, fa, ...).
    #[arg(long, conflicts_with = "circuit")]
    pub kind: Option<String>,
    /// Print every point.
    #[arg(long)]
    pub points: bool,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    pub circuit: String,
    /// Stimulus file; exhaustive when omitted.
    #[arg(long)]
    pub stim: Option<PathBuf>,
    #[arg(long)]
    pub fpd: Option<PathBuf>,
    /// Write the coverage JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the `cycle,covered` curve here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StyleArgs {
    #[arg(long, value_enum, default_value = "ripple")]
    pub style: StyleName,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StyleName {
    Ripple,
    TwoLevel,
    Aotree,
    Rewrite,
}

impl StyleArgs {
    pub fn style(&self) -> SynthStyle {
        match self.style {
            StyleName::Ripple => SynthStyle::Ripple,
            StyleName::TwoLevel => SynthStyle::TwoLevel,
            StyleName::Aotree => SynthStyle::AoTree,
            StyleName::Rewrite => SynthStyle::Rewrite { seed: self.seed, steps: self.steps },
        }
    }
}

#[derive(Debug, Args)]
pub struct FaultsimArgs {
    /// Primitive netlist, or a circuit to lower with `--style`.
    pub netlist: String,
    #[arg(long)]
    pub stim: Option<PathBuf>,
    #[command(flatten)]
    pub style: StyleArgs,
    /// Remove redundant logic before simulating.
    #[arg(long)]
    pub reduce: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub circuit: String,
    #[command(flatten)]
    pub style: StyleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub circuit: String,
    #[arg(long)]
    pub stim: PathBuf,
    #[arg(long)]
    pub fpd: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MetricName {
    Gifpo,
    Stuckat,
}

#[derive(Debug, Args)]
pub struct CompactArgs {
    pub circuit: String,
    #[arg(long)]
    pub stim: PathBuf,
    #[arg(long, value_enum, default_value = "gifpo")]
    pub metric: MetricName,
    /// Netlist style for the stuck-at metric.
    #[command(flatten)]
    pub style: StyleArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub circuit: String,
    /// Stimulus; exhaustive or walking-window when omitted.
    #[arg(long)]
    pub stim: Option<PathBuf>,
    #[arg(long)]
    pub fpd: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "aotree")]
    pub style: StyleName,
    /// Write the `cycle,gifpo_pct,stuckat_pct` curve of the stimulus here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum TpgCmd {
    /// Generate a stimulus.
    Gen(GenArgs),
    Select(SelectArgs),
    Compact(CompactArgs),
    /// Export a stimulus as a test set.
    Export {
        circuit: String,
        #[arg(long)]
        stim: PathBuf,
        #[arg(long, value_enum, default_value = "stim")]
        format: FormatName,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatName {
    Stim,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GenKind {
    Exhaustive,
    Random,
    Window,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub circuit: String,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub kind: GenKind,
    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Directory with the static UI.
    #[arg(long)]
    pub ui: Option<PathBuf>,
}

pub type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))
}

/// GNL text of a file path or bundled circuit name.
pub fn circuit_source(arg: &str) -> Result<(String, String)> {
    let p = Path::new(arg);
    if p.is_file() {
        return Ok((p.display().to_string(), read(p)?));
    }
    library::source(arg)
        .map(|s| (arg.to_string(), s))
        .ok_or_else(|| format!("{arg}: no such file or bundled circuit"))
}

pub fn load_circuit(arg: &str) -> Result<Circuit> {
    let (name, text) = circuit_source(arg)?;
    parse_circuit(&text).map_err(|d| format!("{name}:{d}"))
}

fn load_fpd(p: Option<&PathBuf>) -> Result<Option<FalsePathDb>> {
    p.map(|p| FalsePathDb::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))).transpose()
}

fn load_stim(p: &Path) -> Result<Stimulus> {
    Stimulus::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

fn stim_or_exhaustive(e: &ElaboratedCircuit, p: Option<&PathBuf>) -> Result<Stimulus> {
    match p {
        Some(p) => load_stim(p),
        None => tpg::gen_exhaustive(e).map_err(err),
    }
}

fn emit(out: &mut dyn Write, dest: Option<&PathBuf>, body: &str) -> Result<()> {
    match dest {
        Some(p) => write_file(p, body),
        None => out.write_all(body.as_bytes()).map_err(err),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.cmd {
        Cmd::Parse { circuit } => parse(&circuit, out),
        Cmd::Gifs(a) => gifs(&a, out),
        Cmd::Cover(a) => cover(&a, out),
        Cmd::Faultsim(a) => faultsim(&a, out),
        Cmd::Synth(a) => synth(&a, out),
        Cmd::Select(a) | Cmd::Tpg(TpgCmd::Select(a)) => select(&a, out),
        Cmd::Compact(a) | Cmd::Tpg(TpgCmd::Compact(a)) => compact(&a, out),
        Cmd::Report(a) => report(&a, out),
        Cmd::Tpg(TpgCmd::Gen(a)) => gen(&a, out),
        Cmd::Tpg(TpgCmd::Export { circuit, stim, format }) => {
            let e = elaborate(&load_circuit(&circuit)?);
            let m = Model::from_elaborated(&e);
            let ts = tpg::test_set(&e, &load_stim(&stim)?, Metric::GifPo(&m.universe)).map_err(err)?;
            let fmt = match format {
                FormatName::Stim => ExportFormat::Stim,
                FormatName::Json => ExportFormat::Json,
            };
            emit(out, None, &tpg::export(&ts, fmt))
        }
        Cmd::Init { dir, circuit } => {
            let (_, text) = circuit_source(&circuit)?;
            Workspace::init(&dir, &text).map_err(err)?;
            writeln!(out, "initialised {}", dir.display()).map_err(err)
        }
        Cmd::Run { dir, stim } => {
            let ws = Workspace::open(&dir).map_err(err)?;
            let _lock = ws.lock().map_err(err)?;
            let s = ws.run(&read(&stim)?, &[]).map_err(err)?;
            let sum = s.db.summary();
            writeln!(out, "GIF-PO {}/{} ({:.2}%)", sum.covered, sum.total - sum.unreachable, sum.percent).map_err(err)?;
            writeln!(out, "run {}", s.manifest.run_hash()).map_err(err)
        }
        Cmd::Serve(a) => crate::server::serve_blocking(&a.dir, a.addr, a.ui.as_deref()),
    }
}

fn parse(arg: &str, out: &mut dyn Write) -> Result<()> {
    let c = load_circuit(arg)?;
    let e = elaborate(&c);
    writeln!(
        out,
        "{}: {} inputs, {} outputs, {} registers, {} gates, {} primitives",
        c.name,
        c.inputs().count(),
        c.outputs().count(),
        c.registers.len(),
        c.gates.len(),
        e.gates.len()
    )
    .map_err(err)
}

fn gifs(a: &GifsArgs, out: &mut dyn Write) -> Result<()> {
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(err);
    if let Some(k) = &a.kind {
        let kind = PrimKind::from_name(&k.to_ascii_lowercase()).ok_or_else(|| format!("unknown primitive `{k}`"))?;
        let classes = enumerate_gifs(kind);
        let labs = labels(kind, &classes);
        w(out, format!("{}: {} classes, {} faults", kind.name(), classes.len(), classes.iter().map(|c| c.members.len()).sum::<usize>()))?;
        for (c, l) in classes.iter().zip(labs) {
            w(
                out,
                format!("  {} m={} alpha={} {}", kind.outputs()[c.go], minterm_string(c.minterm, kind.arity()), u8::from(c.alpha), l.join(",")),
            )?;
        }
        return Ok(());
    }
    let Some(arg) = &a.circuit else { return Err("give a circuit or --kind".into()) };
    let m = Model::new(&load_circuit(arg)?);
    w(out, format!("{}: {} primitives, {} classes, {} GIF-PO points", m.elab.name, m.elab.gates.len(), m.universe.classes.len(), m.universe.len()))?;
    w(out, format!("reduction removed {} classes", m.log.removed_classes()))?;
    if a.points {
        for p in 0..m.universe.len() {
            w(out, m.universe.describe(&m.elab, p))?;
        }
    }
    Ok(())
}

fn cover(a: &CoverArgs, out: &mut dyn Write) -> Result<()> {
    let m = Model::new(&load_circuit(&a.circuit)?);
    let st = stim_or_exhaustive(&m.elab, a.stim.as_ref())?;
    let fpd = load_fpd(a.fpd.as_ref())?;
    let db = run_coverage(&m.elab, &m.universe, &st, fpd.as_ref()).map_err(err)?;
    let s = db.summary();
    writeln!(out, "GIF-PO {}/{} ({}%)", s.covered, s.total - s.unreachable, fmt_pct(s.percent)).map_err(err)?;
    if s.unreachable > 0 {
        writeln!(out, "unreachable {} (auto {}, fpd {})", s.unreachable, s.unreachable_auto, s.unreachable_fpd).map_err(err)?;
    }
    if !db.fpd_conflicts.is_empty() {
        writeln!(out, "warning: {} fpd points were covered", db.fpd_conflicts.len()).map_err(err)?;
    }
    if let Some(p) = &a.json {
        write_file(p, &serde_json::to_string_pretty(&db.to_json(&m.elab, &m.universe)).map_err(err)?)?;
    }
    if let Some(p) = &a.curve {
        let mut csv = String::from("cycle,covered\n");
        for (c, v) in db.curve().iter().enumerate() {
            csv.push_str(&format!("{c},{v}\n"));
        }
        write_file(p, &csv)?;
    }
    Ok(())
}

/// `100` for whole numbers, two decimals otherwise.
fn fmt_pct(p: f64) -> String {
    if p.fract() == 0.0 {
        format!("{p:.0}")
    } else {
        format!("{p:.2}")
    }
}

fn netlist_arg(arg: &str, style: SynthStyle) -> Result<(GateNetlist, Option<ElaboratedCircuit>)> {
    let (name, text) = circuit_source(arg)?;
    if let Ok(n) = parse_netlist(&text) {
        return Ok((n, None));
    }
    let c = parse_circuit(&text).map_err(|d| format!("{name}:{d}"))?;
    let e = elaborate(&c);
    Ok((lower(&e, style).map_err(err)?, Some(e)))
}

fn faultsim(a: &FaultsimArgs, out: &mut dyn Write) -> Result<()> {
    let (mut n, e) = netlist_arg(&a.netlist, a.style.style())?;
    if a.reduce {
        n = gifpo::stuckat::remove_all_redundant(&n).map_err(err)?.0;
    }
    let frames = match (&a.stim, &e) {
        (Some(p), Some(e)) => load_stim(p)?.frames(e).map_err(err)?,
        (Some(p), None) => {
            let st = load_stim(p)?;
            netlist_frames(&n, &st)?
        }
        (None, _) => gifpo::stuckat::exhaustive_frames(n.pis().len()),
    };
    let r = fault_simulate(&n, &frames).map_err(err)?;
    writeln!(out, "stuck-at {}/{} ({}%) over {} cycles", r.detected(), r.faults.len(), fmt_pct(r.percent()), r.cycles).map_err(err)?;
    if let Some(p) = &a.json {
        write_file(p, &serde_json::to_string_pretty(&r.to_json(&n)).map_err(err)?)?;
    }
    if let Some(p) = &a.curve {
        write_file(p, &r.curve_csv())?;
    }
    Ok(())
}

/// Frames for a bare netlist: stimulus columns name its input nets, one bit
/// each; register q nets start at their init values.
fn netlist_frames(n: &GateNetlist, st: &Stimulus) -> Result<Vec<gifpo::sim::Frame>> {
    let cols: Vec<usize> = n
        .inputs
        .iter()
        .map(|&i| st.columns.iter().position(|c| *c == n.nets[i]).ok_or_else(|| format!("stimulus has no column `{}`", n.nets[i])))
        .collect::<Result<_>>()?;
    let mut state: Vec<bool> = n.registers.iter().map(|r| r.init).collect();
    let mut frames = Vec::with_capacity(st.len());
    for row in &st.cycles {
        let mut bits: Vec<bool> = cols.iter().map(|&c| row[c].unwrap_or(0) & 1 == 1).collect();
        bits.extend_from_slice(&state);
        let values = n.eval(&bits);
        let pos = n.pos();
        state = pos[n.outputs.len()..].iter().map(|&d| values[d]).collect();
        frames.push(bits);
    }
    Ok(frames)
}

fn synth(a: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let e = elaborate(&load_circuit(&a.circuit)?);
    let n = lower(&e, a.style.style()).map_err(err)?;
    emit(out, a.output.as_ref(), &print_netlist(&n))
}

fn select(a: &SelectArgs, out: &mut dyn Write) -> Result<()> {
    let mut m = Model::new(&load_circuit(&a.circuit)?);
    if let Some(f) = load_fpd(a.fpd.as_ref())? {
        gifpo::gif::apply_fpd(&m.elab, &mut m.universe, &f, None);
    }
    let ts = tpg::greedy_select(&m.elab, &m.universe, &load_stim(&a.stim)?).map_err(err)?;
    eprintln!("selected {} cycles, GIF-PO {}%", ts.len(), fmt_pct(ts.coverage));
    emit(out, a.output.as_ref(), &ts.stimulus.to_text())
}

fn compact(a: &CompactArgs, out: &mut dyn Write) -> Result<()> {
    let raw = elaborate(&load_circuit(&a.circuit)?);
    let st = load_stim(&a.stim)?;
    let ts = match a.metric {
        MetricName::Gifpo => {
            let m = Model::from_elaborated(&raw);
            let ts = tpg::test_set(&m.elab, &st, Metric::GifPo(&m.universe)).map_err(err)?;
            tpg::compact(&m.elab, &ts, Metric::GifPo(&m.universe)).map_err(err)?
        }
        MetricName::Stuckat => {
            let (n, _) = stuckat_netlist(&raw, a.style.style()).map_err(err)?;
            let ts = tpg::test_set(&raw, &st, Metric::StuckAt(&n)).map_err(err)?;
            tpg::compact(&raw, &ts, Metric::StuckAt(&n)).map_err(err)?
        }
    };
    eprintln!("kept {} of {} cycles: {:?}", ts.len(), st.len(), ts.origin);
    emit(out, a.output.as_ref(), &ts.stimulus.to_text())
}

fn report(a: &ReportArgs, out: &mut dyn Write) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let st = a.stim.as_ref().map(|p| load_stim(p)).transpose()?;
    let fpd = load_fpd(a.fpd.as_ref())?;
    let style = StyleArgs { style: a.style, seed: 1, steps: 16 }.style();
    let row = workbench::report(&c, st.as_ref(), fpd.as_ref(), style).map_err(err)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&row).map_err(err)?).map_err(err)?;
    } else {
        writeln!(out, "{}\n{}", ReportRow::header(), row.to_tsv()).map_err(err)?;
    }
    if let Some(p) = &a.curve {
        let design = circuit_source(&a.circuit)?.1;
        let e = elaborate(&c);
        let st = match st {
            Some(s) => s,
            None => tpg::gen_exhaustive(&e).unwrap_or_else(|_| tpg::gen_window(&e, 2)),
        };
        let fpd_text = fpd.map(|f| f.to_text()).unwrap_or_default();
        let s = workbench::Session::compute(&design, &fpd_text, &st.to_text(), &[]).map_err(err)?;
        write_file(p, &s.correlation().map_err(err)?.to_csv())?;
    }
    Ok(())
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let e = elaborate(&load_circuit(&a.circuit)?);
    let st = match a.kind {
        GenKind::Exhaustive => tpg::gen_exhaustive(&e).map_err(err)?,
        GenKind::Random => tpg::gen_random(&e, a.n, a.seed),
        GenKind::Window => tpg::gen_window(&e, a.window),
    };
    emit(out, a.output.as_ref(), &st.to_text())
}
