//! Python bindings. Results come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gifpo::circuit::{elaborate, library, parse_circuit, Circuit, PrimKind};
use gifpo::gif::{enumerate_gifs, minterm_string, Model};
use gifpo::sim::{run_coverage, Stimulus};
use gifpo::stuckat::{exhaustive_frames, fault_simulate, parse_netlist, print_netlist};
use gifpo::synth::{lower, SynthStyle};
use gifpo::tpg;
use gifpo::workbench;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// GNL text, or the name of a bundled circuit.
fn circuit(src: &str) -> PyResult<Circuit> {
    let text = library::source(src).unwrap_or_else(|| src.to_string());
    parse_circuit(&text).map_err(value_err)
}

/// `(output, minterm, alpha, member pins)` for every class of a primitive.
#[pyfunction]
fn gif_classes(kind: &str) -> PyResult<Vec<(String, String, bool, Vec<String>)>> {
    let k = PrimKind::from_name(&kind.to_ascii_lowercase()).ok_or_else(|| value_err(format!("unknown primitive `{kind}`")))?;
    Ok(enumerate_gifs(k)
        .into_iter()
        .map(|c| {
            (
                k.outputs()[c.go].to_string(),
                minterm_string(c.minterm, k.arity()),
                c.alpha,
                c.members.iter().map(|&m| k.pins()[m].to_string()).collect(),
            )
        })
        .collect())
}

/// Number of GIF-PO points of a circuit after reduction.
#[pyfunction]
fn universe_size(design: &str) -> PyResult<usize> {
    Ok(Model::new(&circuit(design)?).universe.len())
}

/// Coverage summary of `stimulus` (exhaustive when `None`).
#[pyfunction]
#[pyo3(signature = (design, stimulus=None))]
fn cover<'py>(py: Python<'py>, design: &str, stimulus: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let m = Model::new(&circuit(design)?);
    let st = match stimulus {
        Some(t) => Stimulus::parse(t).map_err(value_err)?,
        None => tpg::gen_exhaustive(&m.elab).map_err(value_err)?,
    };
    let db = py.detach(|| run_coverage(&m.elab, &m.universe, &st, None)).map_err(value_err)?;
    to_py(py, &serde_json::to_value(db.summary()).map_err(value_err)?)
}

/// Primitive netlist text for a design in one synthesis style
/// (`ripple`, `two-level`, `aotree`, `rewrite:<seed>:<steps>`).
#[pyfunction]
#[pyo3(signature = (design, style="ripple"))]
fn synth(design: &str, style: &str) -> PyResult<String> {
    let s = SynthStyle::parse(style).ok_or_else(|| value_err(format!("unknown style `{style}`")))?;
    let n = lower(&elaborate(&circuit(design)?), s).map_err(value_err)?;
    Ok(print_netlist(&n))
}

/// Exhaustive stuck-at simulation of a primitive netlist.
#[pyfunction]
fn fault_sim<'py>(py: Python<'py>, netlist: &str) -> PyResult<Bound<'py, PyAny>> {
    let n = parse_netlist(netlist).map_err(value_err)?;
    if n.pis().len() > 24 {
        return Err(value_err("netlist too wide for exhaustive simulation"));
    }
    let r = py.detach(|| fault_simulate(&n, &exhaustive_frames(n.pis().len()))).map_err(value_err)?;
    to_py(py, &r.to_json(&n))
}

/// Coverage table row for a design.
#[pyfunction]
#[pyo3(signature = (design, style="aotree"))]
fn report<'py>(py: Python<'py>, design: &str, style: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = SynthStyle::parse(style).ok_or_else(|| value_err(format!("unknown style `{style}`")))?;
    let c = circuit(design)?;
    let row = py.detach(|| workbench::report(&c, None, None, s)).map_err(value_err)?;
    to_py(py, &serde_json::to_value(row).map_err(value_err)?)
}

#[pymodule]
fn gifpo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(gif_classes, m)?)?;
    m.add_function(wrap_pyfunction!(universe_size, m)?)?;
    m.add_function(wrap_pyfunction!(cover, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(fault_sim, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    Ok(())
}
