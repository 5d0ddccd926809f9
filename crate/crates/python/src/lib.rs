//! Python bindings: the main types and operations of the grough library.
//!
//! Build with `cargo build --release -p grough-py`; the smoke test in
//! `python/smoke_test.py` locates the produced cdylib and imports it as
//! `grough_py`. Reports cross the boundary as JSON strings.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use grough::config::parse_config_text;
use grough::controlled::{compose_field, controlled_identity, gubinelli_integral};
use grough::error::Error;
use grough::expectation::{
    estimate_upper_expectation as estimate_impl, gnormal_exact as gnormal_exact_impl,
    terminal_payoff, PayoffKind,
};
use grough::experiment::{
    run_integral_rate, run_lift_distance, run_rde_vs_sde, run_wz_l2,
};
use grough::gbm::{
    derive_seed, sample_control, sample_gbm as sample_gbm_impl, ControlKind, GbmSample,
    UncertaintyInterval,
};
use grough::lift;
use grough::path::{GridPath, TimeGrid};
use grough::rde::{solve_rde as solve_rde_impl, RdeProblem};
use grough::rough::{
    chen_defect, holder_norm, holder_norm2, random_probe_triples, rough_distance_components,
    rough_seminorm, RoughPath,
};
use grough::schemes::{
    euler_maruyama_g, reference_solution as reference_impl, stratonovich_integral as strat_int_impl,
    wong_zakai_ode as wz_impl, CoeffSet,
};

fn to_py_err(e: Error) -> PyErr {
    match &e {
        Error::Parameter(_) | Error::GridMismatch(_) => PyValueError::new_err(e.to_string()),
        Error::IndexRange(_) => PyIndexError::new_err(e.to_string()),
        Error::Divergence { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
    }
}

fn interval(sigma_lo: f64, sigma_hi: f64) -> PyResult<UncertaintyInterval> {
    UncertaintyInterval::new(sigma_lo, sigma_hi).map_err(to_py_err)
}

fn control_kind(name: &str) -> PyResult<ControlKind> {
    name.parse::<ControlKind>().map_err(to_py_err)
}

fn payoff_kind(name: &str) -> PyResult<PayoffKind> {
    name.parse::<PayoffKind>().map_err(to_py_err)
}

/// A real-valued path on a uniform grid.
#[pyclass(name = "GridPath", frozen, skip_from_py_object)]
pub struct PyGridPath {
    inner: GridPath,
}

#[pymethods]
impl PyGridPath {
    /// Values at the grid nodes.
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    /// Node times.
    fn times(&self) -> Vec<f64> {
        let grid = self.inner.grid();
        (0..grid.n_nodes()).map(|i| grid.node(i)).collect()
    }

    fn terminal(&self) -> f64 {
        self.inner.terminal()
    }

    fn n_steps(&self) -> usize {
        self.inner.n_steps()
    }

    /// α-Hölder norm over the grid-pair set.
    fn holder_norm(&self, alpha: f64) -> PyResult<f64> {
        holder_norm(&self.inner, alpha).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __repr__(&self) -> String {
        format!("GridPath(n_steps={})", self.inner.n_steps())
    }
}

/// One simulated (B, ⟨B⟩) pair under a volatility scenario.
#[pyclass(name = "GbmSample", frozen, skip_from_py_object)]
pub struct PyGbmSample {
    inner: GbmSample,
}

#[pymethods]
impl PyGbmSample {
    /// The G-Brownian path.
    fn b(&self) -> PyGridPath {
        PyGridPath {
            inner: self.inner.b().clone(),
        }
    }

    /// The quadratic variation path.
    fn qv(&self) -> PyGridPath {
        PyGridPath {
            inner: self.inner.qv().clone(),
        }
    }

    /// Per-cell volatility values of the driving control.
    fn a_values(&self) -> Vec<f64> {
        self.inner.control().a_values().to_vec()
    }

    fn n_steps(&self) -> usize {
        self.inner.n_steps()
    }

    fn __repr__(&self) -> String {
        format!(
            "GbmSample(kind={}, n_steps={}, seed={})",
            self.inner.control().kind(),
            self.inner.n_steps(),
            self.inner.seed()
        )
    }
}

/// A first level with per-cell second-level blocks and an exponent.
#[pyclass(name = "RoughPath", frozen, skip_from_py_object)]
pub struct PyRoughPath {
    inner: RoughPath,
}

#[pymethods]
impl PyRoughPath {
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    fn first(&self) -> PyGridPath {
        PyGridPath {
            inner: self.inner.first().clone(),
        }
    }

    /// Second-level value on a node-index pair via Chen composition.
    fn second_eval(&self, s_idx: usize, t_idx: usize) -> PyResult<f64> {
        self.inner.second_eval(s_idx, t_idx).map_err(to_py_err)
    }

    /// `‖X‖_α + ‖𝕏‖_{2α}^{1/2}`.
    fn seminorm(&self) -> f64 {
        rough_seminorm(&self.inner)
    }

    /// Second-level Hölder norm at exponent 2α.
    fn second_norm(&self) -> PyResult<f64> {
        holder_norm2(self.inner.second(), 2.0 * self.inner.alpha()).map_err(to_py_err)
    }

    /// Max Chen defect over deterministic random probe triples.
    fn chen_defect(&self, probes: usize, seed: u64) -> PyResult<f64> {
        let triples = random_probe_triples(self.inner.n_steps(), probes, seed);
        chen_defect(&self.inner, &triples).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RoughPath(n_steps={}, alpha={})",
            self.inner.n_steps(),
            self.inner.alpha()
        )
    }
}

/// Simulate one G-Brownian sample.
#[pyfunction]
#[pyo3(signature = (kind, sigma_lo, sigma_hi, n_steps, seed))]
fn sample_gbm(
    kind: &str,
    sigma_lo: f64,
    sigma_hi: f64,
    n_steps: usize,
    seed: u64,
) -> PyResult<PyGbmSample> {
    let grid = TimeGrid::unit(n_steps).map_err(to_py_err)?;
    let control = sample_control(
        control_kind(kind)?,
        interval(sigma_lo, sigma_hi)?,
        grid,
        derive_seed(seed, &[1]),
    );
    Ok(PyGbmSample {
        inner: sample_gbm_impl(&control, derive_seed(seed, &[2])),
    })
}

/// Stratonovich lift of a sample: blocks `(ΔB)²/2`.
#[pyfunction]
fn strat_lift(sample: &PyGbmSample, alpha: f64) -> PyResult<PyRoughPath> {
    Ok(PyRoughPath {
        inner: lift::strat_lift(&sample.inner, alpha).map_err(to_py_err)?,
    })
}

/// Itô lift of a sample: blocks `(ΔB)²/2 - Δ⟨B⟩/2`.
#[pyfunction]
fn ito_lift(sample: &PyGbmSample, alpha: f64) -> PyResult<PyRoughPath> {
    Ok(PyRoughPath {
        inner: lift::ito_lift(&sample.inner, alpha).map_err(to_py_err)?,
    })
}

/// Piecewise-linear interpolation of B through an n_coarse sub-partition.
#[pyfunction]
fn pw_linear(sample: &PyGbmSample, n_coarse: usize) -> PyResult<PyGridPath> {
    Ok(PyGridPath {
        inner: lift::pw_linear(&sample.inner, n_coarse).map_err(to_py_err)?,
    })
}

/// Canonical lift of a bounded-variation path.
#[pyfunction]
fn pw_linear_lift(path: &PyGridPath, alpha: f64) -> PyResult<PyRoughPath> {
    Ok(PyRoughPath {
        inner: lift::pw_linear_lift(&path.inner, alpha).map_err(to_py_err)?,
    })
}

/// Rough distance ϱ_α between two lifts on the same grid.
#[pyfunction]
fn rough_distance(a: &PyRoughPath, b: &PyRoughPath) -> PyResult<f64> {
    let (l1, l2) = rough_distance_components(&a.inner, &b.inner).map_err(to_py_err)?;
    Ok(l1 + l2)
}

/// First- and second-level parts of the rough distance.
#[pyfunction]
fn rough_distance_parts(a: &PyRoughPath, b: &PyRoughPath) -> PyResult<(f64, f64)> {
    rough_distance_components(&a.inner, &b.inner).map_err(to_py_err)
}

/// Solve `dY = f(Y) d𝐁 + g(Y) d⟨B⟩ + h(Y) dt` against the Stratonovich
/// lift of the sample, with a named coefficient preset.
#[pyfunction]
fn solve_rde(sample: &PyGbmSample, coeffs: &str, x0: f64, alpha: f64) -> PyResult<PyGridPath> {
    let coeffs = CoeffSet::preset(coeffs).map_err(to_py_err)?;
    let rough = lift::strat_lift(&sample.inner, alpha).map_err(to_py_err)?;
    let problem = RdeProblem::new(
        rough,
        sample.inner.qv().clone(),
        coeffs.f,
        coeffs.g,
        coeffs.h,
        x0,
    )
    .map_err(to_py_err)?;
    Ok(PyGridPath {
        inner: solve_rde_impl(&problem).map_err(to_py_err)?,
    })
}

/// Fine-grid reference: Euler-Maruyama on the Itô form.
#[pyfunction]
fn reference_solution(sample: &PyGbmSample, coeffs: &str, x0: f64) -> PyResult<PyGridPath> {
    let coeffs = CoeffSet::preset(coeffs).map_err(to_py_err)?;
    Ok(PyGridPath {
        inner: reference_impl(&sample.inner, &coeffs, x0).map_err(to_py_err)?,
    })
}

/// Polygonal-driver ODE scheme with explicit Euler sub-steps.
#[pyfunction]
fn wong_zakai_ode(
    sample: &PyGbmSample,
    coeffs: &str,
    n_coarse: usize,
    m_sub: usize,
    x0: f64,
) -> PyResult<PyGridPath> {
    let coeffs = CoeffSet::preset(coeffs).map_err(to_py_err)?;
    Ok(PyGridPath {
        inner: wz_impl(&sample.inner, &coeffs, n_coarse, m_sub, x0).map_err(to_py_err)?,
    })
}

/// Coarse Euler-Maruyama recursion with the ½ f' f correction.
#[pyfunction]
fn euler_maruyama(
    sample: &PyGbmSample,
    coeffs: &str,
    n_coarse: usize,
    x0: f64,
) -> PyResult<PyGridPath> {
    let coeffs = CoeffSet::preset(coeffs).map_err(to_py_err)?;
    Ok(PyGridPath {
        inner: euler_maruyama_g(&sample.inner, &coeffs, n_coarse, x0).map_err(to_py_err)?,
    })
}

/// Stratonovich integral `∫ Y ∘ dB` on the sample grid.
#[pyfunction]
fn stratonovich_integral(y: &PyGridPath, sample: &PyGbmSample) -> PyResult<f64> {
    strat_int_impl(&y.inner, &sample.inner).map_err(to_py_err)
}

/// Compensated-sum rough integral of `(f(B), f'(B))` against a lift of B.
#[pyfunction]
fn rough_integral_of_field(field: &str, rough: &PyRoughPath) -> PyResult<f64> {
    let coeffs = CoeffSet::preset(field).map_err(to_py_err)?;
    let cp = compose_field(&coeffs.f, &controlled_identity(&rough.inner));
    gubinelli_integral(&cp, &rough.inner, 0, rough.inner.n_steps()).map_err(to_py_err)
}

/// Exact G-normal value of a catalogue payoff at `B_1`.
#[pyfunction]
fn gnormal_exact(payoff: &str, sigma_lo: f64, sigma_hi: f64) -> PyResult<f64> {
    Ok(gnormal_exact_impl(
        payoff_kind(payoff)?,
        &interval(sigma_lo, sigma_hi)?,
    ))
}

/// Upper-expectation estimate of a catalogue payoff at the terminal value.
/// Returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (payoff, scenarios, sigma_lo, sigma_hi, n_steps, paths, seed))]
#[allow(clippy::too_many_arguments)]
fn estimate_upper_expectation(
    payoff: &str,
    scenarios: Vec<String>,
    sigma_lo: f64,
    sigma_hi: f64,
    n_steps: usize,
    paths: usize,
    seed: u64,
) -> PyResult<String> {
    let kinds = scenarios
        .iter()
        .map(|s| control_kind(s))
        .collect::<PyResult<Vec<_>>>()?;
    let grid = TimeGrid::unit(n_steps).map_err(to_py_err)?;
    let report = estimate_impl(
        terminal_payoff(payoff_kind(payoff)?),
        &kinds,
        interval(sigma_lo, sigma_hi)?,
        grid,
        paths,
        seed,
    )
    .map_err(to_py_err)?;
    Ok(report.to_json())
}

/// Run a convergence experiment ("wong_zakai", "lift_distance",
/// "rde_vs_sde" or "rough_integral_rate") with flat string options, the
/// same keys as the CLI config file. Returns the report as a JSON string.
#[pyfunction]
fn run_experiment(name: &str, options: BTreeMap<String, String>) -> PyResult<String> {
    let text: String = options
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let cfg = parse_config_text(&text)
        .and_then(|o| o.into_experiment_config())
        .map_err(to_py_err)?;
    let report = match name {
        "wong_zakai" => run_wz_l2(&cfg),
        "lift_distance" => run_lift_distance(&cfg),
        "rde_vs_sde" => run_rde_vs_sde(&cfg),
        "rough_integral_rate" => run_integral_rate(&cfg),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown experiment '{other}'"
            )))
        }
    }
    .map_err(to_py_err)?;
    Ok(report.to_json())
}

#[pymodule]
fn grough_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridPath>()?;
    m.add_class::<PyGbmSample>()?;
    m.add_class::<PyRoughPath>()?;
    m.add_function(wrap_pyfunction!(sample_gbm, m)?)?;
    m.add_function(wrap_pyfunction!(strat_lift, m)?)?;
    m.add_function(wrap_pyfunction!(ito_lift, m)?)?;
    m.add_function(wrap_pyfunction!(pw_linear, m)?)?;
    m.add_function(wrap_pyfunction!(pw_linear_lift, m)?)?;
    m.add_function(wrap_pyfunction!(rough_distance, m)?)?;
    m.add_function(wrap_pyfunction!(rough_distance_parts, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rde, m)?)?;
    m.add_function(wrap_pyfunction!(reference_solution, m)?)?;
    m.add_function(wrap_pyfunction!(wong_zakai_ode, m)?)?;
    m.add_function(wrap_pyfunction!(euler_maruyama, m)?)?;
    m.add_function(wrap_pyfunction!(stratonovich_integral, m)?)?;
    m.add_function(wrap_pyfunction!(rough_integral_of_field, m)?)?;
    m.add_function(wrap_pyfunction!(gnormal_exact, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_upper_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
