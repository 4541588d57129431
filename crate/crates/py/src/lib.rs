//! Python bindings: `import siet`.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use siet_core::analytic::{self, EehQuery, InterferenceTransform};
use siet_core::feasibility::{self, FeasibilityConstraints, SweepTable};
use siet_core::montecarlo::{self, EstimateSource, SimConfig};
use siet_core::numerics::InverseLaplaceSpec;

create_exception!(siet, NumericalError, PyArithmeticError, "A numerical kernel failed to converge.");

fn py_err(e: siet_core::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for siet_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

impl<T> IntoPy<T> for Result<T, siet_core::ParamError> {
    fn py(self) -> PyResult<T> {
        self.map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Network and receiver parameters. Powers in W, density in BS/m^2.
#[pyclass(name = "SystemParams", module = "siet", from_py_object)]
#[derive(Clone, Copy)]
struct PySystemParams {
    inner: siet_core::SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (lam=1e-2, power=1.0, alpha=4.0, noise=0.0, rho=0.1, epsilon=0.3))]
    fn new(lam: f64, power: f64, alpha: f64, noise: f64, rho: f64, epsilon: f64) -> PyResult<Self> {
        let inner = siet_core::SystemParams::new(lam, power, alpha, noise, rho, epsilon).py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }
    #[getter]
    fn power(&self) -> f64 {
        self.inner.power
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn noise(&self) -> f64 {
        self.inner.noise
    }
    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    /// Copy with some fields replaced.
    #[pyo3(signature = (lam=None, power=None, alpha=None, noise=None, rho=None, epsilon=None))]
    fn replace(
        &self,
        lam: Option<f64>,
        power: Option<f64>,
        alpha: Option<f64>,
        noise: Option<f64>,
        rho: Option<f64>,
        epsilon: Option<f64>,
    ) -> PyResult<Self> {
        let p = self.inner;
        Self::new(
            lam.unwrap_or(p.lambda),
            power.unwrap_or(p.power),
            alpha.unwrap_or(p.alpha),
            noise.unwrap_or(p.noise),
            rho.unwrap_or(p.rho),
            epsilon.unwrap_or(p.epsilon),
        )
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!(
            "SystemParams(lam={}, power={}, alpha={}, noise={}, rho={}, epsilon={})",
            p.lambda, p.power, p.alpha, p.noise, p.rho, p.epsilon
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "ProbabilityEstimate", module = "siet", frozen, skip_from_py_object)]
struct PyEstimate {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    ci_halfwidth: f64,
    #[pyo3(get)]
    trials: u64,
    /// "monte_carlo" or "analytic".
    #[pyo3(get)]
    source: &'static str,
}

#[pymethods]
impl PyEstimate {
    fn agrees_with(&self, reference: f64, factor: f64) -> bool {
        (self.value - reference).abs() <= factor * self.ci_halfwidth
    }

    fn __repr__(&self) -> String {
        format!(
            "ProbabilityEstimate(value={}, ci_halfwidth={}, trials={}, source='{}')",
            self.value, self.ci_halfwidth, self.trials, self.source
        )
    }
}

impl From<montecarlo::ProbabilityEstimate> for PyEstimate {
    fn from(e: montecarlo::ProbabilityEstimate) -> Self {
        Self {
            value: e.value,
            ci_halfwidth: e.ci_halfwidth,
            trials: e.trials,
            source: match e.source {
                EstimateSource::MonteCarlo => "monte_carlo",
                EstimateSource::Analytic => "analytic",
            },
        }
    }
}

fn sim_config(trials: u64, seed: u64, window_radius: Option<f64>, tail_tolerance: Option<f64>) -> PyResult<SimConfig> {
    let cfg = SimConfig {
        window_radius,
        tail_tolerance,
        ..SimConfig::new(trials, seed)
    };
    cfg.validate().py()
}

#[pyfunction]
fn coverage_probability(params: PySystemParams, t: f64) -> PyResult<f64> {
    analytic::coverage_probability(&params.inner, t).py()
}

#[pyfunction]
fn coverage_probability_closed_alpha4(t: f64) -> PyResult<f64> {
    analytic::coverage_probability_closed_alpha4(t).py()
}

/// Laplace transform of the interference beyond `r`, at `s`.
#[pyfunction]
fn laplace_interference(params: PySystemParams, r: f64, s: f64) -> PyResult<f64> {
    let t = InterferenceTransform::new(params.inner, r).py()?;
    analytic::laplace_interference(&t, s).py()
}

/// CDF of the total interference at the origin.
#[pyfunction]
fn interference_cdf(params: PySystemParams, x: f64) -> PyResult<f64> {
    analytic::interference_cdf_at_origin(&params.inner, x, &InverseLaplaceSpec::default()).py()
}

/// Harvesting probability. `method` is "inversion" (any α) or "closed"
/// (α = 4 closed form, noise ignored).
#[pyfunction]
#[pyo3(signature = (params, theta, method="inversion"))]
fn eeh_probability(params: PySystemParams, theta: f64, method: &str) -> PyResult<f64> {
    let q = EehQuery::new(params.inner, theta).py()?;
    match method {
        "inversion" => analytic::eeh_probability(&q, &InverseLaplaceSpec::default()).py(),
        "closed" => Ok(analytic::eeh_probability_closed_alpha4(&q)),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

#[pyfunction]
#[pyo3(signature = (params, t, trials, seed, window_radius=None, tail_tolerance=None))]
fn estimate_coverage(
    py: Python<'_>,
    params: PySystemParams,
    t: f64,
    trials: u64,
    seed: u64,
    window_radius: Option<f64>,
    tail_tolerance: Option<f64>,
) -> PyResult<PyEstimate> {
    let cfg = sim_config(trials, seed, window_radius, tail_tolerance)?;
    let e = py.detach(|| montecarlo::estimate_coverage(&params.inner, t, &cfg)).py()?;
    Ok(e.into())
}

#[pyfunction]
#[pyo3(signature = (params, theta, trials, seed, window_radius=None, tail_tolerance=None))]
fn estimate_eeh(
    py: Python<'_>,
    params: PySystemParams,
    theta: f64,
    trials: u64,
    seed: u64,
    window_radius: Option<f64>,
    tail_tolerance: Option<f64>,
) -> PyResult<PyEstimate> {
    let cfg = sim_config(trials, seed, window_radius, tail_tolerance)?;
    let e = py.detach(|| montecarlo::estimate_eeh(&params.inner, theta, &cfg)).py()?;
    Ok(e.into())
}

#[pyfunction]
#[pyo3(signature = (params, levels, trials, seed, window_radius=None, tail_tolerance=None))]
fn estimate_interference_ccdf(
    py: Python<'_>,
    params: PySystemParams,
    levels: Vec<f64>,
    trials: u64,
    seed: u64,
    window_radius: Option<f64>,
    tail_tolerance: Option<f64>,
) -> PyResult<Vec<PyEstimate>> {
    let cfg = sim_config(trials, seed, window_radius, tail_tolerance)?;
    let e = py
        .detach(|| montecarlo::estimate_interference_ccdf(&params.inner, &levels, &cfg))
        .py()?;
    Ok(e.into_iter().map(Into::into).collect())
}

/// `(distance, fade)` pairs of one realization.
#[pyfunction]
#[pyo3(signature = (params, seed, trial_index, window_radius=None))]
fn sample_ppp(params: PySystemParams, seed: u64, trial_index: u64, window_radius: Option<f64>) -> PyResult<Vec<(f64, f64)>> {
    let cfg = sim_config(1, seed, window_radius, None)?;
    let r = montecarlo::sample_ppp(&params.inner, &cfg, trial_index).py()?;
    Ok(r.points.iter().map(|p| (p.distance, p.fade)).collect())
}

fn budget(maintenance_power: f64, zeta: f64, eta: f64) -> PyResult<feasibility::EnergyBudget> {
    feasibility::EnergyBudget::new(maintenance_power, zeta, eta).py()
}

/// `Θ = ζ p_m / η`.
#[pyfunction]
#[pyo3(signature = (zeta, eta, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn harvest_threshold(zeta: f64, eta: f64, maintenance_power: f64) -> PyResult<f64> {
    Ok(budget(maintenance_power, zeta, eta)?.harvest_threshold())
}

/// `(density, eeh)` maximizing the harvesting probability under a density cap.
#[pyfunction]
#[pyo3(signature = (zeta, eta, density_max, rho=0.1, epsilon=0.3, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn solve_p3(zeta: f64, eta: f64, density_max: f64, rho: f64, epsilon: f64, maintenance_power: f64) -> PyResult<(f64, f64)> {
    let s = feasibility::solve_p3(&budget(maintenance_power, zeta, eta)?, density_max, rho, epsilon).py()?;
    Ok((s.density, s.eeh))
}

/// `(density, power, eeh)` under density and power caps.
#[pyfunction]
#[pyo3(signature = (theta, density_max, power_max, rho=0.1, epsilon=0.3))]
fn solve_p2(theta: f64, density_max: f64, power_max: f64, rho: f64, epsilon: f64) -> PyResult<(f64, f64, f64)> {
    let c = FeasibilityConstraints::new(0.0, power_max, density_max).py()?;
    let s = feasibility::solve_p2(theta, &c, rho, epsilon).py()?;
    Ok((s.density, s.power, s.eeh))
}

#[pyfunction]
#[pyo3(signature = (target, zeta, eta, rho=0.1, epsilon=0.3, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn required_density(target: f64, zeta: f64, eta: f64, rho: f64, epsilon: f64, maintenance_power: f64) -> PyResult<f64> {
    feasibility::required_density(target, &budget(maintenance_power, zeta, eta)?, rho, epsilon).py()
}

/// Supply-level report as a list of dicts.
#[pyfunction]
#[pyo3(signature = (eta, density_max, target=feasibility::PRACTICAL_EEH, rho=0.1, epsilon=0.3, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn assess_levels<'py>(
    py: Python<'py>,
    eta: f64,
    density_max: f64,
    target: f64,
    rho: f64,
    epsilon: f64,
    maintenance_power: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let levels = feasibility::assess_levels(maintenance_power, eta, density_max, target, rho, epsilon).py()?;
    levels
        .iter()
        .map(|a| {
            let d = PyDict::new(py);
            d.set_item("level", a.level.name())?;
            d.set_item("zeta", a.zeta)?;
            d.set_item("theta", a.theta)?;
            d.set_item("achievable_eeh", a.achievable_eeh)?;
            d.set_item("required_density", a.required_density)?;
            d.set_item("feasible", a.feasible)?;
            Ok(d)
        })
        .collect()
}

fn table_dict<'py>(py: Python<'py>, t: SweepTable) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("axis_name", &t.axis_name)?;
    d.set_item("axis", t.axis_values.clone())?;
    let series = PyDict::new(py);
    for s in &t.series {
        series.set_item(&s.name, s.values.clone())?;
    }
    d.set_item("series", series)?;
    d.set_item("csv", t.to_csv())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (grid, rhos, epsilon=0.3, theta=1e-3))]
fn sweep_fig2<'py>(py: Python<'py>, grid: Vec<f64>, rhos: Vec<f64>, epsilon: f64, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    table_dict(py, feasibility::sweep_fig2(&grid, &rhos, epsilon, theta).py()?)
}

#[pyfunction]
#[pyo3(signature = (zeta_grid, density_max_list, eta_list, rho=0.1, epsilon=0.3, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn sweep_fig3<'py>(
    py: Python<'py>,
    zeta_grid: Vec<f64>,
    density_max_list: Vec<f64>,
    eta_list: Vec<f64>,
    rho: f64,
    epsilon: f64,
    maintenance_power: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = feasibility::sweep_fig3(&zeta_grid, &density_max_list, &eta_list, rho, epsilon, maintenance_power).py()?;
    table_dict(py, t)
}

#[pyfunction]
#[pyo3(signature = (zeta_grid, targets, eta, rho=0.1, epsilon=0.3, maintenance_power=feasibility::DEFAULT_MAINTENANCE_POWER))]
fn sweep_fig4<'py>(
    py: Python<'py>,
    zeta_grid: Vec<f64>,
    targets: Vec<f64>,
    eta: f64,
    rho: f64,
    epsilon: f64,
    maintenance_power: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = feasibility::sweep_fig4(&zeta_grid, &targets, eta, rho, epsilon, maintenance_power).py()?;
    table_dict(py, t)
}

#[pymodule]
fn siet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyEstimate>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(coverage_probability, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_probability_closed_alpha4, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_interference, m)?)?;
    m.add_function(wrap_pyfunction!(interference_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(eeh_probability, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_eeh, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_interference_ccdf, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ppp, m)?)?;
    m.add_function(wrap_pyfunction!(harvest_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(solve_p3, m)?)?;
    m.add_function(wrap_pyfunction!(solve_p2, m)?)?;
    m.add_function(wrap_pyfunction!(required_density, m)?)?;
    m.add_function(wrap_pyfunction!(assess_levels, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_fig2, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_fig3, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_fig4, m)?)?;
    Ok(())
}
