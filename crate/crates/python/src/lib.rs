//! Python bindings for the qrmax library (module `pyqrmax`).
//!
//! Points cross the boundary as lists of floats.

use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use qrmax::cli::{report_json, run_experiment, ExperimentConfig, Subcommand};
use qrmax::growth::{AnnulusGluing, GrowthSchedule};
use qrmax::map::polynomial_composite;
use qrmax::sets::ClosedSetOracle;
use qrmax::shrink::{PullbackSet, ShrinkMap, DEFAULT_R_MAX};
use qrmax::verify::{max_modulus, Budget};
use qrmax::zorich::{PowerMap, ZorichMap};
use qrmax::{Error, PointN};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn point(v: Vec<f64>) -> PyResult<PointN> {
    PointN::new(v).map_err(py_err)
}

fn point_of_dim(v: Vec<f64>, n: usize) -> PyResult<PointN> {
    if v.len() != n {
        return Err(py_err(Error::DimensionMismatch { expected: n, got: v.len() }));
    }
    point(v)
}

fn coords(p: PointN) -> Vec<f64> {
    p.into_coords()
}

#[pyclass(name = "ZorichMap", module = "pyqrmax", frozen)]
struct PyZorich {
    inner: ZorichMap,
}

#[pymethods]
impl PyZorich {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(Self { inner: ZorichMap::new(n).map_err(py_err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.eval(&point_of_dim(x, self.inner.dim())?)))
    }

    /// Canonical preimage of a non-zero point.
    fn invert(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.invert(&point_of_dim(y, self.inner.dim())?).map_err(py_err)?))
    }

    /// Lift of a polyline in the image, starting from a preimage of its first vertex.
    fn lift_path(&self, path: Vec<Vec<f64>>, start: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.dim();
        let path = path.into_iter().map(|p| point_of_dim(p, n)).collect::<PyResult<Vec<_>>>()?;
        let lifted = self.inner.lift_path(&path, &point_of_dim(start, n)?).map_err(py_err)?;
        Ok(lifted.into_iter().map(coords).collect())
    }
}

#[pyclass(name = "PowerMap", module = "pyqrmax", frozen)]
struct PyPower {
    inner: PowerMap,
}

#[pymethods]
impl PyPower {
    #[new]
    fn new(n: usize, degree: u32) -> PyResult<Self> {
        let z = ZorichMap::new(n).map_err(py_err)?;
        Ok(Self { inner: PowerMap::new(z, degree).map_err(py_err)? })
    }

    #[getter]
    fn topological_degree(&self) -> u64 {
        self.inner.topological_degree()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.eval(&point_of_dim(x, self.inner.dim())?)))
    }

    fn preimages(&self, y: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let pre = self.inner.preimages(&point_of_dim(y, self.inner.dim())?).map_err(py_err)?;
        Ok(pre.points.into_iter().map(coords).collect())
    }
}

#[pyclass(name = "TargetSet", module = "pyqrmax", frozen)]
struct PySet {
    inner: ClosedSetOracle,
}

#[pymethods]
impl PySet {
    #[staticmethod]
    fn full_space(n: usize) -> PyResult<Self> {
        Ok(Self { inner: ClosedSetOracle::full_space(n).map_err(py_err)? })
    }

    #[staticmethod]
    fn ray(direction: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: ClosedSetOracle::radial_ray(&direction).map_err(py_err)? })
    }

    #[staticmethod]
    fn spiral(omega: f64) -> PyResult<Self> {
        Ok(Self { inner: ClosedSetOracle::log_spiral(omega).map_err(py_err)? })
    }

    #[staticmethod]
    fn cone(axis: Vec<f64>, half_angle: f64) -> PyResult<Self> {
        Ok(Self { inner: ClosedSetOracle::cone(&axis, half_angle).map_err(py_err)? })
    }

    #[staticmethod]
    fn sphere(n: usize, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: ClosedSetOracle::sphere(n, radius).map_err(py_err)? })
    }

    #[staticmethod]
    fn point_cloud(points: Vec<Vec<f64>>, resolution: f64) -> PyResult<Self> {
        let pts = points.into_iter().map(point).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: ClosedSetOracle::point_cloud(pts, resolution).map_err(py_err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.distance(&point_of_dim(x, self.inner.dim())?))
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        Ok(self.inner.contains(&point_of_dim(x, self.inner.dim())?))
    }

    fn section(&self, r: f64, samples: usize) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.section(r, samples).map_err(py_err)?.points.into_iter().map(coords).collect())
    }
}

#[pyclass(name = "ShrinkMap", module = "pyqrmax", frozen)]
struct PyShrink {
    inner: ShrinkMap,
}

#[pymethods]
impl PyShrink {
    /// Analytic pullback of `target`, or a sampled one when `sample_radii` is given.
    #[new]
    #[pyo3(signature = (target, r_max = DEFAULT_R_MAX, sample_radii = None, samples_per_sphere = 64))]
    fn new(target: &PySet, r_max: f64, sample_radii: Option<Vec<f64>>, samples_per_sphere: usize) -> PyResult<Self> {
        let z = ZorichMap::new(target.inner.dim()).map_err(py_err)?;
        let pb = match sample_radii {
            None => PullbackSet::analytic(&target.inner, &z, r_max),
            Some(r) => PullbackSet::sampled(&target.inner, &z, &r, samples_per_sphere, r_max),
        }
        .map_err(py_err)?;
        Ok(Self { inner: ShrinkMap::new(pb) })
    }

    fn pullback_distance(&self, y: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.pullback().distance(&point_of_dim(y, self.inner.dim())?))
    }

    fn f(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.f(&point_of_dim(y, self.inner.dim())?)))
    }

    fn h1(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.h1(&point_of_dim(x, self.inner.dim())?)))
    }

    /// (M(r, P∘h₁), argmax samples) for the degree-d composite.
    #[pyo3(signature = (degree, r, samples = 2048, seed = 0))]
    fn max_modulus(&self, degree: u32, r: f64, samples: usize, seed: u64) -> PyResult<(f64, Vec<Vec<f64>>)> {
        let h = polynomial_composite(self.inner.clone(), degree).map_err(py_err)?;
        let res = max_modulus(h.as_ref(), r, &Budget { samples, seed, ..Budget::default() }).map_err(py_err)?;
        Ok((res.m_est, res.argmax.into_iter().map(coords).collect()))
    }
}

#[pyclass(name = "GrowthSchedule", module = "pyqrmax", frozen)]
struct PySchedule {
    inner: GrowthSchedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    fn new(radii: Vec<f64>, epsilon: f64) -> PyResult<Self> {
        Ok(Self { inner: GrowthSchedule::new(radii, epsilon).map_err(py_err)? })
    }

    /// r_n = exp(eⁿ), n = 1..=count.
    #[staticmethod]
    fn exp_exp(count: usize, epsilon: f64) -> PyResult<Self> {
        Ok(Self { inner: GrowthSchedule::exp_exp(count, epsilon).map_err(py_err)? })
    }

    #[getter]
    fn radii(&self) -> Vec<f64> {
        self.inner.radii().to_vec()
    }

    fn nu(&self, t: f64) -> PyResult<f64> {
        self.inner.nu(t).map_err(py_err)
    }

    fn psi(&self, r: f64) -> PyResult<f64> {
        self.inner.psi(r).map_err(py_err)
    }

    fn log_psi(&self, r: f64) -> PyResult<f64> {
        self.inner.log_psi(r).map_err(py_err)
    }

    fn in_exceptional(&self, r: f64) -> bool {
        self.inner.in_exceptional(r)
    }

    fn log_density(&self, big_r: f64) -> PyResult<f64> {
        self.inner.log_density(big_r).map_err(py_err)
    }
}

#[pyclass(name = "AnnulusGluing", module = "pyqrmax", frozen)]
struct PyGluing {
    inner: AnnulusGluing,
}

#[pymethods]
impl PyGluing {
    #[new]
    fn new(schedule: &PySchedule) -> PyResult<Self> {
        Ok(Self { inner: AnnulusGluing::new(schedule.inner.clone()).map_err(py_err)? })
    }

    fn eval(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(coords(self.inner.eval(&point_of_dim(z, 2)?)))
    }

    fn max_modulus(&self, r: f64) -> f64 {
        self.inner.max_modulus(r)
    }

    fn degree_at(&self, r: f64) -> usize {
        self.inner.degree_at(r)
    }

    fn blend_zeros(&self) -> Vec<Vec<f64>> {
        self.inner.blend_zeros().into_iter().map(coords).collect()
    }
}

/// p(d) = d/(1+d).
#[pyfunction]
fn p_of_distance(d: f64) -> PyResult<f64> {
    qrmax::shrink::p_of_distance(d).map_err(py_err)
}

/// Runs an experiment from a JSON config string; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (config_json, subcommand = "verify"))]
fn run(py: Python<'_>, config_json: &str, subcommand: &str) -> PyResult<String> {
    use clap::ValueEnum;
    let sub = Subcommand::from_str(subcommand, true).map_err(PyValueError::new_err)?;
    let config = ExperimentConfig::from_json_str(config_json).map_err(py_err)?;
    let report = py.detach(|| run_experiment(&config, sub, None)).map_err(py_err)?;
    report_json(&report).map_err(py_err)
}

#[pymodule]
fn pyqrmax(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyZorich>()?;
    m.add_class::<PyPower>()?;
    m.add_class::<PySet>()?;
    m.add_class::<PyShrink>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyGluing>()?;
    m.add_function(wrap_pyfunction!(p_of_distance, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
