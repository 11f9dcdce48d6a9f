//! Python bindings. Tensors cross the boundary as flat lists in the core
//! layout `i + n1 * (j + n2 * p)`; configuration is passed as keyword
//! arguments whose names match the JSON config keys.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use tlisd::eval::{self, SyntheticSpec};
use tlisd::prior::{self, PriorSummary};
use tlisd::{tensor, PriorConfig, SolverConfig};

fn to_py(e: tlisd::Error) -> PyErr {
    match e {
        tlisd::Error::Parameter(_) => PyValueError::new_err(e.to_string()),
        tlisd::Error::Io { .. } | tlisd::Error::Image { .. } | tlisd::Error::Format { .. } => {
            PyOSError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_of(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        Ok(Value::Null)
    } else if let Ok(b) = obj.extract::<bool>() {
        Ok(Value::Bool(b))
    } else if let Ok(i) = obj.extract::<i64>() {
        Ok(Value::from(i))
    } else if let Ok(f) = obj.extract::<f64>() {
        Ok(Value::from(f))
    } else if let Ok(s) = obj.extract::<String>() {
        Ok(Value::String(s))
    } else if let Ok(items) = obj.extract::<Vec<Bound<'_, PyAny>>>() {
        items.iter().map(json_of).collect::<PyResult<_>>().map(Value::Array)
    } else {
        Err(PyValueError::new_err(format!("unsupported config value {obj}")))
    }
}

/// Builds a config struct from keyword arguments, rejecting unknown keys.
fn config_from<T: serde::de::DeserializeOwned + Default>(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<T> {
    let Some(kw) = kwargs else { return Ok(T::default()) };
    let mut map = serde_json::Map::new();
    for (k, v) in kw.iter() {
        map.insert(k.extract::<String>()?, json_of(&v)?);
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Dense third-order tensor of `f64`.
#[pyclass(name = "Tensor3", module = "tlisd", skip_from_py_object)]
#[derive(Clone)]
pub struct PyTensor3 {
    pub inner: tlisd::Tensor3,
}

#[pymethods]
impl PyTensor3 {
    #[new]
    #[pyo3(signature = (n1, n2, n3, data=None))]
    fn new(n1: usize, n2: usize, n3: usize, data: Option<Vec<f64>>) -> PyResult<Self> {
        let inner = match data {
            Some(d) => tlisd::Tensor3::from_vec(n1, n2, n3, d),
            None => tlisd::Tensor3::zeros(n1, n2, n3),
        };
        Ok(Self { inner: inner.map_err(to_py)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: tensor::read_snapshot(path).map_err(to_py)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        tensor::write_snapshot(path, &self.inner).map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        self.inner.dims()
    }

    fn get(&self, i: usize, j: usize, p: usize) -> PyResult<f64> {
        let (n1, n2, n3) = self.inner.dims();
        if i >= n1 || j >= n2 || p >= n3 {
            return Err(PyValueError::new_err(format!("index ({i}, {j}, {p}) out of range for {:?}", (n1, n2, n3))));
        }
        Ok(self.inner.get(i, j, p))
    }

    /// All entries in storage order.
    fn to_list(&self) -> Vec<f64> {
        self.inner.as_slice().to_vec()
    }

    /// Frontal slice `p` as a flat column-major `n1 x n2` list.
    fn frontal(&self, p: usize) -> PyResult<Vec<f64>> {
        if p >= self.inner.n3() {
            return Err(PyValueError::new_err(format!("slice {p} out of range")));
        }
        Ok(self.inner.frontal(p).to_vec())
    }

    fn tensor_nuclear_norm(&self) -> f64 {
        tensor::tensor_nuclear_norm(&self.inner)
    }

    fn group_norm(&self) -> f64 {
        tensor::norm_l112(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Tensor3{:?}", self.inner.dims())
    }
}

/// RGB frames with optional ground-truth masks.
#[pyclass(name = "ImageSequence", module = "tlisd")]
pub struct PyImageSequence {
    pub inner: tlisd::ImageSequence,
}

#[pymethods]
impl PyImageSequence {
    #[staticmethod]
    fn load_dir(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: tlisd::ImageSequence::load_dir(path).map_err(to_py)? })
    }

    fn save_dir(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_dir(path).map_err(to_py)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    #[getter]
    fn has_ground_truth(&self) -> bool {
        self.inner.masks().is_some()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "Priors", module = "tlisd", get_all)]
pub struct PyPriors {
    tensor: Py<PyTensor3>,
    angles: Vec<f64>,
    supports: Vec<usize>,
    per_image_angle: Vec<f64>,
    degenerate_frames: Vec<usize>,
    /// The sidecar summary as a JSON string.
    summary_json: String,
}

#[pyclass(name = "Decomposition", module = "tlisd", get_all)]
pub struct PyDecomposition {
    low_rank: Py<PyTensor3>,
    sparse: Py<PyTensor3>,
    illumination: Py<PyTensor3>,
    converged: bool,
    iterations: usize,
    final_residual: f64,
    t_rank: usize,
    lambda1: f64,
    lambda2: f64,
    k: usize,
    /// One dict per iteration with the trace fields.
    trace: Py<PyList>,
}

/// Builds the prior tensor of a sequence. Keyword arguments override
/// prior settings such as `kmeans_k` or `merge_tolerance`.
#[pyfunction]
#[pyo3(signature = (sequence, **kwargs))]
fn build_priors(py: Python<'_>, sequence: &PyImageSequence, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<PyPriors> {
    let cfg: PriorConfig = config_from(kwargs)?;
    let seq = &sequence.inner;
    let priors = py.detach(|| prior::build_priors(seq, &cfg)).map_err(to_py)?;
    let summary = PriorSummary::new(seq, &priors, &cfg);
    let d = &priors.directions;
    Ok(PyPriors {
        angles: d.angles.clone(),
        supports: d.supports.clone(),
        per_image_angle: d.per_image_angle.clone(),
        degenerate_frames: priors.degenerate_frames.clone(),
        summary_json: serde_json::to_string(&summary).map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
        tensor: Py::new(py, PyTensor3 { inner: priors.tensor })?,
    })
}

/// Splits `tensor` into low-rank, sparse and illumination parts. Keyword
/// arguments override solver settings (`variant`, `lambda2`, `max_iters`...).
#[pyfunction]
#[pyo3(signature = (tensor, **kwargs))]
fn decompose(py: Python<'_>, tensor: &PyTensor3, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<PyDecomposition> {
    let cfg: SolverConfig = config_from(kwargs)?;
    let d = &tensor.inner;
    let res = py.detach(|| tlisd::decompose(d, &cfg)).map_err(to_py)?;
    let trace = PyList::empty(py);
    for r in &res.trace {
        let row = PyDict::new(py);
        row.set_item("iter", r.iter)?;
        row.set_item("residual", r.residual)?;
        row.set_item("t_rank", r.t_rank)?;
        row.set_item("objective", r.objective)?;
        row.set_item("mu", r.mu)?;
        row.set_item("c_norm", r.c_norm)?;
        trace.append(row)?;
    }
    Ok(PyDecomposition {
        converged: res.converged,
        iterations: res.iterations,
        final_residual: res.final_residual(),
        t_rank: res.final_t_rank(),
        lambda1: res.resolved.lambda1,
        lambda2: res.resolved.lambda2,
        k: res.resolved.k,
        trace: trace.unbind(),
        low_rank: Py::new(py, PyTensor3 { inner: res.low_rank })?,
        sparse: Py::new(py, PyTensor3 { inner: res.sparse })?,
        illumination: Py::new(py, PyTensor3 { inner: res.illumination })?,
    })
}

/// Otsu masks of the first frontal slice of `sparse`: a list of row-major
/// byte strings (0 or 255) plus the threshold.
#[pyfunction]
fn extract_masks(sparse: &PyTensor3, width: u32, height: u32) -> PyResult<(Vec<Vec<u8>>, f64)> {
    let set = eval::extract_masks(&sparse.inner, width, height).map_err(to_py)?;
    Ok((set.masks.into_iter().map(|m| m.into_raw()).collect(), set.threshold))
}

/// Scores `sparse` against the sequence's ground truth and returns the
/// pooled precision, recall and F-measure.
#[pyfunction]
fn score<'py>(py: Python<'py>, sequence: &PyImageSequence, sparse: &PyTensor3) -> PyResult<Bound<'py, PyDict>> {
    let (_, report) = eval::score_sequence(&sequence.inner, &sparse.inner, 0.0).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("precision", report.aggregate.precision)?;
    out.set_item("recall", report.aggregate.recall)?;
    out.set_item("f", report.aggregate.f)?;
    out.set_item("threshold", report.threshold)?;
    let frames: Vec<f64> = report.per_frame.iter().map(|f| f.scores.f).collect();
    out.set_item("per_frame_f", frames)?;
    Ok(out)
}

/// Synthetic sequence with planted objects and shadows. Keyword arguments
/// override generator settings (`width`, `frames`, `seed`...).
#[pyfunction]
#[pyo3(signature = (**kwargs))]
fn synthetic(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<PyImageSequence> {
    let spec: SyntheticSpec = config_from(kwargs)?;
    let syn = eval::generate_synthetic(&spec).map_err(to_py)?;
    Ok(PyImageSequence { inner: syn.sequence })
}

/// `argmin_x gamma * ||x||_k^2 + 1/2 ||x - v||^2` with the k-support norm.
#[pyfunction]
fn prox_ksupport_sq(v: Vec<f64>, k: usize, gamma: f64) -> PyResult<Vec<f64>> {
    tlisd::prox::prox_ksupport_sq(&v, k, gamma).map_err(to_py)
}

#[pyfunction]
fn ksupport_norm(v: Vec<f64>, k: usize) -> PyResult<f64> {
    tensor::ksupport_norm(&v, k).map_err(to_py)
}

/// Singular value thresholding in the Fourier domain; returns the result
/// and its t-rank.
#[pyfunction]
fn prox_tnn(a: &PyTensor3, tau: f64) -> PyResult<(PyTensor3, usize)> {
    let r = tlisd::prox::prox_tnn(&a.inner, tau).map_err(to_py)?;
    Ok((PyTensor3 { inner: r.tensor }, r.t_rank))
}

#[pyfunction]
fn prox_group(v: &PyTensor3, tau: f64) -> PyResult<PyTensor3> {
    Ok(PyTensor3 { inner: tlisd::prox::prox_group_l112(&v.inner, tau).map_err(to_py)? })
}

#[pymodule]
#[pyo3(name = "tlisd")]
fn tlisd_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor3>()?;
    m.add_class::<PyImageSequence>()?;
    m.add_class::<PyPriors>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(build_priors, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(extract_masks, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(prox_ksupport_sq, m)?)?;
    m.add_function(wrap_pyfunction!(ksupport_norm, m)?)?;
    m.add_function(wrap_pyfunction!(prox_tnn, m)?)?;
    m.add_function(wrap_pyfunction!(prox_group, m)?)?;
    Ok(())
}
