//! Python bindings: channels, boundary systems, the feedback link, the
//! design checker and the finite-difference cross-check, mirroring the Rust
//! API one to one. Frequencies are rad/s, lengths um, concentrations uM.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mcloop::analysis::{self, CutoffTarget, DesignSpec};
use mcloop::boundary::{LigandReceptorParams, StateSpaceLTI, TransmembraneParams};
use mcloop::diffusion::{ComplexFreq, DiffusionChannel, End};
use mcloop::fdm::{self, DriveSpec, SimConfig};
use mcloop::feedback::Interconnection;

fn err(e: mcloop::Error) -> PyErr {
    match e {
        mcloop::Error::InvalidParam(_)
        | mcloop::Error::Config(_)
        | mcloop::Error::ZeroFrequency => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn jomega(omega: f64) -> PyResult<ComplexFreq> {
    ComplexFreq::from_omega(omega).map_err(err)
}

fn matrix_to_py(m: [[Complex64; 2]; 2]) -> Vec<Vec<Complex64>> {
    vec![vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]
}

/// 1-D diffusive medium with a boundary kind at each end.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Channel {
    inner: DiffusionChannel,
}

#[pymethods]
impl Channel {
    #[new]
    #[pyo3(signature = (mu, distance, boundaries = "dn"))]
    fn new(mu: f64, distance: f64, boundaries: &str) -> PyResult<Self> {
        Ok(Self {
            inner: DiffusionChannel::with_kinds(mu, distance, boundaries).map_err(err)?,
        })
    }

    /// 2x2 transfer matrix at `s = j omega` as nested lists of complex.
    fn transfer_matrix(&self, omega: f64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_to_py(
            self.inner.transfer_matrix(jomega(omega)?).map_err(err)?,
        ))
    }

    /// Gain of the crossing entry (far-end response), dB.
    fn crossing_gain_db(&self, omega: f64) -> PyResult<f64> {
        let m = self.inner.transfer_matrix(jomega(omega)?).map_err(err)?;
        Ok(20.0 * m[1][0].norm().log10())
    }

    /// `mu / L^2`, the frequency that normalizes the channel gains.
    #[getter]
    fn frequency_scale(&self) -> f64 {
        self.inner.frequency_scale()
    }

    /// Cut-off of the crossing gain. `target` is "absolute" (-6 dB) or
    /// "from-steady"; returns a dict with omega_c, omega_hat and the levels.
    #[pyo3(signature = (target = "absolute"))]
    fn cutoff<'py>(&self, py: Python<'py>, target: &str) -> PyResult<Bound<'py, PyDict>> {
        let target = match target {
            "absolute" => CutoffTarget::Minus6DbAbsolute,
            "from-steady" | "from_steady" => CutoffTarget::Minus6DbFromSteady,
            other => {
                return Err(PyValueError::new_err(format!(
                    "target must be 'absolute' or 'from-steady', got {other:?}"
                )))
            }
        };
        let res = analysis::crossing_cutoff(&self.inner, target).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("omega_c_rad_s", res.omega_c)?;
        dict.set_item("omega_hat", res.omega_hat)?;
        dict.set_item("target_db", res.target_db)?;
        dict.set_item("achieved_db", res.achieved_db)?;
        dict.set_item("reference_db", res.reference_db)?;
        dict.set_item("iterations", res.iterations)?;
        Ok(dict)
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(mu={}, distance={}, boundaries='{}')",
            self.inner.mu(),
            self.inner.length(),
            self.inner.kinds()
        )
    }
}

/// LTI boundary system coupling the medium to a robot.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct BoundarySystem {
    inner: StateSpaceLTI,
}

#[pymethods]
impl BoundarySystem {
    /// Passive transmembrane transport (Dirichlet side).
    #[staticmethod]
    #[pyo3(signature = (k, mu, dr = 1.0))]
    fn transmembrane(k: f64, mu: f64, dr: f64) -> PyResult<Self> {
        Ok(Self {
            inner: StateSpaceLTI::transmembrane(&TransmembraneParams { k, mu, dr }).map_err(err)?,
        })
    }

    /// Ligand-receptor reception (Neumann side).
    #[staticmethod]
    fn ligand_receptor(
        k_on: f64,
        k_off: f64,
        k_re: f64,
        receptors: f64,
        mu: f64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: StateSpaceLTI::ligand_receptor(&LigandReceptorParams {
                k_on,
                k_off,
                k_re,
                receptors,
                mu,
            })
            .map_err(err)?,
        })
    }

    /// 2x2 transfer matrix `C (sI - A)^{-1} B + D` at `s = j omega`.
    fn transfer(&self, omega: f64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_to_py(
            self.inner.transfer(jomega(omega)?).map_err(err)?,
        ))
    }
}

/// The full feedback interconnection: channel plus both boundary systems.
#[pyclass]
struct Link {
    inner: Interconnection,
}

#[pymethods]
impl Link {
    #[new]
    fn new(channel: Channel, h0: BoundarySystem, hl: BoundarySystem) -> PyResult<Self> {
        Ok(Self {
            inner: Interconnection::new(channel.inner, h0.inner, hl.inner).map_err(err)?,
        })
    }

    /// End-to-end channel transfer function from the sender concentration to
    /// the far-end concentration.
    fn gamma_0l(&self, omega: f64) -> PyResult<Complex64> {
        Ok(self.inner.gammas(jomega(omega)?).map_err(err)?.0)
    }

    fn gamma_l0(&self, omega: f64) -> PyResult<Complex64> {
        Ok(self.inner.gammas(jomega(omega)?).map_err(err)?.1)
    }

    /// Self-interference at the sending (r = 0) boundary.
    fn s0(&self, omega: f64) -> PyResult<Complex64> {
        self.inner
            .self_interference(jomega(omega)?, End::Zero)
            .map_err(err)
    }

    /// Self-interference at the receiving (r = L) boundary.
    fn sl(&self, omega: f64) -> PyResult<Complex64> {
        self.inner
            .self_interference(jomega(omega)?, End::L)
            .map_err(err)
    }

    /// Robot-to-robot response from the exact loop solve.
    fn m0l_exact(&self, omega: f64) -> PyResult<Complex64> {
        self.inner.m0l_exact(jomega(omega)?).map_err(err)
    }

    /// Separated approximation `HL_21 * Gamma_0L`.
    fn m0l_approx(&self, omega: f64) -> PyResult<Complex64> {
        self.inner.m0l_approx(jomega(omega)?).map_err(err)
    }

    /// Cross-talk: the receiver's response to its own robot input.
    fn mll_exact(&self, omega: f64) -> PyResult<Complex64> {
        self.inner.mll_exact(jomega(omega)?).map_err(err)
    }

    /// `20 log10 |Gamma_0L|` over a frequency list.
    fn sweep_gamma_db(&self, omegas: Vec<f64>) -> PyResult<Vec<f64>> {
        omegas
            .into_iter()
            .map(|w| {
                let (g, _) = self.inner.gammas(jomega(w)?).map_err(err)?;
                Ok(20.0 * g.norm().log10())
            })
            .collect()
    }
}

/// Piecewise magnitude approximation of the tanh gain factor.
#[pyfunction]
fn tanh_gain_approx(omega: f64, distance: f64, mu: f64) -> f64 {
    analysis::tanh_gain_approx(omega, distance, mu)
}

/// Approximate peak self-interference loop gain of a transmembrane sender.
#[pyfunction]
#[pyo3(signature = (k, mu, distance, dr = 1.0))]
fn alpha_max_gain(k: f64, mu: f64, distance: f64, dr: f64) -> f64 {
    analysis::alpha_max_gain(k, mu, distance, dr)
}

/// Check the four design conditions for a control band `[0, band_hi]`.
/// Returns a dict with per-condition verdicts and the derived frequencies.
#[pyfunction]
#[pyo3(signature = (band_hi, l_min, l_max, mu, k, k_on, k_off, k_re, receptors, dr = 1.0, margin = 10.0))]
#[allow(clippy::too_many_arguments)]
fn design_check<'py>(
    py: Python<'py>,
    band_hi: f64,
    l_min: f64,
    l_max: f64,
    mu: f64,
    k: f64,
    k_on: f64,
    k_off: f64,
    k_re: f64,
    receptors: f64,
    dr: f64,
    margin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = DesignSpec {
        band_hi,
        l_min,
        l_max,
        dr,
        mu,
        k,
        k_on,
        k_off,
        k_re,
        receptors,
        margin,
    };
    let report = analysis::design_check(&spec).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("all_pass", report.all_pass)?;
    dict.set_item("omega_d_rad_s", report.omega_d)?;
    dict.set_item("omega_h0_rad_s", report.omega_h0)?;
    dict.set_item("omega_m_rad_s", report.omega_m)?;
    dict.set_item("alpha", report.alpha)?;
    let conds = PyDict::new(py);
    for c in &report.conditions {
        let entry = PyDict::new(py);
        entry.set_item("pass", c.pass)?;
        entry.set_item("threshold", c.threshold)?;
        entry.set_item("actual", c.actual)?;
        entry.set_item("detail", &c.detail)?;
        conds.set_item(c.name, entry)?;
    }
    dict.set_item("conditions", conds)?;
    Ok(dict)
}

/// Run the finite-difference channel simulation and return the settled
/// output gain in dB (far-end amplitude over drive amplitude).
#[pyfunction]
#[pyo3(signature = (mu, distance, k, k_on, k_off, k_re, receptors, omega, amplitude = 1.0, dr = 1.0, cfl = 0.25, duration = None))]
#[allow(clippy::too_many_arguments)]
fn empirical_gain_db(
    mu: f64,
    distance: f64,
    k: f64,
    k_on: f64,
    k_off: f64,
    k_re: f64,
    receptors: f64,
    omega: f64,
    amplitude: f64,
    dr: f64,
    cfl: f64,
    duration: Option<f64>,
) -> PyResult<f64> {
    let channel = DiffusionChannel::with_kinds(mu, distance, "dn").map_err(err)?;
    let mut cfg = SimConfig::standard(
        channel,
        TransmembraneParams { k, mu, dr },
        LigandReceptorParams {
            k_on,
            k_off,
            k_re,
            receptors,
            mu,
        },
        DriveSpec { amplitude, omega },
    );
    cfg.cfl = cfl;
    cfg.duration = duration;
    let res = fdm::simulate(&cfg).map_err(err)?;
    fdm::empirical_gain(&res, omega).map_err(err)
}

#[pymodule]
fn mcloop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Channel>()?;
    m.add_class::<BoundarySystem>()?;
    m.add_class::<Link>()?;
    m.add_function(wrap_pyfunction!(tanh_gain_approx, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_max_gain, m)?)?;
    m.add_function(wrap_pyfunction!(design_check, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_gain_db, m)?)?;
    Ok(())
}
