//! Explicit finite-difference solver of the coupled membrane/diffusion/
//! receptor dynamics, used as an independent time-domain oracle for the
//! frequency-domain gains.
//!
//! The medium `[0, L]` is split into `n_cells` cells of width
//! `dx = L/n_cells`, each carrying its average concentration. Cell 0 *is*
//! the outer transmembrane compartment (a well-mixed layer of width `dx`),
//! exchanging with the robot at rate `k` and with the neighbor cell through
//! the face flux:
//!
//! ```text
//! dc0/dt = k (c_drive(t) - c0) + mu (c1 - c0)/dx^2
//! ```
//!
//! Interior cells advance by the central second difference of the face
//! fluxes. The last cell carries the adsorbed-receptor state `c_A`,
//!
//! ```text
//! dc_A/dt = R k_on z_L - k_off c_A,
//! ```
//!
//! imposed through the gradient `dc/dr|_L = (R k_on z_L - k_off c_A)/mu` at
//! the `r = L` face (a ghost-cell condition) — the same orientation as the
//! state-space boundary realization, so the time-domain loop matches the
//! frequency-domain one. `z_L` is the last cell's concentration and
//! `y_L = k_re c_A` is the received signal.
//!
//! A boundary left as `None` is a sealed (zero-flux) wall; with both ends
//! sealed the scheme conserves the discrete mass `dx * sum(c)` exactly,
//! which the tests use as a self-check.
//!
//! Time stepping is forward Euler with `dt = cfl dx^2 / mu`; runs whose
//! amplitudes exceed a million times the input are aborted as unstable.

use crate::boundary::{LigandReceptorParams, TransmembraneParams};
use crate::diffusion::{BoundaryKind, DiffusionChannel, End};
use crate::{Error, Result};

/// Cosine drive `amplitude * cos(omega t)` applied as the robot-side
/// concentration at the transmembrane end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// uM.
    pub amplitude: f64,
    /// rad/s.
    pub omega: f64,
}

/// Optional initial concentration field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialProfile {
    /// `c(0, r) = 0`, the standard starting state.
    Zero,
    /// A Gaussian bump, for relaxation and conservation experiments.
    GaussianPulse {
        center: f64,
        width: f64,
        amplitude: f64,
    },
}

/// Full description of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub channel: DiffusionChannel,
    /// Transmembrane boundary at r = 0; `None` seals the end.
    pub membrane: Option<TransmembraneParams>,
    /// Ligand-receptor boundary at r = L; `None` seals the end.
    pub receptor: Option<LigandReceptorParams>,
    /// Cell count across `[0, L]`; at least 51.
    pub n_cells: usize,
    /// Diffusion number `mu dt / dx^2`; explicit stability needs <= 1/2.
    pub cfl: f64,
    pub drive: DriveSpec,
    /// Seconds; defaults to `max(8 periods, 5 L^2/mu)` so the diffusive
    /// transient dies and the gain fit has settled cycles to work with.
    pub duration: Option<f64>,
    /// Steps between recorded samples; defaults to roughly 512 samples per
    /// drive period.
    pub record_stride: Option<usize>,
    pub initial: InitialProfile,
}

impl SimConfig {
    /// Standard transmembrane-to-receptor run used throughout: cells of one
    /// boundary-layer thickness.
    pub fn standard(
        channel: DiffusionChannel,
        membrane: TransmembraneParams,
        receptor: LigandReceptorParams,
        drive: DriveSpec,
    ) -> Self {
        let n_cells = (channel.length() / membrane.dr).round() as usize;
        Self {
            channel,
            membrane: Some(membrane),
            receptor: Some(receptor),
            n_cells: n_cells.max(51),
            cfl: 0.25,
            drive,
            duration: None,
            record_stride: None,
            initial: InitialProfile::Zero,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_cells < 51 {
            return Err(Error::Config(format!(
                "n_cells must be at least 51, got {}",
                self.n_cells
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!(
                "cfl must lie in (0, 0.5], got {}",
                self.cfl
            )));
        }
        if let Some(m) = &self.membrane {
            m.validate().map_err(|e| Error::Config(e.to_string()))?;
            if self.channel.boundary(End::Zero) != BoundaryKind::Dirichlet {
                return Err(Error::Config(
                    "a transmembrane boundary needs a Dirichlet channel end at r = 0".into(),
                ));
            }
        }
        if let Some(r) = &self.receptor {
            r.validate().map_err(|e| Error::Config(e.to_string()))?;
            if self.channel.boundary(End::L) != BoundaryKind::Neumann {
                return Err(Error::Config(
                    "a ligand-receptor boundary needs a Neumann channel end at r = L".into(),
                ));
            }
        }
        if self.drive.amplitude != 0.0 {
            if self.membrane.is_none() {
                return Err(Error::Config(
                    "a nonzero drive needs the transmembrane boundary to enter through".into(),
                ));
            }
            if self.drive.omega <= 0.0 || self.drive.omega.is_nan() {
                return Err(Error::Config(format!(
                    "drive omega must be positive, got {}",
                    self.drive.omega
                )));
            }
        }
        if let Some(d) = self.duration {
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Config(format!("duration must be positive, got {d}")));
            }
        }
        if let Some(0) = self.record_stride {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        if let InitialProfile::GaussianPulse { width, .. } = self.initial {
            if width <= 0.0 || width.is_nan() {
                return Err(Error::Config("pulse width must be positive".into()));
            }
        }
        Ok(())
    }

    fn default_duration(&self) -> f64 {
        let diffusive = 5.0 * self.channel.length().powi(2) / self.channel.mu();
        if self.drive.amplitude != 0.0 {
            let period = 2.0 * std::f64::consts::PI / self.drive.omega;
            (8.0 * period).max(diffusive)
        } else {
            diffusive
        }
    }
}

/// Recorded traces of one run. Snapshots hold a handful of full fields for
/// inspection; the per-sample traces carry the signals of interest.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub times: Vec<f64>,
    /// Outer compartment concentration (cell 0).
    pub c_out: Vec<f64>,
    /// Concentration at the far end, `z_L = c(t, L)`.
    pub z_l: Vec<f64>,
    /// Adsorbed concentration on the receptors.
    pub c_a: Vec<f64>,
    /// Received signal `y_L = k_re c_A`.
    pub y_l: Vec<f64>,
    /// Discrete mass of the field.
    pub mass: Vec<f64>,
    pub field_snapshots: Vec<(f64, Vec<f64>)>,
    pub drive: DriveSpec,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
}

const SNAPSHOT_COUNT: usize = 9;
const BLOWUP_FACTOR: f64 = 1e6;
/// Tolerated undershoot relative to the drive amplitude; central differences
/// ring slightly around sharp transients.
const NEGATIVE_TOL: f64 = 1e-9;

/// Runs the explicit scheme described in the module docs.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;

    let n = cfg.n_cells;
    let l = cfg.channel.length();
    let mu = cfg.channel.mu();
    let dx = l / n as f64;
    let dt = cfg.cfl * dx * dx / mu;
    let duration = cfg.duration.unwrap_or_else(|| cfg.default_duration());
    let steps = (duration / dt).ceil() as usize;
    let stride = cfg.record_stride.unwrap_or_else(|| {
        let samples_per_window = if cfg.drive.amplitude != 0.0 {
            (2.0 * std::f64::consts::PI / cfg.drive.omega) / 512.0
        } else {
            duration / 4096.0
        };
        ((samples_per_window / dt) as usize).max(1)
    });

    let mut c = vec![0.0f64; n];
    if let InitialProfile::GaussianPulse {
        center,
        width,
        amplitude,
    } = cfg.initial
    {
        for (i, ci) in c.iter_mut().enumerate() {
            let r = (i as f64 + 0.5) * dx; // cell center
            *ci = amplitude * (-((r - center) / width).powi(2)).exp();
        }
    }
    let mut next = c.clone();
    let mut c_a = 0.0f64;

    let lam = mu * dt / (dx * dx); // = cfl
    let reference_amp = cfg.drive.amplitude.abs().max(match cfg.initial {
        InitialProfile::Zero => 0.0,
        InitialProfile::GaussianPulse { amplitude, .. } => amplitude.abs(),
    });
    let blowup = if reference_amp > 0.0 {
        BLOWUP_FACTOR * reference_amp
    } else {
        f64::INFINITY
    };
    // A cosine drive is a signed signal, so the field legitimately swings
    // negative; the undershoot floor is only meaningful for relaxation runs
    // whose data are all positive.
    let neg_floor = if cfg.drive.amplitude == 0.0 {
        -NEGATIVE_TOL * reference_amp
    } else {
        f64::NEG_INFINITY
    };

    let n_samples = steps / stride + 1;
    let mut result = SimResult {
        times: Vec::with_capacity(n_samples),
        c_out: Vec::with_capacity(n_samples),
        z_l: Vec::with_capacity(n_samples),
        c_a: Vec::with_capacity(n_samples),
        y_l: Vec::with_capacity(n_samples),
        mass: Vec::with_capacity(n_samples),
        field_snapshots: Vec::new(),
        drive: cfg.drive,
        dx,
        dt,
        steps,
    };
    let k_re = cfg.receptor.map_or(0.0, |r| r.k_re);
    let snapshot_every = (steps / SNAPSHOT_COUNT).max(1);

    let mass_of = |c: &[f64]| -> f64 { dx * c.iter().sum::<f64>() };

    let mut record = |step: usize, c: &[f64], c_a: f64| {
        let t = step as f64 * dt;
        result.times.push(t);
        result.c_out.push(c[0]);
        result.z_l.push(c[n - 1]);
        result.c_a.push(c_a);
        result.y_l.push(k_re * c_a);
        result.mass.push(mass_of(c));
        if step.is_multiple_of(snapshot_every) && result.field_snapshots.len() < SNAPSHOT_COUNT {
            result.field_snapshots.push((t, c.to_vec()));
        }
    };
    record(0, &c, c_a);

    for step in 0..steps {
        let t = step as f64 * dt;

        next[0] = match &cfg.membrane {
            Some(m) => {
                let drive = cfg.drive.amplitude * (cfg.drive.omega * t).cos();
                c[0] + dt * m.k * (drive - c[0]) + lam * (c[1] - c[0])
            }
            None => c[0] + lam * (c[1] - c[0]),
        };
        for i in 1..n - 1 {
            next[i] = c[i] + lam * (c[i + 1] - 2.0 * c[i] + c[i - 1]);
        }
        match &cfg.receptor {
            Some(r) => {
                let uptake = r.receptors * r.k_on * c[n - 1] - r.k_off * c_a;
                // flux mu * dc/dr = uptake enters through the r = L face
                next[n - 1] = c[n - 1] + lam * (c[n - 2] - c[n - 1]) + (dt / dx) * uptake;
                c_a += dt * uptake;
            }
            None => {
                next[n - 1] = c[n - 1] + lam * (c[n - 2] - c[n - 1]);
            }
        }
        std::mem::swap(&mut c, &mut next);

        let step = step + 1;
        if step.is_multiple_of(stride) || step == steps {
            let peak = c.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            if peak > blowup || !peak.is_finite() {
                return Err(Error::Unstable {
                    peak,
                    t: step as f64 * dt,
                });
            }
            let low = c.iter().fold(0.0f64, |m, &v| m.min(v));
            if low < neg_floor {
                return Err(Error::Unstable {
                    peak: low,
                    t: step as f64 * dt,
                });
            }
            record(step, &c, c_a);
        }
    }

    Ok(result)
}

/// Amplitude of `a cos(omega t) + b sin(omega t) + offset` fitted to the
/// samples by least squares.
fn fit_amplitude(times: &[f64], values: &[f64], omega: f64) -> f64 {
    // 3x3 normal equations for the basis {cos, sin, 1}.
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&t, &v) in times.iter().zip(values) {
        let basis = [(omega * t).cos(), (omega * t).sin(), 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * v;
        }
    }
    let mat = nalgebra::Matrix3::from_fn(|i, j| m[i][j]);
    let vec = nalgebra::Vector3::from_row_slice(&rhs);
    match mat.lu().solve(&vec) {
        Some(sol) => sol[0].hypot(sol[1]),
        None => 0.0,
    }
}

/// Output gain of a settled run in dB: the far-end amplitude over the drive
/// amplitude, both from least-squares fits over the last three periods.
///
/// The run counts as settled when the three per-period amplitudes agree to
/// 1 percent.
pub fn empirical_gain(res: &SimResult, drive_omega: f64) -> Result<f64> {
    if res.drive.amplitude == 0.0 {
        return Err(Error::Config(
            "gain is undefined for a zero-amplitude drive".into(),
        ));
    }
    if drive_omega <= 0.0 || drive_omega.is_nan() {
        return Err(Error::Config(format!(
            "drive omega must be positive, got {drive_omega}"
        )));
    }
    let period = 2.0 * std::f64::consts::PI / drive_omega;
    let t_end = *res
        .times
        .last()
        .ok_or_else(|| Error::Config("empty trace".into()))?;
    if t_end < 3.0 * period {
        return Err(Error::NotSettled(format!(
            "recorded span {t_end:.3e} s is shorter than three drive periods ({:.3e} s)",
            3.0 * period
        )));
    }

    let window_start = t_end - 3.0 * period;
    let start_idx = res.times.partition_point(|&t| t < window_start);
    let mut period_amps = [0.0f64; 3];
    for (p, amp) in period_amps.iter_mut().enumerate() {
        let lo = t_end - (3 - p) as f64 * period;
        let hi = t_end - (2 - p) as f64 * period;
        let a = res.times.partition_point(|&t| t < lo);
        let b = res.times.partition_point(|&t| t < hi);
        if b - a < 16 {
            return Err(Error::NotSettled(
                "too few samples per period for the settling check".into(),
            ));
        }
        *amp = fit_amplitude(&res.times[a..b], &res.z_l[a..b], drive_omega);
    }
    let max_amp = period_amps.iter().cloned().fold(f64::MIN, f64::max);
    let min_amp = period_amps.iter().cloned().fold(f64::MAX, f64::min);
    if max_amp <= 0.0 {
        return Err(Error::NotSettled(
            "output amplitude is identically zero".into(),
        ));
    }
    let drift = (max_amp - min_amp) / max_amp;
    if drift >= 0.01 {
        return Err(Error::NotSettled(format!(
            "per-period amplitude drift {drift:.3e} over the last three periods"
        )));
    }

    let amp_out = fit_amplitude(&res.times[start_idx..], &res.z_l[start_idx..], drive_omega);
    Ok(20.0 * (amp_out / res.drive.amplitude.abs()).log10())
}
