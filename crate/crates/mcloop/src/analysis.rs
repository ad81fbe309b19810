//! Frequency-domain analysis: sweeps, cut-off search, gain approximations,
//! the design-condition checker and the numeric certificates behind the
//! monotone-gain guarantee.
//!
//! The crossing gains of the diffusion matrix decrease strictly with
//! frequency and depend on `(omega, L, mu)` only through the normalized
//! frequency `omega_hat = L^2 omega / mu` (up to a static prefactor for the
//! dd and nn pairs), so cut-off frequencies are found by plain bisection on a
//! bracketed, monotone scalar function.

use num_complex::Complex64;

use crate::diffusion::{ComplexFreq, DiffusionChannel};
use crate::{Error, Result};

/// Anything that can be evaluated along the imaginary axis.
pub trait FreqResponse {
    fn response(&self, omega: f64) -> Result<Complex64>;
}

impl<F> FreqResponse for F
where
    F: Fn(f64) -> Result<Complex64>,
{
    fn response(&self, omega: f64) -> Result<Complex64> {
        self(omega)
    }
}

/// A sampled frequency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCurve {
    /// Strictly ascending angular frequencies, rad/s.
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `20 log10 |value|`.
    pub gain_db: Vec<f64>,
    pub phase_rad: Vec<f64>,
}

impl GainCurve {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// Log-spaced grid of `n >= 2` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::InvalidParam(format!(
            "log grid needs 0 < lo < hi and n >= 2, got lo={lo} hi={hi} n={n}"
        )));
    }
    let ratio = hi / lo;
    Ok((0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect())
}

/// Pointwise evaluation of `tf` over an ascending grid.
pub fn sweep(tf: &impl FreqResponse, omegas: &[f64]) -> Result<GainCurve> {
    if omegas.is_empty() {
        return Err(Error::InvalidParam("sweep grid is empty".into()));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParam(
            "sweep grid must be strictly ascending".into(),
        ));
    }
    let mut values = Vec::with_capacity(omegas.len());
    let mut gain_db = Vec::with_capacity(omegas.len());
    let mut phase_rad = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let v = tf.response(omega)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteResponse { omega });
        }
        values.push(v);
        gain_db.push(20.0 * v.norm().log10());
        phase_rad.push(v.arg());
    }
    Ok(GainCurve {
        omegas: omegas.to_vec(),
        values,
        gain_db,
        phase_rad,
    })
}

/// Which gain level the cut-off search aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffTarget {
    /// Absolute -6 dB (amplitude reduced to half, within rounding of the dB
    /// scale).
    Minus6DbAbsolute,
    /// 6 dB below the low-frequency (steady) gain; requires that gain to be
    /// finite.
    Minus6DbFromSteady,
}

/// Result of a cut-off bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffResult {
    pub target: CutoffTarget,
    /// Cut-off angular frequency, rad/s.
    pub omega_c: f64,
    /// `omega_c / freq_scale`; with `freq_scale = mu/L^2` this is the
    /// dimensionless constant shared by all channels of the same kind.
    pub omega_hat: f64,
    /// Gain level the search aimed for, dB.
    pub target_db: f64,
    /// Gain at `omega_c`, dB. Within 1e-4 dB of `target_db` on success.
    pub achieved_db: f64,
    /// Low-frequency reference gain, dB (0 for the absolute mode).
    pub reference_db: f64,
    pub iterations: usize,
}

const BRACKET_LO: f64 = 1e-8;
const BRACKET_HI: f64 = 1e4;
const BRACKET_EXPANSIONS: usize = 12;
const OMEGA_REL_TOL: f64 = 1e-6;
const GAIN_DB_TOL: f64 = 1e-4;
/// Steady gains are read at this normalized frequency; exactly s = 0 is not
/// evaluable for the kinds whose entries carry 1/sqrt(s).
const STEADY_OMEGA_HAT: f64 = 1e-12;

fn gain_db_at(tf: &impl FreqResponse, omega: f64) -> Result<f64> {
    let v = tf.response(omega)?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFiniteResponse { omega });
    }
    Ok(20.0 * v.norm().log10())
}

/// Finds the smallest frequency where a monotonically decreasing gain reaches
/// the target level, by geometric bracket expansion from
/// `[1e-8, 1e4] * freq_scale` followed by bisection to a relative frequency
/// tolerance of 1e-6 (and within 1e-4 dB of the target).
///
/// `freq_scale` is the unit of the search bracket and of the reported
/// `omega_hat`; pass [`DiffusionChannel::frequency_scale`] to obtain
/// normalized cut-off constants.
pub fn cutoff_frequency(
    tf: &impl FreqResponse,
    target: CutoffTarget,
    freq_scale: f64,
) -> Result<CutoffResult> {
    if !(freq_scale > 0.0 && freq_scale.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "freq_scale must be positive, got {freq_scale}"
        )));
    }

    let reference_db = match target {
        CutoffTarget::Minus6DbAbsolute => 0.0,
        CutoffTarget::Minus6DbFromSteady => {
            let g_lo = gain_db_at(tf, STEADY_OMEGA_HAT * freq_scale)?;
            let g_lower = gain_db_at(tf, 0.1 * STEADY_OMEGA_HAT * freq_scale)?;
            // A reference that keeps climbing as omega drops has no steady
            // gain to be relative to.
            if g_lower - g_lo > 1.0 {
                return Err(Error::SteadyGainUnbounded);
            }
            g_lo
        }
    };
    let target_db = match target {
        CutoffTarget::Minus6DbAbsolute => -6.0,
        CutoffTarget::Minus6DbFromSteady => reference_db - 6.0,
    };

    let mut lo = BRACKET_LO * freq_scale;
    let mut hi = BRACKET_HI * freq_scale;
    let mut g_lo = gain_db_at(tf, lo)?;
    let mut g_hi = gain_db_at(tf, hi)?;
    let mut expansions = 0;
    while g_lo <= target_db {
        lo /= 10.0;
        g_lo = gain_db_at(tf, lo)?;
        expansions += 1;
        if expansions > BRACKET_EXPANSIONS {
            return Err(Error::NoCrossing { lo, hi });
        }
    }
    expansions = 0;
    while g_hi >= target_db {
        hi *= 10.0;
        g_hi = gain_db_at(tf, hi)?;
        expansions += 1;
        if expansions > BRACKET_EXPANSIONS {
            return Err(Error::NoCrossing { lo, hi });
        }
    }

    // Geometric bisection: the crossing is unique because the gain is
    // monotone, so keeping [lo, hi] astride the target converges to it.
    let mut iterations = 0;
    let mut mid = (lo * hi).sqrt();
    let mut g_mid = gain_db_at(tf, mid)?;
    while (hi / lo - 1.0 > OMEGA_REL_TOL || (g_mid - target_db).abs() > GAIN_DB_TOL)
        && iterations < 200
    {
        if g_mid > target_db {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = (lo * hi).sqrt();
        g_mid = gain_db_at(tf, mid)?;
        iterations += 1;
    }
    if (g_mid - target_db).abs() > GAIN_DB_TOL {
        return Err(Error::NoCrossing { lo, hi });
    }

    Ok(CutoffResult {
        target,
        omega_c: mid,
        omega_hat: mid / freq_scale,
        target_db,
        achieved_db: g_mid,
        reference_db,
        iterations,
    })
}

/// Convenience: cut-off of a channel's (2,1) crossing gain, reported both in
/// rad/s and as the normalized constant.
pub fn crossing_cutoff(channel: &DiffusionChannel, target: CutoffTarget) -> Result<CutoffResult> {
    let tf = |omega: f64| -> Result<Complex64> {
        Ok(channel.transfer_matrix(ComplexFreq::from_omega(omega)?)?[1][0])
    };
    cutoff_frequency(&tf, target, channel.frequency_scale())
}

/// Piecewise magnitude approximation of `tanh(L sqrt(j omega)/sqrt(mu))`:
/// `(L/sqrt(mu)) sqrt(omega)` below the corner `mu/L^2` (a 10 dB/decade
/// rise), 1 above it. Continuous at the corner.
pub fn tanh_gain_approx(omega: f64, length: f64, mu: f64) -> f64 {
    let corner = mu / (length * length);
    if omega <= corner {
        (length / mu.sqrt()) * omega.sqrt()
    } else {
        1.0
    }
}

/// Approximate peak loop gain of the transmembrane self-interference path:
/// `sqrt(mu)/(sqrt(k) dr)` when the membrane is faster than the channel
/// corner (`k >= mu/L^2`), `L/dr` otherwise. At the corner both branches
/// agree; the larger is reported.
pub fn alpha_max_gain(k: f64, mu: f64, length: f64, dr: f64) -> f64 {
    let corner = mu / (length * length);
    let fast = mu.sqrt() / (k.sqrt() * dr);
    let slow = length / dr;
    match k.partial_cmp(&corner) {
        Some(std::cmp::Ordering::Greater) => fast,
        Some(std::cmp::Ordering::Less) => slow,
        _ => fast.max(slow),
    }
}

/// Inputs of the design-condition checker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    /// Upper edge of the control band, rad/s.
    pub band_hi: f64,
    /// Admissible communication distances, um.
    pub l_min: f64,
    pub l_max: f64,
    /// Boundary-layer thickness, um.
    pub dr: f64,
    /// Candidate physics: diffusion coefficient and membrane/receptor rates.
    pub mu: f64,
    pub k: f64,
    pub k_on: f64,
    pub k_off: f64,
    pub k_re: f64,
    pub receptors: f64,
    /// Safety factor standing in for "much greater than" in the desorption
    /// condition.
    pub margin: f64,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.band_hi <= 0.0 || self.band_hi.is_nan() {
            return Err(Error::InvalidParam("band_hi must be positive".into()));
        }
        if !(self.l_min > 0.0 && self.l_min <= self.l_max) {
            return Err(Error::InvalidParam(
                "need 0 < l_min <= l_max for the distance range".into(),
            ));
        }
        for (name, v) in [
            ("dr", self.dr),
            ("mu", self.mu),
            ("k", self.k),
            ("k_on", self.k_on),
            ("k_off", self.k_off),
            ("k_re", self.k_re),
            ("receptors", self.receptors),
            ("margin", self.margin),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "design spec {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One verdict of the design checker.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub name: &'static str,
    pub pass: bool,
    /// The bound the checked quantity must clear.
    pub threshold: f64,
    /// The quantity itself.
    pub actual: f64,
    pub detail: String,
}

/// Full report of the design checker.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub conditions: Vec<ConditionReport>,
    /// Channel cut-off at the worst-case distance, rad/s.
    pub omega_d: f64,
    /// Membrane transfer cut-off `sqrt(3) k`, rad/s.
    pub omega_h0: f64,
    /// Dominant channel cut-off `min(omega_d, omega_h0)`, rad/s.
    pub omega_m: f64,
    /// Peak self-interference loop gain approximation.
    pub alpha: f64,
    pub all_pass: bool,
}

/// Checks the four design conditions for a transmembrane-to-receptor channel
/// against a control band `[0, band_hi]`. Thresholds are recomputed from the
/// model, not hard-coded:
///
/// 1. channel bandwidth: `omega_d = omega_hat_c * mu / l_max^2 >= band_hi`,
///    with the normalized constant `omega_hat_c` found by bisection;
/// 2. membrane bandwidth: `omega_h0 = sqrt(3) k >= band_hi` (exact half-gain
///    frequency of the first-order membrane path);
/// 3. self-interference: `alpha <= 1`, i.e. `|S0| >= 1/2` across all
///    frequencies;
/// 4. receiver separation: `k_off >= margin * sqrt(3) * omega_m`, so the
///    receptor reflection path stays out of the signal band.
pub fn design_check(spec: &DesignSpec) -> Result<DesignReport> {
    spec.validate()?;

    // Normalized cut-off constant of the dn crossing gain (~4.14), found by
    // bisection on a unit channel.
    let unit = DiffusionChannel::with_kinds(1.0, 1.0, "dn")?;
    let what_c = crossing_cutoff(&unit, CutoffTarget::Minus6DbAbsolute)?.omega_hat;

    let omega_d = what_c * spec.mu / (spec.l_max * spec.l_max);
    let omega_h0 = 3f64.sqrt() * spec.k;
    let omega_m = omega_d.min(omega_h0);
    let alpha = alpha_max_gain(spec.k, spec.mu, spec.l_max, spec.dr);

    let mu_threshold = spec.band_hi * spec.l_max * spec.l_max / what_c;
    let k_threshold = spec.band_hi / 3f64.sqrt();
    let k_off_threshold = spec.margin * 3f64.sqrt() * omega_m;

    let conditions = vec![
        ConditionReport {
            name: "channel-bandwidth",
            pass: spec.mu >= mu_threshold,
            threshold: mu_threshold,
            actual: spec.mu,
            detail: format!(
                "omega_d = {omega_d:.3e} rad/s must reach band edge {:.3e} rad/s; needs mu >= {mu_threshold:.3} um^2/s at L = {} um",
                spec.band_hi, spec.l_max
            ),
        },
        ConditionReport {
            name: "membrane-bandwidth",
            pass: spec.k >= k_threshold,
            threshold: k_threshold,
            actual: spec.k,
            detail: format!(
                "omega_h0 = sqrt(3) k = {omega_h0:.3e} rad/s must reach band edge {:.3e} rad/s; needs k >= {k_threshold:.3e} 1/s",
                spec.band_hi
            ),
        },
        ConditionReport {
            name: "self-interference",
            pass: alpha <= 1.0,
            threshold: 1.0,
            actual: alpha,
            detail: format!(
                "peak loop gain alpha = {alpha:.3} must stay at or below 1 (|S0| >= 1/2); needs k >= mu/dr^2 = {:.3} 1/s",
                spec.mu / (spec.dr * spec.dr)
            ),
        },
        ConditionReport {
            name: "receiver-separation",
            pass: spec.k_off >= k_off_threshold,
            threshold: k_off_threshold,
            actual: spec.k_off,
            detail: format!(
                "k_off = {:.3e} 1/s must clear {:.1} x sqrt(3) x omega_m = {k_off_threshold:.3e} 1/s",
                spec.k_off, spec.margin
            ),
        },
    ];
    let all_pass = conditions.iter().all(|c| c.pass);
    Ok(DesignReport {
        conditions,
        omega_d,
        omega_h0,
        omega_m,
        alpha,
        all_pass,
    })
}

/// Worst margins of the numeric certificates behind the monotone-gain
/// guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// Minimum over the grid of `f_-(w) = e^w - e^-w - 2 sin w` (and where).
    pub min_f_minus: (f64, f64),
    /// Minimum of `f_+(w) = e^w - e^-w + 2 sin w`.
    pub min_f_plus: (f64, f64),
    /// Minimum of `c_-(w) = e^w + e^-w - 2 cos w`.
    pub min_c_minus: (f64, f64),
    /// Maximum of `h(w) = 2 c_-(w) - w f_+(w)` (must stay nonpositive).
    pub max_h: (f64, f64),
    /// Smallest per-step drop of each crossing gain over the log grid,
    /// keyed by the boundary pair.
    pub min_gain_step: Vec<(String, f64)>,
}

pub fn f_minus(w: f64) -> f64 {
    w.exp() - (-w).exp() - 2.0 * w.sin()
}

pub fn f_plus(w: f64) -> f64 {
    w.exp() - (-w).exp() + 2.0 * w.sin()
}

pub fn c_minus(w: f64) -> f64 {
    w.exp() + (-w).exp() - 2.0 * w.cos()
}

pub fn h_combination(w: f64) -> f64 {
    2.0 * c_minus(w) - w * f_plus(w)
}

/// Numerically certifies, on a dense grid, the sign conditions that make the
/// crossing gains monotone: `f_-, f_+, c_- >= 0` and `h <= 0` for normalized
/// arguments in `[0, w_max]`, plus strict decrease of all four crossing
/// gains over `n_gain` log-spaced normalized frequencies.
pub fn monotonicity_suite(w_max: f64, n: usize, n_gain: usize) -> Result<MonotonicityReport> {
    if w_max <= 0.0 || w_max.is_nan() || n < 2 || n_gain < 2 {
        return Err(Error::InvalidParam(
            "monotonicity suite needs w_max > 0 and at least two grid points".into(),
        ));
    }

    let mut min_f_minus = (f64::INFINITY, 0.0);
    let mut min_f_plus = (f64::INFINITY, 0.0);
    let mut min_c_minus = (f64::INFINITY, 0.0);
    let mut max_h = (f64::NEG_INFINITY, 0.0);
    for i in 0..n {
        let w = w_max * i as f64 / (n - 1) as f64;
        let fm = f_minus(w);
        let fp = f_plus(w);
        let cm = c_minus(w);
        let h = h_combination(w);
        if fm < min_f_minus.0 {
            min_f_minus = (fm, w);
        }
        if fp < min_f_plus.0 {
            min_f_plus = (fp, w);
        }
        if cm < min_c_minus.0 {
            min_c_minus = (cm, w);
        }
        if h > max_h.0 {
            max_h = (h, w);
        }
        if fm < 0.0 {
            return Err(Error::PropertyViolation {
                at: w,
                what: format!("f_-({w}) = {fm} < 0"),
            });
        }
        if fp < 0.0 {
            return Err(Error::PropertyViolation {
                at: w,
                what: format!("f_+({w}) = {fp} < 0"),
            });
        }
        if cm < 0.0 {
            return Err(Error::PropertyViolation {
                at: w,
                what: format!("c_-({w}) = {cm} < 0"),
            });
        }
        if h > 0.0 {
            return Err(Error::PropertyViolation {
                at: w,
                what: format!("h({w}) = {h} > 0"),
            });
        }
    }

    let mut min_gain_step = Vec::new();
    let (lo, hi) = (1e-4f64, 1e3f64);
    for kinds in ["dd", "dn", "nd", "nn"] {
        let ch = DiffusionChannel::with_kinds(1.0, 1.0, kinds)?;
        let mut prev = f64::INFINITY;
        let mut min_step = f64::INFINITY;
        for i in 0..n_gain {
            let what = lo * (hi / lo).powf(i as f64 / (n_gain - 1) as f64);
            let g = ch.transfer_matrix(ComplexFreq::from_omega(what)?)?[1][0].norm();
            if i > 0 {
                let step = prev - g;
                min_step = min_step.min(step);
                if step <= 0.0 {
                    return Err(Error::PropertyViolation {
                        at: what,
                        what: format!(
                            "{kinds} crossing gain did not decrease at omega_hat = {what}"
                        ),
                    });
                }
            }
            prev = g;
        }
        min_gain_step.push((kinds.to_string(), min_step));
    }

    Ok(MonotonicityReport {
        min_f_minus,
        min_f_plus,
        min_c_minus,
        max_h,
        min_gain_step,
    })
}
