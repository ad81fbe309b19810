//! Irrational transfer functions of the 1-D diffusion equation.
//!
//! The medium is `dc/dt = mu * d2c/dr2` on `r in [0, L]` with zero initial
//! condition. Laplace-transforming in time turns it into a two-point boundary
//! value problem whose solutions are combinations of `exp(±q r)` with
//! `q = sqrt(s)/sqrt(mu)`. Every transfer function here is built from the
//! elementary half-line propagator
//!
//! ```text
//! g(s, r) = exp(-(r/sqrt(mu)) * sqrt(s))
//! ```
//!
//! and the reflection coefficient `K` of the far end (-1 for a fixed end,
//! +1 for a free end relative to the injected signal):
//!
//! ```text
//! G_{r,*}(s) = (g(s, L-d) K g(s, L) + g(s, d)) / (1 + K g(s, L)^2),  d = |r - *|
//! ```
//!
//! `G_{r,*}` maps like quantities to like (concentration to concentration,
//! gradient to gradient). Reading a gradient output from a concentration
//! input differentiates in `r`; reading a concentration output from a
//! gradient input takes the antiderivative in `r` (the integration constant
//! vanishes in the `exp(±q r)` basis, so the termwise antiderivative is the
//! exact field reconstruction). [`ZMode`] selects among the three readings.
//!
//! Collecting the four input/output pairings at the two ends gives the 2x2
//! channel matrix; [`DiffusionChannel::transfer_matrix`] evaluates hand-coded
//! closed forms in `tanh`/`cosh`/`sinh` (overflow-safe), and
//! [`DiffusionChannel::transfer_matrix_general`] rebuilds the same entries
//! from the general formula as an independent route for cross-checking.

use num_complex::Complex64;

use crate::{Error, Result};

/// Underflow floor for reflection denominators.
const DENOM_FLOOR: f64 = 1e-300;

/// Kind of boundary condition seen by the diffusion region at one end.
///
/// Dirichlet: the boundary system drives the concentration `c(t, *)` and
/// reads back the gradient. Neumann: it drives the gradient and reads back
/// the concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    /// Physical quantity the boundary system injects into the medium.
    pub fn input_kind(self) -> SignalKind {
        match self {
            BoundaryKind::Dirichlet => SignalKind::Concentration,
            BoundaryKind::Neumann => SignalKind::Gradient,
        }
    }

    /// Physical quantity the medium returns to the boundary system.
    pub fn output_kind(self) -> SignalKind {
        match self {
            BoundaryKind::Dirichlet => SignalKind::Gradient,
            BoundaryKind::Neumann => SignalKind::Concentration,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "d",
            BoundaryKind::Neumann => "n",
        }
    }
}

/// Concentration `c(t, r)` or its spatial gradient `dc/dr (t, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Concentration,
    Gradient,
}

/// One of the two ends of the medium, `r = 0` or `r = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Zero,
    L,
}

impl End {
    pub fn position(self, length: f64) -> f64 {
        match self {
            End::Zero => 0.0,
            End::L => length,
        }
    }
}

/// How to read the output of the elementary transfer function at `r = ell`.
///
/// `Evaluate` when input and output kinds match, `SpatialDerivative` for
/// concentration in / gradient out, `SpatialIntegral` for gradient in /
/// concentration out. See [`zmode_for`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZMode {
    Evaluate,
    SpatialDerivative,
    SpatialIntegral,
}

/// Reading mode implied by the physical kinds of the input and the requested
/// output.
pub fn zmode_for(input: SignalKind, output: SignalKind) -> ZMode {
    match (input, output) {
        (SignalKind::Concentration, SignalKind::Gradient) => ZMode::SpatialDerivative,
        (SignalKind::Gradient, SignalKind::Concentration) => ZMode::SpatialIntegral,
        _ => ZMode::Evaluate,
    }
}

/// Reflection coefficient of the far boundary: -1 when both ends have the
/// same kind (fixed end relative to the input), +1 otherwise (free end).
pub fn reflection_coefficient(b0: BoundaryKind, bl: BoundaryKind) -> i32 {
    if b0 == bl {
        -1
    } else {
        1
    }
}

/// A point `s` on the complex frequency plane.
///
/// The usual construction is [`ComplexFreq::from_omega`], which places
/// `s = j*omega` on the imaginary axis; `omega` must be nonnegative and the
/// square root is the principal branch, so `sqrt(j*omega) =
/// sqrt(omega) * exp(j*pi/4)` and every propagator decays with distance.
/// [`ComplexFreq::from_s`] is an escape hatch for off-axis evaluation
/// (conjugate-symmetry checks, derivation intermediates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFreq {
    s: Complex64,
}

impl ComplexFreq {
    /// `s = j*omega`, `omega >= 0` in rad/s.
    pub fn from_omega(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidParam(format!(
                "omega must be finite and nonnegative, got {omega}"
            )));
        }
        Ok(Self {
            s: Complex64::new(0.0, omega),
        })
    }

    /// Arbitrary complex frequency.
    pub fn from_s(s: Complex64) -> Self {
        Self { s }
    }

    pub fn s(self) -> Complex64 {
        self.s
    }

    /// Imaginary part of `s`; equals the angular frequency for on-axis points.
    pub fn omega(self) -> f64 {
        self.s.im
    }

    /// Principal square root of `s`.
    pub fn sqrt_s(self) -> Complex64 {
        self.s.sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.s == Complex64::ZERO
    }
}

/// 2x2 complex transfer matrix, indexed `[output][input]` with end order
/// `(0, L)`.
pub type TransferMatrix = [[Complex64; 2]; 2];

/// Geometry and physics of the 1-D diffusive medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionChannel {
    /// Diffusion coefficient, um^2/s.
    mu: f64,
    /// Communication distance L, um.
    length: f64,
    b0: BoundaryKind,
    bl: BoundaryKind,
}

impl DiffusionChannel {
    pub fn new(mu: f64, length: f64, b0: BoundaryKind, bl: BoundaryKind) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "distance must be positive, got {length}"
            )));
        }
        Ok(Self { mu, length, b0, bl })
    }

    /// Channel with boundary kinds given as one of `"dd"`, `"dn"`, `"nd"`,
    /// `"nn"` (end order `0`, `L`).
    pub fn with_kinds(mu: f64, length: f64, kinds: &str) -> Result<Self> {
        let parse = |c: char| match c {
            'd' => Ok(BoundaryKind::Dirichlet),
            'n' => Ok(BoundaryKind::Neumann),
            other => Err(Error::InvalidParam(format!(
                "boundary kind must be 'd' or 'n', got '{other}'"
            ))),
        };
        let mut chars = kinds.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Self::new(mu, length, parse(a)?, parse(b)?),
            _ => Err(Error::InvalidParam(format!(
                "boundary pair must be two characters, got {kinds:?}"
            ))),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn boundary(&self, end: End) -> BoundaryKind {
        match end {
            End::Zero => self.b0,
            End::L => self.bl,
        }
    }

    /// Two-letter boundary label, e.g. "dn".
    pub fn kinds(&self) -> String {
        format!("{}{}", self.b0.short(), self.bl.short())
    }

    /// Characteristic frequency `mu / L^2` in rad/s; `omega_hat = omega /
    /// frequency_scale(..)` is the dimensionless frequency that collapses the
    /// channel gains onto a single curve.
    pub fn frequency_scale(&self) -> f64 {
        self.mu / (self.length * self.length)
    }

    pub fn normalized_omega(&self, omega: f64) -> f64 {
        omega / self.frequency_scale()
    }

    pub fn reflection(&self) -> i32 {
        reflection_coefficient(self.b0, self.bl)
    }

    /// Elementary propagator `g(s, r) = exp(-(r/sqrt(mu)) sqrt(s))`: passive
    /// diffusion over distance `r` on a half line. `r` may be negative (the
    /// growing branch shows up in derivation intermediates).
    pub fn propagator(&self, s: ComplexFreq, r: f64) -> Complex64 {
        (-(r / self.mu.sqrt()) * s.sqrt_s()).exp()
    }

    /// General transfer function from the input injected at `source` to the
    /// quantity `output` read at `r = ell`, with the reading mode inferred
    /// from the boundary kinds.
    pub fn transfer_general(
        &self,
        s: ComplexFreq,
        source: End,
        ell: f64,
        output: SignalKind,
    ) -> Result<Complex64> {
        let mode = zmode_for(self.boundary(source).input_kind(), output);
        self.transfer_general_with_mode(s, source, ell, mode)
    }

    /// General transfer function with an explicit reading mode. The override
    /// exists for exercising derivation intermediates; normal use goes
    /// through [`Self::transfer_general`].
    pub fn transfer_general_with_mode(
        &self,
        s: ComplexFreq,
        source: End,
        ell: f64,
        mode: ZMode,
    ) -> Result<Complex64> {
        if s.is_zero() {
            return Err(Error::ZeroFrequency);
        }
        if !(0.0..=self.length).contains(&ell) {
            return Err(Error::InvalidParam(format!(
                "ell must lie in [0, {}], got {ell}",
                self.length
            )));
        }
        let q = s.sqrt_s() / self.mu.sqrt();
        let k = f64::from(self.reflection());
        let l = self.length;

        // Two decaying exponentials coeff * exp(-q (offset + slope*r)); all
        // offsets stay in [0, 2L] for ell in [0, L], so nothing overflows.
        let terms: [(f64, f64, f64); 2] = match source {
            End::Zero => [(1.0, 0.0, 1.0), (k, 2.0 * l, -1.0)],
            End::L => [(1.0, l, -1.0), (k, l, 1.0)],
        };
        let denom = Complex64::ONE + k * (-2.0 * q * l).exp();
        if denom.norm() < DENOM_FLOOR {
            return Err(Error::DenominatorUnderflow { omega: s.omega() });
        }

        let mut acc = Complex64::ZERO;
        for (coeff, offset, slope) in terms {
            let e = (-q * (offset + slope * ell)).exp();
            acc += match mode {
                ZMode::Evaluate => coeff * e,
                ZMode::SpatialDerivative => coeff * (-q * slope) * e,
                // Termwise antiderivative; exact for the exp(±q r) basis.
                ZMode::SpatialIntegral => coeff * e / (-q * slope),
            };
        }
        Ok(acc / denom)
    }

    /// One entry of the channel matrix via the general formula.
    pub fn transfer_entry_general(
        &self,
        s: ComplexFreq,
        out: End,
        input: End,
    ) -> Result<Complex64> {
        self.transfer_general(
            s,
            input,
            out.position(self.length),
            self.boundary(out).output_kind(),
        )
    }

    /// 2x2 channel matrix assembled entry by entry from the general formula.
    /// Slower route kept as the independent cross-check of
    /// [`Self::transfer_matrix`].
    pub fn transfer_matrix_general(&self, s: ComplexFreq) -> Result<TransferMatrix> {
        let ends = [End::Zero, End::L];
        let mut m = [[Complex64::ZERO; 2]; 2];
        for (i, out) in ends.iter().enumerate() {
            for (j, input) in ends.iter().enumerate() {
                m[i][j] = self.transfer_entry_general(s, *out, *input)?;
            }
        }
        Ok(m)
    }

    /// 2x2 channel matrix from the closed forms for the four boundary-kind
    /// pairs, with `z = L sqrt(s)/sqrt(mu)`:
    ///
    /// ```text
    /// dd: [ -q/tanh(z)   q/sinh(z) ]      dn: [ -q tanh(z)   1/cosh(z)  ]
    ///     [ -q/sinh(z)   q/tanh(z) ]          [ 1/cosh(z)    tanh(z)/q  ]
    ///
    /// nd: [ -tanh(z)/q   1/cosh(z) ]      nn: [ -1/(q tanh(z))  1/(q sinh(z)) ]
    ///     [ 1/cosh(z)    q tanh(z) ]          [ -1/(q sinh(z))  1/(q tanh(z)) ]
    /// ```
    ///
    /// where `q = sqrt(s)/sqrt(mu)`. Hyperbolics are evaluated through
    /// `exp(-2z)` so large `|z|` cannot overflow.
    pub fn transfer_matrix(&self, s: ComplexFreq) -> Result<TransferMatrix> {
        if s.is_zero() {
            return Err(Error::ZeroFrequency);
        }
        let q = s.sqrt_s() / self.mu.sqrt();
        let z = q * self.length;
        let omega = s.omega();

        use BoundaryKind::{Dirichlet as D, Neumann as N};
        let m = match (self.b0, self.bl) {
            (D, D) => {
                let coth = coth_safe(z, omega)?;
                let csch = csch_safe(z, omega)?;
                [[-q * coth, q * csch], [-q * csch, q * coth]]
            }
            (D, N) => {
                let tanh = tanh_safe(z, omega)?;
                let sech = sech_safe(z, omega)?;
                [[-q * tanh, sech], [sech, tanh / q]]
            }
            (N, D) => {
                let tanh = tanh_safe(z, omega)?;
                let sech = sech_safe(z, omega)?;
                [[-tanh / q, sech], [sech, q * tanh]]
            }
            (N, N) => {
                let coth = coth_safe(z, omega)?;
                let csch = csch_safe(z, omega)?;
                [[-coth / q, csch / q], [-csch / q, coth / q]]
            }
        };
        Ok(m)
    }
}

// Overflow-safe hyperbolics for Re z >= 0 (reflected otherwise). Raw
// cosh/sinh overflow already at |Re z| ~ 710; these stay bounded by working
// with exp(-z) and exp(-2z) only.

fn tanh_safe(z: Complex64, omega: f64) -> Result<Complex64> {
    if z.re < 0.0 {
        return Ok(-(tanh_safe(-z, omega)?));
    }
    let e = (-2.0 * z).exp();
    let denom = Complex64::ONE + e;
    if denom.norm() < DENOM_FLOOR {
        return Err(Error::DenominatorUnderflow { omega });
    }
    Ok((Complex64::ONE - e) / denom)
}

fn coth_safe(z: Complex64, omega: f64) -> Result<Complex64> {
    if z.re < 0.0 {
        return Ok(-(coth_safe(-z, omega)?));
    }
    let e = (-2.0 * z).exp();
    let denom = Complex64::ONE - e;
    if denom.norm() < DENOM_FLOOR {
        return Err(Error::DenominatorUnderflow { omega });
    }
    Ok((Complex64::ONE + e) / denom)
}

fn sech_safe(z: Complex64, omega: f64) -> Result<Complex64> {
    let z = if z.re < 0.0 { -z } else { z };
    let e = (-2.0 * z).exp();
    let denom = Complex64::ONE + e;
    if denom.norm() < DENOM_FLOOR {
        return Err(Error::DenominatorUnderflow { omega });
    }
    Ok(2.0 * (-z).exp() / denom)
}

fn csch_safe(z: Complex64, omega: f64) -> Result<Complex64> {
    if z.re < 0.0 {
        return Ok(-(csch_safe(-z, omega)?));
    }
    let e = (-2.0 * z).exp();
    let denom = Complex64::ONE - e;
    if denom.norm() < DENOM_FLOOR {
        return Err(Error::DenominatorUnderflow { omega });
    }
    Ok(2.0 * (-z).exp() / denom)
}
