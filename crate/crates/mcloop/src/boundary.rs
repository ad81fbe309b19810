//! LTI boundary systems: the membrane dynamics at each end of the medium.
//!
//! A boundary system couples the diffusion region to a molecular robot. It is
//! a two-input, two-output state-space model
//!
//! ```text
//! dx/dt = A x + B [z; c]
//! [v; y] = C x + D [z; c]
//! ```
//!
//! where `z` is the quantity the medium returns to the boundary, `c` is the
//! robot-side concentration signal, `v` is the quantity the boundary injects
//! back into the medium and `y` is the signal delivered into the robot.
//! Whether `v`/`z` are concentrations or gradients depends on the membrane
//! mechanism; the [`BoundaryKind`] tag records the pairing so an
//! interconnection can refuse mismatched channels.
//!
//! Two constructors cover the mechanisms used throughout:
//!
//! * [`StateSpaceLTI::transmembrane`] — passive transport across a membrane
//!   at rate `k`, with the outer boundary layer of thickness `dr` acting as a
//!   well-mixed compartment. Dirichlet side: `v = c(t, 0)`.
//! * [`StateSpaceLTI::ligand_receptor`] — adsorption/desorption on surface
//!   receptors with transduction into the robot. Neumann side:
//!   `v = dc/dr (t, L)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::diffusion::{BoundaryKind, ComplexFreq};
use crate::{Error, Result};

const DET_FLOOR: f64 = 1e-300;

/// Transmembrane transport parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmembraneParams {
    /// Membrane transport rate k, 1/s.
    pub k: f64,
    /// Diffusion coefficient of the medium, um^2/s.
    pub mu: f64,
    /// Boundary-layer thickness, um. The flux from the medium is spread over
    /// this thickness; 1 um reproduces the usual lumped model.
    pub dr: f64,
}

impl TransmembraneParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k", self.k), ("mu", self.mu), ("dr", self.dr)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "transmembrane {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Ligand-receptor reception parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LigandReceptorParams {
    /// Adsorption rate constant, 1/(uM s) scale.
    pub k_on: f64,
    /// Desorption rate, 1/s.
    pub k_off: f64,
    /// Transduction rate into the robot, 1/s.
    pub k_re: f64,
    /// Receptor count, dimensionless; assumed much larger than the number of
    /// occupied complexes. Drives the adsorption term of the time-domain
    /// boundary ODE in [`crate::fdm`]; the state-space realization below uses
    /// the printed single-receptor form (see `ligand_receptor`).
    pub receptors: f64,
    /// Diffusion coefficient of the medium, um^2/s.
    pub mu: f64,
}

impl LigandReceptorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_on", self.k_on),
            ("k_off", self.k_off),
            ("k_re", self.k_re),
            ("receptors", self.receptors),
            ("mu", self.mu),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "ligand-receptor {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Real state-space realization (A, B, C, D) of a boundary system, with the
/// boundary kind it presents to the diffusion region and human-readable port
/// labels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceLTI {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    kind: BoundaryKind,
    input_labels: [String; 2],
    output_labels: [String; 2],
}

impl StateSpaceLTI {
    /// Builds a realization after checking dimensions: A is n x n, B is
    /// n x 2, C is 2 x n, D is 2 x 2.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        kind: BoundaryKind,
        input_labels: [&str; 2],
        output_labels: [&str; 2],
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidParam("A must be square".into()));
        }
        if b.shape() != (n, 2) {
            return Err(Error::InvalidParam(format!(
                "B must be {n} x 2, got {:?}",
                b.shape()
            )));
        }
        if c.shape() != (2, n) {
            return Err(Error::InvalidParam(format!(
                "C must be 2 x {n}, got {:?}",
                c.shape()
            )));
        }
        if d.shape() != (2, 2) {
            return Err(Error::InvalidParam(format!(
                "D must be 2 x 2, got {:?}",
                d.shape()
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            kind,
            input_labels: input_labels.map(str::to_owned),
            output_labels: output_labels.map(str::to_owned),
        })
    }

    /// Transmembrane transport: a single outer compartment `x = c_out` of
    /// thickness `dr` exchanging with the robot interior at rate `k` and with
    /// the medium through the boundary flux:
    ///
    /// ```text
    /// dx/dt = -k x + [mu/dr  k] [dc/dr(0); c_robot]
    /// v = c(t,0) = x
    /// y = k (x - c_robot)
    /// ```
    pub fn transmembrane(p: &TransmembraneParams) -> Result<Self> {
        p.validate()?;
        let a = DMatrix::from_row_slice(1, 1, &[-p.k]);
        let b = DMatrix::from_row_slice(1, 2, &[p.mu / p.dr, p.k]);
        let c = DMatrix::from_row_slice(2, 1, &[1.0, p.k]);
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -p.k]);
        Self::new(
            a,
            b,
            c,
            d,
            BoundaryKind::Dirichlet,
            ["dc_dr_at_end", "c_robot"],
            ["c_at_end", "flux_into_robot"],
        )
    }

    /// Ligand-receptor reception: the state is the adsorbed concentration
    /// `x = c_A`, desorbing at `k_off` and transduced into the robot at
    /// `k_re`:
    ///
    /// ```text
    /// dx/dt = -k_off x + [k_on  0] [c(t,L); c_robot]
    /// v = dc/dr(t,L) = -(k_off/mu) x + (k_on/mu) c(t,L)
    /// y = k_re x
    /// ```
    ///
    /// which gives the high-pass reflection path
    /// `v = (k_on/mu) s/(s + k_off) c(t,L)` and the reception path
    /// `y = k_re k_on/(s + k_off) c(t,L)`. The receptor count scales the
    /// adsorption term of the physical boundary ODE (see [`crate::fdm`]) but
    /// is not folded into this realization.
    pub fn ligand_receptor(p: &LigandReceptorParams) -> Result<Self> {
        p.validate()?;
        let a = DMatrix::from_row_slice(1, 1, &[-p.k_off]);
        let b = DMatrix::from_row_slice(1, 2, &[p.k_on, 0.0]);
        let c = DMatrix::from_row_slice(2, 1, &[-p.k_off / p.mu, p.k_re]);
        let d = DMatrix::from_row_slice(2, 2, &[p.k_on / p.mu, 0.0, 0.0, 0.0]);
        Self::new(
            a,
            b,
            c,
            d,
            BoundaryKind::Neumann,
            ["c_at_end", "c_robot"],
            ["dc_dr_at_end", "signal_into_robot"],
        )
    }

    /// Boundary system with no dynamics and a constant 2x2 gain. Handy for
    /// opening loops in tests (`H11 = 0` kills the self-interference path).
    pub fn static_gain(d: [[f64; 2]; 2], kind: BoundaryKind) -> Result<Self> {
        let a = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let b = DMatrix::zeros(1, 2);
        let c = DMatrix::zeros(2, 1);
        let dm = DMatrix::from_row_slice(2, 2, &[d[0][0], d[0][1], d[1][0], d[1][1]]);
        Self::new(a, b, c, dm, kind, ["z", "c"], ["v", "y"])
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn input_labels(&self) -> [&str; 2] {
        [&self.input_labels[0], &self.input_labels[1]]
    }

    pub fn output_labels(&self) -> [&str; 2] {
        [&self.output_labels[0], &self.output_labels[1]]
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Transfer matrix `H(s) = C (sI - A)^{-1} B + D` via a dense complex LU
    /// solve of `(sI - A) X = B`; no explicit inverse.
    pub fn transfer(&self, s: ComplexFreq) -> Result<[[Complex64; 2]; 2]> {
        let n = self.order();
        let sv = s.s();
        let mut resolvent_arg = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let diag = if i == j { sv } else { Complex64::ZERO };
                resolvent_arg[(i, j)] = diag - Complex64::from(self.a[(i, j)]);
            }
        }
        let b = self.b.map(Complex64::from);
        let lu = resolvent_arg.lu();
        if lu.determinant().norm() < DET_FLOOR {
            return Err(Error::SingularResolvent { omega: s.omega() });
        }
        let x = lu
            .solve(&b)
            .ok_or(Error::SingularResolvent { omega: s.omega() })?;
        let h = self.c.map(Complex64::from) * x + self.d.map(Complex64::from);
        Ok([[h[(0, 0)], h[(0, 1)]], [h[(1, 0)], h[(1, 1)]]])
    }
}
