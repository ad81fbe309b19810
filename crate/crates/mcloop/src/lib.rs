//! Control-oriented models of bidirectional, diffusion-based molecular
//! communication channels.
//!
//! A channel is a one-dimensional diffusive medium with a molecular robot at
//! each end. The library represents it as a feedback interconnection of three
//! kinds of subsystems:
//!
//! * [`diffusion`] — the 2x2 irrational transfer matrix of the diffusion
//!   equation on `[0, L]`, parameterized by the boundary kind (Dirichlet or
//!   Neumann) at each end,
//! * [`boundary`] — LTI state-space models of the membrane transfer
//!   mechanisms (transmembrane transport, ligand-receptor binding) that close
//!   the loop between the medium and each robot,
//! * [`feedback`] — the interconnection itself: self-interference systems,
//!   end-to-end channel transfer functions, and the exact closed-loop solve.
//!
//! On top of those, [`analysis`] provides frequency sweeps, bisection search
//! for cut-off frequencies (the channel gains are monotone in frequency),
//! piecewise gain approximations and a design-condition checker, while
//! [`fdm`] holds an independent time-domain finite-difference solver of the
//! same physics used to cross-validate every analytic gain.
//!
//! All evaluators are pure functions of immutable inputs and are safe to call
//! from many threads at once.

pub mod analysis;
pub mod boundary;
pub mod diffusion;
mod error;
pub mod fdm;
pub mod feedback;

pub use error::{Error, Result};
