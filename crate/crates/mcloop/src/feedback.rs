//! Feedback interconnection of the medium and the two boundary systems.
//!
//! Writing `G` for the 2x2 diffusion matrix and `H0`, `HL` for the boundary
//! transfer matrices, the loop is
//!
//! ```text
//! [z0; zL] = G [v0; vL]
//! [v*; y*] = H* [z*; c*]        (* = 0, L)
//! c* = F*(s) c*_in
//! ```
//!
//! with the robot-side concentrations `c0`, `cL` as exogenous inputs (the
//! robot reaction filters `F*` default to identity). The diagonal entries of
//! `G` reflect a robot's own transmission back onto its boundary; the
//! resulting self-interference systems
//!
//! ```text
//! S0 = 1 / (1 - H0_11 G_11),     SL = 1 / (1 - HL_11 G_22)
//! ```
//!
//! shape the end-to-end channel transfer functions
//!
//! ```text
//! Gamma_0L = G_21 S0 H0_12,      Gamma_L0 = G_12 SL HL_12.
//! ```
//!
//! [`Interconnection::closed_loop`] solves the full 2x2 loop exactly instead;
//! `M_0L = yL/c0` and `M_LL = yL/cL` (the cross-talk of a robot hearing its
//! own transmission) come from that solve, and `Gamma` is its special case
//! with the opposite feedback path removed.

use num_complex::Complex64;

use crate::boundary::StateSpaceLTI;
use crate::diffusion::{ComplexFreq, DiffusionChannel, End};
use crate::{Error, Result};

const LOOP_FLOOR: f64 = 1e-12;

/// Scalar robot reaction filter applied to the exogenous concentration
/// input. Identity reproduces the bare channel; the first-order lag exists
/// for extension experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobotTf {
    Identity,
    FirstOrderLag { corner: f64 },
}

impl RobotTf {
    pub fn eval(self, s: ComplexFreq) -> Complex64 {
        match self {
            RobotTf::Identity => Complex64::ONE,
            RobotTf::FirstOrderLag { corner } => Complex64::from(corner) / (s.s() + corner),
        }
    }
}

/// The assembled feedback system: medium plus one boundary system per end.
#[derive(Debug, Clone)]
pub struct Interconnection {
    channel: DiffusionChannel,
    h0: StateSpaceLTI,
    hl: StateSpaceLTI,
    f0: RobotTf,
    fl: RobotTf,
}

/// Exact loop solution at one frequency for given robot inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedLoopSolution {
    pub v0: Complex64,
    pub vl: Complex64,
    pub z0: Complex64,
    pub zl: Complex64,
    pub y0: Complex64,
    pub yl: Complex64,
}

/// Everything worth recording about one frequency point of the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelResponse {
    pub omega: f64,
    /// Self-interference at the r = 0 / r = L boundary.
    pub s0: Complex64,
    pub sl: Complex64,
    /// End-to-end channel transfer functions.
    pub gamma_0l: Complex64,
    pub gamma_l0: Complex64,
    /// Robot-to-robot responses from the exact loop solve.
    pub m0l_exact: Complex64,
    /// Cross-talk: the L robot's received signal due to its own input.
    pub mll_exact: Complex64,
    /// Separated approximation `HL_21 * Gamma_0L`.
    pub m0l_approx: Complex64,
}

impl Interconnection {
    /// Couples a channel with its two boundary systems. The boundary kind
    /// each system presents must match the channel end it is attached to
    /// (transmembrane pairs with a Dirichlet end, ligand-receptor with a
    /// Neumann end).
    pub fn new(channel: DiffusionChannel, h0: StateSpaceLTI, hl: StateSpaceLTI) -> Result<Self> {
        for (end, sys) in [(End::Zero, &h0), (End::L, &hl)] {
            if channel.boundary(end) != sys.kind() {
                return Err(Error::InvalidParam(format!(
                    "boundary system at {end:?} presents {:?} but the channel end is {:?}",
                    sys.kind(),
                    channel.boundary(end)
                )));
            }
        }
        Ok(Self {
            channel,
            h0,
            hl,
            f0: RobotTf::Identity,
            fl: RobotTf::Identity,
        })
    }

    pub fn with_robot_tfs(mut self, f0: RobotTf, fl: RobotTf) -> Self {
        self.f0 = f0;
        self.fl = fl;
        self
    }

    pub fn channel(&self) -> &DiffusionChannel {
        &self.channel
    }

    pub fn boundary_system(&self, end: End) -> &StateSpaceLTI {
        match end {
            End::Zero => &self.h0,
            End::L => &self.hl,
        }
    }

    /// Self-interference `S* = 1/(1 - H*_11 G_ii)` at the given end.
    pub fn self_interference(&self, s: ComplexFreq, end: End) -> Result<Complex64> {
        let g = self.channel.transfer_matrix(s)?;
        let (h, gii) = match end {
            End::Zero => (self.h0.transfer(s)?, g[0][0]),
            End::L => (self.hl.transfer(s)?, g[1][1]),
        };
        let denom = Complex64::ONE - h[0][0] * gii;
        if denom.norm() < LOOP_FLOOR {
            return Err(Error::FeedbackSingular { omega: s.omega() });
        }
        Ok(denom.inv())
    }

    /// End-to-end channel transfer functions `(Gamma_0L, Gamma_L0)`.
    pub fn gammas(&self, s: ComplexFreq) -> Result<(Complex64, Complex64)> {
        let g = self.channel.transfer_matrix(s)?;
        let h0 = self.h0.transfer(s)?;
        let hl = self.hl.transfer(s)?;
        let s0 = {
            let denom = Complex64::ONE - h0[0][0] * g[0][0];
            if denom.norm() < LOOP_FLOOR {
                return Err(Error::FeedbackSingular { omega: s.omega() });
            }
            denom.inv()
        };
        let sl = {
            let denom = Complex64::ONE - hl[0][0] * g[1][1];
            if denom.norm() < LOOP_FLOOR {
                return Err(Error::FeedbackSingular { omega: s.omega() });
            }
            denom.inv()
        };
        Ok((g[1][0] * s0 * h0[0][1], g[0][1] * sl * hl[0][1]))
    }

    /// Exact solve of the interconnection for robot inputs `(c0, cl)`.
    ///
    /// Eliminating `v* = H*_11 z* + H*_12 c*` from `z = G v` leaves a 2x2
    /// linear system in `(z0, zL)`; `v` and `y` follow by back-substitution.
    pub fn closed_loop(
        &self,
        s: ComplexFreq,
        c0: Complex64,
        cl: Complex64,
    ) -> Result<ClosedLoopSolution> {
        let g = self.channel.transfer_matrix(s)?;
        let h0 = self.h0.transfer(s)?;
        let hl = self.hl.transfer(s)?;
        let c0 = self.f0.eval(s) * c0;
        let cl = self.fl.eval(s) * cl;

        // (I - G diag(H11)) z = G diag(H12) c
        let a00 = Complex64::ONE - g[0][0] * h0[0][0];
        let a01 = -g[0][1] * hl[0][0];
        let a10 = -g[1][0] * h0[0][0];
        let a11 = Complex64::ONE - g[1][1] * hl[0][0];
        let r0 = g[0][0] * h0[0][1] * c0 + g[0][1] * hl[0][1] * cl;
        let r1 = g[1][0] * h0[0][1] * c0 + g[1][1] * hl[0][1] * cl;

        let det = a00 * a11 - a01 * a10;
        if det.norm() < LOOP_FLOOR {
            return Err(Error::FeedbackSingular { omega: s.omega() });
        }
        let z0 = (r0 * a11 - a01 * r1) / det;
        let zl = (a00 * r1 - r0 * a10) / det;

        let v0 = h0[0][0] * z0 + h0[0][1] * c0;
        let vl = hl[0][0] * zl + hl[0][1] * cl;
        let y0 = h0[1][0] * z0 + h0[1][1] * c0;
        let yl = hl[1][0] * zl + hl[1][1] * cl;
        Ok(ClosedLoopSolution {
            v0,
            vl,
            z0,
            zl,
            y0,
            yl,
        })
    }

    /// Exact robot-to-robot response `yL/c0` (with `cL = 0`).
    pub fn m0l_exact(&self, s: ComplexFreq) -> Result<Complex64> {
        Ok(self.closed_loop(s, Complex64::ONE, Complex64::ZERO)?.yl)
    }

    /// Exact cross-talk `yL/cL` (with `c0 = 0`).
    pub fn mll_exact(&self, s: ComplexFreq) -> Result<Complex64> {
        Ok(self.closed_loop(s, Complex64::ZERO, Complex64::ONE)?.yl)
    }

    /// Separated approximation of the robot-to-robot response,
    /// `HL_21 * Gamma_0L`. Accurate when the receiver's reflection path is
    /// negligible over the band that actually carries signal.
    pub fn m0l_approx(&self, s: ComplexFreq) -> Result<Complex64> {
        let (gamma_0l, _) = self.gammas(s)?;
        let hl = self.hl.transfer(s)?;
        Ok(hl[1][0] * gamma_0l)
    }

    /// Full record of one frequency point.
    pub fn response(&self, omega: f64) -> Result<ChannelResponse> {
        let s = ComplexFreq::from_omega(omega)?;
        let (gamma_0l, gamma_l0) = self.gammas(s)?;
        Ok(ChannelResponse {
            omega,
            s0: self.self_interference(s, End::Zero)?,
            sl: self.self_interference(s, End::L)?,
            gamma_0l,
            gamma_l0,
            m0l_exact: self.m0l_exact(s)?,
            mll_exact: self.mll_exact(s)?,
            m0l_approx: self.m0l_approx(s)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{LigandReceptorParams, TransmembraneParams};
    use crate::diffusion::BoundaryKind;
    use nalgebra::DMatrix;

    fn jomega(omega: f64) -> ComplexFreq {
        ComplexFreq::from_omega(omega).unwrap()
    }

    fn standard_channel(k: f64, l: f64) -> Interconnection {
        let channel = DiffusionChannel::with_kinds(83.0, l, "dn").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl = StateSpaceLTI::ligand_receptor(&LigandReceptorParams {
            k_on: 1e-1,
            k_off: 100.0,
            k_re: 1.0,
            receptors: 1e3,
            mu: 83.0,
        })
        .unwrap();
        Interconnection::new(channel, h0, hl).unwrap()
    }

    /// H11 = 0, H12 = 1 opens the self-interference loop entirely.
    fn open_loop_stub(kind: BoundaryKind) -> StateSpaceLTI {
        StateSpaceLTI::static_gain([[0.0, 1.0], [1.0, 0.0]], kind).unwrap()
    }

    #[test]
    fn no_feedback_means_unit_self_interference() {
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let ic = Interconnection::new(
            channel,
            open_loop_stub(BoundaryKind::Dirichlet),
            open_loop_stub(BoundaryKind::Neumann),
        )
        .unwrap();
        for omega in [1e-3, 1e-1, 5.0] {
            let s0 = ic.self_interference(jomega(omega), End::Zero).unwrap();
            assert!((s0 - Complex64::ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn passthrough_stubs_reduce_gamma_to_crossing_entry() {
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let ic = Interconnection::new(
            channel,
            open_loop_stub(BoundaryKind::Dirichlet),
            open_loop_stub(BoundaryKind::Neumann),
        )
        .unwrap();
        for omega in [1e-3, 1e-2, 1.0] {
            let s = jomega(omega);
            let (gamma_0l, _) = ic.gammas(s).unwrap();
            let g21 = channel.transfer_matrix(s).unwrap()[1][0];
            assert!((gamma_0l - g21).norm() < 1e-14 * g21.norm().max(1.0));
        }
    }

    #[test]
    fn slow_membrane_has_a_self_interference_dip() {
        let ic = standard_channel(5e-2, 100.0);
        let mut min_gain = f64::INFINITY;
        for i in 0..400 {
            let omega = 1e-3 * 1e4f64.powf(i as f64 / 399.0);
            let s0 = ic.self_interference(jomega(omega), End::Zero).unwrap();
            min_gain = min_gain.min(s0.norm());
        }
        assert!(min_gain < 0.3, "min |S0| = {min_gain}");
    }

    #[test]
    fn fast_membrane_suppresses_self_interference() {
        let ic = standard_channel(200.0, 100.0);
        let s0 = ic.self_interference(jomega(1e-2), End::Zero).unwrap();
        assert!(s0.norm() >= 0.5, "|S0(j 1e-2)| = {}", s0.norm());
    }

    #[test]
    fn gamma_band_edges_match_design_story() {
        // Slow membrane: attenuated below -6 dB inside [1e-3, 1e-2].
        let slow = standard_channel(5e-2, 100.0);
        let mut min_db = f64::INFINITY;
        for i in 0..200 {
            let omega = 1e-3 * 10f64.powf(i as f64 / 199.0);
            let (gamma, _) = slow.gammas(jomega(omega)).unwrap();
            min_db = min_db.min(20.0 * gamma.norm().log10());
        }
        assert!(min_db < -6.0, "slow membrane min gain {min_db} dB");

        // Fast membrane: everything above -6 dB up to the band edge.
        let fast = standard_channel(200.0, 100.0);
        let mut worst_db = f64::INFINITY;
        for i in 0..200 {
            let omega = 1e-6 * 1e4f64.powf(i as f64 / 199.0);
            let (gamma, _) = fast.gammas(jomega(omega)).unwrap();
            worst_db = worst_db.min(20.0 * gamma.norm().log10());
        }
        assert!(worst_db > -6.0, "fast membrane min gain {worst_db} dB");
    }

    #[test]
    fn exact_solve_reduces_to_gamma_with_receiver_loop_removed() {
        // With the L-side feedback path dead, zL/c0 from the exact solve is
        // the Gamma_0L formula.
        use rand::Rng;
        use rand::SeedableRng;
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k: 200.0,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl = open_loop_stub(BoundaryKind::Neumann);
        let ic = Interconnection::new(channel, h0, hl).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let omega = 10f64.powf(rng.random_range(-4.0..2.0));
            let s = jomega(omega);
            let sol = ic.closed_loop(s, Complex64::ONE, Complex64::ZERO).unwrap();
            let (gamma_0l, _) = ic.gammas(s).unwrap();
            let err = (sol.zl - gamma_0l).norm() / gamma_0l.norm();
            assert!(err < 1e-10, "omega={omega}: {err:e}");
        }
    }

    #[test]
    fn open_loop_solution_is_the_product_of_paths() {
        // Both H11 = 0: yL = HL21 G21 H012 c0 with no interference terms.
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let h0 = open_loop_stub(BoundaryKind::Dirichlet);
        let hl =
            StateSpaceLTI::static_gain([[0.0, 0.0], [2.5, 0.0]], BoundaryKind::Neumann).unwrap();
        let ic = Interconnection::new(channel, h0, hl).unwrap();
        let s = jomega(3e-3);
        let sol = ic.closed_loop(s, Complex64::ONE, Complex64::ZERO).unwrap();
        let g = channel.transfer_matrix(s).unwrap();
        let want = 2.5 * g[1][0];
        assert!((sol.yl - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn separated_approximation_holds_for_fast_desorption() {
        let ic = standard_channel(200.0, 100.0);
        for i in 0..300 {
            let omega = 1e-4 * 1e6f64.powf(i as f64 / 299.0);
            let s = jomega(omega);
            let exact = ic.m0l_exact(s).unwrap();
            let approx = ic.m0l_approx(s).unwrap();
            let rel = (exact - approx).norm() / exact.norm();
            assert!(rel < 1e-2, "omega={omega}: rel dev {rel:e}");
        }
    }

    #[test]
    fn slow_desorption_breaks_the_separated_approximation() {
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k: 200.0,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl = StateSpaceLTI::ligand_receptor(&LigandReceptorParams {
            k_on: 1e-1,
            k_off: 1e-3,
            k_re: 1.0,
            receptors: 1e3,
            mu: 83.0,
        })
        .unwrap();
        let ic = Interconnection::new(channel, h0, hl).unwrap();
        let mut worst = 0.0f64;
        for i in 0..300 {
            let omega = 1e-4 * 1e6f64.powf(i as f64 / 299.0);
            let s = jomega(omega);
            let exact = ic.m0l_exact(s).unwrap();
            let approx = ic.m0l_approx(s).unwrap();
            worst = worst.max((exact - approx).norm() / exact.norm());
        }
        assert!(worst > 0.1, "worst deviation {worst:e}");
    }

    #[test]
    fn cross_talk_is_nonzero_when_the_receiver_also_transmits() {
        // A transmitting boundary at L (mirrored transmembrane: the flux
        // enters with opposite orientation at the far end) makes M_LL
        // nonzero; with the pure ligand-receptor end it is exactly zero
        // because that boundary has no robot-side input path.
        let k = 200.0;
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dd").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl_tx = StateSpaceLTI::new(
            DMatrix::from_row_slice(1, 1, &[-k]),
            DMatrix::from_row_slice(1, 2, &[-83.0, k]),
            DMatrix::from_row_slice(2, 1, &[1.0, k]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -k]),
            BoundaryKind::Dirichlet,
            ["dc_dr_at_end", "c_robot"],
            ["c_at_end", "flux_into_robot"],
        )
        .unwrap();
        let ic = Interconnection::new(channel, h0, hl_tx).unwrap();
        let mll = ic.mll_exact(jomega(1e-2)).unwrap();
        assert!(mll.norm() > 1e-3, "M_LL = {mll}");

        let standard = standard_channel(200.0, 100.0);
        let mll0 = standard.mll_exact(jomega(1e-2)).unwrap();
        assert_eq!(mll0, Complex64::ZERO);
    }

    #[test]
    fn unit_reception_stub_reduces_approximation_to_gamma() {
        // With HL21 = 1 and no reflection path, the separated approximation
        // is Gamma_0L itself.
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "dn").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k: 200.0,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl =
            StateSpaceLTI::static_gain([[0.0, 0.0], [1.0, 0.0]], BoundaryKind::Neumann).unwrap();
        let ic = Interconnection::new(channel, h0, hl).unwrap();
        for omega in [1e-3, 1e-1] {
            let s = jomega(omega);
            let (gamma, _) = ic.gammas(s).unwrap();
            let approx = ic.m0l_approx(s).unwrap();
            assert_eq!(approx, gamma);
        }
    }

    #[test]
    fn response_record_is_consistent_with_individual_calls() {
        let ic = standard_channel(200.0, 100.0);
        let omega = 2.5e-2;
        let r = ic.response(omega).unwrap();
        let s = jomega(omega);
        assert_eq!(r.omega, omega);
        assert_eq!(r.s0, ic.self_interference(s, End::Zero).unwrap());
        assert_eq!(r.sl, ic.self_interference(s, End::L).unwrap());
        assert_eq!(r.gamma_0l, ic.gammas(s).unwrap().0);
        assert_eq!(r.m0l_exact, ic.m0l_exact(s).unwrap());
        assert_eq!(r.m0l_approx, ic.m0l_approx(s).unwrap());
        assert_eq!(r.mll_exact, Complex64::ZERO); // receiver has no robot input path
    }

    #[test]
    fn conjugate_symmetry_of_loop_responses() {
        let ic = standard_channel(200.0, 100.0);
        for omega in [1e-3, 1e-1, 2.0] {
            let up = ic
                .closed_loop(jomega(omega), Complex64::ONE, Complex64::ZERO)
                .unwrap();
            let down = ic
                .closed_loop(
                    ComplexFreq::from_s(Complex64::new(0.0, -omega)),
                    Complex64::ONE,
                    Complex64::ZERO,
                )
                .unwrap();
            assert!((down.zl - up.zl.conj()).norm() < 1e-12 * up.zl.norm().max(1e-30));
            assert!((down.yl - up.yl.conj()).norm() < 1e-12 * up.yl.norm().max(1e-30));
        }
    }

    #[test]
    fn mismatched_boundary_kind_is_rejected() {
        let channel = DiffusionChannel::with_kinds(83.0, 100.0, "nn").unwrap();
        let h0 = StateSpaceLTI::transmembrane(&TransmembraneParams {
            k: 1.0,
            mu: 83.0,
            dr: 1.0,
        })
        .unwrap();
        let hl = open_loop_stub(BoundaryKind::Neumann);
        assert!(Interconnection::new(channel, h0, hl).is_err());
    }

    #[test]
    fn robot_filter_scales_the_input() {
        let ic = standard_channel(200.0, 100.0);
        let filtered = ic
            .clone()
            .with_robot_tfs(RobotTf::FirstOrderLag { corner: 1e-2 }, RobotTf::Identity);
        let s = jomega(1e-2);
        let plain = ic.m0l_exact(s).unwrap();
        let lagged = filtered.m0l_exact(s).unwrap();
        let f = RobotTf::FirstOrderLag { corner: 1e-2 }.eval(s);
        assert!((lagged - plain * f).norm() < 1e-14 * plain.norm());
    }
}
