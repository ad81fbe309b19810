use thiserror::Error;

/// Errors shared across the library.
///
/// Frequency-domain evaluators attach the offending angular frequency so a
/// failed sweep can name the grid point that broke.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor argument violated its domain (nonpositive rate, bad
    /// dimension, inconsistent boundary pairing, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Evaluation at s = 0 exactly. The channel matrices contain 1/sqrt(s)
    /// factors; steady gains are reported as limits at a small positive
    /// frequency (1e-12 rad/s by convention) instead.
    #[error("evaluation at s = 0 is rejected; use a small positive omega (1e-12 rad/s) for steady-state limits")]
    ZeroFrequency,

    /// The reflection denominator of the diffusion transfer function fell
    /// below the underflow floor: the requested frequency sits on a pole of
    /// the undamped channel.
    #[error("diffusion transfer denominator underflow at omega = {omega:e} rad/s")]
    DenominatorUnderflow { omega: f64 },

    /// det(sI - A) fell below the underflow floor: the boundary system was
    /// evaluated at one of its own poles.
    #[error("resolvent of the boundary system is singular at omega = {omega:e} rad/s")]
    SingularResolvent { omega: f64 },

    /// The interconnection's loop matrix is numerically singular: an
    /// algebraic loop at this frequency.
    #[error("feedback interconnection is singular at omega = {omega:e} rad/s")]
    FeedbackSingular { omega: f64 },

    /// A frequency response came back non-finite at a sweep point.
    #[error("non-finite response at omega = {omega:e} rad/s")]
    NonFiniteResponse { omega: f64 },

    /// Bisection could not bracket the target gain level.
    #[error(
        "gain never reaches the target level while bracketing omega in [{lo:e}, {hi:e}] rad/s"
    )]
    NoCrossing { lo: f64, hi: f64 },

    /// The low-frequency reference gain keeps climbing as omega decreases, so
    /// a "relative to steady gain" cut-off is undefined for this response.
    #[error("steady gain does not converge at low frequency; relative cut-off is undefined")]
    SteadyGainUnbounded,

    /// A simulation configuration failed validation.
    #[error("simulation config error: {0}")]
    Config(String),

    /// The explicit scheme blew up (CFL violation or pathological parameters).
    #[error("simulation unstable: |c| reached {peak:e} at t = {t:e} s")]
    Unstable { peak: f64, t: f64 },

    /// The recorded trace never reached a periodic steady state.
    #[error("simulation not settled: {0}")]
    NotSettled(String),

    /// A numeric property check failed. This indicates an implementation bug,
    /// not a modeling limitation.
    #[error("property violation at omega_tilde = {at}: {what}")]
    PropertyViolation { at: f64, what: String },
}

pub type Result<T> = std::result::Result<T, Error>;
