//! Error type shared by the whole pipeline.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside an operation's domain (`R <= 1`, `eps <= 0`, ...).
    Domain(String),
    /// The chart fails to be an immersion where it was sampled.
    DegenerateChart { u: f64, v: f64, area_density: f64 },
    /// The excluded chord ball is not a disk on the chart at this `eps`.
    EpsTooLarge { eps: f64, limit: f64 },
    /// Adaptive refinement ran out of depth before reaching the tolerance.
    ToleranceNotMet { value: f64, err_est: f64, rel_tol: f64 },
    /// The design matrix of an asymptotic fit is numerically rank deficient.
    IllConditionedFit { condition: f64 },
    /// Extrapolation of the counterterm-subtracted ladder did not settle.
    NonConvergence { value: f64, residual: f64, threshold: f64 },
    /// Root bracket invalid (no sign change, or reversed endpoints).
    Bracket { lo: f64, hi: f64 },
    /// A Moebius map was evaluated at (or too near) an inversion center.
    SingularPoint,
    /// Inversion center sits on or too close to the surface being composed.
    CenterOnSurface { min_dist: f64, required: f64 },
    /// Stereographic pole lies on the torus being projected.
    PoleOnTorus,
    /// The supplied point does not lie on the curve or surface.
    PointNotOnSurface { residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DegenerateChart { u, v, area_density } => write!(
                f,
                "degenerate chart at (u={u}, v={v}): area density {area_density}"
            ),
            Error::EpsTooLarge { eps, limit } => write!(
                f,
                "cutoff radius {eps} too large: excluded ball is not a chart disk (limit ~{limit})"
            ),
            Error::ToleranceNotMet { value, err_est, rel_tol } => write!(
                f,
                "tolerance not met: value {value}, err est {err_est}, requested rel tol {rel_tol}"
            ),
            Error::IllConditionedFit { condition } => {
                write!(f, "ill-conditioned fit: condition number {condition:.3e}")
            }
            Error::NonConvergence { value, residual, threshold } => write!(
                f,
                "renormalization did not converge: value {value}, fit residual {residual:.3e} > {threshold:.3e}"
            ),
            Error::Bracket { lo, hi } => write!(f, "invalid bracket [{lo}, {hi}]"),
            Error::SingularPoint => write!(f, "evaluation at an inversion center"),
            Error::CenterOnSurface { min_dist, required } => write!(
                f,
                "inversion center too close to surface: distance {min_dist} < required {required}"
            ),
            Error::PoleOnTorus => write!(f, "projection pole lies on the torus"),
            Error::PointNotOnSurface { residual } => {
                write!(f, "point is not on the surface: chord residual {residual:.3e}")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
