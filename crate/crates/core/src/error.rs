use core::fmt;

use crate::models::State;

/// Failure modes of the numerical routines.
///
/// Every variant names a specific, recoverable condition; callers that sweep
/// over parameter grids typically record the variant per cell instead of
/// aborting the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// The state left the model's physical domain (negative concentration
    /// beyond the guard tolerance).
    DomainEscape { t: f64, state: State },
    /// The error controller demanded a step below the resolvable floor;
    /// treated as a stiffness alarm.
    StepSizeUnderflow { t: f64 },
    /// Integration exceeded the configured time budget.
    MaxTimeExceeded { t: f64 },
    /// No section crossing exists in the requested span.
    NoCrossing,
    /// The orbit did not settle onto a periodic solution (it converged to an
    /// equilibrium, escaped, or the return map failed to contract).
    NotPeriodic,
    /// Reversed-time search converged to the equilibrium or left the annulus
    /// between the stable cycles: the seed was not between the cycles.
    WrongBasin,
    /// Newton iteration failed to reach the residual target.
    NoConvergence,
    /// Attractor identification disagreed across the seed fan.
    Ambiguous,
    /// No repelling cycle separates the basins at these parameters.
    NoSeparatrix,
    /// The arc set is empty along the whole path; no instability onset.
    NoOnset,
    /// The queried point is too far from the cycle to carry a phase.
    NotOnCycle,
    /// Two distinct local maxima of x tie at the anchor tolerance.
    AmbiguousAnchor,
    /// The input shift would drive the parameter past the fold cap.
    PathOutOfRegion,
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DomainEscape { .. } => "DomainEscape",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::MaxTimeExceeded { .. } => "MaxTimeExceeded",
            Error::NoCrossing => "NoCrossing",
            Error::NotPeriodic => "NotPeriodic",
            Error::WrongBasin => "WrongBasin",
            Error::NoConvergence => "NoConvergence",
            Error::Ambiguous => "Ambiguous",
            Error::NoSeparatrix => "NoSeparatrix",
            Error::NoOnset => "NoOnset",
            Error::NotOnCycle => "NotOnCycle",
            Error::AmbiguousAnchor => "AmbiguousAnchor",
            Error::PathOutOfRegion => "PathOutOfRegion",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DomainEscape { t, state } => {
                write!(f, "state ({}, {}) left the model domain at t = {}", state.x, state.y, t)
            }
            Error::StepSizeUnderflow { t } => {
                write!(f, "step size underflow at t = {} (stiffness alarm)", t)
            }
            Error::MaxTimeExceeded { t } => write!(f, "integration budget exhausted at t = {}", t),
            Error::NoCrossing => write!(f, "no section crossing in span"),
            Error::NotPeriodic => write!(f, "orbit did not converge to a periodic solution"),
            Error::WrongBasin => write!(f, "seed was outside the annulus between the stable cycles"),
            Error::NoConvergence => write!(f, "Newton iteration did not converge"),
            Error::Ambiguous => write!(f, "attractor census inconsistent across seeds"),
            Error::NoSeparatrix => write!(f, "no repelling cycle at these parameters"),
            Error::NoOnset => write!(f, "no basin-instability onset along the path"),
            Error::NotOnCycle => write!(f, "point is not on the cycle"),
            Error::AmbiguousAnchor => write!(f, "two local maxima of x tie at the anchor tolerance"),
            Error::PathOutOfRegion => write!(f, "shift magnitude exceeds the fold cap of the path"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
