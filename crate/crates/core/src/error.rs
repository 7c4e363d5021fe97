use crate::schemes::SchemeKind;

/// Errors reported by the simulator's fallible entry points.
///
/// Pure per-draw formulas panic on contract violations (negative SNR,
/// non-positive noise) instead; everything reachable from user-supplied
/// configuration goes through this enum.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("noise power must be strictly positive, got {0}")]
    NonPositiveNoise(f64),

    #[error("network needs at least one user per side")]
    EmptyNetwork,

    #[error("user index {index} out of range for {count} users per side")]
    UserIndexOutOfRange { index: usize, count: usize },

    #[error("prioritizing factor must lie strictly inside (-1, 1), got {0}")]
    PriorityOutOfRange(f64),

    #[error("scheme {0:?} has no prioritized variant; only coordinated schemes do")]
    SchemeNotCoordinated(SchemeKind),

    #[error("uplink probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("session count must be at least 1")]
    NoSessions,

    #[error("all waiting-list queues are empty")]
    EmptyWaitingList,

    #[error("prioritizing-factor grid must not be empty")]
    EmptyGrid,
}
