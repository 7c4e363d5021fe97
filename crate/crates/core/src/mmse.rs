//! Linear MMSE reception of one stream of a 2x2 virtual MIMO system.
//!
//! Several coordinated schemes stack two received observations into
//! `y = H x + z` with `H = [h_d h_i]` (desired and interfering stream
//! columns, two receive branches) and independent Gaussian noise whose
//! covariance is diagonal but unequal across branches: one branch carries the
//! plain receiver noise `n`, the other carries `n * alpha` with
//! `alpha >= 1` accounting for forwarded relay noise.
//!
//! Two routes to the output SINR of the desired stream are kept separate on
//! purpose: [`sinr_mmse_closed`] evaluates the simplified closed form, and
//! [`sinr_mmse_oracle`] whitens and inverts the interference-plus-noise
//! covariance explicitly. The self-check command and the test suite hold
//! them against each other.

use crate::channel::ComplexGain;

/// Which receive branch carries the inflated noise power `n * alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePosition {
    /// Noise covariance `n * diag(alpha, 1)`.
    FirstBranch,
    /// Noise covariance `n * diag(1, alpha)`.
    SecondBranch,
}

/// One desired stream observed on two branches next to one interfering
/// stream, with per-branch noise `n * diag(.., ..)` selected by
/// `alpha_position`.
#[derive(Debug, Clone, Copy)]
pub struct VirtualMimo {
    /// Channel of the desired stream on branches 1 and 2.
    pub desired: [ComplexGain; 2],
    /// Channel of the interfering stream on branches 1 and 2.
    pub interferer: [ComplexGain; 2],
    /// Base noise power `n`. Must be strictly positive.
    pub noise: f64,
    /// Noise inflation factor on the branch named by `alpha_position`.
    /// Must be strictly positive.
    pub alpha: f64,
    pub alpha_position: NoisePosition,
}

impl VirtualMimo {
    fn check(&self) {
        assert!(
            self.noise > 0.0 && self.alpha > 0.0,
            "noise power and alpha must be positive, got n={} alpha={}",
            self.noise,
            self.alpha
        );
    }
}

/// Normalized squared determinant `|h_d1 h_i2 - h_i1 h_d2|^2 / n^2` of the
/// virtual channel matrix.
///
/// This is the array-gain term the closed-form SINR carries; it vanishes
/// exactly when the two stream columns are colinear.
pub fn gamma_b(m: &VirtualMimo) -> f64 {
    m.check();
    let det = m.desired[0] * m.interferer[1] - m.interferer[0] * m.desired[1];
    det.norm_sqr() / (m.noise * m.noise)
}

/// Normalized squared column correlation
/// `|h_d1* h_i1 + h_d2* h_i2|^2 / n^2` between the two streams.
///
/// Not used by the SINR expressions, which absorb the cross term through the
/// determinant; exposed for diagnostics.
pub fn gamma_a(m: &VirtualMimo) -> f64 {
    m.check();
    let corr = m.desired[0].conj() * m.interferer[0] + m.desired[1].conj() * m.interferer[1];
    corr.norm_sqr() / (m.noise * m.noise)
}

/// Closed-form MMSE output SINR of the desired stream.
pub fn sinr_mmse_closed(m: &VirtualMimo) -> f64 {
    m.check();
    let n = m.noise;
    let g_d1 = m.desired[0].norm_sqr() / n;
    let g_d2 = m.desired[1].norm_sqr() / n;
    let g_i1 = m.interferer[0].norm_sqr() / n;
    let g_i2 = m.interferer[1].norm_sqr() / n;
    let g_b = gamma_b(m);
    let a = m.alpha;
    match m.alpha_position {
        NoisePosition::SecondBranch => (a * g_d1 + g_d2 + g_b) / (a * g_i1 + g_i2 + a),
        NoisePosition::FirstBranch => (g_d1 + a * g_d2 + g_b) / (g_i1 + a * g_i2 + a),
    }
}

/// MMSE output SINR computed the long way round: form the
/// interference-plus-noise covariance `K = h_i h_i^H + N`, invert it with the
/// 2x2 cofactor formula, and evaluate the quadratic form `h_d^H K^-1 h_d`.
pub fn sinr_mmse_oracle(m: &VirtualMimo) -> f64 {
    m.check();
    let (n1, n2) = match m.alpha_position {
        NoisePosition::FirstBranch => (m.noise * m.alpha, m.noise),
        NoisePosition::SecondBranch => (m.noise, m.noise * m.alpha),
    };
    let k11 = m.interferer[0].norm_sqr() + n1;
    let k22 = m.interferer[1].norm_sqr() + n2;
    let k12 = m.interferer[0] * m.interferer[1].conj();
    let det = k11 * k22 - k12.norm_sqr();

    #[cfg(debug_assertions)]
    {
        // K is Hermitian positive definite; flag near-degenerate cases but
        // keep computing.
        let trace = k11 + k22;
        let gap = (trace * trace - 4.0 * det).max(0.0).sqrt();
        let (lo, hi) = ((trace - gap) / 2.0, (trace + gap) / 2.0);
        if !(lo > hi / 1e12) {
            eprintln!("mmse: near-degenerate covariance, eigenvalues {lo:e}/{hi:e}");
        }
    }

    let cross = (k12 * m.desired[0].conj() * m.desired[1]).re;
    (k22 * m.desired[0].norm_sqr() + k11 * m.desired[1].norm_sqr() - 2.0 * cross) / det
}

// ======================================================================
// Tests
// ======================================================================
