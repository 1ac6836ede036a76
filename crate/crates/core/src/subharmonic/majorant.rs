use crate::geometry::TernaryParams;
use serde::Serialize;

/// Smallest log-value whose exponential is a normal `f64`.
const LN_MIN_POSITIVE: f64 = -708.3964185322641;

/// `log M_B(n) = Bn + π Σ_{j≤n} 1/ε_j` and `log Δ_n = -M_B(n-1)/10`.
#[derive(Clone, Debug, Serialize)]
pub struct MajorantTable {
    pub b: f64,
    pub log_m: Vec<f64>,
    /// `-inf` once `M_B(n-1)` itself is beyond `f64` range.
    pub log_delta: Vec<f64>,
}

impl MajorantTable {
    pub fn new(params: &TernaryParams, b: f64) -> Self {
        let depth = params.depth();
        let mut log_m = Vec::with_capacity(depth + 1);
        let mut acc = 0.0;
        log_m.push(0.0);
        for n in 1..=depth {
            acc += std::f64::consts::PI / params.epsilon(n);
            log_m.push(b * n as f64 + acc);
        }
        // Δ_0 is never used; keep the index aligned with n.
        let mut log_delta = vec![0.0];
        for n in 1..=depth {
            log_delta.push(-log_m[n - 1].exp() / 10.0);
        }
        MajorantTable { b, log_m, log_delta }
    }

    pub fn log_m(&self, n: usize) -> f64 {
        self.log_m[n]
    }

    pub fn log_delta(&self, n: usize) -> f64 {
        self.log_delta[n]
    }

    /// True when `Δ_n` is too small for a normal `f64` (or `M_B(n-1)` overflows).
    pub fn delta_underflows(&self, n: usize) -> bool {
        self.log_delta[n] < LN_MIN_POSITIVE
    }

    /// True when `M_B(n)` is too large for an `f64`.
    pub fn m_overflows(&self, n: usize) -> bool {
        !self.log_m[n].exp().is_finite()
    }
}
