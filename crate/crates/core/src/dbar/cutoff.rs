use crate::geometry::TernaryParams;
use num_complex::Complex64;

/// `1 - s^3 (6s^2 - 15s + 10)`: equal to 1 at `s ≤ 0`, 0 at `s ≥ 1`, `C^2`.
pub fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// Derivative of [`ramp`] in `s`; its extreme value is `-15/8` at `s = 1/2`.
pub fn ramp_prime(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        -30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

/// `χ_n(z) = φ(|x|) φ(|y|)`, equal to 1 on `S_{n-1}^{+3d_n/5}` and 0 off
/// `S_{n-1}^{+4d_n/5}`.
#[derive(Clone, Copy, Debug)]
pub struct CutoffFamily {
    pub n: usize,
    pub half_side: f64,
    pub d: f64,
    /// `sup_n ‖∇χ_n‖_∞`, reached in the narrowest frame (level 1) mid-ramp along a side.
    pub c_chi: f64,
}

/// `(15/8) / (d_1/5)`. In the corners of the frame both ramps are active but
/// each damps the other's slope, so the corner never beats the side value.
pub fn c_chi(params: &TernaryParams) -> f64 {
    (15.0 / 8.0) / (params.d(1) / 5.0)
}

impl CutoffFamily {
    pub fn new(params: &TernaryParams, n: usize) -> Self {
        CutoffFamily { n, half_side: params.a(n - 1), d: params.d(n), c_chi: c_chi(params) }
    }

    pub fn inner(&self) -> f64 {
        self.half_side + 0.6 * self.d
    }

    pub fn outer(&self) -> f64 {
        self.half_side + 0.8 * self.d
    }

    fn phi(&self, t: f64) -> (f64, f64) {
        let w = 0.2 * self.d;
        let s = (t.abs() - self.inner()) / w;
        (ramp(s), ramp_prime(s) / w * t.signum())
    }

    /// `(χ, ∂̄χ)` with `∂̄ = (∂_x + i ∂_y)/2`.
    pub fn eval(&self, z: Complex64) -> (f64, Complex64) {
        let (px, dpx) = self.phi(z.re);
        let (py, dpy) = self.phi(z.im);
        (px * py, Complex64::new(0.5 * dpx * py, 0.5 * px * dpy))
    }
}
