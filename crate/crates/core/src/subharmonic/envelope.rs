use crate::geometry::TernaryParams;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// `h(z) = cosh x cos y` on the strip `|y| < π/2`, zero elsewhere.
pub fn h_eval(z: Complex64) -> f64 {
    if z.im.abs() < FRAC_PI_2 {
        z.re.cosh() * z.im.cos().max(0.0)
    } else {
        0.0
    }
}

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// One strip term: `ln( cosh(k·along) cos(k·off) )`, `-inf` where the cosine vanishes.
fn ln_strip(k: f64, along: f64, off: f64) -> f64 {
    let c = (k * off).cos();
    if c > 0.0 {
        ln_cosh(k * along) + c.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// The upper envelope `v_n` of eight shifted and rotated copies of
/// `h_n(z) = h(πz / (3d_n))`, one per corridor side.
///
/// Membership in each strip is tested with the same sums that decide copy
/// membership (`|t ± c| ≤ a`), so `v_n` is exactly zero on the closed copies.
#[derive(Clone, Debug)]
pub struct VEnvelope {
    pub n: usize,
    pub d: f64,
    pub xi: f64,
    a_prev: f64,
    step: f64,
    k: f64,
}

impl VEnvelope {
    pub fn new(params: &TernaryParams, n: usize) -> Self {
        let d = params.d(n);
        VEnvelope {
            n,
            d,
            xi: params.xi(n),
            a_prev: params.a(n - 1),
            step: params.step(n),
            k: PI / (3.0 * d),
        }
    }

    /// Strip contributions along one axis: `t` crosses the strips, `s` runs along them.
    fn ln_axis(&self, t: f64, s: f64) -> f64 {
        let (a, c, xi) = (self.a_prev, self.step, self.xi);
        let half = 1.5 * self.d;
        if t < -a && t + c > a {
            ln_strip(self.k, s, t + xi)
        } else if t > a && t - c < -a {
            ln_strip(self.k, s, t - xi)
        } else if t + c < -a && t + 3.0 * xi > -half {
            ln_strip(self.k, s, t + 3.0 * xi)
        } else if t - c > a && t - 3.0 * xi < half {
            ln_strip(self.k, s, t - 3.0 * xi)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `ln v_n(z)`; `-inf` where `v_n = 0`.
    pub fn ln_v(&self, z: Complex64) -> f64 {
        self.ln_axis(z.im, z.re).max(self.ln_axis(z.re, z.im))
    }

    pub fn v(&self, z: Complex64) -> f64 {
        self.ln_v(z).exp()
    }

    /// Points of `K_n^{-d_n/2}` where `v_n` equals `1/2`: on a strip axis, at depth `d_n`.
    pub fn predicted_minimizers(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(16);
        for center in [self.xi, 3.0 * self.xi] {
            for s in [-1.0, 1.0] {
                for off in [-self.d, self.d] {
                    let t = s * center + off;
                    out.push(Complex64::new(0.0, t));
                    out.push(Complex64::new(t, 0.0));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EpsilonSpec;

    fn env1() -> VEnvelope {
        VEnvelope::new(&TernaryParams::build(EpsilonSpec::Geometric, 3).unwrap(), 1)
    }

    #[test]
    fn h_values() {
        assert_eq!(h_eval(Complex64::new(0.0, 0.0)), 1.0);
        assert!((h_eval(Complex64::new(1.0, 0.0)) - 1.5430806348152437).abs() < 1e-15);
        assert_eq!(h_eval(Complex64::new(0.3, 2.0)), 0.0);
    }

    #[test]
    fn ln_cosh_large() {
        assert!((ln_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((ln_cosh(0.7) - 0.7f64.cosh().ln()).abs() < 1e-15);
    }

    #[test]
    fn v1_examples() {
        let e = env1();
        assert_eq!(e.xi, 1.5);
        assert_eq!(e.v(Complex64::new(0.0, 0.0)), 0.0);
        assert!((e.v(Complex64::new(1.5, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_formula() {
        // Direct evaluation of the eight terms through h.
        let e = env1();
        let i = Complex64::i();
        let k = PI / (3.0 * e.d);
        let hn = |w: Complex64| h_eval(w * k);
        for &(x, y) in &[(1.2, 0.3), (-4.4, 2.0), (0.1, -4.6), (2.0, 2.0), (3.9, -1.3), (-1.7, 4.2)] {
            let z = Complex64::new(x, y);
            let xi = e.xi;
            let direct = [
                hn(z + i * xi),
                hn(z - i * xi),
                hn(i * (z + xi)),
                hn(i * (z - xi)),
                hn(z + 3.0 * i * xi),
                hn(z - 3.0 * i * xi),
                hn(i * (z + 3.0 * xi)),
                hn(i * (z - 3.0 * xi)),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            assert!((e.v(z) - direct).abs() <= 1e-12 * direct.max(1.0), "z = {z}");
        }
    }

    #[test]
    fn minimizers_are_half() {
        let e = env1();
        for z in e.predicted_minimizers() {
            assert!((e.v(z) - 0.5).abs() < 1e-12, "z = {z}");
        }
    }
}
