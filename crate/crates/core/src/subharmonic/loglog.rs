use super::SubharmonicError;
use crate::quadrature::gauss_legendre_on;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize)]
pub struct LoglogEstimate {
    pub radius: f64,
    pub eps: f64,
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct LoglogOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Refinement levels allowed before giving up.
    pub max_level: u32,
}

impl Default for LoglogOptions {
    fn default() -> Self {
        LoglogOptions { rel_tol: 1e-2, abs_tol: 1e-12, max_level: 5 }
    }
}

fn disk_mean<F>(ln_u: &F, radius: f64, eps: f64, level: u32) -> (f64, usize)
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let panels = 4usize << level;
    let n_theta = 64usize << level;
    let dr = radius / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| {
            let (x, w) = gauss_legendre_on(8, k as f64 * dr, (k + 1) as f64 * dr);
            x.into_iter().zip(w)
        })
        .collect();
    let dtheta = 2.0 * PI / n_theta as f64;
    let rows: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let ring: f64 = (0..n_theta)
                .map(|i| {
                    let l = ln_u(Complex64::from_polar(r, i as f64 * dtheta));
                    if l > 0.0 {
                        l.powf(1.0 + eps)
                    } else {
                        0.0
                    }
                })
                .sum();
            w * r * ring * dtheta
        })
        .collect();
    (rows.iter().sum::<f64>() / (PI * radius * radius), nodes.len() * n_theta)
}

/// Mean of `(log₊ u)^{1+ε}` over the disk of radius `R`, from a handle
/// returning `ln u` (so huge `u` stay representable). Polar product rule,
/// refined until two consecutive levels agree.
pub fn loglog_integral<F>(
    ln_u: F,
    radius: f64,
    eps: f64,
    opts: LoglogOptions,
) -> Result<LoglogEstimate, SubharmonicError>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    if !(radius > 0.0) || !(eps > 0.0) {
        return Err(SubharmonicError::InvalidArgument(format!(
            "radius and eps must be positive, got {radius} and {eps}"
        )));
    }
    let (mut prev, mut nodes) = disk_mean(&ln_u, radius, eps, 0);
    let mut last_err = f64::INFINITY;
    for level in 1..=opts.max_level {
        let (cur, n) = disk_mean(&ln_u, radius, eps, level);
        nodes += n;
        last_err = (cur - prev).abs();
        if last_err <= opts.rel_tol * cur.abs() + opts.abs_tol {
            return Ok(LoglogEstimate { radius, eps, value: cur, error: last_err, nodes });
        }
        prev = cur;
    }
    Err(SubharmonicError::QuadratureFailure { achieved: last_err, value: prev })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let e = loglog_integral(|_| 1.0, 3.0, 0.1, LoglogOptions::default()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let h = loglog_integral(|_| 0.5f64.ln(), 3.0, 0.1, LoglogOptions::default()).unwrap();
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn radial_oracle() {
        // ln u = |z|: mean of r^{1+ε} over the disk is 2R^{1+ε}/(3+ε)
        let e = loglog_integral(|z| z.norm(), 2.0, 0.5, LoglogOptions::default()).unwrap();
        let exact = 2.0 * 2f64.powf(1.5) / 3.5;
        assert!((e.value - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn failure_is_reported() {
        let opts = LoglogOptions { rel_tol: 0.0, abs_tol: 0.0, max_level: 1 };
        let r = loglog_integral(|z| (40.0 * z.re).sin().abs() * 10.0, 1.0, 0.1, opts);
        assert!(matches!(r, Err(SubharmonicError::QuadratureFailure { .. })));
    }
}
