use super::evaluator::SubharmonicEvaluator;
use super::envelope::VEnvelope;
use super::SubharmonicError;
use crate::geometry::rect::region_contains;
use crate::geometry::{omega, Rect, TernaryParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Measured margins of the three properties of `u_n`.
#[derive(Clone, Debug, Serialize)]
pub struct ShReport {
    pub level: usize,
    pub grid: usize,
    pub b: f64,
    /// Largest relative deviation `|u_n(ζ - w_j) / u_{n-1}(ζ) - 1|` over `ζ ∈ S_{n-1}` and all `j`.
    pub prop_i_maxdiff: f64,
    pub prop_i_tolerance: f64,
    /// `log(e^{-B+10} M_B(n)) - log max u_n` over `S_n^{+d_{n+1}}`.
    pub prop_ii_margin_log: f64,
    pub prop_ii_measured_log: f64,
    /// `log min u_n - log(M_B(n-1)/2)` over the grid points of `K_n^{-d_n/2}`.
    pub prop_iii_margin_log: f64,
    pub prop_iii_measured_log: f64,
    pub prop_iii_points: usize,
    /// `log(M_B(n-1) min v_n) - log max u_{n-1}` on `∂(S_{n-1}^{+d_n/2})`.
    pub gluing_margin_log: f64,
    /// `(π/ε_n + 3π) - log max v_n` over `S_n^{+d_{n+1}}`.
    pub v_upper_margin_log: f64,
}

fn cell_grid(half: f64, n: usize) -> impl IndexedParallelIterator<Item = Complex64> {
    let h = 2.0 * half / n as f64;
    (0..n * n).into_par_iter().map(move |k| {
        Complex64::new(-half + ((k % n) as f64 + 0.5) * h, -half + ((k / n) as f64 + 0.5) * h)
    })
}

/// Grid including the boundary of `[-half, half]^2`.
fn node_grid(half: f64, n: usize) -> impl IndexedParallelIterator<Item = Complex64> {
    let m = n + 1;
    (0..m * m).into_par_iter().map(move |k| {
        let t = |i: usize| -half * (1.0 - i as f64 / n as f64) + half * (i as f64 / n as f64);
        Complex64::new(t(k % m), t(k / m))
    })
}

fn par_max(it: impl ParallelIterator<Item = f64>) -> f64 {
    it.reduce(|| f64::NEG_INFINITY, f64::max)
}


/// Check (i)–(iii) for `u_n` and the gluing claim behind subharmonicity.
/// Property (ii) looks at `S_n^{+d_{n+1}}`, so the system must reach level `n + 1`.
pub fn verify_sh(eval: &SubharmonicEvaluator, n: usize, grid: usize) -> Result<ShReport, SubharmonicError> {
    if n == 0 || n > eval.level() {
        return Err(SubharmonicError::DepthExceeded { requested: n, depth: eval.level() });
    }
    if grid < 64 {
        return Err(SubharmonicError::GridTooSmall(grid));
    }
    let p = eval.params();
    if n + 1 > p.depth() {
        return Err(SubharmonicError::DepthExceeded { requested: n + 1, depth: p.depth() });
    }
    let maj = eval.majorants();

    // (i)
    let a_prev = p.a(n - 1);
    let shifts: Vec<Complex64> = (0..9).map(|j| p.w(j, n)).collect::<Result<_, _>>()?;
    let prop_i_maxdiff = par_max(cell_grid(a_prev, grid).map(|zeta| {
        let base = eval.ln_u(n - 1, zeta).expect("level checked");
        shifts
            .iter()
            .map(|w| {
                let l = eval.ln_u(n, zeta - w).expect("level checked");
                if l == base {
                    0.0
                } else {
                    (l - base).exp_m1().abs()
                }
            })
            .fold(0.0, f64::max)
    }));

    // (ii) and the envelope bound
    let reach = p.a(n) + p.d(n + 1);
    let env = eval.envelope(n);
    let prop_ii_measured_log = par_max(node_grid(reach, grid).map(|z| eval.ln_u(n, z).expect("level checked")));
    let bound_ii = -maj.b + 10.0 + maj.log_m(n);
    let v_max = par_max(node_grid(reach, grid).map(|z| env.ln_v(z)));
    let v_bound = std::f64::consts::PI * (1.0 / p.epsilon(n) + 3.0);

    // (iii)
    let region = p.corridor_region(n, 0.5 * p.d(n));
    let outer = p.a(n) + 3.0 * p.d(n);
    let (count, prop_iii_measured_log) = cell_grid(outer, grid)
        .filter(|z| region_contains(&region, z.re, z.im))
        .map(|z| (1usize, eval.ln_u(n, z).expect("level checked")))
        .reduce(|| (0, f64::INFINITY), |a, b| (a.0 + b.0, a.1.min(b.1)));
    let bound_iii = maj.log_m(n - 1) - std::f64::consts::LN_2;

    Ok(ShReport {
        level: n,
        grid,
        b: maj.b,
        prop_i_maxdiff,
        prop_i_tolerance: 1e-9,
        prop_ii_margin_log: bound_ii - prop_ii_measured_log,
        prop_ii_measured_log,
        prop_iii_margin_log: prop_iii_measured_log - bound_iii,
        prop_iii_measured_log,
        prop_iii_points: count,
        gluing_margin_log: gluing_margin(eval, n, 4 * grid)?,
        v_upper_margin_log: v_bound - v_max,
    })
}

/// `log(M_B(n-1) min v_n) - log max u_{n-1}` over `samples` points on `∂(S_{n-1}^{+d_n/2})`.
pub fn gluing_margin(eval: &SubharmonicEvaluator, n: usize, samples: usize) -> Result<f64, SubharmonicError> {
    let p = eval.params();
    let r = p.a(n - 1) + 0.5 * p.d(n);
    let per_side = samples.div_ceil(4).max(2);
    let pts: Vec<Complex64> = (0..per_side)
        .flat_map(|i| {
            let t = -r + 2.0 * r * i as f64 / per_side as f64;
            [
                Complex64::new(t, -r),
                Complex64::new(r, t),
                Complex64::new(-t, r),
                Complex64::new(-r, -t),
            ]
        })
        .collect();
    let env = eval.envelope(n);
    let mut u_max = f64::NEG_INFINITY;
    let mut v_min = f64::INFINITY;
    for z in pts {
        u_max = u_max.max(eval.ln_u(n - 1, z)?);
        v_min = v_min.min(env.ln_v(z));
    }
    Ok(eval.majorants().log_m(n - 1) + v_min - u_max)
}

/// Minimum of `v_n` over `K_n^{-d_n/2}`, sampled cell by cell from the exact
/// rectangle tiling. Every cell gets an odd number of samples per side,
/// endpoints included, so cell midlines and edges are hit exactly.
#[derive(Clone, Debug, Serialize)]
pub struct CorridorMin {
    pub level: usize,
    pub min_v: f64,
    pub argmin: (f64, f64),
    /// Distance from the argmin to the nearest predicted minimizer.
    pub argmin_offset: f64,
    /// Largest `|v_n - 1/2|` over the predicted minimizers.
    pub predicted_deviation: f64,
    pub samples: usize,
}

pub fn corridor_v_min(params: &TernaryParams, n: usize, budget: usize) -> CorridorMin {
    let env = VEnvelope::new(params, n);
    let region = params.corridor_region(n, 0.5 * params.d(n));
    let total_area: f64 = region.iter().map(Rect::area).sum();
    let density = budget as f64 / total_area;
    let samples: Vec<Complex64> = region
        .iter()
        .flat_map(|r| {
            let odd = |len: f64| {
                let m = ((len * density.sqrt()).ceil() as usize).max(3);
                m | 1
            };
            let (mx, my) = (odd(r.width()), odd(r.height()));
            let r = r.clone();
            (0..mx * my).map(move |k| {
                let lerp = |lo: f64, hi: f64, i: usize, m: usize| {
                    let t = i as f64 / (m - 1) as f64;
                    lo * (1.0 - t) + hi * t
                };
                Complex64::new(lerp(r.x0, r.x1, k % mx, mx), lerp(r.y0, r.y1, k / mx, my))
            })
        })
        .collect();
    let (min_v, argmin) = samples
        .par_iter()
        .map(|&z| (env.v(z), z))
        .reduce(
            || (f64::INFINITY, Complex64::new(0.0, 0.0)),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1.im, b.1.re) < (a.1.im, a.1.re)) { b } else { a },
        );
    let predicted = env.predicted_minimizers();
    let argmin_offset = predicted.iter().map(|q| (q - argmin).norm()).fold(f64::INFINITY, f64::min);
    let predicted_deviation = predicted.iter().map(|&q| (env.v(q) - 0.5).abs()).fold(0.0, f64::max);
    CorridorMin {
        level: n,
        min_v,
        argmin: (argmin.re, argmin.im),
        argmin_offset,
        predicted_deviation,
        samples: samples.len(),
    }
}

/// `u_n` is the copy of `u_{n-1}` on each `τ_{w_j} S_{n-1}`: a sample over the copy centers.
pub fn copy_centers_agree(eval: &SubharmonicEvaluator, n: usize) -> bool {
    let p = eval.params();
    (0..9).all(|j| {
        let w = omega(j) * p.step(n);
        eval.ln_u(n, -w).ok() == eval.ln_u(n - 1, Complex64::new(0.0, 0.0)).ok()
    })
}
