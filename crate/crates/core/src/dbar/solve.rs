use super::cauchy::cauchy_transform;
use super::refine::ArnoldiPoly;
use super::DbarError;
use crate::field::{ComplexField, GridField};
use crate::logspace::ln_sum_exp;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Particular solution by the Cauchy transform only.
    Cauchy,
    /// Subtract the weighted least-squares polynomial projection as well.
    WeightedRefine,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub mode: SolveMode,
    /// Degree of the holomorphic projection in refine mode.
    pub degree: usize,
    /// Keep weights as logarithms; linear weights fail once `e^{-u}` underflows.
    pub log_domain: bool,
    /// Cells whose log weight sits more than this below the maximum are left out of the fit.
    pub fit_cutoff_log: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: SolveMode::WeightedRefine, degree: 24, log_domain: true, fit_cutoff_log: 80.0 }
    }
}

#[derive(Clone, Debug)]
pub struct DbarSolveResult {
    pub alpha: ComplexField,
    pub projection: Option<ArnoldiPoly>,
    /// `max |∂̄α - rhs|` over interior cells, central differences.
    pub residual_max: f64,
    /// Same, restricted to cells whose difference stencil sees a constant rhs.
    pub residual_max_smooth: f64,
    /// `(Σ |∂̄α - rhs|² h²)^{1/2}` over interior cells.
    pub residual_l2: f64,
    /// `ln ∫ |α|² e^{-u} dA/(1+|z|²)²` over the grid.
    pub horm_lhs_log: f64,
    /// `ln (½ ∫ |rhs|² e^{-u} dA)` over the grid.
    pub horm_rhs_log: f64,
    pub horm_holds: bool,
    pub fit_cells: usize,
}

impl DbarSolveResult {
    pub fn horm_margin_log(&self) -> f64 {
        self.horm_rhs_log - self.horm_lhs_log
    }
}

fn ln_abs2(v: Complex64) -> f64 {
    2.0 * v.norm().ln()
}

/// Solve `∂̄α = rhs` on the grid of `rhs`.
///
/// `ln_u` holds `ln u` on the same grid (absent means `u = 0`). When
/// `particular` is given it is used as the Cauchy solution instead of the
/// discrete convolution, which is how the pipeline passes the exact
/// transform `g` of `∂̄g` for compactly supported `g`.
pub fn dbar_solve(
    rhs: &ComplexField,
    ln_u: Option<&GridField>,
    opts: &SolveOptions,
    particular: Option<&ComplexField>,
) -> Result<DbarSolveResult, DbarError> {
    let n = rhs.n();
    let zero = Complex64::new(0.0, 0.0);
    let v = &rhs.values;
    let touches = (0..n).any(|i| v[[0, i]] != zero || v[[n - 1, i]] != zero || v[[i, 0]] != zero || v[[i, n - 1]] != zero);
    if touches {
        return Err(DbarError::UnsupportedRhs);
    }
    let u_at = |ix: usize, iy: usize| ln_u.map_or(0.0, |f| f.values[[iy, ix]].exp());
    if let (false, Some(_)) = (opts.log_domain, ln_u) {
        let under = (0..n * n).filter(|k| (-u_at(k % n, k / n)).exp() == 0.0).count();
        if under > 0 {
            return Err(DbarError::WeightUnderflow { cells: under });
        }
    }
    let mut alpha = match particular {
        Some(p) => p.clone(),
        None => cauchy_transform(rhs),
    };
    let log_w: Vec<f64> = (0..n * n)
        .map(|k| {
            let (ix, iy) = (k % n, k / n);
            -u_at(ix, iy) - 2.0 * (1.0 + rhs.point(ix, iy).norm_sqr()).ln()
        })
        .collect();

    let mut projection = None;
    let mut fit_cells = 0;
    if opts.mode == SolveMode::WeightedRefine {
        let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let keep: Vec<usize> = (0..n * n).filter(|&k| log_w[k] >= top - opts.fit_cutoff_log).collect();
        fit_cells = keep.len();
        let pts: Vec<Complex64> = keep.iter().map(|&k| rhs.point(k % n, k / n)).collect();
        let vals: Vec<Complex64> = keep.iter().map(|&k| alpha.values[[k / n, k % n]]).collect();
        let lw: Vec<f64> = keep.iter().map(|&k| log_w[k]).collect();
        let poly = ArnoldiPoly::fit(&pts, &vals, &lw, opts.degree);
        alpha = alpha.map(|z, a| a - poly.eval(z));
        projection = Some(poly);
    }

    let (mut rmax, mut rsmooth, mut rsq) = (0.0f64, 0.0f64, 0.0f64);
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let r = (alpha.dbar_at(ix, iy) - v[[iy, ix]]).norm();
            rmax = rmax.max(r);
            rsq += r * r;
            let c = v[[iy, ix]];
            if [v[[iy, ix - 1]], v[[iy, ix + 1]], v[[iy - 1, ix]], v[[iy + 1, ix]]].iter().all(|&s| s == c) {
                rsmooth = rsmooth.max(r);
            }
        }
    }
    let ln_h2 = 2.0 * rhs.h.ln();
    let lhs = ln_sum_exp((0..n * n).map(|k| ln_abs2(alpha.values[[k / n, k % n]]) + log_w[k] + ln_h2));
    let rhs_log = 0.5f64.ln() + ln_sum_exp((0..n * n).map(|k| ln_abs2(v[[k / n, k % n]]) - u_at(k % n, k / n) + ln_h2));
    Ok(DbarSolveResult {
        alpha,
        projection,
        residual_max: rmax,
        residual_max_smooth: rsmooth,
        residual_l2: rsq.sqrt() * rhs.h,
        horm_lhs_log: lhs,
        horm_rhs_log: rhs_log,
        horm_holds: lhs < rhs_log,
        fit_cells,
    })
}
