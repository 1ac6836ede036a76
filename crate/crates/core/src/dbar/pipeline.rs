use super::cauchy::cauchy_transform;
use super::cutoff::CutoffFamily;
use super::refine::ArnoldiPoly;
use super::solve::{dbar_solve, SolveMode, SolveOptions};
use super::DbarError;
use crate::field::{ComplexField, GridField};
use crate::geometry::{omega, rect, GeometryError, Square, TernaryParams};
use crate::quadrature::gauss_legendre_on;
use crate::subharmonic::SubharmonicEvaluator;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// How an [`EntireApprox`] is evaluated.
#[derive(Clone, Debug)]
pub enum Repr {
    /// `G_1(z) = z`.
    Identity,
    /// A polynomial, evaluated exactly everywhere.
    Polynomial(ArnoldiPoly),
    /// Grid values only, bicubic off-grid.
    Grid,
}

#[derive(Clone, Debug)]
pub struct EntireApprox {
    pub level: usize,
    pub repr: Repr,
    /// Samples over `S_n^{+9d_{n+1}/10}` (absent for the identity).
    pub grid: Option<ComplexField>,
    /// `max |∂̄_h G_n|` over interior cells.
    pub residual_max: f64,
    /// `residual_max · h / max |G_n|`.
    pub residual_rel: f64,
    /// Largest gap between bicubic interpolation and the exact representation.
    pub interp_error: f64,
}

impl EntireApprox {
    pub fn identity() -> Self {
        EntireApprox { level: 1, repr: Repr::Identity, grid: None, residual_max: 0.0, residual_rel: 0.0, interp_error: 0.0 }
    }

    /// `G_n(z)`; `None` off the grid of a grid-only representation.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        match (&self.repr, &self.grid) {
            (Repr::Identity, _) => Some(z),
            (Repr::Polynomial(p), _) => Some(p.eval(z)),
            (Repr::Grid, Some(g)) => g.bicubic(z),
            (Repr::Grid, None) => None,
        }
    }

    /// Half side of the centered square where [`eval`](Self::eval) is defined.
    pub fn reach(&self) -> f64 {
        match (&self.repr, &self.grid) {
            (Repr::Grid, Some(g)) => g.square().half_side - 2.0 * g.h,
            _ => f64::INFINITY,
        }
    }
}

/// `g_n` and `∂̄g_n` on the level-`n` grid.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub g: ComplexField,
    pub rhs: ComplexField,
    /// Largest `|G_{n-1}|` met while assembling.
    pub prev_max: f64,
}

fn level_square(params: &TernaryParams, n: usize) -> Result<Square, DbarError> {
    if n + 1 > params.depth() {
        return Err(GeometryError::DepthExceeded { requested: n + 1, depth: params.depth() }.into());
    }
    Ok(params.s(n).inflate(0.9 * params.d(n + 1)))
}

/// `g_n = Σ_j τ_{w_j}(χ_n G_{n-1})` and `∂̄g_n = Σ_j τ_{w_j}(G_{n-1} ∂̄χ_n)` on
/// the `grid x grid` cells of `S_n^{+9d_{n+1}/10}`.
pub fn assemble_g(params: &TernaryParams, prev: &EntireApprox, n: usize, grid: usize) -> Result<Assembled, DbarError> {
    let square = level_square(params, n)?;
    let cut = CutoffFamily::new(params, n);
    if prev.reach() < cut.outer() {
        return Err(DbarError::CoverageGap { level: n - 1, needed: cut.outer(), available: prev.reach() });
    }
    let step = params.step(n);
    let outer = cut.outer();
    let zero = Complex64::new(0.0, 0.0);
    let cells: Vec<(Complex64, Complex64, f64)> = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let z = ComplexField::zeros(&square, grid).point(k % grid, k / grid);
            for j in 0..9 {
                let q = z + omega(j) * step;
                if q.re.abs() < outer && q.im.abs() < outer {
                    let (chi, dchi) = cut.eval(q);
                    if chi == 0.0 {
                        return (zero, zero, 0.0);
                    }
                    let gp = prev.eval(q).expect("coverage checked");
                    return (gp * chi, gp * dchi, gp.norm());
                }
            }
            (zero, zero, 0.0)
        })
        .collect();
    let mut g = ComplexField::zeros(&square, grid);
    let mut rhs = g.clone();
    let mut prev_max = 0.0f64;
    for (k, (gv, rv, m)) in cells.into_iter().enumerate() {
        g.values[[k / grid, k % grid]] = gv;
        rhs.values[[k / grid, k % grid]] = rv;
        prev_max = prev_max.max(m);
    }
    Ok(Assembled { g, rhs, prev_max })
}

#[derive(Clone, Copy, Debug)]
#[derive(Default)]
pub struct PipelineOptions {
    pub solve: SolveOptions,
    /// Fail with `DepthInfeasible` instead of reporting when `Δ_n` underflows.
    pub strict_concordance: bool,
    /// Radius of the sub-mean-value disks; `None` means `d_1/20`.
    pub c0: Option<f64>,
}


#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    /// `max_j max_{S_{n-1}} |G_{n-1}(ζ) - G_n(ζ + w_j)|`.
    pub concordance_delta: Option<f64>,
    /// `ln Δ_n`; the target is `concordance_delta < Δ_n / 10`.
    pub delta_log: Option<f64>,
    pub concordance_ok: Option<bool>,
    /// `max_{S_0} |G_n(z) - z|`.
    pub s0_deviation: f64,
    /// `ln max |G_n|` over the level grid.
    #[serde(rename = "logM_measured")]
    pub log_m_measured: f64,
    /// `ln` of the growth target `e^{-B+10} M_B(n)` for `log M_{G_n}`.
    #[serde(rename = "logM_bound_log")]
    pub log_m_bound_log: f64,
    pub growth_ok: bool,
    pub horm_lhs_log: Option<f64>,
    pub horm_rhs_log: Option<f64>,
    pub horm_holds: Option<bool>,
    pub residual_max: f64,
    pub residual_rel: f64,
    pub interp_error: f64,
    /// `max |C_h[∂̄g_n] - g_n|`: discretization gap of the convolution against the exact transform.
    pub cauchy_discrepancy: Option<f64>,
    pub support_ok: Option<bool>,
    pub bound_chain_ok: Option<bool>,
    pub rhs_max: Option<f64>,
    pub rhs_bound: Option<f64>,
    /// Largest `|G_n(z)| / avg_{D(z, c_0)} |G_n|` over the sample points.
    pub mean_value_ratio: f64,
    pub fit_cells: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub levels: Vec<EntireApprox>,
    pub reports: Vec<LevelReport>,
}

fn nodes(square: &Square, m: usize) -> impl Iterator<Item = Complex64> + '_ {
    let lo = square.center - Complex64::new(square.half_side, square.half_side);
    let step = square.side() / (m - 1) as f64;
    (0..m * m).map(move |k| lo + Complex64::new((k % m) as f64 * step, (k / m) as f64 * step))
}

fn mean_value_ratio(g: &EntireApprox, square: &Square, c0: f64) -> f64 {
    let (rs, ws) = gauss_legendre_on(12, 0.0, c0);
    let angles = 32;
    let inner = square.deflate(c0).unwrap_or(*square);
    nodes(&inner, 9)
        .filter_map(|z| {
            let center = g.eval(z)?.norm();
            let mut acc = 0.0;
            for (&r, &w) in rs.iter().zip(&ws) {
                for t in 0..angles {
                    let p = z + Complex64::from_polar(r, 2.0 * PI * t as f64 / angles as f64);
                    acc += w * r * g.eval(p)?.norm();
                }
            }
            let avg = acc * 2.0 * PI / angles as f64 / (PI * c0 * c0);
            (avg > 0.0).then_some(center / avg)
        })
        .fold(0.0, f64::max)
}

fn max_dev<F: Fn(Complex64) -> Option<f64>>(pts: impl Iterator<Item = Complex64>, f: F) -> f64 {
    pts.filter_map(f).fold(0.0, f64::max)
}

fn identity_report(params: &TernaryParams, b: f64, c0: f64) -> Result<LevelReport, DbarError> {
    let square = level_square(params, 1)?;
    let eval = SubharmonicEvaluator::new(params.clone(), b, 1)?;
    let log_m = (std::f64::consts::SQRT_2 * square.half_side).ln();
    let bound = -b + 10.0 + eval.majorants().log_m(1);
    Ok(LevelReport {
        level: 1,
        concordance_delta: None,
        delta_log: None,
        concordance_ok: None,
        s0_deviation: 0.0,
        log_m_measured: log_m,
        log_m_bound_log: bound,
        growth_ok: log_m.max(0.0).ln() < bound,
        horm_lhs_log: None,
        horm_rhs_log: None,
        horm_holds: None,
        residual_max: 0.0,
        residual_rel: 0.0,
        interp_error: 0.0,
        cauchy_discrepancy: None,
        support_ok: None,
        bound_chain_ok: None,
        rhs_max: None,
        rhs_bound: None,
        mean_value_ratio: mean_value_ratio(&EntireApprox::identity(), &params.s(0), c0),
        fit_cells: None,
    })
}

/// Run the construction `G_1 = z`, `G_n = g_n - α_n` up to `depth`, checking
/// concordance, growth, support and the weighted comparison at each level.
pub fn build_g(
    params: &TernaryParams,
    b: f64,
    depth: usize,
    grid: usize,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, DbarError> {
    if depth == 0 {
        return Err(DbarError::InvalidDepth);
    }
    let c0 = opts.c0.unwrap_or(params.d(1) / 20.0);
    let mut levels = vec![EntireApprox::identity()];
    let mut reports = vec![identity_report(params, b, c0)?];
    for n in 2..=depth {
        let eval = SubharmonicEvaluator::new(params.clone(), b, n)?;
        let log_delta = eval.majorants().log_delta(n);
        let underflow = eval.majorants().delta_underflows(n);
        if opts.strict_concordance && underflow {
            return Err(DbarError::DepthInfeasible { level: n, log_delta });
        }
        let prev = levels.last().expect("level 1 present");
        let asm = assemble_g(params, prev, n, grid)?;
        let square = asm.g.square();
        let ln_u = GridField::sample(&square, grid, true, |z| eval.ln_u(n, z).expect("level in range"));
        let refine = opts.solve.mode == SolveMode::WeightedRefine;
        let sol = dbar_solve(&asm.rhs, Some(&ln_u), &opts.solve, refine.then_some(&asm.g))?;
        let cauchy_discrepancy = refine.then(|| {
            let c = cauchy_transform(&asm.rhs);
            c.values.iter().zip(asm.g.values.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        });

        let mut gn = asm.g.clone();
        gn.values.zip_mut_with(&sol.alpha.values, |g, a| *g -= a);
        let h = gn.h;
        let size = gn.n();
        let mut residual_max = 0.0f64;
        for iy in 1..size - 1 {
            for ix in 1..size - 1 {
                residual_max = residual_max.max(gn.dbar_at(ix, iy).norm());
            }
        }
        let gmax = gn.max_abs();
        let (repr, interp_error) = match &sol.projection {
            Some(p) => {
                let probe = Square::new(square.center, square.half_side - 3.0 * h);
                let err = max_dev(nodes(&probe, 97), |z| Some((gn.bicubic(z)? - p.eval(z)).norm()));
                (Repr::Polynomial(p.clone()), err)
            }
            None => (Repr::Grid, 0.0),
        };
        let approx = EntireApprox {
            level: n,
            repr,
            grid: Some(gn),
            residual_max,
            residual_rel: residual_max * h / gmax.max(f64::MIN_POSITIVE),
            interp_error,
        };

        let s_prev = params.s(n - 1);
        let step = params.step(n);
        let concordance = max_dev(nodes(&s_prev, 65), |z| {
            let a = prev.eval(z)?;
            (0..9).map(|j| approx.eval(z + omega(j) * step).map(|b| (a - b).norm())).try_fold(0.0f64, |m, d| Some(m.max(d?)))
        });
        let s0_deviation = max_dev(nodes(&params.s(0), 65), |z| Some((approx.eval(z)? - z).norm()));
        let corridor = params.corridor_region(n, 0.5 * params.d(n));
        let mut support_ok = true;
        let mut rhs_max = 0.0f64;
        for ((iy, ix), v) in asm.rhs.values.indexed_iter() {
            if v.norm() > 0.0 {
                rhs_max = rhs_max.max(v.norm());
                let z = asm.rhs.point(ix, iy);
                support_ok &= rect::region_contains(&corridor, z.re, z.im);
            }
        }
        let prev_square = s_prev.inflate(0.9 * params.d(n));
        let prev_sampled = max_dev(nodes(&prev_square, 257), |z| Some(prev.eval(z)?.norm()));
        let rhs_bound = CutoffFamily::new(params, n).c_chi * prev_sampled.max(asm.prev_max);
        let log_m_bound_log = -b + 10.0 + eval.majorants().log_m(n);
        let log_m_measured = gmax.ln();
        let log_delta_opt = (!underflow).then_some(log_delta);
        reports.push(LevelReport {
            level: n,
            concordance_delta: Some(concordance),
            delta_log: log_delta_opt,
            concordance_ok: log_delta_opt.map(|l| concordance.ln() < l - 10f64.ln()),
            s0_deviation,
            log_m_measured,
            log_m_bound_log,
            growth_ok: log_m_measured.max(f64::MIN_POSITIVE).ln() < log_m_bound_log,
            horm_lhs_log: Some(sol.horm_lhs_log),
            horm_rhs_log: Some(sol.horm_rhs_log),
            horm_holds: Some(sol.horm_holds),
            residual_max: approx.residual_max,
            residual_rel: approx.residual_rel,
            interp_error: approx.interp_error,
            cauchy_discrepancy,
            support_ok: Some(support_ok),
            bound_chain_ok: Some(rhs_max <= rhs_bound),
            rhs_max: Some(rhs_max),
            rhs_bound: Some(rhs_bound),
            mean_value_ratio: mean_value_ratio(&approx, &params.s(0), c0),
            fit_cells: refine.then_some(sol.fit_cells),
        });
        levels.push(approx);
    }
    Ok(PipelineOutput { levels, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EpsilonSpec;

    fn params() -> TernaryParams {
        TernaryParams::build(EpsilonSpec::Geometric, 3).unwrap()
    }

    #[test]
    fn depth_one_is_identity() {
        let out = build_g(&params(), 3.0, 1, 64, &PipelineOptions::default()).unwrap();
        assert_eq!(out.levels[0].eval(Complex64::new(2.5, -1.0)), Some(Complex64::new(2.5, -1.0)));
        assert_eq!(out.reports[0].s0_deviation, 0.0);
        assert_eq!(out.reports[0].residual_max, 0.0);
    }

    #[test]
    fn g2_vanishes_at_copy_centers() {
        let p = params();
        let asm = assemble_g(&p, &EntireApprox::identity(), 2, 81).unwrap();
        // With 81 cells over a square centered at 0, the middle cell is centered at 0.
        let mid = asm.g.values[[40, 40]];
        assert!(mid.norm() < 1e-12);
        for j in 0..9 {
            let c = -omega(j) * p.step(2);
            let (ix, iy) = (((c.re - asm.g.origin.0) / asm.g.h) as usize, ((c.im - asm.g.origin.1) / asm.g.h) as usize);
            let z = asm.g.point(ix, iy);
            assert!((asm.g.values[[iy, ix]] - (z - c)).norm() < 1e-9);
            assert_eq!(asm.rhs.values[[iy, ix]], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn coverage_gap_detected() {
        let p = params();
        let small = ComplexField::sample(&Square::centered(1.0), 16, |z| z);
        let prev = EntireApprox { level: 1, repr: Repr::Grid, grid: Some(small), residual_max: 0.0, residual_rel: 0.0, interp_error: 0.0 };
        assert!(matches!(assemble_g(&p, &prev, 2, 64), Err(DbarError::CoverageGap { .. })));
    }

    #[test]
    fn depth_two_checks() {
        let out = build_g(&params(), 3.0, 2, 256, &PipelineOptions::default()).unwrap();
        let r = &out.reports[1];
        assert_eq!(r.support_ok, Some(true));
        assert_eq!(r.bound_chain_ok, Some(true));
        assert!(r.mean_value_ratio <= 1.0 + 1e-9, "{}", r.mean_value_ratio);
        assert!(r.horm_lhs_log.unwrap().is_finite() && r.horm_rhs_log.unwrap().is_finite());
        assert!(r.growth_ok);
        assert!(matches!(out.levels[1].repr, Repr::Polynomial(_)));
    }

    #[test]
    fn cauchy_mode_keeps_grid() {
        let opts = PipelineOptions { solve: SolveOptions { mode: SolveMode::Cauchy, ..Default::default() }, ..Default::default() };
        let out = build_g(&params(), 3.0, 2, 256, &opts).unwrap();
        assert!(matches!(out.levels[1].repr, Repr::Grid));
        assert!(out.reports[1].cauchy_discrepancy.is_none());
    }

    #[test]
    fn strict_concordance_infeasible_at_large_b() {
        let opts = PipelineOptions { strict_concordance: true, ..Default::default() };
        assert!(matches!(build_g(&params(), 20.0, 2, 64, &opts), Err(DbarError::DepthInfeasible { level: 2, .. })));
    }
}
