use super::sampler::{square_nodes, Estimate, TranslateSampler};
use super::ErgodicError;
use crate::geometry::{to_f64, Square, TernaryParams};
use crate::subharmonic::MajorantTable;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

/// The thresholds `M_k`, stored as `ln M_k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ladder {
    Constant(f64),
    /// Explicit `ln M_k` for `k = 0, 1, …`.
    ExplicitLog(Vec<f64>),
    /// `M_k = exp M_B(k) + 1`, i.e. `ln M_k ≈ M_B(k)`.
    Majorant { b: f64 },
}

impl Ladder {
    pub fn log_m(&self, params: &TernaryParams, k: usize) -> Result<f64, ErgodicError> {
        match self {
            Ladder::Constant(m) => Ok(m.ln()),
            Ladder::ExplicitLog(v) => v.get(k).copied().ok_or(ErgodicError::LadderTooShort { k, len: v.len() }),
            Ladder::Majorant { b } => {
                let t = MajorantTable::new(params, *b);
                Ok(t.log_m(k).exp())
            }
        }
    }
}

/// Max of `|F|` over a closed square, from `m x m` nodes.
pub fn max_abs_on<F: Fn(Complex64) -> Complex64>(f: &F, square: &Square, m: usize) -> f64 {
    square_nodes(square, m).map(|z| f(z).norm()).fold(0.0, f64::max)
}

/// `osc_Q |F| = max_Q |F| - min_Q |F|`, from `m x m` nodes.
pub fn oscillation_on<F: Fn(Complex64) -> Complex64>(f: &F, square: &Square, m: usize) -> f64 {
    let (lo, hi) = square_nodes(square, m)
        .map(|z| f(z).norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

#[derive(Clone, Debug, Serialize)]
pub struct KbReport {
    pub n: usize,
    pub ladder_log: Vec<f64>,
    /// Sampled `A_{S_n}{w : max_{τ_w S_k} |F| ≤ M_k}` for `k = 0..=k_max`.
    pub kb1_fractions: Vec<Estimate>,
    /// Relative area of `{w : τ_w S_k ⊂ some copy of S_{k+1}}` in `S_n`, exact.
    pub kb1_exact_lower: Vec<Option<f64>>,
    /// Partial sums of `1 - fraction` (the summability series).
    pub kb1prime_partial_sums: Vec<f64>,
    /// Sampled `A_{S_n}{w : osc_{τ_w S} |F| ≥ c}`.
    pub kb2_fraction: Estimate,
    /// `ln μ_k` with `μ_k = max_{2 S_{k-1}} |F| + M_k` for `k ≥ 1`.
    pub mu_log: Vec<f64>,
}

/// Node count per side used for maxima over translated squares.
pub const MAX_NODES: usize = 9;

fn exact_kb1_lower(params: &TernaryParams, k: usize, n: usize) -> Option<f64> {
    if k + 1 > n {
        return None;
    }
    let shrink = params.exact_a(k)?;
    let frac = params.copy_fraction_exact(k + 1, n, &shrink)?;
    Some(to_f64(&frac))
}

/// Krylov–Bogolyubov diagnostics for `F` averaged over translates in `S_n`.
#[allow(clippy::too_many_arguments)]
pub fn kb_report<F>(
    f: &F,
    params: &TernaryParams,
    k_max: usize,
    n: usize,
    ladder: &Ladder,
    s: &Square,
    c: f64,
    sampler: &TranslateSampler,
) -> Result<KbReport, ErgodicError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if k_max >= n {
        return Err(ErgodicError::InvalidLevels { k_max, n });
    }
    let mut ladder_log = Vec::new();
    let mut fractions = Vec::new();
    let mut exact = Vec::new();
    let mut partial = Vec::new();
    let mut mu_log = Vec::new();
    let mut acc = 0.0;
    for k in 0..=k_max {
        let lm = ladder.log_m(params, k)?;
        let sk = params.s(k);
        let est = sampler.fraction(|w| {
            let m = max_abs_on(f, &sk.translate(w), MAX_NODES);
            m == 0.0 || m.ln() <= lm
        })?;
        acc += 1.0 - est.fraction;
        ladder_log.push(lm);
        fractions.push(est);
        exact.push(exact_kb1_lower(params, k, n));
        partial.push(acc);
        if k >= 1 {
            let two = params.s(k - 1).scaled(2.0);
            let m = max_abs_on(f, &two, 4 * MAX_NODES);
            mu_log.push(crate::logspace::ln_add(m.ln(), lm));
        }
    }
    let kb2 = oscillation_fraction(f, s, c, sampler)?;
    Ok(KbReport { n, ladder_log, kb1_fractions: fractions, kb1_exact_lower: exact, kb1prime_partial_sums: partial, kb2_fraction: kb2, mu_log })
}

/// Sampled fraction of `w` with `osc_{τ_w S} |F| ≥ c`.
pub fn oscillation_fraction<F>(f: &F, s: &Square, c: f64, sampler: &TranslateSampler) -> Result<Estimate, ErgodicError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(c > 0.0) {
        return Err(ErgodicError::InvalidArgument(format!("oscillation level must be positive, got {c}")));
    }
    sampler.fraction(|w| oscillation_on(f, &s.translate(w), MAX_NODES) >= c)
}

/// Exact complement `1 - A_{S_n}(copies of S_k)`, the finite-`n` increment of
/// the summability series when `τ_w S_k` inside a copy forces the event.
pub fn copy_complement_exact(params: &TernaryParams, k: usize, n: usize) -> Option<f64> {
    let zero = BigRational::from_integer(BigInt::from(0));
    params.copy_fraction_exact(k, n, &zero).map(|f| 1.0 - to_f64(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::Scheme;
    use crate::geometry::EpsilonSpec;

    fn params() -> TernaryParams {
        TernaryParams::build(EpsilonSpec::Geometric, 3).unwrap()
    }

    #[test]
    fn bounded_periodic_function_always_passes() {
        let p = params();
        let f = |z: Complex64| Complex64::new((std::f64::consts::PI * z.re).sin(), (std::f64::consts::PI * z.im).cos());
        let sampler = TranslateSampler::new(p.s(2), Scheme::Seeded { count: 2000, seed: 3 });
        let r = kb_report(&f, &p, 1, 2, &Ladder::Constant(3.0), &Square::centered(1.0), 0.1, &sampler).unwrap();
        assert!(r.kb1_fractions.iter().all(|e| e.fraction == 1.0));
        assert_eq!(r.kb1prime_partial_sums, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_fails_on_large_squares() {
        let p = params();
        let f = |z: Complex64| z;
        let sampler = TranslateSampler::new(p.s(3), Scheme::Grid { per_side: 200 });
        let r = kb_report(&f, &p, 0, 3, &Ladder::Constant(10.0), &Square::centered(1.0), 1.0, &sampler).unwrap();
        // S_0 + w must sit inside the disk of radius 10: at most π 10² / A(S_3).
        let bound = std::f64::consts::PI * 100.0 / p.s(3).area();
        assert!(r.kb1_fractions[0].fraction <= bound);
        assert!(r.kb1_fractions[0].fraction < 0.1);
    }

    #[test]
    fn exact_lower_bound_at_level_two() {
        let p = params();
        // τ_w S_1 inside a copy of S_2 within S_2 itself: (a_2 - a_1)^2 / a_2^2.
        let expected = ((40.0f64 / 3.0 - 4.0) / (40.0 / 3.0)).powi(2);
        assert!((exact_kb1_lower(&p, 1, 2).unwrap() - expected).abs() < 1e-15);
        assert!((copy_complement_exact(&p, 1, 2).unwrap() - 0.19).abs() < 1e-15);
    }

    #[test]
    fn partial_sums_nondecreasing() {
        let p = params();
        let f = |z: Complex64| z * 0.2;
        let sampler = TranslateSampler::new(p.s(3), Scheme::Seeded { count: 3000, seed: 11 });
        let r = kb_report(&f, &p, 2, 3, &Ladder::ExplicitLog(vec![0.0, 1.0, 1.5]), &Square::centered(1.0), 0.5, &sampler).unwrap();
        assert!(r.kb1prime_partial_sums.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.kb1_fractions.iter().all(|e| (0.0..=1.0).contains(&e.fraction)));
    }

    #[test]
    fn oscillation_cases() {
        let sq = Square::centered(1.0);
        let sampler = TranslateSampler::new(Square::centered(20.0), Scheme::Seeded { count: 2000, seed: 5 });
        let konst = |_: Complex64| Complex64::new(2.0, 0.0);
        assert_eq!(oscillation_fraction(&konst, &sq, 0.1, &sampler).unwrap().fraction, 0.0);
        let id = |z: Complex64| z;
        assert_eq!(oscillation_fraction(&id, &sq, 1.0, &sampler).unwrap().fraction, 1.0);
    }

    #[test]
    fn increment_bound_for_shrinking_epsilon() {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 5).unwrap();
        for k in 1..4 {
            let exact = copy_complement_exact(&p, k, k + 1).unwrap();
            let tail: f64 = (k + 1..=p.depth()).map(|j| p.epsilon(j)).sum();
            let expr = 2.0 * p.a(k) / p.a(k + 1) + 3.0 * tail;
            assert!(exact <= expr, "k={k}: {exact} > {expr}");
        }
    }
}
