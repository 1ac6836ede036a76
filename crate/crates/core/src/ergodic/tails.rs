use super::sampler::{Estimate, TranslateSampler};
use super::ErgodicError;
use crate::geometry::TernaryParams;
use crate::subharmonic::MajorantTable;
use num_complex::Complex64;
use serde::Serialize;

/// How the copy level `k` is attached to a threshold `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevelChoice {
    Fixed(usize),
    /// `k` with `e^{M_B(k-1)} < t ≤ e^{M_B(k)}`, compared as `ln ln t`.
    Majorant { b: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub k: usize,
    /// Sampled `A_{S_n}{w : |F(w)| > t}`.
    pub mc: Estimate,
    /// Complement of the `9^{n-k+1}` copies of `S_{k-1}` in `S_n`.
    pub exact_bound: f64,
    /// The same area counted with `9^{n-k}` copies, the other reading of the exponent.
    pub displayed_bound: f64,
}

fn level_for(params: &TernaryParams, t: f64, choice: LevelChoice, n: usize) -> usize {
    match choice {
        LevelChoice::Fixed(k) => k,
        LevelChoice::Majorant { b } => {
            let table = MajorantTable::new(params, b);
            let llt = if t > 1.0 { t.ln().ln() } else { f64::NEG_INFINITY };
            (1..=n).find(|&k| llt <= table.log_m(k)).unwrap_or(n)
        }
    }
}

/// Tail fractions of `|F|` over `w ∈ S_n` with the copy-complement bounds.
pub fn tail_distribution<F>(
    f: &F,
    params: &TernaryParams,
    n: usize,
    thresholds: &[f64],
    choice: LevelChoice,
    sampler: &TranslateSampler,
) -> Result<Vec<TailRow>, ErgodicError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if n > params.depth() {
        return Err(ErgodicError::InvalidLevels { k_max: n, n: params.depth() });
    }
    let values = sampler.map(|w| f(w).norm())?;
    thresholds
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(ErgodicError::InvalidArgument(format!("threshold must be positive, got {t}")));
            }
            let k = level_for(params, t, choice, n);
            if k == 0 || k > n {
                return Err(ErgodicError::InvalidLevels { k_max: k, n });
            }
            let hits = values.iter().filter(|&&v| v > t).count();
            let exact = 1.0 - params.copy_fraction(k - 1, n, 0.0);
            let displayed = 1.0 - params.copy_fraction(k - 1, n, 0.0) / 9.0;
            Ok(TailRow {
                t,
                k,
                mc: Estimate::from_hits(hits, values.len()),
                exact_bound: exact.clamp(0.0, 1.0),
                displayed_bound: displayed.clamp(0.0, 1.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::Scheme;
    use crate::geometry::EpsilonSpec;

    #[test]
    fn bounded_function_has_empty_tail() {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 2).unwrap();
        let f = |z: Complex64| Complex64::new(z.re.cos(), 0.0);
        let s = TranslateSampler::new(p.s(2), Scheme::Seeded { count: 5000, seed: 2 });
        let rows = tail_distribution(&f, &p, 2, &[1.5], LevelChoice::Fixed(2), &s).unwrap();
        assert_eq!(rows[0].mc.fraction, 0.0);
        assert!((rows[0].exact_bound - 0.19).abs() < 1e-12);
        assert!((rows[0].displayed_bound - 0.91).abs() < 1e-12);
    }

    #[test]
    fn majorant_level_choice() {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 3).unwrap();
        // Every finite f64 threshold has ln ln t < 7, below M_B(1) = B + 3π.
        assert_eq!(level_for(&p, 100.0, LevelChoice::Majorant { b: 3.0 }, 3), 1);
        assert_eq!(level_for(&p, f64::MAX, LevelChoice::Majorant { b: 3.0 }, 3), 1);
        assert_eq!(level_for(&p, 5.0, LevelChoice::Fixed(2), 3), 2);
    }
}
