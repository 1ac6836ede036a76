use super::goodness::GoodnessField;
use super::GrowthError;
use serde::Serialize;

/// An aligned subsquare of `Q`, in unit-square offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubSquare {
    pub x0: usize,
    pub y0: usize,
    pub side: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectionStep {
    pub case: u8,
    pub square: SubSquare,
    pub good: u64,
    pub beta: f64,
    /// For cases 1 and 2: whether the chosen square satisfies
    /// `β ≥ (1 + B/2k) β(Q_{j-1})`.
    pub beta_prime_ok: Option<bool>,
    /// Subsquares contained in `(1-θ)Q_{j-1}`.
    pub inner_count: usize,
}

/// The chain `Q_0 ⊃ Q_1 ⊃ … ⊃ Q_k` with `L(Q_j) = k^{k-j}`.
#[derive(Clone, Debug, Serialize)]
pub struct SelectionChain {
    pub k: usize,
    pub b: f64,
    pub theta: f64,
    pub root: SubSquare,
    /// Side of the input square when it had to be cut down to `k^k`.
    pub input_side: usize,
    pub beta0: f64,
    pub steps: Vec<SelectionStep>,
    pub case3_count: usize,
    pub min_beta_ratio: f64,
    /// `min_j β(Q_j) ≥ β(Q_0)/3`.
    pub beta_third_ok: bool,
    /// `case3_count ≥ k/2`.
    pub case3_ok: bool,
}

/// Smallest integer `B ≥ 2` for which more than `k/2` steps of cases 1–2
/// would push `β` above 1, even with every other step losing a factor `1 - 1/k`.
pub fn default_b(beta0: f64, k: usize) -> f64 {
    let kf = k as f64;
    let up = k / 2 + 1;
    let down = k.div_ceil(2) - 1;
    let mut b = 2.0f64;
    while beta0 * (1.0 + b / (2.0 * kf)).powi(up as i32) * (1.0 - 1.0 / kf).powi(down as i32) <= 1.0 {
        b += 1.0;
    }
    b
}

/// Largest `k` with `k^k ≤ side`.
pub fn k_for_side(side: usize) -> usize {
    let mut k = 1usize;
    while (k + 1).checked_pow((k + 1) as u32).is_some_and(|v| v <= side) {
        k += 1;
    }
    k
}

/// The aligned `len x len` subsquare with the most good unit squares
/// (row-major first on ties).
fn best_window(g: &GoodnessField, len: usize) -> SubSquare {
    let n = g.side();
    let mut best = (0u64, SubSquare { x0: 0, y0: 0, side: len });
    let mut first = true;
    for y0 in 0..=(n - len) {
        for x0 in 0..=(n - len) {
            let c = g.good_count(x0, y0, len);
            if first || c > best.0 {
                best = (c, SubSquare { x0, y0, side: len });
                first = false;
            }
        }
    }
    best.1
}

/// Run the three-case subdivision on `Q` (or its best aligned `k^k` subsquare).
/// `b` and `theta` default to the rule in [`default_b`] and `1/(4B)`.
pub fn levsasha_select(g: &GoodnessField, b: Option<f64>, theta: Option<f64>) -> Result<SelectionChain, GrowthError> {
    let input_side = g.side();
    let k = k_for_side(input_side);
    if k < 2 {
        return Err(GrowthError::TooSmall(input_side));
    }
    let len = k.pow(k as u32);
    let root = if len == input_side {
        SubSquare { x0: 0, y0: 0, side: len }
    } else {
        best_window(g, len)
    };
    let root_good = g.good_count(root.x0, root.y0, root.side);
    if root_good == 0 {
        return Err(GrowthError::ZeroBeta);
    }
    let beta0 = root_good as f64 / (len * len) as f64;
    let b = b.unwrap_or_else(|| default_b(beta0, k));
    let theta = theta.unwrap_or(1.0 / (4.0 * b));
    if !(b > 1.0) || !(theta > 0.0 && theta < 1.0) || b * theta >= 0.5 {
        return Err(GrowthError::ConstraintViolation { b, theta });
    }

    let kf = k as f64;
    let k2 = (k * k) as u64;
    let mut cur = root;
    let mut cur_good = root_good;
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let sub = cur.side / k;
        let subs: Vec<(usize, usize, SubSquare, u64)> = (0..k * k)
            .map(|i| {
                let (iy, ix) = (i / k, i % k);
                let s = SubSquare { x0: cur.x0 + ix * sub, y0: cur.y0 + iy * sub, side: sub };
                (ix, iy, s, g.good_count(s.x0, s.y0, sub))
            })
            .collect();
        // β(𝒬) = c/sub², β(Q) = C/(k sub)², so β(𝒬) vs t·β(Q) compares c k² with t C.
        let lo_half = subs.iter().filter(|s| 2 * s.3 * k2 < cur_good).count();
        let margin = 0.5 * theta * kf;
        let inner: Vec<&(usize, usize, SubSquare, u64)> = subs
            .iter()
            .filter(|s| s.0 as f64 >= margin && (s.0 + 1) as f64 <= kf - margin)
            .filter(|s| s.1 as f64 >= margin && (s.1 + 1) as f64 <= kf - margin)
            .collect();
        let inner_ok = |c: u64| (c * k2 * k as u64) as f64 >= (kf - 1.0) * cur_good as f64;
        let prime_ok = |c: u64| (c * k2) as f64 * 2.0 * kf >= (2.0 * kf + b) * cur_good as f64;
        let argmax = |it: &mut dyn Iterator<Item = &(usize, usize, SubSquare, u64)>| {
            it.fold(None::<(SubSquare, u64)>, |acc, s| match acc {
                Some((_, c)) if c >= s.3 => acc,
                _ => Some((s.2, s.3)),
            })
        };
        let case = if lo_half as f64 >= b * kf {
            1
        } else if inner.iter().all(|s| !inner_ok(s.3)) {
            2
        } else {
            3
        };
        let (square, good) = if case == 3 {
            argmax(&mut inner.iter().copied()).expect("case 3 has an inner square")
        } else {
            argmax(&mut subs.iter()).expect("k >= 2")
        };
        steps.push(SelectionStep {
            case,
            square,
            good,
            beta: good as f64 / (sub * sub) as f64,
            beta_prime_ok: (case != 3).then(|| prime_ok(good)),
            inner_count: inner.len(),
        });
        cur = square;
        cur_good = good;
    }
    let case3_count = steps.iter().filter(|s| s.case == 3).count();
    let min_beta_ratio = steps.iter().map(|s| s.beta / beta0).fold(1.0, f64::min);
    Ok(SelectionChain {
        k,
        b,
        theta,
        root,
        input_side,
        beta0,
        case3_count,
        min_beta_ratio,
        beta_third_ok: 3.0 * min_beta_ratio >= 1.0,
        case3_ok: 2 * case3_count >= k,
        steps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub k: usize,
    pub side: usize,
    pub case3_count: usize,
    pub adi_constant: f64,
    /// `(#case 3) · c · k`: each case-3 step gains a factor `e^{ck}`.
    pub certified_log_growth: f64,
    /// `c (log L / log log L)^2`.
    #[serde(rename = "paper_bound_log")]
    pub reference_bound_log: f64,
    /// `c k^2 / 2`, what the `k/2` case-3 guarantee alone yields.
    pub guaranteed_log_growth: f64,
}

pub fn lower_bound_report(chain: &SelectionChain, adi_constant: f64) -> Result<LowerBoundReport, GrowthError> {
    if chain.steps.len() != chain.k || chain.k == 0 {
        return Err(GrowthError::IncompleteChain { steps: chain.steps.len(), k: chain.k });
    }
    let k = chain.k as f64;
    let l = chain.root.side as f64;
    let ratio = l.ln() / l.ln().ln();
    Ok(LowerBoundReport {
        k: chain.k,
        side: chain.root.side,
        case3_count: chain.case3_count,
        adi_constant,
        certified_log_growth: chain.case3_count as f64 * adi_constant * k,
        reference_bound_log: adi_constant * ratio * ratio,
        guaranteed_log_growth: 0.5 * adi_constant * k * k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k_of_side() {
        assert_eq!(k_for_side(256), 4);
        assert_eq!(k_for_side(255), 3);
        assert_eq!(k_for_side(27), 3);
        assert_eq!(k_for_side(3), 1);
    }

    #[test]
    fn uniform_is_all_case_three() {
        let g = GoodnessField::from_flags(0.5, Array2::from_elem((256, 256), true)).unwrap();
        let c = levsasha_select(&g, None, None).unwrap();
        assert!(c.steps.iter().all(|s| s.case == 3 && s.beta == 1.0));
        assert_eq!(c.case3_count, 4);
    }

    #[test]
    fn all_bad_is_zero_beta() {
        let g = GoodnessField::from_flags(0.5, Array2::from_elem((27, 27), false)).unwrap();
        assert!(matches!(levsasha_select(&g, None, None), Err(GrowthError::ZeroBeta)));
    }

    #[test]
    fn constraint_checked() {
        let g = GoodnessField::from_flags(0.5, Array2::from_elem((27, 27), true)).unwrap();
        assert!(matches!(
            levsasha_select(&g, Some(4.0), Some(0.2)),
            Err(GrowthError::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn cut_down_to_k_power() {
        let mut flags = Array2::from_elem((30, 30), false);
        for iy in 3..30 {
            for ix in 3..30 {
                flags[[iy, ix]] = true;
            }
        }
        let g = GoodnessField::from_flags(0.5, flags).unwrap();
        let c = levsasha_select(&g, None, None).unwrap();
        assert_eq!(c.root, SubSquare { x0: 3, y0: 3, side: 27 });
        assert_eq!(c.input_side, 30);
    }

    #[test]
    fn case_one_and_two_pick_eq_beta_prime() {
        // one dense corner block among sparse ones
        let mut flags = Array2::from_elem((27, 27), false);
        for iy in 0..9 {
            for ix in 0..9 {
                flags[[iy, ix]] = true;
            }
        }
        flags[[13, 13]] = true;
        let g = GoodnessField::from_flags(0.5, flags).unwrap();
        let c = levsasha_select(&g, Some(2.0), None).unwrap();
        let first = &c.steps[0];
        assert_ne!(first.case, 3);
        assert_eq!(first.beta_prime_ok, Some(true));
        assert_eq!(first.square, SubSquare { x0: 0, y0: 0, side: 9 });
    }

    #[test]
    fn report_forms() {
        let g = GoodnessField::from_flags(0.5, Array2::from_elem((256, 256), true)).unwrap();
        let c = levsasha_select(&g, None, None).unwrap();
        let r = lower_bound_report(&c, 0.3).unwrap();
        assert!((r.certified_log_growth - 16.0 * 0.3).abs() < 1e-12);
        let mut empty = c.clone();
        empty.steps.clear();
        assert!(matches!(lower_bound_report(&empty, 0.3), Err(GrowthError::IncompleteChain { .. })));
    }

    #[test]
    fn random_fields_keep_guarantees() {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p: f64 = rng.random_range(0.3..0.7);
            let flags = Array2::from_shape_fn((256, 256), |_| rng.random_bool(p));
            let g = GoodnessField::from_flags(0.5, flags).unwrap();
            let c = levsasha_select(&g, None, None).unwrap();
            assert!(c.beta_third_ok && c.case3_ok, "seed {seed}: {:?}", c.steps);
        }
    }
}
