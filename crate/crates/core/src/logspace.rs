//! Arithmetic on logarithms of nonnegative reals. `-inf` stands for zero.

/// `ln(e^a + e^b)`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`, stable for any spread of exponents.
pub fn ln_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY || hi.is_nan() {
        return hi;
    }
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

/// `ln(x)` with `ln 0 = -inf`.
pub fn ln0(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Back to linear scale; `None` if the value does not fit in an `f64`.
pub fn to_linear(l: f64) -> Option<f64> {
    let v = l.exp();
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_linear() {
        let a = 2.0f64.ln();
        let b = 3.0f64.ln();
        assert!((ln_add(a, b) - 5.0f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add(f64::NEG_INFINITY, a), a);
    }

    #[test]
    fn sum_exp_huge() {
        let s = ln_sum_exp([1e6, 1e6]);
        assert!((s - (1e6 + 2f64.ln())).abs() < 1e-9);
        assert_eq!(ln_sum_exp([f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }
}
