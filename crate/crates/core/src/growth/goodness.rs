use super::GrowthError;
use crate::field::GridField;
use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

/// Per-unit-square goodness flags over an integer-aligned square `Q`, with
/// prefix sums so `β` of any aligned subsquare is an O(1) count.
#[derive(Clone, Debug)]
pub struct GoodnessField {
    pub gamma: f64,
    /// Lower-left corner of `Q` (integers).
    pub corner: (i64, i64),
    /// `zero_ok[[iy, ix]]`: `A(S ∩ Z_u) ≥ γ` for the unit square with offset `(ix, iy)`.
    pub zero_ok: Array2<bool>,
    /// `max_ok[[iy, ix]]`: `max_S u ≥ 1`.
    pub max_ok: Array2<bool>,
    /// Zero-set area of each unit square.
    pub zero_area: Array2<f64>,
    prefix: Array2<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodnessSummary {
    pub gamma: f64,
    pub side: usize,
    pub good: u64,
    pub exceptional: u64,
    pub beta: f64,
}

impl GoodnessField {
    /// Flags from a sampled field: cells with value `≤ zero_tol` count as the
    /// zero set (for log fields the threshold is `ln zero_tol`, and `-inf` is zero).
    pub fn from_field(field: &GridField, gamma: f64, zero_tol: f64) -> Result<Self, GrowthError> {
        check_gamma(gamma)?;
        let sq = field.square();
        if !sq.has_integer_corners() || field.nx() != field.ny() {
            return Err(GrowthError::NonIntegerSquare);
        }
        let per_unit = (1.0 / field.h).round() as usize;
        if per_unit == 0 || ((per_unit as f64) * field.h - 1.0).abs() > 1e-9 {
            return Err(GrowthError::NonIntegerSquare);
        }
        let side = field.nx() / per_unit;
        let threshold = if field.log_domain {
            if zero_tol > 0.0 {
                zero_tol.ln()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            zero_tol
        };
        let one = if field.log_domain { 0.0 } else { 1.0 };
        let cell_area = field.h * field.h;
        let stats: Vec<(f64, bool)> = (0..side * side)
            .into_par_iter()
            .map(|k| {
                let (uy, ux) = (k / side, k % side);
                let mut zeros = 0usize;
                let mut mx = f64::NEG_INFINITY;
                for iy in uy * per_unit..(uy + 1) * per_unit {
                    for ix in ux * per_unit..(ux + 1) * per_unit {
                        let v = field.values[[iy, ix]];
                        if v <= threshold {
                            zeros += 1;
                        }
                        mx = mx.max(v);
                    }
                }
                (zeros as f64 * cell_area, mx >= one)
            })
            .collect();
        let zero_area = Array2::from_shape_vec((side, side), stats.iter().map(|s| s.0).collect()).expect("side^2");
        let max_ok = Array2::from_shape_vec((side, side), stats.iter().map(|s| s.1).collect()).expect("side^2");
        let zero_ok = zero_area.mapv(|a| a >= gamma);
        let corner = (sq.to_rect().x0.round() as i64, sq.to_rect().y0.round() as i64);
        Ok(Self::assemble(gamma, corner, zero_ok, max_ok, zero_area))
    }

    /// Flags given directly, e.g. synthetic test patterns. Good squares get
    /// zero area 1, the others 0.
    pub fn from_flags(gamma: f64, good: Array2<bool>) -> Result<Self, GrowthError> {
        check_gamma(gamma)?;
        if good.nrows() != good.ncols() || good.is_empty() {
            return Err(GrowthError::NonIntegerSquare);
        }
        let zero_area = good.mapv(|g| if g { 1.0 } else { 0.0 });
        Ok(Self::assemble(gamma, (0, 0), good.clone(), good, zero_area))
    }

    fn assemble(
        gamma: f64,
        corner: (i64, i64),
        zero_ok: Array2<bool>,
        max_ok: Array2<bool>,
        zero_area: Array2<f64>,
    ) -> Self {
        let n = zero_ok.nrows();
        let mut prefix = Array2::<u64>::zeros((n + 1, n + 1));
        for iy in 0..n {
            for ix in 0..n {
                let g = (zero_ok[[iy, ix]] && max_ok[[iy, ix]]) as u64;
                prefix[[iy + 1, ix + 1]] = g + prefix[[iy, ix + 1]] + prefix[[iy + 1, ix]] - prefix[[iy, ix]];
            }
        }
        GoodnessField { gamma, corner, zero_ok, max_ok, zero_area, prefix }
    }

    /// Side length `L(Q)` in unit squares.
    pub fn side(&self) -> usize {
        self.zero_ok.nrows()
    }

    pub fn is_good(&self, ix: usize, iy: usize) -> bool {
        self.zero_ok[[iy, ix]] && self.max_ok[[iy, ix]]
    }

    /// Number of good unit squares in the aligned subsquare at offset `(x0, y0)`.
    pub fn good_count(&self, x0: usize, y0: usize, side: usize) -> u64 {
        let p = &self.prefix;
        p[[y0 + side, x0 + side]] + p[[y0, x0]] - p[[y0, x0 + side]] - p[[y0 + side, x0]]
    }

    pub fn beta_sub(&self, x0: usize, y0: usize, side: usize) -> f64 {
        self.good_count(x0, y0, side) as f64 / (side * side) as f64
    }

    pub fn beta(&self) -> f64 {
        self.beta_sub(0, 0, self.side())
    }

    /// Unit squares failing `A(S ∩ Z_u) ≥ γ`.
    pub fn exceptional_count(&self) -> u64 {
        self.zero_ok.iter().filter(|ok| !**ok).count() as u64
    }

    pub fn summary(&self) -> GoodnessSummary {
        GoodnessSummary {
            gamma: self.gamma,
            side: self.side(),
            good: self.good_count(0, 0, self.side()),
            exceptional: self.exceptional_count(),
            beta: self.beta(),
        }
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<(), GrowthError> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(GrowthError::InvalidGamma(gamma))
    }
}

/// Convenience wrapper matching the field-level entry point.
pub fn goodness_stats(field: &GridField, gamma: f64, zero_tol: f64) -> Result<GoodnessField, GrowthError> {
    GoodnessField::from_field(field, gamma, zero_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Square;
    use num_complex::Complex64;

    fn sq() -> Square {
        Square::new(Complex64::new(2.0, 2.0), 2.0)
    }

    #[test]
    fn constant_fields() {
        let ones = GridField::sample(&sq(), 32, false, |_| 1.0);
        assert_eq!(goodness_stats(&ones, 0.5, 0.0).unwrap().beta(), 0.0);
        let zeros = GridField::sample(&sq(), 32, false, |_| 0.0);
        let g = goodness_stats(&zeros, 0.5, 0.0).unwrap();
        assert_eq!(g.beta(), 0.0);
        assert!(g.zero_ok.iter().all(|b| *b));
    }

    #[test]
    fn half_and_half() {
        let f = GridField::sample(&sq(), 32, false, |z| if z.re.fract() < 0.5 { 0.0 } else { 2.0 });
        let g = goodness_stats(&f, 0.4, 0.0).unwrap();
        assert_eq!(g.beta(), 1.0);
        assert!(g.zero_area.iter().all(|a| (a - 0.5).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_inputs() {
        let off = GridField::sample(&Square::new(Complex64::new(0.5, 0.0), 2.0), 16, false, |_| 0.0);
        assert!(matches!(goodness_stats(&off, 0.5, 0.0), Err(GrowthError::NonIntegerSquare)));
        let f = GridField::sample(&sq(), 16, false, |_| 0.0);
        assert!(matches!(goodness_stats(&f, 1.5, 0.0), Err(GrowthError::InvalidGamma(_))));
    }

    #[test]
    fn beta_bookkeeping() {
        // β(Q) is the mean of β over the k^2 subdivision squares
        let mut flags = Array2::from_elem((9, 9), false);
        for (i, f) in flags.iter_mut().enumerate() {
            *f = (i * 7) % 5 < 2;
        }
        let g = GoodnessField::from_flags(0.5, flags).unwrap();
        let mean: f64 = (0..9).map(|k| g.beta_sub(3 * (k % 3), 3 * (k / 3), 3)).sum::<f64>() / 9.0;
        assert!((mean - g.beta()).abs() < 1e-15);
    }
}
