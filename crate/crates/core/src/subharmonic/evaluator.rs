use super::envelope::VEnvelope;
use super::majorant::MajorantTable;
use super::SubharmonicError;
use crate::geometry::{omega, TernaryParams};
use num_complex::Complex64;

/// Pointwise evaluator of the glued functions `u_0 = 1/3`,
/// `u_n = max(M_B(n-1) v_n, τ_{w_j} u_{n-1})` on the copies inflated by `d_n/2`
/// and `M_B(n-1) v_n` elsewhere. Works on logarithms throughout.
#[derive(Clone, Debug)]
pub struct SubharmonicEvaluator {
    params: TernaryParams,
    majorants: MajorantTable,
    envelopes: Vec<VEnvelope>,
    level: usize,
}

impl SubharmonicEvaluator {
    pub fn new(params: TernaryParams, b: f64, level: usize) -> Result<Self, SubharmonicError> {
        if level > params.depth() {
            return Err(SubharmonicError::DepthExceeded { requested: level, depth: params.depth() });
        }
        let majorants = MajorantTable::new(&params, b);
        let envelopes = (1..=level).map(|n| VEnvelope::new(&params, n)).collect();
        Ok(SubharmonicEvaluator { params, majorants, envelopes, level })
    }

    pub fn params(&self) -> &TernaryParams {
        &self.params
    }

    pub fn majorants(&self) -> &MajorantTable {
        &self.majorants
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn envelope(&self, n: usize) -> &VEnvelope {
        &self.envelopes[n - 1]
    }

    fn check(&self, n: usize) -> Result<(), SubharmonicError> {
        if n > self.level {
            return Err(SubharmonicError::DepthExceeded { requested: n, depth: self.level });
        }
        Ok(())
    }

    /// `ln v_n(z)`.
    pub fn ln_v(&self, n: usize, z: Complex64) -> Result<f64, SubharmonicError> {
        if n == 0 {
            return Err(SubharmonicError::DepthExceeded { requested: 0, depth: self.level });
        }
        self.check(n)?;
        Ok(self.envelope(n).ln_v(z))
    }

    /// `ln u_n(z)`, `-inf` where `u_n = 0`.
    pub fn ln_u(&self, n: usize, z: Complex64) -> Result<f64, SubharmonicError> {
        self.check(n)?;
        Ok(self.ln_u_unchecked(n, z))
    }

    fn ln_u_unchecked(&self, n: usize, z: Complex64) -> f64 {
        if n == 0 {
            return -(3f64.ln());
        }
        let env = self.envelope(n);
        let outer = self.majorants.log_m(n - 1) + env.ln_v(z);
        let reach = self.params.a(n - 1) + 0.5 * env.d;
        let step = self.params.step(n);
        for j in 0..9 {
            let q = z + omega(j) * step;
            if q.re.abs() <= reach && q.im.abs() <= reach {
                return outer.max(self.ln_u_unchecked(n - 1, q));
            }
        }
        outer
    }

    /// `u_n(z)` on the linear scale.
    pub fn u(&self, n: usize, z: Complex64) -> Result<f64, SubharmonicError> {
        let l = self.ln_u(n, z)?;
        let v = l.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SubharmonicError::Overflow { level: n, log_value: l })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EpsilonSpec;
    use proptest::prelude::*;

    fn eval(level: usize) -> SubharmonicEvaluator {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 4).unwrap();
        SubharmonicEvaluator::new(p, 20.0, level).unwrap()
    }

    #[test]
    fn base_cases() {
        let e = eval(3);
        assert!((e.u(0, Complex64::new(17.0, -3.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.u(1, Complex64::new(0.0, 0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.u(1, Complex64::new(1.5, 0.0)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overflow_signals_log_mode() {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 6).unwrap();
        let e = SubharmonicEvaluator::new(p.clone(), 20.0, 6).unwrap();
        let z = Complex64::new(p.a(5) + 1.5 * p.d(6), 0.0);
        assert!(matches!(e.u(6, z), Err(SubharmonicError::Overflow { .. })));
        assert!(e.ln_u(6, z).unwrap().is_finite());
    }

    proptest! {
        #[test]
        fn stable_on_lower_squares(x in -1.0f64..1.0, y in -1.0f64..1.0, lvl in 1usize..3) {
            // u_m = u_n on S_n for m > n
            let e = eval(3);
            let p = e.params().clone();
            let z = Complex64::new(x * p.a(lvl), y * p.a(lvl));
            let a = e.ln_u(lvl, z).unwrap();
            let b = e.ln_u(3, z).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn nonnegative_and_deterministic(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let e = eval(3);
            let z = Complex64::new(x, y);
            let a = e.ln_u(3, z).unwrap();
            prop_assert!(!a.is_nan());
            prop_assert_eq!(a.to_bits(), e.ln_u(3, z).unwrap().to_bits());
        }
    }
}
