use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use super::weierstrass::Weierstrass;
use super::NevanlinnaError;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }
}

/// Chordal distance `|a-b| / sqrt((1+|a|²)(1+|b|²))`, with `∞` via the chart `1/z`.
pub fn chordal(a: ExtComplex, b: ExtComplex) -> f64 {
    match (a, b) {
        (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
            (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
        }
        (ExtComplex::Finite(a), ExtComplex::Infinity) | (ExtComplex::Infinity, ExtComplex::Finite(a)) => {
            1.0 / (1.0 + a.norm_sqr()).sqrt()
        }
        (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
    }
}

type ScalarFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Identity,
    Power(u32),
    Exp,
    Sin,
    Constant(Complex64),
    Wp(Arc<Weierstrass>),
    Custom { f: ScalarFn, df: Option<ScalarFn> },
}

/// A meromorphic function on the plane, evaluated on the sphere.
#[derive(Clone)]
pub struct MeromorphicHandle {
    name: String,
    kind: Kind,
}

impl fmt::Debug for MeromorphicHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeromorphicHandle").field("name", &self.name).finish()
    }
}

impl MeromorphicHandle {
    fn with(name: impl Into<String>, kind: Kind) -> Self {
        MeromorphicHandle { name: name.into(), kind }
    }

    pub fn identity() -> Self {
        Self::with("id", Kind::Identity)
    }

    pub fn power(k: u32) -> Self {
        Self::with(format!("z^{k}"), Kind::Power(k))
    }

    pub fn exp() -> Self {
        Self::with("exp", Kind::Exp)
    }

    pub fn sin() -> Self {
        Self::with("sin", Kind::Sin)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::with("const", Kind::Constant(c))
    }

    pub fn weierstrass(wp: Weierstrass) -> Self {
        Self::with("wp", Kind::Wp(Arc::new(wp)))
    }

    /// Entire function given by an evaluator; `df` is optional and replaced
    /// by centered differences when absent. Non-finite output is reported
    /// as an evaluation failure.
    pub fn entire(
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        df: Option<ScalarFn>,
    ) -> Self {
        Self::with(name, Kind::Custom { f: Arc::new(f), df })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_poles(&self) -> bool {
        matches!(self.kind, Kind::Wp(_))
    }

    pub fn is_entire(&self) -> bool {
        !self.has_poles()
    }

    pub fn value(&self, z: Complex64) -> Result<ExtComplex, NevanlinnaError> {
        let v = match &self.kind {
            Kind::Identity => z,
            Kind::Power(k) => z.powu(*k),
            Kind::Exp => z.exp(),
            Kind::Sin => z.sin(),
            Kind::Constant(c) => *c,
            Kind::Wp(wp) => return Ok(wp.value(z).map_or(ExtComplex::Infinity, ExtComplex::Finite)),
            Kind::Custom { f, .. } => f(z),
        };
        check(&self.name, z, v).map(ExtComplex::Finite)
    }

    /// `F'(z)` at a regular point.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, NevanlinnaError> {
        let d = match &self.kind {
            Kind::Identity => Complex64::new(1.0, 0.0),
            Kind::Power(0) => Complex64::new(0.0, 0.0),
            Kind::Power(k) => *k as f64 * z.powu(k - 1),
            Kind::Exp => z.exp(),
            Kind::Sin => z.cos(),
            Kind::Constant(_) => Complex64::new(0.0, 0.0),
            Kind::Wp(wp) => wp.derivative(z).ok_or_else(|| NevanlinnaError::EvaluationFailure {
                function: self.name.clone(),
                z,
                reason: "derivative requested at a pole".into(),
            })?,
            Kind::Custom { df: Some(df), .. } => df(z),
            Kind::Custom { f, df: None } => centered_difference(f.as_ref(), z),
        };
        check(&self.name, z, d)
    }

    /// `F^#(z) = |F'| / (1 + |F|²)`, through `1/F` wherever `|F| > 1`.
    pub fn spherical_derivative(&self, z: Complex64) -> Result<f64, NevanlinnaError> {
        if let Kind::Wp(wp) = &self.kind {
            let parts = wp.parts(z);
            if parts.u.norm() < 1.0 {
                let (g, dg) = parts.reciprocal();
                if g.norm() <= 1.0 {
                    return Ok(dg.norm() / (1.0 + g.norm_sqr()));
                }
            }
        }
        let v = self.value(z)?.finite().expect("poles are handled above");
        let d = self.derivative(z)?;
        if v.norm() > 1.0 {
            let g = 1.0 / v;
            let dg = -d * g * g;
            Ok(dg.norm() / (1.0 + g.norm_sqr()))
        } else {
            Ok(d.norm() / (1.0 + v.norm_sqr()))
        }
    }
}

fn check(name: &str, z: Complex64, v: Complex64) -> Result<Complex64, NevanlinnaError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(NevanlinnaError::EvaluationFailure { function: name.to_string(), z, reason: "non-finite value".into() })
    }
}

/// Fourth-order centered difference; the step is halved until two successive
/// estimates agree or the step reaches the noise floor.
fn centered_difference(f: &(dyn Fn(Complex64) -> Complex64 + Send + Sync), z: Complex64) -> Complex64 {
    let estimate = |h: f64| {
        let h = Complex64::new(h, 0.0);
        (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h)
    };
    let mut h = 1e-2 * (1.0 + z.norm());
    let mut prev = estimate(h);
    for _ in 0..8 {
        h *= 0.5;
        let next = estimate(h);
        if (next - prev).norm() <= 1e-10 * (1.0 + next.norm()) {
            return next;
        }
        prev = next;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_spherical_derivatives() {
        let id = MeromorphicHandle::identity();
        assert_eq!(id.spherical_derivative(c(0.0, 0.0)).unwrap(), 1.0);
        assert!((id.spherical_derivative(c(1.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        let k = MeromorphicHandle::constant(c(3.0, -1.0));
        assert_eq!(k.spherical_derivative(c(0.4, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn chart_switch_is_continuous() {
        let id = MeromorphicHandle::identity();
        for r in [0.999_999, 1.000_001] {
            let direct = 1.0 / (1.0 + r * r);
            assert!((id.spherical_derivative(c(r, 0.0)).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn wp_finite_at_poles() {
        let wp = MeromorphicHandle::weierstrass(Weierstrass::square(40.0));
        assert_eq!(wp.value(c(2.0, 0.0)).unwrap(), ExtComplex::Infinity);
        assert_eq!(wp.spherical_derivative(c(2.0, 0.0)).unwrap(), 0.0);
        let near = wp.spherical_derivative(c(2.0 + 1e-3, 0.0)).unwrap();
        assert!(near.is_finite() && near < 1e-2);
    }

    #[test]
    fn difference_fallback_matches_analytic() {
        let f = MeromorphicHandle::entire("sin", |z: Complex64| z.sin(), None);
        let z = c(0.7, -1.3);
        assert!((f.derivative(z).unwrap() - z.cos()).norm() < 1e-9);
        assert!((f.spherical_derivative(z).unwrap() - MeromorphicHandle::sin().spherical_derivative(z).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn chordal_metric() {
        let z = ExtComplex::Finite(c(0.0, 0.0));
        assert!((chordal(z, ExtComplex::Infinity) - 1.0).abs() < 1e-15);
        assert!((chordal(z, ExtComplex::Finite(c(1.0, 0.0))) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal(ExtComplex::Infinity, ExtComplex::Infinity), 0.0);
    }
}
