use num_complex::Complex64;
use std::f64::consts::PI;

/// Weierstrass `℘` for the lattice `Z p1 + Z p2`, by the lattice sum
/// truncated to `|λ| ≤ cutoff`. Terms for `λ` and `-λ` are summed together,
/// so the computed function is exactly even.
#[derive(Clone, Debug, PartialEq)]
pub struct Weierstrass {
    pub p1: Complex64,
    pub p2: Complex64,
    pub cutoff: f64,
    lattice: Vec<Complex64>,
}

/// Value of `℘` together with its pole structure at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WpParts {
    /// Offset from the nearest lattice point.
    pub u: Complex64,
    /// Regular part `S(u) = ℘(u) - 1/u²` and its derivative.
    pub s: Complex64,
    pub ds: Complex64,
}

impl WpParts {
    pub fn value(&self) -> Option<Complex64> {
        (self.u != Complex64::new(0.0, 0.0)).then(|| 1.0 / (self.u * self.u) + self.s)
    }

    pub fn derivative(&self) -> Option<Complex64> {
        (self.u != Complex64::new(0.0, 0.0)).then(|| -2.0 / (self.u * self.u * self.u) + self.ds)
    }

    /// `1/℘` and its derivative, regular across the pole.
    pub fn reciprocal(&self) -> (Complex64, Complex64) {
        let u2 = self.u * self.u;
        let den = 1.0 + u2 * self.s;
        let g = u2 / den;
        // d/du [u²/(1 + u² S)] = (2u - u⁴ S') / (1 + u² S)².
        let dg = (2.0 * self.u - u2 * u2 * self.ds) / (den * den);
        (g, dg)
    }
}

impl Weierstrass {
    pub fn new(p1: Complex64, p2: Complex64, cutoff: f64) -> Self {
        assert!((p1.conj() * p2).im.abs() > 0.0, "periods must be linearly independent over R");
        let reach = (cutoff / cell_height(p1, p2)).ceil() as i64 + 1;
        let mut lattice = Vec::new();
        for m in -reach..=reach {
            for n in -reach..=reach {
                let l = p1 * m as f64 + p2 * n as f64;
                // One representative of each pair ±λ.
                if (n > 0 || (n == 0 && m > 0)) && l.norm() <= cutoff {
                    lattice.push(l);
                }
            }
        }
        Weierstrass { p1, p2, cutoff, lattice }
    }

    /// Periods 2 and 2i.
    pub fn square(cutoff: f64) -> Self {
        Weierstrass::new(Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0), cutoff)
    }

    pub fn cell_area(&self) -> f64 {
        (self.p1.conj() * self.p2).im.abs()
    }

    /// Number of nonzero lattice points in the truncation.
    pub fn lattice_len(&self) -> usize {
        2 * self.lattice.len()
    }

    /// Lattice point nearest to `z` among the four corners of its cell.
    pub fn nearest_lattice_point(&self, z: Complex64) -> Complex64 {
        let det = (self.p1.conj() * self.p2).im;
        let s = (z.conj() * self.p2).im / det;
        let t = (self.p1.conj() * z).im / det;
        let (s0, t0) = (s.floor(), t.floor());
        let mut best = Complex64::new(0.0, 0.0);
        let mut dist = f64::INFINITY;
        for ds in 0..2 {
            for dt in 0..2 {
                let l = self.p1 * (s0 + ds as f64) + self.p2 * (t0 + dt as f64);
                if (z - l).norm() < dist {
                    dist = (z - l).norm();
                    best = l;
                }
            }
        }
        best
    }

    fn parts_at(&self, u: Complex64) -> WpParts {
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        for &l in &self.lattice {
            let (a, b) = (1.0 / (u - l), 1.0 / (u + l));
            let (a2, b2) = (a * a, b * b);
            s += (a2 + b2) - 2.0 / (l * l);
            ds += a2 * a + b2 * b;
        }
        WpParts { u, s, ds: -2.0 * ds }
    }

    /// Evaluate after reducing `z` to the nearest lattice point, which makes
    /// the computed function exactly periodic.
    pub fn parts(&self, z: Complex64) -> WpParts {
        self.parts_at(z - self.nearest_lattice_point(z))
    }

    /// `℘(z)` by the reduced-argument path; `None` at lattice points.
    pub fn value(&self, z: Complex64) -> Option<Complex64> {
        self.parts(z).value()
    }

    /// `℘(z)` by the raw truncated sum at `z`, without reduction.
    pub fn value_direct(&self, z: Complex64) -> Option<Complex64> {
        self.parts_at(z).value()
    }

    /// `℘'(z) = -2 Σ 1/(z - λ)³`.
    pub fn derivative(&self, z: Complex64) -> Option<Complex64> {
        self.parts(z).derivative()
    }

    /// Bound on the discarded terms `Σ_{|λ|>Λ} |1/(z-λ)² - 1/λ²|` for
    /// `|z| ≤ Λ/2`: each term is at most `(2|z||λ| + |z|²)/(|λ|² (|λ|-|z|)²)`,
    /// and the lattice has `2π r dr / A` points per annulus.
    pub fn tail_bound(&self, z_abs: f64) -> f64 {
        let l = self.cutoff;
        if z_abs > 0.5 * l {
            return f64::INFINITY;
        }
        // With |λ| - |z| ≥ |λ|/2 the term is ≤ 4(2|z|/|λ|³ + |z|²/|λ|⁴); integrate
        // over |λ| > Λ - diam(cell) to absorb the lattice-point count error.
        let l0 = l - (self.p1.norm() + self.p2.norm());
        2.0 * PI / self.cell_area() * 4.0 * (2.0 * z_abs / l0 + z_abs * z_abs / (2.0 * l0 * l0))
    }

    /// `g_2 = 60 Σ' λ^{-4}` over the truncated lattice.
    pub fn g2(&self) -> Complex64 {
        120.0 * self.lattice.iter().map(|l| 1.0 / (l * l * l * l)).sum::<Complex64>()
    }

    /// `g_3 = 140 Σ' λ^{-6}` over the truncated lattice.
    pub fn g3(&self) -> Complex64 {
        280.0 * self.lattice.iter().map(|l| 1.0 / (l * l * l * l * l * l)).sum::<Complex64>()
    }
}

fn cell_height(p1: Complex64, p2: Complex64) -> f64 {
    let area = (p1.conj() * p2).im.abs();
    (area / p1.norm()).min(area / p2.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_exactly() {
        let wp = Weierstrass::square(40.0);
        for &z in &[Complex64::new(0.3, 0.7), Complex64::new(-0.9, 0.2), Complex64::new(1.3, -2.1)] {
            assert_eq!(wp.value_direct(-z), wp.value_direct(z));
        }
    }

    #[test]
    fn laurent_leading_term() {
        let wp = Weierstrass::square(40.0);
        let v = wp.value(Complex64::new(0.01, 0.0)).unwrap();
        assert!((v / 1e4 - 1.0).norm() < 1e-4);
    }

    #[test]
    fn periodic_within_tail() {
        let wp = Weierstrass::square(40.0);
        for &z in &[Complex64::new(0.5, 0.5), Complex64::new(0.2, -0.7), Complex64::new(-0.8, 0.3)] {
            let a = wp.value_direct(z).unwrap();
            let b = wp.value_direct(z + 2.0).unwrap();
            let c = wp.value_direct(z + Complex64::new(0.0, 2.0)).unwrap();
            let tol = wp.tail_bound(z.norm() + 2.0) + wp.tail_bound(z.norm());
            assert!((a - b).norm() <= tol, "{} > {tol}", (a - b).norm());
            assert!((a - c).norm() <= tol);
        }
        // The reduced path is periodic by construction.
        let z = Complex64::new(0.37, 0.21);
        assert!((wp.value(z).unwrap() - wp.value(z + Complex64::new(6.0, -4.0)).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn differential_equation() {
        // Square lattice: g_3 = 0 and ℘'² = 4℘³ - g_2 ℘.
        let wp = Weierstrass::square(200.0);
        assert!(wp.g3().norm() < 1e-12);
        let g2 = wp.g2();
        for &z in &[Complex64::new(0.4, 0.3), Complex64::new(0.7, -0.2), Complex64::new(0.9, 0.9)] {
            let p = wp.value(z).unwrap();
            let dp = wp.derivative(z).unwrap();
            let lhs = dp * dp;
            let rhs = 4.0 * p * p * p - g2 * p;
            assert!((lhs - rhs).norm() < 1e-3 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn derivative_matches_differences() {
        let wp = Weierstrass::square(40.0);
        let z = Complex64::new(0.45, 0.62);
        let h = 1e-5;
        let fd = (wp.value(z + h).unwrap() - wp.value(z - h).unwrap()) / (2.0 * h);
        assert!((fd - wp.derivative(z).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn reciprocal_chart_at_pole() {
        let wp = Weierstrass::square(40.0);
        let (g, dg) = wp.parts(Complex64::new(2.0, 2.0)).reciprocal();
        assert_eq!((g, dg), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        let p = wp.parts(Complex64::new(2.01, 1.98));
        let (g, dg) = p.reciprocal();
        let v = p.value().unwrap();
        assert!((g - 1.0 / v).norm() < 1e-15);
        assert!((dg + p.derivative().unwrap() / (v * v)).norm() < 1e-12);
    }
}
