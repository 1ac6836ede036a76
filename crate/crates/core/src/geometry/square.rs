use super::rect::Rect;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed axis-aligned square, stored as center and half side length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: Complex64,
    pub half_side: f64,
}

impl Square {
    pub fn new(center: Complex64, half_side: f64) -> Self {
        assert!(half_side > 0.0, "square half side must be positive, got {half_side}");
        Square { center, half_side }
    }

    /// `[-a, a]^2`.
    pub fn centered(a: f64) -> Self {
        Square::new(Complex64::new(0.0, 0.0), a)
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn area(&self) -> f64 {
        self.side() * self.side()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() <= self.half_side && (z.im - self.center.im).abs() <= self.half_side
    }

    /// `l∞` distance from `z` to the square (zero inside).
    pub fn linf_distance(&self, z: Complex64) -> f64 {
        let dx = (z.re - self.center.re).abs() - self.half_side;
        let dy = (z.im - self.center.im).abs() - self.half_side;
        dx.max(dy).max(0.0)
    }

    /// `X^{+eta}`: the closed `l∞` neighbourhood.
    pub fn inflate(&self, eta: f64) -> Square {
        Square::new(self.center, self.half_side + eta)
    }

    /// `X^{-eta}`; `None` once nothing is left.
    pub fn deflate(&self, eta: f64) -> Option<Square> {
        let h = self.half_side - eta;
        (h > 0.0).then(|| Square::new(self.center, h))
    }

    pub fn translate(&self, shift: Complex64) -> Square {
        Square::new(self.center + shift, self.half_side)
    }

    /// Same center, side scaled by `factor` (the `(1-θ)Q` notation).
    pub fn scaled(&self, factor: f64) -> Square {
        Square::new(self.center, self.half_side * factor)
    }

    pub fn to_rect(&self) -> Rect<f64> {
        Rect::new(
            self.center.re - self.half_side,
            self.center.re + self.half_side,
            self.center.im - self.half_side,
            self.center.im + self.half_side,
        )
    }

    /// True when all four vertices have integer coordinates.
    pub fn has_integer_corners(&self) -> bool {
        let r = self.to_rect();
        [r.x0, r.x1, r.y0, r.y1].iter().all(|v| v.fract() == 0.0)
    }
}
