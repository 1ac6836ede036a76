use crate::field::ComplexField;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

// Antiderivatives with ∂x∂y G1 = x/(x²+y²) and ∂x∂y G2 = y/(x²+y²).
fn g1(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let log_term = if y == 0.0 { 0.0 } else { 0.5 * y * r2.ln() };
    let atan_term = if x == 0.0 { 0.0 } else { x * (y / x).atan() };
    log_term - y + atan_term
}

fn g2(x: f64, y: f64) -> f64 {
    g1(y, x)
}

/// `(1/π) ∫_Q dA(w) / (u - w)` over the axis-parallel cell `Q` of side `h`
/// centered at the origin, in closed form.
pub fn cell_kernel(u: Complex64, h: f64) -> Complex64 {
    let (x0, x1) = (u.re - 0.5 * h, u.re + 0.5 * h);
    let (y0, y1) = (u.im - 0.5 * h, u.im + 0.5 * h);
    let corner = |f: fn(f64, f64) -> f64| f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0);
    Complex64::new(corner(g1), -corner(g2)) / PI
}

fn fft_2d(data: &mut [Complex64], m: usize, fft: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(m).for_each(|row| fft.process(row));
    let mut t = transpose(data, m);
    t.par_chunks_mut(m).for_each(|row| fft.process(row));
    data.copy_from_slice(&transpose(&t, m));
}

fn transpose(data: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            out[j * m + i] = data[i * m + j];
        }
    }
    out
}

/// Cauchy transform `α(z) = (1/π) ∫ f(w)/(z - w) dA(w)` of the piecewise
/// constant function with cell values `rhs`, sampled at the cell centers.
/// The cell integrals are exact; the convolution runs through a zero-padded FFT.
pub fn cauchy_transform(rhs: &ComplexField) -> ComplexField {
    let n = rhs.n();
    let m = 2 * n;
    let h = rhs.h;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut kernel = vec![Complex64::new(0.0, 0.0); m * m];
    kernel.par_chunks_mut(m).enumerate().for_each(|(r, row)| {
        if r == n {
            return;
        }
        let oy = if r < n { r as f64 } else { r as f64 - m as f64 };
        for (c, k) in row.iter_mut().enumerate() {
            if c == n {
                continue;
            }
            let ox = if c < n { c as f64 } else { c as f64 - m as f64 };
            *k = cell_kernel(Complex64::new(ox * h, oy * h), h);
        }
    });
    let mut padded = vec![Complex64::new(0.0, 0.0); m * m];
    for ((iy, ix), v) in rhs.values.indexed_iter() {
        padded[iy * m + ix] = *v;
    }
    fft_2d(&mut kernel, m, &fwd);
    fft_2d(&mut padded, m, &fwd);
    padded.par_iter_mut().zip(kernel.par_iter()).for_each(|(a, k)| *a *= k);
    fft_2d(&mut padded, m, &inv);
    let scale = 1.0 / (m * m) as f64;
    let mut out = rhs.clone();
    out.values = Array2::from_shape_fn((n, n), |(iy, ix)| padded[iy * m + ix] * scale);
    out
}

// ∫ sqrt(r² - x²) dx.
fn half_chord_integral(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    0.5 * (x * (r * r - x * x).sqrt() + r * r * (x / r).asin())
}

/// Exact area of `{|w| ≤ r} ∩ [x0, x1] × [y0, y1]`.
pub fn disk_rect_area(r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut cuts = vec![x0, x1, -r, r];
    for y in [y0, y1] {
        if y.abs() < r {
            let x = (r * r - y * y).sqrt();
            cuts.extend([-x, x]);
        }
    }
    cuts.retain(|&x| x >= x0 && x <= x1);
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        if !(b > a) || mid.abs() >= r {
            continue;
        }
        let s = (r * r - mid * mid).sqrt();
        let (top_is_chord, bottom_is_chord) = (s < y1, -s > y0);
        let top = if top_is_chord { s } else { y1 };
        let bottom = if bottom_is_chord { -s } else { y0 };
        if top <= bottom {
            continue;
        }
        let chord = half_chord_integral(b, r) - half_chord_integral(a, r);
        let upper = if top_is_chord { chord } else { y1 * (b - a) };
        let lower = if bottom_is_chord { -chord } else { y0 * (b - a) };
        area += upper - lower;
    }
    area
}

/// Cell averages of the indicator of the disk `|w| ≤ r`.
pub fn disk_indicator(square: &crate::geometry::Square, n: usize, r: f64) -> ComplexField {
    let mut f = ComplexField::zeros(square, n);
    let h = f.h;
    f = f.map(|z, _| {
        let a = disk_rect_area(r, z.re - 0.5 * h, z.re + 0.5 * h, z.im - 0.5 * h, z.im + 0.5 * h);
        Complex64::new(a / (h * h), 0.0)
    });
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Square;
    use crate::quadrature::gauss_legendre_on;

    fn direct(rhs: &ComplexField, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((iy, ix), v) in rhs.values.indexed_iter() {
            acc += v * cell_kernel(z - rhs.point(ix, iy), rhs.h);
        }
        acc
    }

    #[test]
    fn kernel_far_field() {
        let h = 0.1;
        let u = Complex64::new(3.0, -2.0);
        let k = cell_kernel(u, h);
        let approx = h * h / (PI * u);
        assert!((k - approx).norm() < 1e-6 * approx.norm());
    }

    #[test]
    fn kernel_matches_quadrature() {
        let h = 0.5;
        let u = Complex64::new(0.4, 0.3);
        let (xs, ws) = gauss_legendre_on(200, -0.25, 0.25);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &wx) in xs.iter().zip(&ws) {
            for (&y, &wy) in xs.iter().zip(&ws) {
                acc += wx * wy / (u - Complex64::new(x, y));
            }
        }
        assert!((cell_kernel(u, h) - acc / PI).norm() < 1e-9);
        // Own cell: principal value integral vanishes by symmetry.
        assert!(cell_kernel(Complex64::new(0.0, 0.0), h).norm() < 1e-15);
    }

    #[test]
    fn fft_matches_direct_sum() {
        let sq = Square::centered(1.0);
        let rhs = ComplexField::sample(&sq, 12, |z| Complex64::new(z.re.sin(), z.im * z.re));
        let alpha = cauchy_transform(&rhs);
        for &(ix, iy) in &[(0, 0), (3, 7), (11, 11), (6, 2)] {
            let d = direct(&rhs, rhs.point(ix, iy));
            assert!((alpha.values[[iy, ix]] - d).norm() < 1e-12, "{ix},{iy}");
        }
    }

    #[test]
    fn disk_area_pieces() {
        assert!((disk_rect_area(1.0, -2.0, 2.0, -2.0, 2.0) - PI).abs() < 1e-14);
        assert!((disk_rect_area(1.0, 0.0, 2.0, 0.0, 2.0) - PI / 4.0).abs() < 1e-14);
        assert!((disk_rect_area(1.0, -0.1, 0.1, -0.1, 0.1) - 0.04).abs() < 1e-15);
        assert_eq!(disk_rect_area(1.0, 1.0, 2.0, 0.0, 1.0), 0.0);
        // Strip |x| ≤ 1/2: 2 (x sqrt(1-x²) + asin x) at x = 1/2.
        let strip = 2.0 * (0.5 * 0.75f64.sqrt() + (0.5f64).asin());
        assert!((disk_rect_area(1.0, -0.5, 0.5, -3.0, 3.0) - strip).abs() < 1e-14);
    }

    #[test]
    fn zero_in_zero_out() {
        let rhs = ComplexField::zeros(&Square::centered(1.0), 16);
        assert_eq!(cauchy_transform(&rhs).max_abs(), 0.0);
    }
}
