use super::kb::max_abs_on;
use super::sampler::TranslateSampler;
use super::ErgodicError;
use crate::field::GridField;
use crate::geometry::Square;
use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

fn cell_centers(square: &Square, m: usize) -> impl Iterator<Item = Complex64> + '_ {
    let lo = square.center - Complex64::new(square.half_side, square.half_side);
    let h = square.side() / m as f64;
    (0..m * m).map(move |k| lo + Complex64::new(((k % m) as f64 + 0.5) * h, ((k / m) as f64 + 0.5) * h))
}

/// `A(S_ρ(z) ∩ X) / A(S_ρ)` from `m x m` cell centers.
pub fn local_density<X: Fn(Complex64) -> bool>(x: &X, z: Complex64, rho: f64, m: usize) -> f64 {
    let sq = Square::new(z, rho);
    cell_centers(&sq, m).filter(|&p| x(p)).count() as f64 / (m * m) as f64
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IgReport {
    pub r: f64,
    pub rho: f64,
    /// Sampled `A_{S_R}(X)`.
    pub area_fraction: f64,
    /// Average over `z ∈ S_R` of the local `ρ`-density of `X`.
    pub mean_density: f64,
    pub defect: f64,
    /// `ρ / R`.
    pub scale: f64,
    /// `defect / scale`.
    pub c_measured: f64,
}

/// Compare the relative area of `X` in `S_R` with the average of its local
/// `ρ`-densities. `sampler` runs over `S_R`; `inner` is the per-side count
/// of the local density grid.
pub fn ig_check<X>(x: &X, r: f64, rho: f64, sampler: &TranslateSampler, inner: usize) -> Result<IgReport, ErgodicError>
where
    X: Fn(Complex64) -> bool + Sync,
{
    if !(rho > 0.0 && rho < r) {
        return Err(ErgodicError::InvalidArgument(format!("need 0 < rho < R, got rho = {rho}, R = {r}")));
    }
    let pairs = sampler.map(|z| (x(z), local_density(x, z, rho, inner)))?;
    let count = pairs.len() as f64;
    let area = pairs.iter().filter(|p| p.0).count() as f64 / count;
    let mean = pairs.iter().map(|p| p.1).sum::<f64>() / count;
    let defect = (area - mean).abs();
    Ok(IgReport { r, rho, area_fraction: area, mean_density: mean, defect, scale: rho / r, c_measured: defect * r / rho })
}

/// Local densities of `X(F) = {|F| ≤ 1}` and membership in
/// `X(F, ρ) = {z : A(S_ρ(z) ∩ X(F)) ≥ 1, max_{S_ρ(z)} |F| ≥ e}`.
#[derive(Clone, Debug)]
pub struct DensityField {
    pub rho: f64,
    pub density: GridField,
    pub in_x_rho: Array2<bool>,
    /// Relative area of `S_R ∩ X(F, ρ)`.
    pub fraction: f64,
}

/// Sample the density field of `F` on the `grid x grid` cells of `s_r`.
pub fn sublevel_density<F>(f: &F, rho: f64, s_r: &Square, grid: usize, inner: usize) -> Result<DensityField, ErgodicError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(rho > 1.0) {
        return Err(ErgodicError::InvalidArgument(format!("rho must exceed 1, got {rho}")));
    }
    let in_x = |z: Complex64| f(z).norm() <= 1.0;
    let density = GridField::sample(s_r, grid, false, |z| local_density(&in_x, z, rho, inner));
    let area = 4.0 * rho * rho;
    let max_ok = GridField::sample(s_r, grid, false, |z| {
        let m = max_abs_on(f, &Square::new(z, rho), inner + 1);
        if m >= std::f64::consts::E { 1.0 } else { 0.0 }
    });
    let in_x_rho = Array2::from_shape_fn((grid, grid), |(iy, ix)| {
        density.values[[iy, ix]] * area >= 1.0 && max_ok.values[[iy, ix]] == 1.0
    });
    let fraction = in_x_rho.iter().filter(|&&b| b).count() as f64 / (grid * grid) as f64;
    Ok(DensityField { rho, density, in_x_rho, fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::Scheme;

    #[test]
    fn ig_trivial_sets() {
        let s = TranslateSampler::new(Square::centered(10.0), Scheme::Grid { per_side: 50 });
        let empty = ig_check(&|_| false, 10.0, 1.0, &s, 8).unwrap();
        assert_eq!(empty.defect, 0.0);
        let all = ig_check(&|_| true, 10.0, 1.0, &s, 8).unwrap();
        assert_eq!((all.area_fraction, all.mean_density, all.defect), (1.0, 1.0, 0.0));
    }

    #[test]
    fn ig_half_plane() {
        let s = TranslateSampler::new(Square::centered(100.0), Scheme::Seeded { count: 20_000, seed: 4 });
        let r = ig_check(&|z: Complex64| z.re <= 0.0, 100.0, 1.0, &s, 16).unwrap();
        assert!(r.defect <= 0.1, "{r:?}");
    }

    #[test]
    fn local_density_of_half_plane() {
        // Overlap of S_1(x) with {Re ≤ 0} is (1 - x)/2 for |x| ≤ 1.
        let d = local_density(&|z: Complex64| z.re <= 0.0, Complex64::new(0.5, 3.0), 1.0, 64);
        assert!((d - 0.25).abs() < 1e-12);
    }

    #[test]
    fn constants() {
        let sq = Square::centered(5.0);
        let zero = sublevel_density(&|_| Complex64::new(0.0, 0.0), 2.0, &sq, 10, 8).unwrap();
        assert!(zero.density.values.iter().all(|&d| d == 1.0));
        assert_eq!(zero.fraction, 0.0);
        let three = sublevel_density(&|_| Complex64::new(3.0, 0.0), 2.0, &sq, 10, 8).unwrap();
        assert_eq!(three.fraction, 0.0);
    }

    #[test]
    fn exponential_strip() {
        // X(e^z) = {Re z ≤ 0}. With rho = 2 the area condition is x ≤ 7/4 and
        // the max condition is x ≥ -1, so X(F, 2) is the strip -1 ≤ x ≤ 7/4.
        let sq = Square::centered(20.0);
        let r = sublevel_density(&|z: Complex64| z.exp(), 2.0, &sq, 200, 32).unwrap();
        assert!((r.fraction - 2.75 / 40.0).abs() < 0.005, "{}", r.fraction);
    }
}
