use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::handle::{chordal, ExtComplex, MeromorphicHandle};
use super::NevanlinnaError;

const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn point(&self, k: usize, n: usize) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, 2.0 * PI * k as f64 / n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindingReport {
    pub index: i64,
    /// Total argument increment divided by `2π`.
    pub raw: f64,
    pub rounding_distance: f64,
    pub nodes: usize,
    pub min_distance: f64,
    /// Largest chord of the sampled image polygon.
    pub step_scale: f64,
    /// Index recomputed with twice the nodes.
    pub doubled_index: i64,
}

/// Index of `F(circle)` about `zeta` by the argument principle.
pub fn winding_number(
    f: &MeromorphicHandle,
    circle: Circle,
    zeta: Complex64,
) -> Result<WindingReport, NevanlinnaError> {
    winding_of(&|z| f.value(z), f.name(), circle, zeta)
}

/// The node count doubles until the image polygon keeps a distance of ten
/// chords from `zeta`; then every argument step is below `0.1` rad and the
/// polygon's index is the curve's index.
pub(crate) fn winding_of(
    eval: &(dyn Fn(Complex64) -> Result<ExtComplex, NevanlinnaError> + Sync),
    name: &str,
    circle: Circle,
    zeta: Complex64,
) -> Result<WindingReport, NevanlinnaError> {
    let mut n = MIN_NODES;
    let mut last_min = f64::INFINITY;
    while n <= MAX_NODES {
        let values = sample(eval, name, circle, zeta, 2 * n)?;
        let coarse: Vec<Complex64> = values.iter().step_by(2).copied().collect();
        let (min_distance, step_scale) = geometry(&coarse);
        last_min = min_distance;
        if min_distance >= 10.0 * step_scale {
            let raw = increment(&coarse) / (2.0 * PI);
            let index = raw.round() as i64;
            let doubled_index = (increment(&values) / (2.0 * PI)).round() as i64;
            return Ok(WindingReport {
                index,
                raw,
                rounding_distance: (raw - index as f64).abs(),
                nodes: n,
                min_distance,
                step_scale,
                doubled_index,
            });
        }
        n *= 2;
    }
    Err(NevanlinnaError::CurveThroughPoint { min_distance: last_min })
}

fn sample(
    eval: &(dyn Fn(Complex64) -> Result<ExtComplex, NevanlinnaError> + Sync),
    name: &str,
    circle: Circle,
    zeta: Complex64,
    n: usize,
) -> Result<Vec<Complex64>, NevanlinnaError> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let z = circle.point(k, n);
            match eval(z)? {
                ExtComplex::Finite(v) => Ok(v - zeta),
                ExtComplex::Infinity => Err(NevanlinnaError::EvaluationFailure {
                    function: name.to_string(),
                    z,
                    reason: "pole on the contour".into(),
                }),
            }
        })
        .collect()
}

fn geometry(values: &[Complex64]) -> (f64, f64) {
    let n = values.len();
    let min = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let step = (0..n).map(|k| (values[(k + 1) % n] - values[k]).norm()).fold(0.0, f64::max);
    (min, step)
}

fn increment(values: &[Complex64]) -> f64 {
    let n = values.len();
    (0..n).map(|k| (values[(k + 1) % n] / values[k]).arg()).sum()
}

/// Closed disk of the sphere in the chordal metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphericalDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl SphericalDisk {
    pub fn contains(&self, v: ExtComplex) -> bool {
        chordal(v, ExtComplex::Finite(self.center)) <= self.radius
    }

    /// Center plus points just inside the boundary along eight rays.
    pub fn sample_points(&self) -> Vec<Complex64> {
        let mut out = vec![self.center];
        let inside = |z: Complex64| self.contains(ExtComplex::Finite(z));
        for j in 0..8 {
            let dir = Complex64::from_polar(1.0, PI * j as f64 / 4.0);
            let mut hi = 1e-3;
            while inside(self.center + dir * hi) && hi < 1e8 {
                hi *= 2.0;
            }
            if hi >= 1e8 {
                continue;
            }
            let mut lo = 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(self.center + dir * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(self.center + dir * (0.99 * lo));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub covered: bool,
    /// Chordal gap between `F(∂D)` and the spherical disk.
    pub delta: f64,
    /// `max_{D̄} ρ(F, τ_w F)` on the sampling grid.
    pub perturbation: f64,
    /// Whether `perturbation < δ/2` and `F(∂D)` winds around the disk, so
    /// that the translated index must equal the base index.
    pub guaranteed: bool,
    pub base_index: i64,
    /// Index of `F(∂D_w)` about each sample point of the disk.
    pub translated_indices: Vec<Option<i64>>,
}

/// Sampling density for [`recurrence_coverage`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageOptions {
    pub boundary_nodes: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions { boundary_nodes: 4096, radial_nodes: 32, angular_nodes: 256 }
    }
}

/// Checks that the image of `D_w = D + w` under `F` winds around the
/// spherical disk `target`, given that `F(∂D)` avoids it.
pub fn recurrence_coverage(
    f: &MeromorphicHandle,
    d: Circle,
    target: SphericalDisk,
    w: Complex64,
    opts: &CoverageOptions,
) -> Result<CoverageReport, NevanlinnaError> {
    let center = ExtComplex::Finite(target.center);
    let nb = opts.boundary_nodes.max(MIN_NODES);
    let gaps: Vec<f64> = (0..nb)
        .into_par_iter()
        .map(|k| Ok(chordal(f.value(d.point(k, nb))?, center) - target.radius))
        .collect::<Result<_, NevanlinnaError>>()?;
    let delta = gaps.into_iter().fold(f64::INFINITY, f64::min);
    if !(delta > 1e-9) {
        return Err(NevanlinnaError::GapTooSmall { delta });
    }

    let mut grid = vec![d.center];
    for i in 1..=opts.radial_nodes {
        let r = d.radius * i as f64 / opts.radial_nodes as f64;
        grid.extend((0..opts.angular_nodes).map(|k| Circle::new(d.center, r).point(k, opts.angular_nodes)));
    }
    let perturbation = grid
        .par_iter()
        .map(|&z| Ok(chordal(f.value(z)?, f.value(z + w)?)))
        .collect::<Result<Vec<f64>, NevanlinnaError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let base_index = winding_number(f, d, target.center)?.index;
    let guaranteed = perturbation < 0.5 * delta && base_index > 0;

    let shifted = |z: Complex64| f.value(z + w);
    let translated_indices: Vec<Option<i64>> = target
        .sample_points()
        .into_iter()
        .map(|zeta| match winding_of(&shifted, f.name(), d, zeta) {
            Ok(rep) => Ok(Some(rep.index)),
            Err(NevanlinnaError::CurveThroughPoint { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let covered = translated_indices.iter().all(|i| i.is_some_and(|i| i > 0));
    if guaranteed && !covered {
        return Err(NevanlinnaError::GuaranteeViolated { perturbation, delta });
    }
    Ok(CoverageReport { covered, delta, perturbation, guaranteed, base_index, translated_indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::weierstrass::Weierstrass;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> Circle {
        Circle::new(c(0.0, 0.0), 1.0)
    }

    #[test]
    fn builtin_winding_cases() {
        let cases = [
            (MeromorphicHandle::identity(), c(0.0, 0.0), 1),
            (MeromorphicHandle::identity(), c(2.0, 0.0), 0),
            (MeromorphicHandle::power(2), c(0.0, 0.0), 2),
        ];
        for (f, zeta, expected) in cases {
            let rep = winding_number(&f, unit(), zeta).unwrap();
            assert_eq!(rep.index, expected);
            assert_eq!(rep.doubled_index, expected);
            assert!(rep.rounding_distance < 1e-9);
        }
    }

    #[test]
    fn curve_through_point() {
        let err = winding_number(&MeromorphicHandle::identity(), unit(), c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, NevanlinnaError::CurveThroughPoint { .. }));
    }

    #[test]
    fn near_miss_is_still_exact() {
        let rep = winding_number(&MeromorphicHandle::identity(), unit(), c(1.0 - 1e-4, 0.0)).unwrap();
        assert_eq!(rep.index, 1);
    }

    #[test]
    fn sin_full_period_is_guaranteed() {
        let target = SphericalDisk { center: c(0.0, 0.0), radius: 0.1 };
        let rep = recurrence_coverage(&MeromorphicHandle::sin(), unit(), target, c(2.0 * PI, 0.0), &CoverageOptions::default())
            .unwrap();
        assert!(rep.perturbation < 1e-12);
        assert!(rep.guaranteed && rep.covered);
        assert_eq!(rep.base_index, 1);
    }

    #[test]
    fn sin_half_period_not_guaranteed() {
        let target = SphericalDisk { center: c(0.0, 0.0), radius: 0.1 };
        let rep = recurrence_coverage(&MeromorphicHandle::sin(), unit(), target, c(PI, 0.0), &CoverageOptions::default())
            .unwrap();
        assert!(!rep.guaranteed);
        assert!(rep.perturbation >= 0.5 * rep.delta);
        assert!(rep.covered);
    }

    #[test]
    fn wp_period_translate() {
        let wp = MeromorphicHandle::weierstrass(Weierstrass::square(40.0));
        // ℘ - e_1 has a double zero at the half-period 1, so the pole-free
        // disk D(1, 0.3) maps twice around e_1.
        let center = c(1.0, 0.0);
        let e1 = wp.value(center).unwrap().finite().unwrap();
        let d = Circle::new(center, 0.3);
        let target = SphericalDisk { center: e1, radius: 0.02 };
        let rep = recurrence_coverage(&wp, d, target, c(2.0, 0.0), &CoverageOptions::default()).unwrap();
        assert!(rep.guaranteed && rep.covered, "{rep:?}");
        assert_eq!(rep.base_index, 2);
    }

    #[test]
    fn no_guarantee_without_base_coverage() {
        let target = SphericalDisk { center: c(3.0, 0.0), radius: 0.05 };
        let rep = recurrence_coverage(&MeromorphicHandle::sin(), unit(), target, c(2.0 * PI, 0.0), &CoverageOptions::default())
            .unwrap();
        assert_eq!(rep.base_index, 0);
        assert!(!rep.guaranteed && !rep.covered);
    }

    #[test]
    fn gap_too_small() {
        let target = SphericalDisk { center: c(1.0, 0.0), radius: 0.1 };
        let err = recurrence_coverage(&MeromorphicHandle::identity(), unit(), target, c(0.0, 0.0), &CoverageOptions::default())
            .unwrap_err();
        assert!(matches!(err, NevanlinnaError::GapTooSmall { .. }));
    }
}
