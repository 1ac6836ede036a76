//! Sampled real fields on cell-centered square grids.

use crate::geometry::Square;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("field csv has no rows")]
    Empty,
    #[error("field csv is not a regular square grid: {0}")]
    Irregular(String),
}

/// Values at cell centers `origin + ((ix + 1/2) h, (iy + 1/2) h)`, stored `[iy, ix]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub origin: (f64, f64),
    pub h: f64,
    pub values: Array2<f64>,
    /// When set, `values` hold natural logarithms and `-inf` means zero.
    pub log_domain: bool,
}

impl GridField {
    /// Sample `f` on the `n x n` cell grid covering `square`.
    pub fn sample<F>(square: &Square, n: usize, log_domain: bool, f: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        let h = square.side() / n as f64;
        let origin = (square.center.re - square.half_side, square.center.im - square.half_side);
        let data: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (iy, ix) = (k / n, k % n);
                f(Complex64::new(origin.0 + (ix as f64 + 0.5) * h, origin.1 + (iy as f64 + 0.5) * h))
            })
            .collect();
        GridField {
            origin,
            h,
            values: Array2::from_shape_vec((n, n), data).expect("shape matches"),
            log_domain,
        }
    }

    pub fn nx(&self) -> usize {
        self.values.ncols()
    }

    pub fn ny(&self) -> usize {
        self.values.nrows()
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.origin.0 + (ix as f64 + 0.5) * self.h,
            self.origin.1 + (iy as f64 + 0.5) * self.h,
        )
    }

    /// The square covered by the grid (exact when `nx == ny`).
    pub fn square(&self) -> Square {
        let half = 0.5 * self.h * self.nx() as f64;
        Square::new(Complex64::new(self.origin.0 + half, self.origin.1 + half), half)
    }

    /// Cell containing `z`, if any.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - self.origin.0) / self.h;
        let fy = (z.im - self.origin.1) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        (ix < self.nx() && iy < self.ny()).then_some((ix, iy))
    }

    /// Linear-scale value (exponentiates log fields).
    pub fn linear(&self, ix: usize, iy: usize) -> f64 {
        let v = self.values[[iy, ix]];
        if self.log_domain {
            v.exp()
        } else {
            v
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// CSV `x,y,value` in row-major order (`log_value` for log fields).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), FieldError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", if self.log_domain { "log_value" } else { "value" }])?;
        for iy in 0..self.ny() {
            for ix in 0..self.nx() {
                let z = self.point(ix, iy);
                out.write_record([z.re.to_string(), z.im.to_string(), self.values[[iy, ix]].to_string()])?;
            }
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv): a row-major square grid of cell centers.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, FieldError> {
        let mut rdr = csv::Reader::from_reader(r);
        let log_domain = rdr.headers()?.get(2).map(|h| h == "log_value").unwrap_or(false);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64)>() {
            rows.push(rec?);
        }
        let xy: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
        let (origin, h, n) = grid_layout(&xy)?;
        Ok(GridField {
            origin,
            h,
            values: Array2::from_shape_vec((n, n), rows.iter().map(|r| r.2).collect()).expect("n*n"),
            log_domain,
        })
    }
}

/// Origin, spacing and side count of a row-major cell-center grid.
fn grid_layout(xy: &[(f64, f64)]) -> Result<((f64, f64), f64, usize), FieldError> {
    if xy.is_empty() {
        return Err(FieldError::Empty);
    }
    let n = (xy.len() as f64).sqrt().round() as usize;
    if n * n != xy.len() || n < 2 {
        return Err(FieldError::Irregular(format!("{} rows is not a square count", xy.len())));
    }
    let h = xy[1].0 - xy[0].0;
    if !(h > 0.0) {
        return Err(FieldError::Irregular("x must increase along rows".into()));
    }
    let origin = (xy[0].0 - 0.5 * h, xy[0].1 - 0.5 * h);
    for (k, &(x, y)) in xy.iter().enumerate() {
        let (px, py) = (origin.0 + ((k % n) as f64 + 0.5) * h, origin.1 + ((k / n) as f64 + 0.5) * h);
        if (px - x).abs() > 1e-6 * h || (py - y).abs() > 1e-6 * h {
            return Err(FieldError::Irregular(format!("row {k} at ({x}, {y}) is off the grid")));
        }
    }
    Ok((origin, h, n))
}

/// Complex values at cell centers, laid out like [`GridField`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub origin: (f64, f64),
    pub h: f64,
    pub values: Array2<Complex64>,
}

fn keys(t: f64) -> [f64; 4] {
    // Cubic convolution weights with a = -1/2 for offsets -1, 0, 1, 2.
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

impl ComplexField {
    pub fn zeros(square: &Square, n: usize) -> Self {
        let h = square.side() / n as f64;
        ComplexField {
            origin: (square.center.re - square.half_side, square.center.im - square.half_side),
            h,
            values: Array2::zeros((n, n)),
        }
    }

    pub fn sample<F>(square: &Square, n: usize, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let mut out = ComplexField::zeros(square, n);
        let data: Vec<Complex64> = (0..n * n).into_par_iter().map(|k| f(out.point(k % n, k / n))).collect();
        out.values = Array2::from_shape_vec((n, n), data).expect("shape matches");
        out
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.origin.0 + (ix as f64 + 0.5) * self.h,
            self.origin.1 + (iy as f64 + 0.5) * self.h,
        )
    }

    pub fn square(&self) -> Square {
        let half = 0.5 * self.h * self.n() as f64;
        Square::new(Complex64::new(self.origin.0 + half, self.origin.1 + half), half)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same grid, values mapped pointwise together with their cell center.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        let mut out = self.clone();
        for ((iy, ix), v) in out.values.indexed_iter_mut() {
            *v = f(self.point(ix, iy), *v);
        }
        out
    }

    /// Cubic-convolution interpolation; `None` when the 4x4 stencil leaves the grid.
    pub fn bicubic(&self, z: Complex64) -> Option<Complex64> {
        let fx = (z.re - self.origin.0) / self.h - 0.5;
        let fy = (z.im - self.origin.1) / self.h - 0.5;
        let (x0, y0) = (fx.floor(), fy.floor());
        let n = self.n() as f64;
        if x0 < 1.0 || y0 < 1.0 || x0 + 2.0 > n - 1.0 || y0 + 2.0 > n - 1.0 {
            return None;
        }
        let (wx, wy) = (keys(fx - x0), keys(fy - y0));
        let (x0, y0) = (x0 as usize - 1, y0 as usize - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wyj) in wy.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (i, wxi) in wx.iter().enumerate() {
                row += self.values[[y0 + j, x0 + i]] * wxi;
            }
            acc += row * wyj;
        }
        Some(acc)
    }

    /// Central-difference `∂̄ = (∂_x + i∂_y)/2` at an interior cell.
    pub fn dbar_at(&self, ix: usize, iy: usize) -> Complex64 {
        let v = &self.values;
        let dx = (v[[iy, ix + 1]] - v[[iy, ix - 1]]) / (2.0 * self.h);
        let dy = (v[[iy + 1, ix]] - v[[iy - 1, ix]]) / (2.0 * self.h);
        0.5 * (dx + Complex64::i() * dy)
    }

    /// CSV `x,y,re,im` in row-major order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), FieldError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "re", "im"])?;
        for iy in 0..self.n() {
            for ix in 0..self.n() {
                let z = self.point(ix, iy);
                let v = self.values[[iy, ix]];
                out.write_record([z.re.to_string(), z.im.to_string(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(r: R) -> Result<Self, FieldError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64, f64)>() {
            rows.push(rec?);
        }
        let xy: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
        let (origin, h, n) = grid_layout(&xy)?;
        let values = rows.iter().map(|r| Complex64::new(r.2, r.3)).collect();
        Ok(ComplexField { origin, h, values: Array2::from_shape_vec((n, n), values).expect("n*n") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let f = GridField::sample(&Square::centered(2.0), 8, false, |z| z.re * 3.0 - z.im);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = GridField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(g.nx(), 8);
        assert!((g.h - f.h).abs() < 1e-12);
        for (a, b) in f.values.iter().zip(g.values.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_csv_round_trip() {
        let f = ComplexField::sample(&Square::new(Complex64::new(1.0, -0.5), 1.5), 6, |z| z * z + 1.0 / 3.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = ComplexField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(g.values, f.values);
        assert_eq!(g.n(), 6);
        assert!((g.h - f.h).abs() < 1e-15);
    }

    #[test]
    fn cell_lookup() {
        let f = GridField::sample(&Square::centered(1.0), 4, false, |_| 0.0);
        assert_eq!(f.cell_of(Complex64::new(-0.9, 0.9)), Some((0, 3)));
        assert_eq!(f.cell_of(Complex64::new(1.1, 0.0)), None);
    }

    #[test]
    fn bicubic_reproduces_quadratics() {
        let f = ComplexField::sample(&Square::centered(2.0), 32, |z| z * z - 2.0 * z);
        for &z in &[Complex64::new(0.3, -0.77), Complex64::new(-1.2, 1.1)] {
            let v = f.bicubic(z).unwrap();
            assert!((v - (z * z - 2.0 * z)).norm() < 1e-12, "{v}");
        }
        assert!(f.bicubic(Complex64::new(1.99, 0.0)).is_none());
    }

    #[test]
    fn dbar_of_holomorphic_and_conjugate() {
        let f = ComplexField::sample(&Square::centered(1.0), 16, |z| 3.0 * z + z.conj());
        assert!((f.dbar_at(5, 7) - 1.0).norm() < 1e-12);
    }
}
