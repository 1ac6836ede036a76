use num_complex::Complex64;
use rayon::prelude::*;

/// Polynomial of degree `≤ degree` stored through the Arnoldi recurrence of
/// its weighted least-squares fit, so that evaluation stays stable at
/// degrees where a monomial basis would not.
#[derive(Clone, Debug)]
pub struct ArnoldiPoly {
    /// Hessenberg coefficients: `hess[k]` holds column `k`, length `k + 2`.
    hess: Vec<Vec<Complex64>>,
    coeffs: Vec<Complex64>,
    p0: f64,
    /// Weighted root-mean-square residual of the fit.
    pub residual_rms: f64,
}

const CHUNK: usize = 4096;

// Fixed chunking keeps the summation order independent of the thread pool.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let parts: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum())
        .collect();
    parts.into_iter().sum()
}

fn norm(a: &[Complex64]) -> f64 {
    let parts: Vec<f64> = a.par_chunks(CHUNK).map(|x| x.iter().map(|p| p.norm_sqr()).sum()).collect();
    parts.into_iter().sum::<f64>().sqrt()
}

impl ArnoldiPoly {
    /// Minimize `Σ w_i |f_i - P(z_i)|²` where `ln w_i = log_weights[i]`.
    /// Weights are renormalized by their maximum before exponentiating.
    pub fn fit(points: &[Complex64], values: &[Complex64], log_weights: &[f64], degree: usize) -> Self {
        assert_eq!(points.len(), values.len());
        assert_eq!(points.len(), log_weights.len());
        let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sw: Vec<f64> = log_weights.iter().map(|l| (0.5 * (l - top)).exp()).collect();
        let s0 = sw.iter().map(|w| w * w).sum::<f64>().sqrt();
        let p0 = 1.0 / s0;
        let mut basis: Vec<Vec<Complex64>> = vec![sw.iter().map(|w| Complex64::new(w * p0, 0.0)).collect()];
        let mut hess = Vec::with_capacity(degree);
        for k in 0..degree {
            let mut v: Vec<Complex64> = basis[k].par_iter().zip(points.par_iter()).map(|(q, z)| q * z).collect();
            let mut col = vec![Complex64::new(0.0, 0.0); k + 2];
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(q, &v);
                    col[i] += c;
                    v.par_iter_mut().zip(q.par_iter()).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nv = norm(&v);
            col[k + 1] = Complex64::new(nv, 0.0);
            if !(nv > 0.0) {
                break;
            }
            v.par_iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
            hess.push(col);
        }
        let target: Vec<Complex64> = values.iter().zip(&sw).map(|(f, w)| f * w).collect();
        let coeffs: Vec<Complex64> = basis.iter().map(|q| dot(q, &target)).collect();
        let mut resid = target.clone();
        for (q, c) in basis.iter().zip(&coeffs) {
            resid.par_iter_mut().zip(q.par_iter()).for_each(|(r, y)| *r -= c * y);
        }
        let residual_rms = norm(&resid) / s0;
        ArnoldiPoly { hess, coeffs, p0, residual_rms }
    }

    pub fn degree(&self) -> usize {
        self.hess.len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut p = Vec::with_capacity(self.coeffs.len());
        p.push(Complex64::new(self.p0, 0.0));
        let mut acc = self.coeffs[0] * p[0];
        for (k, col) in self.hess.iter().enumerate() {
            let mut next = z * p[k];
            for i in 0..=k {
                next -= col[i] * p[i];
            }
            next /= col[k + 1];
            acc += self.coeffs[k + 1] * next;
            p.push(next);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<Complex64> {
        let mut pts = Vec::new();
        for i in 0..40 {
            for j in 0..40 {
                pts.push(Complex64::new(-2.0 + 0.1 * i as f64, -2.0 + 0.1 * j as f64));
            }
        }
        pts
    }

    #[test]
    fn reproduces_polynomials_in_degree() {
        let pts = grid();
        let f = |z: Complex64| z * z * z - Complex64::new(0.0, 2.0) * z + 1.0;
        let vals: Vec<_> = pts.iter().map(|&z| f(z)).collect();
        let lw: Vec<_> = pts.iter().map(|z| -z.norm_sqr()).collect();
        let p = ArnoldiPoly::fit(&pts, &vals, &lw, 12);
        for &z in &[Complex64::new(0.3, 0.1), Complex64::new(-1.9, 1.5)] {
            assert!((p.eval(z) - f(z)).norm() < 1e-10);
        }
        assert!(p.residual_rms < 1e-10);
    }

    #[test]
    fn high_degree_stays_stable() {
        let pts = grid();
        let vals: Vec<_> = pts.iter().map(|z| z.exp()).collect();
        let lw = vec![0.0; pts.len()];
        let p = ArnoldiPoly::fit(&pts, &vals, &lw, 60);
        let z = Complex64::new(0.45, -0.35);
        assert!((p.eval(z) - z.exp()).norm() < 1e-10);
    }
}
