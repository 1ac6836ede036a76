use super::rect::{self, Rect};
use super::square::Square;
use super::GeometryError;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// How the gap sequence `ε_n` is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EpsilonSpec {
    /// `ε_n = 3^{-n}`.
    Geometric,
    /// `ε_n = 1 / ((n + 10) ln^3(n + 10))`, natural logarithm.
    Thm1b,
    /// User-supplied values `ε_1, ε_2, ...`; they must cover the requested depth.
    Explicit(Vec<f64>),
}

impl EpsilonSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EpsilonSpec::Geometric => "geometric",
            EpsilonSpec::Thm1b => "thm1b",
            EpsilonSpec::Explicit(_) => "explicit",
        }
    }
}

/// The nine unit directions `ω_j`; index 0 is the central copy.
pub const OMEGA: [(i8, i8); 9] = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

pub fn omega(j: usize) -> Complex64 {
    let (x, y) = OMEGA[j];
    Complex64::new(x as f64, y as f64)
}

/// Gap sequence and the derived geometry of a ternary square system.
///
/// `a_0 = 1`, `a_n = 3 a_{n-1} (1 + ε_n)`, `d_n = a_{n-1} ε_n`; the level-`n`
/// copies of `S_{n-1}` sit at offsets `a_{n-1}(2 + 3ε_n) ω_j` and are separated
/// by corridors of width `3 d_n`.
#[derive(Clone, Debug)]
pub struct TernaryParams {
    spec: EpsilonSpec,
    eps: Vec<f64>,
    a: Vec<f64>,
    d: Vec<f64>,
    exact_a: Option<Vec<BigRational>>,
    exact_eps: Option<Vec<BigRational>>,
}

impl TernaryParams {
    pub fn build(spec: EpsilonSpec, depth: usize) -> Result<Self, GeometryError> {
        if depth == 0 {
            return Err(GeometryError::InvalidDepth);
        }
        let (eps, exact_eps): (Vec<f64>, Option<Vec<BigRational>>) = match &spec {
            EpsilonSpec::Geometric => {
                let mut e = Vec::with_capacity(depth);
                let mut q = Vec::with_capacity(depth);
                let mut cur = 1.0;
                let mut cur_q = BigRational::one();
                let three = BigRational::from_integer(BigInt::from(3));
                for _ in 0..depth {
                    cur /= 3.0;
                    cur_q /= three.clone();
                    e.push(cur);
                    q.push(cur_q.clone());
                }
                (e, Some(q))
            }
            EpsilonSpec::Thm1b => {
                let e = (1..=depth)
                    .map(|j| {
                        let t = (j + 10) as f64;
                        1.0 / (t * t.ln().powi(3))
                    })
                    .collect();
                (e, None)
            }
            EpsilonSpec::Explicit(list) => {
                if list.len() < depth {
                    return Err(GeometryError::DepthExceeded { requested: depth, depth: list.len() });
                }
                let e: Vec<f64> = list[..depth].to_vec();
                let q = e.iter().map(|&v| BigRational::from_float(v)).collect::<Option<Vec<_>>>();
                (e, q)
            }
        };
        validate_epsilon(&eps)?;

        let mut a = vec![1.0];
        let mut d = vec![0.0];
        for n in 1..=depth {
            let prev = a[n - 1];
            a.push(3.0 * prev * (1.0 + eps[n - 1]));
            d.push(prev * eps[n - 1]);
        }
        let exact_a = exact_eps.as_ref().map(|q| {
            let three = BigRational::from_integer(BigInt::from(3));
            let mut out = vec![BigRational::one()];
            for e in q {
                let prev = out.last().unwrap().clone();
                out.push(three.clone() * prev * (BigRational::one() + e.clone()));
            }
            out
        });
        Ok(TernaryParams { spec, eps, a, d, exact_a, exact_eps })
    }

    pub fn spec(&self) -> &EpsilonSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.eps.len()
    }

    /// `ε_n`, `n >= 1`.
    pub fn epsilon(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.depth(), "epsilon index {n} outside 1..={}", self.depth());
        self.eps[n - 1]
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    /// `d_n = a_{n-1} ε_n`, `n >= 1`.
    pub fn d(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.depth(), "d index {n} outside 1..={}", self.depth());
        self.d[n]
    }

    pub fn a_seq(&self) -> &[f64] {
        &self.a
    }

    pub fn eps_seq(&self) -> &[f64] {
        &self.eps
    }

    pub fn d_seq(&self) -> &[f64] {
        &self.d[1..]
    }

    /// Offset magnitude `c_n = a_{n-1}(2 + 3ε_n)` of the level-`n` copies.
    pub fn step(&self, n: usize) -> f64 {
        self.a[n - 1] * (2.0 + 3.0 * self.epsilon(n))
    }

    /// `ξ_n = a_{n-1} + (3/2) d_n`, the center line of the inner corridors.
    pub fn xi(&self, n: usize) -> f64 {
        self.a[n - 1] + 1.5 * self.d(n)
    }

    /// `S_n = [-a_n, a_n]^2`.
    pub fn s(&self, n: usize) -> Square {
        Square::centered(self.a[n])
    }

    pub fn has_exact(&self) -> bool {
        self.exact_a.is_some()
    }

    pub fn exact_a(&self, n: usize) -> Option<BigRational> {
        self.exact_a.as_ref().map(|v| v[n].clone())
    }

    pub fn exact_d(&self, n: usize) -> Option<BigRational> {
        let a = self.exact_a.as_ref()?;
        let e = self.exact_eps.as_ref()?;
        Some(a[n - 1].clone() * e[n - 1].clone())
    }

    fn exact_step(&self, n: usize) -> Option<BigRational> {
        let a = self.exact_a.as_ref()?;
        let e = self.exact_eps.as_ref()?;
        let two = BigRational::from_integer(BigInt::from(2));
        let three = BigRational::from_integer(BigInt::from(3));
        Some(a[n - 1].clone() * (two + three * e[n - 1].clone()))
    }

    /// Single-level translate `w_j(n) = a_{n-1}(2 + 3ε_n) ω_j`.
    pub fn w(&self, j: usize, n: usize) -> Result<Complex64, GeometryError> {
        if n == 0 || n > self.depth() {
            return Err(GeometryError::DepthExceeded { requested: n, depth: self.depth() });
        }
        Ok(omega(j) * self.step(n))
    }

    /// Multi-level translate `w_j(k, n)`, the digit-wise sum of single-level ones.
    pub fn translate_center(&self, idx: &TranslationIndex) -> Result<Complex64, GeometryError> {
        if idx.n > self.depth() {
            return Err(GeometryError::DepthExceeded { requested: idx.n, depth: self.depth() });
        }
        let mut w = Complex64::new(0.0, 0.0);
        for (l, &j) in idx.digits.iter().enumerate() {
            w += self.w(j as usize, idx.k + l + 1)?;
        }
        Ok(w)
    }

    /// Exact rational coordinates of `w_j(k, n)`, when the sequence is rational.
    pub fn translate_center_exact(&self, idx: &TranslationIndex) -> Option<(BigRational, BigRational)> {
        let mut x = BigRational::zero();
        let mut y = BigRational::zero();
        for (l, &j) in idx.digits.iter().enumerate() {
            let c = self.exact_step(idx.k + l + 1)?;
            let (ox, oy) = OMEGA[j as usize];
            x += c.clone() * BigRational::from_integer(BigInt::from(ox));
            y += c * BigRational::from_integer(BigInt::from(oy));
        }
        Some((x, y))
    }

    /// The nine level-`n` copies `τ_{w_j(n)} S_{n-1}`, centered at `-w_j(n)`.
    pub fn level_copies(&self, n: usize) -> Result<Vec<Square>, GeometryError> {
        (0..9)
            .map(|j| Ok(Square::new(-self.w(j, n)?, self.a[n - 1])))
            .collect()
    }

    /// Exact rectangles of the nine level-`n` copies.
    pub fn level_copies_exact(&self, n: usize) -> Option<Vec<Rect<BigRational>>> {
        let half = self.exact_a(n - 1)?;
        let c = self.exact_step(n)?;
        Some(
            OMEGA
                .iter()
                .map(|&(ox, oy)| {
                    let cx = -(c.clone() * BigRational::from_integer(BigInt::from(ox)));
                    let cy = -(c.clone() * BigRational::from_integer(BigInt::from(oy)));
                    Rect::new(
                        cx.clone() - half.clone(),
                        cx + half.clone(),
                        cy.clone() - half.clone(),
                        cy + half.clone(),
                    )
                })
                .collect(),
        )
    }

    /// All `9^{n-k}` translation indices from level `k` to level `n`.
    pub fn indices(&self, k: usize, n: usize) -> impl Iterator<Item = TranslationIndex> {
        let count = 9usize.pow((n - k) as u32);
        (0..count).map(move |j| TranslationIndex::from_encoded(k, n, j as u64))
    }

    /// Centers `-w_j(k, n)` of the `9^{n-k}` copies of `S_k` inside `S_n`.
    pub fn copy_centers(&self, k: usize, n: usize) -> Result<Vec<Complex64>, GeometryError> {
        if n > self.depth() {
            return Err(GeometryError::DepthExceeded { requested: n, depth: self.depth() });
        }
        if n - k > 8 {
            return Err(GeometryError::TooManyCopies { k, n });
        }
        let mut centers = vec![Complex64::new(0.0, 0.0)];
        for level in (k + 1)..=n {
            let shifts: Vec<Complex64> = (0..9).map(|j| -omega(j) * self.step(level)).collect();
            centers = shifts
                .iter()
                .flat_map(|s| centers.iter().map(move |c| c + s))
                .collect();
        }
        Ok(centers)
    }

    /// Exact rectangles of the copies of `S_k` in `S_n`, each deflated by `shrink`.
    pub fn copies_exact(&self, k: usize, n: usize, shrink: &BigRational) -> Option<Vec<Rect<BigRational>>> {
        if n - k > 6 {
            return None;
        }
        let half = self.exact_a(k)? - shrink.clone();
        let mut centers = vec![(BigRational::zero(), BigRational::zero())];
        for level in (k + 1)..=n {
            let c = self.exact_step(level)?;
            let mut next = Vec::with_capacity(centers.len() * 9);
            for &(ox, oy) in OMEGA.iter() {
                for (x, y) in &centers {
                    next.push((
                        x.clone() - c.clone() * BigRational::from_integer(BigInt::from(ox)),
                        y.clone() - c.clone() * BigRational::from_integer(BigInt::from(oy)),
                    ));
                }
            }
            centers = next;
        }
        Some(
            centers
                .into_iter()
                .map(|(x, y)| {
                    Rect::new(
                        x.clone() - half.clone(),
                        x + half.clone(),
                        y.clone() - half.clone(),
                        y + half.clone(),
                    )
                })
                .collect(),
        )
    }

    /// Exact relative area in `S_n` of the copies of `S_k` shrunk by `shrink`.
    pub fn copy_fraction_exact(&self, k: usize, n: usize, shrink: &BigRational) -> Option<BigRational> {
        let rects = self.copies_exact(k, n, shrink)?;
        let an = self.exact_a(n)?;
        let s = Rect::new(-an.clone(), an.clone(), -an.clone(), an);
        Some(rect::relative_area(&rects, &s))
    }

    /// Closed-form copy fraction `9^{n-k} (2(a_k - shrink))^2 / (2 a_n)^2`.
    pub fn copy_fraction(&self, k: usize, n: usize, shrink: f64) -> f64 {
        let half = (self.a[k] - shrink).max(0.0);
        9f64.powi((n - k) as i32) * (half / self.a[n]).powi(2)
    }

    /// `K_n^{-η}`: the level-`n` corridors (including the perimeter corridor)
    /// deflated by `η`, as an exact rectangle tiling.
    pub fn corridor_region(&self, n: usize, eta: f64) -> Vec<Rect<f64>> {
        let outer = self.a[n] + 3.0 * self.d(n) - eta;
        let outer_rect = Rect::new(-outer, outer, -outer, outer);
        let holes: Vec<Rect<f64>> = self
            .level_copies(n)
            .expect("level within depth")
            .iter()
            .map(|s| s.inflate(eta).to_rect())
            .collect();
        rect::difference(&outer_rect, &holes)
    }

    /// Exact version of [`corridor_region`](Self::corridor_region).
    pub fn corridor_region_exact(&self, n: usize, eta: &BigRational) -> Option<Vec<Rect<BigRational>>> {
        let three = BigRational::from_integer(BigInt::from(3));
        let outer = self.exact_a(n)? + three * self.exact_d(n)? - eta.clone();
        let outer_rect = Rect::new(-outer.clone(), outer.clone(), -outer.clone(), outer);
        let holes: Vec<_> = self.level_copies_exact(n)?.iter().map(|r| r.offset(eta)).collect();
        Some(rect::difference(&outer_rect, &holes))
    }

    /// Locate `z` in the level-`n` system: inside a copy of `S_0` (with its
    /// digit path), inside a level-`m` corridor, or beyond the perimeter corridor.
    pub fn classify_point(&self, z: Complex64, n: usize) -> Result<PointClass, GeometryError> {
        if n > self.depth() {
            return Err(GeometryError::DepthExceeded { requested: n, depth: self.depth() });
        }
        let reach = self.a[n] + if n >= 1 { 3.0 * self.d(n) } else { 0.0 };
        if z.re.abs() > reach || z.im.abs() > reach {
            return Ok(PointClass::Outside);
        }
        if n >= 1 && (z.re.abs() > self.a[n] || z.im.abs() > self.a[n]) {
            return Ok(PointClass::InCorridor(n));
        }
        let mut digits = vec![0u8; n];
        let mut p = z;
        for level in (1..=n).rev() {
            let half = self.a[level - 1];
            let found = (0..9).find(|&j| {
                let q = p + omega(j) * self.step(level);
                q.re.abs() <= half && q.im.abs() <= half
            });
            match found {
                Some(j) => {
                    digits[level - 1] = j as u8;
                    p += omega(j) * self.step(level);
                }
                None => return Ok(PointClass::InCorridor(level)),
            }
        }
        Ok(PointClass::InCopy(TranslationIndex { k: 0, n, digits }))
    }
}

fn validate_epsilon(eps: &[f64]) -> Result<(), GeometryError> {
    if let Some((i, &e)) = eps.iter().enumerate().find(|(_, e)| !(**e > 0.0)) {
        return Err(GeometryError::NonPositiveEpsilon { n: i + 1, value: e });
    }
    if eps[0] >= 1.0 {
        return Err(GeometryError::Epsilon1TooLarge(eps[0]));
    }
    for (i, w) in eps.windows(2).enumerate() {
        if !(w[1] <= w[0] && w[1] >= w[0] / 3.0) {
            return Err(GeometryError::RatioViolation { n: i + 1, current: w[0], next: w[1] });
        }
    }
    Ok(())
}

/// Digit path `j_1..j_{n-k}` selecting one of the `9^{n-k}` copies of `S_k` in `S_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationIndex {
    pub k: usize,
    pub n: usize,
    pub digits: Vec<u8>,
}

impl TranslationIndex {
    pub fn new(k: usize, n: usize, digits: Vec<u8>) -> Self {
        assert!(n > k || (n == k && digits.is_empty()));
        assert_eq!(digits.len(), n - k);
        assert!(digits.iter().all(|&d| d < 9));
        TranslationIndex { k, n, digits }
    }

    /// Decompose `j = Σ j_l 9^{l-1}`.
    pub fn from_encoded(k: usize, n: usize, mut j: u64) -> Self {
        let mut digits = Vec::with_capacity(n - k);
        for _ in 0..(n - k) {
            digits.push((j % 9) as u8);
            j /= 9;
        }
        assert_eq!(j, 0, "encoded index out of range for {} levels", n - k);
        TranslationIndex { k, n, digits }
    }

    pub fn encode(&self) -> u64 {
        self.digits.iter().rev().fold(0u64, |acc, &d| acc * 9 + d as u64)
    }
}

/// Result of [`TernaryParams::classify_point`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointClass {
    InCopy(TranslationIndex),
    InCorridor(usize),
    Outside,
}

/// `a_n / 3^n`, which converges exactly when the system is fat.
pub fn normalized_scale(params: &TernaryParams) -> Vec<f64> {
    params
        .a_seq()
        .iter()
        .enumerate()
        .map(|(n, a)| a / 3f64.powi(n as i32))
        .collect()
}

/// Total area of `E_n` from the exact copy rectangles (`9^n` copies of `S_0`).
pub fn e_n_area_exact(params: &TernaryParams, n: usize) -> Option<BigRational> {
    let rects = params.copies_exact(0, n, &BigRational::zero())?;
    Some(rect::union_area(&rects))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
