//! Axis-aligned rectangles and exact area arithmetic for finite unions.
//!
//! Everything here is generic over any ordered field-like scalar, so the same
//! sweep runs on `f64` for sampling work and on `BigRational` when an answer
//! has to be exact.

use num_traits::Num;
use std::cmp::Ordering;

/// Closed rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

fn cmp<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn max_of<T: PartialOrd + Clone>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn min_of<T: PartialOrd + Clone>(a: &T, b: &T) -> T {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

impl<T: Num + PartialOrd + Clone> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> T {
        self.x1.clone() - self.x0.clone()
    }

    pub fn height(&self) -> T {
        self.y1.clone() - self.y0.clone()
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn contains(&self, x: &T, y: &T) -> bool {
        &self.x0 <= x && x <= &self.x1 && &self.y0 <= y && y <= &self.y1
    }

    /// Intersection, or `None` when the overlap has zero area.
    pub fn intersect(&self, other: &Rect<T>) -> Option<Rect<T>> {
        let r = Rect {
            x0: max_of(&self.x0, &other.x0),
            x1: min_of(&self.x1, &other.x1),
            y0: max_of(&self.y0, &other.y0),
            y1: min_of(&self.y1, &other.y1),
        };
        if r.is_degenerate() {
            None
        } else {
            Some(r)
        }
    }

    /// Grow (or shrink, for negative `eta`) by `eta` on every side.
    pub fn offset(&self, eta: &T) -> Rect<T> {
        Rect {
            x0: self.x0.clone() - eta.clone(),
            x1: self.x1.clone() + eta.clone(),
            y0: self.y0.clone() - eta.clone(),
            y1: self.y1.clone() + eta.clone(),
        }
    }

    /// Separation along the axis where the two rectangles do not overlap,
    /// i.e. the width of the corridor between them; zero or negative when
    /// they touch or overlap in both projections.
    pub fn gap(&self, other: &Rect<T>) -> T {
        let gx = max_of(
            &(other.x0.clone() - self.x1.clone()),
            &(self.x0.clone() - other.x1.clone()),
        );
        let gy = max_of(
            &(other.y0.clone() - self.y1.clone()),
            &(self.y0.clone() - other.y1.clone()),
        );
        max_of(&gx, &gy)
    }
}

fn sorted_breaks<T: PartialOrd + Clone>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(cmp);
    v.dedup_by(|a, b| a == b);
    v
}

/// Area of the union of `rects` by a sweep over compressed x-coordinates.
pub fn union_area<T: Num + PartialOrd + Clone>(rects: &[Rect<T>]) -> T {
    let rects: Vec<&Rect<T>> = rects.iter().filter(|r| !r.is_degenerate()).collect();
    let xs = sorted_breaks(
        rects
            .iter()
            .flat_map(|r| [r.x0.clone(), r.x1.clone()])
            .collect(),
    );
    let mut total = T::zero();
    for w in xs.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let mut spans: Vec<(T, T)> = rects
            .iter()
            .filter(|r| &r.x0 <= lo && hi <= &r.x1)
            .map(|r| (r.y0.clone(), r.y1.clone()))
            .collect();
        if spans.is_empty() {
            continue;
        }
        spans.sort_by(|a, b| cmp(&a.0, &b.0));
        let mut covered = T::zero();
        let (mut cur0, mut cur1) = spans[0].clone();
        for (s0, s1) in spans.into_iter().skip(1) {
            if s0 > cur1 {
                covered = covered + (cur1.clone() - cur0.clone());
                cur0 = s0;
                cur1 = s1;
            } else if s1 > cur1 {
                cur1 = s1;
            }
        }
        covered = covered + (cur1 - cur0);
        total = total + (hi.clone() - lo.clone()) * covered;
    }
    total
}

/// Relative area `A(X ∩ S) / A(S)` of a rectangle union `X` inside `S`.
pub fn relative_area<T: Num + PartialOrd + Clone>(region: &[Rect<T>], s: &Rect<T>) -> T {
    let clipped: Vec<Rect<T>> = region.iter().filter_map(|r| r.intersect(s)).collect();
    union_area(&clipped) / s.area()
}

/// `outer` minus the interiors of `holes`, decomposed into closed cells of the
/// grid spanned by all rectangle edges. The cells tile the difference exactly
/// and never straddle a break, so a symmetric input produces symmetric cells.
pub fn difference<T: Num + PartialOrd + Clone>(outer: &Rect<T>, holes: &[Rect<T>]) -> Vec<Rect<T>> {
    let clipped: Vec<Rect<T>> = holes.iter().filter_map(|h| h.intersect(outer)).collect();
    let xs = sorted_breaks(
        std::iter::once(outer.x0.clone())
            .chain(std::iter::once(outer.x1.clone()))
            .chain(clipped.iter().flat_map(|r| [r.x0.clone(), r.x1.clone()]))
            .collect(),
    );
    let ys = sorted_breaks(
        std::iter::once(outer.y0.clone())
            .chain(std::iter::once(outer.y1.clone()))
            .chain(clipped.iter().flat_map(|r| [r.y0.clone(), r.y1.clone()]))
            .collect(),
    );
    let two = T::one() + T::one();
    let mut cells = Vec::new();
    for wy in ys.windows(2) {
        for wx in xs.windows(2) {
            let mx = (wx[0].clone() + wx[1].clone()) / two.clone();
            let my = (wy[0].clone() + wy[1].clone()) / two.clone();
            if !clipped.iter().any(|h| h.contains(&mx, &my)) {
                cells.push(Rect::new(
                    wx[0].clone(),
                    wx[1].clone(),
                    wy[0].clone(),
                    wy[1].clone(),
                ));
            }
        }
    }
    cells
}

/// Membership in a union of closed rectangles.
pub fn region_contains(region: &[Rect<f64>], x: f64, y: f64) -> bool {
    region.iter().any(|r| r.contains(&x, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(x0: i64, x1: i64, y0: i64, y1: i64) -> Rect<BigRational> {
        let q = |v: i64| BigRational::from_integer(v.into());
        Rect::new(q(x0), q(x1), q(y0), q(y1))
    }

    #[test]
    fn union_of_overlapping_squares() {
        // two 2x2 squares overlapping in a 1x1 cell
        let area = union_area(&[r(0, 2, 0, 2), r(1, 3, 1, 3)]);
        assert_eq!(area, BigRational::from_integer(7.into()));
    }

    #[test]
    fn nested_and_disjoint() {
        let area = union_area(&[r(0, 4, 0, 4), r(1, 2, 1, 2), r(10, 11, 0, 1)]);
        assert_eq!(area, BigRational::from_integer(17.into()));
    }

    #[test]
    fn relative_area_of_self_and_disjoint() {
        let s = r(-1, 1, -1, 1);
        assert_eq!(relative_area(std::slice::from_ref(&s), &s), BigRational::from_integer(1.into()));
        assert_eq!(relative_area(&[r(5, 6, 5, 6)], &s), BigRational::from_integer(0.into()));
    }

    #[test]
    fn difference_tiles_exactly() {
        let outer = r(0, 10, 0, 10);
        let holes = [r(1, 3, 1, 3), r(2, 5, 2, 4), r(8, 12, -1, 2)];
        let cells = difference(&outer, &holes);
        let hole_area = union_area(&holes.iter().filter_map(|h| h.intersect(&outer)).collect::<Vec<_>>());
        assert_eq!(union_area(&cells) + hole_area, outer.area());
    }

    #[test]
    fn gap_between_neighbours() {
        assert_eq!(r(0, 1, 0, 1).gap(&r(3, 4, 0, 1)), BigRational::from_integer(2.into()));
    }
}
