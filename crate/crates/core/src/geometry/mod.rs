//! Planar regions, affine maps and the verification primitives.

pub mod band;
pub mod coverage;
pub mod flatness;
pub mod svg;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

pub use band::{band_to_parallelogram, curved_cell_cover, Curve, CurvedBand};
pub use coverage::{coverage_and_overlap, CoverageReport, PieceIndex};
pub use flatness::{flatness, flatness_affine_invariance, FlatnessReport, Phase};

pub type Vec2 = [f64; 2];

pub const AREA_FLOOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: [[f64; 2]; 2],
    pub shift: Vec2,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { linear: [[1.0, 0.0], [0.0, 1.0]], shift: [0.0, 0.0] }
    }

    pub fn new(linear: [[f64; 2]; 2], shift: Vec2) -> Self {
        AffineMap { linear, shift }
    }

    pub fn diagonal(a: f64, b: f64) -> Self {
        AffineMap { linear: [[a, 0.0], [0.0, b]], shift: [0.0, 0.0] }
    }

    pub fn translation(t: Vec2) -> Self {
        AffineMap { linear: [[1.0, 0.0], [0.0, 1.0]], shift: t }
    }

    /// (x, y) -> (x + k y, y)
    pub fn shear_x(k: f64) -> Self {
        AffineMap { linear: [[1.0, k], [0.0, 1.0]], shift: [0.0, 0.0] }
    }

    /// (x, y) -> (x, y + k x)
    pub fn shear_y(k: f64) -> Self {
        AffineMap { linear: [[1.0, 0.0], [k, 1.0]], shift: [0.0, 0.0] }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        AffineMap { linear: [[c, -s], [s, c]], shift: [0.0, 0.0] }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        let m = &self.linear;
        [m[0][0] * p[0] + m[0][1] * p[1] + self.shift[0], m[1][0] * p[0] + m[1][1] * p[1] + self.shift[1]]
    }

    pub fn apply_linear(&self, v: Vec2) -> Vec2 {
        let m = &self.linear;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn det(&self) -> f64 {
        let m = &self.linear;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// self after other: p -> self(other(p)).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let a = &self.linear;
        let b = &other.linear;
        let mut l = [[0.0; 2]; 2];
        for (i, row) in l.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        AffineMap { linear: l, shift: self.apply(other.shift) }
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.linear;
        let inv = [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]];
        let s = self.shift;
        let shift = [-(inv[0][0] * s[0] + inv[0][1] * s[1]), -(inv[1][0] * s[0] + inv[1][1] * s[1])];
        Some(AffineMap { linear: inv, shift })
    }

    /// 2-norm condition number of the linear part.
    pub fn condition(&self) -> f64 {
        let m = &self.linear;
        let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
        let d = self.det().abs();
        let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
        let smax = ((fro2 + disc) / 2.0).sqrt();
        let smin = ((fro2 - disc) / 2.0).max(0.0).sqrt();
        smax / smin
    }
}

/// Axis-parallel rectangle [x0, x1] x [y0, y1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(h: f64) -> Self {
        Rect::new(-h, h, -h, h)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.x0 <= p[0] && p[0] <= self.x1 && self.y0 <= p[1] && p[1] <= self.y1
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        self.x0 <= o.x0 && o.x1 <= self.x1 && self.y0 <= o.y0 && o.y1 <= self.y1
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn to_parallelogram(&self) -> Parallelogram {
        Parallelogram { origin: [self.x0, self.y0], edge1: [self.width(), 0.0], edge2: [0.0, self.height()] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub origin: Vec2,
    pub edge1: Vec2,
    pub edge2: Vec2,
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

impl Parallelogram {
    pub fn new(origin: Vec2, edge1: Vec2, edge2: Vec2) -> Result<Self, GeometryError> {
        let p = Parallelogram { origin, edge1, edge2 };
        if p.area() <= AREA_FLOOR {
            return Err(GeometryError::Degenerate(p.area()));
        }
        Ok(p)
    }

    pub fn area(&self) -> f64 {
        cross(self.edge1, self.edge2).abs()
    }

    pub fn point(&self, u: f64, v: f64) -> Vec2 {
        [
            self.origin[0] + u * self.edge1[0] + v * self.edge2[0],
            self.origin[1] + u * self.edge1[1] + v * self.edge2[1],
        ]
    }

    pub fn center(&self) -> Vec2 {
        self.point(0.5, 0.5)
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [self.point(0.0, 0.0), self.point(1.0, 0.0), self.point(1.0, 1.0), self.point(0.0, 1.0)]
    }

    /// Local coordinates (u, v) of p.
    pub fn local(&self, p: Vec2) -> Vec2 {
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        let det = cross(self.edge1, self.edge2);
        [cross(d, self.edge2) / det, cross(self.edge1, d) / det]
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.contains_tol(p, 1e-12)
    }

    pub fn contains_tol(&self, p: Vec2, tol: f64) -> bool {
        let [u, v] = self.local(p);
        (-tol..=1.0 + tol).contains(&u) && (-tol..=1.0 + tol).contains(&v)
    }

    pub fn bbox(&self) -> Rect {
        let c = self.corners();
        let mut r = Rect::new(c[0][0], c[0][0], c[0][1], c[0][1]);
        for p in &c[1..] {
            r.x0 = r.x0.min(p[0]);
            r.x1 = r.x1.max(p[0]);
            r.y0 = r.y0.min(p[1]);
            r.y1 = r.y1.max(p[1]);
        }
        r
    }

    pub fn diameter(&self) -> f64 {
        let a = [self.edge1[0] + self.edge2[0], self.edge1[1] + self.edge2[1]];
        let b = [self.edge1[0] - self.edge2[0], self.edge1[1] - self.edge2[1]];
        norm(a).max(norm(b))
    }

    pub fn map(&self, t: &AffineMap) -> Parallelogram {
        Parallelogram {
            origin: t.apply(self.origin),
            edge1: t.apply_linear(self.edge1),
            edge2: t.apply_linear(self.edge2),
        }
    }

    /// The affine map sending the unit square onto this parallelogram.
    pub fn frame(&self) -> AffineMap {
        AffineMap {
            linear: [[self.edge1[0], self.edge2[0]], [self.edge1[1], self.edge2[1]]],
            shift: self.origin,
        }
    }

    pub fn from_frame(t: &AffineMap) -> Parallelogram {
        Rect::new(0.0, 1.0, 0.0, 1.0).to_parallelogram().map(t)
    }

    /// Separating-axis test against an axis-parallel rectangle.
    pub fn intersects_rect(&self, r: &Rect) -> bool {
        if !self.bbox().intersects(r) {
            return false;
        }
        let rc = [[r.x0, r.y0], [r.x1, r.y0], [r.x1, r.y1], [r.x0, r.y1]];
        let pc = self.corners();
        for axis in [[-self.edge1[1], self.edge1[0]], [-self.edge2[1], self.edge2[0]]] {
            let proj = |p: &Vec2| p[0] * axis[0] + p[1] * axis[1];
            let (a0, a1) = pc.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            let (b0, b1) = rc.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            if a1 < b0 || b1 < a0 {
                return false;
            }
        }
        true
    }

    /// True if the edges are orthogonal within `tol` radians.
    pub fn is_rectangle(&self, tol: f64) -> bool {
        let c = (self.edge1[0] * self.edge2[0] + self.edge1[1] * self.edge2[1]) / (norm(self.edge1) * norm(self.edge2));
        c.abs() <= tol.sin()
    }
}

/// The smallest rectangle with a side parallel to edge1 that contains p.
/// Returns the rectangle and its area relative to p.
pub fn enclosing_rectangle(p: &Parallelogram) -> Result<(Parallelogram, f64), GeometryError> {
    let area = p.area();
    if area <= AREA_FLOOR {
        return Err(GeometryError::Degenerate(area));
    }
    let e1 = p.edge1;
    let angle = e1[1].atan2(e1[0]).rem_euclid(std::f64::consts::FRAC_PI_2);
    let off_axis = angle.min(std::f64::consts::FRAC_PI_2 - angle);
    if off_axis > std::f64::consts::FRAC_PI_3 {
        return Err(GeometryError::SlopeTooLarge(off_axis));
    }
    let l1 = norm(e1);
    let t = [e1[0] / l1, e1[1] / l1];
    let n = [-t[1], t[0]];
    let dot = |a: Vec2, b: Vec2| a[0] * b[0] + a[1] * b[1];
    // extents of the corners along t and n, relative to the origin
    let offs = [[0.0, 0.0], p.edge1, p.edge2, [p.edge1[0] + p.edge2[0], p.edge1[1] + p.edge2[1]]];
    let (mut t0, mut t1, mut n0, mut n1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for o in offs {
        t0 = t0.min(dot(o, t));
        t1 = t1.max(dot(o, t));
        n0 = n0.min(dot(o, n));
        n1 = n1.max(dot(o, n));
    }
    let origin = [p.origin[0] + t0 * t[0] + n0 * n[0], p.origin[1] + t0 * t[1] + n0 * n[1]];
    let rect = Parallelogram {
        origin,
        edge1: [(t1 - t0) * t[0], (t1 - t0) * t[1]],
        edge2: [(n1 - n0) * n[0], (n1 - n0) * n[1]],
    };
    let inflation = rect.area() / area;
    Ok((rect, inflation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_inverse_round_trip() {
        let t = AffineMap::new([[2.0, 0.5], [-1.0, 3.0]], [0.3, -2.0]);
        let ti = t.inverse().unwrap();
        for p in [[0.0, 0.0], [1.5, -2.0], [-2.0, 2.0]] {
            let q = ti.apply(t.apply(p));
            assert!((q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12);
        }
        let c = t.compose(&ti);
        assert!((c.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn membership_and_local_coordinates() {
        let p = Parallelogram::new([1.0, 1.0], [2.0, 0.0], [1.0, 1.0]).unwrap();
        assert!(p.contains([2.5, 1.5]));
        assert!(!p.contains([1.2, 1.9]));
        let [u, v] = p.local(p.point(0.25, 0.75));
        assert!((u - 0.25).abs() < 1e-14 && (v - 0.75).abs() < 1e-14);
        assert!(Parallelogram::new([0.0, 0.0], [1.0, 1.0], [2.0, 2.0]).is_err());
    }

    #[test]
    fn enclosing_rectangle_examples() {
        let sq = Rect::new(0.0, 1.0, 0.0, 1.0).to_parallelogram();
        let (r, infl) = enclosing_rectangle(&sq).unwrap();
        assert_eq!(r, sq);
        assert_eq!(infl, 1.0);
        // unit square sheared by (x, y) -> (x + 0.1 y, y), long side along x
        let sh = sq.map(&AffineMap::shear_x(0.1));
        let (r, infl) = enclosing_rectangle(&sh).unwrap();
        assert!((r.edge1[0] - 1.1).abs() < 1e-12 && (r.edge2[1] - 1.0).abs() < 1e-12);
        assert!((infl - 1.1).abs() < 1e-12);
        for c in sh.corners() {
            assert!(r.contains(c));
        }
        let flat = Parallelogram { origin: [0.0, 0.0], edge1: [1.0, 0.0], edge2: [2.0, 0.0] };
        assert!(enclosing_rectangle(&flat).is_err());
    }

    #[test]
    fn rect_intersection() {
        let p = Parallelogram::new([0.0, 0.0], [1.0, 1.0], [-1.0, 1.0]).unwrap();
        assert!(p.intersects_rect(&Rect::new(-0.2, 0.2, 0.5, 0.6)));
        assert!(!p.intersects_rect(&Rect::new(0.8, 1.0, 0.0, 0.1)));
    }
}
