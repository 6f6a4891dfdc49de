//! delta-flatness: sup |phi(v) - phi(u) - grad phi(u).(v - u)| over a region.

use serde::{Deserialize, Serialize};

use super::{AffineMap, Parallelogram, Vec2};
use crate::interval::{poly_range, Interval};
use crate::polyalg::univariate::f64_to_rat;
use crate::polyalg::{BivariatePoly, FloatPoly};

/// A polynomial phase prepared for repeated float evaluation.
#[derive(Clone, Debug)]
pub struct Phase {
    pub poly: BivariatePoly,
    pub f: FloatPoly,
    pub fxx: FloatPoly,
    pub fxy: FloatPoly,
    pub fyy: FloatPoly,
}

impl Phase {
    pub fn new(p: &BivariatePoly) -> Self {
        Phase {
            poly: p.clone(),
            f: FloatPoly::new(p),
            fxx: FloatPoly::new(&p.dx().dx()),
            fxy: FloatPoly::new(&p.dx().dy()),
            fyy: FloatPoly::new(&p.dy().dy()),
        }
    }

    /// phi o T for an affine map with float entries, composed exactly.
    pub fn pullback(&self, t: &AffineMap) -> Phase {
        let r = |v: f64| f64_to_rat(v);
        let lin = |a: f64, b: f64, c: f64| {
            BivariatePoly::from_terms([(1u32, 0u32, r(a)), (0, 1, r(b)), (0, 0, r(c))])
        };
        let m = &t.linear;
        let px = lin(m[0][0], m[0][1], t.shift[0]);
        let py = lin(m[1][0], m[1][1], t.shift[1]);
        Phase::new(&self.poly.compose(&px, &py))
    }

    /// Rigorous bound on |second partials| over an axis box.
    pub fn hessian_bounds(&self, x: Interval, y: Interval) -> (f64, f64, f64) {
        (
            poly_range(self.fxx.terms(), x, y).mag(),
            poly_range(self.fxy.terms(), x, y).mag(),
            poly_range(self.fyy.terms(), x, y).mag(),
        )
    }
}

impl From<&BivariatePoly> for Phase {
    fn from(p: &BivariatePoly) -> Self {
        Phase::new(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub sup_deviation: f64,
    pub ratio: f64,
    pub argmax_pair: [Vec2; 2],
    pub samples: usize,
    pub second_order_bound: f64,
}

/// Sampled flatness on a grid_n x grid_n affine grid (corners included),
/// together with the Taylor remainder majorant
/// 1/2 (max(S_xx, S_yy) + S_xy) diam^2 from interval bounds on the bounding
/// box.
pub fn flatness(phi: &Phase, region: &Parallelogram, delta: f64, grid_n: usize) -> FlatnessReport {
    assert!(grid_n >= 3, "grid_n must be at least 3");
    let n = grid_n;
    let mut pts = Vec::with_capacity(n * n);
    let mut jets = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = region.point(i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            pts.push(p);
            jets.push(phi.f.jet(p[0], p[1]));
        }
    }
    let mut sup = 0.0f64;
    let mut arg = [pts[0], pts[0]];
    for (iu, u) in pts.iter().enumerate() {
        let ju = &jets[iu];
        for (iv, v) in pts.iter().enumerate() {
            let d = (jets[iv].v - ju.v - ju.gx * (v[0] - u[0]) - ju.gy * (v[1] - u[1])).abs();
            if d > sup {
                sup = d;
                arg = [*u, *v];
            }
        }
    }
    let bb = region.bbox();
    let (sxx, sxy, syy) = phi.hessian_bounds(Interval::new(bb.x0, bb.x1), Interval::new(bb.y0, bb.y1));
    let diam = region.diameter();
    let bound = 0.5 * (sxx.max(syy) + sxy) * diam * diam * (1.0 + 1e-12);
    FlatnessReport { sup_deviation: sup, ratio: sup / delta, argmax_pair: arg, samples: n * n * n * n, second_order_bound: bound }
}

/// Flatness of (phi, Q) and of (phi o T^-1, T(Q)) on corresponding grids.
pub fn flatness_affine_invariance(
    phi: &BivariatePoly,
    region: &Parallelogram,
    t: &AffineMap,
    delta: f64,
    grid_n: usize,
) -> (FlatnessReport, FlatnessReport) {
    let phase = Phase::new(phi);
    let a = flatness(&phase, region, delta, grid_n);
    let tinv = t.inverse().expect("invertible map");
    let b = flatness(&phase.pullback(&tinv), &region.map(t), delta, grid_n);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::polyalg::parse_poly;

    #[test]
    fn paraboloid_square() {
        let phi = Phase::new(&parse_poly("x^2+y^2").unwrap());
        let delta = 2f64.powi(-8);
        let h = delta.sqrt();
        let sq = Rect::new(0.3, 0.3 + h, -0.1, -0.1 + h).to_parallelogram();
        let r = flatness(&phi, &sq, delta, 5);
        assert!((r.ratio - 2.0).abs() < 1e-9);
        assert!(r.sup_deviation <= r.second_order_bound);
    }

    #[test]
    fn point_region_is_flat() {
        let phi = Phase::new(&parse_poly("x^3*y - 5*y^2").unwrap());
        let p = Parallelogram { origin: [0.4, 0.2], edge1: [0.0, 0.0], edge2: [0.0, 0.0] };
        assert_eq!(flatness(&phi, &p, 1e-3, 3).sup_deviation, 0.0);
    }

    #[test]
    fn invariance_examples() {
        let sq = Rect::new(0.0, 1.0, 0.0, 1.0).to_parallelogram();
        let (a, b) = flatness_affine_invariance(&parse_poly("x^2+y^2").unwrap(), &sq, &AffineMap::identity(), 0.1, 5);
        assert_eq!(a.sup_deviation, b.sup_deviation);
        let rot = AffineMap::rotation(std::f64::consts::FRAC_PI_4);
        let (a, b) = flatness_affine_invariance(&parse_poly("x^2+y^2").unwrap(), &sq, &rot, 0.1, 5);
        assert!((a.sup_deviation - b.sup_deviation).abs() <= 1e-12 * a.sup_deviation);
        let (a, b) = flatness_affine_invariance(&parse_poly("x^3").unwrap(), &sq, &AffineMap::shear_x(3.0), 0.1, 5);
        assert!((a.sup_deviation - b.sup_deviation).abs() <= 1e-12 * a.sup_deviation);
    }
}
