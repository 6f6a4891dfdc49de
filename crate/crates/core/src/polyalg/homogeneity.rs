//! Weighted homogeneity phi(t^r x, t^s y) = t^q phi(x, y) and the Hessian
//! determinant.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::poly::BivariatePoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedHomogeneity {
    pub q: u32,
    pub r: u32,
    pub s: u32,
}

impl MixedHomogeneity {
    pub fn new(q: u32, r: u32, s: u32) -> Self {
        assert!(q > 0 && r > 0 && s > 0 && r.gcd(&s) == 1, "invalid weights ({q},{r},{s})");
        MixedHomogeneity { q, r, s }
    }

    pub fn weight(&self, a: u32, b: u32) -> u64 {
        self.r as u64 * a as u64 + self.s as u64 * b as u64
    }

    /// Weights after exchanging the roles of x and y.
    pub fn swapped(&self) -> Self {
        MixedHomogeneity { q: self.q, r: self.s, s: self.r }
    }

    pub fn holds_for(&self, p: &BivariatePoly) -> bool {
        p.terms().keys().all(|&(a, b)| self.weight(a, b) == self.q as u64)
    }

    /// Weight of the Hessian determinant, 2(q - r - s), if nonnegative.
    pub fn determinant_weight(&self) -> Option<u64> {
        let w = 2 * (self.q as i64 - self.r as i64 - self.s as i64);
        (w >= 0).then_some(w as u64)
    }
}

pub fn hessian_determinant(phi: &BivariatePoly) -> BivariatePoly {
    let fx = phi.dx();
    let fy = phi.dy();
    let fxx = fx.dx();
    let fyy = fy.dy();
    let fxy = fx.dy();
    &(&fxx * &fyy) - &(&fxy * &fxy)
}

pub fn detect_mixed_homogeneity(phi: &BivariatePoly) -> Option<MixedHomogeneity> {
    let mons: Vec<(u32, u32)> = phi.terms().keys().copied().collect();
    let &(a0, b0) = mons.first()?;
    if mons.len() == 1 {
        if a0 == 0 && b0 == 0 {
            return None;
        }
        // r = s = 1 minimizes q, and then r + s and r, for any single monomial
        return Some(MixedHomogeneity::new(a0 + b0, 1, 1));
    }
    let mut dir: Option<(i64, i64)> = None;
    for &(a, b) in &mons[1..] {
        let da = a as i64 - a0 as i64;
        let db = b as i64 - b0 as i64;
        if da == 0 && db == 0 {
            continue;
        }
        if da * db >= 0 {
            return None;
        }
        dir = Some((db.abs(), da.abs()));
        break;
    }
    let (r, s) = dir?;
    let g = r.gcd(&s);
    let (r, s) = ((r / g) as u32, (s / g) as u32);
    let q = r * a0 + s * b0;
    let mh = MixedHomogeneity::new(q, r, s);
    mh.holds_for(phi).then_some(mh)
}

pub fn verify_determinant_weight(phi: &BivariatePoly, mh: &MixedHomogeneity) -> bool {
    let k = hessian_determinant(phi);
    match mh.determinant_weight() {
        Some(w) => k.terms().keys().all(|&(a, b)| mh.weight(a, b) == w),
        None => k.is_zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn weights_of_examples() {
        let p = parse_poly("x^4+6*x^2*y+6*y^2").unwrap();
        assert_eq!(detect_mixed_homogeneity(&p), Some(MixedHomogeneity::new(4, 1, 2)));
        assert_eq!(detect_mixed_homogeneity(&parse_poly("x^2+x*y+y^3").unwrap()), None);
        assert_eq!(detect_mixed_homogeneity(&parse_poly("x^2").unwrap()), Some(MixedHomogeneity::new(2, 1, 1)));
        assert_eq!(detect_mixed_homogeneity(&parse_poly("x^2*y^3").unwrap()), Some(MixedHomogeneity::new(5, 1, 1)));
        assert_eq!(detect_mixed_homogeneity(&parse_poly("x^2+y^2+x").unwrap()), None);
        assert_eq!(detect_mixed_homogeneity(&parse_poly("x*y").unwrap()), Some(MixedHomogeneity::new(2, 1, 1)));
        assert_eq!(detect_mixed_homogeneity(&parse_poly("7").unwrap()), None);
    }

    #[test]
    fn determinant_examples() {
        let p = parse_poly("x^4+6*x^2*y+6*y^2").unwrap();
        assert_eq!(hessian_determinant(&p), parse_poly("144*y").unwrap());
        assert_eq!(hessian_determinant(&parse_poly("x^2+y^2").unwrap()), parse_poly("4").unwrap());
        assert!(verify_determinant_weight(&p, &MixedHomogeneity::new(4, 1, 2)));
    }
}
