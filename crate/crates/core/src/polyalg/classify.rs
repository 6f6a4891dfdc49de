//! Case distinctions for degenerate components of the Hessian zero set.

use num_rational::BigRational;
use num_traits::Zero;

use super::factor::{curve_order, curve_polynomial, divisibility_order};
use super::homogeneity::{hessian_determinant, MixedHomogeneity};
use super::poly::BivariatePoly;
use super::univariate::{rat_to_f64, RealRoot};
use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
pub enum AxisCase {
    /// y^k divides phi with k >= 2; `cofactor` = phi / y^k.
    A1 { k: u32, cofactor: BivariatePoly },
    /// phi = C x^m + y P(x, y) with C != 0.
    A2 { c: BigRational, m: u32, p_part: BivariatePoly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveCase {
    B1 { k: u32 },
    B2,
}

/// Classifies phi near the positive x-axis. For the y-axis, call it on the
/// swapped polynomial.
pub fn classify_axis_case(phi: &BivariatePoly, _mh: &MixedHomogeneity) -> Result<AxisCase, AlgebraError> {
    let k = phi.min_y_exponent();
    if k >= 2 {
        return Ok(AxisCase::A1 { k, cofactor: phi.shift_down(0, k) });
    }
    let pure: Vec<_> = phi.terms().iter().filter(|((_, b), _)| *b == 0).collect();
    match pure.as_slice() {
        [(&(m, 0), c)] => {
            let rest = phi - &BivariatePoly::monomial((*c).clone(), m, 0);
            Ok(AxisCase::A2 { c: (*c).clone(), m, p_part: rest.shift_down(0, 1) })
        }
        [] => Err(AlgebraError::StructuralContradiction(
            "phi = y P with y^2 not dividing phi, but no pure x-power term".into(),
        )),
        _ => Err(AlgebraError::StructuralContradiction(
            "several pure x-power terms in a weighted homogeneous polynomial".into(),
        )),
    }
}

pub fn classify_curve_case(
    phi: &BivariatePoly,
    mh: &MixedHomogeneity,
    lambda: &RealRoot,
) -> Result<CurveCase, AlgebraError> {
    let k = curve_order(phi, lambda, mh.r, mh.s)?;
    Ok(if k >= 2 { CurveCase::B1 { k } } else { CurveCase::B2 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveOrderCheck {
    pub order: u32,
    pub expected: u32,
    pub cofactor: BivariatePoly,
    /// Smallest |Q| over the curve samples relative to the size of its terms.
    pub min_relative_cofactor: f64,
    pub holds: bool,
}

/// For phi = (x^s - lambda y^r)^k P, the determinant should contain the
/// curve factor exactly 2k - 3 times, with a cofactor that does not vanish
/// on the curve.
pub fn check_prop_curve_order(
    k: u32,
    r: u32,
    s: u32,
    lambda: &BigRational,
    p_part: &BivariatePoly,
    samples: usize,
) -> Result<CurveOrderCheck, AlgebraError> {
    if k < 2 || r == s || lambda <= &BigRational::zero() {
        return Err(AlgebraError::Precondition("need k >= 2, s != r, lambda > 0".into()));
    }
    let curve = curve_polynomial(lambda, r, s);
    let phi = &curve.pow(k) * p_part;
    let det = hessian_determinant(&phi);
    let order = divisibility_order(&det, &curve);
    let mut q = det;
    for _ in 0..order {
        q = q.div_exact(&curve).expect("division counted above");
    }
    let fq = super::fpoly::FloatPoly::new(&q);
    let l = rat_to_f64(lambda);
    let t_hi = 2f64.powf(1.0 / r as f64);
    let mut min_rel = f64::INFINITY;
    for i in 0..samples {
        let t = 1.0 + (t_hi - 1.0) * i as f64 / (samples.max(2) - 1) as f64;
        // on x^s = lambda y^r: x = t^r, y = lambda^(-1/r) t^s
        let x = t.powi(r as i32);
        let y = l.powf(-1.0 / r as f64) * t.powi(s as i32);
        let scale = fq.abs_eval(x, y);
        let rel = if scale > 0.0 { fq.eval(x, y).abs() / scale } else { 0.0 };
        min_rel = min_rel.min(rel);
    }
    let expected = 2 * k - 3;
    let holds = order == expected && min_rel > 1e-9 && !q.is_zero();
    Ok(CurveOrderCheck { order, expected, cofactor: q, min_relative_cofactor: min_rel, holds })
}

/// The polynomial S with det D^2 phi = y^j S, j the y-order of the
/// determinant.
pub fn axis_cofactor(det: &BivariatePoly) -> (u32, BivariatePoly) {
    let j = det.min_y_exponent();
    (j, det.shift_down(0, j))
}
