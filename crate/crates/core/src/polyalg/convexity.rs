//! Conservative convexity certificate on [-1, 1]^2.

use serde::{Deserialize, Serialize};

use super::fpoly::FloatPoly;
use super::homogeneity::hessian_determinant;
use super::poly::BivariatePoly;
use crate::interval::{poly_range, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityTag {
    Convex,
    NotCertified,
}

fn nonneg_on_grid(p: &FloatPoly, n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let y = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            if p.eval(x, y) < -1e-12 * p.abs_eval(x, y) {
                return false;
            }
        }
    }
    true
}

fn nonneg_on_cells(p: &FloatPoly, n: usize) -> bool {
    let h = 2.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let x = Interval::new(-1.0 + h * i as f64, -1.0 + h * (i + 1) as f64);
            let y = Interval::new(-1.0 + h * j as f64, -1.0 + h * (j + 1) as f64);
            if poly_range(p.terms(), x, y).lo < 0.0 {
                return false;
            }
        }
    }
    true
}

/// `Convex` only when phi_xx, phi_yy and the Hessian determinant are
/// nonnegative on a 201x201 grid and on every cell of a 32x32 interval cover.
pub fn convexity_tag(phi: &BivariatePoly) -> ConvexityTag {
    let fxx = FloatPoly::new(&phi.dx().dx());
    let fyy = FloatPoly::new(&phi.dy().dy());
    let det = FloatPoly::new(&hessian_determinant(phi));
    let ok = [&fxx, &fyy, &det].iter().all(|p| nonneg_on_grid(p, 201))
        && [&fxx, &fyy, &det].iter().all(|p| nonneg_on_cells(p, 32));
    if ok {
        ConvexityTag::Convex
    } else {
        ConvexityTag::NotCertified
    }
}
