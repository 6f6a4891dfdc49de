//! Curved bands around x^s = lambda y^r and their parallelogram covers.

use serde::{Deserialize, Serialize};

use super::{Parallelogram, Vec2};

/// The graph y = gamma(x) = lambda^(-1/r) x^(s/r), x > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub lambda: f64,
    pub r: u32,
    pub s: u32,
}

impl Curve {
    pub fn new(lambda: f64, r: u32, s: u32) -> Self {
        assert!(lambda > 0.0 && r > 0 && s > 0);
        Curve { lambda, r, s }
    }

    fn e(&self) -> f64 {
        self.s as f64 / self.r as f64
    }

    fn k(&self) -> f64 {
        self.lambda.powf(-1.0 / self.r as f64)
    }

    pub fn gamma(&self, x: f64) -> f64 {
        self.k() * x.powf(self.e())
    }

    pub fn d_gamma(&self, x: f64) -> f64 {
        let e = self.e();
        self.k() * e * x.powf(e - 1.0)
    }

    pub fn d2_gamma(&self, x: f64) -> f64 {
        let e = self.e();
        self.k() * e * (e - 1.0) * x.powf(e - 2.0)
    }

    /// x with gamma(x) = y.
    pub fn inverse(&self, y: f64) -> f64 {
        (y / self.k()).powf(1.0 / self.e())
    }

    /// sup of |gamma''| over [a, b]; gamma'' is monotone on x > 0.
    pub fn sup_d2(&self, a: f64, b: f64) -> f64 {
        self.d2_gamma(a).abs().max(self.d2_gamma(b).abs())
    }

    /// The same curve with the roles of x and y exchanged, so that the
    /// exponent s/r is at least one and gamma is convex.
    pub fn convex_orientation(&self) -> (Curve, bool) {
        if self.s >= self.r {
            (*self, false)
        } else {
            (Curve::new(1.0 / self.lambda, self.s, self.r), true)
        }
    }

    /// C_rs = sup gamma'' + 1 over [1, 2].
    pub fn c_rs(&self) -> f64 {
        self.sup_d2(1.0, 2.0) + 1.0
    }
}

/// R(I, J) = {(x, y) : x in I, y - gamma(x) in J}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvedBand {
    pub interval_i: [f64; 2],
    pub interval_j: [f64; 2],
    pub curve: Curve,
}

impl CurvedBand {
    pub fn contains(&self, p: Vec2) -> bool {
        let t = p[1] - self.curve.gamma(p[0]);
        self.interval_i[0] <= p[0]
            && p[0] <= self.interval_i[1]
            && self.interval_j[0] <= t
            && t <= self.interval_j[1]
    }
}

/// R~ = {(x0, gamma(x0) + C sigma) + u (0,1) + v (1, gamma'(x0))},
/// 0 <= u <= C sigma, 0 <= v <= sigma^(1/2). The first edge is the vertical
/// one.
pub fn band_to_parallelogram(x0: f64, sigma: f64, curve: &Curve, c_rs: f64) -> Parallelogram {
    let h = sigma.sqrt();
    Parallelogram {
        origin: [x0, curve.gamma(x0) + c_rs * sigma],
        edge1: [0.0, c_rs * sigma],
        edge2: [h, curve.d_gamma(x0) * h],
    }
}

/// A parallelogram with a vertical edge and an edge along the tangent at x0
/// that contains {x in [x0, x0 + h], y - gamma(x) in [t_lo, t_hi]}, given
/// that 0 <= gamma'' <= g_sup on [x0, x0 + h].
pub fn curved_cell_cover(curve: &Curve, x0: f64, h: f64, t_lo: f64, t_hi: f64, g_sup: f64) -> Parallelogram {
    Parallelogram {
        origin: [x0, curve.gamma(x0) + t_lo],
        edge1: [0.0, t_hi - t_lo + 0.5 * g_sup * h * h],
        edge2: [h, curve.d_gamma(x0) * h],
    }
}

/// Samples the containment sandwich
/// R([x0, x0+h], [C s, (C+1) s]) in R~ in R([x0, x0+h], [s, 2 C s]).
pub fn check_band_sandwich(x0: f64, sigma: f64, curve: &Curve, c_rs: f64, n: usize) -> Result<(), String> {
    let p = band_to_parallelogram(x0, sigma, curve, c_rs);
    let h = sigma.sqrt();
    let m = (n as f64).sqrt().ceil() as usize;
    let tol = 1e-9;
    for i in 0..m {
        for j in 0..m {
            let a = i as f64 / (m - 1) as f64;
            let b = j as f64 / (m - 1) as f64;
            let x = x0 + a * h;
            let inner = [x, curve.gamma(x) + (c_rs + b) * sigma];
            if !p.contains_tol(inner, tol) {
                return Err(format!("inner band point {inner:?} outside R~"));
            }
            let q = p.point(b, a);
            let t = q[1] - curve.gamma(q[0]);
            if t < sigma * (1.0 - tol) || t > 2.0 * c_rs * sigma * (1.0 + tol) {
                return Err(format!("R~ point {q:?} has offset {t:e} outside [sigma, 2 C sigma]"));
            }
        }
    }
    Ok(())
}
