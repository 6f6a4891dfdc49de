//! Float evaluation of a polynomial together with its first and second
//! derivatives.

use super::poly::BivariatePoly;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub gx: f64,
    pub gy: f64,
    pub hxx: f64,
    pub hxy: f64,
    pub hyy: f64,
}

impl Jet {
    pub fn det(&self) -> f64 {
        self.hxx * self.hyy - self.hxy * self.hxy
    }
}

#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(u32, u32, f64)>,
    max_a: usize,
    max_b: usize,
}

impl FloatPoly {
    pub fn new(p: &BivariatePoly) -> Self {
        let terms = p.to_f64_terms();
        let max_a = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let max_b = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        FloatPoly { terms, max_a, max_b }
    }

    pub fn from_terms(terms: Vec<(u32, u32, f64)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|t| t.2 != 0.0).collect();
        let max_a = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let max_b = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        FloatPoly { terms, max_a, max_b }
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut px = [1.0f64; 33];
        let mut py = [1.0f64; 33];
        if self.max_a < 33 && self.max_b < 33 {
            fill_powers(&mut px, x, self.max_a);
            fill_powers(&mut py, y, self.max_b);
            self.terms.iter().map(|&(a, b, c)| c * px[a as usize] * py[b as usize]).sum()
        } else {
            self.terms.iter().map(|&(a, b, c)| c * x.powi(a as i32) * y.powi(b as i32)).sum()
        }
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet {
        let n = self.max_a.max(self.max_b) + 1;
        let mut px = vec![1.0f64; n];
        let mut py = vec![1.0f64; n];
        fill_powers(&mut px, x, self.max_a);
        fill_powers(&mut py, y, self.max_b);
        let mut j = Jet::default();
        for &(a, b, c) in &self.terms {
            let (a, b) = (a as usize, b as usize);
            let fa = a as f64;
            let fb = b as f64;
            j.v += c * px[a] * py[b];
            if a >= 1 {
                j.gx += c * fa * px[a - 1] * py[b];
                if b >= 1 {
                    j.hxy += c * fa * fb * px[a - 1] * py[b - 1];
                }
                if a >= 2 {
                    j.hxx += c * fa * (fa - 1.0) * px[a - 2] * py[b];
                }
            }
            if b >= 1 {
                j.gy += c * fb * px[a] * py[b - 1];
                if b >= 2 {
                    j.hyy += c * fb * (fb - 1.0) * px[a] * py[b - 2];
                }
            }
        }
        j
    }

    /// (f_xx, f_xy, f_yy) at (x, y).
    pub fn hessian(&self, x: f64, y: f64) -> [f64; 3] {
        if self.max_a >= 33 || self.max_b >= 33 {
            let j = self.jet(x, y);
            return [j.hxx, j.hxy, j.hyy];
        }
        let mut px = [1.0f64; 33];
        let mut py = [1.0f64; 33];
        fill_powers(&mut px, x, self.max_a);
        fill_powers(&mut py, y, self.max_b);
        let mut h = [0.0; 3];
        for &(a, b, c) in &self.terms {
            let (a, b) = (a as usize, b as usize);
            if a >= 2 {
                h[0] += c * (a * (a - 1)) as f64 * px[a - 2] * py[b];
            }
            if a >= 1 && b >= 1 {
                h[1] += c * (a * b) as f64 * px[a - 1] * py[b - 1];
            }
            if b >= 2 {
                h[2] += c * (b * (b - 1)) as f64 * px[a] * py[b - 2];
            }
        }
        h
    }

    /// Sum of |c x^a y^b|, a scale for judging cancellation.
    pub fn abs_eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(a, b, c)| (c * x.powi(a as i32) * y.powi(b as i32)).abs()).sum()
    }
}

fn fill_powers(p: &mut [f64], v: f64, upto: usize) {
    for i in 1..=upto {
        p[i] = p[i - 1] * v;
    }
}
