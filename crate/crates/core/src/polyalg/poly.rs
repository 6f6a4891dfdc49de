//! Sparse bivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::univariate::rat_to_f64;

pub type Monomial = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn monomial(c: BigRational, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, BigRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    /// Convenience for tests and examples: integer coefficients.
    pub fn from_int_terms(t: &[(i64, u32, u32)]) -> Self {
        Self::from_terms(t.iter().map(|&(c, a, b)| (a, b, BigRational::from_integer(c.into()))))
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, a: u32, b: u32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a == 0 && b == 0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    pub fn min_x_exponent(&self) -> u32 {
        self.terms.keys().map(|&(a, _)| a).min().unwrap_or(0)
    }

    pub fn min_y_exponent(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).min().unwrap_or(0)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        BivariatePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), c)| (a - 1, b, c * BigRational::from_integer(BigInt::from(a)))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| (a, b - 1, c * BigRational::from_integer(BigInt::from(b)))),
        )
    }

    /// Divide by x^i y^j; the caller guarantees every monomial allows it.
    pub fn shift_down(&self, i: u32, j: u32) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(&(a, b), c)| ((a - i, b - j), c.clone())).collect(),
        }
    }

    pub fn shift_up(&self, i: u32, j: u32) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(&(a, b), c)| ((a + i, b + j), c.clone())).collect(),
        }
    }

    /// p(y, x)
    pub fn swap_xy(&self) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        }
    }

    /// p(ex*x, ey*y) with ex, ey in {1, -1}.
    pub fn reflect(&self, ex: i32, ey: i32) -> Self {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| {
                    let mut s = 1;
                    if ex < 0 && a % 2 == 1 {
                        s = -s;
                    }
                    if ey < 0 && b % 2 == 1 {
                        s = -s;
                    }
                    ((a, b), if s < 0 { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    /// Substitute x -> px, y -> py.
    pub fn compose(&self, px: &BivariatePoly, py: &BivariatePoly) -> Self {
        let mut xp: Vec<BivariatePoly> = vec![Self::one()];
        let mut yp: Vec<BivariatePoly> = vec![Self::one()];
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            while xp.len() <= a as usize {
                let next = xp.last().unwrap() * px;
                xp.push(next);
            }
            while yp.len() <= b as usize {
                let next = yp.last().unwrap() * py;
                yp.push(next);
            }
            let t = (&xp[a as usize] * &yp[b as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(a, b), c) in &self.terms {
            acc += c * pow_rat(x, a) * pow_rat(y, b);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| rat_to_f64(c) * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    /// Restriction to y = 0 as a univariate polynomial in x.
    pub fn at_y_zero(&self) -> super::univariate::UniPoly {
        let deg = self.degree_x() as usize;
        let mut c = vec![BigRational::zero(); deg + 1];
        for (&(a, b), v) in &self.terms {
            if b == 0 {
                c[a as usize] = v.clone();
            }
        }
        super::univariate::UniPoly::new(c)
    }

    /// Exact division: `Some(q)` with self = q * d, or `None` when d does not
    /// divide self.
    pub fn div_exact(&self, d: &BivariatePoly) -> Option<BivariatePoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        // lex order with x dominant: the leading monomial is the last key
        let (&(da, db), dc) = d.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&(a, b), c)) = rem.terms.iter().next_back() {
            if a < da || b < db {
                return None;
            }
            let f = c / dc;
            let t = Self::monomial(f, a - da, b - db);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
    }

    /// Float coefficients in descending canonical order.
    pub fn to_f64_terms(&self) -> Vec<(u32, u32, f64)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, rat_to_f64(c))).collect()
    }
}

pub fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), e as usize)
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, o: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, o: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, o: &BivariatePoly) -> BivariatePoly {
        let mut out = BTreeMap::<Monomial, BigRational>::new();
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                *out.entry((a + a2, b + b2)).or_insert_with(BigRational::zero) += c * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        BivariatePoly { terms: out }
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        BivariatePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let a = BivariatePoly::from_int_terms(&[(1, 2, 0), (-1, 0, 3)]);
        let b = BivariatePoly::from_int_terms(&[(1, 2, 0), (1, 0, 3)]);
        let p = &a.pow(2) * &b;
        assert_eq!(p.div_exact(&a).unwrap(), &a * &b);
        assert_eq!(p.div_exact(&a).unwrap().div_exact(&a).unwrap(), b);
        assert!(b.div_exact(&a).is_none());
    }

    #[test]
    fn reflection_matches_compose() {
        let p = BivariatePoly::from_int_terms(&[(3, 3, 1), (-2, 1, 2), (5, 0, 0)]);
        let mx = -&BivariatePoly::x();
        assert_eq!(p.reflect(-1, 1), p.compose(&mx, &BivariatePoly::y()));
    }
}
