//! Bivariate polynomials whose coefficients are polynomials in a parameter w
//! (w stands for sigma^(1/2)).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{BivariatePoly, Monomial};
use super::univariate::UniPoly;
use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ParametricPoly {
    terms: BTreeMap<Monomial, UniPoly>,
}

impl ParametricPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: UniPoly, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn constant(c: UniPoly) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::term(UniPoly::from_ints(&[1]), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(UniPoly::from_ints(&[1]), 0, 1)
    }

    /// Lift a w-free polynomial.
    pub fn from_poly(p: &BivariatePoly) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in p.terms() {
            out.add_term(a, b, UniPoly::constant(c.clone()));
        }
        out
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: UniPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_default();
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, UniPoly> {
        &self.terms
    }

    pub fn coeff(&self, a: u32, b: u32) -> UniPoly {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, c.scale(&BigRational::from_integer(BigInt::from(a))));
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, c.scale(&BigRational::from_integer(BigInt::from(b))));
            }
        }
        out
    }

    pub fn without_linear_terms(&self) -> Self {
        let mut out = self.clone();
        for m in [(0, 0), (1, 0), (0, 1)] {
            out.terms.remove(&m);
        }
        out
    }

    /// Smallest w-order over all coefficients (None for the zero polynomial).
    pub fn w_order(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.order()).min()
    }

    pub fn specialize(&self, w: &BigRational) -> BivariatePoly {
        BivariatePoly::from_terms(self.terms.iter().map(|(&(a, b), c)| (a, b, c.eval(w))))
    }

    /// Float coefficients at a float parameter value. Coefficients that
    /// vanish to high order in w are evaluated term by term, so there is no
    /// cancellation of leading orders.
    pub fn specialize_f64(&self, w: f64) -> Vec<(u32, u32, f64)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c.eval_f64(w))).collect()
    }

    /// Substitute x -> px, y -> py.
    pub fn compose(&self, px: &ParametricPoly, py: &ParametricPoly) -> Self {
        let mut xp = vec![ParametricPoly::constant(UniPoly::from_ints(&[1]))];
        let mut yp = xp.clone();
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
            let t = &(&xp[a as usize] * &yp[b as usize]) * &ParametricPoly::constant(c.clone());
            out = &out + &t;
        }
        out
    }

    pub fn hessian_determinant(&self) -> Self {
        let fxx = self.dx().dx();
        let fyy = self.dy().dy();
        let fxy = self.dx().dy();
        &(&fxx * &fyy) - &(&fxy * &fxy)
    }
}

impl Add for &ParametricPoly {
    type Output = ParametricPoly;
    fn add(self, o: &ParametricPoly) -> ParametricPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &ParametricPoly {
    type Output = ParametricPoly;
    fn sub(self, o: &ParametricPoly) -> ParametricPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl Mul for &ParametricPoly {
    type Output = ParametricPoly;
    fn mul(self, o: &ParametricPoly) -> ParametricPoly {
        let mut out = ParametricPoly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                out.add_term(a + a2, b + b2, c * c2);
            }
        }
        out
    }
}

/// Truncated power series quotient num / den modulo w^n.
pub fn series_divide(num: &UniPoly, den: &UniPoly, n: usize) -> Result<UniPoly, AlgebraError> {
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(AlgebraError::ZeroConstantTerm);
    }
    let mut q: Vec<BigRational> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = num.coeff(i);
        for (j, qj) in q.iter().enumerate() {
            let dij = den.coeff(i - j);
            if !dij.is_zero() {
                acc -= qj * dij;
            }
        }
        q.push(acc / &d0);
    }
    Ok(UniPoly::new(q))
}

/// mu(w): the Taylor polynomial of order 2l - 1 of tau_xy / tau_xx at the
/// origin.
pub fn taylor_shear_coefficient(tau: &ParametricPoly, l: u32) -> Result<UniPoly, AlgebraError> {
    let txx = tau.dx().dx().coeff(0, 0);
    let txy = tau.dx().dy().coeff(0, 0);
    series_divide(&txy, &txx, 2 * l as usize)
}

/// tau(X, Y) = phi(x0 + X, w^2 (y0 + Y)) with the constant and linear terms
/// removed; x0, y0 rational. With y0 = 1 this is phi(x, sigma y + sigma)
/// written around the point x = x0.
pub fn rescaled_band_phase(phi: &BivariatePoly, x0: &BigRational, y0: &BigRational) -> ParametricPoly {
    let w2 = UniPoly::new(vec![BigRational::zero(), BigRational::zero(), BigRational::one()]);
    let px = &ParametricPoly::constant(UniPoly::constant(x0.clone())) + &ParametricPoly::x();
    let py = &(&ParametricPoly::constant(UniPoly::constant(y0.clone())) + &ParametricPoly::y())
        * &ParametricPoly::constant(w2);
    ParametricPoly::from_poly(phi).compose(&px, &py).without_linear_terms()
}

/// psi(X, Y) = tau(X - mu Y, Y).
pub fn shear(tau: &ParametricPoly, mu: &UniPoly) -> ParametricPoly {
    let px = &ParametricPoly::x() - &(&ParametricPoly::constant(mu.clone()) * &ParametricPoly::y());
    tau.compose(&px, &ParametricPoly::y())
}

/// Exact w-order checks of the family conditions at level l:
/// tau_xx(0,0) has a nonzero constant term, tau_xy and tau_xxy are O(w^2),
/// the determinant and its x-derivative are O(w^(2l)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyOrders {
    pub txx_constant_nonzero: bool,
    pub txy_order: Option<usize>,
    pub txxy_order: Option<usize>,
    pub det_order: Option<usize>,
    pub det_x_order: Option<usize>,
}

impl FamilyOrders {
    pub fn of(tau: &ParametricPoly) -> Self {
        let det = tau.hessian_determinant();
        FamilyOrders {
            txx_constant_nonzero: !tau.dx().dx().coeff(0, 0).coeff(0).is_zero(),
            txy_order: tau.dx().dy().w_order(),
            txxy_order: tau.dx().dx().dy().w_order(),
            det_order: det.w_order(),
            det_x_order: det.dx().w_order(),
        }
    }

    pub fn admits(&self, l: u32) -> Result<(), String> {
        let at_least = |o: Option<usize>, n: usize| o.is_none_or(|v| v >= n);
        if !self.txx_constant_nonzero {
            return Err("tau_xx(0,0) vanishes at w = 0".into());
        }
        if !at_least(self.txy_order, 2) {
            return Err(format!("tau_xy has w-order {:?} < 2", self.txy_order));
        }
        if !at_least(self.txxy_order, 2) {
            return Err(format!("tau_xxy has w-order {:?} < 2", self.txxy_order));
        }
        if !at_least(self.det_order, 2 * l as usize) {
            return Err(format!("det has w-order {:?} < {}", self.det_order, 2 * l));
        }
        if !at_least(self.det_x_order, 2 * l as usize) {
            return Err(format!("d/dx det has w-order {:?} < {}", self.det_x_order, 2 * l));
        }
        Ok(())
    }
}

/// Checks the shape A(x) + w^(2l)(B(y) + x C(y)) + w^2 x^2 y D(x, y) of a
/// sheared phase with linear terms removed.
pub fn expansion_shape_holds(psi: &ParametricPoly, l: u32) -> Result<(), String> {
    for (&(a, b), c) in psi.without_linear_terms().terms() {
        let ord = c.order().unwrap_or(usize::MAX);
        let need = match (a, b) {
            (_, 0) => 0,
            (0, _) | (1, _) => 2 * l as usize,
            _ => 2,
        };
        if ord < need {
            return Err(format!("coefficient of x^{a} y^{b} has w-order {ord} < {need}"));
        }
    }
    Ok(())
}
