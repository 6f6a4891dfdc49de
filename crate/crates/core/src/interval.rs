//! Closed intervals with outward rounding, enough to bound polynomials over
//! boxes.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn widened(lo: f64, hi: f64) -> Self {
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    /// Outward rounding that keeps exact zeros (sums and differences that
    /// round to zero are exact).
    fn widened_sum(lo: f64, hi: f64) -> Self {
        let lo = if lo == 0.0 { 0.0 } else { lo.next_down() };
        let hi = if hi == 0.0 { 0.0 } else { hi.next_up() };
        Interval { lo, hi }
    }

    /// A product that is +0 is either exact or a positive underflow.
    fn widened_product(lo: f64, hi: f64) -> Self {
        let lo = if lo == 0.0 && lo.is_sign_positive() { 0.0 } else { lo.next_down() };
        let hi = if hi == 0.0 && hi.is_sign_negative() { 0.0 } else { hi.next_up() };
        Interval { lo, hi }
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn powi(&self, e: u32) -> Self {
        if e % 2 == 1 {
            let mut acc = *self;
            for _ in 1..e {
                acc = acc * *self;
            }
            return acc;
        }
        // even power: work with |x|, whose range is nonnegative
        let abs = if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval { lo: 0.0, hi: self.mag() }
        };
        let mut acc = Interval::point(1.0);
        for _ in 0..e {
            acc = acc * abs;
        }
        Interval { lo: acc.lo.max(0.0), hi: acc.hi }
    }

    pub fn hull(&self, o: &Interval) -> Self {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::widened_sum(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::widened_sum(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::widened_product(lo, hi)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, k: f64) -> Interval {
        self * Interval::point(k)
    }
}

/// Range enclosure of sum c x^a y^b over the box x in `x`, y in `y`.
/// Coefficients are taken as given floats, each widened by one ulp.
pub fn poly_range(terms: &[(u32, u32, f64)], x: Interval, y: Interval) -> Interval {
    let mut acc = Interval::point(0.0);
    for &(a, b, c) in terms {
        let ci = Interval::widened(c, c);
        acc = acc + ci * x.powi(a) * y.powi(b);
    }
    acc
}
