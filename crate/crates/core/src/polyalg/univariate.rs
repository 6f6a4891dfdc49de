//! Dense univariate polynomials over the rationals, square-free decomposition
//! and Sturm-sequence real root isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients stored lowest degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            // very large numerator and denominator: scale both down
            let n = q.numer();
            let d = q.denom();
            let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
            let n = n >> shift;
            let d = d >> shift;
            n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
        }
    }
}

/// Exact rational from a finite float.
pub fn f64_to_rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    /// t - a
    pub fn linear_root(a: &BigRational) -> Self {
        UniPoly::new(vec![-a.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Lowest index with a nonzero coefficient (the order at 0).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        self.scale(&(BigRational::one() / lc))
    }

    pub fn truncate(&self, n: usize) -> Self {
        UniPoly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::constant(BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division, panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let f = &rem[i] / &lc;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &f * dc;
            }
            quot[i - dd] = f;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: returns (m, f_m) with self = c * prod f_m^m, each f_m
    /// square-free, pairwise coprime, of positive degree.
    pub fn square_free_decomposition(&self) -> Vec<(u32, UniPoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1u32;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.clone()));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }

    /// Cauchy bound: every real root has |t| < bound.
    pub fn root_bound(&self) -> BigRational {
        let lc = self.leading().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &lc)
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        m + BigRational::one()
    }

    /// Real roots of a square-free polynomial as disjoint isolating intervals
    /// (lo, hi], sorted increasingly.
    pub fn isolate_real_roots(&self) -> Vec<RealRoot> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let seq = self.sturm_sequence();
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = sturm_count(&seq, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push(RealRoot::new(self.clone(), lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from_integer(2.into());
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }
}

fn sign_changes(seq: &[UniPoly], t: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(t);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in (lo, hi].
pub fn sturm_count(seq: &[UniPoly], lo: &BigRational, hi: &BigRational) -> usize {
    sign_changes(seq, lo).saturating_sub(sign_changes(seq, hi))
}

/// A simple real root of `poly` inside (lo, hi]; the interval can be shrunk
/// on demand by bisection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub poly: UniPoly,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn new(poly: UniPoly, lo: BigRational, hi: BigRational) -> Self {
        RealRoot { poly, lo, hi }
    }

    pub fn exact(value: BigRational) -> Self {
        RealRoot {
            poly: UniPoly::linear_root(&value),
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value when the root is rational and has been pinned down.
    pub fn exact_value(&self) -> Option<BigRational> {
        if self.is_exact() {
            return Some(self.lo.clone());
        }
        if self.poly.degree() == Some(1) {
            let c = self.poly.coeffs();
            return Some(-&c[0] / &c[1]);
        }
        None
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn value_f64(&self) -> f64 {
        match self.exact_value() {
            Some(v) => rat_to_f64(&v),
            None => rat_to_f64(&self.midpoint()),
        }
    }

    /// 1 for positive, -1 for negative roots. Zero must not be a root.
    pub fn sign(&self) -> i32 {
        let mut r = self.clone();
        let mut w = r.width();
        while r.lo.is_negative() && r.hi.is_positive() {
            w = w / BigRational::from_integer(2.into());
            r.refine(&w);
        }
        if r.hi.is_positive() || (r.hi.is_zero() && r.lo.is_positive()) {
            1
        } else {
            -1
        }
    }

    /// Bisect until the width is at most `width`.
    pub fn refine(&mut self, width: &BigRational) {
        if let Some(v) = self.exact_value() {
            self.lo = v.clone();
            self.hi = v;
            return;
        }
        let two = BigRational::from_integer(2.into());
        let mut f_hi = self.poly.eval(&self.hi);
        if f_hi.is_zero() {
            self.lo = self.hi.clone();
            return;
        }
        while &self.width() > width {
            let mid = (&self.lo + &self.hi) / &two;
            let fm = self.poly.eval(&mid);
            if fm.is_zero() {
                self.lo = mid.clone();
                self.hi = mid;
                return;
            }
            if fm.is_positive() == f_hi.is_positive() {
                self.hi = mid;
                f_hi = fm;
            } else {
                self.lo = mid;
            }
        }
    }

    pub fn refined(mut self, width: &BigRational) -> Self {
        self.refine(width);
        self
    }

    /// True when `t` lies in the closed isolating interval.
    pub fn contains(&self, t: &BigRational) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{}", a)?,
                (_, true) => {}
                _ => write!(f, "{}*", a)?,
            }
            match i {
                0 => {}
                1 => write!(f, "w")?,
                _ => write!(f, "w^{}", i)?,
            }
        }
        Ok(())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_free_of_repeated_roots() {
        // (t-1)^3 (t+2)
        let p = &UniPoly::linear_root(&rat(1, 1)).pow(3) * &UniPoly::linear_root(&rat(-2, 1));
        let sf = p.square_free_decomposition();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], (1, UniPoly::linear_root(&rat(-2, 1))));
        assert_eq!(sf[1], (3, UniPoly::linear_root(&rat(1, 1))));
    }

    #[test]
    fn isolates_sqrt_two() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = p.isolate_real_roots();
        assert_eq!(roots.len(), 2);
        let r = roots[1].clone().refined(&rat(1, 1 << 30));
        assert!((r.value_f64() - 2f64.sqrt()).abs() < 1e-8);
        assert_eq!(roots[0].sign(), -1);
    }

    #[test]
    fn no_real_roots() {
        assert!(UniPoly::from_ints(&[1, 0, 1]).isolate_real_roots().is_empty());
    }

    #[test]
    fn division_round_trip() {
        let a = UniPoly::from_ints(&[3, 0, -2, 5, 1]);
        let b = UniPoly::from_ints(&[1, 7, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }
}
