//! Factorization x^nu1 y^nu2 prod (x^s - lambda_j y^r)^n_j * P of a weighted
//! homogeneous polynomial, and divisibility orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::homogeneity::MixedHomogeneity;
use super::poly::BivariatePoly;
use super::univariate::{sturm_count, RealRoot, UniPoly};
use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
pub struct CurveFactor {
    pub lambda: RealRoot,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousFactorization {
    pub mh: MixedHomogeneity,
    pub nu1: u32,
    pub nu2: u32,
    pub curve_factors: Vec<CurveFactor>,
    pub residual: BivariatePoly,
}

/// Default isolating width for irrational curve parameters.
pub fn default_root_width() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << 64)
}

/// Writes phi / (x^nu1 y^nu2) as H(x^s, y^r) and returns (nu1, nu2, H(t, 1)).
pub fn lattice_form(phi: &BivariatePoly, r: u32, s: u32) -> Result<(u32, u32, UniPoly), AlgebraError> {
    if phi.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let nu1 = phi.min_x_exponent();
    let nu2 = phi.min_y_exponent();
    let rest = phi.shift_down(nu1, nu2);
    let mut n: Option<u32> = None;
    let mut coeffs = Vec::new();
    for (&(a, b), c) in rest.terms() {
        if a % s != 0 || b % r != 0 {
            return Err(AlgebraError::LatticeMismatch(format!(
                "monomial x^{a} y^{b} is off the lattice for (r,s)=({r},{s})"
            )));
        }
        let (i, j) = (a / s, b / r);
        match n {
            None => n = Some(i + j),
            Some(m) if m != i + j => {
                return Err(AlgebraError::LatticeMismatch(format!(
                    "monomial x^{a} y^{b} has lattice degree {} instead of {m}",
                    i + j
                )))
            }
            _ => {}
        }
        if coeffs.len() <= i as usize {
            coeffs.resize(i as usize + 1, BigRational::zero());
        }
        coeffs[i as usize] = c.clone();
    }
    Ok((nu1, nu2, UniPoly::new(coeffs)))
}

/// Clears denominators so that all coefficients are integers.
fn integer_normalized(p: &UniPoly) -> UniPoly {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.scale(&BigRational::from_integer(l))
}

/// Real roots of a square-free polynomial; rational roots are detected and
/// returned exactly, the rest are isolated and refined to `width`.
pub fn real_roots(f: &UniPoly, width: &BigRational) -> Vec<RealRoot> {
    let g = integer_normalized(f);
    let an = g.leading().abs().to_integer();
    let fine = BigRational::new(BigInt::one(), &an * BigInt::from(4));
    let mut out = Vec::new();
    for root in g.isolate_real_roots() {
        let r = root.refined(if &fine < width { &fine } else { width });
        // a rational root p/q has q | an, so an * root is an integer
        let k = (r.midpoint() * BigRational::from_integer(an.clone())).round();
        let cand = k / BigRational::from_integer(an.clone());
        if r.contains(&cand) && g.eval(&cand).is_zero() {
            out.push(RealRoot::exact(cand));
        } else {
            out.push(r.refined(width));
        }
    }
    out
}

/// Groups irrational real roots of the square-free `f` into monic rational
/// factors of `f`. A rational factor g has a g integral (a the leading
/// coefficient of f made integral), so candidate products over subsets of
/// the roots are rounded and checked by exact division. Roots that belong to
/// no such factor (their minimal polynomial has complex roots) are returned
/// separately.
fn real_root_factors(f: &UniPoly, mut roots: Vec<RealRoot>) -> (Vec<UniPoly>, Vec<RealRoot>) {
    const MAX_ROOTS: usize = 12;
    let mut factors = Vec::new();
    if roots.is_empty() || roots.len() > MAX_ROOTS {
        return (factors, roots);
    }
    let g = integer_normalized(f);
    let a = BigRational::from_integer(g.leading().abs().to_integer());
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << 160);
    roots = roots.into_iter().map(|r| r.refined(&tiny)).collect();
    let mut rest = f.monic();
    let mut size = 1;
    while size <= roots.len() {
        let mut found = None;
        for mask in 1u32..(1 << roots.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let mut prod = UniPoly::constant(BigRational::one());
            for (i, r) in roots.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod = &prod * &UniPoly::linear_root(&r.midpoint());
                }
            }
            let rounded = UniPoly::new(prod.coeffs().iter().map(|c| (c * &a).round() / &a).collect());
            let (q, rem) = rest.div_rem(&rounded);
            if rem.is_zero() {
                found = Some((mask, rounded, q));
                break;
            }
        }
        match found {
            Some((mask, h, q)) => {
                factors.push(h);
                rest = q;
                roots = roots.into_iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).map(|(_, r)| r).collect();
            }
            None => size += 1,
        }
    }
    (factors, roots)
}

pub fn factorize_mixed_homogeneous(
    phi: &BivariatePoly,
    mh: &MixedHomogeneity,
) -> Result<HomogeneousFactorization, AlgebraError> {
    factorize_with_width(phi, mh, &default_root_width())
}

pub fn factorize_with_width(
    phi: &BivariatePoly,
    mh: &MixedHomogeneity,
    width: &BigRational,
) -> Result<HomogeneousFactorization, AlgebraError> {
    let (r, s) = (mh.r, mh.s);
    let (nu1, nu2, h) = lattice_form(phi, r, s)?;
    let mut curve_factors = Vec::new();
    let mut residual = h.clone();
    for (m, f) in h.square_free_decomposition() {
        let roots = real_roots(&f, width);
        // rational roots and rational groups of irrational ones divide out
        // exactly; only the remainder uses midpoints
        let mut rest = f.clone();
        for v in roots.iter().filter_map(RealRoot::exact_value) {
            let lin = UniPoly::linear_root(&v);
            residual = residual.div_rem(&lin.pow(m)).0;
            rest = rest.div_rem(&lin).0;
        }
        let irrational: Vec<RealRoot> = roots.iter().filter(|r| r.exact_value().is_none()).cloned().collect();
        let (exact, loose) = real_root_factors(&rest, irrational);
        for g in exact {
            residual = residual.div_rem(&g.pow(m)).0;
        }
        for r in loose {
            residual = residual.div_rem(&UniPoly::linear_root(&r.midpoint()).pow(m)).0;
        }
        curve_factors.extend(roots.into_iter().map(|lambda| CurveFactor { lambda, multiplicity: m }));
    }
    curve_factors.sort_by(|a, b| a.lambda.lo.cmp(&b.lambda.lo));
    let d = residual.degree().unwrap_or(0) as u32;
    let residual = BivariatePoly::from_terms(
        residual.coeffs().iter().enumerate().map(|(i, c)| (s * i as u32, r * (d - i as u32), c.clone())),
    );
    Ok(HomogeneousFactorization { mh: *mh, nu1, nu2, curve_factors, residual })
}

/// x^s - lambda y^r for rational lambda.
pub fn curve_polynomial(lambda: &BigRational, r: u32, s: u32) -> BivariatePoly {
    BivariatePoly::from_terms([(s, 0, BigRational::one()), (0, r, -lambda.clone())])
}

impl HomogeneousFactorization {
    /// Multiplies the factors back together, using interval midpoints for
    /// irrational curve parameters.
    pub fn reassemble(&self) -> BivariatePoly {
        let mut p = self.residual.shift_up(self.nu1, self.nu2);
        for cf in &self.curve_factors {
            let l = cf.lambda.exact_value().unwrap_or_else(|| cf.lambda.midpoint());
            p = &p * &curve_polynomial(&l, self.mh.r, self.mh.s).pow(cf.multiplicity);
        }
        p
    }
}

/// Largest k with factor^k | phi, by repeated exact division.
pub fn divisibility_order(phi: &BivariatePoly, factor: &BivariatePoly) -> u32 {
    assert!(!factor.is_zero() && !factor.is_constant(), "factor must be non-constant");
    if phi.is_zero() {
        return u32::MAX;
    }
    let mut k = 0;
    let mut cur = phi.clone();
    while let Some(q) = cur.div_exact(factor) {
        k += 1;
        cur = q;
    }
    k
}

/// Order of x^s - lambda y^r in phi, where phi lies on the (r, s) lattice
/// (any weighted homogeneous polynomial with these weights, such as a
/// Hessian determinant). Exact for irrational lambda.
pub fn curve_order(phi: &BivariatePoly, lambda: &RealRoot, r: u32, s: u32) -> Result<u32, AlgebraError> {
    let (_, _, h) = lattice_form(phi, r, s)?;
    if let Some(v) = lambda.exact_value() {
        let lin = UniPoly::linear_root(&v);
        let mut k = 0;
        let mut cur = h;
        loop {
            let (q, rem) = cur.div_rem(&lin);
            if !rem.is_zero() || cur.degree().unwrap_or(0) == 0 {
                return Ok(k);
            }
            k += 1;
            cur = q;
        }
    }
    for (m, f) in h.square_free_decomposition() {
        let g = f.gcd(&lambda.poly);
        if g.degree().unwrap_or(0) == 0 {
            continue;
        }
        if sturm_count(&g.sturm_sequence(), &lambda.lo, &lambda.hi) > 0 {
            return Ok(m);
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;
    use crate::polyalg::univariate::rat;

    #[test]
    fn factor_examples() {
        let f = factorize_mixed_homogeneous(&parse_poly("144*y").unwrap(), &MixedHomogeneity::new(2, 1, 2)).unwrap();
        assert_eq!((f.nu1, f.nu2), (0, 1));
        assert!(f.curve_factors.is_empty());
        assert_eq!(f.residual, parse_poly("144").unwrap());

        let p = &parse_poly("x^2-y^3").unwrap().pow(2) * &parse_poly("x^2+y^3").unwrap();
        let f = factorize_mixed_homogeneous(&p, &MixedHomogeneity::new(18, 3, 2)).unwrap();
        assert_eq!((f.nu1, f.nu2), (0, 0));
        // x^2 + y^3 = x^2 - (-1) y^3 vanishes on a real curve too
        assert_eq!(f.curve_factors.len(), 2);
        assert_eq!(f.curve_factors[0].lambda.exact_value(), Some(rat(-1, 1)));
        assert_eq!(f.curve_factors[0].multiplicity, 1);
        assert_eq!(f.curve_factors[1].lambda.exact_value(), Some(rat(1, 1)));
        assert_eq!(f.curve_factors[1].multiplicity, 2);
        assert_eq!(f.residual, parse_poly("1").unwrap());
        assert_eq!(f.reassemble(), p);

        let f = factorize_mixed_homogeneous(&parse_poly("x^2*y^2").unwrap(), &MixedHomogeneity::new(4, 1, 1)).unwrap();
        assert_eq!((f.nu1, f.nu2), (2, 2));
        assert_eq!(f.residual, parse_poly("1").unwrap());
    }

    #[test]
    fn irrational_curve_parameter() {
        // x^2 - 2y^2 with r = s = 1 has lambda = -sqrt2, sqrt2
        let p = parse_poly("x^2 - 2*y^2").unwrap();
        let f = factorize_mixed_homogeneous(&p, &MixedHomogeneity::new(2, 1, 1)).unwrap();
        assert_eq!(f.curve_factors.len(), 2);
        let l = &f.curve_factors[1].lambda;
        assert!(l.exact_value().is_none());
        assert!((l.value_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(curve_order(&p, l, 1, 1).unwrap(), 1);
        assert_eq!(curve_order(&p.pow(3), l, 1, 1).unwrap(), 3);
    }

    #[test]
    fn irrational_roots_next_to_complex_ones() {
        // (x^2 - 3y^2)(x^2 + y^2): the square-free part mixes real and complex roots
        let p = parse_poly("x^4 - 2*x^2*y^2 - 3*y^4").unwrap();
        let f = factorize_mixed_homogeneous(&p, &MixedHomogeneity::new(4, 1, 1)).unwrap();
        assert_eq!(f.curve_factors.len(), 2);
        assert_eq!(f.residual, parse_poly("x^2+y^2").unwrap());
        // x^3 - 2y^3 has one real root and a complex pair
        let p = parse_poly("x^3 - 2*y^3").unwrap();
        let f = factorize_mixed_homogeneous(&p, &MixedHomogeneity::new(3, 1, 1)).unwrap();
        assert_eq!(f.curve_factors.len(), 1);
        assert_eq!(f.residual.len(), 3);
    }

    #[test]
    fn orders() {
        let y = BivariatePoly::y();
        assert_eq!(divisibility_order(&parse_poly("144*y").unwrap(), &y), 1);
        assert_eq!(divisibility_order(&parse_poly("x^4+6*x^2*y+6*y^2").unwrap(), &y), 0);
    }
}
