//! Iterated cylindrical decoupling: bands, Taylor shears, sigma^(1/2)
//! strips and rescaling, repeated l times.

use num_rational::BigRational;

use super::tiler::{directional_bounds, grid_counts};
use crate::error::EngineError;
use crate::geometry::{enclosing_rectangle, AffineMap, Parallelogram, Rect};
use crate::polyalg::parametric::{taylor_shear_coefficient, ParametricPoly};
use crate::polyalg::univariate::{f64_to_rat, UniPoly};
use crate::polyalg::FloatPoly;

const MAX_INFLATION: f64 = 1.5;

/// A terminal strip of the recursion.
#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    /// Leaf coordinates to band coordinates, applied in order.
    pub maps: Vec<AffineMap>,
    pub to_band: AffineMap,
    pub strip: Rect,
    pub depth: u32,
}

impl Leaf {
    /// The leaf in band coordinates, squared off along its long edge when
    /// that costs little area, together with the unit-square map in leaf
    /// coordinates.
    pub fn cell(&self) -> (Parallelogram, AffineMap) {
        let p = self.strip.to_parallelogram().map(&self.to_band);
        let len = |e: [f64; 2]| e[0].hypot(e[1]);
        let long_first = if len(p.edge2) > len(p.edge1) {
            Parallelogram { origin: p.origin, edge1: p.edge2, edge2: p.edge1 }
        } else {
            p
        };
        let shape = match enclosing_rectangle(&long_first) {
            Ok((r, inflation)) if inflation <= MAX_INFLATION => r,
            _ => p,
        };
        let back = self.to_band.inverse().expect("strip maps are invertible");
        (shape, back.compose(&shape.frame()))
    }
}

/// Exact shear coefficient for the top level, given the band offset b.
pub(crate) type TopShear<'a> = dyn Fn(&BigRational) -> Result<UniPoly, EngineError> + 'a;

pub(crate) struct Decoupler<'a> {
    pub hess: &'a FloatPoly,
    /// Band coordinates to the coordinates of `hess`.
    pub band_to_engine: AffineMap,
    /// The family parameter; strips have width sigma^(1/2).
    pub sigma: f64,
    pub max_depth: usize,
    pub m_bound: f64,
    pub top: Option<&'a TopShear<'a>>,
    /// Stop early on strips already flat at this target.
    pub flat_target: Option<f64>,
}

#[derive(Default)]
pub(crate) struct DecoupleStats {
    pub max_abs_mu: f64,
    pub max_mu_poly_bound: f64,
}

impl Decoupler<'_> {
    pub fn run(&self, l: u32, strip: Rect, stats: &mut DecoupleStats) -> Result<Vec<Leaf>, EngineError> {
        if l as usize > self.max_depth {
            return Err(EngineError::RecursionDepth(l as usize));
        }
        let mut out = Vec::new();
        self.level(l, strip, Vec::new(), AffineMap::identity(), 0, stats, &mut out)?;
        Ok(out)
    }

    fn is_flat(&self, to_band: &AffineMap, strip: &Rect, target: f64) -> bool {
        let cell = strip.to_parallelogram().map(&self.band_to_engine.compose(to_band));
        grid_counts(directional_bounds(self.hess, &cell), target, 1, 1) == (1, 1)
    }

    fn mu(&self, to_band: &AffineMap, at: [f64; 2], depth: u32, stats: &mut DecoupleStats) -> Result<f64, EngineError> {
        let mu = match (depth, self.top) {
            (0, Some(top)) => {
                let poly = top(&f64_to_rat(at[1]))?;
                let bound: f64 = poly.coeffs().iter().map(|c| crate::polyalg::univariate::rat_to_f64(c).abs()).sum();
                stats.max_mu_poly_bound = stats.max_mu_poly_bound.max(bound);
                poly.eval_f64(self.sigma.sqrt())
            }
            _ => {
                let g = self.band_to_engine.compose(to_band);
                let p = g.apply(at);
                let h = self.hess.hessian(p[0], p[1]);
                let l = g.linear;
                let (ex, ey) = ([l[0][0], l[1][0]], [l[0][1], l[1][1]]);
                let a11 = ex[0] * (h[0] * ex[0] + h[1] * ex[1]) + ex[1] * (h[1] * ex[0] + h[2] * ex[1]);
                let a12 = ex[0] * (h[0] * ey[0] + h[1] * ey[1]) + ex[1] * (h[1] * ey[0] + h[2] * ey[1]);
                if a11 == 0.0 {
                    return Err(EngineError::construction(
                        "cylindrical shear",
                        format!("second x-derivative vanishes at {p:?}"),
                    ));
                }
                a12 / a11
            }
        };
        if !mu.is_finite() || mu.abs() > self.m_bound {
            return Err(EngineError::ShearBound { mu, bound: self.m_bound });
        }
        stats.max_abs_mu = stats.max_abs_mu.max(mu.abs());
        Ok(mu)
    }

    #[allow(clippy::too_many_arguments)]
    fn level(
        &self,
        l: u32,
        strip: Rect,
        maps: Vec<AffineMap>,
        to_band: AffineMap,
        depth: u32,
        stats: &mut DecoupleStats,
        out: &mut Vec<Leaf>,
    ) -> Result<(), EngineError> {
        if l == 0 || self.flat_target.is_some_and(|t| self.is_flat(&to_band, &strip, t)) {
            out.push(Leaf { maps, to_band, strip, depth });
            return Ok(());
        }
        let sq = self.sigma.sqrt();
        let h = strip.height();
        let mu0 = self.mu(&to_band, [strip.x0, strip.y0], depth, stats)?;
        let nb = ((10.0 * mu0.abs() * h).ceil() as usize).max(1);
        for i in 0..nb {
            let b = strip.y0 + h * i as f64 / nb as f64;
            let hb = h / nb as f64;
            let mu = if i == 0 { mu0 } else { self.mu(&to_band, [strip.x0, b], depth, stats)? };
            let xa = strip.x0 + (mu * hb).min(0.0);
            let xb = strip.x1 + (mu * hb).max(0.0);
            let n = (((xb - xa) / sq) - 1e-9).ceil().max(1.0) as usize;
            let w = (xb - xa) / n as f64;
            for m in 0..n {
                let a = xa + m as f64 * w;
                let child = AffineMap::new([[w, -mu], [0.0, 1.0]], [a, b]);
                let mut child_maps = Vec::with_capacity(maps.len() + 1);
                child_maps.push(child);
                child_maps.extend_from_slice(&maps);
                self.level(
                    l - 1,
                    Rect::new(0.0, 1.0, 0.0, hb),
                    child_maps,
                    to_band.compose(&child),
                    depth + 1,
                    stats,
                    out,
                )?;
            }
        }
        Ok(())
    }
}

/// Cylindrical decoupling of a phase tau in the family with parameter
/// w = sigma^(1/2) over `strip`: parallelograms of width about sigma^(l/2)
/// and height about one, in the coordinates of tau.
pub fn cylindrical_decouple(tau: &ParametricPoly, l: u32, sigma: f64, strip: Rect) -> Result<Vec<Parallelogram>, EngineError> {
    let hess = FloatPoly::from_terms(tau.specialize_f64(sigma.sqrt()));
    let top = |b: &BigRational| -> Result<UniPoly, EngineError> {
        let shifted = tau.compose(
            &ParametricPoly::x(),
            &(&ParametricPoly::y() + &ParametricPoly::constant(UniPoly::constant(b.clone()))),
        );
        let moved = if strip.x0 == 0.0 {
            shifted
        } else {
            shifted.compose(
                &(&ParametricPoly::x() + &ParametricPoly::constant(UniPoly::constant(f64_to_rat(strip.x0)))),
                &ParametricPoly::y(),
            )
        };
        Ok(taylor_shear_coefficient(&moved, l)?)
    };
    let d = Decoupler {
        hess: &hess,
        band_to_engine: AffineMap::identity(),
        sigma,
        max_depth: 64,
        m_bound: f64::INFINITY,
        top: Some(&top),
        flat_target: None,
    };
    let leaves = d.run(l, strip, &mut DecoupleStats::default())?;
    Ok(leaves.iter().map(|leaf| leaf.cell().0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parametric::rescaled_band_phase;
    use crate::polyalg::parse_poly;
    use crate::polyalg::univariate::rat;

    #[test]
    fn base_case_is_the_strip() {
        let tau = ParametricPoly::from_poly(&parse_poly("x^2+y^2").unwrap());
        let strip = Rect::new(0.0, 1.0, 0.0, 1.0);
        let pieces = cylindrical_decouple(&tau, 0, 0.25, strip).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].area(), 1.0);
    }

    #[test]
    fn one_level_gives_sigma_half_strips() {
        let sigma = 2f64.powi(-8);
        let tau = ParametricPoly::from_poly(&parse_poly("x^2+y^2").unwrap());
        let pieces = cylindrical_decouple(&tau, 1, sigma, Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(pieces.len(), 16);
        assert!(pieces.iter().all(|p| (p.area() - 1.0 / 16.0).abs() < 1e-12));
    }

    #[test]
    fn two_levels_use_different_shears() {
        let phi = parse_poly("x^4+6*x^2*y+6*y^2").unwrap();
        let tau = rescaled_band_phase(&phi, &rat(1, 1), &rat(1, 1));
        let sigma = 2f64.powi(-6);
        let pieces = cylindrical_decouple(&tau, 2, sigma, Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert!(pieces.len() > 64);
        let mut slopes: Vec<f64> = pieces.iter().map(|p| p.edge1[0] / p.edge1[1]).collect();
        slopes.sort_by(f64::total_cmp);
        slopes.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert!(slopes.len() > 1);
    }
}
