//! Neighbourhoods of the positive x-axis: the y^2-divisible case (dyadic
//! bands, rescaled nondegenerate tiling) and the remaining case (bands at
//! delta^(1/(k+2)) followed by cylindrical decoupling).

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::cylindrical::{DecoupleStats, Decoupler};
use super::{CaseTag, Cell, EngineConfig, Frame, PartitionPiece, Sink};
use crate::error::EngineError;
use crate::geometry::{AffineMap, Rect};
use crate::polyalg::parametric::{rescaled_band_phase, shear, taylor_shear_coefficient, FamilyOrders, ParametricPoly};
use crate::polyalg::univariate::{rat, rat_to_f64, UniPoly};
use crate::polyalg::{hessian_determinant, BivariatePoly};

/// Axis engine parameters in engine coordinates: the neighbourhood is
/// [1, x_hi] x [0, c].
#[derive(Clone, Debug)]
pub(crate) struct AxisSpec {
    pub k: u32,
    pub c: f64,
    pub x_hi: f64,
}

pub(crate) fn run_a1(frame: &Frame, sink: &mut Sink, spec: &AxisSpec, power: bool) -> Result<(), EngineError> {
    let AxisSpec { k, c, x_hi } = *spec;
    let d = frame.delta;
    let base = d.powf(1.0 / k as f64);
    let chain = frame.chain(&[]);
    if power {
        let mut y0 = 0.0;
        let mut j = 1u32;
        while y0 < c {
            let y1 = ((j as f64).powf(2.0 / k as f64) * base).min(c);
            let r = Rect::new(1.0, x_hi, y0, y1);
            sink.emit(
                frame,
                Cell {
                    local: r.to_parallelogram().frame(),
                    to_engine: AffineMap::identity(),
                    chain: chain.clone(),
                    tag: CaseTag::A1Power,
                    band_level: j,
                    sigma: base,
                    l_level: 0,
                    min_n: (1, 1),
                    clip: None,
                    exclude: None,
                },
            )?;
            y0 = y1;
            j += 1;
        }
        return Ok(());
    }
    let r0 = Rect::new(1.0, x_hi, 0.0, base.min(c));
    sink.emit(
        frame,
        Cell {
            local: r0.to_parallelogram().frame(),
            to_engine: AffineMap::identity(),
            chain,
            tag: CaseTag::A1,
            band_level: 0,
            sigma: base,
            l_level: 0,
            min_n: (1, 1),
            clip: None,
            exclude: None,
        },
    )?;
    let mut j = 1u32;
    loop {
        let sigma = 2f64.powi(j as i32 - 1) * base;
        if sigma >= c {
            break;
        }
        let top = (2.0 * sigma).min(c) / sigma;
        let model = [AffineMap::diagonal(1.0, sigma)];
        let delta_model = d * sigma.powi(-(k as i32));
        sink.tile(frame, &model, &Rect::new(1.0, x_hi, 1.0, top), delta_model, CaseTag::A1, j, sigma, None)?;
        j += 1;
    }
    Ok(())
}

/// Exact band phases and their shear coefficients, keyed by the band
/// offset y0 + b.
pub(crate) struct ShearCache {
    phi: BivariatePoly,
    l: u32,
    cache: RefCell<BTreeMap<BigRational, Result<UniPoly, String>>>,
}

impl ShearCache {
    pub fn new(phi: BivariatePoly, l: u32) -> Self {
        ShearCache { phi, l, cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn get(&self, y0: &BigRational) -> Result<UniPoly, EngineError> {
        if let Some(r) = self.cache.borrow().get(y0) {
            return r.clone().map_err(|e| EngineError::construction("A2 family membership", e));
        }
        let tau = rescaled_band_phase(&self.phi, &rat(1, 1), y0);
        let res = FamilyOrders::of(&tau)
            .admits(self.l)
            .and_then(|_| taylor_shear_coefficient(&tau, self.l).map_err(|e| e.to_string()));
        self.cache.borrow_mut().insert(y0.clone(), res.clone());
        res.map_err(|e| EngineError::construction("A2 family membership", format!("band offset {y0}: {e}")))
    }
}

pub(crate) fn run_a2(frame: &Frame, sink: &mut Sink, spec: &AxisSpec, shears: &ShearCache) -> Result<(), EngineError> {
    let AxisSpec { k, c, x_hi } = *spec;
    let l = k + 2;
    let base = frame.delta.powf(1.0 / l as f64);
    a2_band(frame, sink, spec, shears, 0, base, (c / base).min(1.0), 0)?;
    let mut j = 1u32;
    loop {
        let sigma = 2f64.powi(j as i32 - 1) * base;
        if sigma >= c {
            break;
        }
        a2_band(frame, sink, spec, shears, 1, sigma, ((c - sigma) / sigma).min(1.0), j)?;
        j += 1;
    }
    let _ = x_hi;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn a2_band(
    frame: &Frame,
    sink: &mut Sink,
    spec: &AxisSpec,
    shears: &ShearCache,
    y0: i64,
    sigma: f64,
    height: f64,
    band: u32,
) -> Result<(), EngineError> {
    let l = spec.k + 2;
    let band_to_engine = AffineMap::new([[1.0, 0.0], [0.0, sigma]], [1.0, sigma * y0 as f64]);
    let y0r = rat(y0, 1);
    let top = |b: &BigRational| shears.get(&(&y0r + b));
    let d = Decoupler {
        hess: &frame.hess,
        band_to_engine,
        sigma,
        max_depth: frame.cfg.max_recursion,
        m_bound: frame.cfg.m_bound,
        top: Some(&top),
        flat_target: Some(frame.target),
    };
    let mut stats = DecoupleStats::default();
    let leaves = d.run(l, Rect::new(0.0, spec.x_hi - 1.0, 0.0, height), &mut stats)?;
    sink.max_abs_mu = sink.max_abs_mu.max(stats.max_abs_mu);
    sink.mu_poly_bound = sink.mu_poly_bound.max(stats.max_mu_poly_bound);
    for leaf in leaves {
        sink.max_depth = sink.max_depth.max(leaf.depth);
        let (_, local) = leaf.cell();
        let mut model = leaf.maps.clone();
        model.push(band_to_engine);
        sink.emit(
            frame,
            Cell {
                local,
                to_engine: band_to_engine.compose(&leaf.to_band),
                chain: frame.chain(&model),
                tag: CaseTag::A2,
                band_level: band,
                sigma,
                l_level: leaf.depth,
                min_n: (1, 1),
                clip: None,
                exclude: None,
            },
        )?;
    }
    Ok(())
}

fn standalone(
    phi: &BivariatePoly,
    delta: f64,
    c_phi: f64,
    cfg: &EngineConfig,
    run: impl FnOnce(&Frame, &mut Sink, &AxisSpec) -> Result<(), EngineError>,
    k: u32,
) -> Result<Vec<PartitionPiece>, EngineError> {
    let frame = Frame::new(cfg, phi.clone(), Vec::new(), delta, 0);
    let mut sink = Sink::new(cfg.max_pieces, None);
    run(&frame, &mut sink, &AxisSpec { k, c: c_phi, x_hi: 2.0 })?;
    Ok(sink.pieces)
}

/// Pieces covering [1,2] x [0, c_phi] for phi divisible by y^k, k >= 2.
pub fn decompose_axis_a1(phi: &BivariatePoly, delta: f64, k: u32, c_phi: f64, cfg: &EngineConfig) -> Result<Vec<PartitionPiece>, EngineError> {
    if k < 2 || phi.min_y_exponent() < k {
        return Err(EngineError::construction("A1 precondition", format!("y^{k} does not divide phi")));
    }
    let cof = phi.shift_down(0, k);
    let power = cof.is_constant();
    if !power {
        let s0 = crate::polyalg::classify::axis_cofactor(&hessian_determinant(phi)).1;
        for i in 0..=16 {
            let x = 1.0 + i as f64 / 16.0;
            if s0.eval_f64(x, 0.0) == 0.0 {
                return Err(EngineError::construction("A1 cofactor", format!("S(x,0) vanishes at x = {x}")));
            }
        }
    }
    standalone(phi, delta, c_phi, cfg, |f, s, spec| run_a1(f, s, spec, power), k)
}

/// Pieces covering [1,2] x [0, c_phi] for phi = C x^m + y P with y^k the
/// exact power of y in det D^2 phi.
pub fn decompose_axis_a2(phi: &BivariatePoly, delta: f64, k: u32, c_phi: f64, cfg: &EngineConfig) -> Result<Vec<PartitionPiece>, EngineError> {
    if k < 1 {
        return Err(EngineError::construction("A2 precondition", "k must be at least 1"));
    }
    let shears = ShearCache::new(phi.clone(), k + 2);
    standalone(phi, delta, c_phi, cfg, |f, s, spec| run_a2(f, s, spec, &shears), k)
}

/// Decay of max_y |psi_xy(0, y)| with sigma for the sheared band phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearDecay {
    pub l: u32,
    pub sigmas: Vec<f64>,
    pub maxima: Vec<f64>,
    pub slope: f64,
}

/// For the band phase tau = phi(1 + x, sigma (1 + y)) - linear terms and
/// its Taylor shear psi = tau(x - mu y, y), evaluates max over y in [0,1]
/// of |psi_xy(0, y)| at each sigma and fits the log-log slope.
pub fn shear_decay_profile(phi: &BivariatePoly, l: u32, sigmas: &[f64]) -> Result<ShearDecay, EngineError> {
    let tau = rescaled_band_phase(phi, &rat(1, 1), &rat(1, 1));
    FamilyOrders::of(&tau)
        .admits(l)
        .map_err(|e| EngineError::construction("A2 family membership", e))?;
    let mu = taylor_shear_coefficient(&tau, l)?;
    let psi: ParametricPoly = shear(&tau, &mu);
    let cross: Vec<(u32, Vec<f64>)> = psi
        .terms()
        .iter()
        .filter(|(&(a, b), _)| a == 1 && b >= 1)
        .map(|(&(_, b), c)| (b, c.coeffs().iter().map(rat_to_f64).collect()))
        .collect();
    let mut maxima = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let w = sigma.sqrt();
        // coefficient of y^(b-1) in psi_xy(0, y), summed term by term
        let coeffs: Vec<(u32, f64)> = cross
            .iter()
            .map(|(b, cs)| (*b, *b as f64 * cs.iter().enumerate().map(|(i, c)| c * w.powi(i as i32)).sum::<f64>()))
            .collect();
        let mut m = 0.0f64;
        for i in 0..=200 {
            let y = i as f64 / 200.0;
            let v: f64 = coeffs.iter().map(|(b, c)| c * y.powi(*b as i32 - 1)).sum();
            m = m.max(v.abs());
        }
        maxima.push(m);
    }
    let xs: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = maxima.iter().map(|m| m.max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ShearDecay { l, sigmas: sigmas.to_vec(), maxima, slope: sxy / sxx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn a1_band_dims() {
        // y^2 (x^2 + y) at delta = 2^-12, band sigma = 2^-4
        let phi = parse_poly("x^2*y^2+y^3").unwrap();
        let delta = 2f64.powi(-12);
        let pieces = decompose_axis_a1(&phi, delta, 2, 0.25, &EngineConfig::default()).unwrap();
        let sigma = 2f64.powi(-4);
        let band: Vec<_> = pieces.iter().filter(|p| p.sigma == sigma && p.band_level == 3).collect();
        assert!(!band.is_empty());
        let side = (delta / (sigma * sigma)).sqrt();
        for p in &band {
            // model frame: diag(1, sigma) rescaling of cells of side at most delta_m^(1/2)
            assert!(p.shape.area() <= sigma * side * side * (1.0 + 1e-9));
            let e2 = p.local.apply_linear([0.0, 1.0]);
            assert!(e2[1] <= side * (1.0 + 1e-9));
        }
        let r0: Vec<_> = pieces.iter().filter(|p| p.band_level == 0).collect();
        assert_eq!(r0.len(), 1);
        assert!((r0[0].shape.bbox().height() - delta.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn a1_power_count() {
        let delta = 2f64.powi(-10);
        let pieces = decompose_axis_a1(&parse_poly("y^2").unwrap(), delta, 2, 0.25, &EngineConfig::default()).unwrap();
        assert!(pieces.iter().all(|p| p.case_tag == CaseTag::A1Power));
        // endpoints j delta^(1/2) up to 1/4
        assert_eq!(pieces.len(), 8);
    }

    #[test]
    fn a2_model_runs() {
        let phi = parse_poly("x^4+6*x^2*y+6*y^2").unwrap();
        let pieces = decompose_axis_a2(&phi, 2f64.powi(-10), 1, 0.25, &EngineConfig::default()).unwrap();
        assert!(pieces.iter().any(|p| p.l_level == 3));
        assert!(pieces.iter().all(|p| p.chain_residual() < 1e-10));
    }
}
