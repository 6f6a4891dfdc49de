//! Neighbourhoods of a convex curve y = gamma(x): geometric bands in the
//! vertical offset, sheared strips of width sigma^(1/2), and either direct
//! refinement (curve factor of order >= 2 in phi) or cylindrical
//! decoupling in base sigma^(1/2) (curve factor only in the determinant).

use super::cylindrical::{DecoupleStats, Decoupler};
use super::{CaseTag, Cell, EngineConfig, Frame, PartitionPiece, Sink};
use crate::error::EngineError;
use crate::geometry::{curved_cell_cover, AffineMap, Curve, Parallelogram, Rect};
use crate::polyalg::{detect_mixed_homogeneity, BivariatePoly, FloatPoly};

#[derive(Clone, Copy, Debug)]
pub(crate) struct CurveSpec {
    pub curve: Curve,
    pub xa: f64,
    pub xb: f64,
    pub c: f64,
    /// Order of the curve factor in phi (B1) or in the determinant (B2).
    pub k: u32,
}

impl CurveSpec {
    /// (sup gamma'' over the strips, C_rs).
    pub fn constants(&self) -> (f64, f64) {
        let g = self.curve.sup_d2(self.xa, self.xb + 0.5).max(0.0);
        (g, g + 1.0)
    }

    fn strips(&self, h: f64) -> usize {
        (((self.xb - self.xa) / h) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Band strips are this fraction of sigma^(1/2) wide, which keeps the curve
/// close to its tangent and the bands thin.
const BAND_STRIP: f64 = 0.5;

/// Covers offsets [C sigma, (C+1) sigma] above the curve (side = 1), or
/// [-(C+1) sigma, -C sigma] below it (side = -1), over one band strip
/// starting at x0. With gamma'' <= C - 1 the curve leaves its tangent by at
/// most (C-1) h^2 / 2, which fixes the height.
pub(crate) fn band_cell(curve: &Curve, x0: f64, sigma: f64, c_rs: f64, side: i32) -> Parallelogram {
    let h = BAND_STRIP * sigma.sqrt();
    let height = sigma + 0.5 * (c_rs - 1.0) * h * h;
    let y0 = if side > 0 { curve.gamma(x0) + c_rs * sigma } else { curve.gamma(x0) - (c_rs + 1.0) * sigma };
    Parallelogram { origin: [x0, y0], edge1: [0.0, height], edge2: [h, curve.d_gamma(x0) * h] }
}

fn tangent_second(h: &[f64; 3], g1: f64) -> f64 {
    h[0] + 2.0 * g1 * h[1] + g1 * g1 * h[2]
}

fn within(v: f64, reference: f64, sim: f64) -> bool {
    v.is_finite() && reference > 0.0 && v <= sim * reference && v * sim >= reference
}

/// Sampled estimates on the sheared band at scale sigma, compared with the
/// same normalised quantities at scale 2^-10 sigma:
/// |phi_yy| ~ sigma^(k-2), |det| ~ sigma^(2k-3), |phi_tt| <~ sigma^(k-1).
pub(crate) fn curve_order_estimates(hess: &FloatPoly, spec: &CurveSpec, x0: f64, sigma: f64, sim: f64) -> Result<(), String> {
    let (_, c_rs) = spec.constants();
    let k = spec.k as i32;
    let g1 = spec.curve.d_gamma(x0);
    let sample = |s: f64, side: i32| {
        let p = band_cell(&spec.curve, x0, s, c_rs, side);
        let mut out = Vec::with_capacity(9);
        for u in [0.0, 0.5, 1.0] {
            for v in [0.0, 0.5, 1.0] {
                let q = p.point(u, v);
                let h = hess.hessian(q[0], q[1]);
                out.push((
                    h[2].abs() / s.powi(k - 2),
                    (h[0] * h[2] - h[1] * h[1]).abs() / s.powi(2 * k - 3),
                    tangent_second(&h, g1).abs() / s.powi(k - 1),
                ));
            }
        }
        out
    };
    for side in [1, -1] {
        let at = sample(sigma, side);
        let reference = sample(sigma * 2f64.powi(-10), side);
        for (i, (a, r)) in at.iter().zip(&reference).enumerate() {
            if !within(a.0, r.0, sim) {
                return Err(format!("|psi_yy| not ~ sigma^(k-2) at x0 = {x0}, sigma = {sigma:e}, sample {i}"));
            }
            if !within(a.1, r.1, sim) {
                return Err(format!("|det| not ~ sigma^(2k-3) at x0 = {x0}, sigma = {sigma:e}, sample {i}"));
            }
            if a.2 > sim * r.2.max(r.0) {
                return Err(format!("|psi_xx| not <~ sigma^(k-1) at x0 = {x0}, sigma = {sigma:e}, sample {i}"));
            }
        }
    }
    Ok(())
}

/// Second derivative along the tangent at the curve point over x0; it must
/// not vanish when the curve factor is simple in phi.
pub(crate) fn tangent_curvature_on_curve(hess: &FloatPoly, curve: &Curve, x0: f64) -> Result<f64, String> {
    let y0 = curve.gamma(x0);
    let h = hess.hessian(x0, y0);
    let v = tangent_second(&h, curve.d_gamma(x0));
    let scale = h[0].abs() + h[1].abs() + h[2].abs();
    if !(v.abs() > 1e-10 * scale) {
        return Err(format!("psi_xx vanishes at ({x0}, {y0}); a simple curve factor cannot have a degenerate tangent direction"));
    }
    Ok(v)
}

/// |phi_tt| on the band at scale sigma stays comparable to its value on the
/// curve, and |det| ~ sigma^k.
pub(crate) fn simple_curve_estimates(hess: &FloatPoly, spec: &CurveSpec, x0: f64, sigma: f64, sim: f64) -> Result<(), String> {
    let (_, c_rs) = spec.constants();
    let on = tangent_curvature_on_curve(hess, &spec.curve, x0)?.abs();
    let g1 = spec.curve.d_gamma(x0);
    let k = spec.k as i32;
    for side in [1, -1] {
        let p = band_cell(&spec.curve, x0, sigma, c_rs, side);
        let pr = band_cell(&spec.curve, x0, sigma * 2f64.powi(-10), c_rs, side);
        for u in [0.0, 0.5, 1.0] {
            for v in [0.0, 0.5, 1.0] {
                let q = p.point(u, v);
                let h = hess.hessian(q[0], q[1]);
                if !within(tangent_second(&h, g1).abs(), on, sim) {
                    return Err(format!("|psi_xx| not ~ 1 at {q:?}, sigma = {sigma:e}"));
                }
                let qr = pr.point(u, v);
                let hr = hess.hessian(qr[0], qr[1]);
                let d = (h[0] * h[2] - h[1] * h[1]).abs() / sigma.powi(k);
                let dr = (hr[0] * hr[2] - hr[1] * hr[1]).abs() / (sigma * 2f64.powi(-10)).powi(k);
                if !within(d, dr, sim) {
                    return Err(format!("|det| not ~ sigma^k at {q:?}, sigma = {sigma:e}"));
                }
            }
        }
    }
    Ok(())
}

fn emit_plain(frame: &Frame, sink: &mut Sink, p: Parallelogram, tag: CaseTag, band: u32, sigma: f64) -> Result<(), EngineError> {
    let f = p.frame();
    sink.emit(
        frame,
        Cell {
            local: AffineMap::identity(),
            to_engine: f,
            chain: frame.chain(&[f]),
            tag,
            band_level: band,
            sigma,
            l_level: 0,
            min_n: (1, 1),
            clip: None,
            exclude: None,
        },
    )
}

pub(crate) fn run_b1(frame: &Frame, sink: &mut Sink, spec: &CurveSpec) -> Result<(), EngineError> {
    let (g, c_rs) = spec.constants();
    let c_dya = 1.0 + 1.0 / c_rs;
    let k = spec.k;
    let base = frame.delta.powf(1.0 / k as f64);
    let t0 = base.min(spec.c);
    let h0 = (BAND_STRIP * base.sqrt()).min(spec.xb - spec.xa);
    for i in 0..spec.strips(h0) {
        let x0 = spec.xa + i as f64 * h0;
        for (lo, hi) in [(0.0, t0), (-t0, 0.0)] {
            let p = curved_cell_cover(&spec.curve, x0, h0, lo, hi, g);
            emit_plain(frame, sink, p, CaseTag::B1, 0, base)?;
        }
    }
    let mut j = 1u32;
    loop {
        let lower = c_dya.powi(j as i32 - 1) * base;
        if lower >= spec.c {
            break;
        }
        let sigma = lower / c_rs;
        let h = BAND_STRIP * sigma.sqrt();
        for i in 0..spec.strips(h) {
            let x0 = spec.xa + i as f64 * h;
            if i == 0 && frame.cfg.verify_inline {
                curve_order_estimates(&frame.hess, spec, x0, sigma, frame.cfg.similarity)
                    .map_err(|e| EngineError::construction("curve order estimate", e))?;
            }
            for side in [1, -1] {
                emit_plain(frame, sink, band_cell(&spec.curve, x0, sigma, c_rs, side), CaseTag::B1, j, sigma)?;
            }
        }
        j += 1;
    }
    Ok(())
}

fn decoupled_cell(frame: &Frame, sink: &mut Sink, p: Parallelogram, l: u32, param: f64, band: u32, sigma: f64) -> Result<(), EngineError> {
    let f = p.frame();
    let d = Decoupler {
        hess: &frame.hess,
        band_to_engine: f,
        sigma: param,
        max_depth: frame.cfg.max_recursion,
        m_bound: frame.cfg.m_bound,
        top: None,
        flat_target: Some(frame.target),
    };
    let mut stats = DecoupleStats::default();
    let leaves = match d.run(l, Rect::new(0.0, 1.0, 0.0, 1.0), &mut stats) {
        Ok(leaves) => leaves,
        // large cells at coarse scales can reach points where the shear
        // blows up; those are tiled directly
        Err(EngineError::ShearBound { .. }) => return emit_plain(frame, sink, p, CaseTag::B2, band, sigma),
        Err(e) => return Err(e),
    };
    sink.max_abs_mu = sink.max_abs_mu.max(stats.max_abs_mu);
    for leaf in leaves {
        sink.max_depth = sink.max_depth.max(leaf.depth);
        let (_, local) = leaf.cell();
        let mut model = leaf.maps.clone();
        model.push(f);
        sink.emit(
            frame,
            Cell {
                local,
                to_engine: f.compose(&leaf.to_band),
                chain: frame.chain(&model),
                tag: CaseTag::B2,
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

pub(crate) fn run_b2(frame: &Frame, sink: &mut Sink, spec: &CurveSpec) -> Result<(), EngineError> {
    let (g, c_rs) = spec.constants();
    let c_dya = 1.0 + 1.0 / c_rs;
    let k = spec.k;
    let l = 2 * k + 2;
    let base = frame.delta.powf(1.0 / (k + 2) as f64);
    let t0 = base.min(spec.c);
    let h0 = (BAND_STRIP * base.sqrt()).min(spec.xb - spec.xa);
    for i in 0..spec.strips(h0) {
        let x0 = spec.xa + i as f64 * h0;
        tangent_curvature_on_curve(&frame.hess, &spec.curve, x0).map_err(|e| EngineError::construction("simple curve estimate", e))?;
        for (lo, hi) in [(0.0, t0), (-t0, 0.0)] {
            let p = curved_cell_cover(&spec.curve, x0, h0, lo, hi, g);
            decoupled_cell(frame, sink, p, l, base.sqrt(), 0, base)?;
        }
    }
    let mut j = 1u32;
    loop {
        let lower = c_dya.powi(j as i32 - 1) * base;
        if lower >= spec.c {
            break;
        }
        let sigma = lower / c_rs;
        let h = BAND_STRIP * sigma.sqrt();
        for i in 0..spec.strips(h) {
            let x0 = spec.xa + i as f64 * h;
            tangent_curvature_on_curve(&frame.hess, &spec.curve, x0).map_err(|e| EngineError::construction("simple curve estimate", e))?;
            if i == 0 && frame.cfg.verify_inline {
                simple_curve_estimates(&frame.hess, spec, x0, sigma, frame.cfg.similarity)
                    .map_err(|e| EngineError::construction("simple curve estimate", e))?;
            }
            for side in [1, -1] {
                decoupled_cell(frame, sink, band_cell(&spec.curve, x0, sigma, c_rs, side), l, sigma.sqrt(), j, sigma)?;
            }
        }
        j += 1;
    }
    Ok(())
}

fn curve_frame(phi: &BivariatePoly, lambda: f64) -> Result<(BivariatePoly, Curve, Vec<AffineMap>), EngineError> {
    let mh = detect_mixed_homogeneity(phi).ok_or(crate::error::AlgebraError::NotMixedHomogeneous)?;
    if lambda <= 0.0 {
        return Err(EngineError::construction("curve precondition", "lambda must be positive"));
    }
    let (curve, swapped) = Curve::new(lambda, mh.r, mh.s).convex_orientation();
    if swapped {
        Ok((phi.swap_xy(), curve, vec![AffineMap::new([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0])]))
    } else {
        Ok((phi.clone(), curve, Vec::new()))
    }
}

/// Pieces covering {x in [1, 2], |y - gamma(x)| <= c_phi} around the curve
/// x^s = lambda y^r when its factor has order k >= 2 in phi. Concave
/// curves are handled with the coordinates exchanged.
pub fn decompose_curve_b1(
    phi: &BivariatePoly,
    lambda: f64,
    delta: f64,
    k: u32,
    c_phi: f64,
    cfg: &EngineConfig,
) -> Result<Vec<PartitionPiece>, EngineError> {
    if k < 2 {
        return Err(EngineError::construction("B1 precondition", "k must be at least 2"));
    }
    let (poly, curve, outer) = curve_frame(phi, lambda)?;
    let frame = Frame::new(cfg, poly, outer, delta, 0);
    let mut sink = Sink::new(cfg.max_pieces, None);
    run_b1(&frame, &mut sink, &CurveSpec { curve, xa: 1.0, xb: 2.0, c: c_phi, k })?;
    Ok(sink.pieces)
}

/// As [`decompose_curve_b1`] for a curve whose factor divides the Hessian
/// determinant exactly k times but divides phi at most once.
pub fn decompose_curve_b2(
    phi: &BivariatePoly,
    lambda: f64,
    delta: f64,
    k: u32,
    c_phi: f64,
    cfg: &EngineConfig,
) -> Result<Vec<PartitionPiece>, EngineError> {
    if k < 1 {
        return Err(EngineError::construction("B2 precondition", "k must be at least 1"));
    }
    let (poly, curve, outer) = curve_frame(phi, lambda)?;
    let frame = Frame::new(cfg, poly, outer, delta, 0);
    let mut sink = Sink::new(cfg.max_pieces, None);
    run_b2(&frame, &mut sink, &CurveSpec { curve, xa: 1.0, xb: 2.0, c: c_phi, k })?;
    Ok(sink.pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn parabola_constants() {
        let spec = CurveSpec { curve: Curve::new(1.0, 1, 2), xa: 1.0, xb: 1.5, c: 0.25, k: 2 };
        let (g, c) = spec.constants();
        assert_eq!((g, c), (2.0, 3.0));
    }

    #[test]
    fn squared_parabola_b1() {
        let phi = parse_poly("x^4 - 2*x^2*y + y^2").unwrap();
        let spec = CurveSpec { curve: Curve::new(1.0, 1, 2), xa: 1.0, xb: 2.0, c: 0.25, k: 2 };
        let hess = FloatPoly::new(&phi);
        for sigma in [2f64.powi(-4), 2f64.powi(-8)] {
            curve_order_estimates(&hess, &spec, 1.25, sigma, 32.0).unwrap();
        }
        let pieces = decompose_curve_b1(&phi, 1.0, 2f64.powi(-10), 2, 0.25, &EngineConfig::default()).unwrap();
        assert!(pieces.iter().any(|p| p.band_level > 3));
        assert!(pieces.iter().all(|p| p.chain_residual() < 1e-10));
    }

    #[test]
    fn simple_curve_b2() {
        // det of y^2 (x^2 + y) is 12 y^2 (y - x^2): the parabola is simple
        let phi = parse_poly("x^2*y^2+y^3").unwrap();
        let delta = 2f64.powi(-10);
        let pieces = decompose_curve_b2(&phi, 1.0, delta, 1, 1.0 / 16.0, &EngineConfig::default()).unwrap();
        assert!(pieces.iter().any(|p| p.l_level >= 1));
        assert!(pieces.iter().all(|p| p.l_level <= 4));
        let phase = crate::geometry::Phase::new(&phi);
        for p in pieces.iter().step_by(17) {
            assert!(crate::geometry::flatness(&phase, &p.shape, delta, 5).ratio <= 64.0);
        }
    }
}
