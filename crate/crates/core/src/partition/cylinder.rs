//! Phases with identically vanishing Hessian determinant: phi depends on a
//! single linear form n.(x, y), so [-1,1]^2 is cut into strips across n.

use std::sync::Arc;

use super::{CaseTag, Cell, EngineConfig, Frame, PartitionPiece, Sink, UNIT_BOX};
use crate::error::EngineError;
use crate::geometry::{AffineMap, Parallelogram, Vec2};
use crate::polyalg::{BivariatePoly, FloatPoly};

/// Unit normal of the level lines, from the Hessian at the sample point
/// where it is largest; `None` when the Hessian vanishes on the grid.
fn normal_direction(hess: &FloatPoly) -> Option<Vec2> {
    let mut best = (0.0, [0.0; 3]);
    for i in 0..=16 {
        for j in 0..=16 {
            let h = hess.hessian(-1.0 + i as f64 / 8.0, -1.0 + j as f64 / 8.0);
            let f = h[0] * h[0] + 2.0 * h[1] * h[1] + h[2] * h[2];
            if f > best.0 {
                best = (f, h);
            }
        }
    }
    if best.0 == 0.0 {
        return None;
    }
    let [a, b, d] = best.1;
    // eigenvector of the nonzero eigenvalue of a rank-one matrix
    let v = if a.abs() >= d.abs() { [a, b] } else { [b, d] };
    let n = v[0].hypot(v[1]);
    Some([v[0] / n, v[1] / n])
}

/// Greedy maximal intervals of [t0, t1] on which
/// 1/2 max |psi''| w^2 <= target, with psi'' sampled on 33 points.
pub fn flat_intervals(psi2: &dyn Fn(f64) -> f64, t0: f64, t1: f64, target: f64) -> Vec<(f64, f64)> {
    let bound = |a: f64, b: f64| {
        let mut m = 0.0f64;
        let mut prev = psi2(a);
        for i in 0..=32 {
            let v = psi2(a + (b - a) * i as f64 / 32.0);
            m = m.max(v.abs()).max((v - prev).abs() + v.abs());
            prev = v;
        }
        0.5 * m * (b - a) * (b - a)
    };
    let mut out = Vec::new();
    let mut a = t0;
    while a < t1 {
        if bound(a, t1) <= target {
            out.push((a, t1));
            break;
        }
        let (mut lo, mut hi) = (0.0, t1 - a);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bound(a, a + mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = a + lo.max(1e-12 * (t1 - t0));
        out.push((a, b));
        a = b;
    }
    out
}

/// Strips covering [-1,1]^2 for a phase whose Hessian determinant vanishes
/// identically. A linear phase gives the box itself.
pub fn cylinder_partition(phi: &BivariatePoly, delta: f64, cfg: &EngineConfig) -> Result<Vec<PartitionPiece>, EngineError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(EngineError::DeltaOutOfRange(delta));
    }
    let frame = Frame::new(cfg, phi.clone(), Vec::new(), delta, 0);
    let mut sink = Sink::new(cfg.max_pieces, Some(UNIT_BOX));
    let Some(n) = normal_direction(&frame.hess) else {
        sink.push(PartitionPiece {
            shape: UNIT_BOX.to_parallelogram(),
            case_tag: CaseTag::Cylinder,
            radial_level: 0,
            band_level: 0,
            sigma: 1.0,
            l_level: 0,
            local: UNIT_BOX.to_parallelogram().frame(),
            chain: Arc::new(Vec::new()),
        })?;
        return Ok(sink.pieces);
    };
    let m = [-n[1], n[0]];
    let reach = |v: Vec2| v[0].abs() + v[1].abs();
    let (tn, tm) = (reach(n), reach(m));
    let psi2 = |t: f64| {
        let h = frame.hess.hessian(t * n[0], t * n[1]);
        n[0] * (h[0] * n[0] + h[1] * n[1]) + n[1] * (h[1] * n[0] + h[2] * n[1])
    };
    let chain = frame.chain(&[]);
    for (band, (a, b)) in flat_intervals(&psi2, -tn, tn, frame.target).into_iter().enumerate() {
        let p = Parallelogram {
            origin: [a * n[0] - tm * m[0], a * n[1] - tm * m[1]],
            edge1: [(b - a) * n[0], (b - a) * n[1]],
            edge2: [2.0 * tm * m[0], 2.0 * tm * m[1]],
        };
        sink.emit(
            &frame,
            Cell {
                local: p.frame(),
                to_engine: AffineMap::identity(),
                chain: chain.clone(),
                tag: CaseTag::Cylinder,
                band_level: band as u32,
                sigma: b - a,
                l_level: 0,
                min_n: (1, 1),
                clip: Some(UNIT_BOX),
                exclude: None,
            },
        )?;
    }
    Ok(sink.pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn linear_phase_is_one_piece() {
        let pieces = cylinder_partition(&parse_poly("3*x - y").unwrap(), 0.01, &EngineConfig::default()).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].shape.area(), 4.0);
    }

    #[test]
    fn square_of_linear_form() {
        let delta = 2f64.powi(-10);
        let pieces = cylinder_partition(&parse_poly("x^2+2*x*y+y^2").unwrap(), delta, &EngineConfig::default()).unwrap();
        assert!(pieces.len() > 1);
        assert!(pieces.iter().all(|p| p.case_tag == CaseTag::Cylinder && p.chain_residual() < 1e-12));
        // strips run along (1, -1)
        let e = pieces[0].shape.edge2;
        assert!((e[0] + e[1]).abs() < 1e-12);
    }

    #[test]
    fn intervals_cover() {
        let iv = flat_intervals(&|t: f64| 12.0 * t * t, -1.0, 1.0, 1e-3);
        assert_eq!(iv.first().unwrap().0, -1.0);
        assert_eq!(iv.last().unwrap().1, 1.0);
        assert!(iv.windows(2).all(|w| w[0].1 == w[1].0));
    }
}
