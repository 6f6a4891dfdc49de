//! The full construction: a flat core, dyadic radial levels rescaled to the
//! fixed annulus box(2) \ (-1,1)^2, and on the annulus one engine per
//! degenerate component in each quadrant plus a nondegenerate tiling of
//! the rest.

use super::axis::{run_a1, run_a2, AxisSpec, ShearCache};
use super::curve::{curve_order_estimates, run_b1, run_b2, simple_curve_estimates, CurveSpec};
use super::cylinder::cylinder_partition;
use super::{sort_pieces, stats_for, CaseTag, EngineConfig, Frame, Partition, PartitionPiece, Sink, UNIT_BOX};
use crate::error::{AlgebraError, EngineError};
use crate::geometry::{flatness, AffineMap, Curve, Parallelogram, Phase, Rect};
use crate::polyalg::classify::axis_cofactor;
use crate::polyalg::factor::{curve_order, default_root_width, lattice_form, real_roots};
use crate::polyalg::{convexity_tag, detect_mixed_homogeneity, hessian_determinant, BivariatePoly, ConvexityTag, FloatPoly, MixedHomogeneity};

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    /// y^k divides phi; `power` when phi is a multiple of y^k.
    AxisA1 { k: u32, power: bool },
    /// y^k is the exact power of y in the determinant, y^2 does not divide phi.
    AxisA2 { k: u32 },
    /// Curve factor of order k >= 2 in phi.
    CurveB1 { lambda: f64, k: u32 },
    /// Curve factor at most simple in phi, of order k in the determinant.
    CurveB2 { lambda: f64, k: u32 },
}

impl Component {
    pub fn tag(&self) -> CaseTag {
        match self {
            Component::AxisA1 { power: true, .. } => CaseTag::A1Power,
            Component::AxisA1 { .. } => CaseTag::A1,
            Component::AxisA2 { .. } => CaseTag::A2,
            Component::CurveB1 { .. } => CaseTag::B1,
            Component::CurveB2 { .. } => CaseTag::B2,
        }
    }
}

/// One degenerate component of a quadrant, in its engine frame: the
/// quadrant frame, or that frame with x and y exchanged when `swapped`.
#[derive(Clone, Debug)]
pub struct Job {
    pub component: Component,
    pub swapped: bool,
    /// Engine-frame curve, for curve components.
    pub curve: Option<Curve>,
    /// Engine-frame x-range of the neighbourhood.
    pub xa: f64,
    pub xb: f64,
}

#[derive(Clone, Debug)]
pub struct QuadrantPlan {
    pub ex: i32,
    pub ey: i32,
    /// phi(ex x, ey y).
    pub poly: BivariatePoly,
    pub jobs: Vec<Job>,
}

#[derive(Clone, Debug)]
pub struct AnnulusPlan {
    pub mh: MixedHomogeneity,
    pub c_phi: f64,
    /// Half-widths of box(2).
    pub x2: f64,
    pub y2: f64,
    pub quadrants: Vec<QuadrantPlan>,
}

const QUADRANTS: [(i32, i32); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

fn swap_rect(r: &Rect) -> Rect {
    Rect::new(r.y0, r.y1, r.x0, r.x1)
}

impl Job {
    fn engine_poly(&self, quadrant: &BivariatePoly) -> BivariatePoly {
        if self.swapped {
            quadrant.swap_xy()
        } else {
            quadrant.clone()
        }
    }

    fn to_engine(&self, p: [f64; 2]) -> [f64; 2] {
        if self.swapped {
            [p[1], p[0]]
        } else {
            p
        }
    }

    fn engine_rect(&self, r: &Rect) -> Rect {
        if self.swapped {
            swap_rect(r)
        } else {
            *r
        }
    }

    /// Whether a quadrant-frame point lies in the neighbourhood of width c.
    fn contains(&self, p: [f64; 2], c: f64) -> bool {
        let [x, y] = self.to_engine(p);
        if x < self.xa || x > self.xb {
            return false;
        }
        match &self.curve {
            None => (0.0..=c).contains(&y),
            Some(g) => (y - g.gamma(x)).abs() <= c,
        }
    }

    fn contains_rect(&self, r: &Rect, c: f64) -> bool {
        let r = self.engine_rect(r);
        if r.x0 < self.xa || r.x1 > self.xb {
            return false;
        }
        match &self.curve {
            None => r.y0 >= 0.0 && r.y1 <= c,
            Some(g) => r.y1 <= g.gamma(r.x0) + c && r.y0 >= g.gamma(r.x1) - c,
        }
    }

    /// Sample points of the neighbourhood in the quadrant frame.
    fn samples(&self, c: f64) -> Vec<[f64; 2]> {
        let (nx, ny) = if self.curve.is_some() { (65, 5) } else { (33, 5) };
        let mut out = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let x = self.xa + (self.xb - self.xa) * i as f64 / (nx - 1) as f64;
            for j in 0..ny {
                let t = j as f64 / (ny - 1) as f64;
                let p = match &self.curve {
                    None => [x, c * t],
                    Some(g) => [x, g.gamma(x) + c * (2.0 * t - 1.0)],
                };
                out.push(self.to_engine(p));
            }
        }
        out
    }
}

fn box_half_widths(mh: &MixedHomogeneity, t: f64) -> (f64, f64) {
    (t.powf(mh.r as f64 / mh.q as f64), t.powf(mh.s as f64 / mh.q as f64))
}

/// Degenerate components of phi(ex x, ey y) in the closed first quadrant
/// minus the origin.
fn plan_quadrant(phi: &BivariatePoly, mh: &MixedHomogeneity, ex: i32, ey: i32, x2: f64, y2: f64) -> Result<QuadrantPlan, EngineError> {
    let poly = phi.reflect(ex, ey);
    let det = hessian_determinant(&poly);
    let mut jobs = Vec::new();
    for swapped in [false, true] {
        let (p, d) = if swapped { (poly.swap_xy(), det.swap_xy()) } else { (poly.clone(), det.clone()) };
        let j = d.min_y_exponent();
        if j == 0 {
            continue;
        }
        let x_hi = if swapped { y2 } else { x2 };
        let k = p.min_y_exponent();
        let component = if k >= 2 {
            Component::AxisA1 { k, power: p.shift_down(0, k).is_constant() }
        } else if p.terms().keys().any(|&(_, b)| b == 0) {
            Component::AxisA2 { k: j }
        } else {
            return Err(AlgebraError::StructuralContradiction(format!(
                "degenerate axis with phi = y P, P(x, 0) constant, in quadrant ({ex}, {ey})"
            ))
            .into());
        };
        jobs.push(Job { component, swapped, curve: None, xa: 1.0, xb: x_hi });
    }
    let (_, _, h) = lattice_form(&det, mh.r, mh.s)?;
    let width = default_root_width();
    for (_, f) in h.square_free_decomposition() {
        for root in real_roots(&f, &width) {
            let lambda = root.value_f64();
            if lambda <= 0.0 {
                continue;
            }
            let kp = curve_order(&poly, &root, mh.r, mh.s)?;
            let kd = curve_order(&det, &root, mh.r, mh.s)?;
            let (curve, swapped) = Curve::new(lambda, mh.r, mh.s).convex_orientation();
            let (xe, ye) = if swapped { (y2, x2) } else { (x2, y2) };
            let component = if kp >= 2 {
                Component::CurveB1 { lambda, k: kp }
            } else {
                Component::CurveB2 { lambda, k: kd }
            };
            jobs.push(Job {
                component,
                swapped,
                curve: Some(curve),
                xa: curve.inverse(1.0).min(1.0),
                xb: curve.inverse(ye).min(xe),
            });
        }
    }
    Ok(QuadrantPlan { ex, ey, poly, jobs })
}

fn comparable(v: f64, reference: f64, sim: f64) -> bool {
    v.is_finite() && reference > 0.0 && v <= sim * reference && v * sim >= reference
}

/// The sampled estimates each engine relies on, at separation c.
fn check_job(quadrant: &BivariatePoly, job: &Job, c: f64, cfg: &EngineConfig) -> Result<(), String> {
    let poly = job.engine_poly(quadrant);
    let hess = FloatPoly::new(&poly);
    let sim = cfg.similarity;
    match &job.component {
        Component::AxisA1 { power: true, .. } => Ok(()),
        Component::AxisA1 { .. } | Component::AxisA2 { .. } => {
            let s = FloatPoly::new(&axis_cofactor(&hessian_determinant(&poly)).1);
            let a2 = matches!(job.component, Component::AxisA2 { .. });
            for i in 0..=16 {
                let x = job.xa + (job.xb - job.xa) * i as f64 / 16.0;
                let s0 = s.eval(x, 0.0).abs();
                if !(s0 > 0.0) {
                    return Err(format!("S(x, 0) vanishes at x = {x}"));
                }
                let f0 = hess.hessian(x, 0.0)[0].abs();
                for j in 1..=8 {
                    let y = c * j as f64 / 8.0;
                    if !comparable(s.eval(x, y).abs(), s0, sim) {
                        return Err(format!("|S| not ~ 1 at ({x}, {y})"));
                    }
                    if a2 && !comparable(hess.hessian(x, y)[0].abs(), f0, sim) {
                        return Err(format!("|phi_xx| not ~ 1 at ({x}, {y})"));
                    }
                }
            }
            Ok(())
        }
        Component::CurveB1 { k, .. } | Component::CurveB2 { k, .. } => {
            let spec = CurveSpec { curve: job.curve.expect("curve job"), xa: job.xa, xb: job.xb, c, k: *k };
            let (_, c_rs) = spec.constants();
            for i in 0..4 {
                let sigma = c / c_rs * 2f64.powi(-i);
                let h = sigma.sqrt();
                for x0 in [job.xa, 0.5 * (job.xa + job.xb), (job.xb - h).max(job.xa)] {
                    if matches!(job.component, Component::CurveB1 { .. }) {
                        curve_order_estimates(&hess, &spec, x0, sigma, sim)?;
                    } else {
                        simple_curve_estimates(&hess, &spec, x0, sigma, sim)?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn check_separation(quadrants: &[QuadrantPlan], c: f64, cfg: &EngineConfig) -> Result<(), String> {
    for q in quadrants {
        for (i, a) in q.jobs.iter().enumerate() {
            for (j, b) in q.jobs.iter().enumerate() {
                if i != j {
                    if let Some(p) = a.samples(c).into_iter().find(|p| b.contains(*p, c)) {
                        return Err(format!(
                            "neighbourhoods of {:?} and {:?} meet at {p:?} in quadrant ({}, {})",
                            a.component, b.component, q.ex, q.ey
                        ));
                    }
                }
            }
            check_job(&q.poly, a, c, cfg).map_err(|e| format!("{:?} in quadrant ({}, {}): {e}", a.component, q.ex, q.ey))?;
        }
    }
    Ok(())
}

/// Finds the degenerate components in each quadrant and a separation
/// constant c_phi for which their neighbourhoods are disjoint and the
/// engines' sampled estimates hold: 1/4, halved up to 20 times, or the
/// configured value.
pub fn select_separation(phi: &BivariatePoly, cfg: &EngineConfig) -> Result<AnnulusPlan, EngineError> {
    cfg.validate()?;
    let mh = detect_mixed_homogeneity(phi).ok_or(AlgebraError::NotMixedHomogeneous)?;
    let (x2, y2) = box_half_widths(&mh, 2.0);
    let quadrants = QUADRANTS
        .iter()
        .map(|&(ex, ey)| plan_quadrant(phi, &mh, ex, ey, x2, y2))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(c) = cfg.c_phi {
        check_separation(&quadrants, c, cfg).map_err(|e| EngineError::Separation(0, e))?;
        return Ok(AnnulusPlan { mh, c_phi: c, x2, y2, quadrants });
    }
    let mut c = 0.25;
    let mut last = String::new();
    for _ in 0..=20 {
        match check_separation(&quadrants, c, cfg) {
            Ok(()) => return Ok(AnnulusPlan { mh, c_phi: c, x2, y2, quadrants }),
            Err(e) => last = e,
        }
        c *= 0.5;
    }
    Err(EngineError::Separation(20, last))
}

/// Per-run state shared by the radial levels.
struct Annulus<'a> {
    plan: &'a AnnulusPlan,
    cfg: &'a EngineConfig,
    /// Exact shear data per A2 job, indexed like the quadrant jobs.
    shears: Vec<Vec<Option<ShearCache>>>,
}

impl<'a> Annulus<'a> {
    fn new(plan: &'a AnnulusPlan, cfg: &'a EngineConfig) -> Self {
        let shears = plan
            .quadrants
            .iter()
            .map(|q| {
                q.jobs
                    .iter()
                    .map(|j| match j.component {
                        Component::AxisA2 { k } => Some(ShearCache::new(j.engine_poly(&q.poly), k + 2)),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        Annulus { plan, cfg, shears }
    }

    /// Covers the annulus at scale delta; `outer` maps annulus
    /// coordinates to the final ones.
    fn run(&self, sink: &mut Sink, delta: f64, outer: &[AffineMap], level: u32) -> Result<(), EngineError> {
        let plan = self.plan;
        let c = plan.c_phi;
        for (qi, q) in plan.quadrants.iter().enumerate() {
            let reflect = AffineMap::diagonal(q.ex as f64, q.ey as f64);
            for (ji, job) in q.jobs.iter().enumerate() {
                let mut chain = Vec::with_capacity(outer.len() + 2);
                if job.swapped {
                    chain.push(AffineMap::new([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0]));
                }
                chain.push(reflect);
                chain.extend_from_slice(outer);
                let (w, h) = if job.swapped { (plan.y2, plan.x2) } else { (plan.x2, plan.y2) };
                let frame = Frame::new(self.cfg, job.engine_poly(&q.poly), chain, delta, level)
                    .with_annulus(Rect::new(-w, w, -h, h), Rect::new(-1.0, 1.0, -1.0, 1.0));
                match &job.component {
                    Component::AxisA1 { k, power } => {
                        run_a1(&frame, sink, &AxisSpec { k: *k, c, x_hi: job.xb }, *power)?;
                    }
                    Component::AxisA2 { k } => {
                        let shears = self.shears[qi][ji].as_ref().expect("shear cache for A2 job");
                        run_a2(&frame, sink, &AxisSpec { k: *k, c, x_hi: job.xb }, shears)?;
                    }
                    Component::CurveB1 { k, .. } | Component::CurveB2 { k, .. } => {
                        let spec = CurveSpec { curve: job.curve.expect("curve job"), xa: job.xa, xb: job.xb, c, k: *k };
                        if matches!(job.component, Component::CurveB1 { .. }) {
                            run_b1(&frame, sink, &spec)?;
                        } else {
                            run_b2(&frame, sink, &spec)?;
                        }
                    }
                }
            }
            let mut chain = vec![reflect];
            chain.extend_from_slice(outer);
            let frame = Frame::new(self.cfg, q.poly.clone(), chain, delta, level);
            let exclude = |p: &Parallelogram| q.jobs.iter().any(|j| j.contains_rect(&p.bbox(), c));
            for region in [Rect::new(1.0, plan.x2, 0.0, plan.y2), Rect::new(0.0, 1.0, 1.0, plan.y2)] {
                sink.tile(&frame, &[], &region, delta, CaseTag::Nondeg, 0, 1.0, Some(&exclude))?;
            }
        }
        Ok(())
    }
}

/// Pieces covering the annulus box(2) \ (-1,1)^2 at scale delta, in
/// annulus coordinates.
pub fn decompose_annulus(phi: &BivariatePoly, delta: f64, cfg: &EngineConfig) -> Result<Vec<PartitionPiece>, EngineError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(EngineError::DeltaOutOfRange(delta));
    }
    let plan = select_separation(phi, cfg)?;
    let mut sink = Sink::new(cfg.max_pieces, None);
    Annulus::new(&plan, cfg).run(&mut sink, delta, &[], 1)?;
    sort_pieces(&mut sink.pieces);
    Ok(sink.pieces)
}

/// A delta-flat partition of [-1,1]^2 for a mixed-homogeneous phase.
pub fn decompose(phi: &BivariatePoly, delta: f64, cfg: &EngineConfig) -> Result<Partition, EngineError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(EngineError::DeltaOutOfRange(delta));
    }
    cfg.validate()?;
    let mh = detect_mixed_homogeneity(phi).ok_or(AlgebraError::NotMixedHomogeneous)?;
    let l2_applicable = convexity_tag(phi) == ConvexityTag::Convex;
    if hessian_determinant(phi).is_zero() {
        let pieces = cylinder_partition(phi, delta, cfg)?;
        let mut stats = stats_for(&pieces);
        stats.m_bound = cfg.m_bound;
        return Ok(Partition { phi: phi.clone(), delta, mh, pieces, l2_applicable, stats });
    }
    let plan = select_separation(phi, cfg)?;

    // core box(delta_c) with delta_c = delta 2^-m small enough to be flat
    let d1 = flatness(&Phase::new(phi), &UNIT_BOX.to_parallelogram(), 1.0, 17).sup_deviation;
    let mut m = 0u32;
    while 2f64.powi(-(m as i32)) * 1.5 * d1 > cfg.target_ratio() {
        m += 1;
    }
    let delta_c = delta * 2f64.powi(-(m as i32));
    let dilation = |t: f64| {
        let (a, b) = box_half_widths(&mh, t);
        AffineMap::diagonal(a, b)
    };
    let mut sink = Sink::new(cfg.max_pieces, Some(UNIT_BOX));
    let core = dilation(delta_c);
    let unit = UNIT_BOX.to_parallelogram();
    sink.push(PartitionPiece {
        shape: unit.map(&core),
        case_tag: CaseTag::FlatCore,
        radial_level: 0,
        band_level: 0,
        sigma: delta_c,
        l_level: 0,
        local: unit.frame(),
        chain: std::sync::Arc::new(vec![core]),
    })?;

    let annulus = Annulus::new(&plan, cfg);
    let mut j = 1u32;
    loop {
        let scale = 2f64.powi(j as i32 - 1) * delta_c;
        annulus.run(&mut sink, delta / scale, &[dilation(scale)], j)?;
        if 2.0 * scale >= 1.0 {
            break;
        }
        j += 1;
    }

    let Sink { mut pieces, max_abs_mu, mu_poly_bound, max_depth, .. } = sink;
    sort_pieces(&mut pieces);
    let mut stats = stats_for(&pieces);
    stats.radial_levels = j;
    stats.core_shrink = m;
    stats.c_phi = plan.c_phi;
    stats.m_bound = (1.0 + mu_poly_bound).max(100.0);
    stats.max_abs_mu = max_abs_mu;
    stats.max_recursion_depth = max_depth;
    Ok(Partition { phi: phi.clone(), delta, mh, pieces, l2_applicable, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn plans() {
        let cfg = EngineConfig::default();
        let p = select_separation(&parse_poly("x^2+y^2").unwrap(), &cfg).unwrap();
        assert!(p.quadrants.iter().all(|q| q.jobs.is_empty()));
        assert_eq!(p.c_phi, 0.25);
        let p = select_separation(&parse_poly("x^4+6*x^2*y+6*y^2").unwrap(), &cfg).unwrap();
        let comps: Vec<_> = p.quadrants.iter().map(|q| q.jobs.len()).collect();
        assert_eq!(comps, vec![1, 1, 1, 1]);
        assert!(p.quadrants.iter().all(|q| q.jobs[0].component == Component::AxisA2 { k: 1 }));
        let p = select_separation(&parse_poly("x^2*y^2+y^3").unwrap(), &cfg).unwrap();
        let upper: Vec<_> = p.quadrants[0].jobs.iter().map(|j| j.component.tag()).collect();
        assert_eq!(upper, vec![CaseTag::A1, CaseTag::B2]);
    }

    #[test]
    fn paraboloid_levels() {
        let phi = parse_poly("x^2+y^2").unwrap();
        let p = decompose(&phi, 2f64.powi(-6), &EngineConfig::default()).unwrap();
        assert!(p.l2_applicable);
        assert_eq!(p.pieces[0].case_tag, CaseTag::FlatCore);
        assert!(p.pieces[1..].iter().all(|q| q.case_tag == CaseTag::Nondeg));
        assert!(p.pieces.iter().all(|q| q.chain_residual() < 1e-10));
    }
}
