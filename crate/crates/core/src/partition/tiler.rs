//! Hessian-driven refinement of cells into flat sub-parallelograms, and the
//! nondegenerate square tiling.

use crate::geometry::{AffineMap, Parallelogram, Rect, Vec2};
use crate::polyalg::FloatPoly;

const SAMPLES: usize = 7;
const LEAF_SPLIT: u32 = 8;

/// A sub-cell in the unit coordinates of its parent cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubCell {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl SubCell {
    pub const UNIT: SubCell = SubCell { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 };

    /// The map from the unit square onto this sub-cell.
    pub fn map(&self) -> AffineMap {
        AffineMap::new([[self.u1 - self.u0, 0.0], [0.0, self.v1 - self.v0]], [self.u0, self.v0])
    }

    pub fn of(&self, p: &Parallelogram) -> Parallelogram {
        let du = self.u1 - self.u0;
        let dv = self.v1 - self.v0;
        Parallelogram {
            origin: p.point(self.u0, self.v0),
            edge1: [p.edge1[0] * du, p.edge1[1] * du],
            edge2: [p.edge2[0] * dv, p.edge2[1] * dv],
        }
    }
}

fn quad(h: &[f64; 3], a: Vec2, b: Vec2) -> f64 {
    a[0] * (h[0] * b[0] + h[1] * b[1]) + a[1] * (h[1] * b[0] + h[2] * b[1])
}

/// Sampled bounds (A, B, D) on |e1.H e1|, |e1.H e2|, |e2.H e2| over a cell,
/// each raised by the largest jump between neighbouring samples.
pub fn directional_bounds(hess: &FloatPoly, cell: &Parallelogram) -> [f64; 3] {
    let n = SAMPLES;
    let mut vals = [[[0.0f64; SAMPLES]; SAMPLES]; 3];
    for i in 0..n {
        for j in 0..n {
            let p = cell.point(i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            let h = hess.hessian(p[0], p[1]);
            vals[0][i][j] = quad(&h, cell.edge1, cell.edge1);
            vals[1][i][j] = quad(&h, cell.edge1, cell.edge2);
            vals[2][i][j] = quad(&h, cell.edge2, cell.edge2);
        }
    }
    let mut out = [0.0; 3];
    for (k, v) in vals.iter().enumerate() {
        let mut m = 0.0f64;
        let mut jump = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                m = m.max(v[i][j].abs());
                if i + 1 < n {
                    jump = jump.max((v[i + 1][j] - v[i][j]).abs());
                }
                if j + 1 < n {
                    jump = jump.max((v[i][j + 1] - v[i][j]).abs());
                }
            }
        }
        out[k] = m + jump;
    }
    out
}

/// Smallest n_u n_v with 1/2 (A/n_u^2 + 2B/(n_u n_v) + D/n_v^2) <= target.
pub fn grid_counts(bounds: [f64; 3], target: f64, min_nu: u32, min_nv: u32) -> (u32, u32) {
    let [a, b, d] = bounds;
    let t2 = 2.0 * target;
    let mut best: Option<(u64, u32, u32)> = None;
    let mut nu = min_nu.max(1);
    loop {
        if let Some((cost, _, _)) = best {
            if nu as u64 * min_nv.max(1) as u64 > cost {
                break;
            }
        }
        let fu = nu as f64;
        let rest = t2 - a / (fu * fu);
        if rest > 0.0 {
            let lin = 2.0 * b / fu;
            let z = if d > 0.0 {
                (-lin + (lin * lin + 4.0 * d * rest).sqrt()) / (2.0 * d)
            } else if lin > 0.0 {
                rest / lin
            } else {
                f64::INFINITY
            };
            let nv = ((1.0 / z).ceil().max(1.0) as u32).max(min_nv.max(1));
            let cost = nu as u64 * nv as u64;
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, nu, nv));
            }
        }
        if nu >= 1 << 24 {
            break;
        }
        nu += 1.max(nu / 64);
    }
    let (_, nu, nv) = best.expect("a fine enough grid always meets the target");
    (nu, nv)
}

/// Splits `cell` into sub-cells on which the second-order bound is at most
/// `target`. Regions failing `keep` are pruned.
pub fn refine(
    hess: &FloatPoly,
    cell: &Parallelogram,
    target: f64,
    min_n: (u32, u32),
    keep: &dyn Fn(&SubCell) -> bool,
    out: &mut Vec<SubCell>,
) {
    refine_node(hess, cell, target, SubCell::UNIT, min_n, keep, out, 0);
}

#[allow(clippy::too_many_arguments)]
fn refine_node(
    hess: &FloatPoly,
    cell: &Parallelogram,
    target: f64,
    sub: SubCell,
    min_n: (u32, u32),
    keep: &dyn Fn(&SubCell) -> bool,
    out: &mut Vec<SubCell>,
    depth: u32,
) {
    if !keep(&sub) {
        return;
    }
    let p = sub.of(cell);
    let (nu, nv) = grid_counts(directional_bounds(hess, &p), target, min_n.0, min_n.1);
    let (su, sv) = (if nu > LEAF_SPLIT { 2 } else { 1 }, if nv > LEAF_SPLIT { 2 } else { 1 });
    if (su == 1 && sv == 1) || depth > 60 {
        for i in 0..nu {
            for j in 0..nv {
                let s = SubCell {
                    u0: sub.u0 + (sub.u1 - sub.u0) * i as f64 / nu as f64,
                    u1: sub.u0 + (sub.u1 - sub.u0) * (i + 1) as f64 / nu as f64,
                    v0: sub.v0 + (sub.v1 - sub.v0) * j as f64 / nv as f64,
                    v1: sub.v0 + (sub.v1 - sub.v0) * (j + 1) as f64 / nv as f64,
                };
                if nu * nv == 1 || keep(&s) {
                    out.push(s);
                }
            }
        }
        return;
    }
    let child_min = (min_n.0.div_ceil(su), min_n.1.div_ceil(sv));
    for i in 0..su {
        for j in 0..sv {
            let s = SubCell {
                u0: sub.u0 + (sub.u1 - sub.u0) * i as f64 / su as f64,
                u1: sub.u0 + (sub.u1 - sub.u0) * (i + 1) as f64 / su as f64,
                v0: sub.v0 + (sub.v1 - sub.v0) * j as f64 / sv as f64,
                v1: sub.v0 + (sub.v1 - sub.v0) * (j + 1) as f64 / sv as f64,
            };
            refine_node(hess, cell, target, s, child_min, keep, out, depth + 1);
        }
    }
}

/// The rectangle r (model coordinates) replaced by a sheared cell in
/// which the model-frame Hessian at its centre is diagonal, enlarged to
/// contain r. The shear never exceeds the aspect ratio of r.
pub fn aligned_cell(hess: &FloatPoly, to_engine: &AffineMap, r: &Rect) -> Parallelogram {
    let l = to_engine.linear;
    let c = to_engine.apply([(r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0]);
    let h = hess.hessian(c[0], c[1]);
    let ex = [l[0][0], l[1][0]];
    let ey = [l[0][1], l[1][1]];
    let (hxx, hxy, hyy) = (quad(&h, ex, ex), quad(&h, ex, ey), quad(&h, ey, ey));
    let (w, ht) = (r.width(), r.height());
    if hxx.abs() >= hyy.abs() && hxx != 0.0 {
        let m = (-hxy / hxx).clamp(-1.0, 1.0).clamp(-w / ht, w / ht);
        let m = if (m * ht).abs() < 1e-3 * w { 0.0 } else { m };
        Parallelogram { origin: [r.x0 - (m * ht).max(0.0), r.y0], edge1: [w + (m * ht).abs(), 0.0], edge2: [m * ht, ht] }
    } else if hyy != 0.0 {
        let m = (-hxy / hyy).clamp(-1.0, 1.0).clamp(-ht / w, ht / w);
        let m = if (m * w).abs() < 1e-3 * ht { 0.0 } else { m };
        Parallelogram { origin: [r.x0, r.y0 - (m * w).max(0.0)], edge1: [w, m * w], edge2: [0.0, ht + (m * w).abs()] }
    } else {
        r.to_parallelogram()
    }
}

/// Cells that need at most this many pieces keep their own alignment.
const ALIGN_GRID: u64 = 16;

/// A cover of `region` (model coordinates) by Hessian-aligned cells: a
/// grid of coarse rectangles, each split into quarters while its aligned
/// cell would need more than 16 pieces and its sides exceed 2 cap.
/// Rectangles rejected by `skip` are dropped. Returns (cell in model
/// coordinates, rectangle) pairs.
pub fn aligned_coarse_cells(
    hess: &FloatPoly,
    to_engine: &AffineMap,
    region: &Rect,
    coarse: f64,
    cap: f64,
    target: f64,
    skip: &dyn Fn(&Rect) -> bool,
) -> Vec<(Parallelogram, Rect)> {
    let nx = ((region.width() / coarse) - 1e-9).ceil().max(1.0) as usize;
    let ny = ((region.height() / coarse) - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let r = Rect::new(
                region.x0 + region.width() * i as f64 / nx as f64,
                region.x0 + region.width() * (i + 1) as f64 / nx as f64,
                region.y0 + region.height() * j as f64 / ny as f64,
                region.y0 + region.height() * (j + 1) as f64 / ny as f64,
            );
            align_rect(hess, to_engine, r, cap, target, skip, &mut out);
        }
    }
    out
}

fn align_rect(
    hess: &FloatPoly,
    to_engine: &AffineMap,
    r: Rect,
    cap: f64,
    target: f64,
    skip: &dyn Fn(&Rect) -> bool,
    out: &mut Vec<(Parallelogram, Rect)>,
) {
    if skip(&r) {
        return;
    }
    let cell = aligned_cell(hess, to_engine, &r);
    if r.width().min(r.height()) > 2.0 * cap {
        let (nu, nv) = grid_counts(directional_bounds(hess, &cell.map(to_engine)), target, 1, 1);
        if nu as u64 * nv as u64 > ALIGN_GRID {
            let (mx, my) = (0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            for q in [
                Rect::new(r.x0, mx, r.y0, my),
                Rect::new(mx, r.x1, r.y0, my),
                Rect::new(r.x0, mx, my, r.y1),
                Rect::new(mx, r.x1, my, r.y1),
            ] {
                align_rect(hess, to_engine, q, cap, target, skip, out);
            }
            return;
        }
    }
    out.push((cell, r));
}

/// Minimum grid counts so that every edge is at most `cap` long.
pub fn cap_counts(p: &Parallelogram, cap: f64) -> (u32, u32) {
    let c = |e: Vec2| ((e[0].hypot(e[1]) / cap) - 1e-9).ceil().max(1.0) as u32;
    (c(p.edge1), c(p.edge2))
}

/// Nondegenerate tiling of `region` for the phase with Hessian field `hess`:
/// squares of side delta^(1/2), refined where the second-order bound would
/// exceed `target`, sheared along the Hessian where that saves pieces.
pub fn tile_nondegenerate(hess: &FloatPoly, delta: f64, region: &Rect, target: f64) -> Vec<Parallelogram> {
    let cap = delta.sqrt();
    let mut out = Vec::new();
    for (cell, r) in aligned_coarse_cells(hess, &AffineMap::identity(), region, (1.0f64 / 16.0).max(cap), cap, target, &|_| false) {
        let keep = |s: &SubCell| s.of(&cell).intersects_rect(&r);
        let mut subs = Vec::new();
        refine(hess, &cell, target, cap_counts(&cell, cap), &keep, &mut subs);
        out.extend(subs.iter().map(|s| s.of(&cell)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    fn hess(s: &str) -> FloatPoly {
        let p = parse_poly(s).unwrap();
        FloatPoly::new(&p)
    }

    #[test]
    fn grid_counts_for_quadratic_forms() {
        assert_eq!(grid_counts([2.0, 0.0, 2.0], 2.0, 1, 1), (1, 1));
        assert_eq!(grid_counts([8.0, 0.0, 0.0], 1.1, 1, 1), (2, 1));
        assert_eq!(grid_counts([0.0, 0.0, 18.0], 1.1, 1, 1), (1, 3));
        let (nu, nv) = grid_counts([3.0, 1.0, 5.0], 0.01, 1, 1);
        let bound = 0.5 * (3.0 / (nu * nu) as f64 + 2.0 / (nu * nv) as f64 + 5.0 / (nv * nv) as f64);
        assert!(bound <= 0.01);
    }

    #[test]
    fn paraboloid_unit_square_grid() {
        let h = hess("x^2+y^2");
        let delta = 2f64.powi(-8);
        let pieces = tile_nondegenerate(&h, delta, &Rect::new(1.0, 2.0, 1.0, 2.0), 48.0 * delta);
        assert_eq!(pieces.len(), 256);
        for p in &pieces {
            assert!((p.edge1[0] - 1.0 / 16.0).abs() < 1e-12 && p.edge1[1] == 0.0);
            assert!((p.edge2[1] - 1.0 / 16.0).abs() < 1e-12 && p.edge2[0] == 0.0);
        }
    }

    #[test]
    fn refinement_meets_target() {
        let h = hess("8*x^8+112*x^6*y+504*x^4*y^2+756*x^2*y^3+189*y^4");
        let cell = Rect::new(1.0, 1.5, 0.2, 0.7).to_parallelogram();
        let mut subs = Vec::new();
        refine(&h, &cell, 1e-1, (1, 1), &|_| true, &mut subs);
        let area: f64 = subs.iter().map(|s| (s.u1 - s.u0) * (s.v1 - s.v0)).sum();
        assert!((area - 1.0).abs() < 1e-9, "area {area} from {} cells", subs.len());
        for s in &subs {
            let p = s.of(&cell);
            let [a, b, d] = directional_bounds(&h, &p);
            assert!(0.5 * (a + 2.0 * b + d) <= 1.5e-1);
        }
    }
}
