//! The decomposition engine: radial reduction, neighbourhoods of the
//! degenerate set of the Hessian, the case constructions near axes and
//! curves, and the nondegenerate tiling of what is left.

mod annulus;
mod axis;
mod curve;
mod cylinder;
mod cylindrical;
mod json;
pub mod tiler;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::geometry::{AffineMap, Parallelogram, Rect};
use crate::polyalg::{BivariatePoly, FloatPoly, MixedHomogeneity};

pub use annulus::{decompose, decompose_annulus, select_separation, AnnulusPlan, Component, Job, QuadrantPlan};
pub use axis::{decompose_axis_a1, decompose_axis_a2, shear_decay_profile, ShearDecay};
pub use curve::{decompose_curve_b1, decompose_curve_b2};
pub use cylinder::{cylinder_partition, flat_intervals};
pub use cylindrical::cylindrical_decouple;
pub use json::{partition_from_json, partition_to_json, JsonPartition, JsonPiece};
pub use tiler::tile_nondegenerate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "FLAT_CORE")]
    FlatCore,
    #[serde(rename = "NONDEG")]
    Nondeg,
    A1,
    #[serde(rename = "A1_POWER")]
    A1Power,
    A2,
    B1,
    B2,
    #[serde(rename = "CYLINDER")]
    Cylinder,
}

impl CaseTag {
    pub const ALL: [CaseTag; 8] = [
        CaseTag::FlatCore,
        CaseTag::Nondeg,
        CaseTag::A1,
        CaseTag::A1Power,
        CaseTag::A2,
        CaseTag::B1,
        CaseTag::B2,
        CaseTag::Cylinder,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::FlatCore => "FLAT_CORE",
            CaseTag::Nondeg => "NONDEG",
            CaseTag::A1 => "A1",
            CaseTag::A1Power => "A1_POWER",
            CaseTag::A2 => "A2",
            CaseTag::B1 => "B1",
            CaseTag::B2 => "B2",
            CaseTag::Cylinder => "CYLINDER",
        }
    }

    pub fn parse(s: &str) -> Option<CaseTag> {
        CaseTag::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Clone, Debug)]
pub struct PartitionPiece {
    pub shape: Parallelogram,
    pub case_tag: CaseTag,
    pub radial_level: u32,
    pub band_level: u32,
    pub sigma: f64,
    pub l_level: u32,
    /// Unit square to the piece in its model frame.
    pub local: AffineMap,
    /// Model frame to [-1,1]^2 coordinates, applied in order.
    pub chain: Arc<Vec<AffineMap>>,
}

impl PartitionPiece {
    /// The full chain: `local` first, then `chain`.
    pub fn maps(&self) -> impl Iterator<Item = &AffineMap> {
        std::iter::once(&self.local).chain(self.chain.iter())
    }

    pub fn composite(&self) -> AffineMap {
        self.maps().fold(AffineMap::identity(), |acc, m| m.compose(&acc))
    }

    /// Largest corner distance between the chain image of the unit square
    /// and the stored shape.
    pub fn chain_residual(&self) -> f64 {
        let mut corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        for m in self.maps() {
            for c in corners.iter_mut() {
                *c = m.apply(*c);
            }
        }
        corners
            .iter()
            .zip(self.shape.corners())
            .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub pieces: usize,
    pub per_case: BTreeMap<String, usize>,
    pub radial_levels: u32,
    pub core_shrink: u32,
    pub c_phi: f64,
    pub m_bound: f64,
    pub max_abs_mu: f64,
    pub max_recursion_depth: u32,
}

#[derive(Clone, Debug)]
pub struct Partition {
    pub phi: BivariatePoly,
    pub delta: f64,
    pub mh: MixedHomogeneity,
    pub pieces: Vec<PartitionPiece>,
    pub l2_applicable: bool,
    pub stats: PartitionStats,
}

impl Partition {
    pub fn shapes(&self) -> Vec<Parallelogram> {
        self.pieces.iter().map(|p| p.shape).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Fixed separation constant; `None` selects it by halving from 1/4.
    pub c_phi: Option<f64>,
    pub c_flat: f64,
    pub m_bound: f64,
    pub max_recursion: usize,
    pub verify_inline: bool,
    pub seed: u64,
    /// Multiplicative slack for "comparable" in the sampled estimates.
    pub similarity: f64,
    pub max_pieces: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            c_phi: None,
            c_flat: 64.0,
            m_bound: 100.0,
            max_recursion: 32,
            verify_inline: true,
            seed: 0,
            similarity: 32.0,
            max_pieces: 20_000_000,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if let Some(c) = self.c_phi {
            if !(c > 0.0 && c <= 0.25) {
                return Err(EngineError::construction("config", format!("c_phi = {c} outside (0, 1/4]")));
            }
        }
        if self.m_bound < 100.0 {
            return Err(EngineError::construction("config", format!("M bound {} below 100", self.m_bound)));
        }
        if !(self.c_flat > 0.0) || !(self.similarity >= 1.0) {
            return Err(EngineError::construction("config", "C_flat must be positive, similarity at least 1"));
        }
        Ok(())
    }

    /// The engine aims below C_flat so that sampling noise in the verifier
    /// cannot push a piece over.
    pub fn target_ratio(&self) -> f64 {
        0.75 * self.c_flat
    }
}

/// Where the engines of one radial level and one frame send their pieces.
pub(crate) struct Frame<'a> {
    pub cfg: &'a EngineConfig,
    /// Phase in engine coordinates.
    pub hess: FloatPoly,
    /// Engine frame to [-1,1]^2 coordinates.
    pub outer: Vec<AffineMap>,
    pub outer_map: AffineMap,
    pub delta: f64,
    pub target: f64,
    pub radial_level: u32,
    /// Engine-coordinate box and hole; pieces missing the box or lying in
    /// the hole are dropped.
    pub annulus: Option<(Rect, Rect)>,
}

impl<'a> Frame<'a> {
    pub fn new(cfg: &'a EngineConfig, poly: BivariatePoly, outer: Vec<AffineMap>, delta: f64, radial_level: u32) -> Self {
        let outer_map = outer.iter().fold(AffineMap::identity(), |acc, m| m.compose(&acc));
        Frame {
            cfg,
            hess: FloatPoly::new(&poly),
            outer,
            outer_map,
            delta,
            target: cfg.target_ratio() * delta,
            radial_level,
            annulus: None,
        }
    }

    pub fn with_annulus(self, outer: Rect, hole: Rect) -> Self {
        Frame { annulus: Some((outer, hole)), ..self }
    }

    /// Model-to-final chain for a model frame whose maps to engine
    /// coordinates are `model` (applied in order).
    pub fn chain(&self, model: &[AffineMap]) -> Arc<Vec<AffineMap>> {
        Arc::new(model.iter().chain(self.outer.iter()).copied().collect())
    }
}

/// Model-frame test for sub-pieces that are not needed.
pub(crate) type Exclude<'a> = &'a dyn Fn(&Parallelogram) -> bool;

/// A cell handed to the refinement step.
pub(crate) struct Cell<'a> {
    pub local: AffineMap,
    pub to_engine: AffineMap,
    pub chain: Arc<Vec<AffineMap>>,
    pub tag: CaseTag,
    pub band_level: u32,
    pub sigma: f64,
    pub l_level: u32,
    pub min_n: (u32, u32),
    /// Sub-pieces missing this rectangle (model coordinates) are dropped.
    pub clip: Option<Rect>,
    pub exclude: Option<Exclude<'a>>,
}

#[derive(Default)]
pub(crate) struct Sink {
    pub pieces: Vec<PartitionPiece>,
    pub max_abs_mu: f64,
    pub mu_poly_bound: f64,
    pub max_depth: u32,
    pub limit: usize,
    /// Pieces missing this rectangle are dropped.
    pub domain: Option<Rect>,
}

pub(crate) const UNIT_BOX: Rect = Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 };

impl Sink {
    pub fn new(limit: usize, domain: Option<Rect>) -> Self {
        Sink { limit, domain, ..Default::default() }
    }

    pub fn push(&mut self, piece: PartitionPiece) -> Result<(), EngineError> {
        if self.domain.is_none_or(|d| piece.shape.intersects_rect(&d)) {
            if self.pieces.len() >= self.limit {
                return Err(EngineError::Budget(self.pieces.len()));
            }
            self.pieces.push(piece);
        }
        Ok(())
    }

    /// Refines a cell until every sub-piece meets the frame's target and
    /// records the sub-pieces.
    pub fn emit(&mut self, frame: &Frame, cell: Cell) -> Result<(), EngineError> {
        let model_shape = Parallelogram::from_frame(&cell.local);
        let engine_shape = model_shape.map(&cell.to_engine);
        let keep = |s: &tiler::SubCell| {
            let m = s.of(&model_shape);
            cell.clip.is_none_or(|r| m.intersects_rect(&r))
                && !cell.exclude.is_some_and(|f| f(&m))
                && frame.annulus.is_none_or(|(outer, hole)| {
                    let e = s.of(&engine_shape);
                    e.intersects_rect(&outer) && !hole.contains_rect(&e.bbox())
                })
        };
        let mut subs = Vec::new();
        tiler::refine(&frame.hess, &engine_shape, frame.target, cell.min_n, &keep, &mut subs);
        for s in subs {
            let shape = s.of(&engine_shape).map(&frame.outer_map);
            self.push(PartitionPiece {
                shape,
                case_tag: cell.tag,
                radial_level: frame.radial_level,
                band_level: cell.band_level,
                sigma: cell.sigma,
                l_level: cell.l_level,
                local: cell.local.compose(&s.map()),
                chain: cell.chain.clone(),
            })?;
        }
        Ok(())
    }

    /// Nondegenerate tiling of a model-frame rectangle at model scale
    /// `delta_model`, without the sub-pieces `exclude` rejects.
    #[allow(clippy::too_many_arguments)]
    pub fn tile(
        &mut self,
        frame: &Frame,
        model: &[AffineMap],
        region: &Rect,
        delta_model: f64,
        tag: CaseTag,
        band_level: u32,
        sigma: f64,
        exclude: Option<Exclude>,
    ) -> Result<(), EngineError> {
        let to_engine = model.iter().fold(AffineMap::identity(), |acc, m| m.compose(&acc));
        let chain = frame.chain(model);
        let cap = delta_model.sqrt();
        let skip = |r: &Rect| exclude.is_some_and(|f| f(&r.to_parallelogram()));
        let coarse = (1.0f64 / 16.0).max(cap);
        for (cell, r) in tiler::aligned_coarse_cells(&frame.hess, &to_engine, region, coarse, cap, frame.target, &skip) {
            self.emit(
                frame,
                Cell {
                    local: cell.frame(),
                    to_engine,
                    chain: chain.clone(),
                    tag,
                    band_level,
                    sigma,
                    l_level: 0,
                    min_n: tiler::cap_counts(&cell, cap),
                    clip: Some(r),
                    exclude,
                },
            )?;
        }
        Ok(())
    }
}

/// Final ordering: radial level, case, band, then emission order.
pub(crate) fn sort_pieces(pieces: &mut [PartitionPiece]) {
    pieces.sort_by_key(|p| (p.radial_level, p.case_tag, p.band_level));
}

pub(crate) fn stats_for(pieces: &[PartitionPiece]) -> PartitionStats {
    let mut per_case = BTreeMap::new();
    for p in pieces {
        *per_case.entry(p.case_tag.as_str().to_string()).or_insert(0) += 1;
    }
    PartitionStats { pieces: pieces.len(), per_case, ..Default::default() }
}
