//! Partition files: a fixed field order and 17 significant digits so that
//! equal partitions give equal bytes.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Partition, PartitionPiece, PartitionStats};
use crate::geometry::{AffineMap, Parallelogram, Vec2};

pub const FORMAT: &str = "mhdec-partition";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonMap {
    pub linear: [[f64; 2]; 2],
    pub shift: Vec2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonPiece {
    pub origin: Vec2,
    pub edge1: Vec2,
    pub edge2: Vec2,
    pub case: String,
    pub level: u32,
    pub band: u32,
    pub sigma: f64,
    pub l: u32,
    /// Unit square to the piece, applied in order.
    pub chain: Vec<JsonMap>,
}

impl JsonPiece {
    pub fn shape(&self) -> Parallelogram {
        Parallelogram { origin: self.origin, edge1: self.edge1, edge2: self.edge2 }
    }

    pub fn maps(&self) -> Vec<AffineMap> {
        self.chain.iter().map(|m| AffineMap::new(m.linear, m.shift)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonPartition {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
    pub poly: String,
    pub delta: f64,
    pub weights: [u32; 3],
    pub l2_applicable: bool,
    pub pieces: Vec<JsonPiece>,
    pub stats: PartitionStats,
}

impl JsonPartition {
    pub fn shapes(&self) -> Vec<Parallelogram> {
        self.pieces.iter().map(JsonPiece::shape).collect()
    }
}

fn num(out: &mut String, v: f64) {
    if v.is_finite() {
        write!(out, "{v:.16e}").unwrap();
    } else {
        out.push_str("null");
    }
}

fn vec2(out: &mut String, v: Vec2) {
    out.push('[');
    num(out, v[0]);
    out.push(',');
    num(out, v[1]);
    out.push(']');
}

fn map(out: &mut String, m: &AffineMap) {
    out.push_str("{\"linear\":[");
    vec2(out, m.linear[0]);
    out.push(',');
    vec2(out, m.linear[1]);
    out.push_str("],\"shift\":");
    vec2(out, m.shift);
    out.push('}');
}

fn piece(out: &mut String, p: &PartitionPiece) {
    out.push_str("{\"origin\":");
    vec2(out, p.shape.origin);
    out.push_str(",\"edge1\":");
    vec2(out, p.shape.edge1);
    out.push_str(",\"edge2\":");
    vec2(out, p.shape.edge2);
    write!(out, ",\"case\":\"{}\",\"level\":{},\"band\":{},\"sigma\":", p.case_tag.as_str(), p.radial_level, p.band_level).unwrap();
    num(out, p.sigma);
    write!(out, ",\"l\":{},\"chain\":[", p.l_level).unwrap();
    for (i, m) in p.maps().enumerate() {
        if i > 0 {
            out.push(',');
        }
        map(out, m);
    }
    out.push_str("]}");
}

fn stats(out: &mut String, s: &PartitionStats) {
    write!(out, "{{\"pieces\":{},\"per_case\":{{", s.pieces).unwrap();
    for (i, (k, v)) in s.per_case.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "\"{k}\":{v}").unwrap();
    }
    write!(out, "}},\"radial_levels\":{},\"core_shrink\":{},\"c_phi\":", s.radial_levels, s.core_shrink).unwrap();
    num(out, s.c_phi);
    out.push_str(",\"m_bound\":");
    num(out, s.m_bound);
    out.push_str(",\"max_abs_mu\":");
    num(out, s.max_abs_mu);
    write!(out, ",\"max_recursion_depth\":{}}}", s.max_recursion_depth).unwrap();
}

/// Serializes a partition, one piece per line. The manifest, when given,
/// is written as compact JSON right after the header fields.
pub fn partition_to_json(p: &Partition, manifest: Option<&serde_json::Value>) -> String {
    let mut out = String::with_capacity(64 + 700 * p.pieces.len());
    write!(out, "{{\"format\":\"{FORMAT}\",\"version\":{VERSION},").unwrap();
    if let Some(m) = manifest {
        write!(out, "\"manifest\":{},", serde_json::to_string(m).expect("manifest serializes")).unwrap();
    }
    write!(out, "\"poly\":{},\"delta\":", serde_json::to_string(&p.phi.to_string()).unwrap()).unwrap();
    num(&mut out, p.delta);
    write!(out, ",\"weights\":[{},{},{}],\"l2_applicable\":{},\"pieces\":[", p.mh.q, p.mh.r, p.mh.s, p.l2_applicable).unwrap();
    for (i, pc) in p.pieces.iter().enumerate() {
        out.push_str(if i > 0 { ",\n" } else { "\n" });
        piece(&mut out, pc);
    }
    out.push_str("\n],\"stats\":");
    stats(&mut out, &p.stats);
    out.push_str("}\n");
    out
}

pub fn partition_from_json(text: &str) -> Result<JsonPartition, serde_json::Error> {
    let p: JsonPartition = serde_json::from_str(text)?;
    if p.format != FORMAT || p.version != VERSION {
        return Err(serde::de::Error::custom(format!(
            "unsupported format {} version {}",
            p.format, p.version
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{decompose, EngineConfig};
    use crate::polyalg::parse_poly;

    #[test]
    fn round_trip() {
        let phi = parse_poly("x^2+y^2").unwrap();
        let p = decompose(&phi, 2f64.powi(-6), &EngineConfig::default()).unwrap();
        let text = partition_to_json(&p, Some(&serde_json::json!({"seed": 0})));
        let back = partition_from_json(&text).unwrap();
        assert_eq!(back.pieces.len(), p.pieces.len());
        assert_eq!(back.shapes(), p.shapes());
        assert_eq!(back.stats, p.stats);
        assert_eq!(back.weights, [p.mh.q, p.mh.r, p.mh.s]);
        let maps = back.pieces[0].maps();
        assert_eq!(maps.len(), 1 + p.pieces[0].chain.len());
    }
}
