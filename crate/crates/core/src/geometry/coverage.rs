//! Stochastic coverage and overlap measurement.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Parallelogram, Rect, Vec2};

/// Uniform bucket grid over a domain; each bucket lists the pieces whose
/// bounding box meets it.
pub struct PieceIndex<'a> {
    pieces: &'a [Parallelogram],
    domain: Rect,
    n: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> PieceIndex<'a> {
    pub fn new(pieces: &'a [Parallelogram], domain: Rect) -> Self {
        let n = ((pieces.len() as f64).sqrt().ceil() as usize).clamp(1, 2048);
        let mut buckets = vec![Vec::new(); n * n];
        let (bw, bh) = (domain.width() / n as f64, domain.height() / n as f64);
        for (k, p) in pieces.iter().enumerate() {
            let bb = p.bbox();
            if !bb.intersects(&domain) {
                continue;
            }
            let i0 = (((bb.x0 - domain.x0) / bw).floor().max(0.0) as usize).min(n - 1);
            let i1 = (((bb.x1 - domain.x0) / bw).floor().max(0.0) as usize).min(n - 1);
            let j0 = (((bb.y0 - domain.y0) / bh).floor().max(0.0) as usize).min(n - 1);
            let j1 = (((bb.y1 - domain.y0) / bh).floor().max(0.0) as usize).min(n - 1);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[i * n + j].push(k as u32);
                }
            }
        }
        PieceIndex { pieces, domain, n, buckets }
    }

    fn bucket(&self, p: Vec2) -> Option<&[u32]> {
        if !self.domain.contains(p) {
            return None;
        }
        let n = self.n;
        let i = (((p[0] - self.domain.x0) / self.domain.width() * n as f64) as usize).min(n - 1);
        let j = (((p[1] - self.domain.y0) / self.domain.height() * n as f64) as usize).min(n - 1);
        Some(&self.buckets[i * n + j])
    }

    /// Number of pieces containing p.
    pub fn multiplicity(&self, p: Vec2) -> usize {
        match self.bucket(p) {
            Some(b) => b.iter().filter(|&&k| self.pieces[k as usize].contains(p)).count(),
            None => 0,
        }
    }

    pub fn containing(&self, p: Vec2) -> Vec<usize> {
        match self.bucket(p) {
            Some(b) => b.iter().map(|&k| k as usize).filter(|&k| self.pieces[k].contains(p)).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub covered_fraction: f64,
    pub max_multiplicity: usize,
    /// multiplicity -> number of samples
    pub histogram: BTreeMap<usize, usize>,
    pub first_uncovered: Option<Vec2>,
}

pub fn coverage_and_overlap(pieces: &[Parallelogram], domain: Rect, n_samples: usize, seed: u64) -> CoverageReport {
    let index = PieceIndex::new(pieces, domain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = BTreeMap::new();
    let mut covered = 0usize;
    let mut first_uncovered = None;
    for _ in 0..n_samples {
        let p = [rng.gen_range(domain.x0..=domain.x1), rng.gen_range(domain.y0..=domain.y1)];
        let m = index.multiplicity(p);
        if m > 0 {
            covered += 1;
        } else if first_uncovered.is_none() {
            first_uncovered = Some(p);
        }
        *hist.entry(m).or_insert(0) += 1;
    }
    CoverageReport {
        samples: n_samples,
        covered_fraction: covered as f64 / n_samples.max(1) as f64,
        max_multiplicity: hist.keys().next_back().copied().unwrap_or(0),
        histogram: hist,
        first_uncovered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_itself_and_two_copies() {
        let d = Rect::square(1.0);
        let r = coverage_and_overlap(&[d.to_parallelogram()], d, 10_000, 1);
        assert_eq!(r.covered_fraction, 1.0);
        assert_eq!(r.max_multiplicity, 1);
        assert_eq!(r.histogram.get(&1), Some(&10_000));
        let two = [d.to_parallelogram(), d.to_parallelogram()];
        let r = coverage_and_overlap(&two, d, 10_000, 1);
        assert_eq!(r.histogram.get(&2), Some(&10_000));
    }

    #[test]
    fn half_cover() {
        let d = Rect::square(1.0);
        let half = Rect::new(-1.0, 0.0, -1.0, 1.0).to_parallelogram();
        let r = coverage_and_overlap(&[half], d, 20_000, 7);
        assert!((r.covered_fraction - 0.5).abs() < 0.02);
        assert!(r.first_uncovered.unwrap()[0] > 0.0);
    }
}
