//! L4 decoupling quotients of random extension fields whose frequencies
//! sit in the vertical delta-neighbourhood of the graph of phi over each
//! piece.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::EstimatorError;
use crate::geometry::Parallelogram;
use crate::polyalg::{BivariatePoly, FloatPoly};

/// Default work budget, in units of grid points times frequencies.
pub const DEFAULT_BUDGET: f64 = 1e11;
pub const BUDGET_ENV: &str = "MHDEC_BUDGET";

/// The budget from `MHDEC_BUDGET` when set and valid.
pub fn budget_from_env() -> f64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse::<f64>().ok()).filter(|b| *b > 0.0).unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCloud {
    pub delta: f64,
    pub density: usize,
    /// Frequencies (xi1, xi2, xi3) per piece.
    pub pieces: Vec<Vec<[f64; 3]>>,
}

impl FrequencyCloud {
    pub fn len(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `density` points per piece on a jittered lattice in the piece frame,
/// lifted to phi + uniform(-delta/2, delta/2). One point per piece sits at
/// the centre.
pub fn sample_cloud(phi: &BivariatePoly, pieces: &[Parallelogram], delta: f64, density: usize, seed: u64) -> FrequencyCloud {
    let density = density.max(1);
    let f = FloatPoly::new(phi);
    let m = (density as f64).sqrt().ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(pieces.len());
    for p in pieces {
        let mut pts = Vec::with_capacity(density);
        for idx in 0..density {
            let (u, v) = if density == 1 {
                (0.5, 0.5)
            } else {
                let (i, j) = (idx % m, idx / m);
                let ju = rng.gen_range(-0.25..0.25);
                let jv = rng.gen_range(-0.25..0.25);
                ((i as f64 + 0.5 + ju) / m as f64, (j as f64 + 0.5 + jv) / m as f64)
            };
            let q = p.point(u, v);
            let z = f.eval(q[0], q[1]) + rng.gen_range(-0.5 * delta..0.5 * delta);
            pts.push([q[0], q[1], z]);
        }
        out.push(pts);
    }
    FrequencyCloud { delta, density, pieces: out }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Points per axis.
    pub n: usize,
    /// Side of the period box [0, T]^3.
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Norms {
    pub total: f64,
    pub pieces: Vec<f64>,
    /// Some frequency range is too wide for the grid to integrate |f|^4
    /// exactly.
    pub aliased: bool,
}

/// Frequencies snapped to the 1/T lattice and centred per axis, so that
/// the grid integrates trigonometric polynomials exactly up to aliasing.
struct Lattice {
    pieces: Vec<Vec<[i64; 3]>>,
    width: i64,
}

impl Lattice {
    fn new(cloud: &FrequencyCloud, t: f64) -> Self {
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        let pieces: Vec<Vec<[i64; 3]>> = cloud
            .pieces
            .iter()
            .map(|pts| {
                pts.iter()
                    .map(|xi| {
                        let k = [(xi[0] * t).round() as i64, (xi[1] * t).round() as i64, (xi[2] * t).round() as i64];
                        for a in 0..3 {
                            lo[a] = lo[a].min(k[a]);
                            hi[a] = hi[a].max(k[a]);
                        }
                        k
                    })
                    .collect()
            })
            .collect();
        if pieces.iter().all(Vec::is_empty) {
            return Lattice { pieces, width: 0 };
        }
        let mid = [0, 1, 2].map(|a| (lo[a] + hi[a]).div_euclid(2));
        let width = (0..3).map(|a| hi[a] - lo[a]).max().unwrap_or(0);
        let pieces = pieces.into_iter().map(|pts| pts.into_iter().map(|k| [k[0] - mid[0], k[1] - mid[1], k[2] - mid[2]]).collect()).collect();
        Lattice { pieces, width }
    }
}

fn index(k: &[i64; 3], n: usize) -> usize {
    let n = n as i64;
    let w = |v: i64| v.rem_euclid(n) as usize;
    (w(k[0]) * n as usize + w(k[1])) * n as usize + w(k[2])
}

/// In-place unnormalised inverse DFT of an n^3 array stored x-major.
fn inverse_fft3(data: &mut [Complex64], n: usize) {
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let mut line = vec![Complex64::default(); n];
    for chunk in data.chunks_exact_mut(n) {
        fft.process(chunk);
    }
    for stride in [n, n * n] {
        for base in 0..n * n {
            let start = if stride == n { (base / n) * n * n + base % n } else { base };
            for (i, c) in line.iter_mut().enumerate() {
                *c = data[start + i * stride];
            }
            fft.process(&mut line);
            for (i, c) in line.iter().enumerate() {
                data[start + i * stride] = *c;
            }
        }
    }
}

/// Sum over the n^3 grid of |f|^4 for f = sum c_k e(k.x/N), from the
/// Fourier coefficients of f^2.
fn quartic_sum(ks: &[[i64; 3]], cs: &[Complex64], n: usize) -> f64 {
    let mut g: HashMap<usize, Complex64> = HashMap::with_capacity(ks.len() * ks.len());
    for (i, (ki, ci)) in ks.iter().zip(cs).enumerate() {
        for (kj, cj) in ks[i..].iter().zip(&cs[i..]) {
            let v = [ki[0] + kj[0], ki[1] + kj[1], ki[2] + kj[2]];
            let w = if std::ptr::eq(ki, kj) { 1.0 } else { 2.0 };
            *g.entry(index(&v, n)).or_default() += ci * cj * w;
        }
    }
    let mut keys: Vec<_> = g.into_iter().collect();
    keys.sort_unstable_by_key(|e| e.0);
    (n * n * n) as f64 * keys.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>()
}

/// L4 norms over [0, T]^3 of the full field and of each piece's field, by
/// the Riemann sum (T/N)^{3/4} (sum |f|^4)^{1/4}.
pub fn synthesize_and_norm(cloud: &FrequencyCloud, coeffs: &[Vec<Complex64>], grid: Grid, budget: f64) -> Result<Norms, EstimatorError> {
    if grid.n < 16 || grid.t < 1.0 {
        return Err(EstimatorError::Grid(format!("need N >= 16 and T >= 1, got N = {}, T = {}", grid.n, grid.t)));
    }
    if coeffs.len() != cloud.pieces.len() || coeffs.iter().zip(&cloud.pieces).any(|(c, p)| c.len() != p.len()) {
        return Err(EstimatorError::Shape);
    }
    let n = grid.n;
    let needed = (n * n * n) as f64 * cloud.len() as f64;
    if needed > budget {
        return Err(EstimatorError::Budget { needed, budget });
    }
    let lattice = Lattice::new(cloud, grid.t);
    let scale = (grid.t / n as f64).powf(0.75);

    let mut field = vec![Complex64::default(); n * n * n];
    for (ks, cs) in lattice.pieces.iter().zip(coeffs) {
        for (k, c) in ks.iter().zip(cs) {
            field[index(k, n)] += c;
        }
    }
    inverse_fft3(&mut field, n);
    let total = scale * field.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>().powf(0.25);
    let pieces = lattice.pieces.iter().zip(coeffs).map(|(ks, cs)| scale * quartic_sum(ks, cs, n).powf(0.25)).collect();
    Ok(Norms { total, pieces, aliased: 2 * lattice.width >= n as i64 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub delta: f64,
    pub pieces: usize,
    pub trials: usize,
    pub d4_mean: f64,
    pub d4_max: f64,
    pub d2_mean: f64,
    pub d2_max: f64,
    pub grid: Grid,
    pub seed: u64,
    pub aliased: bool,
}

fn quotients(norms: &Norms) -> (f64, f64) {
    let p = norms.pieces.len() as f64;
    let l4: f64 = norms.pieces.iter().map(|v| v.powi(4)).sum();
    let l2: f64 = norms.pieces.iter().map(|v| v * v).sum();
    (norms.total / (p.powf(0.25) * l4.powf(0.25)), norms.total / l2.sqrt())
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Unit-modulus random coefficients for one trial.
pub fn random_phases(cloud: &FrequencyCloud, seed: u64, trial: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
    cloud
        .pieces
        .iter()
        .map(|pts| pts.iter().map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect())
        .collect()
}

/// Mean and max of D4, D2 over `trials` random-phase draws on a cloud of
/// `density` points per piece.
#[allow(clippy::too_many_arguments)]
pub fn decoupling_ratio(
    phi: &BivariatePoly,
    pieces: &[Parallelogram],
    delta: f64,
    trials: usize,
    grid: Grid,
    density: usize,
    seed: u64,
    budget: f64,
) -> Result<RatioReport, EstimatorError> {
    if pieces.is_empty() {
        return Err(EstimatorError::EmptyPartition);
    }
    let trials = trials.max(1);
    let cloud = sample_cloud(phi, pieces, delta, density, seed);
    let needed = (grid.n * grid.n * grid.n) as f64 * cloud.len() as f64 * trials as f64;
    if needed > budget {
        return Err(EstimatorError::Budget { needed, budget });
    }
    let results: Vec<Result<(f64, f64, bool), EstimatorError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let norms = synthesize_and_norm(&cloud, &random_phases(&cloud, seed, t), grid, budget)?;
            let (d4, d2) = quotients(&norms);
            Ok((d4, d2, norms.aliased))
        })
        .collect();
    let mut sums = (0.0, 0.0);
    let mut maxes = (0.0f64, 0.0f64);
    let mut aliased = false;
    for r in results {
        let (d4, d2, a) = r?;
        sums.0 += d4;
        sums.1 += d2;
        maxes = (maxes.0.max(d4), maxes.1.max(d2));
        aliased |= a;
    }
    let t = trials as f64;
    Ok(RatioReport {
        delta,
        pieces: pieces.len(),
        trials,
        d4_mean: sums.0 / t,
        d4_max: maxes.0,
        d2_mean: sums.1 / t,
        d2_max: maxes.1,
        grid,
        seed,
        aliased,
    })
}

#[derive(Serialize)]
struct CsvRow {
    delta: f64,
    pieces: usize,
    #[serde(rename = "D4_mean")]
    d4_mean: f64,
    #[serde(rename = "D4_max")]
    d4_max: f64,
    #[serde(rename = "D2_mean")]
    d2_mean: f64,
    #[serde(rename = "D2_max")]
    d2_max: f64,
    #[serde(rename = "grid_N")]
    grid_n: usize,
    #[serde(rename = "box_T")]
    box_t: f64,
    trials: usize,
    seed: u64,
}

/// One CSV row per report, with a header.
pub fn write_csv<W: Write>(out: W, reports: &[RatioReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            delta: r.delta,
            pieces: r.pieces,
            d4_mean: r.d4_mean,
            d4_max: r.d4_max,
            d2_mean: r.d2_mean,
            d2_max: r.d2_max,
            grid_n: r.grid.n,
            box_t: r.grid.t,
            trials: r.trials,
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::polyalg::parse_poly;

    fn cloud_of(points: Vec<Vec<[f64; 3]>>) -> FrequencyCloud {
        FrequencyCloud { delta: 0.1, density: 1, pieces: points }
    }

    const GRID: Grid = Grid { n: 16, t: 2.0 };

    #[test]
    fn single_frequency() {
        let cloud = cloud_of(vec![vec![[0.5, -1.0, 3.0]]]);
        let c = vec![vec![Complex64::from_polar(1.0, 0.3)]];
        let norms = synthesize_and_norm(&cloud, &c, GRID, DEFAULT_BUDGET).unwrap();
        let expect = GRID.t.powf(0.75);
        assert!((norms.total - expect).abs() < 1e-12 * expect);
        assert!((norms.pieces[0] - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn two_frequencies() {
        let cloud = cloud_of(vec![vec![[0.5, 0.0, 0.0], [0.0, 1.0, 0.5]]]);
        let c = vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]];
        let norms = synthesize_and_norm(&cloud, &c, GRID, DEFAULT_BUDGET).unwrap();
        let expect = (6.0 * GRID.t.powi(3)).powf(0.25);
        assert!((norms.total - expect).abs() < 1e-12 * expect);
        assert!((norms.pieces[0] - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn zero_coefficients() {
        let cloud = cloud_of(vec![vec![[0.5, 0.0, 0.0]]]);
        let norms = synthesize_and_norm(&cloud, &[vec![Complex64::default()]], GRID, DEFAULT_BUDGET).unwrap();
        assert_eq!((norms.total, norms.pieces[0]), (0.0, 0.0));
    }

    #[test]
    fn budget_guard() {
        let cloud = cloud_of(vec![vec![[0.5, 0.0, 0.0]]]);
        let err = synthesize_and_norm(&cloud, &[vec![Complex64::new(1.0, 0.0)]], GRID, 100.0).unwrap_err();
        assert!(matches!(err, EstimatorError::Budget { .. }));
    }

    #[test]
    fn cloud_membership() {
        let phi = parse_poly("x^2+y^2").unwrap();
        let f = FloatPoly::new(&phi);
        let pieces = [Rect::new(0.0, 0.5, 0.0, 0.5).to_parallelogram(), Rect::new(-1.0, 0.0, 0.2, 0.3).to_parallelogram()];
        let cloud = sample_cloud(&phi, &pieces, 0.01, 5, 3);
        assert_eq!(cloud.len(), 10);
        for (p, pts) in pieces.iter().zip(&cloud.pieces) {
            for xi in pts {
                assert!(p.contains([xi[0], xi[1]]));
                assert!((xi[2] - f.eval(xi[0], xi[1])).abs() < 0.01);
            }
        }
        let centred = sample_cloud(&phi, &pieces, 0.01, 1, 3);
        assert_eq!([centred.pieces[0][0][0], centred.pieces[0][0][1]], [0.25, 0.25]);
    }

    #[test]
    fn one_piece_is_one() {
        let phi = parse_poly("x^2+y^2").unwrap();
        let r = decoupling_ratio(&phi, &[Rect::new(-1.0, 1.0, -1.0, 1.0).to_parallelogram()], 0.1, 3, Grid { n: 32, t: 4.0 }, 9, 1, DEFAULT_BUDGET).unwrap();
        assert!((r.d4_mean - 1.0).abs() < 1e-12 && (r.d2_mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let r = RatioReport { delta: 0.5, pieces: 1, trials: 1, d4_mean: 1.0, d4_max: 1.0, d2_mean: 1.0, d2_max: 1.0, grid: GRID, seed: 0, aliased: false };
        let mut out = Vec::new();
        write_csv(&mut out, &[r]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("delta,pieces,D4_mean,D4_max,D2_mean,D2_max,grid_N,box_T,trials,seed\n"));
    }
}
