//! The `mhdec` command line: analyze, partition, verify, estimate.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{AlgebraError, EngineError, EstimatorError};
use crate::estimator::{budget_from_env, decoupling_ratio, write_csv, Grid};
use crate::geometry::svg::render_svg;
use crate::geometry::{coverage_and_overlap, flatness, Parallelogram, Phase, Rect};
use crate::partition::{
    decompose, partition_from_json, partition_to_json, select_separation, CaseTag, Component, EngineConfig,
    JsonPartition,
};
use crate::polyalg::{
    convexity_tag, detect_mixed_homogeneity, factorize_mixed_homogeneous, hessian_determinant, parse_poly,
    BivariatePoly, ConvexityTag, HomogeneousFactorization, RealRoot,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "mhdec", version, about = "Flat partitions for mixed-homogeneous bivariate phases")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights, Hessian determinant, factorization and degenerate components.
    Analyze(AnalyzeArgs),
    /// Build a delta-flat partition of [-1,1]^2.
    Partition(PartitionArgs),
    /// Check coverage, overlap and flatness of a partition file.
    Verify(VerifyArgs),
    /// Estimate l4 decoupling ratios over a list of scales.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
pub struct PolyArg {
    /// Polynomial in x and y, e.g. "x^4+6*x^2*y+6*y^2".
    #[arg(value_name = "POLY", required_unless_present = "poly", conflicts_with = "poly")]
    pub poly_text: Option<String>,
    #[arg(short, long)]
    pub poly: Option<String>,
}

impl PolyArg {
    fn text(&self) -> &str {
        self.poly.as_deref().or(self.poly_text.as_deref()).unwrap_or_default()
    }
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 64.0)]
    pub c_flat: f64,
    /// Fixed separation constant in (0, 1/4]; selected automatically if absent.
    #[arg(long)]
    pub c_phi: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig { c_phi: self.c_phi, c_flat: self.c_flat, seed: self.seed, ..EngineConfig::default() }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Scale in (0, 1), as a number or 2^-k.
    #[arg(short, long, value_parser = parse_delta)]
    pub delta: f64,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Partition JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Partition JSON written by `mhdec partition`.
    pub file: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Flatness grid points per side of each piece.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..))]
    pub grid: u32,
    #[arg(long, default_value_t = 64.0)]
    pub c_flat: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Comma-separated scales, e.g. "2^-4,2^-5,2^-6".
    #[arg(long, value_delimiter = ',', value_parser = parse_delta, default_value = "2^-4,2^-5,2^-6")]
    pub delta_list: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    /// FFT points per axis.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Side T of the period box [0, T]^3.
    #[arg(long = "box", default_value_t = 8.0)]
    pub box_t: f64,
    /// Frequencies sampled per piece (a jittered square lattice).
    #[arg(long, default_value_t = 4)]
    pub density: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Accepts a decimal number or 2^-k, and requires 0 < delta < 1.
pub fn parse_delta(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.strip_prefix("2^") {
        Some(e) => 2f64.powi(e.trim_matches(|c| c == '(' || c == ')').parse::<i32>().map_err(|e| e.to_string())?),
        None => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("delta must lie in (0, 1), got {s}"))
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::Algebra(AlgebraError::NotMixedHomogeneous | AlgebraError::ZeroPolynomial) => {
                EXIT_NOT_APPLICABLE
            }
            EngineError::DeltaOutOfRange(_) => EXIT_USAGE,
            EngineError::Budget(_) => EXIT_RESOURCE,
            _ => EXIT_CONSTRUCTION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EstimatorError> for Failure {
    fn from(e: EstimatorError) -> Self {
        let code = match e {
            EstimatorError::Budget { .. } => EXIT_RESOURCE,
            EstimatorError::Grid(_) => EXIT_USAGE,
            _ => EXIT_CONSTRUCTION,
        };
        Failure::new(code, e.to_string())
    }
}

/// Command, config snapshot, input polynomial, tool version, timestamp and
/// seed. Keys are written in sorted order.
pub fn manifest(command: &str, config: Value, poly: &str, seed: u64) -> Value {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "command": command,
        "config": config,
        "poly": poly,
        "version": VERSION,
        "timestamp": timestamp,
        "seed": seed,
    })
}

fn parse_input(text: &str) -> Result<BivariatePoly, Failure> {
    parse_poly(text).map_err(|e| Failure::new(EXIT_USAGE, format!("cannot parse {text:?}: {e}")))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // fails only when a global pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Partition(a) => cmd_partition(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Estimate(a) => cmd_estimate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn root_text(root: &RealRoot) -> String {
    match root.exact_value() {
        Some(v) => v.to_string(),
        None => format!("{:.12}", root.value_f64()),
    }
}

fn power_text(v: &str, e: u32) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

/// x^s - lambda y^r with the sign of lambda folded in.
fn curve_text(r: u32, s: u32, lambda: &str) -> String {
    let (op, mag) = match lambda.strip_prefix('-') {
        Some(m) => ("+", m),
        None => ("-", lambda),
    };
    let coeff = if mag == "1" { String::new() } else { format!("{mag}*") };
    format!("{} {op} {coeff}{}", power_text("x", s), power_text("y", r))
}

fn factorization_text(f: &HomogeneousFactorization) -> String {
    let mut parts = Vec::new();
    match f.nu1 {
        0 => {}
        1 => parts.push("x".to_string()),
        n => parts.push(format!("x^{n}")),
    }
    match f.nu2 {
        0 => {}
        1 => parts.push("y".to_string()),
        n => parts.push(format!("y^{n}")),
    }
    for cf in &f.curve_factors {
        let base = format!("({})", curve_text(f.mh.r, f.mh.s, &root_text(&cf.lambda)));
        parts.push(if cf.multiplicity == 1 { base } else { format!("{base}^{}", cf.multiplicity) });
    }
    if parts.is_empty() || f.residual.to_string() != "1" {
        parts.push(format!("({})", f.residual));
    }
    parts.join(" * ")
}

/// One degenerate component, merged over the quadrants where it occurs.
struct ComponentReport {
    tag: CaseTag,
    description: String,
    k: u32,
    quadrants: Vec<[i32; 2]>,
}

fn component_description(c: &Component, swapped: bool, r: u32, s: u32) -> String {
    match c {
        Component::AxisA1 { power, .. } => {
            let axis = if swapped { "x = 0" } else { "y = 0" };
            if *power {
                format!("axis {axis} (phi a pure power)")
            } else {
                format!("axis {axis}")
            }
        }
        Component::AxisA2 { .. } => format!("axis {}", if swapped { "x = 0" } else { "y = 0" }),
        Component::CurveB1 { lambda, .. } | Component::CurveB2 { lambda, .. } => {
            format!("curve {} = {lambda:.12}*{}", power_text("x", s), power_text("y", r))
        }
    }
}

fn component_order(c: &Component) -> u32 {
    match c {
        Component::AxisA1 { k, .. } | Component::AxisA2 { k } | Component::CurveB1 { k, .. } | Component::CurveB2 { k, .. } => {
            *k
        }
    }
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    let text = a.poly.text();
    let phi = parse_input(text)?;
    let mh = detect_mixed_homogeneity(&phi)
        .ok_or_else(|| Failure::new(EXIT_NOT_APPLICABLE, format!("{phi} is not mixed-homogeneous")))?;
    let det = hessian_determinant(&phi);
    let fact = factorize_mixed_homogeneous(&phi, &mh).map_err(|e| Failure::from(EngineError::from(e)))?;
    let convex = convexity_tag(&phi);
    let mut comps: Vec<ComponentReport> = Vec::new();
    let mut c_phi = None;
    if !det.is_zero() {
        let plan = select_separation(&phi, &EngineConfig::default())?;
        c_phi = Some(plan.c_phi);
        for q in &plan.quadrants {
            for job in &q.jobs {
                let description = component_description(&job.component, job.swapped, mh.r, mh.s);
                let tag = job.component.tag();
                match comps.iter_mut().find(|c| c.tag == tag && c.description == description) {
                    Some(c) => c.quadrants.push([q.ex, q.ey]),
                    None => comps.push(ComponentReport {
                        tag,
                        description,
                        k: component_order(&job.component),
                        quadrants: vec![[q.ex, q.ey]],
                    }),
                }
            }
        }
    }
    let mut tags: Vec<&str> = comps.iter().map(|c| c.tag.as_str()).collect();
    if det.is_zero() {
        tags.push(CaseTag::Cylinder.as_str());
    }
    tags.sort();
    tags.dedup();
    let convex_text = match convex {
        ConvexityTag::Convex => "convex",
        ConvexityTag::NotCertified => "not-certified",
    };

    let mut s = String::new();
    s.push_str(&format!("polynomial:    {phi}\n"));
    s.push_str(&format!("weights:       (q, r, s) = ({}, {}, {})\n", mh.q, mh.r, mh.s));
    s.push_str(&format!("hessian det K: {det}\n"));
    s.push_str(&format!("factorization: {}\n", factorization_text(&fact)));
    if det.is_zero() {
        s.push_str("components:    K vanishes identically (cylinder)\n");
    } else if comps.is_empty() {
        s.push_str("components:    none\n");
    } else {
        s.push_str(&format!("components:    {} (c_phi = {})\n", comps.len(), c_phi.unwrap_or(0.0)));
        for c in &comps {
            let qs: Vec<String> = c.quadrants.iter().map(|q| format!("({:+},{:+})", q[0], q[1])).collect();
            s.push_str(&format!("  {:<9} k = {}  {}  quadrants {}\n", c.tag.as_str(), c.k, c.description, qs.join(" ")));
        }
    }
    s.push_str(&format!("case tags:     {}\n", if tags.is_empty() { "none".to_string() } else { tags.join(", ") }));
    s.push_str(&format!("convexity:     {convex_text}\n"));
    print!("{s}");

    if let Some(out) = &a.out {
        let report = json!({
            "manifest": manifest("analyze", json!({}), text, 0),
            "poly": phi.to_string(),
            "weights": [mh.q, mh.r, mh.s],
            "hessian_det": det.to_string(),
            "factorization": {
                "nu1": fact.nu1,
                "nu2": fact.nu2,
                "curve_factors": fact.curve_factors.iter().map(|cf| json!({
                    "lambda": root_text(&cf.lambda),
                    "multiplicity": cf.multiplicity,
                })).collect::<Vec<_>>(),
                "residual": fact.residual.to_string(),
                "text": factorization_text(&fact),
            },
            "c_phi": c_phi,
            "components": comps.iter().map(|c| json!({
                "case": c.tag.as_str(),
                "k": c.k,
                "description": c.description,
                "quadrants": c.quadrants,
            })).collect::<Vec<_>>(),
            "case_tags": tags,
            "convexity": convex_text,
        });
        let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
        bytes.push(b'\n');
        fs::write(out, bytes)?;
    }
    Ok(())
}

/// Largest corner distance between the chain image of the unit square and
/// the stored shape, relative to the piece diameter.
fn relative_chain_residual(shape: &Parallelogram, maps: &[crate::geometry::AffineMap]) -> f64 {
    let mut corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    for m in maps {
        for c in corners.iter_mut() {
            *c = m.apply(*c);
        }
    }
    let err = corners
        .iter()
        .zip(shape.corners())
        .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
        .fold(0.0, f64::max);
    err / shape.diameter().max(f64::MIN_POSITIVE)
}

const CHAIN_TOL: f64 = 1e-6;

fn cmd_partition(a: &PartitionArgs) -> Result<(), Failure> {
    let text = a.poly.text();
    let phi = parse_input(text)?;
    let cfg = a.engine.config();
    let part = decompose(&phi, a.delta, &cfg)?;
    if cfg.verify_inline {
        for (i, p) in part.pieces.iter().enumerate() {
            let maps: Vec<_> = p.maps().copied().collect();
            let r = relative_chain_residual(&p.shape, &maps);
            if !(r <= CHAIN_TOL) {
                return Err(Failure::new(
                    EXIT_CONSTRUCTION,
                    format!("map chain check failed on piece {i} ({}): relative residual {r:e}", p.case_tag.as_str()),
                ));
            }
        }
    }
    let config = json!({ "delta": a.delta, "engine": cfg });
    let m = manifest("partition", config, text, cfg.seed);
    write_output(a.out.as_deref(), partition_to_json(&part, Some(&m)).as_bytes())?;
    if let Some(svg) = &a.svg {
        let tags: Vec<&str> = part.pieces.iter().map(|p| p.case_tag.as_str()).collect();
        let body = render_svg(part.pieces.iter().map(|p| &p.shape).zip(tags.iter().copied()));
        fs::write(svg, with_svg_metadata(&body, &m))?;
    }
    let per_case: Vec<String> = part.stats.per_case.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("{} pieces at delta = {} ({})", part.pieces.len(), a.delta, per_case.join(", "));
    Ok(())
}

fn with_svg_metadata(svg: &str, m: &Value) -> String {
    let escaped = serde_json::to_string(m).expect("manifest serializes").replace('&', "&amp;").replace('<', "&lt;");
    match svg.find('\n') {
        Some(i) => format!("{}<metadata>{escaped}</metadata>\n{}", &svg[..=i], &svg[i + 1..]),
        None => svg.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VerifyReport {
    pub pieces: usize,
    pub samples: usize,
    pub covered_fraction: f64,
    pub first_uncovered: Option<[f64; 2]>,
    pub max_multiplicity: usize,
    pub histogram: std::collections::BTreeMap<usize, usize>,
    pub worst_ratio: f64,
    pub worst_piece: usize,
    pub worst_case: String,
    pub worst_chain_residual: f64,
    pub c_flat: f64,
    pub pass: bool,
}

/// Coverage of [-1,1]^2, overlap histogram, sampled flatness of every piece
/// and consistency of the stored map chains.
pub fn verify_partition(jp: &JsonPartition, samples: usize, grid: usize, c_flat: f64, seed: u64) -> Result<VerifyReport, Failure> {
    let phi = parse_input(&jp.poly)?;
    let phase = Phase::new(&phi);
    let shapes = jp.shapes();
    let cov = coverage_and_overlap(&shapes, Rect::new(-1.0, 1.0, -1.0, 1.0), samples, seed);
    let ratios: Vec<f64> = shapes.par_iter().map(|s| flatness(&phase, s, jp.delta, grid).ratio).collect();
    let (worst_piece, worst_ratio) =
        ratios.iter().copied().enumerate().fold((0, 0.0f64), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let worst_chain_residual = jp
        .pieces
        .par_iter()
        .map(|p| relative_chain_residual(&p.shape(), &p.maps()))
        .reduce(|| 0.0, f64::max);
    let pass = cov.covered_fraction >= 1.0 && worst_ratio <= c_flat && worst_chain_residual <= CHAIN_TOL;
    Ok(VerifyReport {
        pieces: shapes.len(),
        samples: cov.samples,
        covered_fraction: cov.covered_fraction,
        first_uncovered: cov.first_uncovered,
        max_multiplicity: cov.max_multiplicity,
        histogram: cov.histogram,
        worst_ratio,
        worst_piece,
        worst_case: jp.pieces.get(worst_piece).map(|p| p.case.clone()).unwrap_or_default(),
        worst_chain_residual,
        c_flat,
        pass,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.file)?;
    let jp = partition_from_json(&text)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", a.file.display())))?;
    let rep = verify_partition(&jp, a.samples, a.grid as usize, a.c_flat, a.seed)?;
    println!("poly:              {}", jp.poly);
    println!("delta:             {}", jp.delta);
    println!("pieces:            {}", rep.pieces);
    println!("coverage:          {:.6} of {} samples", rep.covered_fraction, rep.samples);
    println!("max multiplicity:  {}", rep.max_multiplicity);
    let hist: Vec<String> = rep.histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    println!("overlap histogram: {}", hist.join(" "));
    println!("worst flatness:    {:.3} (piece {}, {}) against C_flat = {}", rep.worst_ratio, rep.worst_piece, rep.worst_case, rep.c_flat);
    println!("chain residual:    {:.3e}", rep.worst_chain_residual);
    println!("result:            {}", if rep.pass { "PASS" } else { "FAIL" });
    if let Some(out) = &a.out {
        let config = json!({ "file": a.file.display().to_string(), "samples": a.samples, "grid": a.grid, "c_flat": a.c_flat });
        let mut v = serde_json::to_value(&rep).expect("report serializes");
        v["manifest"] = manifest("verify", config, &jp.poly, a.seed);
        let mut bytes = serde_json::to_vec_pretty(&v).expect("report serializes");
        bytes.push(b'\n');
        fs::write(out, bytes)?;
    }
    if rep.pass {
        return Ok(());
    }
    let mut why = Vec::new();
    if rep.covered_fraction < 1.0 {
        why.push(match rep.first_uncovered {
            Some(p) => format!("coverage {:.6}, first uncovered point ({}, {})", rep.covered_fraction, p[0], p[1]),
            None => format!("coverage {:.6}", rep.covered_fraction),
        });
    }
    if rep.worst_ratio > rep.c_flat {
        let p = &jp.pieces[rep.worst_piece];
        why.push(format!(
            "piece {} ({}, origin ({}, {})) has flatness ratio {:.3} > {}",
            rep.worst_piece, p.case, p.origin[0], p.origin[1], rep.worst_ratio, rep.c_flat
        ));
    }
    if rep.worst_chain_residual > CHAIN_TOL {
        why.push(format!("map chain residual {:e}", rep.worst_chain_residual));
    }
    Err(Failure::new(EXIT_VERIFICATION, why.join("; ")))
}

fn cmd_estimate(a: &EstimateArgs) -> Result<(), Failure> {
    let text = a.poly.text();
    let phi = parse_input(text)?;
    let cfg = a.engine.config();
    let budget = budget_from_env();
    if a.grid < 16 || !(a.box_t > 0.0) || a.density == 0 {
        return Err(Failure::new(EXIT_USAGE, "need --grid >= 16, --box > 0 and --density >= 1"));
    }
    let grid = Grid { n: a.grid, t: a.box_t };
    let mut reports = Vec::new();
    for &delta in &a.delta_list {
        let part = decompose(&phi, delta, &cfg)?;
        let r = decoupling_ratio(&phi, &part.shapes(), delta, a.trials, grid, a.density, cfg.seed, budget)?;
        if r.aliased {
            eprintln!("warning: frequencies at delta = {delta} exceed the grid band; norms are of the periodized sum");
        }
        reports.push(r);
    }
    let config = json!({
        "delta_list": a.delta_list,
        "trials": a.trials,
        "grid": a.grid,
        "box": a.box_t,
        "density": a.density,
        "budget": budget,
        "engine": cfg,
    });
    let m = manifest("estimate", config, text, cfg.seed);
    let mut bytes = format!("# {}\n", serde_json::to_string(&m).expect("manifest serializes")).into_bytes();
    write_csv(&mut bytes, &reports).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    write_output(a.out.as_deref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_forms() {
        assert_eq!(parse_delta("2^-6"), Ok(2f64.powi(-6)));
        assert_eq!(parse_delta("2^(-3)"), Ok(0.125));
        assert_eq!(parse_delta("0.5"), Ok(0.5));
        assert!(parse_delta("1.5").is_err());
        assert!(parse_delta("0").is_err());
        assert!(parse_delta("2^3").is_err());
        assert!(parse_delta("half").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(EngineError::Algebra(AlgebraError::NotMixedHomogeneous)).code, EXIT_NOT_APPLICABLE);
        assert_eq!(Failure::from(EngineError::Budget(10)).code, EXIT_RESOURCE);
        assert_eq!(Failure::from(EngineError::construction("A2", "x")).code, EXIT_CONSTRUCTION);
        assert_eq!(Failure::from(EstimatorError::Budget { needed: 2.0, budget: 1.0 }).code, EXIT_RESOURCE);
    }

    #[test]
    fn manifest_keys() {
        let m = manifest("partition", json!({"delta": 0.5}), "x^2+y^2", 3);
        for k in ["command", "config", "poly", "version", "timestamp", "seed"] {
            assert!(m.get(k).is_some(), "{k}");
        }
    }

    #[test]
    fn svg_metadata_inserted() {
        let s = with_svg_metadata("<svg>\n<g/>\n</svg>\n", &json!({"a": "<b>"}));
        assert!(s.starts_with("<svg>\n<metadata>"));
        assert!(s.contains("&lt;b>"));
    }
}
