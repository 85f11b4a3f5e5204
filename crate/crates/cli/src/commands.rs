use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use nilperc::cayley::{enumerate_ball, fit_growth, BallTable};
use nilperc::coupling::{coset_exploration, coupled_quotient_exploration, dominance_test};
use nilperc::haar::{lattice_count_anisotropic, measure_estimate, Region};
use nilperc::percolation::{
    cluster_stats, estimate_lambda_c, renormalize, sample_spread_out, Model, NeighborBall, RenormConfig, Window,
};
use nilperc::rng::derive_seed;
use nilperc::verify::{run_criterion, VerifyOptions};
use nilperc::Group;

use crate::config::{fail, record, CliError, Global, Output};
use crate::parse;

fn default_group() -> String {
    "z2".into()
}

fn lines(records: impl IntoIterator<Item = String>) -> String {
    records.into_iter().map(|r| r + "\n").collect()
}

fn report(path: &std::path::Path) {
    println!("wrote {}", path.display());
}

#[derive(Debug, Deserialize, Serialize)]
pub struct BallParams {
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_rmax")]
    rmax: usize,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_rmax() -> usize {
    10
}

pub fn ball(g: &Global, p: BallParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let t = enumerate_ball(&group, p.rmax, false, g.cap).map_err(fail)?;
    let path = Output::new(g, "ball", &p).write(p.out.as_deref(), "csv", &t.to_csv())?;
    println!("{}: beta({}) = {}", p.group, p.rmax, t.counts[p.rmax]);
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct GrowthParams {
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_growth_rmax")]
    rmax: usize,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_growth_rmax() -> usize {
    20
}

pub fn growth(g: &Global, p: GrowthParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let t = enumerate_ball(&group, p.rmax, false, g.cap).map_err(fail)?;
    let fit = fit_growth(&t).map_err(fail)?;
    let rec = record(json!({ "group": p.group, "rmax": p.rmax, "counts": t.counts, "fit": fit }));
    let path = Output::new(g, "growth", &p).write(p.out.as_deref(), "jsonl", &lines([rec]))?;
    println!("{}: degree {} (slope {:.4}), c_S = {:.5}", p.group, fit.fitted_degree, fit.slope, fit.c_s);
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct HaarParams {
    #[serde(default = "default_haar_group")]
    group: String,
    #[serde(default = "default_region")]
    region: String,
    #[serde(default = "default_haar_r")]
    r: Vec<f64>,
    #[serde(default = "one")]
    c_s: f64,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_haar_group() -> String {
    "heisenberg3".into()
}

fn default_region() -> String {
    "unitcube-graded".into()
}

fn default_haar_r() -> Vec<f64> {
    vec![10.0, 20.0, 40.0]
}

fn one() -> f64 {
    1.0
}

pub fn haar(g: &Global, p: HaarParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let region = parse::region(&p.region, group.dim())?;
    if p.r.is_empty() {
        return Err(CliError::Usage("need at least one scale".into()));
    }
    let est = measure_estimate(&group, p.c_s, &region, &p.r, 1.0, &p.region).map_err(fail)?;
    for row in &est.rows {
        println!("r = {}: count {}, ratio {:.6}", row.r, row.count, row.ratio);
    }
    let path = Output::new(g, "haar", &p).write(p.out.as_deref(), "csv", &est.to_csv())?;
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct LatticeCountParams {
    #[serde(default = "default_weights")]
    weights: Vec<u32>,
    #[serde(default)]
    lo: Option<Vec<f64>>,
    #[serde(default)]
    hi: Option<Vec<f64>>,
    #[serde(default = "default_lc_r")]
    r: Vec<f64>,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_weights() -> Vec<u32> {
    vec![1, 2]
}

fn default_lc_r() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}

pub fn lattice_count(g: &Global, p: LatticeCountParams) -> Result<(), CliError> {
    let d = p.weights.len();
    let lo = p.lo.clone().unwrap_or_else(|| vec![0.0; d]);
    let hi = p.hi.clone().unwrap_or_else(|| vec![1.0; d]);
    let region = Region::closed_box(lo, hi, nilperc::haar::CoordinateSystem::Exponential);
    let total: u32 = p.weights.iter().sum();
    let mut csv = String::from("r,count,ratio\n");
    for &r in &p.r {
        let c = lattice_count_anisotropic(&p.weights, &region, r).map_err(fail)?;
        let ratio = c as f64 / r.powi(total as i32);
        println!("r = {r}: count {c}, ratio {ratio:.6}");
        csv.push_str(&format!("{r},{c},{ratio}\n"));
    }
    let path = Output::new(g, "lattice-count", &p).write(p.out.as_deref(), "csv", &csv)?;
    report(&path);
    Ok(())
}

fn model(kind: &str, r: usize, lambda: f64, c_s: f64) -> Result<Model, CliError> {
    match kind {
        "word" => Ok(Model::WordMetric { r, lambda }),
        "cc" => Ok(Model::CCProxy { r, lambda, c_s }),
        _ => Err(CliError::Usage(format!("unknown model '{kind}', expected word or cc"))),
    }
}

/// `c_S` from the flags, or fitted on a ball of radius `max(20, 2 r)`.
fn resolve_c_s(group: &Group, given: Option<f64>, r: usize, cap: usize) -> Result<f64, CliError> {
    if let Some(c) = given {
        return Ok(c);
    }
    let t = enumerate_ball(group, (2 * r).max(20), false, cap).map_err(fail)?;
    Ok(fit_growth(&t).map_err(fail)?.c_s)
}

fn default_model() -> String {
    "word".into()
}

fn default_window() -> String {
    "torus:64".into()
}

#[derive(Debug, Deserialize, Serialize)]
pub struct PercolateParams {
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_model")]
    model: String,
    #[serde(default = "default_perc_r")]
    r: Vec<usize>,
    #[serde(default = "default_lambdas")]
    lambda: Vec<f64>,
    #[serde(default = "default_window")]
    window: String,
    #[serde(default = "default_seeds")]
    seeds: usize,
    #[serde(default)]
    c_s: Option<f64>,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_perc_r() -> Vec<usize> {
    vec![1]
}

fn default_lambdas() -> Vec<f64> {
    vec![2.0]
}

fn default_seeds() -> usize {
    5
}

pub fn percolate(g: &Global, p: PercolateParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let wspec = parse::window(&p.window, group.dim())?;
    let window = Window::build(&group, &wspec, g.cap).map_err(fail)?;
    let r_max = p.r.iter().copied().max().ok_or_else(|| CliError::Usage("need at least one r".into()))?;
    let t: BallTable = enumerate_ball(&group, r_max, true, g.cap).map_err(fail)?;
    let c_s = if p.model == "cc" { resolve_c_s(&group, p.c_s, r_max, g.cap)? } else { 0.0 };
    // the same seeds across (r, lambda) keep the samples coupled
    let mut jobs = Vec::new();
    for &r in &p.r {
        for &lambda in &p.lambda {
            for i in 0..p.seeds {
                jobs.push((model(&p.model, r, lambda, c_s)?, i));
            }
        }
    }
    let balls: Vec<NeighborBall> =
        p.r.iter().map(|&r| NeighborBall::new(&group, &t, r)).collect::<Result<_, _>>().map_err(fail)?;
    let records = jobs
        .par_iter()
        .map(|&(m, i)| {
            let nb = &balls[p.r.iter().position(|&r| r == m.r()).expect("r listed")];
            let seed = derive_seed(g.seed, i as u64);
            let s = sample_spread_out(&group, nb, m, &window, seed)?;
            let c = cluster_stats(&s);
            Ok(record(json!({
                "model": m, "r": m.r(), "lambda": m.lambda(), "seed_index": i, "seed": seed,
                "header": s.header, "report": c, "giant_fraction": c.giant_fraction(),
            })))
        })
        .collect::<Result<Vec<_>, nilperc::PercolationError>>()
        .map_err(fail)?;
    let path = Output::new(g, "percolate", &p).write(p.out.as_deref(), "jsonl", &lines(records))?;
    println!("{} samples on {} vertices", jobs.len(), window.len());
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct PcScanParams {
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_model")]
    model: String,
    #[serde(default = "default_pc_r")]
    r: usize,
    #[serde(default = "default_pc_window")]
    window: String,
    #[serde(default = "default_pc_seeds")]
    seeds: usize,
    #[serde(default = "default_theta")]
    theta: f64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default)]
    c_s: Option<f64>,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_pc_r() -> usize {
    1
}

fn default_pc_window() -> String {
    "torus:512".into()
}

fn default_pc_seeds() -> usize {
    15
}

fn default_theta() -> f64 {
    0.1
}

fn default_tol() -> f64 {
    0.05
}

pub fn pc_scan(g: &Global, p: PcScanParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let window = Window::build(&group, &parse::window(&p.window, group.dim())?, g.cap).map_err(fail)?;
    let t = enumerate_ball(&group, p.r, true, g.cap).map_err(fail)?;
    let nb = NeighborBall::new(&group, &t, p.r).map_err(fail)?;
    let c_s = if p.model == "cc" { resolve_c_s(&group, p.c_s, p.r, g.cap)? } else { 0.0 };
    let m = model(&p.model, p.r, 1.0, c_s)?;
    let seeds: Vec<u64> = (0..p.seeds as u64).map(|i| derive_seed(g.seed, i)).collect();
    let est = estimate_lambda_c(&group, &nb, m, &window, &seeds, p.theta, p.tol).map_err(fail)?;
    println!("lambda_c ~ {:.4} in [{:.4}, {:.4}]", est.lambda_hat, est.lo, est.hi);
    let rec = record(json!({ "group": p.group, "model": p.model, "r": p.r, "window": p.window, "estimate": est }));
    let path = Output::new(g, "pc-scan", &p).write(p.out.as_deref(), "jsonl", &lines([rec]))?;
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct RenormParams {
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_n")]
    n: u32,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_extent")]
    extent: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_renorm_r")]
    r: usize,
    #[serde(default = "default_renorm_lambda")]
    lambda: f64,
    #[serde(default)]
    c_s: Option<f64>,
}

fn default_n() -> u32 {
    6
}

fn default_alpha() -> f64 {
    0.3
}

fn default_extent() -> usize {
    7
}

fn default_samples() -> usize {
    200
}

fn default_renorm_r() -> usize {
    4
}

fn default_renorm_lambda() -> f64 {
    1.5
}

pub fn renorm(g: &Global, p: RenormParams) -> Result<(), CliError> {
    let group = parse::group(&p.group)?;
    let c_s = match p.c_s {
        Some(c) => c,
        None => {
            let t = enumerate_ball(&group, 64.max(2 * p.r), false, g.cap).map_err(fail)?;
            fit_growth(&t).map_err(fail)?.c_s
        }
    };
    let t = enumerate_ball(&group, p.r, true, g.cap).map_err(fail)?;
    let nb = NeighborBall::new(&group, &t, p.r).map_err(fail)?;
    let cfg = RenormConfig::new(group.spec(), p.n, p.alpha, p.extent, p.samples);
    let out = renormalize(&group, &cfg, &nb, c_s, p.lambda, g.seed, g.cap).map_err(fail)?;
    let s = &out.summary;
    println!(
        "P(X) = {:.4} over {} samples; {} far pairs, family {}",
        s.p_open,
        s.samples,
        s.pairs.len(),
        if s.family.passes { "passes" } else { "rejects" }
    );
    let o = Output::new(g, "renorm", &p);
    let grids: String = out.grids.iter().map(|gr| gr.to_grid_file(cfg.k_computed, cfg.n, cfg.alpha)).collect();
    let grid_path = o.write(None, "grid", &grids)?;
    let path = o.write(None, "jsonl", &lines([record(json!({ "c_s": c_s, "summary": s }))]))?;
    report(&grid_path);
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct CoupleParams {
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default = "default_quotient")]
    quotient: String,
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default = "default_couple_r")]
    r: u32,
    #[serde(default)]
    root: u32,
    #[serde(default = "default_runs")]
    runs: usize,
    #[serde(default = "default_levels")]
    levels: Vec<usize>,
    #[serde(default = "default_group")]
    group: String,
    #[serde(default = "default_h_gens")]
    h_gens: String,
    #[serde(default = "default_reps")]
    reps: String,
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default = "default_k")]
    m: usize,
    #[serde(default = "default_window_radius")]
    window_radius: usize,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn default_mode() -> String {
    "explore".into()
}

fn default_quotient() -> String {
    "ladder:41".into()
}

fn default_p() -> f64 {
    0.3
}

fn default_couple_r() -> u32 {
    1
}

fn default_runs() -> usize {
    100
}

fn default_levels() -> Vec<usize> {
    vec![2, 4, 8, 16]
}

fn default_h_gens() -> String {
    "2,0;0,1".into()
}

fn default_reps() -> String {
    "0,0;1,0".into()
}

fn default_k() -> usize {
    2
}

fn default_window_radius() -> usize {
    20
}

pub fn couple(g: &Global, p: CoupleParams) -> Result<(), CliError> {
    let o = Output::new(g, "couple", &p);
    let mut records = Vec::new();
    let (mut open, mut total) = (0usize, 0usize);
    match p.mode.as_str() {
        "explore" => {
            let q = parse::quotient(&p.quotient)?;
            for i in 0..p.runs {
                let t = coupled_quotient_exploration(&q, p.r, p.p, p.root, derive_seed(g.seed, i as u64)).map_err(fail)?;
                open += t.open_steps();
                total += t.steps.len();
                for s in &t.steps {
                    records.push(record(json!({ "exploration": i, "step": s })));
                }
            }
        }
        "coset" => {
            let group = parse::group(&p.group)?;
            let h = parse::points(&p.h_gens, group.dim())?;
            let x = parse::points(&p.reps, group.dim())?;
            for i in 0..p.runs {
                let (t, _) = coset_exploration(
                    &group,
                    &h,
                    &x,
                    p.k,
                    p.m,
                    p.r as usize,
                    p.p,
                    derive_seed(g.seed, i as u64),
                    p.window_radius,
                )
                .map_err(fail)?;
                open += t.open_steps();
                total += t.steps.len();
                for s in &t.steps {
                    records.push(record(json!({ "exploration": i, "step": s })));
                }
            }
        }
        "dominance" => {
            let q = parse::quotient(&p.quotient)?;
            let rep = dominance_test(&q, p.r, p.p, p.root, &p.levels, p.runs, g.seed).map_err(fail)?;
            for row in &rep.rows {
                println!(
                    "m = {}: base {:.4} vs quotient {:.4} ({})",
                    row.m,
                    row.p_base,
                    row.p_quotient,
                    if row.holds { "holds" } else { "fails" }
                );
                records.push(record(json!({ "p": rep.p, "q": rep.q, "seeds": rep.seeds, "row": row })));
            }
            let path = o.write(p.out.as_deref(), "jsonl", &lines(records))?;
            report(&path);
            return Ok(());
        }
        other => return Err(CliError::Usage(format!("unknown mode '{other}', expected explore, coset or dominance"))),
    }
    println!("{total} steps, open rate {:.4}", open as f64 / total.max(1) as f64);
    let path = o.write(p.out.as_deref(), "jsonl", &lines(records))?;
    report(&path);
    Ok(())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct VerifyParams {
    #[serde(default)]
    quick: bool,
    #[serde(default = "all_criteria")]
    criteria: Vec<u32>,
    #[serde(default, skip_serializing)]
    out: Option<PathBuf>,
}

fn all_criteria() -> Vec<u32> {
    (1..=10).collect()
}

pub fn verify(g: &Global, p: VerifyParams) -> Result<(), CliError> {
    if let Some(bad) = p.criteria.iter().find(|&&c| !(1..=10).contains(&c)) {
        return Err(CliError::Usage(format!("no criterion {bad}")));
    }
    let o = VerifyOptions { quick: p.quick, seed: g.seed };
    let mut data = String::new();
    let mut failed = Vec::new();
    for &id in &p.criteria {
        let r = run_criterion(id, &o);
        println!("{}", r.line());
        data.push_str(&r.data_line());
        data.push('\n');
        if !r.passed {
            failed.push(id);
        }
    }
    let path = Output::new(g, "verify", &p).write(p.out.as_deref(), "jsonl", &data)?;
    report(&path);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("criteria {failed:?} failed")))
    }
}
