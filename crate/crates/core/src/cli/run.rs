use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::sampling::{circle_point, random_direction};
use crate::geom::PointN;
use crate::growth::{gluing_winding, transcendental_map, unsupported_dim, AnnulusGluing, GrowthSchedule, Region};
use crate::map::{polynomial_composite, DynMap, MapMeta, ShrinkF, H1};
use crate::sets::ClosedSetOracle;
use crate::shrink::{saturate, PullbackMode, PullbackSet, ShrinkMap};
use crate::verify::{
    compare_to_target, distortion_probe, extract_mms, lipschitz_probe, Budget, DistortionMode, MMSExtract, Quantiles,
};
use crate::zorich::{PowerMap, ZorichMap};

use super::config::{Block, ExperimentConfig, MapSpec, RGridSpec, Spacing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Build,
    Maxmod,
    Mms,
    Distortion,
    Verify,
    All,
}

impl Subcommand {
    fn extracts(self) -> bool {
        !matches!(self, Subcommand::Build | Subcommand::Distortion)
    }
    fn compares(self) -> bool {
        matches!(self, Subcommand::Mms | Subcommand::Verify | Subcommand::All)
    }
    fn distortion(self) -> bool {
        matches!(self, Subcommand::Distortion | Subcommand::Verify | Subcommand::All)
    }
    fn properties(self) -> bool {
        matches!(self, Subcommand::Verify | Subcommand::All)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusRow {
    pub r: f64,
    pub m_est: f64,
    pub argmax_count: usize,
    /// None when no comparison was run.
    pub hausdorff: Option<f64>,
    pub in_exceptional: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

impl SuiteResult {
    fn at_most(name: &str, measured: f64, bound: f64, detail: String) -> Self {
        Self { name: name.into(), passed: measured <= bound, measured, bound, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionSummary {
    pub name: String,
    pub mode: DistortionMode,
    pub probe_radius: f64,
    pub summary: Quantiles,
    pub excluded: usize,
    pub degenerate: usize,
    pub reversed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub r: f64,
    /// ln Ψ(r) for the piecewise-linear degree function
    pub log_psi: f64,
    /// ln M(r, D̃) of the gluing model
    pub log_model_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub subcommand: Subcommand,
    pub config: ExperimentConfig,
    pub map: MapMeta,
    pub notes: Vec<String>,
    pub rows: Vec<RadiusRow>,
    pub suites: Vec<SuiteResult>,
    pub distortion: Vec<DistortionSummary>,
    pub growth: Vec<GrowthRow>,
    pub passed: bool,
    /// Set by the runner when an SVG is written or skipped.
    pub svg: Option<String>,
    /// Argmax and section samples for plotting; not serialized.
    #[serde(skip)]
    pub plot: Option<PlotData>,
    /// Wall-clock seconds per stage; written to a separate file so the
    /// report stays reproducible.
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default)]
pub struct PlotData {
    pub target: Vec<PointN>,
    pub mset: Vec<PointN>,
}

/// Everything built from a config.
pub struct Built {
    pub set: ClosedSetOracle,
    pub zorich: ZorichMap,
    pub shrink: ShrinkMap,
    pub map: DynMap,
    pub schedule: Option<GrowthSchedule>,
    pub gluing: Option<AnnulusGluing>,
    pub degree: Option<u32>,
    pub notes: Vec<String>,
}

fn default_sample_radii(grid: &[f64]) -> RGridSpec {
    let lo = grid.iter().cloned().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let lo = if lo.is_finite() { lo } else { 1.0 };
    let hi = grid.iter().cloned().fold(lo, f64::max);
    RGridSpec { spacing: Spacing::Geometric, min: lo * (-2.0f64).exp(), max: hi * 2.0f64.exp(), count: 400 }
}

/// Builds oracles, pullback, h₁ and the composite described by the config.
pub fn build(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Built> {
    config.validate()?;
    let n = config.dimension;
    if matches!(config.map, MapSpec::Transcendental { .. }) && n != 2 {
        return Err(unsupported_dim(n));
    }
    let set = config.set.build(n, base_dir)?;
    let zorich = ZorichMap::new(n)?;
    let grid = config.verify.r_grid.build();
    let mut notes = Vec::new();
    let pb = &config.pullback;
    let pullback = match pb.mode {
        PullbackMode::Analytic => PullbackSet::analytic(&set, &zorich, pb.r_max)?,
        PullbackMode::Sampled => {
            let radii = pb.sample_radii.clone().unwrap_or_else(|| default_sample_radii(&grid)).build();
            let p = PullbackSet::sampled(&set, &zorich, &radii, pb.samples_per_sphere, pb.r_max)?;
            notes.push(format!(
                "sampled pullback: the map fixes the sampled points of T, not T itself (estimated resolution {})",
                p.resolution()
            ));
            p
        }
    };
    let shrink = ShrinkMap::new(pullback);
    let (map, schedule, gluing, degree): (DynMap, _, _, _) = match &config.map {
        MapSpec::Polynomial { degree } => (polynomial_composite(shrink.clone(), *degree)?, None, None, Some(*degree)),
        MapSpec::Transcendental { schedule, epsilon } => {
            let s = schedule.build(*epsilon)?;
            let g = AnnulusGluing::new(s.clone())?;
            notes.push(
                "transcendental model: planar annulus gluing with integer degrees on good annuli; Ψ is reported as the \
                 reference growth"
                    .into(),
            );
            (transcendental_map(g.clone(), shrink.clone())?, Some(s), Some(g), None)
        }
        MapSpec::BuildingBlock { block, degree, schedule, epsilon } => match block {
            Block::Zorich => (std::sync::Arc::new(zorich.clone()) as DynMap, None, None, None),
            Block::Power => {
                let d = degree.unwrap_or(2);
                (std::sync::Arc::new(PowerMap::new(zorich.clone(), d)?) as DynMap, None, None, Some(d))
            }
            Block::ShrinkF => (std::sync::Arc::new(ShrinkF(shrink.clone())) as DynMap, None, None, None),
            Block::H1 => (std::sync::Arc::new(H1(shrink.clone())) as DynMap, None, None, None),
            Block::Gluing => {
                if n != 2 {
                    return Err(unsupported_dim(n));
                }
                let s = schedule
                    .clone()
                    .unwrap_or(super::config::ScheduleSpec::ExpExp { count: 4 })
                    .build(epsilon.unwrap_or(super::config::DEFAULT_GLUING_EPSILON))?;
                let g = AnnulusGluing::new(s.clone())?;
                (std::sync::Arc::new(g.clone()) as DynMap, Some(s), Some(g), None)
            }
        },
    };
    if let Some(g) = &gluing {
        for (k, _, _) in g.blend_annuli() {
            let p = g.profile(k);
            if !p.dilatation.is_finite() {
                notes.push(format!(
                    "blend annulus {k} folds at epsilon = {} (negative Jacobian), so the gluing is not quasiregular \
                     there; smaller epsilon (e.g. {}) avoids this",
                    g.schedule().epsilon(),
                    super::config::DEFAULT_GLUING_EPSILON
                ));
            }
        }
    }
    Ok(Built { set, zorich, shrink, map, schedule, gluing, degree, notes })
}

fn is_theorem_map(config: &ExperimentConfig) -> bool {
    matches!(config.map, MapSpec::Polynomial { .. } | MapSpec::Transcendental { .. })
}

fn budget(config: &ExperimentConfig) -> Budget {
    let v = &config.verify;
    Budget {
        samples: v.samples_per_sphere,
        refine_starts: v.refine_starts,
        refine_iters: v.refine_iters,
        seed: config.seed,
    }
}

/// Random points of log-coordinate space over the canonical cells, at
/// heights covering the verification radii.
fn log_box_points(rng: &mut ChaCha8Rng, z: &ZorichMap, grid: &[f64], count: usize) -> Vec<PointN> {
    let n = z.dim();
    let lo = grid.iter().cloned().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    let (lo, hi) = if lo.is_finite() { (lo.ln(), grid.iter().cloned().fold(lo, f64::max).ln()) } else { (-1.0, 1.0) };
    (0..count)
        .map(|_| {
            let mut sigma: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            sigma[0] = rng.random_range(-1.0..3.0);
            let mut c = z.from_cell(&sigma);
            c.push(if hi > lo { rng.random_range(lo..hi) } else { lo });
            PointN::raw(c)
        })
        .collect()
}

fn random_sphere_point(rng: &mut ChaCha8Rng, n: usize, grid: &[f64]) -> PointN {
    let r = grid[rng.random_range(0..grid.len())];
    let r = if r > 0.0 { r } else { 1.0 };
    random_direction(rng, n).scale(r)
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, name: &str, f: impl FnOnce() -> T) -> T {
    let t0 = Instant::now();
    let out = f();
    timings.insert(name.into(), t0.elapsed().as_secs_f64());
    out
}

/// Runs one subcommand end to end.
pub fn run_experiment(config: &ExperimentConfig, sub: Subcommand, base_dir: Option<&Path>) -> Result<RunReport> {
    let mut timings = BTreeMap::new();
    let built = timed(&mut timings, "build", || build(config, base_dir))?;
    let n = config.dimension;
    let grid = config.verify.r_grid.build();
    let tol = config.verify.tolerances.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut suites = Vec::new();
    let mut distortion = Vec::new();
    let mut notes = built.notes.clone();

    let coverage = built.set.validate_meets_every_sphere(
        &grid,
        config.verify.section_samples.unwrap_or(config.verify.samples_per_sphere).min(4096),
    );
    let worst = coverage.checks.iter().map(|c| c.min_distance - c.tolerance).fold(f64::NEG_INFINITY, f64::max);
    suites.push(SuiteResult {
        name: "set_meets_every_sphere".into(),
        passed: coverage.passed,
        measured: coverage.failures().count() as f64,
        bound: 0.0,
        detail: format!(
            "radii without a section point: {} of {} (worst excess {worst})",
            coverage.failures().count(),
            grid.len()
        ),
    });

    let mut extract: Option<MMSExtract> = None;
    let mut rows = Vec::new();
    if sub.extracts() {
        let x = timed(&mut timings, "extract", || {
            extract_mms(built.map.as_ref(), &grid, &budget(config), built.schedule.as_ref())
        })?;
        rows = x
            .results
            .iter()
            .zip(&x.exceptional)
            .map(|(r, &e)| RadiusRow {
                r: r.radius,
                m_est: r.m_est,
                argmax_count: r.argmax.len(),
                hausdorff: None,
                in_exceptional: e,
            })
            .collect();
        extract = Some(x);
    }

    let section_samples = config.verify.section_samples.unwrap_or(config.verify.samples_per_sphere);
    let mut plot = None;
    if sub.compares() {
        let x = extract.as_ref().expect("extraction ran");
        let exclude = built.schedule.is_some();
        let cmp = timed(&mut timings, "compare", || {
            compare_to_target(x, &built.set, exclude, section_samples, tol.hausdorff_factor)
        })?;
        for (row, c) in rows.iter_mut().zip(&cmp.rows) {
            row.hausdorff = Some(c.hausdorff);
        }
        if is_theorem_map(config) {
            let failed: Vec<f64> = cmp.rows.iter().filter(|r| !r.passed).map(|r| r.radius).collect();
            suites.push(SuiteResult {
                name: "mms_matches_target".into(),
                passed: cmp.passed,
                measured: cmp.worst_ratio,
                bound: 1.0,
                detail: format!(
                    "max Hausdorff/bound over checked radii (bound = {} x grid spacing); exceptional radii skipped: {}; failing radii: {:?}",
                    tol.hausdorff_factor,
                    cmp.rows.iter().filter(|r| !r.checked).count(),
                    failed
                ),
            });
        }
        if n == 2 {
            let target = grid
                .iter()
                .filter_map(|&r| built.set.section(r, section_samples.min(256)).ok())
                .flat_map(|s| s.points)
                .collect();
            plot = Some(PlotData { target, mset: x.union_points() });
        }
    }

    if sub.properties() {
        timed(&mut timings, "properties", || property_suites(config, &built, &grid, &mut rng, &mut suites));
    }

    if sub.distortion() {
        timed(&mut timings, "distortion", || {
            distortion_suites(config, &built, &grid, &mut rng, &mut suites, &mut distortion)
        })?;
    }

    let mut growth = Vec::new();
    if let (Some(s), Some(g)) = (&built.schedule, &built.gluing) {
        growth = grid
            .iter()
            .filter(|&&r| r >= 1.0)
            .map(|&r| GrowthRow { r, log_psi: s.log_psi(r).unwrap_or(f64::NAN), log_model_max: g.log_max_modulus(r) })
            .collect();
        let dens: Vec<String> = s
            .radii()
            .iter()
            .filter(|&&r| r > 1.0)
            .map(|&r| format!("{}", s.log_density(r).unwrap_or(f64::NAN)))
            .collect();
        notes.push(format!("log density of E_eps at r_n: [{}]", dens.join(", ")));
    }
    if built.shrink.pullback().mode() == PullbackMode::Sampled {
        notes.push("pullback distances are exact for the sample, so suites measure the sampled map".into());
    }

    let passed = suites.iter().all(|s| s.passed);
    Ok(RunReport {
        subcommand: sub,
        config: config.clone(),
        map: built.map.meta(),
        notes,
        rows,
        suites,
        distortion,
        growth,
        passed,
        svg: None,
        plot,
        timings,
    })
}

fn property_suites(
    config: &ExperimentConfig,
    built: &Built,
    grid: &[f64],
    rng: &mut ChaCha8Rng,
    suites: &mut Vec<SuiteResult>,
) {
    let n = config.dimension;
    let tol = &config.verify.tolerances;
    let z = &built.zorich;
    let pb = built.shrink.pullback();
    let m = config.verify.modulus_samples;

    // p ∘ d is 1-Lipschitz: far pairs and close pairs
    let pts = log_box_points(rng, z, grid, 2 * config.verify.lipschitz_pairs);
    let mut pairs = Vec::with_capacity(config.verify.lipschitz_pairs);
    for (i, c) in pts.chunks(2).enumerate() {
        let b = if i % 2 == 0 {
            c[1].clone()
        } else {
            let d = random_direction(rng, n).scale(rng.random_range(1e-6..0.2));
            &c[0] + &d
        };
        pairs.push((c[0].clone(), b));
    }
    let lip = lipschitz_probe(|y| saturate(pb.distance(y)), &pairs);
    suites.push(SuiteResult::at_most(
        "pullback_p_lipschitz",
        lip.max_ratio,
        1.0 + tol.lipschitz_slack,
        format!("{} pairs, {} coincident skipped", lip.pairs_used, lip.skipped),
    ));

    // h₁ modulus law, identity on T, branch independence
    let xs: Vec<PointN> = (0..m).map(|_| random_sphere_point(rng, n, grid)).collect();
    let gens = z.generators();
    let picks: Vec<usize> = (0..m).map(|_| rng.random_range(0..gens.len())).collect();
    let errs: Vec<(f64, f64)> = xs
        .par_iter()
        .zip(&picks)
        .map(|(x, &g)| {
            let y = z.invert(x).expect("non-zero");
            let want = x.norm() * (-0.5 * saturate(pb.distance(&y))).exp();
            let got = built.shrink.h1(x);
            let alt = built.shrink.h1_via(&z.apply(&gens[g], &y));
            ((got.norm() - want).abs() / want, alt.distance(&got) / x.norm())
        })
        .collect();
    let law = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let branch = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    suites.push(SuiteResult::at_most("h1_modulus_law", law, 1e-10, format!("{m} sphere samples, relative error")));
    suites.push(SuiteResult::at_most(
        "h1_branch_independence",
        branch,
        1e-10,
        format!("{m} samples, random generator"),
    ));
    if pb.mode() == PullbackMode::Analytic {
        let on_t: Vec<PointN> = grid
            .iter()
            .cycle()
            .take(m.min(1000).max(grid.len().min(1000)))
            .filter_map(|&r| built.set.section(r, 16).ok())
            .filter_map(|s| s.points.into_iter().next())
            .collect();
        let fix =
            on_t.par_iter().map(|x| built.shrink.h1(x).distance(x) / x.norm().max(1e-300)).reduce(|| 0.0, f64::max);
        suites.push(SuiteResult::at_most("h1_identity_on_target", fix, 1e-9, format!("{} target samples", on_t.len())));
    }

    if let Some(d) = built.degree {
        if is_theorem_map(config) {
            let power = PowerMap::new(z.clone(), d).expect("degree checked");
            // Schröder identity P∘Z = Z∘A
            let ys: Vec<PointN> = (0..m)
                .map(|_| {
                    let mut c: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-8.0..8.0)).collect();
                    c.push(rng.random_range(-3.0..3.0));
                    PointN::raw(c)
                })
                .collect();
            let sch = ys
                .par_iter()
                .map(|y| {
                    let a = power.eval(&z.eval(y));
                    let b = z.eval(&y.scale(d as f64));
                    a.distance(&b) / b.norm()
                })
                .reduce(|| 0.0, f64::max);
            suites.push(SuiteResult::at_most(
                "schroder_identity",
                sch,
                tol.modulus_rel,
                format!("{m} samples, |x_n| <= 3"),
            ));
            // |h(x)| = (|x| e^{-p/2})^d
            let gap = xs
                .par_iter()
                .map(|x| {
                    let y = z.invert(x).expect("non-zero");
                    let want = (x.norm() * (-0.5 * saturate(pb.distance(&y))).exp()).powi(d as i32);
                    (built.map.eval(x).norm() - want).abs() / want
                })
                .reduce(|| 0.0, f64::max);
            suites.push(SuiteResult::at_most(
                "composite_modulus_gap",
                gap,
                tol.modulus_rel,
                format!("{m} sphere samples"),
            ));
        }
    }

    if let Some(g) = &built.gluing {
        gluing_suites(built, g, grid, suites);
    }
}

fn gluing_suites(built: &Built, g: &AnnulusGluing, grid: &[f64], suites: &mut Vec<SuiteResult>) {
    let s = g.schedule();
    let good: Vec<f64> = grid.iter().cloned().filter(|&r| r > 0.0 && !s.in_exceptional(r)).collect();
    let circle = |r: f64, count: usize| -> Vec<PointN> {
        (0..count).map(|i| circle_point(r, TAU * i as f64 / count as f64)).collect()
    };
    let spread = good
        .par_iter()
        .map(|&r| {
            let mods: Vec<f64> = circle(r, 2048).iter().map(|x| g.eval(x).norm()).collect();
            let mean = mods.iter().sum::<f64>() / mods.len() as f64;
            let var = mods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / mods.len() as f64;
            if matches!(g.region(r), Region::Good { .. }) {
                var.sqrt() / mean
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max);
    suites.push(SuiteResult::at_most(
        "gluing_circle_modulus",
        spread,
        1e-9,
        format!("relative standard deviation over 2048 samples on {} radii outside E_eps", good.len()),
    ));

    let sampled: Vec<f64> = grid
        .par_iter()
        .map(|&r| circle(r, 1024).iter().map(|x| g.eval(x).norm().ln()).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let drops = sampled.windows(2).filter(|w| !(w[1] > w[0])).count()
        + grid.windows(2).filter(|w| !(g.log_max_modulus(w[1]) > g.log_max_modulus(w[0]))).count();
    suites.push(SuiteResult::at_most(
        "gluing_max_modulus_increasing",
        drops as f64,
        0.0,
        "non-increasing grid steps".into(),
    ));

    let mut bad = 0usize;
    let mut detail = Vec::new();
    for (k, lo, hi) in g.blend_annuli() {
        let inner = gluing_winding(g, lo * (1.0 - 1e-6), 8192).round() as i64;
        let outer = gluing_winding(g, hi * (1.0 + 1e-6), 8192).round() as i64;
        if inner != k as i64 || outer != k as i64 + 1 {
            bad += 1;
        }
        detail.push(format!("k={k}: {inner}->{outer}"));
    }
    suites.push(SuiteResult::at_most("gluing_winding_increment", bad as f64, 0.0, detail.join(", ")));

    // on good circles: T attains M(r, h) = M(r, D̃) and every other sample is below
    let on_target: Vec<(f64, f64, f64)> = good
        .par_iter()
        .filter_map(|&r| {
            let sec = built.set.section(r, 64).ok()?;
            let x = sec.points.first()?.clone();
            let model = g.max_modulus(r);
            let at_t = built.map.eval(&x).norm();
            let off = circle(r, 256)
                .iter()
                .filter(|q| built.set.distance(q) > 1e-6 * r)
                .map(|q| built.map.eval(q).norm())
                .fold(0.0, f64::max);
            Some(((at_t - model).abs() / model, off / model, r))
        })
        .collect();
    let law = on_target.iter().map(|v| v.0).fold(0.0, f64::max);
    let above = on_target.iter().filter(|v| !(v.1 < 1.0)).count();
    suites.push(SuiteResult::at_most(
        "transcendental_target_attains_max",
        law,
        1e-10,
        format!("{} good radii", on_target.len()),
    ));
    suites.push(SuiteResult::at_most(
        "transcendental_off_target_below_max",
        above as f64,
        0.0,
        "good radii where an off-target sample reached the maximum".into(),
    ));
}

fn distortion_suites(
    config: &ExperimentConfig,
    built: &Built,
    grid: &[f64],
    rng: &mut ChaCha8Rng,
    suites: &mut Vec<SuiteResult>,
    out: &mut Vec<DistortionSummary>,
) -> Result<()> {
    let plan = &config.verify.distortion;
    let tol = &config.verify.tolerances;
    let z = &built.zorich;
    let f = ShrinkF(built.shrink.clone());
    let base = log_box_points(rng, z, grid, plan.samples);
    let round = distortion_probe(&f, &base, plan.probe_radius, DistortionMode::Roundness)?;
    suites.push(SuiteResult::at_most(
        "shrink_f_roundness",
        round.summary.max,
        tol.roundness_bound,
        format!("{} base points in log coordinates, probe radius {}", round.summary.count, plan.probe_radius),
    ));
    out.push(summary("shrink_f", &round));

    let on_spheres: Vec<PointN> = (0..plan.samples).map(|_| random_sphere_point(rng, config.dimension, grid)).collect();
    let jac = distortion_probe(built.map.as_ref(), &on_spheres, plan.probe_radius * 1e-3, DistortionMode::Jacobian)?;
    out.push(summary("map", &jac));

    if let Some(g) = &built.gluing {
        let mut worst = 0.0_f64;
        let mut reversed = 0;
        for (k, lo, hi) in g.blend_annuli() {
            let pts: Vec<PointN> = (0..plan.samples)
                .map(|_| {
                    let r = (rng.random_range(lo.ln()..hi.ln())).exp();
                    circle_point(r, rng.random_range(0.0..TAU))
                })
                .collect();
            let rep = distortion_probe(g, &pts, 1e-7 * hi, DistortionMode::Jacobian)?;
            worst = worst.max(rep.summary.max);
            reversed += rep.reversed.len();
            out.push(summary(&format!("gluing_blend_{k}"), &rep));
        }
        let mut suite = SuiteResult::at_most(
            "gluing_blend_distortion",
            worst,
            tol.gluing_distortion_bound,
            format!(
                "max singular value ratio over blend annuli (points near the blend zero excluded), \
                 {reversed} points with negative Jacobian"
            ),
        );
        suite.passed &= reversed == 0;
        suites.push(suite);
    }
    Ok(())
}

fn summary(name: &str, r: &crate::verify::DistortionReport) -> DistortionSummary {
    DistortionSummary {
        name: name.into(),
        mode: r.mode,
        probe_radius: r.probe_radius,
        summary: r.summary.clone(),
        excluded: r.excluded.len(),
        degenerate: r.degenerate.len(),
        reversed: r.reversed.len(),
    }
}

/// Runs `f` on a pool with `threads` workers (or the default pool).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))
            .map(|p| p.install(f)),
    }
}
