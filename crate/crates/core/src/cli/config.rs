use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthSchedule;
use crate::sets::SetSpec;
use crate::shrink::{PullbackMode, DEFAULT_R_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Geometric,
}

fn geometric() -> Spacing {
    Spacing::Geometric
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RGridSpec {
    #[serde(default = "geometric")]
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RGridSpec {
    pub fn build(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Geometric => (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    fn check(&self, field: &str, errs: &mut Vec<String>) {
        if self.count == 0 {
            errs.push(format!("{field}.count: r-grid must contain at least one radius"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min < 0.0 {
            errs.push(format!("{field}: min and max must be finite and >= 0"));
        }
        if self.max < self.min {
            errs.push(format!("{field}: max ({}) < min ({})", self.max, self.min));
        }
        if self.spacing == Spacing::Geometric && !(self.min > 0.0) {
            errs.push(format!("{field}.min: geometric grids need min > 0"));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// r_n = exp(eⁿ), n = 1..=count
    ExpExp {
        count: usize,
    },
    Explicit {
        radii: Vec<f64>,
    },
}

impl ScheduleSpec {
    pub fn build(&self, epsilon: f64) -> Result<GrowthSchedule> {
        match self {
            ScheduleSpec::ExpExp { count } => GrowthSchedule::exp_exp(*count, epsilon),
            ScheduleSpec::Explicit { radii } => GrowthSchedule::new(radii.clone(), epsilon),
        }
    }
}

fn default_schedule() -> ScheduleSpec {
    ScheduleSpec::ExpExp { count: 4 }
}

/// Default ε for gluing: the blend annuli at ε = 1/2 are too thin for an
/// unfolded blend.
pub const DEFAULT_GLUING_EPSILON: f64 = 0.01;

fn gluing_epsilon() -> f64 {
    DEFAULT_GLUING_EPSILON
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Zorich,
    Power,
    ShrinkF,
    H1,
    Gluing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// h = P ∘ h₁ with a degree-d power map
    Polynomial { degree: u32 },
    /// h = D̃ ∘ h₁ (n = 2)
    Transcendental {
        #[serde(default = "default_schedule")]
        schedule: ScheduleSpec,
        #[serde(default = "gluing_epsilon")]
        epsilon: f64,
    },
    BuildingBlock {
        block: Block,
        #[serde(default)]
        degree: Option<u32>,
        #[serde(default)]
        schedule: Option<ScheduleSpec>,
        #[serde(default)]
        epsilon: Option<f64>,
    },
}

fn r_max_default() -> f64 {
    DEFAULT_R_MAX
}

fn analytic() -> PullbackMode {
    PullbackMode::Analytic
}

fn pullback_samples() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackConfig {
    #[serde(default = "analytic")]
    pub mode: PullbackMode,
    #[serde(default = "r_max_default")]
    pub r_max: f64,
    /// Section radii for sampled mode; defaults to a geometric grid around
    /// the verification radii.
    #[serde(default)]
    pub sample_radii: Option<RGridSpec>,
    #[serde(default = "pullback_samples")]
    pub samples_per_sphere: usize,
}

impl Default for PullbackConfig {
    fn default() -> Self {
        Self { mode: analytic(), r_max: DEFAULT_R_MAX, sample_radii: None, samples_per_sphere: pullback_samples() }
    }
}

fn d_samples() -> usize {
    200
}
fn d_probe() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionPlan {
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_probe")]
    pub probe_radius: f64,
}

impl Default for DistortionPlan {
    fn default() -> Self {
        Self { samples: d_samples(), probe_radius: d_probe() }
    }
}

fn t_hausdorff() -> f64 {
    2.0
}
fn t_modulus() -> f64 {
    1e-9
}
fn t_round() -> f64 {
    3.05
}
fn t_gluing() -> f64 {
    100.0
}
fn t_lip() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Hausdorff bound as a multiple of the sphere grid spacing.
    #[serde(default = "t_hausdorff")]
    pub hausdorff_factor: f64,
    #[serde(default = "t_modulus")]
    pub modulus_rel: f64,
    #[serde(default = "t_round")]
    pub roundness_bound: f64,
    #[serde(default = "t_gluing")]
    pub gluing_distortion_bound: f64,
    #[serde(default = "t_lip")]
    pub lipschitz_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hausdorff_factor: t_hausdorff(),
            modulus_rel: t_modulus(),
            roundness_bound: t_round(),
            gluing_distortion_bound: t_gluing(),
            lipschitz_slack: t_lip(),
        }
    }
}

fn v_samples() -> usize {
    2048
}
fn v_starts() -> usize {
    4
}
fn v_iters() -> usize {
    80
}
fn v_pairs() -> usize {
    10_000
}
fn v_modulus() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyPlan {
    pub r_grid: RGridSpec,
    #[serde(default = "v_samples")]
    pub samples_per_sphere: usize,
    #[serde(default = "v_starts")]
    pub refine_starts: usize,
    #[serde(default = "v_iters")]
    pub refine_iters: usize,
    /// Density of T ∩ S(r) samples; defaults to samples_per_sphere.
    #[serde(default)]
    pub section_samples: Option<usize>,
    #[serde(default)]
    pub distortion: DistortionPlan,
    #[serde(default = "v_pairs")]
    pub lipschitz_pairs: usize,
    #[serde(default = "v_modulus")]
    pub modulus_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn stem() -> String {
    "qrmax".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the config file; overridden by --out-dir.
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "stem")]
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, stem: stem() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub seed: u64,
    pub set: SetSpec,
    #[serde(default)]
    pub pullback: PullbackConfig,
    pub map: MapSpec,
    pub verify: VerifyPlan,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Parse and validate.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Config(vec![e.to_string()]))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Schema checks that do not need any computation. Scope limits (such
    /// as transcendental maps in n ≥ 3) are reported separately at build time.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.dimension < 2 {
            errs.push(format!("dimension: must be >= 2, got {}", self.dimension));
        }
        self.verify.r_grid.check("verify.r_grid", &mut errs);
        let v = &self.verify;
        if v.samples_per_sphere == 0 {
            errs.push("verify.samples_per_sphere: must be >= 1".into());
        }
        if v.section_samples == Some(0) {
            errs.push("verify.section_samples: must be >= 1".into());
        }
        if !(v.distortion.probe_radius > 0.0) {
            errs.push("verify.distortion.probe_radius: must be > 0".into());
        }
        let t = &v.tolerances;
        for (name, x) in [
            ("hausdorff_factor", t.hausdorff_factor),
            ("modulus_rel", t.modulus_rel),
            ("roundness_bound", t.roundness_bound),
            ("gluing_distortion_bound", t.gluing_distortion_bound),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                errs.push(format!("verify.tolerances.{name}: must be finite and > 0"));
            }
        }
        if !(t.lipschitz_slack >= 0.0) {
            errs.push("verify.tolerances.lipschitz_slack: must be >= 0".into());
        }
        if !(self.pullback.r_max > 0.0 && self.pullback.r_max.is_finite()) {
            errs.push("pullback.r_max: must be finite and > 0".into());
        }
        if let Some(g) = &self.pullback.sample_radii {
            g.check("pullback.sample_radii", &mut errs);
        }
        if self.pullback.mode == PullbackMode::Sampled && self.pullback.samples_per_sphere == 0 {
            errs.push("pullback.samples_per_sphere: must be >= 1".into());
        }
        match &self.map {
            MapSpec::Polynomial { degree } => {
                if *degree < 2 {
                    errs.push(format!("map.degree: polynomial degree must be an integer >= 2, got {degree}"));
                }
            }
            MapSpec::Transcendental { schedule, epsilon } => {
                if let Err(e) = schedule.build(*epsilon) {
                    errs.push(format!("map.schedule: {e}"));
                }
            }
            MapSpec::BuildingBlock { block, degree, schedule, epsilon } => {
                if degree.is_some_and(|d| d < 2) {
                    errs.push("map.degree: power map degree must be >= 2".into());
                }
                if *block == Block::Gluing {
                    let s = schedule.clone().unwrap_or_else(default_schedule);
                    if let Err(e) = s.build(epsilon.unwrap_or(DEFAULT_GLUING_EPSILON)) {
                        errs.push(format!("map.schedule: {e}"));
                    }
                }
            }
        }
        if self.output.stem.is_empty() || self.output.stem.contains(['/', '\\']) {
            errs.push("output.stem: must be a plain non-empty file stem".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
