//! Closed target sets T ⊂ R^n: membership, distance, sphere sections and
//! the "meets every origin-centred sphere" check.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::sampling::{circle_point, grid_spacing, sphere_grid};
use crate::geom::{PointN, SpatialIndex};

/// Relative tolerance for membership in the closed-form set families.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    ExactFormula,
    CloudApproximate,
}

/// A finite sample standing in for a closed set.
pub struct PointCloud {
    index: SpatialIndex,
    /// Declared spacing of the sample relative to the set it approximates.
    resolution: f64,
}

impl PointCloud {
    pub fn new(points: Vec<PointN>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        if !(resolution >= 0.0) {
            return Err(Error::Domain("cloud resolution must be >= 0".into()));
        }
        Ok(Self { index: SpatialIndex::new(points)?, resolution })
    }

    pub fn points(&self) -> &[PointN] {
        self.index.points()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }
}

/// Reads one point per row, n decimal columns, no header. Blank lines and
/// lines starting with `#` are skipped.
pub fn load_point_cloud_csv(path: &Path, n: usize) -> Result<Vec<PointN>> {
    let ctx = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Csv { path: ctx.clone(), message: e.to_string() })?;
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv { path: ctx.clone(), message: e.to_string() })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != n {
            return Err(Error::Csv {
                path: ctx.clone(),
                message: format!("row {}: expected {n} columns, found {}", row + 1, rec.len()),
            });
        }
        let coords = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Csv { path: ctx.clone(), message: format!("row {}: {e}", row + 1) })?;
        out.push(PointN::new(coords)?);
    }
    Ok(out)
}

#[derive(Clone)]
pub enum SetKind {
    FullSpace,
    /// {a·u : a >= 0}, u a unit vector.
    RadialRay {
        direction: Vec<f64>,
    },
    /// {r (cos(ω ln r), sin(ω ln r)) : r > 0} ∪ {0} in R^2.
    LogSpiral {
        omega: f64,
    },
    /// Closed cone of half-angle α about the unit axis u.
    Cone {
        axis: Vec<f64>,
        half_angle: f64,
    },
    /// S(R). Fails the every-sphere hypothesis; kept for tests and for the
    /// hyperplane pullback.
    Sphere {
        radius: f64,
    },
    PointCloud(Arc<PointCloud>),
    Union(Vec<ClosedSetOracle>),
}

/// Closed target set with a distance oracle.
#[derive(Clone)]
pub struct ClosedSetOracle {
    dim: usize,
    kind: SetKind,
}

/// Sample of T ∩ S(r).
#[derive(Clone, Debug)]
pub struct SphereSection {
    pub radius: f64,
    pub points: Vec<PointN>,
    /// Spacing of the sample along S(r); zero for exact finite sections.
    pub resolution: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusCheck {
    pub radius: f64,
    pub min_distance: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<RadiusCheck>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &RadiusCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let len = crate::geom::PointN::from_slice(v)?.norm();
    if len == 0.0 {
        return Err(Error::Domain("direction vector must be non-zero".into()));
    }
    Ok(v.iter().map(|c| c / len).collect())
}

impl ClosedSetOracle {
    pub fn full_space(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, kind: SetKind::FullSpace })
    }

    pub fn radial_ray(direction: &[f64]) -> Result<Self> {
        Ok(Self { dim: direction.len(), kind: SetKind::RadialRay { direction: unit(direction)? } })
    }

    pub fn log_spiral(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::Domain("spiral angular speed must be finite".into()));
        }
        Ok(Self { dim: 2, kind: SetKind::LogSpiral { omega } })
    }

    pub fn cone(axis: &[f64], half_angle: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < PI) {
            return Err(Error::Domain("cone half-angle must lie in (0, π)".into()));
        }
        Ok(Self { dim: axis.len(), kind: SetKind::Cone { axis: unit(axis)?, half_angle } })
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0) {
            return Err(Error::Domain("sphere set radius must be > 0".into()));
        }
        Ok(Self { dim, kind: SetKind::Sphere { radius } })
    }

    pub fn point_cloud(points: Vec<PointN>, resolution: f64) -> Result<Self> {
        let cloud = PointCloud::new(points, resolution)?;
        let dim = cloud.index.dim();
        Ok(Self { dim, kind: SetKind::PointCloud(Arc::new(cloud)) })
    }

    pub fn union(children: Vec<ClosedSetOracle>) -> Result<Self> {
        let dim = children.first().map(|c| c.dim).ok_or(Error::Empty("set union"))?;
        if let Some(c) = children.iter().find(|c| c.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: c.dim });
        }
        Ok(Self { dim, kind: SetKind::Union(children) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn mode(&self) -> DistanceMode {
        match &self.kind {
            SetKind::PointCloud(_) => DistanceMode::CloudApproximate,
            SetKind::Union(ch) if ch.iter().any(|c| c.mode() == DistanceMode::CloudApproximate) => {
                DistanceMode::CloudApproximate
            }
            _ => DistanceMode::ExactFormula,
        }
    }

    /// Declared resolution: zero for exact kinds, the cloud spacing otherwise.
    pub fn resolution(&self) -> f64 {
        match &self.kind {
            SetKind::PointCloud(c) => c.resolution,
            SetKind::Union(ch) => ch.iter().map(|c| c.resolution()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// Tolerance for `contains` at x.
    pub fn membership_tol(&self, x: &PointN) -> f64 {
        EXACT_TOL * x.norm().max(1.0)
    }

    pub fn contains(&self, x: &PointN) -> bool {
        self.distance(x) <= self.membership_tol(x)
    }

    /// Euclidean distance from x to T (to the sample for clouds).
    pub fn distance(&self, x: &PointN) -> f64 {
        debug_assert_eq!(x.dim(), self.dim);
        match &self.kind {
            SetKind::FullSpace => 0.0,
            SetKind::RadialRay { direction } => ray_distance(direction, x.coords()),
            SetKind::LogSpiral { omega } => spiral_distance(*omega, x[0], x[1]),
            SetKind::Cone { axis, half_angle } => cone_distance(axis, *half_angle, x.coords()),
            SetKind::Sphere { radius } => (x.norm() - radius).abs(),
            SetKind::PointCloud(c) => c.index.nearest_index(x.coords()).map(|r| r.0).unwrap_or(f64::INFINITY),
            SetKind::Union(ch) => ch.iter().map(|c| c.distance(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Sample of T ∩ S(r). `samples` sets the grid density used for the
    /// continuum parts of the section.
    pub fn section(&self, r: f64, samples: usize) -> Result<SphereSection> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("section radius must be >= 0, got {r}")));
        }
        let n = self.dim;
        if r == 0.0 {
            let origin = PointN::zeros(n);
            if self.contains(&origin) {
                return Ok(SphereSection { radius: 0.0, points: vec![origin], resolution: 0.0 });
            }
            return Err(Error::EmptySection { radius: 0.0 });
        }
        let spacing = grid_spacing(n, r, samples);
        let (points, resolution) = match &self.kind {
            SetKind::FullSpace => (sphere_grid(n, r, samples), spacing),
            SetKind::RadialRay { direction } => (vec![PointN::raw(direction.iter().map(|c| c * r).collect())], 0.0),
            SetKind::LogSpiral { omega } => (vec![circle_point(r, omega * r.ln())], 0.0),
            SetKind::Cone { axis, half_angle } => {
                let mut pts = vec![PointN::raw(axis.iter().map(|c| c * r).collect())];
                if n == 2 {
                    let a0 = axis[1].atan2(axis[0]);
                    let steps = ((2.0 * half_angle * samples as f64 / TAU).ceil() as usize).max(1);
                    for i in 0..=steps {
                        let a = a0 - half_angle + 2.0 * half_angle * i as f64 / steps as f64;
                        pts.push(circle_point(r, a));
                    }
                } else {
                    pts.extend(
                        sphere_grid(n, r, samples)
                            .into_iter()
                            .filter(|p| cone_distance(axis, *half_angle, p.coords()) == 0.0),
                    );
                }
                (pts, spacing)
            }
            SetKind::Sphere { radius } => {
                if (r - radius).abs() <= EXACT_TOL * radius.max(1.0) {
                    (sphere_grid(n, r, samples), spacing)
                } else {
                    (Vec::new(), 0.0)
                }
            }
            SetKind::PointCloud(c) => {
                let shell = c.resolution;
                let pts = c
                    .points()
                    .iter()
                    .filter(|p| p.norm() > 0.0 && (p.norm() - r).abs() <= shell)
                    .map(|p| p.scale(r / p.norm()))
                    .collect();
                (pts, c.resolution)
            }
            SetKind::Union(ch) => {
                let mut pts = Vec::new();
                let mut res = 0.0_f64;
                for c in ch {
                    if let Ok(s) = c.section(r, samples) {
                        pts.extend(s.points);
                        res = res.max(s.resolution);
                    }
                }
                (pts, res)
            }
        };
        if points.is_empty() {
            return Err(Error::EmptySection { radius: r });
        }
        Ok(SphereSection { radius: r, points, resolution })
    }

    /// Checks that T meets S(r) for every r in the grid (r = 0 included
    /// means 0 ∈ T). The minimum of the distance over section points and a
    /// `samples`-point sphere grid must be within the set's tolerance.
    pub fn validate_meets_every_sphere(&self, r_grid: &[f64], samples: usize) -> ValidationReport {
        let mut radii: Vec<f64> = r_grid.to_vec();
        if !radii.contains(&0.0) {
            radii.insert(0, 0.0);
        }
        let checks: Vec<RadiusCheck> = radii
            .iter()
            .map(|&r| {
                let tol = self.resolution().max(EXACT_TOL * r.max(1.0));
                let mut min_d = f64::INFINITY;
                if let Ok(sec) = self.section(r, samples) {
                    for p in &sec.points {
                        min_d = min_d.min(self.distance(p));
                    }
                }
                for p in sphere_grid(self.dim, r, samples) {
                    min_d = min_d.min(self.distance(&p));
                }
                RadiusCheck { radius: r, min_distance: min_d, tolerance: tol, passed: min_d <= tol }
            })
            .collect();
        ValidationReport { passed: checks.iter().all(|c| c.passed), checks }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::BadDimension(n));
    }
    Ok(())
}

fn ray_distance(u: &[f64], x: &[f64]) -> f64 {
    let proj: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
    if proj <= 0.0 {
        return crate::geom::PointN::raw(x.to_vec()).norm();
    }
    x.iter().zip(u).map(|(a, b)| (a - proj * b) * (a - proj * b)).sum::<f64>().sqrt()
}

fn cone_distance(axis: &[f64], alpha: f64, x: &[f64]) -> f64 {
    let len = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if len == 0.0 {
        return 0.0;
    }
    let cos = (axis.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / len).clamp(-1.0, 1.0);
    let theta = cos.acos();
    if theta <= alpha {
        0.0
    } else if theta - alpha >= PI / 2.0 {
        len
    } else {
        len * (theta - alpha).sin()
    }
}

/// Squared distance from (x, y) to the spiral point at log-radius u.
fn spiral_gap_sq(omega: f64, x: f64, y: f64, u: f64) -> f64 {
    let r = u.exp();
    let (s, c) = (omega * u).sin_cos();
    (x - r * c).powi(2) + (y - r * s).powi(2)
}

/// Distance to {r(cos ω ln r, sin ω ln r)} ∪ {0}.
///
/// The crossings of the spiral with the ray through x bracket |x|; the
/// radial gap D to the nearer crossing bounds the answer, so only log-radii
/// with e^u ∈ [|x| − D, |x| + D] (at most one turn) need searching.
pub(crate) fn spiral_distance(omega: f64, x: f64, y: f64) -> f64 {
    let rho = x.hypot(y);
    if rho == 0.0 {
        return 0.0;
    }
    if omega == 0.0 {
        return ray_distance(&[1.0, 0.0], &[x, y]);
    }
    if omega < 0.0 {
        // mirror image across the first axis
        return spiral_distance(-omega, x, -y);
    }
    let phi = y.atan2(x);
    let lr = rho.ln();
    let turn = TAU / omega;
    let k = ((lr - phi / omega) / turn).floor();
    let u_lo = phi / omega + k * turn;
    let u_hi = u_lo + turn;
    let mut best = rho;
    let d_lo = rho - u_lo.exp();
    let d_hi = u_hi.exp() - rho;
    best = best.min(d_lo.abs()).min(d_hi.abs());
    let lo_r = (rho - best).max(rho * 1e-12);
    let a = lo_r.ln();
    let b = (rho + best).ln();
    if !(b > a) {
        return best;
    }
    let steps = (((b - a) / turn * 96.0).ceil() as usize).clamp(16, 20_000);
    let h = (b - a) / steps as f64;
    let g: Vec<f64> = (0..=steps).map(|i| spiral_gap_sq(omega, x, y, a + h * i as f64)).collect();
    let mut best_sq = best * best;
    for (i, &gi) in g.iter().enumerate() {
        best_sq = best_sq.min(gi);
        let left = if i > 0 { g[i - 1] } else { f64::INFINITY };
        let right = if i < steps { g[i + 1] } else { f64::INFINITY };
        if gi <= left && gi <= right {
            let lo = a + h * (i as f64 - 1.0).max(0.0);
            let hi = (a + h * (i as f64 + 1.0)).min(b);
            let m = golden_min(|u| spiral_gap_sq(omega, x, y, u), lo, hi, 80);
            best_sq = best_sq.min(m);
        }
    }
    best_sq.max(0.0).sqrt()
}

/// Golden-section minimisation on [a, b]; returns the smallest value seen.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd).min(f(a)).min(f(b));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            best = best.min(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            best = best.min(fd);
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    best
}

/// Serializable description of a target set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    FullSpace,
    RadialRay {
        direction: Vec<f64>,
    },
    LogSpiral {
        omega: f64,
    },
    Cone {
        axis: Vec<f64>,
        half_angle: f64,
    },
    Sphere {
        radius: f64,
    },
    PointCloud {
        /// CSV path, resolved relative to the config file.
        csv: Option<String>,
        /// Inline points, used when `csv` is absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        resolution: f64,
    },
    Union {
        children: Vec<SetSpec>,
    },
}

impl SetSpec {
    pub fn build(&self, n: usize, base_dir: Option<&Path>) -> Result<ClosedSetOracle> {
        let set = match self {
            SetSpec::FullSpace => ClosedSetOracle::full_space(n)?,
            SetSpec::RadialRay { direction } => ClosedSetOracle::radial_ray(direction)?,
            SetSpec::LogSpiral { omega } => {
                if n != 2 {
                    return Err(Error::Unsupported("the logarithmic spiral set is planar (n = 2)".into()));
                }
                ClosedSetOracle::log_spiral(*omega)?
            }
            SetSpec::Cone { axis, half_angle } => ClosedSetOracle::cone(axis, *half_angle)?,
            SetSpec::Sphere { radius } => ClosedSetOracle::sphere(n, *radius)?,
            SetSpec::PointCloud { csv, points, resolution } => {
                let pts = match (csv, points) {
                    (Some(path), _) => {
                        let p = Path::new(path);
                        let full = match base_dir {
                            Some(b) if p.is_relative() => b.join(p),
                            _ => p.to_path_buf(),
                        };
                        load_point_cloud_csv(&full, n)?
                    }
                    (None, Some(pts)) => pts.iter().map(|c| PointN::from_slice(c)).collect::<Result<_>>()?,
                    (None, None) => return Err(Error::Config(vec!["point_cloud needs `csv` or `points`".into()])),
                };
                ClosedSetOracle::point_cloud(pts, *resolution)?
            }
            SetSpec::Union { children } => {
                ClosedSetOracle::union(children.iter().map(|c| c.build(n, base_dir)).collect::<Result<_>>()?)?
            }
        };
        if set.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: set.dim() });
        }
        Ok(set)
    }
}
