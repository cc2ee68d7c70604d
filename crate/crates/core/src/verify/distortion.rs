use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::sampling::sphere_grid;
use crate::geom::PointN;
use crate::map::MapExpr;

/// Base points closer than this to a known non-smooth locus are skipped in
/// Jacobian mode (the difference stencil is widened to twice the step).
pub const KINK_EXCLUSION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionMode {
    Jacobian,
    Roundness,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointEstimate {
    pub point: PointN,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Quantiles {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        Self { count: v.len(), min: v[0], median: q(0.5), p90: q(0.9), p99: q(0.99), max: v[v.len() - 1] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub mode: DistortionMode,
    pub probe_radius: f64,
    pub estimates: Vec<PointEstimate>,
    /// Too close to a known non-smooth locus (Jacobian mode only).
    pub excluded: Vec<PointN>,
    /// Singular Jacobian or collapsed probe sphere.
    pub degenerate: Vec<PointN>,
    /// Jacobian with negative determinant (Jacobian mode only); these still
    /// carry an estimate.
    pub reversed: Vec<PointN>,
    pub summary: Quantiles,
}

fn direction_count(n: usize) -> usize {
    match n {
        2 => 64,
        3 => 256,
        _ => 64 * n,
    }
}

enum Probe {
    Value(f64),
    Reversed(f64),
    Excluded,
    Degenerate,
}

fn fd_jacobian(map: &dyn MapExpr, x: &PointN, h: f64) -> DMatrix<f64> {
    let n = x.dim();
    let mut j = DMatrix::zeros(n, n);
    for c in 0..n {
        let mut a = x.coords().to_vec();
        let mut b = a.clone();
        a[c] += h;
        b[c] -= h;
        let (fa, fb) = (map.eval(&PointN::raw(a)), map.eval(&PointN::raw(b)));
        for r in 0..n {
            j[(r, c)] = (fa[r] - fb[r]) / (2.0 * h);
        }
    }
    j
}

/// Linear distortion estimates at each sample: σ_max/σ_min of the
/// (closed-form or central-difference) Jacobian, or the max/min of
/// |f(x) − f(x₀)| over the probe sphere |x − x₀| = probe_radius.
pub fn distortion_probe(
    map: &dyn MapExpr,
    samples: &[PointN],
    probe_radius: f64,
    mode: DistortionMode,
) -> Result<DistortionReport> {
    if !(probe_radius > 0.0) {
        return Err(Error::Domain(format!("probe radius must be > 0, got {probe_radius}")));
    }
    let n = map.dim();
    let dirs = sphere_grid(n, 1.0, direction_count(n));
    let probes: Vec<Probe> = samples
        .par_iter()
        .map(|x| match mode {
            DistortionMode::Jacobian => {
                if map.kink_gap(x).is_some_and(|g| g < KINK_EXCLUSION.max(2.0 * probe_radius)) {
                    return Probe::Excluded;
                }
                let j = map.jacobian(x).unwrap_or_else(|| fd_jacobian(map, x, probe_radius));
                let det = j.determinant();
                let sv = j.svd(false, false).singular_values;
                let (hi, lo) = (sv.max(), sv.min());
                if !(lo > 1e-14 * hi) || !hi.is_finite() {
                    Probe::Degenerate
                } else if det < 0.0 {
                    Probe::Reversed(hi / lo)
                } else {
                    Probe::Value(hi / lo)
                }
            }
            DistortionMode::Roundness => {
                let f0 = map.eval(x);
                let (mut hi, mut lo) = (0.0_f64, f64::INFINITY);
                for d in &dirs {
                    let v = map.eval(&(x + &d.scale(probe_radius))).distance(&f0);
                    hi = hi.max(v);
                    lo = lo.min(v);
                }
                if !(lo > 0.0) || !hi.is_finite() {
                    Probe::Degenerate
                } else {
                    Probe::Value(hi / lo)
                }
            }
        })
        .collect();
    let mut estimates = Vec::new();
    let mut excluded = Vec::new();
    let mut degenerate = Vec::new();
    let mut reversed = Vec::new();
    for (x, p) in samples.iter().zip(probes) {
        match p {
            Probe::Value(v) => estimates.push(PointEstimate { point: x.clone(), value: v }),
            Probe::Reversed(v) => {
                reversed.push(x.clone());
                estimates.push(PointEstimate { point: x.clone(), value: v });
            }
            Probe::Excluded => excluded.push(x.clone()),
            Probe::Degenerate => degenerate.push(x.clone()),
        }
    }
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    Ok(DistortionReport {
        mode,
        probe_radius,
        estimates,
        excluded,
        degenerate,
        reversed,
        summary: Quantiles::of(&values),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub max_ratio: f64,
    pub pairs_used: usize,
    pub skipped: usize,
}

/// max |g(x) − g(y)| / |x − y| over the pairs; coincident pairs skipped.
pub fn lipschitz_probe<F>(g: F, pairs: &[(PointN, PointN)]) -> LipschitzReport
where
    F: Fn(&PointN) -> f64 + Sync,
{
    let ratios: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let d = x.distance(y);
            if d == 0.0 {
                None
            } else {
                Some((g(x) - g(y)).abs() / d)
            }
        })
        .collect();
    let skipped = ratios.iter().filter(|r| r.is_none()).count();
    let max_ratio = ratios.iter().flatten().fold(0.0, |m: f64, &r| m.max(r));
    LipschitzReport { max_ratio, pairs_used: pairs.len() - skipped, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{Identity, Linear, ShrinkF};
    use crate::sets::ClosedSetOracle;
    use crate::shrink::{saturate, PullbackSet, ShrinkMap};
    use crate::zorich::ZorichMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize, count: usize, span: f64) -> Vec<PointN> {
        (0..count).map(|_| PointN::raw((0..n).map(|_| rng.random_range(-span..span)).collect())).collect()
    }

    #[test]
    fn linear_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts = random_points(&mut rng, 2, 50, 3.0);
        for mode in [DistortionMode::Jacobian, DistortionMode::Roundness] {
            let id = distortion_probe(&Identity(2), &pts, 1e-3, mode).unwrap();
            assert!((id.summary.max - 1.0).abs() < 1e-9 && id.summary.count == 50);
            let d = distortion_probe(&Linear::diagonal(&[2.0, 1.0]).unwrap(), &pts, 1e-3, mode).unwrap();
            assert!((d.summary.max - 2.0).abs() < 1e-9 && (d.summary.min - 2.0).abs() < 1e-9);
        }
        let flat = Linear::diagonal(&[1.0, 0.0]).unwrap();
        let r = distortion_probe(&flat, &pts, 1e-3, DistortionMode::Jacobian).unwrap();
        assert_eq!(r.degenerate.len(), 50);
        assert!(distortion_probe(&flat, &pts, 0.0, DistortionMode::Jacobian).is_err());
    }

    #[test]
    fn shrink_roundness_below_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let z = ZorichMap::new(2).unwrap();
        let f = ShrinkF(ShrinkMap::new(PullbackSet::hyperplane(&z, 0.0, 9.0).unwrap()));
        let pts = random_points(&mut rng, 2, 300, 2.0);
        let r = distortion_probe(&f, &pts, 1e-3, DistortionMode::Roundness).unwrap();
        assert!(r.summary.max <= 3.05);
        let j = distortion_probe(&f, &pts, 1e-4, DistortionMode::Jacobian).unwrap();
        assert!(j.summary.max <= 3.0 + 1e-6);
    }

    #[test]
    fn lipschitz_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = random_points(&mut rng, 2, 1000, 5.0);
        let b = random_points(&mut rng, 2, 1000, 5.0);
        let mut pairs: Vec<(PointN, PointN)> = a.into_iter().zip(b).collect();
        pairs.push((PointN::zeros(2), PointN::zeros(2)));
        assert_eq!(lipschitz_probe(|_| 7.0, &pairs).max_ratio, 0.0);
        let rep = lipschitz_probe(|x| x[0], &pairs);
        assert!(rep.max_ratio <= 1.0 && rep.max_ratio > 0.9 && rep.skipped == 1);
        let z = ZorichMap::new(2).unwrap();
        let pb = PullbackSet::analytic(&ClosedSetOracle::log_spiral(1.0).unwrap(), &z, 9.0).unwrap();
        assert!(lipschitz_probe(|y| saturate(pb.distance(y)), &pairs).max_ratio <= 1.0 + 1e-9);
    }
}
