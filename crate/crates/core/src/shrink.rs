//! Distance saturation p(d) = d/(1+d), the vertical shrink
//! f(y) = (y′, y_n − p(d(y, T′))/2) on the Zorich pullback T′ = Z^{-1}(T),
//! and the radial shrink h₁ = Z ∘ f ∘ Z^{-1}.
//!
//! Distances are taken to the whole pullback T′ rather than to the
//! boundary of each complementary component: the segment from y to its
//! nearest point of T′ meets T′ only at the far end, which is therefore
//! on the boundary of y's own component, so the two distances agree.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{directed_hausdorff, PointN, SpatialIndex};
use crate::sets::{ClosedSetOracle, SetKind};
use crate::zorich::ZorichMap;

/// Default cap on pullback distances.
pub const DEFAULT_R_MAX: f64 = 9.0;

/// p(d) = d/(1+d).
pub fn p_of_distance(d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("distance must be >= 0, got {d}")));
    }
    Ok(saturate(d))
}

#[inline]
pub(crate) fn saturate(d: f64) -> f64 {
    if d.is_infinite() {
        return 1.0;
    }
    d / (1.0 + d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PullbackMode {
    Analytic,
    Sampled,
}

/// Distance to {v ≡ phase (mod 4)} along the real line.
fn mod4_gap(v: f64, phase: f64) -> f64 {
    let d = (v - phase).rem_euclid(4.0);
    d.min(4.0 - d)
}

enum Field {
    Everything,
    /// pullback of S(e^level): {y_n = level}
    Hyperplane {
        level: f64,
    },
    /// pullback of a ray: (orbit of ξ) × R
    Fibre {
        xi: Vec<f64>,
        parity: u8,
        any_parity: bool,
    },
    /// planar cone: |σ − centre| ≤ half_width (mod 4)
    Strips {
        centre: f64,
        half_width: f64,
    },
    /// planar spiral: σ + β t ≡ phase (mod 4)
    SpiralLines {
        beta: f64,
        phase: f64,
    },
    Union(Vec<Field>),
    Sampled {
        index: SpatialIndex,
    },
}

impl Field {
    /// Exact distance from y (cell coordinates σ, height t).
    fn distance(&self, sigma: &[f64], t: f64) -> f64 {
        match self {
            Field::Everything => 0.0,
            Field::Hyperplane { level } => (t - level).abs(),
            Field::Fibre { xi, parity, any_parity } => {
                ZorichMap::nearest_fiber_sq(xi, *parity, *any_parity, sigma).sqrt()
            }
            Field::Strips { centre, half_width } => (mod4_gap(sigma[0], *centre) - half_width).max(0.0),
            Field::SpiralLines { beta, phase } => mod4_gap(sigma[0] + beta * t, *phase) / (1.0 + beta * beta).sqrt(),
            Field::Union(ch) => ch.iter().map(|c| c.distance(sigma, t)).fold(f64::INFINITY, f64::min),
            Field::Sampled { .. } => unreachable!("sampled fields are queried through the index"),
        }
    }

    /// Distance to the locus where the distance function has kinks (the set
    /// and its medial axis), where that locus is known in closed form.
    fn kink_gap(&self, sigma: &[f64], t: f64) -> Option<f64> {
        match self {
            Field::Hyperplane { level } => Some((t - level).abs()),
            Field::Fibre { xi, .. } if sigma.len() == 1 => {
                let a = mod4_gap(sigma[0], xi[0]);
                Some(a.min((a - 2.0).abs()))
            }
            Field::SpiralLines { beta, phase } => {
                let a = mod4_gap(sigma[0] + beta * t, *phase);
                Some(a.min((a - 2.0).abs()) / (1.0 + beta * beta).sqrt())
            }
            Field::Strips { centre, half_width } => {
                let a = mod4_gap(sigma[0], *centre);
                Some((a - half_width).abs().min((a - 2.0).abs()))
            }
            _ => None,
        }
    }
}

/// The pullback T′ = Z^{-1}(T) with a capped distance oracle.
#[derive(Clone)]
pub struct PullbackSet {
    zorich: ZorichMap,
    field: std::sync::Arc<Field>,
    mode: PullbackMode,
    r_max: f64,
    /// Covering-radius estimate of the sample (zero in analytic mode).
    resolution: f64,
}

impl PullbackSet {
    /// Closed-form pullback. Available for full space, rays, spheres, the
    /// planar spiral and planar cones, and unions of those.
    pub fn analytic(set: &ClosedSetOracle, zorich: &ZorichMap, r_max: f64) -> Result<Self> {
        check_rmax(r_max)?;
        if set.dim() != zorich.dim() {
            return Err(Error::DimensionMismatch { expected: zorich.dim(), got: set.dim() });
        }
        Ok(Self {
            zorich: zorich.clone(),
            field: std::sync::Arc::new(analytic_field(set, zorich)?),
            mode: PullbackMode::Analytic,
            r_max,
            resolution: 0.0,
        })
    }

    /// Pullback of a finite hyperplane {y_n = level}, i.e. of S(e^level).
    pub fn hyperplane(zorich: &ZorichMap, level: f64, r_max: f64) -> Result<Self> {
        check_rmax(r_max)?;
        Ok(Self {
            zorich: zorich.clone(),
            field: std::sync::Arc::new(Field::Hyperplane { level }),
            mode: PullbackMode::Analytic,
            r_max,
            resolution: 0.0,
        })
    }

    /// Sampled pullback: sphere sections of T at `radii` (or the cloud
    /// itself for point-cloud sets) are inverted canonically, replicated
    /// over every group translate within `r_max` of the canonical cells,
    /// and indexed. The resulting map fixes the sample, not T.
    pub fn sampled(
        set: &ClosedSetOracle,
        zorich: &ZorichMap,
        radii: &[f64],
        samples_per_sphere: usize,
        r_max: f64,
    ) -> Result<Self> {
        check_rmax(r_max)?;
        if set.dim() != zorich.dim() {
            return Err(Error::DimensionMismatch { expected: zorich.dim(), got: set.dim() });
        }
        let source: Vec<PointN> = match set.kind() {
            SetKind::PointCloud(c) => c.points().iter().filter(|p| !p.is_zero()).cloned().collect(),
            _ => radii
                .iter()
                .filter(|&&r| r > 0.0)
                .filter_map(|&r| set.section(r, samples_per_sphere).ok())
                .flat_map(|s| s.points)
                .filter(|p| !p.is_zero())
                .collect(),
        };
        let m = zorich.dim() - 1;
        let reach = r_max + 1e-9;
        let mut lo = vec![-1.0 - reach; m];
        let mut hi = vec![1.0 + reach; m];
        hi[0] = 3.0 + reach;
        lo[0] = -1.0 - reach;
        let mut points = Vec::new();
        let mut layers: Vec<(f64, Vec<PointN>)> = Vec::new();
        for p in &source {
            let pre = zorich.invert(p)?;
            let t = pre.last();
            let reps: Vec<PointN> = zorich
                .fiber_in_cell_box(&pre, &lo, &hi)
                .into_iter()
                .map(|s| {
                    let mut c = zorich.from_cell(&s);
                    c.push(t);
                    PointN::raw(c)
                })
                .collect();
            match layers.iter_mut().find(|(lt, _)| (*lt - t).abs() <= 1e-12 * t.abs().max(1.0)) {
                Some((_, l)) => l.extend(reps.iter().cloned()),
                None => layers.push((t, reps.clone())),
            }
            points.extend(reps);
        }
        let resolution = match set.kind() {
            SetKind::PointCloud(_) => 0.0,
            _ => layer_resolution(zorich, &mut layers)?,
        };
        Ok(Self {
            zorich: zorich.clone(),
            field: std::sync::Arc::new(Field::Sampled { index: SpatialIndex::new(points)? }),
            mode: PullbackMode::Sampled,
            r_max,
            resolution,
        })
    }

    pub fn zorich(&self) -> &ZorichMap {
        &self.zorich
    }

    pub fn mode(&self) -> PullbackMode {
        self.mode
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.zorich.dim()
    }

    /// min(d(y, T′), r_max).
    pub fn distance(&self, y: &PointN) -> f64 {
        let d = match &*self.field {
            Field::Sampled { index } => {
                if index.is_empty() {
                    return self.r_max;
                }
                let c = self.zorich.canonical(y);
                index.nearest_index(c.coords()).map(|r| r.0).unwrap_or(f64::INFINITY)
            }
            f => f.distance(&self.zorich.to_cell(y.horizontal()), y.last()),
        };
        d.min(self.r_max)
    }

    /// Distance from y to the known kinks of the distance function.
    pub fn kink_gap(&self, y: &PointN) -> Option<f64> {
        self.field.kink_gap(&self.zorich.to_cell(y.horizontal()), y.last())
    }
}

fn check_rmax(r_max: f64) -> Result<()> {
    if !(r_max > 0.0) {
        return Err(Error::Domain(format!("distance cap must be > 0, got {r_max}")));
    }
    Ok(())
}

fn analytic_field(set: &ClosedSetOracle, z: &ZorichMap) -> Result<Field> {
    let n = z.dim();
    Ok(match set.kind() {
        SetKind::FullSpace => Field::Everything,
        SetKind::Sphere { radius } => Field::Hyperplane { level: radius.ln() },
        SetKind::RadialRay { direction } => {
            let pre = z.invert(&PointN::raw(direction.clone()))?;
            let f = z.fold(pre.horizontal());
            let any_parity = f.xi.iter().any(|c| c.abs() >= 1.0 - 1e-15);
            Field::Fibre { xi: f.xi, parity: f.parity, any_parity }
        }
        SetKind::LogSpiral { omega } => {
            // standard angle of Z(σ, t) is π(1 − σ)/2, so the spiral
            // condition angle ≡ ω t (mod 2π) reads σ + (2ω/π) t ≡ 1 (mod 4)
            Field::SpiralLines { beta: FRAC_2_PI * omega, phase: 1.0 }
        }
        SetKind::Cone { axis, half_angle } if n == 2 => {
            let pre = z.invert(&PointN::raw(axis.clone()))?;
            let centre = z.to_cell(pre.horizontal())[0];
            let half_width = 2.0 * half_angle / PI;
            if half_width >= 2.0 {
                Field::Everything
            } else {
                Field::Strips { centre, half_width }
            }
        }
        SetKind::Union(ch) => Field::Union(ch.iter().map(|c| analytic_field(c, z)).collect::<Result<_>>()?),
        _ => {
            return Err(Error::Unsupported(
                "no closed-form pullback for this set kind in this dimension; use sampled mode".into(),
            ))
        }
    })
}

/// Half the largest gap between consecutive sampled layers (and within a
/// layer), measured from points over the canonical cells.
fn layer_resolution(z: &ZorichMap, layers: &mut [(f64, Vec<PointN>)]) -> Result<f64> {
    layers.sort_by(|a, b| a.0.total_cmp(&b.0));
    let in_canonical = |p: &PointN| {
        let s = z.to_cell(p.horizontal());
        s.iter().enumerate().all(|(i, &c)| c >= -1.0 - 1e-12 && c <= if i == 0 { 3.0 } else { 1.0 } + 1e-12)
    };
    let mut worst = 0.0_f64;
    let indexed: Vec<(Vec<PointN>, SpatialIndex)> = layers
        .iter()
        .map(|(_, pts)| {
            let core: Vec<PointN> = pts.iter().filter(|p| in_canonical(p)).cloned().collect();
            SpatialIndex::new(pts.clone()).map(|i| (core, i))
        })
        .collect::<Result<_>>()?;
    for w in indexed.windows(2) {
        if !w[0].0.is_empty() && !w[1].0.is_empty() {
            worst = worst.max(directed_hausdorff(&w[0].0, &w[1].1)?);
            worst = worst.max(directed_hausdorff(&w[1].0, &w[0].1)?);
        }
    }
    for (core, _) in &indexed {
        for (i, p) in core.iter().enumerate() {
            let d = core
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.distance(p))
                .fold(f64::INFINITY, f64::min);
            if d.is_finite() {
                worst = worst.max(d);
            }
        }
    }
    Ok(0.5 * worst)
}

/// The vertical shrink f on a pullback set.
#[derive(Clone)]
pub struct ShrinkMap {
    pullback: PullbackSet,
}

impl ShrinkMap {
    pub fn new(pullback: PullbackSet) -> Self {
        Self { pullback }
    }

    pub fn pullback(&self) -> &PullbackSet {
        &self.pullback
    }

    pub fn zorich(&self) -> &ZorichMap {
        &self.pullback.zorich
    }

    pub fn dim(&self) -> usize {
        self.pullback.dim()
    }

    /// p(d(y, T′)).
    pub fn p_at(&self, y: &PointN) -> f64 {
        saturate(self.pullback.distance(y))
    }

    /// f(y) = (y′, y_n − p(y)/2).
    pub fn f(&self, y: &PointN) -> PointN {
        let shift = 0.5 * self.p_at(y);
        let mut c = y.coords().to_vec();
        let n = c.len();
        c[n - 1] -= shift;
        PointN::raw(c)
    }

    /// h₁(x) = Z(f(Z^{-1}(x))), h₁(0) = 0.
    pub fn h1(&self, x: &PointN) -> PointN {
        if x.is_zero() {
            return x.clone();
        }
        let z = self.zorich();
        let y = z.invert(x).expect("non-zero point");
        z.eval(&self.f(&y))
    }

    /// h₁ evaluated through a chosen preimage y of x.
    pub fn h1_via(&self, y: &PointN) -> PointN {
        self.zorich().eval(&self.f(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sampling::circle_point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[f64]) -> PointN {
        PointN::from_slice(c).unwrap()
    }

    fn ray_shrink() -> ShrinkMap {
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::radial_ray(&[1.0, 0.0]).unwrap();
        ShrinkMap::new(PullbackSet::analytic(&t, &z, DEFAULT_R_MAX).unwrap())
    }

    #[test]
    fn saturation() {
        assert_eq!(p_of_distance(0.0).unwrap(), 0.0);
        assert_eq!(p_of_distance(1.0).unwrap(), 0.5);
        assert!(p_of_distance(-1e-3).is_err());
        assert!(p_of_distance(f64::NAN).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let a = rng.random_range(0.0..20.0f64);
            let b = rng.random_range(0.0..20.0f64);
            assert!((saturate(a) - saturate(b)).abs() <= (a - b).abs() + 1e-12);
            assert!(saturate(a) < 1.0);
        }
    }

    #[test]
    fn ray_pullback_examples() {
        let sm = ray_shrink();
        assert!((sm.pullback().distance(&p(&[0.0, 2.0])) - 1.0).abs() < 1e-15);
        assert_eq!(sm.pullback().distance(&p(&[1.0, -3.0])), 0.0);
        assert_eq!(sm.pullback().distance(&p(&[5.0, 0.3])), 0.0);
        assert!((sm.pullback().distance(&p(&[3.0, 0.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hyperplane_shrink_example() {
        let z = ZorichMap::new(2).unwrap();
        let sm = ShrinkMap::new(PullbackSet::hyperplane(&z, 0.0, DEFAULT_R_MAX).unwrap());
        let y = sm.f(&p(&[0.3, 1.0]));
        assert!((y[1] - 0.75).abs() < 1e-15 && y[0] == 0.3);
        assert_eq!(sm.f(&p(&[0.3, 0.0])), p(&[0.3, 0.0]));
    }

    #[test]
    fn h1_examples() {
        let sm = ray_shrink();
        assert!(sm.h1(&p(&[2.0, 0.0])).distance(&p(&[2.0, 0.0])) < 1e-15);
        let y = sm.h1(&p(&[0.0, 2.0]));
        let oracle = 2.0 * (-0.25f64).exp();
        assert!(y.distance(&p(&[0.0, oracle])) < 1e-14, "{y:?}");
        assert!((oracle - 1.557_601_566_0).abs() < 1e-9);
        assert!(sm.h1(&PointN::zeros(2)).is_zero());
    }

    #[test]
    fn cap_is_applied() {
        let z = ZorichMap::new(3).unwrap();
        let pb = PullbackSet::hyperplane(&z, 0.0, 2.0).unwrap();
        assert_eq!(pb.distance(&p(&[0.0, 0.0, 50.0])), 2.0);
    }

    #[test]
    fn spiral_pullback_matches_image_side() {
        // Z maps the pullback lines onto the spiral
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::log_spiral(1.0).unwrap();
        let pb = PullbackSet::analytic(&t, &z, DEFAULT_R_MAX).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let y = p(&[rng.random_range(-10.0..10.0), rng.random_range(-4.0..4.0)]);
            let on = pb.distance(&y) < 1e-12;
            assert_eq!(on, t.distance(&z.eval(&y)) < 1e-9 * z.eval(&y).norm());
        }
        // the curve s = 1 − (2/π) t lies on T′
        for tt in [-2.0, 0.0, 1.5] {
            let y = p(&[1.0 - FRAC_2_PI * tt, tt]);
            assert!(pb.distance(&y) < 1e-14);
            assert!(t.distance(&z.eval(&y)) < 1e-12 * tt.exp());
        }
    }

    #[test]
    fn invariance_and_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z2 = ZorichMap::new(2).unwrap();
        let z3 = ZorichMap::new(3).unwrap();
        let sets = vec![
            (PullbackSet::analytic(&ClosedSetOracle::log_spiral(1.0).unwrap(), &z2, 9.0).unwrap(), z2.clone()),
            (
                PullbackSet::analytic(&ClosedSetOracle::radial_ray(&[0.2, 1.0, -0.4]).unwrap(), &z3, 9.0).unwrap(),
                z3.clone(),
            ),
            (PullbackSet::analytic(&ClosedSetOracle::cone(&[0.0, -1.0], 0.7).unwrap(), &z2, 9.0).unwrap(), z2.clone()),
            (PullbackSet::hyperplane(&z3, 0.5, 9.0).unwrap(), z3.clone()),
        ];
        for (pb, z) in &sets {
            let n = z.dim();
            let gens = z.generators();
            for _ in 0..20_000 {
                let y = PointN::raw((0..n).map(|_| rng.random_range(-8.0..8.0)).collect());
                let g = &gens[rng.random_range(0..gens.len())];
                assert!((pb.distance(&y) - pb.distance(&z.apply(g, &y))).abs() <= 1e-10);
                let w = &y + &PointN::raw((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
                assert!((pb.distance(&y) - pb.distance(&w)).abs() <= y.distance(&w) + 1e-12);
            }
        }
    }

    #[test]
    fn sampled_matches_analytic_on_spiral() {
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::log_spiral(1.0).unwrap();
        let exact = PullbackSet::analytic(&t, &z, 9.0).unwrap();
        let radii: Vec<f64> = (0..=600).map(|i| (-3.0 + 6.0 * i as f64 / 600.0).exp()).collect();
        let sampled = PullbackSet::sampled(&t, &z, &radii, 64, 9.0).unwrap();
        assert_eq!(sampled.mode(), PullbackMode::Sampled);
        let res = sampled.resolution();
        // one layer step along a line of slope 2/π
        let step = 6.0 / 600.0 * (1.0 + FRAC_2_PI * FRAC_2_PI).sqrt();
        assert!(res > 0.4 * step && res < 0.6 * step, "resolution {res}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let y = p(&[rng.random_range(-8.0..8.0), rng.random_range(-1.5..1.5)]);
            let (a, b) = (exact.distance(&y), sampled.distance(&y));
            assert!(b >= a - 1e-12 && b - a <= res + 1e-12, "{a} {b} {res}");
        }
    }

    #[test]
    fn sampled_cloud_fixes_its_points() {
        let z = ZorichMap::new(3).unwrap();
        let pts = vec![p(&[0.0, 0.0, 0.0]), p(&[1.0, 0.5, 0.2]), p(&[-0.3, 2.0, -1.0])];
        let cloud = ClosedSetOracle::point_cloud(pts.clone(), 0.0).unwrap();
        let sm = ShrinkMap::new(PullbackSet::sampled(&cloud, &z, &[], 0, 9.0).unwrap());
        for q in &pts {
            assert!(sm.h1(q).distance(q) < 1e-12);
        }
        let x = p(&[0.4, -0.4, 1.0]);
        assert!(sm.h1(&x).norm() < x.norm());
    }

    #[test]
    fn h1_modulus_law_and_branch_choice() {
        let sm = ShrinkMap::new(
            PullbackSet::analytic(
                &ClosedSetOracle::radial_ray(&[0.2, 1.0, -0.4]).unwrap(),
                &ZorichMap::new(3).unwrap(),
                9.0,
            )
            .unwrap(),
        );
        let z = sm.zorich().clone();
        let gens = z.generators();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5000 {
            let x = PointN::raw((0..3).map(|_| rng.random_range(-4.0..4.0)).collect());
            let y = z.invert(&x).unwrap();
            let expected = x.norm() * (-0.5 * saturate(sm.pullback().distance(&y))).exp();
            let hx = sm.h1(&x);
            assert!((hx.norm() - expected).abs() <= 1e-10 * expected);
            let g = &gens[rng.random_range(0..gens.len())];
            assert!(sm.h1_via(&z.apply(g, &y)).distance(&hx) <= 1e-10 * x.norm());
        }
    }

    #[test]
    fn identity_at_the_boundary() {
        let sm = ray_shrink();
        let target = p(&[3.0, 0.0]);
        let mut last = f64::INFINITY;
        for k in 1..12 {
            let eps = 0.5f64.powi(k);
            let x = circle_point(3.0, eps);
            let gap = sm.h1(&x).distance(&x);
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
        assert!(sm.h1(&target).distance(&target) < 1e-15);
    }

    #[test]
    fn f_is_injective_and_keeps_vertical_segments() {
        let z = ZorichMap::new(2).unwrap();
        let sm = ShrinkMap::new(PullbackSet::analytic(&ClosedSetOracle::log_spiral(1.0).unwrap(), &z, 9.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // collisions can only happen on a common vertical line
        for _ in 0..100_000 {
            let s = rng.random_range(-4.0..4.0);
            let a = p(&[s, rng.random_range(-3.0..3.0)]);
            let b = p(&[s, rng.random_range(-3.0..3.0)]);
            let (fa, fb) = (sm.f(&a), sm.f(&b));
            if fa.distance(&fb) <= 1e-12 {
                assert!(a.distance(&b) <= 1e-9);
            }
            // strictly monotone on vertical lines: (f a − f b)_n has the sign of (a − b)_n
            if (a[1] - b[1]).abs() > 1e-9 {
                assert!((fa[1] - fb[1]) * (a[1] - b[1]) > 0.0);
            }
        }
        // maximal vertical segment of the complement between two crossings
        // of the line σ = 0.3 with T′: endpoints fixed, interior mapped into it
        let s = 0.3;
        let beta = FRAC_2_PI;
        let t0 = (1.0 - s) / beta; // σ + βt = 1
        let t1 = (5.0 - s) / beta; // σ + βt = 5
        let f0 = sm.f(&p(&[s, t0]));
        let f1 = sm.f(&p(&[s, t1]));
        assert!((f0[1] - t0).abs() < 1e-12 && (f1[1] - t1).abs() < 1e-12);
        for i in 1..1000 {
            let t = t0 + (t1 - t0) * i as f64 / 1000.0;
            let ft = sm.f(&p(&[s, t]))[1];
            assert!(ft > t0 && ft < t1 && ft < t);
        }
        // images of points near the top endpoint converge to it
        let near = sm.f(&p(&[s, t1 - 1e-8]))[1];
        assert!((near - t1).abs() < 1e-7);
    }
}
