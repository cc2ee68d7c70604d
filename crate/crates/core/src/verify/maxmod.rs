use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::sampling::{circle_point, grid_spacing, random_direction, sphere_grid};
use crate::geom::{hausdorff_distance, PointN};
use crate::growth::GrowthSchedule;
use crate::map::MapExpr;
use crate::sets::ClosedSetOracle;

/// Samples within this relative band of the maximum count as argmax.
pub const ARGMAX_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub samples: usize,
    /// Number of best grid samples polished by local search.
    pub refine_starts: usize,
    /// Iteration cap of each local search.
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { samples: 2048, refine_starts: 4, refine_iters: 80, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxModResult {
    pub radius: f64,
    pub m_est: f64,
    pub argmax: Vec<PointN>,
    /// Spacing of the sphere grid.
    pub resolution: f64,
    pub iterations: usize,
}

/// The sphere grid used by [`max_modulus`]. For n ≥ 4 directions are drawn
/// from a generator seeded by `seed`.
pub fn sphere_samples(n: usize, r: f64, count: usize, seed: u64) -> Vec<PointN> {
    if n <= 3 || r == 0.0 {
        return sphere_grid(n, r, count);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count.max(1)).map(|_| random_direction(&mut rng, n).scale(r)).collect()
}

fn modulus(map: &dyn MapExpr, x: &PointN) -> f64 {
    let v = map.eval(x).norm();
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Golden-section maximisation of g on [a, b]; returns (argmax, max, evals).
fn golden_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut best = if gc >= gd { (c, gc) } else { (d, gd) };
    let mut it = 0;
    while it < iters && (b - a) > 1e-16 * (1.0 + a.abs()) {
        it += 1;
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
            if gc > best.1 {
                best = (c, gc);
            }
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
            if gd > best.1 {
                best = (d, gd);
            }
        }
    }
    (best.0, best.1, it)
}

/// Orthonormal basis of the tangent space u^⊥.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    for j in candidates {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        for b in std::iter::once(u).chain(basis.iter().map(|b| b.as_slice())) {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-6 {
            basis.push(v.into_iter().map(|c| c / len).collect());
        }
    }
    basis
}

/// Nelder–Mead maximisation of g over R^m; returns (argmax, max, iterations).
fn nelder_mead_max<F: Fn(&[f64]) -> f64>(g: F, m: usize, step: f64, iters: usize) -> (Vec<f64>, f64, usize) {
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=m)
        .map(|i| {
            let mut v = vec![0.0; m];
            if i > 0 {
                v[i - 1] = step;
            }
            let val = g(&v);
            (v, val)
        })
        .collect();
    let mut it = 0;
    while it < iters {
        it += 1;
        // descending by value, ties by construction order
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let spread = simplex[0].1 - simplex[m].1;
        let size = simplex[1..].iter().map(|(v, _)| crate::geom::point_dist(v, &simplex[0].0)).fold(0.0_f64, f64::max);
        if size < 1e-15 || spread.abs() <= 1e-16 * simplex[0].1.abs() {
            break;
        }
        let centroid: Vec<f64> =
            (0..m).map(|j| simplex[..m].iter().map(|(v, _)| v[j]).sum::<f64>() / m as f64).collect();
        let worst = simplex[m].0.clone();
        let along = |t: f64| -> Vec<f64> { (0..m).map(|j| centroid[j] + t * (worst[j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = g(&xr);
        if fr > simplex[0].1 {
            let xe = along(-2.0);
            let fe = g(&xe);
            simplex[m] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[m - 1].1 {
            simplex[m] = (xr, fr);
        } else {
            let xc = if fr > simplex[m].1 { along(-0.5) } else { along(0.5) };
            let fc = g(&xc);
            if fc > simplex[m].1.max(fr) {
                simplex[m] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = (0..m).map(|j| best[j] + 0.5 * (s.0[j] - best[j])).collect();
                    let val = g(&v);
                    *s = (v, val);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (v, val) = simplex.swap_remove(0);
    (v, val, it)
}

fn refine(map: &dyn MapExpr, start: &PointN, r: f64, spacing: f64, iters: usize) -> (PointN, f64, usize) {
    let n = start.dim();
    if n == 2 {
        let th0 = start[1].atan2(start[0]);
        let dth = spacing / r;
        let (th, val, it) = golden_max(|th| modulus(map, &circle_point(r, th)), th0 - dth, th0 + dth, iters);
        return (circle_point(r, th), val, it);
    }
    let u: Vec<f64> = start.coords().iter().map(|c| c / r).collect();
    let basis = tangent_basis(&u);
    let chart = |v: &[f64]| -> PointN {
        let mut p = u.clone();
        for (b, &c) in basis.iter().zip(v) {
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += c * bi;
            }
        }
        let len = crate::geom::point_norm(&p);
        PointN::raw(p.into_iter().map(|c| r * c / len).collect())
    };
    let (v, val, it) = nelder_mead_max(|v| modulus(map, &chart(v)), n - 1, 0.5 * spacing / r, iters);
    (chart(&v), val, it)
}

/// M(r, f) = max |f| on S(r): dense grid, then local polish of the best
/// samples. Reductions run in sample order, so the result does not depend
/// on the worker count.
pub fn max_modulus(map: &dyn MapExpr, r: f64, budget: &Budget) -> Result<MaxModResult> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("max_modulus needs r >= 0, got {r}")));
    }
    let n = map.dim();
    if r == 0.0 {
        let o = PointN::zeros(n);
        return Ok(MaxModResult {
            radius: 0.0,
            m_est: modulus(map, &o),
            argmax: vec![o],
            resolution: 0.0,
            iterations: 0,
        });
    }
    let grid = sphere_samples(n, r, budget.samples, budget.seed);
    let spacing = grid_spacing(n, r, grid.len());
    let vals: Vec<f64> = grid.par_iter().map(|x| modulus(map, x)).collect();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let grid_max = vals[order[0]];

    let mut starts: Vec<usize> = Vec::new();
    for &i in &order {
        if starts.len() >= budget.refine_starts {
            break;
        }
        if starts.iter().all(|&s| grid[s].distance(&grid[i]) > 2.0 * spacing) {
            starts.push(i);
        }
    }
    let polished: Vec<(PointN, f64, usize)> =
        starts.par_iter().map(|&i| refine(map, &grid[i], r, spacing, budget.refine_iters)).collect();
    let iterations = polished.iter().map(|p| p.2).sum();
    let m_est = polished.iter().map(|p| p.1).fold(grid_max, f64::max);

    let band = m_est * (1.0 - ARGMAX_REL_TOL);
    let mut hits: Vec<usize> = order.iter().copied().take_while(|&i| vals[i] >= band).collect();
    hits.sort_unstable();
    let mut argmax: Vec<PointN> = hits.into_iter().map(|i| grid[i].clone()).collect();
    // polished points only add information when they beat the grid
    for (p, v, _) in &polished {
        if *v >= band && *v > grid_max * (1.0 + ARGMAX_REL_TOL) && argmax.iter().all(|q| q.distance(p) > 1e-9 * r) {
            argmax.push(p.clone());
        }
    }
    Ok(MaxModResult { radius: r, m_est, argmax, resolution: spacing, iterations })
}

#[derive(Clone, Debug, Serialize)]
pub struct MMSExtract {
    pub radii: Vec<f64>,
    pub results: Vec<MaxModResult>,
    /// r ∈ E_ε, when a schedule was supplied.
    pub exceptional: Vec<bool>,
}

impl MMSExtract {
    pub fn union_points(&self) -> Vec<PointN> {
        self.results.iter().flat_map(|r| r.argmax.iter().cloned()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Per-radius argmax sets over a grid of radii (sorted ascending).
pub fn extract_mms(
    map: &dyn MapExpr,
    r_grid: &[f64],
    budget: &Budget,
    schedule: Option<&GrowthSchedule>,
) -> Result<MMSExtract> {
    let mut radii = r_grid.to_vec();
    if radii.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite);
    }
    radii.sort_by(f64::total_cmp);
    let results = radii.iter().map(|&r| max_modulus(map, r, budget)).collect::<Result<Vec<_>>>()?;
    let exceptional = radii.iter().map(|&r| schedule.is_some_and(|s| s.in_exceptional(r))).collect();
    Ok(MMSExtract { radii, results, exceptional })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub radius: f64,
    pub hausdorff: f64,
    pub bound: f64,
    pub exceptional: bool,
    /// False when skipped as exceptional.
    pub checked: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub max_hausdorff: f64,
    /// max over checked radii of hausdorff / bound
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Hausdorff distance between the argmax samples and T ∩ S(r) at each
/// radius, against the bound `factor · max(grid spacing, section spacing)`.
pub fn compare_to_target(
    x: &MMSExtract,
    target: &ClosedSetOracle,
    exclude_exceptional: bool,
    section_samples: usize,
    factor: f64,
) -> Result<CompareReport> {
    let rows = x
        .results
        .par_iter()
        .zip(x.exceptional.par_iter())
        .map(|(res, &flag)| {
            let section = target.section(res.radius, section_samples)?;
            if section.points.is_empty() {
                return Err(Error::EmptySection { radius: res.radius });
            }
            let h = hausdorff_distance(&res.argmax, &section.points)?;
            let bound = factor * res.resolution.max(section.resolution);
            let checked = !(exclude_exceptional && flag);
            Ok(CompareRow {
                radius: res.radius,
                hausdorff: h,
                bound,
                exceptional: flag,
                checked,
                passed: !checked || h <= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let checked: Vec<&CompareRow> = rows.iter().filter(|r| r.checked).collect();
    let max_hausdorff = checked.iter().map(|r| r.hausdorff).fold(0.0, f64::max);
    let worst_ratio = checked
        .iter()
        .map(|r| {
            if r.bound > 0.0 {
                r.hausdorff / r.bound
            } else if r.hausdorff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.passed);
    Ok(CompareReport { rows, max_hausdorff, worst_ratio, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{polynomial_composite, Identity};
    use crate::shrink::{PullbackSet, ShrinkMap};
    use crate::zorich::{PowerMap, ZorichMap};
    use std::f64::consts::TAU;

    fn budget(samples: usize) -> Budget {
        Budget { samples, refine_starts: 4, refine_iters: 80, seed: 1 }
    }

    #[test]
    fn identity_and_power() {
        for n in [2, 3, 4] {
            let m = max_modulus(&Identity(n), 5.0, &budget(500)).unwrap();
            assert!((m.m_est - 5.0).abs() < 1e-12);
            assert_eq!(m.argmax.len(), 500);
            for p in &m.argmax {
                assert!((p.norm() - 5.0).abs() <= 1e-12);
            }
        }
        let p = PowerMap::new(ZorichMap::new(2).unwrap(), 2).unwrap();
        let m = max_modulus(&p, 3.0, &budget(720)).unwrap();
        assert!((m.m_est - 9.0).abs() < 1e-9);
        assert_eq!(m.argmax.len(), 720);
        let p3 = PowerMap::new(ZorichMap::new(3).unwrap(), 2).unwrap();
        let m = max_modulus(&p3, 1.5, &budget(800)).unwrap();
        assert!((m.m_est - 2.25).abs() < 1e-9);
        assert_eq!(m.argmax.len(), 800);
        assert!(max_modulus(&Identity(2), -1.0, &budget(10)).is_err());
        let z = max_modulus(&Identity(2), 0.0, &budget(10)).unwrap();
        assert_eq!((z.m_est, z.argmax.len()), (0.0, 1));
    }

    #[test]
    fn h1_ray_maximum_only_near_the_ray() {
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::radial_ray(&[1.0, 0.0]).unwrap();
        let h1 = crate::map::H1(ShrinkMap::new(PullbackSet::analytic(&t, &z, 9.0).unwrap()));
        let m = max_modulus(&h1, 2.0, &budget(4096)).unwrap();
        // dense oracle
        let oracle = (0..100_000).map(|i| h1.eval(&circle_point(2.0, TAU * i as f64 / 1e5)).norm()).fold(0.0, f64::max);
        assert!((m.m_est - 2.0).abs() < 1e-12 && (oracle - 2.0).abs() < 1e-12);
        for p in &m.argmax {
            assert!(p.distance(&PointN::raw(vec![2.0, 0.0])) < 1e-6);
        }
    }

    #[test]
    fn refinement_beats_grid() {
        // maximum of h₁ on a spiral lies between grid points
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::log_spiral(1.0).unwrap();
        let h = polynomial_composite(ShrinkMap::new(PullbackSet::analytic(&t, &z, 9.0).unwrap()), 2).unwrap();
        for r in [0.3, 1.7, 9.0] {
            let m = max_modulus(h.as_ref(), r, &budget(256)).unwrap();
            assert!((m.m_est - r * r).abs() <= 1e-9 * r * r, "r={r} M={}", m.m_est);
            let sec = t.section(r, 1).unwrap();
            assert!(hausdorff_distance(&m.argmax, &sec.points).unwrap() < 1e-6 * r);
        }
    }

    #[test]
    fn nelder_mead_in_three_dimensions() {
        let z = ZorichMap::new(3).unwrap();
        let t = ClosedSetOracle::radial_ray(&[0.3, -0.5, 0.8]).unwrap();
        let h = polynomial_composite(ShrinkMap::new(PullbackSet::analytic(&t, &z, 9.0).unwrap()), 2).unwrap();
        let m = max_modulus(h.as_ref(), 1.3, &Budget { samples: 2000, refine_starts: 3, refine_iters: 400, seed: 2 })
            .unwrap();
        assert!((m.m_est - 1.69).abs() <= 1e-7, "{}", m.m_est);
        let sec = t.section(1.3, 1).unwrap();
        assert!(hausdorff_distance(&m.argmax, &sec.points).unwrap() < 1e-3);
    }

    #[test]
    fn domination_is_monotone() {
        let z = ZorichMap::new(2).unwrap();
        let t = ClosedSetOracle::log_spiral(0.5).unwrap();
        let h1 = crate::map::H1(ShrinkMap::new(PullbackSet::analytic(&t, &z, 9.0).unwrap()));
        for r in [0.5, 2.0, 7.0] {
            let a = max_modulus(&h1, r, &budget(300)).unwrap().m_est;
            let b = max_modulus(&Identity(2), r, &budget(300)).unwrap().m_est;
            assert!(a <= b);
        }
    }

    #[test]
    fn extraction_and_comparison() {
        let z = ZorichMap::new(2).unwrap();
        let p = PowerMap::new(z.clone(), 3).unwrap();
        let full = ClosedSetOracle::full_space(2).unwrap();
        let x = extract_mms(&p, &[2.0, 0.5, 1.0], &budget(360), None).unwrap();
        assert_eq!(x.radii, vec![0.5, 1.0, 2.0]);
        for r in &x.results {
            assert_eq!(r.argmax.len(), 360);
        }
        let c = compare_to_target(&x, &full, false, 360, 2.0).unwrap();
        assert!(c.passed && c.max_hausdorff < 1e-12);
        let id = extract_mms(&Identity(2), &[1.0, 3.0], &budget(100), None).unwrap();
        assert!(compare_to_target(&id, &full, false, 100, 2.0).unwrap().max_hausdorff < 1e-12);
        assert!(extract_mms(&p, &[], &budget(10), None).unwrap().is_empty());

        let ray = ClosedSetOracle::radial_ray(&[0.0, 1.0]).unwrap();
        let h = polynomial_composite(ShrinkMap::new(PullbackSet::analytic(&ray, &z, 9.0).unwrap()), 2).unwrap();
        let x = extract_mms(h.as_ref(), &[0.5, 1.0, 4.0], &budget(512), None).unwrap();
        let c = compare_to_target(&x, &ray, false, 512, 2.0).unwrap();
        assert!(c.passed, "{c:?}");
        // a sphere set misses most circles
        let sph = ClosedSetOracle::sphere(2, 1.0).unwrap();
        assert!(compare_to_target(&x, &sph, false, 64, 2.0).is_err());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let z = ZorichMap::new(3).unwrap();
        let t = ClosedSetOracle::radial_ray(&[1.0, 1.0, 1.0]).unwrap();
        let h = polynomial_composite(ShrinkMap::new(PullbackSet::analytic(&t, &z, 9.0).unwrap()), 2).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| extract_mms(h.as_ref(), &[0.5, 2.0], &budget(700), None).unwrap())
        };
        let (a, b) = (run(1), run(4));
        for (x, y) in a.results.iter().zip(&b.results) {
            assert_eq!(x.m_est.to_bits(), y.m_est.to_bits());
            assert_eq!(x.argmax, y.argmax);
        }
    }
}
