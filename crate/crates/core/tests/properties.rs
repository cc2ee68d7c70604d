use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qrmax::geom::sampling::circle_point;
use qrmax::geom::{radial_star_inverse, radial_star_map, SpatialIndex, StarSurface};
use qrmax::growth::{AnnulusGluing, GrowthSchedule};
use qrmax::map::{polynomial_composite, Compose, Linear};
use qrmax::sets::ClosedSetOracle;
use qrmax::shrink::{p_of_distance, PullbackSet, ShrinkMap};
use qrmax::verify::{extract_mms, max_modulus, Budget};
use qrmax::zorich::{PowerMap, ZorichMap};
use qrmax::PointN;

fn pt(c: &[f64]) -> PointN {
    PointN::from_slice(c).unwrap()
}

fn point(n: usize, span: f64) -> impl Strategy<Value = PointN> {
    prop::collection::vec(-span..span, n).prop_map(|c| pt(&c))
}

fn planar_and_spatial(span: f64) -> impl Strategy<Value = PointN> {
    prop_oneof![point(2, span), point(3, span)]
}

fn targets() -> Vec<ClosedSetOracle> {
    vec![
        ClosedSetOracle::log_spiral(1.0).unwrap(),
        ClosedSetOracle::log_spiral(-2.5).unwrap(),
        ClosedSetOracle::radial_ray(&[0.6, 0.8]).unwrap(),
        ClosedSetOracle::cone(&[0.0, -1.0], 0.7).unwrap(),
        ClosedSetOracle::sphere(2, 1.5).unwrap(),
        ClosedSetOracle::radial_ray(&[1.0, -2.0, 2.0]).unwrap(),
        ClosedSetOracle::cone(&[0.0, 0.0, 1.0], 0.3).unwrap(),
        ClosedSetOracle::union(vec![
            ClosedSetOracle::radial_ray(&[0.0, 1.0, 0.0]).unwrap(),
            ClosedSetOracle::sphere(3, 2.0).unwrap(),
        ])
        .unwrap(),
    ]
}

/// Targets with a closed-form pullback, with their Zorich maps.
fn analytic_pullbacks() -> &'static [(ClosedSetOracle, ZorichMap, PullbackSet)] {
    static CACHE: OnceLock<Vec<(ClosedSetOracle, ZorichMap, PullbackSet)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        targets()
            .into_iter()
            .filter_map(|t| {
                let z = ZorichMap::new(t.dim()).unwrap();
                PullbackSet::analytic(&t, &z, 9.0).ok().map(|pb| (t, z, pb))
            })
            .collect()
    })
}

#[test]
fn most_targets_have_closed_form_pullbacks() {
    assert!(analytic_pullbacks().len() >= 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_map_is_homogeneous(x in planar_and_spatial(5.0), lambda in 0.01f64..50.0) {
        let n = x.dim();
        for s in [StarSurface::cube(n), StarSurface::default_polytope(n)] {
            let a = radial_star_map(&s, &x.scale(lambda));
            let b = radial_star_map(&s, &x).scale(lambda);
            prop_assert!(a.distance(&b) <= 1e-12 * b.norm().max(1e-300));
            let back = radial_star_inverse(&s, &radial_star_map(&s, &x));
            prop_assert!(back.distance(&x) <= 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn kd_nearest_is_exact(pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..200),
                           q in prop::collection::vec(-4.0f64..4.0, 3)) {
        let pts: Vec<PointN> = pts.iter().map(|c| pt(c)).collect();
        let idx = SpatialIndex::new(pts.clone()).unwrap();
        let q = pt(&q);
        let brute = pts.iter().map(|p| p.distance(&q)).fold(f64::INFINITY, f64::min);
        let (d, _) = idx.nearest(&q).unwrap();
        prop_assert_eq!(d, brute);
    }

    #[test]
    fn set_distance_is_one_lipschitz(a in point(3, 6.0), b in point(3, 6.0), which in 0usize..8) {
        let t = &targets()[which];
        let n = t.dim();
        let (a, b) = (pt(&a.coords()[..n]), pt(&b.coords()[..n]));
        prop_assert!((t.distance(&a) - t.distance(&b)).abs() <= a.distance(&b) + 1e-12);
        prop_assert_eq!(t.contains(&a), t.distance(&a) <= t.membership_tol(&a));
    }

    #[test]
    fn cloud_distance_is_a_bounded_perturbation(x in point(2, 2.5)) {
        let exact = ClosedSetOracle::radial_ray(&[1.0, 1.0]).unwrap();
        let step = 0.01;
        let pts: Vec<PointN> = (0..=300).map(|i| pt(&[i as f64 * step / 2f64.sqrt(); 2])).collect();
        let cloud = ClosedSetOracle::point_cloud(pts, step / 2.0).unwrap();
        prop_assume!(x.norm() <= 2.5);
        let (de, dc) = (exact.distance(&x), cloud.distance(&x));
        prop_assert!(dc >= de - 1e-12 && dc <= de + step / 2.0 + 1e-12, "{de} {dc}");
    }

    #[test]
    fn zorich_modulus_and_group_invariance(x in planar_and_spatial(8.0), word in prop::collection::vec(0usize..16, 0..6)) {
        let z = ZorichMap::new(x.dim()).unwrap();
        let y = z.eval(&x);
        let want = x.last().exp();
        prop_assert!((y.norm() - want).abs() <= 1e-12 * want);
        let gens = z.generators();
        let mut g = x.clone();
        for w in word {
            g = z.apply(&gens[w % gens.len()], &g);
        }
        prop_assert!(z.eval(&g).distance(&y) <= 1e-12 * want);
        let back = z.eval(&z.invert(&y).unwrap());
        prop_assert!(back.distance(&y) <= 1e-12 * want);
    }

    #[test]
    fn schroder_identity(x in planar_and_spatial(6.0), d in 2u32..5, h in -3.0f64..3.0) {
        let n = x.dim();
        let mut c = x.coords().to_vec();
        c[n - 1] = h;
        let x = pt(&c);
        let z = ZorichMap::new(n).unwrap();
        let p = PowerMap::new(z.clone(), d).unwrap();
        let want = z.eval(&x.scale(d as f64));
        prop_assert!(p.eval(&z.eval(&x)).distance(&want) <= 1e-9 * want.norm());
    }

    #[test]
    fn shrink_laws(x in point(3, 3.0), which in 0usize..64, gi in 0usize..16) {
        let all = analytic_pullbacks();
        let (t, z, pb) = &all[which % all.len()];
        let n = t.dim();
        let x = pt(&x.coords()[..n]);
        prop_assume!(!x.is_zero());
        let sm = ShrinkMap::new(pb.clone());
        let y = z.invert(&x).unwrap();
        let p = p_of_distance(sm.pullback().distance(&y)).unwrap();
        prop_assert!((0.0..=0.9).contains(&p));
        let hx = sm.h1(&x);
        let want = x.norm() * (-0.5 * p).exp();
        prop_assert!((hx.norm() - want).abs() <= 1e-10 * want);
        prop_assert!(hx.norm() <= x.norm() * (1.0 + 1e-15));
        if t.contains(&x) {
            prop_assert!(p <= 1e-9);
        } else {
            prop_assert!(p > 0.0);
        }
        let gens = z.generators();
        let other = sm.h1_via(&z.apply(&gens[gi % gens.len()], &y));
        prop_assert!(other.distance(&hx) <= 1e-10 * x.norm());
    }

    #[test]
    fn pullback_p_is_one_lipschitz(a in point(3, 10.0), delta in point(3, 0.3), which in 0usize..64) {
        let all = analytic_pullbacks();
        let (t, _, pb) = &all[which % all.len()];
        let n = t.dim();
        let a = pt(&a.coords()[..n]);
        let b = pt(&a.coords().iter().zip(delta.coords()).map(|(u, v)| u + v).collect::<Vec<_>>());
        let dp = (p_of_distance(pb.distance(&a)).unwrap() - p_of_distance(pb.distance(&b)).unwrap()).abs();
        prop_assert!(dp <= a.distance(&b) + 1e-12);
    }

    #[test]
    fn growth_is_monotone(a in 0.01f64..1e12, b in 0.01f64..1e12) {
        let s = GrowthSchedule::exp_exp(5, 0.01).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(lo < hi);
        prop_assert!(s.nu(lo).unwrap() <= s.nu(hi).unwrap());
        if lo >= 1.0 {
            prop_assert!(s.log_psi(lo).unwrap() < s.log_psi(hi).unwrap());
        }
    }

    #[test]
    fn gluing_circles(lr in -2.0f64..20.0, th in 0.0f64..std::f64::consts::TAU) {
        static GLUING: OnceLock<AnnulusGluing> = OnceLock::new();
        let g = GLUING.get_or_init(|| AnnulusGluing::new(GrowthSchedule::exp_exp(4, 0.01).unwrap()).unwrap());
        let r = lr.exp();
        let m = g.max_modulus(r);
        let v = g.eval(&circle_point(r, th)).norm();
        prop_assert!(v <= m * (1.0 + 1e-12));
        if !g.schedule().in_exceptional(r) {
            prop_assert!((v - m).abs() <= 1e-10 * m);
        }
        prop_assert!(g.max_modulus(r * 1.001) > m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn max_modulus_respects_domination(r in 0.2f64..5.0, scale in 1.0f64..4.0, seed in 0u64..1000) {
        let z = ZorichMap::new(2).unwrap();
        let sm = ShrinkMap::new(PullbackSet::analytic(&ClosedSetOracle::log_spiral(1.0).unwrap(), &z, 9.0).unwrap());
        let f = polynomial_composite(sm, 2).unwrap();
        let g = Compose::new(Arc::new(Linear::scaling(2, scale)), f.clone()).unwrap();
        let budget = Budget { samples: 256, refine_starts: 2, refine_iters: 30, seed };
        let mf = max_modulus(f.as_ref(), r, &budget).unwrap();
        let mg = max_modulus(&g, r, &budget).unwrap();
        prop_assert!(mf.m_est <= mg.m_est);
        let again = max_modulus(f.as_ref(), r, &budget).unwrap();
        prop_assert_eq!(mf.m_est.to_bits(), again.m_est.to_bits());
        prop_assert_eq!(mf.argmax, again.argmax);
    }

    #[test]
    fn power_map_alone_maximizes_everywhere(r in 0.2f64..5.0, d in 2u32..4) {
        let p = PowerMap::new(ZorichMap::new(2).unwrap(), d).unwrap();
        let budget = Budget { samples: 128, refine_starts: 2, refine_iters: 20, seed: 3 };
        let x = extract_mms(&p, &[r], &budget, None).unwrap();
        prop_assert_eq!(x.results[0].argmax.len(), 128);
    }
}
