use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::point::PointN;

/// Convex polytope containing the origin in its interior, stored as facet
/// planes a·x = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    #[serde(skip)]
    facets: Vec<Vec<f64>>,
}

impl Polytope {
    /// Builds the facet description from a vertex list. Every facet plane
    /// through n affinely independent vertices that keeps all vertices on
    /// the origin's side is kept.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.first().map(|v| v.len()).ok_or(Error::Empty("polytope vertex list"))?;
        if n < 2 {
            return Err(Error::BadDimension(n));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::Domain("polytope vertices of mixed dimension".into()));
        }
        let mut facets: Vec<Vec<f64>> = Vec::new();
        let mut combo: Vec<usize> = (0..n).collect();
        let m = vertices.len();
        if m < n + 1 {
            return Err(Error::Domain("polytope needs at least n + 1 vertices".into()));
        }
        loop {
            let a = DMatrix::from_fn(n, n, |i, j| vertices[combo[i]][j]);
            if let Some(sol) = a.lu().solve(&DVector::from_element(n, 1.0)) {
                let normal: Vec<f64> = sol.iter().copied().collect();
                let supporting =
                    vertices.iter().all(|v| v.iter().zip(&normal).map(|(x, y)| x * y).sum::<f64>() <= 1.0 + 1e-9);
                if supporting
                    && normal.iter().all(|c| c.is_finite())
                    && !facets.iter().any(|f| f.iter().zip(&normal).all(|(x, y)| (x - y).abs() < 1e-9))
                {
                    facets.push(normal);
                }
            }
            // next n-combination of 0..m
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] < m - n + i {
                    combo[i] += 1;
                    for j in i + 1..n {
                        combo[j] = combo[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
        if facets.len() < n + 1 {
            return Err(Error::Domain("vertices do not bound a convex polytope with the origin inside".into()));
        }
        Ok(Self { vertices, facets })
    }

    fn radius(&self, u: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|a| a.iter().zip(u).map(|(x, y)| x * y).sum::<f64>())
            .filter(|&s| s > 0.0)
            .map(|s| 1.0 / s)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SurfaceKind {
    EuclideanSphere,
    /// Q(1) = {‖x‖∞ = 1}.
    SupNormCube,
    ConvexPolytope(Polytope),
}

/// A surface star-like about the origin, given by its radial function.
#[derive(Clone, Debug, PartialEq)]
pub struct StarSurface {
    dim: usize,
    kind: SurfaceKind,
}

impl StarSurface {
    pub fn new(dim: usize, kind: SurfaceKind) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        if let SurfaceKind::ConvexPolytope(p) = &kind {
            if p.vertices[0].len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.vertices[0].len() });
            }
        }
        Ok(Self { dim, kind })
    }

    pub fn sphere(dim: usize) -> Self {
        Self { dim, kind: SurfaceKind::EuclideanSphere }
    }

    pub fn cube(dim: usize) -> Self {
        Self { dim, kind: SurfaceKind::SupNormCube }
    }

    /// The default model polytope: the sup-norm cube scaled so that its
    /// farthest point from the origin has norm 1.
    pub fn default_polytope(dim: usize) -> Self {
        let s = 1.0 / (dim as f64).sqrt();
        let vertices = (0..1usize << dim)
            .map(|mask| (0..dim).map(|i| if mask >> i & 1 == 1 { s } else { -s }).collect())
            .collect();
        let poly = Polytope::from_vertices(vertices).expect("cube is a valid polytope");
        Self { dim, kind: SurfaceKind::ConvexPolytope(poly) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    /// Distance from the origin to the surface along the unit direction `u`.
    pub fn radius(&self, u: &[f64]) -> f64 {
        match &self.kind {
            SurfaceKind::EuclideanSphere => 1.0,
            SurfaceKind::SupNormCube => 1.0 / u.iter().fold(0.0_f64, |m, c| m.max(c.abs())),
            SurfaceKind::ConvexPolytope(p) => p.radius(u),
        }
    }
}

/// x ↦ radius(x/|x|)·x, with 0 ↦ 0. Maps S(r) onto the r-dilate of the surface.
pub fn radial_star_map(surface: &StarSurface, x: &PointN) -> PointN {
    let len = x.norm();
    if len == 0.0 {
        return x.clone();
    }
    let u: Vec<f64> = x.coords().iter().map(|c| c / len).collect();
    x.scale(surface.radius(&u))
}

/// Exact inverse of [`radial_star_map`]: the direction is unchanged, so
/// y ↦ y / radius(y/|y|).
pub fn radial_star_inverse(surface: &StarSurface, y: &PointN) -> PointN {
    let len = y.norm();
    if len == 0.0 {
        return y.clone();
    }
    let u: Vec<f64> = y.coords().iter().map(|c| c / len).collect();
    y.scale(1.0 / surface.radius(&u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sampling::random_direction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[f64]) -> PointN {
        PointN::from_slice(c).unwrap()
    }

    #[test]
    fn cube_examples() {
        let q = StarSurface::cube(2);
        assert_eq!(radial_star_map(&q, &p(&[1.0, 0.0])).coords(), &[1.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let y = radial_star_map(&q, &p(&[h, h]));
        assert!((y[0] - 1.0).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);
        let x = radial_star_inverse(&q, &p(&[1.0, 1.0]));
        assert!((x[0] - h).abs() < 1e-15 && (x[1] - h).abs() < 1e-15);
        for s in [StarSurface::sphere(3), StarSurface::cube(3), StarSurface::default_polytope(3)] {
            assert!(radial_star_map(&s, &PointN::zeros(3)).is_zero());
            assert!(radial_star_inverse(&s, &PointN::zeros(3)).is_zero());
        }
    }

    #[test]
    fn default_polytope_has_unit_max_norm() {
        for n in 2..=4 {
            let s = StarSurface::default_polytope(n);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let mut max_r = 0.0_f64;
            for _ in 0..20_000 {
                let u = random_direction(&mut rng, n);
                max_r = max_r.max(s.radius(u.coords()));
            }
            assert!(max_r <= 1.0 + 1e-12 && max_r > 0.9, "n={n} max={max_r}");
            // radius along a corner direction is exactly 1
            let corner = vec![1.0 / (n as f64).sqrt(); n];
            assert!((s.radius(&corner) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_from_vertices() {
        let hex: Vec<Vec<f64>> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI / 3.0 * k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let s = StarSurface::new(2, SurfaceKind::ConvexPolytope(Polytope::from_vertices(hex).unwrap())).unwrap();
        assert!((s.radius(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
        let a = std::f64::consts::PI / 6.0;
        assert!((s.radius(&[a.cos(), a.sin()]) - (3f64).sqrt() / 2.0).abs() < 1e-12);
        assert!(Polytope::from_vertices(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn round_trip_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in [StarSurface::cube(2), StarSurface::cube(3), StarSurface::default_polytope(3)] {
            let n = s.dim();
            let mut worst = 0.0_f64;
            for _ in 0..1000 {
                let x = PointN::raw((0..n).map(|_| rng.random_range(-10.0..10.0)).collect());
                let back = radial_star_inverse(&s, &radial_star_map(&s, &x));
                worst = worst.max(back.distance(&x));
                let lam = rng.random_range(0.01..50.0);
                let lhs = radial_star_map(&s, &x.scale(lam));
                let rhs = radial_star_map(&s, &x).scale(lam);
                assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + rhs.norm()));
                // conjugating x ↦ 2x returns x ↦ 2x
                let conj = radial_star_inverse(&s, &radial_star_map(&s, &x).scale(2.0));
                assert!(conj.distance(&x.scale(2.0)) <= 1e-12 * (1.0 + x.norm()));
            }
            assert!(worst <= 1e-12, "round trip error {worst}");
        }
    }

    /// Difference quotients of the cube map restricted to S(1): the central
    /// projection onto a face stretches by at most n (towards a corner) and
    /// at least 1 (face centre).
    #[test]
    fn cube_map_bilipschitz_on_unit_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3] {
            let q = StarSurface::cube(n);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
            for _ in 0..50_000 {
                let x = random_direction(&mut rng, n);
                let far = rng.random_bool(0.2);
                let y = if far {
                    random_direction(&mut rng, n)
                } else {
                    let step = random_direction(&mut rng, n).scale(1e-4);
                    let z = &x + &step;
                    z.scale(1.0 / z.norm())
                };
                let dx = x.distance(&y);
                if dx < 1e-9 {
                    continue;
                }
                let ratio = radial_star_map(&q, &x).distance(&radial_star_map(&q, &y)) / dx;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(lo >= 1.0 - 1e-9, "n={n} lo={lo}");
            assert!(hi <= n as f64 + 0.05, "n={n} hi={hi}");
            assert!(hi > 0.8 * n as f64, "n={n}: corner stretch not sampled ({hi})");
            // the normalised cube has bi-Lipschitz constant max(L, 1/ℓ) = √n
            let s = (n as f64).sqrt();
            assert!(hi / s <= s + 0.05 && s / lo <= s + 0.05);
        }
    }
}
