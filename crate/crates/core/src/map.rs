//! Composable maps of R^n with metadata.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{radial_star_inverse, radial_star_map, PointN, StarSurface};
use crate::shrink::ShrinkMap;
use crate::zorich::{PowerMap, ZorichMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapType {
    Polynomial,
    Transcendental,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub name: String,
    pub map_type: MapType,
    /// Claimed topological degree; None for infinite degree.
    pub degree: Option<u64>,
    /// Claimed bound on the linear distortion, when one is known.
    pub distortion_bound: Option<f64>,
}

impl MapMeta {
    pub fn polynomial(name: &str, degree: u64) -> Self {
        Self { name: name.into(), map_type: MapType::Polynomial, degree: Some(degree), distortion_bound: None }
    }
}

pub trait MapExpr: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &PointN) -> PointN;

    /// Closed-form Jacobian, when available.
    fn jacobian(&self, _x: &PointN) -> Option<DMatrix<f64>> {
        None
    }

    fn meta(&self) -> MapMeta;

    /// Distance from x to the known loci where the map is not smooth, when
    /// the map can tell.
    fn kink_gap(&self, _x: &PointN) -> Option<f64> {
        None
    }
}

pub type DynMap = Arc<dyn MapExpr>;

pub struct Identity(pub usize);

impl MapExpr for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, x: &PointN) -> PointN {
        x.clone()
    }
    fn jacobian(&self, _x: &PointN) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.0, self.0))
    }
    fn meta(&self) -> MapMeta {
        MapMeta { distortion_bound: Some(1.0), ..MapMeta::polynomial("identity", 1) }
    }
}

/// x ↦ A x.
pub struct Linear {
    matrix: DMatrix<f64>,
}

impl Linear {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::Domain("linear map needs a square matrix of size >= 2".into()));
        }
        Ok(Self { matrix })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn scaling(n: usize, s: f64) -> Self {
        Self { matrix: DMatrix::identity(n, n) * s }
    }
}

impl MapExpr for Linear {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn eval(&self, x: &PointN) -> PointN {
        let v = &self.matrix * nalgebra::DVector::from_column_slice(x.coords());
        PointN::raw(v.as_slice().to_vec())
    }
    fn jacobian(&self, _x: &PointN) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }
    fn meta(&self) -> MapMeta {
        MapMeta::polynomial("linear", 1)
    }
}

/// Wraps a closure.
pub struct FnMap<F> {
    dim: usize,
    meta: MapMeta,
    f: F,
}

impl<F: Fn(&PointN) -> PointN + Send + Sync> FnMap<F> {
    pub fn new(dim: usize, meta: MapMeta, f: F) -> Self {
        Self { dim, meta, f }
    }
}

impl<F: Fn(&PointN) -> PointN + Send + Sync> MapExpr for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &PointN) -> PointN {
        (self.f)(x)
    }
    fn meta(&self) -> MapMeta {
        self.meta.clone()
    }
}

/// outer ∘ inner.
pub struct Compose {
    outer: DynMap,
    inner: DynMap,
}

impl Compose {
    pub fn new(outer: DynMap, inner: DynMap) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: inner.dim(), got: outer.dim() });
        }
        Ok(Self { outer, inner })
    }
}

impl MapExpr for Compose {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &PointN) -> PointN {
        self.outer.eval(&self.inner.eval(x))
    }
    fn jacobian(&self, x: &PointN) -> Option<DMatrix<f64>> {
        let ji = self.inner.jacobian(x)?;
        let jo = self.outer.jacobian(&self.inner.eval(x))?;
        Some(jo * ji)
    }
    fn meta(&self) -> MapMeta {
        let (o, i) = (self.outer.meta(), self.inner.meta());
        let map_type = if o.map_type == MapType::Transcendental || i.map_type == MapType::Transcendental {
            MapType::Transcendental
        } else {
            MapType::Polynomial
        };
        MapMeta {
            name: format!("{} ∘ {}", o.name, i.name),
            map_type,
            degree: o.degree.zip(i.degree).map(|(a, b)| a * b),
            distortion_bound: o.distortion_bound.zip(i.distortion_bound).map(|(a, b)| a * b),
        }
    }
    fn kink_gap(&self, x: &PointN) -> Option<f64> {
        let a = self.inner.kink_gap(x);
        let b = self.outer.kink_gap(&self.inner.eval(x));
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// surf_out^{-1} ∘ map ∘ surf_in, where surf maps S(r) onto the r-dilate
/// of the star surface.
pub fn smooth_conjugate(map: DynMap, surf_in: StarSurface, surf_out: StarSurface) -> Result<DynMap> {
    let n = map.dim();
    if surf_in.dim() != n || surf_out.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: surf_in.dim().max(surf_out.dim()) });
    }
    let mut meta = map.meta();
    meta.name = format!("conjugate({})", meta.name);
    meta.distortion_bound = None;
    Ok(Arc::new(FnMap::new(n, meta, move |x: &PointN| {
        radial_star_inverse(&surf_out, &map.eval(&radial_star_map(&surf_in, x)))
    })))
}

impl MapExpr for ZorichMap {
    fn dim(&self) -> usize {
        ZorichMap::dim(self)
    }
    fn eval(&self, x: &PointN) -> PointN {
        ZorichMap::eval(self, x)
    }
    fn meta(&self) -> MapMeta {
        MapMeta { name: "zorich".into(), map_type: MapType::Transcendental, degree: None, distortion_bound: None }
    }
    fn kink_gap(&self, x: &PointN) -> Option<f64> {
        let n = ZorichMap::dim(self);
        if n == 2 {
            return None;
        }
        Some(self.edge_gap(x.horizontal()))
    }
}

impl MapExpr for PowerMap {
    fn dim(&self) -> usize {
        PowerMap::dim(self)
    }
    fn eval(&self, x: &PointN) -> PointN {
        PowerMap::eval(self, x)
    }
    fn meta(&self) -> MapMeta {
        MapMeta::polynomial(&format!("power(d={})", self.degree()), self.topological_degree())
    }
    fn kink_gap(&self, x: &PointN) -> Option<f64> {
        if PowerMap::dim(self) == 2 || x.is_zero() {
            return if x.is_zero() { Some(0.0) } else { None };
        }
        // branch set of P is the image of the beam edges; gap in cell units
        // scaled back to the sphere of |x|
        self.zorich().branch_image_gap(x).ok().map(|g| g * x.norm())
    }
}

/// The vertical shrink f as a map of R^n.
pub struct ShrinkF(pub ShrinkMap);

impl MapExpr for ShrinkF {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, y: &PointN) -> PointN {
        self.0.f(y)
    }
    fn meta(&self) -> MapMeta {
        MapMeta { distortion_bound: Some(3.0), ..MapMeta::polynomial("shrink_f", 1) }
    }
    fn kink_gap(&self, y: &PointN) -> Option<f64> {
        self.0.pullback().kink_gap(y)
    }
}

/// h₁ = Z ∘ f ∘ Z^{-1}.
pub struct H1(pub ShrinkMap);

impl MapExpr for H1 {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, x: &PointN) -> PointN {
        self.0.h1(x)
    }
    fn meta(&self) -> MapMeta {
        MapMeta::polynomial("h1", 1)
    }
    fn kink_gap(&self, x: &PointN) -> Option<f64> {
        if x.is_zero() {
            return Some(0.0);
        }
        let z = self.0.zorich();
        let y = z.invert(x).ok()?;
        let g = self.0.pullback().kink_gap(&y)?;
        // Z stretches by about e^{t}·π/2 horizontally
        Some(g * x.norm())
    }
}

/// h = P ∘ h₁, the polynomial-type map with M(h) = T.
pub fn polynomial_composite(shrink: ShrinkMap, degree: u32) -> Result<DynMap> {
    let power = PowerMap::new(shrink.zorich().clone(), degree)?;
    Ok(Arc::new(Compose::new(Arc::new(power), Arc::new(H1(shrink)))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sampling::sphere_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conjugate_of_scaling_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3] {
            for surf in [StarSurface::cube(n), StarSurface::default_polytope(n), StarSurface::sphere(n)] {
                let c = smooth_conjugate(Arc::new(Linear::scaling(n, 2.0)), surf.clone(), surf.clone()).unwrap();
                let id = smooth_conjugate(Arc::new(Identity(n)), surf.clone(), surf).unwrap();
                for _ in 0..500 {
                    let x = PointN::raw((0..n).map(|_| rng.random_range(-3.0..3.0)).collect());
                    assert!(c.eval(&x).distance(&x.scale(2.0)) < 1e-12);
                    assert!(id.eval(&x).distance(&x) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conjugated_cube_square_map_is_round() {
        // y = ‖x‖∞ x sends Q(r) onto Q(r²)
        for n in [2, 3] {
            let sq = Arc::new(FnMap::new(n, MapMeta::polynomial("cube_square", 1), |x: &PointN| x.scale(x.norm_sup())));
            let c = smooth_conjugate(sq, StarSurface::cube(n), StarSurface::cube(n)).unwrap();
            for r in [0.5, 1.0, 3.0] {
                let mods: Vec<f64> = sphere_grid(n, r, 1000).iter().map(|x| c.eval(x).norm()).collect();
                let hi = mods.iter().cloned().fold(f64::MIN, f64::max);
                let lo = mods.iter().cloned().fold(f64::MAX, f64::min);
                assert!((hi - lo) / (r * r) <= 1e-9 && (hi - r * r).abs() < 1e-9 * r * r);
            }
        }
    }

    #[test]
    fn compose_metadata() {
        let z = ZorichMap::new(3).unwrap();
        let p: DynMap = Arc::new(PowerMap::new(z.clone(), 2).unwrap());
        let c = Compose::new(p.clone(), p).unwrap();
        assert_eq!(c.meta().degree, Some(16));
        let t = Compose::new(Arc::new(z), Arc::new(Identity(3))).unwrap();
        assert_eq!(t.meta().map_type, MapType::Transcendental);
        assert!(Compose::new(Arc::new(Identity(2)), Arc::new(Identity(3))).is_err());
    }
}
