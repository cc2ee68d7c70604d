use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^n, n >= 2.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointN {
    coords: Vec<f64>,
}

impl PointN {
    /// Validated constructor: n >= 2 and every coordinate finite.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::BadDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    /// Unchecked constructor for internal arithmetic, where the dimension is
    /// already known to be valid.
    pub(crate) fn raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() >= 2);
        Self { coords }
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn zeros(n: usize) -> Self {
        Self::raw(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// First n-1 coordinates.
    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    /// The n-th coordinate.
    pub fn last(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn norm_sup(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn dot(&self, other: &PointN) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, other: &PointN) -> f64 {
        dist(&self.coords, &other.coords)
    }

    pub fn distance_sq(&self, other: &PointN) -> f64 {
        dist_sq(&self.coords, &other.coords)
    }

    pub fn scale(&self, s: f64) -> PointN {
        PointN::raw(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim() });
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

impl fmt::Debug for PointN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointN{:?}", self.coords)
    }
}

impl Index<usize> for PointN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl Add for &PointN {
    type Output = PointN;
    fn add(self, rhs: &PointN) -> PointN {
        PointN::raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &PointN {
    type Output = PointN;
    fn sub(self, rhs: &PointN) -> PointN {
        PointN::raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &PointN {
    type Output = PointN;
    fn mul(self, s: f64) -> PointN {
        self.scale(s)
    }
}

impl Neg for &PointN {
    type Output = PointN;
    fn neg(self) -> PointN {
        self.scale(-1.0)
    }
}

/// S(center, radius). Radius zero is the singleton {center}.
#[derive(Clone, Debug, PartialEq)]
pub struct Sphere {
    pub center: PointN,
    radius: f64,
}

impl Sphere {
    pub fn new(center: PointN, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("sphere radius must be >= 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Origin-centred sphere S(r).
    pub fn origin(n: usize, radius: f64) -> Result<Self> {
        Self::new(PointN::zeros(n), radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: &PointN, tol: f64) -> bool {
        (x.distance(&self.center) - self.radius).abs() <= tol
    }

    /// Radial projection onto the sphere; the centre itself maps to the
    /// "north pole" centre + radius e_n.
    pub fn project(&self, x: &PointN) -> PointN {
        let d = x - &self.center;
        let len = d.norm();
        if len == 0.0 {
            let mut c = self.center.clone().into_coords();
            let n = c.len();
            c[n - 1] += self.radius;
            return PointN::raw(c);
        }
        &self.center + &d.scale(self.radius / len)
    }
}
