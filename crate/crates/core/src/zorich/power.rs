use crate::error::{Error, Result};
use crate::geom::PointN;

use super::ZorichMap;

/// Quasiregular power map P solving P∘Z = Z∘A with A(x) = dx.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerMap {
    zorich: ZorichMap,
    degree: u32,
}

/// Result of [`PowerMap::preimages`].
#[derive(Clone, Debug)]
pub struct Preimages {
    pub points: Vec<PointN>,
    /// Target was 0: only the origin is returned.
    pub degenerate: bool,
}

impl PowerMap {
    pub fn new(zorich: ZorichMap, degree: u32) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Domain(format!("power map degree must be >= 2, got {degree}")));
        }
        Ok(Self { zorich, degree })
    }

    pub fn zorich(&self) -> &ZorichMap {
        &self.zorich
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.zorich.dim()
    }

    /// Topological degree d^{n−1}.
    pub fn topological_degree(&self) -> u64 {
        (self.degree as u64).pow(self.dim() as u32 - 1)
    }

    /// P(x) = Z(d·Z^{-1}(x)), P(0) = 0.
    pub fn eval(&self, x: &PointN) -> PointN {
        if x.is_zero() {
            return x.clone();
        }
        let pre = self.zorich.invert(x).expect("non-zero point has a preimage");
        self.zorich.eval(&pre.scale(self.degree as f64))
    }

    /// All x with P(x) = y. For generic y there are exactly d^{n−1}.
    pub fn preimages(&self, y: &PointN) -> Result<Preimages> {
        y.check_dim(self.dim())?;
        if y.is_zero() {
            return Ok(Preimages { points: vec![y.clone()], degenerate: true });
        }
        let z = &self.zorich;
        let d = self.degree as f64;
        let y0 = z.invert(y)?;
        let t = y0.last();
        // fibre members of y0 with translation index k ∈ [0, d) per axis
        let lo: Vec<f64> = vec![-1.0; self.dim() - 1];
        let hi: Vec<f64> = vec![4.0 * d + 3.0 - 1e-12; self.dim() - 1];
        let mut cells: Vec<(Vec<f64>, u8)> = Vec::new();
        let mut points = Vec::new();
        for sigma in z.fiber_in_cell_box(&y0, &lo, &hi) {
            let mut c = z.from_cell(&sigma);
            c.push(t);
            let w = PointN::raw(c).scale(1.0 / d);
            let f = z.fold(w.horizontal());
            let duplicate = cells
                .iter()
                .any(|(xi, par)| *par == f.parity && xi.iter().zip(&f.xi).all(|(a, b)| (a - b).abs() < 1e-9));
            if !duplicate {
                cells.push((f.xi, f.parity));
                points.push(z.eval(&w));
            }
        }
        Ok(Preimages { points, degenerate: false })
    }
}
