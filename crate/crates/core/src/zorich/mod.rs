//! The Zorich map: a quasiregular analogue of the exponential that sends
//! each hyperplane {x_n = t} onto the sphere S(e^t) and is strongly
//! automorphic under a discrete group G preserving x_n.
//!
//! Horizontal coordinates are handled in *cell coordinates* σ = x' − o,
//! where o is the map's cell offset. The base cell is Ω = [−1,1]^{n−1} in
//! σ; neighbouring cells are mirror images across the faces σ_i = ±1, and
//! crossing a face flips the target hemisphere. G is generated by the
//! translations σ ↦ σ + 4e_i and by the products of two face reflections.
//!
//! For n ≥ 3 the offset is o = (1, …, 1), which puts a vertex of the cell
//! tiling at the origin. Every rotation of G then has its axis through a
//! point of 2Z^{n−1}, so the dilation x ↦ dx normalises G for every d ≥ 2
//! and the power maps below satisfy the Schröder equation exactly. In the
//! plane G has no rotations and the offset is zero.

mod lift;
mod power;

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geom::PointN;

pub use power::{PowerMap, Preimages};

/// Per-coordinate outcome of the period-4 tent fold.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldResult {
    /// Folded point in Ω = [−1,1]^{n−1}.
    pub xi: Vec<f64>,
    /// Hemisphere parity: 0 upper, 1 lower.
    pub parity: u8,
    /// σ_i = ξ_i + 4k_i, or σ_i = 2 − ξ_i + 4k_i when reflected.
    pub translations: Vec<i64>,
    pub reflected: Vec<bool>,
}

/// Folds cell coordinates into Ω with the period-4 tent rule.
pub fn fold_cell(sigma: &[f64]) -> FoldResult {
    let mut xi = Vec::with_capacity(sigma.len());
    let mut translations = Vec::with_capacity(sigma.len());
    let mut reflected = Vec::with_capacity(sigma.len());
    let mut parity = 0u8;
    for &s in sigma {
        if (-1.0..=1.0).contains(&s) {
            // already in the base cell; keep it bit-exact
            xi.push(s);
            reflected.push(false);
            translations.push(0);
            continue;
        }
        let shifted = s + 1.0;
        let k = (shifted / 4.0).floor();
        let m = shifted - 4.0 * k;
        if m <= 2.0 {
            xi.push(m - 1.0);
            reflected.push(false);
        } else {
            xi.push(3.0 - m);
            reflected.push(true);
            parity ^= 1;
        }
        translations.push(k as i64);
    }
    FoldResult { xi, parity, translations, reflected }
}

/// Geodesic-polar hemisphere map with sup-norm radial coordinate:
/// ξ ↦ (u sin(πρ/2), ±cos(πρ/2)), ρ = ‖ξ‖∞, u = ξ/|ξ|₂.
pub fn hemisphere(xi: &[f64], parity: u8) -> Vec<f64> {
    let rho = xi.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let len = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let (s, c) = (FRAC_PI_2 * rho).sin_cos();
    let mut out: Vec<f64> = if len > 0.0 { xi.iter().map(|v| v / len * s).collect() } else { vec![0.0; xi.len()] };
    out.push(if parity == 0 { c } else { -c });
    out
}

/// A group element acting on R^n (acts on the first n−1 coordinates).
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    /// σ_axis ↦ σ_axis + 4·steps
    Translate { axis: usize, steps: i64 },
    /// Reflect across σ_i = 1 and σ_j = 1 (i ≠ j).
    DoubleReflect { i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZorichMap {
    n: usize,
    offset: Vec<f64>,
}

impl ZorichMap {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadDimension(n));
        }
        let offset = if n == 2 { vec![0.0] } else { vec![1.0; n - 1] };
        Ok(Self { n, offset })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Cell offset o: σ = x' − o.
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn to_cell(&self, x_h: &[f64]) -> Vec<f64> {
        x_h.iter().zip(&self.offset).map(|(a, o)| a - o).collect()
    }

    pub fn from_cell(&self, sigma: &[f64]) -> Vec<f64> {
        sigma.iter().zip(&self.offset).map(|(a, o)| a + o).collect()
    }

    /// Fold of the horizontal part x′ (given in the map's x coordinates).
    pub fn fold(&self, x_h: &[f64]) -> FoldResult {
        fold_cell(&self.to_cell(x_h))
    }

    /// Z(x) = e^{x_n} ĥ(x′).
    pub fn eval(&self, x: &PointN) -> PointN {
        let f = self.fold(x.horizontal());
        let scale = x.last().exp();
        PointN::raw(hemisphere(&f.xi, f.parity).into_iter().map(|c| c * scale).collect())
    }

    /// Canonical preimage: the base cell over the closed upper hemisphere,
    /// the neighbour across σ_1 = 1 over the open lower hemisphere.
    pub fn invert(&self, y: &PointN) -> Result<PointN> {
        y.check_dim(self.n)?;
        let r = y.norm();
        if r == 0.0 {
            return Err(Error::Domain("0 is not in the image of the Zorich map".into()));
        }
        let n = self.n;
        let wn = y[n - 1] / r;
        let w_h: Vec<f64> = y.horizontal().iter().map(|c| c / r).collect();
        let h_len = w_h.iter().map(|c| c * c).sum::<f64>().sqrt();
        let rho = (h_len.atan2(wn.abs()) / FRAC_PI_2).clamp(0.0, 1.0);
        let mut xi = if h_len > 0.0 {
            let sup = w_h.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            w_h.iter().map(|c| rho * c / sup).collect::<Vec<_>>()
        } else {
            vec![0.0; n - 1]
        };
        if wn < 0.0 {
            xi[0] = 2.0 - xi[0];
        }
        let mut coords = self.from_cell(&xi);
        coords.push(r.ln());
        Ok(PointN::raw(coords))
    }

    /// Generators of G: unit translations ±4e_i and, for n ≥ 3, the
    /// double face reflections.
    pub fn generators(&self) -> Vec<GroupElement> {
        let m = self.n - 1;
        let mut g = Vec::new();
        for axis in 0..m {
            g.push(GroupElement::Translate { axis, steps: 1 });
            g.push(GroupElement::Translate { axis, steps: -1 });
        }
        for i in 0..m {
            for j in i + 1..m {
                g.push(GroupElement::DoubleReflect { i, j });
            }
        }
        g
    }

    pub fn apply(&self, g: &GroupElement, x: &PointN) -> PointN {
        let mut c = x.coords().to_vec();
        match *g {
            GroupElement::Translate { axis, steps } => c[axis] += 4.0 * steps as f64,
            GroupElement::DoubleReflect { i, j } => {
                c[i] = 2.0 + 2.0 * self.offset[i] - c[i];
                c[j] = 2.0 + 2.0 * self.offset[j] - c[j];
            }
        }
        PointN::raw(c)
    }

    /// Representative of x's G-orbit in the two canonical cells (base cell,
    /// or its σ_1-neighbour when the fold parity is odd). Exact isometry.
    pub fn canonical(&self, x: &PointN) -> PointN {
        let f = self.fold(x.horizontal());
        let mut sigma = f.xi;
        if f.parity == 1 {
            sigma[0] = 2.0 - sigma[0];
        }
        let mut c = self.from_cell(&sigma);
        c.push(x.last());
        PointN::raw(c)
    }

    /// Branch set distance proxy in cell coordinates: the second-smallest
    /// gap 1 − |ξ_i|. Zero exactly on the edges of the beam (n ≥ 3).
    pub fn edge_gap(&self, x_h: &[f64]) -> f64 {
        if self.n == 2 {
            return f64::INFINITY;
        }
        let f = self.fold(x_h);
        let mut gaps: Vec<f64> = f.xi.iter().map(|c| 1.0 - c.abs()).collect();
        gaps.sort_by(f64::total_cmp);
        gaps[1]
    }

    /// Distance proxy from y to the image of the branch set, in cell units.
    pub fn branch_image_gap(&self, y: &PointN) -> Result<f64> {
        if self.n == 2 {
            return Ok(f64::INFINITY);
        }
        let x = self.invert(y)?;
        Ok(self.edge_gap(x.horizontal()))
    }

    /// All points of the fibre of `x` (same image) whose cell coordinates lie
    /// in the box [lo, hi] (cell coordinates).
    pub(crate) fn fiber_in_cell_box(&self, x: &PointN, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
        let f = self.fold(x.horizontal());
        let equator = f.xi.iter().any(|c| c.abs() >= 1.0 - 1e-15);
        let m = self.n - 1;
        // per coordinate candidate values with reflection flag
        let per: Vec<Vec<(f64, u8)>> = (0..m)
            .map(|i| {
                let mut v = Vec::new();
                for (base, refl) in [(f.xi[i], 0u8), (2.0 - f.xi[i], 1u8)] {
                    let k0 = ((lo[i] - base) / 4.0).ceil() as i64;
                    let k1 = ((hi[i] - base) / 4.0).floor() as i64;
                    for k in k0..=k1 {
                        v.push((base + 4.0 * k as f64, refl));
                    }
                }
                v
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; m];
        if per.iter().any(|v| v.is_empty()) {
            return out;
        }
        loop {
            let parity = idx.iter().enumerate().fold(0u8, |p, (i, &k)| p ^ per[i][k].1);
            if equator || parity == f.parity {
                let sigma: Vec<f64> = idx.iter().enumerate().map(|(i, &k)| per[i][k].0).collect();
                if !out.iter().any(|s: &Vec<f64>| s.iter().zip(&sigma).all(|(a, b)| (a - b).abs() < 1e-12)) {
                    out.push(sigma);
                }
            }
            let mut i = 0;
            loop {
                if i == m {
                    return out;
                }
                idx[i] += 1;
                if idx[i] < per[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Nearest point of the fibre over the horizontal representative
    /// (ξ, parity) to the cell-coordinate point q; returns squared
    /// horizontal distance.
    pub(crate) fn nearest_fiber_sq(xi: &[f64], parity: u8, any_parity: bool, q: &[f64]) -> f64 {
        // best[p] = minimal partial sum with reflection parity p
        let mut best = [0.0_f64, f64::INFINITY];
        for (i, &qi) in q.iter().enumerate() {
            let near = |base: f64| {
                let k = ((qi - base) / 4.0).round();
                let d = qi - (base + 4.0 * k);
                d * d
            };
            let a = near(xi[i]);
            let b = near(2.0 - xi[i]);
            best = [(best[0] + a).min(best[1] + b), (best[1] + a).min(best[0] + b)];
        }
        if any_parity {
            best[0].min(best[1])
        } else {
            best[parity as usize]
        }
    }
}
