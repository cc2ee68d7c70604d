use crate::error::{Error, Result};

use super::point::{dist_sq, PointN};

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Exact k-d tree over a fixed point set.
///
/// Ties between equidistant points are broken by the lowest insertion
/// index, so results match a linear scan exactly.
pub struct SpatialIndex {
    dim: usize,
    points: Vec<PointN>,
    /// Point indices, permuted so that each leaf owns a contiguous range.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl SpatialIndex {
    pub fn new(points: Vec<PointN>) -> Result<Self> {
        let dim = points.first().map(|p| p.dim()).unwrap_or(2);
        for p in &points {
            p.check_dim(dim)?;
        }
        let mut index = Self { dim, order: (0..points.len()).collect(), points, nodes: Vec::new() };
        if !index.points.is_empty() {
            let n = index.points.len();
            index.build(0, n);
        }
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PointN] {
        &self.points
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        // split on the axis of largest spread
        let mut best_axis = 0;
        let mut best_spread = -1.0;
        for axis in 0..self.dim {
            let (lo, hi) = self.order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let c = self.points[i][axis];
                (lo.min(c), hi.max(c))
            });
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best_axis = axis;
            }
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end]
            .select_nth_unstable_by(mid - start, |&a, &b| points[a][best_axis].total_cmp(&points[b][best_axis]));
        let value = self.points[self.order[mid]][best_axis];
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[slot] = Node::Split { axis: best_axis, value, left, right };
        slot
    }

    /// Exact nearest stored point: returns (distance, witness index).
    pub fn nearest_index(&self, y: &[f64]) -> Result<(f64, usize)> {
        if self.points.is_empty() {
            return Err(Error::Empty("nearest-neighbour query on an empty index"));
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: y.len() });
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(0, y, &mut best);
        Ok((best.0.sqrt(), best.1))
    }

    /// Exact nearest stored point with its witness.
    pub fn nearest(&self, y: &PointN) -> Result<(f64, PointN)> {
        let (d, i) = self.nearest_index(y.coords())?;
        Ok((d, self.points[i].clone()))
    }

    fn search(&self, node: usize, y: &[f64], best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = dist_sq(self.points[i].coords(), y);
                    if d < best.0 || (d == best.0 && i < best.1) {
                        *best = (d, i);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = y[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, y, best);
                // `<=` keeps equidistant candidates reachable for tie-breaking
                if diff * diff <= best.0 {
                    self.search(far, y, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_scan(points: &[PointN], y: &PointN) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in points.iter().enumerate() {
            let d = p.distance_sq(y);
            if d < best.0 {
                best = (d, i);
            }
        }
        (best.0.sqrt(), best.1)
    }

    #[test]
    fn small_examples() {
        let idx = SpatialIndex::new(vec![PointN::new(vec![0.0, 0.0]).unwrap(), PointN::new(vec![3.0, 0.0]).unwrap()])
            .unwrap();
        let (d, w) = idx.nearest(&PointN::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(w.coords(), &[0.0, 0.0]);
        let y = PointN::new(vec![3.0, 0.0]).unwrap();
        let (d, w) = idx.nearest(&y).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(w, y);
    }

    #[test]
    fn empty_index_errors() {
        let idx = SpatialIndex::new(vec![]).unwrap();
        assert!(idx.nearest(&PointN::zeros(2)).is_err());
    }

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5] {
            let pts: Vec<PointN> =
                (0..10_000).map(|_| PointN::raw((0..n).map(|_| rng.random_range(-10.0..10.0)).collect())).collect();
            let idx = SpatialIndex::new(pts.clone()).unwrap();
            for _ in 0..500 {
                let y = PointN::raw((0..n).map(|_| rng.random_range(-12.0..12.0)).collect());
                let (d, i) = idx.nearest_index(y.coords()).unwrap();
                let (d0, i0) = linear_scan(&pts, &y);
                assert_eq!(d, d0);
                assert_eq!(i, i0);
            }
        }
    }

    #[test]
    fn duplicate_points_tie_break_low_index() {
        let p = PointN::new(vec![1.0, 1.0]).unwrap();
        let pts: Vec<PointN> = (0..50).map(|_| p.clone()).collect();
        let idx = SpatialIndex::new(pts).unwrap();
        assert_eq!(idx.nearest_index(&[0.0, 0.0]).unwrap().1, 0);
    }
}
