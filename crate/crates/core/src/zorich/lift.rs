use crate::error::{Error, Result};
use crate::geom::PointN;

use super::ZorichMap;

/// Largest accepted horizontal jump between consecutive lift points.
const MAX_LIFT_STEP: f64 = 0.25;
const MAX_DEPTH: u32 = 48;
/// Interior path points closer than this (cell units) to the branch image
/// are rejected.
const BRANCH_TOL: f64 = 1e-9;

impl ZorichMap {
    /// Lifts a polyline in R^n \ {0} through Z starting from `start`.
    ///
    /// Each step replaces the next path point by the member of its fibre
    /// nearest to the previous lift point; the step is halved until that
    /// choice is unambiguous. Returns one lift point per path vertex.
    pub fn lift_path(&self, path: &[PointN], start: &PointN) -> Result<Vec<PointN>> {
        let first = path.first().ok_or(Error::Empty("path"))?;
        start.check_dim(self.n)?;
        for p in path {
            p.check_dim(self.n)?;
        }
        let img = self.eval(start);
        if img.distance(first) > 1e-9 * first.norm().max(1.0) {
            return Err(Error::Domain("start lift does not map to the path start".into()));
        }
        let mut lifts = vec![start.clone()];
        let segments = path.len().saturating_sub(1);
        for (i, w) in path.windows(2).enumerate() {
            let prev = lifts.last().unwrap().clone();
            let last_segment = i + 1 == segments;
            let next = self.lift_segment(&w[0], &w[1], prev, i, last_segment)?;
            lifts.push(next);
        }
        Ok(lifts)
    }

    fn lift_segment(&self, a: &PointN, b: &PointN, mut lift: PointN, seg: usize, last_segment: bool) -> Result<PointN> {
        let point_at = |s: f64| &a.scale(1.0 - s) + &b.scale(s);
        let mut s = 0.0_f64;
        let mut h = 1.0_f64;
        while s < 1.0 {
            let step = h.min(1.0 - s);
            let s_next = if s + step >= 1.0 - 1e-15 { 1.0 } else { s + step };
            let q = point_at(s_next);
            let param = seg as f64 + s_next;
            if q.is_zero() {
                return Err(Error::Domain(format!("path passes through 0 at parameter {param}")));
            }
            let endpoint = last_segment && s_next == 1.0;
            if !endpoint && self.branch_image_gap(&q)? < BRANCH_TOL {
                return Err(Error::BranchImage { param });
            }
            match self.nearest_fiber_member(&q, &lift) {
                Some(c) => {
                    lift = c;
                    s = s_next;
                    h = (h * 2.0).min(1.0);
                }
                None => {
                    h *= 0.5;
                    if h < 0.5f64.powi(MAX_DEPTH as i32) {
                        return Err(Error::RefinementRequired {
                            param: seg as f64 + s,
                            reason: "fibre points too close to resolve the branch".into(),
                        });
                    }
                }
            }
        }
        Ok(lift)
    }

    /// Fibre member of q nearest (horizontally) to `near`, if it is within
    /// the step bound and clearly nearer than every other member.
    fn nearest_fiber_member(&self, q: &PointN, near: &PointN) -> Option<PointN> {
        let pre = self.invert(q).ok()?;
        let center = self.to_cell(near.horizontal());
        let radius = 3.0;
        let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
        let mut cands: Vec<(f64, Vec<f64>)> = self
            .fiber_in_cell_box(&pre, &lo, &hi)
            .into_iter()
            .map(|s| {
                let d = s.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                (d, s)
            })
            .collect();
        cands.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (d1, best) = cands.first()?.clone();
        let d2 = cands.get(1).map(|c| c.0).unwrap_or(f64::INFINITY);
        if d1 > MAX_LIFT_STEP || d2 <= 2.0 * d1 + 1e-12 {
            return None;
        }
        let mut c = self.from_cell(&best);
        c.push(pre.last());
        Some(PointN::raw(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn p(c: &[f64]) -> PointN {
        PointN::from_slice(c).unwrap()
    }

    #[test]
    fn constant_path() {
        let z = ZorichMap::new(2).unwrap();
        let path = vec![p(&[0.0, 1.0]); 5];
        let lift = z.lift_path(&path, &p(&[0.0, 0.0])).unwrap();
        assert!(lift.iter().all(|x| x.distance(&p(&[0.0, 0.0])) < 1e-15));
    }

    #[test]
    fn radial_path_lifts_vertically() {
        let z = ZorichMap::new(2).unwrap();
        let path: Vec<PointN> = (0..=10).map(|i| p(&[0.0, (i as f64 / 10.0).exp()])).collect();
        let lift = z.lift_path(&path, &p(&[0.0, 0.0])).unwrap();
        for (i, x) in lift.iter().enumerate() {
            assert!(x.distance(&p(&[0.0, i as f64 / 10.0])) < 1e-12);
        }
    }

    #[test]
    fn full_circle_lifts_to_one_period() {
        let z = ZorichMap::new(2).unwrap();
        // counterclockwise from (0, 1)
        let path: Vec<PointN> = (0..=64)
            .map(|i| {
                let a = std::f64::consts::FRAC_PI_2 + TAU * i as f64 / 64.0;
                p(&[a.cos(), a.sin()])
            })
            .collect();
        let start = p(&[0.0, 0.0]);
        let lift = z.lift_path(&path, &start).unwrap();
        let end = lift.last().unwrap();
        // Z turns clockwise as x_1 increases, so a counterclockwise loop
        // lifts to the translate by −4e_1
        assert!(end.distance(&p(&[-4.0, 0.0])) < 1e-12, "{end:?}");
        for (x, y) in lift.iter().zip(&path) {
            assert!(z.eval(x).distance(y) < 1e-12);
        }
        // lift is continuous: consecutive points are close
        for w in lift.windows(2) {
            assert!(w[0].distance(&w[1]) < 0.2);
        }
    }

    #[test]
    fn spatial_loop_and_branch_errors() {
        let z = ZorichMap::new(3).unwrap();
        // loop around the vertical axis in the upper half space
        let path: Vec<PointN> = (0..=200)
            .map(|i| {
                let a = TAU * i as f64 / 200.0;
                p(&[0.6 * a.cos(), 0.6 * a.sin(), 0.8])
            })
            .collect();
        let start = z.invert(&path[0]).unwrap();
        let lift = z.lift_path(&path, &start).unwrap();
        for (x, y) in lift.iter().zip(&path) {
            assert!(z.eval(x).distance(y) < 1e-10);
        }
        // the loop in the upper hemisphere encircles only the pole, whose
        // preimage is a regular point, so the lift closes up
        assert!(lift.last().unwrap().distance(&start) < 1e-9);

        // a path through the branch image: the equator point in direction
        // h(1, 1) = (1, 1, 0)/√2
        let b = p(&[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0]);
        let a = p(&[0.5, 0.6, 0.62]);
        let c = &b.scale(2.0) - &a;
        let path = vec![a.clone(), b.clone(), c];
        let start = z.invert(&a).unwrap();
        assert!(matches!(z.lift_path(&path, &start), Err(Error::BranchImage { .. })));
        // ending at the branch image is allowed
        let lift = z.lift_path(&[a.clone(), b.clone()], &start).unwrap();
        assert!(z.eval(lift.last().unwrap()).distance(&b) < 1e-9);
    }

    #[test]
    fn bad_start_rejected() {
        let z = ZorichMap::new(2).unwrap();
        let path = vec![p(&[0.0, 1.0]), p(&[1.0, 1.0])];
        assert!(z.lift_path(&path, &p(&[0.5, 0.0])).is_err());
        assert!(z.lift_path(&[p(&[0.0, 1.0]), p(&[0.0, -1.0])], &p(&[0.0, 0.0])).is_err());
    }
}
