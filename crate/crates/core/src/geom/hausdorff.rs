use crate::error::{Error, Result};

use super::kdtree::SpatialIndex;
use super::point::PointN;

/// sup over a in A of d(a, B).
pub fn directed_hausdorff(a: &[PointN], b: &SpatialIndex) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("hausdorff distance of an empty set"));
    }
    let mut worst = 0.0_f64;
    for p in a {
        worst = worst.max(b.nearest_index(p.coords())?.0);
    }
    Ok(worst)
}

/// Symmetric Hausdorff distance between two finite samples.
pub fn hausdorff_distance(a: &[PointN], b: &[PointN]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("hausdorff distance of an empty set"));
    }
    let ia = SpatialIndex::new(a.to_vec())?;
    let ib = SpatialIndex::new(b.to_vec())?;
    Ok(directed_hausdorff(a, &ib)?.max(directed_hausdorff(b, &ia)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(a: &[PointN], b: &[PointN]) -> f64 {
        let dir = |x: &[PointN], y: &[PointN]| {
            x.iter().map(|p| y.iter().map(|q| p.distance(q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        dir(a, b).max(dir(b, a))
    }

    #[test]
    fn trivial_cases() {
        let a = vec![PointN::new(vec![0.0, 0.0]).unwrap()];
        let b = vec![PointN::new(vec![1.0, 0.0]).unwrap()];
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
        assert!(hausdorff_distance(&a, &[]).is_err());
    }

    #[test]
    fn matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut gen = |k: usize| -> Vec<PointN> {
                (0..k)
                    .map(|_| {
                        PointN::raw(vec![
                            rng.random_range(-5.0..5.0),
                            rng.random_range(-5.0..5.0),
                            rng.random_range(-1.0..1.0),
                        ])
                    })
                    .collect()
            };
            let a = gen(150);
            let b = gen(90);
            assert_eq!(hausdorff_distance(&a, &b).unwrap(), brute(&a, &b));
        }
    }
}
