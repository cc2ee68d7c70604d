//! Deterministic sphere sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::point::PointN;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Point of S(r) in R^2 at angle `theta` measured counterclockwise from e_1.
pub fn circle_point(r: f64, theta: f64) -> PointN {
    PointN::raw(vec![r * theta.cos(), r * theta.sin()])
}

/// `count` samples of S(r) ⊂ R^n: a uniform angular grid for n = 2, a
/// Fibonacci lattice for n = 3 and seeded Gaussian directions above that.
pub fn sphere_grid(n: usize, r: f64, count: usize) -> Vec<PointN> {
    let count = count.max(1);
    if r == 0.0 {
        return vec![PointN::zeros(n)];
    }
    match n {
        2 => (0..count).map(|i| circle_point(r, std::f64::consts::TAU * i as f64 / count as f64)).collect(),
        3 => (0..count)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let phi = GOLDEN_ANGLE * i as f64;
                PointN::raw(vec![r * rho * phi.cos(), r * rho * phi.sin(), r * z])
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
            (0..count).map(|_| random_direction(&mut rng, n).scale(r)).collect()
        }
    }
}

/// Uniformly distributed unit vector.
pub fn random_direction<R: rand::Rng>(rng: &mut R, n: usize) -> PointN {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = super::point::norm(&v);
        if len > 1e-12 {
            return PointN::raw(v.into_iter().map(|c| c / len).collect());
        }
    }
}

/// Approximate spacing between neighbouring grid samples on S(r).
pub fn grid_spacing(n: usize, r: f64, count: usize) -> f64 {
    let count = count.max(1) as f64;
    match n {
        2 => std::f64::consts::TAU * r / count,
        3 => r * (4.0 * std::f64::consts::PI / count).sqrt() * 1.2,
        _ => r * 2.0 * (1.0 / count).powf(1.0 / (n as f64 - 1.0)) * 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_lie_on_sphere() {
        for n in [2, 3, 4] {
            for p in sphere_grid(n, 2.5, 300) {
                assert!((p.norm() - 2.5).abs() < 1e-12);
            }
        }
        assert_eq!(sphere_grid(3, 0.0, 10).len(), 1);
    }
}
