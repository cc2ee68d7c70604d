//! Numerical verification: sphere maximum modulus, maximum modulus set
//! extraction and comparison with the target, distortion and Lipschitz
//! probes, planar winding numbers.

mod distortion;
mod maxmod;

pub use distortion::{
    distortion_probe, lipschitz_probe, DistortionMode, DistortionReport, LipschitzReport, PointEstimate, Quantiles,
};
pub use maxmod::{
    compare_to_target, extract_mms, max_modulus, sphere_samples, Budget, CompareReport, CompareRow, MMSExtract,
    MaxModResult, ARGMAX_REL_TOL,
};

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geom::sampling::circle_point;
use crate::map::MapExpr;

/// Winding number of f(S(r)) about 0 for a planar map, from `samples`
/// equally spaced circle points. Fails if the image passes through 0.
pub fn winding_number(map: &dyn MapExpr, r: f64, samples: usize) -> Result<f64> {
    if map.dim() != 2 {
        return Err(Error::Unsupported(format!("winding numbers need n = 2, got {}", map.dim())));
    }
    if !(r > 0.0) || samples < 3 {
        return Err(Error::Domain("winding number needs r > 0 and at least 3 samples".into()));
    }
    let angles: Vec<f64> = (0..samples)
        .map(|i| {
            let w = map.eval(&circle_point(r, TAU * i as f64 / samples as f64));
            if w.is_zero() {
                Err(Error::Domain(format!("image of S({r}) passes through 0")))
            } else {
                Ok(w[1].atan2(w[0]))
            }
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..samples {
        let mut d = angles[(i + 1) % samples] - angles[i];
        d -= TAU * ((d + PI) / TAU).floor();
        total += d;
    }
    Ok(total / TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointN;
    use crate::map::Identity;
    use crate::zorich::{PowerMap, ZorichMap};

    #[test]
    fn winding_of_power_maps() {
        assert!((winding_number(&Identity(2), 1.0, 64).unwrap() - 1.0).abs() < 1e-12);
        for d in [2, 3, 5] {
            let p = PowerMap::new(ZorichMap::new(2).unwrap(), d).unwrap();
            assert!((winding_number(&p, 0.7, 1024).unwrap() - d as f64).abs() < 1e-9);
        }
        assert!(winding_number(&Identity(3), 1.0, 64).is_err());
        let _ = PointN::zeros(2);
    }
}
