//! Growth data for transcendental-type maps: the degree function ν, the
//! growth function Ψ(r) = exp(∫_1^r ν(t)/t dt), the exceptional radii
//! E_ε = ∪ (ε r_n, r_n), and a planar annulus-gluing model D̃ that is a
//! rigid power map on every good annulus [r_k, ε r_{k+1}].

use std::f64::consts::{E, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::PointN;
use crate::map::{Compose, DynMap, MapExpr, MapMeta, MapType, H1};
use crate::shrink::ShrinkMap;

/// Largest n with exp(eⁿ) finite in f64.
pub const MAX_DEFAULT_COUNT: usize = 6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthSchedule {
    r: Vec<f64>,
    ln_r: Vec<f64>,
    epsilon: f64,
    /// ν ≡ c for unit studies; None means piecewise linear through (r_n, n).
    constant_nu: Option<f64>,
}

impl GrowthSchedule {
    /// Explicit schedule. Requires 0 < r_1 < r_2 < …, ε ∈ (0, 1) and
    /// ε r_{n+1} > r_n so the exceptional intervals are disjoint.
    pub fn new(r: Vec<f64>, epsilon: f64) -> Result<Self> {
        let ln_r = r.iter().map(|v| v.ln()).collect();
        Self::from_parts(r, ln_r, epsilon)
    }

    /// r_n = exp(eⁿ) for n = 1..=count.
    pub fn exp_exp(count: usize, epsilon: f64) -> Result<Self> {
        if count == 0 || count > MAX_DEFAULT_COUNT {
            return Err(Error::Domain(format!(
                "exp(e^n) schedule supports 1..={MAX_DEFAULT_COUNT} terms, got {count}"
            )));
        }
        let ln_r: Vec<f64> = (1..=count).map(|k| E.powi(k as i32)).collect();
        let r = ln_r.iter().map(|l| l.exp()).collect();
        Self::from_parts(r, ln_r, epsilon)
    }

    /// ν ≡ c everywhere, so Ψ(r) = r^c; no exceptional set.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("constant degree must be > 0, got {c}")));
        }
        Ok(Self { r: vec![], ln_r: vec![], epsilon: 0.5, constant_nu: Some(c) })
    }

    fn from_parts(r: Vec<f64>, ln_r: Vec<f64>, epsilon: f64) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Empty("growth schedule"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if r.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("schedule radii must be finite and positive".into()));
        }
        for (k, w) in r.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(format!("schedule must be strictly increasing at index {}", k + 1)));
            }
            if !(epsilon * w[1] > w[0]) {
                return Err(Error::Domain(format!(
                    "exceptional intervals overlap: epsilon*r_{} = {} <= r_{} = {}",
                    k + 2,
                    epsilon * w[1],
                    k + 1,
                    w[0]
                )));
            }
        }
        Ok(Self { r, ln_r, epsilon, constant_nu: None })
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn ln_radii(&self) -> &[f64] {
        &self.ln_r
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Linear pieces ν = a t + b on [lo, hi).
    fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        if let Some(c) = self.constant_nu {
            return vec![(0.0, f64::INFINITY, 0.0, c)];
        }
        let r = &self.r;
        let mut out = vec![(0.0, r[0], 0.0, 1.0)];
        for k in 0..r.len().saturating_sub(1) {
            let a = 1.0 / (r[k + 1] - r[k]);
            out.push((r[k], r[k + 1], a, (k + 1) as f64 - a * r[k]));
        }
        let last = r.len() - 1;
        // beyond the last node continue with the last slope (flat for a
        // single-node schedule)
        let a = if last > 0 { 1.0 / (r[last] - r[last - 1]) } else { 0.0 };
        out.push((r[last], f64::INFINITY, a, (last + 1) as f64 - a * r[last]));
        out
    }

    /// ν(t), piecewise linear with ν(r_n) = n and ν ≡ 1 on (0, r_1].
    pub fn nu(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("nu needs t > 0, got {t}")));
        }
        if let Some(c) = self.constant_nu {
            return Ok(c);
        }
        if let Some(k) = self.r.iter().position(|&v| v == t) {
            return Ok((k + 1) as f64);
        }
        let p = self.pieces();
        let &(_, _, a, b) = p.iter().find(|q| t >= q.0 && t < q.1).unwrap_or(p.last().unwrap());
        Ok(a * t + b)
    }

    /// ln Ψ(r) = ∫_1^r ν(t)/t dt, integrated exactly on each linear piece.
    pub fn log_psi(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::Domain(format!("psi needs r >= 1, got {r}")));
        }
        let ln_at = |t: f64| match self.r.iter().position(|&v| v == t) {
            Some(k) => self.ln_r[k],
            None => t.ln(),
        };
        let mut acc = 0.0;
        for (lo, hi, a, b) in self.pieces() {
            let t1 = lo.max(1.0);
            let t2 = hi.min(r);
            if t2 > t1 {
                acc += a * (t2 - t1) + b * (ln_at(t2) - ln_at(t1));
            }
        }
        Ok(acc)
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        self.log_psi(r).map(f64::exp)
    }

    /// True iff r lies in an open interval (ε r_n, r_n).
    pub fn in_exceptional(&self, r: f64) -> bool {
        self.r.iter().any(|&rn| r > self.epsilon * rn && r < rn)
    }

    /// Membership of x in S_ε.
    pub fn in_exceptional_shell(&self, x: &PointN) -> bool {
        self.in_exceptional(x.norm())
    }

    /// (1/ln R) · logarithmic length of E_ε ∩ [1, R].
    pub fn log_density(&self, big_r: f64) -> Result<f64> {
        if !(big_r > 1.0) {
            return Err(Error::Domain(format!("log density needs R > 1, got {big_r}")));
        }
        let ln_big = if let Some(k) = self.r.iter().position(|&v| v == big_r) { self.ln_r[k] } else { big_r.ln() };
        let ln_eps = self.epsilon.ln();
        let mut len = 0.0;
        for &ln_rn in &self.ln_r {
            let a = (ln_rn + ln_eps).max(0.0);
            let b = ln_rn.min(ln_big);
            if b > a {
                len += b - a;
            }
        }
        Ok(len / ln_big)
    }
}

#[inline]
fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[inline]
fn smoothstep_slope(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        6.0 * u * (1.0 - u)
    }
}

/// Blend profile on one annulus: two log-smoothstep ramps, 0 → t_mid on
/// [0, split] and t_mid → 1 on [split, 1] (u = normalized log radius).
/// t is flat at the split, which is placed on the circle through the
/// critical point of the frozen map z^k ((1 − t_mid) + t_mid z / r_{k+1}).
/// A single ramp folds there (negative Jacobian) for every ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendProfile {
    pub split: f64,
    pub t_mid: f64,
    /// Max linear dilatation of the blend over a 400 × 721 log-polar grid,
    /// from the closed-form complex derivatives; infinite when it folds.
    pub dilatation: f64,
}

impl BlendProfile {
    fn with_params(k: usize, epsilon: f64, split: f64, t_mid: f64) -> Self {
        let mut p = Self { split, t_mid, dilatation: 0.0 };
        p.dilatation = p.max_dilatation(k, epsilon, 96, 181);
        p
    }

    fn with_split(k: usize, epsilon: f64, split: f64) -> Self {
        let kf = k as f64;
        let rho = epsilon.powf(1.0 - split);
        Self::with_params(k, epsilon, split, kf / (kf + (kf + 1.0) * rho))
    }

    /// Split chosen to minimize the grid dilatation (coarse scan, then a
    /// finer one around the best coarse split). When every candidate folds
    /// (thin annuli), falls back to the symmetric profile, whose steepest
    /// slope matches a single smoothstep.
    fn tuned(k: usize, epsilon: f64) -> Self {
        let scan = |from: f64, step: f64, count: usize, best: Option<Self>| {
            (0..count).map(|i| Self::with_split(k, epsilon, from + step * i as f64)).fold(best, |b, c| match b {
                Some(b) if b.dilatation <= c.dilatation => Some(b),
                _ => Some(c),
            })
        };
        let coarse = scan(0.30, 0.02, 34, None).expect("non-empty scan");
        let fine = scan((coarse.split - 0.02).max(0.30), 0.0025, 17, Some(coarse)).expect("non-empty scan");
        let mut best = if fine.dilatation.is_finite() { fine } else { Self::with_params(k, epsilon, 0.5, 0.5) };
        best.dilatation = best.max_dilatation(k, epsilon, 400, 721);
        best
    }

    pub fn t(&self, u: f64) -> f64 {
        if u < self.split {
            self.t_mid * smoothstep(u / self.split)
        } else {
            self.t_mid + (1.0 - self.t_mid) * smoothstep((u - self.split) / (1.0 - self.split))
        }
    }

    /// dt/du
    pub fn slope(&self, u: f64) -> f64 {
        if u < self.split {
            self.t_mid * smoothstep_slope(u / self.split) / self.split
        } else {
            (1.0 - self.t_mid) * smoothstep_slope((u - self.split) / (1.0 - self.split)) / (1.0 - self.split)
        }
    }

    /// Linear dilatation of z ↦ z^k ((1 − t) + t z) at z = ρ e^{iθ}, with the
    /// outer blend radius scaled to 1 (the dilatation is scale invariant).
    pub fn dilatation_at(&self, k: usize, epsilon: f64, u: f64, theta: f64) -> f64 {
        let (rho, t, ts) = self.radial(epsilon, u);
        dilatation_kernel(k as f64, rho, t, ts, theta.cos(), theta.sin())
    }

    /// (ρ, t, dt/d ln r) at normalized log radius u.
    fn radial(&self, epsilon: f64, u: f64) -> (f64, f64, f64) {
        (epsilon.powf(1.0 - u), self.t(u), self.slope(u) / -epsilon.ln())
    }

    fn max_dilatation(&self, k: usize, epsilon: f64, nu: usize, ntheta: usize) -> f64 {
        let trig: Vec<(f64, f64)> = (0..ntheta)
            .map(|j| {
                let th = std::f64::consts::PI * j as f64 / (ntheta - 1) as f64;
                (th.cos(), th.sin())
            })
            .collect();
        let mut worst = 0.0_f64;
        for i in 1..=nu {
            let (rho, t, ts) = self.radial(epsilon, i as f64 / (nu + 1) as f64);
            for &(c, s) in &trig {
                worst = worst.max(dilatation_kernel(k as f64, rho, t, ts, c, s));
            }
        }
        worst
    }
}

fn dilatation_kernel(k: f64, rho: f64, t: f64, ts: f64, c: f64, s: f64) -> f64 {
    let (x, y) = (rho * c, rho * s);
    // w = (1 − t) + t z, w_z = t + t_s (z − 1) z̄ / (2ρ²), w_z̄ = t_s (z − 1) z / (2ρ²)
    let (wr, wi) = (1.0 - t + t * x, t * y);
    let q = ts / (2.0 * rho * rho);
    let (zm1r, zm1i) = (x - 1.0, y);
    let (wzr, wzi) = (t + q * (zm1r * x + zm1i * y), q * (zm1i * x - zm1r * y));
    let (wbr, wbi) = (q * (zm1r * x - zm1i * y), q * (zm1r * y + zm1i * x));
    // D_z / z^k = k w / z + w_z
    let (ar, ai) = (k * (wr * c + wi * s) / rho + wzr, k * (wi * c - wr * s) / rho + wzi);
    let a = ar.hypot(ai);
    let b = wbr.hypot(wbi);
    if a > b {
        (a + b) / (a - b)
    } else {
        f64::INFINITY
    }
}

/// Which formula of D̃ applies at a radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// z ↦ a_k z^k
    Good { k: usize },
    /// a_k z^k ((1 − t) + t z / r_{k+1}) with blend parameter t
    Blend { k: usize, t: f64 },
}

/// Planar transcendental-type model: degree k on [r_k, ε r_{k+1}],
/// degree 1 below r_1, and a log-smoothstep blend on (ε r_{k+1}, r_{k+1}).
#[derive(Clone, Debug)]
pub struct AnnulusGluing {
    schedule: GrowthSchedule,
    /// ln a_k, k = 1..=N (a_1 = 1, a_{k+1} = a_k / r_{k+1})
    ln_a: Vec<f64>,
    /// profiles for k = 1..N−1
    profiles: Vec<BlendProfile>,
}

impl AnnulusGluing {
    pub fn new(schedule: GrowthSchedule) -> Result<Self> {
        if schedule.r.is_empty() {
            return Err(Error::Domain("annulus gluing needs an explicit radius schedule".into()));
        }
        let mut ln_a = vec![0.0];
        for k in 1..schedule.r.len() {
            let prev = ln_a[k - 1];
            ln_a.push(prev - schedule.ln_r[k]);
        }
        let profiles = (1..schedule.r.len()).map(|k| BlendProfile::tuned(k, schedule.epsilon)).collect();
        Ok(Self { schedule, ln_a, profiles })
    }

    pub fn schedule(&self) -> &GrowthSchedule {
        &self.schedule
    }

    /// Blend profile of annulus k (1 ≤ k < N).
    pub fn profile(&self, k: usize) -> &BlendProfile {
        &self.profiles[k - 1]
    }

    /// a_k for k = 1..=N.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.ln_a[k - 1].exp()
    }

    pub fn region(&self, r: f64) -> Region {
        let s = &self.schedule;
        let n = s.r.len();
        // k = number of nodes ≤ r, at least 1
        let k = s.r.iter().take_while(|&&v| v <= r).count().max(1);
        if k < n && r > s.epsilon * s.r[k] {
            let lo = s.ln_r[k] + s.epsilon.ln();
            let u = (r.ln() - lo) / (-s.epsilon.ln());
            return Region::Blend { k, t: self.profiles[k - 1].t(u) };
        }
        Region::Good { k }
    }

    /// Circle degree of D̃ on S(r) (r not a zero radius).
    pub fn degree_at(&self, r: f64) -> usize {
        match self.region(r) {
            Region::Good { k } => k,
            Region::Blend { k, .. } => {
                if r > self.blend_zero_radius(k) {
                    k + 1
                } else {
                    k
                }
            }
        }
    }

    /// D̃(z), evaluated in polar form with logarithmic moduli.
    pub fn eval(&self, z: &PointN) -> PointN {
        let (x, y) = (z[0], z[1]);
        let r = x.hypot(y);
        if r == 0.0 {
            return PointN::raw(vec![0.0, 0.0]);
        }
        let theta = y.atan2(x);
        let (k, blend) = match self.region(r) {
            Region::Good { k } => (k, None),
            Region::Blend { k, t } => (k, Some(t)),
        };
        let ln_mod = self.ln_a[k - 1] + k as f64 * r.ln();
        let ang = k as f64 * theta;
        let (mut re, mut im) = (ang.cos(), ang.sin());
        let scale = ln_mod.exp();
        if let Some(t) = blend {
            let rk1 = self.schedule.r[k];
            let (cr, ci) = ((1.0 - t) + t * x / rk1, t * y / rk1);
            let (a, b) = (re * cr - im * ci, re * ci + im * cr);
            re = a;
            im = b;
        }
        PointN::raw(vec![scale * re, scale * im])
    }

    /// Closed-form M(r, D̃): attained on the positive real axis in blends.
    pub fn max_modulus(&self, r: f64) -> f64 {
        self.log_max_modulus(r).exp()
    }

    pub fn log_max_modulus(&self, r: f64) -> f64 {
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.region(r) {
            Region::Good { k } => self.ln_a[k - 1] + k as f64 * r.ln(),
            Region::Blend { k, t } => {
                self.ln_a[k - 1] + k as f64 * r.ln() + ((1.0 - t) + t * r / self.schedule.r[k]).ln()
            }
        }
    }

    /// Radius ρ of the single zero of the blend factor on (ε r_{k+1}, r_{k+1}),
    /// solving (1 − t(ρ)) r_{k+1} = t(ρ) ρ; the zero sits at z = −ρ.
    pub fn blend_zero_radius(&self, k: usize) -> f64 {
        let s = &self.schedule;
        let rk1 = s.r[k];
        let t_of = |rho: f64| match self.region(rho) {
            Region::Blend { t, .. } => t,
            Region::Good { .. } => {
                if rho >= rk1 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let g = |rho: f64| {
            let t = t_of(rho);
            t * rho - (1.0 - t) * rk1
        };
        let (mut lo, mut hi) = (s.epsilon * rk1, rk1);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Zeros of D̃ other than the origin, one per blend annulus.
    pub fn blend_zeros(&self) -> Vec<PointN> {
        (1..self.schedule.r.len()).map(|k| PointN::raw(vec![-self.blend_zero_radius(k), 0.0])).collect()
    }

    /// Good annuli [r_k, ε r_{k+1}] (the first one extended to 0, the last
    /// one unbounded).
    pub fn good_annuli(&self) -> Vec<(usize, f64, f64)> {
        let s = &self.schedule;
        (0..s.r.len())
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { s.r[i] };
                let hi = s.r.get(i + 1).map_or(f64::INFINITY, |v| s.epsilon * v);
                (i + 1, lo, hi)
            })
            .collect()
    }

    /// Blend annuli (ε r_{k+1}, r_{k+1}) for k = 1..N−1.
    pub fn blend_annuli(&self) -> Vec<(usize, f64, f64)> {
        let s = &self.schedule;
        (1..s.r.len()).map(|k| (k, s.epsilon * s.r[k], s.r[k])).collect()
    }
}

impl MapExpr for AnnulusGluing {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, x: &PointN) -> PointN {
        AnnulusGluing::eval(self, x)
    }
    fn meta(&self) -> MapMeta {
        MapMeta {
            name: "annulus_gluing".into(),
            map_type: MapType::Transcendental,
            degree: None,
            distortion_bound: None,
        }
    }
    fn kink_gap(&self, x: &PointN) -> Option<f64> {
        let mut g = x.norm();
        for z in self.blend_zeros() {
            g = g.min(z.distance(x));
        }
        Some(g)
    }
}

/// h(x) = D̃(h₁(x)). Planar only.
pub fn transcendental_composite(gluing: &AnnulusGluing, shrink: &ShrinkMap, x: &PointN) -> Result<PointN> {
    if shrink.dim() != 2 || x.dim() != 2 {
        return Err(unsupported_dim(shrink.dim().max(x.dim())));
    }
    Ok(gluing.eval(&shrink.h1(x)))
}

/// D̃ ∘ h₁ as a composable map.
pub fn transcendental_map(gluing: AnnulusGluing, shrink: ShrinkMap) -> Result<DynMap> {
    if shrink.dim() != 2 {
        return Err(unsupported_dim(shrink.dim()));
    }
    Ok(Arc::new(Compose::new(Arc::new(gluing), Arc::new(H1(shrink)))?))
}

pub(crate) fn unsupported_dim(n: usize) -> Error {
    Error::Unsupported(format!(
        "transcendental composites are implemented for n = 2 only (planar annulus-gluing model in place of the \
         interior construction); got n = {n}"
    ))
}

/// Argument increment of D̃ around S(r), in turns.
pub fn gluing_winding(g: &AnnulusGluing, r: f64, samples: usize) -> f64 {
    let mut total = 0.0;
    let val = |i: usize| {
        let th = TAU * i as f64 / samples as f64;
        let w = g.eval(&PointN::raw(vec![r * th.cos(), r * th.sin()]));
        w[1].atan2(w[0])
    };
    let mut prev = val(0);
    for i in 1..=samples {
        let cur = val(i % samples);
        let mut d = cur - prev;
        while d > std::f64::consts::PI {
            d -= TAU;
        }
        while d < -std::f64::consts::PI {
            d += TAU;
        }
        total += d;
        prev = cur;
    }
    total / TAU
}
