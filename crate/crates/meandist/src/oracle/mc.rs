//! Monte Carlo moment estimation over independent random streams.

use serde::{Deserialize, Serialize};

use super::sample::{stream_rng, Sampler};
use crate::auxint::pow_half;
use crate::geom::{Polytope, P3};
use crate::Result;

/// Samples per stream.
pub const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Whether `value` is within `k` standard errors.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.stderr
    }

    /// Deviation in standard errors.
    pub fn z(&self, value: f64) -> f64 {
        (self.mean - value) / self.stderr
    }
}

/// How to spread streams over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

fn map_streams<T, F>(exec: Exec, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Generic driver: `f(rng)` yields one observation per requested exponent.
fn run<F>(exec: Exec, k: usize, n_samples: u64, seed: u64, f: F) -> Vec<McEstimate>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [f64]) + Sync + Send,
{
    let streams = n_samples.div_ceil(CHUNK);
    let parts = map_streams(exec, streams, |s| {
        let mut rng = stream_rng(seed, s);
        let count = CHUNK.min(n_samples - s * CHUNK);
        let mut acc = vec![Moments::default(); k];
        let mut obs = vec![0.0; k];
        for _ in 0..count {
            f(&mut rng, &mut obs);
            for (a, x) in acc.iter_mut().zip(&obs) {
                a.push(*x);
            }
        }
        acc
    });
    let mut total = vec![Moments::default(); k];
    for part in parts {
        for (t, m) in total.iter_mut().zip(part) {
            *t = t.merge(m);
        }
    }
    total
        .into_iter()
        .map(|m| {
            let var = if m.n > 1.0 { m.m2 / (m.n - 1.0) } else { 0.0 };
            McEstimate { mean: m.mean, stderr: (var / m.n).sqrt(), n_samples, seed }
        })
        .collect()
}

/// `E|X − Y|^p` for every `p` in `ps`, from one shared set of point pairs.
pub fn estimate_moments_with(exec: Exec, a: &Sampler, b: &Sampler, ps: &[i32], n_samples: u64, seed: u64) -> Vec<McEstimate> {
    run(exec, ps.len(), n_samples, seed, |rng, out| {
        let x = a.sample(rng);
        let y = b.sample(rng);
        let d2 = (x - y).norm_squared();
        for (o, &p) in out.iter_mut().zip(ps) {
            *o = pow_half(d2, p);
        }
    })
}

pub fn estimate_moments(a: &Sampler, b: &Sampler, ps: &[i32], n_samples: u64, seed: u64) -> Vec<McEstimate> {
    estimate_moments_with(Exec::default(), a, b, ps, n_samples, seed)
}

/// `E|X − Y|^p` for uniform `X ∈ A`, `Y ∈ B`.
pub fn estimate_moment(a: &Polytope, b: &Polytope, p: i32, n_samples: u64, seed: u64) -> Result<McEstimate> {
    let sa = Sampler::new(a)?;
    let sb = Sampler::new(b)?;
    Ok(estimate_moments(&sa, &sb, &[p], n_samples, seed)[0])
}

/// `∫ sec^m φ dφ` from 0 to `phi`, `m ≥ 1`.
fn sec_power_integral(m: i32, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let t = s / c;
    let sec = 1.0 / c;
    let mut acc = if m % 2 == 1 { t.asinh() } else { t };
    let mut k = if m % 2 == 1 { 3 } else { 4 };
    while k <= m {
        let kf = k as f64;
        acc = sec.powi(k - 2) * t / (kf - 1.0) + (kf - 2.0) / (kf - 1.0) * acc;
        k += 2;
    }
    acc
}

/// `(1/area) ∫_B |x − y|^p dy` for `x` in the plane of polygon `B`.
pub fn planar_point_average(b: &[[f64; 2]], area: f64, x: [f64; 2], p: i32) -> f64 {
    let n = b.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a0 = [b[i][0] - x[0], b[i][1] - x[1]];
        let a1 = [b[(i + 1) % n][0] - x[0], b[(i + 1) % n][1] - x[1]];
        let cr = a0[0] * a1[1] - a0[1] * a1[0];
        let e = [a1[0] - a0[0], a1[1] - a0[1]];
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        let d = cr.abs() / len;
        if d == 0.0 {
            continue;
        }
        let ta = (a0[0] * e[0] + a0[1] * e[1]) / len;
        let tb = (a1[0] * e[0] + a1[1] * e[1]) / len;
        let m = p + 2;
        let inner = sec_power_integral(m, (tb / d).atan()) - sec_power_integral(m, (ta / d).atan());
        acc += cr.signum() * d.powi(m) / m as f64 * inner;
    }
    acc / area
}

/// Planar self-moment of a polygon with the inner integral done exactly
/// (conditional Monte Carlo). Unlike plain sampling it has finite variance
/// at `p = −1`, where `|X − Y|^{-2}` is not integrable in the plane.
pub fn estimate_planar_self_moment(poly: &Polytope, p: i32, n_samples: u64, seed: u64) -> Result<McEstimate> {
    let frame = poly.frame();
    let mut pts: Vec<[f64; 2]> = poly.vertices.iter().map(|v| frame.to2(v)).collect();
    if crate::irreducible::polygon_area2(&pts) < 0.0 {
        pts.reverse();
    }
    let area = crate::irreducible::polygon_area2(&pts);
    let sampler = Sampler::new(poly)?;
    Ok(run(Exec::default(), 1, n_samples, seed, |rng, out| {
        let x: P3 = sampler.sample(rng);
        out[0] = planar_point_average(&pts, area, frame.to2(&x), p);
    })[0])
}
