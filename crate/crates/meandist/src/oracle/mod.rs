//! Brute-force backends: adaptive quadrature and Monte Carlo.

pub mod quad;

pub use quad::{quad1d, quad2d, QuadResult, Triangle};
pub mod mc;
pub mod sample;

pub use mc::{estimate_moment, estimate_moments, Exec, McEstimate};
pub use sample::{sample_uniform, Sampler};

use crate::geom::{Polytope, P3};

/// Mean and `E|X|²` of the uniform distribution on `p`.
fn first_two_moments(p: &Polytope) -> (P3, f64) {
    let v = &p.vertices;
    let simplex = |pts: &[P3]| {
        let s: P3 = pts.iter().sum();
        let sq: f64 = pts.iter().map(|x| x.norm_squared()).sum();
        let k = pts.len() as f64;
        (s / k, (sq + s.norm_squared()) / (k * (k + 1.0)))
    };
    match p.dim_intrinsic {
        0 => (v[0], v[0].norm_squared()),
        1 => simplex(&v[..2]),
        _ => {
            let mut parts: Vec<(f64, P3, f64)> = Vec::new();
            if p.dim_intrinsic == 2 {
                let n = p.face_normal(0);
                for w in v[1..].windows(2) {
                    let area = 0.5 * (w[0] - v[0]).cross(&(w[1] - v[0])).dot(&n);
                    let (m, s) = simplex(&[v[0], w[0], w[1]]);
                    parts.push((area, m, s));
                }
            } else {
                for f in &p.faces {
                    for w in f[1..].windows(2) {
                        let t = [v[0], v[f[0]], v[w[0]], v[w[1]]];
                        let vol = (t[1] - t[0]).dot(&(t[2] - t[0]).cross(&(t[3] - t[0]))) / 6.0;
                        let (m, s) = simplex(&t);
                        parts.push((vol, m, s));
                    }
                }
            }
            let total: f64 = parts.iter().map(|x| x.0).sum();
            let m = parts.iter().map(|x| x.1 * x.0).sum::<P3>() / total;
            let s = parts.iter().map(|x| x.2 * x.0).sum::<f64>() / total;
            (m, s)
        }
    }
}

/// Exact `E|X − Y|²` by polynomial integration.
pub fn second_moment(a: &Polytope, b: &Polytope) -> f64 {
    let (ma, sa) = first_two_moments(a);
    let (mb, sb) = first_two_moments(b);
    sa + sb - 2.0 * ma.dot(&mb)
}
