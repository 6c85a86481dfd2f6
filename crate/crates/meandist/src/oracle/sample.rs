//! Uniform samplers for flat polytopes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::geom::{Polytope, P3};
use crate::{Error, Result};

/// Generator for stream `stream` of `seed`. Streams are independent, so work
/// can be split by stream index without depending on scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Point(P3),
    Segment(P3, P3),
    Triangles { tris: Vec<[P3; 3]>, cum: Vec<f64> },
    Tetrahedra { tets: Vec<[P3; 4]>, cum: Vec<f64> },
    /// Nonconvex solid: bounding-box rejection with a ray-parity test.
    Rejection { lo: P3, hi: P3, tris: Vec<[P3; 3]> },
    Ball { center: P3, radius: f64 },
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect()
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c < u).min(cum.len() - 1)
}

fn face_triangles(p: &Polytope) -> Vec<[P3; 3]> {
    let mut out = Vec::new();
    for f in &p.faces {
        for w in f[1..].windows(2) {
            out.push([p.vertices[f[0]], p.vertices[w[0]], p.vertices[w[1]]]);
        }
    }
    out
}

impl Sampler {
    pub fn new(p: &Polytope) -> Result<Self> {
        let diam = p.diameter();
        match p.dim_intrinsic {
            0 => Ok(Sampler::Point(p.vertices[0])),
            1 => Ok(Sampler::Segment(p.vertices[0], p.vertices[1])),
            2 => {
                let c = p.vertex_centroid();
                let n = p.face_normal(0);
                let k = p.vertices.len();
                let area = |t: &[P3; 3]| 0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).dot(&n);
                let mut tris: Vec<[P3; 3]> = (0..k).map(|i| [c, p.vertices[i], p.vertices[(i + 1) % k]]).collect();
                if tris.iter().any(|t| area(t) <= 0.0) {
                    tris = ear_clip(&p.vertices, &n).ok_or_else(|| Error::Input("polygon is not simple".into()))?;
                }
                let areas: Vec<f64> = tris.iter().map(area).collect();
                if areas.iter().sum::<f64>() <= 1e-14 * diam * diam {
                    return Err(Error::ZeroMeasure);
                }
                Ok(Sampler::Triangles { cum: cumulative(&areas), tris })
            }
            _ => {
                let c = p.vertex_centroid();
                let tets: Vec<[P3; 4]> = face_triangles(p).into_iter().map(|t| [c, t[0], t[1], t[2]]).collect();
                let vols: Vec<f64> = tets.iter().map(|t| (t[1] - t[0]).dot(&(t[2] - t[0]).cross(&(t[3] - t[0]))) / 6.0).collect();
                if vols.iter().sum::<f64>() <= 1e-14 * diam.powi(3) {
                    return Err(Error::ZeroMeasure);
                }
                if vols.iter().all(|&v| v > 0.0) {
                    Ok(Sampler::Tetrahedra { cum: cumulative(&vols), tets })
                } else {
                    let mut lo = p.vertices[0];
                    let mut hi = p.vertices[0];
                    for v in &p.vertices {
                        lo = lo.inf(v);
                        hi = hi.sup(v);
                    }
                    Ok(Sampler::Rejection { lo, hi, tris: face_triangles(p) })
                }
            }
        }
    }

    pub fn ball(center: P3, radius: f64) -> Self {
        Sampler::Ball { center, radius }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> P3 {
        match self {
            Sampler::Point(p) => *p,
            Sampler::Segment(a, b) => a + (b - a) * rng.random::<f64>(),
            Sampler::Triangles { tris, cum } => {
                let t = &tris[pick(cum, rng.random())];
                let e: [f64; 3] = std::array::from_fn(|_| Exp1.sample(rng));
                let s = e[0] + e[1] + e[2];
                (t[0] * e[0] + t[1] * e[1] + t[2] * e[2]) / s
            }
            Sampler::Tetrahedra { tets, cum } => {
                let t = &tets[pick(cum, rng.random())];
                let e: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
                let s = e[0] + e[1] + e[2] + e[3];
                (t[0] * e[0] + t[1] * e[1] + t[2] * e[2] + t[3] * e[3]) / s
            }
            Sampler::Rejection { lo, hi, tris } => loop {
                let x = P3::new(
                    lo.x + (hi.x - lo.x) * rng.random::<f64>(),
                    lo.y + (hi.y - lo.y) * rng.random::<f64>(),
                    lo.z + (hi.z - lo.z) * rng.random::<f64>(),
                );
                if point_in_solid(&x, tris) {
                    return x;
                }
            },
            Sampler::Ball { center, radius } => {
                let g: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
                let dir = P3::new(g[0], g[1], g[2]).normalize();
                let r = radius * rng.random::<f64>().cbrt();
                center + dir * r
            }
        }
    }
}

/// Ear-clipping triangulation of a simple polygon wound counterclockwise about `n`.
fn ear_clip(vs: &[P3], n: &P3) -> Option<Vec<[P3; 3]>> {
    let cross = |a: &P3, b: &P3, c: &P3| (b - a).cross(&(c - a)).dot(n);
    let mut idx: Vec<usize> = (0..vs.len()).collect();
    let mut out = Vec::with_capacity(vs.len().saturating_sub(2));
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (&vs[idx[(i + m - 1) % m]], &vs[idx[i]], &vs[idx[(i + 1) % m]]);
            cross(a, b, c) > 0.0
                && idx.iter().all(|&j| {
                    let x = &vs[j];
                    std::ptr::eq(x, a) || std::ptr::eq(x, b) || std::ptr::eq(x, c) || cross(a, b, x) < 0.0 || cross(b, c, x) < 0.0 || cross(c, a, x) < 0.0
                })
        })?;
        out.push([vs[idx[(ear + m - 1) % m]], vs[idx[ear]], vs[idx[(ear + 1) % m]]]);
        idx.remove(ear);
    }
    out.push([vs[idx[0]], vs[idx[1]], vs[idx[2]]]);
    Some(out)
}

/// Ray-parity test against a closed triangulated surface.
pub fn point_in_solid(x: &P3, tris: &[[P3; 3]]) -> bool {
    // A fixed direction with irrational-looking components avoids edge hits in practice.
    let d = P3::new(0.5773502691896258, 0.6172133998483676, 0.5345224838248488);
    let mut crossings = 0;
    for t in tris {
        let e1 = t[1] - t[0];
        let e2 = t[2] - t[0];
        let pv = d.cross(&e2);
        let det = e1.dot(&pv);
        if det.abs() < 1e-300 {
            continue;
        }
        let inv = 1.0 / det;
        let s = x - t[0];
        let u = s.dot(&pv) * inv;
        if !(0.0..=1.0).contains(&u) {
            continue;
        }
        let qv = s.cross(&e1);
        let v = d.dot(&qv) * inv;
        if v < 0.0 || u + v > 1.0 {
            continue;
        }
        if e2.dot(&qv) * inv > 0.0 {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// `count` points from stream 0 of `seed`.
pub fn sample_uniform(p: &Polytope, seed: u64, count: usize) -> Result<Vec<P3>> {
    let s = Sampler::new(p)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..count).map(|_| s.sample(&mut rng)).collect())
}
