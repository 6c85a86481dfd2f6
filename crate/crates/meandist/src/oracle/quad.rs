//! Deterministic adaptive quadrature: Gauss-Kronrod on intervals and a
//! collapsed Gauss rule on triangles, both refined globally by largest error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Estimate plus absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = hw * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * hw, ((kron - gauss) * hw).abs())
}

struct Seg {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) on `[a, b]`.
pub fn quad1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Seg { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    for _ in 0..20_000 {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: err });
        }
        let s = heap.pop().expect("heap is never empty");
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = gk15(&f, s.a, m);
        let (v2, e2) = gk15(&f, m, s.b);
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
        heap.push(Seg { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Seg { a: m, b: s.b, value: v2, error: e2 });
    }
    // Recompute from the leaves to shed accumulated rounding in the running sums.
    let value = crate::sum::kahan(heap.iter().map(|s| s.value));
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if error <= abs_tol.max(rel_tol * value.abs()) {
        Ok(QuadResult { value, error })
    } else {
        Err(Error::ToleranceNotMet { estimate: value, error })
    }
}

/// A triangle in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle(pub [f64; 2], pub [f64; 2], pub [f64; 2]);

impl Triangle {
    pub fn area(&self) -> f64 {
        let Triangle(a, b, c) = *self;
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
    }

    fn split(&self) -> [Triangle; 4] {
        let Triangle(a, b, c) = *self;
        let mid = |u: [f64; 2], v: [f64; 2]| [0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1])];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        [Triangle(a, ab, ca), Triangle(ab, b, bc), Triangle(ca, bc, c), Triangle(ab, bc, ca)]
    }
}

/// Collapsed (Duffy) tensor Gauss rule on triangles.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    nodes: Vec<(f64, f64, f64)>,
}

impl TriangleRule {
    /// Tensor rule with `n` Gauss points per direction, exact for polynomials
    /// of total degree `2n - 2`.
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut nodes = Vec::with_capacity(n * n);
        for (xu, wu) in x.iter().zip(&w) {
            let u = 0.5 * (xu + 1.0);
            for (xv, wv) in x.iter().zip(&w) {
                let v = 0.5 * (xv + 1.0);
                nodes.push((u, v, 0.25 * wu * wv * u));
            }
        }
        Self { nodes }
    }

    pub fn apply<F: Fn(f64, f64) -> f64>(&self, f: &F, t: &Triangle) -> f64 {
        let Triangle(a, b, c) = *t;
        let ba = [b[0] - a[0], b[1] - a[1]];
        let cb = [c[0] - b[0], c[1] - b[1]];
        let jac = (ba[0] * cb[1] - ba[1] * cb[0]).abs();
        let mut acc = 0.0;
        for &(u, v, w) in &self.nodes {
            let x = a[0] + u * ba[0] + u * v * cb[0];
            let y = a[1] + u * ba[1] + u * v * cb[1];
            acc += w * f(x, y);
        }
        acc * jac
    }
}

struct Cell {
    tri: Triangle,
    fine: [f64; 4],
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Options for [`quad2d_with`].
#[derive(Debug, Clone, Copy)]
pub struct Quad2dOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub order: usize,
    pub max_splits: usize,
}

impl Default for Quad2dOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-13, order: 8, max_splits: 100_000 }
    }
}

/// Adaptive integral of `f` over a union of triangles to absolute tolerance.
pub fn quad2d<F: Fn(f64, f64) -> f64>(f: F, region: &[Triangle], abs_tol: f64) -> Result<QuadResult> {
    quad2d_with(f, region, Quad2dOptions { abs_tol, rel_tol: 0.0, ..Default::default() })
}

pub fn quad2d_with<F: Fn(f64, f64) -> f64>(f: F, region: &[Triangle], opts: Quad2dOptions) -> Result<QuadResult> {
    let rule = TriangleRule::new(opts.order);
    let make = |tri: Triangle, coarse: f64| {
        let kids = tri.split();
        let fine = kids.map(|k| rule.apply(&f, &k));
        let error = (fine.iter().sum::<f64>() - coarse).abs();
        Cell { tri, fine, error }
    };
    let mut heap = BinaryHeap::new();
    for t in region.iter().filter(|t| t.area() > 0.0) {
        heap.push(make(*t, rule.apply(&f, t)));
    }
    let totals = |heap: &BinaryHeap<Cell>| {
        let v = crate::sum::kahan(heap.iter().flat_map(|c| c.fine));
        let e: f64 = heap.iter().map(|c| c.error).sum();
        (v, e)
    };
    let (mut value, mut error) = totals(&heap);
    let mut since_resync = 0;
    for _ in 0..opts.max_splits {
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            break;
        }
        let Some(cell) = heap.pop() else { break };
        value -= cell.fine.iter().sum::<f64>();
        error -= cell.error;
        for (kid, coarse) in cell.tri.split().into_iter().zip(cell.fine) {
            let c = make(kid, coarse);
            value += c.fine.iter().sum::<f64>();
            error += c.error;
            heap.push(c);
        }
        since_resync += 1;
        if since_resync == 4096 {
            (value, error) = totals(&heap);
            since_resync = 0;
        }
    }
    let (value, error) = totals(&heap);
    if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
        Ok(QuadResult { value, error })
    } else {
        Err(Error::ToleranceNotMet { estimate: value, error })
    }
}

/// Fan triangulation of a convex polygon from its first vertex.
pub fn fan(poly: &[[f64; 2]]) -> Vec<Triangle> {
    (1..poly.len().saturating_sub(1)).map(|i| Triangle(poly[0], poly[i], poly[i + 1])).collect()
}
