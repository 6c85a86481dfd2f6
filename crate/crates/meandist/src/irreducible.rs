//! Moments for the configurations where no scaling point is shared:
//! polygon–point, skew segments, and parallel face/face or face/edge pairs.

use serde::{Deserialize, Serialize};

use crate::auxint::{self, Monomial};
use crate::geom::{self, AffineRelation, PlaneFrame, Polytope, P3, REL_TOL};
use crate::oracle::quad::{self, Quad2dOptions, QuadResult, Triangle};
use crate::sum::Sum;
use crate::{Error, Result};

/// `sign · h^{2+p} Σ a_ij h^{i+j} I^(p)_ij(q, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPiece {
    pub sign: f64,
    pub q: f64,
    pub gamma: f64,
    /// `a_00, a_10, a_01, a_20, a_11, a_02`.
    pub coeffs: [f64; 6],
    pub h: f64,
}

impl FundamentalPiece {
    pub fn new(sign: f64, q: f64, gamma: f64, coeffs: [f64; 6], h: f64) -> Self {
        Self { sign, q, gamma, coeffs, h }
    }

    /// A pure `I00` term.
    pub fn i00(coef: f64, q: f64, gamma: f64, h: f64) -> Self {
        Self::new(1.0, q, gamma, [coef, 0.0, 0.0, 0.0, 0.0, 0.0], h)
    }

    pub fn value(&self, p: i32) -> f64 {
        let mut acc = Sum::default();
        for (mono, &a) in Monomial::ALL.iter().zip(&self.coeffs) {
            if a != 0.0 {
                acc.add(a * self.h.powi(mono.degree()) * auxint::i_value(p, *mono, self.q, self.gamma));
            }
        }
        self.sign * self.h.powi(2 + p) * acc.value()
    }
}

/// A hand-derived expansion of an overlap (or point–polygon) moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapDiagram {
    pub fold: u32,
    pub vol_a: f64,
    /// 1 for a point target.
    pub vol_b: f64,
    pub pieces: Vec<FundamentalPiece>,
    /// Length scale `s` of the whole configuration; the value picks up `s^p`.
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit")]
    pub scale: f64,
    pub meta: String,
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit(s: &f64) -> bool {
    *s == 1.0
}

/// `fold / (volA volB) × Σ pieces`.
pub fn overlap_moment_exact(diagram: &OverlapDiagram, p: i32) -> f64 {
    if p == 0 {
        return 1.0;
    }
    let mut acc = Sum::default();
    for piece in &diagram.pieces {
        acc.add(piece.value(p));
    }
    diagram.scale.powi(p) * diagram.fold as f64 / (diagram.vol_a * diagram.vol_b) * acc.value()
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Signed shoelace area.
pub fn polygon_area2(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut acc = Sum::default();
    for i in 0..n {
        acc.add(cross2(poly[i], poly[(i + 1) % n]));
    }
    0.5 * acc.value()
}

/// `∫_T (h² + |k|²)^{p/2} dk` over the oriented triangle `(0, a, b)`.
fn origin_triangle(a: [f64; 2], b: [f64; 2], h: f64, p: i32, tol: f64) -> f64 {
    let e = sub2(b, a);
    let len = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cr = cross2(a, b);
    let d = cr.abs() / len;
    if d <= tol {
        return 0.0;
    }
    let u = [e[0] / len, e[1] / len];
    let ta = a[0] * u[0] + a[1] * u[1];
    let tb = b[0] * u[0] + b[1] * u[1];
    let q = d / h;
    let g = |t: f64| auxint::i_value(p, Monomial::I00, q, (t / d).atan());
    cr.signum() * h.powi(2 + p) * (g(tb) - g(ta))
}

/// `L^(p)` between a polygon and a point off its plane.
pub fn point_polygon_moment(a: &Polytope, b: P3, p: i32) -> Result<f64> {
    if a.dim_intrinsic != 2 {
        return Err(Error::Input("point_polygon_moment needs a polygon".into()));
    }
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    let diam = a.diameter();
    let (foot, h) = geom::project_point(a, b);
    if h <= REL_TOL * diam {
        return Err(Error::CoplanarPoint);
    }
    let vol = a.measure()?;
    if p == 0 {
        return Ok(1.0);
    }
    let frame = PlaneFrame { origin: foot, ..a.frame() };
    let pts: Vec<[f64; 2]> = a.vertices.iter().map(|v| frame.to2(v)).collect();
    let orient = polygon_area2(&pts).signum();
    let mut acc = Sum::default();
    for i in 0..pts.len() {
        acc.add(origin_triangle(pts[i], pts[(i + 1) % pts.len()], h, p, 1e-14 * diam));
    }
    Ok(orient * acc.value() / vol)
}

/// `L^(p)` between two skew segments via the parallelogram `A − B`.
pub fn skew_segments_moment(a: &Polytope, b: &Polytope, p: i32) -> Result<f64> {
    if a.dim_intrinsic != 1 || b.dim_intrinsic != 1 || geom::affine_relation(a, b) != AffineRelation::Skew {
        return Err(Error::NotSkew);
    }
    let (a0, a1) = (a.vertices[0], a.vertices[1]);
    let (b0, b1) = (b.vertices[0], b.vertices[1]);
    let par = Polytope::polygon(vec![a0 - b0, a1 - b0, a1 - b1, a0 - b1])?;
    point_polygon_moment(&par, P3::zeros(), p)
}

/// `(1/len) ∫_{t0}^{t1} (d² + t²)^{p/2} dt`: a point at distance `d` from a
/// segment's line whose foot sits at parameter 0.
pub fn point_line_moment(d: f64, t0: f64, t1: f64, p: i32) -> f64 {
    let len = t1 - t0;
    if p == 0 {
        return 1.0;
    }
    if d > 1e-14 * len.abs() {
        return d.powi(p + 1) * (auxint::k(p - 2, t1 / d) - auxint::k(p - 2, t0 / d)) / len;
    }
    // Collinear: ∫|t|^p.
    let anti = |t: f64| -> f64 {
        if p == -1 {
            t.signum() * t.abs().ln()
        } else {
            t.signum() * t.abs().powi(p + 1) / (p + 1) as f64
        }
    };
    if p == -1 && t0 < 0.0 && t1 > 0.0 {
        return f64::INFINITY;
    }
    if p == -1 {
        return (t1.abs().ln() - t0.abs().ln()).abs() / len;
    }
    (anti(t1) - anti(t0)) / len
}

/// `L^(p)` between a segment and a point.
pub fn point_segment_moment(seg: &Polytope, x: P3, p: i32) -> f64 {
    let (a, b) = (seg.vertices[0], seg.vertices[1]);
    let len = (b - a).norm();
    let u = (b - a) / len;
    let t = (x - a).dot(&u);
    let d = ((x - a) - u * t).norm();
    point_line_moment(d, -t, len - t, p)
}

/// `L^(p)` between two parallel (non-collinear) segments, exactly.
pub fn parallel_segments_moment(a: &Polytope, b: &Polytope, p: i32) -> f64 {
    if p == 0 {
        return 1.0;
    }
    let (a0, a1) = (a.vertices[0], a.vertices[1]);
    let la = (a1 - a0).norm();
    let u = (a1 - a0) / la;
    let (b0, b1) = (b.vertices[0], b.vertices[1]);
    let lb = (b1 - b0).norm();
    let (s0, s1) = {
        let (x, y) = ((b0 - a0).dot(&u), (b1 - a0).dot(&u));
        (x.min(y), x.max(y))
    };
    let off = b0 - a0 - u * (b0 - a0).dot(&u);
    let h = off.norm();
    // X − Y along u ranges over [0,la] − [s0,s1]; its density is the
    // trapezoid g(x) = |[0,la] ∩ [s0+x, s1+x]|.
    let bps = [-s1, (la - s1).min(-s0), (la - s1).max(-s0), la - s0];
    let g = |x: f64| (la.min(s1 + x) - 0f64.max(s0 + x)).max(0.0);
    // ∫ (h²+x²)^{p/2} (c0 + c1 x) dx on each linear piece.
    let f0 = |x: f64| h.powi(p + 1) * auxint::k(p - 2, x / h);
    let f1 = |x: f64| auxint::pow_half(h * h + x * x, p + 2) / (p + 2) as f64;
    let mut acc = Sum::default();
    for w in bps.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let (g0, g1) = (g(x0), g(x1));
        let c1 = (g1 - g0) / (x1 - x0);
        let c0 = g0 - c1 * x0;
        acc.add(c0 * (f0(x1) - f0(x0)) + c1 * (f1(x1) - f1(x0)));
    }
    acc.value() / (la * lb)
}

/// Sutherland–Hodgman intersection of two convex CCW polygons.
pub fn clip_convex_polygons(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (c0, c1) = (clip[i], clip[(i + 1) % m]);
        let e = sub2(c1, c0);
        let side = |x: [f64; 2]| cross2(e, sub2(x, c0));
        let input = std::mem::take(&mut out);
        let n = input.len();
        for j in 0..n {
            let (s, t) = (input[j], input[(j + 1) % n]);
            let (ds, dt) = (side(s), side(t));
            if ds >= 0.0 {
                out.push(s);
            }
            if (ds >= 0.0) != (dt >= 0.0) {
                let r = ds / (ds - dt);
                out.push([s[0] + r * (t[0] - s[0]), s[1] + r * (t[1] - s[1])]);
            }
        }
    }
    out
}

/// Length of the part of segment `[a, b]` inside a convex CCW polygon.
pub fn clip_segment_length(a: [f64; 2], b: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let d = sub2(b, a);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let m = poly.len();
    for i in 0..m {
        let (c0, c1) = (poly[i], poly[(i + 1) % m]);
        let e = sub2(c1, c0);
        // Inside: cross(e, x − c0) ≥ 0.
        let num = cross2(e, sub2(a, c0));
        let den = cross2(e, d);
        if den == 0.0 {
            if num < 0.0 {
                return 0.0;
            }
        } else {
            let t = -num / den;
            if den > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        if t0 >= t1 {
            return 0.0;
        }
    }
    (t1 - t0) * d.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Monotone-chain convex hull, CCW.
pub fn convex_hull2(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2
                && cross2(sub2(hull[hull.len() - 1], hull[hull.len() - 2]), sub2(p, hull[hull.len() - 2])) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Second domain of a parallel overlap.
#[derive(Debug, Clone)]
pub enum OverlapTarget<'a> {
    /// A polygon in a plane parallel to `A`.
    Face(&'a Polytope),
    /// Segments parallel to `A`'s plane, all at the same separation.
    Edges(Vec<(P3, P3)>),
}

/// Split every convex polygon by a line `{x : n·x = c}`.
fn split_by_line(cells: Vec<Vec<[f64; 2]>>, n: [f64; 2], c: f64, tol: f64) -> Vec<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(cells.len() + 8);
    for cell in cells {
        let s: Vec<f64> = cell.iter().map(|x| n[0] * x[0] + n[1] * x[1] - c).collect();
        if s.iter().all(|&v| v >= -tol) || s.iter().all(|&v| v <= tol) {
            out.push(cell);
            continue;
        }
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let m = cell.len();
        for i in 0..m {
            let j = (i + 1) % m;
            if s[i] >= 0.0 {
                pos.push(cell[i]);
            }
            if s[i] <= 0.0 {
                neg.push(cell[i]);
            }
            if (s[i] > 0.0 && s[j] < 0.0) || (s[i] < 0.0 && s[j] > 0.0) {
                let r = s[i] / (s[i] - s[j]);
                let x = [cell[i][0] + r * (cell[j][0] - cell[i][0]), cell[i][1] + r * (cell[j][1] - cell[i][1])];
                pos.push(x);
                neg.push(x);
            }
        }
        for piece in [pos, neg] {
            if piece.len() >= 3 && polygon_area2(&piece).abs() > tol * tol {
                out.push(piece);
            }
        }
    }
    out
}

/// Drops vertices within `tol` of the chord through their neighbours, and
/// the whole cell if it is thinner than `tol`.
fn simplify_cell(mut cell: Vec<[f64; 2]>, tol: f64) -> Option<Vec<[f64; 2]>> {
    let mut i = 0;
    while cell.len() >= 3 && i < cell.len() {
        let m = cell.len();
        let (a, b, c) = (cell[(i + m - 1) % m], cell[i], cell[(i + 1) % m]);
        let base = sub2(c, a);
        let len = (base[0] * base[0] + base[1] * base[1]).sqrt();
        if len <= tol || cross2(base, sub2(b, a)).abs() <= tol * len {
            cell.remove(i);
            i = 0;
        } else {
            i += 1;
        }
    }
    if cell.len() < 3 {
        return None;
    }
    let diam = cell.iter().flat_map(|x| cell.iter().map(move |y| sub2(*x, *y))).map(|d| d[0].hypot(d[1])).fold(0.0, f64::max);
    (polygon_area2(&cell) > tol * diam).then_some(cell)
}

/// Shift-space arrangement of a parallel pair, projected into `A`'s plane.
struct OverlapSetup {
    apts: Vec<[f64; 2]>,
    bpoly: Option<Vec<[f64; 2]>>,
    bsegs: Vec<([f64; 2], [f64; 2])>,
    h: f64,
    vol_a: f64,
    vol_b: f64,
    /// Convex cells on which the overlap factor is one polynomial.
    cells: Vec<Vec<[f64; 2]>>,
}

impl OverlapSetup {
    /// The shift space is cut along every line where a vertex of one domain
    /// crosses an edge line of the other, so the overlap factor is a single
    /// polynomial on each cell.
    fn new(a: &Polytope, b: &OverlapTarget<'_>) -> Result<Self> {
        if a.dim_intrinsic != 2 {
            return Err(Error::Input("overlap needs a polygon as first domain".into()));
        }
        let frame = a.frame();
        let diam = a.diameter();
        let tol = REL_TOL * diam.max(1.0);
        let mut apts: Vec<[f64; 2]> = a.vertices.iter().map(|v| frame.to2(v)).collect();
        if polygon_area2(&apts) < 0.0 {
            apts.reverse();
        }
        if !is_convex(&apts) {
            return Err(Error::Nonconvex);
        }
        let vol_a = polygon_area2(&apts);
        let heights = |pts: &mut dyn Iterator<Item = &P3>| -> Result<f64> {
            let hs: Vec<f64> = pts.map(|x| (x - frame.origin).dot(&frame.n)).collect();
            let h = hs[0];
            if hs.iter().any(|x| (x - h).abs() > tol) || h.abs() <= tol {
                return Err(Error::NotParallel);
            }
            Ok(h.abs())
        };
        let (h, bverts, bsegs, vol_b, bpoly) = match b {
            OverlapTarget::Face(f) => {
                if f.dim_intrinsic != 2 {
                    return Err(Error::Input("face target must be a polygon".into()));
                }
                let h = heights(&mut f.vertices.iter())?;
                let mut bp: Vec<[f64; 2]> = f.vertices.iter().map(|v| frame.to2(v)).collect();
                if polygon_area2(&bp) < 0.0 {
                    bp.reverse();
                }
                if !is_convex(&bp) {
                    return Err(Error::Nonconvex);
                }
                let segs: Vec<_> = (0..bp.len()).map(|i| (bp[i], bp[(i + 1) % bp.len()])).collect();
                let vol = polygon_area2(&bp);
                (h, bp.clone(), segs, vol, Some(bp))
            }
            OverlapTarget::Edges(edges) => {
                if edges.is_empty() {
                    return Err(Error::NoOverlapSupport);
                }
                let h = heights(&mut edges.iter().flat_map(|(x, y)| [x, y]))?;
                let segs: Vec<([f64; 2], [f64; 2])> = edges.iter().map(|(x, y)| (frame.to2(x), frame.to2(y))).collect();
                let verts = segs.iter().flat_map(|&(x, y)| [x, y]).collect();
                let vol = edges.iter().map(|(x, y)| (x - y).norm()).sum();
                (h, verts, segs, vol, None)
            }
        };
        let diffs: Vec<[f64; 2]> = apts.iter().flat_map(|x| bverts.iter().map(move |y| sub2(*x, *y))).collect();
        let support = convex_hull2(&diffs);
        if support.len() < 3 || polygon_area2(&support) <= tol * tol {
            return Err(Error::NoOverlapSupport);
        }
        let mut lines: Vec<([f64; 2], f64)> = Vec::new();
        let mut add_line = |through: [f64; 2], dir: [f64; 2]| {
            let l = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
            if l == 0.0 {
                return;
            }
            let mut n = [-dir[1] / l, dir[0] / l];
            if n[0] < 0.0 || (n[0] == 0.0 && n[1] < 0.0) {
                n = [-n[0], -n[1]];
            }
            let c = n[0] * through[0] + n[1] * through[1];
            if !lines.iter().any(|(m, d)| (m[0] - n[0]).abs() < 1e-9 && (m[1] - n[1]).abs() < 1e-9 && (d - c).abs() < tol) {
                lines.push((n, c));
            }
        };
        let na = apts.len();
        for i in 0..na {
            let dir = sub2(apts[(i + 1) % na], apts[i]);
            for y in &bverts {
                add_line(sub2(apts[i], *y), dir);
            }
        }
        for &(y0, y1) in &bsegs {
            let dir = sub2(y1, y0);
            for x in &apts {
                add_line(sub2(*x, y0), dir);
            }
        }
        let mut cells = vec![support];
        for (n, c) in &lines {
            cells = split_by_line(cells, *n, *c, tol);
        }
        // Nearly coincident lines leave slivers whose quadratic fits are
        // ill-conditioned; their share of the integral is below tolerance.
        let cells = cells.into_iter().filter_map(|c| simplify_cell(c, tol)).collect();
        Ok(Self { apts, bpoly, bsegs, h, vol_a, vol_b, cells })
    }

    /// `vol(A ∩ (projB + k))`: area for a face, total chord length for edges.
    fn overlap(&self, kx: f64, ky: f64) -> f64 {
        match &self.bpoly {
            Some(bp) => {
                let shifted: Vec<[f64; 2]> = bp.iter().map(|v| [v[0] + kx, v[1] + ky]).collect();
                polygon_area2(&clip_convex_polygons(&self.apts, &shifted)).max(0.0)
            }
            None => self
                .bsegs
                .iter()
                .map(|&(y0, y1)| clip_segment_length([y0[0] + kx, y0[1] + ky], [y1[0] + kx, y1[1] + ky], &self.apts))
                .sum(),
        }
    }
}

fn is_convex(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    let scale = poly.iter().flat_map(|p| p.iter()).fold(0f64, |m, x| m.max(x.abs())).max(1e-300);
    (0..n).all(|i| cross2(sub2(poly[(i + 1) % n], poly[i]), sub2(poly[(i + 2) % n], poly[(i + 1) % n])) >= -1e-12 * scale * scale)
}

/// Raw overlap integral `∫ (h² + |k|²)^{p/2} vol(A ∩ (projB + k)) dk` and the
/// product `volA · volB`, by adaptive quadrature on the kink-free cells.
pub fn overlap_integral(a: &Polytope, b: &OverlapTarget<'_>, p: i32, abs_tol: f64) -> Result<(QuadResult, f64)> {
    let s = OverlapSetup::new(a, b)?;
    let region: Vec<Triangle> = s.cells.iter().flat_map(|c| quad::fan(c)).collect();
    let h2 = s.h * s.h;
    let f = |kx: f64, ky: f64| auxint::pow_half(h2 + kx * kx + ky * ky, p) * s.overlap(kx, ky);
    let opts = Quad2dOptions { abs_tol, rel_tol: 0.0, order: 5, max_splits: 200_000 };
    let r = quad::quad2d_with(f, &region, opts)?;
    Ok((r, s.vol_a * s.vol_b))
}

/// Monomial coefficients `(c00, c10, c01, c20, c11, c02)` of the quadratic
/// that interpolates `vals` at the vertices and edge midpoints of `t`.
fn quadratic_on_triangle(t: [[f64; 2]; 3], vals: [f64; 6]) -> [f64; 6] {
    let c = [(t[0][0] + t[1][0] + t[2][0]) / 3.0, (t[0][1] + t[1][1] + t[2][1]) / 3.0];
    let s = t.iter().map(|v| (v[0] - c[0]).hypot(v[1] - c[1])).fold(0f64, f64::max);
    let nodes = [t[0], t[1], t[2], mid(t[0], t[1]), mid(t[1], t[2]), mid(t[2], t[0])];
    let m = nalgebra::SMatrix::<f64, 6, 6>::from_fn(|r, col| {
        let x = (nodes[r][0] - c[0]) / s;
        let y = (nodes[r][1] - c[1]) / s;
        [1.0, x, y, x * x, x * y, y * y][col]
    });
    let g = m.lu().solve(&nalgebra::SVector::<f64, 6>::from(vals)).unwrap_or_else(nalgebra::SVector::zeros);
    // Expand g((x − cx)/s, (y − cy)/s) into global monomials.
    let (u, v) = (c[0], c[1]);
    let (g0, g1, g2, g3, g4, g5) = (g[0], g[1] / s, g[2] / s, g[3] / (s * s), g[4] / (s * s), g[5] / (s * s));
    [
        g0 - g1 * u - g2 * v + g3 * u * u + g4 * u * v + g5 * v * v,
        g1 - 2.0 * g3 * u - g4 * v,
        g2 - g4 * u - 2.0 * g5 * v,
        g3,
        g4,
        g5,
    ]
}

fn mid(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
}

/// Pieces for `∫ f(k) (h² + |k|²)^{p/2} dk` over the oriented triangle
/// `(0, a, b)`, with `f` a global quadratic.
fn origin_triangle_pieces(a: [f64; 2], b: [f64; 2], f: [f64; 6], h: f64, tol: f64, out: &mut Vec<FundamentalPiece>) {
    let e = sub2(b, a);
    let len = e[0].hypot(e[1]);
    let cr = cross2(a, b);
    let d = cr.abs() / len;
    if d <= tol || len == 0.0 {
        return;
    }
    let u = [e[0] / len, e[1] / len];
    // Unit normal pointing from the origin to the side's line.
    let mut n = [-u[1], u[0]];
    if n[0] * a[0] + n[1] * a[1] < 0.0 {
        n = [-n[0], -n[1]];
    }
    // x = x' n + y' u; substitute into f.
    let [c00, c10, c01, c20, c11, c02] = f;
    let (nx, ny, ux, uy) = (n[0], n[1], u[0], u[1]);
    let a00 = c00;
    let a10 = c10 * nx + c01 * ny;
    let a01 = c10 * ux + c01 * uy;
    let a20 = c20 * nx * nx + c11 * nx * ny + c02 * ny * ny;
    let a11 = 2.0 * c20 * nx * ux + c11 * (nx * uy + ny * ux) + 2.0 * c02 * ny * uy;
    let a02 = c20 * ux * ux + c11 * ux * uy + c02 * uy * uy;
    let coeffs = [a00, a10, a01, a20, a11, a02];
    let ta = a[0] * u[0] + a[1] * u[1];
    let tb = b[0] * u[0] + b[1] * u[1];
    let q = d / h;
    let sign = cr.signum();
    for (t, s) in [(tb, sign), (ta, -sign)] {
        let g = (t / d).atan();
        if g == 0.0 {
            continue;
        }
        // Over a negative angle, y-odd monomials keep their sign and y-even ones flip.
        let c: [f64; 6] = std::array::from_fn(|k| {
            let (_, j) = Monomial::ALL[k].ij();
            if g < 0.0 && j % 2 == 0 {
                -coeffs[k]
            } else {
                coeffs[k]
            }
        });
        out.push(FundamentalPiece::new(s, q, g.abs(), c, h));
    }
}

/// Builds an exact I-expansion for any convex parallel pair: the overlap
/// factor is interpolated by a quadratic on each kink-free cell and every
/// cell is split into origin triangles.
pub fn overlap_diagram_auto(a: &Polytope, b: &OverlapTarget<'_>) -> Result<OverlapDiagram> {
    let s = OverlapSetup::new(a, b)?;
    let tol = 1e-13 * a.diameter().max(1.0);
    let mut pieces = Vec::new();
    for cell in &s.cells {
        for t in quad::fan(cell) {
            let tri = [t.0, t.1, t.2];
            if t.area() <= tol * tol {
                continue;
            }
            // The factor can jump on the support boundary (an edge of B parallel to
            // an edge of A), so the fit nodes are taken strictly inside.
            let g = [(tri[0][0] + tri[1][0] + tri[2][0]) / 3.0, (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0];
            let inner = tri.map(|v| mid(g, v));
            let nodes = [inner[0], inner[1], inner[2], mid(inner[0], inner[1]), mid(inner[1], inner[2]), mid(inner[2], inner[0])];
            let vals = nodes.map(|k| s.overlap(k[0], k[1]));
            let f = quadratic_on_triangle(inner, vals);
            let orient = cross2(sub2(tri[1], tri[0]), sub2(tri[2], tri[0])).signum();
            let start = pieces.len();
            for i in 0..3 {
                origin_triangle_pieces(tri[i], tri[(i + 1) % 3], f, s.h, tol, &mut pieces);
            }
            if orient < 0.0 {
                for pc in &mut pieces[start..] {
                    pc.sign = -pc.sign;
                }
            }
        }
    }
    Ok(OverlapDiagram { fold: 1, vol_a: s.vol_a, vol_b: s.vol_b, pieces, scale: 1.0, meta: "derived".into() })
}

/// `L^(p)` for a parallel, separated pair by adaptive quadrature of the
/// overlap formula, to absolute tolerance `1e-8` on the moment.
pub fn overlap_moment_numeric(a: &Polytope, b: &OverlapTarget<'_>, p: i32) -> Result<f64> {
    overlap_moment_numeric_tol(a, b, p, 1e-9)
}

pub fn overlap_moment_numeric_tol(a: &Polytope, b: &OverlapTarget<'_>, p: i32, tol: f64) -> Result<f64> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    if p == 0 {
        // Still validate the configuration.
        overlap_integral(a, b, 0, 1.0)?;
        return Ok(1.0);
    }
    let vol_a = a.measure()?;
    let vol_b = match b {
        OverlapTarget::Face(f) => f.measure()?,
        OverlapTarget::Edges(e) => e.iter().map(|(x, y)| (x - y).norm()).sum(),
    };
    let (r, prod) = overlap_integral(a, b, p, tol * vol_a * vol_b)?;
    Ok(r.value / prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn clip_squares() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!((polygon_area2(&clip_convex_polygons(&sq, &sq)) - 1.0).abs() < 1e-15);
        let shifted: Vec<[f64; 2]> = sq.iter().map(|v| [v[0] + 0.5, v[1] + 0.5]).collect();
        assert!((polygon_area2(&clip_convex_polygons(&sq, &shifted)) - 0.25).abs() < 1e-15);
        let far: Vec<[f64; 2]> = sq.iter().map(|v| [v[0] + 3.0, v[1]]).collect();
        assert!(clip_convex_polygons(&sq, &far).len() < 3);
    }

    #[test]
    fn segment_chords() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!((clip_segment_length([-1.0, 0.5], [2.0, 0.5], &sq) - 1.0).abs() < 1e-15);
        assert!((clip_segment_length([0.25, 0.5], [0.5, 0.5], &sq) - 0.25).abs() < 1e-15);
        assert_eq!(clip_segment_length([2.0, 0.5], [3.0, 0.5], &sq), 0.0);
    }

    #[test]
    fn cube_face_vs_origin() {
        let top = Polytope::polygon(vec![
            P3::new(0.0, 0.0, 1.0),
            P3::new(1.0, 0.0, 1.0),
            P3::new(1.0, 1.0, 1.0),
            P3::new(0.0, 1.0, 1.0),
        ])
        .unwrap();
        let v = point_polygon_moment(&top, P3::zeros(), 1).unwrap();
        let want = 1.0 / 3f64.sqrt() - PI / 18.0 + 4.0 / 3.0 * (1.0 / 3f64.sqrt()).atanh();
        assert!((v - want).abs() < 1e-14, "{v} {want}");
        // Orientation of the input does not matter.
        let mut rev = top.vertices.clone();
        rev.reverse();
        let w = point_polygon_moment(&Polytope::polygon(rev).unwrap(), P3::zeros(), 1).unwrap();
        assert!((v - w).abs() < 1e-14);
    }

    #[test]
    fn point_segment_closed_forms() {
        // Point at distance 1 from the midpoint of a unit segment, p = 2.
        let seg = Polytope::segment(P3::new(-0.5, 0.0, 0.0), P3::new(0.5, 0.0, 0.0)).unwrap();
        let v = point_segment_moment(&seg, P3::new(0.0, 1.0, 0.0), 2);
        assert!((v - (1.0 + 1.0 / 12.0)).abs() < 1e-14);
        // Collinear, p = 1.
        let v = point_segment_moment(&seg, P3::new(1.5, 0.0, 0.0), 1);
        assert!((v - 1.5).abs() < 1e-14);
        let v = point_segment_moment(&seg, P3::new(1.5, 0.0, 0.0), -1);
        assert!((v - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn parallel_segments_second_moment() {
        let a = Polytope::segment(P3::new(0.0, 0.0, 0.0), P3::new(1.0, 0.0, 0.0)).unwrap();
        let b = Polytope::segment(P3::new(0.3, 0.0, 2.0), P3::new(2.3, 0.0, 2.0)).unwrap();
        // E(X−Y)² along the line: Var 1/12 + 4/12 plus mean gap (1.3−0.5)², plus h² = 4.
        let want = 4.0 + 1.0 / 12.0 + 4.0 / 12.0 + 0.8f64.powi(2);
        assert!((parallel_segments_moment(&a, &b, 2) - want).abs() < 1e-13);
    }
}
