//! Flat polytopes in R² and R³: points, segments, polygons and closed
//! polyhedra, with the measures, projections and signed distances the
//! reductions need.

use nalgebra::Vector3;
use serde::Deserialize;

use crate::{Error, Result};

pub type P3 = Vector3<f64>;

/// Relative tolerance for rank, coplanarity and hull membership tests.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim_ambient: usize,
    pub dim_intrinsic: usize,
    pub vertices: Vec<P3>,
    /// Vertex cycles. A polygon has the single cycle `0..n`; a solid has its
    /// faces, counterclockwise seen from outside. Empty for points and segments.
    pub faces: Vec<Vec<usize>>,
}

/// Orthonormal frame of a plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub origin: P3,
    pub u: P3,
    pub v: P3,
    pub n: P3,
}

impl PlaneFrame {
    pub fn to2(&self, x: &P3) -> [f64; 2] {
        let d = x - self.origin;
        [d.dot(&self.u), d.dot(&self.v)]
    }

    pub fn to3(&self, x: [f64; 2]) -> P3 {
        self.origin + self.u * x[0] + self.v * x[1]
    }

    /// Frame through `origin` with the given normal.
    pub fn from_normal(origin: P3, n: P3) -> Self {
        let n = n.normalize();
        let seed = if n.x.abs() < 0.6 { P3::x() } else if n.y.abs() < 0.6 { P3::y() } else { P3::z() };
        let u = (seed - n * seed.dot(&n)).normalize();
        let v = n.cross(&u);
        Self { origin, u, v, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedHeight {
    pub value: f64,
    pub side_index: usize,
    pub scaling_point: P3,
}

/// How two affine hulls sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineRelation {
    Intersecting,
    ParallelSeparated { h: f64 },
    Skew,
    IdenticalHull,
}

/// Affine hull as a point plus an orthonormal direction basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHull {
    pub origin: P3,
    pub basis: Vec<P3>,
}

impl AffineHull {
    pub fn of_points(points: &[P3]) -> Self {
        let origin = points[0];
        let diam = diameter(points).max(f64::MIN_POSITIVE);
        let basis = orthonormalize(points.iter().map(|p| p - origin), REL_TOL * diam);
        Self { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Component of `x - origin` orthogonal to the hull.
    pub fn residual(&self, x: &P3) -> P3 {
        let mut r = x - self.origin;
        for b in &self.basis {
            r -= b * r.dot(b);
        }
        r
    }

    pub fn contains(&self, x: &P3, tol: f64) -> bool {
        self.residual(x).norm() <= tol
    }
}

fn orthonormalize<I: IntoIterator<Item = P3>>(vs: I, tol: f64) -> Vec<P3> {
    let mut basis: Vec<P3> = Vec::new();
    // Pick the largest remaining residual each round so the basis is well conditioned.
    let mut pool: Vec<P3> = vs.into_iter().collect();
    while basis.len() < 3 {
        let mut best: Option<P3> = None;
        for v in &pool {
            let mut r = *v;
            for b in &basis {
                r -= b * r.dot(b);
            }
            if best.is_none_or(|b| r.norm() > b.norm()) {
                best = Some(r);
            }
        }
        match best {
            Some(r) if r.norm() > tol => basis.push(r.normalize()),
            _ => break,
        }
        pool.retain(|v| v.norm() > 0.0);
    }
    basis
}

pub fn diameter(points: &[P3]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Newell area vector of a closed planar loop (twice the vector area).
fn newell(points: &[P3]) -> P3 {
    let c = points[0];
    let mut acc = P3::zeros();
    for i in 1..points.len().saturating_sub(1) {
        acc += (points[i] - c).cross(&(points[i + 1] - c));
    }
    acc
}

impl Polytope {
    pub fn point(p: P3) -> Self {
        Self { dim_ambient: 3, dim_intrinsic: 0, vertices: vec![p], faces: vec![] }
    }

    pub fn segment(a: P3, b: P3) -> Result<Self> {
        if (a - b).norm() <= REL_TOL * a.norm().max(b.norm()).max(1.0) * 1e-5 {
            return Err(Error::Degenerate("zero-length segment".into()));
        }
        Ok(Self { dim_ambient: 3, dim_intrinsic: 1, vertices: vec![a, b], faces: vec![] })
    }

    /// Planar simple polygon; the vertex order fixes the side normal.
    pub fn polygon(vertices: Vec<P3>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate("polygon needs at least 3 vertices".into()));
        }
        let hull = AffineHull::of_points(&vertices);
        if hull.dim() != 2 {
            return Err(Error::Degenerate(format!("polygon vertices span dimension {}", hull.dim())));
        }
        let n = vertices.len();
        let dim_ambient = if vertices.iter().all(|v| v.z == 0.0) { 2 } else { 3 };
        let p = Self { dim_ambient, dim_intrinsic: 2, vertices, faces: vec![(0..n).collect()] };
        let diam = diameter(&p.vertices);
        if p.measure_unchecked() < 1e-14 * diam * diam {
            return Err(Error::Degenerate("polygon has zero area".into()));
        }
        Ok(p)
    }

    /// Polygon in the xy-plane.
    pub fn polygon2(vertices: &[[f64; 2]]) -> Result<Self> {
        Self::polygon(vertices.iter().map(|v| P3::new(v[0], v[1], 0.0)).collect())
    }

    /// Closed polyhedron. Faces are re-oriented consistently and outward if
    /// needed, with a warning per flipped face.
    pub fn solid(vertices: Vec<P3>, mut faces: Vec<Vec<usize>>) -> Result<Self> {
        let diam = diameter(&vertices);
        for f in &faces {
            let mut uniq = f.clone();
            uniq.sort_unstable();
            uniq.dedup();
            if uniq.len() < 3 || uniq.len() != f.len() {
                return Err(Error::Degenerate(format!("face {f:?} needs >= 3 distinct vertices")));
            }
            if let Some(&bad) = f.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Input(format!("face index {bad} out of range")));
            }
            let pts: Vec<P3> = f.iter().map(|&i| vertices[i]).collect();
            let hull = AffineHull::of_points(&pts);
            if hull.dim() != 2 || pts.iter().any(|x| !hull.contains(x, REL_TOL * diam)) {
                return Err(Error::Degenerate(format!("face {f:?} is not planar")));
            }
        }
        orient_faces(&vertices, &mut faces)?;
        let p = Self { dim_ambient: 3, dim_intrinsic: 3, vertices, faces };
        if p.measure_unchecked() < 1e-14 * diam.powi(3) {
            return Err(Error::Degenerate("solid has zero volume".into()));
        }
        Ok(p)
    }

    /// Convex hull of a point cloud in general position (at least 4 points,
    /// not coplanar). Coplanar hull points are merged into one face.
    pub fn convex_hull(points: &[P3]) -> Result<Self> {
        let n = points.len();
        let diam = diameter(points);
        let tol = REL_TOL * diam;
        let mut planes: Vec<(P3, f64)> = Vec::new();
        let mut faces = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = (points[j] - points[i]).cross(&(points[k] - points[i]));
                    if nrm.norm() <= tol * diam {
                        continue;
                    }
                    let mut nrm = nrm.normalize();
                    let mut off = nrm.dot(&points[i]);
                    let (mut above, mut below) = (false, false);
                    for x in points {
                        let d = nrm.dot(x) - off;
                        above |= d > tol;
                        below |= d < -tol;
                    }
                    if above && below {
                        continue;
                    }
                    if above {
                        nrm = -nrm;
                        off = -off;
                    }
                    if planes.iter().any(|(m, o)| (m - nrm).norm() < 1e-9 && (o - off).abs() <= tol) {
                        continue;
                    }
                    planes.push((nrm, off));
                    let on: Vec<usize> = (0..n).filter(|&m| (nrm.dot(&points[m]) - off).abs() <= tol).collect();
                    let frame = PlaneFrame::from_normal(points[i], nrm);
                    let c = on.iter().map(|&m| points[m]).sum::<P3>() / on.len() as f64;
                    let cc = frame.to2(&c);
                    let mut ring: Vec<(f64, usize)> = on
                        .iter()
                        .map(|&m| {
                            let q = frame.to2(&points[m]);
                            ((q[1] - cc[1]).atan2(q[0] - cc[0]), m)
                        })
                        .collect();
                    ring.sort_by(|a, b| a.0.total_cmp(&b.0));
                    faces.push(ring.into_iter().map(|(_, m)| m).collect::<Vec<_>>());
                }
            }
        }
        if faces.len() < 4 {
            return Err(Error::Degenerate("points are coplanar".into()));
        }
        // Drop interior points so every vertex is used.
        let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let remap = |i: usize| used.binary_search(&i).unwrap();
        let vertices = used.iter().map(|&i| points[i]).collect();
        let faces = faces.into_iter().map(|f| f.into_iter().map(remap).collect()).collect();
        Self::solid(vertices, faces)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            dim: usize,
            vertices: Vec<Vec<f64>>,
            #[serde(default)]
            faces: Option<Vec<Vec<usize>>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let mut verts = Vec::with_capacity(raw.vertices.len());
        for v in &raw.vertices {
            if v.len() != raw.dim || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("bad vertex {v:?} for dim {}", raw.dim)));
            }
            verts.push(if raw.dim == 2 { P3::new(v[0], v[1], 0.0) } else { P3::new(v[0], v[1], v[2]) });
        }
        match (raw.dim, raw.faces) {
            (2, _) => Self::polygon(verts),
            (3, Some(faces)) => Self::solid(verts, faces),
            (3, None) => Self::convex_hull(&verts),
            (d, _) => Err(Error::Input(format!("unsupported dim {d}"))),
        }
    }

    pub fn to_json(&self) -> String {
        let verts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| if self.dim_ambient == 2 { vec![v.x, v.y] } else { vec![v.x, v.y, v.z] })
            .collect();
        let mut obj = serde_json::json!({ "dim": self.dim_ambient, "vertices": verts });
        if self.dim_intrinsic == 3 {
            obj["faces"] = serde_json::json!(self.faces);
        }
        obj.to_string()
    }

    pub fn tetrahedron(v: [P3; 4]) -> Result<Self> {
        let mut faces = vec![vec![0, 2, 1], vec![0, 1, 3], vec![1, 2, 3], vec![0, 3, 2]];
        if (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0])) < 0.0 {
            for f in &mut faces {
                f.reverse();
            }
        }
        Self::solid(v.to_vec(), faces)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn hull(&self) -> AffineHull {
        AffineHull::of_points(&self.vertices)
    }

    pub fn vertex_centroid(&self) -> P3 {
        self.vertices.iter().sum::<P3>() / self.vertices.len() as f64
    }

    pub fn face_points(&self, f: usize) -> Vec<P3> {
        self.faces[f].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Unit normal of a polygon (from its vertex order) or of a solid's face.
    pub fn face_normal(&self, f: usize) -> P3 {
        newell(&self.face_points(f)).normalize()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * newell(&self.face_points(f)).norm()
    }

    /// Plane frame of a polygon, with `n` along the polygon's orientation.
    pub fn frame(&self) -> PlaneFrame {
        assert_eq!(self.dim_intrinsic, 2);
        let n = self.face_normal(0);
        if self.dim_ambient == 2 && n.z > 0.0 {
            return PlaneFrame { origin: P3::zeros(), u: P3::x(), v: P3::y(), n: P3::z() };
        }
        PlaneFrame::from_normal(self.vertices[0], n)
    }

    /// Undirected edges, each once, in first-seen order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        match self.dim_intrinsic {
            0 => vec![],
            1 => vec![[0, 1]],
            _ => {
                let mut out: Vec<[usize; 2]> = Vec::new();
                for f in &self.faces {
                    for (a, b) in cycle_pairs(f) {
                        if !out.iter().any(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) {
                            out.push([a, b]);
                        }
                    }
                }
                out
            }
        }
    }

    /// For a solid, the two faces adjacent to each edge of [`Polytope::edges`]
    /// as `(face traversing a→b, face traversing b→a)`.
    pub fn edge_faces(&self) -> Vec<(usize, usize)> {
        self.edges()
            .iter()
            .map(|&[a, b]| {
                let fwd = self.faces.iter().position(|f| cycle_pairs(f).any(|e| e == (a, b))).unwrap();
                let back = self.faces.iter().position(|f| cycle_pairs(f).any(|e| e == (b, a))).unwrap();
                (fwd, back)
            })
            .collect()
    }

    fn measure_unchecked(&self) -> f64 {
        match self.dim_intrinsic {
            0 => 1.0,
            1 => (self.vertices[1] - self.vertices[0]).norm(),
            2 => self.face_area(0),
            _ => {
                let o = self.vertices[0];
                let mut acc = crate::sum::Sum::default();
                for f in &self.faces {
                    let a = self.vertices[f[0]] - o;
                    for w in f[1..].windows(2) {
                        let b = self.vertices[w[0]] - o;
                        let c = self.vertices[w[1]] - o;
                        acc.add(a.dot(&b.cross(&c)) / 6.0);
                    }
                }
                acc.value()
            }
        }
    }

    /// Length, area or volume (1 for a point).
    pub fn measure(&self) -> Result<f64> {
        if self.dim_intrinsic == 3 {
            check_closed(&self.faces)?;
        }
        let m = self.measure_unchecked();
        let d = self.diameter();
        if self.dim_intrinsic > 0 && m < 1e-14 * d.powi(self.dim_intrinsic as i32) {
            return Err(Error::Degenerate(format!("measure {m:e} is negligible")));
        }
        Ok(m)
    }

    /// Number of sides (boundary facets within the affine hull).
    pub fn side_count(&self) -> usize {
        match self.dim_intrinsic {
            0 => 0,
            1 => 2,
            2 => self.vertices.len(),
            _ => self.faces.len(),
        }
    }

    /// A point on side `i` and the outward unit normal there, within the hull.
    pub fn side(&self, i: usize) -> (P3, P3) {
        match self.dim_intrinsic {
            1 => {
                let d = (self.vertices[1] - self.vertices[0]).normalize();
                if i == 0 {
                    (self.vertices[0], -d)
                } else {
                    (self.vertices[1], d)
                }
            }
            2 => {
                let n = self.face_normal(0);
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % self.vertices.len()];
                (a, (b - a).cross(&n).normalize())
            }
            3 => (self.vertices[self.faces[i][0]], self.face_normal(i)),
            _ => panic!("a point has no sides"),
        }
    }

    /// Side `i` as a polytope of one dimension lower.
    pub fn side_polytope(&self, i: usize) -> Polytope {
        match self.dim_intrinsic {
            1 => Polytope::point(self.vertices[i]),
            2 => {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % self.vertices.len()];
                Polytope { dim_ambient: self.dim_ambient, dim_intrinsic: 1, vertices: vec![a, b], faces: vec![] }
            }
            3 => {
                let pts = self.face_points(i);
                let n = pts.len();
                Polytope { dim_ambient: 3, dim_intrinsic: 2, vertices: pts, faces: vec![(0..n).collect()] }
            }
            _ => panic!("a point has no sides"),
        }
    }

    /// Measure of side `i`.
    pub fn side_measure(&self, i: usize) -> f64 {
        match self.dim_intrinsic {
            1 => 1.0,
            2 => (self.vertices[(i + 1) % self.vertices.len()] - self.vertices[i]).norm(),
            3 => self.face_area(i),
            _ => 0.0,
        }
    }

    /// Raw signed distance without the hull-membership check.
    pub(crate) fn side_height(&self, i: usize, c: &P3) -> f64 {
        let (x, n) = self.side(i);
        (x - c).dot(&n)
    }
}

fn cycle_pairs(f: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()]))
}

fn check_closed(faces: &[Vec<usize>]) -> Result<()> {
    let mut count = std::collections::HashMap::new();
    for f in faces {
        for (a, b) in cycle_pairs(f) {
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    match count.iter().find(|(_, &c)| c != 2) {
        Some((e, c)) => Err(Error::OpenSurface(format!("edge {e:?} is used by {c} faces"))),
        None => Ok(()),
    }
}

/// Makes adjacent faces traverse shared edges in opposite directions, then
/// flips everything if the enclosed volume comes out negative.
fn orient_faces(vertices: &[P3], faces: &mut [Vec<usize>]) -> Result<()> {
    check_closed(faces)?;
    let nf = faces.len();
    let mut done = vec![false; nf];
    let mut flipped = vec![false; nf];
    for root in 0..nf {
        if done[root] {
            continue;
        }
        done[root] = true;
        let mut stack = vec![root];
        while let Some(f) = stack.pop() {
            let fe: Vec<(usize, usize)> = cycle_pairs(&faces[f]).collect();
            for g in 0..nf {
                if done[g] {
                    continue;
                }
                let ge: Vec<(usize, usize)> = cycle_pairs(&faces[g]).collect();
                let same = fe.iter().any(|e| ge.contains(e));
                let opposite = fe.iter().any(|&(a, b)| ge.contains(&(b, a)));
                if same || opposite {
                    if same {
                        faces[g].reverse();
                        flipped[g] = !flipped[g];
                    }
                    done[g] = true;
                    stack.push(g);
                }
            }
        }
    }
    let o = vertices[0];
    let mut vol = 0.0;
    for f in faces.iter() {
        let a = vertices[f[0]] - o;
        for w in f[1..].windows(2) {
            vol += a.dot(&(vertices[w[0]] - o).cross(&(vertices[w[1]] - o)));
        }
    }
    if vol < 0.0 {
        for (f, fl) in faces.iter_mut().zip(flipped.iter_mut()) {
            f.reverse();
            *fl = !*fl;
        }
    }
    for (i, fl) in flipped.iter().enumerate() {
        if *fl {
            log::warn!("face {i} was wound inward; flipped");
        }
    }
    Ok(())
}

pub fn measure(p: &Polytope) -> Result<f64> {
    p.measure()
}

/// Signed distance `⟨x_i − C, n̂_i⟩` of side `side_index` from `c`.
pub fn signed_distance(p: &Polytope, side_index: usize, c: P3) -> Result<SignedHeight> {
    if side_index >= p.side_count() {
        return Err(Error::IndexRange(format!("side {side_index} of {}", p.side_count())));
    }
    let r = p.hull().residual(&c).norm();
    if r > REL_TOL * p.diameter().max(1.0) {
        return Err(Error::OffHull(r));
    }
    Ok(SignedHeight { value: p.side_height(side_index, &c), side_index, scaling_point: c })
}

/// Foot of the perpendicular from `x` onto the plane of a polygon, and the distance.
pub fn project_point(plane_of: &Polytope, x: P3) -> (P3, f64) {
    let n = plane_of.face_normal(0);
    let d = (x - plane_of.vertices[0]).dot(&n);
    (x - n * d, d.abs())
}

pub fn affine_relation(a: &Polytope, b: &Polytope) -> AffineRelation {
    let ha = a.hull();
    let hb = b.hull();
    let scale = a.diameter().max(b.diameter()).max((ha.origin - hb.origin).norm()).max(1e-300);
    let tol = REL_TOL * scale;
    let joint = orthonormalize(ha.basis.iter().chain(&hb.basis).copied(), 1e-12);
    let mut r = hb.origin - ha.origin;
    for v in &joint {
        r -= v * r.dot(v);
    }
    let dist = r.norm();
    let contained = |small: &AffineHull, big: &AffineHull| small.basis.iter().all(|v| big.residual(&(big.origin + v)).norm() < 1e-9);
    let parallel = contained(&ha, &hb) || contained(&hb, &ha);
    if dist <= tol {
        if ha.dim() == hb.dim() && parallel {
            AffineRelation::IdenticalHull
        } else {
            AffineRelation::Intersecting
        }
    } else if parallel {
        AffineRelation::ParallelSeparated { h: dist }
    } else {
        AffineRelation::Skew
    }
}

/// `V1 = (1/2π) Σ_edges length × exterior dihedral angle`.
pub fn first_intrinsic_volume(p: &Polytope) -> Result<f64> {
    if p.dim_intrinsic != 3 {
        return Err(Error::Input("first intrinsic volume needs a solid".into()));
    }
    check_closed(&p.faces)?;
    let mut acc = crate::sum::Sum::default();
    for (&[a, b], (f1, f2)) in p.edges().iter().zip(p.edge_faces()) {
        let n1 = p.face_normal(f1);
        let n2 = p.face_normal(f2);
        let d = p.vertices[b] - p.vertices[a];
        let cr = n1.cross(&n2);
        let mut theta = cr.norm().atan2(n1.dot(&n2));
        if cr.dot(&d) < 0.0 {
            theta = -theta;
        }
        if theta < -1e-9 {
            return Err(Error::Nonconvex);
        }
        acc.add(d.norm() * theta);
    }
    Ok(acc.value() / (2.0 * std::f64::consts::PI))
}
