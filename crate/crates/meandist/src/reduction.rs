//! Crofton reductions.
//!
//! Three layers live here: the per-solid linear systems together with their
//! solved `P33` forms, the closed tetrahedron formula, and a general engine
//! that applies the two-step body reduction and then recursively reduces
//! every pair of flat polytopes until the affine hulls separate.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::auxint::pow_half;
use crate::catalog::{Solid, PHI};
use crate::geom::{self, AffineHull, AffineRelation, Polytope, P3, REL_TOL};
use crate::irreducible::{self, OverlapTarget};
use crate::oracle::{self, Exec};
use crate::sum::Sum;
use crate::{Error, MomentResult, Provenance, Result};

/// A weighted combination of configuration moments.
pub type Mixture = Vec<(f64, &'static str)>;

/// `p · P_lhs = Σ w (X − P_lhs)` with each `X` a mixture.
#[derive(Debug, Clone)]
pub struct Equation {
    pub lhs: &'static str,
    pub terms: Vec<(f64, Mixture)>,
}

#[derive(Debug, Clone)]
pub struct ReductionSystem {
    pub solid: Solid,
    pub equations: Vec<Equation>,
}

fn eq(lhs: &'static str, terms: &[(f64, &[(f64, &'static str)])]) -> Equation {
    Equation { lhs, terms: terms.iter().map(|(w, m)| (*w, m.to_vec())).collect() }
}

impl ReductionSystem {
    pub fn for_solid(solid: Solid) -> Self {
        let phi = PHI;
        let (p2, s5) = (phi * phi, 5f64.sqrt());
        let equations = match solid {
            Solid::Tetrahedron => vec![
                eq("P33", &[(6.0, &[(1.0, "P32")])]),
                eq("P32", &[(3.0, &[(1.0, "P22")]), (2.0, &[(1.0, "P31")])]),
                eq("P22", &[(4.0, &[(1.0, "P21")])]),
                eq("P31", &[(3.0, &[(1.0, "P21")]), (1.0, &[(1.0, "P30")])]),
                eq("P21", &[(2.0, &[(1.0, "P11")]), (1.0, &[(1.0, "P20")])]),
                eq("P30", &[(3.0, &[(1.0, "P20")])]),
            ],
            Solid::Cube => vec![
                eq("P33", &[(6.0, &[(1.0, "P32")])]),
                eq("P32", &[(3.0, &[(2.0 / 3.0, "P22e"), (1.0 / 3.0, "P22r")]), (2.0, &[(1.0, "P31")])]),
                eq("P22e", &[(4.0, &[(0.5, "P21v"), (0.5, "P21r")])]),
                eq("P31", &[(3.0, &[(1.0 / 3.0, "P21v"), (2.0 / 3.0, "P21r")]), (1.0, &[(1.0, "P30")])]),
                eq("P21v", &[(2.0, &[(1.0, "P11")]), (1.0, &[(1.0, "P20")])]),
                eq("P30", &[(3.0, &[(1.0, "P20")])]),
            ],
            Solid::Octahedron => vec![
                eq("P33", &[(6.0, &[(1.0, "P32")])]),
                eq("P32", &[(3.0, &[(0.25, "P22e"), (0.25, "P22r"), (0.5, "P22v")]), (2.0, &[(1.0, "P31")])]),
                eq("P22e", &[(4.0, &[(1.0, "P21v")])]),
                eq("P22v", &[(4.0, &[(1.0, "P21r")])]),
                eq("P31", &[(3.0, &[(0.5, "P21v"), (0.5, "P21r")]), (1.0, &[(1.0, "P30")])]),
                eq("P21v", &[(2.0, &[(1.0, "P11")]), (1.0, &[(1.0, "P20")])]),
                eq("P30", &[(3.0, &[(1.0, "P20")])]),
            ],
            Solid::Icosahedron => {
                let p22: &[(f64, &str)] =
                    &[(0.4, "P22d"), (0.1, "P22r"), (0.2, "P22v"), (1.0 / (10.0 * p2), "P22e"), (p2 / 10.0, "P22i")];
                let p21: &[(f64, &str)] = &[
                    (phi / 5.0, "P21e"),
                    (1.0 / (2.0 * phi * s5), "P21f"),
                    (0.2, "P21r"),
                    (0.2, "P21d"),
                    (1.0 / (5.0 * p2), "P21v"),
                    (1.0 / (10.0 * phi), "P21w"),
                ];
                let p20: &[(f64, &str)] = &[(1.0 / (2.0 * p2), "P20f"), (1.0 / (2.0 * phi), "P20e"), (0.5, "P20r")];
                vec![
                    eq("P33", &[(6.0, &[(1.0, "P32")])]),
                    eq("P32", &[(3.0, p22), (2.0, &[(1.0, "P31")])]),
                    eq("P31", &[(3.0, p21), (1.0, &[(1.0, "P30")])]),
                    eq("P22e", &[(4.0, &[(1.0, "P21v")])]),
                    eq("P22v", &[(4.0, &[(1.0, "P21d")])]),
                    eq("P22d", &[(4.0, &[(0.5, "P21f"), (-phi / 2.0, "P21d"), (p2 / 2.0, "P21e")])]),
                    eq("P22i", &[(4.0, &[(p2, "P21r"), (-phi, "P21e")])]),
                    eq("P30", &[(3.0, p20)]),
                    eq("P21v", &[(2.0, &[(1.0, "P11d")]), (1.0, &[(1.0, ICOSA_P20U)])]),
                    eq("P21w", &[(2.0, &[(1.0, "P11f")]), (1.0, &[(1.0, ICOSA_P20L)])]),
                    eq("P21f", &[(2.0, &[(2.0, "P11t"), (-1.0, "P11f")]), (1.0, &[(phi, "P20r"), (-1.0 / phi, "P20f")])]),
                    eq("P21d", &[(2.0, &[(p2, "P11f"), (-phi, "P11d")]), (1.0, &[(p2, "P20e"), (-phi, "P20f")])]),
                    eq("P21e", &[(2.0, &[(p2, "P11g"), (-phi, "P11t")]), (1.0, &[(p2, "P20r"), (-phi, "P20e")])]),
                ]
            }
            Solid::Dodecahedron => {
                let p22: &[(f64, &str)] = &[(s5 / (6.0 * phi), "P22e"), (1.0 / 6.0, "P22r"), (phi * s5 / 6.0, "P22i")];
                let p21: &[(f64, &str)] = &[(1.0 / 3.0, "P21r"), (1.0 / 3.0, "P21d"), (phi / 6.0, "P21f"), (1.0 / (6.0 * p2), "P21v")];
                let p20: &[(f64, &str)] = &[(1.0 / (2.0 * p2), "P20e"), (1.0 / (2.0 * phi), "P20f"), (0.5, "P20r")];
                vec![
                    eq("P33", &[(6.0, &[(1.0, "P32")])]),
                    eq("P32", &[(3.0, p22), (2.0, &[(1.0, "P31")])]),
                    eq("P31", &[(3.0, p21), (1.0, &[(1.0, "P30")])]),
                    eq("P22e", &[(4.0, &[(1.0 / (phi * s5), "P21v"), (phi / s5, "P21d")])]),
                    eq("P22i", &[(4.0, &[(phi / s5, "P21f"), (phi / s5, "P21r"), (-1.0 / s5, "P21d")])]),
                    eq("P30", &[(3.0, p20)]),
                    eq("P21v", &[(1.0, &[(1.0, "P20e")]), (2.0, &[(2.0 / (phi * s5), "P11d"), (1.0 / s5, "P11f")])]),
                    eq("P21f", &[(2.0, &[(2.0 * phi / s5, "P11t"), (-1.0 / s5, "P11f")]), (1.0, &[(p2, "P20r"), (-phi, "P20f")])]),
                    eq(
                        "P21d",
                        &[(2.0, &[(phi / s5, "P11g"), (phi / s5, "P11f"), (-1.0 / s5, "P11d")]), (1.0, &[(p2, "P20f"), (-phi, "P20e")])],
                    ),
                ]
            }
        };
        Self { solid, equations }
    }

    pub fn unknowns(&self) -> Vec<&'static str> {
        self.equations.iter().map(|e| e.lhs).collect()
    }

    /// Tags that must be supplied from outside, in first-use order.
    pub fn irreducibles(&self) -> Vec<&'static str> {
        let unknowns = self.unknowns();
        let mut out = Vec::new();
        for e in &self.equations {
            for (_, m) in &e.terms {
                for &(_, t) in m {
                    if !unknowns.contains(&t) && !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Solves the raw system numerically (LU) at any real `p > −3`.
    pub fn solve(&self, p: f64, values: &HashMap<&str, f64>) -> Result<HashMap<&'static str, f64>> {
        let unknowns = self.unknowns();
        let n = unknowns.len();
        let index = |t: &str| unknowns.iter().position(|u| *u == t);
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for (r, e) in self.equations.iter().enumerate() {
            let total: f64 = e.terms.iter().map(|(w, _)| w).sum();
            a[(r, r)] += p + total;
            for (w, mix) in &e.terms {
                for &(c, t) in mix {
                    match index(t) {
                        Some(k) => a[(r, k)] -= w * c,
                        None => {
                            let v = values.get(t).ok_or_else(|| Error::MissingIrreducible(t.to_string()))?;
                            b[r] += w * c * v;
                        }
                    }
                }
            }
        }
        let x = a.lu().solve(&b).ok_or_else(|| Error::Input(format!("singular reduction system at p = {p}")))?;
        Ok(unknowns.into_iter().zip(x.iter().copied()).collect())
    }
}

// Vertex–face terms left unnamed in the raw icosahedron equations. The
// assignment is the only one among the three vertex classes for which the
// raw system reproduces the solved form.
const ICOSA_P20U: &str = "P20f";
const ICOSA_P20L: &str = "P20e";

fn need(values: &HashMap<&str, f64>, tag: &str) -> Result<f64> {
    values.get(tag).copied().ok_or_else(|| Error::MissingIrreducible(tag.to_string()))
}

/// `P33` from the solved form of the solid's reduction system.
pub fn solve_solid_system(solid: Solid, p: i32, values: &HashMap<&str, f64>) -> Result<f64> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    let pf = p as f64;
    let d2 = (5.0 + pf) * (6.0 + pf);
    let d3 = (4.0 + pf) * d2;
    let d4 = (3.0 + pf) * d3;
    assert!(d4 > 0.0);
    let v = |t: &str| need(values, t);
    let phi = PHI;
    let s5 = 5f64.sqrt();
    Ok(match solid {
        Solid::Tetrahedron => 72.0 * (3.0 * v("P11")? + 2.0 * v("P20")?) / d4,
        Solid::Cube => 72.0 * (v("P11")? + v("P20")?) / d4 + 48.0 * v("P21r")? / d3 + 6.0 * v("P22r")? / d2,
        Solid::Octahedron => 72.0 * (v("P20")? + v("P11")?) / d4 + 54.0 * v("P21r")? / d3 + 4.5 * v("P22r")? / d2,
        Solid::Icosahedron => {
            let (f2, f4, f8) = (phi.powi(2), phi.powi(4), phi.powi(8));
            let s = 12.0 * f2 * v("P11d")? - 12.0 * f4 * v("P11f")? + 4.0 * f8 * v("P11g")? + 12.0 * f2 * v("P11t")?
                - 6.0 * f4 * v("P20e")?
                + 4.0 * f8 * v("P20r")?
                + 6.0 * v("P20f")?;
            18.0 * s / (5.0 * f4 * d4) + 108.0 * f2 * v("P21r")? / (5.0 * d3) + 9.0 * v("P22r")? / (5.0 * d2)
        }
        Solid::Dodecahedron => {
            let s = 2.0 * s5 * v("P11d")? + 5.0 * phi * v("P20e")? + 2.0 * phi.powi(3) * v("P11g")?
                - 2.0 * phi.powi(4) * s5 * v("P11f")?
                - 5.0 * phi.powi(5) * v("P20f")?
                + 4.0 * s5 * phi.powi(6) * v("P20r")?
                + 2.0 * phi.powi(9) * v("P11t")?;
            12.0 * s / (phi.powi(4) * s5 * d4) + 60.0 * phi * v("P21r")? / (s5 * d3) + 3.0 * v("P22r")? / d2
        }
    })
}

fn pochhammer4(p: i32) -> f64 {
    let pf = p as f64;
    (3.0 + pf) * (4.0 + pf) * (5.0 + pf) * (6.0 + pf)
}

/// Opposite (vertex, face) index sets and opposite edge pairs of a tetrahedron.
const TET_EDGE_PAIRS: [([usize; 2], [usize; 2]); 3] = [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])];

/// Weights of the tetrahedron formula: `|F_i| h_i` per vertex and
/// `l l' h sin θ` per opposite edge pair. They equal `3V` and `6V`.
pub fn tetrahedron_weights(v: &[P3; 4]) -> ([f64; 4], [f64; 3]) {
    let vf = std::array::from_fn(|i| {
        let f: Vec<P3> = (0..4).filter(|&j| j != i).map(|j| v[j]).collect();
        let n = (f[1] - f[0]).cross(&(f[2] - f[0]));
        0.5 * (v[i] - f[0]).dot(&n).abs()
    });
    let ee = std::array::from_fn(|k| {
        let ([a, b], [c, d]) = TET_EDGE_PAIRS[k];
        let u = v[b] - v[a];
        let w = v[d] - v[c];
        let n = u.cross(&w);
        let sin = n.norm() / (u.norm() * w.norm());
        let h = (v[c] - v[a]).dot(&n).abs() / n.norm();
        u.norm() * w.norm() * h * sin
    });
    (vf, ee)
}

/// `L^(p)` in an arbitrary tetrahedron from its four vertex–face and three
/// skew edge–edge irreducibles.
pub fn tetrahedron_moment(v: &[P3; 4], p: i32) -> Result<f64> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    let tet = Polytope::tetrahedron(*v).map_err(|_| Error::Degenerate("degenerate tetrahedron".into()))?;
    let vol = tet.measure().map_err(|_| Error::Degenerate("degenerate tetrahedron".into()))?;
    if p == 0 {
        return Ok(1.0);
    }
    let (wv, we) = tetrahedron_weights(v);
    let mut acc = Sum::default();
    for i in 0..4 {
        let f: Vec<P3> = (0..4).filter(|&j| j != i).map(|j| v[j]).collect();
        let face = Polytope::polygon(f)?;
        acc.add(wv[i] * irreducible::point_polygon_moment(&face, v[i], p)?);
    }
    for (k, ([a, b], [c, d])) in TET_EDGE_PAIRS.iter().enumerate() {
        let e1 = Polytope::segment(v[*a], v[*b])?;
        let e2 = Polytope::segment(v[*c], v[*d])?;
        acc.add(we[k] * irreducible::skew_segments_moment(&e1, &e2, p)?);
    }
    Ok(12.0 / (vol * pochhammer4(p)) * acc.value())
}

/// Weights of the two-step body reduction
/// `P_KK = 2/((6+p)(5+p)) (Σ_{k<k'} w_kk' P_{F_k F_k'} + Σ_j w_j P_{K E_j})`.
#[derive(Debug, Clone)]
pub struct BasicWeights {
    /// `((k, k'), w)` for `k < k'`.
    pub face_pairs: Vec<((usize, usize), f64)>,
    /// `(edge vertex indices, w)`, edges in [`Polytope::edges`] order.
    pub body_edges: Vec<([usize; 2], f64)>,
    pub c: P3,
    pub face_points: Vec<P3>,
    pub edge_points: Vec<P3>,
}

impl BasicWeights {
    pub fn total(&self) -> f64 {
        self.face_pairs.iter().map(|x| x.1).chain(self.body_edges.iter().map(|x| x.1)).sum()
    }
}

/// Index of the side of face `f` running `a → b` (or `b → a`).
fn face_side_index(k: &Polytope, f: usize, a: usize, b: usize) -> usize {
    let cyc = &k.faces[f];
    let n = cyc.len();
    (0..n)
        .find(|&i| {
            let (x, y) = (cyc[i], cyc[(i + 1) % n]);
            (x == a && y == b) || (x == b && y == a)
        })
        .expect("edge lies on its face")
}

pub fn theorem_basic_weights(k: &Polytope, c: P3, ck: &[P3], dj: &[P3]) -> Result<BasicWeights> {
    if k.dim_intrinsic != 3 {
        return Err(Error::Input("body reduction needs a closed solid".into()));
    }
    let vol = k.measure()?;
    let edges = k.edges();
    if ck.len() != k.faces.len() || dj.len() != edges.len() {
        return Err(Error::Input(format!("need {} face points and {} edge points", k.faces.len(), edges.len())));
    }
    let faces: Vec<Polytope> = (0..k.faces.len()).map(|f| k.side_polytope(f)).collect();
    let tol = REL_TOL * k.diameter();
    for (f, x) in faces.iter().zip(ck) {
        let r = f.hull().residual(x).norm();
        if r > tol {
            return Err(Error::OffHull(r));
        }
    }
    for (&[a, b], x) in edges.iter().zip(dj) {
        let r = AffineHull::of_points(&[k.vertices[a], k.vertices[b]]).residual(x).norm();
        if r > tol {
            return Err(Error::OffHull(r));
        }
    }
    let h_c: Vec<f64> = (0..faces.len()).map(|f| k.side_height(f, &c)).collect();
    let area: Vec<f64> = (0..faces.len()).map(|f| k.face_area(f)).collect();
    let mut face_pairs = Vec::new();
    for f in 0..faces.len() {
        for g in f + 1..faces.len() {
            let w = area[f] * area[g] / (vol * vol) * (h_c[f] * k.side_height(g, &ck[f]) + h_c[g] * k.side_height(f, &ck[g]));
            face_pairs.push(((f, g), w));
        }
    }
    let mut body_edges = Vec::new();
    for ((&[a, b], (f1, f2)), d) in edges.iter().zip(k.edge_faces()).zip(dj) {
        let len = (k.vertices[b] - k.vertices[a]).norm();
        let side_h = |f: usize| {
            let i = face_side_index(k, f, a, b);
            let (x, n) = faces[f].side(i);
            // `d` lies on the edge line, so ⟨x − C_k, n⟩ = ⟨d − C_k, n⟩.
            debug_assert!(((x - d).dot(&n)).abs() <= 1e-6 * k.diameter());
            (d - ck[f]).dot(&n)
        };
        let w = len / vol * (h_c[f1] * side_h(f1) + h_c[f2] * side_h(f2));
        body_edges.push(([a, b], w));
    }
    Ok(BasicWeights { face_pairs, body_edges, c, face_points: ck.to_vec(), edge_points: dj.to_vec() })
}

/// Weights with `C` at the vertex centroid, `C_k` at face vertex centroids
/// and `D_j` at edge midpoints.
pub fn default_basic_weights(k: &Polytope) -> Result<BasicWeights> {
    let ck: Vec<P3> = (0..k.faces.len()).map(|f| k.side_polytope(f).vertex_centroid()).collect();
    let dj: Vec<P3> = k.edges().iter().map(|&[a, b]| 0.5 * (k.vertices[a] + k.vertices[b])).collect();
    theorem_basic_weights(k, k.vertex_centroid(), &ck, &dj)
}

/// Limits for [`general_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Maximum number of configuration pairs visited.
    pub max_terms: usize,
    /// Samples per Monte Carlo fallback.
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_terms: 2_000_000, mc_samples: 1_000_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Value {
    value: f64,
    /// Monte Carlo variance carried through the linear combination.
    var: f64,
    mc: bool,
}

impl Value {
    fn exact(value: f64) -> Self {
        Self { value, var: 0.0, mc: false }
    }
}

struct Engine<'a> {
    p: i32,
    budget: &'a Budget,
    terms: AtomicUsize,
}

/// Point of `A(a) ∩ A(b)` and an orthonormal basis of its directions.
fn hull_intersection(a: &AffineHull, b: &AffineHull, tol: f64) -> Option<(P3, Vec<P3>)> {
    let normal = |h: &AffineHull| {
        let mut m = Matrix3::identity();
        for v in &h.basis {
            m -= v * v.transpose();
        }
        m
    };
    let (na, nb) = (normal(a), normal(b));
    let m = na + nb;
    let rhs = na * a.origin + nb * b.origin;
    let svd = m.svd(true, true);
    let x0 = svd.solve(&rhs, 1e-10).ok()?;
    if a.residual(&x0).norm() > tol || b.residual(&x0).norm() > tol {
        return None;
    }
    let v_t = svd.v_t?;
    let dirs = (0..3).filter(|&i| svd.singular_values[i] < 1e-10).map(|i| v_t.row(i).transpose()).collect();
    Some((x0, dirs))
}

fn collinear_segments_moment(a: &Polytope, b: &Polytope, p: i32) -> f64 {
    let (a0, a1) = (a.vertices[0], a.vertices[1]);
    let u = (a1 - a0).normalize();
    let (x0, x1) = (0.0f64, (a1 - a0).dot(&u));
    let (y0, y1) = ((b.vertices[0] - a0).dot(&u), (b.vertices[1] - a0).dot(&u));
    // G'' = |x|^p with G(0) = 0.
    let g = |x: f64| -> f64 {
        let t = x.abs();
        if t == 0.0 {
            0.0
        } else if p == -1 {
            t * t.ln()
        } else {
            t.powi(p + 2) / ((p + 1) * (p + 2)) as f64
        }
    };
    let overlap = x0.max(y0.min(y1)) < x1.min(y0.max(y1));
    if p == -1 && overlap {
        return f64::INFINITY;
    }
    let v = g(x1 - y0) - g(x1 - y1) - g(x0 - y0) + g(x0 - y1);
    (v / ((x1 - x0) * (y1 - y0))).abs()
}

impl Engine<'_> {
    fn leaf_overlap(&self, a: &Polytope, b: &Polytope, path: u64) -> Result<Value> {
        let target = if b.dim_intrinsic == 2 {
            OverlapTarget::Face(b)
        } else {
            OverlapTarget::Edges(vec![(b.vertices[0], b.vertices[1])])
        };
        match irreducible::overlap_diagram_auto(a, &target) {
            Ok(d) => Ok(Value::exact(irreducible::overlap_moment_exact(&d, self.p))),
            Err(Error::Nonconvex) => {
                let seed = self.budget.seed ^ path.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let est = oracle::estimate_moment(a, b, self.p, self.budget.mc_samples, seed)?;
                Ok(Value { value: est.mean, var: est.stderr * est.stderr, mc: true })
            }
            Err(e) => Err(e),
        }
    }

    fn pair(&self, a: &Polytope, b: &Polytope, path: u64) -> Result<Value> {
        let visited = self.terms.fetch_add(1, Ordering::Relaxed) + 1;
        if visited > self.budget.max_terms {
            return Err(Error::BudgetExceeded(format!("more than {} configuration pairs", self.budget.max_terms)));
        }
        let (a, b) = if a.dim_intrinsic >= b.dim_intrinsic { (a, b) } else { (b, a) };
        let p = self.p;
        let rel = geom::affine_relation(a, b);
        let leaf = match (a.dim_intrinsic, b.dim_intrinsic, rel) {
            (0, 0, _) => Some(pow_half((a.vertices[0] - b.vertices[0]).norm_squared(), p)),
            (1, 0, _) => Some(irreducible::point_segment_moment(a, b.vertices[0], p)),
            (2, 0, AffineRelation::ParallelSeparated { .. }) => Some(irreducible::point_polygon_moment(a, b.vertices[0], p)?),
            (1, 1, AffineRelation::Skew) => Some(irreducible::skew_segments_moment(a, b, p)?),
            (1, 1, AffineRelation::ParallelSeparated { .. }) => Some(irreducible::parallel_segments_moment(a, b, p)),
            (1, 1, AffineRelation::IdenticalHull) => Some(collinear_segments_moment(a, b, p)),
            (2, 1 | 2, AffineRelation::ParallelSeparated { .. }) => return self.leaf_overlap(a, b, path),
            _ => None,
        };
        if let Some(v) = leaf {
            return Ok(Value::exact(v));
        }
        self.reduce(a, b, path)
    }

    /// One Crofton step about a point shared by both affine hulls.
    fn reduce(&self, a: &Polytope, b: &Polytope, path: u64) -> Result<Value> {
        let scale = a.diameter().max(b.diameter()).max((a.vertex_centroid() - b.vertex_centroid()).norm());
        let tol = REL_TOL * scale.max(1e-300);
        let (x0, dirs) = hull_intersection(&a.hull(), &b.hull(), tol)
            .ok_or_else(|| Error::Input("reduction needs intersecting affine hulls".into()))?;
        let in_s = |v: &P3| {
            let mut r = v - x0;
            for d in &dirs {
                r -= d * r.dot(d);
            }
            r.norm() <= tol
        };
        let c = match b.vertices.iter().chain(&a.vertices).find(|v| in_s(v)) {
            Some(v) => *v,
            None => {
                let t = 0.5 * (a.vertex_centroid() + b.vertex_centroid());
                let mut c = x0;
                for d in &dirs {
                    c += d * (t - x0).dot(d);
                }
                c
            }
        };
        let mut parts: Vec<(f64, Polytope, Polytope)> = Vec::new();
        for (x, y, swap) in [(a, b, false), (b, a, true)] {
            if x.dim_intrinsic == 0 {
                continue;
            }
            let vol = x.measure()?;
            for i in 0..x.side_count() {
                let w = x.side_measure(i) * x.side_height(i, &c) / vol;
                if w.abs() <= 1e-13 * scale.powi(1) {
                    continue;
                }
                let side = x.side_polytope(i);
                parts.push(if swap { (w, y.clone(), side) } else { (w, side, y.clone()) });
            }
        }
        let denom = (a.dim_intrinsic + b.dim_intrinsic) as f64 + self.p as f64;
        let mut acc = Sum::default();
        let mut var = 0.0;
        let mut mc = false;
        for (i, (w, x, y)) in parts.iter().enumerate() {
            let v = self.pair(x, y, path.wrapping_mul(131).wrapping_add(i as u64 + 1))?;
            acc.add(w * v.value);
            var += w * w * v.var;
            mc |= v.mc;
        }
        Ok(Value { value: acc.value() / denom, var: var / (denom * denom), mc })
    }
}

fn map_terms<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// `L^(p)` between two flat polytopes by recursive reduction.
pub fn pair_moment(a: &Polytope, b: &Polytope, p: i32, budget: &Budget) -> Result<MomentResult> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    if p == 0 {
        return Ok(MomentResult::closed_form(1.0));
    }
    let engine = Engine { p, budget, terms: AtomicUsize::new(0) };
    let v = engine.pair(a, b, 1)?;
    Ok(finish(v))
}

fn finish(v: Value) -> MomentResult {
    let mut provenance = vec![Provenance::ClosedForm];
    if v.mc {
        provenance.push(Provenance::MonteCarlo);
    }
    MomentResult { value: v.value, provenance, error: 4.0 * v.var.sqrt() }
}

/// `L^(p)` of a closed polyhedron, convex or not. Terms that reduce to
/// nonconvex parallel overlaps fall back to Monte Carlo; the reported error
/// is then four combined standard errors.
pub fn general_moment(k: &Polytope, p: i32, budget: &Budget) -> Result<MomentResult> {
    general_moment_with(k, p, budget, &default_basic_weights(k)?, Exec::default())
}

pub fn general_moment_with(k: &Polytope, p: i32, budget: &Budget, weights: &BasicWeights, exec: Exec) -> Result<MomentResult> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    if p == 0 {
        return Ok(MomentResult::closed_form(1.0));
    }
    let scale = k.diameter();
    let mut jobs: Vec<(f64, Polytope, Polytope)> = Vec::new();
    for &((f, g), w) in &weights.face_pairs {
        if w.abs() > 1e-13 * scale {
            jobs.push((w, k.side_polytope(f), k.side_polytope(g)));
        }
    }
    for &([a, b], w) in &weights.body_edges {
        if w.abs() > 1e-13 * scale {
            jobs.push((w, k.clone(), Polytope::segment(k.vertices[a], k.vertices[b])?));
        }
    }
    let engine = Engine { p, budget, terms: AtomicUsize::new(0) };
    let parts = map_terms(exec, jobs.len(), |i| engine.pair(&jobs[i].1, &jobs[i].2, 1000 + i as u64));
    let pf = p as f64;
    let factor = 2.0 / ((6.0 + pf) * (5.0 + pf));
    let mut acc = Sum::default();
    let mut var = 0.0;
    let mut mc = false;
    for ((w, _, _), part) in jobs.iter().zip(parts) {
        let v = part?;
        acc.add(w * v.value);
        var += w * w * v.var;
        mc |= v.mc;
    }
    Ok(finish(Value { value: factor * acc.value(), var: factor * factor * var, mc }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_zero_is_one_for_every_solved_form() {
        for s in Solid::ALL {
            let sys = ReductionSystem::for_solid(s);
            let ones: HashMap<&str, f64> = sys.irreducibles().into_iter().map(|t| (t, 1.0)).collect();
            assert!((solve_solid_system(s, 0, &ones).unwrap() - 1.0).abs() < 1e-12, "{s}");
            let raw = sys.solve(0.0, &ones).unwrap();
            assert!((raw["P33"] - 1.0).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn missing_irreducible_is_reported() {
        let err = solve_solid_system(Solid::Cube, 1, &HashMap::new()).unwrap_err();
        assert!(matches!(err, Error::MissingIrreducible(_)));
    }
}
