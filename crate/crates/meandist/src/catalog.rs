//! The five Platonic solids in the coordinates of the reduction pipelines,
//! their irreducible-term recipes and overlap diagrams, and reference
//! constants for the unit-volume and unit-V1 normalisations.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::{self, Polytope, P3};
use crate::irreducible::{self, FundamentalPiece, OverlapDiagram, OverlapTarget};
use crate::reduction;
use crate::{Error, MomentResult, Normalize, Provenance, Result};

pub const PHI: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solid {
    Tetrahedron,
    Cube,
    Octahedron,
    Icosahedron,
    Dodecahedron,
}

impl Solid {
    pub const ALL: [Solid; 5] = [Solid::Tetrahedron, Solid::Cube, Solid::Octahedron, Solid::Icosahedron, Solid::Dodecahedron];

    pub fn name(self) -> &'static str {
        match self {
            Solid::Tetrahedron => "tetrahedron",
            Solid::Cube => "cube",
            Solid::Octahedron => "octahedron",
            Solid::Icosahedron => "icosahedron",
            Solid::Dodecahedron => "dodecahedron",
        }
    }
}

impl fmt::Display for Solid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetrahedron" | "tetra" => Ok(Solid::Tetrahedron),
            "cube" | "hexahedron" => Ok(Solid::Cube),
            "octahedron" | "octa" => Ok(Solid::Octahedron),
            "icosahedron" | "icosa" => Ok(Solid::Icosahedron),
            "dodecahedron" | "dodeca" => Ok(Solid::Dodecahedron),
            _ => Err(Error::UnknownSolid(s.to_string())),
        }
    }
}

/// The concrete pair of domains behind an irreducible term.
#[derive(Debug, Clone)]
pub enum Config {
    PointPolygon { face: Polytope, point: P3 },
    SkewEdges(Polytope, Polytope),
    Faces(Polytope, Polytope),
    FaceEdges(Polytope, Vec<(P3, P3)>),
}

impl Config {
    /// Evaluates the configuration directly from its geometry: exactly for
    /// point–polygon and skew edges, by adaptive quadrature for overlaps.
    pub fn moment(&self, p: i32) -> Result<f64> {
        match self {
            Config::PointPolygon { face, point } => irreducible::point_polygon_moment(face, *point, p),
            Config::SkewEdges(a, b) => irreducible::skew_segments_moment(a, b, p),
            Config::Faces(a, b) => irreducible::overlap_moment_numeric(a, &OverlapTarget::Face(b), p),
            Config::FaceEdges(a, e) => irreducible::overlap_moment_numeric(a, &OverlapTarget::Edges(e.clone()), p),
        }
    }

    pub fn is_overlap(&self) -> bool {
        matches!(self, Config::Faces(..) | Config::FaceEdges(..))
    }
}

#[derive(Debug, Clone)]
pub struct Irreducible {
    pub tag: &'static str,
    pub expansion: OverlapDiagram,
    pub config: Config,
    /// Decimal printed next to the expansion at `p = 1`, where one is given.
    pub printed: Option<f64>,
}

impl Irreducible {
    pub fn value(&self, p: i32) -> f64 {
        irreducible::overlap_moment_exact(&self.expansion, p)
    }
}

#[derive(Debug, Clone)]
pub struct SolidRecipe {
    pub solid: Solid,
    pub polytope: Polytope,
    pub edge: f64,
    pub face_area: f64,
    pub volume: f64,
    pub irreducibles: Vec<Irreducible>,
    /// Printed mean distance `L_33` at the recipe's own scale.
    pub printed_l33: Option<f64>,
}

impl SolidRecipe {
    pub fn name(&self) -> &'static str {
        self.solid.name()
    }

    pub fn irreducible(&self, tag: &str) -> Option<&Irreducible> {
        self.irreducibles.iter().find(|r| r.tag == tag)
    }

    /// The parallel-overlap recipes.
    pub fn diagrams(&self) -> impl Iterator<Item = &Irreducible> {
        self.irreducibles.iter().filter(|r| r.config.is_overlap())
    }

    pub fn irreducible_values(&self, p: i32) -> HashMap<&'static str, f64> {
        self.irreducibles.iter().map(|r| (r.tag, r.value(p))).collect()
    }

    pub fn first_intrinsic_volume(&self) -> f64 {
        geom::first_intrinsic_volume(&self.polytope).expect("catalog solids are convex")
    }
}

fn v(x: f64, y: f64, z: f64) -> P3 {
    P3::new(x, y, z)
}

fn polygon(pts: &[P3]) -> Polytope {
    Polytope::polygon(pts.to_vec()).expect("catalog polygon")
}

fn segment(a: P3, b: P3) -> Polytope {
    Polytope::segment(a, b).expect("catalog segment")
}

fn edges_of(face: &Polytope) -> Vec<(P3, P3)> {
    let n = face.vertices.len();
    (0..n).map(|i| (face.vertices[i], face.vertices[(i + 1) % n])).collect()
}

fn negated(face: &Polytope) -> Polytope {
    polygon(&face.vertices.iter().map(|x| -x).collect::<Vec<_>>())
}

/// Cyclic permutations of `(a, b, c)` over all sign choices of nonzero entries.
fn cyclic_signed(a: f64, b: f64, c: f64) -> Vec<P3> {
    let mut out = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            for sc in [1.0, -1.0] {
                if (a == 0.0 && sa < 0.0) || (b == 0.0 && sb < 0.0) || (c == 0.0 && sc < 0.0) {
                    continue;
                }
                let (x, y, z) = (sa * a, sb * b, sc * c);
                out.push(v(x, y, z));
                out.push(v(z, x, y));
                out.push(v(y, z, x));
            }
        }
    }
    out
}

/// `fold · h^{2+p} / volA · Σ c I00(q, γ)` for a point–polygon term.
fn point_polygon(fold: u32, vol_a: f64, h: f64, terms: &[(f64, f64, f64)], meta: &str) -> OverlapDiagram {
    OverlapDiagram {
        fold,
        vol_a,
        vol_b: 1.0,
        pieces: terms.iter().map(|&(c, q, g)| FundamentalPiece::i00(c, q, g, h)).collect(),
        scale: 1.0,
        meta: meta.into(),
    }
}

fn piece(q: f64, gamma: f64, coeffs: [f64; 6], h: f64) -> FundamentalPiece {
    FundamentalPiece::new(1.0, q, gamma, coeffs, h)
}

/// Octahedron-type face/opposite-face-boundary diagram for opposite
/// triangular faces of edge `√2` at separation `h`.
pub fn triangle_edges_diagram(h: f64, scale: f64, meta: &str) -> OverlapDiagram {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    OverlapDiagram {
        fold: 6,
        vol_a: s3 / 2.0,
        vol_b: 3.0 * s2,
        pieces: vec![
            piece(s6 / (3.0 * h), PI / 3.0, [4.0 * s2 / 3.0, -1.0 / s3, -1.0, 0.0, 0.0, 0.0], h),
            piece(s6 / (6.0 * h), PI / 3.0, [-s2 / 3.0, 2.0 / s3, 0.0, 0.0, 0.0, 0.0], h),
        ],
        scale,
        meta: meta.into(),
    }
}

/// Octahedron-type opposite-faces diagram, same normalisation as
/// [`triangle_edges_diagram`].
pub fn triangle_faces_diagram(h: f64, scale: f64, meta: &str) -> OverlapDiagram {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    OverlapDiagram {
        fold: 6,
        vol_a: s3 / 2.0,
        vol_b: s3 / 2.0,
        pieces: vec![
            piece(s6 / (3.0 * h), PI / 3.0, [4.0 / (3.0 * s3), -s2 / 3.0, -(2.0f64 / 3.0).sqrt(), -1.0 / s3, 1.0, 0.0], h),
            piece(s6 / (6.0 * h), PI / 3.0, [-1.0 / (3.0 * s3), 2.0 * s2 / 3.0, 0.0, -2.0 / s3, 0.0, 0.0], h),
        ],
        scale,
        meta: meta.into(),
    }
}

fn tetrahedron() -> SolidRecipe {
    let [v1, v2, v3, v4] = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0), v(1.0, 1.0, 1.0)];
    let poly = Polytope::tetrahedron([v1, v2, v3, v4]).expect("tetrahedron");
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let l20 = Irreducible {
        tag: "P20",
        expansion: point_polygon(6, s3 / 2.0, 2.0 / s3, &[(1.0, s2 / 4.0, PI / 3.0)], "tetrahedron L20"),
        config: Config::PointPolygon { face: polygon(&[v1, v2, v3]), point: v4 },
        printed: None,
    };
    let l11 = Irreducible {
        tag: "P11",
        expansion: point_polygon(8, 2.0, 1.0, &[(1.0, s2 / 2.0, PI / 4.0)], "tetrahedron L11"),
        config: Config::SkewEdges(segment(v1, v2), segment(v3, v4)),
        printed: None,
    };
    SolidRecipe {
        solid: Solid::Tetrahedron,
        polytope: poly,
        edge: s2,
        face_area: s3 / 2.0,
        volume: 1.0 / 3.0,
        irreducibles: vec![l11, l20],
        printed_l33: None,
    }
}

fn cube() -> SolidRecipe {
    let pts: Vec<P3> = (0..8).map(|i| v((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect();
    let poly = Polytope::convex_hull(&pts).expect("cube");
    let bottom = polygon(&[v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(1.0, 1.0, 0.0), v(0.0, 1.0, 0.0)]);
    let top = polygon(&[v(0.0, 0.0, 1.0), v(1.0, 0.0, 1.0), v(1.0, 1.0, 1.0), v(0.0, 1.0, 1.0)]);
    let g = PI / 4.0;
    let l20 = point_polygon(2, 1.0, 1.0, &[(1.0, 1.0, g)], "cube L20");
    let mut l11 = l20.clone();
    l11.meta = "cube L11".into();
    let l21r = OverlapDiagram {
        fold: 8,
        vol_a: 1.0,
        vol_b: 4.0,
        pieces: vec![piece(1.0, g, [2.0, -1.0, -1.0, 0.0, 0.0, 0.0], 1.0)],
        scale: 1.0,
        meta: "cube L21r".into(),
    };
    let l22r = OverlapDiagram {
        fold: 8,
        vol_a: 1.0,
        vol_b: 1.0,
        pieces: vec![piece(1.0, g, [1.0, -1.0, -1.0, 0.0, 1.0, 0.0], 1.0)],
        scale: 1.0,
        meta: "cube L22r".into(),
    };
    SolidRecipe {
        solid: Solid::Cube,
        polytope: poly,
        edge: 1.0,
        face_area: 1.0,
        volume: 1.0,
        irreducibles: vec![
            Irreducible { tag: "P11", expansion: l11, config: Config::SkewEdges(segment(v(0.0, 0.0, 0.0), v(0.0, 1.0, 0.0)), segment(v(0.0, 1.0, 1.0), v(1.0, 1.0, 1.0))), printed: None },
            Irreducible { tag: "P20", expansion: l20, config: Config::PointPolygon { face: top.clone(), point: P3::zeros() }, printed: None },
            Irreducible { tag: "P21r", expansion: l21r, config: Config::FaceEdges(bottom.clone(), edges_of(&top)), printed: None },
            Irreducible { tag: "P22r", expansion: l22r, config: Config::Faces(bottom, top), printed: None },
        ],
        printed_l33: None,
    }
}

fn octahedron() -> SolidRecipe {
    let pts: Vec<P3> = cyclic_signed(1.0, 0.0, 0.0);
    let poly = Polytope::convex_hull(&pts).expect("octahedron");
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    let h = 2.0 / s3;
    let nu = s3 / 2.0;
    let lower = polygon(&[v(-1.0, 0.0, 0.0), v(0.0, -1.0, 0.0), v(0.0, 0.0, -1.0)]);
    let upper = negated(&lower);
    let l20 = point_polygon(2, nu, h, &[(1.0, s2 / 2.0, PI / 3.0), (-1.0, s2 / 4.0, PI / 3.0)], "octahedron L20");
    let l11 = point_polygon(1, s3, h, &[(4.0, s2 / 4.0, PI / 3.0), (2.0, s2 / 2.0, PI / 3.0)], "octahedron L11");
    SolidRecipe {
        solid: Solid::Octahedron,
        polytope: poly,
        edge: s2,
        face_area: nu,
        volume: 4.0 / 3.0,
        irreducibles: vec![
            Irreducible { tag: "P11", expansion: l11, config: Config::SkewEdges(segment(v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)), segment(v(0.0, 0.0, -1.0), v(0.0, -1.0, 0.0))), printed: None },
            Irreducible { tag: "P20", expansion: l20, config: Config::PointPolygon { face: lower.clone(), point: v(0.0, 0.0, 1.0) }, printed: None },
            Irreducible { tag: "P21r", expansion: triangle_edges_diagram(h, 1.0, "octahedron L21r"), config: Config::FaceEdges(lower.clone(), edges_of(&upper)), printed: None },
            Irreducible { tag: "P22r", expansion: triangle_faces_diagram(h, 1.0, "octahedron L22r"), config: Config::Faces(lower, upper), printed: None },
        ],
        printed_l33: None,
    }
}

fn icosahedron() -> SolidRecipe {
    let phi = PHI;
    let (s3, s5) = (3f64.sqrt(), 5f64.sqrt());
    let pts = cyclic_signed(phi, 1.0, 0.0);
    let poly = Polytope::convex_hull(&pts).expect("icosahedron");
    let p2 = phi * phi;
    let a_edge = segment(v(1.0, 0.0, phi), v(-1.0, 0.0, phi));
    let face = polygon(&[v(1.0, 0.0, phi), v(-1.0, 0.0, phi), v(0.0, phi, 1.0)]);
    let opposite = negated(&face);
    let coef = |terms: &[(f64, f64, f64)], vol: f64, h: f64, meta: &str| point_polygon(2, vol, h, terms, meta);
    let h_d = (2.0 + 2.0 / s5).sqrt();
    let l11d = coef(
        &[(2.0, 1.0 / (2.0 * p2), 2.0 * PI / 5.0), (-1.0, 0.5, PI / 5.0), (1.0, 0.5, 2.0 * PI / 5.0)],
        (10.0 - 2.0 * s5).sqrt(),
        h_d,
        "icosahedron L11d",
    );
    let l11g = coef(&[(2.0, 1.0 / (2.0 * p2), PI / 3.0), (1.0, 1.0 / p2, PI / 3.0)], 2.0 * s3, (14.0 / 3.0 + 2.0 * s5).sqrt(), "icosahedron L11g");
    let l11f = coef(
        &[(1.0, 1.0 / phi, p2.atan()), (1.0, phi, (1.0 / p2).atan()), (-1.0, 1.0 / p2, phi.atan()), (-1.0, 1.0 / phi, (1.0 / phi).atan())],
        4.0,
        phi,
        "icosahedron L11f",
    );
    let l11t = coef(
        &[(1.0, 0.5, PI / 5.0), (-1.0, 0.5, 2.0 * PI / 5.0), (1.0, phi, PI / 5.0)],
        (2.0 * (5.0 + s5)).sqrt(),
        h_d,
        "icosahedron L11t",
    );
    let s15 = 15f64.sqrt();
    let l20e = coef(
        &[(1.0, 1.0 / (2.0 * p2), PI / 3.0), (-1.0, 1.0 / (2.0 * p2), (s15 + 2.0 * s3).atan()), (1.0, p2 / 2.0, (s15 - 2.0 * s3).atan())],
        s3,
        2.0 * phi / s3,
        "icosahedron L20e",
    );
    let l20r = coef(&[(1.0, 1.0 / p2, PI / 3.0), (-1.0, 1.0 / (2.0 * p2), PI / 3.0)], s3, 2.0 * p2 / s3, "icosahedron L20r");
    let l20f = coef(
        &[(1.0, p2 / 2.0, PI / 3.0), (-1.0, s5 / 2.0, (3.0f64 / 5.0).sqrt().atan()), (-1.0, p2 / 2.0, (s15 - 2.0 * s3).atan())],
        s3,
        2.0 / s3,
        "icosahedron L20f",
    );
    // Opposite faces have edge 2 = √2 × the octahedron's, so the octahedron
    // diagrams apply at separation h/√2 with an overall factor √2^p.
    let s2 = 2f64.sqrt();
    let h_r = s2 * p2 / s3;
    let l21r = triangle_edges_diagram(h_r, s2, "icosahedron L21r");
    let l22r = triangle_faces_diagram(h_r, s2, "icosahedron L22r");
    let ir = |tag, expansion, config, printed| Irreducible { tag, expansion, config, printed: Some(printed) };
    SolidRecipe {
        solid: Solid::Icosahedron,
        polytope: poly,
        edge: 2.0,
        face_area: s3,
        volume: 10.0 * (3.0 + s5) / 3.0,
        irreducibles: vec![
            ir("P11d", l11d, Config::SkewEdges(a_edge.clone(), segment(v(0.0, phi, 1.0), v(phi, 1.0, 0.0))), 2.0431430525135),
            ir("P11g", l11g, Config::SkewEdges(a_edge.clone(), segment(v(1.0, 0.0, -phi), v(0.0, phi, -1.0))), 3.1806727116118),
            ir("P11f", l11f, Config::SkewEdges(a_edge.clone(), segment(v(phi, 1.0, 0.0), v(phi, -1.0, 0.0))), 2.3977565034445),
            ir("P11t", l11t, Config::SkewEdges(a_edge, segment(v(1.0, 0.0, -phi), v(phi, 1.0, 0.0))), 2.8940519649490),
            ir("P20e", l20e, Config::PointPolygon { face: face.clone(), point: v(phi, -1.0, 0.0) }, 2.688729552544),
            ir("P20r", l20r, Config::PointPolygon { face: face.clone(), point: v(1.0, 0.0, -phi) }, 3.28394367574),
            ir("P20f", l20f, Config::PointPolygon { face: face.clone(), point: v(phi, 1.0, 0.0) }, 2.2472771159735),
            ir("P21r", l21r, Config::FaceEdges(face.clone(), edges_of(&opposite)), 3.1819213671057),
            ir("P22r", l22r, Config::Faces(face, opposite), 3.12998447304770),
        ],
        printed_l33: Some(1.66353152568500),
    }
}

fn dodecahedron() -> SolidRecipe {
    let phi = PHI;
    let (p2, p4) = (phi * phi, phi.powi(4));
    let (s3, s5) = (3f64.sqrt(), 5f64.sqrt());
    let mut pts = cyclic_signed(0.0, p2, 1.0);
    for i in 0..8 {
        let s = |b: usize| if i >> b & 1 == 1 { -phi } else { phi };
        pts.push(v(s(0), s(1), s(2)));
    }
    let poly = Polytope::convex_hull(&pts).expect("dodecahedron");
    let nu = (5.0 * (5.0 + 2.0 * s5)).sqrt();
    let h_far = (10.0 + 22.0 / s5).sqrt();
    let (g1, g2) = (PI / 5.0, 2.0 * PI / 5.0);
    let a_edge = segment(v(0.0, p2, 1.0), v(0.0, p2, -1.0));
    let face = polygon(&[v(1.0, 0.0, -p2), v(phi, phi, -phi), v(0.0, p2, -1.0), v(-phi, phi, -phi), v(-1.0, 0.0, -p2)]);
    let opposite = negated(&face);
    let coef = |terms: &[(f64, f64, f64)], vol: f64, h: f64, meta: &str| point_polygon(2, vol, h, terms, meta);
    let l11d = coef(
        &[
            (1.0, 1.0 / (2.0 * p2), PI / 3.0),
            (1.0, s5 / 2.0, PI / 3.0),
            (-1.0, 1.0 / (2.0 * p2), (s3 * (2.0 + s5)).atan()),
            (-1.0, s5 / 2.0, (3.0f64 / 5.0).sqrt().atan()),
        ],
        2.0 * s3,
        2.0 * phi / s3,
        "dodecahedron L11d",
    );
    let l11g = coef(
        &[(2.0, 1.0 / (2.0 * p4), g2), (-1.0, 1.0 / (2.0 * p2), g1), (1.0, 1.0 / (2.0 * p2), g2)],
        (10.0 - 2.0 * s5).sqrt(),
        h_far,
        "dodecahedron L11g",
    );
    let l11f = coef(
        &[
            (1.0, 1.0 / p2, (s5 * phi).atan()),
            (1.0, s5 / phi, (1.0 / (s5 * phi)).atan()),
            (-1.0, 1.0 / p2, phi.atan()),
            (-1.0, 1.0 / phi, (1.0 / phi).atan()),
        ],
        4.0,
        p2,
        "dodecahedron L11f",
    );
    let l11t = coef(
        &[(1.0, 1.0 / phi, g1), (1.0, 1.0 / (2.0 * p2), g1), (-1.0, 1.0 / (2.0 * p2), g2)],
        (2.0 * (5.0 + s5)).sqrt(),
        h_far,
        "dodecahedron L11t",
    );
    let l20e = coef(
        &[
            (1.0, 0.5, g1),
            (-1.0, 0.5, g2),
            (-1.0, p2 / 2.0, g1),
            (1.0, 3.0 * phi / 2.0, ((5.0 - 2.0 * s5).sqrt() / 3.0).atan()),
            (1.0, p2 / 2.0, (5.0 * (5.0 - 2.0 * s5)).sqrt().atan()),
        ],
        nu,
        (2.0 + 2.0 / s5).sqrt(),
        "dodecahedron L20e",
    );
    let l20r = coef(
        &[(1.0, 1.0 / phi, g1), (1.0, 1.0 / (2.0 * p2), g2), (-1.0, 1.0 / (2.0 * p2), g1), (-1.0, 1.0 / (2.0 * p4), g2)],
        nu,
        h_far,
        "dodecahedron L20r",
    );
    let l20f = coef(
        &[
            (1.0, p2 / 2.0, g1),
            (-1.0, 1.0 / (2.0 * p2), g2),
            (1.0, 1.0 / (2.0 * p2), (5.0 * (5.0 + 2.0 * s5)).sqrt().atan()),
            (-1.0, 0.5, g1),
            (-1.0, p2 / 2.0, (85.0 - 38.0 * s5).sqrt().atan()),
        ],
        nu,
        2.0 * (1.0 + 2.0 / s5).sqrt(),
        "dodecahedron L20f",
    );
    let h = h_far;
    let (q4, q2, q1) = (1.0 / (2.0 * p4), 1.0 / (2.0 * p2), 1.0 / phi);
    let i00 = |c: f64| [c, 0.0, 0.0, 0.0, 0.0, 0.0];
    let l22r = OverlapDiagram {
        fold: 10,
        vol_a: nu,
        vol_b: nu,
        pieces: vec![
            piece(q2, g1, i00(0.4 * (5.0 + 2.0 * s5).sqrt()), h),
            piece(q2, g2, i00(-0.4 * (5.0 + 2.0 * s5).sqrt()), h),
            piece(q4, g2, i00(-0.4 * (5.0 - 2.0 * s5).sqrt()), h),
            piece(q1, g1, [0.8 * (50.0 + 22.0 * s5).sqrt(), -(4.0 / s5 + 2.0), -2.0 * ((5.0 + 2.0 * s5) / 5.0).sqrt(), (1.0 - 2.0 / s5).sqrt(), 1.0, 0.0], h),
            piece(q4, g2, [0.0, 4.0 / s5, 0.0, -2.0 * (1.0 + 2.0 / s5).sqrt(), 0.0, 0.0], h),
            piece(q2, g1, [0.0, -(2.0 / s5 + 2.0), 0.0, (2.0 + 2.0 / s5).sqrt(), 0.0, 0.0], h),
            piece(q2, g2, [0.0, 2.0 / s5 + 2.0, 0.0, -(2.0 + 2.0 / s5).sqrt(), 0.0, 0.0], h),
        ],
        scale: 1.0,
        meta: "dodecahedron L22r".into(),
    };
    let l21r = OverlapDiagram {
        fold: 10,
        vol_a: nu,
        vol_b: 10.0,
        pieces: vec![
            piece(q4, g2, [4.0 / s5 - 2.0, 2.0 * (1.0 - 2.0 / s5).sqrt(), 0.0, 0.0, 0.0, 0.0], h),
            piece(q2, g1, [2.0 / s5, -(2.0 - 2.0 / s5).sqrt(), 0.0, 0.0, 0.0, 0.0], h),
            piece(q2, g2, [-2.0 / s5, (2.0 - 2.0 / s5).sqrt(), 0.0, 0.0, 0.0, 0.0], h),
            piece(q1, g1, [0.8 * (5.0 + s5), -(1.0 + 2.0 / s5).sqrt(), -1.0, 0.0, 0.0, 0.0], h),
        ],
        scale: 1.0,
        meta: "dodecahedron L21r".into(),
    };
    let ir = |tag, expansion, config, printed| Irreducible { tag, expansion, config, printed: Some(printed) };
    SolidRecipe {
        solid: Solid::Dodecahedron,
        polytope: poly,
        edge: 2.0,
        face_area: nu,
        volume: 30.0 + 14.0 * s5,
        irreducibles: vec![
            ir("P11d", l11d, Config::SkewEdges(a_edge.clone(), segment(v(phi, phi, -phi), v(1.0, 0.0, -p2))), 3.1367199950978),
            ir("P11g", l11g, Config::SkewEdges(a_edge.clone(), segment(v(phi, -phi, phi), v(p2, -1.0, 0.0))), 4.60478605392525),
            ir("P11f", l11f, Config::SkewEdges(a_edge.clone(), segment(v(1.0, 0.0, -p2), v(-1.0, 0.0, -p2))), 3.770095521642),
            ir("P11t", l11t, Config::SkewEdges(a_edge, segment(v(phi, -phi, -phi), v(0.0, -p2, -1.0))), 5.04162416571318),
            ir("P20e", l20e, Config::PointPolygon { face: face.clone(), point: v(0.0, p2, 1.0) }, 3.346942678627),
            ir("P20r", l20r, Config::PointPolygon { face: face.clone(), point: v(0.0, -p2, 1.0) }, 4.87605984948),
            ir("P20f", l20f, Config::PointPolygon { face: face.clone(), point: v(0.0, -p2, -1.0) }, 4.000363965317),
            ir("P21r", l21r, Config::FaceEdges(face.clone(), edges_of(&opposite)), 4.808558828667),
            ir("P22r", l22r, Config::Faces(face, opposite), 4.69357209587),
        ],
        printed_l33: Some(2.533488631644),
    }
}

pub fn recipe(solid: Solid) -> SolidRecipe {
    match solid {
        Solid::Tetrahedron => tetrahedron(),
        Solid::Cube => cube(),
        Solid::Octahedron => octahedron(),
        Solid::Icosahedron => icosahedron(),
        Solid::Dodecahedron => dodecahedron(),
    }
}

pub fn get_recipe(name: &str) -> Result<SolidRecipe> {
    Ok(recipe(name.parse()?))
}

/// Rescales a raw moment of a body with volume `vol` and first intrinsic
/// volume `v1` to the requested normalisation.
pub fn normalize_moment(value: f64, p: i32, vol: f64, v1: f64, normalize: Normalize) -> f64 {
    match normalize {
        Normalize::None => value,
        Normalize::UnitVolume => value / vol.powf(p as f64 / 3.0),
        Normalize::UnitV1 => value / v1.powi(p),
    }
}

/// `L^(p)` of a Platonic solid through its reduction system.
pub fn platonic_moment(name: &str, p: i32, normalize: Normalize) -> Result<MomentResult> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    let r = get_recipe(name)?;
    let raw = reduction::solve_solid_system(r.solid, p, &r.irreducible_values(p))?;
    let v1 = if normalize == Normalize::UnitV1 { r.first_intrinsic_volume() } else { 1.0 };
    let value = normalize_moment(raw, p, r.volume, v1, normalize);
    Ok(MomentResult { value, provenance: vec![Provenance::ClosedForm], error: 0.0 })
}

/// `L^(p)` of the unit ball, `72 · 2^p / ((3+p)(4+p)(6+p))`, rescaled.
pub fn ball_moment(p: i32, normalize: Normalize) -> Result<f64> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    let pf = p as f64;
    let raw = 72.0 * 2f64.powi(p) / ((3.0 + pf) * (4.0 + pf) * (6.0 + pf));
    Ok(normalize_moment(raw, p, 4.0 * PI / 3.0, 4.0, normalize))
}

/// Reference values for the unit-volume and unit-V1 normalisations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceConstants {
    /// Mean distance in solids of unit volume.
    pub unit_volume: Vec<(String, f64)>,
    /// `V1 / l` for unit edge length.
    pub v1_per_edge: Vec<(String, f64)>,
    /// `vol / l³` for unit edge length.
    pub volume_per_edge: Vec<(String, f64)>,
    /// Normalised mean distance `Γ = L / V1`.
    pub normalised: Vec<(String, f64)>,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
}

pub fn reference() -> ReferenceConstants {
    let s5 = 5f64.sqrt();
    let named = |xs: &[(&str, f64)]| xs.iter().map(|(n, x)| (n.to_string(), *x)).collect();
    ReferenceConstants {
        unit_volume: named(&[
            ("ball", 0.63807479),
            ("icosahedron", 0.64131249),
            ("dodecahedron", 0.64252068),
            ("octahedron", 0.65853073),
            ("cube", 0.66170718),
            ("tetrahedron", 0.72946242),
        ]),
        v1_per_edge: named(&[
            ("tetrahedron", 3.0 * (-1.0f64 / 3.0).acos() / PI),
            ("cube", 3.0),
            ("octahedron", 6.0 * (1.0f64 / 3.0).acos() / PI),
            ("dodecahedron", 15.0 * 2f64.atan() / PI),
            ("icosahedron", 15.0 * (2.0f64 / 3.0).asin() / PI),
        ]),
        volume_per_edge: named(&[
            ("tetrahedron", 2f64.sqrt() / 12.0),
            ("cube", 1.0),
            ("octahedron", 2f64.sqrt() / 3.0),
            ("dodecahedron", (15.0 + 7.0 * s5) / 4.0),
            ("icosahedron", 5.0 * (3.0 + s5) / 12.0),
        ]),
        normalised: named(&[
            ("tetrahedron", 0.19601928),
            ("octahedron", 0.21800285),
            ("cube", 0.22056906),
            ("icosahedron", 0.23872552),
            ("dodecahedron", 0.23963024),
            ("ball", 0.25714286),
        ]),
        gamma_lower: 5.0 / 28.0,
        gamma_upper: 1.0 / 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Solid::ALL {
            assert_eq!(s.name().parse::<Solid>().unwrap(), s);
        }
        assert!(matches!(get_recipe("unknown"), Err(Error::UnknownSolid(_))));
    }

    #[test]
    fn stored_volumes_match_geometry() {
        for s in Solid::ALL {
            let r = recipe(s);
            let m = r.polytope.measure().unwrap();
            assert!((m - r.volume).abs() < 1e-12 * r.volume, "{s}: {m} vs {}", r.volume);
            assert!((r.polytope.face_area(0) - r.face_area).abs() < 1e-12 * r.face_area, "{s}");
        }
    }
}
