#![allow(dead_code)]

use std::f64::consts::PI;

use meandist::auxint;
use meandist::oracle::quad::{quad2d_with, Quad2dOptions, Triangle};

pub fn acoth(x: f64) -> f64 {
    (1.0 / x).atanh()
}

pub fn acot(x: f64) -> f64 {
    (1.0 / x).atan()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// One printed row of the auxiliary-integral table at p = 1.
pub struct AuxRow {
    pub label: &'static str,
    pub i: u32,
    pub j: u32,
    pub q: f64,
    pub gamma: f64,
    pub printed: f64,
}

pub fn aux_table() -> Vec<AuxRow> {
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    let ln3 = 3f64.ln();
    let r = |label, i, j, q, gamma, printed| AuxRow { label, i, j, q, gamma, printed };
    vec![
        r("I00(1, pi/4)", 0, 0, 1.0, PI / 4.0, 1.0 / (2.0 * s3) - PI / 36.0 + 2.0 / 3.0 * acoth(s3)),
        r("I00(sqrt2/2, pi/3)", 0, 0, s2 / 2.0, PI / 3.0, 0.25 - PI / 36.0 + 7.0 * acoth(s2) / (12.0 * s2)),
        r("I00(sqrt2/4, pi/3)", 0, 0, s2 / 4.0, PI / 3.0, 1.0 / (16.0 * s2) + PI / 18.0 + 25.0 * ln3 / (192.0 * s2) - acot(s2) / 3.0),
        r("I00(sqrt2/2, pi/4)", 0, 0, s2 / 2.0, PI / 4.0, 1.0 / (6.0 * s2) - PI / 12.0 + 7.0 * ln3 / (24.0 * s2) + acot(s2) / 3.0),
        r("I00(1/2, pi/5)", 0, 0, 0.5, PI / 5.0, s5 / 16.0 - 5.0 / 48.0 + PI / 60.0 - 13.0 * 5f64.ln() / 192.0 - acot(2.0) / 6.0 + 13.0 / 96.0 * 2f64.asinh()),
        r("I00(1/2, 2pi/5)", 0, 0, 0.5, 2.0 * PI / 5.0, s5 / 16.0 - 5.0 / 48.0 + PI / 20.0 - 13.0 * 5f64.ln() / 192.0 - acot(2.0) / 6.0 + 13.0 / 96.0 * 2f64.asinh()),
        r("I10(1, pi/4)", 1, 0, 1.0, PI / 4.0, s3 / 8.0 - s2.asinh() / (8.0 * s2) + 0.5 * acoth(s3)),
        r("I10(sqrt2/2, pi/3)", 1, 0, s2 / 2.0, PI / 3.0, 3.0 / (16.0 * s2) - s3 / 16.0 * s2.asinh() + 9.0 / 32.0 * acoth(s2)),
        r("I10(sqrt2/4, pi/3)", 1, 0, s2 / 4.0, PI / 3.0, 3.0 / 256.0 + 81.0 * ln3 / 1024.0 - s3 / 16.0 * acoth(s3)),
        r("I01(1, pi/4)", 0, 1, 1.0, PI / 4.0, -7.0 / (12.0 * s2) + 3.0 * s3 / 8.0 + s2.asinh() / (8.0 * s2) - acoth(s2) / 8.0),
        r("I01(sqrt2/2, pi/3)", 0, 1, s2 / 2.0, PI / 3.0, 3.0 / 8.0 * (1.5f64).sqrt() - s3 / 8.0 - acoth(s3) / 8.0 + s2.asinh() / 16.0),
        r("I11(1, pi/4)", 1, 1, 1.0, PI / 4.0, 1.0 / 30.0 - 4.0 * s2 / 15.0 + 3.0 * s3 / 10.0),
        r("I11(sqrt2/2, pi/3)", 1, 1, s2 / 2.0, PI / 3.0, 0.05 - 3.0 / 20.0 * (1.5f64).sqrt() + 3.0 * s3 / 20.0),
        r("I20(sqrt2/2, pi/3)", 2, 0, s2 / 2.0, PI / 3.0, 1.0 / 40.0 + 1.0 / (20.0 * s3) + PI / 180.0 + 13.0 * acoth(s2) / (120.0 * s2)),
        r("I20(sqrt2/4, pi/3)", 2, 0, s2 / 4.0, PI / 3.0, 1.0 / (20.0 * s3) - 29.0 / (640.0 * s2) - PI / 90.0 + 43.0 * ln3 / (7680.0 * s2) + acot(s2) / 15.0),
    ]
}

/// Adaptive quadrature of `x^i y^j (1 + x² + y²)^{p/2}` over the fundamental triangle.
pub fn aux_quadrature(p: i32, i: u32, j: u32, q: f64, gamma: f64) -> f64 {
    let t = Triangle([0.0, 0.0], [q, 0.0], [q, q * gamma.tan()]);
    let opts = Quad2dOptions { abs_tol: 1e-15, rel_tol: 1e-13, ..Default::default() };
    quad2d_with(move |x, y| x.powi(i as i32) * y.powi(j as i32) * (1.0 + x * x + y * y).powf(p as f64 / 2.0), &[t], opts)
        .expect("quadrature converges")
        .value
}

pub fn aux(p: i32, i: u32, j: u32, q: f64, gamma: f64) -> f64 {
    auxint::i(p, i, j, q, gamma).expect("supported arguments").value
}

/// Tolerances pinned by the acceptance criteria.
pub mod tol {
    pub const ROBBINS: f64 = 1e-8;
    pub const TABLES: f64 = 1e-8;
    pub const SECOND_MOMENT: f64 = 1e-12;
    pub const PRINTED: f64 = 1e-9;
    pub const AUX_ORACLE: f64 = 1e-10;
    pub const AUX_CLOSURE: f64 = 1e-11;
    pub const OVERLAP: f64 = 1e-6;
    pub const SIGMA: f64 = 4.0;
    pub const SCALING: f64 = 1e-10;
    pub const POLYGON_EXACT: f64 = 1e-12;
    pub const EVEN_CLOSED: f64 = 1e-9;
    pub const P_ZERO: f64 = 1e-12;
}

/// Random inputs shared by the property and acceptance suites.
pub mod fixtures {
    use meandist::catalog::{self, recipe, Solid};
    use meandist::geom::{Polytope, P3};
    use meandist::irreducible::{self, OverlapTarget};
    use meandist::oracle::mc;
    use meandist::polygon2d::{self, PolygonQuery};
    use meandist::reduction::{self, Budget};
    use meandist::Normalize;
    use nalgebra::{Rotation3, Vector3};
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn point(rng: &mut ChaCha8Rng, r: f64) -> P3 {
        P3::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
    }

    pub fn random_tetra(rng: &mut ChaCha8Rng) -> [P3; 4] {
        loop {
            let v: [P3; 4] = std::array::from_fn(|_| point(rng, 1.0));
            if Polytope::tetrahedron(v).and_then(|t| t.measure()).is_ok_and(|m| m > 0.02) {
                return v;
            }
        }
    }

    pub fn random_hull(rng: &mut ChaCha8Rng) -> Polytope {
        loop {
            let pts: Vec<P3> = (0..rng.random_range(6..14)).map(|_| point(rng, 1.0)).collect();
            if let Ok(k) = Polytope::convex_hull(&pts) {
                if k.dim_intrinsic == 3 && k.measure().is_ok_and(|m| m > 0.1) {
                    return k;
                }
            }
        }
    }

    /// A convex polygon in the plane `z = z0`.
    pub fn random_polygon(rng: &mut ChaCha8Rng, z0: f64) -> Polytope {
        let n = rng.random_range(3..8);
        let t0: f64 = rng.random_range(0.0..1.0);
        let mut angles: Vec<f64> = (0..n).map(|k| t0 + k as f64 * std::f64::consts::TAU / n as f64 + rng.random_range(0.0..0.5)).collect();
        angles.sort_by(f64::total_cmp);
        let r = rng.random_range(0.5..1.5);
        Polytope::polygon(angles.iter().map(|t| P3::new(r * t.cos(), r * t.sin(), z0)).collect()).unwrap()
    }

    pub fn random_skew_pair(rng: &mut ChaCha8Rng) -> (Polytope, Polytope) {
        loop {
            let a = Polytope::segment(point(rng, 1.0), point(rng, 1.0)).unwrap();
            let b = Polytope::segment(point(rng, 1.0), point(rng, 1.0)).unwrap();
            let (u, w) = (a.vertices[1] - a.vertices[0], b.vertices[1] - b.vertices[0]);
            let n = u.cross(&w);
            if n.norm() > 0.1 * u.norm() * w.norm() && (b.vertices[0] - a.vertices[0]).dot(&n).abs() > 0.1 * n.norm() {
                return (a, b);
            }
        }
    }

    pub fn moved(k: &Polytope, rot: &Rotation3<f64>, shift: P3, s: f64) -> Polytope {
        let vs: Vec<P3> = k.vertices.iter().map(|v| s * (rot * v) + shift).collect();
        match k.dim_intrinsic {
            0 => Polytope::point(vs[0]),
            1 => Polytope::segment(vs[0], vs[1]).unwrap(),
            2 => Polytope::polygon(vs).unwrap(),
            _ => Polytope::solid(vs, k.faces.clone()).unwrap(),
        }
    }

    pub fn random_motion(rng: &mut ChaCha8Rng) -> (Rotation3<f64>, P3) {
        let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0));
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), rng.random_range(0.0..6.0));
        (rot, point(rng, 3.0))
    }

    pub const NORMALIZATIONS: [Normalize; 3] = [Normalize::None, Normalize::UnitVolume, Normalize::UnitV1];

    /// Evaluates public moment path `which` at `p = 0` on a random input.
    pub fn p_zero(which: u32, rng: &mut ChaCha8Rng) -> (String, f64) {
        let solid = Solid::ALL[rng.random_range(0..Solid::ALL.len())];
        let norm = NORMALIZATIONS[rng.random_range(0..3)];
        let budget = Budget::default();
        match which {
            0 => (format!("platonic {solid} {norm:?}"), catalog::platonic_moment(solid.name(), 0, norm).unwrap().value),
            1 => (format!("ball {norm:?}"), catalog::ball_moment(0, norm).unwrap()),
            2 => ("tetrahedron".into(), reduction::tetrahedron_moment(&random_tetra(rng), 0).unwrap()),
            3 => ("general hull".into(), reduction::general_moment(&random_hull(rng), 0, &budget).unwrap().value),
            4 => {
                let (a, b) = random_skew_pair(rng);
                ("pair".into(), reduction::pair_moment(&a, &b, 0, &budget).unwrap().value)
            }
            5 => {
                let n = rng.random_range(3..40);
                (format!("polygon {n}"), polygon2d::polygon_moment(n, 0).unwrap())
            }
            6 => {
                let n = rng.random_range(3..40);
                (format!("unified polygon {n}"), polygon2d::polygon_moment_unified(n, 0).unwrap())
            }
            7 => {
                let n = rng.random_range(3..40);
                (format!("polygon query {n}"), PolygonQuery::new(n, 0).evaluate().unwrap())
            }
            8 => {
                let n = rng.random_range(3..40);
                let i = rng.random_range(1..n - 1);
                (format!("edge-vertex {n} {i}"), polygon2d::edge_vertex_moment(n, i, 0).unwrap())
            }
            9 => {
                let face = random_polygon(rng, 0.0);
                ("point-polygon".into(), irreducible::point_polygon_moment(&face, point(rng, 2.0) + P3::new(0.0, 0.0, 2.5), 0).unwrap())
            }
            10 => {
                let (a, b) = random_skew_pair(rng);
                ("skew segments".into(), irreducible::skew_segments_moment(&a, &b, 0).unwrap())
            }
            11 => {
                let r = recipe(solid);
                let ir = &r.irreducibles[rng.random_range(0..r.irreducibles.len())];
                (format!("{solid} {} expansion", ir.tag), ir.value(0))
            }
            12 => {
                let r = recipe(solid);
                let ir = &r.irreducibles[rng.random_range(0..r.irreducibles.len())];
                (format!("{solid} {} geometry", ir.tag), ir.config.moment(0).unwrap())
            }
            13 => {
                let r = recipe(solid);
                ("solved system".into(), reduction::solve_solid_system(solid, 0, &r.irreducible_values(0)).unwrap())
            }
            14 => {
                let a = random_polygon(rng, 0.0);
                let b = random_polygon(rng, 0.7);
                ("overlap".into(), irreducible::overlap_moment_numeric(&a, &OverlapTarget::Face(&b), 0).unwrap())
            }
            15 => {
                let k = random_hull(rng);
                ("monte carlo".into(), mc::estimate_moment(&k, &k, 0, 1000, rng.random()).unwrap().mean)
            }
            16 => {
                let (a, b) = random_skew_pair(rng);
                ("point-segment".into(), irreducible::point_segment_moment(&a, b.vertices[0], 0))
            }
            _ => unreachable!(),
        }
    }

    pub const P_ZERO_PATHS: u32 = 17;

    /// An L-shaped prism of height 1: volume 3 in a bounding box of volume 4.
    pub fn l_prism() -> Polytope {
        let base = [(1.0, 1.0), (1.0, 2.0), (0.0, 2.0), (0.0, 0.0), (2.0, 0.0), (2.0, 1.0)];
        let mut vs: Vec<P3> = base.iter().map(|&(x, y)| P3::new(x, y, 0.0)).collect();
        vs.extend(base.iter().map(|&(x, y)| P3::new(x, y, 1.0)));
        // Both caps start at the reflex corner, so fan triangulation stays inside.
        let mut faces = vec![vec![0, 5, 4, 3, 2, 1], (6..12).collect()];
        for i in 0..6 {
            let j = (i + 1) % 6;
            faces.push(vec![i, j, j + 6, i + 6]);
        }
        Polytope::solid(vs, faces).unwrap()
    }
}
