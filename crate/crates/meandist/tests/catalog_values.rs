mod common;

use std::collections::HashMap;

use common::*;
use meandist::catalog::{self, recipe, triangle_faces_diagram, triangle_edges_diagram, Solid, PHI};
use meandist::geom::{first_intrinsic_volume, Polytope, P3};
use meandist::irreducible::overlap_moment_exact;
use meandist::oracle;
use meandist::reduction::{self, solve_solid_system, tetrahedron_weights, ReductionSystem};
use meandist::Normalize;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn robbins_constant() {
    let v = catalog::platonic_moment("cube", 1, Normalize::None).unwrap().value;
    assert!((v - 0.66170718).abs() < tol::ROBBINS);
}

#[test]
fn printed_intermediate_decimals() {
    let mut n = 0;
    for s in [Solid::Icosahedron, Solid::Dodecahedron] {
        let r = recipe(s);
        for ir in &r.irreducibles {
            let printed = ir.printed.expect("every icosahedron and dodecahedron term has a printed value");
            let v = ir.value(1);
            assert!((v - printed).abs() < tol::PRINTED, "{s} {}: {v} vs {printed}", ir.tag);
            n += 1;
        }
        let l33 = catalog::platonic_moment(s.name(), 1, Normalize::None).unwrap().value;
        let printed = r.printed_l33.unwrap();
        assert!((l33 - printed).abs() < tol::PRINTED, "{s} L33: {l33} vs {printed}");
        n += 1;
    }
    assert_eq!(n, 20);
}

#[test]
fn unit_volume_table() {
    for (name, want) in catalog::reference().unit_volume {
        let v = if name == "ball" {
            catalog::ball_moment(1, Normalize::UnitVolume).unwrap()
        } else {
            catalog::platonic_moment(&name, 1, Normalize::UnitVolume).unwrap().value
        };
        assert!((v - want).abs() < tol::TABLES, "{name}: {v} vs {want}");
    }
}

#[test]
fn dodecahedron_inline_decimal_is_not_reproduced() {
    let v = catalog::platonic_moment("dodecahedron", 1, Normalize::UnitVolume).unwrap().value;
    assert!((v - 0.65853073).abs() > 1e-2);
}

#[test]
fn normalised_table_and_bounds() {
    let refs = catalog::reference();
    for (name, want) in &refs.normalised {
        let v = if name == "ball" {
            catalog::ball_moment(1, Normalize::UnitV1).unwrap()
        } else {
            catalog::platonic_moment(name, 1, Normalize::UnitV1).unwrap().value
        };
        assert!((v - want).abs() < tol::TABLES, "{name}: {v} vs {want}");
        assert!(refs.gamma_lower < v && v < refs.gamma_upper, "{name}: {v}");
    }
}

#[test]
fn first_intrinsic_volume_per_edge() {
    let refs = catalog::reference();
    for s in Solid::ALL {
        let r = recipe(s);
        let want = refs.v1_per_edge.iter().find(|(n, _)| n == s.name()).unwrap().1;
        assert!(rel(r.first_intrinsic_volume() / r.edge, want) < 1e-12, "{s}");
    }
    // The edge-angle formula gives 3 for the unit cube, not the tabulated 6.
    let cube = recipe(Solid::Cube);
    assert!((cube.first_intrinsic_volume() / cube.edge - 3.0).abs() < 1e-12);
}

#[test]
fn second_moments() {
    let tet = catalog::platonic_moment("tetrahedron", 2, Normalize::UnitVolume).unwrap().value;
    let want = 9.0 / (10.0 * 3f64.cbrt());
    assert!((tet - want).abs() < tol::SECOND_MOMENT, "{tet} vs {want}");
    let cube = catalog::platonic_moment("cube", 2, Normalize::UnitVolume).unwrap().value;
    assert!((cube - 0.5).abs() < tol::SECOND_MOMENT, "{cube}");
}

#[test]
fn even_moments_match_polynomial_integration() {
    for s in Solid::ALL {
        let r = recipe(s);
        let v = catalog::platonic_moment(s.name(), 2, Normalize::None).unwrap().value;
        let exact = oracle::second_moment(&r.polytope, &r.polytope);
        assert!(rel(v, exact) < 1e-11, "{s}: {v} vs {exact}");
    }
}

#[test]
fn overlap_exact_vs_numeric() {
    let mut n = 0;
    for s in [Solid::Cube, Solid::Octahedron, Solid::Icosahedron, Solid::Dodecahedron] {
        for ir in recipe(s).diagrams() {
            for p in [1, 2] {
                let exact = ir.value(p);
                let numeric = ir.config.moment(p).unwrap();
                assert!((exact - numeric).abs() < tol::OVERLAP, "{s} {} p={p}: {exact} vs {numeric}", ir.tag);
            }
            n += 1;
        }
    }
    assert_eq!(n, 8);
}

#[test]
fn icosahedron_overlaps_are_octahedron_diagrams() {
    let icosa = recipe(Solid::Icosahedron);
    let h = 2f64.sqrt() * PHI * PHI / 3f64.sqrt();
    for p in [-1, 1, 2, 3] {
        let s = 2f64.sqrt().powi(p);
        let faces = overlap_moment_exact(&triangle_faces_diagram(h, 1.0, "octahedron form"), p) * s;
        let edges = overlap_moment_exact(&triangle_edges_diagram(h, 1.0, "octahedron form"), p) * s;
        assert!(rel(icosa.irreducible("P22r").unwrap().value(p), faces) < 1e-12, "p={p}");
        assert!(rel(icosa.irreducible("P21r").unwrap().value(p), edges) < 1e-12, "p={p}");
    }
    // At unit scale and separation 2/√3 they are the octahedron's own terms.
    let octa = recipe(Solid::Octahedron);
    let h = 2.0 / 3f64.sqrt();
    for p in [-1, 1, 2, 3] {
        let faces = overlap_moment_exact(&triangle_faces_diagram(h, 1.0, "octahedron form"), p);
        let edges = overlap_moment_exact(&triangle_edges_diagram(h, 1.0, "octahedron form"), p);
        assert!(rel(octa.irreducible("P22r").unwrap().value(p), faces) < 1e-12, "p={p}");
        assert!(rel(octa.irreducible("P21r").unwrap().value(p), edges) < 1e-12, "p={p}");
    }
}

#[test]
fn every_irreducible_matches_its_geometry() {
    for s in Solid::ALL {
        for ir in &recipe(s).irreducibles {
            if ir.config.is_overlap() {
                continue;
            }
            for p in [-1, 1, 2, 3] {
                let (a, b) = (ir.value(p), ir.config.moment(p).unwrap());
                assert!(rel(a, b) < 1e-11, "{s} {} p={p}: {a} vs {b}", ir.tag);
            }
        }
    }
}

#[test]
fn solved_forms_match_raw_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in Solid::ALL {
        let sys = ReductionSystem::for_solid(s);
        for _ in 0..5 {
            let p = rng.random_range(-1..=12);
            let values: HashMap<&str, f64> = sys.irreducibles().into_iter().map(|t| (t, rng.random_range(0.5..2.0))).collect();
            let raw = sys.solve(p as f64, &values).unwrap()["P33"];
            let solved = solve_solid_system(s, p, &values).unwrap();
            assert!(rel(raw, solved) < 1e-11, "{s} p={p}: {raw} vs {solved}");
        }
    }
}

#[test]
fn tetrahedron_weights_are_volume_multiples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let v: [P3; 4] = std::array::from_fn(|_| P3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let vol = Polytope::tetrahedron(v).unwrap().measure().unwrap();
        let (wv, we) = tetrahedron_weights(&v);
        for w in wv {
            assert!(rel(w, 3.0 * vol) < 1e-9);
        }
        for w in we {
            assert!(rel(w, 6.0 * vol) < 1e-9);
        }
    }
}

#[test]
fn regular_tetrahedron_agrees_with_catalog() {
    let r = recipe(Solid::Tetrahedron);
    let v: [P3; 4] = r.polytope.vertices.clone().try_into().unwrap();
    for p in [-1, 1, 2, 3] {
        let a = reduction::tetrahedron_moment(&v, p).unwrap();
        let b = catalog::platonic_moment("tetrahedron", p, Normalize::None).unwrap().value;
        assert!(rel(a, b) < 1e-12, "p={p}");
    }
}

#[test]
fn general_reduction_reproduces_catalog() {
    for s in Solid::ALL {
        let r = recipe(s);
        for p in [-1, 1, 3] {
            let g = reduction::general_moment(&r.polytope, p, &reduction::Budget::default()).unwrap();
            let c = catalog::platonic_moment(s.name(), p, Normalize::None).unwrap().value;
            assert!(rel(g.value, c) < 1e-9, "{s} p={p}: {} vs {c}", g.value);
        }
    }
}

#[test]
fn octahedron_vertices_are_the_six_unit_vectors() {
    let r = recipe(Solid::Octahedron);
    assert_eq!(r.polytope.vertices.len(), 6);
    assert!((r.edge - 2f64.sqrt()).abs() < 1e-15);
    assert!((r.polytope.measure().unwrap() - 4.0 / 3.0).abs() < 1e-14);
    assert!(rel(first_intrinsic_volume(&r.polytope).unwrap(), r.first_intrinsic_volume()) < 1e-15);
}

#[test]
fn unit_volume_closed_forms() {
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    let (ln3, ln5, pi) = (3f64.ln(), 5f64.ln(), std::f64::consts::PI);
    let phi = PHI;
    let icosa = 0.5
        * (9.0 / 5.0 - 3.0 / s5).cbrt()
        * (197.0 / 525.0 + 239.0 / (525.0 * s5) - 44.0 / 525.0 * (2.0 + 2.0 / s5).sqrt() - (17226.0 + 6269.0 * s5) * pi / 157500.0
            - (2186.0 + 1413.0 * s5) * acot(phi) / 15750.0
            + (82.0 - 75.0 * s5) * acot(phi * phi) / 5250.0
            + 4.0 * (2139.0 + 881.0 * s5) * (1.0 / phi).asinh() / 7875.0
            + (15969.0 + 7151.0 * s5) * acoth(phi) / 12600.0
            + (4449.0 - 1685.0 * s5) * ln3 / 42000.0
            - (75783.0 + 37789.0 * s5) * ln5 / 252000.0);
    let dodeca = (30.0 + 14.0 * s5).cbrt().recip()
        * (1516.0 / 1575.0 + 2.0 * (0.4f64).sqrt() / 45.0 - 124.0 * (0.6f64).sqrt() / 175.0 - 71.0 * s2 / 1575.0 - 12.0 * s3 / 35.0
            + 342.0 / (175.0 * s5)
            + 493.0 * pi / 23625.0
            + 67.0 * pi / (945.0 * s5)
            + (397.0 - 244.0 * s5) * acot(2.0) / 18900.0
            + (24023.0 + 11788.0 * s5) * ((2.0f64 / 3.0).acos() - (1.0f64 / 3.0).acos()) / 94500.0
            - (461.0 + 212.0 * s5) * ((23.0f64 / 41.0).acos() + (39.0f64 / 41.0).acos()) / 1000.0
            - (1031.0 + 521.0 * s5) * (13.0f64 / 3.0).acosh() / 75600.0
            + (367.0 + 163.0 * s5) * 9f64.acosh() / 16800.0
            + (22197.0 + 8149.0 * s5) * ((121.0f64 / 41.0).acosh() - (57.0f64 / 41.0).acosh()) / 84000.0
            + (15763.0 + 7063.0 * s5) * ((7.0f64 / 3.0).acosh() - 3f64.acosh()) / 21000.0
            + (288889.0 + 129739.0 * s5) * ln3 / 378000.0
            + 2.0 * (423.0 + 187.0 * s5) * (4f64.acosh() - 2f64.acosh()) / 875.0
            + (109.0 - 3143.0 * s5) * ln5 / 151200.0);
    let octa = (0.75f64).cbrt()
        * (4.0 / 105.0 + 13.0 * s2 / 105.0 - 4.0 * pi / 45.0 + 109.0 * ln3 / (630.0 * s2) + 16.0 * acot(s2) / 315.0 + 158.0 * acoth(s2) / 315.0 * s2);
    let cube = 4.0 / 105.0 + 17.0 * s2 / 105.0 - 2.0 * s3 / 35.0 - pi / 15.0 + acoth(s2) / 5.0 + 4.0 * acoth(s3) / 5.0;
    let tetra = 3f64.cbrt() * (s2 / 7.0 - 37.0 * pi / 315.0 + 4.0 / 15.0 * s2.atan() + 113.0 * ln3 / (210.0 * s2));
    for (s, want) in [(Solid::Icosahedron, icosa), (Solid::Dodecahedron, dodeca), (Solid::Octahedron, octa), (Solid::Cube, cube), (Solid::Tetrahedron, tetra)] {
        let v = catalog::platonic_moment(s.name(), 1, Normalize::UnitVolume).unwrap().value;
        assert!((v - want).abs() < 1e-12, "{s}: {v} vs {want}");
    }
    let ball = 18.0 / 35.0 * (6.0 / pi).cbrt();
    assert!((catalog::ball_moment(1, Normalize::UnitVolume).unwrap() - ball).abs() < 1e-14);
}
