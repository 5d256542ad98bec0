mod common;

use orbiquot::catalog::lookup;
use orbiquot::complex::SimplicialComplex;
use orbiquot::group::{orbit_stabilizer, FiniteMatrixGroup};
use orbiquot::homology::{boundary_squares_to_zero, homology, homology_with, verify_homology};
use orbiquot::polytope::{default_base_point, dirichlet_domain};
use orbiquot::quotient::DomainQuotient;
use orbiquot::scalar::ExactVector;
use proptest::prelude::*;

fn group(name: &str) -> (FiniteMatrixGroup, ExactVector) {
    let e = lookup(name).unwrap();
    let g = e.build().unwrap();
    let v0 = e.base_point.clone().unwrap_or_else(|| default_base_point(&g).unwrap());
    (g, v0)
}

#[test]
fn r5_domain_tiles_the_sphere() {
    let (g, v0) = common::r5();
    let d = dirichlet_domain(&g, &v0).unwrap();
    let pts = common::sample_points(&g, 1000, 7);
    assert_eq!(common::covering_violations(&g, &d, &pts), 0);
}

#[test]
fn catalog_domains_tile_the_sphere() {
    for name in ["W(A2)", "W(A3)", "W(B3)", "W+(A3)", "I2(5)", "D+(3)", "P"] {
        let (g, v0) = group(name);
        let d = dirichlet_domain(&g, &v0).unwrap();
        let pts = common::sample_points(&g, 300, 11);
        assert_eq!(common::covering_violations(&g, &d, &pts), 0, "{name}");
    }
}

#[test]
fn covering_check_detects_a_wrong_domain() {
    // the chamber of W(A3) is half a domain for its rotation subgroup
    let (w, v0) = group("W(A3)");
    let (g, _) = group("W+(A3)");
    let d = dirichlet_domain(&w, &v0).unwrap();
    let pts = common::sample_points(&g, 200, 3);
    assert!(common::covering_violations(&g, &d, &pts) > 50);
}

#[test]
fn quotient_boundary_maps_square_to_zero() {
    for name in ["W(B3)", "W+(A3)", "I2(5)"] {
        let (g, v0) = group(name);
        let q = DomainQuotient::new(&g, Some(&v0)).unwrap();
        for d in 2..=q.x.dim() as usize {
            assert!(boundary_squares_to_zero(&q.x, d), "{name} d{d}");
        }
    }
}

#[test]
fn quotient_homology_certificates_replay() {
    let (g, v0) = group("W+(A3)");
    let q = DomainQuotient::new(&g, Some(&v0)).unwrap();
    let h = homology_with(&q.x, true).unwrap();
    verify_homology(&q.x, &h).unwrap();
    let h1 = homology(&q.x.barycentric_subdivision().0).unwrap();
    assert_eq!(h.betti, h1.betti);
    assert_eq!(h.torsion, h1.torsion);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_times_stabilizer_is_order(name in prop::sample::select(vec!["W(A3)", "W(B3)", "W+(A3)", "M(R5)", "P"]), y in prop::collection::vec(-3i64..=3, 6)) {
        let (g, _) = group(name);
        let m = g.subspace().dim();
        let x = g.subspace().from_coords(&ExactVector::from_ints(&y[..m]));
        prop_assume!(!x.is_zero());
        let os = orbit_stabilizer(&g, &x).unwrap();
        prop_assert_eq!(os.orbit.len() * os.stabilizer.order(), g.order());
    }

    #[test]
    fn sampled_points_lie_in_one_translate(seed in 0u64..1000) {
        let (g, v0) = group("W+(A3)");
        let d = dirichlet_domain(&g, &v0).unwrap();
        let pts = common::sample_points(&g, 20, seed);
        prop_assert_eq!(common::covering_violations(&g, &d, &pts), 0);
    }

    #[test]
    fn homology_is_subdivision_invariant(facets in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..5), 1..7)) {
        let k = SimplicialComplex::from_facets(7, facets.iter().map(|s| s.iter().copied().collect::<Vec<_>>()));
        let h = homology_with(&k, true).unwrap();
        prop_assert!(verify_homology(&k, &h).is_ok());
        let h1 = homology(&k.barycentric_subdivision().0).unwrap();
        prop_assert_eq!(h.betti, h1.betti);
        prop_assert_eq!(h.torsion, h1.torsion);
    }
}
