mod common;

use common::{labelled, r5, Labelled};

#[test]
fn inequalities_vertices_and_pairings() {
    let (g, v0) = r5();
    assert_eq!(g.order(), 60);
    let l = labelled(&g, &v0);
    assert_eq!(l.domain.cone.facets().len(), 8);
    assert_eq!(l.domain.cone.rays().len(), 8);
    assert!(Labelled::is_bijective(&l.facet_label), "facets {:?}", l.facet_label);
    assert!(Labelled::is_bijective(&l.ray_label), "rays {:?}", l.ray_label);
    l.facet_vertex_sets_match().unwrap();
    l.identifications_match().unwrap();
}
