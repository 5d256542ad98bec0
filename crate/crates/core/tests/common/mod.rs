//! Reference data for the M(R5) domain at v0 = (-1,-1,-1,0,1,2).
#![allow(dead_code)]

use orbiquot::catalog::lookup;
use orbiquot::group::FiniteMatrixGroup;
use orbiquot::polytope::{boundary_identifications, dirichlet_domain, DirichletDomain, Identification};
use orbiquot::scalar::ExactVector;

/// Inner normals of the eight inequalities P1..P8.
pub const INEQUALITIES: [[i64; 6]; 8] = [
    [0, 0, -1, 1, 0, 0],
    [0, 0, 0, -1, 1, 0],
    [0, 0, 0, 0, -1, 1],
    [-1, 0, 0, 0, 1, 0],
    [0, -1, 0, 0, 0, 1],
    [-1, -2, 0, 1, 2, 0],
    [-2, -1, 0, 1, 2, 0],
    [0, -2, -1, 1, 2, 0],
];

/// Directions of the vertices v1..v8.
pub const VERTICES: [[i64; 6]; 8] = [
    [-5, 1, 1, 1, 1, 1],
    [1, -5, 1, 1, 1, 1],
    [1, 1, -5, 1, 1, 1],
    [-1, -1, -1, -1, -1, 5],
    [1, -1, -1, -1, 1, 1],
    [1, 1, -5, -5, 4, 4],
    [-1, 1, -1, -1, 1, 1],
    [-5, 4, -5, 1, 1, 4],
];

/// Vertex sets of the facets in P1..P8 (1-based vertex labels).
pub const FACETS: [&[usize]; 8] = [&[1, 2, 4, 5, 6, 7], &[1, 2, 3, 4, 8], &[1, 2, 3, 5, 6, 7], &[2, 3, 4, 5], &[1, 3, 7, 8], &[3, 4, 6, 7, 8], &[3, 4, 5, 6], &[1, 4, 7, 8]];

/// Generating identifications: element, source facet, target facet, vertex map.
/// Each self-pairing is an involution, listed one way per swapped pair.
pub const IDENTIFICATIONS: [(&str, usize, usize, &[(usize, usize)]); 8] = [
    ("(12)(34)", 1, 1, &[(1, 2), (4, 4), (6, 6), (5, 7)]),
    ("(13)(45)", 2, 2, &[(1, 3), (2, 2), (4, 4), (8, 8)]),
    ("(12)(56)", 3, 3, &[(1, 2), (3, 3), (5, 7), (6, 6)]),
    ("(15)(23)", 4, 4, &[(2, 3), (4, 4), (5, 5)]),
    ("(13)(26)", 5, 5, &[(1, 3), (7, 7), (8, 8)]),
    ("(14)(25)", 6, 6, &[(3, 3), (4, 4), (6, 8), (7, 7)]),
    ("(13425)", 8, 7, &[(1, 3), (4, 4), (7, 5), (8, 6)]),
    ("(15243)", 7, 8, &[(3, 1), (4, 4), (5, 7), (6, 8)]),
];

pub fn r5() -> (FiniteMatrixGroup, ExactVector) {
    let e = lookup("M(R5)").expect("catalog entry");
    (e.build().expect("group"), e.base_point.expect("base point"))
}

/// Domain labelled by the reference: `ray_label[r]` and `facet_label[f]` are 1-based.
pub struct Labelled {
    pub domain: DirichletDomain,
    pub ray_label: Vec<usize>,
    pub facet_label: Vec<usize>,
    pub identifications: Vec<Identification>,
}

fn label(v: &ExactVector, table: &[[i64; 6]]) -> Option<usize> {
    table.iter().position(|t| v.same_ray(&ExactVector::from_ints(t))).map(|i| i + 1)
}

pub fn labelled(g: &FiniteMatrixGroup, v0: &ExactVector) -> Labelled {
    let domain = dirichlet_domain(g, v0).expect("domain");
    let ray_label = domain.cone.rays().iter().map(|r| label(r, &VERTICES).unwrap_or(0)).collect();
    let facet_label = domain.cone.facets().iter().map(|f| label(&f.normal, &INEQUALITIES).unwrap_or(0)).collect();
    let identifications = boundary_identifications(g, &domain).expect("identifications");
    Labelled { domain, ray_label, facet_label, identifications }
}

impl Labelled {
    /// Labels cover 1..=8 exactly once each.
    pub fn is_bijective(labels: &[usize]) -> bool {
        let mut s = labels.to_vec();
        s.sort_unstable();
        s == (1..=8).collect::<Vec<_>>()
    }

    pub fn facet_vertex_sets_match(&self) -> Result<(), String> {
        for (f, facet) in self.domain.cone.facets().iter().enumerate() {
            let mut got: Vec<usize> = facet.rays.iter().map(|&r| self.ray_label[r as usize]).collect();
            got.sort_unstable();
            let want = FACETS[self.facet_label[f] - 1];
            if got != want {
                return Err(format!("P{}: {got:?} vs {want:?}", self.facet_label[f]));
            }
        }
        Ok(())
    }

    /// Every listed identification occurs with its element and vertex correspondence.
    pub fn identifications_match(&self) -> Result<(), String> {
        for (perm, src, dst, map) in IDENTIFICATIONS {
            let id = self
                .identifications
                .iter()
                .find(|i| self.facet_label[i.facet] == src)
                .ok_or(format!("no identification on P{src}"))?;
            if self.facet_label[id.partner] != dst {
                return Err(format!("P{src} pairs with P{}, not P{dst}", self.facet_label[id.partner]));
            }
            if id.permutation.as_deref() != Some(perm) {
                return Err(format!("P{src}: element {:?}, not {perm}", id.permutation));
            }
            let mut got: Vec<(usize, usize)> = id.ray_map.iter().map(|&(a, b)| (self.ray_label[a as usize], self.ray_label[b as usize])).collect();
            got.sort_unstable();
            let mut want: Vec<(usize, usize)> = map.iter().flat_map(|&(a, b)| if src == dst { vec![(a, b), (b, a)] } else { vec![(a, b)] }).collect();
            want.sort_unstable();
            want.dedup();
            if got != want {
                return Err(format!("P{src} under {perm}: {got:?} vs {want:?}"));
            }
        }
        Ok(())
    }
}

/// Sampled points of `V` that are covered by no translate of the domain, or
/// lie in the interior of one translate and also in another.
pub fn covering_violations(g: &FiniteMatrixGroup, d: &DirichletDomain, samples: &[ExactVector]) -> usize {
    samples
        .iter()
        .filter(|x| {
            let hits = orbiquot::polytope::locate(g, d, x);
            let interior = hits.iter().any(|&h| d.cone.contains_in_interior(&g.act(g.inverse(h), x)));
            hits.is_empty() || (interior && hits.len() != 1)
        })
        .count()
}

/// `count` points of `V` with subspace coordinates in `[-20, 20]`, seeded.
pub fn sample_points(g: &FiniteMatrixGroup, count: usize, seed: u64) -> Vec<ExactVector> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = g.subspace().dim();
    (0..count)
        .map(|_| loop {
            let y: Vec<i64> = (0..m).map(|_| rng.gen_range(-20..=20)).collect();
            let x = g.subspace().from_coords(&ExactVector::from_ints(&y));
            if !x.is_zero() {
                break x;
            }
        })
        .collect()
}
