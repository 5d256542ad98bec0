//! The quotient `X = K''/G` of the sphere triangulation `K = G . T(Lambda)`.
//!
//! Every orbit of simplices of `K''` meets `sd^2 T(Lambda)` and the action
//! on `K''` is regular, so `X` is the image of `S = sd^2 T(Lambda)` under the
//! map sending a vertex to its orbit. A vertex of `S` is a chain of simplices
//! of `sd T(Lambda)`, each a chain of simplices of `K`; its orbit is named by
//! the least image of that chain of `K`-simplex ids over the group.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::complex::{quotient_complex, ComplexError, Quotient, SimplicialComplex, VertexAction};
use crate::group::{as_permutation, FiniteMatrixGroup, LinearSubspace};
use crate::polytope::{default_base_point, dirichlet_domain, DirichletDomain, PolyCone, PolytopeError, SphereTriangulation};
use crate::scalar::{ExactScalar, ExactVector};

#[derive(Debug, thiserror::Error)]
pub enum QuotientError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("domain is not pointed and the group is not monomial")]
    NoFallback,
    #[error("the unit sphere of a {0}-dimensional space has no domain boundary to triangulate")]
    LowDimension(usize),
}

/// Images of every simplex of `K` under every group element, by global id
/// (`offsets[dim] + index`).
#[derive(Clone, Debug)]
pub struct SimplexAction {
    pub offsets: Vec<usize>,
    pub images: Vec<Vec<u32>>,
}

impl SimplexAction {
    pub fn new(k: &SimplicialComplex, action: &VertexAction) -> Self {
        let dims = (k.dim() + 1).max(0) as usize;
        let mut offsets = vec![0usize];
        for d in 0..dims {
            offsets.push(offsets[d] + k.num_simplices(d));
        }
        let images = (0..action.order())
            .into_par_iter()
            .map(|g| {
                let mut img = Vec::with_capacity(offsets[dims]);
                for d in 0..dims {
                    for s in k.simplices(d) {
                        let t = action.act(g, s);
                        img.push((offsets[d] + k.table(d).index_of(&t).expect("simplicial action")) as u32);
                    }
                }
                img
            })
            .collect();
        SimplexAction { offsets, images }
    }

    pub fn global(&self, k: &SimplicialComplex, s: &[u32]) -> u32 {
        let d = s.len() - 1;
        (self.offsets[d] + k.table(d).index_of(s).expect("simplex of K")) as u32
    }

    pub fn act(&self, g: usize, id: u32) -> u32 {
        self.images[g][id as usize]
    }

    /// Elements fixing every simplex of `chain`.
    pub fn stabilizer(&self, chain: &[u32]) -> Vec<usize> {
        (0..self.images.len()).filter(|&g| chain.iter().all(|&c| self.act(g, c) == c)).collect()
    }

    /// Least image of `chain` over the group.
    pub fn orbit_label(&self, chain: &[u32]) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        let mut buf = Vec::with_capacity(chain.len());
        for img in &self.images {
            buf.clear();
            buf.extend(chain.iter().map(|&c| img[c as usize]));
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.unwrap_or_default()
    }
}

/// The domain part of the construction.
#[derive(Clone, Debug)]
pub struct DomainPart {
    pub domain: DirichletDomain,
    /// `T(Lambda)` in its own numbering.
    pub t: SimplicialComplex,
    /// Vertex of `t` -> vertex of `K`.
    pub t_to_k: Vec<u32>,
    /// `sd T(Lambda)`.
    pub sd1: SimplicialComplex,
    /// Vertex of `sd1` -> global id of the `K`-simplex it is the barycenter of.
    pub sd1_simplex: Vec<u32>,
    /// Whether a vertex of `sd1` lies in `sd (boundary of T(Lambda))`.
    pub sd1_boundary: Vec<bool>,
    /// `S = sd^2 T(Lambda)`.
    pub s: SimplicialComplex,
    /// Whether a vertex of `S` lies in `sd^2 (boundary of T(Lambda))`.
    pub s_boundary: Vec<bool>,
    /// Vertex of `S` -> vertex of `X`.
    pub projection: Vec<u32>,
}

/// `K = G T(Lambda)` and `sd T(Lambda)`, without the second subdivision.
#[derive(Clone, Debug)]
pub struct DomainScaffold {
    pub domain: DirichletDomain,
    pub k: SimplicialComplex,
    pub action: VertexAction,
    pub simplex_action: SimplexAction,
    pub t: SimplicialComplex,
    pub t_to_k: Vec<u32>,
    pub sd1: SimplicialComplex,
    pub sd1_simplex: Vec<u32>,
    pub sd1_boundary: Vec<bool>,
}

impl DomainScaffold {
    pub fn new(g: &FiniteMatrixGroup, d: DirichletDomain) -> Result<Self, QuotientError> {
        if g.subspace().dim() < 2 {
            return Err(QuotientError::LowDimension(g.subspace().dim()));
        }
        let sphere = SphereTriangulation::new(g, &d)?;
        let k = sphere.complex;
        let action = sphere.action;
        action.check_simplicial(&k)?;
        let sa = SimplexAction::new(&k, &action);
        let mut t_to_k: Vec<u32> = sphere.domain_facets.iter().flatten().copied().collect();
        t_to_k.sort_unstable();
        t_to_k.dedup();
        let pos: HashMap<u32, u32> = t_to_k.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let t = SimplicialComplex::from_facets(t_to_k.len(), sphere.domain_facets.iter().map(|f| f.iter().map(|v| pos[v]).collect::<Vec<u32>>()));
        let ridges = crate::recognition::boundary_ridges(&t);
        let (sd1, sub1) = t.barycentric_subdivision();
        let mut sd1_simplex = Vec::with_capacity(sd1.n_vertices());
        let mut sd1_boundary = Vec::with_capacity(sd1.n_vertices());
        for u in 0..sd1.n_vertices() as u32 {
            let (dim, i) = sub1.origin(u);
            let ts = t.table(dim).get(i);
            let mut ks: Vec<u32> = ts.iter().map(|&v| t_to_k[v as usize]).collect();
            ks.sort_unstable();
            sd1_simplex.push(sa.global(&k, &ks));
            sd1_boundary.push(ridges.iter().any(|r| ts.iter().all(|v| r.binary_search(v).is_ok())));
        }
        Ok(DomainScaffold { domain: d, k, action, simplex_action: sa, t, t_to_k, sd1, sd1_simplex, sd1_boundary })
    }

    /// Number of top simplices of `sd^2 T(Lambda)`.
    pub fn second_subdivision_size(&self) -> u128 {
        let d = self.sd1.dim().max(0) as u128;
        let top = self.sd1.num_simplices(d as usize) as u128;
        (1..=d + 1).product::<u128>() * top
    }

    pub fn mirror_facets(&self) -> Vec<(Vec<u32>, Vec<usize>)> {
        mirror_facets_of(&self.sd1, &self.sd1_simplex, &self.simplex_action, &self.action)
    }
}

fn mirror_facets_of(sd: &SimplicialComplex, chain_of: &[u32], sa: &SimplexAction, action: &VertexAction) -> Vec<(Vec<u32>, Vec<usize>)> {
    let top = sd.dim();
    if top < 1 {
        return Vec::new();
    }
    let id = action.perms().iter().position(|p| p.iter().enumerate().all(|(i, &v)| i as u32 == v)).expect("identity");
    sd.simplices(top as usize - 1)
        .filter_map(|s| {
            let chain: Vec<u32> = s.iter().map(|&u| chain_of[u as usize]).collect();
            let stab: Vec<usize> = sa.stabilizer(&chain).into_iter().filter(|&g| g != id).collect();
            (!stab.is_empty()).then_some((chain, stab))
        })
        .collect()
}

/// `X = K''/G` with the data it was built from.
#[derive(Clone, Debug)]
pub struct DomainQuotient {
    pub k: SimplicialComplex,
    pub action: VertexAction,
    pub simplex_action: SimplexAction,
    /// `None` when the Dirichlet domain is not pointed and `X` was built
    /// from the cross-polytope instead.
    pub part: Option<DomainPart>,
    pub x: SimplicialComplex,
}

impl DomainQuotient {
    /// Builds `X` from the Dirichlet domain at `v0` (default base point if `None`).
    pub fn new(g: &FiniteMatrixGroup, v0: Option<&ExactVector>) -> Result<Self, QuotientError> {
        let v0 = match v0 {
            Some(v) => v.clone(),
            None => default_base_point(g)?,
        };
        match dirichlet_domain(g, &v0) {
            Ok(d) => Self::from_domain(g, d),
            Err(PolytopeError::NotPointed) => Self::fallback(g),
            Err(e) => Err(e.into()),
        }
    }

    /// Quotient without a pointed domain: the cross-polytope for monomial
    /// groups, otherwise an invariant polytope.
    pub fn fallback(g: &FiniteMatrixGroup) -> Result<Self, QuotientError> {
        match Self::cross_polytope(g) {
            Err(QuotientError::NoFallback) => Self::orbit_polytope(g),
            r => r,
        }
    }

    /// `K` is the order complex of the proper faces of the invariant polytope
    /// `{x in V : (g w) . x <= 1}` with `w` running over plus and minus a basis
    /// of `V`, and `X` is the quotient of `K''` computed directly.
    pub fn orbit_polytope(g: &FiniteMatrixGroup) -> Result<Self, QuotientError> {
        let m = g.subspace().dim();
        if m < 2 {
            return Err(QuotientError::LowDimension(m));
        }
        let n = g.ambient_dim();
        let lift = |v: &ExactVector, t: ExactScalar| -> ExactVector { ExactVector(v.0.iter().cloned().chain(std::iter::once(t)).collect()) };
        let eqs: Vec<ExactVector> = g.subspace().equations().row_vectors().iter().map(|e| lift(e, ExactScalar::zero())).collect();
        let sub = if eqs.is_empty() { LinearSubspace::full(n + 1) } else { LinearSubspace::from_equations(n + 1, eqs).map_err(PolytopeError::from)? };
        let mut normals: Vec<ExactVector> = Vec::new();
        for b in g.subspace().basis() {
            for w in [b.clone(), b.neg()] {
                for h in 0..g.order() {
                    normals.push(lift(&g.act(h, &w).neg(), ExactScalar::one()));
                }
            }
        }
        normals.sort();
        normals.dedup();
        let (cone, _) = PolyCone::from_inequalities(&sub, &normals)?;
        let lattice = cone.face_lattice();
        let top = lattice.top();
        let faces: Vec<usize> = (0..lattice.faces().len()).filter(|&f| f != top).collect();
        let fpos: HashMap<usize, u32> = faces.iter().enumerate().map(|(i, &f)| (f, i as u32)).collect();
        // maximal chains, from a vertex of the polytope up to a facet
        let mut facets: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = faces.iter().filter(|&&f| lattice.face(f).dim == m).map(|&f| vec![f]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().expect("nonempty");
            if lattice.face(last).dim == 1 {
                let mut c: Vec<u32> = chain.iter().map(|f| fpos[f]).collect();
                c.sort_unstable();
                facets.push(c);
                continue;
            }
            for &sf in &lattice.face(last).subfaces {
                let mut next = chain.clone();
                next.push(sf);
                stack.push(next);
            }
        }
        let k = SimplicialComplex::from_facets(faces.len(), facets);
        let mut perms = Vec::with_capacity(g.order());
        for h in 0..g.order() {
            let rmap: Vec<u32> = cone
                .rays()
                .iter()
                .map(|r| {
                    let x = ExactVector(r.0[..n].to_vec());
                    cone.ray_index(&lift(&g.act(h, &x), r.0[n].clone())).map(|i| i as u32).ok_or(QuotientError::NoFallback)
                })
                .collect::<Result<_, _>>()?;
            let p: Vec<u32> = faces
                .iter()
                .map(|&f| {
                    let mut img: Vec<u32> = lattice.face(f).rays.iter().map(|&r| rmap[r as usize]).collect();
                    img.sort_unstable();
                    lattice.index_of(&img).map(|i| fpos[&i]).ok_or(QuotientError::NoFallback)
                })
                .collect::<Result<_, _>>()?;
            perms.push(p);
        }
        let action = VertexAction::new(faces.len(), perms)?;
        action.check_simplicial(&k)?;
        let sa = SimplexAction::new(&k, &action);
        let q = explicit_quotient(&k, &action)?;
        Ok(DomainQuotient { k, action, simplex_action: sa, part: None, x: q.complex })
    }

    pub fn from_domain(g: &FiniteMatrixGroup, d: DirichletDomain) -> Result<Self, QuotientError> {
        Ok(Self::from_scaffold(DomainScaffold::new(g, d)?))
    }

    pub fn from_scaffold(sc: DomainScaffold) -> Self {
        let DomainScaffold { domain: d, k, action, simplex_action: sa, t, t_to_k, sd1, sd1_simplex, sd1_boundary } = sc;
        let (s, sub2) = sd1.barycentric_subdivision();
        let n_s = s.n_vertices();
        let chains: Vec<(Vec<u32>, bool)> = (0..n_s as u32)
            .into_par_iter()
            .map(|w| {
                let (dim, j) = sub2.origin(w);
                let c = sd1.table(dim).get(j);
                let chain: Vec<u32> = c.iter().map(|&u| sd1_simplex[u as usize]).collect();
                let bd = sd1_boundary[*c.last().expect("nonempty") as usize];
                (sa.orbit_label(&chain), bd)
            })
            .collect();
        let mut labels: Vec<&Vec<u32>> = chains.iter().map(|(l, _)| l).collect();
        labels.sort_unstable();
        labels.dedup();
        let xid: HashMap<&Vec<u32>, u32> = labels.iter().enumerate().map(|(i, l)| (*l, i as u32)).collect();
        let projection: Vec<u32> = chains.iter().map(|(l, _)| xid[l]).collect();
        let s_boundary: Vec<bool> = chains.iter().map(|(_, b)| *b).collect();
        let x = SimplicialComplex::from_facets(labels.len(), s.maximal_simplices().iter().map(|f| f.iter().map(|&v| projection[v as usize]).collect::<Vec<u32>>()));
        let part = DomainPart { domain: d, t, t_to_k, sd1, sd1_simplex, sd1_boundary, s, s_boundary, projection };
        DomainQuotient { k, action, simplex_action: sa, part: Some(part), x }
    }

    /// For monomial groups: `K` is the boundary of the cross-polytope and `X`
    /// is the quotient of `K''` computed directly.
    pub fn cross_polytope(g: &FiniteMatrixGroup) -> Result<Self, QuotientError> {
        if g.subspace().dim() < 2 {
            return Err(QuotientError::LowDimension(g.subspace().dim()));
        }
        if !g.subspace().is_full() {
            return Err(QuotientError::NoFallback);
        }
        let n = g.ambient_dim();
        // vertex 2i is +e_i, 2i+1 is -e_i
        let mut perms = Vec::with_capacity(g.order());
        for h in 0..g.order() {
            let m = g.element(h);
            let mut p = vec![0u32; 2 * n];
            for i in 0..n {
                let col: Vec<(usize, i32)> = (0..n).filter(|&r| !m.get(r, i).is_zero()).map(|r| (r, m.get(r, i).signum())).collect();
                let [(r, sign)] = col[..] else { return Err(QuotientError::NoFallback) };
                if !m.get(r, i).abs().is_one() {
                    return Err(QuotientError::NoFallback);
                }
                let plus = (2 * r) as u32 + u32::from(sign < 0);
                p[2 * i] = plus;
                p[2 * i + 1] = plus ^ 1;
            }
            perms.push(p);
        }
        let facets: Vec<Vec<u32>> = (0..1u32 << n).map(|mask| (0..n as u32).map(|i| 2 * i + ((mask >> i) & 1)).collect()).collect();
        let k = SimplicialComplex::from_facets(2 * n, facets);
        let action = VertexAction::new(2 * n, perms)?;
        action.check_simplicial(&k)?;
        let sa = SimplexAction::new(&k, &action);
        let q = explicit_quotient(&k, &action)?;
        Ok(DomainQuotient { k, action, simplex_action: sa, part: None, x: q.complex })
    }

    /// Codimension-one simplices of `sd T(Lambda)` (of `sd K` without a domain)
    /// as chains of `K`-simplex ids, with their nontrivial stabilizer elements.
    /// A nontrivial stabilizer fixes a hyperplane, so it is a reflection across
    /// the facet and the facet lies on the boundary of `X`.
    pub fn mirror_facets(&self) -> Vec<(Vec<u32>, Vec<usize>)> {
        let (sd, chain_of): (SimplicialComplex, Vec<u32>) = match &self.part {
            Some(p) => (p.sd1.clone(), p.sd1_simplex.clone()),
            None => {
                let (sd, sub) = self.k.barycentric_subdivision();
                let ids = (0..sd.n_vertices() as u32)
                    .map(|u| {
                        let (d, i) = sub.origin(u);
                        (self.simplex_action.offsets[d] + i) as u32
                    })
                    .collect();
                (sd, ids)
            }
        };
        mirror_facets_of(&sd, &chain_of, &self.simplex_action, &self.action)
    }

    /// Stabilizer of every vertex of `K`.
    pub fn vertex_stabilizers(&self) -> Vec<Vec<usize>> {
        (0..self.k.n_vertices()).map(|v| (0..self.action.order()).filter(|&g| self.action.perm(g)[v] == v as u32).collect()).collect()
    }
}

/// `K''/G` computed from the second subdivision of all of `K`, with the
/// regularity of the action on `K''` checked.
pub fn explicit_quotient(k: &SimplicialComplex, action: &VertexAction) -> Result<Quotient, ComplexError> {
    let (k1, s1) = k.barycentric_subdivision();
    let a1 = action.subdivide(k, &s1);
    let (k2, s2) = k1.barycentric_subdivision();
    let a2 = a1.subdivide(&k1, &s2);
    quotient_complex(&k2, &a2, &[])
}

/// Cycle notation of a group element, when it is a coordinate permutation.
pub fn element_name(g: &FiniteMatrixGroup, h: usize) -> String {
    as_permutation(g.element(h)).map(|p| crate::group::cycle_notation(&p)).unwrap_or_else(|| format!("#{h}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::homology::homology;

    fn build(name: &str) -> (FiniteMatrixGroup, DomainQuotient) {
        let e = lookup(name).unwrap();
        let g = e.build().unwrap();
        let q = DomainQuotient::new(&g, e.base_point.as_ref()).unwrap();
        (g, q)
    }

    #[test]
    fn labels_match_explicit_quotient() {
        for name in ["W(A2)", "W+(A3)", "D+(3)", "I2(5)", "W(B3)"] {
            let (_, q) = build(name);
            let e = explicit_quotient(&q.k, &q.action).unwrap();
            assert_eq!(q.x.f_vector(), e.complex.f_vector(), "{name}");
            assert_eq!(homology(&q.x).unwrap().betti, homology(&e.complex).unwrap().betti, "{name}");
        }
    }

    #[test]
    fn reflection_quotient_is_the_domain() {
        // for a reflection group nothing on the domain is identified
        let (_, q) = build("W(A3)");
        let p = q.part.as_ref().unwrap();
        assert_eq!(q.x.f_vector(), p.s.f_vector());
        assert!(!q.mirror_facets().is_empty());
    }

    #[test]
    fn rotation_quotient_has_no_mirrors() {
        let (_, q) = build("W+(A3)");
        assert!(q.mirror_facets().is_empty());
        assert!(q.x.boundary().is_empty());
        let h = homology(&q.x).unwrap();
        assert!(h.is_sphere_homology(2));
    }

    #[test]
    fn orbit_polytope_fallback() {
        // a cyclic rotation fixes an axis, so its Dirichlet domain contains a line
        let g = crate::group::enumerate_in(&[crate::scalar::ExactMatrix::permutation(&[1, 2, 0])], crate::group::LinearSubspace::full(3), None).unwrap();
        assert_eq!(dirichlet_domain(&g, &default_base_point(&g).unwrap()).unwrap_err(), PolytopeError::NotPointed);
        let q = DomainQuotient::new(&g, None).unwrap();
        assert!(q.part.is_none());
        assert!(q.x.boundary().is_empty());
        assert!(homology(&q.x).unwrap().is_sphere_homology(2));
        // the same construction for a group with a pointed domain agrees in homology
        let (h, _) = build("W(B3)");
        let o = DomainQuotient::orbit_polytope(&h).unwrap();
        assert!(!o.mirror_facets().is_empty());
        assert!(homology(&o.x).unwrap().is_acyclic());
    }

    #[test]
    fn one_dimensional_groups_are_rejected() {
        let sub = crate::group::LinearSubspace::full(1);
        let g = crate::group::enumerate_in(&[crate::scalar::ExactMatrix::from_int_rows(&[&[-1]])], sub, None).unwrap();
        assert!(matches!(DomainQuotient::new(&g, None), Err(QuotientError::LowDimension(1))));
    }

    #[test]
    fn non_pointed_domain_falls_back() {
        let (_, q) = build("D+(2)");
        assert!(q.part.is_none());
        assert_eq!(q.x.f_vector(), vec![8, 8]);
        let h = homology(&q.x).unwrap();
        assert!(h.is_sphere_homology(1));
    }

    #[test]
    fn boundary_flags_cover_the_domain_boundary() {
        let (_, q) = build("W+(A3)");
        let p = q.part.as_ref().unwrap();
        let bd_vertices = p.s_boundary.iter().filter(|&&b| b).count();
        let expected = p.s.boundary().n_vertices();
        assert_eq!(bd_vertices, expected);
    }
}
