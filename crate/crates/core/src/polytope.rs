//! Polyhedral cones by the double description method, face lattices,
//! Dirichlet fundamental domains, facet pairings and the triangulation of a
//! domain that is compatible with its pairings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, VertexAction};
use crate::group::{as_permutation, cycle_notation, FiniteMatrixGroup, GroupError, LinearSubspace};
use crate::scalar::{ExactMatrix, ExactScalar, ExactVector, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("base point is fixed by group element {element}")]
    NonGenericBasePoint { element: usize },
    #[error("base point is not in the working subspace or has the wrong length")]
    BasePointOutsideSubspace,
    #[error("no generic base point with entries in [-3, 3]")]
    NoBasePointFound,
    #[error("cone contains a line")]
    NotPointed,
    #[error("cone is not full-dimensional")]
    NotFullDimensional,
    #[error("facet {facet} has no partner")]
    UnpairedFacet { facet: usize },
    #[error("pairing of facet {facet} does not carry its triangulation onto the partner")]
    IncompatibleTriangulation { facet: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Fixed-width bit set over inequality indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&self, o: &Self) -> Self {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn is_superset(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays of `{y : c_j . y >= 0}` in `R^m`, with each ray's set of
/// tight rows. Rows are inserted in the given order.
fn double_description(m: usize, rows: &[ExactVector]) -> Result<(Vec<ExactVector>, Vec<Bits>), PolytopeError> {
    let n = rows.len();
    // initial basis: first rows raising the rank
    let mut basis: Vec<usize> = Vec::new();
    for (j, r) in rows.iter().enumerate() {
        if basis.len() == m {
            break;
        }
        let mut cand: Vec<Vec<ExactScalar>> = basis.iter().map(|&b| rows[b].0.clone()).collect();
        cand.push(r.0.clone());
        if ExactMatrix::from_rows(cand)?.rank() > basis.len() {
            basis.push(j);
        }
    }
    if basis.len() < m {
        return Err(PolytopeError::NotPointed);
    }
    let cb = ExactMatrix::from_rows(basis.iter().map(|&b| rows[b].0.clone()).collect())?;
    let inv = cb.inverse()?;
    let mut rays: Vec<ExactVector> = Vec::new();
    let mut zeros: Vec<Bits> = Vec::new();
    for i in 0..m {
        let col = ExactVector((0..m).map(|r| inv.get(r, i).clone()).collect());
        rays.push(col.canonical_ray().expect("nonzero column"));
        let mut z = Bits::new(n);
        for (k, &b) in basis.iter().enumerate() {
            if k != i {
                z.set(b);
            }
        }
        zeros.push(z);
    }
    let in_basis: Vec<bool> = (0..n).map(|j| basis.contains(&j)).collect();
    for j in (0..n).filter(|&j| !in_basis[j]) {
        let a = &rows[j];
        let vals: Vec<ExactScalar> = rays.iter().map(|r| a.dot(r)).collect();
        let signs: Vec<i32> = vals.iter().map(ExactScalar::signum).collect();
        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for p in (0..rays.len()).filter(|&p| signs[p] > 0) {
            for q in (0..rays.len()).filter(|&q| signs[q] < 0) {
                let common = zeros[p].and(&zeros[q]);
                if (common.count() as usize) + 2 < m {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|r| r == p || r == q || !zeros[r].is_superset(&common));
                if !adjacent {
                    continue;
                }
                let v = rays[q].scale(&vals[p]).sub(&rays[p].scale(&vals[q]));
                let mut z = common;
                z.set(j);
                new_rays.push(v.canonical_ray().expect("adjacent rays are independent"));
                new_zeros.push(z);
            }
        }
        let mut kept_rays = Vec::new();
        let mut kept_zeros = Vec::new();
        for (i, (r, mut z)) in rays.into_iter().zip(zeros).enumerate() {
            if signs[i] >= 0 {
                if signs[i] == 0 {
                    z.set(j);
                }
                kept_rays.push(r);
                kept_zeros.push(z);
            }
        }
        kept_rays.extend(new_rays);
        kept_zeros.extend(new_zeros);
        rays = kept_rays;
        zeros = kept_zeros;
    }
    if rays.is_empty() {
        return Err(PolytopeError::NotFullDimensional);
    }
    Ok((rays, zeros))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    /// Normal projected into the working subspace, as a canonical ray.
    pub normal: ExactVector,
    /// Indices into [`PolyCone::rays`] lying on the facet, sorted.
    pub rays: Vec<u32>,
}

/// A pointed, full-dimensional polyhedral cone inside a linear subspace.
#[derive(Clone, Debug)]
pub struct PolyCone {
    subspace: LinearSubspace,
    rays: Vec<ExactVector>,
    facets: Vec<Facet>,
}

fn basis_matrix(s: &LinearSubspace) -> ExactMatrix {
    // columns are the basis vectors
    ExactMatrix::from_rows(s.basis().iter().map(|v| v.0.clone()).collect()).expect("basis").transpose()
}

/// Projects `a` orthogonally onto the subspace: `B G^{-1} B^T a`.
fn project(s: &LinearSubspace, a: &ExactVector) -> ExactVector {
    if s.is_full() {
        return a.clone();
    }
    let b = basis_matrix(s);
    let c = b.transpose().mul_vec(a);
    let y = s.gram().inverse().expect("independent basis").mul_vec(&c);
    b.mul_vec(&y)
}

impl PolyCone {
    /// `{x in V : a_j . x >= 0}`. Also returns, for every input row, the index of
    /// the facet it defines, or `None` if the row is redundant.
    pub fn from_inequalities(subspace: &LinearSubspace, normals: &[ExactVector]) -> Result<(PolyCone, Vec<Option<usize>>), PolytopeError> {
        let m = subspace.dim();
        let b = basis_matrix(subspace);
        let bt = b.transpose();
        let rows: Vec<ExactVector> = normals.iter().map(|a| bt.mul_vec(a)).collect();
        let (yrays, zeros) = double_description(m, &rows)?;
        let xrays: Vec<ExactVector> = yrays.iter().map(|y| b.mul_vec(y).canonical_ray().expect("nonzero")).collect();
        let mut order: Vec<usize> = (0..xrays.len()).collect();
        order.sort_by(|&i, &j| xrays[i].cmp(&xrays[j]));
        let mut pos = vec![0u32; xrays.len()];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p as u32;
        }
        let rays: Vec<ExactVector> = order.iter().map(|&i| xrays[i].clone()).collect();
        // tight ray sets per row; facets are rows whose tight rays span a hyperplane
        let mut by_set: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut cand: Vec<(ExactVector, Vec<u32>)> = Vec::new();
        let mut row_facet = vec![None; normals.len()];
        for j in 0..normals.len() {
            let mut tight: Vec<u32> = (0..yrays.len()).filter(|&r| zeros[r].get(j)).map(|r| pos[r]).collect();
            tight.sort_unstable();
            if tight.len() + 1 < m {
                continue;
            }
            if let Some(&f) = by_set.get(&tight) {
                row_facet[j] = Some(f);
                continue;
            }
            let span = ExactMatrix::from_rows(tight.iter().map(|&r| rays[r as usize].0.clone()).collect())?;
            if span.rank() + 1 != m {
                continue;
            }
            by_set.insert(tight.clone(), cand.len());
            row_facet[j] = Some(cand.len());
            cand.push((project(subspace, &normals[j]).canonical_ray().expect("nonzero normal"), tight));
        }
        let mut forder: Vec<usize> = (0..cand.len()).collect();
        forder.sort_by(|&i, &j| cand[i].0.cmp(&cand[j].0));
        let mut fpos = vec![0usize; cand.len()];
        for (p, &i) in forder.iter().enumerate() {
            fpos[i] = p;
        }
        let facets = forder.iter().map(|&i| Facet { normal: cand[i].0.clone(), rays: cand[i].1.clone() }).collect();
        let row_facet = row_facet.into_iter().map(|f| f.map(|f| fpos[f])).collect();
        Ok((PolyCone { subspace: subspace.clone(), rays, facets }, row_facet))
    }

    /// The cone generated by `rays` (vectors in the subspace).
    pub fn from_rays(subspace: &LinearSubspace, rays: &[ExactVector]) -> Result<PolyCone, PolytopeError> {
        let m = subspace.dim();
        let b = basis_matrix(subspace);
        let ginv = subspace.gram().inverse()?;
        let coords: Vec<ExactVector> = rays.iter().map(|x| ginv.mul_vec(&b.transpose().mul_vec(x))).collect();
        let (dual, _) = double_description(m, &coords)?;
        let normals: Vec<ExactVector> = dual.iter().map(|c| b.mul_vec(&ginv.mul_vec(c))).collect();
        Ok(Self::from_inequalities(subspace, &normals)?.0)
    }

    pub fn subspace(&self) -> &LinearSubspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn rays(&self) -> &[ExactVector] {
        &self.rays
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn ray_index(&self, r: &ExactVector) -> Option<usize> {
        let c = r.canonical_ray()?;
        self.rays.binary_search(&c).ok()
    }

    pub fn contains(&self, x: &ExactVector) -> bool {
        self.facets.iter().all(|f| f.normal.dot(x).signum() >= 0)
    }

    pub fn contains_in_interior(&self, x: &ExactVector) -> bool {
        self.facets.iter().all(|f| f.normal.dot(x).signum() > 0)
    }

    pub fn is_simplex_cone(&self) -> bool {
        self.rays.len() == self.dim()
    }

    pub fn face_lattice(&self) -> FaceLattice {
        FaceLattice::of(self)
    }
}

/// One face of a cone, identified by the rays it contains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub rays: Vec<u32>,
    /// Dimension of the face as a cone.
    pub dim: usize,
    /// Facets of the cone containing this face.
    pub facets: Vec<usize>,
    /// Faces of dimension `dim - 1` inside this one.
    pub subfaces: Vec<usize>,
}

impl Face {
    pub fn is_simplex(&self) -> bool {
        self.rays.len() == self.dim
    }
}

/// All nonzero faces, sorted by dimension then ray set.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    faces: Vec<Face>,
    index: HashMap<Vec<u32>, usize>,
}

impl FaceLattice {
    fn of(cone: &PolyCone) -> Self {
        let m = cone.dim();
        let nf = cone.facets.len();
        let containing = |rays: &[u32]| -> Vec<usize> {
            (0..nf).filter(|&f| rays.iter().all(|r| cone.facets[f].rays.binary_search(r).is_ok())).collect()
        };
        let top: Vec<u32> = (0..cone.rays.len() as u32).collect();
        let mut levels: Vec<Vec<Vec<u32>>> = vec![Vec::new(); m + 1];
        levels[m].push(top);
        for d in (2..=m).rev() {
            let mut next: Vec<Vec<u32>> = Vec::new();
            for f in &levels[d] {
                let mut cands: Vec<Vec<u32>> = Vec::new();
                for facet in &cone.facets {
                    let inter: Vec<u32> = f.iter().copied().filter(|r| facet.rays.binary_search(r).is_ok()).collect();
                    if inter.len() < f.len() && !inter.is_empty() {
                        cands.push(inter);
                    }
                }
                cands.sort();
                cands.dedup();
                for c in &cands {
                    let maximal = !cands.iter().any(|o| o.len() > c.len() && c.iter().all(|x| o.binary_search(x).is_ok()));
                    if maximal {
                        next.push(c.clone());
                    }
                }
            }
            next.sort();
            next.dedup();
            levels[d - 1] = next;
        }
        let mut faces = Vec::new();
        let mut index = HashMap::new();
        for (d, lvl) in levels.iter().enumerate().skip(1) {
            for rays in lvl {
                index.insert(rays.clone(), faces.len());
                faces.push(Face { rays: rays.clone(), dim: d, facets: containing(rays), subfaces: Vec::new() });
            }
        }
        for i in 0..faces.len() {
            if faces[i].dim < 2 {
                continue;
            }
            let d = faces[i].dim;
            let mine = faces[i].rays.clone();
            let subs: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, g)| g.dim + 1 == d && g.rays.iter().all(|r| mine.binary_search(r).is_ok()))
                .map(|(j, _)| j)
                .collect();
            faces[i].subfaces = subs;
        }
        FaceLattice { faces, index }
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn index_of(&self, rays: &[u32]) -> Option<usize> {
        self.index.get(rays).copied()
    }

    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    /// Number of faces of each dimension `1..=m`.
    pub fn f_vector(&self) -> Vec<usize> {
        let m = self.faces.last().map_or(0, |f| f.dim);
        (1..=m).map(|d| self.faces.iter().filter(|f| f.dim == d).count()).collect()
    }

    /// Rays `a` such that the face is a pyramid with apex `a`.
    pub fn apexes(&self, i: usize) -> Vec<u32> {
        let f = &self.faces[i];
        f.rays
            .iter()
            .copied()
            .filter(|&a| {
                let rest: Vec<u32> = f.rays.iter().copied().filter(|&r| r != a).collect();
                f.subfaces.iter().any(|&s| self.faces[s].rays == rest)
            })
            .collect()
    }
}

/// A Dirichlet domain `{x : (v0 - g v0) . x >= 0 for all g}`.
#[derive(Clone, Debug)]
pub struct DirichletDomain {
    pub base_point: ExactVector,
    pub cone: PolyCone,
    /// For facet `i`, the element `h` with normal `v0 - h v0`.
    pub facet_elements: Vec<usize>,
}

impl DirichletDomain {
    pub fn facet_of_element(&self, h: usize) -> Option<usize> {
        self.facet_elements.iter().position(|&e| e == h)
    }
}

/// Dirichlet domain of `g` at the base point `v0`.
pub fn dirichlet_domain(g: &FiniteMatrixGroup, v0: &ExactVector) -> Result<DirichletDomain, PolytopeError> {
    if v0.len() != g.ambient_dim() || !g.subspace().contains(v0) || v0.is_zero() {
        return Err(PolytopeError::BasePointOutsideSubspace);
    }
    let mut normals = Vec::new();
    let mut elems = Vec::new();
    for h in 0..g.order() {
        if h == g.identity() {
            continue;
        }
        let n = v0.sub(&g.act(h, v0));
        if n.is_zero() {
            return Err(PolytopeError::NonGenericBasePoint { element: h });
        }
        normals.push(n);
        elems.push(h);
    }
    let (cone, row_facet) = PolyCone::from_inequalities(g.subspace(), &normals)?;
    let mut facet_elements = vec![usize::MAX; cone.facets.len()];
    for (row, f) in row_facet.iter().enumerate() {
        if let Some(f) = *f {
            if facet_elements[f] == usize::MAX || elems[row] < facet_elements[f] {
                facet_elements[f] = elems[row];
            }
        }
    }
    Ok(DirichletDomain { base_point: v0.clone(), cone, facet_elements })
}

/// First vector `x = sum y_i b_i` (coordinates `y` in `[-3, 3]`, lexicographic
/// order, `b_i` the working-subspace basis) that no non-identity element fixes.
pub fn default_base_point(g: &FiniteMatrixGroup) -> Result<ExactVector, PolytopeError> {
    let m = g.dim();
    let mut y = vec![-3i64; m];
    loop {
        let x = g.subspace().from_coords(&ExactVector::from_ints(&y));
        if !x.is_zero() && (0..g.order()).all(|h| h == g.identity() || g.act(h, &x) != x) {
            return Ok(x);
        }
        let mut k = m;
        loop {
            if k == 0 {
                return Err(PolytopeError::NoBasePointFound);
            }
            k -= 1;
            if y[k] < 3 {
                y[k] += 1;
                break;
            }
            y[k] = -3;
        }
    }
}

/// A facet identification `h^{-1}: P_facet -> P_partner`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub facet: usize,
    pub partner: usize,
    /// Group element carrying `facet` onto `partner`.
    pub element: usize,
    /// Cycle notation when the element is a permutation matrix.
    pub permutation: Option<String>,
    /// Pairs `(ray, image ray)` of domain ray indices.
    pub ray_map: Vec<(u32, u32)>,
}

/// Facet pairings of a Dirichlet domain.
pub fn boundary_identifications(g: &FiniteMatrixGroup, d: &DirichletDomain) -> Result<Vec<Identification>, PolytopeError> {
    let cone = &d.cone;
    let mut out = Vec::new();
    for (i, facet) in cone.facets.iter().enumerate() {
        let h = d.facet_elements[i];
        let hinv = g.inverse(h);
        let partner = d.facet_of_element(hinv).ok_or(PolytopeError::UnpairedFacet { facet: i })?;
        let mut ray_map = Vec::new();
        for &r in &facet.rays {
            let img = g.act(hinv, &cone.rays[r as usize]);
            let j = cone.ray_index(&img).ok_or(PolytopeError::UnpairedFacet { facet: i })?;
            if cone.facets[partner].rays.binary_search(&(j as u32)).is_err() {
                return Err(PolytopeError::UnpairedFacet { facet: i });
            }
            ray_map.push((r, j as u32));
        }
        let permutation = as_permutation(g.element(hinv)).map(|p| cycle_notation(&p));
        out.push(Identification { facet: i, partner, element: hinv, permutation, ray_map });
    }
    Ok(out)
}

/// A vertex of a domain triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriVertex {
    Ray(u32),
    /// Inserted point in the relative interior of a face (face lattice index).
    Barycenter(usize),
}

/// Triangulation of a domain cone, vertices numbered rays first.
#[derive(Clone, Debug)]
pub struct ConeTriangulation {
    pub vertices: Vec<TriVertex>,
    pub complex: SimplicialComplex,
    pub boundary: SimplicialComplex,
    /// Ray the face was coned from, for faces triangulated without a new vertex.
    pub apex: Vec<Option<u32>>,
    /// Maximal simplices of each face's triangulation.
    pub face_simplices: Vec<Vec<Vec<u32>>>,
}

impl ConeTriangulation {
    /// Triangulates every face by increasing dimension: simplices stay as they are;
    /// a face that is a pyramid over exactly one apex `a` is coned from `a` when all
    /// its non-simplex faces through `a` were coned from `a` too; any other face gets
    /// a barycenter coned over its triangulated boundary. The whole cone always gets
    /// a barycenter unless it is a simplex.
    pub fn of(lattice: &FaceLattice, n_rays: usize) -> Self {
        let faces = lattice.faces();
        let top = lattice.top();
        let mut vertices: Vec<TriVertex> = (0..n_rays as u32).map(TriVertex::Ray).collect();
        let mut apex: Vec<Option<u32>> = vec![None; faces.len()];
        let mut tri: Vec<Vec<Vec<u32>>> = vec![Vec::new(); faces.len()];
        for (i, f) in faces.iter().enumerate() {
            if f.is_simplex() {
                tri[i] = vec![f.rays.clone()];
                continue;
            }
            let ap = lattice.apexes(i);
            let coned = if i != top && ap.len() == 1 {
                let a = ap[0];
                let ok = f.subfaces.iter().all(|&s| {
                    let g = &faces[s];
                    g.is_simplex() || g.rays.binary_search(&a).is_err() || apex[s] == Some(a)
                });
                ok.then_some(a)
            } else {
                None
            };
            match coned {
                Some(a) => {
                    apex[i] = Some(a);
                    let rest: Vec<u32> = f.rays.iter().copied().filter(|&r| r != a).collect();
                    let base = lattice.index_of(&rest).expect("pyramid base");
                    tri[i] = tri[base]
                        .iter()
                        .map(|s| {
                            let mut t = s.clone();
                            t.push(a);
                            t.sort_unstable();
                            t
                        })
                        .collect();
                }
                None => {
                    let b = vertices.len() as u32;
                    vertices.push(TriVertex::Barycenter(i));
                    let mut simplices = Vec::new();
                    for &s in &f.subfaces {
                        for t in &tri[s] {
                            let mut t = t.clone();
                            t.push(b);
                            simplices.push(t);
                        }
                    }
                    tri[i] = simplices;
                }
            }
        }
        let n = vertices.len();
        let complex = SimplicialComplex::from_facets(n, &tri[top]);
        let bfacets: Vec<Vec<u32>> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.dim + 1 == faces[top].dim)
            .flat_map(|(i, _)| tri[i].clone())
            .collect();
        let boundary = SimplicialComplex::from_facets(n, bfacets);
        ConeTriangulation { vertices, complex, boundary, apex, face_simplices: tri }
    }

    /// Geometric position of every vertex: rays as given, barycenters as the sum of their face's rays.
    pub fn realization(&self, lattice: &FaceLattice, rays: &[ExactVector]) -> Vec<ExactVector> {
        self.vertices
            .iter()
            .map(|v| match *v {
                TriVertex::Ray(r) => rays[r as usize].clone(),
                TriVertex::Barycenter(f) => {
                    lattice.face(f).rays.iter().fold(ExactVector::zeros(rays[0].len()), |acc, &r| acc.add(&rays[r as usize]))
                }
            })
            .collect()
    }
}

/// Evidence that a pairing carries the triangulation of one facet onto its partner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingWitness {
    pub facet: usize,
    pub partner: usize,
    pub element: usize,
    /// Images of the triangulation vertices of the facet.
    pub vertex_map: Vec<(u32, u32)>,
    pub simplices: usize,
}

/// Pairing-compatible triangulation of the boundary of a Dirichlet domain, with
/// the full cone triangulation and a witness per pairing.
pub fn triangulate_boundary(
    g: &FiniteMatrixGroup,
    d: &DirichletDomain,
) -> Result<(ConeTriangulation, Vec<PairingWitness>), PolytopeError> {
    let lattice = d.cone.face_lattice();
    let tri = ConeTriangulation::of(&lattice, d.cone.rays().len());
    let idents = boundary_identifications(g, d)?;
    let bary_of: HashMap<usize, u32> =
        tri.vertices.iter().enumerate().filter_map(|(i, v)| if let TriVertex::Barycenter(f) = v { Some((*f, i as u32)) } else { None }).collect();
    let mut witnesses = Vec::new();
    for id in &idents {
        let rmap: HashMap<u32, u32> = id.ray_map.iter().copied().collect();
        let fidx = lattice.index_of(&d.cone.facets()[id.facet].rays).expect("facet face");
        let pidx = lattice.index_of(&d.cone.facets()[id.partner].rays).expect("partner face");
        let mut vmap: HashMap<u32, u32> = HashMap::new();
        let bad = PolytopeError::IncompatibleTriangulation { facet: id.facet };
        for s in &tri.face_simplices[fidx] {
            for &v in s {
                let img = match tri.vertices[v as usize] {
                    TriVertex::Ray(r) => rmap[&r],
                    TriVertex::Barycenter(f) => {
                        let mut r: Vec<u32> = lattice.face(f).rays.iter().map(|x| rmap[x]).collect();
                        r.sort_unstable();
                        let face = lattice.index_of(&r).ok_or(bad.clone())?;
                        *bary_of.get(&face).ok_or(bad.clone())?
                    }
                };
                vmap.insert(v, img);
            }
        }
        let mut imgs: Vec<Vec<u32>> = tri.face_simplices[fidx]
            .iter()
            .map(|s| {
                let mut t: Vec<u32> = s.iter().map(|v| vmap[v]).collect();
                t.sort_unstable();
                t
            })
            .collect();
        imgs.sort();
        let mut target = tri.face_simplices[pidx].clone();
        target.sort();
        if imgs != target {
            return Err(bad);
        }
        let mut vertex_map: Vec<(u32, u32)> = vmap.into_iter().collect();
        vertex_map.sort_unstable();
        witnesses.push(PairingWitness { facet: id.facet, partner: id.partner, element: id.element, vertex_map, simplices: target.len() });
    }
    Ok((tri, witnesses))
}

/// Domain report, as emitted by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainReport {
    pub group: String,
    pub base_point: ExactVector,
    pub inequalities: Vec<ExactVector>,
    pub rays: Vec<ExactVector>,
    pub facets: Vec<Facet>,
    pub face_f_vector: Vec<usize>,
    pub identifications: Vec<Identification>,
}

pub fn domain_report(g: &FiniteMatrixGroup, d: &DirichletDomain) -> Result<DomainReport, PolytopeError> {
    Ok(DomainReport {
        group: g.name().to_string(),
        base_point: d.base_point.clone(),
        inequalities: d.cone.facets().iter().map(|f| f.normal.clone()).collect(),
        rays: d.cone.rays().to_vec(),
        facets: d.cone.facets().to_vec(),
        face_f_vector: d.cone.face_lattice().f_vector(),
        identifications: boundary_identifications(g, d)?,
    })
}

/// The triangulation `K = G . T(Lambda)` of the unit sphere of the working subspace.
#[derive(Clone, Debug)]
pub struct SphereTriangulation {
    pub complex: SimplicialComplex,
    pub action: VertexAction,
    /// Domain triangulation vertex -> vertex of `complex`.
    pub domain_vertex: Vec<u32>,
    /// Maximal simplices of `T(Lambda)` in the numbering of `complex`.
    pub domain_facets: Vec<Vec<u32>>,
    /// Vertex of `complex` for the barycenter of the whole domain, if any.
    pub interior_vertex: Option<u32>,
    /// Geometric position of every vertex.
    pub positions: Vec<ExactVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum GlobalKey {
    Ray(u32),
    Bary(Vec<u32>),
}

impl SphereTriangulation {
    pub fn new(g: &FiniteMatrixGroup, d: &DirichletDomain) -> Result<Self, PolytopeError> {
        let (tri, _) = triangulate_boundary(g, d)?;
        let lattice = d.cone.face_lattice();
        Self::from_parts(g, d, &lattice, &tri)
    }

    pub fn from_parts(g: &FiniteMatrixGroup, d: &DirichletDomain, lattice: &FaceLattice, tri: &ConeTriangulation) -> Result<Self, PolytopeError> {
        let rays = d.cone.rays();
        let order = g.order();
        // images of local rays under every element
        let images: Vec<Vec<ExactVector>> =
            (0..order).map(|h| rays.iter().map(|r| g.act(h, r).canonical_ray().expect("nonzero")).collect()).collect();
        let mut global: Vec<ExactVector> = images.iter().flatten().cloned().collect();
        global.sort();
        global.dedup();
        let gid = |v: &ExactVector| global.binary_search(v).expect("ray orbit") as u32;
        let loc2glob: Vec<Vec<u32>> = images.iter().map(|row| row.iter().map(gid).collect()).collect();
        let key_of = |h: usize, v: &TriVertex| -> GlobalKey {
            match *v {
                TriVertex::Ray(r) => GlobalKey::Ray(loc2glob[h][r as usize]),
                TriVertex::Barycenter(f) => {
                    let mut s: Vec<u32> = lattice.face(f).rays.iter().map(|&r| loc2glob[h][r as usize]).collect();
                    s.sort_unstable();
                    GlobalKey::Bary(s)
                }
            }
        };
        let mut keys: Vec<GlobalKey> = (0..order).flat_map(|h| tri.vertices.iter().map(move |v| (h, v))).map(|(h, v)| key_of(h, v)).collect();
        keys.sort_by(|a, b| match (a, b) {
            (GlobalKey::Bary(x), GlobalKey::Bary(y)) => x.len().cmp(&y.len()).then(x.cmp(y)),
            _ => a.cmp(b),
        });
        keys.dedup();
        let kid: HashMap<GlobalKey, u32> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i as u32)).collect();
        let vmaps: Vec<Vec<u32>> = (0..order).map(|h| tri.vertices.iter().map(|v| kid[&key_of(h, v)]).collect()).collect();
        let tops = tri.complex.maximal_simplices();
        let facets: Vec<Vec<u32>> = vmaps.iter().flat_map(|vm| tops.iter().map(move |s| s.iter().map(|&v| vm[v as usize]).collect::<Vec<u32>>())).collect();
        let complex = SimplicialComplex::from_facets(keys.len(), &facets);
        // ray permutation of each element, then the induced vertex permutation
        let global_images: Vec<Vec<u32>> = (0..order).map(|h| global.iter().map(|v| gid(&g.act(h, v).canonical_ray().expect("nonzero"))).collect()).collect();
        let perms: Vec<Vec<u32>> = global_images
            .iter()
            .map(|rp| {
                keys.iter()
                    .map(|k| match k {
                        GlobalKey::Ray(r) => kid[&GlobalKey::Ray(rp[*r as usize])],
                        GlobalKey::Bary(s) => {
                            let mut t: Vec<u32> = s.iter().map(|&r| rp[r as usize]).collect();
                            t.sort_unstable();
                            kid[&GlobalKey::Bary(t)]
                        }
                    })
                    .collect()
            })
            .collect();
        let action = VertexAction::new(keys.len(), perms).map_err(|_| PolytopeError::NotPointed)?;
        let positions = keys
            .iter()
            .map(|k| match k {
                GlobalKey::Ray(r) => global[*r as usize].clone(),
                GlobalKey::Bary(s) => s.iter().fold(ExactVector::zeros(g.ambient_dim()), |acc, &r| acc.add(&global[r as usize])),
            })
            .collect();
        let idm = &vmaps[g.identity()];
        let domain_facets: Vec<Vec<u32>> = tops
            .iter()
            .map(|s| {
                let mut t: Vec<u32> = s.iter().map(|&v| idm[v as usize]).collect();
                t.sort_unstable();
                t
            })
            .collect();
        let interior_vertex = tri.vertices.iter().position(|v| *v == TriVertex::Barycenter(lattice.top())).map(|i| idm[i]);
        Ok(SphereTriangulation { complex, action, domain_vertex: idm.clone(), domain_facets, interior_vertex, positions })
    }
}

/// Elements `g` with `g^{-1} x` in the domain, i.e. the translates containing `x`.
pub fn locate(g: &FiniteMatrixGroup, d: &DirichletDomain, x: &ExactVector) -> Vec<usize> {
    (0..g.order()).filter(|&h| d.cone.contains(&g.act(g.inverse(h), x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_in, parse_cycles};
    use proptest::prelude::*;

    fn perm_group(n: usize, gens: &[&str]) -> FiniteMatrixGroup {
        let mats: Vec<ExactMatrix> = gens.iter().map(|s| ExactMatrix::permutation(&parse_cycles(s, n).unwrap())).collect();
        enumerate_in(&mats, LinearSubspace::sum_zero(n), None).unwrap()
    }

    #[test]
    fn cube_from_inequalities() {
        // x_i >= 0 plus redundant x1 + x2 >= 0
        let s = LinearSubspace::full(3);
        let normals = vec![
            ExactVector::from_ints(&[1, 0, 0]),
            ExactVector::from_ints(&[0, 1, 0]),
            ExactVector::from_ints(&[1, 1, 0]),
            ExactVector::from_ints(&[0, 0, 1]),
        ];
        let (c, rows) = PolyCone::from_inequalities(&s, &normals).unwrap();
        assert_eq!(c.rays().len(), 3);
        assert_eq!(c.facets().len(), 3);
        assert_eq!(rows[2], None);
    }

    #[test]
    fn square_pyramid_lattice() {
        // cone over a square: rays (+-1, +-1, 1)
        let s = LinearSubspace::full(3);
        let rays: Vec<ExactVector> = [[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]].iter().map(|r| ExactVector::from_ints(r)).collect();
        let c = PolyCone::from_rays(&s, &rays).unwrap();
        assert_eq!(c.facets().len(), 4);
        let l = c.face_lattice();
        assert_eq!(l.f_vector(), vec![4, 4, 1]);
        let t = ConeTriangulation::of(&l, 4);
        // square gets a barycenter: 4 triangles
        assert_eq!(t.complex.num_simplices(2), 4);
        assert_eq!(t.vertices.len(), 5);
    }

    #[test]
    fn not_pointed_cone() {
        let s = LinearSubspace::full(2);
        let r = PolyCone::from_inequalities(&s, &[ExactVector::from_ints(&[1, 0])]);
        assert_eq!(r.unwrap_err(), PolytopeError::NotPointed);
    }

    #[test]
    fn s3_domain_is_chamber() {
        let g = perm_group(3, &["(12)", "(23)"]);
        let v0 = default_base_point(&g).unwrap();
        let d = dirichlet_domain(&g, &v0).unwrap();
        assert_eq!(d.cone.facets().len(), 2);
        assert!(d.cone.is_simplex_cone());
        assert!(d.cone.contains_in_interior(&v0));
        let ids = boundary_identifications(&g, &d).unwrap();
        assert!(ids.iter().all(|i| i.facet == i.partner));
    }

    #[test]
    fn fixed_base_point_rejected() {
        let g = perm_group(3, &["(12)", "(23)"]);
        let v = ExactVector::from_ints(&[1, 1, -2]);
        assert!(matches!(dirichlet_domain(&g, &v), Err(PolytopeError::NonGenericBasePoint { .. })));
    }

    #[test]
    fn a4_domain_pairings_and_sphere() {
        let g = perm_group(4, &["(123)", "(12)(34)"]);
        let v0 = default_base_point(&g).unwrap();
        let d = dirichlet_domain(&g, &v0).unwrap();
        let ids = boundary_identifications(&g, &d).unwrap();
        for id in &ids {
            assert_eq!(ids[id.partner].partner, id.facet);
        }
        let st = SphereTriangulation::new(&g, &d).unwrap();
        assert_eq!(st.complex.euler_characteristic(), 2);
        st.action.check_simplicial(&st.complex).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn dd_round_trip(pts in prop::collection::vec(prop::collection::vec(1i64..6, 3), 4..9)) {
            // rays in the open positive octant, so the cone is pointed
            let s = LinearSubspace::full(3);
            let rays: Vec<ExactVector> = pts.iter().map(|p| ExactVector::from_ints(p)).collect();
            let span = ExactMatrix::from_rows(rays.iter().map(|r| r.0.clone()).collect()).unwrap();
            prop_assume!(span.rank() == 3);
            let c = PolyCone::from_rays(&s, &rays).unwrap();
            let normals: Vec<ExactVector> = c.facets().iter().map(|f| f.normal.clone()).collect();
            let (back, _) = PolyCone::from_inequalities(&s, &normals).unwrap();
            prop_assert_eq!(back.rays(), c.rays());
            let again = PolyCone::from_rays(&s, back.rays()).unwrap();
            prop_assert_eq!(again.facets(), c.facets());
            for r in &rays {
                prop_assert!(c.contains(r));
            }
        }
    }
}
