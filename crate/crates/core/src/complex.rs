//! Finite abstract simplicial complexes, group actions on them, barycentric
//! subdivision, regularity and quotients.
//!
//! Simplices are sorted `u32` vertex lists. Each dimension is stored as one
//! flat, lexicographically sorted table, so lookups are binary searches.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("group element {element} does not map simplex {simplex:?} to a simplex")]
    NotSimplicial { element: usize, simplex: Vec<u32> },
    #[error("action is not regular: {0}")]
    NotRegular(Box<RegularityWitness>),
    #[error("no vertex {0}")]
    NoSuchVertex(u32),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("permutation {element} has length {found}, expected {expected}")]
    BadPermutation { element: usize, expected: usize, found: usize },
}

/// All `k`-simplices of a complex, as one sorted flat array.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplexTable {
    width: usize,
    data: Vec<u32>,
}

fn sort_chunks<const W: usize>(data: Vec<u32>) -> Vec<u32> {
    let mut rows: Vec<[u32; W]> = data.chunks_exact(W).map(|c| c.try_into().expect("chunk width")).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.into_iter().flatten().collect()
}

fn sort_chunks_dyn(width: usize, data: Vec<u32>) -> Vec<u32> {
    let mut rows: Vec<&[u32]> = data.chunks_exact(width).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.concat()
}

impl SimplexTable {
    /// Builds a table from vertex lists that are each already sorted.
    pub fn from_rows(width: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len() % width.max(1), 0);
        let data = match width {
            1 => sort_chunks::<1>(data),
            2 => sort_chunks::<2>(data),
            3 => sort_chunks::<3>(data),
            4 => sort_chunks::<4>(data),
            5 => sort_chunks::<5>(data),
            6 => sort_chunks::<6>(data),
            7 => sort_chunks::<7>(data),
            8 => sort_chunks::<8>(data),
            9 => sort_chunks::<9>(data),
            _ => sort_chunks_dyn(width, data),
        };
        SimplexTable { width, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u32> {
        self.data.chunks_exact(self.width.max(1))
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        if s.len() != self.width {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(s) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    n_vertices: usize,
    labels: Option<Vec<String>>,
    tables: Vec<SimplexTable>,
}

/// Returns `s` with position `skip` removed.
pub(crate) fn without(s: &[u32], skip: usize) -> Vec<u32> {
    s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The complex generated by `facets` on vertices `0..n_vertices`.
    /// Vertices not covered by a facet are kept as isolated points.
    pub fn from_facets<I, S>(n_vertices: usize, facets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut by_dim: Vec<Vec<u32>> = Vec::new();
        for f in facets {
            let mut f = f.as_ref().to_vec();
            if f.is_empty() {
                continue;
            }
            f.sort_unstable();
            f.dedup();
            assert!(f.iter().all(|&v| (v as usize) < n_vertices), "facet vertex out of range");
            if by_dim.len() < f.len() {
                by_dim.resize(f.len(), Vec::new());
            }
            by_dim[f.len() - 1].extend(f);
        }
        if n_vertices > 0 && by_dim.is_empty() {
            by_dim.push(Vec::new());
        }
        let top = by_dim.len();
        let mut tables: Vec<SimplexTable> = vec![SimplexTable::default(); top];
        for k in (0..top).rev() {
            let w = k + 1;
            let mut data = std::mem::take(&mut by_dim[k]);
            if k + 1 < top {
                let up = &tables[k + 1];
                data.reserve(up.len() * (w + 1) * w);
                for s in up.iter() {
                    for skip in 0..s.len() {
                        data.extend(s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                    }
                }
            }
            if k == 0 {
                data = (0..n_vertices as u32).collect();
            }
            tables[k] = SimplexTable::from_rows(w, data);
        }
        SimplicialComplex { n_vertices, labels: None, tables }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n_vertices);
        self.labels = Some(labels);
        self
    }

    /// The boundary of the standard `d`-simplex on vertices `0..=d`.
    pub fn simplex_boundary(d: usize) -> Self {
        let facets: Vec<Vec<u32>> = (0..=d).map(|skip| (0..=d as u32).filter(|&v| v as usize != skip).collect()).collect();
        Self::from_facets(d + 1, facets)
    }

    /// The full `d`-simplex on vertices `0..=d`.
    pub fn simplex(d: usize) -> Self {
        Self::from_facets(d + 1, [(0..=d as u32).collect::<Vec<_>>()])
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Dimension, or -1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.tables.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.n_vertices == 0
    }

    pub fn table(&self, k: usize) -> &SimplexTable {
        &self.tables[k]
    }

    pub fn num_simplices(&self, k: usize) -> usize {
        self.tables.get(k).map_or(0, SimplexTable::len)
    }

    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &[u32]> {
        self.tables.get(k).into_iter().flat_map(SimplexTable::iter)
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        self.tables.get(s.len().checked_sub(1)?)?.index_of(s)
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        s.is_empty() || self.index_of(s).is_some()
    }

    pub fn total_simplices(&self) -> usize {
        self.tables.iter().map(SimplexTable::len).sum()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.tables.iter().map(SimplexTable::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.tables.iter().enumerate().map(|(k, t)| if k % 2 == 0 { t.len() as i64 } else { -(t.len() as i64) }).sum()
    }

    pub fn label(&self, v: u32) -> String {
        match &self.labels {
            Some(l) => l[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Simplices that are not a face of a larger simplex, by increasing dimension.
    pub fn maximal_simplices(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for k in 0..self.tables.len() {
            let mut covered = vec![false; self.tables[k].len()];
            if k + 1 < self.tables.len() {
                for s in self.tables[k + 1].iter() {
                    for skip in 0..s.len() {
                        let f = without(s, skip);
                        covered[self.tables[k].index_of(&f).expect("closed under faces")] = true;
                    }
                }
            }
            for (i, s) in self.tables[k].iter().enumerate() {
                if !covered[i] {
                    out.push(s.to_vec());
                }
            }
        }
        out
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.maximal_simplices().iter().all(|s| s.len() as isize == d + 1)
    }

    /// The subcomplex generated by codimension-one faces lying in exactly one top simplex.
    pub fn boundary(&self) -> SimplicialComplex {
        let d = self.dim();
        if d < 1 {
            return SimplicialComplex::empty();
        }
        let d = d as usize;
        let mut counts = vec![0u32; self.tables[d - 1].len()];
        for s in self.tables[d].iter() {
            for skip in 0..s.len() {
                counts[self.tables[d - 1].index_of(&without(s, skip)).expect("face")] += 1;
            }
        }
        let faces: Vec<&[u32]> = self.tables[d - 1].iter().zip(&counts).filter(|(_, &c)| c == 1).map(|(s, _)| s).collect();
        self.subcomplex_on_used_vertices(faces)
    }

    /// The subcomplex generated by `faces`, keeping vertex numbering and labels
    /// of `self` (unused vertices become isolated points).
    pub fn subcomplex<I, S>(&self, faces: I) -> SimplicialComplex
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut k = SimplicialComplex::from_facets(self.n_vertices, faces);
        k.labels = self.labels.clone();
        k
    }

    /// The subcomplex generated by `faces`, with vertices renumbered to the
    /// used ones (in increasing order). Labels follow the original vertices.
    pub fn subcomplex_on_used_vertices<I, S>(&self, faces: I) -> SimplicialComplex
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let faces: Vec<Vec<u32>> = faces.into_iter().map(|f| f.as_ref().to_vec()).collect();
        let mut used: Vec<u32> = faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        self.induced_on(&used, &faces).0
    }

    /// Renumbers `faces` onto the sorted vertex list `used`; returns the complex
    /// and `used` as the map back to original vertex ids.
    fn induced_on(&self, used: &[u32], faces: &[Vec<u32>]) -> (SimplicialComplex, Vec<u32>) {
        let pos: HashMap<u32, u32> = used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let renum: Vec<Vec<u32>> = faces.iter().map(|f| f.iter().map(|v| pos[v]).collect()).collect();
        let mut k = SimplicialComplex::from_facets(used.len(), renum);
        k.labels = Some(used.iter().map(|&v| self.label(v)).collect());
        (k, used.to_vec())
    }

    /// Full subcomplex on the vertices where `keep` is true, with original numbering.
    pub fn full_subcomplex(&self, keep: &[bool]) -> SimplicialComplex {
        let faces: Vec<Vec<u32>> = self.maximal_faces_within(keep);
        self.subcomplex(faces)
    }

    fn maximal_faces_within(&self, keep: &[bool]) -> Vec<Vec<u32>> {
        self.tables.iter().flat_map(|t| t.iter()).filter(|s| s.iter().all(|&v| keep[v as usize])).map(<[u32]>::to_vec).collect()
    }

    /// Link of a vertex, renumbered, with a map back to original vertex ids.
    pub fn link(&self, v: u32) -> Result<(SimplicialComplex, Vec<u32>), ComplexError> {
        if v as usize >= self.n_vertices {
            return Err(ComplexError::NoSuchVertex(v));
        }
        Ok(self.link_of(&[v]))
    }

    /// Link of an arbitrary simplex (which must belong to the complex).
    pub fn link_of(&self, tau: &[u32]) -> (SimplicialComplex, Vec<u32>) {
        let mut faces = Vec::new();
        for t in self.tables.iter().skip(tau.len()) {
            for s in t.iter() {
                if tau.iter().all(|x| s.binary_search(x).is_ok()) {
                    faces.push(s.iter().copied().filter(|x| !tau.contains(x)).collect::<Vec<u32>>());
                }
            }
        }
        let mut used: Vec<u32> = faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        self.induced_on(&used, &faces)
    }

    /// Cone with a new apex vertex (numbered last).
    pub fn cone(&self) -> SimplicialComplex {
        let apex = self.n_vertices as u32;
        let mut facets: Vec<Vec<u32>> = self
            .maximal_simplices()
            .into_iter()
            .map(|mut s| {
                s.push(apex);
                s
            })
            .collect();
        if facets.is_empty() {
            facets.push(vec![apex]);
        }
        let mut k = SimplicialComplex::from_facets(self.n_vertices + 1, facets);
        if let Some(l) = &self.labels {
            let mut l = l.clone();
            l.push("apex".into());
            k.labels = Some(l);
        }
        k
    }

    /// Barycentric subdivision. Vertex `offsets[k] + i` of the result is the
    /// barycenter of simplex `i` of dimension `k`.
    pub fn barycentric_subdivision(&self) -> (SimplicialComplex, Subdivision) {
        let mut offsets = Vec::with_capacity(self.tables.len() + 1);
        let mut acc = 0usize;
        for t in &self.tables {
            offsets.push(acc);
            acc += t.len();
        }
        offsets.push(acc);
        let mut facets: Vec<u32> = Vec::new();
        let mut by_len: Vec<Vec<u32>> = vec![Vec::new(); self.tables.len()];
        for s in self.maximal_simplices() {
            let mut chain = Vec::with_capacity(s.len());
            self.flags(&s, &offsets, &mut chain, &mut facets);
            by_len[s.len() - 1].append(&mut facets);
        }
        let all: Vec<Vec<u32>> = by_len
            .into_iter()
            .enumerate()
            .flat_map(|(k, d)| d.chunks_exact(k + 1).map(<[u32]>::to_vec).collect::<Vec<_>>())
            .collect();
        let sd = SimplicialComplex::from_facets(acc, all);
        (sd, Subdivision { offsets })
    }

    /// Appends all maximal flags below `s` (as sorted sd-vertex ids).
    fn flags(&self, s: &[u32], offsets: &[usize], chain: &mut Vec<u32>, out: &mut Vec<u32>) {
        let k = s.len() - 1;
        chain.push((offsets[k] + self.tables[k].index_of(s).expect("face")) as u32);
        if k == 0 {
            let mut c = chain.clone();
            c.sort_unstable();
            out.extend(c);
        } else {
            for skip in 0..s.len() {
                self.flags(&without(s, skip), offsets, chain, out);
            }
        }
        chain.pop();
    }

    /// Newline-delimited maximal simplices, vertices written as labels.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in self.maximal_simplices() {
            let line: Vec<String> = s.iter().map(|&v| self.label(v)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses the format written by [`Self::to_text`]. Blank lines and lines
    /// starting with `#` are skipped. Vertices are numbered by first appearance.
    pub fn from_text(text: &str) -> Result<Self, ComplexError> {
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut labels = Vec::new();
        let mut facets = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut f = Vec::new();
            for tok in line.split_whitespace() {
                let id = *ids.entry(tok.to_string()).or_insert_with(|| {
                    labels.push(tok.to_string());
                    (labels.len() - 1) as u32
                });
                if f.contains(&id) {
                    return Err(ComplexError::Parse { line: ln + 1, reason: format!("repeated vertex {tok}") });
                }
                f.push(id);
            }
            facets.push(f);
        }
        let n = labels.len();
        Ok(Self::from_facets(n, facets).with_labels(labels))
    }

    /// True if both complexes have the same simplices when written with labels.
    pub fn same_labelled(&self, other: &SimplicialComplex) -> bool {
        let set = |k: &SimplicialComplex| {
            let mut v: Vec<Vec<String>> = k
                .tables
                .iter()
                .flat_map(|t| t.iter())
                .map(|s| {
                    let mut l: Vec<String> = s.iter().map(|&x| k.label(x)).collect();
                    l.sort();
                    l
                })
                .collect();
            v.sort();
            v
        };
        set(self) == set(other)
    }

    /// Connected components of the 1-skeleton, as a component id per vertex.
    pub fn components(&self) -> (usize, Vec<u32>) {
        let n = self.n_vertices;
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for e in self.simplices(1) {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
        let mut comp = vec![u32::MAX; n];
        let mut count = 0;
        for v in 0..n as u32 {
            let r = find(&mut parent, v);
            if comp[r as usize] == u32::MAX {
                comp[r as usize] = count;
                count += 1;
            }
            comp[v as usize] = comp[r as usize];
        }
        (count as usize, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices > 0 && self.components().0 == 1
    }
}

/// Bookkeeping of a barycentric subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    /// `offsets[k]` is the first subdivided vertex coming from a `k`-simplex.
    pub offsets: Vec<usize>,
}

impl Subdivision {
    /// The `(dimension, index)` of the simplex whose barycenter is vertex `v`.
    pub fn origin(&self, v: u32) -> (usize, usize) {
        let v = v as usize;
        let k = self.offsets.partition_point(|&o| o <= v) - 1;
        (k, v - self.offsets[k])
    }

    pub fn vertex(&self, k: usize, i: usize) -> u32 {
        (self.offsets[k] + i) as u32
    }
}

/// Barycentric subdivision of a complex (kept for symmetry with the other entry points).
pub fn barycentric_subdivision(k: &SimplicialComplex) -> SimplicialComplex {
    k.barycentric_subdivision().0
}

/// A group acting on the vertices of a complex: `perms[g][v] = g(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexAction {
    perms: Vec<Vec<u32>>,
}

impl VertexAction {
    pub fn new(n_vertices: usize, perms: Vec<Vec<u32>>) -> Result<Self, ComplexError> {
        for (g, p) in perms.iter().enumerate() {
            if p.len() != n_vertices {
                return Err(ComplexError::BadPermutation { element: g, expected: n_vertices, found: p.len() });
            }
            let mut seen = vec![false; n_vertices];
            for &x in p {
                if x as usize >= n_vertices || std::mem::replace(&mut seen[x as usize], true) {
                    return Err(ComplexError::BadPermutation { element: g, expected: n_vertices, found: p.len() });
                }
            }
        }
        Ok(VertexAction { perms })
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn perm(&self, g: usize) -> &[u32] {
        &self.perms[g]
    }

    pub fn perms(&self) -> &[Vec<u32>] {
        &self.perms
    }

    pub fn act(&self, g: usize, s: &[u32]) -> Vec<u32> {
        let p = &self.perms[g];
        let mut out: Vec<u32> = s.iter().map(|&v| p[v as usize]).collect();
        out.sort_unstable();
        out
    }

    /// Restriction to the elements listed in `sub` (indices into `self`).
    pub fn restrict(&self, sub: &[usize]) -> VertexAction {
        VertexAction { perms: sub.iter().map(|&g| self.perms[g].clone()).collect() }
    }

    /// Vertex orbits: the least member of the orbit of each vertex.
    pub fn orbit_labels(&self) -> Vec<u32> {
        let n = self.perms.first().map_or(0, Vec::len);
        let mut label = vec![u32::MAX; n];
        for v in 0..n as u32 {
            if label[v as usize] != u32::MAX {
                continue;
            }
            for p in &self.perms {
                let w = p[v as usize] as usize;
                if label[w] == u32::MAX {
                    label[w] = v;
                }
            }
        }
        label
    }

    /// Checks that every element maps simplices to simplices.
    pub fn check_simplicial(&self, k: &SimplicialComplex) -> Result<(), ComplexError> {
        if self.perms.iter().any(|p| p.len() != k.n_vertices()) {
            return Err(ComplexError::BadPermutation { element: 0, expected: k.n_vertices(), found: self.perms[0].len() });
        }
        for s in k.maximal_simplices() {
            for g in 0..self.perms.len() {
                if !k.contains(&self.act(g, &s)) {
                    return Err(ComplexError::NotSimplicial { element: g, simplex: s });
                }
            }
        }
        Ok(())
    }

    /// The induced action on the barycentric subdivision.
    pub fn subdivide(&self, k: &SimplicialComplex, sd: &Subdivision) -> VertexAction {
        let perms = self
            .perms
            .iter()
            .enumerate()
            .map(|(g, _)| {
                let mut p = Vec::with_capacity(*sd.offsets.last().unwrap());
                for d in 0..=k.dim().max(-1) as usize {
                    for s in k.simplices(d) {
                        let img = self.act(g, s);
                        p.push(sd.vertex(d, k.table(d).index_of(&img).expect("simplicial action")));
                    }
                }
                p
            })
            .collect();
        VertexAction { perms }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityWitness {
    /// Two vertices of one simplex lie in the same orbit.
    SameOrbitVertices { simplex: Vec<u32>, u: u32, v: u32 },
    /// An element maps a simplex to itself without fixing it pointwise.
    Flipped { element: usize, simplex: Vec<u32> },
    /// Two simplices with vertex-wise equivalent vertices are not in one orbit
    /// of the (sub)group listed.
    Unrelated { subgroup: Vec<usize>, first: Vec<u32>, second: Vec<u32> },
}

impl std::fmt::Display for RegularityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegularityWitness::SameOrbitVertices { simplex, u, v } => write!(f, "vertices {u} and {v} of {simplex:?} are in one orbit"),
            RegularityWitness::Flipped { element, simplex } => write!(f, "element {element} moves {simplex:?} onto itself non-trivially"),
            RegularityWitness::Unrelated { subgroup, first, second } => {
                write!(f, "{first:?} and {second:?} are vertex-wise equivalent but not related by a single element of a subgroup of order {}", subgroup.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub condition_a: bool,
    pub condition_b: bool,
    pub subgroups_checked: usize,
    pub witness: Option<RegularityWitness>,
}

/// Checks that orbit labels of vertices identify orbits of simplices for the
/// group `sub` (indices into `action`).
fn check_b_for(k: &SimplicialComplex, action: &VertexAction, sub: &[usize]) -> Option<RegularityWitness> {
    let a = action.restrict(sub);
    let labels = a.orbit_labels();
    for d in 1..=k.dim().max(0) as usize {
        let mut by_label: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for s in k.simplices(d) {
            let mut l: Vec<u32> = s.iter().map(|&v| labels[v as usize]).collect();
            l.sort_unstable();
            match by_label.get(&l) {
                None => {
                    by_label.insert(l, s.to_vec());
                }
                Some(rep) => {
                    if !(0..a.order()).any(|g| a.act(g, rep) == s) {
                        return Some(RegularityWitness::Unrelated { subgroup: sub.to_vec(), first: rep.clone(), second: s.to_vec() });
                    }
                }
            }
        }
    }
    None
}

/// Regularity of a simplicial action. `subgroups` lists extra subgroups (as
/// element index lists) on which the second condition is also tested; the
/// whole group is always tested.
pub fn is_regular_action(k: &SimplicialComplex, action: &VertexAction, subgroups: &[Vec<usize>]) -> Result<RegularityReport, ComplexError> {
    action.check_simplicial(k)?;
    let labels = action.orbit_labels();
    let mut report = RegularityReport { regular: false, condition_a: true, condition_b: true, subgroups_checked: 0, witness: None };
    'outer: for d in 1..=k.dim().max(0) as usize {
        for s in k.simplices(d) {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    if labels[s[i] as usize] == labels[s[j] as usize] {
                        report.condition_a = false;
                        report.witness = Some(RegularityWitness::SameOrbitVertices { simplex: s.to_vec(), u: s[i], v: s[j] });
                        break 'outer;
                    }
                }
            }
        }
    }
    if report.condition_a {
        'a: for d in 1..=k.dim().max(0) as usize {
            for s in k.simplices(d) {
                for g in 0..action.order() {
                    let p = action.perm(g);
                    if action.act(g, s) == s && s.iter().any(|&v| p[v as usize] != v) {
                        report.condition_a = false;
                        report.witness = Some(RegularityWitness::Flipped { element: g, simplex: s.to_vec() });
                        break 'a;
                    }
                }
            }
        }
    }
    if report.condition_a {
        let whole: Vec<usize> = (0..action.order()).collect();
        for sub in std::iter::once(&whole).chain(subgroups) {
            report.subgroups_checked += 1;
            if let Some(w) = check_b_for(k, action, sub) {
                report.condition_b = false;
                report.witness = Some(w);
                break;
            }
        }
    }
    report.regular = report.condition_a && report.condition_b && report.witness.is_none();
    Ok(report)
}

/// A quotient complex with its projection from the original vertices.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub complex: SimplicialComplex,
    /// Quotient vertex of each original vertex.
    pub projection: Vec<u32>,
    /// Least original vertex of each orbit, i.e. the orbit label.
    pub representatives: Vec<u32>,
}

/// `K/G` for a regular action. Quotient vertices are numbered by their least
/// original member and labelled with that member's label.
pub fn quotient_complex(k: &SimplicialComplex, action: &VertexAction, subgroups: &[Vec<usize>]) -> Result<Quotient, ComplexError> {
    let report = is_regular_action(k, action, subgroups)?;
    if !report.regular {
        return Err(ComplexError::NotRegular(Box::new(report.witness.expect("witness for irregular action"))));
    }
    Ok(quotient_by_labels(k, &action.orbit_labels()))
}

/// Image of `k` under the vertex labelling `labels` (least orbit member per
/// vertex). No regularity check is made.
pub fn quotient_by_labels(k: &SimplicialComplex, labels: &[u32]) -> Quotient {
    let mut reps: Vec<u32> = labels.to_vec();
    reps.sort_unstable();
    reps.dedup();
    let pos: HashMap<u32, u32> = reps.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let projection: Vec<u32> = labels.iter().map(|l| pos[l]).collect();
    let facets: Vec<Vec<u32>> = k.maximal_simplices().into_iter().map(|s| s.iter().map(|&v| projection[v as usize]).collect()).collect();
    let complex = SimplicialComplex::from_facets(reps.len(), facets).with_labels(reps.iter().map(|&v| k.label(v)).collect());
    Quotient { complex, projection, representatives: reps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tetrahedron_boundary_subdivision() {
        let k = SimplicialComplex::simplex_boundary(3);
        assert_eq!(k.f_vector(), vec![4, 6, 4]);
        let (sd, info) = k.barycentric_subdivision();
        assert_eq!(sd.n_vertices(), 14);
        assert_eq!(sd.f_vector(), vec![14, 36, 24]);
        // flags vertex < edge < triangle, counted directly
        let flags: usize = k.simplices(2).map(|t| (0..3).map(|skip| without(t, skip).len()).sum::<usize>()).sum();
        assert_eq!(flags, 24);
        assert_eq!(info.origin(13), (2, 3));
        assert_eq!(info.origin(4), (1, 0));
    }

    #[test]
    fn subdivided_two_simplex_counts() {
        // sd(Delta^3): 15 vertices, 24 top simplices
        let (sd, _) = SimplicialComplex::simplex(3).barycentric_subdivision();
        assert_eq!(sd.n_vertices(), 15);
        assert_eq!(sd.num_simplices(3), 24);
        assert_eq!(sd.euler_characteristic(), 1);
    }

    #[test]
    fn boundary_and_link() {
        let b = SimplicialComplex::simplex(3).boundary();
        assert_eq!(b.f_vector(), vec![4, 6, 4]);
        let s = SimplicialComplex::simplex_boundary(3);
        assert!(s.boundary().is_empty());
        let (l, map) = s.link(0).unwrap();
        assert_eq!(l.f_vector(), vec![3, 3]);
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(s.link(9).unwrap_err(), ComplexError::NoSuchVertex(9));
    }

    #[test]
    fn cone_is_contractible_shape() {
        let c = SimplicialComplex::simplex_boundary(2).cone();
        assert_eq!(c.f_vector(), vec![4, 6, 3]);
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(SimplicialComplex::empty().cone().f_vector(), vec![1]);
    }

    #[test]
    fn text_round_trip() {
        let k = SimplicialComplex::from_text("a b c\nb c d\n# comment\n\nd e\n").unwrap();
        assert_eq!(k.f_vector(), vec![5, 6, 2]);
        let back = SimplicialComplex::from_text(&k.to_text()).unwrap();
        assert!(back.same_labelled(&k));
        assert!(SimplicialComplex::from_text("a a").is_err());
    }

    /// A 4-cycle 0-1-2-3 with the reflection swapping 0 and 1 flips edge {0,1}.
    fn square_with_flip() -> (SimplicialComplex, VertexAction) {
        let k = SimplicialComplex::from_facets(4, [[0, 1], [1, 2], [2, 3], [0, 3]]);
        let a = VertexAction::new(4, vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]]).unwrap();
        (k, a)
    }

    #[test]
    fn edge_swap_needs_subdivision() {
        let (k, a) = square_with_flip();
        let r = is_regular_action(&k, &a, &[]).unwrap();
        assert!(!r.regular);
        assert!(matches!(r.witness, Some(RegularityWitness::SameOrbitVertices { .. })));
        assert!(matches!(quotient_complex(&k, &a, &[]), Err(ComplexError::NotRegular(_))));
        let (sd, info) = k.barycentric_subdivision();
        let a1 = a.subdivide(&k, &info);
        let r1 = is_regular_action(&sd, &a1, &[]).unwrap();
        assert!(r1.regular, "{r1:?}");
        let q = quotient_complex(&sd, &a1, &[]).unwrap();
        // an octagon folded in half is a path with 5 vertices
        assert_eq!(q.complex.f_vector(), vec![5, 4]);
    }

    #[test]
    fn non_simplicial_action_rejected() {
        let k = SimplicialComplex::from_facets(3, [[0, 1], [1, 2]]);
        let a = VertexAction::new(3, vec![vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        assert!(matches!(is_regular_action(&k, &a, &[]), Err(ComplexError::NotSimplicial { .. })));
    }

    proptest! {
        #[test]
        fn subdivision_preserves_euler(facets in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..4), 1..8)) {
            let k = SimplicialComplex::from_facets(7, facets.iter().map(|s| s.iter().copied().collect::<Vec<_>>()));
            let (sd, _) = k.barycentric_subdivision();
            prop_assert_eq!(sd.euler_characteristic(), k.euler_characteristic());
            prop_assert_eq!(sd.n_vertices(), k.total_simplices());
        }
    }
}
