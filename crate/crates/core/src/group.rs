//! Finite orthogonal matrix groups: enumeration, element classes, the
//! reflection/rotation closure, orbits and stabilizers.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::scalar::{fixed_codim_in, join_fields, ExactMatrix, ExactScalar, ExactVector, ScalarError};

pub const DEFAULT_ORDER_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group order exceeds the cap of {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("generator {index} is not orthogonal")]
    NotOrthogonal { index: usize },
    #[error("generator {index} does not preserve the working subspace")]
    SubspaceNotInvariant { index: usize },
    #[error("zero vector has no ray")]
    ZeroVector,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("declared field sqrt({declared}) but entries need sqrt({found})")]
    FieldMismatch { declared: u64, found: u64 },
    #[error("reflection-rotation subgroup failed the normality check")]
    NotNormal,
    #[error("point set is not invariant under the group")]
    NotInvariant,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The subspace `{x : E x = 0}` of `R^n` a group is considered on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubspace {
    ambient: usize,
    equations: ExactMatrix,
    basis: Vec<ExactVector>,
}

impl LinearSubspace {
    pub fn full(n: usize) -> Self {
        LinearSubspace { ambient: n, equations: ExactMatrix::zeros(0, n), basis: (0..n).map(|i| ExactVector::unit(n, i)).collect() }
    }

    pub fn from_equations(n: usize, equations: Vec<ExactVector>) -> Result<Self, GroupError> {
        if equations.is_empty() {
            return Ok(Self::full(n));
        }
        for e in &equations {
            if e.len() != n {
                return Err(GroupError::DimensionMismatch { expected: n, found: e.len() });
            }
        }
        let m = ExactMatrix::from_rows(equations.into_iter().map(|v| v.0).collect())?;
        let basis = m.nullspace();
        Ok(LinearSubspace { ambient: n, equations: m, basis })
    }

    /// The sum-zero hyperplane of `R^n`.
    pub fn sum_zero(n: usize) -> Self {
        Self::from_equations(n, vec![ExactVector::from_ints(&vec![1; n])]).expect("valid equation")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn equations(&self) -> &ExactMatrix {
        &self.equations
    }

    pub fn basis(&self) -> &[ExactVector] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.equations.rows() == 0
    }

    pub fn contains(&self, v: &ExactVector) -> bool {
        v.len() == self.ambient && self.equations.row_vectors().iter().all(|e| e.dot(v).is_zero())
    }

    /// `sum_i y_i b_i`.
    pub fn from_coords(&self, y: &ExactVector) -> ExactVector {
        let mut x = ExactVector::zeros(self.ambient);
        for (c, b) in y.iter().zip(&self.basis) {
            if !c.is_zero() {
                x = x.add(&b.scale(c));
            }
        }
        x
    }

    /// Gram matrix `B^T B` of the basis.
    pub fn gram(&self) -> ExactMatrix {
        let m = self.dim();
        let mut g = ExactMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                g.set(i, j, self.basis[i].dot(&self.basis[j]));
            }
        }
        g
    }
}

/// A finite group of orthogonal matrices, elements sorted lexicographically.
#[derive(Debug)]
pub struct FiniteMatrixGroup {
    name: String,
    subspace: LinearSubspace,
    generators: Vec<ExactMatrix>,
    elements: Vec<ExactMatrix>,
    words: Vec<Vec<usize>>,
    index: HashMap<ExactMatrix, usize>,
    identity: usize,
    codims: Vec<usize>,
    orientation: Vec<i32>,
    table: OnceLock<Vec<u32>>,
}

impl Clone for FiniteMatrixGroup {
    fn clone(&self) -> Self {
        FiniteMatrixGroup {
            name: self.name.clone(),
            subspace: self.subspace.clone(),
            generators: self.generators.clone(),
            elements: self.elements.clone(),
            words: self.words.clone(),
            index: self.index.clone(),
            identity: self.identity,
            codims: self.codims.clone(),
            orientation: self.orientation.clone(),
            table: OnceLock::new(),
        }
    }
}

/// Enumerates the group generated by `gens` acting on the whole space.
pub fn enumerate(gens: &[ExactMatrix], cap: Option<usize>) -> Result<FiniteMatrixGroup, GroupError> {
    let n = gens.first().map_or(0, ExactMatrix::rows);
    enumerate_in(gens, LinearSubspace::full(n), cap)
}

/// Enumerates the group generated by `gens`, restricted to `subspace`.
pub fn enumerate_in(gens: &[ExactMatrix], subspace: LinearSubspace, cap: Option<usize>) -> Result<FiniteMatrixGroup, GroupError> {
    let cap = cap.unwrap_or(DEFAULT_ORDER_CAP);
    let n = subspace.ambient_dim();
    let mut field = 0;
    for (i, g) in gens.iter().enumerate() {
        if g.rows() != n || g.cols() != n {
            return Err(GroupError::DimensionMismatch { expected: n, found: g.rows() });
        }
        if !g.is_orthogonal() {
            return Err(GroupError::NotOrthogonal { index: i });
        }
        if !subspace.basis().iter().all(|b| subspace.contains(&g.mul_vec(b))) {
            return Err(GroupError::SubspaceNotInvariant { index: i });
        }
        field = join_fields(field, g.field()?)?;
    }
    let id = ExactMatrix::identity(n);
    let mut found: HashMap<ExactMatrix, Vec<usize>> = HashMap::new();
    found.insert(id.clone(), Vec::new());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        let w = found[&x].clone();
        for (s, g) in gens.iter().enumerate() {
            let y = g.checked_mul(&x)?;
            if !found.contains_key(&y) {
                if found.len() >= cap {
                    return Err(GroupError::OrderCapExceeded { cap });
                }
                let mut wy = Vec::with_capacity(w.len() + 1);
                wy.push(s);
                wy.extend(&w);
                found.insert(y.clone(), wy);
                queue.push_back(y);
            }
        }
    }
    let mut pairs: Vec<(ExactMatrix, Vec<usize>)> = found.into_iter().collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (elements, words): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(FiniteMatrixGroup::assemble(String::new(), subspace, gens.to_vec(), elements, words))
}

impl FiniteMatrixGroup {
    fn assemble(
        name: String,
        subspace: LinearSubspace,
        generators: Vec<ExactMatrix>,
        elements: Vec<ExactMatrix>,
        words: Vec<Vec<usize>>,
    ) -> Self {
        let index: HashMap<ExactMatrix, usize> = elements.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let identity = index[&ExactMatrix::identity(subspace.ambient_dim())];
        let codims = elements.iter().map(|m| fixed_codim_in(m, subspace.equations()).expect("orthogonal element")).collect();
        let orientation = orientation_on(&subspace, &elements);
        FiniteMatrixGroup { name, subspace, generators, elements, words, index, identity, codims, orientation, table: OnceLock::new() }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn subspace(&self) -> &LinearSubspace {
        &self.subspace
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Dimension of the space the group acts on.
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn generators(&self) -> &[ExactMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[ExactMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ExactMatrix {
        &self.elements[i]
    }

    /// Word in the generators, `w = [s1, s2, ...]` meaning `g_{s1} g_{s2} ...`.
    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, m: &ExactMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn field(&self) -> u64 {
        self.elements.iter().fold(0, |d, m| join_fields(d, m.field().unwrap_or(0)).unwrap_or(d))
    }

    /// Fixed-point codimension of element `i` within the working subspace.
    pub fn codim(&self, i: usize) -> usize {
        self.codims[i]
    }

    /// Determinant (+1 or -1) of element `i` on the working subspace.
    pub fn orientation(&self, i: usize) -> i32 {
        self.orientation[i]
    }

    pub fn is_reflection(&self, i: usize) -> bool {
        self.codims[i] == 1
    }

    pub fn is_rotation(&self, i: usize) -> bool {
        self.codims[i] == 2
    }

    /// Index of `elements[i] * elements[j]`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        if let Some(t) = self.table.get() {
            return t[i * self.order() + j] as usize;
        }
        self.index[&self.elements[i].checked_mul(&self.elements[j]).expect("same field")]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index[&self.elements[i].transpose()]
    }

    /// Precomputes the multiplication table; later calls to [`Self::mul`] are lookups.
    pub fn cayley_table(&self) -> &[u32] {
        self.table.get_or_init(|| {
            let n = self.order();
            let mut t = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    t[i * n + j] = self.index[&self.elements[i].checked_mul(&self.elements[j]).expect("same field")] as u32;
                }
            }
            t
        })
    }

    pub fn act(&self, i: usize, v: &ExactVector) -> ExactVector {
        self.elements[i].mul_vec(v)
    }

    /// The subgroup generated by the given element indices.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut list = vec![self.identity];
        let mut k = 0;
        while k < list.len() {
            let x = list[k];
            for &g in gens {
                let y = self.mul(g, x);
                if !seen[y] {
                    seen[y] = true;
                    list.push(y);
                }
            }
            k += 1;
        }
        list.sort_unstable();
        Subgroup { elements: list, generators: gens.to_vec() }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: (0..self.order()).collect(), generators: Vec::new() }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        let inside: Vec<bool> = (0..self.order()).map(|i| h.contains(i)).collect();
        (0..self.order()).all(|g| {
            let gi = self.inverse(g);
            h.elements.iter().all(|&x| inside[self.mul(self.mul(g, x), gi)])
        })
    }

    /// Materialises a subgroup as a group in its own right.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> FiniteMatrixGroup {
        let elements: Vec<ExactMatrix> = h.elements.iter().map(|&i| self.elements[i].clone()).collect();
        let words = h.elements.iter().map(|&i| self.words[i].clone()).collect();
        let gens = if h.generators.is_empty() {
            elements.clone()
        } else {
            h.generators.iter().map(|&i| self.elements[i].clone()).collect()
        };
        FiniteMatrixGroup::assemble(format!("{}-sub{}", self.name, h.order()), self.subspace.clone(), gens, elements, words)
    }

    /// Elements whose determinant on the working subspace is +1.
    pub fn orientation_subgroup(&self) -> Subgroup {
        Subgroup { elements: (0..self.order()).filter(|&i| self.orientation[i] == 1).collect(), generators: Vec::new() }
    }

    /// Permutation of `points` induced by every element: `perms[g][p]` is the
    /// index of `g * points[p]`. Points are matched exactly.
    pub fn action_on_points(&self, points: &[ExactVector]) -> Result<Vec<Vec<u32>>, GroupError> {
        let lookup: HashMap<&ExactVector, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        self.elements
            .iter()
            .map(|m| points.iter().map(|p| lookup.get(&m.mul_vec(p)).copied().ok_or(GroupError::NotInvariant)).collect())
            .collect()
    }
}

fn orientation_on(subspace: &LinearSubspace, elements: &[ExactMatrix]) -> Vec<i32> {
    if subspace.is_full() {
        return elements.iter().map(|m| m.determinant().expect("square").signum()).collect();
    }
    let b = ExactMatrix::from_rows(subspace.basis().iter().map(|v| v.0.clone()).collect()).expect("basis").transpose();
    let proj = subspace.gram().inverse().expect("independent basis").checked_mul(&b.transpose()).expect("shapes");
    elements
        .iter()
        .map(|m| {
            let c = proj.checked_mul(&m.checked_mul(&b).expect("shapes")).expect("shapes");
            c.determinant().expect("square").signum()
        })
        .collect()
}

/// A subgroup, as sorted element indices of its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub generators: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    ReflectionGroup,
    RotationGroup,
    ReflectionRotationGroup,
    NotRR,
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupClassification {
    pub kind: GroupKind,
    pub order: usize,
    pub identity: usize,
    pub reflections: usize,
    pub rotations: usize,
    pub other: usize,
    pub rr_order: usize,
}

/// Classifies `g`: generated by reflections, by rotations, by both, or not.
pub fn classify_group(g: &FiniteMatrixGroup) -> GroupClassification {
    let mut tally = [0usize; 3];
    for i in 0..g.order() {
        match g.codim(i) {
            0 => tally[0] += 1,
            1 => tally[1] += 1,
            2 => tally[2] += 1,
            _ => {}
        }
    }
    let refl: Vec<usize> = (0..g.order()).filter(|&i| g.is_reflection(i)).collect();
    let rot: Vec<usize> = (0..g.order()).filter(|&i| g.is_rotation(i)).collect();
    let rr: Vec<usize> = refl.iter().chain(&rot).copied().collect();
    let rr_order = g.subgroup_generated(&rr).order();
    let kind = if !refl.is_empty() && g.subgroup_generated(&refl).order() == g.order() {
        GroupKind::ReflectionGroup
    } else if g.subgroup_generated(&rot).order() == g.order() {
        GroupKind::RotationGroup
    } else if rr_order == g.order() {
        GroupKind::ReflectionRotationGroup
    } else {
        GroupKind::NotRR
    };
    GroupClassification {
        kind,
        order: g.order(),
        identity: tally[0],
        reflections: tally[1],
        rotations: tally[2],
        other: g.order() - tally.iter().sum::<usize>(),
        rr_order,
    }
}

/// The normal subgroup generated by all reflections and rotations.
pub fn rr_normal_closure(g: &FiniteMatrixGroup) -> Result<Subgroup, GroupError> {
    let rr: Vec<usize> = (0..g.order()).filter(|&i| g.is_reflection(i) || g.is_rotation(i)).collect();
    let h = g.subgroup_generated(&rr);
    if !g.is_normal(&h) {
        return Err(GroupError::NotNormal);
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct OrbitStabilizer {
    /// Sorted orbit.
    pub orbit: Vec<ExactVector>,
    pub stabilizer: Subgroup,
}

/// Orbit and stabilizer of a point.
pub fn orbit_stabilizer(g: &FiniteMatrixGroup, v: &ExactVector) -> Result<OrbitStabilizer, GroupError> {
    if v.is_zero() {
        return Err(GroupError::ZeroVector);
    }
    orbit_by(g, v, |w| w)
}

/// Orbit and stabilizer of the ray through `v`; orbit entries are canonical rays.
pub fn ray_orbit_stabilizer(g: &FiniteMatrixGroup, v: &ExactVector) -> Result<OrbitStabilizer, GroupError> {
    if v.is_zero() {
        return Err(GroupError::ZeroVector);
    }
    let c = v.canonical_ray().expect("nonzero");
    orbit_by(g, &c, |w| w.canonical_ray().expect("nonzero"))
}

fn orbit_by(g: &FiniteMatrixGroup, v: &ExactVector, norm: impl Fn(ExactVector) -> ExactVector) -> Result<OrbitStabilizer, GroupError> {
    if v.len() != g.ambient_dim() {
        return Err(GroupError::DimensionMismatch { expected: g.ambient_dim(), found: v.len() });
    }
    let mut orbit = Vec::new();
    let mut stab = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..g.order() {
        let w = norm(g.act(i, v));
        if w == *v {
            stab.push(i);
        }
        if seen.insert(w.clone()) {
            orbit.push(w);
        }
    }
    orbit.sort();
    let generators = stab.clone();
    Ok(OrbitStabilizer { orbit, stabilizer: Subgroup { elements: stab, generators } })
}

/// If `m` is a permutation matrix, the permutation `i -> sigma(i)` with `m e_i = e_sigma(i)`.
pub fn as_permutation(m: &ExactMatrix) -> Option<Vec<usize>> {
    let n = m.rows();
    let mut perm = vec![usize::MAX; n];
    for c in 0..n {
        let mut hit = None;
        for r in 0..n {
            let x = m.get(r, c);
            if x.is_one() {
                if hit.is_some() {
                    return None;
                }
                hit = Some(r);
            } else if !x.is_zero() {
                return None;
            }
        }
        perm[c] = hit?;
    }
    Some(perm)
}

/// Cycle notation with 1-based points, `"()"` for the identity.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first && perm.len() > 9 {
                out.push(' ');
            }
            out.push_str(&(i + 1).to_string());
            first = false;
            i = perm[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Parses cycle notation over `n` points, e.g. `"(12)(34)"` or `"(1 10)"`.
pub fn parse_cycles(s: &str, n: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let s = s.trim();
    if s == "()" || s.is_empty() {
        return Some(perm);
    }
    for cyc in s.split(')') {
        let cyc = cyc.trim();
        if cyc.is_empty() {
            continue;
        }
        let body = cyc.strip_prefix('(')?;
        let pts: Vec<usize> = if body.contains(' ') || body.contains(',') {
            body.split([' ', ',']).filter(|t| !t.is_empty()).map(|t| t.parse::<usize>().ok()).collect::<Option<_>>()?
        } else {
            body.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?
        };
        for k in 0..pts.len() {
            let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
            if a == 0 || a > n || b == 0 || b > n {
                return None;
            }
            perm[a - 1] = b - 1;
        }
    }
    Some(perm)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Nested(Vec<Vec<ExactScalar>>),
    Flat(Vec<ExactScalar>),
}

/// JSON form of a group: `{name, dimension, field_d, generators}` with an
/// optional `subspace_equations` list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDefinition {
    pub name: String,
    pub dimension: usize,
    pub field_d: u64,
    pub generators: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subspace_equations: Vec<Vec<ExactScalar>>,
}

impl GroupDefinition {
    pub fn new(name: &str, subspace: &LinearSubspace, gens: &[ExactMatrix]) -> Self {
        let field_d = gens.iter().fold(0, |d, g| join_fields(d, g.field().unwrap_or(0)).unwrap_or(d));
        GroupDefinition {
            name: name.to_string(),
            dimension: subspace.ambient_dim(),
            field_d,
            generators: gens.iter().map(|g| MatrixRepr::Nested((0..g.rows()).map(|r| g.row(r).to_vec()).collect())).collect(),
            subspace_equations: subspace.equations().row_vectors().into_iter().map(|v| v.0).collect(),
        }
    }

    pub fn matrices(&self) -> Result<Vec<ExactMatrix>, GroupError> {
        let n = self.dimension;
        let mut out = Vec::new();
        for g in &self.generators {
            let m = match g {
                MatrixRepr::Nested(rows) => {
                    if rows.len() != n {
                        return Err(GroupError::DimensionMismatch { expected: n, found: rows.len() });
                    }
                    ExactMatrix::from_rows(rows.clone())?
                }
                MatrixRepr::Flat(v) => ExactMatrix::from_flat(n, n, v.clone())?,
            };
            if m.cols() != n {
                return Err(GroupError::DimensionMismatch { expected: n, found: m.cols() });
            }
            let f = m.field()?;
            if f != 0 && f != self.field_d {
                return Err(GroupError::FieldMismatch { declared: self.field_d, found: f });
            }
            out.push(m);
        }
        Ok(out)
    }

    pub fn subspace(&self) -> Result<LinearSubspace, GroupError> {
        LinearSubspace::from_equations(self.dimension, self.subspace_equations.iter().cloned().map(ExactVector).collect())
    }

    pub fn build(&self, cap: Option<usize>) -> Result<FiniteMatrixGroup, GroupError> {
        Ok(enumerate_in(&self.matrices()?, self.subspace()?, cap)?.with_name(self.name.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm_group(n: usize, gens: &[&str]) -> FiniteMatrixGroup {
        let mats: Vec<ExactMatrix> = gens.iter().map(|s| ExactMatrix::permutation(&parse_cycles(s, n).unwrap())).collect();
        enumerate_in(&mats, LinearSubspace::sum_zero(n), None).unwrap()
    }

    #[test]
    fn symmetric_group_orders() {
        assert_eq!(perm_group(3, &["(12)", "(123)"]).order(), 6);
        assert_eq!(perm_group(4, &["(12)", "(1234)"]).order(), 24);
        assert_eq!(perm_group(5, &["(12)", "(12345)"]).order(), 120);
    }

    #[test]
    fn cap_is_enforced() {
        let n = 5;
        let mats: Vec<ExactMatrix> = ["(12)", "(12345)"].iter().map(|s| ExactMatrix::permutation(&parse_cycles(s, n).unwrap())).collect();
        assert_eq!(enumerate(&mats, Some(100)).unwrap_err(), GroupError::OrderCapExceeded { cap: 100 });
    }

    #[test]
    fn rejects_non_orthogonal() {
        let m = ExactMatrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(enumerate(&[m], None).unwrap_err(), GroupError::NotOrthogonal { index: 0 });
    }

    #[test]
    fn element_counts_of_s4() {
        // S4 on the sum-zero 3-space: 6 transpositions are reflections,
        // 3-cycles (8) and double transpositions (3) are rotations, 4-cycles (6) are neither.
        let g = perm_group(4, &["(12)", "(1234)"]);
        let c = classify_group(&g);
        assert_eq!((c.identity, c.reflections, c.rotations, c.other), (1, 6, 11, 6));
        assert_eq!(c.kind, GroupKind::ReflectionGroup);
        let rot = perm_group(4, &["(123)", "(12)(34)"]);
        assert_eq!(rot.order(), 12);
        assert_eq!(classify_group(&rot).kind, GroupKind::RotationGroup);
    }

    #[test]
    fn cyclic_four_is_not_rr() {
        // (1234) on the sum-zero space of R^4 has eigenvalues i, -1, -i: its square is a rotation,
        // but the generated rotations only give an index-2 subgroup.
        let g = perm_group(4, &["(1234)"]);
        let c = classify_group(&g);
        assert_eq!(c.kind, GroupKind::NotRR);
        assert_eq!(c.rr_order, 2);
        assert_eq!(rr_normal_closure(&g).unwrap().order(), 2);
    }

    #[test]
    fn orientation_subgroup_index_two() {
        let g = perm_group(4, &["(12)", "(1234)"]);
        let h = g.orientation_subgroup();
        assert_eq!(h.order(), 12);
        assert!(g.is_normal(&h));
    }

    #[test]
    fn cycles_round_trip() {
        let p = parse_cycles("(13425)", 6).unwrap();
        assert_eq!(p, vec![2, 4, 3, 1, 0, 5]);
        assert_eq!(cycle_notation(&p), "(13425)");
        let m = ExactMatrix::permutation(&p);
        assert_eq!(as_permutation(&m).unwrap(), p);
    }

    #[test]
    fn zero_vector_rejected() {
        let g = perm_group(3, &["(12)"]);
        assert_eq!(orbit_stabilizer(&g, &ExactVector::zeros(3)).unwrap_err(), GroupError::ZeroVector);
    }

    #[test]
    fn definition_json_round_trip() {
        let g = perm_group(3, &["(12)", "(23)"]);
        let def = GroupDefinition::new("S3", g.subspace(), g.generators());
        let text = serde_json::to_string(&def).unwrap();
        let back: GroupDefinition = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build(None).unwrap().order(), 6);
        let flat = r#"{"name":"c2","dimension":2,"field_d":0,"generators":[["0","1","1","0"]]}"#;
        let d: GroupDefinition = serde_json::from_str(flat).unwrap();
        assert_eq!(d.build(None).unwrap().order(), 2);
    }

    proptest! {
        #[test]
        fn orbit_stabilizer_counts(v in prop::collection::vec(-3i64..=3, 4)) {
            let g = perm_group(4, &["(12)", "(1234)"]);
            let v = ExactVector::from_ints(&v);
            prop_assume!(!v.is_zero());
            let os = orbit_stabilizer(&g, &v).unwrap();
            prop_assert_eq!(os.orbit.len() * os.stabilizer.order(), g.order());
            let h = g.subgroup_generated(&os.stabilizer.elements);
            prop_assert_eq!(h.order(), os.stabilizer.order());
            let rs = ray_orbit_stabilizer(&g, &v).unwrap();
            prop_assert_eq!(rs.orbit.len() * rs.stabilizer.order(), g.order());
        }
    }
}
