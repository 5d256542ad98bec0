//! PL ball and sphere recognition: free-face collapses with replayable
//! certificates, collapses pushed through simplicial quotient maps, doubling
//! along the boundary, bistellar moves and recursive link checks.

use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{without, SimplicialComplex};
use crate::homology::{homology, HomologyResult};

/// sha256 over the simplex tables, identifying a complex up to numbering.
pub fn complex_digest(k: &SimplicialComplex) -> String {
    let mut h = Sha256::new();
    h.update((k.n_vertices() as u64).to_le_bytes());
    for d in 0..=k.dim().max(-1) as usize {
        h.update((d as u64).to_le_bytes());
        for s in k.simplices(d) {
            for &v in s {
                h.update(v.to_le_bytes());
            }
        }
    }
    hex::encode(h.finalize())
}

/// Face and coface incidences of every simplex, by global id
/// (`offset[dim] + index`).
pub struct Incidence {
    pub offsets: Vec<usize>,
    face_start: Vec<usize>,
    faces: Vec<u32>,
    coface_start: Vec<usize>,
    cofaces: Vec<u32>,
}

impl Incidence {
    pub fn new(k: &SimplicialComplex) -> Self {
        let top = k.dim().max(-1) + 1;
        let mut offsets = vec![0usize];
        for d in 0..top as usize {
            offsets.push(offsets[d] + k.num_simplices(d));
        }
        let total = *offsets.last().unwrap();
        let mut face_start = Vec::with_capacity(total + 1);
        face_start.push(0);
        let mut faces: Vec<u32> = Vec::new();
        for d in 0..top as usize {
            let chunk: Vec<Vec<u32>> = if d == 0 {
                vec![Vec::new(); k.num_simplices(0)]
            } else {
                let t = k.table(d - 1);
                let base = offsets[d - 1] as u32;
                k.simplices(d)
                    .collect::<Vec<_>>()
                    .par_iter()
                    .map(|s| (0..s.len()).map(|i| base + t.index_of(&without(s, i)).expect("face") as u32).collect())
                    .collect()
            };
            for f in chunk {
                faces.extend(f);
                face_start.push(faces.len());
            }
        }
        let mut count = vec![0usize; total + 1];
        for &f in &faces {
            count[f as usize + 1] += 1;
        }
        for i in 0..total {
            count[i + 1] += count[i];
        }
        let coface_start = count.clone();
        let mut fill = count;
        let mut cofaces = vec![0u32; faces.len()];
        for s in 0..total {
            for &f in &faces[face_start[s]..face_start[s + 1]] {
                cofaces[fill[f as usize]] = s as u32;
                fill[f as usize] += 1;
            }
        }
        Incidence { offsets, face_start, faces, coface_start, cofaces }
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn dim_of(&self, id: u32) -> usize {
        self.offsets.partition_point(|&o| o <= id as usize) - 1
    }

    pub fn faces(&self, id: u32) -> &[u32] {
        &self.faces[self.face_start[id as usize]..self.face_start[id as usize + 1]]
    }

    pub fn cofaces(&self, id: u32) -> &[u32] {
        &self.cofaces[self.coface_start[id as usize]..self.coface_start[id as usize + 1]]
    }

    pub fn global(&self, dim: usize, index: usize) -> u32 {
        (self.offsets[dim] + index) as u32
    }

    pub fn global_of(&self, k: &SimplicialComplex, s: &[u32]) -> Option<u32> {
        let d = s.len().checked_sub(1)?;
        if d >= self.offsets.len() - 1 {
            return None;
        }
        k.table(d).index_of(s).map(|i| self.global(d, i))
    }

    pub fn simplex<'a>(&self, k: &'a SimplicialComplex, id: u32) -> &'a [u32] {
        let d = self.dim_of(id);
        k.table(d).get(id as usize - self.offsets[d])
    }
}

/// Replayable record of a collapse of a complex onto a subcomplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    pub complex_digest: String,
    pub f_vector: Vec<usize>,
    /// Top-dimensional simplices removed (as open cells) before collapsing.
    pub punctured: Vec<Vec<u32>>,
    /// `(free face, coface)` pairs as vertex lists, in order.
    pub steps: Vec<(Vec<u32>, Vec<u32>)>,
    /// Maximal simplices of the terminal subcomplex.
    pub terminal: Vec<Vec<u32>>,
    pub seed: u64,
    pub restart: usize,
}

impl CollapseCertificate {
    pub fn terminal_is_point(&self) -> bool {
        self.terminal.len() == 1 && self.terminal[0].len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollapseTarget {
    Point,
    /// Subcomplex given by its maximal simplices (in the numbering of the complex).
    Subcomplex(Vec<Vec<u32>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollapseOutcome {
    Certified(CollapseCertificate),
    Inconclusive { restarts: usize, best_remaining: usize },
}

impl CollapseOutcome {
    pub fn certificate(&self) -> Option<&CollapseCertificate> {
        match self {
            CollapseOutcome::Certified(c) => Some(c),
            CollapseOutcome::Inconclusive { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayFailure {
    #[error("certificate is for a different complex")]
    WrongComplex,
    #[error("step {step}: {reason}")]
    Step { step: usize, reason: String },
    #[error("terminal subcomplex differs from the certificate")]
    Terminal,
    #[error("homology changed at step {step}")]
    HomologyChanged { step: usize },
}

struct CollapseState<'a> {
    inc: &'a Incidence,
    alive: Vec<bool>,
    up: Vec<u32>,
    alive_count: usize,
}

impl<'a> CollapseState<'a> {
    fn new(inc: &'a Incidence) -> Self {
        let n = inc.total();
        let up = (0..n as u32).map(|s| inc.cofaces(s).len() as u32).collect();
        CollapseState { inc, alive: vec![true; n], up, alive_count: n }
    }

    fn alive_coface(&self, t: u32) -> Option<u32> {
        self.inc.cofaces(t).iter().copied().find(|&c| self.alive[c as usize])
    }

    fn free_partner(&self, t: u32) -> Option<u32> {
        if !self.alive[t as usize] || self.up[t as usize] != 1 {
            return None;
        }
        let s = self.alive_coface(t)?;
        (self.up[s as usize] == 0).then_some(s)
    }

    /// Removes a maximal simplex; returns faces whose coface count dropped.
    fn remove(&mut self, s: u32, touched: &mut Vec<u32>) {
        self.alive[s as usize] = false;
        self.alive_count -= 1;
        for &f in self.inc.faces(s) {
            self.up[f as usize] -= 1;
            touched.push(f);
        }
    }

    fn alive_maximal(&self, k: &SimplicialComplex) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> =
            (0..self.inc.total() as u32).filter(|&s| self.alive[s as usize] && self.up[s as usize] == 0).map(|s| self.inc.simplex(k, s).to_vec()).collect();
        v.sort();
        v
    }
}

fn target_mask(k: &SimplicialComplex, inc: &Incidence, target: &CollapseTarget) -> Option<Vec<bool>> {
    match target {
        CollapseTarget::Point => None,
        CollapseTarget::Subcomplex(max) => {
            let mut mask = vec![false; inc.total()];
            let mut stack: Vec<u32> = max.iter().map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                inc.global_of(k, &s).expect("target simplex not in complex")
            }).collect();
            while let Some(s) = stack.pop() {
                if !std::mem::replace(&mut mask[s as usize], true) {
                    stack.extend_from_slice(inc.faces(s));
                }
            }
            Some(mask)
        }
    }
}

/// One greedy pass: highest-dimensional free faces first, ties broken by `rank`.
fn collapse_pass<'a>(
    k: &SimplicialComplex,
    inc: &'a Incidence,
    protected: Option<&[bool]>,
    punctured: &[u32],
    rank: &dyn Fn(u32) -> u32,
) -> (Vec<(u32, u32)>, CollapseState<'a>) {
    let mut st = CollapseState::new(inc);
    let mut touched = Vec::new();
    for &p in punctured {
        st.remove(p, &mut touched);
    }
    let is_prot = |s: u32| protected.is_some_and(|m| m[s as usize]);
    let mut heap: BinaryHeap<(u8, Reverse<u32>, u32)> = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<(u8, Reverse<u32>, u32)>, st: &CollapseState, t: u32| {
        if st.up[t as usize] == 1 && st.alive[t as usize] && !is_prot(t) {
            heap.push((inc.dim_of(t) as u8, Reverse(rank(t)), t));
        }
    };
    for t in 0..inc.total() as u32 {
        if st.free_partner(t).is_some() {
            push(&mut heap, &st, t);
        }
    }
    let mut steps = Vec::new();
    while let Some((_, _, t)) = heap.pop() {
        let Some(s) = st.free_partner(t) else { continue };
        if is_prot(t) || is_prot(s) {
            continue;
        }
        touched.clear();
        st.remove(s, &mut touched);
        st.remove(t, &mut touched);
        steps.push((t, s));
        let _ = k;
        for i in 0..touched.len() {
            let f = touched[i];
            if !st.alive[f as usize] {
                continue;
            }
            match st.up[f as usize] {
                1 => push(&mut heap, &st, f),
                0 => {
                    // f became maximal: its faces with a single coface are now free
                    for &g in inc.faces(f) {
                        if st.up[g as usize] == 1 {
                            push(&mut heap, &st, g);
                        }
                    }
                }
                _ => {}
            }
        }
    }
    (steps, st)
}

/// Greedy collapse of `k` (optionally with some top simplices punctured) onto
/// `target`. Restart 0 uses lexicographic tie-breaks; restart `r > 0` uses a
/// shuffle seeded by `(seed, r)`. The certificate of the lowest successful
/// restart is returned.
pub fn greedy_collapse_punctured(
    k: &SimplicialComplex,
    punctured: &[Vec<u32>],
    target: &CollapseTarget,
    restarts: usize,
    seed: u64,
) -> CollapseOutcome {
    let inc = Incidence::new(k);
    let prot = target_mask(k, &inc, target);
    let punct: Vec<u32> = punctured.iter().map(|s| inc.global_of(k, s).expect("punctured simplex")).collect();
    let goal = match &prot {
        None => 1,
        Some(m) => m.iter().filter(|&&b| b).count(),
    };
    let best = std::sync::atomic::AtomicUsize::new(usize::MAX);
    let found = (0..restarts.max(1)).into_par_iter().find_map_first(|r| {
        let order: Option<Vec<u32>> = (r > 0).then(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut p: Vec<u32> = (0..inc.total() as u32).collect();
            p.shuffle(&mut rng);
            p
        });
        let rank = |t: u32| order.as_ref().map_or(t, |p| p[t as usize]);
        let (steps, st) = collapse_pass(k, &inc, prot.as_deref(), &punct, &rank);
        best.fetch_min(st.alive_count, std::sync::atomic::Ordering::Relaxed);
        if st.alive_count != goal {
            return None;
        }
        Some(CollapseCertificate {
            complex_digest: complex_digest(k),
            f_vector: k.f_vector(),
            punctured: punctured.to_vec(),
            steps: steps.iter().map(|&(t, s)| (inc.simplex(k, t).to_vec(), inc.simplex(k, s).to_vec())).collect(),
            terminal: st.alive_maximal(k),
            seed,
            restart: r,
        })
    });
    match found {
        Some(c) => CollapseOutcome::Certified(c),
        None => CollapseOutcome::Inconclusive { restarts: restarts.max(1), best_remaining: best.into_inner() },
    }
}

pub fn greedy_collapse(k: &SimplicialComplex, target: &CollapseTarget, restarts: usize, seed: u64) -> CollapseOutcome {
    greedy_collapse_punctured(k, &[], target, restarts, seed)
}

fn same_homology(a: &HomologyResult, b: &HomologyResult) -> bool {
    let trim = |h: &HomologyResult| {
        let mut v: Vec<(usize, Vec<num_bigint::BigInt>)> = h.betti.iter().copied().zip(h.torsion.iter().cloned()).collect();
        while v.last().is_some_and(|(b, t)| *b == 0 && t.is_empty()) {
            v.pop();
        }
        v
    };
    trim(a) == trim(b)
}

/// The complex spanned by `facets`, renumbered onto the vertices they use.
fn compact<I: IntoIterator<Item = Vec<u32>>>(facets: I) -> SimplicialComplex {
    let facets: Vec<Vec<u32>> = facets.into_iter().collect();
    let mut used: Vec<u32> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let renum: Vec<Vec<u32>> = facets.iter().map(|f| f.iter().map(|v| used.binary_search(v).unwrap() as u32).collect()).collect();
    SimplicialComplex::from_facets(used.len(), renum)
}

/// Simplices of the closure of `max`.
fn closure(max: &[Vec<u32>]) -> HashSet<Vec<u32>> {
    let mut out = HashSet::new();
    for m in max {
        let n = m.len();
        for mask in 1u32..(1 << n) {
            out.insert((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| m[i]).collect::<Vec<u32>>());
        }
    }
    out
}

fn maximal_of(set: &HashSet<Vec<u32>>) -> Vec<Vec<u32>> {
    let mut covered: HashSet<Vec<u32>> = HashSet::new();
    for s in set {
        for i in 0..s.len() {
            if s.len() > 1 {
                covered.insert(without(s, i));
            }
        }
    }
    let mut v: Vec<Vec<u32>> = set.iter().filter(|s| !covered.contains(*s)).cloned().collect();
    v.sort();
    v
}

/// Replays a collapse certificate, checking each step from scratch. With
/// `homology_every = Some(n)` the homology of the current subcomplex is
/// compared with the starting one every `n` steps.
pub fn replay_collapse(k: &SimplicialComplex, cert: &CollapseCertificate, homology_every: Option<usize>) -> Result<(), ReplayFailure> {
    if cert.complex_digest != complex_digest(k) {
        return Err(ReplayFailure::WrongComplex);
    }
    let inc = Incidence::new(k);
    let mut st = CollapseState::new(&inc);
    let mut touched = Vec::new();
    let top = k.dim();
    for (i, p) in cert.punctured.iter().enumerate() {
        let bad = |reason: &str| ReplayFailure::Step { step: i, reason: reason.into() };
        let id = inc.global_of(k, p).ok_or_else(|| bad("punctured simplex not in complex"))?;
        if p.len() as isize != top + 1 || !st.alive[id as usize] {
            return Err(bad("punctured simplex is not a live top simplex"));
        }
        st.remove(id, &mut touched);
    }
    let snapshot = |st: &CollapseState| -> HomologyResult {
        let faces = st.alive_maximal(k);
        homology(&compact(faces)).expect("nonempty")
    };
    let h0 = homology_every.map(|_| snapshot(&st));
    let np = cert.punctured.len();
    for (i, (t, s)) in cert.steps.iter().enumerate() {
        let step = np + i;
        let bad = |reason: &str| ReplayFailure::Step { step, reason: reason.into() };
        let ti = inc.global_of(k, t).ok_or_else(|| bad("face not in complex"))?;
        let si = inc.global_of(k, s).ok_or_else(|| bad("coface not in complex"))?;
        if s.len() != t.len() + 1 || !t.iter().all(|v| s.contains(v)) {
            return Err(bad("not a codimension-one face pair"));
        }
        if !st.alive[ti as usize] || !st.alive[si as usize] {
            return Err(bad("simplex already removed"));
        }
        if st.up[si as usize] != 0 {
            return Err(bad("coface is not maximal"));
        }
        if st.up[ti as usize] != 1 {
            return Err(bad("face lies in another maximal simplex"));
        }
        st.remove(si, &mut touched);
        st.remove(ti, &mut touched);
        if let (Some(n), Some(h0)) = (homology_every, &h0) {
            if n > 0 && (i + 1) % n == 0 {
                let h = snapshot(&st);
                if !same_homology(&h, h0) {
                    return Err(ReplayFailure::HomologyChanged { step });
                }
            }
        }
    }
    let mut want = cert.terminal.clone();
    want.sort();
    if st.alive_maximal(k) != want {
        return Err(ReplayFailure::Terminal);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InducedCollapseError {
    #[error("map is not a simplicial isomorphism on {simplex:?}")]
    NotSimplicialIso { simplex: Vec<u32> },
    #[error("map is not bijective off the target subcomplex: {reason}")]
    NotBijectiveOffL { reason: String },
    #[error("step {step} touches the target subcomplex")]
    StepInsideL { step: usize },
    #[error("source certificate: {0}")]
    Source(ReplayFailure),
    #[error("pushed certificate fails replay: {0}")]
    Pushed(ReplayFailure),
}

/// Given a collapse of `k` onto `l` (listed by maximal simplices) and a
/// simplicial surjection `p : k -> kt` (vertex map) that is injective on each
/// simplex and bijective off `l`, the collapse of `kt` onto `p(l)`.
pub fn induced_collapse(
    k: &SimplicialComplex,
    kt: &SimplicialComplex,
    p: &[u32],
    l: &[Vec<u32>],
    cert: &CollapseCertificate,
) -> Result<CollapseCertificate, InducedCollapseError> {
    let lset = closure(l);
    let in_l = |s: &[u32]| lset.contains(s);
    for (i, (t, s)) in cert.steps.iter().enumerate() {
        if in_l(t) || in_l(s) {
            return Err(InducedCollapseError::StepInsideL { step: cert.punctured.len() + i });
        }
    }
    replay_collapse(k, cert, None).map_err(InducedCollapseError::Source)?;
    let img = |s: &[u32]| -> Result<Vec<u32>, InducedCollapseError> {
        let mut t: Vec<u32> = s.iter().map(|&v| p[v as usize]).collect();
        t.sort_unstable();
        let n = t.len();
        t.dedup();
        if t.len() != n || !kt.contains(&t) {
            return Err(InducedCollapseError::NotSimplicialIso { simplex: s.to_vec() });
        }
        Ok(t)
    };
    let mut image_l: HashSet<Vec<u32>> = HashSet::new();
    let mut image_off: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
    let mut images: Vec<(&[u32], Vec<u32>)> = Vec::with_capacity(k.total_simplices());
    for d in 0..=k.dim().max(-1) as usize {
        for s in k.simplices(d) {
            images.push((s, img(s)?));
        }
    }
    for (s, t) in images {
        if in_l(s) {
            image_l.insert(t);
        } else if let Some(prev) = image_off.insert(t.clone(), s.to_vec()) {
            return Err(InducedCollapseError::NotBijectiveOffL { reason: format!("{prev:?} and {s:?} both map to {t:?}") });
        }
    }
    for t in image_off.keys() {
        if image_l.contains(t) {
            return Err(InducedCollapseError::NotBijectiveOffL { reason: format!("{t:?} is hit from inside and outside the subcomplex") });
        }
    }
    if image_l.len() + image_off.len() != kt.total_simplices() {
        return Err(InducedCollapseError::NotBijectiveOffL { reason: "map is not surjective".into() });
    }
    let steps = cert.steps.iter().map(|(t, s)| Ok((img(t)?, img(s)?))).collect::<Result<Vec<_>, InducedCollapseError>>()?;
    let punctured = cert.punctured.iter().map(|s| img(s)).collect::<Result<Vec<_>, _>>()?;
    let terminal = maximal_of(&image_l);
    let out = CollapseCertificate { complex_digest: complex_digest(kt), f_vector: kt.f_vector(), punctured, steps, terminal, seed: cert.seed, restart: cert.restart };
    replay_collapse(kt, &out, None).map_err(InducedCollapseError::Pushed)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DoubleError {
    #[error("complex has empty boundary")]
    NoBoundary,
}

/// Two copies of a complex glued along its boundary.
#[derive(Clone, Debug)]
pub struct Double {
    pub complex: SimplicialComplex,
    /// The copy-swapping involution on vertices.
    pub swap: Vec<u32>,
    /// 0 for boundary vertices, 1 or 2 for the copies.
    pub copy: Vec<u8>,
    /// The doubled complex, which is `B` itself or its barycentric subdivision
    /// when `B` has interior simplices spanned by boundary vertices.
    pub base: SimplicialComplex,
    pub subdivided: bool,
}

pub fn double_along_boundary(b: &SimplicialComplex) -> Result<Double, DoubleError> {
    let bd = b.boundary();
    if bd.is_empty() {
        return Err(DoubleError::NoBoundary);
    }
    let boundary_mask = |k: &SimplicialComplex| -> (Vec<bool>, SimplicialComplex) {
        let faces = boundary_ridges(k);
        let mut m = vec![false; k.n_vertices()];
        for &v in faces.iter().flatten() {
            m[v as usize] = true;
        }
        (m, k.subcomplex(faces))
    };
    let (mut mask, bsub) = boundary_mask(b);
    let mut base = b.clone();
    let mut subdivided = false;
    let spanned_inside = |k: &SimplicialComplex, m: &[bool], bs: &SimplicialComplex| {
        (0..=k.dim() as usize).any(|d| k.simplices(d).any(|s| s.len() > 1 && s.iter().all(|&v| m[v as usize]) && !bs.contains(s)))
    };
    if spanned_inside(&base, &mask, &bsub) {
        base = b.barycentric_subdivision().0;
        mask = boundary_mask(&base).0;
        subdivided = true;
    }
    let n = base.n_vertices();
    let interior: Vec<u32> = (0..n as u32).filter(|&v| !mask[v as usize]).collect();
    let mut second = vec![0u32; n];
    for (i, &v) in interior.iter().enumerate() {
        second[v as usize] = (n + i) as u32;
    }
    let total = n + interior.len();
    let map2 = |v: u32| if mask[v as usize] { v } else { second[v as usize] };
    let maxes = base.maximal_simplices();
    let mut facets: Vec<Vec<u32>> = maxes.clone();
    facets.extend(maxes.iter().map(|s| s.iter().map(|&v| map2(v)).collect::<Vec<u32>>()));
    let complex = SimplicialComplex::from_facets(total, facets);
    let mut swap: Vec<u32> = (0..total as u32).collect();
    let mut copy = vec![0u8; total];
    for (i, &v) in interior.iter().enumerate() {
        swap[v as usize] = (n + i) as u32;
        swap[n + i] = v;
        copy[v as usize] = 1;
        copy[n + i] = 2;
    }
    Ok(Double { complex, swap, copy, base, subdivided })
}

impl Double {
    /// Deletes the second copy (the full subcomplex off copy 2).
    pub fn first_copy(&self) -> SimplicialComplex {
        let keep: Vec<bool> = self.copy.iter().map(|&c| c != 2).collect();
        let faces = self.complex.full_subcomplex(&keep).maximal_simplices().into_iter().filter(|s| s.iter().all(|&v| keep[v as usize]));
        let n = self.base.n_vertices();
        SimplicialComplex::from_facets(n, faces.collect::<Vec<_>>())
    }
}

/// One bistellar move: the simplex `sigma` with link the boundary of `tau`
/// (with `tau` not a face) is replaced, `sigma * d(tau)` becoming `d(sigma) * tau`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BistellarMove {
    pub sigma: Vec<u32>,
    pub tau: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BistellarCertificate {
    pub complex_digest: String,
    pub dim: usize,
    pub moves: Vec<BistellarMove>,
    pub final_facets: Vec<Vec<u32>>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BistellarOutcome {
    Certified(BistellarCertificate),
    Inconclusive { moves_tried: usize, final_f_vector: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BistellarError {
    #[error("prefilter failed: {0}")]
    PrefilterFailed(String),
}

struct FacetSet {
    facets: BTreeSet<Vec<u32>>,
    by_vertex: HashMap<u32, BTreeSet<Vec<u32>>>,
}

impl FacetSet {
    fn new(facets: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut fs = FacetSet { facets: BTreeSet::new(), by_vertex: HashMap::new() };
        for f in facets {
            fs.insert(f);
        }
        fs
    }

    fn insert(&mut self, f: Vec<u32>) {
        for &v in &f {
            self.by_vertex.entry(v).or_default().insert(f.clone());
        }
        self.facets.insert(f);
    }

    fn remove(&mut self, f: &[u32]) {
        for v in f {
            if let Some(s) = self.by_vertex.get_mut(v) {
                s.remove(f);
                if s.is_empty() {
                    self.by_vertex.remove(v);
                }
            }
        }
        self.facets.remove(f);
    }

    fn containing(&self, s: &[u32]) -> Vec<Vec<u32>> {
        let Some(first) = self.by_vertex.get(&s[0]) else { return Vec::new() };
        first.iter().filter(|f| s.iter().all(|v| f.binary_search(v).is_ok())).cloned().collect()
    }

    fn is_face(&self, s: &[u32]) -> bool {
        !self.containing(s).is_empty()
    }

    /// The complementary simplex `tau` if the move on `sigma` is valid.
    fn move_tau(&self, sigma: &[u32], d: usize) -> Option<Vec<u32>> {
        let cont = self.containing(sigma);
        let mut u: BTreeSet<u32> = BTreeSet::new();
        for f in &cont {
            u.extend(f.iter().copied().filter(|v| !sigma.contains(v)));
        }
        let tau: Vec<u32> = u.into_iter().collect();
        if tau.len() + sigma.len() != d + 2 || cont.len() != tau.len() || tau.len() < 2 {
            return None;
        }
        if self.is_face(&tau) {
            return None;
        }
        Some(tau)
    }

    fn apply(&mut self, sigma: &[u32], tau: &[u32]) {
        for t in 0..tau.len() {
            let mut f: Vec<u32> = sigma.iter().copied().chain(without(tau, t)).collect();
            f.sort_unstable();
            self.remove(&f);
        }
        for s in 0..sigma.len() {
            let mut f: Vec<u32> = without(sigma, s).into_iter().chain(tau.iter().copied()).collect();
            f.sort_unstable();
            self.insert(f);
        }
    }

    fn is_simplex_boundary(&self, d: usize) -> bool {
        self.facets.len() == d + 2 && self.by_vertex.len() == d + 2
    }
}

fn subsets(f: &[u32], out: &mut Vec<Vec<u32>>) {
    let n = f.len();
    for mask in 1u32..(1 << n) - 1 {
        out.push((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| f[i]).collect());
    }
}

/// Closed pseudomanifold test: pure, connected, each ridge in exactly two facets.
pub fn closed_pseudomanifold(k: &SimplicialComplex) -> Result<(), String> {
    if k.is_empty() {
        return Err("empty complex".into());
    }
    if !k.is_pure() {
        return Err("not pure".into());
    }
    if !k.is_connected() {
        return Err("not connected".into());
    }
    let d = k.dim() as usize;
    if d == 0 {
        return if k.n_vertices() == 2 { Ok(()) } else { Err("0-dimensional with other than two points".into()) };
    }
    let mut counts = vec![0u32; k.num_simplices(d - 1)];
    for s in k.simplices(d) {
        for i in 0..s.len() {
            counts[k.table(d - 1).index_of(&without(s, i)).unwrap()] += 1;
        }
    }
    if counts.iter().any(|&c| c != 2) {
        return Err("some ridge does not lie in exactly two facets".into());
    }
    Ok(())
}

/// Random bistellar moves aimed at reducing to the boundary of a simplex.
/// Vertex removals are taken whenever available; otherwise sampled moves are
/// chosen by facet-count change with annealed acceptance of increases.
pub fn bistellar_recognize_sphere(k: &SimplicialComplex, budget: usize, seed: u64) -> Result<BistellarOutcome, BistellarError> {
    closed_pseudomanifold(k).map_err(BistellarError::PrefilterFailed)?;
    let d = k.dim() as usize;
    let h = homology(k).map_err(|e| BistellarError::PrefilterFailed(e.to_string()))?;
    if !h.is_sphere_homology(d) {
        return Err(BistellarError::PrefilterFailed(format!("homology {} is not that of a sphere", h.summary())));
    }
    let mut fs = FacetSet::new(k.maximal_simplices());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moves = Vec::new();
    let mut tried = 0;
    while !fs.is_simplex_boundary(d) && tried < budget {
        tried += 1;
        // vertex removals
        let mut removal = None;
        let mut verts: Vec<u32> = fs.by_vertex.iter().filter(|(_, f)| f.len() == d + 1).map(|(&v, _)| v).collect();
        verts.sort_unstable();
        for v in verts {
            if let Some(tau) = fs.move_tau(&[v], d) {
                removal = Some((vec![v], tau));
                break;
            }
        }
        let chosen = removal.or_else(|| {
            let facets: Vec<&Vec<u32>> = fs.facets.iter().collect();
            let mut cands: Vec<(i64, Vec<u32>, Vec<u32>)> = Vec::new();
            let mut sub = Vec::new();
            for _ in 0..64 {
                let f = facets[rng.gen_range(0..facets.len())];
                sub.clear();
                subsets(f, &mut sub);
                let s = &sub[rng.gen_range(0..sub.len())];
                if s.len() == 1 {
                    continue;
                }
                if let Some(tau) = fs.move_tau(s, d) {
                    cands.push((s.len() as i64 - tau.len() as i64, s.clone(), tau));
                }
            }
            if cands.is_empty() {
                return None;
            }
            cands.sort();
            let temp = 1.0 + 4.0 * (1.0 - tried as f64 / budget as f64);
            let (delta, s, t) = cands[0].clone();
            if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / temp).exp() {
                Some((s, t))
            } else {
                let neutral: Vec<_> = cands.iter().filter(|c| c.0 <= 0).collect();
                neutral.first().map(|c| (c.1.clone(), c.2.clone()))
            }
        });
        if let Some((sigma, tau)) = chosen {
            fs.apply(&sigma, &tau);
            moves.push(BistellarMove { sigma, tau });
        }
    }
    if fs.is_simplex_boundary(d) {
        Ok(BistellarOutcome::Certified(BistellarCertificate {
            complex_digest: complex_digest(k),
            dim: d,
            moves,
            final_facets: fs.facets.into_iter().collect(),
            seed,
        }))
    } else {
        Ok(BistellarOutcome::Inconclusive { moves_tried: tried, final_f_vector: compact(fs.facets).f_vector() })
    }
}

/// Replays bistellar moves; with `homology_every` the homology of the
/// intermediate complex is compared every that many moves.
pub fn replay_bistellar(k: &SimplicialComplex, cert: &BistellarCertificate, homology_every: Option<usize>) -> Result<(), ReplayFailure> {
    if cert.complex_digest != complex_digest(k) {
        return Err(ReplayFailure::WrongComplex);
    }
    let d = cert.dim;
    let mut fs = FacetSet::new(k.maximal_simplices());
    let h0 = homology(k).expect("nonempty");
    for (i, m) in cert.moves.iter().enumerate() {
        let bad = |reason: &str| ReplayFailure::Step { step: i, reason: reason.into() };
        if m.sigma.is_empty() || !m.sigma.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("sigma must be sorted and nonempty"));
        }
        match fs.move_tau(&m.sigma, d) {
            Some(t) if t == m.tau => {}
            _ => return Err(bad("link condition fails")),
        }
        let before = fs.facets.len() as i64;
        fs.apply(&m.sigma, &m.tau);
        if fs.facets.len() as i64 - before != m.sigma.len() as i64 - m.tau.len() as i64 {
            return Err(bad("facet count update mismatch"));
        }
        if let Some(n) = homology_every {
            if n > 0 && (i + 1) % n == 0 {
                let h = homology(&compact(fs.facets.iter().cloned())).expect("nonempty");
                if !same_homology(&h, &h0) {
                    return Err(ReplayFailure::HomologyChanged { step: i });
                }
            }
        }
    }
    let fin: Vec<Vec<u32>> = fs.facets.iter().cloned().collect();
    if fin != cert.final_facets || !fs.is_simplex_boundary(d) {
        return Err(ReplayFailure::Terminal);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkType {
    Sphere,
    Ball,
    Unknown,
}

/// Restarts used for collapses inside link checks.
pub const LINK_RESTARTS: usize = 8;

/// Recognizes `k` as a PL sphere or ball of its dimension: by enumeration in
/// dimensions up to 1, surface classification in dimension 2, and above that
/// by recursive vertex links plus a collapse (of `k` minus one facet in the
/// closed case).
pub fn classify_pl(k: &SimplicialComplex, seed: u64) -> LinkType {
    if k.is_empty() || !k.is_pure() || (k.dim() > 0 && !k.is_connected()) {
        return LinkType::Unknown;
    }
    let d = k.dim() as usize;
    match d {
        0 => match k.n_vertices() {
            1 => LinkType::Ball,
            2 => LinkType::Sphere,
            _ => LinkType::Unknown,
        },
        1 => {
            let mut deg = vec![0u32; k.n_vertices()];
            for e in k.simplices(1) {
                deg[e[0] as usize] += 1;
                deg[e[1] as usize] += 1;
            }
            if deg.iter().all(|&x| x == 2) {
                LinkType::Sphere
            } else if deg.iter().all(|&x| x == 1 || x == 2) && deg.iter().filter(|&&x| x == 1).count() == 2 {
                LinkType::Ball
            } else {
                LinkType::Unknown
            }
        }
        _ => {
            let mut closed = true;
            for v in 0..k.n_vertices() as u32 {
                let (l, _) = k.link_of(&[v]);
                match classify_pl(&l, seed) {
                    LinkType::Sphere => {}
                    LinkType::Ball => closed = false,
                    LinkType::Unknown => return LinkType::Unknown,
                }
            }
            if d == 2 {
                let chi = k.euler_characteristic();
                if closed {
                    return if chi == 2 { LinkType::Sphere } else { LinkType::Unknown };
                }
                let bd = k.boundary();
                return if chi == 1 && bd.is_connected() { LinkType::Ball } else { LinkType::Unknown };
            }
            if closed {
                let top = k.simplices(d).next().unwrap().to_vec();
                match greedy_collapse_punctured(k, &[top], &CollapseTarget::Point, LINK_RESTARTS, seed) {
                    CollapseOutcome::Certified(_) => LinkType::Sphere,
                    CollapseOutcome::Inconclusive { .. } => LinkType::Unknown,
                }
            } else {
                match greedy_collapse(k, &CollapseTarget::Point, LINK_RESTARTS, seed) {
                    CollapseOutcome::Certified(_) => LinkType::Ball,
                    CollapseOutcome::Inconclusive { .. } => LinkType::Unknown,
                }
            }
        }
    }
}

/// Result of checking that every vertex link is a PL sphere or ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldCheck {
    pub manifold: bool,
    pub interior_vertices: usize,
    pub boundary_vertices: usize,
    /// First vertex whose link was not recognized.
    pub failed_vertex: Option<u32>,
}

impl ManifoldCheck {
    pub fn closed(&self) -> bool {
        self.manifold && self.boundary_vertices == 0
    }
}

/// PL manifold test through vertex links (links are checked in parallel).
pub fn manifold_check(k: &SimplicialComplex, seed: u64) -> ManifoldCheck {
    if k.is_empty() || !k.is_pure() {
        return ManifoldCheck { manifold: false, interior_vertices: 0, boundary_vertices: 0, failed_vertex: None };
    }
    let d = k.dim() as usize;
    if d == 0 {
        return ManifoldCheck { manifold: true, interior_vertices: k.n_vertices(), boundary_vertices: 0, failed_vertex: None };
    }
    // vertex stars from the top simplices
    let mut star: Vec<Vec<u32>> = vec![Vec::new(); k.n_vertices()];
    for (i, s) in k.simplices(d).enumerate() {
        for &v in s {
            star[v as usize].push(i as u32);
        }
    }
    let types: Vec<LinkType> = (0..k.n_vertices())
        .into_par_iter()
        .map(|v| {
            let faces: Vec<Vec<u32>> = star[v].iter().map(|&i| k.table(d).get(i as usize).iter().copied().filter(|&x| x as usize != v).collect()).collect();
            let l = k.subcomplex_on_used_vertices(faces);
            classify_pl(&l, 0)
        })
        .collect();
    let _ = seed;
    let failed = types.iter().position(|&t| t == LinkType::Unknown).map(|v| v as u32);
    ManifoldCheck {
        manifold: failed.is_none(),
        interior_vertices: types.iter().filter(|&&t| t == LinkType::Sphere).count(),
        boundary_vertices: types.iter().filter(|&&t| t == LinkType::Ball).count(),
        failed_vertex: failed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Certified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub method: String,
    pub manifold: Option<ManifoldCheck>,
    pub collapse: Option<CollapseCertificate>,
    pub bistellar: Option<BistellarCertificate>,
}

impl Verdict {
    pub fn certified(&self) -> bool {
        self.status == VerdictStatus::Certified
    }

    fn inconclusive(method: &str, manifold: Option<ManifoldCheck>) -> Self {
        Verdict { status: VerdictStatus::Inconclusive, method: method.into(), manifold, collapse: None, bistellar: None }
    }
}

/// Ball: a PL manifold with boundary (vertex links) that collapses to a point.
pub fn verdict_ball(k: &SimplicialComplex, restarts: usize, seed: u64) -> Verdict {
    if k.is_empty() {
        return Verdict::inconclusive("empty", None);
    }
    let m = manifold_check(k, seed);
    if !m.manifold || (k.dim() > 0 && m.boundary_vertices == 0) {
        return Verdict::inconclusive("manifold check", Some(m));
    }
    match greedy_collapse(k, &CollapseTarget::Point, restarts, seed) {
        CollapseOutcome::Certified(c) => Verdict { status: VerdictStatus::Certified, method: "collapse".into(), manifold: Some(m), collapse: Some(c), bistellar: None },
        CollapseOutcome::Inconclusive { .. } => Verdict::inconclusive("collapse", Some(m)),
    }
}

/// Sphere: a closed PL manifold which collapses to a point after removing one
/// top simplex, or else a bistellar reduction to the boundary of a simplex.
pub fn verdict_sphere(k: &SimplicialComplex, restarts: usize, budget: usize, seed: u64) -> Verdict {
    if k.is_empty() {
        return Verdict::inconclusive("empty", None);
    }
    let m = manifold_check(k, seed);
    if m.closed() {
        let d = k.dim() as usize;
        let top = k.simplices(d).next().unwrap().to_vec();
        if let CollapseOutcome::Certified(c) = greedy_collapse_punctured(k, &[top], &CollapseTarget::Point, restarts, seed) {
            return Verdict { status: VerdictStatus::Certified, method: "punctured collapse".into(), manifold: Some(m), collapse: Some(c), bistellar: None };
        }
    }
    if let Ok(BistellarOutcome::Certified(c)) = bistellar_recognize_sphere(k, budget, seed) {
        return Verdict { status: VerdictStatus::Certified, method: "bistellar".into(), manifold: Some(m), collapse: None, bistellar: Some(c) };
    }
    Verdict::inconclusive(if m.closed() { "punctured collapse and bistellar moves" } else { "manifold check and bistellar moves" }, Some(m))
}

/// Sphere from two balls with a common boundary: both parts must be ball
/// certified, their union must be `k`, and `a ∩ b = ∂a = ∂b`.
pub fn verdict_sphere_from_balls(whole: &SimplicialComplex, a: &SimplicialComplex, b: &SimplicialComplex, restarts: usize, seed: u64) -> (Verdict, Verdict, bool) {
    let va = verdict_ball(a, restarts, seed);
    let vb = verdict_ball(b, restarts, seed);
    let glued = gluing_matches(whole, a, b);
    (va, vb, glued)
}

/// Boundary ridges (codimension-one faces in exactly one top simplex).
pub(crate) fn boundary_ridges(k: &SimplicialComplex) -> Vec<Vec<u32>> {
    let d = k.dim();
    if d < 1 {
        return Vec::new();
    }
    let mut counts: HashMap<Vec<u32>, u32> = HashMap::new();
    for s in k.simplices(d as usize) {
        for i in 0..s.len() {
            *counts.entry(without(s, i)).or_default() += 1;
        }
    }
    let mut v: Vec<Vec<u32>> = counts.into_iter().filter(|&(_, c)| c == 1).map(|(f, _)| f).collect();
    v.sort();
    v
}

/// Simplices of positive dimension together with their vertices, ignoring
/// isolated points.
fn cells(k: &SimplicialComplex) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for d in 1..=k.dim().max(0) as usize {
        for s in k.simplices(d) {
            out.insert(s.to_vec());
            for &v in s {
                out.insert(vec![v]);
            }
        }
    }
    out
}

/// Checks `whole = a ∪ b` and `a ∩ b = ∂a = ∂b` for subcomplexes in the
/// numbering of `whole`.
pub fn gluing_matches(whole: &SimplicialComplex, a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    let (ca, cb) = (cells(a), cells(b));
    if ca.union(&cb).cloned().collect::<BTreeSet<_>>() != cells(whole) {
        return false;
    }
    let inter: BTreeSet<Vec<u32>> = ca.intersection(&cb).cloned().collect();
    let bd = |k: &SimplicialComplex| cells(&SimplicialComplex::from_facets(k.n_vertices(), boundary_ridges(k)));
    let ba = bd(a);
    ba == bd(b) && ba == inter
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimensional_links() {
        // two points are the 0-sphere even though they are not connected
        assert_eq!(classify_pl(&SimplicialComplex::from_facets(2, [[0], [1]]), 0), LinkType::Sphere);
        assert_eq!(classify_pl(&SimplicialComplex::from_facets(1, [[0]]), 0), LinkType::Ball);
        assert_eq!(classify_pl(&SimplicialComplex::from_facets(3, [[0], [1], [2]]), 0), LinkType::Unknown);
    }

    #[test]
    fn simplex_collapses_to_point() {
        for d in 0..5 {
            let k = SimplicialComplex::simplex(d);
            let c = greedy_collapse(&k, &CollapseTarget::Point, 1, 0).certificate().cloned().expect("collapsible");
            assert!(c.terminal_is_point());
            replay_collapse(&k, &c, Some(1)).unwrap();
        }
    }

    #[test]
    fn closed_sphere_has_no_free_face() {
        let k = SimplicialComplex::simplex_boundary(3);
        assert!(matches!(greedy_collapse(&k, &CollapseTarget::Point, 5, 1), CollapseOutcome::Inconclusive { .. }));
    }

    #[test]
    fn tampered_collapse_reports_step() {
        let k = SimplicialComplex::simplex(3).barycentric_subdivision().0;
        let mut c = greedy_collapse(&k, &CollapseTarget::Point, 1, 0).certificate().cloned().unwrap();
        let first = c.steps[0].clone();
        c.steps.insert(3, first);
        match replay_collapse(&k, &c, None) {
            Err(ReplayFailure::Step { step, .. }) => assert_eq!(step, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_induced_collapse() {
        let k = SimplicialComplex::simplex(2).barycentric_subdivision().0;
        let c = greedy_collapse(&k, &CollapseTarget::Point, 1, 0).certificate().cloned().unwrap();
        let id: Vec<u32> = (0..k.n_vertices() as u32).collect();
        let out = induced_collapse(&k, &k, &id, &c.terminal, &c).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn step_inside_target_rejected() {
        let k = SimplicialComplex::simplex(2).barycentric_subdivision().0;
        let c = greedy_collapse(&k, &CollapseTarget::Point, 1, 0).certificate().cloned().unwrap();
        let l = vec![c.steps[0].1.clone()];
        let id: Vec<u32> = (0..k.n_vertices() as u32).collect();
        assert!(matches!(induced_collapse(&k, &k, &id, &l, &c), Err(InducedCollapseError::StepInsideL { step: 0 })));
    }

    #[test]
    fn non_injective_map_rejected() {
        let k = SimplicialComplex::from_facets(5, [[0u32, 1], [1, 2], [2, 3], [3, 4]]);
        let target = CollapseTarget::Subcomplex(vec![vec![0, 1], vec![1, 2]]);
        let c = greedy_collapse(&k, &target, 1, 0).certificate().cloned().unwrap();
        let l = vec![vec![0u32, 1], vec![1, 2]];
        let kt = SimplicialComplex::from_facets(4, [[0u32, 1], [1, 2], [2, 3]]);
        // squashes the edge 3-4
        let p = [0u32, 1, 2, 3, 3];
        let r = induced_collapse(&k, &kt, &p, &l, &c);
        assert!(matches!(r, Err(InducedCollapseError::NotSimplicialIso { .. })), "{r:?}");
    }

    #[test]
    fn folded_path_collapse() {
        // the path 0-1-2-3-4 folded onto 0-1-2 by 3 -> 1, 4 -> 0 is not bijective off {0}
        let k = SimplicialComplex::from_facets(5, [[0u32, 1], [1, 2], [2, 3], [3, 4]]);
        let c = greedy_collapse(&k, &CollapseTarget::Subcomplex(vec![vec![0]]), 1, 0).certificate().cloned().unwrap();
        let l = vec![vec![0u32]];
        let kt = SimplicialComplex::from_facets(3, [[0u32, 1], [1, 2]]);
        let p = [0u32, 1, 2, 1, 0];
        assert!(matches!(induced_collapse(&k, &kt, &p, &l, &c), Err(InducedCollapseError::NotBijectiveOffL { .. })));
    }

    #[test]
    fn doubling() {
        let tri = double_along_boundary(&SimplicialComplex::simplex(2)).unwrap();
        assert!(tri.subdivided);
        assert_eq!(tri.complex.euler_characteristic(), 2);
        assert!(homology(&tri.complex).unwrap().is_sphere_homology(2));
        let back = tri.first_copy();
        assert_eq!(back.maximal_simplices(), tri.base.maximal_simplices());
        let arc = double_along_boundary(&SimplicialComplex::simplex(1)).unwrap();
        assert_eq!(classify_pl(&arc.complex, 0), LinkType::Sphere);
        assert_eq!(double_along_boundary(&SimplicialComplex::simplex_boundary(2)).unwrap_err(), DoubleError::NoBoundary);
        // swap is an involution fixing the boundary
        for (v, &w) in tri.swap.iter().enumerate() {
            assert_eq!(tri.swap[w as usize] as usize, v);
            assert_eq!(tri.copy[v] == 0, w as usize == v);
        }
    }

    #[test]
    fn bistellar() {
        let k = SimplicialComplex::simplex_boundary(4);
        let BistellarOutcome::Certified(c) = bistellar_recognize_sphere(&k, 10, 0).unwrap() else { panic!() };
        assert!(c.moves.is_empty());
        let dbl = double_along_boundary(&SimplicialComplex::simplex(2)).unwrap().complex;
        let BistellarOutcome::Certified(c) = bistellar_recognize_sphere(&dbl, 1000, 3).unwrap() else { panic!("double of a triangle") };
        replay_bistellar(&dbl, &c, Some(1)).unwrap();
        let rp2 = SimplicialComplex::from_facets(
            6,
            [[0u32, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5], [1, 2, 4], [2, 3, 5], [1, 3, 4], [1, 3, 5], [2, 4, 5]],
        );
        assert!(matches!(bistellar_recognize_sphere(&rp2, 100, 0), Err(BistellarError::PrefilterFailed(_))));
    }

    #[test]
    fn verdicts() {
        for d in 1..4 {
            assert!(verdict_ball(&SimplicialComplex::simplex(d), 2, 0).certified());
            assert!(verdict_sphere(&SimplicialComplex::simplex_boundary(d + 1), 2, 100, 0).certified());
        }
        let sd = SimplicialComplex::simplex_boundary(4).barycentric_subdivision().0;
        let v = verdict_sphere(&sd, 4, 0, 0);
        assert!(v.certified());
        assert_eq!(v.method, "punctured collapse");
        replay_collapse(&sd, v.collapse.as_ref().unwrap(), None).unwrap();
    }

    #[test]
    fn sphere_from_two_balls() {
        // the octahedron split along its equator 0-1-2-3 into two cones
        let oct = SimplicialComplex::from_facets(6, [[0u32, 1, 4], [1, 2, 4], [2, 3, 4], [0, 3, 4], [0, 1, 5], [1, 2, 5], [2, 3, 5], [0, 3, 5]]);
        let a = SimplicialComplex::from_facets(6, [[0u32, 1, 4], [1, 2, 4], [2, 3, 4], [0, 3, 4]]);
        let b = SimplicialComplex::from_facets(6, [[0u32, 1, 5], [1, 2, 5], [2, 3, 5], [0, 3, 5]]);
        assert!(gluing_matches(&oct, &a, &b));
        let a2 = SimplicialComplex::from_facets(6, [[0u32, 1, 4], [1, 2, 4], [2, 3, 4]]);
        assert!(!gluing_matches(&oct, &a2, &b));
        let used = |k: &SimplicialComplex| k.subcomplex_on_used_vertices(k.maximal_simplices().into_iter().filter(|s| s.len() > 1));
        assert!(verdict_ball(&used(&a), 2, 0).certified());
        let m = manifold_check(&oct, 0);
        assert!(m.closed());
    }
}
