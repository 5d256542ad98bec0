//! Integral simplicial homology through Smith normal form, with a replayable
//! log of elementary operations as certificate, plus the edge-path group.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{without, SimplicialComplex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("complex is empty")]
    EmptyComplex,
    #[error("complex is disconnected")]
    Disconnected,
    #[error("matrix entry overflow during elimination")]
    Overflow,
    #[error("non-unit remainder of {rows}x{cols} is too large for dense reduction")]
    RemainderTooLarge { rows: usize, cols: usize },
}

/// Sparse integer matrix given by columns of `(row, value)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Column-major entries, each column sorted by row.
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let columns = (0..c).map(|j| (0..r).filter(|&i| rows[i][j] != 0).map(|i| (i as u32, rows[i][j])).collect()).collect();
        SparseMatrix { rows: r, cols: c, columns }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i as usize][j] = BigInt::from(v);
            }
        }
        d
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }
}

/// Boundary matrix `d_k : C_k -> C_{k-1}` of a complex.
pub fn boundary_matrix(k: &SimplicialComplex, dim: usize) -> SparseMatrix {
    assert!(dim >= 1);
    let rows = k.num_simplices(dim - 1);
    let table = k.table(dim - 1);
    let columns: Vec<Vec<(u32, i64)>> = k
        .simplices(dim)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|s| {
            let mut col: Vec<(u32, i64)> = (0..s.len())
                .map(|i| (table.index_of(&without(s, i)).expect("face") as u32, if i % 2 == 0 { 1 } else { -1 }))
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    SparseMatrix { rows, cols: k.num_simplices(dim), columns }
}

/// One elementary operation of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElemOp {
    /// `row[target] += factor * row[source]`
    RowAdd { target: u32, source: u32, factor: BigInt },
    /// `col[target] += factor * col[source]`
    ColAdd { target: u32, source: u32, factor: BigInt },
    RowSwap { a: u32, b: u32 },
    ColSwap { a: u32, b: u32 },
    RowNeg { row: u32 },
    ColNeg { col: u32 },
}

impl ElemOp {
    fn feed(&self, h: &mut Sha256) {
        let line = match self {
            ElemOp::RowAdd { target, source, factor } => format!("R{target},{source},{factor};"),
            ElemOp::ColAdd { target, source, factor } => format!("C{target},{source},{factor};"),
            ElemOp::RowSwap { a, b } => format!("r{a},{b};"),
            ElemOp::ColSwap { a, b } => format!("c{a},{b};"),
            ElemOp::RowNeg { row } => format!("n{row};"),
            ElemOp::ColNeg { col } => format!("m{col};"),
        };
        h.update(line.as_bytes());
    }
}

fn feed_cleared(h: &mut Sha256, cleared: &[u32]) {
    if cleared.is_empty() {
        return;
    }
    h.update(b"cleared");
    for c in cleared {
        h.update(c.to_le_bytes());
    }
}

fn column_mask(cols: usize, cleared: &[u32]) -> Vec<bool> {
    let mut m = vec![false; cols];
    for &c in cleared {
        if let Some(x) = m.get_mut(c as usize) {
            *x = true;
        }
    }
    m
}

struct OpLog {
    ops: Option<Vec<ElemOp>>,
    hasher: Sha256,
    count: usize,
}

impl OpLog {
    fn new(keep: bool) -> Self {
        OpLog { ops: keep.then(Vec::new), hasher: Sha256::new(), count: 0 }
    }

    fn push(&mut self, op: ElemOp) {
        op.feed(&mut self.hasher);
        self.count += 1;
        if let Some(v) = &mut self.ops {
            v.push(op);
        }
    }
}

/// `U A V = D`, recorded as the operations producing `U` (rows) and `V` (columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfCertificate {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero entries of `D`: distinct rows and columns.
    pub pivots: Vec<(u32, u32, BigInt)>,
    /// Leading entries of `pivots` found by the sparse unit-pivot phase.
    #[serde(default)]
    pub sparse_pivots: usize,
    /// Columns taken as zero: the sparse pivot rows of the next boundary map.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cleared: Vec<u32>,
    pub op_count: usize,
    /// sha256 over the cleared columns and the operation log.
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ops: Option<Vec<ElemOp>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("certificate carries no operation log")]
    NoLog,
    #[error("operation {step} refers to an index out of range")]
    OutOfRange { step: usize },
    #[error("matrix shape {found:?} differs from certificate {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("replayed matrix differs from the claimed diagonal at ({row}, {col})")]
    Mismatch { row: u32, col: u32 },
    #[error("digest mismatch")]
    Digest,
}

impl SnfCertificate {
    /// Invariant factors: absolute values of the pivots, sorted.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self.pivots.iter().map(|p| p.2.abs()).collect();
        v.sort();
        v
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Re-applies the log to `a` and checks the result against the claimed pivots.
    pub fn replay(&self, a: &SparseMatrix) -> Result<(), ReplayError> {
        let ops = self.ops.as_ref().ok_or(ReplayError::NoLog)?;
        if (a.rows, a.cols) != (self.rows, self.cols) {
            return Err(ReplayError::Shape { expected: (self.rows, self.cols), found: (a.rows, a.cols) });
        }
        let mut h = Sha256::new();
        feed_cleared(&mut h, &self.cleared);
        for op in ops {
            op.feed(&mut h);
        }
        if hex::encode(h.finalize()) != self.digest {
            return Err(ReplayError::Digest);
        }
        let mut rows: Vec<HashMap<u32, BigInt>> = vec![HashMap::new(); a.rows];
        let mut cols: Vec<HashMap<u32, BigInt>> = vec![HashMap::new(); a.cols];
        let zeroed = column_mask(a.cols, &self.cleared);
        for (j, col) in a.columns.iter().enumerate() {
            if zeroed[j] {
                continue;
            }
            for &(i, v) in col {
                rows[i as usize].insert(j as u32, BigInt::from(v));
                cols[j].insert(i, BigInt::from(v));
            }
        }
        fn put(rows: &mut [HashMap<u32, BigInt>], cols: &mut [HashMap<u32, BigInt>], i: u32, j: u32, v: BigInt) {
            if v.is_zero() {
                rows[i as usize].remove(&j);
                cols[j as usize].remove(&i);
            } else {
                rows[i as usize].insert(j, v.clone());
                cols[j as usize].insert(i, v);
            }
        }
        let (nr, nc) = (a.rows as u32, a.cols as u32);
        for (step, op) in ops.iter().enumerate() {
            let oor = ReplayError::OutOfRange { step };
            match op {
                ElemOp::RowAdd { target, source, factor } => {
                    if *target >= nr || *source >= nr || target == source {
                        return Err(oor);
                    }
                    let src: Vec<(u32, BigInt)> = rows[*source as usize].iter().map(|(&j, v)| (j, v.clone())).collect();
                    for (j, v) in src {
                        let cur = rows[*target as usize].get(&j).cloned().unwrap_or_default();
                        put(&mut rows, &mut cols, *target, j, cur + factor * v);
                    }
                }
                ElemOp::ColAdd { target, source, factor } => {
                    if *target >= nc || *source >= nc || target == source {
                        return Err(oor);
                    }
                    let src: Vec<(u32, BigInt)> = cols[*source as usize].iter().map(|(&i, v)| (i, v.clone())).collect();
                    for (i, v) in src {
                        let cur = cols[*target as usize].get(&i).cloned().unwrap_or_default();
                        put(&mut rows, &mut cols, i, *target, cur + factor * v);
                    }
                }
                ElemOp::RowSwap { a: x, b: y } => {
                    if *x >= nr || *y >= nr {
                        return Err(oor);
                    }
                    let rx: Vec<(u32, BigInt)> = rows[*x as usize].drain().collect();
                    let ry: Vec<(u32, BigInt)> = rows[*y as usize].drain().collect();
                    for (j, _) in rx.iter().chain(&ry) {
                        cols[*j as usize].remove(x);
                        cols[*j as usize].remove(y);
                    }
                    for (j, v) in rx {
                        put(&mut rows, &mut cols, *y, j, v);
                    }
                    for (j, v) in ry {
                        put(&mut rows, &mut cols, *x, j, v);
                    }
                }
                ElemOp::ColSwap { a: x, b: y } => {
                    if *x >= nc || *y >= nc {
                        return Err(oor);
                    }
                    let cx: Vec<(u32, BigInt)> = cols[*x as usize].drain().collect();
                    let cy: Vec<(u32, BigInt)> = cols[*y as usize].drain().collect();
                    for (i, _) in cx.iter().chain(&cy) {
                        rows[*i as usize].remove(x);
                        rows[*i as usize].remove(y);
                    }
                    for (i, v) in cx {
                        put(&mut rows, &mut cols, i, *y, v);
                    }
                    for (i, v) in cy {
                        put(&mut rows, &mut cols, i, *x, v);
                    }
                }
                ElemOp::RowNeg { row } => {
                    if *row >= nr {
                        return Err(oor);
                    }
                    let r: Vec<(u32, BigInt)> = rows[*row as usize].iter().map(|(&j, v)| (j, -v)).collect();
                    for (j, v) in r {
                        put(&mut rows, &mut cols, *row, j, v);
                    }
                }
                ElemOp::ColNeg { col } => {
                    if *col >= nc {
                        return Err(oor);
                    }
                    let c: Vec<(u32, BigInt)> = cols[*col as usize].iter().map(|(&i, v)| (i, -v)).collect();
                    for (i, v) in c {
                        put(&mut rows, &mut cols, i, *col, v);
                    }
                }
            }
        }
        let claimed: HashMap<(u32, u32), &BigInt> = self.pivots.iter().map(|(i, j, v)| ((*i, *j), v)).collect();
        for (i, r) in rows.iter().enumerate() {
            for (&j, v) in r {
                if claimed.get(&(i as u32, j)) != Some(&v) {
                    return Err(ReplayError::Mismatch { row: i as u32, col: j });
                }
            }
        }
        for &(i, j, _) in &self.pivots {
            if !rows[i as usize].contains_key(&j) {
                return Err(ReplayError::Mismatch { row: i, col: j });
            }
        }
        Ok(())
    }

    /// Dense `U` and `V` with `U A V = D` (only sensible for small matrices).
    pub fn materialize(&self) -> Result<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>), ReplayError> {
        let ops = self.ops.as_ref().ok_or(ReplayError::NoLog)?;
        let eye = |n: usize| -> Vec<Vec<BigInt>> { (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect() };
        let mut u = eye(self.rows);
        let mut v = eye(self.cols);
        for op in ops {
            match op {
                ElemOp::RowAdd { target, source, factor } => {
                    let src = u[*source as usize].clone();
                    for (x, s) in u[*target as usize].iter_mut().zip(src) {
                        *x += factor * s;
                    }
                }
                ElemOp::ColAdd { target, source, factor } => {
                    for row in v.iter_mut() {
                        let s = row[*source as usize].clone();
                        row[*target as usize] += factor * s;
                    }
                }
                ElemOp::RowSwap { a, b } => u.swap(*a as usize, *b as usize),
                ElemOp::ColSwap { a, b } => {
                    for row in v.iter_mut() {
                        row.swap(*a as usize, *b as usize);
                    }
                }
                ElemOp::RowNeg { row } => {
                    for x in u[*row as usize].iter_mut() {
                        *x = -x.clone();
                    }
                }
                ElemOp::ColNeg { col } => {
                    for row in v.iter_mut() {
                        row[*col as usize] = -row[*col as usize].clone();
                    }
                }
            }
        }
        Ok((u, v))
    }
}

/// Largest non-unit remainder reduced densely.
const DENSE_LIMIT: usize = 4_000_000;

/// Smith normal form by sparse elimination over unit pivots (singleton rows and
/// columns first, then the sparsest column), finishing any non-unit remainder
/// densely with smallest-absolute-value pivots.
pub fn smith_normal_form(a: &SparseMatrix, keep_log: bool) -> Result<SnfCertificate, HomologyError> {
    smith_normal_form_cleared(a, &[], keep_log)
}

/// As [`smith_normal_form`], with the columns in `cleared` (sorted) taken as zero.
pub fn smith_normal_form_cleared(a: &SparseMatrix, cleared: &[u32], keep_log: bool) -> Result<SnfCertificate, HomologyError> {
    let mut log = OpLog::new(keep_log);
    feed_cleared(&mut log.hasher, cleared);
    let zeroed = column_mask(a.cols, cleared);
    let mut rows: Vec<Vec<(u32, i64)>> = vec![Vec::new(); a.rows];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); a.cols];
    for (j, col) in a.columns.iter().enumerate() {
        if zeroed[j] {
            continue;
        }
        for &(i, v) in col {
            if v != 0 {
                rows[i as usize].push((j as u32, v));
                col_rows[j].push(i);
            }
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
    }
    let mut col_cnt: Vec<u32> = col_rows.iter().map(|c| c.len() as u32).collect();
    let mut row_done = vec![false; a.rows];
    let mut col_done = vec![false; a.cols];
    let mut pivots: Vec<(u32, u32, BigInt)> = Vec::new();
    let mut row_q: VecDeque<u32> = (0..a.rows as u32).filter(|&i| rows[i as usize].len() == 1).collect();
    let mut col_q: VecDeque<u32> = (0..a.cols as u32).filter(|&j| col_cnt[j as usize] == 1).collect();
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..a.cols as u32).filter(|&j| col_cnt[j as usize] > 0).map(|j| Reverse((col_cnt[j as usize], j))).collect();

    fn entry(row: &[(u32, i64)], c: u32) -> Option<i64> {
        row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1)
    }

    loop {
        // pick a pivot
        let mut pivot: Option<(u32, u32)> = None;
        while let Some(r) = row_q.pop_front() {
            if row_done[r as usize] {
                continue;
            }
            let row = &rows[r as usize];
            if row.len() == 1 && row[0].1.abs() == 1 {
                pivot = Some((r, row[0].0));
                break;
            }
        }
        if pivot.is_none() {
            while let Some(c) = col_q.pop_front() {
                if col_done[c as usize] || col_cnt[c as usize] != 1 {
                    continue;
                }
                let r = col_rows[c as usize].iter().copied().find(|&r| !row_done[r as usize] && entry(&rows[r as usize], c).is_some());
                if let Some(r) = r {
                    if entry(&rows[r as usize], c).map(i64::abs) == Some(1) {
                        pivot = Some((r, c));
                        break;
                    }
                }
            }
        }
        if pivot.is_none() {
            while let Some(Reverse((cnt, c))) = heap.pop() {
                if col_done[c as usize] || col_cnt[c as usize] != cnt || cnt == 0 {
                    if !col_done[c as usize] && col_cnt[c as usize] > 0 && col_cnt[c as usize] != cnt {
                        heap.push(Reverse((col_cnt[c as usize], c)));
                    }
                    continue;
                }
                let mut best: Option<(usize, u32)> = None;
                for &r in &col_rows[c as usize] {
                    if row_done[r as usize] {
                        continue;
                    }
                    if entry(&rows[r as usize], c).map(i64::abs) == Some(1) {
                        let len = rows[r as usize].len();
                        if best.is_none_or(|(bl, br)| (len, r) < (bl, br)) {
                            best = Some((len, r));
                        }
                    }
                }
                if let Some((_, r)) = best {
                    pivot = Some((r, c));
                    break;
                }
                // no unit entry in this column for now; it may gain one later
            }
        }
        let Some((pr, pc)) = pivot else { break };
        let pv = entry(&rows[pr as usize], pc).expect("pivot entry");
        // clear the pivot column with row operations
        let mut targets: Vec<u32> = col_rows[pc as usize].iter().copied().filter(|&r| r != pr && !row_done[r as usize]).collect();
        targets.sort_unstable();
        targets.dedup();
        let prow = rows[pr as usize].clone();
        for t in targets {
            let Some(tv) = entry(&rows[t as usize], pc) else { continue };
            let factor = -tv * pv; // pv = +-1
            log.push(ElemOp::RowAdd { target: t, source: pr, factor: BigInt::from(factor) });
            let old = std::mem::take(&mut rows[t as usize]);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut x, mut y) = (0, 0);
            while x < old.len() || y < prow.len() {
                let take_old = y >= prow.len() || (x < old.len() && old[x].0 < prow[y].0);
                let take_new = x >= old.len() || (y < prow.len() && prow[y].0 < old[x].0);
                if take_old {
                    merged.push(old[x]);
                    x += 1;
                } else if take_new {
                    let c = prow[y].0;
                    let v = factor.checked_mul(prow[y].1).ok_or(HomologyError::Overflow)?;
                    merged.push((c, v));
                    col_cnt[c as usize] += 1;
                    col_rows[c as usize].push(t);
                    y += 1;
                } else {
                    let c = old[x].0;
                    let v = factor.checked_mul(prow[y].1).and_then(|p| p.checked_add(old[x].1)).ok_or(HomologyError::Overflow)?;
                    if v != 0 {
                        merged.push((c, v));
                    } else {
                        col_cnt[c as usize] -= 1;
                        if col_cnt[c as usize] == 1 {
                            col_q.push_back(c);
                        }
                    }
                    x += 1;
                    y += 1;
                }
            }
            rows[t as usize] = merged;
            if rows[t as usize].len() == 1 {
                row_q.push_back(t);
            }
            for &(c, _) in &rows[t as usize] {
                if col_cnt[c as usize] > 0 && !col_done[c as usize] {
                    heap.push(Reverse((col_cnt[c as usize], c)));
                }
            }
        }
        // clear the pivot row with column operations
        for &(c, v) in &prow {
            if c == pc {
                continue;
            }
            log.push(ElemOp::ColAdd { target: c, source: pc, factor: BigInt::from(-v * pv) });
            col_cnt[c as usize] -= 1;
            if col_cnt[c as usize] == 1 {
                col_q.push_back(c);
            }
            if col_cnt[c as usize] > 0 {
                heap.push(Reverse((col_cnt[c as usize], c)));
            }
        }
        rows[pr as usize] = vec![(pc, pv)];
        row_done[pr as usize] = true;
        col_done[pc as usize] = true;
        col_cnt[pc as usize] = 0;
        pivots.push((pr, pc, BigInt::from(pv)));
    }

    let sparse_pivots = pivots.len();
    // non-unit remainder
    let rem_rows: Vec<u32> = (0..a.rows as u32).filter(|&r| !row_done[r as usize] && !rows[r as usize].is_empty()).collect();
    let mut rem_cols: Vec<u32> = rem_rows.iter().flat_map(|&r| rows[r as usize].iter().map(|e| e.0)).collect();
    rem_cols.sort_unstable();
    rem_cols.dedup();
    if !rem_rows.is_empty() {
        if rem_rows.len() * rem_cols.len() > DENSE_LIMIT {
            return Err(HomologyError::RemainderTooLarge { rows: rem_rows.len(), cols: rem_cols.len() });
        }
        let cpos: HashMap<u32, usize> = rem_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); rem_cols.len()]; rem_rows.len()];
        for (i, &r) in rem_rows.iter().enumerate() {
            for &(c, v) in &rows[r as usize] {
                m[i][cpos[&c]] = BigInt::from(v);
            }
        }
        for (i, j, v) in dense_snf(&mut m, &rem_rows, &rem_cols, &mut log) {
            pivots.push((i, j, v));
        }
    }
    let digest = hex::encode(log.hasher.finalize());
    Ok(SnfCertificate { rows: a.rows, cols: a.cols, pivots, sparse_pivots, cleared: cleared.to_vec(), op_count: log.count, digest, ops: log.ops })
}

/// Dense SNF of `m`; `rmap`/`cmap` translate local indices to the global ones
/// used in the log. Returns pivots in global indices, forming a divisibility chain.
fn dense_snf(m: &mut [Vec<BigInt>], rmap: &[u32], cmap: &[u32], log: &mut OpLog) -> Vec<(u32, u32, BigInt)> {
    let nr = m.len();
    let nc = m.first().map_or(0, Vec::len);
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero |entry| in the trailing block, first in row-major order
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !m[i][j].is_zero() {
                    let a = m[i][j].abs();
                    if best.as_ref().is_none_or(|b| a < b.0) {
                        best = Some((a, i, j));
                    }
                }
            }
        }
        let Some((_, bi, bj)) = best else { break };
        if bi != t {
            m.swap(bi, t);
            log.push(ElemOp::RowSwap { a: rmap[bi], b: rmap[t] });
        }
        if bj != t {
            for row in m.iter_mut() {
                row.swap(bj, t);
            }
            log.push(ElemOp::ColSwap { a: cmap[bj], b: cmap[t] });
        }
        let mut restart = false;
        for i in t + 1..nr {
            if m[i][t].is_zero() {
                continue;
            }
            let q = m[i][t].div_floor(&m[t][t]);
            if !q.is_zero() {
                let src = m[t].clone();
                for (x, s) in m[i].iter_mut().zip(src) {
                    *x -= &q * s;
                }
                log.push(ElemOp::RowAdd { target: rmap[i], source: rmap[t], factor: -q });
            }
            if !m[i][t].is_zero() {
                restart = true;
            }
        }
        for j in t + 1..nc {
            if m[t][j].is_zero() {
                continue;
            }
            let q = m[t][j].div_floor(&m[t][t]);
            if !q.is_zero() {
                for row in m.iter_mut() {
                    let s = row[t].clone();
                    row[j] -= &q * s;
                }
                log.push(ElemOp::ColAdd { target: cmap[j], source: cmap[t], factor: -q });
            }
            if !m[t][j].is_zero() {
                restart = true;
            }
        }
        if restart {
            continue;
        }
        // divisibility: if some entry is not divisible by the pivot, fold its row in
        let p = m[t][t].clone();
        let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !(&m[i][j] % &p).is_zero()));
        if let Some(i) = bad {
            let src = m[i].clone();
            for (x, s) in m[t].iter_mut().zip(src) {
                *x += s;
            }
            log.push(ElemOp::RowAdd { target: rmap[t], source: rmap[i], factor: BigInt::one() });
            continue;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            log.push(ElemOp::RowNeg { row: rmap[t] });
        }
        t += 1;
    }
    (0..t).map(|i| (rmap[i], cmap[i], m[i][i].clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    /// Torsion coefficients of each `H_k` (invariant factors greater than 1).
    pub torsion: Vec<Vec<BigInt>>,
    pub f_vector: Vec<usize>,
    /// Certificate of `d_k` at index `k - 1`.
    pub certificates: Vec<SnfCertificate>,
}

impl HomologyResult {
    pub fn is_zero(&self, k: usize) -> bool {
        self.betti.get(k).copied().unwrap_or(0) == 0 && self.torsion.get(k).is_none_or(Vec::is_empty)
    }

    /// Reduced homology of a `d`-sphere.
    pub fn is_sphere_homology(&self, d: usize) -> bool {
        self.betti.len() == d + 1
            && (0..=d).all(|k| self.betti[k] == usize::from(k == 0 || k == d) && self.torsion[k].is_empty())
    }

    /// Homology of a point.
    pub fn is_acyclic(&self) -> bool {
        self.betti.first() == Some(&1) && self.betti.iter().skip(1).all(|&b| b == 0) && self.torsion.iter().all(Vec::is_empty)
    }

    /// Compact text such as `(Z, 0, Z/2, Z)`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = (0..self.betti.len())
            .map(|k| {
                let mut terms: Vec<String> = Vec::new();
                match self.betti[k] {
                    0 => {}
                    1 => terms.push("Z".into()),
                    b => terms.push(format!("Z^{b}")),
                }
                for t in &self.torsion[k] {
                    terms.push(format!("Z/{t}"));
                }
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// Integral homology of `k`. With `keep_logs` the full operation logs are stored
/// in the certificates; digests are always recorded.
pub fn homology_with(k: &SimplicialComplex, keep_logs: bool) -> Result<HomologyResult, HomologyError> {
    if k.is_empty() {
        return Err(HomologyError::EmptyComplex);
    }
    let d = k.dim() as usize;
    // top map first; its sparse pivot rows clear columns of the map below
    let mut certificates: Vec<SnfCertificate> = Vec::with_capacity(d);
    let mut cleared: Vec<u32> = Vec::new();
    for dim in (1..=d).rev() {
        let c = smith_normal_form_cleared(&boundary_matrix(k, dim), &cleared, keep_logs)?;
        cleared = clearing_rows(&c);
        certificates.push(c);
    }
    certificates.reverse();
    let f = k.f_vector();
    let rank = |dim: usize| -> usize { if dim >= 1 && dim <= d { certificates[dim - 1].rank() } else { 0 } };
    let betti = (0..=d).map(|i| f[i] - rank(i) - rank(i + 1)).collect();
    let torsion = (0..=d)
        .map(|i| if i < d { certificates[i].invariant_factors().into_iter().filter(|x| !x.is_one()).collect() } else { Vec::new() })
        .collect();
    Ok(HomologyResult { betti, torsion, f_vector: f, certificates })
}

/// Rows of the sparse-phase pivots, sorted: the columns cleared in the map below.
pub fn clearing_rows(c: &SnfCertificate) -> Vec<u32> {
    let mut v: Vec<u32> = c.pivots[..c.sparse_pivots.min(c.pivots.len())].iter().map(|p| p.0).collect();
    v.sort_unstable();
    v
}

/// Replays every certificate of `h` on the boundary matrices of `k` and checks
/// that the cleared columns are the sparse unit pivot rows of the map above.
pub fn verify_homology(k: &SimplicialComplex, h: &HomologyResult) -> Result<(), String> {
    let d = k.dim().max(0) as usize;
    if h.certificates.len() != d {
        return Err(format!("{} certificates for dimension {d}", h.certificates.len()));
    }
    for dim in 1..=d {
        let c = &h.certificates[dim - 1];
        let want = if dim < d { clearing_rows(&h.certificates[dim]) } else { Vec::new() };
        if c.cleared != want {
            return Err(format!("cleared columns of d{dim} differ from the pivot rows of d{}", dim + 1));
        }
        if c.sparse_pivots > c.pivots.len() || c.pivots[..c.sparse_pivots].iter().any(|p| !p.2.abs().is_one()) {
            return Err(format!("non-unit pivot in the sparse phase of d{dim}"));
        }
        c.replay(&boundary_matrix(k, dim)).map_err(|e| format!("d{dim}: {e}"))?;
    }
    Ok(())
}

pub fn homology(k: &SimplicialComplex) -> Result<HomologyResult, HomologyError> {
    homology_with(k, false)
}

/// Prediction for `H_i(S/G) = 0` from quotient homology of subgroups: true when
/// the indices of the subgroups with `H_i = 0` have gcd 1.
pub fn transfer_criterion(subgroups: &[(u64, &HomologyResult)], i: usize) -> bool {
    let g = subgroups.iter().filter(|(_, h)| h.is_zero(i)).fold(0u64, |g, (idx, _)| g.gcd(idx));
    g == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresentationStatus {
    TrivialCertified,
    NontrivialAbelianization,
    Inconclusive,
}

/// Outcome of simplifying the edge-path group presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub status: PresentationStatus,
    pub edges: usize,
    pub tree_edges: usize,
    pub triangles: usize,
    pub generators_left: usize,
    pub relators_left: Vec<Vec<i64>>,
    /// Invariant factors of the abelianization, `0` for each free summand.
    pub abelianization: Vec<BigInt>,
    pub tietze_passes: usize,
}

pub const TIETZE_PASSES: usize = 1000;
pub const RELATOR_CAP: usize = 10_000;

fn reduce_word(w: &mut Vec<i64>) {
    let mut out: Vec<i64> = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    // cyclic reduction
    let mut s = 0;
    let mut e = out.len();
    while e - s >= 2 && out[s] == -out[e - 1] {
        s += 1;
        e -= 1;
    }
    *w = out[s..e].to_vec();
}

/// Edge-path group from a spanning tree and the triangles, simplified by
/// propagation through triangles and Tietze eliminations.
pub fn edge_path_presentation(k: &SimplicialComplex) -> Result<PresentationReport, HomologyError> {
    if k.is_empty() {
        return Err(HomologyError::EmptyComplex);
    }
    if !k.is_connected() {
        return Err(HomologyError::Disconnected);
    }
    let ne = k.num_simplices(1);
    let nt = k.num_simplices(2);
    let edges = k.table(1);
    // BFS spanning tree from vertex 0
    let n = k.n_vertices();
    let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adj[e[0] as usize].push((e[1], i as u32));
        adj[e[1] as usize].push((e[0], i as u32));
    }
    let mut known = vec![false; ne];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut q = VecDeque::from([0u32]);
    let mut tree = 0;
    while let Some(v) = q.pop_front() {
        for &(w, e) in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                known[e as usize] = true;
                tree += 1;
                q.push_back(w);
            }
        }
    }
    // triangle relators: e(ab) e(bc) e(ac)^-1, generators numbered from 1
    let tris: Vec<[u32; 3]> = k
        .simplices(2)
        .map(|t| {
            let ab = edges.index_of(&[t[0], t[1]]).unwrap() as u32;
            let bc = edges.index_of(&[t[1], t[2]]).unwrap() as u32;
            let ac = edges.index_of(&[t[0], t[2]]).unwrap() as u32;
            [ab, bc, ac]
        })
        .collect();
    let mut edge_tris: Vec<Vec<u32>> = vec![Vec::new(); ne];
    for (i, t) in tris.iter().enumerate() {
        for &e in t {
            edge_tris[e as usize].push(i as u32);
        }
    }
    let mut unknown_cnt: Vec<u8> = tris.iter().map(|t| t.iter().filter(|&&e| !known[e as usize]).count() as u8).collect();
    let mut tq: VecDeque<u32> = (0..nt as u32).filter(|&i| unknown_cnt[i as usize] == 1).collect();
    while let Some(t) = tq.pop_front() {
        if unknown_cnt[t as usize] != 1 {
            continue;
        }
        let e = *tris[t as usize].iter().find(|&&e| !known[e as usize]).unwrap();
        known[e as usize] = true;
        for &u in &edge_tris[e as usize] {
            unknown_cnt[u as usize] -= 1;
            if unknown_cnt[u as usize] == 1 {
                tq.push_back(u);
            }
        }
    }
    let gens: Vec<u32> = (0..ne as u32).filter(|&e| !known[e as usize]).collect();
    let gpos: HashMap<u32, i64> = gens.iter().enumerate().map(|(i, &e)| (e, i as i64 + 1)).collect();
    let mut relators: Vec<Vec<i64>> = Vec::new();
    for (i, t) in tris.iter().enumerate() {
        if unknown_cnt[i] == 0 {
            continue;
        }
        let mut w = Vec::new();
        for (slot, &e) in t.iter().enumerate() {
            if let Some(&g) = gpos.get(&e) {
                w.push(if slot == 2 { -g } else { g });
            }
        }
        relators.push(w);
    }
    let mut alive: Vec<bool> = vec![true; gens.len() + 1];
    let mut passes = 0;
    while passes < TIETZE_PASSES {
        passes += 1;
        let mut changed = false;
        for r in relators.iter_mut() {
            reduce_word(r);
        }
        relators.retain(|r| !r.is_empty());
        relators.sort();
        relators.dedup();
        // a generator occurring exactly once in some relator can be eliminated
        let mut pick: Option<(usize, i64)> = None;
        'find: for (ri, r) in relators.iter().enumerate() {
            let mut counts: HashMap<i64, usize> = HashMap::new();
            for &x in r {
                *counts.entry(x.abs()).or_default() += 1;
            }
            for &x in r {
                if counts[&x.abs()] == 1 {
                    pick = Some((ri, x));
                    break 'find;
                }
            }
        }
        if let Some((ri, x)) = pick {
            let r = relators.remove(ri);
            let p = r.iter().position(|&y| y == x).unwrap();
            // r = u x v = 1  =>  x = u^-1 v^-1 ; rotate so x is first: x w = 1 => x = w^-1
            let mut rot: Vec<i64> = r[p + 1..].iter().chain(&r[..p]).copied().collect();
            rot.reverse();
            let mut repl: Vec<i64> = rot.into_iter().map(|y| -y).collect();
            if x < 0 {
                repl.reverse();
                repl = repl.into_iter().map(|y| -y).collect();
            }
            let g = x.abs();
            let inv: Vec<i64> = repl.iter().rev().map(|y| -y).collect();
            let mut too_long = false;
            let new: Vec<Vec<i64>> = relators
                .iter()
                .map(|w| {
                    let mut out = Vec::new();
                    for &y in w {
                        if y == g {
                            out.extend(&repl);
                        } else if y == -g {
                            out.extend(&inv);
                        } else {
                            out.push(y);
                        }
                    }
                    if out.len() > RELATOR_CAP {
                        too_long = true;
                    }
                    out
                })
                .collect();
            if too_long {
                relators.insert(ri, r);
                break;
            }
            relators = new;
            alive[g as usize] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let live: Vec<i64> = (1..alive.len() as i64).filter(|&g| alive[g as usize]).collect();
    let status_trivial = live.is_empty();
    let abelianization = if status_trivial {
        Vec::new()
    } else {
        let lpos: HashMap<i64, usize> = live.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let rows: Vec<Vec<i64>> = relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; live.len()];
                for &x in r {
                    row[lpos[&x.abs()]] += x.signum();
                }
                row
            })
            .collect();
        let m = if rows.is_empty() {
            SparseMatrix { rows: 0, cols: live.len(), columns: vec![Vec::new(); live.len()] }
        } else {
            SparseMatrix::from_dense(&rows)
        };
        let c = smith_normal_form(&m, false)?;
        let mut inv: Vec<BigInt> = c.invariant_factors().into_iter().filter(|x| !x.is_one()).collect();
        inv.extend(std::iter::repeat_n(BigInt::zero(), live.len() - c.rank()));
        inv
    };
    let status = if status_trivial {
        PresentationStatus::TrivialCertified
    } else if !abelianization.is_empty() {
        PresentationStatus::NontrivialAbelianization
    } else {
        PresentationStatus::Inconclusive
    };
    Ok(PresentationReport {
        status,
        edges: ne,
        tree_edges: tree,
        triangles: nt,
        generators_left: live.len(),
        relators_left: if relators.len() <= 64 { relators } else { Vec::new() },
        abelianization,
        tietze_passes: passes,
    })
}

/// Homology report with certificate digests, as emitted by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyReport {
    pub summary: String,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<String>>,
    pub f_vector: Vec<usize>,
    pub certificate_digests: Vec<String>,
}

impl From<&HomologyResult> for HomologyReport {
    fn from(h: &HomologyResult) -> Self {
        HomologyReport {
            summary: h.summary(),
            betti: h.betti.clone(),
            torsion: h.torsion.iter().map(|t| t.iter().map(BigInt::to_string).collect()).collect(),
            f_vector: h.f_vector.clone(),
            certificate_digests: h.certificates.iter().map(|c| c.digest.clone()).collect(),
        }
    }
}

/// Squared boundary check: `d_{k-1} d_k = 0`.
pub fn boundary_squares_to_zero(k: &SimplicialComplex, dim: usize) -> bool {
    if dim < 2 || dim as isize > k.dim() {
        return true;
    }
    let hi = boundary_matrix(k, dim);
    let lo = boundary_matrix(k, dim - 1);
    hi.columns.iter().all(|col| {
        let mut acc: HashMap<u32, i64> = HashMap::new();
        for &(r, v) in col {
            for &(rr, w) in &lo.columns[r as usize] {
                *acc.entry(rr).or_default() += v * w;
            }
        }
        acc.values().all(|&x| x == 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rp2() -> SimplicialComplex {
        // 6-vertex real projective plane
        SimplicialComplex::from_facets(
            6,
            [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5], [1, 2, 4], [2, 3, 5], [1, 3, 4], [1, 3, 5], [2, 4, 5]],
        )
    }

    fn torus() -> SimplicialComplex {
        // 7-vertex torus
        let f: Vec<Vec<u32>> = (0..7u32).flat_map(|i| vec![vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]).collect();
        SimplicialComplex::from_facets(7, f)
    }

    #[test]
    fn sphere_homology() {
        let h = homology(&SimplicialComplex::simplex_boundary(4)).unwrap();
        assert!(h.is_sphere_homology(3));
        assert_eq!(h.summary(), "(Z, 0, 0, Z)");
    }

    #[test]
    fn projective_plane_torsion() {
        let k = rp2();
        assert_eq!(k.euler_characteristic(), 1);
        let h = homology(&k).unwrap();
        assert_eq!(h.betti, vec![1, 0, 0]);
        assert_eq!(h.torsion[1], vec![BigInt::from(2)]);
    }

    #[test]
    fn torus_homology_and_pi1() {
        let k = torus();
        assert_eq!(k.euler_characteristic(), 0);
        assert_eq!(homology(&k).unwrap().betti, vec![1, 2, 1]);
        let p = edge_path_presentation(&k).unwrap();
        assert_eq!(p.status, PresentationStatus::NontrivialAbelianization);
        assert_eq!(p.abelianization, vec![BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn simply_connected_sphere() {
        let p = edge_path_presentation(&SimplicialComplex::simplex_boundary(3)).unwrap();
        assert_eq!(p.status, PresentationStatus::TrivialCertified);
        let q = edge_path_presentation(&rp2()).unwrap();
        assert_eq!(q.status, PresentationStatus::NontrivialAbelianization);
        assert_eq!(q.abelianization, vec![BigInt::from(2)]);
    }

    #[test]
    fn errors() {
        assert_eq!(homology(&SimplicialComplex::empty()).unwrap_err(), HomologyError::EmptyComplex);
        let two = SimplicialComplex::from_facets(2, Vec::<Vec<u32>>::new());
        assert_eq!(edge_path_presentation(&two).unwrap_err(), HomologyError::Disconnected);
    }

    #[test]
    fn dense_remainder_certificate() {
        // [[2, 4], [6, 8]] has invariant factors 2, 4
        let m = SparseMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let c = smith_normal_form(&m, true).unwrap();
        assert_eq!(c.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        c.replay(&m).unwrap();
        check_uav(&m, &c);
    }

    fn check_uav(m: &SparseMatrix, c: &SnfCertificate) {
        let (u, v) = c.materialize().unwrap();
        let a = m.to_dense();
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            (0..x.len()).map(|i| (0..y[0].len()).map(|j| (0..y.len()).map(|k| &x[i][k] * &y[k][j]).sum()).collect()).collect()
        };
        let d = mul(&mul(&u, &a), &v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let claimed = c.pivots.iter().find(|p| p.0 as usize == i && p.1 as usize == j).map(|p| p.2.clone()).unwrap_or_default();
                assert_eq!(*x, claimed);
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let k = SimplicialComplex::simplex_boundary(3);
        let m = boundary_matrix(&k, 2);
        let mut c = smith_normal_form(&m, true).unwrap();
        c.replay(&m).unwrap();
        c.pivots[0].2 = BigInt::from(3);
        assert!(c.replay(&m).is_err());
    }

    fn uncleared(k: &SimplicialComplex) -> Vec<(usize, Vec<BigInt>)> {
        (1..=k.dim() as usize).map(|d| smith_normal_form(&boundary_matrix(k, d), false).unwrap()).map(|c| (c.rank(), c.invariant_factors().into_iter().filter(|x| !x.is_one()).collect())).collect()
    }

    #[test]
    fn clearing_certificates_verify() {
        let k = rp2().barycentric_subdivision().0;
        let h = homology_with(&k, true).unwrap();
        assert!(!h.certificates[0].cleared.is_empty());
        verify_homology(&k, &h).unwrap();
        let mut bad = h.clone();
        bad.certificates[0].cleared.pop();
        assert!(verify_homology(&k, &bad).is_err());
        let mut bad = h.clone();
        let c = &mut bad.certificates[0];
        c.cleared = c.cleared[1..].to_vec();
        assert!(c.replay(&boundary_matrix(&k, 1)).is_err());
    }

    proptest! {
        #[test]
        fn clearing_preserves_ranks_and_torsion(facets in prop::collection::vec(prop::collection::btree_set(0u32..8, 1..5), 1..10)) {
            let k = SimplicialComplex::from_facets(8, facets.iter().map(|s| s.iter().copied().collect::<Vec<_>>()));
            let h = homology_with(&k, true).unwrap();
            let got: Vec<(usize, Vec<BigInt>)> = h.certificates.iter().map(|c| (c.rank(), c.invariant_factors().into_iter().filter(|x| !x.is_one()).collect())).collect();
            prop_assert_eq!(got, uncleared(&k));
            prop_assert!(verify_homology(&k, &h).is_ok());
        }

        #[test]
        fn snf_matches_dense(entries in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..5)) {
            let m = SparseMatrix::from_dense(&entries);
            let c = smith_normal_form(&m, true).unwrap();
            c.replay(&m).unwrap();
            check_uav(&m, &c);
            let f = c.invariant_factors();
            for w in f.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }

        #[test]
        fn boundary_of_boundary(facets in prop::collection::vec(prop::collection::btree_set(0u32..8, 1..5), 1..8)) {
            let k = SimplicialComplex::from_facets(8, facets.iter().map(|s| s.iter().copied().collect::<Vec<_>>()));
            for d in 2..=k.dim().max(1) as usize {
                prop_assert!(boundary_squares_to_zero(&k, d));
            }
        }

        #[test]
        fn subdivision_invariance(facets in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..4), 1..6)) {
            let k = SimplicialComplex::from_facets(7, facets.iter().map(|s| s.iter().copied().collect::<Vec<_>>()));
            let h = homology(&k).unwrap();
            let h1 = homology(&k.barycentric_subdivision().0).unwrap();
            prop_assert_eq!(h.betti, h1.betti);
            prop_assert_eq!(h.torsion, h1.torsion);
        }
    }
}
