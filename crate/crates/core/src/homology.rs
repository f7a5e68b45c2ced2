//! Exact homology over Q: sparse boundary matrices, graded chain complexes,
//! Betti tables and long-exact-sequence rank bookkeeping.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("d^2 != 0 at degree {degree}: {nonzero} nonzero entries in boundary({lower}) * boundary({degree})", lower = degree - 1)]
    DSquaredNonzero { degree: i64, nonzero: usize },
    #[error("degree {0} is flagged as a window edge")]
    EdgeDegree(i64),
    #[error("basis label `{0}` occurs twice")]
    DuplicateLabel(String),
}

/// Column-major sparse rational matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, Q)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    /// Build from column vectors; duplicate row entries are summed.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, Q)>>) -> Self {
        let cols = columns
            .into_iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (r, v) in col {
                    assert!(r < rows, "row {r} out of range {rows}");
                    *acc.entry(r).or_insert_with(Q::zero) += v;
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols.len()
    }
    pub fn column(&self, j: usize) -> &[(usize, Q)] {
        &self.cols[j]
    }
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }
    pub fn get(&self, r: usize, c: usize) -> Q {
        self.cols[c].iter().find(|(i, _)| *i == r).map(|(_, v)| v.clone()).unwrap_or_else(Q::zero)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                cols[*i].push((j, v.clone()));
            }
        }
        SparseMatrix { rows: self.cols.len(), cols }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch in product");
        let columns = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, v) in col {
                    for (i, w) in &self.cols[*k] {
                        *acc.entry(*i).or_insert_with(Q::zero) += v * w;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: columns }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let columns = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut col: Vec<(usize, Q)> = a.clone();
                col.extend(b.iter().map(|(i, v)| (*i, -v)));
                col
            })
            .collect();
        SparseMatrix::from_columns(self.rows, columns)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Exact rank.  The matrix is split into connected blocks (rows and
    /// columns linked by nonzero entries) whose ranks are computed
    /// independently by fraction-free integer elimination.
    pub fn rank(&self) -> usize {
        let blocks = self.blocks();
        blocks.into_par_iter().map(|cols| block_rank(self, &cols)).sum()
    }

    /// Column index sets of the connected components of the bipartite
    /// row/column incidence graph (empty columns are skipped).
    fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.cols.len();
        let mut uf = UnionFind::new(n + self.rows);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, _) in col {
                uf.union(j, n + i);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (j, col) in self.cols.iter().enumerate() {
            if !col.is_empty() {
                groups.entry(uf.find(j)).or_default().push(j);
            }
        }
        groups.into_values().collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Rank of the submatrix on the given columns.  Each column is scaled to a
/// primitive integer vector; elimination combines `a*v - b*p` and divides the
/// result by its content, so no fractions ever appear.
fn block_rank(m: &SparseMatrix, cols: &[usize]) -> usize {
    // Sparse integer vectors keyed by row, sorted by row index.
    let mut vecs: Vec<Vec<(usize, BigInt)>> = cols
        .iter()
        .map(|&j| {
            let col = &m.cols[j];
            let lcm = col.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            let ints: Vec<(usize, BigInt)> =
                col.iter().map(|(i, v)| (*i, (v * Q::from_integer(lcm.clone())).to_integer())).collect();
            primitive(ints)
        })
        .collect();
    // Process short columns first: keeps fill-in low on the very sparse
    // matrices produced by word complexes.
    vecs.sort_by_key(Vec::len);
    let mut pivots: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
    let mut rank = 0;
    for mut v in vecs {
        while let Some((lead_row, _)) = v.first().cloned() {
            match pivots.get(&lead_row) {
                Some(p) => v = eliminate(&v, p),
                None => {
                    pivots.insert(lead_row, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// `a*v - b*p` where `a`, `b` are the leading entries of `p` and `v`.
fn eliminate(v: &[(usize, BigInt)], p: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
    let a = &p[0].1;
    let b = &v[0].1;
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let take_v = j >= p.len() || (i < v.len() && v[i].0 < p[j].0);
        let take_p = i >= v.len() || (j < p.len() && p[j].0 < v[i].0);
        if take_v {
            out.push((v[i].0, &a * &v[i].1));
            i += 1;
        } else if take_p {
            out.push((p[j].0, -(&b * &p[j].1)));
            j += 1;
        } else {
            let val = &a * &v[i].1 - &b * &p[j].1;
            if !val.is_zero() {
                out.push((v[i].0, val));
            }
            i += 1;
            j += 1;
        }
    }
    primitive(out)
}

fn primitive(mut v: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    v.retain(|(_, x)| !x.is_zero());
    v.sort_by_key(|(i, _)| *i);
    let g = v.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for (_, x) in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some((_, lead)) = v.first() {
        if lead.is_negative() {
            for (_, x) in v.iter_mut() {
                *x = -&*x;
            }
        }
    }
    v
}

/// Whether every degree of the window is provably complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guard {
    Exact,
    Truncated,
}

/// A finite window of a graded chain complex over Q.  `boundary[d]` maps
/// degree `d` to degree `d - 1` (rows indexed by `basis[d-1]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedChainComplex {
    pub window: (i64, i64),
    pub basis: BTreeMap<i64, Vec<String>>,
    pub boundary: BTreeMap<i64, SparseMatrix>,
    pub guard: Guard,
    pub max_len: usize,
}

impl GradedChainComplex {
    pub fn basis_at(&self, d: i64) -> &[String] {
        self.basis.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dim(&self, d: i64) -> usize {
        self.basis_at(d).len()
    }

    /// Boundary matrix from degree `d` (empty matrix outside the window).
    pub fn boundary_at(&self, d: i64) -> SparseMatrix {
        self.boundary.get(&d).cloned().unwrap_or_else(|| SparseMatrix::zero(self.dim(d - 1), self.dim(d)))
    }

    /// Degrees `d` where `boundary(d-1) * boundary(d)` is nonzero.
    pub fn d_squared_failures(&self) -> Vec<HomologyError> {
        let (lo, hi) = self.window;
        ((lo + 2)..=hi)
            .filter_map(|d| {
                let prod = self.boundary_at(d - 1).mul(&self.boundary_at(d));
                (!prod.is_zero()).then(|| HomologyError::DSquaredNonzero { degree: d, nonzero: prod.nnz() })
            })
            .collect()
    }

    pub fn check_d_squared(&self) -> Result<(), HomologyError> {
        match self.d_squared_failures().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Index of a label in its degree.
    pub fn position(&self, label: &str) -> Option<(i64, usize)> {
        self.basis.iter().find_map(|(d, b)| b.iter().position(|l| l == label).map(|i| (*d, i)))
    }

    /// Total number of basis elements.
    pub fn size(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }
}

/// Homology ranks with window-edge flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub ranks: BTreeMap<i64, usize>,
    pub dims: BTreeMap<i64, usize>,
    pub edge: Vec<i64>,
    pub guard: Guard,
}

impl BettiTable {
    pub fn rank(&self, d: i64) -> usize {
        self.ranks.get(&d).copied().unwrap_or(0)
    }
    pub fn is_edge(&self, d: i64) -> bool {
        self.edge.contains(&d)
    }
    /// Degrees that are not flagged as window edges.
    pub fn interior(&self) -> Vec<i64> {
        self.ranks.keys().copied().filter(|d| !self.is_edge(*d)).collect()
    }
    /// Ranks restricted to interior degrees.
    pub fn interior_ranks(&self) -> BTreeMap<i64, usize> {
        self.interior().into_iter().map(|d| (d, self.rank(d))).collect()
    }
}

/// Exact Betti numbers of the window; errors when `d^2 != 0`.
pub fn betti(c: &GradedChainComplex) -> Result<BettiTable, HomologyError> {
    c.check_d_squared()?;
    let (lo, hi) = c.window;
    let ranks_of_d: BTreeMap<i64, usize> =
        (lo..=hi + 1).collect::<Vec<_>>().into_par_iter().map(|d| (d, c.boundary_at(d).rank())).collect();
    let mut ranks = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for d in lo..=hi {
        let dim = c.dim(d);
        let rk_out = if d == lo { 0 } else { ranks_of_d[&d] };
        let rk_in = if d == hi { 0 } else { ranks_of_d[&(d + 1)] };
        debug_assert!(rk_out <= dim, "rank-nullity violated at degree {d}");
        let kernel = dim - rk_out;
        ranks.insert(d, kernel - rk_in);
        dims.insert(d, dim);
    }
    Ok(BettiTable { ranks, dims, edge: vec![lo, hi], guard: c.guard })
}

/// Necessary rank conditions for a long exact sequence
/// `... -> t2 -> t1 -> t3 -> ...` (or any rotation of the triangle): Euler
/// characteristic additivity over the interior window and the per-degree
/// bound `rank t1_d <= rank t2_d + rank t3_d`.
pub fn verify_les_ranks(t1: &BettiTable, t2: &BettiTable, t3: &BettiTable, window: (i64, i64)) -> Result<bool, HomologyError> {
    for d in window.0..=window.1 {
        for t in [t1, t2, t3] {
            if t.is_edge(d) {
                return Err(HomologyError::EdgeDegree(d));
            }
        }
    }
    let chi = |t: &BettiTable| -> i64 {
        (window.0..=window.1).map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 } * t.rank(d) as i64).sum()
    };
    let additive = chi(t1) == chi(t2) + chi(t3);
    let bounded = (window.0..=window.1).all(|d| t1.rank(d) <= t2.rank(d) + t3.rank(d));
    Ok(additive && bounded)
}

/// Incremental assembly of a complex from labelled cells and differential
/// entries.  Cells outside the window and entries pointing to unknown cells
/// below the window are dropped; an entry to an unknown cell inside the
/// window is a construction bug and panics.
#[derive(Default)]
pub struct ComplexBuilder {
    cells: Vec<(i64, String)>,
    index: HashMap<String, usize>,
    entries: Vec<Vec<(usize, Q)>>,
    pending: Vec<(usize, String, Q)>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        ComplexBuilder::default()
    }

    /// Register a basis element; returns its cell index.
    pub fn cell(&mut self, degree: i64, label: String) -> Result<usize, HomologyError> {
        if self.index.contains_key(&label) {
            return Err(HomologyError::DuplicateLabel(label));
        }
        let id = self.cells.len();
        self.index.insert(label.clone(), id);
        self.cells.push((degree, label));
        self.entries.push(Vec::new());
        Ok(id)
    }

    /// Number of registered cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Record `d(source) += coef * target`; `target` may be registered later.
    pub fn entry(&mut self, source: usize, target: String, coef: Q) {
        if !coef.is_zero() {
            self.pending.push((source, target, coef));
        }
    }

    pub fn entry_idx(&mut self, source: usize, target: usize, coef: Q) {
        if !coef.is_zero() {
            self.entries[source].push((target, coef));
        }
    }

    pub fn finish(mut self, window: (i64, i64), guard: Guard, max_len: usize) -> GradedChainComplex {
        for (s, t, c) in std::mem::take(&mut self.pending) {
            match self.index.get(&t) {
                Some(&ti) => self.entries[s].push((ti, c)),
                // A missing target is only legitimate below the window.
                None => assert!(
                    self.cells[s].0 - 1 < window.0 || self.cells[s].0 > window.1,
                    "differential of `{}` reaches unregistered cell `{t}` inside the window",
                    self.cells[s].1
                ),
            }
        }
        let (lo, hi) = window;
        let mut basis: BTreeMap<i64, Vec<String>> = (lo..=hi).map(|d| (d, Vec::new())).collect();
        let mut pos = vec![usize::MAX; self.cells.len()];
        for (i, (d, l)) in self.cells.iter().enumerate() {
            if let Some(b) = basis.get_mut(d) {
                pos[i] = b.len();
                b.push(l.clone());
            }
        }
        let mut columns: BTreeMap<i64, Vec<Vec<(usize, Q)>>> =
            (lo..=hi).map(|d| (d, vec![Vec::new(); basis[&d].len()])).collect();
        for (i, ents) in self.entries.iter().enumerate() {
            let (d, _) = &self.cells[i];
            if pos[i] == usize::MAX {
                continue;
            }
            for (t, c) in ents {
                let (td, _) = &self.cells[*t];
                assert_eq!(*td, d - 1, "differential entry of wrong degree: {} -> {}", self.cells[i].1, self.cells[*t].1);
                if pos[*t] != usize::MAX {
                    columns.get_mut(d).unwrap()[pos[i]].push((pos[*t], c.clone()));
                }
            }
        }
        let boundary = columns
            .into_iter()
            .map(|(d, cols)| (d, SparseMatrix::from_columns(basis.get(&(d - 1)).map_or(0, Vec::len), cols)))
            .collect();
        GradedChainComplex { window, basis, boundary, guard, max_len }
    }
}

/// Per-degree structural data of a degree-0 map between two complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    /// `blocks[d]`: rows = target basis at d, cols = source basis at d.
    pub blocks: BTreeMap<i64, SparseMatrix>,
}

/// Result of checking `F d - d F = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMapReport {
    /// Degrees with a nonzero defect and the number of nonzero entries.
    pub defects: Vec<(i64, usize)>,
}

impl ChainMapReport {
    pub fn is_chain_map(&self) -> bool {
        self.defects.is_empty()
    }
}

impl ChainMap {
    /// Build from labelled entries `(source label, target label, coef)`.
    pub fn from_entries(source: &GradedChainComplex, target: &GradedChainComplex, entries: &[(String, String, Q)]) -> Self {
        let spos = label_positions(source);
        let tpos = label_positions(target);
        let (lo, hi) = source.window;
        let mut cols: BTreeMap<i64, Vec<Vec<(usize, Q)>>> =
            (lo..=hi).map(|d| (d, vec![Vec::new(); source.dim(d)])).collect();
        for (s, t, c) in entries {
            if let (Some(&(sd, si)), Some(&(td, ti))) = (spos.get(s.as_str()), tpos.get(t.as_str())) {
                assert_eq!(sd, td, "chain map entry changes degree: {s} -> {t}");
                cols.get_mut(&sd).unwrap()[si].push((ti, c.clone()));
            }
        }
        let blocks = cols.into_iter().map(|(d, c)| (d, SparseMatrix::from_columns(target.dim(d), c))).collect();
        ChainMap { blocks }
    }

    /// Verify `F_{d-1} d^S_d = d^T_d F_d` for every degree strictly inside
    /// both windows.
    pub fn verify(&self, source: &GradedChainComplex, target: &GradedChainComplex) -> ChainMapReport {
        let lo = source.window.0.max(target.window.0) + 1;
        let hi = source.window.1.min(target.window.1);
        let mut defects = Vec::new();
        for d in lo..=hi {
            let f_low = self.block(d - 1, source, target);
            let f_d = self.block(d, source, target);
            let lhs = f_low.mul(&source.boundary_at(d));
            let rhs = target.boundary_at(d).mul(&f_d);
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                defects.push((d, diff.nnz()));
            }
        }
        ChainMapReport { defects }
    }

    fn block(&self, d: i64, source: &GradedChainComplex, target: &GradedChainComplex) -> SparseMatrix {
        self.blocks.get(&d).cloned().unwrap_or_else(|| SparseMatrix::zero(target.dim(d), source.dim(d)))
    }
}

fn label_positions(c: &GradedChainComplex) -> HashMap<&str, (i64, usize)> {
    c.basis.iter().flat_map(|(d, b)| b.iter().enumerate().map(move |(i, l)| (l.as_str(), (*d, i)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use proptest::prelude::*;

    /// Dense Gaussian elimination over Q: the independent rank oracle.
    fn dense_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
        let mut m = vec![vec![Q::zero(); cols]; rows];
        for &(r, c, v) in entries {
            m[r][c] += qi(v);
        }
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..rows {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    let pivot = m[rank].clone();
                    for (x, p) in m[r].iter_mut().zip(&pivot) {
                        *x -= &f * p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn sparse(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> SparseMatrix {
        let mut c = vec![Vec::new(); cols];
        for &(r, j, v) in entries {
            c[j].push((r, qi(v)));
        }
        SparseMatrix::from_columns(rows, c)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(sparse(2, 2, &[(0, 0, 1), (1, 1, 1)]).rank(), 2);
        assert_eq!(sparse(2, 2, &[(0, 0, 2), (0, 1, 4), (1, 0, 1), (1, 1, 2)]).rank(), 1);
        assert_eq!(SparseMatrix::zero(3, 4).rank(), 0);
    }

    #[test]
    fn zero_complex_has_no_homology() {
        let c = ComplexBuilder::new().finish((0, 3), Guard::Exact, 0);
        let b = betti(&c).unwrap();
        assert!(b.ranks.values().all(|&r| r == 0));
        assert_eq!(b.edge, vec![0, 3]);
    }

    #[test]
    fn d_squared_is_detected() {
        let mut b = ComplexBuilder::new();
        let x = b.cell(2, "x".into()).unwrap();
        let y = b.cell(1, "y".into()).unwrap();
        let z = b.cell(0, "z".into()).unwrap();
        b.entry_idx(x, y, qi(1));
        b.entry_idx(y, z, qi(1));
        let c = b.finish((0, 2), Guard::Exact, 0);
        assert!(matches!(betti(&c), Err(HomologyError::DSquaredNonzero { degree: 2, .. })));
    }

    #[test]
    fn les_rank_conditions() {
        let table = |v: &[(i64, usize)]| BettiTable {
            ranks: v.iter().cloned().collect(),
            dims: BTreeMap::new(),
            edge: vec![-10, 10],
            guard: Guard::Exact,
        };
        let z = table(&[]);
        assert!(verify_les_ranks(&z, &z, &z, (0, 3)).unwrap());
        let t1 = table(&[(2, 1)]);
        assert!(verify_les_ranks(&t1, &t1, &z, (0, 3)).unwrap());
        assert!(!verify_les_ranks(&t1, &z, &z, (0, 3)).unwrap());
        assert!(verify_les_ranks(&t1, &z, &z, (-10, 3)).is_err());
    }

    #[test]
    fn chain_map_defects_reported() {
        let mut b = ComplexBuilder::new();
        let x = b.cell(1, "x".into()).unwrap();
        let y = b.cell(0, "y".into()).unwrap();
        b.entry_idx(x, y, qi(1));
        let c = b.finish((0, 1), Guard::Exact, 0);
        let id = ChainMap::from_entries(&c, &c, &[("x".into(), "x".into(), qi(1)), ("y".into(), "y".into(), qi(1))]);
        assert!(id.verify(&c, &c).is_chain_map());
        let bad = ChainMap::from_entries(&c, &c, &[("x".into(), "x".into(), qi(1))]);
        assert_eq!(bad.verify(&c, &c).defects, vec![(1, 1)]);
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(
            rows in 1usize..7, cols in 1usize..7,
            raw in proptest::collection::vec((0usize..7, 0usize..7, -3i64..4), 0..20)
        ) {
            let entries: Vec<_> = raw.into_iter().filter(|(r, c, _)| *r < rows && *c < cols).collect();
            let m = sparse(rows, cols, &entries);
            let oracle = dense_rank(rows, cols, &entries);
            prop_assert_eq!(m.rank(), oracle);
            prop_assert_eq!(m.transpose().rank(), oracle);
            // Rank-nullity as a sanity statement.
            prop_assert!(oracle <= cols && oracle <= rows);
        }

        #[test]
        fn rank_invariant_under_permutation(
            raw in proptest::collection::vec((0usize..5, 0usize..5, -2i64..3), 0..15),
            shift in 0usize..5
        ) {
            let m = sparse(5, 5, &raw);
            let permuted: Vec<_> = raw.iter().map(|&(r, c, v)| ((r + shift) % 5, (c + 2 * shift) % 5, v)).collect();
            prop_assert_eq!(m.rank(), sparse(5, 5, &permuted).rank());
        }
    }
}
