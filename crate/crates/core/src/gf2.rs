//! Sparse/dense GF(2) matrices, Tanner graphs and Gaussian elimination.

use std::fmt;
use std::io::{BufRead, Write};

use crate::bits::{words_for, BitVec};
use crate::error::{check_dim, Error, Result};

/// A binary matrix kept in two synchronized views: per-row sorted column
/// lists for graph traversal and packed rows for word-parallel arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    sparse: Vec<Vec<usize>>,
    dense: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            sparse: vec![Vec::new(); rows],
            dense: vec![BitVec::zeros(cols); rows],
        }
    }

    /// Builds a matrix from per-row column indices. Duplicate indices cancel
    /// (GF(2) addition); out-of-range indices are an error.
    pub fn from_sparse_rows(cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut dense = Vec::with_capacity(rows.len());
        for row in &rows {
            let mut v = BitVec::zeros(cols);
            for &c in row {
                if c >= cols {
                    return Err(Error::InvalidParameter(format!(
                        "column index {c} out of range for {cols} columns"
                    )));
                }
                v.toggle(c);
            }
            dense.push(v);
        }
        Ok(Self::from_dense_rows(cols, dense))
    }

    pub fn from_dense_rows(cols: usize, dense: Vec<BitVec>) -> Self {
        for r in &dense {
            assert_eq!(r.len(), cols, "row length does not match column count");
        }
        let sparse = dense.iter().map(|r| r.iter_ones().collect()).collect();
        Self {
            rows: dense.len(),
            cols,
            sparse,
            dense,
        }
    }

    /// Row-major 0/1 entries; every row must have the same length.
    pub fn from_bit_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_dense_rows(cols, rows.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.dense[r].get(c)
    }

    /// Sorted column indices of the nonzero entries of row `r`.
    #[inline]
    pub fn row_support(&self, r: usize) -> &[usize] {
        &self.sparse[r]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVec {
        &self.dense[r]
    }

    pub fn dense_rows(&self) -> &[BitVec] {
        &self.dense
    }

    pub fn nnz(&self) -> usize {
        self.sparse.iter().map(Vec::len).sum()
    }

    /// `H · v` over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        check_dim("vector length", self.cols, v.len())?;
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.dense.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `(A | B | ...)`.
    pub fn hstack(blocks: &[&BitMatrix]) -> Result<BitMatrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        for b in blocks {
            check_dim("row count in hstack", rows, b.rows)?;
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let dense = (0..rows)
            .map(|r| {
                let parts: Vec<&BitVec> = blocks.iter().map(|b| &b.dense[r]).collect();
                BitVec::concat(&parts)
            })
            .collect();
        Ok(Self::from_dense_rows(cols, dense))
    }

    /// Columns `start..start+len` as a new matrix.
    pub fn column_block(&self, start: usize, len: usize) -> BitMatrix {
        let dense = self.dense.iter().map(|r| r.slice(start, len)).collect();
        Self::from_dense_rows(len, dense)
    }

    /// Entry-wise sum with another matrix of the same shape.
    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        check_dim("row count", self.rows, other.rows)?;
        check_dim("column count", self.cols, other.cols)?;
        let dense = self
            .dense
            .iter()
            .zip(&other.dense)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.xor_assign(b);
                r
            })
            .collect();
        Ok(Self::from_dense_rows(self.cols, dense))
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        row_reduce(self, &order).rank()
    }

    /// A basis of `{ v : H v = 0 }`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let order: Vec<usize> = (0..self.cols).collect();
        let elim = row_reduce(self, &order);
        let stride = elim.stride;
        let mut is_pivot = vec![false; self.cols];
        for &p in &elim.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - elim.rank());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (r, &p) in elim.pivots.iter().enumerate() {
                let w = elim.reduced[r * stride + free / 64];
                if (w >> (free % 64)) & 1 == 1 {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reads the plain-text format: a header line `m c`, then one line per
    /// row listing 1-based column indices separated by whitespace.
    pub fn read_alist<R: BufRead>(reader: R) -> Result<BitMatrix> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: e.to_string(),
            })?;
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `rows cols`".into(),
            });
        }
        let (m, c) = (dims[0], dims[1]);
        let mut rows = Vec::with_capacity(m);
        for (idx, line) in lines.take(m) {
            let line = line?;
            let mut row = Vec::new();
            for tok in line.split_whitespace() {
                let j: usize = tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad column index `{tok}`"),
                })?;
                if j == 0 || j > c {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("column index {j} outside 1..={c}"),
                    });
                }
                row.push(j - 1);
            }
            rows.push(row);
        }
        // trailing empty rows may have been dropped by editors
        rows.resize(m, Vec::new());
        BitMatrix::from_sparse_rows(c, rows)
    }

    pub fn write_alist<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.rows, self.cols)?;
        for row in &self.sparse {
            let line: Vec<String> = row.iter().map(|c| (c + 1).to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.dense {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Bipartite check/variable adjacency of a parity-check matrix.
///
/// Edge ids are assigned in check-major order: the edges of check 0 come
/// first, in increasing variable order, then check 1, and so on.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    check_neighbors: Vec<Vec<usize>>,
    var_neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TannerGraph {
    pub fn num_checks(&self) -> usize {
        self.check_neighbors.len()
    }

    pub fn num_vars(&self) -> usize {
        self.var_neighbors.len()
    }

    /// Variables adjacent to check `j`.
    pub fn check_neighbors(&self, j: usize) -> &[usize] {
        &self.check_neighbors[j]
    }

    /// Checks adjacent to variable `i`.
    pub fn var_neighbors(&self, i: usize) -> &[usize] {
        &self.var_neighbors[i]
    }

    /// `(check, variable)` pairs indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

pub fn build_tanner(h: &BitMatrix) -> TannerGraph {
    let mut var_neighbors = vec![Vec::new(); h.cols()];
    let mut edges = Vec::with_capacity(h.nnz());
    let check_neighbors: Vec<Vec<usize>> = (0..h.rows()).map(|j| h.row_support(j).to_vec()).collect();
    for (j, vars) in check_neighbors.iter().enumerate() {
        for &i in vars {
            var_neighbors[i].push(j);
            edges.push((j, i));
        }
    }
    TannerGraph {
        check_neighbors,
        var_neighbors,
        edges,
    }
}

/// Result of a column-ordered Gauss-Jordan elimination.
///
/// Holds the pivot columns in discovery order, the fully reduced rows and
/// the row-operation transform needed to solve `H_pivots x = s` for any `s`.
#[derive(Clone, Debug)]
pub struct Elimination {
    rows: usize,
    cols: usize,
    pivots: Vec<usize>,
    /// Row-major; each row is the reduced matrix row followed by its
    /// transform row, `stride` words in total.
    reduced: Vec<u64>,
    stride: usize,
    col_words: usize,
}

impl Elimination {
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn transform_row(&self, r: usize) -> &[u64] {
        let start = r * self.stride + self.col_words;
        &self.reduced[start..start + words_for(self.rows)]
    }
}

/// Scans columns in `column_order` and keeps each column that is linearly
/// independent of the ones kept before it. Stops once the rank reaches the
/// number of rows.
pub fn row_reduce(h: &BitMatrix, column_order: &[usize]) -> Elimination {
    let m = h.rows();
    let col_words = words_for(h.cols());
    let tr_words = words_for(m);
    let stride = col_words + tr_words;
    let mut data = vec![0u64; m * stride];
    for r in 0..m {
        let base = r * stride;
        data[base..base + col_words].copy_from_slice(h.row(r).words());
        data[base + col_words + r / 64] |= 1u64 << (r % 64);
    }

    let mut pivots = Vec::with_capacity(m);
    let mut rank = 0;
    for &c in column_order {
        if rank == m {
            break;
        }
        let (cw, cb) = (c / 64, c % 64);
        let Some(found) = (rank..m).find(|&r| (data[r * stride + cw] >> cb) & 1 == 1) else {
            continue;
        };
        if found != rank {
            for w in 0..stride {
                data.swap(found * stride + w, rank * stride + w);
            }
        }
        let (head, tail) = data.split_at_mut(rank * stride);
        let (pivot_row, rest) = tail.split_at_mut(stride);
        for r in 0..m {
            if r == rank {
                continue;
            }
            let row = if r < rank {
                &mut head[r * stride..(r + 1) * stride]
            } else {
                let off = (r - rank - 1) * stride;
                &mut rest[off..off + stride]
            };
            if (row[cw] >> cb) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(pivot_row.iter()) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }

    Elimination {
        rows: m,
        cols: h.cols(),
        pivots,
        reduced: data,
        stride,
        col_words,
    }
}

/// Solves `H_pivots · x = s` using a record from [`row_reduce`].
///
/// The returned vector has the full column width of `H`, with the solution
/// on the pivot columns and zeros everywhere else, so `H · x = s`.
pub fn solve_on_pivots(record: &Elimination, s: &BitVec) -> Result<BitVec> {
    check_dim("syndrome length", record.rows, s.len())?;
    let mut x = BitVec::zeros(record.cols);
    let sw = s.words();
    let parity = |r: usize| -> bool {
        let t = record.transform_row(r);
        t.iter().zip(sw).fold(0u64, |acc, (a, b)| acc ^ (a & b)).count_ones() & 1 == 1
    };
    for (r, &p) in record.pivots.iter().enumerate() {
        if parity(r) {
            x.set(p, true);
        }
    }
    if (record.rank()..record.rows).any(parity) {
        return Err(Error::Inconsistent);
    }
    Ok(x)
}

/// Incrementally maintained echelon basis used to test span membership.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    vectors: Vec<(usize, BitVec)>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (p, b) in &self.vectors {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        v
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        let pivot = r.iter_ones().next();
        match pivot {
            Some(p) => {
                self.vectors.push((p, r));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_h2() -> BitMatrix {
        BitMatrix::from_bit_rows(&[vec![1, 0, 1, 0, 0, 0], vec![0, 1, 0, 1, 1, 1]])
    }

    #[test]
    fn tanner_of_fig1_matrix() {
        let g = build_tanner(&fig1_h2());
        assert_eq!(g.check_neighbors(0), &[0, 2]);
        assert_eq!(g.check_neighbors(1), &[1, 3, 4, 5]);
        assert_eq!(g.var_neighbors(3), &[1]);
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn tanner_of_zero_matrix_is_edgeless() {
        let g = build_tanner(&BitMatrix::zeros(3, 4));
        assert!(g.edges().is_empty());
        assert!((0..4).all(|i| g.var_neighbors(i).is_empty()));
    }

    #[test]
    fn identity_pivots_are_first_columns() {
        let h = BitMatrix::from_bit_rows(&[vec![1, 0], vec![0, 1]]);
        let e = row_reduce(&h, &[0, 1]);
        assert_eq!(e.pivots(), &[0, 1]);
        let x = solve_on_pivots(&e, &BitVec::from_bits(&[1, 0])).unwrap();
        assert_eq!(x, BitVec::from_bits(&[1, 0]));
        let zero = solve_on_pivots(&e, &BitVec::zeros(2)).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn duplicated_column_is_skipped() {
        let h = BitMatrix::from_bit_rows(&[vec![1, 1, 0], vec![0, 0, 1]]);
        let e = row_reduce(&h, &[0, 1, 2]);
        assert_eq!(e.pivots(), &[0, 2]);
    }

    #[test]
    fn inconsistent_system_is_reported() {
        let h = BitMatrix::from_bit_rows(&[vec![1, 1], vec![1, 1]]);
        let e = row_reduce(&h, &[0, 1]);
        assert_eq!(e.rank(), 1);
        assert!(matches!(
            solve_on_pivots(&e, &BitVec::from_bits(&[1, 0])),
            Err(Error::Inconsistent)
        ));
        assert!(solve_on_pivots(&e, &BitVec::from_bits(&[1, 1])).is_ok());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let h = fig1_h2();
        let k = h.kernel_basis();
        assert_eq!(k.len(), 6 - 2);
        for v in &k {
            assert!(h.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn alist_round_trip() {
        let h = fig1_h2();
        let mut buf = Vec::new();
        h.write_alist(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "2 6\n1 3\n2 4 5 6\n");
        let back = BitMatrix::read_alist(buf.as_slice()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn alist_rejects_out_of_range() {
        let err = BitMatrix::read_alist("1 2\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn span_basis_membership() {
        let mut b = SpanBasis::new();
        assert!(b.insert(&BitVec::from_bits(&[1, 1, 0])));
        assert!(b.insert(&BitVec::from_bits(&[0, 1, 1])));
        assert!(!b.insert(&BitVec::from_bits(&[1, 0, 1])));
        assert!(!b.contains(&BitVec::from_bits(&[1, 0, 0])));
    }
}
