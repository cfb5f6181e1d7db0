//! Sparse numeric kernel: program-matrix encoders, thresholdings, and the
//! matrix products the solver engines iterate.
//!
//! Matrices are stored row-major compressed (CSR) because every hot
//! operation here walks rows: matrix-vector products accumulate per row
//! and matrix products expand rows. Weights are `f64`; thresholding
//! tolerates the accumulation error of `1/len` body weights.

mod encode;
mod ops;

pub use encode::{
    encode_constraints, encode_d_program, encode_d_rules, encode_sd, encode_submatrix,
    initial_vector, initial_vector_d,
};
pub use ops::{
    add_matrices, check_constraints_vec, gamma_k, matmul, matvec, theta, theta_d, Consistency,
};

use std::fmt;
use std::io;

use crate::program::Interpretation;
use crate::transform::DProgram;

/// Threshold slack: a row of `len` weights `1/len` may sum to slightly
/// under 1 in floating point, so "reaches 1" is tested as `>= 1 - EPS`.
pub const THETA_EPS: f64 = 1e-9;

/// Entries below this magnitude are dropped by matrix products; mass this
/// small can never push a row sum across the thresholding slack.
pub const PRUNE_EPS: f64 = 1e-12;

/// Dense real vector produced by matrix-vector products.
pub type StateVector = Vec<f64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// Operand dimensions do not line up: (left rows/cols, right len or shape).
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// `encode_sd` was handed a program with a multiply-defined head.
    NotSd,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { op, left, right } => write!(
                f,
                "{op}: dimension mismatch {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            LinalgError::NotSd => write!(f, "program matrix encoding requires an SD program"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// Row-major compressed sparse matrix. Within each row, entries are sorted
/// by column, columns are unique and weights are strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_start: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_start: vec![0; rows + 1],
            col_idx: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            rows: dim,
            cols: dim,
            row_start: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            weights: vec![1.0; dim],
        }
    }

    /// Builds from (row, col, weight) triples; duplicate positions are
    /// summed and non-positive results dropped.
    pub fn from_triples(rows: usize, cols: usize, mut triples: Vec<(usize, usize, f64)>) -> Self {
        triples.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triples.len());
        let mut weights: Vec<f64> = Vec::with_capacity(triples.len());
        let mut cursor: Option<(usize, usize)> = None;
        for (r, c, w) in triples {
            assert!(r < rows && c < cols, "triple out of bounds");
            if cursor == Some((r, c)) {
                *weights.last_mut().unwrap() += w;
            } else {
                row_start[r + 1] += 1;
                col_idx.push(c);
                weights.push(w);
                cursor = Some((r, c));
            }
        }
        debug_assert!(weights.iter().all(|&w| w > 0.0), "weights must be positive");
        for i in 0..rows {
            row_start[i + 1] += row_start[i];
        }
        SparseMatrix {
            rows,
            cols,
            row_start,
            col_idx,
            weights,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// `(column, weight)` pairs of one row, sorted by column.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_start[r]..self.row_start[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .zip(&self.weights[span])
            .map(|(&c, &w)| (c, w))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r)
            .find(|&(col, _)| col == c)
            .map_or(0.0, |(_, w)| w)
    }

    /// All `(row, col, weight)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, w)| (r, c, w)))
    }

    /// Keeps only the first `n` columns.
    pub fn truncate_cols(&self, n: usize) -> SparseMatrix {
        assert!(n <= self.cols);
        let triples: Vec<_> = self.iter().filter(|&(_, c, _)| c < n).collect();
        SparseMatrix::from_triples(self.rows, n, triples)
    }

    /// Adds a unit diagonal entry at each listed row. Used to carry values
    /// of atoms defined outside the matrix (disjunctive-rule heads) through
    /// matrix powers; the listed rows must currently be empty.
    pub fn with_unit_diagonal(&self, rows: impl IntoIterator<Item = usize>) -> SparseMatrix {
        let mut triples: Vec<_> = self.iter().collect();
        for r in rows {
            debug_assert_eq!(self.row_start[r], self.row_start[r + 1], "row not empty");
            triples.push((r, r, 1.0));
        }
        SparseMatrix::from_triples(self.rows, self.cols, triples)
    }

    /// True when no row has entries in both matrices.
    pub fn rows_disjoint(&self, other: &SparseMatrix) -> bool {
        self.rows == other.rows
            && (0..self.rows).all(|r| {
                self.row_start[r] == self.row_start[r + 1]
                    || other.row_start[r] == other.row_start[r + 1]
            })
    }

    /// Debug dump: a `rows cols nnz` header, then one `row col weight`
    /// triple per line with 17 significant digits.
    pub fn write_triples(&self, out: &mut impl io::Write) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, w) in self.iter() {
            writeln!(out, "{r} {c} {w:.16e}")?;
        }
        Ok(())
    }
}

/// Dense 0/1 vector: an interpretation laid out for the numeric kernel.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            bits: vec![false; len],
        }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        BitVector { bits }
    }

    pub fn from_interpretation(i: &Interpretation, len: usize) -> Self {
        assert!(i.universe() <= len);
        let mut bits = vec![false; len];
        bits[..i.universe()].copy_from_slice(i.as_bools());
        BitVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn or_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len(), other.len());
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a = *a || b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    /// The first `n` entries as a shorter vector.
    pub fn prefix(&self, n: usize) -> BitVector {
        BitVector {
            bits: self.bits[..n].to_vec(),
        }
    }

    /// Elementwise `self >= other`, the partial order of the fixpoint
    /// iteration traces.
    pub fn dominates(&self, other: &BitVector) -> bool {
        self.len() == other.len() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| a || !b)
    }

    /// The members with index below `n`, as an interpretation over `n` atoms.
    pub fn to_interpretation(&self, n: usize) -> Interpretation {
        Interpretation::from_atoms(
            n,
            self.ones()
                .take_while(|&i| i < n)
                .map(crate::program::AtomId::new),
        )
    }

    /// Embeds the 0/1 pattern as a real vector.
    pub fn to_state(&self) -> StateVector {
        self.bits
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Map from each transformation-introduced atom to the head of the one
/// disjunctive rule mentioning it.
#[derive(Clone, Debug)]
pub struct DRuleIndex {
    base: usize,
    heads: Vec<usize>,
}

impl DRuleIndex {
    /// `heads[j]` is the d-rule head for new atom `base + j`; heads must be
    /// original atoms (below `base`).
    pub fn new(base: usize, heads: Vec<usize>) -> Self {
        assert!(heads.iter().all(|&h| h < base));
        DRuleIndex { base, heads }
    }

    pub fn empty(base: usize) -> Self {
        DRuleIndex {
            base,
            heads: Vec::new(),
        }
    }

    pub fn from_d_program(dp: &DProgram) -> Self {
        let base = dp.original_base();
        let mut heads = vec![usize::MAX; dp.extended_base() - base];
        for d in dp.d() {
            for &b in d.body() {
                heads[b.index() - base] = d.head().index();
            }
        }
        assert!(
            heads.iter().all(|&h| h < base),
            "every new atom must appear in exactly one d-rule body"
        );
        DRuleIndex { base, heads }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Sets the d-rule head of every true new atom. This is clause (ii) of
    /// the reduced-matrix thresholding.
    pub fn propagate(&self, v: &mut BitVector) {
        for (j, &head) in self.heads.iter().enumerate() {
            if v.get(self.base + j) {
                v.set(head, true);
            }
        }
    }
}
