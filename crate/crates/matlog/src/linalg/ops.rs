//! Thresholdings and the sparse products iterated by the fixpoint engines.

use super::{BitVector, DRuleIndex, LinalgError, SparseMatrix, StateVector, PRUNE_EPS, THETA_EPS};

/// Clamps a real vector to 0/1: entry `i` becomes 1 when it reaches 1
/// (within the accumulation slack), otherwise 0. Entries above 1 occur on
/// disjunctive rows and clamp to 1 as well.
pub fn theta(v: &[f64]) -> BitVector {
    BitVector::from_bools(v.iter().map(|&x| x >= 1.0 - THETA_EPS).collect())
}

/// `theta` followed by disjunctive propagation: every true new atom also
/// sets the head of its collector rule.
pub fn theta_d(v: &[f64], idx: &DRuleIndex) -> BitVector {
    let mut w = theta(v);
    idx.propagate(&mut w);
    w
}

/// Sparse matrix times 0/1 vector.
pub fn matvec(m: &SparseMatrix, v: &BitVector) -> Result<StateVector, LinalgError> {
    if v.len() != m.cols() {
        return Err(LinalgError::DimensionMismatch {
            op: "matvec",
            left: m.shape(),
            right: (v.len(), 1),
        });
    }
    let mut out = vec![0.0; m.rows()];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, w) in m.row(r) {
            if v.get(c) {
                acc += w;
            }
        }
        *slot = acc;
    }
    Ok(out)
}

/// Sparse matrix product with a dense per-row accumulator. Entries whose
/// magnitude falls below the pruning tolerance are dropped to keep
/// repeated squaring sparse.
pub fn matmul(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
    if a.cols() != b.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut acc = vec![0.0f64; b.cols()];
    let mut touched: Vec<usize> = Vec::new();
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    for r in 0..a.rows() {
        for (k, w_ak) in a.row(r) {
            for (c, w_kc) in b.row(k) {
                if acc[c] == 0.0 {
                    touched.push(c);
                }
                acc[c] += w_ak * w_kc;
            }
        }
        for &c in &touched {
            if acc[c] >= PRUNE_EPS {
                triples.push((r, c, acc[c]));
            }
            acc[c] = 0.0;
        }
        touched.clear();
    }
    Ok(SparseMatrix::from_triples(a.rows(), b.cols(), triples))
}

/// `k` repeated squarings: the matrix raised to the power `2^k`.
pub fn gamma_k(m: &SparseMatrix, k: usize) -> Result<SparseMatrix, LinalgError> {
    assert_eq!(m.rows(), m.cols(), "gamma_k needs a square matrix");
    let mut current = m.clone();
    for _ in 0..k {
        current = matmul(&current, &current)?;
    }
    Ok(current)
}

/// Entrywise sum of two equally shaped matrices.
pub fn add_matrices(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
    if a.shape() != b.shape() {
        return Err(LinalgError::DimensionMismatch {
            op: "add_matrices",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut triples: Vec<_> = a.iter().collect();
    triples.extend(b.iter());
    Ok(SparseMatrix::from_triples(a.rows(), a.cols(), triples))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

/// Applies the constraint matrix to a candidate model: any constraint row
/// whose product reaches 1 marks the model inconsistent.
pub fn check_constraints_vec(mc: &SparseMatrix, v: &BitVector) -> Result<Consistency, LinalgError> {
    let product = matvec(mc, v)?;
    if theta(&product).count_ones() > 0 {
        Ok(Consistency::Inconsistent)
    } else {
        Ok(Consistency::Consistent)
    }
}
