//! Encoders from symbolic programs to sparse matrices and vectors.

use super::{BitVector, LinalgError, SparseMatrix};
use crate::program::{ConstraintSet, DefiniteProgram, RuleKind};
use crate::transform::{is_sd, DProgram};

/// Encodes a singly-defined conjunctive program as a `dim`-square matrix:
/// a rule with body length `len` puts weight `1/len` at (head, body atom),
/// and a fact puts a tautology 1 on its diagonal.
pub fn encode_sd(q: &DefiniteProgram, dim: usize) -> Result<SparseMatrix, LinalgError> {
    if !is_sd(q) {
        return Err(LinalgError::NotSd);
    }
    assert!(dim >= q.atom_count());
    let mut triples = Vec::new();
    for rule in q.rules() {
        debug_assert_eq!(rule.kind(), RuleKind::Conjunctive);
        let h = rule.head().index();
        if rule.is_fact() {
            triples.push((h, h, 1.0));
        } else {
            let w = 1.0 / rule.body().len() as f64;
            for &b in rule.body() {
                triples.push((h, b.index(), w));
            }
        }
    }
    Ok(SparseMatrix::from_triples(dim, dim, triples))
}

/// The disjunctive rows alone, at the extended dimension: weight 1 at
/// every body column of each collector rule.
pub fn encode_d_rules(dp: &DProgram) -> SparseMatrix {
    let m = dp.extended_base();
    let mut triples = Vec::new();
    for d in dp.d() {
        for &b in d.body() {
            triples.push((d.head().index(), b.index(), 1.0));
        }
    }
    SparseMatrix::from_triples(m, m, triples)
}

/// Full program matrix of a d-program: the singly-defined part encoded as
/// in [`encode_sd`] plus unit weights on every disjunctive-rule row.
pub fn encode_d_program(dp: &DProgram) -> SparseMatrix {
    let m = dp.extended_base();
    let q = encode_sd(dp.q(), m).expect("transformation output is SD");
    add_rows(q, encode_d_rules(dp))
}

/// The first `original_base` columns of the full program matrix. Values of
/// new atoms are not consulted by products against it; derivations through
/// disjunctive rules are recovered by the reduced thresholding instead.
pub fn encode_submatrix(dp: &DProgram) -> SparseMatrix {
    encode_d_program(dp).truncate_cols(dp.original_base())
}

/// One row per constraint with `1/len` weights: a row's product against a
/// 0/1 vector reaches 1 exactly when the whole body holds.
pub fn encode_constraints(c: &ConstraintSet, n: usize) -> SparseMatrix {
    let mut triples = Vec::new();
    for (row, body) in c.bodies().iter().enumerate() {
        let w = 1.0 / body.len() as f64;
        for &a in body {
            assert!(a.index() < n, "constraint atom outside base");
            triples.push((row, a.index(), w));
        }
    }
    SparseMatrix::from_triples(c.len(), n, triples)
}

/// 1 exactly at fact heads.
pub fn initial_vector(p: &DefiniteProgram) -> BitVector {
    BitVector::from_interpretation(p.facts(), p.atom_count())
}

/// Initial vector of a d-program over the extended base; the facts are
/// those of the singly-defined part.
pub fn initial_vector_d(dp: &DProgram) -> BitVector {
    BitVector::from_interpretation(dp.q().facts(), dp.extended_base())
}

fn add_rows(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix {
    debug_assert!(a.rows_disjoint(&b));
    let mut triples: Vec<_> = a.iter().collect();
    triples.extend(b.iter());
    SparseMatrix::from_triples(a.rows(), a.cols(), triples)
}
