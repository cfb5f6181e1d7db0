//! The three numeric fixpoint loops. Each iterate is a 0/1 vector, so
//! stability is tested by exact equality; the sequences are nondecreasing
//! and stabilize within (dimension + 1) products.

use std::time::{Duration, Instant};

use crate::linalg::{
    add_matrices, encode_d_rules, encode_sd, gamma_k, matvec, theta, BitVector, DRuleIndex,
    SparseMatrix,
};
use crate::transform::DProgram;

fn stall_limit(dim: usize) -> usize {
    // Theory bounds the iteration count by dim + 1; anything beyond is a bug.
    dim + 2
}

/// Iterates `v <- theta(M v)` from `v0` until stable. Returns the fixpoint
/// and the number of products, counting the final stabilizing one.
pub fn fixpoint_matrix(m: &SparseMatrix, v0: &BitVector) -> (BitVector, usize) {
    assert_eq!(m.rows(), m.cols());
    let mut v = v0.clone();
    let mut iterations = 0;
    loop {
        let next = theta(&matvec(m, &v).expect("square matrix matches vector"));
        iterations += 1;
        if next == v {
            return (next, iterations);
        }
        assert!(
            iterations < stall_limit(m.rows()),
            "fixpoint did not stabilize"
        );
        v = next;
    }
}

/// Column-reduced fixpoint: `v <- theta_D(N v[..n] | v0)`.
///
/// The initial vector is folded into every iterate before disjunctive
/// propagation. Column truncation discards the diagonal tautology of any
/// transformation-introduced fact, which would otherwise go false after
/// one step; re-asserting the (always true) facts repairs that and is
/// harmless everywhere else.
pub fn fixpoint_colreduct(
    nmat: &SparseMatrix,
    v0: &BitVector,
    idx: &DRuleIndex,
) -> (BitVector, usize) {
    let n = nmat.cols();
    assert_eq!(nmat.rows(), v0.len());
    let mut v = v0.clone();
    let mut iterations = 0;
    loop {
        let product = matvec(nmat, &v.prefix(n)).expect("submatrix matches prefix");
        let mut next = theta(&product);
        next.or_assign(v0);
        idx.propagate(&mut next);
        iterations += 1;
        if next == v {
            return (next, iterations);
        }
        assert!(
            iterations < stall_limit(nmat.rows()),
            "fixpoint did not stabilize"
        );
        v = next;
    }
}

/// Matrices prepared for a partial-evaluation run, with the two phases
/// timed separately.
pub struct PevalMatrices {
    /// The iterated matrix: squared core plus disjunctive rows, column
    /// reduced when requested.
    pub matrix: SparseMatrix,
    pub encode_time: Duration,
    pub squaring_time: Duration,
}

/// Builds the iterated matrix for the partial-evaluation engines.
///
/// The core matrix is embedded at the full extended dimension and squared
/// `k` times; the disjunctive rows are added afterwards, unsquared.
/// Before squaring, every disjunctive-rule head gets a unit diagonal
/// entry: the head has no core rule of its own, so without the tautology
/// the squared matrix would forget rules whose bodies mention it (their
/// rows would turn into zero rows and the atoms they derive would be lost
/// from the fixpoint). Squaring a matrix with that tautology is squaring
/// the core program extended by `h :- h`, which derives nothing new.
///
/// With `k = 0` no squaring happens and the result is exactly the full
/// program matrix (column reduced when requested).
pub fn peval_matrices(dp: &DProgram, k: usize, col_reduct: bool) -> PevalMatrices {
    let m = dp.extended_base();
    let encode_started = Instant::now();
    let mq = encode_sd(dp.q(), m).expect("transformation output is SD");
    let md = encode_d_rules(dp);
    let encode_time = encode_started.elapsed();

    let started = Instant::now();
    let gamma = if k == 0 {
        mq
    } else {
        let carrier = mq.with_unit_diagonal(dp.d_heads().map(|a| a.index()));
        gamma_k(&carrier, k).expect("square matrix")
    };
    let mut matrix = add_matrices(&gamma, &md).expect("same shape");
    if col_reduct {
        matrix = matrix.truncate_cols(dp.original_base());
    }
    let squaring_time = started.elapsed();

    PevalMatrices {
        matrix,
        encode_time,
        squaring_time,
    }
}

/// Full partial-evaluation pipeline: square, add the disjunctive rows and
/// iterate to the fixpoint (with or without column reduction).
pub fn fixpoint_peval(
    dp: &DProgram,
    k: usize,
    col_reduct: bool,
    v0: &BitVector,
    idx: &DRuleIndex,
) -> (BitVector, usize, PevalMatrices) {
    let prepared = peval_matrices(dp, k, col_reduct);
    let (fix, iterations) = if col_reduct {
        fixpoint_colreduct(&prepared.matrix, v0, idx)
    } else {
        fixpoint_matrix(&prepared.matrix, v0)
    };
    (fix, iterations, prepared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{encode_d_program, encode_submatrix, initial_vector_d};
    use crate::program::{parse_program, tp_least_model};
    use crate::transform::to_d_program;

    const EXAMPLE_1: &str = "p :- q.\nq :- p, r.\nr :- s.\ns.\n";
    const EXAMPLE_3: &str = "p :- q.\nq :- p, r.\nq :- s.\ns.\n";
    const EXAMPLE_6: &str = "p :- q, s, t.\nq :- p, t.\ns :- t.\nt.\n";

    fn bv(bits: &[u8]) -> BitVector {
        BitVector::from_bools(bits.iter().map(|&b| b != 0).collect())
    }

    #[test]
    fn matrix_fixpoint_example_1() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let dp = to_d_program(&p);
        let m = encode_d_program(&dp);
        let (fix, iters) = fixpoint_matrix(&m, &initial_vector_d(&dp));
        assert_eq!(fix, bv(&[0, 0, 1, 1]));
        assert_eq!(iters, 2);
    }

    #[test]
    fn matrix_fixpoint_example_3() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let dp = to_d_program(&p);
        let m = encode_d_program(&dp);
        let (fix, iters) = fixpoint_matrix(&m, &initial_vector_d(&dp));
        assert_eq!(fix, bv(&[1, 1, 0, 1, 0, 1]));
        assert_eq!(iters, 4);
    }

    #[test]
    fn matrix_fixpoint_without_facts_stops_immediately() {
        let (p, _) = parse_program("a :- b.\nb :- a.\n").unwrap();
        let dp = to_d_program(&p);
        let m = encode_d_program(&dp);
        let (fix, iters) = fixpoint_matrix(&m, &initial_vector_d(&dp));
        assert_eq!(fix.count_ones(), 0);
        assert_eq!(iters, 1);
    }

    #[test]
    fn colreduct_fixpoint_example_4() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let dp = to_d_program(&p);
        let nmat = encode_submatrix(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let (fix, iters) = fixpoint_colreduct(&nmat, &initial_vector_d(&dp), &idx);
        assert_eq!(fix, bv(&[1, 1, 0, 1, 0, 1]));
        assert_eq!(iters, 3);
    }

    #[test]
    fn colreduct_equals_matrix_on_sd_program() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let dp = to_d_program(&p);
        let m = encode_d_program(&dp);
        let nmat = encode_submatrix(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let v0 = initial_vector_d(&dp);
        let (fix_m, iters_m) = fixpoint_matrix(&m, &v0);
        let (fix_n, iters_n) = fixpoint_colreduct(&nmat, &v0, &idx);
        assert_eq!(fix_m, fix_n);
        assert_eq!(iters_m, iters_n);
    }

    #[test]
    fn colreduct_keeps_split_facts_alive() {
        // One head defined by both a fact and a rule: the fact's diagonal
        // tautology lives on a truncated column, so only the initial-vector
        // repair keeps it derivable.
        let (p, _) = parse_program("p.\np :- q.\n").unwrap();
        let dp = to_d_program(&p);
        let nmat = encode_submatrix(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let (fix, _) = fixpoint_colreduct(&nmat, &initial_vector_d(&dp), &idx);
        let model = fix.to_interpretation(dp.original_base());
        assert_eq!(model, tp_least_model(&p).0);
    }

    #[test]
    fn peval_theorem_step_on_sd_program() {
        let (p, _) = parse_program(EXAMPLE_6).unwrap();
        let dp = to_d_program(&p);
        let v0 = initial_vector_d(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let (fix, _, prepared) = fixpoint_peval(&dp, 1, false, &v0, &idx);
        assert_eq!(
            theta(&matvec(&prepared.matrix, &v0).unwrap()),
            bv(&[0, 0, 1, 1])
        );
        assert_eq!(fix, bv(&[0, 0, 1, 1]));
    }

    #[test]
    fn peval_k0_matches_matrix_method_exactly() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let dp = to_d_program(&p);
        let v0 = initial_vector_d(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let (fix, iters, prepared) = fixpoint_peval(&dp, 0, false, &v0, &idx);
        let full = encode_d_program(&dp);
        assert_eq!(prepared.matrix, full);
        let (fix_m, iters_m) = fixpoint_matrix(&full, &v0);
        assert_eq!((fix, iters), (fix_m, iters_m));
    }

    #[test]
    fn peval_carries_d_heads_through_squaring() {
        // The body of `p :- q` mentions the collector head q; with k >= 1
        // the squared core must still derive p once q holds.
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let dp = to_d_program(&p);
        let v0 = initial_vector_d(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        for k in 1..=3 {
            for col_reduct in [false, true] {
                let (fix, _, _) = fixpoint_peval(&dp, k, col_reduct, &v0, &idx);
                let model = fix.to_interpretation(dp.original_base());
                assert_eq!(model, tp_least_model(&p).0, "k={k} cr={col_reduct}");
            }
        }
    }

    #[test]
    fn peval_example_1_converges_in_two_products() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let dp = to_d_program(&p);
        let v0 = initial_vector_d(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let (fix, iters, _) = fixpoint_peval(&dp, 1, false, &v0, &idx);
        assert_eq!(fix, bv(&[0, 0, 1, 1]));
        assert_eq!(iters, 2);
    }

    #[test]
    fn squaring_halves_products_on_deep_chains() {
        // Derivation depth 20: each squaring doubles the distance one
        // product covers, so products needed drop from 21 toward 2.
        let mut text = String::from("p0.\n");
        for i in 1..=20 {
            text.push_str(&format!("p{i} :- p{}.\n", i - 1));
        }
        let (p, _) = parse_program(&text).unwrap();
        let dp = to_d_program(&p);
        let v0 = initial_vector_d(&dp);
        let idx = DRuleIndex::from_d_program(&dp);
        let all_true = BitVector::from_bools(vec![true; 21]);
        for (k, expected) in [(0, 21), (1, 11), (3, 4), (5, 2)] {
            let (fix, iters, _) = fixpoint_peval(&dp, k, false, &v0, &idx);
            assert_eq!(fix, all_true);
            assert_eq!(iters, expected, "k={k}");
        }
    }
}
