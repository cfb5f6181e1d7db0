//! The concrete solver engines behind the [`Engine`](super::Engine) trait.

use std::time::{Duration, Instant};

use super::fixpoint::{fixpoint_colreduct, fixpoint_matrix, peval_matrices};
use super::{Engine, Method, SolveResult};
use crate::linalg::{
    encode_d_program, encode_submatrix, initial_vector_d, BitVector, DRuleIndex, SparseMatrix,
};
use crate::program::{tp_least_model, DefiniteProgram};
use crate::transform::{to_d_program, DProgram};

fn compression(n: usize, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        (m - n) as f64 / m as f64
    }
}

/// Symbolic immediate-consequence iteration; the oracle the matrix engines
/// are measured against.
pub struct TpEngine;

impl Engine for TpEngine {
    fn method(&self) -> Method {
        Method::Tp
    }

    fn solve(&self, program: &DefiniteProgram) -> SolveResult {
        let started = Instant::now();
        let (model, iterations) = tp_least_model(program);
        let elapsed = started.elapsed();
        SolveResult {
            model,
            iterations,
            peval_time: Duration::ZERO,
            encode_time: Duration::ZERO,
            fixpoint_time: elapsed,
            total_time: elapsed,
            matrix_shape: (0, 0),
            nnz: 0,
            compression: 0.0,
            extended_base_size: program.atom_count(),
        }
    }
}

struct Prepared {
    dp: DProgram,
    v0: BitVector,
    transform_time: Duration,
}

fn prepare(program: &DefiniteProgram) -> Prepared {
    let started = Instant::now();
    let dp = to_d_program(program);
    let transform_time = started.elapsed();
    let v0 = initial_vector_d(&dp);
    Prepared {
        dp,
        v0,
        transform_time,
    }
}

#[derive(Default)]
struct Phases {
    peval: Duration,
    encode: Duration,
    fixpoint: Duration,
}

fn finish(
    program: &DefiniteProgram,
    dp: &DProgram,
    matrix: &SparseMatrix,
    fix: BitVector,
    iterations: usize,
    phases: Phases,
    started: Instant,
) -> SolveResult {
    let n = program.atom_count();
    let m = dp.extended_base();
    SolveResult {
        model: fix.to_interpretation(n),
        iterations,
        peval_time: phases.peval,
        encode_time: phases.encode,
        fixpoint_time: phases.fixpoint,
        total_time: started.elapsed(),
        matrix_shape: matrix.shape(),
        nnz: matrix.nnz(),
        compression: compression(n, m),
        extended_base_size: m,
    }
}

/// Full program-matrix fixpoint over the extended base.
pub struct MatrixEngine;

impl Engine for MatrixEngine {
    fn method(&self) -> Method {
        Method::Matrix
    }

    fn solve(&self, program: &DefiniteProgram) -> SolveResult {
        let started = Instant::now();
        let prep = prepare(program);
        let encode_started = Instant::now();
        let matrix = encode_d_program(&prep.dp);
        let encode = prep.transform_time + encode_started.elapsed();
        let fix_started = Instant::now();
        let (fix, iterations) = fixpoint_matrix(&matrix, &prep.v0);
        let phases = Phases {
            encode,
            fixpoint: fix_started.elapsed(),
            ..Phases::default()
        };
        finish(program, &prep.dp, &matrix, fix, iterations, phases, started)
    }
}

/// Fixpoint over the column-reduced submatrix with disjunctive propagation
/// folded into the thresholding.
pub struct ColReductEngine;

impl Engine for ColReductEngine {
    fn method(&self) -> Method {
        Method::ColReduct
    }

    fn solve(&self, program: &DefiniteProgram) -> SolveResult {
        let started = Instant::now();
        let prep = prepare(program);
        let encode_started = Instant::now();
        let matrix = encode_submatrix(&prep.dp);
        let idx = DRuleIndex::from_d_program(&prep.dp);
        let encode = prep.transform_time + encode_started.elapsed();
        let fix_started = Instant::now();
        let (fix, iterations) = fixpoint_colreduct(&matrix, &prep.v0, &idx);
        let phases = Phases {
            encode,
            fixpoint: fix_started.elapsed(),
            ..Phases::default()
        };
        finish(program, &prep.dp, &matrix, fix, iterations, phases, started)
    }
}

/// Partial evaluation by `k` matrix squarings, iterating either the full
/// squared matrix or its column reduction.
pub struct PevalEngine {
    k: usize,
    col_reduct: bool,
}

impl PevalEngine {
    pub fn full(k: usize) -> Self {
        PevalEngine {
            k,
            col_reduct: false,
        }
    }

    pub fn column_reduced(k: usize) -> Self {
        PevalEngine {
            k,
            col_reduct: true,
        }
    }
}

impl Engine for PevalEngine {
    fn method(&self) -> Method {
        if self.col_reduct {
            Method::PevalColReduct { k: self.k }
        } else {
            Method::Peval { k: self.k }
        }
    }

    fn solve(&self, program: &DefiniteProgram) -> SolveResult {
        let started = Instant::now();
        let prep = prepare(program);
        let prepared = peval_matrices(&prep.dp, self.k, self.col_reduct);
        let fix_started = Instant::now();
        let (fix, iterations) = if self.col_reduct {
            let idx = DRuleIndex::from_d_program(&prep.dp);
            fixpoint_colreduct(&prepared.matrix, &prep.v0, &idx)
        } else {
            fixpoint_matrix(&prepared.matrix, &prep.v0)
        };
        let phases = Phases {
            peval: prepared.squaring_time,
            encode: prep.transform_time + prepared.encode_time,
            fixpoint: fix_started.elapsed(),
        };
        finish(
            program,
            &prep.dp,
            &prepared.matrix,
            fix,
            iterations,
            phases,
            started,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::{solve, Method};
    use crate::program::{parse_program, tp_least_model};

    const EXAMPLE_1: &str = "p :- q.\nq :- p, r.\nr :- s.\ns.\n";
    const EXAMPLE_3: &str = "p :- q.\nq :- p, r.\nq :- s.\ns.\n";

    #[test]
    fn matrix_method_on_example_3() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let r = solve(&p, Method::Matrix);
        assert_eq!(p.atom_names(&r.model), ["p", "q", "s"]);
        assert_eq!(r.iterations, 4);
        assert_eq!(r.matrix_shape, (6, 6));
        assert_eq!(r.extended_base_size, 6);
        assert!((r.compression - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn colreduct_method_on_example_3() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let r = solve(&p, Method::ColReduct);
        assert_eq!(p.atom_names(&r.model), ["p", "q", "s"]);
        assert_eq!(r.iterations, 3);
        assert_eq!(r.matrix_shape, (6, 4));
    }

    #[test]
    fn peval_method_on_example_1() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let r = solve(&p, Method::Peval { k: 1 });
        assert_eq!(p.atom_names(&r.model), ["r", "s"]);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn all_methods_agree_on_worked_examples() {
        for text in [EXAMPLE_1, EXAMPLE_3] {
            let (p, _) = parse_program(text).unwrap();
            let oracle = tp_least_model(&p).0;
            for method in [
                Method::Tp,
                Method::Matrix,
                Method::ColReduct,
                Method::Peval { k: 2 },
                Method::PevalColReduct { k: 2 },
            ] {
                let r = solve(&p, method);
                assert_eq!(r.model, oracle, "{method}");
                assert!(r.iterations >= 1);
                assert!(r.compression >= 0.0 && r.compression < 1.0);
            }
        }
    }

    #[test]
    fn tp_engine_reports_no_matrix() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let r = solve(&p, Method::Tp);
        assert_eq!(r.matrix_shape, (0, 0));
        assert_eq!(r.nnz, 0);
        assert_eq!(r.extended_base_size, 4);
    }
}
