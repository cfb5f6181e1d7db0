//! Least-model engines. Every variant implements [`Engine`] and is
//! registered by name in [`EngineRegistry`], so callers select a strategy
//! at runtime; all of them must agree with the symbolic reference solver.

mod engines;
mod fixpoint;

pub use engines::{ColReductEngine, MatrixEngine, PevalEngine, TpEngine};
pub use fixpoint::{
    fixpoint_colreduct, fixpoint_matrix, fixpoint_peval, peval_matrices, PevalMatrices,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::program::{DefiniteProgram, Interpretation};

/// The solver strategies exposed by the crate.
///
/// For `Peval`, `k` counts matrix squarings; `k = 0` degenerates to the
/// plain matrix method.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Symbolic immediate-consequence iteration (the reference).
    Tp,
    /// Full program-matrix fixpoint over the extended base.
    Matrix,
    /// Fixpoint over the column-reduced submatrix with disjunctive
    /// propagation in the thresholding.
    ColReduct,
    /// Partial evaluation: fixpoint over the squared core matrix plus
    /// disjunctive rows.
    Peval { k: usize },
    /// Partial evaluation with the squared matrix column-reduced.
    PevalColReduct { k: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Tp => "tp",
            Method::Matrix => "matrix",
            Method::ColReduct => "col-reduct",
            Method::Peval { .. } => "peval",
            Method::PevalColReduct { .. } => "peval-cr",
        }
    }

    /// Squaring count for the partial-evaluation variants, 0 otherwise.
    pub fn k(&self) -> usize {
        match self {
            Method::Peval { k } | Method::PevalColReduct { k } => *k,
            _ => 0,
        }
    }

    pub fn engine(&self) -> Box<dyn Engine> {
        match *self {
            Method::Tp => Box::new(TpEngine),
            Method::Matrix => Box::new(MatrixEngine),
            Method::ColReduct => Box::new(ColReductEngine),
            Method::Peval { k } => Box::new(PevalEngine::full(k)),
            Method::PevalColReduct { k } => Box::new(PevalEngine::column_reduced(k)),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Peval { k } => write!(f, "peval(k={k})"),
            Method::PevalColReduct { k } => write!(f, "peval-cr(k={k})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    /// Parses a bare method name; the peval variants get `k = 1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tp" => Ok(Method::Tp),
            "matrix" => Ok(Method::Matrix),
            "col-reduct" => Ok(Method::ColReduct),
            "peval" => Ok(Method::Peval { k: 1 }),
            "peval-cr" => Ok(Method::PevalColReduct { k: 1 }),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// Model plus per-run metrics for one solver invocation.
///
/// Phase timings: `encode_time` covers transformation and matrix encoding,
/// `peval_time` covers matrix squaring, `fixpoint_time` the iteration
/// loop, and `total_time` everything.
#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Least model restricted to the original atom base.
    pub model: Interpretation,
    /// Products (or operator applications) including the one that
    /// certifies the fixpoint.
    pub iterations: usize,
    pub peval_time: Duration,
    pub encode_time: Duration,
    pub fixpoint_time: Duration,
    pub total_time: Duration,
    /// Shape of the iterated matrix; `(0, 0)` for the symbolic engine.
    pub matrix_shape: (usize, usize),
    pub nnz: usize,
    /// Column compression `(m - n) / m` gained by the transformation.
    pub compression: f64,
    /// Extended base size `m` after the transformation.
    pub extended_base_size: usize,
}

/// A least-model solver variant.
pub trait Engine: Send + Sync {
    fn method(&self) -> Method;

    /// Human-readable variant label, e.g. `peval(k=5)`.
    fn label(&self) -> String {
        self.method().to_string()
    }

    fn solve(&self, program: &DefiniteProgram) -> SolveResult;
}

/// Computes the least model of `program` with the given strategy.
pub fn solve(program: &DefiniteProgram, method: Method) -> SolveResult {
    method.engine().solve(program)
}

type EngineFactory = fn(k: usize) -> Box<dyn Engine>;

/// Name-keyed registry of engine constructors. Front-ends resolve a method
/// string (plus the squaring count for the peval variants) to a boxed
/// engine; tests can register additional variants.
pub struct EngineRegistry {
    factories: BTreeMap<&'static str, EngineFactory>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry {
            factories: BTreeMap::new(),
        }
    }

    /// Registry with the five standard engines.
    pub fn standard() -> Self {
        let mut r = EngineRegistry::empty();
        r.register("tp", |_| Box::new(TpEngine));
        r.register("matrix", |_| Box::new(MatrixEngine));
        r.register("col-reduct", |_| Box::new(ColReductEngine));
        r.register("peval", |k| Box::new(PevalEngine::full(k)));
        r.register("peval-cr", |k| Box::new(PevalEngine::column_reduced(k)));
        r
    }

    pub fn register(&mut self, name: &'static str, factory: EngineFactory) {
        self.factories.insert(name, factory);
    }

    /// Instantiates the engine registered under `name`. `k` is ignored by
    /// variants that do not square.
    pub fn create(&self, name: &str, k: usize) -> Option<Box<dyn Engine>> {
        self.factories.get(name).map(|f| f(k))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for name in ["tp", "matrix", "col-reduct", "peval", "peval-cr"] {
            let m: Method = name.parse().unwrap();
            assert_eq!(m.name(), name);
        }
        assert!("pevaal".parse::<Method>().is_err());
    }

    #[test]
    fn registry_lists_and_creates_standard_engines() {
        let reg = EngineRegistry::standard();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, ["col-reduct", "matrix", "peval", "peval-cr", "tp"]);
        let engine = reg.create("peval", 5).unwrap();
        assert_eq!(engine.method(), Method::Peval { k: 5 });
        assert!(reg.create("nope", 0).is_none());
    }
}
