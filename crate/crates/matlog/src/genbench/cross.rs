//! Cross-validation: every engine must reproduce the symbolic least model
//! on every generated instance.

use rayon::prelude::*;

use super::{generate_program, GenError, GenSpec};
use crate::program::tp_least_model;
use crate::solver::Engine;

/// One engine returning the wrong model on one instance.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub instance: usize,
    pub seed: u64,
    pub engine: String,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

#[derive(Debug, Default)]
pub struct CrossReport {
    pub instances: usize,
    pub engine_runs: usize,
    pub disagreements: Vec<Disagreement>,
}

impl CrossReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Runs every engine on every generated instance and compares each model
/// against the immediate-consequence reference. Disagreements are report
/// content, not errors. Instances are independent and checked in parallel.
pub fn cross_validate(
    specs: &[GenSpec],
    engines: &[Box<dyn Engine>],
) -> Result<CrossReport, GenError> {
    let per_instance: Result<Vec<Vec<Disagreement>>, GenError> = specs
        .par_iter()
        .enumerate()
        .map(|(instance, spec)| {
            let program = generate_program(spec)?;
            let (oracle, _) = tp_least_model(&program);
            let mut found = Vec::new();
            for engine in engines {
                let result = engine.solve(&program);
                if result.model != oracle {
                    found.push(Disagreement {
                        instance,
                        seed: spec.seed,
                        engine: engine.label(),
                        expected: program.atom_names(&oracle),
                        actual: program.atom_names(&result.model),
                    });
                }
            }
            Ok(found)
        })
        .collect();
    let per_instance = per_instance?;
    Ok(CrossReport {
        instances: specs.len(),
        engine_runs: specs.len() * engines.len(),
        disagreements: per_instance.into_iter().flatten().collect(),
    })
}
