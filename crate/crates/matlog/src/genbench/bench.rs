//! Benchmark harness: timed solver runs over a grid of program sizes, with
//! CSV and plot-data emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{generate_program, instance_seed, GenError, GenSpec};
use crate::solver::{solve, Method};

/// One benchmark cell: a `(base size, rule count)` pair plus the squaring
/// counts to run the partial-evaluation engines with.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub atoms: usize,
    pub rules: usize,
    pub peval_ks: Vec<usize>,
}

/// One timed solver run.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub atoms: usize,
    pub rules: usize,
    pub method: Method,
    pub rep: usize,
    /// Seed of the generated instance, for reproduction.
    pub seed: u64,
    pub fact_count: usize,
    pub iterations: usize,
    pub peval_s: f64,
    pub fixpoint_s: f64,
    pub total_s: f64,
    pub nnz: usize,
    pub compression: f64,
    pub model_size: usize,
}

#[derive(Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

/// Per-variant averages across reps at one grid cell.
#[derive(Clone, Debug)]
pub struct AverageRow {
    pub atoms: usize,
    pub rules: usize,
    pub method: Method,
    pub iterations: f64,
    pub peval_s: f64,
    pub fixpoint_s: f64,
    pub total_s: f64,
    pub nnz: f64,
    pub compression: f64,
}

impl BenchReport {
    /// Averages grouped by (atoms, rules, method), in first-run order.
    pub fn averages(&self) -> Vec<AverageRow> {
        let mut order: Vec<(usize, usize, Method)> = Vec::new();
        for row in &self.rows {
            let key = (row.atoms, row.rules, row.method);
            if !order.contains(&key) {
                order.push(key);
            }
        }
        order
            .into_iter()
            .map(|(atoms, rules, method)| {
                let group: Vec<&BenchRow> = self
                    .rows
                    .iter()
                    .filter(|r| (r.atoms, r.rules, r.method) == (atoms, rules, method))
                    .collect();
                let count = group.len() as f64;
                let mean =
                    |f: &dyn Fn(&BenchRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / count;
                AverageRow {
                    atoms,
                    rules,
                    method,
                    iterations: mean(&|r| r.iterations as f64),
                    peval_s: mean(&|r| r.peval_s),
                    fixpoint_s: mean(&|r| r.fixpoint_s),
                    total_s: mean(&|r| r.total_s),
                    nnz: mean(&|r| r.nnz as f64),
                    compression: mean(&|r| r.compression),
                }
            })
            .collect()
    }
}

fn methods_for(ks: &[usize]) -> Vec<Method> {
    let mut methods = vec![Method::Tp, Method::Matrix, Method::ColReduct];
    for &k in ks {
        methods.push(Method::Peval { k });
    }
    for &k in ks {
        methods.push(Method::PevalColReduct { k });
    }
    methods
}

/// Runs every method over every grid cell `reps` times. Timing runs are
/// sequential; one instance per (cell, rep) is shared by all methods so
/// model sizes are directly comparable.
pub fn run_benchmark(
    grid: &[GridPoint],
    reps: usize,
    base_seed: u64,
) -> Result<BenchReport, GenError> {
    assert!(reps >= 1);
    let mut rows = Vec::new();
    for point in grid {
        let methods = methods_for(&point.peval_ks);
        for rep in 0..reps {
            let seed = instance_seed(
                base_seed,
                point.atoms as u64,
                point.rules as u64,
                rep as u64,
            );
            let spec = GenSpec::new(point.atoms, point.rules, seed);
            let program = generate_program(&spec)?;
            let fact_count = program.facts().size();
            for &method in &methods {
                let result = solve(&program, method);
                rows.push(BenchRow {
                    atoms: point.atoms,
                    rules: point.rules,
                    method,
                    rep,
                    seed,
                    fact_count,
                    iterations: result.iterations,
                    peval_s: result.peval_time.as_secs_f64(),
                    fixpoint_s: result.fixpoint_time.as_secs_f64(),
                    total_s: result.total_time.as_secs_f64(),
                    nnz: result.nnz,
                    compression: result.compression,
                    model_size: result.model.size(),
                });
            }
        }
    }
    Ok(BenchReport { rows })
}

pub const CSV_HEADER: &str =
    "n,m,method,k,rep,iterations,peval_s,fixpoint_s,total_s,nnz,compression,model_size";

/// Writes the per-run rows as CSV.
pub fn write_csv(report: &BenchReport, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{},{:.6},{}",
            r.atoms,
            r.rules,
            r.method.name(),
            r.method.k(),
            r.rep,
            r.iterations,
            r.peval_s,
            r.fixpoint_s,
            r.total_s,
            r.nnz,
            r.compression,
            r.model_size,
        )?;
    }
    out.flush()
}

/// Writes one whitespace-separated table per base size: rule count in the
/// first column, then the average fixpoint time of each method variant.
/// Returns the paths written.
pub fn emit_plot_data(report: &BenchReport, dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let averages = report.averages();
    let mut atom_sizes: Vec<usize> = Vec::new();
    for a in &averages {
        if !atom_sizes.contains(&a.atoms) {
            atom_sizes.push(a.atoms);
        }
    }
    let mut written = Vec::new();
    for n in atom_sizes {
        let group: Vec<&AverageRow> = averages.iter().filter(|a| a.atoms == n).collect();
        let mut variants: Vec<Method> = Vec::new();
        let mut rule_counts: Vec<usize> = Vec::new();
        for a in &group {
            if !variants.contains(&a.method) {
                variants.push(a.method);
            }
            if !rule_counts.contains(&a.rules) {
                rule_counts.push(a.rules);
            }
        }
        rule_counts.sort_unstable();

        let path = dir.join(format!("fixpoint_n{n}.dat"));
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "# average fixpoint time in seconds, base size n = {n}")?;
        let labels: Vec<String> = variants.iter().map(|v| v.to_string()).collect();
        writeln!(out, "# m {}", labels.join(" "))?;
        for m in rule_counts {
            write!(out, "{m}")?;
            for variant in &variants {
                let cell = group
                    .iter()
                    .find(|a| a.rules == m && a.method == *variant)
                    .map_or(f64::NAN, |a| a.fixpoint_s);
                write!(out, " {cell:.6}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}
