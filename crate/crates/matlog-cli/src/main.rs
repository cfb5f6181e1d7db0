//! Command-line front-end: solve, transform, peval, gen, check and bench
//! subcommands over the program file format.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 constraint
//! inconsistency, 3 I/O error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use matlog::genbench::{
    cross_validate, emit_plot_data, head_multiplicity, instance_seed, run_benchmark, write_csv,
    GenSpec, GridPoint,
};
use matlog::linalg::{check_constraints_vec, encode_constraints, BitVector, Consistency};
use matlog::program::{
    parse_constraints_only, parse_program, serialize_constraints, serialize_program, AtomTable,
    ConstraintSet, DefiniteProgram,
};
use matlog::solver::{Engine, EngineRegistry, Method, SolveResult};
use matlog::transform::{peval_symbolic_iter, to_d_program};

#[derive(Parser)]
#[command(
    name = "matlog",
    about = "Least models of definite logic programs via sparse linear algebra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Csv,
    #[value(alias = "json-lines")]
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the least model of a program file.
    Solve(SolveArgs),
    /// Split multiply-defined heads and emit the resulting d-program.
    Transform(TransformArgs),
    /// Unfold rule bodies symbolically and emit the evaluated program.
    Peval(PevalArgs),
    /// Generate a random program.
    Gen(GenArgs),
    /// Cross-validate every solver method against the reference on random
    /// instances.
    Check(CheckArgs),
    /// Time all methods over a grid of program sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Program file.
    file: PathBuf,
    /// Solver method (see `--help` for the registry).
    #[arg(long, default_value = "matrix")]
    method: String,
    /// Squaring count for the peval methods.
    #[arg(long)]
    k: Option<usize>,
    /// Constraints file (`:- a, b.` lines); checked against the model.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Print matrix statistics and phase timings.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value = "human")]
    format: OutputFormat,
}

#[derive(Args)]
struct TransformArgs {
    file: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PevalArgs {
    file: PathBuf,
    /// Number of unfolding rounds.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    atoms: usize,
    #[arg(long)]
    rules: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Base sizes to draw from.
    #[arg(long = "atoms-list", value_delimiter = ',', default_value = "10,25,50")]
    atoms_list: Vec<usize>,
    /// Rule counts as multiples of the base size.
    #[arg(long = "rules-mult", value_delimiter = ',', default_value = "2,10,50")]
    rules_mult: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "atoms-list", value_delimiter = ',', required = true)]
    atoms_list: Vec<usize>,
    #[arg(long = "rules-list", value_delimiter = ',', required = true)]
    rules_list: Vec<usize>,
    /// Squaring counts for the peval methods.
    #[arg(long = "k-list", value_delimiter = ',', default_value = "1,5")]
    k_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// CSV output path.
    #[arg(long, required = true)]
    csv: PathBuf,
    /// Directory for per-base-size plot data files.
    #[arg(long = "plot-dir")]
    plot_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    Usage(String),
    Inconsistent,
    Io(PathBuf, std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Inconsistent => 2,
            CliError::Io(_, _) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Inconsistent => {
                write!(f, "inconsistent: the least model violates a constraint")
            }
            CliError::Io(path, err) => write!(f, "{}: {err}", path.display()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_out(target: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match target {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_file(path: &Path) -> Result<(DefiniteProgram, ConstraintSet), CliError> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| CliError::Usage(format!("{}:{e}", path.display())))
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes instead of panicking in
    // println!; Rust ignores SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Peval(args) => cmd_peval(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn resolve_engine(name: &str, k: Option<usize>) -> Result<Box<dyn Engine>, CliError> {
    let registry = EngineRegistry::standard();
    let takes_k = matches!(name, "peval" | "peval-cr");
    if k.is_some() && !takes_k {
        return Err(CliError::Usage(format!(
            "--k only applies to the peval methods, not `{name}`"
        )));
    }
    registry.create(name, k.unwrap_or(1)).ok_or_else(|| {
        let known: Vec<_> = registry.names().collect();
        CliError::Usage(format!(
            "unknown method `{name}`; available: {}",
            known.join(", ")
        ))
    })
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let engine = resolve_engine(&args.method, args.k)?;

    // Constraints may arrive inline or in a dedicated file; a shared parse
    // keeps one atom table so constraint-only atoms become (underivable)
    // table entries.
    let mut text = read(&args.file)?;
    if let Some(cpath) = &args.constraints {
        let ctext = read(cpath)?;
        parse_constraints_only(&ctext, AtomTable::new())
            .map_err(|e| CliError::Usage(format!("{}:{e}", cpath.display())))?;
        text.push('\n');
        text.push_str(&ctext);
    }
    let (program, constraints) = parse_program(&text)
        .map_err(|e| CliError::Usage(format!("{}:{e}", args.file.display())))?;

    let result = engine.solve(&program);

    let consistent = if constraints.is_empty() {
        Consistency::Consistent
    } else {
        let mc = encode_constraints(&constraints, program.atom_count());
        let v = BitVector::from_interpretation(&result.model, program.atom_count());
        check_constraints_vec(&mc, &v).expect("constraint matrix matches base")
    };

    report_solve(&args, engine.as_ref(), &program, &result, consistent);

    if consistent == Consistency::Inconsistent {
        return Err(CliError::Inconsistent);
    }
    Ok(())
}

fn report_solve(
    args: &SolveArgs,
    engine: &dyn Engine,
    program: &DefiniteProgram,
    result: &SolveResult,
    consistent: Consistency,
) {
    let model = program.atom_names(&result.model);
    match args.format {
        OutputFormat::Human => {
            for name in &model {
                println!("{name}");
            }
            println!("% iterations: {}", result.iterations);
            if args.stats {
                println!("% method: {}", engine.label());
                println!("% extended base: {}", result.extended_base_size);
                println!(
                    "% matrix shape: {}x{}",
                    result.matrix_shape.0, result.matrix_shape.1
                );
                println!("% nnz: {}", result.nnz);
                println!("% compression: {:.6}", result.compression);
                println!("% peval time: {:.6}s", result.peval_time.as_secs_f64());
                println!("% encode time: {:.6}s", result.encode_time.as_secs_f64());
                println!(
                    "% fixpoint time: {:.6}s",
                    result.fixpoint_time.as_secs_f64()
                );
                println!("% total time: {:.6}s", result.total_time.as_secs_f64());
            }
        }
        OutputFormat::Csv => {
            println!(
                "method,k,iterations,peval_s,encode_s,fixpoint_s,total_s,rows,cols,nnz,compression,extended_base,model_size,consistent"
            );
            println!(
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6},{},{},{}",
                engine.method().name(),
                engine.method().k(),
                result.iterations,
                result.peval_time.as_secs_f64(),
                result.encode_time.as_secs_f64(),
                result.fixpoint_time.as_secs_f64(),
                result.total_time.as_secs_f64(),
                result.matrix_shape.0,
                result.matrix_shape.1,
                result.nnz,
                result.compression,
                result.extended_base_size,
                result.model.size(),
                consistent == Consistency::Consistent,
            );
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "method": engine.method().name(),
                "k": engine.method().k(),
                "model": model,
                "iterations": result.iterations,
                "matrix_shape": [result.matrix_shape.0, result.matrix_shape.1],
                "nnz": result.nnz,
                "compression": result.compression,
                "extended_base": result.extended_base_size,
                "times_s": {
                    "peval": result.peval_time.as_secs_f64(),
                    "encode": result.encode_time.as_secs_f64(),
                    "fixpoint": result.fixpoint_time.as_secs_f64(),
                    "total": result.total_time.as_secs_f64(),
                },
                "consistent": consistent == Consistency::Consistent,
            });
            println!("{value}");
        }
    }
}

fn cmd_transform(args: TransformArgs) -> Result<(), CliError> {
    let (program, constraints) = parse_file(&args.file)?;
    let dp = to_d_program(&program);
    let flat = dp.to_program();
    let mut out = serialize_program(&flat);
    out.push_str(&serialize_constraints(&constraints, &flat));
    write_out(&args.output, &out)
}

fn cmd_peval(args: PevalArgs) -> Result<(), CliError> {
    let (program, constraints) = parse_file(&args.file)?;
    if !constraints.is_empty() {
        return Err(CliError::Usage(
            "partial evaluation does not support constraints; strip them first".into(),
        ));
    }
    let evaluated = peval_symbolic_iter(&program, args.k)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.file.display())))?;
    write_out(&args.output, &serialize_program(&evaluated))
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let spec = GenSpec::new(args.atoms, args.rules, args.seed);
    let program =
        matlog::genbench::generate_program(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = format!(
        "% generated: atoms={} rules={} seed={} facts={}\n",
        args.atoms,
        args.rules,
        args.seed,
        program.facts().size()
    );
    let multiplicity: Vec<String> = head_multiplicity(&program)
        .into_iter()
        .map(|(defs, count)| format!("{defs}:{count}"))
        .collect();
    out.push_str(&format!(
        "% head multiplicity (rules-per-head:heads): {}\n",
        multiplicity.join(" ")
    ));
    out.push_str(&serialize_program(&program));
    write_out(&args.output, &out)
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    if args.instances == 0 || args.atoms_list.is_empty() || args.rules_mult.is_empty() {
        return Err(CliError::Usage(
            "check needs at least one instance, base size and rule multiplier".into(),
        ));
    }
    let mut specs = Vec::with_capacity(args.instances);
    let mut draw = 0u64;
    'fill: loop {
        for &n in &args.atoms_list {
            for &mult in &args.rules_mult {
                if specs.len() == args.instances {
                    break 'fill;
                }
                let seed = instance_seed(args.seed, n as u64, mult as u64, draw);
                specs.push(GenSpec::new(n, n * mult, seed));
                draw += 1;
            }
        }
    }

    let mut total_runs = 0;
    let mut disagreements = Vec::new();
    for (chunk, k) in specs.chunks(256).zip((1..=3usize).cycle()) {
        let engines: Vec<Box<dyn Engine>> = vec![
            Method::Tp.engine(),
            Method::Matrix.engine(),
            Method::ColReduct.engine(),
            Method::Peval { k }.engine(),
            Method::PevalColReduct { k }.engine(),
        ];
        let report = cross_validate(chunk, &engines).map_err(|e| CliError::Usage(e.to_string()))?;
        total_runs += report.engine_runs;
        disagreements.extend(report.disagreements);
    }

    println!(
        "checked {} instances ({} solver runs): {} disagreements",
        specs.len(),
        total_runs,
        disagreements.len()
    );
    for d in &disagreements {
        println!(
            "  instance {} (seed {}): {} returned {{{}}}, reference {{{}}}",
            d.instance,
            d.seed,
            d.engine,
            d.actual.join(", "),
            d.expected.join(", ")
        );
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let k_list = &args.k_list;
    let grid: Vec<GridPoint> = args
        .atoms_list
        .iter()
        .flat_map(|&atoms| {
            args.rules_list.iter().map(move |&rules| GridPoint {
                atoms,
                rules,
                peval_ks: k_list.clone(),
            })
        })
        .collect();
    let report =
        run_benchmark(&grid, args.reps, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    write_csv(&report, &args.csv).map_err(|e| CliError::Io(args.csv.clone(), e))?;
    if let Some(dir) = &args.plot_dir {
        emit_plot_data(&report, dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    }

    println!(
        "n,m,method,k,avg_iterations,avg_peval_s,avg_fixpoint_s,avg_total_s,avg_nnz,compression"
    );
    for avg in report.averages() {
        println!(
            "{},{},{},{},{:.1},{:.6},{:.6},{:.6},{:.0},{:.6}",
            avg.atoms,
            avg.rules,
            avg.method.name(),
            avg.method.k(),
            avg.iterations,
            avg.peval_s,
            avg.fixpoint_s,
            avg.total_s,
            avg.nnz,
            avg.compression
        );
    }
    Ok(())
}
