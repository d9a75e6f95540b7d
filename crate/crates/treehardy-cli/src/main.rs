//! `treehardy` — build truncated rooted trees, compute discrete Hardy
//! space norms, and analyze multiplication operators between `T_p`
//! spaces.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on file or parse
//! errors, 3 when a check suite reports failures.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use treehardy::check::{run_suites, CheckConfig};
use treehardy::oracle::ratio;
use treehardy::report::{analyze, AnalysisConfig, Exactness};
use treehardy::{
    indicator_sequence, level_mean, tp_norm, witness_function, Error, Exponent, OperatorCase,
    RootedTree, SymbolGen, TreeFunction,
};

#[derive(Debug, Parser)]
#[command(name = "treehardy", version, about = "Hardy space norms and multiplication operators on truncated rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a tree file.
    GenTree(GenTreeArgs),
    /// Per-level means and the truncated norm of a function.
    Norm(NormArgs),
    /// Full operator analysis of a symbol between T_p and T_q.
    Analyze(AnalyzeArgs),
    /// The proof witness attaining the indicator value at one level.
    Witness(WitnessArgs),
    /// Run the randomized self-check suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct TreeSource {
    /// Tree file (`tree v1` format, or the `homogeneous K D` shorthand).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["homogeneous", "depth"])]
    tree: Option<PathBuf>,
    /// Build a K-homogeneous tree in memory (requires --depth).
    #[arg(long, value_name = "K", requires = "depth")]
    homogeneous: Option<u64>,
    /// Truncation depth for --homogeneous.
    #[arg(long, value_name = "D")]
    depth: Option<usize>,
}

impl TreeSource {
    fn load(&self) -> Result<Arc<RootedTree>, CliError> {
        match (&self.tree, self.homogeneous) {
            (Some(path), None) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::File(format!("cannot read {}: {e}", path.display()))
                })?;
                let tree = RootedTree::parse(&text)
                    .map_err(|e| CliError::File(format!("{}: {e}", path.display())))?;
                Ok(tree.into_shared())
            }
            (None, Some(k)) => {
                let depth = self.depth.expect("clap enforces --depth");
                Ok(RootedTree::homogeneous(k, depth)
                    .map_err(CliError::usage)?
                    .into_shared())
            }
            _ => Err(CliError::Usage(
                "provide exactly one tree source: --tree FILE or --homogeneous K --depth D".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
struct SymbolSource {
    /// Function file in `func v1` format.
    #[arg(long, visible_alias = "func", value_name = "FILE", conflicts_with = "gen")]
    symbol: Option<PathBuf>,
    /// Builtin generator: constant,RE[,IM] | level-power,ALPHA |
    /// level-decay | indicator,N | random,SEED.
    #[arg(long, value_name = "NAME[,PARAMS]")]
    gen: Option<String>,
}

impl SymbolSource {
    fn load(&self, tree: &Arc<RootedTree>) -> Result<TreeFunction, CliError> {
        match (&self.symbol, &self.gen) {
            (Some(path), None) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::File(format!("cannot read {}: {e}", path.display()))
                })?;
                TreeFunction::parse(&text, Arc::clone(tree))
                    .map_err(|e| CliError::File(format!("{}: {e}", path.display())))
            }
            (None, Some(spec)) => SymbolGen::parse(spec)
                .and_then(|g| g.build(tree))
                .map_err(CliError::usage),
            _ => Err(CliError::Usage(
                "provide exactly one symbol source: --symbol FILE or --gen NAME[,PARAMS]".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
struct GenTreeArgs {
    /// Degree of the homogeneous tree (k >= 2).
    #[arg(long, value_name = "K")]
    homogeneous: u64,
    /// Truncation depth.
    #[arg(long, value_name = "D")]
    depth: usize,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[command(flatten)]
    tree: TreeSource,
    #[command(flatten)]
    symbol: SymbolSource,
    /// Exponent p (positive number or `inf`).
    #[arg(long)]
    p: String,
    #[arg(long)]
    machine: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    tree: TreeSource,
    #[command(flatten)]
    symbol: SymbolSource,
    #[arg(long)]
    p: String,
    #[arg(long)]
    q: String,
    /// Comparison tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Levels shown in head/tail views.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Random functions tried by the empirical search.
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one machine-readable JSON document.
    #[arg(long)]
    machine: bool,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[command(flatten)]
    tree: TreeSource,
    #[command(flatten)]
    symbol: SymbolSource,
    #[arg(long)]
    p: String,
    #[arg(long)]
    q: String,
    /// Level whose witness to construct.
    #[arg(long)]
    level: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    machine: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    tree: TreeSource,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Testing hook: perturb expected values so suites provably can fail.
    #[arg(long)]
    corrupt: bool,
    #[arg(long)]
    machine: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    File(String),
    SuiteFailure(u64),
}

impl CliError {
    fn usage(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::File(_) => 2,
            CliError::SuiteFailure(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::File(m) => write!(f, "{m}"),
            CliError::SuiteFailure(n) => write!(f, "{n} suite check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => CliError::File(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn parse_exponent(text: &str) -> Result<Exponent, CliError> {
    Exponent::parse(text).map_err(CliError::usage)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    println!("{json}");
    Ok(())
}

fn cmd_gen_tree(args: &GenTreeArgs) -> Result<(), CliError> {
    let tree = RootedTree::homogeneous(args.homogeneous, args.depth).map_err(CliError::usage)?;
    let text = tree.to_text();
    match &args.out {
        Some(path) => fs::write(path, &text)
            .map_err(|e| CliError::File(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct NormReport {
    p: Exponent,
    level_means: Vec<(usize, f64)>,
    norm: f64,
    exactness: Exactness,
}

fn cmd_norm(args: &NormArgs) -> Result<(), CliError> {
    let tree = args.tree.load()?;
    let f = args.symbol.load(&tree)?;
    let p = parse_exponent(&args.p)?;
    let level_means: Vec<(usize, f64)> = (0..=tree.depth())
        .map(|n| Ok((n, level_mean(&f, p, n)?)))
        .collect::<Result<_, Error>>()?;
    let norm = tp_norm(&f, p);
    let report = NormReport {
        p,
        level_means,
        norm: norm.value,
        exactness: norm.exactness,
    };
    if args.machine {
        return print_json(&report);
    }
    for (n, m) in &report.level_means {
        println!("M_p({n}) = {m}");
    }
    println!("norm = {} ({})", report.norm, report.exactness);
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let tree = args.tree.load()?;
    let psi = args.symbol.load(&tree)?;
    let p = parse_exponent(&args.p)?;
    let q = parse_exponent(&args.q)?;
    if args.window == 0 {
        return Err(CliError::Usage("--window must be at least 1".into()));
    }
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let cfg = AnalysisConfig {
        window: args.window,
        tol: args.tol,
        trials: args.trials,
        seed: args.seed,
    };
    let report = analyze(&psi, p, q, &cfg)?;
    if args.machine {
        print_json(&report)
    } else {
        print!("{}", report.render_text());
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct WitnessReport {
    case: OperatorCase,
    witness_level: usize,
    /// Indicator value the witness is expected to attain.
    b_value: f64,
    observed_ratio: f64,
    attained: bool,
    tolerance: f64,
    /// Nonzero witness entries as `(level, index, re, im)`.
    function: Vec<(usize, usize, f64, f64)>,
}

fn cmd_witness(args: &WitnessArgs) -> Result<(), CliError> {
    let tree = args.tree.load()?;
    let psi = args.symbol.load(&tree)?;
    let p = parse_exponent(&args.p)?;
    let q = parse_exponent(&args.q)?;
    let seq = indicator_sequence(&psi, p, q);
    if args.level > tree.depth() {
        return Err(CliError::Usage(format!(
            "--level {} exceeds tree depth {}",
            args.level,
            tree.depth()
        )));
    }
    let witness = witness_function(&psi, p, q, args.level)?;
    let observed = ratio(&psi, &witness, p, q)?;
    let b_value = seq.values[args.level];
    let report = WitnessReport {
        case: seq.case,
        witness_level: args.level,
        b_value,
        observed_ratio: observed,
        attained: treehardy::num::rel_close(observed, b_value, args.tol),
        tolerance: args.tol,
        function: witness
            .nonzero_entries()
            .map(|(v, z)| (v.level, v.index, z.re, z.im))
            .collect(),
    };
    if args.machine {
        return print_json(&report);
    }
    // Function text to stdout so it can be piped into --symbol; summary
    // on stderr.
    print!("{}", witness.to_text());
    eprintln!(
        "case {} level {}: b = {}, ratio = {}, attained: {}",
        report.case.label(),
        report.witness_level,
        report.b_value,
        report.observed_ratio,
        report.attained
    );
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let tree = args.tree.load()?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let cfg = CheckConfig {
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
        corrupt: args.corrupt,
    };
    let report = run_suites(&tree, &cfg)?;
    let failed = report.total_failed();
    if args.machine {
        print_json(&report)?;
    } else {
        for suite in &report.suites {
            println!(
                "{:<18} passed {:>5}  failed {:>5}",
                suite.name, suite.passed, suite.failed
            );
        }
        println!(
            "total: {} passed, {} failed",
            report.suites.iter().map(|s| s.passed).sum::<u64>(),
            failed
        );
    }
    if failed > 0 {
        return Err(CliError::SuiteFailure(failed));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenTree(args) => cmd_gen_tree(args),
        Command::Norm(args) => cmd_norm(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
