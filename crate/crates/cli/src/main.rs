//! `maxcover`: generate instances, solve them, and run the verification
//! suites. Exit status is 0 on success, 1 when a verification fails and 2
//! on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxcover::baselines::{brute_force_optimum_capped, exact_greedy, DEFAULT_SUBSET_CAP};
use maxcover::harness::bench::{bench, counters_independent_of_m, write_bench};
use maxcover::harness::generate::{
    disjoint_instance, overlap_chain_instance, random_instance, rectangle_instance, twin_instances,
};
use maxcover::harness::solve::{solve, write_reports, write_timings, SolveConfig};
use maxcover::harness::verify::{run_suite, Suite, VerifyOptions};
use maxcover::harness::InstanceFile;
use maxcover::{BackendKind, BiasProfile, CoverError, GreedyParams, Strategy};

#[derive(Parser)]
#[command(
    name = "maxcover",
    version,
    about = "Randomized greedy maximum coverage over black-box sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Run the approximation algorithm on an instance file and print a CSV report.
    Solve(SolveArgs),
    /// Print the brute-force optimum and the classical greedy solution.
    Exact(ExactArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Measure cost counters on disjoint instances of growing set size.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Output {
    /// Destination file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Sets of random size drawn from {1..universe}.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        universe: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// `n` pairwise disjoint sets of `m` elements.
    Disjoint {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Sets of `m` elements where neighbours overlap by half.
    OverlapChain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Axis-aligned lattice rectangles.
    Rectangles {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        span: i64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// The twin lists L (all sets equal) and L' (d disjoint blocks hidden among them).
    Twin {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination of L.
        #[arg(long)]
        out: PathBuf,
        /// Destination of L'.
        #[arg(long)]
        out_prime: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Multi,
    Single,
    SingleSort,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Multi => Strategy::MultiRound,
            StrategyArg::Single => Strategy::SingleRound,
            StrategyArg::SingleSort => Strategy::SingleRoundSortOnSelect,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sorted,
    Unsorted,
    Btree,
    Hash,
    Rect,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Sorted => BackendKind::Sorted,
            BackendArg::Unsorted => BackendKind::Unsorted,
            BackendArg::Btree => BackendKind::BTree,
            BackendArg::Hash => BackendKind::Hash,
            BackendArg::Rect => BackendKind::Rectangle,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Accuracy {
    /// Target accuracy; the per-estimate accuracy is derived from it.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Per-estimate accuracy, used directly.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Args)]
struct AlgorithmArgs {
    #[command(flatten)]
    accuracy: Accuracy,
    /// Failure probability.
    #[arg(long, default_value_t = 0.25)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "single")]
    strategy: StrategyArg,
}

impl AlgorithmArgs {
    fn params(&self, k: usize, bias: &BiasProfile) -> maxcover::Result<GreedyParams> {
        let strategy = self.strategy.into();
        match (self.accuracy.epsilon, self.accuracy.xi) {
            (Some(eps), _) => GreedyParams::from_epsilon(eps, self.gamma, bias.beta(), k, strategy),
            (None, Some(xi)) => GreedyParams::with_xi(xi, self.gamma, k, strategy),
            (None, None) => unreachable!("clap requires one of --epsilon and --xi"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    file: PathBuf,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    /// Overrides the budget stored in the file.
    #[arg(long)]
    k: Option<usize>,
    /// Set representation; the file's natural one when omitted.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Worker threads across trials (0 = sequential).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write per-trial wall-clock times to this CSV file.
    #[arg(long)]
    timings: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    file: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Largest number of k-subsets brute force may enumerate.
    #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
    cap: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Ratio,
    Sandwich,
    Counters,
    Uniformity,
    Reduction,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Overrides the suite's trial count.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = VerifyOptions::default().xi)]
    xi: f64,
    #[arg(long, default_value_t = VerifyOptions::default().gamma)]
    gamma: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Comma-separated set sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    sizes: Vec<u64>,
    #[arg(long, value_enum, default_value = "sorted")]
    backend: BackendArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Why a command did not succeed.
enum Failure {
    Verification,
    Input(String),
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn generate(kind: GenerateKind) -> Result<(), Failure> {
    let (file, out) = match kind {
        GenerateKind::Random {
            n,
            max_size,
            universe,
            k,
            seed,
            output,
        } => (random_instance(n, max_size, universe, k, seed)?, output.out),
        GenerateKind::Disjoint { n, m, k, seed, output } => (disjoint_instance(n, m, k, seed)?, output.out),
        GenerateKind::OverlapChain { n, m, k, seed, output } => (overlap_chain_instance(n, m, k, seed)?, output.out),
        GenerateKind::Rectangles {
            n,
            dim,
            span,
            k,
            seed,
            output,
        } => (rectangle_instance(n, dim, span, k, seed)?, output.out),
        GenerateKind::Twin {
            n,
            m,
            d,
            k,
            seed,
            out,
            out_prime,
        } => {
            let pair = twin_instances(n, m, d, k, seed)?;
            write_text(Some(&out), &pair.l.emit())?;
            write_text(Some(&out_prime), &pair.l_prime.emit())?;
            let blocks = pair
                .block_indices
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            eprintln!("block indices in L': {blocks}");
            return Ok(());
        }
    };
    write_text(out.as_deref(), &file.emit())
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let mut file = read_instance(&args.file)?;
    if let Some(k) = args.k {
        file.k = k;
    }
    let params = args.algorithm.params(file.k, &file.bias)?;
    let backend = args.backend.map_or_else(|| file.natural_backend(), BackendKind::from);
    let mut config = SolveConfig::new(params, backend, args.seed, args.trials);
    config.threads = args.threads;
    let reports = solve(&file, &config)?;
    write_reports(&reports, &config, io::stdout().lock())?;
    if let Some(path) = args.timings {
        let f = fs::File::create(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        write_timings(&reports, f)?;
    }
    Ok(())
}

fn run_exact(args: ExactArgs) -> Result<(), Failure> {
    let mut file = read_instance(&args.file)?;
    if let Some(k) = args.k {
        file.k = k;
    }
    let sets = file.build(file.natural_backend())?.materialize();
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["method", "selected", "coverage"])?;
    let optimum = brute_force_optimum_capped(&sets, file.k, args.cap)?;
    let greedy = exact_greedy(&sets, file.k)?;
    for (name, s) in [("brute-force", optimum), ("greedy", greedy)] {
        let selected = s.indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        w.write_record([name.to_string(), selected, s.coverage.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let suites = match args.suite {
        SuiteArg::Ratio => vec![Suite::Ratio],
        SuiteArg::Sandwich => vec![Suite::Sandwich],
        SuiteArg::Counters => vec![Suite::Counters],
        SuiteArg::Uniformity => vec![Suite::Uniformity],
        SuiteArg::Reduction => vec![Suite::Reduction],
        SuiteArg::All => vec![
            Suite::Ratio,
            Suite::Sandwich,
            Suite::Counters,
            Suite::Uniformity,
            Suite::Reduction,
        ],
    };
    let opts = VerifyOptions {
        seed: args.seed,
        trials: args.trials,
        xi: args.xi,
        gamma: args.gamma,
    };
    let mut passed = true;
    let mut out = io::stdout().lock();
    for suite in suites {
        let report = run_suite(suite, &opts)?;
        for c in &report.checks {
            writeln!(out, "{}: {c}", suite.name())?;
        }
        passed &= report.passed();
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_bench(args: BenchArgs) -> Result<(), Failure> {
    let params = args.algorithm.params(args.k, &BiasProfile::zero())?;
    let rows = bench(args.n, &params, &args.sizes, args.backend.into(), args.seed)?;
    write_bench(&rows, io::stdout().lock())?;
    if counters_independent_of_m(&rows) {
        Ok(())
    } else {
        eprintln!("cost counters differ across set sizes");
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { kind } => generate(kind),
        Command::Solve(args) => run_solve(args),
        Command::Exact(args) => run_exact(args),
        Command::Verify(args) => run_verify(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
