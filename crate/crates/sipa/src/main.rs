//! Command-line front end: matrix generation, single reconstructions,
//! variant comparison, Monte Carlo sweeps, and the exhaustive oracle.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sipa::bench::{self, derive_seed, MatrixSource, SweepConfig};
use sipa::engine::{
    run_fipa, run_fipa_observed, run_sipa, run_sipa_observed, IpaConfig, MonotoneChecker, Observer,
    ReconstructionResult, SnapshotObserver, TraceRecord, TraceWriter, Variant,
};
use sipa::oracle::l0_exhaustive;
use sipa::signals::{generate_sparse, measure, SparseSignal};
use sipa::tanner::{from_alist, generate_regular, to_alist, FieldMode, MatrixSpec, TannerGraph};

#[derive(Parser)]
#[command(
    name = "sipa",
    version,
    about = "Interval-passing reconstruction of sparse non-negative signals over LDPC measurement matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a (gamma,rho)-regular measurement matrix and write it as alist.
    Gen(GenArgs),
    /// Reconstruct one planted signal with a single variant.
    Run(RunArgs),
    /// Run both variants on one instance and report the cross-variant invariants.
    Compare(CompareArgs),
    /// Monte Carlo sweep over sparsities producing CSV/JSON results.
    Bench(BenchArgs),
    /// Exhaustive minimum-support search on a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// {0,1} matrix entries and signal amplitudes.
    Binary,
    /// Non-negative real entries and amplitudes.
    Real,
}

impl From<ModeArg> for FieldMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Binary => FieldMode::Binary,
            ModeArg::Real => FieldMode::NonnegReal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Fipa,
    Sipa,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Fipa => Variant::Flooding,
            VariantArg::Sipa => Variant::Sequential,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// VN (column) degree.
    #[arg(long)]
    gamma: usize,
    /// CN (row) degree.
    #[arg(long)]
    rho: usize,
    /// Number of columns (signal length).
    #[arg(long)]
    n: usize,
    /// Number of rows (measurements).
    #[arg(long)]
    m: usize,
    /// Construction seed; identical seeds give identical matrices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
    mode: ModeArg,
    /// Output alist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InstanceArgs {
    /// Measurement matrix in alist format.
    #[arg(long)]
    matrix: PathBuf,
    /// Exact number of non-zero signal entries.
    #[arg(long, conflicts_with = "sparsity")]
    k: Option<usize>,
    /// Fraction k/n of non-zero entries; k = round(sparsity * n).
    #[arg(long)]
    sparsity: Option<f64>,
    /// Master seed for signal (and schedule) randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum iteration bound l_max; at most l_max - 1 sweeps run.
    #[arg(long, default_value_t = 50)]
    lmax: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
    mode: ModeArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Write a per-message trace (iteration, time, cn, vn, direction, bounds).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Exit with code 1 unless the planted signal is recovered exactly.
    #[arg(long)]
    expect_success: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Measurement matrix in alist format; alternatively give a spec via
    /// --gamma/--rho/--n/--m/--matrix-seed.
    #[arg(long, conflicts_with_all = ["gamma", "rho", "n", "m", "matrix_seed"])]
    matrix: Option<PathBuf>,
    #[arg(long, requires_all = ["rho", "n", "m"])]
    gamma: Option<usize>,
    #[arg(long)]
    rho: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Seed for spec-based matrix generation.
    #[arg(long, default_value_t = 0)]
    matrix_seed: u64,
    /// Comma-separated sparsity fractions, e.g. 0.06,0.10,0.14.
    #[arg(long, conflicts_with = "ks", value_delimiter = ',')]
    sparsities: Option<Vec<f64>>,
    /// Comma-separated exact support sizes, e.g. 42,70,98.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    /// Monte Carlo trials per sparsity point.
    #[arg(long, default_value_t = bench::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 50)]
    lmax: u32,
    /// Master sweep seed (echoed in the JSON output).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; defaults to $SIPA_OUT_DIR or ./results.
    #[arg(long, env = "SIPA_OUT_DIR", default_value = "results")]
    out: PathBuf,
    /// Variant to run; omit to run both.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
    mode: ModeArg,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Largest support size to search; defaults to the planted k.
    #[arg(long)]
    kmax: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<TannerGraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    from_alist(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_k(n: usize, k: Option<usize>, sparsity: Option<f64>) -> Result<usize, String> {
    let k = match (k, sparsity) {
        (Some(k), None) => k,
        (None, Some(s)) => {
            if !(0.0..=1.0).contains(&s) {
                return Err(format!("sparsity {s} outside [0, 1]"));
            }
            (s * n as f64).round() as usize
        }
        (None, None) => return Err("one of --k or --sparsity is required".into()),
        (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
    };
    if k > n {
        return Err(format!("k={k} exceeds signal length n={n}"));
    }
    Ok(k)
}

fn plant_instance(
    graph: &TannerGraph,
    inst: &InstanceArgs,
) -> Result<(SparseSignal, sipa::signals::Measurement, usize), String> {
    let k = resolve_k(graph.n(), inst.k, inst.sparsity)?;
    let mut signal_rng = ChaCha8Rng::seed_from_u64(derive_seed(inst.seed, 0, 0, 0));
    let x = generate_sparse(graph.n(), k, inst.mode.into(), &mut signal_rng)
        .map_err(|e| e.to_string())?;
    let y = measure(graph, &x).map_err(|e| e.to_string())?;
    Ok((x, y, k))
}

fn ipa_config(mode: ModeArg, lmax: u32) -> IpaConfig {
    match mode {
        ModeArg::Binary => IpaConfig::binary(lmax),
        ModeArg::Real => IpaConfig::real(lmax),
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    let spec = MatrixSpec {
        gamma: args.gamma,
        rho: args.rho,
        n: args.n,
        m: args.m,
        seed: args.seed,
        field_mode: args.mode.into(),
    };
    let graph = generate_regular(&spec).map_err(|e| e.to_string())?;
    fs::write(&args.out, to_alist(&graph))
        .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    eprintln!(
        "wrote ({},{})-regular {}x{} matrix (seed {}) to {}",
        args.gamma,
        args.rho,
        args.m,
        args.n,
        args.seed,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RunReport {
    variant: Variant,
    seed: u64,
    k: usize,
    iterations_used: u32,
    fully_converged: bool,
    success: bool,
    cn_to_vn_msgs: u64,
    vn_to_cn_msgs: u64,
    x_hat: Vec<f64>,
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, String> {
    let graph = load_graph(&args.instance.matrix)?;
    let (x, y, k) = plant_instance(&graph, &args.instance)?;
    let cfg = ipa_config(args.instance.mode, args.instance.lmax);
    let variant: Variant = args.variant.into();
    let schedule_seed = derive_seed(args.instance.seed, 0, 0, 1);

    let mut trace_file = match &args.trace {
        Some(path) => Some(BufWriter::new(
            fs::File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?,
        )),
        None => None,
    };
    let result = run_variant(&graph, &y, &cfg, variant, schedule_seed, trace_file.as_mut())?;
    if let Some(w) = trace_file.as_mut() {
        w.flush().map_err(|e| e.to_string())?;
    }

    let success = result.x_hat == x.values();
    let report = RunReport {
        variant,
        seed: args.instance.seed,
        k,
        iterations_used: result.iterations_used,
        fully_converged: result.fully_converged(),
        success,
        cn_to_vn_msgs: result.counters.cn_to_vn,
        vn_to_cn_msgs: result.counters.vn_to_cn,
        x_hat: result.x_hat,
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    if args.expect_success && !success {
        eprintln!("reconstruction did not recover the planted signal");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_variant(
    graph: &TannerGraph,
    y: &sipa::signals::Measurement,
    cfg: &IpaConfig,
    variant: Variant,
    schedule_seed: u64,
    trace: Option<&mut BufWriter<fs::File>>,
) -> Result<ReconstructionResult, String> {
    let run = |observer: &mut dyn Observer| match variant {
        Variant::Flooding => run_fipa_observed(graph, y, cfg, observer),
        Variant::Sequential => {
            let mut rng = ChaCha8Rng::seed_from_u64(schedule_seed);
            run_sipa_observed(graph, y, cfg, &mut rng, observer)
        }
    };
    let result = match trace {
        Some(sink) => {
            let mut writer = TraceWriter::new(graph, sink);
            let result = run(&mut writer);
            if let Some(e) = writer.error {
                return Err(format!("trace write failed: {e}"));
            }
            result
        }
        None => match variant {
            Variant::Flooding => run_fipa(graph, y, cfg),
            Variant::Sequential => {
                let mut rng = ChaCha8Rng::seed_from_u64(schedule_seed);
                run_sipa(graph, y, cfg, &mut rng)
            }
        },
    };
    result.map_err(|e| e.to_string())
}

/// Snapshot + monotonicity checks in one pass.
struct CompareObserver {
    snapshots: SnapshotObserver,
    monotone: MonotoneChecker,
}

impl Observer for CompareObserver {
    fn on_message(&mut self, r: &TraceRecord) {
        self.monotone.on_message(r);
    }
    fn on_iteration_end(&mut self, iteration: u32, state: &sipa::engine::MessageState) {
        self.snapshots.on_iteration_end(iteration, state);
    }
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, String> {
    let graph = load_graph(&args.instance.matrix)?;
    let (x, y, k) = plant_instance(&graph, &args.instance)?;
    let cfg = ipa_config(args.instance.mode, args.instance.lmax);
    let slack = match args.instance.mode {
        ModeArg::Binary => 0.0,
        ModeArg::Real => 1e-9,
    };

    let mut fipa_obs = CompareObserver {
        snapshots: SnapshotObserver::default(),
        monotone: MonotoneChecker::new(graph.num_edges(), slack),
    };
    let fipa = run_fipa_observed(&graph, &y, &cfg, &mut fipa_obs).map_err(|e| e.to_string())?;

    let mut sipa_obs = CompareObserver {
        snapshots: SnapshotObserver::default(),
        monotone: MonotoneChecker::new(graph.num_edges(), slack),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(args.instance.seed, 0, 0, 1));
    let sipa = run_sipa_observed(&graph, &y, &cfg, &mut rng, &mut sipa_obs).map_err(|e| e.to_string())?;

    let mut dominance_violations = 0u64;
    let mut zero_subset_violations = 0u64;
    let common = fipa_obs.snapshots.per_iteration.len().min(sipa_obs.snapshots.per_iteration.len());
    for l in 0..common {
        let f = &fipa_obs.snapshots.per_iteration[l];
        let s = &sipa_obs.snapshots.per_iteration[l];
        for e in 0..graph.num_edges() {
            if s.vn_to_cn[e].upper > f.vn_to_cn[e].upper + slack
                || s.cn_to_vn[e].lower < f.cn_to_vn[e].lower - slack
            {
                dominance_violations += 1;
            }
            if s.vn_to_cn[e].lower <= slack && f.vn_to_cn[e].lower > slack {
                zero_subset_violations += 1;
            }
        }
    }
    let fipa_success = fipa.x_hat == x.values();
    let sipa_success = sipa.x_hat == x.values();
    let containment_ok = !fipa_success || sipa_success;

    println!("instance: n={} m={} k={} seed={}", graph.n(), graph.m(), k, args.instance.seed);
    println!(
        "fipa: success={} iterations={} cn_to_vn={} vn_to_cn={}",
        fipa_success, fipa.iterations_used, fipa.counters.cn_to_vn, fipa.counters.vn_to_cn
    );
    println!(
        "sipa: success={} iterations={} cn_to_vn={} vn_to_cn={}",
        sipa_success, sipa.iterations_used, sipa.counters.cn_to_vn, sipa.counters.vn_to_cn
    );
    println!("bound dominance violations (over {common} shared iterations): {dominance_violations}");
    println!("zero-lower-bound subset violations: {zero_subset_violations}");
    println!(
        "monotone bound violations: fipa={} sipa={}",
        fipa_obs.monotone.violations, sipa_obs.monotone.violations
    );
    println!("recovery containment (fipa success implies sipa success): {}", if containment_ok { "ok" } else { "VIOLATED" });

    let clean = dominance_violations == 0
        && zero_subset_violations == 0
        && fipa_obs.monotone.violations == 0
        && sipa_obs.monotone.violations == 0
        && containment_ok;
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    let source = match (&args.matrix, args.gamma) {
        (Some(path), None) => MatrixSource::AlistFile(path.clone()),
        (None, Some(gamma)) => MatrixSource::Spec(MatrixSpec {
            gamma,
            rho: args.rho.expect("clap requires rho"),
            n: args.n.expect("clap requires n"),
            m: args.m.expect("clap requires m"),
            seed: args.matrix_seed,
            field_mode: args.mode.into(),
        }),
        _ => return Err("give either --matrix or a full --gamma/--rho/--n/--m spec".into()),
    };
    // Resolve --ks into fractions against the loaded matrix size.
    let sparsities = match (&args.sparsities, &args.ks) {
        (Some(s), None) => s.clone(),
        (None, Some(ks)) => {
            let n = source.load().map_err(|e| e.to_string())?.n();
            ks.iter().map(|&k| k as f64 / n as f64).collect()
        }
        (None, None) => return Err("one of --sparsities or --ks is required".into()),
        (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
    };
    let variants = match args.variant {
        None => vec![Variant::Flooding, Variant::Sequential],
        Some(v) => vec![v.into()],
    };
    let cfg = SweepConfig {
        source,
        sparsities,
        trials: args.trials,
        l_max: args.lmax,
        seed: args.seed,
        variants,
        mode: args.mode.into(),
    };
    let stats = bench::run_sweep(&cfg).map_err(|e| e.to_string())?;
    let files = bench::write_outputs(&stats, &args.out).map_err(|e| e.to_string())?;
    eprintln!("sweep complete: seed {} over {} sparsity points", cfg.seed, stats.points.len());
    for f in files {
        println!("{}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleReport {
    seed: u64,
    planted_support: Vec<usize>,
    min_support: usize,
    solutions: Vec<Vec<f64>>,
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, String> {
    let graph = load_graph(&args.instance.matrix)?;
    let (x, y, k) = plant_instance(&graph, &args.instance)?;
    let k_max = args.kmax.unwrap_or(k);
    let sol = l0_exhaustive(&graph, &y, k_max, args.instance.mode.into()).map_err(|e| e.to_string())?;
    let report = OracleReport {
        seed: args.instance.seed,
        planted_support: x.support().to_vec(),
        min_support: sol.min_support,
        solutions: sol.solutions,
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    Ok(ExitCode::SUCCESS)
}
