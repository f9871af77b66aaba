//! Seeded Monte Carlo sweep harness comparing the two schedules.
//!
//! A sweep evaluates every requested variant on the identical per-trial
//! signal set (paired design), so per-trial comparisons such as recovery
//! containment are exact. Per-trial RNG streams are derived from the master
//! seed by counter-based splitting; parallel and serial execution produce
//! identical statistics, and identical configs produce byte-identical CSV.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::{aggregate, percent_reduction, ComplexityReport, CostModel};
use crate::engine::{run_fipa, run_sipa, IpaConfig, ReconstructionResult, Variant};
use crate::signals::{generate_sparse, measure, SparseSignal};
use crate::tanner::{from_alist, FieldMode, MatrixSpec, TannerGraph};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Graph(#[from] crate::tanner::GraphError),
    #[error(transparent)]
    Alist(#[from] crate::tanner::AlistError),
    #[error(transparent)]
    Signal(#[from] crate::signals::SignalError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error("invalid sweep config: {0}")]
    Config(String),
}

/// Where the measurement matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixSource {
    Spec(MatrixSpec),
    AlistFile(PathBuf),
}

impl MatrixSource {
    pub fn load(&self) -> Result<TannerGraph, BenchError> {
        match self {
            MatrixSource::Spec(spec) => Ok(crate::tanner::generate_regular(spec)?),
            MatrixSource::AlistFile(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|source| BenchError::Io { path: path.clone(), source })?;
                Ok(from_alist(&text)?)
            }
        }
    }

    /// Short label used in output file names.
    pub fn label(&self) -> String {
        match self {
            MatrixSource::Spec(s) => format!("g{}r{}_m{}n{}", s.gamma, s.rho, s.m, s.n),
            MatrixSource::AlistFile(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "matrix".to_string()),
        }
    }
}

pub const DEFAULT_TRIALS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub source: MatrixSource,
    /// Sparsity points k/n; k = round(sparsity · n).
    pub sparsities: Vec<f64>,
    pub trials: usize,
    pub l_max: u32,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub mode: FieldMode,
}

impl SweepConfig {
    pub fn validate(&self, n: usize) -> Result<(), BenchError> {
        if self.trials < 1 {
            return Err(BenchError::Config("trials must be at least 1".into()));
        }
        if self.l_max < 1 {
            return Err(BenchError::Config("l_max must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(BenchError::Config("at least one variant is required".into()));
        }
        if self.sparsities.is_empty() {
            return Err(BenchError::Config("at least one sparsity point is required".into()));
        }
        for &s in &self.sparsities {
            if !(0.0..=1.0).contains(&s) {
                return Err(BenchError::Config(format!("sparsity {s} outside [0, 1]")));
            }
            let k = (s * n as f64).round() as usize;
            if k > n {
                return Err(BenchError::Config(format!("k={k} exceeds n={n}")));
            }
        }
        Ok(())
    }

    fn ipa_config(&self) -> IpaConfig {
        match self.mode {
            FieldMode::Binary => IpaConfig::binary(self.l_max),
            FieldMode::NonnegReal => IpaConfig::real(self.l_max),
        }
    }
}

/// Per-variant statistics at one sparsity point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub variant: Variant,
    pub successes: u64,
    pub pcr: f64,
    pub fer: f64,
    /// 95% normal-approximation half-width on the success proportion.
    pub ci_half_width: f64,
    pub mean_iterations: f64,
    pub mean_cn_to_vn: f64,
    pub mean_vn_to_cn: f64,
    pub complexity: ComplexityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sparsity: f64,
    pub k: usize,
    pub trials: usize,
    pub variants: Vec<VariantStats>,
    /// Trials where flooding succeeded but sequential failed; populated
    /// only when both variants run.
    pub containment_violations: Option<u64>,
}

impl SweepPoint {
    pub fn variant(&self, v: Variant) -> Option<&VariantStats> {
        self.variants.iter().find(|s| s.variant == v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub config: SweepConfig,
    pub n: usize,
    pub m: usize,
    pub gamma: usize,
    pub rho: usize,
    pub points: Vec<SweepPoint>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed splitting: independent streams per (point, trial,
/// purpose) without any shared RNG state.
pub fn derive_seed(master: u64, point: u64, trial: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(point ^ splitmix64(trial ^ splitmix64(stream))))
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    success: bool,
    iterations: u32,
    cn_to_vn: u64,
    vn_to_cn: u64,
}

fn outcome(result: &ReconstructionResult, x: &SparseSignal, mode: FieldMode) -> TrialOutcome {
    let success = match mode {
        FieldMode::Binary => result.x_hat == x.values(),
        FieldMode::NonnegReal => result
            .x_hat
            .iter()
            .zip(x.values())
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0)),
    };
    TrialOutcome {
        success,
        iterations: result.iterations_used,
        cn_to_vn: result.counters.cn_to_vn,
        vn_to_cn: result.counters.vn_to_cn,
    }
}

/// Runs the full sweep. Deterministic given the config, including under
/// parallel trial execution.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepStats, BenchError> {
    let graph = cfg.source.load()?;
    cfg.validate(graph.n())?;
    let (gamma, rho) = graph
        .declared_degrees()
        .unwrap_or((graph.max_vn_degree(), graph.max_cn_degree()));
    let ipa_cfg = cfg.ipa_config();
    let cost_model = CostModel::default();
    let mut points = Vec::with_capacity(cfg.sparsities.len());
    for (pi, &sparsity) in cfg.sparsities.iter().enumerate() {
        let k = (sparsity * graph.n() as f64).round() as usize;
        let outcomes: Vec<Vec<TrialOutcome>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let signal_seed = derive_seed(cfg.seed, pi as u64, trial as u64, 0);
                let schedule_seed = derive_seed(cfg.seed, pi as u64, trial as u64, 1);
                let mut signal_rng = ChaCha8Rng::seed_from_u64(signal_seed);
                let x = generate_sparse(graph.n(), k, cfg.mode, &mut signal_rng)
                    .expect("validated k <= n");
                let y = measure(&graph, &x).expect("generated signal matches graph");
                cfg.variants
                    .iter()
                    .map(|&variant| {
                        let result = match variant {
                            Variant::Flooding => run_fipa(&graph, &y, &ipa_cfg),
                            Variant::Sequential => {
                                let mut rng = ChaCha8Rng::seed_from_u64(schedule_seed);
                                run_sipa(&graph, &y, &ipa_cfg, &mut rng)
                            }
                        }
                        .expect("dimensions validated");
                        outcome(&result, &x, cfg.mode)
                    })
                    .collect()
            })
            .collect();

        let trials = cfg.trials as f64;
        let mut variants = Vec::with_capacity(cfg.variants.len());
        for (vi, &variant) in cfg.variants.iter().enumerate() {
            let successes = outcomes.iter().filter(|o| o[vi].success).count() as u64;
            let pcr = successes as f64 / trials;
            let fer = 1.0 - pcr;
            let ci_half_width = 1.96 * (pcr * (1.0 - pcr) / trials).sqrt();
            let mean_iterations =
                outcomes.iter().map(|o| o[vi].iterations as f64).sum::<f64>() / trials;
            let mean_cn_to_vn = outcomes.iter().map(|o| o[vi].cn_to_vn as f64).sum::<f64>() / trials;
            let mean_vn_to_cn = outcomes.iter().map(|o| o[vi].vn_to_cn as f64).sum::<f64>() / trials;
            let complexity = aggregate(mean_cn_to_vn, mean_vn_to_cn, gamma, rho, variant, &cost_model);
            variants.push(VariantStats {
                variant,
                successes,
                pcr,
                fer,
                ci_half_width,
                mean_iterations,
                mean_cn_to_vn,
                mean_vn_to_cn,
                complexity,
            });
        }
        let containment_violations = match (
            cfg.variants.iter().position(|&v| v == Variant::Flooding),
            cfg.variants.iter().position(|&v| v == Variant::Sequential),
        ) {
            (Some(fi), Some(si)) => {
                Some(outcomes.iter().filter(|o| o[fi].success && !o[si].success).count() as u64)
            }
            _ => None,
        };
        points.push(SweepPoint { sparsity, k, trials: cfg.trials, variants, containment_violations });
    }
    Ok(SweepStats {
        config: cfg.clone(),
        n: graph.n(),
        m: graph.m(),
        gamma,
        rho,
        points,
    })
}

/// One row per (variant, sparsity) with message counts, complexity, and
/// reconstruction statistics.
pub fn emit_csv(stats: &SweepStats) -> String {
    let mut out = String::from(
        "variant,sparsity,k,trials,cn_to_vn_msgs,vn_to_cn_msgs,total_ops,pcr,fer,ci_half_width,mean_iterations\n",
    );
    for point in &stats.points {
        for vs in &point.variants {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                vs.variant,
                point.sparsity,
                point.k,
                point.trials,
                vs.mean_cn_to_vn,
                vs.mean_vn_to_cn,
                vs.complexity.total_ops,
                vs.pcr,
                vs.fer,
                vs.ci_half_width,
                vs.mean_iterations,
            ));
        }
    }
    out
}

/// Complexity comparison table with columns in the row order of the
/// message/complexity summary: CN→VN and VN→CN message averages for each
/// schedule, the two operation totals, and the percent reduction.
/// Requires both variants in the sweep.
pub fn emit_table_csv(stats: &SweepStats) -> Option<String> {
    let mut out = String::from(
        "sparsity,cn_to_vn_fld,cn_to_vn_seq,vn_to_cn_fld,vn_to_cn_seq,complexity_fld,complexity_seq,pct_reduction\n",
    );
    for point in &stats.points {
        let fld = point.variant(Variant::Flooding)?;
        let seq = point.variant(Variant::Sequential)?;
        let reduction = percent_reduction(&fld.complexity, &seq.complexity).ok()?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            point.sparsity,
            fld.mean_cn_to_vn,
            seq.mean_cn_to_vn,
            fld.mean_vn_to_cn,
            seq.mean_vn_to_cn,
            fld.complexity.total_ops,
            seq.complexity.total_ops,
            reduction,
        ));
    }
    Some(out)
}

/// Two-column (sparsity, pcr) series for one variant, for plotting
/// PCR-vs-sparsity curves.
pub fn emit_pcr_series(stats: &SweepStats, variant: Variant) -> String {
    let mut out = String::from("sparsity,pcr\n");
    for point in &stats.points {
        if let Some(vs) = point.variant(variant) {
            out.push_str(&format!("{},{}\n", point.sparsity, vs.pcr));
        }
    }
    out
}

/// JSON mirror of the full stats, config echo included.
pub fn emit_json(stats: &SweepStats) -> String {
    serde_json::to_string_pretty(stats).expect("serializing sweep stats")
}

/// Writes every output file into `dir`; names embed matrix label, seed,
/// and ℓ_max. Returns the paths written.
pub fn write_outputs(stats: &SweepStats, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    let base = format!(
        "sweep_{}_seed{}_lmax{}",
        stats.config.source.label(),
        stats.config.seed,
        stats.config.l_max
    );
    let mut written = Vec::new();
    let mut write = |name: String, content: String| -> Result<(), BenchError> {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|source| BenchError::Io { path: path.clone(), source })?;
        written.push(path);
        Ok(())
    };
    write(format!("{base}.csv"), emit_csv(stats))?;
    write(format!("{base}.json"), emit_json(stats))?;
    if let Some(table) = emit_table_csv(stats) {
        write(format!("{base}_table.csv"), table)?;
    }
    for vs in &stats.config.variants {
        write(format!("{base}_pcr_{vs}.csv"), emit_pcr_series(stats, *vs))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            source: MatrixSource::Spec(MatrixSpec {
                gamma: 3,
                rho: 6,
                n: 30,
                m: 15,
                seed: 1,
                field_mode: FieldMode::Binary,
            }),
            sparsities: vec![0.0, 0.1],
            trials: 50,
            l_max: 20,
            seed: 7,
            variants: vec![Variant::Flooding, Variant::Sequential],
            mode: FieldMode::Binary,
        }
    }

    #[test]
    fn zero_sparsity_always_recovers() {
        let stats = run_sweep(&small_config()).unwrap();
        let point = &stats.points[0];
        for vs in &point.variants {
            assert_eq!(vs.pcr, 1.0, "{} failed at k=0", vs.variant);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = small_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(emit_csv(&a), emit_csv(&b));
    }

    #[test]
    fn paired_trials_never_violate_containment() {
        let stats = run_sweep(&small_config()).unwrap();
        for point in &stats.points {
            assert_eq!(point.containment_violations, Some(0));
        }
    }

    #[test]
    fn csv_has_one_row_per_variant_and_sparsity() {
        let stats = run_sweep(&small_config()).unwrap();
        let csv = emit_csv(&stats);
        assert_eq!(csv.lines().count(), 1 + 2 * 2);
        let table = emit_table_csv(&stats).unwrap();
        assert!(table.starts_with("sparsity,cn_to_vn_fld,cn_to_vn_seq,vn_to_cn_fld,vn_to_cn_seq,"));
        assert_eq!(table.lines().count(), 1 + 2);
    }

    #[test]
    fn json_round_trips() {
        let stats = run_sweep(&small_config()).unwrap();
        let parsed: SweepStats = serde_json::from_str(&emit_json(&stats)).unwrap();
        assert_eq!(parsed, stats);
    }

    #[test]
    fn outputs_are_written_with_descriptive_names() {
        let stats = run_sweep(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&stats, dir.path()).unwrap();
        assert!(files.iter().all(|p| p.exists()));
        let csv = files
            .iter()
            .find(|p| p.file_name().unwrap().to_string_lossy() == "sweep_g3r6_m15n30_seed7_lmax20.csv");
        assert!(csv.is_some(), "unexpected names: {files:?}");
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small_config();
        cfg.trials = 0;
        assert!(matches!(run_sweep(&cfg), Err(BenchError::Config(_))));
        let mut cfg = small_config();
        cfg.sparsities = vec![1.5];
        assert!(matches!(run_sweep(&cfg), Err(BenchError::Config(_))));
    }

    #[test]
    fn derived_seeds_differ_across_streams() {
        let a = derive_seed(1, 0, 0, 0);
        let b = derive_seed(1, 0, 0, 1);
        let c = derive_seed(1, 0, 1, 0);
        let d = derive_seed(2, 0, 0, 0);
        assert!(a != b && a != c && a != d && b != c);
    }
}
