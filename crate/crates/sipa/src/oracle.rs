//! Ground truth for desk-scale verification: exhaustive minimum-support
//! search and a naive dense re-implementation of both engines for
//! differential testing.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{IpaConfig, MessageCounters, ReconstructionResult, Tolerance, Variant};
use crate::signals::Measurement;
use crate::tanner::{FieldMode, TannerGraph};

/// Exhaustive search is capped to keep the support enumeration tractable.
pub const MAX_ORACLE_N: usize = 25;

const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("signal length {n} exceeds the exhaustive-search cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no consistent solution with support size at most {k_max}")]
    NoSolution { k_max: usize },
    #[error("measurement has {got} entries but matrix has {expected} rows")]
    DimensionMismatch { got: usize, expected: usize },
}

/// All minimum-support non-negative solutions of y = Ax.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub solutions: Vec<Vec<f64>>,
    pub min_support: usize,
}

/// Enumerates supports of size 0, 1, ..., `k_max` in lexicographic order;
/// the first size admitting any consistent assignment wins and every
/// solution of that size is returned. Binary mode checks the 0/1
/// assignment exactly; real mode solves the restricted least-squares
/// system and accepts non-negative solutions with per-entry residual
/// within 1e-9.
pub fn l0_exhaustive(
    graph: &TannerGraph,
    y: &Measurement,
    k_max: usize,
    mode: FieldMode,
) -> Result<OracleSolution, OracleError> {
    let n = graph.n();
    if n > MAX_ORACLE_N {
        return Err(OracleError::TooLarge { n, cap: MAX_ORACLE_N });
    }
    if y.m() != graph.m() {
        return Err(OracleError::DimensionMismatch { got: y.m(), expected: graph.m() });
    }
    let a = graph.to_dense();
    for size in 0..=k_max.min(n) {
        let mut solutions = Vec::new();
        for support in (0..n).combinations(size) {
            if let Some(x) = solve_on_support(&a, y.values(), &support, mode) {
                solutions.push(x);
            }
        }
        if !solutions.is_empty() {
            return Ok(OracleSolution { solutions, min_support: size });
        }
    }
    Err(OracleError::NoSolution { k_max })
}

fn solve_on_support(a: &[Vec<f64>], y: &[f64], support: &[usize], mode: FieldMode) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    match mode {
        FieldMode::Binary => {
            let mut x = vec![0.0; n];
            for &v in support {
                x[v] = 1.0;
            }
            for c in 0..m {
                let yc: f64 = support.iter().map(|&v| a[c][v]).sum();
                if yc != y[c] {
                    return None;
                }
            }
            Some(x)
        }
        FieldMode::NonnegReal => {
            if support.is_empty() {
                return y.iter().all(|&v| v.abs() <= CONSISTENCY_TOL).then(|| vec![0.0; n]);
            }
            let cols = DMatrix::from_fn(m, support.len(), |r, c| a[r][support[c]]);
            let b = DVector::from_column_slice(y);
            let svd = cols.svd(true, true);
            let sol = svd.solve(&b, 1e-12).ok()?;
            if sol.iter().any(|&v| v < -CONSISTENCY_TOL) {
                return None;
            }
            let mut x = vec![0.0; n];
            for (i, &v) in support.iter().enumerate() {
                x[v] = sol[i].max(0.0);
            }
            for c in 0..m {
                let yc: f64 = support.iter().map(|&v| a[c][v] * x[v]).sum();
                if (yc - y[c]).abs() > CONSISTENCY_TOL {
                    return None;
                }
            }
            Some(x)
        }
    }
}

/// Dense-cap for the reference engine; it loops over full rows and columns.
pub const MAX_REFERENCE_N: usize = 50;

/// Naive dense re-implementation of the interval-passing engines: full
/// m×n loops, no sparsity shortcuts. Given the same schedule seed its
/// output must match the sparse engines bit-for-bit in binary mode.
pub fn reference_dense_ipa(
    a: &[Vec<f64>],
    y: &[f64],
    cfg: &IpaConfig,
    variant: Variant,
    schedule_seed: u64,
) -> Result<ReconstructionResult, OracleError> {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if n > MAX_REFERENCE_N {
        return Err(OracleError::TooLarge { n, cap: MAX_REFERENCE_N });
    }
    if y.len() != m {
        return Err(OracleError::DimensionMismatch { got: y.len(), expected: m });
    }
    let present = |c: usize, v: usize| a[c][v] > 0.0;

    let mut mu_cv = vec![vec![0.0f64; n]; m];
    let mut mm_cv = vec![vec![0.0f64; n]; m];
    let mut mu_vc = vec![vec![0.0f64; n]; m]; // indexed [c][v], lower bound of v -> c
    let mut mm_vc = vec![vec![f64::INFINITY; n]; m];
    for c in 0..m {
        for v in 0..n {
            if present(c, v) {
                mm_cv[c][v] = y[c] / a[c][v];
            }
        }
    }

    let matched = |lo: f64, hi: f64| cfg.tolerance.matched(lo, hi);
    let mut counters = MessageCounters::default();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule_seed);

    let mut x_hat = vec![0.0; n];
    let mut converged = vec![false; n];
    let mut inconsistent = vec![false; n];
    let mut iterations_used = 0;

    // Recomputes every outgoing message of VN v from the stored CN->VN
    // buffer. Returns the number of edges written.
    let vn_update = |v: usize,
                     mu_cv: &Vec<Vec<f64>>,
                     mm_cv: &Vec<Vec<f64>>,
                     mu_vc: &mut Vec<Vec<f64>>,
                     mm_vc: &mut Vec<Vec<f64>>,
                     gate: Option<u32>,
                     counters: &mut MessageCounters|
     -> u32 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in 0..m {
            if present(c, v) {
                lo = lo.max(mu_cv[c][v]);
                hi = hi.min(mm_cv[c][v]);
            }
        }
        let mut written = 0;
        for c in 0..m {
            if !present(c, v) {
                continue;
            }
            // A VN not yet updated this iteration refreshes every outgoing
            // edge; a revisit touches only edges with unmatched bounds.
            if let Some(p) = gate {
                if p > 0 && matched(mu_vc[c][v], mm_vc[c][v]) {
                    continue;
                }
            }
            mu_vc[c][v] = lo * a[c][v];
            mm_vc[c][v] = hi * a[c][v];
            counters.vn_to_cn += 1;
            written += 1;
        }
        written
    };

    let cn_update = |c: usize,
                     mu_vc: &Vec<Vec<f64>>,
                     mm_vc: &Vec<Vec<f64>>,
                     mu_cv: &mut Vec<Vec<f64>>,
                     mm_cv: &mut Vec<Vec<f64>>,
                     counters: &mut MessageCounters| {
        for v in 0..n {
            if !present(c, v) {
                continue;
            }
            let mut sum_upper = 0.0;
            let mut sum_lower = 0.0;
            for v2 in 0..n {
                if v2 != v && present(c, v2) {
                    sum_upper += mm_vc[c][v2];
                    sum_lower += mu_vc[c][v2];
                }
            }
            mu_cv[c][v] = ((y[c] - sum_upper) / a[c][v]).max(0.0);
            mm_cv[c][v] = (y[c] - sum_lower) / a[c][v];
            counters.cn_to_vn += 1;
        }
    };

    for iteration in 1..cfg.max_iterations {
        match variant {
            Variant::Flooding => {
                for v in 0..n {
                    vn_update(v, &mu_cv, &mm_cv, &mut mu_vc, &mut mm_vc, None, &mut counters);
                }
                for c in 0..m {
                    cn_update(c, &mu_vc, &mm_vc, &mut mu_cv, &mut mm_cv, &mut counters);
                }
            }
            Variant::Sequential => {
                let mut order: Vec<usize> = (0..m).collect();
                order.shuffle(&mut rng);
                let mut p = vec![0u32; n];
                for &c in &order {
                    for v in 0..n {
                        if present(c, v) {
                            p[v] += vn_update(
                                v,
                                &mu_cv,
                                &mm_cv,
                                &mut mu_vc,
                                &mut mm_vc,
                                Some(p[v]),
                                &mut counters,
                            );
                        }
                    }
                    cn_update(c, &mu_vc, &mm_vc, &mut mu_cv, &mut mm_cv, &mut counters);
                }
            }
        }
        iterations_used = iteration;
        let mut all = true;
        for v in 0..n {
            if converged[v] {
                continue;
            }
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for c in 0..m {
                if present(c, v) {
                    lo = lo.max(mu_cv[c][v]);
                    hi = hi.min(mm_cv[c][v]);
                }
            }
            let d = hi - lo;
            let eps = match cfg.tolerance {
                Tolerance::Exact => 0.0,
                Tolerance::Relative(r) => r * hi.max(1.0),
            };
            if d < -eps {
                inconsistent[v] = true;
                x_hat[v] = lo;
                all = false;
            } else if d <= eps {
                converged[v] = true;
                x_hat[v] = lo;
            } else {
                x_hat[v] = lo;
                all = false;
            }
        }
        if all {
            break;
        }
    }

    Ok(ReconstructionResult { x_hat, converged, inconsistent, iterations_used, counters })
}
