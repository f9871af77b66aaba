//! Interval-passing reconstruction engines.
//!
//! Every directed edge of the Tanner graph carries an interval [μ, M]
//! bounding the signal entry at its VN (scaled by the edge weight on the
//! VN→CN direction). The flooding engine updates all VN messages and then
//! all CN messages once per iteration; the sequential engine schedules CNs
//! one at a time per iteration with a fresh random permutation, so later
//! updates consume earlier same-iteration messages.
//!
//! Messages are stored single-buffer: each directed edge holds only its most
//! recent (μ, M), so a sequential update automatically reads the latest
//! available value whether the sender was scheduled earlier in this
//! iteration or in the previous one.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signals::Measurement;
use crate::tanner::TannerGraph;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("measurement has {got} entries but graph has {expected} check nodes")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("max_iterations must be at least 1")]
    InvalidIterationBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Flooding,
    Sequential,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Flooding => write!(f, "fipa"),
            Variant::Sequential => write!(f, "sipa"),
        }
    }
}

/// A closed interval bound [lower, upper] on a signal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }
}

/// When two bounds count as matched. Binary instances use exact equality;
/// real-valued instances need a floating-point guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tolerance {
    Exact,
    /// Matched when `upper - lower <= r · max(1, upper)`.
    Relative(f64),
}

impl Tolerance {
    fn eps(&self, upper: f64) -> f64 {
        match self {
            Tolerance::Exact => 0.0,
            Tolerance::Relative(r) => r * upper.max(1.0),
        }
    }

    /// True when the interval has collapsed (within tolerance).
    pub fn matched(&self, lower: f64, upper: f64) -> bool {
        upper - lower <= self.eps(upper)
    }
}

pub const DEFAULT_MAX_ITERATIONS: u32 = 50;
pub const DEFAULT_REAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpaConfig {
    /// ℓ_max. The loop runs while ℓ < ℓ_max, so at most ℓ_max − 1 sweeps.
    pub max_iterations: u32,
    pub tolerance: Tolerance,
    /// Experimental: exclude the target CN from the VN-side max/min. The
    /// algorithm ranges over every neighbor including the target.
    pub exclude_target: bool,
    /// Regression mode for the sequential engine: every update reads only
    /// previous-iteration values and the redundancy gate is disabled, which
    /// must reproduce the flooding trajectory exactly.
    pub frozen_iteration: bool,
}

impl IpaConfig {
    pub fn binary(max_iterations: u32) -> Self {
        Self {
            max_iterations,
            tolerance: Tolerance::Exact,
            exclude_target: false,
            frozen_iteration: false,
        }
    }

    pub fn real(max_iterations: u32) -> Self {
        Self {
            max_iterations,
            tolerance: Tolerance::Relative(DEFAULT_REAL_TOLERANCE),
            exclude_target: false,
            frozen_iteration: false,
        }
    }
}

impl Default for IpaConfig {
    fn default() -> Self {
        Self::binary(DEFAULT_MAX_ITERATIONS)
    }
}

/// Running totals of directed-edge bound-pair computations. One message is
/// one (μ, M) pair in one direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageCounters {
    pub cn_to_vn: u64,
    pub vn_to_cn: u64,
}

/// Per-directed-edge interval storage plus per-iteration bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    vn_to_cn: Vec<Interval>,
    cn_to_vn: Vec<Interval>,
    iteration: u32,
    /// p-counter: times each VN was updated during the current iteration
    /// (sequential schedule only).
    p: Vec<u32>,
    counters: MessageCounters,
}

impl MessageState {
    pub fn vn_to_cn(&self, edge: usize) -> Interval {
        self.vn_to_cn[edge]
    }

    pub fn cn_to_vn(&self, edge: usize) -> Interval {
        self.cn_to_vn[edge]
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn update_count(&self, v: usize) -> u32 {
        self.p[v]
    }

    pub fn counters(&self) -> MessageCounters {
        self.counters
    }

    pub fn num_edges(&self) -> usize {
        self.cn_to_vn.len()
    }

    #[cfg(test)]
    pub(crate) fn set_cn_to_vn(&mut self, edge: usize, iv: Interval) {
        self.cn_to_vn[edge] = iv;
    }
}

/// Initial message state: μ_{c→v} = 0 and M_{c→v} = y(c)/A[c][v] on every
/// edge; VN→CN storage starts at [0, ∞) and is first written during
/// iteration 1 before any CN update reads it.
pub fn init_messages(graph: &TannerGraph, y: &Measurement) -> Result<MessageState, EngineError> {
    if y.m() != graph.m() {
        return Err(EngineError::DimensionMismatch { got: y.m(), expected: graph.m() });
    }
    let mut cn_to_vn = Vec::with_capacity(graph.num_edges());
    for e in graph.edges() {
        cn_to_vn.push(Interval::new(0.0, y.value(e.cn) / e.weight));
    }
    Ok(MessageState {
        vn_to_cn: vec![Interval::new(0.0, f64::INFINITY); graph.num_edges()],
        cn_to_vn,
        iteration: 1,
        p: vec![0; graph.n()],
        counters: MessageCounters::default(),
    })
}

/// VN-side message: max of incoming lowers and min of incoming uppers,
/// both scaled by the outgoing edge weight. The max/min ranges over every
/// incoming message handed in, including the target CN's own.
pub fn vn_message(incoming: impl IntoIterator<Item = Interval>, weight: f64) -> Interval {
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for iv in incoming {
        lower = lower.max(iv.lower);
        upper = upper.min(iv.upper);
    }
    Interval::new(lower * weight, upper * weight)
}

/// CN-side message toward one VN, given the sums of the other incident
/// VN→CN bounds: μ = (y − Σ M)/A clipped at 0, M = (y − Σ μ)/A stored as
/// computed (a negative upper surfaces as an inconsistency flag, not an
/// error).
pub fn cn_message(y: f64, excluded_upper_sum: f64, excluded_lower_sum: f64, weight: f64) -> Interval {
    let lower = ((y - excluded_upper_sum) / weight).max(0.0);
    let upper = (y - excluded_lower_sum) / weight;
    Interval::new(lower, upper)
}

/// Per-VN consolidated interval: [max of stored incoming lowers, min of
/// stored incoming uppers]. Collapse decides x̂(v).
pub fn consolidate(graph: &TannerGraph, state: &MessageState, v: usize) -> (f64, f64) {
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for &e in graph.vn_edges(v) {
        let iv = state.cn_to_vn[e];
        lower = lower.max(iv.lower);
        upper = upper.min(iv.upper);
    }
    (lower, upper)
}

/// One iteration's CN visiting order plus the inverse map to scheduling
/// times t ∈ [m] (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    order: Vec<usize>,
    time_of: Vec<usize>,
}

impl Schedule {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn time_of(&self, cn: usize) -> usize {
        self.time_of[cn]
    }
}

/// Uniform random permutation of the m CNs; a fresh schedule is drawn for
/// every iteration.
pub fn make_schedule(rng: &mut impl Rng, m: usize) -> Schedule {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut time_of = vec![0; m];
    for (t, &c) in order.iter().enumerate() {
        time_of[c] = t + 1;
    }
    Schedule { order, time_of }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    VnToCn,
    CnToVn,
}

/// One computed message, as seen by an [`Observer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: u32,
    /// Scheduling time of the active CN; 0 under the flooding schedule.
    pub time: usize,
    pub edge: usize,
    pub direction: Direction,
    pub lower: f64,
    pub upper: f64,
}

/// Hook into a running reconstruction, used for trace emission and for the
/// invariant checks in the test suites.
pub trait Observer {
    fn on_message(&mut self, _record: &TraceRecord) {}
    fn on_iteration_end(&mut self, _iteration: u32, _state: &MessageState) {}
}

/// Observer that does nothing.
pub struct NoopObserver;

impl Observer for NoopObserver {}

/// End-of-iteration copy of every stored directed-edge interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSnapshot {
    pub vn_to_cn: Vec<Interval>,
    pub cn_to_vn: Vec<Interval>,
}

/// Records the stored message state at the end of each iteration, for
/// cross-variant comparisons.
#[derive(Debug, Default)]
pub struct SnapshotObserver {
    pub per_iteration: Vec<IterationSnapshot>,
}

impl Observer for SnapshotObserver {
    fn on_iteration_end(&mut self, _iteration: u32, state: &MessageState) {
        self.per_iteration.push(IterationSnapshot {
            vn_to_cn: state.vn_to_cn.clone(),
            cn_to_vn: state.cn_to_vn.clone(),
        });
    }
}

/// Checks that across successive recomputations of the same directed edge,
/// upper bounds never increase and lower bounds never decrease.
pub struct MonotoneChecker {
    last: Vec<[Option<Interval>; 2]>,
    slack: f64,
    pub violations: u64,
}

impl MonotoneChecker {
    pub fn new(num_edges: usize, slack: f64) -> Self {
        Self { last: vec![[None, None]; num_edges], slack, violations: 0 }
    }
}

impl Observer for MonotoneChecker {
    fn on_message(&mut self, r: &TraceRecord) {
        let slot = match r.direction {
            Direction::VnToCn => 0,
            Direction::CnToVn => 1,
        };
        if let Some(prev) = self.last[r.edge][slot] {
            if r.upper > prev.upper + self.slack || r.lower < prev.lower - self.slack {
                self.violations += 1;
            }
        }
        self.last[r.edge][slot] = Some(Interval::new(r.lower, r.upper));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub x_hat: Vec<f64>,
    /// Per-VN: consolidated bounds matched before ℓ_max.
    pub converged: Vec<bool>,
    /// Per-VN: a consolidated upper strictly below the lower was observed.
    pub inconsistent: Vec<bool>,
    /// Sweeps executed (ℓ at termination; at most ℓ_max − 1).
    pub iterations_used: u32,
    pub counters: MessageCounters,
}

impl ReconstructionResult {
    pub fn fully_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

struct Decisions {
    x_hat: Vec<f64>,
    converged: Vec<bool>,
    inconsistent: Vec<bool>,
}

impl Decisions {
    fn new(n: usize) -> Self {
        Self { x_hat: vec![0.0; n], converged: vec![false; n], inconsistent: vec![false; n] }
    }

    /// Evaluates the per-VN decision rule once, after a full sweep.
    /// Returns true when every VN has been decided.
    fn decide(&mut self, graph: &TannerGraph, state: &MessageState, tol: Tolerance) -> bool {
        let mut all = true;
        for v in 0..graph.n() {
            if self.converged[v] {
                continue;
            }
            let (lower, upper) = consolidate(graph, state, v);
            let d = upper - lower;
            let eps = match tol {
                Tolerance::Exact => 0.0,
                Tolerance::Relative(r) => r * upper.max(1.0),
            };
            if d < -eps {
                self.inconsistent[v] = true;
                self.x_hat[v] = lower;
                all = false;
            } else if d <= eps {
                self.converged[v] = true;
                self.x_hat[v] = lower;
            } else {
                self.x_hat[v] = lower;
                all = false;
            }
        }
        all
    }
}

/// Flooding IPA: per iteration all VN→CN messages are recomputed from the
/// previous iteration's CN→VN messages, then all CN→VN messages from this
/// iteration's VN→CN messages; decisions follow the full sweep.
pub fn run_fipa(
    graph: &TannerGraph,
    y: &Measurement,
    cfg: &IpaConfig,
) -> Result<ReconstructionResult, EngineError> {
    run_fipa_observed(graph, y, cfg, &mut NoopObserver)
}

pub fn run_fipa_observed(
    graph: &TannerGraph,
    y: &Measurement,
    cfg: &IpaConfig,
    observer: &mut dyn Observer,
) -> Result<ReconstructionResult, EngineError> {
    if cfg.max_iterations < 1 {
        return Err(EngineError::InvalidIterationBound);
    }
    let mut state = init_messages(graph, y)?;
    let mut decisions = Decisions::new(graph.n());
    let mut iterations_used = 0;
    for iteration in 1..cfg.max_iterations {
        state.iteration = iteration;
        // VN phase: reads only cn_to_vn, which still holds iteration-(ℓ−1)
        // values at this point.
        for v in 0..graph.n() {
            update_vn_messages(graph, &mut state, v, None, cfg, observer, 0);
        }
        for c in 0..graph.m() {
            update_cn_messages(graph, &mut state, c, y, observer, 0);
        }
        observer.on_iteration_end(iteration, &state);
        iterations_used = iteration;
        if decisions.decide(graph, &state, cfg.tolerance) {
            break;
        }
    }
    if iterations_used == 0 {
        // ℓ_max = 1: no sweeps were run; decide on the initial state.
        decisions.decide(graph, &state, cfg.tolerance);
    }
    Ok(ReconstructionResult {
        x_hat: decisions.x_hat,
        converged: decisions.converged,
        inconsistent: decisions.inconsistent,
        iterations_used,
        counters: state.counters,
    })
}

/// Sequential IPA: per iteration a fresh random CN permutation is drawn;
/// scheduling CN c at time t first refreshes the outgoing messages of every
/// VN in N(c) (gated on the p-counter and unmatched stored bounds), then
/// recomputes c's CN→VN messages. Decisions follow the full CN sweep.
pub fn run_sipa(
    graph: &TannerGraph,
    y: &Measurement,
    cfg: &IpaConfig,
    rng: &mut impl Rng,
) -> Result<ReconstructionResult, EngineError> {
    run_sipa_observed(graph, y, cfg, rng, &mut NoopObserver)
}

pub fn run_sipa_observed(
    graph: &TannerGraph,
    y: &Measurement,
    cfg: &IpaConfig,
    rng: &mut impl Rng,
    observer: &mut dyn Observer,
) -> Result<ReconstructionResult, EngineError> {
    if cfg.max_iterations < 1 {
        return Err(EngineError::InvalidIterationBound);
    }
    let mut state = init_messages(graph, y)?;
    let mut decisions = Decisions::new(graph.n());
    let mut iterations_used = 0;
    let mut frozen: Option<Vec<Interval>> = None;
    for iteration in 1..cfg.max_iterations {
        state.iteration = iteration;
        state.p.iter_mut().for_each(|p| *p = 0);
        let schedule = make_schedule(rng, graph.m());
        if cfg.frozen_iteration {
            frozen = Some(state.cn_to_vn.clone());
        }
        for &c in schedule.order() {
            let time = schedule.time_of(c);
            for &e in graph.cn_edges(c) {
                let v = graph.edge(e).vn;
                update_vn_messages(graph, &mut state, v, frozen.as_deref(), cfg, observer, time);
            }
            update_cn_messages(graph, &mut state, c, y, observer, time);
        }
        observer.on_iteration_end(iteration, &state);
        iterations_used = iteration;
        if decisions.decide(graph, &state, cfg.tolerance) {
            break;
        }
    }
    if iterations_used == 0 {
        decisions.decide(graph, &state, cfg.tolerance);
    }
    Ok(ReconstructionResult {
        x_hat: decisions.x_hat,
        converged: decisions.converged,
        inconsistent: decisions.inconsistent,
        iterations_used,
        counters: state.counters,
    })
}

/// Recomputes VN v's outgoing messages. Under the sequential schedule
/// (`time > 0`) each edge is gated: it is refreshed only when v has not
/// been updated this iteration or the stored bounds on that edge have not
/// matched. `frozen` substitutes a start-of-iteration snapshot of the
/// CN→VN buffer and disables the gate (flooding-equivalence mode).
fn update_vn_messages(
    graph: &TannerGraph,
    state: &mut MessageState,
    v: usize,
    frozen: Option<&[Interval]>,
    cfg: &IpaConfig,
    observer: &mut dyn Observer,
    time: usize,
) {
    let sequential = time > 0;
    // The p-counter is read once per visit: a VN not yet updated this
    // iteration refreshes all its outgoing edges, while a revisit touches
    // only edges whose stored bounds have not matched.
    let first_visit = state.p[v] == 0;
    let incoming = frozen.unwrap_or(&state.cn_to_vn);
    // The max/min ranges over all of N(v), so it is shared by every
    // outgoing edge (unless the experimental exclusion flag is set).
    let shared = if cfg.exclude_target {
        None
    } else {
        Some(vn_message(graph.vn_edges(v).iter().map(|&e| incoming[e]), 1.0))
    };
    for &e in graph.vn_edges(v) {
        if sequential && frozen.is_none() && !first_visit {
            let stored = state.vn_to_cn[e];
            if cfg.tolerance.matched(stored.lower, stored.upper) {
                continue;
            }
        }
        let weight = graph.weight(e);
        let iv = match shared {
            Some(base) => Interval::new(base.lower * weight, base.upper * weight),
            None => vn_message(
                graph.vn_edges(v).iter().filter(|&&o| o != e).map(|&o| incoming[o]),
                weight,
            ),
        };
        state.vn_to_cn[e] = iv;
        state.counters.vn_to_cn += 1;
        if sequential {
            state.p[v] += 1;
        }
        observer.on_message(&TraceRecord {
            iteration: state.iteration,
            time,
            edge: e,
            direction: Direction::VnToCn,
            lower: iv.lower,
            upper: iv.upper,
        });
    }
}

/// Recomputes CN c's outgoing messages from the most recent VN→CN bounds
/// on its edges, clipping negative lower bounds at zero.
fn update_cn_messages(
    graph: &TannerGraph,
    state: &mut MessageState,
    c: usize,
    y: &Measurement,
    observer: &mut dyn Observer,
    time: usize,
) {
    let yc = y.value(c);
    let mut sum_upper = 0.0;
    let mut sum_lower = 0.0;
    for &e in graph.cn_edges(c) {
        sum_upper += state.vn_to_cn[e].upper;
        sum_lower += state.vn_to_cn[e].lower;
    }
    for &e in graph.cn_edges(c) {
        let stored = state.vn_to_cn[e];
        let iv = cn_message(yc, sum_upper - stored.upper, sum_lower - stored.lower, graph.weight(e));
        state.cn_to_vn[e] = iv;
        state.counters.cn_to_vn += 1;
        observer.on_message(&TraceRecord {
            iteration: state.iteration,
            time,
            edge: e,
            direction: Direction::CnToVn,
            lower: iv.lower,
            upper: iv.upper,
        });
    }
}

/// Writes trace records as newline-delimited text:
/// `iteration time cn vn direction lower upper`.
pub struct TraceWriter<'g, W: std::io::Write> {
    graph: &'g TannerGraph,
    sink: W,
    pub error: Option<std::io::Error>,
}

impl<'g, W: std::io::Write> TraceWriter<'g, W> {
    pub fn new(graph: &'g TannerGraph, sink: W) -> Self {
        Self { graph, sink, error: None }
    }
}

impl<W: std::io::Write> Observer for TraceWriter<'_, W> {
    fn on_message(&mut self, r: &TraceRecord) {
        if self.error.is_some() {
            return;
        }
        let edge = self.graph.edge(r.edge);
        let dir = match r.direction {
            Direction::VnToCn => "v->c",
            Direction::CnToVn => "c->v",
        };
        if let Err(e) = writeln!(
            self.sink,
            "{} {} {} {} {} {} {}",
            r.iteration, r.time, edge.cn, edge.vn, dir, r.lower, r.upper
        ) {
            self.error = Some(e);
        }
    }
}
