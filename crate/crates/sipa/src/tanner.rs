//! LDPC measurement matrices represented as Tanner graphs.
//!
//! A measurement matrix `A ∈ ℝ≥0^{m×n}` with m < n is stored sparsely as a
//! bipartite graph: variable nodes (VNs) are columns, check nodes (CNs) are
//! rows, and each edge carries the strictly positive entry `A[c][v]`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Whether matrix entries (and signal amplitudes) are {0,1} or general
/// non-negative reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMode {
    Binary,
    NonnegReal,
}

/// Parameters describing a (γ,ρ)-regular measurement matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSpec {
    /// VN (column) degree γ.
    pub gamma: usize,
    /// CN (row) degree ρ.
    pub rho: usize,
    /// Number of columns (signal length).
    pub n: usize,
    /// Number of rows (measurements).
    pub m: usize,
    /// RNG seed; identical seeds produce identical graphs.
    pub seed: u64,
    pub field_mode: FieldMode,
}

impl MatrixSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.gamma < 2 || self.rho < 2 {
            return Err(GraphError::InvalidSpec(format!(
                "degrees must be at least 2, got gamma={} rho={}",
                self.gamma, self.rho
            )));
        }
        if self.n * self.gamma != self.m * self.rho {
            return Err(GraphError::DegreeBalance {
                vn_sockets: self.n * self.gamma,
                cn_sockets: self.m * self.rho,
            });
        }
        if self.m >= self.n {
            return Err(GraphError::InvalidSpec(format!(
                "measurement matrix must be wide (m < n), got m={} n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("degree balance violated: n*gamma = {vn_sockets} but m*rho = {cn_sockets}")]
    DegreeBalance { vn_sockets: usize, cn_sockets: usize },
    #[error("invalid matrix spec: {0}")]
    InvalidSpec(String),
    #[error("failed to construct a simple graph after {attempts} attempts (seed {seed})")]
    ConstructionFailed { seed: u64, attempts: usize },
    #[error("edge ({cn}, {vn}) out of range for {m} CNs and {n} VNs")]
    EdgeOutOfRange { cn: usize, vn: usize, m: usize, n: usize },
}

/// A single non-zero matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub cn: usize,
    pub vn: usize,
    pub weight: f64,
}

/// Sparse bipartite view of a measurement matrix.
///
/// Edges are kept in canonical order (sorted by `(cn, vn)`), and the two
/// adjacency views list incident edge ids with neighbor indices ascending,
/// so iteration order is deterministic across runs and platforms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    edges: Vec<Edge>,
    vn_adj: Vec<Vec<usize>>,
    cn_adj: Vec<Vec<usize>>,
    /// Set when the graph was generated from a (γ,ρ) spec.
    declared: Option<(usize, usize)>,
}

impl PartialEq for TannerGraph {
    /// Structural equality: dimensions and canonical edge list.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.edges == other.edges
    }
}

impl TannerGraph {
    /// Builds a graph from an explicit edge list. Edges are canonicalized;
    /// parallel edges and non-positive weights are accepted here and
    /// surfaced by [`TannerGraph::validate`].
    pub fn from_edges(m: usize, n: usize, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        for e in &edges {
            if e.cn >= m || e.vn >= n {
                return Err(GraphError::EdgeOutOfRange { cn: e.cn, vn: e.vn, m, n });
            }
        }
        edges.sort_by(|a, b| (a.cn, a.vn).cmp(&(b.cn, b.vn)));
        let mut vn_adj = vec![Vec::new(); n];
        let mut cn_adj = vec![Vec::new(); m];
        for (id, e) in edges.iter().enumerate() {
            vn_adj[e.vn].push(id);
            cn_adj[e.cn].push(id);
        }
        Ok(Self { n, m, edges, vn_adj, cn_adj, declared: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.edges[id].weight
    }

    /// Edge ids incident to VN `v`, CN indices ascending.
    pub fn vn_edges(&self, v: usize) -> &[usize] {
        &self.vn_adj[v]
    }

    /// Edge ids incident to CN `c`, VN indices ascending.
    pub fn cn_edges(&self, c: usize) -> &[usize] {
        &self.cn_adj[c]
    }

    pub fn vn_degree(&self, v: usize) -> usize {
        self.vn_adj[v].len()
    }

    pub fn cn_degree(&self, c: usize) -> usize {
        self.cn_adj[c].len()
    }

    pub fn max_vn_degree(&self) -> usize {
        (0..self.n).map(|v| self.vn_degree(v)).max().unwrap_or(0)
    }

    pub fn max_cn_degree(&self) -> usize {
        (0..self.m).map(|c| self.cn_degree(c)).max().unwrap_or(0)
    }

    /// The (γ,ρ) spec this graph was generated from, if any.
    pub fn declared_degrees(&self) -> Option<(usize, usize)> {
        self.declared
    }

    /// Dense row-major copy of the matrix, for the reference engine and
    /// small-instance oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.m];
        for e in &self.edges {
            a[e.cn][e.vn] = e.weight;
        }
        a
    }

    /// Runs all structural checks and returns every violated invariant.
    /// Never fails; an empty list means the graph is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.m >= self.n {
            out.push(Diagnostic::NotWide { m: self.m, n: self.n });
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert((e.cn, e.vn)) {
                out.push(Diagnostic::ParallelEdge { cn: e.cn, vn: e.vn });
            }
        }
        for (id, e) in self.edges.iter().enumerate() {
            if e.weight <= 0.0 {
                out.push(Diagnostic::NonPositiveWeight { edge: id, weight: e.weight });
            }
        }
        // Both adjacency views must cover every edge exactly once.
        for (v, ids) in self.vn_adj.iter().enumerate() {
            for &id in ids {
                if self.edges.get(id).map(|e| e.vn) != Some(v) {
                    out.push(Diagnostic::AdjacencyInconsistent {
                        detail: format!("vn_adjacency[{v}] lists edge {id} not incident to it"),
                    });
                }
            }
        }
        for (c, ids) in self.cn_adj.iter().enumerate() {
            for &id in ids {
                if self.edges.get(id).map(|e| e.cn) != Some(c) {
                    out.push(Diagnostic::AdjacencyInconsistent {
                        detail: format!("cn_adjacency[{c}] lists edge {id} not incident to it"),
                    });
                }
            }
        }
        let listed: usize =
            self.vn_adj.iter().map(Vec::len).sum::<usize>() + self.cn_adj.iter().map(Vec::len).sum::<usize>();
        if listed != 2 * self.edges.len() {
            out.push(Diagnostic::AdjacencyInconsistent {
                detail: format!(
                    "adjacency lists cover {} edge slots, expected {}",
                    listed,
                    2 * self.edges.len()
                ),
            });
        }
        if let Some((gamma, rho)) = self.declared {
            for v in 0..self.n {
                if self.vn_degree(v) != gamma {
                    out.push(Diagnostic::DegreeMismatch {
                        node: format!("v{v}"),
                        expected: gamma,
                        actual: self.vn_degree(v),
                    });
                }
            }
            for c in 0..self.m {
                if self.cn_degree(c) != rho {
                    out.push(Diagnostic::DegreeMismatch {
                        node: format!("c{c}"),
                        expected: rho,
                        actual: self.cn_degree(c),
                    });
                }
            }
        }
        out
    }
}

/// One violated graph invariant, as reported by [`TannerGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    NotWide { m: usize, n: usize },
    ParallelEdge { cn: usize, vn: usize },
    NonPositiveWeight { edge: usize, weight: f64 },
    AdjacencyInconsistent { detail: String },
    DegreeMismatch { node: String, expected: usize, actual: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NotWide { m, n } => write!(f, "matrix is not wide: m={m} >= n={n}"),
            Diagnostic::ParallelEdge { cn, vn } => write!(f, "parallel edge at (c{cn}, v{vn})"),
            Diagnostic::NonPositiveWeight { edge, weight } => {
                write!(f, "non-positive weight {weight} on edge {edge}")
            }
            Diagnostic::AdjacencyInconsistent { detail } => {
                write!(f, "adjacency inconsistency: {detail}")
            }
            Diagnostic::DegreeMismatch { node, expected, actual } => {
                write!(f, "degree mismatch at {node}: expected {expected}, got {actual}")
            }
        }
    }
}

const MAX_CONSTRUCTION_ATTEMPTS: usize = 1000;

/// Generates a (γ,ρ)-regular simple graph by configuration-model socket
/// matching: the γ·n VN sockets are randomly permuted against the ρ·m CN
/// sockets, and the whole sample is rejected if it contains a parallel edge.
///
/// Binary mode gives all edges weight 1; non-negative-real mode draws
/// weights uniformly from (0, 1].
pub fn generate_regular(spec: &MatrixSpec) -> Result<TannerGraph, GraphError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let num_edges = spec.n * spec.gamma;
    let mut vn_sockets: Vec<usize> = Vec::with_capacity(num_edges);
    for _attempt in 0..MAX_CONSTRUCTION_ATTEMPTS {
        vn_sockets.clear();
        for v in 0..spec.n {
            vn_sockets.extend(std::iter::repeat(v).take(spec.gamma));
        }
        vn_sockets.shuffle(&mut rng);
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(num_edges);
        let mut seen = HashSet::with_capacity(num_edges);
        let mut simple = true;
        for (i, &v) in vn_sockets.iter().enumerate() {
            let c = i / spec.rho;
            if !seen.insert((c, v)) {
                simple = false;
                break;
            }
            pairs.push((c, v));
        }
        if !simple {
            continue;
        }
        pairs.sort_unstable();
        let edges: Vec<Edge> = pairs
            .into_iter()
            .map(|(cn, vn)| {
                let weight = match spec.field_mode {
                    FieldMode::Binary => 1.0,
                    // 1 - u maps [0,1) onto (0,1], keeping weights strictly positive.
                    FieldMode::NonnegReal => 1.0 - rng.gen::<f64>(),
                };
                Edge { cn, vn, weight }
            })
            .collect();
        let mut graph = TannerGraph::from_edges(spec.m, spec.n, edges)?;
        graph.declared = Some((spec.gamma, spec.rho));
        debug_assert!(graph.validate().is_empty(), "generated graph failed validation");
        return Ok(graph);
    }
    Err(GraphError::ConstructionFailed { seed: spec.seed, attempts: MAX_CONSTRUCTION_ATTEMPTS })
}

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> AlistError {
    AlistError::Parse { line, msg: msg.into() }
}

/// Serializes a graph in the community alist format (1-based indices):
/// dimensions, max degrees, per-node degree lists, then per-node neighbor
/// lists. Non-binary weights are appended in a `WEIGHTS` trailer, one
/// decimal value per edge in canonical edge order.
pub fn to_alist(graph: &TannerGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", graph.n(), graph.m()));
    out.push_str(&format!("{} {}\n", graph.max_vn_degree(), graph.max_cn_degree()));
    let vn_degrees: Vec<String> = (0..graph.n()).map(|v| graph.vn_degree(v).to_string()).collect();
    out.push_str(&vn_degrees.join(" "));
    out.push('\n');
    let cn_degrees: Vec<String> = (0..graph.m()).map(|c| graph.cn_degree(c).to_string()).collect();
    out.push_str(&cn_degrees.join(" "));
    out.push('\n');
    for v in 0..graph.n() {
        let neighbors: Vec<String> =
            graph.vn_edges(v).iter().map(|&e| (graph.edge(e).cn + 1).to_string()).collect();
        out.push_str(&neighbors.join(" "));
        out.push('\n');
    }
    for c in 0..graph.m() {
        let neighbors: Vec<String> =
            graph.cn_edges(c).iter().map(|&e| (graph.edge(e).vn + 1).to_string()).collect();
        out.push_str(&neighbors.join(" "));
        out.push('\n');
    }
    if graph.edges().iter().any(|e| e.weight != 1.0) {
        out.push_str("WEIGHTS\n");
        for e in graph.edges() {
            out.push_str(&format!("{}\n", e.weight));
        }
    }
    out
}

/// Parses alist text back into a graph. Errors carry the 1-based offending
/// line number. Zero entries in neighbor lists (MacKay-style padding for
/// irregular graphs) are ignored.
pub fn from_alist(text: &str) -> Result<TannerGraph, AlistError> {
    // (1-based line number, content), blank lines skipped.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0usize;
    fn next<'a>(
        lines: &[(usize, &'a str)],
        pos: &mut usize,
        what: &str,
    ) -> Result<(usize, &'a str), AlistError> {
        let item = lines.get(*pos).copied().ok_or_else(|| AlistError::Truncated(what.to_string()))?;
        *pos += 1;
        Ok(item)
    }

    let parse_usizes = |line: usize, text: &str| -> Result<Vec<usize>, AlistError> {
        text.split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected integer, got '{tok}'"))))
            .collect()
    };

    let (ln, header) = next(&lines, &mut pos, "dimensions header")?;
    let dims = parse_usizes(ln, header)?;
    if dims.len() != 2 {
        return Err(parse_err(ln, "header must contain exactly 'n m'"));
    }
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(parse_err(ln, "dimensions must be positive"));
    }

    let (ln, maxdeg) = next(&lines, &mut pos, "max degrees")?;
    let maxdeg = parse_usizes(ln, maxdeg)?;
    if maxdeg.len() != 2 {
        return Err(parse_err(ln, "expected 'max_vn_degree max_cn_degree'"));
    }
    let (max_vn_deg, max_cn_deg) = (maxdeg[0], maxdeg[1]);

    let (ln, vd) = next(&lines, &mut pos, "vn degree list")?;
    let vn_degrees = parse_usizes(ln, vd)?;
    if vn_degrees.len() != n {
        return Err(parse_err(ln, format!("expected {n} VN degrees, got {}", vn_degrees.len())));
    }
    let (ln, cd) = next(&lines, &mut pos, "cn degree list")?;
    let cn_degrees = parse_usizes(ln, cd)?;
    if cn_degrees.len() != m {
        return Err(parse_err(ln, format!("expected {m} CN degrees, got {}", cn_degrees.len())));
    }
    if let Some(d) = vn_degrees.iter().find(|&&d| d > max_vn_deg) {
        return Err(parse_err(ln, format!("VN degree {d} exceeds declared maximum {max_vn_deg}")));
    }
    if let Some(d) = cn_degrees.iter().find(|&&d| d > max_cn_deg) {
        return Err(parse_err(ln, format!("CN degree {d} exceeds declared maximum {max_cn_deg}")));
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        let (ln, row) = next(&lines, &mut pos, "vn neighbor list")?;
        let entries: Vec<usize> = parse_usizes(ln, row)?.into_iter().filter(|&c| c != 0).collect();
        if entries.len() != vn_degrees[v] {
            return Err(parse_err(
                ln,
                format!("VN {} declares degree {} but lists {} neighbors", v + 1, vn_degrees[v], entries.len()),
            ));
        }
        for c in entries {
            if c > m {
                return Err(parse_err(ln, format!("CN index {c} out of range 1..={m}")));
            }
            pairs.push((c - 1, v));
        }
    }
    // The CN lists are a redundant view; parse them and check consistency.
    let mut cn_lists: Vec<(usize, Vec<usize>)> = Vec::with_capacity(m);
    for c in 0..m {
        let (ln, row) = next(&lines, &mut pos, "cn neighbor list")?;
        let entries: Vec<usize> = parse_usizes(ln, row)?.into_iter().filter(|&v| v != 0).collect();
        if entries.len() != cn_degrees[c] {
            return Err(parse_err(
                ln,
                format!("CN {} declares degree {} but lists {} neighbors", c + 1, cn_degrees[c], entries.len()),
            ));
        }
        for &v in &entries {
            if v > n {
                return Err(parse_err(ln, format!("VN index {v} out of range 1..={n}")));
            }
        }
        cn_lists.push((ln, entries.iter().map(|&v| v - 1).collect()));
    }
    pairs.sort_unstable();
    if pairs.windows(2).any(|w| w[0] == w[1]) {
        let dup = pairs.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
        return Err(parse_err(0, format!("parallel edge at (c{}, v{})", dup.0 + 1, dup.1 + 1)));
    }
    for (c, (ln, list)) in cn_lists.iter().enumerate() {
        let mut from_vn: Vec<usize> = pairs.iter().filter(|&&(pc, _)| pc == c).map(|&(_, v)| v).collect();
        let mut listed = list.clone();
        from_vn.sort_unstable();
        listed.sort_unstable();
        if from_vn != listed {
            return Err(parse_err(*ln, format!("CN {} neighbor list disagrees with the VN lists", c + 1)));
        }
    }

    let mut weights = vec![1.0; pairs.len()];
    if pos < lines.len() {
        let (ln, marker) = next(&lines, &mut pos, "weights marker")?;
        if marker != "WEIGHTS" {
            return Err(parse_err(ln, format!("expected WEIGHTS trailer or end of file, got '{marker}'")));
        }
        for w in weights.iter_mut() {
            let (ln, row) = next(&lines, &mut pos, "weight value")?;
            *w = row.parse::<f64>().map_err(|_| parse_err(ln, format!("expected decimal weight, got '{row}'")))?;
        }
        if pos < lines.len() {
            let (ln, extra) = lines[pos];
            return Err(parse_err(ln, format!("trailing content after weights: '{extra}'")));
        }
    }

    let edges: Vec<Edge> = pairs
        .into_iter()
        .zip(weights)
        .map(|((cn, vn), weight)| Edge { cn, vn, weight })
        .collect();
    TannerGraph::from_edges(m, n, edges).map_err(|e| parse_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_spec() -> MatrixSpec {
        MatrixSpec { gamma: 2, rho: 3, n: 3, m: 2, seed: 0, field_mode: FieldMode::Binary }
    }

    /// At (γ=2, ρ=3, m=2, n=3) the only simple regular graph is the complete
    /// bipartite one: both CNs neighbor all three VNs.
    #[test]
    fn fig1_graph_is_complete_bipartite() {
        let g = generate_regular(&fig1_spec()).unwrap();
        assert_eq!(g.num_edges(), 6);
        for c in 0..2 {
            let neighbors: Vec<usize> = g.cn_edges(c).iter().map(|&e| g.edge(e).vn).collect();
            assert_eq!(neighbors, vec![0, 1, 2]);
        }
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn regular_graph_has_exact_degrees() {
        let spec = MatrixSpec { gamma: 3, rho: 7, n: 700, m: 300, seed: 1, field_mode: FieldMode::Binary };
        let g = generate_regular(&spec).unwrap();
        assert_eq!(g.num_edges(), 2100);
        assert!((0..700).all(|v| g.vn_degree(v) == 3));
        assert!((0..300).all(|c| g.cn_degree(c) == 7));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn generation_is_deterministic_in_seed() {
        let spec = MatrixSpec { gamma: 2, rho: 4, n: 4, m: 2, seed: 7, field_mode: FieldMode::Binary };
        let a = generate_regular(&spec).unwrap();
        let b = generate_regular(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn degree_balance_is_rejected() {
        let spec = MatrixSpec { gamma: 3, rho: 7, n: 701, m: 300, seed: 0, field_mode: FieldMode::Binary };
        assert!(matches!(generate_regular(&spec), Err(GraphError::DegreeBalance { .. })));
    }

    #[test]
    fn fig1_alist_header() {
        let g = generate_regular(&fig1_spec()).unwrap();
        let text = to_alist(&g);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("3 2"));
        assert_eq!(lines.next(), Some("2 3"));
    }

    #[test]
    fn alist_round_trip_binary() {
        let spec = MatrixSpec { gamma: 3, rho: 7, n: 700, m: 300, seed: 5, field_mode: FieldMode::Binary };
        let g = generate_regular(&spec).unwrap();
        let back = from_alist(&to_alist(&g)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn alist_round_trip_weighted() {
        let spec = MatrixSpec { gamma: 2, rho: 4, n: 8, m: 4, seed: 3, field_mode: FieldMode::NonnegReal };
        let g = generate_regular(&spec).unwrap();
        let text = to_alist(&g);
        assert!(text.contains("WEIGHTS"));
        let back = from_alist(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn alist_degree_mismatch_reports_line() {
        // VN 1 declares degree 2 but lists 3 neighbors (line 5).
        let text = "3 2\n2 3\n2 2 2\n3 3\n1 2 2\n1 2\n1 2\n1 2 3\n1 2 3\n";
        match from_alist(text) {
            Err(AlistError::Parse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("degree"), "unexpected message: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_parallel_edge_and_zero_weight() {
        let edges = vec![
            Edge { cn: 0, vn: 0, weight: 1.0 },
            Edge { cn: 0, vn: 0, weight: 1.0 },
            Edge { cn: 1, vn: 1, weight: 0.0 },
            Edge { cn: 1, vn: 2, weight: 1.0 },
        ];
        let g = TannerGraph::from_edges(2, 3, edges).unwrap();
        let diags = g.validate();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::ParallelEdge { cn: 0, vn: 0 })));
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::NonPositiveWeight { .. })));
    }

    #[test]
    fn socket_count_identity() {
        for (gamma, rho, n, m) in [(2, 3, 30, 20), (2, 4, 40, 20), (3, 6, 30, 15), (3, 7, 70, 30)] {
            let spec = MatrixSpec { gamma, rho, n, m, seed: 9, field_mode: FieldMode::Binary };
            let g = generate_regular(&spec).unwrap();
            let vn_sum: usize = (0..n).map(|v| g.vn_degree(v)).sum();
            let cn_sum: usize = (0..m).map(|c| g.cn_degree(c)).sum();
            assert_eq!(vn_sum, n * gamma);
            assert_eq!(cn_sum, m * rho);
            assert_eq!(g.num_edges(), n * gamma);
        }
    }
}
