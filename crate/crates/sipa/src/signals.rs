//! k-sparse test signals and their compressed measurements y = Ax.

use rand::Rng;
use thiserror::Error;

use crate::tanner::{FieldMode, TannerGraph};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("sparsity k={k} exceeds signal length n={n}")]
    SparsityTooLarge { k: usize, n: usize },
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch { what: &'static str, got: usize, expected: usize },
    #[error("invalid serialized value on line {line}: '{content}'")]
    Malformed { line: usize, content: String },
}

/// A non-negative signal with exactly `|support|` non-zero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    support: Vec<usize>,
}

impl SparseSignal {
    /// Wraps an explicit value vector, deriving the support.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SignalError> {
        let support: Vec<usize> =
            values.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, _)| i).collect();
        Ok(Self { values, support })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices of non-zero entries, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn to_lines(&self) -> String {
        values_to_lines(&self.values)
    }

    pub fn from_lines(text: &str) -> Result<Self, SignalError> {
        Self::from_values(values_from_lines(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("serializing Vec<f64>")
    }
}

/// The m-dimensional image y = Ax.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    values: Vec<f64>,
}

impl Measurement {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, c: usize) -> f64 {
        self.values[c]
    }

    pub fn to_lines(&self) -> String {
        values_to_lines(&self.values)
    }

    pub fn from_lines(text: &str) -> Result<Self, SignalError> {
        Ok(Self::new(values_from_lines(text)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("serializing Vec<f64>")
    }
}

fn values_to_lines(values: &[f64]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

fn values_from_lines(text: &str) -> Result<Vec<f64>, SignalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse::<f64>()
                .map_err(|_| SignalError::Malformed { line: i + 1, content: t.to_string() })?,
        );
    }
    Ok(out)
}

/// Draws a signal whose support is uniform among size-k subsets of [n].
/// Binary mode sets support values to 1; real mode draws them uniformly
/// from (0, 1].
pub fn generate_sparse(
    n: usize,
    k: usize,
    mode: FieldMode,
    rng: &mut impl Rng,
) -> Result<SparseSignal, SignalError> {
    if k > n {
        return Err(SignalError::SparsityTooLarge { k, n });
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let mut values = vec![0.0; n];
    for &i in &support {
        values[i] = match mode {
            FieldMode::Binary => 1.0,
            FieldMode::NonnegReal => 1.0 - rng.gen::<f64>(),
        };
    }
    Ok(SparseSignal { values, support })
}

/// Computes y(c) = Σ_{v ∈ N(c)} A[c][v]·x(v), iterating only the edges.
pub fn measure(graph: &TannerGraph, x: &SparseSignal) -> Result<Measurement, SignalError> {
    if x.n() != graph.n() {
        return Err(SignalError::DimensionMismatch { what: "signal", got: x.n(), expected: graph.n() });
    }
    let mut y = vec![0.0; graph.m()];
    for &v in x.support() {
        let xv = x.values()[v];
        for &e in graph.vn_edges(v) {
            let edge = graph.edge(e);
            y[edge.cn] += edge.weight * xv;
        }
    }
    Ok(Measurement::new(y))
}
