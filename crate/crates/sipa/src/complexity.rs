//! Elementary-operation cost model for message passing.
//!
//! Complexity is measured in unit-cost comparisons (CMP), subtractions
//! (SUB), and additions (ADD) per lower-bound computation; upper bounds are
//! excluded symmetrically for both variants. A VN→CN message costs
//! (γ−1)·γ comparisons, a CN→VN message one subtraction plus ρ−1
//! additions, and the sequential schedule pays one extra addition per
//! VN→CN message for maintaining the per-VN update counter.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Variant;

#[derive(Debug, Error)]
pub enum ComplexityError {
    #[error("flooding total is zero; percent reduction undefined")]
    ZeroBaseline,
}

/// Unit costs of the macro-operations. Multiplications/divisions by matrix
/// entries default to cost 0 (they vanish in the binary case and are kept
/// at 0 in real mode for comparability); set `o_mul` to price them in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub o_cmp: f64,
    pub o_sub: f64,
    pub o_add: f64,
    pub o_mul: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { o_cmp: 1.0, o_sub: 1.0, o_add: 1.0, o_mul: 0.0 }
    }
}

/// Cost of one VN→CN message: (γ−1)·γ·O_CMP (+ O_MUL when priced).
pub fn vn_msg_cost(gamma: usize, model: &CostModel) -> f64 {
    (gamma.saturating_sub(1) * gamma) as f64 * model.o_cmp + model.o_mul
}

/// Cost of one CN→VN message: O_SUB + (ρ−1)·O_ADD (+ O_MUL when priced).
pub fn cn_msg_cost(rho: usize, model: &CostModel) -> f64 {
    model.o_sub + rho.saturating_sub(1) as f64 * model.o_add + model.o_mul
}

/// Average message counts and the derived elementary-operation total for
/// one variant at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub variant: Variant,
    pub cn_to_vn_msgs: f64,
    pub vn_to_cn_msgs: f64,
    pub total_ops: f64,
}

impl ComplexityReport {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.4},{:.4},{:.4}",
            self.variant, self.cn_to_vn_msgs, self.vn_to_cn_msgs, self.total_ops
        )
    }
}

/// Converts average message counts into an operation total. The sequential
/// variant pays one extra addition per VN→CN message (the p-counter).
pub fn aggregate(
    cn_to_vn_msgs: f64,
    vn_to_cn_msgs: f64,
    gamma: usize,
    rho: usize,
    variant: Variant,
    model: &CostModel,
) -> ComplexityReport {
    let mut total = cn_to_vn_msgs * cn_msg_cost(rho, model) + vn_to_cn_msgs * vn_msg_cost(gamma, model);
    if variant == Variant::Sequential {
        total += vn_to_cn_msgs * model.o_add;
    }
    ComplexityReport { variant, cn_to_vn_msgs, vn_to_cn_msgs, total_ops: total }
}

/// 100·(1 − seq/fld) percent operation savings of the sequential schedule.
pub fn percent_reduction(fld: &ComplexityReport, seq: &ComplexityReport) -> Result<f64, ComplexityError> {
    if fld.total_ops == 0.0 {
        return Err(ComplexityError::ZeroBaseline);
    }
    Ok(100.0 * (1.0 - seq.total_ops / fld.total_ops))
}
