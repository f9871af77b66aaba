//! Compressed sensing of sparse non-negative signals via interval passing
//! over the Tanner graph of an LDPC measurement matrix.
//!
//! The crate provides:
//!
//! - [`tanner`]: construction, validation, and alist serialization of
//!   (γ,ρ)-regular LDPC measurement matrices as Tanner graphs.
//! - [`signals`]: k-sparse test signal generation and measurement y = Ax.
//! - [`engine`]: the two interval-passing reconstruction engines, flooding
//!   (FIPA) and sequential (SIPA).
//! - [`complexity`]: the elementary-operation cost model (CMP/SUB/ADD) and
//!   variant comparison.
//! - [`oracle`]: exhaustive ℓ0 ground truth and a naive dense reference
//!   engine for differential testing.
//! - [`bench`]: a seeded Monte Carlo sweep harness producing PCR/FER curves,
//!   iteration statistics, and complexity tables.

pub mod bench;
pub mod complexity;
pub mod engine;
pub mod oracle;
pub mod signals;
pub mod tanner;
