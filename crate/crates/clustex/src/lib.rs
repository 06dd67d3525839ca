//! Differentially private (k,p)-clustering with per-agent contrastive
//! explanations that spend no additional privacy budget.
//!
//! The crate provides:
//! - geometry, cost evaluation, and brute-force oracles ([`geom`]),
//! - random-subspace dimension reduction and center recovery ([`reduction`]),
//! - noise primitives, a grid-histogram private coreset, and a privacy-budget
//!   ledger ([`privacy`]),
//! - a fixed-center k-median approximation built on an LP relaxation
//!   ([`kmedian`]),
//! - a fixed-center k-means local search over a generated candidate set
//!   ([`kmeans`]),
//! - the end-to-end private clustering / explanation orchestrators
//!   ([`pipeline`]), and
//! - dataset ingestion, synthetic data, and the experiment protocol
//!   ([`harness`]).

pub mod geom;
pub mod harness;
pub mod kmedian;
pub mod kmeans;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod privacy;
pub mod reduction;
