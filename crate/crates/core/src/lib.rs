//! Common community detection in dynamic heterogeneous networks.
//!
//! A dynamic heterogeneous network is a sequence of snapshots over nodes of
//! `L` types. [`optimizer::dhnet_detect`] finds one time-invariant
//! community assignment by maximizing an integrated modularity whose null
//! model is a per-block, per-snapshot Chung-Lu graph. The crate also ships
//! a sampler for the matching dynamic heterogeneous stochastic block model,
//! baseline pipelines, partition metrics and a benchmark harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod baselines;
pub mod bench;
pub mod config;
pub mod dhsbm;
pub mod hetnet;
pub mod metrics;
pub mod modularity;
pub mod optimizer;
pub mod predict;
pub mod seeds;

pub use assignment::Assignment;
pub use hetnet::{DynHetNet, TypeLayout};
pub use modularity::{build_oracle, modularity, ModularityOracle};
pub use optimizer::{dhnet_detect, DhnetConfig, Detection};
