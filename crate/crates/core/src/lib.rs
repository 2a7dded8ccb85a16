//! Analytical simulator and design-space explorer for a silicon-photonic
//! graph-neural-network accelerator.
//!
//! The crate is organized around the simulation flow:
//!
//! - [`graph`] / [`partition`]: graph ingestion, synthetic generation, and
//!   the buffer-and-partition block decomposition of the adjacency matrix;
//! - [`photonics`]: microring crosstalk/SNR math, loss budgets, laser power,
//!   and MR-bank feasibility scans;
//! - [`gnn`]: functional GNN inference (GCN, GraphSAGE, GIN, GAT) through
//!   gather/reduce/transform/activate semantics — the correctness reference
//!   the performance model schedules against;
//! - [`arch`]: architecture configuration `[N, V, R_r, R_c, T_r]`, derived
//!   hardware inventory, and photonic feasibility validation;
//! - [`engine`]: phase scheduling, pipelining, memory modeling, and the
//!   latency/energy/GOPS/EPB report;
//! - [`dse`]: device- and architecture-level sweeps plus the optimization
//!   ablation driver.

pub mod arch;
pub mod dse;
pub mod engine;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod partition;
pub mod photonics;

pub use error::{Error, Result, Violation};
