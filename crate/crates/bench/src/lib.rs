//! Shared workload builders for the benchmark targets.

use ghost_core::arch::{ArchConfig, DeviceLibrary, PhotonicLimits};
use ghost_core::dse::{toy_models, Workload};
use ghost_core::engine::MemoryModel;
use ghost_core::graph::{generate_graph, Graph, GraphKind};

/// A mid-sized random graph with features sized for the bundled models.
pub fn bench_graph(n: usize) -> Graph {
    generate_graph(GraphKind::ErdosRenyi, n, 0.05, ghost_core::dse::TOY_FEATURE_DIM, 77).unwrap()
}

/// The bundled GCN on a bench graph.
pub fn bench_workload(n: usize) -> Workload {
    let model = toy_models().remove(0).1;
    Workload {
        name: format!("gcn-er{n}"),
        graph: bench_graph(n),
        model,
    }
}

pub fn bench_env() -> (ArchConfig, DeviceLibrary, MemoryModel, PhotonicLimits) {
    (
        ArchConfig::new(8, 8, 6, 4, 5),
        DeviceLibrary::default(),
        MemoryModel::default(),
        PhotonicLimits::design_defaults(),
    )
}
