//! Scheduling and performance modeling: phase timelines, the memory model,
//! and latency/energy/GOPS/EPB reporting.

pub mod latency;
pub mod memory;
pub mod metrics;
pub mod schedule;
pub mod tally;

pub use latency::{
    aggregate_latency, aggregate_passes, balance_passes, combine_latency, lane_passes,
    pass_time_ns, update_latency,
};
pub use memory::{memory_fetch_time, BufferKind, MemSim, MemoryModel};
pub use metrics::{energy, fnv1a64, op_count, BlockLatencies, EnergyBreakdown, SimReport};
pub use schedule::{build_schedule, pipeline_makespan, BlockKind, Timeline, TimelineEvent};
pub use tally::DeviceTallies;

use crate::arch::{instantiate, ArchConfig, DeviceLibrary, PhotonicLimits};
use crate::error::Result;
use crate::gnn::GnnModelSpec;
use crate::graph::Graph;
use crate::partition::build_partition_plan;

/// End-to-end run: partition, schedule, and metric composition. WB runs
/// with DAC sharing disabled (the normalized flag set is echoed in the
/// report).
pub fn simulate(
    g: &Graph,
    spec: &GnnModelSpec,
    cfg: &ArchConfig,
    dev: &DeviceLibrary,
    mem: &MemoryModel,
    limits: &PhotonicLimits,
) -> Result<SimReport> {
    dev.check()?;
    mem.check()?;
    spec.check()?;
    let mut cfg = *cfg;
    cfg.optimizations = cfg.optimizations.normalized();
    let inst = instantiate(&cfg, dev, limits)?;
    let plan = build_partition_plan(g, cfg.v, cfg.n)?;
    let timeline = build_schedule(g, spec, &plan, &inst, dev, mem, cfg.optimizations)?;
    let breakdown = energy(&timeline, &inst, dev, mem)?;
    let ops = op_count(spec, g);
    Ok(SimReport::assemble(cfg, &timeline, breakdown, ops, g, spec.layers.len()))
}
