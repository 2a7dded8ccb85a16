//! Event-list schedule construction.
//!
//! Each layer becomes a list of stages per output vertex group; a stage
//! owns an ordered chunk list bound to one of four resources (aggregate,
//! combine, update fabric, memory channel). With pipelining on, a chunk
//! starts as soon as its resource is free and its producer chunks are done;
//! with pipelining off everything serializes in construction order. Chunks
//! on one resource never reorder, which also realizes the cross-group
//! precedence: the first reduce of group i+1 starts after the last reduce
//! of group i.
//!
//! Layers always serialize: every aggregate reads the previous layer's full
//! update output.

use serde::Serialize;

use super::latency::{
    aggregate_latency, aggregate_passes, combine_chunk_ns, pass_time_ns, softmax_cycle_ns,
    update_latency,
};
use super::memory::{block_key, BufferKind, MemSim, MemoryModel};
use super::tally::DeviceTallies;
use crate::arch::{ArchInstance, DeviceLibrary, OptFlags};
use crate::error::Result;
use crate::gnn::{Activation, Family, GnnModelSpec, LayerSpec};
use crate::graph::Graph;
use crate::partition::PartitionPlan;

pub const RESOURCE_AGGREGATE: usize = 0;
pub const RESOURCE_COMBINE: usize = 1;
pub const RESOURCE_UPDATE: usize = 2;
pub const RESOURCE_MEMORY: usize = 3;
const NUM_RESOURCES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Aggregate,
    Combine,
    Update,
    Memory,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimelineEvent {
    pub block: BlockKind,
    pub layer: usize,
    pub group: usize,
    pub stage: &'static str,
    pub chunk: usize,
    pub start_ns: f64,
    pub end_ns: f64,
    pub tallies: DeviceTallies,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timeline {
    pub events: Vec<TimelineEvent>,
    pub makespan_ns: f64,
}

impl Timeline {
    /// Busy time per block class (events may overlap across blocks).
    pub fn busy_by_block(&self) -> [f64; 4] {
        let mut busy = [0.0; 4];
        for e in &self.events {
            let idx = match e.block {
                BlockKind::Aggregate => 0,
                BlockKind::Combine => 1,
                BlockKind::Update => 2,
                BlockKind::Memory => 3,
            };
            busy[idx] += e.end_ns - e.start_ns;
        }
        busy
    }

    pub fn total_tallies(&self) -> DeviceTallies {
        let mut t = DeviceTallies::default();
        for e in &self.events {
            t.add(&e.tallies);
        }
        t
    }
}

struct ChunkSpec {
    duration_ns: f64,
    tallies: DeviceTallies,
    /// (stage index, chunk index) pairs that must finish first.
    deps: Vec<(usize, usize)>,
}

struct StageSpec {
    resource: usize,
    block: BlockKind,
    label: &'static str,
    layer: usize,
    group: usize,
    chunks: Vec<ChunkSpec>,
}

/// Producer chunk feeding consumer chunk `k` when the producer split the
/// same data into `n_prev` chunks and the consumer into `n_cur`.
fn dep_chunk(k: usize, n_cur: usize, n_prev: usize) -> usize {
    (((k + 1) * n_prev).div_ceil(n_cur)).saturating_sub(1)
}

fn run_schedule(stages: &[StageSpec], pp_on: bool) -> Timeline {
    let mut resource_free = [0.0f64; NUM_RESOURCES];
    let mut ends: Vec<Vec<f64>> = Vec::with_capacity(stages.len());
    let mut serial_clock = 0.0f64;
    let mut events = Vec::new();
    let mut makespan = 0.0f64;

    for (sid, stage) in stages.iter().enumerate() {
        let mut stage_ends = Vec::with_capacity(stage.chunks.len());
        for (cid, chunk) in stage.chunks.iter().enumerate() {
            let start = if pp_on {
                let mut t = resource_free[stage.resource];
                for &(ds, dc) in &chunk.deps {
                    debug_assert!(ds < sid, "dependencies must point backward");
                    t = t.max(ends[ds][dc]);
                }
                t
            } else {
                serial_clock
            };
            let end = start + chunk.duration_ns;
            if pp_on {
                resource_free[stage.resource] = end;
            } else {
                serial_clock = end;
            }
            makespan = makespan.max(end);
            stage_ends.push(end);
            events.push(TimelineEvent {
                block: stage.block,
                layer: stage.layer,
                group: stage.group,
                stage: stage.label,
                chunk: cid,
                start_ns: start,
                end_ns: end,
                tallies: chunk.tallies,
            });
        }
        ends.push(stage_ends);
    }
    Timeline {
        events,
        makespan_ns: makespan,
    }
}

/// Makespan of a synthetic stage pipeline (`(chunks, chunk_ns)` per stage,
/// each stage on its own resource, chunk k feeding chunk k). Shares the
/// event-list scheduler with the real schedule builder.
pub fn pipeline_makespan(stage_shapes: &[(usize, f64)], pp_on: bool) -> f64 {
    let stages: Vec<StageSpec> = stage_shapes
        .iter()
        .enumerate()
        .map(|(s, &(chunks, t))| StageSpec {
            resource: s % NUM_RESOURCES,
            block: BlockKind::Combine,
            label: "synthetic",
            layer: 0,
            group: 0,
            chunks: (0..chunks)
                .map(|k| ChunkSpec {
                    duration_ns: t,
                    tallies: DeviceTallies::default(),
                    deps: if s == 0 {
                        Vec::new()
                    } else {
                        vec![(s - 1, dep_chunk(k, chunks, stage_shapes[s - 1].0))]
                    },
                })
                .collect(),
        })
        .collect();
    run_schedule(&stages, pp_on).makespan_ns
}

/// Per-chunk combine durations for one group mapping: the first chunk is a
/// bare array pass, later chunks carry the inter-chunk ADC + buffer round,
/// batch norm adds a broadband tune at the end of each row mapping.
fn combine_chunk_durations(
    f_in: usize,
    f_out: usize,
    bn: bool,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    buffer_read_latency_ns: f64,
) -> Vec<f64> {
    let cfg = &inst.config;
    let row_chunks = f_out.div_ceil(cfg.t_r);
    let col_chunks = f_in.div_ceil(cfg.r_r);
    let t_chunk = combine_chunk_ns(dev);
    let mut durations = Vec::with_capacity(row_chunks * col_chunks);
    for r in 0..row_chunks {
        for k in 0..col_chunks {
            let mut d = t_chunk;
            if !(r == 0 && k == 0) {
                d += dev.adc8.latency_ns + buffer_read_latency_ns;
            }
            if bn && k == col_chunks - 1 {
                d += dev.eo_tuning_latency_ns;
            }
            durations.push(d);
        }
    }
    durations
}

fn combine_group_tallies(
    f_in: usize,
    f_out: usize,
    bn: bool,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    opts: OptFlags,
) -> DeviceTallies {
    super::latency::combine_latency(f_in, f_out, bn, inst, dev, 0.0, opts).1
}

/// One reduce-fabric pass worth of device activity.
fn pass_tallies(inst: &ArchInstance, dev: &DeviceLibrary, passes: f64) -> DeviceTallies {
    let cfg = &inst.config;
    let mut t = DeviceTallies::default();
    t.dac_ns += passes * (cfg.v * cfg.r_r) as f64 * dev.dac8.latency_ns;
    t.eo_tuning_ns += passes * (cfg.v * cfg.r_r * cfg.r_c) as f64 * dev.eo_tuning_latency_ns;
    t.pd_ns += passes * (cfg.v * cfg.r_r) as f64 * dev.photodetector.latency_ns;
    t.vcsel_ns += passes * (cfg.v * (cfg.r_r + cfg.r_c)) as f64 * pass_time_ns(dev);
    t
}

/// Build and run the full model schedule.
pub fn build_schedule(
    g: &Graph,
    spec: &GnnModelSpec,
    plan: &PartitionPlan,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    mem: &MemoryModel,
    opts: OptFlags,
) -> Result<Timeline> {
    spec.check()?;
    let opts = opts.normalized();
    let mut mem_sim = MemSim::new(mem.clone());
    let mut events = Vec::new();
    let mut clock = 0.0f64;
    for (layer_idx, layer) in spec.layers.iter().enumerate() {
        let stages = match spec.family {
            Family::Gat => build_gat_layer(layer_idx, layer, g, plan, inst, dev, &mut mem_sim, opts),
            _ => build_conv_layer(layer_idx, layer, g, plan, inst, dev, &mut mem_sim, opts),
        };
        let tl = run_schedule(&stages, opts.pp);
        for mut e in tl.events {
            e.start_ns += clock;
            e.end_ns += clock;
            events.push(e);
        }
        clock += tl.makespan_ns;
    }
    Ok(Timeline {
        events,
        makespan_ns: clock,
    })
}

#[allow(clippy::too_many_arguments)]
fn build_conv_layer(
    layer_idx: usize,
    layer: &LayerSpec,
    g: &Graph,
    plan: &PartitionPlan,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    mem_sim: &mut MemSim,
    opts: OptFlags,
) -> Vec<StageSpec> {
    let cfg = &inst.config;
    let f_in = layer.in_dim;
    let f_out = layer.effective_out_dim();
    let bn = layer.batch_norm.is_some();
    let col_chunks = f_in.div_ceil(cfg.r_r);
    let row_chunks = f_out.div_ceil(cfg.t_r);
    let buf_lat = mem_sim.model().buffer_read_latency_ns;
    let weight_bytes = layer.weights.len() * cfg.bytes_per_feature();

    let mut stages: Vec<StageSpec> = Vec::new();
    for group in 0..plan.num_v_groups {
        // aggregate: fetch-aware group total spread over the feature chunks
        let (agg_total, agg_tallies) =
            aggregate_latency(group, plan, g, f_in, inst, dev, mem_sim, opts, layer_idx);
        let agg_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_AGGREGATE,
            block: BlockKind::Aggregate,
            label: "reduce",
            layer: layer_idx,
            group,
            chunks: (0..col_chunks)
                .map(|k| ChunkSpec {
                    duration_ns: agg_total / col_chunks as f64,
                    tallies: if k == 0 {
                        agg_tallies
                    } else {
                        DeviceTallies::default()
                    },
                    deps: Vec::new(),
                })
                .collect(),
        });

        // combine: chunk (r, k) consumes reduce feature chunk k
        let mut durations = combine_chunk_durations(f_in, f_out, bn, inst, dev, buf_lat);
        let mut weight_tallies = DeviceTallies::default();
        if opts.bp {
            if group == 0 {
                durations[0] += mem_sim.fetch(
                    BufferKind::Weights,
                    block_key(layer_idx, 0),
                    weight_bytes,
                    &mut weight_tallies,
                );
            }
        } else {
            durations[0] += mem_sim.fetch_uncached(weight_bytes, &mut weight_tallies);
        }
        let mut comb_tallies = combine_group_tallies(f_in, f_out, bn, inst, dev, opts);
        comb_tallies.add(&weight_tallies);
        let comb_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_COMBINE,
            block: BlockKind::Combine,
            label: "transform",
            layer: layer_idx,
            group,
            chunks: durations
                .iter()
                .enumerate()
                .map(|(idx, &d)| {
                    let k = idx % col_chunks;
                    ChunkSpec {
                        duration_ns: d,
                        tallies: if idx == 0 {
                            comb_tallies
                        } else {
                            DeviceTallies::default()
                        },
                        deps: vec![(agg_id, k)],
                    }
                })
                .collect(),
        });

        // update: row mapping r is ready once its last column chunk lands
        if layer.activation != Activation::None {
            let (upd_total, upd_tallies) = update_latency(f_out, layer.activation, inst, dev);
            let chunks = if layer.activation == Activation::Softmax {
                vec![ChunkSpec {
                    duration_ns: upd_total,
                    tallies: upd_tallies,
                    deps: vec![(comb_id, row_chunks * col_chunks - 1)],
                }]
            } else {
                (0..row_chunks)
                    .map(|u| ChunkSpec {
                        duration_ns: upd_total / row_chunks as f64,
                        tallies: if u == 0 {
                            upd_tallies
                        } else {
                            DeviceTallies::default()
                        },
                        deps: vec![(comb_id, (u + 1) * col_chunks - 1)],
                    })
                    .collect()
            };
            stages.push(StageSpec {
                resource: RESOURCE_UPDATE,
                block: BlockKind::Update,
                label: "activate",
                layer: layer_idx,
                group,
                chunks,
            });
        }
    }
    stages
}

/// GAT ordering: gather fetches pipeline with the W transform; attention
/// dots, the leaky-ReLU, and the neighbor softmax follow; the attention
/// weights re-imprint the transformed vertices and the reduce runs last,
/// then the output activation.
#[allow(clippy::too_many_arguments)]
fn build_gat_layer(
    layer_idx: usize,
    layer: &LayerSpec,
    g: &Graph,
    plan: &PartitionPlan,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    mem_sim: &mut MemSim,
    opts: OptFlags,
) -> Vec<StageSpec> {
    let cfg = &inst.config;
    let f_in = layer.in_dim;
    let heads = layer.heads();
    let f_att = heads * layer.out_dim;
    let f_out = layer.effective_out_dim();
    let bpf = cfg.bytes_per_feature();
    let buf_lat = mem_sim.model().buffer_read_latency_ns;
    let t_pass = pass_time_ns(dev);
    let weight_bytes = layer.weights.len() * bpf;

    let mut stages: Vec<StageSpec> = Vec::new();
    for group in 0..plan.num_v_groups {
        let passes = aggregate_passes(g, plan, group, cfg.r_c, cfg.v, opts.wb).max(1);

        // gather fetches: slot 0 is the group's own vertices, then one slot
        // per non-empty input block
        let mut fetch_chunks: Vec<ChunkSpec> = Vec::new();
        let self_bytes = plan.group_sizes[group] * f_in * bpf;
        let mut t0 = DeviceTallies::default();
        let d0 = if opts.bp {
            mem_sim.fetch(BufferKind::OutputVertices, block_key(layer_idx, group), self_bytes, &mut t0)
        } else {
            let mut d = 0.0;
            for _ in 0..plan.group_sizes[group] {
                d += mem_sim.fetch_uncached(f_in * bpf, &mut t0);
            }
            d
        };
        fetch_chunks.push(ChunkSpec {
            duration_ns: d0,
            tallies: t0,
            deps: Vec::new(),
        });
        for block in &plan.nonzero_blocks[group] {
            let j = block.input_group;
            let mut tb = DeviceTallies::default();
            let d = if opts.bp {
                let vert_bytes = plan.input_group_sizes[j] * f_in * bpf;
                mem_sim.fetch(BufferKind::InputVertices, block_key(layer_idx, j), vert_bytes, &mut tb)
                    + mem_sim.fetch(
                        BufferKind::Edges,
                        block_key(0, group * plan.num_n_groups + j),
                        block.edge_count * super::latency::EDGE_ENTRY_BYTES,
                        &mut tb,
                    )
            } else {
                let mut d = mem_sim.fetch_uncached(block.edge_count * super::latency::EDGE_ENTRY_BYTES, &mut tb);
                for _ in 0..block.edge_count {
                    d += mem_sim.fetch_uncached(f_in * bpf, &mut tb);
                }
                d
            };
            fetch_chunks.push(ChunkSpec {
                duration_ns: d,
                tallies: tb,
                deps: Vec::new(),
            });
        }
        let mem_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_MEMORY,
            block: BlockKind::Memory,
            label: "gather",
            layer: layer_idx,
            group,
            chunks: fetch_chunks,
        });

        // W transform of every fetched vertex, V lanes per round
        let round_time: f64 = combine_chunk_durations(f_in, f_att, false, inst, dev, buf_lat)
            .iter()
            .sum();
        let mut rounds_per_slot = vec![1usize]; // self group: one round
        for block in &plan.nonzero_blocks[group] {
            rounds_per_slot.push(plan.input_group_sizes[block.input_group].div_ceil(cfg.v));
        }
        let total_rounds: usize = rounds_per_slot.iter().sum();
        let mut t1_chunks: Vec<ChunkSpec> = Vec::new();
        for (slot, &rounds) in rounds_per_slot.iter().enumerate() {
            for _ in 0..rounds {
                t1_chunks.push(ChunkSpec {
                    duration_ns: round_time,
                    tallies: DeviceTallies::default(),
                    deps: vec![(mem_id, slot)],
                });
            }
        }
        let mut t1_tallies = combine_group_tallies(f_in, f_att, false, inst, dev, opts);
        for _ in 1..total_rounds {
            let more = combine_group_tallies(f_in, f_att, false, inst, dev, opts);
            t1_tallies.add(&more);
        }
        let mut weight_tallies = DeviceTallies::default();
        if opts.bp {
            if group == 0 {
                t1_chunks[0].duration_ns += mem_sim.fetch(
                    BufferKind::Weights,
                    block_key(layer_idx, 0),
                    weight_bytes,
                    &mut weight_tallies,
                );
            }
        } else {
            t1_chunks[0].duration_ns += mem_sim.fetch_uncached(weight_bytes, &mut weight_tallies);
        }
        t1_tallies.add(&weight_tallies);
        t1_chunks[0].tallies = t1_tallies;
        let t1_id = stages.len();
        let t1_count = t1_chunks.len();
        stages.push(StageSpec {
            resource: RESOURCE_COMBINE,
            block: BlockKind::Combine,
            label: "transform",
            layer: layer_idx,
            group,
            chunks: t1_chunks,
        });

        // attention dot products, one reduce-fabric pass per head per pass
        let dot_count = passes * heads;
        let dot_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_COMBINE,
            block: BlockKind::Combine,
            label: "attention-dot",
            layer: layer_idx,
            group,
            chunks: (0..dot_count)
                .map(|k| ChunkSpec {
                    duration_ns: t_pass,
                    tallies: if k == 0 {
                        pass_tallies(inst, dev, dot_count as f64)
                    } else {
                        DeviceTallies::default()
                    },
                    deps: vec![(t1_id, dep_chunk(k, dot_count, t1_count))],
                })
                .collect(),
        });

        // leaky ReLU over the raw scores
        let lrelu_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_UPDATE,
            block: BlockKind::Update,
            label: "attention-lrelu",
            layer: layer_idx,
            group,
            chunks: (0..passes)
                .map(|k| {
                    let mut t = DeviceTallies::default();
                    if k == 0 {
                        t.vcsel_ns +=
                            passes as f64 * (cfg.v * cfg.t_r) as f64 * dev.vcsel.latency_ns;
                        t.soa_ns += passes as f64 * (cfg.v * cfg.t_r) as f64 * dev.soa.latency_ns;
                    }
                    ChunkSpec {
                        duration_ns: dev.vcsel.latency_ns + dev.soa.latency_ns,
                        tallies: t,
                        deps: vec![(dot_id, dep_chunk(k, passes, dot_count))],
                    }
                })
                .collect(),
        });

        // softmax waits for every neighbor score of the group
        let score_count = plan.per_group_max_degree[group] * heads;
        let mut sm_tallies = DeviceTallies::default();
        sm_tallies.adc_ns += (cfg.v * cfg.t_r) as f64 * dev.adc8.latency_ns;
        sm_tallies.dac_ns += (cfg.v * cfg.t_r) as f64 * dev.dac8.latency_ns;
        let sm_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_UPDATE,
            block: BlockKind::Update,
            label: "softmax",
            layer: layer_idx,
            group,
            chunks: vec![ChunkSpec {
                duration_ns: dev.adc8.latency_ns
                    + score_count as f64 * softmax_cycle_ns(dev)
                    + dev.dac8.latency_ns,
                tallies: sm_tallies,
                deps: vec![(lrelu_id, passes - 1)],
            }],
        });

        // attention weights re-imprint the transformed vertices
        let t2_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_COMBINE,
            block: BlockKind::Combine,
            label: "attention-apply",
            layer: layer_idx,
            group,
            chunks: (0..passes)
                .map(|k| ChunkSpec {
                    duration_ns: t_pass,
                    tallies: if k == 0 {
                        pass_tallies(inst, dev, passes as f64)
                    } else {
                        DeviceTallies::default()
                    },
                    deps: if k == 0 { vec![(sm_id, 0)] } else { Vec::new() },
                })
                .collect(),
        });

        // terminal reduce over the weighted neighbors
        let red_chunks = f_att.div_ceil(cfg.r_r);
        let red_id = stages.len();
        stages.push(StageSpec {
            resource: RESOURCE_AGGREGATE,
            block: BlockKind::Aggregate,
            label: "reduce",
            layer: layer_idx,
            group,
            chunks: (0..red_chunks)
                .map(|k| ChunkSpec {
                    duration_ns: passes as f64 * t_pass,
                    tallies: if k == 0 {
                        pass_tallies(inst, dev, (passes * red_chunks) as f64)
                    } else {
                        DeviceTallies::default()
                    },
                    deps: vec![(t2_id, dep_chunk(k, red_chunks, passes))],
                })
                .collect(),
        });

        // output activation over the concatenated heads
        if layer.activation != Activation::None {
            let (upd_total, upd_tallies) = update_latency(f_out, layer.activation, inst, dev);
            let u_chunks = f_out.div_ceil(cfg.t_r).max(1);
            let chunks = if layer.activation == Activation::Softmax {
                vec![ChunkSpec {
                    duration_ns: upd_total,
                    tallies: upd_tallies,
                    deps: vec![(red_id, red_chunks - 1)],
                }]
            } else {
                (0..u_chunks)
                    .map(|u| ChunkSpec {
                        duration_ns: upd_total / u_chunks as f64,
                        tallies: if u == 0 {
                            upd_tallies
                        } else {
                            DeviceTallies::default()
                        },
                        deps: vec![(red_id, dep_chunk(u, u_chunks, red_chunks))],
                    })
                    .collect()
            };
            stages.push(StageSpec {
                resource: RESOURCE_UPDATE,
                block: BlockKind::Update,
                label: "activate",
                layer: layer_idx,
                group,
                chunks,
            });
        }
    }
    stages
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{instantiate, ArchConfig, PhotonicLimits};
    use crate::gnn::{Family, GatConfig, GnnModelSpec, LayerSpec, ReduceOp};
    use crate::graph::{generate_graph, GraphKind};
    use crate::partition::build_partition_plan;

    fn toy_setup(
        n: usize,
        p: f64,
        seed: u64,
        cfg: ArchConfig,
        f: usize,
    ) -> (crate::graph::Graph, PartitionPlan, ArchInstance, DeviceLibrary, MemoryModel) {
        let g = generate_graph(GraphKind::ErdosRenyi, n, p, f, seed).unwrap();
        let plan = build_partition_plan(&g, cfg.v, cfg.n).unwrap();
        let dev = DeviceLibrary::default();
        let inst = instantiate(&cfg, &dev, &PhotonicLimits::design_defaults()).unwrap();
        (g, plan, inst, dev, MemoryModel::default())
    }

    fn gcn_spec(f_in: usize, f_out: usize) -> GnnModelSpec {
        GnnModelSpec {
            family: Family::Gcn,
            layers: vec![LayerSpec::dense(
                f_in,
                f_out,
                crate::gnn::seeded_weights(f_in * f_out, 3, 1.0),
                ReduceOp::Sum,
                crate::gnn::Activation::Relu,
            )],
            readout: None,
        }
    }

    fn gat_spec(f_in: usize, head_dim: usize, heads: usize) -> GnnModelSpec {
        let mut layer = LayerSpec::dense(
            f_in,
            head_dim,
            crate::gnn::seeded_weights(heads * f_in * head_dim, 5, 1.0),
            ReduceOp::Sum,
            crate::gnn::Activation::Relu,
        );
        layer.gat = Some(GatConfig {
            heads,
            attention: (0..heads)
                .map(|h| crate::gnn::seeded_weights(2 * head_dim, 7 + h as u64, 1.0))
                .collect(),
            concat: true,
        });
        GnnModelSpec {
            family: Family::Gat,
            layers: vec![layer],
            readout: None,
        }
    }

    #[test]
    fn serial_single_chunk_is_stage_sum() {
        let m = pipeline_makespan(&[(1, 5.0), (1, 7.0), (1, 11.0)], false);
        assert!((m - 23.0).abs() < 1e-12);
    }

    #[test]
    fn classic_pipeline_formula() {
        for k in [1usize, 2, 3, 5, 8, 13] {
            let t = 4.25;
            let m = pipeline_makespan(&[(k, t), (k, t), (k, t)], true);
            let want = (3 + k - 1) as f64 * t;
            assert!((m - want).abs() < 1e-9, "k={k}: {m} vs {want}");
        }
    }

    #[test]
    fn pp_never_hurts_synthetic() {
        let shapes = [(4, 3.0), (2, 9.0), (4, 1.5)];
        let on = pipeline_makespan(&shapes, true);
        let off = pipeline_makespan(&shapes, false);
        assert!(on <= off);
    }

    #[test]
    fn pp_on_bounds_real_schedule() {
        let cfg = ArchConfig::new(8, 8, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(48, 0.08, 11, cfg, 12);
        let spec = gcn_spec(12, 10);
        let mut on = cfg.optimizations;
        on.pp = true;
        let mut off = cfg.optimizations;
        off.pp = false;
        let t_on = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, on).unwrap();
        let t_off = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, off).unwrap();
        assert!(t_on.makespan_ns <= t_off.makespan_ns + 1e-9);
        assert!(t_on.makespan_ns < t_off.makespan_ns);
    }

    #[test]
    fn cross_group_reduce_precedence() {
        let cfg = ArchConfig::new(8, 8, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(40, 0.1, 3, cfg, 12);
        let spec = gcn_spec(12, 10);
        let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
        assert_reduce_precedence(&tl);
    }

    pub(crate) fn assert_reduce_precedence(tl: &Timeline) {
        // first reduce of group i+1 starts at or after the last reduce of
        // group i, per layer
        use std::collections::BTreeMap;
        let mut bounds: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for e in &tl.events {
            if e.block == BlockKind::Aggregate && e.stage == "reduce" {
                let entry = bounds
                    .entry((e.layer, e.group))
                    .or_insert((f64::INFINITY, f64::NEG_INFINITY));
                entry.0 = entry.0.min(e.start_ns);
                entry.1 = entry.1.max(e.end_ns);
            }
        }
        let mut prev: Option<((usize, usize), (f64, f64))> = None;
        for (key, val) in bounds {
            if let Some(((pl, pg), (_, pend))) = prev {
                if pl == key.0 && pg + 1 == key.1 {
                    assert!(
                        val.0 >= pend - 1e-9,
                        "group {} reduce starts {} before group {} reduce ends {}",
                        key.1,
                        val.0,
                        pg,
                        pend
                    );
                }
            }
            prev = Some((key, val));
        }
    }

    #[test]
    fn stage_order_within_group() {
        let cfg = ArchConfig::new(8, 8, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(24, 0.15, 9, cfg, 12);
        let spec = gcn_spec(12, 10);
        let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
        // transform chunk k never starts before its reduce chunk k ends
        for layer in 0..1 {
            for group in 0..plan.num_v_groups {
                let reduce_end: Vec<f64> = tl
                    .events
                    .iter()
                    .filter(|e| e.layer == layer && e.group == group && e.stage == "reduce")
                    .map(|e| e.end_ns)
                    .collect();
                for e in tl
                    .events
                    .iter()
                    .filter(|e| e.layer == layer && e.group == group && e.stage == "transform")
                {
                    let col_chunks = reduce_end.len();
                    let k = e.chunk % col_chunks;
                    assert!(e.start_ns >= reduce_end[k] - 1e-9);
                }
            }
        }
    }

    #[test]
    fn wb_never_increases_aggregate_makespan() {
        for seed in 0..20u64 {
            let cfg = ArchConfig::new(8, 8, 6, 4, 5);
            let (g, plan, inst, dev, mem) = toy_setup(48, 0.12, seed, cfg, 12);
            let spec = gcn_spec(12, 10);
            let base = OptFlags::new(true, true, false, false);
            let wb = OptFlags::new(true, true, false, true);
            let t0 = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, base).unwrap();
            let t1 = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, wb).unwrap();
            let agg0 = t0.busy_by_block()[0];
            let agg1 = t1.busy_by_block()[0];
            assert!(agg1 <= agg0 + 1e-9, "seed {seed}: {agg1} vs {agg0}");
        }
    }

    #[test]
    fn gat_stage_ordering() {
        let cfg = ArchConfig::new(6, 6, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(30, 0.12, 4, cfg, 8);
        let spec = gat_spec(8, 4, 2);
        let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
        // per group: softmax after every lrelu, reduce after softmax
        for group in 0..plan.num_v_groups {
            let of = |stage: &str| -> (f64, f64) {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for e in tl.events.iter().filter(|e| e.group == group && e.stage == stage) {
                    lo = lo.min(e.start_ns);
                    hi = hi.max(e.end_ns);
                }
                (lo, hi)
            };
            let lrelu = of("attention-lrelu");
            let softmax = of("softmax");
            let reduce = of("reduce");
            assert!(softmax.0 >= lrelu.1 - 1e-9);
            assert!(reduce.0 >= softmax.1 - 1e-9);
        }
        assert_reduce_precedence(&tl);
    }

    #[test]
    fn layers_serialize() {
        let cfg = ArchConfig::new(8, 8, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(24, 0.15, 2, cfg, 12);
        let spec = GnnModelSpec {
            family: Family::Gcn,
            layers: vec![
                LayerSpec::dense(12, 10, crate::gnn::seeded_weights(120, 1, 1.0), ReduceOp::Sum, crate::gnn::Activation::Relu),
                LayerSpec::dense(10, 6, crate::gnn::seeded_weights(60, 2, 1.0), ReduceOp::Sum, crate::gnn::Activation::Relu),
            ],
            readout: None,
        };
        let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
        let l0_end = tl
            .events
            .iter()
            .filter(|e| e.layer == 0)
            .map(|e| e.end_ns)
            .fold(0.0, f64::max);
        let l1_start = tl
            .events
            .iter()
            .filter(|e| e.layer == 1)
            .map(|e| e.start_ns)
            .fold(f64::INFINITY, f64::min);
        assert!(l1_start >= l0_end - 1e-9);
    }

    #[test]
    fn events_on_one_fabric_never_overlap() {
        let cfg = ArchConfig::new(6, 6, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(30, 0.12, 8, cfg, 8);
        for spec in [gcn_spec(8, 6), gat_spec(8, 4, 2)] {
            let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
            for kind in [
                BlockKind::Aggregate,
                BlockKind::Combine,
                BlockKind::Update,
                BlockKind::Memory,
            ] {
                let mut spans: Vec<(f64, f64)> = tl
                    .events
                    .iter()
                    .filter(|e| e.block == kind)
                    .map(|e| (e.start_ns, e.end_ns))
                    .collect();
                spans.sort_by(|a, b| a.0.total_cmp(&b.0));
                for pair in spans.windows(2) {
                    assert!(pair[1].0 >= pair[0].1 - 1e-9, "{kind:?}: {pair:?}");
                }
            }
        }
    }

    #[test]
    fn busy_time_covers_makespan() {
        let cfg = ArchConfig::new(8, 8, 6, 4, 5);
        let (g, plan, inst, dev, mem) = toy_setup(40, 0.1, 6, cfg, 12);
        let spec = gcn_spec(12, 10);
        let tl = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, cfg.optimizations).unwrap();
        let busy: f64 = tl.busy_by_block().iter().sum();
        assert!(busy >= tl.makespan_ns - 1e-9);
    }
}
