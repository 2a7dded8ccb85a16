//! Operation census, energy composition, and the simulation report.

use serde::Serialize;

use super::schedule::Timeline;
use super::tally::DeviceTallies;
use crate::arch::{ArchConfig, ArchInstance, DeviceLibrary};
use crate::engine::memory::MemoryModel;
use crate::error::Result;
use crate::gnn::{Activation, Family, GnnModelSpec, ReduceOp};
use crate::graph::Graph;
use crate::photonics::{dbm_to_watts, laser_power_dbm};

/// Functional operation count for the GOPS denominator. A multiply-add
/// counts as two operations; comparisons in max-reduce count like adds;
/// softmax is costed at three operations per element (exponent, sum share,
/// normalization).
pub fn op_count(spec: &GnnModelSpec, g: &Graph) -> u64 {
    let v = g.num_vertices() as u64;
    let mut total = 0u64;
    for layer in &spec.layers {
        let f_in = layer.in_dim as u64;
        let f_out_eff = layer.effective_out_dim() as u64;
        // effective edge count after the sampling cap
        let e: u64 = (0..g.num_vertices())
            .map(|x| {
                let d = g.in_degree(x);
                layer.sample_cap.map_or(d, |c| d.min(c)) as u64
            })
            .sum();
        if spec.family == Family::Gat {
            let heads = layer.heads() as u64;
            let head_dim = layer.out_dim as u64;
            let scores = e + v; // self edge per vertex
            total += heads * v * f_in * head_dim * 2; // W transform
            total += heads * scores * (2 * head_dim) * 2; // attention dots
            total += heads * scores; // leaky relu on scores
            total += heads * scores * 3; // softmax per score
            total += heads * scores * head_dim * 2; // weighted accumulate
        } else {
            total += e * f_in; // neighbor accumulation
            if layer.reduce_op == ReduceOp::Mean {
                total += v * f_in; // 1/n scaling
            }
            if layer.gin_epsilon.is_some() {
                total += v * f_in; // (1 + eps) self scaling
            }
            total += v * f_in * f_out_eff * 2; // transform MACs
        }
        if layer.batch_norm.is_some() {
            total += 2 * v * f_out_eff;
        }
        total += match layer.activation {
            Activation::None => 0,
            Activation::Softmax => 3 * v * f_out_eff,
            _ => v * f_out_eff,
        };
    }
    if let Some(_r) = spec.readout {
        let f_last = spec.layers.last().map_or(0, |l| l.effective_out_dim() as u64);
        total += v * f_last;
    }
    total
}

/// Per-device-class energy in joules.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub dac_j: f64,
    pub adc_j: f64,
    pub eo_tuning_j: f64,
    pub to_tuning_j: f64,
    pub vcsel_j: f64,
    pub pd_j: f64,
    pub soa_j: f64,
    pub laser_j: f64,
    pub dram_j: f64,
    pub buffer_j: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.dac_j
            + self.adc_j
            + self.eo_tuning_j
            + self.to_tuning_j
            + self.vcsel_j
            + self.pd_j
            + self.soa_j
            + self.laser_j
            + self.dram_j
            + self.buffer_j
    }
}

/// Compose run energy from device-activity tallies, the laser budget, and
/// memory traffic. Laser and thermal-tuning power draw for the whole
/// makespan; everything else is active-time energy.
pub fn energy(
    timeline: &Timeline,
    inst: &ArchInstance,
    dev: &DeviceLibrary,
    mem: &MemoryModel,
) -> Result<EnergyBreakdown> {
    let t: DeviceTallies = timeline.total_tallies();
    let ns = 1e-9;
    let pj = 1e-12;
    let makespan_s = timeline.makespan_ns * ns;

    let worst_loss = dev.worst_link_loss_db(&inst.config)?;
    let laser_dbm = laser_power_dbm(
        dev.loss_table.pd_sensitivity_dbm,
        worst_loss,
        inst.config.r_r.max(1),
    )?;
    let laser_w = inst.config.v as f64 * dbm_to_watts(laser_dbm) / dev.laser_wallplug_efficiency;

    Ok(EnergyBreakdown {
        dac_j: t.dac_ns * ns * dev.dac8.power_w,
        adc_j: t.adc_ns * ns * dev.adc8.power_w,
        eo_tuning_j: t.eo_tuning_ns * ns * dev.eo_tuning_power_w_per_nm * dev.avg_eo_shift_nm(),
        to_tuning_j: dev.to_tuning_power_w_per_fsr * dev.to_usage_fraction * makespan_s,
        vcsel_j: t.vcsel_ns * ns * dev.vcsel.power_w,
        pd_j: t.pd_ns * ns * dev.photodetector.power_w,
        soa_j: t.soa_ns * ns * dev.soa.power_w,
        laser_j: laser_w * makespan_s,
        dram_j: t.dram_accesses as f64 * mem.dram_access_energy_pj * pj
            + t.dram_bytes as f64 * mem.dram_energy_pj_per_byte * pj,
        buffer_j: t.buffer_accesses as f64 * mem.buffer_access_energy_pj * pj
            + t.buffer_bytes as f64 * mem.buffer_energy_pj_per_byte * pj,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BlockLatencies {
    pub aggregate_ns: f64,
    pub combine_ns: f64,
    pub update_ns: f64,
    pub memory_ns: f64,
}

/// Full per-run report. `gops = ops / latency` and `epb = energy / bits`
/// hold exactly by construction.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub config: ArchConfig,
    pub optimizations: String,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_layers: usize,
    pub latency_total_ns: f64,
    pub latency_by_block: BlockLatencies,
    pub energy_total_j: f64,
    pub energy_by_class: EnergyBreakdown,
    pub ops: u64,
    pub bits_processed: u64,
    pub gops: f64,
    pub epb_j_per_bit: f64,
    pub epb_per_gops: f64,
    pub determinism_hash: String,
}

impl SimReport {
    pub fn assemble(
        config: ArchConfig,
        timeline: &Timeline,
        breakdown: EnergyBreakdown,
        ops: u64,
        g: &Graph,
        num_layers: usize,
    ) -> SimReport {
        let busy = timeline.busy_by_block();
        let tallies = timeline.total_tallies();
        let bits = tallies.dram_bytes * 8;
        let energy_total = breakdown.total();
        let gops = ops as f64 / timeline.makespan_ns;
        let epb = energy_total / bits as f64;
        let mut report = SimReport {
            config,
            optimizations: config.optimizations.label(),
            num_vertices: g.num_vertices(),
            num_edges: g.num_edges(),
            num_layers,
            latency_total_ns: timeline.makespan_ns,
            latency_by_block: BlockLatencies {
                aggregate_ns: busy[0],
                combine_ns: busy[1],
                update_ns: busy[2],
                memory_ns: busy[3],
            },
            energy_total_j: energy_total,
            energy_by_class: breakdown,
            ops,
            bits_processed: bits,
            gops,
            epb_j_per_bit: epb,
            epb_per_gops: epb / gops,
            determinism_hash: String::new(),
        };
        report.determinism_hash = format!("{:016x}", fnv1a64(report.to_json().as_bytes()));
        report
    }

    /// Canonical JSON with the hash field blanked (the hash covers this).
    fn to_json(&self) -> String {
        let mut clone = self.clone();
        clone.determinism_hash = String::new();
        serde_json::to_string(&clone).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_header() -> &'static str {
        "n,v,r_r,r_c,t_r,precision_bits,optimizations,num_vertices,num_edges,num_layers,\
         latency_ns,aggregate_ns,combine_ns,update_ns,energy_j,ops,bits,gops,epb,epb_per_gops,hash"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:e},{},{},{},{:e},{:e},{}",
            self.config.n,
            self.config.v,
            self.config.r_r,
            self.config.r_c,
            self.config.t_r,
            self.config.precision_bits,
            self.optimizations,
            self.num_vertices,
            self.num_edges,
            self.num_layers,
            self.latency_total_ns,
            self.latency_by_block.aggregate_ns,
            self.latency_by_block.combine_ns,
            self.latency_by_block.update_ns,
            self.energy_total_j,
            self.ops,
            self.bits_processed,
            self.gops,
            self.epb_j_per_bit,
            self.epb_per_gops,
            self.determinism_hash,
        )
    }
}

/// 64-bit FNV-1a over a byte stream; the report's content hash (fast,
/// deterministic, not cryptographic).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{LayerSpec, Readout};
    use crate::graph::Graph;

    #[test]
    fn op_count_toy_example() {
        // |V| = 4, |E| = 6, F = 3, F_out = 2, GCN-sum + relu:
        // 18 aggregate adds + 48 MAC ops + 8 relu ops = 74
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (2, 1), (3, 0), (1, 2), (2, 3)], 3).unwrap();
        let spec = GnnModelSpec {
            family: Family::Gcn,
            layers: vec![LayerSpec::dense(
                3,
                2,
                vec![0.0; 6],
                ReduceOp::Sum,
                Activation::Relu,
            )],
            readout: None,
        };
        assert_eq!(op_count(&spec, &g), 74);
    }

    #[test]
    fn op_count_edge_cases() {
        let g = Graph::from_edges(5, &[], 3).unwrap();
        let spec = GnnModelSpec {
            family: Family::Gcn,
            layers: vec![LayerSpec::dense(3, 2, vec![0.0; 6], ReduceOp::Sum, Activation::Relu)],
            readout: None,
        };
        // edgeless: aggregate contributes nothing
        assert_eq!(op_count(&spec, &g), 5 * 3 * 2 * 2 + 5 * 2);

        // doubling F_out doubles the MAC term exactly
        let wide = GnnModelSpec {
            family: Family::Gcn,
            layers: vec![LayerSpec::dense(3, 4, vec![0.0; 12], ReduceOp::Sum, Activation::Relu)],
            readout: None,
        };
        let macs_narrow = 5 * 3 * 2 * 2u64;
        let macs_wide = 5 * 3 * 4 * 2u64;
        assert_eq!(
            op_count(&wide, &g) - 5 * 4,
            (op_count(&spec, &g) - 5 * 2) / macs_narrow * macs_wide
        );
    }

    #[test]
    fn readout_adds_final_pass() {
        let g = Graph::from_edges(3, &[], 2).unwrap();
        let mut spec = GnnModelSpec {
            family: Family::Gin,
            layers: vec![LayerSpec::dense(2, 2, vec![0.0; 4], ReduceOp::Sum, Activation::None)],
            readout: None,
        };
        let without = op_count(&spec, &g);
        spec.readout = Some(Readout::Sum);
        assert_eq!(op_count(&spec, &g), without + 3 * 2);
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), fnv1a64(b"a"));
        assert_ne!(fnv1a64(b"a"), fnv1a64(b"b"));
    }

    #[test]
    fn energy_composition_values() {
        use crate::arch::{instantiate, ArchConfig, DeviceLibrary, PhotonicLimits};
        use crate::engine::schedule::{BlockKind, TimelineEvent};
        use crate::engine::tally::DeviceTallies;
        let dev = DeviceLibrary::default();
        let inst = instantiate(
            &ArchConfig::new(4, 4, 6, 4, 5),
            &dev,
            &PhotonicLimits::design_defaults(),
        )
        .unwrap();
        let mem = crate::engine::memory::MemoryModel::default();

        // empty timeline: no dynamic energy, no laser-on time
        let empty = Timeline::default();
        let b = energy(&empty, &inst, &dev, &mem).unwrap();
        assert_eq!(b.total(), 0.0);

        // one photodetector active for 1 ns at 2.8 mW is 2.8e-12 J
        let mut tallies = DeviceTallies::default();
        tallies.pd_ns = 1.0;
        let one = Timeline {
            events: vec![TimelineEvent {
                block: BlockKind::Aggregate,
                layer: 0,
                group: 0,
                stage: "reduce",
                chunk: 0,
                start_ns: 0.0,
                end_ns: 0.0,
                tallies,
            }],
            makespan_ns: 0.0,
        };
        let b = energy(&one, &inst, &dev, &mem).unwrap();
        assert!((b.pd_j - 2.8e-12).abs() < 1e-24);
    }
}
