//! Parametric analytical memory model: a flat-latency DRAM channel behind
//! four on-chip buffers with FIFO residency tracking.

use serde::{Deserialize, Serialize};

use super::tally::DeviceTallies;
use crate::error::{Error, Result};

/// DRAM and buffer parameters. Bandwidth is a shared-pool model; accesses
/// pay a fixed latency plus the transfer time of their payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MemoryModel {
    pub dram_bandwidth_gbps: f64,
    pub dram_latency_ns: f64,
    pub input_vertex_buffer_bytes: usize,
    pub output_vertex_buffer_bytes: usize,
    pub edge_buffer_bytes: usize,
    pub weight_buffer_bytes: usize,
    pub buffer_read_latency_ns: f64,
    pub buffer_energy_pj_per_byte: f64,
    pub buffer_access_energy_pj: f64,
    pub dram_energy_pj_per_byte: f64,
    pub dram_access_energy_pj: f64,
}

impl Default for MemoryModel {
    fn default() -> Self {
        Self {
            dram_bandwidth_gbps: 256.0,
            dram_latency_ns: 100.0,
            input_vertex_buffer_bytes: 128 * 1024,
            output_vertex_buffer_bytes: 128 * 1024,
            edge_buffer_bytes: 256 * 1024,
            weight_buffer_bytes: 128 * 1024,
            buffer_read_latency_ns: 1.0,
            buffer_energy_pj_per_byte: 0.5,
            buffer_access_energy_pj: 2.0,
            dram_energy_pj_per_byte: 40.0,
            dram_access_energy_pj: 1000.0,
        }
    }
}

impl MemoryModel {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("memory-parse", e.to_string()))
    }

    pub fn check(&self) -> Result<()> {
        if self.dram_bandwidth_gbps <= 0.0 {
            return Err(Error::validation("bandwidth-not-positive", "dram bandwidth"));
        }
        Ok(())
    }

    /// Warnings that do not block a run (e.g. bandwidth past the HBM2
    /// ceiling of 256 GB/s).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dram_bandwidth_gbps > 256.0 {
            out.push(format!(
                "configured bandwidth {} GB/s exceeds the 256 GB/s HBM2 ceiling",
                self.dram_bandwidth_gbps
            ));
        }
        out
    }

    /// 1 GB/s moves exactly 1 byte per ns.
    fn transfer_ns(&self, bytes: usize) -> f64 {
        bytes as f64 / self.dram_bandwidth_gbps
    }
}

/// Time to pull `bytes` from DRAM on a miss: fixed access latency plus
/// bandwidth-limited transfer.
pub fn memory_fetch_time(bytes: usize, mem: &MemoryModel) -> f64 {
    mem.dram_latency_ns + mem.transfer_ns(bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BufferKind {
    InputVertices,
    OutputVertices,
    Edges,
    Weights,
}

#[derive(Debug, Clone, Default)]
struct BufferState {
    resident: Vec<(u64, usize)>,
    used: usize,
}

impl BufferState {
    fn contains(&self, key: u64) -> bool {
        self.resident.iter().any(|&(k, _)| k == key)
    }

    /// FIFO insertion; blocks larger than the capacity are never cached.
    fn insert(&mut self, key: u64, bytes: usize, capacity: usize) {
        if bytes > capacity {
            return;
        }
        while self.used + bytes > capacity {
            let (_, evicted) = self.resident.remove(0);
            self.used -= evicted;
        }
        self.resident.push((key, bytes));
        self.used += bytes;
    }
}

/// Buffer-residency tracker for one simulation run. Fetches return the
/// access latency and accumulate traffic counters.
#[derive(Debug, Clone)]
pub struct MemSim {
    model: MemoryModel,
    input_vertices: BufferState,
    output_vertices: BufferState,
    edges: BufferState,
    weights: BufferState,
}

impl MemSim {
    pub fn new(model: MemoryModel) -> Self {
        Self {
            model,
            input_vertices: BufferState::default(),
            output_vertices: BufferState::default(),
            edges: BufferState::default(),
            weights: BufferState::default(),
        }
    }

    pub fn model(&self) -> &MemoryModel {
        &self.model
    }

    fn slot(&mut self, kind: BufferKind) -> (&mut BufferState, usize) {
        match kind {
            BufferKind::InputVertices => (
                &mut self.input_vertices,
                self.model.input_vertex_buffer_bytes,
            ),
            BufferKind::OutputVertices => (
                &mut self.output_vertices,
                self.model.output_vertex_buffer_bytes,
            ),
            BufferKind::Edges => (&mut self.edges, self.model.edge_buffer_bytes),
            BufferKind::Weights => (&mut self.weights, self.model.weight_buffer_bytes),
        }
    }

    /// Buffered fetch: a resident block costs one buffer read; a miss pays
    /// the DRAM path and installs the block.
    pub fn fetch(&mut self, kind: BufferKind, key: u64, bytes: usize, t: &mut DeviceTallies) -> f64 {
        let buffer_latency = self.model.buffer_read_latency_ns;
        let miss_latency = memory_fetch_time(bytes, &self.model);
        let (state, capacity) = self.slot(kind);
        if state.contains(key) {
            t.buffer_accesses += 1;
            t.buffer_bytes += bytes as u64;
            buffer_latency
        } else {
            state.insert(key, bytes, capacity);
            t.dram_accesses += 1;
            t.dram_bytes += bytes as u64;
            // the consumer reads out of the buffer after the fill
            t.buffer_accesses += 1;
            t.buffer_bytes += bytes as u64;
            miss_latency
        }
    }

    /// Unbuffered fetch (baseline path): always the full DRAM round trip.
    pub fn fetch_uncached(&mut self, bytes: usize, t: &mut DeviceTallies) -> f64 {
        t.dram_accesses += 1;
        t.dram_bytes += bytes as u64;
        memory_fetch_time(bytes, &self.model)
    }
}

/// Composite residency key: high bits distinguish the epoch (layer), low
/// bits the block index.
pub fn block_key(epoch: usize, index: usize) -> u64 {
    ((epoch as u64) << 32) | index as u64
}
