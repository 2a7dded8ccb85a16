//! Buffer-and-partition decomposition of the adjacency matrix.
//!
//! Output (destination) vertices are grouped into blocks of `v_group_size`
//! and input (source) vertices into blocks of `n_group_size`; edges fall
//! into the resulting grid and all-zero blocks are skipped entirely. Group
//! assignment is by contiguous ascending vertex index.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// One non-empty edge block `(output group, input group)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRef {
    pub input_group: usize,
    pub edge_count: usize,
    /// Max over destination vertices in the output group of the number of
    /// sources contributed by this input group.
    pub max_in_block_degree: usize,
}

/// The V x N block decomposition with zero-block skip list and fetch order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub v_group_size: usize,
    pub n_group_size: usize,
    pub num_v_groups: usize,
    pub num_n_groups: usize,
    /// Per output group, ascending list of non-empty input blocks.
    pub nonzero_blocks: Vec<Vec<BlockRef>>,
    /// Per output group: 1 (self) + max in-degree within the group.
    pub per_group_max_degree: Vec<usize>,
    /// Flattened `(i, j)` visit sequence: groups ascending, blocks ascending.
    pub fetch_order: Vec<(usize, usize)>,
    /// Number of destination vertices actually present in each output group
    /// (the last group may be partial).
    pub group_sizes: Vec<usize>,
    /// Number of source vertices present in each input group.
    pub input_group_sizes: Vec<usize>,
    total_edges: usize,
}

impl PartitionPlan {
    pub fn total_edges(&self) -> usize {
        self.total_edges
    }

    /// Count of all-zero blocks skipped by the plan.
    pub fn skipped_block_count(&self) -> usize {
        self.num_v_groups * self.num_n_groups
            - self.nonzero_blocks.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn nonzero_block_count(&self) -> usize {
        self.nonzero_blocks.iter().map(|b| b.len()).sum()
    }

    /// Export with the documented JSON schema: `v_group_size`,
    /// `n_group_size`, `nonzero_blocks` (input-group indices only),
    /// `per_group_max_degree`, `fetch_order`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "v_group_size": self.v_group_size,
            "n_group_size": self.n_group_size,
            "num_v_groups": self.num_v_groups,
            "num_n_groups": self.num_n_groups,
            "nonzero_blocks": self
                .nonzero_blocks
                .iter()
                .map(|row| row.iter().map(|b| b.input_group).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "per_group_max_degree": self.per_group_max_degree,
            "fetch_order": self.fetch_order,
        })
    }
}

/// Decompose `g` into a `PartitionPlan` with output groups of `v_group_size`
/// and input groups of `n_group_size`. Single CSR scan.
pub fn build_partition_plan(g: &Graph, v_group_size: usize, n_group_size: usize) -> Result<PartitionPlan> {
    if v_group_size < 1 || n_group_size < 1 {
        return Err(Error::validation(
            "group-size-zero",
            "group sizes must be >= 1",
        ));
    }
    let n = g.num_vertices();
    let num_v_groups = n.div_ceil(v_group_size);
    let num_n_groups = n.div_ceil(n_group_size);

    let mut nonzero_blocks: Vec<Vec<BlockRef>> = Vec::with_capacity(num_v_groups);
    let mut per_group_max_degree = vec![1usize; num_v_groups];
    let mut group_sizes = vec![0usize; num_v_groups];
    for v in 0..n {
        group_sizes[v / v_group_size] += 1;
    }
    let mut input_group_sizes = vec![0usize; num_n_groups];
    for u in 0..n {
        input_group_sizes[u / n_group_size] += 1;
    }

    // Per-block scratch, reused across output groups.
    let mut edge_counts = vec![0usize; num_n_groups];
    let mut block_max = vec![0usize; num_n_groups];
    let mut vertex_block = vec![0usize; num_n_groups];

    for (i, group_degree) in per_group_max_degree.iter_mut().enumerate().take(num_v_groups) {
        edge_counts.iter_mut().for_each(|c| *c = 0);
        block_max.iter_mut().for_each(|c| *c = 0);
        let lo = i * v_group_size;
        let hi = ((i + 1) * v_group_size).min(n);
        let mut group_max_indeg = 0usize;
        for v in lo..hi {
            vertex_block.iter_mut().for_each(|c| *c = 0);
            let row = g.in_neighbors(v);
            group_max_indeg = group_max_indeg.max(row.len());
            for &u in row {
                vertex_block[u / n_group_size] += 1;
            }
            for j in 0..num_n_groups {
                edge_counts[j] += vertex_block[j];
                block_max[j] = block_max[j].max(vertex_block[j]);
            }
        }
        *group_degree = 1 + group_max_indeg;
        let blocks: Vec<BlockRef> = (0..num_n_groups)
            .filter(|&j| edge_counts[j] > 0)
            .map(|j| BlockRef {
                input_group: j,
                edge_count: edge_counts[j],
                max_in_block_degree: block_max[j],
            })
            .collect();
        nonzero_blocks.push(blocks);
    }

    let fetch_order: Vec<(usize, usize)> = nonzero_blocks
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |b| (i, b.input_group)))
        .collect();

    Ok(PartitionPlan {
        v_group_size,
        n_group_size,
        num_v_groups,
        num_n_groups,
        nonzero_blocks,
        per_group_max_degree,
        fetch_order,
        group_sizes,
        input_group_sizes,
        total_edges: g.num_edges(),
    })
}
