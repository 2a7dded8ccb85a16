//! Graph representation, ingestion, and synthetic generation.
//!
//! Adjacency is stored destination-major in CSR form: for every destination
//! vertex the sorted list of its source vertices. This matches the access
//! pattern of the aggregate stage, which walks the in-neighborhood of each
//! output vertex.

use std::io::{BufRead, Write};

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sparse directed graph with optional dense per-vertex features.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_vertices: usize,
    feature_dim: usize,
    /// CSR row offsets, destination-major; length `num_vertices + 1`.
    row_offsets: Vec<usize>,
    /// Concatenated source lists, strictly increasing within each row.
    sources: Vec<usize>,
    /// Row-major `num_vertices x feature_dim` matrix, if present.
    features: Option<Vec<f64>>,
    /// One value per stored edge, aligned with `sources`.
    edge_features: Option<Vec<f64>>,
    directed: bool,
}

impl Graph {
    /// Build a graph from directed `(src, dst)` pairs. Duplicate edges are
    /// silently merged; indices are validated against `num_vertices`.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)], feature_dim: usize) -> Result<Self> {
        for &(s, d) in edges {
            if s >= num_vertices || d >= num_vertices {
                return Err(Error::validation(
                    "index-out-of-range",
                    format!("edge ({s}, {d}) outside 0..{num_vertices}"),
                ));
            }
        }
        let mut per_dst: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
        for &(s, d) in edges {
            per_dst[d].push(s);
        }
        let mut row_offsets = Vec::with_capacity(num_vertices + 1);
        let mut sources = Vec::with_capacity(edges.len());
        row_offsets.push(0);
        for list in per_dst.iter_mut() {
            list.sort_unstable();
            list.dedup();
            sources.extend_from_slice(list);
            row_offsets.push(sources.len());
        }
        Ok(Self {
            num_vertices,
            feature_dim,
            row_offsets,
            sources,
            features: None,
            edge_features: None,
            directed: true,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.sources.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Sorted source vertices of `dst`.
    pub fn in_neighbors(&self, dst: usize) -> &[usize] {
        &self.sources[self.row_offsets[dst]..self.row_offsets[dst + 1]]
    }

    pub fn in_degree(&self, dst: usize) -> usize {
        self.row_offsets[dst + 1] - self.row_offsets[dst]
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn has_features(&self) -> bool {
        self.features.is_some()
    }

    pub fn feature_row(&self, v: usize) -> Option<&[f64]> {
        self.features
            .as_ref()
            .map(|m| &m[v * self.feature_dim..(v + 1) * self.feature_dim])
    }

    pub fn features(&self) -> Option<&[f64]> {
        self.features.as_deref()
    }

    /// Install a dense feature matrix; shape must be exactly
    /// `num_vertices x feature_dim`.
    pub fn set_features(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.num_vertices * self.feature_dim {
            return Err(Error::validation(
                "feature-shape-mismatch",
                format!(
                    "expected {} x {} values, got {}",
                    self.num_vertices,
                    self.feature_dim,
                    values.len()
                ),
            ));
        }
        self.features = Some(values);
        Ok(())
    }

    /// Per-edge feature values aligned with the CSR source order.
    pub fn set_edge_features(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.sources.len() {
            return Err(Error::validation(
                "edge-feature-shape-mismatch",
                format!("expected {} values, got {}", self.sources.len(), values.len()),
            ));
        }
        self.edge_features = Some(values);
        Ok(())
    }

    pub fn edge_features(&self) -> Option<&[f64]> {
        self.edge_features.as_deref()
    }

    /// Offset of the first edge of `dst` in the edge-feature array.
    pub fn edge_offset(&self, dst: usize) -> usize {
        self.row_offsets[dst]
    }

    /// Iterate all edges as `(src, dst)` pairs in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices).flat_map(move |d| self.in_neighbors(d).iter().map(move |&s| (s, d)))
    }

    /// Check the structural invariants; used by loaders and tests.
    pub fn check_invariants(&self) -> Result<()> {
        if self.row_offsets.len() != self.num_vertices + 1 || self.row_offsets[0] != 0 {
            return Err(Error::validation("csr-offsets-invalid", "bad offset array"));
        }
        for w in self.row_offsets.windows(2) {
            if w[1] < w[0] {
                return Err(Error::validation("csr-offsets-invalid", "offsets decrease"));
            }
        }
        for d in 0..self.num_vertices {
            let row = self.in_neighbors(d);
            for pair in row.windows(2) {
                if pair[1] <= pair[0] {
                    return Err(Error::validation(
                        "csr-row-not-strict",
                        format!("row {d} not strictly increasing"),
                    ));
                }
            }
            if let Some(&last) = row.last() {
                if last >= self.num_vertices {
                    return Err(Error::validation("index-out-of-range", format!("row {d}")));
                }
            }
        }
        if let Some(f) = &self.features {
            if f.len() != self.num_vertices * self.feature_dim {
                return Err(Error::validation("feature-shape-mismatch", "feature matrix"));
            }
        }
        Ok(())
    }
}

/// Parse an edge-list text stream: one `src dst [weight]` per line,
/// whitespace-separated, `#`-prefixed comment lines ignored.
///
/// An optional feature stream (CSV, one row per vertex) fills the feature
/// matrix; absent means no features.
pub fn load_edge_list<R: BufRead>(
    source: R,
    num_vertices: usize,
    feature_dim: usize,
    feature_source: Option<&mut dyn BufRead>,
) -> Result<Graph> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut saw_weight = false;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let src: usize = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing source index"))?
            .parse()
            .map_err(|_| Error::parse(lineno, "source index not a non-negative integer"))?;
        let dst: usize = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing destination index"))?
            .parse()
            .map_err(|_| Error::parse(lineno, "destination index not a non-negative integer"))?;
        if let Some(w) = parts.next() {
            let w: f64 = w
                .parse()
                .map_err(|_| Error::parse(lineno, "weight not a real number"))?;
            weights.push(w);
            saw_weight = true;
        } else {
            weights.push(1.0);
        }
        if parts.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens after edge entry"));
        }
        if src >= num_vertices || dst >= num_vertices {
            return Err(Error::validation(
                "index-out-of-range",
                format!("line {lineno}: edge ({src}, {dst}) outside 0..{num_vertices}"),
            ));
        }
        edges.push((src, dst));
    }

    let mut graph = Graph::from_edges(num_vertices, &edges, feature_dim)?;

    // Edge weights survive dedup by keeping the last value seen per edge.
    if saw_weight {
        let mut ef = vec![1.0; graph.num_edges()];
        for (k, &(s, d)) in edges.iter().enumerate() {
            let row = graph.in_neighbors(d);
            let pos = row.binary_search(&s).expect("edge present after build");
            ef[graph.edge_offset(d) + pos] = weights[k];
        }
        graph.set_edge_features(ef)?;
    }

    if let Some(fs) = feature_source {
        let features = load_feature_csv(fs, num_vertices, feature_dim)?;
        graph.set_features(features)?;
    }
    Ok(graph)
}

/// Parse a dense feature matrix from CSV: one row per vertex,
/// `feature_dim` comma-separated reals per row.
pub fn load_feature_csv<R: BufRead + ?Sized>(
    source: &mut R,
    num_vertices: usize,
    feature_dim: usize,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(num_vertices * feature_dim);
    let mut rows = 0usize;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row: Vec<&str> = trimmed.split(',').collect();
        if row.len() != feature_dim {
            return Err(Error::parse(
                lineno,
                format!("expected {feature_dim} columns, got {}", row.len()),
            ));
        }
        for cell in row {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, "feature value not a real number"))?;
            values.push(v);
        }
        rows += 1;
    }
    if rows != num_vertices {
        return Err(Error::validation(
            "feature-shape-mismatch",
            format!("expected {num_vertices} rows, got {rows}"),
        ));
    }
    Ok(values)
}

/// Synthetic graph families used as desk-scale workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    ErdosRenyi,
    PowerLaw,
    Star,
    Chain,
}

impl GraphKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "erdos_renyi" => Ok(GraphKind::ErdosRenyi),
            "power_law" => Ok(GraphKind::PowerLaw),
            "star" => Ok(GraphKind::Star),
            "chain" => Ok(GraphKind::Chain),
            other => Err(Error::validation(
                "unknown-graph-kind",
                format!("'{other}' (expected erdos_renyi | power_law | star | chain)"),
            )),
        }
    }
}

/// Generate a synthetic graph. Deterministic for a fixed seed: topology and
/// features draw from independent ChaCha streams so changing `feature_dim`
/// never perturbs the edge set.
pub fn generate_graph(
    kind: GraphKind,
    n: usize,
    param: f64,
    feature_dim: usize,
    seed: u64,
) -> Result<Graph> {
    if n < 1 {
        return Err(Error::validation("graph-size-zero", "n must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = match kind {
        GraphKind::ErdosRenyi => {
            if !(0.0..=1.0).contains(&param) {
                return Err(Error::validation(
                    "invalid-graph-param",
                    format!("edge probability {param} outside [0, 1]"),
                ));
            }
            let mut e = Vec::new();
            for s in 0..n {
                for d in 0..n {
                    if s != d && rng.gen::<f64>() < param {
                        e.push((s, d));
                    }
                }
            }
            e
        }
        GraphKind::PowerLaw => {
            if param <= 1.0 {
                return Err(Error::validation(
                    "invalid-graph-param",
                    format!("power-law exponent {param} must be > 1"),
                ));
            }
            // Discrete degree distribution P(k) proportional to k^-param,
            // k in 1..n; each vertex picks that many distinct out-targets.
            let max_deg = n.saturating_sub(1).max(1);
            let weights: Vec<f64> = (1..=max_deg).map(|k| (k as f64).powf(-param)).collect();
            let total: f64 = weights.iter().sum();
            let mut e = Vec::new();
            for s in 0..n {
                if n == 1 {
                    break;
                }
                let mut x = rng.gen::<f64>() * total;
                let mut deg = max_deg;
                for (k, w) in weights.iter().enumerate() {
                    if x < *w {
                        deg = k + 1;
                        break;
                    }
                    x -= w;
                }
                let mut targets = Vec::with_capacity(deg);
                while targets.len() < deg {
                    let t = rng.gen_range(0..n);
                    if t != s && !targets.contains(&t) {
                        targets.push(t);
                    }
                }
                for t in targets {
                    e.push((s, t));
                }
            }
            e
        }
        GraphKind::Star => (1..n).map(|v| (v, 0)).collect(),
        GraphKind::Chain => (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect(),
    };
    let mut g = Graph::from_edges(n, &edges, feature_dim)?;
    if feature_dim > 0 {
        let mut frng = ChaCha8Rng::seed_from_u64(seed);
        frng.set_stream(1);
        let dist = Uniform::new_inclusive(-1.0f64, 1.0f64);
        let values: Vec<f64> = (0..n * feature_dim).map(|_| dist.sample(&mut frng)).collect();
        g.set_features(values)?;
    }
    Ok(g)
}

/// Write the graph as an edge-list file (header comment + one edge per line).
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# vertices={} edges={} directed={}",
        g.num_vertices(),
        g.num_edges(),
        g.is_directed()
    )?;
    for (s, d) in g.edges() {
        writeln!(out, "{s} {d}")?;
    }
    Ok(())
}

/// Write the feature matrix as CSV, one row per vertex.
pub fn write_feature_csv<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    if let Some(f) = g.features() {
        for v in 0..g.num_vertices() {
            let row = &f[v * g.feature_dim()..(v + 1) * g.feature_dim()];
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
    }
    Ok(())
}
