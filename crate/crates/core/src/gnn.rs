//! Functional GNN inference through gather/reduce/transform/activate
//! semantics, for GCN, GraphSAGE, GIN, and GAT, with optional symmetric
//! quantization.
//!
//! This module is the functional reference: the performance engine derives
//! schedules from the same layer structure, and every layer here is checked
//! against an independent dense-adjacency implementation in the tests.

use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gcn,
    Graphsage,
    Gin,
    Gat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceOp {
    Sum,
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu(f64),
    Sigmoid,
    Tanh,
    Softmax,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    Sum,
    Mean,
    Max,
}

/// Attention configuration for GAT layers. `attention[h]` has length
/// `2 * out_dim` (the concatenated [Wh_v || Wh_u] projector for head `h`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatConfig {
    pub heads: usize,
    pub attention: Vec<Vec<f64>>,
    /// Concatenate head outputs (true) or average them (false).
    pub concat: bool,
}

/// Slope of the leaky ReLU inside the attention score (standard value; the
/// output activation carries its own slope).
pub const GAT_ATTENTION_SLOPE: f64 = 0.2;

/// One GNN layer. `weights` is row-major `in_dim x out_dim`; for GAT it
/// holds `heads` stacked matrices and `out_dim` is the per-head width.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub reduce_op: ReduceOp,
    pub activation: Activation,
    pub batch_norm: Option<(Vec<f64>, Vec<f64>)>,
    pub gat: Option<GatConfig>,
    pub gin_epsilon: Option<f64>,
    /// GraphSAGE-style fixed-size neighbor sampling: neighbor lists longer
    /// than the cap are truncated by a seeded draw.
    pub sample_cap: Option<usize>,
    pub sample_seed: u64,
    /// Symmetric degree normalization for GCN sum-reduce (off by default;
    /// the plain form is `(A + I) H W`). Used for oracle comparisons.
    pub gcn_normalize: bool,
}

impl LayerSpec {
    /// Plain dense layer with identity-free defaults.
    pub fn dense(in_dim: usize, out_dim: usize, weights: Vec<f64>, reduce_op: ReduceOp, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            weights,
            reduce_op,
            activation,
            batch_norm: None,
            gat: None,
            gin_epsilon: None,
            sample_cap: None,
            sample_seed: 0,
            gcn_normalize: false,
        }
    }

    pub fn heads(&self) -> usize {
        self.gat.as_ref().map_or(1, |g| g.heads)
    }

    /// Output width after head concatenation/averaging.
    pub fn effective_out_dim(&self) -> usize {
        match &self.gat {
            Some(g) if g.concat => self.out_dim * g.heads,
            _ => self.out_dim,
        }
    }

    /// Weight matrix of one attention head (the only matrix for non-GAT).
    pub fn head_weights(&self, head: usize) -> &[f64] {
        let size = self.in_dim * self.out_dim;
        &self.weights[head * size..(head + 1) * size]
    }

    pub fn check(&self) -> Result<()> {
        if self.in_dim < 1 || self.out_dim < 1 {
            return Err(Error::validation(
                "layer-dims-zero",
                format!("in_dim {} / out_dim {} must be >= 1", self.in_dim, self.out_dim),
            ));
        }
        let heads = self.heads();
        if self.weights.len() != heads * self.in_dim * self.out_dim {
            return Err(Error::validation(
                "weight-shape-mismatch",
                format!(
                    "expected {} x {} x {} weights, got {}",
                    heads,
                    self.in_dim,
                    self.out_dim,
                    self.weights.len()
                ),
            ));
        }
        if let Some((scale, shift)) = &self.batch_norm {
            let want = self.effective_out_dim();
            if scale.len() != want || shift.len() != want {
                return Err(Error::validation(
                    "batch-norm-shape-mismatch",
                    format!("expected length {want}"),
                ));
            }
        }
        if let Some(g) = &self.gat {
            if g.heads == 0 {
                return Err(Error::validation("gat-heads-zero", "need >= 1 head"));
            }
            if g.attention.len() != g.heads
                || g.attention.iter().any(|a| a.len() != 2 * self.out_dim)
            {
                return Err(Error::validation(
                    "gat-attention-shape-mismatch",
                    format!("need {} vectors of length {}", g.heads, 2 * self.out_dim),
                ));
            }
        }
        Ok(())
    }
}

/// A full model: a layer stack plus an optional graph-level readout.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnModelSpec {
    pub family: Family,
    pub layers: Vec<LayerSpec>,
    pub readout: Option<Readout>,
}

impl GnnModelSpec {
    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::validation("model-empty", "need >= 1 layer"));
        }
        for layer in &self.layers {
            layer.check()?;
            if self.family != Family::Gat && layer.gat.is_some() {
                return Err(Error::validation(
                    "gat-config-on-conv-layer",
                    "attention config requires the gat family",
                ));
            }
            if self.family == Family::Gat && layer.gat.is_none() {
                return Err(Error::validation(
                    "gat-config-missing",
                    "gat layers need an attention config",
                ));
            }
        }
        for pair in self.layers.windows(2) {
            if pair[0].effective_out_dim() != pair[1].in_dim {
                return Err(Error::validation(
                    "layer-dims-mismatch",
                    format!(
                        "layer output {} does not chain into input {}",
                        pair[0].effective_out_dim(),
                        pair[1].in_dim
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Dense vertex-feature matrix, optionally quantized.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub num_rows: usize,
    pub dim: usize,
    pub values: Vec<f64>,
    pub quantized: bool,
    pub bits: u32,
    pub scale: f64,
}

impl FeatureMatrix {
    pub fn new(num_rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != num_rows * dim {
            return Err(Error::validation(
                "feature-shape-mismatch",
                format!("expected {} values, got {}", num_rows * dim, values.len()),
            ));
        }
        Ok(Self {
            num_rows,
            dim,
            values,
            quantized: false,
            bits: 0,
            scale: 0.0,
        })
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        let values = g
            .features()
            .ok_or_else(|| Error::validation("features-missing", "graph has no feature matrix"))?;
        Self::new(g.num_vertices(), g.feature_dim(), values.to_vec())
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.values[v * self.dim..(v + 1) * self.dim]
    }
}

// ---------------------------------------------------------------------------
// The four user-defined functions
// ---------------------------------------------------------------------------

/// Build the message a source vertex sends along one edge: the source
/// features, scaled elementwise by edge features when present (a length-1
/// edge feature broadcasts as a scalar weight).
pub fn gather(h_u: &[f64], h_v: &[f64], h_uv: Option<&[f64]>) -> Result<Vec<f64>> {
    if h_u.len() != h_v.len() {
        return Err(Error::validation(
            "gather-dim-mismatch",
            format!("h_u length {} vs h_v length {}", h_u.len(), h_v.len()),
        ));
    }
    match h_uv {
        None => Ok(h_u.to_vec()),
        Some(e) if e.len() == 1 => Ok(h_u.iter().map(|x| x * e[0]).collect()),
        Some(e) if e.len() == h_u.len() => Ok(h_u.iter().zip(e).map(|(x, w)| x * w).collect()),
        Some(e) => Err(Error::validation(
            "gather-dim-mismatch",
            format!("edge feature length {} vs message length {}", e.len(), h_u.len()),
        )),
    }
}

/// Fold the self vector and neighbor messages into the aggregated vector:
/// sum gives `h_v + sum(h_u)`, mean gives `h_v + (1/n) sum(h_u)`, max takes
/// the elementwise maximum over self and messages. A set `gin_epsilon`
/// weights the self term by `(1 + eps)`.
pub fn reduce(
    h_v: &[f64],
    messages: &[Vec<f64>],
    op: ReduceOp,
    gin_epsilon: Option<f64>,
) -> Result<Vec<f64>> {
    for m in messages {
        if m.len() != h_v.len() {
            return Err(Error::validation(
                "reduce-dim-mismatch",
                format!("message length {} vs {}", m.len(), h_v.len()),
            ));
        }
    }
    let self_weight = 1.0 + gin_epsilon.unwrap_or(0.0);
    match op {
        ReduceOp::Sum => {
            let mut out: Vec<f64> = h_v.iter().map(|x| x * self_weight).collect();
            for m in messages {
                for (o, x) in out.iter_mut().zip(m) {
                    *o += x;
                }
            }
            Ok(out)
        }
        ReduceOp::Mean => {
            let mut out: Vec<f64> = h_v.iter().map(|x| x * self_weight).collect();
            if !messages.is_empty() {
                let inv = 1.0 / messages.len() as f64;
                for m in messages {
                    for (o, x) in out.iter_mut().zip(m) {
                        *o += x * inv;
                    }
                }
            }
            Ok(out)
        }
        ReduceOp::Max => {
            let mut out = h_v.to_vec();
            for m in messages {
                for (o, x) in out.iter_mut().zip(m) {
                    if *x > *o {
                        *o = *x;
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Row-vector times weight matrix, then optional batch norm.
pub fn transform(h: &[f64], layer: &LayerSpec) -> Result<Vec<f64>> {
    if h.len() != layer.in_dim {
        return Err(Error::validation(
            "transform-dim-mismatch",
            format!("input length {} vs in_dim {}", h.len(), layer.in_dim),
        ));
    }
    let mut y = matvec_row(h, layer.head_weights(0), layer.in_dim, layer.out_dim);
    if let Some((scale, shift)) = &layer.batch_norm {
        for (i, v) in y.iter_mut().enumerate() {
            *v = scale[i] * *v + shift[i];
        }
    }
    Ok(y)
}

fn matvec_row(h: &[f64], w: &[f64], in_dim: usize, out_dim: usize) -> Vec<f64> {
    let mut y = vec![0.0; out_dim];
    for (i, &hi) in h.iter().enumerate().take(in_dim) {
        let row = &w[i * out_dim..(i + 1) * out_dim];
        for (j, &wij) in row.iter().enumerate() {
            y[j] += hi * wij;
        }
    }
    y
}

/// Elementwise nonlinearity; softmax normalizes the whole vector with
/// max-subtraction for stability.
pub fn activate(y: &[f64], f: Activation) -> Vec<f64> {
    match f {
        Activation::Relu => y.iter().map(|&x| x.max(0.0)).collect(),
        Activation::LeakyRelu(alpha) => y
            .iter()
            .map(|&x| if x >= 0.0 { x } else { alpha * x })
            .collect(),
        Activation::Sigmoid => y.iter().map(|&x| 1.0 / (1.0 + (-x).exp())).collect(),
        Activation::Tanh => y.iter().map(|&x| x.tanh()).collect(),
        Activation::Softmax => softmax(y),
        Activation::None => y.to_vec(),
    }
}

fn softmax(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = y.iter().map(|&x| (x - m).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / total).collect()
}

/// Neighbor list after the GraphSAGE sampling cap: lists no longer than the
/// cap pass through; longer ones are drawn without replacement by a ChaCha
/// stream keyed on (seed, vertex), then re-sorted.
pub fn sampled_neighbors(g: &Graph, v: usize, cap: Option<usize>, seed: u64) -> Vec<usize> {
    let neigh = g.in_neighbors(v);
    match cap {
        Some(c) if neigh.len() > c => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (v as u64).wrapping_mul(0x9e3779b97f4a7c15));
            let mut pool: Vec<usize> = neigh.to_vec();
            // partial Fisher-Yates: the first c slots become the sample
            for i in 0..c {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            let mut sample = pool[..c].to_vec();
            sample.sort_unstable();
            sample
        }
        _ => neigh.to_vec(),
    }
}

/// Attention weights for vertex `v` at one head: scores over the listed
/// neighbors followed by the self vertex, softmax-normalized. Output order
/// is `[neighbors..., v]` and the weights sum to 1.
pub fn gat_attention_coeffs(
    v: usize,
    neighbors: &[usize],
    layer: &LayerSpec,
    head: usize,
    h: &FeatureMatrix,
) -> Result<Vec<f64>> {
    let gat = layer
        .gat
        .as_ref()
        .ok_or_else(|| Error::validation("gat-config-missing", "layer has no attention config"))?;
    if head >= gat.heads {
        return Err(Error::domain(format!("head {head} out of {}", gat.heads)));
    }
    let w = layer.head_weights(head);
    let a = &gat.attention[head];
    let wh_v = matvec_row(h.row(v), w, layer.in_dim, layer.out_dim);
    let mut scores = Vec::with_capacity(neighbors.len() + 1);
    for &u in neighbors.iter().chain(std::iter::once(&v)) {
        let wh_u = matvec_row(h.row(u), w, layer.in_dim, layer.out_dim);
        let mut e = 0.0;
        for (k, &x) in wh_v.iter().enumerate() {
            e += a[k] * x;
        }
        for (k, &x) in wh_u.iter().enumerate() {
            e += a[layer.out_dim + k] * x;
        }
        scores.push(if e >= 0.0 { e } else { GAT_ATTENTION_SLOPE * e });
    }
    Ok(softmax(&scores))
}

// ---------------------------------------------------------------------------
// Layer and model execution
// ---------------------------------------------------------------------------

/// Run one layer over every vertex.
pub fn run_layer(g: &Graph, layer: &LayerSpec, h: &FeatureMatrix, family: Family) -> Result<FeatureMatrix> {
    layer.check()?;
    if h.dim != layer.in_dim {
        return Err(Error::validation(
            "layer-dims-mismatch",
            format!("features dim {} vs in_dim {}", h.dim, layer.in_dim),
        ));
    }
    if h.num_rows != g.num_vertices() {
        return Err(Error::validation(
            "feature-shape-mismatch",
            "feature rows vs vertex count",
        ));
    }
    match family {
        Family::Gat => run_gat_layer(g, layer, h),
        _ => run_conv_layer(g, layer, h, family),
    }
}

fn run_conv_layer(g: &Graph, layer: &LayerSpec, h: &FeatureMatrix, family: Family) -> Result<FeatureMatrix> {
    let n = g.num_vertices();
    let out_dim = layer.effective_out_dim();
    let mut out = vec![0.0; n * out_dim];
    let eps = if family == Family::Gin { layer.gin_epsilon } else { None };
    for v in 0..n {
        let neigh = sampled_neighbors(g, v, layer.sample_cap, layer.sample_seed);
        let agg = if layer.gcn_normalize && family == Family::Gcn {
            // symmetric degree normalization over A + I:
            // agg = h_v / d_v + sum_u h_u / sqrt(d_u d_v), d = in-degree + 1
            let d_v = (g.in_degree(v) + 1) as f64;
            let mut acc: Vec<f64> = h.row(v).iter().map(|&x| x / d_v).collect();
            for &u in &neigh {
                let d_u = (g.in_degree(u) + 1) as f64;
                let norm = (d_u * d_v).sqrt();
                for (a, &x) in acc.iter_mut().zip(h.row(u)) {
                    *a += x / norm;
                }
            }
            acc
        } else {
            let mut messages = Vec::with_capacity(neigh.len());
            let base = g.edge_offset(v);
            for &u in &neigh {
                // Edge features align with the unsampled CSR row; sampling
                // keeps sorted order so position lookup stays valid.
                let ef = g.edge_features().map(|ef| {
                    let pos = g.in_neighbors(v).binary_search(&u).expect("neighbor present");
                    std::slice::from_ref(&ef[base + pos])
                });
                messages.push(gather(h.row(u), h.row(v), ef)?);
            }
            reduce(h.row(v), &messages, layer.reduce_op, eps)?
        };
        let y = transform(&agg, layer)?;
        let act = activate(&y, layer.activation);
        out[v * out_dim..(v + 1) * out_dim].copy_from_slice(&act);
    }
    FeatureMatrix::new(n, out_dim, out)
}

fn run_gat_layer(g: &Graph, layer: &LayerSpec, h: &FeatureMatrix) -> Result<FeatureMatrix> {
    let gat = layer
        .gat
        .as_ref()
        .ok_or_else(|| Error::validation("gat-config-missing", "layer has no attention config"))?;
    let n = g.num_vertices();
    let out_dim = layer.effective_out_dim();
    let mut out = vec![0.0; n * out_dim];

    // Precompute Wh per head for all vertices.
    let mut wh = vec![vec![0.0; n * layer.out_dim]; gat.heads];
    for (head, store) in wh.iter_mut().enumerate() {
        let w = layer.head_weights(head);
        for v in 0..n {
            let y = matvec_row(h.row(v), w, layer.in_dim, layer.out_dim);
            store[v * layer.out_dim..(v + 1) * layer.out_dim].copy_from_slice(&y);
        }
    }

    for v in 0..n {
        let neigh = sampled_neighbors(g, v, layer.sample_cap, layer.sample_seed);
        let mut combined = vec![0.0; out_dim];
        for head in 0..gat.heads {
            let alpha = gat_attention_coeffs(v, &neigh, layer, head, h)?;
            let mut z = vec![0.0; layer.out_dim];
            for (k, &u) in neigh.iter().chain(std::iter::once(&v)).enumerate() {
                let row = &wh[head][u * layer.out_dim..(u + 1) * layer.out_dim];
                for (j, &x) in row.iter().enumerate() {
                    z[j] += alpha[k] * x;
                }
            }
            if gat.concat {
                combined[head * layer.out_dim..(head + 1) * layer.out_dim].copy_from_slice(&z);
            } else {
                for (j, &x) in z.iter().enumerate() {
                    combined[j] += x / gat.heads as f64;
                }
            }
        }
        if let Some((scale, shift)) = &layer.batch_norm {
            for (j, v) in combined.iter_mut().enumerate() {
                *v = scale[j] * *v + shift[j];
            }
        }
        let act = activate(&combined, layer.activation);
        out[v * out_dim..(v + 1) * out_dim].copy_from_slice(&act);
    }
    FeatureMatrix::new(n, out_dim, out)
}

/// Run the full layer stack; the optional readout reduces the final vertex
/// vectors into one graph-level vector.
pub fn run_model(g: &Graph, spec: &GnnModelSpec, h0: &FeatureMatrix) -> Result<(FeatureMatrix, Option<Vec<f64>>)> {
    spec.check()?;
    let mut h = h0.clone();
    for layer in &spec.layers {
        h = run_layer(g, layer, &h, spec.family)?;
    }
    let readout = spec.readout.map(|r| {
        let mut acc = match r {
            Readout::Max => vec![f64::NEG_INFINITY; h.dim],
            _ => vec![0.0; h.dim],
        };
        for v in 0..h.num_rows {
            for (j, &x) in h.row(v).iter().enumerate() {
                match r {
                    Readout::Sum | Readout::Mean => acc[j] += x,
                    Readout::Max => {
                        if x > acc[j] {
                            acc[j] = x
                        }
                    }
                }
            }
        }
        if r == Readout::Mean && h.num_rows > 0 {
            for a in acc.iter_mut() {
                *a /= h.num_rows as f64;
            }
        }
        acc
    });
    Ok((h, readout))
}

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

/// Symmetric per-tensor quantization to `2^(bits-1)` magnitude levels per
/// sign (sign carried separately by the hardware's positive/negative arms).
/// Returns the dequantized values and the scale; an all-zero tensor passes
/// through with scale 0.
pub fn quantize_values(x: &[f64], bits: u32) -> Result<(Vec<f64>, f64)> {
    if !(2..=16).contains(&bits) {
        return Err(Error::validation(
            "precision-out-of-range",
            format!("bits {bits} outside [2, 16]"),
        ));
    }
    let max_abs = x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Ok((x.to_vec(), 0.0));
    }
    let q_max = ((1u32 << (bits - 1)) - 1) as f64;
    let scale = max_abs / q_max;
    let values = x
        .iter()
        .map(|&v| {
            let q = (v / scale).round().clamp(-q_max, q_max);
            q * scale
        })
        .collect();
    Ok((values, scale))
}

/// Quantize a feature matrix in place, recording the grid metadata.
pub fn quantize(h: &FeatureMatrix, bits: u32) -> Result<FeatureMatrix> {
    let (values, scale) = quantize_values(&h.values, bits)?;
    Ok(FeatureMatrix {
        num_rows: h.num_rows,
        dim: h.dim,
        values,
        quantized: true,
        bits,
        scale,
    })
}

/// True when every entry sits exactly on the stored quantization grid.
pub fn on_quant_grid(h: &FeatureMatrix) -> bool {
    if !h.quantized {
        return false;
    }
    if h.scale == 0.0 {
        return h.values.iter().all(|&v| v == 0.0);
    }
    let q_max = ((1u32 << (h.bits - 1)) - 1) as f64;
    h.values.iter().all(|&v| {
        let q = (v / h.scale).round();
        q.abs() <= q_max && q * h.scale == v
    })
}

// ---------------------------------------------------------------------------
// Model spec and weight file formats
// ---------------------------------------------------------------------------

/// Where a layer's weight (or attention) values come from in a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Inline(Vec<f64>),
    /// CSV file: one matrix row per line.
    Csv(String),
    /// Binary file with the GHSW header.
    Bin(String),
    Seeded { seed: u64, scale: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerSpecFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: WeightSource,
    pub reduce_op: ReduceOp,
    pub activation: Activation,
    #[serde(default)]
    pub batch_norm: Option<(Vec<f64>, Vec<f64>)>,
    #[serde(default)]
    pub gat: Option<GatConfigFile>,
    #[serde(default)]
    pub gin_epsilon: Option<f64>,
    #[serde(default)]
    pub sample_cap: Option<usize>,
    #[serde(default)]
    pub sample_seed: u64,
    #[serde(default)]
    pub gcn_normalize: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GatConfigFile {
    pub heads: usize,
    pub attention: WeightSource,
    #[serde(default = "default_true")]
    pub concat: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnnModelSpecFile {
    pub family: Family,
    pub layers: Vec<LayerSpecFile>,
    #[serde(default)]
    pub readout: Option<Readout>,
}

impl GnnModelSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("model-spec-parse", e.to_string()))
    }

    /// Resolve every weight source relative to `base_dir` into a runnable
    /// model spec.
    pub fn resolve(&self, base_dir: &std::path::Path) -> Result<GnnModelSpec> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for (idx, lf) in self.layers.iter().enumerate() {
            let heads = lf.gat.as_ref().map_or(1, |g| g.heads);
            let want = heads * lf.in_dim * lf.out_dim;
            let weights = resolve_weights(&lf.weights, want, base_dir, &format!("layer {idx} weights"))?;
            let gat = match &lf.gat {
                None => None,
                Some(gf) => {
                    let att_flat = resolve_weights(
                        &gf.attention,
                        gf.heads * 2 * lf.out_dim,
                        base_dir,
                        &format!("layer {idx} attention"),
                    )?;
                    let attention = att_flat
                        .chunks(2 * lf.out_dim)
                        .map(|c| c.to_vec())
                        .collect();
                    Some(GatConfig {
                        heads: gf.heads,
                        attention,
                        concat: gf.concat,
                    })
                }
            };
            layers.push(LayerSpec {
                in_dim: lf.in_dim,
                out_dim: lf.out_dim,
                weights,
                reduce_op: lf.reduce_op,
                activation: lf.activation,
                batch_norm: lf.batch_norm.clone(),
                gat,
                gin_epsilon: lf.gin_epsilon,
                sample_cap: lf.sample_cap,
                sample_seed: lf.sample_seed,
                gcn_normalize: lf.gcn_normalize,
            });
        }
        let spec = GnnModelSpec {
            family: self.family,
            layers,
            readout: self.readout,
        };
        spec.check()?;
        Ok(spec)
    }
}

fn resolve_weights(
    source: &WeightSource,
    expected_len: usize,
    base_dir: &std::path::Path,
    what: &str,
) -> Result<Vec<f64>> {
    let values = match source {
        WeightSource::Inline(v) => v.clone(),
        WeightSource::Seeded { seed, scale } => seeded_weights(expected_len, *seed, *scale),
        WeightSource::Csv(path) => {
            let file = std::fs::File::open(base_dir.join(path))?;
            read_weight_csv(std::io::BufReader::new(file))?
        }
        WeightSource::Bin(path) => {
            let file = std::fs::File::open(base_dir.join(path))?;
            let (values, _rows, _cols) = read_weight_bin(std::io::BufReader::new(file))?;
            values
        }
    };
    if values.len() != expected_len {
        return Err(Error::validation(
            "weight-shape-mismatch",
            format!("{what}: expected {expected_len} values, got {}", values.len()),
        ));
    }
    Ok(values)
}

/// Uniform values in [-scale, scale] from a ChaCha stream.
pub fn seeded_weights(len: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-scale..=scale)).collect()
}

/// Read a weight matrix from CSV (row-major flatten).
pub fn read_weight_csv<R: BufRead>(source: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        for cell in trimmed.split(',') {
            values.push(
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(idx + 1, "weight not a real number"))?,
            );
        }
    }
    Ok(values)
}

const WEIGHT_MAGIC: &[u8; 4] = b"GHSW";

/// Write the binary weight format: 16-byte header (magic "GHSW", u32 rows,
/// u32 cols, 4 reserved bytes), then row-major little-endian f32 values.
pub fn write_weight_bin<W: Write>(mut out: W, values: &[f64], rows: u32, cols: u32) -> Result<()> {
    if values.len() != rows as usize * cols as usize {
        return Err(Error::validation(
            "weight-shape-mismatch",
            "rows * cols does not match value count",
        ));
    }
    out.write_all(WEIGHT_MAGIC)?;
    out.write_all(&rows.to_le_bytes())?;
    out.write_all(&cols.to_le_bytes())?;
    out.write_all(&[0u8; 4])?;
    for &v in values {
        out.write_all(&(v as f32).to_le_bytes())?;
    }
    Ok(())
}

/// Read the binary weight format; returns `(values, rows, cols)`.
pub fn read_weight_bin<R: Read>(mut source: R) -> Result<(Vec<f64>, u32, u32)> {
    let mut header = [0u8; 16];
    source.read_exact(&mut header).map_err(Error::Io)?;
    if &header[0..4] != WEIGHT_MAGIC {
        return Err(Error::validation("weight-bad-magic", "expected GHSW header"));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap());
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let count = rows as usize * cols as usize;
    let mut buf = vec![0u8; count * 4];
    source.read_exact(&mut buf).map_err(Error::Io)?;
    let values = buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok((values, rows, cols))
}
