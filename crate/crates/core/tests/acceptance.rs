//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `--nocapture` to see them). Expected values come from
//! independent dense-adjacency references implemented in this file, from
//! exact brute-force scans, or from pinned device constants.

use std::time::Instant;

use ghost_core::arch::{
    combine_dac_count, instantiate, validate, ArchConfig, DeviceLibrary, OptFlags, PhotonicLimits,
};
use ghost_core::dse::{
    ablate, sweep_device, toy_arch_config, toy_workloads, SweepKind, SweepSpec,
};
use ghost_core::engine::{build_schedule, pipeline_makespan, simulate, BlockKind, MemoryModel, Timeline};
use ghost_core::gnn::{
    run_layer, sampled_neighbors, seeded_weights, Activation, Family, FeatureMatrix, GatConfig,
    GnnModelSpec, LayerSpec, ReduceOp,
};
use ghost_core::graph::{generate_graph, Graph, GraphKind};
use ghost_core::partition::build_partition_plan;
use ghost_core::photonics::{
    fwhm, max_coherent_mrs, max_noncoherent_mrs, required_snr_db, resolvability_margin,
    CrosstalkModel, MrDesign,
};

// ---------------------------------------------------------------------------
// Independent dense-adjacency reference implementations
// ---------------------------------------------------------------------------

mod dense_ref {
    /// Elementwise activation, written from scratch.
    pub fn act(y: &[f64], kind: &str, alpha: f64) -> Vec<f64> {
        match kind {
            "relu" => y.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect(),
            "leaky" => y.iter().map(|&x| if x >= 0.0 { x } else { alpha * x }).collect(),
            "sigmoid" => y.iter().map(|&x| 1.0 / (1.0 + (-x).exp())).collect(),
            "tanh" => y.iter().map(|&x| x.tanh()).collect(),
            "softmax" => {
                let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = y.iter().map(|&x| (x - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|&x| x / s).collect()
            }
            _ => y.to_vec(),
        }
    }

    fn matmul_row(h: &[f64], w: &[f64], f_in: usize, f_out: usize) -> Vec<f64> {
        let mut y = vec![0.0; f_out];
        for i in 0..f_in {
            for j in 0..f_out {
                y[j] += h[i] * w[i * f_out + j];
            }
        }
        y
    }

    /// Convolution-family layer over an explicit neighbor-list adjacency:
    /// out[v] = act(BN((c_self * h_v + scale * sum_u h_u) W)).
    #[allow(clippy::too_many_arguments)]
    pub fn conv_layer(
        neighbors: &[Vec<usize>],
        h: &[f64],
        f_in: usize,
        w: &[f64],
        f_out: usize,
        self_coeff: f64,
        mean: bool,
        bn: Option<&(Vec<f64>, Vec<f64>)>,
        act_kind: &str,
        alpha: f64,
    ) -> Vec<f64> {
        let n = neighbors.len();
        let mut out = vec![0.0; n * f_out];
        for v in 0..n {
            let mut agg: Vec<f64> = h[v * f_in..(v + 1) * f_in]
                .iter()
                .map(|&x| x * self_coeff)
                .collect();
            let deg = neighbors[v].len();
            let scale = if mean && deg > 0 { 1.0 / deg as f64 } else { 1.0 };
            for &u in &neighbors[v] {
                for k in 0..f_in {
                    agg[k] += scale * h[u * f_in + k];
                }
            }
            let mut y = matmul_row(&agg, w, f_in, f_out);
            if let Some((s, b)) = bn {
                for j in 0..f_out {
                    y[j] = s[j] * y[j] + b[j];
                }
            }
            let y = act(&y, act_kind, alpha);
            out[v * f_out..(v + 1) * f_out].copy_from_slice(&y);
        }
        out
    }

    /// Max-reduce layer: out[v] = act(max(h_v, h_u ...) W).
    pub fn max_layer(
        neighbors: &[Vec<usize>],
        h: &[f64],
        f_in: usize,
        w: &[f64],
        f_out: usize,
        act_kind: &str,
    ) -> Vec<f64> {
        let n = neighbors.len();
        let mut out = vec![0.0; n * f_out];
        for v in 0..n {
            let mut agg: Vec<f64> = h[v * f_in..(v + 1) * f_in].to_vec();
            for &u in &neighbors[v] {
                for k in 0..f_in {
                    agg[k] = agg[k].max(h[u * f_in + k]);
                }
            }
            let y = matmul_row(&agg, w, f_in, f_out);
            let y = act(&y, act_kind, 0.0);
            out[v * f_out..(v + 1) * f_out].copy_from_slice(&y);
        }
        out
    }

    /// Multi-head attention layer matching the standard formulation:
    /// scores over [neighbors..., v], leaky slope 0.2, head concatenation.
    #[allow(clippy::too_many_arguments)]
    pub fn gat_layer(
        neighbors: &[Vec<usize>],
        h: &[f64],
        f_in: usize,
        heads: usize,
        head_dim: usize,
        weights: &[f64],
        attention: &[Vec<f64>],
        act_kind: &str,
        alpha: f64,
    ) -> Vec<f64> {
        let n = neighbors.len();
        let f_out = heads * head_dim;
        let mut out = vec![0.0; n * f_out];
        for v in 0..n {
            let mut combined = vec![0.0; f_out];
            for head in 0..heads {
                let w = &weights[head * f_in * head_dim..(head + 1) * f_in * head_dim];
                let a = &attention[head];
                let wh_v = matmul_row(&h[v * f_in..(v + 1) * f_in], w, f_in, head_dim);
                let members: Vec<usize> = neighbors[v].iter().cloned().chain([v]).collect();
                let mut scores = Vec::with_capacity(members.len());
                for &u in &members {
                    let wh_u = matmul_row(&h[u * f_in..(u + 1) * f_in], w, f_in, head_dim);
                    let mut e = 0.0;
                    for k in 0..head_dim {
                        e += a[k] * wh_v[k] + a[head_dim + k] * wh_u[k];
                    }
                    scores.push(if e >= 0.0 { e } else { 0.2 * e });
                }
                let alphas = act(&scores, "softmax", 0.0);
                for (idx, &u) in members.iter().enumerate() {
                    let wh_u = matmul_row(&h[u * f_in..(u + 1) * f_in], w, f_in, head_dim);
                    for k in 0..head_dim {
                        combined[head * head_dim + k] += alphas[idx] * wh_u[k];
                    }
                }
            }
            let y = act(&combined, act_kind, alpha);
            out[v * f_out..(v + 1) * f_out].copy_from_slice(&y);
        }
        out
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn neighbor_lists(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.num_vertices()).map(|v| g.in_neighbors(v).to_vec()).collect()
}

// ---------------------------------------------------------------------------
// Criterion 1: functional oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_functional_oracle_equivalence() {
    let started = Instant::now();
    let act_kinds = ["relu", "tanh", "sigmoid", "none"];
    for seed in 0..50u64 {
        let n = 8 + (seed as usize * 7) % 57; // up to 64
        let f_in = 3 + (seed as usize * 5) % 30; // up to 32
        let f_out = 2 + (seed as usize * 3) % 15;
        let p = 0.05 + 0.15 * ((seed % 7) as f64 / 6.0);
        let g = generate_graph(GraphKind::ErdosRenyi, n, p, f_in, seed).unwrap();
        let h = FeatureMatrix::from_graph(&g).unwrap();
        let w = seeded_weights(f_in * f_out, 1000 + seed, 1.0);
        let act_kind = act_kinds[(seed % 4) as usize];
        let activation = match act_kind {
            "relu" => Activation::Relu,
            "tanh" => Activation::Tanh,
            "sigmoid" => Activation::Sigmoid,
            _ => Activation::None,
        };

        match seed % 4 {
            0 => {
                // GCN, sum reduce, optional batch norm
                let mut layer = LayerSpec::dense(f_in, f_out, w.clone(), ReduceOp::Sum, activation);
                let bn = if seed % 5 == 0 {
                    Some((
                        seeded_weights(f_out, 2000 + seed, 1.0),
                        seeded_weights(f_out, 3000 + seed, 1.0),
                    ))
                } else {
                    None
                };
                layer.batch_norm = bn.clone();
                let got = run_layer(&g, &layer, &h, Family::Gcn).unwrap();
                let want = dense_ref::conv_layer(
                    &neighbor_lists(&g),
                    &h.values,
                    f_in,
                    &w,
                    f_out,
                    1.0,
                    false,
                    bn.as_ref(),
                    act_kind,
                    0.0,
                );
                assert!(max_abs_diff(&got.values, &want) <= 1e-8, "gcn seed {seed}");
            }
            1 => {
                // GraphSAGE, mean reduce over the sampled neighborhood
                let cap = 3 + (seed as usize % 5);
                let mut layer = LayerSpec::dense(f_in, f_out, w.clone(), ReduceOp::Mean, activation);
                layer.sample_cap = Some(cap);
                layer.sample_seed = seed;
                let got = run_layer(&g, &layer, &h, Family::Graphsage).unwrap();
                let sampled: Vec<Vec<usize>> = (0..n)
                    .map(|v| sampled_neighbors(&g, v, Some(cap), seed))
                    .collect();
                let want = dense_ref::conv_layer(
                    &sampled, &h.values, f_in, &w, f_out, 1.0, true, None, act_kind, 0.0,
                );
                assert!(max_abs_diff(&got.values, &want) <= 1e-8, "sage seed {seed}");
            }
            2 => {
                // GIN with epsilon self weighting, or max reduce
                if seed % 8 == 2 {
                    let layer = LayerSpec::dense(f_in, f_out, w.clone(), ReduceOp::Max, activation);
                    let got = run_layer(&g, &layer, &h, Family::Gin).unwrap();
                    let want = dense_ref::max_layer(
                        &neighbor_lists(&g),
                        &h.values,
                        f_in,
                        &w,
                        f_out,
                        act_kind,
                    );
                    assert!(max_abs_diff(&got.values, &want) <= 1e-8, "max seed {seed}");
                } else {
                    let eps = 0.05 + (seed % 3) as f64 * 0.1;
                    let mut layer = LayerSpec::dense(f_in, f_out, w.clone(), ReduceOp::Sum, activation);
                    layer.gin_epsilon = Some(eps);
                    let got = run_layer(&g, &layer, &h, Family::Gin).unwrap();
                    let want = dense_ref::conv_layer(
                        &neighbor_lists(&g),
                        &h.values,
                        f_in,
                        &w,
                        f_out,
                        1.0 + eps,
                        false,
                        None,
                        act_kind,
                        0.0,
                    );
                    assert!(max_abs_diff(&got.values, &want) <= 1e-8, "gin seed {seed}");
                }
            }
            _ => {
                // GAT with 1-2 heads, concatenated
                let heads = 1 + (seed as usize % 2);
                let head_dim = f_out;
                let weights = seeded_weights(heads * f_in * head_dim, 4000 + seed, 1.0);
                let attention: Vec<Vec<f64>> = (0..heads)
                    .map(|k| seeded_weights(2 * head_dim, 5000 + seed + k as u64, 1.0))
                    .collect();
                let mut layer =
                    LayerSpec::dense(f_in, head_dim, weights.clone(), ReduceOp::Sum, Activation::LeakyRelu(0.2));
                layer.gat = Some(GatConfig {
                    heads,
                    attention: attention.clone(),
                    concat: true,
                });
                let got = run_layer(&g, &layer, &h, Family::Gat).unwrap();
                let want = dense_ref::gat_layer(
                    &neighbor_lists(&g),
                    &h.values,
                    f_in,
                    heads,
                    head_dim,
                    &weights,
                    &attention,
                    "leaky",
                    0.2,
                );
                assert!(max_abs_diff(&got.values, &want) <= 1e-8, "gat seed {seed}");
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 took {elapsed:?}");
    println!("[acceptance] criterion 1 (functional oracle equivalence, 50 graphs): PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// Criterion 2: partition oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_partition_oracle() {
    let started = Instant::now();
    for seed in 0..100u64 {
        let n = 16 + (seed as usize * 13) % 113; // up to 128
        let p = 0.02 + 0.06 * ((seed % 5) as f64 / 4.0);
        let kind = if seed % 3 == 0 {
            GraphKind::PowerLaw
        } else {
            GraphKind::ErdosRenyi
        };
        let param = if kind == GraphKind::PowerLaw { 2.2 } else { p };
        let g = generate_graph(kind, n, param, 0, seed).unwrap();
        let vs = [1, 3, 5, 8, 16, 32][(seed % 6) as usize];
        let ns = [1, 2, 7, 8, 19, 64][(seed % 6) as usize];
        let plan = build_partition_plan(&g, vs, ns).unwrap();

        // brute-force dense-adjacency block scan
        let mut adj = vec![false; n * n];
        for (s, d) in g.edges() {
            adj[d * n + s] = true;
        }
        let nvg = n.div_ceil(vs);
        let nng = n.div_ceil(ns);
        let mut counts = vec![vec![0usize; nng]; nvg];
        for d in 0..n {
            for s in 0..n {
                if adj[d * n + s] {
                    counts[d / vs][s / ns] += 1;
                }
            }
        }
        let brute_skipped = counts.iter().flatten().filter(|&&c| c == 0).count();
        assert_eq!(plan.skipped_block_count(), brute_skipped, "seed {seed}");
        let mut covered = 0usize;
        for (i, row) in plan.nonzero_blocks.iter().enumerate() {
            for b in row {
                assert_eq!(b.edge_count, counts[i][b.input_group], "seed {seed}");
                assert!(b.edge_count > 0);
                covered += b.edge_count;
            }
        }
        // every skipped block really is all-zero
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let listed = plan.nonzero_blocks[i].iter().any(|b| b.input_group == j);
                assert_eq!(listed, c > 0, "seed {seed} block ({i},{j})");
            }
        }
        assert_eq!(covered, g.num_edges(), "seed {seed}: edge conservation");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 2 took {elapsed:?}");
    println!("[acceptance] criterion 2 (partition oracle, 100 graphs): PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// Criterion 3: device-model checks
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_device_model_checks() {
    // FWHM at the design point, exact
    assert_eq!(fwhm(1550.0, 3100.0).unwrap(), 0.5);

    // required SNR for 128 levels over 1 nm: 21.07 dB, within 0.3 dB of the
    // stated 21.3 dB requirement
    let req = required_snr_db(128, 1.0).unwrap();
    assert!((req - 21.07).abs() < 5e-3, "required snr {req}");
    assert!((req - 21.3).abs() <= 0.3, "required snr {req} vs 21.3");

    // inequality equivalence on a 1000-point random grid
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..1000 {
        let n_levels = 1 + (next() * 511.0) as usize;
        let lambda = 1200.0 + next() * 700.0;
        let q = 500.0 + next() * 9500.0;
        let snr = next() * 40.0;
        let margin = resolvability_margin(n_levels, lambda, q, snr).unwrap();
        let req = required_snr_db(n_levels, 2.0 * lambda / q).unwrap();
        assert_eq!(margin > 0.0, snr > req, "grid point {i}");
    }
    println!("[acceptance] criterion 3 (device-model checks): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 4: calibrated sweep reproduction
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_calibrated_sweep_reproduction() {
    let design = MrDesign::default_design();
    let model = CrosstalkModel::shipped();

    let coh = max_coherent_mrs(1520.0, &design, &model, 21.3).unwrap();
    assert_eq!(coh.max_mrs, 20, "coherent bank cutoff");
    assert!(!coh.saturated);

    let nc = max_noncoherent_mrs(1550.0, 1.0, &design, &model, 21.3).unwrap();
    assert_eq!(nc.wavelength_count, 18, "non-coherent wavelength cutoff");
    assert_eq!(nc.mr_count, 36, "non-coherent MR cutoff");

    // the sweep driver reports the same cutoffs
    let spec = SweepSpec {
        kind: SweepKind::DeviceCoherent,
        wavelengths_nm: vec![1520.0],
        snr_requirement_db: 21.3,
        ..SweepSpec::default()
    };
    let result = sweep_device(&spec, &design, &model).unwrap();
    assert_eq!(result.summaries[0].max_mrs, 20);

    let spec = SweepSpec {
        kind: SweepKind::DeviceNoncoherent,
        wavelengths_nm: vec![1550.0],
        spacing_nm: 1.0,
        snr_requirement_db: 21.3,
        ..SweepSpec::default()
    };
    let result = sweep_device(&spec, &design, &model).unwrap();
    assert_eq!(result.summaries[0].wavelengths, 18);
    assert_eq!(result.summaries[0].max_mrs, 36);
    println!("[acceptance] criterion 4 (calibrated sweep reproduction, 20 MRs / 18 wavelengths): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 5: DAC-sharing rule
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_dac_sharing_rule() {
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = move |hi: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        1 + (state % hi as u64) as usize
    };
    for _ in 0..20 {
        let cfg = ArchConfig::new(next(32), next(32), next(18), next(20), next(17));
        let off = combine_dac_count(&cfg, false);
        let on = combine_dac_count(&cfg, true);
        assert_eq!(off, on * cfg.v, "config {:?}", cfg.as_vector());
    }
    let best = ArchConfig::best_reported();
    assert_eq!(combine_dac_count(&best, false), 6120);
    assert_eq!(combine_dac_count(&best, true), 306);
    println!("[acceptance] criterion 5 (DAC-sharing rule, 6120/306): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 6: scheduling properties
// ---------------------------------------------------------------------------

fn random_workload(seed: u64) -> (Graph, GnnModelSpec, ArchConfig) {
    let n = 16 + (seed as usize * 11) % 49;
    let p = 0.04 + 0.12 * ((seed % 5) as f64 / 4.0);
    let f_in = 4 + (seed as usize % 12);
    let g = generate_graph(GraphKind::ErdosRenyi, n, p, f_in, seed).unwrap();
    let f_out = 3 + (seed as usize % 8);
    let family = [Family::Gcn, Family::Graphsage, Family::Gin, Family::Gat][(seed % 4) as usize];
    let spec = match family {
        Family::Gat => {
            let heads = 1 + (seed as usize % 2);
            let mut layer = LayerSpec::dense(
                f_in,
                f_out,
                seeded_weights(heads * f_in * f_out, seed + 10, 1.0),
                ReduceOp::Sum,
                Activation::Relu,
            );
            layer.gat = Some(GatConfig {
                heads,
                attention: (0..heads)
                    .map(|k| seeded_weights(2 * f_out, seed + 20 + k as u64, 1.0))
                    .collect(),
                concat: true,
            });
            GnnModelSpec {
                family,
                layers: vec![layer],
                readout: None,
            }
        }
        _ => {
            let mut layer = LayerSpec::dense(
                f_in,
                f_out,
                seeded_weights(f_in * f_out, seed + 10, 1.0),
                ReduceOp::Sum,
                Activation::Relu,
            );
            if family == Family::Gin {
                layer.gin_epsilon = Some(0.1);
            }
            GnnModelSpec {
                family,
                layers: vec![layer],
                readout: None,
            }
        }
    };
    let v = [2, 4, 8][(seed % 3) as usize];
    let ngrp = [2, 4, 8][((seed / 3) % 3) as usize];
    let r_r = [4, 6, 8][((seed / 9) % 3) as usize];
    let r_c = [2, 4, 7][((seed / 27) % 3) as usize];
    let t_r = [3, 5, 8][((seed / 81) % 3) as usize];
    (g, spec, ArchConfig::new(ngrp, v, r_r, r_c, t_r))
}

fn check_reduce_precedence(tl: &Timeline) {
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
                    "reduce precedence violated at layer {} group {}",
                    key.0,
                    key.1
                );
            }
        }
        prev = Some((key, val));
    }
}

#[test]
fn criterion_6_scheduling_properties() {
    let started = Instant::now();
    let dev = DeviceLibrary::default();
    let mem = MemoryModel::default();
    let limits = PhotonicLimits::design_defaults();

    // (b) classic pipeline formula on equal-stage-time synthetic workloads
    for stages in [2usize, 3, 4] {
        for chunks in [1usize, 2, 4, 7, 11] {
            let t = 3.75;
            let shapes: Vec<(usize, f64)> = (0..stages).map(|_| (chunks, t)).collect();
            let m = pipeline_makespan(&shapes, true);
            let want = (stages + chunks - 1) as f64 * t;
            assert!(
                (m - want).abs() <= 1e-9,
                "stages {stages} chunks {chunks}: {m} vs {want}"
            );
        }
    }

    // (a), (c), (d) on 200 random workloads
    for seed in 0..200u64 {
        let (g, spec, cfg) = random_workload(seed);
        let inst = instantiate(&cfg, &dev, &limits).unwrap();
        let plan = build_partition_plan(&g, cfg.v, cfg.n).unwrap();

        let pp_on = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, OptFlags::new(true, true, false, false)).unwrap();
        let pp_off = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, OptFlags::new(true, false, false, false)).unwrap();
        assert!(
            pp_on.makespan_ns <= pp_off.makespan_ns + 1e-9,
            "seed {seed}: PP makespan {} > {}",
            pp_on.makespan_ns,
            pp_off.makespan_ns
        );

        check_reduce_precedence(&pp_on);
        check_reduce_precedence(&pp_off);

        let wb = build_schedule(&g, &spec, &plan, &inst, &dev, &mem, OptFlags::new(true, true, false, true)).unwrap();
        let agg_no_wb = pp_on.busy_by_block()[0];
        let agg_wb = wb.busy_by_block()[0];
        assert!(
            agg_wb <= agg_no_wb + 1e-9,
            "seed {seed}: WB aggregate busy {agg_wb} > {agg_no_wb}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 6 took {elapsed:?}");
    println!("[acceptance] criterion 6 (scheduling properties, 200 workloads): PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// Criterion 7: ablation direction
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_ablation_direction() {
    let started = Instant::now();
    let dev = DeviceLibrary::default();
    let mem = MemoryModel::default();
    let limits = PhotonicLimits::design_defaults();
    let cfg = toy_arch_config();
    assert!(cfg.v > 1);
    let workloads = toy_workloads();
    assert_eq!(workloads.len(), 8, "4 models x 2 graphs");
    // strictness precondition: zero blocks exist under this partition
    for w in &workloads {
        let plan = build_partition_plan(&w.graph, cfg.v, cfg.n).unwrap();
        assert!(plan.skipped_block_count() > 0, "{} lacks zero blocks", w.name);
    }

    let result = ablate(&workloads, &dev, &mem, &cfg, &limits).unwrap();
    let mut best_reductions = Vec::new();
    let mut wb_reductions = Vec::new();
    for w in &workloads {
        let get = |flags: &str| {
            result
                .normalized_for(&w.name, flags)
                .unwrap_or_else(|| panic!("{}: missing {flags}", w.name))
        };
        let baseline = get("baseline");
        let bp = get("BP");
        let bp_pp = get("BP+PP");
        let bp_pp_dac = get("BP+PP+DAC");
        assert_eq!(baseline, 1.0, "{}", w.name);
        assert!(bp < baseline, "{}: BP {bp} !< baseline", w.name);
        assert!(bp_pp < bp, "{}: BP+PP {bp_pp} !< BP {bp}", w.name);
        assert!(bp_pp_dac < bp_pp, "{}: BP+PP+DAC {bp_pp_dac} !< BP+PP {bp_pp}", w.name);
        best_reductions.push(1.0 / bp_pp_dac);
        wb_reductions.push(1.0 / get("BP+PP+WB"));
    }
    let avg_best: f64 = best_reductions.iter().sum::<f64>() / best_reductions.len() as f64;
    let avg_wb: f64 = wb_reductions.iter().sum::<f64>() / wb_reductions.len() as f64;
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 7 took {elapsed:?}");
    println!(
        "[acceptance] criterion 7 (ablation direction; avg reduction BP+PP+DAC {avg_best:.2}x, BP+PP+WB {avg_wb:.2}x, reported not asserted): PASS ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: metric identities and determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_metric_identities_and_determinism() {
    let started = Instant::now();
    let dev = DeviceLibrary::default();
    let mem = MemoryModel::default();
    let limits = PhotonicLimits::design_defaults();
    let cfg = toy_arch_config();
    for w in toy_workloads().iter().take(4) {
        let a = simulate(&w.graph, &w.model, &cfg, &dev, &mem, &limits).unwrap();
        let b = simulate(&w.graph, &w.model, &cfg, &dev, &mem, &limits).unwrap();
        // identities hold exactly as stored
        assert_eq!(a.gops, a.ops as f64 / a.latency_total_ns, "{}", w.name);
        assert_eq!(
            a.epb_j_per_bit,
            a.energy_total_j / a.bits_processed as f64,
            "{}",
            w.name
        );
        assert!(
            (a.gops * a.latency_total_ns - a.ops as f64).abs() <= 1e-12 * a.ops as f64,
            "{}",
            w.name
        );
        assert!(
            (a.epb_j_per_bit * a.bits_processed as f64 - a.energy_total_j).abs()
                <= 1e-12 * a.energy_total_j,
            "{}",
            w.name
        );
        assert!(a.bits_processed > 0);
        // byte-identical reports
        assert_eq!(a.to_json_pretty(), b.to_json_pretty(), "{}", w.name);
        assert_eq!(a.determinism_hash, b.determinism_hash, "{}", w.name);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 8 took {elapsed:?}");
    println!("[acceptance] criterion 8 (metric identities and determinism): PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// Criterion 9: validation gate
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_validation_gate() {
    let dev = DeviceLibrary::default();
    let limits = PhotonicLimits {
        max_coherent: 20,
        max_noncoherent_wavelengths: 18,
    };
    let best = ArchConfig::best_reported();
    validate(&best, &dev, &limits).expect("reported best configuration validates");

    let mut wide_r = best;
    wide_r.r_r = 19;
    let err = validate(&wide_r, &dev, &limits).unwrap_err();
    assert!(err.violation_codes().contains(&"noncoherent-width-exceeded"));

    let mut wide_c = best;
    wide_c.r_c = 21;
    let err = validate(&wide_c, &dev, &limits).unwrap_err();
    assert!(err.violation_codes().contains(&"coherent-width-exceeded"));
    println!("[acceptance] criterion 9 (validation gate): PASS");
}
