//! Batch drivers over the photonics and engine modules: device-level bank
//! sweeps, the architecture grid search, and the orchestration-optimization
//! ablation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::{validate, ArchConfig, DeviceLibrary, OptFlags, PhotonicLimits};
use crate::engine::{simulate, MemoryModel, SimReport};
use crate::error::{Error, Result};
use crate::gnn::{
    seeded_weights, Activation, Family, GatConfig, GnnModelSpec, LayerSpec, Readout, ReduceOp,
};
use crate::graph::{generate_graph, Graph, GraphKind};
use crate::photonics::{
    coherent_bank_snr_db, max_coherent_mrs, max_noncoherent_mrs, noncoherent_comb_snr_db,
    CrosstalkModel, MrDesign,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    DeviceCoherent,
    DeviceNoncoherent,
    Arch,
    Ablation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    EpbPerGops,
    Epb,
    Gops,
}

/// Sweep description. Device sweeps use the wavelength axis; arch sweeps
/// use the five parameter range axes and at least one workload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub wavelengths_nm: Vec<f64>,
    pub spacing_nm: f64,
    pub snr_requirement_db: f64,
    pub n_values: Vec<usize>,
    pub v_values: Vec<usize>,
    pub r_r_values: Vec<usize>,
    pub r_c_values: Vec<usize>,
    pub t_r_values: Vec<usize>,
    pub objective: Objective,
    /// (graph ref, model ref) pairs; resolution is the caller's concern.
    pub workloads: Vec<(String, String)>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kind: SweepKind::Arch,
            wavelengths_nm: vec![1520.0, 1535.0, 1550.0, 1565.0],
            spacing_nm: 1.0,
            snr_requirement_db: crate::arch::DEFAULT_SNR_REQUIREMENT_DB,
            n_values: (4..=32).step_by(4).collect(),
            v_values: (4..=32).step_by(4).collect(),
            r_r_values: (2..=18).step_by(2).collect(),
            r_c_values: (3..=20).collect(),
            t_r_values: (3..=17).collect(),
            objective: Objective::EpbPerGops,
            workloads: Vec::new(),
        }
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("sweep-spec-parse", e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Device sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviceSweepRow {
    pub lambda_nm: f64,
    pub n: usize,
    pub snr_db: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviceSweepSummary {
    pub lambda_nm: f64,
    /// MR count (coherent bank size, or 2x wavelengths non-coherent).
    pub max_mrs: usize,
    /// Wavelength count; equals `max_mrs` for coherent banks.
    pub wavelengths: usize,
    pub saturated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviceSweepResult {
    pub kind: SweepKind,
    pub rows: Vec<DeviceSweepRow>,
    pub summaries: Vec<DeviceSweepSummary>,
}

impl DeviceSweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_nm,n,snr_db,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.lambda_nm, r.n, r.snr_db, r.pass));
        }
        out
    }
}

/// Grid the feasibility scans of one device sweep: per wavelength, SNR rows
/// for growing bank sizes plus the cutoff summary.
pub fn sweep_device(
    spec: &SweepSpec,
    design: &MrDesign,
    model: &CrosstalkModel,
) -> Result<DeviceSweepResult> {
    let req = spec.snr_requirement_db;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    match spec.kind {
        SweepKind::DeviceCoherent => {
            for &lambda in &spec.wavelengths_nm {
                let feas = max_coherent_mrs(lambda, design, model, req)?;
                let row_cap = if feas.saturated {
                    feas.max_mrs
                } else {
                    feas.max_mrs + 2
                };
                for n in 1..=row_cap {
                    let snr = coherent_bank_snr_db(n, model)?;
                    rows.push(DeviceSweepRow {
                        lambda_nm: lambda,
                        n,
                        snr_db: snr,
                        pass: snr >= req,
                    });
                }
                summaries.push(DeviceSweepSummary {
                    lambda_nm: lambda,
                    max_mrs: feas.max_mrs,
                    wavelengths: feas.max_mrs,
                    saturated: feas.saturated,
                });
            }
        }
        SweepKind::DeviceNoncoherent => {
            for &lambda0 in &spec.wavelengths_nm {
                let feas = max_noncoherent_mrs(lambda0, spec.spacing_nm, design, model, req)?;
                let row_cap = if feas.saturated {
                    feas.wavelength_count
                } else {
                    feas.wavelength_count + 2
                };
                for w in 1..=row_cap {
                    let snr =
                        noncoherent_comb_snr_db(lambda0, spec.spacing_nm, w, design.q_factor, model)?;
                    rows.push(DeviceSweepRow {
                        lambda_nm: lambda0,
                        n: w,
                        snr_db: snr,
                        pass: snr >= req,
                    });
                }
                summaries.push(DeviceSweepSummary {
                    lambda_nm: lambda0,
                    max_mrs: feas.mr_count,
                    wavelengths: feas.wavelength_count,
                    saturated: feas.saturated,
                });
            }
        }
        other => {
            return Err(Error::validation(
                "sweep-kind-mismatch",
                format!("sweep_device cannot run {other:?}"),
            ))
        }
    }
    Ok(DeviceSweepResult {
        kind: spec.kind,
        rows,
        summaries,
    })
}

// ---------------------------------------------------------------------------
// Architecture sweep
// ---------------------------------------------------------------------------

/// One named workload: a graph plus the model processed on it.
#[derive(Debug, Clone)]
pub struct Workload {
    pub name: String,
    pub graph: Graph,
    pub model: GnnModelSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedConfig {
    pub config: [usize; 5],
    pub score: f64,
    pub per_workload: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfeasibleConfig {
    pub config: [usize; 5],
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArchSweepResult {
    pub objective: Objective,
    pub ranked: Vec<RankedConfig>,
    pub infeasible: Vec<InfeasibleConfig>,
}

impl ArchSweepResult {
    pub fn best(&self) -> Option<&RankedConfig> {
        self.ranked.first()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,v,r_r,r_c,t_r,score\n");
        for r in &self.ranked {
            let [n, v, rr, rc, tr] = r.config;
            out.push_str(&format!("{n},{v},{rr},{rc},{tr},{}\n", r.score));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let best = self.best();
        let ties: Vec<&RankedConfig> = match best {
            Some(b) => self
                .ranked
                .iter()
                .take_while(|r| r.score == b.score)
                .collect(),
            None => Vec::new(),
        };
        serde_json::json!({
            "objective": self.objective,
            "argmin": best.map(|b| b.config),
            "ties": ties.iter().map(|r| r.config).collect::<Vec<_>>(),
            "ranked_count": self.ranked.len(),
            "infeasible_count": self.infeasible.len(),
        })
    }
}

fn objective_value(report: &SimReport, objective: Objective) -> f64 {
    match objective {
        Objective::EpbPerGops => report.epb_per_gops,
        Objective::Epb => report.epb_j_per_bit,
        // throughput is maximized; negate so ascending rank still applies
        Objective::Gops => -report.gops,
    }
}

/// Order-stable mean: values are sorted before summation so workload order
/// never perturbs the score.
fn stable_mean(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

/// Exhaustive grid search over `[N, V, R_r, R_c, T_r]`, scoring each
/// feasible candidate by the objective averaged across all workloads.
/// Grid points evaluate in parallel; infeasible candidates are reported
/// with their validation errors, never silently dropped.
pub fn sweep_arch(
    spec: &SweepSpec,
    workloads: &[Workload],
    dev: &DeviceLibrary,
    mem: &MemoryModel,
    limits: &PhotonicLimits,
) -> Result<ArchSweepResult> {
    if workloads.is_empty() {
        return Err(Error::validation("sweep-no-workloads", "arch sweeps need >= 1 workload"));
    }
    let mut candidates = Vec::new();
    for &n in &spec.n_values {
        for &v in &spec.v_values {
            for &r_r in &spec.r_r_values {
                for &r_c in &spec.r_c_values {
                    for &t_r in &spec.t_r_values {
                        candidates.push(ArchConfig::new(n, v, r_r, r_c, t_r));
                    }
                }
            }
        }
    }

    let objective = spec.objective;
    let evaluated: Vec<std::result::Result<RankedConfig, InfeasibleConfig>> = candidates
        .par_iter()
        .map(|cfg| {
            if let Err(e) = validate(cfg, dev, limits) {
                return Err(InfeasibleConfig {
                    config: cfg.as_vector(),
                    errors: e.violation_codes().iter().map(|s| s.to_string()).collect(),
                });
            }
            let mut per_workload = Vec::with_capacity(workloads.len());
            for w in workloads {
                match simulate(&w.graph, &w.model, cfg, dev, mem, limits) {
                    Ok(report) => per_workload.push(objective_value(&report, objective)),
                    Err(e) => {
                        return Err(InfeasibleConfig {
                            config: cfg.as_vector(),
                            errors: vec![format!("simulate: {e}")],
                        })
                    }
                }
            }
            Ok(RankedConfig {
                config: cfg.as_vector(),
                score: stable_mean(&per_workload),
                per_workload,
            })
        })
        .collect();

    let mut ranked = Vec::new();
    let mut infeasible = Vec::new();
    for item in evaluated {
        match item {
            Ok(r) => ranked.push(r),
            Err(i) => infeasible.push(i),
        }
    }
    ranked.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.config.cmp(&b.config)));
    infeasible.sort_by_key(|a| a.config);
    Ok(ArchSweepResult {
        objective,
        ranked,
        infeasible,
    })
}

// ---------------------------------------------------------------------------
// Optimization ablation
// ---------------------------------------------------------------------------

/// Flag bundles explored by the ablation. WB never runs alone: on-demand
/// sequential memory access makes isolated balancing impractical, so it
/// only appears on top of BP + PP.
pub fn ablation_flag_sets() -> Vec<OptFlags> {
    vec![
        OptFlags::BASELINE,
        OptFlags::new(true, false, false, false),
        OptFlags::new(false, true, false, false),
        OptFlags::new(true, true, false, false),
        OptFlags::new(true, false, true, false),
        OptFlags::new(false, true, true, false),
        OptFlags::new(true, true, true, false),
        OptFlags::new(true, true, false, true),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub workload: String,
    pub flags: String,
    pub energy_j: f64,
    /// Energy over the baseline energy of the same workload.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationResult {
    pub rows: Vec<AblationRow>,
}

impl AblationResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("workload,flags,energy_j,normalized\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{}\n",
                r.workload, r.flags, r.energy_j, r.normalized
            ));
        }
        out
    }

    pub fn normalized_for(&self, workload: &str, flags: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.workload == workload && r.flags == flags)
            .map(|r| r.normalized)
    }
}

/// Run every flag bundle on every workload and normalize energies to the
/// per-workload baseline.
pub fn ablate(
    workloads: &[Workload],
    dev: &DeviceLibrary,
    mem: &MemoryModel,
    cfg: &ArchConfig,
    limits: &PhotonicLimits,
) -> Result<AblationResult> {
    let mut rows = Vec::new();
    for w in workloads {
        let mut baseline_energy = None;
        for flags in ablation_flag_sets() {
            let mut run_cfg = *cfg;
            run_cfg.optimizations = flags;
            let report = simulate(&w.graph, &w.model, &run_cfg, dev, mem, limits)?;
            let energy = report.energy_total_j;
            let base = *baseline_energy.get_or_insert(energy);
            rows.push(AblationRow {
                workload: w.name.clone(),
                flags: flags.label(),
                energy_j: energy,
                normalized: energy / base,
            });
        }
    }
    Ok(AblationResult { rows })
}

// ---------------------------------------------------------------------------
// Bundled desk-scale workloads
// ---------------------------------------------------------------------------

/// Feature width shared by the bundled graphs and models.
pub const TOY_FEATURE_DIM: usize = 12;

/// The two bundled synthetic graphs: a sparse random graph and a power-law
/// graph, both with seeded features. Sparse enough that the default toy
/// partition keeps skipped blocks.
pub fn toy_graphs() -> Vec<(String, Graph)> {
    vec![
        (
            "er64".to_string(),
            generate_graph(GraphKind::ErdosRenyi, 64, 0.03, TOY_FEATURE_DIM, 21).unwrap(),
        ),
        (
            "pl48".to_string(),
            generate_graph(GraphKind::PowerLaw, 48, 2.3, TOY_FEATURE_DIM, 22).unwrap(),
        ),
    ]
}

/// The four bundled models, one per supported family.
pub fn toy_models() -> Vec<(String, GnnModelSpec)> {
    let gcn = GnnModelSpec {
        family: Family::Gcn,
        layers: vec![
            LayerSpec::dense(
                TOY_FEATURE_DIM,
                16,
                seeded_weights(TOY_FEATURE_DIM * 16, 101, 0.5),
                ReduceOp::Sum,
                Activation::Relu,
            ),
            LayerSpec::dense(16, 8, seeded_weights(16 * 8, 102, 0.5), ReduceOp::Sum, Activation::Relu),
        ],
        readout: None,
    };
    let mut sage_l1 = LayerSpec::dense(
        TOY_FEATURE_DIM,
        16,
        seeded_weights(TOY_FEATURE_DIM * 16, 111, 0.5),
        ReduceOp::Mean,
        Activation::Relu,
    );
    sage_l1.sample_cap = Some(5);
    sage_l1.sample_seed = 33;
    let mut sage_l2 = LayerSpec::dense(16, 8, seeded_weights(16 * 8, 112, 0.5), ReduceOp::Mean, Activation::Relu);
    sage_l2.sample_cap = Some(5);
    sage_l2.sample_seed = 34;
    let sage = GnnModelSpec {
        family: Family::Graphsage,
        layers: vec![sage_l1, sage_l2],
        readout: None,
    };
    let mut gin_layers = Vec::new();
    let dims = [TOY_FEATURE_DIM, 16, 16, 8];
    for k in 0..3 {
        let mut layer = LayerSpec::dense(
            dims[k],
            dims[k + 1],
            seeded_weights(dims[k] * dims[k + 1], 120 + k as u64, 0.5),
            ReduceOp::Sum,
            Activation::Relu,
        );
        layer.gin_epsilon = Some(0.1);
        gin_layers.push(layer);
    }
    let gin = GnnModelSpec {
        family: Family::Gin,
        layers: gin_layers,
        readout: Some(Readout::Sum),
    };
    let mut gat_l1 = LayerSpec::dense(
        TOY_FEATURE_DIM,
        8,
        seeded_weights(2 * TOY_FEATURE_DIM * 8, 131, 0.5),
        ReduceOp::Sum,
        Activation::LeakyRelu(0.2),
    );
    gat_l1.gat = Some(GatConfig {
        heads: 2,
        attention: vec![seeded_weights(16, 132, 0.5), seeded_weights(16, 133, 0.5)],
        concat: true,
    });
    let mut gat_l2 = LayerSpec::dense(16, 8, seeded_weights(16 * 8, 134, 0.5), ReduceOp::Sum, Activation::Softmax);
    gat_l2.gat = Some(GatConfig {
        heads: 1,
        attention: vec![seeded_weights(16, 135, 0.5)],
        concat: true,
    });
    let gat = GnnModelSpec {
        family: Family::Gat,
        layers: vec![gat_l1, gat_l2],
        readout: None,
    };
    vec![
        ("gcn".to_string(), gcn),
        ("graphsage".to_string(), sage),
        ("gin".to_string(), gin),
        ("gat".to_string(), gat),
    ]
}

/// All bundled workloads: every model on every graph.
pub fn toy_workloads() -> Vec<Workload> {
    let graphs = toy_graphs();
    let models = toy_models();
    let mut out = Vec::new();
    for (mname, model) in &models {
        for (gname, graph) in &graphs {
            out.push(Workload {
                name: format!("{mname}-{gname}"),
                graph: graph.clone(),
                model: model.clone(),
            });
        }
    }
    out
}

/// Architecture used by the bundled ablation runs: small enough for tests,
/// multi-lane so sharing and balancing have room to act.
pub fn toy_arch_config() -> ArchConfig {
    ArchConfig::new(8, 8, 6, 4, 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition_plan;

    fn shipped() -> (MrDesign, CrosstalkModel) {
        (MrDesign::default_design(), CrosstalkModel::shipped())
    }

    #[test]
    fn coherent_sweep_hits_cutoff() {
        let (design, model) = shipped();
        let spec = SweepSpec {
            kind: SweepKind::DeviceCoherent,
            wavelengths_nm: vec![1520.0],
            ..SweepSpec::default()
        };
        let result = sweep_device(&spec, &design, &model).unwrap();
        assert_eq!(result.summaries[0].max_mrs, 20);
        assert!(!result.summaries[0].saturated);
        // rows flip from pass to fail at the cutoff
        let pass_count = result.rows.iter().filter(|r| r.pass).count();
        assert_eq!(pass_count, 20);
    }

    #[test]
    fn noncoherent_sweep_hits_cutoff() {
        let (design, model) = shipped();
        let spec = SweepSpec {
            kind: SweepKind::DeviceNoncoherent,
            wavelengths_nm: vec![1550.0],
            spacing_nm: 1.0,
            ..SweepSpec::default()
        };
        let result = sweep_device(&spec, &design, &model).unwrap();
        assert_eq!(result.summaries[0].wavelengths, 18);
        assert_eq!(result.summaries[0].max_mrs, 36);
    }

    #[test]
    fn zero_noise_saturates() {
        let design = MrDesign::default_design();
        let model = CrosstalkModel::lorentzian(1.0, 0.0, 1.0);
        let spec = SweepSpec {
            kind: SweepKind::DeviceCoherent,
            wavelengths_nm: vec![1550.0],
            ..SweepSpec::default()
        };
        let result = sweep_device(&spec, &design, &model).unwrap();
        assert!(result.summaries[0].saturated);
    }

    #[test]
    fn arch_sweep_singleton_and_dominance() {
        let dev = DeviceLibrary::default();
        let mem = MemoryModel::default();
        let limits = PhotonicLimits::design_defaults();
        let workloads: Vec<Workload> = toy_workloads().into_iter().take(2).collect();
        let single = SweepSpec {
            kind: SweepKind::Arch,
            n_values: vec![8],
            v_values: vec![8],
            r_r_values: vec![6],
            r_c_values: vec![4],
            t_r_values: vec![5],
            ..SweepSpec::default()
        };
        let result = sweep_arch(&single, &workloads, &dev, &mem, &limits).unwrap();
        assert_eq!(result.ranked.len(), 1);
        assert_eq!(result.best().unwrap().config, [8, 8, 6, 4, 5]);

        // a candidate that violates the photonic limits lands in infeasible
        let mixed = SweepSpec {
            kind: SweepKind::Arch,
            n_values: vec![8],
            v_values: vec![8],
            r_r_values: vec![6, 19],
            r_c_values: vec![4],
            t_r_values: vec![5],
            ..SweepSpec::default()
        };
        let result = sweep_arch(&mixed, &workloads, &dev, &mem, &limits).unwrap();
        assert_eq!(result.ranked.len(), 1);
        assert_eq!(result.infeasible.len(), 1);
        assert!(result.infeasible[0]
            .errors
            .contains(&"noncoherent-width-exceeded".to_string()));
        // every ranked config re-validates ok
        for r in &result.ranked {
            let [n, v, rr, rc, tr] = r.config;
            validate(&ArchConfig::new(n, v, rr, rc, tr), &dev, &limits).unwrap();
        }
    }

    #[test]
    fn dominant_candidate_wins() {
        let dev = DeviceLibrary::default();
        let mem = MemoryModel::default();
        let limits = PhotonicLimits::design_defaults();
        let workloads: Vec<Workload> = toy_workloads().into_iter().take(2).collect();
        let spec = SweepSpec {
            kind: SweepKind::Arch,
            n_values: vec![4, 8],
            v_values: vec![4, 8],
            r_r_values: vec![6],
            r_c_values: vec![4],
            t_r_values: vec![5],
            ..SweepSpec::default()
        };
        let result = sweep_arch(&spec, &workloads, &dev, &mem, &limits).unwrap();
        let find = |cfg: [usize; 5]| {
            result
                .ranked
                .iter()
                .find(|r| r.config == cfg)
                .unwrap_or_else(|| panic!("{cfg:?} not ranked"))
        };
        let strong = find([8, 8, 6, 4, 5]);
        let weak = find([4, 4, 6, 4, 5]);
        // elementwise dominance on every workload, hence the better rank
        for (a, b) in strong.per_workload.iter().zip(&weak.per_workload) {
            assert!(a < b);
        }
        let pos = |cfg: [usize; 5]| result.ranked.iter().position(|r| r.config == cfg).unwrap();
        assert!(pos([8, 8, 6, 4, 5]) < pos([4, 4, 6, 4, 5]));
    }

    #[test]
    fn ranking_stable_under_workload_permutation() {
        let dev = DeviceLibrary::default();
        let mem = MemoryModel::default();
        let limits = PhotonicLimits::design_defaults();
        let mut workloads: Vec<Workload> = toy_workloads().into_iter().take(3).collect();
        let spec = SweepSpec {
            kind: SweepKind::Arch,
            n_values: vec![4, 8],
            v_values: vec![8],
            r_r_values: vec![6],
            r_c_values: vec![4],
            t_r_values: vec![5],
            ..SweepSpec::default()
        };
        let a = sweep_arch(&spec, &workloads, &dev, &mem, &limits).unwrap();
        workloads.reverse();
        let b = sweep_arch(&spec, &workloads, &dev, &mem, &limits).unwrap();
        let ranks_a: Vec<[usize; 5]> = a.ranked.iter().map(|r| r.config).collect();
        let ranks_b: Vec<[usize; 5]> = b.ranked.iter().map(|r| r.config).collect();
        assert_eq!(ranks_a, ranks_b);
        for (x, y) in a.ranked.iter().zip(&b.ranked) {
            assert_eq!(x.score, y.score);
        }
    }

    #[test]
    fn ablation_baseline_normalizes_to_one() {
        let dev = DeviceLibrary::default();
        let mem = MemoryModel::default();
        let limits = PhotonicLimits::design_defaults();
        let workloads: Vec<Workload> = toy_workloads().into_iter().take(1).collect();
        let result = ablate(&workloads, &dev, &mem, &toy_arch_config(), &limits).unwrap();
        for w in &workloads {
            assert_eq!(result.normalized_for(&w.name, "baseline"), Some(1.0));
        }
        // all entries normalized to the worst case
        assert!(result.rows.iter().all(|r| r.normalized > 0.0 && r.normalized <= 1.0 + 1e-12));
    }

    #[test]
    fn toy_graphs_keep_zero_blocks() {
        let cfg = toy_arch_config();
        for (name, g) in toy_graphs() {
            let plan = build_partition_plan(&g, cfg.v, cfg.n).unwrap();
            assert!(plan.skipped_block_count() > 0, "{name} has no zero blocks");
        }
    }

    #[test]
    fn toy_models_chain() {
        for (name, model) in toy_models() {
            model.check().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert_eq!(toy_workloads().len(), 8);
    }
}
