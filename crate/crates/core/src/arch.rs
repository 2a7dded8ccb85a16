//! Architecture configuration, derived hardware inventory, and photonic
//! feasibility validation.
//!
//! The five architecture parameters: `n` edge-control units (input group
//! size), `v` execution lanes (output group size), `r_r` x `r_c` reduce-unit
//! rows and columns, and `t_r` transform-unit rows. Reduce rows equal
//! transform columns by construction, so `r_r` also fixes the WDM comb
//! width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::photonics::{
    laser_power_dbm, link_loss_db, CrosstalkModel, LinkSegment, LossTable, MrDesign,
    max_coherent_mrs, max_noncoherent_mrs,
};

/// SNR requirement used for bank sizing and validation, dB.
pub const DEFAULT_SNR_REQUIREMENT_DB: f64 = 21.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptFlags {
    pub bp: bool,
    pub pp: bool,
    pub dac_sharing: bool,
    pub wb: bool,
}

impl Default for OptFlags {
    fn default() -> Self {
        Self {
            bp: true,
            pp: true,
            dac_sharing: true,
            wb: false,
        }
    }
}

impl OptFlags {
    pub const BASELINE: OptFlags = OptFlags {
        bp: false,
        pp: false,
        dac_sharing: false,
        wb: false,
    };

    pub fn new(bp: bool, pp: bool, dac_sharing: bool, wb: bool) -> Self {
        Self {
            bp,
            pp,
            dac_sharing,
            wb,
        }
    }

    /// Workload balancing forces per-lane rates to diverge, which breaks the
    /// shared weight DAC assumption; normalization turns DAC sharing off
    /// whenever WB is on.
    pub fn normalized(mut self) -> Self {
        if self.wb {
            self.dac_sharing = false;
        }
        self
    }

    pub fn label(&self) -> String {
        let names: Vec<&str> = [
            (self.bp, "BP"),
            (self.pp, "PP"),
            (self.dac_sharing, "DAC"),
            (self.wb, "WB"),
        ]
        .iter()
        .filter_map(|&(on, name)| if on { Some(name) } else { None })
        .collect();
        if names.is_empty() {
            "baseline".to_string()
        } else {
            names.join("+")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchConfig {
    /// Edge-control-unit count (input vertex group size).
    pub n: usize,
    /// Execution-lane count (output vertex group size).
    pub v: usize,
    /// Reduce-unit rows = transform-unit columns = WDM comb width.
    pub r_r: usize,
    /// Reduce-unit columns (coherent summation width).
    pub r_c: usize,
    /// Transform-unit rows.
    pub t_r: usize,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default)]
    pub optimizations: OptFlags,
}

fn default_precision() -> u32 {
    8
}

impl ArchConfig {
    pub fn new(n: usize, v: usize, r_r: usize, r_c: usize, t_r: usize) -> Self {
        Self {
            n,
            v,
            r_r,
            r_c,
            t_r,
            precision_bits: 8,
            optimizations: OptFlags::default(),
        }
    }

    /// The design-space optimum reported for this architecture.
    pub fn best_reported() -> Self {
        Self::new(20, 20, 18, 7, 17)
    }

    pub fn as_vector(&self) -> [usize; 5] {
        [self.n, self.v, self.r_r, self.r_c, self.t_r]
    }

    pub fn bytes_per_feature(&self) -> usize {
        (self.precision_bits as usize).div_ceil(8)
    }
}

/// A device's latency/power pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub latency_ns: f64,
    pub power_w: f64,
}

/// All optoelectronic device constants plus the loss table and MR design
/// point used by validation and the energy model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeviceLibrary {
    pub eo_tuning_latency_ns: f64,
    /// EO tuning draws power proportional to the resonance shift.
    pub eo_tuning_power_w_per_nm: f64,
    pub to_tuning_latency_ns: f64,
    pub to_tuning_power_w_per_fsr: f64,
    pub vcsel: Device,
    pub photodetector: Device,
    pub soa: Device,
    pub dac8: Device,
    pub adc8: Device,
    pub softmax_clock_mhz: f64,
    pub loss_table: LossTable,
    pub mr_design: MrDesign,
    pub laser_max_dbm: f64,
    pub laser_wallplug_efficiency: f64,
    /// Representative on-chip waveguide length for the worst link budget.
    pub link_waveguide_cm: f64,
    /// Fraction of tuning events that fall back to thermal tuning.
    pub to_usage_fraction: f64,
}

impl Default for DeviceLibrary {
    fn default() -> Self {
        Self {
            eo_tuning_latency_ns: 20.0,
            eo_tuning_power_w_per_nm: 4e-6,
            to_tuning_latency_ns: 4000.0,
            to_tuning_power_w_per_fsr: 27.5e-3,
            vcsel: Device {
                latency_ns: 0.07,
                power_w: 1.3e-3,
            },
            photodetector: Device {
                latency_ns: 0.0058,
                power_w: 2.8e-3,
            },
            soa: Device {
                latency_ns: 0.3,
                power_w: 2.2e-3,
            },
            dac8: Device {
                latency_ns: 0.29,
                power_w: 3e-3,
            },
            adc8: Device {
                latency_ns: 0.82,
                power_w: 3.1e-3,
            },
            softmax_clock_mhz: 294.0,
            loss_table: LossTable::default(),
            mr_design: MrDesign::default_design(),
            laser_max_dbm: 10.0,
            laser_wallplug_efficiency: 1.0,
            link_waveguide_cm: 0.5,
            to_usage_fraction: 0.0,
        }
    }
}

impl DeviceLibrary {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("device-parse", e.to_string()))
    }

    pub fn check(&self) -> Result<()> {
        let positives = [
            self.eo_tuning_latency_ns,
            self.to_tuning_latency_ns,
            self.vcsel.latency_ns,
            self.photodetector.latency_ns,
            self.soa.latency_ns,
            self.dac8.latency_ns,
            self.adc8.latency_ns,
            self.softmax_clock_mhz,
            self.vcsel.power_w,
            self.photodetector.power_w,
            self.soa.power_w,
            self.dac8.power_w,
            self.adc8.power_w,
        ];
        if positives.iter().any(|&v| v <= 0.0) {
            return Err(Error::validation(
                "device-not-positive",
                "latencies and powers must be > 0",
            ));
        }
        self.loss_table.check()
    }

    /// Mean EO tuning excursion: half the usable tuning range.
    pub fn avg_eo_shift_nm(&self) -> f64 {
        self.mr_design.tunable_range_nm / 2.0
    }

    /// Worst-link loss budget for a configuration: one splitter and
    /// combiner, every MR pass on the longest reduce-to-update path, two
    /// modulation events, and the representative waveguide run.
    pub fn worst_link_loss_db(&self, cfg: &ArchConfig) -> Result<f64> {
        link_loss_db(
            &[
                LinkSegment::Splitter(1),
                LinkSegment::Combiner(1),
                LinkSegment::MrThrough(cfg.r_c + cfg.t_r),
                LinkSegment::MrModulation(2),
                LinkSegment::WaveguideCm(self.link_waveguide_cm),
            ],
            &self.loss_table,
        )
    }
}

/// MR-bank size limits derived from the device-level sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhotonicLimits {
    pub max_coherent: usize,
    pub max_noncoherent_wavelengths: usize,
}

impl PhotonicLimits {
    /// The shipped design point: 20 coherent MRs, 18 WDM wavelengths.
    pub fn design_defaults() -> Self {
        Self {
            max_coherent: 20,
            max_noncoherent_wavelengths: 18,
        }
    }

    /// Derive the limits by running both feasibility scans.
    pub fn from_model(
        design: &MrDesign,
        model: &CrosstalkModel,
        snr_requirement_db: f64,
    ) -> Result<Self> {
        let coh = max_coherent_mrs(
            design.resonant_wavelength_nm,
            design,
            model,
            snr_requirement_db,
        )?;
        let nc = max_noncoherent_mrs(design.resonant_wavelength_nm, 1.0, design, model, snr_requirement_db)?;
        Ok(Self {
            max_coherent: coh.max_mrs,
            max_noncoherent_wavelengths: nc.wavelength_count,
        })
    }
}

/// Derived hardware inventory for a validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchInstance {
    pub config: ArchConfig,
    /// Reduce-block MRs: `v (r_r r_c + r_r)` — one feedback MR per row lane.
    pub mrs_reduce: usize,
    /// Combine-block MRs: `v r_r t_r`.
    pub mrs_transform: usize,
    /// Broadband batch-norm MRs: `v t_r`.
    pub bn_mrs: usize,
    pub dac_count: usize,
    pub adc_count: usize,
    pub vcsel_count: usize,
    pub pd_count: usize,
    pub soa_count: usize,
    pub wavelengths_noncoherent: usize,
    pub coherent_bank_width: usize,
}

impl ArchInstance {
    pub fn total_mrs(&self) -> usize {
        self.mrs_reduce + self.mrs_transform + self.bn_mrs
    }
}

/// Combine-block weight DAC count under the sharing rule: without sharing
/// every MR has its own DAC (`v r_r t_r`); with sharing the `v` transform
/// units share each weight DAC (`r_r t_r`).
pub fn combine_dac_count(cfg: &ArchConfig, sharing: bool) -> usize {
    if sharing {
        cfg.r_r * cfg.t_r
    } else {
        cfg.v * cfg.r_r * cfg.t_r
    }
}

/// Gather-path DACs: one per reduce row per lane.
pub fn gather_dac_count(cfg: &ArchConfig) -> usize {
    cfg.v * cfg.r_r
}

/// Total DAC inventory (combine + gather paths).
pub fn dac_count(cfg: &ArchConfig, sharing: bool) -> usize {
    combine_dac_count(cfg, sharing) + gather_dac_count(cfg)
}

/// Check a configuration against structural and photonic limits. Every
/// violated check yields a named error; all violations are reported
/// together.
pub fn validate(cfg: &ArchConfig, dev: &DeviceLibrary, limits: &PhotonicLimits) -> Result<()> {
    let mut violations = Vec::new();
    for (name, value) in [
        ("n", cfg.n),
        ("v", cfg.v),
        ("r_r", cfg.r_r),
        ("r_c", cfg.r_c),
        ("t_r", cfg.t_r),
    ] {
        if value < 1 {
            violations.push(Violation::new(
                "count-not-positive",
                format!("{name} must be >= 1"),
            ));
        }
    }
    if !(2..=16).contains(&cfg.precision_bits) {
        violations.push(Violation::new(
            "precision-out-of-range",
            format!("precision_bits {} outside [2, 16]", cfg.precision_bits),
        ));
    }
    if cfg.r_c > limits.max_coherent {
        violations.push(Violation::new(
            "coherent-width-exceeded",
            format!("r_c {} exceeds coherent bank limit {}", cfg.r_c, limits.max_coherent),
        ));
    }
    if cfg.r_r > limits.max_noncoherent_wavelengths {
        violations.push(Violation::new(
            "noncoherent-width-exceeded",
            format!(
                "r_r {} exceeds wavelength limit {}",
                cfg.r_r, limits.max_noncoherent_wavelengths
            ),
        ));
    }
    if cfg.r_r >= 1 {
        let loss = dev.worst_link_loss_db(cfg)?;
        let needed = laser_power_dbm(dev.loss_table.pd_sensitivity_dbm, loss, cfg.r_r.max(1))?;
        if needed > dev.laser_max_dbm {
            violations.push(Violation::new(
                "laser-infeasible",
                format!(
                    "worst link needs {needed:.2} dBm > laser max {:.2} dBm",
                    dev.laser_max_dbm
                ),
            ));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

/// Build the hardware inventory for a configuration. Fails with the full
/// validation error list on an invalid configuration.
pub fn instantiate(cfg: &ArchConfig, dev: &DeviceLibrary, limits: &PhotonicLimits) -> Result<ArchInstance> {
    validate(cfg, dev, limits)?;
    let sharing = cfg.optimizations.normalized().dac_sharing;
    Ok(ArchInstance {
        config: *cfg,
        mrs_reduce: cfg.v * (cfg.r_r * cfg.r_c + cfg.r_r),
        mrs_transform: cfg.v * cfg.r_r * cfg.t_r,
        bn_mrs: cfg.v * cfg.t_r,
        dac_count: dac_count(cfg, sharing),
        adc_count: cfg.v * cfg.r_r + cfg.v * cfg.t_r,
        vcsel_count: cfg.v * (cfg.r_r + cfg.r_c + cfg.t_r),
        pd_count: cfg.v * (cfg.r_r + cfg.t_r),
        soa_count: cfg.v * cfg.t_r,
        wavelengths_noncoherent: cfg.r_r,
        coherent_bank_width: cfg.r_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (DeviceLibrary, PhotonicLimits) {
        (DeviceLibrary::default(), PhotonicLimits::design_defaults())
    }

    #[test]
    fn best_config_inventory() {
        let (dev, limits) = setup();
        let cfg = ArchConfig::best_reported();
        let inst = instantiate(&cfg, &dev, &limits).unwrap();
        assert_eq!(inst.mrs_transform, 6120);
        assert_eq!(inst.mrs_reduce, 20 * (18 * 7 + 18));
        assert_eq!(inst.bn_mrs, 340);
        assert_eq!(inst.total_mrs(), inst.mrs_reduce + inst.mrs_transform + inst.bn_mrs);
    }

    #[test]
    fn unit_config_inventory() {
        let (dev, limits) = setup();
        let cfg = ArchConfig::new(1, 1, 1, 1, 1);
        let inst = instantiate(&cfg, &dev, &limits).unwrap();
        assert_eq!(inst.mrs_transform, 1);
        assert_eq!(inst.mrs_reduce, 2);
    }

    #[test]
    fn instantiate_is_deterministic() {
        let (dev, limits) = setup();
        let cfg = ArchConfig::best_reported();
        let a = instantiate(&cfg, &dev, &limits).unwrap();
        let b = instantiate(&cfg, &dev, &limits).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dac_sharing_counts() {
        let cfg = ArchConfig::best_reported();
        assert_eq!(combine_dac_count(&cfg, false), 6120);
        assert_eq!(combine_dac_count(&cfg, true), 306);
        // sharing factor is exactly v
        for (n, v, r_r, r_c, t_r) in [(4, 1, 3, 2, 5), (8, 8, 6, 4, 5), (20, 20, 18, 7, 17)] {
            let cfg = ArchConfig::new(n, v, r_r, r_c, t_r);
            assert_eq!(
                combine_dac_count(&cfg, false),
                combine_dac_count(&cfg, true) * v
            );
        }
        // single lane: sharing changes nothing
        let single = ArchConfig::new(4, 1, 3, 2, 5);
        assert_eq!(dac_count(&single, true), dac_count(&single, false));
    }

    #[test]
    fn validation_named_errors() {
        let (dev, limits) = setup();
        let ok = ArchConfig::best_reported();
        assert!(validate(&ok, &dev, &limits).is_ok());

        let mut wide_r = ok;
        wide_r.r_r = 19;
        let err = validate(&wide_r, &dev, &limits).unwrap_err();
        assert!(err.violation_codes().contains(&"noncoherent-width-exceeded"));

        let mut wide_c = ok;
        wide_c.r_c = 21;
        let err = validate(&wide_c, &dev, &limits).unwrap_err();
        assert!(err.violation_codes().contains(&"coherent-width-exceeded"));

        let mut bits = ok;
        bits.precision_bits = 32;
        let err = validate(&bits, &dev, &limits).unwrap_err();
        assert!(err.violation_codes().contains(&"precision-out-of-range"));

        let mut zero = ok;
        zero.v = 0;
        let err = validate(&zero, &dev, &limits).unwrap_err();
        assert!(err.violation_codes().contains(&"count-not-positive"));
    }

    #[test]
    fn laser_budget_gate() {
        let (mut dev, limits) = setup();
        // a loss budget that no laser in range can cover
        dev.loss_table.waveguide_propagation_db_per_cm = 80.0;
        let err = validate(&ArchConfig::best_reported(), &dev, &limits).unwrap_err();
        assert!(err.violation_codes().contains(&"laser-infeasible"));
    }

    #[test]
    fn instantiate_rejects_invalid() {
        let (dev, limits) = setup();
        let mut cfg = ArchConfig::best_reported();
        cfg.r_c = 21;
        assert!(instantiate(&cfg, &dev, &limits).is_err());
    }

    #[test]
    fn limits_from_shipped_model() {
        let model = CrosstalkModel::shipped();
        let limits =
            PhotonicLimits::from_model(&MrDesign::default_design(), &model, DEFAULT_SNR_REQUIREMENT_DB)
                .unwrap();
        assert_eq!(limits.max_coherent, 20);
        assert_eq!(limits.max_noncoherent_wavelengths, 18);
    }

    #[test]
    fn wb_disables_dac_sharing() {
        let flags = OptFlags::new(true, true, true, true).normalized();
        assert!(!flags.dac_sharing);
        assert_eq!(flags.label(), "BP+PP+WB");
        assert_eq!(OptFlags::BASELINE.label(), "baseline");
    }

    #[test]
    fn device_library_json_roundtrip() {
        let dev = DeviceLibrary::default();
        let text = serde_json::to_string(&dev).unwrap();
        let back = DeviceLibrary::from_json(&text).unwrap();
        assert_eq!(dev, back);
        // partial JSON falls back to defaults
        let partial = DeviceLibrary::from_json(r#"{"laser_max_dbm": 5.0}"#).unwrap();
        assert_eq!(partial.laser_max_dbm, 5.0);
        assert_eq!(partial.vcsel, dev.vcsel);
    }
}
