//! Analog-domain device models: resonance widths, crosstalk, SNR,
//! resolvability, loss budgets, laser power, and MR-bank feasibility scans.
//!
//! Powers are carried in watts everywhere inside this module; dB and dBm
//! appear only at interfaces. Crosstalk coupling uses a calibrated
//! Lorentzian line shape by default; a tabulated model can be loaded from a
//! calibration file instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound for bank-size scans so zero-noise models terminate.
pub const SCAN_CAP: usize = 512;

// ---------------------------------------------------------------------------
// Device description types
// ---------------------------------------------------------------------------

/// Microring resonator design point.
///
/// `tunable_range` is 2 x FWHM by construction; use [`MrDesign::new`] to keep
/// that invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrDesign {
    /// Resonant wavelength, nm.
    pub resonant_wavelength_nm: f64,
    pub q_factor: f64,
    /// Usable tuning range, nm (2 x FWHM).
    pub tunable_range_nm: f64,
    /// Round-trip amplitude attenuation, (0, 1].
    pub attenuation: f64,
    /// Cross-over coupling coefficient kappa, (0, 1).
    pub cross_coupling: f64,
    pub group_index: f64,
    /// Ring circumference, um.
    pub circumference_um: f64,
    pub radius_um: f64,
    pub waveguide_width_nm: f64,
    pub gap_nm: f64,
}

impl MrDesign {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        resonant_wavelength_nm: f64,
        q_factor: f64,
        attenuation: f64,
        cross_coupling: f64,
        group_index: f64,
        radius_um: f64,
        waveguide_width_nm: f64,
        gap_nm: f64,
    ) -> Result<Self> {
        if q_factor <= 0.0 {
            return Err(Error::domain("q_factor must be > 0"));
        }
        if !(0.0 < attenuation && attenuation <= 1.0) {
            return Err(Error::domain("attenuation must be in (0, 1]"));
        }
        if !(0.0 < cross_coupling && cross_coupling < 1.0) {
            return Err(Error::domain("cross_coupling must be in (0, 1)"));
        }
        Ok(Self {
            resonant_wavelength_nm,
            q_factor,
            tunable_range_nm: 2.0 * fwhm(resonant_wavelength_nm, q_factor)?,
            attenuation,
            cross_coupling,
            group_index,
            circumference_um: 2.0 * std::f64::consts::PI * radius_um,
            radius_um,
            waveguide_width_nm,
            gap_nm,
        })
    }

    /// The simulated design point: 450 nm waveguides, 10 um radius, 300 nm
    /// gap, Q = 3100 at 1550 nm.
    pub fn default_design() -> Self {
        Self::new(1550.0, 3100.0, 0.99, 0.2236, 4.2, 10.0, 450.0, 300.0)
            .expect("default design parameters are valid")
    }
}

/// Spectral-overlap model for the crosstalk coupling factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhiModel {
    /// Scaled Lorentzian line shape. Self-coupling (zero detuning) is total
    /// regardless of scale; the scale calibrates cross-channel leakage only.
    Lorentzian { scale: f64 },
    /// Piecewise-linear interpolation over (|detuning| nm, phi) pairs,
    /// sorted by detuning. Detunings beyond the table clamp to the ends.
    Table { table: Vec<(f64, f64)> },
}

/// Calibrated crosstalk model: coupling factor, per-MR coherent leak
/// fraction, and per-MR pass loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkModel {
    pub phi: PhiModel,
    /// Per-MR coherent (homodyne) leak fraction.
    pub x0: f64,
    /// Per-MR pass transmission in (0, 1].
    #[serde(rename = "L_p")]
    pub l_p: f64,
}

impl CrosstalkModel {
    pub fn lorentzian(scale: f64, x0: f64, l_p: f64) -> Self {
        Self {
            phi: PhiModel::Lorentzian { scale },
            x0,
            l_p,
        }
    }

    /// The shipped calibration: fitted so that the bank-feasibility scans
    /// reproduce the design cutoffs (20 coherent MRs; 18 wavelengths / 36
    /// MRs non-coherent at 21.3 dB). Regenerate with the `fit_calibration`
    /// example.
    pub fn shipped() -> Self {
        serde_json::from_str(include_str!("../data/calibration.json"))
            .expect("shipped calibration parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation("calibration-parse", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }
}

/// Optical loss constants, dB (per cm where noted), plus detector
/// sensitivity in dBm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossTable {
    pub waveguide_propagation_db_per_cm: f64,
    pub splitter_db: f64,
    pub combiner_db: f64,
    pub mr_through_db: f64,
    pub mr_modulation_db: f64,
    pub eo_tuning_db_per_cm: f64,
    pub pd_sensitivity_dbm: f64,
}

impl Default for LossTable {
    fn default() -> Self {
        Self {
            waveguide_propagation_db_per_cm: 1.0,
            splitter_db: 0.13,
            combiner_db: 0.9,
            mr_through_db: 0.02,
            mr_modulation_db: 0.72,
            eo_tuning_db_per_cm: 6.0,
            pd_sensitivity_dbm: -20.0,
        }
    }
}

impl LossTable {
    pub fn check(&self) -> Result<()> {
        let entries = [
            self.waveguide_propagation_db_per_cm,
            self.splitter_db,
            self.combiner_db,
            self.mr_through_db,
            self.mr_modulation_db,
            self.eo_tuning_db_per_cm,
        ];
        if entries.iter().any(|&v| v < 0.0) {
            return Err(Error::validation("loss-negative", "loss entries must be >= 0"));
        }
        Ok(())
    }
}

/// One leg of an optical link for the loss budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSegment {
    WaveguideCm(f64),
    Splitter(usize),
    Combiner(usize),
    MrThrough(usize),
    MrModulation(usize),
    EoTuningCm(f64),
}

impl LinkSegment {
    /// Parse a `(kind, amount)` pair from configuration text.
    pub fn parse(kind: &str, amount: f64) -> Result<Self> {
        if amount < 0.0 {
            return Err(Error::domain("segment amount must be >= 0"));
        }
        match kind {
            "waveguide_cm" => Ok(LinkSegment::WaveguideCm(amount)),
            "splitter" => Ok(LinkSegment::Splitter(amount as usize)),
            "combiner" => Ok(LinkSegment::Combiner(amount as usize)),
            "mr_through" => Ok(LinkSegment::MrThrough(amount as usize)),
            "mr_modulation" => Ok(LinkSegment::MrModulation(amount as usize)),
            "eo_tuning_cm" => Ok(LinkSegment::EoTuningCm(amount)),
            other => Err(Error::validation(
                "unknown-component-kind",
                format!("'{other}'"),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Device math
// ---------------------------------------------------------------------------

/// Full width at half maximum of a resonance: lambda / Q.
pub fn fwhm(lambda_res_nm: f64, q: f64) -> Result<f64> {
    if q <= 0.0 {
        return Err(Error::domain("q must be > 0"));
    }
    Ok(lambda_res_nm / q)
}

/// 10 log10(P_signal / P_noise), inputs in watts.
pub fn snr_db(p_signal_w: f64, p_noise_w: f64) -> Result<f64> {
    if p_signal_w <= 0.0 || p_noise_w <= 0.0 {
        return Err(Error::domain("powers must be > 0"));
    }
    Ok(10.0 * (p_signal_w / p_noise_w).log10())
}

/// Crosstalk coupling factor between an aggressor at `lambda_i` and a victim
/// MR at `lambda_j`.
///
/// Self-coupling (zero detuning) is total: the value is exactly 1. Cross
/// terms use the model: for the Lorentzian, `scale * (d/2)^2 / ((d/2)^2 +
/// detuning^2)` with `d = fwhm(lambda_j, q)`; for the table, linear
/// interpolation over |detuning|.
pub fn coupling_factor(lambda_i_nm: f64, lambda_j_nm: f64, q: f64, model: &CrosstalkModel) -> Result<f64> {
    if lambda_i_nm <= 0.0 || lambda_j_nm <= 0.0 {
        return Err(Error::domain("wavelengths must be > 0"));
    }
    let detuning = lambda_i_nm - lambda_j_nm;
    if detuning == 0.0 {
        return Ok(1.0);
    }
    match &model.phi {
        PhiModel::Lorentzian { scale } => {
            let half = fwhm(lambda_j_nm, q)? / 2.0;
            Ok(scale * half * half / (half * half + detuning * detuning))
        }
        PhiModel::Table { table } => {
            let d = detuning.abs();
            if table.is_empty() {
                return Err(Error::validation("calibration-table-empty", "no points"));
            }
            if d <= table[0].0 {
                return Ok(table[0].1);
            }
            for pair in table.windows(2) {
                let (d0, p0) = pair[0];
                let (d1, p1) = pair[1];
                if d <= d1 {
                    let t = (d - d0) / (d1 - d0);
                    return Ok(p0 + t * (p1 - p0));
                }
            }
            Ok(table.last().unwrap().1)
        }
    }
}

/// Heterodyne (inter-channel) noise power at the victim: the sum over all
/// other channels of their power leaked through the victim's coupling
/// factor.
pub fn heterodyne_noise(
    channels: &[(f64, f64)],
    victim_index: usize,
    q: f64,
    model: &CrosstalkModel,
) -> Result<f64> {
    if victim_index >= channels.len() {
        return Err(Error::domain(format!(
            "victim index {victim_index} out of {} channels",
            channels.len()
        )));
    }
    let (lambda_v, _) = channels[victim_index];
    let mut noise = 0.0;
    for (i, &(lambda_i, p_i)) in channels.iter().enumerate() {
        if i == victim_index {
            continue;
        }
        if p_i <= 0.0 {
            return Err(Error::domain("channel powers must be > 0"));
        }
        noise += coupling_factor(lambda_i, lambda_v, q, model)? * p_i;
    }
    Ok(noise)
}

/// Homodyne (coherent) noise power accumulated over a bank of `n_mrs` MRs:
/// `sum_i p_in * x0 * L_p^(n-i)`.
pub fn homodyne_noise(p_in_w: f64, n_mrs: usize, model: &CrosstalkModel) -> Result<f64> {
    if p_in_w <= 0.0 {
        return Err(Error::domain("input power must be > 0"));
    }
    let mut noise = 0.0;
    for i in 1..=n_mrs {
        noise += p_in_w * model.x0 * model.l_p.powi((n_mrs - i) as i32);
    }
    Ok(noise)
}

/// Closed form of [`homodyne_noise`] for the constant-leak model; kept for
/// cross-checking the loop sum.
pub fn homodyne_noise_closed_form(p_in_w: f64, n_mrs: usize, model: &CrosstalkModel) -> f64 {
    if n_mrs == 0 {
        return 0.0;
    }
    if (model.l_p - 1.0).abs() < 1e-15 {
        p_in_w * model.x0 * n_mrs as f64
    } else {
        p_in_w * model.x0 * (1.0 - model.l_p.powi(n_mrs as i32)) / (1.0 - model.l_p)
    }
}

/// Q-factor implied by the coupling design: `pi n_g L sqrt((1-k^2) a) /
/// (lambda (1 - a (1-k^2)))`, with circumference and wavelength brought to a
/// common unit.
pub fn q_factor_from_coupling(
    n_g: f64,
    circumference_um: f64,
    kappa: f64,
    a: f64,
    lambda_nm: f64,
) -> Result<f64> {
    if !(0.0 < kappa && kappa < 1.0) {
        return Err(Error::domain("kappa must be in (0, 1)"));
    }
    if !(0.0 < a && a <= 1.0) {
        return Err(Error::domain("a must be in (0, 1]"));
    }
    let one_minus_k2 = 1.0 - kappa * kappa;
    let denom_term = 1.0 - a * one_minus_k2;
    if denom_term <= 0.0 {
        return Err(Error::domain("degenerate denominator: a(1-kappa^2) >= 1"));
    }
    let circumference_nm = circumference_um * 1000.0;
    Ok(std::f64::consts::PI * n_g * circumference_nm * (one_minus_k2 * a).sqrt()
        / (lambda_nm * denom_term))
}

/// Minimum SNR (dB) needed to resolve `n_levels` amplitude levels across a
/// tuning range of `r_tune_nm`.
pub fn required_snr_db(n_levels: usize, r_tune_nm: f64) -> Result<f64> {
    if n_levels < 1 {
        return Err(Error::domain("n_levels must be >= 1"));
    }
    if r_tune_nm <= 0.0 {
        return Err(Error::domain("r_tune must be > 0"));
    }
    Ok(10.0 * (n_levels as f64 / r_tune_nm).log10())
}

/// Signed resolvability margin in nm: `2 lambda / Q - N_levels 10^(-SNR/10)`.
/// Positive means the design resolves all levels at that SNR.
pub fn resolvability_margin(n_levels: usize, lambda_nm: f64, q: f64, snr_db: f64) -> Result<f64> {
    if n_levels < 1 || lambda_nm <= 0.0 || q <= 0.0 {
        return Err(Error::domain("inputs must be positive"));
    }
    Ok(2.0 * lambda_nm / q - n_levels as f64 * 10f64.powf(-snr_db / 10.0))
}

/// Lowest distinguishable power level: `P_signal * R_tune / N_levels`.
pub fn lpar_power(p_signal_w: f64, r_tune_nm: f64, n_levels: usize) -> Result<f64> {
    if n_levels < 1 {
        return Err(Error::domain("n_levels must be >= 1"));
    }
    Ok(p_signal_w * r_tune_nm / n_levels as f64)
}

/// The lowest power level must clear the noise floor for level-accurate
/// operation; algebraically this is the same gate as
/// `snr_db > required_snr_db(n_levels, r_tune)`.
pub fn lpar_exceeds_noise(
    p_signal_w: f64,
    r_tune_nm: f64,
    n_levels: usize,
    p_noise_w: f64,
) -> Result<bool> {
    Ok(lpar_power(p_signal_w, r_tune_nm, n_levels)? > p_noise_w)
}

/// Total link loss in dB over the given segments.
pub fn link_loss_db(segments: &[LinkSegment], table: &LossTable) -> Result<f64> {
    let mut total = 0.0;
    for seg in segments {
        total += match *seg {
            LinkSegment::WaveguideCm(cm) => {
                if cm < 0.0 {
                    return Err(Error::domain("negative length"));
                }
                cm * table.waveguide_propagation_db_per_cm
            }
            LinkSegment::Splitter(n) => n as f64 * table.splitter_db,
            LinkSegment::Combiner(n) => n as f64 * table.combiner_db,
            LinkSegment::MrThrough(n) => n as f64 * table.mr_through_db,
            LinkSegment::MrModulation(n) => n as f64 * table.mr_modulation_db,
            LinkSegment::EoTuningCm(cm) => {
                if cm < 0.0 {
                    return Err(Error::domain("negative length"));
                }
                cm * table.eo_tuning_db_per_cm
            }
        };
    }
    Ok(total)
}

/// Minimum laser power in dBm for a link:
/// `S_detector + P_photo_loss + 10 log10(N_wavelengths)`.
pub fn laser_power_dbm(s_detector_dbm: f64, p_photo_loss_db: f64, n_wavelengths: usize) -> Result<f64> {
    if n_wavelengths < 1 {
        return Err(Error::domain("n_wavelengths must be >= 1"));
    }
    Ok(s_detector_dbm + p_photo_loss_db + 10.0 * (n_wavelengths as f64).log10())
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

// ---------------------------------------------------------------------------
// Bank feasibility scans
// ---------------------------------------------------------------------------

/// Result of a coherent bank-size scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherentFeasibility {
    /// Largest bank size meeting the SNR requirement (0 if even one MR fails).
    pub max_mrs: usize,
    /// True when the scan hit [`SCAN_CAP`] without failing.
    pub saturated: bool,
}

/// Result of a non-coherent comb scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncoherentFeasibility {
    /// Two MR banks serve the comb, so `mr_count = 2 * wavelength_count`.
    pub mr_count: usize,
    pub wavelength_count: usize,
    pub saturated: bool,
}

/// SNR of a coherent summation bank of `n` MRs at unit input power:
/// signal = input, noise = accumulated homodyne leakage.
pub fn coherent_bank_snr_db(n: usize, model: &CrosstalkModel) -> Result<f64> {
    let p = 1e-3; // reference 1 mW; SNR is ratio-invariant
    let noise = homodyne_noise(p, n, model)?;
    if noise <= 0.0 {
        return Ok(f64::INFINITY);
    }
    snr_db(p, noise)
}

/// Largest coherent summation bank meeting `snr_requirement_db`, by linear
/// scan from n = 1 up to [`SCAN_CAP`].
pub fn max_coherent_mrs(
    _lambda_nm: f64,
    _design: &MrDesign,
    model: &CrosstalkModel,
    snr_requirement_db: f64,
) -> Result<CoherentFeasibility> {
    let mut best = 0;
    for n in 1..=SCAN_CAP {
        if coherent_bank_snr_db(n, model)? >= snr_requirement_db {
            best = n;
        } else {
            return Ok(CoherentFeasibility {
                max_mrs: best,
                saturated: false,
            });
        }
    }
    Ok(CoherentFeasibility {
        max_mrs: best,
        saturated: true,
    })
}

/// Worst-case (comb-center) channel SNR for a `w`-wavelength comb starting
/// at `lambda0` with the given spacing. Noise combines heterodyne leakage
/// from all other channels and the homodyne contribution of the two
/// same-wavelength MRs (one per bank).
pub fn noncoherent_comb_snr_db(
    lambda0_nm: f64,
    spacing_nm: f64,
    w: usize,
    q: f64,
    model: &CrosstalkModel,
) -> Result<f64> {
    if w < 1 {
        return Err(Error::domain("need at least one wavelength"));
    }
    let p = 1e-3;
    let channels: Vec<(f64, f64)> = (0..w)
        .map(|i| (lambda0_nm + i as f64 * spacing_nm, p))
        .collect();
    let victim = w / 2;
    let lambda_v = channels[victim].0;
    let signal = coupling_factor(lambda_v, lambda_v, q, model)? * p;
    let het = heterodyne_noise(&channels, victim, q, model)?;
    let hom = homodyne_noise(p, 2, model)?;
    let noise = het + hom;
    if noise <= 0.0 {
        return Ok(f64::INFINITY);
    }
    snr_db(signal, noise)
}

/// Largest WDM comb meeting `snr_requirement_db` on its worst-case channel.
pub fn max_noncoherent_mrs(
    lambda0_nm: f64,
    spacing_nm: f64,
    design: &MrDesign,
    model: &CrosstalkModel,
    snr_requirement_db: f64,
) -> Result<NoncoherentFeasibility> {
    if spacing_nm <= 0.0 {
        return Err(Error::domain("spacing must be > 0"));
    }
    let mut best = 0;
    for w in 1..=SCAN_CAP {
        if noncoherent_comb_snr_db(lambda0_nm, spacing_nm, w, design.q_factor, model)?
            >= snr_requirement_db
        {
            best = w;
        } else {
            return Ok(NoncoherentFeasibility {
                mr_count: 2 * best,
                wavelength_count: best,
                saturated: false,
            });
        }
    }
    Ok(NoncoherentFeasibility {
        mr_count: 2 * best,
        wavelength_count: best,
        saturated: true,
    })
}

// ---------------------------------------------------------------------------
// Calibration fit
// ---------------------------------------------------------------------------

/// Fit (scale, x0, L_p) so the feasibility scans reproduce the target
/// cutoffs: `coh_cutoff` MRs in a coherent bank, and `nc_cutoff` wavelengths
/// at `lambda0` / `spacing` non-coherent, both at `requirement_db`.
///
/// L_p is anchored to the MR through loss; x0 is the midpoint of the
/// interval that puts the coherent cutoff exactly at `coh_cutoff`; the
/// Lorentzian scale is the midpoint of the interval that puts the
/// non-coherent cutoff at `nc_cutoff` given x0 and L_p.
pub fn fit_calibration(
    loss: &LossTable,
    q: f64,
    requirement_db: f64,
    coh_cutoff: usize,
    lambda0_nm: f64,
    spacing_nm: f64,
    nc_cutoff: usize,
) -> Result<CrosstalkModel> {
    let l_p = 10f64.powf(-loss.mr_through_db / 10.0);
    let ratio = 10f64.powf(-requirement_db / 10.0);
    let geom = |n: usize| -> f64 { (0..n).map(|k| l_p.powi(k as i32)).sum() };

    let x0_hi = ratio / geom(coh_cutoff);
    let x0_lo = ratio / geom(coh_cutoff + 1);
    if x0_lo >= x0_hi {
        return Err(Error::domain("coherent cutoff interval is empty"));
    }
    let x0 = 0.5 * (x0_lo + x0_hi);

    // Heterodyne Lorentzian sums at unit scale for the two comb sizes that
    // bracket the cutoff.
    let unit = CrosstalkModel::lorentzian(1.0, 0.0, l_p);
    let lor_sum = |w: usize| -> Result<f64> {
        let channels: Vec<(f64, f64)> = (0..w)
            .map(|i| (lambda0_nm + i as f64 * spacing_nm, 1.0))
            .collect();
        heterodyne_noise(&channels, w / 2, q, &unit)
    };
    let hom2 = x0 * (1.0 + l_p);
    let budget = ratio - hom2;
    if budget <= 0.0 {
        return Err(Error::domain("homodyne floor exceeds the SNR budget"));
    }
    let s_hi = budget / lor_sum(nc_cutoff)?;
    let s_lo = budget / lor_sum(nc_cutoff + 1)?;
    if s_lo >= s_hi {
        return Err(Error::domain("non-coherent cutoff interval is empty"));
    }
    let scale = 0.5 * (s_lo + s_hi);

    let model = CrosstalkModel::lorentzian(scale, x0, l_p);

    // Self-check both cutoffs before handing the model out.
    let design = MrDesign::default_design();
    let coh = max_coherent_mrs(lambda0_nm, &design, &model, requirement_db)?;
    let nc = max_noncoherent_mrs(lambda0_nm, spacing_nm, &design, &model, requirement_db)?;
    if coh.max_mrs != coh_cutoff || nc.wavelength_count != nc_cutoff {
        return Err(Error::domain(format!(
            "fit self-check failed: coherent {} (want {coh_cutoff}), non-coherent {} (want {nc_cutoff})",
            coh.max_mrs, nc.wavelength_count
        )));
    }
    Ok(model)
}
