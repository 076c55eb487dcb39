//! Radio propagation, noise, SNR and throughput along a sampled track axis.
//!
//! The model is a free-space path loss with a per-node-class calibration
//! factor that absorbs antenna and train-penetration losses. All power
//! summation happens in the linear milliwatt domain; dB values appear only
//! at the API boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{db_from_linear, linear_from_db, SPEED_OF_LIGHT_M_S};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("subcarrier count must be >= 1")]
    InvalidSubcarrierCount,
    #[error("invalid corridor config: {0}")]
    InvalidConfig(String),
    #[error("grid step {step} m exceeds segment length {isd} m")]
    EmptyGrid { step: f64, isd: f64 },
    #[error("grid step must be > 0, got {0}")]
    InvalidGridStep(f64),
}

/// Geometry, radio and calibration parameters of one corridor segment.
///
/// The two high-power sites sit at 0 and `isd_m`; repeater positions are
/// strictly inside the segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorConfig {
    /// Inter-site distance between the two high-power sites, meters.
    pub isd_m: f64,
    /// Low-power repeater positions, meters, strictly increasing in (0, isd).
    pub lp_positions_m: Vec<f64>,
    /// Carrier frequency, Hz.
    pub carrier_frequency_hz: f64,
    /// Subcarrier count dividing total power into per-subcarrier power.
    pub n_subcarriers: u32,
    /// Total radiated power per high-power antenna, dBm.
    pub hp_eirp_dbm: f64,
    /// Total radiated power per repeater, dBm.
    pub lp_eirp_dbm: f64,
    /// Port-to-port calibration loss for high-power sites, dB.
    pub hp_calib_loss_db: f64,
    /// Port-to-port calibration loss for repeater nodes, dB.
    pub lp_calib_loss_db: f64,
    /// Mobile terminal noise figure, dB.
    pub nf_mt_db: f64,
    /// Repeater noise figure, dB.
    pub nf_lp_db: f64,
    /// Thermal noise floor per subcarrier, dBm.
    pub noise_floor_dbm: f64,
    /// Clamp floor for source separation, meters (near-field guard).
    pub min_propagation_m: f64,
}

impl Default for CorridorConfig {
    fn default() -> Self {
        Self {
            isd_m: 500.0,
            lp_positions_m: Vec::new(),
            carrier_frequency_hz: 3.5e9,
            n_subcarriers: 3300,
            hp_eirp_dbm: 64.0,
            lp_eirp_dbm: 40.0,
            hp_calib_loss_db: 33.0,
            lp_calib_loss_db: 20.0,
            nf_mt_db: 5.0,
            nf_lp_db: 8.0,
            noise_floor_dbm: -132.0,
            min_propagation_m: 10.0,
        }
    }
}

impl CorridorConfig {
    /// Wavelength of the configured carrier, meters.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.carrier_frequency_hz
    }

    /// Positions of the two high-power sites bounding the segment.
    pub fn hp_positions_m(&self) -> [f64; 2] {
        [0.0, self.isd_m]
    }

    /// Replace segment length and repeater layout, keeping radio parameters.
    pub fn with_layout(mut self, isd_m: f64, lp_positions_m: Vec<f64>) -> Self {
        self.isd_m = isd_m;
        self.lp_positions_m = lp_positions_m;
        self
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        if !(self.isd_m.is_finite() && self.isd_m > 0.0) {
            return Err(LinkError::InvalidConfig(format!(
                "isd must be > 0, got {}",
                self.isd_m
            )));
        }
        if !(self.carrier_frequency_hz.is_finite() && self.carrier_frequency_hz > 0.0) {
            return Err(LinkError::InvalidConfig(format!(
                "carrier frequency must be > 0, got {}",
                self.carrier_frequency_hz
            )));
        }
        if self.n_subcarriers < 1 {
            return Err(LinkError::InvalidSubcarrierCount);
        }
        if !(self.min_propagation_m.is_finite() && self.min_propagation_m > 0.0) {
            return Err(LinkError::InvalidConfig(format!(
                "min propagation distance must be > 0, got {}",
                self.min_propagation_m
            )));
        }
        let mut prev = 0.0;
        for (i, &p) in self.lp_positions_m.iter().enumerate() {
            if !(p > 0.0 && p < self.isd_m) {
                return Err(LinkError::InvalidConfig(format!(
                    "repeater {i} at {p} m lies outside (0, {}) m",
                    self.isd_m
                )));
            }
            if p <= prev && i > 0 {
                return Err(LinkError::InvalidConfig(format!(
                    "repeater positions must be strictly increasing at index {i}"
                )));
            }
            prev = p;
        }
        for (name, v) in [
            ("hp_eirp_dbm", self.hp_eirp_dbm),
            ("lp_eirp_dbm", self.lp_eirp_dbm),
            ("hp_calib_loss_db", self.hp_calib_loss_db),
            ("lp_calib_loss_db", self.lp_calib_loss_db),
            ("nf_mt_db", self.nf_mt_db),
            ("nf_lp_db", self.nf_lp_db),
            ("noise_floor_dbm", self.noise_floor_dbm),
        ] {
            if !v.is_finite() {
                return Err(LinkError::InvalidConfig(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Calibrated Shannon-bound throughput map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputModel {
    /// Attenuation factor applied to the Shannon bound.
    pub alpha: f64,
    /// Spectral efficiency cap, bps/Hz.
    pub thr_max_bps_hz: f64,
    /// Lower SNR cutoff below which throughput is zero, dB.
    pub snr_min_db: f64,
}

impl Default for ThroughputModel {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            thr_max_bps_hz: 5.84,
            snr_min_db: -10.0,
        }
    }
}

impl ThroughputModel {
    pub fn throughput(&self, snr_db: f64) -> f64 {
        throughput_from_snr(snr_db, self.alpha, self.thr_max_bps_hz, self.snr_min_db)
    }

    /// SNR at which the cap is first reached, dB.
    pub fn peak_snr_db(&self) -> f64 {
        peak_snr_threshold_db(self.alpha, self.thr_max_bps_hz)
    }
}

/// Sampled arrays along the track for one segment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkProfile {
    /// Sample positions in [0, isd], meters.
    pub grid_m: Vec<f64>,
    pub rsrp_hp_left_dbm: Vec<f64>,
    pub rsrp_hp_right_dbm: Vec<f64>,
    /// Per repeater node, per sample, dBm.
    pub rsrp_lp_dbm: Vec<Vec<f64>>,
    pub total_signal_dbm: Vec<f64>,
    pub total_noise_dbm: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub throughput_bps_hz: Vec<f64>,
}

impl LinkProfile {
    pub fn len(&self) -> usize {
        self.grid_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_m.is_empty()
    }

    /// Worst-case SNR over the sampled grid, dB.
    pub fn min_snr_db(&self) -> f64 {
        self.snr_db.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Worst-case total signal over the sampled grid, dBm.
    pub fn min_signal_dbm(&self) -> f64 {
        self.total_signal_dbm
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-subcarrier reference signal transmit power from a total EIRP.
pub fn rstp_from_eirp(eirp_dbm: f64, n_subcarriers: u32) -> Result<f64, LinkError> {
    if n_subcarriers < 1 {
        return Err(LinkError::InvalidSubcarrierCount);
    }
    Ok(eirp_dbm - 10.0 * (n_subcarriers as f64).log10())
}

/// Port-to-port attenuation between a node and a track position, dB.
///
/// Free-space loss of the clamped separation plus the node-class calibration
/// loss. `min_separation_m = 0` disables the clamp. Never returns -inf for a
/// positive clamp.
pub fn path_loss_db(
    d_m: f64,
    node_pos_m: f64,
    wavelength_m: f64,
    calib_loss_db: f64,
    min_separation_m: f64,
) -> f64 {
    assert!(wavelength_m > 0.0, "wavelength must be > 0");
    let sep = (d_m - node_pos_m).abs().max(min_separation_m);
    20.0 * (sep * 4.0 * std::f64::consts::PI / wavelength_m).log10() + calib_loss_db
}

/// Throughput for a given SNR under the calibrated Shannon model, bps/Hz.
///
/// Zero below `snr_min_db`, capped at `thr_max` above the peak threshold.
pub fn throughput_from_snr(snr_db: f64, alpha: f64, thr_max: f64, snr_min_db: f64) -> f64 {
    assert!(alpha > 0.0 && thr_max > 0.0, "alpha and thr_max must be > 0");
    if snr_db < snr_min_db {
        return 0.0;
    }
    let snr_lin = linear_from_db(snr_db);
    (alpha * (1.0 + snr_lin).log2()).min(thr_max)
}

/// SNR at which the throughput cap is first reached, dB.
pub fn peak_snr_threshold_db(alpha: f64, thr_max: f64) -> f64 {
    assert!(alpha > 0.0, "alpha must be > 0");
    db_from_linear(2f64.powf(thr_max / alpha) - 1.0)
}

/// Linear-domain constants derived from a config, shared by the profile and
/// the planner's min-SNR scan.
struct LinearModel {
    hp_rstp_mw: f64,
    lp_rstp_mw: f64,
    noise_mt_mw: f64,
    lp_noise_src_mw: f64,
    /// (4 pi / lambda)^2
    geo: f64,
    cal_hp: f64,
    cal_lp: f64,
}

impl LinearModel {
    fn new(config: &CorridorConfig) -> Result<Self, LinkError> {
        let hp_rstp = rstp_from_eirp(config.hp_eirp_dbm, config.n_subcarriers)?;
        let lp_rstp = rstp_from_eirp(config.lp_eirp_dbm, config.n_subcarriers)?;
        let lambda = config.wavelength_m();
        Ok(Self {
            hp_rstp_mw: linear_from_db(hp_rstp),
            lp_rstp_mw: linear_from_db(lp_rstp),
            noise_mt_mw: linear_from_db(config.noise_floor_dbm + config.nf_mt_db),
            lp_noise_src_mw: linear_from_db(config.noise_floor_dbm + config.nf_lp_db),
            geo: (4.0 * std::f64::consts::PI / lambda).powi(2),
            cal_hp: linear_from_db(config.hp_calib_loss_db),
            cal_lp: linear_from_db(config.lp_calib_loss_db),
        })
    }

    /// Linear path loss between a source and track position.
    #[inline]
    fn loss(&self, d_m: f64, pos_m: f64, cal: f64, clamp_m: f64) -> f64 {
        let sep = (d_m - pos_m).abs().max(clamp_m);
        sep * sep * self.geo * cal
    }
}

fn sample_grid(isd_m: f64, step_m: f64) -> Result<Vec<f64>, LinkError> {
    if !(step_m.is_finite() && step_m > 0.0) {
        return Err(LinkError::InvalidGridStep(step_m));
    }
    if step_m > isd_m {
        return Err(LinkError::EmptyGrid {
            step: step_m,
            isd: isd_m,
        });
    }
    let n = (isd_m / step_m).floor() as usize;
    let mut grid = Vec::with_capacity(n + 2);
    for i in 0..=n {
        grid.push(i as f64 * step_m);
    }
    if *grid.last().unwrap() < isd_m - 1e-9 {
        grid.push(isd_m);
    }
    Ok(grid)
}

/// Full per-position link profile with the default throughput model.
pub fn snr_profile(config: &CorridorConfig, grid_step_m: f64) -> Result<LinkProfile, LinkError> {
    snr_profile_with_model(config, grid_step_m, &ThroughputModel::default())
}

/// Full per-position link profile: per-source RSRP, linear-sum signal and
/// noise, SNR and mapped throughput.
pub fn snr_profile_with_model(
    config: &CorridorConfig,
    grid_step_m: f64,
    model: &ThroughputModel,
) -> Result<LinkProfile, LinkError> {
    config.validate()?;
    let grid = sample_grid(config.isd_m, grid_step_m)?;
    let lin = LinearModel::new(config)?;
    let clamp = config.min_propagation_m;
    let n_lp = config.lp_positions_m.len();

    let n_pts = grid.len();
    let mut rsrp_hp_left = Vec::with_capacity(n_pts);
    let mut rsrp_hp_right = Vec::with_capacity(n_pts);
    let mut rsrp_lp = vec![Vec::with_capacity(n_pts); n_lp];
    let mut total_signal = Vec::with_capacity(n_pts);
    let mut total_noise = Vec::with_capacity(n_pts);
    let mut snr = Vec::with_capacity(n_pts);
    let mut throughput = Vec::with_capacity(n_pts);

    for &d in &grid {
        let p_left = lin.hp_rstp_mw / lin.loss(d, 0.0, lin.cal_hp, clamp);
        let p_right = lin.hp_rstp_mw / lin.loss(d, config.isd_m, lin.cal_hp, clamp);
        let mut sig = p_left + p_right;
        let mut noi = lin.noise_mt_mw;
        for (k, &pos) in config.lp_positions_m.iter().enumerate() {
            let loss = lin.loss(d, pos, lin.cal_lp, clamp);
            let p = lin.lp_rstp_mw / loss;
            sig += p;
            noi += lin.lp_noise_src_mw / loss;
            rsrp_lp[k].push(db_from_linear(p));
        }
        rsrp_hp_left.push(db_from_linear(p_left));
        rsrp_hp_right.push(db_from_linear(p_right));
        total_signal.push(db_from_linear(sig));
        total_noise.push(db_from_linear(noi));
        let s = db_from_linear(sig / noi);
        snr.push(s);
        throughput.push(model.throughput(s));
    }

    Ok(LinkProfile {
        grid_m: grid,
        rsrp_hp_left_dbm: rsrp_hp_left,
        rsrp_hp_right_dbm: rsrp_hp_right,
        rsrp_lp_dbm: rsrp_lp,
        total_signal_dbm: total_signal,
        total_noise_dbm: total_noise,
        snr_db: snr,
        throughput_bps_hz: throughput,
    })
}

/// Worst-case SNR over the sampled track without building the full profile.
///
/// Used by the planner's ISD scan, where only the minimum matters.
pub fn min_snr_over_track(config: &CorridorConfig, grid_step_m: f64) -> Result<f64, LinkError> {
    config.validate()?;
    let grid = sample_grid(config.isd_m, grid_step_m)?;
    let lin = LinearModel::new(config)?;
    let clamp = config.min_propagation_m;
    let mut worst = f64::INFINITY;
    for &d in &grid {
        let mut sig = lin.hp_rstp_mw / lin.loss(d, 0.0, lin.cal_hp, clamp)
            + lin.hp_rstp_mw / lin.loss(d, config.isd_m, lin.cal_hp, clamp);
        let mut noi = lin.noise_mt_mw;
        for &pos in &config.lp_positions_m {
            let loss = lin.loss(d, pos, lin.cal_lp, clamp);
            sig += lin.lp_rstp_mw / loss;
            noi += lin.lp_noise_src_mw / loss;
        }
        let r = sig / noi;
        if r < worst {
            worst = r;
        }
    }
    Ok(db_from_linear(worst))
}
