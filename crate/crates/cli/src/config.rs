//! Run configuration: one TOML file carrying every model parameter, with the
//! published defaults pre-filled. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use corridor_core::energy::{PowerModelParams, TrafficSchedule};
use corridor_core::link::{CorridorConfig, ThroughputModel};
use corridor_core::planner::{PlacementStrategy, SearchParams};
use corridor_core::pvgis::{FetchConfig, PvgisRequest};
use corridor_core::solar::PvSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corridor: CorridorSection,
    pub throughput: ThroughputSection,
    pub schedule: ScheduleSection,
    pub power: PowerSection,
    pub pv: PvSection,
    pub placement: PlacementSection,
    pub search: SearchSection,
    pub pvgis: PvgisSection,
    /// Named locations for solar commands, city-center coordinates.
    pub locations: BTreeMap<String, Location>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut locations = BTreeMap::new();
        locations.insert("madrid".into(), Location { lat: 40.4168, lon: -3.7038 });
        locations.insert("lyon".into(), Location { lat: 45.7640, lon: 4.8357 });
        locations.insert("vienna".into(), Location { lat: 48.2082, lon: 16.3738 });
        locations.insert("berlin".into(), Location { lat: 52.5200, lon: 13.4050 });
        Self {
            corridor: CorridorSection::default(),
            throughput: ThroughputSection::default(),
            schedule: ScheduleSection::default(),
            power: PowerSection::default(),
            pv: PvSection::default(),
            placement: PlacementSection::default(),
            search: SearchSection::default(),
            pvgis: PvgisSection::default(),
            locations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorridorSection {
    pub carrier_frequency_hz: f64,
    pub n_subcarriers: u32,
    pub hp_eirp_dbm: f64,
    pub lp_eirp_dbm: f64,
    pub hp_calib_loss_db: f64,
    pub lp_calib_loss_db: f64,
    pub nf_mt_db: f64,
    pub nf_lp_db: f64,
    pub noise_floor_dbm: f64,
    pub min_propagation_m: f64,
}

impl Default for CorridorSection {
    fn default() -> Self {
        let c = CorridorConfig::default();
        Self {
            carrier_frequency_hz: c.carrier_frequency_hz,
            n_subcarriers: c.n_subcarriers,
            hp_eirp_dbm: c.hp_eirp_dbm,
            lp_eirp_dbm: c.lp_eirp_dbm,
            hp_calib_loss_db: c.hp_calib_loss_db,
            lp_calib_loss_db: c.lp_calib_loss_db,
            nf_mt_db: c.nf_mt_db,
            nf_lp_db: c.nf_lp_db,
            noise_floor_dbm: c.noise_floor_dbm,
            min_propagation_m: c.min_propagation_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThroughputSection {
    pub alpha: f64,
    pub thr_max_bps_hz: f64,
    pub snr_min_db: f64,
}

impl Default for ThroughputSection {
    fn default() -> Self {
        let m = ThroughputModel::default();
        Self {
            alpha: m.alpha,
            thr_max_bps_hz: m.thr_max_bps_hz,
            snr_min_db: m.snr_min_db,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub trains_per_hour: f64,
    pub night_hours: f64,
    pub train_length_m: f64,
    pub velocity_kmh: f64,
    pub lp_spacing_m: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            trains_per_hour: 8.0,
            night_hours: 5.0,
            train_length_m: 400.0,
            velocity_kmh: 200.0,
            lp_spacing_m: 200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    pub hp: PowerModelSection,
    pub lp: LpPowerModelSection,
}

/// Per-RRH parameters; a high-power site carries two RRHs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModelSection {
    pub p_max_w: f64,
    pub p0_w: f64,
    pub delta_p: f64,
    pub p_sleep_w: f64,
}

impl Default for PowerModelSection {
    fn default() -> Self {
        let p = PowerModelParams::hp_rrh();
        Self {
            p_max_w: p.p_max_w,
            p0_w: p.p0_w,
            delta_p: p.delta_p,
            p_sleep_w: p.p_sleep_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpPowerModelSection {
    pub p_max_w: f64,
    pub p0_w: f64,
    pub delta_p: f64,
    pub p_sleep_w: f64,
}

impl Default for LpPowerModelSection {
    fn default() -> Self {
        let p = PowerModelParams::lp_repeater();
        Self {
            p_max_w: p.p_max_w,
            p0_w: p.p0_w,
            delta_p: p.delta_p,
            p_sleep_w: p.p_sleep_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvSection {
    pub peak_power_wp: f64,
    pub battery_capacity_wh: f64,
    pub discharge_cutoff: f64,
    pub system_loss: f64,
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
}

impl Default for PvSection {
    fn default() -> Self {
        let p = PvSystem::default();
        Self {
            peak_power_wp: p.peak_power_wp,
            battery_capacity_wh: p.battery_capacity_wh,
            discharge_cutoff: p.discharge_cutoff,
            system_loss: p.system_loss,
            tilt_deg: p.tilt_deg,
            azimuth_deg: p.azimuth_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementKind {
    Uniform,
    FixedSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementSection {
    pub kind: PlacementKind,
    pub spacing_m: f64,
}

impl Default for PlacementSection {
    fn default() -> Self {
        Self {
            kind: PlacementKind::Uniform,
            spacing_m: 200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub isd_step_m: f64,
    pub grid_step_m: f64,
    pub isd_cap_m: f64,
}

impl Default for SearchSection {
    fn default() -> Self {
        let p = SearchParams::default();
        Self {
            isd_step_m: p.isd_step_m,
            grid_step_m: p.grid_step_m,
            isd_cap_m: p.isd_cap_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvgisSection {
    pub endpoint: String,
    pub retries: u32,
    pub initial_backoff_s: f64,
    pub timeout_s: f64,
    pub start_year: i32,
    pub end_year: i32,
}

impl Default for PvgisSection {
    fn default() -> Self {
        let f = FetchConfig::default();
        Self {
            endpoint: f.endpoint,
            retries: f.retries,
            initial_backoff_s: f.initial_backoff_s,
            timeout_s: f.timeout_s,
            start_year: 2019,
            end_year: 2019,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    pub lat: f64,
    pub lon: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn corridor_config(&self, isd_m: f64, lp_positions_m: Vec<f64>) -> CorridorConfig {
        let c = &self.corridor;
        CorridorConfig {
            isd_m,
            lp_positions_m,
            carrier_frequency_hz: c.carrier_frequency_hz,
            n_subcarriers: c.n_subcarriers,
            hp_eirp_dbm: c.hp_eirp_dbm,
            lp_eirp_dbm: c.lp_eirp_dbm,
            hp_calib_loss_db: c.hp_calib_loss_db,
            lp_calib_loss_db: c.lp_calib_loss_db,
            nf_mt_db: c.nf_mt_db,
            nf_lp_db: c.nf_lp_db,
            noise_floor_dbm: c.noise_floor_dbm,
            min_propagation_m: c.min_propagation_m,
        }
    }

    pub fn throughput_model(&self) -> ThroughputModel {
        ThroughputModel {
            alpha: self.throughput.alpha,
            thr_max_bps_hz: self.throughput.thr_max_bps_hz,
            snr_min_db: self.throughput.snr_min_db,
        }
    }

    pub fn traffic_schedule(&self) -> TrafficSchedule {
        let s = &self.schedule;
        TrafficSchedule {
            trains_per_hour: s.trains_per_hour,
            night_hours: s.night_hours,
            train_length_m: s.train_length_m,
            velocity_m_s: s.velocity_kmh / 3.6,
            lp_spacing_m: s.lp_spacing_m,
        }
    }

    pub fn hp_params(&self) -> PowerModelParams {
        let p = &self.power.hp;
        PowerModelParams {
            p_max_w: p.p_max_w,
            p0_w: p.p0_w,
            delta_p: p.delta_p,
            p_sleep_w: p.p_sleep_w,
        }
    }

    pub fn lp_params(&self) -> PowerModelParams {
        let p = &self.power.lp;
        PowerModelParams {
            p_max_w: p.p_max_w,
            p0_w: p.p0_w,
            delta_p: p.delta_p,
            p_sleep_w: p.p_sleep_w,
        }
    }

    pub fn pv_system(&self) -> PvSystem {
        let p = &self.pv;
        PvSystem {
            peak_power_wp: p.peak_power_wp,
            battery_capacity_wh: p.battery_capacity_wh,
            discharge_cutoff: p.discharge_cutoff,
            system_loss: p.system_loss,
            tilt_deg: p.tilt_deg,
            azimuth_deg: p.azimuth_deg,
        }
    }

    pub fn placement_strategy(&self) -> PlacementStrategy {
        match self.placement.kind {
            PlacementKind::Uniform => PlacementStrategy::Uniform,
            PlacementKind::FixedSpacing => PlacementStrategy::FixedSpacing {
                spacing_m: self.placement.spacing_m,
            },
        }
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams {
            isd_step_m: self.search.isd_step_m,
            grid_step_m: self.search.grid_step_m,
            isd_cap_m: self.search.isd_cap_m,
        }
    }

    pub fn fetch_config(&self) -> FetchConfig {
        FetchConfig {
            endpoint: self.pvgis.endpoint.clone(),
            retries: self.pvgis.retries,
            initial_backoff_s: self.pvgis.initial_backoff_s,
            timeout_s: self.pvgis.timeout_s,
            cache_dir: None, // resolved via PVGIS_CACHE_DIR
        }
    }

    pub fn pvgis_request(&self, lat: f64, lon: f64) -> PvgisRequest {
        PvgisRequest {
            lat,
            lon,
            tilt_deg: self.pv.tilt_deg,
            azimuth_deg: self.pv.azimuth_deg,
            peak_power_kwp: self.pv.peak_power_wp / 1000.0,
            loss_pct: self.pv.system_loss * 100.0,
            start_year: self.pvgis.start_year,
            end_year: self.pvgis.end_year,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let config = RunConfig::default();
        let text = config.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("[corridor]\nfrequency_ghz = 3.5\n");
        assert!(err.is_err());
        let err = toml::from_str::<RunConfig>("[nonsense]\nx = 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn velocity_converts_to_meters_per_second() {
        let config = RunConfig::default();
        let s = config.traffic_schedule();
        assert!((s.velocity_m_s - 200.0 / 3.6).abs() < 1e-12);
    }
}
