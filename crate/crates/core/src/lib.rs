//! Planning toolkit for energy-efficient railway cellular corridors.
//!
//! A corridor is a long linear cell along a railway track: high-power radio
//! sites at the segment ends, optionally supported by low-power
//! amplify-and-forward repeater nodes in between. This crate provides
//!
//! - [`link`]: received power, SNR and throughput profiles along the track,
//! - [`planner`]: repeater placement and maximum inter-site-distance search,
//! - [`energy`]: load-dependent node power models and per-km corridor energy
//!   under different operating policies,
//! - [`solar`]: off-grid PV battery-balance simulation and sizing for
//!   sleep-capable repeater nodes,
//! - [`pvgis`]: a cached client for the public PVGIS hourly-series API,
//! - [`series`]: hourly irradiance/production series and their CSV format,
//! - [`synthetic`]: deterministic synthetic irradiance years for offline use.

pub mod energy;
pub mod link;
pub mod planner;
pub mod pvgis;
pub mod series;
pub mod solar;
pub mod synthetic;

pub use energy::{
    average_node_power, corridor_energy_per_km, full_load_fraction, lp_node_count, node_power,
    simulate_day, EnergyReport, IdleMode, OperatingPolicy, PowerModelParams, TrafficSchedule,
};
pub use link::{
    path_loss_db, peak_snr_threshold_db, rstp_from_eirp, snr_profile, snr_profile_with_model,
    throughput_from_snr, CorridorConfig, LinkProfile, ThroughputModel,
};
pub use planner::{max_isd, place_repeaters, sweep_max_isd, PlacementStrategy, SearchParams, SweepResult};
pub use series::{HourlyRecord, IrradianceSeries, SeriesKind};
pub use solar::{
    build_consumption_profile, pv_production_w, simulate_battery, simulate_battery_trace,
    size_system, AutonomyStats, ConsumptionProfile, PvSystem,
};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Convert a linear power ratio (or mW value) to dB (or dBm).
#[inline]
pub fn db_from_linear(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Convert dB (or dBm) to a linear power ratio (or mW value).
#[inline]
pub fn linear_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_roundtrip_is_tight() {
        for &x in &[1e-20, 1e-12, 1.0, 761.2, 1e6] {
            let back = linear_from_db(db_from_linear(x));
            assert!(
                ((back - x) / x).abs() < 1e-12,
                "roundtrip of {x} gave {back}"
            );
        }
    }
}
