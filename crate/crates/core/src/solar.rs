//! Off-grid PV energy balance and sizing for sleep-capable repeater nodes.

use chrono::{Datelike, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{
    average_node_power, EnergyError, IdleMode, PowerModelParams, TrafficSchedule,
};
use crate::series::{IrradianceSeries, SeriesKind};

#[derive(Debug, Error)]
pub enum SolarError {
    #[error("irradiance series does not cover the simulation horizon")]
    InsufficientData,
    #[error("no panel/battery combination meets the requirement")]
    NoFeasibleSystem,
    #[error("night hours must be a whole number of hours for the profile, got {0}")]
    FractionalNightHours(f64),
    #[error("invalid pv system: {0}")]
    InvalidSystem(String),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Off-grid PV supply of one repeater node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvSystem {
    /// Installed peak PV power, watts-peak.
    pub peak_power_wp: f64,
    pub battery_capacity_wh: f64,
    /// Discharge cutoff as a fraction of capacity; usable energy is the rest.
    pub discharge_cutoff: f64,
    /// System losses applied to production (cabling, conversion, soiling).
    pub system_loss: f64,
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
}

impl Default for PvSystem {
    fn default() -> Self {
        Self {
            peak_power_wp: 540.0,
            battery_capacity_wh: 720.0,
            discharge_cutoff: 0.40,
            system_loss: 0.14,
            tilt_deg: 90.0,
            azimuth_deg: 0.0,
        }
    }
}

impl PvSystem {
    pub fn validate(&self) -> Result<(), SolarError> {
        if !(self.peak_power_wp.is_finite() && self.peak_power_wp > 0.0)
            || !(self.battery_capacity_wh.is_finite() && self.battery_capacity_wh > 0.0)
        {
            return Err(SolarError::InvalidSystem(
                "peak power and battery capacity must be > 0".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.discharge_cutoff) {
            return Err(SolarError::InvalidSystem(format!(
                "discharge cutoff must be within [0, 1), got {}",
                self.discharge_cutoff
            )));
        }
        if !(0.0..1.0).contains(&self.system_loss) {
            return Err(SolarError::InvalidSystem(format!(
                "system loss must be within [0, 1), got {}",
                self.system_loss
            )));
        }
        Ok(())
    }
}

/// 24 hourly consumption values, watt-hours. Night hours sit at the start of
/// the day.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionProfile {
    hourly_wh: [f64; 24],
}

impl ConsumptionProfile {
    pub fn hourly_wh(&self) -> &[f64; 24] {
        &self.hourly_wh
    }

    pub fn total_wh_per_day(&self) -> f64 {
        self.hourly_wh.iter().sum()
    }
}

/// Hourly consumption of a sleep-capable repeater: sleep power through the
/// night hours, duty-cycled average through the active hours.
pub fn build_consumption_profile(
    schedule: &TrafficSchedule,
    lp_params: &PowerModelParams,
) -> Result<ConsumptionProfile, SolarError> {
    schedule.validate()?;
    lp_params.validate()?;
    let n_night = schedule.night_hours.round();
    if (schedule.night_hours - n_night).abs() > 1e-9 {
        return Err(SolarError::FractionalNightHours(schedule.night_hours));
    }
    let n_night = n_night as usize;

    // average power during an active hour: same duty arithmetic with the
    // night factor removed
    let day_only = TrafficSchedule {
        night_hours: 0.0,
        ..*schedule
    };
    let active_wh = average_node_power(
        lp_params,
        &day_only,
        schedule.lp_spacing_m,
        IdleMode::SleepWhenIdle,
    );

    let mut hourly_wh = [0.0; 24];
    for (h, slot) in hourly_wh.iter_mut().enumerate() {
        *slot = if h < n_night {
            lp_params.p_sleep_w
        } else {
            active_wh
        };
    }
    Ok(ConsumptionProfile { hourly_wh })
}

/// Year-scale outcome of a battery-balance simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutonomyStats {
    /// Share of days on which the battery reached full charge, percent.
    pub days_battery_full_pct: f64,
    /// Share of days on which the battery hit the discharge cutoff or load
    /// went unserved, percent.
    pub days_battery_empty_pct: f64,
    /// Hours per simulated horizon with unserved consumption.
    pub downtime_hours: f64,
    /// Lowest state of charge seen, watt-hours.
    pub min_soc_wh: f64,
}

/// Instantaneous PV production for a plane-of-array irradiance.
pub fn pv_production_w(irradiance_w_m2: f64, system: &PvSystem) -> f64 {
    assert!(irradiance_w_m2 >= 0.0, "irradiance must be >= 0");
    system.peak_power_wp * (irradiance_w_m2 / 1000.0) * (1.0 - system.system_loss)
}

fn hourly_production_wh(value: f64, kind: SeriesKind, system: &PvSystem) -> f64 {
    match kind {
        SeriesKind::PlaneOfArrayIrradiance => pv_production_w(value, system),
        // production series already include system losses
        SeriesKind::PvPower => value,
    }
}

/// One hour of a battery-balance run, for auditing the energy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryStep {
    pub soc_before_wh: f64,
    pub soc_after_wh: f64,
    pub production_wh: f64,
    /// Consumption actually served this hour (zero on unserved hours).
    pub served_wh: f64,
    /// Charge surplus discarded at the capacity clamp.
    pub discarded_wh: f64,
}

/// Hour-by-hour battery balance over the whole series.
///
/// The battery starts full. Per hour the state of charge moves by production
/// minus consumption, clamped to [cutoff*C, C]; an hour whose consumption
/// would push the state below the cutoff is unserved and counts as downtime.
pub fn simulate_battery(
    series: &IrradianceSeries,
    profile: &ConsumptionProfile,
    system: &PvSystem,
) -> Result<AutonomyStats, SolarError> {
    simulate_battery_inner(series, profile, system, |_| {})
}

/// [`simulate_battery`] plus the per-hour steps.
pub fn simulate_battery_trace(
    series: &IrradianceSeries,
    profile: &ConsumptionProfile,
    system: &PvSystem,
) -> Result<(AutonomyStats, Vec<BatteryStep>), SolarError> {
    let mut steps = Vec::with_capacity(series.len());
    let stats = simulate_battery_inner(series, profile, system, |s| steps.push(s))?;
    Ok((stats, steps))
}

fn simulate_battery_inner(
    series: &IrradianceSeries,
    profile: &ConsumptionProfile,
    system: &PvSystem,
    mut on_step: impl FnMut(BatteryStep),
) -> Result<AutonomyStats, SolarError> {
    system.validate()?;
    if series.is_empty() {
        return Err(SolarError::InsufficientData);
    }
    let capacity = system.battery_capacity_wh;
    let floor = system.discharge_cutoff * capacity;
    let mut soc = capacity;
    let mut min_soc = soc;
    let mut downtime = 0u64;

    let mut current_day = None;
    let mut n_days = 0u64;
    let mut full_days = 0u64;
    let mut empty_days = 0u64;
    let mut day_full = false;
    let mut day_empty = false;

    for r in &series.records {
        let day = (r.timestamp.date_naive().year(), r.timestamp.ordinal());
        if current_day != Some(day) {
            if current_day.is_some() {
                full_days += day_full as u64;
                empty_days += day_empty as u64;
            }
            current_day = Some(day);
            n_days += 1;
            day_full = false;
            day_empty = false;
        }
        let hour = r.timestamp.time().hour() as usize;
        let production = hourly_production_wh(r.value, series.kind, system);
        let consumption = profile.hourly_wh[hour % 24];

        let soc_before = soc;
        let tentative = soc + production - consumption;
        let served;
        if tentative < floor {
            // the hour's load is unserved; production still charges
            downtime += 1;
            day_empty = true;
            served = 0.0;
            soc = (soc + production).min(capacity);
        } else {
            served = consumption;
            soc = tentative.min(capacity);
        }
        on_step(BatteryStep {
            soc_before_wh: soc_before,
            soc_after_wh: soc,
            production_wh: production,
            served_wh: served,
            discarded_wh: (soc_before + production - served) - soc,
        });
        if soc >= capacity - 1e-9 {
            day_full = true;
        }
        if soc <= floor + 1e-9 {
            day_empty = true;
        }
        min_soc = min_soc.min(soc);
    }
    full_days += day_full as u64;
    empty_days += day_empty as u64;

    Ok(AutonomyStats {
        days_battery_full_pct: 100.0 * full_days as f64 / n_days as f64,
        days_battery_empty_pct: 100.0 * empty_days as f64 / n_days as f64,
        downtime_hours: downtime as f64,
        min_soc_wh: min_soc,
    })
}

/// Smallest panel/battery pair meeting zero downtime over the full series.
///
/// Options must be sorted ascending; panels are tried first, then batteries.
pub fn size_system(
    series: &IrradianceSeries,
    profile: &ConsumptionProfile,
    panel_options_wp: &[f64],
    battery_options_wh: &[f64],
    base: &PvSystem,
) -> Result<PvSystem, SolarError> {
    if panel_options_wp.is_empty() || battery_options_wh.is_empty() {
        return Err(SolarError::NoFeasibleSystem);
    }
    for &panel in panel_options_wp {
        for &battery in battery_options_wh {
            let candidate = PvSystem {
                peak_power_wp: panel,
                battery_capacity_wh: battery,
                ..*base
            };
            let stats = simulate_battery(series, profile, &candidate)?;
            if stats.downtime_hours == 0.0 {
                return Ok(candidate);
            }
        }
    }
    Err(SolarError::NoFeasibleSystem)
}
