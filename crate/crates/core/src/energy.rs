//! Load-dependent node power model, duty-cycle arithmetic and per-km corridor
//! energy under different operating policies, plus an event-driven day
//! simulator used as a cross-check for the closed forms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("traffic load must be within [0, 1], got {0}")]
    LoadOutOfRange(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid power model: {0}")]
    InvalidPowerModel(String),
}

/// Four-parameter load-dependent power model of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModelParams {
    /// Maximum RF output power, watts.
    pub p_max_w: f64,
    /// Zero-load baseline input power, watts.
    pub p0_w: f64,
    /// Slope of the load-dependent input power.
    pub delta_p: f64,
    /// Input power in sleep mode, watts.
    pub p_sleep_w: f64,
}

impl PowerModelParams {
    /// High-power remote radio head, per RRH (two per site).
    pub fn hp_rrh() -> Self {
        Self {
            p_max_w: 40.0,
            p0_w: 168.0,
            delta_p: 2.8,
            p_sleep_w: 112.0,
        }
    }

    /// Low-power repeater node.
    pub fn lp_repeater() -> Self {
        Self {
            p_max_w: 1.0,
            p0_w: 24.26,
            delta_p: 4.0,
            p_sleep_w: 4.72,
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.p_max_w.is_finite() && self.p_max_w > 0.0) {
            return Err(EnergyError::InvalidPowerModel(format!(
                "p_max must be > 0, got {}",
                self.p_max_w
            )));
        }
        if !(self.p_sleep_w >= 0.0 && self.p0_w >= self.p_sleep_w) || self.p0_w.is_nan() {
            return Err(EnergyError::InvalidPowerModel(format!(
                "need p0 >= p_sleep >= 0, got p0 = {}, p_sleep = {}",
                self.p0_w, self.p_sleep_w
            )));
        }
        if self.delta_p < 0.0 || self.delta_p.is_nan() {
            return Err(EnergyError::InvalidPowerModel(format!(
                "delta_p must be >= 0, got {}",
                self.delta_p
            )));
        }
        Ok(())
    }
}

/// Timetable and geometry parameters driving node duty cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficSchedule {
    pub trains_per_hour: f64,
    /// Hours per night without passenger traffic.
    pub night_hours: f64,
    pub train_length_m: f64,
    pub velocity_m_s: f64,
    /// Coverage section length of one repeater node, meters.
    pub lp_spacing_m: f64,
}

impl Default for TrafficSchedule {
    fn default() -> Self {
        Self {
            trains_per_hour: 8.0,
            night_hours: 5.0,
            train_length_m: 400.0,
            velocity_m_s: 200.0 / 3.6,
            lp_spacing_m: 200.0,
        }
    }
}

impl TrafficSchedule {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.velocity_m_s.is_finite() && self.velocity_m_s > 0.0) {
            return Err(EnergyError::InvalidSchedule(format!(
                "velocity must be > 0, got {}",
                self.velocity_m_s
            )));
        }
        if !(0.0..=24.0).contains(&self.night_hours) {
            return Err(EnergyError::InvalidSchedule(format!(
                "night hours must be within [0, 24], got {}",
                self.night_hours
            )));
        }
        if self.train_length_m < 0.0 || self.trains_per_hour < 0.0 || self.lp_spacing_m < 0.0 {
            return Err(EnergyError::InvalidSchedule(
                "negative train length, rate or spacing".into(),
            ));
        }
        Ok(())
    }
}

/// Corridor operating policy. High-power RRHs sleep when idle in all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatingPolicy {
    /// Repeaters stay powered (idle baseline) between trains.
    LpAlwaysOn,
    /// Repeaters sleep between trains.
    LpSleep,
    /// Repeaters sleep between trains and draw no mains power at all.
    LpSolar,
}

/// What a node does in the powered-but-unloaded state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdleMode {
    SleepWhenIdle,
    IdleOn,
}

/// Input power at the given traffic load. Zero load means sleep mode; the
/// powered-but-unloaded state is [`idle_power`].
pub fn node_power(params: &PowerModelParams, load: f64) -> Result<f64, EnergyError> {
    if !(0.0..=1.0).contains(&load) {
        return Err(EnergyError::LoadOutOfRange(load));
    }
    if load == 0.0 {
        Ok(params.p_sleep_w)
    } else {
        Ok(params.p0_w + params.delta_p * params.p_max_w * load)
    }
}

/// Input power of a powered node with no traffic.
pub fn idle_power(params: &PowerModelParams) -> f64 {
    params.p0_w
}

/// Seconds a node spends at full load per passing train.
pub fn passage_window_s(schedule: &TrafficSchedule, coverage_length_m: f64) -> f64 {
    (coverage_length_m + schedule.train_length_m) / schedule.velocity_m_s
}

/// Fraction of the 24-hour day a node spends at full load.
pub fn full_load_fraction(schedule: &TrafficSchedule, coverage_length_m: f64) -> f64 {
    let per_passage_s = passage_window_s(schedule, coverage_length_m);
    per_passage_s * schedule.trains_per_hour / 3600.0 * (24.0 - schedule.night_hours) / 24.0
}

/// Time-averaged input power of a node serving its coverage section.
pub fn average_node_power(
    params: &PowerModelParams,
    schedule: &TrafficSchedule,
    coverage_length_m: f64,
    idle: IdleMode,
) -> f64 {
    let f = full_load_fraction(schedule, coverage_length_m);
    let p_full = params.p0_w + params.delta_p * params.p_max_w;
    let p_idle = match idle {
        IdleMode::SleepWhenIdle => params.p_sleep_w,
        IdleMode::IdleOn => params.p0_w,
    };
    f * p_full + (1.0 - f) * p_idle
}

/// Total repeater count for a segment: service nodes plus the donor nodes at
/// the high-power masts (one donor for a single service node, two for more).
pub fn lp_node_count(n_service: usize) -> usize {
    match n_service {
        0 => 0,
        1 => 2,
        n => n + 2,
    }
}

/// Per-km energy figures of one corridor configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Average consumed power per km of corridor, W/km.
    pub total_w_per_km: f64,
    /// Mains-powered share of the above, W/km.
    pub mains_w_per_km: f64,
    /// Mains savings relative to the conventional baseline deployment.
    pub savings_vs_baseline: f64,
}

/// Conventional baseline: high-power sites every 500 m, no repeaters, RRH
/// sleep mode enabled. Mains power per km.
pub fn baseline_mains_w_per_km(schedule: &TrafficSchedule, hp_params: &PowerModelParams) -> f64 {
    let site = 2.0 * average_node_power(hp_params, schedule, 500.0, IdleMode::SleepWhenIdle);
    site * (1000.0 / 500.0)
}

/// Average per-km corridor energy for a deployment with `n_service` repeaters
/// between sites `isd_m` apart, under the given operating policy.
pub fn corridor_energy_per_km(
    isd_m: f64,
    n_service: usize,
    schedule: &TrafficSchedule,
    hp_params: &PowerModelParams,
    lp_params: &PowerModelParams,
    policy: OperatingPolicy,
) -> Result<EnergyReport, EnergyError> {
    if !(isd_m.is_finite() && isd_m > 0.0) {
        return Err(EnergyError::InvalidSchedule(format!(
            "isd must be > 0, got {isd_m}"
        )));
    }
    schedule.validate()?;
    hp_params.validate()?;
    lp_params.validate()?;

    let sites_per_km = 1000.0 / isd_m;
    let hp_site_w = 2.0 * average_node_power(hp_params, schedule, isd_m, IdleMode::SleepWhenIdle);
    let hp_w_per_km = hp_site_w * sites_per_km;

    let lp_idle = match policy {
        OperatingPolicy::LpAlwaysOn => IdleMode::IdleOn,
        OperatingPolicy::LpSleep | OperatingPolicy::LpSolar => IdleMode::SleepWhenIdle,
    };
    let lp_each_w = average_node_power(lp_params, schedule, schedule.lp_spacing_m, lp_idle);
    let lp_w_per_km = lp_node_count(n_service) as f64 * lp_each_w * (1000.0 / isd_m);
    let total = hp_w_per_km + lp_w_per_km;
    let mains = match policy {
        OperatingPolicy::LpSolar => hp_w_per_km,
        _ => total,
    };
    let baseline = baseline_mains_w_per_km(schedule, hp_params);
    Ok(EnergyReport {
        total_w_per_km: total,
        mains_w_per_km: mains,
        savings_vs_baseline: 1.0 - mains / baseline,
    })
}

/// Result of an event-driven 24 h energy integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaySimulation {
    pub energy_wh: f64,
    pub passages: usize,
    /// Wake windows that overlapped and were merged (not double-billed).
    pub merged_windows: usize,
}

/// Event-driven 24 h energy integral for a sleep-capable node woken per train
/// passage.
///
/// Trains are evenly spaced over the active hours; each passage bills the
/// full-load window plus `transition_time_s` at full power on the wake and
/// sleep edges. Overlapping windows are merged.
pub fn simulate_day(
    schedule: &TrafficSchedule,
    node_coverage_m: f64,
    params: &PowerModelParams,
    transition_time_s: f64,
) -> Result<DaySimulation, EnergyError> {
    schedule.validate()?;
    let active_h = 24.0 - schedule.night_hours;
    let passages = (schedule.trains_per_hour * active_h).floor() as usize;
    let night_s = schedule.night_hours * 3600.0;
    let window_s = passage_window_s(schedule, node_coverage_m);

    let mut arrivals = Vec::with_capacity(passages);
    if passages > 0 {
        let interval = active_h * 3600.0 / passages as f64;
        for k in 0..passages {
            let center = night_s + (k as f64 + 0.5) * interval;
            arrivals.push(center - window_s / 2.0);
        }
    }
    simulate_day_with_arrivals(&arrivals, window_s, params, transition_time_s)
}

/// Same integration for an explicit list of coverage-entry times (seconds
/// from midnight).
pub fn simulate_day_with_arrivals(
    arrivals_s: &[f64],
    window_s: f64,
    params: &PowerModelParams,
    transition_time_s: f64,
) -> Result<DaySimulation, EnergyError> {
    params.validate()?;
    if window_s < 0.0 || window_s.is_nan() || transition_time_s < 0.0 || transition_time_s.is_nan() {
        return Err(EnergyError::InvalidSchedule(
            "window and transition time must be >= 0".into(),
        ));
    }
    const DAY_S: f64 = 86_400.0;
    let p_full = params.p0_w + params.delta_p * params.p_max_w;

    let mut windows: Vec<(f64, f64)> = arrivals_s
        .iter()
        .map(|&t| {
            (
                (t - transition_time_s).max(0.0),
                (t + window_s + transition_time_s).min(DAY_S),
            )
        })
        .collect();
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    let mut merges = 0;
    for w in windows {
        match merged.last_mut() {
            Some(last) if w.0 <= last.1 => {
                last.1 = last.1.max(w.1);
                merges += 1;
            }
            _ => merged.push(w),
        }
    }

    let awake_s: f64 = merged.iter().map(|(a, b)| b - a).sum();
    let energy_wh = (awake_s * p_full + (DAY_S - awake_s) * params.p_sleep_w) / 3600.0;
    Ok(DaySimulation {
        energy_wh,
        passages: arrivals_s.len(),
        merged_windows: merges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn node_power_anchors() {
        let hp = PowerModelParams::hp_rrh();
        assert_eq!(node_power(&hp, 1.0).unwrap(), 280.0); // 560 W per two-RRH site
        assert_eq!(node_power(&hp, 0.0).unwrap(), 112.0); // 224 W per site asleep
        assert_eq!(idle_power(&hp), 168.0); // 336 W per site idle
        let lp = PowerModelParams::lp_repeater();
        assert!(close(node_power(&lp, 1.0).unwrap(), 28.26, 1e-12));
    }

    #[test]
    fn node_power_rejects_out_of_range_load() {
        let lp = PowerModelParams::lp_repeater();
        assert!(matches!(
            node_power(&lp, -0.1),
            Err(EnergyError::LoadOutOfRange(_))
        ));
        assert!(matches!(
            node_power(&lp, 1.1),
            Err(EnergyError::LoadOutOfRange(_))
        ));
    }

    #[test]
    fn node_power_is_affine_with_sleep_discontinuity() {
        let lp = PowerModelParams::lp_repeater();
        let p25 = node_power(&lp, 0.25).unwrap();
        let p75 = node_power(&lp, 0.75).unwrap();
        let p50 = node_power(&lp, 0.5).unwrap();
        assert!(close((p25 + p75) / 2.0, p50, 1e-12));
        // limit load -> 0+ is p0, strictly above p_sleep
        assert!(close(node_power(&lp, 1e-12).unwrap(), lp.p0_w, 1e-9));
        assert!(lp.p0_w > lp.p_sleep_w);
    }

    #[test]
    fn full_load_fractions_match_duty_anchors() {
        let s = TrafficSchedule::default();
        assert!(close(full_load_fraction(&s, 500.0), 0.0285, 1e-12));
        assert!(close(full_load_fraction(&s, 2650.0), 0.0966, 1e-4));
        assert!(close(full_load_fraction(&s, 200.0), 0.019, 1e-12));
    }

    #[test]
    fn passage_windows_match_table_values() {
        let s = TrafficSchedule::default();
        assert!(close(passage_window_s(&s, 500.0), 16.2, 1e-9));
        assert!(close(passage_window_s(&s, 2650.0), 54.9, 1e-9));
    }

    #[test]
    fn average_power_anchors() {
        let s = TrafficSchedule::default();
        let lp = PowerModelParams::lp_repeater();
        let avg = average_node_power(&lp, &s, 200.0, IdleMode::SleepWhenIdle);
        assert!(close(avg, 5.16726, 1e-5));
        assert!(close(24.0 * avg, 124.014, 1e-3));
        let idle_on = average_node_power(&lp, &s, 200.0, IdleMode::IdleOn);
        assert!(close(idle_on, 24.336, 1e-3));
        let hp = PowerModelParams::hp_rrh();
        let site = 2.0 * average_node_power(&hp, &s, 500.0, IdleMode::SleepWhenIdle);
        assert!(close(site, 233.576, 1e-9));
    }

    #[test]
    fn donor_node_rule() {
        assert_eq!(lp_node_count(0), 0);
        assert_eq!(lp_node_count(1), 2);
        assert_eq!(lp_node_count(2), 4);
        assert_eq!(lp_node_count(10), 12);
    }

    #[test]
    fn conventional_baseline_per_km() {
        let s = TrafficSchedule::default();
        let hp = PowerModelParams::hp_rrh();
        assert!(close(baseline_mains_w_per_km(&s, &hp), 467.152, 1e-9));
        let r = corridor_energy_per_km(500.0, 0, &s, &hp, &PowerModelParams::lp_repeater(),
            OperatingPolicy::LpSleep)
        .unwrap();
        assert!(close(r.total_w_per_km, 467.152, 1e-9));
        assert!(close(r.savings_vs_baseline, 0.0, 1e-12));
    }

    #[test]
    fn savings_anchor_single_repeater() {
        let s = TrafficSchedule::default();
        let hp = PowerModelParams::hp_rrh();
        let lp = PowerModelParams::lp_repeater();
        let r = corridor_energy_per_km(1250.0, 1, &s, &hp, &lp, OperatingPolicy::LpSleep).unwrap();
        assert!(close(r.savings_vs_baseline, 0.5686, 5e-4), "got {}", r.savings_vs_baseline);
    }

    #[test]
    fn policy_ordering_never_increases_mains_power() {
        let s = TrafficSchedule::default();
        let hp = PowerModelParams::hp_rrh();
        let lp = PowerModelParams::lp_repeater();
        for (n, isd) in [(1usize, 1250.0), (5, 1950.0), (10, 2650.0)] {
            let on = corridor_energy_per_km(isd, n, &s, &hp, &lp, OperatingPolicy::LpAlwaysOn)
                .unwrap();
            let sleep =
                corridor_energy_per_km(isd, n, &s, &hp, &lp, OperatingPolicy::LpSleep).unwrap();
            let solar =
                corridor_energy_per_km(isd, n, &s, &hp, &lp, OperatingPolicy::LpSolar).unwrap();
            assert!(on.mains_w_per_km >= sleep.mains_w_per_km);
            assert!(sleep.mains_w_per_km >= solar.mains_w_per_km);
        }
    }

    #[test]
    fn simulated_day_matches_closed_form_without_transitions() {
        let s = TrafficSchedule::default();
        let lp = PowerModelParams::lp_repeater();
        let sim = simulate_day(&s, 200.0, &lp, 0.0).unwrap();
        let closed = 24.0 * average_node_power(&lp, &s, 200.0, IdleMode::SleepWhenIdle);
        assert!(close(sim.energy_wh, closed, 1e-9), "{} vs {closed}", sim.energy_wh);
        assert_eq!(sim.passages, 152);
        assert_eq!(sim.merged_windows, 0);
    }

    #[test]
    fn simulated_day_without_trains_is_pure_sleep() {
        let s = TrafficSchedule {
            trains_per_hour: 0.0,
            ..Default::default()
        };
        let lp = PowerModelParams::lp_repeater();
        let sim = simulate_day(&s, 200.0, &lp, 0.0).unwrap();
        assert!(close(sim.energy_wh, 24.0 * 4.72, 1e-12)); // 113.28 Wh
    }

    #[test]
    fn transition_cost_adds_per_passage_edges() {
        let s = TrafficSchedule::default();
        let lp = PowerModelParams::lp_repeater();
        let base = simulate_day(&s, 200.0, &lp, 0.0).unwrap();
        let with = simulate_day(&s, 200.0, &lp, 0.5).unwrap();
        let expected_extra = 152.0 * 2.0 * 0.5 * (28.26 - 4.72) / 3600.0;
        assert!(close(with.energy_wh - base.energy_wh, expected_extra, 1e-9));
    }

    #[test]
    fn overlapping_windows_merge_without_double_billing() {
        let lp = PowerModelParams::lp_repeater();
        // two passages 10 s apart with 60 s windows overlap
        let sim = simulate_day_with_arrivals(&[1000.0, 1010.0], 60.0, &lp, 0.0).unwrap();
        assert_eq!(sim.merged_windows, 1);
        let awake = 70.0; // merged [1000, 1070)
        let expected = (awake * 28.26 + (86400.0 - awake) * 4.72) / 3600.0;
        assert!(close(sim.energy_wh, expected, 1e-9));
    }
}
