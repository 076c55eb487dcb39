//! CSV serialization for the report tables and the per-run report file.
//!
//! Formatting is fixed-precision so that repeated runs are byte-identical.

use std::io::Write;
use std::path::{Path, PathBuf};

use corridor_core::link::LinkProfile;
use corridor_core::planner::SweepResult;
use corridor_core::solar::{AutonomyStats, PvSystem};

use crate::config::RunConfig;

pub fn write_profile_csv<W: Write>(profile: &LinkProfile, mut w: W) -> std::io::Result<()> {
    write!(w, "d_m,rsrp_hp_left_dbm,rsrp_hp_right_dbm")?;
    for n in 1..=profile.rsrp_lp_dbm.len() {
        write!(w, ",rsrp_lp_{n}_dbm")?;
    }
    writeln!(w, ",signal_dbm,noise_dbm,snr_db,thr_bps_hz")?;
    for i in 0..profile.len() {
        write!(
            w,
            "{},{:.3},{:.3}",
            profile.grid_m[i], profile.rsrp_hp_left_dbm[i], profile.rsrp_hp_right_dbm[i]
        )?;
        for col in &profile.rsrp_lp_dbm {
            write!(w, ",{:.3}", col[i])?;
        }
        writeln!(
            w,
            ",{:.3},{:.3},{:.4},{:.4}",
            profile.total_signal_dbm[i],
            profile.total_noise_dbm[i],
            profile.snr_db[i],
            profile.throughput_bps_hz[i]
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(sweep: &SweepResult, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,max_isd_m,min_snr_db")?;
    for row in &sweep.rows {
        writeln!(w, "{},{},{:.4}", row.n_repeaters, row.max_isd_m, row.min_snr_db)?;
    }
    Ok(())
}

pub struct EnergyRow {
    pub scenario: String,
    pub n_nodes: usize,
    pub isd_m: f64,
    /// Mains power draw per km, the quantity the energy comparison plots.
    pub w_per_km: f64,
    pub savings_pct: f64,
}

pub fn write_energy_csv<W: Write>(rows: &[EnergyRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "scenario,n_nodes,isd_m,w_per_km,savings_pct")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.4},{:.2}",
            r.scenario, r.n_nodes, r.isd_m, r.w_per_km, r.savings_pct
        )?;
    }
    Ok(())
}

pub fn write_autonomy_csv<W: Write>(stats: &AutonomyStats, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "days_battery_full_pct,days_battery_empty_pct,downtime_hours,min_soc_wh"
    )?;
    writeln!(
        w,
        "{:.2},{:.2},{},{:.2}",
        stats.days_battery_full_pct,
        stats.days_battery_empty_pct,
        stats.downtime_hours,
        stats.min_soc_wh
    )?;
    Ok(())
}

pub fn write_system_csv<W: Write>(system: &PvSystem, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "peak_power_wp,battery_capacity_wh,discharge_cutoff,system_loss,tilt_deg,azimuth_deg"
    )?;
    writeln!(
        w,
        "{},{},{},{},{},{}",
        system.peak_power_wp,
        system.battery_capacity_wh,
        system.discharge_cutoff,
        system.system_loss,
        system.tilt_deg,
        system.azimuth_deg
    )?;
    Ok(())
}

/// Default report path: the output path with `.report.toml` appended.
pub fn default_report_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".report.toml");
    PathBuf::from(name)
}

/// Per-run provenance: command, key arguments and the full effective config.
pub fn write_report(
    path: &Path,
    command: &str,
    args: &[(&str, String)],
    config: &RunConfig,
) -> std::io::Result<()> {
    let mut text = String::new();
    text.push_str("[run]\n");
    text.push_str(&format!("command = {:?}\n", command));
    for (k, v) in args {
        text.push_str(&format!("{k} = {v:?}\n"));
    }
    text.push_str("\n[config]\n");
    for line in config.to_toml().lines() {
        // nest the effective config under [config]
        if let Some(rest) = line.strip_prefix('[') {
            text.push_str(&format!("[config.{rest}\n"));
        } else {
            text.push_str(line);
            text.push('\n');
        }
    }
    std::fs::write(path, text)
}
