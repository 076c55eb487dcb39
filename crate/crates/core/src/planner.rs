//! Repeater placement and maximum inter-site-distance search.
//!
//! The planner answers: how far apart can the two high-power sites be moved
//! so that N repeaters still keep the worst-case SNR above the peak-throughput
//! threshold everywhere on the track.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::link::{min_snr_over_track, CorridorConfig, LinkError};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("placement infeasible: {0}")]
    InfeasiblePlacement(String),
    #[error("no feasible ISD for n={n}: min SNR {min_snr_db:.2} dB below threshold at the first step")]
    NoFeasibleIsd { n: usize, min_snr_db: f64 },
    #[error("ISD search reached the cap of {cap_m} m without failing the criterion")]
    SearchCapReached { cap_m: f64 },
    #[error(transparent)]
    Link(#[from] LinkError),
}

/// How repeaters are laid out inside a segment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlacementStrategy {
    /// Evenly spaced: positions k*isd/(n+1), k = 1..n.
    #[default]
    Uniform,
    /// Fixed spacing comb centered on the segment midpoint.
    FixedSpacing { spacing_m: f64 },
}

/// Search grid parameters for the max-ISD scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// ISD scan step, meters.
    pub isd_step_m: f64,
    /// Track sampling step for the min-SNR evaluation, meters.
    pub grid_step_m: f64,
    /// Hard upper bound on the scan, meters.
    pub isd_cap_m: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            isd_step_m: 50.0,
            grid_step_m: 1.0,
            isd_cap_m: 20_000.0,
        }
    }
}

/// One row of a max-ISD sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_repeaters: usize,
    pub max_isd_m: f64,
    /// Worst-case SNR at the returned maximum ISD, dB.
    pub min_snr_db: f64,
}

/// Max-ISD table over a range of repeater counts, ordered by n.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Repeater positions for a segment of the given length.
pub fn place_repeaters(
    isd_m: f64,
    n: usize,
    strategy: &PlacementStrategy,
) -> Result<Vec<f64>, PlannerError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let positions: Vec<f64> = match strategy {
        PlacementStrategy::Uniform => (1..=n).map(|k| k as f64 * isd_m / (n + 1) as f64).collect(),
        PlacementStrategy::FixedSpacing { spacing_m } => {
            if !(spacing_m.is_finite() && *spacing_m > 0.0) {
                return Err(PlannerError::InfeasiblePlacement(format!(
                    "spacing must be > 0, got {spacing_m}"
                )));
            }
            let first = isd_m / 2.0 - (n - 1) as f64 * spacing_m / 2.0;
            (0..n).map(|k| first + k as f64 * spacing_m).collect()
        }
    };
    let first = positions[0];
    let last = positions[n - 1];
    if first <= 0.0 || last >= isd_m {
        return Err(PlannerError::InfeasiblePlacement(format!(
            "{n} nodes span [{first:.1}, {last:.1}] m outside (0, {isd_m}) m"
        )));
    }
    Ok(positions)
}

/// Largest ISD on the step grid whose worst-case SNR stays at or above the
/// threshold with `n` repeaters placed by `strategy`.
///
/// Scans upward from one step and stops at the first failing ISD, returning
/// the last passing one together with its worst-case SNR.
pub fn max_isd(
    n: usize,
    base_config: &CorridorConfig,
    strategy: &PlacementStrategy,
    params: &SearchParams,
    snr_threshold_db: f64,
) -> Result<SweepRow, PlannerError> {
    assert!(params.isd_step_m > 0.0, "isd step must be > 0");
    let mut last_pass: Option<SweepRow> = None;
    let mut isd = params.isd_step_m;
    while isd <= params.isd_cap_m {
        let positions = match place_repeaters(isd, n, strategy) {
            Ok(p) => p,
            // a comb wider than the segment becomes feasible at larger ISDs
            Err(PlannerError::InfeasiblePlacement(_)) if last_pass.is_none() => {
                isd += params.isd_step_m;
                continue;
            }
            Err(e) => return Err(e),
        };
        let config = base_config.clone().with_layout(isd, positions);
        let min_snr = min_snr_over_track(&config, params.grid_step_m)?;
        if min_snr >= snr_threshold_db {
            last_pass = Some(SweepRow {
                n_repeaters: n,
                max_isd_m: isd,
                min_snr_db: min_snr,
            });
        } else {
            return last_pass.ok_or(PlannerError::NoFeasibleIsd {
                n,
                min_snr_db: min_snr,
            });
        }
        isd += params.isd_step_m;
    }
    Err(PlannerError::SearchCapReached {
        cap_m: params.isd_cap_m,
    })
}

/// One max-ISD row per repeater count, ordered by n.
pub fn sweep_max_isd(
    n_range: impl IntoIterator<Item = usize>,
    base_config: &CorridorConfig,
    strategy: &PlacementStrategy,
    params: &SearchParams,
    snr_threshold_db: f64,
) -> Result<SweepResult, PlannerError> {
    let mut rows = Vec::new();
    for n in n_range {
        rows.push(max_isd(n, base_config, strategy, params, snr_threshold_db)?);
    }
    Ok(SweepResult { rows })
}
