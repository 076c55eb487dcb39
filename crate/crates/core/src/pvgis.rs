//! Cached client for the public PVGIS v5 hourly-series API.
//!
//! Responses are cached verbatim, keyed by a fingerprint of the canonical
//! request, so repeated runs and offline test setups never touch the network.
//! The endpoint URL is configuration, not a code constant.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use chrono::{DateTime, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::series::{HourlyRecord, IrradianceSeries, SeriesError, SeriesKind};

#[derive(Debug, Error)]
pub enum PvgisError {
    #[error("network error after {attempts} attempt(s): {last}")]
    Network { attempts: u32, last: String },
    #[error("http error: status {status}")]
    Http { status: u16 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of one PVGIS hourly-series request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvgisRequest {
    pub lat: f64,
    pub lon: f64,
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
    pub peak_power_kwp: f64,
    pub loss_pct: f64,
    pub start_year: i32,
    pub end_year: i32,
}

impl Default for PvgisRequest {
    fn default() -> Self {
        Self {
            lat: 0.0,
            lon: 0.0,
            tilt_deg: 90.0,
            azimuth_deg: 0.0,
            peak_power_kwp: 0.54,
            loss_pct: 14.0,
            start_year: 2019,
            end_year: 2019,
        }
    }
}

impl PvgisRequest {
    pub fn validate(&self) -> Result<(), PvgisError> {
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(PvgisError::Parse(format!(
                "coordinates out of range: lat {}, lon {}",
                self.lat, self.lon
            )));
        }
        Ok(())
    }

    /// Canonical query string with a fixed field order, used both for the
    /// request and for the cache fingerprint.
    pub fn canonical_query(&self) -> String {
        format!(
            "lat={}&lon={}&angle={}&aspect={}&peakpower={}&loss={}&startyear={}&endyear={}&pvcalculation=1&outputformat=json",
            self.lat,
            self.lon,
            self.tilt_deg,
            self.azimuth_deg,
            self.peak_power_kwp,
            self.loss_pct,
            self.start_year,
            self.end_year
        )
    }

    /// Hex SHA-256 of the canonical query. Invariant to how the request was
    /// assembled, by construction.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_query().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Network and cache behavior of [`fetch_series`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FetchConfig {
    /// Base URL of the seriescalc endpoint.
    pub endpoint: String,
    /// Total attempts before giving up.
    pub retries: u32,
    pub initial_backoff_s: f64,
    pub timeout_s: f64,
    /// Cache directory; `None` resolves PVGIS_CACHE_DIR or ./pvgis-cache.
    pub cache_dir: Option<PathBuf>,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://re.jrc.ec.europa.eu/api/v5_2/seriescalc".into(),
            retries: 3,
            initial_backoff_s: 1.0,
            timeout_s: 30.0,
            cache_dir: None,
        }
    }
}

impl FetchConfig {
    pub fn resolved_cache_dir(&self) -> PathBuf {
        if let Some(dir) = &self.cache_dir {
            return dir.clone();
        }
        match std::env::var_os("PVGIS_CACHE_DIR") {
            Some(dir) => PathBuf::from(dir),
            None => PathBuf::from("./pvgis-cache"),
        }
    }
}

/// Metadata stored next to each cached payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub fingerprint: String,
    pub fetched_at: DateTime<Utc>,
    pub payload_path: PathBuf,
    pub url: String,
}

fn payload_path(cache_dir: &Path, fingerprint: &str) -> PathBuf {
    cache_dir.join(format!("{fingerprint}.json"))
}

fn meta_path(cache_dir: &Path, fingerprint: &str) -> PathBuf {
    cache_dir.join(format!("{fingerprint}.meta.json"))
}

/// Store a payload under the request's fingerprint, e.g. to seed fixtures.
pub fn write_cache_entry(
    req: &PvgisRequest,
    cfg: &FetchConfig,
    payload: &[u8],
    url: &str,
) -> Result<CacheEntry, PvgisError> {
    let dir = cfg.resolved_cache_dir();
    std::fs::create_dir_all(&dir)?;
    let fp = req.fingerprint();
    let path = payload_path(&dir, &fp);
    std::fs::write(&path, payload)?;
    let entry = CacheEntry {
        fingerprint: fp.clone(),
        fetched_at: Utc::now(),
        payload_path: path,
        url: url.to_string(),
    };
    std::fs::write(
        meta_path(&dir, &fp),
        serde_json::to_vec_pretty(&entry).expect("cache entry serializes"),
    )?;
    Ok(entry)
}

fn flight_lock(fingerprint: &str) -> Arc<Mutex<()>> {
    static LOCKS: OnceLock<Mutex<HashMap<String, Arc<Mutex<()>>>>> = OnceLock::new();
    let map = LOCKS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("flight lock map poisoned");
    guard
        .entry(fingerprint.to_string())
        .or_insert_with(|| Arc::new(Mutex::new(())))
        .clone()
}

/// Hourly series for a request, from cache when available, otherwise fetched
/// and cached. Fetches for the same fingerprint are single-flight.
pub fn fetch_series(req: &PvgisRequest, cfg: &FetchConfig) -> Result<IrradianceSeries, PvgisError> {
    req.validate()?;
    let fp = req.fingerprint();
    let lock = flight_lock(&fp);
    let _guard = lock.lock().expect("flight lock poisoned");

    let dir = cfg.resolved_cache_dir();
    let path = payload_path(&dir, &fp);
    if path.exists() {
        let payload = std::fs::read(&path)?;
        return parse_series(&payload);
    }

    let url = format!("{}?{}", cfg.endpoint, req.canonical_query());
    let payload = http_get_with_retries(&url, cfg)?;
    let series = parse_series(&payload)?;
    write_cache_entry(req, cfg, &payload, &url)?;
    Ok(series)
}

fn http_get_with_retries(url: &str, cfg: &FetchConfig) -> Result<Vec<u8>, PvgisError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs_f64(cfg.timeout_s))
        .build()
        .map_err(|e| PvgisError::Network {
            attempts: 0,
            last: e.to_string(),
        })?;
    let attempts = cfg.retries.max(1);
    let mut last = String::new();
    for attempt in 0..attempts {
        if attempt > 0 {
            let backoff = cfg.initial_backoff_s * 2f64.powi(attempt as i32 - 1);
            std::thread::sleep(Duration::from_secs_f64(backoff));
        }
        match client.get(url).send() {
            Ok(resp) => {
                let status = resp.status();
                if status.is_success() {
                    return resp.bytes().map(|b| b.to_vec()).map_err(|e| {
                        PvgisError::Network {
                            attempts: attempt + 1,
                            last: e.to_string(),
                        }
                    });
                }
                if status.is_client_error() {
                    return Err(PvgisError::Http {
                        status: status.as_u16(),
                    });
                }
                last = format!("status {status}");
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(PvgisError::Network { attempts, last })
}

/// Parse a PVGIS hourly-series JSON payload into a series.
///
/// Prefers the PV power column (`P`, present with pvcalculation) and falls
/// back to plane-of-array irradiance (`G(i)`). Timestamps are normalized to
/// the top of the hour.
pub fn parse_series(payload: &[u8]) -> Result<IrradianceSeries, PvgisError> {
    let root: serde_json::Value = serde_json::from_slice(payload)
        .map_err(|e| PvgisError::Parse(format!("invalid json: {e}")))?;
    let hourly = root
        .pointer("/outputs/hourly")
        .and_then(|v| v.as_array())
        .ok_or_else(|| PvgisError::Parse("missing outputs.hourly array".into()))?;
    if hourly.is_empty() {
        return Err(PvgisError::Parse("outputs.hourly is empty".into()));
    }

    let kind = if hourly[0].get("P").is_some() {
        SeriesKind::PvPower
    } else if hourly[0].get("G(i)").is_some() {
        SeriesKind::PlaneOfArrayIrradiance
    } else {
        return Err(PvgisError::Parse(
            "record 0: neither P nor G(i) present".into(),
        ));
    };
    let column = match kind {
        SeriesKind::PvPower => "P",
        SeriesKind::PlaneOfArrayIrradiance => "G(i)",
    };

    let mut records = Vec::with_capacity(hourly.len());
    for (i, rec) in hourly.iter().enumerate() {
        let time = rec
            .get("time")
            .and_then(|v| v.as_str())
            .ok_or_else(|| PvgisError::Parse(format!("record {i}: missing time")))?;
        let naive = NaiveDateTime::parse_from_str(time, "%Y%m%d:%H%M")
            .map_err(|e| PvgisError::Parse(format!("record {i}: bad time {time:?}: {e}")))?;
        let timestamp = naive
            .and_utc()
            .with_minute(0)
            .expect("minute 0 is valid")
            .with_second(0)
            .expect("second 0 is valid");
        let value = rec
            .get(column)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| PvgisError::Parse(format!("record {i}: missing {column}")))?;
        if value < 0.0 {
            return Err(PvgisError::Parse(format!(
                "record {i}: negative value {value}"
            )));
        }
        if let Some(prev) = records.last() {
            let prev: &HourlyRecord = prev;
            if timestamp <= prev.timestamp {
                return Err(PvgisError::Parse(format!(
                    "record {i}: timestamp {timestamp} not after {}",
                    prev.timestamp
                )));
            }
        }
        records.push(HourlyRecord { timestamp, value });
    }
    Ok(IrradianceSeries::new(kind, records)?)
}
