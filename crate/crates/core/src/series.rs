//! Hourly irradiance or PV-production series and their plain-CSV format.
//!
//! A series either carries plane-of-array irradiance (W/m², scaled by the PV
//! system at simulation time) or direct PV production (W, used as-is).

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("empty series")]
    Empty,
    #[error("record {index}: {reason}")]
    BadRecord { index: usize, reason: String },
    #[error("unrecognized csv header {0:?}; expected 'timestamp,poa_wm2' or 'timestamp,pv_w'")]
    BadHeader(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What the per-hour value means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Plane-of-array irradiance on the module surface, W/m².
    PlaneOfArrayIrradiance,
    /// PV production at the array output, W.
    PvPower,
}

impl SeriesKind {
    fn column_name(self) -> &'static str {
        match self {
            SeriesKind::PlaneOfArrayIrradiance => "poa_wm2",
            SeriesKind::PvPower => "pv_w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourlyRecord {
    pub timestamp: DateTime<Utc>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceSeries {
    pub kind: SeriesKind,
    pub records: Vec<HourlyRecord>,
}

impl IrradianceSeries {
    pub fn new(kind: SeriesKind, records: Vec<HourlyRecord>) -> Result<Self, SeriesError> {
        let s = Self { kind, records };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Strictly increasing hourly timestamps, non-negative values.
    pub fn validate(&self) -> Result<(), SeriesError> {
        if self.records.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (i, r) in self.records.iter().enumerate() {
            if r.value < 0.0 || r.value.is_nan() {
                return Err(SeriesError::BadRecord {
                    index: i,
                    reason: format!("negative value {}", r.value),
                });
            }
            if i > 0 {
                let dt = r.timestamp - self.records[i - 1].timestamp;
                if dt != chrono::Duration::hours(1) {
                    return Err(SeriesError::BadRecord {
                        index: i,
                        reason: format!(
                            "expected hourly cadence, got {} -> {}",
                            self.records[i - 1].timestamp, r.timestamp
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Plain two-column CSV: `timestamp,poa_wm2` or `timestamp,pv_w`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SeriesError> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or(SeriesError::Empty)?
            .trim()
            .to_string();
        let kind = match header.as_str() {
            "timestamp,poa_wm2" => SeriesKind::PlaneOfArrayIrradiance,
            "timestamp,pv_w" => SeriesKind::PvPower,
            other => return Err(SeriesError::BadHeader(other.to_string())),
        };
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (ts, val) = line.split_once(',').ok_or_else(|| SeriesError::BadRecord {
                index: i,
                reason: format!("expected two comma-separated fields, got {line:?}"),
            })?;
            let timestamp = ts
                .parse::<DateTime<Utc>>()
                .map_err(|e| SeriesError::BadRecord {
                    index: i,
                    reason: format!("bad timestamp {ts:?}: {e}"),
                })?;
            let value = val.parse::<f64>().map_err(|e| SeriesError::BadRecord {
                index: i,
                reason: format!("bad value {val:?}: {e}"),
            })?;
            records.push(HourlyRecord { timestamp, value });
        }
        Self::new(kind, records)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, SeriesError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "timestamp,{}", self.kind.column_name())?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:.3}",
                r.timestamp.format("%Y-%m-%dT%H:%M:%SZ"),
                r.value
            )?;
        }
        Ok(())
    }
}
