//! Multichannel recordings, their on-disk CSV/JSON form, and epoch slicing.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelId, Kind, CHANNEL_COUNT};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Samples per epoch by default: 2 s at 50 Hz.
pub const DEFAULT_EPOCH_LEN: usize = 100;

/// Provenance supplied by whoever produced the data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub gait: String,
    pub ground: String,
    pub seed: u64,
}

/// Contents of the `.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub gait: String,
    pub ground: String,
    pub seed: u64,
    pub dt: f64,
    pub duration_s: f64,
    pub schema_version: u32,
}

/// Immutable 16-channel time series, stored column-wise in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    dt: f64,
    columns: Vec<Vec<f64>>,
    meta: Meta,
}

impl Recording {
    pub fn new(channel_data: Vec<Vec<f64>>, dt: f64, meta: Meta) -> Result<Self> {
        if channel_data.len() != CHANNEL_COUNT {
            return Err(Error::BadChannelCount { expected: CHANNEL_COUNT, got: channel_data.len() });
        }
        let n = channel_data[0].len();
        if let Some(c) = channel_data.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch(n, c.len()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::NonPositiveDt(dt));
        }
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        for leg in crate::channels::Leg::ALL {
            let idx = ChannelId::new(leg, Kind::Pressure).index();
            if let Some(v) = channel_data[idx].iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "pressure channel {} has negative or NaN sample {v}",
                    ChannelId::from_index(idx)
                )));
            }
        }
        Ok(Recording { dt, columns: channel_data, meta })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn duration_s(&self) -> f64 {
        self.rows() as f64 * self.dt
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn column(&self, ch: ChannelId) -> &[f64] {
        &self.columns[ch.index()]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> [f64; CHANNEL_COUNT] {
        std::array::from_fn(|c| self.columns[c][i])
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            gait: self.meta.gait.clone(),
            ground: self.meta.ground.clone(),
            seed: self.meta.seed,
            dt: self.dt,
            duration_s: self.duration_s(),
            schema_version: SCHEMA_VERSION,
        }
    }

    /// Writes the CSV body. `comments` become leading `# ` lines.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", csv_header())?;
        let mut line = String::with_capacity(16 * 24);
        for i in 0..self.rows() {
            line.clear();
            line.push_str(&(i as f64 * self.dt).to_string());
            for col in &self.columns {
                line.push(',');
                line.push_str(&col[i].to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parses a CSV body. `dt` and provenance come from the sidecar.
    pub fn read_csv<R: BufRead>(r: R, sidecar: &Sidecar) -> Result<Self> {
        if sidecar.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unsupported schema_version {}", sidecar.schema_version),
            });
        }
        let mut columns = vec![Vec::new(); CHANNEL_COUNT];
        let mut header_seen = false;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                if line.trim() != csv_header() {
                    return Err(Error::Parse { line: lineno, msg: "unexpected header".into() });
                }
                header_seen = true;
                continue;
            }
            let mut fields = line.split(',');
            fields.next(); // t
            let mut count = 0;
            for (c, f) in fields.enumerate() {
                if c >= CHANNEL_COUNT {
                    return Err(Error::Parse { line: lineno, msg: "too many fields".into() });
                }
                let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad number {f:?}"),
                })?;
                columns[c].push(v);
                count += 1;
            }
            if count != CHANNEL_COUNT {
                return Err(Error::Parse { line: lineno, msg: format!("expected 17 fields, got {}", count + 1) });
            }
        }
        if !header_seen {
            return Err(Error::Parse { line: 0, msg: "missing header".into() });
        }
        let meta = Meta { gait: sidecar.gait.clone(), ground: sidecar.ground.clone(), seed: sidecar.seed };
        Recording::new(columns, sidecar.dt, meta)
    }

    /// Loads `path` and its `.meta.json` sidecar.
    pub fn load(path: &Path) -> Result<Self> {
        let sidecar: Sidecar = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
        let file = fs::File::open(path)?;
        Recording::read_csv(BufReader::new(file), &sidecar)
    }
}

/// `run.csv` -> `run.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

pub fn csv_header() -> String {
    let mut s = String::from("t");
    for c in ChannelId::all() {
        s.push(',');
        s.push_str(&c.name());
    }
    s
}

/// Fixed-length analysis window of a recording.
#[derive(Debug, Clone, Copy)]
pub struct Epoch<'a> {
    pub source: &'a Recording,
    pub start_index: usize,
    pub length: usize,
}

impl<'a> Epoch<'a> {
    pub fn label(&self) -> &'a str {
        &self.source.meta.ground
    }

    pub fn gait(&self) -> &'a str {
        &self.source.meta.gait
    }

    pub fn column(&self, ch: ChannelId) -> &'a [f64] {
        &self.source.column(ch)[self.start_index..self.start_index + self.length]
    }
}

/// Cuts `rec` into windows of `epoch_len` samples starting every `stride`
/// samples. A trailing partial window is dropped.
pub fn slice_epochs(rec: &Recording, epoch_len: usize, stride: usize) -> Result<Vec<Epoch<'_>>> {
    if epoch_len == 0 || stride == 0 {
        return Err(Error::InvalidArgument("epoch_len and stride must be at least 1".into()));
    }
    if epoch_len > rec.rows() {
        return Err(Error::EpochTooLong { epoch_len, rows: rec.rows() });
    }
    Ok((0..=rec.rows() - epoch_len)
        .step_by(stride)
        .map(|start_index| Epoch { source: rec, start_index, length: epoch_len })
        .collect())
}
