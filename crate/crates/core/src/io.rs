//! JSON and CSV file formats.
//!
//! Channel: `{"inputs": k, "outputs": m, "rows": [[...], ...]}`, row-major.
//! Compound: `{"states": [{"label": "...", "W": {...}, "V": {...}}]}`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{validate_channel, BroadcastPair, Channel, CompoundBcc};
use crate::geometry::RatePoint;
use crate::info::AuxiliaryInput;
use crate::metrics::RegionPointSet;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<Vec<f64>>,
}

impl From<&Channel> for ChannelJson {
    fn from(c: &Channel) -> Self {
        ChannelJson {
            inputs: c.inputs(),
            outputs: c.outputs(),
            rows: c.to_rows(),
        }
    }
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ChannelJson::from(self).serialize(serializer)
    }
}

impl TryFrom<&ChannelJson> for Channel {
    type Error = crate::Error;

    fn try_from(j: &ChannelJson) -> crate::Result<Channel> {
        let c = validate_channel(&j.rows)?;
        if c.inputs() != j.inputs || c.outputs() != j.outputs {
            return Err(crate::Error::ShapeMismatch(format!(
                "declared {}x{} but rows are {}x{}",
                j.inputs,
                j.outputs,
                c.inputs(),
                c.outputs()
            )));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub label: String,
    #[serde(rename = "W")]
    pub w: ChannelJson,
    #[serde(rename = "V")]
    pub v: ChannelJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundJson {
    pub states: Vec<StateJson>,
}

impl From<&CompoundBcc> for CompoundJson {
    fn from(c: &CompoundBcc) -> Self {
        CompoundJson {
            states: c
                .states()
                .iter()
                .zip(c.labels())
                .map(|(s, label)| StateJson {
                    label: label.clone(),
                    w: s.w().into(),
                    v: s.v().into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&CompoundJson> for CompoundBcc {
    type Error = crate::Error;

    fn try_from(j: &CompoundJson) -> crate::Result<CompoundBcc> {
        let mut states = Vec::with_capacity(j.states.len());
        let mut labels = Vec::with_capacity(j.states.len());
        for s in &j.states {
            states.push(BroadcastPair::new(Channel::try_from(&s.w)?, Channel::try_from(&s.v)?)?);
            labels.push(s.label.clone());
        }
        CompoundBcc::new(states, labels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxJson {
    pub n: usize,
    pub p_u: Vec<f64>,
    pub p_v_given_u: ChannelJson,
    pub encoder: ChannelJson,
}

impl From<&AuxiliaryInput> for AuxJson {
    fn from(a: &AuxiliaryInput) -> Self {
        AuxJson {
            n: a.n(),
            p_u: a.p_u().as_slice().to_vec(),
            p_v_given_u: a.p_v_given_u().into(),
            encoder: a.encoder().into(),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_channel(path: &Path) -> Result<Channel, FormatError> {
    let j: ChannelJson = read_json(path)?;
    Channel::try_from(&j).map_err(|e| FormatError::Invalid {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_compound(path: &Path) -> Result<CompoundBcc, FormatError> {
    let j: CompoundJson = read_json(path)?;
    CompoundBcc::try_from(&j).map_err(|e| FormatError::Invalid {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads rate pairs from a CSV with `R0` and `R1` columns (other columns,
/// such as `n` and `aux_id`, are ignored).
pub fn read_region_csv(path: &Path) -> Result<RegionPointSet, FormatError> {
    let name = path.display().to_string();
    let csv_err = |source| FormatError::Csv {
        path: name.clone(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let col = |key: &str| {
        headers.iter().position(|h| h.trim() == key).ok_or_else(|| FormatError::Invalid {
            path: name.clone(),
            message: format!("missing column {key}"),
        })
    };
    let (c0, c1) = (col("R0")?, col("R1")?);
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64, FormatError> {
            record.get(i).unwrap_or("").trim().parse().map_err(|_| FormatError::Invalid {
                path: name.clone(),
                message: format!("bad number in row {:?}", record.position().map(|p| p.line())),
            })
        };
        points.push(RatePoint::new(parse(c0)?, parse(c1)?));
    }
    RegionPointSet::new(points).map_err(|e| FormatError::Invalid {
        path: name.clone(),
        message: e.to_string(),
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let io_err = |source| FormatError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::env::current_dir().map_err(io_err)?,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
