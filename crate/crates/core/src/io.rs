//! File formats: dataset CSV plus JSON sidecar, sampler config, JSON reports.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_f64, to_json_string};
use crate::linalg::DesignMatrix;
use crate::models::{Dataset, HyperParams, ModelKind};
use crate::sampler::SamplerConfig;

/// Contents of the dataset sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub kind: ModelKind,
    pub lambda: f64,
    pub theta: f64,
    pub gamma: Option<f64>,
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = to_json_string(value).map_err(|e| Error::format(path, e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

/// Writes `y,x1,…,xp` rows to `path` and the sidecar next to it.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = String::from("y");
    for j in 1..=data.p() {
        out.push_str(&format!(",x{j}"));
    }
    out.push('\n');
    for (i, y) in data.y().iter().enumerate() {
        out.push_str(&fmt_f64(*y));
        for j in 0..data.p() {
            out.push(',');
            out.push_str(&fmt_f64(data.design().covariate(i, j)));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
    let hyper = data.hyper();
    let meta = DatasetMeta {
        kind: data.kind(),
        lambda: hyper.lambda,
        theta: hyper.theta,
        gamma: hyper.gamma,
    };
    write_json(&sidecar_path(path), &meta)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let meta: DatasetMeta = read_json(&sidecar_path(path))?;
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let headers = reader.headers().map_err(|e| Error::format(path, e.to_string()))?.clone();
    if headers.len() < 2 || &headers[0] != "y" {
        return Err(Error::format(path, "expected header y,x1,...,xp"));
    }
    for (j, name) in headers.iter().skip(1).enumerate() {
        if name != format!("x{}", j + 1) {
            return Err(Error::format(path, format!("unexpected column name {name:?}")));
        }
    }
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let values = record
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::format(path, format!("row {}: cannot parse {s:?}", line + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        y.push(values[0]);
        rows.push(values[1..].to_vec());
    }
    if rows.is_empty() {
        return Err(Error::format(path, "dataset has no rows"));
    }
    let hyper = HyperParams::new(meta.lambda, meta.theta, meta.gamma)?;
    Dataset::new(meta.kind, y, DesignMatrix::from_rows(&rows)?, hyper)
}

pub fn read_config(path: &Path) -> Result<SamplerConfig> {
    let config: SamplerConfig = read_json(path)?;
    config.validate()?;
    Ok(config)
}
