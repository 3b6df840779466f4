//! Instance files: a `# key = value` header followed by CSV rows `id,t,D,E,c`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::instance::{DeviceProfile, ScheduleSolution, TrainInstance};
use crate::textio::HeaderBlock;
use crate::{Error, Result, Scalar};

const FORMAT: &str = "instance";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    id: usize,
    t: f64,
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "E")]
    e: f64,
    c: f64,
}

fn header_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:?}")
    }
}

impl<T: Scalar> TrainInstance<T> {
    pub fn to_file_string(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# channels = {}\n", self.channels));
        out.push_str(&format!("# data_requirement = {}\n", self.data_requirement));
        for (k, v) in [
            ("skew_threshold", self.skew_threshold),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("deadline", self.deadline),
        ] {
            out.push_str(&format!("# {k} = {}\n", header_value(v.to_f64_lossy())));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for d in &self.devices {
            w.serialize(Row {
                id: d.id,
                t: d.upload_time.to_f64_lossy(),
                d: d.data_quantity,
                e: d.skewness.to_f64_lossy(),
                c: d.cost.to_f64_lossy(),
            })?;
        }
        if self.devices.is_empty() {
            w.write_record(["id", "t", "D", "E", "c"])?;
        }
        let body = w.into_inner().map_err(|e| Error::format(FORMAT, e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::format(FORMAT, e.to_string()))?);
        Ok(out)
    }

    /// Parses an instance file. `skew_threshold` and `deadline` default to infinity,
    /// `alpha` and `beta` to 0.5.
    pub fn from_file_str(text: &str) -> Result<Self> {
        let (header, body) = HeaderBlock::split(text, FORMAT)?;
        let scalar = |key: &str, default: f64| -> Result<T> {
            let v: f64 = header.get_or(key, default)?;
            T::from_f64(v).ok_or_else(|| Error::format(FORMAT, format!("`{key}` out of range")))
        };
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
        let devices = reader
            .deserialize::<Row>()
            .map(|row| {
                let r = row?;
                let conv = |v: f64| T::from_f64(v).ok_or_else(|| Error::format(FORMAT, "value out of range"));
                Ok(DeviceProfile::new(r.id, conv(r.t)?, r.d, conv(r.e)?, conv(r.c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let instance = Self {
            devices,
            channels: header.get("channels")?,
            data_requirement: header.get("data_requirement")?,
            skew_threshold: scalar("skew_threshold", f64::INFINITY)?,
            alpha: scalar("alpha", 0.5)?,
            beta: scalar("beta", 0.5)?,
            deadline: scalar("deadline", f64::INFINITY)?,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_file_string()?)?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_file_str(&fs::read_to_string(path)?)
    }
}

impl<T: Scalar> ScheduleSolution<T> {
    /// Pretty JSON with selected ids, assignment, per-channel loads, `T`, `C` and `ℜ`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
