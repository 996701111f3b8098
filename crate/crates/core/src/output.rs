//! CSV and JSON writers for experiment outputs.
//!
//! Data files never carry a timestamp. The JSON summary written next to them
//! echoes the resolved config, seed, and key provenance; its only
//! run-dependent field is `generated_at_unix`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Provenance, SimConfig};
use crate::error::Result;
use crate::experiments::{AreaEntry, MonteCarloResult, SweepPoint};
use crate::transient::Waveform;

pub const TIMESTAMP_KEY: &str = "generated_at_unix";

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: SimConfig,
    pub provenance: BTreeMap<String, Provenance>,
    pub metrics: Value,
    pub generated_at_unix: u64,
}

impl<'a> Summary<'a> {
    pub fn new(command: &'a str, seed: u64, config: &SimConfig, metrics: Value) -> Self {
        let mut resolved = config.resolved();
        resolved.experiment.seed = seed;
        let generated_at_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: "camsim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config: resolved,
            provenance: config.provenance(),
            metrics,
            generated_at_unix,
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_pretty(value)?)?;
    Ok(())
}

fn csv_to_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        fill(&mut w)?;
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn sweep_csv(points: &[SweepPoint]) -> Result<String> {
    csv_to_string(&["hd", "delay_s", "converged"], |w| {
        for p in points {
            w.write_record([p.hd.to_string(), num(p.delay_s), p.converged.to_string()])?;
        }
        Ok(())
    })
}

/// `hd,trial,delay_s` rows in HD-then-trial order; non-discharging trials
/// are omitted (they are counted in the summary).
pub fn distributions_csv(mc: &MonteCarloResult) -> Result<String> {
    let hds: Vec<usize> = mc.reference.iter().map(|r| r.0).collect();
    csv_to_string(&["hd", "trial", "delay_s"], |w| {
        for (i, hd) in hds.iter().enumerate() {
            for (t, row) in mc.trials.iter().enumerate() {
                if let Some(d) = row[i] {
                    w.write_record([hd.to_string(), t.to_string(), num(d)])?;
                }
            }
        }
        Ok(())
    })
}

pub fn waveform_csv(wf: &Waveform) -> Result<String> {
    csv_to_string(&["time_s", "volts"], |w| {
        for (t, v) in wf.times.iter().zip(&wf.values) {
            w.write_record([num(*t), num(*v)])?;
        }
        Ok(())
    })
}

pub fn area_csv(entries: &[AreaEntry]) -> Result<String> {
    csv_to_string(&["structure_name", "area_f2", "ratio_vs_this_work"], |w| {
        for e in entries {
            w.write_record([
                e.structure_name.clone(),
                e.area_f2.to_string(),
                format!("{:.4}", e.ratio_vs_this_work),
            ])?;
        }
        Ok(())
    })
}

/// Generic table writer for rows of already-formatted cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    csv_to_string(header, |w| {
        for r in rows {
            w.write_record(r)?;
        }
        Ok(())
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Remove the timestamp from a summary document, for byte comparisons.
pub fn strip_timestamp(json_text: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(json_text)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(TIMESTAMP_KEY);
    }
    to_json_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_csv_layout() {
        let pts = [
            SweepPoint {
                hd: 0,
                delay_s: 1.5e-10,
                converged: true,
            },
            SweepPoint {
                hd: 1,
                delay_s: 2.25e-10,
                converged: false,
            },
        ];
        assert_eq!(
            sweep_csv(&pts).unwrap(),
            "hd,delay_s,converged\n0,1.5e-10,true\n1,2.25e-10,false\n"
        );
    }

    #[test]
    fn summary_strip_keeps_everything_else() {
        let cfg = SimConfig::default();
        let s = Summary::new("sweep-hd", 3, &cfg, serde_json::json!({"r_squared": 1.0}));
        let text = to_json_pretty(&s).unwrap();
        assert!(text.contains(TIMESTAMP_KEY));
        assert!(text.contains("default(non-paper)"));
        let stripped = strip_timestamp(&text).unwrap();
        assert!(!stripped.contains(TIMESTAMP_KEY));
        assert!(stripped.contains("\"seed\": 3"));
    }

    #[test]
    fn area_csv_rows() {
        let text = area_csv(&crate::experiments::area_report()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "structure_name,area_f2,ratio_vs_this_work");
        assert_eq!(lines[1], "5T1C,304,5.4286");
        assert_eq!(lines[3], "1C (this work),56,1.0000");
    }
}
