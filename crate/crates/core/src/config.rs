//! JSON configuration with a strict schema.
//!
//! Every key is optional; missing keys take the documented defaults. Unknown
//! keys are rejected. Each leaf key is tagged with where its value came from
//! so outputs can flag defaults that are not calibrated against measurement.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::device::{BiasScheme, FeFetParams, MemcapacitorParams};
use crate::error::{CamError, Result};
use crate::experiments::{Circuit, ExperimentConfig};
use crate::readout::TdcParams;
use crate::transient::{InverterDriverParams, TransientConfig, VdReadoutParams};
use crate::variation::VariationSpec;

pub const SEED_ENV_VAR: &str = "CAMSIM_SEED";

/// Device section: memcapacitor and transistor-cell parameters side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub c_lcs: f64,
    pub c_hcs: f64,
    pub v_tn: f64,
    pub v_tp: f64,
    pub slope_s: f64,
    pub v_shift: f64,
    pub v_fb: f64,
    pub v_coercive: f64,
    pub t_min_write: f64,
    pub i_on: f64,
    pub i_off: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        let m = MemcapacitorParams::default();
        let f = FeFetParams::default();
        Self {
            c_lcs: m.c_lcs,
            c_hcs: m.c_hcs,
            v_tn: m.v_tn,
            v_tp: m.v_tp,
            slope_s: m.slope_s,
            v_shift: m.v_shift,
            v_fb: m.v_fb,
            v_coercive: m.v_coercive,
            t_min_write: m.t_min_write,
            i_on: f.i_on,
            i_off: f.i_off,
        }
    }
}

impl DeviceConfig {
    pub fn memcap(&self) -> MemcapacitorParams {
        MemcapacitorParams {
            c_lcs: self.c_lcs,
            c_hcs: self.c_hcs,
            v_tn: self.v_tn,
            v_tp: self.v_tp,
            slope_s: self.slope_s,
            v_shift: self.v_shift,
            v_fb: self.v_fb,
            v_coercive: self.v_coercive,
            t_min_write: self.t_min_write,
        }
    }

    pub fn fefet(&self) -> FeFetParams {
        FeFetParams {
            i_on: self.i_on,
            i_off: self.i_off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayConfig {
    /// Fixed ML wiring and driver/sense parasitic per word.
    pub c_fixed: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self { c_fixed: 5e-15 }
    }
}

/// Converter settings; an absent `t_lsb` resolves to half the nominal TD
/// per-HD slope.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TdcConfig {
    pub t_offset: Option<f64>,
    pub t_lsb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub device: DeviceConfig,
    pub array: ArrayConfig,
    pub bias: BiasScheme,
    pub driver: InverterDriverParams,
    pub transient: TransientConfig,
    pub vd: VdReadoutParams,
    pub variation: VariationSpec,
    pub tdc: TdcConfig,
    pub experiment: ExperimentConfig,
    /// Dotted leaf keys present in the source document.
    #[serde(skip)]
    explicit_keys: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "user")]
    User,
    #[serde(rename = "default(paper)")]
    DefaultPaper,
    #[serde(rename = "default(non-paper)")]
    DefaultNonPaper,
}

/// Keys whose defaults are the published bias table or area constants.
const PAPER_KEYS: &[&str] = &[
    "bias.v_search_1",
    "bias.v_search_0",
    "bias.v_write_1",
    "bias.v_write_0",
    "bias.t_write",
    "experiment.n_bits",
    "experiment.hd_list",
];

fn leaf_keys(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                leaf_keys(&p, child, out);
            }
        }
        _ => out.push(prefix.to_string()),
    }
}

impl SimConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CamError::Parse(format!("invalid JSON: {e}")))?;
        if !raw.is_object() {
            return Err(CamError::Parse("config root must be a JSON object".into()));
        }
        let mut cfg: SimConfig = serde_path_to_error::deserialize(&raw).map_err(|e| {
            let path = e.path().to_string();
            CamError::Config {
                path: if path == "." { "<root>".into() } else { path },
                msg: e.into_inner().to_string(),
            }
        })?;
        let mut keys = Vec::new();
        leaf_keys("", &raw, &mut keys);
        cfg.explicit_keys = keys.into_iter().filter(|k| !k.is_empty()).collect();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.device.memcap().validate("device.")?;
        self.device.fefet().validate("device.")?;
        if !(self.array.c_fixed >= 0.0 && self.array.c_fixed.is_finite()) {
            return Err(CamError::config("array.c_fixed", "must be finite and >= 0"));
        }
        self.bias.validate("bias.")?;
        self.driver.validate("driver.")?;
        self.transient.validate("transient.")?;
        self.vd.validate("vd.")?;
        self.variation.validate("variation.")?;
        self.tdc(&self.circuit()).validate("tdc.")?;
        self.experiment.validate("experiment.")
    }

    pub fn circuit(&self) -> Circuit {
        Circuit {
            memcap: self.device.memcap(),
            fefet: self.device.fefet(),
            c_fixed: self.array.c_fixed,
            bias: self.bias,
            driver: self.driver,
            transient: self.transient,
            vd: self.vd,
        }
    }

    pub fn tdc(&self, circuit: &Circuit) -> TdcParams {
        let d = circuit.default_tdc(self.experiment.n_bits);
        TdcParams {
            t_offset: self.tdc.t_offset.unwrap_or(d.t_offset),
            t_lsb: self.tdc.t_lsb.unwrap_or(d.t_lsb),
        }
    }

    /// Copy with `t_lsb` filled in, for echoing into outputs.
    pub fn resolved(&self) -> SimConfig {
        let mut out = self.clone();
        let tdc = self.tdc(&self.circuit());
        out.tdc.t_offset = Some(tdc.t_offset);
        out.tdc.t_lsb = Some(tdc.t_lsb);
        out
    }

    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit_keys
            .iter()
            .any(|k| k == key || k.starts_with(&format!("{key}.")))
    }

    /// Origin of every leaf key in the resolved schema.
    pub fn provenance(&self) -> BTreeMap<String, Provenance> {
        let full = serde_json::to_value(SimConfig::default()).expect("config serializes");
        let mut keys = Vec::new();
        leaf_keys("", &full, &mut keys);
        keys.into_iter()
            .map(|k| {
                let p = if self.is_explicit(&k) {
                    Provenance::User
                } else if PAPER_KEYS.contains(&k.as_str()) {
                    Provenance::DefaultPaper
                } else {
                    Provenance::DefaultNonPaper
                };
                (k, p)
            })
            .collect()
    }

    /// Seed precedence: command line, then the config file, then
    /// `CAMSIM_SEED`, then the built-in default.
    pub fn resolve_seed(&self, cli: Option<u64>, env: Option<&str>) -> Result<u64> {
        if let Some(s) = cli {
            return Ok(s);
        }
        if self.is_explicit("experiment.seed") {
            return Ok(self.experiment.seed);
        }
        if let Some(text) = env {
            return text
                .trim()
                .parse()
                .map_err(|_| CamError::config(SEED_ENV_VAR, format!("not a u64: {text:?}")));
        }
        Ok(self.experiment.seed)
    }
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CamError::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    SimConfig::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_all_defaults() {
        let cfg = SimConfig::from_json_str("{}").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(cfg.circuit(), Circuit::default());
        assert!(cfg.provenance().values().all(|p| *p != Provenance::User));
    }

    #[test]
    fn partial_bias_override() {
        let cfg = SimConfig::from_json_str(r#"{"bias": {"v_write_1": 6.5}}"#).unwrap();
        assert_eq!(cfg.bias, BiasScheme::default());
        let prov = cfg.provenance();
        assert_eq!(prov["bias.v_write_1"], Provenance::User);
        assert_eq!(prov["bias.v_write_0"], Provenance::DefaultPaper);
        assert_eq!(prov["device.c_hcs"], Provenance::DefaultNonPaper);
        assert_eq!(prov["variation.cov_i_on"], Provenance::DefaultNonPaper);
    }

    #[test]
    fn inverted_capacitance_rejected_with_path() {
        let err = SimConfig::from_json_str(r#"{"device": {"c_hcs": 0.5, "c_lcs": 1.0}}"#).unwrap_err();
        assert!(err.is_config_error());
        assert!(err.to_string().contains("device.c_hcs"), "{err}");
    }

    #[test]
    fn unknown_key_rejected_with_path() {
        let err = SimConfig::from_json_str(r#"{"driver": {"r_drvie": 1e4}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("driver"), "{msg}");
        assert!(msg.contains("r_drvie"), "{msg}");
        let err = SimConfig::from_json_str(r#"{"nonsense": 1}"#).unwrap_err();
        assert!(err.to_string().contains("nonsense"));
    }

    #[test]
    fn type_error_reports_path() {
        let err = SimConfig::from_json_str(r#"{"experiment": {"k_trials": "many"}}"#).unwrap_err();
        assert!(err.to_string().contains("experiment.k_trials"), "{err}");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SimConfig::from_json_str("{"), Err(CamError::Parse(_))));
        assert!(matches!(SimConfig::from_json_str("[]"), Err(CamError::Parse(_))));
    }

    #[test]
    fn invariant_violations_in_other_sections() {
        for (doc, key) in [
            (r#"{"driver": {"v_m": 1.5}}"#, "driver.v_m"),
            (r#"{"variation": {"cov_i_on": 1.2}}"#, "variation.cov_i_on"),
            (r#"{"experiment": {"hd_list": [0, 17]}}"#, "experiment.hd_list"),
            (r#"{"tdc": {"t_lsb": 0}}"#, "tdc.t_lsb"),
            (r#"{"vd": {"v_ref": 2.0}}"#, "vd.v_ref"),
        ] {
            let err = SimConfig::from_json_str(doc).unwrap_err();
            assert!(err.to_string().contains(key), "{doc}: {err}");
        }
    }

    #[test]
    fn seed_precedence() {
        let plain = SimConfig::default();
        let pinned = SimConfig::from_json_str(r#"{"experiment": {"seed": 9}}"#).unwrap();
        assert_eq!(pinned.resolve_seed(Some(1), Some("5")).unwrap(), 1);
        assert_eq!(pinned.resolve_seed(None, Some("5")).unwrap(), 9);
        assert_eq!(plain.resolve_seed(None, Some("5")).unwrap(), 5);
        assert_eq!(plain.resolve_seed(None, None).unwrap(), plain.experiment.seed);
        assert!(plain.resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn resolved_fills_tdc_lsb() {
        let cfg = SimConfig::default();
        let lsb = cfg.resolved().tdc.t_lsb.unwrap();
        assert!((lsb - 0.5 * 2f64.ln() * 10e3 * 9e-15).abs() < 1e-18);
    }
}
