//! Match-line transient models.
//!
//! The first inverter is an ideal rail behind `r_drive`; the second is a
//! threshold comparator at `v_m` followed by a fixed `t_inv`. The ML node
//! obeys `C(v) dv/dt = (v_target - v) / r_drive`, integrated with classic
//! fixed-step RK4 and refined by step halving until the delay settles.

use serde::{Deserialize, Serialize};

use crate::array::{build_ml_load, CamWord, LoadMode, SearchQuery};
use crate::device::{fefet_current, BiasScheme};
use crate::error::{CamError, Result};

const MAX_HALVINGS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InverterDriverParams {
    pub v_dd: f64,
    pub r_drive: f64,
    /// Switching threshold of the sensing inverter.
    pub v_m: f64,
    /// Intrinsic delay of the inverter pair.
    pub t_inv: f64,
}

impl Default for InverterDriverParams {
    fn default() -> Self {
        Self {
            v_dd: 1.0,
            r_drive: 10e3,
            v_m: 0.5,
            t_inv: 10e-12,
        }
    }
}

impl InverterDriverParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let finite = [self.v_dd, self.r_drive, self.v_m, self.t_inv]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(CamError::config(prefix.trim_end_matches('.'), "values must be finite"));
        }
        if !(self.v_m > 0.0 && self.v_m < self.v_dd) {
            return Err(CamError::config(format!("{prefix}v_m"), "require 0 < v_m < v_dd"));
        }
        if self.r_drive <= 0.0 {
            return Err(CamError::config(format!("{prefix}r_drive"), "must be > 0"));
        }
        if self.t_inv < 0.0 {
            return Err(CamError::config(format!("{prefix}t_inv"), "must be >= 0"));
        }
        Ok(())
    }
}

/// Which ML transition is timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    /// ML discharges from `v_dd` toward ground.
    #[default]
    Falling,
    Rising,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransientConfig {
    pub dt_init: f64,
    pub rel_tol: f64,
    pub t_max: f64,
    pub edge: Edge,
}

impl Default for TransientConfig {
    fn default() -> Self {
        Self {
            dt_init: 1e-12,
            rel_tol: 1e-3,
            t_max: 1e-6,
            edge: Edge::Falling,
        }
    }
}

impl TransientConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.dt_init > 0.0 && self.dt_init.is_finite()) {
            return Err(CamError::config(format!("{prefix}dt_init"), "must be > 0"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CamError::config(format!("{prefix}rel_tol"), "require 0 < rel_tol < 1"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CamError::config(format!("{prefix}t_max"), "must be > 0"));
        }
        Ok(())
    }
}

/// Sampled voltage trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Waveform {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Extracted propagation delay. When `converged` is false the line never
/// crossed the threshold and `delay` holds the timeout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayResult {
    pub delay: f64,
    pub waveform: Option<Waveform>,
    pub converged: bool,
}

impl DelayResult {
    fn timeout(t_max: f64) -> Self {
        Self {
            delay: t_max,
            waveform: None,
            converged: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VdReadoutParams {
    pub v_precharge: f64,
    /// Sense threshold.
    pub v_ref: f64,
    /// Fixed match-line capacitance of the VD word.
    pub c_ml_vd: f64,
}

impl Default for VdReadoutParams {
    fn default() -> Self {
        Self {
            v_precharge: 1.0,
            v_ref: 0.5,
            c_ml_vd: 50e-15,
        }
    }
}

impl VdReadoutParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.v_ref >= 0.0 && self.v_ref < self.v_precharge && self.v_precharge.is_finite()) {
            return Err(CamError::config(
                format!("{prefix}v_ref"),
                "require 0 <= v_ref < v_precharge",
            ));
        }
        if !(self.c_ml_vd > 0.0 && self.c_ml_vd.is_finite()) {
            return Err(CamError::config(format!("{prefix}c_ml_vd"), "must be > 0"));
        }
        Ok(())
    }
}

/// Fraction of an RC time constant needed to reach the threshold.
fn threshold_log(driver: &InverterDriverParams, edge: Edge) -> f64 {
    match edge {
        Edge::Falling => (driver.v_dd / driver.v_m).ln(),
        Edge::Rising => (driver.v_dd / (driver.v_dd - driver.v_m)).ln(),
    }
}

/// Per-unit-capacitance delay slope, `d(delay)/d(c_ml)`.
pub fn delay_per_farad(driver: &InverterDriverParams, edge: Edge) -> f64 {
    driver.r_drive * threshold_log(driver, edge)
}

/// Single-pole RC delay on the falling edge.
pub fn closed_form_delay(c_ml: f64, driver: &InverterDriverParams) -> Result<DelayResult> {
    closed_form_delay_for_edge(c_ml, driver, Edge::Falling)
}

pub fn closed_form_delay_for_edge(c_ml: f64, driver: &InverterDriverParams, edge: Edge) -> Result<DelayResult> {
    if driver.v_m >= driver.v_dd || driver.v_m <= 0.0 {
        return Err(CamError::Domain(format!(
            "switching threshold {} outside (0, {})",
            driver.v_m, driver.v_dd
        )));
    }
    if !(c_ml >= 0.0 && c_ml.is_finite()) {
        return Err(CamError::Domain(format!("invalid ML capacitance {c_ml}")));
    }
    Ok(DelayResult {
        delay: driver.t_inv + c_ml * delay_per_farad(driver, edge),
        waveform: None,
        converged: true,
    })
}

struct Pass {
    crossing: Option<f64>,
    waveform: Option<Waveform>,
}

fn rk4_pass<F>(load: &F, driver: &InverterDriverParams, cfg: &TransientConfig, dt: f64, record: bool) -> Result<Pass>
where
    F: Fn(f64) -> Result<f64>,
{
    let (v0, target) = match cfg.edge {
        Edge::Falling => (driver.v_dd, 0.0),
        Edge::Rising => (0.0, driver.v_dd),
    };
    let slope = |v: f64| -> Result<f64> {
        let c = load(v)?;
        if c.is_nan() || c <= 0.0 {
            return Err(CamError::Domain(format!("non-positive ML capacitance {c} at {v} V")));
        }
        Ok((target - v) / (driver.r_drive * c))
    };
    let settle = 0.01 * driver.v_dd;
    let mut waveform = record.then(|| Waveform {
        times: vec![0.0],
        values: vec![v0],
    });
    let mut t = 0.0;
    let mut v = v0;
    let mut crossing = None;
    let mut step = 0u64;
    while t < cfg.t_max {
        let k1 = slope(v)?;
        let k2 = slope(v + 0.5 * dt * k1)?;
        let k3 = slope(v + 0.5 * dt * k2)?;
        let k4 = slope(v + dt * k3)?;
        let v_next = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        step += 1;
        // Recompute from the step count so time does not drift.
        let t_next = step as f64 * dt;
        if crossing.is_none() && (v - driver.v_m) * (v_next - driver.v_m) <= 0.0 && v != v_next {
            crossing = Some(t + (driver.v_m - v) / (v_next - v) * dt);
        }
        t = t_next;
        v = v_next;
        if let Some(w) = waveform.as_mut() {
            w.times.push(t);
            w.values.push(v);
        }
        if crossing.is_some() && (waveform.is_none() || (target - v).abs() <= settle) {
            break;
        }
    }
    Ok(Pass { crossing, waveform })
}

/// Integrate the ML node against a voltage-dependent load and time the
/// threshold crossing, halving the step until successive delays agree.
pub fn integrate_delay<F>(
    load: F,
    driver: &InverterDriverParams,
    cfg: &TransientConfig,
    record: bool,
) -> Result<DelayResult>
where
    F: Fn(f64) -> Result<f64>,
{
    driver.validate("driver.")?;
    cfg.validate("transient.")?;
    let mut dt = cfg.dt_init;
    let first = rk4_pass(&load, driver, cfg, dt, record)?;
    let Some(mut prev) = first.crossing else {
        return Ok(DelayResult::timeout(cfg.t_max));
    };
    let mut waveform = first.waveform;
    for _ in 0..MAX_HALVINGS {
        dt *= 0.5;
        let pass = rk4_pass(&load, driver, cfg, dt, record)?;
        let Some(cur) = pass.crossing else {
            return Ok(DelayResult::timeout(cfg.t_max));
        };
        waveform = pass.waveform;
        if (cur - prev).abs() < cfg.rel_tol * cur {
            return Ok(DelayResult {
                delay: cur + driver.t_inv,
                waveform,
                converged: true,
            });
        }
        prev = cur;
    }
    Ok(DelayResult {
        delay: prev + driver.t_inv,
        waveform,
        converged: false,
    })
}

/// Time-domain search of one word.
pub fn simulate_search_transient(
    word: &CamWord,
    query: &SearchQuery,
    bias: &BiasScheme,
    driver: &InverterDriverParams,
    cfg: &TransientConfig,
    mode: LoadMode,
    record: bool,
) -> Result<DelayResult> {
    match mode {
        LoadMode::Table => {
            let c = build_ml_load(word, query, bias, 0.0, LoadMode::Table)?;
            integrate_delay(|_| Ok(c), driver, cfg, record)
        }
        LoadMode::Physical => {
            // Width check up front so the closure cannot fail on it.
            build_ml_load(word, query, bias, driver.v_dd, LoadMode::Physical)?;
            integrate_delay(
                |v| build_ml_load(word, query, bias, v, LoadMode::Physical),
                driver,
                cfg,
                record,
            )
        }
    }
}

/// Voltage-domain baseline: constant-current discharge of a precharged ML.
pub fn vd_discharge_delay(
    word: &CamWord,
    query: &SearchQuery,
    vd: &VdReadoutParams,
    cfg: &TransientConfig,
) -> Result<DelayResult> {
    if word.width() != query.len() {
        return Err(CamError::LengthMismatch {
            expected: word.width(),
            got: query.len(),
        });
    }
    let current: f64 = word
        .cells()
        .iter()
        .zip(query.as_slice())
        .map(|(cell, &q)| fefet_current(&cell.params.fefet, cell.state.bit(), q))
        .sum();
    if current <= 0.0 {
        return Ok(DelayResult::timeout(cfg.t_max));
    }
    let delay = vd.c_ml_vd * (vd.v_precharge - vd.v_ref) / current;
    if delay > cfg.t_max {
        return Ok(DelayResult::timeout(cfg.t_max));
    }
    Ok(DelayResult {
        delay,
        waveform: None,
        converged: true,
    })
}
