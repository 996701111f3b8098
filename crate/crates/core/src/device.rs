//! Behavioral models for the ferroelectric memcapacitor cell and the
//! single-transistor ferroelectric cell used by the voltage-domain baseline.
//!
//! The memcapacitor C–V curve is a depletion floor plus two logistic
//! inversion branches (p-type at negative effective gate voltage, n-type at
//! positive). Polarization shifts the curve left or right by `v_shift`, which
//! is what turns the search bias into an XNOR of stored and query bits.

use serde::{Deserialize, Serialize};

use crate::error::{CamError, Result};

/// Nonvolatile polarization of a cell. `Pos` stores bit 1, `Neg` stores bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolarizationState {
    #[serde(rename = "P_POS")]
    Pos,
    #[serde(rename = "P_NEG")]
    Neg,
}

impl PolarizationState {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            PolarizationState::Pos
        } else {
            PolarizationState::Neg
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, PolarizationState::Pos)
    }
}

/// Nominal memcapacitor parameters. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemcapacitorParams {
    /// Low-capacitance (depletion) state, farads.
    pub c_lcs: f64,
    /// High-capacitance (inversion) state, farads.
    pub c_hcs: f64,
    /// Onset of the n-type inversion branch relative to `v_fb`.
    pub v_tn: f64,
    /// Onset magnitude of the p-type inversion branch relative to `v_fb`.
    pub v_tp: f64,
    /// Logistic transition width.
    pub slope_s: f64,
    /// Polarization-induced shift magnitude.
    pub v_shift: f64,
    /// Centre of the depletion window in gate-to-S/D voltage.
    pub v_fb: f64,
    /// Minimum |write amplitude| that switches polarization.
    pub v_coercive: f64,
    /// Minimum write pulse width, seconds.
    pub t_min_write: f64,
}

impl Default for MemcapacitorParams {
    fn default() -> Self {
        Self {
            c_lcs: 1e-15,
            c_hcs: 10e-15,
            v_tn: 0.65,
            v_tp: 0.65,
            slope_s: 0.025,
            v_shift: 0.65,
            v_fb: 0.85,
            v_coercive: 4.0,
            t_min_write: 100e-9,
        }
    }
}

impl MemcapacitorParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let key = |k: &str| format!("{prefix}{k}");
        check_finite(&key("c_lcs"), self.c_lcs)?;
        check_finite(&key("c_hcs"), self.c_hcs)?;
        if self.c_lcs <= 0.0 {
            return Err(CamError::config(key("c_lcs"), "must be > 0"));
        }
        if self.c_hcs <= self.c_lcs {
            return Err(CamError::config(
                key("c_hcs"),
                format!("c_hcs ({:e}) must exceed c_lcs ({:e})", self.c_hcs, self.c_lcs),
            ));
        }
        for (name, v) in [
            ("v_tn", self.v_tn),
            ("v_tp", self.v_tp),
            ("slope_s", self.slope_s),
            ("v_shift", self.v_shift),
            ("v_coercive", self.v_coercive),
            ("t_min_write", self.t_min_write),
        ] {
            check_finite(&key(name), v)?;
            if v <= 0.0 {
                return Err(CamError::config(key(name), "must be > 0"));
            }
        }
        check_finite(&key("v_fb"), self.v_fb)
    }
}

/// Two-level current model of the ambipolar ferroelectric transistor cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeFetParams {
    pub i_on: f64,
    pub i_off: f64,
}

impl Default for FeFetParams {
    fn default() -> Self {
        Self {
            i_on: 1e-6,
            i_off: 10e-12,
        }
    }
}

impl FeFetParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        check_finite(&format!("{prefix}i_on"), self.i_on)?;
        check_finite(&format!("{prefix}i_off"), self.i_off)?;
        if self.i_off < 0.0 {
            return Err(CamError::config(format!("{prefix}i_off"), "must be >= 0"));
        }
        if self.i_on <= self.i_off {
            return Err(CamError::config(
                format!("{prefix}i_on"),
                format!("i_on ({:e}) must exceed i_off ({:e})", self.i_on, self.i_off),
            ));
        }
        Ok(())
    }
}

/// Write and search biases. Defaults are the published bias table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BiasScheme {
    /// Common S/D voltage for query bit 1.
    pub v_search_1: f64,
    /// Common S/D voltage for query bit 0.
    pub v_search_0: f64,
    /// ML write amplitude for bit 1.
    pub v_write_1: f64,
    /// ML write amplitude for bit 0.
    pub v_write_0: f64,
    pub t_write: f64,
}

impl Default for BiasScheme {
    fn default() -> Self {
        Self {
            v_search_1: 0.3,
            v_search_0: -1.0,
            v_write_1: 6.5,
            v_write_0: -6.5,
            t_write: 500e-9,
        }
    }
}

impl BiasScheme {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (name, v) in [
            ("v_search_1", self.v_search_1),
            ("v_search_0", self.v_search_0),
            ("v_write_1", self.v_write_1),
            ("v_write_0", self.v_write_0),
            ("t_write", self.t_write),
        ] {
            check_finite(&format!("{prefix}{name}"), v)?;
        }
        if self.t_write < 0.0 {
            return Err(CamError::config(format!("{prefix}t_write"), "must be >= 0"));
        }
        Ok(())
    }

    /// S/D voltage applied for a query bit.
    pub fn search_voltage(&self, query: bool) -> f64 {
        if query {
            self.v_search_1
        } else {
            self.v_search_0
        }
    }

    pub fn write_amplitude(&self, bit: bool) -> f64 {
        if bit {
            self.v_write_1
        } else {
            self.v_write_0
        }
    }
}

fn check_finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CamError::config(path, "must be finite"))
    }
}

#[inline]
fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Small-signal gate capacitance at gate-to-S/D voltage `v_g_sd`.
pub fn capacitance(params: &MemcapacitorParams, state: PolarizationState, v_g_sd: f64) -> Result<f64> {
    if !v_g_sd.is_finite() {
        return Err(CamError::Domain(format!("non-finite gate voltage {v_g_sd}")));
    }
    let shift = match state {
        PolarizationState::Pos => params.v_shift,
        PolarizationState::Neg => -params.v_shift,
    };
    let v_eff = (v_g_sd - params.v_fb) + shift;
    let n_branch = logistic((v_eff - params.v_tn) / params.slope_s);
    let p_branch = logistic((-v_eff - params.v_tp) / params.slope_s);
    Ok(params.c_lcs + (params.c_hcs - params.c_lcs) * (n_branch + p_branch))
}

/// All-or-nothing polarization switching.
pub fn apply_write_pulse(
    state: PolarizationState,
    amplitude: f64,
    width: f64,
    params: &MemcapacitorParams,
) -> PolarizationState {
    if width < params.t_min_write {
        return state;
    }
    if amplitude >= params.v_coercive {
        PolarizationState::Pos
    } else if amplitude <= -params.v_coercive {
        PolarizationState::Neg
    } else {
        state
    }
}

/// Physical-mode cell capacitance seen by the match line at `v_ml`.
pub fn effective_cell_capacitance(
    params: &MemcapacitorParams,
    stored: bool,
    query: bool,
    bias: &BiasScheme,
    v_ml: f64,
) -> Result<f64> {
    let v_sd = bias.search_voltage(query);
    capacitance(params, PolarizationState::from_bit(stored), v_ml - v_sd)
}

/// Mismatch conducts `i_on`, match leaks `i_off`.
pub fn fefet_current(params: &FeFetParams, stored: bool, query: bool) -> f64 {
    if stored != query {
        params.i_on
    } else {
        params.i_off
    }
}
