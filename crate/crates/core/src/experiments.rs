//! Seeded experiment pipelines: HD sweeps, Monte Carlo delay statistics,
//! nearest-neighbor search accuracy, the cell-area table, and the built-in
//! oracle checks.
//!
//! Every pipeline is a pure function of its inputs. Random numbers come from
//! independent ChaCha streams keyed by `(seed, stream id)`, so trials can run
//! on any number of threads and still merge to identical results.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{build_ml_load, hamming_distance, Bits, CamWord, LoadMode, SearchQuery};
use crate::device::{effective_cell_capacitance, BiasScheme, FeFetParams, MemcapacitorParams};
use crate::error::{CamError, Result};
use crate::readout::{
    calibrate_hd_map, estimate_hd, sensing_margin, tdc_quantize, DelayDistribution, HdAccuracy, HdCalibration,
    MarginReport, TdcParams,
};
use crate::transient::{
    closed_form_delay, closed_form_delay_for_edge, delay_per_farad, integrate_delay, simulate_search_transient,
    vd_discharge_delay, DelayResult, InverterDriverParams, TransientConfig, VdReadoutParams,
};
use crate::variation::{sample_cell_params, stream_rng, SampledCellParams, VariationSpec};

// Stream ids. Trial streams start at TRIAL_STREAM_BASE.
const STREAM_PATTERN: u64 = 1;
const STREAM_NN_WORDS: u64 = 2;
const STREAM_NN_DEVICES: u64 = 3;
const STREAM_NN_QUERIES: u64 = 4;
const TRIAL_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    ClosedForm,
    TableTransient,
    PhysicalTransient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Td,
    Vd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n_bits: usize,
    pub m_words: usize,
    pub hd_list: Vec<usize>,
    pub k_trials: usize,
    pub seed: u64,
    pub model_mode: ModelMode,
    pub scheme: Scheme,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_bits: 16,
            m_words: 32,
            hd_list: (0..=8).collect(),
            k_trials: 1000,
            seed: 20240101,
            model_mode: ModelMode::TableTransient,
            scheme: Scheme::Td,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if self.n_bits == 0 {
            return Err(CamError::config(format!("{prefix}n_bits"), "must be >= 1"));
        }
        if self.k_trials == 0 {
            return Err(CamError::config(format!("{prefix}k_trials"), "must be >= 1"));
        }
        if self.m_words == 0 {
            return Err(CamError::config(format!("{prefix}m_words"), "must be >= 1"));
        }
        if self.hd_list.is_empty() {
            return Err(CamError::config(format!("{prefix}hd_list"), "must not be empty"));
        }
        if let Some(&hd) = self.hd_list.iter().find(|&&hd| hd > self.n_bits) {
            return Err(CamError::config(
                format!("{prefix}hd_list"),
                format!("HD {hd} exceeds n_bits {}", self.n_bits),
            ));
        }
        Ok(())
    }
}

/// Everything needed to turn a word and query into a delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circuit {
    pub memcap: MemcapacitorParams,
    pub fefet: FeFetParams,
    pub c_fixed: f64,
    pub bias: BiasScheme,
    pub driver: InverterDriverParams,
    pub transient: TransientConfig,
    pub vd: VdReadoutParams,
}

impl Default for Circuit {
    fn default() -> Self {
        Self {
            memcap: MemcapacitorParams::default(),
            fefet: FeFetParams::default(),
            c_fixed: 5e-15,
            bias: BiasScheme::default(),
            driver: InverterDriverParams::default(),
            transient: TransientConfig::default(),
            vd: VdReadoutParams::default(),
        }
    }
}

impl Circuit {
    pub fn nominal_cell(&self) -> SampledCellParams {
        SampledCellParams::nominal(self.memcap, self.fefet)
    }

    pub fn nominal_word(&self, stored: &Bits) -> Result<CamWord> {
        let cell = self.nominal_cell();
        CamWord::from_bits(stored, |_| cell, self.c_fixed)
    }

    /// Nominal TD delay increase per unit HD under the table-mode load.
    pub fn td_slope_per_hd(&self) -> f64 {
        delay_per_farad(&self.driver, self.transient.edge) * (self.memcap.c_hcs - self.memcap.c_lcs)
    }

    /// Default converter for `n_bits`-wide words: counting starts at the
    /// nominal HD-0 delay and the LSB is half the nominal TD slope, so the
    /// midpoints between adjacent nominal delays land on bin edges.
    pub fn default_tdc(&self, n_bits: usize) -> TdcParams {
        let c0 = self.c_fixed + n_bits as f64 * self.memcap.c_lcs;
        TdcParams {
            t_offset: self.driver.t_inv + delay_per_farad(&self.driver, self.transient.edge) * c0,
            t_lsb: 0.5 * self.td_slope_per_hd(),
        }
    }

    /// Search delay of one word for the given scheme and model.
    pub fn word_delay(
        &self,
        word: &CamWord,
        query: &SearchQuery,
        scheme: Scheme,
        mode: ModelMode,
    ) -> Result<DelayResult> {
        match scheme {
            Scheme::Vd => vd_discharge_delay(word, query, &self.vd, &self.transient),
            Scheme::Td => match mode {
                ModelMode::ClosedForm => {
                    let c = build_ml_load(word, query, &self.bias, 0.0, LoadMode::Table)?;
                    closed_form_delay_for_edge(c, &self.driver, self.transient.edge)
                }
                ModelMode::TableTransient => simulate_search_transient(
                    word,
                    query,
                    &self.bias,
                    &self.driver,
                    &self.transient,
                    LoadMode::Table,
                    false,
                ),
                ModelMode::PhysicalTransient => simulate_search_transient(
                    word,
                    query,
                    &self.bias,
                    &self.driver,
                    &self.transient,
                    LoadMode::Physical,
                    false,
                ),
            },
        }
    }
}

/// Random stored pattern fixed by the seed.
pub fn stored_pattern(seed: u64, n_bits: usize) -> Bits {
    let mut rng = stream_rng(seed, STREAM_PATTERN);
    Bits((0..n_bits).map(|_| rng.random::<bool>()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub hd: usize,
    pub delay_s: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub stored: String,
    pub points: Vec<SweepPoint>,
    pub calibration: HdCalibration,
}

/// Delay versus exact HD for one nominal word. Queries flip a prefix of the
/// stored pattern. Non-converged points are reported but left out of the fit.
pub fn run_hd_sweep(cfg: &ExperimentConfig, circuit: &Circuit) -> Result<SweepResult> {
    cfg.validate("experiment.")?;
    let stored = stored_pattern(cfg.seed, cfg.n_bits);
    let word = circuit.nominal_word(&stored)?;
    let points = cfg
        .hd_list
        .par_iter()
        .map(|&hd| {
            let r = circuit.word_delay(&word, &stored.flip_prefix(hd), cfg.scheme, cfg.model_mode)?;
            Ok(SweepPoint {
                hd,
                delay_s: r.delay,
                converged: r.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_points: Vec<(usize, f64)> = points
        .iter()
        .filter(|p| p.converged)
        .map(|p| (p.hd, p.delay_s))
        .collect();
    let calibration = calibrate_hd_map(&fit_points).map_err(|e| match e {
        CamError::DegenerateFit(msg) => {
            CamError::DegenerateFit(format!("HD sweep over {:?} cannot be calibrated: {msg}", cfg.hd_list))
        }
        other => other,
    })?;
    Ok(SweepResult {
        stored: stored.to_string(),
        points,
        calibration,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonDischarge {
    pub hd: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub scheme: Scheme,
    /// Raw delays per HD; non-discharging trials are excluded.
    pub distributions: Vec<DelayDistribution>,
    /// `trials[t][i]` is the delay of trial `t` at `hd_list[i]`, `None` if the
    /// line never crossed the threshold.
    pub trials: Vec<Vec<Option<f64>>>,
    /// Noiseless per-HD delays (`None` for non-discharge) used as class centres.
    pub reference: Vec<(usize, Option<f64>)>,
    /// Separability over TDC-quantized distributions with at least 2 samples.
    pub margin: MarginReport,
    /// Classification accuracy over all K trials per HD, counting
    /// non-discharge as a decision for the lowest HD.
    pub accuracy: Vec<HdAccuracy>,
    pub match_flags: Vec<NonDischarge>,
}

impl MonteCarloResult {
    pub fn accuracy_at(&self, hd: usize) -> Option<f64> {
        self.accuracy.iter().find(|a| a.hd == hd).map(|a| a.accuracy)
    }
}

fn sample_word(stored: &Bits, circuit: &Circuit, var: &VariationSpec, seed: u64, stream: u64) -> Result<CamWord> {
    let mut rng = stream_rng(seed, stream);
    let cells = (0..stored.len())
        .map(|_| sample_cell_params(&circuit.memcap, &circuit.fefet, var, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    CamWord::from_bits(stored, |i| cells[i], circuit.c_fixed)
}

/// Per-HD delay statistics under device variation.
pub fn run_monte_carlo(
    cfg: &ExperimentConfig,
    circuit: &Circuit,
    var: &VariationSpec,
    tdc: &TdcParams,
) -> Result<MonteCarloResult> {
    cfg.validate("experiment.")?;
    var.validate("variation.")?;
    tdc.validate("tdc.")?;
    let mut hds = cfg.hd_list.clone();
    hds.sort_unstable();
    hds.dedup();
    let stored = stored_pattern(cfg.seed, cfg.n_bits);
    let queries: Vec<Bits> = hds.iter().map(|&hd| stored.flip_prefix(hd)).collect();

    let nominal = circuit.nominal_word(&stored)?;
    let reference = hds
        .iter()
        .zip(&queries)
        .map(|(&hd, q)| {
            let r = circuit.word_delay(&nominal, q, cfg.scheme, cfg.model_mode)?;
            Ok((hd, r.converged.then_some(r.delay)))
        })
        .collect::<Result<Vec<_>>>()?;

    let trials = (0..cfg.k_trials)
        .into_par_iter()
        .map(|t| {
            let word = sample_word(&stored, circuit, var, cfg.seed, TRIAL_STREAM_BASE + t as u64)?;
            queries
                .iter()
                .map(|q| {
                    let r = circuit.word_delay(&word, q, cfg.scheme, cfg.model_mode)?;
                    Ok(r.converged.then_some(r.delay))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut distributions = Vec::new();
    let mut match_flags = Vec::new();
    for (i, &hd) in hds.iter().enumerate() {
        let samples: Vec<f64> = trials.iter().filter_map(|row| row[i]).collect();
        let flagged = cfg.k_trials - samples.len();
        if flagged > 0 {
            match_flags.push(NonDischarge { hd, count: flagged });
        }
        if !samples.is_empty() {
            distributions.push(DelayDistribution::new(hd, samples)?);
        }
    }

    // Samples go through the converter and are read back at bin centres;
    // class centres are the unquantized noiseless delays.
    let quantize = |d: f64| tdc.bin_centre(d);
    let classes: Vec<(usize, f64)> = reference.iter().filter_map(|&(hd, d)| d.map(|d| (hd, d))).collect();
    let non_discharge_class = reference.iter().find(|r| r.1.is_none()).map(|r| r.0);

    let margin_dists: Vec<DelayDistribution> = distributions
        .iter()
        .filter(|d| d.samples.len() >= 2 && classes.iter().any(|c| c.0 == d.hd))
        .map(|d| DelayDistribution::new(d.hd, d.samples.iter().map(|&x| quantize(x)).collect()))
        .collect::<Result<_>>()?;
    let margin_ref: Vec<f64> = margin_dists
        .iter()
        .map(|d| classes.iter().find(|c| c.0 == d.hd).map(|c| c.1).unwrap())
        .collect();
    let margin = sensing_margin(&margin_dists, Some(&margin_ref))?;

    let accuracy = hds
        .iter()
        .enumerate()
        .map(|(i, &hd)| {
            let correct = trials
                .iter()
                .filter(|row| {
                    let decided = match row[i] {
                        Some(d) => crate::readout::classify(quantize(d), &classes),
                        None => non_discharge_class.or(hds.first().copied()),
                    };
                    decided == Some(hd)
                })
                .count();
            HdAccuracy {
                hd,
                accuracy: correct as f64 / cfg.k_trials as f64,
            }
        })
        .collect();

    Ok(MonteCarloResult {
        scheme: cfg.scheme,
        distributions,
        trials,
        reference,
        margin,
        accuracy,
        match_flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnResult {
    pub scheme: Scheme,
    pub m_words: usize,
    pub trials: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Sort key for "closest row" under each scheme: smaller is closer.
fn nn_key(scheme: Scheme, r: &DelayResult) -> f64 {
    match (scheme, r.converged) {
        (Scheme::Td, true) => r.delay,
        (Scheme::Td, false) => f64::INFINITY,
        // Slow or absent discharge means fewer mismatches.
        (Scheme::Vd, true) => -r.delay,
        (Scheme::Vd, false) => f64::NEG_INFINITY,
    }
}

/// Nearest-neighbor search over `m_words` random rows with `k_trials` random
/// queries. Devices are sampled once for the whole array.
pub fn run_nn_search(cfg: &ExperimentConfig, circuit: &Circuit, var: &VariationSpec) -> Result<NnResult> {
    cfg.validate("experiment.")?;
    var.validate("variation.")?;
    let n = cfg.n_bits;
    let mut word_rng = stream_rng(cfg.seed, STREAM_NN_WORDS);
    let rows: Vec<Bits> = (0..cfg.m_words)
        .map(|_| Bits((0..n).map(|_| word_rng.random::<bool>()).collect()))
        .collect();
    let mut dev_rng = stream_rng(cfg.seed, STREAM_NN_DEVICES);
    let words = rows
        .iter()
        .map(|r| {
            let cells = (0..n)
                .map(|_| sample_cell_params(&circuit.memcap, &circuit.fefet, var, &mut dev_rng))
                .collect::<Result<Vec<_>>>()?;
            CamWord::from_bits(r, |i| cells[i], circuit.c_fixed)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut q_rng = stream_rng(cfg.seed, STREAM_NN_QUERIES);
    let queries: Vec<Bits> = (0..cfg.k_trials)
        .map(|_| Bits((0..n).map(|_| q_rng.random::<bool>()).collect()))
        .collect();

    let outcomes = queries
        .par_iter()
        .map(|q| {
            let mut best = 0;
            let mut best_key = f64::INFINITY;
            for (i, w) in words.iter().enumerate() {
                let key = nn_key(cfg.scheme, &circuit.word_delay(w, q, cfg.scheme, cfg.model_mode)?);
                if key < best_key || i == 0 {
                    best = i;
                    best_key = key;
                }
            }
            let hds = rows
                .iter()
                .map(|r| hamming_distance(r, q))
                .collect::<Result<Vec<_>>>()?;
            let min_hd = *hds.iter().min().expect("m_words >= 1");
            Ok(hds[best] == min_hd)
        })
        .collect::<Result<Vec<bool>>>()?;
    let correct = outcomes.iter().filter(|&&c| c).count();
    Ok(NnResult {
        scheme: cfg.scheme,
        m_words: cfg.m_words,
        trials: cfg.k_trials,
        correct,
        accuracy: correct as f64 / cfg.k_trials as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaEntry {
    pub structure_name: String,
    /// Cell area in F² (F = half pitch).
    pub area_f2: f64,
    pub ratio_vs_this_work: f64,
}

/// Published TD CAM cell areas.
pub fn area_report() -> Vec<AreaEntry> {
    const THIS_WORK: f64 = 56.0;
    [("5T1C", 304.0), ("3T", 200.0), ("1C (this work)", THIS_WORK)]
        .into_iter()
        .map(|(name, area)| AreaEntry {
            structure_name: name.to_string(),
            area_f2: area,
            ratio_vs_this_work: area / THIS_WORK,
        })
        .collect()
}

/// One row of a single-word or array search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub row: usize,
    pub stored: String,
    pub hd: usize,
    pub delay_s: f64,
    pub converged: bool,
    pub tdc_code: u64,
    pub estimated_hd: usize,
}

/// Search nominal words holding `rows` and decode each delay back to an HD
/// using a noiseless calibration sweep of the same width.
pub fn search_rows(
    circuit: &Circuit,
    rows: &[Bits],
    query: &Bits,
    scheme: Scheme,
    mode: ModelMode,
    tdc: &TdcParams,
) -> Result<Vec<SearchRow>> {
    let Some(n) = rows.first().map(Bits::len) else {
        return Ok(Vec::new());
    };
    let cal = match scheme {
        Scheme::Td => {
            let cfg = ExperimentConfig {
                n_bits: n,
                hd_list: (0..=n).collect(),
                scheme,
                model_mode: mode,
                ..Default::default()
            };
            Some(run_hd_sweep(&cfg, circuit)?.calibration)
        }
        Scheme::Vd => None,
    };
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let hd = hamming_distance(r, query)?;
            let word = circuit.nominal_word(r)?;
            let res = circuit.word_delay(&word, query, scheme, mode)?;
            let estimated_hd = match (scheme, res.converged, cal) {
                (Scheme::Vd, false, _) => 0,
                (Scheme::Vd, true, _) => vd_estimate_hd(circuit, res.delay, n),
                (Scheme::Td, _, Some(c)) => estimate_hd(res.delay, &c).min(n),
                (Scheme::Td, _, None) => 0,
            };
            Ok(SearchRow {
                row: i,
                stored: r.to_string(),
                hd,
                delay_s: res.delay,
                converged: res.converged,
                tdc_code: tdc_quantize(res.delay, tdc),
                estimated_hd,
            })
        })
        .collect()
}

/// Invert the nominal VD discharge law `delay = Q / (k·i_on + (n−k)·i_off)`.
fn vd_estimate_hd(circuit: &Circuit, delay: f64, n: usize) -> usize {
    let q = circuit.vd.c_ml_vd * (circuit.vd.v_precharge - circuit.vd.v_ref);
    let (i_on, i_off) = (circuit.fefet.i_on, circuit.fefet.i_off);
    let k = (q / delay - n as f64 * i_off) / (i_on - i_off);
    (k.round().max(0.0) as usize).min(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// XNOR truth table of the physical C–V model over the full ML swing.
pub fn check_truth_table(circuit: &Circuit) -> OracleCheck {
    let mc = &circuit.memcap;
    let steps = (circuit.driver.v_dd / 0.01).round() as usize;
    let mut worst: f64 = 0.0;
    let mut error = None;
    for stored in [false, true] {
        for query in [false, true] {
            let target = if stored == query { mc.c_lcs } else { mc.c_hcs };
            for i in 0..=steps {
                let v_ml = i as f64 * 0.01;
                match effective_cell_capacitance(mc, stored, query, &circuit.bias, v_ml) {
                    Ok(c) => worst = worst.max((c - target).abs() / target),
                    Err(e) => error = Some(e.to_string()),
                }
            }
        }
    }
    OracleCheck {
        name: "truth_table".into(),
        passed: error.is_none() && worst <= 0.05,
        detail: error.unwrap_or_else(|| format!("worst relative deviation {worst:.4} (limit 0.05)")),
    }
}

/// Table-mode transient against the closed form for the given loads.
pub fn check_integrator(circuit: &Circuit, loads: &[f64]) -> OracleCheck {
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for &c in loads {
        let num = integrate_delay(|_| Ok(c), &circuit.driver, &circuit.transient, false);
        let cf = closed_form_delay_for_edge(c, &circuit.driver, circuit.transient.edge);
        match (num, cf) {
            (Ok(n), Ok(a)) if n.converged => worst = worst.max((n.delay - a.delay).abs() / a.delay),
            (Ok(_), Ok(_)) => failure = Some(format!("no convergence at c_ml = {c:e} F")),
            (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
        }
    }
    OracleCheck {
        name: "integrator_vs_closed_form".into(),
        passed: failure.is_none() && worst < 5e-3,
        detail: failure.unwrap_or_else(|| format!("worst relative error {worst:.2e} (limit 5e-3)")),
    }
}

/// Noiseless table-mode pipeline decodes the exact HD for every query
/// against a fixed `n`-bit word.
pub fn check_hd_equivalence(circuit: &Circuit, seed: u64, n: usize) -> OracleCheck {
    let run = || -> Result<(usize, usize)> {
        let cfg = ExperimentConfig {
            n_bits: n,
            hd_list: (0..=n).collect(),
            seed,
            model_mode: ModelMode::TableTransient,
            scheme: Scheme::Td,
            ..Default::default()
        };
        let cal = run_hd_sweep(&cfg, circuit)?.calibration;
        let stored = stored_pattern(seed, n);
        let word = circuit.nominal_word(&stored)?;
        let total = 1usize << n;
        let hits = (0..total as u64)
            .into_par_iter()
            .map(|q| {
                let query = Bits::from_u64(q, n);
                let d = circuit.word_delay(&word, &query, Scheme::Td, ModelMode::TableTransient)?;
                Ok(estimate_hd(d.delay, &cal) == hamming_distance(&stored, &query)?)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok((hits.iter().filter(|&&h| h).count(), total))
    };
    match run() {
        Ok((hits, total)) => OracleCheck {
            name: format!("hd_equivalence_n{n}"),
            passed: hits == total,
            detail: format!("{hits}/{total} exact"),
        },
        Err(e) => OracleCheck {
            name: format!("hd_equivalence_n{n}"),
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Load set used by the integrator check: HD 0, 0 and 8, 16 for N = 16, and
/// a single-cell line.
pub fn default_integrator_loads(circuit: &Circuit) -> Vec<f64> {
    let m = &circuit.memcap;
    let n = 16.0;
    vec![
        circuit.c_fixed + m.c_lcs,
        circuit.c_fixed + n * m.c_lcs,
        circuit.c_fixed + 8.0 * m.c_lcs + 8.0 * m.c_hcs,
        circuit.c_fixed + n * m.c_hcs,
    ]
}

pub fn run_validation(circuit: &Circuit, seed: u64) -> Vec<OracleCheck> {
    vec![
        check_truth_table(circuit),
        check_integrator(circuit, &default_integrator_loads(circuit)),
        check_hd_equivalence(circuit, seed, 8),
    ]
}

/// Closed-form TD delay at nominal parameters for HD `k` of `n` bits.
pub fn nominal_td_delay(circuit: &Circuit, n: usize, k: usize) -> Result<f64> {
    let m = &circuit.memcap;
    let c = circuit.c_fixed + (n - k) as f64 * m.c_lcs + k as f64 * m.c_hcs;
    Ok(closed_form_delay(c, &circuit.driver)?.delay)
}
