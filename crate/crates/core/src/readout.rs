//! Time-to-digital readout, delay-to-HD calibration, and separability
//! statistics over per-HD delay distributions.

use serde::{Deserialize, Serialize};

use crate::error::{CamError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdcParams {
    pub t_offset: f64,
    /// Resolution limit.
    pub t_lsb: f64,
}

impl TdcParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.t_lsb > 0.0 && self.t_lsb.is_finite()) {
            return Err(CamError::config(format!("{prefix}t_lsb"), "must be > 0"));
        }
        if !self.t_offset.is_finite() {
            return Err(CamError::config(format!("{prefix}t_offset"), "must be finite"));
        }
        Ok(())
    }

    /// Start time of the bin for `code`.
    pub fn code_time(&self, code: u64) -> f64 {
        self.t_offset + code as f64 * self.t_lsb
    }

    /// Centre of the bin that `delay` converts to.
    pub fn bin_centre(&self, delay: f64) -> f64 {
        self.code_time(tdc_quantize(delay, self)) + 0.5 * self.t_lsb
    }
}

/// `floor((delay - t_offset) / t_lsb)`, clamped at zero.
pub fn tdc_quantize(delay: f64, tdc: &TdcParams) -> u64 {
    let x = ((delay - tdc.t_offset) / tdc.t_lsb).floor();
    if x <= 0.0 || x.is_nan() {
        0
    } else {
        x as u64
    }
}

/// Affine delay law `delay ≈ intercept + slope · hd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdCalibration {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

/// Ordinary least squares over `(hd, delay)` points.
pub fn calibrate_hd_map(points: &[(usize, f64)]) -> Result<HdCalibration> {
    if points.len() < 2 {
        return Err(CamError::DegenerateFit(format!(
            "need at least 2 distinct HD values, got {} point(s)",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let dx = x as f64 - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(CamError::DegenerateFit("all HD values are identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x as f64)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(HdCalibration {
        intercept,
        slope,
        r_squared,
    })
}

/// Nearest integer HD for `delay`; negative estimates clamp to 0.
pub fn estimate_hd(delay: f64, cal: &HdCalibration) -> usize {
    let k = ((delay - cal.intercept) / cal.slope).round();
    if k <= 0.0 || k.is_nan() {
        0
    } else {
        k as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayDistribution {
    pub hd: usize,
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n−1); zero for a single sample.
    pub std: f64,
}

impl DelayDistribution {
    pub fn new(hd: usize, samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CamError::Domain(format!("empty delay distribution for HD {hd}")));
        }
        let n = samples.len() as f64;
        let first = samples[0];
        let mean = if samples.iter().all(|&x| x == first) {
            first
        } else {
            samples.iter().sum::<f64>() / n
        };
        let std = if samples.len() < 2 {
            0.0
        } else {
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Ok(Self { hd, samples, mean, std })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMargin {
    /// Lower HD of the adjacent pair.
    pub hd: usize,
    /// Two-class z-score; `f64::INFINITY` for zero variance with distinct means.
    #[serde(with = "inf_as_string")]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdAccuracy {
    pub hd: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub per_adjacent_pair: Vec<PairMargin>,
    pub worst_pair: PairMargin,
    pub per_hd_accuracy: Vec<HdAccuracy>,
}

/// z-score of two adjacent classes. Direction-agnostic: delay may grow or
/// shrink with HD.
pub fn pair_z(lo: &DelayDistribution, hi: &DelayDistribution) -> f64 {
    let gap = (hi.mean - lo.mean).abs();
    let spread = (lo.std * lo.std + hi.std * hi.std).sqrt();
    if gap == 0.0 {
        0.0
    } else if spread == 0.0 {
        f64::INFINITY
    } else {
        gap / spread
    }
}

/// Index of the reference mean closest to `x`; ties go to the lower index.
fn nearest_class(x: f64, reference: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &m) in reference.iter().enumerate() {
        let d = (x - m).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Adjacent-pair separability plus per-HD classification accuracy.
///
/// Samples are assigned to the class with the nearest reference mean, which
/// is the midpoint-boundary rule for monotone means. `reference` defaults to
/// the sample means and must align with `dists` when given.
pub fn sensing_margin(dists: &[DelayDistribution], reference: Option<&[f64]>) -> Result<MarginReport> {
    if dists.len() < 2 {
        return Err(CamError::Domain("sensing margin needs at least 2 distributions".into()));
    }
    if dists.windows(2).any(|w| w[0].hd >= w[1].hd) {
        return Err(CamError::Domain(
            "distributions must be sorted by strictly increasing HD".into(),
        ));
    }
    if let Some(d) = dists.iter().find(|d| d.samples.len() < 2) {
        return Err(CamError::Domain(format!("HD {} has fewer than 2 samples", d.hd)));
    }
    let sample_means: Vec<f64> = dists.iter().map(|d| d.mean).collect();
    let reference = reference.unwrap_or(&sample_means);
    if reference.len() != dists.len() {
        return Err(CamError::LengthMismatch {
            expected: dists.len(),
            got: reference.len(),
        });
    }

    let per_adjacent_pair: Vec<PairMargin> = dists
        .windows(2)
        .map(|w| PairMargin {
            hd: w[0].hd,
            z: pair_z(&w[0], &w[1]),
        })
        .collect();
    let worst_pair = *per_adjacent_pair
        .iter()
        .min_by(|a, b| a.z.total_cmp(&b.z))
        .expect("at least one pair");

    let per_hd_accuracy = dists
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let correct = d.samples.iter().filter(|&&x| nearest_class(x, reference) == i).count();
            HdAccuracy {
                hd: d.hd,
                accuracy: correct as f64 / d.samples.len() as f64,
            }
        })
        .collect();

    Ok(MarginReport {
        per_adjacent_pair,
        worst_pair,
        per_hd_accuracy,
    })
}

/// Classify `delay` against per-class reference means.
pub fn classify(delay: f64, reference: &[(usize, f64)]) -> Option<usize> {
    let means: Vec<f64> = reference.iter().map(|r| r.1).collect();
    if means.is_empty() {
        return None;
    }
    Some(reference[nearest_class(delay, &means)].0)
}

mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected number or \"inf\", got {s:?}"
            ))),
        }
    }
}
