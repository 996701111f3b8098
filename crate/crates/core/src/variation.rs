//! Device-to-device variation: per-cell parameter sampling from
//! coefficient-of-variation specs, and the matching CoV estimator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::device::{FeFetParams, MemcapacitorParams};
use crate::error::{CamError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Distribution {
    NormalTruncated,
    Lognormal,
}

/// Coefficient of variation (σ/µ) per varied parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    pub cov_c_hcs: f64,
    pub cov_c_lcs: f64,
    pub cov_i_on: f64,
    pub cov_i_off: f64,
    pub distribution: Distribution,
}

impl Default for VariationSpec {
    fn default() -> Self {
        Self {
            cov_c_hcs: 0.03,
            cov_c_lcs: 0.03,
            cov_i_on: 0.15,
            cov_i_off: 0.30,
            distribution: Distribution::NormalTruncated,
        }
    }
}

impl VariationSpec {
    /// No variation at all.
    pub fn none() -> Self {
        Self {
            cov_c_hcs: 0.0,
            cov_c_lcs: 0.0,
            cov_i_on: 0.0,
            cov_i_off: 0.0,
            distribution: Distribution::NormalTruncated,
        }
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (name, cov) in [
            ("cov_c_hcs", self.cov_c_hcs),
            ("cov_c_lcs", self.cov_c_lcs),
            ("cov_i_on", self.cov_i_on),
            ("cov_i_off", self.cov_i_off),
        ] {
            if !cov.is_finite() || cov < 0.0 {
                return Err(CamError::config(
                    format!("{prefix}{name}"),
                    "CoV must be finite and >= 0",
                ));
            }
            if self.distribution == Distribution::NormalTruncated && cov >= 1.0 {
                return Err(CamError::config(
                    format!("{prefix}{name}"),
                    "CoV >= 1 is not supported with NORMAL_TRUNCATED",
                ));
            }
        }
        Ok(())
    }
}

/// One cell's realized device parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledCellParams {
    pub memcap: MemcapacitorParams,
    pub fefet: FeFetParams,
}

impl SampledCellParams {
    pub fn nominal(memcap: MemcapacitorParams, fefet: FeFetParams) -> Self {
        Self { memcap, fefet }
    }
}

/// Deterministic stream for `(seed, stream)`; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw<R: Rng + ?Sized>(rng: &mut R, base: f64, cov: f64, dist: Distribution) -> f64 {
    // Always consume at least one normal so CoV sweeps share random numbers.
    let z: f64 = rng.sample(StandardNormal);
    if cov == 0.0 || base == 0.0 {
        return base;
    }
    match dist {
        Distribution::NormalTruncated => {
            let mut v = base * (1.0 + cov * z);
            while v <= 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                v = base * (1.0 + cov * z);
            }
            v
        }
        Distribution::Lognormal => {
            let sigma2 = (1.0 + cov * cov).ln();
            let mu = base.ln() - 0.5 * sigma2;
            (mu + sigma2.sqrt() * z).exp()
        }
    }
}

/// Draw one cell's parameters. Voltages and slopes copy through.
///
/// Draw order is c_hcs, c_lcs, i_on, i_off; a pair violating
/// `c_hcs > c_lcs` (or `i_on > i_off`) is redrawn as a pair.
pub fn sample_cell_params<R: Rng + ?Sized>(
    base_memcap: &MemcapacitorParams,
    base_fefet: &FeFetParams,
    spec: &VariationSpec,
    rng: &mut R,
) -> Result<SampledCellParams> {
    spec.validate("variation.")?;
    let dist = spec.distribution;
    let mut memcap = *base_memcap;
    loop {
        memcap.c_hcs = draw(rng, base_memcap.c_hcs, spec.cov_c_hcs, dist);
        memcap.c_lcs = draw(rng, base_memcap.c_lcs, spec.cov_c_lcs, dist);
        if memcap.c_hcs > memcap.c_lcs {
            break;
        }
    }
    let mut fefet = *base_fefet;
    loop {
        fefet.i_on = draw(rng, base_fefet.i_on, spec.cov_i_on, dist);
        fefet.i_off = draw(rng, base_fefet.i_off, spec.cov_i_off, dist);
        if fefet.i_on > fefet.i_off {
            break;
        }
    }
    Ok(SampledCellParams { memcap, fefet })
}

/// Sample standard deviation (n−1) over sample mean.
pub fn cov_estimate(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(CamError::Domain(format!(
            "CoV needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(CamError::Domain(format!("CoV undefined for mean {mean}")));
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt() / mean)
}
