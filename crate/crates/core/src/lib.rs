//! Behavioral simulator for a time-domain content-addressable memory built
//! from single ferroelectric memcapacitor cells, alongside a single-transistor
//! voltage-domain CAM baseline.
//!
//! Match-line delay in the time-domain scheme grows linearly with the Hamming
//! distance between query and stored word, while the voltage-domain discharge
//! delay falls off as `1/HD`. The modules here cover the device models,
//! variation sampling, the array model, transient solvers, readout metrics,
//! and seeded experiments that compare the two schemes.

pub mod array;
pub mod config;
pub mod device;
pub mod error;
pub mod experiments;
pub mod output;
pub mod readout;
pub mod transient;
pub mod variation;

pub use array::{
    build_ml_load, hamming_distance, write_word, Bits, CamArray, CamWord, CellInstance, LoadMode, SearchQuery,
};
pub use config::{load_config, SimConfig};
pub use device::{
    apply_write_pulse, capacitance, effective_cell_capacitance, fefet_current, BiasScheme, FeFetParams,
    MemcapacitorParams, PolarizationState,
};
pub use error::{CamError, Result};
pub use experiments::{
    area_report, run_hd_sweep, run_monte_carlo, run_nn_search, AreaEntry, Circuit, ExperimentConfig, ModelMode, Scheme,
};
pub use readout::{
    calibrate_hd_map, estimate_hd, sensing_margin, tdc_quantize, DelayDistribution, HdCalibration, MarginReport,
    TdcParams,
};
pub use transient::{
    closed_form_delay, simulate_search_transient, vd_discharge_delay, DelayResult, InverterDriverParams,
    TransientConfig, VdReadoutParams, Waveform,
};
pub use variation::{cov_estimate, sample_cell_params, SampledCellParams, VariationSpec};
