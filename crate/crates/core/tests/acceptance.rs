//! Acceptance criteria A1–A9. Each test prints one `[Ax] PASS|FAIL` line;
//! run with `cargo test -p tdcam-core --test acceptance -- --nocapture`.

use std::path::Path;
use std::time::{Duration, Instant};

use tdcam::array::{build_ml_load, hamming_distance, write_word, Bits, CamWord, LoadMode};
use tdcam::config::SimConfig;
use tdcam::device::{BiasScheme, FeFetParams, PolarizationState};
use tdcam::experiments::{
    area_report, run_hd_sweep, run_monte_carlo, run_nn_search, stored_pattern, Circuit, ExperimentConfig, ModelMode,
    Scheme,
};
use tdcam::output::{distributions_csv, strip_timestamp, sweep_csv, to_json_pretty, Summary};
use tdcam::readout::{calibrate_hd_map, estimate_hd};
use tdcam::transient::{closed_form_delay, integrate_delay, simulate_search_transient, vd_discharge_delay};
use tdcam::variation::{cov_estimate, sample_cell_params, stream_rng, Distribution, VariationSpec};

fn report(id: &str, passed: bool, detail: &str, elapsed: Duration) {
    println!(
        "[{id}] {} {detail} ({:.2} s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(passed, "{id} failed: {detail}");
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(f)
}

#[test]
fn a1_linearity() {
    let start = Instant::now();
    let circuit = Circuit::default();
    let cfg = |mode| ExperimentConfig {
        n_bits: 16,
        hd_list: (0..=16).collect(),
        model_mode: mode,
        ..Default::default()
    };
    let table = run_hd_sweep(&cfg(ModelMode::TableTransient), &circuit).unwrap();
    let physical = run_hd_sweep(&cfg(ModelMode::PhysicalTransient), &circuit).unwrap();
    let elapsed = start.elapsed();
    let table_ok = (1.0 - table.calibration.r_squared).abs() <= 1e-9;
    let phys_ok = physical.calibration.r_squared >= 0.99;
    let all_converged = table.points.iter().chain(&physical.points).all(|p| p.converged);
    report(
        "A1",
        table_ok && phys_ok && all_converged && elapsed < Duration::from_secs(10),
        &format!(
            "table r2 = 1 - {:.2e} (tol 1e-9), physical r2 = {:.6} (>= 0.99)",
            1.0 - table.calibration.r_squared,
            physical.calibration.r_squared
        ),
        elapsed,
    );
}

#[test]
fn a2_vd_nonlinearity() {
    let start = Instant::now();
    let circuit = Circuit {
        fefet: FeFetParams { i_on: 1e-6, i_off: 0.0 },
        ..Default::default()
    };
    let stored = stored_pattern(1, 16);
    let word = circuit.nominal_word(&stored).unwrap();
    let delay = |k: usize| {
        let r = vd_discharge_delay(&word, &stored.flip_prefix(k), &circuit.vd, &circuit.transient).unwrap();
        assert!(r.converged);
        r.delay
    };
    let ratio = (delay(7) - delay(8)) / (delay(1) - delay(2));
    let elapsed = start.elapsed();
    report(
        "A2",
        (ratio - 1.0 / 28.0).abs() < 1e-12 && ratio <= 0.05 && elapsed < Duration::from_secs(1),
        &format!(
            "gap(7->8)/gap(1->2) = {ratio:.6} (exact 1/28 = {:.6}, limit 0.05)",
            1.0 / 28.0
        ),
        elapsed,
    );
}

#[test]
fn a3_monte_carlo_separability() {
    let start = Instant::now();
    let circuit = Circuit::default();
    let var = VariationSpec::default();
    let tdc = circuit.default_tdc(16);
    let cfg = |scheme| ExperimentConfig {
        n_bits: 16,
        hd_list: (0..=8).collect(),
        k_trials: 1000,
        scheme,
        ..Default::default()
    };
    let (td, vd) = single_threaded(|| {
        (
            run_monte_carlo(&cfg(Scheme::Td), &circuit, &var, &tdc).unwrap(),
            run_monte_carlo(&cfg(Scheme::Vd), &circuit, &var, &tdc).unwrap(),
        )
    });
    let elapsed = start.elapsed();
    let td_min_acc = td.accuracy.iter().map(|a| a.accuracy).fold(1.0, f64::min);
    let td_z = td.margin.worst_pair.z;
    let vd_z = vd.margin.worst_pair.z;
    let td8 = td.accuracy_at(8).unwrap();
    let vd8 = vd.accuracy_at(8).unwrap();
    report(
        "A3",
        td_min_acc >= 0.99 && td_z > vd_z && vd8 < td8 && elapsed < Duration::from_secs(120),
        &format!(
            "TD min accuracy {td_min_acc:.4} (>= 0.99); worst z TD {td_z:.3} > VD {vd_z:.3}; \
             HD8 accuracy VD {vd8:.3} < TD {td8:.3}"
        ),
        elapsed,
    );
}

#[test]
fn a4_oracle_equivalence() {
    let start = Instant::now();
    let circuit = Circuit::default();
    let n = 8;
    let seed = 99;
    let sweep = run_hd_sweep(
        &ExperimentConfig {
            n_bits: n,
            hd_list: (0..=n).collect(),
            seed,
            model_mode: ModelMode::TableTransient,
            ..Default::default()
        },
        &circuit,
    )
    .unwrap();
    let stored = stored_pattern(seed, n);
    let word = circuit.nominal_word(&stored).unwrap();
    let mut hits = 0;
    for q in 0..256u64 {
        let query = Bits::from_u64(q, n);
        let d = circuit
            .word_delay(&word, &query, Scheme::Td, ModelMode::TableTransient)
            .unwrap();
        let oracle = (q ^ bits_to_u64(&stored)).count_ones() as usize;
        assert_eq!(oracle, hamming_distance(&stored, &query).unwrap());
        if estimate_hd(d.delay, &sweep.calibration) == oracle {
            hits += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "A4",
        hits == 256 && elapsed < Duration::from_secs(1),
        &format!("{hits}/256 queries decoded to the exact HD"),
        elapsed,
    );
}

fn bits_to_u64(b: &Bits) -> u64 {
    b.as_slice().iter().fold(0, |acc, &x| (acc << 1) | x as u64)
}

#[test]
fn a5_integrator_fidelity() {
    let start = Instant::now();
    let circuit = Circuit::default();
    assert_eq!(circuit.transient.rel_tol, 1e-3);
    let mut worst: f64 = 0.0;
    for c in [6e-15, 21e-15, 93e-15, 165e-15] {
        let num = integrate_delay(|_| Ok(c), &circuit.driver, &circuit.transient, false).unwrap();
        assert!(num.converged);
        let cf = closed_form_delay(c, &circuit.driver).unwrap();
        worst = worst.max((num.delay - cf.delay).abs() / cf.delay);
    }
    report(
        "A5",
        worst < 5e-3,
        &format!("worst relative deviation {worst:.2e} (limit 5e-3)"),
        start.elapsed(),
    );
}

#[test]
fn a6_write_semantics() {
    let start = Instant::now();
    let circuit = Circuit::default();
    let bias = BiasScheme::default();
    let blank = CamWord::uniform(1, circuit.nominal_cell(), circuit.c_fixed).unwrap();
    let one: Bits = "1".parse().unwrap();
    let zero: Bits = "0".parse().unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for mode in [LoadMode::Table, LoadMode::Physical] {
        let delay = |w: &CamWord, q: &Bits| {
            simulate_search_transient(w, q, &bias, &circuit.driver, &circuit.transient, mode, false)
                .unwrap()
                .delay
        };
        // Threshold halfway between the nominal match and mismatch delays.
        let reference = write_word(&blank, &one, &bias).unwrap();
        let threshold = 0.5 * (delay(&reference, &one) + delay(&reference, &zero));
        for stored in [&zero, &one] {
            let word = write_word(&blank, stored, &bias).unwrap();
            for query in [&zero, &one] {
                let mismatch = delay(&word, query) > threshold;
                let read_back = if mismatch { !query.0[0] } else { query.0[0] };
                if read_back != stored.0[0] {
                    ok = false;
                    notes.push(format!("{mode:?} stored {stored} query {query}"));
                }
            }
        }
    }
    // Sub-coercive and too-short pulses leave every state untouched.
    let weak = BiasScheme {
        v_write_1: 3.9,
        v_write_0: -3.9,
        ..bias
    };
    let short = BiasScheme { t_write: 50e-9, ..bias };
    let initial: Bits = "0110".parse().unwrap();
    let word = CamWord::from_bits(&initial, |_| circuit.nominal_cell(), circuit.c_fixed).unwrap();
    for b in [weak, short] {
        let after = write_word(&word, &"1001".parse().unwrap(), &b).unwrap();
        if after.stored_bits() != initial {
            ok = false;
            notes.push("sub-threshold write changed state".into());
        }
    }
    let written = write_word(&word, &"1001".parse().unwrap(), &bias).unwrap();
    ok &= written.cells()[0].state == PolarizationState::Pos && written.cells()[1].state == PolarizationState::Neg;
    report(
        "A6",
        ok,
        &format!("4/4 stored bits recovered in table and physical mode; sub-threshold writes inert {notes:?}"),
        start.elapsed(),
    );
}

#[test]
fn a7_area_constants() {
    let start = Instant::now();
    let a = area_report();
    let ok = a.len() == 3
        && a[0].area_f2 == 304.0
        && a[1].area_f2 == 200.0
        && a[2].area_f2 == 56.0
        && (a[0].ratio_vs_this_work - 5.43).abs() <= 0.01
        && (a[1].ratio_vs_this_work - 3.57).abs() <= 0.01
        && a[2].ratio_vs_this_work == 1.0;
    report(
        "A7",
        ok,
        &format!(
            "304/200/56 F2, ratios {:.3}x and {:.3}x",
            a[0].ratio_vs_this_work, a[1].ratio_vs_this_work
        ),
        start.elapsed(),
    );
}

fn experiment_files(dir: &Path, cfg: &SimConfig) {
    let circuit = cfg.circuit();
    let tdc = cfg.tdc(&circuit);
    let seed = cfg.experiment.seed;
    let sweep = run_hd_sweep(&cfg.experiment, &circuit).unwrap();
    std::fs::write(dir.join("delays.csv"), sweep_csv(&sweep.points).unwrap()).unwrap();
    let summary = Summary::new("sweep-hd", seed, cfg, serde_json::to_value(sweep.calibration).unwrap());
    std::fs::write(dir.join("fit.json"), to_json_pretty(&summary).unwrap()).unwrap();
    for scheme in [Scheme::Td, Scheme::Vd] {
        let exp = ExperimentConfig {
            scheme,
            ..cfg.experiment.clone()
        };
        let mc = run_monte_carlo(&exp, &circuit, &cfg.variation, &tdc).unwrap();
        std::fs::write(dir.join(format!("mc_{scheme:?}.csv")), distributions_csv(&mc).unwrap()).unwrap();
        let s = Summary::new("monte-carlo", seed, cfg, serde_json::to_value(&mc.margin).unwrap());
        std::fs::write(dir.join(format!("mc_{scheme:?}.json")), to_json_pretty(&s).unwrap()).unwrap();
        let nn = run_nn_search(&exp, &circuit, &cfg.variation).unwrap();
        std::fs::write(dir.join(format!("nn_{scheme:?}.json")), to_json_pretty(&nn).unwrap()).unwrap();
    }
}

#[test]
fn a8_determinism() {
    let start = Instant::now();
    let cfg = SimConfig::from_json_str(r#"{"experiment": {"k_trials": 200, "m_words": 16, "seed": 42}}"#).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    experiment_files(a.path(), &cfg);
    // Second run on a different thread count.
    rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| experiment_files(b.path(), &cfg));
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut identical = 0;
    for name in &names {
        let x = std::fs::read_to_string(a.path().join(name)).unwrap();
        let y = std::fs::read_to_string(b.path().join(name)).unwrap();
        let (x, y) = if name.to_string_lossy().ends_with(".json") {
            (strip_timestamp(&x).unwrap(), strip_timestamp(&y).unwrap())
        } else {
            (x, y)
        };
        if x == y {
            identical += 1;
        }
    }
    report(
        "A8",
        identical == names.len() && names.len() == 8,
        &format!(
            "{identical}/{} output files byte-identical (timestamp key excluded)",
            names.len()
        ),
        start.elapsed(),
    );
}

#[test]
fn a9_statistical_sampling() {
    let start = Instant::now();
    let circuit = Circuit::default();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for dist in [Distribution::NormalTruncated, Distribution::Lognormal] {
        for cov in [0.03, 0.15, 0.30] {
            let spec = VariationSpec {
                cov_c_hcs: cov,
                distribution: dist,
                ..VariationSpec::default()
            };
            let mut rng = stream_rng(2024, 0);
            let samples: Vec<f64> = (0..100_000)
                .map(|_| {
                    sample_cell_params(&circuit.memcap, &circuit.fefet, &spec, &mut rng)
                        .unwrap()
                        .memcap
                        .c_hcs
                })
                .collect();
            let rel = (cov_estimate(&samples).unwrap() - cov).abs() / cov;
            worst = worst.max(rel);
            ok &= rel <= 0.05;
        }
    }
    report(
        "A9",
        ok,
        &format!("worst relative CoV error {worst:.4} over CoV {{0.03, 0.15, 0.30}} x 2 distributions (limit 0.05)"),
        start.elapsed(),
    );
}

#[test]
fn supplementary_mc_properties() {
    // TD means affine in HD and VD gap compression on Monte Carlo means.
    let circuit = Circuit::default();
    let var = VariationSpec::default();
    let tdc = circuit.default_tdc(16);
    let cfg = |scheme| ExperimentConfig {
        n_bits: 16,
        hd_list: (0..=8).collect(),
        k_trials: 1000,
        scheme,
        ..Default::default()
    };
    let td = run_monte_carlo(&cfg(Scheme::Td), &circuit, &var, &tdc).unwrap();
    let pts: Vec<(usize, f64)> = td.distributions.iter().map(|d| (d.hd, d.mean)).collect();
    assert!(calibrate_hd_map(&pts).unwrap().r_squared >= 0.999);

    let vd = run_monte_carlo(&cfg(Scheme::Vd), &circuit, &var, &tdc).unwrap();
    let mean = |hd| vd.distributions.iter().find(|d| d.hd == hd).unwrap().mean;
    assert!((mean(7) - mean(8)) / (mean(1) - mean(2)) <= 0.10);
}

#[test]
fn supplementary_nn_accuracy() {
    let circuit = Circuit::default();
    let cfg = |scheme| ExperimentConfig {
        n_bits: 16,
        m_words: 32,
        k_trials: 1000,
        scheme,
        model_mode: ModelMode::ClosedForm,
        ..Default::default()
    };
    let var = VariationSpec::default();
    let td = run_nn_search(&cfg(Scheme::Td), &circuit, &var).unwrap();
    let vd = run_nn_search(&cfg(Scheme::Vd), &circuit, &var).unwrap();
    assert!(td.accuracy >= vd.accuracy, "TD {} VD {}", td.accuracy, vd.accuracy);

    let td_exact = run_nn_search(&cfg(Scheme::Td), &circuit, &VariationSpec::none()).unwrap();
    assert_eq!(td_exact.accuracy, 1.0);

    // Common random numbers: accuracy is non-increasing as each CoV grows.
    for scheme in [Scheme::Td, Scheme::Vd] {
        for which in 0..4 {
            let mut last = f64::INFINITY;
            for level in [0.0, 0.15, 0.45] {
                let mut spec = VariationSpec::none();
                match which {
                    0 => spec.cov_c_hcs = level,
                    1 => spec.cov_c_lcs = level,
                    2 => spec.cov_i_on = level,
                    _ => spec.cov_i_off = level,
                }
                let acc = run_nn_search(&cfg(scheme), &circuit, &spec).unwrap().accuracy;
                assert!(acc <= last, "{scheme:?} param {which} level {level}: {acc} > {last}");
                last = acc;
            }
        }
    }
}

#[test]
fn supplementary_physical_load_tracks_table() {
    let circuit = Circuit::default();
    let stored = stored_pattern(5, 16);
    let word = circuit.nominal_word(&stored).unwrap();
    for k in 0..=16 {
        let q = stored.flip_prefix(k);
        let table = build_ml_load(&word, &q, &circuit.bias, 0.0, LoadMode::Table).unwrap();
        for i in 0..=100 {
            let v = i as f64 * 0.01;
            let phys = build_ml_load(&word, &q, &circuit.bias, v, LoadMode::Physical).unwrap();
            assert!((phys - table).abs() / table <= 0.05);
        }
    }
}
