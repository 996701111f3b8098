use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use tdcam::array::{format_bit_rows, read_bit_rows};
use tdcam::experiments::{run_validation, search_rows};
use tdcam::output::{self, Summary};
use tdcam::{
    area_report, capacitance, run_hd_sweep, run_monte_carlo, run_nn_search, simulate_search_transient, write_word,
    Bits, CamWord, LoadMode, ModelMode, PolarizationState, Scheme, SimConfig,
};

use crate::{Cli, Command, Format};

struct Ctx {
    cfg: SimConfig,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
}

impl Ctx {
    /// Emit one table. CSV mode writes `csv_name` plus the summary under
    /// `--out`, or prints the CSV. JSON mode writes or prints the summary only.
    fn emit(&self, command: &str, csv_name: &str, csv_text: &str, json_name: &str, metrics: Value) -> Result<()> {
        let summary = output::to_json_pretty(&Summary::new(command, self.seed, &self.cfg, metrics))?;
        match (&self.out, self.format) {
            (Some(dir), fmt) => {
                if fmt == Format::Csv {
                    write(dir, csv_name, csv_text)?;
                }
                write(dir, json_name, &summary)?;
            }
            (None, Format::Csv) => print!("{csv_text}"),
            (None, Format::Json) => print!("{summary}"),
        }
        Ok(())
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    output::write_text(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse_bits(text: &str) -> Result<Bits> {
    Ok(text.parse::<Bits>()?)
}

pub fn run(cli: Cli) -> Result<u8> {
    let g = cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building thread pool")?;
    }
    let mut cfg = match &g.config {
        Some(p) => tdcam::load_config(p)?,
        None => SimConfig::default(),
    };
    if let Some(m) = g.model {
        cfg.experiment.model_mode = m.into();
    }
    let env = std::env::var(tdcam::config::SEED_ENV_VAR).ok();
    let seed = cfg.resolve_seed(g.seed, env.as_deref())?;
    cfg.experiment.seed = seed;
    cfg.validate()?;
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let ctx = Ctx {
        cfg,
        seed,
        out: g.out,
        format: g.format,
    };

    match cli.command {
        Command::CvCurve { v_min, v_max, points } => cv_curve(&ctx, v_min, v_max, points)?,
        Command::Write { bits } => write_cmd(&ctx, &bits)?,
        Command::SearchWord {
            query,
            stored,
            rows,
            scheme,
            waveform,
        } => search_word(&ctx, &query, &stored, rows.as_deref(), scheme.into(), waveform)?,
        Command::SweepHd { scheme } => sweep_hd(&ctx, scheme.map(Into::into))?,
        Command::MonteCarlo { scheme } => monte_carlo(&ctx, scheme.map(Into::into))?,
        Command::NnSearch { scheme } => nn_search(&ctx, scheme.map(Into::into))?,
        Command::AreaReport => {
            let entries = area_report();
            ctx.emit(
                "area-report",
                "area.csv",
                &output::area_csv(&entries)?,
                "area.json",
                json!({ "entries": entries }),
            )?;
        }
        Command::Validate => return validate(&ctx),
    }
    Ok(0)
}

fn cv_curve(ctx: &Ctx, v_min: f64, v_max: f64, points: usize) -> Result<()> {
    if points < 2 || v_max.is_nan() || v_min.is_nan() || v_max <= v_min {
        anyhow::bail!(tdcam::CamError::Parse(format!(
            "cv-curve needs points >= 2 and v_max > v_min (got {points}, [{v_min}, {v_max}])"
        )));
    }
    let memcap = ctx.cfg.device.memcap();
    let step = (v_max - v_min) / (points - 1) as f64;
    let rows = (0..points)
        .map(|i| {
            let v = v_min + i as f64 * step;
            let pos = capacitance(&memcap, PolarizationState::Pos, v)?;
            let neg = capacitance(&memcap, PolarizationState::Neg, v)?;
            Ok(vec![format!("{v:e}"), format!("{pos:e}"), format!("{neg:e}")])
        })
        .collect::<tdcam::Result<Vec<_>>>()?;
    let text = output::table_csv(&["v_g_sd", "c_p_pos", "c_p_neg"], &rows)?;
    ctx.emit(
        "cv-curve",
        "cv.csv",
        &text,
        "cv.json",
        json!({ "v_min": v_min, "v_max": v_max, "points": points }),
    )
}

fn write_cmd(ctx: &Ctx, words: &[String]) -> Result<()> {
    let circuit = ctx.cfg.circuit();
    let mut rows = Vec::new();
    let mut stored = Vec::new();
    for (r, text) in words.iter().enumerate() {
        let bits = parse_bits(text)?;
        let blank = CamWord::uniform(bits.len(), circuit.nominal_cell(), circuit.c_fixed)?;
        let word = write_word(&blank, &bits, &circuit.bias)?;
        for (i, cell) in word.cells().iter().enumerate() {
            rows.push(vec![
                r.to_string(),
                i.to_string(),
                u8::from(bits.0[i]).to_string(),
                format!("{:?}", cell.state),
            ]);
        }
        stored.push(word.stored_bits());
    }
    let text = output::table_csv(&["row", "cell", "bit", "state"], &rows)?;
    if let Some(dir) = &ctx.out {
        write(dir, "array.txt", &format_bit_rows(&stored))?;
    }
    let stored: Vec<String> = stored.iter().map(Bits::to_string).collect();
    ctx.emit("write", "cells.csv", &text, "write.json", json!({ "stored": stored }))
}

fn search_word(
    ctx: &Ctx,
    query: &str,
    stored: &[String],
    rows_file: Option<&Path>,
    scheme: Scheme,
    waveform: bool,
) -> Result<()> {
    let query = parse_bits(query)?;
    let rows: Vec<Bits> = match rows_file {
        Some(p) => read_bit_rows(p)?,
        None => stored.iter().map(|s| parse_bits(s)).collect::<Result<_>>()?,
    };
    if rows.is_empty() {
        anyhow::bail!(tdcam::CamError::Parse("search-word needs --stored or --rows".into()));
    }
    let circuit = ctx.cfg.circuit();
    let mode = ctx.cfg.experiment.model_mode;
    let tdc = ctx.cfg.tdc(&circuit);
    let found = search_rows(&circuit, &rows, &query, scheme, mode, &tdc)?;
    let table: Vec<Vec<String>> = found
        .iter()
        .map(|r| {
            vec![
                r.row.to_string(),
                r.stored.clone(),
                r.hd.to_string(),
                format!("{:e}", r.delay_s),
                r.converged.to_string(),
                r.tdc_code.to_string(),
                r.estimated_hd.to_string(),
            ]
        })
        .collect();
    let text = output::table_csv(
        &[
            "row",
            "stored",
            "hd",
            "delay_s",
            "converged",
            "tdc_code",
            "estimated_hd",
        ],
        &table,
    )?;
    if waveform {
        let load = match (scheme, mode) {
            (Scheme::Td, ModelMode::TableTransient) => LoadMode::Table,
            (Scheme::Td, ModelMode::PhysicalTransient) => LoadMode::Physical,
            _ => anyhow::bail!(tdcam::CamError::Parse(
                "--waveform needs --scheme td with --model table or physical".into()
            )),
        };
        let word = circuit.nominal_word(&rows[0])?;
        let res = simulate_search_transient(
            &word,
            &query,
            &circuit.bias,
            &circuit.driver,
            &circuit.transient,
            load,
            true,
        )?;
        let wf = res.waveform.context("solver returned no waveform")?;
        let wf_text = output::waveform_csv(&wf)?;
        let dir = ctx
            .out
            .as_deref()
            .context(tdcam::CamError::Parse("--waveform needs --out".into()))?;
        write(dir, "waveform.csv", &wf_text)?;
    }
    ctx.emit(
        "search-word",
        "search.csv",
        &text,
        "search.json",
        json!({ "query": query.to_string(), "scheme": scheme, "tdc": tdc, "rows": found }),
    )
}

fn experiment(ctx: &Ctx, scheme: Option<Scheme>) -> tdcam::ExperimentConfig {
    let mut e = ctx.cfg.experiment.clone();
    if let Some(s) = scheme {
        e.scheme = s;
    }
    e
}

fn sweep_hd(ctx: &Ctx, scheme: Option<Scheme>) -> Result<()> {
    let exp = experiment(ctx, scheme);
    let res = run_hd_sweep(&exp, &ctx.cfg.circuit())?;
    if res.points.iter().any(|p| !p.converged) {
        eprintln!("warning: some HD points did not converge within t_max");
    }
    let metrics = json!({
        "scheme": exp.scheme,
        "model_mode": exp.model_mode,
        "stored": res.stored,
        "intercept": res.calibration.intercept,
        "slope": res.calibration.slope,
        "r_squared": res.calibration.r_squared,
        "points": res.points,
    });
    ctx.emit(
        "sweep-hd",
        "delays.csv",
        &output::sweep_csv(&res.points)?,
        "fit.json",
        metrics,
    )
}

fn monte_carlo(ctx: &Ctx, scheme: Option<Scheme>) -> Result<()> {
    let exp = experiment(ctx, scheme);
    let circuit = ctx.cfg.circuit();
    let tdc = ctx.cfg.tdc(&circuit);
    let mc = run_monte_carlo(&exp, &circuit, &ctx.cfg.variation, &tdc)?;
    let per_hd: Vec<Value> = mc
        .distributions
        .iter()
        .map(|d| json!({ "hd": d.hd, "n": d.samples.len(), "mean_s": d.mean, "std_s": d.std }))
        .collect();
    let reference: Vec<Value> = mc
        .reference
        .iter()
        .map(|(hd, d)| json!({ "hd": hd, "delay_s": d }))
        .collect();
    let metrics = json!({
        "scheme": mc.scheme,
        "model_mode": exp.model_mode,
        "k_trials": exp.k_trials,
        "tdc": tdc,
        "reference": reference,
        "per_hd": per_hd,
        "margin": mc.margin,
        "accuracy": mc.accuracy,
        "non_discharge": mc.match_flags,
    });
    ctx.emit(
        "monte-carlo",
        "distributions.csv",
        &output::distributions_csv(&mc)?,
        "summary.json",
        metrics,
    )
}

fn nn_search(ctx: &Ctx, scheme: Option<Scheme>) -> Result<()> {
    let exp = experiment(ctx, scheme);
    let res = run_nn_search(&exp, &ctx.cfg.circuit(), &ctx.cfg.variation)?;
    let text = output::table_csv(
        &["scheme", "m_words", "trials", "correct", "accuracy"],
        &[vec![
            format!("{:?}", res.scheme).to_lowercase(),
            res.m_words.to_string(),
            res.trials.to_string(),
            res.correct.to_string(),
            format!("{:e}", res.accuracy),
        ]],
    )?;
    ctx.emit("nn-search", "nn.csv", &text, "nn.json", serde_json::to_value(&res)?)
}

fn validate(ctx: &Ctx) -> Result<u8> {
    let checks = run_validation(&ctx.cfg.circuit(), ctx.seed);
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
        .collect();
    let text = output::table_csv(&["check", "passed", "detail"], &rows)?;
    ctx.emit(
        "validate",
        "validate.csv",
        &text,
        "validate.json",
        json!({ "checks": checks }),
    )?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("validation failed: {}", failed.join(", "));
        Ok(2)
    }
}
