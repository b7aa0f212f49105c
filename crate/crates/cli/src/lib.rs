//! Library side of the `sfqm-tunnel` command: settings resolution, the row
//! schema, figure presets and the four run modes.

pub mod config;
pub mod figure;
pub mod output;

use std::io::Write;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tunnel_core::asymptotics::f_coefficients;
use tunnel_core::oracle::{validate, GridSpec};
use tunnel_core::ModelParams;

use config::{Format, Mode, Settings};
use output::{describe, to_csv, to_json, RecordRow};

/// Reads `SFQM_TUNNEL_THREADS` and sizes the global pool.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SFQM_TUNNEL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("SFQM_TUNNEL_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring thread pool")
}

#[derive(Serialize)]
struct ComputeMeta {
    params: ModelParams,
    f1: f64,
    f1_convention: &'static str,
    f2: f64,
    f3: f64,
}

fn f1_convention(verbatim: bool) -> &'static str {
    if verbatim {
        "literal"
    } else {
        "expansion"
    }
}

pub fn compute(s: &Settings) -> Result<String> {
    let p = s.base;
    let row = RecordRow::compute(&p, p.b)?;
    let f = f_coefficients(&p)?;
    let meta = ComputeMeta {
        params: p,
        f1: f.f1_selected(s.paper_verbatim),
        f1_convention: f1_convention(s.paper_verbatim),
        f2: f.f2,
        f3: f.f3,
    };
    Ok(match s.format {
        Format::Json => to_json("b", meta, &[row]),
        Format::Csv => {
            let comments = vec![
                describe(&p),
                format!(
                    "f1={} f1_convention={} f2={} f3={}",
                    output::fmt_float(meta.f1),
                    meta.f1_convention,
                    output::fmt_float(f.f2),
                    output::fmt_float(f.f3)
                ),
            ];
            to_csv("b", &comments, &[row])
        }
    })
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    base: ModelParams,
    swept: &'a str,
    from: f64,
    to: f64,
    points: usize,
    n_list: &'a [u32],
}

pub fn sweep(s: &Settings, spec: &config::SweepSpec) -> Result<String> {
    let points = spec.points(&s.base);
    let rows: Vec<RecordRow> = points
        .par_iter()
        .map(|p| RecordRow::compute(p, spec.swept_value(p)))
        .collect::<Result<_>>()?;
    let col = spec.param.column();
    let first = spec.values[0];
    let last = *spec.values.last().expect("non-empty sweep");
    Ok(match s.format {
        Format::Json => to_json(
            col,
            SweepMeta {
                base: s.base,
                swept: col,
                from: first,
                to: last,
                points: spec.values.len(),
                n_list: &spec.ns,
            },
            &rows,
        ),
        Format::Csv => {
            let list: Vec<String> = spec.ns.iter().map(|n| n.to_string()).collect();
            let comments = vec![
                format!("base {}", describe(&s.base)),
                format!(
                    "sweep {col} from={first} to={last} points={} N_list={}",
                    spec.values.len(),
                    list.join(",")
                ),
            ];
            to_csv(col, &comments, &rows)
        }
    })
}

/// Returns the rendered report and whether it passed.
pub fn run_validation(s: &Settings, grid_name: &str) -> Result<(String, bool)> {
    let Some(mut grid) = GridSpec::by_name(grid_name) else {
        bail!("unknown grid '{grid_name}'; valid grids: default, fine");
    };
    grid.v_height = s.base.v_height;
    grid.d_alpha = s.base.d_alpha;
    let report = validate(&grid)?;
    let text = match s.format {
        Format::Json => {
            let mut j = report.to_json();
            j.push('\n');
            j
        }
        Format::Csv => report.to_string(),
    };
    Ok((text, report.passed()))
}

fn emit(s: &Settings, text: &str) -> Result<()> {
    match &s.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Runs the selected mode; the returned flag is false when validation found hard failures.
pub fn run(s: &Settings) -> Result<bool> {
    match &s.mode {
        Mode::Compute => emit(s, &compute(s)?).map(|_| true),
        Mode::Sweep(spec) => emit(s, &sweep(s, spec)?).map(|_| true),
        Mode::Figure(name) => {
            let dir = s.out.clone().unwrap_or_else(|| ".".into());
            let (data, manifest) = figure::write(name, &dir)?;
            eprintln!("wrote {} and {}", data.display(), manifest.display());
            Ok(true)
        }
        Mode::Validate(grid) => {
            let (text, ok) = run_validation(s, grid)?;
            emit(s, &text)?;
            Ok(ok)
        }
    }
}
