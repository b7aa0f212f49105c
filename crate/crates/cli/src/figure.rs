//! Fixed presets for the two width-sweep figures.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tunnel_core::ModelParams;

use crate::output::{to_csv, RecordRow};

pub const FIGURES: [&str; 2] = ["fig1a", "fig1b"];

/// Width grid 0, 0.05, ..., 20.
pub const B_MAX: f64 = 20.0;
pub const B_INTERVALS: usize = 400;
pub const NS: [u32; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub figure: String,
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: &'static str,
    pub base: ModelParams,
    pub widths: WidthGrid,
    pub barrier_counts: Vec<u32>,
    pub rows: usize,
    pub band_edge_rows: usize,
    pub dataset: String,
    pub notes: Vec<&'static str>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WidthGrid {
    pub from: f64,
    pub to: f64,
    pub intervals: usize,
}

pub fn preset(name: &str) -> Result<ModelParams> {
    let alpha = match name {
        "fig1a" => 2.0,
        "fig1b" => 1.995,
        _ => bail!(
            "unknown figure '{name}'; valid figures: {}",
            FIGURES.join(", ")
        ),
    };
    Ok(ModelParams::new(alpha, 5.0, 3.0, 0.0, 0.2, 1))
}

pub fn widths() -> Vec<f64> {
    (0..=B_INTERVALS)
        .map(|i| B_MAX * i as f64 / B_INTERVALS as f64)
        .collect()
}

pub fn rows(name: &str) -> Result<Vec<RecordRow>> {
    let base = preset(name)?;
    let bs = widths();
    let points: Vec<ModelParams> = NS
        .iter()
        .flat_map(|&n| bs.iter().map(move |&b| base.with_n(n).with_b(b)))
        .collect();
    points
        .par_iter()
        .map(|p| RecordRow::compute(p, p.b))
        .collect()
}

/// The dataset CSV exactly as written to disk.
pub fn dataset_csv(name: &str) -> Result<String> {
    Ok(render(name, &preset(name)?, &rows(name)?))
}

fn render(name: &str, base: &ModelParams, rows: &[RecordRow]) -> String {
    let comments = vec![
        format!("figure={name}"),
        format!(
            "alpha={} d_alpha={} V={} E={} L={} free_passage=standard",
            base.alpha, base.d_alpha, base.v_height, base.energy, base.l_gap
        ),
        format!("b=0..{B_MAX} intervals={B_INTERVALS} N_list=1,2,3,4"),
    ];
    to_csv("b", &comments, rows)
}

/// Writes `<name>.csv` and `<name>_manifest.json` into `dir`.
pub fn write(name: &str, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let base = preset(name)?;
    let rows = rows(name)?;
    let csv = render(name, &base, &rows);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let data_path = dir.join(format!("{name}.csv"));
    let manifest_path = dir.join(format!("{name}_manifest.json"));
    std::fs::write(&data_path, csv).with_context(|| format!("writing {}", data_path.display()))?;

    let manifest = Manifest {
        figure: name.to_string(),
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        schema: crate::output::SCHEMA,
        base,
        widths: WidthGrid {
            from: 0.0,
            to: B_MAX,
            intervals: B_INTERVALS,
        },
        barrier_counts: NS.to_vec(),
        rows: rows.len(),
        band_edge_rows: rows.iter().filter(|r| r.band_edge).count(),
        dataset: format!("{name}.csv"),
        notes: vec![
            "d_alpha fixed to 1",
            "caption parameter v=1e-4 unresolved: no matching symbol in the model, not used",
            "free passage term ((N-1)s+b)/(2k)",
        ],
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    std::fs::write(&manifest_path, json)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok((data_path, manifest_path))
}
