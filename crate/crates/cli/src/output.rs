//! Row schema and the CSV / JSON writers.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde::Serialize;
use tunnel_core::asymptotics::w_alpha;
use tunnel_core::lattice::evaluate;
use tunnel_core::{FreePassage, ModelParams};

pub const SCHEMA: &str = "sfqm-tunnel record v1";

pub const COLUMNS: [&str; 8] = [
    "N",
    "gamma",
    "tau",
    "trans_prob",
    "phi",
    "dphi_de",
    "w_alpha",
    "band_edge",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordRow {
    pub value: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub gamma: f64,
    pub tau: f64,
    pub trans_prob: f64,
    pub phi: f64,
    pub dphi_de: f64,
    pub w_alpha: f64,
    pub band_edge: bool,
}

impl RecordRow {
    pub fn compute(p: &ModelParams, value: f64) -> Result<Self> {
        let (cell, lat) = evaluate(p)?;
        let row = RecordRow {
            value,
            n: p.n_barriers,
            gamma: lat.gamma_n,
            tau: cell.tau_alpha,
            trans_prob: lat.trans_prob,
            phi: lat.phi,
            dphi_de: lat.dphi_de,
            w_alpha: w_alpha(p)?,
            band_edge: lat.band_edge,
        };
        let nums = [
            row.gamma,
            row.tau,
            row.trans_prob,
            row.phi,
            row.dphi_de,
            row.w_alpha,
        ];
        if nums.iter().any(|x| !x.is_finite()) {
            bail!("non-finite result at {p:?}");
        }
        Ok(row)
    }
}

/// 17 significant digits, so values survive a text round trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn passage_name(f: FreePassage) -> &'static str {
    match f {
        FreePassage::Standard => "standard",
        FreePassage::Fractional => "fractional",
    }
}

/// `key=value` description of the fixed parameters, for `#` lines.
pub fn describe(p: &ModelParams) -> String {
    format!(
        "alpha={} d_alpha={} V={} E={} b={} L={} N={} free_passage={}",
        p.alpha,
        p.d_alpha,
        p.v_height,
        p.energy,
        p.b,
        p.l_gap,
        p.n_barriers,
        passage_name(p.free_passage)
    )
}

pub fn to_csv(value_column: &str, comments: &[String], rows: &[RecordRow]) -> String {
    let mut s = String::new();
    writeln!(s, "# {SCHEMA}").unwrap();
    for c in comments {
        writeln!(s, "# {c}").unwrap();
    }
    writeln!(s, "{value_column},{}", COLUMNS.join(",")).unwrap();
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt_float(r.value),
            r.n,
            fmt_float(r.gamma),
            fmt_float(r.tau),
            fmt_float(r.trans_prob),
            fmt_float(r.phi),
            fmt_float(r.dphi_de),
            fmt_float(r.w_alpha),
            r.band_edge as u8
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct JsonTable<'a, M: Serialize> {
    schema: &'static str,
    value_column: &'a str,
    meta: M,
    rows: &'a [RecordRow],
}

pub fn to_json<M: Serialize>(value_column: &str, meta: M, rows: &[RecordRow]) -> String {
    let table = JsonTable {
        schema: SCHEMA,
        value_column,
        meta,
        rows,
    };
    let mut s = serde_json::to_string_pretty(&table).expect("rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let p = ModelParams::new(2.0, 5.0, 3.0, 0.0, 0.2, 1);
        let row = RecordRow::compute(&p, 0.0).unwrap();
        let csv = to_csv("b", &["x=1".into()], &[row]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], format!("# {SCHEMA}"));
        assert_eq!(lines[1], "# x=1");
        assert_eq!(
            lines[2],
            "b,N,gamma,tau,trans_prob,phi,dphi_de,w_alpha,band_edge"
        );
        assert_eq!(lines[3].split(',').count(), 9);
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }
}
