//! Command-line flags, the optional TOML config file, and their merge.
//!
//! Every setting resolves as flag, then config file, then built-in default.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::Deserialize;
use tunnel_core::{FreePassage, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PassageArg {
    Standard,
    Fractional,
}

impl From<PassageArg> for FreePassage {
    fn from(p: PassageArg) -> Self {
        match p {
            PassageArg::Standard => FreePassage::Standard,
            PassageArg::Fractional => FreePassage::Fractional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum SweepParam {
    #[value(name = "b")]
    #[serde(rename = "b")]
    Width,
    #[value(name = "E")]
    #[serde(rename = "E")]
    Energy,
    #[value(name = "alpha")]
    #[serde(rename = "alpha")]
    Alpha,
    #[value(name = "L")]
    #[serde(rename = "L")]
    Gap,
    #[value(name = "N")]
    #[serde(rename = "N")]
    Count,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::Width => "b",
            SweepParam::Energy => "E",
            SweepParam::Alpha => "alpha",
            SweepParam::Gap => "L",
            SweepParam::Count => "N",
        }
    }
}

/// Tunneling times through N rectangular barriers with a fractional kinetic term.
#[derive(Debug, Default, Parser)]
#[command(name = "sfqm-tunnel", version)]
pub struct Cli {
    /// Lévy index, 1 < alpha <= 2
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fractional diffusion coefficient
    #[arg(long = "d-alpha")]
    pub d_alpha: Option<f64>,
    /// Barrier height
    #[arg(long = "V")]
    pub v: Option<f64>,
    /// Energy, 0 < E < V
    #[arg(long = "E")]
    pub e: Option<f64>,
    /// Barrier width
    #[arg(long)]
    pub b: Option<f64>,
    /// Gap between barriers
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Number of barriers
    #[arg(long = "N")]
    pub n: Option<u32>,

    #[arg(long, value_enum)]
    pub sweep: Option<SweepParam>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of intervals; the sweep has steps + 1 points
    #[arg(long)]
    pub steps: Option<usize>,
    /// Comma-separated barrier counts (sweep over N, or one curve per N)
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (compute, sweep, validate) or directory (figure)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a figure dataset and manifest
    #[arg(long)]
    pub figure: Option<String>,
    /// Report the literal f1 coefficient instead of the expansion coefficient
    #[arg(long = "paper-verbatim")]
    pub paper_verbatim: bool,
    #[arg(long = "free-passage", value_enum)]
    pub free_passage: Option<PassageArg>,
    /// Run the oracle validation suite
    #[arg(long)]
    pub validate: bool,
    /// Validation grid: default or fine
    #[arg(long)]
    pub grid: Option<String>,
    /// Flat TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in the config file; names follow the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    #[serde(alias = "d-alpha")]
    pub d_alpha: Option<f64>,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub b: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub sweep: Option<SweepParam>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    #[serde(alias = "n-list")]
    pub n_list: Option<Vec<u32>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub figure: Option<String>,
    #[serde(alias = "paper-verbatim")]
    pub paper_verbatim: Option<bool>,
    #[serde(alias = "free-passage")]
    pub free_passage: Option<PassageArg>,
    pub validate: Option<bool>,
    pub grid: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    /// Swept values in output order.
    pub values: Vec<f64>,
    /// Barrier counts; one block of rows per entry.
    pub ns: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Compute,
    Sweep(SweepSpec),
    Figure(String),
    Validate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub base: ModelParams,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub paper_verbatim: bool,
}

pub const DEFAULT_PARAMS: ModelParams = ModelParams {
    alpha: 2.0,
    d_alpha: 1.0,
    v_height: 5.0,
    energy: 3.0,
    b: 1.0,
    l_gap: 0.2,
    n_barriers: 1,
    free_passage: FreePassage::Standard,
};

fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| from + (to - from) * i as f64 / steps as f64)
        .collect()
}

impl Settings {
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(cli, file)
    }

    pub fn merge(cli: Cli, file: FileConfig) -> Result<Self> {
        let d = DEFAULT_PARAMS;
        let base = ModelParams {
            alpha: cli.alpha.or(file.alpha).unwrap_or(d.alpha),
            d_alpha: cli.d_alpha.or(file.d_alpha).unwrap_or(d.d_alpha),
            v_height: cli.v.or(file.v).unwrap_or(d.v_height),
            energy: cli.e.or(file.e).unwrap_or(d.energy),
            b: cli.b.or(file.b).unwrap_or(d.b),
            l_gap: cli.l.or(file.l).unwrap_or(d.l_gap),
            n_barriers: cli.n.or(file.n).unwrap_or(d.n_barriers),
            free_passage: cli
                .free_passage
                .or(file.free_passage)
                .map(Into::into)
                .unwrap_or(d.free_passage),
        };
        let format = cli.format.or(file.format).unwrap_or(Format::Csv);
        let out = cli.out.or(file.out);
        let paper_verbatim = cli.paper_verbatim || file.paper_verbatim.unwrap_or(false);

        let validate = cli.validate || file.validate.unwrap_or(false);
        let figure = cli.figure.or(file.figure);
        let sweep = cli.sweep.or(file.sweep);
        let n_list = cli.n_list.or(file.n_list);
        let (from, to, steps) = (
            cli.from.or(file.from),
            cli.to.or(file.to),
            cli.steps.or(file.steps),
        );

        let exclusive = [validate, figure.is_some(), sweep.is_some()]
            .iter()
            .filter(|&&x| x)
            .count();
        if exclusive > 1 {
            bail!("--validate, --figure and --sweep are mutually exclusive");
        }

        let mode = if validate {
            Mode::Validate(cli.grid.or(file.grid).unwrap_or_else(|| "default".into()))
        } else if let Some(name) = figure {
            Mode::Figure(name)
        } else if let Some(param) = sweep {
            Mode::Sweep(sweep_spec(param, from, to, steps, n_list, &base)?)
        } else {
            base.validate()?;
            Mode::Compute
        };
        Ok(Settings {
            base,
            mode,
            format,
            out,
            paper_verbatim,
        })
    }
}

fn sweep_spec(
    param: SweepParam,
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
    n_list: Option<Vec<u32>>,
    base: &ModelParams,
) -> Result<SweepSpec> {
    if param == SweepParam::Count {
        let ns = match (n_list, from, to) {
            (Some(list), _, _) => list,
            (None, Some(f), Some(t))
                if f.fract() == 0.0 && t.fract() == 0.0 && f >= 1.0 && f < t =>
            {
                (f as u32..=t as u32).collect()
            }
            _ => bail!("sweeping N needs --n-list or integer --from < --to"),
        };
        if ns.is_empty() || ns.contains(&0) {
            bail!("barrier counts must be at least 1");
        }
        for &n in &ns {
            base.with_n(n).validate()?;
        }
        return Ok(SweepSpec {
            param,
            values: ns.iter().map(|&n| n as f64).collect(),
            ns,
        });
    }

    let (Some(from), Some(to)) = (from, to) else {
        bail!("--sweep {} needs --from and --to", param.column());
    };
    if from.is_nan() || to.is_nan() || from >= to {
        bail!("sweep range must satisfy from < to (got {from} .. {to})");
    }
    let steps = steps.unwrap_or(100);
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    let ns = n_list.unwrap_or_else(|| vec![base.n_barriers]);
    if ns.is_empty() || ns.contains(&0) {
        bail!("barrier counts must be at least 1");
    }
    let values = linspace(from, to, steps);
    let spec = SweepSpec { param, values, ns };
    for p in spec.points(base) {
        p.validate()?;
    }
    Ok(spec)
}

impl SweepSpec {
    /// Parameter sets in output order: every swept value for the first N, then the next N.
    pub fn points(&self, base: &ModelParams) -> Vec<ModelParams> {
        if self.param == SweepParam::Count {
            return self.ns.iter().map(|&n| base.with_n(n)).collect();
        }
        let mut out = Vec::with_capacity(self.values.len() * self.ns.len());
        for &n in &self.ns {
            for &x in &self.values {
                let p = base.with_n(n);
                out.push(match self.param {
                    SweepParam::Width => p.with_b(x),
                    SweepParam::Energy => p.with_energy(x),
                    SweepParam::Alpha => p.with_alpha(x),
                    SweepParam::Gap => p.with_l_gap(x),
                    SweepParam::Count => unreachable!(),
                });
            }
        }
        out
    }

    pub fn swept_value(&self, p: &ModelParams) -> f64 {
        match self.param {
            SweepParam::Width => p.b,
            SweepParam::Energy => p.energy,
            SweepParam::Alpha => p.alpha,
            SweepParam::Gap => p.l_gap,
            SweepParam::Count => p.n_barriers as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> FileConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn precedence() {
        let cli = Cli {
            b: Some(4.0),
            ..Cli::default()
        };
        let s = Settings::merge(cli, file("b = 2.0\nalpha = 1.8\n")).unwrap();
        assert_eq!(s.base.b, 4.0);
        assert_eq!(s.base.alpha, 1.8);
        assert_eq!(s.base.energy, DEFAULT_PARAMS.energy);
        assert_eq!(s.mode, Mode::Compute);
        assert_eq!(s.format, Format::Csv);
    }

    #[test]
    fn config_keys_mirror_flags() {
        let f = file("V = 6.0\nE = 2.0\nL = 0.5\nN = 2\nd-alpha = 1.5\nfree-passage = \"fractional\"\nsweep = \"L\"\nfrom = 0.1\nto = 0.3\nsteps = 4\n");
        let s = Settings::merge(Cli::default(), f).unwrap();
        assert_eq!(s.base.v_height, 6.0);
        assert_eq!(s.base.d_alpha, 1.5);
        assert_eq!(s.base.free_passage, FreePassage::Fractional);
        let Mode::Sweep(spec) = s.mode else { panic!() };
        assert_eq!(spec.values.len(), 5);
        assert_eq!(spec.ns, vec![2]);
        assert!(toml::from_str::<FileConfig>("alpha = \"two\"").is_err());
    }

    #[test]
    fn sweep_validation() {
        let spec = |text: &str| Settings::merge(Cli::default(), file(text));
        assert!(spec("sweep = \"E\"\nfrom = 1.0\nto = 4.9\n").is_ok());
        assert!(spec("sweep = \"E\"\nfrom = 1.0\nto = 5.0\n").is_err());
        assert!(spec("sweep = \"alpha\"\nfrom = 1.5\nto = 2.1\n").is_err());
        assert!(spec("sweep = \"b\"\nfrom = 1.0\n").is_err());
        assert!(spec("sweep = \"N\"\n").is_err());
        assert!(spec("sweep = \"N\"\nn_list = [1, 0]\n").is_err());
        assert!(spec("sweep = \"b\"\nfrom = 0.0\nto = 1.0\nvalidate = true\n").is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let v = linspace(0.0, 20.0, 400);
        assert_eq!(v.len(), 401);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[400], 20.0);
    }
}
