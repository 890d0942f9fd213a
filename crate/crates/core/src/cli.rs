//! Batch front end for the `lumer` binary.
//!
//! Every subcommand renders its whole output into memory first, so rows come
//! out in trial order and identical arguments give identical bytes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use std::sync::Arc;

use crate::conformal_atlas::{isometry_check, ConformalMap};
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridField, Shape};
use crate::riesz_engine::{
    conjecture_sweep, conjugate_exponent, random_real_polynomial, riesz_ratio_grid, sharpness_family, trial_rng,
    verbitsky_constant, EXPLORATORY, THEOREM_SLACK,
};

/// Largest `|ratio − √2|` accepted from the sharpness family.
pub const SHARPNESS_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "lumer", version, about = "Lumer-norm Riesz experiments on plane domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format (default: csv, except `grid` which defaults to jsonl).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sharp constants c_p and their conjugate-exponent partners.
    #[command(after_help = "CSV columns: p,c_p,p_conjugate,c_p_conjugate,symmetry_gap")]
    Constants {
        /// Comma-separated exponents; none gives a header-only table.
        #[arg(long = "p", value_delimiter = ',', num_args = 0..)]
        p: Vec<f64>,
    },
    /// Random trig polynomials on the disk, ratio ‖U+iV‖/‖U‖ at the center.
    /// Exits nonzero if p = 2 and some margin is below -1e-9.
    #[command(
        after_help = "CSV columns: record,label,trial,seed,p,degree,norm_u,norm_f,ratio,bound,margin,error,note\n\
                      record is `trial` or `summary`; the summary row carries the maximal ratio, its trial \
                      index, the minimal margin and the number of failed trials."
    )]
    Verify(VerifyArgs),
    /// The family U = Re zⁿ; exits nonzero if some |ratio − √2| exceeds 1e-12.
    #[command(after_help = "CSV columns: n,ratio,gap")]
    Sharpness {
        /// Comma-separated degrees n ≥ 1; none gives a header-only table.
        #[arg(long = "n", value_delimiter = ',', num_args = 0..)]
        n: Vec<u32>,
    },
    /// One ratio on a grid domain.
    #[command(
        after_help = "CSV columns: status,setting,p,norm_u,norm_f,ratio,bound,margin,period,tolerance,error\n\
                      status is `ok`, `existence-failure` or `error`."
    )]
    Grid(GridArgs),
    /// Norm isometry under a disk automorphism for random trig polynomials.
    #[command(
        after_help = "CSV columns: record,trial,seed,p,degree,zeta0_re,zeta0_im,zeta0_tilde_re,zeta0_tilde_im,\
                      norm_before,norm_after,discrepancy,error\n\
                      The final `summary` row carries the largest discrepancy in the discrepancy column."
    )]
    Conformal(ConformalArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 32)]
    pub degree: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// `builtin:disk:R`, `builtin:annulus:r:R`, `builtin:square:L` or a mask file.
    #[arg(long, default_value = "builtin:disk:1")]
    pub domain: String,
    /// Grid spacing for builtin domains; mask files carry their own.
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub h: f64,
    /// `re-z`, `re-z2`, `re-z3`, `im-z`, `log-abs` or `const:C`.
    #[arg(long, default_value = "re-z")]
    pub function: String,
    /// Base point `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub zeta0: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct ConformalArgs {
    /// Map descriptor, e.g. `{"kind":"mobius","parameters":{"a":[0.3,0],"phi":0}}`.
    #[arg(long, default_value = r#"{"kind":"composition","parameters":[]}"#)]
    pub map: String,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub zeta0: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Starting boundary node count.
    #[arg(long, default_value_t = 2048)]
    pub nodes: usize,
}

/// Rendered output and whether a theorem-backed check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(csv_err)?;
        Ok(Self { writer })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_err)
    }

    fn finish(self) -> Result<String> {
        let bytes = self.writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn jsonl(lines: impl IntoIterator<Item = serde_json::Value>) -> String {
    lines.into_iter().map(|v| format!("{v}\n")).collect()
}

/// Parses `re,im`.
pub fn parse_point(text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else {
        return Err(Error::InvalidParameter(format!("expected `re,im`, got `{text}`")));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("bad number `{s}` in `{text}`")))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

/// Builds a domain from a builtin descriptor or a mask file path.
pub fn parse_domain(spec: &str, h: f64) -> Result<GridDomain> {
    let Some(rest) = spec.strip_prefix("builtin:") else {
        return GridDomain::load_mask(spec);
    };
    let parts: Vec<&str> = rest.split(':').collect();
    let nums = |xs: &[&str]| -> Result<Vec<f64>> {
        xs.iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number `{s}` in `{spec}`")))
            })
            .collect()
    };
    let shape = match (parts[0], nums(&parts[1..])?.as_slice()) {
        ("disk", &[radius]) => Shape::Disk { radius },
        ("annulus", &[inner, outer]) => Shape::Annulus { inner, outer },
        ("square", &[side]) => Shape::Square { side },
        _ => return Err(Error::InvalidParameter(format!("unknown domain `{spec}`"))),
    };
    GridDomain::from_shape(shape, h)
}

/// Harmonic test functions by name.
pub fn parse_function(spec: &str) -> Result<Box<dyn Fn(Complex64) -> f64 + Send + Sync>> {
    Ok(match spec {
        "re-z" => Box::new(|z: Complex64| z.re),
        "im-z" => Box::new(|z: Complex64| z.im),
        "re-z2" => Box::new(|z: Complex64| (z * z).re),
        "re-z3" => Box::new(|z: Complex64| (z * z * z).re),
        "log-abs" => Box::new(|z: Complex64| z.norm().ln()),
        _ => {
            let c = spec
                .strip_prefix("const:")
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("unknown function `{spec}`")))?;
            Box::new(move |_| c)
        }
    })
}

/// Whether a `p = 2` margin falls below `−THEOREM_SLACK`; other exponents
/// never fail.
pub fn margin_failure(p: f64, margins: impl IntoIterator<Item = f64>) -> bool {
    p == 2.0 && margins.into_iter().any(|m| !(m >= -THEOREM_SLACK))
}

pub fn sharpness_failure(gaps: impl IntoIterator<Item = f64>) -> bool {
    gaps.into_iter().any(|g| !(g <= SHARPNESS_TOL))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Constants { p } => cmd_constants(p, cli.format.unwrap_or(Format::Csv)),
        Command::Verify(args) => cmd_verify(args, cli.format.unwrap_or(Format::Csv)),
        Command::Sharpness { n } => cmd_sharpness(n, cli.format.unwrap_or(Format::Csv)),
        Command::Grid(args) => cmd_grid(args, cli.format.unwrap_or(Format::Jsonl)),
        Command::Conformal(args) => cmd_conformal(args, cli.format.unwrap_or(Format::Csv)),
    }
}

pub fn cmd_constants(ps: &[f64], format: Format) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(ps.len());
    for &p in ps {
        let q = conjugate_exponent(p)?;
        let (cp, cq) = (verbitsky_constant(p)?, verbitsky_constant(q)?);
        rows.push([p, cp, q, cq, (cp - cq).abs()]);
    }
    let text = match format {
        Format::Csv => {
            let mut t = Table::new(&["p", "c_p", "p_conjugate", "c_p_conjugate", "symmetry_gap"])?;
            for r in &rows {
                t.row(r.map(num))?;
            }
            t.finish()?
        }
        Format::Jsonl => jsonl(rows.iter().map(|r| {
            json!({"p": r[0], "c_p": r[1], "p_conjugate": r[2], "c_p_conjugate": r[3], "symmetry_gap": r[4]})
        })),
    };
    Ok(Outcome { text, failed: false })
}

pub fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Outcome> {
    let s = conjecture_sweep(args.p, args.trials, args.degree, args.seed)?;
    let failed = margin_failure(
        args.p,
        s.reports.iter().filter_map(|t| t.outcome.as_ref().ok().map(|r| r.margin)),
    );
    let bound = verbitsky_constant(args.p)?;
    let text = match format {
        Format::Csv => {
            let mut t = Table::new(&[
                "record", "label", "trial", "seed", "p", "degree", "norm_u", "norm_f", "ratio", "bound", "margin",
                "error", "note",
            ])?;
            for trial in &s.reports {
                let head = [
                    "trial".to_string(),
                    EXPLORATORY.to_string(),
                    trial.trial.to_string(),
                    args.seed.to_string(),
                    num(args.p),
                    args.degree.to_string(),
                ];
                let tail: [String; 7] = match &trial.outcome {
                    Ok(r) => [
                        num(r.norm_u),
                        num(r.norm_f),
                        num(r.ratio),
                        num(r.bound),
                        num(r.margin),
                        String::new(),
                        String::new(),
                    ],
                    Err(e) => [
                        String::new(),
                        String::new(),
                        String::new(),
                        num(bound),
                        String::new(),
                        e.to_string(),
                        String::new(),
                    ],
                };
                t.row(head.iter().chain(tail.iter()))?;
            }
            t.row([
                "summary".to_string(),
                EXPLORATORY.to_string(),
                s.argmax.map(|a| a.to_string()).unwrap_or_default(),
                args.seed.to_string(),
                num(args.p),
                args.degree.to_string(),
                String::new(),
                String::new(),
                opt(s.max_ratio),
                num(bound),
                opt(s.min_margin),
                if s.errors > 0 { format!("{} failed trials", s.errors) } else { String::new() },
                s.argmax_description.clone(),
            ])?;
            t.finish()?
        }
        Format::Jsonl => {
            let rows = s.reports.iter().map(|trial| match &trial.outcome {
                Ok(r) => json!({
                    "record": "trial", "label": EXPLORATORY, "trial": trial.trial, "degree": args.degree,
                    "p": r.p, "norm_u": r.norm_u, "norm_f": r.norm_f, "ratio": r.ratio, "bound": r.bound,
                    "margin": r.margin, "setting": r.setting, "seed": r.seed,
                }),
                Err(e) => json!({
                    "record": "trial", "label": EXPLORATORY, "trial": trial.trial, "degree": args.degree,
                    "p": args.p, "seed": args.seed, "error": e.to_string(),
                }),
            });
            let summary = json!({
                "record": "summary", "label": EXPLORATORY, "p": args.p, "trials": args.trials,
                "degree": args.degree, "seed": args.seed, "bound": bound, "max_ratio": s.max_ratio,
                "argmax": s.argmax, "argmax_description": s.argmax_description, "min_margin": s.min_margin,
                "errors": s.errors,
            });
            jsonl(rows.chain(std::iter::once(summary)))
        }
    };
    Ok(Outcome { text, failed })
}

pub fn cmd_sharpness(ns: &[u32], format: Format) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let r = sharpness_family(n)?;
        rows.push((n, r.ratio, (r.ratio - 2f64.sqrt()).abs()));
    }
    let failed = sharpness_failure(rows.iter().map(|r| r.2));
    let text = match format {
        Format::Csv => {
            let mut t = Table::new(&["n", "ratio", "gap"])?;
            for (n, ratio, gap) in &rows {
                t.row([n.to_string(), num(*ratio), num(*gap)])?;
            }
            t.finish()?
        }
        Format::Jsonl => jsonl(rows.iter().map(|(n, ratio, gap)| json!({"n": n, "ratio": ratio, "gap": gap}))),
    };
    Ok(Outcome { text, failed })
}

pub fn cmd_grid(args: &GridArgs, format: Format) -> Result<Outcome> {
    let dom = Arc::new(parse_domain(&args.domain, args.h)?);
    let f = parse_function(&args.function)?;
    let zeta0 = parse_point(&args.zeta0)?;
    let u = GridField::from_fn(&dom, f)?;
    let setting = format!("{} function={}", dom.describe(), args.function);
    let record = match riesz_ratio_grid(&u, zeta0, args.p) {
        Ok(r) => json!({
            "status": "ok", "setting": r.setting, "function": args.function, "p": r.p,
            "norm_u": r.norm_u, "norm_f": r.norm_f, "ratio": r.ratio, "bound": r.bound, "margin": r.margin,
        }),
        Err(Error::ExistenceFailure { period, tolerance }) => json!({
            "status": "existence-failure", "setting": setting, "p": args.p,
            "period": period, "tolerance": tolerance,
            "error": Error::ExistenceFailure { period, tolerance }.to_string(),
        }),
        Err(e) => json!({"status": "error", "setting": setting, "p": args.p, "error": e.to_string()}),
    };
    let text = match format {
        Format::Jsonl => jsonl([record]),
        Format::Csv => {
            let mut t = Table::new(&[
                "status", "setting", "p", "norm_u", "norm_f", "ratio", "bound", "margin", "period", "tolerance", "error",
            ])?;
            let s = |k: &str| record[k].as_str().unwrap_or_default().to_string();
            let x = |k: &str| opt(record[k].as_f64());
            t.row([
                s("status"),
                s("setting"),
                x("p"),
                x("norm_u"),
                x("norm_f"),
                x("ratio"),
                x("bound"),
                x("margin"),
                x("period"),
                x("tolerance"),
                s("error"),
            ])?;
            t.finish()?
        }
    };
    Ok(Outcome { text, failed: false })
}

pub fn cmd_conformal(args: &ConformalArgs, format: Format) -> Result<Outcome> {
    let map = ConformalMap::from_json(&args.map)?;
    if !map.is_disk_automorphism() {
        return Err(Error::NotAutomorphism(map.to_json()));
    }
    let zeta0 = parse_point(&args.zeta0)?;
    let results: Vec<_> = (0..args.trials)
        .into_par_iter()
        .map(|trial| {
            let u = random_real_polynomial(&mut trial_rng(args.seed, trial), args.degree);
            isometry_check(&u, &map, zeta0, args.p, args.nodes)
        })
        .collect();
    let max_disc = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|r| r.discrepancy)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    let errors = results.iter().filter(|r| r.is_err()).count();
    let text = match format {
        Format::Csv => {
            let mut t = Table::new(&[
                "record",
                "trial",
                "seed",
                "p",
                "degree",
                "zeta0_re",
                "zeta0_im",
                "zeta0_tilde_re",
                "zeta0_tilde_im",
                "norm_before",
                "norm_after",
                "discrepancy",
                "error",
            ])?;
            for (trial, r) in results.iter().enumerate() {
                let head = [
                    "trial".to_string(),
                    trial.to_string(),
                    args.seed.to_string(),
                    num(args.p),
                    args.degree.to_string(),
                    num(zeta0.re),
                    num(zeta0.im),
                ];
                let tail: [String; 6] = match r {
                    Ok(r) => [
                        num(r.zeta0_tilde.re),
                        num(r.zeta0_tilde.im),
                        num(r.norm_before),
                        num(r.norm_after),
                        num(r.discrepancy),
                        String::new(),
                    ],
                    Err(e) => [
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string(),
                    ],
                };
                t.row(head.iter().chain(tail.iter()))?;
            }
            t.row([
                "summary".to_string(),
                String::new(),
                args.seed.to_string(),
                num(args.p),
                args.degree.to_string(),
                num(zeta0.re),
                num(zeta0.im),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                opt(max_disc),
                if errors > 0 { format!("{errors} failed trials") } else { String::new() },
            ])?;
            t.finish()?
        }
        Format::Jsonl => {
            let rows = results.iter().enumerate().map(|(trial, r)| match r {
                Ok(r) => json!({
                    "record": "trial", "trial": trial, "seed": args.seed, "p": args.p, "degree": args.degree,
                    "zeta0": [zeta0.re, zeta0.im], "zeta0_tilde": [r.zeta0_tilde.re, r.zeta0_tilde.im],
                    "norm_before": r.norm_before, "norm_after": r.norm_after, "discrepancy": r.discrepancy,
                }),
                Err(e) => json!({
                    "record": "trial", "trial": trial, "seed": args.seed, "p": args.p, "degree": args.degree,
                    "error": e.to_string(),
                }),
            });
            let summary = json!({
                "record": "summary", "map": map, "seed": args.seed, "p": args.p, "degree": args.degree,
                "trials": args.trials, "zeta0": [zeta0.re, zeta0.im], "max_discrepancy": max_disc,
                "errors": errors,
            });
            jsonl(rows.chain(std::iter::once(summary)))
        }
    };
    Ok(Outcome { text, failed: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_gates() {
        assert!(!margin_failure(2.0, [0.1, 0.0, -1e-10]));
        assert!(margin_failure(2.0, [0.1, -2e-9]));
        assert!(margin_failure(2.0, [f64::NAN]));
        assert!(!margin_failure(3.0, [-1.0]));
        assert!(!sharpness_failure([0.0, 1e-12]));
        assert!(sharpness_failure([2e-12]));
        assert!(!sharpness_failure([]));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_point(" -0.5, 2").unwrap(), Complex64::new(-0.5, 2.0));
        assert!(parse_point("1").is_err());
        assert!(parse_point("1,x").is_err());
        let d = parse_domain("builtin:annulus:0.5:1.5", 0.125).unwrap();
        assert_eq!(d.shape(), Some(Shape::Annulus { inner: 0.5, outer: 1.5 }));
        assert!(parse_domain("builtin:disk", 0.125).is_err());
        assert!(parse_domain("builtin:disk:1:2", 0.125).is_err());
        let f = parse_function("const:2.5").unwrap();
        assert_eq!(f(Complex64::new(3.0, 1.0)), 2.5);
        assert_eq!(parse_function("re-z2").unwrap()(Complex64::new(1.0, 2.0)), -3.0);
        assert!(parse_function("const:").is_err());
    }

    #[test]
    fn in_process_matches_rendering() {
        let cli = Cli::try_parse_from(["lumer", "sharpness", "--n", "3"]).unwrap();
        let out = run(&cli).unwrap();
        assert!(!out.failed);
        assert!(out.text.starts_with("n,ratio,gap\n3,1.41421356237309"));
        let cli = Cli::try_parse_from(["lumer", "constants", "--p", "4", "--format", "jsonl"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(run(&cli).unwrap().text.trim()).unwrap();
        assert!((v["c_p"].as_f64().unwrap() - 2.613125929752753).abs() < 1e-14);
    }
}
