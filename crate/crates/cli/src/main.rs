use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use unifactor::elimination::eliminate_four;
use unifactor::fields::io::FieldV1;
use unifactor::fields::{GridDomain, MatrixField, ScalarField};
use unifactor::identities::{identity_report, MAX_K};
use unifactor::linalg::CMat;
use unifactor::pipeline::plot::scalar_plot_svg;
use unifactor::pipeline::{
    circle_problem, degenerate_problem, exponentialize, factor_automorphism, replay, verify_certificate, Backend,
    Certificate, Problem, RunConfig,
};
use unifactor::scalar::C64;
use unifactor::splitting::{split_general, SplitOptions};

const EXIT_FAIL: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "unifactor", version, about = "Factor special automorphisms of rank-2 bundles into unipotent replicas")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Reconstruction tolerance per factor.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Closeness bound for subdivision steps (at most 1/2).
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Replay arithmetic.
    #[arg(long, global = true, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Directory for SVG plots.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Circle,
    Degenerate,
}

#[derive(Subcommand)]
enum Command {
    /// Check the exact polynomial identities for Q^1..Q^k.
    VerifyIdentities {
        #[arg(long)]
        k: usize,
        /// Random samples for the gradient check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Four-factor elimination of one SL(2) matrix.
    Eliminate {
        /// JSON 2×2 matrix, inline or a file path. Entries are numbers or [re, im].
        #[arg(long)]
        matrix: String,
        /// Pivot floor.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Split F into factors that are the identity on the zero sets of the functions.
    Split {
        #[arg(long)]
        input: PathBuf,
        /// JSON array of scalar field-v1 blocks; defaults to the pairs' functions.
        #[arg(long)]
        functions: Option<PathBuf>,
    },
    /// Run the full pipeline and write a certificate.
    Factor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "cert.json")]
        out: PathBuf,
    },
    /// Replay a certificate against its input.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Rewrite a certificate as a product of exponentials.
    Exponentialize {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "cert-exp.json")]
        out: PathBuf,
    },
    /// Write one of the shipped example problems.
    MakeExample {
        #[arg(value_enum)]
        example: Example,
        /// Grid samples.
        #[arg(long)]
        samples: Option<usize>,
        /// Homotopy time frames.
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_problem(path: &Path) -> Result<Problem> {
    Problem::from_json(&read(path)?).with_context(|| format!("loading problem {}", path.display()))
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn plot(global: &Global, name: &str, domain: &GridDomain, values: &[f64], title: &str) -> Result<()> {
    let Some(dir) = &global.plot else {
        return Ok(());
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join(name), &scalar_plot_svg(domain, values, title, true))
}

fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::VerifyIdentities { k, samples, seed } => {
            if *k == 0 || *k > MAX_K {
                bail!("--k must be in 1..={MAX_K}");
            }
            let report = identity_report(*k, *samples, *seed)?;
            print(&serde_json::to_value(&report)?);
            Ok(report.pass)
        }
        Command::Eliminate { matrix, delta } => eliminate(g, matrix, *delta),
        Command::Split { input, functions } => split(g, input, functions.as_deref()),
        Command::Factor { input, config, out } => factor(g, input, config.as_deref(), out),
        Command::Check { input, cert } => check(g, input, cert),
        Command::Exponentialize { cert, input, out } => expo(input, cert, out),
        Command::MakeExample {
            example,
            samples,
            frames,
            out,
        } => {
            let p = match example {
                Example::Circle => circle_problem(samples.unwrap_or(256), frames.unwrap_or(65)),
                Example::Degenerate => degenerate_problem(samples.unwrap_or(41)),
            };
            write(out, &p.to_json())?;
            print(&json!({ "written": out, "input_digest": p.digest }));
            Ok(true)
        }
    }
}

fn entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().ok_or_else(|| anyhow!("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| anyhow!("bad real part"))?;
            let im = a[1].as_f64().ok_or_else(|| anyhow!("bad imaginary part"))?;
            Ok(C64::new(re, im))
        }
        other => bail!("matrix entry must be a number or [re, im], got {other}"),
    }
}

fn parse_matrix(text: &str) -> Result<CMat> {
    let v: Value = serde_json::from_str(text).context("parsing matrix JSON")?;
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(|| anyhow!("matrix must have two rows"))?;
    let row = |r: &Value| -> Result<(C64, C64)> {
        let a = r.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("each row needs two entries"))?;
        Ok((entry(&a[0])?, entry(&a[1])?))
    };
    let (a11, a12) = row(&rows[0])?;
    let (a21, a22) = row(&rows[1])?;
    Ok(CMat::new(a11, a12, a21, a22))
}

fn eliminate(g: &Global, matrix: &str, delta: f64) -> Result<bool> {
    let text = if matrix.trim_start().starts_with('[') {
        matrix.to_string()
    } else {
        read(Path::new(matrix))?
    };
    let a = parse_matrix(&text)?;
    let tol = g.tol.unwrap_or(1e-10);
    let quad = eliminate_four(&a, delta, tol)?;
    let residual = quad.product().dist(&a);
    print(&json!({ "quad": quad.z, "residual": residual }));
    Ok(residual <= tol)
}

fn split(g: &Global, input: &Path, functions: Option<&Path>) -> Result<bool> {
    let p = load_problem(input)?;
    let fs: Vec<ScalarField> = match functions {
        Some(path) => {
            let blocks: Vec<FieldV1> = serde_json::from_str(&read(path)?).context("parsing functions")?;
            blocks.iter().map(|b| b.to_scalar()).collect::<Result<_, _>>()?
        }
        None => p.pairs.iter().map(|q| q.f().clone()).collect(),
    };
    let opts = SplitOptions::default();
    let factors = split_general(&p.f, &p.f_t, &fs, &opts)?;
    let product = factors
        .iter()
        .fold(MatrixField::identity(p.f.domain()), |acc, sf| acc.mul(&sf.g));
    let residuals: Vec<f64> = product.values().iter().zip(p.f.values()).map(|(a, b)| a.dist(b)).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let markers: Vec<f64> = factors
        .iter()
        .map(|sf| sf.max_deviation_on(&fs[sf.marker].zero_set(opts.zero_tol)))
        .collect();
    plot(g, "split-residual.svg", p.f.domain(), &residuals, "split product residual")?;
    let tol = g.tol.unwrap_or(1e-12) * factors.len() as f64;
    let pass = max_residual <= tol && markers.iter().all(|&m| m <= tol);
    print(&json!({
        "factors": factors.len(),
        "max_residual": max_residual,
        "marker_deviation": markers,
        "tolerance": tol,
        "pass": pass,
    }));
    Ok(pass)
}

fn run_config(g: &Global, path: Option<&Path>) -> Result<RunConfig> {
    let mut c = match path {
        Some(p) => serde_json::from_str(&read(p)?).context("parsing config")?,
        None => RunConfig::default(),
    };
    if let Some(t) = g.tol {
        c.tol = t;
    }
    if let Some(e) = g.epsilon {
        c.epsilon = e;
    }
    if let Some(b) = g.backend {
        c.backend = b;
    }
    c.validate()?;
    Ok(c)
}

fn residual_plot(g: &Global, p: &Problem, cert: &Certificate, name: &str) -> Result<()> {
    if g.plot.is_none() {
        return Ok(());
    }
    let product = if cert.factors.is_empty() {
        MatrixField::identity(p.f.domain())
    } else {
        replay(&p.pairs, &cert.replicas()?)?
    };
    let res: Vec<f64> = product.values().iter().zip(p.f.values()).map(|(a, b)| a.dist(b)).collect();
    plot(g, name, p.f.domain(), &res, "certificate residual")?;
    let mut h_max = vec![0.0f64; p.f.len()];
    for fct in &cert.factors {
        for (m, v) in h_max.iter_mut().zip(fct.h.to_scalar()?.values()) {
            *m = m.max(v.norm());
        }
    }
    plot(g, "h-max.svg", p.f.domain(), &h_max, "max |h| over factors")
}

fn factor(g: &Global, input: &Path, config: Option<&Path>, out: &Path) -> Result<bool> {
    let p = load_problem(input)?;
    let cfg = run_config(g, config)?;
    let cert = factor_automorphism(&p.f, &p.f_t, &p.pairs, &cfg, &p.digest)?;
    write(out, &cert.to_json())?;
    let report = verify_certificate(&p.f, &p.pairs, &cert, cfg.backend, Some(&p.digest))?;
    residual_plot(g, &p, &cert, "residual.svg")?;
    print(&json!({
        "certificate": out,
        "factor_count": cert.factor_count,
        "max_residual": cert.max_residual,
        "verify": report,
    }));
    Ok(report.pass)
}

fn check(g: &Global, input: &Path, cert_path: &Path) -> Result<bool> {
    let p = load_problem(input)?;
    let cert = Certificate::from_json(&read(cert_path)?)?;
    let backend = g.backend.unwrap_or(cert.config.backend);
    let report = verify_certificate(&p.f, &p.pairs, &cert, backend, Some(&p.digest))?;
    residual_plot(g, &p, &cert, "check-residual.svg")?;
    print(&serde_json::to_value(&report)?);
    Ok(report.pass)
}

fn expo(input: &Path, cert_path: &Path, out: &Path) -> Result<bool> {
    let p = load_problem(input)?;
    let cert = Certificate::from_json(&read(cert_path)?)?;
    let e = exponentialize(&cert, &p.pairs)?;
    write(out, &e.to_json())?;
    let diff = match e.replay()? {
        Some(b) => replay(&p.pairs, &cert.replicas()?)?.sup_dist(&b),
        None => 0.0,
    };
    print(&json!({
        "written": out,
        "factor_count": e.factor_count,
        "replay_difference": diff,
    }));
    Ok(diff <= 1e-12)
}
