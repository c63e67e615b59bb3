//! `qht`: evaluate Mellin transforms, build weighted shifts, verify roots,
//! test Gamma-ratio rationality and scan commutant candidates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use qhtoeplitz::commutant::{scan, FEASIBLE_TOL};
use qhtoeplitz::mellin::{mellin_eval, MellinDomainPoint};
use qhtoeplitz::operators::{commutator, operator_norm_estimate, shift_from_symbol, WeightedShift};
use qhtoeplitz::report::{csv_table, fmt_f64, matrix_csv, scan_csv, scan_svg, to_json, weights_csv, Meta};
use qhtoeplitz::roots::{verify_root, RootSpec};
use qhtoeplitz::special::{is_rational_criterion, rational_detect_oracle, GammaRatio};

const EXIT_PARSE: u8 = 2;
const EXIT_EVAL: u8 = 3;
const EXIT_ROOT_FAIL: u8 = 4;
const EXIT_DISAGREE: u8 = 5;
const EXIT_UNEXPECTED: u8 = 6;

#[derive(Parser)]
#[command(name = "qht", version, about = "Quasihomogeneous Toeplitz operators as weighted shifts")]
struct Cli {
    /// Write the data section here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the Mellin transform of a radial symbol.
    Mellin {
        /// `r^n` or `sum:c*r^n+...`
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        /// Evaluation points with Re z >= 2 (`4`, `2.5+1i`); repeat or comma-separate.
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        z: Vec<String>,
        #[arg(long, default_value_t = 1e-12)]
        quad_tol: f64,
    },
    /// Weighted-shift operations on `e<p>:<radial>` symbols.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Build and verify the calibrated root of `T_{e^{ipθ}r^n}`.
    Root {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        p: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long = "K", default_value_t = 200)]
        k: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Compare the divisibility criterion with the interpolation oracle.
    Rational {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        delta: u32,
        /// Numerator offsets a b, denominator offsets c d.
        #[arg(long, num_args = 4, allow_hyphen_values = true)]
        offsets: Vec<i64>,
        #[arg(long, default_value_t = 12)]
        max_degree: usize,
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// Fit constants for every (m, l) cell and report feasibility.
    Scan {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Largest m; defaults to 2s.
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long = "K", default_value_t = 50)]
        k: usize,
        #[arg(long, default_value_t = FEASIBLE_TOL)]
        tol: f64,
        /// Also write an SVG of residual against k next to --out.
        #[arg(long, requires = "out")]
        plot: bool,
    },
}

#[derive(Args)]
struct OperandA {
    #[arg(long)]
    a: String,
    #[arg(long = "K", value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
}

#[derive(Subcommand)]
enum OpAction {
    /// Apply A to a coefficient vector.
    Apply {
        #[command(flatten)]
        op: OperandA,
        /// Input coefficients, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// The (K+1)x(K+1) section of A.
    Matrix {
        #[command(flatten)]
        op: OperandA,
    },
    /// Weights of [A, B] for k <= K.
    Commutator {
        #[command(flatten)]
        op: OperandA,
        #[arg(long)]
        b: String,
    },
    /// Supremum norm estimate of the section k <= K.
    Norm {
        #[command(flatten)]
        op: OperandA,
    },
}

enum Failure {
    Parse(String),
    Eval(String),
    Io(String),
}

impl From<qhtoeplitz::Error> for Failure {
    fn from(e: qhtoeplitz::Error) -> Self {
        Failure::Eval(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    meta: Meta,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, data: &T) -> Result<(), Failure> {
        self.emit(&to_json(&self.meta, data)?)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let ctx = Ctx { meta: Meta::new(argv.iter().skip(1).cloned()), out: cli.out, format: cli.format };
    let result = match cli.command {
        Command::Mellin { symbol, z, quad_tol } => cmd_mellin(&ctx, &symbol, &z, quad_tol),
        Command::Op { action } => cmd_op(&ctx, action),
        Command::Root { p, n, k, tol } => cmd_root(&ctx, p, n, k, tol),
        Command::Rational { delta, offsets, max_degree, samples } => cmd_rational(&ctx, delta, &offsets, max_degree, samples),
        Command::Scan { p, s, n, d, m_max, k, tol, plot } => cmd_scan(&ctx, [p, s, n, d], m_max, k, tol, plot),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Eval(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_EVAL)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Parse(format!("--{name} must be positive, got {v}")))
    }
}

fn cmd_mellin(ctx: &Ctx, symbol: &str, zs: &[String], quad_tol: f64) -> Outcome {
    positive("quad-tol", quad_tol)?;
    let radial = spec::parse_radial(symbol).map_err(Failure::Parse)?;
    let points = zs.iter().map(|z| spec::parse_complex(z)).collect::<Result<Vec<_>, _>>().map_err(Failure::Parse)?;
    let mut rows = Vec::new();
    for z in points {
        let v = mellin_eval(&radial, MellinDomainPoint::new(z)?, quad_tol)?;
        rows.push((z, v));
    }
    #[derive(Serialize)]
    struct Table<'a> {
        symbol: &'a str,
        quad_tol: f64,
        values: Vec<(Complex64, Complex64)>,
    }
    match ctx.format {
        Some(Format::Json) => ctx.json(&Table { symbol, quad_tol, values: rows })?,
        _ => ctx.emit(&csv_table(
            &["z_re", "z_im", "value_re", "value_im"],
            rows.iter().map(|(z, v)| vec![fmt_f64(z.re), fmt_f64(z.im), fmt_f64(v.re), fmt_f64(v.im)]),
        ))?,
    }
    Ok(0)
}

fn operand(spec_text: &str, k_max: usize) -> Result<WeightedShift, Failure> {
    let sym = spec::parse_symbol(spec_text).map_err(Failure::Parse)?;
    Ok(shift_from_symbol(&sym, k_max)?)
}

#[derive(Serialize)]
struct WeightTable<'a> {
    a: &'a str,
    b: Option<&'a str>,
    operator: &'a WeightedShift,
}

fn cmd_op(ctx: &Ctx, action: OpAction) -> Outcome {
    match action {
        OpAction::Apply { op, coeffs } => {
            let a = operand(&op.a, op.k as usize)?;
            let input = spec::parse_complex_list(&coeffs).map_err(Failure::Parse)?;
            let output = a.apply(&input)?;
            match ctx.format {
                Some(Format::Json) => ctx.json(&output)?,
                _ => ctx.emit(&csv_table(
                    &["index", "re", "im"],
                    output.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_f64(v.re), fmt_f64(v.im)]),
                ))?,
            }
        }
        OpAction::Matrix { op } => {
            let a = operand(&op.a, op.k as usize)?;
            match ctx.format {
                Some(Format::Json) => ctx.json(&WeightTable { a: &op.a, b: None, operator: &a })?,
                _ => ctx.emit(&matrix_csv(&a.matrix(op.k as usize + 1)?))?,
            }
        }
        OpAction::Commutator { op, b } => {
            let k = op.k as usize;
            let probe_a = spec::parse_symbol(&op.a).map_err(Failure::Parse)?;
            let probe_b = spec::parse_symbol(&b).map_err(Failure::Parse)?;
            let reach = k + probe_a.degree.max(probe_b.degree) as usize;
            let c = commutator(&operand(&op.a, reach)?, &operand(&b, reach)?)?.truncate(k)?;
            match ctx.format {
                Some(Format::Json) => ctx.json(&WeightTable { a: &op.a, b: Some(&b), operator: &c })?,
                _ => ctx.emit(&weights_csv(&c))?,
            }
        }
        OpAction::Norm { op } => {
            let a = operand(&op.a, op.k as usize)?;
            let norm = operator_norm_estimate(&a);
            match ctx.format {
                Some(Format::Json) => ctx.json(&serde_json::json!({ "a": op.a, "k": op.k, "norm": norm }))?,
                _ => ctx.emit(&csv_table(&["norm"], [vec![fmt_f64(norm)]]))?,
            }
        }
    }
    Ok(0)
}

fn cmd_root(ctx: &Ctx, p: u32, n: u32, k: usize, tol: f64) -> Outcome {
    positive("tol", tol)?;
    let spec = RootSpec::calibrated(p, n, k + p as usize - 1)?;
    let rep = verify_root(&spec, k, tol)?;
    match ctx.format {
        Some(Format::Csv) => ctx.emit(&csv_table(
            &["p", "n", "calibration", "max_relative_deviation", "worst_k", "pass"],
            [vec![
                p.to_string(),
                n.to_string(),
                fmt_f64(rep.calibration),
                fmt_f64(rep.max_relative_deviation),
                rep.worst_k.to_string(),
                rep.pass.to_string(),
            ]],
        ))?,
        _ => ctx.json(&rep)?,
    }
    eprintln!(
        "root p={p} n={n}: {} (max relative deviation {:.3e} at k={})",
        if rep.pass { "pass" } else { "FAIL" },
        rep.max_relative_deviation,
        rep.worst_k
    );
    Ok(if rep.pass { 0 } else { EXIT_ROOT_FAIL })
}

fn cmd_rational(ctx: &Ctx, delta: u32, offsets: &[i64], max_degree: usize, samples: usize) -> Outcome {
    let &[a, b, c, d] = offsets else {
        return Err(Failure::Parse("--offsets takes exactly four integers".into()));
    };
    let ratio = GammaRatio::two_by_two(delta, a, b, c, d).map_err(|e| Failure::Parse(e.to_string()))?;
    let criterion = is_rational_criterion(&ratio).map_err(|e| Failure::Parse(e.to_string()))?;
    let found = rational_detect_oracle(&ratio, max_degree, samples)?;
    let agree = criterion == found.is_some();

    #[derive(Serialize)]
    struct Verdict {
        delta: u32,
        offsets: [i64; 4],
        lambda: i64,
        criterion: bool,
        oracle: bool,
        rational_fn: Option<String>,
        agree: bool,
    }
    let v = Verdict {
        delta,
        offsets: [a, b, c, d],
        lambda: ratio.lambda(),
        criterion,
        oracle: found.is_some(),
        rational_fn: found.map(|r| r.to_string()),
        agree,
    };
    let word = |r: bool| if r { "rational" } else { "not rational" };
    match ctx.format {
        Some(Format::Json) => ctx.json(&v)?,
        Some(Format::Csv) => ctx.emit(&csv_table(
            &["delta", "a", "b", "c", "d", "lambda", "criterion", "oracle", "rational_fn", "agree"],
            [vec![
                delta.to_string(),
                a.to_string(),
                b.to_string(),
                c.to_string(),
                d.to_string(),
                v.lambda.to_string(),
                criterion.to_string(),
                v.oracle.to_string(),
                v.rational_fn.clone().unwrap_or_default(),
                agree.to_string(),
            ]],
        ))?,
        None => ctx.emit(&format!(
            "criterion: {}\noracle: {}{}\nagree: {agree}\n",
            word(criterion),
            word(v.oracle),
            v.rational_fn.as_ref().map(|r| format!(", {r}")).unwrap_or_default()
        ))?,
    }
    Ok(if agree { 0 } else { EXIT_DISAGREE })
}

fn cmd_scan(ctx: &Ctx, [p, s, n, d]: [u32; 4], m_max: Option<u32>, k: usize, tol: f64, plot: bool) -> Outcome {
    positive("tol", tol)?;
    if !(1 <= p && p < s && n >= 1 && d >= 1) {
        return Err(Failure::Parse(format!("scan needs 1 <= p < s and n, d >= 1; got p={p}, s={s}, n={n}, d={d}")));
    }
    if k < 1 {
        return Err(Failure::Parse("--K must be at least 1".into()));
    }
    let table = scan(p, s, n, d, k, tol, m_max)?;
    match ctx.format {
        Some(Format::Csv) => ctx.emit(&scan_csv(&table))?,
        _ => ctx.json(&table)?,
    }
    if plot {
        if let Some(out) = &ctx.out {
            write_file(&out.with_extension("svg"), &scan_svg(&table))?;
        }
    }
    let cells: Vec<String> = table.feasible_set().iter().map(|(m, l)| format!("({m},{l})")).collect();
    let mut summary = format!("feasible set: {{{}}}", cells.join(","));
    if table.degenerate() {
        summary.push_str("; all cells degenerate");
    } else if let Some(margin) = table.margin() {
        summary.push_str(&format!("; margin {margin:.6e}"));
    }
    let unexpected = table.unexpected();
    if !unexpected.is_empty() {
        summary.push_str(&format!("; UNEXPECTED feasible cells {unexpected:?}"));
    }
    eprintln!("{summary}");
    Ok(if unexpected.is_empty() { 0 } else { EXIT_UNEXPECTED })
}
