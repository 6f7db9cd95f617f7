//! Command-line front end: cusp classification, closed-form limit constants
//! with optional numeric verification, identity suites, batch sweeps, and
//! eta-quotient cusp orders.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage/parse error,
//! 3 numerical-domain error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use mockrad::error::Error;
use mockrad::eta_quotient::EtaQuotient;
use mockrad::exact::{in_q, in_q_prime, k2_of, k_prime_of, Cusp, Fraction, SpecParams};
use mockrad::identities::run_identity;
use mockrad::radial::{
    classify, closed_form, cusps_up_to, verification_t_grid, verify, verify_with_grid, VerifyReport,
};
use mockrad::report::{LimitRecord, CSV_HEADER, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "mockrad",
    about = "Radial limits of the universal mock theta function g2 at roots of unity",
    version
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Verification tolerance (also via MOCK_RADIAL_TOLERANCE).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Override the radial grid: comma-separated decreasing t values.
    #[arg(long, global = true, value_name = "T,T,...")]
    t_grid: Option<String>,
    /// Seed for the randomized identity suites.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 4)]
    parallelism: usize,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a cusp: case tag, derived denominators, set memberships.
    Classify {
        /// zeta offset a/b
        zeta: String,
        /// q-power A/B
        power: String,
        /// cusp h/k
        cusp: String,
    },
    /// Closed-form limit constant, optionally checked against the radial numerics.
    Limit {
        zeta: String,
        power: String,
        cusp: String,
        /// Also run the numeric radial extrapolation and report the difference.
        #[arg(long)]
        numeric: bool,
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
    /// Run a named identity suite.
    VerifyIdentity {
        name: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Verify every cusp h/k with k <= kmax and emit a table.
    Sweep {
        zeta: String,
        power: String,
        #[arg(long)]
        kmax: i64,
        /// Write the table to a file instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Exact order of vanishing of an eta quotient at a cusp.
    EtaOrder {
        /// e.g. "q^(-1/2)*eta(4)^5*eta(2)^-4"
        quotient: String,
        cusp: String,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidConfig(_) | Error::ZeroDenominator => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn tolerance(config: &ConfigArgs) -> Result<f64, Failure> {
    let tol = match (
        config.tolerance,
        std::env::var("MOCK_RADIAL_TOLERANCE").ok(),
    ) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| Failure::Usage(format!("MOCK_RADIAL_TOLERANCE is not a number: `{s}`")))?,
        (None, None) => 1e-3,
    };
    if !(1e-10..=1e-1).contains(&tol) {
        return Err(Failure::Usage(format!(
            "tolerance must lie in [1e-10, 1e-1], got {tol}"
        )));
    }
    Ok(tol)
}

fn grid_override(config: &ConfigArgs) -> Result<Option<Vec<f64>>, Failure> {
    let Some(src) = &config.t_grid else {
        return Ok(None);
    };
    let ts: Vec<f64> = src
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("invalid --t-grid `{src}`")))?;
    if ts.is_empty() || ts.windows(2).any(|w| w[0] <= w[1]) || *ts.last().unwrap() <= 0.0 {
        return Err(Failure::Usage(
            "--t-grid must be strictly decreasing and positive".into(),
        ));
    }
    Ok(Some(ts))
}

/// Parse a fraction, reporting canonicalization (reduction or mod-1) on stderr.
fn parse_canonical(label: &str, s: &str, mod1: bool) -> Result<Fraction, Failure> {
    let f = Fraction::from_str(s)?;
    let canon = if mod1 { f.mod1() } else { f };
    if canon.to_string() != s.trim() {
        eprintln!("note: {label} `{s}` canonicalized to {canon}");
    }
    Ok(canon)
}

fn parse_inputs(zeta: &str, power: &str, cusp: &str) -> Result<(SpecParams, Cusp), Failure> {
    let z = parse_canonical("a/b", zeta, true)?;
    let p = parse_canonical("A/B", power, true)?;
    let c = parse_canonical("h/k", cusp, true)?;
    let cusp = Cusp::new(c.numer(), c.denom()).map_err(Failure::from)?;
    Ok((SpecParams::new(z, p), cusp))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Classify { zeta, power, cusp } => cmd_classify(cli, zeta, power, cusp),
        Command::Limit {
            zeta,
            power,
            cusp,
            numeric,
            json,
        } => cmd_limit(cli, zeta, power, cusp, *numeric, *json),
        Command::VerifyIdentity { name, samples } => cmd_verify_identity(cli, name, *samples),
        Command::Sweep {
            zeta,
            power,
            kmax,
            out,
        } => cmd_sweep(cli, zeta, power, *kmax, out.as_deref()),
        Command::EtaOrder { quotient, cusp } => cmd_eta_order(cli, quotient, cusp),
    }
}

fn cmd_classify(cli: &Cli, zeta: &str, power: &str, cusp: &str) -> Result<(), Failure> {
    let (params, c) = parse_inputs(zeta, power, cusp)?;
    let case = classify(&params, &c);
    let (k2, k2p) = k2_of(&c, params.big_b());
    if cli.config.format == Format::Json {
        let v = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "params": params.to_string(),
            "cusp": c.to_string(),
            "case": case,
            "correction": case.correction(),
            "k_prime": k_prime_of(&c, params.big_b()),
            "k2": k2,
            "k2_prime": k2p,
            "in_q": in_q(&params, &c),
            "in_q_prime": in_q_prime(&params, &c),
        });
        println!("{v}");
    } else {
        println!("params {params} at cusp {c}");
        println!("  case        {case}");
        println!("  correction  {}", case.correction());
        println!("  k'          {}", k_prime_of(&c, params.big_b()));
        println!("  k2, k2'     {k2}, {k2p}");
        println!("  in Q        {}", in_q(&params, &c));
        println!("  in Q'       {}", in_q_prime(&params, &c));
    }
    Ok(())
}

fn fmt_c(v: Complex64) -> String {
    format!("{:.16e} {:+.16e}i", v.re, v.im)
}

fn cmd_limit(
    cli: &Cli,
    zeta: &str,
    power: &str,
    cusp: &str,
    numeric: bool,
    json: bool,
) -> Result<(), Failure> {
    let (params, c) = parse_inputs(zeta, power, cusp)?;
    let tol = tolerance(&cli.config)?;
    let closed = closed_form(&params, &c)?;

    let report: Option<VerifyReport> = if numeric {
        let grid = grid_override(&cli.config)?.unwrap_or_else(|| verification_t_grid(&params, &c));
        Some(verify_with_grid(&params, &c, tol, &grid)?)
    } else {
        None
    };

    let as_json = json || cli.config.format == Format::Json;
    if as_json {
        let rec = match &report {
            Some(rep) => LimitRecord::from_verify(rep),
            None => LimitRecord {
                schema_version: SCHEMA_VERSION,
                params: params.to_string(),
                cusp: c.to_string(),
                case: closed.case,
                correction: closed.correction,
                q_re: closed.constant.re,
                q_im: closed.constant.im,
                numeric_re: None,
                numeric_im: None,
                abs_diff: None,
                status: "closed-form".into(),
            },
        };
        println!("{}", serde_json::to_string(&rec).expect("serializable"));
    } else if cli.config.format == Format::Csv {
        let rec = match &report {
            Some(rep) => LimitRecord::from_verify(rep),
            None => LimitRecord {
                schema_version: SCHEMA_VERSION,
                params: params.to_string(),
                cusp: c.to_string(),
                case: closed.case,
                correction: closed.correction,
                q_re: closed.constant.re,
                q_im: closed.constant.im,
                numeric_re: None,
                numeric_im: None,
                abs_diff: None,
                status: "closed-form".into(),
            },
        };
        println!("{CSV_HEADER}");
        println!("{}", rec.to_csv_row());
    } else {
        println!(
            "params {params} at cusp {c}: case {}, correction {}",
            closed.case, closed.correction
        );
        println!("  Q = {}", fmt_c(closed.constant));
        println!(
            "  {} terms (k_eff = {}):",
            closed.terms.len(),
            closed.k_effective
        );
        for (n, t) in closed.terms.iter().enumerate() {
            println!("    n = {n}: {}", fmt_c(*t));
        }
        if let Some(rep) = &report {
            println!("  numeric   = {}", fmt_c(rep.numeric.value));
            println!("  |diff|    = {:.3e} (tolerance {:.1e})", rep.abs_diff, tol);
            println!("  fit error = {:.3e}", rep.numeric.error_estimate);
            if !rep.numeric.dropped.is_empty() {
                println!("  dropped t = {:?}", rep.numeric.dropped);
            }
            println!("  status    = {}", if rep.pass { "pass" } else { "fail" });
        }
    }
    if let Some(rep) = report {
        if !rep.pass {
            return Err(Failure::Verification(format!(
                "cusp {c}: |closed - numeric| = {:.3e} exceeds {tol:.1e}",
                rep.abs_diff
            )));
        }
    }
    Ok(())
}

fn cmd_verify_identity(cli: &Cli, name: &str, samples: usize) -> Result<(), Failure> {
    let rep = run_identity(name, samples, cli.config.seed).map_err(|e| match e {
        Error::InvalidConfig(msg) => Failure::Usage(msg),
        other => Failure::from(other),
    })?;
    if cli.config.format == Format::Json {
        let v = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "identity": rep.name,
            "samples": rep.samples,
            "worst_residual": rep.worst_residual,
            "tolerance": rep.tolerance,
            "status": if rep.pass { "pass" } else { "fail" },
        });
        println!("{v}");
    } else {
        println!(
            "identity {}: {} samples, worst residual {:.3e} (tolerance {:.1e})",
            rep.name, rep.samples, rep.worst_residual, rep.tolerance
        );
        if let Some((a, b)) = rep.worst_point {
            println!("  worst point: {} / {}", fmt_c(a), fmt_c(b));
        }
        println!("  status: {}", if rep.pass { "pass" } else { "fail" });
    }
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "identity {} worst residual {:.3e} exceeds {:.1e}",
            rep.name, rep.worst_residual, rep.tolerance
        )))
    }
}

fn cmd_sweep(
    cli: &Cli,
    zeta: &str,
    power: &str,
    kmax: i64,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    if kmax > 24 {
        return Err(Failure::Usage(format!(
            "--kmax is capped at 24 (got {kmax})"
        )));
    }
    let (params, _) = parse_inputs(zeta, power, "0/1")?;
    let tol = tolerance(&cli.config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.config.parallelism.max(1))
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let mut sink: Box<dyn std::io::Write> = match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout()),
    };
    let json_mode = cli.config.format == Format::Json;
    if !json_mode {
        writeln!(sink, "{CSV_HEADER}")?;
    }

    let params_str = params.to_string();
    let mut distinct: Vec<String> = Vec::new();
    let mut passed = 0usize;
    let mut total = 0usize;
    // Chunk by denominator so an interrupted run leaves complete rows.
    let all_cusps = cusps_up_to(kmax);
    for k in 1..=kmax {
        let cusps: Vec<Cusp> = all_cusps.iter().filter(|c| c.k() == k).cloned().collect();
        let rows: Vec<LimitRecord> = pool.install(|| {
            use rayon::prelude::*;
            cusps
                .par_iter()
                .map(|c| match verify(&params, c, tol) {
                    Ok(rep) => LimitRecord::from_verify(&rep),
                    Err(e) => LimitRecord {
                        schema_version: SCHEMA_VERSION,
                        params: params_str.clone(),
                        cusp: c.to_string(),
                        case: classify(&params, c),
                        correction: classify(&params, c).correction(),
                        q_re: f64::NAN,
                        q_im: f64::NAN,
                        numeric_re: None,
                        numeric_im: None,
                        abs_diff: None,
                        status: format!("error: {e}"),
                    },
                })
                .collect()
        });
        for rec in rows {
            if !distinct.contains(&rec.correction.to_string()) {
                distinct.push(rec.correction.to_string());
            }
            if rec.status == "pass" {
                passed += 1;
            }
            total += 1;
            if json_mode {
                writeln!(
                    sink,
                    "{}",
                    serde_json::to_string(&rec).expect("serializable")
                )?;
            } else {
                writeln!(sink, "{}", rec.to_csv_row())?;
            }
        }
        sink.flush()?;
    }
    drop(sink);

    let mut summary = String::new();
    write!(
        summary,
        "sweep {params_str} k <= {kmax}: {total} cusps, {} distinct corrections ({}), pass rate {}/{}",
        distinct.len(),
        distinct.join(", "),
        passed,
        total
    )
    .expect("write to string");
    eprintln!("{summary}");
    if passed == total {
        Ok(())
    } else {
        Err(Failure::Verification(summary))
    }
}

fn cmd_eta_order(cli: &Cli, quotient: &str, cusp: &str) -> Result<(), Failure> {
    let quot: EtaQuotient = quotient.parse().map_err(Failure::from)?;
    let c_frac = parse_canonical("h/k", cusp, true)?;
    let c = Cusp::new(c_frac.numer(), c_frac.denom()).map_err(Failure::from)?;
    let order = quot.cusp_order(&c);
    let verdict = match order.numer().cmp(&0) {
        std::cmp::Ordering::Greater => "cuspidal (vanishes)",
        std::cmp::Ordering::Less => "pole",
        std::cmp::Ordering::Equal => "bounded order 0",
    };
    if cli.config.format == Format::Json {
        let v = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "quotient": quot.to_string(),
            "cusp": c.to_string(),
            "order": order.to_string(),
            "verdict": verdict,
        });
        println!("{v}");
    } else {
        println!("{quot} at cusp {c}: order {order} ({verdict})");
    }
    Ok(())
}
