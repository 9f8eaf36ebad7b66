use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use lpbound::certificate::{build_certificate, check_dual_feasible, check_feasibility_walks, profile_bound};
use lpbound::radial::{dense_limit, dense_transform, radial_transform, DenseFunction, LevelProfile};
use lpbound::rational::{parse_ratio, to_ratio_string};
use lpbound::report::{bound_report, curve, oracle_report, sweep, BoundReport, Method, Overrides};
use lpbound::walks::{asymptotic_walk_estimate, walk_counts, walk_root};

#[derive(Parser)]
#[command(name = "lpbound", version, about = "Exact upper bounds on binary code sizes")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Upper bound on A(n,d) by one method.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// certificate, lp, oracle or support.
        #[arg(long, default_value = "certificate")]
        method: Method,
        /// Walk length of the certificate (requires --r).
        #[arg(long)]
        m: Option<u32>,
        /// Level of the certificate (requires --m).
        #[arg(long)]
        r: Option<usize>,
        /// With the oracle method, write an optimal code to FILE, one word per line.
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
        /// With the certificate or support method, save the certificate as JSON.
        #[arg(long, value_name = "FILE")]
        certificate: Option<PathBuf>,
    },
    /// Rate-distance curves, optionally with finite-n certificate exponents.
    Curve {
        #[arg(long, default_value_t = 51)]
        points: usize,
        /// Add the certificate exponent at this n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Walk counts from a level-r vertex by terminal level.
    Walks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: u32,
    },
    /// Check a dual certificate read from a JSON file.
    Verify {
        /// Certificate JSON, a profile {"n", "values"}, or an array of values.
        file: PathBuf,
        /// Minimum distance; defaults to the certificate's own d.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Every method over a grid of (n, d).
    Sweep {
        /// Lengths, e.g. "4..8" or "5,7,9".
        #[arg(long)]
        n: String,
        /// Distances, e.g. "1..4".
        #[arg(long)]
        d: String,
        /// Comma-separated methods (default: all).
        #[arg(long)]
        method: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let fmt = cli.format;
    let code = match cli.command {
        Command::Bound { n, d, method, m, r, witness, certificate } => {
            let files = (witness.as_deref(), certificate.as_deref());
            cmd_bound(&mut out, fmt, n, d, method, Overrides { m, r }, files)?
        }
        Command::Curve { points, n } => cmd_curve(&mut out, fmt, points, n)?,
        Command::Walks { n, r, m } => cmd_walks(&mut out, fmt, n, r, m)?,
        Command::Verify { file, d } => cmd_verify(&mut out, fmt, &file, d)?,
        Command::Sweep { n, d, method } => cmd_sweep(&mut out, fmt, &n, &d, method.as_deref())?,
    };
    out.flush()?;
    Ok(code)
}

const REPORT_HEADER: [&str; 7] = ["n", "d", "method", "bound", "exponent", "m", "r"];

fn report_record(rep: &BoundReport) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    vec![
        rep.n.to_string(),
        rep.d.to_string(),
        rep.method.to_string(),
        to_ratio_string(&rep.bound),
        rep.exponent.to_string(),
        opt(rep.m.map(|m| m.to_string())),
        opt(rep.r.map(|r| r.to_string())),
    ]
}

fn write_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_bound(
    out: &mut dyn Write,
    fmt: Format,
    n: usize,
    d: usize,
    method: Method,
    ov: Overrides,
    (witness, certificate): (Option<&Path>, Option<&Path>),
) -> Result<ExitCode> {
    let rep = match (method, witness) {
        (Method::Oracle, Some(path)) => {
            let (rep, code) = oracle_report(n, d)?;
            std::fs::write(path, code.to_string()).with_context(|| format!("writing {}", path.display()))?;
            rep
        }
        (_, Some(_)) => bail!("--witness needs --method oracle"),
        _ => bound_report(n, d, method, ov)?,
    };
    if let Some(path) = certificate {
        let (Some(m), Some(r)) = (rep.m, rep.r) else {
            bail!("--certificate needs --method certificate or support");
        };
        let cert = build_certificate(n, d, m, r)?;
        std::fs::write(path, serde_json::to_string_pretty(&cert)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match fmt {
        Format::Json => write_json(out, &rep)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_HEADER)?;
            w.write_record(report_record(&rep))?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_curve(out: &mut dyn Write, fmt: Format, points: usize, n: Option<usize>) -> Result<ExitCode> {
    let rows = curve(points, n)?;
    match fmt {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["delta", "gv", "mrrw1"];
            if n.is_some() {
                header.push("cert_exponent");
            }
            w.write_record(&header)?;
            for row in &rows {
                let mut rec = vec![row.delta.to_string(), row.gv.to_string(), row.mrrw1.to_string()];
                if n.is_some() {
                    rec.push(row.cert_exponent.map(|e| e.to_string()).unwrap_or_default());
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_walks(out: &mut dyn Write, fmt: Format, n: usize, r: usize, m: u32) -> Result<ExitCode> {
    if r > n {
        bail!("--r must be at most --n");
    }
    let table = walk_counts(n, r, m);
    let estimate = asymptotic_walk_estimate(n, r, m, 1);
    let root = |j: i64| {
        let c = table.at_offset(j);
        (m > 0 && c.bits() > 0).then(|| walk_root(&c, m))
    };
    let (down, up) = (root(-1), root(1));
    let levels: Vec<(usize, String)> = table
        .counts
        .iter()
        .enumerate()
        .filter(|(_, c)| c.bits() > 0)
        .map(|(l, c)| (l, c.to_string()))
        .collect();
    match fmt {
        Format::Json => {
            let rows: Vec<Value> = levels.iter().map(|(l, c)| json!({ "level": l, "count": c })).collect();
            let summary = json!({ "root_down": down, "root_up": up, "estimate": estimate });
            write_json(out, &json!({ "n": n, "r": r, "m": m, "counts": rows, "summary": summary }))?;
        }
        Format::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(["level", "count"])?;
                for (l, c) in &levels {
                    w.write_record([l.to_string(), c.clone()])?;
                }
                w.flush()?;
            }
            let show = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
            writeln!(out, "# root_down={} root_up={} estimate={estimate}", show(down), show(up))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// A profile plus whatever certificate metadata came with it.
struct Loaded {
    g: LevelProfile,
    d: Option<usize>,
    m: Option<u32>,
    r: Option<usize>,
}

fn parse_values(arr: &[Value]) -> Result<Vec<BigRational>> {
    arr.iter()
        .map(|v| match v {
            Value::String(s) => Ok(parse_ratio(s)?),
            Value::Number(x) if x.is_i64() => Ok(parse_ratio(&x.to_string())?),
            other => Err(anyhow!("profile entries must be integers or \"p/q\" strings, got {other}")),
        })
        .collect()
}

fn load_profile(value: &Value) -> Result<LevelProfile> {
    match value {
        Value::Array(arr) => {
            let vals = parse_values(arr)?;
            let n = vals.len().checked_sub(1).ok_or_else(|| anyhow!("empty profile"))?;
            Ok(LevelProfile::new(n, vals)?)
        }
        Value::Object(obj) => {
            let arr = obj.get("values").and_then(Value::as_array).ok_or_else(|| anyhow!("profile needs \"values\""))?;
            let vals = parse_values(arr)?;
            let n = match obj.get("n").and_then(Value::as_u64) {
                Some(n) => n as usize,
                None => vals.len().checked_sub(1).ok_or_else(|| anyhow!("empty profile"))?,
            };
            Ok(LevelProfile::new(n, vals)?)
        }
        _ => bail!("expected a certificate object, a profile object or an array"),
    }
}

fn load_certificate(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let field = |k: &str| value.get(k).and_then(Value::as_u64);
    match value.get("g") {
        Some(g) => Ok(Loaded {
            g: load_profile(g)?,
            d: field("d").map(|v| v as usize),
            m: field("m").map(|v| v as u32),
            r: field("r").map(|v| v as usize),
        }),
        None => Ok(Loaded { g: load_profile(&value)?, d: None, m: None, r: None }),
    }
}

fn cmd_verify(out: &mut dyn Write, fmt: Format, file: &Path, d: Option<usize>) -> Result<ExitCode> {
    let cert = load_certificate(file)?;
    let n = cert.g.n();
    let d = d.or(cert.d).ok_or_else(|| anyhow!("--d is required for a bare profile"))?;
    if d == 0 || d > n {
        bail!("need 1 <= d <= n, got d={d}, n={n}");
    }
    let dual = check_dual_feasible(&cert.g, d);
    let violations: Vec<String> = dual.violations.iter().map(ToString::to_string).collect();

    // Expand to the full cube as an independent check of the radial transform.
    let dense_agrees = if n <= dense_limit() {
        let t = dense_transform(&DenseFunction::from_profile(&cert.g)?)?;
        Some(t.radialize() == radial_transform(&cert.g))
    } else {
        None
    };

    let walks = match (cert.m, cert.r) {
        (Some(m), Some(r)) => Some(check_feasibility_walks(n, d, m, r)?),
        _ => None,
    };
    let bound = if dual.feasible() { profile_bound(&cert.g).ok() } else { None };
    let pass = dual.feasible() && dense_agrees != Some(false);

    match fmt {
        Format::Json => {
            let v = json!({
                "n": n,
                "d": d,
                "dual_feasible": dual.feasible(),
                "violations": violations,
                "dense_agrees": dense_agrees,
                "walks": walks,
                "bound": bound.as_ref().map(to_ratio_string),
                "pass": pass,
            });
            write_json(out, &v)?;
        }
        Format::Csv => {
            writeln!(out, "dual: {}", if dual.feasible() { "feasible" } else { "infeasible" })?;
            for v in &violations {
                writeln!(out, "  {v}")?;
            }
            match dense_agrees {
                Some(true) => writeln!(out, "dense cross-check: agrees")?,
                Some(false) => writeln!(out, "dense cross-check: MISMATCH")?,
                None => writeln!(out, "dense cross-check: skipped (n above dense limit)")?,
            }
            if let Some(w) = &walks {
                writeln!(
                    out,
                    "walks: {} (threshold {}, margins {} and {})",
                    if w.feasible { "feasible" } else { "infeasible" },
                    w.threshold,
                    w.margin_r,
                    w.margin_r_minus_1
                )?;
            }
            if let Some(b) = &bound {
                writeln!(out, "bound: {}", to_ratio_string(b))?;
            }
        }
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

/// Parses "a..b" (inclusive) and comma lists of either.
fn parse_list(list: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range {part}");
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().with_context(|| format!("bad value {part:?}"))?),
        }
    }
    if out.is_empty() {
        bail!("empty list {list:?}");
    }
    Ok(out)
}

fn cmd_sweep(out: &mut dyn Write, fmt: Format, ns: &str, ds: &str, methods: Option<&str>) -> Result<ExitCode> {
    let methods: Vec<Method> = match methods {
        Some(s) => s.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>()?,
        None => Method::ALL.to_vec(),
    };
    let ds = parse_list(ds)?;
    let grid: Vec<(usize, usize)> =
        parse_list(ns)?.into_iter().flat_map(|n| ds.iter().filter(move |&&d| d <= n).map(move |&d| (n, d))).collect();
    let rows = sweep(&grid, &methods);
    match fmt {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let cells: serde_json::Map<String, Value> = row
                        .cells
                        .iter()
                        .map(|(m, res)| {
                            let cell = match res {
                                Ok(rep) => serde_json::to_value(rep).unwrap_or(Value::Null),
                                Err(e) => json!({ "error": e.to_string() }),
                            };
                            (m.to_string(), cell)
                        })
                        .collect();
                    json!({ "n": row.n, "d": row.d, "methods": cells })
                })
                .collect();
            write_json(out, &v)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["n".to_string(), "d".to_string()];
            for m in &methods {
                header.push(format!("{m}_bound"));
                header.push(format!("{m}_exponent"));
            }
            w.write_record(&header)?;
            for row in &rows {
                let mut rec = vec![row.n.to_string(), row.d.to_string()];
                for (m, res) in &row.cells {
                    match res {
                        Ok(rep) => {
                            rec.push(to_ratio_string(&rep.bound));
                            rec.push(rep.exponent.to_string());
                        }
                        Err(e) => {
                            log::warn!("n={} d={} {m}: {e}", row.n, row.d);
                            rec.extend([String::new(), String::new()]);
                        }
                    }
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
