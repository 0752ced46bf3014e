use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use csc::classify::{check_separation, recognize_minimal, SepAxiom, SubspaceCertificate};
use csc::encodings::{
    decode_injection_discrete, decode_injection_wgs, decode_linear_solution, decode_poset_solution, decode_sigma2_solution, encode,
    parse_instance, range_via_closure, stable_coloring_to_sigma2, DecodedSolution, Encoding, InstanceSpec,
};
use csc::forcing::{build_tree, looks_extendible, Bits, TreeParams};
use csc::functional::FunctionalTable;
use csc::gs::{delta2_extract, gs_pipeline, gst1_extract, hausdorff_discrete, pure_t1_cofinite, stability_check, ExtractParams, JumpOracle};
use csc::priority::{init_construction, run_stages, verify_requirements};
use csc::{Space, Truncation};
use serde_json::json;

mod selftest;

#[derive(Parser, Debug)]
#[command(name = "csc", version, about = "Countable second-countable spaces: extraction, encodings, simulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    Gs,
    Gst1,
    Hausdorff,
    PureT1,
    Delta2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Separation verdicts, minimal-topology recognition and stability on a window.
    Classify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "default")]
        encoding: Encoding,
        #[arg(long, default_value_t = 16)]
        n: u64,
        #[arg(long, default_value_t = 16)]
        m: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a subspace of size k with one of the minimal topologies.
    Extract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "gs")]
        pipeline: Pipeline,
        #[arg(long, default_value = "default")]
        encoding: Encoding,
        #[arg(long, default_value_t = 32)]
        n: u64,
        #[arg(long, default_value_t = 32)]
        m: u64,
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Window horizon; the jump oracle's window for delta2.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The generators of an instance's space on a window.
    Encode {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "default")]
        encoding: Encoding,
        #[arg(long, default_value_t = 16)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a solution of the instance back from a certificate.
    Decode {
        #[arg(long)]
        instance: PathBuf,
        /// Not needed for the closure encoding of an injection.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value = "default")]
        encoding: Encoding,
        /// Range bound for injections.
        #[arg(long, default_value_t = 0)]
        w: u64,
        /// Search limit for matrices given by rule.
        #[arg(long, default_value_t = 0)]
        limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the finite-injury construction; one action per line.
    SimulatePriority {
        #[arg(long, default_value_t = 1000)]
        stages: u64,
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        bound: u64,
        /// Print the audit and requirement report to stderr.
        #[arg(long)]
        audit: bool,
    },
    /// Enumerate a constraint tree and report whether it looks extendible.
    ForcingTree {
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long = "F", value_delimiter = ',', num_args = 0..)]
        f: Vec<u64>,
        /// Pairs `e:k`.
        #[arg(long = "H", value_delimiter = ',', num_args = 0..)]
        h: Vec<String>,
        #[arg(long = "J", value_delimiter = ',', num_args = 0..)]
        j: Vec<u64>,
        /// Prefix of X as a 0/1 string.
        #[arg(long, default_value = "-")]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant corpus.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn read_instance(path: &Path) -> Result<InstanceSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("instance {}", path.display()))
}

fn read_table(path: Option<&Path>) -> Result<FunctionalTable> {
    let Some(path) = path else { return Ok(FunctionalTable::empty()) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("table {}", path.display()))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{body}\n")).with_context(|| format!("writing {}", p.display())),
        None => write_stdout([body]),
    }
}

/// Writes lines to stdout, stopping quietly when the reader has gone away.
fn write_stdout<I: IntoIterator<Item = S>, S: AsRef<str>>(lines: I) -> Result<()> {
    let mut w = io::BufWriter::new(io::stdout().lock());
    for l in lines {
        match writeln!(w, "{}", l.as_ref()) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
            r => r?,
        }
    }
    match w.flush() {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn extract(s: &csc::CscSpace, pipeline: Pipeline, params: &ExtractParams, budget: Option<u64>) -> Result<(SubspaceCertificate, Option<String>)> {
    Ok(match pipeline {
        Pipeline::Gs => (gs_pipeline(s, params)?, None),
        Pipeline::Gst1 => (gst1_extract(s, params, None)?, None),
        Pipeline::Hausdorff => (hausdorff_discrete(s, params.k, params, None)?, None),
        Pipeline::PureT1 => (pure_t1_cofinite(s, None, params.k, params)?, None),
        Pipeline::Delta2 => {
            let oracle = JumpOracle::new(s, budget.unwrap_or(params.horizon), params.m);
            let out = delta2_extract(s, &oracle, params.k, params)?;
            (out.cert, Some(format!("{:?}", out.branch)))
        }
    })
}

fn decode(spec: &InstanceSpec, how: Encoding, cert: Option<&SubspaceCertificate>, w: u64, limit: u64) -> Result<DecodedSolution> {
    let need = || cert.context("this decoder reads a certificate; pass --cert");
    Ok(match (spec, how) {
        (InstanceSpec::Poset { order }, _) | (InstanceSpec::LinearOrder { order }, Encoding::Poset) => decode_poset_solution(order, need()?)?,
        (InstanceSpec::LinearOrder { order }, _) => decode_linear_solution(order, need()?)?,
        (InstanceSpec::Sigma2 { theta }, _) => decode_sigma2_solution(theta, need()?, limit)?,
        (InstanceSpec::Coloring(c), _) if !c.pairs.is_empty() => decode_sigma2_solution(&stable_coloring_to_sigma2(c)?, need()?, limit)?,
        (InstanceSpec::Injection { f, budget }, Encoding::Default | Encoding::Closure) => range_via_closure(f, *budget, w.max(1))?,
        (InstanceSpec::Injection { f, .. }, Encoding::Discrete) => decode_injection_discrete(f, need()?, w)?,
        (InstanceSpec::Injection { f, .. }, Encoding::Wgs) => decode_injection_wgs(f, need()?, w)?,
        (spec, how) => bail!("no decoder for a {} instance under the {how:?} encoding", spec.kind()),
    })
}

fn parse_h(h: &[String]) -> Result<BTreeSet<(u64, u64)>> {
    h.iter()
        .map(|p| {
            let (e, k) = p.split_once(':').with_context(|| format!("H entries are e:k, got {p}"))?;
            Ok((e.trim().parse()?, k.trim().parse()?))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Command::Classify { instance, encoding, n, m, out } => {
            let spec = read_instance(&instance)?;
            let s = encode(&spec, encoding)?;
            let t = Truncation::window(&s, n, 2 * n, m);
            let sep: Vec<_> = [SepAxiom::T0, SepAxiom::T1, SepAxiom::T2].iter().map(|&a| check_separation(&t, a)).collect();
            for v in &sep {
                eprintln!("{:?}: {}", v.axiom, if v.holds() { "holds on window" } else { "refuted" });
            }
            let body = json!({
                "kind": spec.kind(),
                "rule": s.rule(),
                "separation": sep,
                "recognition": recognize_minimal(&t),
                "stability": stability_check(&s, n, m),
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&body)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Extract { instance, pipeline, encoding, n, m, k, budget, out } => {
            if n == 0 || m == 0 {
                return Ok(usage("--n and --m must be positive"));
            }
            if k as u64 > n {
                return Ok(usage(&format!("--k {k} exceeds --n {n}")));
            }
            let spec = read_instance(&instance)?;
            let s = encode(&spec, encoding)?;
            let mut params = ExtractParams::new(n, m, k);
            if let (Some(b), false) = (budget, pipeline == Pipeline::Delta2) {
                params = params.with_horizon(b);
            }
            let (cert, branch) = extract(&s, pipeline, &params, budget)?;
            let report = cert.report.clone().unwrap_or_default();
            eprintln!("{} certificate on {:?} via {}: {}", cert.tag, cert.points, cert.provenance, if cert.passed() { "verified" } else { "REJECTED" });
            if let Some(b) = branch {
                eprintln!("branch: {b}");
            }
            for f in &report.failures {
                eprintln!("  {f}");
            }
            emit(out.as_deref(), &cert.to_json())?;
            Ok(verdict(cert.passed()))
        }
        Command::Encode { instance, encoding, n, out } => {
            let spec = read_instance(&instance)?;
            let s = encode(&spec, encoding)?;
            let gens: Vec<_> = s
                .generator_window(n)
                .into_iter()
                .map(|g| json!({ "index": g, "members": (0..n).filter(|&x| s.in_carrier(x) && s.in_generator(g, x)).collect::<Vec<_>>() }))
                .collect();
            let body = json!({ "kind": spec.kind(), "rule": s.rule(), "carrier_bound": s.carrier_bound(), "window": n, "generators": gens });
            emit(out.as_deref(), &serde_json::to_string_pretty(&body)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decode { instance, cert, encoding, w, limit, out } => {
            let spec = read_instance(&instance)?;
            let cert: Option<SubspaceCertificate> = match cert {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    Some(serde_json::from_str(&text).with_context(|| format!("certificate {}", p.display()))?)
                }
                None => None,
            };
            let d = decode(&spec, encoding, cert.as_ref(), w, limit)?;
            eprintln!("{} solution: {}", d.instance, if d.validated { "validated" } else { "NOT validated" });
            emit(out.as_deref(), &d.to_json())?;
            Ok(verdict(d.validated))
        }
        Command::SimulatePriority { stages, tables, bound, audit } => {
            let table = read_table(tables.as_deref())?;
            let mut st = init_construction(table, bound)?;
            let (logs, report) = match run_stages(&mut st, stages) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("audit: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            write_stdout(logs.iter().flat_map(|l| l.lines()))?;
            if audit {
                eprintln!("audit: {} stages, {} checks, {} violations", report.stages, report.checks, report.violations.len());
                let reqs = verify_requirements(&st, bound);
                for (r, status) in &reqs.entries {
                    eprintln!("  {r}: {}", serde_json::to_string(status)?);
                }
            }
            Ok(verdict(report.passed()))
        }
        Command::ForcingTree { table, f, h, j, x, out } => {
            let table = read_table(table.as_deref())?;
            let x_prefix = Bits::parse(&x).with_context(|| format!("--x must be a 0/1 string, got {x}"))?.0;
            let p = TreeParams { x_prefix, f: f.into_iter().collect(), h: parse_h(&h)?, j: j.into_iter().collect() };
            let t = build_tree(&table, &p)?;
            let ext = looks_extendible(&t);
            eprintln!("{} strings, {}", t.len(), if ext { "looks extendible" } else { "does not look extendible" });
            let body = json!({ "max_f": p.max_f(), "strings": t.strings, "looks_extendible": ext });
            emit(out.as_deref(), &serde_json::to_string_pretty(&body)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed } => Ok(verdict(selftest::run(seed))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
