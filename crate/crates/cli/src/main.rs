//! `nplet`: decide, search and cross-check anomalous exponent tuples.
//!
//! Exit codes: 0 clean, 1 anomaly or discovery, 2 internal inconsistency,
//! 3 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use nplet_core::heights::{final_threshold, step1_bound, threshold_sides};
use nplet_core::lattice::degree_bound;
use nplet_core::oracle::{basepoint_invariance, root_scan_at, IncidenceScan};
use nplet_core::search::{self, SearchConfig, StoreHeader, DEFAULT_ORACLE_RATE};
use nplet_core::{decide, Error, ExponentTuple, RankCertificate};

const CLEAN: u8 = 0;
const DISCOVERY: u8 = 1;
const INCONSISTENT: u8 = 2;
const USAGE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "nplet", version, about = "Exact rank-drop decisions for exponent tuples")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a single tuple and print its certificate.
    Test {
        #[arg(required = true, num_args = 1..)]
        exponents: Vec<u64>,
    },
    /// Exhaustively decide every coprime tuple up to a bound.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long = "max-d")]
        max_d: u64,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        #[arg(long, default_value_t = 0)]
        shard: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long = "oracle-rate", default_value_t = DEFAULT_ORACLE_RATE)]
        oracle_rate: f64,
        /// Worker threads.
        #[arg(long, env = "NPLET_WORKERS")]
        workers: Option<usize>,
        #[arg(long = "stop-after-batches", hide = true)]
        stop_after_batches: Option<u64>,
    },
    /// Re-check every certificate in a store.
    Verify { store: PathBuf },
    /// Evaluate the explicit height, degree and threshold bounds.
    #[command(group(ArgGroup::new("what").required(true).multiple(true).args(["d", "solve"])))]
    Bounds {
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        solve: bool,
    },
    /// Floating-point incidence scan for a tuple (gcd need not be 1).
    Oracle {
        #[arg(required = true, num_args = 1..)]
        exponents: Vec<u64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        basepoint: f64,
        /// Imaginary part of the basepoint.
        #[arg(long = "basepoint-im", default_value_t = 0.0, allow_negative_numbers = true)]
        basepoint_im: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidTuple { .. } | Error::InvalidArgument(_) | Error::PolynomialParse { .. } => USAGE,
            _ => INCONSISTENT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { CLEAN });
        }
    };
    let result = match cli.command {
        Command::Test { exponents } => cmd_test(exponents, cli.format),
        Command::Search {
            n,
            max_d,
            shards,
            shard,
            out,
            resume,
            oracle_rate,
            workers,
            stop_after_batches,
        } => {
            let mut config = SearchConfig::new(n, max_d, out);
            config.shard_count = shards;
            config.shard_index = shard;
            config.resume = resume;
            config.oracle_cross_check_rate = oracle_rate;
            config.workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            config.stop_after_batches = stop_after_batches;
            cmd_search(&config, cli.format)
        }
        Command::Verify { store } => cmd_verify(&store, cli.format),
        Command::Bounds { d, solve } => cmd_bounds(d, solve, cli.format),
        Command::Oracle {
            exponents,
            basepoint,
            basepoint_im,
        } => cmd_oracle(exponents, Complex64::new(basepoint, basepoint_im), cli.format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_test(exponents: Vec<u64>, format: Format) -> Result<u8, Failure> {
    let (tuple, h) = ExponentTuple::normalize(exponents.clone())?;
    let cert = decide(&tuple)?;
    match format {
        Format::Records => {
            println!("{}", serde_json::to_string(&StoreHeader::single(&tuple)).map_err(Error::from)?);
            println!("{}", serde_json::to_string(&cert).map_err(Error::from)?);
        }
        Format::Human => {
            if h > 1 {
                let original = ExponentTuple::non_primitive(exponents)?;
                println!("input {original} has gcd {h}; deciding {tuple}");
                println!(
                    "  A{original}(z) is A{tuple}(z^{h}) up to column scaling, so every z with z^{h} = 1 is a rank drop of the input"
                );
            }
            print_certificate(&cert);
        }
    }
    Ok(if cert.anomalous { DISCOVERY } else { CLEAN })
}

fn print_certificate(cert: &RankCertificate) {
    let tuple: Vec<String> = cert.exponents.iter().map(u64::to_string).collect();
    println!("tuple            ({})", tuple.join(","));
    println!("minor degrees    {:?}", cert.minor_degrees);
    println!("gcd of minors    {}", cert.gcd);
    println!("(z-1) multiplicity {}", cert.one_multiplicity);
    println!("residual         {}", cert.residual);
    println!("anomalous        {}", cert.anomalous);
    println!("classification   {:?}", cert.classification);
    if !cert.orders.is_empty() {
        println!("root orders      {:?}", cert.orders);
    }
    if !cert.root_moduli.is_empty() {
        println!("root moduli      {:?}", cert.root_moduli);
    }
    println!("elapsed          {:.3} ms", cert.elapsed_ms);
}

fn cmd_search(config: &SearchConfig, format: Format) -> Result<u8, Failure> {
    let summary = search::run(config)?;
    match format {
        Format::Records => println!("{}", serde_json::to_string(&summary).map_err(Error::from)?),
        Format::Human => {
            println!(
                "n={} max_d={} shard {}/{}",
                config.n, config.max_last_exponent, config.shard_index, config.shard_count
            );
            println!("tuples examined  {}", summary.tuples_examined);
            println!("anomalous found  {}", summary.anomalous_found);
            println!("oracle checked   {}", summary.oracle_checked);
            for (m, count) in &summary.multiplicity_histogram {
                println!("  (z-1)^{m}: {count}");
            }
            for d in &summary.discoveries {
                println!("DISCOVERY {d:?}");
            }
            println!("completed        {}", summary.completed);
            println!("elapsed          {:.1} ms", summary.elapsed_ms);
        }
    }
    Ok(if summary.anomalous_found > 0 { DISCOVERY } else { CLEAN })
}

fn cmd_verify(store: &std::path::Path, format: Format) -> Result<u8, Failure> {
    let report = search::verify(store)?;
    match format {
        Format::Records => println!("{}", serde_json::to_string(&report).map_err(Error::from)?),
        Format::Human => {
            println!("records  {}", report.records);
            println!("anomalous {}", report.anomalous);
            for f in &report.failures {
                let t = f.exponents.as_ref().map_or("?".to_string(), |e| format!("{e:?}"));
                println!("FAIL line {} tuple {t}: {}", f.line, f.reason);
            }
            println!("{}", if report.ok() { "ok" } else { "FAILED" });
        }
    }
    Ok(if report.ok() { CLEAN } else { INCONSISTENT })
}

fn cmd_bounds(d: Option<u64>, solve: bool, format: Format) -> Result<u8, Failure> {
    let mut records = Vec::new();
    if let Some(d) = d {
        if d < 2 {
            return Err(usage("--d must be at least 2"));
        }
        let h = step1_bound(d as f64);
        let k = degree_bound(d);
        match format {
            Format::Records => records.push(json!({ "d": d, "height_bound_nats": h, "degree_bound": k })),
            Format::Human => {
                println!("d = {d}");
                println!("height bound     h(xi) <= (9 ln d - ln(512/18)) / d = {h:.6} nats");
                println!(
                    "degree bound     [Q(xi):Q] <= floor(96 d^(2/3)) = {k}  (96 d^(2/3) = {:.3})",
                    96.0 * (d as f64).powf(2.0 / 3.0)
                );
            }
        }
    }
    if solve {
        let t = final_threshold();
        let ((l0, r0), (l1, r1)) = t.sides_at_bracket;
        match format {
            Format::Records => records.push(json!({
                "d_star": t.d_star,
                "bracket": [t.bracket.0, t.bracket.1],
                "sides_at_bracket": [[l0, r0], [l1, r1]],
            })),
            Format::Human => {
                let (ls, rs) = threshold_sides(t.d_star);
                println!("threshold        0.28 d^(1/3) / 96^(2/3) = 9 ln d - ln(512/18)");
                println!("d*               {:.6e}  (lhs {ls:.3}, rhs {rs:.3} nats)", t.d_star);
                println!("at d = {:.0e}      lhs {l0:.1}  rhs {r0:.1}  (lhs < rhs)", t.bracket.0);
                println!("at d = {:.0e}      lhs {l1:.1}  rhs {r1:.1}  (lhs > rhs)", t.bracket.1);
                println!("every solution has d < {:.3e}", t.d_star);
            }
        }
    }
    for r in records {
        println!("{r}");
    }
    Ok(CLEAN)
}

fn cmd_oracle(exponents: Vec<u64>, t0: Complex64, format: Format) -> Result<u8, Failure> {
    let tuple = ExponentTuple::non_primitive(exponents)?;
    let scan = root_scan_at(&tuple, t0)?;
    let invariance = if t0 != Complex64::new(1.0, 0.0) {
        Some(basepoint_invariance(&tuple, t0)?)
    } else {
        None
    };
    match format {
        Format::Records => {
            println!("{}", serde_json::to_string(&scan).map_err(Error::from)?);
            if let Some(r) = &invariance {
                println!(
                    "{}",
                    json!({ "basepoint_deviation": r.max_deviation(), "candidate_deviation": r.candidate_deviation, "spectrum_deviation": r.spectrum_deviation })
                );
            }
        }
        Format::Human => print_scan(&scan, invariance.as_ref().map(|r| r.max_deviation())),
    }
    if !tuple.is_primitive() {
        println!("note: gcd {} > 1, candidates are expected roots of unity", tuple.gcd());
        return Ok(CLEAN);
    }
    Ok(if scan.candidates.is_empty() { CLEAN } else { DISCOVERY })
}

fn print_scan(scan: &IncidenceScan, deviation: Option<f64>) {
    println!("tuple {}  basepoint {}", scan.tuple, scan.basepoint);
    println!("basepoint multiplicity {}", scan.basepoint_multiplicity);
    if scan.candidates.is_empty() {
        println!("no candidates");
    } else {
        println!("{:>24} {:>10} {:>10} {:>12} {:>12}", "z", "|z|", "arg", "min sigma", "residual");
        for c in &scan.candidates {
            println!(
                "{:>24} {:>10.6} {:>10.6} {:>12.3e} {:>12.3e}",
                format!("{:.6}", c.z),
                c.z.norm(),
                c.z.arg(),
                c.min_singular_value,
                c.residual
            );
        }
    }
    for w in &scan.warnings {
        println!("warning: {w}");
    }
    if let Some(d) = deviation {
        println!("basepoint invariance deviation {d:.3e}");
    }
}
