use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

use phorma::oracle::{self, DEFAULT_BUDGET};
use phorma::specio::{self, parse_seq};
use phorma::{builtin, BigIndex, Error, PhormaSpec};

#[derive(Parser)]
#[command(name = "phorma", version, about = "Rank, unrank, count and sample order-restricted integer sequences")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Progress and timing on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// Where a spec comes from.
#[derive(Args)]
struct SpecSource {
    /// Spec file (`.phorma`).
    spec: Option<PathBuf>,
    /// Built-in spec: `sym_ge:n:amax`, `sym_gt:n:amax`, `L:p:q`, `Tz:a1,..,a7`.
    #[arg(long, conflicts_with = "spec")]
    builtin: Option<String>,
}

/// Where an index comes from: an image, a spec file compiled on the fly, or a builtin.
#[derive(Args)]
struct IndexSource {
    /// Index image (`.phx`) or spec file (`.phorma`).
    index: Option<PathBuf>,
    #[arg(long, conflicts_with = "index")]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a spec into an index image.
    Compile {
        #[command(flatten)]
        source: SpecSource,
        /// Output path; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Number of members.
    Count {
        #[command(flatten)]
        source: IndexSource,
    },
    /// Rank of a member.
    Rank {
        #[command(flatten)]
        source: IndexSource,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Member with a given rank.
    Unrank {
        #[command(flatten)]
        source: IndexSource,
        #[arg(long)]
        rank: BigUint,
    },
    /// Successor of a member in rank order.
    Next {
        #[command(flatten)]
        source: IndexSource,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Uniform random members.
    Sample {
        #[command(flatten)]
        source: IndexSource,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Members with ranks in `from..to`, one per line.
    Enum {
        #[command(flatten)]
        source: IndexSource,
        #[arg(long)]
        from: Option<BigUint>,
        #[arg(long)]
        to: Option<BigUint>,
    },
    /// Size parameters of the index.
    Stats {
        #[command(flatten)]
        source: IndexSource,
        /// One aligned header and row.
        #[arg(long)]
        table: bool,
    },
    /// Cross-check the index against a brute-force scan.
    Verify {
        #[command(flatten)]
        source: SpecSource,
        /// Largest candidate space to scan.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

struct Ctx {
    json: bool,
    verbose: bool,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("phorma: {}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        json: cli.json,
        verbose: cli.verbose,
    };
    match run(cli.command, &ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if ctx.json {
                eprintln!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("phorma: {e}");
            }
            ExitCode::from(1)
        }
    }
}

fn spec_of(src: &SpecSource) -> Result<PhormaSpec, Error> {
    match (&src.spec, &src.builtin) {
        (_, Some(b)) => builtin::parse_builtin(b),
        (Some(p), None) => specio::read_spec_file(p),
        (None, None) => Err(Error::Spec("give a spec file or --builtin".into())),
    }
}

fn is_spec_file(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "phorma")
}

fn compile(spec: &PhormaSpec, ctx: &Ctx) -> Result<BigIndex, Error> {
    let start = std::time::Instant::now();
    let idx = BigIndex::compile(spec)?;
    ctx.log(format!(
        "compiled {} reduced sequences, {} store vertices in {:.3}s",
        idx.stats().red_count,
        idx.stats().v_h,
        start.elapsed().as_secs_f64()
    ));
    Ok(idx)
}

fn index_of(src: &IndexSource, ctx: &Ctx) -> Result<BigIndex, Error> {
    match (&src.index, &src.builtin) {
        (_, Some(b)) => compile(&builtin::parse_builtin(b)?, ctx),
        (Some(p), None) if is_spec_file(p) => compile(&specio::read_spec_file(p)?, ctx),
        (Some(p), None) => specio::load_index_file(p),
        (None, None) => Err(Error::Spec("give an index file or --builtin".into())),
    }
}

fn fmt_alpha(a: &[u32]) -> String {
    a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

fn run(cmd: Command, ctx: &Ctx) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cmd {
        Command::Compile { source, output } => {
            let idx = compile(&spec_of(&source)?, ctx)?;
            match output {
                Some(path) => {
                    specio::save_index_file(&idx, &path)?;
                    if ctx.json {
                        writeln!(out, "{}", json!({ "output": path, "count": idx.count().to_string() })).map_err(io_err)?;
                    }
                }
                None => specio::save_index(&idx, &mut out)?,
            }
        }
        Command::Count { source } => {
            let idx = index_of(&source, ctx)?;
            if ctx.json {
                writeln!(out, "{}", json!({ "count": idx.count().to_string() }))
            } else {
                writeln!(out, "{}", idx.count())
            }
            .map_err(io_err)?;
        }
        Command::Rank { source, alpha } => {
            let idx = index_of(&source, ctx)?;
            let r = idx.rank(&parse_seq(&alpha)?)?;
            if ctx.json {
                writeln!(out, "{}", json!({ "rank": r.to_string() }))
            } else {
                writeln!(out, "{r}")
            }
            .map_err(io_err)?;
        }
        Command::Unrank { source, rank } => {
            let idx = index_of(&source, ctx)?;
            let a = idx.unrank(&rank)?;
            if ctx.json {
                writeln!(out, "{}", json!({ "alpha": a }))
            } else {
                writeln!(out, "{}", fmt_alpha(&a))
            }
            .map_err(io_err)?;
        }
        Command::Next { source, alpha } => {
            let idx = index_of(&source, ctx)?;
            let n = idx.next(&parse_seq(&alpha)?)?;
            if ctx.json {
                writeln!(out, "{}", json!({ "next": n }))
            } else {
                writeln!(out, "{}", n.as_deref().map_or("none".to_string(), fmt_alpha))
            }
            .map_err(io_err)?;
        }
        Command::Sample { source, seed, count } => {
            let idx = index_of(&source, ctx)?;
            let draws = idx.sample_many(seed, count)?;
            if ctx.json {
                writeln!(out, "{}", json!({ "seed": seed, "samples": draws })).map_err(io_err)?;
            } else {
                for d in &draws {
                    writeln!(out, "{}", fmt_alpha(d)).map_err(io_err)?;
                }
            }
        }
        Command::Enum { source, from, to } => {
            let idx = index_of(&source, ctx)?;
            let mut n = 0u64;
            for a in idx.range(from.unwrap_or_default(), to) {
                let a = a?;
                if ctx.json {
                    writeln!(out, "{}", json!(a))
                } else {
                    writeln!(out, "{}", fmt_alpha(&a))
                }
                .map_err(io_err)?;
                n += 1;
                if n.is_multiple_of(1_000_000) {
                    ctx.log(format!("{n} sequences"));
                }
            }
            ctx.log(format!("{n} sequences"));
        }
        Command::Stats { source, table } => {
            let idx = index_of(&source, ctx)?;
            let s = idx.stats();
            let d4 = format!("{:.0}", s.density * 1e4);
            if ctx.json {
                let v = json!({
                    "v_g": s.v_g,
                    "v_h": s.v_h,
                    "red_count": s.red_count,
                    "count": s.total.to_string(),
                    "roof_count": s.roof_count,
                    "max_roof_count": s.max_roof_count,
                    "lambda": s.lambda,
                    "nu": s.nu,
                    "mu": s.mu,
                    "density": s.density,
                    "a_star": s.a_star,
                    "n_star": s.n_star,
                });
                writeln!(out, "{v}").map_err(io_err)?;
            } else if table {
                let cols = [
                    ("v_G", s.v_g.to_string()),
                    ("v_H", s.v_h.to_string()),
                    ("|redA|", s.red_count.to_string()),
                    ("|A|", s.total.to_string()),
                    ("roofs", s.roof_count.to_string()),
                    ("max", s.max_roof_count.to_string()),
                    ("lambda", s.lambda.to_string()),
                    ("mu", format!("{:.4}", s.mu)),
                    ("1e4d", d4),
                ];
                let widths: Vec<usize> = cols.iter().map(|(h, v)| h.len().max(v.len())).collect();
                let line = |f: &dyn Fn(&(&str, String)) -> String| {
                    cols.iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{:>w$}", f(c), w = *w))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                writeln!(out, "{}", line(&|c| c.0.to_string())).map_err(io_err)?;
                writeln!(out, "{}", line(&|c| c.1.clone())).map_err(io_err)?;
            } else {
                let rows = [
                    ("v_G", s.v_g.to_string()),
                    ("v_H", s.v_h.to_string()),
                    ("reduced", s.red_count.to_string()),
                    ("count", s.total.to_string()),
                    ("roofs", s.roof_count.to_string()),
                    ("maximal roofs", s.max_roof_count.to_string()),
                    ("lambda", s.lambda.to_string()),
                    ("nu", s.nu.to_string()),
                    ("mu", format!("{:.4}", s.mu)),
                    ("1e4 density", d4),
                ];
                for (k, v) in rows {
                    writeln!(out, "{k:<14}{v}").map_err(io_err)?;
                }
            }
        }
        Command::Verify { source, budget } => {
            let spec = spec_of(&source)?;
            let candidates = oracle::candidate_count(&spec);
            eprintln!("phorma: scanning {candidates} candidates (budget {budget})");
            if candidates > budget as u128 {
                return Err(Error::BudgetExceeded {
                    candidates: candidates.to_string(),
                    budget,
                });
            }
            let idx = compile(&spec, ctx)?;
            let rep = oracle::verify(&spec, &idx, budget)?;
            if ctx.json {
                writeln!(out, "{}", serde_json::to_string(&rep).expect("serializable")).map_err(io_err)?;
            } else {
                writeln!(out, "spec {}", rep.spec_id).map_err(io_err)?;
                writeln!(out, "brute {}", rep.brute_count).map_err(io_err)?;
                writeln!(out, "index {}", rep.index_count).map_err(io_err)?;
                writeln!(out, "set-equal {}", rep.set_equal).map_err(io_err)?;
                writeln!(out, "round-trip failures {}", rep.round_trip_failures.len()).map_err(io_err)?;
                if let Some(d) = &rep.first_divergence {
                    writeln!(out, "first divergence: {d}").map_err(io_err)?;
                }
            }
            out.flush().map_err(io_err)?;
            if !rep.passed() {
                return Err(Error::Spec("index disagrees with brute force".into()));
            }
        }
    }
    out.flush().map_err(io_err)
}
