use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use taut_verify::cache::{gc, ENV_VAR};
use taut_verify::report::Status;
use taut_verify::{run_check, AGrid, CheckConfig, IntRange, Relation, VerifyError};

#[derive(Parser)]
#[command(name = "taut-verify", version, about = "Exact verification of tautological relations")]
struct Cli {
    /// Print the relation ids and exit
    #[arg(long)]
    list_relations: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Check one relation over a range of moduli spaces
    Verify(VerifyArgs),
    /// Maintain the intersection-number cache
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Subcommand)]
enum CacheOp {
    /// Verify checksums and report entry counts
    Gc {
        path: PathBuf,
        /// Rewrite the file without duplicates or corrupt records
        #[arg(long)]
        compact: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    relation: Relation,
    #[arg(long)]
    g: Option<IntRange>,
    #[arg(long)]
    n: Option<IntRange>,
    #[arg(long)]
    m: Option<IntRange>,
    /// e.g. box:3+random:8:10:seed=0
    #[arg(long)]
    a_grid: Option<AGrid>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// bound on 3g-3+n+m
    #[arg(long)]
    dim_cap: Option<usize>,
    /// bound on 2g+n+m (formal certificate) or 2g+n (intersection numbers)
    #[arg(long)]
    weight_cap: Option<usize>,
    #[arg(long)]
    r_max: Option<u32>,
    #[arg(long, env = ENV_VAR)]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

fn config(a: VerifyArgs) -> CheckConfig {
    let mut c = CheckConfig::new(a.relation);
    if let Some(g) = a.g {
        c.g = g;
    }
    if let Some(n) = a.n {
        c.n = n;
    }
    if let Some(m) = a.m {
        c.m = m;
    }
    if let Some(grid) = a.a_grid {
        c.a_grid = grid;
    }
    c.max_degree = a.max_degree;
    if let Some(d) = a.dim_cap {
        c.dim_cap = d;
    }
    if let Some(w) = a.weight_cap {
        c.weight_cap = w;
    }
    if let Some(r) = a.r_max {
        c.r_max = r;
    }
    c.cache = a.cache;
    c.workers = a.workers;
    c
}

fn verify(a: VerifyArgs) -> Result<i32, VerifyError> {
    let out = a.report.clone();
    let cfg = config(a);
    let report = run_check(&cfg)?;
    let json = report.to_json()?;
    match out {
        Some(p) => std::fs::write(p, json)?,
        None => print!("{json}"),
    }
    for c in &report.body.cases {
        if c.status != Status::Pass {
            for f in &c.failures {
                eprintln!("FAIL {} :: {} :: {}", c.id, f.check, f.detail);
                if let Some(w) = &f.witness {
                    eprintln!("     witness {} pairs to {}", w.generator, w.value);
                }
            }
        }
    }
    let b = &report.body;
    eprintln!(
        "{}: {} ({} cases, {} passed, {} failed, {} errors, {} checks, {:.1}s)",
        cfg.relation,
        if b.pass { "pass" } else { "FAIL" },
        b.counts.cases,
        b.counts.passed,
        b.counts.failed,
        b.counts.errors,
        b.counts.checks,
        report.run.seconds
    );
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_relations {
        for r in Relation::ALL {
            println!("{:<22} {}", r.id(), r.summary());
        }
        return ExitCode::SUCCESS;
    }
    let res = match cli.command {
        Some(Command::Verify(a)) => verify(a),
        Some(Command::Cache {
            op: CacheOp::Gc { path, compact },
        }) => gc(&path, compact).and_then(|r| {
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(if r.pass { 0 } else { 1 })
        }),
        None => {
            eprintln!("nothing to do; see --help");
            Ok(2)
        }
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
