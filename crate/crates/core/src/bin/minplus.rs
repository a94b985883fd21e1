use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use monotone_minplus::config::{Backend, CountingRoute, Engine, SolverConfig};
use monotone_minplus::error::{Error, Result};
use monotone_minplus::format::{InstanceFile, Kind, OutputFile};
use monotone_minplus::gen::{gen, Family};
use monotone_minplus::harness::{self, BenchCase, RunEngine, DEFAULT_ORACLE_LIMIT};

#[derive(Parser)]
#[command(name = "minplus", version, about = "Monotone Min-Plus products and convolutions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance file.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform-monotone", value_parser = parse_family)]
        family: Family,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the run report; stderr when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the deterministic solver (or a given output) with the naive oracle.
    Check {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output file to check instead of running the solver.
        #[arg(long)]
        candidate: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: u64,
    },
    /// Time generated instances over a range of sizes.
    Bench {
        #[arg(long, value_parser = parse_kind, default_value = "product-row")]
        kind: Kind,
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 24, 32, 48])]
        sizes: Vec<usize>,
        /// Entry bound; defaults to n for each size.
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long, default_value = "uniform-monotone", value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dump modulus-search diagnostics.
    Stats {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also enumerate X, Y, Z by brute force and check X = Y - Z.
        #[arg(long)]
        brute: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    /// Deterministic solver with the default verification engine.
    Det,
    Naive,
    Verification,
    Direct,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountingArg {
    Monomial,
    Transform,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Schoolbook,
    Blocked,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "det")]
    engine: EngineArg,
    /// Fixed promise modulus (a multiple of 100).
    #[arg(long = "M")]
    m: Option<i64>,
    /// Prime range parameter: primes are drawn from [R/2, R].
    #[arg(long = "R")]
    r: Option<u64>,
    /// Exponent used to balance M.
    #[arg(long)]
    omega: Option<f64>,
    /// Good-modulus audit slack.
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long)]
    fast_shared_modulus: bool,
    #[arg(long, value_enum, default_value = "monomial")]
    counting: CountingArg,
    #[arg(long, value_enum, default_value = "schoolbook")]
    backend: BackendArg,
    /// Solve residue classes (or bench cases) on all cores.
    #[arg(long)]
    parallel: bool,
    /// Fail instead of warning when the good-modulus audit fails.
    #[arg(long)]
    strict_audit: bool,
}

impl SolverArgs {
    fn run_engine(&self) -> RunEngine {
        match self.engine {
            EngineArg::Naive => RunEngine::Naive,
            _ => RunEngine::Det,
        }
    }

    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig {
            engine: match self.engine {
                EngineArg::Direct => Engine::Direct,
                EngineArg::Auto => Engine::Auto,
                _ => Engine::Verification,
            },
            counting: match self.counting {
                CountingArg::Monomial => CountingRoute::Monomial,
                CountingArg::Transform => CountingRoute::Transform,
            },
            backend: match self.backend {
                BackendArg::Schoolbook => Backend::Schoolbook,
                BackendArg::Blocked => Backend::Blocked,
            },
            m: self.m,
            r: self.r,
            slack: self.slack,
            strict_audit: self.strict_audit,
            fast_shared_modulus: self.fast_shared_modulus,
            parallel: self.parallel,
            ..SolverConfig::default()
        };
        if let Some(w) = self.omega {
            cfg.balance.omega = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let diag = serde_json::json!({
                "error": e.code(),
                "message": e.to_string(),
                "coord": e.coord(),
            });
            eprintln!("{diag}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            n,
            bound,
            seed,
            family,
            output,
        } => {
            let f = gen(kind, n, bound, seed, family)?;
            emit(&f.to_canonical(), output.as_ref())?;
        }
        Cmd::Run {
            file,
            solver,
            output,
            report,
        } => {
            let f = InstanceFile::read(&file)?;
            let out = harness::run(&f, solver.run_engine(), &solver.config()?)?;
            emit(&out.output.to_canonical(), output.as_ref())?;
            let r = json(&out.report)?;
            match report {
                Some(p) => std::fs::write(p, r)?,
                None => eprint!("{r}"),
            }
        }
        Cmd::Check {
            file,
            solver,
            candidate,
            oracle_limit,
        } => {
            let f = InstanceFile::read(&file)?;
            let cand = candidate.map(|p| OutputFile::read(&p)).transpose()?;
            let r = harness::check(&f, cand.as_ref(), &solver.config()?, oracle_limit)?;
            print!("{}", json(&r)?);
            match &r.mismatch {
                None => println!("PASS {}", file.display()),
                Some(m) => {
                    println!(
                        "FAIL {} at {:?}: expected {:?}, found {:?}",
                        file.display(),
                        m.coord,
                        m.expected,
                        m.found
                    );
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Cmd::Bench {
            kind,
            sizes,
            bound,
            family,
            seed,
            reps,
            solver,
            output,
        } => {
            let cases: Vec<BenchCase> = sizes
                .iter()
                .flat_map(|&n| {
                    (0..reps).map(move |r| BenchCase {
                        kind,
                        n,
                        entry_bound: bound.unwrap_or(n as i64).max(1),
                        family: family.name().to_string(),
                        seed: seed + r,
                    })
                })
                .collect();
            let rows = harness::bench(&cases, &solver.config()?)?;
            emit(&json(&rows)?, output.as_ref())?;
        }
        Cmd::Stats {
            file,
            solver,
            brute,
            oracle_limit,
            output,
        } => {
            let f = InstanceFile::read(&file)?;
            let s = harness::stats(&f, &solver.config()?, brute, oracle_limit)?;
            emit(&json(&s)?, output.as_ref())?;
            if brute {
                eprintln!(
                    "X = Y - Z verified: {} ({} checks)",
                    s.identity_holds,
                    s.identity.len()
                );
            }
            eprintln!("first crossing M <= Q <= M*R: {} (Q = {})", s.first_crossing && s.q_bounds, s.q);
        }
    }
    Ok(ExitCode::SUCCESS)
}
