//! Library side of the command-line tool: run, check, stats and bench.

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::SolverConfig;
use crate::convolution::{minplus_conv_monotone_with_stats, solve_verification_conv_detailed};
use crate::error::{Error, Result};
use crate::format::{Grid, InstanceFile, Kind, OutputFile, FORMAT_VERSION};
use crate::gen::{gen, lift_conv, lift_product, Family, GEN_PROMISE_MODULUS};
use crate::instance::{witness_mask_naive, AnyInstance, ConvVerificationInstance, Variant, VerificationInstance};
use crate::matrix::MonotoneTag;
use crate::modulus::{count_xyz_bruteforce, ModulusReport, SegmentCounts};
use crate::naive::{minplus_convolution_naive, minplus_product_naive, QueryAxis};
use crate::product_col::{
    minplus_monotone_col_with_stats, normalize_nonincreasing, rotate_to_problem2prime, solve_verification_col_detailed,
};
use crate::product_row::{minplus_monotone_row_with_stats, solve_verification_row_detailed};
use crate::segments::{ConvLines, Lines, MatrixLines};
use crate::verify::{PhaseTimings, SolveStats, VerificationResult};

/// Default cap on naive-oracle work (inner-loop iterations).
pub const DEFAULT_ORACLE_LIMIT: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunEngine {
    Det,
    Naive,
}

impl FromStr for RunEngine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(RunEngine::Det),
            "naive" => Ok(RunEngine::Naive),
            _ => Err(Error::Config(format!("unknown engine {s:?}, expected det or naive"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusDigest {
    pub calls: u64,
    /// SHA-256 over the good moduli of all verification calls, in order.
    pub q_digest: String,
    pub audit_failures: u64,
    pub shared_reuses: u64,
    pub moduli: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: Kind,
    pub engine: RunEngine,
    /// Solver engine behind `det`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    pub timings: PhaseTimings,
    pub total_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusDigest>,
    /// SHA-256 of the canonical output text.
    pub checksum: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: OutputFile,
    pub report: RunReport,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn q_digest(q: &[u64]) -> String {
    let text: Vec<String> = q.iter().map(|x| x.to_string()).collect();
    sha256_hex(text.join(",").as_bytes())
}

fn digest_stats(stats: &SolveStats) -> ModulusDigest {
    ModulusDigest {
        calls: stats.verification_calls,
        q_digest: q_digest(&stats.q_trace),
        audit_failures: stats.audit_failures,
        shared_reuses: stats.shared_reuses,
        moduli: stats.moduli.clone(),
    }
}

fn digest_single(r: &ModulusReport) -> ModulusDigest {
    ModulusDigest {
        calls: 1,
        q_digest: q_digest(&[r.q]),
        audit_failures: !r.audit_passed as u64,
        shared_reuses: 0,
        moduli: vec![r.m],
    }
}

/// The promised instance held by a verification file.
pub fn matrix_instance(file: &InstanceFile) -> Result<VerificationInstance> {
    let variant = match file.kind {
        Kind::VerifyRow => Variant::Row,
        Kind::VerifyCol => Variant::Col,
        k => return Err(Error::Config(format!("{k} is not a matrix verification kind"))),
    };
    let c = file.c.as_ref().ok_or_else(|| Error::Parse("missing c".into()))?;
    let m = file.m.ok_or_else(|| Error::Parse("missing m".into()))?;
    VerificationInstance::new(file.a.matrix()?, file.b.matrix()?, c.matrix()?, m, variant)
}

pub fn conv_instance(file: &InstanceFile) -> Result<ConvVerificationInstance> {
    if file.kind != Kind::VerifyConv {
        return Err(Error::Config(format!("{} is not verify-conv", file.kind)));
    }
    let c = file.c.as_ref().ok_or_else(|| Error::Parse("missing c".into()))?;
    let m = file.m.ok_or_else(|| Error::Parse("missing m".into()))?;
    ConvVerificationInstance::new(file.a.array()?, file.b.array()?, c.array()?, m)
}

/// Inner-loop iterations the naive oracle needs for this file.
pub fn oracle_work(file: &InstanceFile) -> u64 {
    let d: Vec<u64> = file.dims.iter().map(|&x| x as u64).collect();
    if file.kind.is_array() {
        d[0].saturating_mul(d[0])
    } else {
        d.iter().product()
    }
}

fn guard_oracle(file: &InstanceFile, limit: u64) -> Result<()> {
    let work = oracle_work(file);
    if work > limit {
        return Err(Error::OracleLimit { work, limit });
    }
    Ok(())
}

fn output(kind: Kind, origin: Option<usize>, result: Grid) -> OutputFile {
    OutputFile {
        format: FORMAT_VERSION,
        kind,
        origin,
        result,
    }
}

fn verification_output(kind: Kind, r: &VerificationResult) -> OutputFile {
    let origin = kind.is_array().then_some(2);
    output(kind, origin, (&r.mask).into())
}

/// Runs one file with the chosen engine.
pub fn run(file: &InstanceFile, engine: RunEngine, cfg: &SolverConfig) -> Result<RunOutcome> {
    file.check()?;
    let t = Instant::now();
    let (out, solver, timings, modulus) = match engine {
        RunEngine::Det => run_det(file, cfg)?,
        RunEngine::Naive => (run_naive(file)?, None, PhaseTimings::default(), None),
    };
    let checksum = sha256_hex(out.to_canonical().as_bytes());
    let report = RunReport {
        kind: file.kind,
        engine,
        solver,
        timings,
        total_seconds: t.elapsed().as_secs_f64(),
        modulus,
        checksum,
    };
    Ok(RunOutcome { output: out, report })
}

type DetParts = (OutputFile, Option<String>, PhaseTimings, Option<ModulusDigest>);

fn run_det(file: &InstanceFile, cfg: &SolverConfig) -> Result<DetParts> {
    let kind = file.kind;
    let from_stats = |o: OutputFile, s: SolveStats| (o, Some(s.engine.clone()), s.timings, Some(digest_stats(&s)));
    let from_single = |o: OutputFile, r: &VerificationResult| {
        (
            o,
            Some("verification".to_string()),
            r.detail.timings,
            Some(digest_single(&r.detail.report)),
        )
    };
    Ok(match kind {
        Kind::ProductRow => {
            let (c, s) = minplus_monotone_row_with_stats(
                &file.a.matrix()?,
                &file.b.matrix()?,
                &MonotoneTag::row(file.entry_bound)?,
                cfg,
            )?;
            from_stats(output(kind, None, (&c).into()), s)
        }
        Kind::ProductCol => {
            let (c, s) = minplus_monotone_col_with_stats(
                &file.a.matrix()?,
                &file.b.matrix()?,
                &MonotoneTag::column(file.entry_bound)?,
                cfg,
            )?;
            from_stats(output(kind, None, (&c).into()), s)
        }
        Kind::Conv => {
            let (c, s) = minplus_conv_monotone_with_stats(
                &file.a.array()?,
                &file.b.array()?,
                &MonotoneTag::array(file.entry_bound)?,
                cfg,
            )?;
            from_stats(output(kind, Some(2), (&c).into()), s)
        }
        Kind::VerifyRow => {
            let r = solve_verification_row_detailed(&matrix_instance(file)?, cfg)?;
            from_single(verification_output(kind, &r), &r)
        }
        Kind::VerifyCol => {
            let r = solve_verification_col_detailed(&matrix_instance(file)?, cfg)?;
            from_single(verification_output(kind, &r), &r)
        }
        Kind::VerifyConv => {
            let r = solve_verification_conv_detailed(&conv_instance(file)?, cfg)?;
            from_single(verification_output(kind, &r), &r)
        }
    })
}

fn run_naive(file: &InstanceFile) -> Result<OutputFile> {
    let kind = file.kind;
    Ok(match kind {
        Kind::ProductRow | Kind::ProductCol => {
            let tag = if kind == Kind::ProductRow {
                MonotoneTag::row(file.entry_bound)?
            } else {
                MonotoneTag::column(file.entry_bound)?
            };
            let b = file.b.matrix()?;
            crate::matrix::validate_promises(&b, &tag).into_result()?;
            output(kind, None, (&minplus_product_naive(&file.a.matrix()?, &b)?).into())
        }
        Kind::Conv => {
            let tag = MonotoneTag::array(file.entry_bound)?;
            let (a, b) = (file.a.array()?, file.b.array()?);
            crate::matrix::validate_promises(&a, &tag).into_result()?;
            crate::matrix::validate_promises(&b, &tag).into_result()?;
            output(kind, Some(2), (&minplus_convolution_naive(&a, &b)?).into())
        }
        Kind::VerifyRow | Kind::VerifyCol => {
            let inst = matrix_instance(file)?;
            let axis = inst.variant().axis();
            output(kind, None, (&witness_mask_naive(&inst, axis)?).into())
        }
        Kind::VerifyConv => {
            let inst = conv_instance(file)?;
            output(kind, Some(2), (&witness_mask_naive(&inst, QueryAxis::PerK)?).into())
        }
    })
}

/// First differing cell of two outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    /// Row and column, or the logical array index.
    pub coord: Vec<usize>,
    pub expected: Option<i64>,
    pub found: Option<i64>,
}

fn cells(g: &Grid, origin: usize) -> Vec<(Vec<usize>, i64)> {
    match g {
        Grid::Matrix(rows) => rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &x)| (vec![i, j], x)))
            .collect(),
        Grid::Array(v) => v.iter().enumerate().map(|(i, &x)| (vec![i + origin], x)).collect(),
    }
}

/// Compares `found` against `expected` cell by cell.
pub fn compare_outputs(expected: &OutputFile, found: &OutputFile) -> Option<Mismatch> {
    let e = cells(&expected.result, expected.origin.unwrap_or(0));
    let f = cells(&found.result, found.origin.unwrap_or(0));
    for i in 0..e.len().max(f.len()) {
        let (ec, fc) = (e.get(i), f.get(i));
        if ec != fc {
            return Some(Mismatch {
                coord: ec.or(fc).map(|c| c.0.clone()).unwrap_or_default(),
                expected: ec.map(|c| c.1),
                found: fc.map(|c| c.1),
            });
        }
    }
    (expected.kind != found.kind).then(|| Mismatch {
        coord: vec![],
        expected: None,
        found: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub kind: Kind,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Mismatch>,
    pub oracle_checksum: String,
    pub checked_checksum: String,
}

/// Runs both engines (or takes `candidate` in place of `det`) and compares.
pub fn check(file: &InstanceFile, candidate: Option<&OutputFile>, cfg: &SolverConfig, oracle_limit: u64) -> Result<CheckReport> {
    file.check()?;
    guard_oracle(file, oracle_limit)?;
    let naive = run(file, RunEngine::Naive, cfg)?.output;
    let checked = match candidate {
        Some(c) => c.clone(),
        None => run(file, RunEngine::Det, cfg)?.output,
    };
    let mismatch = compare_outputs(&naive, &checked);
    Ok(CheckReport {
        kind: file.kind,
        pass: mismatch.is_none(),
        mismatch,
        oracle_checksum: sha256_hex(naive.to_canonical().as_bytes()),
        checked_checksum: sha256_hex(checked.to_canonical().as_bytes()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub q_prev: u64,
    pub prime: u64,
    pub level: u32,
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u32,
    /// Active segments at the final modulus.
    pub active: u64,
    /// Brute-force counts at the final modulus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute: Option<SegmentCounts>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub kind: Kind,
    /// True when the instance was lifted from a product or convolution file.
    pub lifted: bool,
    pub m: i64,
    pub q: u64,
    pub first_crossing: bool,
    pub q_bounds: bool,
    pub modulus: ModulusReport,
    pub levels: Vec<LevelStats>,
    pub identity: Vec<IdentityCheck>,
    pub identity_holds: bool,
}

enum Promised {
    Matrix(VerificationInstance),
    Conv(ConvVerificationInstance),
}

fn promised(file: &InstanceFile, m: i64, oracle_limit: u64) -> Result<(Promised, bool)> {
    Ok(match file.kind {
        Kind::VerifyRow | Kind::VerifyCol => (Promised::Matrix(matrix_instance(file)?), false),
        Kind::VerifyConv => (Promised::Conv(conv_instance(file)?), false),
        Kind::ProductRow => {
            guard_oracle(file, oracle_limit)?;
            let (a, b) = (file.a.matrix()?, file.b.matrix()?);
            let c = minplus_product_naive(&a, &b)?;
            (Promised::Matrix(lift_product(&a, &b, &c, m, Variant::Row)?), true)
        }
        Kind::ProductCol => {
            guard_oracle(file, oracle_limit)?;
            let (a, b) = (normalize_nonincreasing(&file.a.matrix()?), file.b.matrix()?);
            let c = minplus_product_naive(&a, &b)?;
            let w = [&a, &b, &c].iter().filter_map(|x| x.max_entry()).max().unwrap_or(0);
            let rot = rotate_to_problem2prime(&a, &b, &c, w)?;
            (Promised::Matrix(lift_product(&rot.a, &rot.b, &rot.c, m, Variant::Col)?), true)
        }
        Kind::Conv => {
            guard_oracle(file, oracle_limit)?;
            let (a, b) = (file.a.array()?, file.b.array()?);
            let c = minplus_convolution_naive(&a, &b)?;
            (Promised::Conv(lift_conv(&a, &b, &c, m)?), true)
        }
    })
}

fn level_stats<L: Lines + ?Sized>(
    lines: &L,
    report: &ModulusReport,
    brute: bool,
    limit: u64,
) -> Result<(Vec<LevelStats>, Vec<IdentityCheck>)> {
    let mut levels = Vec::new();
    for (l, &active) in report.active_counts.iter().enumerate() {
        let counts = if brute {
            Some(count_xyz_bruteforce(lines, report.q, l as u32, limit)?)
        } else {
            None
        };
        levels.push(LevelStats {
            level: l as u32,
            active,
            brute: counts,
        });
    }
    let mut identity = Vec::new();
    if brute {
        for step in &report.steps {
            for (idx, &p) in step.y.primes.iter().enumerate() {
                for (l, row) in step.y.y.iter().enumerate() {
                    let c = count_xyz_bruteforce(lines, step.q_prev * p, l as u32, limit)?;
                    let y = row[idx];
                    identity.push(IdentityCheck {
                        q_prev: step.q_prev,
                        prime: p,
                        level: l as u32,
                        x: c.x,
                        y,
                        z: c.z,
                        holds: c.y == y && c.x + c.z == y,
                    });
                }
            }
        }
    }
    Ok((levels, identity))
}

/// Modulus-search diagnostics. With `brute`, also the enumerated `X`, `Y`,
/// `Z` counts and the `X = Y - Z` check for every prime and level tried.
pub fn stats(file: &InstanceFile, cfg: &SolverConfig, brute: bool, oracle_limit: u64) -> Result<StatsReport> {
    file.check()?;
    let m = cfg.m.unwrap_or(GEN_PROMISE_MODULUS);
    let (inst, lifted) = promised(file, m, oracle_limit)?;
    let (m, report, (levels, identity)) = match &inst {
        Promised::Matrix(x) => {
            let r = match x.variant() {
                Variant::Row => solve_verification_row_detailed(x, cfg)?,
                Variant::Col => solve_verification_col_detailed(x, cfg)?,
            };
            let lines = MatrixLines::full(x, x.m());
            let ls = level_stats(&lines, &r.detail.report, brute, oracle_limit)?;
            (x.m(), r.detail.report, ls)
        }
        Promised::Conv(x) => {
            let r = solve_verification_conv_detailed(x, cfg)?;
            let lines = ConvLines::full(x, x.m());
            let ls = level_stats(&lines, &r.detail.report, brute, oracle_limit)?;
            (x.m(), r.detail.report, ls)
        }
    };
    Ok(StatsReport {
        kind: file.kind,
        lifted,
        m,
        q: report.q,
        first_crossing: report.first_crossing_holds(),
        q_bounds: m as u64 <= report.q && report.q <= m as u64 * report.r,
        identity_holds: identity.iter().all(|c| c.holds),
        modulus: report,
        levels,
        identity,
    })
}

/// Brute-force mask of a verification file, through [`AnyInstance`].
pub fn naive_mask(file: &InstanceFile) -> Result<crate::matrix::WitnessMask> {
    match file.kind {
        Kind::VerifyConv => witness_mask_naive(AnyInstance::Conv(&conv_instance(file)?), QueryAxis::PerK),
        _ => {
            let x = matrix_instance(file)?;
            witness_mask_naive(AnyInstance::Matrix(&x), x.variant().axis())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub kind: Kind,
    pub n: usize,
    pub entry_bound: i64,
    pub family: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub case: BenchCase,
    pub seconds: f64,
    pub checksum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusDigest>,
}

/// Generates and runs every case with the deterministic engine. Cases run
/// on the rayon pool when `cfg.parallel` is set; rows keep case order.
pub fn bench(cases: &[BenchCase], cfg: &SolverConfig) -> Result<Vec<BenchRow>> {
    let inner = SolverConfig {
        parallel: false,
        ..cfg.clone()
    };
    crate::verify::map_ordered(cases, cfg.parallel, |case| {
        let family: Family = case.family.parse()?;
        let file = gen(case.kind, case.n, case.entry_bound, case.seed, family)?;
        let t = Instant::now();
        let out = run(&file, RunEngine::Det, &inner)?;
        Ok(BenchRow {
            case: case.clone(),
            seconds: t.elapsed().as_secs_f64(),
            checksum: out.report.checksum,
            modulus: out.report.modulus,
        })
    })
}
