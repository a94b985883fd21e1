//! The verification pipeline shared by the row, column and convolution
//! solvers: modulus search, congruence counts `s`, active segments and the
//! spurious counts `s'`, and the decision `s > s'`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::counting::{congruent_conv_transform, congruent_matrix_transform, count_congruent, ConvTransformY, MatrixTransformY};
use crate::error::{Error, Result};
use crate::instance::{ConvVerificationInstance, VerificationInstance};
use crate::matrix::WitnessMask;
use crate::reduction::PairWindows;
use crate::modulus::{find_good_modulus, pool_for, LineY, ModulusReport, YSource};
use crate::segments::{active_hierarchy, aggregate_spurious, levelmax_for, ActiveSet, CellMap, Lines};

/// Wall-clock seconds per phase. Not part of any checksum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub reductions: f64,
    pub modulus_search: f64,
    pub counting: f64,
    pub segments: f64,
}

impl PhaseTimings {
    pub fn add(&mut self, other: &PhaseTimings) {
        self.reductions += other.reductions;
        self.modulus_search += other.modulus_search;
        self.counting += other.counting;
        self.segments += other.segments;
    }
}

/// Counters collected while solving a product or convolution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub engine: String,
    /// Halving levels solved through candidates.
    pub levels: usize,
    /// Promise modulus per solved level, deepest first.
    pub moduli: Vec<i64>,
    pub verification_calls: u64,
    /// Calls that reused a shared modulus after a passing audit.
    pub shared_reuses: u64,
    pub audit_failures: u64,
    /// Searches whose modulus broke `Q_{T-1} < M <= Q <= M * R`.
    pub crossing_failures: u64,
    /// Good modulus of every verification call, in solving order.
    pub q_trace: Vec<u64>,
    pub timings: PhaseTimings,
}

impl SolveStats {
    pub(crate) fn record(&mut self, report: &ModulusReport, timings: &PhaseTimings) {
        self.verification_calls += 1;
        self.shared_reuses += report.shared as u64;
        self.audit_failures += !report.audit_passed as u64;
        self.crossing_failures += !report.first_crossing_holds() as u64;
        self.q_trace.push(report.q);
        self.timings.add(timings);
    }
}

/// Cells accepted by one `(s, t)` instance.
pub(crate) struct PairOutcome {
    pub accepted: Vec<usize>,
    pub report: ModulusReport,
    pub timings: PhaseTimings,
}

/// Solves every pair and returns the accepted cells in pair order. With a
/// shared modulus the pair with the most positions searches first and the
/// others start from its modulus.
pub(crate) fn drive_pairs<F>(
    pairs: &[PairWindows],
    cfg: &SolverConfig,
    stats: &mut SolveStats,
    solve: F,
) -> Result<Vec<usize>>
where
    F: Fn(&PairWindows, Option<&ModulusReport>) -> Result<PairOutcome> + Sync + Send,
{
    let outcomes = if cfg.fast_shared_modulus && !pairs.is_empty() {
        let size = |p: &PairWindows| -> usize { p.windows.iter().map(|w| w.end - w.start + 1).sum() };
        let lead = (0..pairs.len()).max_by_key(|&i| (size(&pairs[i]), std::cmp::Reverse(i))).unwrap_or(0);
        let first = solve(&pairs[lead], None)?;
        let rest: Vec<usize> = (0..pairs.len()).filter(|&i| i != lead).collect();
        let shared = first.report.clone();
        let mut others = map_ordered(&rest, cfg.parallel, |&i| solve(&pairs[i], Some(&shared)))?.into_iter();
        let mut first = Some(first);
        (0..pairs.len())
            .map(|i| if i == lead { first.take() } else { others.next() })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("pair outcomes out of order".into()))?
    } else {
        map_ordered(pairs, cfg.parallel, |p| solve(p, None))?
    };
    let mut accepted = Vec::new();
    for o in outcomes {
        stats.record(&o.report, &o.timings);
        accepted.extend(o.accepted);
    }
    Ok(accepted)
}

/// How `s` and the Y-tables are computed for a job.
#[derive(Clone, Copy)]
pub(crate) enum Counter<'a> {
    Monomial,
    /// Ring products over a materialized matrix instance with full lines.
    Matrix(&'a VerificationInstance),
    /// Bivariate products over a materialized convolution instance; lines
    /// are the full diagonals flagged in the slice.
    Conv(&'a ConvVerificationInstance, &'a [bool]),
}

pub(crate) struct Job<'a, L: ?Sized> {
    pub lines: &'a L,
    pub map: CellMap,
    pub ncells: usize,
    pub m: i64,
    /// Largest entry of the instance; scales the audit bound.
    pub entry_bound: i64,
    /// Largest dimension; sets the default `R` and slack.
    pub size_hint: usize,
    pub counter: Counter<'a>,
    /// Modulus to try before searching.
    pub shared: Option<&'a ModulusReport>,
}

#[derive(Clone, Debug)]
pub struct VerifyOutput {
    pub s: Vec<u64>,
    pub s_prime: Vec<u64>,
    pub report: ModulusReport,
    pub timings: PhaseTimings,
}

impl VerifyOutput {
    #[inline]
    pub fn accepted(&self, cell: usize) -> bool {
        self.s[cell] > self.s_prime[cell]
    }
}

/// Answer of a standalone verification run together with its diagnostics.
#[derive(Clone, Debug)]
pub struct VerificationResult {
    pub mask: WitnessMask,
    pub detail: VerifyOutput,
}

/// Maps `f` over `items` keeping input order, on the rayon pool if asked.
pub(crate) fn map_ordered<T, U, F>(items: &[T], parallel: bool, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

fn audit(sets: &[ActiveSet], bound: f64) -> bool {
    sets.iter().all(|s| s.len() as f64 <= bound)
}

fn search<L: Lines + ?Sized>(job: &Job<'_, L>, cfg: &SolverConfig, lmax: u32) -> Result<(u64, ModulusReport)> {
    let pool = pool_for(job.size_hint, cfg.r)?;
    match job.counter {
        Counter::Monomial => find_good_modulus(&LineY::new(job.lines, lmax), job.m, &pool, lmax),
        Counter::Matrix(inst) => {
            let src = MatrixTransformY {
                inst,
                field: cfg.field,
                backend: cfg.backend.get(),
            };
            find_good_modulus(&src as &dyn YSource, job.m, &pool, lmax)
        }
        Counter::Conv(inst, diagonals) => {
            let src = ConvTransformY {
                inst,
                field: cfg.field,
                diagonals: Some(diagonals),
            };
            find_good_modulus(&src as &dyn YSource, job.m, &pool, lmax)
        }
    }
}

pub(crate) fn verify<L: Lines + ?Sized>(job: Job<'_, L>, cfg: &SolverConfig) -> Result<VerifyOutput> {
    let lmax = levelmax_for(job.m)?;
    let lines = job.lines;
    let positions: u64 = (0..lines.line_count())
        .map(|l| {
            let w = lines.window(l);
            (w.end - w.start + 1) as u64
        })
        .sum();
    cfg.field.ensure_counts(positions)?;

    let slack = cfg.slack_for(job.size_hint);
    let scale = slack * lines.line_count().max(1) as f64 * job.entry_bound.max(1) as f64;
    let mut timings = PhaseTimings::default();

    let mut chosen = None;
    if let Some(shared) = job.shared {
        let t = Instant::now();
        let sets = active_hierarchy(lines, lmax, shared.q)?;
        timings.segments += t.elapsed().as_secs_f64();
        if audit(&sets, scale / shared.q as f64) {
            let mut report = shared.clone();
            report.shared = true;
            chosen = Some((shared.q, report, sets));
        }
    }
    let (q, mut report, sets) = match chosen {
        Some(x) => x,
        None => {
            let t = Instant::now();
            let (q, report) = search(&job, cfg, lmax)?;
            timings.modulus_search += t.elapsed().as_secs_f64();
            let t = Instant::now();
            let sets = active_hierarchy(lines, lmax, q)?;
            timings.segments += t.elapsed().as_secs_f64();
            (q, report, sets)
        }
    };

    let bound = scale / q as f64;
    let passed = audit(&sets, bound);
    if !passed {
        let counts: Vec<usize> = sets.iter().map(|s| s.len()).collect();
        if cfg.strict_audit {
            return Err(Error::Internal(format!(
                "good-modulus audit failed for Q = {q}: active counts {counts:?} exceed {bound:.1}"
            )));
        }
        log::warn!("good-modulus audit failed for Q = {q}: active counts {counts:?} exceed {bound:.1}");
    }
    report.active_counts = sets.iter().map(|s| s.len() as u64).collect();
    report.slack = slack;
    report.audit_bound = bound;
    report.audit_passed = passed;

    let t = Instant::now();
    let s = match job.counter {
        Counter::Monomial => count_congruent(lines, q, job.map, job.ncells),
        Counter::Matrix(inst) => congruent_matrix_transform(inst, q, &cfg.field, cfg.backend.get())?,
        Counter::Conv(inst, diagonals) => {
            let mut s = congruent_conv_transform(inst, q, &cfg.field)?;
            for (x, &keep) in s.iter_mut().zip(diagonals) {
                if !keep {
                    *x = 0;
                }
            }
            s
        }
    };
    timings.counting += t.elapsed().as_secs_f64();

    let t = Instant::now();
    let s_prime = aggregate_spurious(&sets[0], lines, job.map, job.ncells);
    timings.segments += t.elapsed().as_secs_f64();

    if let Some(cell) = (0..job.ncells).find(|&c| s[c] < s_prime[c]) {
        return Err(Error::Internal(format!(
            "spurious count exceeds congruence count at cell {cell}"
        )));
    }
    Ok(VerifyOutput {
        s,
        s_prime,
        report,
        timings,
    })
}
