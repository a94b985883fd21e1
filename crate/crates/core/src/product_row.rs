//! Row-monotone Min-Plus product.
//!
//! The product is built bottom-up over the halvings `A/2^d`, `B/2^d`. At each
//! level the three candidates `2C' + s` are verified in increasing order and
//! every cell takes the first accepted one. A candidate is verified by
//! residue shifting into `(s, t)` instances, each restricted to the
//! positions that can still carry a witness of an unresolved cell.

use std::time::Instant;

use crate::config::{CountingRoute, Engine, SolverConfig};
use crate::error::{Error, Result};
use crate::instance::{Variant, VerificationInstance};
use crate::matrix::{validate_promises, Axis, IntMatrix, MonotoneTag, WitnessMask};
use crate::reduction::{choose_M, normalize_A, shift_residues, PairSource, PairWindows, ShiftedResidues};
use crate::segments::{CellMap, Lines, MatrixLines, TripleSource, Window};
use crate::verify::{drive_pairs, verify, Counter, Job, PairOutcome, SolveStats, VerificationResult};

fn job<'a, L: Lines + ?Sized>(
    lines: &'a L,
    map: CellMap,
    ncells: usize,
    m: i64,
    entry_bound: i64,
    size_hint: usize,
    counter: Counter<'a>,
) -> Job<'a, L> {
    Job {
        lines,
        map,
        ncells,
        m,
        entry_bound,
        size_hint,
        counter,
        shared: None,
    }
}

fn require_variant(inst: &VerificationInstance, want: Variant) -> Result<()> {
    if inst.variant() != want {
        return Err(Error::Config(format!(
            "instance has variant {:?}, expected {want:?}",
            inst.variant()
        )));
    }
    Ok(())
}

/// Per-cell congruence counts `#{k : A[i][k] + B[k][j] = C[i][j] (mod q)}`.
pub fn compute_s_matrix(inst: &VerificationInstance, q: u64, cfg: &SolverConfig) -> Result<IntMatrix> {
    require_variant(inst, Variant::Row)?;
    if q == 0 {
        return Err(Error::Config("modulus must be positive".into()));
    }
    let (na, nb, nc) = inst.dims();
    cfg.field.ensure_counts(nb as u64)?;
    let s = match cfg.counting {
        CountingRoute::Monomial => crate::counting::count_congruent(
            &MatrixLines::full(inst, inst.m()),
            q,
            CellMap::Along { stride: nc },
            na * nc,
        ),
        CountingRoute::Transform => {
            crate::counting::congruent_matrix_transform(inst, q, &cfg.field, cfg.backend.get())?
        }
    };
    IntMatrix::new(na, nc, s.into_iter().map(|x| x as i64).collect())
}

/// Decides per `(i, j)` whether some `k` has `A[i][k] + B[k][j] = C[i][j]`.
pub fn solve_verification_row(inst: &VerificationInstance, cfg: &SolverConfig) -> Result<WitnessMask> {
    Ok(solve_verification_row_detailed(inst, cfg)?.mask)
}

pub fn solve_verification_row_detailed(inst: &VerificationInstance, cfg: &SolverConfig) -> Result<VerificationResult> {
    cfg.validate()?;
    require_variant(inst, Variant::Row)?;
    let (na, _, nc) = inst.dims();
    let lines = MatrixLines::full(inst, inst.m());
    let counter = match cfg.counting {
        CountingRoute::Monomial => Counter::Monomial,
        CountingRoute::Transform => Counter::Matrix(inst),
    };
    let out = verify(
        job(
            &lines,
            CellMap::Along { stride: nc },
            na * nc,
            inst.m(),
            inst.max_entry(),
            inst.max_dim(),
            counter,
        ),
        cfg,
    )?;
    let mut mask = inst.empty_mask();
    for i in 0..na {
        for j in 0..nc {
            mask.set(i, j, out.accepted(i * nc + j));
        }
    }
    Ok(VerificationResult { mask, detail: out })
}

/// Rows `rows[r]` of a triple source, renumbered `0..rows.len()`.
pub(crate) struct RowSubset<'a, S: ?Sized> {
    pub src: &'a S,
    pub rows: &'a [usize],
}

impl<S: TripleSource + ?Sized> TripleSource for RowSubset<'_, S> {
    #[inline]
    fn dims(&self) -> (usize, usize, usize) {
        let (_, nb, nc) = self.src.dims();
        (self.rows.len(), nb, nc)
    }
    #[inline]
    fn a(&self, i: usize, k: usize) -> i64 {
        self.src.a(self.rows[i], k)
    }
    #[inline]
    fn b(&self, k: usize, j: usize) -> i64 {
        self.src.b(k, j)
    }
    #[inline]
    fn c(&self, i: usize, j: usize) -> i64 {
        self.src.c(self.rows[i], j)
    }
}

/// Distinct values of `key` over the windows, in increasing order, and the
/// windows renumbered into that list.
pub(crate) fn compact_outer(windows: &[Window]) -> (Vec<usize>, Vec<Window>) {
    let mut rows: Vec<usize> = windows.iter().map(|w| w.outer).collect();
    rows.sort_unstable();
    rows.dedup();
    let local = windows
        .iter()
        .map(|w| Window {
            outer: rows.binary_search(&w.outer).unwrap_or(0),
            ..*w
        })
        .collect();
    (rows, local)
}

fn sorted_set(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// One `(s, t)` instance of a row candidate: accepted cells `i * nc + j`.
fn solve_row_pair(
    sh: &ShiftedResidues,
    pair: &PairWindows,
    shared: Option<&crate::modulus::ModulusReport>,
    size_hint: usize,
    cfg: &SolverConfig,
) -> Result<PairOutcome> {
    let src = sh.source(pair.s, pair.t);
    let m = sh.shift().m;
    let nc = src.dims().2;
    let entry_bound = {
        let (a, b, c) = sh.pre_shifted();
        [a, b, c].iter().filter_map(|x| x.max_entry()).max().unwrap_or(0)
    };
    match cfg.counting {
        CountingRoute::Monomial => {
            let (rows, local) = compact_outer(&pair.windows);
            let sub = RowSubset { src: &src, rows: &rows };
            let lines = MatrixLines::with_windows(&sub, m, &local);
            let mut j = job(
                &lines,
                CellMap::Along { stride: nc },
                rows.len() * nc,
                m,
                entry_bound,
                size_hint,
                Counter::Monomial,
            );
            j.shared = shared;
            let out = verify(j, cfg)?;
            let accepted = (0..rows.len() * nc)
                .filter(|&c| out.accepted(c))
                .map(|c| rows[c / nc] * nc + c % nc)
                .collect();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
        CountingRoute::Transform => {
            let rows = sorted_set(pair.windows.iter().map(|w| w.outer));
            let inner = sorted_set(pair.windows.iter().map(|w| w.inner));
            let cols = sorted_set(pair.windows.iter().flat_map(|w| w.start..=w.end));
            let inst = restricted_instance(&src, m, &rows, &inner, &cols, Variant::Row)?;
            let lines = MatrixLines::full(&inst, m);
            let mut j = job(
                &lines,
                CellMap::Along { stride: cols.len() },
                rows.len() * cols.len(),
                m,
                entry_bound,
                size_hint,
                Counter::Matrix(&inst),
            );
            j.shared = shared;
            let out = verify(j, cfg)?;
            let w = cols.len();
            let accepted = (0..rows.len() * w)
                .filter(|&c| out.accepted(c))
                .map(|c| rows[c / w] * nc + cols[c % w])
                .collect();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
    }
}

/// The sub-instance on `rows x inner x cols` of a pair source.
pub(crate) fn restricted_instance(
    src: &PairSource<'_>,
    m: i64,
    rows: &[usize],
    inner: &[usize],
    cols: &[usize],
    variant: Variant,
) -> Result<VerificationInstance> {
    VerificationInstance::new(
        IntMatrix::from_fn(rows.len(), inner.len(), |i, k| src.a(rows[i], inner[k])),
        IntMatrix::from_fn(inner.len(), cols.len(), |k, j| src.b(inner[k], cols[j])),
        IntMatrix::from_fn(rows.len(), cols.len(), |i, j| src.c(rows[i], cols[j])),
        m,
        variant,
    )
}

/// Start index of every maximal constant run of `row`.
pub(crate) fn constant_blocks(row: &[i64]) -> Vec<usize> {
    (0..row.len()).filter(|&j| j == 0 || row[j] != row[j - 1]).collect()
}

/// Walks the common refinement of two run decompositions of `0..len`,
/// calling `f(lo, hi)` for each half-open refined interval.
pub(crate) fn for_each_refined(x: &[usize], y: &[usize], len: usize, mut f: impl FnMut(usize, usize)) {
    let (mut p, mut q, mut lo) = (0, 0, 0);
    while lo < len {
        while p + 1 < x.len() && x[p + 1] <= lo {
            p += 1;
        }
        while q + 1 < y.len() && y[q + 1] <= lo {
            q += 1;
        }
        let nx = x.get(p + 1).copied().unwrap_or(len);
        let ny = y.get(q + 1).copied().unwrap_or(len);
        let hi = nx.min(ny);
        f(lo, hi);
        lo = hi;
    }
}

/// Direct segment scan: per `(i, k)` the refined constant intervals of
/// `B[k]` and `C[i]` are tested once each and matching ones range-stamped
/// into row `i`. Works on any triple with row-monotone `B` and `C`.
pub fn direct_row_mask(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, skip: impl Fn(usize, usize) -> bool) -> WitnessMask {
    let (na, nb, nc) = (a.rows(), a.cols(), b.cols());
    let b_blocks: Vec<Vec<usize>> = (0..nb).map(|k| constant_blocks(b.row(k))).collect();
    let mut mask = WitnessMask::grid(na, nc);
    let mut diff = vec![0i32; nc + 1];
    for i in 0..na {
        let c_blocks = constant_blocks(c.row(i));
        diff.iter_mut().for_each(|d| *d = 0);
        for k in 0..nb {
            let aik = a.get(i, k);
            for_each_refined(&b_blocks[k], &c_blocks, nc, |lo, hi| {
                if aik + b.get(k, lo) == c.get(i, lo) {
                    diff[lo] += 1;
                    diff[hi] -= 1;
                }
            });
        }
        let mut run = 0;
        for j in 0..nc {
            run += diff[j];
            if run > 0 && !skip(i, j) {
                mask.set(i, j, true);
            }
        }
    }
    mask
}

/// Engine actually used after resolving `Auto`.
pub(crate) fn resolve_engine(cfg: &SolverConfig, m: i64, dims: (usize, usize, usize), bound: i64) -> Engine {
    match cfg.engine {
        Engine::Auto => {
            let prod = (dims.0.max(1) * dims.1.max(1) * dims.2.max(1)) as f64;
            let verification = m as f64 * prod.powf(cfg.balance.omega / 3.0);
            let direct = (dims.0.max(1) * dims.1.max(1)) as f64 * bound.max(1) as f64;
            if direct <= verification {
                Engine::Direct
            } else {
                Engine::Verification
            }
        }
        e => e,
    }
}

/// Halvings `x, x/2, x/4, ...` of both inputs until both are all-zero.
pub(crate) fn halvings(a: &IntMatrix, b: &IntMatrix) -> Vec<(IntMatrix, IntMatrix)> {
    let mut out = vec![(a.clone(), b.clone())];
    while out.last().is_some_and(|(a, b)| !(a.is_zero() && b.is_zero())) {
        let (a, b) = out.last().unwrap();
        out.push((a.map(|x| x >> 1), b.map(|x| x >> 1)));
    }
    out
}

/// Picks, per cell, the first of the candidates `2C' + s` accepted by
/// `accept`, which receives the candidate matrix and the resolved flags.
pub(crate) fn resolve_candidates(
    prev: &IntMatrix,
    level: usize,
    mut accept: impl FnMut(&IntMatrix, &[bool]) -> Result<Vec<usize>>,
) -> Result<IntMatrix> {
    let (rows, cols) = (prev.rows(), prev.cols());
    let mut out = IntMatrix::zeros(rows, cols);
    let mut resolved = vec![false; rows * cols];
    let mut left = rows * cols;
    for s in 0..3 {
        if left == 0 {
            break;
        }
        let cand = prev.map(|x| 2 * x + s);
        for cell in accept(&cand, &resolved)? {
            if !resolved[cell] {
                resolved[cell] = true;
                left -= 1;
                out.as_mut_slice()[cell] = cand.as_slice()[cell];
            }
        }
    }
    if let Some(cell) = resolved.iter().position(|&r| !r) {
        return Err(Error::Internal(format!(
            "no candidate accepted at level {level}, cell ({}, {})",
            cell / cols.max(1),
            cell % cols.max(1)
        )));
    }
    Ok(out)
}

fn verify_row_candidate(
    a: &IntMatrix,
    b: &IntMatrix,
    cand: &IntMatrix,
    resolved: &[bool],
    m: i64,
    size_hint: usize,
    cfg: &SolverConfig,
    stats: &mut SolveStats,
) -> Result<Vec<usize>> {
    let nc = cand.cols();
    let t = Instant::now();
    let sh = shift_residues(a, b, cand, m)?;
    let pairs = sh.pair_windows(|i, _, j| !resolved[i * nc + j]);
    stats.timings.reductions += t.elapsed().as_secs_f64();
    drive_pairs(&pairs, cfg, stats, |p, shared| solve_row_pair(&sh, p, shared, size_hint, cfg))
}

/// `A * B` for row-monotone `B` with entries in `[1, bound]`.
pub fn minplus_monotone_row(a: &IntMatrix, b: &IntMatrix, tag: &MonotoneTag, cfg: &SolverConfig) -> Result<IntMatrix> {
    Ok(minplus_monotone_row_with_stats(a, b, tag, cfg)?.0)
}

pub fn minplus_monotone_row_with_stats(
    a: &IntMatrix,
    b: &IntMatrix,
    tag: &MonotoneTag,
    cfg: &SolverConfig,
) -> Result<(IntMatrix, SolveStats)> {
    cfg.validate()?;
    if tag.axis != Axis::RowMonotone {
        return Err(Error::Config(format!("row product needs a row-monotone tag, got {:?}", tag.axis)));
    }
    check_product_shapes(a, b)?;
    validate_promises(b, tag).into_result()?;
    let t = Instant::now();
    let bound = tag.entry_bound;
    let (an, offsets) = normalize_A(a, bound);
    let levels = halvings(&an, b);
    let (na, nb, nc) = (a.rows(), a.cols(), b.cols());
    let size_hint = na.max(nb).max(nc);
    let m_top = cfg.m.unwrap_or_else(|| choose_M((na, nb, nc), bound, &cfg.balance));
    let engine = resolve_engine(cfg, m_top, (na, nb, nc), bound);
    let mut stats = SolveStats {
        engine: format!("{engine:?}").to_lowercase(),
        ..SolveStats::default()
    };
    stats.timings.reductions += t.elapsed().as_secs_f64();

    let mut prod = IntMatrix::zeros(na, nc);
    for d in (0..levels.len() - 1).rev() {
        let (ad, bd) = &levels[d];
        let ub = bd.max_entry().unwrap_or(0).max(1);
        let m = cfg.m.unwrap_or_else(|| choose_M((na, nb, nc), ub, &cfg.balance));
        stats.levels += 1;
        stats.moduli.push(m);
        prod = resolve_candidates(&prod, d, |cand, resolved| match engine {
            Engine::Direct => {
                let mask = direct_row_mask(ad, bd, cand, |i, j| resolved[i * nc + j]);
                Ok((0..na * nc).filter(|&c| mask.get(c / nc, c % nc)).collect())
            }
            _ => verify_row_candidate(ad, bd, cand, resolved, m, size_hint, cfg, &mut stats),
        })?;
    }
    let out = readd_offsets(&prod, &offsets)?;
    Ok((out, stats))
}

pub(crate) fn check_product_shapes(a: &IntMatrix, b: &IntMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.cols() == 0 {
        return Err(Error::DimensionMismatch("inner dimension is empty".into()));
    }
    Ok(())
}

pub(crate) fn readd_offsets(prod: &IntMatrix, offsets: &[i64]) -> Result<IntMatrix> {
    let mut out = prod.clone();
    for (i, &d) in offsets.iter().enumerate() {
        for x in out.row_mut(i) {
            *x = x.checked_add(d).ok_or(Error::Overflow("re-adding row offsets"))?;
        }
    }
    Ok(out)
}
