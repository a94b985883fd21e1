//! Column-monotone Min-Plus product.
//!
//! Rows of `A` are first made non-increasing by running prefix minima,
//! which leaves `A * B` unchanged when `B` is column-monotone. A candidate
//! `C` is then verified on the rotated triple `(W - C, B^T, W - A)`, where
//! the second and third matrices are row-monotone and the question "is
//! there a `k` with `A[i][k] + B[k][j] = C[i][j]`" is asked per line
//! `(i, j)` of the rotated instance.

use std::time::Instant;

use crate::config::{CountingRoute, Engine, SolverConfig};
use crate::error::{Error, Result};
use crate::instance::{Variant, VerificationInstance};
use crate::matrix::{validate_promises, Axis, IntMatrix, MonotoneTag, WitnessMask};
use crate::modulus::ModulusReport;
use crate::product_row::{
    check_product_shapes, constant_blocks, for_each_refined, halvings, readd_offsets, resolve_candidates,
    resolve_engine, restricted_instance,
};
use crate::reduction::{choose_M, normalize_A, shift_residues, PairWindows, ShiftedResidues};
use crate::segments::{CellMap, MatrixLines, TripleSource};
use crate::verify::{drive_pairs, verify, Counter, Job, PairOutcome, SolveStats, VerificationResult};

/// Running prefix minimum along every row.
pub fn normalize_nonincreasing(a: &IntMatrix) -> IntMatrix {
    let mut out = a.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        for j in 1..row.len() {
            row[j] = row[j].min(row[j - 1]);
        }
    }
    out
}

/// The triple `(W - C, B^T, W - A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotatedInstance {
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub w: i64,
}

impl RotatedInstance {
    /// Wraps the rotated triple as a promised instance answering per `(i, j)`.
    pub fn into_instance(self, m: i64) -> Result<VerificationInstance> {
        VerificationInstance::new(self.a, self.b, self.c, m, Variant::Col)
    }
}

pub fn rotate_to_problem2prime(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, w: i64) -> Result<RotatedInstance> {
    check_product_shapes(a, b)?;
    if c.rows() != a.rows() || c.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, expected {}x{}",
            c.rows(),
            c.cols(),
            a.rows(),
            b.cols()
        )));
    }
    let top = [a, b, c].iter().filter_map(|x| x.max_entry()).max().unwrap_or(0);
    if w < top {
        return Err(Error::Config(format!("complement W = {w} is below the largest entry {top}")));
    }
    Ok(RotatedInstance {
        a: c.map(|x| w - x),
        b: b.transpose(),
        c: a.map(|x| w - x),
        w,
    })
}

fn require_col(inst: &VerificationInstance) -> Result<()> {
    if inst.variant() != Variant::Col {
        return Err(Error::Config(format!(
            "instance has variant {:?}, expected Col",
            inst.variant()
        )));
    }
    Ok(())
}

/// Decides per `(i, k)` whether some `j` has `A[i][k] + B[k][j] = C[i][j]`.
pub fn solve_verification_col(inst: &VerificationInstance, cfg: &SolverConfig) -> Result<WitnessMask> {
    Ok(solve_verification_col_detailed(inst, cfg)?.mask)
}

pub fn solve_verification_col_detailed(inst: &VerificationInstance, cfg: &SolverConfig) -> Result<VerificationResult> {
    cfg.validate()?;
    require_col(inst)?;
    let (na, nb, _) = inst.dims();
    let lines = MatrixLines::full(inst, inst.m());
    let counter = match cfg.counting {
        CountingRoute::Monomial => Counter::Monomial,
        CountingRoute::Transform => Counter::Matrix(inst),
    };
    let out = verify(
        Job {
            lines: &lines,
            map: CellMap::PerLine { stride: nb },
            ncells: na * nb,
            m: inst.m(),
            entry_bound: inst.max_entry(),
            size_hint: inst.max_dim(),
            counter,
            shared: None,
        },
        cfg,
    )?;
    let mut mask = inst.empty_mask();
    for i in 0..na {
        for k in 0..nb {
            mask.set(i, k, out.accepted(i * nb + k));
        }
    }
    Ok(VerificationResult { mask, detail: out })
}

/// Per `(i, k)`: walks the common refinement of the constant runs of
/// `B[k]` and `C[i]` and tests one position per refined interval.
pub fn twopointer_direct(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix) -> WitnessMask {
    twopointer_masked(a, b, c, |_, _| false)
}

fn twopointer_masked(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, skip: impl Fn(usize, usize) -> bool) -> WitnessMask {
    let (na, nb, nc) = (a.rows(), a.cols(), b.cols());
    let b_blocks: Vec<Vec<usize>> = (0..nb).map(|k| constant_blocks(b.row(k))).collect();
    let mut mask = WitnessMask::grid(na, nb);
    for i in 0..na {
        let c_blocks = constant_blocks(c.row(i));
        for k in 0..nb {
            if skip(i, k) {
                continue;
            }
            let aik = a.get(i, k);
            let mut hit = false;
            for_each_refined(&b_blocks[k], &c_blocks, nc, |lo, _| {
                hit |= aik + b.get(k, lo) == c.get(i, lo);
            });
            mask.set(i, k, hit);
        }
    }
    mask
}

fn solve_col_pair(
    sh: &ShiftedResidues,
    pair: &PairWindows,
    shared: Option<&ModulusReport>,
    size_hint: usize,
    cfg: &SolverConfig,
) -> Result<PairOutcome> {
    let src = sh.source(pair.s, pair.t);
    let m = sh.shift().m;
    let nb = src.dims().1;
    let entry_bound = {
        let (a, b, c) = sh.pre_shifted();
        [a, b, c].iter().filter_map(|x| x.max_entry()).max().unwrap_or(0)
    };
    match cfg.counting {
        CountingRoute::Monomial => {
            let lines = MatrixLines::with_windows(&src, m, &pair.windows);
            let out = verify(
                Job {
                    lines: &lines,
                    map: CellMap::Line,
                    ncells: pair.windows.len(),
                    m,
                    entry_bound,
                    size_hint,
                    counter: Counter::Monomial,
                    shared,
                },
                cfg,
            )?;
            let accepted = pair
                .windows
                .iter()
                .enumerate()
                .filter(|&(l, _)| out.accepted(l))
                .map(|(_, w)| w.outer * nb + w.inner)
                .collect();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
        CountingRoute::Transform => {
            let set = |f: &dyn Fn(&crate::segments::Window) -> Vec<usize>| {
                let mut v: Vec<usize> = pair.windows.iter().flat_map(f).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let rows = set(&|w| vec![w.outer]);
            let inner = set(&|w| vec![w.inner]);
            let cols = set(&|w| (w.start..=w.end).collect());
            let inst = restricted_instance(&src, m, &rows, &inner, &cols, Variant::Col)?;
            let lines = MatrixLines::full(&inst, m);
            let out = verify(
                Job {
                    lines: &lines,
                    map: CellMap::PerLine { stride: inner.len() },
                    ncells: rows.len() * inner.len(),
                    m,
                    entry_bound,
                    size_hint,
                    counter: Counter::Matrix(&inst),
                    shared,
                },
                cfg,
            )?;
            let w = inner.len();
            let accepted = (0..rows.len() * w)
                .filter(|&c| out.accepted(c))
                .map(|c| rows[c / w] * nb + inner[c % w])
                .collect();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify_col_candidate(
    a: &IntMatrix,
    b: &IntMatrix,
    cand: &IntMatrix,
    resolved: &[bool],
    w: i64,
    m: i64,
    size_hint: usize,
    cfg: &SolverConfig,
    stats: &mut SolveStats,
) -> Result<Vec<usize>> {
    let nc = cand.cols();
    let t = Instant::now();
    let rot = rotate_to_problem2prime(a, b, cand, w)?;
    if !(rot.b.is_row_monotone() && rot.c.is_row_monotone()) {
        return Err(Error::Internal("rotated instance lost row monotonicity".into()));
    }
    let sh = shift_residues(&rot.a, &rot.b, &rot.c, m)?;
    let pairs = sh.pair_windows(|i, j, _| !resolved[i * nc + j]);
    stats.timings.reductions += t.elapsed().as_secs_f64();
    drive_pairs(&pairs, cfg, stats, |p, shared| solve_col_pair(&sh, p, shared, size_hint, cfg))
}

/// `A * B` for column-monotone `B` with entries in `[1, bound]`.
pub fn minplus_monotone_col(a: &IntMatrix, b: &IntMatrix, tag: &MonotoneTag, cfg: &SolverConfig) -> Result<IntMatrix> {
    Ok(minplus_monotone_col_with_stats(a, b, tag, cfg)?.0)
}

pub fn minplus_monotone_col_with_stats(
    a: &IntMatrix,
    b: &IntMatrix,
    tag: &MonotoneTag,
    cfg: &SolverConfig,
) -> Result<(IntMatrix, SolveStats)> {
    cfg.validate()?;
    if tag.axis != Axis::ColumnMonotone {
        return Err(Error::Config(format!(
            "column product needs a column-monotone tag, got {:?}",
            tag.axis
        )));
    }
    check_product_shapes(a, b)?;
    validate_promises(b, tag).into_result()?;
    let t = Instant::now();
    let bound = tag.entry_bound;
    let (an, offsets) = normalize_A(&normalize_nonincreasing(a), bound);
    let levels = halvings(&an, b);
    let (na, nb, nc) = (a.rows(), a.cols(), b.cols());
    let size_hint = na.max(nb).max(nc);
    let m_top = cfg.m.unwrap_or_else(|| choose_M((na, nc, nb), bound, &cfg.balance));
    let engine = resolve_engine(cfg, m_top, (na, nc, nb), bound);
    let mut stats = SolveStats {
        engine: format!("{engine:?}").to_lowercase(),
        ..SolveStats::default()
    };
    stats.timings.reductions += t.elapsed().as_secs_f64();

    let mut prod = IntMatrix::zeros(na, nc);
    for d in (0..levels.len() - 1).rev() {
        let (ad, bd) = &levels[d];
        let ub = bd.max_entry().unwrap_or(0).max(1);
        let m = cfg.m.unwrap_or_else(|| choose_M((na, nc, nb), ub, &cfg.balance));
        let w = [ad.max_entry(), bd.max_entry(), prod.max_entry().map(|x| 2 * x + 2)]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0);
        stats.levels += 1;
        stats.moduli.push(m);
        prod = resolve_candidates(&prod, d, |cand, resolved| match engine {
            Engine::Direct => {
                let rot = rotate_to_problem2prime(ad, bd, cand, w)?;
                let mask = twopointer_masked(&rot.a, &rot.b, &rot.c, |i, j| resolved[i * nc + j]);
                Ok((0..na * nc).filter(|&c| mask.get(c / nc, c % nc)).collect())
            }
            _ => verify_col_candidate(ad, bd, cand, resolved, w, m, size_hint, cfg, &mut stats),
        })?;
    }
    let out = readd_offsets(&prod, &offsets)?;
    Ok((out, stats))
}
