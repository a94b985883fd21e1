//! Monotone Min-Plus convolution.
//!
//! Same candidate scheme as the products, on arrays: halve, lift the half
//! answer to `2C' + s`, verify. Lines are the diagonals `k = i + j`.

use std::time::Instant;

use crate::config::{CountingRoute, Engine, SolverConfig};
use crate::error::{Error, Result};
use crate::instance::ConvVerificationInstance;
use crate::matrix::{validate_promises, Axis, IntArray, MonotoneTag, WitnessMask};
use crate::modulus::ModulusReport;
use crate::product_row::constant_blocks;
use crate::reduction::{choose_M_conv, ConvShiftedResidues, PairWindows};
use crate::segments::{diagonal_range, CellMap, ConvLines};
use crate::verify::{drive_pairs, verify, Counter, Job, PairOutcome, SolveStats, VerificationResult};

pub use crate::reduction::shift_residues_conv;

/// `s_k = #{i : A_i + B_{k-i} = C_k (mod q)}`, indexed from 2 like `C`.
pub fn compute_s_array(inst: &ConvVerificationInstance, q: u64, cfg: &SolverConfig) -> Result<IntArray> {
    if q == 0 {
        return Err(Error::Config("modulus must be positive".into()));
    }
    cfg.field.ensure_counts(inst.len() as u64)?;
    let s = match cfg.counting {
        CountingRoute::Monomial => {
            let n = inst.len();
            crate::counting::count_congruent(&ConvLines::full(inst, inst.m()), q, CellMap::Outer, 2 * n - 1)
        }
        CountingRoute::Transform => crate::counting::congruent_conv_transform(inst, q, &cfg.field)?,
    };
    Ok(IntArray::with_origin(2, s.into_iter().map(|x| x as i64).collect()))
}

/// Decides per `k` whether some `i` has `A_i + B_{k-i} = C_k`.
pub fn solve_verification_conv(inst: &ConvVerificationInstance, cfg: &SolverConfig) -> Result<WitnessMask> {
    Ok(solve_verification_conv_detailed(inst, cfg)?.mask)
}

pub fn solve_verification_conv_detailed(inst: &ConvVerificationInstance, cfg: &SolverConfig) -> Result<VerificationResult> {
    cfg.validate()?;
    let n = inst.len();
    let all = vec![true; 2 * n - 1];
    let lines = ConvLines::full(inst, inst.m());
    let counter = match cfg.counting {
        CountingRoute::Monomial => Counter::Monomial,
        CountingRoute::Transform => Counter::Conv(inst, &all),
    };
    let out = verify(
        Job {
            lines: &lines,
            map: CellMap::Outer,
            ncells: 2 * n - 1,
            m: inst.m(),
            entry_bound: inst.max_entry(),
            size_hint: n,
            counter,
            shared: None,
        },
        cfg,
    )?;
    let mut mask = WitnessMask::range(2, 2 * n - 1);
    for k in 0..2 * n - 1 {
        mask.set_bit(k, out.accepted(k));
    }
    Ok(VerificationResult { mask, detail: out })
}

/// Per diagonal, tests one `i` per interval on which both `A_i` and
/// `B_{k-i}` are constant. Returns 0-based accepted diagonals.
pub fn direct_conv_mask(a: &[i64], b: &[i64], c: &[i64], skip: impl Fn(usize) -> bool) -> Vec<usize> {
    let n = a.len();
    let mut a_end = vec![0; n];
    for i in (0..n).rev() {
        a_end[i] = if i + 1 < n && a[i + 1] == a[i] { a_end[i + 1] } else { i };
    }
    let b_starts = constant_blocks(b);
    let mut b_start = vec![0; n];
    for w in 0..b_starts.len() {
        let hi = b_starts.get(w + 1).copied().unwrap_or(n);
        b_start[b_starts[w]..hi].iter_mut().for_each(|x| *x = b_starts[w]);
    }
    let mut out = Vec::new();
    for k in 0..2 * n - 1 {
        if skip(k) {
            continue;
        }
        let (lo, hi) = diagonal_range(n, k);
        let mut i = lo;
        while i <= hi {
            let j = k - i;
            if a[i] + b[j] == c[k] {
                out.push(k);
                break;
            }
            i = a_end[i].min(k - b_start[j]).min(hi) + 1;
        }
    }
    out
}

fn solve_conv_pair(
    sh: &ConvShiftedResidues,
    pair: &PairWindows,
    shared: Option<&ModulusReport>,
    entry_bound: i64,
    cfg: &SolverConfig,
) -> Result<PairOutcome> {
    let m = sh.shift().m;
    let n = sh.len();
    match cfg.counting {
        CountingRoute::Monomial => {
            let src = sh.source(pair.s, pair.t);
            let lines = ConvLines::with_windows(&src, m, &pair.windows);
            let out = verify(
                Job {
                    lines: &lines,
                    map: CellMap::Line,
                    ncells: pair.windows.len(),
                    m,
                    entry_bound,
                    size_hint: n,
                    counter: Counter::Monomial,
                    shared,
                },
                cfg,
            )?;
            let mut accepted: Vec<usize> = pair
                .windows
                .iter()
                .enumerate()
                .filter(|&(l, _)| out.accepted(l))
                .map(|(_, w)| w.outer)
                .collect();
            accepted.dedup();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
        CountingRoute::Transform => {
            let inst = sh.instance(pair.s, pair.t)?;
            let mut queried = vec![false; 2 * n - 1];
            for w in &pair.windows {
                queried[w.outer] = true;
            }
            let lines = ConvLines::diagonals(&inst, m, |k| queried[k]);
            let out = verify(
                Job {
                    lines: &lines,
                    map: CellMap::Outer,
                    ncells: 2 * n - 1,
                    m,
                    entry_bound,
                    size_hint: n,
                    counter: Counter::Conv(&inst, &queried),
                    shared,
                },
                cfg,
            )?;
            let accepted = (0..2 * n - 1).filter(|&k| queried[k] && out.accepted(k)).collect();
            Ok(PairOutcome {
                accepted,
                report: out.report,
                timings: out.timings,
            })
        }
    }
}

fn resolve_conv_engine(cfg: &SolverConfig, m: i64, n: usize, bound: i64) -> Engine {
    match cfg.engine {
        Engine::Auto => {
            let (n, u) = (n.max(1) as f64, bound.max(1) as f64);
            let direct = n * n.min(u);
            let verification = m as f64 * n + n * u / m as f64;
            if direct <= verification {
                Engine::Direct
            } else {
                Engine::Verification
            }
        }
        e => e,
    }
}

/// `(A <> B)_k = min_i A_i + B_{k-i}` for monotone `A`, `B` with entries in
/// `[1, bound]`; the result is indexed `2..=2n`.
pub fn minplus_conv_monotone(a: &IntArray, b: &IntArray, tag: &MonotoneTag, cfg: &SolverConfig) -> Result<IntArray> {
    Ok(minplus_conv_monotone_with_stats(a, b, tag, cfg)?.0)
}

pub fn minplus_conv_monotone_with_stats(
    a: &IntArray,
    b: &IntArray,
    tag: &MonotoneTag,
    cfg: &SolverConfig,
) -> Result<(IntArray, SolveStats)> {
    cfg.validate()?;
    if tag.axis != Axis::ArrayMonotone {
        return Err(Error::Config(format!("convolution needs an array tag, got {:?}", tag.axis)));
    }
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(Error::DimensionMismatch(format!("lengths {} and {}", a.len(), b.len())));
    }
    validate_promises(a, tag).into_result()?;
    validate_promises(b, tag).into_result()?;
    let t = Instant::now();
    let bound = tag.entry_bound;
    let (a0, b0) = (a.as_slice()[0], b.as_slice()[0]);
    let mut levels = vec![(
        a.as_slice().iter().map(|&x| x - a0).collect::<Vec<i64>>(),
        b.as_slice().iter().map(|&x| x - b0).collect::<Vec<i64>>(),
    )];
    while levels.last().is_some_and(|(x, y)| x.iter().chain(y).any(|&v| v != 0)) {
        let (x, y) = levels.last().unwrap();
        let next = (x.iter().map(|v| v >> 1).collect(), y.iter().map(|v| v >> 1).collect());
        levels.push(next);
    }
    let m_top = cfg.m.unwrap_or_else(|| choose_M_conv(bound, &cfg.balance));
    let engine = resolve_conv_engine(cfg, m_top, n, bound);
    let mut stats = SolveStats {
        engine: format!("{engine:?}").to_lowercase(),
        ..SolveStats::default()
    };
    stats.timings.reductions += t.elapsed().as_secs_f64();

    let len = 2 * n - 1;
    let mut prod = vec![0i64; len];
    for d in (0..levels.len() - 1).rev() {
        let (ad, bd) = &levels[d];
        let ub = ad.iter().chain(bd).copied().max().unwrap_or(0).max(1);
        let m = cfg.m.unwrap_or_else(|| choose_M_conv(ub, &cfg.balance));
        stats.levels += 1;
        stats.moduli.push(m);
        let mut next = vec![0i64; len];
        let mut resolved = vec![false; len];
        for s in 0..3 {
            if resolved.iter().all(|&r| r) {
                break;
            }
            let cand: Vec<i64> = prod.iter().map(|&x| 2 * x + s).collect();
            let accepted = match engine {
                Engine::Direct => direct_conv_mask(ad, bd, &cand, |k| resolved[k]),
                _ => {
                    let t = Instant::now();
                    let sh = shift_residues_conv(
                        &IntArray::new(ad.clone()),
                        &IntArray::new(bd.clone()),
                        &IntArray::new(cand.clone()),
                        m,
                    )?;
                    let pairs = sh.pair_windows(|k| !resolved[k]);
                    let entry_bound = 2 * m + cand.iter().copied().max().unwrap_or(0);
                    stats.timings.reductions += t.elapsed().as_secs_f64();
                    drive_pairs(&pairs, cfg, &mut stats, |p, shared| {
                        solve_conv_pair(&sh, p, shared, entry_bound, cfg)
                    })?
                }
            };
            for k in accepted {
                if !resolved[k] {
                    resolved[k] = true;
                    next[k] = cand[k];
                }
            }
        }
        if let Some(k) = resolved.iter().position(|&r| !r) {
            return Err(Error::Internal(format!("no candidate accepted at level {d}, index {}", k + 2)));
        }
        prod = next;
    }
    let out = prod
        .into_iter()
        .map(|x| {
            x.checked_add(a0 + b0)
                .ok_or(Error::Overflow("re-adding array offsets"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((IntArray::with_origin(2, out), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive::minplus_convolution_naive;

    #[test]
    fn s_array_examples() {
        let cfg = SolverConfig::default();
        let inst = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2]),
            IntArray::new(vec![1, 1]),
            IntArray::new(vec![2, 2, 3]),
            100,
        )
        .unwrap();
        assert_eq!(compute_s_array(&inst, 5, &cfg).unwrap().as_slice(), &[1, 1, 1]);
        assert_eq!(compute_s_array(&inst, 1, &cfg).unwrap().as_slice(), &[1, 2, 1]);
        let tr = SolverConfig {
            counting: CountingRoute::Transform,
            ..cfg
        };
        assert_eq!(compute_s_array(&inst, 1, &tr).unwrap().as_slice(), &[1, 2, 1]);
    }

    #[test]
    fn verification_examples() {
        let cfg = SolverConfig::strict();
        let inst = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2]),
            IntArray::new(vec![1, 1]),
            IntArray::new(vec![2, 2, 3]),
            100,
        )
        .unwrap();
        assert!(solve_verification_conv(&inst, &cfg).unwrap().all());
        let low = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2]),
            IntArray::new(vec![1, 1]),
            IntArray::new(vec![0, 0, 0]),
            100,
        )
        .unwrap();
        assert!(solve_verification_conv(&low, &cfg).unwrap().none());
    }

    #[test]
    fn small_convolutions() {
        let tag = MonotoneTag::array(2).unwrap();
        let out = minplus_conv_monotone(&IntArray::new(vec![1, 2]), &IntArray::new(vec![1, 1]), &tag, &SolverConfig::strict())
            .unwrap();
        assert_eq!(out.as_slice(), &[2, 2, 3]);
        assert_eq!(out.origin(), 2);
        let c = IntArray::new(vec![5; 6]);
        let out = minplus_conv_monotone(&c, &c, &MonotoneTag::array(5).unwrap(), &SolverConfig::strict()).unwrap();
        assert!(out.as_slice().iter().all(|&x| x == 10));
    }

    #[test]
    fn engines_agree_with_naive() {
        let a = IntArray::new(vec![1, 1, 3, 4, 4, 9, 12, 12]);
        let b = IntArray::new(vec![2, 2, 2, 5, 7, 7, 8, 12]);
        let tag = MonotoneTag::array(12).unwrap();
        let want = minplus_convolution_naive(&a, &b).unwrap();
        for engine in [Engine::Verification, Engine::Direct, Engine::Auto] {
            for counting in [CountingRoute::Monomial, CountingRoute::Transform] {
                for fast in [false, true] {
                    let cfg = SolverConfig {
                        engine,
                        counting,
                        fast_shared_modulus: fast,
                        ..SolverConfig::strict()
                    };
                    assert_eq!(minplus_conv_monotone(&a, &b, &tag, &cfg).unwrap(), want, "{engine:?} {counting:?}");
                }
            }
        }
    }
}
