//! Level-`l` segments, active-segment refinement and spurious-match
//! aggregation.
//!
//! Everything here runs on a set of *lines*. A line is one `(i, k)` pair of
//! a matrix instance (positions are columns `j`) or one diagonal `k` of a
//! convolution instance (positions are `i`). Each position carries two keys
//! that must both be constant after flooring by `2^l` inside a segment, and a
//! difference `A + B - C`.

use std::borrow::Cow;

use crate::config::check_promise_modulus;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Intervals shorter than this are scanned linearly instead of bisected.
pub const LINEAR_SCAN_LIMIT: usize = 64;

/// Inclusive position range of one line. `outer`/`inner` are `(i, k)` for
/// matrix lines and `(k, 0)` for convolution diagonals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub outer: usize,
    pub inner: usize,
    pub start: usize,
    pub end: usize,
}

/// Position data of a family of lines.
pub trait Lines: Sync {
    fn line_count(&self) -> usize;
    fn window(&self, l: usize) -> Window;
    /// The two sequences whose floors delimit segments. Both are monotone
    /// along the line.
    fn keys(&self, l: usize, p: usize) -> (i64, i64);
    /// `A + B - C` at position `p`.
    fn delta(&self, l: usize, p: usize) -> i64;
    /// Whether the high parts (`floor(x / M)`) fail to add up at `p`.
    fn high_mismatch(&self, l: usize, p: usize) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    /// Row `i` (matrix) or output index `k` (convolution).
    pub outer: usize,
    /// Inner index `k` (matrix); 0 for convolution.
    pub inner: usize,
    pub line: usize,
    pub start: usize,
    pub end: usize,
    pub level: u32,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSet {
    pub level: u32,
    pub q: u64,
    pub segments: Vec<Segment>,
}

impl ActiveSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelParams {
    pub m: i64,
    pub lmax: u32,
}

impl LevelParams {
    pub fn new(m: i64) -> Result<Self> {
        Ok(Self {
            m,
            lmax: levelmax_for(m)?,
        })
    }
}

/// The unique `l` with `M/20 <= 2^l < M/10`.
pub fn levelmax_for(m: i64) -> Result<u32> {
    check_promise_modulus(m)?;
    let mut l = 0u32;
    while 10 * (1i64 << l) < m {
        if 20 * (1i64 << l) >= m {
            return Ok(l);
        }
        l += 1;
    }
    Err(Error::Internal(format!("no top level for M = {m}")))
}

/// Half-width `4 * 2^l` of the admissible shift window.
#[inline]
pub fn shift_window(level: u32) -> i64 {
    4i64 << level
}

/// `delta mod q` lies within `shift_window(level)` of zero.
#[inline]
pub fn in_residue_window(delta: i64, q: u64, level: u32) -> bool {
    let q = q as i64;
    let r = delta.rem_euclid(q);
    let w = shift_window(level);
    r <= w || r >= q - w
}

#[inline]
fn floors<L: Lines + ?Sized>(lines: &L, l: usize, p: usize, level: u32) -> (i64, i64) {
    let (x, y) = lines.keys(l, p);
    (x >> level, y >> level)
}

/// Last position in `[from, hi]` whose floored keys equal those at `from`.
pub fn block_end<L: Lines + ?Sized>(lines: &L, l: usize, from: usize, hi: usize, level: u32) -> usize {
    let key = floors(lines, l, from, level);
    if hi - from < LINEAR_SCAN_LIMIT {
        let mut p = from;
        while p < hi && floors(lines, l, p + 1, level) == key {
            p += 1;
        }
        return p;
    }
    if floors(lines, l, hi, level) == key {
        return hi;
    }
    let (mut lo, mut bad) = (from, hi);
    while bad - lo > 1 {
        let mid = lo + (bad - lo) / 2;
        if floors(lines, l, mid, level) == key {
            lo = mid;
        } else {
            bad = mid;
        }
    }
    lo
}

/// Appends the level-`level` segments of line `l` restricted to `[lo, hi]`.
pub fn segments_within<L: Lines + ?Sized>(
    lines: &L,
    l: usize,
    lo: usize,
    hi: usize,
    level: u32,
    out: &mut Vec<Segment>,
) {
    let w = lines.window(l);
    let mut p = lo;
    loop {
        let e = block_end(lines, l, p, hi, level);
        out.push(Segment {
            outer: w.outer,
            inner: w.inner,
            line: l,
            start: p,
            end: e,
            level,
        });
        if e == hi {
            break;
        }
        p = e + 1;
    }
}

/// All level-`level` segments of every line, in line order.
pub fn top_segments<L: Lines + ?Sized>(lines: &L, level: u32) -> Vec<Segment> {
    let mut out = Vec::new();
    for l in 0..lines.line_count() {
        let w = lines.window(l);
        segments_within(lines, l, w.start, w.end, level, &mut out);
    }
    out
}

/// High parts disagree at the segment start and the difference there is
/// congruent to an admissible shift.
#[inline]
pub fn is_active<L: Lines + ?Sized>(lines: &L, seg: &Segment, q: u64) -> bool {
    lines.high_mismatch(seg.line, seg.start)
        && in_residue_window(lines.delta(seg.line, seg.start), q, seg.level)
}

pub fn active_top<L: Lines + ?Sized>(lines: &L, lmax: u32, q: u64) -> ActiveSet {
    let mut segments = Vec::new();
    let mut buf = Vec::new();
    for l in 0..lines.line_count() {
        let w = lines.window(l);
        buf.clear();
        segments_within(lines, l, w.start, w.end, lmax, &mut buf);
        segments.extend(buf.iter().filter(|s| is_active(lines, s, q)));
    }
    ActiveSet {
        level: lmax,
        q,
        segments,
    }
}

/// Splits every member into its level `l - 1` subsegments and keeps the
/// active ones.
pub fn refine_active<L: Lines + ?Sized>(set: &ActiveSet, lines: &L) -> Result<ActiveSet> {
    if set.level == 0 {
        return Err(Error::Internal("cannot refine below level 0".into()));
    }
    let level = set.level - 1;
    let mut segments = Vec::with_capacity(set.segments.len());
    let mut buf = Vec::new();
    for parent in &set.segments {
        buf.clear();
        segments_within(lines, parent.line, parent.start, parent.end, level, &mut buf);
        segments.extend(buf.iter().filter(|s| is_active(lines, s, set.q)));
    }
    Ok(ActiveSet {
        level,
        q: set.q,
        segments,
    })
}

/// Active sets for every level, index `l` holding `S_l(Q)`.
pub fn active_hierarchy<L: Lines + ?Sized>(lines: &L, lmax: u32, q: u64) -> Result<Vec<ActiveSet>> {
    let mut sets = vec![active_top(lines, lmax, q)];
    while sets.last().map_or(0, |s| s.level) > 0 {
        let next = refine_active(sets.last().expect("nonempty"), lines)?;
        sets.push(next);
    }
    sets.reverse();
    Ok(sets)
}

/// Where the count for a position lands in the output buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellMap {
    /// Cell `outer * stride + position`, one per output `(i, j)`.
    Along { stride: usize },
    /// Cell `outer * stride + inner`, one per line `(i, k)`.
    PerLine { stride: usize },
    /// Cell `outer`, one per diagonal.
    Outer,
    /// One cell per line.
    Line,
}

impl CellMap {
    #[inline]
    pub fn cell(&self, l: usize, w: &Window, p: usize) -> usize {
        match *self {
            CellMap::Line => l,
            CellMap::Along { stride } => w.outer * stride + p,
            CellMap::PerLine { stride } => w.outer * stride + w.inner,
            CellMap::Outer => w.outer,
        }
    }
}

/// Counts of congruent-but-unequal positions: every level-0 active segment
/// whose constant difference is `0 mod Q` contributes once per position.
pub fn aggregate_spurious<L: Lines + ?Sized>(s0: &ActiveSet, lines: &L, map: CellMap, ncells: usize) -> Vec<u64> {
    let q = s0.q as i64;
    let passing = s0
        .segments
        .iter()
        .filter(|seg| lines.delta(seg.line, seg.start).rem_euclid(q) == 0);
    match map {
        CellMap::Along { .. } => {
            let mut diff = vec![0i64; ncells + 1];
            for seg in passing {
                let w = lines.window(seg.line);
                diff[map.cell(seg.line, &w, seg.start)] += 1;
                diff[map.cell(seg.line, &w, seg.end) + 1] -= 1;
            }
            let mut run = 0i64;
            diff[..ncells]
                .iter()
                .map(|d| {
                    run += d;
                    run as u64
                })
                .collect()
        }
        CellMap::PerLine { .. } | CellMap::Outer | CellMap::Line => {
            let mut out = vec![0u64; ncells];
            for seg in passing {
                let w = lines.window(seg.line);
                out[map.cell(seg.line, &w, seg.start)] += seg.len() as u64;
            }
            out
        }
    }
}

/// Source of matrix triple entries.
pub trait TripleSource: Sync {
    /// `(rows of A, cols of A = rows of B, cols of B)`.
    fn dims(&self) -> (usize, usize, usize);
    fn a(&self, i: usize, k: usize) -> i64;
    fn b(&self, k: usize, j: usize) -> i64;
    fn c(&self, i: usize, j: usize) -> i64;
}

/// Lines `(i, k)` of a matrix triple, each ranging over columns `j`.
pub struct MatrixLines<'a, S: ?Sized> {
    src: &'a S,
    m: i64,
    windows: Cow<'a, [Window]>,
}

impl<'a, S: TripleSource + ?Sized> MatrixLines<'a, S> {
    /// Every `(i, k)` over the full column range.
    pub fn full(src: &'a S, m: i64) -> Self {
        let (na, nb, nc) = src.dims();
        let mut windows = Vec::with_capacity(na * nb);
        if nc > 0 {
            for i in 0..na {
                for k in 0..nb {
                    windows.push(Window {
                        outer: i,
                        inner: k,
                        start: 0,
                        end: nc - 1,
                    });
                }
            }
        }
        Self {
            src,
            m,
            windows: Cow::Owned(windows),
        }
    }

    pub fn with_windows(src: &'a S, m: i64, windows: &'a [Window]) -> Self {
        Self {
            src,
            m,
            windows: Cow::Borrowed(windows),
        }
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }
}

impl<S: TripleSource + ?Sized> Lines for MatrixLines<'_, S> {
    #[inline]
    fn line_count(&self) -> usize {
        self.windows.len()
    }

    #[inline]
    fn window(&self, l: usize) -> Window {
        self.windows[l]
    }

    #[inline]
    fn keys(&self, l: usize, p: usize) -> (i64, i64) {
        let w = &self.windows[l];
        (self.src.b(w.inner, p), self.src.c(w.outer, p))
    }

    #[inline]
    fn delta(&self, l: usize, p: usize) -> i64 {
        let w = &self.windows[l];
        self.src.a(w.outer, w.inner) + self.src.b(w.inner, p) - self.src.c(w.outer, p)
    }

    #[inline]
    fn high_mismatch(&self, l: usize, p: usize) -> bool {
        let w = &self.windows[l];
        let m = self.m;
        self.src.a(w.outer, w.inner).div_euclid(m) + self.src.b(w.inner, p).div_euclid(m)
            != self.src.c(w.outer, p).div_euclid(m)
    }
}

/// Source of convolution triple entries (0-based; `c` indexed by `i + j`).
pub trait ConvSource: Sync {
    fn n(&self) -> usize;
    fn a(&self, i: usize) -> i64;
    fn b(&self, j: usize) -> i64;
    fn c(&self, k: usize) -> i64;
}

/// Diagonals `k` of a convolution triple, each ranging over `i`.
pub struct ConvLines<'a, S: ?Sized> {
    src: &'a S,
    m: i64,
    windows: Cow<'a, [Window]>,
}

/// Valid `i` range `[max(0, k - n + 1), min(n - 1, k)]` of diagonal `k`.
pub fn diagonal_range(n: usize, k: usize) -> (usize, usize) {
    ((k + 1).saturating_sub(n), k.min(n - 1))
}

impl<'a, S: ConvSource + ?Sized> ConvLines<'a, S> {
    pub fn full(src: &'a S, m: i64) -> Self {
        Self::diagonals(src, m, |_| true)
    }

    /// Full diagonals for the selected output indices.
    pub fn diagonals(src: &'a S, m: i64, keep: impl Fn(usize) -> bool) -> Self {
        let n = src.n();
        let windows = (0..(2 * n).saturating_sub(1))
            .filter(|&k| keep(k))
            .map(|k| {
                let (start, end) = diagonal_range(n, k);
                Window {
                    outer: k,
                    inner: 0,
                    start,
                    end,
                }
            })
            .collect();
        Self {
            src,
            m,
            windows: Cow::Owned(windows),
        }
    }

    pub fn with_windows(src: &'a S, m: i64, windows: &'a [Window]) -> Self {
        Self {
            src,
            m,
            windows: Cow::Borrowed(windows),
        }
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }
}

impl<S: ConvSource + ?Sized> Lines for ConvLines<'_, S> {
    #[inline]
    fn line_count(&self) -> usize {
        self.windows.len()
    }

    #[inline]
    fn window(&self, l: usize) -> Window {
        self.windows[l]
    }

    #[inline]
    fn keys(&self, l: usize, p: usize) -> (i64, i64) {
        let k = self.windows[l].outer;
        (self.src.a(p), self.src.b(k - p))
    }

    #[inline]
    fn delta(&self, l: usize, p: usize) -> i64 {
        let k = self.windows[l].outer;
        self.src.a(p) + self.src.b(k - p) - self.src.c(k)
    }

    #[inline]
    fn high_mismatch(&self, l: usize, p: usize) -> bool {
        let k = self.windows[l].outer;
        let m = self.m;
        self.src.a(p).div_euclid(m) + self.src.b(k - p).div_euclid(m) != self.src.c(k).div_euclid(m)
    }
}

impl TripleSource for (IntMatrix, IntMatrix, IntMatrix) {
    fn dims(&self) -> (usize, usize, usize) {
        (self.0.rows(), self.0.cols(), self.1.cols())
    }
    fn a(&self, i: usize, k: usize) -> i64 {
        self.0.get(i, k)
    }
    fn b(&self, k: usize, j: usize) -> i64 {
        self.1.get(k, j)
    }
    fn c(&self, i: usize, j: usize) -> i64 {
        self.2.get(i, j)
    }
}
