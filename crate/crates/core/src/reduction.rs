//! Reductions from the general problems to promised verification instances:
//! row normalization, the choice of `M`, and residue shifting into `100^2`
//! instances whose residues are all at most `M / 10`.

use crate::config::{check_promise_modulus, BalanceConfig};
use crate::error::{Error, Result};
use crate::instance::{ConvVerificationInstance, Variant, VerificationInstance, MAX_INSTANCE_ENTRY};
use crate::matrix::{IntArray, IntMatrix};
use crate::segments::{diagonal_range, ConvSource, TripleSource, Window};

/// Residue intervals per modulus; `W = M / CLASSES`.
pub const CLASSES: usize = 100;

/// Subtracts each row minimum and caps entries above `2 * bound` at
/// `2 * bound + 1`. Returns the normalized matrix and the row offsets.
#[allow(non_snake_case)]
pub fn normalize_A(a: &IntMatrix, bound: i64) -> (IntMatrix, Vec<i64>) {
    let cap = 2 * bound.max(0) + 1;
    let mut out = a.clone();
    let mut offsets = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let row = out.row_mut(i);
        let d = row.iter().copied().min().unwrap_or(0);
        for x in row.iter_mut() {
            *x = (*x - d).min(cap);
        }
        offsets.push(d);
    }
    (out, offsets)
}

fn nearest_hundred(x: f64, cfg: &BalanceConfig) -> i64 {
    let m = if x.is_finite() {
        ((x / 100.0).round() as i64).saturating_mul(100)
    } else {
        cfg.m_max
    };
    m.clamp(cfg.m_min, cfg.m_max)
}

/// Balances `M * (dims)^{omega/3}` against `rows * inner * bound / M`.
#[allow(non_snake_case)]
pub fn choose_M(dims: (usize, usize, usize), entry_bound: i64, cfg: &BalanceConfig) -> i64 {
    let (na, nb, nc) = (dims.0.max(1) as f64, dims.1.max(1) as f64, dims.2.max(1) as f64);
    let work = na * nb * entry_bound.max(1) as f64;
    let mult = (na * nb * nc).powf(cfg.omega / 3.0);
    nearest_hundred((work / mult).sqrt(), cfg)
}

/// Convolution balance `M * n = n * bound / M`, i.e. `M ~ sqrt(bound)`.
#[allow(non_snake_case)]
pub fn choose_M_conv(entry_bound: i64, cfg: &BalanceConfig) -> i64 {
    nearest_hundred((entry_bound.max(1) as f64).sqrt(), cfg)
}

/// The three case formulas of residue shifting for one modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueShift {
    pub m: i64,
    pub w: i64,
}

impl ResidueShift {
    pub fn new(m: i64) -> Result<Self> {
        check_promise_modulus(m)?;
        Ok(Self {
            m,
            w: m / CLASSES as i64,
        })
    }

    /// Index `s` of the interval `[sW, (s+1)W)` holding `x mod M`.
    #[inline]
    pub fn class(&self, x: i64) -> usize {
        (x.rem_euclid(self.m) / self.w) as usize
    }

    /// `A^(s)` / `B^(t)` entry.
    #[inline]
    pub fn shift_ab(&self, x: i64, s: usize) -> i64 {
        let y = x - s as i64 * self.w;
        if self.class(x) == s {
            y
        } else {
            y.div_euclid(self.m) * self.m + 3 * self.w
        }
    }

    /// `C mod M` lies in `J_{s,t}`.
    #[inline]
    pub fn c_in_window(&self, x: i64, s: usize, t: usize) -> bool {
        (x - (s + t) as i64 * self.w).rem_euclid(self.m) < 2 * self.w
    }

    /// `C^(s,t)` entry.
    #[inline]
    pub fn shift_c(&self, x: i64, s: usize, t: usize) -> i64 {
        let y = x - (s + t) as i64 * self.w;
        if y.rem_euclid(self.m) < 2 * self.w {
            y
        } else {
            y.div_euclid(self.m) * self.m + 7 * self.w
        }
    }
}

fn check_range(x: Option<i64>) -> Result<()> {
    match x {
        Some(v) if v > MAX_INSTANCE_ENTRY => Err(Error::Overflow("shifting residues")),
        _ => Ok(()),
    }
}

/// Pre-shifted matrices `A + M`, `B + M`, `C + 2M`; the `(s, t)` instances
/// are derived from them on demand.
#[derive(Clone, Debug)]
pub struct ShiftedResidues {
    a: IntMatrix,
    b: IntMatrix,
    c: IntMatrix,
    shift: ResidueShift,
}

/// Windows of one `(s, t)` instance that can hold a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWindows {
    pub s: usize,
    pub t: usize,
    pub windows: Vec<Window>,
}

fn group_pairs(mut tagged: Vec<(u32, Window)>) -> Vec<PairWindows> {
    tagged.sort_by_key(|&(id, _)| id);
    let mut out: Vec<PairWindows> = Vec::new();
    for (id, w) in tagged {
        let (s, t) = (id as usize / CLASSES, id as usize % CLASSES);
        match out.last_mut() {
            Some(p) if p.s == s && p.t == t => p.windows.push(w),
            _ => out.push(PairWindows { s, t, windows: vec![w] }),
        }
    }
    out
}

/// Pre-shifts `A`, `B`, `C` so every entry is at least `M`.
pub fn shift_residues(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, m: i64) -> Result<ShiftedResidues> {
    let shift = ResidueShift::new(m)?;
    if a.cols() != b.rows() || a.rows() != c.rows() || b.cols() != c.cols() {
        return Err(Error::DimensionMismatch("residue shifting needs a product-shaped triple".into()));
    }
    let (a, b, c) = (a.map(|x| x + m), b.map(|x| x + m), c.map(|x| x + 2 * m));
    for x in [&a, &b, &c] {
        if x.min_entry().is_some_and(|v| v < m) {
            return Err(Error::PromiseViolation {
                coord: vec![],
                reason: "residue shifting needs nonnegative entries".into(),
            });
        }
        check_range(x.max_entry())?;
    }
    Ok(ShiftedResidues { a, b, c, shift })
}

impl ShiftedResidues {
    pub fn shift(&self) -> ResidueShift {
        self.shift
    }

    pub fn pre_shifted(&self) -> (&IntMatrix, &IntMatrix, &IntMatrix) {
        (&self.a, &self.b, &self.c)
    }

    pub fn source(&self, s: usize, t: usize) -> PairSource<'_> {
        PairSource { base: self, s, t }
    }

    /// Materializes `(A^(s), B^(t), C^(s,t))`.
    pub fn instance(&self, s: usize, t: usize, variant: Variant) -> Result<VerificationInstance> {
        if s >= CLASSES || t >= CLASSES {
            return Err(Error::OutOfRange {
                index: s.max(t),
                limit: CLASSES,
            });
        }
        let src = self.source(s, t);
        let (na, nb, nc) = src.dims();
        VerificationInstance::new(
            IntMatrix::from_fn(na, nb, |i, k| src.a(i, k)),
            IntMatrix::from_fn(nb, nc, |k, j| src.b(k, j)),
            IntMatrix::from_fn(na, nc, |i, j| src.c(i, j)),
            self.shift.m,
            variant,
        )
    }

    /// All `100^2` instances in `(s, t)` order.
    pub fn instances(&self, variant: Variant) -> impl Iterator<Item = Result<((usize, usize), VerificationInstance)>> + '_ {
        (0..CLASSES * CLASSES).map(move |id| {
            let (s, t) = (id / CLASSES, id % CLASSES);
            self.instance(s, t, variant).map(|x| ((s, t), x))
        })
    }

    /// For every `(s, t)`, the maximal runs of columns `j` per line `(i, k)`
    /// where `A[i][k]` is in class `s`, `B[k][j]` in class `t` and
    /// `C[i][j]` in `J_{s,t}`. Only these positions can carry a witness of
    /// the `(s, t)` instance. Positions rejected by `keep` are dropped.
    pub fn pair_windows(&self, keep: impl Fn(usize, usize, usize) -> bool) -> Vec<PairWindows> {
        let sh = self.shift;
        let (na, nb, nc) = (self.a.rows(), self.a.cols(), self.b.cols());
        let b_class: Vec<usize> = self.b.as_slice().iter().map(|&x| sh.class(x)).collect();
        let mut tagged = Vec::new();
        for i in 0..na {
            for k in 0..nb {
                let s = sh.class(self.a.get(i, k));
                let mut run: Option<(usize, usize)> = None;
                for j in 0..=nc {
                    let hit = (j < nc).then(|| {
                        let t = b_class[k * nc + j];
                        (sh.c_in_window(self.c.get(i, j), s, t) && keep(i, k, j)).then_some(t)
                    });
                    let cur = hit.flatten();
                    if let Some((t, start)) = run {
                        if cur != Some(t) {
                            tagged.push((
                                (s * CLASSES + t) as u32,
                                Window {
                                    outer: i,
                                    inner: k,
                                    start,
                                    end: j - 1,
                                },
                            ));
                            run = None;
                        }
                    }
                    if run.is_none() {
                        run = cur.map(|t| (t, j));
                    }
                }
            }
        }
        group_pairs(tagged)
    }
}

/// Entries of one `(s, t)` instance, computed from the pre-shifted matrices.
#[derive(Clone, Copy)]
pub struct PairSource<'a> {
    base: &'a ShiftedResidues,
    s: usize,
    t: usize,
}

impl TripleSource for PairSource<'_> {
    #[inline]
    fn dims(&self) -> (usize, usize, usize) {
        (self.base.a.rows(), self.base.a.cols(), self.base.b.cols())
    }
    #[inline]
    fn a(&self, i: usize, k: usize) -> i64 {
        self.base.shift.shift_ab(self.base.a.get(i, k), self.s)
    }
    #[inline]
    fn b(&self, k: usize, j: usize) -> i64 {
        self.base.shift.shift_ab(self.base.b.get(k, j), self.t)
    }
    #[inline]
    fn c(&self, i: usize, j: usize) -> i64 {
        self.base.shift.shift_c(self.base.c.get(i, j), self.s, self.t)
    }
}

/// Array analogue of [`ShiftedResidues`].
#[derive(Clone, Debug)]
pub struct ConvShiftedResidues {
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
    shift: ResidueShift,
}

/// Pre-shifts `A`, `B` by `M` and `C` (length `2n - 1`) by `2M`.
pub fn shift_residues_conv(a: &IntArray, b: &IntArray, c: &IntArray, m: i64) -> Result<ConvShiftedResidues> {
    let shift = ResidueShift::new(m)?;
    let n = a.len();
    if n == 0 || b.len() != n || c.len() != 2 * n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "lengths {}, {}, {}",
            a.len(),
            b.len(),
            c.len()
        )));
    }
    let lift = |xs: &IntArray, by: i64| -> Result<Vec<i64>> {
        let v: Vec<i64> = xs.as_slice().iter().map(|&x| x + by).collect();
        if v.iter().any(|&x| x < by) {
            return Err(Error::PromiseViolation {
                coord: vec![],
                reason: "residue shifting needs nonnegative entries".into(),
            });
        }
        check_range(v.iter().copied().max())?;
        Ok(v)
    };
    Ok(ConvShiftedResidues {
        a: lift(a, m)?,
        b: lift(b, m)?,
        c: lift(c, 2 * m)?,
        shift,
    })
}

impl ConvShiftedResidues {
    pub fn shift(&self) -> ResidueShift {
        self.shift
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn source(&self, s: usize, t: usize) -> ConvPairSource<'_> {
        ConvPairSource { base: self, s, t }
    }

    pub fn instance(&self, s: usize, t: usize) -> Result<ConvVerificationInstance> {
        if s >= CLASSES || t >= CLASSES {
            return Err(Error::OutOfRange {
                index: s.max(t),
                limit: CLASSES,
            });
        }
        let src = self.source(s, t);
        let n = self.a.len();
        ConvVerificationInstance::new(
            IntArray::new((0..n).map(|i| src.a(i)).collect()),
            IntArray::new((0..n).map(|j| src.b(j)).collect()),
            IntArray::with_origin(2, (0..2 * n - 1).map(|k| src.c(k)).collect()),
            self.shift.m,
        )
    }

    /// Maximal runs of `i` per diagonal `k` where `A_i` is in class `s`,
    /// `B_{k-i}` in class `t` and `C_k` in `J_{s,t}`.
    pub fn pair_windows(&self, keep: impl Fn(usize) -> bool) -> Vec<PairWindows> {
        let sh = self.shift;
        let n = self.a.len();
        let a_class: Vec<usize> = self.a.iter().map(|&x| sh.class(x)).collect();
        let b_class: Vec<usize> = self.b.iter().map(|&x| sh.class(x)).collect();
        let mut tagged = Vec::new();
        for k in 0..2 * n - 1 {
            if !keep(k) {
                continue;
            }
            let ck = self.c[k];
            let (lo, hi) = diagonal_range(n, k);
            let mut run: Option<(usize, usize, usize)> = None;
            for i in lo..=hi + 1 {
                let cur = (i <= hi)
                    .then(|| {
                        let (s, t) = (a_class[i], b_class[k - i]);
                        sh.c_in_window(ck, s, t).then_some((s, t))
                    })
                    .flatten();
                if let Some((s, t, start)) = run {
                    if cur != Some((s, t)) {
                        tagged.push((
                            (s * CLASSES + t) as u32,
                            Window {
                                outer: k,
                                inner: 0,
                                start,
                                end: i - 1,
                            },
                        ));
                        run = None;
                    }
                }
                if run.is_none() {
                    run = cur.map(|(s, t)| (s, t, i));
                }
            }
        }
        group_pairs(tagged)
    }
}

#[derive(Clone, Copy)]
pub struct ConvPairSource<'a> {
    base: &'a ConvShiftedResidues,
    s: usize,
    t: usize,
}

impl ConvSource for ConvPairSource<'_> {
    #[inline]
    fn n(&self) -> usize {
        self.base.a.len()
    }
    #[inline]
    fn a(&self, i: usize) -> i64 {
        self.base.shift.shift_ab(self.base.a[i], self.s)
    }
    #[inline]
    fn b(&self, j: usize) -> i64 {
        self.base.shift.shift_ab(self.base.b[j], self.t)
    }
    #[inline]
    fn c(&self, k: usize) -> i64 {
        self.base.shift.shift_c(self.base.c[k], self.s, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let a = IntMatrix::from_rows(&[[5, 7]]).unwrap();
        let (n, d) = normalize_A(&a, 10);
        assert_eq!(n.row(0), &[0, 2]);
        assert_eq!(d, vec![5]);
        let a = IntMatrix::from_rows(&[[0, 1_000_000]]).unwrap();
        assert_eq!(normalize_A(&a, 4).0.row(0), &[0, 9]);
    }

    #[test]
    fn balanced_modulus() {
        let cfg = BalanceConfig::default();
        assert_eq!(choose_M((64, 64, 64), 64, &cfg), 100);
        assert_eq!(choose_M((5, 5, 5), 1, &cfg), 100);
        let fast = BalanceConfig {
            omega: 2.372,
            ..cfg
        };
        let n = 1usize << 20;
        let expect = ((n as f64).powf((3.0 - 2.372) / 2.0) / 100.0).round() as i64 * 100;
        assert_eq!(choose_M((n, n, n), n as i64, &fast), expect.clamp(100, cfg.m_max));
        assert_eq!(choose_M_conv(1, &cfg), 100);
        assert_eq!(choose_M_conv(1_000_000, &cfg), 1000);
    }

    #[test]
    fn shift_formulas() {
        let sh = ResidueShift::new(100).unwrap();
        assert_eq!(sh.shift_ab(157, 57), 100);
        assert_eq!(sh.shift_ab(157, 3), 103);
        assert_eq!(sh.shift_c(260, 30, 30), 200);
        assert_eq!(sh.shift_c(261, 30, 30), 201);
        assert_eq!(sh.shift_c(262, 30, 30), 207);
        assert!(sh.c_in_window(261, 30, 30));
        assert!(!sh.c_in_window(262, 30, 30));
        // The window wraps around M.
        assert!(sh.c_in_window(299, 60, 39));
        assert!(sh.c_in_window(300, 60, 39));
    }

    #[test]
    fn windows_cover_exact_witnesses() {
        let a = IntMatrix::from_rows(&[[0, 3], [7, 1]]).unwrap();
        let b = IntMatrix::from_rows(&[[1, 2, 4], [1, 1, 9]]).unwrap();
        let c = crate::naive::minplus_product_naive(&a, &b).unwrap();
        let sh = shift_residues(&a, &b, &c, 100).unwrap();
        let pairs = sh.pair_windows(|_, _, _| true);
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..3 {
                    if a.get(i, k) + b.get(k, j) == c.get(i, j) {
                        let hit = pairs.iter().any(|p| {
                            p.windows.iter().any(|w| w.outer == i && w.inner == k && (w.start..=w.end).contains(&j))
                        });
                        assert!(hit, "witness ({i},{k},{j}) not covered");
                    }
                }
            }
        }
    }
}
