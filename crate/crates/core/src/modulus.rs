//! Deterministic construction of a good modulus `Q` as a product of small
//! primes, steered by the computable congruence counts `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{AnyInstance, ConvVerificationInstance, VerificationInstance};
use crate::segments::{shift_window, ConvLines, Lines, MatrixLines};

/// All primes in `[ceil(R/2), R]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePool {
    r: u64,
    primes: Vec<u64>,
}

impl PrimePool {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// Sieves `[ceil(R/2), R]`.
pub fn primes_in_range(r: u64) -> Result<PrimePool> {
    if r < 4 {
        return Err(Error::Config(format!("R = {r} must be at least 4")));
    }
    let n = r as usize;
    let mut composite = vec![false; n + 1];
    composite[0] = true;
    composite[1] = true;
    let mut p = 2;
    while p * p <= n {
        if !composite[p] {
            for x in (p * p..=n).step_by(p) {
                composite[x] = true;
            }
        }
        p += 1;
    }
    let lo = r.div_ceil(2) as usize;
    let primes: Vec<u64> = (lo..=n).filter(|&x| !composite[x]).map(|x| x as u64).collect();
    if primes.is_empty() {
        return Err(Error::Config(format!("no primes in [{lo}, {r}]")));
    }
    Ok(PrimePool { r, primes })
}

/// `max(16, ceil(2^sqrt(log2 n)))`.
pub fn default_r(n: usize) -> u64 {
    let l = (n.max(2) as f64).log2();
    let r = 2f64.powf(l.sqrt()).ceil() as u64;
    r.max(16)
}

/// Pool for the given (or default) `R`, raising `R` until it holds at least
/// two primes.
pub fn pool_for(n: usize, r: Option<u64>) -> Result<PrimePool> {
    let mut r = r.unwrap_or_else(|| default_r(n)).max(4);
    loop {
        let pool = primes_in_range(r)?;
        if pool.primes.len() >= 2 {
            return Ok(pool);
        }
        r += 1;
    }
}

/// `W(r) = #{ s in [-4*2^l, 4*2^l] : s = r (mod Q') }` for `r < Q'`.
#[allow(non_snake_case)]
pub fn compute_W(level: u32, q: u64) -> Vec<u64> {
    assert!(q >= 1, "modulus must be positive");
    let w = shift_window(level);
    let mut table = vec![0u64; q as usize];
    for s in -w..=w {
        table[s.rem_euclid(q as i64) as usize] += 1;
    }
    table
}

/// `Y_{l,t}(p)` for every level `l` and prime `p` of one search step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YTable {
    pub primes: Vec<u64>,
    /// `y[l][idx]` for prime `primes[idx]`.
    pub y: Vec<Vec<u64>>,
}

impl YTable {
    pub fn zeros(primes: &[u64], levels: usize) -> Self {
        Self {
            primes: primes.to_vec(),
            y: vec![vec![0; primes.len()]; levels],
        }
    }

    pub fn levels(&self) -> usize {
        self.y.len()
    }

    /// `Y*_l`, the column minimum over primes.
    pub fn y_star(&self, level: usize) -> u64 {
        self.y[level].iter().copied().min().unwrap_or(0)
    }

    /// `max_l (Y_l(p) - Y*_l)` for the prime at `idx`.
    pub fn phi(&self, idx: usize) -> u64 {
        (0..self.levels())
            .map(|l| self.y[l][idx] - self.y_star(l))
            .max()
            .unwrap_or(0)
    }
}

/// Prime minimizing the objective, smallest prime on ties. Returns
/// `(index, prime)`.
pub fn select_prime(table: &YTable) -> (usize, u64) {
    let mut best = 0;
    for idx in 1..table.primes.len() {
        let (a, b) = (table.phi(idx), table.phi(best));
        if a < b || (a == b && table.primes[idx] < table.primes[best]) {
            best = idx;
        }
    }
    (best, table.primes[best])
}

/// Anything that can produce the `Y` table of a search step.
pub trait YSource {
    fn y_table(&self, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable>;
}

/// `Y` counts accumulated directly over segment start positions.
pub struct LineY {
    /// `(delta, highest level at which the position starts a segment)`.
    starts: Vec<(i64, u32)>,
}

impl LineY {
    pub fn new<L: Lines + ?Sized>(lines: &L, lmax: u32) -> Self {
        let mut starts = Vec::new();
        for l in 0..lines.line_count() {
            let w = lines.window(l);
            starts.push((lines.delta(l, w.start), lmax));
            let mut prev = lines.keys(l, w.start);
            for p in w.start + 1..=w.end {
                let cur = lines.keys(l, p);
                // The floors by 2^l differ iff some bit at position >= l differs.
                let diff = (cur.0 ^ prev.0) | (cur.1 ^ prev.1);
                if diff != 0 {
                    let top = (63 - diff.leading_zeros()).min(lmax);
                    starts.push((lines.delta(l, p), top));
                }
                prev = cur;
            }
        }
        Self { starts }
    }

    pub fn start_count(&self) -> usize {
        self.starts.len()
    }
}

impl YSource for LineY {
    fn y_table(&self, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable> {
        let levels = lmax as usize + 1;
        let mut table = YTable::zeros(&pool.primes, levels);
        for (idx, &p) in pool.primes.iter().enumerate() {
            let q = q_prev
                .checked_mul(p)
                .ok_or(Error::Overflow("growing the modulus"))?;
            let weights: Vec<Vec<u64>> = (0..=lmax).map(|l| compute_W(l, q)).collect();
            let mut acc = vec![0u64; levels];
            for &(delta, top) in &self.starts {
                let r = delta.rem_euclid(q as i64) as usize;
                for l in 0..=top as usize {
                    acc[l] += weights[l][r];
                }
            }
            for l in 0..levels {
                table.y[l][idx] = acc[l];
            }
        }
        Ok(table)
    }
}

/// One step of the prime search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub q_prev: u64,
    pub y: YTable,
    pub y_star: Vec<u64>,
    pub phi: Vec<u64>,
    pub chosen: u64,
}

/// Trace of a modulus search plus the measured active-segment counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub m: i64,
    pub r: u64,
    pub pool: Vec<u64>,
    pub steps: Vec<SearchStep>,
    pub primes: Vec<u64>,
    /// `Q_0 = 1, Q_1, ..., Q_T`.
    pub q_seq: Vec<u64>,
    pub q: u64,
    /// `|S_l(Q)|`, index `l`.
    pub active_counts: Vec<u64>,
    pub slack: f64,
    /// Bound every `|S_l(Q)|` is audited against.
    pub audit_bound: f64,
    pub audit_passed: bool,
    /// `Q` came from a search shared across residue classes.
    pub shared: bool,
}

impl ModulusReport {
    /// `Q_{T-1} < M <= Q_T <= M * R`.
    pub fn first_crossing_holds(&self) -> bool {
        let n = self.q_seq.len();
        n >= 2
            && self.q_seq[n - 2] < self.m as u64
            && self.m as u64 <= self.q
            && self.q <= self.m as u64 * self.r
            && self.q_seq[n - 1] == self.q
    }
}

/// Builds `Q` prime by prime until it first reaches `M`.
pub fn find_good_modulus(src: &dyn YSource, m: i64, pool: &PrimePool, lmax: u32) -> Result<(u64, ModulusReport)> {
    if m <= 0 {
        return Err(Error::InvalidPromiseModulus(m));
    }
    let mut q = 1u64;
    let mut q_seq = vec![1u64];
    let mut steps = Vec::new();
    let mut primes = Vec::new();
    while q < m as u64 {
        let table = src.y_table(q, pool, lmax)?;
        let (idx, p) = select_prime(&table);
        let y_star = (0..table.levels()).map(|l| table.y_star(l)).collect();
        let phi = (0..table.primes.len()).map(|i| table.phi(i)).collect();
        debug_assert_eq!(table.primes[idx], p);
        steps.push(SearchStep {
            q_prev: q,
            y: table,
            y_star,
            phi,
            chosen: p,
        });
        q *= p;
        q_seq.push(q);
        primes.push(p);
    }
    let report = ModulusReport {
        m,
        r: pool.r,
        pool: pool.primes.clone(),
        steps,
        primes,
        q_seq,
        q,
        active_counts: Vec::new(),
        slack: 0.0,
        audit_bound: 0.0,
        audit_passed: true,
        shared: false,
    };
    Ok((q, report))
}

/// Brute-force counts over all level-`l` segment/shift pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentCounts {
    pub segments: u64,
    /// `Delta = s (mod Q)` but `Delta != s`.
    pub x: u64,
    /// `Delta = s (mod Q)`.
    pub y: u64,
    /// `Delta = s`.
    pub z: u64,
}

/// Enumerates every segment by a plain scan and tests every shift.
pub fn count_xyz_bruteforce<L: Lines + ?Sized>(lines: &L, q: u64, level: u32, limit: u64) -> Result<SegmentCounts> {
    let w = shift_window(level);
    let positions: u64 = (0..lines.line_count())
        .map(|l| {
            let win = lines.window(l);
            (win.end - win.start + 1) as u64
        })
        .sum();
    let work = positions.saturating_mul(2 * w as u64 + 1);
    if work > limit {
        return Err(Error::OracleLimit { work, limit });
    }
    let q = q as i64;
    let mut out = SegmentCounts::default();
    for l in 0..lines.line_count() {
        let win = lines.window(l);
        for p in win.start..=win.end {
            let starts = p == win.start || {
                let (a, b) = lines.keys(l, p);
                let (c, d) = lines.keys(l, p - 1);
                (a >> level, b >> level) != (c >> level, d >> level)
            };
            if !starts {
                continue;
            }
            out.segments += 1;
            let delta = lines.delta(l, p);
            for s in -w..=w {
                if (delta - s).rem_euclid(q) == 0 {
                    out.y += 1;
                    if delta == s {
                        out.z += 1;
                    } else {
                        out.x += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Brute-force counts for a whole instance.
pub fn count_xyz_instance<'a>(inst: impl Into<AnyInstance<'a>>, q: u64, level: u32, limit: u64) -> Result<SegmentCounts> {
    match inst.into() {
        AnyInstance::Matrix(x) => count_xyz_bruteforce(&MatrixLines::full(x, x.m()), q, level, limit),
        AnyInstance::Conv(x) => count_xyz_bruteforce(&ConvLines::full(x, x.m()), q, level, limit),
    }
}

/// Number of segment/shift pairs with `Delta = s (mod Q)` and `Delta != s`.
#[allow(non_snake_case)]
pub fn count_X_bruteforce<'a>(inst: impl Into<AnyInstance<'a>>, q: u64, level: u32, limit: u64) -> Result<u64> {
    Ok(count_xyz_instance(inst, q, level, limit)?.x)
}

/// Y-table of a matrix instance from segment start positions.
#[allow(non_snake_case)]
pub fn compute_Y_all_matrix_lines(inst: &VerificationInstance, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable> {
    LineY::new(&MatrixLines::full(inst, inst.m()), lmax).y_table(q_prev, pool, lmax)
}

/// Y-table of a convolution instance from segment start positions.
#[allow(non_snake_case)]
pub fn compute_Y_all_conv_lines(inst: &ConvVerificationInstance, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable> {
    LineY::new(&ConvLines::full(inst, inst.m()), lmax).y_table(q_prev, pool, lmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Variant;
    use crate::matrix::IntMatrix;

    #[test]
    fn pools() {
        assert_eq!(primes_in_range(16).unwrap().primes(), &[11, 13]);
        assert_eq!(primes_in_range(8).unwrap().primes(), &[5, 7]);
        assert_eq!(primes_in_range(4).unwrap().primes(), &[2, 3]);
        assert!(primes_in_range(3).is_err());
        assert_eq!(default_r(1), 16);
        assert_eq!(default_r(1 << 16), 16);
        assert_eq!(default_r(1 << 30), 45);
        assert!(pool_for(10, Some(6)).unwrap().primes().len() >= 2);
    }

    #[test]
    fn w_tables() {
        let w = compute_W(1, 11);
        assert_eq!((w[0], w[3], w[5]), (1, 2, 2));
        assert_eq!(w.iter().sum::<u64>(), 17);
        assert_eq!(compute_W(1, 1), vec![17]);
        for q in 17..40u64 {
            assert!(compute_W(2, q).iter().all(|&x| x <= 2));
        }
    }

    #[test]
    fn selection_rule() {
        let t = YTable {
            primes: vec![11, 13],
            y: vec![vec![5, 7]],
        };
        assert_eq!(select_prime(&t), (0, 11));
        assert_eq!(t.phi(1), 2);

        let t = YTable {
            primes: vec![11, 13],
            y: vec![vec![4, 4]],
        };
        assert_eq!(select_prime(&t).1, 11);

        let t = YTable {
            primes: vec![11, 13],
            y: vec![vec![5, 6], vec![9, 7]],
        };
        assert_eq!((t.phi(0), t.phi(1)), (2, 1));
        assert_eq!(select_prime(&t).1, 13);
    }

    #[test]
    fn zero_instance_takes_smallest_prime_twice() {
        let z = IntMatrix::zeros(3, 3);
        let inst = VerificationInstance::new(z.clone(), z.clone(), z, 100, Variant::Row).unwrap();
        let lines = MatrixLines::full(&inst, 100);
        let pool = primes_in_range(16).unwrap();
        let (q, rep) = find_good_modulus(&LineY::new(&lines, 3), 100, &pool, 3).unwrap();
        assert_eq!(q, 121);
        assert_eq!(rep.primes, vec![11, 11]);
        assert!(rep.first_crossing_holds());
        // One segment per (i, k) and only s = 0 is admissible.
        assert_eq!(rep.steps[0].y.y[0], vec![9, 9]);
    }

    #[test]
    fn tiny_pool_crosses_quickly() {
        let z = IntMatrix::zeros(1, 1);
        let inst = VerificationInstance::new(z.clone(), z.clone(), z, 100, Variant::Row).unwrap();
        let lines = MatrixLines::full(&inst, 100);
        let pool = primes_in_range(4).unwrap();
        let (q, rep) = find_good_modulus(&LineY::new(&lines, 3), 100, &pool, 3).unwrap();
        assert!(rep.primes.len() <= 7);
        assert!((100..=400).contains(&q));
        assert!(rep.first_crossing_holds());
    }

    #[test]
    fn single_cell_y() {
        let one = |x| IntMatrix::from_rows(&[[x]]).unwrap();
        let inst = VerificationInstance::new(one(1), one(2), one(3), 100, Variant::Row).unwrap();
        let pool = PrimePool {
            r: 5,
            primes: vec![5],
        };
        let t = compute_Y_all_matrix_lines(&inst, 1, &pool, 0).unwrap();
        assert_eq!(t.y[0], vec![1]);
    }

    #[test]
    fn bruteforce_counts() {
        let z = IntMatrix::zeros(2, 2);
        let inst = VerificationInstance::new(z.clone(), z.clone(), z, 100, Variant::Row).unwrap();
        for level in 0..4 {
            let c = count_xyz_instance(&inst, 121, level, u64::MAX).unwrap();
            assert_eq!(c.x, 0);
            assert_eq!(c.z, c.segments);
        }
        let c = count_xyz_instance(&inst, 1, 0, u64::MAX).unwrap();
        assert_eq!(c.y, c.segments * 9);
        assert!(count_xyz_instance(&inst, 1, 0, 3).is_err());
    }
}
