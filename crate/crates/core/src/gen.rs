//! Seeded instance generators.
//!
//! All randomness comes from one `u64` seed fed to ChaCha8, a counter-based
//! stream cipher generator whose output is identical on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format::{InstanceFile, Kind, FORMAT_VERSION};
use crate::instance::{ConvVerificationInstance, Variant, VerificationInstance};
use crate::matrix::{validate_promises, IntArray, IntMatrix, MonotoneTag};
use crate::naive::{minplus_convolution_naive, minplus_product_naive};
use crate::product_col::{normalize_nonincreasing, rotate_to_problem2prime};
use crate::reduction::{shift_residues, shift_residues_conv, PairWindows};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Sorted uniform samples from `[1, bound]`.
    UniformMonotone,
    /// Random start, then steps of 0, 1 or 2.
    BoundedDifference,
    /// Step functions with plateaus of length `ceil(n / bound)`.
    Staircase,
    /// Values from a two- or three-element set, so most sums tie.
    AdversarialTies,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::UniformMonotone,
        Family::BoundedDifference,
        Family::Staircase,
        Family::AdversarialTies,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformMonotone => "uniform-monotone",
            Family::BoundedDifference => "bounded-difference",
            Family::Staircase => "staircase",
            Family::AdversarialTies => "adversarial-ties",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown family {s:?}")))
    }
}

/// One non-decreasing row of length `n` with entries in `[1, bound]`.
pub fn monotone_row(rng: &mut impl Rng, n: usize, bound: i64, family: Family) -> Vec<i64> {
    match family {
        Family::UniformMonotone => {
            let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=bound)).collect();
            v.sort_unstable();
            v
        }
        Family::BoundedDifference => {
            let mut x = rng.gen_range(1..=(bound + 1) / 2);
            (0..n)
                .map(|_| {
                    let cur = x;
                    x = (x + rng.gen_range(0..=2)).min(bound);
                    cur
                })
                .collect()
        }
        Family::Staircase => {
            let plateau = n.div_ceil(bound as usize).max(1);
            let top = 1 + (n.saturating_sub(1) / plateau) as i64;
            let offset = rng.gen_range(0..=bound - top);
            (0..n).map(|j| 1 + offset + (j / plateau) as i64).collect()
        }
        Family::AdversarialTies => {
            let lo = rng.gen_range(1..=bound);
            let hi = (lo + rng.gen_range(0..=1)).min(bound);
            let mut v: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { lo } else { hi }).collect();
            v.sort_unstable();
            v
        }
    }
}

/// Unconstrained left factor with entries in `[1, bound]`.
pub fn free_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64, family: Family) -> IntMatrix {
    match family {
        Family::AdversarialTies => {
            let hi = bound.min(2);
            IntMatrix::from_fn(rows, cols, |_, _| rng.gen_range(1..=hi))
        }
        _ => IntMatrix::from_fn(rows, cols, |_, _| rng.gen_range(1..=bound)),
    }
}

pub fn row_monotone_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64, family: Family) -> IntMatrix {
    let data: Vec<i64> = (0..rows).flat_map(|_| monotone_row(rng, cols, bound, family)).collect();
    IntMatrix::new(rows, cols, data).expect("generated shape")
}

/// A seeded generator for the given seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The `(s, t)` instance with the most candidate positions, lowest pair
/// first on ties.
fn busiest(pairs: &[PairWindows]) -> (usize, usize) {
    let size = |p: &PairWindows| -> usize { p.windows.iter().map(|w| w.end - w.start + 1).sum() };
    let mut best: Option<&PairWindows> = None;
    for p in pairs {
        if best.map_or(true, |b| size(p) > size(b)) {
            best = Some(p);
        }
    }
    best.map_or((0, 0), |p| (p.s, p.t))
}

/// Promised instance obtained by residue shifting `(A, B, C)` with modulus
/// `m` and keeping the busiest `(s, t)` class pair.
pub fn lift_product(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, m: i64, variant: Variant) -> Result<VerificationInstance> {
    let sh = shift_residues(a, b, c, m)?;
    let (s, t) = busiest(&sh.pair_windows(|_, _, _| true));
    sh.instance(s, t, variant)
}

pub fn lift_conv(a: &IntArray, b: &IntArray, c: &IntArray, m: i64) -> Result<ConvVerificationInstance> {
    let sh = shift_residues_conv(a, b, c, m)?;
    let (s, t) = busiest(&sh.pair_windows(|_| true));
    sh.instance(s, t)
}

/// Modulus used for generated verification instances.
pub const GEN_PROMISE_MODULUS: i64 = 100;

/// Deterministic instance of the given kind.
pub fn gen(kind: Kind, n: usize, bound: i64, seed: u64, family: Family) -> Result<InstanceFile> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    MonotoneTag::row(bound)?;
    let mut rng = rng_for(seed);
    let file = match kind {
        Kind::ProductRow => {
            let a = free_matrix(&mut rng, n, n, bound, family);
            let b = row_monotone_matrix(&mut rng, n, n, bound, family);
            validate_promises(&b, &MonotoneTag::row(bound)?).into_result()?;
            InstanceFile::product(kind, &a, &b, bound)
        }
        Kind::ProductCol => {
            let a = free_matrix(&mut rng, n, n, bound, family);
            let b = row_monotone_matrix(&mut rng, n, n, bound, family).transpose();
            validate_promises(&b, &MonotoneTag::column(bound)?).into_result()?;
            InstanceFile::product(kind, &a, &b, bound)
        }
        Kind::Conv => {
            let a = IntArray::new(monotone_row(&mut rng, n, bound, family));
            let b = IntArray::new(monotone_row(&mut rng, n, bound, family));
            let tag = MonotoneTag::array(bound)?;
            validate_promises(&a, &tag).into_result()?;
            validate_promises(&b, &tag).into_result()?;
            InstanceFile::conv(&a, &b, bound)
        }
        Kind::VerifyRow => {
            let a = free_matrix(&mut rng, n, n, bound, family);
            let b = row_monotone_matrix(&mut rng, n, n, bound, family);
            let c = perturb(&mut rng, &minplus_product_naive(&a, &b)?);
            let inst = lift_product(&a, &b, &c, GEN_PROMISE_MODULUS, Variant::Row)?;
            verification_file(kind, &inst)
        }
        Kind::VerifyCol => {
            let a = normalize_nonincreasing(&free_matrix(&mut rng, n, n, bound, family));
            let b = row_monotone_matrix(&mut rng, n, n, bound, family).transpose();
            let c = minplus_product_naive(&a, &b)?;
            let w = [&a, &b, &c].iter().filter_map(|x| x.max_entry()).max().unwrap_or(0) + 1;
            let c = perturb(&mut rng, &c).map(|x| x.min(w));
            let rot = rotate_to_problem2prime(&a, &b, &c, w)?;
            let inst = lift_product(&rot.a, &rot.b, &rot.c, GEN_PROMISE_MODULUS, Variant::Col)?;
            verification_file(kind, &inst)
        }
        Kind::VerifyConv => {
            let a = IntArray::new(monotone_row(&mut rng, n, bound, family));
            let b = IntArray::new(monotone_row(&mut rng, n, bound, family));
            let c = minplus_convolution_naive(&a, &b)?;
            let c = IntArray::new(c.as_slice().iter().map(|&x| x + rng.gen_range(0..=1)).collect());
            let inst = lift_conv(&a, &b, &c, GEN_PROMISE_MODULUS)?;
            InstanceFile {
                format: FORMAT_VERSION,
                kind,
                dims: vec![n],
                entry_bound: inst.max_entry().max(1),
                m: Some(inst.m()),
                a: inst.a().into(),
                b: inst.b().into(),
                c: Some(inst.c().into()),
            }
        }
    };
    file.check()?;
    Ok(file)
}

/// Adds 1 to a random quarter of the rows of `c`, keeping rows monotone.
fn perturb(rng: &mut impl Rng, c: &IntMatrix) -> IntMatrix {
    let mut out = c.clone();
    for i in 0..out.rows() {
        if rng.gen_range(0..4) == 0 {
            out.row_mut(i).iter_mut().for_each(|x| *x += 1);
        }
    }
    out
}

fn verification_file(kind: Kind, inst: &VerificationInstance) -> InstanceFile {
    let (a, b) = (inst.a(), inst.b());
    InstanceFile {
        format: FORMAT_VERSION,
        kind,
        dims: vec![a.rows(), a.cols(), b.cols()],
        entry_bound: inst.max_entry().max(1),
        m: Some(inst.m()),
        a: a.into(),
        b: b.into(),
        c: Some(inst.c().into()),
    }
}
