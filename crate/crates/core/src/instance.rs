//! Verification instances carrying the small-residue promise.

use crate::config::check_promise_modulus;
use crate::error::{Error, Result};
use crate::matrix::{IntArray, IntMatrix, WitnessMask, MAX_ENTRY_BOUND};
use crate::naive::{witness_mask_conv, witness_mask_matrix, QueryAxis};
use crate::segments::{ConvSource, TripleSource};

/// Largest entry any instance may hold; keeps `A + B - C` and every shift in range.
pub const MAX_INSTANCE_ENTRY: i64 = MAX_ENTRY_BOUND << 3;

/// Which cells a matrix instance answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Per `(i, j)`: some `k` with `A[i][k] + B[k][j] = C[i][j]`.
    Row,
    /// Per `(i, k)`: some `j` with `A[i][k] + B[k][j] = C[i][j]`.
    Col,
}

impl Variant {
    pub fn axis(self) -> QueryAxis {
        match self {
            Variant::Row => QueryAxis::PerIJ,
            Variant::Col => QueryAxis::PerIK,
        }
    }
}

/// `(A, B, C, M)` with nonnegative entries, row-monotone `B` and `C`, and
/// every residue mod `M` at most `M / 10`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationInstance {
    a: IntMatrix,
    b: IntMatrix,
    c: IntMatrix,
    m: i64,
    variant: Variant,
}

fn violation(name: &str, coord: Vec<usize>, what: &str) -> Error {
    Error::PromiseViolation {
        reason: format!("{name}{coord:?}: {what}"),
        coord,
    }
}

fn check_entry(name: &str, coord: Vec<usize>, x: i64, m: i64) -> Result<()> {
    if x < 0 {
        return Err(violation(name, coord, "negative entry"));
    }
    if x > MAX_INSTANCE_ENTRY {
        return Err(violation(name, coord, "entry too large"));
    }
    if x % m > m / 10 {
        return Err(violation(name, coord, "residue exceeds M/10"));
    }
    Ok(())
}

fn check_matrix(name: &str, x: &IntMatrix, m: i64, monotone: bool) -> Result<()> {
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            check_entry(name, vec![i, j], x.get(i, j), m)?;
            if monotone && j > 0 && x.get(i, j - 1) > x.get(i, j) {
                return Err(violation(name, vec![i, j], "row not monotone"));
            }
        }
    }
    Ok(())
}

impl VerificationInstance {
    pub fn new(a: IntMatrix, b: IntMatrix, c: IntMatrix, m: i64, variant: Variant) -> Result<Self> {
        check_promise_modulus(m)?;
        if a.cols() != b.rows() || a.rows() != c.rows() || b.cols() != c.cols() {
            return Err(Error::DimensionMismatch(format!(
                "shapes {}x{}, {}x{}, {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        check_matrix("A", &a, m, false)?;
        check_matrix("B", &b, m, true)?;
        check_matrix("C", &c, m, true)?;
        Ok(Self { a, b, c, m, variant })
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn c(&self) -> &IntMatrix {
        &self.c
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Largest entry of any of the three matrices.
    pub fn max_entry(&self) -> i64 {
        [&self.a, &self.b, &self.c]
            .iter()
            .filter_map(|x| x.max_entry())
            .max()
            .unwrap_or(0)
    }

    pub fn max_dim(&self) -> usize {
        self.a.rows().max(self.a.cols()).max(self.b.cols())
    }

    /// Number of answer cells.
    pub fn cells(&self) -> usize {
        match self.variant {
            Variant::Row => self.a.rows() * self.c.cols(),
            Variant::Col => self.a.rows() * self.a.cols(),
        }
    }

    pub fn empty_mask(&self) -> WitnessMask {
        match self.variant {
            Variant::Row => WitnessMask::grid(self.a.rows(), self.c.cols()),
            Variant::Col => WitnessMask::grid(self.a.rows(), self.a.cols()),
        }
    }
}

impl TripleSource for VerificationInstance {
    #[inline]
    fn dims(&self) -> (usize, usize, usize) {
        (self.a.rows(), self.a.cols(), self.b.cols())
    }
    #[inline]
    fn a(&self, i: usize, k: usize) -> i64 {
        self.a.get(i, k)
    }
    #[inline]
    fn b(&self, k: usize, j: usize) -> i64 {
        self.b.get(k, j)
    }
    #[inline]
    fn c(&self, i: usize, j: usize) -> i64 {
        self.c.get(i, j)
    }
}

/// Convolution analogue: monotone `A`, `B` of length `n`, `C` of length
/// `2n - 1` (logical indices `2..=2n`), all residues mod `M` at most `M / 10`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvVerificationInstance {
    a: IntArray,
    b: IntArray,
    c: IntArray,
    m: i64,
}

fn check_array(name: &str, x: &IntArray, m: i64, monotone: bool) -> Result<()> {
    let xs = x.as_slice();
    for (i, &v) in xs.iter().enumerate() {
        check_entry(name, vec![i], v, m)?;
        if monotone && i > 0 && xs[i - 1] > v {
            return Err(violation(name, vec![i], "array not monotone"));
        }
    }
    Ok(())
}

impl ConvVerificationInstance {
    pub fn new(a: IntArray, b: IntArray, c: IntArray, m: i64) -> Result<Self> {
        check_promise_modulus(m)?;
        let n = a.len();
        if n == 0 || b.len() != n || c.len() != 2 * n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "lengths {}, {}, {}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        check_array("A", &a, m, true)?;
        check_array("B", &b, m, true)?;
        check_array("C", &c, m, false)?;
        let c = IntArray::with_origin(2, c.into_vec());
        Ok(Self { a, b, c, m })
    }

    pub fn a(&self) -> &IntArray {
        &self.a
    }

    pub fn b(&self) -> &IntArray {
        &self.b
    }

    pub fn c(&self) -> &IntArray {
        &self.c
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_entry(&self) -> i64 {
        [&self.a, &self.b, &self.c]
            .iter()
            .filter_map(|x| x.max_entry())
            .max()
            .unwrap_or(0)
    }
}

impl ConvSource for ConvVerificationInstance {
    #[inline]
    fn n(&self) -> usize {
        self.a.len()
    }
    #[inline]
    fn a(&self, i: usize) -> i64 {
        self.a.as_slice()[i]
    }
    #[inline]
    fn b(&self, j: usize) -> i64 {
        self.b.as_slice()[j]
    }
    #[inline]
    fn c(&self, k: usize) -> i64 {
        self.c.as_slice()[k]
    }
}

/// Any verification instance, for the brute-force mask.
#[derive(Clone, Copy, Debug)]
pub enum AnyInstance<'a> {
    Matrix(&'a VerificationInstance),
    Conv(&'a ConvVerificationInstance),
}

impl<'a> From<&'a VerificationInstance> for AnyInstance<'a> {
    fn from(x: &'a VerificationInstance) -> Self {
        AnyInstance::Matrix(x)
    }
}

impl<'a> From<&'a ConvVerificationInstance> for AnyInstance<'a> {
    fn from(x: &'a ConvVerificationInstance) -> Self {
        AnyInstance::Conv(x)
    }
}

/// Exact brute-force answer for the given query axis.
pub fn witness_mask_naive<'a>(inst: impl Into<AnyInstance<'a>>, axis: QueryAxis) -> Result<WitnessMask> {
    match (inst.into(), axis) {
        (AnyInstance::Matrix(x), QueryAxis::PerIJ | QueryAxis::PerIK) => {
            witness_mask_matrix(&x.a, &x.b, &x.c, axis)
        }
        (AnyInstance::Conv(x), QueryAxis::PerK) => witness_mask_conv(&x.a, &x.b, &x.c),
        (_, axis) => Err(Error::DimensionMismatch(format!(
            "query axis {axis:?} does not fit the instance"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn promise_checks() {
        let ok = VerificationInstance::new(m(&[&[100]]), m(&[&[205]]), m(&[&[305]]), 100, Variant::Row);
        assert!(ok.is_ok());
        let bad = VerificationInstance::new(m(&[&[100]]), m(&[&[211]]), m(&[&[305]]), 100, Variant::Row);
        assert!(matches!(bad, Err(Error::PromiseViolation { ref coord, .. }) if coord == &vec![0, 0]));
        let bad = VerificationInstance::new(m(&[&[0]]), m(&[&[5, 3]]), m(&[&[5, 5]]), 100, Variant::Row);
        assert!(matches!(bad, Err(Error::PromiseViolation { ref coord, .. }) if coord == &vec![0, 1]));
        let bad = VerificationInstance::new(m(&[&[0]]), m(&[&[0]]), m(&[&[0]]), 50, Variant::Row);
        assert_eq!(bad, Err(Error::InvalidPromiseModulus(50)));
        let bad = VerificationInstance::new(m(&[&[0, 0]]), m(&[&[0]]), m(&[&[0]]), 100, Variant::Row);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn naive_masks_through_instances() {
        let inst = VerificationInstance::new(
            m(&[&[0, 1], &[2, 0]]),
            m(&[&[1, 2], &[1, 2]]),
            m(&[&[1, 2], &[1, 2]]),
            100,
            Variant::Row,
        )
        .unwrap();
        assert!(witness_mask_naive(&inst, QueryAxis::PerIJ).unwrap().all());
        assert!(witness_mask_naive(&inst, QueryAxis::PerK).is_err());

        let conv = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2]),
            IntArray::new(vec![1, 1]),
            IntArray::new(vec![2, 2, 3]),
            100,
        )
        .unwrap();
        assert!(witness_mask_naive(&conv, QueryAxis::PerK).unwrap().all());
        assert_eq!(conv.c().origin(), 2);
    }
}
