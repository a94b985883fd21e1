//! Dense integer matrices and arrays, monotonicity tags, and witness masks.
//!
//! All indices in this crate are 0-based. Convolution outputs keep the
//! conventional logical origin (`2` for outputs indexed `2..=2n`) in
//! [`IntArray::origin`], but storage is always a plain `Vec`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest entry bound accepted anywhere. Keeps every `A + B - C` and every
/// residue-shifted value far inside `i64`.
pub const MAX_ENTRY_BOUND: i64 = 1 << 40;

/// Row-major dense matrix of `i64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0)
    }

    pub fn filled(rows: usize, cols: usize, value: i64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [i64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [i64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(i64) -> i64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_entry(&self) -> Option<i64> {
        self.data.iter().copied().max()
    }

    pub fn min_entry(&self) -> Option<i64> {
        self.data.iter().copied().min()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_row_monotone(&self) -> bool {
        (0..self.rows).all(|i| self.row(i).windows(2).all(|w| w[0] <= w[1]))
    }

    pub fn is_column_monotone(&self) -> bool {
        (1..self.rows).all(|i| (0..self.cols).all(|j| self.get(i - 1, j) <= self.get(i, j)))
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

/// Dense array with an explicit logical index origin.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntArray {
    origin: usize,
    data: Vec<i64>,
}

impl IntArray {
    /// Input arrays are indexed from 1.
    pub fn new(data: Vec<i64>) -> Self {
        Self { origin: 1, data }
    }

    pub fn with_origin(origin: usize, data: Vec<i64>) -> Self {
        Self { origin, data }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Entry at a logical index (`origin..origin + len`).
    pub fn at(&self, index: usize) -> Option<i64> {
        index
            .checked_sub(self.origin)
            .and_then(|p| self.data.get(p).copied())
    }

    #[inline]
    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(i64) -> i64) -> Self {
        Self {
            origin: self.origin,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_entry(&self) -> Option<i64> {
        self.data.iter().copied().max()
    }

    pub fn is_monotone(&self) -> bool {
        self.data.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for IntArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntArray@{}{:?}", self.origin, self.data)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    RowMonotone,
    ColumnMonotone,
    ArrayMonotone,
}

/// Monotonicity direction plus the entry bound `U`: tagged data must be
/// monotone along `axis` with every entry in `[1, entry_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneTag {
    pub axis: Axis,
    pub entry_bound: i64,
}

impl MonotoneTag {
    pub fn new(axis: Axis, entry_bound: i64) -> Result<Self> {
        if !(1..=MAX_ENTRY_BOUND).contains(&entry_bound) {
            return Err(Error::BoundOutOfRange {
                bound: entry_bound,
                max: MAX_ENTRY_BOUND,
            });
        }
        Ok(Self { axis, entry_bound })
    }

    pub fn row(entry_bound: i64) -> Result<Self> {
        Self::new(Axis::RowMonotone, entry_bound)
    }

    pub fn column(entry_bound: i64) -> Result<Self> {
        Self::new(Axis::ColumnMonotone, entry_bound)
    }

    pub fn array(entry_bound: i64) -> Result<Self> {
        Self::new(Axis::ArrayMonotone, entry_bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Entry outside `[1, entry_bound]`.
    OutOfBounds,
    /// Entry smaller than its predecessor along the tagged axis.
    NotMonotone,
    /// Tag axis does not apply to this kind of data.
    AxisMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Ok,
    /// First violating coordinate in row-major order (0-based).
    Violation { coord: Vec<usize>, kind: ViolationKind },
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationReport::Ok)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            ValidationReport::Ok => Ok(()),
            ValidationReport::Violation { coord, kind } => Err(Error::PromiseViolation {
                coord,
                reason: format!("{kind:?}"),
            }),
        }
    }
}

/// Data that can be checked against a [`MonotoneTag`].
pub trait Promised {
    fn validate(&self, tag: &MonotoneTag) -> ValidationReport;
}

impl Promised for IntMatrix {
    fn validate(&self, tag: &MonotoneTag) -> ValidationReport {
        let in_bounds = |x: i64| (1..=tag.entry_bound).contains(&x);
        let (row_wise, col_wise) = match tag.axis {
            Axis::RowMonotone => (true, false),
            Axis::ColumnMonotone => (false, true),
            Axis::ArrayMonotone => {
                return ValidationReport::Violation {
                    coord: vec![],
                    kind: ViolationKind::AxisMismatch,
                }
            }
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                let kind = if !in_bounds(x) {
                    Some(ViolationKind::OutOfBounds)
                } else if (row_wise && j > 0 && self.get(i, j - 1) > x)
                    || (col_wise && i > 0 && self.get(i - 1, j) > x)
                {
                    Some(ViolationKind::NotMonotone)
                } else {
                    None
                };
                if let Some(kind) = kind {
                    return ValidationReport::Violation {
                        coord: vec![i, j],
                        kind,
                    };
                }
            }
        }
        ValidationReport::Ok
    }
}

impl Promised for IntArray {
    fn validate(&self, tag: &MonotoneTag) -> ValidationReport {
        if tag.axis != Axis::ArrayMonotone {
            return ValidationReport::Violation {
                coord: vec![],
                kind: ViolationKind::AxisMismatch,
            };
        }
        for (i, &x) in self.data.iter().enumerate() {
            let kind = if !(1..=tag.entry_bound).contains(&x) {
                Some(ViolationKind::OutOfBounds)
            } else if i > 0 && self.data[i - 1] > x {
                Some(ViolationKind::NotMonotone)
            } else {
                None
            };
            if let Some(kind) = kind {
                return ValidationReport::Violation {
                    coord: vec![i],
                    kind,
                };
            }
        }
        ValidationReport::Ok
    }
}

/// Checks monotonicity along `tag.axis` and that all entries lie in
/// `[1, tag.entry_bound]`.
pub fn validate_promises<T: Promised + ?Sized>(m: &T, tag: &MonotoneTag) -> ValidationReport {
    m.validate(tag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MaskShape {
    /// One bit per `(row, col)` cell.
    Grid { rows: usize, cols: usize },
    /// One bit per logical index `origin..origin + len`.
    Range { origin: usize, len: usize },
}

/// YES/NO answer of a verification problem, one bit per query cell.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WitnessMask {
    shape: MaskShape,
    bits: Vec<bool>,
}

impl WitnessMask {
    pub fn grid(rows: usize, cols: usize) -> Self {
        Self {
            shape: MaskShape::Grid { rows, cols },
            bits: vec![false; rows * cols],
        }
    }

    pub fn range(origin: usize, len: usize) -> Self {
        Self {
            shape: MaskShape::Range { origin, len },
            bits: vec![false; len],
        }
    }

    pub fn shape(&self) -> MaskShape {
        self.shape
    }

    fn cols(&self) -> usize {
        match self.shape {
            MaskShape::Grid { cols, .. } => cols,
            MaskShape::Range { len, .. } => len,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let c = self.cols();
        self.bits[i * c + j] = v;
    }

    /// Bit at storage position `p` (row-major for grids, `index - origin` for ranges).
    #[inline]
    pub fn bit(&self, p: usize) -> bool {
        self.bits[p]
    }

    #[inline]
    pub fn set_bit(&mut self, p: usize, v: bool) {
        self.bits[p] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn all(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn none(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Cellwise OR with a mask of the same shape.
    pub fn or_assign(&mut self, other: &WitnessMask) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    /// Rows of 0/1 values; ranges become a single row.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.bits
            .chunks(self.cols().max(1))
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }
}

impl fmt::Debug for WitnessMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WitnessMask({:?}, {:?})", self.shape, self.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_monotone_ok() {
        let b = IntMatrix::from_rows(&[[1, 2], [1, 2]]).unwrap();
        assert!(validate_promises(&b, &MonotoneTag::row(2).unwrap()).is_ok());
    }

    #[test]
    fn row_monotone_violation_reports_first_cell() {
        let b = IntMatrix::from_rows(&[[2, 1]]).unwrap();
        assert_eq!(
            validate_promises(&b, &MonotoneTag::row(2).unwrap()),
            ValidationReport::Violation {
                coord: vec![0, 1],
                kind: ViolationKind::NotMonotone
            }
        );
    }

    #[test]
    fn array_monotone_ok() {
        let a = IntArray::new(vec![1, 1, 3]);
        assert!(validate_promises(&a, &MonotoneTag::array(3).unwrap()).is_ok());
    }

    #[test]
    fn bound_and_axis_checks() {
        let a = IntArray::new(vec![1, 4]);
        assert_eq!(
            validate_promises(&a, &MonotoneTag::array(3).unwrap()),
            ValidationReport::Violation {
                coord: vec![1],
                kind: ViolationKind::OutOfBounds
            }
        );
        let m = IntMatrix::from_rows(&[[1, 1], [0, 2]]).unwrap();
        let r = validate_promises(&m, &MonotoneTag::column(5).unwrap());
        assert_eq!(
            r,
            ValidationReport::Violation {
                coord: vec![1, 0],
                kind: ViolationKind::OutOfBounds
            }
        );
        assert!(matches!(
            validate_promises(&m, &MonotoneTag::array(5).unwrap()),
            ValidationReport::Violation {
                kind: ViolationKind::AxisMismatch,
                ..
            }
        ));
        assert!(MonotoneTag::row(0).is_err());
    }

    #[test]
    fn column_monotone_detects_decrease() {
        let m = IntMatrix::from_rows(&[[2, 1], [1, 3]]).unwrap();
        assert_eq!(
            validate_promises(&m, &MonotoneTag::column(5).unwrap()),
            ValidationReport::Violation {
                coord: vec![1, 0],
                kind: ViolationKind::NotMonotone
            }
        );
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
        assert!(IntMatrix::new(2, 2, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn array_origin_lookup() {
        let c = IntArray::with_origin(2, vec![5, 6, 7]);
        assert_eq!(c.at(2), Some(5));
        assert_eq!(c.at(4), Some(7));
        assert_eq!(c.at(1), None);
        assert_eq!(c.at(5), None);
    }
}
