//! Brute-force references for every problem variant.

use crate::error::{Error, Result};
use crate::matrix::{IntArray, IntMatrix, WitnessMask};

/// `C[i][j] = min_k A[i][k] + B[k][j]` by triple loop.
pub fn minplus_product_naive(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.cols() == 0 {
        return Err(Error::DimensionMismatch("empty inner dimension".into()));
    }
    let mut c = IntMatrix::filled(a.rows(), b.cols(), i64::MAX);
    for i in 0..a.rows() {
        let out = c.row_mut(i);
        for k in 0..a.cols() {
            let x = a.get(i, k);
            for (o, &y) in out.iter_mut().zip(b.row(k)) {
                *o = (*o).min(x + y);
            }
        }
    }
    Ok(c)
}

/// `(A ◇ B)_k = min_i A_i + B_{k-i}`, returned with logical origin 2.
pub fn minplus_convolution_naive(a: &IntArray, b: &IntArray) -> Result<IntArray> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "array lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut c = vec![i64::MAX; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            c[i + j] = c[i + j].min(a[i] + b[j]);
        }
    }
    Ok(IntArray::with_origin(2, c))
}

/// Which cells a verification mask is indexed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryAxis {
    /// Does some `k` give `A[i][k] + B[k][j] = C[i][j]`?
    PerIJ,
    /// Does some `j` give `A[i][k] + B[k][j] = C[i][j]`?
    PerIK,
    /// Does some `i` give `A_i + B_{k-i} = C_k`?
    PerK,
}

/// Exact witness mask for a matrix triple.
pub fn witness_mask_matrix(
    a: &IntMatrix,
    b: &IntMatrix,
    c: &IntMatrix,
    axis: QueryAxis,
) -> Result<WitnessMask> {
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
    let mut mask = match axis {
        QueryAxis::PerIJ => WitnessMask::grid(a.rows(), c.cols()),
        QueryAxis::PerIK => WitnessMask::grid(a.rows(), a.cols()),
        QueryAxis::PerK => {
            return Err(Error::DimensionMismatch(
                "per-k queries need an array instance".into(),
            ))
        }
    };
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            for j in 0..b.cols() {
                if a.get(i, k) + b.get(k, j) == c.get(i, j) {
                    match axis {
                        QueryAxis::PerIJ => mask.set(i, j, true),
                        _ => mask.set(i, k, true),
                    }
                }
            }
        }
    }
    Ok(mask)
}

/// Exact witness mask for a convolution triple; `c` has length `2n - 1`.
pub fn witness_mask_conv(a: &IntArray, b: &IntArray, c: &IntArray) -> Result<WitnessMask> {
    let n = a.len();
    if n == 0 || b.len() != n || c.len() != 2 * n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "lengths {}, {}, {}",
            a.len(),
            b.len(),
            c.len()
        )));
    }
    let (a, b, cs) = (a.as_slice(), b.as_slice(), c.as_slice());
    let mut mask = WitnessMask::range(c.origin(), cs.len());
    for i in 0..n {
        for j in 0..n {
            if a[i] + b[j] == cs[i + j] {
                mask.set_bit(i + j, true);
            }
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn small_product() {
        let a = m(&[&[0, 1], &[2, 0]]);
        let b = m(&[&[1, 2], &[1, 2]]);
        assert_eq!(minplus_product_naive(&a, &b).unwrap(), m(&[&[1, 2], &[1, 2]]));
        assert_eq!(
            minplus_product_naive(&m(&[&[0]]), &m(&[&[5]])).unwrap(),
            m(&[&[5]])
        );
        assert!(minplus_product_naive(&a, &m(&[&[1, 2]])).is_err());
    }

    #[test]
    fn zero_left_factor_gives_column_minima() {
        let a = IntMatrix::zeros(2, 3);
        let b = m(&[&[3, 4], &[1, 9], &[2, 2]]);
        assert_eq!(minplus_product_naive(&a, &b).unwrap(), m(&[&[1, 2], &[1, 2]]));
    }

    #[test]
    fn small_convolution() {
        let c = minplus_convolution_naive(&IntArray::new(vec![1, 2]), &IntArray::new(vec![1, 1])).unwrap();
        assert_eq!(c.as_slice(), &[2, 2, 3]);
        assert_eq!(c.origin(), 2);
        let c = minplus_convolution_naive(&IntArray::new(vec![3]), &IntArray::new(vec![4])).unwrap();
        assert_eq!(c.as_slice(), &[7]);
        let z = IntArray::new(vec![0; 4]);
        assert!(minplus_convolution_naive(&z, &z).unwrap().is_zero());
    }

    #[test]
    fn masks() {
        let a = m(&[&[0, 1], &[2, 0]]);
        let b = m(&[&[1, 2], &[1, 2]]);
        let c = m(&[&[1, 2], &[1, 2]]);
        assert!(witness_mask_matrix(&a, &b, &c, QueryAxis::PerIJ).unwrap().all());
        let zero = IntMatrix::zeros(2, 2);
        assert!(witness_mask_matrix(&a, &b, &zero, QueryAxis::PerIJ).unwrap().none());

        let mask = witness_mask_conv(
            &IntArray::new(vec![1, 2]),
            &IntArray::new(vec![1, 1]),
            &IntArray::with_origin(2, vec![2, 2, 3]),
        )
        .unwrap();
        assert!(mask.all());
    }

    #[test]
    fn per_ik_mask() {
        // Only k = 0 reaches C[0][0] = 1.
        let a = m(&[&[0, 5]]);
        let b = m(&[&[1], &[1]]);
        let c = m(&[&[1]]);
        let mask = witness_mask_matrix(&a, &b, &c, QueryAxis::PerIK).unwrap();
        assert_eq!(mask.bits(), &[true, false]);
    }
}
