//! The cyclic ring `F[x]/(x^Q - 1)`, matrices over it, and polynomials that
//! are cyclic in `x` and ordinary in `y`.
//!
//! `Q` is arbitrary, so products are computed at a padded power-of-two length
//! and folded back modulo `x^Q - 1` afterwards.

use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPoly {
    q: usize,
    coeffs: Vec<u64>,
}

impl CyclicPoly {
    pub fn zero(q: usize) -> Self {
        assert!(q >= 1, "ring order must be positive");
        Self {
            q,
            coeffs: vec![0; q],
        }
    }

    /// `x^(e mod q)`.
    pub fn monomial(q: usize, e: i64) -> Self {
        let mut p = Self::zero(q);
        p.coeffs[e.rem_euclid(q as i64) as usize] = 1;
        p
    }

    /// Coefficients are reduced modulo the field characteristic.
    pub fn from_coeffs(f: &PrimeField, coeffs: Vec<u64>) -> Self {
        assert!(!coeffs.is_empty(), "ring order must be positive");
        let p = f.modulus();
        Self {
            q: coeffs.len(),
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        }
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn coeff(&self, r: usize) -> u64 {
        self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self, f: &PrimeField) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::RingMismatch(self.q, other.q));
        }
        Ok(Self {
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }
}

/// Smallest power of two that holds a linear product of two length-`q` vectors.
fn padded_len(q: usize) -> usize {
    (2 * q).next_power_of_two()
}

fn fold(f: &PrimeField, linear: &[u64], q: usize) -> Vec<u64> {
    let mut out = vec![0u64; q];
    for (e, &c) in linear.iter().enumerate() {
        let r = e % q;
        out[r] = f.add(out[r], c);
    }
    out
}

/// Product in `F[x]/(x^Q - 1)`.
pub fn cyclic_convolve(u: &CyclicPoly, v: &CyclicPoly, f: &PrimeField) -> Result<CyclicPoly> {
    if u.q != v.q {
        return Err(Error::RingMismatch(u.q, v.q));
    }
    let len = padded_len(u.q);
    let mut fu = u.coeffs.clone();
    fu.resize(len, 0);
    let mut fv = v.coeffs.clone();
    fv.resize(len, 0);
    f.ntt(&mut fu, false)?;
    f.ntt(&mut fv, false)?;
    for (a, b) in fu.iter_mut().zip(&fv) {
        *a = f.mul(*a, *b);
    }
    f.ntt(&mut fu, true)?;
    Ok(CyclicPoly {
        q: u.q,
        coeffs: fold(f, &fu, u.q),
    })
}

/// Dense matrix of ring elements sharing one `Q`, stored as one flat buffer
/// of `rows * cols * q` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPolyMatrix {
    rows: usize,
    cols: usize,
    q: usize,
    data: Vec<u64>,
}

impl CyclicPolyMatrix {
    pub fn zero(rows: usize, cols: usize, q: usize) -> Self {
        assert!(q >= 1, "ring order must be positive");
        Self {
            rows,
            cols,
            q,
            data: vec![0; rows * cols * q],
        }
    }

    /// Matrix of monomials `x^(e(i,j) mod q)`, or zero where `e` returns `None`.
    pub fn monomials(
        rows: usize,
        cols: usize,
        q: usize,
        mut e: impl FnMut(usize, usize) -> Option<i64>,
    ) -> Self {
        let mut m = Self::zero(rows, cols, q);
        for i in 0..rows {
            for j in 0..cols {
                if let Some(x) = e(i, j) {
                    let r = x.rem_euclid(q as i64) as usize;
                    m.data[(i * cols + j) * q + r] = 1;
                }
            }
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[CyclicPoly]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} ring entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let q = entries.first().map_or(1, |p| p.q);
        let mut data = Vec::with_capacity(rows * cols * q);
        for p in entries {
            if p.q != q {
                return Err(Error::RingMismatch(q, p.q));
            }
            data.extend_from_slice(&p.coeffs);
        }
        Ok(Self { rows, cols, q, data })
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
    pub fn q(&self) -> usize {
        self.q
    }

    /// Coefficients of entry `(i, j)`.
    #[inline]
    pub fn entry_coeffs(&self, i: usize, j: usize) -> &[u64] {
        let start = (i * self.cols + j) * self.q;
        &self.data[start..start + self.q]
    }

    pub fn entry(&self, i: usize, j: usize) -> CyclicPoly {
        CyclicPoly {
            q: self.q,
            coeffs: self.entry_coeffs(i, j).to_vec(),
        }
    }
}

/// Coefficient of `x^r` in entry `(i, j)`, as an exact count.
pub fn coefficient(pm: &CyclicPolyMatrix, i: usize, j: usize, r: usize) -> Result<u64> {
    if r >= pm.q {
        return Err(Error::OutOfRange {
            index: r,
            limit: pm.q,
        });
    }
    if i >= pm.rows || j >= pm.cols {
        return Err(Error::OutOfRange {
            index: i.max(j),
            limit: pm.rows.min(pm.cols),
        });
    }
    Ok(pm.entry_coeffs(i, j)[r])
}

/// Numeric `m x k` by `k x n` product over the field, row-major buffers.
pub trait MatMulBackend: Sync {
    fn mul(&self, f: &PrimeField, a: &[u64], b: &[u64], m: usize, k: usize, n: usize) -> Vec<u64>;
}

/// Sums at most this many 124-bit products before reducing.
const LAZY_TERMS: usize = 8;

/// Plain triple loop.
#[derive(Clone, Copy, Debug, Default)]
pub struct Schoolbook;

impl MatMulBackend for Schoolbook {
    fn mul(&self, f: &PrimeField, a: &[u64], b: &[u64], m: usize, k: usize, n: usize) -> Vec<u64> {
        let p = f.modulus() as u128;
        let mut out = vec![0u64; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0u128;
                for t in 0..k {
                    acc += a[i * k + t] as u128 * b[t * n + j] as u128;
                    if t % LAZY_TERMS == LAZY_TERMS - 1 {
                        acc %= p;
                    }
                }
                out[i * n + j] = (acc % p) as u64;
            }
        }
        out
    }
}

/// Cache-tiled loop order; same results as [`Schoolbook`].
#[derive(Clone, Copy, Debug)]
pub struct Blocked {
    pub tile: usize,
}

impl Default for Blocked {
    fn default() -> Self {
        Self { tile: 32 }
    }
}

impl MatMulBackend for Blocked {
    fn mul(&self, f: &PrimeField, a: &[u64], b: &[u64], m: usize, k: usize, n: usize) -> Vec<u64> {
        let tile = self.tile.max(1);
        let mut out = vec![0u64; m * n];
        for i0 in (0..m).step_by(tile) {
            for t0 in (0..k).step_by(tile) {
                for j0 in (0..n).step_by(tile) {
                    for i in i0..(i0 + tile).min(m) {
                        for t in t0..(t0 + tile).min(k) {
                            let x = a[i * k + t];
                            if x == 0 {
                                continue;
                            }
                            for j in j0..(j0 + tile).min(n) {
                                let o = &mut out[i * n + j];
                                *o = f.add(*o, f.mul(x, b[t * n + j]));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Matrix product over `F[x]/(x^Q - 1)`: every entry is transformed once at
/// the padded length, one numeric product runs per frequency, and the result
/// is transformed back and folded.
pub fn polymat_mul(
    pm: &CyclicPolyMatrix,
    qm: &CyclicPolyMatrix,
    f: &PrimeField,
    backend: &dyn MatMulBackend,
) -> Result<CyclicPolyMatrix> {
    if pm.cols != qm.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            pm.rows, pm.cols, qm.rows, qm.cols
        )));
    }
    if pm.q != qm.q {
        return Err(Error::RingMismatch(pm.q, qm.q));
    }
    let (m, k, n, q) = (pm.rows, pm.cols, qm.cols, pm.q);
    f.ensure_counts(k as u64 * q as u64)?;
    let len = padded_len(q);

    let spectra = |src: &CyclicPolyMatrix| -> Result<Vec<u64>> {
        let entries = src.rows * src.cols;
        let mut out = vec![0u64; entries * len];
        for e in 0..entries {
            let dst = &mut out[e * len..(e + 1) * len];
            dst[..q].copy_from_slice(&src.data[e * q..(e + 1) * q]);
            f.ntt(dst, false)?;
        }
        Ok(out)
    };
    let fp = spectra(pm)?;
    let fq = spectra(qm)?;

    let mut prod = vec![0u64; m * n * len];
    let mut lhs = vec![0u64; m * k];
    let mut rhs = vec![0u64; k * n];
    for freq in 0..len {
        for (e, x) in lhs.iter_mut().enumerate() {
            *x = fp[e * len + freq];
        }
        for (e, x) in rhs.iter_mut().enumerate() {
            *x = fq[e * len + freq];
        }
        let c = backend.mul(f, &lhs, &rhs, m, k, n);
        for (e, x) in c.into_iter().enumerate() {
            prod[e * len + freq] = x;
        }
    }

    let mut out = CyclicPolyMatrix::zero(m, n, q);
    for e in 0..m * n {
        let spectrum = &mut prod[e * len..(e + 1) * len];
        f.ntt(spectrum, true)?;
        out.data[e * q..(e + 1) * q].copy_from_slice(&fold(f, spectrum, q));
    }
    Ok(out)
}

/// Polynomial in `x` modulo `x^Q - 1` and in `y` of bounded degree.
/// Coefficient of `x^r y^d` lives at `d * q + r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    q: usize,
    y_len: usize,
    data: Vec<u64>,
}

impl BivariatePoly {
    pub fn zero(q: usize, y_len: usize) -> Self {
        assert!(q >= 1, "ring order must be positive");
        Self {
            q,
            y_len,
            data: vec![0; q * y_len],
        }
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    /// One more than the largest representable `y` degree.
    #[inline]
    pub fn y_len(&self) -> usize {
        self.y_len
    }

    #[inline]
    pub fn coeff(&self, r: usize, d: usize) -> u64 {
        self.data[d * self.q + r]
    }

    /// Adds `c * x^(e mod q) y^d`.
    pub fn add_term(&mut self, f: &PrimeField, e: i64, d: usize, c: u64) {
        let r = e.rem_euclid(self.q as i64) as usize;
        let slot = &mut self.data[d * self.q + r];
        *slot = f.add(*slot, c % f.modulus());
    }

    pub fn add(&self, other: &Self, f: &PrimeField) -> Result<Self> {
        self.zip(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self, f: &PrimeField) -> Result<Self> {
        self.zip(other, |a, b| f.sub(a, b))
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::RingMismatch(self.q, other.q));
        }
        let y_len = self.y_len.max(other.y_len);
        let mut out = Self::zero(self.q, y_len);
        for (idx, slot) in out.data.iter_mut().enumerate() {
            let a = self.data.get(idx).copied().unwrap_or(0);
            let b = other.data.get(idx).copied().unwrap_or(0);
            *slot = op(a, b);
        }
        Ok(out)
    }
}

/// Product of two bivariate polynomials. The `(x, y)` exponents are packed
/// into one transform with an `x` stride of `2q - 1`, wide enough that the
/// unreduced `x` degrees of a product never spill into the next `y` slot.
pub fn bivariate_mul(a: &BivariatePoly, b: &BivariatePoly, f: &PrimeField) -> Result<BivariatePoly> {
    if a.q != b.q {
        return Err(Error::RingMismatch(a.q, b.q));
    }
    let q = a.q;
    if a.y_len == 0 || b.y_len == 0 {
        return Ok(BivariatePoly::zero(q, 0));
    }
    let stride = 2 * q - 1;
    let pack = |p: &BivariatePoly| {
        let mut v = vec![0u64; stride * p.y_len];
        for d in 0..p.y_len {
            v[d * stride..d * stride + q].copy_from_slice(&p.data[d * q..(d + 1) * q]);
        }
        v
    };
    let linear = f.convolve(&pack(a), &pack(b))?;
    let y_len = a.y_len + b.y_len - 1;
    let mut out = BivariatePoly::zero(q, y_len);
    for (e, &c) in linear.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (d, x) = (e / stride, e % stride);
        let slot = &mut out.data[d * q + x % q];
        *slot = f.add(*slot, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    #[test]
    fn monomial_products() {
        let p = cyclic_convolve(&CyclicPoly::monomial(5, 1), &CyclicPoly::monomial(5, 2), &f()).unwrap();
        assert_eq!(p, CyclicPoly::monomial(5, 3));
        let p = cyclic_convolve(&CyclicPoly::monomial(5, 3), &CyclicPoly::monomial(5, 4), &f()).unwrap();
        assert_eq!(p, CyclicPoly::monomial(5, 2));
    }

    #[test]
    fn binomial_square() {
        let one_plus_x = CyclicPoly::from_coeffs(&f(), vec![1, 1, 0]);
        let sq = cyclic_convolve(&one_plus_x, &one_plus_x, &f()).unwrap();
        assert_eq!(sq.coeffs(), &[1, 2, 1]);
    }

    #[test]
    fn mismatched_orders_rejected() {
        let r = cyclic_convolve(&CyclicPoly::zero(3), &CyclicPoly::zero(4), &f());
        assert_eq!(r, Err(Error::RingMismatch(3, 4)));
    }

    #[test]
    fn one_by_one_matrix_product() {
        let a = CyclicPolyMatrix::monomials(1, 1, 7, |_, _| Some(5));
        let b = CyclicPolyMatrix::monomials(1, 1, 7, |_, _| Some(4));
        let c = polymat_mul(&a, &b, &f(), &Schoolbook).unwrap();
        assert_eq!(c.entry(0, 0), CyclicPoly::monomial(7, 2));
    }

    #[test]
    fn identity_leaves_matrix_unchanged() {
        let id = CyclicPolyMatrix::monomials(3, 3, 4, |i, j| (i == j).then_some(0));
        let b = CyclicPolyMatrix::monomials(3, 2, 4, |i, j| Some((i * 3 + j) as i64));
        assert_eq!(polymat_mul(&id, &b, &f(), &Schoolbook).unwrap(), b);
        assert_eq!(polymat_mul(&id, &b, &f(), &Blocked { tile: 2 }).unwrap(), b);
    }

    #[test]
    fn coefficient_counts_matches() {
        let a = CyclicPolyMatrix::monomials(1, 2, 5, |_, _| Some(1));
        let b = CyclicPolyMatrix::monomials(2, 1, 5, |_, _| Some(1));
        let c = polymat_mul(&a, &b, &f(), &Schoolbook).unwrap();
        assert_eq!(coefficient(&c, 0, 0, 2).unwrap(), 2);
        assert_eq!(coefficient(&c, 0, 0, 3).unwrap(), 0);
        assert!(coefficient(&c, 0, 0, 5).is_err());
    }

    #[test]
    fn bivariate_wraps_x_but_not_y() {
        let fld = f();
        let mut a = BivariatePoly::zero(3, 2);
        a.add_term(&fld, 2, 1, 1);
        let mut b = BivariatePoly::zero(3, 3);
        b.add_term(&fld, 2, 2, 1);
        b.add_term(&fld, 0, 0, 1);
        let c = bivariate_mul(&a, &b, &fld).unwrap();
        assert_eq!(c.y_len(), 4);
        // x^2 y * x^2 y^2 = x^4 y^3 = x y^3
        assert_eq!(c.coeff(1, 3), 1);
        assert_eq!(c.coeff(2, 1), 1);
        let total: u64 = (0..3).flat_map(|r| (0..4).map(move |d| (r, d))).map(|(r, d)| c.coeff(r, d)).sum();
        assert_eq!(total, 2);
    }
}
