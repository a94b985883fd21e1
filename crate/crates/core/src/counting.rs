//! Congruence counting.
//!
//! Two interchangeable routes produce the same numbers. The monomial route
//! accumulates the monomial products position by position; the transform
//! route builds the monomial ring matrices (or bivariate polynomials) and
//! multiplies them through [`polymat_mul`] / [`bivariate_mul`].

use crate::config::{CountingRoute, SolverConfig};
use crate::error::Result;
use crate::field::PrimeField;
use crate::instance::{ConvVerificationInstance, Variant, VerificationInstance};
use crate::modulus::{compute_W, LineY, PrimePool, YSource, YTable};
use crate::polyring::{bivariate_mul, polymat_mul, BivariatePoly, CyclicPolyMatrix, MatMulBackend};
use crate::segments::{CellMap, ConvLines, Lines, MatrixLines};

/// Positions with `Delta = 0 (mod q)`, counted per output cell.
pub fn count_congruent<L: Lines + ?Sized>(lines: &L, q: u64, map: CellMap, ncells: usize) -> Vec<u64> {
    let q = q as i64;
    let mut out = vec![0u64; ncells];
    for l in 0..lines.line_count() {
        let w = lines.window(l);
        for p in w.start..=w.end {
            if lines.delta(l, p).rem_euclid(q) == 0 {
                out[map.cell(l, &w, p)] += 1;
            }
        }
    }
    out
}

/// Congruence counts of a matrix instance through ring matrix products.
///
/// Row variant: coefficient of `x^(C[i][j] mod q)` in `(A' B')[i][j]`.
/// Col variant: coefficient of `x^(-A[i][k] mod q)` in `(B' C'^T)[k][i]`,
/// where `C'` carries exponents `-C`.
pub fn congruent_matrix_transform(
    inst: &VerificationInstance,
    q: u64,
    field: &PrimeField,
    backend: &dyn MatMulBackend,
) -> Result<Vec<u64>> {
    let (a, b, c) = (inst.a(), inst.b(), inst.c());
    let qs = q as usize;
    let qi = q as i64;
    match inst.variant() {
        Variant::Row => {
            let ap = CyclicPolyMatrix::monomials(a.rows(), a.cols(), qs, |i, k| Some(a.get(i, k)));
            let bp = CyclicPolyMatrix::monomials(b.rows(), b.cols(), qs, |k, j| Some(b.get(k, j)));
            let prod = polymat_mul(&ap, &bp, field, backend)?;
            let mut out = Vec::with_capacity(c.rows() * c.cols());
            for i in 0..c.rows() {
                for j in 0..c.cols() {
                    out.push(prod.entry_coeffs(i, j)[c.get(i, j).rem_euclid(qi) as usize]);
                }
            }
            Ok(out)
        }
        Variant::Col => {
            let bp = CyclicPolyMatrix::monomials(b.rows(), b.cols(), qs, |k, j| Some(b.get(k, j)));
            let ct = CyclicPolyMatrix::monomials(c.cols(), c.rows(), qs, |j, i| Some(-c.get(i, j)));
            let prod = polymat_mul(&bp, &ct, field, backend)?;
            let mut out = Vec::with_capacity(a.rows() * a.cols());
            for i in 0..a.rows() {
                for k in 0..a.cols() {
                    out.push(prod.entry_coeffs(k, i)[(-a.get(i, k)).rem_euclid(qi) as usize]);
                }
            }
            Ok(out)
        }
    }
}

fn array_poly(field: &PrimeField, q: usize, xs: &[i64], keep: impl Fn(usize) -> bool) -> BivariatePoly {
    let mut p = BivariatePoly::zero(q, xs.len());
    for (i, &x) in xs.iter().enumerate() {
        if keep(i) {
            p.add_term(field, x, i, 1);
        }
    }
    p
}

/// `s_k`: coefficient of `x^(C_k mod q) y^k` in `P_A * P_B`.
pub fn congruent_conv_transform(inst: &ConvVerificationInstance, q: u64, field: &PrimeField) -> Result<Vec<u64>> {
    let qs = q as usize;
    let pa = array_poly(field, qs, inst.a().as_slice(), |_| true);
    let pb = array_poly(field, qs, inst.b().as_slice(), |_| true);
    let prod = bivariate_mul(&pa, &pb, field)?;
    Ok(inst
        .c()
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &c)| prod.coeff(c.rem_euclid(q as i64) as usize, k))
        .collect())
}

/// Y-table of a matrix instance via the boundary-indicator ring products.
pub struct MatrixTransformY<'a> {
    pub inst: &'a VerificationInstance,
    pub field: PrimeField,
    pub backend: &'a dyn MatMulBackend,
}

impl YSource for MatrixTransformY<'_> {
    fn y_table(&self, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable> {
        let (a, b, c) = (self.inst.a(), self.inst.b(), self.inst.c());
        let (na, nb, nc) = (a.rows(), a.cols(), b.cols());
        let mut table = YTable::zeros(pool.primes(), lmax as usize + 1);
        for (idx, &p) in pool.primes().iter().enumerate() {
            let q = q_prev * p;
            let qs = q as usize;
            let ap = CyclicPolyMatrix::monomials(na, nb, qs, |i, k| Some(a.get(i, k)));
            let bp = CyclicPolyMatrix::monomials(nb, nc, qs, |k, j| Some(b.get(k, j)));
            let d_all = polymat_mul(&ap, &bp, &self.field, self.backend)?;
            for level in 0..=lmax {
                let starts = |x: &crate::matrix::IntMatrix, r: usize, j: usize| {
                    j == 0 || x.get(r, j - 1) >> level != x.get(r, j) >> level
                };
                let b_bdry =
                    CyclicPolyMatrix::monomials(nb, nc, qs, |k, j| starts(b, k, j).then(|| b.get(k, j)));
                let d_bdry = polymat_mul(&ap, &b_bdry, &self.field, self.backend)?;
                let w = compute_W(level, q);
                let mut y = 0u64;
                for i in 0..na {
                    for j in 0..nc {
                        let d = if starts(c, i, j) { &d_all } else { &d_bdry };
                        let cij = c.get(i, j);
                        for (r, &u) in d.entry_coeffs(i, j).iter().enumerate() {
                            if u != 0 {
                                y += u * w[(r as i64 - cij).rem_euclid(q as i64) as usize];
                            }
                        }
                    }
                }
                table.y[level as usize][idx] = y;
            }
        }
        Ok(table)
    }
}

/// Y-table of a convolution instance via inclusion-exclusion over
/// bivariate boundary products, summed over the selected diagonals.
pub struct ConvTransformY<'a> {
    pub inst: &'a ConvVerificationInstance,
    pub field: PrimeField,
    /// Diagonals (0-based `k`) that contribute; `None` means all.
    pub diagonals: Option<&'a [bool]>,
}

impl YSource for ConvTransformY<'_> {
    fn y_table(&self, q_prev: u64, pool: &PrimePool, lmax: u32) -> Result<YTable> {
        let f = &self.field;
        let a = self.inst.a().as_slice();
        let b = self.inst.b().as_slice();
        let c = self.inst.c().as_slice();
        let n = a.len();
        let mut table = YTable::zeros(pool.primes(), lmax as usize + 1);
        for (idx, &p) in pool.primes().iter().enumerate() {
            let q = q_prev * p;
            let qs = q as usize;
            let pa_all = array_poly(f, qs, a, |_| true);
            let pb_all = array_poly(f, qs, b, |_| true);
            for level in 0..=lmax {
                let ia = |i: usize| i == 0 || a[i - 1] >> level != a[i] >> level;
                let ib = |j: usize| j == n - 1 || b[j + 1] >> level != b[j] >> level;
                let pa_b = array_poly(f, qs, a, ia);
                let pb_b = array_poly(f, qs, b, ib);
                let u = bivariate_mul(&pa_b, &pb_all, f)?
                    .add(&bivariate_mul(&pa_all, &pb_b, f)?, f)?
                    .sub(&bivariate_mul(&pa_b, &pb_b, f)?, f)?;
                let w = compute_W(level, q);
                let mut y = 0u64;
                for (k, &ck) in c.iter().enumerate() {
                    if self.diagonals.is_some_and(|d| !d[k]) {
                        continue;
                    }
                    for r in 0..qs {
                        let cnt = u.coeff(r, k);
                        if cnt != 0 {
                            y += cnt * w[(r as i64 - ck).rem_euclid(q as i64) as usize];
                        }
                    }
                }
                table.y[level as usize][idx] = y;
            }
        }
        Ok(table)
    }
}

/// Y-table of a matrix instance by the configured route.
#[allow(non_snake_case)]
pub fn compute_Y_all_matrix(
    inst: &VerificationInstance,
    q_prev: u64,
    pool: &PrimePool,
    lmax: u32,
    cfg: &SolverConfig,
) -> Result<YTable> {
    match cfg.counting {
        CountingRoute::Monomial => LineY::new(&MatrixLines::full(inst, inst.m()), lmax).y_table(q_prev, pool, lmax),
        CountingRoute::Transform => MatrixTransformY {
            inst,
            field: cfg.field,
            backend: cfg.backend.get(),
        }
        .y_table(q_prev, pool, lmax),
    }
}

/// Y-table of a convolution instance by the configured route.
#[allow(non_snake_case)]
pub fn compute_Y_all_conv(
    inst: &ConvVerificationInstance,
    q_prev: u64,
    pool: &PrimePool,
    lmax: u32,
    cfg: &SolverConfig,
) -> Result<YTable> {
    match cfg.counting {
        CountingRoute::Monomial => LineY::new(&ConvLines::full(inst, inst.m()), lmax).y_table(q_prev, pool, lmax),
        CountingRoute::Transform => ConvTransformY {
            inst,
            field: cfg.field,
            diagonals: None,
        }
        .y_table(q_prev, pool, lmax),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{IntArray, IntMatrix};
    use crate::modulus::primes_in_range;
    use crate::polyring::Schoolbook;

    fn inst(a: &[&[i64]], b: &[&[i64]], c: &[&[i64]], variant: Variant) -> VerificationInstance {
        VerificationInstance::new(
            IntMatrix::from_rows(a).unwrap(),
            IntMatrix::from_rows(b).unwrap(),
            IntMatrix::from_rows(c).unwrap(),
            100,
            variant,
        )
        .unwrap()
    }

    #[test]
    fn congruence_examples() {
        let f = PrimeField::default();
        let x = inst(&[&[1]], &[&[2]], &[&[3]], Variant::Row);
        assert_eq!(congruent_matrix_transform(&x, 5, &f, &Schoolbook).unwrap(), vec![1]);

        let x = inst(&[&[1, 6]], &[&[2], &[2]], &[&[3]], Variant::Row);
        assert_eq!(congruent_matrix_transform(&x, 5, &f, &Schoolbook).unwrap(), vec![2]);
        assert_eq!(congruent_matrix_transform(&x, 7, &f, &Schoolbook).unwrap(), vec![1]);
        let lines = MatrixLines::full(&x, 100);
        assert_eq!(count_congruent(&lines, 5, CellMap::Along { stride: 1 }, 1), vec![2]);
    }

    #[test]
    fn column_counts_agree() {
        let f = PrimeField::default();
        let x = inst(&[&[1, 6], &[0, 3]], &[&[2, 3, 9], &[2, 4, 4]], &[&[3, 8, 9], &[1, 2, 7]], Variant::Col);
        let lines = MatrixLines::full(&x, 100);
        for q in [1, 2, 5, 7] {
            assert_eq!(
                congruent_matrix_transform(&x, q, &f, &Schoolbook).unwrap(),
                count_congruent(&lines, q, CellMap::PerLine { stride: 2 }, 4)
            );
        }
    }

    #[test]
    fn conv_counts() {
        let f = PrimeField::default();
        let x = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2]),
            IntArray::new(vec![1, 1]),
            IntArray::new(vec![2, 2, 3]),
            100,
        )
        .unwrap();
        assert_eq!(congruent_conv_transform(&x, 5, &f).unwrap(), vec![1, 1, 1]);
        assert_eq!(congruent_conv_transform(&x, 1, &f).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn y_routes_agree_on_small_instances() {
        let x = inst(
            &[&[0, 100], &[205, 1]],
            &[&[1, 2, 8, 9], &[100, 103, 110, 200]],
            &[&[4, 100, 101, 300], &[0, 0, 5, 9]],
            Variant::Row,
        );
        let pool = primes_in_range(16).unwrap();
        let mono = SolverConfig::default();
        let tr = SolverConfig {
            counting: CountingRoute::Transform,
            ..SolverConfig::default()
        };
        for q_prev in [1, 11] {
            assert_eq!(
                compute_Y_all_matrix(&x, q_prev, &pool, 3, &mono).unwrap(),
                compute_Y_all_matrix(&x, q_prev, &pool, 3, &tr).unwrap()
            );
        }

        let y = ConvVerificationInstance::new(
            IntArray::new(vec![1, 2, 9, 100]),
            IntArray::new(vec![0, 0, 8, 210]),
            IntArray::new(vec![1, 5, 9, 10, 100, 200, 301]),
            100,
        )
        .unwrap();
        for q_prev in [1, 13] {
            assert_eq!(
                compute_Y_all_conv(&y, q_prev, &pool, 3, &mono).unwrap(),
                compute_Y_all_conv(&y, q_prev, &pool, 3, &tr).unwrap()
            );
        }
    }
}
