//! Arithmetic in F[x]/(x^Q - 1): matrices of cyclic polynomials and
//! bivariate products.

use monotone_minplus::field::PrimeField;
use monotone_minplus::polyring::{bivariate_mul, coefficient, polymat_mul, BivariatePoly, Blocked, CyclicPolyMatrix};

fn main() -> monotone_minplus::Result<()> {
    let f = PrimeField::default();
    let q = 7;
    // x^(A_ik) times x^(B_kj), summed over k, counts k by A_ik + B_kj mod q.
    let a = [[1i64, 4], [2, 9]];
    let b = [[3i64, 5], [0, 6]];
    let pa = CyclicPolyMatrix::monomials(2, 2, q, |i, k| Some(a[i][k]));
    let pb = CyclicPolyMatrix::monomials(2, 2, q, |k, j| Some(b[k][j]));
    let p = polymat_mul(&pa, &pb, &f, &Blocked::default())?;
    for r in 0..q {
        println!("[0][0] sums congruent to {r}: {}", coefficient(&p, 0, 0, r)?);
    }

    let mut u = BivariatePoly::zero(q, 2);
    u.add_term(&f, 3, 0, 1);
    u.add_term(&f, 5, 1, 2);
    let mut v = BivariatePoly::zero(q, 2);
    v.add_term(&f, 6, 1, 1);
    let w = bivariate_mul(&u, &v, &f)?;
    println!("x^3 (1 + 2x^2 y) * x^6 y = {} x^2 y + {} x^4 y^2", w.coeff(2, 1), w.coeff(4, 2));
    Ok(())
}
