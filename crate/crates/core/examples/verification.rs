//! Deciding which cells of a candidate answer have an exact witness, on a
//! promised instance whose residues modulo M are at most M/10.

use monotone_minplus::gen::rng_for;
use monotone_minplus::instance::{Variant, VerificationInstance};
use monotone_minplus::product_row::solve_verification_row_detailed;
use monotone_minplus::{minplus_product_naive, IntMatrix, SolverConfig};
use rand::Rng;

fn main() -> monotone_minplus::Result<()> {
    let (n, m) = (10, 100);
    let mut rng = rng_for(5);
    // Residues: A in [1, 4], B in [0, 3], so C's lie in [1, 7] and stay
    // promised after the rows below are lowered by one.
    let mut entry = |lo: i64| lo * m + rng.gen_range(1..=4);
    let a = IntMatrix::from_fn(n, n, |_, _| entry(0));
    let b = IntMatrix::from_fn(n, n, |k, j| (j as i64 / 3) * m + (j % 3) as i64 + (k % 2) as i64);
    let mut c = minplus_product_naive(&a, &b)?;
    for i in [2, 7] {
        c.row_mut(i).iter_mut().for_each(|x| *x -= 1);
    }

    let inst = VerificationInstance::new(a, b, c, m, Variant::Row)?;
    let r = solve_verification_row_detailed(&inst, &SolverConfig::strict())?;
    println!("M = {m}, good modulus Q = {}", r.detail.report.q);
    for i in 0..n {
        let row: String = (0..n).map(|j| if r.mask.get(i, j) { '#' } else { '.' }).collect();
        println!("{row}");
    }
    Ok(())
}
