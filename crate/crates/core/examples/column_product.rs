//! Column-monotone product under both verification engines.

use monotone_minplus::gen::{free_matrix, rng_for, row_monotone_matrix, Family};
use monotone_minplus::{minplus_monotone_col, minplus_product_naive, Engine, MonotoneTag, SolverConfig};

fn main() -> monotone_minplus::Result<()> {
    let (n, bound) = (16, 40);
    let mut rng = rng_for(11);
    let a = free_matrix(&mut rng, n, n, bound, Family::BoundedDifference);
    // Sorted rows, transposed: every column of B is non-decreasing.
    let b = row_monotone_matrix(&mut rng, n, n, bound, Family::BoundedDifference).transpose();
    let want = minplus_product_naive(&a, &b)?;

    for engine in [Engine::Verification, Engine::Direct] {
        let cfg = SolverConfig {
            engine,
            ..SolverConfig::default()
        };
        let c = minplus_monotone_col(&a, &b, &MonotoneTag::column(bound)?, &cfg)?;
        assert_eq!(c, want);
        println!("{engine:?}: C[0] = {:?}", c.row(0));
    }
    Ok(())
}
