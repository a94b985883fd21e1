//! Min-Plus product with a row-monotone right factor, checked against the
//! cubic double loop.

use monotone_minplus::gen::{free_matrix, rng_for, row_monotone_matrix, Family};
use monotone_minplus::product_row::minplus_monotone_row_with_stats;
use monotone_minplus::{minplus_product_naive, MonotoneTag, SolverConfig};

fn main() -> monotone_minplus::Result<()> {
    let (n, bound) = (24, 48);
    let mut rng = rng_for(7);
    let a = free_matrix(&mut rng, n, n, bound, Family::UniformMonotone);
    let b = row_monotone_matrix(&mut rng, n, n, bound, Family::UniformMonotone);

    let (c, stats) = minplus_monotone_row_with_stats(&a, &b, &MonotoneTag::row(bound)?, &SolverConfig::default())?;
    assert_eq!(c, minplus_product_naive(&a, &b)?);

    println!("first output row: {:?}", c.row(0));
    println!(
        "engine {}, {} levels, {} verification calls, moduli {:?}",
        stats.engine, stats.levels, stats.verification_calls, stats.moduli
    );
    Ok(())
}
