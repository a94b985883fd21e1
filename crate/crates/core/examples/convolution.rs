//! Min-Plus convolution of two non-decreasing arrays.

use monotone_minplus::convolution::minplus_conv_monotone_with_stats;
use monotone_minplus::gen::{monotone_row, rng_for, Family};
use monotone_minplus::{minplus_convolution_naive, IntArray, MonotoneTag, SolverConfig};

fn main() -> monotone_minplus::Result<()> {
    let (n, bound) = (200, 800);
    let mut rng = rng_for(3);
    let a = IntArray::new(monotone_row(&mut rng, n, bound, Family::Staircase));
    let b = IntArray::new(monotone_row(&mut rng, n, bound, Family::UniformMonotone));

    let (c, stats) = minplus_conv_monotone_with_stats(&a, &b, &MonotoneTag::array(bound)?, &SolverConfig::default())?;
    assert_eq!(c, minplus_convolution_naive(&a, &b)?);

    // Output index k starts at 2, as in one-based A_i + B_{k-i}.
    println!("C_2..C_11 = {:?}", &c.as_slice()[..10]);
    println!("engine {}, moduli {:?}", stats.engine, stats.moduli);
    Ok(())
}
