//! The prime-by-prime search for a good modulus, with the brute-force
//! check that the computable counts cancel exactly.

use monotone_minplus::format::Kind;
use monotone_minplus::gen::{gen, Family};
use monotone_minplus::harness::{stats, DEFAULT_ORACLE_LIMIT};
use monotone_minplus::SolverConfig;

fn main() -> monotone_minplus::Result<()> {
    let file = gen(Kind::VerifyRow, 12, 400, 1, Family::UniformMonotone)?;
    let s = stats(&file, &SolverConfig::default(), true, DEFAULT_ORACLE_LIMIT)?;

    let r = &s.modulus;
    println!("M = {}, R = {}, pool of {} primes", r.m, r.r, r.pool.len());
    for step in &r.steps {
        println!("Q' = {:>6}  chose p = {}", step.q_prev, step.chosen);
    }
    println!("Q sequence {:?}, first crossing holds: {}", r.q_seq, s.first_crossing);
    for level in &s.levels {
        println!("level {}: {} active segments", level.level, level.active);
    }
    println!("X = Y - Z at all {} (prime, level) pairs: {}", s.identity.len(), s.identity_holds);
    Ok(())
}
