//! The file-level workflow: generate, solve, check against the oracle.

use monotone_minplus::format::{InstanceFile, Kind};
use monotone_minplus::gen::{gen, Family};
use monotone_minplus::harness::{check, run, RunEngine, DEFAULT_ORACLE_LIMIT};
use monotone_minplus::SolverConfig;

fn main() -> monotone_minplus::Result<()> {
    let cfg = SolverConfig::default();
    for kind in Kind::ALL {
        let file = gen(kind, 12, 30, 42, Family::AdversarialTies)?;
        // Round-trip through the on-disk text form.
        let file = InstanceFile::parse(&file.to_canonical())?;
        let out = run(&file, RunEngine::Det, &cfg)?;
        let verdict = check(&file, Some(&out.output), &cfg, DEFAULT_ORACLE_LIMIT)?;
        println!(
            "{:<12} {} {}",
            kind.name(),
            if verdict.pass { "PASS" } else { "FAIL" },
            &out.report.checksum[..16]
        );
    }
    Ok(())
}
