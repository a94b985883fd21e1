//! Solver configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::polyring::{Blocked, MatMulBackend, Schoolbook};

/// Parameters used to balance the modulus `M` against matrix dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceConfig {
    /// Exponent of the numeric matrix product backend (3.0 for the classical one).
    pub omega: f64,
    pub m_min: i64,
    pub m_max: i64,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self {
            omega: 3.0,
            m_min: 100,
            m_max: 1_000_000,
        }
    }
}

/// Which solver answers each candidate's verification problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// Residue shifting plus the modular-counting verification solver.
    Verification,
    /// Direct scan over the common refinement of constant intervals.
    Direct,
    /// Pick whichever has the smaller estimated cost.
    Auto,
}

/// How congruence counts and Y-tables are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountingRoute {
    /// Accumulate the monomial products entry by entry.
    Monomial,
    /// Ring products through per-frequency numeric matrix products.
    Transform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Schoolbook,
    Blocked,
}

impl Backend {
    pub fn get(self) -> &'static dyn MatMulBackend {
        static SCHOOLBOOK: Schoolbook = Schoolbook;
        static BLOCKED: Blocked = Blocked { tile: 32 };
        match self {
            Backend::Schoolbook => &SCHOOLBOOK,
            Backend::Blocked => &BLOCKED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub balance: BalanceConfig,
    pub engine: Engine,
    pub counting: CountingRoute,
    pub backend: Backend,
    /// Fixed promise modulus instead of the balanced choice.
    pub m: Option<i64>,
    /// Fixed prime range parameter instead of the size-based default.
    pub r: Option<u64>,
    /// Good-modulus audit slack; `None` uses `64 * (1 + log2 n)^2`.
    pub slack: Option<f64>,
    /// Treat a failed good-modulus audit as an error instead of a warning.
    pub strict_audit: bool,
    /// Search one modulus per candidate and reuse it across residue classes.
    pub fast_shared_modulus: bool,
    pub parallel: bool,
    pub field: PrimeField,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            balance: BalanceConfig::default(),
            engine: Engine::Verification,
            counting: CountingRoute::Monomial,
            backend: Backend::Schoolbook,
            m: None,
            r: None,
            slack: None,
            strict_audit: false,
            fast_shared_modulus: false,
            parallel: false,
            field: PrimeField::default(),
        }
    }
}

impl SolverConfig {
    /// Configuration used by the test suites: audits are hard failures.
    pub fn strict() -> Self {
        Self {
            strict_audit: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.m {
            check_promise_modulus(m)?;
        }
        if let Some(r) = self.r {
            if r < 4 {
                return Err(Error::Config(format!("R = {r} must be at least 4")));
            }
        }
        if let Some(s) = self.slack {
            if !(s > 0.0) {
                return Err(Error::Config(format!("slack {s} must be positive")));
            }
        }
        if !(self.balance.omega > 0.0) {
            return Err(Error::Config("omega must be positive".into()));
        }
        check_promise_modulus(self.balance.m_min)?;
        if self.balance.m_max < self.balance.m_min {
            return Err(Error::Config("m_max below m_min".into()));
        }
        Ok(())
    }

    /// Audit slack for an instance whose largest dimension is `n`.
    pub fn slack_for(&self, n: usize) -> f64 {
        self.slack.unwrap_or_else(|| {
            let l = 1.0 + (n.max(1) as f64).log2();
            64.0 * l * l
        })
    }
}

pub(crate) fn check_promise_modulus(m: i64) -> Result<()> {
    if m <= 0 || m % 100 != 0 {
        return Err(Error::InvalidPromiseModulus(m));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_slack() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.slack_for(1), 64.0);
        assert_eq!(cfg.slack_for(8), 64.0 * 16.0);
    }

    #[test]
    fn validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            m: Some(150),
            ..SolverConfig::default()
        };
        assert_eq!(bad.validate(), Err(Error::InvalidPromiseModulus(150)));
        let bad = SolverConfig {
            r: Some(3),
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
