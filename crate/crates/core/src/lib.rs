//! Deterministic Min-Plus products of row- or column-monotone matrices and
//! Min-Plus convolution of monotone arrays.
//!
//! Every solver reduces the problem, by halving the entries, to verifying
//! three candidate answers per level. A candidate is verified through
//! residue shifting into instances whose entries all have small residues
//! modulo `M`, where congruence counts modulo a deterministically chosen
//! product of small primes `Q` separate true matches from spurious ones.
//!
//! ```
//! use monotone_minplus::{minplus_monotone_row, IntMatrix, MonotoneTag, SolverConfig};
//!
//! let a = IntMatrix::from_rows(&[[0, 1], [2, 0]]).unwrap();
//! let b = IntMatrix::from_rows(&[[1, 2], [1, 2]]).unwrap();
//! let c = minplus_monotone_row(&a, &b, &MonotoneTag::row(2).unwrap(), &SolverConfig::default()).unwrap();
//! assert_eq!(c.to_rows(), vec![vec![1, 2], vec![1, 2]]);
//! ```

pub mod config;
pub mod convolution;
pub mod counting;
pub mod error;
pub mod field;
pub mod format;
pub mod gen;
pub mod harness;
pub mod instance;
pub mod matrix;
pub mod modulus;
pub mod naive;
pub mod polyring;
pub mod product_col;
pub mod product_row;
pub mod reduction;
pub mod segments;
pub mod verify;

pub use config::{Backend, BalanceConfig, CountingRoute, Engine, SolverConfig};
pub use convolution::{minplus_conv_monotone, solve_verification_conv};
pub use error::{Error, Result};
pub use instance::{ConvVerificationInstance, Variant, VerificationInstance};
pub use matrix::{IntArray, IntMatrix, MonotoneTag, WitnessMask};
pub use modulus::{find_good_modulus, ModulusReport};
pub use naive::{minplus_convolution_naive, minplus_product_naive};
pub use product_col::{minplus_monotone_col, solve_verification_col, twopointer_direct};
pub use product_row::{minplus_monotone_row, solve_verification_row};
pub use verify::SolveStats;
