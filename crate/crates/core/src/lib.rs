//! Counting gaps between consecutive elements of `U(n) = (Z/nZ)^×`.
//!
//! The crate is layered:
//!
//! - [`residue`]: canonical residues, circle distance and consecutiveness.
//! - [`config`]: configurations over an explicit subset `E` of `Z/nZ`,
//!   their cores, and the inclusion-exclusion count of consecutive
//!   occurrences, with a direct scan as oracle.
//! - [`totient`]: the CRT product for `ν(T, U(P), P)` with square-free `P`,
//!   Euler's `φ` and Nagell's `θ`.
//! - [`gaps`]: coefficient listings and `K(D, p#)`, the number of gaps of
//!   length `D` between consecutive units modulo a primorial.
//! - [`sieve`]: reference counts by enumerating `U(p#)`.
//!
//! ```
//! use gapcensus::gaps::gap_count;
//!
//! // gaps of length 6 between consecutive units modulo 7# = 210
//! assert_eq!(gap_count(6, 7).unwrap(), 14u32.into());
//! ```

pub mod config;
pub mod error;
pub mod gaps;
pub mod primes;
pub mod residue;
pub mod sieve;
pub mod totient;

pub use config::{Configuration, ConfigurationComplement};
pub use error::{Error, Result};
pub use gaps::{EnumerationBudget, GapCensus, GapCoefficientListing, GapEngine, GapTable, Method};
pub use residue::{Gap, Residue, ResidueSubset, RingContext};
pub use sieve::SieveConfig;
pub use totient::{PrimorialModulus, SquareFreeModulus};
