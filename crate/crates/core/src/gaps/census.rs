use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::primorial;
use crate::totient::{euler_phi, PrimorialModulus};

/// How a count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Coefficient listing evaluated at `p`.
    Formula,
    /// Enumeration of `U(p#)`.
    Oracle,
    /// Inclusion-exclusion over every relevant prime, or a scan.
    Direct,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Formula => "formula",
            Method::Oracle => "oracle",
            Method::Direct => "direct",
        })
    }
}

/// Gap counts `K(D, p#)` for one prime `p`. Only nonzero counts are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCensus {
    p: u64,
    modulus: BigUint,
    entries: BTreeMap<u64, BigUint>,
    complete: bool,
    method: Method,
}

/// The two identities a complete census satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Checksums {
    /// `Σ K(D, P) = φ(P)`.
    pub count_matches_phi: bool,
    /// `Σ D·K(D, P) = P`.
    pub weighted_matches_modulus: bool,
}

impl Checksums {
    pub fn ok(&self) -> bool {
        self.count_matches_phi && self.weighted_matches_modulus
    }
}

impl GapCensus {
    pub fn new(p: u64, entries: BTreeMap<u64, BigUint>, complete: bool, method: Method) -> Self {
        let entries = entries.into_iter().filter(|(_, k)| !k.is_zero()).collect();
        Self {
            p,
            modulus: primorial(p),
            entries,
            complete,
            method,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn entries(&self) -> &BTreeMap<u64, BigUint> {
        &self.entries
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `K(D, P)`: the stored value, zero for gaps absent from a complete
    /// census, `None` when the census is partial and says nothing about `D`.
    pub fn count(&self, gap: u64) -> Option<BigUint> {
        match self.entries.get(&gap) {
            Some(k) => Some(k.clone()),
            None if self.complete => Some(BigUint::zero()),
            None => None,
        }
    }

    pub fn total_gaps(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn weighted_total(&self) -> BigUint {
        self.entries.iter().map(|(&d, k)| k * d).sum()
    }

    pub fn checksums(&self) -> Checksums {
        let phi = PrimorialModulus::new(self.p)
            .map(|m| euler_phi(m.as_square_free()))
            .unwrap_or_default();
        Checksums {
            count_matches_phi: self.total_gaps() == phi,
            weighted_matches_modulus: self.weighted_total() == self.modulus,
        }
    }

    /// Largest gap with a nonzero count, without requiring completeness.
    pub fn largest_observed(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    /// Largest gap between consecutive units of `p#`.
    pub fn max_gap(&self) -> Result<u64> {
        if !self.complete {
            return Err(Error::IncompleteCensus(self.p));
        }
        self.largest_observed()
            .ok_or(Error::IncompleteCensus(self.p))
    }

    /// One export record per stored gap length.
    pub fn records(&self) -> Vec<CensusRecord> {
        let sums = self.checksums();
        self.entries
            .iter()
            .map(|(&gap, count)| CensusRecord {
                record: "census_entry",
                method: self.method,
                p: self.p,
                modulus: self.modulus.to_string(),
                gap,
                count: count.to_string(),
                complete: self.complete,
                checksums: sums,
            })
            .collect()
    }
}

/// Census export row; big integers travel as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub record: &'static str,
    pub method: Method,
    pub p: u64,
    #[serde(rename = "P")]
    pub modulus: String,
    #[serde(rename = "D")]
    pub gap: u64,
    #[serde(rename = "K")]
    pub count: String,
    pub complete: bool,
    #[serde(flatten)]
    pub checksums: Checksums,
}

/// Free-function form of [`GapCensus::max_gap`].
pub fn max_gap(census: &GapCensus) -> Result<u64> {
    census.max_gap()
}
