//! Gap counts `K(D, p#)` between consecutive units modulo a primorial.

mod cache;
mod census;
mod coefficients;

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::Zero;

pub use cache::{CoefficientCache, CACHE_FILE};
pub use census::{max_gap, CensusRecord, Checksums, GapCensus, Method};
pub use coefficients::{
    coefficient_sum, gap_coefficients, gap_coefficients_with, gap_count, gap_count_exact,
    threshold_prime, CoefficientTerm, EnumerationBudget, GapCoefficientListing, MAX_HALF_GAP,
};

use crate::error::{Error, Result};
use crate::primes::{is_prime, primes_up_to, primorial};

/// Computes listings once, optionally persisting them, and answers count,
/// census and table queries on top of them.
#[derive(Debug, Default)]
pub struct GapEngine {
    budget: EnumerationBudget,
    memo: Mutex<BTreeMap<u64, GapCoefficientListing>>,
    cache: Option<Mutex<CoefficientCache>>,
}

impl GapEngine {
    pub fn new(budget: EnumerationBudget) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn with_cache(mut self, cache: CoefficientCache) -> Self {
        self.cache = Some(Mutex::new(cache));
        self
    }

    pub fn budget(&self) -> EnumerationBudget {
        self.budget
    }

    /// Listing for `gap`: memo, then disk cache, then enumeration (which is
    /// written back to the cache).
    pub fn listing(&self, gap: u64) -> Result<GapCoefficientListing> {
        if let Some(l) = self.memo.lock().expect("memo poisoned").get(&gap) {
            return Ok(l.clone());
        }
        if let Some(cache) = &self.cache {
            if let Some(l) = cache.lock().expect("cache poisoned").get(gap) {
                let l = l.clone();
                self.memo
                    .lock()
                    .expect("memo poisoned")
                    .insert(gap, l.clone());
                return Ok(l);
            }
        }
        let listing = gap_coefficients_with(gap, self.budget)?;
        if let Some(cache) = &self.cache {
            cache
                .lock()
                .expect("cache poisoned")
                .store(listing.clone())?;
        }
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert(gap, listing.clone());
        Ok(listing)
    }

    /// `K(D, p#)` by the listing when `p >= p*`, otherwise by the exact
    /// enumeration over every prime `<= p`.
    pub fn count(&self, gap: u64, p: u64) -> Result<(BigUint, Method)> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= threshold_prime(gap)? {
            Ok((self.listing(gap)?.evaluate(p)?, Method::Formula))
        } else {
            Ok((gap_count_exact(gap, p, self.budget)?, Method::Direct))
        }
    }

    /// Walks `D = 2, 4, 6, ...` until `Σ D·K(D, p#) = p#`. Stops early, and
    /// marks the census partial, when the next gap exceeds the budget.
    /// Overshooting `p#` means a listing is wrong (for instance a tampered
    /// cache) and is reported as an error.
    pub fn census(&self, p: u64) -> Result<GapCensus> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let modulus = primorial(p);
        let mut entries = BTreeMap::new();
        let mut covered = BigUint::zero();
        let mut complete = false;
        let mut gap = 2;
        while gap <= self.budget.max_gap() {
            let count = match self.count(gap, p) {
                Ok((k, _)) => k,
                Err(Error::EnumerationBudget { .. }) => break,
                Err(e) => return Err(e),
            };
            covered += &count * gap;
            entries.insert(gap, count);
            if covered > modulus {
                return Err(Error::CensusOvershoot {
                    p,
                    covered: covered.to_string(),
                });
            }
            if covered == modulus {
                complete = true;
                break;
            }
            gap += 2;
        }
        Ok(GapCensus::new(p, entries, complete, Method::Formula))
    }

    /// `K(D, p#)` for every prime `p <= max_p` and even `D <= max_gap`.
    pub fn table(&self, max_p: u64, max_gap: u64) -> Result<GapTable> {
        let primes = primes_up_to(max_p);
        let gaps: Vec<u64> = (1..=max_gap / 2).map(|a| 2 * a).collect();
        let mut columns = Vec::with_capacity(primes.len());
        for &p in &primes {
            let census = self.census(p)?;
            let column = gaps
                .iter()
                .map(|&d| match census.count(d) {
                    Some(k) => Ok(k),
                    None => self.count(d, p).map(|(k, _)| k),
                })
                .collect::<Result<Vec<_>>>()?;
            columns.push(column);
        }
        Ok(GapTable {
            primes,
            gaps,
            columns,
        })
    }
}

/// Rows are gap lengths, columns primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapTable {
    pub primes: Vec<u64>,
    pub gaps: Vec<u64>,
    /// `columns[i][j] = K(gaps[j], primes[i]#)`.
    pub columns: Vec<Vec<BigUint>>,
}

impl GapTable {
    pub fn get(&self, gap: u64, p: u64) -> Option<&BigUint> {
        let i = self.primes.iter().position(|&q| q == p)?;
        let j = self.gaps.iter().position(|&d| d == gap)?;
        Some(&self.columns[i][j])
    }
}

/// Census for `p` with a fresh engine and the default budget.
pub fn gap_census(p: u64) -> Result<GapCensus> {
    GapEngine::default().census(p)
}
