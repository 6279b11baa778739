//! Coefficient listings for `K(D, p#)`.
//!
//! For `D = 2a` only the configurations `{0, 2a} ∪ X` with `X` a set of
//! even holes contribute (an odd offset kills the factor at 2). Primes
//! above `a` see every such set injectively, so their factor depends only
//! on `|X|`, which lets the count split into
//!
//! ```text
//! K(D, p#) = Σ_j c_j ∏_{a < q ≤ p} (q - (j + 2))
//! c_j      = Σ_{|X| = j} (-1)^j ∏_{q ≤ a} (q - |({0, 2a} ∪ X) mod q|)
//! ```
//!
//! where `X` ranges over subsets of `{2, 4, ..., 2a - 2}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::{is_prime, next_prime_above, primes_up_to};

/// Low bits of the subset index are served from a precomputed mask table.
const LOW_BITS: u32 = 14;

/// Largest half-gap the kernel accepts regardless of budget; keeps every
/// factor product inside 64 bits and every sum inside 128 bits.
pub const MAX_HALF_GAP: u64 = 48;

/// Cap on the number of subsets enumerated for one gap length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// At most `2^max_subset_bits` subsets.
    pub max_subset_bits: u32,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        // D <= 52
        Self {
            max_subset_bits: 25,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_subset_bits: u32) -> Self {
        Self { max_subset_bits }
    }

    /// Largest even gap whose enumeration fits the budget.
    pub fn max_gap(&self) -> u64 {
        2 * (self.max_subset_bits as u64 + 1).min(MAX_HALF_GAP)
    }

    fn check(&self, gap: u64) -> Result<u64> {
        let half = half_gap(gap)?;
        let required_bits = (half - 1) as u32;
        if required_bits > self.max_subset_bits || half > MAX_HALF_GAP {
            return Err(Error::EnumerationBudget {
                gap,
                required_bits,
                budget_bits: self.max_subset_bits,
            });
        }
        Ok(half)
    }
}

pub(crate) fn half_gap(gap: u64) -> Result<u64> {
    if gap % 2 == 1 {
        return Err(Error::OddGap(gap));
    }
    if gap < 2 {
        return Err(Error::GapTooSmall(gap));
    }
    Ok(gap / 2)
}

/// Smallest odd prime above `D / 2`; listings hold for `p >= p*`.
pub fn threshold_prime(gap: u64) -> Result<u64> {
    let half = half_gap(gap)?;
    Ok(next_prime_above(half).max(3))
}

/// Signed sums `Σ_{|X| = j} (-1)^j ∏_{q ∈ primes} (q - |({0, 2a} ∪ X) mod q|)`
/// for `j = 0 .. a - 1`.
///
/// The high bits of the subset index are spread over the rayon pool; each
/// worker folds into its own vector and the vectors are added, so the
/// result does not depend on the number of workers.
pub(crate) fn weighted_size_sums(half: u64, primes: &[u64]) -> Vec<i128> {
    debug_assert!((1..=MAX_HALF_GAP).contains(&half));
    debug_assert!(!primes.is_empty() && primes.iter().all(|&q| q < 64));
    let free: Vec<u64> = (1..half).map(|i| 2 * i).collect();
    let bits = free.len() as u32;
    let lo_bits = bits.min(LOW_BITS);
    let hi_bits = bits - lo_bits;
    let width = primes.len();

    let bit = |v: u64, q: u64| 1u64 << (v % q);
    let mut lo_table = vec![0u64; width << lo_bits];
    for lo in 1usize..1 << lo_bits {
        let prev = lo & (lo - 1);
        let elem = free[lo.trailing_zeros() as usize];
        for (k, &q) in primes.iter().enumerate() {
            lo_table[lo * width + k] = lo_table[prev * width + k] | bit(elem, q);
        }
    }
    let base: Vec<u64> = primes
        .iter()
        .map(|&q| bit(0, q) | bit(2 * half, q))
        .collect();
    let sizes = half as usize;

    (0u64..1 << hi_bits)
        .into_par_iter()
        .fold(
            || vec![0i128; sizes],
            |mut acc, hi| {
                let mut hi_mask = base.clone();
                for i in 0..hi_bits {
                    if hi >> i & 1 == 1 {
                        let elem = free[(lo_bits + i) as usize];
                        for (m, &q) in hi_mask.iter_mut().zip(primes) {
                            *m |= bit(elem, q);
                        }
                    }
                }
                let hi_size = hi.count_ones();
                'subsets: for (lo, row) in lo_table.chunks_exact(width).enumerate() {
                    let mut product = 1u64;
                    for k in 0..width {
                        let classes = (hi_mask[k] | row[k]).count_ones() as u64;
                        let factor = primes[k] - classes;
                        if factor == 0 {
                            continue 'subsets;
                        }
                        product *= factor;
                    }
                    let size = (hi_size + (lo as u32).count_ones()) as usize;
                    if size.is_multiple_of(2) {
                        acc[size] += product as i128;
                    } else {
                        acc[size] -= product as i128;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0i128; sizes],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Primes used inside the enumeration for `K(D, p#)`: 2 (whose factor is
/// always 1 on even sets) and the odd primes `<= min(a, p)`.
fn enumeration_primes(half: u64, p: u64) -> Vec<u64> {
    let mut primes = primes_up_to(half.min(p));
    if primes.first() != Some(&2) {
        primes.insert(0, 2);
    }
    primes
}

/// One `(c, b)` pair: contributes `c ∏_{p* <= q <= p} (q - b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTerm {
    pub coefficient: BigInt,
    pub offset: u64,
}

/// The data that turns `K(D, p#)` into a closed product formula for every
/// prime `p >= p*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCoefficientListing {
    gap: u64,
    p_star: u64,
    terms: Vec<CoefficientTerm>,
}

impl GapCoefficientListing {
    /// Builds a listing from explicit terms, checking the shape.
    pub fn new(gap: u64, p_star: u64, terms: Vec<CoefficientTerm>) -> Result<Self> {
        let expected = threshold_prime(gap)?;
        let bad = |why: &str| Error::MalformedListing(format!("D = {gap}: {why}"));
        if p_star != expected {
            return Err(bad(&format!("threshold {p_star}, expected {expected}")));
        }
        let offsets_ok = terms
            .iter()
            .enumerate()
            .all(|(i, t)| t.offset == i as u64 + 2 && t.offset < p_star);
        if !offsets_ok {
            return Err(bad("offsets must run 2, 3, 4, ... below the threshold"));
        }
        Ok(Self { gap, p_star, terms })
    }

    pub fn gap(&self) -> u64 {
        self.gap
    }

    pub fn threshold(&self) -> u64 {
        self.p_star
    }

    pub fn terms(&self) -> &[CoefficientTerm] {
        &self.terms
    }

    /// `K(D, p#)` for a prime `p >= p*`.
    pub fn evaluate(&self, p: u64) -> Result<BigUint> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < self.p_star {
            return Err(Error::BelowThreshold {
                gap: self.gap,
                p,
                p_star: self.p_star,
            });
        }
        let tail: Vec<u64> = primes_up_to(p)
            .into_iter()
            .filter(|&q| q >= self.p_star)
            .collect();
        let total: BigInt = self
            .terms
            .iter()
            .map(|t| {
                let product = tail
                    .iter()
                    .fold(BigInt::one(), |acc, &q| acc * BigInt::from(q - t.offset));
                &t.coefficient * product
            })
            .sum();
        match total.sign() {
            Sign::Minus => Err(Error::NegativeCount {
                gap: self.gap,
                p,
                value: total.to_string(),
            }),
            _ => Ok(total.magnitude().clone()),
        }
    }
}

impl fmt::Display for GapCoefficientListing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D = {}: [{}", self.gap, self.p_star)?;
        for t in &self.terms {
            write!(f, ", ({}, {})", t.coefficient, t.offset)?;
        }
        write!(f, "]")
    }
}

impl FromStr for GapCoefficientListing {
    type Err = Error;

    /// Parses `D = <D>: [<p*>, (<c>, <b>), ...]`, ignoring all whitespace.
    fn from_str(line: &str) -> Result<Self> {
        let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::MalformedListing(line.trim().to_string());
        let rest = compact.strip_prefix("D=").ok_or_else(bad)?;
        let (gap, body) = rest.split_once(':').ok_or_else(bad)?;
        let gap: u64 = gap.parse().map_err(|_| bad())?;
        let body = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (p_star, pairs) = match body.split_once(',') {
            Some((head, tail)) => (head, tail),
            None => (body, ""),
        };
        let p_star: u64 = p_star.parse().map_err(|_| bad())?;
        let mut terms = Vec::new();
        if !pairs.is_empty() {
            let inner = pairs
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(bad)?;
            for pair in inner.split("),(") {
                let (c, b) = pair.split_once(',').ok_or_else(bad)?;
                terms.push(CoefficientTerm {
                    coefficient: c.parse().map_err(|_| bad())?,
                    offset: b.parse().map_err(|_| bad())?,
                });
            }
        }
        Self::new(gap, p_star, terms)
    }
}

/// Listing for gap `D` under the default budget.
pub fn gap_coefficients(gap: u64) -> Result<GapCoefficientListing> {
    gap_coefficients_with(gap, EnumerationBudget::default())
}

pub fn gap_coefficients_with(gap: u64, budget: EnumerationBudget) -> Result<GapCoefficientListing> {
    let half = budget.check(gap)?;
    let p_star = threshold_prime(gap)?;
    let sums = weighted_size_sums(half, &enumeration_primes(half, half));
    let mut terms: Vec<CoefficientTerm> = sums
        .into_iter()
        .enumerate()
        .map(|(j, c)| CoefficientTerm {
            coefficient: BigInt::from(c),
            offset: j as u64 + 2,
        })
        // b <= a + 1 <= p*; a term with b = p* has the factor (p* - p*) = 0
        // for every valid p. Only D = 4 produces a nonzero one.
        .filter(|t| t.offset < p_star)
        .collect();
    while terms.last().is_some_and(|t| t.coefficient.is_zero()) {
        terms.pop();
    }
    GapCoefficientListing::new(gap, p_star, terms)
}

/// `K(D, p#)` through the listing. Requires `p >= p*`.
pub fn gap_count(gap: u64, p: u64) -> Result<BigUint> {
    let listing = gap_coefficients(gap)?;
    listing.evaluate(p)
}

/// `K(D, p#)` for any prime `p` by enumerating with every prime `<= p`
/// that is not covered by the injectivity argument. Equals the listing
/// evaluation when `p >= p*`, and stays exact below the threshold.
pub fn gap_count_exact(gap: u64, p: u64, budget: EnumerationBudget) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let half = budget.check(gap)?;
    let sums = weighted_size_sums(half, &enumeration_primes(half, p));
    let tail: Vec<u64> = primes_up_to(p)
        .into_iter()
        .filter(|&q| q > half && q > 2)
        .collect();
    let total: BigInt = sums
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let k = j as u64 + 2;
            let product = tail.iter().fold(BigInt::one(), |acc, &q| {
                acc * (BigInt::from(q) - BigInt::from(k))
            });
            BigInt::from(c) * product
        })
        .sum();
    assert!(
        total.sign() != Sign::Minus,
        "inclusion-exclusion produced a negative count: {total}"
    );
    Ok(total.magnitude().clone())
}

/// Sum of the listing's coefficients; equals `K(D, q#)` for `q` the largest
/// prime `<= D / 2`.
pub fn coefficient_sum(listing: &GapCoefficientListing) -> BigInt {
    listing.terms.iter().map(|t| &t.coefficient).sum()
}
