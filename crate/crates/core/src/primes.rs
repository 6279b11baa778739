//! Small-prime helpers. Every prime handled here is tiny (the support of a
//! primorial that is still countable), so a plain sieve and trial division
//! are all that is needed.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// All primes `<= limit`, increasing.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Largest prime `<= n`, if any.
pub fn prev_prime_at_most(n: u64) -> Option<u64> {
    (2..=n).rev().find(|&c| is_prime(c))
}

/// `p#` as a big integer. `p` need not be prime: the product runs over all
/// primes `<= p`.
pub fn primorial(p: u64) -> BigUint {
    primes_up_to(p)
        .into_iter()
        .fold(BigUint::from(1u32), |acc, q| acc * q)
}

/// `p#` if it fits in a `u64`.
pub fn primorial_u64(p: u64) -> Option<u64> {
    primes_up_to(p)
        .into_iter()
        .try_fold(1u64, |acc, q| acc.checked_mul(q))
}

/// Prime support of a square-free `n`, increasing. Fails when a square
/// divides `n`.
pub fn square_free_support(n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::ModulusTooSmall(n));
    }
    let mut rest = n;
    let mut support = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            rest /= d;
            if rest.is_multiple_of(d) {
                return Err(Error::NotSquareFree(n));
            }
            support.push(d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        support.push(rest);
    }
    Ok(support)
}
