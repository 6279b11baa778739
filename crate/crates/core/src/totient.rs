//! `ν(T, U(P), P)` for square-free `P` through the Chinese remainder
//! theorem: placements are independent across the primes of the support,
//! so `ν = ∏_q (q - |T mod q|)`.
//!
//! Euler's `φ` and Nagell's `θ` are the cases `T = {0}` and `T = {0, m}`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::config::{inclusion_exclusion, Configuration, DEFAULT_COMPLEMENT_LIMIT};
use crate::error::{Error, Result};
use crate::primes::{is_prime, primes_up_to};
use crate::residue::{validate_support, RingContext};

/// A square-free modulus together with its prime support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareFreeModulus {
    modulus: BigUint,
    support: Vec<u64>,
}

impl SquareFreeModulus {
    pub fn new(support: Vec<u64>) -> Result<Self> {
        validate_support(&support)?;
        let modulus = support.iter().fold(BigUint::one(), |acc, &q| acc * q);
        Ok(Self { modulus, support })
    }

    /// Factors `n` by trial division.
    pub fn from_u64(n: u64) -> Result<Self> {
        Self::new(crate::primes::square_free_support(n)?)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn modulus_u64(&self) -> Option<u64> {
        self.modulus.to_u64()
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn contains_prime(&self, q: u64) -> bool {
        self.support.binary_search(&q).is_ok()
    }

    /// `Z/PZ`, when `P` fits in 64 bits.
    pub fn ring(&self) -> Result<RingContext> {
        RingContext::square_free(self.support.clone())
    }
}

/// `p#` with its support `{2, 3, 5, ..., p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimorialModulus {
    p: u64,
    inner: SquareFreeModulus,
}

impl PrimorialModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self {
            p,
            inner: SquareFreeModulus::new(primes_up_to(p))?,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> &BigUint {
        self.inner.modulus()
    }

    pub fn as_square_free(&self) -> &SquareFreeModulus {
        &self.inner
    }
}

impl AsRef<SquareFreeModulus> for PrimorialModulus {
    fn as_ref(&self) -> &SquareFreeModulus {
        &self.inner
    }
}

impl AsRef<SquareFreeModulus> for SquareFreeModulus {
    fn as_ref(&self) -> &SquareFreeModulus {
        self
    }
}

/// Number of distinct classes of `values` modulo `q`.
pub fn residue_class_count<I>(values: I, q: u64) -> u64
where
    I: IntoIterator<Item = u64>,
{
    if q <= 4096 {
        let mut seen = vec![false; q as usize];
        let mut count = 0;
        for v in values {
            let slot = &mut seen[(v % q) as usize];
            if !*slot {
                *slot = true;
                count += 1;
            }
        }
        count
    } else {
        let mut classes: Vec<u64> = values.into_iter().map(|v| v % q).collect();
        classes.sort_unstable();
        classes.dedup();
        classes.len() as u64
    }
}

/// `T / qZ` for a prime `q` dividing the modulus of `T`.
pub fn configuration_mod(t: &Configuration, q: u64) -> Result<Configuration> {
    let n = t.context().modulus();
    if !is_prime(q) || !n.is_multiple_of(q) {
        return Err(Error::NotADivisor { q });
    }
    let ctx = RingContext::new(q)?;
    if t.is_empty() {
        return Ok(Configuration::empty(&ctx));
    }
    Configuration::new(&ctx, t.values().map(|v| (v % q) as i128))
}

/// `∏_q (q - |offsets mod q|)` over the support of `m`.
///
/// The offsets are plain integers: they need not be reduced modulo `P`.
pub fn nu_crt_offsets(offsets: &[u64], m: &SquareFreeModulus) -> BigUint {
    let mut acc = BigUint::one();
    for &q in m.support() {
        let classes = residue_class_count(offsets.iter().copied(), q);
        if classes >= q {
            return BigUint::zero();
        }
        acc *= q - classes;
    }
    acc
}

/// `ν(T, U(P), P)` for a configuration living in `Z/PZ`.
pub fn nu_crt(t: &Configuration, m: &SquareFreeModulus) -> Result<BigUint> {
    let n = t.context().modulus();
    if m.modulus_u64() != Some(n) {
        return Err(Error::ContextMismatch {
            left: n,
            right: m.modulus_u64().unwrap_or(u64::MAX),
        });
    }
    let offsets: Vec<u64> = t.values().collect();
    Ok(nu_crt_offsets(&offsets, m))
}

/// `φ(P) = ν({0})`.
pub fn euler_phi(m: &SquareFreeModulus) -> BigUint {
    nu_crt_offsets(&[0], m)
}

/// `θ(shift, P)`: solutions of `shift ≡ x + y (mod P)` with `x` and `y`
/// coprime to `P`. Equal to `ν({0, shift})`.
pub fn nagell_theta(shift: i128, m: &SquareFreeModulus) -> BigUint {
    let mut acc = BigUint::one();
    for &q in m.support() {
        let r = shift.rem_euclid(q as i128) as u64;
        let classes = residue_class_count([0, r], q);
        if classes >= q {
            return BigUint::zero();
        }
        acc *= q - classes;
    }
    acc
}

/// `ν(T, U(P), P)` read as a totient: `P` for the empty configuration,
/// `φ(P)` for `{0}`, `θ(m, P)` for `{0, m}`, and the CRT product otherwise.
pub fn generalized_totient(t: &Configuration, m: &SquareFreeModulus) -> Result<BigUint> {
    let n = t.context().modulus();
    if m.modulus_u64() != Some(n) {
        return Err(Error::ContextMismatch {
            left: n,
            right: m.modulus_u64().unwrap_or(u64::MAX),
        });
    }
    let values: Vec<u64> = t.values().collect();
    Ok(match values.as_slice() {
        [] => m.modulus().clone(),
        [0] => euler_phi(m),
        [0, shift] => nagell_theta(*shift as i128, m),
        _ => nu_crt_offsets(&values, m),
    })
}

/// `κ(T, U(P), P)` by inclusion-exclusion with `ν` taken from the CRT
/// product instead of a scan of `U(P)`.
pub fn kappa_units_crt(t: &Configuration, m: &SquareFreeModulus) -> Result<BigInt> {
    nu_crt(t, m)?;
    inclusion_exclusion(t, DEFAULT_COMPLEMENT_LIMIT, |u| {
        let offsets: Vec<u64> = u.values().collect();
        BigInt::from(nu_crt_offsets(&offsets, m))
    })
}
