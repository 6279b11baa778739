//! Configurations over an explicit subset `E` of `Z/nZ`: cores, consecutive
//! cores and the inclusion-exclusion count of consecutive occurrences.
//!
//! A configuration is a set of offsets containing 0. Placing it at `x`
//! gives the set `{x} + T`; the core collects the placements landing inside
//! `E`, and the consecutive core keeps only the placements where the arc
//! from `x` counterclockwise to `x + L(T)` meets `E` in exactly `{x} + T`.
//! The inclusion-exclusion form sums `(-1)^|X| ν(T ∪ X)` over all subsets
//! `X` of the holes `Δ(T)` and must agree with the direct scan.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::residue::{Residue, ResidueSubset, RingContext};

/// Default cap on `|Δ(T)|` for inclusion-exclusion (2^30 terms).
pub const DEFAULT_COMPLEMENT_LIMIT: usize = 30;

/// A set of offsets in `Z/nZ` containing 0, or the degenerate empty
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    ctx: RingContext,
    offsets: Vec<Residue>,
}

impl Configuration {
    /// Reduces `offsets` modulo `n`; the result must contain 0.
    pub fn new<I>(ctx: &RingContext, offsets: I) -> Result<Self>
    where
        I: IntoIterator<Item = i128>,
    {
        let offsets = offsets.into_iter().map(|v| ctx.canonical(v)).collect();
        Self::from_residues(ctx, offsets)
    }

    pub fn from_residues(ctx: &RingContext, mut offsets: Vec<Residue>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        if offsets.first().map(|r| r.value()) != Some(0) {
            return Err(Error::MissingZero);
        }
        Ok(Self {
            ctx: ctx.clone(),
            offsets,
        })
    }

    /// The empty configuration. Only the core and `ν` accept it.
    pub fn empty(ctx: &RingContext) -> Self {
        Self {
            ctx: ctx.clone(),
            offsets: Vec::new(),
        }
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn offsets(&self) -> &[Residue] {
        &self.offsets
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.offsets.iter().map(|r| r.value())
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn contains(&self, r: Residue) -> bool {
        self.offsets.binary_search(&r).is_ok()
    }

    /// `L(T)`: the largest representative.
    pub fn length(&self) -> Result<u64> {
        self.offsets
            .last()
            .map(|r| r.value())
            .ok_or(Error::EmptyConfiguration)
    }

    /// `Δ(T)`: residues below `L(T)` that are not offsets.
    pub fn complement(&self) -> Result<ConfigurationComplement> {
        let len = self.length()?;
        let elements = (0..len)
            .map(|v| self.ctx.residue(v).expect("below the length, so canonical"))
            .filter(|&r| !self.contains(r))
            .collect();
        Ok(ConfigurationComplement { elements })
    }

    /// `T ∪ extra`.
    pub fn union(&self, extra: &[Residue]) -> Self {
        let mut offsets = self.offsets.clone();
        offsets.extend_from_slice(extra);
        offsets.sort_unstable();
        offsets.dedup();
        Self {
            ctx: self.ctx.clone(),
            offsets,
        }
    }

    fn check_context(&self, e: &ResidueSubset) -> Result<()> {
        let (left, right) = (self.ctx.modulus(), e.context().modulus());
        if left != right {
            return Err(Error::ContextMismatch { left, right });
        }
        Ok(())
    }
}

/// `Δ(T)`, increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationComplement {
    elements: Vec<Residue>,
}

impl ConfigurationComplement {
    pub fn elements(&self) -> &[Residue] {
        &self.elements
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().map(|r| r.value())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `F - {x}`.
pub fn induced_configuration(f: &ResidueSubset, x: Residue) -> Result<Configuration> {
    if !f.contains(x) {
        return Err(Error::NotAMember { value: x.value() });
    }
    let ctx = f.context();
    let offsets = f.members().iter().map(|&y| ctx.sub(y, x)).collect();
    Configuration::from_residues(ctx, offsets)
}

pub fn length(t: &Configuration) -> Result<u64> {
    t.length()
}

pub fn complement(t: &Configuration) -> Result<ConfigurationComplement> {
    t.complement()
}

fn placement_inside(t: &Configuration, e: &ResidueSubset, x: Residue) -> bool {
    let ctx = t.context();
    t.offsets().iter().all(|&o| e.contains(ctx.add(x, o)))
}

/// `C(T, E)`: every `x` with `{x} + T ⊆ E`.
pub fn core(t: &Configuration, e: &ResidueSubset) -> Result<ResidueSubset> {
    t.check_context(e)?;
    let ctx = t.context();
    let members = (0..ctx.modulus())
        .map(|v| ctx.residue(v).expect("in range"))
        .filter(|&x| placement_inside(t, e, x))
        .collect();
    Ok(ResidueSubset::from_residues(ctx, members))
}

/// `ν(T, E)` by scanning every placement.
pub fn nu_direct(t: &Configuration, e: &ResidueSubset) -> Result<u64> {
    t.check_context(e)?;
    let ctx = t.context();
    Ok((0..ctx.modulus())
        .filter(|&v| placement_inside(t, e, ctx.residue(v).expect("in range")))
        .count() as u64)
}

/// `K(T, E)`: placements `x` where the arc `[x, x + L(T)]` contains exactly
/// the points `{x} + T` of `E`.
pub fn consecutive_core(t: &Configuration, e: &ResidueSubset) -> Result<ResidueSubset> {
    t.check_context(e)?;
    let len = t.length()?;
    let ctx = t.context();
    let members = (0..ctx.modulus())
        .map(|v| ctx.residue(v).expect("in range"))
        .filter(|&x| {
            (0..=len).all(|s| {
                let s = ctx.residue(s).expect("length is canonical");
                e.contains(ctx.add(x, s)) == t.contains(s)
            })
        })
        .collect();
    Ok(ResidueSubset::from_residues(ctx, members))
}

/// `κ(T, E)` by scanning every placement. This is the oracle for the
/// inclusion-exclusion route.
pub fn kappa_direct(t: &Configuration, e: &ResidueSubset) -> Result<u64> {
    Ok(consecutive_core(t, e)?.len() as u64)
}

/// `κ(T, E)` as `Σ_{X ⊆ Δ(T)} (-1)^|X| ν(T ∪ X, E)`, with `ν` scanned
/// directly over `E`.
pub fn kappa_inclusion_exclusion(t: &Configuration, e: &ResidueSubset) -> Result<BigInt> {
    t.check_context(e)?;
    inclusion_exclusion(t, DEFAULT_COMPLEMENT_LIMIT, |u| {
        BigInt::from(nu_direct(u, e).expect("contexts already checked"))
    })
}

/// Inclusion-exclusion over `Δ(T)` with a caller-supplied `ν`.
///
/// Subset `X` is the bit pattern over `Δ(T)` listed in increasing order. The
/// terms are summed in parallel; integer addition keeps the result
/// independent of how the range is split.
pub fn inclusion_exclusion<F>(t: &Configuration, limit: usize, nu: F) -> Result<BigInt>
where
    F: Fn(&Configuration) -> BigInt + Sync,
{
    if t.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let delta = t.complement()?;
    let size = delta.len();
    if size > limit || size >= 64 {
        return Err(Error::SubsetExplosion { size, limit });
    }
    let holes = delta.elements();
    let total = (0..1u64 << size)
        .into_par_iter()
        .map(|mask| {
            let extra: Vec<Residue> = (0..size)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| holes[i])
                .collect();
            let term = nu(&t.union(&extra));
            if mask.count_ones() % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .reduce(BigInt::zero, |a, b| a + b);
    Ok(total)
}
