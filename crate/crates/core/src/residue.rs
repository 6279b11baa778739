//! Canonical residues on `Z/nZ`, viewed as points on a circle of
//! circumference `n`.
//!
//! Every residue is stored as its representative in `[0, n)`. Sets of
//! residues are kept sorted, which is also the counterclockwise order of
//! the points on the circle starting from 0.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::primes::{is_prime, square_free_support};

/// The ring `Z/nZ`, optionally with the prime support of `n` when `n` is
/// square-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingContext {
    n: u64,
    support: Option<Vec<u64>>,
}

impl RingContext {
    /// `Z/nZ` without factorization data.
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::ModulusTooSmall(n));
        }
        Ok(Self { n, support: None })
    }

    /// `Z/nZ` with the support filled in whenever `n` is square-free.
    pub fn factored(n: u64) -> Result<Self> {
        let mut ctx = Self::new(n)?;
        ctx.support = square_free_support(n).ok();
        Ok(ctx)
    }

    /// The ring whose modulus is the product of `support`.
    pub fn square_free(support: Vec<u64>) -> Result<Self> {
        validate_support(&support)?;
        let n = support
            .iter()
            .try_fold(1u64, |acc, &q| acc.checked_mul(q))
            .ok_or(Error::ModulusOverflow)?;
        Ok(Self {
            n,
            support: Some(support),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn support(&self) -> Option<&[u64]> {
        self.support.as_deref()
    }

    /// `r(x)`: the representative of `x` in `[0, n)`.
    pub fn canonical(&self, x: i128) -> Residue {
        Residue(x.rem_euclid(self.n as i128) as u64)
    }

    /// Wraps an already-reduced value, rejecting anything outside `[0, n)`.
    pub fn residue(&self, value: u64) -> Result<Residue> {
        if value >= self.n {
            return Err(Error::NotCanonical {
                value,
                modulus: self.n,
            });
        }
        Ok(Residue(value))
    }

    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue(((x.0 as u128 + y.0 as u128) % self.n as u128) as u64)
    }

    pub fn sub(&self, x: Residue, y: Residue) -> Residue {
        Residue(((x.0 as u128 + self.n as u128 - y.0 as u128) % self.n as u128) as u64)
    }

    /// Shortest distance between `x` and `y` along the circle.
    pub fn circle_distance(&self, x: Residue, y: Residue) -> Result<u64> {
        self.residue(x.0)?;
        self.residue(y.0)?;
        let diff = x.0.abs_diff(y.0);
        Ok(diff.min(self.n - diff))
    }

    /// Counterclockwise arc length from `x` to `y`, in `[0, n)`.
    pub fn forward_distance(&self, x: Residue, y: Residue) -> u64 {
        self.sub(y, x).0
    }

    fn check_same(&self, other: &RingContext) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

pub(crate) fn validate_support(support: &[u64]) -> Result<()> {
    let increasing = support.windows(2).all(|w| w[0] < w[1]);
    if support.is_empty() || !increasing || !support.iter().all(|&q| is_prime(q)) {
        return Err(Error::InvalidSupport {
            support: support.to_vec(),
        });
    }
    Ok(())
}

/// A canonical representative in `[0, n)`. The modulus lives in the
/// surrounding [`RingContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Residue(u64);

impl Residue {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An explicit subset of `Z/nZ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSubset {
    ctx: RingContext,
    members: Vec<Residue>,
}

impl ResidueSubset {
    /// Builds a subset from arbitrary integers, reducing each one.
    pub fn from_integers<I>(ctx: &RingContext, values: I) -> Self
    where
        I: IntoIterator<Item = i128>,
    {
        let members = values.into_iter().map(|v| ctx.canonical(v)).collect();
        Self::from_residues(ctx, members)
    }

    pub fn from_residues(ctx: &RingContext, mut members: Vec<Residue>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self {
            ctx: ctx.clone(),
            members,
        }
    }

    /// `U(n)`: the residues coprime to `n`.
    pub fn units(ctx: &RingContext) -> Self {
        let n = ctx.modulus();
        let members = (1..n).filter(|x| x.gcd(&n) == 1).map(Residue).collect();
        Self {
            ctx: ctx.clone(),
            members,
        }
    }

    /// All of `Z/nZ`.
    pub fn full(ctx: &RingContext) -> Self {
        Self {
            ctx: ctx.clone(),
            members: (0..ctx.modulus()).map(Residue).collect(),
        }
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn members(&self) -> &[Residue] {
        &self.members
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|r| r.0)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: Residue) -> bool {
        self.members.binary_search(&r).is_ok()
    }

    fn position(&self, r: Residue) -> Option<usize> {
        self.members.binary_search(&r).ok()
    }

    pub fn is_subset_of(&self, other: &ResidueSubset) -> bool {
        self.ctx.n == other.ctx.n && self.members.iter().all(|&r| other.contains(r))
    }

    /// `self + {s}`.
    pub fn shifted(&self, s: Residue) -> Self {
        let members = self.members.iter().map(|&r| self.ctx.add(r, s)).collect();
        Self::from_residues(&self.ctx, members)
    }

    /// Whether some arc of the circle meets `e` in exactly `self`.
    ///
    /// Walks the members of `e` in circular order and checks that the
    /// positions occupied by `self` form a single cyclic run.
    pub fn is_consecutive_in(&self, e: &ResidueSubset) -> Result<bool> {
        self.ctx.check_same(&e.ctx)?;
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut positions = Vec::with_capacity(self.len());
        for &r in &self.members {
            match e.position(r) {
                Some(i) => positions.push(i),
                None => return Err(Error::NotAMember { value: r.0 }),
            }
        }
        let m = e.len();
        let k = positions.len();
        let breaks = (0..k)
            .filter(|&i| positions[(i + 1) % k] != (positions[i] + 1) % m)
            .count();
        Ok(breaks <= 1 || k == m)
    }

    /// Adjacent pairs in circular order, each with the counterclockwise gap
    /// from the first element to the second. A singleton wraps onto itself
    /// with a gap of `n`.
    pub fn consecutive_pairs(&self) -> Result<Vec<Gap>> {
        let m = self.members.len();
        if m == 0 {
            return Err(Error::EmptySet);
        }
        let n = self.ctx.modulus();
        if m == 1 {
            let x = self.members[0];
            return Ok(vec![Gap {
                from: x,
                to: x,
                length: n,
            }]);
        }
        Ok((0..m)
            .map(|i| {
                let from = self.members[i];
                let to = self.members[(i + 1) % m];
                Gap {
                    from,
                    to,
                    length: self.ctx.forward_distance(from, to),
                }
            })
            .collect())
    }
}

/// Two consecutive elements of a subset and the arc between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub from: Residue,
    pub to: Residue,
    pub length: u64,
}

/// Free-function form of [`RingContext::canonical`].
pub fn canonical(x: i128, ctx: &RingContext) -> Residue {
    ctx.canonical(x)
}

/// Free-function form of [`RingContext::circle_distance`].
pub fn circle_distance(x: Residue, y: Residue, ctx: &RingContext) -> Result<u64> {
    ctx.circle_distance(x, y)
}

/// Free-function form of [`ResidueSubset::is_consecutive_in`].
pub fn is_consecutive_set(a: &ResidueSubset, e: &ResidueSubset) -> Result<bool> {
    a.is_consecutive_in(e)
}

/// Free-function form of [`ResidueSubset::consecutive_pairs`].
pub fn consecutive_pairs(e: &ResidueSubset) -> Result<Vec<Gap>> {
    e.consecutive_pairs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: u64) -> RingContext {
        RingContext::new(n).unwrap()
    }

    fn set(ctx: &RingContext, values: &[i128]) -> ResidueSubset {
        ResidueSubset::from_integers(ctx, values.iter().copied())
    }

    #[test]
    fn canonical_wraps() {
        let ctx = z(30);
        assert_eq!(canonical(31, &ctx).value(), 1);
        assert_eq!(canonical(-1, &ctx).value(), 29);
        assert_eq!(canonical(6, &ctx).value(), 6);
    }

    #[test]
    fn context_validation() {
        assert_eq!(RingContext::new(1), Err(Error::ModulusTooSmall(1)));
        let ctx = RingContext::square_free(vec![2, 3, 5]).unwrap();
        assert_eq!(ctx.modulus(), 30);
        assert!(RingContext::square_free(vec![3, 2]).is_err());
        assert!(RingContext::square_free(vec![2, 4]).is_err());
        assert!(RingContext::square_free(vec![]).is_err());
        assert_eq!(
            RingContext::factored(30).unwrap().support(),
            Some(&[2, 3, 5][..])
        );
        assert_eq!(RingContext::factored(12).unwrap().support(), None);
    }

    #[test]
    fn distances_on_u30() {
        let ctx = z(30);
        let r = |v| ctx.residue(v).unwrap();
        assert_eq!(circle_distance(r(1), r(7), &ctx).unwrap(), 6);
        assert_eq!(circle_distance(r(1), r(29), &ctx).unwrap(), 2);
        assert_eq!(circle_distance(r(13), r(13), &ctx).unwrap(), 0);
        let foreign = z(60).residue(45).unwrap();
        assert!(circle_distance(r(1), foreign, &ctx).is_err());
    }

    #[test]
    fn consecutive_sets_in_u30() {
        let ctx = z(30);
        let u = ResidueSubset::units(&ctx);
        assert_eq!(
            u.values().collect::<Vec<_>>(),
            vec![1, 7, 11, 13, 17, 19, 23, 29]
        );
        assert!(is_consecutive_set(&set(&ctx, &[1, 7, 11]), &u).unwrap());
        assert!(!is_consecutive_set(&set(&ctx, &[1, 7, 13]), &u).unwrap());
        assert!(is_consecutive_set(&u, &u).unwrap());
        // wraps through 0
        assert!(is_consecutive_set(&set(&ctx, &[29, 1, 7]), &u).unwrap());
        assert!(is_consecutive_set(&set(&ctx, &[1, 7]), &u).unwrap());
        assert!(!is_consecutive_set(&set(&ctx, &[1, 11]), &u).unwrap());
    }

    #[test]
    fn consecutive_set_preconditions() {
        let ctx = z(30);
        let u = ResidueSubset::units(&ctx);
        assert_eq!(
            is_consecutive_set(&set(&ctx, &[1, 2]), &u),
            Err(Error::NotAMember { value: 2 })
        );
        assert_eq!(
            is_consecutive_set(&set(&ctx, &[]), &u),
            Err(Error::EmptySet)
        );
        let other = ResidueSubset::units(&z(31));
        assert!(is_consecutive_set(&set(&ctx, &[1]), &other).is_err());
    }

    #[test]
    fn pairs_of_u30() {
        let ctx = z(30);
        let gaps = consecutive_pairs(&ResidueSubset::units(&ctx)).unwrap();
        let triples: Vec<_> = gaps
            .iter()
            .map(|g| (g.from.value(), g.to.value(), g.length))
            .collect();
        assert!(triples.contains(&(1, 7, 6)));
        assert!(triples.contains(&(29, 1, 2)));
        assert_eq!(gaps.iter().map(|g| g.length).sum::<u64>(), 30);
    }

    #[test]
    fn singleton_wraps_to_itself() {
        let ctx = z(2);
        let u = ResidueSubset::units(&ctx);
        let gaps = consecutive_pairs(&u).unwrap();
        assert_eq!(
            gaps,
            vec![Gap {
                from: ctx.residue(1).unwrap(),
                to: ctx.residue(1).unwrap(),
                length: 2
            }]
        );
        assert_eq!(consecutive_pairs(&set(&ctx, &[])), Err(Error::EmptySet));
    }

    #[test]
    fn two_point_set_uses_forward_arcs() {
        // U(6) = {1, 5}: the two arcs are 4 and 2 long, not 2 and 2.
        let ctx = z(6);
        let lengths: Vec<_> = consecutive_pairs(&ResidueSubset::units(&ctx))
            .unwrap()
            .iter()
            .map(|g| g.length)
            .collect();
        assert_eq!(lengths, vec![4, 2]);
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(n in 2u64..=1000, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let ctx = z(n);
            let (x, y, w) = (ctx.canonical(a as i128), ctx.canonical(b as i128), ctx.canonical(c as i128));
            let d = |p, q| ctx.circle_distance(p, q).unwrap();
            prop_assert_eq!(d(x, y), d(y, x));
            prop_assert_eq!(d(x, y) == 0, x == y);
            prop_assert!(d(x, w) <= d(x, y) + d(y, w));
            prop_assert!(2 * d(x, y) <= n);
        }

        #[test]
        fn pairs_cover_the_circle(n in 2u64..=200, seed in proptest::collection::vec(any::<u64>(), 1..40)) {
            let ctx = z(n);
            let e = ResidueSubset::from_integers(&ctx, seed.iter().map(|&v| v as i128));
            let gaps = e.consecutive_pairs().unwrap();
            prop_assert_eq!(gaps.iter().map(|g| g.length).sum::<u64>(), n);
            prop_assert_eq!(gaps.len(), e.len());
            for g in &gaps {
                let pair = ResidueSubset::from_residues(&ctx, vec![g.from, g.to]);
                prop_assert!(pair.is_consecutive_in(&e).unwrap());
            }
        }
    }
}
