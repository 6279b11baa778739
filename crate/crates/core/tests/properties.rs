use gapcensus::config::{
    consecutive_core, core, kappa_direct, kappa_inclusion_exclusion, nu_direct, Configuration,
};
use gapcensus::primes::{primes_up_to, primorial_u64};
use gapcensus::residue::{ResidueSubset, RingContext};
use gapcensus::totient::{nu_crt, nu_crt_offsets, residue_class_count, SquareFreeModulus};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

fn even_subset(a: u64) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::btree_set(0..=a, 1..=(a as usize + 1))
        .prop_map(|s| s.into_iter().map(|k| 2 * k).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Even offsets in `[0, 2a]` stay distinct modulo any odd prime `p > a`.
    #[test]
    fn even_offsets_are_distinct_above_half(
        (a, y) in (1u64..=20).prop_flat_map(|a| (Just(a), even_subset(a)))
    ) {
        for p in primes_up_to(4 * a + 3).into_iter().filter(|&p| p > a && p > 2) {
            prop_assert_eq!(residue_class_count(y.iter().copied(), p), y.len() as u64);
        }
    }

    /// Any configuration with an odd offset has an empty core in `U(P)` when `2 | P`.
    #[test]
    fn odd_offset_kills_the_core(
        mut offsets in proptest::collection::vec(0u64..40, 0..6),
        odd in (0u64..20).prop_map(|k| 2 * k + 1),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
    ) {
        offsets.push(0);
        offsets.push(odd);
        let m = SquareFreeModulus::new(primes_up_to(p)).unwrap();
        prop_assert_eq!(nu_crt_offsets(&offsets, &m), BigUint::zero());
    }

    #[test]
    fn crt_count_matches_scan_on_primorials(
        offsets in proptest::collection::btree_set(1u64..30, 0..4),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
    ) {
        let n = primorial_u64(p).unwrap();
        let ctx = RingContext::new(n).unwrap();
        let t = Configuration::new(&ctx, std::iter::once(0).chain(offsets).map(i128::from)).unwrap();
        let units = ResidueSubset::units(&ctx);
        let m = SquareFreeModulus::from_u64(n).unwrap();
        prop_assert_eq!(nu_crt(&t, &m).unwrap(), BigUint::from(nu_direct(&t, &units).unwrap()));
    }

    #[test]
    fn cores_are_nested_and_counts_agree(
        n in 2u64..=60,
        raw_e in proptest::collection::vec(any::<bool>(), 60),
        raw_t in proptest::collection::btree_set(1u64..10, 0..5),
    ) {
        let ctx = RingContext::new(n).unwrap();
        let e = ResidueSubset::from_integers(
            &ctx,
            (0..n).filter(|&x| raw_e[x as usize]).map(i128::from),
        );
        let offsets = std::iter::once(0).chain(raw_t.into_iter().filter(|&s| s < n));
        let t = Configuration::new(&ctx, offsets.map(i128::from)).unwrap();
        let c = core(&t, &e).unwrap();
        let k = consecutive_core(&t, &e).unwrap();
        prop_assert!(k.is_subset_of(&c));
        prop_assert!(c.is_subset_of(&e));
        prop_assert_eq!(
            kappa_inclusion_exclusion(&t, &e).unwrap(),
            BigInt::from(kappa_direct(&t, &e).unwrap())
        );
    }
}
