//! The `verify` suite: formula against enumeration, checksums, coefficient
//! sums, cache integrity and sampled structural invariants.

use std::collections::BTreeMap;
use std::path::Path;

use gapcensus::config::{
    consecutive_core, core, kappa_direct, kappa_inclusion_exclusion, nu_direct,
};
use gapcensus::gaps::{
    coefficient_sum, gap_coefficients_with, gap_count_exact, CoefficientCache, EnumerationBudget,
};
use gapcensus::primes::{is_prime, prev_prime_at_most, primes_up_to};
use gapcensus::sieve::enumerate_coprime_gaps;
use gapcensus::totient::{nu_crt, nu_crt_offsets, residue_class_count};
use gapcensus::{
    Configuration, GapCensus, GapEngine, ResidueSubset, RingContext, SieveConfig, SquareFreeModulus,
};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::Emitter;

/// Largest prime whose primorial is enumerated on demand for coefficient sums.
const SIEVE_PRIME_LIMIT: u64 = 23;

pub struct Options {
    pub max_p: u64,
    pub max_gap: u64,
    pub seed: u64,
    pub samples: usize,
}

struct Outcome {
    check: String,
    passed: bool,
    detail: String,
}

struct Report<'a> {
    out: &'a mut Emitter,
    failures: usize,
    total: usize,
}

impl Report<'_> {
    fn push(&mut self, o: Outcome) -> anyhow::Result<()> {
        self.total += 1;
        if !o.passed {
            self.failures += 1;
        }
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let record = json!({
            "record": "verify",
            "check": o.check,
            "passed": o.passed,
            "detail": o.detail,
        });
        self.out
            .emit(format!("{tag} {}: {}", o.check, o.detail), &record)?;
        Ok(())
    }
}

fn outcome(check: impl Into<String>, failures: &[String], ok_detail: String) -> Outcome {
    Outcome {
        check: check.into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            ok_detail
        } else {
            failures.join("; ")
        },
    }
}

/// Runs every check; returns whether all passed.
pub fn run(out: &mut Emitter, cache_dir: Option<&Path>, opts: &Options) -> anyhow::Result<bool> {
    let mut report = Report {
        out,
        failures: 0,
        total: 0,
    };
    let budget = EnumerationBudget::default();
    let engine = match cache_dir {
        None => GapEngine::default(),
        Some(dir) => match CoefficientCache::open(dir) {
            Ok(cache) => {
                report.push(check_cache(&cache, budget))?;
                GapEngine::default().with_cache(cache)
            }
            Err(e) => {
                report.push(Outcome {
                    check: "cache".into(),
                    passed: false,
                    detail: format!("{}: {e}", dir.display()),
                })?;
                GapEngine::default()
            }
        },
    };

    let mut oracles: BTreeMap<u64, GapCensus> = BTreeMap::new();
    for p in primes_up_to(opts.max_p) {
        let oracle = enumerate_coprime_gaps(&SieveConfig::new(p)?);
        report.push(check_oracle(&engine, &oracle, opts.max_gap)?)?;
        oracles.insert(p, oracle);
    }
    report.push(check_coefficient_sums(
        &engine,
        &mut oracles,
        opts.max_gap,
        budget,
    )?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    report.push(check_even_offsets(&mut rng, opts.samples))?;
    report.push(check_odd_offsets(&mut rng, opts.samples))?;
    report.push(check_configurations(&mut rng, opts.samples)?)?;

    let Report {
        out,
        failures,
        total,
    } = report;
    out.emit(
        format!("verify: {total} checks, {failures} failed"),
        &json!({ "record": "verify_summary", "checks": total, "failed": failures }),
    )?;
    Ok(failures == 0)
}

fn check_cache(cache: &CoefficientCache, budget: EnumerationBudget) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for cached in cache.listings() {
        checked += 1;
        match gap_coefficients_with(cached.gap(), budget) {
            Ok(fresh) if &fresh == cached => {}
            Ok(fresh) => failures.push(format!("cached `{cached}` but computed `{fresh}`")),
            Err(e) => failures.push(format!("D = {}: {e}", cached.gap())),
        }
    }
    outcome(
        "cache",
        &failures,
        format!("{checked} cached listings recomputed"),
    )
}

/// Per-gap comparison up to `max_gap`, then the whole census when the
/// formula side completes.
fn check_oracle(engine: &GapEngine, oracle: &GapCensus, max_gap: u64) -> anyhow::Result<Outcome> {
    let p = oracle.prime();
    let mut failures = Vec::new();
    if !oracle.checksums().ok() {
        failures.push(format!(
            "oracle census fails checksums: {:?}",
            oracle.checksums()
        ));
    }
    let mut compared = 0;
    for gap in (2..=max_gap).step_by(2) {
        let expected = oracle.count(gap).expect("complete census");
        compared += 1;
        match engine.count(gap, p) {
            Ok((k, _)) if k == expected => {}
            Ok((k, method)) => failures.push(format!(
                "K({gap}, {p}#) = {k} [{method}] but enumeration gives {expected}"
            )),
            Err(e) => failures.push(format!("K({gap}, {p}#): {e}")),
        }
    }
    let whole = match engine.census(p) {
        Err(e) => {
            failures.push(e.to_string());
            "formula census failed"
        }
        Ok(census) if census.is_complete() => {
            if !census.checksums().ok() {
                failures.push(format!(
                    "formula census fails checksums: {:?}",
                    census.checksums()
                ));
            }
            if census.entries() != oracle.entries() {
                failures.push("formula and enumerated censuses differ".into());
            }
            "full census identical"
        }
        Ok(_) => "formula census partial",
    };
    Ok(outcome(
        format!("oracle p={p}"),
        &failures,
        format!("{compared} gap lengths agree, {whole}, checksums ok"),
    ))
}

/// The coefficients for `D` sum to zero and to `K(D, q#)` with `q` the
/// largest prime `<= D/2`.
fn check_coefficient_sums(
    engine: &GapEngine,
    oracles: &mut BTreeMap<u64, GapCensus>,
    max_gap: u64,
    budget: EnumerationBudget,
) -> anyhow::Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for gap in (6..=max_gap).step_by(2) {
        let sum = coefficient_sum(&engine.listing(gap)?);
        let q = prev_prime_at_most(gap / 2).expect("D >= 6");
        let direct = if q <= SIEVE_PRIME_LIMIT {
            if let std::collections::btree_map::Entry::Vacant(e) = oracles.entry(q) {
                e.insert(enumerate_coprime_gaps(&SieveConfig::new(q)?));
            }
            oracles[&q].count(gap).expect("complete census")
        } else {
            gap_count_exact(gap, q, budget)?
        };
        checked += 1;
        if sum != BigInt::from(direct.clone()) {
            failures.push(format!(
                "D = {gap}: coefficient sum {sum} but K({gap}, {q}#) = {direct}"
            ));
        } else if !sum.is_zero() {
            failures.push(format!("D = {gap}: coefficient sum {sum} is nonzero"));
        }
    }
    Ok(outcome(
        "coefficient sums",
        &failures,
        format!("{checked} listings sum to 0 = K(D, q#)"),
    ))
}

/// Even offsets in `[0, 2a]` stay distinct modulo every odd prime above `a`.
fn check_even_offsets(rng: &mut ChaCha8Rng, samples: usize) -> Outcome {
    let mut failures = Vec::new();
    for _ in 0..samples {
        let a = rng.gen_range(1..=20u64);
        let y: Vec<u64> = (0..=a)
            .filter(|_| rng.gen_bool(0.5))
            .map(|k| 2 * k)
            .collect();
        for p in (a + 1..=2 * a).filter(|&p| p > 2 && is_prime(p)) {
            if residue_class_count(y.iter().copied(), p) != y.len() as u64 {
                failures.push(format!("{y:?} collides modulo {p}"));
            }
        }
    }
    outcome(
        "even offsets",
        &failures,
        format!("{samples} sampled sets distinct modulo every prime above a"),
    )
}

/// A configuration with an odd offset never fits inside `U(P)` for even `P`.
fn check_odd_offsets(rng: &mut ChaCha8Rng, samples: usize) -> Outcome {
    let primes = primes_up_to(13);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let p = *primes.choose(rng).expect("nonempty");
        let m = SquareFreeModulus::new(primes_up_to(p)).expect("primorial");
        let mut offsets: Vec<u64> = (0..rng.gen_range(0..5))
            .map(|_| rng.gen_range(1..40))
            .collect();
        offsets.push(0);
        offsets.push(2 * rng.gen_range(0..20) + 1);
        let nu = nu_crt_offsets(&offsets, &m);
        if !nu.is_zero() {
            failures.push(format!("nu({offsets:?}) = {nu} modulo {p}#"));
        }
    }
    outcome(
        "odd offsets",
        &failures,
        format!("{samples} sampled configurations have empty cores"),
    )
}

/// Inclusion-exclusion against a scan on random `(E, T)` over `Z/nZ`,
/// `n <= 60`, plus the CRT count and the core inclusions.
fn check_configurations(rng: &mut ChaCha8Rng, samples: usize) -> anyhow::Result<Outcome> {
    let mut failures = Vec::new();
    for _ in 0..samples {
        let n = rng.gen_range(2..=60u64);
        let ctx = RingContext::new(n)?;
        let units = rng.gen_bool(0.3);
        let e = if units {
            ResidueSubset::units(&ctx)
        } else {
            let density = rng.gen_range(0.2..0.9);
            ResidueSubset::from_integers(&ctx, (0..n as i128).filter(|_| rng.gen_bool(density)))
        };
        let span = rng.gen_range(0..=12.min(n - 1));
        let mut offsets = vec![0i128];
        offsets.extend((1..=span as i128).filter(|_| rng.gen_bool(0.4)));
        if span > 0 {
            offsets.push(span as i128);
        }
        let t = Configuration::new(&ctx, offsets.iter().copied())?;
        let t_small = Configuration::new(
            &ctx,
            offsets
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .chain([0]),
        )?;
        let label = format!("n = {n}, T = {offsets:?}");

        let direct = kappa_direct(&t, &e)?;
        let ie = kappa_inclusion_exclusion(&t, &e)?;
        if ie != BigInt::from(direct) {
            failures.push(format!(
                "{label}: kappa scan {direct}, inclusion-exclusion {ie}"
            ));
        }
        let c = core(&t, &e)?;
        if !consecutive_core(&t, &e)?.is_subset_of(&c) || !c.is_subset_of(&e) {
            failures.push(format!("{label}: K(T) within C(T) within E fails"));
        }
        if !c.is_subset_of(&core(&t_small, &e)?) {
            failures.push(format!("{label}: core not monotone under shrinking T"));
        }
        if units {
            if let Ok(m) = SquareFreeModulus::from_u64(n) {
                let crt = nu_crt(&t, &m)?;
                let scan = BigUint::from(nu_direct(&t, &e)?);
                if crt != scan {
                    failures.push(format!("{label}: nu CRT {crt}, scan {scan}"));
                }
            }
        }
    }
    Ok(outcome(
        "configurations",
        &failures,
        format!("{samples} sampled (E, T) pairs: inclusion-exclusion = scan, cores nested"),
    ))
}
