//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.
//!
//! Run with `cargo test -p gapcensus-cli --test acceptance`.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use gapcensus::config::{
    consecutive_core, core, kappa_direct, kappa_inclusion_exclusion, nu_direct,
};
use gapcensus::primes::{prev_prime_at_most, primes_up_to, primorial};
use gapcensus::totient::nu_crt;
use gapcensus::{Configuration, ResidueSubset, RingContext, SquareFreeModulus};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const LISTINGS: &str = include_str!("../../core/tests/data/listings_6_to_50.txt");
const TABLE: &str = include_str!("../../core/tests/data/gap_table.txt");
const U41: &str = include_str!("../../core/tests/data/u41.txt");

const TABLE_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
const ORACLE_PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

type Check = Result<String, String>;

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

fn run(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gapcensus"))
        .args(args)
        .env_remove("GAPCENSUS_CACHE")
        .output()
        .map_err(|e| format!("spawning gapcensus: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "gapcensus {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn parse_records(text: &str) -> Result<Vec<Value>, String> {
    text.lines()
        .map(|l| serde_json::from_str(l).map_err(|e| format!("bad record {l:?}: {e}")))
        .collect()
}

fn big(v: &Value) -> BigUint {
    v.as_str()
        .and_then(|s| s.parse().ok())
        .expect("decimal string")
}

/// Outputs of the commands behind criteria 1-3 for one worker count.
struct Outputs {
    table: String,
    coeffs: Vec<String>,
    oracle: Vec<String>,
    formula: Vec<String>,
}

fn collect_outputs(threads: Option<&str>, cache: Option<&Path>) -> Result<Outputs, String> {
    let cache_str = cache.map(|c| c.to_string_lossy().into_owned());
    let mut base: Vec<&str> = vec!["--format", "structured"];
    if let Some(t) = threads {
        base.extend(["--threads", t]);
    }
    match &cache_str {
        Some(c) => base.extend(["--cache-dir", c.as_str()]),
        None => base.push("--no-cache"),
    }
    let with = |extra: &[&str]| -> Result<String, String> {
        let mut args = base.clone();
        args.extend_from_slice(extra);
        run(&args)
    };
    let table = with(&["table", "--max-p", "29", "--max-D", "50"])?;
    let coeffs = (6..=50)
        .step_by(2)
        .map(|d| with(&["coeffs", "--D", &d.to_string()]))
        .collect::<Result<_, _>>()?;
    let oracle = ORACLE_PRIMES
        .iter()
        .map(|p| with(&["census", "--p", &p.to_string(), "--oracle"]))
        .collect::<Result<_, _>>()?;
    let formula = ORACLE_PRIMES
        .iter()
        .map(|p| with(&["census", "--p", &p.to_string()]))
        .collect::<Result<_, _>>()?;
    Ok(Outputs {
        table,
        coeffs,
        oracle,
        formula,
    })
}

struct Census {
    p: u64,
    entries: BTreeMap<u64, BigUint>,
    complete: bool,
}

fn parse_census(text: &str) -> Result<Census, String> {
    let records = parse_records(text)?;
    let summary = records.last().ok_or("empty census output")?;
    let mut entries = BTreeMap::new();
    for r in records.iter().filter(|r| r["record"] == "census_entry") {
        entries.insert(r["D"].as_u64().ok_or("D")?, big(&r["K"]));
    }
    Ok(Census {
        p: summary["p"].as_u64().ok_or("p")?,
        entries,
        complete: summary["complete"] == true,
    })
}

fn criterion_1(out: &Outputs) -> Check {
    let mut published = BTreeMap::new();
    for line in data_lines(TABLE) {
        let mut cols = line.split_whitespace();
        let d: u64 = cols.next().unwrap().parse().unwrap();
        for (&p, v) in TABLE_PRIMES.iter().zip(cols) {
            published.insert((d, p), v.parse::<BigUint>().unwrap());
        }
    }
    let mut computed = BTreeMap::new();
    for r in parse_records(&out.table)? {
        computed.insert(
            (r["D"].as_u64().unwrap(), r["p"].as_u64().unwrap()),
            big(&r["K"]),
        );
    }
    if computed.len() != published.len() {
        return Err(format!(
            "{} cells emitted, {} published",
            computed.len(),
            published.len()
        ));
    }
    let bad: Vec<String> = published
        .iter()
        .filter(|(k, v)| computed.get(*k) != Some(*v))
        .map(|((d, p), v)| {
            format!(
                "K({d}, {p}#) = {:?}, published {v}",
                computed.get(&(*d, *p))
            )
        })
        .collect();
    if bad.is_empty() {
        Ok(format!(
            "{}/{} cells exact",
            published.len(),
            published.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_2(out: &Outputs) -> Check {
    let normalize = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let published: Vec<String> = data_lines(LISTINGS).map(normalize).collect();
    let computed: BTreeMap<u64, String> = out
        .coeffs
        .iter()
        .map(|text| {
            let r = &parse_records(text)?[0];
            Ok((
                r["D"].as_u64().unwrap(),
                normalize(r["listing"].as_str().unwrap()),
            ))
        })
        .collect::<Result<_, String>>()?;
    let mut bad = Vec::new();
    for line in &published {
        let d: u64 = line["D = ".len()..line.find(':').unwrap()].parse().unwrap();
        match computed.get(&d) {
            Some(c) if c == line => {}
            other => bad.push(format!("published `{line}`, computed `{other:?}`")),
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} published listings for D = 6..50 reproduced",
            published.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_3(oracle: &[Census], formula: &[Census]) -> Check {
    let mut bad = Vec::new();
    for (o, f) in oracle.iter().zip(formula) {
        if !o.complete || !f.complete {
            bad.push(format!("p = {}: census incomplete", o.p));
        } else if o.entries != f.entries {
            bad.push(format!(
                "p = {}: enumeration and formula censuses differ",
                o.p
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!("censuses identical for p in {ORACLE_PRIMES:?}"))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_4(censuses: &[&Census]) -> Check {
    let mut bad = Vec::new();
    for c in censuses {
        let support = primes_up_to(c.p);
        let modulus: BigUint = support.iter().map(|&q| BigUint::from(q)).product();
        let phi: BigUint = support.iter().map(|&q| BigUint::from(q - 1)).product();
        let total: BigUint = c.entries.values().sum();
        let weighted: BigUint = c.entries.iter().map(|(&d, k)| k * d).sum();
        if total != phi || weighted != modulus {
            bad.push(format!(
                "p = {}: sum K = {total} (phi {phi}), sum D*K = {weighted} (P {modulus})",
                c.p
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} complete censuses satisfy sum K = phi(P) and sum D*K = P",
            censuses.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_5(out: &Outputs, oracle: &[Census]) -> Check {
    let by_prime: BTreeMap<u64, &Census> = oracle.iter().map(|c| (c.p, c)).collect();
    let mut bad = Vec::new();
    for text in &out.coeffs {
        let r = &parse_records(text)?[0];
        let d = r["D"].as_u64().unwrap();
        let sum: BigInt = r["terms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["c"].as_str().unwrap().parse::<BigInt>().unwrap())
            .sum();
        let q = prev_prime_at_most(d / 2).unwrap();
        let direct = by_prime[&q].entries.get(&d).cloned().unwrap_or_default();
        if sum != BigInt::from(0) || sum != BigInt::from(direct.clone()) {
            bad.push(format!("D = {d}: sum {sum}, K({d}, {q}#) = {direct}"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} listings sum to 0 = K(D, q#) by enumeration",
            out.coeffs.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_6(cache: &Path) -> Check {
    let cache = cache.to_string_lossy();
    let mut bad = Vec::new();
    let mut weighted = BigUint::from(0u32);
    let mut checked = 0;
    for line in data_lines(U41) {
        let (d, k) = line.split_once(' ').unwrap();
        let d: u64 = d.parse().unwrap();
        let k: BigUint = k.trim().parse().unwrap();
        weighted += &k * d;
        if d > 50 {
            continue;
        }
        let text = run(&[
            "--format",
            "structured",
            "--cache-dir",
            &cache,
            "gaps",
            "--D",
            &d.to_string(),
            "--p",
            "41",
        ])?;
        let computed = big(&parse_records(&text)?[0]["K"]);
        checked += 1;
        if computed != k {
            bad.push(format!("K({d}, 41#) = {computed}, published {k}"));
        }
    }
    if weighted != primorial(41) {
        bad.push(format!("published list sums to {weighted}, not 41#"));
    }
    if bad.is_empty() {
        Ok(format!(
            "{checked} values for D <= 50 exact; published list sums D*K to 41#"
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_7(seed: u64, instances: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut crt_checked = 0;
    for _ in 0..instances {
        let n = rng.gen_range(2..=60u64);
        let ctx = RingContext::new(n).unwrap();
        let e = ResidueSubset::from_integers(&ctx, (0..n as i128).filter(|_| rng.gen_bool(0.6)));
        let span = rng.gen_range(0..=12.min(n - 1)) as i128;
        let mut big_t = vec![0i128];
        big_t.extend((1..=span).filter(|_| rng.gen_bool(0.5)));
        let small_t: Vec<i128> = big_t
            .iter()
            .copied()
            .filter(|&x| x == 0 || rng.gen_bool(0.5))
            .collect();
        let t = Configuration::new(&ctx, big_t.iter().copied()).unwrap();
        let t_small = Configuration::new(&ctx, small_t.iter().copied()).unwrap();
        let label = format!("n = {n}, T = {big_t:?}");

        let direct = kappa_direct(&t, &e).unwrap();
        let ie = kappa_inclusion_exclusion(&t, &e).unwrap();
        if ie != BigInt::from(direct) {
            bad.push(format!("{label}: inclusion-exclusion {ie}, scan {direct}"));
        }
        let c = core(&t, &e).unwrap();
        if !c.is_subset_of(&core(&t_small, &e).unwrap()) {
            bad.push(format!("{label}: core not monotone"));
        }
        if !consecutive_core(&t, &e).unwrap().is_subset_of(&c) || !c.is_subset_of(&e) {
            bad.push(format!("{label}: K(T) within C(T) within E fails"));
        }
        if let Ok(m) = SquareFreeModulus::from_u64(n) {
            let units = ResidueSubset::units(&ctx);
            crt_checked += 1;
            if nu_crt(&t, &m).unwrap() != BigUint::from(nu_direct(&t, &units).unwrap()) {
                bad.push(format!("{label}: CRT count differs from scan"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{instances} random (E, T): inclusion-exclusion = scan, cores nested and monotone; \
             {crt_checked} square-free CRT checks"
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_8(reference: &Outputs) -> Check {
    let mut bad = Vec::new();
    for threads in ["1", "2", "8"] {
        let o = collect_outputs(Some(threads), None)?;
        for (name, same) in [
            ("table", o.table == reference.table),
            ("coeffs", o.coeffs == reference.coeffs),
            ("oracle census", o.oracle == reference.oracle),
            ("formula census", o.formula == reference.formula),
        ] {
            if !same {
                bad.push(format!("{name} differs with {threads} threads"));
            }
        }
    }
    if bad.is_empty() {
        Ok("criteria 1-3 outputs byte-identical for 1, 2, 8 threads and the default pool".into())
    } else {
        Err(bad.join("; "))
    }
}

fn main() -> ExitCode {
    let cache = tempfile::tempdir().expect("temporary cache");
    let mut results: Vec<(u32, &str, Check, f64)> = Vec::new();
    let start = Instant::now();
    let outputs = match collect_outputs(None, Some(cache.path())) {
        Ok(o) => o,
        Err(e) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    let setup = start.elapsed().as_secs_f64();
    let parse_all = |texts: &[String]| {
        texts
            .iter()
            .map(|t| parse_census(t))
            .collect::<Result<Vec<_>, _>>()
    };
    let (oracle, formula) = match (parse_all(&outputs.oracle), parse_all(&outputs.formula)) {
        (Ok(o), Ok(f)) => (o, f),
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };

    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let r = f();
        results.push((id, name, r, t.elapsed().as_secs_f64()));
    };
    timed(1, "gap table p <= 29, D <= 50", &mut || {
        criterion_1(&outputs)
    });
    timed(2, "coefficient listings D = 6..50", &mut || {
        criterion_2(&outputs)
    });
    timed(3, "enumeration vs formula censuses, p <= 23", &mut || {
        criterion_3(&oracle, &formula)
    });
    timed(4, "census checksum identities", &mut || {
        criterion_4(&oracle.iter().chain(&formula).collect::<Vec<_>>())
    });
    timed(5, "coefficient sums", &mut || {
        criterion_5(&outputs, &oracle)
    });
    timed(6, "K(D, 41#) for D <= 50", &mut || {
        criterion_6(cache.path())
    });
    timed(7, "configuration engine against scans", &mut || {
        criterion_7(0x5eed, 200)
    });
    timed(8, "determinism across worker counts", &mut || {
        criterion_8(&outputs)
    });

    println!("commands for criteria 1-3 ran in {setup:.1}s");
    let mut failed = 0;
    for (id, name, result, secs) in &results {
        match result {
            Ok(detail) => println!("PASS {id} {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} criteria, {failed} failed", results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
