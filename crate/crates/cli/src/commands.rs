use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use gapcensus::config::{kappa_direct, kappa_inclusion_exclusion, nu_direct};
use gapcensus::gaps::CoefficientCache;
use gapcensus::primes::primes_up_to;
use gapcensus::sieve::enumerate_coprime_gaps;
use gapcensus::totient::{euler_phi, kappa_units_crt, nagell_theta, nu_crt};
use gapcensus::{
    Configuration, GapCensus, GapEngine, Method, ResidueSubset, RingContext, SieveConfig,
    SquareFreeModulus,
};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use serde_json::json;

use crate::output::Emitter;
use crate::KappaMethod;

/// Largest modulus whose unit group is built by scanning every residue.
pub const SCAN_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    Units,
    Explicit(Vec<i128>),
}

impl FromStr for SetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("u") {
            return Ok(Self::Units);
        }
        s.split(',')
            .filter(|v| !v.trim().is_empty())
            .map(|v| v.trim().parse::<i128>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::Explicit)
    }
}

impl SetSpec {
    fn label(&self) -> String {
        match self {
            Self::Units => "U".into(),
            Self::Explicit(v) => v.iter().map(i128::to_string).collect::<Vec<_>>().join(","),
        }
    }

    /// The set as explicit residues; `U` is scanned, so `n` must be small.
    fn materialize(&self, ctx: &RingContext) -> anyhow::Result<ResidueSubset> {
        match self {
            Self::Explicit(v) => Ok(ResidueSubset::from_integers(ctx, v.iter().copied())),
            Self::Units if ctx.modulus() <= SCAN_LIMIT => Ok(ResidueSubset::units(ctx)),
            Self::Units => bail!(
                "U({}) would need a scan of {} residues (limit {SCAN_LIMIT}); \
                 only square-free moduli are handled without one",
                ctx.modulus(),
                ctx.modulus()
            ),
        }
    }
}

pub fn engine(cache: Option<&Path>) -> anyhow::Result<GapEngine> {
    let engine = GapEngine::default();
    Ok(match cache {
        None => engine,
        Some(dir) => {
            let cache = CoefficientCache::open(dir)
                .with_context(|| format!("reading coefficient cache in {}", dir.display()))?;
            engine.with_cache(cache)
        }
    })
}

#[derive(Serialize)]
struct ConfigRecord<'a> {
    record: &'a str,
    n: String,
    set: String,
    config: Vec<String>,
    value: String,
    method: Method,
}

fn config_record(
    record: &'static str,
    n: u64,
    set: &SetSpec,
    t: &Configuration,
    value: String,
    method: Method,
) -> ConfigRecord<'static> {
    ConfigRecord {
        record,
        n: n.to_string(),
        set: set.label(),
        config: t.values().map(|v| v.to_string()).collect(),
        value,
        method,
    }
}

pub fn nu(out: &mut Emitter, n: u64, set: &SetSpec, config: &[i128]) -> anyhow::Result<()> {
    let ctx = RingContext::new(n)?;
    let t = Configuration::new(&ctx, config.iter().copied())?;
    let square_free = SquareFreeModulus::from_u64(n).ok();
    let (value, method) = match (set, square_free) {
        (SetSpec::Units, Some(m)) => (nu_crt(&t, &m)?, Method::Formula),
        _ => (
            BigUint::from(nu_direct(&t, &set.materialize(&ctx)?)?),
            Method::Direct,
        ),
    };
    let record = config_record("nu", n, set, &t, value.to_string(), method);
    out.emit(format!("nu = {value} [{method}]"), &record)?;
    Ok(())
}

pub fn kappa(
    out: &mut Emitter,
    n: u64,
    set: &SetSpec,
    config: &[i128],
    method: KappaMethod,
) -> anyhow::Result<()> {
    let ctx = RingContext::new(n)?;
    let t = Configuration::new(&ctx, config.iter().copied())?;
    let direct = || -> anyhow::Result<BigInt> {
        Ok(BigInt::from(kappa_direct(&t, &set.materialize(&ctx)?)?))
    };
    let ie = || -> anyhow::Result<BigInt> {
        match (set, SquareFreeModulus::from_u64(n)) {
            (SetSpec::Units, Ok(m)) => Ok(kappa_units_crt(&t, &m)?),
            _ => Ok(kappa_inclusion_exclusion(&t, &set.materialize(&ctx)?)?),
        }
    };
    let mut results = Vec::new();
    if method != KappaMethod::Ie {
        results.push((direct()?, Method::Direct));
    }
    if method != KappaMethod::Direct {
        results.push((ie()?, Method::Formula));
    }
    let text = results
        .iter()
        .map(|(v, m)| format!("{v} [{m}]"))
        .collect::<Vec<_>>()
        .join(" = ");
    out.note(format!("kappa = {text}"))?;
    for (v, m) in &results {
        out.record(&config_record("kappa", n, set, &t, v.to_string(), *m))?;
    }
    if let [(a, _), (b, _)] = results.as_slice() {
        if a != b {
            bail!("direct scan gives {a} but inclusion-exclusion gives {b}");
        }
    }
    Ok(())
}

pub fn coeffs(out: &mut Emitter, engine: &GapEngine, gap: u64) -> anyhow::Result<()> {
    let listing = engine.listing(gap)?;
    let terms: Vec<_> = listing
        .terms()
        .iter()
        .map(|t| json!({ "c": t.coefficient.to_string(), "b": t.offset }))
        .collect();
    let record = json!({
        "record": "coefficients",
        "D": gap,
        "p_star": listing.threshold(),
        "terms": terms,
        "listing": listing.to_string(),
    });
    out.emit(listing.to_string(), &record)?;
    Ok(())
}

pub fn gaps(out: &mut Emitter, engine: &GapEngine, gap: u64, p: u64) -> anyhow::Result<()> {
    let (count, method) = engine.count(gap, p)?;
    let record = json!({
        "record": "gap_count",
        "D": gap,
        "p": p,
        "K": count.to_string(),
        "method": method,
    });
    out.emit(format!("K({gap}, {p}#) = {count} [{method}]"), &record)?;
    Ok(())
}

fn emit_census(out: &mut Emitter, census: &GapCensus) -> anyhow::Result<()> {
    let sums = census.checksums();
    let phi = euler_phi(&SquareFreeModulus::new(primes_up_to(census.prime()))?);
    out.note(format!(
        "# p = {}, P = {}, method = {}, {}",
        census.prime(),
        census.modulus(),
        census.method(),
        if census.is_complete() {
            "complete"
        } else {
            "partial"
        },
    ))?;
    for (gap, count) in census.entries() {
        out.note(format!("{gap} {count}"))?;
    }
    for record in census.records() {
        out.record(&record)?;
    }
    let verdict = |ok: bool| if ok { "ok" } else { "MISMATCH" };
    out.note(format!(
        "# sum K = {} vs phi(P) = {phi} {}; sum D*K = {} vs P {}",
        census.total_gaps(),
        verdict(sums.count_matches_phi),
        census.weighted_total(),
        verdict(sums.weighted_matches_modulus),
    ))?;
    if let Ok(max) = census.max_gap() {
        out.note(format!("# max gap {max}"))?;
    }
    out.record(&json!({
        "record": "census_summary",
        "method": census.method(),
        "p": census.prime(),
        "P": census.modulus().to_string(),
        "complete": census.is_complete(),
        "phi": phi.to_string(),
        "sum_K": census.total_gaps().to_string(),
        "sum_DK": census.weighted_total().to_string(),
        "count_matches_phi": sums.count_matches_phi,
        "weighted_matches_modulus": sums.weighted_matches_modulus,
        "max_gap": census.max_gap().ok(),
    }))?;
    Ok(())
}

pub fn census(out: &mut Emitter, engine: &GapEngine, p: u64) -> anyhow::Result<()> {
    emit_census(out, &engine.census(p)?)
}

pub fn census_oracle(out: &mut Emitter, p: u64) -> anyhow::Result<()> {
    emit_census(out, &enumerate_coprime_gaps(&SieveConfig::new(p)?))
}

pub fn table(
    out: &mut Emitter,
    engine: &GapEngine,
    max_p: u64,
    max_gap: u64,
) -> anyhow::Result<()> {
    let table = engine.table(max_p, max_gap)?;
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("D".to_string())
        .chain(table.primes.iter().map(u64::to_string))
        .collect()];
    for (j, &gap) in table.gaps.iter().enumerate() {
        let mut row = vec![gap.to_string()];
        for (i, &p) in table.primes.iter().enumerate() {
            let k = &table.columns[i][j];
            row.push(k.to_string());
            out.record(&json!({ "record": "table_cell", "D": gap, "p": p, "K": k.to_string() }))?;
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        out.note(line.join(" "))?;
    }
    Ok(())
}

pub fn totient(
    out: &mut Emitter,
    theta: Option<i128>,
    support: Vec<u64>,
    modulus: Option<u64>,
) -> anyhow::Result<()> {
    let m = match modulus {
        Some(n) => SquareFreeModulus::from_u64(n)?,
        None => SquareFreeModulus::new(support)?,
    };
    let (label, value) = match theta {
        Some(shift) => (format!("theta({shift})"), nagell_theta(shift, &m)),
        None => ("phi".to_string(), euler_phi(&m)),
    };
    let record = json!({
        "record": "totient",
        "function": if theta.is_some() { "theta" } else { "phi" },
        "m": theta.map(|s| s.to_string()),
        "P": m.modulus().to_string(),
        "value": value.to_string(),
    });
    out.emit(format!("{label} = {value}"), &record)?;
    Ok(())
}
