//! Reference gap counts by walking `U(p#)` directly.
//!
//! `[0, p#)` is cut into segments. Each segment starts from a copy of the
//! coprimality pattern modulo a small primorial (at most `13# = 30030`),
//! then strikes multiples of the remaining primes. Segments report their
//! first and last survivor so the gaps across boundaries, and the closing
//! gap from the last survivor back to `1 + p#`, are stitched in order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaps::{GapCensus, GapEngine, Method};
use crate::primes::{is_prime, primes_up_to, primorial_u64};

pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 22;

/// Largest prime folded into the wheel pattern.
const WHEEL_PRIME: u64 = 13;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveConfig {
    p: u64,
    limit: u64,
    segment_size: usize,
    max_scan: Option<u64>,
}

impl SieveConfig {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let limit = primorial_u64(p).ok_or(Error::ModulusOverflow)?;
        Ok(Self {
            p,
            limit,
            segment_size: DEFAULT_SEGMENT_SIZE,
            max_scan: None,
        })
    }

    pub fn with_segment_size(mut self, size: usize) -> Result<Self> {
        if (size as u64) < self.p {
            return Err(Error::SegmentTooSmall { size, p: self.p });
        }
        self.segment_size = size;
        Ok(self)
    }

    /// Stops after `max_scan` integers; the census is then flagged partial.
    pub fn with_max_scan(mut self, max_scan: u64) -> Self {
        self.max_scan = Some(max_scan);
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `p#`.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }
}

#[derive(Debug, Default)]
struct Segment {
    first: Option<u64>,
    last: Option<u64>,
    /// `counts[d]` is the number of gaps of length `d` inside the segment.
    counts: Vec<u64>,
}

struct Wheel {
    pattern: Vec<bool>,
    rest: Vec<u64>,
}

impl Wheel {
    fn new(p: u64) -> Self {
        let primes = primes_up_to(p);
        let (small, rest): (Vec<u64>, Vec<u64>) =
            primes.into_iter().partition(|&q| q <= WHEEL_PRIME);
        let period: u64 = small.iter().product();
        let pattern = (0..period)
            .map(|x| small.iter().all(|&q| x % q != 0))
            .collect();
        Self { pattern, rest }
    }

    fn fill(&self, lo: u64, buf: &mut [bool]) {
        let period = self.pattern.len();
        let mut offset = (lo % period as u64) as usize;
        let mut filled = 0;
        while filled < buf.len() {
            let take = (period - offset).min(buf.len() - filled);
            buf[filled..filled + take].copy_from_slice(&self.pattern[offset..offset + take]);
            filled += take;
            offset = 0;
        }
        let hi = lo + buf.len() as u64;
        for &q in &self.rest {
            let mut m = lo.div_ceil(q) * q;
            while m < hi {
                buf[(m - lo) as usize] = false;
                m += q;
            }
        }
    }
}

fn scan_segment(wheel: &Wheel, lo: u64, hi: u64) -> Segment {
    let mut buf = vec![false; (hi - lo) as usize];
    wheel.fill(lo, &mut buf);
    let mut seg = Segment::default();
    for (i, _) in buf.iter().enumerate().filter(|(_, &keep)| keep) {
        let x = lo + i as u64;
        if let Some(prev) = seg.last {
            bump(&mut seg.counts, x - prev);
        } else {
            seg.first = Some(x);
        }
        seg.last = Some(x);
    }
    seg
}

fn bump(counts: &mut Vec<u64>, gap: u64) {
    let gap = gap as usize;
    if counts.len() <= gap {
        counts.resize(gap + 1, 0);
    }
    counts[gap] += 1;
}

/// Census of `U(p#)` by enumeration. Exact whenever the scan reaches `p#`;
/// a `max_scan` cut leaves the census flagged partial.
pub fn enumerate_coprime_gaps(cfg: &SieveConfig) -> GapCensus {
    let end = cfg.max_scan.map_or(cfg.limit, |m| m.min(cfg.limit));
    let wheel = Wheel::new(cfg.p);
    let size = cfg.segment_size as u64;
    let segments: Vec<Segment> = (0..end.div_ceil(size))
        .into_par_iter()
        .map(|k| scan_segment(&wheel, k * size, ((k + 1) * size).min(end)))
        .collect();

    let mut counts: Vec<u64> = Vec::new();
    let mut first = None;
    let mut last: Option<u64> = None;
    for seg in &segments {
        if let (Some(prev), Some(head)) = (last, seg.first) {
            bump(&mut counts, head - prev);
        }
        if counts.len() < seg.counts.len() {
            counts.resize(seg.counts.len(), 0);
        }
        for (c, s) in counts.iter_mut().zip(&seg.counts) {
            *c += s;
        }
        first = first.or(seg.first);
        last = seg.last.or(last);
    }
    let complete = end == cfg.limit;
    if complete {
        if let (Some(head), Some(tail)) = (first, last) {
            bump(&mut counts, head + cfg.limit - tail);
        }
    }
    let entries: BTreeMap<u64, BigUint> = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(d, c)| (d as u64, BigUint::from(c)))
        .collect();
    GapCensus::new(cfg.p, entries, complete, Method::Oracle)
}

/// One compared gap length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationRow {
    pub gap: u64,
    pub computed: BigUint,
    pub method: Method,
    pub oracle: BigUint,
}

impl VerificationRow {
    pub fn matches(&self) -> bool {
        self.computed == self.oracle
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub p: u64,
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &VerificationRow> {
        self.rows.iter().filter(|r| !r.matches())
    }

    pub fn passed(&self) -> bool {
        self.mismatches().next().is_none()
    }
}

/// Compares computed counts with the enumeration for each gap in `gaps`.
pub fn verify_formula_against_oracle(p: u64, gaps: &[u64]) -> Result<VerificationReport> {
    let oracle = enumerate_coprime_gaps(&SieveConfig::new(p)?);
    verify_against_census(&GapEngine::default(), &oracle, gaps)
}

/// Same as [`verify_formula_against_oracle`] with a caller-supplied engine
/// and oracle census.
pub fn verify_against_census(
    engine: &GapEngine,
    oracle: &GapCensus,
    gaps: &[u64],
) -> Result<VerificationReport> {
    if !oracle.is_complete() {
        return Err(Error::IncompleteCensus(oracle.prime()));
    }
    let p = oracle.prime();
    let rows = gaps
        .iter()
        .map(|&gap| {
            let (computed, method) = engine.count(gap, p)?;
            Ok(VerificationRow {
                gap,
                computed,
                method,
                oracle: oracle.count(gap).expect("complete census"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { p, rows })
}
