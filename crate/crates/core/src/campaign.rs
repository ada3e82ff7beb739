//! Verification campaigns over ranges of moduli.
//!
//! Work inside one `n` is split by the smallest term `x1`; blocks are merged in
//! ascending `x1`, so records do not depend on scheduling. Sampled runs draw
//! from a ChaCha8 stream keyed by `(seed, n)`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, GroupContext};
use crate::error::{Error, Result};
use crate::index::index_oracle;
use crate::sequence::{complete_triple, minimal4_with_first, ZsSequence};
use crate::witness::certify_index_one;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    /// `gcd(n, x_1..x_4) = 1` and some `gcd(n, x_i) > 1`; `n` composite, coprime to 6.
    Theorem13,
    /// Every sequence; `n = p^a q^b` coprime to 6.
    Theorem31,
    /// Every sequence, any `n`.
    All,
    /// Every sequence; `n` coprime to 6.
    Conjecture,
}

impl Filter {
    pub fn admits_modulus(self, ctx: &GroupContext) -> bool {
        match self {
            Filter::Theorem13 => ctx.coprime_to_six() && !ctx.is_prime(),
            Filter::Theorem31 => ctx.coprime_to_six() && ctx.distinct_primes() == 2,
            Filter::All => true,
            Filter::Conjecture => ctx.coprime_to_six(),
        }
    }

    pub fn admits(self, s: &ZsSequence) -> bool {
        match self {
            Filter::Theorem13 => s.gcd_profile().meets_main_hypothesis(),
            _ => true,
        }
    }

    /// Theorem filters also run the certifying dispatcher.
    pub fn certifies(self) -> bool {
        matches!(self, Filter::Theorem13 | Filter::Theorem31)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        })
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Filter::Theorem13 => "theorem13",
            Filter::Theorem31 => "theorem31",
            Filter::All => "all",
            Filter::Conjecture => "conjecture",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sampled" => Ok(Mode::Sampled),
            _ => Err(Error::Usage(format!("unknown mode {s:?}"))),
        }
    }
}

impl FromStr for Filter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem13" => Ok(Filter::Theorem13),
            "theorem31" => Ok(Filter::Theorem31),
            "all" => Ok(Filter::All),
            "conjecture" => Ok(Filter::Conjecture),
            _ => Err(Error::Usage(format!("unknown filter {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub filter: Filter,
    /// Check one representative per unit orbit. Exhaustive mode only.
    pub orbits: bool,
    pub samples: usize,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn exhaustive(filter: Filter) -> Self {
        Self {
            mode: Mode::Exhaustive,
            filter,
            orbits: true,
            samples: 0,
            seed: 0,
        }
    }

    pub fn sampled(filter: Filter, samples: usize, seed: u64) -> Self {
        Self {
            mode: Mode::Sampled,
            filter,
            orbits: false,
            samples,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub sequence: String,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub n: u64,
    pub mode: Mode,
    pub filter: Filter,
    pub sequences_checked: u64,
    /// Orbit representatives run through the oracle; zero when orbit dedup is off.
    pub orbits_checked: u64,
    pub violations: Vec<Violation>,
    pub fallback_uses: u64,
    /// Dispatcher errors on sequences that met its hypotheses.
    pub certificate_errors: Vec<String>,
    pub max_index_seen: u64,
    pub elapsed_secs: f64,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.fallback_uses == 0 && self.certificate_errors.is_empty()
    }
}

#[derive(Debug, Default)]
struct Tally {
    sequences: u64,
    orbits: u64,
    violations: Vec<Violation>,
    fallbacks: u64,
    cert_errors: Vec<String>,
    max_index: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.sequences += other.sequences;
        self.orbits += other.orbits;
        self.violations.extend(other.violations);
        self.fallbacks += other.fallbacks;
        self.cert_errors.extend(other.cert_errors);
        self.max_index = self.max_index.max(other.max_index);
        self
    }

    /// Runs the oracle (and the dispatcher, if asked) on one sequence.
    fn check(&mut self, ctx: &GroupContext, s: &ZsSequence, certify: bool, orbit: bool) {
        let index = index_oracle(s, ctx).as_integer().unwrap_or(0);
        self.max_index = self.max_index.max(index);
        if index != 1 {
            if orbit {
                let mut members: Vec<ZsSequence> = ctx
                    .units()
                    .iter()
                    .map(|&u| s.scale(u).expect("unit"))
                    .collect();
                members.sort();
                members.dedup();
                self.violations.extend(members.iter().map(|m| Violation {
                    sequence: m.to_string(),
                    index,
                }));
            } else {
                self.violations.push(Violation {
                    sequence: s.to_string(),
                    index,
                });
            }
        }
        if certify && s.gcd_profile().meets_main_hypothesis() {
            match certify_index_one(ctx, s) {
                Ok((_, trace)) if trace.used_fallback() => self.fallbacks += 1,
                Ok(_) => {}
                Err(e) => self.cert_errors.push(format!("{s}: {e}")),
            }
        }
    }
}

fn admissible(n: u64, filter: Filter) -> Result<GroupContext> {
    if n < 5 {
        return Err(Error::Usage(format!("n = {n} is below 5")));
    }
    let ctx = GroupContext::new(n)?;
    if !filter.admits_modulus(&ctx) {
        return Err(Error::Usage(format!("n = {n} does not fit filter {filter}")));
    }
    Ok(ctx)
}

/// Verifies every (or a sample of) minimal zero-sum sequence of length four over `Z_n`.
pub fn verify_n(n: u64, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let ctx = admissible(n, opts.filter)?;
    let start = Instant::now();
    let certify = opts.filter.certifies();
    let tally = match opts.mode {
        Mode::Exhaustive => {
            let orbit = opts.orbits;
            (1..n)
                .into_par_iter()
                .map(|x1| {
                    let mut t = Tally::default();
                    for s in minimal4_with_first(n, x1).filter(|s| opts.filter.admits(s)) {
                        t.sequences += 1;
                        if orbit {
                            if !s.is_canonical(&ctx) {
                                continue;
                            }
                            t.orbits += 1;
                        }
                        t.check(&ctx, &s, certify, orbit);
                    }
                    t
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Tally::default(), Tally::merge)
        }
        Mode::Sampled => {
            if opts.samples == 0 {
                return Err(Error::Usage("sampled mode needs a positive sample size".into()));
            }
            let samples = draw_samples(n, opts.filter, opts.samples, opts.seed);
            samples
                .par_iter()
                .map(|s| {
                    let mut t = Tally {
                        sequences: 1,
                        ..Tally::default()
                    };
                    t.check(&ctx, s, certify, false);
                    t
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Tally::default(), Tally::merge)
        }
    };
    let mut violations = tally.violations;
    violations.sort();
    violations.dedup();
    Ok(VerificationRecord {
        n,
        mode: opts.mode,
        filter: opts.filter,
        sequences_checked: tally.sequences,
        orbits_checked: tally.orbits,
        violations,
        fallback_uses: tally.fallbacks,
        certificate_errors: tally.cert_errors,
        max_index_seen: tally.max_index,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Attempts per requested sample before giving up on a sparse filter.
const MAX_ATTEMPTS_PER_SAMPLE: usize = 100_000;

/// Uniform sample (with replacement) of minimal length-four sequences passing `filter`.
///
/// Each attempt draws `x1, x2, x3` in that order with `gen_range(1..n)` from
/// `ChaCha8Rng::seed_from_u64(seed)` on stream `n`, and is kept only if the
/// triple is non-decreasing and completes to a minimal sequence that passes the
/// filter. Every minimal sequence has exactly one such triple, so accepted
/// draws are uniform.
pub fn draw_samples(n: u64, filter: Filter, samples: usize, seed: u64) -> Vec<ZsSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    let mut out = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    let limit = samples.saturating_mul(MAX_ATTEMPTS_PER_SAMPLE);
    while out.len() < samples && attempts < limit {
        attempts += 1;
        let x1 = rng.gen_range(1..n);
        let x2 = rng.gen_range(1..n);
        let x3 = rng.gen_range(1..n);
        if let Some(s) = complete_triple(n, x1, x2, x3) {
            if filter.admits(&s) {
                out.push(s);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CampaignOptions {
    pub verify: VerifyOptions,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub moduli: u64,
    pub sequences_checked: u64,
    pub orbits_checked: u64,
    pub violations: u64,
    pub fallback_uses: u64,
    pub certificate_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    /// One record per admissible `n`, ascending.
    pub records: Vec<VerificationRecord>,
    pub seed: Option<u64>,
    pub totals: Totals,
    pub verdict: Verdict,
}

pub fn campaign(n_from: u64, n_to: u64, opts: &CampaignOptions) -> Result<CampaignReport> {
    if n_from > n_to {
        return Err(Error::Usage(format!("empty range {n_from}..{n_to}")));
    }
    let v = opts.verify;
    if v.mode == Mode::Sampled && v.samples == 0 {
        return Err(Error::Usage("sampled mode needs --samples".into()));
    }
    let ns: Vec<u64> = (n_from.max(5)..=n_to)
        .filter(|&n| admissible(n, v.filter).is_ok())
        .collect();
    let run = || -> Result<Vec<VerificationRecord>> {
        ns.par_iter().map(|&n| verify_n(n, &v)).collect()
    };
    let records = match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {j} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut totals = Totals::default();
    for r in &records {
        totals.moduli += 1;
        totals.sequences_checked += r.sequences_checked;
        totals.orbits_checked += r.orbits_checked;
        totals.violations += r.violations.len() as u64;
        totals.fallback_uses += r.fallback_uses;
        totals.certificate_errors += r.certificate_errors.len() as u64;
    }
    let verdict = if records.iter().all(VerificationRecord::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CampaignReport {
        records,
        seed: (v.mode == Mode::Sampled).then_some(v.seed),
        totals,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub n: u64,
    /// `n:x1,x2,x3,x4`.
    pub sequence: String,
    pub index: u64,
}

/// Minimal length-four sequences of index at least two, for every `n` in range with `gcd(n, 6) > 1`.
///
/// Findings come out ascending in `(n, sequence)`. With `first_only`, each `n`
/// contributes at most its lexicographically first finding.
pub fn counterexample_scan(n_from: u64, n_to: u64, first_only: bool) -> Result<Vec<Finding>> {
    if n_from > n_to {
        return Err(Error::Usage(format!("empty range {n_from}..{n_to}")));
    }
    let ns: Vec<u64> = (n_from.max(2)..=n_to).filter(|&n| gcd(n, 6) != 1).collect();
    let per_n: Vec<Vec<Finding>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<Finding>> {
            let ctx = GroupContext::new(n)?;
            let blocks: Vec<Vec<Finding>> = (1..n)
                .into_par_iter()
                .map(|x1| {
                    let mut found = Vec::new();
                    for s in minimal4_with_first(n, x1) {
                        let index = index_oracle(&s, &ctx).as_integer().unwrap_or(0);
                        if index >= 2 {
                            found.push(Finding {
                                n,
                                sequence: s.to_string(),
                                index,
                            });
                            if first_only {
                                break;
                            }
                        }
                    }
                    found
                })
                .collect();
            let mut all: Vec<Finding> = blocks.into_iter().flatten().collect();
            if first_only {
                all.truncate(1);
            }
            Ok(all)
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}
