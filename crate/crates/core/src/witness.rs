//! Constructive unit witnesses.
//!
//! Every construction here searches the arithmetic progression
//! `y = 1 + t·n/p^(s+1)`, `t ∈ [0, p-1]`, restricted to units. Members of the
//! progression fix every residue divisible by `p^(s+1)`, which is what lets the
//! certifying dispatcher move one term below `n/2` without disturbing the
//! terms it already placed there.

use std::fmt;

use crate::arith::{gcd, valuation, GroupContext};
use crate::error::{Error, Result};
use crate::index::{self, side, Side};
use crate::sequence::ZsSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFamily {
    pub n: u64,
    pub p: u64,
    pub s: u32,
    /// `n / p^(s+1)`.
    pub alpha: u64,
    /// Every `t ∈ [0, p-1]` with `1 + t·alpha` a unit, ascending.
    pub unit_ts: Vec<u64>,
}

impl WitnessFamily {
    pub fn multiplier(&self, t: u64) -> u64 {
        1 + t * self.alpha
    }

    /// `(t, 1 + t·alpha)` for the unit members, ascending in `t`.
    pub fn members(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.unit_ts.iter().map(|&t| (t, self.multiplier(t)))
    }

    /// Number of `t ∈ [0, p-1]` whose multiplier is not a unit.
    pub fn excluded_count(&self) -> u64 {
        self.p - self.unit_ts.len() as u64
    }
}

fn require_prime_divisor(ctx: &GroupContext, p: u64) -> Result<u32> {
    match ctx.exponent_of(p) {
        0 => Err(Error::Precondition(format!(
            "{p} is not a prime divisor of {}",
            ctx.n()
        ))),
        e => Ok(e),
    }
}

pub fn unit_family(ctx: &GroupContext, p: u64, s: u32) -> Result<WitnessFamily> {
    let n = ctx.n();
    if ctx.exponent_of(p) < s + 1 {
        return Err(Error::InvalidFamily { n, p, s });
    }
    let alpha = n / p.pow(s + 1);
    let unit_ts = (0..p).filter(|&t| ctx.is_unit(1 + t * alpha)).collect();
    Ok(WitnessFamily {
        n,
        p,
        s,
        alpha,
        unit_ts,
    })
}

/// Smallest `k`, `j` in the `(p, 0)` family with `|v + kα|_n < n/2` and `|v + jα|_n > n/2`.
pub fn shift_witnesses(ctx: &GroupContext, v: u64, p: u64) -> Result<(u64, u64)> {
    let n = ctx.n();
    if !ctx.coprime_to_six() || ctx.is_prime() {
        return Err(Error::Precondition(format!(
            "{n} must be composite and coprime to 6"
        )));
    }
    if v == 0 || v >= n {
        return Err(Error::Precondition(format!("{v} outside [1, {}]", n - 1)));
    }
    require_prime_divisor(ctx, p)?;
    let family = unit_family(ctx, p, 0)?;
    let shifted = |t: u64| ctx.reduce((v + t * family.alpha) as i128);
    let below = family.unit_ts.iter().copied().find(|&t| side(shifted(t), n) == Side::Below);
    let above = family.unit_ts.iter().copied().find(|&t| side(shifted(t), n) == Side::Above);
    match (below, above) {
        (Some(k), Some(j)) => Ok((k, j)),
        _ => Err(Error::LemmaViolation(format!(
            "no two-sided shift of {v} in the ({p}, 0) family mod {n}"
        ))),
    }
}

/// Smallest unit `y = 1 + tα` of the `(p, 0)` family with `|y·v|_n < n/2`.
pub fn scale_witness_below(ctx: &GroupContext, v: u64, p: u64) -> Result<u64> {
    let n = ctx.n();
    if v == 0 || v >= n {
        return Err(Error::Precondition(format!("{v} outside [1, {}]", n - 1)));
    }
    require_prime_divisor(ctx, p)?;
    if v % p == 0 {
        return Err(Error::Precondition(format!("{p} divides {v}")));
    }
    unit_family(ctx, p, 0)?
        .members()
        .map(|(_, y)| y)
        .find(|&y| side(ctx.mul(y, v), n) == Side::Below)
        .ok_or_else(|| {
            Error::LemmaViolation(format!("no family unit sends {v} below {n}/2 (p = {p})"))
        })
}

/// Smallest `y` of the `(p, s)` family with `|y·β|_n < n/2`, where `p^s ‖ β`.
///
/// Works over `n / p^s` with `β / p^s`, which is coprime to `p`, then scales back.
pub fn cor_witness(ctx: &GroupContext, beta: u64, p: u64, s: u32) -> Result<u64> {
    let n = ctx.n();
    if beta == 0 || beta >= n {
        return Err(Error::Precondition(format!("{beta} outside [1, {}]", n - 1)));
    }
    if ctx.exponent_of(p) < s + 1 {
        return Err(Error::InvalidFamily { n, p, s });
    }
    if valuation(beta, p) != s {
        return Err(Error::Precondition(format!(
            "{p}^{s} must divide {beta} exactly"
        )));
    }
    let scale = p.pow(s);
    let y = if s == 0 {
        scale_witness_below(ctx, beta, p)?
    } else {
        scale_witness_below(&GroupContext::new(n / scale)?, beta / scale, p)?
    };
    if !ctx.is_unit(y) || side(ctx.mul(y, beta), n) != Side::Below {
        return Err(Error::LemmaViolation(format!(
            "reduced witness {y} does not lift for beta = {beta}, n = {n}"
        )));
    }
    Ok(y)
}

/// Normalizing unit `w` and doubling unit `u` for a pair with equal gcd.
///
/// `w` sends `x1` to `d = gcd(n, x1)`; `u` is `2^(s+1)` chosen so that
/// `2^s·d < n/4 <= 2^s·k·d < n/2`, where `w·x2 = n - k·d`. Both are `1` when the
/// pair already lies below `n/2`.
fn pair_witness_parts(ctx: &GroupContext, x1: u64, x2: u64) -> Result<(u64, u64)> {
    let n = ctx.n();
    let d = ctx.f(x1);
    if d != ctx.f(x2) || d == 1 {
        return Err(Error::Precondition(format!(
            "gcd({n}, {x1}) and gcd({n}, {x2}) must agree and exceed 1"
        )));
    }
    if (x1 + x2) % n == 0 {
        return Err(Error::Precondition(format!("{x1} + {x2} is zero mod {n}")));
    }
    if n % 2 == 0 {
        return Err(Error::Precondition(format!("{n} must be odd")));
    }
    if side(x1, n) == Side::Below && side(x2, n) == Side::Below {
        return Ok((1, 1));
    }
    let w = ctx.unit_mapping(x1, d)?;
    let x2 = ctx.mul(w, x2);
    if side(x2, n) == Side::Below {
        return Ok((w, 1));
    }
    let kd = n - x2;
    let mut u = 2u64;
    let mut scaled = kd;
    while 4 * scaled < n {
        scaled *= 2;
        u *= 2;
    }
    Ok((w, u % n))
}

/// A unit sending both `x1` and `x2` below `n/2`, given `gcd(n, x1) = gcd(n, x2) > 1`.
pub fn pair_witness_equal_gcd(ctx: &GroupContext, x1: u64, x2: u64) -> Result<u64> {
    let (w, u) = pair_witness_parts(ctx, x1, x2)?;
    let m = ctx.mul(u, w);
    if side(ctx.mul(m, x1), ctx.n()) != Side::Below || side(ctx.mul(m, x2), ctx.n()) != Side::Below
    {
        return Err(Error::LemmaViolation(format!(
            "doubling failed for ({x1}, {x2}) mod {}",
            ctx.n()
        )));
    }
    Ok(m)
}

/// `v = t·alpha + r` with `0 <= r < alpha`.
pub fn decompose_by_alpha(v: u64, alpha: u64) -> (u64, u64) {
    (v / alpha, v % alpha)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySums {
    /// `(t, Σ|y·x_i|_n / n)` for each unit `y = 1 + tα` of the family.
    pub entries: Vec<(u64, u64)>,
    /// Sum of all residues over the family, `n · Σ k_t`.
    pub total: u64,
}

pub fn orbit_family_sums(ctx: &GroupContext, s: &ZsSequence, p: u64, exp: u32) -> Result<FamilySums> {
    if s.len() != 4 || !s.is_zero_sum() {
        return Err(Error::InvalidSequence(format!(
            "{s} is not a zero-sum sequence of length four"
        )));
    }
    let family = unit_family(ctx, p, exp)?;
    let n = ctx.n();
    let entries: Vec<(u64, u64)> = family
        .members()
        .map(|(t, y)| (t, index::unit_sum(s.terms(), y, n) / n))
        .collect();
    let total = n * entries.iter().map(|&(_, k)| k).sum::<u64>();
    Ok(FamilySums { entries, total })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// `Σ |m·x_i|_n = n`.
    SumN,
    AtMostOneSide,
    /// `Σ |m·x_i|_n = 3n`.
    Sum3N,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::SumN => "SumN",
            Criterion::AtMostOneSide => "AtMostOneSide",
            Criterion::Sum3N => "Sum3N",
        })
    }
}

impl Criterion {
    /// The strongest criterion the values satisfy, if any.
    pub fn classify(values: &[u64], n: u64) -> Option<Self> {
        let sum: u64 = values.iter().sum();
        if sum == n {
            Some(Criterion::SumN)
        } else if sum == 3 * n {
            Some(Criterion::Sum3N)
        } else if index::values_at_most_one_side(values, n) {
            Some(Criterion::AtMostOneSide)
        } else {
            None
        }
    }

    pub fn holds(self, values: &[u64], n: u64) -> bool {
        let sum: u64 = values.iter().sum();
        match self {
            Criterion::SumN => sum == n,
            Criterion::Sum3N => sum == 3 * n,
            Criterion::AtMostOneSide => index::values_at_most_one_side(values, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCertificate {
    pub sequence: ZsSequence,
    pub m: u64,
    pub criterion: Criterion,
    /// `|m·x_i|_n` in term order.
    pub transformed: Vec<u64>,
    pub index_claim: u64,
}

impl UnitCertificate {
    /// Re-checks the unit, the criterion and the claimed index from scratch.
    pub fn validate(&self, ctx: &GroupContext) -> Result<()> {
        let n = ctx.n();
        let fail = |why: String| Err(Error::CertificateValidation(format!("{}: {why}", self.sequence)));
        if !ctx.is_unit(self.m) {
            return fail(format!("{} is not a unit", self.m));
        }
        if self.transformed != index::transformed(&self.sequence, self.m) {
            return fail("transformed values do not match".into());
        }
        if !self.criterion.holds(&self.transformed, n) {
            return fail(format!("criterion {} does not hold", self.criterion));
        }
        let oracle = index::index_oracle(&self.sequence, ctx);
        if oracle.as_integer() != Some(self.index_claim) {
            return fail(format!("oracle index {} differs", oracle.index_value()));
        }
        Ok(())
    }

    /// `n:x1,x2,x3,x4 m=<unit> criterion=<name> path=<labels>`.
    pub fn to_line(&self, trace: &WitnessTrace) -> String {
        format!(
            "{} m={} criterion={} path={}",
            self.sequence,
            self.m,
            self.criterion,
            trace.path.join(",")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WitnessTrace {
    pub path: Vec<&'static str>,
    /// Units applied in order; their product is the certificate's `m`.
    pub multipliers: Vec<u64>,
}

impl WitnessTrace {
    pub fn used_fallback(&self) -> bool {
        self.path.contains(&FALLBACK)
    }

    pub fn product(&self, ctx: &GroupContext) -> u64 {
        self.multipliers.iter().fold(1 % ctx.n(), |acc, &y| ctx.mul(acc, y) % ctx.n())
    }
}

pub const FALLBACK: &str = "fallback";

/// Running multiplier with its trace.
struct Walk<'a> {
    ctx: &'a GroupContext,
    terms: &'a [u64],
    m: u64,
    trace: WitnessTrace,
}

impl<'a> Walk<'a> {
    fn new(ctx: &'a GroupContext, terms: &'a [u64]) -> Self {
        Self {
            ctx,
            terms,
            m: 1,
            trace: WitnessTrace::default(),
        }
    }

    fn label(&mut self, label: &'static str) {
        self.trace.path.push(label);
    }

    fn apply(&mut self, label: &'static str, y: u64) {
        self.label(label);
        if y != 1 {
            self.m = self.ctx.mul(y, self.m);
            self.trace.multipliers.push(y);
        }
    }

    fn apply_nontrivial(&mut self, label: &'static str, y: u64) {
        if y != 1 {
            self.apply(label, y);
        }
    }

    fn value(&self, i: usize) -> u64 {
        self.ctx.mul(self.m, self.terms[i])
    }

    fn values_with(&self, y: u64) -> [u64; 4] {
        let my = self.ctx.mul(y, self.m);
        std::array::from_fn(|i| self.ctx.mul(my, self.terms[i]))
    }
}

fn smallest_prime(x: u64) -> u64 {
    (2..).find(|p| x % p == 0).expect("x > 1")
}

/// Sends terms `a` and `b` (sharing a prime with `gcd(f_a, f_b) = d > 1`) below
/// `n/2`, then moves `c` below with a family that fixes both.
fn shared_prime_route(
    walk: &mut Walk<'_>,
    (a, b, c): (usize, usize, usize),
    labels: SharedLabels,
) -> Result<()> {
    let ctx = walk.ctx;
    let (fa, fb) = (ctx.f(walk.terms[a]), ctx.f(walk.terms[b]));
    let d = gcd(fa, fb);
    debug_assert!(d > 1);
    if fa == fb {
        walk.label(labels.equal);
        walk.label("L2.4");
        let (w, u) = pair_witness_parts(ctx, walk.value(a), walk.value(b))?;
        walk.apply_nontrivial("normalize", w);
        walk.apply_nontrivial("L2.4-doubling", u);
    } else {
        walk.label(labels.unequal);
        let (big, small) = if fa != d { (a, b) } else { (b, a) };
        let f_big = ctx.f(walk.terms[big]);
        let w = ctx.unit_mapping(walk.value(big), f_big)?;
        walk.apply_nontrivial("normalize", w);
        let p = smallest_prime(f_big / d);
        let s = valuation(ctx.f(walk.terms[small]), p);
        let y = cor_witness(ctx, walk.value(small), p, s)?;
        walk.apply("C2.3", y);
    }
    let p = smallest_prime(d);
    let y = scale_witness_below(ctx, walk.value(c), p)?;
    walk.apply("L2.2-scale", y);
    Ok(())
}

#[derive(Clone, Copy)]
struct SharedLabels {
    equal: &'static str,
    unequal: &'static str,
}

/// Family search used when the leading term shares no prime with the others.
///
/// Tries the `(p, s)` families of each term with `f > 1` whose members fix that
/// term, first on the sequence as given and then after normalizing the term to
/// `f` and to `(n - f)/2`.
fn coprime_family_search(walk: &mut Walk<'_>, leads: &[usize], label: &'static str) -> Result<bool> {
    let ctx = walk.ctx;
    let n = ctx.n();
    for &lead in leads {
        let x = walk.terms[lead];
        let f = ctx.f(x);
        let mut targets = vec![None, Some(f)];
        if (n - f) % 2 == 0 {
            targets.push(Some((n - f) / 2));
        }
        for target in targets {
            let w = match target {
                None => 1,
                Some(t) => ctx.unit_mapping(walk.value(lead), t)?,
            };
            let mut primes: Vec<(u64, u32)> = crate::arith::factorize(f)?;
            primes.reverse();
            for (p, e) in primes {
                for s in 0..e {
                    let family = unit_family(ctx, p, s)?;
                    for (_, y) in family.members() {
                        let yw = ctx.mul(y, w);
                        if Criterion::classify(&walk.values_with(yw), n).is_some() {
                            walk.label(label);
                            walk.apply_nontrivial("normalize", w);
                            walk.apply("family-search", y);
                            return Ok(true);
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Finds a unit certifying index one for a minimal zero-sum sequence of length four.
///
/// Accepts sequences with `gcd(n, 6) = 1`, `n` composite,
/// `gcd(n, x_1, ..., x_4) = 1` and some `gcd(n, x_i) > 1`. The returned
/// certificate has been validated against the index oracle.
pub fn certify_index_one(
    ctx: &GroupContext,
    s: &ZsSequence,
) -> Result<(UnitCertificate, WitnessTrace)> {
    let n = ctx.n();
    check_hypotheses(ctx, s)?;
    let terms = s.terms();
    let mut walk = Walk::new(ctx, terms);

    let immediate = Criterion::classify(&walk.values_with(1), n);
    match immediate {
        Some(Criterion::SumN) => walk.label("SumN-immediate"),
        Some(Criterion::Sum3N) => walk.label("Sum3N-immediate"),
        Some(Criterion::AtMostOneSide) => walk.label("AtMostOneSide-immediate"),
        None => structured(&mut walk)?,
    }

    if Criterion::classify(&walk.values_with(1), n).is_none() {
        walk.label(FALLBACK);
        let m = ctx
            .units()
            .iter()
            .copied()
            .find(|&m| index::unit_sum(terms, m, n) == n)
            .ok_or_else(|| {
                Error::CertificateValidation(format!("{s}: no unit has sum {n}"))
            })?;
        walk.m = 1;
        walk.trace.multipliers.clear();
        walk.apply("full-scan", m);
    }

    let transformed = index::transformed(s, walk.m);
    let criterion = Criterion::classify(&transformed, n)
        .ok_or_else(|| Error::CertificateValidation(format!("{s}: m = {} meets no criterion", walk.m)))?;
    let cert = UnitCertificate {
        sequence: s.clone(),
        m: walk.m,
        criterion,
        transformed,
        index_claim: 1,
    };
    cert.validate(ctx)?;
    if walk.trace.product(ctx) != walk.m % n {
        return Err(Error::CertificateValidation(format!(
            "{s}: trace multipliers do not compose to {}",
            walk.m
        )));
    }
    Ok((cert, walk.trace))
}

fn check_hypotheses(ctx: &GroupContext, s: &ZsSequence) -> Result<()> {
    let n = ctx.n();
    if ctx.n() != s.n() {
        return Err(Error::Precondition(format!("context {n} does not match {s}")));
    }
    if s.len() != 4 || !s.is_minimal_zero_sum() {
        return Err(Error::HypothesesNotMet(format!(
            "{s} is not a minimal zero-sum sequence of length four"
        )));
    }
    if !ctx.coprime_to_six() || ctx.is_prime() {
        return Err(Error::HypothesesNotMet(format!(
            "{n} must be composite and coprime to 6"
        )));
    }
    let profile = s.gcd_profile();
    if profile.overall_gcd != 1 {
        return Err(Error::HypothesesNotMet(format!(
            "{s}: gcd(n, x_1, ..., x_4) = {}",
            profile.overall_gcd
        )));
    }
    if profile.max_f() == 1 {
        return Err(Error::HypothesesNotMet(format!(
            "{s}: every term is coprime to {n}"
        )));
    }
    Ok(())
}

fn structured(walk: &mut Walk<'_>) -> Result<()> {
    let ctx = walk.ctx;
    let f: Vec<u64> = walk.terms.iter().map(|&x| ctx.f(x)).collect();
    let lead = (0..4).max_by_key(|&i| (f[i], std::cmp::Reverse(i))).unwrap();
    let others: Vec<usize> = (0..4).filter(|&i| i != lead).collect();

    // two prime powers with every term sharing a factor with n
    if ctx.distinct_primes() == 2 && f.iter().all(|&v| v > 1) {
        let partner = others
            .iter()
            .copied()
            .find(|&i| gcd(f[lead], f[i]) > 1)
            .expect("each prime divides exactly two terms");
        let third = others.iter().copied().find(|&i| i != partner).unwrap();
        return shared_prime_route(
            walk,
            (lead, partner, third),
            SharedLabels {
                equal: "T3.1-Case1",
                unequal: "T3.1-Case2",
            },
        );
    }

    if let Some(partner) = others.iter().copied().find(|&i| gcd(f[lead], f[i]) > 1) {
        walk.label("T1.3-Case1");
        let third = others.iter().copied().find(|&i| i != partner).unwrap();
        return shared_prime_route(
            walk,
            (lead, partner, third),
            SharedLabels {
                equal: "L2.7",
                unequal: "L2.7",
            },
        );
    }

    walk.label("T1.3-Case2");
    // leads ordered by largest prime factor of f, as the family owner
    let mut leads: Vec<usize> = (0..4).filter(|&i| f[i] > 1).collect();
    let largest_prime = |x: u64| crate::arith::factorize(x).ok().and_then(|v| v.last().map(|&(p, _)| p));
    leads.sort_by_key(|&i| (std::cmp::Reverse(largest_prime(f[i])), std::cmp::Reverse(f[i]), i));
    let label = if leads.len() > 1 { "L2.8" } else { "L2.9" };
    coprime_family_search(walk, &leads, label)?;
    Ok(())
}
