//! The index of a sequence and the two unit criteria that certify index one.
//!
//! For a unit `u`, the sum `Σ |u·x_i|_n` is the numerator of `‖S‖_g` for the
//! generator `g = u⁻¹`, so the index is the minimum of that sum over all units,
//! divided by `n`. Everything stays in integers; ratios are exact.

use num_rational::Ratio;

use crate::arith::{self, gcd, GroupContext};
use crate::error::{Error, Result};
use crate::sequence::ZsSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexResult {
    /// Minimum over units of `Σ |u·x_i|_n`.
    pub numerator: u64,
    pub n: u64,
    /// Smallest unit attaining the minimum.
    pub witness_unit: u64,
}

impl IndexResult {
    pub fn index_value(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.n)
    }

    /// `Some(k)` when the index is the integer `k`.
    pub fn as_integer(&self) -> Option<u64> {
        (self.numerator % self.n == 0).then_some(self.numerator / self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexOptions {
    /// Stop at the first unit whose sum equals `n`, the floor for zero-sum input.
    pub early_exit: bool,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self { early_exit: true }
    }
}

fn check_unit(u: u64, n: u64) -> Result<()> {
    if gcd(u % n, n) != 1 {
        return Err(Error::NotAUnit { value: u, modulus: n });
    }
    Ok(())
}

/// `Σ |u·x_i|_n` without the unit check.
#[inline]
pub(crate) fn unit_sum(terms: &[u64], u: u64, n: u64) -> u64 {
    terms.iter().map(|&x| arith::mul_residue(u, x, n)).sum()
}

/// `Σ |u·x_i|_n`, the integer numerator of [`g_norm`].
pub fn unit_sum_checked(s: &ZsSequence, u: u64) -> Result<u64> {
    check_unit(u, s.n())?;
    Ok(unit_sum(s.terms(), u, s.n()))
}

/// `Σ |u·x_i|_n / n` as an exact ratio.
pub fn g_norm(s: &ZsSequence, u: u64) -> Result<Ratio<u64>> {
    Ok(Ratio::new(unit_sum_checked(s, u)?, s.n()))
}

pub fn index_oracle(s: &ZsSequence, ctx: &GroupContext) -> IndexResult {
    index_oracle_with(s, ctx, IndexOptions::default())
}

pub fn index_oracle_with(s: &ZsSequence, ctx: &GroupContext, opts: IndexOptions) -> IndexResult {
    debug_assert_eq!(ctx.n(), s.n());
    let n = s.n();
    let mut best = IndexResult {
        numerator: u64::MAX,
        n,
        witness_unit: 0,
    };
    for &u in ctx.units() {
        let sum = unit_sum(s.terms(), u, n);
        if sum < best.numerator {
            best.numerator = sum;
            best.witness_unit = u;
            if opts.early_exit && sum == n {
                break;
            }
        }
    }
    best
}

/// Position of a residue relative to `n/2`; an exact midpoint (even `n`) is neither side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Middle,
    Above,
}

#[inline]
pub fn side(value: u64, n: u64) -> Side {
    match (2 * value).cmp(&n) {
        std::cmp::Ordering::Less => Side::Below,
        std::cmp::Ordering::Equal => Side::Middle,
        std::cmp::Ordering::Greater => Side::Above,
    }
}

fn check_four(s: &ZsSequence, m: u64) -> Result<()> {
    if s.len() != 4 {
        return Err(Error::InvalidSequence(format!(
            "criterion needs four terms, got {}",
            s.len()
        )));
    }
    check_unit(m, s.n())
}

/// At most one of the four values lies below `n/2`, or at most one lies above.
pub(crate) fn values_at_most_one_side(values: &[u64], n: u64) -> bool {
    let below = values.iter().filter(|&&v| side(v, n) == Side::Below).count();
    let above = values.iter().filter(|&&v| side(v, n) == Side::Above).count();
    below <= 1 || above <= 1
}

/// Values `|m·x_i|_n` for each term.
pub fn transformed(s: &ZsSequence, m: u64) -> Vec<u64> {
    s.terms()
        .iter()
        .map(|&x| arith::mul_residue(m, x, s.n()))
        .collect()
}

pub fn criterion_one(s: &ZsSequence, m: u64) -> Result<bool> {
    check_four(s, m)?;
    Ok(values_at_most_one_side(&transformed(s, m), s.n()))
}

/// `Σ |m·x_i|_n = 3n`; the unit `n - m` then has sum `n`.
pub fn criterion_two(s: &ZsSequence, m: u64) -> Result<bool> {
    check_four(s, m)?;
    Ok(unit_sum(s.terms(), m, s.n()) == 3 * s.n())
}
