//! Exact arithmetic in `Z_n`.
//!
//! Residues use the representative range `[1, n]` throughout, so the zero
//! class is written as `n` rather than `0`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `a * b mod n` in `[0, n)`, widened so that moduli up to `u64::MAX` are safe.
#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    if n <= u32::MAX as u64 {
        (a % n) * (b % n) % n
    } else {
        ((a as u128 * b as u128) % n as u128) as u64
    }
}

/// Representative of `x` in `[1, n]`; assumes `n >= 1`.
#[inline]
pub fn residue(x: i128, n: u64) -> u64 {
    let r = x.rem_euclid(n as i128) as u64;
    if r == 0 {
        n
    } else {
        r
    }
}

/// `|a * b|_n` for non-negative `a`, `b`.
#[inline]
pub fn mul_residue(a: u64, b: u64, n: u64) -> u64 {
    match mul_mod(a, b, n) {
        0 => n,
        r => r,
    }
}

/// A canonical residue `|x|_n`, always in `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// True for the zero class, represented by `n`.
    pub fn is_zero_class(self) -> bool {
        self.value == self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn canonical_residue(x: i128, n: u64) -> Result<Residue> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    Ok(Residue {
        value: residue(x, n),
        modulus: n,
    })
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidModulus(0));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(factors)
}

pub fn is_unit(x: i128, n: u64) -> bool {
    n >= 2 && gcd(x.rem_euclid(n as i128) as u64, n) == 1
}

/// Inverse of `u` modulo `n` in `[1, n - 1]`.
pub fn unit_inverse(u: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    let (mut old_r, mut r) = (u as i128 % n as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotAUnit {
            value: u,
            modulus: n,
        });
    }
    Ok(old_s.rem_euclid(n as i128) as u64)
}

pub fn euler_phi(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    Ok(phi_from_factors(n, &factorize(n)?))
}

fn phi_from_factors(n: u64, factors: &[(u64, u32)]) -> u64 {
    factors.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All units of `Z_n` in ascending order.
pub fn units_stream(n: u64) -> Result<impl Iterator<Item = u64>> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    Ok((1..n).filter(move |&k| gcd(k, n) == 1))
}

/// Exponent of the prime `p` in `x` (`x > 0`).
pub fn valuation(mut x: u64, p: u64) -> u32 {
    let mut e = 0;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    e
}

/// The modulus `n` together with its factorization.
#[derive(Debug, Clone)]
pub struct GroupContext {
    n: u64,
    factors: Vec<(u64, u32)>,
    units: OnceLock<Vec<u64>>,
}

impl PartialEq for GroupContext {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for GroupContext {}

impl GroupContext {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Self {
            n,
            factors: factorize(n)?,
            units: OnceLock::new(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    pub fn distinct_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn coprime_to_six(&self) -> bool {
        gcd(self.n, 6) == 1
    }

    pub fn euler_phi(&self) -> u64 {
        phi_from_factors(self.n, &self.factors)
    }

    /// Units in ascending order, computed once per context.
    pub fn units(&self) -> &[u64] {
        self.units
            .get_or_init(|| (1..self.n).filter(|&k| gcd(k, self.n) == 1).collect())
    }

    pub fn is_unit(&self, x: u64) -> bool {
        gcd(x % self.n, self.n) == 1
    }

    pub fn inverse(&self, u: u64) -> Result<u64> {
        unit_inverse(u, self.n)
    }

    /// `|x|_n`.
    #[inline]
    pub fn reduce(&self, x: i128) -> u64 {
        residue(x, self.n)
    }

    /// `|a * b|_n`.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_residue(a, b, self.n)
    }

    /// `gcd(n, x)`, the quantity written `f(x)`.
    pub fn f(&self, x: u64) -> u64 {
        gcd(self.n, x % self.n)
    }

    /// Smallest unit `w` with `w * from ≡ to (mod n)`, given `gcd(n, from) = gcd(n, to)`.
    pub fn unit_mapping(&self, from: u64, to: u64) -> Result<u64> {
        let d = self.f(from);
        if self.f(to) != d || d == self.n {
            return Err(Error::Precondition(format!(
                "{from} and {to} have different gcd with {}",
                self.n
            )));
        }
        let m = self.n / d;
        let target = if m == 1 {
            0
        } else {
            let from_inv = unit_inverse((from / d) % m, m)?;
            mul_mod((to / d) % m, from_inv, m)
        };
        // lift target mod n/d to a unit mod n
        let mut w = if target == 0 { m } else { target };
        while w < self.n {
            if self.is_unit(w) {
                return Ok(w);
            }
            w += m;
        }
        Err(Error::Precondition(format!(
            "no unit maps {from} to {to} modulo {}",
            self.n
        )))
    }
}
