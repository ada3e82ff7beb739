//! Sequences over `Z_n`, stored as ascending multisets of nonzero residues.

use std::fmt;
use std::str::FromStr;

use crate::arith::{self, gcd, GroupContext};
use crate::error::{Error, Result};

/// Longest sequence accepted; the minimality scan is exponential in the length.
pub const MAX_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZsSequence {
    n: u64,
    terms: Vec<u64>,
}

impl ZsSequence {
    pub fn new(n: u64, mut terms: Vec<u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModulus(n));
        }
        if terms.is_empty() || terms.len() > MAX_LEN {
            return Err(Error::InvalidSequence(format!(
                "length {} outside [1, {MAX_LEN}]",
                terms.len()
            )));
        }
        if let Some(&bad) = terms.iter().find(|&&x| x == 0 || x >= n) {
            return Err(Error::InvalidSequence(format!(
                "term {bad} outside [1, {}]",
                n - 1
            )));
        }
        terms.sort_unstable();
        Ok(Self { n, terms })
    }

    /// Caller guarantees `terms` sorted and inside `[1, n - 1]`.
    pub(crate) fn from_sorted(n: u64, terms: Vec<u64>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(terms.iter().all(|&x| x >= 1 && x < n));
        Self { n, terms }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.terms.iter().sum()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sum() % self.n == 0
    }

    /// Zero-sum with no proper nonempty sub-multiset summing to zero.
    pub fn is_minimal_zero_sum(&self) -> bool {
        is_minimal_zero_sum_terms(&self.terms, self.n)
    }

    pub fn gcd_profile(&self) -> GcdProfile {
        GcdProfile::of(&self.terms, self.n)
    }

    /// `uS`: every term multiplied by the unit `u`, re-sorted.
    pub fn scale(&self, u: u64) -> Result<Self> {
        if gcd(u % self.n, self.n) != 1 {
            return Err(Error::NotAUnit {
                value: u,
                modulus: self.n,
            });
        }
        let mut terms: Vec<u64> = self
            .terms
            .iter()
            .map(|&x| arith::mul_residue(u, x, self.n))
            .collect();
        terms.sort_unstable();
        Ok(Self::from_sorted(self.n, terms))
    }

    /// Lexicographically smallest member of the orbit `{uS : u ∈ U(n)}`.
    pub fn canonical_rep(&self, ctx: &GroupContext) -> Self {
        debug_assert_eq!(ctx.n(), self.n);
        let mut best = self.terms.clone();
        let mut buf = vec![0u64; self.terms.len()];
        for &u in ctx.units() {
            scale_into(&self.terms, u, self.n, &mut buf);
            if buf < best {
                best.copy_from_slice(&buf);
            }
        }
        Self::from_sorted(self.n, best)
    }

    /// True when this sequence is its own orbit representative.
    ///
    /// Equivalent to `self.canonical_rep(ctx) == *self`, but returns as soon as a
    /// smaller orbit member turns up.
    pub fn is_canonical(&self, ctx: &GroupContext) -> bool {
        // the smallest element of any orbit member is at least min f(x_i)
        let min_f = self.terms.iter().map(|&x| gcd(self.n, x)).min();
        if min_f != self.terms.first().copied() {
            return false;
        }
        let mut buf = vec![0u64; self.terms.len()];
        for &u in ctx.units() {
            scale_into(&self.terms, u, self.n, &mut buf);
            if buf < self.terms {
                return false;
            }
        }
        true
    }
}

fn scale_into(terms: &[u64], u: u64, n: u64, out: &mut [u64]) {
    for (o, &x) in out.iter_mut().zip(terms) {
        *o = arith::mul_residue(u, x, n);
    }
    out.sort_unstable();
}

pub(crate) fn is_minimal_zero_sum_terms(terms: &[u64], n: u64) -> bool {
    let k = terms.len();
    if k == 0 || k > MAX_LEN {
        return false;
    }
    let total: u64 = terms.iter().sum();
    if total % n != 0 {
        return false;
    }
    let full = (1u32 << k) - 1;
    (1..full).all(|mask| {
        let s: u64 = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| terms[i])
            .sum();
        s % n != 0
    })
}

impl fmt::Display for ZsSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, x) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for ZsSequence {
    type Err = Error;

    /// Parses `n:x1,x2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (n, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| parse_err("expected n:x1,x2,..."))?;
        let n: u64 = n.trim().parse().map_err(|_| parse_err("bad modulus"))?;
        let terms = rest
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| parse_err("bad term"))?;
        ZsSequence::new(n, terms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdProfile {
    /// `gcd(n, x_i)` per term.
    pub f: Vec<u64>,
    pub overall_gcd: u64,
    /// `((i, j), gcd(f_i, f_j))` for `i < j`.
    pub pair_gcds: Vec<((usize, usize), u64)>,
    /// Prime factorization of each `f_i`.
    pub prime_support: Vec<Vec<(u64, u32)>>,
}

impl GcdProfile {
    fn of(terms: &[u64], n: u64) -> Self {
        let f: Vec<u64> = terms.iter().map(|&x| gcd(n, x)).collect();
        let overall_gcd = f.iter().fold(0, |acc, &v| gcd(acc, v));
        let mut pair_gcds = Vec::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                pair_gcds.push(((i, j), gcd(f[i], f[j])));
            }
        }
        let prime_support = f
            .iter()
            .map(|&v| arith::factorize(v).expect("f_i is positive"))
            .collect();
        Self {
            f,
            overall_gcd,
            pair_gcds,
            prime_support,
        }
    }

    pub fn max_f(&self) -> u64 {
        self.f.iter().copied().max().unwrap_or(1)
    }

    pub fn pair_gcd(&self, i: usize, j: usize) -> u64 {
        gcd(self.f[i], self.f[j])
    }

    /// `gcd(n, x_1, ..., x_k) = 1` and some `gcd(n, x_i) > 1`.
    pub fn meets_main_hypothesis(&self) -> bool {
        self.overall_gcd == 1 && self.max_f() > 1
    }
}

/// Every minimal zero-sum multiset of length four over `Z_n`, in lexicographic order.
pub fn enumerate_minimal4(n: u64) -> impl Iterator<Item = ZsSequence> {
    (1..n.max(1)).flat_map(move |x1| minimal4_with_first(n, x1))
}

/// The slice of [`enumerate_minimal4`] whose smallest term is `x1`.
pub fn minimal4_with_first(n: u64, x1: u64) -> impl Iterator<Item = ZsSequence> {
    (x1..n).flat_map(move |x2| minimal4_with_prefix(n, x1, x2))
}

/// The slice of [`enumerate_minimal4`] starting with `(x1, x2)`.
pub fn minimal4_with_prefix(n: u64, x1: u64, x2: u64) -> impl Iterator<Item = ZsSequence> {
    (x2..n).filter_map(move |x3| complete_triple(n, x1, x2, x3))
}

/// The minimal length-four sequence whose three smallest terms are `x1 <= x2 <= x3`, if any.
///
/// The largest term is forced to be `|-(x1 + x2 + x3)|_n`.
pub fn complete_triple(n: u64, x1: u64, x2: u64, x3: u64) -> Option<ZsSequence> {
    if !(1 <= x1 && x1 <= x2 && x2 <= x3 && x3 < n) {
        return None;
    }
    let x4 = arith::residue(-((x1 + x2 + x3) as i128), n);
    let terms = [x1, x2, x3, x4];
    (x4 >= x3 && x4 < n && is_minimal_zero_sum_terms(&terms, n))
        .then(|| ZsSequence::from_sorted(n, terms.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(n: u64, t: &[u64]) -> ZsSequence {
        ZsSequence::new(n, t.to_vec()).unwrap()
    }

    #[test]
    fn zero_sum_examples() {
        assert!(seq(25, &[1, 1, 1, 22]).is_zero_sum());
        assert!(!seq(25, &[1, 2, 3, 4]).is_zero_sum());
        assert!(seq(35, &[5, 10, 24, 31]).is_zero_sum());
    }

    #[test]
    fn minimality_examples() {
        assert!(seq(25, &[5, 10, 24, 11]).is_minimal_zero_sum());
        assert!(!seq(25, &[1, 5, 20, 24]).is_minimal_zero_sum());
        assert!(seq(5, &[1, 1, 1, 2]).is_minimal_zero_sum());
        assert!(!seq(25, &[1, 2, 3, 4]).is_minimal_zero_sum());
    }

    #[test]
    fn gcd_profile_examples() {
        let p = seq(35, &[5, 10, 24, 31]).gcd_profile();
        assert_eq!(p.f, vec![5, 5, 1, 1]);
        assert_eq!(p.overall_gcd, 1);
        assert!(p.meets_main_hypothesis());
        assert_eq!(p.pair_gcd(0, 1), 5);

        // stored ascending: (1, 5, 9, 160)
        let p = seq(175, &[5, 1, 9, 160]).gcd_profile();
        assert_eq!(p.f, vec![1, 5, 1, 5]);
        assert_eq!(p.overall_gcd, 1);
        assert_eq!(p.prime_support[1], vec![(5, 1)]);

        let p = seq(25, &[1, 1, 1, 22]).gcd_profile();
        assert_eq!(p.f, vec![1, 1, 1, 1]);
        assert!(!p.meets_main_hypothesis());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(seq(5, &[1, 1, 1, 2]).scale(3).unwrap(), seq(5, &[1, 3, 3, 3]));
        assert_eq!(
            seq(35, &[5, 10, 24, 31]).scale(8).unwrap(),
            seq(35, &[3, 5, 10, 17])
        );
        let s = seq(25, &[5, 10, 24, 11]);
        assert_eq!(s.scale(1).unwrap(), s);
        assert_eq!(
            s.scale(5),
            Err(Error::NotAUnit {
                value: 5,
                modulus: 25
            })
        );
    }

    #[test]
    fn enumerate_five() {
        let all: Vec<_> = enumerate_minimal4(5).collect();
        assert_eq!(
            all,
            vec![
                seq(5, &[1, 1, 1, 2]),
                seq(5, &[1, 3, 3, 3]),
                seq(5, &[2, 2, 2, 4]),
                seq(5, &[3, 4, 4, 4]),
            ]
        );
    }

    /// Brute force over every 4-multiset of `[1, n-1]`.
    fn brute_minimal4(n: u64) -> Vec<ZsSequence> {
        let mut out = Vec::new();
        for a in 1..n {
            for b in a..n {
                for c in b..n {
                    for d in c..n {
                        let t = [a, b, c, d];
                        let zero = t.iter().sum::<u64>() % n == 0;
                        let proper = (1u32..15).all(|m| {
                            (0..4).filter(|i| m & (1 << i) != 0).map(|i| t[i]).sum::<u64>() % n != 0
                        });
                        if zero && proper {
                            out.push(seq(n, &t));
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in [5, 6, 7, 8, 9, 12, 13, 25] {
            let fast: Vec<_> = enumerate_minimal4(n).collect();
            assert_eq!(fast, brute_minimal4(n), "n = {n}");
        }
    }

    #[test]
    fn minimal4_count_for_25() {
        // frozen from brute_minimal4(25)
        assert_eq!(enumerate_minimal4(25).count(), MINIMAL4_COUNT_25);
    }

    const MINIMAL4_COUNT_25: usize = 624;

    #[test]
    fn canonical_rep_examples() {
        let ctx = GroupContext::new(5).unwrap();
        assert_eq!(seq(5, &[3, 4, 4, 4]).canonical_rep(&ctx), seq(5, &[1, 1, 1, 2]));
        assert_eq!(seq(5, &[1, 1, 1, 2]).canonical_rep(&ctx), seq(5, &[1, 1, 1, 2]));
        let ctx = GroupContext::new(35).unwrap();
        let s = seq(35, &[5, 10, 24, 31]);
        assert_eq!(s.canonical_rep(&ctx), s.scale(8).unwrap().canonical_rep(&ctx));
    }

    #[test]
    fn is_canonical_agrees_with_canonical_rep() {
        for n in [8, 11, 25, 35] {
            let ctx = GroupContext::new(n).unwrap();
            for s in enumerate_minimal4(n) {
                assert_eq!(s.is_canonical(&ctx), s.canonical_rep(&ctx) == s, "{s}");
            }
        }
    }

    #[test]
    fn sums_are_small_multiples_of_n() {
        for n in [7, 25, 35] {
            for s in enumerate_minimal4(n) {
                assert!([n, 2 * n, 3 * n].contains(&s.sum()), "{s}");
            }
        }
    }

    #[test]
    fn text_format() {
        let s: ZsSequence = "35:31,5,24,10".parse().unwrap();
        assert_eq!(s.to_string(), "35:5,10,24,31");
        assert!("35:5,10,35".parse::<ZsSequence>().is_err());
        assert!("35-5,10".parse::<ZsSequence>().is_err());
        assert!("1:0".parse::<ZsSequence>().is_err());
    }

    #[test]
    fn complete_triple_matches_enumeration() {
        let n = 13;
        let mut found = Vec::new();
        for a in 1..n {
            for b in a..n {
                for c in b..n {
                    found.extend(complete_triple(n, a, b, c));
                }
            }
        }
        assert_eq!(found, enumerate_minimal4(n).collect::<Vec<_>>());
    }
}
