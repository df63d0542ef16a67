//! Exact arithmetic on base-`p/q` representations.
//!
//! A word `w = w_ℓ ⋯ w_0` (stored most significant digit first) has value
//! `Σ (w_i / q)(p/q)^i`. Integers have a unique representation without leading
//! zeros, produced by the forward digit recurrence `q·n_i = p·n_{i+1} + a_i`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

/// Exact rational value of a digit word.
pub type ExactRational = BigRational;

/// A rational base `p/q` with `p > q > 1` and `gcd(p, q) = 1`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalBase {
    p: u32,
    q: u32,
}

impl RationalBase {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        let invalid = |reason| Error::InvalidBase {
            p: p.into(),
            q: q.into(),
            reason,
        };
        if q <= 1 {
            return Err(invalid("q must be greater than 1"));
        }
        if p <= q {
            return Err(invalid("p must be greater than q"));
        }
        if p.gcd(&q) != 1 {
            return Err(invalid("p and q must be coprime"));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The digit alphabet `A_p = {0, …, p−1}`.
    pub fn alphabet(&self) -> Vec<u32> {
        (0..self.p).collect()
    }

    /// Whether node `m` has an edge labeled `a` in the tree of `L_{p/q}`,
    /// i.e. `q` divides `p·m + a`; returns the child value when it does.
    pub fn edge(&self, m: u64, a: u32) -> Option<u64> {
        let t = u128::from(self.p) * u128::from(m) + u128::from(a);
        let q = u128::from(self.q);
        (t % q == 0).then(|| u64::try_from(t / q).expect("node value overflows u64"))
    }
}

impl fmt::Display for RationalBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            what: "rational base",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (p, q) = s.trim().split_once('/').ok_or_else(|| parse_err("expected p/q"))?;
        let p = p.trim().parse().map_err(|_| parse_err("bad numerator"))?;
        let q = q.trim().parse().map_err(|_| parse_err("bad denominator"))?;
        RationalBase::new(p, q)
    }
}

/// Formats digits as plain juxtaposition, or dot-separated as soon as one digit
/// needs more than one character. The empty word is `e`.
///
/// A single digit `≥ 10` gets a trailing dot so that it does not read back as
/// several digits.
pub fn format_digits(digits: &[u32]) -> String {
    if digits.is_empty() {
        return "e".to_string();
    }
    if digits.iter().all(|&d| d < 10) {
        return digits.iter().map(|d| char::from(b'0' + *d as u8)).collect();
    }
    let mut s = digits.iter().map(u32::to_string).collect::<Vec<_>>().join(".");
    if digits.len() == 1 {
        s.push('.');
    }
    s
}

/// Inverse of [`format_digits`].
pub fn parse_digits(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let err = |reason: String| Error::Parse {
        what: "digit word",
        input: s.to_string(),
        reason,
    };
    if s.is_empty() || s == "e" || s == "ε" {
        return Ok(Vec::new());
    }
    if s.contains('.') {
        let tokens: Vec<&str> = s.strip_suffix('.').unwrap_or(s).split('.').collect();
        tokens
            .iter()
            .map(|t| t.parse::<u32>().map_err(|_| err(format!("bad digit token {t:?}"))))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| err(format!("bad digit {c:?}"))))
            .collect()
    }
}

/// A finite word of digits, most significant digit first.
///
/// `Ord` is the radix (genealogical) order: shorter words first, then
/// lexicographic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DigitWord(Vec<u32>);

impl DigitWord {
    pub fn new(digits: Vec<u32>) -> Self {
        Self(digits)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, digit: u32) {
        self.0.push(digit);
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Digits least significant first.
    pub fn reversed(&self) -> DigitWord {
        DigitWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &DigitWord) -> DigitWord {
        let mut digits = self.0.clone();
        digits.extend_from_slice(&other.0);
        DigitWord(digits)
    }

    pub fn strip_leading_zeros(&self) -> DigitWord {
        let start = self.0.iter().position(|&d| d != 0).unwrap_or(self.0.len());
        DigitWord(self.0[start..].to_vec())
    }

    pub fn has_leading_zero(&self) -> bool {
        self.0.first() == Some(&0)
    }
}

impl From<Vec<u32>> for DigitWord {
    fn from(digits: Vec<u32>) -> Self {
        Self(digits)
    }
}

impl From<&[u32]> for DigitWord {
    fn from(digits: &[u32]) -> Self {
        Self(digits.to_vec())
    }
}

impl Ord for DigitWord {
    fn cmp(&self, other: &Self) -> Ordering {
        radix_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for DigitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_digits(&self.0))
    }
}

impl FromStr for DigitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_digits(s).map(DigitWord)
    }
}

/// Radix order: length first, then lexicographic.
pub fn radix_cmp<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Greedy base-`p/q` representation of `n`; `rep(0) = ε`.
pub fn rep(base: RationalBase, n: u64) -> DigitWord {
    let p = u128::from(base.p);
    let q = u128::from(base.q);
    let mut digits = Vec::new();
    let mut n = u128::from(n);
    while n > 0 {
        let a = (q * n) % p;
        digits.push(a as u32);
        n = (q * n - a) / p;
    }
    digits.reverse();
    DigitWord(digits)
}

/// Numerator of `val(w)` over the denominator `q^|w|`, i.e.
/// `Σ w_i p^i q^{|w|−1−i}` evaluated by Horner's rule from the left.
fn scaled_numerator(base: RationalBase, w: &[u32]) -> BigUint {
    let p = BigUint::from(base.p);
    let q = BigUint::from(base.q);
    let mut acc = BigUint::zero();
    let mut q_pow = BigUint::one();
    for &d in w {
        acc = acc * &p + BigUint::from(d) * &q_pow;
        q_pow *= &q;
    }
    acc
}

/// Exact value `Σ (w_i/q)(p/q)^i` of `w`; any non-negative digits are accepted.
pub fn val(base: RationalBase, w: &DigitWord) -> ExactRational {
    let num = scaled_numerator(base, &w.0);
    let den = BigUint::from(base.q).pow(w.len());
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The value of `w` if it is a non-negative integer.
pub fn integer_value(base: RationalBase, w: &DigitWord) -> Option<BigUint> {
    let num = scaled_numerator(base, &w.0);
    let den = BigUint::from(base.q).pow(w.len());
    let (quot, rem) = num.div_rem(&den);
    rem.is_zero().then_some(quot)
}

/// Whether `w ∈ L_{p/q}`: empty, or no leading zero, digits below `p` and an
/// integral value.
pub fn is_canonical(base: RationalBase, w: &DigitWord) -> bool {
    if w.is_empty() {
        return true;
    }
    !w.has_leading_zero() && w.0.iter().all(|&d| d < base.p) && integer_value(base, w).is_some()
}
