//! Carry normalization of digit strings in base `p/q`.
//!
//! A word `e_t ⋯ e_0` over the digits `{0, …, E}` still has the value
//! `Σ (e_i/q)(p/q)^i`. Reading it from the least significant digit with an
//! integer carry `c` and emitting `a = (e + c) mod p`, `c' = q⌊(e + c)/p⌋`
//! keeps this value and produces canonical digits.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::dfao::{Dfao, Direction, Letter, NumerationSystem, SequenceView, StateId};
use crate::error::{Error, Result};
use crate::numeration::{DigitWord, RationalBase};

/// Right-to-left carry transducer for inputs over `{0, …, e_max}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CarryTransducer {
    base: RationalBase,
    e_max: u64,
    c_max: u64,
}

impl CarryTransducer {
    pub fn new(base: RationalBase, e_max: u64) -> Self {
        let p = u64::from(base.p());
        let q = u64::from(base.q());
        let c_max = (q * e_max).div_ceil(p - q);
        Self { base, e_max, c_max }
    }

    pub fn base(&self) -> RationalBase {
        self.base
    }

    pub fn e_max(&self) -> u64 {
        self.e_max
    }

    /// Largest carry reachable from carry `0`.
    pub fn c_max(&self) -> u64 {
        self.c_max
    }

    /// `(digit, next carry)`.
    pub fn step(&self, carry: u64, e: u64) -> (u32, u64) {
        let p = u64::from(self.base.p());
        let s = e + carry;
        ((s % p) as u32, u64::from(self.base.q()) * (s / p))
    }

    /// Digits emitted, lsd first, once the input is exhausted.
    pub fn flush(&self, mut carry: u64) -> Vec<u32> {
        let mut out = Vec::new();
        while carry > 0 {
            let (a, c) = self.step(carry, 0);
            out.push(a);
            carry = c;
        }
        out
    }

    /// Output digits lsd first, flush included, and the largest carry seen.
    pub fn run(&self, lsd: &[u64]) -> (Vec<u32>, u64) {
        let mut carry = 0;
        let mut max_carry = 0;
        let mut out = Vec::with_capacity(lsd.len() + 4);
        for &e in lsd {
            let (a, c) = self.step(carry, e);
            out.push(a);
            carry = c;
            max_carry = max_carry.max(carry);
        }
        while carry > 0 {
            let (a, c) = self.step(carry, 0);
            out.push(a);
            carry = c;
        }
        (out, max_carry)
    }
}

/// Canonical word with the same value as the lsd-first digits `lsd`.
pub fn normalize(base: RationalBase, lsd: &[u64]) -> DigitWord {
    let e_max = lsd.iter().copied().max().unwrap_or(0);
    let (mut out, _) = CarryTransducer::new(base, e_max).run(lsd);
    while out.last() == Some(&0) {
        out.pop();
    }
    out.reverse();
    DigitWord::new(out)
}

/// Normalizes many words in parallel.
pub fn normalize_batch(base: RationalBase, words: &[Vec<u64>]) -> Vec<DigitWord> {
    words.par_iter().map(|w| normalize(base, w)).collect()
}

fn lsd_digits(w: &DigitWord) -> Vec<u64> {
    w.digits().iter().rev().map(|&d| u64::from(d)).collect()
}

/// Representation of `a · val(w)`.
pub fn multiply_constant(base: RationalBase, w: &DigitWord, a: u64) -> DigitWord {
    let lsd: Vec<u64> = lsd_digits(w).into_iter().map(|d| d * a).collect();
    normalize(base, &lsd)
}

/// Representation of `val(w) + b`: the lsd digit has weight `1/q`, so `q·b`
/// is added there.
pub fn add_constant(base: RationalBase, w: &DigitWord, b: u64) -> DigitWord {
    let mut lsd = lsd_digits(w);
    let qb = u64::from(base.q()) * b;
    match lsd.first_mut() {
        Some(d) => *d += qb,
        None => lsd.push(qb),
    }
    normalize(base, &lsd)
}

/// Representation of `a · val(w) + b`.
pub fn affine(base: RationalBase, w: &DigitWord, a: u64, b: u64) -> DigitWord {
    let mut lsd: Vec<u64> = lsd_digits(w).into_iter().map(|d| d * a).collect();
    let qb = u64::from(base.q()) * b;
    match lsd.first_mut() {
        Some(d) => *d += qb,
        None => lsd.push(qb),
    }
    normalize(base, &lsd)
}

/// An lsd-first automaton generating `n ↦ x_{a·n+b}` for the sequence of
/// `view`, which must be over a rational base.
///
/// States pair the carry of the transducer with a state of an lsd-first
/// automaton for `x`; the initial carry `q·b` injects the translation. The
/// output flushes the remaining carry into the second component.
pub fn affine_subsequence_dfao(view: &SequenceView, a: u64, b: u64) -> Result<Dfao> {
    let NumerationSystem::Rational(base) = *view.system() else {
        return Err(Error::InvalidSignature(
            "affine subsequences need a rational base".into(),
        ));
    };
    if a == 0 {
        return Err(Error::InvalidAutomaton("multiplier must be positive".into()));
    }
    let msd = match view.direction() {
        Direction::MsdFirst => view.dfao().clone(),
        Direction::LsdFirst => view.dfao().reverse_reading()?,
    };
    let lsd = msd.absorb_leading_zeros().reverse_reading()?;
    let t = CarryTransducer::new(base, a * u64::from(base.p() - 1));
    let alphabet = base.alphabet();
    let start = (u64::from(base.q()) * b, lsd.initial());
    let mut index: HashMap<(u64, StateId), StateId> = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut rows: Vec<Vec<StateId>> = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let (c, s) = states[i];
        let mut row = Vec::with_capacity(alphabet.len());
        for &u in &alphabet {
            let (digit, c2) = t.step(c, a * u64::from(u));
            let next = (c2, lsd.step(s, digit)?);
            let j = *index.entry(next).or_insert_with(|| {
                states.push(next);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            row.push(j);
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
        }
        rows[i] = row;
    }
    let outputs: Vec<Letter> = states
        .iter()
        .map(|&(c, s)| lsd.run_from(s, &t.flush(c)).map(|f| lsd.output(f)))
        .collect::<Result<_>>()?;
    let names = states.iter().map(|&(c, s)| format!("({c},{})", lsd.name(s))).collect();
    Dfao::new(names, 0, alphabet, rows, outputs)
}

/// [`affine_subsequence_dfao`] wrapped as an lsd-first view.
pub fn affine_subsequence(view: &SequenceView, a: u64, b: u64) -> Result<SequenceView> {
    let d = affine_subsequence_dfao(view, a, b)?;
    SequenceView::new(d, view.system().clone(), Direction::LsdFirst)
}
