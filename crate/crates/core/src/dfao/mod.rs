//! Complete deterministic automata with output and the sequences they
//! generate over a numeration system.

mod closure;
mod io;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeration::{self, DigitWord, RationalBase};
use crate::sigtree::LabeledSignature;

pub use closure::{patch_finite, residue_dfao, Dfa, Distinguishability};
pub(crate) use io::escape as io_escape;

pub type StateId = usize;

/// An output letter. [`Letter::SENTINEL`] marks states no canonical
/// representation can reach.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
    pub const SENTINEL: Letter = Letter(u32::MAX);

    pub fn is_sentinel(self) -> bool {
        self == Self::SENTINEL
    }
}

impl From<u32> for Letter {
    fn from(v: u32) -> Self {
        Letter(v)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sentinel() {
            f.write_str("-")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(Letter::SENTINEL);
        }
        match s.parse::<u32>() {
            Ok(v) if v != u32::MAX => Ok(Letter(v)),
            _ => Err(Error::Parse {
                what: "letter",
                input: s.to_string(),
                reason: "expected a non-negative integer or '-'".into(),
            }),
        }
    }
}

/// Renders a letter sequence by juxtaposition when every letter is a single
/// character, space-separated otherwise.
pub fn format_letters(letters: &[Letter]) -> String {
    if letters.iter().all(|l| l.is_sentinel() || l.0 < 10) {
        letters.iter().map(Letter::to_string).collect()
    } else {
        letters.iter().map(Letter::to_string).collect::<Vec<_>>().join(" ")
    }
}

/// Parses the output of [`format_letters`].
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s.contains(char::is_whitespace) {
        s.split_whitespace().map(str::parse).collect()
    } else {
        s.chars().map(|c| c.to_string().parse()).collect()
    }
}

/// A complete DFAO `(Q, q₀, A, δ, τ)` with states `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    names: Vec<String>,
    initial: StateId,
    alphabet: Vec<u32>,
    column: Vec<usize>,
    delta: Vec<StateId>,
    outputs: Vec<Letter>,
}

const NO_COLUMN: usize = usize::MAX;

impl Dfao {
    /// `delta[s][i]` is the target of state `s` on `alphabet[i]`.
    pub fn new(
        names: Vec<String>,
        initial: StateId,
        alphabet: Vec<u32>,
        delta: Vec<Vec<StateId>>,
        outputs: Vec<Letter>,
    ) -> Result<Self> {
        let n = names.len();
        let bad = |msg: String| Err(Error::InvalidAutomaton(msg));
        if n == 0 {
            return bad("no states".into());
        }
        if initial >= n {
            return bad(format!("initial state {initial} out of range"));
        }
        if alphabet.is_empty() {
            return bad("empty alphabet".into());
        }
        if delta.len() != n || outputs.len() != n {
            return bad("delta and output must cover every state".into());
        }
        let mut order: Vec<usize> = (0..alphabet.len()).collect();
        order.sort_by_key(|&i| alphabet[i]);
        if order.windows(2).any(|w| alphabet[w[0]] == alphabet[w[1]]) {
            return bad("repeated digit in alphabet".into());
        }
        let sorted: Vec<u32> = order.iter().map(|&i| alphabet[i]).collect();
        let k = sorted.len();
        let mut flat = Vec::with_capacity(n * k);
        for (s, row) in delta.iter().enumerate() {
            if row.len() != k {
                return bad(format!(
                    "state {} has {} transitions, expected {k}",
                    names[s],
                    row.len()
                ));
            }
            for &i in &order {
                if row[i] >= n {
                    return bad(format!("transition target {} out of range", row[i]));
                }
                flat.push(row[i]);
            }
        }
        let max = *sorted.last().unwrap() as usize;
        let mut column = vec![NO_COLUMN; max + 1];
        for (i, &a) in sorted.iter().enumerate() {
            column[a as usize] = i;
        }
        Ok(Self {
            names,
            initial,
            alphabet: sorted,
            column,
            delta: flat,
            outputs,
        })
    }

    /// Builds an automaton on states `0..states` named by their index.
    pub fn from_fn(
        states: usize,
        initial: StateId,
        alphabet: Vec<u32>,
        delta: impl Fn(StateId, u32) -> StateId,
        outputs: Vec<Letter>,
    ) -> Result<Self> {
        let rows = (0..states)
            .map(|s| alphabet.iter().map(|&a| delta(s, a)).collect())
            .collect();
        Self::new(
            (0..states).map(|s| s.to_string()).collect(),
            initial,
            alphabet,
            rows,
            outputs,
        )
    }

    /// Completes a partial transition function with a sink state whose output
    /// is [`Letter::SENTINEL`]. The sink is only added when needed.
    pub fn complete_partial(
        names: Vec<String>,
        initial: StateId,
        alphabet: Vec<u32>,
        partial: impl Fn(StateId, u32) -> Option<StateId>,
        mut outputs: Vec<Letter>,
    ) -> Result<Self> {
        let n = names.len();
        let mut rows: Vec<Vec<StateId>> = (0..n)
            .map(|s| alphabet.iter().map(|&a| partial(s, a).unwrap_or(n)).collect())
            .collect();
        let mut names = names;
        if rows.iter().flatten().any(|&t| t == n) {
            names.push("sink".into());
            rows.push(vec![n; alphabet.len()]);
            outputs.push(Letter::SENTINEL);
        }
        Self::new(names, initial, alphabet, rows, outputs)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    /// The digit alphabet, sorted.
    pub fn alphabet(&self) -> &[u32] {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn outputs(&self) -> &[Letter] {
        &self.outputs
    }

    pub fn output(&self, s: StateId) -> Letter {
        self.outputs[s]
    }

    pub fn has_digit(&self, a: u32) -> bool {
        self.column.get(a as usize).is_some_and(|&c| c != NO_COLUMN)
    }

    pub fn try_step(&self, s: StateId, a: u32) -> Option<StateId> {
        match self.column.get(a as usize) {
            Some(&c) if c != NO_COLUMN => Some(self.delta[s * self.alphabet.len() + c]),
            _ => None,
        }
    }

    pub fn step(&self, s: StateId, a: u32) -> Result<StateId> {
        self.try_step(s, a).ok_or(Error::DigitOutsideAlphabet(a))
    }

    pub fn run_from(&self, s: StateId, digits: &[u32]) -> Result<StateId> {
        digits.iter().try_fold(s, |s, &a| self.step(s, a))
    }

    /// `δ(q₀, digits)`.
    pub fn run(&self, digits: &[u32]) -> Result<StateId> {
        self.run_from(self.initial, digits)
    }

    /// `τ(δ(q₀, digits))`.
    pub fn output_of(&self, digits: &[u32]) -> Result<Letter> {
        self.run(digits).map(|s| self.outputs[s])
    }

    /// Row of `s` in alphabet order.
    pub fn row(&self, s: StateId) -> &[StateId] {
        let k = self.alphabet.len();
        &self.delta[s * k..(s + 1) * k]
    }

    /// Same automaton with renamed states.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.names.len() {
            return Err(Error::InvalidAutomaton("wrong number of state names".into()));
        }
        self.names = names;
        Ok(self)
    }

    /// Same automaton with a different output map.
    pub fn with_outputs(mut self, outputs: Vec<Letter>) -> Result<Self> {
        if outputs.len() != self.names.len() {
            return Err(Error::InvalidAutomaton("wrong number of outputs".into()));
        }
        self.outputs = outputs;
        Ok(self)
    }

    /// States reachable from the initial state, in breadth-first order with
    /// digits taken in increasing order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for &t in self.row(order[i]) {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    /// Whether the reachable parts of both automata are equal up to renaming
    /// states, outputs included.
    pub fn is_isomorphic(&self, other: &Dfao) -> bool {
        if self.alphabet != other.alphabet {
            return false;
        }
        let mut map = vec![usize::MAX; self.num_states()];
        let mut back = vec![usize::MAX; other.num_states()];
        let mut stack = vec![(self.initial, other.initial)];
        map[self.initial] = other.initial;
        back[other.initial] = self.initial;
        while let Some((s, t)) = stack.pop() {
            if self.outputs[s] != other.outputs[t] {
                return false;
            }
            for (&s2, &t2) in self.row(s).iter().zip(other.row(t)) {
                match (map[s2], back[t2]) {
                    (usize::MAX, usize::MAX) => {
                        map[s2] = t2;
                        back[t2] = s2;
                        stack.push((s2, t2));
                    }
                    (m, b) if m == t2 && b == s2 => {}
                    _ => return false,
                }
            }
        }
        self.reachable().len() == other.reachable().len()
    }

    /// An equivalent automaton whose initial state loops on `0`, so that
    /// leading zeros are absorbed. Returns a copy when this already holds or
    /// `0` is not a digit.
    pub fn absorb_leading_zeros(&self) -> Dfao {
        match self.try_step(self.initial, 0) {
            Some(t) if t != self.initial => {
                let n = self.num_states();
                let mut rows: Vec<Vec<StateId>> = (0..n).map(|s| self.row(s).to_vec()).collect();
                let mut fresh = self.row(self.initial).to_vec();
                fresh[self.column[0]] = n;
                rows.push(fresh);
                let mut names = self.names.clone();
                names.push(format!("{}'", self.names[self.initial]));
                let mut outputs = self.outputs.clone();
                outputs.push(self.outputs[self.initial]);
                Dfao::new(names, n, self.alphabet.clone(), rows, outputs).expect("extension of a valid automaton")
            }
            _ => self.clone(),
        }
    }
}

/// Which numeration system indexes the sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumerationSystem {
    Rational(RationalBase),
    Signature(LabeledSignature),
}

impl NumerationSystem {
    /// The labeled signature generating the numeration language.
    pub fn signature(&self) -> LabeledSignature {
        match self {
            NumerationSystem::Rational(b) => LabeledSignature::derive_rational(*b),
            NumerationSystem::Signature(s) => s.clone(),
        }
    }

    /// Representation of `n`, most significant digit first.
    pub fn rep(&self, n: u64) -> DigitWord {
        match self {
            NumerationSystem::Rational(b) => numeration::rep(*b, n),
            NumerationSystem::Signature(s) => s.rep_ans(n),
        }
    }

    /// Integer represented by `w`, if `w` is in the language up to leading zeros.
    pub fn value(&self, w: &DigitWord) -> Option<u64> {
        match self {
            NumerationSystem::Rational(b) => {
                if w.digits().iter().any(|&d| d >= b.p()) {
                    return None;
                }
                numeration::integer_value(*b, w).and_then(|v| u64::try_from(v).ok())
            }
            NumerationSystem::Signature(s) => s.val_ans(w).ok(),
        }
    }
}

impl fmt::Display for NumerationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumerationSystem::Rational(b) => write!(f, "base {b}"),
            NumerationSystem::Signature(s) => write!(f, "signature {s}"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    MsdFirst,
    LsdFirst,
}

/// The sequence generated by a DFAO over a numeration system.
#[derive(Clone, Debug)]
pub struct SequenceView {
    dfao: Dfao,
    system: NumerationSystem,
    signature: LabeledSignature,
    direction: Direction,
}

impl SequenceView {
    pub fn new(dfao: Dfao, system: NumerationSystem, direction: Direction) -> Result<Self> {
        let signature = system.signature();
        if let Some(a) = signature.letters().into_iter().find(|&a| !dfao.has_digit(a)) {
            return Err(Error::InvalidAutomaton(format!(
                "digit {a} of {system} is missing from the automaton alphabet"
            )));
        }
        Ok(Self {
            dfao,
            system,
            signature,
            direction,
        })
    }

    pub fn msd(dfao: Dfao, system: NumerationSystem) -> Result<Self> {
        Self::new(dfao, system, Direction::MsdFirst)
    }

    pub fn dfao(&self) -> &Dfao {
        &self.dfao
    }

    pub fn system(&self) -> &NumerationSystem {
        &self.system
    }

    pub fn signature(&self) -> &LabeledSignature {
        &self.signature
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// The word fed to the automaton for `n`.
    pub fn input_word(&self, n: u64) -> DigitWord {
        let w = self.system.rep(n);
        match self.direction {
            Direction::MsdFirst => w,
            Direction::LsdFirst => w.reversed(),
        }
    }

    /// State reached on the input word of `n`.
    pub fn state(&self, n: u64) -> StateId {
        self.dfao
            .run(self.input_word(n).digits())
            .expect("alphabet checked at construction")
    }

    /// `x_n`.
    pub fn eval(&self, n: u64) -> Letter {
        self.dfao.output(self.state(n))
    }

    /// States reached for `n < count`.
    pub fn state_prefix(&self, count: usize) -> Vec<StateId> {
        match self.direction {
            Direction::MsdFirst => {
                let mut states = Vec::with_capacity(count);
                if count > 0 {
                    states.push(self.dfao.initial());
                }
                for n in 1..count as u64 {
                    let (m, a) = self.signature.parent_of(n).expect("n > 0");
                    let s = self.dfao.try_step(states[m as usize], a).expect("alphabet checked");
                    states.push(s);
                }
                states
            }
            Direction::LsdFirst => (0..count as u64).into_par_iter().map(|n| self.state(n)).collect(),
        }
    }

    /// `(x_0, …, x_{count−1})`.
    pub fn sequence_prefix(&self, count: usize) -> Vec<Letter> {
        self.state_prefix(count)
            .into_iter()
            .map(|s| self.dfao.output(s))
            .collect()
    }
}
