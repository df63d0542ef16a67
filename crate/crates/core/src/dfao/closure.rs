use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;

use super::{Dfao, Direction, Letter, SequenceView, StateId};
use crate::error::{Error, Result};
use crate::numeration::RationalBase;

const REVERSAL_LIMIT: usize = 1_000_000;

/// A DFA given as an automaton plus its accepting states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub automaton: Dfao,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn accepts(&self, digits: &[u32]) -> bool {
        self.automaton.run(digits).is_ok_and(|s| self.accepting[s])
    }
}

/// Result of [`Dfao::distinguishability_classes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distinguishability {
    /// Classes of indistinguishable states, each sorted, ordered by least member.
    pub classes: Vec<Vec<StateId>>,
    /// For each distinguishable pair `(r, s)` with `r < s`, the shortest and
    /// then lexicographically least word separating their outputs.
    pub witnesses: BTreeMap<(StateId, StateId), Vec<u32>>,
}

impl Distinguishability {
    pub fn class_of(&self, s: StateId) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&s))
            .expect("every state is classified")
    }

    pub fn witness(&self, r: StateId, s: StateId) -> Option<&[u32]> {
        self.witnesses.get(&(r.min(s), r.max(s))).map(Vec::as_slice)
    }
}

impl Dfao {
    /// Composes the output map with a coding `g`.
    pub fn apply_coding(&self, g: &BTreeMap<Letter, Letter>) -> Result<Dfao> {
        let outputs = self
            .outputs
            .iter()
            .map(|b| g.get(b).copied().ok_or(Error::CodingNotTotal(*b)))
            .collect::<Result<Vec<_>>>()?;
        self.clone().with_outputs(outputs)
    }

    /// Reads words in the opposite direction: the result maps `w^R` to the
    /// output this automaton gives on `w`.
    pub fn reverse_reading(&self) -> Result<Dfao> {
        let n = self.num_states();
        let identity: Vec<StateId> = (0..n).collect();
        let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut functions = vec![identity.clone()];
        index.insert(identity, 0);
        let mut rows = Vec::new();
        let mut i = 0;
        while i < functions.len() {
            let mut row = Vec::with_capacity(self.alphabet.len());
            for &a in &self.alphabet {
                let f = &functions[i];
                let g: Vec<StateId> = (0..n)
                    .map(|s| f[self.try_step(s, a).expect("digit in alphabet")])
                    .collect();
                let next = functions.len();
                let id = *index.entry(g.clone()).or_insert(next);
                if id == next {
                    if next >= REVERSAL_LIMIT {
                        return Err(Error::TooManyStates { limit: REVERSAL_LIMIT });
                    }
                    functions.push(g);
                }
                row.push(id);
            }
            rows.push(row);
            i += 1;
        }
        let names = functions
            .iter()
            .map(|f| {
                let images: Vec<&str> = f.iter().map(|&s| self.name(s)).collect();
                format!("[{}]", images.join(","))
            })
            .collect();
        let outputs = functions.iter().map(|f| self.output(f[self.initial])).collect();
        Dfao::new(names, 0, self.alphabet.clone(), rows, outputs)
    }

    /// The DFA accepting the words whose run ends in a state with output `b`.
    pub fn fiber_acceptor(&self, b: Letter) -> Dfa {
        Dfa {
            automaton: self.clone(),
            accepting: self.outputs.iter().map(|&o| o == b).collect(),
        }
    }

    /// Partition of the states into indistinguishability classes, with
    /// shortest separating words.
    pub fn distinguishability_classes(&self) -> Distinguishability {
        let n = self.num_states();
        let mut witnesses: BTreeMap<(StateId, StateId), Vec<u32>> = BTreeMap::new();
        let mut frontier = Vec::new();
        for r in 0..n {
            for s in r + 1..n {
                if self.outputs[r] != self.outputs[s] {
                    witnesses.insert((r, s), Vec::new());
                    frontier.push((r, s));
                }
            }
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for r in 0..n {
                for s in r + 1..n {
                    if witnesses.contains_key(&(r, s)) {
                        continue;
                    }
                    for &a in &self.alphabet {
                        let x = self.try_step(r, a).unwrap();
                        let y = self.try_step(s, a).unwrap();
                        let key = (x.min(y), x.max(y));
                        if x != y && frontier.binary_search(&key).is_ok() {
                            let mut w = vec![a];
                            w.extend_from_slice(&witnesses[&key]);
                            next.push(((r, s), w));
                            break;
                        }
                    }
                }
            }
            frontier = next.iter().map(|(k, _)| *k).collect();
            witnesses.extend(next);
        }
        let mut classes: Vec<Vec<StateId>> = Vec::new();
        let mut assigned = vec![false; n];
        for r in 0..n {
            if assigned[r] {
                continue;
            }
            let class: Vec<StateId> = (r..n).filter(|&s| s == r || !witnesses.contains_key(&(r, s))).collect();
            for &s in &class {
                assigned[s] = true;
            }
            classes.push(class);
        }
        Distinguishability { classes, witnesses }
    }

    /// Minimal complete automaton for the same output function on words,
    /// restricted to reachable states and numbered in breadth-first order.
    pub(crate) fn minimize(&self) -> Dfao {
        let reach = self.reachable();
        let mut block = vec![usize::MAX; self.num_states()];
        let mut ids: HashMap<Letter, usize> = HashMap::new();
        for &s in &reach {
            let next = ids.len();
            block[s] = *ids.entry(self.outputs[s]).or_insert(next);
        }
        let mut count = ids.len();
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut refined = vec![usize::MAX; self.num_states()];
            for &s in &reach {
                let key = (block[s], self.row(s).iter().map(|&t| block[t]).collect());
                let next = sigs.len();
                refined[s] = *sigs.entry(key).or_insert(next);
            }
            let new_count = sigs.len();
            block = refined;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut order: Vec<usize> = Vec::new();
        let mut number = vec![usize::MAX; count];
        let mut rep_state = vec![usize::MAX; count];
        for &s in &reach {
            if number[block[s]] == usize::MAX {
                number[block[s]] = order.len();
                order.push(block[s]);
                rep_state[block[s]] = s;
            }
        }
        let rows = order
            .iter()
            .map(|&b| self.row(rep_state[b]).iter().map(|&t| number[block[t]]).collect())
            .collect();
        let outputs = order.iter().map(|&b| self.outputs[rep_state[b]]).collect();
        let names = order.iter().map(|&b| self.names[rep_state[b]].clone()).collect();
        Dfao::new(names, 0, self.alphabet.clone(), rows, outputs).expect("quotient of a valid automaton")
    }
}

/// Automaton for the view's sequence with `x_n` replaced by `overrides[n]`.
///
/// The input words of the overridden indices are stored in a trie whose
/// nodes remember the state reached so far; leaving the trie falls back to
/// the original states.
pub fn patch_finite(view: &SequenceView, overrides: &BTreeMap<u64, Letter>) -> Dfao {
    let d = view.dfao();
    let base_states = d.num_states();
    // trie node -> (children by digit, original state, override)
    let mut children: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new()];
    let mut state_of = vec![d.initial()];
    let mut label: Vec<Option<Letter>> = vec![None];
    let mut words: Vec<String> = vec![String::new()];
    for (&n, &b) in overrides {
        let w = view.input_word(n);
        let mut node = 0;
        for &a in w.digits() {
            node = match children[node].get(&a) {
                Some(&c) => c,
                None => {
                    let c = state_of.len();
                    children[node].insert(a, c);
                    children.push(BTreeMap::new());
                    state_of.push(d.try_step(state_of[node], a).expect("alphabet checked"));
                    label.push(None);
                    words.push(format!("{}{}", words[node], crate::numeration::format_digits(&[a])));
                    c
                }
            };
        }
        label[node] = Some(b);
    }
    let trie = state_of.len();
    let mut rows: Vec<Vec<StateId>> = Vec::with_capacity(trie + base_states);
    let mut outputs = Vec::with_capacity(trie + base_states);
    let mut names = Vec::with_capacity(trie + base_states);
    for t in 0..trie {
        rows.push(
            d.alphabet()
                .iter()
                .map(|&a| match children[t].get(&a) {
                    Some(&c) => c,
                    None => trie + d.try_step(state_of[t], a).unwrap(),
                })
                .collect(),
        );
        outputs.push(label[t].unwrap_or(d.output(state_of[t])));
        let w = if words[t].is_empty() { "e" } else { &words[t] };
        names.push(format!("({w},{})", d.name(state_of[t])));
    }
    for s in 0..base_states {
        rows.push(d.row(s).iter().map(|&t| trie + t).collect());
        outputs.push(d.output(s));
        names.push(d.name(s).to_string());
    }
    Dfao::new(names, 0, d.alphabet().to_vec(), rows, outputs).expect("patched automaton is valid")
}

/// Automaton over `A_p` whose state after reading `rep(n)` is `n mod m`,
/// with output `outputs[n mod m]`.
pub fn residue_dfao(base: RationalBase, m: u64, outputs: &[Letter]) -> Result<Dfao> {
    let q = u64::from(base.q());
    if m == 0 || m.gcd(&q) != 1 {
        return Err(Error::ModulusNotCoprime {
            modulus: m,
            q: base.q(),
        });
    }
    if outputs.len() as u64 != m {
        return Err(Error::InvalidAutomaton(format!(
            "expected {m} outputs, got {}",
            outputs.len()
        )));
    }
    let q_inv = if m == 1 {
        0
    } else {
        let e = (q as i128).extended_gcd(&(m as i128));
        e.x.rem_euclid(m as i128) as u64
    };
    let p = u64::from(base.p());
    Dfao::from_fn(
        m as usize,
        0,
        base.alphabet(),
        |r, a| ((q_inv as u128 * ((p as u128 * r as u128 + u128::from(a)) % m as u128)) % m as u128) as usize,
        outputs.to_vec(),
    )
}

impl SequenceView {
    /// The same sequence produced by an automaton reading the opposite way.
    pub fn reversed(&self) -> Result<SequenceView> {
        let direction = match self.direction() {
            Direction::MsdFirst => Direction::LsdFirst,
            Direction::LsdFirst => Direction::MsdFirst,
        };
        SequenceView::new(self.dfao().reverse_reading()?, self.system().clone(), direction)
    }
}
