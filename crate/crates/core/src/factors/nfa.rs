use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::census::{FactorCensus, InfiniteEstimate};
use super::{DecoratedFactor, DecoratedTree, FactorKey};
use crate::dfao::{Dfao, Letter};
use crate::error::{Error, Result};
use crate::sigtree::LabeledSignature;

/// Data for the factor automaton of a decorated tree.
#[derive(Clone, Debug)]
pub struct NfaInput {
    pub sig: LabeledSignature,
    /// Levels below which the tree is read as a finite prefix.
    pub t: usize,
    pub h: usize,
    /// Decorations of every node on levels `0..=t+h`.
    pub prefix: Vec<Letter>,
    /// Height-`h` factors occurring infinitely often.
    pub infinite: Vec<DecoratedFactor>,
    /// Height-`h+1` factors occurring infinitely often.
    pub extensions: Vec<DecoratedFactor>,
}

/// Nondeterministic automaton with partial outputs on its final states.
#[derive(Clone, Debug)]
pub struct FactorNfa {
    names: Vec<String>,
    initial: usize,
    finals: Vec<Option<Letter>>,
    transitions: Vec<BTreeMap<u32, Vec<usize>>>,
    alphabet: Vec<u32>,
}

impl FactorNfa {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabet(&self) -> &[u32] {
        &self.alphabet
    }

    /// Decoration of `s` when it is final.
    pub fn final_output(&self, s: usize) -> Option<Letter> {
        self.finals[s]
    }

    pub fn successors(&self, s: usize, a: u32) -> &[usize] {
        self.transitions[s].get(&a).map_or(&[], Vec::as_slice)
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().flat_map(|m| m.values()).map(Vec::len).sum()
    }

    /// Every run on `digits` ending in a final state.
    pub fn successful_runs(&self, digits: &[u32]) -> Vec<Vec<usize>> {
        let mut runs = vec![vec![self.initial]];
        for &a in digits {
            runs = runs
                .into_iter()
                .flat_map(|r| {
                    self.successors(*r.last().unwrap(), a)
                        .iter()
                        .map(move |&t| {
                            let mut r = r.clone();
                            r.push(t);
                            r
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        runs.retain(|r| self.finals[*r.last().unwrap()].is_some());
        runs
    }

    pub fn run_names(&self, run: &[usize]) -> Vec<&str> {
        run.iter().map(|&s| self.names[s].as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut delta = serde_json::Map::new();
        for (s, m) in self.transitions.iter().enumerate() {
            for (a, ts) in m {
                let targets: Vec<&str> = ts.iter().map(|&t| self.names[t].as_str()).collect();
                delta.insert(format!("{},{a}", self.names[s]), serde_json::json!(targets));
            }
        }
        let mut finals = serde_json::Map::new();
        for (s, f) in self.finals.iter().enumerate() {
            if let Some(b) = f {
                finals.insert(self.names[s].clone(), serde_json::json!(b.to_string()));
            }
        }
        let doc = serde_json::json!({
            "states": self.names,
            "initial": self.names[self.initial],
            "alphabet": self.alphabet,
            "delta": delta,
            "final": finals,
        });
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn to_dot(&self) -> String {
        let esc = crate::dfao::io_escape;
        let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for (s, name) in self.names.iter().enumerate() {
            match self.finals[s] {
                Some(b) => out.push_str(&format!(
                    "  \"{}\" [shape=doublecircle, label=\"{}|{b}\"];\n",
                    esc(name),
                    esc(name)
                )),
                None => out.push_str(&format!("  \"{}\" [shape=circle];\n", esc(name))),
            }
        }
        out.push_str(&format!("  start -> \"{}\";\n", esc(&self.names[self.initial])));
        for (s, m) in self.transitions.iter().enumerate() {
            for (a, ts) in m {
                for &t in ts {
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [label=\"{a}\"];\n",
                        esc(&self.names[s]),
                        esc(&self.names[t])
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }

    fn add(&mut self, s: usize, a: u32, t: usize) {
        let v = self.transitions[s].entry(a).or_default();
        if !v.contains(&t) {
            v.push(t);
        }
    }
}

/// Builds the automaton whose runs read the tree: prefix states for the nodes
/// above level `t+h`, then one copy of every infinite factor, glued by the
/// extensions.
pub fn build_factor_nfa(input: &NfaInput) -> Result<FactorNfa> {
    let NfaInput {
        sig,
        t,
        h,
        prefix,
        infinite,
        extensions,
    } = input;
    let (t, h) = (*t, *h);
    if t == 0 || h == 0 {
        return Err(Error::InvalidFactorData("t and h must be positive".into()));
    }
    let bounds = sig.level_bounds(t + h);
    let covered = bounds[t + h + 1];
    if (prefix.len() as u64) < covered {
        return Err(Error::DecorationsExhausted {
            needed: covered - 1,
            available: prefix.len() as u64,
        });
    }
    if let Some(f) = infinite.iter().find(|f| f.height() != h) {
        return Err(Error::InvalidFactorData(format!("factor {f} does not have height {h}")));
    }
    if let Some(f) = extensions.iter().find(|f| f.height() != h + 1) {
        return Err(Error::InvalidFactorData(format!(
            "factor {f} does not have height {}",
            h + 1
        )));
    }
    let prefix_states = bounds[t + h] as usize;
    let mut nfa = FactorNfa {
        names: (0..prefix_states).map(|n| format!("q{n}")).collect(),
        initial: 0,
        finals: prefix[..prefix_states].iter().map(|&b| Some(b)).collect(),
        transitions: vec![BTreeMap::new(); prefix_states],
        alphabet: sig.letters(),
    };
    for m in 0..prefix_states as u64 {
        for (c, a) in sig.proper_children(m) {
            if (c as usize) < prefix_states {
                nfa.add(m as usize, a, c as usize);
            }
        }
    }
    let mut roots: HashMap<FactorKey, usize> = HashMap::new();
    for f in infinite {
        let key = f.key();
        if roots.contains_key(&key) {
            return Err(Error::InvalidFactorData(format!("factor {f} listed twice")));
        }
        let base = nfa.names.len();
        roots.insert(key, base);
        for i in 0..f.len() {
            nfa.names.push((base + i - prefix_states).to_string());
            nfa.finals.push((f.depth(i) == h).then(|| f.decoration(i)));
            nfa.transitions.push(BTreeMap::new());
        }
        for i in 1..f.len() {
            nfa.add(base + f.parent(i).unwrap(), f.label(i).unwrap(), base + i);
        }
    }
    let root_of = |f: &DecoratedFactor| -> Result<usize> {
        roots
            .get(&f.key())
            .copied()
            .ok_or_else(|| Error::InvalidFactorData(format!("factor {f} is not listed as infinite")))
    };
    let tree = DecoratedTree::new(sig.clone(), prefix[..covered as usize].to_vec());
    for m in bounds[t - 1]..bounds[t] {
        for (n, a) in sig.proper_children(m) {
            let target = root_of(&tree.factor_at(n, h)?)?;
            nfa.add(m as usize, a, target);
        }
    }
    let mut groups: BTreeMap<(FactorKey, u32), BTreeSet<FactorKey>> = BTreeMap::new();
    for u in extensions {
        let c = u
            .first_letter_at_depth(h + 1)
            .ok_or_else(|| Error::InvalidFactorData(format!("factor {u} has no node at depth {}", h + 1)))?;
        groups.entry((u.truncate(h).key(), c)).or_default().insert(u.key());
    }
    if let Some(((k, c), us)) = groups.iter().find(|(_, us)| us.len() > 1) {
        let factor = infinite.iter().position(|f| f.key() == *k).ok_or_else(|| {
            Error::InvalidFactorData(format!(
                "factor {} is not listed as infinite",
                DecoratedFactor::from_key(k).unwrap()
            ))
        })?;
        return Err(Error::MultiValuedExtension {
            factor,
            letter: *c,
            count: us.len(),
        });
    }
    for u in extensions {
        let from = root_of(&u.truncate(h))?;
        for (_, d) in u.children(0) {
            let v = u.subtree(d, h).expect("root child exists");
            nfa.add(from, d, root_of(&v)?);
        }
    }
    Ok(nfa)
}

/// Subset construction; the output of a subset is the decoration shared by
/// its final states, [`Letter::SENTINEL`] when it has none.
pub fn subset_construction(nfa: &FactorNfa) -> Result<Dfao> {
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = vec![vec![nfa.initial]];
    index.insert(vec![nfa.initial], 0);
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(nfa.alphabet.len());
        for &a in &nfa.alphabet {
            let next: BTreeSet<usize> = subsets[i]
                .iter()
                .flat_map(|&s| nfa.successors(s, a).iter().copied())
                .collect();
            let next: Vec<usize> = next.into_iter().collect();
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = subsets.len();
                    index.insert(next.clone(), j);
                    subsets.push(next);
                    queue.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
        }
        rows[i] = row;
    }
    let mut names = Vec::with_capacity(subsets.len());
    let mut outputs = Vec::with_capacity(subsets.len());
    for set in &subsets {
        let inner = set.iter().map(|&s| nfa.names[s].as_str()).collect::<Vec<_>>().join(",");
        let decorations: BTreeSet<Letter> = set.iter().filter_map(|&s| nfa.finals[s]).collect();
        if decorations.len() > 1 {
            return Err(Error::DecorationConflict { subset: inner });
        }
        outputs.push(decorations.into_iter().next().unwrap_or(Letter::SENTINEL));
        names.push(format!("{{{inner}}}"));
    }
    Dfao::new(names, 0, nfa.alphabet.clone(), rows, outputs)
}

/// Subset construction followed by minimization.
pub fn determinize(nfa: &FactorNfa) -> Result<Dfao> {
    Ok(subset_construction(nfa)?.minimize())
}

/// Assembles [`NfaInput`] from censuses at heights `h` and `h+1` taken on
/// `tree`, with the infinite classes estimated at threshold `t`.
pub fn nfa_input_from_census(
    tree: &DecoratedTree,
    t: usize,
    lower: (&FactorCensus, &InfiniteEstimate),
    upper: (&FactorCensus, &InfiniteEstimate),
) -> Result<NfaInput> {
    let h = lower.0.height;
    if upper.0.height != h + 1 {
        return Err(Error::InvalidFactorData(
            "censuses must have consecutive heights".into(),
        ));
    }
    let sig = tree.signature().clone();
    let covered = sig.level_start(t + h + 1);
    if tree.len() < covered {
        return Err(Error::DecorationsExhausted {
            needed: covered - 1,
            available: tree.len(),
        });
    }
    let pick = |(c, e): (&FactorCensus, &InfiniteEstimate)| -> Vec<DecoratedFactor> {
        e.infinite.iter().map(|&i| c.classes[i].factor.clone()).collect()
    };
    Ok(NfaInput {
        sig,
        t,
        h,
        prefix: tree.decorations()[..covered as usize].to_vec(),
        infinite: pick(lower),
        extensions: pick(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfao::{NumerationSystem, SequenceView};
    use crate::factors::{census, infinite_factor_estimate};
    use crate::fixtures;
    use crate::numeration::RationalBase;

    fn t_tree() -> DecoratedTree {
        let base = RationalBase::new(3, 2).unwrap();
        let view = SequenceView::msd(fixtures::toy_dfao(), NumerationSystem::Rational(base)).unwrap();
        DecoratedTree::from_view(&view, 50_000)
    }

    fn reference_input() -> NfaInput {
        let tree = t_tree();
        let sig = tree.signature().clone();
        let c1 = census(&tree, 1, u64::MAX);
        let c2 = census(&tree, 2, u64::MAX);
        let e2 = infinite_factor_estimate(&c2, &sig, 1);
        let f = |root| tree.factor_at(root, 1).unwrap();
        let shape = c1
            .classes
            .iter()
            .find(|c| c.factor.to_string() == "[e:0 0:0 2:0]")
            .unwrap()
            .factor
            .clone();
        NfaInput {
            sig: sig.clone(),
            t: 1,
            h: 1,
            prefix: tree.decorations()[..sig.level_start(3) as usize].to_vec(),
            infinite: vec![f(1), shape, f(3), f(2)],
            extensions: e2.infinite.iter().map(|&i| c2.classes[i].factor.clone()).collect(),
        }
    }

    #[test]
    fn runs_table() {
        let input = reference_input();
        assert_eq!(input.extensions.len(), 8);
        let nfa = build_factor_nfa(&input).unwrap();
        let expected = [
            ("e", "q0"),
            ("2", "q0 q1"),
            ("21", "q0 0 1"),
            ("210", "q0 0 7 8"),
            ("212", "q0 0 7 9"),
            ("2101", "q0 0 7 5 6"),
            ("2120", "q0 0 7 7 8"),
            ("2122", "q0 0 7 7 9"),
            ("21011", "q0 0 7 5 0 1"),
            ("21200", "q0 0 7 7 7 8"),
            ("21202", "q0 0 7 7 7 9"),
            ("21221", "q0 0 7 7 5 6"),
        ];
        for (w, run) in expected {
            let digits = crate::numeration::parse_digits(w).unwrap();
            let runs = nfa.successful_runs(&digits);
            assert_eq!(runs.len(), 1, "{w}");
            assert_eq!(nfa.run_names(&runs[0]).join(" "), run, "{w}");
        }
        let finals = |b| -> Vec<&str> {
            (0..nfa.num_states())
                .filter(|&s| nfa.final_output(s) == Some(Letter(b)))
                .map(|s| nfa.names()[s].as_str())
                .collect()
        };
        assert_eq!(finals(1), ["1", "8", "9"]);
        assert_eq!(finals(0), ["q0", "q1", "3", "4", "6"]);
    }

    #[test]
    fn runs_follow_the_sequence() {
        let tree = t_tree();
        let nfa = build_factor_nfa(&reference_input()).unwrap();
        let sig = tree.signature();
        for n in 0..3000u64 {
            let w = sig.rep_ans(n);
            let runs = nfa.successful_runs(w.digits());
            assert!(!runs.is_empty());
            for r in runs {
                assert_eq!(
                    nfa.final_output(*r.last().unwrap()),
                    Some(tree.decorations()[n as usize])
                );
            }
        }
    }

    #[test]
    fn determinization_matches_fixture() {
        let nfa = build_factor_nfa(&reference_input()).unwrap();
        let d = determinize(&nfa).unwrap();
        assert_eq!(d.num_states(), 5);
        assert!(d.is_isomorphic(&fixtures::determinize_dfao()));
        let raw = subset_construction(&nfa).unwrap();
        assert_eq!(raw.name(0), "{q0}");
        let tree = t_tree();
        for n in 0..3000u64 {
            let w = tree.signature().rep_ans(n);
            assert_eq!(d.output_of(w.digits()).unwrap(), tree.decorations()[n as usize]);
        }
    }

    #[test]
    fn census_input() {
        let tree = t_tree();
        let sig = tree.signature().clone();
        let c1 = census(&tree, 1, u64::MAX);
        let c2 = census(&tree, 2, u64::MAX);
        let e1 = infinite_factor_estimate(&c1, &sig, 1);
        let e2 = infinite_factor_estimate(&c2, &sig, 1);
        let input = nfa_input_from_census(&tree, 1, (&c1, &e1), (&c2, &e2)).unwrap();
        let d = determinize(&build_factor_nfa(&input).unwrap()).unwrap();
        assert!(d.is_isomorphic(&fixtures::determinize_dfao()));
    }

    #[test]
    fn multi_valued_extension_is_rejected() {
        let mut input = reference_input();
        let u = input.extensions[0].clone();
        let mut key = u.key();
        let last = key.len() - 1;
        key[last] ^= 1;
        input.extensions.push(DecoratedFactor::from_key(&key).unwrap());
        let err = build_factor_nfa(&input).unwrap_err();
        assert!(matches!(err, Error::MultiValuedExtension { count: 2, .. }), "{err}");
    }

    #[test]
    fn missing_factor_is_rejected() {
        let mut input = reference_input();
        input.infinite.pop();
        assert!(matches!(build_factor_nfa(&input), Err(Error::InvalidFactorData(_))));
        let mut input = reference_input();
        input.t = 0;
        assert!(build_factor_nfa(&input).is_err());
    }
}
