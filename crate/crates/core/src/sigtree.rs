//! Virtual i-trees generated by purely periodic labeled signatures.
//!
//! Nodes are identified by their breadth-first rank. Node `m` has
//! `|w_{m mod r}|` children, the first of which has rank
//! `S(m) = (m div r)·P + Σ_{k < m mod r} |w_k|`. The root is its own first
//! child (edge label 0), which absorbs leading zeros.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeration::{format_digits, parse_digits, DigitWord, RationalBase};

/// Breadth-first rank of a node; equals the integer it represents.
pub type NodeIndex = u64;

/// A purely periodic labeled signature `(w_0, …, w_{r−1})^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledSignature {
    words: Vec<DigitWord>,
    prefix: Vec<u64>,
    period_degree: u64,
}

impl LabeledSignature {
    pub fn new(words: Vec<DigitWord>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidSignature("signature has no words".into()));
        }
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidSignature(format!("word {i} is empty")));
            }
            if w.digits().windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::InvalidSignature(format!(
                    "letters of word {i} ({w}) are not strictly increasing"
                )));
            }
        }
        if words[0].digits()[0] != 0 || words[0].len() < 2 {
            return Err(Error::InvalidSignature(
                "first word must start with 0 and have length at least 2".into(),
            ));
        }
        let mut prefix = Vec::with_capacity(words.len());
        let mut acc = 0u64;
        for w in &words {
            prefix.push(acc);
            acc += w.len() as u64;
        }
        Ok(Self {
            words,
            prefix,
            period_degree: acc,
        })
    }

    pub fn from_digit_lists(words: Vec<Vec<u32>>) -> Result<Self> {
        Self::new(words.into_iter().map(DigitWord::new).collect())
    }

    /// The signature of `T(L_{p/q})`: `w_j` lists the digits `a < p` with
    /// `a ≡ −p·j (mod q)`.
    pub fn derive_rational(base: RationalBase) -> Self {
        let (p, q) = (u64::from(base.p()), u64::from(base.q()));
        let words = (0..q)
            .map(|j| {
                let target = (q - (p * j) % q) % q;
                DigitWord::new((0..base.p()).filter(|&a| u64::from(a) % q == target).collect())
            })
            .collect();
        Self::new(words).expect("rational signatures are valid")
    }

    /// The signature `(0 1 ⋯ k−1)^ω` of base-`k` numeration.
    pub fn integer_base(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSignature(format!("integer base {k} < 2")));
        }
        Self::new(vec![DigitWord::new((0..k).collect())])
    }

    pub fn words(&self) -> &[DigitWord] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &DigitWord {
        &self.words[i % self.words.len()]
    }

    /// The period `r`.
    pub fn period(&self) -> usize {
        self.words.len()
    }

    /// `P = Σ |w_i|`.
    pub fn period_degree(&self) -> u64 {
        self.period_degree
    }

    /// Sorted set of all letters used.
    pub fn letters(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.words.iter().flat_map(|w| w.digits().iter().copied()).collect();
        set.into_iter().collect()
    }

    /// One more than the largest letter.
    pub fn alphabet_bound(&self) -> u32 {
        self.letters().last().map_or(0, |&m| m + 1)
    }

    /// First letters `w_{i,0}` in signature order.
    pub fn first_letters(&self) -> Vec<u32> {
        self.words.iter().map(|w| w.digits()[0]).collect()
    }

    /// Whether distinct signature words never share a letter.
    pub fn has_disjoint_letters(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.words
            .iter()
            .flat_map(|w| w.digits().iter())
            .all(|&a| seen.insert(a))
    }

    /// Renames letters to `0, 1, …` in increasing order, returning the new
    /// signature together with the old letters indexed by their new value.
    pub fn relabel_consecutive(&self) -> (LabeledSignature, Vec<u32>) {
        let letters = self.letters();
        let words = self
            .words
            .iter()
            .map(|w| {
                DigitWord::new(
                    w.digits()
                        .iter()
                        .map(|a| letters.binary_search(a).unwrap() as u32)
                        .collect(),
                )
            })
            .collect();
        (
            LabeledSignature::new(words).expect("relabeling keeps the invariants"),
            letters,
        )
    }

    pub fn degree(&self, m: NodeIndex) -> usize {
        self.word(self.residue(m)).len()
    }

    fn residue(&self, m: NodeIndex) -> usize {
        (m % self.words.len() as u64) as usize
    }

    /// Rank of the first child of `m`.
    pub fn first_child(&self, m: NodeIndex) -> NodeIndex {
        let r = self.words.len() as u64;
        (m / r) * self.period_degree + self.prefix[self.residue(m)]
    }

    /// Rank of the `j`-th child of `m` and the label of the edge leading to it.
    pub fn child_index(&self, m: NodeIndex, j: usize) -> Result<(NodeIndex, u32)> {
        let w = self.word(self.residue(m));
        if j >= w.len() {
            return Err(Error::ChildOutOfRange {
                node: m,
                position: j,
                degree: w.len(),
            });
        }
        Ok((self.first_child(m) + j as u64, w.digits()[j]))
    }

    /// Children of `m` as `(rank, label)` pairs, including the root self-loop.
    pub fn children(&self, m: NodeIndex) -> impl Iterator<Item = (NodeIndex, u32)> + '_ {
        let first = self.first_child(m);
        self.word(self.residue(m))
            .digits()
            .iter()
            .enumerate()
            .map(move |(j, &a)| (first + j as u64, a))
    }

    /// Children of `m` excluding the root self-loop.
    pub fn proper_children(&self, m: NodeIndex) -> impl Iterator<Item = (NodeIndex, u32)> + '_ {
        self.children(m).filter(move |&(c, _)| c != m || m != 0)
    }

    /// The child reached from `m` by reading `a`, if any.
    pub fn child_by_label(&self, m: NodeIndex, a: u32) -> Option<NodeIndex> {
        let w = self.word(self.residue(m));
        w.digits()
            .iter()
            .position(|&x| x == a)
            .map(|j| self.first_child(m) + j as u64)
    }

    /// The parent of `n ≥ 1` and the label of the edge from it.
    pub fn parent_of(&self, n: NodeIndex) -> Result<(NodeIndex, u32)> {
        if n == 0 {
            return Err(Error::RootHasNoParent);
        }
        let block = n / self.period_degree;
        let rem = n % self.period_degree;
        let i = self.prefix.partition_point(|&s| s <= rem) - 1;
        let m = block * self.words.len() as u64 + i as u64;
        let j = (rem - self.prefix[i]) as usize;
        Ok((m, self.words[i].digits()[j]))
    }

    /// The `n`-th word of `L(s)` in radix order.
    pub fn rep_ans(&self, mut n: NodeIndex) -> DigitWord {
        let mut digits = Vec::new();
        while n > 0 {
            let (m, a) = self.parent_of(n).expect("n > 0");
            digits.push(a);
            n = m;
        }
        digits.reverse();
        DigitWord::new(digits)
    }

    /// Rank of the node reached by reading `w` from the root.
    pub fn val_ans(&self, w: &DigitWord) -> Result<NodeIndex> {
        let mut node = 0;
        for (position, &a) in w.digits().iter().enumerate() {
            node = self
                .child_by_label(node, a)
                .ok_or(Error::NotInLanguage { position, letter: a })?;
        }
        Ok(node)
    }

    /// The first `count` words of `L(s)` in radix order.
    pub fn enumerate_words(&self, count: usize) -> Vec<DigitWord> {
        let mut words: Vec<DigitWord> = Vec::with_capacity(count);
        if count == 0 {
            return words;
        }
        words.push(DigitWord::empty());
        for n in 1..count as u64 {
            let (m, a) = self.parent_of(n).expect("n > 0");
            let mut w = words[m as usize].clone();
            w.push(a);
            words.push(w);
        }
        words
    }

    /// Rank of the first node on level `level`, i.e. of the first word of
    /// that length.
    pub fn level_start(&self, level: usize) -> NodeIndex {
        let mut b = 0;
        for l in 0..level {
            b = if l == 0 { 1 } else { self.first_child(b) };
        }
        b
    }

    /// Starts of levels `0..=levels + 1`, so that level `ℓ` is
    /// `bounds[ℓ]..bounds[ℓ + 1]`.
    pub fn level_bounds(&self, levels: usize) -> Vec<NodeIndex> {
        let mut bounds = vec![0, 1];
        while bounds.len() < levels + 2 {
            let last = *bounds.last().unwrap();
            bounds.push(self.first_child(last));
        }
        bounds
    }

    /// Length of the word of rank `n`.
    pub fn level_of(&self, n: NodeIndex) -> usize {
        if n == 0 {
            return 0;
        }
        let mut level = 1;
        let mut next = self.first_child(1);
        while n >= next {
            next = self.first_child(next);
            level += 1;
        }
        level
    }

    /// Graphviz rendering of levels `0..=levels`.
    pub fn to_dot(&self, levels: usize) -> String {
        let bounds = self.level_bounds(levels);
        let end = bounds[levels + 1];
        let mut out = String::from("digraph itree {\n  node [shape=circle];\n");
        for n in 0..end {
            out.push_str(&format!("  n{n} [label=\"{n}\"];\n"));
        }
        for m in 0..end {
            for (c, a) in self.children(m) {
                if c < end {
                    out.push_str(&format!("  n{m} -> n{c} [label=\"{a}\"];\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for LabeledSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| format_digits(w.digits())).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for LabeledSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words = s
            .trim()
            .split(',')
            .map(|part| parse_digits(part).map(DigitWord::new))
            .collect::<Result<Vec<_>>>()?;
        Self::new(words)
    }
}

/// Signature of the tree of `L_{p/q}`.
pub fn derive_rational_signature(base: RationalBase) -> LabeledSignature {
    LabeledSignature::derive_rational(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::rep;
    use proptest::prelude::*;

    fn sig(s: &str) -> LabeledSignature {
        s.parse().unwrap()
    }

    fn strings(words: &[DigitWord]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn validation() {
        assert!("12,0".parse::<LabeledSignature>().is_err());
        assert!("0,1".parse::<LabeledSignature>().is_err());
        assert!("020,1".parse::<LabeledSignature>().is_err());
        assert!(",1".parse::<LabeledSignature>().is_err());
        assert!(LabeledSignature::new(vec![]).is_err());
    }

    #[test]
    fn derived_signatures() {
        for (p, q, expected) in [
            (3, 2, "02,1"),
            (5, 3, "03,14,2"),
            (5, 2, "024,13"),
            (7, 3, "036,25,14"),
            (11, 4, "048,159,2.6.10,37"),
        ] {
            let base = RationalBase::new(p, q).unwrap();
            let s = LabeledSignature::derive_rational(base);
            assert_eq!(s.to_string(), expected);
            assert_eq!(s.period_degree(), u64::from(p));
            assert!(s.has_disjoint_letters());
            assert_eq!(s.to_string().parse::<LabeledSignature>().unwrap(), s);
        }
    }

    #[test]
    fn children_in_base_three_halves() {
        let s = sig("02,1");
        assert_eq!(s.child_index(0, 1).unwrap(), (1, 2));
        assert_eq!(s.child_index(2, 0).unwrap(), (3, 0));
        assert_eq!(s.child_index(2, 1).unwrap(), (4, 2));
        assert_eq!(s.child_index(0, 0).unwrap(), (0, 0));
        assert!(s.child_index(1, 1).is_err());
    }

    #[test]
    fn parents_in_base_three_halves() {
        let s = sig("02,1");
        assert_eq!(s.parent_of(1).unwrap(), (0, 2));
        assert_eq!(s.parent_of(4).unwrap(), (2, 2));
        assert_eq!(s.parent_of(7).unwrap(), (4, 2));
        assert_eq!(s.parent_of(0), Err(Error::RootHasNoParent));
    }

    #[test]
    fn ans_023_14_5() {
        let s = sig("023,14,5");
        assert_eq!(
            strings(&s.enumerate_words(12)),
            ["e", "2", "3", "21", "24", "35", "210", "212", "213", "241", "244", "355"]
        );
        assert_eq!(s.rep_ans(15).to_string(), "2121");
        assert_eq!(s.val_ans(&"2121".parse().unwrap()).unwrap(), 15);
    }

    #[test]
    fn val_ans_cases() {
        let s = sig("02,1");
        assert_eq!(s.rep_ans(5).to_string(), "2101");
        assert_eq!(s.val_ans(&DigitWord::empty()).unwrap(), 0);
        assert_eq!(s.val_ans(&"0021".parse().unwrap()).unwrap(), 2);
        assert_eq!(
            s.val_ans(&"22".parse().unwrap()),
            Err(Error::NotInLanguage { position: 1, letter: 2 })
        );
        assert_eq!(strings(&s.enumerate_words(1)), ["e"]);
    }

    #[test]
    fn agrees_with_rational_arithmetic() {
        for (p, q) in [(3, 2), (5, 2), (7, 3), (11, 4)] {
            let base = RationalBase::new(p, q).unwrap();
            let s = LabeledSignature::derive_rational(base);
            let words = s.enumerate_words(100_000);
            for (n, w) in words.iter().enumerate() {
                let n = n as u64;
                assert_eq!(*w, rep(base, n));
                assert_eq!(s.val_ans(w).unwrap(), n);
                if n > 0 {
                    let (m, a) = s.parent_of(n).unwrap();
                    assert_eq!(base.edge(m, a), Some(n));
                }
            }
            for m in 1..20_000u64 {
                for a in 0..p {
                    assert_eq!(s.child_by_label(m, a), base.edge(m, a), "{base} {m} {a}");
                }
            }
        }
    }

    #[test]
    fn levels_match_word_lengths() {
        let s = sig("023,14,5");
        let words = s.enumerate_words(5000);
        let bounds = s.level_bounds(8);
        for (n, w) in words.iter().enumerate() {
            assert_eq!(s.level_of(n as u64), w.len());
        }
        for l in 0..8 {
            let count = words.iter().filter(|w| w.len() == l).count() as u64;
            assert_eq!(count, bounds[l + 1] - bounds[l]);
            assert_eq!(s.level_start(l), bounds[l]);
        }
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn dot_contains_self_loop() {
        let dot = sig("02,1").to_dot(2);
        assert!(dot.contains("n0 -> n0 [label=\"0\"]"));
        assert!(dot.contains("n1 -> n2 [label=\"1\"]"));
        assert!(!dot.contains("n3"));
    }

    #[test]
    fn relabeling() {
        let (s, old) = sig("023,14,5").relabel_consecutive();
        assert_eq!(s.to_string(), "023,14,5");
        assert_eq!(old, vec![0, 1, 2, 3, 4, 5]);
        let (s, old) = sig("04,7").relabel_consecutive();
        assert_eq!(s.to_string(), "01,2");
        assert_eq!(old, vec![0, 4, 7]);
    }

    proptest! {
        #[test]
        fn parent_inverts_child(
            words in proptest::collection::vec(1usize..4, 1..4),
            m in 0u64..1_000_000,
        ) {
            let mut next = 0u32;
            let mut lists = Vec::new();
            for (i, len) in words.iter().enumerate() {
                let len = if i == 0 { len + 1 } else { *len };
                lists.push((next..next + len as u32).collect::<Vec<_>>());
                next += len as u32;
            }
            let s = LabeledSignature::from_digit_lists(lists).unwrap();
            for (j, (c, a)) in s.children(m).enumerate() {
                if c != m {
                    prop_assert_eq!(s.parent_of(c).unwrap(), (m, a));
                }
                prop_assert_eq!(s.child_index(m, j).unwrap(), (c, a));
            }
        }
    }
}
