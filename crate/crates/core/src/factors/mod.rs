//! Decorated trees and their finite-height factors.
//!
//! A decoration assigns `x_n` to the node of rank `n`. The factor `T[w, h]`
//! is the subtree rooted at `w` truncated at height `h`, together with its
//! decorations; two factors are equal when they have the same domain and the
//! same decorations.

mod census;
mod nfa;

use std::fmt;

use crate::dfao::{format_letters, Letter, SequenceView};
use crate::error::{Error, Result};
use crate::numeration::DigitWord;
use crate::sigtree::{LabeledSignature, NodeIndex};

pub use census::{
    census, census_series, congruence_domain_check, domain_at_height, extension_analysis, infinite_factor_estimate,
    rationality_probe, weird_condition_check, witness_words, CensusClass, CongruenceReport, ExtensionAnalysis,
    FactorCensus, InfiniteEstimate, ProbeVerdict, WeirdVerdict,
};
pub use nfa::{build_factor_nfa, determinize, nfa_input_from_census, subset_construction, FactorNfa, NfaInput};

const NO_PARENT: u32 = u32::MAX;

/// The i-tree of a signature with a finite prefix of its decoration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedTree {
    sig: LabeledSignature,
    decorations: Vec<Letter>,
}

impl DecoratedTree {
    /// `decorations[n]` decorates the node of rank `n`.
    pub fn new(sig: LabeledSignature, decorations: Vec<Letter>) -> Self {
        Self { sig, decorations }
    }

    /// Decorates the first `nodes` nodes with the sequence of `view`.
    pub fn from_view(view: &SequenceView, nodes: usize) -> Self {
        Self::new(view.signature().clone(), view.sequence_prefix(nodes))
    }

    pub fn constant(sig: LabeledSignature, nodes: usize, letter: Letter) -> Self {
        Self::new(sig, vec![letter; nodes])
    }

    pub fn signature(&self) -> &LabeledSignature {
        &self.sig
    }

    pub fn decorations(&self) -> &[Letter] {
        &self.decorations
    }

    /// Number of decorated nodes.
    pub fn len(&self) -> u64 {
        self.decorations.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.decorations.is_empty()
    }

    pub fn decoration(&self, n: NodeIndex) -> Result<Letter> {
        self.decorations
            .get(n as usize)
            .copied()
            .ok_or(Error::DecorationsExhausted {
                needed: n,
                available: self.len(),
            })
    }

    /// Number of leading nodes that must be decorated to extract `T[root, h]`.
    pub fn nodes_needed(&self, root: NodeIndex, h: usize) -> u64 {
        let mut last = root;
        for _ in 0..h {
            last = self.sig.first_child(last) + self.sig.degree(last) as u64 - 1;
        }
        last + 1
    }

    /// Number of roots `0..R` whose height-`h` factors are fully decorated.
    pub fn max_roots(&self, h: usize) -> u64 {
        let (mut lo, mut hi) = (0u64, self.len());
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.nodes_needed(mid - 1, h) <= self.len() {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// `T[root, h]`.
    pub fn factor_at(&self, root: NodeIndex, h: usize) -> Result<DecoratedFactor> {
        let needed = self.nodes_needed(root, h);
        if needed > self.len() {
            return Err(Error::DecorationsExhausted {
                needed: needed - 1,
                available: self.len(),
            });
        }
        let mut nodes = vec![FactorNode {
            parent: NO_PARENT,
            label: NO_PARENT,
            decoration: self.decorations[root as usize],
            depth: 0,
        }];
        let mut ranks = vec![root];
        let mut i = 0;
        while i < nodes.len() {
            let depth = nodes[i].depth;
            if depth < h {
                for (c, a) in self.sig.proper_children(ranks[i]) {
                    nodes.push(FactorNode {
                        parent: i as u32,
                        label: a,
                        decoration: self.decorations[c as usize],
                        depth: depth + 1,
                    });
                    ranks.push(c);
                }
            }
            i += 1;
        }
        Ok(DecoratedFactor {
            height: h,
            nodes,
            is_root_factor: root == 0,
        })
    }

    /// `T[w, h]` for a word `w` of the language.
    pub fn factor_at_word(&self, w: &DigitWord, h: usize) -> Result<DecoratedFactor> {
        self.factor_at(self.sig.val_ans(w)?, h)
    }

    /// Appends the key of `T[root, h]` to `key`; the tree must cover it.
    pub(crate) fn write_key(&self, root: NodeIndex, h: usize, key: &mut Vec<u32>, frontier: &mut Vec<NodeIndex>) {
        key.clear();
        frontier.clear();
        key.extend([NO_PARENT, NO_PARENT, self.decorations[root as usize].0]);
        frontier.push(root);
        let mut start = 0;
        for _ in 0..h {
            let end = frontier.len();
            for i in start..end {
                let m = frontier[i];
                for (c, a) in self.sig.proper_children(m) {
                    key.extend([i as u32, a, self.decorations[c as usize].0]);
                    frontier.push(c);
                }
            }
            start = end;
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
struct FactorNode {
    parent: u32,
    label: u32,
    decoration: Letter,
    depth: usize,
}

/// Canonical key of a factor: `(parent, label, decoration)` for each node in
/// radix order of the node words, the root using `u32::MAX` for both.
pub type FactorKey = Vec<u32>;

/// A factor `T[w, h]`: nodes listed in radix order of their words.
#[derive(Clone, Debug)]
pub struct DecoratedFactor {
    height: usize,
    nodes: Vec<FactorNode>,
    is_root_factor: bool,
}

impl PartialEq for DecoratedFactor {
    fn eq(&self, other: &Self) -> bool {
        self.height == other.height && self.nodes == other.nodes
    }
}

impl Eq for DecoratedFactor {}

impl std::hash::Hash for DecoratedFactor {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.height.hash(state);
        self.nodes.hash(state);
    }
}

impl DecoratedFactor {
    pub fn height(&self) -> usize {
        self.height
    }

    /// Whether the factor was extracted at the root of the tree.
    pub fn is_root_factor(&self) -> bool {
        self.is_root_factor
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn key(&self) -> FactorKey {
        self.nodes
            .iter()
            .flat_map(|n| [n.parent, n.label, n.decoration.0])
            .collect()
    }

    /// Rebuilds a factor from its key.
    pub fn from_key(key: &[u32]) -> Result<Self> {
        let bad = || Error::InvalidFactorData(format!("malformed factor key {key:?}"));
        if !key.len().is_multiple_of(3) || key.len() < 3 || key[0] != NO_PARENT {
            return Err(bad());
        }
        let mut nodes: Vec<FactorNode> = Vec::with_capacity(key.len() / 3);
        for (i, t) in key.chunks(3).enumerate() {
            let depth = if i == 0 {
                0
            } else {
                let p = t[0] as usize;
                if p >= i {
                    return Err(bad());
                }
                nodes[p].depth + 1
            };
            nodes.push(FactorNode {
                parent: t[0],
                label: t[1],
                decoration: Letter(t[2]),
                depth,
            });
        }
        let height = nodes.iter().map(|n| n.depth).max().unwrap_or(0);
        Ok(Self {
            height,
            nodes,
            is_root_factor: false,
        })
    }

    pub fn root_decoration(&self) -> Letter {
        self.nodes[0].decoration
    }

    /// Word of node `i` relative to the factor root.
    pub fn word(&self, i: usize) -> DigitWord {
        let mut digits = Vec::new();
        let mut j = i;
        while self.nodes[j].parent != NO_PARENT {
            digits.push(self.nodes[j].label);
            j = self.nodes[j].parent as usize;
        }
        digits.reverse();
        DigitWord::new(digits)
    }

    /// Domain in radix order.
    pub fn domain(&self) -> Vec<DigitWord> {
        (0..self.nodes.len()).map(|i| self.word(i)).collect()
    }

    /// `(word, decoration)` pairs in radix order.
    pub fn entries(&self) -> Vec<(DigitWord, Letter)> {
        (0..self.nodes.len())
            .map(|i| (self.word(i), self.nodes[i].decoration))
            .collect()
    }

    pub fn depth(&self, i: usize) -> usize {
        self.nodes[i].depth
    }

    pub fn decoration(&self, i: usize) -> Letter {
        self.nodes[i].decoration
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        let p = self.nodes[i].parent;
        (p != NO_PARENT).then_some(p as usize)
    }

    pub fn label(&self, i: usize) -> Option<u32> {
        self.parent(i).map(|_| self.nodes[i].label)
    }

    /// Children of node `i` as `(index, label)` pairs, in label order.
    pub fn children(&self, i: usize) -> Vec<(usize, u32)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parent == i as u32)
            .map(|(j, n)| (j, n.label))
            .collect()
    }

    /// Words of length exactly `depth` in the domain, in radix order.
    pub fn words_at_depth(&self, depth: usize) -> Vec<DigitWord> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].depth == depth)
            .map(|i| self.word(i))
            .collect()
    }

    /// Last letter of the radix-least word of length exactly `depth`.
    pub fn first_letter_at_depth(&self, depth: usize) -> Option<u32> {
        if depth == 0 {
            return None;
        }
        self.nodes.iter().find(|n| n.depth == depth).map(|n| n.label)
    }

    /// The factor truncated at height `h ≤ self.height()`.
    pub fn truncate(&self, h: usize) -> DecoratedFactor {
        let keep = self.nodes.iter().take_while(|n| n.depth <= h).count();
        DecoratedFactor {
            height: h,
            nodes: self.nodes[..keep].to_vec(),
            is_root_factor: self.is_root_factor,
        }
    }

    /// The subtree below the root child labeled `d`, truncated at height `h`.
    pub fn subtree(&self, d: u32, h: usize) -> Option<DecoratedFactor> {
        let (start, _) = self.children(0).into_iter().find(|&(_, a)| a == d)?;
        let mut map = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let inside = i == start || (n.parent != NO_PARENT && map[n.parent as usize] != u32::MAX);
            if !inside {
                continue;
            }
            let depth = n.depth - self.nodes[start].depth;
            if depth > h {
                continue;
            }
            map[i] = nodes.len() as u32;
            nodes.push(FactorNode {
                parent: if i == start { NO_PARENT } else { map[n.parent as usize] },
                label: if i == start { NO_PARENT } else { n.label },
                decoration: n.decoration,
                depth,
            });
        }
        Some(DecoratedFactor {
            height: h,
            nodes,
            is_root_factor: false,
        })
    }

    /// Same domain with every decoration set to `0`.
    pub fn undecorated(&self) -> DecoratedFactor {
        let mut f = self.clone();
        for n in &mut f.nodes {
            n.decoration = Letter(0);
        }
        f
    }

    /// Graphviz rendering; node labels are the decorations.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!(
            "digraph \"{}\" {{\n  node [shape=circle];\n",
            crate::dfao::io_escape(name)
        );
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  v{i} [label=\"{}\"];\n", n.decoration));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.parent != NO_PARENT {
                out.push_str(&format!("  v{} -> v{i} [label=\"{}\"];\n", n.parent, n.label));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for DecoratedFactor {
    /// `word:decoration` entries in radix order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().iter().map(|(w, b)| format!("{w}:{b}")).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Decorations of a factor listed level by level, for compact reports.
pub fn level_decorations(f: &DecoratedFactor) -> String {
    let mut levels: Vec<Vec<Letter>> = vec![Vec::new(); f.height() + 1];
    for i in 0..f.len() {
        levels[f.depth(i)].push(f.decoration(i));
    }
    levels.iter().map(|l| format_letters(l)).collect::<Vec<_>>().join("/")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfao::NumerationSystem;
    use crate::fixtures;
    use crate::numeration::RationalBase;
    use rand::{Rng, SeedableRng};

    fn t_tree(nodes: usize) -> DecoratedTree {
        let view = SequenceView::msd(
            fixtures::toy_dfao(),
            NumerationSystem::Rational(RationalBase::new(3, 2).unwrap()),
        )
        .unwrap();
        DecoratedTree::from_view(&view, nodes)
    }

    #[test]
    fn root_factor_of_t() {
        let tree = t_tree(100);
        let f = tree.factor_at(0, 2).unwrap();
        assert!(f.is_root_factor());
        assert_eq!(f.to_string(), "[e:0 2:0 21:1]");
        let g = tree.factor_at_word(&"21".parse().unwrap(), 2).unwrap();
        assert_eq!(g.to_string(), "[e:1 0:1 2:1 01:0 20:1 22:1]");
        assert_eq!(g.first_letter_at_depth(2), Some(1));
        assert_eq!(level_decorations(&g), "1/11/011");
    }

    #[test]
    fn height_zero() {
        let tree = t_tree(100);
        let f = tree.factor_at(4, 0).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.root_decoration(), Letter(1));
    }

    #[test]
    fn exhausted_decorations() {
        let tree = t_tree(10);
        assert!(matches!(tree.factor_at(9, 1), Err(Error::DecorationsExhausted { .. })));
        let r = tree.max_roots(1);
        assert!(tree.factor_at(r - 1, 1).is_ok());
        assert!(tree.factor_at(r, 1).is_err());
    }

    #[test]
    fn truncation_and_subtrees() {
        let tree = t_tree(2000);
        for root in [1u64, 2, 5, 17, 40] {
            let f3 = tree.factor_at(root, 3).unwrap();
            assert_eq!(f3.truncate(2), tree.factor_at(root, 2).unwrap());
            for (c, a) in tree.signature().proper_children(root) {
                assert_eq!(f3.subtree(a, 2).unwrap(), tree.factor_at(c, 2).unwrap());
            }
        }
    }

    #[test]
    fn keys_round_trip() {
        let tree = t_tree(5000);
        let mut key = Vec::new();
        let mut frontier = Vec::new();
        for root in 1..300 {
            let f = tree.factor_at(root, 3).unwrap();
            tree.write_key(root, 3, &mut key, &mut frontier);
            assert_eq!(key, f.key());
            assert_eq!(DecoratedFactor::from_key(&key).unwrap(), f);
        }
        assert!(DecoratedFactor::from_key(&[0, 0, 0]).is_err());
    }

    #[test]
    fn key_equality_matches_entries() {
        let tree = t_tree(20_000);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = rng.gen_range(1..2000);
            let b = rng.gen_range(1..2000);
            let fa = tree.factor_at(a, 3).unwrap();
            let fb = tree.factor_at(b, 3).unwrap();
            assert_eq!(fa.key() == fb.key(), fa.entries() == fb.entries());
            assert_eq!(fa == fb, fa.key() == fb.key());
        }
    }

    #[test]
    fn dot_export() {
        let dot = t_tree(100).factor_at(2, 1).unwrap().to_dot("T[21,1]");
        assert!(dot.contains("v0 -> v1 [label=\"0\"]"));
        assert!(dot.contains("v0 -> v2 [label=\"2\"]"));
    }
}
