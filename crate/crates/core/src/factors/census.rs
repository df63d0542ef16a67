use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::{DecoratedFactor, DecoratedTree, FactorKey};
use crate::dfao::{Dfao, StateId};
use crate::error::Result;
use crate::numeration::{rep, DigitWord, RationalBase};
use crate::sigtree::{LabeledSignature, NodeIndex};

const CHUNK: u64 = 4096;

/// One class of equal factors with the roots where it occurs.
#[derive(Clone, Debug)]
pub struct CensusClass {
    pub factor: DecoratedFactor,
    /// Roots in increasing order.
    pub roots: Vec<NodeIndex>,
}

impl CensusClass {
    pub fn first_root(&self) -> NodeIndex {
        self.roots[0]
    }

    pub fn last_root(&self) -> NodeIndex {
        *self.roots.last().unwrap()
    }
}

/// The height-`h` factors rooted at the nodes `0..roots_scanned`.
#[derive(Clone, Debug)]
pub struct FactorCensus {
    pub height: usize,
    /// Classes ordered by first occurrence.
    pub classes: Vec<CensusClass>,
    pub roots_scanned: u64,
    /// Number of levels whose nodes were all scanned.
    pub complete_levels: usize,
    /// Deepest level reached by a scanned root.
    pub level_bound: usize,
    index: HashMap<FactorKey, usize>,
}

impl FactorCensus {
    /// `#F_h` on the window.
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// Number of distinct domains, decorations ignored.
    pub fn undecorated_count(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.factor.undecorated().key())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn class_of(&self, f: &DecoratedFactor) -> Option<usize> {
        self.index.get(&f.key()).copied()
    }

    pub fn class_of_key(&self, key: &[u32]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn class_of_root(&self, root: NodeIndex) -> Option<usize> {
        self.classes.iter().position(|c| c.roots.binary_search(&root).is_ok())
    }
}

impl fmt::Display for FactorCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "h={} #F_h={} roots={} complete_levels={}",
            self.height,
            self.count(),
            self.roots_scanned,
            self.complete_levels
        )?;
        for (i, c) in self.classes.iter().enumerate() {
            writeln!(f, "{i}\t{}\t{}\t{}", c.roots.len(), c.first_root(), c.factor)?;
        }
        Ok(())
    }
}

/// Census of the height-`h` factors rooted at the first `root_budget` nodes,
/// capped by what the decorations cover.
pub fn census(tree: &DecoratedTree, h: usize, root_budget: u64) -> FactorCensus {
    let roots = root_budget.min(tree.max_roots(h));
    let chunks: Vec<(u64, u64)> = (0..roots)
        .step_by(CHUNK as usize)
        .map(|s| (s, (s + CHUNK).min(roots)))
        .collect();
    let partial: Vec<Vec<(FactorKey, Vec<NodeIndex>)>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut local: Vec<(FactorKey, Vec<NodeIndex>)> = Vec::new();
            let mut seen: HashMap<FactorKey, usize> = HashMap::new();
            let mut key = Vec::new();
            let mut frontier = Vec::new();
            for root in start..end {
                tree.write_key(root, h, &mut key, &mut frontier);
                match seen.get(&key) {
                    Some(&i) => local[i].1.push(root),
                    None => {
                        seen.insert(key.clone(), local.len());
                        local.push((key.clone(), vec![root]));
                    }
                }
            }
            local
        })
        .collect();
    let mut index: HashMap<FactorKey, usize> = HashMap::new();
    let mut classes: Vec<CensusClass> = Vec::new();
    for chunk in partial {
        for (key, roots) in chunk {
            match index.get(&key) {
                Some(&i) => classes[i].roots.extend(roots),
                None => {
                    let factor = tree.factor_at(roots[0], h).expect("root within window");
                    index.insert(key, classes.len());
                    classes.push(CensusClass { factor, roots });
                }
            }
        }
    }
    let sig = tree.signature();
    let (complete_levels, level_bound) = if roots == 0 {
        (0, 0)
    } else {
        let deepest = sig.level_of(roots - 1);
        let complete = if sig.level_start(deepest + 1) == roots {
            deepest + 1
        } else {
            deepest
        };
        (complete, deepest)
    };
    FactorCensus {
        height: h,
        classes,
        roots_scanned: roots,
        complete_levels,
        level_bound,
        index,
    }
}

/// `#F_h` for each height in `heights`.
pub fn census_series(
    tree: &DecoratedTree,
    heights: impl IntoIterator<Item = usize>,
    root_budget: u64,
) -> Vec<(usize, usize)> {
    heights
        .into_iter()
        .map(|h| (h, census(tree, h, root_budget).count()))
        .collect()
}

/// Heuristic split of a census into factors occurring infinitely often and
/// factors confined to a finite prefix of the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfiniteEstimate {
    pub threshold: usize,
    /// Classes with a root on a level `≥ threshold`.
    pub infinite: Vec<usize>,
    /// Classes whose roots all lie above `threshold`.
    pub prefix_only: Vec<usize>,
    /// Infinite classes grouped by the last letter of their radix-least
    /// deepest word.
    pub by_letter: BTreeMap<u32, Vec<usize>>,
}

pub fn infinite_factor_estimate(census: &FactorCensus, sig: &LabeledSignature, threshold: usize) -> InfiniteEstimate {
    let mut infinite = Vec::new();
    let mut prefix_only = Vec::new();
    let mut by_letter: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, c) in census.classes.iter().enumerate() {
        if sig.level_of(c.last_root()) >= threshold {
            infinite.push(i);
            if let Some(a) = c.factor.first_letter_at_depth(census.height) {
                by_letter.entry(a).or_default().push(i);
            }
        } else {
            prefix_only.push(i);
        }
    }
    InfiniteEstimate {
        threshold,
        infinite,
        prefix_only,
        by_letter,
    }
}

/// Extensions of height-`h` infinite classes to height-`h+1` infinite classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionAnalysis {
    /// `(class at h, first letter c) → classes at h+1 in F^∞_{h+1,c}` whose
    /// truncation is that class.
    pub extensions: BTreeMap<(usize, u32), Vec<usize>>,
}

impl ExtensionAnalysis {
    /// Entries with two or more extensions.
    pub fn multi_valued(&self) -> Vec<((usize, u32), &[usize])> {
        self.extensions
            .iter()
            .filter(|(_, v)| v.len() >= 2)
            .map(|(k, v)| (*k, v.as_slice()))
            .collect()
    }

    pub fn is_single_valued(&self) -> bool {
        self.multi_valued().is_empty()
    }
}

pub fn extension_analysis(
    lower: &FactorCensus,
    lower_est: &InfiniteEstimate,
    upper: &FactorCensus,
    upper_est: &InfiniteEstimate,
    sig: &LabeledSignature,
) -> ExtensionAnalysis {
    let mut extensions: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    for &k in &lower_est.infinite {
        for c in sig.first_letters() {
            extensions.insert((k, c), Vec::new());
        }
    }
    for &u in &upper_est.infinite {
        let factor = &upper.classes[u].factor;
        let Some(k) = lower.class_of(&factor.truncate(lower.height)) else {
            continue;
        };
        let Some(c) = factor.first_letter_at_depth(upper.height) else {
            continue;
        };
        if let Some(v) = extensions.get_mut(&(k, c)) {
            v.push(u);
        }
    }
    ExtensionAnalysis { extensions }
}

/// Outcome of [`rationality_probe`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    /// `#F_h = #F_{h+1}` for this `h`.
    Stabilized(usize),
    /// `#F_h` strictly increased up to this height.
    StrictlyGrowingUpTo(usize),
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeVerdict::Stabilized(h) => write!(f, "STABILIZED({h})"),
            ProbeVerdict::StrictlyGrowingUpTo(h) => write!(f, "STRICTLY-GROWING-UP-TO({h})"),
        }
    }
}

/// Looks for the first `h` with `#F_h = #F_{h+1}` in a series of
/// `(h, #F_h)` pairs sorted by `h`.
pub fn rationality_probe(series: &[(usize, usize)]) -> ProbeVerdict {
    for w in series.windows(2) {
        if w[1].0 == w[0].0 + 1 && w[0].1 == w[1].1 {
            return ProbeVerdict::Stabilized(w[0].0);
        }
    }
    ProbeVerdict::StrictlyGrowingUpTo(series.last().map_or(0, |p| p.0))
}

/// Words of length exactly `h` that extend `rep(n)` inside `L_{p/q}`, in
/// radix order. The root does not extend by leading zeros.
pub fn domain_at_height(base: RationalBase, n: u64, h: usize) -> Vec<DigitWord> {
    let sig = LabeledSignature::derive_rational(base);
    let mut level = vec![(n, DigitWord::empty())];
    for _ in 0..h {
        level = level
            .into_iter()
            .flat_map(|(m, w)| {
                sig.proper_children(m)
                    .map(|(c, a)| {
                        let mut w = w.clone();
                        w.push(a);
                        (c, w)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    level.into_iter().map(|(_, w)| w).collect()
}

/// Report of [`congruence_domain_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub height: usize,
    pub pairs_checked: usize,
    pub congruent_pairs: usize,
    /// Congruent pairs with different domains.
    pub domain_violations: Vec<(u64, u64)>,
    /// Pairs sharing a length-`h` extension without being congruent.
    pub extension_violations: Vec<(u64, u64)>,
    /// Number of distinct non-empty height-`h` domains.
    pub classes: usize,
    /// Whether those domains partition `A_p^h`.
    pub partition: bool,
}

impl CongruenceReport {
    pub fn is_clean(&self) -> bool {
        self.domain_violations.is_empty() && self.extension_violations.is_empty() && self.partition
    }
}

/// Samples pairs of positive integers and checks that congruence mod `q^h`
/// and sharing a length-`h` extension both coincide with having the same
/// height-`h` domain; also checks that the domains partition `A_p^h` into
/// `q^h` classes.
pub fn congruence_domain_check(base: RationalBase, h: usize, samples: usize, seed: u64) -> CongruenceReport {
    let q = u64::from(base.q());
    let p = u64::from(base.p());
    let modulus = q.pow(h as u32);
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let range = 1..(modulus * 64).max(2000);
    let mut domain_violations = Vec::new();
    let mut extension_violations = Vec::new();
    let mut congruent_pairs = 0;
    for i in 0..samples {
        let n = rng.gen_range(range.clone());
        let m = if i % 2 == 0 {
            n + modulus * rng.gen_range(1..64)
        } else {
            rng.gen_range(range.clone())
        };
        let dn = domain_at_height(base, n, h);
        let dm = domain_at_height(base, m, h);
        let congruent = n % modulus == m % modulus;
        if congruent {
            congruent_pairs += 1;
            if dn != dm {
                domain_violations.push((n, m));
            }
        }
        let shared = dn.iter().any(|w| dm.binary_search(w).is_ok());
        if shared && !congruent {
            extension_violations.push((n, m));
        }
    }
    let domains: Vec<Vec<DigitWord>> = (modulus..2 * modulus).map(|n| domain_at_height(base, n, h)).collect();
    let distinct: BTreeSet<&Vec<DigitWord>> = domains.iter().collect();
    let total: usize = distinct.iter().map(|d| d.len()).sum();
    let union: BTreeSet<&DigitWord> = distinct.iter().flat_map(|d| d.iter()).collect();
    let partition = distinct.iter().all(|d| !d.is_empty())
        && distinct.len() as u64 == modulus
        && union.len() == total
        && total as u64 == p.pow(h as u32)
        && union
            .iter()
            .all(|w| w.len() == h && w.digits().iter().all(|&a| u64::from(a) < p));
    CongruenceReport {
        height: h,
        pairs_checked: samples,
        congruent_pairs,
        domain_violations,
        extension_violations,
        classes: distinct.len(),
        partition,
    }
}

/// Outcome of [`weird_condition_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeirdVerdict {
    /// Pairs `(val u, val v)` with congruent values and different states that
    /// no common extension of length `≤ h` separates; the first is the
    /// witness.
    Fails {
        height: usize,
        pairs: Vec<(u64, u64)>,
    },
    NoCounterexampleUpTo(usize),
}

impl WeirdVerdict {
    pub fn fails(&self) -> bool {
        matches!(self, WeirdVerdict::Fails { .. })
    }
}

impl fmt::Display for WeirdVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeirdVerdict::Fails { height, pairs } => {
                let (u, v) = pairs[0];
                write!(f, "FAILS({height}) witness {u} {v} ({} pairs)", pairs.len())
            }
            WeirdVerdict::NoCounterexampleUpTo(l) => write!(f, "NO-COUNTEREXAMPLE-UP-TO({l})"),
        }
    }
}

/// Searches words `u, v ∈ L_{p/q}` of length at most `max_len` with
/// `val u ≡ val v (mod q^h)` and `δ(q₀,u) ≠ δ(q₀,v)` such that every common
/// extension `w` of length at most `h` gives the same output.
pub fn weird_condition_check(d: &Dfao, base: RationalBase, h: usize, max_len: usize) -> Result<WeirdVerdict> {
    let sig = LabeledSignature::derive_rational(base);
    if let Some(a) = sig.letters().into_iter().find(|&a| !d.has_digit(a)) {
        return Err(crate::error::Error::DigitOutsideAlphabet(a));
    }
    let modulus = u64::from(base.q()).pow(h as u32);
    let end = sig.level_start(max_len + 1);
    let mut states: Vec<StateId> = Vec::with_capacity(end as usize);
    states.push(d.initial());
    for n in 1..end {
        let (m, a) = sig.parent_of(n)?;
        states.push(d.try_step(states[m as usize], a).expect("checked"));
    }
    let mut groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for n in 0..end {
        groups.entry(n % modulus).or_default().push(n);
    }
    let mut pairs: Vec<(u64, u64)> = groups
        .par_iter()
        .flat_map_iter(|(_, nodes)| {
            let mut found = Vec::new();
            for (i, &u) in nodes.iter().enumerate() {
                for &v in &nodes[i + 1..] {
                    let (s, t) = (states[u as usize], states[v as usize]);
                    if s != t && !separated(d, &sig, (u, s), (v, t), h) {
                        found.push((u, v));
                    }
                }
            }
            found
        })
        .collect();
    pairs.sort_unstable();
    Ok(if pairs.is_empty() {
        WeirdVerdict::NoCounterexampleUpTo(max_len)
    } else {
        WeirdVerdict::Fails { height: h, pairs }
    })
}

/// Whether some common extension of length `≤ h` gives different outputs.
fn separated(d: &Dfao, sig: &LabeledSignature, u: (u64, StateId), v: (u64, StateId), h: usize) -> bool {
    let mut level = vec![(u, v)];
    for depth in 0..=h {
        if level.iter().any(|&((_, s), (_, t))| d.output(s) != d.output(t)) {
            return true;
        }
        if depth == h {
            break;
        }
        let mut next = Vec::new();
        for ((m, s), (n, t)) in level {
            for (c, a) in sig.proper_children(m) {
                if let Some(c2) = sig.child_by_label(n, a).filter(|&c2| !(n == 0 && c2 == 0)) {
                    next.push(((c, d.try_step(s, a).unwrap()), (c2, d.try_step(t, a).unwrap())));
                }
            }
        }
        level = next;
    }
    false
}

/// Canonical representations of the values in a witness pair.
pub fn witness_words(base: RationalBase, pair: (u64, u64)) -> (DigitWord, DigitWord) {
    (rep(base, pair.0), rep(base, pair.1))
}
