//! Alternating morphisms, block substitutions and their correspondence with
//! automata over periodic signatures.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::dfao::{format_letters, parse_letters, Dfao, Letter, NumerationSystem, SequenceView};
use crate::error::{Error, Result};
use crate::numeration::DigitWord;
use crate::sigtree::LabeledSignature;

/// A morphism given by the images of its letters.
pub type Morphism = BTreeMap<Letter, Vec<Letter>>;

/// Morphisms `f_0, …, f_{r−1}` applied cyclically, with a seed on which `f_0`
/// is prolongable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingSystem {
    morphisms: Vec<Morphism>,
    seed: Letter,
    alphabet: Vec<Letter>,
}

/// Output of [`AlternatingSystem::expand`]: the word and, for each expanded
/// index `m`, the position where `f_{m mod r}(x_m)` starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub word: Vec<Letter>,
    pub offsets: Vec<usize>,
}

impl AlternatingSystem {
    pub fn new(morphisms: Vec<Morphism>, seed: Letter) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMorphism(msg));
        if morphisms.is_empty() {
            return bad("no morphisms".into());
        }
        let alphabet: BTreeSet<Letter> = morphisms[0].keys().copied().collect();
        for (i, f) in morphisms.iter().enumerate() {
            if f.keys().copied().collect::<BTreeSet<_>>() != alphabet {
                return bad(format!("morphism {i} is not defined on the common alphabet"));
            }
            if let Some(x) = f.values().flatten().find(|x| !alphabet.contains(x)) {
                return bad(format!("morphism {i} produces letter {x} outside the alphabet"));
            }
        }
        match morphisms[0].get(&seed) {
            Some(img) if img.len() >= 2 && img[0] == seed => {}
            _ => return bad(format!("f_0 is not prolongable on {seed}")),
        }
        Ok(Self {
            morphisms,
            seed,
            alphabet: alphabet.into_iter().collect(),
        })
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn period(&self) -> usize {
        self.morphisms.len()
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn image(&self, m: usize, a: Letter) -> &[Letter] {
        &self.morphisms[m % self.morphisms.len()][&a]
    }

    /// Common image length of each morphism.
    pub fn uniform_lengths(&self) -> Result<Vec<usize>> {
        self.morphisms
            .iter()
            .enumerate()
            .map(|(index, f)| {
                let mut lens = f.values().map(Vec::len);
                let first = lens.next().unwrap_or(0);
                if lens.all(|l| l == first) {
                    Ok(first)
                } else {
                    Err(Error::NonUniform { index })
                }
            })
            .collect()
    }

    /// Expands the fixed point `f_0(x_0) f_1(x_1) ⋯` until it has at least
    /// `count` letters.
    pub fn expand(&self, count: usize) -> Result<Expansion> {
        let mut word = vec![self.seed];
        let mut offsets = Vec::new();
        let mut pos = 0;
        let mut m = 0;
        while word.len() < count {
            if m >= word.len() {
                return Err(Error::Stalled(m));
            }
            let img = self.image(m, word[m]);
            offsets.push(pos);
            for (i, &x) in img.iter().enumerate() {
                match word.get(pos + i) {
                    Some(&y) if y != x => return Err(Error::Inconsistent { position: pos + i }),
                    Some(_) => {}
                    None => word.push(x),
                }
            }
            pos += img.len();
            m += 1;
        }
        Ok(Expansion { word, offsets })
    }

    /// The first `count` letters of the alternating fixed point.
    pub fn alternating_prefix(&self, count: usize) -> Result<Vec<Letter>> {
        let mut w = self.expand(count)?.word;
        w.truncate(count);
        Ok(w)
    }

    /// The `r`-block substitution `a_0⋯a_{r−1} ↦ f_0(a_0)⋯f_{r−1}(a_{r−1})`.
    pub fn to_block_substitution(&self) -> BlockSubstitution {
        let r = self.period();
        let mut images = BTreeMap::new();
        for block in blocks(&self.alphabet, r) {
            let img = block
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| self.image(i, a).iter().copied())
                .collect();
            images.insert(block, img);
        }
        BlockSubstitution::new(r, images).expect("images cover every block")
    }

    /// Parses lines `i: a -> word` and an optional `start: a` line; without
    /// it the seed is the first letter on which `f_0` is prolongable.
    pub fn parse(text: &str) -> Result<Self> {
        let mut morphisms: Vec<Morphism> = Vec::new();
        let mut seed = None;
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let err = |reason: &str| Error::Parse {
                what: "morphism rule",
                input: line.to_string(),
                reason: reason.to_string(),
            };
            let (head, rule) = line.split_once(':').ok_or_else(|| err("expected `i: a -> word`"))?;
            if head.trim() == "start" {
                seed = Some(rule.parse::<Letter>()?);
                continue;
            }
            let i: usize = head.trim().parse().map_err(|_| err("bad morphism index"))?;
            let (a, img) = rule.split_once("->").ok_or_else(|| err("missing ->"))?;
            let a: Letter = a.parse()?;
            let img = parse_image(img)?;
            if morphisms.len() <= i {
                morphisms.resize(i + 1, Morphism::new());
            }
            morphisms[i].insert(a, img);
        }
        let seed = match seed {
            Some(s) => s,
            None => morphisms
                .first()
                .and_then(|f| f.iter().find(|(a, img)| img.len() >= 2 && img[0] == **a))
                .map(|(a, _)| *a)
                .ok_or_else(|| Error::InvalidMorphism("no prolongable letter for f_0".into()))?,
        };
        Self::new(morphisms, seed)
    }
}

impl fmt::Display for AlternatingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.morphisms.iter().enumerate() {
            for (a, img) in m {
                writeln!(f, "{i}: {a} -> {}", format_image(img))?;
            }
        }
        writeln!(f, "start: {}", self.seed)
    }
}

fn parse_image(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s == "e" {
        Ok(Vec::new())
    } else {
        parse_letters(s)
    }
}

fn format_image(img: &[Letter]) -> String {
    if img.is_empty() {
        "e".into()
    } else {
        format_letters(img)
    }
}

/// All words of length `r` over `alphabet`, in lexicographic order.
fn blocks(alphabet: &[Letter], r: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// A map `g` on length-`r` blocks, extended to words by applying it to
/// consecutive blocks and ignoring an incomplete suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSubstitution {
    block_len: usize,
    alphabet: Vec<Letter>,
    images: BTreeMap<Vec<Letter>, Vec<Letter>>,
}

impl BlockSubstitution {
    pub fn new(block_len: usize, images: BTreeMap<Vec<Letter>, Vec<Letter>>) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidMorphism("block length 0".into()));
        }
        if let Some(b) = images.keys().find(|b| b.len() != block_len) {
            return Err(Error::InvalidMorphism(format!(
                "block {} does not have length {block_len}",
                format_letters(b)
            )));
        }
        let alphabet: BTreeSet<Letter> = images.keys().flatten().copied().collect();
        let alphabet: Vec<Letter> = alphabet.into_iter().collect();
        for b in blocks(&alphabet, block_len) {
            if !images.contains_key(&b) {
                return Err(Error::InvalidMorphism(format!(
                    "no image for block {}",
                    format_letters(&b)
                )));
            }
        }
        Ok(Self {
            block_len,
            alphabet,
            images,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn images(&self) -> &BTreeMap<Vec<Letter>, Vec<Letter>> {
        &self.images
    }

    pub fn image(&self, block: &[Letter]) -> Option<&[Letter]> {
        self.images.get(block).map(Vec::as_slice)
    }

    /// `g(w)`, dropping a trailing incomplete block.
    pub fn apply(&self, w: &[Letter]) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for block in w.chunks_exact(self.block_len) {
            let img = self
                .image(block)
                .ok_or_else(|| Error::InvalidMorphism(format!("no image for block {}", format_letters(block))))?;
            out.extend_from_slice(img);
        }
        Ok(out)
    }

    /// The first `count` letters of the fixed point `w = g(w)` starting with
    /// `seed`.
    ///
    /// The fixed point is generated block by block. When a block reaches past
    /// the letters known so far, its missing letters are the ones its own
    /// image must reproduce; the unique self-consistent completion is used.
    pub fn fixed_prefix(&self, seed: &[Letter], count: usize) -> Result<Vec<Letter>> {
        let r = self.block_len;
        if seed.len() < r {
            return Err(Error::InvalidMorphism(format!(
                "seed shorter than the block length {r}"
            )));
        }
        match self.image(&seed[..r]) {
            Some(img) if img.starts_with(&seed[..r]) => {}
            _ => {
                return Err(Error::InvalidMorphism(
                    "image of the first seed block does not start with it".into(),
                ))
            }
        }
        let mut w = seed.to_vec();
        let mut off = 0;
        let mut k = 0;
        while w.len() < count || off < w.len().min(count) {
            let start = k * r;
            if start >= w.len() {
                return Err(Error::Stalled(start));
            }
            let known = w.len().min(start + r) - start;
            let block = if known == r {
                w[start..start + r].to_vec()
            } else {
                self.complete_block(&w, start, off)?
            };
            let img = self.image(&block).expect("blocks over the alphabet");
            for (i, &x) in img.iter().enumerate() {
                match w.get(off + i) {
                    Some(&y) if y != x => return Err(Error::Inconsistent { position: off + i }),
                    Some(_) => {}
                    None => w.push(x),
                }
            }
            off += img.len();
            k += 1;
        }
        w.truncate(count);
        Ok(w)
    }

    /// Completes the block at `start` whose tail lies beyond `w`, given that
    /// its image is written at `off`.
    fn complete_block(&self, w: &[Letter], start: usize, off: usize) -> Result<Vec<Letter>> {
        let r = self.block_len;
        let missing = start + r - w.len();
        let mut found: Option<Vec<Letter>> = None;
        for tail in blocks(&self.alphabet, missing) {
            let mut block = w[start..].to_vec();
            block.extend_from_slice(&tail);
            let img = self.image(&block).expect("blocks over the alphabet");
            let consistent = (0..start + r).all(|pos| {
                let letter = if pos < w.len() { w[pos] } else { block[pos - start] };
                match pos.checked_sub(off) {
                    Some(i) if i < img.len() => img[i] == letter,
                    _ => pos < w.len(),
                }
            });
            if consistent {
                if found.is_some() {
                    return Err(Error::Ambiguous { position: w.len() });
                }
                found = Some(block);
            }
        }
        found.ok_or(Error::Inconsistent { position: w.len() })
    }

    /// Parses lines `block -> word`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut images = BTreeMap::new();
        let mut len = None;
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (block, img) = line.split_once("->").ok_or_else(|| Error::Parse {
                what: "block rule",
                input: line.to_string(),
                reason: "missing ->".into(),
            })?;
            let block = parse_letters(block)?;
            len.get_or_insert(block.len());
            images.insert(block, parse_image(img)?);
        }
        let len = len.ok_or_else(|| Error::InvalidMorphism("no rules".into()))?;
        Self::new(len, images)
    }
}

impl fmt::Display for BlockSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (block, img) in &self.images {
            writeln!(f, "{} -> {}", format_letters(block), format_image(img))?;
        }
        Ok(())
    }
}

/// The state sequence of `d` along `L(sig)` as an alternating system over the
/// states, together with the coding given by the outputs.
///
/// `f_i(s) = δ(s, w_{i,0}) ⋯ δ(s, w_{i,|w_i|−1})`. If the initial state does
/// not loop on `0`, a copy of it that does is added first.
pub fn dfao_to_alternating(d: &Dfao, sig: &LabeledSignature) -> Result<(AlternatingSystem, BTreeMap<Letter, Letter>)> {
    if let Some(a) = sig.letters().into_iter().find(|&a| !d.has_digit(a)) {
        return Err(Error::DigitOutsideAlphabet(a));
    }
    let d = d.absorb_leading_zeros();
    let morphisms = sig
        .words()
        .iter()
        .map(|w| {
            (0..d.num_states())
                .map(|s| {
                    let img = w
                        .digits()
                        .iter()
                        .map(|&a| Letter(d.try_step(s, a).expect("checked") as u32))
                        .collect();
                    (Letter(s as u32), img)
                })
                .collect()
        })
        .collect();
    let coding = (0..d.num_states()).map(|s| (Letter(s as u32), d.output(s))).collect();
    Ok((AlternatingSystem::new(morphisms, Letter(d.initial() as u32))?, coding))
}

/// Automaton over a signature of consecutive integers whose state sequence
/// is the fixed point of a system of uniform morphisms.
pub fn alternating_to_dfao(sys: &AlternatingSystem) -> Result<(LabeledSignature, Dfao)> {
    let lengths = sys.uniform_lengths()?;
    if let Some(index) = lengths.iter().position(|&l| l == 0) {
        return Err(Error::NonUniform { index });
    }
    let mut words = Vec::new();
    let mut digit_block = Vec::new();
    let mut next = 0u32;
    for (j, &l) in lengths.iter().enumerate() {
        words.push(DigitWord::new((next..next + l as u32).collect()));
        digit_block.extend((0..l).map(|t| (j, t)));
        next += l as u32;
    }
    let sig = LabeledSignature::new(words)?;
    let letters = sys.alphabet();
    let index_of = |x: Letter| letters.binary_search(&x).expect("letter in alphabet");
    let rows = letters
        .iter()
        .map(|&b| digit_block.iter().map(|&(j, t)| index_of(sys.image(j, b)[t])).collect())
        .collect();
    let d = Dfao::new(
        letters.iter().map(Letter::to_string).collect(),
        index_of(sys.seed()),
        (0..next).collect(),
        rows,
        letters.to_vec(),
    )?;
    Ok((sig, d))
}

/// Checks that `d` over `sig`, the coded alternating fixed point and the
/// automaton rebuilt from it agree on the first `count` terms.
pub fn cobham_roundtrip_check(d: &Dfao, sig: &LabeledSignature, count: usize) -> Result<bool> {
    let view = SequenceView::msd(d.clone(), NumerationSystem::Signature(sig.clone()))?;
    let expected = view.sequence_prefix(count);
    let (sys, coding) = dfao_to_alternating(d, sig)?;
    let code = |w: Vec<Letter>| w.into_iter().map(|x| coding[&x]).collect::<Vec<_>>();
    if code(sys.alternating_prefix(count)?) != expected {
        return Ok(false);
    }
    let (sig2, d2) = alternating_to_dfao(&sys)?;
    let view2 = SequenceView::msd(d2, NumerationSystem::Signature(sig2))?;
    Ok(code(view2.sequence_prefix(count)) == expected)
}

/// Lepistö's `p`-block substitution over `{0, 1}`: `a·u ↦ g_0(a)·ū` with
/// `g_0: 0 ↦ 01, 1 ↦ 00`.
pub fn lepisto_substitution(p: usize) -> Result<BlockSubstitution> {
    if p < 2 {
        return Err(Error::InvalidMorphism(format!("block length {p} < 2")));
    }
    let letters = [Letter(0), Letter(1)];
    let images = blocks(&letters, p)
        .into_iter()
        .map(|b| {
            let mut img = vec![Letter(0), Letter(1 - b[0].0)];
            img.extend(b[1..].iter().map(|x| Letter(1 - x.0)));
            (b, img)
        })
        .collect();
    BlockSubstitution::new(p, images)
}

/// Number of distinct length-`n` factors of the finite word `w`; a lower
/// bound for the complexity of any infinite word with prefix `w`.
pub fn factor_complexity<T: Eq + std::hash::Hash>(w: &[T], n: usize) -> usize {
    if n > w.len() {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    w.windows(n).collect::<HashSet<_>>().len()
}

/// Lengths of the maximal runs of equal letters.
pub fn run_length_encoding<T: PartialEq>(w: &[T]) -> Vec<usize> {
    let mut runs: Vec<usize> = Vec::new();
    for (i, x) in w.iter().enumerate() {
        if i > 0 && w[i - 1] == *x {
            *runs.last_mut().unwrap() += 1;
        } else {
            runs.push(1);
        }
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, morphism};
    use crate::numeration::RationalBase;
    use rand::{Rng, SeedableRng};

    fn letters(s: &str) -> Vec<Letter> {
        parse_letters(s).unwrap()
    }

    fn show(w: &[Letter]) -> String {
        format_letters(w)
    }

    fn block_map(g: &BlockSubstitution) -> Vec<String> {
        g.images()
            .iter()
            .map(|(b, i)| format!("{}->{}", show(b), show(i)))
            .collect()
    }

    #[test]
    fn alternating_fixed_points() {
        let k = fixtures::kolakoski_system().alternating_prefix(13).unwrap();
        assert_eq!(show(&k), "2211212212211");
        let t = fixtures::toy_system().alternating_prefix(17).unwrap();
        assert_eq!(show(&t), "00111011111011011");
        let single = AlternatingSystem::new(vec![morphism(&[(4, &[4, 4])])], Letter(4)).unwrap();
        assert_eq!(single.alternating_prefix(9).unwrap(), vec![Letter(4); 9]);
    }

    #[test]
    fn validation() {
        assert!(AlternatingSystem::new(vec![], Letter(0)).is_err());
        assert!(AlternatingSystem::new(vec![morphism(&[(0, &[1, 0]), (1, &[1])])], Letter(0)).is_err());
        assert!(AlternatingSystem::new(vec![morphism(&[(0, &[0])])], Letter(0)).is_err());
        assert!(AlternatingSystem::new(vec![morphism(&[(0, &[0, 2])])], Letter(0)).is_err());
        assert!(AlternatingSystem::new(
            vec![morphism(&[(0, &[0, 0]), (1, &[1])]), morphism(&[(0, &[1])])],
            Letter(0)
        )
        .is_err());
    }

    #[test]
    fn stalling_is_reported() {
        let sys = AlternatingSystem::new(
            vec![morphism(&[(0, &[0, 1]), (1, &[])]), morphism(&[(0, &[]), (1, &[])])],
            Letter(0),
        )
        .unwrap();
        assert_eq!(sys.alternating_prefix(10), Err(Error::Stalled(2)));
    }

    #[test]
    fn expansion_offsets() {
        let sys = fixtures::kolakoski_system();
        let exp = sys.expand(5000).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(0..1000);
            let img = sys.image(m, exp.word[m]);
            let off = exp.offsets[m];
            assert_eq!(&exp.word[off..off + img.len()], img);
        }
    }

    #[test]
    fn block_substitutions_from_systems() {
        let g = fixtures::kolakoski_system().to_block_substitution();
        assert_eq!(block_map(&g), ["11->21", "12->211", "21->221", "22->2211"]);
        let g = fixtures::toy_system().to_block_substitution();
        assert_eq!(block_map(&g), ["00->001", "01->000", "10->111", "11->110"]);
        let single = AlternatingSystem::new(vec![morphism(&[(0, &[0, 1]), (1, &[1, 0])])], Letter(0)).unwrap();
        let g = single.to_block_substitution();
        assert_eq!(block_map(&g), ["0->01", "1->10"]);
    }

    #[test]
    fn block_fixed_points() {
        let lep = lepisto_substitution(2).unwrap();
        assert_eq!(block_map(&lep), ["00->011", "01->010", "10->001", "11->000"]);
        assert_eq!(show(&lep.fixed_prefix(&letters("01"), 11).unwrap()), "01001100001");
        let l3 = lepisto_substitution(3).unwrap();
        assert_eq!(show(l3.image(&letters("000")).unwrap()), "0111");

        let kol = fixtures::kolakoski_system().to_block_substitution();
        let via_blocks = kol.fixed_prefix(&letters("22"), 2000).unwrap();
        assert_eq!(
            via_blocks,
            fixtures::kolakoski_system().alternating_prefix(2000).unwrap()
        );

        let identity = BlockSubstitution::new(
            2,
            blocks(&[Letter(0), Letter(1)], 2)
                .into_iter()
                .map(|b| (b.clone(), b))
                .collect(),
        )
        .unwrap();
        assert_eq!(show(&identity.fixed_prefix(&letters("0110"), 4).unwrap()), "0110");
        assert_eq!(identity.fixed_prefix(&letters("01"), 5), Err(Error::Stalled(2)));

        assert!(lep.fixed_prefix(&letters("1"), 5).is_err());
        assert!(lep.fixed_prefix(&letters("11"), 5).is_err());
    }

    #[test]
    fn ambiguous_completion() {
        // The image of 0c starts with c, so either letter reproduces itself.
        let images = [
            (letters("00"), letters("000")),
            (letters("01"), letters("100")),
            (letters("10"), letters("10")),
            (letters("11"), letters("11")),
        ]
        .into();
        let g = BlockSubstitution::new(2, images).unwrap();
        assert_eq!(g.fixed_prefix(&letters("00"), 6), Err(Error::Ambiguous { position: 3 }));
        assert_eq!(show(&g.fixed_prefix(&letters("00"), 3).unwrap()), "000");

        let images = [
            (letters("00"), letters("001")),
            (letters("01"), letters("000")),
            (letters("10"), letters("11")),
            (letters("11"), letters("00")),
        ]
        .into();
        let g = BlockSubstitution::new(2, images).unwrap();
        assert_eq!(
            g.fixed_prefix(&letters("00"), 6),
            Err(Error::Inconsistent { position: 3 })
        );
    }

    #[test]
    fn block_application() {
        let lep = lepisto_substitution(2).unwrap();
        assert_eq!(show(&lep.apply(&letters("01001")).unwrap()), "010011");
    }

    #[test]
    fn text_formats() {
        let sys = fixtures::toy_system();
        let text = sys.to_string();
        assert!(text.contains("0: 0 -> 00"));
        assert_eq!(AlternatingSystem::parse(&text).unwrap(), sys);
        let no_start = "0: 0 -> 00\n0: 1 -> 11\n1: 0 -> 1\n1: 1 -> 0\n";
        assert_eq!(AlternatingSystem::parse(no_start).unwrap(), sys);
        let g = fixtures::kolakoski_system().to_block_substitution();
        assert_eq!(BlockSubstitution::parse(&g.to_string()).unwrap(), g);
        assert!(AlternatingSystem::parse("0 0 -> 00").is_err());
    }

    #[test]
    fn automaton_to_system() {
        let sig: LabeledSignature = "02,1".parse().unwrap();
        let (sys, coding) = dfao_to_alternating(&fixtures::toy_dfao(), &sig).unwrap();
        assert_eq!(sys.uniform_lengths().unwrap(), vec![2, 1]);
        let t: Vec<Letter> = sys
            .alternating_prefix(17)
            .unwrap()
            .into_iter()
            .map(|x| coding[&x])
            .collect();
        assert_eq!(show(&t), "00111011111011011");

        let sig: LabeledSignature = "023,14,5".parse().unwrap();
        let (sys, _) = dfao_to_alternating(&fixtures::sum_of_digits_mod2_s_dfao(), &sig).unwrap();
        assert_eq!(sys.uniform_lengths().unwrap(), vec![3, 2, 1]);

        let one = Dfao::from_fn(1, 0, vec![0, 1, 2], |_, _| 0, vec![Letter(5)]).unwrap();
        let (sys, _) = dfao_to_alternating(&one, &"02,1".parse().unwrap()).unwrap();
        assert_eq!(sys.morphisms()[0][&Letter(0)], vec![Letter(0); 2]);
        assert_eq!(sys.morphisms()[1][&Letter(0)], vec![Letter(0)]);
    }

    #[test]
    fn system_to_automaton() {
        let (sig, d) = alternating_to_dfao(&fixtures::toy_system()).unwrap();
        assert_eq!(sig.to_string(), "01,2");
        assert_eq!(d.num_states(), 2);
        let view = SequenceView::msd(d, NumerationSystem::Signature(sig)).unwrap();
        assert_eq!(show(&view.sequence_prefix(17)), "00111011111011011");

        assert_eq!(
            alternating_to_dfao(&fixtures::kolakoski_system()),
            Err(Error::NonUniform { index: 0 })
        );
        let uniform = AlternatingSystem::new(
            vec![
                morphism(&[(1, &[2, 1]), (2, &[2, 2])]),
                morphism(&[(1, &[1, 2]), (2, &[1, 1])]),
            ],
            Letter(2),
        )
        .unwrap();
        let (sig, _) = alternating_to_dfao(&uniform).unwrap();
        assert_eq!(sig.to_string(), "01,23");

        let single = AlternatingSystem::new(vec![morphism(&[(0, &[0, 1, 0]), (1, &[1, 1, 0])])], Letter(0)).unwrap();
        let (sig, d) = alternating_to_dfao(&single).unwrap();
        assert_eq!(sig.to_string(), "012");
        let view = SequenceView::msd(d, NumerationSystem::Signature(sig)).unwrap();
        assert_eq!(view.sequence_prefix(300), single.alternating_prefix(300).unwrap());
    }

    #[test]
    fn roundtrips() {
        let sig: LabeledSignature = "02,1".parse().unwrap();
        assert!(cobham_roundtrip_check(&fixtures::toy_dfao(), &sig, 10_000).unwrap());
        assert!(cobham_roundtrip_check(&fixtures::ce_dfao(), &sig, 10_000).unwrap());
        let constant = Dfao::from_fn(1, 0, vec![0, 1, 2, 3, 4, 5], |_, _| 0, vec![Letter(1)]).unwrap();
        assert!(cobham_roundtrip_check(&constant, &"023,14,5".parse().unwrap(), 100).unwrap());
        assert!(cobham_roundtrip_check(&fixtures::counterex_dfao(), &sig, 5000).unwrap());
    }

    #[test]
    fn roundtrip_needs_leading_zero_absorption() {
        // q0 does not loop on 0 here.
        let d = Dfao::from_fn(
            2,
            0,
            vec![0, 1, 2],
            |s, a| if a == 0 { 1 - s } else { s },
            vec![Letter(0), Letter(1)],
        )
        .unwrap();
        let sig = LabeledSignature::derive_rational(RationalBase::new(3, 2).unwrap());
        assert!(cobham_roundtrip_check(&d, &sig, 3000).unwrap());
    }

    #[test]
    fn complexities() {
        assert_eq!(factor_complexity(&[0u8; 10], 3), 1);
        assert_eq!(factor_complexity(&[0u8, 1, 0, 1], 2), 2);
        assert_eq!(factor_complexity(&[0u8, 1], 3), 0);
        assert_eq!(factor_complexity(&[0u8, 1], 0), 1);
        assert_eq!(run_length_encoding(&letters("2211212")), vec![2, 2, 1, 1, 1]);
    }

    #[test]
    fn kolakoski_encodes_itself() {
        let k = fixtures::kolakoski_system().alternating_prefix(10_000).unwrap();
        let mut runs = run_length_encoding(&k);
        runs.pop();
        for (i, r) in runs.iter().enumerate() {
            assert_eq!(*r as u32, k[i].0);
        }
    }
}
