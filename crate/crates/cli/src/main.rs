use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ratseq_core::dfao::format_letters;
use ratseq_core::digitconv::{affine, normalize};
use ratseq_core::factors::{
    build_factor_nfa, census, census_series, congruence_domain_check, determinize, infinite_factor_estimate,
    level_decorations, nfa_input_from_census, rationality_probe, weird_condition_check, witness_words, DecoratedTree,
};
use ratseq_core::fixtures;
use ratseq_core::morphic::{
    alternating_to_dfao, dfao_to_alternating, lepisto_substitution, AlternatingSystem, BlockSubstitution,
};
use ratseq_core::numeration::{rep, val};
use ratseq_core::{Dfao, DigitWord, Direction, LabeledSignature, Letter, NumerationSystem, RationalBase, SequenceView};

#[derive(Parser)]
#[command(
    name = "ratseq",
    version,
    about = "Automatic sequences in rational bases and periodic-signature trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Representation of an integer.
    Rep {
        #[command(flatten)]
        num: Numeration,
        n: u64,
    },
    /// Value of a word.
    Val {
        #[command(flatten)]
        num: Numeration,
        word: String,
    },
    /// Labeled signatures and their trees.
    #[command(subcommand)]
    Sig(SigCommand),
    /// Prefix of the sequence generated by an automaton.
    Seq {
        #[command(flatten)]
        num: Numeration,
        /// Automaton in JSON.
        #[arg(long)]
        dfao: PathBuf,
        #[arg(long, default_value_t = 32)]
        count: usize,
        /// The automaton reads least significant digits first.
        #[arg(long)]
        lsd: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Morphisms, block substitutions and automata.
    #[command(subcommand)]
    Morph(MorphCommand),
    /// Decorated factors of the tree.
    #[command(subcommand)]
    Factors(FactorsCommand),
    /// Computes a·val(w) + b in base p/q, or normalizes a digit string.
    Convert {
        #[arg(long)]
        base: RationalBase,
        #[arg(long, default_value_t = 1)]
        mul: u64,
        #[arg(long, default_value_t = 0)]
        add: u64,
        /// Comma-separated digits, least significant first, to normalize
        /// instead of a word.
        #[arg(long, conflicts_with = "word")]
        lsd_digits: Option<String>,
        #[arg(required_unless_present = "lsd_digits")]
        word: Option<String>,
    },
}

#[derive(Subcommand)]
enum SigCommand {
    /// Signature of the tree of L_{p/q}.
    Derive {
        #[arg(long)]
        base: RationalBase,
    },
    /// First words of the language in radix order.
    Enumerate {
        #[command(flatten)]
        num: Numeration,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// The first levels of the tree in Graphviz format.
    Dot {
        #[command(flatten)]
        num: Numeration,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
}

#[derive(Subcommand)]
enum MorphCommand {
    /// Prefix of the fixed point of a morphism system or block substitution.
    Fixpoint {
        #[command(flatten)]
        source: MorphSource,
        #[arg(long, default_value_t = 40)]
        count: usize,
        /// Seed of a block substitution; defaults to the first block of the
        /// alternating fixed point.
        #[arg(long)]
        seed: Option<String>,
    },
    /// The block substitution of an alternating system.
    ToBlock {
        #[command(flatten)]
        source: MorphSource,
    },
    /// Converts an automaton into morphisms, or uniform morphisms into an
    /// automaton.
    Bridge {
        #[arg(long, conflicts_with = "system", required_unless_present = "system")]
        dfao: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[command(flatten)]
        num: OptionalNumeration,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MorphSource {
    /// Alternating system, one `i: a -> word` rule per line.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Block substitution, one `block -> word` rule per line.
    #[arg(long)]
    block: Option<PathBuf>,
    /// Bundled system: toy, kolakoski, or lepisto<p>.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum FactorsCommand {
    /// Distinct factors of height h on a window of the tree.
    Census {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        height: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Samples the link between congruence mod q^h and height-h domains.
    CheckLemma {
        #[arg(long)]
        base: RationalBase,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Searches for congruent words that no short common extension separates.
    CheckCondition {
        #[arg(long)]
        dfao: PathBuf,
        #[arg(long)]
        base: RationalBase,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 15)]
        max_len: usize,
    },
    /// Factor NFA built from census data.
    Nfa {
        #[command(flatten)]
        build: NfaArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Determinized and minimized factor NFA.
    Determinize {
        #[command(flatten)]
        build: NfaArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Looks for the first height where the factor count stops growing.
    Probe {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value_t = 5)]
        max_height: usize,
    },
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    num: Numeration,
    /// Automaton decorating the tree.
    #[arg(long, conflicts_with = "constant", required_unless_present = "constant")]
    dfao: Option<PathBuf>,
    /// Constant decoration.
    #[arg(long)]
    constant: Option<u32>,
    /// Number of decorated nodes.
    #[arg(long, default_value_t = 1_000_000)]
    nodes: usize,
}

#[derive(Args)]
struct NfaArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// Height of the factors.
    #[arg(long, default_value_t = 1)]
    height: usize,
    /// Levels read as a finite prefix; also the level from which a factor
    /// counts as occurring infinitely often.
    #[arg(long, default_value_t = 1)]
    t: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Numeration {
    /// Rational base p/q.
    #[arg(long)]
    base: Option<RationalBase>,
    /// Periodic labeled signature such as `023,14,5`.
    #[arg(long)]
    sig: Option<LabeledSignature>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptionalNumeration {
    #[arg(long)]
    base: Option<RationalBase>,
    #[arg(long)]
    sig: Option<LabeledSignature>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

impl Numeration {
    fn system(&self) -> NumerationSystem {
        match (&self.base, &self.sig) {
            (Some(b), _) => NumerationSystem::Rational(*b),
            (None, Some(s)) => NumerationSystem::Signature(s.clone()),
            (None, None) => unreachable!("clap requires one of them"),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_dfao(path: &Path) -> Result<Dfao> {
    Dfao::from_json(&read(path)?).with_context(|| format!("in automaton file {}", path.display()))
}

fn reject(format: Format, allowed: &[Format], what: &str) -> Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        bail!("{what} cannot be written in this format")
    }
}

fn build_tree(args: &TreeArgs) -> Result<(DecoratedTree, Option<SequenceView>)> {
    let system = args.num.system();
    match (&args.dfao, args.constant) {
        (Some(path), _) => {
            let view = SequenceView::msd(load_dfao(path)?, system)?;
            Ok((DecoratedTree::from_view(&view, args.nodes), Some(view)))
        }
        (None, Some(c)) => Ok((DecoratedTree::constant(system.signature(), args.nodes, Letter(c)), None)),
        (None, None) => unreachable!("clap requires one of them"),
    }
}

fn morph_source(src: &MorphSource) -> Result<(Option<AlternatingSystem>, BlockSubstitution)> {
    if let Some(path) = &src.system {
        let sys = AlternatingSystem::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let blocks = sys.to_block_substitution();
        return Ok((Some(sys), blocks));
    }
    if let Some(path) = &src.block {
        let blocks = BlockSubstitution::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        return Ok((None, blocks));
    }
    let name = src.builtin.as_deref().unwrap_or_default();
    let sys = match name {
        "toy" => fixtures::toy_system(),
        "kolakoski" => fixtures::kolakoski_system(),
        _ => {
            let p: usize = name
                .strip_prefix("lepisto")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| anyhow!("unknown builtin `{name}`; expected toy, kolakoski or lepisto<p>"))?;
            return Ok((None, lepisto_substitution(p)?));
        }
    };
    let blocks = sys.to_block_substitution();
    Ok((Some(sys), blocks))
}

fn parse_letter_word(s: &str) -> Result<Vec<Letter>> {
    Ok(ratseq_core::dfao::parse_letters(s)?)
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Rep { num, n } => Ok(match num.system() {
            NumerationSystem::Rational(b) => rep(b, n).to_string(),
            NumerationSystem::Signature(s) => s.rep_ans(n).to_string(),
        }),
        Command::Val { num, word } => {
            let w: DigitWord = word.parse()?;
            Ok(match num.system() {
                NumerationSystem::Rational(b) => {
                    let v = val(b, &w);
                    if v.is_integer() {
                        v.to_integer().to_string()
                    } else {
                        v.to_string()
                    }
                }
                NumerationSystem::Signature(s) => s.val_ans(&w)?.to_string(),
            })
        }
        Command::Sig(cmd) => match cmd {
            SigCommand::Derive { base } => Ok(LabeledSignature::derive_rational(base).to_string()),
            SigCommand::Enumerate { num, count } => Ok(num
                .system()
                .signature()
                .enumerate_words(count)
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n")),
            SigCommand::Dot { num, levels } => Ok(num.system().signature().to_dot(levels).trim_end().to_string()),
        },
        Command::Seq {
            num,
            dfao,
            count,
            lsd,
            format,
        } => {
            reject(format, &[Format::Text, Format::Json], "a sequence")?;
            let direction = if lsd { Direction::LsdFirst } else { Direction::MsdFirst };
            let view = SequenceView::new(load_dfao(&dfao)?, num.system(), direction)?;
            let xs = view.sequence_prefix(count);
            Ok(match format {
                Format::Json => format!(
                    "[{}]",
                    xs.iter().map(|x| format!("\"{x}\"")).collect::<Vec<_>>().join(",")
                ),
                _ => format_letters(&xs),
            })
        }
        Command::Morph(cmd) => morph(cmd),
        Command::Factors(cmd) => factors(cmd),
        Command::Convert {
            base,
            mul,
            add,
            lsd_digits,
            word,
        } => {
            if mul == 0 {
                bail!("--mul must be positive");
            }
            if let Some(digits) = lsd_digits {
                let digits: Vec<u64> = digits
                    .split(',')
                    .map(|d| d.trim().parse().map_err(|_| anyhow!("bad digit `{d}`")))
                    .collect::<Result<_>>()?;
                let w = normalize(base, &digits);
                return Ok(affine(base, &w, mul, add).to_string());
            }
            let w: DigitWord = word.expect("clap requires a word").parse()?;
            let canonical = DigitWord::new(w.strip_leading_zeros().into_digits());
            if !ratseq_core::numeration::is_canonical(base, &canonical) {
                bail!("{w} is not a representation in base {base}");
            }
            Ok(affine(base, &canonical, mul, add).to_string())
        }
    }
}

fn morph(cmd: MorphCommand) -> Result<String> {
    match cmd {
        MorphCommand::Fixpoint { source, count, seed } => {
            let (sys, blocks) = morph_source(&source)?;
            let seed = match (seed, &sys) {
                (Some(s), _) => parse_letter_word(&s)?,
                (None, Some(sys)) => sys.alternating_prefix(blocks.block_len())?,
                (None, None) => bail!("a block substitution needs --seed"),
            };
            Ok(format_letters(&blocks.fixed_prefix(&seed, count)?))
        }
        MorphCommand::ToBlock { source } => Ok(morph_source(&source)?.1.to_string().trim_end().to_string()),
        MorphCommand::Bridge {
            dfao,
            system,
            num,
            format,
        } => {
            if let Some(path) = dfao {
                reject(format, &[Format::Text], "an alternating system")?;
                let sig = match (num.base, num.sig) {
                    (Some(b), _) => LabeledSignature::derive_rational(b),
                    (None, Some(s)) => s,
                    (None, None) => bail!("--base or --sig is required with --dfao"),
                };
                let (sys, coding) = dfao_to_alternating(&load_dfao(&path)?, &sig)?;
                let coding: Vec<String> = coding.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                Ok(format!("{sys}coding: {}", coding.join(", ")))
            } else {
                let path = system.expect("clap requires a source");
                let sys = AlternatingSystem::parse(&read(&path)?).with_context(|| format!("in {}", path.display()))?;
                let (sig, d) = alternating_to_dfao(&sys)?;
                Ok(match format {
                    Format::Dot => d.to_dot().trim_end().to_string(),
                    Format::Json => d.to_json().trim_end().to_string(),
                    Format::Text => format!("signature: {sig}\n{}", d.to_json().trim_end()),
                })
            }
        }
    }
}

fn factors(cmd: FactorsCommand) -> Result<String> {
    match cmd {
        FactorsCommand::Census { tree, height, format } => {
            reject(format, &[Format::Text, Format::Json], "a census")?;
            let (t, _) = build_tree(&tree)?;
            let c = census(&t, height, u64::MAX);
            Ok(match format {
                Format::Json => {
                    let classes: Vec<serde_json::Value> = c
                        .classes
                        .iter()
                        .map(|cl| {
                            serde_json::json!({
                                "factor": cl.factor.to_string(),
                                "first_root": cl.first_root(),
                                "roots": cl.roots.len(),
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "height": height,
                        "count": c.count(),
                        "roots_scanned": c.roots_scanned,
                        "classes": classes,
                    });
                    serde_json::to_string_pretty(&doc)?
                }
                _ => {
                    let mut out = format!(
                        "height {height}: {} factors on {} roots ({} complete levels)\n",
                        c.count(),
                        c.roots_scanned,
                        c.complete_levels
                    );
                    for (i, cl) in c.classes.iter().enumerate() {
                        out.push_str(&format!(
                            "{i}\tfirst root {}\t{} roots\t{}\t{}\n",
                            cl.first_root(),
                            cl.roots.len(),
                            level_decorations(&cl.factor),
                            cl.factor
                        ));
                    }
                    out.trim_end().to_string()
                }
            })
        }
        FactorsCommand::CheckLemma {
            base,
            height,
            samples,
            seed,
        } => {
            let r = congruence_domain_check(base, height, samples, seed);
            let mut out = format!(
                "height {height}: {} pairs, {} congruent, {} domain violations, {} extension violations\n{} domain classes (expected {}), partition: {}",
                r.pairs_checked,
                r.congruent_pairs,
                r.domain_violations.len(),
                r.extension_violations.len(),
                r.classes,
                u64::from(base.q()).pow(height as u32),
                if r.partition { "yes" } else { "no" }
            );
            if !r.is_clean() {
                out.push_str("\nVIOLATED");
            }
            Ok(out)
        }
        FactorsCommand::CheckCondition {
            dfao,
            base,
            height,
            max_len,
        } => {
            let verdict = weird_condition_check(&load_dfao(&dfao)?, base, height, max_len)?;
            let mut out = verdict.to_string();
            if let ratseq_core::factors::WeirdVerdict::Fails { pairs, .. } = &verdict {
                let (u, v) = witness_words(base, pairs[0]);
                out.push_str(&format!("\nu = {u}\nv = {v}"));
            }
            Ok(out)
        }
        FactorsCommand::Nfa { build, format } => {
            let nfa = build_nfa(&build)?;
            Ok(match format {
                Format::Json => nfa.to_json(),
                Format::Dot => nfa.to_dot().trim_end().to_string(),
                Format::Text => {
                    let mut out = format!("{} states, {} transitions\n", nfa.num_states(), nfa.num_transitions());
                    for s in 0..nfa.num_states() {
                        let out_letter = nfa.final_output(s).map_or("".to_string(), |b| format!(" final {b}"));
                        out.push_str(&format!("{}{out_letter}\n", nfa.names()[s]));
                        for &a in nfa.alphabet() {
                            let targets: Vec<&str> =
                                nfa.successors(s, a).iter().map(|&t| nfa.names()[t].as_str()).collect();
                            if !targets.is_empty() {
                                out.push_str(&format!("  {a} -> {}\n", targets.join(" ")));
                            }
                        }
                    }
                    out.trim_end().to_string()
                }
            })
        }
        FactorsCommand::Determinize { build, format } => {
            let d = determinize(&build_nfa(&build)?)?;
            Ok(match format {
                Format::Dot => d.to_dot(),
                _ => d.to_json(),
            }
            .trim_end()
            .to_string())
        }
        FactorsCommand::Probe { tree, max_height } => {
            let (t, _) = build_tree(&tree)?;
            let series = census_series(&t, 0..=max_height, u64::MAX);
            let mut out: Vec<String> = series.iter().map(|(h, c)| format!("{h}\t{c}")).collect();
            out.push(rationality_probe(&series).to_string());
            Ok(out.join("\n"))
        }
    }
}

fn build_nfa(args: &NfaArgs) -> Result<ratseq_core::factors::FactorNfa> {
    let (tree, _) = build_tree(&args.tree)?;
    let sig = tree.signature().clone();
    let lower = census(&tree, args.height, u64::MAX);
    let upper = census(&tree, args.height + 1, u64::MAX);
    let le = infinite_factor_estimate(&lower, &sig, args.t);
    let ue = infinite_factor_estimate(&upper, &sig, args.t);
    let input = nfa_input_from_census(&tree, args.t, (&lower, &le), (&upper, &ue))?;
    Ok(build_factor_nfa(&input)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
