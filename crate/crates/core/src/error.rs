use thiserror::Error;

use crate::dfao::Letter;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rational base {p}/{q}: {reason}")]
    InvalidBase { p: u64, q: u64, reason: &'static str },

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("child position {position} out of range for node {node} of degree {degree}")]
    ChildOutOfRange { node: u64, position: usize, degree: usize },

    #[error("the root has no proper parent")]
    RootHasNoParent,

    #[error("word not in language: letter {letter} at position {position} is not a child label")]
    NotInLanguage { position: usize, letter: u32 },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("digit {0} is outside the automaton alphabet")]
    DigitOutsideAlphabet(u32),

    #[error("coding is undefined on output letter {0}")]
    CodingNotTotal(Letter),

    #[error("modulus {modulus} is not coprime with q = {q}")]
    ModulusNotCoprime { modulus: u64, q: u32 },

    #[error("construction exceeds {limit} reachable states")]
    TooManyStates { limit: usize },

    #[error("invalid morphism system: {0}")]
    InvalidMorphism(String),

    #[error("expansion stalls at index {0}: no letter available to expand")]
    Stalled(usize),

    #[error("morphism {index} is not uniform")]
    NonUniform { index: usize },

    #[error("fixed point is inconsistent at position {position}")]
    Inconsistent { position: usize },

    #[error("fixed point is not determined at position {position}")]
    Ambiguous { position: usize },

    #[error("factor {factor} has {count} extensions with first letter {letter}")]
    MultiValuedExtension { factor: usize, letter: u32, count: usize },

    #[error("invalid factor data: {0}")]
    InvalidFactorData(String),

    #[error("decoration conflict in subset {{{subset}}}")]
    DecorationConflict { subset: String },

    #[error("decorations cover {available} nodes but node {needed} is required")]
    DecorationsExhausted { needed: u64, available: u64 },
}
