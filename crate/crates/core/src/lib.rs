//! Automatic sequences over rational-base numeration systems.
//!
//! The crate covers the whole pipeline around a sequence `x_n = τ(δ(q₀, rep(n)))`
//! where `rep` is either the base-`p/q` representation or, more generally, the
//! radix enumeration of the i-tree generated by a purely periodic labeled
//! signature:
//!
//! * [`numeration`]: exact `rep`/`val` arithmetic in base `p/q`.
//! * [`sigtree`]: the virtual i-tree of a periodic signature and its numeration.
//! * [`dfao`]: automata with output, sequence evaluation and closure constructions.
//! * [`morphic`]: alternating morphisms, block substitutions and the bridge
//!   between them and automata.
//! * [`factors`]: decorated factors, censuses and the NFA/determinization route
//!   back to an automaton.
//! * [`digitconv`]: carry normalization, `a·n + b` on representations and affine
//!   subsequences.

pub mod dfao;
pub mod digitconv;
mod error;
pub mod factors;
pub mod fixtures;
pub mod morphic;
pub mod numeration;
pub mod sigtree;

pub use dfao::{Dfa, Dfao, Direction, Letter, NumerationSystem, SequenceView, StateId};
pub use error::{Error, Result};
pub use numeration::{DigitWord, ExactRational, RationalBase};
pub use sigtree::{LabeledSignature, NodeIndex};
