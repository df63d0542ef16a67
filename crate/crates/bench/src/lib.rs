//! Shared inputs for the benchmarks.

use ratseq_core::factors::DecoratedTree;
use ratseq_core::fixtures;
use ratseq_core::{NumerationSystem, RationalBase, SequenceView};

pub fn base32() -> RationalBase {
    RationalBase::new(3, 2).expect("valid base")
}

/// `t` in base 3/2 as an msd-first view.
pub fn toy_view() -> SequenceView {
    SequenceView::msd(fixtures::toy_dfao(), NumerationSystem::Rational(base32())).expect("valid view")
}

/// The tree of base 3/2 decorated by `t` on its first `nodes` nodes.
pub fn toy_tree(nodes: usize) -> DecoratedTree {
    DecoratedTree::from_view(&toy_view(), nodes)
}
