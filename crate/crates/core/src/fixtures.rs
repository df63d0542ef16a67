//! Ready-made automata and morphism systems used by the examples and tests.

use crate::dfao::{Dfao, Letter};
use crate::morphic::{AlternatingSystem, Morphism};

pub const TOY_JSON: &str = include_str!("../fixtures/toy.json");
pub const CE_JSON: &str = include_str!("../fixtures/ce.json");
pub const SUM_OF_DIGITS_MOD2_S_JSON: &str = include_str!("../fixtures/sum_of_digits_mod2_s.json");
pub const EX_NOT_ID_JSON: &str = include_str!("../fixtures/ex_not_id.json");
pub const COUNTEREX_JSON: &str = include_str!("../fixtures/counterex.json");
pub const DETERMINIZE_JSON: &str = include_str!("../fixtures/determinize.json");

fn load(json: &str) -> Dfao {
    Dfao::from_json(json).expect("bundled fixture is valid")
}

/// Sum of base-3/2 digits mod 2; generates `t = 00111011111011011⋯`.
pub fn toy_dfao() -> Dfao {
    load(TOY_JSON)
}

/// Generates Lepistö's word `F_2 = 01001100001⋯` in base 3/2.
pub fn ce_dfao() -> Dfao {
    load(CE_JSON)
}

/// Sum of digits mod 2 over the alphabet `{0, …, 5}`, used with the
/// signature `(023, 14, 5)`.
pub fn sum_of_digits_mod2_s_dfao() -> Dfao {
    load(SUM_OF_DIGITS_MOD2_S_JSON)
}

/// Three-state cycle with outputs `0, 0, 1`: non-injective output that still
/// separates its states in one step.
pub fn ex_not_id_dfao() -> Dfao {
    load(EX_NOT_ID_JSON)
}

/// Four-state automaton for which the unique-extension condition fails.
pub fn counterex_dfao() -> Dfao {
    load(COUNTEREX_JSON)
}

/// Five-state automaton obtained by determinizing the factor NFA of `t`.
pub fn determinize_dfao() -> Dfao {
    load(DETERMINIZE_JSON)
}

/// Base-2 Thue–Morse automaton.
pub fn thue_morse_dfao() -> Dfao {
    Dfao::from_fn(2, 0, vec![0, 1], |s, a| s ^ a as usize, vec![Letter(0), Letter(1)]).expect("valid")
}

/// Every bundled automaton with its name.
pub fn all_dfaos() -> Vec<(&'static str, Dfao)> {
    vec![
        ("toy", toy_dfao()),
        ("ce", ce_dfao()),
        ("sum_of_digits_mod2_s", sum_of_digits_mod2_s_dfao()),
        ("ex_not_id", ex_not_id_dfao()),
        ("counterex", counterex_dfao()),
        ("determinize", determinize_dfao()),
    ]
}

/// Builds a morphism from `(letter, image)` pairs.
pub fn morphism(rules: &[(u32, &[u32])]) -> Morphism {
    rules
        .iter()
        .map(|&(a, img)| (Letter(a), img.iter().copied().map(Letter).collect()))
        .collect()
}

/// `f_0: 0 ↦ 00, 1 ↦ 11` and `f_1: 0 ↦ 1, 1 ↦ 0`, seed 0; the alternating
/// fixed point is `t`.
pub fn toy_system() -> AlternatingSystem {
    AlternatingSystem::new(
        vec![
            morphism(&[(0, &[0, 0]), (1, &[1, 1])]),
            morphism(&[(0, &[1]), (1, &[0])]),
        ],
        Letter(0),
    )
    .expect("valid")
}

/// `h_0: 1 ↦ 2, 2 ↦ 22` and `h_1: 1 ↦ 1, 2 ↦ 11`, seed 2; the alternating
/// fixed point is the Kolakoski word `2211212212211⋯`.
pub fn kolakoski_system() -> AlternatingSystem {
    AlternatingSystem::new(
        vec![
            morphism(&[(1, &[2]), (2, &[2, 2])]),
            morphism(&[(1, &[1]), (2, &[1, 1])]),
        ],
        Letter(2),
    )
    .expect("valid")
}
