//! Grammars behind the `demo` and `check-semiring` commands.

use std::sync::Arc;

use cfcoalg::{Alphabet, CFGrammar, GrammarSystem, Monomial, Polynomial, Semiring, State, Symbol};

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("distinct letters")
}

/// `o(x) = 1`, `x_a = x x` over `{a}`.
pub fn catalan<K: Semiring>() -> State<K> {
    let sys = GrammarSystem::new(
        Alphabet::new(["a"]).expect("one letter"),
        vec!["x".into()],
        vec![K::one()],
        vec![vec![Polynomial::word(Monomial(vec![0, 0]))]],
    )
    .expect("well-formed");
    State::grammar(Arc::new(sys), Polynomial::var(0)).expect("valid start")
}

/// `o(x) = 1`, `x_a = x y`, `y_b = 1`: `{aⁿbⁿ}` from `x`.
pub fn anbn<K: Semiring>() -> GrammarSystem<K> {
    GrammarSystem::new(
        ab(),
        vec!["x".into(), "y".into()],
        vec![K::one(), K::zero()],
        vec![
            vec![Polynomial::word(Monomial(vec![0, 1])), Polynomial::zero()],
            vec![Polynomial::zero(), Polynomial::one()],
        ],
    )
    .expect("well-formed")
}

pub fn anbn_state<K: Semiring>() -> State<K> {
    State::grammar(Arc::new(anbn()), Polynomial::var(0)).expect("valid start")
}

/// `x → ε | a x z | b y z`, `y → ε | b y z`, `z → a`: `{aⁿ bᵐ aᵐ⁺ⁿ}` from `x`
/// and `{bⁿ aⁿ}` from `y`.
pub fn running<K: Semiring>() -> GrammarSystem<K> {
    use Symbol::{Letter as L, Nonterminal as N};
    let g = CFGrammar::new(
        ab(),
        vec!["x".into(), "y".into(), "z".into()],
        vec![
            [vec![], vec![L(0), N(0), N(2)], vec![L(1), N(1), N(2)]].into(),
            [vec![], vec![L(1), N(1), N(2)]].into(),
            [vec![L(0)]].into(),
        ],
    )
    .expect("well-formed");
    g.to_coalgebra().expect("GNF")
}

pub fn running_state<K: Semiring>() -> State<K> {
    State::grammar(Arc::new(running()), Polynomial::var(0)).expect("valid start")
}
