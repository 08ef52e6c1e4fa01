//! Small hand-written systems used across tests.

use std::collections::BTreeSet;

use cfcoalg::{
    Alphabet, CFGrammar, ClosedMuExpr, GrammarSystem, Monomial, MuExpr, Natural, Polynomial, Semiring, Symbol, Term,
    TermSystem,
};

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("distinct letters")
}

/// `x → ε | a x z | b y z`, `y → ε | b y z`, `z → a`.
pub fn running_grammar() -> CFGrammar {
    use Symbol::{Letter as L, Nonterminal as N};
    let p = |bodies: Vec<Vec<Symbol>>| bodies.into_iter().collect::<BTreeSet<_>>();
    CFGrammar::new(
        ab(),
        vec!["x".into(), "y".into(), "z".into()],
        vec![
            p(vec![vec![], vec![L(0), N(0), N(2)], vec![L(1), N(1), N(2)]]),
            p(vec![vec![], vec![L(1), N(1), N(2)]]),
            p(vec![vec![L(0)]]),
        ],
    )
    .expect("well-formed")
}

pub fn running_system<K: Semiring>() -> GrammarSystem<K> {
    running_grammar().to_coalgebra().expect("GNF")
}

/// `o(x) = 1`, `x_a = {x y}`, `y_b = {ε}`: the language `{aⁿbⁿ}` from `x`.
pub fn anbn_system<K: Semiring>() -> GrammarSystem<K> {
    let z = Polynomial::zero;
    GrammarSystem::new(
        ab(),
        vec!["x".into(), "y".into()],
        vec![K::one(), K::zero()],
        vec![
            vec![Polynomial::word(Monomial(vec![0, 1])), z()],
            vec![z(), Polynomial::one()],
        ],
    )
    .expect("well-formed")
}

/// `o(x) = 1`, `x_a = x x` over a one-letter alphabet: Catalan numbers.
pub fn catalan_system() -> GrammarSystem<Natural> {
    GrammarSystem::new(
        Alphabet::new(["a"]).expect("one letter"),
        vec!["x".into()],
        vec![Natural::new(1)],
        vec![vec![Polynomial::word(Monomial(vec![0, 0]))]],
    )
    .expect("well-formed")
}

/// `o(x) = o(y) = 1`, `x_a = x̄ × ā`, `x_b = ȳ × ā`, `y_a = 0̄`, `y_b = ȳ × ā`.
pub fn running_terms<K: Semiring>() -> TermSystem<K> {
    let (x, y, a) = (Term::var(0), Term::var(1), Term::letter(0));
    TermSystem::new(
        ab(),
        vec!["x".into(), "y".into()],
        vec![K::one(), K::one()],
        vec![
            vec![Term::prod(x, a.clone()), Term::prod(y.clone(), a.clone())],
            vec![Term::zero(), Term::prod(y, a)],
        ],
    )
    .expect("well-formed")
}

/// `μx.(1̄ + (ā × (x × b̄)))`.
pub fn anbn_mu<K: Semiring>() -> ClosedMuExpr<K> {
    let body = MuExpr::sum(
        MuExpr::one(),
        MuExpr::prod(MuExpr::letter(0), MuExpr::prod(MuExpr::var("x"), MuExpr::letter(1))),
    );
    ClosedMuExpr::new(MuExpr::fix("x", body)).expect("closed and guarded")
}

/// Membership in `{aⁿ bᵐ aᵐ⁺ⁿ}`.
pub fn in_running_x(w: &[usize]) -> bool {
    let lead = w.iter().take_while(|&&c| c == 0).count();
    let m = w[lead..].iter().take_while(|&&c| c == 1).count();
    if m == 0 {
        // `a²ⁿ`: the leading run is the whole word.
        return lead == w.len() && lead % 2 == 0;
    }
    let rest = &w[lead + m..];
    rest.len() == lead + m && rest.iter().all(|&c| c == 0)
}

/// Membership in `{bⁿ aⁿ}`.
pub fn in_running_y(w: &[usize]) -> bool {
    let n = w.iter().take_while(|&&c| c == 1).count();
    w.len() == 2 * n && w[n..].iter().all(|&c| c == 0)
}

/// Membership in `{aⁿ bⁿ}`.
pub fn in_anbn(w: &[usize]) -> bool {
    let n = w.iter().take_while(|&&c| c == 0).count();
    w.len() == 2 * n && w[n..].iter().all(|&c| c == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn all_words(maxlen: usize) -> Vec<Vec<usize>> {
        ab().words_up_to(maxlen)
    }

    #[test]
    fn predicates_match_enumerated_languages() {
        let mut x = BTreeSet::new();
        let mut y = BTreeSet::new();
        let mut anbn = BTreeSet::new();
        for n in 0..=10 {
            for m in 0..=10 {
                if 2 * (n + m) <= 10 {
                    x.insert([vec![0; n], vec![1; m], vec![0; m + n]].concat());
                }
            }
            if 2 * n <= 10 {
                y.insert([vec![1; n], vec![0; n]].concat());
                anbn.insert([vec![0; n], vec![1; n]].concat());
            }
        }
        for w in all_words(10) {
            assert_eq!(in_running_x(&w), x.contains(&w), "{w:?}");
            assert_eq!(in_running_y(&w), y.contains(&w), "{w:?}");
            assert_eq!(in_anbn(&w), anbn.contains(&w), "{w:?}");
        }
    }
}
