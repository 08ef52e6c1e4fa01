//! Random inputs. All generators take the RNG explicitly so runs are
//! reproducible from a seed.

use std::collections::BTreeSet;

use cfcoalg::muexpr::check_guarded;
use cfcoalg::{
    Alphabet, Boolean, CFGrammar, ClosedMuExpr, GrammarSystem, Monomial, MuExpr, Natural, Polynomial, Semiring, Symbol,
    Term, TermSystem,
};
use rand::Rng;

/// Coefficients that can be drawn at random. Naturals stay small so that
/// products remain readable in failure messages.
pub trait RandomCoeff: Semiring {
    fn random(rng: &mut impl Rng) -> Self;
}

impl RandomCoeff for Boolean {
    fn random(rng: &mut impl Rng) -> Self {
        Boolean(rng.random_bool(0.5))
    }
}

impl RandomCoeff for Natural {
    fn random(rng: &mut impl Rng) -> Self {
        Natural::new(rng.random_range(0..=3))
    }
}

/// Alphabet `a, b, c, …` of the given size.
pub fn alphabet(size: usize) -> Alphabet {
    Alphabet::new((0..size).map(|i| ((b'a' + i as u8) as char).to_string())).expect("distinct letters")
}

/// Nonterminal names `x0, x1, …`.
pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn monomial(rng: &mut impl Rng, num_vars: usize, maxlen: usize) -> Monomial {
    let len = if num_vars == 0 { 0 } else { rng.random_range(0..=maxlen) };
    Monomial((0..len).map(|_| rng.random_range(0..num_vars)).collect())
}

/// Polynomial with up to `max_terms` monomials of length at most `maxlen`.
pub fn polynomial<K: RandomCoeff>(
    rng: &mut impl Rng,
    num_vars: usize,
    max_terms: usize,
    maxlen: usize,
) -> Polynomial<K> {
    let mut p = Polynomial::zero();
    for _ in 0..rng.random_range(0..=max_terms) {
        let m = monomial(rng, num_vars, maxlen);
        p.add_term(m, K::random(rng));
    }
    p
}

pub fn grammar_system<K: RandomCoeff>(rng: &mut impl Rng, num_vars: usize, num_letters: usize) -> GrammarSystem<K> {
    let output = (0..num_vars).map(|_| K::random(rng)).collect();
    let deriv = (0..num_vars)
        .map(|_| (0..num_letters).map(|_| polynomial(rng, num_vars, 3, 3)).collect())
        .collect();
    GrammarSystem::new(alphabet(num_letters), names(num_vars), output, deriv).expect("well-formed")
}

/// GNF grammar with at most `max_bodies` bodies per nonterminal, each tail
/// holding at most `max_tail` nonterminals.
pub fn gnf_grammar(
    rng: &mut impl Rng,
    num_vars: usize,
    num_letters: usize,
    max_bodies: usize,
    max_tail: usize,
) -> CFGrammar {
    let productions = (0..num_vars)
        .map(|_| {
            let mut bodies = BTreeSet::new();
            for _ in 0..rng.random_range(0..=max_bodies) {
                if rng.random_bool(0.25) {
                    bodies.insert(Vec::new());
                } else {
                    let mut body = vec![Symbol::Letter(rng.random_range(0..num_letters))];
                    for _ in 0..rng.random_range(0..=max_tail) {
                        body.push(Symbol::Nonterminal(rng.random_range(0..num_vars)));
                    }
                    bodies.insert(body);
                }
            }
            bodies
        })
        .collect();
    CFGrammar::new(alphabet(num_letters), names(num_vars), productions).expect("well-formed")
}

/// Random term of depth at most `depth` (a leaf has depth 1).
pub fn term<K: RandomCoeff>(rng: &mut impl Rng, depth: usize, num_vars: usize, num_letters: usize) -> Term<K> {
    if depth <= 1 || rng.random_bool(0.3) {
        let choices = 1 + usize::from(num_letters > 0) + usize::from(num_vars > 0);
        return match rng.random_range(0..choices) {
            0 => Term::constant(K::random(rng)),
            1 if num_letters > 0 => Term::letter(rng.random_range(0..num_letters)),
            _ => Term::var(rng.random_range(0..num_vars)),
        };
    }
    let l = term(rng, depth - 1, num_vars, num_letters);
    let r = term(rng, depth - 1, num_vars, num_letters);
    if rng.random_bool(0.5) {
        Term::sum(l, r)
    } else {
        Term::prod(l, r)
    }
}

pub fn term_system<K: RandomCoeff>(
    rng: &mut impl Rng,
    num_vars: usize,
    num_letters: usize,
    depth: usize,
) -> TermSystem<K> {
    let output = (0..num_vars).map(|_| K::random(rng)).collect();
    let deriv = (0..num_vars)
        .map(|_| {
            (0..num_letters)
                .map(|_| term(rng, depth, num_vars, num_letters))
                .collect()
        })
        .collect();
    TermSystem::new(alphabet(num_letters), names(num_vars), output, deriv).expect("well-formed")
}

/// Random closed guarded μ-expression of depth at most `depth`. Binders are
/// named `v0, v1, …` by nesting level, so sibling binders may repeat names.
pub fn closed_mu<K: RandomCoeff>(rng: &mut impl Rng, depth: usize, num_letters: usize) -> ClosedMuExpr<K> {
    let e = mu_term(rng, depth, num_letters, &mut Vec::new());
    ClosedMuExpr::new(e).expect("generator yields closed guarded expressions")
}

fn mu_leaf<K: RandomCoeff>(rng: &mut impl Rng, num_letters: usize, bound: &[String]) -> MuExpr<K> {
    match rng.random_range(0..3) {
        0 => MuExpr::constant(K::random(rng)),
        1 if !bound.is_empty() => MuExpr::var(bound[rng.random_range(0..bound.len())].as_str()),
        _ => MuExpr::letter(rng.random_range(0..num_letters)),
    }
}

fn mu_term<K: RandomCoeff>(rng: &mut impl Rng, depth: usize, num_letters: usize, bound: &mut Vec<String>) -> MuExpr<K> {
    if depth <= 1 || rng.random_bool(0.25) {
        return mu_leaf(rng, num_letters, bound);
    }
    match rng.random_range(0..5) {
        0 | 1 => MuExpr::sum(
            mu_term(rng, depth - 1, num_letters, bound),
            mu_term(rng, depth - 1, num_letters, bound),
        ),
        2 | 3 => MuExpr::prod(
            mu_term(rng, depth - 1, num_letters, bound),
            mu_term(rng, depth - 1, num_letters, bound),
        ),
        _ => {
            let x = format!("v{}", bound.len());
            bound.push(x.clone());
            let body = guarded(rng, depth - 1, num_letters, bound);
            bound.pop();
            MuExpr::fix(x.as_str(), body)
        }
    }
}

/// `g ::= ā × t | k̄ | g + g`.
fn guarded<K: RandomCoeff>(rng: &mut impl Rng, depth: usize, num_letters: usize, bound: &mut Vec<String>) -> MuExpr<K> {
    let g = if depth >= 2 && rng.random_bool(0.4) {
        MuExpr::sum(
            guarded(rng, depth - 1, num_letters, bound),
            guarded(rng, depth - 1, num_letters, bound),
        )
    } else if depth >= 2 && rng.random_bool(0.8) {
        MuExpr::prod(
            MuExpr::letter(rng.random_range(0..num_letters)),
            mu_term(rng, depth - 1, num_letters, bound),
        )
    } else {
        MuExpr::constant(K::random(rng))
    };
    debug_assert!(check_guarded(&g));
    g
}

/// Finite language over `num_symbols` symbols as a Boolean polynomial.
pub fn language(rng: &mut impl Rng, num_symbols: usize, max_words: usize, maxlen: usize) -> Polynomial<Boolean> {
    let mut p = Polynomial::zero();
    for _ in 0..rng.random_range(0..=max_words) {
        p.add_term(monomial(rng, num_symbols, maxlen), Boolean(true));
    }
    p
}
