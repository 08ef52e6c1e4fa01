//! Workloads shared by the benchmarks.

use std::sync::Arc;

use cfcoalg::syntax::{parse_grammar, parse_mu, parse_terms};
use cfcoalg::{Boolean, Natural, Polynomial, State, Term};

const CATALAN: &str = "#grammar\nsemiring: nat\nalphabet: a\nx.out = 1\nx.a = x x\n";

const RUNNING: &str = "#grammar\nalphabet: a b\nx -> _ | a x z | b y z\ny -> _ | b y z\nz -> a\n";

const RUNNING_TERMS: &str = "#terms\nalphabet: a b\nx.out = 1\nx.a = x * a\nx.b = y * a\n\
                             y.out = 1\ny.a = 0\ny.b = y * a\n";

const ANBN: &str = "#grammar\nalphabet: a b\nx -> _ | a x y\ny -> b\n";

const ANBN_MU: &str = "#mu\nalphabet: a b\nmu x . (1 + (a * (x * b)))\n";

/// `x` with `o(x) = 1`, `x_a = x x`: Catalan numbers as coefficients of `aⁿ`.
pub fn catalan() -> State<Natural> {
    let f = parse_grammar(CATALAN).expect("valid grammar");
    State::grammar(Arc::new(f.system), Polynomial::var(0)).expect("valid start")
}

/// The grammar generating `{aⁿ bᵐ aᵐ⁺ⁿ}` from `x`.
pub fn running() -> State<Boolean> {
    let f = parse_grammar(RUNNING).expect("valid grammar");
    State::grammar(Arc::new(f.system), Polynomial::var(0)).expect("valid start")
}

/// The same language as a term system.
pub fn running_terms() -> State<Boolean> {
    let f = parse_terms(RUNNING_TERMS).expect("valid terms");
    State::terms(Arc::new(f.system), Term::var(0)).expect("valid start")
}

/// `{aⁿbⁿ}` as a grammar.
pub fn anbn_grammar() -> State<Boolean> {
    let f = parse_grammar(ANBN).expect("valid grammar");
    State::grammar(Arc::new(f.system), Polynomial::var(0)).expect("valid start")
}

/// `{aⁿbⁿ}` as a μ-expression.
pub fn anbn_mu() -> State<Boolean> {
    let f = parse_mu(ANBN_MU).expect("valid expression");
    State::mu(Arc::new(f.alphabet), f.expr).expect("valid start")
}

/// The word `aⁿ bᵐ aᵐ⁺ⁿ`.
pub fn running_word(n: usize, m: usize) -> Vec<usize> {
    [vec![0; n], vec![1; m], vec![0; n + m]].concat()
}
