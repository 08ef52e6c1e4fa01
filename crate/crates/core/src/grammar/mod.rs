//! Grammar coalgebras `X → K × K⟨X⟩^A` and their extension to automata on
//! polynomials.
//!
//! A [`GrammarSystem`] assigns each nonterminal an output value and, per
//! letter, a polynomial derivative. Extending it to all of `K⟨X⟩` by the
//! product rule turns it into a deterministic (infinite) automaton whose
//! behaviour is the power series generated by each polynomial. Over the
//! Boolean semiring this is exactly the grammar automaton of a GNF grammar.

mod cfg;
mod oracle;
mod polynomial;

pub use cfg::{Body, CFGrammar, Symbol};
pub use oracle::{derivation_oracle, OracleVerdict};
pub use polynomial::{Monomial, Polynomial};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// A grammar coalgebra `(o, δ)` over the semiring `K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrammarSystem<K> {
    alphabet: Alphabet,
    nonterminals: Vec<String>,
    output: Vec<K>,
    deriv: Vec<Vec<Polynomial<K>>>,
}

impl<K: Semiring> GrammarSystem<K> {
    /// Builds a system. `deriv[x][a]` is the `a`-derivative of nonterminal `x`.
    pub fn new(
        alphabet: Alphabet,
        nonterminals: Vec<String>,
        output: Vec<K>,
        deriv: Vec<Vec<Polynomial<K>>>,
    ) -> Result<Self> {
        let n = nonterminals.len();
        if output.len() != n || deriv.len() != n {
            return Err(Error::InvalidSystem(
                "output and derivative tables must cover every nonterminal".into(),
            ));
        }
        for (i, name) in nonterminals.iter().enumerate() {
            if nonterminals[..i].contains(name) {
                return Err(Error::InvalidSystem(format!("nonterminal `{name}` declared twice")));
            }
        }
        for (x, row) in deriv.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::InvalidSystem(format!(
                    "derivatives of `{}` must cover every letter",
                    nonterminals[x]
                )));
            }
            for p in row {
                if let Some(m) = p.max_symbol() {
                    if m >= n {
                        return Err(Error::UnknownNonterminal(format!("#{m}")));
                    }
                }
            }
        }
        Ok(GrammarSystem {
            alphabet,
            nonterminals,
            output,
            deriv,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|x| x == name)
    }

    /// `o(x)`.
    pub fn var_output(&self, x: usize) -> &K {
        &self.output[x]
    }

    /// `x_a`.
    pub fn var_derivative(&self, x: usize, a: Letter) -> &Polynomial<K> {
        &self.deriv[x][a]
    }

    pub fn check_polynomial(&self, p: &Polynomial<K>) -> Result<()> {
        match p.max_symbol() {
            Some(m) if m >= self.nonterminals.len() => Err(Error::UnknownNonterminal(format!("#{m}"))),
            _ => Ok(()),
        }
    }

    fn monomial_output(&self, m: &Monomial) -> K {
        let mut acc = K::one();
        for &x in m.symbols() {
            if acc.is_zero() {
                break;
            }
            acc = acc.mul(&self.output[x]);
        }
        acc
    }

    /// `ô(p)`: the constant term of the series generated by `p`.
    pub fn poly_output(&self, p: &Polynomial<K>) -> Result<K> {
        self.check_polynomial(p)?;
        let mut acc = K::zero();
        for (m, k) in p {
            acc = acc.add(&k.mul(&self.monomial_output(m)));
        }
        Ok(acc)
    }

    /// `(k·x₁…xₙ)_a`, accumulated into `out`. Unrolls
    /// `(x w)_a = x_a w + i(o(x)) w_a` along the monomial.
    fn add_monomial_derivative(&self, m: &Monomial, k: &K, a: Letter, out: &mut Polynomial<K>) {
        let syms = m.symbols();
        let mut prefix_output = k.clone();
        for (j, &x) in syms.iter().enumerate() {
            let rest = Monomial(syms[j + 1..].to_vec());
            for (dm, dk) in &self.deriv[x][a] {
                out.add_term(dm.concat(&rest), prefix_output.mul(dk));
            }
            prefix_output = prefix_output.mul(&self.output[x]);
            if prefix_output.is_zero() {
                break;
            }
        }
    }

    /// `p_a`, by `K`-linearity over the monomials of `p`.
    pub fn poly_derivative(&self, p: &Polynomial<K>, a: Letter) -> Result<Polynomial<K>> {
        self.check_polynomial(p)?;
        self.alphabet.check(a)?;
        let mut out = Polynomial::zero();
        for (m, k) in p {
            self.add_monomial_derivative(m, k, a, &mut out);
        }
        debug_assert!(out.is_normalized());
        Ok(out)
    }

    /// `p_w`, with `p_ε = p` and `p_{aw} = (p_a)_w`.
    pub fn word_derivative(&self, p: &Polynomial<K>, w: &[Letter]) -> Result<Polynomial<K>> {
        self.check_polynomial(p)?;
        let mut cur = p.clone();
        for &a in w {
            self.alphabet.check(a)?;
            if cur.is_zero() {
                break;
            }
            cur = self.poly_derivative(&cur, a)?;
        }
        Ok(cur)
    }

    /// Coefficient of `w` in the series generated by `p`.
    pub fn coefficient(&self, p: &Polynomial<K>, w: &[Letter]) -> Result<K> {
        let d = self.word_derivative(p, w)?;
        self.poly_output(&d)
    }

    /// True iff the coefficient of `w` is nonzero.
    pub fn accepts(&self, p: &Polynomial<K>, w: &[Letter]) -> Result<bool> {
        Ok(!self.coefficient(p, w)?.is_zero())
    }

    /// All words of length at most `maxlen` with nonzero coefficient, in
    /// length-then-alphabet order.
    pub fn enumerate(&self, p: &Polynomial<K>, maxlen: usize) -> Result<Vec<(Word, K)>> {
        self.check_polynomial(p)?;
        let mut out = Vec::new();
        let mut layer: Vec<(Word, Polynomial<K>)> = vec![(Vec::new(), p.clone())];
        for len in 0..=maxlen {
            for (w, q) in &layer {
                let k = self.poly_output(q)?;
                if !k.is_zero() {
                    out.push((w.clone(), k));
                }
            }
            if len == maxlen {
                break;
            }
            let mut next = Vec::with_capacity(layer.len() * self.alphabet.len());
            for (w, q) in &layer {
                for a in self.alphabet.letters() {
                    let d = self.poly_derivative(q, a)?;
                    if d.is_zero() {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(a);
                    next.push((w2, d));
                }
            }
            layer = next;
        }
        Ok(out)
    }

    /// Reads the system back as a GNF grammar:
    /// `p(x) = i(o(x)) ∪ ⋃_a {a}·x_a`.
    pub fn to_grammar(&self) -> Result<CFGrammar> {
        if K::NAME != crate::semiring::Boolean::NAME {
            return Err(Error::NonBooleanSemiring);
        }
        let productions = (0..self.nonterminals.len())
            .map(|x| {
                let mut bodies = std::collections::BTreeSet::new();
                if !self.output[x].is_zero() {
                    bodies.insert(Vec::new());
                }
                for a in self.alphabet.letters() {
                    for m in self.deriv[x][a].monomials() {
                        let mut body = vec![Symbol::Letter(a)];
                        body.extend(m.symbols().iter().map(|&y| Symbol::Nonterminal(y)));
                        bodies.insert(body);
                    }
                }
                bodies
            })
            .collect();
        CFGrammar::new(self.alphabet.clone(), self.nonterminals.clone(), productions)
    }

    /// Renders a polynomial with this system's nonterminal names.
    pub fn format_polynomial(&self, p: &Polynomial<K>) -> String {
        format_polynomial(p, &self.nonterminals)
    }
}

/// `k*x y + z + 2`, with ε rendered as its bare coefficient and the zero
/// polynomial as `0`.
pub fn format_polynomial<K: Semiring>(p: &Polynomial<K>, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_owned();
    }
    let parts: Vec<String> = p
        .iter()
        .map(|(m, k)| {
            if m.is_empty() {
                k.to_string()
            } else {
                let word = m
                    .symbols()
                    .iter()
                    .map(|&x| names[x].as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                if k.is_one() {
                    word
                } else {
                    format!("{k}*{word}")
                }
            }
        })
        .collect();
    parts.join(" + ")
}
