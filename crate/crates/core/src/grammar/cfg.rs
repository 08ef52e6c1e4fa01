use std::collections::BTreeSet;

use super::{GrammarSystem, Monomial, Polynomial};
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    Letter(Letter),
    Nonterminal(usize),
}

/// Right-hand side of a production; the empty body is ε.
pub type Body = Vec<Symbol>;

/// A context-free grammar `(X, p)` with `p: X → P_ω((A + X)*)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CFGrammar {
    alphabet: Alphabet,
    nonterminals: Vec<String>,
    productions: Vec<BTreeSet<Body>>,
}

impl CFGrammar {
    pub fn new(alphabet: Alphabet, nonterminals: Vec<String>, productions: Vec<BTreeSet<Body>>) -> Result<Self> {
        if productions.len() != nonterminals.len() {
            return Err(Error::InvalidSystem(
                "one production set per nonterminal is required".into(),
            ));
        }
        for bodies in &productions {
            for sym in bodies.iter().flatten() {
                match *sym {
                    Symbol::Letter(a) => alphabet.check(a)?,
                    Symbol::Nonterminal(x) if x >= nonterminals.len() => {
                        return Err(Error::UnknownNonterminal(format!("#{x}")))
                    }
                    Symbol::Nonterminal(_) => {}
                }
            }
        }
        Ok(CFGrammar {
            alphabet,
            nonterminals,
            productions,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn productions(&self, x: usize) -> &BTreeSet<Body> {
        &self.productions[x]
    }

    pub fn format_body(&self, body: &[Symbol]) -> String {
        if body.is_empty() {
            return "_".to_owned();
        }
        body.iter()
            .map(|s| match *s {
                Symbol::Letter(a) => self.alphabet.name(a),
                Symbol::Nonterminal(x) => self.nonterminals[x].as_str(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Whether every body has the shape `ε` or `a w` with `w ∈ X*`.
    pub fn check_gnf(&self) -> Result<()> {
        for (x, bodies) in self.productions.iter().enumerate() {
            for body in bodies {
                let ok = match body.split_first() {
                    None => true,
                    Some((Symbol::Letter(_), rest)) => rest.iter().all(|s| matches!(s, Symbol::Nonterminal(_))),
                    Some(_) => false,
                };
                if !ok {
                    return Err(Error::NotGnf {
                        nonterminal: self.nonterminals[x].clone(),
                        body: self.format_body(body),
                    });
                }
            }
        }
        Ok(())
    }

    /// The grammar coalgebra: `o(x) = 1` iff `x → ε`, and
    /// `x_a = { w | x → a w }`, each body contributing coefficient one.
    pub fn to_coalgebra<K: Semiring>(&self) -> Result<GrammarSystem<K>> {
        self.check_gnf()?;
        let n = self.nonterminals.len();
        let mut output = vec![K::zero(); n];
        let mut deriv = vec![vec![Polynomial::zero(); self.alphabet.len()]; n];
        for (x, bodies) in self.productions.iter().enumerate() {
            for body in bodies {
                match body.split_first() {
                    None => output[x] = output[x].add(&K::one()),
                    Some((Symbol::Letter(a), rest)) => {
                        let w: Vec<usize> = rest
                            .iter()
                            .map(|s| match *s {
                                Symbol::Nonterminal(y) => y,
                                Symbol::Letter(_) => unreachable!("checked by check_gnf"),
                            })
                            .collect();
                        deriv[x][*a].add_term(Monomial(w), K::one());
                    }
                    Some(_) => unreachable!("checked by check_gnf"),
                }
            }
        }
        GrammarSystem::new(self.alphabet.clone(), self.nonterminals.clone(), output, deriv)
    }
}
