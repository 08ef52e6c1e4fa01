//! Weak-GNF coalgebras `X → B × P_ω((X + A)*)^A` and the idempotent
//! semiring `(B × P_ω((X + A)*)^A, ⊗, ⊕, 𝟙, 𝟘)` of behaviour pairs.
//!
//! Everything here is a finite object, so all checks are exact equalities.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::grammar::GrammarSystem;
use crate::semiring::Boolean;

/// A symbol of `X + A`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MixedSym {
    Var(usize),
    Letter(Letter),
}

pub type MixedWord = Vec<MixedSym>;

/// A finite language over `X + A`.
pub type Language = BTreeSet<MixedWord>;

/// `L · M`, concatenation of finite languages.
pub fn concat(l: &Language, m: &Language) -> Language {
    let mut out = Language::new();
    for u in l {
        for v in m {
            let mut w = u.clone();
            w.extend_from_slice(v);
            out.insert(w);
        }
    }
    out
}

/// `i(b)`: `{ε}` or `∅`.
fn indicator(b: bool) -> Language {
    if b {
        [Vec::new()].into()
    } else {
        Language::new()
    }
}

/// An element of `B × P_ω((X + A)*)^A`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BehaviourPair {
    pub out: bool,
    pub der: Vec<Language>,
}

impl BehaviourPair {
    /// `𝟘 = (0, λa.∅)`.
    pub fn zero(num_letters: usize) -> Self {
        BehaviourPair {
            out: false,
            der: vec![Language::new(); num_letters],
        }
    }

    /// `𝟙 = (1, λa.∅)`.
    pub fn one(num_letters: usize) -> Self {
        BehaviourPair {
            out: true,
            der: vec![Language::new(); num_letters],
        }
    }

    /// The interpretation of `b ∈ A`: `(0, λa.i((b = a)?))`.
    pub fn letter(b: Letter, num_letters: usize) -> Self {
        BehaviourPair {
            out: false,
            der: (0..num_letters).map(|a| indicator(a == b)).collect(),
        }
    }

    pub fn num_letters(&self) -> usize {
        self.der.len()
    }

    /// `i(o) ∪ ⋃_{b∈A} {b}·δ(b)`: the pair read back as a language.
    pub fn expand(&self) -> Language {
        let mut out = indicator(self.out);
        for (b, l) in self.der.iter().enumerate() {
            for w in l {
                let mut bw = Vec::with_capacity(w.len() + 1);
                bw.push(MixedSym::Letter(b));
                bw.extend_from_slice(w);
                out.insert(bw);
            }
        }
        out
    }
}

fn check_same(p: &BehaviourPair, q: &BehaviourPair) -> Result<()> {
    if p.num_letters() != q.num_letters() {
        return Err(Error::AlphabetMismatch {
            left: format!("{} letters", p.num_letters()),
            right: format!("{} letters", q.num_letters()),
        });
    }
    Ok(())
}

/// `(o₁ ∨ o₂, λa.(δ₁(a) ∪ δ₂(a)))`.
pub fn oplus(p: &BehaviourPair, q: &BehaviourPair) -> Result<BehaviourPair> {
    check_same(p, q)?;
    Ok(BehaviourPair {
        out: p.out || q.out,
        der: p.der.iter().zip(&q.der).map(|(l, m)| l | m).collect(),
    })
}

/// `(o₁ ∧ o₂, λa.(δ₁(a)·(i(o₂) ∪ ⋃_b {b}δ₂(b)) ∪ i(o₁)·δ₂(a)))`.
pub fn otimes(p: &BehaviourPair, q: &BehaviourPair) -> Result<BehaviourPair> {
    check_same(p, q)?;
    let tail = q.expand();
    Ok(BehaviourPair {
        out: p.out && q.out,
        der: p
            .der
            .iter()
            .zip(&q.der)
            .map(|(dp, dq)| {
                let mut d = concat(dp, &tail);
                if p.out {
                    d.extend(dq.iter().cloned());
                }
                d
            })
            .collect(),
    })
}

/// A coalgebra `(o, δ): X → B × P_ω((X + A)*)^A`, i.e. a grammar in weak
/// Greibach normal form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeakGnfSystem {
    alphabet: Alphabet,
    nonterminals: Vec<String>,
    output: Vec<bool>,
    deriv: Vec<Vec<Language>>,
}

impl WeakGnfSystem {
    pub fn new(
        alphabet: Alphabet,
        nonterminals: Vec<String>,
        output: Vec<bool>,
        deriv: Vec<Vec<Language>>,
    ) -> Result<Self> {
        let n = nonterminals.len();
        if output.len() != n || deriv.len() != n || deriv.iter().any(|row| row.len() != alphabet.len()) {
            return Err(Error::InvalidSystem("derivatives must be total on X × A".into()));
        }
        let sys = WeakGnfSystem {
            alphabet,
            nonterminals,
            output,
            deriv,
        };
        for row in &sys.deriv {
            for l in row {
                sys.check_language(l)?;
            }
        }
        Ok(sys)
    }

    /// The GNF coalgebra read as a weak-GNF one.
    pub fn from_grammar(s: &GrammarSystem<Boolean>) -> Self {
        let n = s.num_nonterminals();
        WeakGnfSystem {
            alphabet: s.alphabet().clone(),
            nonterminals: s.nonterminals().to_vec(),
            output: (0..n).map(|x| s.var_output(x).0).collect(),
            deriv: (0..n)
                .map(|x| {
                    s.alphabet()
                        .letters()
                        .map(|a| {
                            s.var_derivative(x, a)
                                .monomials()
                                .map(|m| m.symbols().iter().map(|&y| MixedSym::Var(y)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
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

    pub fn check_language(&self, l: &Language) -> Result<()> {
        for sym in l.iter().flatten() {
            match *sym {
                MixedSym::Var(x) if x >= self.nonterminals.len() => {
                    return Err(Error::UnknownSymbol(format!("nonterminal #{x}")))
                }
                MixedSym::Letter(a) if a >= self.alphabet.len() => {
                    return Err(Error::UnknownSymbol(format!("letter #{a}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The interpretation of `x ∈ X`: `(o(x), λa.x_a)`.
    pub fn var_pair(&self, x: usize) -> BehaviourPair {
        BehaviourPair {
            out: self.output[x],
            der: self.deriv[x].clone(),
        }
    }

    fn generator(&self, sym: MixedSym) -> BehaviourPair {
        match sym {
            MixedSym::Var(x) => self.var_pair(x),
            MixedSym::Letter(b) => BehaviourPair::letter(b, self.alphabet.len()),
        }
    }

    /// `(ô({s}), λa.{s}_a)` following the extension table row by row.
    fn word_behaviour(&self, s: &[MixedSym]) -> BehaviourPair {
        let n = self.alphabet.len();
        let Some((&head, rest)) = s.split_first() else {
            return BehaviourPair::one(n);
        };
        let tail = self.word_behaviour(rest);
        let expanded = tail.expand();
        match head {
            MixedSym::Var(x) => BehaviourPair {
                out: self.output[x] && tail.out,
                der: (0..n)
                    .map(|a| {
                        let mut d = concat(&self.deriv[x][a], &expanded);
                        if self.output[x] {
                            d.extend(tail.der[a].iter().cloned());
                        }
                        d
                    })
                    .collect(),
            },
            MixedSym::Letter(b) => BehaviourPair {
                out: false,
                der: (0..n)
                    .map(|a| if a == b { expanded.clone() } else { Language::new() })
                    .collect(),
            },
        }
    }

    /// `(ô(S), δ̂(S))` from the extension table.
    pub fn extension(&self, s: &Language) -> Result<BehaviourPair> {
        self.check_language(s)?;
        let n = self.alphabet.len();
        Ok(s.iter().fold(BehaviourPair::zero(n), |acc, w| {
            oplus(&acc, &self.word_behaviour(w)).expect("same alphabet")
        }))
    }

    pub fn extension_output(&self, s: &Language) -> Result<bool> {
        Ok(self.extension(s)?.out)
    }

    pub fn extension_derivative(&self, s: &Language, a: Letter) -> Result<Language> {
        self.alphabet.check(a)?;
        Ok(self.extension(s)?.der.swap_remove(a))
    }

    /// `(O, Δ)(S)`: the semiring morphism induced by the generators, computed
    /// as `⊕` over the words of `S` of the left-to-right `⊗`-product of their
    /// symbols.
    pub fn morphism_image(&self, s: &Language) -> Result<BehaviourPair> {
        self.check_language(s)?;
        let n = self.alphabet.len();
        let mut acc = BehaviourPair::zero(n);
        for w in s {
            let term = w.iter().fold(BehaviourPair::one(n), |p, &y| {
                otimes(&p, &self.generator(y)).expect("same alphabet")
            });
            acc = oplus(&acc, &term)?;
        }
        Ok(acc)
    }

    pub fn format_word(&self, w: &[MixedSym]) -> String {
        if w.is_empty() {
            return "_".into();
        }
        w.iter()
            .map(|s| match *s {
                MixedSym::Var(x) => self.nonterminals[x].clone(),
                MixedSym::Letter(a) => self.alphabet.name(a).to_owned(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_language(&self, l: &Language) -> String {
        let words: Vec<String> = l.iter().map(|w| self.format_word(w)).collect();
        format!("{{{}}}", words.join(", "))
    }

    pub fn format_pair(&self, p: &BehaviourPair) -> String {
        let der: Vec<String> = p
            .der
            .iter()
            .enumerate()
            .map(|(a, l)| format!("{} -> {}", self.alphabet.name(a), self.format_language(l)))
            .collect();
        format!("({}, [{}])", u8::from(p.out), der.join("; "))
    }
}

/// Random word over `X + A` of length at most `maxlen`.
pub fn random_word(rng: &mut impl Rng, num_vars: usize, num_letters: usize, maxlen: usize) -> MixedWord {
    let len = rng.random_range(0..=maxlen);
    (0..len)
        .map(|_| {
            let i = rng.random_range(0..num_vars + num_letters);
            if i < num_vars {
                MixedSym::Var(i)
            } else {
                MixedSym::Letter(i - num_vars)
            }
        })
        .collect()
}

/// Random finite language with at most `max_words` words.
pub fn random_language(
    rng: &mut impl Rng,
    num_vars: usize,
    num_letters: usize,
    max_words: usize,
    maxlen: usize,
) -> Language {
    let k = rng.random_range(0..=max_words);
    (0..k)
        .map(|_| random_word(rng, num_vars, num_letters, maxlen))
        .collect()
}

pub fn random_pair(rng: &mut impl Rng, num_vars: usize, num_letters: usize) -> BehaviourPair {
    BehaviourPair {
        out: rng.random_bool(0.5),
        der: (0..num_letters)
            .map(|_| random_language(rng, num_vars, num_letters, 3, 3))
            .collect(),
    }
}

/// Random weak-GNF system over alphabet `a, b, …` and nonterminals
/// `x0, x1, …`.
pub fn random_weak_system(rng: &mut impl Rng, num_vars: usize, num_letters: usize) -> WeakGnfSystem {
    let alphabet =
        Alphabet::new((0..num_letters).map(|i| ((b'a' + i as u8) as char).to_string())).expect("letters are distinct");
    WeakGnfSystem {
        alphabet,
        nonterminals: (0..num_vars).map(|i| format!("x{i}")).collect(),
        output: (0..num_vars).map(|_| rng.random_bool(0.5)).collect(),
        deriv: (0..num_vars)
            .map(|_| {
                (0..num_letters)
                    .map(|_| random_language(rng, num_vars, num_letters, 3, 3))
                    .collect()
            })
            .collect(),
    }
}

/// Outcome of one law over all samples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LawCheck {
    pub name: &'static str,
    pub checked: usize,
    /// The first counterexample found, rendered.
    pub counterexample: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Report {
    pub laws: Vec<LawCheck>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.counterexample.is_none())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for law in &self.laws {
            match &law.counterexample {
                None => writeln!(f, "ok    {} ({} samples)", law.name, law.checked)?,
                Some(c) => writeln!(f, "FAIL  {}: {}", law.name, c)?,
            }
        }
        Ok(())
    }
}

pub const LAWS: [&str; 13] = [
    "zero + p = p",
    "p + zero = p",
    "p + q = q + p",
    "(p + q) + r = p + (q + r)",
    "p + p = p",
    "one * p = p",
    "p * one = p",
    "(p * q) * r = p * (q * r)",
    "p * (q + r) = p * q + p * r",
    "(p + q) * r = p * r + q * r",
    "zero * p = zero",
    "p * zero = zero",
    "(O, D)(S) = extension(S)",
];

/// Checks the idempotent-semiring laws on `samples` random triples of behaviour
/// pairs, and the agreement of the induced morphism with the extension on
/// `samples` random languages over `system`.
pub fn check_semiring_agreement(system: &WeakGnfSystem, rng: &mut impl Rng, samples: usize) -> Report {
    let (nv, nl) = (system.num_nonterminals(), system.alphabet().len());
    let zero = BehaviourPair::zero(nl);
    let one = BehaviourPair::one(nl);
    let mut fails: Vec<Option<String>> = vec![None; LAWS.len()];
    let plus = |p: &BehaviourPair, q: &BehaviourPair| oplus(p, q).expect("same alphabet");
    let times = |p: &BehaviourPair, q: &BehaviourPair| otimes(p, q).expect("same alphabet");
    for _ in 0..samples {
        let p = random_pair(rng, nv, nl);
        let q = random_pair(rng, nv, nl);
        let r = random_pair(rng, nv, nl);
        let results = [
            plus(&zero, &p) == p,
            plus(&p, &zero) == p,
            plus(&p, &q) == plus(&q, &p),
            plus(&plus(&p, &q), &r) == plus(&p, &plus(&q, &r)),
            plus(&p, &p) == p,
            times(&one, &p) == p,
            times(&p, &one) == p,
            times(&times(&p, &q), &r) == times(&p, &times(&q, &r)),
            times(&p, &plus(&q, &r)) == plus(&times(&p, &q), &times(&p, &r)),
            times(&plus(&p, &q), &r) == plus(&times(&p, &r), &times(&q, &r)),
            times(&zero, &p) == zero,
            times(&p, &zero) == zero,
        ];
        for (i, ok) in results.into_iter().enumerate() {
            if !ok && fails[i].is_none() {
                fails[i] = Some(format!(
                    "p = {}, q = {}, r = {}",
                    system.format_pair(&p),
                    system.format_pair(&q),
                    system.format_pair(&r)
                ));
            }
        }
        let s = random_language(rng, nv, nl, 4, 3);
        let image = system.morphism_image(&s).expect("sampled over the system");
        let ext = system.extension(&s).expect("sampled over the system");
        if image != ext && fails[12].is_none() {
            fails[12] = Some(format!(
                "S = {}: {} vs {}",
                system.format_language(&s),
                system.format_pair(&image),
                system.format_pair(&ext)
            ));
        }
    }
    Report {
        laws: LAWS
            .iter()
            .zip(fails)
            .map(|(&name, counterexample)| LawCheck {
                name,
                checked: samples,
                counterexample,
            })
            .collect(),
    }
}
