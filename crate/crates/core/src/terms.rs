//! Syntactic systems of behavioural differential equations over the free
//! term algebra `T_K(X)`, and their translation into grammar coalgebras.
//!
//! Terms are purely syntactic trees: no flattening, no precedence, no
//! simplification. The derivative of a term is exactly what the inductive
//! table prescribes, so `(σ × υ)_a` always has the shape
//! `(σ_a × υ) + (j(ō(σ)) × υ_a)`.
//!
//! The translation `f` maps terms to polynomials over the extended
//! nonterminals `Y = {x̂ | x ∈ X} ∪ {â | a ∈ A}`; together with
//! [`induced_grammar_system`] it is a coalgebra homomorphism into the
//! grammar automaton on `K⟨Y⟩`. [`translate_g`] is a right inverse of `f`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::grammar::{GrammarSystem, Monomial, Polynomial};
use crate::semiring::Semiring;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum TermKind<K> {
    Const(K),
    Letter(Letter),
    Var(usize),
    Sum(Term<K>, Term<K>),
    Prod(Term<K>, Term<K>),
}

struct Node<K> {
    kind: TermKind<K>,
    hash: u64,
}

/// A term of `T_K(X)`. Cheap to clone; subterms are shared.
pub struct Term<K>(Arc<Node<K>>);

impl<K> Clone for Term<K> {
    fn clone(&self) -> Self {
        Term(Arc::clone(&self.0))
    }
}

impl<K: Semiring> Term<K> {
    fn build(kind: TermKind<K>) -> Self {
        let mut h = DefaultHasher::new();
        match &kind {
            TermKind::Const(k) => (0u8, k).hash(&mut h),
            TermKind::Letter(a) => (1u8, a).hash(&mut h),
            TermKind::Var(x) => (2u8, x).hash(&mut h),
            TermKind::Sum(l, r) => (3u8, l.0.hash, r.0.hash).hash(&mut h),
            TermKind::Prod(l, r) => (4u8, l.0.hash, r.0.hash).hash(&mut h),
        }
        let hash = h.finish();
        Term(Arc::new(Node { kind, hash }))
    }

    pub fn constant(k: K) -> Self {
        Self::build(TermKind::Const(k))
    }

    pub fn zero() -> Self {
        Self::constant(K::zero())
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    /// `j(k)`: the constant term `k̄`.
    pub fn embed(k: K) -> Self {
        Self::constant(k)
    }

    pub fn letter(a: Letter) -> Self {
        Self::build(TermKind::Letter(a))
    }

    pub fn var(x: usize) -> Self {
        Self::build(TermKind::Var(x))
    }

    pub fn sum(l: Term<K>, r: Term<K>) -> Self {
        Self::build(TermKind::Sum(l, r))
    }

    pub fn prod(l: Term<K>, r: Term<K>) -> Self {
        Self::build(TermKind::Prod(l, r))
    }

    /// Right-nested sum `t₁ + (t₂ + (… + tₙ))`; `0̄` when empty.
    pub fn sum_all(items: Vec<Term<K>>) -> Self {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Self::zero(),
            Some(last) => it.fold(last, |acc, t| Self::sum(t, acc)),
        }
    }

    /// Right-nested product `t₁ × (t₂ × (… × tₙ))`; `1̄` when empty.
    pub fn prod_all(items: Vec<Term<K>>) -> Self {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Self::one(),
            Some(last) => it.fold(last, |acc, t| Self::prod(t, acc)),
        }
    }

    pub fn kind(&self) -> &TermKind<K> {
        &self.0.kind
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn is_compound(&self) -> bool {
        matches!(self.kind(), TermKind::Sum(..) | TermKind::Prod(..))
    }

    /// Number of nodes, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::Sum(l, r) | TermKind::Prod(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self.kind() {
            TermKind::Sum(l, r) | TermKind::Prod(l, r) => 1 + l.depth().max(r.depth()),
            _ => 1,
        }
    }

    /// Largest variable index occurring in the term.
    pub fn max_var(&self) -> Option<usize> {
        match self.kind() {
            TermKind::Var(x) => Some(*x),
            TermKind::Sum(l, r) | TermKind::Prod(l, r) => l.max_var().max(r.max_var()),
            _ => None,
        }
    }

    /// Largest letter index occurring in the term.
    pub fn max_letter(&self) -> Option<Letter> {
        match self.kind() {
            TermKind::Letter(a) => Some(*a),
            TermKind::Sum(l, r) | TermKind::Prod(l, r) => l.max_letter().max(r.max_letter()),
            _ => None,
        }
    }
}

impl<K: PartialEq> PartialEq for Term<K> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl<K: Eq> Eq for Term<K> {}

impl<K: PartialOrd> PartialOrd for Term<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Some(std::cmp::Ordering::Equal);
        }
        self.0.kind.partial_cmp(&other.0.kind)
    }
}

impl<K: Ord> Ord for Term<K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl<K> Hash for Term<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl<K: fmt::Debug> fmt::Debug for Term<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.kind.fmt(f)
    }
}

/// Renders a constant: `0`, `1`, or `#k`.
pub fn format_constant<K: Semiring>(k: &K) -> String {
    if k.is_zero() {
        "0".into()
    } else if k.is_one() {
        "1".into()
    } else {
        format!("#{k}")
    }
}

/// Fully parenthesized rendering: compound subterms are wrapped, the
/// top-level term is not.
pub fn format_term<K: Semiring>(t: &Term<K>, letters: &[String], vars: &[String]) -> String {
    fn go<K: Semiring>(t: &Term<K>, letters: &[String], vars: &[String], out: &mut String) {
        match t.kind() {
            TermKind::Const(k) => out.push_str(&format_constant(k)),
            TermKind::Letter(a) => out.push_str(&letters[*a]),
            TermKind::Var(x) => out.push_str(&vars[*x]),
            TermKind::Sum(l, r) | TermKind::Prod(l, r) => {
                let op = if matches!(t.kind(), TermKind::Sum(..)) {
                    " + "
                } else {
                    " * "
                };
                child(l, letters, vars, out);
                out.push_str(op);
                child(r, letters, vars, out);
            }
        }
    }
    fn child<K: Semiring>(t: &Term<K>, letters: &[String], vars: &[String], out: &mut String) {
        if t.is_compound() {
            out.push('(');
            go(t, letters, vars, out);
            out.push(')');
        } else {
            go(t, letters, vars, out);
        }
    }
    let mut out = String::new();
    go(t, letters, vars, &mut out);
    out
}

/// A syntactic system `X → K × T_K(X)^A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermSystem<K> {
    alphabet: Alphabet,
    nonterminals: Vec<String>,
    output: Vec<K>,
    deriv: Vec<Vec<Term<K>>>,
}

impl<K: Semiring> TermSystem<K> {
    pub fn new(
        alphabet: Alphabet,
        nonterminals: Vec<String>,
        output: Vec<K>,
        deriv: Vec<Vec<Term<K>>>,
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
        let sys = TermSystem {
            alphabet,
            nonterminals,
            output,
            deriv,
        };
        for (x, row) in sys.deriv.iter().enumerate() {
            if row.len() != sys.alphabet.len() {
                return Err(Error::InvalidSystem(format!(
                    "derivatives of `{}` must cover every letter",
                    sys.nonterminals[x]
                )));
            }
            for t in row {
                sys.check_term(t)?;
            }
        }
        Ok(sys)
    }

    /// The term system whose derivatives are `g(x_a)` for a grammar system:
    /// every polynomial becomes a right-nested sum of monomial products.
    pub fn from_grammar(s: &GrammarSystem<K>) -> Self {
        let n = s.num_nonterminals();
        let deriv = (0..n)
            .map(|x| {
                s.alphabet()
                    .letters()
                    .map(|a| polynomial_to_term(s.var_derivative(x, a), Term::var))
                    .collect()
            })
            .collect();
        TermSystem {
            alphabet: s.alphabet().clone(),
            nonterminals: s.nonterminals().to_vec(),
            output: (0..n).map(|x| s.var_output(x).clone()).collect(),
            deriv,
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

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|x| x == name)
    }

    pub fn var_output(&self, x: usize) -> &K {
        &self.output[x]
    }

    pub fn var_derivative(&self, x: usize, a: Letter) -> &Term<K> {
        &self.deriv[x][a]
    }

    pub fn check_term(&self, t: &Term<K>) -> Result<()> {
        if let Some(x) = t.max_var() {
            if x >= self.nonterminals.len() {
                return Err(Error::UnboundVariable(format!("#{x}")));
            }
        }
        if let Some(a) = t.max_letter() {
            self.alphabet.check(a)?;
        }
        Ok(())
    }

    pub fn format_term(&self, t: &Term<K>) -> String {
        format_term(t, self.alphabet.names(), &self.nonterminals)
    }

    /// `ō(t)`.
    pub fn term_output(&self, t: &Term<K>) -> Result<K> {
        self.check_term(t)?;
        Ok(self.output_memo(t, &mut HashMap::new()))
    }

    /// `ō(t)` through a cache that persists across calls. `t` must already
    /// be known to lie in the system.
    pub fn output_cached(&self, t: &Term<K>, cache: &mut TermCache<K>) -> K {
        cache.out(self, t)
    }

    /// `t_a` through a cache that persists across calls. `t` and `a` must
    /// already be known to lie in the system.
    pub fn derivative_cached(&self, t: &Term<K>, a: Letter, cache: &mut TermCache<K>) -> Term<K> {
        if cache.ders.len() <= a {
            cache.ders.resize_with(a + 1, HashMap::new);
        }
        cache.der(self, t, a)
    }

    fn output_memo(&self, t: &Term<K>, memo: &mut HashMap<usize, K>) -> K {
        if let Some(k) = memo.get(&t.key()) {
            return k.clone();
        }
        let k = match t.kind() {
            TermKind::Const(k) => k.clone(),
            TermKind::Letter(_) => K::zero(),
            TermKind::Var(x) => self.output[*x].clone(),
            TermKind::Sum(l, r) => self.output_memo(l, memo).add(&self.output_memo(r, memo)),
            TermKind::Prod(l, r) => self.output_memo(l, memo).mul(&self.output_memo(r, memo)),
        };
        memo.insert(t.key(), k.clone());
        k
    }

    /// `t_a`, exactly as the derivative table prescribes.
    pub fn term_derivative(&self, t: &Term<K>, a: Letter) -> Result<Term<K>> {
        self.check_term(t)?;
        self.alphabet.check(a)?;
        let mut outs = HashMap::new();
        Ok(self.derivative_memo(t, a, &mut HashMap::new(), &mut outs))
    }

    fn derivative_memo(
        &self,
        t: &Term<K>,
        a: Letter,
        memo: &mut HashMap<usize, Term<K>>,
        outs: &mut HashMap<usize, K>,
    ) -> Term<K> {
        if let Some(d) = memo.get(&t.key()) {
            return d.clone();
        }
        let d = match t.kind() {
            TermKind::Const(_) => Term::zero(),
            TermKind::Letter(b) => Term::embed(crate::semiring::embed_indicator(*b == a)),
            TermKind::Var(x) => self.deriv[*x][a].clone(),
            TermKind::Sum(l, r) => Term::sum(
                self.derivative_memo(l, a, memo, outs),
                self.derivative_memo(r, a, memo, outs),
            ),
            TermKind::Prod(l, r) => {
                let la = self.derivative_memo(l, a, memo, outs);
                let ra = self.derivative_memo(r, a, memo, outs);
                let ol = self.output_memo(l, outs);
                Term::sum(Term::prod(la, r.clone()), Term::prod(Term::embed(ol), ra))
            }
        };
        memo.insert(t.key(), d.clone());
        d
    }

    pub fn word_derivative(&self, t: &Term<K>, w: &[Letter]) -> Result<Term<K>> {
        self.check_term(t)?;
        let mut cur = t.clone();
        for &a in w {
            cur = self.term_derivative(&cur, a)?;
        }
        Ok(cur)
    }

    pub fn coefficient(&self, t: &Term<K>, w: &[Letter]) -> Result<K> {
        let d = self.word_derivative(t, w)?;
        self.term_output(&d)
    }
}

/// Output and derivative tables shared across calls on one system.
///
/// Keys are structural and derivatives are interned, so equal subterms
/// reached by different words are differentiated once. Results are
/// structurally identical to those of [`TermSystem::term_derivative`].
pub struct TermCache<K> {
    outs: HashMap<Term<K>, K>,
    ders: Vec<HashMap<Term<K>, Term<K>>>,
    nodes: HashSet<Term<K>>,
}

impl<K> Default for TermCache<K> {
    fn default() -> Self {
        TermCache {
            outs: HashMap::new(),
            ders: Vec::new(),
            nodes: HashSet::new(),
        }
    }
}

impl<K: Semiring> TermCache<K> {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, t: Term<K>) -> Term<K> {
        if let Some(c) = self.nodes.get(&t) {
            return c.clone();
        }
        self.nodes.insert(t.clone());
        t
    }

    fn out(&mut self, sys: &TermSystem<K>, t: &Term<K>) -> K {
        if let Some(k) = self.outs.get(t) {
            return k.clone();
        }
        let k = match t.kind() {
            TermKind::Const(k) => k.clone(),
            TermKind::Letter(_) => K::zero(),
            TermKind::Var(x) => sys.output[*x].clone(),
            TermKind::Sum(l, r) => self.out(sys, l).add(&self.out(sys, r)),
            TermKind::Prod(l, r) => self.out(sys, l).mul(&self.out(sys, r)),
        };
        self.outs.insert(t.clone(), k.clone());
        k
    }

    fn der(&mut self, sys: &TermSystem<K>, t: &Term<K>, a: Letter) -> Term<K> {
        if let Some(d) = self.ders[a].get(t) {
            return d.clone();
        }
        let d = match t.kind() {
            TermKind::Const(_) => self.intern(Term::zero()),
            TermKind::Letter(b) => self.intern(Term::embed(crate::semiring::embed_indicator(*b == a))),
            TermKind::Var(x) => sys.deriv[*x][a].clone(),
            TermKind::Sum(l, r) => {
                let (la, ra) = (self.der(sys, l, a), self.der(sys, r, a));
                self.intern(Term::sum(la, ra))
            }
            TermKind::Prod(l, r) => {
                let la = self.der(sys, l, a);
                let ra = self.der(sys, r, a);
                let ol = self.out(sys, l);
                let k = self.intern(Term::embed(ol));
                let head = self.intern(Term::prod(la, r.clone()));
                let tail = self.intern(Term::prod(k, ra));
                self.intern(Term::sum(head, tail))
            }
        };
        self.ders[a].insert(t.clone(), d.clone());
        d
    }
}

/// An element of `Y = {x̂ | x ∈ X} ∪ {â | a ∈ A}`.
///
/// As nonterminals of the induced grammar system, `x̂` has index `x` and
/// `â` has index `|X| + a`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtendedNonterminal {
    HatVar(usize),
    HatLetter(Letter),
}

impl ExtendedNonterminal {
    pub fn index(self, num_vars: usize) -> usize {
        match self {
            ExtendedNonterminal::HatVar(x) => x,
            ExtendedNonterminal::HatLetter(a) => num_vars + a,
        }
    }

    pub fn from_index(i: usize, num_vars: usize) -> Self {
        if i < num_vars {
            ExtendedNonterminal::HatVar(i)
        } else {
            ExtendedNonterminal::HatLetter(i - num_vars)
        }
    }
}

/// `f: T_K(X) → K⟨Y⟩`: `x̄ ↦ x̂`, `ā ↦ â`, `k̄ ↦ k·ε`, sums to sums and
/// products to products.
pub fn translate_f<K: Semiring>(t: &Term<K>, num_vars: usize) -> Polynomial<K> {
    fn go<K: Semiring>(t: &Term<K>, n: usize, memo: &mut HashMap<usize, Polynomial<K>>) -> Polynomial<K> {
        if let Some(p) = memo.get(&t.key()) {
            return p.clone();
        }
        let p = match t.kind() {
            TermKind::Const(k) => Polynomial::constant(k.clone()),
            TermKind::Var(x) => Polynomial::var(ExtendedNonterminal::HatVar(*x).index(n)),
            TermKind::Letter(a) => Polynomial::var(ExtendedNonterminal::HatLetter(*a).index(n)),
            TermKind::Sum(l, r) => go(l, n, memo).add(&go(r, n, memo)),
            TermKind::Prod(l, r) => go(l, n, memo).mul(&go(r, n, memo)),
        };
        memo.insert(t.key(), p.clone());
        p
    }
    go(t, num_vars, &mut HashMap::new())
}

fn polynomial_to_term<K: Semiring>(p: &Polynomial<K>, atom: impl Fn(usize) -> Term<K>) -> Term<K> {
    let summands = p
        .iter()
        .map(|(m, k)| {
            let body = Term::prod_all(m.symbols().iter().map(|&y| atom(y)).collect());
            match (k.is_one(), m.is_empty()) {
                (true, _) => body,
                (false, true) => Term::constant(k.clone()),
                (false, false) => Term::prod(Term::constant(k.clone()), body),
            }
        })
        .collect();
    Term::sum_all(summands)
}

/// A right inverse of [`translate_f`]: `g(∅) = 0̄`, otherwise a right-nested
/// sum over the monomials in length-lexicographic order, each monomial a
/// right-nested product of `x̄`/`ā` atoms with `ε ↦ 1̄`. A coefficient
/// `k ≠ 1` becomes a leading factor `k̄`.
pub fn translate_g<K: Semiring>(p: &Polynomial<K>, num_vars: usize) -> Term<K> {
    polynomial_to_term(p, |y| match ExtendedNonterminal::from_index(y, num_vars) {
        ExtendedNonterminal::HatVar(x) => Term::var(x),
        ExtendedNonterminal::HatLetter(a) => Term::letter(a),
    })
}

/// The grammar system on `Y`: `o'(x̂) = o(x)`, `x̂_a = f(x_a)`, `o'(b̂) = 0`,
/// `b̂_a = i((b = a)?)`. Nonterminal names are `x^` and `a^`.
pub fn induced_grammar_system<K: Semiring>(s: &TermSystem<K>) -> GrammarSystem<K> {
    let n = s.num_nonterminals();
    let alphabet = s.alphabet().clone();
    let mut names: Vec<String> = s.nonterminals().iter().map(|x| format!("{x}^")).collect();
    names.extend(alphabet.names().iter().map(|a| format!("{a}^")));
    let mut output: Vec<K> = (0..n).map(|x| s.var_output(x).clone()).collect();
    output.extend(alphabet.letters().map(|_| K::zero()));
    let mut deriv: Vec<Vec<Polynomial<K>>> = (0..n)
        .map(|x| {
            alphabet
                .letters()
                .map(|a| translate_f(s.var_derivative(x, a), n))
                .collect()
        })
        .collect();
    deriv.extend(
        alphabet
            .letters()
            .map(|b| alphabet.letters().map(|a| Polynomial::indicator(b == a)).collect()),
    );
    GrammarSystem::new(alphabet, names, output, deriv).expect("induced system is well formed")
}

/// The image `{x̂}` of a variable, as a polynomial over `Y`.
pub fn hat_var<K: Semiring>(x: usize) -> Polynomial<K> {
    Polynomial::word(Monomial(vec![ExtendedNonterminal::HatVar(x).index(0)]))
}
