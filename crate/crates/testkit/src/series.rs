//! Truncated power series and reference semantics for all three
//! representations.
//!
//! Everything here works directly on coefficient vectors: sums are
//! pointwise, products are Cauchy products, and recursive definitions are
//! solved by iterating from the zero series. Guardedness (every recursive
//! occurrence sits behind a letter) means each round fixes one more length,
//! so `maxlen + 1` rounds are exact up to `maxlen`.

use std::collections::HashMap;
use std::sync::Arc;

use cfcoalg::{
    Alphabet, CFGrammar, ClosedMuExpr, GrammarSystem, Letter, MuExpr, MuKind, Polynomial, Semiring, Symbol, Term,
    TermKind, TermSystem, Word,
};

/// Index bookkeeping shared by all series of one size.
#[derive(Debug)]
struct Shape {
    num_letters: usize,
    maxlen: usize,
    words: Vec<Word>,
    /// For each word, every split `w = u v` as `(index u, index v)`.
    splits: Vec<Vec<(usize, usize)>>,
}

impl Shape {
    fn new(num_letters: usize, maxlen: usize) -> Self {
        let mut words: Vec<Word> = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..maxlen {
            layer = layer
                .iter()
                .flat_map(|w| {
                    (0..num_letters).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
            words.extend(layer.iter().cloned());
        }
        let mut shape = Shape {
            num_letters,
            maxlen,
            words,
            splits: Vec::new(),
        };
        shape.splits = shape
            .words
            .iter()
            .map(|w| {
                (0..=w.len())
                    .map(|i| (shape.index(&w[..i]), shape.index(&w[i..])))
                    .collect()
            })
            .collect();
        shape
    }

    fn index(&self, w: &[Letter]) -> usize {
        let n = self.num_letters;
        let mut base = 0;
        let mut width = 1;
        for _ in 0..w.len() {
            base += width;
            width *= n;
        }
        base + w.iter().fold(0, |acc, &a| acc * n + a)
    }
}

/// Coefficients of all words up to a fixed length, in length-lex order.
#[derive(Clone, Debug)]
pub struct Series<K> {
    shape: Arc<Shape>,
    coeffs: Vec<K>,
}

impl<K: Semiring> PartialEq for Series<K> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<K: Semiring> Series<K> {
    fn filled(shape: &Arc<Shape>, k: K) -> Self {
        Series {
            shape: shape.clone(),
            coeffs: vec![k; shape.words.len()],
        }
    }

    fn zero_like(shape: &Arc<Shape>) -> Self {
        Self::filled(shape, K::zero())
    }

    fn constant_like(shape: &Arc<Shape>, k: K) -> Self {
        let mut s = Self::zero_like(shape);
        s.coeffs[0] = k;
        s
    }

    fn letter_like(shape: &Arc<Shape>, a: Letter) -> Self {
        let mut s = Self::zero_like(shape);
        if shape.maxlen > 0 {
            s.coeffs[1 + a] = K::one();
        }
        s
    }

    pub fn num_letters(&self) -> usize {
        self.shape.num_letters
    }

    pub fn maxlen(&self) -> usize {
        self.shape.maxlen
    }

    pub fn get(&self, w: &[Letter]) -> K {
        assert!(w.len() <= self.shape.maxlen, "word longer than the truncation");
        self.coeffs[self.shape.index(w)].clone()
    }

    /// Words with nonzero coefficient, in length-lex order.
    pub fn support(&self) -> Vec<(Word, K)> {
        self.shape
            .words
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, k)| !k.is_zero())
            .map(|(w, k)| (w.clone(), k.clone()))
            .collect()
    }

    /// Every word with its coefficient, in length-lex order.
    pub fn entries(&self) -> impl Iterator<Item = (&Word, &K)> {
        self.shape.words.iter().zip(&self.coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        Series {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let coeffs = self
            .shape
            .splits
            .iter()
            .map(|splits| {
                let mut acc = K::zero();
                for &(u, v) in splits {
                    let l = &self.coeffs[u];
                    if !l.is_zero() {
                        let r = &other.coeffs[v];
                        if !r.is_zero() {
                            acc = acc.add(&l.mul(r));
                        }
                    }
                }
                acc
            })
            .collect();
        Series {
            shape: self.shape.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        Series {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| k.mul(c)).collect(),
        }
    }

    /// `o + Σ_a a · ders[a]`.
    fn from_behaviour(shape: &Arc<Shape>, o: K, ders: &[Self]) -> Self {
        let mut s = Self::constant_like(shape, o);
        for (i, w) in shape.words.iter().enumerate().skip(1) {
            s.coeffs[i] = ders[w[0]].coeffs[shape.index(&w[1..])].clone();
        }
        s
    }
}

/// Series of every nonterminal of a weighted grammar system.
pub fn grammar_series<K: Semiring>(system: &GrammarSystem<K>, maxlen: usize) -> Vec<Series<K>> {
    let shape = Arc::new(Shape::new(system.alphabet().len(), maxlen));
    let n = system.num_nonterminals();
    let mut current = vec![Series::zero_like(&shape); n];
    for _ in 0..=maxlen {
        current = (0..n)
            .map(|x| {
                let ders: Vec<Series<K>> = system
                    .alphabet()
                    .letters()
                    .map(|a| eval_polynomial(system.var_derivative(x, a), &current, &shape))
                    .collect();
                Series::from_behaviour(&shape, system.var_output(x).clone(), &ders)
            })
            .collect();
    }
    current
}

fn eval_polynomial<K: Semiring>(p: &Polynomial<K>, vars: &[Series<K>], shape: &Arc<Shape>) -> Series<K> {
    let mut acc = Series::zero_like(shape);
    for (m, k) in p.iter() {
        let mut prod = Series::constant_like(shape, k.clone());
        for &y in m.symbols() {
            prod = prod.mul(&vars[y]);
        }
        acc = acc.add(&prod);
    }
    acc
}

/// Series of a polynomial state of a grammar system.
pub fn polynomial_series<K: Semiring>(system: &GrammarSystem<K>, p: &Polynomial<K>, maxlen: usize) -> Series<K> {
    let vars = grammar_series(system, maxlen);
    let shape = match vars.first() {
        Some(s) => s.shape.clone(),
        None => Arc::new(Shape::new(system.alphabet().len(), maxlen)),
    };
    eval_polynomial(p, &vars, &shape)
}

/// Language of a GNF grammar, read production by production.
pub fn cfg_series<K: Semiring>(grammar: &CFGrammar, maxlen: usize) -> Vec<Series<K>> {
    let shape = Arc::new(Shape::new(grammar.alphabet().len(), maxlen));
    let n = grammar.nonterminals().len();
    let mut current = vec![Series::zero_like(&shape); n];
    for _ in 0..=maxlen {
        current = (0..n)
            .map(|x| {
                let mut acc = Series::zero_like(&shape);
                for body in grammar.productions(x) {
                    let mut prod = Series::constant_like(&shape, K::one());
                    for sym in body {
                        let factor = match *sym {
                            Symbol::Letter(a) => Series::letter_like(&shape, a),
                            Symbol::Nonterminal(y) => current[y].clone(),
                        };
                        prod = prod.mul(&factor);
                    }
                    acc = acc.add(&prod);
                }
                acc
            })
            .collect();
    }
    current
}

fn eval_term<K: Semiring>(t: &Term<K>, vars: &[Series<K>], shape: &Arc<Shape>) -> Series<K> {
    match t.kind() {
        TermKind::Const(k) => Series::constant_like(shape, k.clone()),
        TermKind::Letter(a) => Series::letter_like(shape, *a),
        TermKind::Var(x) => vars[*x].clone(),
        TermKind::Sum(l, r) => eval_term(l, vars, shape).add(&eval_term(r, vars, shape)),
        TermKind::Prod(l, r) => eval_term(l, vars, shape).mul(&eval_term(r, vars, shape)),
    }
}

pub fn term_system_series<K: Semiring>(system: &TermSystem<K>, maxlen: usize) -> Vec<Series<K>> {
    let shape = Arc::new(Shape::new(system.alphabet().len(), maxlen));
    let n = system.num_nonterminals();
    let mut current = vec![Series::zero_like(&shape); n];
    for _ in 0..=maxlen {
        current = (0..n)
            .map(|x| {
                let ders: Vec<Series<K>> = system
                    .alphabet()
                    .letters()
                    .map(|a| eval_term(system.var_derivative(x, a), &current, &shape))
                    .collect();
                Series::from_behaviour(&shape, system.var_output(x).clone(), &ders)
            })
            .collect();
    }
    current
}

/// Series of a term over a term system.
pub fn term_series<K: Semiring>(system: &TermSystem<K>, t: &Term<K>, maxlen: usize) -> Series<K> {
    let vars = term_system_series(system, maxlen);
    let shape = match vars.first() {
        Some(s) => s.shape.clone(),
        None => Arc::new(Shape::new(system.alphabet().len(), maxlen)),
    };
    eval_term(t, &vars, &shape)
}

struct MuEval<K> {
    shape: Arc<Shape>,
    /// Closed subexpressions by node address; the key expression is kept
    /// alive so addresses are not reused.
    closed: HashMap<usize, (MuExpr<K>, Series<K>)>,
}

impl<K: Semiring> MuEval<K> {
    fn eval(&mut self, e: &MuExpr<K>, env: &[(&str, Series<K>)]) -> Series<K> {
        let key = e.is_closed().then(|| addr(e));
        if let Some(k) = key {
            if let Some((_, s)) = self.closed.get(&k) {
                return s.clone();
            }
        }
        let s = match e.kind() {
            MuKind::Const(k) => Series::constant_like(&self.shape, k.clone()),
            MuKind::Letter(a) => Series::letter_like(&self.shape, *a),
            MuKind::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| *y == &**x)
                .map(|(_, s)| s.clone())
                .expect("closed input"),
            MuKind::Sum(l, r) => self.eval(l, env).add(&self.eval(r, env)),
            MuKind::Prod(l, r) => self.eval(l, env).mul(&self.eval(r, env)),
            MuKind::Fix(x, body) => {
                let mut approx = Series::zero_like(&self.shape);
                for _ in 0..=self.shape.maxlen {
                    let mut inner: Vec<(&str, Series<K>)> = env.to_vec();
                    inner.push((x, approx));
                    approx = self.eval(body, &inner);
                }
                approx
            }
        };
        if let Some(k) = key {
            self.closed.insert(k, (e.clone(), s.clone()));
        }
        s
    }
}

fn addr<K: Semiring>(e: &MuExpr<K>) -> usize {
    e.kind() as *const MuKind<K> as usize
}

/// Series of a closed μ-expression, as the unique solution of each binder.
pub fn mu_series<K: Semiring>(e: &ClosedMuExpr<K>, alphabet: &Alphabet, maxlen: usize) -> Series<K> {
    let mut ev = MuEval {
        shape: Arc::new(Shape::new(alphabet.len(), maxlen)),
        closed: HashMap::new(),
    };
    ev.eval(e.expr(), &[])
}
