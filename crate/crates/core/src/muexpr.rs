//! Closed guarded μ-expressions.
//!
//! `μx.g` is a unique-fixed-point binder whose body must be guarded:
//! `g ::= ā × t | k̄ | g + g`. The derivative of `μx.u` is the derivative of
//! its unfolding `u[μx.u/x]`.
//!
//! Products short-circuit on a zero left output: `o(u × v)` does not look at
//! `v` when `o(u) = 0`, and `(u × v)_a` becomes `(u_a × v) + 0̄` without
//! computing `v_a`. The second summand of the table is `0̄ × v_a ∼ 0̄`, so the
//! result is bisimilar to the table's, and the rewrite is what makes the
//! recursion terminate on guarded bodies: in `ā × t` the guard has output
//! zero, so `t` is never unfolded further.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::semiring::{embed_indicator, Semiring};
use crate::terms::{format_constant, Term, TermKind, TermSystem};

pub type Name = Arc<str>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum MuKind<K> {
    Const(K),
    Letter(Letter),
    Var(Name),
    Sum(MuExpr<K>, MuExpr<K>),
    Prod(MuExpr<K>, MuExpr<K>),
    Fix(Name, MuExpr<K>),
}

struct MuNode<K> {
    kind: MuKind<K>,
    hash: u64,
    /// Sorted free variables.
    free: Arc<[Name]>,
}

/// A possibly open μ-expression. Cheap to clone; subexpressions are shared.
pub struct MuExpr<K>(Arc<MuNode<K>>);

impl<K> Clone for MuExpr<K> {
    fn clone(&self) -> Self {
        MuExpr(Arc::clone(&self.0))
    }
}

fn merge_free(a: &Arc<[Name]>, b: &Arc<[Name]>) -> Arc<[Name]> {
    if b.is_empty() || Arc::ptr_eq(a, b) {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let set: BTreeSet<&Name> = a.iter().chain(b.iter()).collect();
    set.into_iter().cloned().collect()
}

impl<K: Semiring> MuExpr<K> {
    fn build(kind: MuKind<K>) -> Self {
        let mut h = DefaultHasher::new();
        let free: Arc<[Name]> = match &kind {
            MuKind::Const(k) => {
                (0u8, k).hash(&mut h);
                Arc::from([])
            }
            MuKind::Letter(a) => {
                (1u8, a).hash(&mut h);
                Arc::from([])
            }
            MuKind::Var(x) => {
                (2u8, x).hash(&mut h);
                Arc::from([x.clone()])
            }
            MuKind::Sum(l, r) => {
                (3u8, l.0.hash, r.0.hash).hash(&mut h);
                merge_free(&l.0.free, &r.0.free)
            }
            MuKind::Prod(l, r) => {
                (4u8, l.0.hash, r.0.hash).hash(&mut h);
                merge_free(&l.0.free, &r.0.free)
            }
            MuKind::Fix(x, b) => {
                (5u8, x, b.0.hash).hash(&mut h);
                if b.0.free.contains(x) {
                    b.0.free.iter().filter(|y| *y != x).cloned().collect()
                } else {
                    b.0.free.clone()
                }
            }
        };
        MuExpr(Arc::new(MuNode {
            kind,
            hash: h.finish(),
            free,
        }))
    }

    pub fn constant(k: K) -> Self {
        Self::build(MuKind::Const(k))
    }

    pub fn zero() -> Self {
        Self::constant(K::zero())
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn letter(a: Letter) -> Self {
        Self::build(MuKind::Letter(a))
    }

    pub fn var(x: impl Into<Name>) -> Self {
        Self::build(MuKind::Var(x.into()))
    }

    pub fn sum(l: Self, r: Self) -> Self {
        Self::build(MuKind::Sum(l, r))
    }

    pub fn prod(l: Self, r: Self) -> Self {
        Self::build(MuKind::Prod(l, r))
    }

    pub fn fix(x: impl Into<Name>, body: Self) -> Self {
        Self::build(MuKind::Fix(x.into(), body))
    }

    /// Right-nested sum; `0̄` when empty.
    pub fn sum_all(items: Vec<Self>) -> Self {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Self::zero(),
            Some(last) => it.fold(last, |acc, t| Self::sum(t, acc)),
        }
    }

    pub fn kind(&self) -> &MuKind<K> {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.free
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn is_compound(&self) -> bool {
        matches!(self.kind(), MuKind::Sum(..) | MuKind::Prod(..) | MuKind::Fix(..))
    }

    pub fn size(&self) -> usize {
        match self.kind() {
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => 1 + l.size() + r.size(),
            MuKind::Fix(_, b) => 1 + b.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self.kind() {
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => 1 + l.depth().max(r.depth()),
            MuKind::Fix(_, b) => 1 + b.depth(),
            _ => 1,
        }
    }

    pub fn max_letter(&self) -> Option<Letter> {
        match self.kind() {
            MuKind::Letter(a) => Some(*a),
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => l.max_letter().max(r.max_letter()),
            MuKind::Fix(_, b) => b.max_letter(),
            _ => None,
        }
    }

    /// Binder names in preorder, left to right, with repetitions.
    pub fn binders(&self) -> Vec<Name> {
        fn go<K: Semiring>(e: &MuExpr<K>, out: &mut Vec<Name>) {
            match e.kind() {
                MuKind::Sum(l, r) | MuKind::Prod(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                MuKind::Fix(x, b) => {
                    out.push(x.clone());
                    go(b, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    fn all_names(&self, out: &mut HashSet<Name>) {
        match self.kind() {
            MuKind::Var(x) => {
                out.insert(x.clone());
            }
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => {
                l.all_names(out);
                r.all_names(out);
            }
            MuKind::Fix(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            _ => {}
        }
    }

    /// `t[r/x]`: replaces free occurrences of `x`. No renaming is performed,
    /// so `r` should be closed.
    pub fn substitute(&self, x: &str, r: &Self) -> Self {
        fn go<K: Semiring>(e: &MuExpr<K>, x: &str, r: &MuExpr<K>, memo: &mut HashMap<usize, MuExpr<K>>) -> MuExpr<K> {
            if !e.0.free.iter().any(|y| &**y == x) {
                return e.clone();
            }
            if let Some(d) = memo.get(&e.key()) {
                return d.clone();
            }
            let d = match e.kind() {
                MuKind::Var(_) => r.clone(),
                MuKind::Sum(a, b) => MuExpr::sum(go(a, x, r, memo), go(b, x, r, memo)),
                MuKind::Prod(a, b) => MuExpr::prod(go(a, x, r, memo), go(b, x, r, memo)),
                MuKind::Fix(y, b) => MuExpr::fix(y.clone(), go(b, x, r, memo)),
                MuKind::Const(_) | MuKind::Letter(_) => e.clone(),
            };
            memo.insert(e.key(), d.clone());
            d
        }
        go(self, x, r, &mut HashMap::new())
    }

    /// `u[μx.u/x]` for `self = μx.u`; other expressions are returned as is.
    pub fn unfold(&self) -> Self {
        match self.kind() {
            MuKind::Fix(x, body) => body.substitute(x, self),
            _ => self.clone(),
        }
    }

    /// Fails with `Unguarded` naming the first binder whose body is not
    /// guarded.
    pub fn check_binders(&self) -> Result<()> {
        match self.kind() {
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => {
                l.check_binders()?;
                r.check_binders()
            }
            MuKind::Fix(x, b) => {
                if !check_guarded(b) {
                    return Err(Error::Unguarded(x.to_string()));
                }
                b.check_binders()
            }
            _ => Ok(()),
        }
    }

    pub fn format(&self, letters: &[String]) -> String {
        format_mu(self, letters)
    }
}

impl<K: PartialEq> PartialEq for MuExpr<K> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl<K: Eq> Eq for MuExpr<K> {}

impl<K: PartialOrd> PartialOrd for MuExpr<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Some(std::cmp::Ordering::Equal);
        }
        self.0.kind.partial_cmp(&other.0.kind)
    }
}

impl<K: Ord> Ord for MuExpr<K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl<K> Hash for MuExpr<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl<K: fmt::Debug> fmt::Debug for MuExpr<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.kind.fmt(f)
    }
}

/// True iff `e` matches `g ::= ā × t | k̄ | g + g`.
pub fn check_guarded<K: Semiring>(e: &MuExpr<K>) -> bool {
    match e.kind() {
        MuKind::Const(_) => true,
        MuKind::Sum(l, r) => check_guarded(l) && check_guarded(r),
        MuKind::Prod(l, _) => matches!(l.kind(), MuKind::Letter(_)),
        _ => false,
    }
}

/// Fully parenthesized rendering. Compound children, including binders, are
/// wrapped; the top level is not.
pub fn format_mu<K: Semiring>(e: &MuExpr<K>, letters: &[String]) -> String {
    fn go<K: Semiring>(e: &MuExpr<K>, letters: &[String], out: &mut String) {
        match e.kind() {
            MuKind::Const(k) => out.push_str(&format_constant(k)),
            MuKind::Letter(a) => out.push_str(&letters[*a]),
            MuKind::Var(x) => out.push_str(x),
            MuKind::Sum(l, r) => {
                child(l, letters, out);
                out.push_str(" + ");
                child(r, letters, out);
            }
            MuKind::Prod(l, r) => {
                child(l, letters, out);
                out.push_str(" * ");
                child(r, letters, out);
            }
            MuKind::Fix(x, b) => {
                out.push_str("mu ");
                out.push_str(x);
                out.push_str(" . ");
                child(b, letters, out);
            }
        }
    }
    fn child<K: Semiring>(e: &MuExpr<K>, letters: &[String], out: &mut String) {
        if e.is_compound() {
            out.push('(');
            go(e, letters, out);
            out.push(')');
        } else {
            go(e, letters, out);
        }
    }
    let mut out = String::new();
    go(e, letters, &mut out);
    out
}

/// A closed μ-expression all of whose binders have guarded bodies.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClosedMuExpr<K>(MuExpr<K>);

impl<K: Semiring> ClosedMuExpr<K> {
    pub fn new(e: MuExpr<K>) -> Result<Self> {
        if !e.is_closed() {
            return Err(Error::NotClosed(e.free_vars().join(", ")));
        }
        e.check_binders()?;
        Ok(ClosedMuExpr(e))
    }

    pub fn expr(&self) -> &MuExpr<K> {
        &self.0
    }

    pub fn into_expr(self) -> MuExpr<K> {
        self.0
    }

    pub fn output(&self) -> K {
        mu_output(&self.0, &mut HashMap::new())
    }

    pub fn derivative(&self, a: Letter) -> Self {
        let mut outs = HashMap::new();
        ClosedMuExpr(mu_derivative(&self.0, a, &mut HashMap::new(), &mut outs))
    }

    pub fn word_derivative(&self, w: &[Letter]) -> Self {
        w.iter().fold(self.clone(), |e, &a| e.derivative(a))
    }

    pub fn coefficient(&self, w: &[Letter]) -> K {
        self.word_derivative(w).output()
    }

    /// `u[μx.u/x]` when the expression is a binder.
    pub fn unfold(&self) -> Self {
        ClosedMuExpr(self.0.unfold())
    }

    /// Fails with `UnknownLetter` if a letter lies outside `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        match self.0.max_letter() {
            Some(a) => alphabet.check(a),
            None => Ok(()),
        }
    }

    pub fn format(&self, letters: &[String]) -> String {
        format_mu(&self.0, letters)
    }
}

/// Memo keyed by node address. Each entry holds its key so the address
/// cannot be freed and reused while the table lives.
type Memo<K, V> = HashMap<usize, (MuExpr<K>, V)>;

/// Output and derivative tables that outlive a single call.
///
/// Entries are keyed structurally and every derivative is interned, so
/// equal subexpressions arising at different words share one node and are
/// differentiated once. Results are structurally identical to those of
/// [`ClosedMuExpr::derivative`].
pub struct MuCache<K> {
    outs: HashMap<MuExpr<K>, K>,
    ders: Vec<HashMap<MuExpr<K>, MuExpr<K>>>,
    nodes: HashSet<MuExpr<K>>,
}

impl<K> Default for MuCache<K> {
    fn default() -> Self {
        MuCache {
            outs: HashMap::new(),
            ders: Vec::new(),
            nodes: HashSet::new(),
        }
    }
}

impl<K: Semiring> MuCache<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn output(&mut self, e: &ClosedMuExpr<K>) -> K {
        self.out(&e.0)
    }

    pub fn derivative(&mut self, e: &ClosedMuExpr<K>, a: Letter) -> ClosedMuExpr<K> {
        if self.ders.len() <= a {
            self.ders.resize_with(a + 1, HashMap::new);
        }
        ClosedMuExpr(self.der(&e.0, a))
    }

    /// Number of memoized entries, for diagnostics.
    pub fn len(&self) -> usize {
        self.outs.len() + self.ders.iter().map(HashMap::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn intern(&mut self, e: MuExpr<K>) -> MuExpr<K> {
        if let Some(c) = self.nodes.get(&e) {
            return c.clone();
        }
        self.nodes.insert(e.clone());
        e
    }

    fn out(&mut self, e: &MuExpr<K>) -> K {
        if let Some(k) = self.outs.get(e) {
            return k.clone();
        }
        let k = match e.kind() {
            MuKind::Const(k) => k.clone(),
            MuKind::Letter(_) => K::zero(),
            MuKind::Var(x) => unreachable!("free variable `{x}` in a closed expression"),
            MuKind::Sum(l, r) => self.out(l).add(&self.out(r)),
            MuKind::Prod(l, r) => {
                let ol = self.out(l);
                if ol.is_zero() {
                    ol
                } else {
                    ol.mul(&self.out(r))
                }
            }
            MuKind::Fix(..) => self.out(&e.unfold()),
        };
        self.outs.insert(e.clone(), k.clone());
        k
    }

    fn der(&mut self, e: &MuExpr<K>, a: Letter) -> MuExpr<K> {
        if let Some(d) = self.ders[a].get(e) {
            return d.clone();
        }
        let d = match e.kind() {
            MuKind::Const(_) => self.intern(MuExpr::zero()),
            MuKind::Letter(b) => self.intern(MuExpr::constant(embed_indicator(*b == a))),
            MuKind::Var(x) => unreachable!("free variable `{x}` in a closed expression"),
            MuKind::Sum(l, r) => {
                let (la, ra) = (self.der(l, a), self.der(r, a));
                self.intern(MuExpr::sum(la, ra))
            }
            MuKind::Prod(l, r) => {
                let la = self.der(l, a);
                let ol = self.out(l);
                let tail = if ol.is_zero() {
                    self.intern(MuExpr::zero())
                } else {
                    let k = self.intern(MuExpr::constant(ol));
                    let ra = self.der(r, a);
                    self.intern(MuExpr::prod(k, ra))
                };
                let head = self.intern(MuExpr::prod(la, r.clone()));
                self.intern(MuExpr::sum(head, tail))
            }
            MuKind::Fix(..) => self.der(&e.unfold(), a),
        };
        self.ders[a].insert(e.clone(), d.clone());
        d
    }
}

fn mu_output<K: Semiring>(e: &MuExpr<K>, memo: &mut Memo<K, K>) -> K {
    if let Some((_, k)) = memo.get(&e.key()) {
        return k.clone();
    }
    let k = match e.kind() {
        MuKind::Const(k) => k.clone(),
        MuKind::Letter(_) => K::zero(),
        MuKind::Var(x) => unreachable!("free variable `{x}` in a closed expression"),
        MuKind::Sum(l, r) => mu_output(l, memo).add(&mu_output(r, memo)),
        MuKind::Prod(l, r) => {
            let ol = mu_output(l, memo);
            if ol.is_zero() {
                ol
            } else {
                ol.mul(&mu_output(r, memo))
            }
        }
        // Guarded bodies never reach the bound variable: every occurrence
        // sits behind a letter guard with output zero.
        MuKind::Fix(..) => mu_output(&e.unfold(), memo),
    };
    memo.insert(e.key(), (e.clone(), k.clone()));
    k
}

fn mu_derivative<K: Semiring>(
    e: &MuExpr<K>,
    a: Letter,
    memo: &mut Memo<K, MuExpr<K>>,
    outs: &mut Memo<K, K>,
) -> MuExpr<K> {
    if let Some((_, d)) = memo.get(&e.key()) {
        return d.clone();
    }
    let d = match e.kind() {
        MuKind::Const(_) => MuExpr::zero(),
        MuKind::Letter(b) => MuExpr::constant(embed_indicator(*b == a)),
        MuKind::Var(x) => unreachable!("free variable `{x}` in a closed expression"),
        MuKind::Sum(l, r) => MuExpr::sum(mu_derivative(l, a, memo, outs), mu_derivative(r, a, memo, outs)),
        MuKind::Prod(l, r) => {
            let la = mu_derivative(l, a, memo, outs);
            let ol = mu_output(l, outs);
            let tail = if ol.is_zero() {
                MuExpr::zero()
            } else {
                MuExpr::prod(MuExpr::constant(ol), mu_derivative(r, a, memo, outs))
            };
            MuExpr::sum(MuExpr::prod(la, r.clone()), tail)
        }
        MuKind::Fix(..) => mu_derivative(&e.unfold(), a, memo, outs),
    };
    memo.insert(e.key(), (e.clone(), d.clone()));
    d
}

/// A map from variables to guarded expressions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MuAssignment<K> {
    names: Vec<String>,
    images: Vec<MuExpr<K>>,
}

impl<K: Semiring> MuAssignment<K> {
    pub fn new(names: Vec<String>, images: Vec<MuExpr<K>>) -> Result<Self> {
        if names.len() != images.len() {
            return Err(Error::InvalidSystem("one image per variable is required".into()));
        }
        for (x, g) in names.iter().zip(&images) {
            if !check_guarded(g) {
                return Err(Error::Unguarded(x.clone()));
            }
        }
        Ok(MuAssignment { names, images })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.names.iter().position(|y| y == x)
    }

    pub fn get(&self, x: &str) -> Option<&MuExpr<K>> {
        self.index_of(x).map(|i| &self.images[i])
    }
}

/// Embeds a μ-free term, naming variables by `names`.
pub fn term_to_mu<K: Semiring>(t: &Term<K>, names: &[String]) -> MuExpr<K> {
    fn go<K: Semiring>(t: &Term<K>, names: &[Name]) -> MuExpr<K> {
        match t.kind() {
            TermKind::Const(k) => MuExpr::constant(k.clone()),
            TermKind::Letter(a) => MuExpr::letter(*a),
            TermKind::Var(x) => MuExpr::var(names[*x].clone()),
            TermKind::Sum(l, r) => MuExpr::sum(go(l, names), go(r, names)),
            TermKind::Prod(l, r) => MuExpr::prod(go(l, names), go(r, names)),
        }
    }
    let names: Vec<Name> = names.iter().map(|s| Name::from(s.as_str())).collect();
    go(t, &names)
}

/// `mu(x) = j(o(x)) + Σ_{a∈A} (ā × x_a)`, the sum right-nested in alphabet
/// order.
pub fn canonical_assignment<K: Semiring>(s: &TermSystem<K>) -> MuAssignment<K> {
    let names = s.nonterminals().to_vec();
    let images = (0..s.num_nonterminals())
        .map(|x| {
            let guards = s
                .alphabet()
                .letters()
                .map(|a| MuExpr::prod(MuExpr::letter(a), term_to_mu(s.var_derivative(x, a), &names)))
                .collect();
            MuExpr::sum(MuExpr::constant(s.var_output(x).clone()), MuExpr::sum_all(guards))
        })
        .collect();
    MuAssignment { names, images }
}

/// A deterministic closure of `t`: each variable `x` not bound on the path
/// from the root becomes `μx.c` with `c` the closure of `assignment(x)`
/// relative to the extended bound set. Bound occurrences are left alone.
pub fn close<K: Semiring>(t: &MuExpr<K>, assignment: &MuAssignment<K>) -> Result<ClosedMuExpr<K>> {
    type Memo<K> = HashMap<(usize, BTreeSet<usize>), MuExpr<K>>;
    fn go<K: Semiring>(
        e: &MuExpr<K>,
        bound: &BTreeSet<usize>,
        asg: &MuAssignment<K>,
        memo: &mut Memo<K>,
    ) -> Result<MuExpr<K>> {
        if e.is_closed() {
            return Ok(e.clone());
        }
        Ok(match e.kind() {
            MuKind::Var(x) => {
                let i = asg.index_of(x).ok_or_else(|| Error::UnknownVariable(x.to_string()))?;
                if bound.contains(&i) {
                    return Ok(e.clone());
                }
                let key = (i, bound.clone());
                if let Some(c) = memo.get(&key) {
                    return Ok(c.clone());
                }
                let mut inner = bound.clone();
                inner.insert(i);
                let body = go(&asg.images[i], &inner, asg, memo)?;
                let c = MuExpr::fix(x.clone(), body);
                memo.insert(key, c.clone());
                c
            }
            MuKind::Sum(l, r) => MuExpr::sum(go(l, bound, asg, memo)?, go(r, bound, asg, memo)?),
            MuKind::Prod(l, r) => MuExpr::prod(go(l, bound, asg, memo)?, go(r, bound, asg, memo)?),
            MuKind::Fix(x, b) => {
                let mut inner = bound.clone();
                if let Some(i) = asg.index_of(x) {
                    inner.insert(i);
                }
                MuExpr::fix(x.clone(), go(b, &inner, asg, memo)?)
            }
            MuKind::Const(_) | MuKind::Letter(_) => e.clone(),
        })
    }
    let closed = go(t, &BTreeSet::new(), assignment, &mut HashMap::new())?;
    ClosedMuExpr::new(closed)
}

/// Closure of the variable `x` of a term system under its canonical
/// assignment.
pub fn close_var<K: Semiring>(s: &TermSystem<K>, x: usize) -> ClosedMuExpr<K> {
    let asg = canonical_assignment(s);
    close(&MuExpr::var(s.nonterminals()[x].as_str()), &asg).expect("canonical assignment covers every variable")
}

/// Renames binders so that none repeats: the first binder of each name keeps
/// it, later ones become `x~1`, `x~2`, … in preorder, skipping names that
/// already occur. Occurrences are retargeted to their binder.
pub fn alpha_unique<K: Semiring>(e: &ClosedMuExpr<K>) -> ClosedMuExpr<K> {
    struct Renamer {
        used: HashSet<Name>,
        seen: HashSet<Name>,
        counter: HashMap<Name, usize>,
    }
    impl Renamer {
        fn fresh(&mut self, x: &Name) -> Name {
            if self.seen.insert(x.clone()) {
                return x.clone();
            }
            let n = self.counter.entry(x.clone()).or_insert(0);
            loop {
                *n += 1;
                let cand: Name = format!("{x}~{n}").into();
                if !self.used.contains(&cand) {
                    self.used.insert(cand.clone());
                    self.seen.insert(cand.clone());
                    return cand;
                }
            }
        }
    }
    fn go<K: Semiring>(e: &MuExpr<K>, env: &mut Vec<(Name, Name)>, r: &mut Renamer) -> MuExpr<K> {
        match e.kind() {
            MuKind::Var(x) => match env.iter().rev().find(|(from, _)| from == x) {
                Some((_, to)) if to != x => MuExpr::var(to.clone()),
                _ => e.clone(),
            },
            MuKind::Sum(l, rr) => {
                let l2 = go(l, env, r);
                MuExpr::sum(l2, go(rr, env, r))
            }
            MuKind::Prod(l, rr) => {
                let l2 = go(l, env, r);
                MuExpr::prod(l2, go(rr, env, r))
            }
            MuKind::Fix(x, b) => {
                let to = r.fresh(x);
                env.push((x.clone(), to.clone()));
                let b2 = go(b, env, r);
                env.pop();
                MuExpr::fix(to, b2)
            }
            MuKind::Const(_) | MuKind::Letter(_) => e.clone(),
        }
    }
    let binders = e.expr().binders();
    let distinct: HashSet<&Name> = binders.iter().collect();
    if distinct.len() == binders.len() {
        return e.clone();
    }
    let mut used = HashSet::new();
    e.expr().all_names(&mut used);
    let mut r = Renamer {
        used,
        seen: HashSet::new(),
        counter: HashMap::new(),
    };
    ClosedMuExpr(go(e.expr(), &mut Vec::new(), &mut r))
}

/// `mp`: collapses every binder to its variable; homomorphic elsewhere.
/// `vars` gives the index of each variable name.
pub fn mu_prune<K: Semiring>(e: &MuExpr<K>, vars: &HashMap<Name, usize>) -> Result<Term<K>> {
    let var = |x: &Name| {
        vars.get(x)
            .map(|&i| Term::var(i))
            .ok_or_else(|| Error::UnboundVariable(x.to_string()))
    };
    Ok(match e.kind() {
        MuKind::Const(k) => Term::constant(k.clone()),
        MuKind::Letter(a) => Term::letter(*a),
        MuKind::Var(x) => var(x)?,
        MuKind::Sum(l, r) => Term::sum(mu_prune(l, vars)?, mu_prune(r, vars)?),
        MuKind::Prod(l, r) => Term::prod(mu_prune(l, vars)?, mu_prune(r, vars)?),
        MuKind::Fix(x, _) => var(x)?,
    })
}

fn guarded_output<K: Semiring>(t: &Term<K>, binder: &str) -> Result<K> {
    match t.kind() {
        TermKind::Const(k) => Ok(k.clone()),
        TermKind::Sum(l, r) => Ok(guarded_output(l, binder)?.add(&guarded_output(r, binder)?)),
        TermKind::Prod(l, _) if matches!(l.kind(), TermKind::Letter(_)) => Ok(K::zero()),
        _ => Err(Error::Unguarded(binder.to_owned())),
    }
}

fn is_zero_const<K: Semiring>(t: &Term<K>) -> bool {
    matches!(t.kind(), TermKind::Const(k) if k.is_zero())
}

fn guarded_derivative<K: Semiring>(t: &Term<K>, a: Letter, binder: &str) -> Result<Term<K>> {
    match t.kind() {
        TermKind::Const(_) => Ok(Term::zero()),
        // `0̄ + t ∼ t`: zero summands are dropped.
        TermKind::Sum(l, r) => {
            let (dl, dr) = (guarded_derivative(l, a, binder)?, guarded_derivative(r, a, binder)?);
            Ok(match (is_zero_const(&dl), is_zero_const(&dr)) {
                (true, _) => dr,
                (false, true) => dl,
                (false, false) => Term::sum(dl, dr),
            })
        }
        TermKind::Prod(l, v) => match l.kind() {
            TermKind::Letter(b) if *b == a => Ok(v.clone()),
            TermKind::Letter(_) => Ok(Term::zero()),
            _ => Err(Error::Unguarded(binder.to_owned())),
        },
        _ => Err(Error::Unguarded(binder.to_owned())),
    }
}

/// Turns an α-unique closed expression into a term system on its bound
/// variables (in preorder) plus the start term `mp(e)`.
pub fn deconstruct<K: Semiring>(e: &ClosedMuExpr<K>, alphabet: &Alphabet) -> Result<(TermSystem<K>, Term<K>)> {
    e.check_alphabet(alphabet)?;
    let binders = e.expr().binders();
    let mut vars: HashMap<Name, usize> = HashMap::new();
    for (i, x) in binders.iter().enumerate() {
        if vars.insert(x.clone(), i).is_some() {
            return Err(Error::DuplicateBinder(x.to_string()));
        }
    }
    let mut bodies: Vec<Option<MuExpr<K>>> = vec![None; binders.len()];
    fn collect<K: Semiring>(e: &MuExpr<K>, vars: &HashMap<Name, usize>, out: &mut Vec<Option<MuExpr<K>>>) {
        match e.kind() {
            MuKind::Sum(l, r) | MuKind::Prod(l, r) => {
                collect(l, vars, out);
                collect(r, vars, out);
            }
            MuKind::Fix(x, b) => {
                out[vars[x]] = Some(b.clone());
                collect(b, vars, out);
            }
            _ => {}
        }
    }
    collect(e.expr(), &vars, &mut bodies);
    let mut output = Vec::with_capacity(binders.len());
    let mut deriv = Vec::with_capacity(binders.len());
    for (x, body) in binders.iter().zip(bodies) {
        let psi = mu_prune(&body.expect("every binder has a body"), &vars)?;
        output.push(guarded_output(&psi, x)?);
        deriv.push(
            alphabet
                .letters()
                .map(|a| guarded_derivative(&psi, a, x))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let names = binders.iter().map(|x| x.to_string()).collect();
    let system = TermSystem::new(alphabet.clone(), names, output, deriv)?;
    let start = mu_prune(e.expr(), &vars)?;
    Ok((system, start))
}
