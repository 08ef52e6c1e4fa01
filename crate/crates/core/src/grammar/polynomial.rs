use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap, Entry};

use crate::semiring::Semiring;

/// A word over nonterminals, ordered length-first and then
/// lexicographically by nonterminal index.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<usize>> for Monomial {
    fn from(v: Vec<usize>) -> Self {
        Monomial(v)
    }
}

/// A noncommutative polynomial `K⟨X⟩`: finitely many monomials with nonzero
/// coefficients. Over [`Boolean`](crate::Boolean) this is a finite language
/// over the nonterminals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Polynomial<K> {
    terms: BTreeMap<Monomial, K>,
}

impl<K: Semiring> Default for Polynomial<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Semiring> Polynomial<K> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    /// The unit polynomial `1·ε`.
    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(k: K) -> Self {
        Self::monomial(Monomial::empty(), k)
    }

    pub fn monomial(m: impl Into<Monomial>, k: K) -> Self {
        let mut p = Self::zero();
        p.add_term(m.into(), k);
        p
    }

    /// The singleton `{w}` with coefficient one.
    pub fn word(w: impl Into<Monomial>) -> Self {
        Self::monomial(w, K::one())
    }

    pub fn var(x: usize) -> Self {
        Self::word(vec![x])
    }

    /// `i(b)`: the unit polynomial when `b` holds, zero otherwise.
    pub fn indicator(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains_key(m)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Monomial, K> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Adds `k·m` in place, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, m: Monomial, k: K) {
        if k.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(k);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&k);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, k) in other.iter() {
            self.add_term(m.clone(), k.clone());
        }
    }

    /// Concatenation product, with coefficients multiplied.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, k1) in self.iter() {
            for (m2, k2) in other.iter() {
                out.add_term(m1.concat(m2), k1.mul(k2));
            }
        }
        out
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = Self::zero();
        if k.is_zero() {
            return out;
        }
        for (m, c) in self.iter() {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }

    /// Largest nonterminal index occurring in any monomial.
    pub fn max_symbol(&self) -> Option<usize> {
        self.terms.keys().flat_map(|m| m.0.iter().copied()).max()
    }

    /// True if no coefficient equals zero. Always holds for values built
    /// through the public API.
    pub fn is_normalized(&self) -> bool {
        self.terms.values().all(|k| !k.is_zero())
    }
}

impl<K: Semiring> FromIterator<(Monomial, K)> for Polynomial<K> {
    fn from_iter<I: IntoIterator<Item = (Monomial, K)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (m, k) in iter {
            p.add_term(m, k);
        }
        p
    }
}

impl<'a, K> IntoIterator for &'a Polynomial<K> {
    type Item = (&'a Monomial, &'a K);
    type IntoIter = btree_map::Iter<'a, Monomial, K>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Natural};

    #[test]
    fn monomial_order_is_length_lexicographic() {
        let mut ms = vec![
            Monomial(vec![1]),
            Monomial(vec![0, 0]),
            Monomial(vec![]),
            Monomial(vec![0]),
        ];
        ms.sort();
        assert_eq!(
            ms,
            vec![
                Monomial(vec![]),
                Monomial(vec![0]),
                Monomial(vec![1]),
                Monomial(vec![0, 0])
            ]
        );
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p: Polynomial<Natural> = Polynomial::monomial(vec![0], Natural::new(0));
        assert!(p.is_zero());
        let q = Polynomial::<Natural>::var(0).scale(&Natural::new(0));
        assert!(q.is_zero());
    }

    #[test]
    fn boolean_union_is_idempotent() {
        let p = Polynomial::<Boolean>::word(vec![0, 1]);
        assert_eq!(p.add(&p), p);
    }

    #[test]
    fn product_multiplies_coefficients() {
        let p = Polynomial::<Natural>::one().add(&Polynomial::var(0));
        let sq = p.mul(&p);
        assert_eq!(sq.coefficient(&Monomial(vec![0])), Natural::new(2));
        assert_eq!(sq.coefficient(&Monomial(vec![0, 0])), Natural::new(1));
        assert_eq!(sq.coefficient(&Monomial(vec![])), Natural::new(1));
        assert!(sq.is_normalized());
    }
}
