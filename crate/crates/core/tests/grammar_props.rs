use std::collections::BTreeSet;

use cfcoalg::grammar::{derivation_oracle, OracleVerdict};
use cfcoalg::{Alphabet, Boolean, CFGrammar, Error, GrammarSystem, Monomial, Natural, Polynomial, Semiring, Symbol};
use cfcoalg_testkit::fixtures::{anbn_system, catalan_system, in_anbn, running_grammar, running_system};
use cfcoalg_testkit::gen;
use cfcoalg_testkit::series::{cfg_series, grammar_series, polynomial_series};
use cfcoalg_testkit::{oracle_step_bound, RandomCoeff};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type B = Boolean;

fn word(m: &[usize]) -> Polynomial<B> {
    Polynomial::word(Monomial(m.to_vec()))
}

#[test]
fn running_grammar_coalgebra() {
    let s = running_system::<B>();
    let (x, y, z) = (0, 1, 2);
    assert_eq!(*s.var_output(x), Boolean(true));
    assert_eq!(*s.var_derivative(x, 0), word(&[x, z]));
    assert_eq!(*s.var_derivative(x, 1), word(&[y, z]));
    assert_eq!(*s.var_output(y), Boolean(true));
    assert!(s.var_derivative(y, 0).is_zero());
    assert_eq!(*s.var_derivative(y, 1), word(&[y, z]));
    assert_eq!(*s.var_output(z), Boolean(false));
    assert_eq!(*s.var_derivative(z, 0), Polynomial::one());
    assert!(s.var_derivative(z, 1).is_zero());
}

#[test]
fn epsilon_only_grammar() {
    let g = CFGrammar::new(
        Alphabet::new(["a", "b"]).unwrap(),
        vec!["x".into()],
        vec![[vec![]].into_iter().collect()],
    )
    .unwrap();
    let s: GrammarSystem<B> = g.to_coalgebra().unwrap();
    assert_eq!(*s.var_output(0), Boolean(true));
    assert!(s.var_derivative(0, 0).is_zero() && s.var_derivative(0, 1).is_zero());
}

#[test]
fn rejects_non_gnf_body() {
    let body = vec![Symbol::Nonterminal(0), Symbol::Letter(0), Symbol::Nonterminal(1)];
    let g = CFGrammar::new(
        Alphabet::new(["a"]).unwrap(),
        vec!["x".into(), "y".into()],
        vec![[body].into_iter().collect(), BTreeSet::new()],
    )
    .unwrap();
    assert!(matches!(g.to_coalgebra::<B>(), Err(Error::NotGnf { .. })));
}

#[test]
fn coalgebra_to_grammar_round_trips() {
    assert_eq!(running_system::<B>().to_grammar().unwrap(), running_grammar());
    let empty = GrammarSystem::<B>::new(
        Alphabet::new(["a"]).unwrap(),
        vec!["x".into()],
        vec![Boolean(false)],
        vec![vec![Polynomial::zero()]],
    )
    .unwrap();
    assert!(empty.to_grammar().unwrap().productions(0).is_empty());
    assert!(matches!(catalan_system().to_grammar(), Err(Error::NonBooleanSemiring)));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let s = gen::grammar_system::<B>(&mut rng, 3, 2);
        assert_eq!(s.to_grammar().unwrap().to_coalgebra::<B>().unwrap(), s);
    }
}

#[test]
fn outputs_and_derivatives() {
    let s = running_system::<B>();
    assert_eq!(s.poly_output(&word(&[0, 2])).unwrap(), Boolean(false));
    assert_eq!(s.poly_output(&Polynomial::one()).unwrap(), Boolean(true));
    assert!(s.poly_derivative(&Polynomial::one(), 0).unwrap().is_zero());
    let c = catalan_system();
    let xx = Polynomial::monomial(Monomial(vec![0, 0]), Natural::new(3));
    assert_eq!(c.poly_output(&xx).unwrap(), Natural::new(3));
    let mut expected = Polynomial::zero();
    expected.add_term(Monomial(vec![0, 0, 0]), Natural::new(1));
    expected.add_term(Monomial(vec![0, 0]), Natural::new(1));
    assert_eq!(
        c.poly_derivative(&Polynomial::word(Monomial(vec![0, 0])), 0).unwrap(),
        expected
    );
    let e = anbn_system::<B>();
    assert_eq!(e.poly_derivative(&word(&[0]), 0).unwrap(), word(&[0, 1]));
}

#[test]
fn word_derivatives_and_coefficients() {
    let s = running_system::<B>();
    let x = word(&[0]);
    assert_eq!(s.word_derivative(&x, &[]).unwrap(), x);
    assert!(s.word_derivative(&x, &[1, 0]).unwrap().contains(&Monomial::empty()));
    assert_eq!(s.coefficient(&x, &[0, 1, 0, 0]).unwrap(), Boolean(true));
    assert_eq!(s.coefficient(&word(&[1]), &[0, 1]).unwrap(), Boolean(false));
    let e = anbn_system::<B>();
    assert_eq!(e.coefficient(&word(&[0]), &[0, 1]).unwrap(), Boolean(true));
    assert_eq!(e.coefficient(&word(&[0]), &[0, 0, 1]).unwrap(), Boolean(false));
    assert_eq!(
        catalan_system().coefficient(&Polynomial::var(0), &[0, 0, 0]).unwrap(),
        Natural::new(5)
    );
    assert!(matches!(s.coefficient(&x, &[5]), Err(Error::UnknownLetter(_))));
    assert!(matches!(
        s.coefficient(&word(&[7]), &[]),
        Err(Error::UnknownNonterminal(_))
    ));
}

#[test]
fn enumeration() {
    let e = anbn_system::<B>();
    let got = e.enumerate(&word(&[0]), 4).unwrap();
    let words: Vec<Vec<usize>> = got.into_iter().map(|(w, _)| w).collect();
    assert_eq!(words, vec![vec![], vec![0, 1], vec![0, 0, 1, 1]]);
    assert_eq!(e.enumerate(&word(&[1]), 0).unwrap(), vec![]);
    let c = catalan_system().enumerate(&Polynomial::var(0), 3).unwrap();
    let coeffs: Vec<String> = c.iter().map(|(_, k)| k.to_string()).collect();
    assert_eq!(coeffs, ["1", "1", "2", "5"]);
    let all = e.enumerate(&word(&[0]), 8).unwrap();
    assert!(all.iter().all(|(w, _)| in_anbn(w)));
    assert_eq!(all.len(), 5);
}

#[test]
fn oracle_examples() {
    let g = running_grammar();
    assert_eq!(derivation_oracle(&g, &[0], &[1, 0], 10), OracleVerdict::Yes);
    assert_eq!(derivation_oracle(&g, &[0], &[0, 1], 50), OracleVerdict::NoWithinBound);
    assert_eq!(derivation_oracle(&g, &[], &[], 0), OracleVerdict::Yes);
}

#[test]
fn oracle_agrees_with_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ab = Alphabet::new(["a", "b"]).unwrap();
    for _ in 0..30 {
        let nv = rng.random_range(1..=4);
        let g = gen::gnf_grammar(&mut rng, nv, 2, 3, 3);
        let s: GrammarSystem<B> = g.to_coalgebra().unwrap();
        for w in ab.words_up_to(6) {
            for x in 0..nv {
                let member = s.accepts(&Polynomial::var(x), &w).unwrap();
                let verdict = derivation_oracle(&g, &[x], &w, oracle_step_bound(w.len(), nv));
                assert_eq!(member, verdict == OracleVerdict::Yes, "{x} on {w:?}");
            }
        }
    }
}

/// Both sides of the word product rule agree on outputs and derivatives.
fn check_word_product_rule<K: Semiring>(s: &GrammarSystem<K>, u: &Monomial, v: &Monomial) {
    let pu = Polynomial::word(u.clone());
    let pv = Polynomial::word(v.clone());
    let uv = Polynomial::word(u.concat(v));
    let ou = s.poly_output(&pu).unwrap();
    assert_eq!(s.poly_output(&uv).unwrap(), ou.mul(&s.poly_output(&pv).unwrap()));
    for a in s.alphabet().letters() {
        let lhs = s.poly_derivative(&uv, a).unwrap();
        let rhs = s
            .poly_derivative(&pu, a)
            .unwrap()
            .mul(&pv)
            .add(&s.poly_derivative(&pv, a).unwrap().scale(&ou));
        assert_eq!(lhs, rhs);
        assert!(lhs.is_normalized());
    }
}

fn check_language_product_rule<K: Semiring>(s: &GrammarSystem<K>, p: &Polynomial<K>, q: &Polynomial<K>) {
    let pq = p.mul(q);
    let op = s.poly_output(p).unwrap();
    assert_eq!(s.poly_output(&pq).unwrap(), op.mul(&s.poly_output(q).unwrap()));
    for a in s.alphabet().letters() {
        let lhs = s.poly_derivative(&pq, a).unwrap();
        let rhs = s
            .poly_derivative(p, a)
            .unwrap()
            .mul(q)
            .add(&s.poly_derivative(q, a).unwrap().scale(&op));
        assert_eq!(lhs, rhs);
    }
}

fn check_linearity<K: Semiring>(s: &GrammarSystem<K>, p: &Polynomial<K>, w: &[usize]) {
    let whole = s.poly_output(&s.word_derivative(p, w).unwrap()).unwrap();
    let parts = p.iter().fold(K::zero(), |acc, (m, k)| {
        let d = s.word_derivative(&Polynomial::word(m.clone()), w).unwrap();
        acc.add(&k.mul(&s.poly_output(&d).unwrap()))
    });
    assert_eq!(whole, parts);
}

fn random_word(rng: &mut impl Rng, letters: usize, maxlen: usize) -> Vec<usize> {
    let n = rng.random_range(0..=maxlen);
    (0..n).map(|_| rng.random_range(0..letters)).collect()
}

fn product_rules<K: RandomCoeff>(seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = gen::grammar_system::<K>(&mut rng, 3, 2);
    let u = gen::monomial(&mut rng, 3, 5);
    let v = gen::monomial(&mut rng, 3, 5);
    check_word_product_rule(&s, &u, &v);
    let p = gen::polynomial::<K>(&mut rng, 3, 3, 3);
    let q = gen::polynomial::<K>(&mut rng, 3, 3, 3);
    check_language_product_rule(&s, &p, &q);
    let w = random_word(&mut rng, 2, 6);
    check_linearity(&s, &p, &w);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boolean_product_rules(seed in any::<u64>()) {
        product_rules::<Boolean>(seed);
    }

    #[test]
    fn weighted_product_rules(seed in any::<u64>()) {
        product_rules::<Natural>(seed);
    }

    #[test]
    fn coefficients_match_reference_series(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen::grammar_system::<Natural>(&mut rng, 2, 2);
        let p = gen::polynomial::<Natural>(&mut rng, 2, 2, 2);
        let reference = polynomial_series(&s, &p, 5);
        for (w, k) in reference.entries() {
            prop_assert_eq!(&s.coefficient(&p, w).unwrap(), k);
        }
    }

    #[test]
    fn grammar_language_matches_coalgebra(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gen::gnf_grammar(&mut rng, 3, 2, 3, 3);
        let s: GrammarSystem<B> = g.to_coalgebra().unwrap();
        let direct = cfg_series::<B>(&g, 6);
        let via = grammar_series(&s, 6);
        prop_assert!(direct == via);
    }
}

#[test]
fn catalan_stays_exact_beyond_64_bits() {
    let c = catalan_system();
    let k = c.coefficient(&Polynomial::var(0), &[0; 40]).unwrap();
    assert_eq!(k.to_string(), "2622127042276492108820");
}

#[test]
fn enumerate_agrees_with_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let s = gen::grammar_system::<Natural>(&mut rng, 3, 2);
        let p = Polynomial::var(rng.random_range(0..3));
        let expected = polynomial_series(&s, &p, 4).support();
        assert_eq!(s.enumerate(&p, 4).unwrap(), expected);
    }
}
