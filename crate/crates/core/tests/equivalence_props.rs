use std::sync::Arc;

use cfcoalg::equivalence::bisim_search;
use cfcoalg::{
    bisim_upto, word_equiv, Alphabet, Boolean, ClosedMuExpr, EquivResult, Error, Evidence, MuExpr, Natural, Polynomial,
    Semiring, State, Term, TermSystem,
};
use cfcoalg_testkit::fixtures::{ab, anbn_mu, anbn_system, running_system, running_terms};
use cfcoalg_testkit::gen;
use cfcoalg_testkit::laws::{instantiate, mu_laws};
use cfcoalg_testkit::RandomCoeff;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = MuExpr<Boolean>;

fn mu<K: Semiring>(e: ClosedMuExpr<K>) -> State<K> {
    State::mu(Arc::new(ab()), e).unwrap()
}

fn running_x() -> State<Boolean> {
    State::grammar(Arc::new(running_system()), Polynomial::var(0)).unwrap()
}

/// `{aⁿ bᵐ}` from `x`: `x → ε | a x | b y`, `y → ε | b y`.
fn anbm() -> State<Boolean> {
    let g = cfcoalg::GrammarSystem::new(
        ab(),
        vec!["x".into(), "y".into()],
        vec![Boolean(true), Boolean(true)],
        vec![
            vec![Polynomial::var(0), Polynomial::var(1)],
            vec![Polynomial::zero(), Polynomial::var(1)],
        ],
    )
    .unwrap();
    State::grammar(Arc::new(g), Polynomial::var(0)).unwrap()
}

/// The first word on which the two states differ, by exhaustive search.
fn first_difference<K: Semiring>(s1: &State<K>, s2: &State<K>, maxlen: usize) -> Option<Vec<usize>> {
    s1.series(maxlen)
        .into_iter()
        .zip(s2.series(maxlen))
        .find(|((_, k1), (_, k2))| k1 != k2)
        .map(|((w, _), _)| w)
}

#[test]
fn closure_matches_running_grammar() {
    let e = cfcoalg::muexpr::close_var(&running_terms::<Boolean>(), 0);
    assert_eq!(
        word_equiv(&running_x(), &mu(e), 10).unwrap(),
        EquivResult::Equivalent(Evidence::Bounded(10))
    );
}

#[test]
fn epsilon_witness() {
    let ab_ = M::prod(M::letter(0), M::letter(1));
    let r = word_equiv(&mu(anbn_mu()), &mu(ClosedMuExpr::new(ab_).unwrap()), 6).unwrap();
    assert_eq!(r, EquivResult::Inequivalent(vec![]));
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn reflexive() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for maxlen in 0..6 {
        let s = mu(gen::closed_mu::<Boolean>(&mut rng, 5, 2));
        assert_eq!(
            word_equiv(&s, &s, maxlen).unwrap(),
            EquivResult::Equivalent(Evidence::Bounded(maxlen))
        );
        assert!(matches!(bisim_upto(&s, &s, 10).unwrap(), EquivResult::Equivalent(_)));
    }
}

#[test]
fn mismatched_alphabets_are_rejected() {
    let a = State::mu(
        Arc::new(Alphabet::new(["a"]).unwrap()),
        ClosedMuExpr::new(M::one()).unwrap(),
    )
    .unwrap();
    assert!(matches!(
        word_equiv(&a, &mu(anbn_mu()), 3),
        Err(Error::AlphabetMismatch { .. })
    ));
    assert!(matches!(
        bisim_upto(&a, &mu(anbn_mu()), 3),
        Err(Error::AlphabetMismatch { .. })
    ));
}

#[test]
fn zero_unit_is_proved() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let t = gen::closed_mu::<Boolean>(&mut rng, 5, 2);
        let zt = ClosedMuExpr::new(M::sum(M::zero(), t.expr().clone())).unwrap();
        let search = bisim_search(&mu(zt.clone()), &mu(t.clone()), 1000).unwrap();
        let EquivResult::Equivalent(Evidence::Relation(n)) = search.result else {
            panic!("0 + t vs t: {:?}", search.result)
        };
        assert!(n <= 4 * t.expr().size().pow(2) + 4, "relation of {n} pairs");
        assert!(search.verify() && search.covers(&mu(zt), &mu(t)));
    }
}

#[test]
fn left_distributivity_is_proved() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let [s, t, u] = [0, 1, 2].map(|_| gen::closed_mu::<Boolean>(&mut rng, 4, 2).into_expr());
        let l = M::prod(s.clone(), M::sum(t.clone(), u.clone()));
        let r = M::sum(M::prod(s.clone(), t), M::prod(s, u));
        let (l, r) = (mu(ClosedMuExpr::new(l).unwrap()), mu(ClosedMuExpr::new(r).unwrap()));
        let search = bisim_search(&l, &r, 2000).unwrap();
        assert!(
            matches!(search.result, EquivResult::Equivalent(_)),
            "{:?}",
            search.result
        );
        assert!(search.verify() && search.covers(&l, &r));
    }
}

#[test]
fn anbn_against_anbm() {
    let r = bisim_upto(&mu(anbn_mu()), &anbm(), 500).unwrap();
    let EquivResult::Inequivalent(w) = r else {
        panic!("{r:?}")
    };
    assert!(w.len() <= 3);
    let e = mu(anbn_mu());
    assert_ne!(e.coefficient(&w).unwrap(), anbm().coefficient(&w).unwrap());
    assert_eq!(word_equiv(&e, &anbm(), 6).unwrap(), EquivResult::Inequivalent(vec![0]));
}

#[test]
fn unprovable_pair_is_unknown() {
    let g = State::grammar(Arc::new(anbn_system::<Boolean>()), Polynomial::var(0)).unwrap();
    let r = bisim_upto(&mu(anbn_mu()), &g, 50).unwrap();
    assert_eq!(r, EquivResult::Unknown);
    assert_eq!(r.exit_code(), 2);
    assert_eq!(
        word_equiv(&mu(anbn_mu()), &g, 10).unwrap(),
        EquivResult::Equivalent(Evidence::Bounded(10))
    );
}

fn random_state<K: RandomCoeff>(rng: &mut impl Rng) -> State<K> {
    match rng.random_range(0..3) {
        0 => {
            let s = gen::grammar_system::<K>(rng, 2, 2);
            let p = gen::polynomial(rng, 2, 2, 2);
            State::grammar(Arc::new(s), p).unwrap()
        }
        1 => {
            let s: TermSystem<K> = gen::term_system(rng, 2, 2, 3);
            let t: Term<K> = gen::term(rng, 3, 2, 2);
            State::terms(Arc::new(s), t).unwrap()
        }
        _ => mu(gen::closed_mu::<K>(rng, 4, 2)),
    }
}

/// Mostly equivalent pairs (law instances, or a state against itself) and
/// some arbitrary ones.
fn random_pair<K: RandomCoeff>(rng: &mut impl Rng) -> (State<K>, State<K>) {
    match rng.random_range(0..4) {
        0 => (random_state(rng), random_state(rng)),
        1 => {
            let s = random_state(rng);
            (s.clone(), s)
        }
        _ => {
            let laws = mu_laws::<K>();
            let law = &laws[rng.random_range(0..laws.len())];
            let [s, t, u] = [0, 1, 2].map(|_| gen::closed_mu::<K>(rng, 4, 2));
            let (l, r) = instantiate(law, &s, &t, &u);
            (mu(l), mu(r))
        }
    }
}

fn agreement<K: RandomCoeff>(seed: u64, pairs: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut proved, mut refuted) = (0, 0);
    for i in 0..pairs {
        let (s1, s2) = random_pair::<K>(&mut rng);
        let bounded = word_equiv(&s1, &s2, 8).unwrap();
        let search = bisim_search(&s1, &s2, 300).unwrap();
        match (&search.result, &bounded) {
            (EquivResult::Equivalent(_), EquivResult::Inequivalent(w)) => {
                panic!("pair {i}: proof contradicts witness {w:?}")
            }
            (EquivResult::Inequivalent(w), EquivResult::Equivalent(_)) => {
                panic!("pair {i}: witness {w:?} contradicts bounded check")
            }
            (EquivResult::Equivalent(_), _) => {
                assert!(search.verify(), "pair {i}: relation fails its own check");
                assert!(search.covers(&s1, &s2));
                proved += 1;
            }
            (EquivResult::Inequivalent(w), _) => {
                assert_ne!(s1.coefficient(w).unwrap(), s2.coefficient(w).unwrap());
                refuted += 1;
            }
            (EquivResult::Unknown, _) => {}
        }
        if let EquivResult::Inequivalent(w) = &bounded {
            assert_eq!(Some(w.clone()), first_difference(&s1, &s2, 8), "pair {i}");
        }
    }
    (proved, refuted)
}

#[test]
fn bisimulation_never_contradicts_bounded_check() {
    let (proved, refuted) = agreement::<Boolean>(44, 200);
    assert!(proved > 50 && refuted > 10, "proved {proved}, refuted {refuted}");
    let (proved, _) = agreement::<Natural>(45, 100);
    assert!(proved > 20, "proved {proved}");
}

#[test]
fn witnesses_are_shortest() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for _ in 0..200 {
        let s1 = random_state::<Boolean>(&mut rng);
        let s2 = random_state::<Boolean>(&mut rng);
        match word_equiv(&s1, &s2, 6).unwrap() {
            EquivResult::Inequivalent(w) => assert_eq!(first_difference(&s1, &s2, 6), Some(w)),
            EquivResult::Equivalent(_) => assert_eq!(first_difference(&s1, &s2, 6), None),
            EquivResult::Unknown => panic!("bounded check is never unknown"),
        }
    }
}
