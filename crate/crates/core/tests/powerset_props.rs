use std::collections::BTreeSet;

use cfcoalg::powerset_ext::{
    check_semiring_agreement, oplus, otimes, random_language, random_pair, random_weak_system, BehaviourPair, Language,
    MixedSym, WeakGnfSystem,
};
use cfcoalg_testkit::fixtures::running_system;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Words = BTreeSet<Vec<usize>>;

/// Terminal words of length at most `n` generated by each nonterminal,
/// by fixed-point iteration over `L(x) = i(o(x)) ∪ ⋃ₐ a·L(xₐ)`.
fn nonterminal_languages(sys: &WeakGnfSystem, output: &[bool], deriv: &[Vec<Language>], n: usize) -> Vec<Words> {
    let mut langs = vec![Words::new(); sys.num_nonterminals()];
    loop {
        let next: Vec<Words> = (0..langs.len())
            .map(|x| {
                let mut l = Words::new();
                if output[x] {
                    l.insert(Vec::new());
                }
                for (a, d) in deriv[x].iter().enumerate() {
                    for w in words_of(d, &langs, n.saturating_sub(1)) {
                        if n > 0 {
                            let mut aw = vec![a];
                            aw.extend(w);
                            l.insert(aw);
                        }
                    }
                }
                l
            })
            .collect();
        if next == langs {
            return langs;
        }
        langs = next;
    }
}

/// Terminal words of length at most `n` obtained from `l` by substituting
/// `langs[x]` for each nonterminal `x`.
fn words_of(l: &Language, langs: &[Words], n: usize) -> Words {
    let mut out = Words::new();
    for w in l {
        let mut partial: Words = [Vec::new()].into();
        for sym in w {
            let choices: Words = match *sym {
                MixedSym::Var(x) => langs[x].clone(),
                MixedSym::Letter(a) => [vec![a]].into(),
            };
            partial = partial
                .iter()
                .flat_map(|u| {
                    choices.iter().filter(move |v| u.len() + v.len() <= n).map(move |v| {
                        let mut uv = u.clone();
                        uv.extend(v);
                        uv
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Pull the raw coalgebra out of a system through its public interface.
fn structure(sys: &WeakGnfSystem) -> (Vec<bool>, Vec<Vec<Language>>) {
    (0..sys.num_nonterminals())
        .map(|x| {
            let p = sys.var_pair(x);
            (p.out, p.der)
        })
        .unzip()
}

#[test]
fn running_grammar_agrees_on_1000_samples() {
    let sys = WeakGnfSystem::from_grammar(&running_system());
    let report = check_semiring_agreement(&sys, &mut ChaCha8Rng::seed_from_u64(7), 1000);
    assert!(report.passed(), "{report}");
    assert_eq!(report.laws.len(), 13);
    assert!(report.laws.iter().all(|l| l.checked == 1000));
}

#[test]
fn random_systems_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let sys = random_weak_system(&mut rng, 2, 2);
        let report = check_semiring_agreement(&sys, &mut rng, 100);
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn extension_preserves_generated_language() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    const N: usize = 5;
    for _ in 0..200 {
        let sys = random_weak_system(&mut rng, 2, 2);
        let (output, deriv) = structure(&sys);
        let langs = nonterminal_languages(&sys, &output, &deriv, N);
        let s = random_language(&mut rng, 2, 2, 3, 3);
        let ext = sys.extension(&s).unwrap();
        assert_eq!(
            words_of(&s, &langs, N),
            words_of(&ext.expand(), &langs, N),
            "S = {}",
            sys.format_language(&s)
        );
        assert_eq!(ext, sys.morphism_image(&s).unwrap());
    }
}

#[test]
fn behaviour_pair_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let zero = BehaviourPair::zero(2);
    let one = BehaviourPair::one(2);
    for _ in 0..300 {
        let p = random_pair(&mut rng, 2, 2);
        assert_eq!(oplus(&zero, &p).unwrap(), p);
        assert_eq!(oplus(&p, &p).unwrap(), p);
        assert_eq!(otimes(&one, &p).unwrap(), p);
        assert_eq!(otimes(&p, &zero).unwrap(), zero);
        // Expansion is a homomorphism into concatenation of languages.
        let q = random_pair(&mut rng, 2, 2);
        let pq = otimes(&p, &q).unwrap().expand();
        let mut cat = Language::new();
        for u in p.expand() {
            for v in q.expand() {
                cat.insert([u.clone(), v].concat());
            }
        }
        assert_eq!(pq, cat);
    }
}

#[test]
fn mismatched_pairs_are_rejected() {
    assert!(oplus(&BehaviourPair::zero(1), &BehaviourPair::zero(2)).is_err());
    assert!(otimes(&BehaviourPair::one(3), &BehaviourPair::one(2)).is_err());
}
