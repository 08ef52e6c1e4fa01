use cfcoalg::syntax::{detect, parse_grammar, parse_mu, parse_terms, print_grammar, print_mu, print_terms};
use cfcoalg::{Boolean, Error, FileKind, GrammarFile, MuFile, Natural, Semiring, SemiringKind, TermsFile};
use cfcoalg_testkit::{gen, RandomCoeff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grammar_round_trip<K: RandomCoeff>(rng: &mut impl Rng) {
    let system = gen::grammar_system::<K>(rng, 3, 2);
    let start = rng.random_bool(0.5).then(|| gen::polynomial(rng, 3, 3, 3));
    let file = GrammarFile { system, start };
    let text = print_grammar(&file);
    let back: GrammarFile<K> = parse_grammar(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back.system, file.system, "{text}");
    assert_eq!(back.start, file.start, "{text}");
    assert_eq!(print_grammar(&back), text);
}

fn terms_round_trip<K: RandomCoeff>(rng: &mut impl Rng) {
    let system = gen::term_system::<K>(rng, 2, 2, 4);
    let start = rng.random_bool(0.5).then(|| gen::term(rng, 4, 2, 2));
    let file = TermsFile { system, start };
    let text = print_terms(&file);
    let back: TermsFile<K> = parse_terms(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back.system, file.system, "{text}");
    assert_eq!(back.start, file.start, "{text}");
    assert_eq!(print_terms(&back), text);
}

fn mu_round_trip<K: RandomCoeff>(rng: &mut impl Rng) {
    let file = MuFile {
        alphabet: gen::alphabet(2),
        expr: gen::closed_mu::<K>(rng, 6, 2),
    };
    let text = print_mu(&file);
    let back: MuFile<K> = parse_mu(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back.alphabet, file.alphabet);
    assert_eq!(back.expr, file.expr, "{text}");
    assert_eq!(print_mu(&back), text);
}

#[test]
fn printed_files_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        grammar_round_trip::<Boolean>(&mut rng);
        grammar_round_trip::<Natural>(&mut rng);
        terms_round_trip::<Boolean>(&mut rng);
        terms_round_trip::<Natural>(&mut rng);
        mu_round_trip::<Boolean>(&mut rng);
        mu_round_trip::<Natural>(&mut rng);
    }
}

#[test]
fn headers_are_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = print_grammar(&GrammarFile {
        system: gen::grammar_system::<Natural>(&mut rng, 2, 2),
        start: None,
    });
    let h = detect(&g).unwrap();
    assert_eq!(h.kind, FileKind::Grammar);
    assert_eq!(h.semiring, Some(SemiringKind::Nat));
    assert!(matches!(
        parse_grammar::<Boolean>(&g),
        Err(Error::SemiringMismatch { .. })
    ));
    assert!(matches!(parse_terms::<Natural>(&g), Err(Error::Parse { .. })));
}

#[test]
fn parse_errors_carry_positions() {
    let text = "#mu\nsemiring: bool\nalphabet: a b\nmu x . x\n";
    match parse_mu::<Boolean>(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let text = "#grammar\nalphabet: a b\nx -> a q\n";
    match parse_grammar::<Boolean>(text) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 8)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn header_semiring_is_optional() {
    let text = "#mu\nalphabet: a b\nmu x . (1 + a * (x * b))\n";
    let f: MuFile<Natural> = parse_mu(text).unwrap();
    assert!(print_mu(&f).contains(&format!("semiring: {}", Natural::NAME)));
}
