use std::path::PathBuf;
use std::process::Command as Process;

use cfcoalg::syntax::detect;
use cfcoalg::{word_equiv, Boolean, EquivResult, FileKind, Natural, Semiring};
use cfcoalg_cli::{run, translate, Outcome, Source, EXIT_ERROR};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("cfcoalg").chain(args.iter().copied()))
}

const CORPUS: [&str; 6] = [
    "anbn.sys",
    "anbm.sys",
    "running.sys",
    "running_grammar.sys",
    "catalan.sys",
    "anbn.mu",
];

#[test]
fn catalan_demo() {
    let o = cli(&["demo", "catalan", "--n", "9"]);
    assert_eq!(o.stdout, "1 1 2 5 14 42 132 429 1430\n");
    assert_eq!(o.code, 0);
    assert_eq!(
        cli(&["--semiring", "bool", "demo", "catalan", "--n", "3"]).stdout,
        "1 1 1\n"
    );
}

#[test]
fn language_demos() {
    assert_eq!(
        cli(&["demo", "anbn", "--n", "6"]).stdout,
        "_ 1\nab 1\naabb 1\naaabbb 1\n"
    );
    let o = cli(&["demo", "anbmam+n", "--n", "4"]);
    assert_eq!(o.stdout, "_ 1\naa 1\nba 1\naaaa 1\nabaa 1\nbbaa 1\n");
}

#[test]
fn membership() {
    let o = cli(&["member", "--input", &data("anbn.sys"), "--word", "aabb"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "1\n"));
    assert_eq!(
        cli(&["member", "--input", &data("anbn.sys"), "--word", "aab"]).stdout,
        "0\n"
    );
    assert_eq!(
        cli(&["member", "--input", &data("anbn.mu"), "--word", "_"]).stdout,
        "1\n"
    );
    assert_eq!(
        cli(&[
            "member",
            "--input",
            &data("running_grammar.sys"),
            "--word",
            "bba",
            "--start",
            "y"
        ])
        .stdout,
        "0\n"
    );
    assert_eq!(
        cli(&["member", "--input", &data("catalan.sys"), "--word", "aaaaa"]).stdout,
        "42\n"
    );
}

#[test]
fn closure_translation() {
    let o = cli(&[
        "translate",
        "--from",
        "terms",
        "--to",
        "mu",
        "--start",
        "x",
        &data("running.sys"),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let expr = o.stdout.lines().last().unwrap();
    assert_eq!(
        expr,
        "mu x . (1 + ((a * (x * a)) + (b * ((mu y . (1 + ((a * 0) + (b * (y * a))))) * a))))"
    );
}

#[test]
fn derivatives() {
    assert_eq!(
        cli(&["derive", "--input", &data("running_grammar.sys"), "--word", "ab"]).stdout,
        "y z z\n"
    );
    assert_eq!(
        cli(&["derive", "--input", &data("running.sys"), "--word", "ab"]).stdout,
        "((y * a) * a) + (1 * 0)\n"
    );
}

#[test]
fn series_lists_nonzero_words() {
    let o = cli(&["series", "--input", &data("anbn.sys"), "--maxlen", "4"]);
    assert_eq!(o.stdout, "_ 1\nab 1\naabb 1\n");
    let all = cli(&["series", "--input", &data("anbn.sys"), "--maxlen", "2", "--all"]);
    assert_eq!(all.stdout.lines().count(), 7);
}

#[test]
fn equivalence_exit_codes() {
    let eq = cli(&["equiv", &data("anbn.sys"), &data("anbn.mu")]);
    assert_eq!(eq.code, 0);
    let ne = cli(&["equiv", &data("anbn.sys"), &data("anbm.sys")]);
    assert_eq!(ne.code, 1);
    assert!(ne.stdout.contains("witness: a\n"), "{}", ne.stdout);
    let unknown = cli(&[
        "equiv",
        &data("anbn.sys"),
        &data("anbn.mu"),
        "--mode",
        "bisim",
        "--bound",
        "20",
    ]);
    assert_eq!(unknown.code, 2);
    let proved = cli(&["equiv", &data("anbm.sys"), &data("anbm.sys"), "--mode", "bisim"]);
    assert_eq!(proved.code, 0);
    assert!(proved.stdout.starts_with("equivalent: bisimulation"));
}

#[test]
fn errors_exit_with_three() {
    assert_eq!(
        cli(&["member", "--input", &data("missing.sys"), "--word", "a"]).code,
        EXIT_ERROR
    );
    assert_eq!(
        cli(&["member", "--input", &data("anbn.sys"), "--word", "c"]).code,
        EXIT_ERROR
    );
    assert_eq!(cli(&["nonsense"]).code, EXIT_ERROR);
    assert_eq!(cli(&["demo", "fibonacci"]).code, EXIT_ERROR);
    let mismatch = cli(&[
        "--semiring",
        "nat",
        "member",
        "--input",
        &data("anbn.sys"),
        "--word",
        "ab",
    ]);
    assert_eq!(mismatch.code, EXIT_ERROR);
    assert!(mismatch.stderr.contains("semirings differ"));
    let wrong_from = cli(&["translate", "--from", "mu", "--to", "terms", &data("anbn.sys")]);
    assert_eq!(wrong_from.code, EXIT_ERROR);
    assert_eq!(
        cli(&["--semiring", "nat", "check-semiring", "--samples", "1"]).code,
        EXIT_ERROR
    );
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn check_semiring_report() {
    let o = cli(&["check-semiring", "--seed", "5", "--samples", "100"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(o.stdout.lines().count(), 13);
    assert!(o.stdout.lines().all(|l| l.starts_with("ok")));
    let again = cli(&["check-semiring", "--seed", "5", "--samples", "100"]);
    assert_eq!(o, again);
    let g = cli(&["check-semiring", "--input", &data("anbm.sys"), "--samples", "50"]);
    assert_eq!(g.code, 0);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cfcoalg");
    let out = Process::new(bin)
        .args(["demo", "catalan", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 1 2 5\n");
    assert_eq!(out.status.code(), Some(0));
    let ne = Process::new(bin)
        .args(["equiv", &data("anbn.sys"), &data("anbm.sys")])
        .output()
        .unwrap();
    assert_eq!(ne.status.code(), Some(1));
    let err = Process::new(bin)
        .args(["member", "--input", &data("anbn.sys")])
        .output()
        .unwrap();
    assert_eq!(err.status.code(), Some(EXIT_ERROR));
    assert!(!err.stderr.is_empty());
}

fn corpus_round_trip<K: Semiring>(name: &str, text: &str) {
    let src: Source<K> = Source::parse(text).unwrap();
    let kind = src.kind();
    assert_eq!(translate(&src, kind, None).unwrap(), text, "{name}");
}

#[test]
fn corpus_files_are_canonical() {
    for name in CORPUS {
        let text = std::fs::read_to_string(data(name)).unwrap();
        match detect(&text).unwrap().semiring {
            Some(cfcoalg::SemiringKind::Nat) => corpus_round_trip::<Natural>(name, &text),
            _ => corpus_round_trip::<Boolean>(name, &text),
        }
    }
}

fn translations_preserve_behaviour<K: Semiring>(name: &str, text: &str, bound: usize) {
    let src: Source<K> = Source::parse(text).unwrap();
    let original = src.state(None).unwrap();
    for to in [FileKind::Grammar, FileKind::Terms, FileKind::Mu] {
        let out = translate(&src, to, None).unwrap();
        let back: Source<K> = Source::parse(&out).unwrap_or_else(|e| panic!("{name} -> {}: {e}\n{out}", to.name()));
        assert_eq!(back.kind(), to);
        let translated = back.state(None).unwrap();
        assert_eq!(
            word_equiv(&original, &translated, bound).unwrap(),
            EquivResult::Equivalent(cfcoalg::Evidence::Bounded(bound)),
            "{name} -> {}\n{out}",
            to.name()
        );
    }
}

#[test]
fn translations_are_equivalent_to_their_source() {
    for name in CORPUS {
        let text = std::fs::read_to_string(data(name)).unwrap();
        match detect(&text).unwrap().semiring {
            Some(cfcoalg::SemiringKind::Nat) => translations_preserve_behaviour::<Natural>(name, &text, 8),
            _ => translations_preserve_behaviour::<Boolean>(name, &text, 8),
        }
    }
}

fn random_translations<K: cfcoalg_testkit::RandomCoeff>(seed: u64) {
    use cfcoalg::syntax::{print_grammar, print_terms};
    use cfcoalg::{GrammarFile, TermsFile};
    use cfcoalg_testkit::gen;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..40 {
        let terms = print_terms(&TermsFile {
            system: gen::term_system::<K>(&mut rng, 2, 2, 3),
            start: Some(gen::term(&mut rng, 3, 2, 2)),
        });
        let grammar = print_grammar(&GrammarFile {
            system: gen::grammar_system::<K>(&mut rng, 2, 2),
            start: Some(gen::polynomial(&mut rng, 2, 2, 2)),
        });
        let mu = cfcoalg::syntax::print_mu(&cfcoalg::MuFile {
            alphabet: gen::alphabet(2),
            expr: gen::closed_mu::<K>(&mut rng, 5, 2),
        });
        for (name, text) in [("terms", terms), ("grammar", grammar), ("mu", mu)] {
            translations_preserve_behaviour::<K>(name, &text, 6);
        }
    }
}

#[test]
fn random_translations_are_equivalent() {
    random_translations::<Boolean>(11);
    random_translations::<Natural>(12);
}
