use std::hint::black_box;

use cfcoalg::{word_equiv, Polynomial, State};
use cfcoalg_bench::{anbn_grammar, anbn_mu, catalan, running, running_terms, running_word};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn catalan_coefficients(c: &mut Criterion) {
    let s = catalan();
    let mut group = c.benchmark_group("catalan");
    for n in [10usize, 20, 40] {
        let word = vec![0; n];
        group.bench_with_input(BenchmarkId::new("coefficient", n), &word, |b, w| {
            b.iter(|| s.coefficient(black_box(w)).unwrap())
        });
    }
    group.bench_function("series_12", |b| b.iter(|| s.series(black_box(12))));
    group.finish();
}

fn membership(c: &mut Criterion) {
    let g = running();
    let t = running_terms();
    let State::Grammar(sys, _) = &g else { unreachable!() };
    let mut group = c.benchmark_group("membership");
    for (n, m) in [(2, 2), (5, 5), (10, 10)] {
        let w = running_word(n, m);
        group.bench_with_input(BenchmarkId::new("grammar", w.len()), &w, |b, w| {
            b.iter(|| sys.accepts(&Polynomial::var(0), black_box(w)).unwrap())
        });
    }
    // Exact term derivatives are never simplified and grow quickly.
    for (n, m) in [(1, 1), (2, 2), (3, 3)] {
        let w = running_word(n, m);
        group.bench_with_input(BenchmarkId::new("terms", w.len()), &w, |b, w| {
            b.iter(|| t.coefficient(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn mu_word_equivalence(c: &mut Criterion) {
    let e = anbn_mu();
    let g = anbn_grammar();
    let mut group = c.benchmark_group("word_equiv");
    for bound in [6usize, 8, 10] {
        group.bench_with_input(BenchmarkId::new("mu_vs_grammar", bound), &bound, |b, &n| {
            b.iter(|| word_equiv(&e, &g, black_box(n)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, catalan_coefficients, membership, mu_word_equivalence);
criterion_main!(benches);
