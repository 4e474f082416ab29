use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use trigraph::oracle::{DEFAULT_BUDGET, DEFAULT_MAX_TREE_ENDS};
use trigraph::{automorphism_group, canonical_form, closure_e, decompose, enumerate_iso_classes, verify_certificate};
use trigraph_bench::{nontrivial_pairs, states};

const CLASSES: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 1)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for (g, b) in CLASSES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{g},{b}")),
            &(g, b),
            |bench, &(g, b)| bench.iter(|| enumerate_iso_classes(black_box(g), black_box(b)).unwrap()),
        );
    }
    group.finish();
}

fn symmetry(c: &mut Criterion) {
    let graphs: Vec<_> = states(2, 2).into_iter().map(|(g, _)| g).collect();
    c.bench_function("canonical_form/2,2", |bench| {
        bench.iter(|| {
            for g in &graphs {
                black_box(canonical_form(black_box(g)).unwrap());
            }
        })
    });
    c.bench_function("automorphism_group/2,2", |bench| {
        bench.iter(|| {
            graphs
                .iter()
                .map(|g| automorphism_group(black_box(g)).unwrap().len())
                .sum::<usize>()
        })
    });
}

fn certificates(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for (g, b) in CLASSES {
        let pairs = nontrivial_pairs(g, b);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{g},{b}")),
            &pairs,
            |bench, pairs| {
                bench.iter(|| {
                    for (gr, phi) in pairs {
                        let cert = decompose(gr, phi).unwrap();
                        verify_certificate(gr, &cert, phi).unwrap();
                    }
                })
            },
        );
    }
    group.finish();
}

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    group.sample_size(10);
    for (g, b) in [(0, 5), (2, 0), (1, 3)] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{g},{b}")),
            &(g, b),
            |bench, &(g, b)| {
                bench.iter(|| {
                    closure_e(g, b, DEFAULT_BUDGET, DEFAULT_MAX_TREE_ENDS)
                        .unwrap()
                        .is_full()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, enumeration, symmetry, certificates, closure);
criterion_main!(benches);
