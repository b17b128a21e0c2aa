use criterion::{criterion_group, criterion_main, Criterion};
use fermat_pr_core::*;
use std::hint::black_box;

fn bench_classify(c: &mut Criterion) {
    let equations: Vec<Equation> =
        ["x^3 - y^2 + 2z = 0", "x + y = z^2", "x^2 + y^2 = z^2", "3x^2 + 5y^2 - 7w^2 = 11z^4"]
            .iter()
            .map(|t| parse_equation(t).unwrap())
            .collect();
    c.bench_function("classify_fixtures", |b| {
        b.iter(|| {
            for eq in &equations {
                black_box(classify(eq, DEFAULT_P_MAX).unwrap());
            }
        })
    });
}

fn bench_enumerate(c: &mut Criterion) {
    let pythagoras = parse_equation("x^2 + y^2 = z^2").unwrap();
    c.bench_function("enumerate_pythagoras_1000", |b| {
        b.iter(|| black_box(enumerate_values(&pythagoras, &EnumOptions::new(1000)).unwrap()))
    });
    let four = parse_equation("x + 2y + 3w = z^2").unwrap();
    c.bench_function("enumerate_four_variables_100", |b| {
        b.iter(|| black_box(enumerate_values(&four, &EnumOptions::new(100)).unwrap()))
    });
}

fn bench_search(c: &mut Criterion) {
    let schur = parse_equation("x + y = z").unwrap();
    c.bench_function("schur_threshold_three_colors", |b| {
        b.iter(|| black_box(rado_threshold(&schur, 3, 20, Budget::UNLIMITED).unwrap()))
    });
    let square = parse_equation("x + y = z^2").unwrap();
    c.bench_function("four_coloring_x_plus_y_square_200", |b| {
        b.iter(|| black_box(search_coloring(&square, 4, 200, Budget::UNLIMITED).unwrap()))
    });
}

criterion_group!(benches, bench_classify, bench_enumerate, bench_search);
criterion_main!(benches);
