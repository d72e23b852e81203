//! End-to-end benchmarks for the main pipeline stages: root finding, web
//! tracing, diagram canonicalization, class enumeration, and the modular
//! group closure.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use webstrata::diagram::web_to_diagram;
use webstrata::mgt::mgt_group;
use webstrata::sampling::{random_web_polynomial, SampleConfig};
use webstrata::strata::{enumerate_generic, noncrossing_matchings};
use webstrata::webtrace::extract_web;
use webstrata::{MonicPolynomial, TraceParams};

fn sample_polynomials(degree: usize, count: usize) -> Vec<MonicPolynomial> {
    let config = SampleConfig::default();
    (0..count)
        .map(|seed| random_web_polynomial(degree, seed as u64, &config))
        .collect()
}

fn bench_roots(c: &mut Criterion) {
    let polys = sample_polynomials(6, 8);
    c.bench_function("roots_degree_6", |b| {
        b.iter(|| {
            for p in &polys {
                black_box(p.roots(1e-12).unwrap());
            }
        })
    });
}

fn bench_extract_web(c: &mut Criterion) {
    let params = TraceParams::default();
    let polys = sample_polynomials(4, 4);
    c.bench_function("extract_web_degree_4", |b| {
        b.iter(|| {
            for p in &polys {
                black_box(extract_web(p, &params).unwrap());
            }
        })
    });
}

fn bench_canonical_form(c: &mut Criterion) {
    let params = TraceParams::default();
    let webs: Vec<_> = sample_polynomials(5, 4)
        .iter()
        .map(|p| extract_web(p, &params).unwrap())
        .collect();
    c.bench_function("canonical_form_degree_5", |b| {
        b.iter(|| {
            for web in &webs {
                let diagram = web_to_diagram(web).unwrap();
                black_box(diagram.canonical_form());
            }
        })
    });
}

fn bench_enumeration(c: &mut Criterion) {
    c.bench_function("noncrossing_matchings_10", |b| {
        b.iter(|| black_box(noncrossing_matchings(10).unwrap().len()))
    });
    c.bench_function("enumerate_generic_degree_4", |b| {
        b.iter(|| black_box(enumerate_generic(4).unwrap().len()))
    });
}

fn bench_mgt_closure(c: &mut Criterion) {
    c.bench_function("mgt_group_q_24", |b| {
        b.iter(|| black_box(mgt_group(24).unwrap().len()))
    });
}

fn trivial_polynomial_eval(c: &mut Criterion) {
    let p = MonicPolynomial::new(vec![
        Complex64::new(0.2, 0.1),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, -0.3),
    ])
    .unwrap();
    let z = Complex64::new(0.37, -0.64);
    c.bench_function("polynomial_evaluate", |b| {
        b.iter(|| black_box(p.evaluate(black_box(z))))
    });
}

criterion_group!(
    benches,
    bench_roots,
    bench_extract_web,
    bench_canonical_form,
    bench_enumeration,
    bench_mgt_closure,
    trivial_polynomial_eval
);
criterion_main!(benches);
