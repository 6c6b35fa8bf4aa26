use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use e8p_bench::fixture;
use e8p_core::painleve::{msy_step, tj1_step};
use e8p_core::picard::{enumerate_short_vectors, verify_weyl_relations, word_matrix};
use e8p_core::weyl::apply_word;
use e8p_core::{DoubleDouble, EllipticContext, Word};
use num_complex::Complex64;

fn lattice(c: &mut Criterion) {
    c.bench_function("coxeter relations", |b| b.iter(verify_weyl_relations));
    c.bench_function("T_J1 word matrix", |b| b.iter(|| word_matrix(black_box(&Word::t_j1()))));
    c.bench_function("norm 4 vectors", |b| b.iter(|| enumerate_short_vectors(black_box(4)).count()));
}

fn elliptic(c: &mut Criterion) {
    let ctx = EllipticContext::<f64>::new(Complex64::new(0.5, 0.0), 1e-12).unwrap();
    let u = Complex64::new(0.37, 0.21);
    c.bench_function("cd binary64", |b| b.iter(|| ctx.cd_projective(black_box(u))));
    let hi: EllipticContext<DoubleDouble> = ctx.convert().unwrap();
    let v = e8p_core::scalar::cx(0.37, 0.21);
    c.bench_function("cd extended", |b| b.iter(|| hi.cd_projective(black_box(v))));
}

fn maps(c: &mut Criterion) {
    let st = fixture::<f64>(3);
    c.bench_function("tj1 step", |b| b.iter(|| tj1_step(black_box(&st))));
    c.bench_function("msy step", |b| b.iter(|| msy_step(black_box(&st))));
    let w = Word::t_j1();
    c.bench_function("T_J1 word on a state", |b| b.iter(|| apply_word(black_box(&w), black_box(&st))));
    let hi = fixture::<DoubleDouble>(3);
    c.bench_function("tj1 step extended", |b| b.iter(|| tj1_step(black_box(&hi))));
}

criterion_group!(benches, lattice, elliptic, maps);
criterion_main!(benches);
