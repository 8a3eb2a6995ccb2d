use criterion::{criterion_group, criterion_main, Criterion};
use vltau_core::catalog::named;
use vltau_core::charq::{eigenspace_character, Space};
use vltau_core::commutators::check_commutators;
use vltau_core::lattice::Klein;
use vltau_core::vertex::mode_apply;
use vltau_core::zhu::{derive_scalar_system, ExpansionTable};

fn vertex(c: &mut Criterion) {
    let n = named();
    c.bench_function("J_0 J", |b| b.iter(|| mode_apply(&n.j, 0, &n.j)));
    c.bench_function("P_-1 P", |b| b.iter(|| mode_apply(&n.p, -1, &n.p)));
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    g.bench_function("commutators weight 2", |b| b.iter(|| check_commutators(2, 2)));
    g.bench_function("scalar system", |b| b.iter(|| derive_scalar_system(ExpansionTable::builtin()).unwrap()));
    g.bench_function("W_k^0 character to grade 3", |b| b.iter(|| eigenspace_character(Space::Wk(Klein::Zero), 3)));
    g.finish();
}

criterion_group!(benches, vertex, suites);
criterion_main!(benches);
