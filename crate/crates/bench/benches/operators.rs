use criterion::{criterion_group, criterion_main, Criterion};

use photon_am::algebra::{su2_residual, Norm};
use photon_am::constraints::{gb_constraints, physical_subspace, DEFAULT_KERNEL_TOL};
use photon_am::{operators, C64};
use photon_am_bench::{classical_state, symmetric_grid};

fn lift(c: &mut Criterion) {
    let (ms, fs) = symmetric_grid(2);
    c.bench_function("spin_total/dim6561", |b| b.iter(|| operators::spin_total(&ms, &fs).unwrap()));
}

fn commutators(c: &mut Criterion) {
    let (ms, fs) = symmetric_grid(2);
    let s = operators::spin_total(&ms, &fs).unwrap();
    let mask = fs.mask_total_le(1);
    c.bench_function("su2_residual/dim6561", |b| b.iter(|| su2_residual(&s, &mask, Norm::Frobenius).unwrap()));
}

fn kernel(c: &mut Criterion) {
    let (ms, fs) = symmetric_grid(1);
    let cons = gb_constraints(&ms, &fs, &[C64::new(0.0, 0.0); 2]).unwrap();
    c.bench_function("physical_subspace/dim256", |b| b.iter(|| physical_subspace(&fs, &cons, DEFAULT_KERNEL_TOL).unwrap()));
}

fn fields(c: &mut Criterion) {
    let s = classical_state(16);
    c.bench_function("eval_fields/16^3", |b| b.iter(|| photon_am::fields::eval_fields(&s)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = lift, commutators, kernel, fields
}
criterion_main!(benches);
