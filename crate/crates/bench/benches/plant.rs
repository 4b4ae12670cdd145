use std::hint::black_box;

use alkplant_bench::{feasible_step, operating_point};
use alkplant_core::dae::{consistent_init, DifferentialVars};
use alkplant_core::electrochem::solve_operating_point;
use alkplant_core::scenario::simulate_scenario;
use alkplant_core::{PlantParams, ThermoModel};
use criterion::{criterion_group, criterion_main, Criterion};

fn residual(c: &mut Criterion) {
    let (plant, s, u, d) = operating_point();
    let xdot = DifferentialVars::default();
    c.bench_function("residual_24", |b| b.iter(|| plant.residual(black_box(&s.x), &xdot, &s.y, &u, &d).unwrap()));
    c.bench_function("algebraic_condition", |b| b.iter(|| plant.algebraic_condition(black_box(&s), &u, &d).unwrap()));
    c.bench_function("consistent_init_cold", |b| {
        b.iter(|| consistent_init(&plant, black_box(&s.x), None, &u, &d, 1e-8).unwrap())
    });
}

fn operating_points(c: &mut Criterion) {
    let th = ThermoModel::standard();
    let p = PlantParams::default();
    c.bench_function("operating_point_2_5MW", |b| {
        b.iter(|| solve_operating_point(th, black_box(2.5e6), 353.15, p.pressure, &p.stack).unwrap())
    });
}

fn step_scenario(c: &mut Criterion) {
    let cfg = feasible_step();
    let mut g = c.benchmark_group("scenario");
    g.sample_size(10);
    g.bench_function("feasible_step_3600s", |b| b.iter(|| simulate_scenario(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, residual, operating_points, step_scenario);
criterion_main!(benches);
