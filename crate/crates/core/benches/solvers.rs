use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use owa_winner::exact::brute_force_with;
use owa_winner::gen::{generate, GenSpec, UtilityKind};
use owa_winner::greedy::greedy_solve_with;
use owa_winner::nonfinicky::slots_greedy_with;
use owa_winner::scoring::{check_submodular_with, SubmodularMode};
use owa_winner::{Exec, Instance, OwaFamily, Rational};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn borda(n: usize, m: usize, k: usize, family: OwaFamily) -> Instance {
    generate(&GenSpec {
        kind: UtilityKind::Borda,
        n,
        m,
        k,
        family,
        seed: 42,
    })
    .unwrap()
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    for (n, m, k) in [(20, 16, 4), (50, 20, 5)] {
        let inst = borda(n, m, k, OwaFamily::Harmonic);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_m{m}_k{k}")), &inst, |b, inst| {
                b.iter(|| brute_force_with(inst, u128::MAX, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    for (n, m, k) in [(200, 100, 10), (500, 200, 15)] {
        let inst = borda(n, m, k, OwaFamily::Harmonic);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_m{m}_k{k}")), &inst, |b, inst| {
                b.iter(|| greedy_solve_with(inst, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn slots(c: &mut Criterion) {
    let mut group = c.benchmark_group("slots");
    for (n, m, k) in [(200, 100, 10), (500, 200, 15)] {
        let inst = borda(n, m, k, OwaFamily::KBest(2));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_m{m}_k{k}")), &inst, |b, inst| {
                b.iter(|| slots_greedy_with(inst, Rational::new(1, 4), 2, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn submodularity(c: &mut Criterion) {
    let mut group = c.benchmark_group("submodular_check");
    group.sample_size(10);
    for m in [8, 11] {
        let inst = borda(10, m, 4, OwaFamily::Harmonic);
        let mode = SubmodularMode::Exhaustive {
            budget: SubmodularMode::DEFAULT_EXHAUSTIVE_BUDGET,
        };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("m{m}")), &inst, |b, inst| {
                b.iter(|| check_submodular_with(inst, mode, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, brute_force, greedy, slots, submodularity);
criterion_main!(benches);
