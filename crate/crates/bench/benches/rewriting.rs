use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ddrs_bench::{arithmetic_workload, system};
use ddrs_core::confluence::{check_confluence_with, JoinBudget};
use ddrs_core::oracle::{check_ground, default_strategies};
use ddrs_core::rewrite::DEFAULT_MAX_STEPS;
use ddrs_core::tree::DEFAULT_TREE_BUDGET;
use ddrs_core::{critical_pairs, normalize, parse_tree, prove_termination_rto, search_tree_reduction, Strategy, SystemId, WeightAssignment};

fn normalization(c: &mut Criterion) {
    let mut g = c.benchmark_group("normalize");
    for id in [SystemId::ZBud, SystemId::ZDub, SystemId::NBt, SystemId::NDt, SystemId::ZR] {
        let sys = system(id);
        let t = arithmetic_workload(id);
        for strat in [Strategy::LeftmostInnermost, Strategy::LeftmostOutermost] {
            g.bench_with_input(BenchmarkId::new(sys.label(), strat), &t, |b, t| {
                b.iter(|| normalize(&sys, black_box(t), strat, DEFAULT_MAX_STEPS))
            });
        }
    }
    g.finish();
}

fn confluence(c: &mut Criterion) {
    let mut g = c.benchmark_group("confluence");
    g.sample_size(10);
    for id in [SystemId::NBud, SystemId::ZBud, SystemId::ZR] {
        let sys = system(id);
        g.bench_function(BenchmarkId::new("critical_pairs", sys.label()), |b| b.iter(|| critical_pairs(&sys)));
        g.bench_function(BenchmarkId::new("check", sys.label()), |b| b.iter(|| check_confluence_with(&sys, true, JoinBudget::default())));
    }
    g.finish();
}

fn termination(c: &mut Criterion) {
    let mut g = c.benchmark_group("termination");
    g.sample_size(10);
    let nbud = system(SystemId::NBud);
    let w = WeightAssignment::natural();
    g.bench_function("rto N_bud", |b| b.iter(|| prove_termination_rto(&nbud, &w, DEFAULT_TREE_BUDGET)));
    let from = parse_tree("5(0,2(0))").unwrap();
    let to = parse_tree("4(2(5(0,0)),0)").unwrap();
    g.bench_function("tree search", |b| b.iter(|| search_tree_reduction(black_box(&from), black_box(&to), DEFAULT_TREE_BUDGET)));
    g.finish();
}

fn ground(c: &mut Criterion) {
    let mut g = c.benchmark_group("ground-check");
    g.sample_size(10);
    let strategies = default_strategies();
    for id in [SystemId::ZBud, SystemId::NDt] {
        let sys = system(id);
        g.bench_function(BenchmarkId::new("size 4", sys.label()), |b| b.iter(|| check_ground(&sys, 4, &strategies, DEFAULT_MAX_STEPS)));
    }
    g.finish();
}

criterion_group!(benches, normalization, confluence, termination, ground);
criterion_main!(benches);
