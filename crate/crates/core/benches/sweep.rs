//! Sequential against parallel execution on the two sweeps the oracle
//! suites spend their time in: bisimulation classes of all small models,
//! and evaluating reduced formulas across them.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rmlkit::kripke::PointedModel;
use rmlkit::modelcheck::evaluate;
use rmlkit::modelcheck::small::{all_pointed_models, representatives};
use rmlkit::par::{self, Exec};
use rmlkit::reduction::reduce;
use rmlkit::syntax::{parse, Agent, Formula, Prop};

fn models() -> Vec<PointedModel> {
    all_pointed_models(3, &[Agent::new("a")], &[Prop::new("p")])
}

fn formulas() -> Vec<Formula> {
    [
        "E_a ([a]p & <a>~p)",
        "A_a <a>p -> <a>A_a p",
        "E_a ([a]<a>p & ~<a>[a]p)",
        "A_a E_a (<a>p & <a>~p)",
        "E_a nabla_a {p, <a>~p}",
    ]
    .iter()
    .map(|t| reduce(&parse(t).unwrap()).unwrap().0)
    .collect()
}

fn bench(c: &mut Criterion) {
    let all = models();
    let fs = formulas();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        g.bench_with_input(BenchmarkId::new("representatives", name), &exec, |b, &exec| {
            b.iter(|| black_box(representatives(exec, &all).0.len()))
        });
        g.bench_with_input(BenchmarkId::new("evaluate", name), &exec, |b, &exec| {
            b.iter(|| {
                let hits = par::map(exec, &all, |m| fs.iter().filter(|f| evaluate(m, f).unwrap()).count());
                black_box(hits.iter().sum::<usize>())
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
