use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use entropyforge_bench::{specs, walk_words};
use entropyforge_core::words::{activity_support, canonical_key, is_trivial, rewrite_step, DEFAULT_STATE_BUDGET};

fn rewriting(c: &mut Criterion) {
    for (name, spec) in specs() {
        let mut group = c.benchmark_group(format!("rewriting/{name}"));
        for n in [64, 512, 4096] {
            let words = walk_words(&spec, n, 16, 1);
            group.throughput(Throughput::Elements(words.len() as u64));
            group.bench_with_input(BenchmarkId::new("rewrite_step", n), &words, |b, ws| {
                b.iter(|| ws.iter().map(|w| rewrite_step(&spec, w).0.len()).sum::<usize>())
            });
            group.bench_with_input(BenchmarkId::new("activity_support", n), &words, |b, ws| {
                b.iter(|| ws.iter().map(|w| activity_support(&spec, w).0).sum::<usize>())
            });
            group.bench_with_input(BenchmarkId::new("canonical_key", n), &words, |b, ws| {
                b.iter(|| ws.iter().map(|w| canonical_key(&spec, w, DEFAULT_STATE_BUDGET).unwrap().size()).sum::<usize>())
            });
            // w w^-1 forces the full descent
            let relators: Vec<_> = words.iter().map(|w| w.concat(&spec, &w.inverse(&spec))).collect();
            group.bench_with_input(BenchmarkId::new("is_trivial_relator", n), &relators, |b, ws| {
                b.iter(|| ws.iter().all(|w| is_trivial(&spec, w, DEFAULT_STATE_BUDGET).unwrap()))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, rewriting);
criterion_main!(benches);
