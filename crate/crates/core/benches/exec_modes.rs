use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gmt_core::anchoring::{resolve_document, ResolveContext};
use gmt_core::merge::{diff_with, merge_with, MergePolicy, ParallelPolicy};
use gmt_core::synth::{self, DocShape};
use gmt_core::{parse_gmt, serialize_gmt, validate_all, Exec, GmtDocument};

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn corpus(n: usize) -> Vec<GmtDocument> {
    let mut rng = synth::rng(1);
    (0..n).map(|_| synth::document(&mut rng, DocShape::default())).collect()
}

fn layers(words: usize) -> Vec<GmtDocument> {
    let mut rng = synth::rng(2);
    (0..3).map(|_| synth::word_layer(&mut rng, "MSAnnot", words)).collect()
}

fn bench_validate(c: &mut Criterion) {
    let docs = corpus(2000);
    let mut g = c.benchmark_group("validate_all");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &docs, |b, docs| {
            b.iter(|| validate_all(docs, exec))
        });
    }
    g.finish();
}

fn bench_parse(c: &mut Criterion) {
    let texts: Vec<String> = corpus(2000).iter().map(|d| serialize_gmt(d).unwrap()).collect();
    let mut g = c.benchmark_group("parse");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &texts, |b, texts| {
            b.iter(|| exec.map(texts, |t| parse_gmt(t).unwrap()))
        });
    }
    g.finish();
}

fn bench_merge(c: &mut Criterion) {
    let docs = layers(5000);
    let mut g = c.benchmark_group("merge_fold");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &docs, |b, docs| {
            b.iter(|| merge_with(docs, MergePolicy::of(ParallelPolicy::FoldToAlt), exec).unwrap())
        });
    }
    g.finish();
}

fn bench_diff(c: &mut Criterion) {
    let docs = layers(5000);
    let mut g = c.benchmark_group("diff");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &docs, |b, docs| {
            b.iter(|| diff_with(&docs[0], &docs[1], exec))
        });
    }
    g.finish();
}

fn bench_resolve(c: &mut Criterion) {
    let doc = &layers(5000)[0];
    let mut rng = synth::rng(3);
    let (tokens, landmarks) = synth::context(&mut rng, 5000, 6);
    let ctx = ResolveContext {
        tokens: Some(&tokens),
        landmarks: Some(&landmarks),
        layers: &[],
    };
    let mut g = c.benchmark_group("resolve");
    for exec in MODES {
        g.bench_function(BenchmarkId::from_parameter(format!("{exec:?}")), |b| {
            b.iter(|| resolve_document(doc, &ctx, exec))
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_validate,
    bench_parse,
    bench_merge,
    bench_diff,
    bench_resolve
);
criterion_main!(benches);
