use criterion::{criterion_group, criterion_main, Criterion};
use nec_reduction::corpus::butterfly;
use nec_reduction::oracle::{search_nec, SearchBudget};
use nec_reduction::{check_zero_error, lift_code, par, reduce, NetworkCode};

/// Bitwise XOR network code on the butterfly at block length `n`.
fn butterfly_xor(n: u32) -> NetworkCode {
    let q = 1u64 << n;
    let id: Vec<u64> = (0..q).collect();
    let xor: Vec<u64> = (0..q * q).map(|i| (i / q) ^ (i % q)).collect();
    NetworkCode::new(n, 2 * n)
        .with_edge("e1", &["msg:0"], id.clone())
        .with_edge("e2", &["msg:1"], id.clone())
        .with_edge("e6", &["msg:0"], id.clone())
        .with_edge("e7", &["msg:1"], id.clone())
        .with_edge("e3", &["e1", "e2"], xor.clone())
        .with_edge("e4", &["e3"], id.clone())
        .with_edge("e5", &["e3"], id)
        .with_decoder("t1", &["e4", "e7"], xor.clone())
        .with_decoder("t2", &["e5", "e6"], xor)
}

fn zero_error_check(c: &mut Criterion) {
    let r = reduce(&butterfly()).unwrap();
    let code = lift_code(&butterfly_xor(4), &r).unwrap();
    let mut group = c.benchmark_group("check_zero_error/butterfly_n4");
    group.bench_function("parallel", |b| b.iter(|| check_zero_error(&code, &r.instance).unwrap()));
    group.bench_function("sequential", |b| {
        b.iter(|| par::sequential(|| check_zero_error(&code, &r.instance).unwrap()))
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let r = reduce(&butterfly()).unwrap();
    let mut group = c.benchmark_group("search_nec/butterfly_n1");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| search_nec(&r.instance, 2, 1, SearchBudget::default(), None).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| par::sequential(|| search_nec(&r.instance, 2, 1, SearchBudget::default(), None).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, zero_error_check, oracle);
criterion_main!(benches);
