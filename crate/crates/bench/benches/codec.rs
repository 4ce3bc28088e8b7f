use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qpp_bench::{noisy_frame, qpp};
use qpp_core::parwin::{parallel_turbo_decode, Enforcement};
use qpp_core::turbo::{dmin_upper_bound, siso_decode, turbo_decode, DecoderKind, RscSpec, SisoInput, Trellis};

fn siso(c: &mut Criterion) {
    let pi = qpp(1024, 31, 64);
    let llrs = noisy_frame(&pi, 1.0, 7);
    let trellis = Trellis::new(&RscSpec::umts()).unwrap();
    let sys: Vec<f64> = llrs.systematic.iter().chain(&llrs.tail1_sys).copied().collect();
    let par: Vec<f64> = llrs.parity1.iter().chain(&llrs.tail1_par).copied().collect();
    let apriori = vec![0.0; pi.len()];
    let input = SisoInput {
        systematic: &sys,
        parity: &par,
        apriori: &apriori,
    };
    let mut group = c.benchmark_group("siso/1024");
    group.throughput(Throughput::Elements(pi.len() as u64));
    for kind in [DecoderKind::LogMap, DecoderKind::MaxLogMap] {
        group.bench_function(format!("{kind:?}"), |b| b.iter(|| siso_decode(&trellis, kind, &input).unwrap()));
    }
    group.finish();
}

fn turbo(c: &mut Criterion) {
    let mut group = c.benchmark_group("turbo_decode_8it");
    group.sample_size(20);
    for (n, f1, f2) in [(256, 159, 64), (1024, 31, 64), (4096, 2113, 128)] {
        let pi = qpp(n, f1, f2);
        let llrs = noisy_frame(&pi, 1.0, 3);
        group.throughput(Throughput::Elements(n));
        group.bench_with_input(BenchmarkId::new("serial", n), &llrs, |b, l| b.iter(|| turbo_decode(l, &pi, 8).unwrap()));
        group.bench_with_input(BenchmarkId::new("banked_m16", n), &llrs, |b, l| {
            b.iter(|| parallel_turbo_decode(l, &pi, 16, 8, Enforcement::Strict).unwrap())
        });
    }
    group.finish();
}

fn dmin(c: &mut Criterion) {
    let pi = qpp(256, 159, 64);
    let mut group = c.benchmark_group("dmin_bound");
    group.sample_size(10);
    group.bench_function("256_w3", |b| b.iter(|| dmin_upper_bound(&pi, &RscSpec::umts(), 3).unwrap()));
    group.finish();
}

criterion_group!(benches, siso, turbo, dmin);
criterion_main!(benches);
