use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dhss::field::parse_modulus;
use dhss::oracle::{perfectness_sweep_with, Execution};
use dhss::{deal, reconstruct, AccessStructure};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn executions() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn sweep(c: &mut Criterion) {
    let p = BigUint::from(13u32);
    let mut group = c.benchmark_group("perfectness_sweep");
    for (n, t) in [(vec![3, 4], vec![2, 3]), (vec![2, 2, 2], vec![1, 2, 3]), (vec![3, 4, 5], vec![2, 4, 6])] {
        let st = AccessStructure::new(n.clone(), t.clone()).unwrap();
        let label = format!("{n:?}/{t:?}");
        for (name, exec) in executions() {
            group.bench_with_input(BenchmarkId::new(name, &label), &st, |b, st| {
                b.iter(|| perfectness_sweep_with(st, &p, 7, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn deal_and_reconstruct(c: &mut Criterion) {
    let p = parse_modulus("0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f").unwrap();
    let mut group = c.benchmark_group("scheme_256bit");
    for n in [100usize, 1000] {
        let st = AccessStructure::new(vec![n / 4; 4], vec![4, 8, 16, 32]).unwrap();
        let ctx = st.validate(&p).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let secret = ctx.random(&mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("deal", n), &st, |b, st| {
            b.iter(|| deal(st, black_box(&secret), &mut rng).unwrap())
        });
        let (shares, bulletin) = deal(&st, &secret, &mut rng).unwrap();
        let q: Vec<usize> = (st.cumulative(2) - 7..=st.cumulative(2)).collect();
        let quorum = shares.quorum(&q).unwrap();
        group.bench_with_input(BenchmarkId::new("reconstruct_level2", n), &quorum, |b, quorum| {
            b.iter(|| reconstruct(&st, &bulletin, quorum).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, deal_and_reconstruct);
criterion_main!(benches);
