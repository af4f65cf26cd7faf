use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heightlab::asymptotics::gelfand_batch;
use heightlab::exec::Exec;
use heightlab::linalg::bits_budget;
use heightlab::northcott::enum_invertible_endos;
use heightlab::verify::{run_suite, VerifyConfig};
use heightlab::{Field, MatrixK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel { workers: 0 })];

fn random_matrices(count: usize) -> Vec<MatrixK> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|_| {
            let rows: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            let r: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            MatrixK::from_ints(&r)
        })
        .filter(|t| !t.is_nilpotent())
        .collect()
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("enum_invertible_endos_2x2_B3");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| enum_invertible_endos(2, 3.0, exec).unwrap())
        });
    }
    g.finish();

    let mats = random_matrices(64);
    let mut g = c.benchmark_group("gelfand_batch_64x3x3_jmax10");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| gelfand_batch(Field::Rational, &mats, 10, bits_budget(), exec))
        });
    }
    g.finish();

    let cfg = VerifyConfig { samples: 20, ..VerifyConfig::default() };
    let mut g = c.benchmark_group("verify_suite_20");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| run_suite(&cfg, exec)));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
