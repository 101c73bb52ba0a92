use bfkit_core::harness::{run_suite_with, Execution, FamilyKind, FamilySpec, Suite, SuiteConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn config(suite: Suite, family: FamilySpec, n: usize) -> SuiteConfig {
    let mut c = SuiteConfig::new(suite);
    c.family = family;
    c.grid = format!("0.5:1.5:{n},0.5:1.5:{n},0.25:1.25:{n}").parse().unwrap();
    c
}

fn sampling(c: &mut Criterion) {
    let cases = [
        ("resolving/minus", config(Suite::VerifyResolving, FamilySpec { kind: FamilyKind::Minus, ..FamilySpec::default() }, 6)),
        (
            "hodograph/implicit",
            config(
                Suite::VerifyHodograph,
                FamilySpec { kind: FamilyKind::Hodograph, alpha: "u/2".into(), h: "u^2/10".into(), ..FamilySpec::default() },
                6,
            ),
        ),
        ("foliation/random", config(Suite::VerifyFoliation, FamilySpec { kind: FamilyKind::Random, ..FamilySpec::default() }, 5)),
    ];
    for (name, cfg) in &cases {
        let mut group = c.benchmark_group(*name);
        group.sample_size(10);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::from_parameter(label), cfg, |b, cfg| {
                b.iter(|| run_suite_with(cfg, exec).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, sampling);
criterion_main!(benches);
