use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cpqed::bogoliubov::{direct_coefficients, ProbeCouplings};
use cpqed::discrete_oracle::random_case;
use cpqed::energy::*;
use cpqed::model::OscillatorPair;
use cpqed::par::{self, Exec};
use cpqed::resolvent::DiscreteMedium;

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn all_orders_sweep(c: &mut Criterion) {
    let pair = OscillatorPair::from_polarizabilities(1.0, 1e-4, 1e-4, 1.0).unwrap();
    let rs: Vec<f64> = (0..16).map(|i| 10.0 + 2.5 * i as f64).collect();
    let cfg = AllOrdersConfig::default();
    let mut g = c.benchmark_group("vcp_all_orders");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| vcp_all_orders(black_box(&pair), &rs, &cfg, e).unwrap())
        });
    }
    g.finish();
}

fn damped_integral(c: &mut Criterion) {
    let mut g = c.benchmark_group("far_zone_damped_i1");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| far_zone_damped(FarZoneIntegral::I1, black_box(1.0 / 16.0), e).unwrap())
        });
    }
    g.finish();
}

fn random_grid_suite(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..50).collect();
    let mut g = c.benchmark_group("random_grid_suite");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| {
                par::map(e, &seeds, |&s| {
                    let case = random_case(s, 32, 0.2).unwrap();
                    let m = DiscreteMedium::new(case.pair, &case.grid).unwrap();
                    let probe = ProbeCouplings::from_mode(&case.pair, &case.probe, case.grid.volume()).unwrap();
                    let coeffs = direct_coefficients(&m, &probe).unwrap();
                    let e = e0_discrete(&case.pair, &case.grid).unwrap();
                    (coeffs.delta, e.total)
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, all_orders_sweep, damped_integral, random_grid_suite);
criterion_main!(benches);
