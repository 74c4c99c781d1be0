use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use noisy_vqe::experiment::{random_theta0, run_vqe};
use noisy_vqe::noise::NoiseModel;
use noisy_vqe::{build_ansatz, h2_hamiltonian, AnsatzKind, BackendConfig, DensityMatrix, Estimator, OptimizerConfig, QuantumState, Statevector};

fn state_preparation(c: &mut Criterion) {
    let mut g = c.benchmark_group("prepare");
    for kind in AnsatzKind::ALL {
        let circuit = build_ansatz(kind, 4).unwrap();
        let gates = circuit.bind(&random_theta0(circuit.n_params, 1)).unwrap();
        g.bench_with_input(BenchmarkId::new("statevector", kind), &gates, |b, gates| {
            b.iter(|| {
                let mut s = Statevector::zero(4);
                s.apply_gates(black_box(gates)).unwrap();
                s
            })
        });
        g.bench_with_input(BenchmarkId::new("density", kind), &gates, |b, gates| {
            b.iter(|| {
                let mut rho = DensityMatrix::zero(4);
                rho.apply_gates(black_box(gates)).unwrap();
                rho
            })
        });
    }
    g.finish();
}

fn energy_estimate(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate");
    let backends = [
        ("exact", BackendConfig::exact()),
        ("shots", BackendConfig::shots(1024, 3)),
        ("readout", BackendConfig::noisy(NoiseModel::readout(0.03), 1024, 3)),
        ("device", BackendConfig::noisy(NoiseModel::device_defaults(), 1024, 3)),
    ];
    for kind in AnsatzKind::ALL {
        let circuit = build_ansatz(kind, 4).unwrap();
        let theta = random_theta0(circuit.n_params, 2);
        for (name, backend) in backends {
            let est = Estimator::new(circuit.clone(), h2_hamiltonian(), backend).unwrap();
            let mut counter = 0;
            g.bench_function(BenchmarkId::new(name, kind), |b| {
                b.iter(|| {
                    counter += 1;
                    est.evaluate_at(black_box(&theta), counter).unwrap().value
                })
            });
        }
    }
    g.finish();
}

fn nft_run(c: &mut Criterion) {
    let mut g = c.benchmark_group("nft_100");
    g.sample_size(10);
    for kind in AnsatzKind::ALL {
        let n = build_ansatz(kind, 4).unwrap().n_params;
        let theta0 = random_theta0(n, 4);
        for (name, backend) in [
            ("exact", BackendConfig::exact()),
            ("readout", BackendConfig::noisy(NoiseModel::readout(0.03), 1024, 0)),
        ] {
            g.bench_function(BenchmarkId::new(name, kind), |b| {
                b.iter(|| run_vqe(kind, &OptimizerConfig::nft(100), &backend, &theta0, 7).unwrap().trace.final_energy())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, state_preparation, energy_estimate, nft_run);
criterion_main!(benches);
