use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qprobe::{
    adaptive_grid, assemble_spectrum, density_open, density_uniform_periodic, ed_hamiltonian,
    lehmann_density, solve_open, solve_periodic, Boundary, ChainModel, CouplingKind,
    CouplingProfile, EigenSystem, OccupationStatistics, OracleBasis, ProbeModel, ThermalState,
};

fn chain(n: usize, boundary: Boundary) -> ChainModel {
    ChainModel::new(n, 1.0, 0.5, boundary, CouplingProfile::Uniform).unwrap()
}

fn state() -> ThermalState {
    ThermalState::new(100.0, 1.0, OccupationStatistics::FermiDirac).unwrap()
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_open");
    for n in [16usize, 64, 256] {
        let model = chain(n, Boundary::Open);
        group.bench_with_input(BenchmarkId::from_parameter(n), &model, |b, m| {
            b.iter(|| solve_open(m).unwrap())
        });
    }
    group.finish();

    c.bench_function("solve_periodic_n1024", |b| {
        let model = chain(1024, Boundary::Periodic);
        b.iter(|| solve_periodic(&model).unwrap())
    });
}

fn bench_density_and_spectrum(c: &mut Criterion) {
    let st = state();
    c.bench_function("density_uniform_n20", |b| {
        let modes = solve_periodic(&chain(20, Boundary::Periodic)).unwrap();
        b.iter(|| density_uniform_periodic(&modes, &st).unwrap())
    });
    c.bench_function("density_open_n64", |b| {
        let modes = solve_open(&chain(64, Boundary::Open)).unwrap();
        b.iter(|| density_open(&modes, &st).unwrap())
    });
    c.bench_function("spectrum_assembly_n20", |b| {
        let model = chain(20, Boundary::Periodic);
        let probe = ProbeModel::from_lab_units(12.0, 100.0, 600.0, 40.0, 0.0, 1.0).unwrap();
        let modes = solve_periodic(&model).unwrap();
        let density = density_uniform_periodic(&modes, &st).unwrap();
        let grid = adaptive_grid(&probe, &model, &density);
        b.iter(|| assemble_spectrum(&probe, &density, &grid))
    });
}

fn bench_oracle(c: &mut Criterion) {
    let st = state();
    c.bench_function("ed_eigensystem_n8", |b| {
        let h = ed_hamiltonian(&chain(8, Boundary::Open)).unwrap();
        b.iter(|| EigenSystem::new(&h).unwrap())
    });
    c.bench_function("lehmann_density_n6", |b| {
        let model = chain(6, Boundary::Open);
        b.iter(|| {
            lehmann_density(&model, &st, CouplingKind::UniformSigmaX, OracleBasis::Spin).unwrap()
        })
    });
}

criterion_group!(benches, bench_solvers, bench_density_and_spectrum, bench_oracle);
criterion_main!(benches);
