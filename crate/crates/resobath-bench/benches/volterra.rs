//! The product-integration solve is O(n^2) in the grid size; this tracks the
//! constant and confirms the quadratic scaling stays quadratic.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use resobath_bench::{flat_band, grid, lorentzian_kernel, spread_modes, standard_params};
use resobath_core::{kernel_from_modes, kernel_from_spectral_density, solve_u, solve_u_laplace};

fn volterra_scaling(c: &mut Criterion) {
    let params = standard_params();
    let kernel = kernel_from_modes(&spread_modes()).expect("valid");
    let mut group = c.benchmark_group("solve_u/mode_sum");
    for n_steps in [2_000usize, 4_000, 8_000] {
        group.throughput(Throughput::Elements((n_steps * n_steps) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n_steps), &n_steps, |b, &n| {
            let g = grid(n);
            b.iter(|| solve_u(&kernel, &params, &g).expect("solves"));
        });
    }
    group.finish();
}

fn volterra_lorentzian(c: &mut Criterion) {
    let params = standard_params();
    let kernel = lorentzian_kernel();
    c.bench_function("solve_u/lorentzian_8000", |b| {
        let g = grid(8_000);
        b.iter(|| solve_u(&kernel, &params, &g).expect("solves"));
    });
}

fn laplace_path(c: &mut Criterion) {
    let params = standard_params();
    let kernel = kernel_from_modes(&spread_modes()).expect("valid");
    c.bench_function("solve_u_laplace/20_modes_8000", |b| {
        let g = grid(8_000);
        b.iter(|| solve_u_laplace(&kernel, &params, &g).expect("solves"));
    });
}

fn kernel_sampling(c: &mut Criterion) {
    c.bench_function("kernel_from_spectral_density/flat_band_2000", |b| {
        let g = grid(2_000);
        let density = flat_band();
        b.iter(|| kernel_from_spectral_density(&density, &g).expect("integrates"));
    });
}

criterion_group!(
    benches,
    volterra_scaling,
    volterra_lorentzian,
    laplace_path,
    kernel_sampling
);
criterion_main!(benches);
