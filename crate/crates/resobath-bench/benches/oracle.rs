//! Oracle evolutions: dense eigendecomposition cost of the certification
//! paths.

use criterion::{criterion_group, criterion_main, Criterion};

use resobath_bench::{grid, spread_modes, standard_params};
use resobath_core::oracle::{
    dephasing_oracle, jc_evolve, single_excitation_evolve, FieldState, JCConfig,
    SingleExcitationSystem,
};
use resobath_core::{ModeSet, TimeGrid};

fn single_excitation(c: &mut Criterion) {
    let params = standard_params();
    let modes = spread_modes();
    c.bench_function("oracle/single_excitation_20_modes", |b| {
        let g = grid(8_000);
        b.iter(|| {
            let sys = SingleExcitationSystem::new(&params, &modes);
            single_excitation_evolve(&sys, &g)
        });
    });
}

fn jc_coherent(c: &mut Criterion) {
    let config = JCConfig::new(1.0, 1.0, 1.0, FieldState::Coherent(20.0), 60).expect("valid");
    c.bench_function("oracle/jc_coherent20_cutoff60", |b| {
        let g = TimeGrid::new(45.0, 4_500).expect("valid");
        b.iter(|| jc_evolve(&config, &g).expect("evolves"));
    });
}

fn dephasing_two_modes(c: &mut Criterion) {
    let modes = ModeSet::from_pairs(&[(2.0, 0.2), (3.1, 0.15)]).expect("valid");
    c.bench_function("oracle/dephasing_two_modes_cutoff30", |b| {
        let g = TimeGrid::new(5.0, 40).expect("valid");
        b.iter(|| dephasing_oracle(&modes, 30, &g).expect("evolves"));
    });
}

criterion_group!(benches, single_excitation, jc_coherent, dephasing_two_modes);
criterion_main!(benches);
