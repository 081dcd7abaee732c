//! Shared scenario builders for the benchmarks.

use resobath_core::{MemoryKernel, ModeSet, SpectralDensity, TimeGrid, TwoLevelParams};

pub fn standard_params() -> TwoLevelParams {
    TwoLevelParams::new(1.0).expect("valid")
}

/// A 20-mode environment spread around resonance, deterministic.
pub fn spread_modes() -> ModeSet {
    let pairs: Vec<(f64, f64)> = (0..20)
        .map(|k| {
            let frac = k as f64 / 19.0;
            (0.3 + 1.6 * frac, 0.08 + 0.1 * ((k * 7 % 11) as f64 / 10.0))
        })
        .collect();
    ModeSet::from_pairs(&pairs).expect("valid")
}

pub fn lorentzian_kernel() -> MemoryKernel {
    MemoryKernel::Lorentzian {
        center: 1.0,
        width: 0.4,
        weight: 0.09,
    }
}

pub fn flat_band() -> SpectralDensity {
    SpectralDensity::flat_band(0.5, 3.5, 0.3, 0.2).expect("valid")
}

pub fn grid(n_steps: usize) -> TimeGrid {
    TimeGrid::new(10.0, n_steps).expect("valid")
}
