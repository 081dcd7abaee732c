//! Brute-force reference evolutions in truncated Hilbert spaces.
//!
//! These exist to certify the fast paths: the Volterra solver is checked
//! against the single-excitation Schroedinger evolution it is equivalent to,
//! and the closed-form dephasing factor is checked against displaced
//! truncated oscillators. Everything here evolves by dense eigendecomposition
//! (no time stepping), so the only error sources are truncation and
//! floating-point conditioning.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dephasing::ZCouplingScale;
use crate::eigen::{symmetric_eigen, Eigen};
use crate::error::{Error, Result};
use crate::types::{ModeSet, TimeGrid, TwoLevelParams};
use crate::volterra::Amplitude;

/// Largest tensor-space dimension diagonalized as one dense matrix in the
/// dephasing oracle; beyond it the commuting per-mode propagators are applied
/// axis by axis to the full state vector instead.
const FULL_EIG_DIM: usize = 1100;

/// The one-excitation sector of the exchange-coupling Hamiltonian: the atom
/// amplitude coupled to one amplitude per mode, giving a real symmetric
/// "arrow" matrix with `omega0` and the mode frequencies on the diagonal and
/// the couplings along the first row and column.
#[derive(Debug, Clone)]
pub struct SingleExcitationSystem {
    hamiltonian: DMatrix<f64>,
}

impl SingleExcitationSystem {
    pub fn new(params: &TwoLevelParams, modes: &ModeSet) -> Self {
        let k = modes.len();
        let mut h = DMatrix::zeros(k + 1, k + 1);
        h[(0, 0)] = params.omega0();
        for (j, m) in modes.modes().iter().enumerate() {
            h[(j + 1, j + 1)] = m.omega;
            h[(0, j + 1)] = m.g;
            h[(j + 1, 0)] = m.g;
        }
        Self { hamiltonian: h }
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }
}

/// Evolve `(1, 0, ..., 0)` under `exp(-i H t)` and return the atom component
/// as an [`Amplitude`]. Exact up to eigendecomposition conditioning; this is
/// the certification oracle for [`crate::volterra::solve_u`].
pub fn single_excitation_evolve(sys: &SingleExcitationSystem, grid: &TimeGrid) -> Amplitude {
    let eig = symmetric_eigen(&sys.hamiltonian);
    let dim = sys.dimension();
    // weight of eigenvector m in the initial (atom) component
    let weights: Vec<f64> = (0..dim).map(|m| eig.vectors[(0, m)].powi(2)).collect();
    let mut u = Vec::with_capacity(grid.len());
    let mut u_dot = Vec::with_capacity(grid.len());
    for t in grid.times() {
        let mut val = Complex64::new(0.0, 0.0);
        let mut dval = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            let e = eig.values[m];
            let phase = Complex64::from_polar(weights[m], -e * t);
            val += phase;
            dval += phase * Complex64::new(0.0, -e);
        }
        u.push(val);
        u_dot.push(dval);
    }
    Amplitude::from_parts(*grid, u, u_dot)
}

/// Full state evolution in the one-excitation sector, for norm checks.
pub fn single_excitation_state(
    sys: &SingleExcitationSystem,
    t: f64,
) -> DVector<Complex64> {
    let eig = symmetric_eigen(&sys.hamiltonian);
    let dim = sys.dimension();
    let mut psi = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for m in 0..dim {
        let coeff = Complex64::from_polar(eig.vectors[(0, m)], -eig.values[m] * t);
        for i in 0..dim {
            psi[i] += coeff * eig.vectors[(i, m)];
        }
    }
    psi
}

/// Initial field state of the single-mode reference model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState {
    /// A number state with `n` photons.
    Fock(usize),
    /// A coherent state with mean photon number `n_bar` (real amplitude).
    Coherent(f64),
}

/// Single-mode exchange model: atom of splitting `omega0`, one mode at
/// `omega_c` with coupling `g`, Fock space truncated at photon number
/// `fock_cutoff` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCConfig {
    pub g: f64,
    pub omega0: f64,
    pub omega_c: f64,
    pub field_state: FieldState,
    pub fock_cutoff: usize,
}

impl JCConfig {
    pub fn new(
        g: f64,
        omega0: f64,
        omega_c: f64,
        field_state: FieldState,
        fock_cutoff: usize,
    ) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::invalid("omega0", "level splitting must be positive"));
        }
        if !(omega_c > 0.0) {
            return Err(Error::invalid("omega_c", "mode frequency must be positive"));
        }
        if !g.is_finite() {
            return Err(Error::invalid("g", "coupling must be finite"));
        }
        match field_state {
            FieldState::Fock(n) => {
                if fock_cutoff < n + 1 {
                    return Err(Error::invalid(
                        "fock_cutoff",
                        format!("need cutoff >= {} for Fock({n})", n + 1),
                    ));
                }
            }
            FieldState::Coherent(n_bar) => {
                if !(n_bar >= 0.0) {
                    return Err(Error::invalid("n_bar", "mean photon number must be >= 0"));
                }
                let needed = n_bar + 8.0 * n_bar.sqrt();
                if (fock_cutoff as f64) < needed {
                    return Err(Error::invalid(
                        "fock_cutoff",
                        format!("need cutoff >= {needed:.1} for Coherent({n_bar}) so the truncated tail mass stays below 1e-8"),
                    ));
                }
            }
        }
        Ok(Self {
            g,
            omega0,
            omega_c,
            field_state,
            fock_cutoff,
        })
    }
}

/// Time series produced by the single-mode reference evolution.
#[derive(Debug, Clone)]
pub struct JcSeries {
    grid: TimeGrid,
    /// Excited-state probability `P_e(t)`.
    pub p_e: Vec<f64>,
    /// Inversion `W(t) = 2 P_e(t) - 1`.
    pub inversion: Vec<f64>,
    /// Total excitation number expectation, conserved by the coupling.
    pub excitation: Vec<f64>,
}

impl JcSeries {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }
}

/// Exact evolution of the single-mode exchange model in the truncated
/// atom x Fock space, starting from the excited atom and the configured
/// field state.
pub fn jc_evolve(config: &JCConfig, grid: &TimeGrid) -> Result<JcSeries> {
    let n_ph = config.fock_cutoff + 1; // photon states 0..=cutoff
    let dim = 2 * n_ph;
    let idx_e = |n: usize| n;
    let idx_g = |n: usize| n_ph + n;

    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..n_ph {
        h[(idx_e(n), idx_e(n))] = 0.5 * config.omega0 + config.omega_c * n as f64;
        h[(idx_g(n), idx_g(n))] = -0.5 * config.omega0 + config.omega_c * n as f64;
    }
    for n in 0..config.fock_cutoff {
        // g (S+ b + S- b^dag): |g, n+1> <-> |e, n>
        let v = config.g * ((n + 1) as f64).sqrt();
        h[(idx_e(n), idx_g(n + 1))] = v;
        h[(idx_g(n + 1), idx_e(n))] = v;
    }

    let mut psi0 = DVector::from_element(dim, 0.0f64);
    match config.field_state {
        FieldState::Fock(n) => psi0[idx_e(n)] = 1.0,
        FieldState::Coherent(n_bar) => {
            let alpha = n_bar.sqrt();
            let mut c = (-0.5 * n_bar).exp();
            for n in 0..n_ph {
                psi0[idx_e(n)] = c;
                c *= alpha / ((n + 1) as f64).sqrt();
            }
            let norm = psi0.norm();
            psi0 /= norm;
        }
    }

    let eig = symmetric_eigen(&h);
    // coefficients of psi0 in the eigenbasis
    let coeffs: Vec<f64> = (0..dim)
        .map(|m| {
            (0..dim)
                .map(|i| eig.vectors[(i, m)] * psi0[i])
                .sum::<f64>()
        })
        .collect();

    let mut p_e = Vec::with_capacity(grid.len());
    let mut inversion = Vec::with_capacity(grid.len());
    let mut excitation = Vec::with_capacity(grid.len());
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for t in grid.times() {
        psi.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for m in 0..dim {
            if coeffs[m] == 0.0 {
                continue;
            }
            let rot = Complex64::from_polar(coeffs[m], -eig.values[m] * t);
            for i in 0..dim {
                psi[i] += rot * eig.vectors[(i, m)];
            }
        }
        let mut pe = 0.0;
        let mut n_exc = 0.0;
        for n in 0..n_ph {
            let we = psi[idx_e(n)].norm_sqr();
            let wg = psi[idx_g(n)].norm_sqr();
            pe += we;
            n_exc += we * (n as f64 + 1.0) + wg * n as f64;
        }
        p_e.push(pe);
        inversion.push(2.0 * pe - 1.0);
        excitation.push(n_exc);
    }
    Ok(JcSeries {
        grid: *grid,
        p_e,
        inversion,
        excitation,
    })
}

/// Moving-RMS envelope of a series, window width in time units.
pub fn rms_envelope(series: &[f64], grid: &TimeGrid, width: f64) -> Vec<f64> {
    let half = ((0.5 * width / grid.step()).round() as usize).max(1);
    (0..series.len())
        .map(|j| {
            let lo = j.saturating_sub(half);
            let hi = (j + half).min(series.len() - 1);
            let ms: f64 = series[lo..=hi].iter().map(|v| v * v).sum::<f64>()
                / (hi - lo + 1) as f64;
            ms.sqrt()
        })
        .collect()
}

/// Time of the revival peak: the argmax of the inversion's RMS envelope
/// (window `4 pi / g`) inside `[0.5, 1.5] * 2 pi sqrt(n_bar) / g`.
pub fn detect_revival(series: &JcSeries, g: f64, n_bar: f64) -> Option<f64> {
    let t_rev = 2.0 * std::f64::consts::PI * n_bar.sqrt() / g;
    let env = rms_envelope(&series.inversion, series.grid(), 4.0 * std::f64::consts::PI / g);
    let grid = series.grid();
    let mut best: Option<(f64, f64)> = None;
    for (j, t) in grid.times().enumerate() {
        if t < 0.5 * t_rev || t > 1.5 * t_rev {
            continue;
        }
        if best.map_or(true, |(_, v)| env[j] > v) {
            best = Some((t, env[j]));
        }
    }
    best.map(|(t, _)| t)
}

/// First time the inversion's RMS envelope falls below 10% of its initial
/// value (the collapse of the Rabi nutation).
pub fn detect_collapse(series: &JcSeries, g: f64) -> Option<f64> {
    let env = rms_envelope(&series.inversion, series.grid(), 4.0 * std::f64::consts::PI / g);
    let threshold = 0.1 * env[0];
    series
        .grid()
        .times()
        .enumerate()
        .find(|&(j, _)| env[j] < threshold)
        .map(|(_, t)| t)
}

/// Oscillation frequency of `P_e(t) = cos^2(Omega t)`, from the last zero
/// crossing of the inversion (linear interpolation; the crossing count fixes
/// the branch). `None` if the inversion never crosses zero.
pub fn rabi_frequency(series: &JcSeries) -> Option<f64> {
    let w = &series.inversion;
    let grid = series.grid();
    let mut count = 0usize;
    let mut last: Option<(usize, f64)> = None;
    for j in 1..w.len() {
        if (w[j - 1] > 0.0 && w[j] <= 0.0) || (w[j - 1] < 0.0 && w[j] >= 0.0) {
            let frac = w[j - 1] / (w[j - 1] - w[j]);
            let t = grid.time(j - 1) + frac * grid.step();
            last = Some((count, t));
            count += 1;
        }
    }
    // W = cos(2 Omega t) crosses zero at 2 Omega t = pi/2 + k pi
    last.map(|(k, t)| (std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI) / (2.0 * t))
}

/// Displaced-oscillator Hamiltonian of one mode on one dephasing branch:
/// `omega n_hat + sign * zeta * g (b + b^dag)`, truncated at `cutoff`.
fn branch_mode_hamiltonian(omega: f64, g: f64, sign: f64, zeta: f64, cutoff: usize) -> DMatrix<f64> {
    let d = cutoff + 1;
    let mut h = DMatrix::zeros(d, d);
    for n in 0..d {
        h[(n, n)] = omega * n as f64;
    }
    for n in 0..cutoff {
        let v = sign * zeta * g * ((n + 1) as f64).sqrt();
        h[(n, n + 1)] = v;
        h[(n + 1, n)] = v;
    }
    h
}

/// Kronecker-sum of per-mode Hamiltonians on the full tensor space.
fn tensor_sum_hamiltonian(per_mode: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d: usize = per_mode.iter().map(|h| h.nrows()).product();
    let mut h = DMatrix::zeros(d, d);
    let mut stride_after = d;
    for hk in per_mode {
        let dk = hk.nrows();
        stride_after /= dk;
        let blocks = d / (dk * stride_after);
        for b in 0..blocks {
            for r in 0..dk {
                for c in 0..dk {
                    if hk[(r, c)] == 0.0 {
                        continue;
                    }
                    for i in 0..stride_after {
                        let row = (b * dk + r) * stride_after + i;
                        let col = (b * dk + c) * stride_after + i;
                        h[(row, col)] += hk[(r, c)];
                    }
                }
            }
        }
    }
    h
}

/// Apply a per-mode propagator along one tensor axis of the state vector.
fn apply_along_axis(
    u: &DMatrix<Complex64>,
    psi: &[Complex64],
    out: &mut [Complex64],
    stride: usize,
) {
    let d = u.nrows();
    let block = d * stride;
    let outer = psi.len() / block;
    for o in 0..outer {
        let base = o * block;
        for i in 0..stride {
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    acc += u[(r, c)] * psi[base + c * stride + i];
                }
                out[base + r * stride + i] = acc;
            }
        }
    }
}

struct BranchEvolution {
    eigs: Vec<Eigen>,
    dims: Vec<usize>,
}

impl BranchEvolution {
    fn new(per_mode: Vec<DMatrix<f64>>) -> Self {
        let dims = per_mode.iter().map(|h| h.nrows()).collect();
        let eigs = per_mode.iter().map(symmetric_eigen).collect();
        Self { eigs, dims }
    }

    fn propagator(&self, k: usize, t: f64) -> DMatrix<Complex64> {
        let eig = &self.eigs[k];
        let d = self.dims[k];
        let mut u = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for m in 0..d {
            let phase = Complex64::from_polar(1.0, -eig.values[m] * t);
            for r in 0..d {
                let vr = eig.vectors[(r, m)];
                if vr == 0.0 {
                    continue;
                }
                for c in 0..d {
                    u[(r, c)] += phase * vr * eig.vectors[(c, m)];
                }
            }
        }
        u
    }

    /// Evolve the tensor vacuum to time `t`.
    fn evolve_vacuum(&self, t: f64) -> Vec<Complex64> {
        let total: usize = self.dims.iter().product();
        let mut psi = vec![Complex64::new(0.0, 0.0); total];
        psi[0] = Complex64::new(1.0, 0.0);
        let mut scratch = vec![Complex64::new(0.0, 0.0); total];
        let mut stride = total;
        for k in 0..self.dims.len() {
            stride /= self.dims[k];
            let u = self.propagator(k, t);
            apply_along_axis(&u, &psi, &mut scratch, stride);
            std::mem::swap(&mut psi, &mut scratch);
        }
        psi
    }
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Brute-force dephasing factor `|<psi_-(t) | psi_+(t)>|` from the two
/// displaced-oscillator branches on truncated Fock spaces, starting from the
/// multimode vacuum. Certifies [`crate::dephasing::dephasing_coherence`].
///
/// Limited to three modes; `fock_cutoff` must be at least 30 so truncation
/// error sits far below the 1e-6 certification tolerance.
pub fn dephasing_oracle(
    modes: &ModeSet,
    fock_cutoff: usize,
    grid: &TimeGrid,
) -> Result<Vec<f64>> {
    Ok(dephasing_oracle_overlap(modes, fock_cutoff, grid, ZCouplingScale::default())?
        .iter()
        .map(|c| c.norm())
        .collect())
}

/// Complex branch overlap, exposed so tests can also pin the phase (zero for
/// the symmetric coupling) and the alternative normalization.
pub fn dephasing_oracle_overlap(
    modes: &ModeSet,
    fock_cutoff: usize,
    grid: &TimeGrid,
    scale: ZCouplingScale,
) -> Result<Vec<Complex64>> {
    if modes.len() > 3 {
        return Err(Error::OracleTooLarge);
    }
    if fock_cutoff < 30 {
        return Err(Error::invalid(
            "fock_cutoff",
            "dephasing oracle requires a cutoff of at least 30",
        ));
    }
    let zeta = scale.factor();
    let d = fock_cutoff + 1;
    let total_dim = d.pow(modes.len() as u32);

    let branch_mats = |sign: f64| -> Vec<DMatrix<f64>> {
        modes
            .modes()
            .iter()
            .map(|m| branch_mode_hamiltonian(m.omega, m.g, sign, zeta, fock_cutoff))
            .collect()
    };

    if total_dim <= FULL_EIG_DIM {
        // one dense eigendecomposition per branch on the full tensor space
        let evolve = |sign: f64| -> (Vec<f64>, DMatrix<f64>) {
            let h = tensor_sum_hamiltonian(&branch_mats(sign));
            let eig = symmetric_eigen(&h);
            (eig.values, eig.vectors)
        };
        let (e_plus, v_plus) = evolve(1.0);
        let (e_minus, v_minus) = evolve(-1.0);
        let state = |vals: &[f64], vecs: &DMatrix<f64>, t: f64| -> Vec<Complex64> {
            let mut psi = vec![Complex64::new(0.0, 0.0); total_dim];
            for m in 0..total_dim {
                let coeff = Complex64::from_polar(vecs[(0, m)], -vals[m] * t);
                for i in 0..total_dim {
                    psi[i] += coeff * vecs[(i, m)];
                }
            }
            psi
        };
        Ok(grid
            .times()
            .map(|t| {
                let plus = state(&e_plus, &v_plus, t);
                let minus = state(&e_minus, &v_minus, t);
                overlap(&minus, &plus)
            })
            .collect())
    } else {
        // commuting per-mode propagators applied to the full tensor state
        let plus = BranchEvolution::new(branch_mats(1.0));
        let minus = BranchEvolution::new(branch_mats(-1.0));
        Ok(grid
            .times()
            .map(|t| overlap(&minus.evolve_vacuum(t), &plus.evolve_vacuum(t)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::dephasing_coherence_scaled;
    use crate::kernel::kernel_from_modes;
    use crate::volterra::solve_u;

    #[test]
    fn resonant_pair_reproduces_vacuum_rabi() {
        let params = TwoLevelParams::new(1.0).unwrap();
        let modes = ModeSet::from_pairs(&[(1.0, 0.3)]).unwrap();
        let sys = SingleExcitationSystem::new(&params, &modes);
        let grid = TimeGrid::new(15.0, 1500).unwrap();
        let a = single_excitation_evolve(&sys, &grid);
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -t) * (0.3 * t).cos();
            assert!((a.u()[j] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn decoupled_modes_give_free_evolution() {
        let params = TwoLevelParams::new(2.0).unwrap();
        let modes = ModeSet::from_pairs(&[(1.0, 0.0), (3.0, 0.0)]).unwrap();
        let sys = SingleExcitationSystem::new(&params, &modes);
        let grid = TimeGrid::new(5.0, 500).unwrap();
        let a = single_excitation_evolve(&sys, &grid);
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -2.0 * t);
            assert!((a.u()[j] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_state_norm_is_conserved() {
        let params = TwoLevelParams::new(1.0).unwrap();
        let modes = ModeSet::from_pairs(&[(0.7, 0.2), (1.1, 0.3), (1.6, 0.1)]).unwrap();
        let sys = SingleExcitationSystem::new(&params, &modes);
        for &t in &[0.0, 1.7, 9.4] {
            let psi = single_excitation_state(&sys, t);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn volterra_matches_oracle_small() {
        let params = TwoLevelParams::new(1.0).unwrap();
        let modes =
            ModeSet::from_pairs(&[(0.6, 0.15), (0.9, 0.2), (1.2, 0.25), (1.5, 0.1), (1.9, 0.2)])
                .unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let grid = TimeGrid::new(10.0, 20_000).unwrap();
        let volterra = solve_u(&kernel, &params, &grid).unwrap();
        let sys = SingleExcitationSystem::new(&params, &modes);
        let oracle = single_excitation_evolve(&sys, &grid);
        let worst = volterra
            .u()
            .iter()
            .zip(oracle.u())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "max |Delta u| = {worst}");
    }

    #[test]
    fn jc_vacuum_equals_single_excitation() {
        let cfg = JCConfig::new(0.3, 1.0, 1.0, FieldState::Fock(0), 4).unwrap();
        let grid = TimeGrid::new(15.0, 1500).unwrap();
        let series = jc_evolve(&cfg, &grid).unwrap();
        for (j, t) in grid.times().enumerate() {
            let want = (0.3 * t).cos().powi(2);
            assert!(
                (series.p_e[j] - want).abs() < 1e-12,
                "t = {t}: {} vs {want}",
                series.p_e[j]
            );
        }
    }

    #[test]
    fn jc_fock_oscillates_at_sqrt_n_plus_one() {
        for n in [0usize, 3, 8] {
            let g = 1.0;
            let cfg = JCConfig::new(g, 1.0, 1.0, FieldState::Fock(n), n + 4).unwrap();
            let grid = TimeGrid::new(30.0, 30_000).unwrap();
            let series = jc_evolve(&cfg, &grid).unwrap();
            let omega = rabi_frequency(&series).unwrap();
            let want = g * ((n + 1) as f64).sqrt();
            assert!(
                (omega - want).abs() < 1e-3,
                "Fock({n}): {omega} vs {want}"
            );
        }
    }

    #[test]
    fn jc_conserves_excitation_number() {
        let cfg = JCConfig::new(0.8, 1.0, 1.2, FieldState::Coherent(4.0), 25).unwrap();
        let grid = TimeGrid::new(20.0, 400).unwrap();
        let series = jc_evolve(&cfg, &grid).unwrap();
        let n0 = series.excitation[0];
        for &n in &series.excitation {
            assert!((n - n0).abs() < 1e-12, "excitation drifted: {n} vs {n0}");
        }
    }

    #[test]
    fn jc_cutoff_violations_are_errors() {
        assert!(JCConfig::new(1.0, 1.0, 1.0, FieldState::Fock(5), 5).is_err());
        assert!(JCConfig::new(1.0, 1.0, 1.0, FieldState::Fock(5), 6).is_ok());
        assert!(JCConfig::new(1.0, 1.0, 1.0, FieldState::Coherent(20.0), 40).is_err());
    }

    #[test]
    fn dephasing_oracle_matches_closed_form_single_mode() {
        // weak coupling g / omega = 0.1
        let modes = ModeSet::from_pairs(&[(2.0, 0.2)]).unwrap();
        let grid = TimeGrid::new(6.0, 240).unwrap();
        let oracle = dephasing_oracle(&modes, 30, &grid).unwrap();
        let closed = dephasing_coherence_scaled(&modes, &grid, ZCouplingScale::SigmaZ).unwrap();
        for j in 0..grid.len() {
            assert!(
                (oracle[j] - closed.coherence_magnitude[j]).abs() < 1e-6,
                "j = {j}: {} vs {}",
                oracle[j],
                closed.coherence_magnitude[j]
            );
        }
    }

    #[test]
    fn dephasing_oracle_phase_is_trivial() {
        let modes = ModeSet::from_pairs(&[(1.5, 0.3)]).unwrap();
        let grid = TimeGrid::new(5.0, 100).unwrap();
        let overlap =
            dephasing_oracle_overlap(&modes, 32, &grid, ZCouplingScale::SigmaZ).unwrap();
        for c in &overlap {
            assert!(c.im.abs() < 1e-9, "symmetric branches must not dephase in phase: {c}");
        }
    }

    #[test]
    fn dephasing_oracle_spin_half_scale() {
        let modes = ModeSet::from_pairs(&[(1.2, 0.25)]).unwrap();
        let grid = TimeGrid::new(6.0, 150).unwrap();
        let oracle = dephasing_oracle_overlap(&modes, 30, &grid, ZCouplingScale::SpinHalf)
            .unwrap();
        let closed = dephasing_coherence_scaled(&modes, &grid, ZCouplingScale::SpinHalf).unwrap();
        for j in 0..grid.len() {
            assert!((oracle[j].norm() - closed.coherence_magnitude[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn dephasing_oracle_two_modes_factorizes() {
        // The two-mode run goes through the full 961-dimensional
        // eigendecomposition; it must equal the product of the single-mode
        // factors.
        let m1 = ModeSet::from_pairs(&[(1.0, 0.2)]).unwrap();
        let m2 = ModeSet::from_pairs(&[(1.9, 0.15)]).unwrap();
        let both = ModeSet::from_pairs(&[(1.0, 0.2), (1.9, 0.15)]).unwrap();
        let grid = TimeGrid::new(5.0, 60).unwrap();
        let d1 = dephasing_oracle(&m1, 30, &grid).unwrap();
        let d2 = dephasing_oracle(&m2, 30, &grid).unwrap();
        let d12 = dephasing_oracle(&both, 30, &grid).unwrap();
        for j in 0..grid.len() {
            assert!(
                (d12[j] - d1[j] * d2[j]).abs() < 1e-9,
                "independence violated at j = {j}"
            );
        }
    }

    #[test]
    fn dephasing_oracle_flat_when_decoupled() {
        let modes = ModeSet::from_pairs(&[(1.0, 0.0)]).unwrap();
        let grid = TimeGrid::new(5.0, 50).unwrap();
        let d = dephasing_oracle(&modes, 30, &grid).unwrap();
        for &v in &d {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dephasing_oracle_rejects_large_environments() {
        let modes = ModeSet::from_pairs(&[(1.0, 0.1), (2.0, 0.1), (3.0, 0.1), (4.0, 0.1)])
            .unwrap();
        let grid = TimeGrid::new(5.0, 50).unwrap();
        assert_eq!(
            dephasing_oracle(&modes, 30, &grid),
            Err(Error::OracleTooLarge)
        );
    }
}
