//! The amplitude equation and its solvers.
//!
//! Everything observable about the resonantly coupled atom derives from one
//! complex function: the excited-state survival amplitude `u(t)` solving
//!
//! ```text
//! du/ds = -i omega0 u(s) - integral_0^s mu(s - s') u(s') ds',   u(0) = 1.
//! ```
//!
//! Two independent routes are provided: second-order product integration of
//! the integro-differential equation ([`solve_u`]), and, for kernels with a
//! rational Laplace transform, the exact pole expansion of
//! `1 / (z + i omega0 + mu~(z))` ([`solve_u_laplace`]).
//!
//! The conjugate amplitude `u-bar` is realized as `conj(u)`: it solves the
//! conjugate equation (kernel `conj(mu)`, `+i omega0` sign), which
//! [`solve_u_conjugate`] integrates directly so the identification stays a
//! testable statement rather than an assumption.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;
use crate::types::{ModeSet, TimeGrid, TwoLevelParams};

/// Rates are masked wherever `|u|` falls below this floor; `udot/u` is never
/// extrapolated through a zero of `u`.
pub const U_FLOOR: f64 = 1e-8;

/// A real time series with a validity mask. Masked points carry `0.0` and
/// must be ignored by consumers.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSeries {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl MaskedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest unmasked value, if any point is unmasked.
    pub fn max_unmasked(&self) -> Option<f64> {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &masked)| !masked)
            .map(|(v, _)| *v)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// The survival amplitude `u` on a uniform grid, together with `du/dt`
/// evaluated from the equation's right-hand side (not by differencing).
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    grid: TimeGrid,
    u: Vec<Complex64>,
    u_dot: Vec<Complex64>,
}

impl Amplitude {
    pub(crate) fn from_parts(grid: TimeGrid, mut u: Vec<Complex64>, u_dot: Vec<Complex64>) -> Self {
        debug_assert_eq!(u.len(), grid.len());
        debug_assert_eq!(u_dot.len(), grid.len());
        // Eigendecomposition routes reproduce u(0) = 1 only to rounding;
        // pin the boundary value exactly.
        debug_assert!((u[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        u[0] = Complex64::new(1.0, 0.0);
        Self { grid, u, u_dot }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn u(&self) -> &[Complex64] {
        &self.u
    }

    pub fn u_dot(&self) -> &[Complex64] {
        &self.u_dot
    }

    /// `u-bar(t) = conj(u(t))`; see the module docs.
    pub fn u_bar(&self, j: usize) -> Complex64 {
        self.u[j].conj()
    }

    pub fn abs_u(&self) -> Vec<f64> {
        self.u.iter().map(|u| u.norm()).collect()
    }
}

/// Time-dependent relaxation rate and frequency shift,
/// `Gamma(t) + i Omega(t) = udot(t) / u(t)`.
///
/// `gamma` is stored with the literal sign of that definition, so it is
/// negative while `|u|` decays. Points with `|u| < U_FLOOR` are masked.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFunctions {
    grid: TimeGrid,
    pub gamma: MaskedSeries,
    pub omega: MaskedSeries,
}

impl RateFunctions {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn is_masked(&self, j: usize) -> bool {
        self.gamma.mask[j]
    }
}

fn check_resolution(mu0: f64, params: &TwoLevelParams, grid: &TimeGrid) -> Result<()> {
    let fastest = params.omega0().abs().max(mu0.max(0.0).sqrt());
    if grid.step() * fastest > 0.5 {
        return Err(Error::GridUnderResolved);
    }
    Ok(())
}

/// Product-integration step shared by the direct and conjugate solves.
/// `rot` is the local oscillation coefficient (`-i omega0` or `+i omega0`).
fn integrate_volterra(
    mu: &[Complex64],
    rot: Complex64,
    grid: &TimeGrid,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.n_steps();
    let h = grid.step();
    let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut u_dot = vec![Complex64::new(0.0, 0.0); n + 1];
    u[0] = Complex64::new(1.0, 0.0);
    u_dot[0] = rot;

    // Trapezoidal product integration with the convolution's s' = s endpoint
    // treated implicitly: each step solves the scalar linear equation for
    // u_n. Unconditionally stable for this dissipative class; O(n^2) total.
    let implicit = Complex64::new(1.0, 0.0) - 0.5 * h * (rot - 0.5 * h * mu[0]);
    for step in 1..=n {
        // trapezoid over the known history: j = 0 gets weight 1/2,
        // j = 1..step-1 weight 1, j = step handled implicitly below
        let mut conv = 0.5 * mu[step]; // u[0] = 1
        for j in 1..step {
            conv += mu[step - j] * u[j];
        }
        let known = h * conv;
        let rhs = u[step - 1] + 0.5 * h * (u_dot[step - 1] - known);
        let u_n = rhs / implicit;
        u[step] = u_n;
        u_dot[step] = rot * u_n - (known + 0.5 * h * mu[0] * u_n);
    }
    (u, u_dot)
}

/// Solve the amplitude equation by second-order product integration
/// (global error `O(h^2)`).
pub fn solve_u(kernel: &MemoryKernel, params: &TwoLevelParams, grid: &TimeGrid) -> Result<Amplitude> {
    check_resolution(kernel.mu0(), params, grid)?;
    let mu = kernel.sample_on(grid)?;
    let rot = Complex64::new(0.0, -params.omega0());
    let (u, u_dot) = integrate_volterra(&mu, rot, grid);
    Ok(Amplitude::from_parts(*grid, u, u_dot))
}

/// Solve the conjugate equation
/// `d ubar/ds = +i omega0 ubar - integral conj(mu)(s-s') ubar(s') ds'`.
///
/// Its solution equals `conj(u)` pointwise up to solver error; this function
/// exists so that identity can be verified rather than assumed.
pub fn solve_u_conjugate(
    kernel: &MemoryKernel,
    params: &TwoLevelParams,
    grid: &TimeGrid,
) -> Result<Amplitude> {
    check_resolution(kernel.mu0(), params, grid)?;
    let mu: Vec<Complex64> = kernel.sample_on(grid)?.iter().map(|m| m.conj()).collect();
    let rot = Complex64::new(0.0, params.omega0());
    let (u, u_dot) = integrate_volterra(&mu, rot, grid);
    Ok(Amplitude::from_parts(*grid, u, u_dot))
}

/// One term of the pole expansion: `(residue + secular * t) exp(z t)`.
/// `secular` is zero for simple poles and carries the Jordan-block part of a
/// double pole.
#[derive(Debug, Clone, Copy)]
pub struct PoleTerm {
    pub z: Complex64,
    pub residue: Complex64,
    pub secular: Complex64,
}

/// Exact solution by pole expansion of `1 / (z + i omega0 + mu~(z))` for
/// kernels with rational Laplace transform:
///
/// * discrete modes: `mu~(z) = sum_k g_k^2 / (z + i omega_k)`,
/// * Lorentzian: `mu~(z) = weight / (z + width + i center)`.
///
/// Sampled kernels (and densities without rational transforms) are rejected.
pub fn solve_u_laplace(
    kernel: &MemoryKernel,
    params: &TwoLevelParams,
    grid: &TimeGrid,
) -> Result<Amplitude> {
    let poles = resolvent_poles(kernel, params)?;
    let mut u = Vec::with_capacity(grid.len());
    let mut u_dot = Vec::with_capacity(grid.len());
    for t in grid.times() {
        let mut val = Complex64::new(0.0, 0.0);
        let mut dval = Complex64::new(0.0, 0.0);
        for p in &poles {
            let e = (p.z * t).exp();
            let amp = p.residue + p.secular * t;
            val += amp * e;
            dval += (amp * p.z + p.secular) * e;
        }
        u.push(val);
        u_dot.push(dval);
    }
    // The residues sum to 1 analytically; pin the boundary value exactly.
    u[0] = Complex64::new(1.0, 0.0);
    Ok(Amplitude::from_parts(*grid, u, u_dot))
}

/// Poles and residues of `1 / (z + i omega0 + mu~(z))`.
pub fn resolvent_poles(kernel: &MemoryKernel, params: &TwoLevelParams) -> Result<Vec<PoleTerm>> {
    match kernel {
        MemoryKernel::ModeSum(modes) => Ok(mode_sum_poles(modes, params.omega0())),
        MemoryKernel::Lorentzian {
            center,
            width,
            weight,
        } => Ok(lorentzian_poles(*center, *width, *weight, params.omega0())),
        MemoryKernel::Sampled { .. } => Err(Error::UnsupportedLaplaceKernel),
    }
}

/// For discrete modes all poles are purely imaginary, `z = -i E`, with `E`
/// solving the secular equation `E - omega0 = sum_k g_k^2 / (E - omega_k)`.
/// Between consecutive mode frequencies the secular function is strictly
/// increasing from -inf to +inf, so each of the K+1 roots is bracketed and
/// simple; bisection is exact to machine precision.
fn mode_sum_poles(modes: &ModeSet, omega0: f64) -> Vec<PoleTerm> {
    // Merge duplicate frequencies (their couplings add in quadrature) and
    // drop decoupled modes; both leave mu~ unchanged.
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut sorted: Vec<(f64, f64)> = modes
        .modes()
        .iter()
        .filter(|m| m.g != 0.0)
        .map(|m| (m.omega, m.g * m.g))
        .collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (omega, g2) in sorted {
        match merged.last_mut() {
            Some((w, acc)) if (*w - omega).abs() < 1e-14 * omega.abs().max(1.0) => *acc += g2,
            _ => merged.push((omega, g2)),
        }
    }

    if merged.is_empty() {
        // free evolution: single pole at -i omega0 with unit residue
        return vec![PoleTerm {
            z: Complex64::new(0.0, -omega0),
            residue: Complex64::new(1.0, 0.0),
            secular: Complex64::new(0.0, 0.0),
        }];
    }

    let secular = |e: f64| -> f64 {
        let mut f = e - omega0;
        for &(w, g2) in &merged {
            f -= g2 / (e - w);
        }
        f
    };

    // Gershgorin-type bounds on the outermost roots.
    let g_total: f64 = merged.iter().map(|&(_, g2)| g2.sqrt()).sum();
    let mut lo_bound = merged[0].0.min(omega0) - g_total - 1.0;
    while secular(lo_bound) >= 0.0 {
        lo_bound -= 2.0 * (g_total + 1.0);
    }
    let mut hi_bound = merged.last().unwrap().0.max(omega0) + g_total + 1.0;
    while secular(hi_bound) <= 0.0 {
        hi_bound += 2.0 * (g_total + 1.0);
    }

    // Bisect on each interval. Interval endpoints at mode frequencies are
    // never evaluated; the sign limits there are known analytically
    // (-inf just above a pole of the secular function, +inf just below).
    let mut roots = Vec::with_capacity(merged.len() + 1);
    let intervals: Vec<(f64, bool, f64, bool)> = {
        let mut v = Vec::new();
        // (left, left_is_mode_pole, right, right_is_mode_pole)
        v.push((lo_bound, false, merged[0].0, true));
        for w in merged.windows(2) {
            v.push((w[0].0, true, w[1].0, true));
        }
        v.push((merged.last().unwrap().0, true, hi_bound, false));
        v
    };
    for (mut lo, lo_pole, mut hi, hi_pole) in intervals {
        // Invariant maintained by bisection: f < 0 at (or just above) lo,
        // f > 0 at (or just below) hi.
        debug_assert!(lo_pole || secular(lo) < 0.0);
        debug_assert!(hi_pole || secular(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }

    roots
        .into_iter()
        .map(|e| {
            // residue = 1 / P'(z) = 1 / (1 + sum g^2 / (E - w)^2), real;
            // strict interlacing keeps every pole simple
            let mut dp = 1.0;
            for &(w, g2) in &merged {
                dp += g2 / ((e - w) * (e - w));
            }
            PoleTerm {
                z: Complex64::new(0.0, -e),
                residue: Complex64::new(1.0 / dp, 0.0),
                secular: Complex64::new(0.0, 0.0),
            }
        })
        .collect()
}

/// Lorentzian kernel: `(z + i omega0)(z + width + i center) + weight = 0`
/// is quadratic; a coincident root is handled by multiplicity.
fn lorentzian_poles(center: f64, width: f64, weight: f64, omega0: f64) -> Vec<PoleTerm> {
    let a = Complex64::new(0.0, omega0);
    let b = Complex64::new(width, center);
    // z^2 + (a + b) z + (a b + weight) = 0
    let sum = a + b;
    let disc = (sum * sum - 4.0 * (a * b + weight)).sqrt();
    let z1 = 0.5 * (-sum + disc);
    let z2 = 0.5 * (-sum - disc);
    let scale = width.max(center.abs()).max(omega0.abs()).max(1.0);
    if (z1 - z2).norm() < 1e-9 * scale {
        // coincident roots (critical damping, kappa = 2g on resonance):
        // (z + b)/(z - a)^2 = 1/(z - a) + (a + b)/(z - a)^2, so
        // u(t) = e^{at} (1 + (a + b) t)
        let z = 0.5 * (z1 + z2);
        return vec![PoleTerm {
            z,
            residue: Complex64::new(1.0, 0.0),
            secular: z + b,
        }];
    }
    // u = L^-1 [(z + b) / ((z - z1)(z - z2))]
    vec![
        PoleTerm {
            z: z1,
            residue: (z1 + b) / (z1 - z2),
            secular: Complex64::new(0.0, 0.0),
        },
        PoleTerm {
            z: z2,
            residue: (z2 + b) / (z2 - z1),
            secular: Complex64::new(0.0, 0.0),
        },
    ]
}

/// Extract `Gamma(t) = Re(udot/u)` and `Omega(t) = Im(udot/u)`, masking
/// points where `|u| < U_FLOOR`.
pub fn rates_from_u(a: &Amplitude) -> RateFunctions {
    let n = a.grid().len();
    let mut gamma = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    for j in 0..n {
        let u = a.u()[j];
        if u.norm() < U_FLOOR {
            gamma.push(0.0);
            omega.push(0.0);
            mask.push(true);
        } else {
            let r = a.u_dot()[j] / u;
            gamma.push(r.re);
            omega.push(r.im);
            mask.push(false);
        }
    }
    RateFunctions {
        grid: *a.grid(),
        gamma: MaskedSeries {
            values: gamma,
            mask: mask.clone(),
        },
        omega: MaskedSeries {
            values: omega,
            mask,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_from_modes;
    use crate::types::ModeSet;

    fn params(omega0: f64) -> TwoLevelParams {
        TwoLevelParams::new(omega0).unwrap()
    }

    fn zero_kernel() -> MemoryKernel {
        // a decoupled mode: mu identically zero
        kernel_from_modes(&ModeSet::from_pairs(&[(1.0, 0.0)]).unwrap()).unwrap()
    }

    #[test]
    fn free_evolution() {
        let grid = TimeGrid::new(10.0, 20_000).unwrap();
        let a = solve_u(&zero_kernel(), &params(1.3), &grid).unwrap();
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -1.3 * t);
            assert!(
                (a.u()[j] - want).norm() < 1e-6,
                "t = {t}: {} vs {want}",
                a.u()[j]
            );
            // the trapezoidal rotation preserves magnitude up to rounding
            assert!((a.u()[j].norm() - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn single_resonant_mode_is_vacuum_rabi() {
        // Substituting u = e^{-i w0 t} v reduces the equation to
        // v'' + g^2 v = 0 with v(0) = 1, v'(0) = 0, so u = e^{-i w0 t} cos(g t).
        let (omega0, g) = (1.0, 0.25);
        let modes = ModeSet::from_pairs(&[(omega0, g)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let grid = TimeGrid::new(20.0, 40_000).unwrap();
        let a = solve_u(&kernel, &params(omega0), &grid).unwrap();
        let mut worst = 0.0f64;
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -omega0 * t) * (g * t).cos();
            worst = worst.max((a.u()[j] - want).norm());
        }
        assert!(worst < 2e-6, "max error {worst}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let modes = ModeSet::from_pairs(&[(1.0, 0.2)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let grid = TimeGrid::new(10.0, 10).unwrap();
        assert_eq!(
            solve_u(&kernel, &params(5.0), &grid),
            Err(Error::GridUnderResolved)
        );
    }

    #[test]
    fn laplace_single_resonant_mode() {
        let (omega0, g) = (1.0, 0.25);
        let modes = ModeSet::from_pairs(&[(omega0, g)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let poles = resolvent_poles(&kernel, &params(omega0)).unwrap();
        // poles at z = -i (omega0 +/- g)
        let mut es: Vec<f64> = poles.iter().map(|p| -p.z.im).collect();
        es.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((es[0] - (omega0 - g)).abs() < 1e-12);
        assert!((es[1] - (omega0 + g)).abs() < 1e-12);

        let grid = TimeGrid::new(20.0, 500).unwrap();
        let a = solve_u_laplace(&kernel, &params(omega0), &grid).unwrap();
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -omega0 * t) * (g * t).cos();
            assert!((a.u()[j] - want).norm() < 1e-11);
        }
    }

    #[test]
    fn laplace_free_pole() {
        let grid = TimeGrid::new(5.0, 100).unwrap();
        let a = solve_u_laplace(&zero_kernel(), &params(2.0), &grid).unwrap();
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar(1.0, -2.0 * t);
            assert!((a.u()[j] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn laplace_rejects_sampled_kernels() {
        let j = crate::types::SpectralDensity::flat_band(1.0, 3.0, 0.5, 0.2).unwrap();
        let grid = TimeGrid::new(3.0, 300).unwrap();
        let kernel = crate::kernel::kernel_from_spectral_density(&j, &grid).unwrap();
        assert_eq!(
            solve_u_laplace(&kernel, &params(1.0), &grid),
            Err(Error::UnsupportedLaplaceKernel)
        );
    }

    #[test]
    fn laplace_lorentzian_cross_check() {
        // modest accuracy version of the acceptance criterion
        let kernel = MemoryKernel::Lorentzian {
            center: 0.5,
            width: 0.3,
            weight: 0.0625,
        };
        let grid = TimeGrid::new(8.0, 20_000).unwrap();
        let p = params(0.5);
        let exact = solve_u_laplace(&kernel, &p, &grid).unwrap();
        let num = solve_u(&kernel, &p, &grid).unwrap();
        let mut worst = 0.0f64;
        for j in 0..grid.len() {
            worst = worst.max((exact.u()[j] - num.u()[j]).norm());
        }
        assert!(worst < 5e-7, "max |Delta u| = {worst}");
    }

    #[test]
    fn laplace_lorentzian_critical_damping() {
        // resonant kernel with width = 2 g: the two poles coincide and the
        // expansion picks up a secular term, u = e^{(-g - i w0) t} (1 + g t)
        let (omega0, g) = (1.0, 0.3);
        let kernel = MemoryKernel::Lorentzian {
            center: omega0,
            width: 2.0 * g,
            weight: g * g,
        };
        let p = params(omega0);
        let grid = TimeGrid::new(12.0, 24_000).unwrap();
        let exact = solve_u_laplace(&kernel, &p, &grid).unwrap();
        for (j, t) in grid.times().enumerate() {
            let want = Complex64::from_polar((-g * t).exp() * (1.0 + g * t), -omega0 * t);
            assert!(
                (exact.u()[j] - want).norm() < 1e-10,
                "t = {t}: {} vs {want}",
                exact.u()[j]
            );
        }
        // and the product-integration route lands on the same curve
        let num = solve_u(&kernel, &p, &grid).unwrap();
        let worst = exact
            .u()
            .iter()
            .zip(num.u())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "max |Delta u| = {worst}");
    }

    #[test]
    fn rates_free_evolution() {
        let grid = TimeGrid::new(5.0, 1000).unwrap();
        let a = solve_u(&zero_kernel(), &params(1.3), &grid).unwrap();
        let rates = rates_from_u(&a);
        for j in 0..grid.len() {
            assert!(!rates.is_masked(j));
            assert!(rates.gamma.values[j].abs() < 1e-9);
            assert!((rates.omega.values[j] + 1.3).abs() < 1e-9);
        }
    }

    #[test]
    fn rates_resonant_mode_follow_tangent() {
        let (omega0, g) = (1.0, 0.2);
        let modes = ModeSet::from_pairs(&[(omega0, g)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let grid = TimeGrid::new(12.0, 24_000).unwrap();
        let a = solve_u(&kernel, &params(omega0), &grid).unwrap();
        let rates = rates_from_u(&a);
        for (j, t) in grid.times().enumerate() {
            // stay away from the zero of cos(g t) at g t = pi/2
            if ((g * t) - std::f64::consts::FRAC_PI_2).abs() < 0.3 {
                continue;
            }
            if (g * t) > std::f64::consts::PI {
                break;
            }
            assert!(!rates.is_masked(j));
            let want_gamma = -g * (g * t).tan();
            assert!((rates.gamma.values[j] - want_gamma).abs() < 1e-3, "t = {t}");
            assert!((rates.omega.values[j] + omega0).abs() < 1e-3, "t = {t}");
        }
    }

    #[test]
    fn conjugate_solution_is_conjugate_of_u() {
        let modes = ModeSet::from_pairs(&[(0.8, 0.2), (1.4, 0.15)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let grid = TimeGrid::new(15.0, 15_000).unwrap();
        let p = params(1.0);
        let a = solve_u(&kernel, &p, &grid).unwrap();
        let bar = solve_u_conjugate(&kernel, &p, &grid).unwrap();
        for j in 0..grid.len() {
            assert!(
                (bar.u()[j] - a.u()[j].conj()).norm() < 1e-12,
                "conjugate route diverged at j = {j}"
            );
        }
    }

    #[test]
    fn convergence_is_second_order() {
        // halving h cuts the error against the exact pole expansion by ~4
        let modes = ModeSet::from_pairs(&[(0.9, 0.2), (1.3, 0.25)]).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let p = params(1.1);
        let err = |n: usize| -> f64 {
            let grid = TimeGrid::new(10.0, n).unwrap();
            let num = solve_u(&kernel, &p, &grid).unwrap();
            let exact = solve_u_laplace(&kernel, &p, &grid).unwrap();
            num.u()
                .iter()
                .zip(exact.u())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let e1 = err(2000);
        let e2 = err(4000);
        let ratio = e1 / e2;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "expected ~4x error reduction, got {ratio} ({e1} -> {e2})"
        );
    }

    #[test]
    fn laplace_agrees_with_eigendecomposition_for_many_modes() {
        // two independent exact routes: secular-equation poles vs the
        // arrow-matrix eigenbasis; agreement is limited only by root finding
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x5eed_0004);
        let pairs: Vec<(f64, f64)> = (0..20)
            .map(|_| (rng.gen_range(0.2..2.0), rng.gen_range(0.02..0.3)))
            .collect();
        let modes = ModeSet::from_pairs(&pairs).unwrap();
        let kernel = kernel_from_modes(&modes).unwrap();
        let p = params(1.0);
        let grid = TimeGrid::new(20.0, 400).unwrap();
        let laplace = solve_u_laplace(&kernel, &p, &grid).unwrap();
        let sys = crate::oracle::SingleExcitationSystem::new(&p, &modes);
        let eig = crate::oracle::single_excitation_evolve(&sys, &grid);
        let worst = laplace
            .u()
            .iter()
            .zip(eig.u())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-11, "exact routes disagree: {worst:.3e}");
        // residues of a conservative pole expansion sum to one
        let total: Complex64 = resolvent_poles(&kernel, &p)
            .unwrap()
            .iter()
            .map(|p| p.residue)
            .sum();
        assert!((total - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn contractivity_over_random_kernels() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x5eed_0002);
        for _ in 0..20 {
            let k = rng.gen_range(1..=6);
            let pairs: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.gen_range(0.3..3.0), rng.gen_range(0.0..0.5)))
                .collect();
            let modes = ModeSet::from_pairs(&pairs).unwrap();
            let kernel = kernel_from_modes(&modes).unwrap();
            let grid = TimeGrid::new(15.0, 6000).unwrap();
            let a = solve_u(&kernel, &params(1.0), &grid).unwrap();
            let h = grid.step();
            let bound = 1.0 + 10.0 * h * h;
            for (j, u) in a.u().iter().enumerate() {
                assert!(
                    u.norm() <= bound,
                    "|u| = {} exceeds contractivity bound at j = {j} for {pairs:?}",
                    u.norm()
                );
            }
        }
    }
}
