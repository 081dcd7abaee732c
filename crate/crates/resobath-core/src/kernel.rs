//! Memory kernel construction.
//!
//! The kernel `mu(s) = sum_k g_k^2 exp(-i omega_k s)` is the two-time
//! correlation of the field seen by the atom; it is the only object the
//! amplitude equation needs. Discrete mode sets and the Lorentzian density
//! have closed forms; other continuum densities are sampled on the solver
//! grid by Fourier quadrature, `mu(s) = integral J(omega) exp(-i omega s)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::types::{Mode, ModeSet, SpectralDensity, TimeGrid};

/// Relative tolerance of the continuum-kernel quadrature.
const QUAD_REL_TOL: f64 = 1e-9;

/// The memory kernel `mu(s)`, either in closed form or sampled on a grid.
///
/// Closed forms evaluate anywhere; sampled kernels live on the same uniform
/// grid as the Volterra solver so the convolution never interpolates.
/// Every constructor guarantees `mu(-s) = conj(mu(s))` and `mu(0)` real and
/// non-negative.
#[derive(Debug, Clone, PartialEq)]
pub enum MemoryKernel {
    /// `mu(s) = sum_k g_k^2 exp(-i omega_k s)`.
    ModeSum(ModeSet),
    /// `mu(s) = weight * exp(-width |s| - i center s)`.
    Lorentzian {
        center: f64,
        width: f64,
        weight: f64,
    },
    /// Quadrature samples `mu(j h)` for `j = 0..=n_steps`.
    Sampled {
        grid: TimeGrid,
        values: Vec<Complex64>,
    },
}

impl MemoryKernel {
    /// `mu(0) = sum g_k^2` (or the total spectral weight).
    pub fn mu0(&self) -> f64 {
        match self {
            MemoryKernel::ModeSum(modes) => modes.coupling_power(),
            MemoryKernel::Lorentzian { weight, .. } => *weight,
            MemoryKernel::Sampled { values, .. } => values[0].re,
        }
    }

    /// Evaluate a closed-form kernel at any `s`; `None` for sampled kernels.
    pub fn eval(&self, s: f64) -> Option<Complex64> {
        match self {
            MemoryKernel::ModeSum(modes) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in modes.modes() {
                    acc += Complex64::from_polar(m.g * m.g, -m.omega * s);
                }
                Some(acc)
            }
            MemoryKernel::Lorentzian {
                center,
                width,
                weight,
            } => Some(Complex64::from_polar(
                weight * (-width * s.abs()).exp(),
                -center * s,
            )),
            MemoryKernel::Sampled { .. } => None,
        }
    }

    /// Kernel values on the solver grid, `mu(j h)` for `j = 0..=n_steps`.
    ///
    /// Sampled kernels must already live on `grid`; closed forms are
    /// evaluated directly.
    pub fn sample_on(&self, grid: &TimeGrid) -> Result<Vec<Complex64>> {
        match self {
            MemoryKernel::Sampled { grid: g, values } => {
                if g != grid {
                    return Err(Error::GridMismatch(
                        "sampled kernel was built on a different time grid",
                    ));
                }
                Ok(values.clone())
            }
            _ => Ok((0..grid.len())
                .map(|j| self.eval(grid.time(j)).expect("closed form"))
                .collect()),
        }
    }
}

/// Ideal one-dimensional cavity: field vanishing on two plates a distance
/// `length` apart, atom at `x_atom` in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    pub length: f64,
    pub x_atom: f64,
    /// Overall coupling scale multiplying every mode.
    pub lambda: f64,
    /// Number of modes kept in the sum.
    pub n_modes: usize,
}

impl CavityConfig {
    pub fn new(length: f64, x_atom: f64, lambda: f64, n_modes: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::invalid("length", "plate separation must be positive"));
        }
        if !(x_atom > 0.0 && x_atom < length) {
            return Err(Error::invalid(
                "x_atom",
                "atom must sit strictly between the plates",
            ));
        }
        if n_modes < 1 {
            return Err(Error::invalid("n_modes", "need at least one mode"));
        }
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda", "coupling scale must be finite"));
        }
        Ok(Self {
            length,
            x_atom,
            lambda,
            n_modes,
        })
    }
}

/// Build the closed-form kernel of a discrete mode set.
pub fn kernel_from_modes(modes: &ModeSet) -> Result<MemoryKernel> {
    if modes.is_empty() {
        return Err(Error::EmptyEnvironment);
    }
    Ok(MemoryKernel::ModeSum(modes.clone()))
}

/// Build the kernel of a continuum density.
///
/// The Lorentzian has the exact transform
/// `mu(s) = weight * exp(-width |s| - i center s)` and is returned in closed
/// form; other densities are sampled on `grid` by adaptive quadrature over
/// their support.
pub fn kernel_from_spectral_density(
    density: &SpectralDensity,
    grid: &TimeGrid,
) -> Result<MemoryKernel> {
    if let SpectralDensity::Lorentzian {
        center,
        width,
        weight,
    } = *density
    {
        return Ok(MemoryKernel::Lorentzian {
            center,
            width,
            weight,
        });
    }
    let values = (0..grid.len())
        .map(|j| sample_density_fourier(density, grid.time(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MemoryKernel::Sampled {
        grid: *grid,
        values,
    })
}

/// One Fourier sample `mu(s) = integral J(omega) exp(-i omega s) d omega`.
/// Exposed to the kernel tests, which probe negative `s` for hermiticity.
pub(crate) fn sample_density_fourier(density: &SpectralDensity, s: f64) -> Result<Complex64> {
    let (lo, hi) = density.support();
    quad::integrate(
        &mut |omega| Complex64::from_polar(density.eval(omega), -omega * s),
        lo,
        hi,
        s.abs(),
        QUAD_REL_TOL,
    )
}

/// Discrete modes of the 1D Dirichlet cavity:
/// `omega_n = n pi / L`, `g_n = |lambda sin(n pi x / L)| / sqrt(omega_n L)`,
/// for `n = 1..=n_modes`.
///
/// The `1/sqrt(omega_n L)` factor mimics the field normalization per mode;
/// the sign of the mode function is dropped since only `g_n^2` enters the
/// kernel.
pub fn cavity_mode_set(config: &CavityConfig) -> Result<ModeSet> {
    let mut modes = Vec::with_capacity(config.n_modes);
    for n in 1..=config.n_modes {
        let omega = n as f64 * std::f64::consts::PI / config.length;
        let profile = (n as f64 * std::f64::consts::PI * config.x_atom / config.length).sin();
        let g = (config.lambda * profile / (omega * config.length).sqrt()).abs();
        modes.push(Mode { omega, g });
    }
    ModeSet::new(modes)
}

/// Uniform midpoint discretization of a continuum density into `n_modes`
/// modes with `g_k^2 = J(omega_k) * d_omega`, over the density's support.
///
/// Used where a model needs discrete modes (the dephasing model, shared-
/// environment comparisons) but the scenario specifies a density.
pub fn discretize_density(density: &SpectralDensity, n_modes: usize) -> Result<ModeSet> {
    if n_modes == 0 {
        return Err(Error::EmptyEnvironment);
    }
    let (lo, hi) = density.support();
    let lo = lo.max(0.0);
    let d_omega = (hi - lo) / n_modes as f64;
    let mut modes = Vec::with_capacity(n_modes);
    for k in 0..n_modes {
        let omega = lo + (k as f64 + 0.5) * d_omega;
        let g = (density.eval(omega) * d_omega).sqrt();
        modes.push(Mode { omega, g });
    }
    ModeSet::new(modes)
}
