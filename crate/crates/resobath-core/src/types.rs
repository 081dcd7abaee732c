//! Shared domain types: atom parameters, field mode sets, spectral densities,
//! time grids, two-level states, and the fixed spin operators.
//!
//! Conventions used throughout the crate:
//! * natural units, `hbar = c = 1`; every rate and frequency is an angular
//!   frequency in the same unit,
//! * the **first** basis vector is the excited level, so a density matrix is
//!   `[[1 - x, y], [conj(y), x]]` with `x` the ground population and `y` the
//!   excited-ground coherence,
//! * mode couplings are real; the mode-function phase is absorbed into the
//!   mode definition, which is possible because only `g^2` ever enters the
//!   memory kernel.
//!
//! All types here are immutable value types and can be shared freely across
//! threads.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the state-validity predicate.
pub const STATE_TOL: f64 = 1e-12;

/// Parameters of the bare two-level system: the level splitting `omega0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    omega0: f64,
}

impl TwoLevelParams {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::invalid("omega0", "level splitting must be positive"));
        }
        Ok(Self { omega0 })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

/// One field mode: angular frequency and (real) coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub g: f64,
}

/// A discrete set of field modes, the microscopic description of the
/// environment. Frequencies must be positive; couplings are real by
/// construction (the API takes `f64`, so complex couplings are
/// unrepresentable).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyEnvironment);
        }
        for m in &modes {
            if !(m.omega > 0.0) || !m.omega.is_finite() {
                return Err(Error::invalid(
                    "modes.omega",
                    format!("mode frequency must be positive, got {}", m.omega),
                ));
            }
            if !m.g.is_finite() {
                return Err(Error::invalid("modes.g", "coupling must be finite"));
            }
        }
        Ok(Self { modes })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(omega, g)| Mode { omega, g }).collect())
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `sum_k g_k^2`, the kernel value at `s = 0`.
    pub fn coupling_power(&self) -> f64 {
        self.modes.iter().map(|m| m.g * m.g).sum()
    }

    pub fn max_omega(&self) -> f64 {
        self.modes.iter().map(|m| m.omega).fold(0.0, f64::max)
    }
}

/// Continuum environment description `J(omega)`.
///
/// `J` is the coupling-weighted mode density: the memory kernel is
/// `mu(s) = integral J(omega) exp(-i omega s) d omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    /// `J(omega) = (weight / pi) * width / ((omega - center)^2 + width^2)`,
    /// normalized so the full-line integral equals `weight` (= `g^2`).
    Lorentzian {
        center: f64,
        width: f64,
        weight: f64,
    },
    /// `J(omega) = density * coupling^2` on `[omega_min, omega_max]`, zero
    /// outside.
    FlatBand {
        omega_min: f64,
        omega_max: f64,
        density: f64,
        coupling: f64,
    },
    /// `J(omega) = scale * omega^exponent * cutoff^(1-exponent) * exp(-omega/cutoff)`
    /// for `omega > 0`. `exponent = 1` is ohmic, `> 1` supraohmic.
    OhmicFamily {
        exponent: f64,
        scale: f64,
        cutoff: f64,
    },
}

impl SpectralDensity {
    pub fn lorentzian(center: f64, width: f64, weight: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::invalid("width", "Lorentzian width must be positive"));
        }
        if !(weight >= 0.0) {
            return Err(Error::invalid("weight", "weight must be non-negative"));
        }
        if !center.is_finite() {
            return Err(Error::invalid("center", "center must be finite"));
        }
        Ok(Self::Lorentzian {
            center,
            width,
            weight,
        })
    }

    pub fn flat_band(omega_min: f64, omega_max: f64, density: f64, coupling: f64) -> Result<Self> {
        if !(omega_min < omega_max) {
            return Err(Error::invalid(
                "omega_min",
                "flat band requires omega_min < omega_max",
            ));
        }
        if !(omega_min >= 0.0) {
            return Err(Error::invalid("omega_min", "band edge must be non-negative"));
        }
        if !(density >= 0.0) {
            return Err(Error::invalid("density", "mode density must be non-negative"));
        }
        Ok(Self::FlatBand {
            omega_min,
            omega_max,
            density,
            coupling,
        })
    }

    pub fn ohmic_family(exponent: f64, scale: f64, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::invalid("cutoff", "cutoff frequency must be positive"));
        }
        if !(exponent > 0.0) {
            return Err(Error::invalid(
                "exponent",
                "exponent must be positive for an integrable kernel",
            ));
        }
        if !(scale >= 0.0) {
            return Err(Error::invalid("scale", "scale must be non-negative"));
        }
        Ok(Self::OhmicFamily {
            exponent,
            scale,
            cutoff,
        })
    }

    /// Evaluate `J(omega)`.
    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            SpectralDensity::Lorentzian {
                center,
                width,
                weight,
            } => {
                let d = omega - center;
                weight / std::f64::consts::PI * width / (d * d + width * width)
            }
            SpectralDensity::FlatBand {
                omega_min,
                omega_max,
                density,
                coupling,
            } => {
                if omega >= omega_min && omega <= omega_max {
                    density * coupling * coupling
                } else {
                    0.0
                }
            }
            SpectralDensity::OhmicFamily {
                exponent,
                scale,
                cutoff,
            } => {
                if omega <= 0.0 {
                    0.0
                } else {
                    scale * omega.powf(exponent) * cutoff.powf(1.0 - exponent)
                        * (-omega / cutoff).exp()
                }
            }
        }
    }

    /// Frequency interval used for quadrature; the density is zero or
    /// negligible at the 1e-16 level outside it.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            SpectralDensity::Lorentzian { center, width, .. } => {
                // Only used by diagnostics: the builder returns the
                // closed-form kernel for the Lorentzian, tails included.
                (center - 40.0 * width, center + 40.0 * width)
            }
            SpectralDensity::FlatBand {
                omega_min,
                omega_max,
                ..
            } => (omega_min, omega_max),
            SpectralDensity::OhmicFamily {
                exponent, cutoff, ..
            } => (0.0, cutoff * (45.0 + exponent.max(1.0))),
        }
    }
}

/// Uniform time grid on `[0, t_max]` with `n_steps` steps
/// (`n_steps + 1` sample points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::invalid("t_max", "t_max must be positive"));
        }
        if n_steps < 2 {
            return Err(Error::invalid("n_steps", "need at least 2 steps"));
        }
        Ok(Self { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Step size `h = t_max / n_steps`.
    pub fn step(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Number of sample points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.time(j))
    }

    /// A grid over the same interval with half the step size.
    pub fn refined(&self) -> TimeGrid {
        TimeGrid {
            t_max: self.t_max,
            n_steps: self.n_steps * 2,
        }
    }

    /// Index of the sample closest to time `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        ((t / self.step()).round() as usize).min(self.n_steps)
    }
}

/// Two-level density matrix in the `(x, y)` parametrization:
/// `rho = [[1 - x, y], [conj(y), x]]` in the (excited, ground) basis, so
/// `rho_ee = 1 - x` and `rho_eg = y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub x: f64,
    pub y: Complex64,
}

impl TwoLevelState {
    pub fn new(x: f64, y: Complex64) -> Result<Self> {
        let s = Self { x, y };
        if !validate_state(&s) {
            return Err(Error::invalid(
                "state",
                format!(
                    "not a valid density matrix: x = {x}, |y| = {}, det = {}",
                    y.norm(),
                    s.determinant()
                ),
            ));
        }
        Ok(s)
    }

    /// Fully excited atom, `rho_ee = 1`.
    pub fn excited() -> Self {
        Self {
            x: 0.0,
            y: Complex64::new(0.0, 0.0),
        }
    }

    /// Ground state, `rho_ee = 0`.
    pub fn ground() -> Self {
        Self {
            x: 1.0,
            y: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho_ee(&self) -> f64 {
        1.0 - self.x
    }

    pub fn rho_gg(&self) -> f64 {
        self.x
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.y
    }

    /// `det rho = x (1 - x) - |y|^2`; non-negative iff the state is positive.
    pub fn determinant(&self) -> f64 {
        self.x * (1.0 - self.x) - self.y.norm_sqr()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        let ee = 1.0 - self.x;
        ee * ee + self.x * self.x + 2.0 * self.y.norm_sqr()
    }

    /// Explicit 2x2 matrix in the (excited, ground) basis.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(1.0 - self.x, 0.0),
            self.y,
            self.y.conj(),
            Complex64::new(self.x, 0.0),
        )
    }
}

/// True iff `s` is a valid density matrix within [`STATE_TOL`]:
/// `0 <= x <= 1` and `det rho >= 0`. For a hermitian 2x2 matrix with unit
/// trace these two conditions are equivalent to both eigenvalues being
/// non-negative.
pub fn validate_state(s: &TwoLevelState) -> bool {
    s.x >= -STATE_TOL && s.x <= 1.0 + STATE_TOL && s.determinant() >= -STATE_TOL
}

/// The fixed 2x2 spin operators in the (excited, ground) basis.
pub struct SpinOperators;

impl SpinOperators {
    pub fn s_z() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        )
    }

    pub fn s_plus() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn s_minus() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn sigma_z() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        )
    }

    pub fn sigma_x() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn sigma_y() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        )
    }

    /// Excited-state projector `S_+ S_-`.
    pub fn excited_projector() -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }
}
