//! Size of the dephasing coupling generated beyond the dipole approximation.
//!
//! Evaluating the mode functions away from the atom's position produces a
//! level-diagonal coupling `g_iik = c_k (k . q_i)` from which the `sigma_z`
//! channel inherits `g1k = g_11k - g_22k`. The point of this module is the
//! ratio of that channel to the dipole coupling,
//! `|g1k / g_k| = |k . (q1 - q2)| / (m omega_k d12)`, which is tiny for
//! atomic scales and optical frequencies: the dephasing channel is not where
//! a radiatively coupled two-level system loses its coherence.
//!
//! Units: the caller supplies `q1`, `q2`, `d12` and `m` in one consistent
//! system with `hbar = c = 1`. The prefactor `c_k` is implemented in reduced
//! form with the charge and mode-volume factors set to one
//! (`c_k = -(1/m) (2 omega_k)^{-1/2}`); the ratio and its bound are
//! independent of that choice.

use crate::error::{Error, Result};

/// Level-diagonal matrix elements `q_i` and the dipole data they compete
/// with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomGeometry {
    pub q1: [f64; 3],
    pub q2: [f64; 3],
    /// Dipole matrix element magnitude between the two levels.
    pub d12: f64,
    /// Electron mass in the chosen units.
    pub m: f64,
}

impl AtomGeometry {
    pub fn new(q1: [f64; 3], q2: [f64; 3], d12: f64, m: f64) -> Result<Self> {
        if !(d12 > 0.0) {
            return Err(Error::invalid("d12", "dipole matrix element must be positive"));
        }
        if !(m > 0.0) {
            return Err(Error::invalid("m", "mass must be positive"));
        }
        Ok(Self { q1, q2, d12, m })
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Reduced `c_k` prefactor; see the module docs for the convention.
fn c_k(m: f64, omega_k: f64) -> f64 {
    -1.0 / (m * (2.0 * omega_k).sqrt())
}

/// The `sigma_z`-channel and identity-channel couplings
/// `(g1k, g2k) = (g_11k - g_22k, g_11k + g_22k)` with `g_iik = c_k (k . q_i)`.
///
/// The caller is responsible for `|k| = omega_k` (`c = 1`).
pub fn z_couplings(geom: &AtomGeometry, k_vec: [f64; 3], omega_k: f64) -> (f64, f64) {
    let c = c_k(geom.m, omega_k);
    let g11 = c * dot(k_vec, geom.q1);
    let g22 = c * dot(k_vec, geom.q2);
    (g11 - g22, g11 + g22)
}

/// The ratio of the generated `sigma_z` coupling to the dipole coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRatio {
    /// `|k . (q1 - q2)| / (m omega_k d12)`, exact.
    pub ratio: f64,
    /// `|k| |q1 - q2| / (m omega_k d12)`, the Cauchy-Schwarz bound on the
    /// ratio, kept in unreduced form.
    pub bound: f64,
}

/// Evaluate the ratio `|g1k / g_k|` and its bound, exactly as the expressions
/// are written (no cancellation of `omega_k` against `|k|`).
pub fn coupling_ratio_bound(
    geom: &AtomGeometry,
    k_vec: [f64; 3],
    omega_k: f64,
) -> Result<CouplingRatio> {
    if geom.d12 == 0.0 {
        return Err(Error::DegenerateDipole);
    }
    let dq = [
        geom.q1[0] - geom.q2[0],
        geom.q1[1] - geom.q2[1],
        geom.q1[2] - geom.q2[2],
    ];
    let denom = geom.m * omega_k * geom.d12;
    Ok(CouplingRatio {
        ratio: dot(k_vec, dq).abs() / denom,
        bound: norm(k_vec) * norm(dq) / denom,
    })
}

/// Dipole coupling magnitude in the same reduced convention as
/// [`z_couplings`]: `omega_k d12 / sqrt(2 omega_k)` with the polarization
/// overlap taken maximal. Used to convert the ratio bound into an absolute
/// bound on the generated dephasing coupling.
pub fn dipole_coupling_magnitude(geom: &AtomGeometry, omega_k: f64) -> f64 {
    omega_k * geom.d12 / (2.0 * omega_k).sqrt()
}

/// The dephasing-channel mode this wavevector generates: frequency
/// `omega_k`, coupling `|g1k|`. Feed a set of these into
/// [`crate::dephasing::dephasing_coherence`] to bound how much the
/// beyond-dipole channel can actually dephase.
pub fn z_coupling_mode(geom: &AtomGeometry, k_vec: [f64; 3], omega_k: f64) -> crate::types::Mode {
    let (g1, _) = z_couplings(geom, k_vec, omega_k);
    crate::types::Mode {
        omega: omega_k,
        g: g1.abs(),
    }
}
