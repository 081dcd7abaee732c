//! Output files: fixed-column CSV time series and the TOML summary.
//!
//! Both are byte-deterministic for a given config: floats are printed with a
//! fixed scientific format in the CSV and serde's round-trip formatting in
//! the summary, and records appear in declaration/sweep order.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Fixed CSV column order.
pub const CSV_HEADER: &str =
    "t,u_re,u_im,abs_u,P_emission,rho_ee,rho_eg_re,rho_eg_im,gamma_t,omega_t,masked";

#[derive(Debug, Clone, Copy)]
pub struct CsvRow {
    pub t: f64,
    pub u_re: f64,
    pub u_im: f64,
    pub abs_u: f64,
    pub p_emission: f64,
    pub rho_ee: f64,
    pub rho_eg_re: f64,
    pub rho_eg_im: f64,
    pub gamma_t: f64,
    pub omega_t: f64,
    pub masked: bool,
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            r.t,
            r.u_re,
            r.u_im,
            r.abs_u,
            r.p_emission,
            r.rho_ee,
            r.rho_eg_re,
            r.rho_eg_im,
            r.gamma_t,
            r.omega_t,
            u8::from(r.masked)
        )?;
    }
    w.flush()
}

/// One record per scenario or sweep point. Optional fields are omitted when
/// the quantity does not exist for the model or did not converge.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRecord {
    pub scenario: String,
    pub model: &'static str,
    /// Environment kind plus a hash of its canonical description.
    pub environment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_over_t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_fit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_quality: Option<f64>,
    /// True when `fit_quality > 0.99`; `gamma_fit` should only be quoted as
    /// an asymptotic rate when this holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_fit_reliable: Option<bool>,
    /// Dephasing-model coherence 1/e time (sigma_z and both models).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_z_t2: Option<f64>,
    /// `T2(sigma_pm) / T2(sigma_z)` when both exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_z_population_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_local_max: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_local_min: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryMetadata {
    pub tool: String,
    pub master_equation_sign: &'static str,
    pub gamma_convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub metadata: SummaryMetadata,
    pub record: Vec<SummaryRecord>,
}

pub fn write_summary(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let text = toml::to_string(summary).expect("summary serializes");
    std::fs::write(path, text)
}

/// FNV-1a over the canonical environment description.
pub fn digest(description: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in description.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
