//! Scenario execution: dispatch to the library, collect CSV rows and summary
//! records.

use num_complex::Complex64;

use resobath_core::dephasing::dephasing_coherence_scaled;
use resobath_core::evolution::Timescales;
use resobath_core::oracle;
use resobath_core::{
    cavity_mode_set, compare_models, discretize_density, extract_timescales, kernel_from_modes,
    kernel_from_spectral_density, propagate, rates_from_u, solve_u, Amplitude, Error, MemoryKernel,
    ModeSet, RateFunctions, TimeGrid, Trajectory,
};

use crate::config::{Environment, Model, Scenario};
use crate::output::{digest, CsvRow, SummaryRecord};
use crate::CliError;

/// Everything a finished scenario hands to the collector: zero, one, or two
/// CSV series plus the summary record.
pub struct ScenarioResult {
    /// `(file stem, rows)`; two entries for the `both` model.
    pub series: Vec<(String, Vec<CsvRow>)>,
    pub record: SummaryRecord,
}

fn numerical(err: Error) -> CliError {
    CliError::Numerical(err.to_string())
}

/// Threshold above which the tail fit counts as a trustworthy exponential.
const FIT_QUALITY_GATE: f64 = 0.99;

fn file_stem(s: &Scenario) -> String {
    match s.sweep_point {
        Some((index, _)) => format!("{}_sweep{index:03}", s.name),
        None => s.name.clone(),
    }
}

/// Discrete modes for models that need them, discretizing continuum
/// densities on a grid fine enough that no recurrence falls inside the
/// window.
fn modes_for(s: &Scenario) -> Result<ModeSet, CliError> {
    match &s.environment {
        Environment::Modes(m) => Ok(m.clone()),
        Environment::Cavity(c) => cavity_mode_set(c).map_err(numerical),
        Environment::Density(j) => {
            let n = s.n_discretize.unwrap_or_else(|| {
                let (lo, hi) = j.support();
                let span = (hi - lo).max(1.0);
                ((span * s.grid.t_max() / std::f64::consts::PI).ceil() as usize * 2)
                    .clamp(50, 4000)
            });
            discretize_density(j, n).map_err(numerical)
        }
    }
}

fn kernel_for(s: &Scenario) -> Result<MemoryKernel, CliError> {
    match &s.environment {
        Environment::Modes(m) => kernel_from_modes(m).map_err(numerical),
        Environment::Cavity(c) => {
            kernel_from_modes(&cavity_mode_set(c).map_err(numerical)?).map_err(numerical)
        }
        Environment::Density(j) => kernel_from_spectral_density(j, &s.grid).map_err(numerical),
    }
}

fn amplitude_rows(
    grid: &TimeGrid,
    a: &Amplitude,
    rates: &RateFunctions,
    traj: &Trajectory,
) -> Vec<CsvRow> {
    (0..grid.len())
        .map(|j| CsvRow {
            t: grid.time(j),
            u_re: a.u()[j].re,
            u_im: a.u()[j].im,
            abs_u: traj.abs_u()[j],
            p_emission: traj.emission()[j],
            rho_ee: traj.states()[j].rho_ee(),
            rho_eg_re: traj.states()[j].rho_eg().re,
            rho_eg_im: traj.states()[j].rho_eg().im,
            gamma_t: rates.gamma.values[j],
            omega_t: rates.omega.values[j],
            masked: rates.is_masked(j),
        })
        .collect()
}

fn base_record(s: &Scenario) -> SummaryRecord {
    let description = s.environment.describe();
    let kind = description.split(['(', '[']).next().unwrap_or("env");
    SummaryRecord {
        scenario: s.name.clone(),
        model: s.model.as_str(),
        environment: format!("{kind}#{}", digest(&description)),
        sweep_index: s.sweep_point.map(|(i, _)| i),
        sweep_value: s.sweep_point.map(|(_, v)| v),
        t1: None,
        t2: None,
        t1_over_t2: None,
        gamma_fit: None,
        fit_quality: None,
        gamma_fit_reliable: None,
        sigma_z_t2: None,
        t2_ratio: None,
        sigma_z_population_drift: None,
        is_local_max: None,
        is_local_min: None,
    }
}

fn fill_timescales(record: &mut SummaryRecord, ts: &Timescales) {
    record.t1 = ts.t1;
    record.t2 = ts.t2;
    record.t1_over_t2 = ts.t1_over_t2();
    record.gamma_fit = ts.gamma_fit;
    record.fit_quality = Some(ts.fit_quality);
    record.gamma_fit_reliable = ts.gamma_fit.map(|_| ts.fit_quality > FIT_QUALITY_GATE);
}

/// Exchange-model pipeline shared by `sigma_pm`, `both`, and the
/// single-excitation oracle (which differs only in how `u` is produced).
fn exchange_pipeline(
    s: &Scenario,
    a: &Amplitude,
) -> (Vec<CsvRow>, Option<Timescales>) {
    let rates = rates_from_u(a);
    let traj = propagate(a, &s.initial);
    let rows = amplitude_rows(&s.grid, a, &rates, &traj);
    // a non-decaying scenario is a valid run with no timescales
    let ts = extract_timescales(&traj).ok();
    (rows, ts)
}

fn dephasing_rows(
    s: &Scenario,
    modes: &ModeSet,
    result: &resobath_core::DephasingResult,
) -> Result<(Vec<CsvRow>, SummaryRecord), CliError> {
    let zeta2 = s.z_scale.factor() * s.z_scale.factor();
    let y0 = s.initial.y;
    let rho_ee0 = s.initial.rho_ee();
    let rows: Vec<CsvRow> = (0..s.grid.len())
        .map(|j| {
            let t = s.grid.time(j);
            let d = result.coherence_magnitude[j];
            let phase = result.phase[j];
            let factor = Complex64::from_polar(d, phase);
            let rho_eg = factor * y0;
            // d ln D / dt in closed form
            let rate: f64 = modes
                .modes()
                .iter()
                .map(|m| -4.0 * zeta2 * m.g * m.g / m.omega * (m.omega * t).sin())
                .sum();
            CsvRow {
                t,
                u_re: factor.re,
                u_im: factor.im,
                abs_u: d,
                p_emission: 0.0,
                rho_ee: rho_ee0,
                rho_eg_re: rho_eg.re,
                rho_eg_im: rho_eg.im,
                gamma_t: rate,
                omega_t: 0.0,
                masked: false,
            }
        })
        .collect();
    let mut record = base_record(s);
    record.sigma_z_t2 = result.coherence_1e_time();
    record.sigma_z_population_drift = Some(result.population_drift);
    Ok((rows, record))
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioResult, CliError> {
    let stem = file_stem(s);
    match s.model {
        Model::SigmaPm => {
            let kernel = kernel_for(s)?;
            let a = solve_u(&kernel, &s.atom, &s.grid).map_err(numerical)?;
            let (rows, ts) = exchange_pipeline(s, &a);
            let mut record = base_record(s);
            if let Some(ts) = ts {
                fill_timescales(&mut record, &ts);
            }
            Ok(ScenarioResult {
                series: vec![(stem, rows)],
                record,
            })
        }
        Model::SingleExcitationOracle => {
            let modes = match &s.environment {
                Environment::Modes(m) => m.clone(),
                Environment::Cavity(c) => cavity_mode_set(c).map_err(numerical)?,
                Environment::Density(_) => {
                    return Err(CliError::Config(format!(
                        "scenario `{}`: single_excitation_oracle requires discrete modes \
                         (mode_set or cavity environment)",
                        s.name
                    )));
                }
            };
            let sys = oracle::SingleExcitationSystem::new(&s.atom, &modes);
            let a = oracle::single_excitation_evolve(&sys, &s.grid);
            let (rows, ts) = exchange_pipeline(s, &a);
            let mut record = base_record(s);
            if let Some(ts) = ts {
                fill_timescales(&mut record, &ts);
            }
            Ok(ScenarioResult {
                series: vec![(stem, rows)],
                record,
            })
        }
        Model::SigmaZ => {
            let modes = modes_for(s)?;
            let result =
                dephasing_coherence_scaled(&modes, &s.grid, s.z_scale).map_err(numerical)?;
            let (rows, record) = dephasing_rows(s, &modes, &result)?;
            Ok(ScenarioResult {
                series: vec![(stem, rows)],
                record,
            })
        }
        Model::Both => {
            // one shared mode set so the two couplings see the same field
            let modes = modes_for(s)?;
            let kernel = kernel_from_modes(&modes).map_err(numerical)?;
            let a = solve_u(&kernel, &s.atom, &s.grid).map_err(numerical)?;
            let rates = rates_from_u(&a);
            let traj = propagate(&a, &s.initial);
            let pm_rows = amplitude_rows(&s.grid, &a, &rates, &traj);
            let dephasing =
                dephasing_coherence_scaled(&modes, &s.grid, s.z_scale).map_err(numerical)?;
            let (z_rows, _) = dephasing_rows(s, &modes, &dephasing)?;
            let comparison = compare_models(&traj, &dephasing).map_err(numerical)?;

            let mut record = base_record(s);
            if let Ok(ts) = extract_timescales(&traj) {
                fill_timescales(&mut record, &ts);
            }
            record.sigma_z_t2 = comparison.sigma_z_t2;
            record.t2_ratio = comparison.t2_ratio();
            record.sigma_z_population_drift = Some(comparison.sigma_z_population_drift);
            Ok(ScenarioResult {
                series: vec![
                    (format!("{stem}_sigma_pm"), pm_rows),
                    (format!("{stem}_sigma_z"), z_rows),
                ],
                record,
            })
        }
        Model::JcOracle => {
            let config = s.field.as_ref().expect("validated at parse time");
            let series = oracle::jc_evolve(config, &s.grid).map_err(numerical)?;
            let rows: Vec<CsvRow> = (0..s.grid.len())
                .map(|j| CsvRow {
                    t: s.grid.time(j),
                    u_re: 0.0,
                    u_im: 0.0,
                    abs_u: 0.0,
                    p_emission: 1.0 - series.p_e[j],
                    rho_ee: series.p_e[j],
                    rho_eg_re: 0.0,
                    rho_eg_im: 0.0,
                    gamma_t: 0.0,
                    omega_t: 0.0,
                    // no amplitude exists for a multi-photon field state
                    masked: true,
                })
                .collect();
            Ok(ScenarioResult {
                series: vec![(stem, rows)],
                record: base_record(s),
            })
        }
    }
}

/// Flag local maxima and minima of `gamma_fit` along each sweep, in place.
/// Records are grouped by scenario name; order within a group is sweep order.
pub fn flag_sweep_extrema(records: &mut [SummaryRecord]) {
    let mut i = 0;
    while i < records.len() {
        if records[i].sweep_index.is_none() {
            i += 1;
            continue;
        }
        let name = records[i].scenario.clone();
        let mut j = i;
        while j < records.len()
            && records[j].scenario == name
            && records[j].sweep_index.is_some()
        {
            j += 1;
        }
        let gammas: Vec<Option<f64>> = records[i..j].iter().map(|r| r.gamma_fit).collect();
        for k in 0..gammas.len() {
            let (prev, here, next) = (
                k.checked_sub(1).and_then(|p| gammas[p]),
                gammas[k],
                gammas.get(k + 1).copied().flatten(),
            );
            if let (Some(p), Some(h), Some(n)) = (prev, here, next) {
                records[i + k].is_local_max = Some(h > p && h > n);
                records[i + k].is_local_min = Some(h < p && h < n);
            } else {
                records[i + k].is_local_max = Some(false);
                records[i + k].is_local_min = Some(false);
            }
        }
        i = j;
    }
}
