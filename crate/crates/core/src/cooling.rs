//! Final phonon occupancy: quantum limit, classical/quantum split, the
//! closed-form steady state, a brute-force birth-death oracle, and the
//! detuning / bias-field sweep pipelines.

use crate::error::{Error, Result};
use crate::model::{magnon_frequency_from_field, SphereSpec, SystemParams};
use crate::spectrum::{scattering_rates_with_tolerance, CoolingRates, SpectrumFormula};

/// One sweep row: the grid value and the pipeline outcome there.
pub type SweepRow = (f64, Result<(CoolingRates, CoolingReport)>);

/// Steady-state cooling summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingReport {
    /// Quantum cooling limit n_c = A+/(A- - A+).
    pub n_c: f64,
    /// Final mean phonon number.
    pub n_f: f64,
    /// Classical part gamma_b n_th / (Gamma + gamma_b).
    pub n_f_classical: f64,
    /// Quantum-backaction part A+ / (Gamma + gamma_b).
    pub n_f_quantum: f64,
    /// n_f < 1.
    pub ground_state: bool,
}

/// Quantum cooling limit n_c = A+/(A- - A+); requires net cooling.
pub fn quantum_limit(a_plus: f64, a_minus: f64) -> Result<f64> {
    if !(a_plus >= 0.0) || !(a_minus > a_plus) {
        return Err(Error::NetHeating { a_plus, a_minus });
    }
    Ok(a_plus / (a_minus - a_plus))
}

/// Closed-form final occupancy n_f = (gamma_b n_th + Gamma n_c)/(gamma_b + Gamma).
///
/// Evaluated as (gamma_b n_th + A+)/(gamma_b + Gamma), which is the same
/// expression with Gamma n_c = A+ substituted and stays finite at Gamma = 0.
pub fn final_phonon_number(rates: &CoolingRates, gamma_b: f64, n_th: f64) -> Result<CoolingReport> {
    if n_th < 0.0 {
        return Err(Error::domain("n_th must be >= 0"));
    }
    let gamma = rates.gamma_net;
    let total = gamma + gamma_b;
    if total <= 0.0 {
        return Err(Error::UnstableCooling(total));
    }
    let n_f_classical = gamma_b * n_th / total;
    let n_f_quantum = rates.a_plus / total;
    let n_f = n_f_classical + n_f_quantum;
    let n_c = if gamma > 0.0 && rates.a_plus >= 0.0 {
        rates.a_plus / gamma
    } else {
        f64::NAN
    };
    Ok(CoolingReport {
        n_c,
        n_f,
        n_f_classical,
        n_f_quantum,
        ground_state: n_f < 1.0,
    })
}

/// Steady state of the birth-death rate equation on Fock states 0..n_trunc,
/// solved by detailed balance. This is the independent oracle for the
/// closed-form occupancy.
///
/// The stationary distribution is geometric, P_{n+1}/P_n = r with
/// r = (A+ + gamma_b n_th)/(A- + gamma_b (n_th + 1)); the mean is accumulated
/// by streaming summation, and the geometric tail mass beyond the truncation
/// must stay below 1e-10.
pub fn rate_equation_steady_state(
    a_plus: f64,
    a_minus: f64,
    gamma_b: f64,
    n_th: f64,
    n_trunc: Option<usize>,
) -> Result<f64> {
    if a_plus < 0.0 || a_minus < 0.0 || gamma_b <= 0.0 || n_th < 0.0 {
        return Err(Error::domain(
            "rates must be >= 0, gamma_b > 0, n_th >= 0",
        ));
    }
    let up = a_plus + gamma_b * n_th;
    let down = a_minus + gamma_b * (n_th + 1.0);
    let r = up / down;
    if !(r < 1.0) {
        return Err(Error::NonNormalizable(r));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    const TAIL: f64 = 1e-10;
    const CAP: usize = 10_000_000;
    let suggested = {
        // smallest N with r^(N+1)/(1-r) < TAIL
        let n = ((TAIL * (1.0 - r)).ln() / r.ln()).ceil();
        (n.max(8.0) as usize).min(CAP)
    };
    let n_max = n_trunc.unwrap_or(suggested).min(CAP);
    let mut weight = 1.0; // r^n, unnormalized P_n
    let mut norm = 0.0;
    let mut mean = 0.0;
    for n in 0..=n_max {
        norm += weight;
        mean += n as f64 * weight;
        weight *= r;
    }
    // post-hoc tail check: mass beyond n_max relative to the retained norm
    let tail_mass = weight / (1.0 - r) / norm;
    if tail_mass > TAIL {
        return Err(Error::Truncation {
            tail: tail_mass,
            suggested,
        });
    }
    Ok(mean / norm)
}

/// Occupancy pipeline for one parameter set: rates then Eq.-(22) balance.
pub fn cooling_report(
    params: &SystemParams,
    n_th: f64,
    formula: SpectrumFormula,
    weak_coupling_tol: f64,
) -> Result<(CoolingRates, CoolingReport)> {
    let rates = scattering_rates_with_tolerance(params, formula, weak_coupling_tol)?;
    let report = final_phonon_number(&rates, params.gamma_b, n_th)?;
    Ok((rates, report))
}

/// Detuning sweep: for each grid value (in units of omega_b) the drive is
/// retuned to omega_a + dbar*omega_b and the full pipeline runs. With
/// omega_m = omega_a this sweeps both detunings jointly, as in the reference
/// figures. Pipeline failures are carried per-row.
pub fn detuning_sweep(
    base: &SystemParams,
    dbar_grid: &[f64],
    n_th: f64,
    formula: SpectrumFormula,
) -> Vec<SweepRow> {
    dbar_grid
        .iter()
        .map(|&dbar| {
            let mut p = base.clone();
            p.omega_drive = base.omega_a + dbar * base.omega_b;
            (dbar, cooling_report(&p, n_th, formula, 0.05))
        })
        .collect()
}

/// Bias-field sweep: omega_m(H) from the Kittel relation with the cavity held
/// degenerate (omega_a = omega_m, the PT condition) and the drive frequency
/// fixed, so the sweep reparameterizes the joint-detuning axis.
pub fn field_sweep(
    sphere: &SphereSpec,
    base: &SystemParams,
    h_grid: &[f64],
    n_th: f64,
    formula: SpectrumFormula,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let mut s = sphere.clone();
        s.bias_field = h;
        let omega_m = magnon_frequency_from_field(&s)?;
        if omega_m <= 0.0 {
            rows.push((h, Err(Error::domain("omega_m(H) must be > 0"))));
            continue;
        }
        let mut p = base.clone();
        p.omega_m = omega_m;
        p.omega_a = omega_m;
        rows.push((h, cooling_report(&p, n_th, formula, 0.05)));
    }
    Ok(rows)
}
