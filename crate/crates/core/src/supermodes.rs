//! Non-Hermitian cavity-magnon supermode analysis: complex eigenfrequencies,
//! linewidths, phase classification, and exceptional-point location.
//!
//! The phonon mode plays no role here; the 2x2 analysis covers only the
//! microwave cavity and magnon modes at degenerate frequency omega_0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Phase of the gain/loss-balanced two-mode system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtPhase {
    /// J > Gamma_eff: split real frequencies, common linewidth.
    UnbrokenPt,
    /// |J - Gamma_eff| below tolerance: coalesced eigenvalues.
    ExceptionalPoint,
    /// J < Gamma_eff: degenerate frequencies, split linewidths.
    BrokenPt,
}

impl PtPhase {
    pub fn as_str(&self) -> &'static str {
        match self {
            PtPhase::UnbrokenPt => "unbroken_pt",
            PtPhase::ExceptionalPoint => "exceptional_point",
            PtPhase::BrokenPt => "broken_pt",
        }
    }
}

/// The pair of supermode eigenfrequencies with classification data.
#[derive(Debug, Clone, PartialEq)]
pub struct SupermodePair {
    pub xi_plus: Complex64,
    pub xi_minus: Complex64,
    /// Gamma_eff = (kappa_a + kappa_m)/4.
    pub gamma_eff: f64,
    /// chi = (kappa_m - kappa_a)/2.
    pub chi_asym: f64,
    /// Signed discriminant J^2 - Gamma_eff^2 so callers can apply their own
    /// classification threshold.
    pub discriminant: f64,
    pub phase: PtPhase,
    /// True when the gain and decay rates are balanced (kappa_a = kappa_m).
    pub balanced: bool,
}

/// Relative tolerance defining the exceptional-point band.
const EP_REL_TOL: f64 = 1e-9;

/// Eigenfrequencies xi_pm = omega_0 - i chi/2 +- sqrt(J^2 - Gamma_eff^2).
pub fn supermode_frequencies(omega0: f64, j: f64, kappa_a: f64, kappa_m: f64) -> Result<SupermodePair> {
    if !(omega0 > 0.0) {
        return Err(Error::domain("omega_0 must be > 0"));
    }
    if j < 0.0 {
        return Err(Error::domain("J must be >= 0"));
    }
    let gamma_eff = (kappa_a + kappa_m) / 4.0;
    let chi_asym = (kappa_m - kappa_a) / 2.0;
    let discriminant = j * j - gamma_eff * gamma_eff;
    let radical = Complex64::new(discriminant, 0.0).sqrt();
    let center = Complex64::new(omega0, -chi_asym / 2.0);
    let tol = EP_REL_TOL * kappa_a.abs().max(kappa_m.abs());
    let phase = if (j - gamma_eff).abs() <= tol {
        PtPhase::ExceptionalPoint
    } else if discriminant > 0.0 {
        PtPhase::UnbrokenPt
    } else {
        PtPhase::BrokenPt
    };
    let balanced = (kappa_a - kappa_m).abs() <= 1e-12 * kappa_a.abs().max(kappa_m.abs());
    Ok(SupermodePair {
        xi_plus: center + radical,
        xi_minus: center - radical,
        gamma_eff,
        chi_asym,
        discriminant,
        phase,
        balanced,
    })
}

/// Coupling at which the radical vanishes: J_EP = Gamma_eff = (kappa_a + kappa_m)/4.
pub fn ep_coupling(kappa_a: f64, kappa_m: f64) -> Result<f64> {
    if kappa_a + kappa_m <= 0.0 {
        return Err(Error::NoExceptionalPoint);
    }
    Ok((kappa_a + kappa_m) / 4.0)
}

/// Eigenvalues of the 2x2 non-Hermitian matrix
/// [[omega_0 + i kappa_a/2, J], [J, omega_0 - i kappa_m/2]],
/// computed from the characteristic polynomial. Cross-check route for the
/// closed form above; exact at the exceptional point where iterative
/// eigensolvers lose half their digits.
pub fn matrix_eigenvalues(omega0: f64, j: f64, kappa_a: f64, kappa_m: f64) -> (Complex64, Complex64) {
    let a = Complex64::new(omega0, kappa_a / 2.0);
    let d = Complex64::new(omega0, -kappa_m / 2.0);
    let tr = a + d;
    let det = a * d - Complex64::new(j * j, 0.0);
    let rad = (tr * tr / 4.0 - det).sqrt();
    (tr / 2.0 + rad, tr / 2.0 - rad)
}

/// Sweep axis for [`sweep_eigenvalues`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary the magnon-photon coupling J; kappa_a fixed from the parameters.
    CouplingJ,
    /// Vary the cavity gain rate kappa_a; J fixed from the parameters.
    GainKappaA,
}

/// One row of an eigenvalue sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub pair: SupermodePair,
}

/// Eigenfrequencies along a parameter grid, branch-paired so the curves are
/// continuous across the square-root cut at the exceptional point.
pub fn sweep_eigenvalues(
    axis: SweepAxis,
    grid: &[f64],
    fixed: &SystemParams,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid must be non-empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("sweep grid must be strictly increasing"));
    }
    let rel = (fixed.omega_a - fixed.omega_m).abs() / fixed.omega_a.abs().max(fixed.omega_m.abs());
    if rel > 1e-12 {
        return Err(Error::DegenerateFrequencyRequired {
            omega_a: fixed.omega_a,
            omega_m: fixed.omega_m,
        });
    }
    let omega0 = fixed.omega_a;
    let mut rows = Vec::with_capacity(grid.len());
    for &v in grid {
        let pair = match axis {
            SweepAxis::CouplingJ => supermode_frequencies(omega0, v, fixed.kappa_a, fixed.kappa_m)?,
            SweepAxis::GainKappaA => {
                supermode_frequencies(omega0, fixed.j_coupling, v, fixed.kappa_m)?
            }
        };
        rows.push(SweepRow { axis_value: v, pair });
    }
    // Nearest-neighbor branch pairing: swap labels wherever the swapped
    // assignment is closer to the previous row in the complex plane.
    for i in 1..rows.len() {
        let (prev_p, prev_m) = (rows[i - 1].pair.xi_plus, rows[i - 1].pair.xi_minus);
        let (p, m) = (rows[i].pair.xi_plus, rows[i].pair.xi_minus);
        let keep = (p - prev_p).norm() + (m - prev_m).norm();
        let swap = (m - prev_p).norm() + (p - prev_m).norm();
        if swap < keep {
            rows[i].pair.xi_plus = m;
            rows[i].pair.xi_minus = p;
        }
    }
    Ok(rows)
}
