//! System parameters, drive-to-coupling mapping, and the steady-state
//! amplitudes of the linearized three-mode model.
//!
//! Conventions: all frequencies and rates are angular (rad/s). `kappa_a > 0`
//! is cavity gain; a negative value encodes the lossy-cavity comparison
//! system. Detunings are always derived, never stored:
//! `Delta_a = omega_drive - omega_a`, `Delta_m = omega_drive - omega_m`.

use num_complex::Complex64;

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

/// All frequencies, rates, couplings, and drive parameters of the
/// three-mode (cavity / magnon / phonon) model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Cavity mode frequency (rad/s).
    pub omega_a: f64,
    /// Magnon (Kittel) mode frequency (rad/s).
    pub omega_m: f64,
    /// Phonon mode frequency (rad/s).
    pub omega_b: f64,
    /// Cavity gain rate (rad/s); negative encodes a lossy cavity.
    pub kappa_a: f64,
    /// Magnon decay rate (rad/s), > 0.
    pub kappa_m: f64,
    /// Phonon decay rate (rad/s), > 0.
    pub gamma_b: f64,
    /// Magnon-photon coupling J (rad/s), >= 0.
    pub j_coupling: f64,
    /// Bare magnetostrictive coupling g (rad/s), >= 0.
    pub g_single: f64,
    /// Drive frequency omega_L (rad/s).
    pub omega_drive: f64,
    /// Drive amplitude Omega (rad/s), >= 0.
    pub rabi: f64,
    /// If set, use this |G| directly instead of g * |zeta|.
    pub g_linearized_override: Option<f64>,
    /// Evaluate the steady-state amplitudes with kappa/2 instead of
    /// unhalved rates. Off by default; see [`steady_state_amplitudes`].
    pub steady_state_halfwidth: bool,
}

impl SystemParams {
    /// Validate the invariants and return the parameter set.
    pub fn new(
        omega_a: f64,
        omega_m: f64,
        omega_b: f64,
        kappa_a: f64,
        kappa_m: f64,
        gamma_b: f64,
        j_coupling: f64,
        g_single: f64,
        omega_drive: f64,
        rabi: f64,
        g_linearized_override: Option<f64>,
    ) -> Result<Self> {
        if !(omega_a > 0.0 && omega_m > 0.0 && omega_b > 0.0 && omega_drive > 0.0) {
            return Err(Error::domain("all mode and drive frequencies must be > 0"));
        }
        if !(kappa_m > 0.0) {
            return Err(Error::domain("kappa_m must be > 0"));
        }
        if !(gamma_b > 0.0) {
            return Err(Error::domain("gamma_b must be > 0"));
        }
        if j_coupling < 0.0 || g_single < 0.0 || rabi < 0.0 {
            return Err(Error::domain("J, g, and Omega must be >= 0"));
        }
        if let Some(g) = g_linearized_override {
            if g < 0.0 {
                return Err(Error::domain("|G| override must be >= 0"));
            }
        }
        Ok(Self {
            omega_a,
            omega_m,
            omega_b,
            kappa_a,
            kappa_m,
            gamma_b,
            j_coupling,
            g_single,
            omega_drive,
            rabi,
            g_linearized_override,
            steady_state_halfwidth: false,
        })
    }

    /// Cavity detuning Delta_a = omega_L - omega_a.
    pub fn delta_a(&self) -> f64 {
        self.omega_drive - self.omega_a
    }

    /// Magnon detuning Delta_m = omega_L - omega_m.
    pub fn delta_m(&self) -> f64 {
        self.omega_drive - self.omega_m
    }

    /// Linearized coupling magnitude |G|.
    ///
    /// The override wins when present; otherwise |G| = g * |zeta| from the
    /// steady state. The global phase of G is rotated away (the
    /// dynamics and spectra below depend only on |G| under that convention).
    pub fn g_linearized(&self) -> Result<f64> {
        if let Some(g) = self.g_linearized_override {
            return Ok(g);
        }
        if self.g_single == 0.0 || self.rabi == 0.0 {
            return Ok(0.0);
        }
        let ss = steady_state_amplitudes(self, self.steady_state_halfwidth)?;
        Ok(ss.g_eff.norm())
    }
}

/// Geometry and field parameters of the ferrimagnetic sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpec {
    /// Sphere radius (m).
    pub radius: f64,
    /// Spin density rho (1/m^3).
    pub spin_density: f64,
    /// Gyromagnetic ratio gamma_g (rad s^-1 T^-1).
    pub gyro_ratio: f64,
    /// Bias magnetic field H (T), restricted to [0, 1].
    pub bias_field: f64,
    /// Drive magnetic field amplitude B_0 (T).
    pub drive_field_amplitude: f64,
}

impl SphereSpec {
    /// Total number of spins M = rho * (4/3) pi r^3.
    pub fn total_spins(&self) -> f64 {
        self.spin_density * 4.0 / 3.0 * std::f64::consts::PI * self.radius.powi(3)
    }
}

/// Steady-state mean fields of the linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Magnon mean field zeta (dimensionless).
    pub zeta: Complex64,
    /// Phonon mean field beta (dimensionless).
    pub beta: Complex64,
    /// Linearized coupling G = g * zeta (rad/s).
    pub g_eff: Complex64,
    /// |g (beta* + beta) / Delta_m| — size of the detuning shift dropped by
    /// the linearization. Values above 0.1 flag a questionable linearization.
    pub linearization_ratio: f64,
}

impl SteadyState {
    /// True when the dropped magnon-detuning shift is small.
    pub fn linearization_valid(&self) -> bool {
        self.linearization_ratio <= 0.1
    }
}

/// Bose-Einstein occupancy 1/(exp(hbar w / kB T) - 1); 0 at T = 0.
pub fn thermal_occupancy(omega_b: f64, temperature: f64) -> Result<f64> {
    if temperature < 0.0 {
        return Err(Error::domain("temperature must be >= 0"));
    }
    if !(omega_b > 0.0) {
        return Err(Error::domain("omega_b must be > 0"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_b / (K_B * temperature);
    if x > 700.0 {
        return Ok(0.0); // exp would overflow; occupancy is sub-denormal anyway
    }
    Ok(1.0 / x.exp_m1())
}

/// Drive amplitude Omega = (sqrt(5)/4) gamma_g sqrt(M) B_0.
pub fn rabi_from_drive(sphere: &SphereSpec) -> Result<f64> {
    if !(sphere.radius > 0.0) || !(sphere.spin_density > 0.0) {
        return Err(Error::domain("sphere radius and spin density must be > 0"));
    }
    if sphere.drive_field_amplitude < 0.0 {
        return Err(Error::domain("drive field amplitude must be >= 0"));
    }
    let m = sphere.total_spins();
    Ok(5.0_f64.sqrt() / 4.0 * sphere.gyro_ratio * m.sqrt() * sphere.drive_field_amplitude)
}

/// Linear Kittel relation omega_m = gamma_g * H, valid for H in [0, 1] T.
pub fn magnon_frequency_from_field(sphere: &SphereSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&sphere.bias_field) {
        return Err(Error::domain(format!(
            "bias field {} T outside the supported [0, 1] T range",
            sphere.bias_field
        )));
    }
    Ok(sphere.gyro_ratio * sphere.bias_field)
}

/// Steady-state amplitudes of the linearization.
///
/// `halfwidth = false` evaluates the mean-field balance with unhalved decay
/// rates; `halfwidth = true` uses kappa/2 consistently with the fluctuation
/// dynamics. Both conventions are kept behind this switch; downstream
/// quantities are parameterized by |G| directly and do not depend on the
/// choice.
pub fn steady_state_amplitudes(params: &SystemParams, halfwidth: bool) -> Result<SteadyState> {
    let (ka, km) = if halfwidth {
        (params.kappa_a / 2.0, params.kappa_m / 2.0)
    } else {
        (params.kappa_a, params.kappa_m)
    };
    let da = params.delta_a();
    let dm = params.delta_m();
    let fa = Complex64::new(ka, -da); // -i*Delta_a + kappa_a
    let fm = Complex64::new(km, -dm);
    let den = params.j_coupling * params.j_coupling + fa * fm;
    let scale = params.j_coupling * params.j_coupling + fa.norm() * fm.norm();
    if den.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularDrive);
    }
    let zeta = params.rabi * fa / den;
    // beta = -i g |zeta|^2 / (i omega_b + gamma_b/2)
    let beta = -Complex64::i() * params.g_single * zeta.norm_sqr()
        / Complex64::new(params.gamma_b / 2.0, params.omega_b);
    let g_eff = params.g_single * zeta;
    let shift = params.g_single * 2.0 * beta.re;
    let linearization_ratio = if dm == 0.0 {
        if shift == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (shift / dm).abs()
    };
    Ok(SteadyState {
        zeta,
        beta,
        g_eff,
        linearization_ratio,
    })
}
