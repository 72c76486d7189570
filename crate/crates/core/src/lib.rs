//! Simulation library for ground-state cooling of a magnomechanical
//! resonator coupled to a gain microwave cavity.
//!
//! The model is the standard linearized three-mode chain: a microwave cavity
//! mode with gain rate `kappa_a`, a magnon (Kittel) mode with decay
//! `kappa_m` coupled to the cavity at rate `J`, and a phonon mode with decay
//! `gamma_b` coupled to the magnon at the drive-enhanced magnetostrictive
//! rate `G`. The crate provides:
//!
//! - [`model`]: parameters, unit plumbing, drive-to-coupling mapping, and
//!   the steady-state amplitudes of the linearization;
//! - [`supermodes`]: the non-Hermitian cavity-magnon eigenvalue problem,
//!   phase classification, and exceptional-point location;
//! - [`spectrum`]: magnetic-force noise spectra in rate units, scattering
//!   rates, self-energy, net cooling rate, and frequency shift;
//! - [`cooling`]: cooling limits, closed-form final occupancy, a birth-death
//!   rate-equation oracle, and detuning / bias-field sweeps;
//! - [`dynamics`]: 6x6 drift/diffusion matrices, stability, Lyapunov steady
//!   state, and adaptive covariance time evolution;
//! - [`config`]: the flat key-value configuration format used by the CLI.

pub mod config;
pub mod constants;
pub mod cooling;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod spectrum;
pub mod supermodes;

pub use config::{apply_override, parse_config, RunConfig};
pub use cooling::{
    cooling_report, detuning_sweep, field_sweep, final_phonon_number, quantum_limit,
    rate_equation_steady_state, CoolingReport,
};
pub use dynamics::{
    diffusion_matrix, drift_matrix, evolve_covariance, initial_covariance, phonon_occupancy,
    stability, steady_covariance, CovarianceState, StabilityReport,
};
pub use error::{Error, Result};
pub use model::{
    magnon_frequency_from_field, rabi_from_drive, steady_state_amplitudes, thermal_occupancy,
    SphereSpec, SteadyState, SystemParams,
};
pub use spectrum::{
    force_noise_spectrum, refine_peak, refined_argmax, scattering_rates,
    scattering_rates_with_tolerance, self_energy, spectrum_sweep, susceptibilities,
    total_response, CoolingRates, ResponseVariant, SpectrumFormula, SpectrumPoint,
    SusceptibilityTriple,
};

/// Uniform grid of `n >= 1` points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let step = (stop - start) / (n - 1) as f64;
    (0..n).map(|k| start + k as f64 * step).collect()
}
