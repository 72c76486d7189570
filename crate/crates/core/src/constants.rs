//! Physical constants (CODATA 2018) and the adopted gyromagnetic ratio.

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Electron-spin gyromagnetic ratio used for the Kittel mode, 2*pi * 28 GHz/T.
pub const GYRO_RATIO: f64 = 2.0 * std::f64::consts::PI * 28.0e9;
