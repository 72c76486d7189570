//! Shared fixtures for the criterion benches.

use magnomech::SystemParams;

pub const WB: f64 = 6.283185307179586e7;

/// Canonical balanced-gain parameter set at the swept-detuning operating point.
pub fn canonical(kappa_sign: f64, g_over_wb: f64, detuning_over_wb: f64) -> SystemParams {
    let wa = 1010.0 * WB;
    SystemParams::new(
        wa,
        wa,
        WB,
        kappa_sign * 0.2 * WB,
        0.2 * WB,
        1.0e-5 * WB,
        0.1 * WB,
        0.0,
        wa + detuning_over_wb * WB,
        0.0,
        Some(g_over_wb * WB),
    )
    .expect("canonical parameters are valid")
}
