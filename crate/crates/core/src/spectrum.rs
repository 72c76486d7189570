//! Magnetic-force noise spectrum, scattering rates, self-energy, net cooling
//! rate, and the mechanical frequency shift.
//!
//! All spectra are reported in rate units: the zero-point amplitude is
//! absorbed analytically, so S̃(±omega_b) are directly the phonon
//! absorption/emission rates A∓ and no effective mass is ever needed.
//!
//! Three spectrum formulas are implemented (see [`SpectrumFormula`]). The
//! default quantum-noise form S̃(omega) = 2|G|^2 Re[chi(omega)] makes
//! A₋ − A₊ = −2 Im Σ(omega_b) an exact identity and reproduces the
//! figure-level structure (single peak at omega_b for the gain system, split
//! peaks for the loss system). The other two evaluate the thermally weighted
//! response expression with either response variant.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Relative threshold below which a cancelled response denominator is
/// treated as a pole. Wide enough to absorb the rounding left over when
/// detunings are assembled from ~10 GHz carrier frequencies.
const POLE_REL_TOL: f64 = 1e-11;

/// Complex response functions of the three modes at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityTriple {
    pub chi_a: Complex64,
    pub chi_b: Complex64,
    pub chi_m: Complex64,
}

/// Which total-response function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseVariant {
    /// chi = [J^2 chi_a + chi_m^-1]^-1 — magnon dressed by the cavity only.
    #[default]
    Bare,
    /// chi = chi_m / (1 + J^2 chi_a chi_m + |G|^2 chi_b chi_m) — additionally
    /// dressed by the phonon.
    WithPhonon,
}

/// Spectrum formula selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumFormula {
    /// S̃ = 2|G|^2 Re chi(omega) = |G|^2 |chi|^2 [kappa_m − kappa_a J^2 |chi_a|^2],
    /// with the bare response. Net-absorption quantum-noise spectrum; the
    /// default for all figure pipelines.
    #[default]
    QuantumNoise,
    /// S̃ = |G|^2 [gamma_b |chi(omega)|^2 + kappa_a J^2 |chi(−omega)|^2 |chi_a(−omega)|^2]
    /// with the bare response — the thermally weighted response expression.
    ThermalBare,
    /// Same thermally weighted expression with the phonon-dressed response.
    ThermalDressed,
}

impl SpectrumFormula {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quantum_noise" => Some(Self::QuantumNoise),
            "thermal_bare" => Some(Self::ThermalBare),
            "thermal_dressed" => Some(Self::ThermalDressed),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::QuantumNoise => "quantum_noise",
            Self::ThermalBare => "thermal_bare",
            Self::ThermalDressed => "thermal_dressed",
        }
    }
}

/// One sample of the force-noise spectrum in rate units (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    /// Total S̃(omega) = term_thermal + term_cavity.
    pub s_ff: f64,
    /// Magnon-channel component (kappa_m-weighted for the quantum-noise
    /// formula, gamma_b-weighted for the thermal formulas). Non-negative.
    pub term_thermal: f64,
    /// Cavity-channel component; carries the sign of kappa_a.
    pub term_cavity: f64,
}

/// Heating/cooling rates and the mechanical frequency shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingRates {
    /// Heating rate A₊ = S̃(−omega_b).
    pub a_plus: f64,
    /// Cooling rate A₋ = S̃(+omega_b).
    pub a_minus: f64,
    /// Net rate Γ = A₋ − A₊.
    pub gamma_net: f64,
    /// Net rate via the self-energy, Γ = −2 Im Σ(omega_b).
    pub gamma_selfenergy: f64,
    /// Mechanical frequency shift δω_b = Re Σ(omega_b).
    pub delta_omega_b: f64,
    /// |gamma_net − gamma_selfenergy| / |gamma_selfenergy|.
    pub route_gap: f64,
    /// True when the two Γ routes disagree beyond the weak-coupling tolerance.
    pub gap_warning: bool,
}

/// Mode response functions at one frequency. kappa_a enters with a minus
/// sign (gain); a negative kappa_a therefore flows through as ordinary loss.
pub fn susceptibilities(params: &SystemParams, omega: f64) -> Result<SusceptibilityTriple> {
    let da = params.delta_a();
    let dm = params.delta_m();
    let den_a = Complex64::new(-params.kappa_a / 2.0, -(omega + da));
    let den_b = Complex64::new(params.gamma_b / 2.0, -(omega - params.omega_b));
    let den_m = Complex64::new(params.kappa_m / 2.0, -(omega + dm));
    for (den, mode) in [(den_a, "cavity"), (den_b, "phonon"), (den_m, "magnon")] {
        if den.re == 0.0 && den.im == 0.0 {
            return Err(Error::Pole { mode, omega });
        }
    }
    Ok(SusceptibilityTriple {
        chi_a: den_a.inv(),
        chi_b: den_b.inv(),
        chi_m: den_m.inv(),
    })
}

/// Total response function of the coupled system at one frequency.
pub fn total_response(
    params: &SystemParams,
    omega: f64,
    variant: ResponseVariant,
) -> Result<Complex64> {
    let chi = susceptibilities(params, omega)?;
    let j2 = params.j_coupling * params.j_coupling;
    let j_term = j2 * chi.chi_a;
    let m_inv = chi.chi_m.inv();
    let (den, scale) = match variant {
        ResponseVariant::Bare => (j_term + m_inv, j_term.norm() + m_inv.norm()),
        ResponseVariant::WithPhonon => {
            let g = params.g_linearized()?;
            let g_term = g * g * chi.chi_b;
            (
                j_term + m_inv + g_term,
                j_term.norm() + m_inv.norm() + g_term.norm(),
            )
        }
    };
    if den.norm() <= POLE_REL_TOL * scale {
        return Err(Error::Pole {
            mode: "dressed magnon",
            omega,
        });
    }
    Ok(den.inv())
}

/// Force-noise spectrum at one frequency under the given formula.
pub fn force_noise_spectrum(
    params: &SystemParams,
    omega: f64,
    formula: SpectrumFormula,
) -> Result<SpectrumPoint> {
    let g = params.g_linearized()?;
    if g == 0.0 {
        // uncoupled phonon: the magnetic force vanishes identically, even
        // where the magnon response itself is singular
        return Ok(SpectrumPoint {
            omega,
            s_ff: 0.0,
            term_thermal: 0.0,
            term_cavity: 0.0,
        });
    }
    let g2 = g * g;
    let j2 = params.j_coupling * params.j_coupling;
    match formula {
        SpectrumFormula::QuantumNoise => {
            let chi = total_response(params, omega, ResponseVariant::Bare)?;
            let chi_a = susceptibilities(params, omega)?.chi_a;
            let n2 = chi.norm_sqr();
            let term_thermal = g2 * params.kappa_m * n2;
            let term_cavity = -g2 * params.kappa_a * j2 * n2 * chi_a.norm_sqr();
            Ok(SpectrumPoint {
                omega,
                s_ff: term_thermal + term_cavity,
                term_thermal,
                term_cavity,
            })
        }
        SpectrumFormula::ThermalBare | SpectrumFormula::ThermalDressed => {
            let variant = if formula == SpectrumFormula::ThermalBare {
                ResponseVariant::Bare
            } else {
                ResponseVariant::WithPhonon
            };
            let chi_pos = total_response(params, omega, variant)?;
            let chi_neg = total_response(params, -omega, variant)?;
            let chi_a_neg = susceptibilities(params, -omega)?.chi_a;
            let term_thermal = g2 * params.gamma_b * chi_pos.norm_sqr();
            let term_cavity =
                g2 * params.kappa_a * j2 * chi_neg.norm_sqr() * chi_a_neg.norm_sqr();
            Ok(SpectrumPoint {
                omega,
                s_ff: term_thermal + term_cavity,
                term_thermal,
                term_cavity,
            })
        }
    }
}

/// Magnomechanical self-energy Σ(omega) = −i|G|^2 [chi(omega) − chi*(−omega)]
/// with the bare response.
pub fn self_energy(params: &SystemParams, omega: f64) -> Result<Complex64> {
    let g = params.g_linearized()?;
    if g == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let chi_pos = total_response(params, omega, ResponseVariant::Bare)?;
    let chi_neg = total_response(params, -omega, ResponseVariant::Bare)?;
    Ok(-Complex64::i() * g * g * (chi_pos - chi_neg.conj()))
}

/// Scattering rates at ±omega_b, both Γ routes, and the frequency shift.
pub fn scattering_rates(params: &SystemParams, formula: SpectrumFormula) -> Result<CoolingRates> {
    scattering_rates_with_tolerance(params, formula, 0.05)
}

/// As [`scattering_rates`], with an explicit weak-coupling gap tolerance
/// for the route-consistency warning.
pub fn scattering_rates_with_tolerance(
    params: &SystemParams,
    formula: SpectrumFormula,
    weak_coupling_tol: f64,
) -> Result<CoolingRates> {
    let a_minus = force_noise_spectrum(params, params.omega_b, formula)?.s_ff;
    let a_plus = force_noise_spectrum(params, -params.omega_b, formula)?.s_ff;
    let sigma = self_energy(params, params.omega_b)?;
    let gamma_net = a_minus - a_plus;
    let gamma_selfenergy = -2.0 * sigma.im;
    let denom = gamma_selfenergy.abs().max(f64::MIN_POSITIVE);
    let route_gap = if gamma_net == gamma_selfenergy {
        0.0
    } else {
        (gamma_net - gamma_selfenergy).abs() / denom
    };
    Ok(CoolingRates {
        a_plus,
        a_minus,
        gamma_net,
        gamma_selfenergy,
        delta_omega_b: sigma.re,
        route_gap,
        gap_warning: route_gap > weak_coupling_tol,
    })
}

/// A uniformly sampled spectrum sweep. Pole points are returned as `Err`
/// entries so callers can keep the grid shape.
pub fn spectrum_sweep(
    params: &SystemParams,
    grid: &[f64],
    formula: SpectrumFormula,
) -> Vec<(f64, Result<SpectrumPoint>)> {
    grid.iter()
        .map(|&w| (w, force_noise_spectrum(params, w, formula)))
        .collect()
}

/// Golden-section refinement of a bracketed spectrum maximum.
///
/// `bracket` must contain the maximum; poles inside the bracket are treated
/// as +infinity so the search converges onto them. Returns the refined
/// location (bracket narrowed to `tol`) together with the largest finite
/// spectrum value probed — for a genuine pole the value at the exact apex
/// is unbounded, so the finite probe is the usable peak height.
pub fn refine_peak(
    params: &SystemParams,
    bracket: (f64, f64),
    tol: f64,
    formula: SpectrumFormula,
) -> (f64, f64) {
    let mut best_finite = f64::NEG_INFINITY;
    let mut eval = |w: f64| -> f64 {
        match force_noise_spectrum(params, w, formula) {
            Ok(pt) if pt.s_ff.is_finite() => {
                best_finite = best_finite.max(pt.s_ff);
                pt.s_ff
            }
            _ => f64::INFINITY,
        }
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = bracket;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = eval(mid);
    let value = if fm.is_finite() { fm.max(best_finite) } else { best_finite };
    (mid, value)
}

/// Grid argmax (finite values only) followed by golden-section refinement
/// over the bracketing neighbors. Returns None when no finite sample exists.
pub fn refined_argmax(
    params: &SystemParams,
    grid: &[f64],
    tol: f64,
    formula: SpectrumFormula,
) -> Option<(f64, f64)> {
    let samples = spectrum_sweep(params, grid, formula);
    let mut best: Option<(usize, f64)> = None;
    for (i, (_, res)) in samples.iter().enumerate() {
        if let Ok(pt) = res {
            if pt.s_ff.is_finite() && best.map_or(true, |(_, v)| pt.s_ff > v) {
                best = Some((i, pt.s_ff));
            }
        }
    }
    let (i, _) = best?;
    let lo = if i == 0 { grid[0] } else { grid[i - 1] };
    let hi = if i + 1 == grid.len() { grid[i] } else { grid[i + 1] };
    Some(refine_peak(params, (lo, hi), tol, formula))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const WB: f64 = 6.283185307179586e7; // 2*pi*10 MHz

    fn canonical(kappa_sign: f64, g_over_wb: f64, detuning_over_wb: f64) -> SystemParams {
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
        .unwrap()
    }

    #[test]
    fn susceptibility_resonances() {
        let p = canonical(1.0, 0.03, -1.0);
        let at_b = susceptibilities(&p, p.omega_b).unwrap();
        assert_relative_eq!(at_b.chi_b.re, 2.0 / p.gamma_b, max_relative = 1e-12);
        assert_abs_diff_eq!(at_b.chi_b.im * p.gamma_b, 0.0, epsilon = 1e-12);
        let at_m = susceptibilities(&p, -p.delta_m()).unwrap();
        assert_relative_eq!(at_m.chi_m.re, 2.0 / p.kappa_m, max_relative = 1e-12);
        let at_a = susceptibilities(&p, -p.delta_a()).unwrap();
        assert_relative_eq!(at_a.chi_a.re, -2.0 / p.kappa_a, max_relative = 1e-12);
    }

    #[test]
    fn response_reduces_to_magnon_when_uncoupled() {
        let mut p = canonical(1.0, 0.0, -1.0);
        p.j_coupling = 0.0;
        let w = 0.7 * WB;
        let chi = total_response(&p, w, ResponseVariant::Bare).unwrap();
        let chi18 = total_response(&p, w, ResponseVariant::WithPhonon).unwrap();
        let chi_m = susceptibilities(&p, w).unwrap().chi_m;
        assert_relative_eq!(chi.re, chi_m.re, max_relative = 1e-12);
        assert_relative_eq!(chi.im, chi_m.im, max_relative = 1e-12);
        assert_relative_eq!(chi18.re, chi_m.re, max_relative = 1e-12);
    }

    #[test]
    fn variants_agree_when_g_is_zero() {
        let p = canonical(1.0, 0.0, -1.0);
        for k in 0..20 {
            let w = (0.3 + 0.08 * k as f64) * WB;
            let bare = total_response(&p, w, ResponseVariant::Bare).unwrap();
            let dressed = total_response(&p, w, ResponseVariant::WithPhonon).unwrap();
            assert_relative_eq!(bare.re, dressed.re, max_relative = 1e-13);
            assert_relative_eq!(bare.im, dressed.im, max_relative = 1e-13);
        }
    }

    #[test]
    fn dressed_response_at_resonance_frozen_value() {
        // At the balanced operating point the cavity term cancels the magnon
        // linewidth exactly and the phonon dressing alone survives:
        // chi18(omega_b) = gamma_b / (2 |G|^2), purely real.
        let p = canonical(1.0, 0.03, -1.0);
        let chi = total_response(&p, p.omega_b, ResponseVariant::WithPhonon).unwrap();
        let expect = p.gamma_b / (2.0 * 0.03 * WB * 0.03 * WB);
        assert_relative_eq!(chi.re, expect, max_relative = 1e-10);
        assert_abs_diff_eq!(chi.im / chi.re, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn bare_response_pole_detected_at_balanced_resonance() {
        // Integer-scale parameters make the cancellation exact in floating
        // point: J^2 chi_a(omega_b) = -kappa_m/2 bit-for-bit.
        let p = SystemParams::new(
            1010.0, 1010.0, 1.0, 0.2, 0.2, 1.0e-5, 0.1, 0.0, 1009.0, 0.0, Some(0.03),
        )
        .unwrap();
        assert!(matches!(
            total_response(&p, 1.0, ResponseVariant::Bare),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn spectrum_vanishes_without_coupling() {
        let p = canonical(1.0, 0.0, -1.0);
        for f in [
            SpectrumFormula::QuantumNoise,
            SpectrumFormula::ThermalBare,
            SpectrumFormula::ThermalDressed,
        ] {
            let pt = force_noise_spectrum(&p, 0.8 * WB, f).unwrap();
            assert_eq!(pt.s_ff, 0.0);
        }
    }

    #[test]
    fn term_additivity() {
        let p = canonical(1.0, 0.03, -1.001);
        for f in [
            SpectrumFormula::QuantumNoise,
            SpectrumFormula::ThermalBare,
            SpectrumFormula::ThermalDressed,
        ] {
            for k in 0..50 {
                let w = (0.5 + 0.02 * k as f64) * WB;
                let pt = force_noise_spectrum(&p, w, f).unwrap();
                assert_relative_eq!(
                    pt.s_ff,
                    pt.term_thermal + pt.term_cavity,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn thermal_formula_nonnegative_for_gain() {
        let p = canonical(1.0, 0.03, -1.001);
        for k in 0..100 {
            let w = (0.2 + 0.017 * k as f64) * WB;
            let pt = force_noise_spectrum(&p, w, SpectrumFormula::ThermalBare).unwrap();
            assert!(pt.s_ff >= 0.0);
        }
    }

    #[test]
    fn quantum_noise_nonnegative_for_loss_cavity() {
        let p = canonical(-1.0, 0.03, -1.0);
        for k in 0..100 {
            let w = (0.2 + 0.017 * k as f64) * WB;
            let pt = force_noise_spectrum(&p, w, SpectrumFormula::QuantumNoise).unwrap();
            assert!(pt.s_ff >= 0.0, "negative spectrum at {}", w / WB);
            assert!(pt.term_thermal >= 0.0);
        }
    }

    #[test]
    fn rates_identity_between_routes() {
        // Under the quantum-noise formula the spectrum route equals the
        // self-energy route identically.
        for (sign, det) in [(1.0, -1.001), (-1.0, -1.0), (-1.0, -1.05)] {
            let p = canonical(sign, 0.03, det);
            let r = scattering_rates(&p, SpectrumFormula::QuantumNoise).unwrap();
            assert_relative_eq!(r.gamma_net, r.gamma_selfenergy, max_relative = 1e-9);
            assert!(!r.gap_warning);
        }
    }

    #[test]
    fn rates_warning_with_dressed_formula() {
        let p = canonical(1.0, 0.03, -1.001);
        let r = scattering_rates(&p, SpectrumFormula::ThermalDressed).unwrap();
        assert!(r.gap_warning, "gap = {}", r.route_gap);
    }

    #[test]
    fn rates_frozen_values_gain_operating_point() {
        // Independently computed (complex arithmetic in an external tool).
        let p = canonical(1.0, 0.03, -1.001);
        let r = scattering_rates(&p, SpectrumFormula::QuantumNoise).unwrap();
        assert_relative_eq!(r.gamma_net / WB, 1.79999955e2, max_relative = 1e-7);
        assert_relative_eq!(r.a_plus / WB, 4.49550337e-5, max_relative = 1e-7);
    }

    #[test]
    fn rates_frozen_values_loss_system() {
        let p = canonical(-1.0, 0.03, -1.0);
        let r = scattering_rates(&p, SpectrumFormula::QuantumNoise).unwrap();
        assert_relative_eq!(r.gamma_net / WB, 8.95477613e-3, max_relative = 1e-7);
        assert_relative_eq!(r.a_plus / WB, 4.52238694e-5, max_relative = 1e-7);
        assert!(r.a_minus > 0.0 && r.a_plus > 0.0);
    }

    #[test]
    fn rates_all_zero_without_coupling() {
        let p = canonical(1.0, 0.0, -1.001);
        let r = scattering_rates(&p, SpectrumFormula::QuantumNoise).unwrap();
        assert_eq!(r.a_plus, 0.0);
        assert_eq!(r.a_minus, 0.0);
        assert_eq!(r.gamma_net, 0.0);
        assert_eq!(r.delta_omega_b, 0.0);
    }

    #[test]
    fn self_energy_uncoupled_closed_form() {
        // J = 0: Sigma = -i |G|^2 [chi_m(w) - chi_m*(-w)], expanded by hand:
        // Re = |G|^2 [ (km/2)/((w+dm)^2+km^2/4) ... ] — compare numerically
        // against the direct chi_m evaluation.
        let mut p = canonical(1.0, 0.03, -1.001);
        p.j_coupling = 0.0;
        let w = 0.9 * WB;
        let sig = self_energy(&p, w).unwrap();
        let g2 = (0.03 * WB) * (0.03 * WB);
        let cm = |x: f64| {
            Complex64::new(p.kappa_m / 2.0, -(x + p.delta_m())).inv()
        };
        let expect = -Complex64::i() * g2 * (cm(w) - cm(-w).conj());
        assert_relative_eq!(sig.re, expect.re, max_relative = 1e-12);
        assert_relative_eq!(sig.im, expect.im, max_relative = 1e-12);
    }

    #[test]
    fn g_squared_scaling_exact() {
        let p1 = canonical(1.0, 0.015, -1.001);
        let p2 = canonical(1.0, 0.03, -1.001);
        let w = 0.85 * WB;
        let s1 = force_noise_spectrum(&p1, w, SpectrumFormula::QuantumNoise).unwrap();
        let s2 = force_noise_spectrum(&p2, w, SpectrumFormula::QuantumNoise).unwrap();
        assert_relative_eq!(s2.s_ff / s1.s_ff, 4.0, max_relative = 1e-10);
        let r1 = scattering_rates(&p1, SpectrumFormula::QuantumNoise).unwrap();
        let r2 = scattering_rates(&p2, SpectrumFormula::QuantumNoise).unwrap();
        assert_relative_eq!(r2.gamma_net / r1.gamma_net, 4.0, max_relative = 1e-10);
        assert_relative_eq!(r2.a_plus / r1.a_plus, 4.0, max_relative = 1e-10);
        assert_relative_eq!(r2.delta_omega_b / r1.delta_omega_b, 4.0, max_relative = 1e-10);
    }

    #[test]
    fn loss_spectrum_splits_symmetrically() {
        let p = canonical(-1.0, 0.03, -1.0);
        let n = 4001;
        let grid: Vec<f64> = (0..n)
            .map(|k| (0.5 + k as f64 / (n - 1) as f64) * WB)
            .collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&w| {
                force_noise_spectrum(&p, w, SpectrumFormula::QuantumNoise)
                    .unwrap()
                    .s_ff
            })
            .collect();
        let maxima: Vec<usize> = (1..n - 1)
            .filter(|&i| vals[i] > vals[i - 1] && vals[i] > vals[i + 1])
            .collect();
        assert_eq!(maxima.len(), 2);
        let d1 = grid[maxima[0]] / WB - 1.0;
        let d2 = grid[maxima[1]] / WB - 1.0;
        assert_abs_diff_eq!(d1 + d2, 0.0, epsilon = 2.0 * (grid[1] - grid[0]) / WB);
    }

    #[test]
    fn refine_peak_converges_to_resonance() {
        let p = canonical(1.0, 0.03, -1.0);
        let n = 4000;
        let grid: Vec<f64> = (0..n)
            .map(|k| (0.5 + k as f64 / (n - 1) as f64) * WB)
            .collect();
        let (w_peak, val) = refined_argmax(&p, &grid, 1e-6 * WB, SpectrumFormula::QuantumNoise)
            .expect("finite samples exist");
        assert!((w_peak - WB).abs() <= 1e-6 * WB, "peak at {}", w_peak / WB);
        assert!(val > 0.0 && val.is_finite());
    }
}
