//! Full three-mode linear dynamics: drift and diffusion matrices, stability
//! classification, Lyapunov steady state, and covariance time evolution.
//!
//! Quadratures are ordered (x_a, p_a, x_b, p_b, x_m, p_m) with
//! x = (o + o†)/sqrt(2), p = (o − o†)/(i sqrt(2)), so a vacuum mode has
//! variance 1/2 per quadrature and n = (V_xx + V_pp − 1)/2.

use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{steady_state_amplitudes, SystemParams};

/// Covariance snapshot with the extracted phonon occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    /// Sample time (s); infinity marks the Lyapunov steady state.
    pub time: f64,
    pub cov: Matrix6<f64>,
    /// (V_{x_b x_b} + V_{p_b p_b} − 1)/2.
    pub n_phonon: f64,
}

/// Drift-matrix spectrum and stability classification.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: [Complex64; 6],
    /// All real parts strictly negative.
    pub stable: bool,
    /// Largest real part (rad/s).
    pub margin: f64,
}

/// Resolve the linearized coupling as a complex number.
///
/// With the override set (default workflow) G is real non-negative; via the
/// drive path the phase of g*zeta is kept so the phonon row carries both
/// quadratures.
fn g_complex(params: &SystemParams) -> Result<Complex64> {
    if let Some(g) = params.g_linearized_override {
        return Ok(Complex64::new(g, 0.0));
    }
    if params.g_single == 0.0 || params.rabi == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(steady_state_amplitudes(params, params.steady_state_halfwidth)?.g_eff)
}

/// The real matrix A with d<u>/dt = A <u> implied by the linearized Langevin
/// equations: cavity diagonal +kappa_a/2 (gain), magnon −kappa_m/2, phonon
/// −gamma_b/2.
pub fn drift_matrix(params: &SystemParams) -> Result<Matrix6<f64>> {
    let da = params.delta_a();
    let dm = params.delta_m();
    let j = params.j_coupling;
    let g = g_complex(params)?;
    let (gr, gi) = (g.re, g.im);
    let (ka2, km2, gb2) = (
        params.kappa_a / 2.0,
        params.kappa_m / 2.0,
        params.gamma_b / 2.0,
    );
    let wb = params.omega_b;
    #[rustfmt::skip]
    let a = Matrix6::new(
        ka2, -da,      0.0,  0.0,       0.0,       j,
        da,   ka2,     0.0,  0.0,      -j,         0.0,
        0.0,  0.0,    -gb2,  wb,        0.0,       0.0,
        0.0,  0.0,    -wb,  -gb2,      -2.0 * gr, -2.0 * gi,
        0.0,  j,       2.0 * gi, 0.0,  -km2,      -dm,
        -j,   0.0,    -2.0 * gr, 0.0,   dm,       -km2,
    );
    Ok(a)
}

/// Symmetrized diffusion matrix. The gain cavity's inverted noise ordering
/// still symmetrizes to 1/2 per quadrature, so the block equals |kappa_a|/2;
/// the phonon bath carries gamma_b (n_th + 1/2).
pub fn diffusion_matrix(params: &SystemParams, n_th: f64) -> Result<Matrix6<f64>> {
    if n_th < 0.0 {
        return Err(Error::domain("n_th must be >= 0"));
    }
    let ca = params.kappa_a.abs() / 2.0;
    let cb = params.gamma_b * (n_th + 0.5);
    let cm = params.kappa_m / 2.0;
    Ok(Matrix6::from_diagonal(&nalgebra::Vector6::new(
        ca, ca, cb, cb, cm, cm,
    )))
}

/// Eigenvalues of the drift matrix and the stability flag.
pub fn stability(params: &SystemParams) -> Result<StabilityReport> {
    let a = drift_matrix(params)?;
    let dyn_a = DMatrix::from_iterator(6, 6, a.iter().copied());
    let eig = dyn_a.complex_eigenvalues();
    let mut eigenvalues = [Complex64::new(0.0, 0.0); 6];
    for (dst, src) in eigenvalues.iter_mut().zip(eig.iter()) {
        *dst = *src;
    }
    let margin = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        eigenvalues,
        stable: margin < 0.0,
        margin,
    })
}

/// Unique steady covariance from A V + V Aᵀ + D = 0, solved as the 36x36
/// Kronecker system (A ⊗ I + I ⊗ A) vec(V) = −vec(D).
pub fn steady_covariance(params: &SystemParams, n_th: f64) -> Result<CovarianceState> {
    let report = stability(params)?;
    if !report.stable {
        return Err(Error::UnstableDrift {
            margin: report.margin,
        });
    }
    let a = drift_matrix(params)?;
    let d = diffusion_matrix(params, n_th)?;
    let mut big = DMatrix::<f64>::zeros(36, 36);
    // vec is column-major: vec(AV) = (I ⊗ A) vec(V), vec(VAᵀ) = (A ⊗ I) vec(V)
    for col in 0..6 {
        for row in 0..6 {
            for k in 0..6 {
                big[(col * 6 + row, col * 6 + k)] += a[(row, k)];
                big[(col * 6 + row, k * 6 + row)] += a[(col, k)];
            }
        }
    }
    let mut rhs = DMatrix::<f64>::zeros(36, 1);
    for col in 0..6 {
        for row in 0..6 {
            rhs[(col * 6 + row, 0)] = -d[(row, col)];
        }
    }
    let solved = big
        .lu()
        .solve(&rhs)
        .ok_or(Error::UnstableDrift { margin: report.margin })?;
    let mut v = Matrix6::zeros();
    for col in 0..6 {
        for row in 0..6 {
            v[(row, col)] = solved[(col * 6 + row, 0)];
        }
    }
    // enforce exact symmetry of the numerical solution
    let v = (v + v.transpose()) * 0.5;
    Ok(CovarianceState {
        time: f64::INFINITY,
        n_phonon: phonon_occupancy(&v),
        cov: v,
    })
}

/// Phonon occupancy read off a covariance matrix.
pub fn phonon_occupancy(v: &Matrix6<f64>) -> f64 {
    (v[(2, 2)] + v[(3, 3)] - 1.0) / 2.0
}

/// Default initial covariance: phonon thermal at n_th, cavity at vacuum,
/// magnon thermal at n_th or vacuum depending on `magnon_thermal`.
pub fn initial_covariance(n_th: f64, magnon_thermal: bool) -> Matrix6<f64> {
    let b = n_th + 0.5;
    let m = if magnon_thermal { n_th + 0.5 } else { 0.5 };
    Matrix6::from_diagonal(&nalgebra::Vector6::new(0.5, 0.5, b, b, m, m))
}

// --- adaptive Dormand-Prince 5(4) on the 21 independent entries of V ---

const N21: usize = 21;

fn pack(v: &Matrix6<f64>) -> [f64; N21] {
    let mut out = [0.0; N21];
    let mut k = 0;
    for row in 0..6 {
        for col in row..6 {
            out[k] = v[(row, col)];
            k += 1;
        }
    }
    out
}

fn unpack(y: &[f64; N21]) -> Matrix6<f64> {
    let mut v = Matrix6::zeros();
    let mut k = 0;
    for row in 0..6 {
        for col in row..6 {
            v[(row, col)] = y[k];
            v[(col, row)] = y[k];
            k += 1;
        }
    }
    v
}

fn rhs(a: &Matrix6<f64>, d: &Matrix6<f64>, y: &[f64; N21]) -> [f64; N21] {
    let v = unpack(y);
    let av = a * v;
    let full = av + av.transpose() + d;
    pack(&full)
}

/// Integrate V̇ = A V + V Aᵀ + D from `v0`, sampling at `t_grid`.
///
/// Classic Dormand-Prince 5(4) pair with PI-free step control at relative
/// tolerance 1e-8; symmetry is preserved exactly by construction (the state
/// is the packed upper triangle). An excursion of any entry beyond 1e12
/// times the initial scale aborts with the stability report attached.
pub fn evolve_covariance(
    params: &SystemParams,
    n_th: f64,
    v0: Option<Matrix6<f64>>,
    t_grid: &[f64],
) -> Result<Vec<CovarianceState>> {
    if t_grid.is_empty() {
        return Err(Error::domain("time grid must be non-empty"));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("time grid must be increasing from >= 0"));
    }
    let a = drift_matrix(params)?;
    let d = diffusion_matrix(params, n_th)?;
    let v0 = match v0 {
        Some(v) => {
            let asym = (v - v.transpose()).abs().max();
            if asym > 1e-10 * v.abs().max().max(1.0) {
                return Err(Error::domain("initial covariance must be symmetric"));
            }
            (v + v.transpose()) * 0.5
        }
        None => initial_covariance(n_th, true),
    };
    let scale0 = v0.abs().max().max(1.0);
    let bound = 1e12 * scale0;

    const RTOL: f64 = 1e-8;
    const ATOL_REL: f64 = 1e-12; // times the initial scale
    let atol = ATOL_REL * scale0;

    // Dormand-Prince coefficients
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // embedded 4th-order weights
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;
    let _ = C;

    let mut y = pack(&v0);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    // characteristic time from the fastest rate in A
    let a_scale = a.abs().max().max(f64::MIN_POSITIVE);
    let mut h = 1e-3 / a_scale;

    let mut k1 = rhs(&a, &d, &y);
    for &t_target in t_grid {
        if t_target == 0.0 && t == 0.0 {
            out.push(CovarianceState {
                time: 0.0,
                cov: unpack(&y),
                n_phonon: phonon_occupancy(&unpack(&y)),
            });
            continue;
        }
        while t < t_target {
            let h_try = h.min(t_target - t);
            // stages
            let mut y2 = [0.0; N21];
            for i in 0..N21 {
                y2[i] = y[i] + h_try * A21 * k1[i];
            }
            let k2 = rhs(&a, &d, &y2);
            let mut y3 = [0.0; N21];
            for i in 0..N21 {
                y3[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i]);
            }
            let k3 = rhs(&a, &d, &y3);
            let mut y4 = [0.0; N21];
            for i in 0..N21 {
                y4[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            let k4 = rhs(&a, &d, &y4);
            let mut y5 = [0.0; N21];
            for i in 0..N21 {
                y5[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            let k5 = rhs(&a, &d, &y5);
            let mut y6 = [0.0; N21];
            for i in 0..N21 {
                y6[i] = y[i]
                    + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let k6 = rhs(&a, &d, &y6);
            let mut y_new = [0.0; N21];
            for i in 0..N21 {
                y_new[i] = y[i]
                    + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            let k7 = rhs(&a, &d, &y_new);
            // error estimate: 5th minus 4th
            let mut err_norm: f64 = 0.0;
            for i in 0..N21 {
                let y4th = y[i]
                    + h_try
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                            + E7 * k7[i]);
                let sc = atol + RTOL * y[i].abs().max(y_new[i].abs());
                let e = (y_new[i] - y4th) / sc;
                err_norm += e * e;
            }
            err_norm = (err_norm / N21 as f64).sqrt();

            if err_norm <= 1.0 {
                t += h_try;
                y = y_new;
                k1 = k7; // FSAL
                if y.iter().any(|v| !v.is_finite() || v.abs() > bound) {
                    let report = stability(params)?;
                    return Err(Error::Divergence {
                        t,
                        margin: report.margin,
                    });
                }
            }
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h_try * factor).max(1e-6 / a_scale);
        }
        let v = unpack(&y);
        out.push(CovarianceState {
            time: t_target,
            n_phonon: phonon_occupancy(&v),
            cov: v,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const WB: f64 = 6.283185307179586e7;

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

    fn uncoupled(kappa_sign: f64) -> SystemParams {
        let mut p = canonical(kappa_sign, 0.0, -1.0);
        p.j_coupling = 0.0;
        p
    }

    #[test]
    fn drift_block_diagonal_when_uncoupled() {
        let p = uncoupled(1.0);
        let a = drift_matrix(&p).unwrap();
        // phonon block is the damped rotation
        assert_relative_eq!(a[(2, 2)], -p.gamma_b / 2.0, max_relative = 1e-15);
        assert_relative_eq!(a[(2, 3)], p.omega_b, max_relative = 1e-15);
        assert_relative_eq!(a[(3, 2)], -p.omega_b, max_relative = 1e-15);
        assert_relative_eq!(a[(3, 3)], -p.gamma_b / 2.0, max_relative = 1e-15);
        // no cross blocks
        for r in 0..2 {
            for c in 2..6 {
                assert_eq!(a[(r, c)], 0.0);
                assert_eq!(a[(c, r)], 0.0);
            }
        }
    }

    #[test]
    fn drift_trace() {
        let p = canonical(1.0, 0.03, -1.001);
        let a = drift_matrix(&p).unwrap();
        // summation order of the large cancelling halves costs a few ulp
        assert_relative_eq!(
            a.trace(),
            p.kappa_a - p.kappa_m - p.gamma_b,
            max_relative = 1e-10
        );
    }

    #[test]
    fn drift_spectrum_matches_supermodes_when_g_is_zero() {
        // Nonzero eigenvalues of the a-m 4x4 block equal -i(xi± - omega_L)
        // and conjugates. J is moved off the exceptional point: eigensolvers
        // only carry O(sqrt(eps)) accuracy on the defective matrix there.
        let mut p = canonical(1.0, 0.0, -1.3);
        p.j_coupling = 0.15 * WB;
        let rep = stability(&p).unwrap();
        let pair =
            crate::supermodes::supermode_frequencies(p.omega_a, p.j_coupling, p.kappa_a, p.kappa_m)
                .unwrap();
        let expected = [
            -Complex64::i() * (pair.xi_plus - p.omega_drive),
            -Complex64::i() * (pair.xi_minus - p.omega_drive),
            (-Complex64::i() * (pair.xi_plus - p.omega_drive)).conj(),
            (-Complex64::i() * (pair.xi_minus - p.omega_drive)).conj(),
        ];
        for e in expected {
            let nearest = rep
                .eigenvalues
                .iter()
                .map(|l| (l - e).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-9 * WB, "missing eigenvalue {e}");
        }
    }

    #[test]
    fn diffusion_blocks() {
        let p = canonical(1.0, 0.03, -1.0);
        let d0 = diffusion_matrix(&p, 0.0).unwrap();
        assert_relative_eq!(d0[(2, 2)], p.gamma_b / 2.0, max_relative = 1e-15);
        let d = diffusion_matrix(&p, 7.0).unwrap();
        assert_relative_eq!(d[(0, 0)], p.kappa_a / 2.0, max_relative = 1e-15);
        assert_relative_eq!(d[(4, 4)], p.kappa_m / 2.0, max_relative = 1e-15);
        assert_relative_eq!(d[(2, 2)], p.gamma_b * 7.5, max_relative = 1e-15);
        // balanced rates: gain block equals magnon block
        assert_eq!(d[(0, 0)], d[(4, 4)]);
        // positive semidefinite: diagonal with non-negative entries
        assert!((0..6).all(|i| d[(i, i)] >= 0.0));
        assert!(diffusion_matrix(&p, -1.0).is_err());
    }

    #[test]
    fn stability_of_uncoupled_gain_and_loss() {
        let gain = uncoupled(1.0);
        let rep = stability(&gain).unwrap();
        assert!(!rep.stable);
        assert_relative_eq!(rep.margin, gain.kappa_a / 2.0, max_relative = 1e-9);
        let loss = uncoupled(-1.0);
        let rep = stability(&loss).unwrap();
        assert!(rep.stable);
    }

    #[test]
    fn steady_covariance_uncoupled_is_thermal() {
        let p = uncoupled(-1.0);
        let v = steady_covariance(&p, 42.0).unwrap();
        assert_relative_eq!(v.n_phonon, 42.0, max_relative = 1e-9);
    }

    #[test]
    fn steady_covariance_rejects_unstable_drift() {
        let p = canonical(1.0, 0.03, -1.001);
        assert!(matches!(
            steady_covariance(&p, 10.0),
            Err(Error::UnstableDrift { .. })
        ));
    }

    #[test]
    fn lyapunov_residual_small() {
        let p = canonical(-1.0, 0.03, -1.0);
        let n_th = 1.0e3;
        let v = steady_covariance(&p, n_th).unwrap();
        let a = drift_matrix(&p).unwrap();
        let d = diffusion_matrix(&p, n_th).unwrap();
        let resid = a * v.cov + v.cov * a.transpose() + d;
        let rel = resid.abs().max() / d.abs().max();
        assert!(rel <= 1e-9, "residual {rel}");
    }

    #[test]
    fn lyapunov_matches_weak_coupling_prediction() {
        // Loss system: closed-form balance agrees with the full steady
        // covariance to well under a percent (frozen cross-check: 1.1216).
        let p = canonical(-1.0, 0.03, -1.0);
        let v = steady_covariance(&p, 1.0e3).unwrap();
        assert_relative_eq!(v.n_phonon, 1.1216107, max_relative = 1e-5);
    }

    #[test]
    fn evolve_uncoupled_stays_thermal() {
        let p = uncoupled(-1.0);
        let n_th = 17.0;
        let t_grid: Vec<f64> = (0..6).map(|k| k as f64 * 20.0 / WB).collect();
        let states = evolve_covariance(&p, n_th, None, &t_grid).unwrap();
        for s in states {
            assert_abs_diff_eq!(s.n_phonon, n_th, epsilon = 1e-6);
        }
    }

    #[test]
    fn evolve_relaxes_to_lyapunov_fixed_point() {
        let p = canonical(-1.0, 0.03, -1.0);
        let n_th = 1.0e3;
        let steady = steady_covariance(&p, n_th).unwrap();
        // loss-system slowest rate ~ 4.5e-3 wb: integrate past the transient
        let t_end = 6.0e3 / WB;
        let states = evolve_covariance(&p, n_th, None, &[t_end]).unwrap();
        assert_abs_diff_eq!(states[0].n_phonon, steady.n_phonon, epsilon = 1e-6);
    }

    #[test]
    fn evolve_preserves_symmetry_and_positivity_diagnostics() {
        let p = canonical(-1.0, 0.03, -1.0);
        let t_grid: Vec<f64> = (1..20).map(|k| k as f64 * 50.0 / WB).collect();
        let states = evolve_covariance(&p, 1.0e3, None, &t_grid).unwrap();
        for s in &states {
            let asym = (s.cov - s.cov.transpose()).abs().max();
            assert!(asym <= 1e-10 * s.cov.abs().max());
            assert!(s.n_phonon >= -1e-8);
            assert!(s.cov.determinant().is_finite());
        }
    }

    #[test]
    fn evolve_detects_divergence() {
        // strongly unstable bare-gain system blows past the bound quickly
        let p = uncoupled(1.0);
        let t_grid = [5.0e4 / WB];
        match evolve_covariance(&p, 1.0, None, &t_grid) {
            Err(Error::Divergence { margin, .. }) => assert!(margin > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn unstable_gain_transient_dips_then_grows() {
        // The balanced-gain operating point is linearly unstable; the
        // covariance transient cools only partially before diverging.
        let p = canonical(1.0, 0.03, -1.001);
        let rep = stability(&p).unwrap();
        assert!(!rep.stable);
        assert_relative_eq!(rep.margin / WB, 3.8174e-2, max_relative = 1e-3);
        let t_grid: Vec<f64> = (1..=60).map(|k| k as f64 * 2.0 / WB).collect();
        let states = evolve_covariance(&p, 1.0e3, None, &t_grid).unwrap();
        let min = states
            .iter()
            .map(|s| s.n_phonon)
            .fold(f64::INFINITY, f64::min);
        assert!(min < 1.0e3 && min > 1.0, "transient minimum {min}");
        assert!(states.last().unwrap().n_phonon > min);
    }
}
