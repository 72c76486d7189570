//! Plain-text key-value configuration: flat keys, SI units, scientific
//! notation, and ratio keys expanded at load time. Unknown keys are rejected.
//!
//! Lines are `key = value`; `#` starts a comment. Keys are processed in file
//! order, so a ratio key uses whatever its referent holds at that point.

use std::collections::BTreeMap;

use crate::constants::GYRO_RATIO;
use crate::error::{Error, Result};
use crate::model::{thermal_occupancy, SphereSpec, SystemParams};
use crate::spectrum::SpectrumFormula;

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub sphere: SphereSpec,
    /// Bath occupancy; set directly or via `temperature`.
    pub n_th: f64,
    pub spectrum_formula: SpectrumFormula,
    /// Use kappa/2 in the steady-state amplitudes instead of unhalved rates.
    pub steady_state_halfwidth: bool,
    /// Start the magnon thermal (true) or at vacuum (false) in `evolve`.
    pub magnon_starts_thermal: bool,
    /// Route-consistency warning tolerance.
    pub weak_coupling_tolerance: f64,
    /// Resolved key/value pairs for reproducible output headers.
    pub resolved: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
struct Builder {
    omega_a: Option<f64>,
    omega_m: Option<f64>,
    omega_b: Option<f64>,
    kappa_a: Option<f64>,
    kappa_m: Option<f64>,
    gamma_b: Option<f64>,
    j_coupling: f64,
    g_single: f64,
    omega_drive: Option<f64>,
    rabi: f64,
    g_override: Option<f64>,
    n_th: Option<f64>,
    temperature: Option<f64>,
    sphere_radius: f64,
    spin_density: f64,
    gyro_ratio: f64,
    bias_field: f64,
    drive_field: f64,
    spectrum_formula: SpectrumFormula,
    steady_state_halfwidth: bool,
    magnon_starts_thermal: bool,
    weak_coupling_tolerance: f64,
}

impl Default for Builder {
    fn default() -> Self {
        Self {
            omega_a: None,
            omega_m: None,
            omega_b: None,
            kappa_a: None,
            kappa_m: None,
            gamma_b: None,
            j_coupling: 0.0,
            g_single: 0.0,
            omega_drive: None,
            rabi: 0.0,
            g_override: None,
            n_th: None,
            temperature: None,
            sphere_radius: 125.0e-6,
            spin_density: 4.22e27,
            gyro_ratio: GYRO_RATIO,
            bias_field: 0.0,
            drive_field: 0.0,
            spectrum_formula: SpectrumFormula::QuantumNoise,
            steady_state_halfwidth: false,
            magnon_starts_thermal: true,
            weak_coupling_tolerance: 0.05,
        }
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Config {
        line,
        msg: format!("key `{key}`: cannot parse `{value}` as a number"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "on" => Ok(true),
        "false" | "0" | "off" => Ok(false),
        _ => Err(Error::Config {
            line,
            msg: format!("key `{key}`: expected true/false, got `{value}`"),
        }),
    }
}

fn require(line: usize, key: &str, field: Option<f64>, name: &str) -> Result<f64> {
    field.ok_or_else(|| Error::Config {
        line,
        msg: format!("ratio key `{key}` needs `{name}` set earlier in the file"),
    })
}

/// Parse configuration text into a resolved [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut b = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        apply_key(&mut b, line_no, key.trim(), value.trim())?;
    }
    finalize(b)
}

/// Apply one `key=value` override (the CLI `--set` path). Line 0 marks
/// override provenance in error messages.
pub fn apply_override(config: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    // Rebuild through the builder so ratio keys keep working for overrides.
    let mut b = builder_from(config);
    apply_key(&mut b, 0, key.trim(), value.trim())?;
    let mut rebuilt = finalize(b)?;
    rebuilt
        .resolved
        .insert(format!("override {key}"), value.to_string());
    for (k, v) in config.resolved.iter() {
        if k.starts_with("override ") {
            rebuilt.resolved.insert(k.clone(), v.clone());
        }
    }
    *config = rebuilt;
    Ok(())
}

fn builder_from(c: &RunConfig) -> Builder {
    Builder {
        omega_a: Some(c.params.omega_a),
        omega_m: Some(c.params.omega_m),
        omega_b: Some(c.params.omega_b),
        kappa_a: Some(c.params.kappa_a),
        kappa_m: Some(c.params.kappa_m),
        gamma_b: Some(c.params.gamma_b),
        j_coupling: c.params.j_coupling,
        g_single: c.params.g_single,
        omega_drive: Some(c.params.omega_drive),
        rabi: c.params.rabi,
        g_override: c.params.g_linearized_override,
        n_th: Some(c.n_th),
        temperature: None,
        sphere_radius: c.sphere.radius,
        spin_density: c.sphere.spin_density,
        gyro_ratio: c.sphere.gyro_ratio,
        bias_field: c.sphere.bias_field,
        drive_field: c.sphere.drive_field_amplitude,
        spectrum_formula: c.spectrum_formula,
        steady_state_halfwidth: c.steady_state_halfwidth,
        magnon_starts_thermal: c.magnon_starts_thermal,
        weak_coupling_tolerance: c.weak_coupling_tolerance,
    }
}

fn apply_key(b: &mut Builder, line: usize, key: &str, value: &str) -> Result<()> {
    match key {
        "omega_a" => b.omega_a = Some(parse_f64(line, key, value)?),
        "omega_m" => b.omega_m = Some(parse_f64(line, key, value)?),
        "omega_b" => b.omega_b = Some(parse_f64(line, key, value)?),
        "kappa_a" => b.kappa_a = Some(parse_f64(line, key, value)?),
        "kappa_m" => b.kappa_m = Some(parse_f64(line, key, value)?),
        "gamma_b" => b.gamma_b = Some(parse_f64(line, key, value)?),
        "j_coupling" => b.j_coupling = parse_f64(line, key, value)?,
        "g_single" => b.g_single = parse_f64(line, key, value)?,
        "omega_drive" => b.omega_drive = Some(parse_f64(line, key, value)?),
        "rabi" => b.rabi = parse_f64(line, key, value)?,
        "g_override" => b.g_override = Some(parse_f64(line, key, value)?),
        "n_th" => b.n_th = Some(parse_f64(line, key, value)?),
        "temperature" => b.temperature = Some(parse_f64(line, key, value)?),
        "sphere_radius" => b.sphere_radius = parse_f64(line, key, value)?,
        "spin_density" => b.spin_density = parse_f64(line, key, value)?,
        "gyro_ratio" => b.gyro_ratio = parse_f64(line, key, value)?,
        "bias_field" => b.bias_field = parse_f64(line, key, value)?,
        "drive_field" => b.drive_field = parse_f64(line, key, value)?,
        // ratio keys, expanded immediately
        "omega_a_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.omega_a = Some(parse_f64(line, key, value)? * wb);
        }
        "omega_m_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.omega_m = Some(parse_f64(line, key, value)? * wb);
        }
        "kappa_m_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.kappa_m = Some(parse_f64(line, key, value)? * wb);
        }
        "kappa_a_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.kappa_a = Some(parse_f64(line, key, value)? * wb);
        }
        "kappa_a_over_kappa_m" => {
            let km = require(line, key, b.kappa_m, "kappa_m")?;
            b.kappa_a = Some(parse_f64(line, key, value)? * km);
        }
        "gamma_b_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.gamma_b = Some(parse_f64(line, key, value)? * wb);
        }
        "j_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.j_coupling = parse_f64(line, key, value)? * wb;
        }
        "g_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            b.g_override = Some(parse_f64(line, key, value)? * wb);
        }
        "g_over_kappa_m" => {
            let km = require(line, key, b.kappa_m, "kappa_m")?;
            b.g_override = Some(parse_f64(line, key, value)? * km);
        }
        "detuning_over_omega_b" => {
            let wb = require(line, key, b.omega_b, "omega_b")?;
            let wa = require(line, key, b.omega_a, "omega_a")?;
            b.omega_drive = Some(wa + parse_f64(line, key, value)? * wb);
        }
        // behavior switches
        "spectrum_formula" => {
            b.spectrum_formula = SpectrumFormula::parse(value).ok_or_else(|| Error::Config {
                line,
                msg: format!(
                    "key `spectrum_formula`: `{value}` is not one of quantum_noise / thermal_bare / thermal_dressed"
                ),
            })?;
        }
        "steady_state_halfwidth" => b.steady_state_halfwidth = parse_bool(line, key, value)?,
        "magnon_starts_thermal" => b.magnon_starts_thermal = parse_bool(line, key, value)?,
        "weak_coupling_tolerance" => b.weak_coupling_tolerance = parse_f64(line, key, value)?,
        _ => {
            return Err(Error::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
    }
    Ok(())
}

fn finalize(b: Builder) -> Result<RunConfig> {
    let missing = |name: &str| Error::Config {
        line: 0,
        msg: format!("required key `{name}` was never set"),
    };
    let omega_b = b.omega_b.ok_or_else(|| missing("omega_b"))?;
    let omega_a = b.omega_a.ok_or_else(|| missing("omega_a"))?;
    let omega_m = b.omega_m.ok_or_else(|| missing("omega_m"))?;
    let kappa_a = b.kappa_a.ok_or_else(|| missing("kappa_a"))?;
    let kappa_m = b.kappa_m.ok_or_else(|| missing("kappa_m"))?;
    let gamma_b = b.gamma_b.ok_or_else(|| missing("gamma_b"))?;
    let omega_drive = b.omega_drive.ok_or_else(|| missing("omega_drive or detuning_over_omega_b"))?;
    let mut params = SystemParams::new(
        omega_a,
        omega_m,
        omega_b,
        kappa_a,
        kappa_m,
        gamma_b,
        b.j_coupling,
        b.g_single,
        omega_drive,
        b.rabi,
        b.g_override,
    )?;
    params.steady_state_halfwidth = b.steady_state_halfwidth;
    let n_th = match (b.n_th, b.temperature) {
        (Some(n), _) => n,
        (None, Some(t)) => thermal_occupancy(omega_b, t)?,
        (None, None) => 0.0,
    };
    let sphere = SphereSpec {
        radius: b.sphere_radius,
        spin_density: b.spin_density,
        gyro_ratio: b.gyro_ratio,
        bias_field: b.bias_field,
        drive_field_amplitude: b.drive_field,
    };
    let mut resolved = BTreeMap::new();
    let fmt = |v: f64| format!("{v:.16e}");
    resolved.insert("omega_a".into(), fmt(params.omega_a));
    resolved.insert("omega_m".into(), fmt(params.omega_m));
    resolved.insert("omega_b".into(), fmt(params.omega_b));
    resolved.insert("kappa_a".into(), fmt(params.kappa_a));
    resolved.insert("kappa_m".into(), fmt(params.kappa_m));
    resolved.insert("gamma_b".into(), fmt(params.gamma_b));
    resolved.insert("j_coupling".into(), fmt(params.j_coupling));
    resolved.insert("g_single".into(), fmt(params.g_single));
    resolved.insert("omega_drive".into(), fmt(params.omega_drive));
    resolved.insert("rabi".into(), fmt(params.rabi));
    if let Some(g) = params.g_linearized_override {
        resolved.insert("g_override".into(), fmt(g));
    }
    resolved.insert("n_th".into(), fmt(n_th));
    resolved.insert("sphere_radius".into(), fmt(sphere.radius));
    resolved.insert("spin_density".into(), fmt(sphere.spin_density));
    resolved.insert("gyro_ratio".into(), fmt(sphere.gyro_ratio));
    resolved.insert("bias_field".into(), fmt(sphere.bias_field));
    resolved.insert("drive_field".into(), fmt(sphere.drive_field_amplitude));
    resolved.insert(
        "spectrum_formula".into(),
        b.spectrum_formula.as_str().to_string(),
    );
    resolved.insert(
        "steady_state_halfwidth".into(),
        b.steady_state_halfwidth.to_string(),
    );
    resolved.insert(
        "magnon_starts_thermal".into(),
        b.magnon_starts_thermal.to_string(),
    );
    resolved.insert(
        "weak_coupling_tolerance".into(),
        fmt(b.weak_coupling_tolerance),
    );
    Ok(RunConfig {
        params,
        sphere,
        n_th,
        spectrum_formula: b.spectrum_formula,
        steady_state_halfwidth: b.steady_state_halfwidth,
        magnon_starts_thermal: b.magnon_starts_thermal,
        weak_coupling_tolerance: b.weak_coupling_tolerance,
        resolved,
    })
}
