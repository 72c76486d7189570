//! Command-line front end: configuration ingestion, sweep orchestration,
//! and deterministic CSV emission.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration parse error, 3 physics
//! domain error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use magnomech::{
    apply_override, cooling_report, detuning_sweep, evolve_covariance, field_sweep,
    force_noise_spectrum, initial_covariance, linspace, parse_config, rate_equation_steady_state,
    scattering_rates_with_tolerance, spectrum_sweep, stability, steady_covariance, supermodes,
    Error, RunConfig, SpectrumFormula,
};
use output::{fmt_float, Document};

#[derive(Parser)]
#[command(
    name = "magnomech",
    version,
    about = "Cavity-magnomechanical cooling: supermodes, noise spectra, cooling limits, covariance dynamics",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Parameter file (flat key = value, SI units).
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep grid AXIS:START:STOP:N (axis depends on the subcommand).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Supermode eigenvalues along a J or kappa_a grid (axes: j, kappa_a; omega_b units).
    EigenSweep(Common),
    /// Force-noise spectrum over omega (axis: omega; omega_b units).
    Spectrum(Common),
    /// Scattering rates and net cooling rate over drive detuning (axis: detuning; omega_b units).
    CoolingRate(Common),
    /// Final occupancy versus bath occupancy (axis: n_th).
    PhononVsNth(Common),
    /// Final occupancy versus drive detuning (axis: detuning; omega_b units).
    PhononVsDetuning(Common),
    /// Final occupancy versus bias field (axis: field_mT).
    FieldSweep(Common),
    /// Covariance time evolution (axis: time; seconds).
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Also dump the 21 independent covariance entries per sample.
        #[arg(long)]
        covariance: bool,
    },
    /// Run the self-test battery on the loaded configuration.
    Check(Common),
}

#[derive(Debug, Clone)]
struct Grid {
    axis: String,
    start: f64,
    stop: f64,
    n: usize,
}

impl Grid {
    fn describe(&self) -> String {
        format!("{}:{}:{}:{}", self.axis, self.start, self.stop, self.n)
    }

    fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.n)
    }
}

enum Failure {
    Usage(String),
    Parse(String),
    Physics(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Parse(e.to_string()),
            other => Failure::Physics(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are success paths
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Physics(msg)) => {
            eprintln!("physics error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Parse(format!("{}: {e}", common.config.display())))?;
    let mut config = parse_config(&text)?;
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        apply_override(&mut config, k, v)?;
    }
    Ok(config)
}

fn parse_grid(common: &Common, allowed: &[&str], default: Grid) -> Result<Grid, Failure> {
    let Some(spec) = &common.grid else {
        return Ok(default);
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(Failure::Usage(format!(
            "--grid expects AXIS:START:STOP:N, got `{spec}`"
        )));
    }
    let axis = parts[0].to_string();
    if !allowed.contains(&axis.as_str()) {
        return Err(Failure::Usage(format!(
            "axis `{axis}` not valid here (expected one of {allowed:?})"
        )));
    }
    let start: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::Usage(format!("bad grid start `{}`", parts[1])))?;
    let stop: f64 = parts[2]
        .parse()
        .map_err(|_| Failure::Usage(format!("bad grid stop `{}`", parts[2])))?;
    let n: usize = parts[3]
        .parse()
        .map_err(|_| Failure::Usage(format!("bad grid count `{}`", parts[3])))?;
    if n == 0 || (n > 1 && stop <= start) {
        return Err(Failure::Usage(
            "grid needs N >= 1 and stop > start".to_string(),
        ));
    }
    Ok(Grid { axis, start, stop, n })
}

fn emit(common: &Common, doc: Document) -> Result<(), Failure> {
    let text = doc.into_string();
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::EigenSweep(c) => eigen_sweep(&c),
        Command::Spectrum(c) => spectrum_cmd(&c),
        Command::CoolingRate(c) => cooling_rate(&c),
        Command::PhononVsNth(c) => phonon_vs_nth(&c),
        Command::PhononVsDetuning(c) => phonon_vs_detuning(&c),
        Command::FieldSweep(c) => field_sweep_cmd(&c),
        Command::Evolve { common, covariance } => evolve_cmd(&common, covariance),
        Command::Check(c) => check_cmd(&c),
    }
}

fn eigen_sweep(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let wb = config.params.omega_b;
    let grid = parse_grid(
        common,
        &["j", "kappa_a"],
        Grid {
            axis: "j".into(),
            start: 0.0,
            stop: 0.2,
            n: 1001,
        },
    )?;
    let axis = if grid.axis == "j" {
        supermodes::SweepAxis::CouplingJ
    } else {
        supermodes::SweepAxis::GainKappaA
    };
    let si: Vec<f64> = grid.points().iter().map(|v| v * wb).collect();
    let rows = supermodes::sweep_eigenvalues(axis, &si, &config.params)?;
    let mut doc = Document::new(
        "eigen_sweep",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.comment("axis in omega_b units; eigenvalues in rad/s");
    doc.columns(&[
        "axis",
        "re_xi_plus",
        "im_xi_plus",
        "re_xi_minus",
        "im_xi_minus",
        "phase",
    ]);
    for r in rows {
        doc.row(&[
            fmt_float(r.axis_value / wb),
            fmt_float(r.pair.xi_plus.re),
            fmt_float(r.pair.xi_plus.im),
            fmt_float(r.pair.xi_minus.re),
            fmt_float(r.pair.xi_minus.im),
            r.pair.phase.as_str().to_string(),
        ]);
    }
    emit(common, doc)
}

fn spectrum_cmd(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let wb = config.params.omega_b;
    let grid = parse_grid(
        common,
        &["omega"],
        Grid {
            axis: "omega".into(),
            start: 0.5,
            stop: 1.5,
            n: 4000,
        },
    )?;
    let si: Vec<f64> = grid.points().iter().map(|v| v * wb).collect();
    let rows = spectrum_sweep(&config.params, &si, config.spectrum_formula);
    let mut doc = Document::new(
        "spectrum",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.comment("s_ff and component terms in rad/s");
    doc.columns(&["omega_over_omega_b", "s_ff", "term_thermal", "term_cavity"]);
    let mut undefined = 0usize;
    for (w, res) in rows {
        match res {
            Ok(pt) => doc.row(&[
                fmt_float(w / wb),
                fmt_float(pt.s_ff),
                fmt_float(pt.term_thermal),
                fmt_float(pt.term_cavity),
            ]),
            Err(_) => {
                undefined += 1;
                doc.row(&[
                    fmt_float(w / wb),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                ]);
            }
        }
    }
    doc.comment(&format!("undefined_rows = {undefined}"));
    emit(common, doc)
}

fn cooling_rate(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = parse_grid(
        common,
        &["detuning"],
        Grid {
            axis: "detuning".into(),
            start: -2.0,
            stop: 0.0,
            n: 1000,
        },
    )?;
    let rows = detuning_sweep(
        &config.params,
        &grid.points(),
        config.n_th,
        config.spectrum_formula,
    );
    let mut doc = Document::new(
        "cooling_rate",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.comment("rates in rad/s");
    doc.columns(&[
        "detuning_over_omega_b",
        "a_plus",
        "a_minus",
        "gamma_net",
        "gamma_selfenergy",
        "delta_omega_b",
    ]);
    let mut undefined = 0usize;
    for (d, res) in rows {
        match res {
            Ok((rates, _)) => doc.row(&[
                fmt_float(d),
                fmt_float(rates.a_plus),
                fmt_float(rates.a_minus),
                fmt_float(rates.gamma_net),
                fmt_float(rates.gamma_selfenergy),
                fmt_float(rates.delta_omega_b),
            ]),
            Err(_) => {
                undefined += 1;
                doc.row(&[
                    fmt_float(d),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                ]);
            }
        }
    }
    doc.comment(&format!("undefined_rows = {undefined}"));
    emit(common, doc)
}

fn phonon_vs_nth(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = parse_grid(
        common,
        &["n_th"],
        Grid {
            axis: "n_th".into(),
            start: 1.0,
            stop: 1.0e6,
            n: 1000,
        },
    )?;
    // the rates do not depend on n_th; evaluate once
    let rates = scattering_rates_with_tolerance(
        &config.params,
        config.spectrum_formula,
        config.weak_coupling_tolerance,
    )?;
    let mut doc = Document::new(
        "phonon_vs_nth",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.columns(&["n_th", "n_f"]);
    let mut undefined = 0usize;
    for n_th in grid.points() {
        match magnomech::final_phonon_number(&rates, config.params.gamma_b, n_th) {
            Ok(rep) => doc.row(&[fmt_float(n_th), fmt_float(rep.n_f)]),
            Err(_) => {
                undefined += 1;
                doc.row(&[fmt_float(n_th), "nan".into()]);
            }
        }
    }
    doc.comment(&format!("undefined_rows = {undefined}"));
    emit(common, doc)
}

fn phonon_vs_detuning(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = parse_grid(
        common,
        &["detuning"],
        Grid {
            axis: "detuning".into(),
            start: -2.0,
            stop: 0.0,
            n: 1000,
        },
    )?;
    let rows = detuning_sweep(
        &config.params,
        &grid.points(),
        config.n_th,
        config.spectrum_formula,
    );
    let mut doc = Document::new(
        "phonon_vs_detuning",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.columns(&["detuning_over_omega_b", "n_f"]);
    let mut undefined = 0usize;
    for (d, res) in rows {
        match res {
            Ok((_, rep)) => doc.row(&[fmt_float(d), fmt_float(rep.n_f)]),
            Err(_) => {
                undefined += 1;
                doc.row(&[fmt_float(d), "nan".into()]);
            }
        }
    }
    doc.comment(&format!("undefined_rows = {undefined}"));
    emit(common, doc)
}

fn field_sweep_cmd(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = parse_grid(
        common,
        &["field_mT"],
        Grid {
            axis: "field_mT".into(),
            start: 350.0,
            stop: 370.0,
            n: 2001,
        },
    )?;
    let tesla: Vec<f64> = grid.points().iter().map(|v| v * 1e-3).collect();
    let rows = field_sweep(
        &config.sphere,
        &config.params,
        &tesla,
        config.n_th,
        config.spectrum_formula,
    )?;
    let mut doc = Document::new(
        "field_sweep",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.comment("cavity kept degenerate with the Kittel mode along the sweep");
    doc.columns(&["H_mT", "n_f"]);
    let mut undefined = 0usize;
    for (h, res) in rows {
        match res {
            Ok((_, rep)) => doc.row(&[fmt_float(h * 1e3), fmt_float(rep.n_f)]),
            Err(_) => {
                undefined += 1;
                doc.row(&[fmt_float(h * 1e3), "nan".into()]);
            }
        }
    }
    doc.comment(&format!("undefined_rows = {undefined}"));
    emit(common, doc)
}

fn evolve_cmd(common: &Common, covariance: bool) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = parse_grid(
        common,
        &["time"],
        Grid {
            axis: "time".into(),
            start: 0.0,
            stop: 1.6e-6,
            n: 501,
        },
    )?;
    let report = stability(&config.params)?;
    let v0 = initial_covariance(config.n_th, config.magnon_starts_thermal);
    let states = evolve_covariance(&config.params, config.n_th, Some(v0), &grid.points())?;
    let mut doc = Document::new(
        "evolve",
        &common.config.display().to_string(),
        &config,
        &grid.describe(),
    );
    doc.comment(&format!(
        "drift stability: stable = {}, margin = {} rad/s",
        report.stable,
        fmt_float(report.margin)
    ));
    if covariance {
        let mut cols = vec!["t_seconds".to_string(), "n_phonon".to_string()];
        for r in 0..6 {
            for c in r..6 {
                cols.push(format!("v{r}{c}"));
            }
        }
        let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        doc.columns(&refs);
    } else {
        doc.columns(&["t_seconds", "n_phonon"]);
    }
    for s in states {
        let mut fields = vec![fmt_float(s.time), fmt_float(s.n_phonon)];
        if covariance {
            for r in 0..6 {
                for c in r..6 {
                    fields.push(fmt_float(s.cov[(r, c)]));
                }
            }
        }
        doc.row(&fields);
    }
    emit(common, doc)
}

fn check_cmd(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let p = &config.params;
    let wb = p.omega_b;
    let mut doc = Document::new(
        "check",
        &common.config.display().to_string(),
        &config,
        "none",
    );
    let mut failures = 0usize;
    let mut record = |doc: &mut Document, name: &str, outcome: Result<bool, String>| match outcome {
        Ok(true) => doc.comment(&format!("check {name}: pass")),
        Ok(false) => doc.comment(&format!("check {name}: skipped (not applicable here)")),
        Err(msg) => {
            failures += 1;
            doc.comment(&format!("check {name}: FAIL ({msg})"));
        }
    };

    // supermode trace identity along a short J sweep
    let trace_ok = (|| -> Result<bool, String> {
        if (p.omega_a - p.omega_m).abs() > 1e-12 * p.omega_a {
            return Ok(false);
        }
        for k in 0..=20 {
            let j = 0.01 * k as f64 * wb;
            let pr = supermodes::supermode_frequencies(p.omega_a, j, p.kappa_a, p.kappa_m)
                .map_err(|e| e.to_string())?;
            let tr_re = pr.xi_plus.re + pr.xi_minus.re;
            if (tr_re - 2.0 * p.omega_a).abs() > 1e-11 * p.omega_a {
                return Err(format!("trace identity off at J = {j}"));
            }
        }
        Ok(true)
    })();
    record(&mut doc, "supermode_trace_identity", trace_ok);

    // spectrum term additivity at sample frequencies
    let additivity = (|| -> Result<bool, String> {
        let mut tested = false;
        for k in 1..=19 {
            let w = 0.1 * k as f64 * wb;
            if let Ok(pt) = force_noise_spectrum(p, w, config.spectrum_formula) {
                tested = true;
                let sum = pt.term_thermal + pt.term_cavity;
                if (pt.s_ff - sum).abs() > 1e-12 * pt.s_ff.abs().max(1e-300) {
                    return Err(format!("terms do not sum at omega = {w}"));
                }
            }
        }
        Ok(tested)
    })();
    record(&mut doc, "spectrum_term_additivity", additivity);

    // coupling-squared scaling of the rates
    let scaling = (|| -> Result<bool, String> {
        let g = match p.g_linearized() {
            Ok(g) if g > 0.0 => g,
            _ => return Ok(false),
        };
        let mut doubled = p.clone();
        doubled.g_linearized_override = Some(2.0 * g);
        let r1 = match scattering_rates_with_tolerance(p, config.spectrum_formula, 0.05) {
            Ok(r) => r,
            Err(_) => return Ok(false), // pole at this operating point
        };
        let r2 = scattering_rates_with_tolerance(&doubled, config.spectrum_formula, 0.05)
            .map_err(|e| e.to_string())?;
        if (r2.gamma_selfenergy / r1.gamma_selfenergy - 4.0).abs() > 1e-9 {
            return Err("gamma does not scale as |G|^2".into());
        }
        Ok(true)
    })();
    record(&mut doc, "coupling_squared_scaling", scaling);

    // route consistency of the two net-rate computations
    let routes = (|| -> Result<bool, String> {
        match scattering_rates_with_tolerance(p, config.spectrum_formula, config.weak_coupling_tolerance) {
            Ok(r) => {
                if config.spectrum_formula == SpectrumFormula::QuantumNoise && r.gap_warning {
                    Err(format!("route gap {} above tolerance", r.route_gap))
                } else {
                    Ok(true)
                }
            }
            Err(_) => Ok(false),
        }
    })();
    record(&mut doc, "net_rate_route_consistency", routes);

    // detailed-balance oracle against the closed form
    let oracle = (|| -> Result<bool, String> {
        let (rates, rep) = match cooling_report(p, config.n_th, config.spectrum_formula, 1.0) {
            Ok(x) => x,
            Err(_) => return Ok(false),
        };
        if !(rates.a_minus > rates.a_plus && rates.a_plus >= 0.0) {
            return Ok(false);
        }
        let n = rate_equation_steady_state(
            rates.a_plus,
            rates.a_minus,
            p.gamma_b,
            config.n_th,
            None,
        )
        .map_err(|e| e.to_string())?;
        let denom = rep.n_f.abs().max(1e-12);
        if (n - rep.n_f).abs() / denom > 1e-6 {
            return Err(format!("oracle {n} vs closed form {}", rep.n_f));
        }
        Ok(true)
    })();
    record(&mut doc, "rate_equation_oracle", oracle);

    // Lyapunov residual when the drift is stable
    let lyap = (|| -> Result<bool, String> {
        let report = stability(p).map_err(|e| e.to_string())?;
        if !report.stable {
            return Ok(false);
        }
        let v = steady_covariance(p, config.n_th).map_err(|e| e.to_string())?;
        let a = magnomech::drift_matrix(p).map_err(|e| e.to_string())?;
        let d = magnomech::diffusion_matrix(p, config.n_th).map_err(|e| e.to_string())?;
        let resid = a * v.cov + v.cov * a.transpose() + d;
        let rel = resid.abs().max() / d.abs().max();
        if rel > 1e-9 {
            return Err(format!("Lyapunov residual {rel}"));
        }
        Ok(true)
    })();
    record(&mut doc, "lyapunov_residual", lyap);

    // rerun determinism of a small rendered sweep
    let determinism = (|| -> Result<bool, String> {
        let render = || {
            let grid: Vec<f64> = linspace(0.5, 1.5, 101).iter().map(|v| v * wb).collect();
            let mut s = String::new();
            for (w, res) in spectrum_sweep(p, &grid, config.spectrum_formula) {
                match res {
                    Ok(pt) => s.push_str(&format!("{},{}\n", fmt_float(w / wb), fmt_float(pt.s_ff))),
                    Err(_) => s.push_str(&format!("{},nan\n", fmt_float(w / wb))),
                }
            }
            s
        };
        if render() != render() {
            return Err("rendered sweep differs between runs".into());
        }
        Ok(true)
    })();
    record(&mut doc, "rerun_determinism", determinism);

    let ok = failures == 0;
    doc.comment(if ok { "check: all passed" } else { "check: FAILURES present" });
    emit(common, doc)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Physics(format!("{failures} self-check(s) failed")))
    }
}
