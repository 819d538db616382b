//! Subcommand implementations and the error-to-exit-code mapping.

use std::fmt;
use std::path::Path;

use serde_json::json;

use biphoton_plasma::biphoton::{
    implied_k0, path_config_phase, rc_linear_growth, sensitivity_limit, steady_dip_curve,
    DelayPair, SensitivityQuery,
};
use biphoton_plasma::dispersion::{
    ratio_report, refractive_index, Polarization, ProbeWave, RatioEntry, RatioReportInputs,
};
use biphoton_plasma::inference::{fit_dip_curve, precision_scaling, DipFit};
use biphoton_plasma::mc::{mc_dip_scan, sample_event_batch};
use biphoton_plasma::report::reference_checks;
use biphoton_plasma::Error as CoreError;

use crate::config::{RunConfig, FS, UM};
use crate::emit::{
    csv_field, quantity_csv, resolve_format, resolve_out, term_table_csv, to_json, two_column_csv,
    write_text, DIP_HEADER, EVENT_HEADER,
};
use crate::{Cli, Command, Format};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

/// CLI failure, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Invocation, configuration, or input validation failure (exit 1).
    Validation(String),
    /// The computation failed: non-convergence, no dip, degenerate fit
    /// (exit 2).
    Numerical(String),
    /// `paper-report` found this many checks out of tolerance (exit 3).
    ChecksFailed(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Numerical(msg) => f.write_str(msg),
            CliError::ChecksFailed(n) => write!(f, "{n} reference check(s) out of tolerance"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::ChecksFailed(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::QuadratureNotConverged { .. }
            | CoreError::NoDip { .. }
            | CoreError::DegenerateFit { .. }
            | CoreError::SeriesOutOfDomain { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match cli.command {
        // paper-report needs no configuration (an optional one may still
        // steer output path/format).
        Command::PaperReport => {
            let config = match cli.config.as_deref() {
                Some(path) => Some(RunConfig::load(Some(path))?),
                None => None,
            };
            cmd_paper_report(cli, config.as_ref())
        }
        _ => {
            let config = RunConfig::load(cli.config.as_deref())?;
            match cli.command {
                Command::Dispersion => cmd_dispersion(cli, &config),
                Command::Phase => cmd_phase(cli, &config),
                Command::Dip => cmd_dip(cli, &config),
                Command::LgDip => cmd_lg_dip(cli, &config),
                Command::Mc => cmd_mc(cli, &config),
                Command::Fit => cmd_fit(cli, &config),
                Command::Scaling => cmd_scaling(cli, &config),
                Command::Sensitivity => cmd_sensitivity(cli, &config),
                Command::PaperReport => unreachable!("handled above"),
            }
        }
    }
}

/// The differential plasma delay the interferometer sees: an explicit
/// `interferometer.delta_tau_p_fs`, else the chord-derived path
/// differential when [plasma] + [probe] + [chord] are present, else 0.
fn resolve_delta_tau_p(config: &RunConfig) -> Result<f64, CliError> {
    if let Some(section) = &config.interferometer {
        if let Some(v) = section.delta_tau_p_fs {
            return Ok(v * FS);
        }
    }
    if config.plasma.is_some() && config.probe.is_some() && config.chord.is_some() {
        let state = config.plasma()?.build()?;
        let wave = config.probe()?.build()?;
        let chord = config.chord()?.build()?;
        let phases = path_config_phase(config.path_mode()?, &state, &wave, &chord)?;
        return Ok(phases.differential_delay);
    }
    Ok(0.0)
}

fn fit_summary(fit: &DipFit<f64>) -> String {
    format!(
        "fit: normalization = {:.6}, visibility = {:.6}, dip_center = {:.6e} s \
         (stderr {:.3e}), bandwidth = {:.6e} rad/s, {} iterations{}",
        fit.normalization,
        fit.visibility,
        fit.dip_center,
        fit.dip_center_stderr(),
        fit.iterations,
        if fit.converged {
            ""
        } else {
            " (NOT converged)"
        }
    )
}

fn print_fit_warnings(fit: &DipFit<f64>) {
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_dispersion(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let plasma = config.plasma()?;
    let state = plasma.build()?;
    let wave = config.probe()?.build()?;
    let breakdown = refractive_index(&state, &wave)?;
    for w in &breakdown.regime_warnings {
        eprintln!("warning: {w}");
    }

    // The correction-ratio table uses the canonical comparison inputs, with
    // the field and electron temperature taken from this configuration.
    let ratios: Vec<RatioEntry<f64>> = if plasma.has_electron() {
        let reference = RatioReportInputs::reference();
        let inputs = RatioReportInputs {
            b0: plasma.b0_tesla,
            electron_temp_ev: plasma.electron_t_perp_ev().unwrap_or(100.0),
            ..reference
        };
        ratio_report(&wave, &inputs)?
    } else {
        Vec::new()
    };

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => {
            let mut rows: Vec<(String, String, f64)> = Vec::new();
            for t in &breakdown.species_terms {
                rows.push((t.species.clone(), "plasma".into(), t.plasma_term));
                rows.push((t.species.clone(), "gyro1".into(), t.gyro1_term));
                rows.push((t.species.clone(), "gyro2".into(), t.gyro2_term));
                rows.push((t.species.clone(), "flow".into(), t.flow_term));
                rows.push((t.species.clone(), "thermal".into(), t.thermal_term));
                rows.push((t.species.clone(), "total".into(), t.total()));
            }
            rows.push(("total".into(), "deviation".into(), breakdown.deviation));
            rows.push(("total".into(), "index".into(), breakdown.index));
            for r in &ratios {
                rows.push((r.effect.clone(), "ratio_quoted".into(), r.quoted));
                rows.push((r.effect.clone(), "ratio_direct".into(), r.direct));
            }
            term_table_csv(&rows)
        }
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "term_breakdown": breakdown,
            "ratio_report": ratios,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_phase(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let state = config.plasma()?.build()?;
    let wave = config.probe()?.build()?;
    let chord = config.chord()?.build()?;
    let phases = path_config_phase(config.path_mode()?, &state, &wave, &chord)?;

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => quantity_csv(&[
            ("phase_a_rad", phases.phase_a),
            ("phase_b_rad", phases.phase_b),
            ("differential_phase_rad", phases.differential),
            ("delay_a_s", phases.delay_a),
            ("delay_b_s", phases.delay_b),
            ("differential_delay_s", phases.differential_delay),
        ]),
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "paths": phases,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_dip(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let section = config.interferometer()?;
    let interferometer = section.build()?;
    let grid = section.grid()?;
    let delta_tau_p = resolve_delta_tau_p(config)?;
    let curve = steady_dip_curve(&interferometer, delta_tau_p, &grid)?;

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => two_column_csv(DIP_HEADER, &curve.samples),
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "delta_tau_p_s": delta_tau_p,
            "curve": curve,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_lg_dip(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let section = config.interferometer()?;
    let interferometer = section.build()?;
    let grid = section.grid()?;
    let growth_section = config.linear_growth()?;
    let growth = growth_section.build()?;
    let t = growth_section.accumulation_time();

    let mut samples = Vec::with_capacity(grid.len());
    for &x in &grid {
        let point = interferometer.with_delta_tau(x)?;
        samples.push((x, rc_linear_growth(&point, &growth, t)));
    }

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => two_column_csv(DIP_HEADER, &samples),
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "accumulation_time_s": t,
            "model": growth,
            "samples": samples,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_mc(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let section = config.interferometer()?;
    let interferometer = section.build()?;
    let grid = section.grid()?;
    let mc = config.mc()?;
    let delta_tau_p = resolve_delta_tau_p(config)?;
    let delays = DelayPair::from_differential(delta_tau_p)?;
    let window = mc.window()?;
    let seed = cli.seed.unwrap_or(mc.seed);

    let (curve, counts) = mc_dip_scan(
        &interferometer,
        &delays,
        &grid,
        mc.pairs_per_point,
        &window,
        mc.accidental_rate(),
        seed,
    )?;

    if let Some(events_path) = &mc.events_out {
        let at = mc.events_delta_tau_fs.map(|v| v * FS).unwrap_or(delta_tau_p);
        let batch = sample_event_batch(
            mc.pairs_per_point as usize,
            &interferometer.with_delta_tau(at)?,
            &delays,
            &window,
            mc.accidental_rate(),
            seed,
        )?;
        write_text(
            Some(events_path),
            &two_column_csv(EVENT_HEADER, &batch.pair_times),
        )?;
    }

    // Fit the same samples the CSV carries (unit weights), so re-ingesting
    // the emitted curve reproduces this fit exactly.
    match resolve_format(cli, Some(config)) {
        Format::Csv => {
            write_text(
                resolve_out(cli, Some(config)).as_ref(),
                &two_column_csv(DIP_HEADER, &curve.samples),
            )?;
            let fit = fit_dip_curve(&curve.samples)?;
            print_fit_warnings(&fit);
            eprintln!("{}", fit_summary(&fit));
        }
        Format::Json => {
            let fit = fit_dip_curve(&curve.samples)?;
            let text = to_json(&json!({
                "scenario": config.scenario,
                "seed": seed,
                "curve": curve,
                "counts": counts,
                "fit": fit,
            }))?;
            write_text(resolve_out(cli, Some(config)).as_ref(), &text)?;
            print_fit_warnings(&fit);
            eprintln!("{}", fit_summary(&fit));
        }
    }
    Ok(())
}

/// Reads a dip-curve CSV emitted by `dip`, `lg-dip`, or `mc`.
fn read_dip_csv(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty file", path.display())))?;
    if header.trim_end_matches('\r') != DIP_HEADER {
        return Err(CliError::Validation(format!(
            "{}: expected header `{DIP_HEADER}`, found `{header}`",
            path.display()
        )));
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let row = i + 2; // 1-based, after the header
        let mut fields = line.split(',');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::Validation(format!(
                "{} line {row}: expected 2 comma-separated fields",
                path.display()
            )));
        };
        let parse = |s: &str, name: &str| {
            s.parse::<f64>().map_err(|e| {
                CliError::Validation(format!(
                    "{} line {row}: bad {name} value `{s}`: {e}",
                    path.display()
                ))
            })
        };
        samples.push((parse(a, "delta_tau_s")?, parse(b, "rc_normalized")?));
    }
    Ok(samples)
}

fn cmd_fit(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let input = &config.fit()?.input;
    let samples = read_dip_csv(input)?;
    let fit = fit_dip_curve(&samples)?;
    print_fit_warnings(&fit);
    eprintln!("{}", fit_summary(&fit));

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => {
            use biphoton_plasma::inference::FIT_PARAMETER_NAMES;
            let values = [
                fit.normalization,
                fit.visibility,
                fit.dip_center,
                fit.bandwidth,
            ];
            let mut s = String::from("parameter,value,stderr\n");
            for (i, name) in FIT_PARAMETER_NAMES.iter().enumerate() {
                use std::fmt::Write as _;
                let _ = writeln!(s, "{name},{},{}", values[i], fit.stderr(i));
            }
            s
        }
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "input": input,
            "fit": fit,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_scaling(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let section = config.interferometer()?;
    let interferometer = section.build()?;
    let grid = section.grid()?;
    let mc = config.mc()?;
    let scaling = config.scaling()?;
    let delta_tau_p = resolve_delta_tau_p(config)?;
    let delays = DelayPair::from_differential(delta_tau_p)?;
    let window = mc.window()?;
    let seed = cli.seed.unwrap_or(mc.seed);

    let study = precision_scaling(
        &interferometer,
        &delays,
        &grid,
        &scaling.pairs_schedule,
        scaling.trials,
        &window,
        seed,
    )?;
    eprintln!(
        "scaling: slope = {:.4} (stderr {:.4}); shot-noise statistics give -0.5",
        study.slope, study.slope_stderr
    );

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => {
            use std::fmt::Write as _;
            let mut s = String::from("pairs_per_point,trials,std_dip_center_s,mean_bias_s,excluded\n");
            for r in &study.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.pairs_per_point, r.trials, r.std_dip_center, r.mean_bias, r.excluded
                );
            }
            s
        }
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "seed": seed,
            "study": study,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_sensitivity(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    let section = config.sensitivity()?;
    let omega = if section.use_pump_frequency {
        let pump_um = config.interferometer()?.pump_wavelength_um;
        ProbeWave::<f64>::from_wavelength(pump_um * UM, Polarization::R)?.omega
    } else {
        config.probe()?.build()?.omega
    };
    let query = SensitivityQuery::new(
        omega,
        section.eta,
        section.photon_number,
        section.law.into(),
        section.k0.unwrap_or(0.5),
    )?;
    let limit = sensitivity_limit(&query);
    let implied = match section.phase_rad {
        Some(phase) => Some(implied_k0(
            phase,
            section.eta,
            section.photon_number,
            section.law.into(),
        )?),
        None => None,
    };

    let text = match resolve_format(cli, Some(config)) {
        Format::Csv => {
            let mut rows = vec![
                ("phi_min_rad", limit.phi_min),
                ("tau_min_s", limit.tau_min),
                ("length_min_m", limit.length_min),
            ];
            if let Some(k0) = implied {
                rows.push(("implied_k0", k0));
            }
            quantity_csv(&rows)
        }
        Format::Json => to_json(&json!({
            "scenario": config.scenario,
            "query": query,
            "limit": limit,
            "implied_k0": implied,
        }))?,
    };
    write_text(resolve_out(cli, Some(config)).as_ref(), &text)
}

fn cmd_paper_report(cli: &Cli, config: Option<&RunConfig>) -> Result<(), CliError> {
    let rows = reference_checks()?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();

    let text = match resolve_format(cli, config) {
        Format::Csv => {
            use std::fmt::Write as _;
            let mut s = String::from("name,computed,target,passed\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    csv_field(r.name),
                    r.computed,
                    csv_field(&r.tolerance.describe()),
                    r.passed
                );
            }
            s
        }
        Format::Json => to_json(&json!({
            "checks": rows,
            "passed": failed.is_empty(),
        }))?,
    };
    write_text(resolve_out(cli, config).as_ref(), &text)?;

    for r in &failed {
        eprintln!(
            "FAIL {}: computed {:e}, target {}",
            r.name,
            r.computed,
            r.tolerance.describe()
        );
    }
    eprintln!(
        "paper-report: {}/{} checks passed",
        rows.len() - failed.len(),
        rows.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed.len()))
    }
}
