use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use mcloop::analysis::{crossing_cutoff, design_check, log_grid, sweep, CutoffTarget, GainCurve};
use mcloop::boundary::StateSpaceLTI;
use mcloop::diffusion::{ComplexFreq, DiffusionChannel, End};
use mcloop::fdm::{empirical_gain, simulate, DriveSpec, SimConfig};
use mcloop::feedback::Interconnection;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_table, fmt_f64, write_atomic};

fn interconnection(cfg: &RunConfig) -> Result<Interconnection, CliError> {
    let channel = cfg.channel()?;
    let h0 = StateSpaceLTI::transmembrane(&cfg.membrane().map_err(CliError::Config)?)?;
    let hl = StateSpaceLTI::ligand_receptor(&cfg.receptor().map_err(CliError::Config)?)?;
    Ok(Interconnection::new(channel, h0, hl)?)
}

const DEFAULT_BODE_OUTPUTS: [&str; 7] = [
    "gamma_0l",
    "s0",
    "h0_12",
    "g_21",
    "hl_11",
    "m0l_exact",
    "m0l_approx",
];

fn bode_value(ic: &Interconnection, name: &str, omega: f64) -> mcloop::Result<Complex64> {
    let s = ComplexFreq::from_omega(omega)?;
    Ok(match name {
        "gamma_0l" => ic.gammas(s)?.0,
        "gamma_l0" => ic.gammas(s)?.1,
        "s0" => ic.self_interference(s, End::Zero)?,
        "sl" => ic.self_interference(s, End::L)?,
        "h0_11" => ic.boundary_system(End::Zero).transfer(s)?[0][0],
        "h0_12" => ic.boundary_system(End::Zero).transfer(s)?[0][1],
        "h0_21" => ic.boundary_system(End::Zero).transfer(s)?[1][0],
        "hl_11" => ic.boundary_system(End::L).transfer(s)?[0][0],
        "hl_21" => ic.boundary_system(End::L).transfer(s)?[1][0],
        "g_11" => ic.channel().transfer_matrix(s)?[0][0],
        "g_12" => ic.channel().transfer_matrix(s)?[0][1],
        "g_21" => ic.channel().transfer_matrix(s)?[1][0],
        "g_22" => ic.channel().transfer_matrix(s)?[1][1],
        "m0l_exact" => ic.m0l_exact(s)?,
        "m0l_approx" => ic.m0l_approx(s)?,
        "mll_exact" => ic.mll_exact(s)?,
        other => {
            return Err(mcloop::Error::InvalidParam(format!(
                "unknown bode output {other:?}"
            )))
        }
    })
}

fn curve_csv(curve: &GainCurve) -> String {
    let rows = (0..curve.len()).map(|i| {
        vec![
            curve.omegas[i],
            curve.values[i].re,
            curve.values[i].im,
            curve.gain_db[i],
            curve.phase_rad[i],
        ]
    });
    csv_table("omega_rad_s,re,im,gain_db,phase_rad", rows)
}

pub fn cmd_bode(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let sweep_cfg = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("config needs a [sweep] section for bode".into()))?;
    if sweep_cfg.points < 2
        || sweep_cfg.omega_min <= 0.0
        || sweep_cfg.omega_min.is_nan()
        || sweep_cfg.omega_max <= sweep_cfg.omega_min
    {
        return Err(CliError::Config(format!(
            "sweep grid must have at least 2 points over 0 < omega_min < omega_max, got {} points over [{}, {}]",
            sweep_cfg.points, sweep_cfg.omega_min, sweep_cfg.omega_max
        )));
    }
    let ic = interconnection(cfg)?;
    let grid = log_grid(sweep_cfg.omega_min, sweep_cfg.omega_max, sweep_cfg.points)?;
    let names: Vec<String> = match &sweep_cfg.outputs {
        Some(list) if list.is_empty() => {
            return Err(CliError::Config("sweep outputs list is empty".into()))
        }
        Some(list) => list.clone(),
        None => DEFAULT_BODE_OUTPUTS.iter().map(|s| s.to_string()).collect(),
    };
    // fail fast on typos before any evaluation work
    for name in &names {
        bode_value(&ic, name, grid[0])?;
    }
    for name in &names {
        let tf = |omega: f64| bode_value(&ic, name, omega);
        let curve = sweep(&tf, &grid)?;
        let path = out.join(format!("{name}.csv"));
        write_atomic(&path, &curve_csv(&curve)).map_err(CliError::Io)?;
        log::info!("wrote {}", path.display());
    }
    Ok(0)
}

pub fn cmd_cutoff(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let cut = cfg
        .cutoff
        .as_ref()
        .ok_or_else(|| CliError::Config("config needs a [cutoff] section".into()))?;
    let base = cfg.channel()?;
    let channel = match &cut.boundary {
        Some(kinds) => DiffusionChannel::with_kinds(base.mu(), base.length(), kinds)?,
        None => base,
    };
    let target = match cut.target.as_str() {
        "absolute" => CutoffTarget::Minus6DbAbsolute,
        "from-steady" | "from_steady" => CutoffTarget::Minus6DbFromSteady,
        other => {
            return Err(CliError::Config(format!(
                "cutoff target must be \"absolute\" or \"from-steady\", got {other:?}"
            )))
        }
    };
    let res = crossing_cutoff(&channel, target)?;
    let json = serde_json::json!({
        "boundary": channel.kinds(),
        "target": match target {
            CutoffTarget::Minus6DbAbsolute => "absolute",
            CutoffTarget::Minus6DbFromSteady => "from-steady",
        },
        "omega_c_rad_s": res.omega_c,
        "omega_hat": res.omega_hat,
        "target_db": res.target_db,
        "achieved_db": res.achieved_db,
        "reference_db": res.reference_db,
        "iterations": res.iterations,
    });
    write_atomic(out.join("cutoff.json").as_path(), &format!("{json:#}\n"))
        .map_err(CliError::Io)?;
    println!(
        "cutoff[{}] {}: omega_c = {} rad/s, omega_hat = {:.6} ({} iterations)",
        channel.kinds(),
        cut.target,
        fmt_f64(res.omega_c),
        res.omega_hat,
        res.iterations
    );
    Ok(0)
}

pub fn cmd_design_check(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let spec = cfg.design_spec().map_err(CliError::Config)?;
    let report = design_check(&spec)?;
    for cond in &report.conditions {
        println!(
            "{} {:<20} actual {:.6e} vs threshold {:.6e}  ({})",
            if cond.pass { "PASS" } else { "FAIL" },
            cond.name,
            cond.actual,
            cond.threshold,
            cond.detail
        );
    }
    println!(
        "summary: omega_d = {:.6e}, omega_h0 = {:.6e}, omega_m = {:.6e}, alpha = {:.4} -> {}",
        report.omega_d,
        report.omega_h0,
        report.omega_m,
        report.alpha,
        if report.all_pass {
            "all conditions pass"
        } else {
            "conditions violated"
        }
    );
    let json = serde_json::json!({
        "all_pass": report.all_pass,
        "omega_d_rad_s": report.omega_d,
        "omega_h0_rad_s": report.omega_h0,
        "omega_m_rad_s": report.omega_m,
        "alpha": report.alpha,
        "conditions": report.conditions.iter().map(|c| serde_json::json!({
            "name": c.name,
            "pass": c.pass,
            "threshold": c.threshold,
            "actual": c.actual,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    write_atomic(
        out.join("design_check.json").as_path(),
        &format!("{json:#}\n"),
    )
    .map_err(CliError::Io)?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn sim_config(cfg: &RunConfig) -> Result<SimConfig, CliError> {
    let sim = cfg
        .sim
        .as_ref()
        .ok_or_else(|| CliError::Config("config needs a [sim] section".into()))?;
    let mut sc = SimConfig::standard(
        cfg.channel()?,
        cfg.membrane().map_err(CliError::Config)?,
        cfg.receptor().map_err(CliError::Config)?,
        DriveSpec {
            amplitude: sim.amplitude,
            omega: sim.omega,
        },
    );
    if let Some(n) = sim.n_cells {
        sc.n_cells = n;
    }
    if let Some(cfl) = sim.cfl {
        sc.cfl = cfl;
    }
    sc.duration = sim.duration;
    sc.record_stride = sim.record_stride;
    Ok(sc)
}

pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let sc = sim_config(cfg)?;
    let res = simulate(&sc)?;
    let drive = res.drive;
    let rows = (0..res.times.len()).map(|i| {
        let t = res.times[i];
        vec![
            t,
            drive.amplitude * (drive.omega * t).cos(),
            res.c_out[i],
            res.z_l[i],
            res.c_a[i],
            res.y_l[i],
            res.mass[i],
        ]
    });
    let csv = csv_table("t_s,c_drive,c_out,z_l,c_a,y_l,mass", rows);
    write_atomic(out.join("timeseries.csv").as_path(), &csv).map_err(CliError::Io)?;
    println!(
        "simulated {} steps (dt = {} s, dx = {} um), {} samples recorded",
        res.steps,
        fmt_f64(res.dt),
        fmt_f64(res.dx),
        res.times.len()
    );
    // For a driven run, also report the settled gain; a run too short to
    // settle is an error even though its traces were written.
    if drive.amplitude != 0.0 {
        let gain = empirical_gain(&res, drive.omega)?;
        println!("settled output gain: {gain:.4} dB");
    }
    Ok(0)
}

pub fn cmd_compare(
    cfg: &RunConfig,
    out: &Path,
    tolerance_override: Option<f64>,
) -> Result<i32, CliError> {
    let cmp = cfg
        .compare
        .as_ref()
        .ok_or_else(|| CliError::Config("config needs a [compare] section".into()))?;
    if cmp.omegas.is_empty() || cmp.distances.is_empty() {
        return Err(CliError::Config(
            "compare needs nonempty omega and distance lists".into(),
        ));
    }
    let tolerance = tolerance_override.or(cmp.tolerance_db).unwrap_or(0.5);
    let cells_per_um = cmp.cells_per_um.unwrap_or(1.0);
    if cells_per_um <= 0.0 || cells_per_um.is_nan() {
        return Err(CliError::Config("cells_per_um must be positive".into()));
    }
    let membrane = cfg.membrane().map_err(CliError::Config)?;
    let receptor = cfg.receptor().map_err(CliError::Config)?;
    let mu = cfg.channel.mu;

    let mut runs = Vec::new();
    for &l in &cmp.distances {
        for &omega in &cmp.omegas {
            runs.push((l, omega));
        }
    }

    let results: Vec<mcloop::Result<(f64, f64)>> = runs
        .par_iter()
        .map(|&(l, omega)| {
            let channel = DiffusionChannel::with_kinds(mu, l, "dn")?;
            let ic = Interconnection::new(
                channel,
                StateSpaceLTI::transmembrane(&membrane)?,
                StateSpaceLTI::ligand_receptor(&receptor)?,
            )?;
            let (gamma, _) = ic.gammas(ComplexFreq::from_omega(omega)?)?;
            let analytic_db = 20.0 * gamma.norm().log10();

            let mut sc = SimConfig::standard(
                DiffusionChannel::with_kinds(mu, l, "dn")?,
                membrane,
                receptor,
                DriveSpec {
                    amplitude: cmp.amplitude.unwrap_or(1.0),
                    omega,
                },
            );
            sc.n_cells = ((l * cells_per_um).round() as usize).max(51);
            if let Some(cfl) = cmp.cfl {
                sc.cfl = cfl;
            }
            sc.duration = cmp.duration;
            let res = simulate(&sc)?;
            let empirical_db = empirical_gain(&res, omega)?;
            log::info!(
                "L = {l} um, omega = {omega} rad/s: analytic {analytic_db:.3} dB, simulated {empirical_db:.3} dB"
            );
            Ok((analytic_db, empirical_db))
        })
        .collect();

    let mut rows = Vec::with_capacity(runs.len());
    for (run, result) in runs.iter().zip(results) {
        let (analytic_db, empirical_db) = result?;
        rows.push((
            run.0,
            run.1,
            analytic_db,
            empirical_db,
            empirical_db - analytic_db,
        ));
    }

    let max_abs_delta = rows.iter().map(|r| r.4.abs()).fold(0.0f64, f64::max);
    let pass = max_abs_delta <= tolerance;

    let csv = csv_table(
        "distance_um,omega_rad_s,analytic_gain_db,empirical_gain_db,delta_db",
        rows.iter().map(|r| vec![r.0, r.1, r.2, r.3, r.4]),
    );
    write_atomic(out.join("compare.csv").as_path(), &csv).map_err(CliError::Io)?;
    let json = serde_json::json!({
        "tolerance_db": tolerance,
        "max_abs_delta_db": max_abs_delta,
        "pass": pass,
        "runs": rows.iter().map(|r| serde_json::json!({
            "distance_um": r.0,
            "omega_rad_s": r.1,
            "analytic_gain_db": r.2,
            "empirical_gain_db": r.3,
            "delta_db": r.4,
        })).collect::<Vec<_>>(),
    });
    write_atomic(out.join("compare.json").as_path(), &format!("{json:#}\n"))
        .map_err(CliError::Io)?;

    for r in &rows {
        println!(
            "L = {:6.1} um  omega = {:9.3e} rad/s  analytic {:9.4} dB  simulated {:9.4} dB  delta {:+8.4} dB",
            r.0, r.1, r.2, r.3, r.4
        );
    }
    println!(
        "max |delta| = {max_abs_delta:.4} dB vs tolerance {tolerance} dB -> {}",
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}
