//! Command dispatch and artifact layout.

use std::env;
use std::f64::consts::PI;

use rayon::prelude::*;

use qhlab_core::hydro::{cross_validate, MadelungIntegrator, MadelungState};
use qhlab_core::instability::{assemble_sweep, general_perturbed_phase, sweep_point, InstabilityConfig, Profile, SweepTable};
use qhlab_core::quantization::{
    discretized_spectrum, hermite_bridge_residual, legendre_ratio, legendre_tail_diagnosis, nonquantized_m_witness, quantized_lambda, radial_solution,
    series_tail_diagnosis, terminating_energies, BranchDiagnosis, Parity, Rational, Scalar, TailDiagnosis,
};
use qhlab_core::schrodinger::{
    centroid, evolve_pair_to_interference, free_gaussian_oracle, harmonic_ground_state, split_step_evolve, Drift, EvolutionConfig, HydroSnapshot,
    Potential1D,
};
use qhlab_core::{build_grid, gaussian_pair, to_hydro, ComplexField, GaussianPairParams, Grid1D};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::manifest::{RunDir, Status};
use crate::plot::{emit_plot, Mark, PanelSpec, PlotSpec};
use crate::table::{write_hydro_field, write_table, Cell};

pub const THREADS_ENV: &str = "QHLAB_THREADS";

/// Runs `cfg`, always leaving a manifest in the output directory, and
/// returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let mut dir = match RunDir::create(cfg, grid_description(cfg)) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("qhlab: {e}");
            return e.exit_code().max(1);
        }
    };
    let outcome = dispatch(cfg, &mut dir);
    let (status, code) = match &outcome {
        Ok(()) => (Status::Ok, 0),
        Err(e) => (Status::Failed { exit_code: e.exit_code(), reason: e.to_string() }, e.exit_code()),
    };
    if let Err(e) = &outcome {
        eprintln!("qhlab: {e}");
    }
    if let Err(e) = dir.finish(status) {
        eprintln!("qhlab: cannot write manifest: {e}");
        return 1;
    }
    code
}

fn dispatch(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    match cfg.command {
        Command::Evolve => evolve(cfg, dir),
        Command::Instability => instability(cfg, dir),
        Command::Quantize => quantize(cfg, dir),
        Command::Angular => angular(cfg, dir),
        Command::Validate => validate(cfg, dir),
    }
}

fn grid_description(cfg: &RunConfig) -> String {
    let box_grid = |lo: f64, hi: f64, n: usize| format!("[{lo}, {hi}) n={n} dx={}", (hi - lo) / n as f64);
    match cfg.command {
        Command::Evolve | Command::Validate => box_grid(cfg.f64("x_min"), cfg.f64("x_max"), cfg.usize("n")),
        Command::Instability if cfg.text("profile") == "plateau" => box_grid(cfg.f64("x_min"), cfg.f64("x_max"), cfg.usize("n")),
        Command::Instability => format!("[-W, W) n={} with W the smallest power of two >= L(eps) + 12 sigma", cfg.usize("n")),
        Command::Quantize => {
            let b = cfg.f64("box");
            box_grid(-b, b, cfg.usize("n"))
        }
        Command::Angular => "none".into(),
    }
}

/// Rayon pool capped by `QHLAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::usage(format!("cannot build thread pool: {e}")))
}

fn grid_of(cfg: &RunConfig) -> Result<Grid1D> {
    Ok(build_grid(cfg.f64("x_min"), cfg.f64("x_max"), cfg.usize("n"))?)
}

fn drift_of(cfg: &RunConfig) -> Drift {
    match cfg.text("drift") {
        "verbatim" => Drift::Verbatim,
        _ => Drift::Approach,
    }
}

fn pair_params(cfg: &RunConfig) -> Result<GaussianPairParams> {
    Ok(GaussianPairParams::new(cfg.f64("L"), cfg.f64("sigma"), cfg.f64("p0"))?)
}

fn potential_of(cfg: &RunConfig, grid: &Grid1D) -> Result<Potential1D> {
    Ok(match cfg.text("potential") {
        "harmonic" => Potential1D::harmonic(grid, cfg.f64("kappa"))?,
        _ => Potential1D::free(grid),
    })
}

fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:08}.csv")
}

fn write_snapshots(dir: &mut RunDir, snaps: &[HydroSnapshot]) -> Result<()> {
    let mut index = Vec::new();
    for s in snaps {
        let name = snapshot_name(s.step);
        write_hydro_field(&dir.output(&name)?, &s.field)?;
        index.push(vec![s.step.into(), s.time.into(), name.as_str().into()]);
    }
    write_table(&dir.output("snapshots.csv")?, &["step", "time", "filename"], index)
}

/// Two-panel ρ figure: first and last snapshot.
fn write_density_figure(dir: &mut RunDir, snaps: &[HydroSnapshot]) -> Result<()> {
    let (Some(first), Some(last)) = (snaps.first(), snaps.last()) else {
        return Ok(());
    };
    let g = first.field.grid();
    let rows = (0..g.len()).map(|i| vec![g.x(i).into(), first.field.rho()[i].into(), last.field.rho()[i].into()]);
    let csv = dir.output("density_before_after.csv")?;
    write_table(&csv, &["x", "rho_before", "rho_after"], rows)?;
    let spec = PlotSpec {
        title: "Probability density".into(),
        panels: vec![
            PanelSpec::line(&format!("(a) t = {}", first.time), "x", &["rho_before"]).labels("x", "rho"),
            PanelSpec::line(&format!("(b) t = {}", last.time), "x", &["rho_after"]).labels("x", "rho"),
        ],
    };
    emit_plot(&csv, &spec, &dir.output("density_before_after.svg")?)
}

fn evolve(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let grid = grid_of(cfg)?;
    let ecfg = EvolutionConfig::new(cfg.f64("dt"), cfg.usize("steps"), cfg.usize("record_every"))?;
    let v = potential_of(cfg, &grid)?;
    let initial = cfg.text("initial");
    if initial == "pair" && cfg.text("potential") != "free" {
        return Err(CliError::usage("the Gaussian pair is evolved in free space; use potential = free"));
    }
    let psi: ComplexField = match initial {
        "pair" => gaussian_pair(&drift_of(cfg).apply(&pair_params(cfg)?), &grid)?,
        "ground" => harmonic_ground_state(cfg.f64("kappa"), cfg.f64("x0"), &grid)?,
        _ => free_gaussian_oracle(cfg.f64("sigma"), cfg.f64("p0"), cfg.f64("x0"), 0.0, &grid)?.normalized()?,
    };
    let (snaps, failure) = match cfg.text("solver") {
        "madelung" => madelung_run(&psi, &v, &ecfg)?,
        _ if initial == "pair" => (evolve_pair_to_interference(&pair_params(cfg)?, &grid, &ecfg, drift_of(cfg))?, None),
        _ => (split_step_evolve(&psi, &v, &ecfg)?.iter().map(|s| HydroSnapshot { step: s.step, time: s.time, field: to_hydro(&s.field) }).collect(), None),
    };
    write_snapshots(dir, &snaps)?;
    write_density_figure(dir, &snaps)?;
    if let Some(last) = snaps.last() {
        dir.result("final_time", last.time);
        dir.result("final_mass", last.field.mass());
        dir.result("final_centroid", centroid(&last.field));
        if initial == "pair" && failure.is_none() {
            let c = centroid(&last.field);
            let spacing = qhlab_core::schrodinger::fringe_spacing(&last.field, c, 8.0);
            dir.result("fringe_spacing", spacing.map_or("none".to_string(), |s| format!("{s:.16e}")));
            dir.result("fringe_spacing_expected", 2.0 * PI / cfg.f64("p0").abs());
        }
    }
    match failure {
        Some(e) => {
            if let qhlab_core::Error::NodeFormation { step, index, x, rho } = &e {
                dir.result("node_formation_step", step);
                dir.result("node_formation_time", *step as f64 * ecfg.dt);
                dir.result("node_formation_index", index);
                dir.result("node_formation_x", x);
                dir.result("node_formation_rho", rho);
            }
            Err(e.into())
        }
        None => Ok(()),
    }
}

/// Madelung evolution; a numeric failure returns the snapshots taken so far
/// plus the last state reached.
fn madelung_run(psi: &ComplexField, v: &Potential1D, ecfg: &EvolutionConfig) -> Result<(Vec<HydroSnapshot>, Option<qhlab_core::Error>)> {
    let state = MadelungState::from_field(psi)?;
    let mut m = MadelungIntegrator::new(&state, v)?;
    if ecfg.dt > m.max_dt() {
        return Err(qhlab_core::Error::Config(format!("dt = {} exceeds the Madelung limit dx^2/4 = {}", ecfg.dt, m.max_dt())).into());
    }
    let grid = *psi.grid();
    let snap = |m: &MadelungIntegrator, step: usize| -> Result<HydroSnapshot> {
        let field = qhlab_core::HydroField::new(grid, m.density(), m.current())?;
        Ok(HydroSnapshot { step, time: step as f64 * ecfg.dt, field })
    };
    let mut out = vec![snap(&m, 0)?];
    for step in 1..=ecfg.steps {
        if let Err(e) = m.step(ecfg.dt) {
            if e.is_numeric() {
                if out.last().map(|s| s.step) != Some(step - 1) {
                    out.push(snap(&m, step - 1)?);
                }
                return Ok((out, Some(e)));
            }
            return Err(e.into());
        }
        if ecfg.records(step) {
            out.push(snap(&m, step)?);
        }
    }
    Ok((out, None))
}

fn instability_config(cfg: &RunConfig) -> Result<InstabilityConfig> {
    let profile = match cfg.text("profile") {
        "plateau" => Profile::Plateau { grid: grid_of(cfg)?, shoulder: cfg.f64("shoulder") },
        _ => Profile::GaussianPair { sigma: cfg.f64("sigma"), p0: cfg.f64("p0"), n: cfg.usize("n") },
    };
    let n = u32::try_from(cfg.int("N")).map_err(|_| CliError::usage("N out of range"))?;
    let icfg = InstabilityConfig { ell: cfg.f64("ell"), epsilons: cfg.list("eps").to_vec(), n_exponent: n, profile };
    icfg.validate()?;
    Ok(icfg)
}

/// Sweep points run in parallel; the table is ordered by ε.
pub fn parallel_sweep(icfg: &InstabilityConfig) -> Result<(SweepTable, Vec<f64>)> {
    let pool = thread_pool()?;
    let points = pool.install(|| {
        icfg.epsilons
            .par_iter()
            .map(|&eps| {
                let row = sweep_point(icfg, eps)?;
                let h = icfg.build_profile(eps)?;
                let approx = general_perturbed_phase(&h, icfg.ell, eps, icfg.n_exponent)?;
                Ok((row, approx))
            })
            .collect::<qhlab_core::Result<Vec<_>>>()
    })?;
    let mut approx: Vec<(f64, f64)> = points.iter().map(|(r, a)| (r.epsilon, *a)).collect();
    approx.sort_by(|a, b| a.0.total_cmp(&b.0));
    let table = assemble_sweep(points.into_iter().map(|(r, _)| r).collect());
    Ok((table, approx.into_iter().map(|p| p.1).collect()))
}

fn instability(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let icfg = instability_config(cfg)?;
    let (table, approx) = parallel_sweep(&icfg)?;
    let sweep_csv = dir.output("sweep.csv")?;
    write_table(
        &sweep_csv,
        &["epsilon", "s_base", "s_perturbed", "delta_s_exact", "delta_s_predicted", "rel_err"],
        table.rows.iter().map(|r| {
            vec![r.epsilon.into(), r.s_base.into(), r.s_perturbed.into(), r.delta_s_exact.into(), r.delta_s_predicted.into(), r.rel_err.into()]
        }),
    )?;
    write_table(
        &dir.output("perturbed_phase.csv")?,
        &["epsilon", "s_perturbed_exact", "s_perturbed_approx"],
        table.rows.iter().zip(&approx).map(|(r, a)| vec![r.epsilon.into(), r.s_perturbed.into(), (*a).into()]),
    )?;
    let mut summary = match &table.fit {
        Some(f) => format!("slope = {:.16e}\nintercept = {:.16e}\nr_squared = {:.16e}\nn_points = {}\n", f.slope, f.intercept, f.r_squared, f.n_points),
        None => format!("n_points = {}\n", table.rows.len()),
    };
    if let Some(w) = table.warning {
        summary.push_str(&format!("warning = {w}\n"));
        dir.result("warning", w);
    }
    std::fs::write(dir.output("fit.txt")?, summary)?;
    let spec = PlotSpec {
        title: format!("Phase response, N = {}, ell = {}", icfg.n_exponent, icfg.ell),
        panels: vec![PanelSpec::line("Delta S vs eps", "epsilon", &["delta_s_exact", "delta_s_predicted"])
            .log_log()
            .labels("eps", "Delta S")
            .mark(if table.rows.len() < 2 { Mark::Points } else { Mark::Line })],
    };
    emit_plot(&sweep_csv, &spec, &dir.output("sweep.svg")?)
}

/// The terminating branch if there is one, else the parity of the nearest
/// quantized level.
fn reported_branch(diag: &TailDiagnosis, nearest_parity: Parity) -> &BranchDiagnosis {
    diag.terminating_branch().unwrap_or(diag.branch(nearest_parity))
}

fn diagnosis_row(parameter: f64, b: &BranchDiagnosis) -> Vec<Cell> {
    vec![parameter.into(), b.terminates_at.is_some().into(), b.terminates_at.into(), b.log10_partial_sum.into()]
}

const DIAGNOSIS_HEADER: [&str; 4] = ["parameter", "terminates", "termination_index", "log_partial_sum"];

fn quantize(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let jmax = cfg.usize("jmax");
    let b = cfg.f64("box");
    let grid = build_grid(-b, b, cfg.usize("n"))?;
    let oracle = discretized_spectrum(&Potential1D::harmonic(&grid, 1.0)?, &grid, jmax + 1)?;
    let series = terminating_energies(jmax);
    write_table(
        &dir.output("spectrum.csv")?,
        &["j", "E_series", "E_oracle", "abs_diff"],
        series.iter().zip(&oracle).enumerate().map(|(j, (e, o))| vec![j.into(), (*e as f64).into(), (*o).into(), (*o - *e as f64).abs().into()]),
    )?;
    let x_probe = cfg.f64("x_probe");
    let j_cut = cfg.usize("j_cut");
    let rows = cfg
        .list("energies")
        .iter()
        .map(|&e| {
            let d = series_tail_diagnosis(e, x_probe, j_cut)?;
            let nearest = ((e - 1.0) / 2.0).round().max(0.0) as usize;
            Ok(diagnosis_row(e, reported_branch(&d, Parity::of(nearest))))
        })
        .collect::<Result<Vec<_>>>()?;
    write_table(&dir.output("diagnosis.csv")?, &DIAGNOSIS_HEADER, rows)?;
    dir.result("max_abs_diff", oracle.iter().zip(&series).map(|(o, e)| (o - *e as f64).abs()).fold(0.0, f64::max));
    Ok(())
}

fn angular(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let jmax = cfg.usize("jmax");
    let offset = cfg.f64("offset");
    let j_cut = cfg.usize("j_cut");
    let exact = (0..=jmax).all(|j| {
        let lambda = Rational::from_int(quantized_lambda(j as u64) as i64);
        legendre_ratio(j, lambda) == Rational::from_int(0)
    });
    dir.result("exact_termination", exact);
    let mut rows = Vec::new();
    for j in 0..=jmax {
        for lambda in [quantized_lambda(j as u64) as f64, quantized_lambda(j as u64) as f64 + offset] {
            let d = legendre_tail_diagnosis(lambda, j_cut)?;
            rows.push(diagnosis_row(lambda, reported_branch(&d, Parity::of(j))));
        }
    }
    write_table(&dir.output("legendre.csv")?, &DIAGNOSIS_HEADER, rows)?;
    let radii = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut radial = Vec::new();
    for j in 0..=jmax {
        let lambda = quantized_lambda(j as u64) as f64;
        for s in radial_solution(lambda, cfg.f64("c1"), &radii)? {
            radial.push(vec![lambda.into(), s.r.into(), s.value.into(), s.residual_eq1.into(), s.residual_eq2.into()]);
        }
    }
    write_table(&dir.output("radial.csv")?, &["lambda", "r", "R", "residual_eq1", "residual_eq2"], radial)?;
    let phis: Vec<f64> = (0..16).map(|k| k as f64 * PI / 8.0).collect();
    let w = nonquantized_m_witness(cfg.f64("m"), |r| r, &radii, &phis);
    dir.result("witness.rho_single_valued", w.rho_single_valued);
    dir.result("witness.current_single_valued", w.current_single_valued);
    dir.result("witness.wavefunction_single_valued", w.wavefunction_single_valued);
    Ok(())
}

fn validate(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let grid = grid_of(cfg)?;
    let kappa = cfg.f64("kappa");
    let (psi, v) = match cfg.text("scenario") {
        "stationary" => (harmonic_ground_state(kappa, 0.0, &grid)?, Potential1D::harmonic(&grid, kappa)?),
        "pair" => (gaussian_pair(&Drift::Approach.apply(&pair_params(cfg)?), &grid)?, Potential1D::free(&grid)),
        _ => (harmonic_ground_state(kappa, cfg.f64("x0"), &grid)?, Potential1D::harmonic(&grid, kappa)?),
    };
    let report = cross_validate(&psi, &v, cfg.f64("t_final"), cfg.f64("dt"))?;
    let csv = dir.output("discrepancy.csv")?;
    write_table(
        &csv,
        &["time", "sup_rho_diff", "sup_J_diff"],
        (0..report.times.len()).map(|i| vec![report.times[i].into(), report.sup_rho_diff[i].into(), report.sup_current_diff[i].into()]),
    )?;
    dir.result("max_sup_rho_diff", report.max_rho_diff());
    dir.result("max_sup_J_diff", report.max_current_diff());
    if report.times.len() > 1 {
        let spec = PlotSpec {
            title: "Madelung vs split-step".into(),
            panels: vec![PanelSpec::line("sup-norm discrepancy", "time", &["sup_rho_diff", "sup_J_diff"]).labels("t", "sup |diff|")],
        };
        emit_plot(&csv, &spec, &dir.output("discrepancy.svg")?)?;
    }
    let bridge_grid = build_grid(-12.0, 12.0, 1024)?;
    for j in 0..3 {
        dir.result(&format!("bridge_residual.{j}"), hermite_bridge_residual(j, &bridge_grid, 3.0)?);
    }
    match report.failure {
        Some(e) => {
            if let qhlab_core::Error::NodeFormation { step, x, .. } = &e {
                dir.result("node_formation_step", step);
                dir.result("node_formation_time", *step as f64 * cfg.f64("dt"));
                dir.result("node_formation_x", x);
            }
            Err(e.into())
        }
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn bad_thread_env_is_usage() {
        // Only this test touches the variable.
        env::set_var(THREADS_ENV, "zero");
        let e = thread_pool().unwrap_err();
        env::remove_var(THREADS_ENV);
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn grid_descriptions() {
        let cfg = parse_config("quantize", &["--out".into(), "o".into()]).unwrap();
        assert!(grid_description(&cfg).starts_with("[-12, 12) n=4096"));
        let cfg = parse_config("angular", &["--out".into(), "o".into()]).unwrap();
        assert_eq!(grid_description(&cfg), "none");
    }
}
