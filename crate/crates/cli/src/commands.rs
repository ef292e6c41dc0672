//! Subcommand implementations. Each writes a human-readable report to `out`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use gepup_core::bench::{
    compute_errors, run_convergence, run_simulation, ConvergenceTable, Trajectory,
};
use gepup_core::fem::NormKind;
use gepup_core::imex::{load_tableau, validate_tableau, TableauId};

use crate::config::RunConfig;
use crate::output::{sci3, write_coefficients_csv, write_convergence_files, MonitorWriter};
use crate::vtk::{write_vtk, SnapshotFields};
use crate::CliError;

/// Files written by a `run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub snapshots: Vec<PathBuf>,
    pub monitors: PathBuf,
    pub coefficients: PathBuf,
    pub steps: usize,
}

fn snapshot_path(cfg: &RunConfig, step: usize) -> PathBuf {
    cfg.output.join(format!("{}_{step:06}.vtk", cfg.case))
}

/// Integrates one case, writing monitors every step and VTK snapshots every
/// `snapshot_interval` steps (always the first and last).
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<RunArtifacts, CliError> {
    let case = cfg.case.build(cfg.re)?;
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join("config.txt"), cfg.serialize())?;
    let monitors_path = cfg.output.join("monitors.csv");
    let mut monitors = MonitorWriter::create(&monitors_path)?;
    let mut snapshots = Vec::new();
    let mut io_error: Option<CliError> = None;
    let mut last_written = None;

    writeln!(
        out,
        "{} Re={} k={} level={} ({}x{} cells) {} Cr={} t=[{}, {}]",
        cfg.case,
        cfg.re,
        cfg.degree,
        cfg.level,
        cfg.base_cells[0] << cfg.level,
        cfg.base_cells[1] << cfg.level,
        cfg.integrator,
        cfg.courant,
        cfg.t0,
        cfg.t_end
    )?;
    let result = run_simulation(&case, &cfg.simulation(), &mut |m, state, ops| {
        if io_error.is_some() {
            return;
        }
        if let Err(e) = monitors.record(m) {
            io_error = Some(e.into());
            return;
        }
        let due = m.step == 0 || (cfg.snapshot_interval > 0 && m.step % cfg.snapshot_interval == 0);
        if due {
            let path = snapshot_path(cfg, m.step);
            match write_vtk(
                ops.space(),
                &SnapshotFields::from_state(ops.space(), state),
                &path,
            ) {
                Ok(()) => {
                    snapshots.push(path);
                    last_written = Some(m.step);
                }
                Err(e) => io_error = Some(e.into()),
            }
        }
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    let coefficients = cfg.output.join("coefficients.csv");
    let tr: Trajectory = match result {
        Ok(tr) => tr,
        Err(failure) => {
            writeln!(out, "run failed: {failure}")?;
            return Err(CliError::Simulation(failure.to_string()));
        }
    };
    if last_written != Some(tr.steps) {
        let path = snapshot_path(cfg, tr.steps);
        write_vtk(
            tr.ops.space(),
            &SnapshotFields::from_state(tr.ops.space(), &tr.state),
            &path,
        )?;
        snapshots.push(path);
    }
    write_coefficients_csv(tr.ops.space(), &tr.state, fs::File::create(&coefficients)?)?;

    let last = tr.monitors.last().expect("initial sample");
    writeln!(
        out,
        "finished: {} steps, t = {}, kinetic energy {:e}, divergence L2 {:e}",
        tr.steps, tr.state.t, last.kinetic_energy, last.divergence_l2
    )?;
    if let Some(exact) = &case.exact {
        let (v, p) = compute_errors(&tr.ops, &tr.state, exact);
        writeln!(
            out,
            "velocity errors: L2 {} H1 {} Linf {}",
            sci3(v.l2),
            sci3(v.h1),
            sci3(v.linf)
        )?;
        writeln!(
            out,
            "pressure errors: L2 {} H1 {} Linf {}",
            sci3(p.l2),
            sci3(p.h1),
            sci3(p.linf)
        )?;
    }
    Ok(RunArtifacts {
        snapshots,
        monitors: monitors_path,
        coefficients,
        steps: tr.steps,
    })
}

fn rate_text(r: Option<f64>) -> String {
    r.map(|r| format!("{r:5.2}"))
        .unwrap_or_else(|| "    -".into())
}

/// Runs a convergence study and writes `convergence.csv` and
/// `convergence_h1semi.csv` into the output directory.
pub fn converge(cfg: &RunConfig, out: &mut dyn Write) -> Result<ConvergenceTable, CliError> {
    let case = cfg.case.build(cfg.re)?;
    fs::create_dir_all(&cfg.output)?;
    writeln!(
        out,
        "{} Re={} k={} {} Cr={} levels {:?}",
        cfg.case, cfg.re, cfg.degree, cfg.integrator, cfg.courant, cfg.levels
    )?;
    writeln!(
        out,
        "{:>10} {:>6} {:>9} {:>9} {:>9} {:>9}",
        "h", "steps", "u_L2", "u_H1", "q_L2", "q_H1"
    )?;
    let mut write_err = None;
    let table = run_convergence(&case, &cfg.convergence(), &mut |row| {
        let r = writeln!(
            out,
            "{:>10} {:>6} {:>9} {:>9} {:>9} {:>9}",
            format!("1/{}", (1.0 / row.h).round()),
            row.steps,
            sci3(row.velocity.l2),
            sci3(row.velocity.h1),
            sci3(row.pressure.l2),
            sci3(row.pressure.h1)
        );
        if let Err(e) = r {
            write_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    let rates = [
        table.velocity_rates(NormKind::L2),
        table.velocity_rates(NormKind::H1),
        table.pressure_rates(NormKind::L2),
        table.pressure_rates(NormKind::H1),
    ];
    writeln!(out, "rates (u_L2 u_H1 q_L2 q_H1):")?;
    for i in 1..table.len() {
        writeln!(
            out,
            "  {} {} {} {}",
            rate_text(rates[0][i]),
            rate_text(rates[1][i]),
            rate_text(rates[2][i]),
            rate_text(rates[3][i])
        )?;
    }
    write_convergence_files(&table, &cfg.output)?;
    Ok(table)
}

/// Checks every shipped tableau; returns whether all pass.
pub fn validate_tableaus(tol: f64, out: &mut dyn Write) -> Result<bool, CliError> {
    let mut all = true;
    for id in TableauId::ALL {
        let t = load_tableau(id)?;
        let report = validate_tableau(&t, tol);
        writeln!(
            out,
            "{id} {}: stages {} order {} max residual {:.2e} {}",
            t.name,
            t.stages,
            t.order,
            report.max_residual,
            if report.passed() { "PASS" } else { "FAIL" }
        )?;
        for v in &report.violations {
            writeln!(out, "  {v}")?;
        }
        all &= report.passed();
    }
    Ok(all)
}
