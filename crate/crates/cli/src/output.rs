//! CSV writers (RFC 4180, CRLF line endings).

use std::fs::File;
use std::io::Write;
use std::path::Path;

use gepup_core::bench::{ConvergenceTable, MonitorSample};
use gepup_core::fem::{FeSpace, NormKind};
use gepup_core::gepup::GepupState;

pub const CONVERGENCE_HEADER: [&str; 13] = [
    "h",
    "u_L2",
    "u_L2_rate",
    "u_H1",
    "u_H1_rate",
    "u_Linf",
    "u_Linf_rate",
    "q_L2",
    "q_L2_rate",
    "q_H1",
    "q_H1_rate",
    "q_Linf",
    "q_Linf_rate",
];

pub const SEMINORM_HEADER: [&str; 5] = [
    "h",
    "u_H1semi",
    "u_H1semi_rate",
    "q_H1semi",
    "q_H1semi_rate",
];

pub const MONITOR_HEADER: [&str; 9] = [
    "step",
    "t",
    "dt",
    "divergence_l2",
    "kinetic_energy",
    "cg_helmholtz",
    "cg_potential",
    "cg_mass",
    "cg_pressure",
];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w)
}

/// Scientific notation with three significant digits and a signed
/// two-digit exponent, e.g. `9.28e-06`.
pub fn sci3(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn rate_cell(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.2}")).unwrap_or_default()
}

fn write_columns<W: Write>(
    w: &mut csv::Writer<W>,
    table: &ConvergenceTable,
    columns: &[(NormKind, bool)],
) -> csv::Result<()> {
    let rates: Vec<Vec<Option<f64>>> = columns
        .iter()
        .map(|&(kind, vel)| {
            if vel {
                table.velocity_rates(kind)
            } else {
                table.pressure_rates(kind)
            }
        })
        .collect();
    for (i, row) in table.rows().iter().enumerate() {
        let mut rec = vec![format!("{}", row.h)];
        for (c, &(kind, vel)) in columns.iter().enumerate() {
            let e = if vel {
                row.velocity.get(kind)
            } else {
                row.pressure.get(kind)
            };
            rec.push(sci3(e));
            rec.push(rate_cell(rates[c][i]));
        }
        w.write_record(&rec)?;
    }
    Ok(())
}

/// Errors and rates in the layout `h, u_L2, u_L2_rate, …, q_Linf_rate`.
/// Rates are blank on the first row.
pub fn write_convergence_csv<W: Write>(table: &ConvergenceTable, out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    use NormKind::*;
    write_columns(
        &mut w,
        table,
        &[
            (L2, true),
            (H1, true),
            (Linf, true),
            (L2, false),
            (H1, false),
            (Linf, false),
        ],
    )?;
    w.flush()?;
    Ok(())
}

/// The H¹ seminorm errors, which the main table does not carry.
pub fn write_seminorm_csv<W: Write>(table: &ConvergenceTable, out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(SEMINORM_HEADER)?;
    write_columns(
        &mut w,
        table,
        &[(NormKind::H1Semi, true), (NormKind::H1Semi, false)],
    )?;
    w.flush()?;
    Ok(())
}

pub fn write_convergence_files(table: &ConvergenceTable, dir: &Path) -> csv::Result<()> {
    write_convergence_csv(table, File::create(dir.join("convergence.csv"))?)?;
    write_seminorm_csv(table, File::create(dir.join("convergence_h1semi.csv"))?)?;
    Ok(())
}

/// Streams monitor samples, flushing after each row.
pub struct MonitorWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl MonitorWriter<File> {
    pub fn create(path: &Path) -> csv::Result<Self> {
        Self::new(File::create(path)?)
    }
}

impl<W: Write> MonitorWriter<W> {
    pub fn new(out: W) -> csv::Result<Self> {
        let mut inner = writer(out);
        inner.write_record(MONITOR_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn record(&mut self, m: &MonitorSample) -> csv::Result<()> {
        let it = &m.iterations;
        self.inner.write_record(&[
            m.step.to_string(),
            format!("{:e}", m.t),
            format!("{:e}", m.dt),
            format!("{:e}", m.divergence_l2),
            format!("{:e}", m.kinetic_energy),
            it.helmholtz.to_string(),
            it.potential.to_string(),
            it.mass.to_string(),
            it.pressure.to_string(),
        ])?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
            .into_inner()
            .map_err(|e| e.into_error())
            .expect("flushed writer")
    }
}

/// Raw DoF coefficients of every field with their support points.
pub fn write_coefficients_csv<W: Write>(
    space: &FeSpace,
    state: &GepupState,
    out: W,
) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(["dof", "x", "y", "w_x", "w_y", "u_x", "u_y", "phi", "q"])?;
    for (i, p) in space.support_points().iter().enumerate() {
        w.write_record(&[
            i.to_string(),
            format!("{:e}", p[0]),
            format!("{:e}", p[1]),
            format!("{:e}", state.w[0][i]),
            format!("{:e}", state.w[1][i]),
            format!("{:e}", state.u[0][i]),
            format!("{:e}", state.u[1][i]),
            format!("{:e}", state.phi[i]),
            format!("{:e}", state.q[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
