//! Legacy ASCII VTK snapshots.
//!
//! Each `Q_k` element is written as `k × k` bilinear quads joining its
//! support points, so the points are exactly the global DoFs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gepup_core::fem::FeSpace;
use gepup_core::gepup::{nodal_average, GepupState};

const VTK_QUAD: u8 = 9;

/// Nodal point data of one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFields {
    pub time: f64,
    pub velocity: [Vec<f64>; 2],
    pub pressure: Vec<f64>,
    pub vorticity: Vec<f64>,
    pub divergence: Vec<f64>,
}

impl SnapshotFields {
    /// Velocity and pressure are the DoF values; vorticity and divergence
    /// are element gradients averaged over the elements sharing each node.
    pub fn from_state(space: &FeSpace, state: &GepupState) -> Self {
        let u = [&state.u[0][..], &state.u[1][..]];
        Self {
            time: state.t,
            velocity: [state.u[0].to_vec(), state.u[1].to_vec()],
            pressure: state.q.to_vec(),
            vorticity: nodal_average(space, u, |gx, gy| gy[0] - gx[1]),
            divergence: nodal_average(space, u, |gx, gy| gx[0] + gy[1]),
        }
    }
}

pub fn write_vtk(space: &FeSpace, fields: &SnapshotFields, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vtk_to(space, fields, &mut w)?;
    w.flush()
}

pub fn write_vtk_to<W: Write>(
    space: &FeSpace,
    fields: &SnapshotFields,
    w: &mut W,
) -> io::Result<()> {
    let n = space.n_dofs();
    for (name, len) in [
        ("velocity x", fields.velocity[0].len()),
        ("velocity y", fields.velocity[1].len()),
        ("pressure", fields.pressure.len()),
        ("vorticity", fields.vorticity.len()),
        ("divergence", fields.divergence.len()),
    ] {
        if len != n {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("{name} has {len} values, the space has {n} DoFs"),
            ));
        }
    }
    let [px, py] = space.dofs_per_axis();
    let cells = (px - 1) * (py - 1);

    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "gepup snapshot t={:e}", fields.time)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n} double")?;
    for p in space.support_points() {
        writeln!(w, "{:e} {:e} 0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {cells} {}", 5 * cells)?;
    for j in 0..py - 1 {
        for i in 0..px - 1 {
            let a = j * px + i;
            writeln!(w, "4 {} {} {} {}", a, a + 1, a + px + 1, a + px)?;
        }
    }
    writeln!(w, "CELL_TYPES {cells}")?;
    for _ in 0..cells {
        writeln!(w, "{VTK_QUAD}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    writeln!(w, "VECTORS velocity double")?;
    for i in 0..n {
        writeln!(
            w,
            "{:e} {:e} 0",
            fields.velocity[0][i], fields.velocity[1][i]
        )?;
    }
    for (name, data) in [
        ("pressure", &fields.pressure),
        ("vorticity", &fields.vorticity),
        ("divergence", &fields.divergence),
    ] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in data.iter() {
            writeln!(w, "{v:e}")?;
        }
    }
    Ok(())
}
