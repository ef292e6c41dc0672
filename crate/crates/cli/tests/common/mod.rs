//! Minimal legacy ASCII VTK reader for unstructured grids, used to check
//! the writer's output structurally.
#![allow(dead_code)]

use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct VtkGrid {
    pub title: String,
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<Vec<usize>>,
    pub cell_types: Vec<u8>,
    pub vectors: BTreeMap<String, Vec<[f64; 3]>>,
    pub scalars: BTreeMap<String, Vec<f64>>,
}

fn num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, String> {
    tok.ok_or_else(|| format!("missing {what}"))?
        .parse()
        .map_err(|_| format!("bad {what}"))
}

pub fn parse_vtk(text: &str) -> Result<VtkGrid, String> {
    let mut lines = text.lines();
    let magic = lines.next().ok_or("empty file")?;
    if !magic.starts_with("# vtk DataFile Version") {
        return Err(format!("bad magic line {magic:?}"));
    }
    let mut g = VtkGrid {
        title: lines.next().ok_or("missing title")?.to_string(),
        ..VtkGrid::default()
    };
    if lines.next() != Some("ASCII") {
        return Err("only ASCII files are supported".into());
    }
    if lines.next().map(str::trim) != Some("DATASET UNSTRUCTURED_GRID") {
        return Err("expected DATASET UNSTRUCTURED_GRID".into());
    }
    let mut toks = lines.flat_map(str::split_whitespace);
    let mut n_point_data = None;
    while let Some(key) = toks.next() {
        match key {
            "POINTS" => {
                let n: usize = num(toks.next(), "point count")?;
                toks.next();
                for _ in 0..n {
                    g.points.push([
                        num(toks.next(), "x")?,
                        num(toks.next(), "y")?,
                        num(toks.next(), "z")?,
                    ]);
                }
            }
            "CELLS" => {
                let n: usize = num(toks.next(), "cell count")?;
                let size: usize = num(toks.next(), "cell list size")?;
                let mut used = 0;
                for _ in 0..n {
                    let k: usize = num(toks.next(), "cell size")?;
                    let ids = (0..k)
                        .map(|_| num(toks.next(), "point id"))
                        .collect::<Result<Vec<usize>, _>>()?;
                    if let Some(bad) = ids.iter().find(|&&i| i >= g.points.len()) {
                        return Err(format!("cell references point {bad}"));
                    }
                    used += k + 1;
                    g.cells.push(ids);
                }
                if used != size {
                    return Err(format!("CELLS size {size} but {used} values"));
                }
            }
            "CELL_TYPES" => {
                let n: usize = num(toks.next(), "cell type count")?;
                if n != g.cells.len() {
                    return Err("CELL_TYPES count differs from CELLS".into());
                }
                for _ in 0..n {
                    g.cell_types.push(num(toks.next(), "cell type")?);
                }
            }
            "POINT_DATA" => {
                let n: usize = num(toks.next(), "point data count")?;
                if n != g.points.len() {
                    return Err("POINT_DATA count differs from POINTS".into());
                }
                n_point_data = Some(n);
            }
            "VECTORS" => {
                let n = n_point_data.ok_or("VECTORS before POINT_DATA")?;
                let name = toks.next().ok_or("missing vector name")?.to_string();
                toks.next();
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push([
                        num(toks.next(), "vector x")?,
                        num(toks.next(), "vector y")?,
                        num(toks.next(), "vector z")?,
                    ]);
                }
                g.vectors.insert(name, v);
            }
            "SCALARS" => {
                let n = n_point_data.ok_or("SCALARS before POINT_DATA")?;
                let name = toks.next().ok_or("missing scalar name")?.to_string();
                toks.next();
                let comps: usize = num(toks.next(), "component count")?;
                if comps != 1 {
                    return Err("only single-component scalars are supported".into());
                }
                if toks.next() != Some("LOOKUP_TABLE") {
                    return Err("expected LOOKUP_TABLE".into());
                }
                toks.next();
                let v = (0..n)
                    .map(|_| num(toks.next(), "scalar"))
                    .collect::<Result<Vec<f64>, _>>()?;
                g.scalars.insert(name, v);
            }
            other => return Err(format!("unexpected token {other:?}")),
        }
    }
    Ok(g)
}

/// Signed area of a planar polygon given by point ids.
pub fn polygon_area(g: &VtkGrid, ids: &[usize]) -> f64 {
    let mut a = 0.0;
    for i in 0..ids.len() {
        let p = g.points[ids[i]];
        let q = g.points[ids[(i + 1) % ids.len()]];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}
