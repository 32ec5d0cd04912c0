//! ASCII VTK unstructured-grid output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::fem::{local_coefficients, scalar_at, vector_at};
use crate::scheme::{Discretization, State};

/// Renders the state as a `.vtu` document: `C` at the mesh vertices, the
/// cell averages of `P` and `U` as cell data.
pub fn vtu_string(disc: &Discretization, state: &State) -> String {
    let mesh = &disc.mesh;
    let dim = mesh.dim();
    let (nv, nc) = (mesh.n_vertices(), mesh.n_cells());
    let lr = &disc.load_rule;

    let mut p_avg = Vec::with_capacity(nc);
    let mut u_avg = Vec::with_capacity(nc);
    let mut local = Vec::new();
    for (c, map) in disc.maps.iter().enumerate() {
        let vol = map.volume();
        local_coefficients(&disc.pressure, c, &state.p, &mut local);
        let mut p = 0.0;
        for q in 0..lr.n_points() {
            p += lr.rule.weights[q] * map.det * scalar_at(&lr.pressure, q, map, &local).0;
        }
        p_avg.push(p / vol);
        local_coefficients(&disc.velocity, c, &state.u, &mut local);
        let mut u = [0.0; 3];
        for q in 0..lr.n_points() {
            let (v, _) = vector_at(&lr.velocity, q, map, &local);
            for k in 0..3 {
                u[k] += lr.rule.weights[q] * map.det * v[k];
            }
        }
        u_avg.push(u.map(|x| x / vol));
    }

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\"?>\n");
    s.push_str("<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\">\n");
    s.push_str("  <UnstructuredGrid>\n");
    let _ = writeln!(s, "    <Piece NumberOfPoints=\"{nv}\" NumberOfCells=\"{nc}\">");

    s.push_str("      <PointData Scalars=\"C\">\n");
    s.push_str("        <DataArray type=\"Float64\" Name=\"C\" format=\"ascii\">\n");
    // vertex dofs come first in both P1 and P2 numberings
    for v in 0..nv {
        let _ = writeln!(s, "          {:e}", state.c[v]);
    }
    s.push_str("        </DataArray>\n      </PointData>\n");

    s.push_str("      <CellData Scalars=\"P\" Vectors=\"U\">\n");
    s.push_str("        <DataArray type=\"Float64\" Name=\"P\" format=\"ascii\">\n");
    for p in &p_avg {
        let _ = writeln!(s, "          {p:e}");
    }
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"Float64\" Name=\"U\" NumberOfComponents=\"3\" format=\"ascii\">\n");
    for u in &u_avg {
        let _ = writeln!(s, "          {:e} {:e} {:e}", u[0], u[1], u[2]);
    }
    s.push_str("        </DataArray>\n      </CellData>\n");

    s.push_str("      <Points>\n");
    s.push_str("        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n");
    for x in mesh.vertices() {
        let _ = writeln!(s, "          {:e} {:e} {:e}", x[0], x[1], x[2]);
    }
    s.push_str("        </DataArray>\n      </Points>\n");

    s.push_str("      <Cells>\n");
    s.push_str("        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n");
    for c in 0..nc {
        let ids: Vec<String> = mesh.cell(c).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "          {}", ids.join(" "));
    }
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n");
    for c in 0..nc {
        let _ = writeln!(s, "          {}", (c + 1) * (dim + 1));
    }
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n");
    let cell_type = if dim == 2 { 5 } else { 10 };
    for _ in 0..nc {
        let _ = writeln!(s, "          {cell_type}");
    }
    s.push_str("        </DataArray>\n      </Cells>\n");
    s.push_str("    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n");
    s
}

pub fn export_vtu(disc: &Discretization, state: &State, path: &Path) -> Result<()> {
    std::fs::write(path, vtu_string(disc, state))?;
    Ok(())
}
