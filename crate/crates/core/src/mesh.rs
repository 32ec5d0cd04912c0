//! Structured simplicial meshes of the unit square and unit cube.
//!
//! Cells store their vertices in positively oriented order. Local facet `i`
//! of a cell is the facet opposite local vertex `i`. Every facet carries a
//! global orientation fixed by its ascending vertex indices, and each
//! (cell, local facet) incidence records whether that global normal points
//! out of the cell (`+1`) or into it (`-1`).

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, sub, Point};

/// A conforming simplicial mesh in two or three dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    /// Flat cell-to-vertex table, `dim + 1` entries per cell.
    cells: Vec<usize>,
    /// Flat facet-to-vertex table, `dim` ascending entries per facet.
    facets: Vec<usize>,
    /// Flat cell-to-facet table, local facet `i` is opposite local vertex `i`.
    cell_facets: Vec<usize>,
    /// Orientation of the global facet normal relative to the cell.
    cell_facet_signs: Vec<f64>,
    /// Incident cells per facet; the second entry is `None` on the boundary.
    facet_cells: Vec<(usize, Option<usize>)>,
    /// Number of grid intervals per direction for the structured family.
    divisions: usize,
}

impl Mesh {
    /// Builds the structured mesh of `[0,1]^dim` with `m` intervals per side.
    ///
    /// In 2D every grid square is split along its lower-left to upper-right
    /// diagonal. In 3D every grid cube is split into the six Kuhn tetrahedra
    /// sharing the main diagonal. Vertices are numbered lexicographically with
    /// `x` running fastest.
    pub fn structured(dim: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "number of divisions must be positive".into(),
            ));
        }
        let (vertices, cells) = match dim {
            2 => square_grid(m),
            3 => cube_grid(m),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "mesh dimension must be 2 or 3, got {dim}"
                )))
            }
        };
        let mut mesh = Mesh {
            dim,
            vertices,
            cells,
            facets: Vec::new(),
            cell_facets: Vec::new(),
            cell_facet_signs: Vec::new(),
            facet_cells: Vec::new(),
            divisions: m,
        };
        mesh.enumerate_facets();
        Ok(mesh)
    }

    /// Rebuilds the facet tables and orientation signs from the cell table.
    ///
    /// Facets are numbered in ascending lexicographic order of their sorted
    /// vertex tuples, so the numbering depends only on the cell table.
    fn enumerate_facets(&mut self) {
        let d = self.dim;
        let nv = d + 1;
        let n_cells = self.n_cells();
        // (sorted facet vertices, cell, local facet)
        let mut incidences: Vec<([usize; 3], usize, usize)> = Vec::with_capacity(n_cells * nv);
        for c in 0..n_cells {
            let cell = self.cell(c);
            for local in 0..nv {
                let mut key = [usize::MAX; 3];
                let mut k = 0;
                for (j, &v) in cell.iter().enumerate() {
                    if j != local {
                        key[k] = v;
                        k += 1;
                    }
                }
                key[..d].sort_unstable();
                incidences.push((key, c, local));
            }
        }
        incidences.sort_unstable();

        self.facets.clear();
        self.facet_cells.clear();
        self.cell_facets = vec![usize::MAX; n_cells * nv];
        self.cell_facet_signs = vec![0.0; n_cells * nv];

        let mut i = 0;
        while i < incidences.len() {
            let key = incidences[i].0;
            let mut j = i + 1;
            while j < incidences.len() && incidences[j].0 == key {
                j += 1;
            }
            debug_assert!(j - i <= 2, "facet shared by more than two cells");
            let facet = self.facet_cells.len();
            self.facets.extend_from_slice(&key[..d]);
            let first = incidences[i].1;
            let second = if j - i == 2 { Some(incidences[i + 1].1) } else { None };
            self.facet_cells.push((first, second));
            for &(_, c, local) in &incidences[i..j] {
                self.cell_facets[c * nv + local] = facet;
                self.cell_facet_signs[c * nv + local] = self.orientation(c, local, &key[..d]);
            }
            i = j;
        }
    }

    /// `+1` if the global normal of the facet points out of the cell.
    fn orientation(&self, cell: usize, local: usize, facet: &[usize]) -> f64 {
        let normal = self.facet_normal_of(facet);
        let opposite = self.vertices[self.cell(cell)[local]];
        let a = self.vertices[facet[0]];
        if dot(&normal, &sub(&a, &opposite)) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Unnormalized global normal: in 2D the edge tangent (low to high
    /// vertex) rotated clockwise; in 3D the right-hand-rule normal of the
    /// ascending vertex order. Its length is the facet measure in 2D and
    /// twice the facet measure in 3D.
    fn facet_normal_of(&self, facet: &[usize]) -> Point {
        let a = self.vertices[facet[0]];
        let b = self.vertices[facet[1]];
        let t = sub(&b, &a);
        if self.dim == 2 {
            [t[1], -t[0], 0.0]
        } else {
            let c = self.vertices[facet[2]];
            cross(&t, &sub(&c, &a))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Point {
        &self.vertices[v]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn n_facets(&self) -> usize {
        self.facet_cells.len()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cells[c * nv..(c + 1) * nv]
    }

    /// Sorted vertex indices of a facet.
    pub fn facet(&self, f: usize) -> &[usize] {
        &self.facets[f * self.dim..(f + 1) * self.dim]
    }

    pub fn cell_facets(&self, c: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cell_facets[c * nv..(c + 1) * nv]
    }

    pub fn cell_facet_signs(&self, c: usize) -> &[f64] {
        let nv = self.dim + 1;
        &self.cell_facet_signs[c * nv..(c + 1) * nv]
    }

    pub fn facet_cells(&self, f: usize) -> (usize, Option<usize>) {
        self.facet_cells[f]
    }

    pub fn is_boundary_facet(&self, f: usize) -> bool {
        self.facet_cells[f].1.is_none()
    }

    pub fn n_boundary_facets(&self) -> usize {
        self.facet_cells.iter().filter(|(_, b)| b.is_none()).count()
    }

    /// Global unit normal of a facet.
    pub fn facet_unit_normal(&self, f: usize) -> Point {
        let n = self.facet_normal_of(self.facet(f));
        let len = dot(&n, &n).sqrt();
        [n[0] / len, n[1] / len, n[2] / len]
    }

    /// Measure (length or area) of a facet.
    pub fn facet_measure(&self, f: usize) -> f64 {
        let n = self.facet_normal_of(self.facet(f));
        let len = dot(&n, &n).sqrt();
        if self.dim == 2 {
            len
        } else {
            0.5 * len
        }
    }

    /// Signed volume of a cell under its stored vertex order.
    pub fn signed_volume(&self, c: usize) -> f64 {
        let cell = self.cell(c);
        let x0 = self.vertices[cell[0]];
        let e1 = sub(&self.vertices[cell[1]], &x0);
        let e2 = sub(&self.vertices[cell[2]], &x0);
        if self.dim == 2 {
            0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        } else {
            let e3 = sub(&self.vertices[cell[3]], &x0);
            dot(&cross(&e1, &e2), &e3) / 6.0
        }
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        let cell = self.cell(c);
        let mut diam: f64 = 0.0;
        for i in 0..cell.len() {
            for j in i + 1..cell.len() {
                let e = sub(&self.vertices[cell[i]], &self.vertices[cell[j]]);
                diam = diam.max(dot(&e, &e).sqrt());
            }
        }
        diam
    }

    /// Largest cell diameter. For the structured family this is `sqrt(dim) / m`.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_cells())
            .map(|c| self.cell_diameter(c))
            .fold(0.0, f64::max)
    }

    pub fn cell_centroid(&self, c: usize) -> Point {
        let cell = self.cell(c);
        let mut x = [0.0; 3];
        for &v in cell {
            for k in 0..3 {
                x[k] += self.vertices[v][k];
            }
        }
        let n = cell.len() as f64;
        [x[0] / n, x[1] / n, x[2] / n]
    }
}

fn square_grid(m: usize) -> (Vec<Point>, Vec<usize>) {
    let n = m + 1;
    let h = 1.0 / m as f64;
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertices.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let idx = |i: usize, j: usize| j * n + i;
    let mut cells = Vec::with_capacity(6 * m * m);
    for j in 0..m {
        for i in 0..m {
            let v00 = idx(i, j);
            let v10 = idx(i + 1, j);
            let v01 = idx(i, j + 1);
            let v11 = idx(i + 1, j + 1);
            cells.extend_from_slice(&[v00, v10, v11]);
            cells.extend_from_slice(&[v00, v11, v01]);
        }
    }
    (vertices, cells)
}

const KUHN_PATHS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn cube_grid(m: usize) -> (Vec<Point>, Vec<usize>) {
    let n = m + 1;
    let h = 1.0 / m as f64;
    let mut vertices = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                vertices.push([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    let idx = |c: [usize; 3]| (c[2] * n + c[1]) * n + c[0];
    let mut cells = Vec::with_capacity(24 * m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                for path in KUHN_PATHS {
                    let mut corner = [i, j, k];
                    let mut tet = [idx(corner), 0, 0, 0];
                    for (step, &axis) in path.iter().enumerate() {
                        corner[axis] += 1;
                        tet[step + 1] = idx(corner);
                    }
                    // Odd permutations yield negatively oriented tets.
                    if tet_volume(&vertices, &tet) < 0.0 {
                        tet.swap(2, 3);
                    }
                    cells.extend_from_slice(&tet);
                }
            }
        }
    }
    (vertices, cells)
}

fn tet_volume(vertices: &[Point], tet: &[usize; 4]) -> f64 {
    let x0 = vertices[tet[0]];
    let e1 = sub(&vertices[tet[1]], &x0);
    let e2 = sub(&vertices[tet[2]], &x0);
    let e3 = sub(&vertices[tet[3]], &x0);
    dot(&cross(&e1, &e2), &e3) / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_square_split_once() {
        let mesh = Mesh::structured(2, 1).unwrap();
        assert_eq!(mesh.n_vertices(), 4);
        assert_eq!(mesh.n_cells(), 2);
        assert_eq!(mesh.n_facets(), 5);
        assert_eq!(mesh.n_boundary_facets(), 4);
    }

    #[test]
    fn counts_follow_closed_forms() {
        let mesh = Mesh::structured(2, 8).unwrap();
        assert_eq!(mesh.n_cells(), 128);
        assert_eq!(mesh.n_vertices(), 81);
        let mesh = Mesh::structured(3, 2).unwrap();
        assert_eq!(mesh.n_cells(), 48);
        assert_eq!(mesh.n_vertices(), 27);
    }

    #[test]
    fn euler_characteristic_2d() {
        let mesh = Mesh::structured(2, 2).unwrap();
        assert_eq!(mesh.n_facets(), 16);
        let (v, e, f) = (mesh.n_vertices() as i64, mesh.n_facets() as i64, mesh.n_cells() as i64);
        assert_eq!(v - e + f, 1);
    }

    #[test]
    fn euler_characteristic_3d() {
        for m in 1..=3 {
            let mesh = Mesh::structured(3, m).unwrap();
            // V - E + F - T = 1 for a contractible 3-complex.
            let mut edge_set = std::collections::BTreeSet::new();
            for c in 0..mesh.n_cells() {
                let cell = mesh.cell(c);
                for a in 0..4 {
                    for b in a + 1..4 {
                        edge_set.insert((cell[a].min(cell[b]), cell[a].max(cell[b])));
                    }
                }
            }
            let chi = mesh.n_vertices() as i64 - edge_set.len() as i64 + mesh.n_facets() as i64
                - mesh.n_cells() as i64;
            assert_eq!(chi, 1);
        }
    }

    #[test]
    fn rejects_zero_divisions() {
        assert!(Mesh::structured(2, 0).is_err());
        assert!(Mesh::structured(4, 2).is_err());
    }

    #[test]
    fn positive_volumes_summing_to_one() {
        for dim in [2, 3] {
            for m in [1, 2, 4] {
                let mesh = Mesh::structured(dim, m).unwrap();
                let mut total = 0.0;
                for c in 0..mesh.n_cells() {
                    let vol = mesh.signed_volume(c);
                    assert!(vol > 0.0);
                    total += vol;
                }
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn interior_facets_have_opposite_signs() {
        for dim in [2, 3] {
            let mesh = Mesh::structured(dim, 3).unwrap();
            for f in 0..mesh.n_facets() {
                let (c0, c1) = mesh.facet_cells(f);
                let sign_of = |c: usize| {
                    let local = mesh.cell_facets(c).iter().position(|&g| g == f).unwrap();
                    mesh.cell_facet_signs(c)[local]
                };
                match c1 {
                    Some(c1) => assert_eq!(sign_of(c0) + sign_of(c1), 0.0),
                    None => {
                        // Boundary facets lie on a face of the unit box.
                        let n = mesh.facet_unit_normal(f);
                        let outward: f64 = n.iter().map(|x| x.abs()).sum();
                        assert_abs_diff_eq!(outward, 1.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn mesh_size_matches_structured_family() {
        let mesh = Mesh::structured(2, 8).unwrap();
        assert_abs_diff_eq!(mesh.mesh_size(), 2f64.sqrt() / 8.0, epsilon = 1e-14);
        let mesh = Mesh::structured(3, 8).unwrap();
        assert_abs_diff_eq!(mesh.mesh_size(), 3f64.sqrt() / 8.0, epsilon = 1e-14);
        let mesh = Mesh::structured(2, 1).unwrap();
        assert_abs_diff_eq!(mesh.mesh_size(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn diagonal_runs_lower_left_to_upper_right() {
        let mesh = Mesh::structured(2, 1).unwrap();
        let interior: Vec<_> = (0..mesh.n_facets())
            .filter(|&f| !mesh.is_boundary_facet(f))
            .collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(mesh.facet(interior[0]), &[0, 3]);
    }

    #[test]
    fn facet_numbering_is_deterministic() {
        for dim in [2, 3] {
            let a = Mesh::structured(dim, 3).unwrap();
            let b = Mesh::structured(dim, 3).unwrap();
            assert_eq!(a, b);
        }
    }
}
