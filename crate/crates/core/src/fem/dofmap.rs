//! Finite element spaces and their global degree-of-freedom numbering.

use crate::error::{Error, Result};
use crate::fem::{lagrange, raviart_thomas};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeSpace {
    /// Continuous piecewise polynomials of the given degree.
    Lagrange(usize),
    /// H(div)-conforming Raviart-Thomas vectors of the given index.
    RaviartThomas(usize),
    /// Discontinuous piecewise polynomials of the given degree.
    DiscontinuousLagrange(usize),
}

impl FeSpace {
    pub fn degree(&self) -> usize {
        match *self {
            FeSpace::Lagrange(k) | FeSpace::RaviartThomas(k) | FeSpace::DiscontinuousLagrange(k) => k,
        }
    }

    /// Number of local basis functions per cell.
    pub fn local_dim(&self, dim: usize) -> usize {
        match *self {
            FeSpace::Lagrange(k) | FeSpace::DiscontinuousLagrange(k) => lagrange::local_dim(dim, k),
            FeSpace::RaviartThomas(k) => raviart_thomas::local_dim(dim, k),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let ok = match *self {
            FeSpace::Lagrange(k) => (k == 1) || (k == 2 && dim == 2),
            FeSpace::DiscontinuousLagrange(k) => k <= 1,
            FeSpace::RaviartThomas(k) => k == 0 || (k == 1 && dim == 2),
        };
        if ok && (dim == 2 || dim == 3) {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{self:?} in dimension {dim}")))
        }
    }
}

/// Local-to-global map: for each cell, the global index and sign of every
/// local basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    space: FeSpace,
    dim: usize,
    local_dim: usize,
    cell_dofs: Vec<usize>,
    cell_signs: Vec<f64>,
    n_dofs: usize,
    /// Dofs whose functionals live on the domain boundary (RT normal moments
    /// on boundary facets); empty for the other spaces.
    boundary_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, space: FeSpace) -> Result<Self> {
        let dim = mesh.dim();
        space.check(dim)?;
        let local_dim = space.local_dim(dim);
        let n_cells = mesh.n_cells();
        let mut cell_dofs = Vec::with_capacity(n_cells * local_dim);
        let mut cell_signs = Vec::with_capacity(n_cells * local_dim);
        let mut boundary_dofs = Vec::new();

        let n_dofs = match space {
            FeSpace::Lagrange(1) => {
                for c in 0..n_cells {
                    cell_dofs.extend_from_slice(mesh.cell(c));
                }
                mesh.n_vertices()
            }
            FeSpace::Lagrange(2) => {
                let nv = mesh.n_vertices();
                for c in 0..n_cells {
                    cell_dofs.extend_from_slice(mesh.cell(c));
                    // 2D facets are edges; local edge i is opposite vertex i.
                    cell_dofs.extend(mesh.cell_facets(c).iter().map(|f| nv + f));
                }
                nv + mesh.n_facets()
            }
            FeSpace::DiscontinuousLagrange(_) => {
                cell_dofs.extend(0..n_cells * local_dim);
                n_cells * local_dim
            }
            FeSpace::RaviartThomas(0) => {
                for c in 0..n_cells {
                    cell_dofs.extend_from_slice(mesh.cell_facets(c));
                    cell_signs.extend_from_slice(mesh.cell_facet_signs(c));
                }
                boundary_dofs.extend((0..mesh.n_facets()).filter(|&f| mesh.is_boundary_facet(f)));
                mesh.n_facets()
            }
            FeSpace::RaviartThomas(1) => {
                let nf = mesh.n_facets();
                for c in 0..n_cells {
                    let cell = mesh.cell(c);
                    let facets = mesh.cell_facets(c);
                    let signs = mesh.cell_facet_signs(c);
                    for (i, [a, b]) in lagrange::P2_EDGES_2D.iter().enumerate() {
                        let lo = mesh.facet(facets[i])[0];
                        for v in [cell[*a], cell[*b]] {
                            cell_dofs.push(2 * facets[i] + usize::from(v != lo));
                            cell_signs.push(signs[i]);
                        }
                    }
                    cell_dofs.extend([2 * nf + 2 * c, 2 * nf + 2 * c + 1]);
                    cell_signs.extend([1.0, 1.0]);
                }
                for f in (0..nf).filter(|&f| mesh.is_boundary_facet(f)) {
                    boundary_dofs.extend([2 * f, 2 * f + 1]);
                }
                2 * nf + 2 * n_cells
            }
            _ => unreachable!("rejected by FeSpace::check"),
        };
        if cell_signs.is_empty() {
            cell_signs = vec![1.0; cell_dofs.len()];
        }
        Ok(DofMap {
            space,
            dim,
            local_dim,
            cell_dofs,
            cell_signs,
            n_dofs,
            boundary_dofs,
        })
    }

    pub fn space(&self) -> FeSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c * self.local_dim..(c + 1) * self.local_dim]
    }

    pub fn cell_signs(&self, c: usize) -> &[f64] {
        &self.cell_signs[c * self.local_dim..(c + 1) * self.local_dim]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dof_counts_follow_closed_forms() {
        for m in [1, 2, 4, 8] {
            let mesh = Mesh::structured(2, m).unwrap();
            let (nv, nf, nc) = (mesh.n_vertices(), mesh.n_facets(), mesh.n_cells());
            let count = |s| DofMap::new(&mesh, s).unwrap().n_dofs();
            assert_eq!(count(FeSpace::Lagrange(1)), nv);
            assert_eq!(count(FeSpace::Lagrange(2)), nv + nf);
            assert_eq!(count(FeSpace::RaviartThomas(0)), nf);
            assert_eq!(count(FeSpace::RaviartThomas(1)), 2 * nf + 2 * nc);
            assert_eq!(count(FeSpace::DiscontinuousLagrange(0)), nc);
            assert_eq!(count(FeSpace::DiscontinuousLagrange(1)), 3 * nc);

            let mesh = Mesh::structured(3, m).unwrap();
            let count = |s| DofMap::new(&mesh, s).unwrap().n_dofs();
            assert_eq!(count(FeSpace::Lagrange(1)), mesh.n_vertices());
            assert_eq!(count(FeSpace::RaviartThomas(0)), mesh.n_facets());
            assert_eq!(count(FeSpace::DiscontinuousLagrange(0)), mesh.n_cells());
        }
    }

    #[test]
    fn spec_examples() {
        let mesh = Mesh::structured(2, 8).unwrap();
        assert_eq!(DofMap::new(&mesh, FeSpace::Lagrange(1)).unwrap().n_dofs(), 81);
        assert_eq!(DofMap::new(&mesh, FeSpace::DiscontinuousLagrange(0)).unwrap().n_dofs(), 128);
        let mesh = Mesh::structured(2, 1).unwrap();
        assert_eq!(DofMap::new(&mesh, FeSpace::RaviartThomas(0)).unwrap().n_dofs(), 5);
    }

    #[test]
    fn unsupported_spaces_rejected() {
        let mesh = Mesh::structured(3, 1).unwrap();
        assert!(DofMap::new(&mesh, FeSpace::RaviartThomas(1)).is_err());
        assert!(DofMap::new(&mesh, FeSpace::Lagrange(2)).is_err());
    }

    #[test]
    fn shared_rt_dofs_have_opposite_signs() {
        for space in [FeSpace::RaviartThomas(0), FeSpace::RaviartThomas(1)] {
            let mesh = Mesh::structured(2, 3).unwrap();
            let map = DofMap::new(&mesh, space).unwrap();
            let mut seen = vec![Vec::new(); map.n_dofs()];
            for c in 0..mesh.n_cells() {
                for (d, s) in map.cell_dofs(c).iter().zip(map.cell_signs(c)) {
                    seen[*d].push(*s);
                }
            }
            for (d, signs) in seen.iter().enumerate() {
                match signs.len() {
                    1 => {}
                    2 => assert_eq!(signs[0] + signs[1], 0.0, "dof {d}"),
                    n => panic!("dof {d} shared by {n} cells"),
                }
            }
        }
    }

    #[test]
    fn p2_shared_edges_map_to_same_dof() {
        let mesh = Mesh::structured(2, 2).unwrap();
        let map = DofMap::new(&mesh, FeSpace::Lagrange(2)).unwrap();
        let mut uses = vec![0; map.n_dofs()];
        for c in 0..mesh.n_cells() {
            for d in map.cell_dofs(c) {
                uses[*d] += 1;
            }
        }
        for f in 0..mesh.n_facets() {
            let expected = if mesh.is_boundary_facet(f) { 1 } else { 2 };
            assert_eq!(uses[mesh.n_vertices() + f], expected);
        }
    }
}
