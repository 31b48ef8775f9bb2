use rayon::prelude::*;

use super::table::{case_triangles, corner_offset, EDGES};
use super::{csg_eval, Continuity, CsgNode, GridSpec, ImplicitError};
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

/// Lattice including the ghost layer: node `g` along an axis sits at
/// `min + (g - 0.5) * h`, so `g = 0` and `g = n + 1` are ghosts half a cell
/// outside the box.
struct Lattice {
    min: Vec3,
    max: Vec3,
    h: Vec3,
    dims: [usize; 3],
}

impl Lattice {
    fn new(grid: &GridSpec) -> Self {
        let r = grid.resolution;
        Lattice {
            min: grid.bounds.min,
            max: grid.bounds.max,
            h: grid.cell_size(),
            dims: [r[0] + 2, r[1] + 2, r[2] + 2],
        }
    }

    #[inline]
    fn index(&self, g: [usize; 3]) -> usize {
        g[0] + self.dims[0] * (g[1] + self.dims[1] * g[2])
    }

    #[inline]
    fn coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [x, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    fn is_ghost(&self, g: [usize; 3]) -> bool {
        (0..3).any(|a| g[a] == 0 || g[a] == self.dims[a] - 1)
    }

    #[inline]
    fn position(&self, g: [usize; 3]) -> Vec3 {
        Vec3::new(
            self.min.x + (g[0] as f64 - 0.5) * self.h.x,
            self.min.y + (g[1] as f64 - 0.5) * self.h.y,
            self.min.z + (g[2] as f64 - 0.5) * self.h.z,
        )
    }

    fn node_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }
}

/// Meshes the region `csg_eval(node, p) <= 0` inside `grid.bounds`.
///
/// Sample nodes are cell centers; an outside ghost layer closes regions that
/// reach the box with flat walls lying exactly on the box faces. Crossings on
/// edges between real nodes use linear interpolation for exact-distance
/// fields and sign bisection otherwise. Output is independent of the rayon
/// thread count.
pub fn marching_cubes(node: &CsgNode, grid: &GridSpec) -> Result<TriangleMesh, ImplicitError> {
    grid.validate()?;
    let lat = Lattice::new(grid);
    let [dx, dy, _] = lat.dims;
    let slab = dx * dy;

    // classify every node, one z-slab per task
    let values: Vec<f64> = (0..lat.dims[2])
        .into_par_iter()
        .flat_map_iter(|gz| {
            let lat = &lat;
            (0..slab).map(move |k| {
                let g = [k % dx, k / dx, gz];
                if lat.is_ghost(g) {
                    f64::INFINITY
                } else {
                    csg_eval(node, lat.position(g))
                }
            })
        })
        .collect();
    if let Some(i) = values
        .iter()
        .enumerate()
        .position(|(i, v)| !v.is_finite() && !lat.is_ghost(lat.coords(i)))
    {
        return Err(ImplicitError::NonFinite(lat.position(lat.coords(i))));
    }
    let inside = |i: usize| values[i] <= 0.0;

    // crossing edges in canonical order: node index, then axis
    let strides = [1, dx, slab];
    let crossings: Vec<usize> = (0..lat.node_count())
        .flat_map(|i| {
            let g = lat.coords(i);
            (0..3).filter_map(move |a| {
                (g[a] + 1 < lat.dims[a] && inside(i) != inside(i + strides[a])).then_some(i * 3 + a)
            })
        })
        .collect();

    let continuity = node.continuity();
    let vertices: Vec<Vec3> = crossings
        .par_iter()
        .map(|&e| crossing_point(&lat, node, grid, continuity, &values, e, strides))
        .collect();

    let mut edge_vertex = vec![u32::MAX; lat.node_count() * 3];
    for (k, &e) in crossings.iter().enumerate() {
        edge_vertex[e] = k as u32;
    }

    let triangles: Vec<[u32; 3]> = (0..lat.dims[2] - 1)
        .into_par_iter()
        .flat_map_iter(|cz| {
            let mut out = Vec::new();
            for cy in 0..lat.dims[1] - 1 {
                for cx in 0..lat.dims[0] - 1 {
                    let base = lat.index([cx, cy, cz]);
                    let mut mask = 0u8;
                    for c in 0..8u8 {
                        let o = corner_offset(c);
                        if inside(base + o[0] + o[1] * dx + o[2] * slab) {
                            mask |= 1 << c;
                        }
                    }
                    for tri in case_triangles(mask) {
                        out.push(tri.map(|le| {
                            let (c, axis) = EDGES[le as usize];
                            let o = corner_offset(c);
                            let n = base + o[0] + o[1] * dx + o[2] * slab;
                            edge_vertex[n * 3 + axis as usize]
                        }));
                    }
                }
            }
            out
        })
        .collect();

    Ok(TriangleMesh::new(vertices, triangles, None)?)
}

fn crossing_point(
    lat: &Lattice,
    node: &CsgNode,
    grid: &GridSpec,
    continuity: Continuity,
    values: &[f64],
    edge: usize,
    strides: [usize; 3],
) -> Vec3 {
    let i = edge / 3;
    let axis = edge % 3;
    let j = i + strides[axis];
    let (gi, gj) = (lat.coords(i), lat.coords(j));
    let (pi, pj) = (lat.position(gi), lat.position(gj));

    if lat.is_ghost(gi) || lat.is_ghost(gj) {
        // the wall sits exactly on the box face between a real node and its ghost
        let mut p = if lat.is_ghost(gi) { pj } else { pi };
        let ghost = if lat.is_ghost(gi) { gi } else { gj };
        p.set(
            axis,
            if ghost[axis] == 0 {
                lat.min[axis]
            } else {
                lat.max[axis]
            },
        );
        return p;
    }

    let (vi, vj) = (values[i], values[j]);
    if continuity == Continuity::ExactDistance {
        let t = (vi / (vi - vj)).clamp(0.0, 1.0);
        return pi.lerp(pj, t);
    }
    let (mut lo, mut hi) = if vi <= 0.0 { (pi, pj) } else { (pj, pi) };
    for _ in 0..grid.bisection_iterations {
        let mid = (lo + hi) * 0.5;
        if csg_eval(node, mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * 0.5
}
