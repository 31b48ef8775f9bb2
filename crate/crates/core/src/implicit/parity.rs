use super::{Continuity, FieldSource, ImplicitError, SignedField};
use crate::geom::{Aabb, Vec3};
use crate::mesh::{default_weld_tolerance, validate, TriangleMesh};

/// Bucket grid over the projection of every triangle onto the plane
/// perpendicular to one axis.
struct AxisIndex {
    axis: usize,
    u: usize,
    v: usize,
    lo: [f64; 2],
    cell: [f64; 2],
    n: usize,
    buckets: Vec<Vec<u32>>,
}

impl AxisIndex {
    fn build(tris: &[[Vec3; 3]], bounds: &Aabb, axis: usize) -> Self {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let n = ((tris.len() as f64 / 2.0).sqrt().ceil() as usize).clamp(1, 512);
        let lo = [bounds.min[u], bounds.min[v]];
        let ext = bounds.extent();
        let cell = [
            (ext[u] / n as f64).max(f64::MIN_POSITIVE),
            (ext[v] / n as f64).max(f64::MIN_POSITIVE),
        ];
        let mut idx = AxisIndex {
            axis,
            u,
            v,
            lo,
            cell,
            n,
            buckets: vec![Vec::new(); n * n],
        };
        for (t, tri) in tris.iter().enumerate() {
            let (mut a0, mut a1) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut b0, mut b1) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in tri {
                a0 = a0.min(p[u]);
                a1 = a1.max(p[u]);
                b0 = b0.min(p[v]);
                b1 = b1.max(p[v]);
            }
            let (i0, i1) = (idx.bucket(0, a0), idx.bucket(0, a1));
            let (j0, j1) = (idx.bucket(1, b0), idx.bucket(1, b1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    idx.buckets[j * n + i].push(t as u32);
                }
            }
        }
        idx
    }

    fn bucket(&self, k: usize, x: f64) -> usize {
        (((x - self.lo[k]) / self.cell[k]).floor().max(0.0) as usize).min(self.n - 1)
    }
}

enum Cast {
    Crossings(usize),
    Ambiguous,
}

struct Parity {
    tris: Vec<[Vec3; 3]>,
    bounds: Aabb,
    tol: f64,
    indexes: Vec<AxisIndex>,
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Parity {
    /// Counts triangles crossed by the ray from `p` along `+axis`.
    fn cast(&self, idx: &AxisIndex, p: Vec3) -> Cast {
        let (u, v, a) = (idx.u, idx.v, idx.axis);
        let q = [p[u], p[v]];
        let bucket = &idx.buckets[idx.bucket(1, q[1]) * idx.n + idx.bucket(0, q[0])];
        let mut count = 0;
        for &t in bucket {
            let tri = &self.tris[t as usize];
            let r = tri.map(|c| [c[u] - q[0], c[v] - q[1]]);
            let lo_u = r.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
            let hi_u = r.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
            let lo_v = r.iter().map(|c| c[1]).fold(f64::INFINITY, f64::min);
            let hi_v = r.iter().map(|c| c[1]).fold(f64::NEG_INFINITY, f64::max);
            if lo_u > self.tol || hi_u < -self.tol || lo_v > self.tol || hi_v < -self.tol {
                continue;
            }
            // w[k] is twice the signed area opposite corner k
            let w = [cross2(r[1], r[2]), cross2(r[2], r[0]), cross2(r[0], r[1])];
            let d = w[0] + w[1] + w[2];
            let near_edge = (0..3).any(|k| {
                let (e0, e1) = (r[(k + 1) % 3], r[(k + 2) % 3]);
                let len = ((e1[0] - e0[0]).powi(2) + (e1[1] - e0[1]).powi(2)).sqrt();
                let lo = |i: usize| e0[i].min(e1[i]) - self.tol;
                let hi = |i: usize| e0[i].max(e1[i]) + self.tol;
                let within_box = lo(0) <= 0.0 && hi(0) >= 0.0 && lo(1) <= 0.0 && hi(1) >= 0.0;
                within_box && (len == 0.0 || w[k].abs() / len <= self.tol)
            });
            if near_edge {
                // only matters if the hit would be ahead of the point
                let ahead = tri.iter().any(|c| c[a] >= p[a] - self.tol);
                if ahead {
                    return Cast::Ambiguous;
                }
                continue;
            }
            if d == 0.0 {
                continue;
            }
            let inside = w.iter().all(|&x| x * d > 0.0);
            if !inside {
                continue;
            }
            let hit = (w[0] * tri[0][a] + w[1] * tri[1][a] + w[2] * tri[2][a]) / d;
            if (hit - p[a]).abs() <= self.tol {
                return Cast::Ambiguous;
            }
            if hit > p[a] {
                count += 1;
            }
        }
        Cast::Crossings(count)
    }

    fn eval(&self, p: Vec3) -> f64 {
        if !self.bounds.contains(p) {
            return 1.0;
        }
        let mut last = 0;
        for idx in &self.indexes {
            match self.cast(idx, p) {
                Cast::Crossings(c) => return if c % 2 == 1 { -1.0 } else { 1.0 },
                Cast::Ambiguous => last += 1,
            }
        }
        // every direction grazed an edge: the point is on the surface to
        // within tolerance, either answer is acceptable
        debug_assert_eq!(last, 3);
        -1.0
    }
}

/// Inside/outside field of a closed mesh by ray parity.
///
/// Rays go along +x; when one passes within 1e-9 of the mesh scale of an edge
/// or vertex it is recast along +y, then +z. Values are exactly -1 or +1.
pub fn mesh_to_field(m: &TriangleMesh) -> Result<SignedField, ImplicitError> {
    let r = validate(m, default_weld_tolerance(m));
    if !r.is_printable() {
        return Err(ImplicitError::NotWatertight(format!(
            "{} boundary edges, {} non-manifold edges, orientation {}",
            r.boundary_edge_count,
            r.nonmanifold_edge_count,
            if r.orientation_consistent {
                "consistent"
            } else {
                "inconsistent"
            }
        )));
    }
    let bounds = crate::mesh::bounds(m)?;
    let tris: Vec<[Vec3; 3]> = (0..m.triangle_count()).map(|t| m.triangle(t)).collect();
    let indexes = (0..3)
        .map(|a| AxisIndex::build(&tris, &bounds, a))
        .collect();
    let parity = Parity {
        tris,
        bounds,
        tol: 1e-9 * bounds.diagonal(),
        indexes,
    };
    Ok(SignedField::new(
        move |p| parity.eval(p),
        Continuity::SignOnly,
        FieldSource::MeshParity,
    ))
}
