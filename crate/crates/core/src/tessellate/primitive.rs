use std::collections::HashMap;
use std::f64::consts::PI;

use super::polyhedra::{hull_triangles, icosahedron_vertices};
use super::revolve::revolve;
use super::shell::weld_compact;
use super::{polyhedron, PolyhedronName, QualityParams, TessellateError};
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

const DEFAULT_DEPTH: u32 = 3;
const DEPTH_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveSpec {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    Ellipsoid {
        center: Vec3,
        radii: Vec3,
    },
    Cylinder {
        p1: Vec3,
        p2: Vec3,
        radius: f64,
    },
    /// Solid cone with base disk at `base_center` and tip at `apex`.
    Cone {
        base_center: Vec3,
        apex: Vec3,
        radius: f64,
    },
    Cuboid {
        min_corner: Vec3,
        max_corner: Vec3,
    },
    /// Centered at the origin.
    Polyhedron {
        name: PolyhedronName,
        edge_length: f64,
    },
}

fn positive(what: &str, v: f64) -> Result<(), TessellateError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TessellateError::Spec(format!(
            "{what} must be positive, got {v}"
        )))
    }
}

fn finite(what: &str, v: Vec3) -> Result<(), TessellateError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(TessellateError::Spec(format!(
            "{what} must be finite, got {v}"
        )))
    }
}

impl PrimitiveSpec {
    pub fn validate(&self) -> Result<(), TessellateError> {
        match *self {
            PrimitiveSpec::Sphere { center, radius } => {
                finite("center", center)?;
                positive("radius", radius)
            }
            PrimitiveSpec::Ellipsoid { center, radii } => {
                finite("center", center)?;
                positive("radii.x", radii.x)?;
                positive("radii.y", radii.y)?;
                positive("radii.z", radii.z)
            }
            PrimitiveSpec::Cylinder { p1, p2, radius } => {
                finite("p1", p1)?;
                finite("p2", p2)?;
                if p1 == p2 {
                    return Err(TessellateError::Spec("cylinder end points coincide".into()));
                }
                positive("radius", radius)
            }
            PrimitiveSpec::Cone {
                base_center,
                apex,
                radius,
            } => {
                finite("base_center", base_center)?;
                finite("apex", apex)?;
                if base_center == apex {
                    return Err(TessellateError::Spec(
                        "cone apex coincides with base center".into(),
                    ));
                }
                positive("radius", radius)
            }
            PrimitiveSpec::Cuboid {
                min_corner,
                max_corner,
            } => {
                finite("min_corner", min_corner)?;
                finite("max_corner", max_corner)?;
                if !(min_corner.x < max_corner.x
                    && min_corner.y < max_corner.y
                    && min_corner.z < max_corner.z)
                {
                    return Err(TessellateError::Spec(format!(
                        "cuboid min corner {min_corner} must be below max corner {max_corner} on every axis"
                    )));
                }
                Ok(())
            }
            PrimitiveSpec::Polyhedron { edge_length, .. } => positive("edge_length", edge_length),
        }
    }
}

/// Closed, outward-oriented mesh of a primitive.
///
/// Spheres and ellipsoids subdivide an icosahedron to the shallowest depth
/// whose largest triangle fits `max_cell_area` (depth 3 without a budget).
/// Cylinders, cones and cuboids add rings or grid lines until every triangle
/// fits the budget.
pub fn primitive(spec: &PrimitiveSpec, q: &QualityParams) -> Result<TriangleMesh, TessellateError> {
    q.validate()?;
    spec.validate()?;
    match *spec {
        PrimitiveSpec::Sphere { center, radius } => {
            subdivided(q.max_cell_area, |p| center + p * radius)
        }
        PrimitiveSpec::Ellipsoid { center, radii } => {
            subdivided(q.max_cell_area, |p| center + p.mul_elem(radii))
        }
        PrimitiveSpec::Cylinder { p1, p2, radius } => Ok(cylinder(p1, p2, radius, q)),
        PrimitiveSpec::Cone {
            base_center,
            apex,
            radius,
        } => Ok(cone(base_center, apex, radius, q)),
        PrimitiveSpec::Cuboid {
            min_corner,
            max_corner,
        } => Ok(cuboid(min_corner, max_corner, q.max_cell_area)),
        PrimitiveSpec::Polyhedron { name, edge_length } => Ok(polyhedron(name, edge_length)),
    }
}

/// Unit icosphere after `depth` rounds of 4-way subdivision, vertices pushed
/// onto the sphere after every round.
pub fn icosphere(depth: u32) -> TriangleMesh {
    let mut vertices: Vec<Vec3> = icosahedron_vertices()
        .into_iter()
        .map(|v| v / v.norm())
        .collect();
    let mut triangles = hull_triangles(&vertices);
    for _ in 0..depth {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::with_capacity(triangles.len() * 3 / 2);
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mut m = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                m[k] = *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let p = (vertices[a as usize] + vertices[b as usize]) * 0.5;
                    vertices.push(p / p.norm());
                    (vertices.len() - 1) as u32
                });
            }
            next.push([t[0], m[0], m[2]]);
            next.push([m[0], t[1], m[1]]);
            next.push([m[2], m[1], t[2]]);
            next.push([m[0], m[1], m[2]]);
        }
        triangles = next;
    }
    TriangleMesh::new(vertices, triangles, None).expect("icosphere indices are in range")
}

fn subdivided(
    budget: Option<f64>,
    map: impl Fn(Vec3) -> Vec3,
) -> Result<TriangleMesh, TessellateError> {
    let build = |depth| {
        let (v, t, _) = icosphere(depth).into_parts();
        TriangleMesh::new(v.into_iter().map(&map).collect(), t, None).expect("same indices")
    };
    let Some(budget) = budget else {
        return Ok(build(DEFAULT_DEPTH));
    };
    let mut reached = f64::INFINITY;
    for depth in 0..=DEPTH_CAP {
        let m = build(depth);
        reached = (0..m.triangle_count())
            .map(|t| m.triangle_area(t))
            .fold(0.0, f64::max);
        if reached <= budget {
            return Ok(m);
        }
    }
    Err(TessellateError::BudgetInfeasible {
        budget,
        cap: DEPTH_CAP,
        reached,
    })
}

fn steps(x: f64) -> usize {
    // the tiny slack keeps an exact fit from tipping over by rounding
    ((x * (1.0 + 1e-9)).ceil() as usize).max(1)
}

fn cylinder(p1: Vec3, p2: Vec3, r: f64, q: &QualityParams) -> TriangleMesh {
    let axis = p2 - p1;
    let len = axis.norm();
    let n = q.points_around;
    let chord = 2.0 * r * (PI / n as f64).sin();
    let (k, m) = match q.max_cell_area {
        Some(a) => (
            steps(len * chord / (2.0 * a)),
            steps(r * r * (2.0 * PI / n as f64).sin() / (2.0 * a)),
        ),
        None => (1, 1),
    };
    let mut profile = vec![(0.0, 0.0)];
    profile.extend((1..=m).map(|i| (0.0, r * i as f64 / m as f64)));
    profile.extend((1..=k).map(|j| (len * j as f64 / k as f64, r)));
    profile.extend((1..m).map(|i| (len, r * (m - i) as f64 / m as f64)));
    profile.push((len, 0.0));
    revolve(p1, axis / len, &profile, n)
}

fn cone(base: Vec3, apex: Vec3, r: f64, q: &QualityParams) -> TriangleMesh {
    let axis = apex - base;
    let len = axis.norm();
    let n = q.points_around;
    let chord = 2.0 * r * (PI / n as f64).sin();
    let slant = (len * len + r * r).sqrt();
    let (k, m) = match q.max_cell_area {
        Some(a) => (
            steps(chord * slant / (2.0 * a)),
            steps(r * r * (2.0 * PI / n as f64).sin() / (2.0 * a)),
        ),
        None => (1, 1),
    };
    let mut profile = vec![(0.0, 0.0)];
    profile.extend((1..=m).map(|i| (0.0, r * i as f64 / m as f64)));
    profile.extend((1..k).map(|j| (len * j as f64 / k as f64, r * (k - j) as f64 / k as f64)));
    profile.push((len, 0.0));
    let mut mesh = revolve(base, axis / len, &profile, n);
    // land the tip exactly on the requested apex
    let (mut v, t, _) = mesh.into_parts();
    let tip = v.len() - 1;
    v[tip] = apex;
    mesh = TriangleMesh::new(v, t, None).expect("same indices");
    mesh
}

fn cuboid(min: Vec3, max: Vec3, budget: Option<f64>) -> TriangleMesh {
    let ext = max - min;
    let counts: [usize; 3] = match budget {
        Some(a) => {
            let d = (2.0 * a).sqrt();
            [steps(ext.x / d), steps(ext.y / d), steps(ext.z / d)]
        }
        None => [1, 1, 1],
    };
    let coord = |axis: usize, i: usize| {
        if i == counts[axis] {
            max[axis]
        } else {
            min[axis] + ext[axis] * i as f64 / counts[axis] as f64
        }
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for side in [false, true] {
            let base = vertices.len() as u32;
            let (nb, nc) = (counts[b], counts[c]);
            for j in 0..=nc {
                for i in 0..=nb {
                    let mut p = [0.0; 3];
                    p[a] = if side { max[a] } else { min[a] };
                    p[b] = coord(b, i);
                    p[c] = coord(c, j);
                    vertices.push(Vec3::from(p));
                }
            }
            let id = |i: usize, j: usize| base + (j * (nb + 1) + i) as u32;
            for j in 0..nc {
                for i in 0..nb {
                    let (p00, p10, p11, p01) =
                        (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                    if side {
                        triangles.push([p00, p10, p11]);
                        triangles.push([p00, p11, p01]);
                    } else {
                        triangles.push([p00, p11, p10]);
                        triangles.push([p00, p01, p11]);
                    }
                }
            }
        }
    }
    weld_compact(vertices, triangles, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{bounds, signed_volume, validate};

    fn closed_genus0(m: &TriangleMesh) {
        let r = validate(m, 0.0);
        assert!(r.watertight && r.orientation_consistent, "{r:?}");
        assert_eq!(r.euler_characteristic, 2);
        assert_eq!(r.connected_components, 1);
    }

    #[test]
    fn icosphere_counts() {
        for d in 0..4 {
            let m = icosphere(d);
            assert_eq!(m.triangle_count(), 20 * 4usize.pow(d));
            closed_genus0(&m);
            assert!(m.vertices().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn sphere_budget() {
        let q = QualityParams {
            max_cell_area: Some(0.01),
            ..Default::default()
        };
        let m = primitive(
            &PrimitiveSpec::Sphere {
                center: Vec3::ZERO,
                radius: 1.0,
            },
            &q,
        )
        .unwrap();
        assert!((0..m.triangle_count()).all(|t| m.triangle_area(t) <= 0.01));
        closed_genus0(&m);
        let tiny = QualityParams {
            max_cell_area: Some(1e-9),
            ..Default::default()
        };
        assert!(matches!(
            primitive(
                &PrimitiveSpec::Sphere {
                    center: Vec3::ZERO,
                    radius: 1.0
                },
                &tiny
            ),
            Err(TessellateError::BudgetInfeasible { cap: 8, .. })
        ));
    }

    #[test]
    fn cylinder_and_cone() {
        let q = QualityParams {
            points_around: 48,
            ..Default::default()
        };
        let c = primitive(
            &PrimitiveSpec::Cylinder {
                p1: Vec3::ZERO,
                p2: Vec3::Z * 2.0,
                radius: 0.5,
            },
            &q,
        )
        .unwrap();
        closed_genus0(&c);
        // inscribed 48-gon prism
        let exact = 0.5 * 48.0 * 0.25 * (2.0 * PI / 48.0).sin() * 2.0;
        assert!((signed_volume(&c).unwrap() - exact).abs() < 1e-12);

        let apex = Vec3::new(0.0, -0.9, 2.4);
        let k = primitive(
            &PrimitiveSpec::Cone {
                base_center: Vec3::new(0.0, -0.55, 2.4),
                apex,
                radius: 0.1,
            },
            &q,
        )
        .unwrap();
        closed_genus0(&k);
        assert!(k.vertices().contains(&apex));
        let exact = exact_prism_cone(0.1, 0.35, 48);
        assert!((signed_volume(&k).unwrap() - exact).abs() < 1e-12);
    }

    fn exact_prism_cone(r: f64, h: f64, n: usize) -> f64 {
        0.5 * n as f64 * r * r * (2.0 * PI / n as f64).sin() * h / 3.0
    }

    #[test]
    fn budgeted_cylinder_and_cone() {
        let q = QualityParams {
            max_cell_area: Some(0.0005),
            ..Default::default()
        };
        let c = primitive(
            &PrimitiveSpec::Cylinder {
                p1: Vec3::new(0.0, 0.0, 2.8),
                p2: Vec3::new(0.0, 0.0, 2.9),
                radius: 0.7,
            },
            &q,
        )
        .unwrap();
        closed_genus0(&c);
        assert!((0..c.triangle_count()).all(|t| c.triangle_area(t) <= 0.0005));
        let q = QualityParams {
            max_cell_area: Some(0.00005),
            ..Default::default()
        };
        let k = primitive(
            &PrimitiveSpec::Cone {
                base_center: Vec3::ZERO,
                apex: Vec3::new(0.0, -0.35, 0.0),
                radius: 0.1,
            },
            &q,
        )
        .unwrap();
        closed_genus0(&k);
        assert!((0..k.triangle_count()).all(|t| k.triangle_area(t) <= 0.00005));
    }

    #[test]
    fn cuboids() {
        let spec = PrimitiveSpec::Cuboid {
            min_corner: Vec3::ZERO,
            max_corner: Vec3::splat(1.0),
        };
        let m = primitive(&spec, &QualityParams::default()).unwrap();
        assert_eq!(m.triangle_count(), 12);
        closed_genus0(&m);
        assert!((signed_volume(&m).unwrap() - 1.0).abs() < 1e-15);
        let q = QualityParams {
            max_cell_area: Some(0.01),
            ..Default::default()
        };
        let fine = primitive(&spec, &q).unwrap();
        closed_genus0(&fine);
        assert!((0..fine.triangle_count()).all(|t| fine.triangle_area(t) <= 0.01));
        assert!((signed_volume(&fine).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_extents() {
        let q = QualityParams {
            max_cell_area: Some(0.2),
            ..Default::default()
        };
        let m = primitive(
            &PrimitiveSpec::Ellipsoid {
                center: Vec3::ZERO,
                radii: Vec3::new(2.0, 1.0, 1.0),
            },
            &q,
        )
        .unwrap();
        closed_genus0(&m);
        let e = bounds(&m).unwrap().extent();
        assert!(e.x >= 3.76 && e.x <= 4.0, "{e}");
    }

    #[test]
    fn bad_specs() {
        let q = QualityParams::default();
        assert!(primitive(
            &PrimitiveSpec::Sphere {
                center: Vec3::ZERO,
                radius: 0.0
            },
            &q
        )
        .is_err());
        assert!(primitive(
            &PrimitiveSpec::Cylinder {
                p1: Vec3::X,
                p2: Vec3::X,
                radius: 1.0
            },
            &q
        )
        .is_err());
        assert!(primitive(
            &PrimitiveSpec::Cuboid {
                min_corner: Vec3::splat(3.0),
                max_corner: Vec3::splat(2.0)
            },
            &q
        )
        .is_err());
    }
}
