use std::f64::consts::TAU;

use rayon::prelude::*;

use super::shell::{thicken, weld_compact};
use super::{QualityParams, TessellateError};
use crate::expr::{BoundExpr, Expr};
use crate::geom::{Aabb, Vec3};
use crate::mesh::{enclosed_volume, validate, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceMode {
    /// The surface already bounds a solid once its periodic seams are joined.
    Closed { periodic_u: bool, periodic_v: bool },
    /// Thicken an open sheet by offsetting it both ways along its normals.
    Shell { thickness: f64 },
}

/// Surface given by three expressions in two named parameters.
#[derive(Debug, Clone)]
pub struct ExprSurface {
    coords: [BoundExpr; 3],
}

impl ExprSurface {
    pub fn new(coords: [&Expr; 3], params: [&str; 2]) -> Result<Self, TessellateError> {
        let bind = |e: &Expr| {
            e.check_variables(&params)
                .map_err(|e| TessellateError::Expr(e.to_string()))?;
            BoundExpr::bind(e, &params).map_err(|e| TessellateError::Expr(e.to_string()))
        };
        Ok(ExprSurface {
            coords: [bind(coords[0])?, bind(coords[1])?, bind(coords[2])?],
        })
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vec3, TessellateError> {
        let mut p = [0.0; 3];
        for (k, e) in self.coords.iter().enumerate() {
            p[k] = e
                .eval(&[u, v])
                .map_err(|e| TessellateError::Expr(format!("at ({u}, {v}): {e}")))?;
        }
        Ok(Vec3::from(p))
    }
}

type SurfaceFn<'a> = dyn Fn(f64, f64) -> Result<Vec3, TessellateError> + Sync + 'a;

fn sample(f: &SurfaceFn<'_>, us: &[f64], vs: &[f64]) -> Result<Vec<Vec3>, TessellateError> {
    let rows: Vec<Vec<Vec3>> = vs
        .par_iter()
        .map(|&v| {
            us.iter()
                .map(|&u| {
                    let p = f(u, v)?;
                    if !p.is_finite() {
                        return Err(TessellateError::NonFinite {
                            what: "surface point".into(),
                            at: format!("({u}, {v})"),
                        });
                    }
                    Ok(p)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.concat())
}

fn params(domain: (f64, f64), n: usize, periodic: bool) -> Vec<f64> {
    let (a, b) = domain;
    if periodic {
        (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    } else {
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Quad grid over `nu x nv` samples, split along the `(i, j)-(i+1, j+1)`
/// diagonal; wrapped directions join their last column back to the first.
fn grid_triangles(nu: usize, nv: usize, wrap_u: bool, wrap_v: bool) -> Vec<[u32; 3]> {
    let id = |i: usize, j: usize| ((j % nv) * nu + i % nu) as u32;
    let cu = if wrap_u { nu } else { nu - 1 };
    let cv = if wrap_v { nv } else { nv - 1 };
    let mut t = Vec::with_capacity(2 * cu * cv);
    for j in 0..cv {
        for i in 0..cu {
            t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    t
}

fn check_domain(name: char, d: (f64, f64)) -> Result<(), TessellateError> {
    if d.0 < d.1 && d.0.is_finite() && d.1.is_finite() {
        Ok(())
    } else {
        Err(TessellateError::Spec(format!(
            "{name} domain [{}, {}] is empty",
            d.0, d.1
        )))
    }
}

/// Meshes `f` over `u_domain x v_domain` with `samples[0] x samples[1]`
/// samples.
///
/// Closed mode drops the duplicate last sample along periodic directions,
/// checks the seam matches to 1e-6 of the surface's size, joins collapsed
/// edges such as poles, and fails unless the result is watertight; it is
/// flipped if needed so normals face out. Shell mode thickens the sheet.
pub fn parametric_surface(
    f: &SurfaceFn<'_>,
    u_domain: (f64, f64),
    v_domain: (f64, f64),
    mode: SurfaceMode,
    samples: [usize; 2],
    q: &QualityParams,
) -> Result<TriangleMesh, TessellateError> {
    q.validate()?;
    check_domain('u', u_domain)?;
    check_domain('v', v_domain)?;
    let [nu, nv] = samples;
    if nu < 2 || nv < 2 {
        return Err(TessellateError::Quality(format!(
            "need at least 2 samples per parameter, got {nu} x {nv}"
        )));
    }
    match mode {
        SurfaceMode::Shell { thickness } => {
            if !(thickness > 0.0 && thickness.is_finite()) {
                return Err(TessellateError::Thickness(thickness));
            }
            let (us, vs) = (params(u_domain, nu, false), params(v_domain, nv, false));
            let pts = sample(f, &us, &vs)?;
            thicken(pts, grid_triangles(nu, nv, false, false), thickness)
        }
        SurfaceMode::Closed {
            periodic_u,
            periodic_v,
        } => {
            let (us, vs) = (
                params(u_domain, nu, periodic_u),
                params(v_domain, nv, periodic_v),
            );
            let pts = sample(f, &us, &vs)?;
            let scale = Aabb::from_points(pts.iter().copied()).map_or(0.0, |b| b.diagonal());
            if periodic_u {
                let far = sample(f, &[u_domain.1], &vs)?;
                let gap = (0..nv)
                    .map(|j| (far[j] - pts[j * nu]).norm())
                    .fold(0.0, f64::max);
                if gap > 1e-6 * scale {
                    return Err(TessellateError::Seam { axis: 'u', gap });
                }
            }
            if periodic_v {
                let far = sample(f, &us, &[v_domain.1])?;
                let gap = (0..nu)
                    .map(|i| (far[i] - pts[i]).norm())
                    .fold(0.0, f64::max);
                if gap > 1e-6 * scale {
                    return Err(TessellateError::Seam { axis: 'v', gap });
                }
            }
            let m = weld_compact(
                pts,
                grid_triangles(nu, nv, periodic_u, periodic_v),
                1e-9 * scale,
            );
            let r = validate(&m, 0.0);
            if !r.is_printable() {
                return Err(TessellateError::NotWatertight(format!(
                    "{} boundary edges, {} non-manifold edges",
                    r.boundary_edge_count, r.nonmanifold_edge_count
                )));
            }
            Ok(if enclosed_volume(&m) < 0.0 {
                m.flipped()
            } else {
                m
            })
        }
    }
}

/// Domain of a graph surface `z = f(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphDomain {
    Rect {
        x: (f64, f64),
        y: (f64, f64),
    },
    /// Sampled on a polar grid: `points_along` radii, `points_around` angles.
    Disk {
        center: (f64, f64),
        radius: f64,
    },
}

/// Thickened graph of `f(x, y)`.
pub fn graph_surface(
    f: &Expr,
    domain: GraphDomain,
    thickness: f64,
    q: &QualityParams,
) -> Result<TriangleMesh, TessellateError> {
    q.validate()?;
    f.check_variables(&["x", "y"])
        .map_err(|e| TessellateError::Expr(e.to_string()))?;
    let g = BoundExpr::bind(f, &["x", "y"]).map_err(|e| TessellateError::Expr(e.to_string()))?;
    let height = |x: f64, y: f64| {
        g.eval(&[x, y])
            .map_err(|e| TessellateError::Expr(format!("at ({x}, {y}): {e}")))
    };
    let shell = SurfaceMode::Shell { thickness };
    match domain {
        GraphDomain::Rect { x, y } => {
            let s = |u: f64, v: f64| Ok(Vec3::new(u, v, height(u, v)?));
            parametric_surface(&s, x, y, shell, [q.points_along, q.points_along], q)
        }
        GraphDomain::Disk { center, radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(TessellateError::Spec(format!(
                    "disk radius must be positive, got {radius}"
                )));
            }
            let s = |r: f64, t: f64| {
                let (x, y) = (center.0 + r * t.cos(), center.1 + r * t.sin());
                Ok(Vec3::new(x, y, height(x, y)?))
            };
            // the closing angle repeats the first and is welded away
            parametric_surface(
                &s,
                (0.0, radius),
                (0.0, TAU),
                shell,
                [q.points_along, q.points_around + 1],
                q,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::mesh::{bounds, signed_volume};
    use std::f64::consts::PI;

    fn torus(u: f64, v: f64) -> Result<Vec3, TessellateError> {
        Ok(Vec3::new(
            (3.0 + v.cos()) * u.cos(),
            (3.0 + v.cos()) * u.sin(),
            v.sin(),
        ))
    }

    #[test]
    fn torus_counts() {
        let mode = SurfaceMode::Closed {
            periodic_u: true,
            periodic_v: true,
        };
        let m = parametric_surface(
            &torus,
            (0.0, 2.0 * PI),
            (0.0, 2.0 * PI),
            mode,
            [100, 30],
            &QualityParams::default(),
        )
        .unwrap();
        assert_eq!((m.vertex_count(), m.triangle_count()), (3000, 6000));
        let r = validate(&m, 0.0);
        assert_eq!(r.euler_characteristic, 0);
        let v = signed_volume(&m).unwrap();
        assert!((v - 6.0 * PI * PI).abs() / (6.0 * PI * PI) < 0.01);
    }

    #[test]
    fn sphere_with_poles() {
        let s = |u: f64, v: f64| Ok(Vec3::new(v.sin() * u.cos(), v.sin() * u.sin(), v.cos()));
        let mode = SurfaceMode::Closed {
            periodic_u: true,
            periodic_v: false,
        };
        let m = parametric_surface(
            &s,
            (0.0, 2.0 * PI),
            (0.0, PI),
            mode,
            [40, 20],
            &QualityParams::default(),
        )
        .unwrap();
        assert_eq!(validate(&m, 0.0).euler_characteristic, 2);
        assert!(signed_volume(&m).unwrap() > 0.0);
    }

    #[test]
    fn false_periodicity() {
        let mode = SurfaceMode::Closed {
            periodic_u: true,
            periodic_v: true,
        };
        assert!(matches!(
            parametric_surface(
                &torus,
                (0.0, PI),
                (0.0, 2.0 * PI),
                mode,
                [10, 10],
                &QualityParams::default()
            ),
            Err(TessellateError::Seam { axis: 'u', .. })
        ));
    }

    #[test]
    fn flat_graph_slab() {
        let f = parse_expression("0").unwrap();
        let dom = GraphDomain::Rect {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        };
        let m = graph_surface(
            &f,
            dom,
            0.2,
            &QualityParams {
                points_along: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((signed_volume(&m).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn disk_graph_single_wall() {
        let f = parse_expression("sin(x + y^2)").unwrap();
        let dom = GraphDomain::Disk {
            center: (0.0, 0.0),
            radius: 2.0,
        };
        let q = QualityParams {
            points_along: 30,
            points_around: 48,
            ..Default::default()
        };
        let m = graph_surface(&f, dom, 0.25, &q).unwrap();
        let r = validate(&m, 0.0);
        assert!(
            r.watertight && r.orientation_consistent && r.euler_characteristic == 2,
            "{r:?}"
        );
        let b = bounds(&m).unwrap();
        assert!(b.max.z <= 1.125 + 1e-9);
    }
}
