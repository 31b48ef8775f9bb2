use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{Curve, QualityParams, TessellateError};
use crate::geom::{rotation_about_axis, Vec3};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Caps {
    /// Planar fans across the open ends.
    Flat,
    /// Leave the ends open.
    None,
}

/// Sweeps a regular `points_around`-gon of circumradius `radius` along the
/// curve, sampled at `points_along` parameter values.
///
/// Frames are rotation-minimizing (double reflection). A closed sweep samples
/// `[a, b)`, requires the curve to return to its start within 1e-6 of its
/// length, and spreads the frame's leftover twist evenly along the tube so the
/// last ring meets the first.
pub fn tube_sweep(
    curve: &dyn Curve,
    domain: (f64, f64),
    radius: f64,
    q: &QualityParams,
    closed: bool,
    caps: Caps,
) -> Result<TriangleMesh, TessellateError> {
    q.validate()?;
    let (a, b) = domain;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(TessellateError::Spec(format!(
            "curve domain [{a}, {b}] is empty"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(TessellateError::Spec(format!(
            "tube radius must be positive, got {radius}"
        )));
    }
    let n = q.points_along;
    let params: Vec<f64> = if closed {
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
    };
    let pts: Vec<Vec3> = params
        .par_iter()
        .map(|&t| curve.point(t))
        .collect::<Result<_, _>>()?;

    if closed {
        let end = curve.point(b)?;
        let length: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>()
            + (pts[n - 1] - pts[0]).norm();
        let gap = (end - pts[0]).norm();
        if gap > 1e-6 * length {
            return Err(TessellateError::NotClosed { gap });
        }
    }

    let at = |i: isize| -> Vec3 {
        if closed {
            pts[i.rem_euclid(n as isize) as usize]
        } else {
            pts[i.clamp(0, n as isize - 1) as usize]
        }
    };
    let mut tangents = Vec::with_capacity(n);
    for i in 0..n {
        let step = at(i as isize + 1) - at(i as isize);
        if step.norm() == 0.0 && (closed || i + 1 < n) {
            return Err(TessellateError::DegenerateTangent { t: params[i] });
        }
        let d = at(i as isize + 1) - at(i as isize - 1);
        tangents.push(
            d.normalized()
                .ok_or(TessellateError::DegenerateTangent { t: params[i] })?,
        );
    }

    // double-reflection rotation-minimizing frames
    let reflect = |r: Vec3, t: Vec3, x0: Vec3, x1: Vec3, t1: Vec3| -> Vec3 {
        let v1 = x1 - x0;
        let c1 = v1.dot(v1);
        let rl = r - v1 * (2.0 / c1 * v1.dot(r));
        let tl = t - v1 * (2.0 / c1 * v1.dot(t));
        let v2 = t1 - tl;
        let c2 = v2.dot(v2);
        let r1 = if c2 > 0.0 {
            rl - v2 * (2.0 / c2 * v2.dot(rl))
        } else {
            rl
        };
        // strip drift back into the normal plane
        (r1 - t1 * r1.dot(t1))
            .normalized()
            .unwrap_or_else(|| t1.any_perpendicular())
    };
    let mut normals = Vec::with_capacity(n);
    normals.push(tangents[0].any_perpendicular());
    for i in 0..n - 1 {
        let r = reflect(normals[i], tangents[i], pts[i], pts[i + 1], tangents[i + 1]);
        normals.push(r);
    }
    if closed {
        let back = reflect(
            normals[n - 1],
            tangents[n - 1],
            pts[n - 1],
            pts[0],
            tangents[0],
        );
        let twist = back
            .cross(normals[0])
            .dot(tangents[0])
            .atan2(back.dot(normals[0]));
        for i in 1..n {
            let rot = rotation_about_axis(twist * i as f64 / n as f64, tangents[i], Vec3::ZERO)
                .expect("tangent is a unit vector");
            let r = rot.apply_vector(normals[i]);
            normals[i] = (r - tangents[i] * r.dot(tangents[i]))
                .normalized()
                .expect("frame stays nonzero");
        }
    }

    let m = q.points_around;
    let trig: Vec<(f64, f64)> = (0..m)
        .map(|j| (TAU * j as f64 / m as f64).sin_cos())
        .collect();
    let mut vertices = Vec::with_capacity(n * m + 2);
    for i in 0..n {
        let (r, t) = (normals[i], tangents[i]);
        let s = t.cross(r);
        vertices.extend(
            trig.iter()
                .map(|&(sn, cs)| pts[i] + (r * cs + s * sn) * radius),
        );
    }
    let id = |i: usize, j: usize| (i * m + j % m) as u32;
    let mut triangles = Vec::with_capacity(2 * n * m + 2 * m);
    let segments = if closed { n } else { n - 1 };
    for i in 0..segments {
        let k = (i + 1) % n;
        for j in 0..m {
            triangles.push([id(i, j), id(i, j + 1), id(k, j + 1)]);
            triangles.push([id(i, j), id(k, j + 1), id(k, j)]);
        }
    }
    if !closed && caps == Caps::Flat {
        let start = vertices.len() as u32;
        vertices.push(pts[0]);
        let end = vertices.len() as u32;
        vertices.push(pts[n - 1]);
        for j in 0..m {
            triangles.push([start, id(0, j + 1), id(0, j)]);
            triangles.push([end, id(n - 1, j), id(n - 1, j + 1)]);
        }
    }
    Ok(TriangleMesh::new(vertices, triangles, None)?)
}
