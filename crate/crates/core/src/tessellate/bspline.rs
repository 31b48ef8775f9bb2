use super::{parametric_surface, Curve, QualityParams, SurfaceMode, TessellateError};
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

/// Knot vector for `n` control points.
///
/// Open curves use clamped uniform knots; closed curves use uniform knots
/// over the control polygon wrapped by `degree` points, so the parameter
/// range `[0, 1]` covers exactly one period.
fn knots(n: usize, closed: bool, p: usize) -> Vec<f64> {
    if closed {
        (0..n + 2 * p + 1)
            .map(|i| (i as f64 - p as f64) / n as f64)
            .collect()
    } else {
        let inner = n - p;
        let mut k = vec![0.0; p + 1];
        k.extend((1..inner).map(|i| i as f64 / inner as f64));
        k.extend(std::iter::repeat_n(1.0, p + 1));
        k
    }
}

fn check(n: usize, p: usize, t: f64) -> Result<(), TessellateError> {
    if n < p + 1 {
        return Err(TessellateError::TooFewControlPoints {
            needed: p + 1,
            got: n,
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(TessellateError::Spec(format!(
            "spline parameter {t} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Knot span `k` with `knots[k] <= t < knots[k + 1]`, clamped to the last
/// nonempty span at the right end.
fn span(knots: &[f64], p: usize, count: usize, t: f64) -> usize {
    let mut k = p;
    while k + 1 < count && knots[k + 1] <= t {
        k += 1;
    }
    k
}

/// Point on a degree-`degree` B-spline by de Boor's algorithm, `t` in `[0, 1]`.
pub fn bspline_curve_point(
    control: &[Vec3],
    closed: bool,
    degree: usize,
    t: f64,
) -> Result<Vec3, TessellateError> {
    let n = control.len();
    let p = degree;
    check(n, p, t)?;
    let count = if closed { n + p } else { n };
    let u = knots(n, closed, p);
    let k = span(&u, p, count, t);
    let mut d: Vec<Vec3> = (0..=p).map(|j| control[(j + k - p) % n]).collect();
    for r in 1..=p {
        for j in (r..=p).rev() {
            let i = j + k - p;
            let den = u[i + p + 1 - r] - u[i];
            let alpha = if den == 0.0 { 0.0 } else { (t - u[i]) / den };
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    Ok(d[p])
}

/// Nonzero basis functions at `t` by the Cox-de Boor recursion, as
/// `(control index, weight)` pairs. Independent of [`bspline_curve_point`].
pub fn bspline_weights(
    n: usize,
    closed: bool,
    degree: usize,
    t: f64,
) -> Result<Vec<(usize, f64)>, TessellateError> {
    let p = degree;
    check(n, p, t)?;
    let count = if closed { n + p } else { n };
    let u = knots(n, closed, p);
    let k = span(&u, p, count, t);
    let mut basis = vec![0.0; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    basis[0] = 1.0;
    for j in 1..=p {
        left[j] = t - u[k + 1 - j];
        right[j] = u[k + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = basis[r] / (right[r + 1] + left[j - r]);
            basis[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        basis[j] = saved;
    }
    Ok(basis
        .into_iter()
        .enumerate()
        .map(|(j, w)| ((k - p + j) % n, w))
        .collect())
}

/// A B-spline curve usable for tube sweeps; parameter `t` runs over `[0, 1]`.
#[derive(Debug, Clone)]
pub struct BsplineCurve {
    pub control: Vec<Vec3>,
    pub closed: bool,
    pub degree: usize,
}

impl Curve for BsplineCurve {
    fn point(&self, t: f64) -> Result<Vec3, TessellateError> {
        bspline_curve_point(&self.control, self.closed, self.degree, t.clamp(0.0, 1.0))
    }
}

/// Tensor-product clamped B-spline point; `control[i][j]` with `i` along `u`.
pub fn bspline_surface_point(
    control: &[Vec<Vec3>],
    degree: usize,
    u: f64,
    v: f64,
) -> Result<Vec3, TessellateError> {
    if control.is_empty() {
        return Err(TessellateError::TooFewControlPoints {
            needed: degree + 1,
            got: 0,
        });
    }
    let cols = control[0].len();
    if control.iter().any(|row| row.len() != cols) {
        return Err(TessellateError::Spec(
            "control grid rows differ in length".into(),
        ));
    }
    let along_v: Vec<Vec3> = control
        .iter()
        .map(|row| bspline_curve_point(row, false, degree, v))
        .collect::<Result<_, _>>()?;
    bspline_curve_point(&along_v, false, degree, u)
}

/// Meshes a tensor-product B-spline surface over `[0, 1]^2`.
pub fn bspline_surface(
    control: &[Vec<Vec3>],
    degree: usize,
    mode: SurfaceMode,
    samples: [usize; 2],
    q: &QualityParams,
) -> Result<TriangleMesh, TessellateError> {
    let rows = control.len();
    let cols = control.first().map_or(0, |r| r.len());
    if rows < degree + 1 || cols < degree + 1 {
        return Err(TessellateError::TooFewControlPoints {
            needed: degree + 1,
            got: rows.min(cols),
        });
    }
    bspline_surface_point(control, degree, 0.0, 0.0)?;
    let f = |u: f64, v: f64| {
        bspline_surface_point(control, degree, u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
    };
    parametric_surface(&f, (0.0, 1.0), (0.0, 1.0), mode, samples, q)
}
