use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{
    CsgOp, ExportFormat, ObjectKind, Scene, SceneError, SceneObject, SceneQuality, Transform,
};
use crate::expr::to_signed_field;
use crate::geom::{rotation_about_axis, scaling, translation, Aabb, Vec3};
use crate::implicit::{iso_shell, marching_cubes, mesh_to_field, CsgNode, GridSpec, SignedField};
use crate::mesh::{
    apply_transform, bounds, center_at_origin, default_weld_tolerance, merge_with_stats, resize,
    validate, TriangleMesh, ValidationReport,
};
use crate::meshio::{ply_bytes, stl_bytes, wrl_text, StlFormat};
use crate::tessellate::{
    bspline_surface, graph_surface, parametric_surface, polygon_edges, primitive, tube_sweep,
    wireframe, BsplineCurve, ExprCurve, ExprSurface, PrimitiveSpec,
};

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Where relative export paths go; defaults to the scene file's directory.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Multiplies sample counts and grid resolutions, divides cell-area budgets.
    pub quality_scale: f64,
    /// Accept open meshes from every object, not just those marked `allow_open`.
    pub allow_open: bool,
    pub write_files: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            out_dir: None,
            threads: None,
            quality_scale: 1.0,
            allow_open: false,
            write_files: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub merged: TriangleMesh,
    /// After transforms, colored when the object has a color.
    pub per_object: Vec<TriangleMesh>,
    pub reports: Vec<ValidationReport>,
    pub written_files: Vec<PathBuf>,
    /// Degenerate triangles removed while merging.
    pub dropped_triangles: usize,
}

fn scale_count(n: usize, f: f64, min: usize) -> usize {
    ((n as f64 * f).round() as usize).max(min)
}

fn scaled(q: SceneQuality, f: f64) -> SceneQuality {
    SceneQuality {
        max_cell_area: q.max_cell_area.map(|a| a / f),
        points_along: scale_count(q.points_along, f, 2),
        points_around: scale_count(q.points_around, f, 3),
        grid_resolution: scale_count(q.grid_resolution, f, 2),
        bisection_iterations: q.bisection_iterations,
    }
}

/// Sampling settings for one object: scene defaults, then the object's
/// overrides, then the build's quality scale.
struct Settings {
    base: SceneQuality,
    scale: f64,
}

impl Settings {
    fn for_object(&self, o: &SceneObject) -> Settings {
        Settings {
            base: self.base.overlay(&o.quality),
            scale: self.scale,
        }
    }

    fn quality(&self) -> SceneQuality {
        scaled(self.base, self.scale)
    }

    fn resolution(&self, r: Option<[usize; 3]>) -> [usize; 3] {
        match r {
            Some(r) => r.map(|n| scale_count(n, self.scale, 2)),
            None => [self.quality().grid_resolution; 3],
        }
    }

    fn samples(&self, s: Option<[usize; 2]>) -> [usize; 2] {
        match s {
            Some(s) => s.map(|n| scale_count(n, self.scale, 2)),
            None => [self.quality().points_along; 2],
        }
    }

    fn grid(&self, b: Aabb, r: Option<[usize; 3]>) -> GridSpec {
        GridSpec {
            bounds: b,
            resolution: self.resolution(r),
            bisection_iterations: self.base.bisection_iterations,
        }
    }
}

fn msg<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn object_mesh(o: &SceneObject, s: &Settings) -> Result<TriangleMesh, String> {
    let q = s.quality().params();
    let m = match &o.kind {
        ObjectKind::Primitive(spec) => primitive(spec, &q).map_err(msg)?,
        ObjectKind::ParametricCurve {
            coords,
            t,
            radius,
            closed,
            caps,
        } => {
            let c = ExprCurve::new(&coords[0], &coords[1], &coords[2], "t").map_err(msg)?;
            tube_sweep(&c, *t, *radius, &q, *closed, *caps).map_err(msg)?
        }
        ObjectKind::BsplineCurve {
            control,
            closed,
            degree,
            radius,
            caps,
        } => {
            let c = BsplineCurve {
                control: control.clone(),
                closed: *closed,
                degree: *degree,
            };
            tube_sweep(&c, (0.0, 1.0), *radius, &q, *closed, *caps).map_err(msg)?
        }
        ObjectKind::GraphSurface {
            f,
            domain,
            thickness,
        } => graph_surface(f, *domain, *thickness, &q).map_err(msg)?,
        ObjectKind::ParametricSurface {
            coords,
            u,
            v,
            mode,
            samples,
        } => {
            let surf =
                ExprSurface::new([&coords[0], &coords[1], &coords[2]], ["u", "v"]).map_err(msg)?;
            let f = |a: f64, b: f64| surf.point(a, b);
            parametric_surface(&f, *u, *v, *mode, s.samples(*samples), &q).map_err(msg)?
        }
        ObjectKind::BsplineSurface {
            control,
            degree,
            mode,
            samples,
        } => bspline_surface(control, *degree, *mode, s.samples(*samples), &q).map_err(msg)?,
        ObjectKind::IsoShell {
            f,
            k,
            delta,
            bounds,
            resolution,
        } => iso_shell(f, *k, *delta, &s.grid(*bounds, *resolution)).map_err(msg)?,
        ObjectKind::Region {
            predicate,
            bounds,
            resolution,
        } => {
            let field = to_signed_field(predicate).map_err(msg)?;
            marching_cubes(&CsgNode::leaf(field), &s.grid(*bounds, *resolution)).map_err(msg)?
        }
        ObjectKind::WireframeOf { source, thickness } => {
            let src =
                object_mesh(source, &s.for_object(source)).map_err(|e| format!("source: {e}"))?;
            let (vertices, edges) = polygon_edges(&src);
            wireframe(&vertices, &edges, *thickness, &q)
                .map_err(msg)?
                .mesh
        }
        ObjectKind::Csg {
            op,
            children,
            bounds: explicit,
            resolution,
        } => {
            let (node, b) = csg_node(*op, children, s)?;
            let grid = match explicit {
                Some(b) => s.grid(*b, *resolution),
                None => {
                    // two spare cells on every side keep the walls off the box faces
                    let n = s.resolution(*resolution);
                    let e = b.extent();
                    let h = Vec3::new(e.x / n[0] as f64, e.y / n[1] as f64, e.z / n[2] as f64);
                    GridSpec {
                        bounds: b.inflate(h * 2.0),
                        resolution: n.map(|k| k + 4),
                        bisection_iterations: s.base.bisection_iterations,
                    }
                }
            };
            marching_cubes(&node, &grid).map_err(msg)?
        }
    };
    if m.is_empty() {
        return Err("produced no triangles".into());
    }
    o.transforms
        .iter()
        .try_fold(m, |m, t| apply(&m, t).map_err(msg))
}

fn apply(m: &TriangleMesh, t: &Transform) -> Result<TriangleMesh, crate::mesh::MeshError> {
    match *t {
        Transform::Rotate { angle, axis, point } => {
            apply_transform(m, &rotation_about_axis(angle, axis, point)?)
        }
        Transform::Translate(v) => apply_transform(m, &translation(v)),
        Transform::Scale { factors, anchor } => apply_transform(m, &scaling(factors, anchor)?),
        Transform::Resize(target) => resize(m, target),
        Transform::CenterAtOrigin => center_at_origin(m),
    }
}

fn analytic_bounds(points: &[Vec3], r: f64) -> Aabb {
    Aabb::from_points(points.iter().copied())
        .expect("nonempty")
        .inflate(Vec3::splat(r))
}

/// A CSG child as a field. Untransformed spheres, boxes, cylinders, cones,
/// regions and nested CSG stay exact; anything else is meshed and turned into
/// a parity field.
fn csg_child(c: &SceneObject, s: &Settings) -> Result<(CsgNode, Aabb), String> {
    let s = s.for_object(c);
    if c.transforms.is_empty() {
        match &c.kind {
            ObjectKind::Primitive(PrimitiveSpec::Sphere { center, radius }) => {
                return Ok((
                    CsgNode::leaf(SignedField::sphere(*center, *radius)),
                    analytic_bounds(&[*center], *radius),
                ))
            }
            ObjectKind::Primitive(PrimitiveSpec::Cuboid {
                min_corner,
                max_corner,
            }) => {
                return Ok((
                    CsgNode::leaf(SignedField::cuboid(*min_corner, *max_corner)),
                    Aabb::new(*min_corner, *max_corner),
                ))
            }
            ObjectKind::Primitive(PrimitiveSpec::Cylinder { p1, p2, radius }) => {
                return Ok((
                    CsgNode::leaf(SignedField::cylinder(*p1, *p2, *radius)),
                    analytic_bounds(&[*p1, *p2], *radius),
                ))
            }
            ObjectKind::Primitive(PrimitiveSpec::Cone {
                base_center,
                apex,
                radius,
            }) => {
                return Ok((
                    CsgNode::leaf(SignedField::cone(*base_center, *apex, *radius)),
                    analytic_bounds(&[*base_center, *apex], *radius),
                ))
            }
            ObjectKind::Region {
                predicate, bounds, ..
            } => {
                let f = to_signed_field(predicate).map_err(msg)?;
                let node = CsgNode::Intersection(vec![
                    CsgNode::leaf(f),
                    CsgNode::leaf(SignedField::cuboid(bounds.min, bounds.max)),
                ]);
                return Ok((node, *bounds));
            }
            ObjectKind::Csg {
                op,
                children,
                bounds,
                ..
            } => {
                let (node, b) = csg_node(*op, children, &s)?;
                return Ok((node, bounds.unwrap_or(b)));
            }
            _ => {}
        }
    }
    let m = object_mesh(c, &s)?;
    let field = mesh_to_field(&m).map_err(msg)?;
    Ok((CsgNode::leaf(field), bounds(&m).map_err(msg)?))
}

fn csg_node(op: CsgOp, children: &[SceneObject], s: &Settings) -> Result<(CsgNode, Aabb), String> {
    let mut nodes = Vec::with_capacity(children.len());
    let mut boxes = Vec::with_capacity(children.len());
    for (j, c) in children.iter().enumerate() {
        let (n, b) = csg_child(c, s).map_err(|e| format!("child {j}: {e}"))?;
        nodes.push(n);
        boxes.push(b);
    }
    let first = boxes[0];
    Ok(match op {
        CsgOp::Union => (
            CsgNode::Union(nodes),
            boxes.iter().fold(first, |a, b| a.union(b)),
        ),
        CsgOp::Intersection => {
            let lo = boxes.iter().fold(first.min, |a, b| a.max(b.min));
            let hi = boxes.iter().fold(first.max, |a, b| a.min(b.max));
            if !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z) {
                return Err(
                    "intersection is empty: the children's bounding boxes do not overlap".into(),
                );
            }
            (CsgNode::Intersection(nodes), Aabb::new(lo, hi))
        }
        CsgOp::Difference => {
            let mut it = nodes.into_iter();
            let (a, b) = (
                it.next().expect("two children"),
                it.next().expect("two children"),
            );
            (CsgNode::difference(a, b), first)
        }
        CsgOp::Complement => (
            CsgNode::complement(nodes.into_iter().next().expect("one child")),
            first,
        ),
    })
}

fn export_bytes(m: &TriangleMesh, format: ExportFormat) -> Result<Vec<u8>, String> {
    match format {
        ExportFormat::StlBinary => stl_bytes(m, StlFormat::Binary).map_err(msg),
        ExportFormat::StlAscii => stl_bytes(m, StlFormat::Ascii).map_err(msg),
        ExportFormat::Ply => ply_bytes(m).map_err(msg),
        ExportFormat::Wrl => wrl_text(m).map(String::into_bytes).map_err(msg),
    }
}

fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<Vec<PathBuf>, SceneError> {
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        if let Err(source) = fs::write(path, bytes) {
            // leave nothing half-exported behind
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(SceneError::Io {
                path: path.clone(),
                source,
            });
        }
        written.push(path.clone());
    }
    Ok(written)
}

/// Builds every object, checks each one is closed, merges them in object
/// order and writes the exports.
///
/// Nothing is written unless every object passes validation (or is allowed to
/// be open). Objects build concurrently; the output does not depend on the
/// thread count.
pub fn build(scene: &Scene, opts: &BuildOptions) -> Result<BuildOutput, SceneError> {
    if !(opts.quality_scale > 0.0 && opts.quality_scale.is_finite()) {
        return Err(SceneError::Schema(format!(
            "quality scale must be positive, got {}",
            opts.quality_scale
        )));
    }
    let root = Settings {
        base: scene.quality,
        scale: opts.quality_scale,
    };
    let run = || -> Vec<Result<(TriangleMesh, ValidationReport), String>> {
        scene
            .objects
            .par_iter()
            .map(|o| {
                let m = object_mesh(o, &root.for_object(o))?;
                let m = match o.color {
                    Some(c) => m.with_color(c),
                    None => m,
                };
                let r = validate(&m, default_weld_tolerance(&m));
                Ok((m, r))
            })
            .collect()
    };
    let results = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SceneError::Schema(format!("cannot start {n} threads: {e}")))?
            .install(run),
        None => run(),
    };

    let mut per_object = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let (m, report) = r.map_err(|message| SceneError::Build {
            location: scene.label(i),
            message,
        })?;
        if !report.is_printable() && !(opts.allow_open || scene.objects[i].allow_open) {
            return Err(SceneError::NotWatertight {
                location: scene.label(i),
                boundary: report.boundary_edge_count,
                nonmanifold: report.nonmanifold_edge_count,
                consistent: report.orientation_consistent,
            });
        }
        per_object.push(m);
        reports.push(report);
    }
    let (merged, dropped_triangles) =
        merge_with_stats(&per_object, None).map_err(|e| SceneError::Build {
            location: "merge".into(),
            message: e.to_string(),
        })?;

    let mut written_files = Vec::new();
    if opts.write_files && !scene.exports.is_empty() {
        let dir = opts
            .out_dir
            .clone()
            .or_else(|| scene.base_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        let files = scene
            .exports
            .iter()
            .map(|e| {
                let bytes =
                    export_bytes(&merged, e.format).map_err(|message| SceneError::Build {
                        location: format!("export {}", e.path.display()),
                        message,
                    })?;
                Ok((dir.join(&e.path), bytes))
            })
            .collect::<Result<Vec<_>, SceneError>>()?;
        create_dir(&dir)?;
        written_files = write_all(&files)?;
    }
    Ok(BuildOutput {
        merged,
        per_object,
        reports,
        written_files,
        dropped_triangles,
    })
}

fn create_dir(dir: &Path) -> Result<(), SceneError> {
    fs::create_dir_all(dir).map_err(|source| SceneError::Io {
        path: dir.to_path_buf(),
        source,
    })
}
