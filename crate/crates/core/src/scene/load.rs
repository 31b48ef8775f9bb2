use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use super::{
    object_label, CsgOp, Export, ExportFormat, ObjectKind, QualityOverride, Scene, SceneError,
    SceneObject, SceneQuality, Transform,
};
use crate::expr::{eval_scalar, parse_expression, to_signed_field, EvalError, Expr, ValueKind};
use crate::geom::{Aabb, Vec3};
use crate::mesh::{ResizeTarget, Rgb};
use crate::tessellate::{Caps, GraphDomain, PolyhedronName, PrimitiveSpec, SurfaceMode};

/// A JSON number, or a string holding a constant expression such as `"pi/2"`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    N(f64),
    S(String),
}

type P3 = [Num; 3];

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawQuality {
    max_cell_area: Option<Num>,
    points_along: Option<usize>,
    points_around: Option<usize>,
    grid_resolution: Option<usize>,
    bisection_iterations: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    name: Option<String>,
    units: Option<String>,
    quality: Option<RawQuality>,
    objects: Vec<Value>,
    #[serde(default)]
    exports: Vec<RawExport>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExport {
    format: RawFormat,
    path: PathBuf,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawFormat {
    StlBinary,
    StlAscii,
    Ply,
    Wrl,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommon {
    name: Option<String>,
    color: Option<String>,
    #[serde(default)]
    transforms: Vec<RawTransform>,
    quality: Option<RawQuality>,
    #[serde(default)]
    allow_open: bool,
}

const COMMON_KEYS: [&str; 5] = ["name", "color", "transforms", "quality", "allow_open"];

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawTransform {
    Rotate {
        angle: Num,
        axis: P3,
        point: Option<P3>,
    },
    Translate(P3),
    Scale {
        factors: RawFactors,
        anchor: Option<P3>,
    },
    Resize(RawResize),
    CenterAtOrigin,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawFactors {
    Uniform(Num),
    PerAxis(P3),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawResize {
    Width(Num),
    Box(P3),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawResolution {
    Cubic(usize),
    PerAxis([usize; 3]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    min: P3,
    max: P3,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawMode {
    Closed,
    Shell,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawCaps {
    Flat,
    None,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawCsgOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawDomain {
    Rect { x: [Num; 2], y: [Num; 2] },
    Disk { center: [Num; 2], radius: Num },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawKind {
    Sphere {
        center: P3,
        radius: Num,
    },
    Ellipsoid {
        center: P3,
        radii: P3,
    },
    Cylinder {
        p1: P3,
        p2: P3,
        radius: Num,
    },
    Cone {
        base_center: P3,
        apex: P3,
        radius: Num,
    },
    Cuboid {
        min_corner: P3,
        max_corner: P3,
    },
    Polyhedron {
        solid: String,
        edge_length: Option<Num>,
    },
    ParametricCurve {
        x: String,
        y: String,
        z: String,
        t: [Num; 2],
        radius: Num,
        #[serde(default)]
        closed: bool,
        caps: Option<RawCaps>,
    },
    BsplineCurve {
        control: Vec<P3>,
        #[serde(default)]
        closed: bool,
        degree: Option<usize>,
        radius: Num,
        caps: Option<RawCaps>,
    },
    GraphSurface {
        f: String,
        domain: RawDomain,
        thickness: Num,
    },
    ParametricSurface {
        x: String,
        y: String,
        z: String,
        u: [Num; 2],
        v: [Num; 2],
        mode: RawMode,
        periodic: Option<[bool; 2]>,
        thickness: Option<Num>,
        samples: Option<[usize; 2]>,
    },
    BsplineSurface {
        control: Vec<Vec<P3>>,
        degree: Option<usize>,
        mode: RawMode,
        periodic: Option<[bool; 2]>,
        thickness: Option<Num>,
        samples: Option<[usize; 2]>,
    },
    IsoShell {
        f: String,
        k: Option<Num>,
        delta: Num,
        #[serde(rename = "box")]
        bounds: RawBox,
        resolution: Option<RawResolution>,
    },
    Region {
        predicate: String,
        #[serde(rename = "box")]
        bounds: RawBox,
        resolution: Option<RawResolution>,
    },
    WireframeOf {
        source: Value,
        thickness: Num,
    },
    Csg {
        op: RawCsgOp,
        children: Vec<Value>,
        #[serde(rename = "box")]
        bounds: Option<RawBox>,
        resolution: Option<RawResolution>,
    },
}

/// Where in the document a value came from, for error messages.
struct Ctx {
    location: String,
}

fn eval_position(e: &EvalError) -> usize {
    match e {
        EvalError::Unbound { span, .. }
        | EvalError::Domain { span, .. }
        | EvalError::NotNumeric { span } => span.start,
    }
}

impl Ctx {
    fn err(&self, field: &str, message: impl Display) -> SceneError {
        SceneError::Field {
            location: format!("{}, field `{field}`", self.location),
            message: message.to_string(),
        }
    }

    fn expr_err(&self, field: &str, position: usize, message: impl Display) -> SceneError {
        let mut message = message.to_string();
        if !message.contains("position") {
            message = format!("{message} (position {position})");
        }
        SceneError::Expr {
            location: self.location.clone(),
            field: field.into(),
            position,
            message,
        }
    }

    fn constant(&self, field: &str, src: &str) -> Result<f64, SceneError> {
        let e = parse_expression(src).map_err(|e| self.expr_err(field, e.position(), e))?;
        e.check_variables(&[])
            .map_err(|e| self.expr_err(field, e.position(), e))?;
        let v = eval_scalar(&e, &HashMap::new())
            .map_err(|e| self.expr_err(field, eval_position(&e), e))?;
        Ok(v)
    }

    fn num(&self, field: &str, n: &Num) -> Result<f64, SceneError> {
        let v = match n {
            Num::N(v) => *v,
            Num::S(s) => self.constant(field, s)?,
        };
        if !v.is_finite() {
            return Err(self.err(field, format!("{v} is not a finite number")));
        }
        Ok(v)
    }

    fn positive(&self, field: &str, n: &Num) -> Result<f64, SceneError> {
        let v = self.num(field, n)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(field, format!("must be positive, got {v}")))
        }
    }

    /// Radians, or degrees when the string ends in `deg`.
    fn angle(&self, field: &str, n: &Num) -> Result<f64, SceneError> {
        if let Num::S(s) = n {
            if let Some(head) = s.trim_end().strip_suffix("deg") {
                return Ok(self.constant(field, head)? * PI / 180.0);
            }
        }
        self.num(field, n)
    }

    fn p3(&self, field: &str, p: &P3) -> Result<Vec3, SceneError> {
        Ok(Vec3::new(
            self.num(field, &p[0])?,
            self.num(field, &p[1])?,
            self.num(field, &p[2])?,
        ))
    }

    fn interval(&self, field: &str, d: &[Num; 2]) -> Result<(f64, f64), SceneError> {
        let (a, b) = (self.num(field, &d[0])?, self.num(field, &d[1])?);
        if a < b {
            Ok((a, b))
        } else {
            Err(self.err(field, format!("interval [{a}, {b}] is empty")))
        }
    }

    fn bounds(&self, field: &str, b: &RawBox) -> Result<Aabb, SceneError> {
        let (min, max) = (self.p3(field, &b.min)?, self.p3(field, &b.max)?);
        if min.x < max.x && min.y < max.y && min.z < max.z {
            Ok(Aabb::new(min, max))
        } else {
            Err(self.err(
                field,
                format!("box min {min} must be below max {max} on every axis"),
            ))
        }
    }

    fn resolution(&self, r: &Option<RawResolution>) -> Result<Option<[usize; 3]>, SceneError> {
        let r = match r {
            None => return Ok(None),
            Some(RawResolution::Cubic(n)) => [*n; 3],
            Some(RawResolution::PerAxis(a)) => *a,
        };
        if r.iter().any(|&n| n < 2) {
            return Err(self.err("resolution", "needs at least 2 samples per axis"));
        }
        Ok(Some(r))
    }

    fn samples(&self, s: Option<[usize; 2]>) -> Result<Option<[usize; 2]>, SceneError> {
        if let Some(s) = s {
            if s[0] < 2 || s[1] < 2 {
                return Err(self.err("samples", "needs at least 2 samples per parameter"));
            }
        }
        Ok(s)
    }

    fn expr(&self, field: &str, src: &str, vars: &[&str]) -> Result<Expr, SceneError> {
        let e = parse_expression(src).map_err(|e| self.expr_err(field, e.position(), e))?;
        e.check_variables(vars)
            .map_err(|e| self.expr_err(field, e.position(), e))?;
        if e.value_kind() != ValueKind::Numeric {
            return Err(self.expr_err(
                field,
                0,
                "expected a numeric expression, found a predicate",
            ));
        }
        Ok(e)
    }

    fn predicate(&self, field: &str, src: &str) -> Result<Expr, SceneError> {
        let e = parse_expression(src).map_err(|e| self.expr_err(field, e.position(), e))?;
        to_signed_field(&e).map_err(|e| self.expr_err(field, e.position(), e))?;
        Ok(e)
    }

    fn coords(&self, src: [&String; 3], vars: &[&str]) -> Result<[Expr; 3], SceneError> {
        Ok([
            self.expr("x", src[0], vars)?,
            self.expr("y", src[1], vars)?,
            self.expr("z", src[2], vars)?,
        ])
    }

    fn quality(&self, q: &RawQuality) -> Result<QualityOverride, SceneError> {
        let max_cell_area = q
            .max_cell_area
            .as_ref()
            .map(|n| self.positive("quality.max_cell_area", n))
            .transpose()?;
        let check = |field: &str, v: Option<usize>, min: usize| match v {
            Some(n) if n < min => Err(self.err(field, format!("must be at least {min}, got {n}"))),
            _ => Ok(v),
        };
        let bisection_iterations = match q.bisection_iterations {
            Some(n) if !(1..=60).contains(&n) => {
                return Err(self.err(
                    "quality.bisection_iterations",
                    format!("must be between 1 and 60, got {n}"),
                ))
            }
            b => b,
        };
        Ok(QualityOverride {
            max_cell_area,
            points_along: check("quality.points_along", q.points_along, 2)?,
            points_around: check("quality.points_around", q.points_around, 3)?,
            grid_resolution: check("quality.grid_resolution", q.grid_resolution, 2)?,
            bisection_iterations,
        })
    }

    fn surface_mode(
        &self,
        mode: &RawMode,
        periodic: Option<[bool; 2]>,
        thickness: &Option<Num>,
    ) -> Result<SurfaceMode, SceneError> {
        match mode {
            RawMode::Closed => {
                if thickness.is_some() {
                    return Err(self.err("thickness", "only applies to shell mode"));
                }
                let [periodic_u, periodic_v] = periodic.unwrap_or([false, false]);
                Ok(SurfaceMode::Closed {
                    periodic_u,
                    periodic_v,
                })
            }
            RawMode::Shell => {
                if periodic.is_some() {
                    return Err(self.err("periodic", "only applies to closed mode"));
                }
                let t = thickness
                    .as_ref()
                    .ok_or_else(|| self.err("thickness", "shell mode needs a thickness"))?;
                Ok(SurfaceMode::Shell {
                    thickness: self.positive("thickness", t)?,
                })
            }
        }
    }

    fn primitive(&self, spec: PrimitiveSpec) -> Result<ObjectKind, SceneError> {
        spec.validate().map_err(|e| SceneError::Field {
            location: self.location.clone(),
            message: e.to_string(),
        })?;
        Ok(ObjectKind::Primitive(spec))
    }
}

fn caps(c: Option<RawCaps>) -> Caps {
    match c {
        Some(RawCaps::None) => Caps::None,
        _ => Caps::Flat,
    }
}

fn parse_object(v: Value, location: String, depth: usize) -> Result<SceneObject, SceneError> {
    if depth > 32 {
        return Err(SceneError::Field {
            location,
            message: "objects nest more than 32 levels deep".into(),
        });
    }
    let Value::Object(mut map) = v else {
        return Err(SceneError::Field {
            location,
            message: "expected a JSON object".into(),
        });
    };
    let mut common = Map::new();
    for key in COMMON_KEYS {
        if let Some(x) = map.remove(key) {
            common.insert(key.into(), x);
        }
    }
    let common: RawCommon =
        serde_json::from_value(Value::Object(common)).map_err(|e| SceneError::Field {
            location: location.clone(),
            message: e.to_string(),
        })?;
    let ctx = Ctx {
        location: object_label_at(&location, common.name.as_deref()),
    };
    if !map.contains_key("kind") {
        return Err(SceneError::Field {
            location: ctx.location,
            message: "missing field `kind`".into(),
        });
    }
    let raw: RawKind =
        serde_json::from_value(Value::Object(map)).map_err(|e| SceneError::Field {
            location: ctx.location.clone(),
            message: e.to_string(),
        })?;

    let color = match &common.color {
        None => None,
        Some(s) => Some(Rgb::parse(s).ok_or_else(|| {
            ctx.err("color", format!("unknown color '{s}' (use white, black, orange, red, green, blue, gray or #RRGGBB)"))
        })?),
    };
    let quality = match &common.quality {
        Some(q) => ctx.quality(q)?,
        None => QualityOverride::default(),
    };
    let transforms = common
        .transforms
        .iter()
        .map(|t| transform(&ctx, t))
        .collect::<Result<_, _>>()?;

    let kind = match raw {
        RawKind::Sphere { center, radius } => ctx.primitive(PrimitiveSpec::Sphere {
            center: ctx.p3("center", &center)?,
            radius: ctx.num("radius", &radius)?,
        })?,
        RawKind::Ellipsoid { center, radii } => ctx.primitive(PrimitiveSpec::Ellipsoid {
            center: ctx.p3("center", &center)?,
            radii: ctx.p3("radii", &radii)?,
        })?,
        RawKind::Cylinder { p1, p2, radius } => ctx.primitive(PrimitiveSpec::Cylinder {
            p1: ctx.p3("p1", &p1)?,
            p2: ctx.p3("p2", &p2)?,
            radius: ctx.num("radius", &radius)?,
        })?,
        RawKind::Cone {
            base_center,
            apex,
            radius,
        } => ctx.primitive(PrimitiveSpec::Cone {
            base_center: ctx.p3("base_center", &base_center)?,
            apex: ctx.p3("apex", &apex)?,
            radius: ctx.num("radius", &radius)?,
        })?,
        RawKind::Cuboid {
            min_corner,
            max_corner,
        } => ctx.primitive(PrimitiveSpec::Cuboid {
            min_corner: ctx.p3("min_corner", &min_corner)?,
            max_corner: ctx.p3("max_corner", &max_corner)?,
        })?,
        RawKind::Polyhedron { solid, edge_length } => {
            let name: PolyhedronName = solid.parse().map_err(|e| ctx.err("solid", e))?;
            let edge_length = match &edge_length {
                Some(n) => ctx.num("edge_length", n)?,
                None => 1.0,
            };
            ctx.primitive(PrimitiveSpec::Polyhedron { name, edge_length })?
        }
        RawKind::ParametricCurve {
            x,
            y,
            z,
            t,
            radius,
            closed,
            caps: c,
        } => ObjectKind::ParametricCurve {
            coords: ctx.coords([&x, &y, &z], &["t"])?,
            t: ctx.interval("t", &t)?,
            radius: ctx.positive("radius", &radius)?,
            closed,
            caps: caps(c),
        },
        RawKind::BsplineCurve {
            control,
            closed,
            degree,
            radius,
            caps: c,
        } => {
            let control: Vec<Vec3> = control
                .iter()
                .map(|p| ctx.p3("control", p))
                .collect::<Result<_, _>>()?;
            let degree = degree.unwrap_or(3);
            if degree == 0 || control.len() < degree + 1 {
                return Err(ctx.err(
                    "control",
                    format!(
                        "degree {degree} needs at least {} control points",
                        degree + 1
                    ),
                ));
            }
            ObjectKind::BsplineCurve {
                control,
                closed,
                degree,
                radius: ctx.positive("radius", &radius)?,
                caps: caps(c),
            }
        }
        RawKind::GraphSurface {
            f,
            domain,
            thickness,
        } => {
            let domain = match domain {
                RawDomain::Rect { x, y } => GraphDomain::Rect {
                    x: ctx.interval("domain.rect.x", &x)?,
                    y: ctx.interval("domain.rect.y", &y)?,
                },
                RawDomain::Disk { center, radius } => GraphDomain::Disk {
                    center: (
                        ctx.num("domain.disk.center", &center[0])?,
                        ctx.num("domain.disk.center", &center[1])?,
                    ),
                    radius: ctx.positive("domain.disk.radius", &radius)?,
                },
            };
            ObjectKind::GraphSurface {
                f: ctx.expr("f", &f, &["x", "y"])?,
                domain,
                thickness: ctx.positive("thickness", &thickness)?,
            }
        }
        RawKind::ParametricSurface {
            x,
            y,
            z,
            u,
            v,
            mode,
            periodic,
            thickness,
            samples,
        } => ObjectKind::ParametricSurface {
            coords: ctx.coords([&x, &y, &z], &["u", "v"])?,
            u: ctx.interval("u", &u)?,
            v: ctx.interval("v", &v)?,
            mode: ctx.surface_mode(&mode, periodic, &thickness)?,
            samples: ctx.samples(samples)?,
        },
        RawKind::BsplineSurface {
            control,
            degree,
            mode,
            periodic,
            thickness,
            samples,
        } => {
            let control: Vec<Vec<Vec3>> = control
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| ctx.p3("control", p))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?;
            let degree = degree.unwrap_or(3);
            let cols = control.first().map_or(0, |r| r.len());
            if control.iter().any(|r| r.len() != cols) {
                return Err(ctx.err("control", "rows differ in length"));
            }
            if degree == 0 || control.len() < degree + 1 || cols < degree + 1 {
                return Err(ctx.err(
                    "control",
                    format!("degree {degree} needs at least a {0}x{0} grid", degree + 1),
                ));
            }
            ObjectKind::BsplineSurface {
                control,
                degree,
                mode: ctx.surface_mode(&mode, periodic, &thickness)?,
                samples: ctx.samples(samples)?,
            }
        }
        RawKind::IsoShell {
            f,
            k,
            delta,
            bounds,
            resolution,
        } => ObjectKind::IsoShell {
            f: ctx.expr("f", &f, &["x", "y", "z"])?,
            k: k.as_ref()
                .map(|k| ctx.num("k", k))
                .transpose()?
                .unwrap_or(0.0),
            delta: ctx.positive("delta", &delta)?,
            bounds: ctx.bounds("box", &bounds)?,
            resolution: ctx.resolution(&resolution)?,
        },
        RawKind::Region {
            predicate,
            bounds,
            resolution,
        } => ObjectKind::Region {
            predicate: ctx.predicate("predicate", &predicate)?,
            bounds: ctx.bounds("box", &bounds)?,
            resolution: ctx.resolution(&resolution)?,
        },
        RawKind::WireframeOf { source, thickness } => {
            let source = parse_object(source, format!("{}, source", ctx.location), depth + 1)?;
            ObjectKind::WireframeOf {
                source: Box::new(source),
                thickness: ctx.positive("thickness", &thickness)?,
            }
        }
        RawKind::Csg {
            op,
            children,
            bounds,
            resolution,
        } => {
            let op = match op {
                RawCsgOp::Union => CsgOp::Union,
                RawCsgOp::Intersection => CsgOp::Intersection,
                RawCsgOp::Difference => CsgOp::Difference,
                RawCsgOp::Complement => CsgOp::Complement,
            };
            let want = match op {
                CsgOp::Difference => Some(2),
                CsgOp::Complement => Some(1),
                _ => None,
            };
            if children.is_empty() || want.is_some_and(|n| n != children.len()) {
                return Err(ctx.err(
                    "children",
                    match want {
                        Some(n) => format!(
                            "this operation takes exactly {n} children, got {}",
                            children.len()
                        ),
                        None => "needs at least one child".to_string(),
                    },
                ));
            }
            let bounds = bounds.as_ref().map(|b| ctx.bounds("box", b)).transpose()?;
            if op == CsgOp::Complement && bounds.is_none() {
                return Err(ctx.err("box", "a complement is unbounded and needs an explicit box"));
            }
            let children = children
                .into_iter()
                .enumerate()
                .map(|(j, c)| parse_object(c, format!("{}, child {j}", ctx.location), depth + 1))
                .collect::<Result<_, _>>()?;
            ObjectKind::Csg {
                op,
                children,
                bounds,
                resolution: ctx.resolution(&resolution)?,
            }
        }
    };
    Ok(SceneObject {
        name: common.name,
        kind,
        color,
        transforms,
        quality,
        allow_open: common.allow_open,
    })
}

fn object_label_at(location: &str, name: Option<&str>) -> String {
    match name {
        Some(n) => format!("{location} ({n})"),
        None => location.to_string(),
    }
}

fn transform(ctx: &Ctx, t: &RawTransform) -> Result<Transform, SceneError> {
    Ok(match t {
        RawTransform::Rotate { angle, axis, point } => {
            let axis = ctx.p3("transforms.rotate.axis", axis)?;
            if axis.norm() == 0.0 {
                return Err(ctx.err("transforms.rotate.axis", "axis must be nonzero"));
            }
            Transform::Rotate {
                angle: ctx.angle("transforms.rotate.angle", angle)?,
                axis,
                point: point
                    .as_ref()
                    .map(|p| ctx.p3("transforms.rotate.point", p))
                    .transpose()?
                    .unwrap_or(Vec3::ZERO),
            }
        }
        RawTransform::Translate(v) => Transform::Translate(ctx.p3("transforms.translate", v)?),
        RawTransform::Scale { factors, anchor } => {
            let factors = match factors {
                RawFactors::Uniform(n) => Vec3::splat(ctx.num("transforms.scale.factors", n)?),
                RawFactors::PerAxis(p) => ctx.p3("transforms.scale.factors", p)?,
            };
            if factors.x == 0.0 || factors.y == 0.0 || factors.z == 0.0 {
                return Err(ctx.err("transforms.scale.factors", "scale factors must be nonzero"));
            }
            let anchor = anchor
                .as_ref()
                .map(|p| ctx.p3("transforms.scale.anchor", p))
                .transpose()?
                .unwrap_or(Vec3::ZERO);
            Transform::Scale { factors, anchor }
        }
        RawTransform::Resize(r) => Transform::Resize(match r {
            RawResize::Width(n) => ResizeTarget::Width(ctx.positive("transforms.resize", n)?),
            RawResize::Box(p) => {
                let b = ctx.p3("transforms.resize", p)?;
                if !(b.x > 0.0 && b.y > 0.0 && b.z > 0.0) {
                    return Err(ctx.err("transforms.resize", "target extents must be positive"));
                }
                ResizeTarget::Box(b)
            }
        }),
        RawTransform::CenterAtOrigin => Transform::CenterAtOrigin,
    })
}

/// Parses and checks a scene document. Every expression is parsed here, so
/// mistakes are reported before anything is built.
pub fn load_scene(text: &str) -> Result<Scene, SceneError> {
    let raw: RawScene = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => SceneError::Schema(e.to_string()),
        _ => SceneError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })?;
    if let Some(u) = &raw.units {
        if u != "mm" {
            return Err(SceneError::Schema(format!(
                "units must be \"mm\", got \"{u}\""
            )));
        }
    }
    if raw.objects.is_empty() {
        return Err(SceneError::Schema(
            "a scene needs at least one object".into(),
        ));
    }
    let top = Ctx {
        location: "scene".into(),
    };
    let quality = match &raw.quality {
        Some(q) => SceneQuality::default().overlay(&top.quality(q)?),
        None => SceneQuality::default(),
    };
    let objects: Vec<SceneObject> = raw
        .objects
        .into_iter()
        .enumerate()
        .map(|(i, v)| parse_object(v, format!("object {i}"), 0))
        .collect::<Result<_, _>>()?;

    let mut seen = HashSet::new();
    let mut exports = Vec::new();
    for e in raw.exports {
        if !seen.insert(e.path.clone()) {
            return Err(SceneError::Schema(format!(
                "export path {} appears more than once",
                e.path.display()
            )));
        }
        let format = match e.format {
            RawFormat::StlBinary => ExportFormat::StlBinary,
            RawFormat::StlAscii => ExportFormat::StlAscii,
            RawFormat::Ply => ExportFormat::Ply,
            RawFormat::Wrl => ExportFormat::Wrl,
        };
        if matches!(format, ExportFormat::Ply | ExportFormat::Wrl) {
            if let Some(i) = objects.iter().position(|o| o.color.is_none()) {
                return Err(SceneError::Field {
                    location: object_label(i, objects[i].name.as_deref()),
                    message: format!(
                        "colored export {} needs a color on every object",
                        e.path.display()
                    ),
                });
            }
        }
        exports.push(Export {
            format,
            path: e.path,
        });
    }
    Ok(Scene {
        name: raw.name.unwrap_or_else(|| "scene".into()),
        quality,
        objects,
        exports,
        base_dir: None,
    })
}

/// Loads a scene file; its directory becomes the scene's base directory.
pub fn load_scene_file(path: &Path) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut scene = load_scene(&text)?;
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    scene.base_dir = Some(dir.to_path_buf());
    Ok(scene)
}
