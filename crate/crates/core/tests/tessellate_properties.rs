use std::f64::consts::PI;

use proptest::prelude::*;

use mathsculpt::expr::parse_expression;
use mathsculpt::geom::Vec3;
use mathsculpt::mesh::{enclosed_volume, validate, TriangleMesh};
use mathsculpt::tessellate::{
    graph_surface, parametric_surface, polyhedron, primitive, tube_sweep, Caps, FnCurve,
    GraphDomain, PolyhedronName, PrimitiveSpec, QualityParams, SurfaceMode, TessellateError,
};

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-r..r).prop_map(Vec3::from)
}

fn helix(a: f64, c: f64) -> FnCurve<impl Fn(f64) -> Vec3 + Sync> {
    FnCurve(move |t: f64| Vec3::new(a * t.cos(), a * t.sin(), c * t))
}

fn segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_squared()).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn closed_genus0(r: &mathsculpt::mesh::ValidationReport) -> bool {
    r.watertight && r.orientation_consistent && r.euler_characteristic == 2
}

/// Angle-weighted vertex normals, written out independently of the library.
fn angle_weighted_normals(v: &[Vec3], tris: &[[u32; 3]]) -> Vec<Vec3> {
    let mut acc = vec![Vec3::ZERO; v.len()];
    for t in tris {
        let p = t.map(|i| v[i as usize]);
        let n = (p[1] - p[0]).cross(p[2] - p[0]);
        let n = n / n.norm();
        for k in 0..3 {
            let e1 = p[(k + 1) % 3] - p[k];
            let e2 = p[(k + 2) % 3] - p[k];
            let cos = (e1.dot(e2) / (e1.norm() * e2.norm())).clamp(-1.0, 1.0);
            acc[t[k] as usize] += n * cos.acos();
        }
    }
    acc.into_iter().map(|n| n / n.norm()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tube_walls_stay_at_the_radius(
        a in 0.5f64..2.0,
        c in 0.05f64..0.5,
        turns in 0.5f64..3.0,
        rf in 0.02f64..0.3,
        around in 3usize..40,
        extra in 0usize..60,
    ) {
        // rings tilt by about half the angular step, which must stay under pi/around
        let along = (turns * around as f64 * 2.0).ceil() as usize + 2 + extra;
        let r = rf * a;
        let domain = (0.0, turns * 2.0 * PI);
        let q = QualityParams { points_along: along, points_around: around, ..Default::default() };
        let m = tube_sweep(&helix(a, c), domain, r, &q, false, Caps::None).unwrap();
        prop_assert_eq!(m.vertex_count(), along * around);

        let dense = 64;
        let segs = (along - 1) * dense;
        let poly: Vec<Vec3> = (0..=segs)
            .map(|j| {
                let t = domain.0 + (domain.1 - domain.0) * j as f64 / segs as f64;
                Vec3::new(a * t.cos(), a * t.sin(), c * t)
            })
            .collect();
        let delta = 1e-9 * r;
        let lo = r * (PI / around as f64).cos() - delta;
        for (k, &p) in m.vertices().iter().enumerate() {
            let ring = k / around;
            let from = ring.saturating_sub(1) * dense;
            let to = ((ring + 1) * dense).min(segs);
            let d = (from..to).map(|j| segment_distance(p, poly[j], poly[j + 1])).fold(f64::INFINITY, f64::min);
            prop_assert!(d >= lo && d <= r + delta, "vertex {} at distance {} (r = {})", k, d, r);
        }
    }

    #[test]
    fn graph_shell_offsets_along_normals(
        ax in -1.0f64..1.0,
        by in -1.0f64..1.0,
        t in 0.01f64..0.5,
        n in 4usize..30,
    ) {
        let src = format!("({ax})*sin(x) + ({by})*cos(2*y) + 0.1*x*y");
        let f = parse_expression(&src).unwrap();
        let dom = GraphDomain::Rect { x: (-1.5, 1.5), y: (-1.0, 2.0) };
        let q = QualityParams { points_along: n, ..Default::default() };
        let m = graph_surface(&f, dom, t, &q).unwrap();
        let r = validate(&m, 0.0);
        prop_assert!(closed_genus0(&r), "{:?}", r);

        // the first half of the vertices is the top sheet, the second the bottom
        let nv = m.vertex_count() / 2;
        let v = m.vertices();
        let base: Vec<Vec3> = (0..nv).map(|i| (v[i] + v[i + nv]) * 0.5).collect();
        let top: Vec<[u32; 3]> = m.triangles().iter().copied().filter(|tr| tr.iter().all(|&i| (i as usize) < nv)).collect();
        prop_assert_eq!(top.len(), 2 * (n - 1) * (n - 1));
        let normals = angle_weighted_normals(&base, &top);
        for i in 0..nv {
            let b = base[i];
            let z = ax * b.x.sin() + by * (2.0 * b.y).cos() + 0.1 * b.x * b.y;
            prop_assert!((b.z - z).abs() <= 1e-9, "base sample off the graph by {}", b.z - z);
            prop_assert!((v[i] - (b + normals[i] * (t / 2.0))).norm() <= 1e-9);
            prop_assert!((v[i + nv] - (b - normals[i] * (t / 2.0))).norm() <= 1e-9);
        }
    }

    #[test]
    fn primitives_respect_the_area_budget(
        c in vec3(3.0),
        r in 0.1f64..2.0,
        len in 0.1f64..3.0,
        area in 0.0005f64..0.05,
        around in 6usize..48,
    ) {
        let q = QualityParams { max_cell_area: Some(area), points_around: around, ..Default::default() };
        let axis = Vec3::new(0.2, -0.4, 1.0) * len;
        for spec in [
            PrimitiveSpec::Sphere { center: c, radius: r },
            PrimitiveSpec::Cylinder { p1: c, p2: c + axis, radius: r },
            PrimitiveSpec::Cone { base_center: c, apex: c + axis, radius: r },
        ] {
            let m = primitive(&spec, &q).unwrap();
            for k in 0..m.triangle_count() {
                prop_assert!(m.triangle_area(k) <= area, "{:?}: triangle {} has area {}", spec, k, m.triangle_area(k));
            }
            prop_assert!(closed_genus0(&validate(&m, 0.0)), "{:?}", spec);
        }
    }

    #[test]
    fn closed_generators_have_their_genus(
        c in vec3(3.0),
        radii in prop::array::uniform3(0.1f64..2.0),
        lo in vec3(2.0),
        ext in prop::array::uniform3(0.1f64..3.0),
        edge in 0.1f64..5.0,
        around in 3usize..30,
    ) {
        let q = QualityParams { points_around: around, ..Default::default() };
        let ext = Vec3::from(ext);
        let specs = [
            PrimitiveSpec::Sphere { center: c, radius: radii[0] },
            PrimitiveSpec::Ellipsoid { center: c, radii: Vec3::from(radii) },
            PrimitiveSpec::Cylinder { p1: lo, p2: lo + ext, radius: radii[1] },
            PrimitiveSpec::Cone { base_center: lo, apex: lo + ext, radius: radii[2] },
            PrimitiveSpec::Cuboid { min_corner: lo, max_corner: lo + ext },
        ];
        for spec in specs {
            let m = primitive(&spec, &q).unwrap();
            prop_assert!(closed_genus0(&validate(&m, 0.0)), "{:?}", spec);
            prop_assert!(enclosed_volume(&m) > 0.0);
        }
        for name in PolyhedronName::ALL {
            prop_assert!(closed_genus0(&validate(&polyhedron(name, edge), 0.0)));
        }
    }

    #[test]
    fn tubes_have_their_genus(
        big in 1.5f64..4.0,
        small in 0.05f64..0.5,
        along in 8usize..80,
        around in 3usize..24,
    ) {
        let q = QualityParams { points_along: along, points_around: around, ..Default::default() };
        let circle = FnCurve(move |t: f64| Vec3::new(big * t.cos(), big * t.sin(), 0.0));
        let ring = tube_sweep(&circle, (0.0, 2.0 * PI), small, &q, true, Caps::Flat).unwrap();
        let r = validate(&ring, 0.0);
        prop_assert!(r.watertight && r.orientation_consistent && r.euler_characteristic == 0, "{:?}", r);

        let arc = tube_sweep(&circle, (0.0, PI), small, &q, false, Caps::Flat).unwrap();
        prop_assert!(closed_genus0(&validate(&arc, 0.0)));
        prop_assert!(enclosed_volume(&arc) > 0.0);
    }

    #[test]
    fn parametric_torus_has_genus_one(
        big in 1.5f64..4.0,
        small in 0.1f64..1.0,
        nu in 3usize..60,
        nv in 3usize..40,
    ) {
        let s = move |u: f64, v: f64| -> Result<Vec3, TessellateError> {
            Ok(Vec3::new((big + small * v.cos()) * u.cos(), (big + small * v.cos()) * u.sin(), small * v.sin()))
        };
        let mode = SurfaceMode::Closed { periodic_u: true, periodic_v: true };
        let m = parametric_surface(&s, (0.0, 2.0 * PI), (0.0, 2.0 * PI), mode, [nu, nv], &QualityParams::default()).unwrap();
        let r = validate(&m, 0.0);
        prop_assert!(r.watertight && r.orientation_consistent && r.euler_characteristic == 0, "{:?}", r);
        prop_assert!(enclosed_volume(&m) > 0.0);
    }
}

#[test]
fn shell_of_a_plane_is_a_slab() {
    let f = parse_expression("0.5").unwrap();
    let dom = GraphDomain::Rect {
        x: (0.0, 2.0),
        y: (0.0, 3.0),
    };
    let m: TriangleMesh = graph_surface(
        &f,
        dom,
        0.1,
        &QualityParams {
            points_along: 7,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((enclosed_volume(&m) - 0.6).abs() < 1e-12);
}
