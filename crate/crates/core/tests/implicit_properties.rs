use proptest::prelude::*;

use mathsculpt::geom::{Aabb, Vec3};
use mathsculpt::implicit::{
    csg_eval, marching_cubes, Continuity, CsgNode, FieldSource, GridSpec, SignedField,
};
use mathsculpt::mesh::{enclosed_volume, validate, TriangleMesh};

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-r..r).prop_map(Vec3::from)
}

/// The same shape with the distance guarantee dropped, so crossings are bisected.
fn weaken(f: SignedField) -> SignedField {
    SignedField::new(
        move |p| f.eval(p),
        Continuity::Continuous,
        FieldSource::Expression,
    )
}

fn leaf(weak: bool) -> impl Strategy<Value = CsgNode> {
    let sphere = (vec3(1.0), 0.3f64..1.0).prop_map(|(c, r)| SignedField::sphere(c, r));
    let cuboid = (vec3(1.0), prop::array::uniform3(0.2f64..1.5))
        .prop_map(|(lo, e)| SignedField::cuboid(lo, lo + Vec3::from(e)));
    prop_oneof![sphere, cuboid].prop_map(move |f| CsgNode::leaf(if weak { weaken(f) } else { f }))
}

fn tree(weak: bool) -> impl Strategy<Value = CsgNode> {
    leaf(weak).prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(CsgNode::Union),
            prop::collection::vec(inner.clone(), 2..4).prop_map(CsgNode::Intersection),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CsgNode::difference(a, b)),
            inner.prop_map(CsgNode::complement),
        ]
    })
}

fn grid(n: usize, jitter: Vec3, iterations: u32) -> GridSpec {
    let b = Aabb::new(Vec3::splat(-2.0) + jitter, Vec3::splat(2.0) + jitter * 0.5);
    GridSpec {
        bisection_iterations: iterations,
        ..GridSpec::cubic(b, n)
    }
}

fn closed(m: &TriangleMesh) -> bool {
    // index topology only: marching cubes shares one vertex per lattice edge
    let r = validate(m, -1.0);
    r.watertight && r.orientation_consistent
}

/// Position of lattice node `g` along `axis` (ghosts at 0 and n + 1).
fn node(g: &GridSpec, axis: usize, k: i64) -> f64 {
    g.bounds.min[axis] + (k as f64 - 0.5) * g.cell_size()[axis]
}

fn lattice_index(g: &GridSpec, axis: usize, x: f64) -> f64 {
    (x - g.bounds.min[axis]) / g.cell_size()[axis] + 0.5
}

fn aligned(g: &GridSpec, axis: usize, x: f64) -> bool {
    let k = lattice_index(g, axis, x);
    (k - k.round()).abs() < 1e-7
}

fn with(v: Vec3, axis: usize, x: f64) -> Vec3 {
    let mut a = [v.x, v.y, v.z];
    a[axis] = x;
    Vec3::from(a)
}

/// Inside test with the ghost layer counted as outside.
fn inside(t: &CsgNode, g: &GridSpec, p: Vec3) -> bool {
    let ghost = (0..3).any(|a| p[a] < g.bounds.min[a] || p[a] > g.bounds.max[a]);
    !ghost && csg_eval(t, p) <= 0.0
}

/// Every vertex sits on a lattice edge whose end nodes disagree; with
/// bisection it also sits between two samples of opposite sign one final
/// bracket apart.
fn check_sampling(
    t: &CsgNode,
    g: &GridSpec,
    m: &TriangleMesh,
    bisected: bool,
) -> Result<(), TestCaseError> {
    let h = g.cell_size();
    for &v in m.vertices() {
        let free: Vec<usize> = (0..3).filter(|&a| !aligned(g, a, v[a])).collect();
        let axis = match free.as_slice() {
            [a] => *a,
            [] => continue,
            _ => {
                return Err(TestCaseError::fail(format!(
                    "{v:?} is not on a lattice edge"
                )))
            }
        };
        let k = lattice_index(g, axis, v[axis]).floor() as i64;
        let (lo, hi) = (
            with(v, axis, node(g, axis, k)),
            with(v, axis, node(g, axis, k + 1)),
        );
        prop_assert_ne!(
            inside(t, g, lo),
            inside(t, g, hi),
            "edge at {:?} does not cross",
            v
        );

        let on_face = (v[axis] - g.bounds.min[axis]).abs() < 1e-12
            || (v[axis] - g.bounds.max[axis]).abs() < 1e-12;
        if bisected && !on_face {
            let w = h[axis] / 2f64.powi(g.bisection_iterations as i32) * 0.5 * (1.0 + 1e-9);
            let (a, b) = (with(v, axis, v[axis] - w), with(v, axis, v[axis] + w));
            prop_assert_ne!(
                csg_eval(t, a) <= 0.0,
                csg_eval(t, b) <= 0.0,
                "no sign change around {:?}",
                v
            );
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_csg_meshes_are_closed(t in tree(false), jitter in vec3(0.2), n in 8usize..28) {
        let m = marching_cubes(&t, &grid(n, jitter, 16)).unwrap();
        prop_assume!(m.triangle_count() > 0);
        prop_assert!(closed(&m), "{:?}", validate(&m, -1.0));
        check_sampling(&t, &grid(n, jitter, 16), &m, false)?;
    }

    #[test]
    fn bisected_crossings_bracket_the_surface(t in tree(true), jitter in vec3(0.2), n in 8usize..24, it in 4u32..20) {
        let g = grid(n, jitter, it);
        let m = marching_cubes(&t, &g).unwrap();
        prop_assume!(m.triangle_count() > 0);
        prop_assert!(closed(&m));
        check_sampling(&t, &g, &m, true)?;
    }

    #[test]
    fn complement_is_an_involution(t in tree(false), pts in prop::collection::vec(vec3(3.0), 50)) {
        let twice = CsgNode::complement(CsgNode::complement(t.clone()));
        for p in pts {
            prop_assert_eq!(csg_eval(&twice, p).to_bits(), csg_eval(&t, p).to_bits());
        }
        let g = grid(12, Vec3::ZERO, 16);
        prop_assert_eq!(marching_cubes(&twice, &g).unwrap(), marching_cubes(&t, &g).unwrap());
    }

    #[test]
    fn difference_is_intersection_with_complement(a in tree(false), b in tree(false), pts in prop::collection::vec(vec3(3.0), 50)) {
        let d = CsgNode::difference(a.clone(), b.clone());
        let i = CsgNode::Intersection(vec![a, CsgNode::complement(b)]);
        for p in pts {
            prop_assert_eq!(csg_eval(&d, p).to_bits(), csg_eval(&i, p).to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inclusion_exclusion(c in vec3(0.8), r1 in 0.6f64..1.0, r2 in 0.6f64..1.0) {
        let a = CsgNode::leaf(SignedField::sphere(Vec3::ZERO, r1));
        let b = CsgNode::leaf(SignedField::sphere(c, r2));
        let g = GridSpec::cubic(Aabb::new(Vec3::splat(-2.0), Vec3::splat(2.0)), 64);
        let vol = |t: &CsgNode| {
            let m = marching_cubes(t, &g).unwrap();
            if m.triangle_count() == 0 { 0.0 } else { enclosed_volume(&m) }
        };
        let (va, vb) = (vol(&a), vol(&b));
        let vu = vol(&CsgNode::Union(vec![a.clone(), b.clone()]));
        let vi = vol(&CsgNode::Intersection(vec![a, b]));
        prop_assert!((vu + vi - va - vb).abs() <= 0.03 * (va + vb), "{} + {} vs {} + {}", vu, vi, va, vb);
    }
}

#[test]
fn overlapping_unit_spheres() {
    let a = CsgNode::leaf(SignedField::sphere(Vec3::ZERO, 1.0));
    let b = CsgNode::leaf(SignedField::sphere(Vec3::new(1.0, 0.0, 0.0), 1.0));
    let g = GridSpec::cubic(
        Aabb::new(Vec3::new(-1.0, -1.5, -1.5), Vec3::new(2.0, 1.5, 1.5)),
        64,
    );
    let lens = marching_cubes(&CsgNode::Intersection(vec![a.clone(), b.clone()]), &g).unwrap();
    let both = marching_cubes(&CsgNode::Union(vec![a, b]), &g).unwrap();
    assert!(closed(&lens) && closed(&both));
    let pi = std::f64::consts::PI;
    assert!((enclosed_volume(&lens) / (5.0 * pi / 12.0) - 1.0).abs() < 0.03);
    assert!((enclosed_volume(&both) / (9.0 * pi / 4.0) - 1.0).abs() < 0.02);
}
