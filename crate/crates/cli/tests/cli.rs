use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use mathsculpt::geom::Vec3;
use mathsculpt::mesh::TriangleMesh;
use mathsculpt::meshio::{write_stl, StlFormat};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scene(name: &str) -> PathBuf {
    root().join("scenes").join(name)
}

fn stl_fixture(rel: &str) -> PathBuf {
    root().join("crates/core/tests/fixtures/stl").join(rel)
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mathsculpt"));
    c.args(args).env_remove("MATHSCULPT_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Builds a scene into a fresh directory and returns it with the output.
fn build_into(scene_file: &Path, extra: &[&str]) -> (tempfile::TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["build", p(scene_file), "--out", p(dir.path())];
    args.extend_from_slice(extra);
    let o = run(&args);
    (dir, o)
}

fn write_mesh(dir: &Path, name: &str, v: Vec<Vec3>, t: Vec<[u32; 3]>) -> PathBuf {
    let path = dir.join(name);
    write_stl(
        &TriangleMesh::new(v, t, None).unwrap(),
        &path,
        StlFormat::Binary,
    )
    .unwrap();
    path
}

fn unit_cube_stl(dir: &Path) -> PathBuf {
    let v = (0..8)
        .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    let t = vec![
        [0, 2, 1],
        [1, 2, 3],
        [4, 5, 6],
        [5, 7, 6],
        [0, 1, 4],
        [1, 5, 4],
        [2, 6, 3],
        [3, 6, 7],
        [0, 4, 2],
        [2, 4, 6],
        [1, 3, 5],
        [3, 7, 5],
    ];
    write_mesh(dir, "cube.stl", v, t)
}

#[test]
fn golden_exit_codes() {
    let missing = root().join("scenes/does-not-exist.json");
    let mut cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["build".into(), p(&missing).into()], 3),
        (vec!["build".into(), p(&scene("bad-expr.json")).into()], 2),
        (
            vec!["info".into(), p(&stl_fixture("seven_facets.stl")).into()],
            0,
        ),
        (
            vec![
                "validate".into(),
                p(&stl_fixture("seven_facets.stl")).into(),
            ],
            1,
        ),
        (vec!["info".into(), "no/such/file.stl".into()], 3),
        (vec!["validate".into(), "no/such/file.stl".into()], 3),
        (vec![], 2),
        (vec!["frobnicate".into()], 2),
        (vec!["build".into()], 2),
        (vec!["--help".into()], 0),
        (vec!["--version".into()], 0),
    ];
    for entry in std::fs::read_dir(stl_fixture("malformed")).unwrap() {
        let f = entry.unwrap().path();
        cases.push((vec!["validate".into(), p(&f).into()], 2));
        cases.push((vec!["info".into(), "--json".into(), p(&f).into()], 2));
    }
    for (args, want) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = run(&args);
        assert_eq!(
            code(&o),
            *want,
            "{args:?}\nstdout: {}\nstderr: {}",
            stdout(&o),
            stderr(&o)
        );
    }
}

#[test]
fn every_fixture_scene_has_a_known_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(root().join("scenes")).unwrap() {
        let f = entry.unwrap().path();
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let want = if name == "bad-expr.json" { 2 } else { 0 };
        let o = run(&[
            "build",
            p(&f),
            "--out",
            p(dir.path()),
            "--quality-scale",
            "0.5",
        ]);
        assert_eq!(code(&o), want, "{name}\n{}", stderr(&o));
    }
}

#[test]
fn snowman_writes_two_files_and_a_summary() {
    let (dir, o) = build_into(&scene("snowman.json"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let head = out.lines().next().unwrap();
    for col in ["object", "triangles", "watertight", "volume"] {
        assert!(head.contains(col), "{head}");
    }
    for part in ["snowball1", "tophat2", "button3", "carrot"] {
        assert!(
            out.lines()
                .any(|l| l.starts_with(part) && l.contains("yes")),
            "{out}"
        );
    }
    let mut files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    assert_eq!(files, ["snowman.stl", "snowmanHD.wrl"]);
}

#[test]
fn bad_expression_names_the_object() {
    let o = run(&["build", p(&scene("bad-expr.json"))]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(
        err.contains("object 1 (wobble)") && err.contains("position 5"),
        "{err}"
    );
    assert!(stdout(&o).is_empty());
}

#[test]
fn open_objects_fail_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("pipe.json");
    std::fs::write(
        &doc,
        r#"{"objects": [{"name": "pipe", "kind": "parametric_curve", "x": "t", "y": "0", "z": "0",
            "t": [0, 1], "radius": 0.1, "caps": "none"}],
            "exports": [{"format": "stl_binary", "path": "pipe.stl"}]}"#,
    )
    .unwrap();
    let o = run(&["build", p(&doc)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pipe"), "{}", stderr(&o));
    assert!(!dir.path().join("pipe.stl").exists());

    let o = run(&["build", p(&doc), "--allow-open"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let pipe = dir.path().join("pipe.stl");
    assert!(pipe.exists());

    let o = run(&["validate", p(&pipe)]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("boundary edges:       48"), "{out}");
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with("boundary edge "))
            .count(),
        10
    );
}

#[test]
fn capped_tube_validates() {
    let (dir, o) = build_into(&scene("helix.json"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["validate", p(&dir.path().join("helixHD.stl"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn info_on_unit_cube() {
    let dir = tempfile::tempdir().unwrap();
    let cube = unit_cube_stl(dir.path());
    let o = run(&["info", "--json", p(&cube)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"]["min"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(v["bounds"]["max"], serde_json::json!([1.0, 1.0, 1.0]));
    assert!((v["volume"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["euler_characteristic"], 2);

    let o = run(&["info", p(&cube)]);
    assert!(stdout(&o).contains("watertight:           true"));
}

#[test]
fn info_on_icosphere() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("ball.json");
    std::fs::write(
        &doc,
        r#"{"objects": [{"kind": "sphere", "center": [0,0,0], "radius": 1, "quality": {"max_cell_area": 0.0005}}],
            "exports": [{"format": "stl_binary", "path": "ball.stl"}]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["build", p(&doc)])), 0);
    let o = run(&["info", "--json", p(&dir.path().join("ball.stl"))]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["watertight"], true);
    assert_eq!(v["euler_characteristic"], 2);
    let vol = v["volume"].as_f64().unwrap();
    assert!(
        (vol - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0) < 0.005,
        "{vol}"
    );
}

/// Checks `v` against the subset of JSON Schema the fixture uses.
fn conforms(v: &Value, schema: &Value, at: &str) -> Result<(), String> {
    if let Some(t) = schema.get("type") {
        let names: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{at}: bad schema type")),
        };
        let ok = names.iter().any(|n| match *n {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "number" => v.is_number(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{at}: {v} is not {names:?}"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{at}: {v} not in {e:?}"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{at}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for req in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let k = req.as_str().unwrap();
            if !obj.contains_key(k) {
                return Err(format!("{at}: missing {k}"));
            }
        }
        for (k, x) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(s) => conforms(x, s, &format!("{at}.{k}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{at}: unexpected key {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(items) = v.as_array() {
        let n = items.len() as u64;
        if schema
            .get("minItems")
            .and_then(Value::as_u64)
            .is_some_and(|m| n < m)
            || schema
                .get("maxItems")
                .and_then(Value::as_u64)
                .is_some_and(|m| n > m)
        {
            return Err(format!("{at}: {n} items"));
        }
        if let Some(s) = schema.get("items") {
            for (i, x) in items.iter().enumerate() {
                conforms(x, s, &format!("{at}[{i}]"))?;
            }
        }
    }
    Ok(())
}

#[test]
fn info_json_matches_the_schema_fixture() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/info.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cube = unit_cube_stl(dir.path());
    for f in [cube, stl_fixture("seven_facets.stl")] {
        let o = run(&["info", "--json", p(&f)]);
        let text = stdout(&o);
        let v: Value = serde_json::from_str(&text).unwrap();
        conforms(&v, &schema, "$").unwrap();
        // keys are sorted at every level, and the text is a fixpoint of a reparse
        assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(
            text.find("\"boundary_edge_count\"").unwrap() < text.find("\"watertight\"").unwrap()
        );
    }
    // an open mesh has no volume but still conforms
    let open = write_mesh(
        dir.path(),
        "tri.stl",
        vec![Vec3::ZERO, Vec3::X, Vec3::Y],
        vec![[0, 1, 2]],
    );
    let v: Value = serde_json::from_str(&stdout(&run(&["info", "--json", p(&open)]))).unwrap();
    conforms(&v, &schema, "$").unwrap();
    assert!(v["volume"].is_null());
    assert_eq!(v["centroid"]["kind"], "surface_fallback");
    assert!(conforms(&serde_json::json!({"watertight": true}), &schema, "$").is_err());
}

#[test]
fn strict_rejects_degenerate_triangles() {
    // a tetrahedron whose A-B edge is split at M, with the sliver A-B-M closing the gap
    let (a, b, c, d) = (Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z);
    let m = Vec3::new(0.5, 0.0, 0.0);
    let dir = tempfile::tempdir().unwrap();
    let f = write_mesh(
        dir.path(),
        "sliver.stl",
        vec![a, b, c, d, m],
        vec![
            [0, 2, 1],
            [0, 4, 3],
            [4, 1, 3],
            [0, 3, 2],
            [1, 2, 3],
            [0, 1, 4],
        ],
    );
    let o = run(&["validate", p(&f)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(
        stdout(&o).contains("degenerate triangles: 1"),
        "{}",
        stdout(&o)
    );
    assert_eq!(code(&run(&["validate", "--strict", p(&f)])), 1);
}

#[test]
fn threads_flag_beats_environment() {
    let s = scene("rotate-then-translate.json");
    let dir = tempfile::tempdir().unwrap();
    let base = ["build", p(&s), "--out", p(dir.path())];
    let o = run_env(&base, &[("MATHSCULPT_THREADS", "many")]);
    assert_eq!(code(&o), 2, "a bad environment value is a usage error");
    let mut with_flag = base.to_vec();
    with_flag.extend(["--threads", "1"]);
    assert_eq!(
        code(&run_env(&with_flag, &[("MATHSCULPT_THREADS", "many")])),
        0
    );
    assert_eq!(code(&run_env(&base, &[("MATHSCULPT_THREADS", "2")])), 0);
}

#[test]
fn same_bytes_across_thread_counts() {
    let read = |threads: &str| {
        let (dir, o) = build_into(&scene("closed-spline.json"), &["--threads", threads]);
        assert_eq!(code(&o), 0);
        std::fs::read(dir.path().join("closed-spline.wrl")).unwrap()
    };
    let one = read("1");
    assert_eq!(one, read("1"));
    assert_eq!(one, read("4"));
}

#[test]
fn bad_quality_scale_is_a_usage_error() {
    let (_dir, o) = build_into(
        &scene("rotate-then-translate.json"),
        &["--quality-scale", "-1"],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let (_dir, o) = build_into(
        &scene("rotate-then-translate.json"),
        &["--quality-scale", "lots"],
    );
    assert_eq!(code(&o), 2);
}
