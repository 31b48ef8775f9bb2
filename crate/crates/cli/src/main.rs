use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use mathsculpt::mesh::{
    bounds, centroid, default_weld_tolerance, enclosed_volume, validate, TriangleMesh,
    ValidationReport,
};
use mathsculpt::meshio::{read_stl, MeshIoError};
use mathsculpt::scene::{build, load_scene_file, BuildOptions, SceneError};

const OK: u8 = 0;
const INVALID: u8 = 1;
const USAGE: u8 = 2;
const IO: u8 = 3;

/// Compile mathematical scenes into printable meshes.
#[derive(Parser)]
#[command(name = "mathsculpt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh every object in a scene and write its exports.
    Build {
        scene: PathBuf,
        /// Directory for the exports [default: the scene file's directory]
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Multiply sample counts and divide cell-area budgets by F
        #[arg(
            long,
            value_name = "F",
            default_value_t = 1.0,
            allow_negative_numbers = true
        )]
        quality_scale: f64,
        /// Worker threads [default: one per core]
        #[arg(long, value_name = "N", env = "MATHSCULPT_THREADS")]
        threads: Option<usize>,
        /// Accept objects whose meshes are not closed
        #[arg(long)]
        allow_open: bool,
    },
    /// Print bounds, centroid, volume and topology of an STL file.
    Info {
        mesh: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Exit 0 if an STL file is watertight and consistently oriented.
    Validate {
        mesh: PathBuf,
        /// Degenerate triangles fail too
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let code = match cli.command {
        Command::Build {
            scene,
            out,
            quality_scale,
            threads,
            allow_open,
        } => {
            let opts = BuildOptions {
                out_dir: out,
                threads,
                quality_scale,
                allow_open,
                ..Default::default()
            };
            cmd_build(&scene, &opts)
        }
        Command::Info { mesh, json } => cmd_info(&mesh, json),
        Command::Validate { mesh, strict } => cmd_validate(&mesh, strict),
    };
    ExitCode::from(code)
}

fn scene_code(e: &SceneError) -> u8 {
    match e {
        SceneError::Io { .. } => IO,
        e if e.is_input_error() => USAGE,
        _ => INVALID,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn cmd_build(path: &Path, opts: &BuildOptions) -> u8 {
    let scene = match load_scene_file(path) {
        Ok(s) => s,
        Err(e) => return fail(scene_code(&e), e),
    };
    let out = match build(&scene, opts) {
        Ok(o) => o,
        Err(e) => return fail(scene_code(&e), e),
    };
    let rows: Vec<[String; 4]> = out
        .per_object
        .iter()
        .zip(&out.reports)
        .enumerate()
        .map(|(i, (m, r))| {
            let name = scene.objects[i]
                .name
                .clone()
                .unwrap_or_else(|| i.to_string());
            let volume = if r.is_printable() {
                format!("{:.6}", enclosed_volume(m))
            } else {
                "-".into()
            };
            [
                name,
                m.triangle_count().to_string(),
                if r.watertight { "yes" } else { "no" }.into(),
                volume,
            ]
        })
        .collect();
    print_table(["object", "triangles", "watertight", "volume"], &rows);
    println!("total: {} triangles", out.merged.triangle_count());
    if out.dropped_triangles > 0 {
        println!(
            "dropped {} degenerate triangles while merging",
            out.dropped_triangles
        );
    }
    for f in &out.written_files {
        println!("wrote {}", f.display());
    }
    OK
}

fn print_table(head: [&str; 4], rows: &[[String; 4]]) {
    let mut w = head.map(str::len);
    for r in rows {
        for k in 0..4 {
            w[k] = w[k].max(r[k].len());
        }
    }
    println!(
        "{:<w0$}  {:>w1$}  {:<w2$}  {:>w3$}",
        head[0],
        head[1],
        head[2],
        head[3],
        w0 = w[0],
        w1 = w[1],
        w2 = w[2],
        w3 = w[3]
    );
    for r in rows {
        println!(
            "{:<w0$}  {:>w1$}  {:<w2$}  {:>w3$}",
            r[0],
            r[1],
            r[2],
            r[3],
            w0 = w[0],
            w1 = w[1],
            w2 = w[2],
            w3 = w[3]
        );
    }
}

fn load_mesh(path: &Path) -> Result<TriangleMesh, u8> {
    read_stl(path).map_err(|e| {
        fail(
            if matches!(e, MeshIoError::Io { .. }) {
                IO
            } else {
                USAGE
            },
            e,
        )
    })
}

fn cmd_info(path: &Path, as_json: bool) -> u8 {
    let m = match load_mesh(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = validate(&m, default_weld_tolerance(&m));
    let b = bounds(&m).expect("read_stl never returns an empty mesh");
    let c = centroid(&m).expect("mesh is not empty");
    let volume = report.is_printable().then(|| enclosed_volume(&m));
    if as_json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        let obj = v.as_object_mut().expect("report is an object");
        obj.insert("bounds".into(), json!({ "min": b.min, "max": b.max }));
        obj.insert(
            "centroid".into(),
            json!({ "point": c.point, "kind": c.kind }),
        );
        obj.insert("volume".into(), volume.map_or(Value::Null, Value::from));
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("value serializes")
        );
        return OK;
    }
    println!("file:                 {}", path.display());
    println!("triangles:            {}", report.triangle_count);
    println!("bounds min:           {}", b.min);
    println!("bounds max:           {}", b.max);
    println!("extent:               {}", b.max - b.min);
    println!(
        "centroid:             {} ({})",
        c.point,
        serde_json::to_value(c.kind).unwrap().as_str().unwrap_or("")
    );
    match volume {
        Some(v) => println!("volume:               {v:.9}"),
        None => println!("volume:               - (mesh is not closed)"),
    }
    print_report(&report);
    OK
}

fn print_report(r: &ValidationReport) {
    println!("watertight:           {}", r.watertight);
    println!("consistent winding:   {}", r.orientation_consistent);
    println!("euler characteristic: {}", r.euler_characteristic);
    println!("components:           {}", r.connected_components);
    println!("boundary edges:       {}", r.boundary_edge_count);
    println!("non-manifold edges:   {}", r.nonmanifold_edge_count);
    println!("degenerate triangles: {}", r.degenerate_triangle_count);
    println!("smallest area:        {:e}", r.min_triangle_area);
}

fn cmd_validate(path: &Path, strict: bool) -> u8 {
    let m = match load_mesh(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let r = validate(&m, default_weld_tolerance(&m));
    print_report(&r);
    for [a, b] in &r.boundary_edges {
        println!("boundary edge {a} -> {b}");
    }
    if r.boundary_edge_count > r.boundary_edges.len() {
        println!(
            "... and {} more boundary edges",
            r.boundary_edge_count - r.boundary_edges.len()
        );
    }
    let ok = r.is_printable() && !(strict && r.degenerate_triangle_count > 0);
    println!(
        "{}",
        if ok {
            "ok: printable"
        } else {
            "FAILED: not printable"
        }
    );
    if ok {
        OK
    } else {
        INVALID
    }
}
