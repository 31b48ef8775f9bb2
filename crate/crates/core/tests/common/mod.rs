//! Test-only readers for the write-only formats.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

#[derive(Debug, Default)]
pub struct Ply {
    pub vertices: Vec<[f32; 3]>,
    pub colors: Vec<[u8; 3]>,
    pub faces: Vec<Vec<i32>>,
    pub comments: Vec<String>,
}

/// Strict reader for the one PLY layout the library writes.
pub fn parse_ply(bytes: &[u8]) -> Result<Ply, String> {
    let end = b"end_header\n";
    let hlen = bytes
        .windows(end.len())
        .position(|w| w == end)
        .ok_or("no end_header")?
        + end.len();
    let header = std::str::from_utf8(&bytes[..hlen]).map_err(|e| e.to_string())?;
    let mut lines = header.lines();
    if lines.next() != Some("ply") {
        return Err("missing magic".into());
    }
    if lines.next() != Some("format binary_little_endian 1.0") {
        return Err("unsupported format".into());
    }
    let mut out = Ply::default();
    let mut nv = None;
    let mut nf = None;
    let mut props = Vec::new();
    for l in lines {
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.as_slice() {
            ["comment", ..] => out.comments.push(l[8..].to_string()),
            ["element", "vertex", n] => nv = Some(n.parse::<usize>().map_err(|e| e.to_string())?),
            ["element", "face", n] => nf = Some(n.parse::<usize>().map_err(|e| e.to_string())?),
            ["property", ..] => props.push(l.to_string()),
            ["end_header"] => {}
            _ => return Err(format!("unexpected header line `{l}`")),
        }
    }
    let want = [
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "property list uchar int vertex_indices",
    ];
    if props != want {
        return Err(format!("unexpected properties {props:?}"));
    }
    let (nv, nf) = (nv.ok_or("no vertex element")?, nf.ok_or("no face element")?);
    let mut at = hlen;
    let mut take = |n: usize| -> Result<&[u8], String> {
        let s = bytes.get(at..at + n).ok_or("truncated body")?;
        at += n;
        Ok(s)
    };
    for _ in 0..nv {
        let b = take(15)?;
        let f = |k: usize| f32::from_le_bytes(b[4 * k..4 * k + 4].try_into().unwrap());
        out.vertices.push([f(0), f(1), f(2)]);
        out.colors.push([b[12], b[13], b[14]]);
    }
    for _ in 0..nf {
        let n = take(1)?[0] as usize;
        let b = take(4 * n)?;
        let face: Vec<i32> = (0..n)
            .map(|k| i32::from_le_bytes(b[4 * k..4 * k + 4].try_into().unwrap()))
            .collect();
        if face.iter().any(|&i| i < 0 || i as usize >= nv) {
            return Err(format!("face index out of range in {face:?}"));
        }
        out.faces.push(face);
    }
    if at != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - at));
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct Wrl {
    pub points: Vec<[f64; 3]>,
    pub colors: Vec<[f64; 3]>,
    pub faces: Vec<Vec<i64>>,
    pub color_per_vertex: bool,
}

/// Reads the `IndexedFaceSet` fields of a VRML97 file.
pub fn parse_wrl(text: &str) -> Result<Wrl, String> {
    if text.lines().next() != Some("#VRML V2.0 utf8") {
        return Err("missing VRML97 magic".into());
    }
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let spaced = body
        .replace('[', " [ ")
        .replace(']', " ] ")
        .replace('{', " { ")
        .replace('}', " } ")
        .replace(',', " ");
    let toks: Vec<&str> = spaced.split_whitespace().collect();
    let list = |after: &[&str]| -> Result<Vec<f64>, String> {
        let i = toks
            .windows(after.len())
            .position(|w| w == after)
            .ok_or(format!("no {after:?}"))?
            + after.len();
        if toks.get(i) != Some(&"[") {
            return Err(format!("expected [ after {after:?}"));
        }
        let mut v = Vec::new();
        for t in &toks[i + 1..] {
            if *t == "]" {
                return Ok(v);
            }
            v.push(t.parse::<f64>().map_err(|e| format!("{t}: {e}"))?);
        }
        Err("unterminated list".into())
    };
    let mut out = Wrl::default();
    let pts = list(&["Coordinate", "{", "point"])?;
    let cols = list(&["Color", "{", "color"])?;
    let idx = list(&["coordIndex"])?;
    if pts.len() % 3 != 0 || cols.len() % 3 != 0 {
        return Err("ragged triples".into());
    }
    out.points = pts.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    out.colors = cols.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    let mut face = Vec::new();
    for i in idx {
        let i = i as i64;
        if i == -1 {
            out.faces.push(std::mem::take(&mut face));
        } else if i < 0 || i as usize >= out.points.len() {
            return Err(format!("index {i} out of range"));
        } else {
            face.push(i);
        }
    }
    if !face.is_empty() {
        return Err("last face not terminated by -1".into());
    }
    out.color_per_vertex = toks.windows(2).any(|w| w == ["colorPerVertex", "TRUE"]);
    Ok(out)
}
