//! The 256-case marching-cubes triangle table, generated once from face rules.
//!
//! Corner `c` of the unit cell sits at `(c & 1, c >> 1 & 1, c >> 2 & 1)`.
//! On each face the contour segments are fixed by that face's four corner
//! signs alone, with ambiguous faces always separating the inside corners.
//! Neighbouring cells see the same face the same way, so contours match
//! across cells and the output is a closed surface. Each cell's segments chain
//! into loops, and each loop is triangulated without any diagonal joining two
//! crossings on the same cell face; such a diagonal could coincide with a
//! segment or diagonal of the neighbouring cell.

use std::sync::OnceLock;

/// Local edge `e` runs from corner `EDGES[e].0` along axis `EDGES[e].1`.
pub(crate) const EDGES: [(u8, u8); 12] = build_edges();

const fn build_edges() -> [(u8, u8); 12] {
    let mut out = [(0u8, 0u8); 12];
    let mut n = 0;
    let mut axis = 0;
    while axis < 3 {
        let mut c = 0;
        while c < 8 {
            if (c >> axis) & 1 == 0 {
                out[n] = (c as u8, axis as u8);
                n += 1;
            }
            c += 1;
        }
        axis += 1;
    }
    out
}

pub(crate) fn corner_offset(c: u8) -> [usize; 3] {
    [
        (c & 1) as usize,
        ((c >> 1) & 1) as usize,
        ((c >> 2) & 1) as usize,
    ]
}

fn edge_id(a: u8, b: u8) -> u8 {
    let (lo, hi) = (a.min(b), a.max(b));
    let axis = (lo ^ hi).trailing_zeros() as u8;
    EDGES
        .iter()
        .position(|&(c, ax)| c == lo && ax == axis)
        .expect("cube edge") as u8
}

/// Corners of each face in counterclockwise order seen from outside.
fn faces() -> Vec<([u8; 4], (u8, u8))> {
    let mut out = Vec::new();
    for axis in 0..3u8 {
        let b = (axis + 1) % 3;
        let c = (axis + 2) % 3;
        for side in 0..2u8 {
            let corner = |ub: u8, uc: u8| (side << axis) | (ub << b) | (uc << c);
            // e_b × e_c = e_axis, so (b, c) order is counterclockwise around +axis
            let ring = if side == 1 {
                [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)]
            } else {
                [corner(0, 0), corner(0, 1), corner(1, 1), corner(1, 0)]
            };
            out.push((ring, (axis, side)));
        }
    }
    out
}

/// Faces `(axis, side)` that contain local edge `e`.
fn edge_faces(e: u8) -> [(u8, u8); 2] {
    let (c, axis) = EDGES[e as usize];
    let mut out = [(0, 0); 2];
    let mut k = 0;
    for a in 0..3u8 {
        if a != axis {
            out[k] = (a, (c >> a) & 1);
            k += 1;
        }
    }
    out
}

fn share_face(e1: u8, e2: u8) -> bool {
    let f1 = edge_faces(e1);
    edge_faces(e2).iter().any(|f| f1.contains(f))
}

fn edge_midpoint(e: u8) -> [f64; 3] {
    let (c, axis) = EDGES[e as usize];
    let o = corner_offset(c);
    let mut p = [o[0] as f64, o[1] as f64, o[2] as f64];
    p[axis as usize] += 0.5;
    p
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Closed loops of crossing edges for one case, oriented so that the right-hand
/// normal points from inside (bit set) to outside.
pub(crate) fn case_loops(mask: u8) -> Vec<Vec<u8>> {
    let inside = |c: u8| (mask >> c) & 1 == 1;
    let mut next: [Option<u8>; 12] = [None; 12];
    for (ring, _) in faces() {
        let cross: Vec<(usize, bool)> = (0..4)
            .filter_map(|k| {
                let (a, b) = (ring[k], ring[(k + 1) % 4]);
                (inside(a) != inside(b)).then_some((k, inside(b)))
            })
            .collect();
        // pair each out->in crossing with the next in->out crossing going around
        for &(k, entering) in &cross {
            if !entering {
                continue;
            }
            let exit = (1..4)
                .map(|d| (k + d) % 4)
                .find(|j| cross.iter().any(|&(kk, ent)| kk == *j && !ent))
                .expect("every entry has an exit");
            let from = edge_id(ring[k], ring[(k + 1) % 4]);
            let to = edge_id(ring[exit], ring[(exit + 1) % 4]);
            debug_assert!(next[from as usize].is_none());
            next[from as usize] = Some(to);
        }
    }
    let mut seen = [false; 12];
    let mut loops = Vec::new();
    for start in 0..12u8 {
        if seen[start as usize] || next[start as usize].is_none() {
            continue;
        }
        let mut lp = Vec::new();
        let mut e = start;
        while !seen[e as usize] {
            seen[e as usize] = true;
            lp.push(e);
            e = next[e as usize].expect("loops close");
        }
        debug_assert_eq!(e, start);
        loops.push(lp);
    }
    loops
}

/// Minimum-length triangulation of a loop that never uses a diagonal between
/// two crossings on a common face. `None` if no such triangulation exists.
pub(crate) fn triangulate_loop(lp: &[u8]) -> Option<Vec<[u8; 3]>> {
    let n = lp.len();
    if n == 3 {
        return Some(vec![[lp[0], lp[1], lp[2]]]);
    }
    let pts: Vec<[f64; 3]> = lp.iter().map(|&e| edge_midpoint(e)).collect();
    let weight = |i: usize, j: usize| -> f64 {
        if j == i + 1 || (i == 0 && j == n - 1) {
            0.0
        } else if share_face(lp[i], lp[j]) {
            f64::INFINITY
        } else {
            dist(pts[i], pts[j])
        }
    };
    let mut cost = vec![vec![0.0f64; n]; n];
    let mut split = vec![vec![usize::MAX; n]; n];
    for len in 2..n {
        for i in 0..n - len {
            let j = i + len;
            let mut best = f64::INFINITY;
            for k in i + 1..j {
                let c = cost[i][k] + cost[k][j] + weight(i, k) + weight(k, j);
                if c < best {
                    best = c;
                    split[i][j] = k;
                }
            }
            cost[i][j] = best;
        }
    }
    if !cost[0][n - 1].is_finite() {
        return None;
    }
    let mut tris = Vec::with_capacity(n - 2);
    let mut stack = vec![(0, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let k = split[i][j];
        tris.push([lp[i], lp[k], lp[j]]);
        stack.push((i, k));
        stack.push((k, j));
    }
    Some(tris)
}

fn build() -> Vec<Vec<[u8; 3]>> {
    (0..=255u8)
        .map(|mask| {
            case_loops(mask)
                .iter()
                .flat_map(|lp| triangulate_loop(lp).expect("face-safe triangulation exists"))
                .collect()
        })
        .collect()
}

/// Triangles (as local edge ids) for a cell whose inside corners are `mask`.
pub(crate) fn case_triangles(mask: u8) -> &'static [[u8; 3]] {
    static TABLE: OnceLock<Vec<Vec<[u8; 3]>>> = OnceLock::new();
    &TABLE.get_or_init(build)[mask as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for (c, a) in EDGES {
            assert_eq!((c >> a) & 1, 0);
            assert!(seen.insert((c, a)));
        }
    }

    #[test]
    fn every_case_triangulates() {
        for mask in 0..=255u8 {
            for lp in case_loops(mask) {
                assert!(lp.len() >= 3, "case {mask}: loop {lp:?}");
                assert!(triangulate_loop(&lp).is_some(), "case {mask}: loop {lp:?}");
            }
        }
        assert!(case_triangles(0).is_empty());
        assert!(case_triangles(255).is_empty());
    }

    #[test]
    fn single_corner_case() {
        // corner 0 inside: one triangle over the three edges leaving it
        let t = case_triangles(1);
        assert_eq!(t.len(), 1);
        let mut ids = t[0].to_vec();
        ids.sort();
        let mut expect = vec![edge_id(0, 1), edge_id(0, 2), edge_id(0, 4)];
        expect.sort();
        assert_eq!(ids, expect);
    }

    #[test]
    fn crossing_edges_match_sign_changes() {
        for mask in 0..=255u8 {
            let mut used: Vec<u8> = case_triangles(mask).iter().flatten().copied().collect();
            used.sort();
            used.dedup();
            let expect: Vec<u8> = (0..12u8)
                .filter(|&e| {
                    let (c, a) = EDGES[e as usize];
                    ((mask >> c) & 1) != ((mask >> (c | (1 << a))) & 1)
                })
                .collect();
            assert_eq!(used, expect, "case {mask}");
        }
    }
}
