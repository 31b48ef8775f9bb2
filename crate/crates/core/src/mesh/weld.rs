use std::collections::HashMap;

use crate::geom::Vec3;

/// Result of merging points closer than a tolerance.
#[derive(Debug, Clone)]
pub struct Welded {
    /// `remap[i]` is the welded index of input point `i`.
    pub remap: Vec<u32>,
    /// One representative per welded class: its first occurrence.
    pub points: Vec<Vec3>,
}

/// Merges points within `tolerance` of an earlier representative.
///
/// Classes are built greedily in input order, so the output is deterministic.
/// A tolerance of zero merges only bitwise-equal points; a negative one
/// merges nothing.
pub fn weld_points(points: &[Vec3], tolerance: f64) -> Welded {
    let mut remap = Vec::with_capacity(points.len());
    let mut reps: Vec<Vec3> = Vec::new();
    if tolerance < 0.0 {
        return Welded {
            remap: (0..points.len() as u32).collect(),
            points: points.to_vec(),
        };
    }
    if tolerance == 0.0 {
        let mut seen: HashMap<[u64; 3], u32> = HashMap::with_capacity(points.len());
        for p in points {
            let key = [norm_zero(p.x), norm_zero(p.y), norm_zero(p.z)];
            let id = *seen.entry(key).or_insert_with(|| {
                reps.push(*p);
                (reps.len() - 1) as u32
            });
            remap.push(id);
        }
        return Welded {
            remap,
            points: reps,
        };
    }
    let cell = tolerance;
    let key = |p: Vec3| {
        [
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        ]
    };
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::with_capacity(points.len());
    let tol2 = tolerance * tolerance;
    for &p in points {
        let k = key(p);
        // lowest matching id wins, independent of bucket iteration order
        let mut found: Option<u32> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &id in bucket {
                            if (reps[id as usize] - p).norm_squared() <= tol2 {
                                found = Some(found.map_or(id, |f| f.min(id)));
                            }
                        }
                    }
                }
            }
        }
        let id = match found {
            Some(id) => id,
            None => {
                reps.push(p);
                let id = (reps.len() - 1) as u32;
                grid.entry(k).or_default().push(id);
                id
            }
        };
        remap.push(id);
    }
    Welded {
        remap,
        points: reps,
    }
}

fn norm_zero(v: f64) -> u64 {
    // -0.0 and 0.0 are the same point
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_weld() {
        let pts = [Vec3::ZERO, Vec3::X, Vec3::new(-0.0, 0.0, 0.0), Vec3::X];
        let w = weld_points(&pts, 0.0);
        assert_eq!(w.remap, vec![0, 1, 0, 1]);
        assert_eq!(w.points.len(), 2);
    }

    #[test]
    fn tolerance_weld() {
        let pts = [
            Vec3::ZERO,
            Vec3::new(1e-10, 0.0, 0.0),
            Vec3::new(1e-6, 0.0, 0.0),
        ];
        let w = weld_points(&pts, 1e-9);
        assert_eq!(w.remap, vec![0, 0, 1]);
        assert_eq!(w.points[0], Vec3::ZERO);
    }

    #[test]
    fn neighbours_across_cells() {
        // straddles a cell boundary at 0
        let pts = [Vec3::new(-1e-10, 0.0, 0.0), Vec3::new(1e-10, 0.0, 0.0)];
        let w = weld_points(&pts, 1e-9);
        assert_eq!(w.points.len(), 1);
    }
}
