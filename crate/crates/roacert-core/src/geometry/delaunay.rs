//! Incremental 2-D Delaunay triangulation with a symbolic vertex at infinity.
//!
//! Predicates are evaluated on deterministically jittered copies of the
//! coordinates (lexicographic tie-breaking), so cocircular inputs such as box
//! corners triangulate reproducibly.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::math;
use crate::rng::Rng;

pub const INF: usize = usize::MAX;

/// Relative jitter magnitude applied to predicate coordinates.
const JITTER_REL: f64 = 1e-12;

pub struct Triangulator {
    /// Original input coordinates.
    pts: Vec<[f64; 2]>,
    /// Jittered coordinates used in predicates only.
    jit: Vec<[f64; 2]>,
    tris: Vec<[usize; 3]>,
    scale: f64,
    seed: u64,
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// > 0 when `p` lies strictly inside the circumcircle of CCW triangle abc.
fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]) -> f64 {
    let (ax, ay) = (a[0] - p[0], a[1] - p[1]);
    let (bx, by) = (b[0] - p[0], b[1] - p[1]);
    let (cx, cy) = (c[0] - p[0], c[1] - p[1]);
    let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
    ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx)
}

impl Triangulator {
    /// Builds the Delaunay triangulation of `points` (already deduplicated and
    /// lexicographically sorted). Fails when all points are collinear.
    pub fn build(points: &[[f64; 2]], scale: f64, seed: u64) -> Option<Self> {
        if points.len() < 3 {
            return None;
        }
        let mut t = Triangulator {
            pts: points.to_vec(),
            jit: Vec::with_capacity(points.len()),
            tris: Vec::new(),
            scale,
            seed,
        };
        for (i, p) in points.iter().enumerate() {
            t.jit.push(t.jittered(*p, i));
        }
        // first non-collinear triple on jittered coordinates
        let mut third = None;
        for k in 2..t.jit.len() {
            if math::abs(orient(t.jit[0], t.jit[1], t.jit[k])) > 0.0 {
                third = Some(k);
                break;
            }
        }
        let k = third?;
        let (i0, i1, mut i2) = (0usize, 1usize, k);
        let mut i1m = i1;
        if orient(t.jit[i0], t.jit[i1m], t.jit[i2]) < 0.0 {
            core::mem::swap(&mut i1m, &mut i2);
        }
        t.tris.push([i0, i1m, i2]);
        t.tris.push([i1m, i0, INF]);
        t.tris.push([i2, i1m, INF]);
        t.tris.push([i0, i2, INF]);
        for p in 0..t.pts.len() {
            if p == i0 || p == i1m || p == i2 {
                continue;
            }
            t.insert(p);
        }
        Some(t)
    }

    fn jittered(&self, p: [f64; 2], index: usize) -> [f64; 2] {
        let mut r = Rng::new(self.seed ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let m = JITTER_REL * self.scale;
        [
            p[0] + m * (2.0 * r.uniform() - 1.0),
            p[1] + m * (2.0 * r.uniform() - 1.0),
        ]
    }

    fn insert(&mut self, p: usize) {
        let mut cavity: Vec<[usize; 3]> = Vec::new();
        self.tris.retain(|tri| {
            let c = Self::conflicts_static(&self.jit, *tri, p);
            if c {
                cavity.push(*tri);
            }
            !c
        });
        debug_assert!(!cavity.is_empty(), "inserted point conflicts with nothing");
        // boundary = directed edges whose reverse is not in the cavity
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for tri in &cavity {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                if !edges.remove(&(b, a)) {
                    edges.insert((a, b));
                }
            }
        }
        for (a, b) in edges {
            self.tris.push([a, b, p]);
        }
    }

    fn conflicts_static(jit: &[[f64; 2]], tri: [usize; 3], p: usize) -> bool {
        let pp = jit[p];
        if let Some(pos) = tri.iter().position(|&v| v == INF) {
            let a = tri[(pos + 1) % 3];
            let b = tri[(pos + 2) % 3];
            orient(jit[a], jit[b], pp) > 0.0
        } else {
            in_circle(jit[tri[0]], jit[tri[1]], jit[tri[2]], pp) > 0.0
        }
    }

    /// Finite triangles, each oriented CCW on the original coordinates, in a
    /// canonical (sorted) order.
    pub fn finite_triangles(&self) -> Vec<[usize; 3]> {
        let mut out: Vec<[usize; 3]> = self
            .tris
            .iter()
            .filter(|t| !t.contains(&INF))
            .map(|t| {
                let mut t = *t;
                if orient(self.pts[t[0]], self.pts[t[1]], self.pts[t[2]]) < 0.0 {
                    t.swap(1, 2);
                }
                // canonical rotation: smallest index first
                let m = (0..3).min_by_key(|&i| t[i]).unwrap();
                [t[m], t[(m + 1) % 3], t[(m + 2) % 3]]
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Set of undirected finite edges in the triangulation.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        let mut s = BTreeSet::new();
        for t in self.finite_triangles() {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                s.insert((a.min(b), a.max(b)));
            }
        }
        s
    }
}
