use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;

/// One halfspace `{x : normal·x <= offset}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A bounded convex polytope in halfspace representation, optionally carrying
/// its vertex list. Degenerate polytopes (a single point) are allowed as
/// region-of-attraction priors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polytope {
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl Polytope {
    /// Axis-aligned box from per-axis bounds.
    pub fn from_box(bounds: &[(f64, f64)]) -> Self {
        let n = bounds.len();
        let mut halfspaces = Vec::with_capacity(2 * n);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut up = alloc::vec![0.0; n];
            up[i] = 1.0;
            halfspaces.push(Halfspace { normal: up, offset: hi });
            let mut dn = alloc::vec![0.0; n];
            dn[i] = -1.0;
            halfspaces.push(Halfspace { normal: dn, offset: -lo });
        }
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1u32 << n) {
            let v: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { bounds[i].1 } else { bounds[i].0 })
                .collect();
            vertices.push(v);
        }
        if n == 2 {
            // CCW order for polygon operations
            vertices = alloc::vec![
                alloc::vec![bounds[0].0, bounds[1].0],
                alloc::vec![bounds[0].1, bounds[1].0],
                alloc::vec![bounds[0].1, bounds[1].1],
                alloc::vec![bounds[0].0, bounds[1].1],
            ];
        }
        Polytope { halfspaces, vertices: Some(vertices) }
    }

    /// Convex polygon from a CCW-ordered 2-D vertex list.
    pub fn from_polygon(vertices: Vec<Vec<f64>>) -> Self {
        assert!(vertices.len() >= 3, "polygon needs at least 3 vertices");
        let n = vertices.len();
        let mut halfspaces = Vec::with_capacity(n);
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            // outward normal of CCW edge a->b
            let normal = alloc::vec![b[1] - a[1], a[0] - b[0]];
            let offset = math::dot(&normal, a);
            halfspaces.push(Halfspace { normal, offset });
        }
        Polytope { halfspaces, vertices: Some(vertices) }
    }

    /// A single point, used as a zero-volume prior.
    pub fn from_point(x: Vec<f64>) -> Self {
        let n = x.len();
        let mut halfspaces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut up = alloc::vec![0.0; n];
            up[i] = 1.0;
            halfspaces.push(Halfspace { normal: up, offset: x[i] });
            let mut dn = alloc::vec![0.0; n];
            dn[i] = -1.0;
            halfspaces.push(Halfspace { normal: dn, offset: -x[i] });
        }
        Polytope { halfspaces, vertices: Some(alloc::vec![x]) }
    }

    pub fn dim(&self) -> usize {
        self.halfspaces
            .first()
            .map(|h| h.normal.len())
            .or_else(|| self.vertices.as_ref().and_then(|v| v.first().map(|p| p.len())))
            .unwrap_or(0)
    }

    /// True when the polytope has no interior (fewer than dim+1 vertices or
    /// coincident vertices).
    pub fn is_degenerate(&self) -> bool {
        match &self.vertices {
            Some(vs) => {
                if vs.len() < self.dim() + 1 {
                    return true;
                }
                let d = self.diameter();
                d == 0.0
            }
            None => false,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| math::dot(&h.normal, x) <= h.offset + tol * (1.0 + math::norm(&h.normal)))
    }

    /// Strict interior membership with margin `tol`.
    pub fn contains_interior(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| math::dot(&h.normal, x) < h.offset - tol * (1.0 + math::norm(&h.normal)))
    }

    /// Indices of halfspaces active at `x` within `tol`.
    pub fn active_at(&self, x: &[f64], tol: f64) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                math::abs(math::dot(&h.normal, x) - h.offset) <= tol * (1.0 + math::norm(&h.normal))
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn on_boundary(&self, x: &[f64], tol: f64) -> bool {
        self.contains(x, tol) && !self.active_at(x, tol).is_empty()
    }

    /// Largest pairwise vertex distance; 0 for a point.
    pub fn diameter(&self) -> f64 {
        let Some(vs) = &self.vertices else { return 0.0 };
        let mut d: f64 = 0.0;
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                let dd = math::dist(&vs[i], &vs[j]);
                if dd > d {
                    d = dd;
                }
            }
        }
        d
    }

    /// Euclidean distance from `x` to the polytope (0 when inside).
    /// Exact for dimensions 1 and 2 (vertex list required in 2-D).
    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.contains(x, 0.0) {
            return 0.0;
        }
        let dim = self.dim();
        let vs = self.vertices.as_ref().expect("distance needs vertex list");
        if dim == 1 {
            let lo = vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            return if x[0] < lo { lo - x[0] } else { x[0] - hi };
        }
        assert_eq!(dim, 2, "exact distance implemented for 1-D and 2-D");
        let n = vs.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let d = segment_distance(&vs[i], &vs[(i + 1) % n], x);
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Checks the halfspace/vertex consistency invariant at tolerance `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        match &self.vertices {
            None => true,
            Some(vs) => vs.iter().all(|v| {
                self.contains(v, tol)
                    && (vs.len() == 1 || self.active_at(v, tol).len() >= self.dim())
            }),
        }
    }
}

fn segment_distance(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
    let ab = math::sub(b, a);
    let ax = math::sub(x, a);
    let len2 = math::dot(&ab, &ab);
    if len2 == 0.0 {
        return math::norm(&ax);
    }
    let t = (math::dot(&ax, &ab) / len2).clamp(0.0, 1.0);
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(ai, d)| ai + t * d).collect();
    math::dist(x, &proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_membership() {
        let p = Polytope::from_box(&[(-1.0, 1.0), (-1.0, 1.0)]);
        assert!(p.contains(&[0.0, 0.0], 0.0));
        assert!(p.contains(&[1.0, 1.0], 1e-12));
        assert!(!p.contains(&[1.1, 0.0], 1e-9));
        assert!(p.contains_interior(&[0.5, 0.5], 1e-9));
        assert!(!p.contains_interior(&[1.0, 0.0], 1e-9));
    }

    #[test]
    fn polygon_halfspaces_ccw() {
        let p = Polytope::from_polygon(alloc::vec![
            alloc::vec![0.0, 0.0],
            alloc::vec![1.0, 0.0],
            alloc::vec![0.0, 1.0],
        ]);
        assert!(p.contains(&[0.25, 0.25], 0.0));
        assert!(!p.contains(&[0.9, 0.9], 1e-9));
        assert!(p.is_consistent(1e-9));
    }

    #[test]
    fn distance_outside_box() {
        let p = Polytope::from_box(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let d = p.distance(&[2.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-12);
        let d = p.distance(&[2.0, 2.0]);
        assert!((d - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn point_polytope_degenerate() {
        let p = Polytope::from_point(alloc::vec![0.0, 0.0]);
        assert!(p.is_degenerate());
        assert!(p.contains(&[0.0, 0.0], 0.0));
        assert!(!p.contains(&[0.1, 0.0], 1e-9));
    }
}
