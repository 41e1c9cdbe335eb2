//! Absolute norms on the plane, stored as convex polygons.
//!
//! A table of boundary radii on `[0, pi/2]` is turned into the polygon
//! through those boundary points and extended to the other quadrants by
//! symmetry. Polygon gauges are exactly convex, and their polar (the dual
//! unit ball) is again a polygon whose vertices are the facet normals, so
//! both the norm and the dual norm evaluate in closed form.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Default number of angular intervals for tables built from a norm.
pub const DEFAULT_INTERVALS: usize = 512;

const NORMALIZATION_TOL: f64 = 1e-9;
const SHAPE_TOL: f64 = 1e-10;
const KINK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Gauge2d {
    table: Option<Vec<f64>>,
    /// Boundary chain in the closed positive quadrant, counter-clockwise from (1,0) to (0,1).
    verts: Vec<[f64; 2]>,
    /// `normals[k]` supports the edge `verts[k] -> verts[k+1]`: `normals[k] . v = 1` on it.
    normals: Vec<[f64; 2]>,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl Gauge2d {
    /// Builds a gauge from boundary radii sampled at uniformly spaced angles in `[0, pi/2]`.
    pub fn from_table(samples: &[f64]) -> Result<Self> {
        let field = "samples";
        if samples.len() < 2 {
            return Err(Error::space(field, "need at least two boundary samples"));
        }
        if let Some(i) = samples.iter().position(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::space(
                format!("{field}[{i}]"),
                "boundary radius must be finite and positive",
            ));
        }
        let last = samples.len() - 1;
        if (samples[0] - 1.0).abs() > NORMALIZATION_TOL
            || (samples[last] - 1.0).abs() > NORMALIZATION_TOL
        {
            return Err(Error::space(
                field,
                format!(
                    "not normalized: |e1| = {}, |e2| = {} (both must be 1)",
                    1.0 / samples[0],
                    1.0 / samples[last]
                ),
            ));
        }
        let step = FRAC_PI_2 / last as f64;
        let mut verts: Vec<[f64; 2]> = samples
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let th = k as f64 * step;
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        verts[0] = [1.0, 0.0];
        verts[last] = [0.0, 1.0];

        for k in 1..verts.len() {
            let (p, q) = (verts[k - 1], verts[k]);
            if q[0] > p[0] + SHAPE_TOL || q[1] < p[1] - SHAPE_TOL {
                return Err(Error::space(
                    format!("{field}[{k}]"),
                    "boundary is not monotone in the positive quadrant; the gauge is not absolute",
                ));
            }
        }
        for k in 1..last {
            let (a, b, c) = (verts[k - 1], verts[k], verts[k + 1]);
            let turn = cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
            if turn < -SHAPE_TOL {
                return Err(Error::space(
                    format!("{field}[{k}]"),
                    "boundary is not convex; the table does not describe a norm",
                ));
            }
        }
        let mut g = Self::from_chain(verts);
        g.table = Some(samples.to_vec());
        Ok(g)
    }

    /// Samples `1 / |(cos t, sin t)|` of an absolute norm at `intervals + 1` angles.
    pub fn from_norm_fn<F: Fn(f64, f64) -> f64>(norm: F, intervals: usize) -> Result<Self> {
        let intervals = intervals.max(1);
        let step = FRAC_PI_2 / intervals as f64;
        let samples: Vec<f64> = (0..=intervals)
            .map(|k| {
                let th = k as f64 * step;
                1.0 / norm(th.cos(), th.sin())
            })
            .collect();
        Self::from_table(&samples)
    }

    /// Table of the planar `l_p` norm.
    pub fn lp(p: f64, intervals: usize) -> Result<Self> {
        Self::from_norm_fn(|s, t| super::lp_norm(&[s, t], p), intervals)
    }

    fn from_chain(raw: Vec<[f64; 2]>) -> Self {
        let mut verts: Vec<[f64; 2]> = Vec::with_capacity(raw.len());
        for v in raw {
            if let Some(last) = verts.last() {
                if (v[0] - last[0]).abs() < 1e-15 && (v[1] - last[1]).abs() < 1e-15 {
                    continue;
                }
            }
            while verts.len() >= 2 {
                let a = verts[verts.len() - 2];
                let b = verts[verts.len() - 1];
                let e1 = [b[0] - a[0], b[1] - a[1]];
                let e2 = [v[0] - b[0], v[1] - b[1]];
                let scale = (dot(e1, e1) * dot(e2, e2)).sqrt();
                if cross(e1, e2).abs() <= 1e-9 * scale.max(1e-300) {
                    verts.pop();
                } else {
                    break;
                }
            }
            verts.push(v);
        }
        let normals = verts
            .windows(2)
            .map(|w| {
                let (p, q) = (w[0], w[1]);
                let det = cross(p, q);
                [(q[1] - p[1]) / det, (p[0] - q[0]) / det]
            })
            .collect();
        Self {
            table: None,
            verts,
            normals,
        }
    }

    /// The boundary table this gauge was loaded from, if any.
    pub fn table(&self) -> Option<&[f64]> {
        self.table.as_deref()
    }

    /// Quadrant-I vertices of the unit ball polygon.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    /// Unit ball of the dual norm.
    pub fn polar(&self) -> Self {
        let mut chain = Vec::with_capacity(self.normals.len() + 2);
        chain.push([1.0, 0.0]);
        chain.extend_from_slice(&self.normals);
        chain.push([0.0, 1.0]);
        Self::from_chain(chain)
    }

    fn edge_for(&self, u: [f64; 2]) -> usize {
        // largest k with verts[k] not counter-clockwise of u
        let (mut lo, mut hi) = (0usize, self.normals.len() - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if cross(self.verts[mid], u) >= 0.0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    pub fn norm(&self, s: f64, t: f64) -> f64 {
        let u = [s.abs(), t.abs()];
        if u[0] == 0.0 && u[1] == 0.0 {
            return 0.0;
        }
        dot(self.normals[self.edge_for(u)], u)
    }

    /// A norming functional at `(s, t)` (any element of the subdifferential),
    /// plus whether the norm is differentiable there.
    pub fn subgradient(&self, s: f64, t: f64) -> ([f64; 2], bool) {
        let u = [s.abs(), t.abs()];
        let k = self.edge_for(u);
        let a = self.normals[k];
        let g = [sgn(s) * a[0], sgn(t) * a[1]];
        let un = dot(u, u).sqrt();
        if un == 0.0 {
            return (g, false);
        }
        let near = |v: [f64; 2]| cross(v, u).abs() <= KINK_TOL * un * dot(v, v).sqrt();
        let last = self.normals.len() - 1;
        let mut smooth = true;
        if near(self.verts[k]) {
            smooth = if k == 0 { a[1].abs() <= KINK_TOL } else { false };
        }
        if near(self.verts[k + 1]) {
            smooth = if k == last { a[0].abs() <= KINK_TOL } else { false };
        }
        (g, smooth)
    }

    /// The element `g` of the subdifferential at `(s, t)` maximizing `<g, y>`.
    /// Points within `tol` (relative angle) of a vertex count as the vertex.
    pub fn face_subgradient(&self, s: f64, t: f64, y: [f64; 2], tol: f64) -> [f64; 2] {
        let u = [s.abs(), t.abs()];
        let un = dot(u, u).sqrt();
        let k = self.edge_for(u);
        let near = |v: [f64; 2]| cross(v, u).abs() <= tol * un * dot(v, v).sqrt();
        let last = self.normals.len() - 1;
        let mut cands: Vec<[f64; 2]> = vec![self.normals[k]];
        if k > 0 && near(self.verts[k]) {
            cands.push(self.normals[k - 1]);
        }
        if k < last && near(self.verts[k + 1]) {
            cands.push(self.normals[k + 1]);
        }
        let on_s_axis = un == 0.0 || u[1] <= tol * un;
        let on_t_axis = un == 0.0 || u[0] <= tol * un;
        let mut best = [0.0; 2];
        let mut best_val = f64::NEG_INFINITY;
        for a in cands {
            for fs in [1.0, -1.0] {
                for ft in [1.0, -1.0] {
                    let ss = if on_t_axis { fs } else if fs < 0.0 { continue } else { sgn(s) };
                    let tt = if on_s_axis { ft } else if ft < 0.0 { continue } else { sgn(t) };
                    let g = [ss * a[0], tt * a[1]];
                    let v = dot(g, y);
                    if v > best_val {
                        best_val = v;
                        best = g;
                    }
                }
            }
        }
        best
    }

    /// All vertices of the full (symmetric) unit ball polygon, up to sign.
    pub fn half_ball_vertices(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(2 * self.verts.len());
        out.extend(self.verts.iter().copied());
        out.extend(self.verts.iter().map(|v| [v[0], -v[1]]));
        out
    }

    /// Radius of the unit sphere along angle `theta`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        1.0 / self.norm(theta.cos(), theta.sin())
    }

    /// Uniform-angle boundary table, for serialization.
    pub fn to_table(&self, intervals: usize) -> Vec<f64> {
        if let Some(t) = &self.table {
            return t.clone();
        }
        let step = FRAC_PI_2 / intervals as f64;
        (0..=intervals)
            .map(|k| self.radius_at(k as f64 * step))
            .collect()
    }

    /// Sup-distance between boundary radii on a fine angular grid.
    pub fn table_distance(&self, other: &Gauge2d) -> f64 {
        let n = 2048;
        (0..=n)
            .map(|k| {
                let th = FRAC_PI_2 * k as f64 / n as f64;
                (self.radius_at(th) - other.radius_at(th)).abs()
            })
            .fold(0.0, f64::max)
    }
}
