//! Finite-dimensional real normed spaces.
//!
//! A [`SpaceSpec`] is a composition tree: `l_p` leaves, planar absolute
//! gauges, absolute sums `Y (+)_a W`, `E`-sums over an absolute norm `E`,
//! and duals. Norms of sums are computed by applying the outer absolute
//! norm to the vector of block norms. Because every space here is finite
//! dimensional, the dual of a sum is the sum of the duals over the dual
//! outer norm, so dual norms and norming functionals are available in
//! closed form throughout the tree.

pub mod gauge;
mod chart;
mod json;

use std::ops::Range;
use std::sync::Arc;

pub use gauge::Gauge2d;
pub use json::SpaceJson;

use crate::error::{Error, Result};
use crate::rng;

const UNIT_TOL: f64 = 1e-9;
const KINK_TOL: f64 = 1e-12;
const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    dim: usize,
    kind: Kind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Lp {
        p: f64,
    },
    Gauge2d {
        gauge: Arc<Gauge2d>,
        polar: Arc<Gauge2d>,
    },
    AbsoluteSum {
        outer: Arc<SpaceSpec>,
        left: Arc<SpaceSpec>,
        right: Arc<SpaceSpec>,
    },
    ESum {
        outer: Arc<SpaceSpec>,
        summands: Arc<Vec<SpaceSpec>>,
    },
    Dual {
        of: Arc<SpaceSpec>,
        resolved: Arc<SpaceSpec>,
    },
}

/// `(x, x*, gap)`: a unit vector, a unit functional, and `1 - <x*, x>`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DualityPair {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub gap: f64,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_subgradient(x: &[f64], p: f64, out: &mut [f64]) -> bool {
    let n = x.len();
    if n == 1 {
        out[0] = if x[0] < 0.0 { -1.0 } else { 1.0 };
        return x[0] != 0.0;
    }
    let norm = lp_norm(x, p);
    if norm == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        out[0] = 1.0;
        return false;
    }
    if p == 1.0 {
        let mut smooth = true;
        for (o, v) in out.iter_mut().zip(x) {
            if v.abs() <= KINK_TOL * norm {
                *o = 0.0;
                smooth = false;
            } else {
                *o = v.signum();
            }
        }
        smooth
    } else if p.is_infinite() {
        let mut idx = 0;
        for (i, v) in x.iter().enumerate() {
            if v.abs() > x[idx].abs() {
                idx = i;
            }
        }
        let top = x[idx].abs();
        let smooth = x
            .iter()
            .enumerate()
            .all(|(i, v)| i == idx || v.abs() < top * (1.0 - KINK_TOL));
        out.iter_mut().for_each(|o| *o = 0.0);
        out[idx] = x[idx].signum();
        smooth
    } else if p == 2.0 {
        for (o, v) in out.iter_mut().zip(x) {
            *o = v / norm;
        }
        true
    } else {
        for (o, v) in out.iter_mut().zip(x) {
            *o = v.signum() * (v.abs() / norm).powf(p - 1.0);
        }
        true
    }
}

impl SpaceSpec {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::space("dim", "dimension must be at least 1"));
        }
        if !(p >= 1.0) {
            return Err(Error::space("p", format!("exponent {p} outside [1, inf]")));
        }
        Ok(Self {
            dim,
            kind: Kind::Lp { p },
        })
    }

    /// The real line (any `l_p^1`).
    pub fn real() -> Self {
        Self {
            dim: 1,
            kind: Kind::Lp { p: 1.0 },
        }
    }

    pub fn gauge2d(gauge: Gauge2d) -> Self {
        let polar = Arc::new(gauge.polar());
        Self {
            dim: 2,
            kind: Kind::Gauge2d {
                gauge: Arc::new(gauge),
                polar,
            },
        }
    }

    /// `left (+)_outer right`; `outer` must be a two-dimensional absolute norm.
    pub fn absolute_sum(outer: SpaceSpec, left: SpaceSpec, right: SpaceSpec) -> Result<Self> {
        if outer.dim != 2 {
            return Err(Error::space(
                "outer",
                format!("outer norm must be two-dimensional, got dim {}", outer.dim),
            ));
        }
        if !outer.is_absolute() {
            return Err(Error::space("outer", "outer norm is not absolute"));
        }
        Ok(Self {
            dim: left.dim + right.dim,
            kind: Kind::AbsoluteSum {
                outer: Arc::new(outer),
                left: Arc::new(left),
                right: Arc::new(right),
            },
        })
    }

    /// `[(+) X_i]_E`; `E` must be absolute with `E.dim == summands.len()`.
    pub fn esum(outer: SpaceSpec, summands: Vec<SpaceSpec>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::space("summands", "at least one summand required"));
        }
        if outer.dim != summands.len() {
            return Err(Error::space(
                "summands",
                format!(
                    "E has dimension {} but {} summands were given",
                    outer.dim,
                    summands.len()
                ),
            ));
        }
        if !outer.is_absolute() {
            return Err(Error::space("E", "E-sum requires an absolute norm on E"));
        }
        Ok(Self {
            dim: summands.iter().map(|s| s.dim).sum(),
            kind: Kind::ESum {
                outer: Arc::new(outer),
                summands: Arc::new(summands),
            },
        })
    }

    /// The dual space, kept as a `dual(of)` node.
    pub fn dual_of(of: SpaceSpec) -> Self {
        let resolved = of.build_dual();
        if matches!(resolved.kind, Kind::Dual { .. }) {
            return resolved;
        }
        Self {
            dim: of.dim,
            kind: Kind::Dual {
                of: Arc::new(of),
                resolved: Arc::new(resolved),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Outer norm and summands of a (top-level) sum.
    pub fn sum_parts(&self) -> Option<(&SpaceSpec, Vec<&SpaceSpec>)> {
        match &self.kind {
            Kind::AbsoluteSum { outer, left, right } => Some((outer, vec![&**left, &**right])),
            Kind::ESum { outer, summands } => Some((outer, summands.iter().collect())),
            Kind::Dual { resolved, .. } => resolved.sum_parts(),
            _ => None,
        }
    }

    /// Coordinate ranges of the top-level summands (a single block otherwise).
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self.sum_parts() {
            Some((_, parts)) => {
                let mut start = 0;
                parts
                    .iter()
                    .map(|s| {
                        let r = start..start + s.dim;
                        start += s.dim;
                        r
                    })
                    .collect()
            }
            None => vec![0..self.dim],
        }
    }

    /// Absolute norms: unchanged by coordinate sign flips, unit coordinate vectors.
    pub fn is_absolute(&self) -> bool {
        match &self.kind {
            Kind::Lp { .. } | Kind::Gauge2d { .. } => true,
            Kind::Dual { of, .. } => of.is_absolute(),
            Kind::AbsoluteSum { .. } | Kind::ESum { .. } => {
                let (outer, parts) = self.sum_parts().expect("sum");
                outer.is_absolute() && parts.iter().all(|s| s.dim == 1)
            }
        }
    }

    /// `Some(p)` when the space is isometrically `l_p^dim` in its coordinates.
    pub fn lp_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Lp { p } => Some(if self.dim == 1 { 1.0 } else { *p }),
            Kind::Gauge2d { .. } => None,
            Kind::Dual { of, .. } => of.lp_exponent().map(conjugate_exponent),
            Kind::AbsoluteSum { .. } | Kind::ESum { .. } => {
                let (outer, parts) = self.sum_parts().expect("sum");
                let p = outer.lp_exponent()?;
                let same = |q: f64| q == p || (q.is_infinite() && p.is_infinite());
                if parts
                    .iter()
                    .all(|s| s.dim == 1 || s.lp_exponent().is_some_and(same))
                {
                    Some(p)
                } else {
                    None
                }
            }
        }
        .map(|p| if self.dim == 1 { 1.0 } else { p })
    }

    /// Euclidean of dimension at least two.
    pub fn is_hilbert(&self) -> bool {
        self.dim >= 2 && self.lp_exponent() == Some(2.0)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.eval_norm(x))
    }

    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.check_dim(f.len())?;
        Ok(self.eval_dual_norm(f))
    }

    /// Norm without the dimension check (hot loops).
    pub(crate) fn eval_norm(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lp { p } => lp_norm(x, *p),
            Kind::Gauge2d { gauge, .. } => gauge.norm(x[0], x[1]),
            Kind::Dual { resolved, .. } => resolved.eval_norm(x),
            Kind::AbsoluteSum { outer, left, right } => {
                let a = [
                    left.eval_norm(&x[..left.dim]),
                    right.eval_norm(&x[left.dim..]),
                ];
                outer.eval_norm(&a)
            }
            Kind::ESum { outer, summands } => {
                let mut start = 0;
                let a: Vec<f64> = summands
                    .iter()
                    .map(|s| {
                        let v = s.eval_norm(&x[start..start + s.dim]);
                        start += s.dim;
                        v
                    })
                    .collect();
                outer.eval_norm(&a)
            }
        }
    }

    pub(crate) fn eval_dual_norm(&self, f: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lp { p } => lp_norm(f, conjugate_exponent(*p)),
            Kind::Gauge2d { polar, .. } => polar.norm(f[0], f[1]),
            Kind::Dual { of, .. } => of.eval_norm(f),
            Kind::AbsoluteSum { outer, left, right } => {
                let b = [
                    left.eval_dual_norm(&f[..left.dim]),
                    right.eval_dual_norm(&f[left.dim..]),
                ];
                outer.eval_dual_norm(&b)
            }
            Kind::ESum { outer, summands } => {
                let mut start = 0;
                let b: Vec<f64> = summands
                    .iter()
                    .map(|s| {
                        let v = s.eval_dual_norm(&f[start..start + s.dim]);
                        start += s.dim;
                        v
                    })
                    .collect();
                outer.eval_dual_norm(&b)
            }
        }
    }

    /// Writes a norming functional of `x` (nonzero, any scale) into `out`:
    /// dual norm one and `<out, x> = |x|`. Returns whether the norm is
    /// differentiable at `x`, in which case the functional is unique.
    pub(crate) fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> bool {
        match &self.kind {
            Kind::Lp { p } => lp_subgradient(x, *p, out),
            Kind::Gauge2d { gauge, .. } => {
                let (g, smooth) = gauge.subgradient(x[0], x[1]);
                out[0] = g[0];
                out[1] = g[1];
                smooth
            }
            Kind::Dual { resolved, .. } => resolved.subgradient_into(x, out),
            Kind::AbsoluteSum { .. } | Kind::ESum { .. } => {
                let (outer, parts) = self.sum_parts().expect("sum");
                let mut a = Vec::with_capacity(parts.len());
                let mut start = 0;
                for s in &parts {
                    a.push(s.eval_norm(&x[start..start + s.dim]));
                    start += s.dim;
                }
                let mut b = vec![0.0; parts.len()];
                let mut smooth = outer.subgradient_into(&a, &mut b);
                let mut start = 0;
                for (i, s) in parts.iter().enumerate() {
                    let r = start..start + s.dim;
                    start += s.dim;
                    if b[i] == 0.0 {
                        out[r].iter_mut().for_each(|o| *o = 0.0);
                    } else if a[i] > 0.0 {
                        let ok = s.subgradient_into(&x[r.clone()], &mut out[r.clone()]);
                        smooth &= ok;
                        out[r].iter_mut().for_each(|o| *o *= b[i]);
                    } else {
                        let mut e = vec![0.0; s.dim];
                        e[0] = 1.0;
                        s.subgradient_into(&e, &mut out[r.clone()]);
                        out[r].iter_mut().for_each(|o| *o *= b[i]);
                        smooth = false;
                    }
                }
                smooth
            }
        }
    }

    /// Writes the norming functional of `x` that maximizes `<out, y>` and
    /// returns that maximum, i.e. the one-sided directional derivative of the
    /// norm at `x` along `y`. Coordinates within a relative `1e-9` of a kink
    /// are treated as lying on it.
    pub(crate) fn face_subgradient_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) -> f64 {
        match &self.kind {
            Kind::Lp { p } => {
                let p = if self.dim == 1 { 1.0 } else { *p };
                let norm = lp_norm(x, p);
                if p == 1.0 {
                    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
                        *o = if xi.abs() <= FACE_TOL * norm {
                            if *yi < 0.0 { -1.0 } else { 1.0 }
                        } else {
                            xi.signum()
                        };
                    }
                } else if p.is_infinite() {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    let mut best = (f64::NEG_INFINITY, 0usize, 1.0);
                    for (i, (xi, yi)) in x.iter().zip(y).enumerate() {
                        if xi.abs() >= norm * (1.0 - FACE_TOL) {
                            let s = if *xi < 0.0 { -1.0 } else { 1.0 };
                            if s * yi > best.0 {
                                best = (s * yi, i, s);
                            }
                        }
                    }
                    out[best.1] = best.2;
                } else {
                    lp_subgradient(x, p, out);
                }
                dot(out, y)
            }
            Kind::Gauge2d { gauge, .. } => {
                let g = gauge.face_subgradient(x[0], x[1], [y[0], y[1]], FACE_TOL);
                out[0] = g[0];
                out[1] = g[1];
                dot(out, y)
            }
            Kind::Dual { resolved, .. } => resolved.face_subgradient_into(x, y, out),
            Kind::AbsoluteSum { .. } | Kind::ESum { .. } => {
                let (outer, parts) = self.sum_parts().expect("sum");
                let a: Vec<f64> = self
                    .blocks()
                    .into_iter()
                    .zip(&parts)
                    .map(|(r, s)| s.eval_norm(&x[r]))
                    .collect();
                let total = outer.eval_norm(&a);
                let mut d = vec![0.0; parts.len()];
                for (i, (r, s)) in self.blocks().into_iter().zip(&parts).enumerate() {
                    if a[i] > FACE_TOL * total {
                        d[i] = s.face_subgradient_into(&x[r.clone()], &y[r.clone()], &mut out[r]);
                    } else if y[r.clone()].iter().all(|v| *v == 0.0) {
                        let mut e = vec![0.0; s.dim];
                        e[0] = 1.0;
                        s.subgradient_into(&e, &mut out[r]);
                    } else {
                        // a zero block admits any functional of the dual ball; the
                        // norming functional of y_i maximizes the pairing with y_i
                        s.subgradient_into(&y[r.clone()], &mut out[r.clone()]);
                        d[i] = dot(&out[r.clone()], &y[r]);
                    }
                }
                let mut b = vec![0.0; parts.len()];
                outer.face_subgradient_into(&a, &d, &mut b);
                for (i, r) in self.blocks().into_iter().enumerate() {
                    out[r].iter_mut().for_each(|o| *o *= b[i]);
                }
                dot(out, y)
            }
        }
    }

    /// A norming functional and a smoothness flag, for any nonzero `x`.
    pub fn subgradient(&self, x: &[f64]) -> Result<(Vec<f64>, bool)> {
        self.check_dim(x.len())?;
        let mut out = vec![0.0; self.dim];
        let smooth = self.subgradient_into(x, &mut out);
        Ok((out, smooth))
    }

    /// Norming functional at a unit vector. Errors with [`Error::NonSmooth`]
    /// where the norm is not differentiable; the caller decides how to perturb.
    pub fn norming_functional(&self, x: &[f64]) -> Result<DualityPair> {
        let nx = self.norm(x)?;
        if (nx - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "norming_functional needs a unit vector, |x| = {nx}"
            )));
        }
        let (xstar, smooth) = self.subgradient(x)?;
        if !smooth {
            return Err(Error::NonSmooth(format!(
                "norm is not differentiable at {x:?}"
            )));
        }
        let gap = (1.0 - dot(&xstar, x)).max(0.0);
        Ok(DualityPair {
            x: x.to_vec(),
            xstar,
            gap,
        })
    }

    /// The dual space, built structurally.
    pub fn build_dual(&self) -> SpaceSpec {
        match &self.kind {
            Kind::Lp { p } => SpaceSpec {
                dim: self.dim,
                kind: Kind::Lp {
                    p: conjugate_exponent(*p),
                },
            },
            Kind::Gauge2d { gauge, polar } => SpaceSpec {
                dim: 2,
                kind: Kind::Dual {
                    of: Arc::new(self.clone()),
                    resolved: Arc::new(SpaceSpec {
                        dim: 2,
                        kind: Kind::Gauge2d {
                            gauge: polar.clone(),
                            polar: gauge.clone(),
                        },
                    }),
                },
            },
            Kind::Dual { of, .. } => (**of).clone(),
            Kind::AbsoluteSum { outer, left, right } => SpaceSpec {
                dim: self.dim,
                kind: Kind::AbsoluteSum {
                    outer: Arc::new(outer.build_dual()),
                    left: Arc::new(left.build_dual()),
                    right: Arc::new(right.build_dual()),
                },
            },
            Kind::ESum { outer, summands } => SpaceSpec {
                dim: self.dim,
                kind: Kind::ESum {
                    outer: Arc::new(outer.build_dual()),
                    summands: Arc::new(summands.iter().map(|s| s.build_dual()).collect()),
                },
            },
        }
    }

    /// Deterministic unit vectors: Gaussian directions rescaled by `1/|x|`.
    pub fn sample_sphere(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::rng(seed, rng::streams::SPHERE);
        (0..count).map(|_| self.random_unit(&mut r)).collect()
    }

    pub(crate) fn random_unit(&self, r: &mut rng::Rng) -> Vec<f64> {
        loop {
            let mut x = rng::gaussian_vec(r, self.dim);
            let n = self.eval_norm(&x);
            if n > 0.0 && n.is_finite() {
                x.iter_mut().for_each(|v| *v /= n);
                return x;
            }
        }
    }

    /// Planar gauge behind this space, if it is one (or its dual).
    pub fn as_gauge(&self) -> Option<&Gauge2d> {
        match &self.kind {
            Kind::Gauge2d { gauge, .. } => Some(gauge),
            Kind::Dual { resolved, .. } => resolved.as_gauge(),
            _ => None,
        }
    }

    /// Short human-readable description, e.g. `l2^2 (+)_inf l1^1`.
    pub fn describe(&self) -> String {
        fn p_str(p: f64) -> String {
            if p.is_infinite() {
                "inf".into()
            } else if p.fract() == 0.0 {
                format!("{}", p as i64)
            } else {
                format!("{p}")
            }
        }
        match &self.kind {
            Kind::Lp { .. } if self.dim == 1 => "R".into(),
            Kind::Lp { p } => format!("l{}^{}", p_str(*p), self.dim),
            Kind::Gauge2d { .. } => "gauge2d".into(),
            Kind::Dual { of, .. } => format!("dual({})", of.describe()),
            Kind::AbsoluteSum { outer, left, right } => {
                let o = match outer.lp_exponent() {
                    Some(p) => p_str(p),
                    None => outer.describe(),
                };
                format!("({} (+)_{} {})", left.describe(), o, right.describe())
            }
            Kind::ESum { outer, summands } => format!(
                "[{}]_{}",
                summands
                    .iter()
                    .map(|s| s.describe())
                    .collect::<Vec<_>>()
                    .join(", "),
                outer.describe()
            ),
        }
    }
}
