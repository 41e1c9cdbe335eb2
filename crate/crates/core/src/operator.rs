//! Operators on a space: operator norm, numerical radius, adjoint.
//!
//! Sampled estimates are lower bounds. Closed forms exist for `l_1`, `l_2`,
//! `l_inf` and for planar polygon gauges, where both suprema are attained
//! at finitely many extreme points.

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::PatternAscent;
use crate::rng::{self, streams};
use crate::space::{dot, DualityPair, SpaceSpec};

/// Multi-start count for local refinement after sampling.
pub const ASCENT_STARTS: usize = 16;
const PERTURB_SCALE: f64 = 1e-7;
const PERTURB_RETRIES: usize = 8;
const DIVERSE_DIST: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<f64>,
    space: SpaceSpec,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    matrix: Vec<Vec<f64>>,
    space: SpaceSpec,
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>, space: SpaceSpec) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: if matrix.nrows() != space.dim() {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { matrix, space })
    }

    pub fn from_rows(rows: &[Vec<f64>], space: SpaceSpec) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not square: {n} rows but a row has {} entries",
                r.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat), space)
    }

    pub fn zeros(space: SpaceSpec) -> Self {
        let n = space.dim();
        Self {
            matrix: DMatrix::zeros(n, n),
            space,
        }
    }

    pub fn identity(space: SpaceSpec) -> Self {
        let n = space.dim();
        Self {
            matrix: DMatrix::identity(n, n),
            space,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// Same space, different matrix.
    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.shape(), self.matrix.shape());
        Self {
            matrix,
            space: self.space.clone(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.with_matrix(&self.matrix * alpha)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut out = vec![0.0; x.len()];
        matvec(&self.matrix, x, &mut out);
        Ok(out)
    }

    /// Transpose acting on the dual space.
    pub fn adjoint(&self) -> Operator {
        Self {
            matrix: self.matrix.transpose(),
            space: self.space.build_dual(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(s)?;
        Self::from_rows(&j.matrix, j.space)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(OperatorJson {
            matrix: self.rows(),
            space: self.space.clone(),
        })
        .expect("serializable")
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            matrix: self.rows(),
            space: self.space.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        Operator::from_rows(&j.matrix, j.space).map_err(serde::de::Error::custom)
    }
}

pub fn adjoint(t: &Operator) -> Operator {
    t.adjoint()
}

/// `out = m x` for a square column-major matrix.
pub(crate) fn matvec(m: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let a = m.as_slice();
    out.iter_mut().for_each(|o| *o = 0.0);
    for (j, xj) in x.iter().enumerate() {
        if *xj == 0.0 {
            continue;
        }
        let col = &a[j * n..(j + 1) * n];
        for (o, c) in out.iter_mut().zip(col) {
            *o += c * xj;
        }
    }
}

/// `|<x*, m x>|`.
pub(crate) fn pairing(m: &DMatrix<f64>, xstar: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let a = m.as_slice();
    let mut s = 0.0;
    for (j, xj) in x.iter().enumerate() {
        if *xj == 0.0 {
            continue;
        }
        let col = &a[j * n..(j + 1) * n];
        s += xj * dot(col, xstar);
    }
    s.abs()
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The true value is at least this.
    Lower,
    /// The true value is at most this.
    Upper,
    TwoSided,
    /// Outer minimization over an inner lower estimate; see `Estimate::bracket`.
    Bracketed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Unit vector attaining an operator norm.
    Vector { x: Vec<f64> },
    /// Duality pair attaining a numerical radius.
    Pair(DualityPair),
    /// Coefficients `c` with `|T - sum c_k S_k|` attaining a quotient norm.
    Coefficients { c: Vec<f64>, x: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub direction: Direction,
    pub witness: Option<Witness>,
    pub budget: usize,
    pub seed: u64,
    /// `[optimizer value, re-evaluated value]` for bracketed estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
}

impl Estimate {
    fn exact(value: f64, witness: Witness) -> Self {
        Self {
            value,
            direction: Direction::TwoSided,
            witness: Some(witness),
            budget: 0,
            seed: 0,
            bracket: None,
        }
    }
}

/// `|T x|` for a witness vector, `|<x*, T x>|` for a witness pair.
pub fn reevaluate(t: &Operator, w: &Witness) -> f64 {
    match w {
        Witness::Vector { x } => {
            let mut y = vec![0.0; x.len()];
            matvec(&t.matrix, x, &mut y);
            t.space.eval_norm(&y)
        }
        Witness::Pair(p) => pairing(&t.matrix, &p.xstar, &p.x),
        Witness::Coefficients { .. } => f64::NAN,
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    Ok(())
}

/// Exact operator norm where the unit ball has computable extreme points.
pub fn op_norm_closed(t: &Operator) -> Option<Estimate> {
    let m = &t.matrix;
    let n = t.dim();
    if n == 1 {
        return Some(Estimate::exact(m[(0, 0)].abs(), Witness::Vector { x: vec![1.0] }));
    }
    if let Some(g) = t.space.as_gauge() {
        let mut best = (f64::NEG_INFINITY, vec![]);
        for v in g.half_ball_vertices() {
            let val = reevaluate(t, &Witness::Vector { x: v.to_vec() });
            if val > best.0 {
                best = (val, v.to_vec());
            }
        }
        return Some(Estimate::exact(best.0, Witness::Vector { x: best.1 }));
    }
    let p = t.space.lp_exponent()?;
    if p == 2.0 {
        let svd = m.clone().svd(false, true);
        let (k, s) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let vt = svd.v_t.expect("requested");
        let x: Vec<f64> = vt.row(k).iter().copied().collect();
        Some(Estimate::exact(s, Witness::Vector { x }))
    } else if p.is_infinite() {
        let (i, s) = (0..n)
            .map(|i| (i, m.row(i).iter().map(|v| v.abs()).sum::<f64>()))
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let x = (0..n).map(|j| sign(m[(i, j)])).collect();
        Some(Estimate::exact(s, Witness::Vector { x }))
    } else if p == 1.0 {
        let (j, s) = (0..n)
            .map(|j| (j, m.column(j).iter().map(|v| v.abs()).sum::<f64>()))
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let mut x = vec![0.0; n];
        x[j] = 1.0;
        Some(Estimate::exact(s, Witness::Vector { x }))
    } else {
        None
    }
}

/// Nonlinear power iteration `x <- J*(T^t J(T x))`, where `J` picks norming
/// functionals. `|T x|` never decreases; stops at a fixed point.
pub(crate) fn power_ascent(
    m: &DMatrix<f64>,
    space: &SpaceSpec,
    dual: &SpaceSpec,
    x0: &[f64],
    max_iters: usize,
) -> (f64, Vec<f64>) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut y = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut xn = vec![0.0; n];
    matvec(m, &x, &mut y);
    let mut val = space.eval_norm(&y);
    let mt = m.transpose();
    for _ in 0..max_iters {
        if val == 0.0 {
            break;
        }
        space.subgradient_into(&y, &mut phi);
        matvec(&mt, &phi, &mut f);
        if dual.eval_norm(&f) == 0.0 {
            break;
        }
        dual.subgradient_into(&f, &mut xn);
        let scale = space.eval_norm(&xn);
        if scale > 0.0 {
            xn.iter_mut().for_each(|v| *v /= scale);
        }
        matvec(m, &xn, &mut y);
        let next = space.eval_norm(&y);
        if next <= val * (1.0 + 1e-14) {
            matvec(m, &x, &mut y);
            break;
        }
        val = next;
        x.copy_from_slice(&xn);
    }
    (val, x)
}

/// `sup |T x|` over the unit sphere. Closed forms are two-sided; otherwise a
/// lower estimate from `budget` samples refined by power iteration.
pub fn op_norm(t: &Operator, budget: usize, seed: u64) -> Result<Estimate> {
    check_budget(budget)?;
    if let Some(e) = op_norm_closed(t) {
        return Ok(Estimate { budget, seed, ..e });
    }
    Ok(op_norm_sampled(t, budget, seed))
}

/// Sampling-based operator norm even where a closed form exists.
pub fn op_norm_sampled(t: &Operator, budget: usize, seed: u64) -> Estimate {
    let space = &t.space;
    let dual = space.build_dual();
    let n = t.dim();
    let mut r = rng::rng(seed, streams::OPNORM);
    let mut y = vec![0.0; n];
    let mut scored: Vec<(f64, Vec<f64>)> = (0..budget.max(1))
        .map(|_| {
            let x = space.random_unit(&mut r);
            matvec(&t.matrix, &x, &mut y);
            (space.eval_norm(&y), x)
        })
        .collect();
    top_k(&mut scored, ASCENT_STARTS);
    let refined: Vec<(f64, Vec<f64>)> = scored
        .par_iter()
        .map(|(_, x)| power_ascent(&t.matrix, space, &dual, x, 200))
        .collect();
    let (value, x) = refined
        .into_iter()
        .chain(scored)
        .fold((f64::NEG_INFINITY, vec![]), |b, c| if c.0 > b.0 { c } else { b });
    Estimate {
        value,
        direction: Direction::Lower,
        witness: Some(Witness::Vector { x }),
        budget,
        seed,
        bracket: None,
    }
}

/// Keeps the `k` largest entries, ordered by value then by original position.
fn top_k<T>(v: &mut Vec<(f64, T)>, k: usize) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].0.total_cmp(&v[a].0).then(a.cmp(&b)));
    idx.truncate(k);
    let mut keep = vec![false; v.len()];
    let mut rank = vec![0; v.len()];
    for (r, &i) in idx.iter().enumerate() {
        keep[i] = true;
        rank[i] = r;
    }
    let mut out: Vec<(usize, (f64, T))> = v
        .drain(..)
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(i, e)| (rank[i], e))
        .collect();
    out.sort_by_key(|e| e.0);
    v.extend(out.into_iter().map(|e| e.1));
}

/// Keeps up to `k` of the best pairs whose points are pairwise at least
/// `DIVERSE_DIST` apart (up to sign, after Euclidean normalization), then
/// fills with the best remaining ones.
fn diverse_top_k(v: &mut Vec<(f64, DualityPair)>, k: usize) {
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    let unit = |x: &[f64]| {
        let n = dot(x, x).sqrt();
        x.iter().map(|t| t / n).collect::<Vec<_>>()
    };
    let dist = |a: &[f64], b: &[f64]| {
        let (mut dp, mut dm) = (0.0, 0.0);
        for (s, t) in a.iter().zip(b) {
            dp += (s - t) * (s - t);
            dm += (s + t) * (s + t);
        }
        f64::min(dp, dm).sqrt()
    };
    let mut chosen: Vec<usize> = vec![];
    let mut centers: Vec<Vec<f64>> = vec![];
    for (i, (_, p)) in v.iter().enumerate() {
        if chosen.len() == k {
            break;
        }
        let u = unit(&p.x);
        if centers.iter().all(|c| dist(c, &u) >= DIVERSE_DIST) {
            chosen.push(i);
            centers.push(u);
        }
    }
    for i in 0..v.len() {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    let mut keep = chosen.into_iter().peekable();
    let mut idx = 0;
    v.retain(|_| {
        let hit = keep.peek() == Some(&idx);
        if hit {
            keep.next();
        }
        idx += 1;
        hit
    });
}

/// Exact numerical radius on `l_1`, `l_2`, `l_inf` (any dimension).
pub fn numerical_radius_closed(t: &Operator) -> Option<f64> {
    radius_closed_pair(t).map(|(v, _)| v)
}

pub(crate) fn radius_closed_pair(t: &Operator) -> Option<(f64, DualityPair)> {
    let p = t.space.lp_exponent()?;
    let m = &t.matrix;
    let n = t.dim();
    let pair = |x: Vec<f64>, xstar: Vec<f64>| {
        let gap = (1.0 - dot(&x, &xstar)).max(0.0);
        DualityPair { x, xstar, gap }
    };
    if p == 2.0 {
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let (k, v) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        let x: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        Some((v, pair(x.clone(), x)))
    } else if p.is_infinite() {
        let (i, v) = (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
                (i, m[(i, i)].abs() + off)
            })
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let s = sign(m[(i, i)]);
        let x = (0..n)
            .map(|j| if j == i { 1.0 } else { s * sign(m[(i, j)]) })
            .collect();
        let mut xstar = vec![0.0; n];
        xstar[i] = 1.0;
        Some((v, pair(x, xstar)))
    } else if p == 1.0 {
        let (j, v) = (0..n)
            .map(|j| {
                let off: f64 = (0..n).filter(|&i| i != j).map(|i| m[(i, j)].abs()).sum();
                (j, m[(j, j)].abs() + off)
            })
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let s = sign(m[(j, j)]);
        let xstar = (0..n)
            .map(|i| if i == j { 1.0 } else { s * sign(m[(i, j)]) })
            .collect();
        let mut x = vec![0.0; n];
        x[j] = 1.0;
        Some((v, pair(x, xstar)))
    } else {
        None
    }
}

/// Exact numerical radius on a planar polygon gauge: on each facet the
/// norming functional is the facet normal and `x -> <a, T x>` is linear,
/// so the supremum sits at a facet endpoint.
pub fn polygon_radius(t: &Operator) -> Option<(f64, DualityPair)> {
    let g = t.space.as_gauge()?;
    let m = &t.matrix;
    let verts = g.vertices();
    let mut best: Option<(f64, DualityPair)> = None;
    for flip in [1.0, -1.0] {
        for (k, a) in g.normals().iter().enumerate() {
            for e in [verts[k], verts[k + 1]] {
                let x = vec![e[0], flip * e[1]];
                let xstar = vec![a[0], flip * a[1]];
                let v = pairing(m, &xstar, &x);
                if best.as_ref().is_none_or(|b| v > b.0) {
                    let gap = (1.0 - dot(&x, &xstar)).max(0.0);
                    best = Some((v, DualityPair { x, xstar, gap }));
                }
            }
        }
    }
    best
}

fn e_unit(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

/// Closed-form or polygon radius, when either applies.
pub fn numerical_radius_exact(t: &Operator) -> Option<Estimate> {
    radius_closed_pair(t)
        .or_else(|| polygon_radius(t))
        .map(|(v, p)| Estimate::exact(v, Witness::Pair(p)))
}

/// Norming functional at `x`, perturbing up to eight times at kinks.
pub(crate) fn smooth_pair(space: &SpaceSpec, x: &[f64], r: &mut rng::Rng) -> Option<DualityPair> {
    let n = x.len();
    let mut z = x.to_vec();
    let mut phi = vec![0.0; n];
    for attempt in 0..=PERTURB_RETRIES {
        if attempt > 0 {
            for (zi, xi) in z.iter_mut().zip(x) {
                *zi = xi + PERTURB_SCALE * rng::gaussian(r);
            }
            let nz = space.eval_norm(&z);
            z.iter_mut().for_each(|v| *v /= nz);
        }
        if space.subgradient_into(&z, &mut phi) {
            let gap = (1.0 - dot(&phi, &z)).max(0.0);
            return Some(DualityPair {
                x: z,
                xstar: phi,
                gap,
            });
        }
    }
    None
}

/// Draws `count` sphere points and their norming functionals.
/// Returns the smooth pairs and the number of points that stayed kinked.
pub(crate) fn sample_pairs(
    space: &SpaceSpec,
    count: usize,
    seed: u64,
    stream: u64,
) -> (Vec<DualityPair>, usize) {
    let mut r = rng::rng(seed, stream);
    let mut p = rng::rng(seed, stream ^ streams::PERTURB << 32);
    let mut pairs = Vec::with_capacity(count);
    let mut failed = 0;
    for _ in 0..count {
        let x = space.random_unit(&mut r);
        match smooth_pair(space, &x, &mut p) {
            Some(pair) => pairs.push(pair),
            None => failed += 1,
        }
    }
    (pairs, failed)
}

/// Best `|<x*, T x>|` over the norming functionals `x*` of `x`.
/// Writes the attaining functional into `phi`.
pub(crate) fn face_radius(t: &Operator, x: &[f64], phi: &mut [f64]) -> f64 {
    let n = x.len();
    let mut y = vec![0.0; n];
    matvec(&t.matrix, x, &mut y);
    let up = t.space.face_subgradient_into(x, &y, phi);
    y.iter_mut().for_each(|v| *v = -*v);
    let mut alt = vec![0.0; n];
    let down = t.space.face_subgradient_into(x, &y, &mut alt);
    if down > up {
        phi.copy_from_slice(&alt);
        down
    } else {
        up
    }
}

/// Radius objective on unnormalized `z`.
fn radius_objective(t: &Operator, z: &[f64], phi: &mut [f64]) -> f64 {
    let nz = t.space.eval_norm(z);
    if !(nz > 0.0) {
        return 0.0;
    }
    let u: Vec<f64> = z.iter().map(|v| v / nz).collect();
    face_radius(t, &u, phi)
}

/// Pattern ascent alternated with snapping single coordinates to `0` or to
/// `+-max|z_j|` over their group, where absolute norms put their kinks.
pub(crate) fn snap_ascent<F: FnMut(&[f64]) -> f64>(
    ascent: &PatternAscent,
    mut f: F,
    x0: &[f64],
    groups: &[Range<usize>],
) -> Vec<f64> {
    let (mut z, mut fz) = ascent.maximize(&mut f, x0);
    for _ in 0..6 {
        let mut improved = false;
        for g in groups {
            let top = z[g.clone()].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for i in g.clone() {
                for target in [0.0, top, -top] {
                    let old = z[i];
                    z[i] = target;
                    let v = f(&z);
                    if v > fz * (1.0 + 1e-13) {
                        fz = v;
                        improved = true;
                    } else {
                        z[i] = old;
                    }
                }
            }
        }
        if !improved {
            break;
        }
        (z, fz) = ascent.maximize(&mut f, &z);
    }
    z
}

/// Ascent in chart coordinates, then in plain coordinates; returns a unit vector.
fn refine_radius(t: &Operator, ascent: &PatternAscent, x0: &[f64]) -> Vec<f64> {
    let n = t.dim();
    let space = &t.space;
    let mut phi = vec![0.0; n];
    let mut x = vec![0.0; n];
    let z0 = space.chart_coords(x0);
    let z = snap_ascent(
        ascent,
        |z| {
            space.chart_point(z, &mut x);
            radius_objective(t, &x, &mut phi)
        },
        &z0,
        &space.chart_groups(),
    );
    space.chart_point(&z, &mut x);
    let plain = [0..n];
    let z = snap_ascent(ascent, |z| radius_objective(t, z, &mut phi), &x, &plain);
    let nz = space.eval_norm(&z);
    z.iter().map(|v| v / nz).collect()
}

/// Lower estimate of `v(T)`: the best `|<x*, T x>|` over sampled smooth duality
/// pairs with gap at most `delta`, refined by pattern ascent over `x`.
pub fn numerical_radius(t: &Operator, budget: usize, seed: u64, delta: f64) -> Result<Estimate> {
    check_budget(budget)?;
    if !(0.0..=0.1).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside [0, 0.1]")));
    }
    let (mut pairs, failed) = sample_pairs(&t.space, budget, seed, streams::RADIUS);
    // coordinate vectors are extreme points of every polyhedral absolute ball
    let mut pr = rng::rng(seed, streams::PERTURB);
    for j in 0..t.dim() {
        let mut e = e_unit(t.dim(), j);
        e[j] /= t.space.eval_norm(&e);
        pairs.extend(smooth_pair(&t.space, &e, &mut pr));
    }
    if 2 * failed > budget {
        return Err(Error::Numerical(format!(
            "norm is non-differentiable at {failed} of {budget} samples after perturbation; \
             the space is likely degenerate"
        )));
    }
    let mut scored: Vec<(f64, DualityPair)> = pairs
        .into_iter()
        .filter(|p| p.gap <= delta)
        .map(|p| (pairing(&t.matrix, &p.xstar, &p.x), p))
        .collect();
    if scored.is_empty() {
        return Err(Error::Numerical(format!(
            "no duality pair with gap <= {delta} among {budget} samples"
        )));
    }
    diverse_top_k(&mut scored, ASCENT_STARTS);
    let ascent = PatternAscent::default();
    let n = t.dim();
    let refined: Vec<(f64, DualityPair)> = scored
        .par_iter()
        .map(|(_, p)| {
            let mut phi = vec![0.0; n];
            let x = refine_radius(t, &ascent, &p.x);
            face_radius(t, &x, &mut phi);
            // guard against functionals outside the dual ball
            let dn = t.space.eval_dual_norm(&phi);
            if dn > 1.0 + 1e-12 {
                phi.iter_mut().for_each(|v| *v /= dn);
            }
            let gap = (1.0 - dot(&phi, &x)).max(0.0);
            let pair = DualityPair { x, xstar: phi, gap };
            (pairing(&t.matrix, &pair.xstar, &pair.x), pair)
        })
        .filter(|(_, p)| p.gap <= delta)
        .collect();
    let (value, pair) = scored
        .into_iter()
        .chain(refined)
        .fold(None::<(f64, DualityPair)>, |b, c| match b {
            Some(b) if b.0 >= c.0 => Some(b),
            _ => Some(c),
        })
        .expect("nonempty");
    Ok(Estimate {
        value,
        direction: Direction::Lower,
        witness: Some(Witness::Pair(pair)),
        budget,
        seed,
        bracket: None,
    })
}

pub(crate) fn symmetric_part_norm(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Exact `|m|` on spaces with a closed form, without a witness.
pub(crate) fn exact_norm_value(space: &SpaceSpec, m: &DMatrix<f64>) -> Option<f64> {
    let n = space.dim();
    if n == 1 {
        return Some(m[(0, 0)].abs());
    }
    if let Some(g) = space.as_gauge() {
        let mut best = 0.0_f64;
        for v in g.half_ball_vertices() {
            let y = [m[(0, 0)] * v[0] + m[(0, 1)] * v[1], m[(1, 0)] * v[0] + m[(1, 1)] * v[1]];
            best = best.max(g.norm(y[0], y[1]));
        }
        return Some(best);
    }
    let p = space.lp_exponent()?;
    if p == 2.0 {
        Some(m.singular_values().max())
    } else if p.is_infinite() {
        Some((0..n).map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max))
    } else if p == 1.0 {
        Some((0..n).map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max))
    } else {
        None
    }
}

/// Exact `v(m)` on spaces with a closed form or a polygon gauge, without a witness.
pub(crate) fn exact_radius_value(space: &SpaceSpec, m: &DMatrix<f64>) -> Option<f64> {
    let n = space.dim();
    if n == 1 {
        return Some(m[(0, 0)].abs());
    }
    if let Some(g) = space.as_gauge() {
        let verts = g.vertices();
        let mut best = 0.0_f64;
        for flip in [1.0, -1.0] {
            for (k, a) in g.normals().iter().enumerate() {
                let a = [a[0], flip * a[1]];
                // row vector a^T m
                let r = [a[0] * m[(0, 0)] + a[1] * m[(1, 0)], a[0] * m[(0, 1)] + a[1] * m[(1, 1)]];
                for e in [verts[k], verts[k + 1]] {
                    best = best.max((r[0] * e[0] + r[1] * flip * e[1]).abs());
                }
            }
        }
        return Some(best);
    }
    let p = space.lp_exponent()?;
    if p == 2.0 {
        Some(symmetric_part_norm(m))
    } else if p.is_infinite() {
        Some(
            (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>())
                .fold(0.0, f64::max),
        )
    } else if p == 1.0 {
        Some(
            (0..n)
                .map(|j| (0..n).map(|i| m[(i, j)].abs()).sum::<f64>())
                .fold(0.0, f64::max),
        )
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Gauge2d;
    use approx::assert_abs_diff_eq;

    fn op(rows: &[&[f64]], space: SpaceSpec) -> Operator {
        Operator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), space).unwrap()
    }

    fn l(n: usize, p: f64) -> SpaceSpec {
        SpaceSpec::lp(n, p).unwrap()
    }

    fn l2_sum_inf_r() -> SpaceSpec {
        SpaceSpec::absolute_sum(l(2, f64::INFINITY), l(2, 2.0), SpaceSpec::real()).unwrap()
    }

    #[test]
    fn rejects_non_square_and_mismatched_matrices() {
        assert!(Operator::from_rows(&[vec![1.0, 2.0]], l(2, 2.0)).is_err());
        assert!(matches!(
            Operator::from_rows(&[vec![1.0]], l(2, 2.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn op_norm_examples() {
        let rot = op(&[&[0.0, 1.0], &[-1.0, 0.0]], l(2, 2.0));
        let e = op_norm(&rot, 100, 0).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-12);
        assert_eq!(e.direction, Direction::TwoSided);

        let t = op(&[&[1.0, 1.0], &[0.0, 0.0]], l(2, f64::INFINITY));
        assert_abs_diff_eq!(op_norm(&t, 100, 0).unwrap().value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn op_norm_of_t1_matches_brute_force() {
        let s2 = 2f64.sqrt();
        let t = op(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, s2], &[0.0, 0.0, 0.0]], l2_sum_inf_r());
        let e = op_norm(&t, 2000, 3).unwrap();
        assert_eq!(e.direction, Direction::Lower);
        // oracle: raw sphere sampling, no refinement
        let brute = t
            .space()
            .sample_sphere(200_000, 99)
            .iter()
            .map(|x| t.space().norm(&t.apply(x).unwrap()).unwrap())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(brute, 3f64.sqrt(), epsilon = 1e-2);
        assert_abs_diff_eq!(e.value, 3f64.sqrt(), epsilon = 1e-9);
        let w = e.witness.unwrap();
        assert_abs_diff_eq!(reevaluate(&t, &w), e.value, epsilon = 1e-9);
    }

    #[test]
    fn closed_op_norms_match_sampling() {
        let mut r = rng::rng(5, 0);
        for p in [1.0, 2.0, f64::INFINITY] {
            for n in 2..=4 {
                let m = DMatrix::from_fn(n, n, |_, _| rng::gaussian(&mut r));
                let t = Operator::new(m, l(n, p)).unwrap();
                let exact = op_norm_closed(&t).unwrap();
                let sampled = op_norm_sampled(&t, 3000, 1);
                assert!(sampled.value <= exact.value + 1e-9);
                assert_abs_diff_eq!(sampled.value, exact.value, epsilon = 1e-6);
                assert_abs_diff_eq!(
                    reevaluate(&t, exact.witness.as_ref().unwrap()),
                    exact.value,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn gauge_op_norm_is_exact() {
        let g = SpaceSpec::gauge2d(Gauge2d::lp(3.0, 64).unwrap());
        let t = op(&[&[0.3, -1.2], &[0.8, 0.5]], g);
        let exact = op_norm(&t, 10, 0).unwrap();
        let sampled = op_norm_sampled(&t, 5000, 2);
        assert!(sampled.value <= exact.value + 1e-12);
        assert_abs_diff_eq!(sampled.value, exact.value, epsilon = 1e-9);
    }

    #[test]
    fn radius_examples() {
        let rot = op(&[&[0.0, 1.0], &[-1.0, 0.0]], l(2, 2.0));
        let e = numerical_radius(&rot, 2000, 1, 1e-6).unwrap();
        assert_abs_diff_eq!(e.value, 0.0, epsilon = 1e-12);

        let nil = op(&[&[0.0, 1.0], &[0.0, 0.0]], l(2, 2.0));
        let e = numerical_radius(&nil, 2000, 1, 1e-6).unwrap();
        // oracle: top eigenvalue of the symmetric part [[0, .5], [.5, 0]]
        let oracle = SymmetricEigen::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]))
            .eigenvalues
            .max();
        assert_abs_diff_eq!(e.value, oracle, epsilon = 1e-6);
        assert_abs_diff_eq!(reevaluate(&nil, e.witness.as_ref().unwrap()), e.value, epsilon = 1e-12);

        let swap = op(&[&[0.0, 1.0], &[1.0, 0.0]], l(2, f64::INFINITY));
        let e = numerical_radius(&swap, 2000, 1, 1e-6).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-6);
        assert_eq!(numerical_radius_closed(&swap), Some(1.0));
    }

    #[test]
    fn closed_radius_examples() {
        let mut r = rng::rng(8, 0);
        let a = DMatrix::from_fn(3, 3, |_, _| rng::gaussian(&mut r));
        let skew = Operator::new(&a - a.transpose(), l(3, 2.0)).unwrap();
        assert_abs_diff_eq!(numerical_radius_closed(&skew).unwrap(), 0.0, epsilon = 1e-12);

        let d = op(&[&[2.0, 0.0], &[0.0, -1.0]], l(2, 2.0));
        assert_abs_diff_eq!(numerical_radius_closed(&d).unwrap(), 2.0, epsilon = 1e-12);

        let u1 = op(&[&[0.0, 1.0], &[0.0, 0.0]], l(2, 1.0));
        assert_eq!(numerical_radius_closed(&u1), Some(1.0));
        assert_eq!(numerical_radius_closed(&op(&[&[1.0, 0.0], &[0.0, 1.0]], l(2, 3.0))), None);
    }

    #[test]
    fn closed_radius_witnesses_are_exact_pairs() {
        let mut r = rng::rng(9, 0);
        for p in [1.0, 2.0, f64::INFINITY] {
            let m = DMatrix::from_fn(4, 4, |_, _| rng::gaussian(&mut r));
            let t = Operator::new(m, l(4, p)).unwrap();
            let e = numerical_radius_exact(&t).unwrap();
            let Some(Witness::Pair(pair)) = &e.witness else { panic!() };
            assert_abs_diff_eq!(t.space().norm(&pair.x).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.space().dual_norm(&pair.xstar).unwrap(), 1.0, epsilon = 1e-12);
            assert!(pair.gap < 1e-12);
            assert_abs_diff_eq!(reevaluate(&t, e.witness.as_ref().unwrap()), e.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_radius_agrees_with_closed_forms() {
        let mut r = rng::rng(10, 0);
        for p in [1.0, 2.0, f64::INFINITY] {
            for n in [2, 3, 5] {
                let m = DMatrix::from_fn(n, n, |_, _| rng::gaussian(&mut r));
                let t = Operator::new(m, l(n, p)).unwrap();
                let closed = numerical_radius_closed(&t).unwrap();
                let sampled = numerical_radius(&t, 4000, 2, 1e-6).unwrap().value;
                assert!(sampled <= closed + 1e-9, "p={p} n={n}");
                assert!(closed - sampled <= 2e-2, "p={p} n={n}: {sampled} vs {closed}");
            }
        }
    }

    #[test]
    fn polygon_radius_matches_sampling() {
        let g = SpaceSpec::gauge2d(Gauge2d::lp(1.5, 128).unwrap());
        let mut r = rng::rng(11, 0);
        for _ in 0..5 {
            let m = DMatrix::from_fn(2, 2, |_, _| rng::gaussian(&mut r));
            let t = Operator::new(m, g.clone()).unwrap();
            let (exact, _) = polygon_radius(&t).unwrap();
            let sampled = numerical_radius(&t, 3000, 3, 1e-6).unwrap().value;
            // witness pairs may sit within 1e-9 of a vertex, so allow that slack
            assert!(sampled <= exact + 1e-8);
            assert_abs_diff_eq!(sampled, exact, epsilon = 1e-3);
        }
    }

    #[test]
    fn adjoint_examples() {
        let t = op(&[&[1.0, 2.0], &[3.0, 4.0]], l(2, 1.0));
        let a = t.adjoint();
        assert_eq!(a.matrix(), &t.matrix().transpose());
        assert_eq!(a.space().lp_exponent(), Some(f64::INFINITY));
        assert_eq!(a.adjoint(), t);
        let va = numerical_radius(&a, 3000, 1, 1e-6).unwrap().value;
        let vt = numerical_radius(&t, 3000, 1, 1e-6).unwrap().value;
        assert_abs_diff_eq!(va, vt, epsilon = 2e-2);
    }

    #[test]
    fn invalid_delta_and_budget_are_rejected() {
        let t = Operator::identity(l(2, 2.0));
        assert!(numerical_radius(&t, 10, 0, 0.5).is_err());
        assert!(numerical_radius(&t, 0, 0, 0.0).is_err());
        assert!(op_norm(&t, 0, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = op(&[&[1.0, 0.5], &[-2.0, 0.0]], l(2, 3.0));
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"matrix\":[[1.0,0.5],[-2.0,0.0]]"));
        assert_eq!(Operator::from_json_str(&s).unwrap(), t);
    }
}
