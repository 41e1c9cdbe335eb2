//! Quotient norm `|T + Z(X)|` and upper estimates of the numerical
//! indices `n(X)` and `n'(X)`.
//!
//! Index searches minimize `v(T) / |T|` (or `v(T) / |T + Z(X)|`) with
//! Nelder-Mead over matrix entries. Inside the search, norms and radii come
//! from fixed sample pools (common random numbers), or from closed forms
//! where the space has them. Each local minimum is then re-evaluated with
//! the full sampled estimators and the pools are augmented with the new
//! witnesses, so the search cannot settle in a hole of the pool.

use nalgebra::DMatrix;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{embed_block, positive_lift, reference_pair};
use crate::error::{Error, Result};
use crate::lie::{lie_basis, LieBasis, DEFAULT_CONSTRAINTS_PER_ENTRY};
use crate::operator::{
    exact_norm_value, exact_radius_value, matvec, numerical_radius, numerical_radius_exact,
    op_norm, power_ascent, sample_pairs, symmetric_part_norm, Direction, Estimate, Operator,
    Witness,
};
use crate::optim::NelderMead;
use crate::rng::{self, streams};
use crate::space::{DualityPair, Gauge2d, SpaceSpec};

/// Ratios with a denominator below this are treated as `T in Z(X)`.
pub const DEGENERATE_QUOTIENT: f64 = 1e-6;
const POOL_CAP: usize = 3000;
const NORM_POOL_CAP: usize = 150;
const QUOTIENT_ROUNDS: usize = 8;
const ASCENT_STEPS: usize = 6;

/// Fast approximate evaluators of `|M|` and `v(M)` for one space.
#[derive(Clone)]
pub(crate) struct Probe {
    space: SpaceSpec,
    dual: SpaceSpec,
    exact_norm: bool,
    exact_radius: bool,
    points: Vec<Vec<f64>>,
    /// Row-major `vec(x* x^T)` per pair, matching `DMatrix::as_slice` after transposition;
    /// stored column-major: entry `(i, j)` at `j * n + i` holds `x*_i x_j`.
    pairs: Vec<f64>,
}

impl Probe {
    pub(crate) fn new(space: &SpaceSpec, pool: usize, seed: u64) -> Self {
        let n = space.dim();
        let z = DMatrix::zeros(n, n);
        let exact_norm = exact_norm_value(space, &z).is_some();
        let exact_radius = exact_radius_value(space, &z).is_some();
        let mut probe = Self {
            space: space.clone(),
            dual: space.build_dual(),
            exact_norm,
            exact_radius,
            points: vec![],
            pairs: vec![],
        };
        if !exact_norm {
            let mut r = rng::rng(seed, streams::OPNORM);
            probe.points = (0..pool.clamp(1, NORM_POOL_CAP))
                .map(|_| space.random_unit(&mut r))
                .collect();
        }
        if !exact_radius {
            let (pairs, _) = sample_pairs(space, pool.clamp(1, POOL_CAP), seed, streams::RADIUS);
            for p in &pairs {
                probe.add_pair(p);
            }
        }
        probe
    }

    pub(crate) fn add_pair(&mut self, p: &DualityPair) {
        if self.exact_radius {
            return;
        }
        let n = self.space.dim();
        for j in 0..n {
            for i in 0..n {
                self.pairs.push(p.xstar[i] * p.x[j]);
            }
        }
    }

    pub(crate) fn add_point(&mut self, x: &[f64]) {
        if !self.exact_norm {
            self.points.push(x.to_vec());
        }
    }

    pub(crate) fn norm(&self, m: &DMatrix<f64>) -> f64 {
        if self.exact_norm {
            return exact_norm_value(&self.space, m).expect("checked");
        }
        let n = self.space.dim();
        let mut y = vec![0.0; n];
        let mut top = (f64::NEG_INFINITY, 0);
        for (k, x) in self.points.iter().enumerate() {
            matvec(m, x, &mut y);
            let v = self.space.eval_norm(&y);
            if v > top.0 {
                top = (v, k);
            }
        }
        let polished = power_ascent(m, &self.space, &self.dual, &self.points[top.1], ASCENT_STEPS).0;
        top.0.max(polished)
    }

    /// Per pool point the images `[Mx, S_1 x, .., S_k x]`, so that norms on the
    /// coset `M - sum c_j S_j` cost no matrix products.
    pub(crate) fn coset_images(&self, m: &DMatrix<f64>, basis: &[DMatrix<f64>]) -> Vec<f64> {
        if self.exact_norm {
            return vec![];
        }
        let n = self.space.dim();
        let mut out = vec![0.0; self.points.len() * (basis.len() + 1) * n];
        let mut chunks = out.chunks_exact_mut(n);
        for x in &self.points {
            for a in std::iter::once(m).chain(basis) {
                matvec(a, x, chunks.next().expect("sized"));
            }
        }
        out
    }

    /// `|M - sum c_j S_j|` from precomputed [`Probe::coset_images`].
    pub(crate) fn coset_norm(
        &self,
        images: &[f64],
        m: &DMatrix<f64>,
        basis: &[DMatrix<f64>],
        c: &[f64],
        work: &mut DMatrix<f64>,
    ) -> f64 {
        work.copy_from(m);
        for (s, cj) in basis.iter().zip(c) {
            work.zip_apply(s, |w, sv| *w -= cj * sv);
        }
        if self.exact_norm {
            return exact_norm_value(&self.space, work).expect("checked");
        }
        let n = self.space.dim();
        let stride = (basis.len() + 1) * n;
        let mut y = vec![0.0; n];
        let mut top = (f64::NEG_INFINITY, 0);
        for (p, img) in images.chunks_exact(stride).enumerate() {
            y.copy_from_slice(&img[..n]);
            for (cj, sx) in c.iter().zip(img[n..].chunks_exact(n)) {
                y.iter_mut().zip(sx).for_each(|(a, b)| *a -= cj * b);
            }
            let v = self.space.eval_norm(&y);
            if v > top.0 {
                top = (v, p);
            }
        }
        let polished = power_ascent(work, &self.space, &self.dual, &self.points[top.1], ASCENT_STEPS).0;
        top.0.max(polished)
    }

    pub(crate) fn radius(&self, m: &DMatrix<f64>) -> f64 {
        if self.exact_radius {
            return exact_radius_value(&self.space, m).expect("checked");
        }
        let a = m.as_slice();
        let w = a.len();
        self.pairs
            .chunks_exact(w)
            .map(|row| row.iter().zip(a).map(|(p, q)| p * q).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn is_exact(&self) -> bool {
        self.exact_norm && self.exact_radius
    }
}

/// Options for the coefficient search behind [`quotient_norm`].
#[derive(Debug, Clone, Copy)]
pub struct QuotientOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub pool: usize,
    /// Use `|(T + T^t)/2|_2` on Euclidean spaces instead of searching.
    pub closed_form: bool,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 400,
            pool: 2000,
            closed_form: true,
        }
    }
}

fn check_basis(t: &Operator, basis: &LieBasis) -> Result<()> {
    if basis.space != *t.space() {
        return Err(Error::InvalidArgument(format!(
            "Lie basis was computed for {} but the operator acts on {}",
            basis.space.describe(),
            t.space().describe()
        )));
    }
    Ok(())
}

/// Minimizes `c -> |M - sum c_k S_k|` from each start; returns the best value and `c`.
fn minimize_coefficients(
    probe: &Probe,
    basis: &[DMatrix<f64>],
    m: &DMatrix<f64>,
    starts: &[Vec<f64>],
    step: f64,
    max_evals: usize,
) -> (f64, Vec<f64>) {
    let nm = NelderMead {
        max_evals,
        f_tol: 1e-9,
        x_tol: 1e-9 * step.max(1e-300),
    };
    let mut work = m.clone();
    let mut best = (f64::INFINITY, vec![0.0; basis.len()]);
    for c0 in starts {
        let res = nm.minimize(
            |c| {
                work.copy_from(m);
                for (s, ck) in basis.iter().zip(c) {
                    work.zip_apply(s, |w, sv| *w -= ck * sv);
                }
                probe.norm(&work)
            },
            c0,
            step,
        );
        if res.f < best.0 {
            best = (res.f, res.x);
        }
    }
    best
}

/// `|T + Z(X)| = inf_S |T - S|` over the span of `basis`.
///
/// Euclidean spaces use `|(T + T^t)/2|_2` (two-sided). With an empty basis
/// this is the operator norm. Otherwise Nelder-Mead over the coefficients
/// (20 Gaussian restarts scaled by `|T|`), and the reported value is the
/// full-budget operator norm at the best coefficients. The bracket holds the
/// pool value found by the optimizer and that re-evaluated value.
pub fn quotient_norm(t: &Operator, basis: &LieBasis, budget: usize, seed: u64) -> Result<Estimate> {
    quotient_norm_with(t, basis, budget, seed, &QuotientOptions::default())
}

pub fn quotient_norm_with(
    t: &Operator,
    basis: &LieBasis,
    budget: usize,
    seed: u64,
    opts: &QuotientOptions,
) -> Result<Estimate> {
    check_basis(t, basis)?;
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let m = t.matrix();
    if opts.closed_form && t.space().is_hilbert() {
        let skew = (m - m.transpose()) * 0.5;
        let c: Vec<f64> = basis.elements.iter().map(|s| s.dot(&skew)).collect();
        let sym = Operator::new((m + m.transpose()) * 0.5, t.space().clone())?;
        let x = match op_norm(&sym, 1, seed)?.witness {
            Some(Witness::Vector { x }) => x,
            _ => vec![],
        };
        return Ok(Estimate {
            value: symmetric_part_norm(m),
            direction: Direction::TwoSided,
            witness: Some(Witness::Coefficients { c, x }),
            budget,
            seed,
            bracket: None,
        });
    }
    if basis.is_empty() {
        return op_norm(t, budget, seed);
    }
    let mut probe = Probe::new(t.space(), opts.pool.min(budget), seed);
    let scale = probe.norm(m).max(1e-12);
    let k = basis.dimension();
    let mut r = rng::rng(seed, streams::QUOTIENT);
    let mut starts = vec![basis.elements.iter().map(|s| s.dot(m)).collect::<Vec<_>>()];
    for _ in 1..opts.restarts.max(1) {
        starts.push(rng::gaussian_vec(&mut r, k).into_iter().map(|v| v * scale).collect());
    }
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|c0| {
            minimize_coefficients(
                &probe,
                &basis.elements,
                m,
                std::slice::from_ref(c0),
                0.25 * scale,
                2 * opts.max_iters,
            )
        })
        .collect();
    let (mut pool_value, mut c) = results
        .into_iter()
        .fold((f64::INFINITY, vec![]), |b, r| if r.0 < b.0 { r } else { b });
    // Cutting planes: each full witness joins the pool and the coefficients are
    // re-minimized, until the pool value catches up with the full norm.
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for round in 0..=QUOTIENT_ROUNDS {
        let shifted = t.with_matrix(basis.shift(m, &c));
        let full = op_norm(&shifted, budget, seed ^ streams::QUOTIENT << 40 ^ round as u64)?;
        let x = match full.witness {
            Some(Witness::Vector { x }) => x,
            _ => vec![],
        };
        if best.as_ref().is_none_or(|b| full.value < b.0) {
            best = Some((full.value, c.clone(), x.clone()));
        }
        if x.is_empty() || full.value <= pool_value * (1.0 + 1e-4) || round == QUOTIENT_ROUNDS {
            break;
        }
        probe.add_point(&x);
        let polished = minimize_coefficients(
            &probe,
            &basis.elements,
            m,
            std::slice::from_ref(&c),
            0.05 * scale,
            2 * opts.max_iters,
        );
        (pool_value, c) = polished;
    }
    let (full_value, c, x) = best.expect("at least one round");
    let value = full_value.max(pool_value);
    Ok(Estimate {
        value,
        direction: Direction::Bracketed,
        witness: Some(Witness::Coefficients { c, x }),
        budget,
        seed,
        bracket: Some([pool_value, value]),
    })
}

/// Settings shared by [`estimate_index`] and [`estimate_second_index`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Random Gaussian starting matrices.
    pub restarts: usize,
    /// Samples per full evaluation; also caps the pool sizes.
    pub budget: usize,
    pub seed: u64,
    /// Nelder-Mead evaluations per start; `None` picks 40 per search direction, clamped to `[300, 1500]`.
    pub max_evals: Option<usize>,
    /// Pool augmentation rounds per start.
    pub refine_rounds: usize,
    /// Add operators built from the sum structure (shift lifts, two-block operators).
    pub structured: bool,
    /// For sums, also search each summand and lift its witness.
    pub lift_summands: bool,
    /// Coefficient restarts inside full quotient evaluations.
    pub quotient_restarts: usize,
    /// Extra starting operators on the same space.
    pub extra: Vec<Operator>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            budget: 4000,
            seed: 0,
            max_evals: None,
            refine_rounds: 3,
            structured: true,
            lift_summands: true,
            quotient_restarts: 8,
            extra: vec![],
        }
    }
}

impl SearchOptions {
    pub fn new(restarts: usize, budget: usize, seed: u64) -> Self {
        Self {
            restarts,
            budget,
            seed,
            ..Default::default()
        }
    }
}

/// One starting point of an index search and where it ended.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateRecord {
    pub origin: String,
    /// Ratio under the search evaluators.
    pub search_value: f64,
    /// Ratio under the full estimators.
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexEstimate {
    pub value: f64,
    pub direction: Direction,
    pub witness: Operator,
    /// `v(witness)`.
    pub numerator: f64,
    /// `|witness|` or `|witness + Z(X)|`.
    pub denominator: f64,
    pub restarts: usize,
    pub inner_budget: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lie_dimension: Option<usize>,
    pub candidates: Vec<CandidateRecord>,
    /// Set when a closed form replaced the search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl IndexEstimate {
    fn known(value: f64, witness: Operator, note: &str, opts: &SearchOptions) -> Self {
        Self {
            value,
            direction: Direction::Upper,
            numerator: value,
            denominator: 1.0,
            witness,
            restarts: opts.restarts,
            inner_budget: opts.budget,
            seed: opts.seed,
            lie_dimension: None,
            candidates: vec![],
            exact: Some(note.into()),
        }
    }
}

/// `v(T)` by closed form where available, else the sampled lower estimate.
pub fn radius_estimate(t: &Operator, budget: usize, seed: u64) -> Result<Estimate> {
    match numerical_radius_exact(t) {
        Some(e) => Ok(e),
        None => numerical_radius(t, budget, seed, 1e-6),
    }
}

/// Ratio `v(T) / |T|` (`basis = None`) or `v(T) / |T + Z(X)|` with the full estimators.
pub fn index_ratio(
    t: &Operator,
    basis: Option<&LieBasis>,
    budget: usize,
    seed: u64,
    quotient_restarts: usize,
) -> Result<(f64, Estimate, Estimate)> {
    let v = radius_estimate(t, budget, seed)?;
    let d = match basis {
        None => op_norm(t, budget, seed)?,
        Some(b) => quotient_norm_with(
            t,
            b,
            budget,
            seed,
            &QuotientOptions {
                restarts: quotient_restarts,
                ..Default::default()
            },
        )?,
    };
    let ratio = if d.value < DEGENERATE_QUOTIENT {
        f64::INFINITY
    } else {
        v.value / d.value
    };
    Ok((ratio, v, d))
}

/// Planar absolute norms without a closed form are searched on their
/// polygon table, where both evaluators are exact.
fn search_space(space: &SpaceSpec) -> SpaceSpec {
    let z = DMatrix::zeros(space.dim(), space.dim());
    if space.dim() == 2
        && space.is_absolute()
        && (exact_norm_value(space, &z).is_none() || exact_radius_value(space, &z).is_none())
    {
        if let Ok(g) = Gauge2d::from_norm_fn(
            |s, t| space.eval_norm(&[s, t]),
            crate::space::gauge::DEFAULT_INTERVALS,
        ) {
            return SpaceSpec::gauge2d(g);
        }
    }
    space.clone()
}

/// Frobenius-orthonormal basis of the complement of `lie` (row-major vectors).
fn complement_basis(n: usize, lie: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let mut basis: Vec<DMatrix<f64>> = lie.to_vec();
    let k = basis.len();
    for i in 0..n {
        for j in 0..n {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    let d = b.dot(&e);
                    e -= b * d;
                }
            }
            let ne = e.norm();
            if ne > 1e-8 {
                basis.push(e / ne);
            }
        }
    }
    basis.split_off(k)
}

fn combine(dirs: &[DMatrix<f64>], theta: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dirs[0].nrows(), dirs[0].ncols());
    for (d, t) in dirs.iter().zip(theta) {
        m.zip_apply(d, |a, b| *a += t * b);
    }
    m
}

/// Operators built from the sum structure that are known to have small ratios.
fn structured_candidates(space: &SpaceSpec) -> Vec<(String, DMatrix<f64>)> {
    let mut out = vec![];
    let Some((outer, parts)) = space.sum_parts() else {
        return out;
    };
    let blocks = space.blocks();
    let q = outer.dim();
    for l in 0..q {
        for mu in 0..q {
            if l == mu {
                continue;
            }
            let mut u = DMatrix::zeros(q, q);
            u[(l, mu)] = 1.0;
            if let Ok(t) = positive_lift(&u, space) {
                out.push((format!("shift-lift {mu}->{l}"), t.matrix().clone()));
            }
        }
    }
    let n = space.dim();
    for (h, hs) in parts.iter().enumerate() {
        if !hs.is_hilbert() {
            continue;
        }
        let hb = &blocks[h];
        for (w, ws) in parts.iter().enumerate() {
            if w == h {
                continue;
            }
            let wb = &blocks[w];
            let (w1, wstar) = reference_pair(ws);
            let mut t1 = DMatrix::zeros(n, n);
            t1[(hb.start, hb.start)] = 1.0;
            let mut t2 = t1.clone();
            for (j, v) in wstar.iter().enumerate() {
                t1[(hb.start + 1, wb.start + j)] = std::f64::consts::SQRT_2 * v;
            }
            for (i, v) in w1.iter().enumerate() {
                t2[(wb.start + i, hb.start + 1)] = std::f64::consts::SQRT_2 * v;
            }
            out.push((format!("two-block sup-type {h},{w}"), t1));
            out.push((format!("two-block sum-type {h},{w}"), t2));
        }
    }
    out
}

/// Search driver shared by both indices.
struct Search<'a> {
    space: &'a SpaceSpec,
    /// Lie basis for the second index; `None` for the classical index.
    basis: Option<&'a LieBasis>,
    dirs: Vec<DMatrix<f64>>,
    probe: Probe,
    opts: &'a SearchOptions,
}

impl Search<'_> {
    fn theta_of(&self, m: &DMatrix<f64>) -> Vec<f64> {
        self.dirs.iter().map(|d| d.dot(m)).collect()
    }

    fn search_ratio(&self, probe: &Probe, m: &DMatrix<f64>, warm: &mut Vec<f64>) -> f64 {
        let scale = m.norm();
        if !(scale > 0.0) {
            return f64::INFINITY;
        }
        let m = m / scale;
        let num = probe.radius(&m);
        let den = match self.basis {
            None => probe.norm(&m),
            Some(b) => {
                let images = probe.coset_images(&m, &b.elements);
                let mut work = m.clone();
                let nm = NelderMead {
                    max_evals: 20 * b.dimension() + 20,
                    f_tol: 1e-9,
                    x_tol: 1e-9,
                };
                // convex in c, so one warm start suffices
                let res = nm.minimize(
                    |c| probe.coset_norm(&images, &m, &b.elements, c, &mut work),
                    warm,
                    0.1,
                );
                *warm = res.x;
                res.f
            }
        };
        if den < DEGENERATE_QUOTIENT {
            f64::INFINITY
        } else {
            num / den
        }
    }

    fn full_ratio(&self, m: &DMatrix<f64>, seed: u64) -> Result<(f64, Estimate, Estimate)> {
        let t = Operator::new(m / m.norm(), self.space.clone())?;
        index_ratio(&t, self.basis, self.opts.budget, seed, self.opts.quotient_restarts)
    }

    /// Local search from `m0` with pool refinement; returns the best matrix and its ratios.
    /// With `score_start` the projected start itself competes, so a structured
    /// seed is never reported worse than its own ratio.
    fn run(&self, m0: &DMatrix<f64>, stream: u64, score_start: bool) -> Result<(DMatrix<f64>, f64, f64)> {
        let d = self.dirs.len();
        let max_evals = self
            .opts
            .max_evals
            .unwrap_or_else(|| (40 * d).clamp(300, 1500));
        let nm = NelderMead {
            max_evals,
            f_tol: 1e-7,
            x_tol: 1e-7,
        };
        let mut probe = self.probe.clone();
        let mut theta = self.theta_of(m0);
        let nt = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nt > 0.0) {
            return Err(Error::Numerical("starting operator lies in Z(X)".into()));
        }
        theta.iter_mut().for_each(|v| *v /= nt);
        let mut best: Option<(DMatrix<f64>, f64, f64)> = None;
        if score_start {
            let m = combine(&self.dirs, &theta);
            let mut warm = vec![0.0; self.basis.map_or(0, |b| b.dimension())];
            let sv = self.search_ratio(&probe, &m, &mut warm);
            let (full, _, _) = self.full_ratio(&m, self.opts.seed ^ (stream << 24) ^ 0xff)?;
            best = Some((m, sv, full));
        }
        for round in 0..=self.opts.refine_rounds {
            let mut warm = vec![0.0; self.basis.map_or(0, |b| b.dimension())];
            let res = nm.minimize(
                |th| {
                    let m = combine(&self.dirs, th);
                    self.search_ratio(&probe, &m, &mut warm)
                },
                &theta,
                0.2,
            );
            let m = combine(&self.dirs, &res.x);
            let seed = self.opts.seed ^ (stream << 24) ^ round as u64;
            let (full, v, den) = self.full_ratio(&m, seed)?;
            let improved = best.as_ref().is_none_or(|b| full < b.2);
            if improved {
                best = Some((m.clone(), res.f, full));
            }
            let gap = (full - res.f).abs();
            if probe.is_exact() || gap <= 1e-3 * full.max(1e-3) {
                break;
            }
            if let Some(Witness::Pair(p)) = &v.witness {
                probe.add_pair(p);
            }
            if let Some(Witness::Vector { x } | Witness::Coefficients { x, .. }) = &den.witness {
                if x.len() == self.space.dim() {
                    probe.add_point(x);
                }
            }
            let nx = res.x.iter().map(|v| v * v).sum::<f64>().sqrt();
            theta = res.x.iter().map(|v| v / nx).collect();
        }
        Ok(best.expect("at least one round"))
    }
}

fn summand_witnesses(
    space: &SpaceSpec,
    opts: &SearchOptions,
    second: bool,
) -> Vec<(String, DMatrix<f64>)> {
    let mut out = vec![];
    let Some((outer, parts)) = space.sum_parts() else {
        return out;
    };
    if outer.lp_exponent() == Some(2.0) {
        return out;
    }
    let sub = SearchOptions {
        restarts: opts.restarts,
        lift_summands: false,
        extra: vec![],
        ..opts.clone()
    };
    for (i, s) in parts.iter().enumerate() {
        if s.dim() < 2 || s.is_hilbert() {
            continue;
        }
        let est = if second {
            estimate_second_index_with(s, &sub)
        } else {
            estimate_index_with(s, &sub)
        };
        if let Ok(e) = est {
            if let Ok(t) = embed_block(e.witness.matrix(), space, i) {
                out.push((format!("lifted summand {i}"), t.matrix().clone()));
            }
        }
    }
    out
}

fn run_search(
    space: &SpaceSpec,
    basis: Option<&LieBasis>,
    opts: &SearchOptions,
) -> Result<IndexEstimate> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let n = space.dim();
    let dirs = match basis {
        Some(b) => complement_basis(n, &b.elements),
        None => complement_basis(n, &[]),
    };
    let sspace = if basis.is_none() { search_space(space) } else { space.clone() };
    let probe = Probe::new(&sspace, opts.budget, opts.seed);
    // the search runs on `sspace`; full evaluations always use the real space
    let search = Search {
        space,
        basis,
        dirs,
        probe,
        opts,
    };

    // (origin, matrix, score the start itself)
    let mut starts: Vec<(String, DMatrix<f64>, bool)> = vec![];
    if opts.structured {
        starts.extend(structured_candidates(space).into_iter().map(|(o, m)| (o, m, true)));
    }
    if opts.lift_summands {
        let lifted = summand_witnesses(space, opts, basis.is_some());
        starts.extend(lifted.into_iter().map(|(o, m)| (o, m, true)));
    }
    for (i, t) in opts.extra.iter().enumerate() {
        if t.space() != space {
            return Err(Error::InvalidArgument(format!("extra start {i} acts on a different space")));
        }
        starts.push((format!("extra {i}"), t.matrix().clone(), true));
    }
    let mut r = rng::rng(opts.seed, streams::INDEX);
    for i in 0..opts.restarts {
        let m = DMatrix::from_fn(n, n, |_, _| rng::gaussian(&mut r));
        starts.push((format!("random {i}"), m, false));
    }
    let runs: Vec<Option<(DMatrix<f64>, f64, f64)>> = starts
        .par_iter()
        .enumerate()
        .map(|(k, (_, m, seeded))| search.run(m, streams::RESTART_BASE + k as u64, *seeded).ok())
        .collect();
    let mut candidates = vec![];
    let mut best: Option<(DMatrix<f64>, f64)> = None;
    for ((origin, _, _), run) in starts.iter().zip(runs) {
        let Some((m, sv, full)) = run else { continue };
        candidates.push(CandidateRecord {
            origin: origin.clone(),
            search_value: sv,
            value: full,
        });
        if full.is_finite() && best.as_ref().is_none_or(|b| full < b.1) {
            best = Some((m, full));
        }
    }
    let (m, _) = best.ok_or_else(|| {
        Error::Numerical("every candidate was degenerate (numerically inside Z(X))".into())
    })?;
    let witness = Operator::new(&m / m.norm(), space.clone())?;
    let final_seed = rng::rng(opts.seed, streams::INDEX_FINAL).next_u64();
    let (value, v, d) = index_ratio(&witness, basis, opts.budget, final_seed, opts.quotient_restarts.max(20))?;
    Ok(IndexEstimate {
        value,
        direction: Direction::Upper,
        witness,
        numerator: v.value,
        denominator: d.value,
        restarts: opts.restarts,
        inner_budget: opts.budget,
        seed: opts.seed,
        lie_dimension: basis.map(|b| b.dimension()),
        candidates,
        exact: None,
    })
}

fn rotation(space: &SpaceSpec) -> Operator {
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    m[(0, 1)] = 1.0;
    m[(1, 0)] = -1.0;
    Operator::new(m, space.clone()).expect("square")
}

fn first_projection(space: &SpaceSpec) -> Operator {
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 1.0;
    Operator::new(m, space.clone()).expect("square")
}

/// Upper estimate of `n(X) = inf v(T) / |T|`.
pub fn estimate_index(space: &SpaceSpec, restarts: usize, budget: usize, seed: u64) -> Result<IndexEstimate> {
    estimate_index_with(space, &SearchOptions::new(restarts, budget, seed))
}

pub fn estimate_index_with(space: &SpaceSpec, opts: &SearchOptions) -> Result<IndexEstimate> {
    if space.dim() == 1 {
        return Ok(IndexEstimate::known(1.0, first_projection(space), "one-dimensional", opts));
    }
    if space.is_hilbert() {
        return Ok(IndexEstimate::known(0.0, rotation(space), "Euclidean: rotation generator", opts));
    }
    run_search(space, None, opts)
}

/// Upper estimate of `n'(X) = inf v(T) / |T + Z(X)|` over `T` outside `Z(X)`.
pub fn estimate_second_index(
    space: &SpaceSpec,
    restarts: usize,
    budget: usize,
    seed: u64,
) -> Result<IndexEstimate> {
    estimate_second_index_with(space, &SearchOptions::new(restarts, budget, seed))
}

pub fn estimate_second_index_with(space: &SpaceSpec, opts: &SearchOptions) -> Result<IndexEstimate> {
    if space.dim() == 1 {
        return Ok(IndexEstimate::known(1.0, first_projection(space), "one-dimensional", opts));
    }
    if space.is_hilbert() {
        let mut e = IndexEstimate::known(1.0, first_projection(space), "Euclidean: symmetric witness", opts);
        let n = space.dim();
        e.lie_dimension = Some(n * (n - 1) / 2);
        return Ok(e);
    }
    let n = space.dim();
    let basis = lie_basis(space, DEFAULT_CONSTRAINTS_PER_ENTRY * n * n, opts.seed)?;
    second_index_with_basis(space, &basis, opts)
}

/// As [`estimate_second_index_with`], reusing a computed Lie basis.
pub fn second_index_with_basis(
    space: &SpaceSpec,
    basis: &LieBasis,
    opts: &SearchOptions,
) -> Result<IndexEstimate> {
    if basis.space != *space {
        return Err(Error::InvalidArgument("Lie basis was computed for a different space".into()));
    }
    if basis.is_empty() {
        let mut e = estimate_index_with(space, opts)?;
        e.lie_dimension = Some(0);
        return Ok(e);
    }
    run_search(space, Some(basis), opts)
}

/// Estimates `n'(X)` and `n'(X*)` together, exchanging transposed witnesses.
///
/// `v`, `|.|` and the Lie algebra are all preserved by `T -> T^t` between `X`
/// and `X*`, so each side's witness is a valid start on the other side.
pub fn estimate_second_index_dual_pair(
    space: &SpaceSpec,
    opts: &SearchOptions,
) -> Result<(IndexEstimate, IndexEstimate)> {
    let dual = space.build_dual();
    let mut primal = estimate_second_index_with(space, opts)?;
    let mut dopts = opts.clone();
    dopts.extra = vec![Operator::new(primal.witness.matrix().transpose(), dual.clone())?];
    let dual_est = estimate_second_index_with(&dual, &dopts)?;
    let back = Operator::new(dual_est.witness.matrix().transpose(), space.clone())?;
    if primal.exact.is_none() {
        let basis = if primal.lie_dimension.unwrap_or(0) > 0 {
            let n = space.dim();
            Some(lie_basis(space, DEFAULT_CONSTRAINTS_PER_ENTRY * n * n, opts.seed)?)
        } else {
            None
        };
        let seed = rng::rng(opts.seed, streams::INDEX_FINAL).next_u64();
        let (ratio, v, d) = index_ratio(&back, basis.as_ref(), opts.budget, seed, opts.quotient_restarts.max(20))?;
        primal.candidates.push(CandidateRecord {
            origin: "transposed dual witness".into(),
            search_value: ratio,
            value: ratio,
        });
        if ratio < primal.value {
            primal.value = ratio;
            primal.numerator = v.value;
            primal.denominator = d.value;
            primal.witness = back;
        }
    }
    Ok((primal, dual_est))
}
