//! Registry of reproducible numerical checks with a pass/fail report.
//!
//! Every claim runs from its own seed stream, so the report for a given
//! `(seed, scale, filter)` is byte-identical regardless of scheduling or of
//! which other claims are selected.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng as _, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{
    absolute_sum, ck_operator, ck_space, esum, example_t1, example_t2, lift_operator, positive_lift,
    random_gauge, random_gauge_far, shift_bound_check, shift_operator, ShiftDirection,
};
use crate::error::{Error, Result};
use crate::lie::{lie_basis, LieBasis, DEFAULT_CONSTRAINTS_PER_ENTRY};
use crate::operator::{numerical_radius, op_norm, Operator};
use crate::quotient::{
    estimate_index_with, estimate_second_index_dual_pair, estimate_second_index_with, index_ratio,
    quotient_norm, quotient_norm_with, radius_estimate, QuotientOptions, SearchOptions,
};
use crate::rng::{self, streams};
use crate::space::SpaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Estimate without a known exact value; nothing is asserted.
    Recorded,
}

/// Closed interval an individual computed value must fall in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bound {
    fn slack(&self, v: f64) -> Option<f64> {
        let lo = self.lower.map(|l| v - l);
        let hi = self.upper.map(|u| u - v);
        match (lo, hi) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(f64::INFINITY).min(b.unwrap_or(f64::INFINITY))),
        }
    }

    fn render(&self) -> String {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) if l == u => format!("={l}"),
            (Some(l), Some(u)) => format!("[{l},{u}]"),
            (Some(l), None) => format!(">={l}"),
            (None, Some(u)) => format!("<={u}"),
            (None, None) => "recorded".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimResult {
    pub claim_id: String,
    /// The mathematical statement being checked.
    pub reference: String,
    pub labels: Vec<String>,
    pub computed: Vec<f64>,
    pub expected: Vec<Bound>,
    /// Smallest slack of any computed value to its bound; negative means outside.
    pub margin: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl ClaimResult {
    fn from_checks(claim: &Claim, checks: Vec<Check>) -> Self {
        let margin = checks
            .iter()
            .filter_map(|c| c.bound.slack(c.value))
            .fold(f64::INFINITY, f64::min);
        let status = if margin.is_infinite() {
            Status::Recorded
        } else if margin >= -claim.tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            claim_id: claim.id.into(),
            reference: claim.reference.into(),
            labels: checks.iter().map(|c| c.label.clone()).collect(),
            computed: checks.iter().map(|c| c.value).collect(),
            expected: checks.iter().map(|c| c.bound).collect(),
            // recorded claims carry no slack; 0 keeps the report valid JSON
            margin: if margin.is_finite() { margin } else { 0.0 },
            tolerance: claim.tolerance,
            status,
        }
    }

    fn failed(claim: &Claim, err: &Error) -> Self {
        Self {
            claim_id: claim.id.into(),
            reference: claim.reference.into(),
            labels: vec![format!("error: {err}")],
            computed: vec![],
            expected: vec![],
            margin: -1.0,
            tolerance: claim.tolerance,
            status: Status::Fail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Multiplies every sampling budget.
    pub scale: f64,
    /// Comma-separated claim id prefixes; every token must match some claim.
    pub filter: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scale: 1.0,
            filter: None,
        }
    }
}

struct Check {
    label: String,
    value: f64,
    bound: Bound,
}

fn at_most(label: impl Into<String>, value: f64, upper: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound: Bound {
            lower: None,
            upper: Some(upper),
        },
    }
}

fn at_least(label: impl Into<String>, value: f64, lower: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound: Bound {
            lower: Some(lower),
            upper: None,
        },
    }
}

fn between(label: impl Into<String>, value: f64, lower: f64, upper: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound: Bound {
            lower: Some(lower),
            upper: Some(upper),
        },
    }
}

fn recorded(label: impl Into<String>, value: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound: Bound {
            lower: None,
            upper: None,
        },
    }
}

/// Per-claim seeding and budget scaling.
struct Ctx {
    seed: u64,
    scale: f64,
    salt: u64,
}

impl Ctx {
    fn budget(&self, base: usize) -> usize {
        ((base as f64 * self.scale).ceil() as usize).max(50)
    }

    fn seed(&self, i: u64) -> u64 {
        rng::rng(self.seed, streams::SUITE + (self.salt << 16) + i).next_u64()
    }

    fn rng(&self, i: u64) -> rng::Rng {
        rng::rng(self.seed(i), streams::SUITE)
    }

    fn search(&self, restarts: usize, budget: usize, i: u64) -> SearchOptions {
        SearchOptions::new(restarts, self.budget(budget), self.seed(i))
    }
}

struct Claim {
    id: &'static str,
    reference: &'static str,
    tolerance: f64,
    run: fn(&Ctx) -> Result<Vec<Check>>,
}

fn l(n: usize, p: f64) -> SpaceSpec {
    SpaceSpec::lp(n, p).expect("valid exponent")
}

fn gaussian_operator(space: &SpaceSpec, r: &mut rng::Rng) -> Operator {
    let n = space.dim();
    Operator::new(DMatrix::from_fn(n, n, |_, _| rng::gaussian(r)), space.clone()).expect("square")
}

fn basis_for(space: &SpaceSpec, seed: u64) -> Result<LieBasis> {
    let n = space.dim();
    lie_basis(space, DEFAULT_CONSTRAINTS_PER_ENTRY * n * n, seed)
}

/// Largest absolute eigenvalue of the symmetric part, independent of the library's closed forms.
fn symmetric_oracle(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.amax()
}

fn random_exponent(r: &mut rng::Rng) -> f64 {
    const PS: [f64; 7] = [1.0, 1.25, 1.5, 1.8, 3.0, 4.0, f64::INFINITY];
    PS[r.random_range(0..PS.len())]
}

/// A random planar absolute norm: classical `l_p` or a random gauge.
fn random_planar(r: &mut rng::Rng) -> SpaceSpec {
    if r.random_bool(0.3) {
        SpaceSpec::gauge2d(random_gauge(r.next_u64()))
    } else {
        l(2, [1.0, 2.0, f64::INFINITY, random_exponent(r)][r.random_range(0..4)])
    }
}

/// Outer norms other than `l_2`, so that the Lie algebra of a sum stays block-diagonal.
fn random_outer(r: &mut rng::Rng) -> SpaceSpec {
    match r.random_range(0..3) {
        0 => l(2, 1.0),
        1 => l(2, f64::INFINITY),
        _ => SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1)),
    }
}

fn max_deviation(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn hilbert_radius(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let mut dev = vec![];
    for i in 0..50 {
        let t = gaussian_operator(&l(2 + i % 4, 2.0), &mut r);
        let sampled = numerical_radius(&t, ctx.budget(2000), ctx.seed(1 + i as u64), 1e-6)?.value;
        dev.push((sampled - symmetric_oracle(t.matrix())).abs());
    }
    Ok(vec![at_most("max |sampled radius - |(T+T^t)/2|_2| over 50 operators", max_deviation(dev), 0.0)])
}

fn hilbert_quotient(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let bases: Vec<LieBasis> = (2..=5)
        .map(|n| basis_for(&l(n, 2.0), ctx.seed(100 + n as u64)))
        .collect::<Result<_>>()?;
    let opts = QuotientOptions {
        closed_form: false,
        ..Default::default()
    };
    let mut dev = vec![];
    for i in 0..50 {
        let t = gaussian_operator(&l(2 + i % 4, 2.0), &mut r);
        let q = quotient_norm_with(&t, &bases[i % 4], ctx.budget(2000), ctx.seed(1 + i as u64), &opts)?;
        dev.push((q.value - symmetric_oracle(t.matrix())).abs());
    }
    let mut checks = vec![at_most(
        "max |searched quotient - |(T+T^t)/2|_2| over 50 operators",
        max_deviation(dev),
        0.0,
    )];
    for n in 2..=5 {
        let e = estimate_second_index_with(&l(n, 2.0), &ctx.search(1, 1000, 200 + n as u64))?;
        checks.push(at_least(format!("second index of l2^{n}"), e.value, 1.0));
    }
    Ok(checks)
}

/// Distance of a basis element to `+-(E_ij - E_ji)/sqrt2`.
fn rotation_deviation(s: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let mut rot = DMatrix::zeros(s.nrows(), s.ncols());
    rot[(i, j)] = 1.0 / SQRT_2;
    rot[(j, i)] = -1.0 / SQRT_2;
    (s - &rot).amax().min((s + &rot).amax())
}

fn lie_dimensions(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = vec![];
    for n in 2..=5 {
        let b = basis_for(&l(n, 2.0), ctx.seed(n as u64))?;
        let want = (n * (n - 1) / 2) as f64;
        checks.push(between(format!("dim Z(l2^{n})"), b.dimension() as f64, want, want));
    }
    for p in [1.0, f64::INFINITY, 3.0] {
        for n in 2..=3 {
            let s = l(n, p);
            let b = basis_for(&s, ctx.seed(10 + n as u64))?;
            checks.push(between(format!("dim Z({})", s.describe()), b.dimension() as f64, 0.0, 0.0));
        }
    }
    let mut outers = vec![l(2, 1.0), l(2, f64::INFINITY)];
    let mut r = ctx.rng(20);
    for _ in 0..3 {
        outers.push(SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1)));
    }
    for (k, outer) in outers.into_iter().enumerate() {
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), outer)?;
        let b = basis_for(&s, ctx.seed(30 + k as u64))?;
        let name = s.describe();
        checks.push(between(format!("dim Z({name})"), b.dimension() as f64, 1.0, 1.0));
        let dev = b.elements.first().map_or(f64::INFINITY, |e| rotation_deviation(e, 0, 1));
        checks.push(at_most(format!("distance to rotation block on {name}"), dev, 1e-6));
    }
    Ok(checks)
}

fn classical_index(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = vec![];
    for (k, p) in [1.0, f64::INFINITY].into_iter().enumerate() {
        let e = estimate_index_with(&l(2, p), &ctx.search(4, 2000, k as u64))?;
        checks.push(at_least(format!("n({})", l(2, p).describe()), e.value, 1.0));
    }
    let e = estimate_index_with(&l(2, 2.0), &ctx.search(4, 2000, 2))?;
    checks.push(at_most("n(l2^2)", e.value, 0.0));
    let w = e.witness.matrix();
    checks.push(at_most("|W + W^t| of the l2^2 witness", (w + w.transpose()).amax(), 0.0));
    Ok(checks)
}

fn sum_operator_bounds(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = vec![];
    let cases: [(f64, fn(&SpaceSpec) -> Result<Operator>, &str); 2] =
        [(f64::INFINITY, example_t1, "T1"), (1.0, example_t2, "T2")];
    for (k, (outer, build, name)) in cases.into_iter().enumerate() {
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, outer))?;
        let t = build(&s)?;
        let v = numerical_radius(&t, ctx.budget(20_000), ctx.seed(k as u64), 1e-6)?.value;
        let b = basis_for(&s, ctx.seed(10 + k as u64))?;
        let q = quotient_norm(&t, &b, ctx.budget(20_000), ctx.seed(20 + k as u64))?.value;
        checks.push(at_most(format!("v({name}) on {}", s.describe()), v, 1.5));
        checks.push(at_least(format!("|{name} + Z| on {}", s.describe()), q, 3f64.sqrt()));
    }
    Ok(checks)
}

fn second_index_sandwich(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = vec![];
    for (k, outer) in [f64::INFINITY, 1.0].into_iter().enumerate() {
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, outer))?;
        let e = estimate_second_index_with(&s, &ctx.search(4, 4000, k as u64))?;
        checks.push(between(format!("n'({})", s.describe()), e.value, 0.5, 3f64.sqrt() / 2.0));
    }
    Ok(checks)
}

fn sum_monotonicity(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let mut checks = vec![];
    let summand = |r: &mut rng::Rng| {
        if r.random_bool(0.35) {
            l(3, 2.0)
        } else {
            l(2, random_exponent(r))
        }
    };
    let mut k = 0;
    while checks.len() < 10 {
        let (y, w) = (summand(&mut r), summand(&mut r));
        // two Euclidean summands bound nothing below 1 and cost the most
        if y.is_hilbert() && w.is_hilbert() {
            continue;
        }
        let outer = random_outer(&mut r);
        let opts = SearchOptions {
            max_evals: Some(600),
            ..ctx.search(2, 3000, k)
        };
        k += 1;
        let ny = estimate_second_index_with(&y, &opts)?.value;
        let nw = estimate_second_index_with(&w, &opts)?.value;
        let sum = absolute_sum(y, w, outer)?;
        let ns = estimate_second_index_with(&sum, &opts)?.value;
        checks.push(at_most(format!("n'({})", sum.describe()), ns, ny.min(nw)));
    }
    Ok(checks)
}

fn lifting(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let (mut dn, mut dv, mut dq) = (vec![], vec![], vec![]);
    for i in 0..50u64 {
        let y = match r.random_range(0..3) {
            0 => l(2, 2.0),
            1 => l(3, 2.0),
            _ => random_planar(&mut r),
        };
        let w = match r.random_range(0..3) {
            0 => SpaceSpec::real(),
            1 => l(2, 2.0),
            _ => random_planar(&mut r),
        };
        let sum = absolute_sum(y.clone(), w, random_outer(&mut r))?;
        let t = gaussian_operator(&y, &mut r);
        let lifted = lift_operator(&t, &sum)?;
        let budget = ctx.budget(2000);
        let s = ctx.seed(1 + i);
        dn.push((op_norm(&lifted, budget, s)?.value - op_norm(&t, budget, s)?.value).abs());
        dv.push((numerical_radius(&lifted, budget, s, 1e-6)?.value - radius_estimate(&t, budget, s)?.value).abs());
        let qy = quotient_norm(&t, &basis_for(&y, s)?, budget, s)?.value;
        let qx = quotient_norm(&lifted, &basis_for(&sum, s)?, budget, s)?.value;
        dq.push((qx - qy).abs());
    }
    Ok(vec![
        at_most("max ||lift T| - |T|| over 50 instances", max_deviation(dn), 0.0),
        at_most("max |v(lift T) - v(T)|", max_deviation(dv), 0.0),
        at_most("max ||lift T + Z(X)| - |T + Z(Y)||", max_deviation(dq), 0.0),
    ])
}

/// Random sums of planar and one-dimensional pieces under a planar outer norm.
fn random_sum(r: &mut rng::Rng) -> Result<SpaceSpec> {
    let piece = |r: &mut rng::Rng| {
        if r.random_bool(0.3) {
            SpaceSpec::real()
        } else {
            random_planar(r)
        }
    };
    let (a, b) = (piece(r), piece(r));
    absolute_sum(a, b, random_planar(r))
}

fn duality_radius(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let mut dev = vec![];
    for i in 0..50u64 {
        let s = random_sum(&mut r)?;
        let t = gaussian_operator(&s, &mut r);
        let budget = ctx.budget(3000);
        let v = numerical_radius(&t, budget, ctx.seed(1 + i), 1e-6)?.value;
        let va = numerical_radius(&t.adjoint(), budget, ctx.seed(1 + i), 1e-6)?.value;
        dev.push((v - va).abs());
    }
    Ok(vec![at_most(
        "max |v(T) - v(T*)| over 50 random sums",
        max_deviation(dev),
        0.0,
    )])
}

fn duality_second_index(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let spaces = vec![
        l(2, random_exponent(&mut r).max(1.25).min(4.0)),
        SpaceSpec::gauge2d(random_gauge(r.next_u64())),
        absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, f64::INFINITY))?,
        absolute_sum(l(2, 1.5), SpaceSpec::real(), l(2, 1.0))?,
        absolute_sum(l(2, 2.0), SpaceSpec::real(), SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1)))?,
    ];
    let mut checks = vec![];
    for (k, s) in spaces.iter().enumerate() {
        let (a, b) = estimate_second_index_dual_pair(s, &ctx.search(3, 3000, k as u64))?;
        checks.push(at_most(format!("|n'(X) - n'(X*)| for {}", s.describe()), (a.value - b.value).abs(), 0.0));
    }
    Ok(checks)
}

fn shift_lemma(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut spaces: Vec<SpaceSpec> = [1.0, 2.0, f64::INFINITY, 1.5, 3.0].map(|p| l(2, p)).to_vec();
    let mut r = ctx.rng(0);
    for _ in 0..20 {
        spaces.push(SpaceSpec::gauge2d(random_gauge(r.next_u64())));
    }
    let mut checks = vec![];
    for (k, e) in spaces.iter().enumerate() {
        let rep = shift_bound_check(e, ctx.budget(4000), ctx.seed(1 + k as u64))?;
        let name = e.describe();
        checks.push(at_least(format!("max(|e1+e2|, |e1*+e2*|) - (1 - sqrt(1-k^2) + k) on {name}"), rep.margin, 0.0));
        checks.push(at_least(format!("min ((3 - xi)|x| - |x|_1)/|x| on {name}"), rep.l1_margin, 0.0));
    }
    Ok(checks)
}

fn ck_model(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = vec![];
    for m in 2..=3usize {
        let s = ck_space(m)?;
        let t = ck_operator(m)?;
        let b = basis_for(&s, ctx.seed(m as u64))?;
        checks.push(between(format!("dim Z(C({m}, l2^2))"), b.dimension() as f64, m as f64, m as f64));
        let dev = b
            .elements
            .iter()
            .map(|e| (0..m).map(|p| rotation_deviation(e, 2 * p, 2 * p + 1)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        checks.push(at_most(format!("distance of basis to per-point rotations, m={m}"), dev, 0.0));
        let v = numerical_radius(&t, ctx.budget(20_000), ctx.seed(10 + m as u64), 1e-6)?.value;
        let q = quotient_norm(&t, &b, ctx.budget(20_000), ctx.seed(20 + m as u64))?.value;
        checks.push(at_most(format!("v(T), m={m}"), v, 1.5));
        checks.push(at_least(format!("|T + Z|, m={m}"), q, 3f64.sqrt()));
        checks.push(at_most(format!("v(T) / |T + Z|, m={m}"), v / q, 3f64.sqrt() / 2.0));
    }
    Ok(checks)
}

fn non_hilbert_upper(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let mut checks = vec![];
    for (k, right) in [SpaceSpec::real(), l(2, 2.0)].into_iter().enumerate() {
        let mut outers = vec![l(2, 1.0), l(2, f64::INFINITY)];
        for _ in 0..3 {
            outers.push(SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1)));
        }
        for (j, outer) in outers.into_iter().enumerate() {
            let s = absolute_sum(l(2, 2.0), right.clone(), outer)?;
            let i = (10 * k + j) as u64;
            let b = basis_for(&s, ctx.seed(100 + i))?;
            checks.push(at_least(format!("dim Z({})", s.describe()), b.dimension() as f64, 1.0));
            let opts = SearchOptions {
                max_evals: Some(600),
                ..ctx.search(2, 3000, i)
            };
            let e = crate::quotient::second_index_with_basis(&s, &b, &opts)?;
            checks.push(at_most(format!("n'({})", s.describe()), e.value, 1.0 - 1e-2));
        }
    }
    Ok(checks)
}

fn positive_operator_bound(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut r = ctx.rng(0);
    let mut checks = vec![];
    for k in 0..3u64 {
        let e = random_planar(&mut r);
        let parts = vec![random_planar(&mut r), random_planar(&mut r)];
        let sum = esum(e.clone(), parts)?;
        let u = shift_operator(&e, ShiftDirection::SecondToFirst)?.operator();
        let vu = radius_estimate(&u, ctx.budget(4000), ctx.seed(1 + k))?.value;
        let opts = SearchOptions {
            max_evals: Some(400),
            ..ctx.search(1, 2000, 10 + k)
        };
        let n = estimate_index_with(&sum, &opts)?.value;
        checks.push(at_most(format!("n({}) vs v(U1)", sum.describe()), n, vu));
        let lifted = positive_lift(u.matrix(), &sum)?;
        let (ratio, _, _) = index_ratio(&lifted, None, ctx.budget(4000), ctx.seed(20 + k), 1)?;
        checks.push(at_most(format!("v(T)/|T| of the lifted shift on {}", sum.describe()), ratio, vu));
    }
    Ok(checks)
}

fn sum_sandwich(ctx: &Ctx) -> Result<Vec<Check>> {
    let y = l(2, 1.8);
    let ny = estimate_index_with(&y, &ctx.search(4, 3000, 0))?.value;
    let s = absolute_sum(y, l(2, 2.0), l(2, f64::INFINITY))?;
    let opts = SearchOptions {
        max_evals: Some(600),
        ..ctx.search(2, 3000, 1)
    };
    let e = estimate_second_index_with(&s, &opts)?;
    Ok(vec![
        recorded("n(l1.8^2)", ny),
        between(format!("n'({}) against [min(n(Y), 1/2), n(Y)]", s.describe()), e.value, ny.min(0.5), ny),
    ])
}

fn index_trend(ctx: &Ctx) -> Result<Vec<Check>> {
    let a = estimate_index_with(&l(2, 1.2), &ctx.search(4, 3000, 0))?.value;
    let b = estimate_index_with(&l(2, 1.8), &ctx.search(4, 3000, 1))?.value;
    Ok(vec![recorded("n(l1.2^2)", a), recorded("n(l1.8^2)", b), at_least("n(l1.2^2) - n(l1.8^2)", a - b, 0.0)])
}

fn lp_index_values(ctx: &Ctx) -> Result<Vec<Check>> {
    [1.5, 3.0, 4.0]
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let e = estimate_index_with(&l(2, p), &ctx.search(4, 3000, k as u64))?;
            Ok(recorded(format!("n(l{p}^2) upper estimate"), e.value))
        })
        .collect()
}

fn t1_radius_value(ctx: &Ctx) -> Result<Vec<Check>> {
    let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, f64::INFINITY))?;
    let v = numerical_radius(&example_t1(&s)?, ctx.budget(200_000), ctx.seed(0), 1e-6)?.value;
    Ok(vec![recorded("v(T1) lower estimate", v)])
}

const CLAIMS: &[Claim] = &[
    Claim {
        id: "hilbert-radius",
        reference: "v(T)=v((T+T*)/2)=‖(T+T*)/2‖",
        tolerance: 2e-2,
        run: hilbert_radius,
    },
    Claim {
        id: "hilbert-quotient",
        reference: "‖T+Z(H)‖=‖(T+T*)/2‖; n'(H)=1",
        tolerance: 3e-2,
        run: hilbert_quotient,
    },
    Claim {
        id: "lie-dimensions",
        reference: "dim Z(ℓ₂ⁿ)=n(n−1)/2; Z(ℓ_p^n)={0} for p≠2; Z(ℓ₂²⊕_aℝ) is one rotation block",
        tolerance: 0.0,
        run: lie_dimensions,
    },
    Claim {
        id: "classical-index",
        reference: "n(ℓ_1^2)=n(ℓ_∞^2)=1, n(ℓ_2^2)=0",
        tolerance: 3e-2,
        run: classical_index,
    },
    Claim {
        id: "sum-operator-bounds",
        reference: "v(T_1) ≤ 3/2 and ‖T_1+Z(X)‖ ≥ √3 on ℓ₂²⊕_∞ℝ; v(T_2) ≤ 3/2 and ‖T_2+Z(X)‖ ≥ √3 on ℓ₂²⊕_1ℝ",
        tolerance: 3e-2,
        run: sum_operator_bounds,
    },
    Claim {
        id: "second-index-sandwich",
        reference: "1/2 ≤ n'(ℓ₂²⊕_aℝ) ≤ √3/2 for a ∈ {1, ∞}",
        tolerance: 3e-2,
        run: second_index_sandwich,
    },
    Claim {
        id: "sum-monotonicity",
        reference: "n'(Y⊕_aW) ≤ min{n'(Y), n'(W)}",
        tolerance: 4e-2,
        run: sum_monotonicity,
    },
    Claim {
        id: "lifting",
        reference: "‖T̃‖=‖T‖, v(T̃)=v(T), ‖T̃+Z(X)‖=‖T+Z(Y)‖ for T̃(y+w)=Ty",
        tolerance: 4e-2,
        run: lifting,
    },
    Claim {
        id: "duality-radius",
        reference: "v(T)=v(T*)",
        tolerance: 3e-2,
        run: duality_radius,
    },
    Claim {
        id: "duality-second-index",
        reference: "n'(X*)=n'(X) for reflexive X",
        tolerance: 6e-2,
        run: duality_second_index,
    },
    Claim {
        id: "shift-lemma",
        reference: "max{|e_1+e_2|,|e_1^*+e_2^*|} ≥ 1−√(1−k²)+k; ‖ae_1+be_2‖₁ ≤ (3−ξ)|ae_1+be_2|",
        tolerance: 2e-2,
        run: shift_lemma,
    },
    Claim {
        id: "ck-model",
        reference: "v(T) ≤ 3/2 and ‖T+Z(X)‖ ≥ √3 for T(f,g)=(f,√2 f(t_2)), so n'(C(K,ℓ₂²)) ≤ √3/2",
        tolerance: 3e-2,
        run: ck_model,
    },
    Claim {
        id: "non-hilbert-upper",
        reference: "a non-Hilbert space with Z(X)≠{0} has n'(X)<1",
        tolerance: 0.0,
        run: non_hilbert_upper,
    },
    Claim {
        id: "positive-operator-bound",
        reference: "n(X) ≤ v(U)/‖U‖ for a positive operator U on the outer norm",
        tolerance: 4e-2,
        run: positive_operator_bound,
    },
    Claim {
        id: "sum-sandwich",
        reference: "min{n(Y), 1/2} ≤ n'(Y⊕_∞ℓ₂²) ≤ n(Y)",
        tolerance: 4e-2,
        run: sum_sandwich,
    },
    Claim {
        id: "index-trend",
        reference: "n(ℓ_p^2) → 0 as p → 2",
        tolerance: 0.0,
        run: index_trend,
    },
    Claim {
        id: "lp-index-values",
        reference: "the exact value of n(ℓ_p^2) is unknown",
        tolerance: 0.0,
        run: lp_index_values,
    },
    Claim {
        id: "t1-radius-value",
        reference: "v(T_1) ≤ 3/2, equality open",
        tolerance: 0.0,
        run: t1_radius_value,
    },
];

/// All registered claim ids, sorted.
pub fn claim_ids() -> Vec<&'static str> {
    let mut ids: Vec<_> = CLAIMS.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    ids
}

fn select(filter: Option<&str>) -> Result<Vec<(u64, &'static Claim)>> {
    let all: Vec<(u64, &Claim)> = CLAIMS.iter().enumerate().map(|(i, c)| (i as u64, c)).collect();
    let Some(filter) = filter.map(str::trim).filter(|f| !f.is_empty()) else {
        return Ok(all);
    };
    let tokens: Vec<&str> = filter.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    for t in &tokens {
        if !all.iter().any(|(_, c)| c.id.starts_with(t)) {
            return Err(Error::UnknownClaim((*t).into()));
        }
    }
    Ok(all
        .into_iter()
        .filter(|(_, c)| tokens.iter().any(|t| c.id.starts_with(t)))
        .collect())
}

/// Runs the selected claims; results are ordered by claim id.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<ClaimResult>> {
    if !(config.scale > 0.0 && config.scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale {} must be positive", config.scale)));
    }
    let selected = select(config.filter.as_deref())?;
    let mut results: Vec<ClaimResult> = selected
        .par_iter()
        .map(|(salt, claim)| {
            let ctx = Ctx {
                seed: config.seed,
                scale: config.scale,
                salt: *salt,
            };
            match (claim.run)(&ctx) {
                Ok(checks) => ClaimResult::from_checks(claim, checks),
                Err(e) => ClaimResult::failed(claim, &e),
            }
        })
        .collect();
    results.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Ok(results)
}

/// One CSV row per computed value.
pub fn write_csv<W: std::io::Write>(results: &[ClaimResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["claim_id", "status", "margin", "tolerance", "label", "computed", "expected", "reference"])?;
    for r in results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Recorded => "recorded",
        };
        let rows = r.labels.len().max(1);
        for i in 0..rows {
            w.write_record([
                r.claim_id.as_str(),
                status,
                &r.margin.to_string(),
                &r.tolerance.to_string(),
                r.labels.get(i).map_or("", String::as_str),
                &r.computed.get(i).map_or(String::new(), f64::to_string),
                &r.expected.get(i).map_or(String::new(), Bound::render),
                r.reference.as_str(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
