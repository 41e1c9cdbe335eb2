//! Invariant checks shared by the property tests and the acceptance run.
//! Each check draws its instance from one seed and reports a violation as `Err`.

#![allow(dead_code)]

use nalgebra::DMatrix;
use nidx::constructions::{
    absolute_sum, ck_space, esum, lift_operator, random_gauge, random_gauge_far, shift_operator, ShiftDirection,
};
use nidx::quotient::{index_ratio, radius_estimate};
use nidx::rng::{self, Rng};
use nidx::suite::{run_suite, write_csv, SuiteConfig};
use nidx::{
    estimate_index_with, estimate_second_index_dual_pair, estimate_second_index_with, lie_basis, numerical_radius,
    numerical_radius_closed, op_norm, quotient_norm, IndexEstimate, LieBasis, Operator, SearchOptions, SpaceSpec,
};
use rand::{Rng as _, RngCore as _};

pub type Check = fn(u64) -> Result<(), String>;

const INF: f64 = f64::INFINITY;
const PS: [f64; 8] = [1.0, 1.25, 1.5, 1.8, 2.0, 3.0, 4.0, INF];

pub fn rng(seed: u64) -> Rng {
    rng::rng(seed, 0x7e57)
}

pub fn lp(n: usize, p: f64) -> SpaceSpec {
    SpaceSpec::lp(n, p).expect("valid exponent")
}

fn pick<T: Clone>(r: &mut Rng, items: &[T]) -> T {
    items[r.random_range(0..items.len())].clone()
}

pub fn planar(r: &mut Rng) -> SpaceSpec {
    if r.random_bool(0.3) {
        SpaceSpec::gauge2d(random_gauge(r.next_u64()))
    } else {
        lp(2, pick(r, &PS))
    }
}

/// Planar outer norms other than `l_2`.
pub fn outer(r: &mut Rng) -> SpaceSpec {
    match r.random_range(0..4) {
        0 => lp(2, 1.0),
        1 => lp(2, INF),
        2 => lp(2, pick(r, &[1.5, 3.0])),
        _ => SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1)),
    }
}

fn piece(r: &mut Rng) -> SpaceSpec {
    if r.random_bool(0.3) {
        SpaceSpec::real()
    } else {
        planar(r)
    }
}

pub fn any_space(r: &mut Rng) -> SpaceSpec {
    match r.random_range(0..6) {
        0 => lp(r.random_range(1..=5), pick(r, &PS)),
        1 => planar(r),
        2 => absolute_sum(piece(r), piece(r), planar(r)).expect("sum"),
        3 => esum(planar(r), vec![piece(r), piece(r)]).expect("esum"),
        4 => SpaceSpec::dual_of(absolute_sum(piece(r), piece(r), planar(r)).expect("sum")),
        _ => SpaceSpec::dual_of(planar(r)),
    }
}

/// Spaces with a nonzero Lie algebra.
pub fn lie_space(r: &mut Rng) -> SpaceSpec {
    match r.random_range(0..6) {
        0 => lp(r.random_range(2..=4), 2.0),
        1 => absolute_sum(lp(2, 2.0), SpaceSpec::real(), outer(r)).expect("sum"),
        2 => absolute_sum(lp(2, 2.0), lp(2, 2.0), outer(r)).expect("sum"),
        3 => absolute_sum(lp(2, 2.0), planar(r), outer(r)).expect("sum"),
        4 => ck_space(2).expect("ck"),
        _ => esum(outer(r), vec![lp(2, 2.0), piece(r)]).expect("esum"),
    }
}

pub fn gaussian_matrix(n: usize, r: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng::gaussian(r))
}

pub fn operator(space: &SpaceSpec, r: &mut Rng) -> Operator {
    Operator::new(gaussian_matrix(space.dim(), r), space.clone()).expect("square")
}

fn basis(space: &SpaceSpec, seed: u64) -> Result<LieBasis, String> {
    let n = space.dim();
    lie_basis(space, 40 * n * n, seed).map_err(|e| e.to_string())
}

fn lie_element(b: &LieBasis, r: &mut Rng) -> DMatrix<f64> {
    let n = b.space.dim();
    b.elements
        .iter()
        .fold(DMatrix::zeros(n, n), |acc, s| acc + s * (2.0 * rng::gaussian(r)))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lean(seed: u64) -> SearchOptions {
    SearchOptions {
        max_evals: Some(150),
        refine_rounds: 1,
        quotient_restarts: 2,
        ..SearchOptions::new(1, 1000, seed)
    }
}

// ---- spaces

pub fn norm_axioms(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let n = s.dim();
    let x = rng::gaussian_vec(&mut r, n);
    let y = rng::gaussian_vec(&mut r, n);
    let a = 3.0 * rng::gaussian(&mut r);
    let norm = |v: &[f64]| s.norm(v).unwrap();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
    ensure(norm(&xy) <= norm(&x) + norm(&y) + 1e-9, || format!("triangle fails on {}", s.describe()))?;
    let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
    let want = a.abs() * norm(&x);
    ensure((norm(&ax) - want).abs() <= 1e-12 * want.max(1.0), || {
        format!("homogeneity fails on {}: {} vs {want}", s.describe(), norm(&ax))
    })
}

pub fn absoluteness(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = match r.random_range(0..3) {
        0 => absolute_sum(piece(&mut r), piece(&mut r), planar(&mut r)).unwrap(),
        1 => esum(planar(&mut r), vec![piece(&mut r), piece(&mut r)]).unwrap(),
        _ => SpaceSpec::gauge2d(random_gauge(r.next_u64())),
    };
    let x = rng::gaussian_vec(&mut r, s.dim());
    let base = s.norm(&x).unwrap();
    let blocks = if s.sum_parts().is_some() { s.blocks() } else { (0..s.dim()).map(|i| i..i + 1).collect() };
    for b in blocks {
        let mut y = x.clone();
        y[b.clone()].iter_mut().for_each(|v| *v = -*v);
        let ny = s.norm(&y).unwrap();
        ensure((ny - base).abs() <= 1e-12 * base.max(1.0), || {
            format!("sign flip of block {b:?} changes the norm on {}: {base} -> {ny}", s.describe())
        })?;
    }
    Ok(())
}

pub fn l1_linf_sandwich(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let x = rng::gaussian_vec(&mut r, s.dim());
    let v = s.norm(&x).unwrap();
    let sup = x.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    let sum: f64 = x.iter().map(|t| t.abs()).sum();
    ensure(sup <= v + 1e-9 && v <= sum + 1e-9, || {
        format!("{sup} <= {v} <= {sum} fails on {}", s.describe())
    })
}

pub fn duality_pair_contract(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let mut x = rng::gaussian_vec(&mut r, s.dim());
    let nx = s.norm(&x).unwrap();
    x.iter_mut().for_each(|v| *v /= nx);
    let p = s.norming_functional(&x).map_err(|e| e.to_string())?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let name = s.describe();
    ensure((s.norm(&p.x).unwrap() - 1.0).abs() <= 1e-9, || format!("|x| != 1 on {name}"))?;
    ensure(s.dual_norm(&p.xstar).unwrap() <= 1.0 + 1e-9, || format!("|x*| > 1 on {name}"))?;
    ensure(dot(&p.xstar, &p.x) >= 1.0 - p.gap - 1e-12, || format!("<x*, x> below 1 - gap on {name}"))?;
    for _ in 0..8 {
        let y = rng::gaussian_vec(&mut r, s.dim());
        let bound = s.dual_norm(&p.xstar).unwrap() * s.norm(&y).unwrap();
        ensure(dot(&p.xstar, &y).abs() <= bound + 1e-9, || format!("|<x*, y>| exceeds the bound on {name}"))?;
    }
    Ok(())
}

// ---- operators

pub fn radius_below_norm(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let t = operator(&s, &mut r);
    let v = numerical_radius(&t, 2000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    let n = op_norm(&t, 2000, seed).map_err(|e| e.to_string())?.value;
    ensure(v <= n + 2e-2, || format!("v = {v} > |T| = {n} on {}", s.describe()))
}

pub fn radius_homogeneity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = 3.0 * rng::gaussian(&mut r);
    let closed = lp(r.random_range(2..=5), pick(&mut r, &[1.0, 2.0, INF]));
    let t = operator(&closed, &mut r);
    let (v, va) = (numerical_radius_closed(&t).unwrap(), numerical_radius_closed(&t.scaled(a)).unwrap());
    ensure((va - a.abs() * v).abs() <= 1e-9 * v.max(1.0), || format!("closed radius not homogeneous on {}", closed.describe()))?;
    let s = any_space(&mut r);
    let t = operator(&s, &mut r);
    let v = numerical_radius(&t, 2000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    let va = numerical_radius(&t.scaled(a), 2000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    ensure((va - a.abs() * v).abs() <= 2e-2, || {
        format!("sampled v({a} T) = {va} vs |a| v(T) = {} on {}", a.abs() * v, s.describe())
    })
}

/// Independent formulas: column sums on `l_1`, row sums on `l_inf`, symmetric part on `l_2`.
fn radius_oracle(m: &DMatrix<f64>, p: f64) -> f64 {
    let n = m.nrows();
    if p == 2.0 {
        let sym = (m + m.transpose()) * 0.5;
        return sym.symmetric_eigenvalues().amax();
    }
    let entry = |i: usize, j: usize| if p == 1.0 { m[(j, i)] } else { m[(i, j)] };
    (0..n)
        .map(|i| entry(i, i).abs() + (0..n).filter(|&j| j != i).map(|j| entry(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn closed_vs_sampled(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let p = pick(&mut r, &[1.0, 2.0, INF]);
    let s = lp(r.random_range(2..=5), p);
    let t = operator(&s, &mut r);
    let closed = numerical_radius_closed(&t).ok_or("no closed form")?;
    let oracle = radius_oracle(t.matrix(), p);
    ensure((closed - oracle).abs() <= 1e-9 * oracle.max(1.0), || format!("closed {closed} vs oracle {oracle}"))?;
    let sampled = numerical_radius(&t, 100_000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    ensure((sampled - closed).abs() <= 2e-2, || {
        format!("sampled {sampled} vs closed {closed} on {}", s.describe())
    })
}

pub fn adjoint_radius(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let t = operator(&s, &mut r);
    let v = numerical_radius(&t, 3000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    let va = numerical_radius(&t.adjoint(), 3000, seed, 1e-6).map_err(|e| e.to_string())?.value;
    ensure((v - va).abs() <= 3e-2, || format!("v(T) = {v}, v(T*) = {va} on {}", s.describe()))
}

// ---- Lie algebra

pub fn radius_invariant_under_lie(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = lie_space(&mut r);
    let b = basis(&s, seed)?;
    let t = operator(&s, &mut r);
    let moved = t.with_matrix(t.matrix() + lie_element(&b, &mut r));
    let v = radius_estimate(&t, 3000, seed).map_err(|e| e.to_string())?.value;
    let vm = radius_estimate(&moved, 3000, seed).map_err(|e| e.to_string())?.value;
    ensure((v - vm).abs() <= 3e-2, || format!("v(T) = {v}, v(T+S) = {vm} on {}", s.describe()))
}

pub fn block_diagonal_lie(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let y = pick(&mut r, &[lp(2, 2.0), lp(3, 2.0), SpaceSpec::real()]);
    let s = absolute_sum(y, piece(&mut r), outer(&mut r)).unwrap();
    let b = basis(&s, seed)?;
    let blocks = s.blocks();
    for e in &b.elements {
        for (i, bi) in blocks.iter().enumerate() {
            for (j, bj) in blocks.iter().enumerate() {
                if i == j {
                    continue;
                }
                let off = bi.clone().flat_map(|a| bj.clone().map(move |c| (a, c))).map(|(a, c)| e[(a, c)].abs());
                let worst = off.fold(0.0, f64::max);
                ensure(worst <= 1e-6, || format!("off-diagonal entry {worst} on {}", s.describe()))?;
            }
        }
    }
    Ok(())
}

pub fn hilbert_lie_dimension(seed: u64) -> Result<(), String> {
    let n = 2 + (seed % 4) as usize;
    let b = basis(&lp(n, 2.0), seed)?;
    ensure(b.dimension() == n * (n - 1) / 2, || format!("dim Z(l2^{n}) = {}", b.dimension()))
}

pub fn lie_reproducible(seed: u64) -> Result<(), String> {
    let s = lie_space(&mut rng(seed));
    let (a, b) = (basis(&s, seed)?, basis(&s, seed)?);
    ensure(a.elements == b.elements, || format!("two runs differ on {}", s.describe()))
}

// ---- quotient and indices

pub fn quotient_sandwich(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = lie_space(&mut r);
    let b = basis(&s, seed)?;
    let t = operator(&s, &mut r);
    let v = radius_estimate(&t, 3000, seed).map_err(|e| e.to_string())?.value;
    let q = quotient_norm(&t, &b, 2000, seed).map_err(|e| e.to_string())?.value;
    let n = op_norm(&t, 2000, seed).map_err(|e| e.to_string())?.value;
    ensure(v <= q + 3e-2 && q <= n + 3e-2, || format!("v = {v}, q = {q}, |T| = {n} on {}", s.describe()))
}

pub fn coset_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = lie_space(&mut r);
    let b = basis(&s, seed)?;
    let t = operator(&s, &mut r);
    let moved = t.with_matrix(t.matrix() + lie_element(&b, &mut r));
    let q = quotient_norm(&t, &b, 2000, seed).map_err(|e| e.to_string())?.value;
    let qm = quotient_norm(&moved, &b, 2000, seed).map_err(|e| e.to_string())?.value;
    ensure((q - qm).abs() <= 3e-2, || format!("q(T) = {q}, q(T+S) = {qm} on {}", s.describe()))
}

/// Value range and reproduction of the witness ratio with a fresh seed.
pub fn witness_contract(e: &IndexEstimate, basis: Option<&LieBasis>) -> Result<(), String> {
    let name = e.witness.space().describe();
    ensure((0.0..=1.03).contains(&e.value), || format!("value {} outside [0, 1.03] on {name}", e.value))?;
    let (ratio, _, _) =
        index_ratio(&e.witness, basis, 4000, e.seed ^ 0x5eed, 20).map_err(|err| err.to_string())?;
    ensure((ratio - e.value).abs() <= 3e-2, || format!("witness ratio {ratio} vs value {} on {name}", e.value))
}

fn summand(r: &mut Rng) -> SpaceSpec {
    if r.random_bool(0.1) {
        lp(3, 2.0)
    } else {
        lp(2, pick(r, &PS))
    }
}

pub fn sum_monotonicity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (y, w) = loop {
        let (y, w) = (summand(&mut r), summand(&mut r));
        if y.dim() + w.dim() < 6 {
            break (y, w);
        }
    };
    let ny = estimate_second_index_with(&y, &lean(seed)).map_err(|e| e.to_string())?;
    let nw = estimate_second_index_with(&w, &lean(seed + 1)).map_err(|e| e.to_string())?;
    let sum = absolute_sum(y, w, outer(&mut r)).unwrap();
    let ns = estimate_second_index_with(&sum, &lean(seed + 2)).map_err(|e| e.to_string())?;
    witness_contract(&ns, Some(&basis(&sum, seed)?))?;
    let bound = ny.value.min(nw.value);
    ensure(ns.value <= bound + 4e-2, || format!("n'({}) = {} > {bound}", sum.describe(), ns.value))
}

pub fn second_index_duality(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = if r.random_bool(0.7) {
        planar(&mut r)
    } else {
        absolute_sum(planar(&mut r), SpaceSpec::real(), planar(&mut r)).unwrap()
    };
    let (a, b) = estimate_second_index_dual_pair(&s, &lean(seed)).map_err(|e| e.to_string())?;
    ensure((a.value - b.value).abs() <= 6e-2, || {
        format!("n'(X) = {}, n'(X*) = {} on {}", a.value, b.value, s.describe())
    })
}

pub fn index_witness_contract(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    if r.random_bool(0.5) {
        let s = planar(&mut r);
        let e = estimate_index_with(&s, &lean(seed)).map_err(|e| e.to_string())?;
        witness_contract(&e, None)
    } else {
        let s = absolute_sum(lp(2, 2.0), piece(&mut r), outer(&mut r)).unwrap();
        let b = basis(&s, seed)?;
        let e = nidx::quotient::second_index_with_basis(&s, &b, &lean(seed)).map_err(|e| e.to_string())?;
        witness_contract(&e, Some(&b))
    }
}

// ---- constructions

/// `v(U) / |U|` for the shift `e2* (x) e1` on `E`.
fn shift_ratio(e: &SpaceSpec, seed: u64) -> Result<f64, String> {
    let u = shift_operator(e, ShiftDirection::SecondToFirst).map_err(|e| e.to_string())?.operator();
    let v = radius_estimate(&u, 4000, seed).map_err(|e| e.to_string())?.value;
    let n = op_norm(&u, 4000, seed).map_err(|e| e.to_string())?.value;
    Ok(v / n)
}

pub fn positive_operator_bound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let e = planar(&mut r);
    let s = esum(e.clone(), vec![piece(&mut r), piece(&mut r)]).unwrap();
    let bound = shift_ratio(&e, seed)?;
    let n = estimate_index_with(&s, &lean(seed)).map_err(|e| e.to_string())?.value;
    ensure(n <= bound + 4e-2, || format!("n({}) = {n} > v(U)/|U| = {bound}", s.describe()))
}

pub fn shift_second_index_bound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let e = outer(&mut r);
    let s = esum(e.clone(), vec![lp(2, 2.0), piece(&mut r)]).unwrap();
    let b = basis(&s, seed)?;
    let blocks = s.blocks();
    let diagonal = b.elements.iter().all(|m| {
        (0..s.dim()).all(|i| {
            (0..s.dim()).all(|j| blocks.iter().any(|k| k.contains(&i) && k.contains(&j)) || m[(i, j)].abs() <= 1e-6)
        })
    });
    if !diagonal {
        return Ok(());
    }
    let bound = shift_ratio(&e, seed)?;
    let n = nidx::quotient::second_index_with_basis(&s, &b, &lean(seed)).map_err(|e| e.to_string())?.value;
    ensure(n <= bound + 4e-2, || format!("n'({}) = {n} > v(U)/|U| = {bound}", s.describe()))
}

pub fn far_gauge_below_one(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = SpaceSpec::gauge2d(random_gauge_far(r.next_u64(), 0.1));
    let y = pick(&mut r, &[lp(2, 2.0), SpaceSpec::real()]);
    let s = absolute_sum(y, piece(&mut r), a).unwrap();
    let b = basis(&s, seed)?;
    let n = nidx::quotient::second_index_with_basis(&s, &b, &lean(seed)).map_err(|e| e.to_string())?.value;
    ensure(n <= 1.0 - 1e-2, || format!("n'({}) = {n}", s.describe()))
}

pub fn lifting_equalities(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let y = match r.random_range(0..3) {
        0 => lp(2, 2.0),
        1 => lp(3, 2.0),
        _ => planar(&mut r),
    };
    let sum = absolute_sum(y.clone(), piece(&mut r), outer(&mut r)).unwrap();
    let t = operator(&y, &mut r);
    let lifted = lift_operator(&t, &sum).map_err(|e| e.to_string())?;
    let err = |e: nidx::Error| e.to_string();
    let dn = op_norm(&lifted, 2000, seed).map_err(err)?.value - op_norm(&t, 2000, seed).map_err(err)?.value;
    let dv = radius_estimate(&lifted, 2000, seed).map_err(err)?.value - radius_estimate(&t, 2000, seed).map_err(err)?.value;
    let qy = quotient_norm(&t, &basis(&y, seed)?, 2000, seed).map_err(err)?.value;
    let qx = quotient_norm(&lifted, &basis(&sum, seed)?, 2000, seed).map_err(err)?.value;
    ensure(dn.abs() <= 4e-2 && dv.abs() <= 4e-2 && (qx - qy).abs() <= 4e-2, || {
        format!("norm {dn:+.3e}, radius {dv:+.3e}, quotient {qx} vs {qy} on {}", sum.describe())
    })
}

// ---- suite and command line

pub fn suite_deterministic(seed: u64) -> Result<(), String> {
    let config = SuiteConfig { seed, scale: 0.1, filter: Some("shift-lemma,sum-operator".into()) };
    let render = || -> Result<(String, Vec<u8>), String> {
        let res = run_suite(&config).map_err(|e| e.to_string())?;
        let mut csv = vec![];
        write_csv(&res, &mut csv).map_err(|e| e.to_string())?;
        Ok((serde_json::to_string(&res).unwrap(), csv))
    };
    let (a, b) = (render()?, render()?);
    ensure(a == b, || format!("seed {seed} gives different reports"))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv: Vec<String> = std::iter::once("nidx").chain(args.iter().copied()).map(String::from).collect();
    let code = nidx::cli::run(argv, &mut std::io::empty(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn cli_outputs_are_versioned(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = any_space(&mut r);
    let m = gaussian_matrix(s.dim(), &mut r);
    let rows: Vec<Vec<f64>> = m.row_iter().map(|row| row.iter().copied().collect()).collect();
    let space = s.to_json_string();
    let matrix = serde_json::to_string(&rows).unwrap();
    let command = pick(&mut r, &["radius", "opnorm", "space"]);
    let format = pick(&mut r, &["json", "csv"]);
    let seed_arg = seed.to_string();
    let mut args = vec![command, "--space", &space, "--seed", &seed_arg, "--format", format];
    if command != "space" {
        args.extend(["--matrix", &matrix, "--budget", "500"]);
    }
    let (code, out, err) = run_cli(&args);
    ensure(code == 0, || format!("{command} exited {code}: {err}"))?;
    if format == "json" {
        let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| format!("{command}: {e}"))?;
        ensure(v["schema"] == "1", || format!("{command}: schema field missing"))
    } else {
        let mut rd = csv::Reader::from_reader(out.as_bytes());
        let header = rd.headers().map_err(|e| e.to_string())?.clone();
        ensure(header.get(0) == Some("schema"), || format!("{command}: csv header {header:?}"))?;
        for rec in rd.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            ensure(rec.get(0) == Some("1"), || format!("{command}: row {rec:?}"))?;
        }
        Ok(())
    }
}

/// Every invariant, cheap ones first; the flag marks search-based checks.
pub const INVARIANTS: &[(&str, Check, bool)] = &[
    ("norm axioms", norm_axioms, false),
    ("absoluteness under block sign flips", absoluteness, false),
    ("l1/l_inf sandwich", l1_linf_sandwich, false),
    ("duality pair contract", duality_pair_contract, false),
    ("radius below operator norm", radius_below_norm, false),
    ("radius homogeneity", radius_homogeneity, false),
    ("closed vs sampled radius", closed_vs_sampled, false),
    ("adjoint radius", adjoint_radius, false),
    ("radius invariant under the Lie algebra", radius_invariant_under_lie, false),
    ("block-diagonal Lie algebra of sums", block_diagonal_lie, false),
    ("Hilbert Lie dimension", hilbert_lie_dimension, false),
    ("Lie basis reproducible", lie_reproducible, false),
    ("v <= quotient <= norm", quotient_sandwich, false),
    ("quotient coset invariance", coset_invariance, false),
    ("lifting equalities", lifting_equalities, false),
    ("suite determinism", suite_deterministic, false),
    ("CLI outputs versioned", cli_outputs_are_versioned, false),
    ("index witness contract", index_witness_contract, true),
    ("positive operator bound", positive_operator_bound, true),
    ("shift bound on second index", shift_second_index_bound, true),
    ("far gauge sums below one", far_gauge_below_one, true),
    ("second index under duality", second_index_duality, true),
    ("second index sum monotonicity", sum_monotonicity, true),
];
