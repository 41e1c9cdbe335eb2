//! Explicit spaces and operators: sums, lifts, shift operators, the
//! two-block operators `T1`/`T2`, and the finite model of `C(K, l_2^2)`.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{numerical_radius, Operator};
use crate::rng::{self, streams};
use crate::space::{lp_norm, Gauge2d, Kind, SpaceSpec};

/// `left (+)_outer right`.
pub fn absolute_sum(left: SpaceSpec, right: SpaceSpec, outer: SpaceSpec) -> Result<SpaceSpec> {
    SpaceSpec::absolute_sum(outer, left, right)
}

/// `[(+) X_i]_E`.
pub fn esum(e: SpaceSpec, summands: Vec<SpaceSpec>) -> Result<SpaceSpec> {
    SpaceSpec::esum(e, summands)
}

/// A unit vector of `space` and a norming functional for it. The first
/// coordinate vector is normalized; for absolute norms it is already unit.
pub fn reference_pair(space: &SpaceSpec) -> (Vec<f64>, Vec<f64>) {
    let mut y = vec![0.0; space.dim()];
    y[0] = 1.0;
    let n = space.eval_norm(&y);
    y.iter_mut().for_each(|v| *v /= n);
    let (ystar, _) = space.subgradient(&y).expect("dimension matches");
    (y, ystar)
}

/// Places `m` as the diagonal block `block` of an operator on `sum`, zero elsewhere.
pub fn embed_block(m: &DMatrix<f64>, sum: &SpaceSpec, block: usize) -> Result<Operator> {
    let blocks = sum.blocks();
    let r = blocks.get(block).ok_or_else(|| {
        Error::InvalidArgument(format!("block {block} out of range ({} blocks)", blocks.len()))
    })?;
    if m.nrows() != r.len() || m.ncols() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: r.len(),
            got: m.nrows(),
        });
    }
    let n = sum.dim();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(m);
    Operator::new(out, sum.clone())
}

/// `T~(y + w) = T y` on `Y (+)_a W`, with `Y` the left summand.
///
/// Refused for the Euclidean outer norm, where skew-hermitian operators
/// need not be block diagonal and the quotient norm is not preserved.
pub fn lift_operator(t: &Operator, sum: &SpaceSpec) -> Result<Operator> {
    let Kind::AbsoluteSum { outer, left, .. } = sum.kind() else {
        return Err(Error::InvalidArgument("lift target must be an absolute sum".into()));
    };
    if outer.lp_exponent() == Some(2.0) {
        return Err(Error::InvalidArgument(
            "lifting needs a non-Euclidean outer norm (Z(X) is not block diagonal for (+)_2)".into(),
        ));
    }
    if **left != *t.space() {
        return Err(Error::InvalidArgument(format!(
            "operator acts on {} but the left summand is {}",
            t.space().describe(),
            left.describe()
        )));
    }
    embed_block(t.matrix(), sum, 0)
}

fn two_block_parts(sum: &SpaceSpec) -> Result<(usize, usize)> {
    let Kind::AbsoluteSum { left, right, .. } = sum.kind() else {
        return Err(Error::InvalidArgument("expected an absolute sum H (+) W".into()));
    };
    if !left.is_hilbert() {
        return Err(Error::InvalidArgument(format!(
            "left summand must be Euclidean of dimension >= 2, got {}",
            left.describe()
        )));
    }
    Ok((left.dim(), right.dim()))
}

/// `T1(y, w) = ((y1|y) y1 + sqrt2 w*(w) y2, 0)` on `H (+) W`, with `y1, y2`
/// the first two basis vectors of `H` and `w*` norming the first unit vector of `W`.
pub fn example_t1(sum: &SpaceSpec) -> Result<Operator> {
    let (h, _) = two_block_parts(sum)?;
    let Kind::AbsoluteSum { right, .. } = sum.kind() else { unreachable!() };
    let (_, wstar) = reference_pair(right);
    let n = sum.dim();
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 1.0;
    for (j, v) in wstar.iter().enumerate() {
        m[(1, h + j)] = SQRT_2 * v;
    }
    Operator::new(m, sum.clone())
}

/// `T2(y, w) = ((y1|y) y1, sqrt2 (y2|y) w1)` on `H (+) W`, `w1` the first unit vector of `W`.
pub fn example_t2(sum: &SpaceSpec) -> Result<Operator> {
    let (h, _) = two_block_parts(sum)?;
    let Kind::AbsoluteSum { right, .. } = sum.kind() else { unreachable!() };
    let (w1, _) = reference_pair(right);
    let n = sum.dim();
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 1.0;
    for (i, v) in w1.iter().enumerate() {
        m[(h + i, 1)] = SQRT_2 * v;
    }
    Operator::new(m, sum.clone())
}

/// `U1 = e2* (x) e1` maps `e2` to `e1`; `U2 = e1* (x) e2` maps `e1` to `e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    SecondToFirst,
    FirstToSecond,
}

impl std::str::FromStr for ShiftDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12" | "u1" | "U1" => Ok(Self::SecondToFirst),
            "21" | "u2" | "U2" => Ok(Self::FirstToSecond),
            _ => Err(Error::InvalidArgument(format!(
                "shift direction `{s}`: expected 12 (U1 = e2* x e1) or 21 (U2 = e1* x e2)"
            ))),
        }
    }
}

/// The rank-one coordinate transfer `e_source* (x) e_target` on a planar absolute norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    pub e: SpaceSpec,
    /// Zero-based coordinate read by the operator.
    pub source: usize,
    /// Zero-based coordinate written by the operator.
    pub target: usize,
    pub matrix: DMatrix<f64>,
}

impl ShiftOperator {
    pub fn operator(&self) -> Operator {
        Operator::new(self.matrix.clone(), self.e.clone()).expect("2x2")
    }
}

pub fn shift_operator(e: &SpaceSpec, direction: ShiftDirection) -> Result<ShiftOperator> {
    if e.dim() != 2 || !e.is_absolute() {
        return Err(Error::InvalidArgument(format!(
            "shift operators need a two-dimensional absolute norm, got {}",
            e.describe()
        )));
    }
    let (source, target) = match direction {
        ShiftDirection::SecondToFirst => (1, 0),
        ShiftDirection::FirstToSecond => (0, 1),
    };
    let mut matrix = DMatrix::zeros(2, 2);
    matrix[(target, source)] = 1.0;
    Ok(ShiftOperator {
        e: e.clone(),
        source,
        target,
        matrix,
    })
}

/// `T(x)(l) = [U a_x](l) y_l` with `a_x(l) = y_l*(x(l))`: a positive operator
/// `U` on the outer norm `E` acting on an `E`-sum through fixed duality
/// pairs `(y_l, y_l*)` of the summands. Keeps `|T| = |U|` and `v(T) <= v(U)`.
pub fn positive_lift(u: &DMatrix<f64>, sum: &SpaceSpec) -> Result<Operator> {
    let (outer, parts) = sum
        .sum_parts()
        .ok_or_else(|| Error::InvalidArgument("positive_lift needs a sum space".into()))?;
    if u.nrows() != outer.dim() || u.ncols() != outer.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            got: u.nrows(),
        });
    }
    if u.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("U must be entrywise nonnegative".into()));
    }
    let blocks = sum.blocks();
    let pairs: Vec<_> = parts.iter().map(|s| reference_pair(s)).collect();
    let n = sum.dim();
    let mut m = DMatrix::zeros(n, n);
    for (l, rl) in blocks.iter().enumerate() {
        for (mu, rm) in blocks.iter().enumerate() {
            let c = u[(l, mu)];
            if c == 0.0 {
                continue;
            }
            for (i, yi) in rl.clone().zip(&pairs[l].0) {
                for (j, ys) in rm.clone().zip(&pairs[mu].1) {
                    m[(i, j)] += c * yi * ys;
                }
            }
        }
    }
    Operator::new(m, sum.clone())
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftReport {
    pub space: SpaceSpec,
    pub v_u1: f64,
    pub v_u2: f64,
    /// `min(v(U1), v(U2))`.
    pub k: f64,
    /// `max(|e1 + e2|, |e1* + e2*|)`.
    pub lhs: f64,
    /// `1 - sqrt(1 - k^2) + k`.
    pub rhs: f64,
    pub margin: f64,
    /// `xi = |e1 + e2|`.
    pub xi: f64,
    /// Smallest `(3 - xi) |x| - |x|_1` over the tested points, relative to `|x|`.
    pub l1_margin: f64,
    pub l1_points: usize,
    pub pass: bool,
}

/// Tolerance on both margins of [`shift_bound_check`].
pub const SHIFT_TOL: f64 = 2e-2;

/// Checks `max(|e1+e2|, |e1*+e2*|) >= 1 - sqrt(1-k^2) + k` with
/// `k = min(v(U1), v(U2))` (sampled), and `|x|_1 <= (3 - |e1+e2|) |x|` on
/// random points.
pub fn shift_bound_check(e: &SpaceSpec, budget: usize, seed: u64) -> Result<ShiftReport> {
    let u1 = shift_operator(e, ShiftDirection::SecondToFirst)?.operator();
    let u2 = shift_operator(e, ShiftDirection::FirstToSecond)?.operator();
    let v_u1 = numerical_radius(&u1, budget, seed, 1e-6)?.value;
    let v_u2 = numerical_radius(&u2, budget, seed, 1e-6)?.value;
    let k = v_u1.min(v_u2).min(1.0);
    let ones = [1.0, 1.0];
    let xi = e.norm(&ones)?;
    let lhs = xi.max(e.dual_norm(&ones)?);
    let rhs = 1.0 - (1.0 - k * k).max(0.0).sqrt() + k;
    let margin = lhs - rhs;
    let mut r = rng::rng(seed, streams::SPHERE);
    let l1_points = budget.clamp(1, 10_000);
    let mut l1_margin = f64::INFINITY;
    for _ in 0..l1_points {
        let x = rng::gaussian_vec(&mut r, 2);
        let nx = e.norm(&x)?;
        l1_margin = l1_margin.min(((3.0 - xi) * nx - lp_norm(&x, 1.0)) / nx);
    }
    Ok(ShiftReport {
        space: e.clone(),
        v_u1,
        v_u2,
        k,
        lhs,
        rhs,
        margin,
        xi,
        l1_margin,
        l1_points,
        pass: margin >= -SHIFT_TOL && l1_margin >= -SHIFT_TOL,
    })
}

/// `[l_2^2, ..., l_2^2]_{l_inf^m}`: continuous `l_2^2`-valued functions on `m` points.
pub fn ck_space(m: usize) -> Result<SpaceSpec> {
    if m < 2 {
        return Err(Error::InvalidArgument("the C(K) model needs m >= 2 points".into()));
    }
    SpaceSpec::esum(
        SpaceSpec::lp(m, f64::INFINITY)?,
        vec![SpaceSpec::lp(2, 2.0)?; m],
    )
}

/// `T(f, g) = (f, sqrt2 f(t2))` on [`ck_space`], coordinates `(f(t), g(t))` at `2t, 2t+1`.
pub fn ck_operator(m: usize) -> Result<Operator> {
    let space = ck_space(m)?;
    let n = 2 * m;
    let mut a = DMatrix::zeros(n, n);
    for t in 0..m {
        a[(2 * t, 2 * t)] = 1.0;
        a[(2 * t + 1, 2)] = SQRT_2;
    }
    Operator::new(a, space)
}

/// A convex combination of two to four planar `l_p` norms with random exponents.
pub fn random_gauge(seed: u64) -> Gauge2d {
    let mut r = rng::rng(seed, streams::SUITE);
    use rand::Rng;
    let k = r.random_range(2..=4);
    let ps: Vec<f64> = (0..k)
        .map(|_| {
            if r.random_bool(0.15) {
                f64::INFINITY
            } else {
                (r.random_range(0.0..(8f64).ln())).exp()
            }
        })
        .collect();
    let w: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    Gauge2d::from_norm_fn(
        |s, t| {
            ps.iter()
                .zip(&w)
                .map(|(p, wi)| wi / total * lp_norm(&[s, t], *p))
                .sum()
        },
        crate::space::gauge::DEFAULT_INTERVALS,
    )
    .expect("convex combinations of absolute norms are absolute norms")
}

/// Sup-distance between boundary radii and the nearest of `l_1`, `l_2`, `l_inf`.
pub fn distance_to_classical(g: &Gauge2d) -> f64 {
    [1.0, 2.0, f64::INFINITY]
        .iter()
        .map(|p| g.table_distance(&Gauge2d::lp(*p, 512).expect("valid")))
        .fold(f64::INFINITY, f64::min)
}

/// First [`random_gauge`] from `seed` onward at table distance at least `margin`
/// from `l_1`, `l_2` and `l_inf`.
pub fn random_gauge_far(seed: u64, margin: f64) -> Gauge2d {
    (0..)
        .map(|k| random_gauge(seed.wrapping_add(k * 7919)))
        .find(|g| distance_to_classical(g) >= margin)
        .expect("unbounded search")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{numerical_radius_closed, op_norm};
    use approx::assert_abs_diff_eq;

    fn l(n: usize, p: f64) -> SpaceSpec {
        SpaceSpec::lp(n, p).unwrap()
    }

    #[test]
    fn sum_builders_reproduce_known_norms() {
        let mut r = rng::rng(1, 0);
        let l1 = absolute_sum(SpaceSpec::real(), SpaceSpec::real(), l(2, 1.0)).unwrap();
        let l4 = absolute_sum(l(2, 2.0), l(2, 2.0), l(2, 2.0)).unwrap();
        let e2 = esum(l(2, 2.0), vec![SpaceSpec::real(), SpaceSpec::real()]).unwrap();
        for _ in 0..100 {
            let x = rng::gaussian_vec(&mut r, 2);
            assert_abs_diff_eq!(l1.norm(&x).unwrap(), lp_norm(&x, 1.0), epsilon = 1e-9);
            assert_abs_diff_eq!(e2.norm(&x).unwrap(), lp_norm(&x, 2.0), epsilon = 1e-9);
            let y = rng::gaussian_vec(&mut r, 4);
            assert_abs_diff_eq!(l4.norm(&y).unwrap(), lp_norm(&y, 2.0), epsilon = 1e-9);
        }
        assert!(absolute_sum(l(2, 2.0), SpaceSpec::real(), l(3, 1.0)).is_err());
    }

    #[test]
    fn t1_and_t2_matrices() {
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, f64::INFINITY)).unwrap();
        let t1 = example_t1(&s).unwrap();
        assert_eq!(
            t1.rows(),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, SQRT_2], vec![0.0, 0.0, 0.0]]
        );
        let s1 = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, 1.0)).unwrap();
        let t2 = example_t2(&s1).unwrap();
        assert_eq!(t2.matrix(), &t1.matrix().transpose());
        let bad = absolute_sum(l(2, 3.0), SpaceSpec::real(), l(2, f64::INFINITY)).unwrap();
        assert!(example_t1(&bad).is_err());
    }

    #[test]
    fn shift_operators_have_unit_norm() {
        let e = l(2, 1.0);
        let u1 = shift_operator(&e, ShiftDirection::SecondToFirst).unwrap();
        assert_eq!(u1.matrix[(0, 1)], 1.0);
        assert_eq!(u1.matrix.iter().filter(|v| **v != 0.0).count(), 1);
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            let u = shift_operator(&l(2, p), ShiftDirection::FirstToSecond).unwrap();
            assert_abs_diff_eq!(op_norm(&u.operator(), 2000, 0).unwrap().value, 1.0, epsilon = 1e-9);
        }
        let g = SpaceSpec::gauge2d(random_gauge(3));
        let u = shift_operator(&g, ShiftDirection::SecondToFirst).unwrap();
        assert_abs_diff_eq!(op_norm(&u.operator(), 10, 0).unwrap().value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn shift_radii() {
        let v = |p: f64| {
            numerical_radius_closed(
                &shift_operator(&l(2, p), ShiftDirection::SecondToFirst).unwrap().operator(),
            )
            .unwrap()
        };
        assert_eq!(v(1.0), 1.0);
        assert_abs_diff_eq!(v(2.0), 0.5, epsilon = 1e-12);
        assert_eq!(v(f64::INFINITY), 1.0);
    }

    #[test]
    fn shift_bound_examples() {
        let r = shift_bound_check(&l(2, 1.0), 2000, 0).unwrap();
        assert_abs_diff_eq!(r.k, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rhs, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.lhs, 2.0, epsilon = 1e-12);
        assert!(r.pass);
        let r = shift_bound_check(&l(2, 2.0), 2000, 0).unwrap();
        assert_abs_diff_eq!(r.rhs, 1.5 - 0.75f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(r.lhs, SQRT_2, epsilon = 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn positive_lift_preserves_norm_and_bounds_radius() {
        let e = l(2, 3.0);
        let sum = absolute_sum(l(2, 2.0), l(2, 1.5), e.clone()).unwrap();
        let u = shift_operator(&e, ShiftDirection::SecondToFirst).unwrap();
        let t = positive_lift(&u.matrix, &sum).unwrap();
        assert_abs_diff_eq!(op_norm(&t, 4000, 1).unwrap().value, 1.0, epsilon = 1e-6);
        let vt = numerical_radius(&t, 4000, 1, 1e-6).unwrap().value;
        let vu = numerical_radius(&u.operator(), 4000, 1, 1e-6).unwrap().value;
        assert!(vt <= vu + 1e-6, "{vt} > {vu}");
    }

    #[test]
    fn ck_operator_layout() {
        let t = ck_operator(2).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.matrix()[(0, 0)], 1.0);
        assert_eq!(t.matrix()[(2, 2)], 1.0);
        assert_eq!(t.matrix()[(1, 2)], SQRT_2);
        assert_eq!(t.matrix()[(3, 2)], SQRT_2);
        assert_abs_diff_eq!(op_norm(&t, 4000, 0).unwrap().value, 3f64.sqrt(), epsilon = 1e-6);
        assert!(ck_operator(1).is_err());
    }

    #[test]
    fn lift_refuses_euclidean_outer() {
        let t = Operator::identity(l(2, 2.0));
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, 2.0)).unwrap();
        assert!(lift_operator(&t, &s).is_err());
        let s = absolute_sum(l(2, 2.0), SpaceSpec::real(), l(2, f64::INFINITY)).unwrap();
        let lifted = lift_operator(&t, &s).unwrap();
        assert_eq!(lifted.matrix()[(2, 2)], 0.0);
        assert_eq!(lifted.matrix()[(1, 1)], 1.0);
    }

    #[test]
    fn random_gauges_are_valid_and_far_ones_are_far() {
        for s in 0..10 {
            let g = random_gauge(s);
            assert_abs_diff_eq!(g.norm(1.0, 0.0), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(g.norm(0.0, 1.0), 1.0, epsilon = 1e-9);
        }
        let g = random_gauge_far(0, 0.1);
        assert!(distance_to_classical(&g) >= 0.1);
    }
}
