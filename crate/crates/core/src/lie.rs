//! The Lie algebra `Z(X) = {S : v(S) = 0}` of skew-hermitian operators.
//!
//! Every duality pair `(x, x*)` gives one linear constraint `<x*, S x> = 0`
//! on the entries of `S`. The null space of a heavily overdetermined stack
//! of such constraints contains `Z(X)`; each candidate direction is then
//! checked against the sampled numerical radius.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{numerical_radius, op_norm, Operator};
use crate::rng::streams;
use crate::space::SpaceSpec;

/// Constraints per matrix entry when no budget is given.
pub const DEFAULT_CONSTRAINTS_PER_ENTRY: usize = 40;
/// Singular values below this fraction of the largest span the null space.
pub const NULL_THRESHOLD: f64 = 1e-8;
/// Minimum ratio between the smallest kept and largest dropped singular value.
pub const MIN_SVD_GAP: f64 = 10.0;
/// Candidates with `v(S) > VERIFY_TOL * |S|` are rejected.
pub const VERIFY_TOL: f64 = 1e-4;
/// Entries above this couple two coordinates.
pub const COUPLING_TOL: f64 = 1e-6;
const VERIFY_BUDGET: usize = 2000;
const RREF_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LieBasis {
    pub space: SpaceSpec,
    /// Frobenius-orthonormal, canonically ordered and signed.
    pub elements: Vec<DMatrix<f64>>,
    /// Sampled numerical radius of each element.
    pub residuals: Vec<f64>,
    pub constraint_count: usize,
    /// Smallest kept over largest dropped singular value (dropped values are
    /// floored at the threshold); `None` for a one-entry system.
    pub svd_gap: Option<f64>,
    /// Null-space directions that failed verification.
    pub rejected: usize,
}

#[derive(Serialize, Deserialize)]
struct LieBasisJson {
    space: SpaceSpec,
    dimension: usize,
    elements: Vec<Vec<Vec<f64>>>,
    residuals: Vec<f64>,
    constraint_count: usize,
    svd_gap: Option<f64>,
    rejected: usize,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl Serialize for LieBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LieBasisJson {
            space: self.space.clone(),
            dimension: self.elements.len(),
            elements: self.elements.iter().map(rows_of).collect(),
            residuals: self.residuals.clone(),
            constraint_count: self.constraint_count,
            svd_gap: self.svd_gap,
            rejected: self.rejected,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LieBasisJson::deserialize(d)?;
        let n = j.space.dim();
        let mut elements = Vec::with_capacity(j.elements.len());
        for rows in &j.elements {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(serde::de::Error::custom(format!("basis element is not {n}x{n}")));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            elements.push(DMatrix::from_row_slice(n, n, &flat));
        }
        Ok(Self {
            space: j.space,
            elements,
            residuals: j.residuals,
            constraint_count: j.constraint_count,
            svd_gap: j.svd_gap,
            rejected: j.rejected,
        })
    }
}

impl LieBasis {
    /// The trivial algebra `{0}`.
    pub fn trivial(space: SpaceSpec) -> Self {
        Self {
            space,
            elements: vec![],
            residuals: vec![],
            constraint_count: 0,
            svd_gap: None,
            rejected: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn operators(&self) -> Vec<Operator> {
        self.elements
            .iter()
            .map(|m| Operator::new(m.clone(), self.space.clone()).expect("square"))
            .collect()
    }

    /// `m - sum c_k S_k`.
    pub fn shift(&self, m: &DMatrix<f64>, c: &[f64]) -> DMatrix<f64> {
        let mut out = m.clone();
        for (s, ck) in self.elements.iter().zip(c) {
            out -= s * *ck;
        }
        out
    }

    /// Frobenius projection onto the orthogonal complement of the span.
    pub fn project_out(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let c: Vec<f64> = self.elements.iter().map(|s| s.dot(m)).collect();
        self.shift(m, &c)
    }

    /// Largest entry of any element outside the given diagonal blocks.
    pub fn off_block_max(&self, blocks: &[std::ops::Range<usize>]) -> f64 {
        let n = self.space.dim();
        let block_of = |i: usize| blocks.iter().position(|b| b.contains(&i));
        let mut worst = 0.0_f64;
        for s in &self.elements {
            for i in 0..n {
                for j in 0..n {
                    if block_of(i) != block_of(j) {
                        worst = worst.max(s[(i, j)].abs());
                    }
                }
            }
        }
        worst
    }
}

/// Sampled numerical radius of a candidate skew-hermitian operator.
pub fn verify_skew(s: &Operator, budget: usize, seed: u64) -> Result<f64> {
    Ok(numerical_radius(s, budget, seed, 1e-6)?.value)
}

/// Computes a verified basis of `Z(X)` from `budget` duality-pair constraints.
pub fn lie_basis(space: &SpaceSpec, budget: usize, seed: u64) -> Result<LieBasis> {
    let n = space.dim();
    let entries = n * n;
    if budget < 10 * entries {
        return Err(Error::InvalidArgument(format!(
            "lie_basis needs at least 10 * dim^2 = {} constraints, got {budget}",
            10 * entries
        )));
    }
    let (pairs, failed) =
        crate::operator::sample_pairs(space, budget, seed, streams::LIE);
    if pairs.len() < entries || 2 * failed > budget {
        return Err(Error::Numerical(format!(
            "only {} of {budget} constraint samples were smooth points",
            pairs.len()
        )));
    }
    // rows are vec(x* x^T) in row-major entry order i * n + j
    let mut a = DMatrix::<f64>::zeros(pairs.len(), entries);
    for (r, p) in pairs.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                a[(r, i * n + j)] = p.xstar[i] * p.x[j];
            }
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let smax = sigma[0];
    let tau = NULL_THRESHOLD * smax;
    let kept = sigma.iter().filter(|s| **s >= tau).count();
    let svd_gap = if smax == 0.0 {
        None
    } else if kept == 0 {
        Some(0.0)
    } else {
        let dropped = sigma.get(kept).copied().unwrap_or(0.0).max(tau);
        Some(sigma[kept - 1] / dropped)
    };
    if let Some(g) = svd_gap {
        if g < MIN_SVD_GAP {
            return Err(Error::Numerical(format!(
                "ambiguous null space: svd gap {g:.3e} < {MIN_SVD_GAP}; rerun with a larger budget"
            )));
        }
    }
    let null: Vec<Vec<f64>> = order[kept..]
        .iter()
        .map(|&k| vt.row(k).iter().copied().collect())
        .collect();
    let canonical = canonicalize(null);

    let mut basis = LieBasis {
        space: space.clone(),
        elements: vec![],
        residuals: vec![],
        constraint_count: pairs.len(),
        svd_gap,
        rejected: 0,
    };
    for (k, v) in canonical.into_iter().enumerate() {
        let m = DMatrix::from_row_slice(n, n, &v);
        let op = Operator::new(m.clone(), space.clone())?;
        let size = op_norm(&op, VERIFY_BUDGET, seed)?.value;
        let residual = verify_skew(&op, VERIFY_BUDGET, seed ^ (streams::LIE_VERIFY << 40) ^ k as u64)?;
        if residual <= VERIFY_TOL * size {
            basis.elements.push(m);
            basis.residuals.push(residual);
        } else {
            basis.rejected += 1;
        }
    }
    Ok(basis)
}

/// Reduced row echelon form with partial pivoting, then Gram-Schmidt in
/// pivot order with positive pivot entries: a fixed orthonormal basis of
/// the span, independent of how the span was found.
fn canonicalize(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return rows;
    }
    let width = rows[0].len();
    let mut pivots = Vec::with_capacity(k);
    let mut r = 0;
    for col in 0..width {
        if r == k {
            break;
        }
        let (best, val) = (r..k)
            .map(|i| (i, rows[i][col].abs()))
            .fold((r, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if val <= RREF_TOL {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][col];
        rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != 0.0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(r);
    for (mut v, &col) in rows.into_iter().zip(&pivots) {
        for u in &out {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= nv);
        if v[col] < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
        v.iter_mut().for_each(|a| {
            if a.abs() < 1e-14 {
                *a = 0.0
            }
        });
        out.push(v);
    }
    out
}

/// Coordinates coupled by some basis element, as connected components in
/// increasing order. Components of size two or more are candidate Hilbert
/// blocks; singletons form the part on which `Z(X)` acts trivially.
pub fn detect_components(space: &SpaceSpec, basis: &LieBasis) -> Result<Vec<Vec<usize>>> {
    let n = space.dim();
    if basis.space.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.space.dim(),
        });
    }
    let mut uf = UnionFind::<usize>::new(n);
    for s in &basis.elements {
        for i in 0..n {
            for j in 0..n {
                if i != j && s[(i, j)].abs() > COUPLING_TOL {
                    uf.union(i, j);
                }
            }
        }
    }
    let labels = uf.into_labeling();
    let mut comps: Vec<Vec<usize>> = vec![];
    let mut seen: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = labels[i];
        match seen[root] {
            Some(c) => comps[c].push(i),
            None => {
                seen[root] = Some(comps.len());
                comps.push(vec![i]);
            }
        }
    }
    Ok(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn l(n: usize, p: f64) -> SpaceSpec {
        SpaceSpec::lp(n, p).unwrap()
    }

    fn l2_sum_r(outer: f64) -> SpaceSpec {
        SpaceSpec::absolute_sum(l(2, outer), l(2, 2.0), SpaceSpec::real()).unwrap()
    }

    #[test]
    fn hilbert_algebra_is_the_skew_matrices() {
        for n in 2..=4 {
            let b = lie_basis(&l(n, 2.0), 40 * n * n, 1).unwrap();
            assert_eq!(b.dimension(), n * (n - 1) / 2);
            for s in &b.elements {
                assert!((s + s.transpose()).amax() < 1e-8);
            }
        }
    }

    #[test]
    fn polyhedral_and_lp_spaces_have_trivial_algebra() {
        for p in [1.0, 3.0, f64::INFINITY] {
            let b = lie_basis(&l(3, p), 360, 2).unwrap();
            assert_eq!(b.dimension(), 0, "p = {p}");
        }
    }

    #[test]
    fn sum_with_line_has_one_rotation_block() {
        let b = lie_basis(&l2_sum_r(f64::INFINITY), 360, 3).unwrap();
        assert_eq!(b.dimension(), 1);
        let r = 0.5f64.sqrt();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, r, 0.0, -r, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((&b.elements[0] - expect).amax() < 1e-8, "{}", b.elements[0]);
        let comps = detect_components(&l2_sum_r(f64::INFINITY), &b).unwrap();
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn canonical_form_is_seed_independent() {
        let a = lie_basis(&l(3, 2.0), 360, 4).unwrap();
        let b = lie_basis(&l(3, 2.0), 400, 5).unwrap();
        for (x, y) in a.elements.iter().zip(&b.elements) {
            assert!((x - y).amax() < 1e-8);
        }
    }

    #[test]
    fn verify_skew_examples() {
        let rot = Operator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]], l(2, 2.0)).unwrap();
        assert!(verify_skew(&rot, 1000, 0).unwrap() <= 1e-8);
        for s in [l(3, 1.0), l2_sum_r(1.0)] {
            let id = Operator::identity(s);
            assert_abs_diff_eq!(verify_skew(&id, 1000, 0).unwrap(), 1.0, epsilon = 2e-2);
        }
    }

    #[test]
    fn small_budget_is_rejected() {
        assert!(lie_basis(&l(3, 2.0), 89, 0).is_err());
    }

    #[test]
    fn components_of_full_and_empty_algebras() {
        let b = lie_basis(&l(4, 2.0), 640, 0).unwrap();
        assert_eq!(detect_components(&l(4, 2.0), &b).unwrap(), vec![vec![0, 1, 2, 3]]);
        let b = lie_basis(&l(3, 1.0), 360, 0).unwrap();
        assert_eq!(
            detect_components(&l(3, 1.0), &b).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn json_round_trip() {
        let b = lie_basis(&l2_sum_r(1.0), 360, 3).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: LieBasis = serde_json::from_str(&s).unwrap();
        assert_eq!(back.dimension(), 1);
        assert!((&back.elements[0] - &b.elements[0]).amax() < 1e-15);
    }
}
