//! Coordinates in which the kinks of a sum norm lie on coordinate patterns.
//!
//! A sum point is written as outer weights `w` followed by one direction per
//! block of dimension above one; block `i` is `w_i * u_i / |u_i|`. Equal block
//! norms and vanishing blocks then read `|w_i| = max |w_j|` and `w_i = 0`,
//! which a coordinate snap can reach exactly.

use std::ops::Range;

use super::{Kind, SpaceSpec};

impl SpaceSpec {
    pub(crate) fn chart_dim(&self) -> usize {
        match self.sum_parts() {
            Some((outer, parts)) => {
                outer.dim + parts.iter().filter(|s| s.dim > 1).map(|s| s.chart_dim()).sum::<usize>()
            }
            None => self.dim,
        }
    }

    /// Point (not normalized) with chart coordinates `z`.
    pub(crate) fn chart_point(&self, z: &[f64], out: &mut [f64]) {
        let Some((outer, parts)) = self.sum_parts() else {
            out.copy_from_slice(z);
            return;
        };
        let mut zc = outer.dim;
        let mut xc = 0;
        for (i, s) in parts.iter().enumerate() {
            let w = z[i];
            let block = &mut out[xc..xc + s.dim];
            if s.dim == 1 {
                block[0] = w;
            } else {
                let k = s.chart_dim();
                s.chart_point(&z[zc..zc + k], block);
                zc += k;
                let nb = s.eval_norm(block);
                if nb > 0.0 && nb.is_finite() {
                    block.iter_mut().for_each(|v| *v *= w / nb);
                } else {
                    block.iter_mut().for_each(|v| *v = 0.0);
                }
            }
            xc += s.dim;
        }
    }

    /// Chart coordinates of `x`; zero blocks get the direction of all ones.
    pub(crate) fn chart_coords(&self, x: &[f64]) -> Vec<f64> {
        let Some((outer, parts)) = self.sum_parts() else {
            return x.to_vec();
        };
        let mut w = Vec::with_capacity(self.chart_dim());
        let mut dirs = vec![];
        let mut xc = 0;
        for s in &parts {
            let block = &x[xc..xc + s.dim];
            xc += s.dim;
            if s.dim == 1 {
                w.push(block[0]);
                continue;
            }
            let nb = s.eval_norm(block);
            w.push(nb);
            if nb > 0.0 {
                dirs.extend(s.chart_coords(block));
            } else {
                let ones = vec![1.0; s.dim];
                dirs.extend(s.chart_coords(&ones));
            }
        }
        debug_assert_eq!(w.len(), outer.dim);
        w.extend(dirs);
        w
    }

    /// Coordinate groups whose kinks sit at `0` or at the group's largest modulus.
    pub(crate) fn chart_groups(&self) -> Vec<Range<usize>> {
        let mut groups = vec![];
        self.push_groups(0, &mut groups);
        groups
    }

    fn push_groups(&self, offset: usize, groups: &mut Vec<Range<usize>>) {
        match self.sum_parts() {
            Some((outer, parts)) => {
                groups.push(offset..offset + outer.dim);
                let mut zc = offset + outer.dim;
                for s in parts.iter().filter(|s| s.dim > 1) {
                    s.push_groups(zc, groups);
                    zc += s.chart_dim();
                }
            }
            None => {
                if !matches!(self.kind, Kind::Lp { p } if p == 2.0) {
                    groups.push(offset..offset + self.dim);
                }
            }
        }
    }
}
