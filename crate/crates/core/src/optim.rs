//! Derivative-free local optimizers.

/// Nelder-Mead options. The adaptive coefficients depend on the dimension.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the simplex function spread drops below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter drops below this.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-10,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

impl NelderMead {
    /// Minimizes `f` from `x0` with an axis-aligned initial simplex of size `step`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], step: f64) -> Minimum {
        let n = x0.len();
        if n == 0 {
            let v = f(x0);
            return Minimum {
                x: vec![],
                f: v,
                evals: 1,
            };
        }
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (
            1.0,
            1.0 + 2.0 / nf,
            0.75 - 1.0 / (2.0 * nf),
            1.0 - 1.0 / nf.max(2.0),
        );
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut evals = 0;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[n].1);
            let spread = (worst - best).abs();
            let diam = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
                })
                .fold(0.0_f64, f64::max);
            if spread <= self.f_tol * (1.0 + best.abs()) && diam <= self.x_tol.max(1e-14) * 1e3
                || diam <= self.x_tol
            {
                break;
            }
            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / nf;
                }
            }
            let point = |coef: f64, out: &mut Vec<f64>, worst: &[f64]| {
                for i in 0..n {
                    out[i] = centroid[i] + coef * (centroid[i] - worst[i]);
                }
            };
            let worst_x = simplex[n].0.clone();
            point(alpha, &mut trial, &worst_x);
            let fr = eval(&trial, &mut evals);
            if fr < simplex[0].1 {
                let xr = trial.clone();
                point(alpha * beta, &mut trial, &worst_x);
                let fe = eval(&trial, &mut evals);
                simplex[n] = if fe < fr { (trial.clone(), fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (trial.clone(), fr);
            } else {
                let outside = fr < worst;
                let coef = if outside { alpha * gamma } else { -gamma };
                point(coef, &mut trial, &worst_x);
                let fc = eval(&trial, &mut evals);
                if fc < fr.min(worst) {
                    simplex[n] = (trial.clone(), fc);
                } else {
                    let best_x = simplex[0].0.clone();
                    for (x, fx) in simplex.iter_mut().skip(1) {
                        for i in 0..n {
                            x[i] = best_x[i] + delta * (x[i] - best_x[i]);
                        }
                        *fx = eval(x, &mut evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, f) = simplex.swap_remove(0);
        Minimum { x, f, evals }
    }
}

/// Greedy pattern-search ascent with a finite-difference gradient direction.
///
/// Each iteration tries a step along the central-difference gradient, then
/// the signed coordinate directions; the step halves when nothing improves.
/// Works on kinked objectives where plain gradient ascent stalls.
#[derive(Debug, Clone, Copy)]
pub struct PatternAscent {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iters: usize,
    pub fd_step: f64,
}

impl Default for PatternAscent {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-10,
            max_iters: 200,
            fd_step: 1e-5,
        }
    }
}

impl PatternAscent {
    pub fn maximize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> (Vec<f64>, f64) {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut fx = f(&x);
        let mut h = self.initial_step;
        let mut trial = vec![0.0; n];
        let mut grad = vec![0.0; n];
        for _ in 0..self.max_iters {
            if h < self.min_step {
                break;
            }
            for j in 0..n {
                trial.copy_from_slice(&x);
                trial[j] += self.fd_step;
                let up = f(&trial);
                trial[j] -= 2.0 * self.fd_step;
                let down = f(&trial);
                grad[j] = (up - down) / (2.0 * self.fd_step);
            }
            let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            let mut moved = false;
            if gn > 0.0 && gn.is_finite() {
                for i in 0..n {
                    trial[i] = x[i] + h * grad[i] / gn;
                }
                let ft = f(&trial);
                if ft > fx {
                    x.copy_from_slice(&trial);
                    fx = ft;
                    moved = true;
                    h *= 1.5;
                }
            }
            if !moved {
                'coords: for j in 0..n {
                    for s in [1.0, -1.0] {
                        trial.copy_from_slice(&x);
                        trial[j] += s * h;
                        let ft = f(&trial);
                        if ft > fx {
                            x.copy_from_slice(&trial);
                            fx = ft;
                            moved = true;
                            h = (h * 2.0).min(self.initial_step);
                            break 'coords;
                        }
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        (x, fx)
    }
}
