//! Nelder–Mead simplex minimiser with restarts.

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    /// Iteration budget per restart.
    pub max_iter: usize,
    /// Stop once the objective falls to this value.
    pub f_target: f64,
    /// Stop once the simplex spans less than this in every coordinate and the
    /// objective spread is below `f_spread`.
    pub x_tol: f64,
    pub f_spread: f64,
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            f_target: 0.0,
            x_tol: 1e-12,
            f_spread: 1e-30,
            restarts: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    /// Whether the last restart stopped on a tolerance rather than the budget.
    pub converged: bool,
}

pub(crate) fn minimize<F>(f: F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = x0.to_vec();
    let mut best_f = eval(&best);
    let mut total = 0;
    let mut converged = false;
    for _ in 0..=opts.restarts {
        let (x, fx, iters, conv) = run(&eval, &best, step, &opts);
        total += iters;
        let improved = fx < best_f;
        if fx <= best_f {
            best = x;
            best_f = fx;
        }
        converged = conv;
        if best_f <= opts.f_target || (conv && !improved) {
            break;
        }
    }
    SimplexResult {
        x: best,
        fx: best_f,
        iterations: total,
        converged: converged || best_f <= opts.f_target,
    }
}

fn run<F>(f: &F, x0: &[f64], step: &[f64], opts: &SimplexOptions) -> (Vec<f64>, f64, usize, bool)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    // standard coefficients: reflection, expansion, contraction, shrink
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        pts.push(v);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let mut iter = 0;
    let mut converged = false;
    while iter < opts.max_iter {
        iter += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if vals[0] <= opts.f_target {
            converged = true;
            break;
        }
        let spread = vals[n] - vals[0];
        let span = (0..n)
            .map(|j| {
                pts.iter()
                    .map(|p| (p[j] - pts[0][j]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        // a collapsed simplex at a nonzero minimum only sees evaluation noise
        if span <= opts.x_tol && spread <= opts.f_spread.max(1e-9 * vals[0].abs()) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(alpha * gamma);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        // outside or inside contraction
        let (xc, fc) = if fr < vals[n] {
            let xc = along(alpha * rho);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            for j in 0..n {
                pts[i][j] = best[j] + sigma * (pts[i][j] - best[j]);
            }
            vals[i] = f(&pts[i]);
        }
    }
    let i = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[i].clone(), vals[i], iter, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = minimize(
            |p| (p[0] - 3.0).powi(2) + 10.0 * (p[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[1.0, 1.0],
            SimplexOptions::default(),
        );
        assert!((r.x[0] - 3.0).abs() < 1e-8);
        assert!((r.x[1] + 1.0).abs() < 1e-8);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_with_restarts() {
        let r = minimize(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            SimplexOptions {
                max_iter: 2000,
                ..Default::default()
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-6, "{:?}", r);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = minimize(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            SimplexOptions {
                max_iter: 5,
                restarts: 0,
                ..Default::default()
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
    }
}
