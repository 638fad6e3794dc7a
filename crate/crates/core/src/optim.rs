//! Derivative-free minimisation (Nelder-Mead downhill simplex).

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Initial simplex edge length, per coordinate, relative to `max(|x0_i|, 1)`.
    pub initial_step: f64,
    /// Stop when `(f_worst - f_best) <= f_tol · (|f_best| + f_tol)`.
    pub f_tol: f64,
    /// ... and the simplex diameter is below this.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Restart from the best vertex until a restart no longer improves it.
    pub max_restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            f_tol: 1e-10,
            x_tol: 1e-9,
            max_iter: 2000,
            max_restarts: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimises `f` from `x0`. Non-finite objective values are treated as `+∞`,
/// which keeps the simplex inside the feasible region.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut best = run(&eval, x0, opts);
    for _ in 0..opts.max_restarts {
        let again = run(&eval, &best.x, opts);
        let improved = again.value < best.value - opts.f_tol * (best.value.abs() + opts.f_tol);
        let iterations = best.iterations + again.iterations;
        if again.value <= best.value {
            best = Minimum { iterations, ..again };
        } else {
            best.iterations = iterations;
        }
        if !improved {
            break;
        }
    }
    best
}

fn run<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step * x0[i].abs().max(1.0);
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let (f_best, f_worst) = (values[0], values[dim]);
        let diameter = simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if f_best.is_finite()
            && f_worst - f_best <= opts.f_tol * (f_best.abs() + opts.f_tol)
            && diameter <= opts.x_tol
        {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|x| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(alpha);
        let f_r = f(&reflected);
        if f_r < values[0] {
            let expanded = along(gamma);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[dim] = expanded;
                values[dim] = f_e;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[dim] {
            let c = along(rho);
            let v = f(&c);
            (c, v)
        } else {
            let c = along(-rho);
            let v = f(&c);
            (c, v)
        };
        if f_c < values[dim].min(f_r) {
            simplex[dim] = contracted;
            values[dim] = f_c;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=dim {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + sigma * (x - b))
                .collect();
            values[i] = f(&shrunk);
            simplex[i] = shrunk;
        }
    }
    let arg = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    Minimum {
        x: simplex[arg].clone(),
        value: values[arg],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let f = |x: &[f64]| if x[0] <= 0.0 { f64::NAN } else { x[0] - x[0].ln() };
        let m = nelder_mead(f, &[3.0], &NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-5);
    }
}
