//! Derivative-free Nelder-Mead simplex minimizer in unconstrained coordinates.
//!
//! Box constraints are handled by the callers through smooth reparameterization
//! (log / scaled-logistic transforms), so the simplex itself is unconstrained.

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with initial step `step` per coordinate.
///
/// Stops when the simplex function-value spread falls below
/// `f_tol * (1 + |f_best|)` and the vertex spread below `x_tol`, or after
/// `max_eval` evaluations.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    f_tol: f64,
    x_tol: f64,
    max_eval: usize,
) -> SimplexResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let n = x0.len();
    assert!(n >= 1 && step.len() == n);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one perturbed vertex per coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if step[i] != 0.0 { step[i] } else { 0.1 };
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    while evals < max_eval {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let x_spread = (0..n)
            .map(|i| {
                simplex
                    .iter()
                    .map(|(v, _)| v[i])
                    .fold(f64::NEG_INFINITY, f64::max)
                    - simplex
                        .iter()
                        .map(|(v, _)| v[i])
                        .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        if (worst - best).abs() <= f_tol * (1.0 + best.abs()) && x_spread <= x_tol {
            return SimplexResult {
                x: simplex[0].0.clone(),
                f: simplex[0].1,
                evaluations: evals,
                converged: true,
            };
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (v, _) in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }

        let lerp = |from: &[f64], towards: &[f64], t: f64| -> Vec<f64> {
            (0..n).map(|i| from[i] + t * (towards[i] - from[i])).collect()
        };

        let reflected = lerp(&centroid, &simplex[n].0, -ALPHA);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < simplex[0].1 {
            let expanded = lerp(&centroid, &simplex[n].0, -GAMMA);
            let f_expanded = eval(&expanded, &mut evals);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
        } else {
            let contracted = if f_reflected < simplex[n].1 {
                lerp(&centroid, &reflected, RHO)
            } else {
                lerp(&centroid, &simplex[n].0, RHO)
            };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < simplex[n].1.min(f_reflected) {
                simplex[n] = (contracted, f_contracted);
            } else {
                // Shrink towards the best vertex.
                let best_v = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    item.0 = lerp(&best_v, &item.0, SIGMA);
                    item.1 = eval(&item.0, &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        evaluations: evals,
        converged: false,
    }
}
