//! Budgeted, restarted Nelder–Mead.
//!
//! Coefficients follow the dimension-adaptive choice of Gao and Han, which
//! keeps the simplex from collapsing in the 10–40 dimensional searches used
//! for multi-mode channels. Restart 0 starts at `x0`. Odd restarts polish
//! around the best point with a shrinking step; even restarts draw a fresh
//! start from their own RNG stream.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Total objective evaluations across all restarts. Checked between
    /// iterations, so the last iteration may overshoot by at most `d + 1`.
    pub budget: usize,
    /// Edge length of the initial simplex.
    pub step: f64,
    /// A run stops when the spread of simplex values falls below
    /// `ftol·(1 + |f_best|)` and its diameter below `xtol`.
    pub ftol: f64,
    pub xtol: f64,
    /// Standard deviation of random restart points around the origin.
    pub restart_scale: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            budget: 20_000,
            step: 0.5,
            ftol: 1e-13,
            xtol: 1e-9,
            restart_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Restarts performed after the first run.
    pub restarts: usize,
    /// Whether the run that produced `value` met its stopping criterion.
    pub converged: bool,
}

struct Run {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn nelder_mead_run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
    evals: &mut usize,
    limit: usize,
) -> Run {
    let d = x0.len();
    let df = d as f64;
    let (alpha, beta, gamma, delta) = if d >= 2 {
        (1.0, 1.0 + 2.0 / df, 0.75 - 0.5 / df, 1.0 - 1.0 / df)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    while *evals < limit {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        let spread = worst - best;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.ftol * (1.0 + best.abs()) && diameter <= opts.xtol {
            converged = true;
            break;
        }
        if diameter == 0.0 {
            break;
        }

        let mut centroid = alloc::vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / df;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, evals);
        if fr < best {
            let xe = along(alpha * beta);
            let fe = eval(&xe, evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let x = along(alpha * gamma);
            let v = eval(&x, evals);
            (x, v)
        } else {
            let x = along(-gamma);
            let v = eval(&x, evals);
            (x, v)
        };
        if fc < fr.min(worst) {
            simplex[d] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + delta * (*xi - bi);
            }
            *v = eval(x, evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Run { x, value, converged }
}

/// Minimizes `f` within `opts.budget` evaluations. Deterministic for a given
/// `seed`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
    seed: u64,
) -> Result<Minimum> {
    if opts.budget == 0 {
        return Err(invalid("budget", "must be positive"));
    }
    if x0.is_empty() {
        let value = f(x0);
        return Ok(Minimum {
            x: Vec::new(),
            value,
            evaluations: 1,
            restarts: 0,
            converged: true,
        });
    }
    let d = x0.len();
    let mut evals = 0;
    let first = nelder_mead_run(&mut f, x0, opts.step, opts, &mut evals, opts.budget);
    let mut best = first;
    let mut restarts = 0;
    // a run needs at least d + 1 evaluations to build its simplex
    while evals + 4 * (d + 1) <= opts.budget {
        restarts += 1;
        let (start, step) = if restarts % 2 == 1 {
            let shrink = 0.5.powi((restarts / 2) as i32 % 12);
            (best.x.clone(), opts.step * shrink)
        } else {
            let mut r = rng::stream(seed, restarts as u64);
            let start: Vec<f64> = (0..d)
                .map(|_| opts.restart_scale * rng::normal(&mut r))
                .collect();
            (start, opts.step)
        };
        let run = nelder_mead_run(&mut f, &start, step, opts, &mut evals, opts.budget);
        if run.value < best.value || (run.value == best.value && run.converged && !best.converged) {
            best = run;
        }
    }
    Ok(Minimum {
        x: best.x,
        value: best.value,
        evaluations: evals,
        restarts,
        converged: best.converged,
    })
}
