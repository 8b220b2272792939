//! Simultaneous perturbation stochastic approximation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng_for;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpsaOptions {
    /// Objective evaluations (two per iteration).
    pub budget: usize,
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant; defaults to budget/10.
    pub big_a: Option<f64>,
    pub seed: u64,
}

impl Default for SpsaOptions {
    fn default() -> Self {
        SpsaOptions {
            budget: 1000,
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            big_a: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaResult {
    /// Best point according to `track`.
    pub theta: Vec<f64>,
    pub best: f64,
    /// Best-so-far tracked value after each iteration (first entry: start).
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// Minimize `f` (possibly noisy) with SPSA; `track` re-evaluates each
/// iterate to select the returned point.
pub fn spsa_minimize<F, T>(mut f: F, mut track: T, theta0: &[f64], opts: &SpsaOptions) -> SpsaResult
where
    F: FnMut(&[f64]) -> f64,
    T: FnMut(&[f64]) -> f64,
{
    let n = theta0.len();
    let big_a = opts.big_a.unwrap_or(opts.budget as f64 / 10.0);
    let mut rng = rng_for(opts.seed, 0x5b5a);
    let mut theta = theta0.to_vec();
    let mut best_theta = theta.clone();
    let mut best = track(&theta);
    let mut trace = vec![best];
    let iters = opts.budget / 2;
    let mut evals = 0;
    for k in 0..iters {
        let ak = opts.a / (k as f64 + 1.0 + big_a).powf(opts.alpha);
        let ck = opts.c / (k as f64 + 1.0).powf(opts.gamma);
        let delta: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let df = f(&plus) - f(&minus);
        evals += 2;
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * df / (2.0 * ck * d);
        }
        let v = track(&theta);
        if v < best {
            best = v;
            best_theta.clone_from(&theta);
        }
        trace.push(best);
    }
    SpsaResult {
        theta: best_theta,
        best,
        trace,
        evaluations: evals,
    }
}
