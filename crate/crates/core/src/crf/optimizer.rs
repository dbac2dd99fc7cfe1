//! Deterministic unconstrained minimizers for the training objective:
//! limited-memory BFGS with a backtracking Armijo line search (default), and
//! plain gradient descent as a fallback. Both evaluate the objective and
//! gradient together and accept only strictly decreasing steps, so the
//! objective trace is monotone.

use std::collections::VecDeque;

use super::CrfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptimizerKind {
    #[default]
    Lbfgs,
    GradientDescent,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Lbfgs => "lbfgs",
            OptimizerKind::GradientDescent => "gd",
        }
    }

    pub fn parse(s: &str) -> Option<OptimizerKind> {
        match s {
            "lbfgs" => Some(OptimizerKind::Lbfgs),
            "gd" | "gradient-descent" => Some(OptimizerKind::GradientDescent),
            _ => None,
        }
    }
}

pub struct Outcome {
    pub point: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

const HISTORY: usize = 7;
const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;
const CURVATURE_MIN: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Two-loop recursion: applies the inverse-Hessian approximation to the
/// gradient, yielding the descent direction (negated).
fn lbfgs_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimizes `f` starting from `x0`. Stops on the gradient max-norm falling
/// under `tol`, on relative objective decrease under `tol`, on a failed line
/// search, or after `max_iters` accepted steps. Non-finite values raise
/// `DivergedObjective`.
pub fn minimize<F>(
    kind: OptimizerKind,
    mut f: F,
    x0: Vec<f64>,
    max_iters: usize,
    tol: f64,
) -> Result<Outcome, CrfError>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let (mut value, mut grad) = f(&x);
    check_finite(value, &grad)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    while iterations < max_iters {
        if inf_norm(&grad) < tol {
            break;
        }
        let direction = match kind {
            OptimizerKind::Lbfgs => lbfgs_direction(&grad, &history),
            OptimizerKind::GradientDescent => grad.iter().map(|g| -g).collect(),
        };
        let mut slope = dot(&grad, &direction);
        let direction = if slope < 0.0 {
            direction
        } else {
            // Not a descent direction (degenerate curvature); fall back to
            // steepest descent for this step.
            history.clear();
            let d: Vec<f64> = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
            d
        };

        // First step has no curvature information; scale to a unit move.
        let mut step = if history.is_empty() && kind == OptimizerKind::Lbfgs
            || kind == OptimizerKind::GradientDescent
        {
            1.0 / inf_norm(&direction).max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + step * di)
                .collect();
            let (cand_value, cand_grad) = f(&candidate);
            check_finite(cand_value, &cand_grad)?;
            if cand_value <= value + ARMIJO_C1 * step * slope {
                accepted = Some((candidate, cand_value, cand_grad));
                break;
            }
            step *= BACKTRACK;
        }
        let Some((new_x, new_value, new_grad)) = accepted else {
            // No decrease found along the direction; treat as converged.
            break;
        };

        let s: Vec<f64> = new_x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if kind == OptimizerKind::Lbfgs && sy > CURVATURE_MIN {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        let decrease = (value - new_value) / value.abs().max(1.0);
        x = new_x;
        value = new_value;
        grad = new_grad;
        iterations += 1;
        if decrease < tol {
            break;
        }
    }

    Ok(Outcome {
        point: x,
        objective: value,
        iterations,
    })
}

fn check_finite(value: f64, grad: &[f64]) -> Result<(), CrfError> {
    if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(CrfError::DivergedObjective);
    }
    Ok(())
}
