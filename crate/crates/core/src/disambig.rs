//! Completing weak supervision: choose `y_i in s_i` to minimize
//! `sum_{i,j} A[i][j] l(z_i, y_j)` jointly over the completions `y` and the
//! auxiliary predictions `z`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectral_norm_symmetric;
use crate::loss::{dot, LossSpec};
use crate::space::{Label, LabelSpace};
use crate::weak::WeakSet;
use crate::weights::WeightMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisambiguationResult {
    /// Surrogate vector of each sample after the last sweep.
    pub xi: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    /// Relaxed objective after every half-step from the first completion on
    /// (alternating minimization), or after every iteration (quadratic relaxation).
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `min_z sum_{i,j} A[i][j] l(z_i, labels_j)`.
    pub objective: f64,
}

fn check_problem(a: &WeightMatrix, loss: &LossSpec, sets: &[WeakSet]) -> Result<()> {
    let n = sets.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::validation(format!(
            "weight matrix is {}x{} but there are {n} samples",
            a.nrows(),
            a.ncols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::validation("weight matrix has non-finite entries"));
    }
    sets.iter().try_for_each(|s| s.validate_for(loss.space()))
}

/// `sum_{i,j} A[i][j] l(z_i, y_j)`.
pub fn objective(a: &WeightMatrix, loss: &LossSpec, y: &[Label], z: &[Label]) -> Result<f64> {
    if y.len() != a.ncols() || z.len() != a.nrows() {
        return Err(Error::validation(format!(
            "weight matrix is {}x{}, got {} predictions and {} labels",
            a.nrows(),
            a.ncols(),
            z.len(),
            y.len()
        )));
    }
    let mut total = 0.0;
    for (i, zi) in z.iter().enumerate() {
        for &j in a.row_nonzeros(i) {
            total += a.get(i, j) * loss.eval(zi, &y[j])?;
        }
    }
    Ok(total)
}

/// Best predictions for fixed completions and the resulting objective.
pub fn best_response(a: &WeightMatrix, loss: &LossSpec, y: &[Label]) -> Result<(f64, Vec<Label>)> {
    if y.len() != a.ncols() {
        return Err(Error::validation("label count does not match the weight matrix"));
    }
    let phis = y.iter().map(|l| loss.phi(l)).collect::<Result<Vec<_>>>()?;
    let z = (0..a.nrows())
        .into_par_iter()
        .map(|i| loss.minimize_psi(&a.row_combination(i, &phis)).map(|m| m.label))
        .collect::<Result<Vec<_>>>()?;
    Ok((objective(a, loss, y, &z)?, z))
}

/// The initialization `xi_{s_i}` of every sample.
pub fn wellbehaved_inits(loss: &LossSpec, sets: &[WeakSet]) -> Result<Vec<Vec<f64>>> {
    sets.iter().map(|s| loss.wellbehaved_init(s)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// When every candidate scores the same, keep the centroid of the
    /// candidates' embeddings instead of committing to the lowest index.
    pub agnostic_ties: bool,
}

impl Default for AmOptions {
    fn default() -> Self {
        AmOptions { max_iter: 200, tol: 1e-6, agnostic_ties: true }
    }
}

/// Alternating minimization of the relaxed objective
/// `sum_{i,j} A[i][j] <zeta_i, xi_j>`, starting with the `zeta` step.
pub fn alternating_minimization(
    a: &WeightMatrix,
    loss: &LossSpec,
    sets: &[WeakSet],
    init: Vec<Vec<f64>>,
    opts: AmOptions,
) -> Result<DisambiguationResult> {
    check_problem(a, loss, sets)?;
    if opts.max_iter == 0 {
        return Err(Error::config("max_iter must be at least 1"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    let n = sets.len();
    let dim = loss.dim();
    if init.len() != n || init.iter().any(|v| v.len() != dim) {
        return Err(Error::validation(format!("initialization must hold {n} vectors of dimension {dim}")));
    }
    let agnostic_psi = if opts.agnostic_ties { loss.agnostic_psi() } else { None };
    let agnostic_phi = if opts.agnostic_ties {
        sets.iter().map(|s| loss.agnostic_phi(s)).collect::<Result<Vec<_>>>()?
    } else {
        vec![None; n]
    };

    let mut xi = init;
    let mut labels = Vec::new();
    let mut trace = Vec::with_capacity(2 * opts.max_iter);
    let mut previous: Option<f64> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;

        let zeta_step = (0..n)
            .into_par_iter()
            .map(|i| {
                let g = a.row_combination(i, &xi);
                let best = loss.minimize_psi(&g)?;
                let zeta = match (&agnostic_psi, best.all_tied) {
                    (Some(centre), true) => centre.clone(),
                    _ => loss.psi(&best.label)?,
                };
                let value = dot(&zeta, &g);
                Ok((zeta, value))
            })
            .collect::<Result<Vec<_>>>()?;
        let (zeta, values): (Vec<_>, Vec<f64>) = zeta_step.into_iter().unzip();
        // The initial surrogates need not lie in the candidate hulls (the full
        // set starts at zero), so the trace starts once every xi_j is feasible.
        if iterations > 1 {
            trace.push(values.iter().sum());
        }

        let xi_step = (0..n)
            .into_par_iter()
            .map(|j| {
                let c = a.col_combination(j, &zeta);
                let best = loss.minimize_phi_over_set(&c, &sets[j])?;
                let next = match (&agnostic_phi[j], best.all_tied) {
                    (Some(centre), true) => centre.clone(),
                    _ => loss.phi(&best.label)?,
                };
                let value = dot(&next, &c);
                Ok((next, best.label, value))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next_xi = Vec::with_capacity(n);
        let mut total = 0.0;
        labels.clear();
        for (v, label, value) in xi_step {
            next_xi.push(v);
            labels.push(label);
            total += value;
        }
        trace.push(total);

        let fixed_point = next_xi == xi;
        xi = next_xi;
        if fixed_point || previous.is_some_and(|p| p - total < opts.tol) {
            converged = true;
            break;
        }
        previous = Some(total);
    }

    let (value, _) = best_response(a, loss, &labels)?;
    Ok(DisambiguationResult { xi, labels, objective_trace: trace, iterations, converged, objective: value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `2 / (t + 2)`.
    Harmonic,
    /// Exact minimization of the quadratic along the Frank-Wolfe direction.
    LineSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IqpOptions {
    pub steps: usize,
    pub step_rule: StepRule,
    /// Stop once the Frank-Wolfe duality gap falls below this value.
    pub gap_tol: f64,
}

impl Default for IqpOptions {
    fn default() -> Self {
        IqpOptions { steps: 200, step_rule: StepRule::Harmonic, gap_tol: 1e-9 }
    }
}

/// Convex relaxation of `sum_{i,j} A[i][j] l(y_i, y_j)` over the hulls of the
/// embedded candidates, solved by Frank-Wolfe and rounded to vertices.
///
/// With the constant-norm decomposition `l = <psi, psi> - <phi, phi>`, adding
/// `c * sum_i (|psi_i|^2 + |phi_i|^2)` (a constant on vertices) for `c` the
/// spectral norm of the symmetrized weights makes the objective
/// `tr(P^T (cI + A) P) + tr(Q^T (cI - A) Q)` convex.
pub fn iqp_disambiguation(
    a: &WeightMatrix,
    loss: &LossSpec,
    sets: &[WeakSet],
    opts: IqpOptions,
) -> Result<DisambiguationResult> {
    let q = loss.quadratic().ok_or_else(|| {
        Error::config("the quadratic relaxation needs a symmetric loss matrix with a constant-norm decomposition")
    })?;
    check_problem(a, loss, sets)?;
    if opts.steps == 0 {
        return Err(Error::config("steps must be at least 1"));
    }
    let LabelSpace::Classes { .. } = loss.space() else {
        return Err(Error::config("the quadratic relaxation needs a finite class space"));
    };
    let n = sets.len();
    let qd = q.dim();
    let candidates: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| Ok(s.enumerate(loss.space())?.iter().map(|l| l.as_class().unwrap()).collect()))
        .collect::<Result<_>>()?;

    let dense = a.to_dmatrix();
    let sym = (&dense + dense.transpose()) * 0.5;
    let c = spectral_norm_symmetric(&sym, 200, 1e-10);
    let eye = DMatrix::<f64>::identity(n, n);
    let b_plus = &eye * c + &sym;
    let b_minus = &eye * c - &sym;
    let shift = 2.0 * n as f64 * c * q.norm_const * q.norm_const;

    let mut p = DMatrix::<f64>::zeros(n, qd);
    let mut r = DMatrix::<f64>::zeros(n, qd);
    for (i, cand) in candidates.iter().enumerate() {
        let w = 1.0 / cand.len() as f64;
        for &y in cand {
            for k in 0..qd {
                p[(i, k)] += w * q.psi[y][k];
                r[(i, k)] += w * q.phi[y][k];
            }
        }
    }
    let energy = |p: &DMatrix<f64>, r: &DMatrix<f64>| -> f64 {
        (p.transpose() * &b_plus * p).trace() + (r.transpose() * &b_minus * r).trace()
    };

    let mut trace = vec![energy(&p, &r) - shift];
    let mut converged = false;
    let mut iterations = 0;
    for t in 0..opts.steps {
        iterations = t + 1;
        let gp = (&b_plus * &p) * 2.0;
        let gr = (&b_minus * &r) * 2.0;
        let mut dp = DMatrix::<f64>::zeros(n, qd);
        let mut dr = DMatrix::<f64>::zeros(n, qd);
        for (i, cand) in candidates.iter().enumerate() {
            let score = |y: usize| -> f64 { (0..qd).map(|k| gp[(i, k)] * q.psi[y][k] + gr[(i, k)] * q.phi[y][k]).sum() };
            let mut best = cand[0];
            let mut best_score = score(best);
            for &y in &cand[1..] {
                let s = score(y);
                if s < best_score {
                    best = y;
                    best_score = s;
                }
            }
            for k in 0..qd {
                dp[(i, k)] = q.psi[best][k] - p[(i, k)];
                dr[(i, k)] = q.phi[best][k] - r[(i, k)];
            }
        }
        let slope = gp.dot(&dp) + gr.dot(&dr);
        if -slope <= opts.gap_tol {
            converged = true;
            break;
        }
        let gamma = match opts.step_rule {
            StepRule::Harmonic => 2.0 / (t as f64 + 2.0),
            StepRule::LineSearch => {
                let curvature = energy(&dp, &dr);
                if curvature > 0.0 {
                    (-slope / (2.0 * curvature)).clamp(0.0, 1.0)
                } else {
                    1.0
                }
            }
        };
        p += &dp * gamma;
        r += &dr * gamma;
        let value = energy(&p, &r) - shift;
        let last = *trace.last().unwrap();
        trace.push(value.min(last));
    }

    let labels: Vec<Label> = candidates
        .iter()
        .enumerate()
        .map(|(i, cand)| {
            let dist = |y: usize| -> f64 {
                (0..qd).map(|k| (p[(i, k)] - q.psi[y][k]).powi(2) + (r[(i, k)] - q.phi[y][k]).powi(2)).sum()
            };
            let mut best = cand[0];
            for &y in &cand[1..] {
                if dist(y) < dist(best) {
                    best = y;
                }
            }
            Label::Class(best)
        })
        .collect();
    let xi = labels.iter().map(|l| loss.phi(l)).collect::<Result<Vec<_>>>()?;
    let (value, _) = best_response(a, loss, &labels)?;
    Ok(DisambiguationResult { xi, labels, objective_trace: trace, iterations, converged, objective: value })
}
