use serde::{Deserialize, Serialize};

use super::conjugate::neg_entropy;
use super::{CostEvaluator, RationalizationError};
use crate::choice::{SimplexPoint, ValueVector};
use crate::numeric::{self, CompensatedSum};

/// Iteration budget of [`pum_solve_general`].
pub const MAX_ITERATIONS: usize = 100_000;

/// Costs whose perturbed-utility maximizer has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormCost {
    /// `C(p) = sum_a p_a ln p_a`; the maximizer is the softmax of `v`.
    NegEntropy,
    /// `C(p) = 1/2 sum_a p_a^2`; the maximizer is the Euclidean projection
    /// of `v` onto the simplex.
    Quadratic,
}

/// Max-shifted softmax.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let shift = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - shift).exp()).collect();
    let total = numeric::sum(e.iter().copied());
    e.into_iter().map(|x| x / total).collect()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut running = CompensatedSum::new();
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        running.add(u);
        let t = (running.value() - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn renormalize(mut p: Vec<f64>) -> SimplexPoint {
    for x in &mut p {
        *x = x.max(0.0);
    }
    let total = numeric::sum(p.iter().copied());
    if (total - 1.0).abs() > crate::choice::exact_sum_slack(p.len()) {
        for x in &mut p {
            *x /= total;
        }
    }
    SimplexPoint::from_normalized(p)
}

/// The unique maximizer of `<v, p> - C(p)` over the simplex.
pub fn pum_solve_closed(kind: ClosedFormCost, v: &ValueVector) -> SimplexPoint {
    let v = v.as_slice();
    match kind {
        ClosedFormCost::NegEntropy => renormalize(softmax(v)),
        ClosedFormCost::Quadratic => renormalize(project_to_simplex(v)),
    }
}

/// Optimal value `max_p <v, p> - C(p)` for a closed-form cost.
pub fn closed_form_value(kind: ClosedFormCost, v: &ValueVector) -> f64 {
    let p = pum_solve_closed(kind, v);
    let p = p.as_slice();
    let cost = match kind {
        ClosedFormCost::NegEntropy => neg_entropy(p),
        ClosedFormCost::Quadratic => 0.5 * numeric::dot(p, p),
    };
    numeric::dot(v.as_slice(), p) - cost
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumSolution {
    pub probs: SimplexPoint,
    /// `<v, p> - C(p)` at the returned point.
    pub objective: f64,
    /// Certified Frank-Wolfe gap: an upper bound on suboptimality.
    pub gap: f64,
    pub iterations: usize,
    /// `false` when the cost is piecewise linear and other maximizers may
    /// exist.
    pub unique: bool,
}

#[derive(Debug, Clone, Copy)]
enum Regularizer {
    None,
    NegEntropy(f64),
    Quadratic(f64),
}

impl Regularizer {
    fn value(self, p: &[f64]) -> f64 {
        match self {
            Regularizer::None => 0.0,
            Regularizer::NegEntropy(w) => w * neg_entropy(p),
            Regularizer::Quadratic(w) => 0.5 * w * numeric::dot(p, p),
        }
    }

    /// Derivative of the regularizer at `p` along `q`. Coordinates with
    /// `q_a = 0` contribute nothing. The entropy's log is clamped at the
    /// smallest normal `f64`: mass the optimum puts below that underflows
    /// anyway, and the clamp keeps the gradient finite at such zeros.
    fn directional(self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Regularizer::None => 0.0,
            Regularizer::NegEntropy(w) => {
                w * numeric::sum(
                    p.iter()
                        .zip(q)
                        .filter(|(_, qa)| **qa != 0.0)
                        .map(|(pa, qa)| qa * (pa.max(f64::MIN_POSITIVE).ln() + 1.0)),
                )
            }
            Regularizer::Quadratic(w) => w * numeric::dot(p, q),
        }
    }
}

/// `max_{l in simplex} sum_j l_j a_j - R(sum_j l_j g_j)` over atoms `g_j`.
struct AtomProblem<'a> {
    atoms: &'a [Vec<f64>],
    linear: Vec<f64>,
    reg: Regularizer,
}

struct AtomSolution {
    p: Vec<f64>,
    objective: f64,
    gap: f64,
    iterations: usize,
}

impl AtomProblem<'_> {
    fn point(&self, weights: &[f64]) -> Vec<f64> {
        let dim = self.atoms[0].len();
        (0..dim)
            .map(|a| numeric::sum(self.atoms.iter().zip(weights).map(|(g, l)| l * g[a])))
            .collect()
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        self.atoms
            .iter()
            .zip(&self.linear)
            .map(|(g, a)| a - self.reg.directional(p, g))
            .collect()
    }

    fn objective(&self, weights: &[f64], p: &[f64]) -> f64 {
        numeric::dot(weights, &self.linear) - self.reg.value(p)
    }

    /// Away-step Frank-Wolfe with exact line search.
    fn solve(&self, tol: f64) -> Result<AtomSolution, RationalizationError> {
        let n = self.atoms.len();
        let mut weights = vec![1.0 / n as f64; n];
        let mut p = self.point(&weights);
        let mut last_gap = f64::INFINITY;
        for iteration in 0..MAX_ITERATIONS {
            let grad = self.gradient(&p);
            let current = numeric::sum(
                weights
                    .iter()
                    .zip(&grad)
                    .filter(|(l, _)| **l > 0.0)
                    .map(|(l, g)| l * g),
            );
            let (toward, best) = argmax(&grad);
            let gap = best - current;
            last_gap = gap;
            if gap <= tol {
                return Ok(AtomSolution {
                    objective: self.objective(&weights, &p),
                    p,
                    gap: gap.max(0.0),
                    iterations: iteration,
                });
            }
            let (away, worst) = weights
                .iter()
                .enumerate()
                .filter(|(_, l)| **l > 0.0)
                .map(|(j, _)| (j, grad[j]))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("weights sum to one");
            let away_gap = current - worst;

            // Direction in weight space, expressed as a sparse update.
            let (direction, max_step) = if gap >= away_gap || weights[away] >= 1.0 {
                (Step::Toward(toward), 1.0)
            } else {
                let la = weights[away];
                (Step::Away(away), la / (1.0 - la))
            };
            let q: Vec<f64> = match direction {
                Step::Toward(s) => self.atoms[s].iter().zip(&p).map(|(g, x)| g - x).collect(),
                Step::Away(s) => p.iter().zip(&self.atoms[s]).map(|(x, g)| x - g).collect(),
            };
            let linear_slope = match direction {
                Step::Toward(s) => self.linear[s] - numeric::dot(&weights, &self.linear),
                Step::Away(s) => numeric::dot(&weights, &self.linear) - self.linear[s],
            };
            let slope = |step: f64| {
                let at: Vec<f64> = p.iter().zip(&q).map(|(x, d)| x + step * d).collect();
                linear_slope - self.reg.directional(&at, &q)
            };
            let step = line_search(slope, max_step);
            if step <= 0.0 {
                // No ascent along the chosen direction at machine precision.
                break;
            }
            match direction {
                Step::Toward(s) if step >= 1.0 => {
                    weights.iter_mut().for_each(|l| *l = 0.0);
                    weights[s] = 1.0;
                }
                Step::Toward(s) => {
                    weights.iter_mut().for_each(|l| *l *= 1.0 - step);
                    weights[s] += step;
                }
                Step::Away(s) => {
                    weights.iter_mut().for_each(|l| *l *= 1.0 + step);
                    weights[s] -= step;
                    if step >= max_step {
                        weights[s] = 0.0;
                    }
                }
            }
            for l in &mut weights {
                if *l < 0.0 {
                    *l = 0.0;
                }
            }
            p = self.point(&weights);
        }
        let grad = self.gradient(&p);
        let current = numeric::dot(&weights, &grad);
        let gap = argmax(&grad).1 - current;
        if gap <= tol {
            return Ok(AtomSolution {
                objective: self.objective(&weights, &p),
                p,
                gap: gap.max(0.0),
                iterations: MAX_ITERATIONS,
            });
        }
        Err(RationalizationError::NoProgress {
            gap: gap.min(last_gap),
            iterations: MAX_ITERATIONS,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Toward(usize),
    Away(usize),
}

fn argmax(x: &[f64]) -> (usize, f64) {
    x.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (j, g)| if g > acc.1 { (j, g) } else { acc },
    )
}

/// Maximize a concave function of the step on `[0, max_step]` given its
/// derivative.
fn line_search(slope: impl Fn(f64) -> f64, max_step: f64) -> f64 {
    if slope(max_step) >= 0.0 {
        return max_step;
    }
    if slope(0.0).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return 0.0;
    }
    // Runs until the bracket stops shrinking, which can take ~1100 halvings
    // when the optimal step is subnormal.
    let (mut lo, mut hi) = (0.0, max_step);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Maximize `<v, p> - C(p)` over the simplex by Frank-Wolfe, stopping once
/// the Frank-Wolfe gap certifies `tol` optimality.
///
/// Data-derived costs are handled in the space of mixture weights over the
/// observed gradients, where the problem is linear (plus the entropic term
/// when smoothed).
pub fn pum_solve_general(
    cost: &CostEvaluator,
    v: &ValueVector,
    tol: f64,
) -> Result<PumSolution, RationalizationError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(RationalizationError::BadParameter(tol));
    }
    let v = v.as_slice();
    let unit_atoms = |dim: usize| -> Vec<Vec<f64>> {
        (0..dim)
            .map(|a| (0..dim).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
            .collect()
    };
    let (atoms, linear, reg) = match cost {
        CostEvaluator::NegEntropy => (
            unit_atoms(v.len()),
            v.to_vec(),
            Regularizer::NegEntropy(1.0),
        ),
        CostEvaluator::Quadratic => (unit_atoms(v.len()), v.to_vec(), Regularizer::Quadratic(1.0)),
        CostEvaluator::DataDerived(c) | CostEvaluator::DataDerivedSmoothed { cost: c, .. } => {
            if c.atoms().is_empty() {
                return Err(RationalizationError::EmptyDomain);
            }
            if c.dim() != v.len() {
                return Err(RationalizationError::DimensionMismatch {
                    expected: c.dim(),
                    found: v.len(),
                });
            }
            let linear = c
                .atoms()
                .iter()
                .zip(c.intercepts())
                .map(|(g, ci)| numeric::dot(g, v) - ci)
                .collect();
            let reg = match cost {
                CostEvaluator::DataDerivedSmoothed { epsilon, .. } => {
                    Regularizer::NegEntropy(*epsilon)
                }
                _ => Regularizer::None,
            };
            (c.atoms().to_vec(), linear, reg)
        }
    };
    let solution = AtomProblem {
        atoms: &atoms,
        linear,
        reg,
    }
    .solve(tol)?;
    Ok(PumSolution {
        probs: renormalize(solution.p),
        objective: solution.objective,
        gap: solution.gap,
        iterations: solution.iterations,
        unique: cost.strictly_convex(),
    })
}
