//! Cyclic monotonicity of finite datasets and related diagnostics.
//!
//! Observations are nodes of a complete digraph with edge weights
//! `w(i -> j) = <p^i, v^i - v^j>`. The data are cyclically monotone exactly
//! when every directed cycle has non-negative total weight, which is the
//! feasibility condition of the linear program `phi_j >= phi_i - w(i -> j)`.
//! The check below is Bellman-Ford on that digraph; a negative cycle read
//! off the predecessor structure is the violation certificate.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::choice::Dataset;
use crate::numeric::{self, CompensatedSum};

/// Default absolute tolerance on cycle sums.
pub const DEFAULT_CM_TOL: f64 = 1e-9;

/// Largest dataset accepted by [`brute_force_cm`].
pub const BRUTE_FORCE_MAX: usize = 8;

/// Coordinates other than the varied one must agree to this precision for a
/// pair to count in [`check_two_point_monotonicity`].
pub const TWO_POINT_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonotonicityError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("observation index {index} out of range for {len} observations")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("a cycle needs at least two observations, got {0}")]
    CycleTooShort(usize),
    #[error("exhaustive enumeration supports at most {max} observations, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("p({x},{y}) + p({y},{x}) = {sum}, not 1")]
    InconsistentPair { x: String, y: String, sum: f64 },
    #[error("p({x},{y}) = {value} is not a probability")]
    InvalidProbability { x: String, y: String, value: f64 },
}

/// A directed cycle `nodes[0] -> nodes[1] -> ... -> nodes[0]` over
/// observation indices, with its cycle sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleWitness {
    pub nodes: Vec<usize>,
    pub cycle_sum: f64,
}

impl CycleWitness {
    fn from_cycle(d: &Dataset, mut nodes: Vec<usize>) -> Self {
        if let Some(start) = nodes
            .iter()
            .enumerate()
            .min_by_key(|(_, n)| **n)
            .map(|(i, _)| i)
        {
            nodes.rotate_left(start);
        }
        let cycle_sum = definitional_sum(d, &nodes);
        Self { nodes, cycle_sum }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.cycle_sum / self.nodes.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "witness", rename_all = "snake_case")]
pub enum CmStatus {
    Pass,
    Violation(CycleWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmVerdict {
    pub status: CmStatus,
    /// Smallest mean weight over all directed cycles, `None` when `n = 1`.
    pub min_cycle_mean: Option<f64>,
    /// A cycle attaining `min_cycle_mean`.
    pub min_mean_cycle: Option<CycleWitness>,
    pub observations: usize,
}

impl CmVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.status, CmStatus::Pass)
    }

    pub fn witness(&self) -> Option<&CycleWitness> {
        match &self.status {
            CmStatus::Pass => None,
            CmStatus::Violation(w) => Some(w),
        }
    }

    /// Lower bound on the sum of every simple cycle, derived from the
    /// minimum cycle mean. Zero when there are no cycles.
    pub fn cycle_sum_lower_bound(&self) -> f64 {
        match self.min_cycle_mean {
            None => 0.0,
            Some(mu) if mu < 0.0 => mu * self.observations as f64,
            Some(mu) => 2.0 * mu,
        }
    }
}

fn check_tol(tol: f64) -> Result<(), MonotonicityError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(MonotonicityError::BadTolerance(tol))
    }
}

/// `sum_i <p^i, v^i - v^{i+1}>` around `cycle`, wrapping to the start.
pub fn cycle_sum(d: &Dataset, cycle: &[usize]) -> Result<f64, MonotonicityError> {
    if cycle.len() < 2 {
        return Err(MonotonicityError::CycleTooShort(cycle.len()));
    }
    if let Some(&index) = cycle.iter().find(|&&i| i >= d.len()) {
        return Err(MonotonicityError::IndexOutOfRange {
            index,
            len: d.len(),
        });
    }
    Ok(definitional_sum(d, cycle))
}

fn definitional_sum(d: &Dataset, cycle: &[usize]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (k, &i) in cycle.iter().enumerate() {
        let j = cycle[(k + 1) % cycle.len()];
        let (p, vi, vj) = (d.probs(i), d.values(i), d.values(j));
        for a in 0..p.len() {
            acc.add(p[a] * vi[a]);
            acc.add(-(p[a] * vj[a]));
        }
    }
    acc.value()
}

/// Row-major `n x n` matrix of `w(i -> j) = <p^i, v^i - v^j>`.
pub fn edge_weights(d: &Dataset) -> Vec<f64> {
    let n = d.len();
    let mut w = vec![0.0; n * n];
    w.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                *cell = numeric::dot_diff(d.probs(i), d.values(i), d.values(j));
            }
        }
    });
    w
}

/// Bellman-Ford from a virtual source joined to every node, on weights
/// `w + shift`. Returns a negative cycle of the shifted graph if one is
/// left after `n` rounds.
fn bellman_ford_cycle(w: &[f64], n: usize, shift: f64) -> Option<Vec<usize>> {
    let mut dist = vec![0.0; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut relaxed_last = None;
    for _ in 0..=n {
        relaxed_last = None;
        for u in 0..n {
            let du = dist[u];
            let row = &w[u * n..(u + 1) * n];
            for v in 0..n {
                if u == v {
                    continue;
                }
                let cand = du + (row[v] + shift);
                if cand < dist[v] {
                    dist[v] = cand;
                    pred[v] = Some(u);
                    relaxed_last = Some(v);
                }
            }
        }
        relaxed_last?;
    }
    // Still relaxing after n rounds: walk back n steps to land on the cycle.
    let mut x = relaxed_last?;
    for _ in 0..n {
        x = pred[x]?;
    }
    let mut cycle = vec![x];
    let mut y = pred[x]?;
    while y != x {
        if cycle.len() > n {
            return None;
        }
        cycle.push(y);
        y = pred[y]?;
    }
    cycle.reverse();
    Some(cycle)
}

/// Karp's minimum mean cycle: returns the minimum mean and one cycle
/// attaining it. Requires `n >= 2`.
fn min_mean_cycle(w: &[f64], n: usize) -> (f64, Vec<usize>) {
    // table[k][v]: least weight of a k-edge walk ending at v.
    let mut table = vec![vec![0.0; n]; n + 1];
    let mut back = vec![vec![usize::MAX; n]; n + 1];
    for k in 1..=n {
        for v in 0..n {
            let mut best = f64::INFINITY;
            let mut arg = usize::MAX;
            for u in 0..n {
                if u == v {
                    continue;
                }
                let cand = table[k - 1][u] + w[u * n + v];
                if cand < best {
                    best = cand;
                    arg = u;
                }
            }
            table[k][v] = best;
            back[k][v] = arg;
        }
    }
    let mut mu = f64::INFINITY;
    let mut end = 0;
    for v in 0..n {
        let worst = (0..n)
            .map(|k| (table[n][v] - table[k][v]) / (n - k) as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < mu {
            mu = worst;
            end = v;
        }
    }
    // The n-edge walk ending at `end` repeats a node; any cycle on it is
    // minimum-mean.
    let mut walk = vec![end];
    let mut cur = end;
    for k in (1..=n).rev() {
        cur = back[k][cur];
        walk.push(cur);
    }
    walk.reverse();
    let mut seen = vec![usize::MAX; n];
    for (pos, &node) in walk.iter().enumerate() {
        if seen[node] != usize::MAX {
            return (mu, walk[seen[node]..pos].to_vec());
        }
        seen[node] = pos;
    }
    unreachable!("an n-edge walk over n nodes revisits a node")
}

/// Decide cyclic monotonicity up to `tol`.
///
/// `Pass` means no directed cycle was found with sum below `-tol`; the
/// primary Bellman-Ford run uses weights shifted by `tol / n`, so a pass
/// from it certifies every cycle sum is at least `-tol`. A `Violation`
/// always carries a witness whose recomputed sum is below `-tol`.
pub fn check_cyclic_monotonicity(d: &Dataset, tol: f64) -> Result<CmVerdict, MonotonicityError> {
    check_tol(tol)?;
    let n = d.len();
    if n < 2 {
        return Ok(CmVerdict {
            status: CmStatus::Pass,
            min_cycle_mean: None,
            min_mean_cycle: None,
            observations: n,
        });
    }
    let w = edge_weights(d);
    let (mu, mean_cycle) = min_mean_cycle(&w, n);
    let mean_witness = CycleWitness::from_cycle(d, mean_cycle);
    let verdict = |status| CmVerdict {
        status,
        min_cycle_mean: Some(mu),
        min_mean_cycle: Some(mean_witness.clone()),
        observations: n,
    };
    let accept = |cycle: Vec<usize>| {
        let witness = CycleWitness::from_cycle(d, cycle);
        (witness.cycle_sum < -tol).then_some(witness)
    };

    let Some(cycle) = bellman_ford_cycle(&w, n, tol / n as f64) else {
        return Ok(verdict(CmStatus::Pass));
    };
    if let Some(witness) = accept(cycle) {
        return Ok(verdict(CmStatus::Violation(witness)));
    }

    // The shifted graph has a negative cycle whose unshifted sum lies in
    // [-tol, 0). Look for a deeper one before passing.
    log::debug!(
        "menu `{}`: marginal negative cycle, searching further",
        d.menu().id()
    );
    if mean_witness.cycle_sum < -tol {
        return Ok(verdict(CmStatus::Violation(mean_witness.clone())));
    }
    let mut best_pair: Option<CycleWitness> = None;
    for i in 0..n {
        for j in i + 1..n {
            let s = w[i * n + j] + w[j * n + i];
            if s < -tol && best_pair.as_ref().is_none_or(|b| s < b.cycle_sum) {
                best_pair = accept(vec![i, j]);
            }
        }
    }
    if let Some(witness) = best_pair {
        return Ok(verdict(CmStatus::Violation(witness)));
    }
    let mut len = n / 2;
    while len >= 2 {
        if let Some(witness) = bellman_ford_cycle(&w, n, tol / len as f64).and_then(accept) {
            return Ok(verdict(CmStatus::Violation(witness)));
        }
        len /= 2;
    }
    Ok(verdict(CmStatus::Pass))
}

/// Result of exhaustive cycle enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustiveVerdict {
    pub status: CmStatus,
    /// The cycle with the smallest sum, `None` when `n = 1`.
    pub min_cycle: Option<CycleWitness>,
}

impl ExhaustiveVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.status, CmStatus::Pass)
    }

    pub fn min_cycle_sum(&self) -> Option<f64> {
        self.min_cycle.as_ref().map(|c| c.cycle_sum)
    }
}

/// Enumerate every simple directed cycle and report the smallest sum.
/// Used as an independent oracle for [`check_cyclic_monotonicity`].
pub fn brute_force_cm(d: &Dataset, tol: f64) -> Result<ExhaustiveVerdict, MonotonicityError> {
    check_tol(tol)?;
    let n = d.len();
    if n > BRUTE_FORCE_MAX {
        return Err(MonotonicityError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut best: Option<CycleWitness> = None;
    let mut path = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for start in 0..n {
        path.push(start);
        used[start] = true;
        extend_cycles(d, start, &mut path, &mut used, &mut best);
        used[start] = false;
        path.pop();
    }
    let status = match &best {
        Some(c) if c.cycle_sum < -tol => CmStatus::Violation(c.clone()),
        _ => CmStatus::Pass,
    };
    Ok(ExhaustiveVerdict {
        status,
        min_cycle: best,
    })
}

// Cycles are enumerated with their smallest node first, so each appears once
// per orientation.
fn extend_cycles(
    d: &Dataset,
    start: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<CycleWitness>,
) {
    if path.len() >= 2 {
        let s = definitional_sum(d, path);
        if best.as_ref().is_none_or(|b| s < b.cycle_sum) {
            *best = Some(CycleWitness {
                nodes: path.clone(),
                cycle_sum: s,
            });
        }
    }
    for next in start + 1..d.len() {
        if !used[next] {
            used[next] = true;
            path.push(next);
            extend_cycles(d, start, path, used, best);
            path.pop();
            used[next] = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointViolation {
    pub first: usize,
    pub second: usize,
    pub alternative: usize,
    pub product: f64,
}

/// Scan observation pairs that differ in exactly one value coordinate and
/// report those where that alternative's probability moves against its
/// value by more than `tol`.
pub fn check_two_point_monotonicity(
    d: &Dataset,
    tol: f64,
) -> Result<Vec<TwoPointViolation>, MonotonicityError> {
    check_tol(tol)?;
    let mut out = Vec::new();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let (vi, vj) = (d.values(i), d.values(j));
            let mut differing = (0..vi.len()).filter(|&a| (vi[a] - vj[a]).abs() > TWO_POINT_EQ_TOL);
            let (Some(a), None) = (differing.next(), differing.next()) else {
                continue;
            };
            let product = (d.probs(i)[a] - d.probs(j)[a]) * (vi[a] - vj[a]);
            if product < -tol {
                out.push(TwoPointViolation {
                    first: i,
                    second: j,
                    alternative: a,
                    product,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WstViolation {
    pub x: String,
    pub y: String,
    pub z: String,
    pub p_xy: f64,
    pub p_yz: f64,
    pub p_xz: f64,
}

/// Binary choice probabilities keyed by `(x, y)`, meaning the probability
/// that `x` is chosen from `{x, y}`.
pub type BinaryChoices = BTreeMap<(String, String), f64>;

/// Flag every ordered triple with `p(x,y) >= 1/2`, `p(y,z) >= 1/2` and
/// `p(x,z) < 1/2`. Missing reverse pairs are filled in as complements;
/// stored reverse pairs must be complementary within `tol`.
pub fn check_weak_stochastic_transitivity(
    binary: &BinaryChoices,
    tol: f64,
) -> Result<Vec<WstViolation>, MonotonicityError> {
    check_tol(tol)?;
    let mut full: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for ((x, y), &p) in binary {
        if !(0.0..=1.0).contains(&p) || x == y {
            return Err(MonotonicityError::InvalidProbability {
                x: x.clone(),
                y: y.clone(),
                value: p,
            });
        }
        if let Some(&q) = binary.get(&(y.clone(), x.clone())) {
            if (p + q - 1.0).abs() > tol {
                return Err(MonotonicityError::InconsistentPair {
                    x: x.clone(),
                    y: y.clone(),
                    sum: p + q,
                });
            }
        }
        full.insert((x, y), p);
        full.entry((y, x)).or_insert(1.0 - p);
    }
    let labels: BTreeSet<&str> = full.keys().flat_map(|(x, y)| [*x, *y]).collect();
    let mut out = Vec::new();
    for &x in &labels {
        for &y in &labels {
            let Some(&p_xy) = full.get(&(x, y)) else {
                continue;
            };
            if p_xy < 0.5 {
                continue;
            }
            for &z in &labels {
                if z == x || z == y {
                    continue;
                }
                let (Some(&p_yz), Some(&p_xz)) = (full.get(&(y, z)), full.get(&(x, z))) else {
                    continue;
                };
                if p_yz >= 0.5 && p_xz < 0.5 {
                    out.push(WstViolation {
                        x: x.to_string(),
                        y: y.to_string(),
                        z: z.to_string(),
                        p_xy,
                        p_yz,
                        p_xz,
                    });
                }
            }
        }
    }
    Ok(out)
}
