//! Acceptance suite. Runs without the libtest harness so the PASS/FAIL
//! lines are always printed; exits non-zero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use cyclorat::monotonicity::{self, BinaryChoices, DEFAULT_CM_TOL};
use cyclorat::preference::{eval_preference, normalize, PreferenceModel};
use cyclorat::rationalization::{
    compute_potentials, evaluate_extension, pum_solve_closed, verify_rationalization,
    ClosedFormCost, ConjugateCost, VerifyOptions,
};
use cyclorat::{numeric, Dataset, SimplexPoint, ValueVector};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn duality_golden_pair() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        let mut rng = common::rng(seed);
        let len = rng.gen_range(2..=8);
        let v = common::values(&mut rng, len, 10.0);
        let luce = normalize(&eval_preference(&PreferenceModel::LuceExponential, &v).unwrap())
            .unwrap()
            .probs;
        let pum = pum_solve_closed(ClosedFormCost::NegEntropy, &v);
        worst = worst.max(numeric::max_abs_diff(luce.as_slice(), pum.as_slice()));
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && within(elapsed, 1.0),
        format!(
            "max |luce - softmax| = {worst:.3e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn converse_direction() -> Outcome {
    let start = Instant::now();
    let results: Vec<(bool, f64)> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = common::rng(1_000 + seed);
            let n = rng.gen_range(2..=30);
            let size = rng.gen_range(2..=6);
            let d = common::pum_dataset(&mut rng, common::kind(seed), n, size);
            let verdict = monotonicity::check_cyclic_monotonicity(&d, DEFAULT_CM_TOL).unwrap();
            (verdict.is_pass(), verdict.cycle_sum_lower_bound())
        })
        .collect();
    let elapsed = start.elapsed();
    let all_pass = results.iter().all(|r| r.0);
    let min_bound = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    outcome(
        all_pass && min_bound >= -1e-9 && within(elapsed, 5.0),
        format!(
            "all pass = {all_pass}, min cycle-sum bound = {min_bound:.3e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn forward_round_trip() -> Outcome {
    let start = Instant::now();
    let options = VerifyOptions {
        tol: 1e-8,
        mixtures: 1000,
        seed: 0,
    };
    let results: Vec<Result<(f64, f64), String>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = common::rng(2_000 + seed);
            let n = rng.gen_range(2..=30);
            let size = rng.gen_range(2..=6);
            let d = common::pum_dataset(&mut rng, common::kind(seed), n, size);
            let fit = compute_potentials(&d).map_err(|e| format!("seed {seed}: {e}"))?;
            let r = verify_rationalization(&d, &fit, &options)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            if r.samples != n + 1000 {
                return Err(format!("seed {seed}: {} samples", r.samples));
            }
            Ok((r.max_fenchel_gap, r.max_optimality_gap))
        })
        .collect();
    let elapsed = start.elapsed();
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        return outcome(false, e.clone());
    }
    let fenchel = results.iter().flatten().map(|r| r.0).fold(0.0, f64::max);
    let optimality = results.iter().flatten().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        fenchel <= 1e-8 && optimality <= 1e-8 && within(elapsed, 30.0),
        format!(
            "max Fenchel gap = {fenchel:.3e}, max optimality gap = {optimality:.3e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn oracle_dataset(seed: u64) -> Dataset {
    let mut rng = common::rng(3_000 + seed);
    let n = rng.gen_range(2..=6);
    let size = rng.gen_range(2..=5);
    match seed % 3 {
        0 => common::pum_dataset(&mut rng, common::kind(seed / 3), n, size),
        1 => common::noise_dataset(&mut rng, n, size),
        _ => {
            // Logit choices with a little noise mixed in: near the boundary.
            let clean = common::pum_dataset(&mut rng, ClosedFormCost::NegEntropy, n, size);
            let rows = clean
                .observations()
                .iter()
                .map(|o| {
                    let noise = common::dirichlet(&mut rng, size);
                    let p: Vec<f64> = o
                        .probs
                        .as_slice()
                        .iter()
                        .zip(noise.as_slice())
                        .map(|(a, b)| 0.9 * a + 0.1 * b)
                        .collect();
                    (
                        o.values.clone(),
                        cyclorat::validate_simplex(&p, 1e-9).unwrap(),
                    )
                })
                .collect();
            common::build(size, rows)
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut disagreements = Vec::new();
    let mut bad_witnesses = Vec::new();
    let mut violations = 0;
    for seed in 0..500u64 {
        let d = oracle_dataset(seed);
        let fast = monotonicity::check_cyclic_monotonicity(&d, DEFAULT_CM_TOL).unwrap();
        let slow = monotonicity::brute_force_cm(&d, DEFAULT_CM_TOL).unwrap();
        if fast.is_pass() != slow.is_pass() {
            disagreements.push(seed);
        }
        if let Some(w) = fast.witness() {
            violations += 1;
            let sum = monotonicity::cycle_sum(&d, &w.nodes).unwrap();
            if !(sum < -DEFAULT_CM_TOL) {
                bad_witnesses.push(seed);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagreements.is_empty() && bad_witnesses.is_empty() && within(elapsed, 10.0),
        format!(
            "{violations} violations / 500, disagreements {disagreements:?}, bad witnesses {bad_witnesses:?}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Two-alternative dataset with integer values and slopes on the 1/8
/// lattice, adjacent slopes differing by 1/8, 1/4 or 1/2. Every kink of
/// the max-affine extension then lies on multiples of 1/4, which the grid
/// contains.
fn dyadic_dataset(seed: u64) -> Dataset {
    let mut rng = common::rng(5_000 + seed);
    let n = 1 + (seed % 3) as usize;
    let gaps = [1.0, 2.0, 4.0];
    let mut eighths = rng.gen_range(0..=2) as f64;
    let mut diff = rng.gen_range(-6..=0) as f64;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let y = rng.gen_range(-5..=5) as f64;
        let a = eighths / 8.0;
        rows.push((
            ValueVector::new(vec![y + diff, y]).unwrap(),
            cyclorat::validate_simplex(&[a, 1.0 - a], 1e-12).unwrap(),
        ));
        let fitting: Vec<f64> = gaps
            .iter()
            .copied()
            .filter(|g| eighths + g <= 8.0)
            .collect();
        eighths += fitting[rng.gen_range(0..fitting.len())];
        diff += rng.gen_range(1..=3) as f64;
    }
    common::build(2, rows)
}

/// `max_v [<v, p> - f(v)]` over the grid `[-50, 50]^2` with step 1e-3.
///
/// With `p` on the simplex the objective is constant along `(1, 1)`, so it
/// only depends on `x - y`; each difference `k * 1e-3`, `|k| <= 100000`, is
/// hit by the grid point `(ceil(k/2), ceil(k/2) - k) * 1e-3`.
fn grid_legendre(d: &Dataset, fit: &cyclorat::PotentialFit, p: &[f64]) -> f64 {
    (-100_000i64..=100_000)
        .map(|k| {
            let xi = (k as f64 / 2.0).ceil() as i64;
            let v = [xi as f64 * 1e-3, (xi - k) as f64 * 1e-3];
            numeric::dot(&v, p) - evaluate_extension(fit, d, &v).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn conjugate_grid_oracle() -> Outcome {
    let start = Instant::now();
    let results: Vec<(f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let d = dyadic_dataset(seed);
            let fit = compute_potentials(&d).unwrap();
            let cost = ConjugateCost::new(&fit, &d).unwrap();
            let slopes: Vec<f64> = (0..d.len()).map(|i| d.probs(i)[0]).collect();
            let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut rng = common::rng(6_000 + seed);
            let mut worst = 0.0f64;
            let mut reduction = 0.0f64;
            for k in 0..50 {
                let u = match k {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.gen::<f64>(),
                };
                let t = lo + u * (hi - lo);
                let p = [t, 1.0 - t];
                let exact = cost.evaluate(&p).unwrap();
                let grid = grid_legendre(&d, &fit, &p);
                worst = worst.max((exact - grid).abs());
                // Spot-check the reduction on arbitrary grid points.
                for _ in 0..20 {
                    let v = [
                        rng.gen_range(-50_000i64..=50_000) as f64 * 1e-3,
                        rng.gen_range(-50_000i64..=50_000) as f64 * 1e-3,
                    ];
                    let h = numeric::dot(&v, &p) - evaluate_extension(&fit, &d, &v).unwrap();
                    reduction = reduction.max(h - grid);
                }
            }
            (worst, reduction)
        })
        .collect();
    let elapsed = start.elapsed();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let reduction = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        worst <= 1e-8 && reduction <= 1e-9 && within(elapsed, 60.0),
        format!(
            "max |C - grid| = {worst:.3e}, grid points above reduced max = {reduction:.3e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn violation_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("violation.csv");
    let report = dir.path().join("report.json");
    std::fs::write(
        &input,
        "menu_id,obs_id,alternative,value,prob\n\
         m,1,a1,1,0.3\nm,1,a2,0,0.7\nm,2,a1,0,0.6\nm,2,a2,1,0.4\n",
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_cyclorat"))
        .arg("check")
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&report)
        .status()
        .unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let witness = &json["menus"][0]["cyclic_monotonicity"]["witness"];
    let sum = witness["cycle_sum"].as_f64().unwrap_or(f64::NAN);
    let cycle = witness["cycle"].clone();
    outcome(
        status.code() == Some(3)
            && (sum + 0.6).abs() <= 1e-12
            && cycle == serde_json::json!([1, 2]),
        format!("exit {:?}, cycle {cycle}, sum {sum:.17}", status.code()),
    )
}

/// Base value vectors plus single-coordinate perturbations, so that many
/// pairs are eligible for the two-point test.
fn two_point_dataset(seed: u64) -> Dataset {
    let mut rng = common::rng(7_000 + seed);
    let size = rng.gen_range(2..=5);
    let kind = common::kind(seed);
    let mut rows = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let base = common::values(&mut rng, size, 3.0);
        rows.push(base.clone());
        for _ in 0..rng.gen_range(1..=4) {
            let mut v = base.as_slice().to_vec();
            v[rng.gen_range(0..size)] += rng.gen_range(-2.0..2.0);
            rows.push(ValueVector::new(v).unwrap());
        }
    }
    let rows = rows
        .into_iter()
        .map(|v| {
            let p: SimplexPoint = pum_solve_closed(kind, &v);
            (v, p)
        })
        .collect();
    common::build(size, rows)
}

fn binary(pairs: &[(&str, &str, f64)]) -> BinaryChoices {
    pairs
        .iter()
        .map(|(x, y, p)| ((x.to_string(), y.to_string()), *p))
        .collect()
}

fn diagnostics_consistency() -> Outcome {
    let mut cm_datasets = 0;
    let mut eligible_pairs = 0;
    let mut offending = Vec::new();
    for seed in 0..300u64 {
        let d = if seed < 200 {
            two_point_dataset(seed)
        } else {
            let mut rng = common::rng(8_000 + seed);
            let n = rng.gen_range(2..=6);
            common::noise_dataset(&mut rng, n, 2)
        };
        let verdict = monotonicity::check_cyclic_monotonicity(&d, DEFAULT_CM_TOL).unwrap();
        if !verdict.is_pass() {
            continue;
        }
        cm_datasets += 1;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                let differing = (0..d.menu().len())
                    .filter(|&a| (d.values(i)[a] - d.values(j)[a]).abs() > 1e-12)
                    .count();
                eligible_pairs += usize::from(differing == 1);
            }
        }
        if !monotonicity::check_two_point_monotonicity(&d, DEFAULT_CM_TOL)
            .unwrap()
            .is_empty()
        {
            offending.push(seed);
        }
    }
    let flagged = monotonicity::check_weak_stochastic_transitivity(
        &binary(&[("x", "y", 0.6), ("y", "z", 0.55), ("x", "z", 0.4)]),
        1e-12,
    )
    .unwrap();
    let clean = monotonicity::check_weak_stochastic_transitivity(
        &binary(&[("x", "y", 0.6), ("y", "z", 0.55), ("x", "z", 0.7)]),
        1e-12,
    )
    .unwrap();
    let triple_flagged = flagged
        .iter()
        .any(|w| (w.x.as_str(), w.y.as_str(), w.z.as_str()) == ("x", "y", "z"));
    outcome(
        offending.is_empty() && cm_datasets > 0 && eligible_pairs > 0 && triple_flagged && clean.is_empty(),
        format!(
            "{cm_datasets} CM datasets ({eligible_pairs} two-point pairs), offending {offending:?}; \
             WST (0.6, 0.55, 0.4) flagged = {triple_flagged}, (0.6, 0.55, 0.7) flags = {}",
            clean.len()
        ),
    )
}

fn scale() -> Outcome {
    let mut rng = common::rng(9_000);
    let d = common::pum_dataset(&mut rng, ClosedFormCost::NegEntropy, 200, 10);
    let start = Instant::now();
    let verdict = monotonicity::check_cyclic_monotonicity(&d, DEFAULT_CM_TOL).unwrap();
    let check_time = start.elapsed();
    let start = Instant::now();
    let fit = compute_potentials(&d);
    let report = fit
        .as_ref()
        .ok()
        .map(|fit| verify_rationalization(&d, fit, &VerifyOptions::default()));
    let fit_time = start.elapsed();
    let verified = matches!(report, Some(Ok(ref r)) if r.passed);
    outcome(
        verdict.is_pass() && within(check_time, 1.0) && verified && within(fit_time, 120.0),
        format!(
            "check {:.3} s (pass = {}), fit + verify {:.3} s (passed = {verified})",
            check_time.as_secs_f64(),
            verdict.is_pass(),
            fit_time.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("duality golden pair", duality_golden_pair),
        (
            "perturbed-utility data are cyclically monotone",
            converse_direction,
        ),
        ("fit and verify round trip", forward_round_trip),
        (
            "fast check agrees with exhaustive enumeration",
            oracle_equivalence,
        ),
        (
            "conjugate matches grid Legendre transform",
            conjugate_grid_oracle,
        ),
        ("violation fixture through the CLI", violation_end_to_end),
        ("diagnostics consistency", diagnostics_consistency),
        ("scale n = 200, |A| = 10", scale),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", k + 1, result.detail);
        failed += usize::from(!result.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
