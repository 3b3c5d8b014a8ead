//! Monte Carlo oracles for the inference layer: coverage of simultaneous
//! bands and size/power of the three bootstrap tests, all under the frailty
//! generator whose marginals are known in closed form.

use gaptime::inference::*;
use gaptime::prelude::*;
use gaptime::simulation::*;

const GRID: [f64; 7] = [0.179, 0.285, 0.409, 0.555, 0.733, 0.963, 1.288];

fn cfg(theta: f64, n: usize, alpha: Vec<f64>) -> SimConfig {
    SimConfig { theta, n, alpha, ..SimConfig::default() }
}

fn binomial_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// Fraction of replications in which `reject` says yes; replications that
/// error out (unidentifiable draws) are excluded from the denominator.
fn rejection_rate(reps: usize, seed: u64, mut reject: impl FnMut(u64) -> Option<bool>) -> (f64, usize) {
    let outcomes: Vec<bool> = (0..reps as u64).filter_map(|r| reject(derive_seed(seed, r))).collect();
    let hits = outcomes.iter().filter(|&&x| x).count();
    (hits as f64 / outcomes.len() as f64, outcomes.len())
}

#[test]
fn band_simultaneous_coverage() {
    let config = cfg(1.5, 200, vec![1.25]);
    let target = Target::new(2, Functional::Cif { cause: 1 });
    let reps = 500;
    let mut covered = 0;
    for r in 0..reps {
        let seed = derive_seed(0xBA4D, r);
        let sample = gen_sample(&config, &mut replicate_rng(seed, 0)).unwrap();
        let plan = BootstrapPlan::new(target, 100, GRID.to_vec(), 0.10, seed).with_band(0.179, 1.288);
        let summary = bootstrap_se(&sample, &plan).unwrap();
        let band = summary.band.as_ref().unwrap();
        let ok = band
            .indices
            .iter()
            .zip(&band.plain)
            .all(|(&i, iv)| iv.contains(true_value(target.functional, 1.25, summary.grid[i]).unwrap()));
        covered += ok as usize;
    }
    let rate = covered as f64 / reps as f64;
    println!("90% band coverage over [0.179, 1.288]: {rate:.3}");
    assert!((0.85..=0.95).contains(&rate), "coverage {rate}");
}

#[test]
fn stage_test_power_under_shift() {
    // α_3 = 3.5 lowers F_1^(3)(0.555) from 0.400 to 0.245
    let config = cfg(1.5, 400, vec![1.25, 1.25, 3.5]);
    let f = Functional::Cif { cause: 1 };
    let shift = true_value(f, 1.25, 0.555).unwrap() - true_value(f, 3.5, 0.555).unwrap();
    assert!((shift - 0.15).abs() < 0.01);
    let (rate, used) = rejection_rate(100, 0x7E57, |seed| {
        let sample = gen_sample(&config, &mut replicate_rng(seed, 0)).unwrap();
        let res = test_stage(&sample, 2, 3, f, 0.555, &TestSettings::new(100, 0.05, seed)).ok()?;
        Some(res.reject)
    });
    println!("Test 1 power: {rate:.3} over {used}");
    assert!(rate > 0.5, "power {rate}");
}

#[test]
fn group_test_size() {
    let config = cfg(1.5, 200, vec![1.25]);
    let reps = 500;
    let (rate, used) = rejection_rate(reps, 0x6209, |seed| {
        let mut rng = replicate_rng(seed, 0);
        let g1 = gen_sample(&config, &mut rng).unwrap();
        let g2 = gen_sample(&config, &mut rng).unwrap();
        let res = test_group(&g1, &g2, 2, 1, 0.555, &TestSettings::new(100, 0.05, seed)).ok()?;
        Some(res.reject)
    });
    println!("Test 2 size: {rate:.3} over {used}");
    assert!(used >= reps - 5);
    assert!((rate - 0.05).abs() <= 0.02, "size {rate}");
}

#[test]
fn group_test_power_grows_with_n() {
    let f = Functional::Cif { cause: 1 };
    let t = 1.288;
    assert!(true_value(f, 1.25, t).unwrap() - true_value(f, 1.6, t).unwrap() > 0.09);
    let reps = 200;
    let power = |n: usize| {
        let c1 = cfg(1.5, n, vec![1.25]);
        let c2 = cfg(1.5, n, vec![1.6]);
        rejection_rate(reps, 0x9041 + n as u64, |seed| {
            let mut rng = replicate_rng(seed, 0);
            let g1 = gen_sample(&c1, &mut rng).unwrap();
            let g2 = gen_sample(&c2, &mut rng).unwrap();
            let res = test_group(&g1, &g2, 1, 1, t, &TestSettings::new(100, 0.05, seed)).ok()?;
            Some(res.reject)
        })
        .0
    };
    let (small, large) = (power(100), power(400));
    println!("Test 2 power: n=100 {small:.3}, n=400 {large:.3}");
    let se = (binomial_se(small, reps).powi(2) + binomial_se(large, reps).powi(2)).sqrt();
    assert!(large - small > 3.0 * se, "power {small} -> {large}");
}

#[test]
fn prev_type_test_size_under_independence() {
    let config = cfg(1.0, 200, vec![1.25]);
    let reps = 500;
    let (rate, used) = rejection_rate(reps, 0x3E51, |seed| {
        let sample = gen_sample(&config, &mut replicate_rng(seed, 0)).unwrap();
        let res = test_prev_type(&sample, 2, 1, 2, 0.555, &TestSettings::new(100, 0.05, seed)).ok()?;
        Some(res.reject)
    });
    println!("Test 3 size (theta = 1): {rate:.3} over {used}");
    assert!(used >= reps - 5);
    assert!((rate - 0.05).abs() <= 0.02, "size {rate}");
}

#[test]
fn prev_type_test_detects_frailty() {
    // The previous cause carries information about the shared frailty, so
    // the two conditional incidences differ once θ > 1.
    let config = cfg(3.0, 1000, vec![1.25]);
    let reps = 100;
    let (rate, used) = rejection_rate(reps, 0x3E52, |seed| {
        let sample = gen_sample(&config, &mut replicate_rng(seed, 0)).unwrap();
        let res = test_prev_type(&sample, 2, 1, 2, 0.555, &TestSettings::new(100, 0.05, seed)).ok()?;
        Some(res.reject)
    });
    println!("Test 3 power (theta = 3, n = 1000): {rate:.3} over {used}");
    assert!(rate > 0.05 + 3.0 * binomial_se(0.05, used), "rate {rate}");
}
