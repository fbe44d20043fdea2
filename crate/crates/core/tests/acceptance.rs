//! Exit criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use freqop::analysis::{convergence_sweep, noncollapse_report};
use freqop::analytic::{self, spectral_weights};
use freqop::dense::{
    build_frequency_operator, build_from_site_projectors, dense_statistics_with,
    eigenrelation_check, eigenspace_weights, verify_operator_algebra, FrequencyOperator,
};
use freqop::hilbert::ensemble_dim;
use freqop::par::Exec;
use freqop::sampler::{run_trials, run_trials_with};
use freqop::{BasisString, EnsembleSpec, StateVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Every product basis string is an eigenvector with eigenvalue count/N.
fn eigenrelation() -> Outcome {
    let mut worst = 0.0f64;
    let mut wrong_eigenvalues = 0;
    let mut checked = 0;
    for dim in 2..=3 {
        for n in 1..=6 {
            for j in 0..dim {
                let op = build_frequency_operator(dim, n, j).unwrap();
                for index in 0..ensemble_dim(dim, n).unwrap() {
                    let s = BasisString::from_index(index, dim, n).unwrap();
                    let c = eigenrelation_check(&op, &s, j).unwrap();
                    let count = s.indices().iter().filter(|&&i| i == j).count();
                    if c.eigenvalue.count != count
                        || op.get(index, index).re != count as f64 / n as f64
                    {
                        wrong_eigenvalues += 1;
                    }
                    worst = worst.max(c.residual);
                    checked += 1;
                }
            }
        }
    }
    outcome(
        worst < 1e-13 && wrong_eigenvalues == 0,
        format!("{checked} strings, max residual {worst:.2e} (< 1e-13), {wrong_eigenvalues} wrong eigenvalues"),
    )
}

/// String-sum and site-projector constructions agree entrywise.
fn construction() -> Outcome {
    let mut worst = 0.0f64;
    for dim in 2..=3 {
        for n in 1..=6 {
            for j in 0..dim {
                let a = build_frequency_operator(dim, n, j).unwrap();
                let b = build_from_site_projectors(dim, n, j).unwrap();
                worst = worst.max(a.sub(&b).unwrap().max_abs());
            }
        }
    }
    outcome(
        worst < 1e-14,
        format!("max entrywise difference {worst:.2e} (< 1e-14)"),
    )
}

/// Completeness, commutation, Hermiticity and spectrum.
fn algebra() -> Outcome {
    let mut worst = [0.0f64; 4];
    for dim in 2..=3 {
        for n in 1..=6 {
            let r = verify_operator_algebra(dim, n).unwrap();
            for (w, x) in
                worst
                    .iter_mut()
                    .zip([r.identity, r.commutator, r.hermiticity, r.spectrum])
            {
                *w = w.max(x);
            }
        }
    }
    outcome(
        worst.iter().all(|&w| w < 1e-13),
        format!(
            "identity {:.2e}, commutator {:.2e}, hermiticity {:.2e}, spectrum {:.2e} (< 1e-13)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn two_level(p: f64, n: usize) -> EnsembleSpec {
    EnsembleSpec::new(StateVector::two_level(p).unwrap(), n, 0).unwrap()
}

/// Dense oracle against closed forms on random states, plus the evaluated instances.
fn central_numbers() -> Outcome {
    let mut rng = common::rng(0x5eed);
    let states: Vec<(StateVector, StateVector)> = (0..100)
        .map(|_| {
            (
                common::random_state(&mut rng, 2),
                common::random_state(&mut rng, 3),
            )
        })
        .collect();
    let mut worst = 0.0f64;
    for n in 1..=7 {
        for dim in 2..=3 {
            for j in 0..dim {
                let op = FrequencyOperator::build(dim, n, j).unwrap();
                for pair in &states {
                    let state = if dim == 2 { &pair.0 } else { &pair.1 };
                    let spec = EnsembleSpec::new(state.clone(), n, j).unwrap();
                    let d = dense_statistics_with(&op, &spec).unwrap();
                    let a = analytic::statistics(&spec);
                    let dense_variance = d.gram - d.expectation * d.expectation;
                    for dev in [
                        d.expectation - a.expectation,
                        d.gram - a.gram,
                        d.distance_sq - a.distance_sq,
                        dense_variance - a.variance,
                    ] {
                        worst = worst.max(dev.abs());
                    }
                }
            }
        }
    }
    let half = analytic::statistics(&two_level(0.5, 10));
    let s36 = analytic::statistics(&two_level(0.36, 100));
    let instances = [
        (half.distance_sq, 0.025, 1e-11),
        (half.uncertainty(), 0.1581139, 5e-8),
        (half.gram, 0.275, 1e-11),
        (s36.distance_sq, 0.002304, 1e-11),
    ];
    let instances_ok = instances
        .iter()
        .all(|&(got, want, tol)| (got - want).abs() <= tol);
    outcome(
        worst < 1e-11 && instances_ok,
        format!(
            "oracle max deviation {worst:.2e} (< 1e-11); p=0.5,N=10: d2={} u={} gram={}; p=0.36,N=100: d2={}",
            half.distance_sq,
            half.uncertainty(),
            half.gram,
            s36.distance_sq
        ),
    )
}

/// Log-log slope of distance_sq against N.
fn one_over_n() -> Outcome {
    let s = StateVector::two_level(0.5).unwrap();
    let sweep = convergence_sweep(&s, 0, &[10, 100, 1000, 10_000], None).unwrap();
    let slope = sweep.slope.value().unwrap_or(f64::NAN);
    outcome(
        (slope + 1.0).abs() <= 1e-9,
        format!("slope {slope:.12} (|slope + 1| <= 1e-9)"),
    )
}

/// distance_sq -> 0 while the spectral mass stays spread.
fn noncollapse() -> Outcome {
    let s = StateVector::two_level(0.5).unwrap();
    let r = noncollapse_report(&s, 0, &[100, 10_000, 1_000_000]).unwrap();
    let rows = &r.rows;
    let ratios_ok = rows
        .windows(2)
        .all(|w| (w[0].distance_sq / w[1].distance_sq / 100.0 - 1.0).abs() < 1e-9);
    let mass_ok = rows
        .windows(2)
        .all(|w| w[1].off_peak_mass > w[0].off_peak_mass)
        && rows.last().unwrap().off_peak_mass > 0.999;
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_max_weight).collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let limit = (2.0 / std::f64::consts::PI).sqrt();
    let constant_ok = scaled
        .iter()
        .all(|x| (x / mean - 1.0).abs() <= 0.02 && (x / limit - 1.0).abs() <= 0.02);

    let mut rng = common::rng(0xface);
    let mut worst = 0.0f64;
    for dim in 2..=3 {
        for _ in 0..20 {
            let state = common::random_state(&mut rng, dim);
            for n in 1..=7 {
                for j in 0..dim {
                    let spec = EnsembleSpec::new(state.clone(), n, j).unwrap();
                    let projected = eigenspace_weights(&spec).unwrap();
                    let closed = spectral_weights(&spec).unwrap();
                    for (a, b) in projected.iter().zip(&closed.weights) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
    }
    outcome(
        ratios_ok && mass_ok && constant_ok && worst < 1e-11,
        format!(
            "off-peak mass {:.6} -> {:.6} -> {:.6}; max_weight*sqrt(N) {:.6}/{:.6}/{:.6}; projection deviation {worst:.2e}",
            rows[0].off_peak_mass,
            rows[1].off_peak_mass,
            rows[2].off_peak_mass,
            scaled[0],
            scaled[1],
            scaled[2]
        ),
    )
}

/// Sampled frequency statistics against the operator moments.
fn monte_carlo() -> Outcome {
    const SEED: u64 = 20_240_917;
    let s = StateVector::two_level(0.5).unwrap();
    let t = run_trials(&s, 100, 0, 10_000, SEED).unwrap();
    let again = run_trials(&s, 100, 0, 10_000, SEED).unwrap();
    let seq = run_trials_with(&s, 100, 0, 10_000, SEED, Exec::Sequential).unwrap();
    let deterministic = t == again && t == seq;
    let mean_ok = (t.mean_frequency - 0.5).abs() <= 0.0025;
    let ratio = t.sample_variance / 0.0025;
    let var_ok = (0.85..=1.15).contains(&ratio);
    outcome(
        deterministic && mean_ok && var_ok,
        format!(
            "mean {:.6} (|. - 0.5| <= 0.0025), variance ratio {ratio:.4} in [0.85, 1.15], deterministic {deterministic}",
            t.mean_frequency
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("AC1 eigenrelation", eigenrelation, Duration::from_secs(10)),
        (
            "AC2 construction equivalence",
            construction,
            Duration::from_secs(10),
        ),
        ("AC3 operator algebra", algebra, Duration::from_secs(10)),
        (
            "AC4 central numbers",
            central_numbers,
            Duration::from_secs(30),
        ),
        ("AC5 1/N law", one_over_n, Duration::from_secs(1)),
        ("AC6 non-collapse", noncollapse, Duration::from_secs(10)),
        (
            "AC7 Monte Carlo consistency",
            monte_carlo,
            Duration::from_secs(30),
        ),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < budget;
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {name}: {} ({:.3}s, budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
