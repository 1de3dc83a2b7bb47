use aphyper_core::harness::{rows_to_csv, wilson_interval};
use aphyper_core::{
    clause_count, crossover_estimate, estimate_sat_probability, threshold_scan,
    verify_moments_montecarlo, Experiment, PrimeModulus, Problem, Status,
};

fn n(v: usize) -> PrimeModulus {
    PrimeModulus::new(v).unwrap()
}

fn experiment(problem: Problem, nv: usize, trials: u32, seed: u64) -> Experiment {
    let mut e = Experiment::new(problem, n(nv), 3, trials, seed);
    e.exclude_trivial = true;
    e
}

#[test]
fn low_and_high_density_estimates() {
    let exp = experiment(Problem::Nae, 31, 200, 1);
    let low = estimate_sat_probability(&exp, 0.1).unwrap();
    assert!(low.p_hat >= 0.99, "{low:?}");
    let high = estimate_sat_probability(&exp, 3.0).unwrap();
    assert!(high.p_hat <= 0.05, "{high:?}");
    for row in [&low, &high] {
        assert_eq!(row.sat + row.unsat + row.unknown, row.trials);
        assert!(row.ci_lo <= row.p_hat && row.p_hat <= row.ci_hi);
    }
}

#[test]
fn trivial_edges_cap_colorability() {
    // With step-0 edges allowed, one trivial edge already forbids a proper
    // coloring: P(colorable) <= (1 - 1/n)^m.
    let exp = Experiment::new(Problem::TwoCol, n(31), 3, 400, 5);
    let row = estimate_sat_probability(&exp, 1.0).unwrap();
    let cap = (1.0 - 1.0 / 31.0f64).powi(clause_count(1.0, n(31)).unwrap() as i32);
    assert!(
        row.p_hat <= cap + 3.0 * (cap * (1.0 - cap) / 400.0).sqrt(),
        "{row:?} cap {cap}"
    );
}

#[test]
fn single_trial_rows_reproduce() {
    let exp = experiment(Problem::Nae, 31, 1, 99);
    let a = estimate_sat_probability(&exp, 2.0).unwrap();
    let b = estimate_sat_probability(&exp, 2.0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scans_are_deterministic_and_order_free() {
    let exp = experiment(Problem::TwoCol, 31, 40, 12);
    let a = rows_to_csv(&threshold_scan(&exp, 1.0, 3.0, 0.5).unwrap());
    let b = rows_to_csv(&threshold_scan(&exp, 1.0, 3.0, 0.5).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with("r,n,k,trials,sat,unsat,unknown,p_hat,ci_lo,ci_hi\n"));
    assert_eq!(a.lines().count(), 6);

    // Aggregates do not depend on trial order.
    let m = clause_count(2.0, n(31)).unwrap();
    let forward: Vec<Status> = (0..40).map(|t| exp.run_trial(m, 2, t).unwrap()).collect();
    let mut backward: Vec<Status> = (0..40)
        .rev()
        .map(|t| exp.run_trial(m, 2, t).unwrap())
        .collect();
    backward.reverse();
    assert_eq!(forward, backward);
    let rows = threshold_scan(&exp, 1.0, 3.0, 0.5).unwrap();
    assert_eq!(
        rows[2].sat as usize,
        forward.iter().filter(|&&s| s == Status::Sat).count()
    );
}

#[test]
fn single_point_grid() {
    let exp = experiment(Problem::Nae, 13, 5, 0);
    assert_eq!(threshold_scan(&exp, 1.0, 1.0, 0.1).unwrap().len(), 1);
}

#[test]
fn nae_scan_is_monotone_up_to_noise() {
    let exp = experiment(Problem::Nae, 53, 200, 2);
    let rows = threshold_scan(&exp, 1.0, 3.0, 0.2).unwrap();
    let noise = 2.0 * (0.25f64 / 200.0).sqrt();
    for w in rows.windows(2) {
        assert!(w[1].p_hat <= w[0].p_hat + noise, "{:?} -> {:?}", w[0], w[1]);
    }
}

#[test]
fn crossovers_fall_between_known_bounds() {
    let rows = threshold_scan(&experiment(Problem::TwoCol, 53, 200, 3), 1.0, 3.0, 0.2).unwrap();
    let r_half = crossover_estimate(&rows).unwrap();
    assert!((1.5..=2.41).contains(&r_half), "2col crossover {r_half}");

    let rows = threshold_scan(&experiment(Problem::Nae, 73, 200, 4), 1.0, 3.0, 0.05).unwrap();
    let r_half = crossover_estimate(&rows).unwrap();
    assert!((1.5..=2.41).contains(&r_half), "nae crossover {r_half}");
}

#[test]
fn first_moments_match_sampling() {
    for problem in [Problem::Nae, Problem::TwoCol] {
        let check = verify_moments_montecarlo(problem, n(11), 3, 5, 20_000, 17).unwrap();
        assert!(check.first_moment_within(3.0), "{check:?}");
    }
    let nae = verify_moments_montecarlo(Problem::Nae, n(11), 3, 5, 20_000, 17).unwrap();
    assert!((nae.closed_form_ex - 2048.0 * 0.75f64.powi(5)).abs() < 1e-9);
    assert_eq!(nae.second_moment_within(3.0), Some(true));
}

#[test]
fn wilson_interval_shrinks_with_trials() {
    let (lo1, hi1) = wilson_interval(50, 100);
    let (lo2, hi2) = wilson_interval(500, 1000);
    assert!(hi2 - lo2 < hi1 - lo1);
}
