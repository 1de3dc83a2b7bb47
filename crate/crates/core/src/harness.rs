//! Monte Carlo experiments: satisfiability-probability estimates, density
//! scans with crossover estimation, and sampling checks of the moment
//! formulas.
//!
//! Trial `t` at grid point `g` always draws its instance from
//! `TrialRng::for_trial(seed, g, t)`, so results do not depend on how the
//! worker pool schedules cells.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::ap::PrimeModulus;
use crate::error::{Error, Result};
use crate::generators::{clause_count, sample_ap_hypergraph_m, sample_nae_formula};
use crate::moments::{
    log2_first_moment_2col_m, log2_first_moment_nae, log2_second_moment_2col_m,
    log2_second_moment_nae_m, Problem,
};
use crate::rng::TrialRng;
use crate::solvers::{count_nae_exhaustive, decide_2col, decide_nae, Status, EXHAUSTIVE_LIMIT};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub const CSV_HEADER: &str = "r,n,k,trials,sat,unsat,unknown,p_hat,ci_lo,ci_hi";

pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.r, r.n, r.k, r.trials, r.sat, r.unsat, r.unknown, r.p_hat, r.ci_lo, r.ci_hi
        );
    }
    out
}

/// Wilson score interval at 95% for `successes` out of `total`.
pub fn wilson_interval(successes: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let nt = total as f64;
    let p = successes as f64 / nt;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nt;
    let centre = (p + z2 / (2.0 * nt)) / denom;
    let half = Z95 * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).sqrt() / denom;
    (
        (centre - half).max(0.0).min(p),
        (centre + half).min(1.0).max(p),
    )
}

/// Shared parameters of a Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub problem: Problem,
    pub n: PrimeModulus,
    pub k: usize,
    pub trials: u32,
    pub seed: u64,
    pub node_budget: u64,
    pub exclude_trivial: bool,
}

impl Experiment {
    pub fn new(problem: Problem, n: PrimeModulus, k: usize, trials: u32, seed: u64) -> Self {
        Experiment {
            problem,
            n,
            k,
            trials,
            seed,
            node_budget: DEFAULT_NODE_BUDGET,
            exclude_trivial: false,
        }
    }

    fn validate(&self) -> Result<()> {
        self.n.check_length(self.k)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.problem == Problem::TwoCol && self.k != 3 {
            return Err(Error::UnsupportedK(self.k));
        }
        Ok(())
    }

    /// Generates and solves one instance.
    pub fn run_trial(&self, m: usize, grid_index: u32, trial: u32) -> Result<Status> {
        let mut rng = TrialRng::for_trial(self.seed, grid_index, trial);
        Ok(match self.problem {
            Problem::Nae => {
                let f = sample_nae_formula(self.n, self.k, m, self.exclude_trivial, &mut rng)?;
                decide_nae(&f, self.node_budget).status
            }
            Problem::TwoCol => {
                let h = sample_ap_hypergraph_m(self.n, self.k, m, self.exclude_trivial, &mut rng)?;
                decide_2col(&h, self.node_budget).status
            }
        })
    }

    fn row(&self, r: f64, statuses: &[Status]) -> Result<ScanRow> {
        let count = |s| statuses.iter().filter(|&&x| x == s).count() as u64;
        let (sat, unsat, unknown) = (
            count(Status::Sat),
            count(Status::Unsat),
            count(Status::Unknown),
        );
        let decided = sat + unsat;
        if decided == 0 {
            return Err(Error::BudgetTooSmall);
        }
        let (ci_lo, ci_hi) = wilson_interval(sat, decided);
        Ok(ScanRow {
            r,
            n: self.n.get(),
            k: self.k,
            trials: statuses.len() as u64,
            sat,
            unsat,
            unknown,
            p_hat: sat as f64 / decided as f64,
            ci_lo,
            ci_hi,
        })
    }
}

/// Estimates `P(satisfiable)` at density `r` from `trials` independent
/// instances (grid index 0).
pub fn estimate_sat_probability(exp: &Experiment, r: f64) -> Result<ScanRow> {
    estimate_at(exp, r, 0)
}

fn estimate_at(exp: &Experiment, r: f64, grid_index: u32) -> Result<ScanRow> {
    exp.validate()?;
    let m = clause_count(r, exp.n)?;
    let statuses = (0..exp.trials)
        .into_par_iter()
        .map(|t| exp.run_trial(m, grid_index, t))
        .collect::<Result<Vec<_>>>()?;
    exp.row(r, &statuses)
}

/// Grid `r_min, r_min + r_step, ...` up to `r_max` (inclusive up to 1e-9
/// slack), each value rounded to 9 decimals.
pub fn density_grid(r_min: f64, r_max: f64, r_step: f64) -> Result<Vec<f64>> {
    if !(r_min.is_finite() && r_max.is_finite() && r_min >= 0.0) || r_min > r_max {
        return Err(Error::InvalidParameter(format!(
            "bad density range [{r_min}, {r_max}]"
        )));
    }
    if !(r_step > 0.0 && r_step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r_step = {r_step} must be positive"
        )));
    }
    let points = ((r_max - r_min) / r_step + 1e-9).floor() as usize + 1;
    Ok((0..points)
        .map(|i| ((r_min + i as f64 * r_step) * 1e9).round() / 1e9)
        .collect())
}

/// One [`ScanRow`] per grid density, in ascending `r`. All `(r, trial)`
/// cells share one worker pool.
pub fn threshold_scan(
    exp: &Experiment,
    r_min: f64,
    r_max: f64,
    r_step: f64,
) -> Result<Vec<ScanRow>> {
    exp.validate()?;
    let grid = density_grid(r_min, r_max, r_step)?;
    let ms = grid
        .iter()
        .map(|&r| clause_count(r, exp.n))
        .collect::<Result<Vec<_>>>()?;
    let trials = exp.trials as usize;
    let statuses = (0..grid.len() * trials)
        .into_par_iter()
        .map(|cell| {
            let (g, t) = (cell / trials, cell % trials);
            exp.run_trial(ms[g], g as u32, t as u32)
        })
        .collect::<Result<Vec<_>>>()?;
    grid.iter()
        .zip(statuses.chunks(trials))
        .map(|(&r, chunk)| exp.row(r, chunk))
        .collect()
}

/// Non-increasing isotonic fit (pool adjacent violators) of `values` with
/// positive `weights`.
pub fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().unwrap() = ((m1 * w1 + m2 * w2) / w, w, l1 + l2);
        }
    }
    blocks
        .iter()
        .flat_map(|&(m, _, l)| std::iter::repeat_n(m, l))
        .collect()
}

/// Density where the (isotonic-smoothed) `p_hat` curve crosses 1/2, by
/// linear interpolation between the bracketing grid points.
pub fn crossover_estimate(rows: &[ScanRow]) -> Result<f64> {
    let mut rows: Vec<&ScanRow> = rows.iter().collect();
    rows.sort_by(|a, b| a.r.total_cmp(&b.r));
    let values: Vec<f64> = rows.iter().map(|r| r.p_hat).collect();
    let weights: Vec<f64> = rows
        .iter()
        .map(|r| ((r.sat + r.unsat) as f64).max(1.0))
        .collect();
    let fit = isotonic_nonincreasing(&values, &weights);
    let below = fit
        .iter()
        .position(|&p| p < 0.5)
        .ok_or(Error::InsufficientRange)?;
    if below == 0 {
        return Err(Error::InsufficientRange);
    }
    let (r0, p0) = (rows[below - 1].r, fit[below - 1]);
    let (r1, p1) = (rows[below].r, fit[below]);
    Ok(r0 + (p0 - 0.5) / (p0 - p1) * (r1 - r0))
}

/// Sample moments of the exact solution count against the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCheck {
    pub problem: Problem,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub samples: u64,
    pub mean_x: f64,
    pub se_mean_x: f64,
    pub closed_form_ex: f64,
    /// `(mean - closed form) / SE`; zero when both sides agree exactly.
    pub z_ex: f64,
    pub mean_x2: f64,
    pub se_mean_x2: f64,
    pub closed_form_ex2: Option<f64>,
    pub z_ex2: Option<f64>,
}

impl MomentCheck {
    pub fn first_moment_within(&self, sigmas: f64) -> bool {
        self.z_ex.abs() <= sigmas
    }

    pub fn second_moment_within(&self, sigmas: f64) -> Option<bool> {
        self.z_ex2.map(|z| z.abs() <= sigmas)
    }
}

/// Draws `samples` instances with `m` clauses/edges (trivial progressions
/// included), counts solutions exhaustively and compares the sample
/// moments with the closed forms.
pub fn verify_moments_montecarlo(
    problem: Problem,
    n: PrimeModulus,
    k: usize,
    m: usize,
    samples: u32,
    seed: u64,
) -> Result<MomentCheck> {
    n.check_length(k)?;
    if n.get() > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n: n.get(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    if problem == Problem::TwoCol && k != 3 {
        return Err(Error::UnsupportedK(k));
    }
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = TrialRng::for_trial(seed, 0, i);
            let f = match problem {
                Problem::Nae => sample_nae_formula(n, k, m, false, &mut rng)?,
                Problem::TwoCol => sample_ap_hypergraph_m(n, k, m, false, &mut rng)?.to_formula(),
            };
            Ok(count_nae_exhaustive(&f)?
                .count
                .expect("exhaustive mode counts"))
        })
        .collect::<Result<Vec<u64>>>()?;

    let (closed_ex, closed_ex2) = match problem {
        Problem::Nae => (
            log2_first_moment_nae(n.get(), k, m).exp2(),
            (k == 3)
                .then(|| log2_second_moment_nae_m(n, k, m))
                .transpose()?
                .map(f64::exp2),
        ),
        Problem::TwoCol => (
            log2_first_moment_2col_m(n, m).exp2(),
            Some(log2_second_moment_2col_m(n, m).exp2()),
        ),
    };

    let (mean_x, se_x) = mean_and_se(counts.iter().map(|&c| c as f64));
    let (mean_x2, se_x2) = mean_and_se(counts.iter().map(|&c| (c as f64) * (c as f64)));
    let z = |mean: f64, se: f64, closed: f64| {
        let diff = mean - closed;
        if diff.abs() <= 1e-9 * closed.abs().max(1.0) {
            0.0
        } else if se == 0.0 {
            diff.signum() * f64::INFINITY
        } else {
            diff / se
        }
    };
    Ok(MomentCheck {
        problem,
        n: n.get(),
        k,
        m,
        samples: u64::from(samples),
        mean_x,
        se_mean_x: se_x,
        closed_form_ex: closed_ex,
        z_ex: z(mean_x, se_x, closed_ex),
        mean_x2,
        se_mean_x2: se_x2,
        closed_form_ex2: closed_ex2,
        z_ex2: closed_ex2.map(|c| z(mean_x2, se_x2, c)),
    })
}

/// Sample mean and its standard error (unbiased variance).
fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / count;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}
